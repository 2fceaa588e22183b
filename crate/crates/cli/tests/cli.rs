use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hullcharge_cli::report::{fmt_g9, CSV_HEADER};

fn hullcharge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hullcharge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn endurance_prints_airborne_time() {
    let o = hullcharge(&["endurance"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(
        stdout(&o).contains("1680.56 s / 28.01 min"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn simulate_reference_mission() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = hullcharge(&[
        "simulate",
        "--case",
        "p1s1",
        "--stops",
        "80",
        "--dwell",
        "20",
        "--out",
        path(&out),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(stdout(&o).contains("packets=400"));
    assert!(stdout(&o).contains("efficiency=1.398 pkt/kJ"));

    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["total_packets"], 400);
    assert_eq!(summary["feasible"], true);
    let eff = summary["efficiency_pkt_per_kj"].as_f64().unwrap();
    assert!((eff - 1.398).abs() < 5e-4);

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "simulate");
    assert_eq!(manifest["config"]["n_stops"], "80");
    assert_eq!(manifest["config"]["dwell_time"], "20");
    for a in manifest["artifacts"].as_array().unwrap() {
        assert!(out.join(a.as_str().unwrap()).is_file());
    }
}

#[test]
fn require_feasible_sets_exit_status() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let args = [
        "simulate",
        "--stops",
        "100",
        "--dwell",
        "20",
        "--out",
        path(&out),
    ];
    assert_eq!(hullcharge(&args).status.code(), Some(0));
    let mut strict = args.to_vec();
    strict.push("--require-feasible");
    assert_eq!(hullcharge(&strict).status.code(), Some(3));
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "dwel_time = 70\n").unwrap();
    let out = dir.path().join("run");
    let o = hullcharge(&["simulate", "--config", path(&cfg), "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(
        err.contains("bad.cfg:1:") && err.contains("dwel_time"),
        "{err}"
    );
    assert!(!out.exists());

    let missing = dir.path().join("missing.cfg");
    let o = hullcharge(&["endurance", "--config", path(&missing)]);
    assert_eq!(o.status.code(), Some(2));

    let o = hullcharge(&["simulate", "--dwell=-5", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_overrides_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("long.cfg");
    fs::write(&cfg, "# long dwell\ndwell_time = 70\n").unwrap();
    let o = hullcharge(&["endurance", "--config", path(&cfg), "--dwells", "70"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("max stops at 70 s dwell: 22"));
}

#[test]
fn unwritable_output_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let out = blocker.join("sub");
    let o = hullcharge(&["simulate", "--stops", "10", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains(path(&out)));
}

fn parse_csv(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn sweep_csv_shape_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep");
    let o = hullcharge(&[
        "sweep",
        "--stops-range",
        "4:100",
        "--dwells",
        "20,70",
        "--case",
        "p1s1",
        "--out",
        path(&out),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let bytes = fs::read(out.join("sweep.csv")).unwrap();
    assert!(!bytes.contains(&b'\r'));
    let text = String::from_utf8(bytes).unwrap();
    assert_eq!(text.lines().next(), Some(CSV_HEADER));
    let rows = parse_csv(&text);
    assert_eq!(rows.len(), 97 * 2);

    let mut infeasible = 0;
    for r in &rows {
        assert_eq!(r.len(), 8);
        assert_eq!(r[0], "p1s1");
        assert_eq!(r[1], "s1");
        let packets: u64 = r[4].parse().unwrap();
        let energy: f64 = r[5].parse().unwrap();
        assert_eq!(fmt_g9(packets as f64 / (energy / 1000.0)), r[6]);
        if r[7] == "false" {
            infeasible += 1;
        } else {
            assert_eq!(r[7], "true");
        }
    }
    assert!(infeasible > 0);

    let reference = rows.iter().find(|r| r[2] == "80" && r[3] == "20").unwrap();
    assert_eq!(reference[4], "400");
    assert_eq!(reference[7], "true");
    let over = rows.iter().find(|r| r[2] == "81" && r[3] == "20").unwrap();
    assert_eq!(over[7], "false");
    assert!(!over[4].is_empty() && !over[6].is_empty());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, parallel: bool| {
        let out = dir.path().join(name);
        let mut args = vec![
            "sweep",
            "--stops-range",
            "4:30",
            "--dwells",
            "20,70",
            "--out",
            path(&out),
        ];
        if parallel {
            args.push("--parallel");
        }
        let args: Vec<String> = args.into_iter().map(String::from).collect();
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(hullcharge(&args).status.code(), Some(0));
        out
    };
    let a = run("a", false);
    let b = run("b", false);
    let c = run("c", true);
    for f in ["sweep.csv", "summary.json", "manifest.json"] {
        let fa = fs::read(a.join(f)).unwrap();
        assert_eq!(fa, fs::read(b.join(f)).unwrap(), "{f}");
        assert_eq!(fa, fs::read(c.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn manifest_digest_tracks_config_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg1 = dir.path().join("a.cfg");
    let cfg2 = dir.path().join("b.cfg");
    fs::write(&cfg1, "dwell_time = 70\n").unwrap();
    fs::write(&cfg2, "# same scenario\ndwell_time = 70\n").unwrap();
    let digest = |cfg: &Path, name: &str| {
        let out = dir.path().join(name);
        let o = hullcharge(&[
            "simulate",
            "--config",
            path(cfg),
            "--stops",
            "5",
            "--out",
            path(&out),
        ]);
        assert_eq!(o.status.code(), Some(0));
        let m: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
        (
            m["config_file_sha256"].as_str().unwrap().to_string(),
            m["resolved_config_sha256"].as_str().unwrap().to_string(),
        )
    };
    let (file1, resolved1) = digest(&cfg1, "o1");
    let (file2, resolved2) = digest(&cfg2, "o2");
    assert_ne!(file1, file2);
    assert_eq!(resolved1, resolved2);
    assert_eq!(file1.len(), 64);
}
