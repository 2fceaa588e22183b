//! CSV and JSON artifacts. Everything written here is a pure function of
//! the inputs, so repeated runs produce identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use hullcharge_core::sweep::{equal_coverage_gain, CoverageGain, Peak};
use hullcharge_core::{
    clustering_gain, find_peak, p1_gain_over_p2, Case, GainStats, MissionLedger, ScenarioConfig,
    SweepTable,
};

use crate::config_file::{config_entries, render_config};

pub const CSV_FILE: &str = "sweep.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const MANIFEST_FILE: &str = "manifest.json";

pub const CSV_HEADER: &str =
    "case,layout,n_stops,dwell_s,packets,uav_energy_j,efficiency_pkt_per_kj,feasible";

/// `printf("%.9g")`: nine significant digits, trailing zeros dropped,
/// exponent form outside `[1e-4, 1e9)`.
pub fn fmt_g9(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.into();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    strip_zeros(&format!("{x:.*}", (8 - exp) as usize))
}

fn strip_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Energy and efficiency columns as written. The efficiency is computed
/// from the written energy, so re-deriving it from the CSV is exact.
pub fn csv_numbers(packets: u64, uav_energy: f64) -> (String, String) {
    let energy = fmt_g9(uav_energy);
    let written: f64 = energy.parse().expect("formatted float parses");
    let eff = if written > 0.0 {
        fmt_g9(packets as f64 / (written / 1000.0))
    } else {
        String::new()
    };
    (energy, eff)
}

fn csv_row(out: &mut String, case: Case, n_stops: usize, dwell: f64, m: Option<(u64, f64, bool)>) {
    let _ = write!(
        out,
        "{},{},{},{},",
        case.label(),
        case.layout,
        n_stops,
        fmt_g9(dwell)
    );
    match m {
        Some((packets, energy, feasible)) => {
            let (e, eff) = csv_numbers(packets, energy);
            let _ = writeln!(out, "{packets},{e},{eff},{feasible}");
        }
        None => out.push_str(",,,false\n"),
    }
}

/// CSV text of a sweep table; cells that failed have empty numeric fields.
pub fn sweep_csv(table: &SweepTable) -> String {
    let mut out = String::with_capacity(64 * (table.cells.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for c in &table.cells {
        let m = c
            .metrics()
            .map(|m| (m.total_packets, m.total_uav_energy, m.feasible));
        csv_row(&mut out, c.case, c.n_stops, c.dwell, m);
    }
    out
}

/// One-row CSV for a single mission.
pub fn mission_csv(config: &ScenarioConfig, ledger: &MissionLedger) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    csv_row(
        &mut out,
        Case::new(config.placement, config.layout),
        config.n_stops,
        config.dwell_time,
        Some((
            ledger.total_packets,
            ledger.total_uav_energy,
            ledger.feasible,
        )),
    );
    out
}

#[derive(Debug, Serialize)]
struct SensorSummary {
    id: usize,
    cluster_id: usize,
    arc_coord_m: f64,
    harvested_j: f64,
    spent_j: f64,
    residual_j: f64,
    packets: u64,
}

#[derive(Debug, Serialize)]
struct StopSummary {
    index: usize,
    arc_coord_m: f64,
    target: Option<usize>,
    sensors_charged: usize,
    energy_delivered_j: f64,
    packets: u64,
}

#[derive(Debug, Serialize)]
struct MissionSummary {
    case: String,
    n_stops: usize,
    dwell_s: f64,
    total_packets: u64,
    total_uav_energy_j: f64,
    flight_energy_j: f64,
    hover_energy_j: f64,
    wpt_energy_j: f64,
    rx_energy_j: f64,
    uav_battery_j: f64,
    mission_time_s: f64,
    feasible: bool,
    efficiency_pkt_per_kj: Option<f64>,
    stops: Vec<StopSummary>,
    sensors: Vec<SensorSummary>,
}

pub fn mission_summary(config: &ScenarioConfig, ledger: &MissionLedger) -> String {
    let s = MissionSummary {
        case: Case::new(config.placement, config.layout).label(),
        n_stops: config.n_stops,
        dwell_s: config.dwell_time,
        total_packets: ledger.total_packets,
        total_uav_energy_j: ledger.total_uav_energy,
        flight_energy_j: ledger.flight_energy,
        hover_energy_j: ledger.hover_energy,
        wpt_energy_j: ledger.wpt_energy,
        rx_energy_j: ledger.rx_energy,
        uav_battery_j: ledger.uav_battery,
        mission_time_s: ledger.mission_time,
        feasible: ledger.feasible,
        efficiency_pkt_per_kj: hullcharge_core::efficiency(ledger).ok(),
        stops: ledger
            .stops
            .iter()
            .map(|s| StopSummary {
                index: s.stop_index,
                arc_coord_m: s.arc_coord,
                target: s.target,
                sensors_charged: s.deliveries.len(),
                energy_delivered_j: s
                    .deliveries
                    .iter()
                    .map(|d| hullcharge_core::rf::to_joules(d.energy_pj))
                    .sum(),
                packets: s.packets,
            })
            .collect(),
        sensors: ledger
            .sensors
            .iter()
            .map(|s| SensorSummary {
                id: s.id,
                cluster_id: s.cluster_id,
                arc_coord_m: s.arc_coord,
                harvested_j: s.harvested(),
                spent_j: s.spent(),
                residual_j: s.residual(),
                packets: s.packets,
            })
            .collect(),
    };
    to_json(&s)
}

#[derive(Debug, Serialize)]
struct CurvePeak {
    case: String,
    dwell_s: f64,
    feasible_points: usize,
    peak_n_stops: Option<usize>,
    peak_efficiency_pkt_per_kj: Option<f64>,
    interior: Option<bool>,
}

#[derive(Debug, Serialize)]
struct SweepSummary {
    cases: Vec<String>,
    stop_counts: Vec<usize>,
    dwells_s: Vec<f64>,
    cells: usize,
    feasible_cells: usize,
    failed_cells: Vec<String>,
    clustering_gain: Option<GainStats>,
    p1_gain_over_p2: Option<GainStats>,
    equal_coverage_gain: Vec<CoverageGain>,
    peaks: Vec<CurvePeak>,
}

pub fn sweep_summary(config: &ScenarioConfig, table: &SweepTable) -> String {
    let mut peaks = Vec::new();
    for &case in &table.cases {
        for &dwell in &table.dwells {
            let curve = table.curve(case, dwell, true);
            let peak: Option<Peak> = find_peak(&curve).ok();
            peaks.push(CurvePeak {
                case: case.label(),
                dwell_s: dwell,
                feasible_points: curve.len(),
                peak_n_stops: peak.map(|p| curve[p.index].0),
                peak_efficiency_pkt_per_kj: peak.map(|p| curve[p.index].1),
                interior: peak.map(|p| p.interior),
            });
        }
    }
    let s = SweepSummary {
        cases: table.cases.iter().map(Case::label).collect(),
        stop_counts: table.stop_counts.clone(),
        dwells_s: table.dwells.clone(),
        cells: table.cells.len(),
        feasible_cells: table
            .cells
            .iter()
            .filter(|c| c.metrics().is_some_and(|m| m.feasible))
            .count(),
        failed_cells: table
            .cells
            .iter()
            .filter_map(|c| {
                c.outcome
                    .as_ref()
                    .err()
                    .map(|e| format!("{} k={} dwell={}: {e}", c.case.label(), c.n_stops, c.dwell))
            })
            .collect(),
        clustering_gain: clustering_gain(table).ok(),
        p1_gain_over_p2: p1_gain_over_p2(table).ok(),
        equal_coverage_gain: equal_coverage_gain(table, config.n_sensors),
        peaks,
    };
    to_json(&s)
}

/// Provenance record written next to every result set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    /// Command-line settings that shape the run beyond the config file.
    pub arguments: Vec<(String, String)>,
    /// Every resolved parameter, defaults included, once each.
    pub config: Vec<(&'static str, String)>,
    /// SHA-256 of the config file bytes (of nothing when no file was given).
    pub config_file_sha256: String,
    /// SHA-256 of the resolved config in file syntax.
    pub resolved_config_sha256: String,
    pub artifacts: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunManifest {
    pub fn new(
        command: &str,
        arguments: Vec<(String, String)>,
        config: &ScenarioConfig,
        config_bytes: &[u8],
        artifacts: &[&str],
    ) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            arguments,
            config: config_entries(config),
            config_file_sha256: sha256_hex(config_bytes),
            resolved_config_sha256: sha256_hex(render_config(config).as_bytes()),
            artifacts: artifacts.iter().map(|a| a.to_string()).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            tool: &'a str,
            version: &'a str,
            command: &'a str,
            arguments: serde_json::Map<String, serde_json::Value>,
            config: serde_json::Map<String, serde_json::Value>,
            config_file_sha256: &'a str,
            resolved_config_sha256: &'a str,
            artifacts: &'a [String],
        }
        let ordered = |pairs: Vec<(String, String)>| {
            pairs
                .into_iter()
                .map(|(k, v)| (k, serde_json::Value::String(v)))
                .collect()
        };
        to_json(&Out {
            tool: self.tool,
            version: self.version,
            command: &self.command,
            arguments: ordered(self.arguments.clone()),
            config: ordered(
                self.config
                    .iter()
                    .map(|(k, v)| (k.to_string(), v.clone()))
                    .collect(),
            ),
            config_file_sha256: &self.config_file_sha256,
            resolved_config_sha256: &self.resolved_config_sha256,
            artifacts: &self.artifacts,
        })
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

/// I/O failure with the path it concerns.
#[derive(Debug, thiserror::Error)]
#[error("{}: {source}", path.display())]
pub struct OutputError {
    pub path: PathBuf,
    #[source]
    pub source: io::Error,
}

/// Writes `files` (name, contents) below `out_dir`, creating it if needed.
pub fn emit_outputs(out_dir: &Path, files: &[(&str, String)]) -> Result<Vec<PathBuf>, OutputError> {
    fs::create_dir_all(out_dir).map_err(|source| OutputError {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::with_capacity(files.len());
    for (name, contents) in files {
        let path = out_dir.join(name);
        fs::write(&path, contents).map_err(|source| OutputError {
            path: path.clone(),
            source,
        })?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g9_formatting() {
        assert_eq!(fmt_g9(400.0), "400");
        assert_eq!(fmt_g9(286_108.0), "286108");
        assert_eq!(fmt_g9(1.398_063_039_9), "1.39806304");
        assert_eq!(fmt_g9(0.1), "0.1");
        assert_eq!(fmt_g9(20.0), "20");
        assert_eq!(fmt_g9(1.0 / 3.0), "0.333333333");
        assert_eq!(fmt_g9(123_456_789.4), "123456789");
        assert_eq!(fmt_g9(1_234_567_890.0), "1.23456789e+09");
        assert_eq!(fmt_g9(0.000_012_5), "1.25e-05");
        assert_eq!(fmt_g9(0.000_125), "0.000125");
        assert_eq!(fmt_g9(-2.5), "-2.5");
        assert_eq!(fmt_g9(0.0), "0");
        assert_eq!(fmt_g9(999_999_999.6), "1e+09");
        assert_eq!(fmt_g9(9.999_999_999), "10");
    }

    #[test]
    fn csv_efficiency_rederives_exactly() {
        for (p, e) in [(400, 286_108.0), (7, 1.0 / 3.0 * 1e5), (0, 12_345.678_9)] {
            let (es, effs) = csv_numbers(p, e);
            let e2: f64 = es.parse().unwrap();
            assert_eq!(fmt_g9(p as f64 / (e2 / 1000.0)), effs);
        }
    }

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn manifest_lists_every_key_once() {
        let c = ScenarioConfig::default();
        let m = RunManifest::new("simulate", vec![], &c, b"", &[SUMMARY_FILE]);
        let json: serde_json::Value = serde_json::from_str(&m.to_json()).unwrap();
        let cfg = json["config"].as_object().unwrap();
        assert_eq!(cfg.len(), crate::config_file::KEYS.len());
        assert_eq!(cfg["uav_battery"], "286200");
        assert_eq!(json["artifacts"][0], SUMMARY_FILE);
    }
}
