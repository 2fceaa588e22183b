//! Subcommands and their exit codes.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use hullcharge_core::{
    calibrate_speed, calibrate_tx_power, endurance, max_stops, run_mission, sweep, sweep_parallel,
    validate_config, Case, Error as ModelError, ScenarioConfig,
};

use crate::config_file::{read_config, ConfigError};
use crate::report::{
    emit_outputs, mission_csv, mission_summary, sweep_csv, sweep_summary, RunManifest, CSV_FILE,
    MANIFEST_FILE, SUMMARY_FILE,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_OUTPUT: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "hullcharge",
    version,
    about = "UAV hull-sensor charging and data collection model"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one mission and write its ledger summary.
    Simulate(SimulateArgs),
    /// Run a grid of missions and write a CSV table.
    Sweep(SweepArgs),
    /// Print airborne time and stop budgets.
    Endurance(EnduranceArgs),
    /// Solve for transmit power and cruise speed.
    Calibrate(CalibrateArgs),
}

#[derive(Debug, Args)]
pub struct ConfigArg {
    /// Scenario file (`key = value` lines); defaults apply when omitted.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    #[arg(long, value_name = "N")]
    pub stops: Option<usize>,
    #[arg(long, value_name = "SECONDS")]
    pub dwell: Option<f64>,
    /// p1s1, p1s2, p2s1 or p2s2.
    #[arg(long)]
    pub case: Option<Case>,
    /// Exit with status 3 if the mission exceeds the battery.
    #[arg(long)]
    pub require_feasible: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    /// Inclusive stop-count range.
    #[arg(long, value_name = "A:B", default_value = "4:100")]
    pub stops_range: String,
    /// Comma-separated dwell times, s.
    #[arg(long, value_name = "LIST", default_value = "20,70")]
    pub dwells: String,
    /// Cases to run (repeatable or comma-separated); all four by default.
    #[arg(long, value_delimiter = ',')]
    pub case: Vec<Case>,
    /// Evaluate cells on all cores. Output is identical either way.
    #[arg(long)]
    pub parallel: bool,
    /// Exit with status 3 if any cell exceeds the battery.
    #[arg(long)]
    pub require_feasible: bool,
}

#[derive(Debug, Args)]
pub struct EnduranceArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    /// Dwell times to report stop budgets for.
    #[arg(long, value_name = "LIST", default_value = "20,70")]
    pub dwells: String,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    /// Packets a boresight sensor must afford per visit.
    #[arg(long, value_name = "N", default_value_t = 5)]
    pub target: u64,
    /// Stop count the cruise speed must allow.
    #[arg(long, value_name = "N", default_value_t = 80)]
    pub stops: usize,
    /// Dwell per stop, s; the config's dwell time when omitted.
    #[arg(long, value_name = "SECONDS")]
    pub dwell: Option<f64>,
}

/// Failure of a subcommand, carrying its exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("cannot write output: {0}")]
    Output(#[from] crate::report::OutputError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => EXIT_CONFIG,
            CliError::Infeasible(_) => EXIT_INFEASIBLE,
            CliError::Output(_) => EXIT_OUTPUT,
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::NoSolution(_) => CliError::Infeasible(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

pub fn parse_stops_range(s: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Usage(format!("--stops-range must look like A:B, got '{s}'"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || a > b {
        return Err(CliError::Usage(format!(
            "--stops-range needs 1 <= A <= B, got {a}:{b}"
        )));
    }
    Ok((a..=b).collect())
}

pub fn parse_dwells(s: &str) -> Result<Vec<f64>, CliError> {
    let dwells = s
        .split(',')
        .map(|d| d.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| {
            CliError::Usage(format!(
                "--dwells must be a comma-separated list, got '{s}'"
            ))
        })?;
    if dwells.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
        return Err(CliError::Usage(format!(
            "dwell times must be > 0, got '{s}'"
        )));
    }
    Ok(dwells)
}

fn check(config: &ScenarioConfig, what: &str) -> Result<(), CliError> {
    validate_config(config).map_err(|vs| {
        let list: Vec<String> = vs.iter().map(|v| v.to_string()).collect();
        CliError::Usage(format!("{what}: {}", list.join("; ")))
    })
}

fn load(arg: &ConfigArg) -> Result<(ScenarioConfig, Vec<u8>), CliError> {
    Ok(read_config(arg.config.as_deref())?)
}

fn write_run(
    out: &Path,
    files: Vec<(&str, String)>,
    manifest: RunManifest,
) -> Result<(), CliError> {
    let mut files = files;
    files.push((MANIFEST_FILE, manifest.to_json()));
    emit_outputs(out, &files)?;
    Ok(())
}

pub fn cmd_simulate(args: &SimulateArgs, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let (mut config, bytes) = load(&args.config)?;
    let mut arguments = Vec::new();
    if let Some(case) = args.case {
        config.placement = case.placement;
        config.layout = case.layout;
        arguments.push(("case".to_string(), case.label()));
    }
    if let Some(k) = args.stops {
        config.n_stops = k;
        arguments.push(("stops".to_string(), k.to_string()));
    }
    if let Some(d) = args.dwell {
        config.dwell_time = d;
        arguments.push(("dwell".to_string(), d.to_string()));
    }
    check(&config, "invalid command-line override")?;
    let ledger = run_mission(&config)?;

    let files = vec![
        (CSV_FILE, mission_csv(&config, &ledger)),
        (SUMMARY_FILE, mission_summary(&config, &ledger)),
    ];
    let manifest = RunManifest::new(
        "simulate",
        arguments,
        &config,
        &bytes,
        &[CSV_FILE, SUMMARY_FILE, MANIFEST_FILE],
    );
    write_run(&args.out, files, manifest)?;

    let eff = hullcharge_core::efficiency(&ledger)?;
    let _ = writeln!(
        stdout,
        "{} stops={} dwell={} s packets={} uav_energy={:.1} J efficiency={:.3} pkt/kJ feasible={}",
        Case::new(config.placement, config.layout).label(),
        config.n_stops,
        config.dwell_time,
        ledger.total_packets,
        ledger.total_uav_energy,
        eff,
        ledger.feasible
    );
    if args.require_feasible && !ledger.feasible {
        return Err(CliError::Infeasible(format!(
            "mission needs {:.1} J, battery holds {:.1} J",
            ledger.total_uav_energy, ledger.uav_battery
        )));
    }
    Ok(EXIT_OK)
}

pub fn cmd_sweep(args: &SweepArgs, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let (config, bytes) = load(&args.config)?;
    let stop_counts = parse_stops_range(&args.stops_range)?;
    let dwells = parse_dwells(&args.dwells)?;
    let cases = if args.case.is_empty() {
        Case::all()
    } else {
        args.case.clone()
    };
    let table = if args.parallel {
        sweep_parallel(&config, &stop_counts, &dwells, &cases)?
    } else {
        sweep(&config, &stop_counts, &dwells, &cases)?
    };

    let arguments = vec![
        ("stops_range".to_string(), args.stops_range.clone()),
        ("dwells".to_string(), args.dwells.clone()),
        (
            "cases".to_string(),
            cases.iter().map(Case::label).collect::<Vec<_>>().join(","),
        ),
    ];
    let files = vec![
        (CSV_FILE, sweep_csv(&table)),
        (SUMMARY_FILE, sweep_summary(&config, &table)),
    ];
    let manifest = RunManifest::new(
        "sweep",
        arguments,
        &config,
        &bytes,
        &[CSV_FILE, SUMMARY_FILE, MANIFEST_FILE],
    );
    write_run(&args.out, files, manifest)?;

    let feasible = table
        .cells
        .iter()
        .filter(|c| c.metrics().is_some_and(|m| m.feasible))
        .count();
    let _ = writeln!(
        stdout,
        "{} cells, {} feasible, written to {}",
        table.cells.len(),
        feasible,
        args.out.display()
    );
    if args.require_feasible && feasible < table.cells.len() {
        return Err(CliError::Infeasible(format!(
            "{} of {} cells are infeasible",
            table.cells.len() - feasible,
            table.cells.len()
        )));
    }
    Ok(EXIT_OK)
}

pub fn cmd_endurance(args: &EnduranceArgs, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let (config, _) = load(&args.config)?;
    let dwells = parse_dwells(&args.dwells)?;
    let t = endurance(&config);
    let _ = writeln!(stdout, "endurance: {:.2} s / {:.2} min", t, t / 60.0);
    for d in dwells {
        let k = max_stops(&config, d)?;
        let _ = writeln!(stdout, "max stops at {d} s dwell: {k}");
    }
    Ok(EXIT_OK)
}

pub fn cmd_calibrate(args: &CalibrateArgs, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let (mut config, _) = load(&args.config)?;
    if let Some(d) = args.dwell {
        config.dwell_time = d;
        check(&config, "invalid --dwell")?;
    }
    let tx = calibrate_tx_power(args.target, &config)?;
    let _ = writeln!(
        stdout,
        "tx power for {} packets per visit at {} s dwell: {:.4} W",
        args.target, config.dwell_time, tx
    );
    let cal = calibrate_speed(args.stops, config.dwell_time, &config)?;
    let _ = writeln!(
        stdout,
        "cruise speed for {} stops at {} s dwell: {:.2} m/s (band {:.4} to {:.4} m/s)",
        args.stops, config.dwell_time, cal.speed, cal.min_speed, cal.max_speed
    );
    Ok(EXIT_OK)
}

/// Runs a parsed command line; errors go to `stderr`.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Simulate(a) => cmd_simulate(a, stdout),
        Command::Sweep(a) => cmd_sweep(a, stdout),
        Command::Endurance(a) => cmd_endurance(a, stdout),
        Command::Calibrate(a) => cmd_calibrate(a, stdout),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stop_ranges() {
        assert_eq!(parse_stops_range("4:100").unwrap().len(), 97);
        assert_eq!(parse_stops_range(" 3 : 3 ").unwrap(), [3]);
        for bad in ["4-100", "0:5", "9:3", "a:b", ""] {
            assert!(parse_stops_range(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn dwell_lists() {
        assert_eq!(parse_dwells("20,70").unwrap(), [20.0, 70.0]);
        assert_eq!(parse_dwells("12.5").unwrap(), [12.5]);
        for bad in ["", "20,", "-1", "x", "0"] {
            assert!(parse_dwells(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn endurance_text() {
        let cli = Cli::parse_from(["hullcharge", "endurance"]);
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(&cli, &mut out, &mut err), EXIT_OK);
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("1680.56 s / 28.01 min"), "{text}");
        assert!(text.contains("max stops at 20 s dwell: 80"));
        assert!(text.contains("max stops at 70 s dwell: 22"));
    }

    #[test]
    fn calibrate_text() {
        let cli = Cli::parse_from(["hullcharge", "calibrate"]);
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(&cli, &mut out, &mut err), EXIT_OK);
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("6.25 m/s"), "{text}");

        let cli = Cli::parse_from(["hullcharge", "calibrate", "--stops", "1000"]);
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(&cli, &mut out, &mut err), EXIT_INFEASIBLE);
    }

    #[test]
    fn error_exit_codes() {
        assert_eq!(CliError::Usage(String::new()).exit_code(), EXIT_CONFIG);
        assert_eq!(
            CliError::Infeasible(String::new()).exit_code(),
            EXIT_INFEASIBLE
        );
    }
}
