//! Grid sweeps over placement, layout, stop count and dwell time, plus the
//! efficiency metrics derived from them.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Layout, Placement, ScenarioConfig};
use crate::error::{invalid, Error, Result};
use crate::mission::{run_mission, MissionLedger};

/// Packets delivered per kilojoule of UAV energy.
pub fn efficiency(ledger: &MissionLedger) -> Result<f64> {
    efficiency_of(ledger.total_packets, ledger.total_uav_energy)
}

pub fn efficiency_of(packets: u64, uav_energy: f64) -> Result<f64> {
    if !(uav_energy.is_finite() && uav_energy > 0.0) {
        return Err(invalid(format!("uav energy must be > 0, got {uav_energy}")));
    }
    Ok(packets as f64 / (uav_energy / 1000.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Case {
    pub placement: Placement,
    pub layout: Layout,
}

impl Case {
    pub const fn new(placement: Placement, layout: Layout) -> Self {
        Self { placement, layout }
    }

    /// All four placement × layout combinations, P1 first.
    pub fn all() -> Vec<Case> {
        Placement::ALL
            .into_iter()
            .flat_map(|p| Layout::ALL.into_iter().map(move |l| Case::new(p, l)))
            .collect()
    }

    pub fn label(&self) -> String {
        format!("{}{}", self.placement, self.layout)
    }
}

impl std::str::FromStr for Case {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim().to_ascii_lowercase();
        if s.len() != 4 {
            return Err(format!("case must look like p1s1, got '{s}'"));
        }
        Ok(Case::new(s[..2].parse()?, s[2..].parse()?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellMetrics {
    pub total_packets: u64,
    pub total_uav_energy: f64,
    /// Packets per kJ.
    pub efficiency: f64,
    pub feasible: bool,
}

impl CellMetrics {
    pub fn from_ledger(ledger: &MissionLedger) -> Result<Self> {
        Ok(Self {
            total_packets: ledger.total_packets,
            total_uav_energy: ledger.total_uav_energy,
            efficiency: efficiency(ledger)?,
            feasible: ledger.feasible,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCell {
    pub case: Case,
    pub n_stops: usize,
    pub dwell: f64,
    /// Metrics, or the error message of a cell whose config was rejected.
    pub outcome: std::result::Result<CellMetrics, String>,
}

impl SweepCell {
    pub fn metrics(&self) -> Option<&CellMetrics> {
        self.outcome.as_ref().ok()
    }

    fn feasible_metrics(&self) -> Option<&CellMetrics> {
        self.metrics().filter(|m| m.feasible)
    }
}

/// Cells are ordered case-major, then dwell, then stop count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub cases: Vec<Case>,
    pub stop_counts: Vec<usize>,
    pub dwells: Vec<f64>,
    pub cells: Vec<SweepCell>,
}

impl SweepTable {
    pub fn cell(&self, case: Case, n_stops: usize, dwell: f64) -> Option<&SweepCell> {
        self.cells
            .iter()
            .find(|c| c.case == case && c.n_stops == n_stops && c.dwell == dwell)
    }

    /// `(n_stops, efficiency)` for one case and dwell, in stop-count order.
    pub fn curve(&self, case: Case, dwell: f64, feasible_only: bool) -> Vec<(usize, f64)> {
        self.cells
            .iter()
            .filter(|c| c.case == case && c.dwell == dwell)
            .filter_map(|c| {
                let m = c.metrics()?;
                (!feasible_only || m.feasible).then_some((c.n_stops, m.efficiency))
            })
            .collect()
    }

    /// Appends the cells of another table, e.g. one run at a different
    /// equal-arc phase.
    pub fn extend(&mut self, other: SweepTable) {
        for c in other.cases {
            if !self.cases.contains(&c) {
                self.cases.push(c);
            }
        }
        for k in other.stop_counts {
            if !self.stop_counts.contains(&k) {
                self.stop_counts.push(k);
            }
        }
        for d in other.dwells {
            if !self.dwells.contains(&d) {
                self.dwells.push(d);
            }
        }
        self.cells.extend(other.cells);
    }
}

/// Config of one sweep cell.
pub fn cell_config(
    base: &ScenarioConfig,
    case: Case,
    n_stops: usize,
    dwell: f64,
) -> ScenarioConfig {
    ScenarioConfig {
        placement: case.placement,
        layout: case.layout,
        n_stops,
        dwell_time: dwell,
        ..base.clone()
    }
}

pub fn run_cell(base: &ScenarioConfig, case: Case, n_stops: usize, dwell: f64) -> SweepCell {
    let config = cell_config(base, case, n_stops, dwell);
    let outcome = run_mission(&config)
        .and_then(|l| CellMetrics::from_ledger(&l))
        .map_err(|e| e.to_string());
    SweepCell {
        case,
        n_stops,
        dwell,
        outcome,
    }
}

fn coordinates(
    stop_counts: &[usize],
    dwells: &[f64],
    cases: &[Case],
) -> Result<Vec<(Case, f64, usize)>> {
    if stop_counts.is_empty() || dwells.is_empty() || cases.is_empty() {
        return Err(invalid("sweep axes must be non-empty"));
    }
    Ok(cases
        .iter()
        .flat_map(|&c| {
            dwells
                .iter()
                .flat_map(move |&d| stop_counts.iter().map(move |&k| (c, d, k)))
        })
        .collect())
}

fn assemble(
    stop_counts: &[usize],
    dwells: &[f64],
    cases: &[Case],
    cells: Vec<SweepCell>,
) -> SweepTable {
    SweepTable {
        cases: cases.to_vec(),
        stop_counts: stop_counts.to_vec(),
        dwells: dwells.to_vec(),
        cells,
    }
}

pub fn sweep(
    base: &ScenarioConfig,
    stop_counts: &[usize],
    dwells: &[f64],
    cases: &[Case],
) -> Result<SweepTable> {
    let cells = coordinates(stop_counts, dwells, cases)?
        .into_iter()
        .map(|(c, d, k)| run_cell(base, c, k, d))
        .collect();
    Ok(assemble(stop_counts, dwells, cases, cells))
}

/// Same table as [`sweep`], with cells evaluated on the rayon pool.
pub fn sweep_parallel(
    base: &ScenarioConfig,
    stop_counts: &[usize],
    dwells: &[f64],
    cases: &[Case],
) -> Result<SweepTable> {
    let cells = coordinates(stop_counts, dwells, cases)?
        .into_par_iter()
        .map(|(c, d, k)| run_cell(base, c, k, d))
        .collect();
    Ok(assemble(stop_counts, dwells, cases, cells))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GainStats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub pairs: usize,
}

impl GainStats {
    fn from_ratios(ratios: &[f64], what: &str) -> Result<Self> {
        if ratios.is_empty() {
            return Err(Error::EmptyResult(format!(
                "no matched feasible cells for {what}"
            )));
        }
        let mut sum = 0.0;
        let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
        for &r in ratios {
            sum += r;
            min = min.min(r);
            max = max.max(r);
        }
        Ok(Self {
            mean: sum / ratios.len() as f64,
            min,
            max,
            pairs: ratios.len(),
        })
    }

    pub fn contains(&self, value: f64) -> bool {
        self.min <= value && value <= self.max
    }
}

type CellKey = (Case, usize, u64);

fn index(table: &SweepTable) -> HashMap<CellKey, &SweepCell> {
    table
        .cells
        .iter()
        .map(|c| ((c.case, c.n_stops, c.dwell.to_bits()), c))
        .collect()
}

/// Ratios `efficiency(numer) / efficiency(denom)` over every pair of
/// feasible cells with equal stop count and dwell, where `partner` maps the
/// denominator case to the numerator case. Cells with zero denominator
/// efficiency have no defined ratio and are skipped.
fn matched_ratios(table: &SweepTable, denom: impl Fn(Case) -> Option<Case>) -> Vec<f64> {
    let idx = index(table);
    table
        .cells
        .iter()
        .filter_map(|d| {
            let partner = denom(d.case)?;
            let dm = d.feasible_metrics().filter(|m| m.efficiency > 0.0)?;
            let n = idx.get(&(partner, d.n_stops, d.dwell.to_bits()))?;
            let nm = n.feasible_metrics()?;
            Some(nm.efficiency / dm.efficiency)
        })
        .collect()
}

/// Efficiency of clustered over uniform layouts on matched cells.
pub fn clustering_gain(table: &SweepTable) -> Result<GainStats> {
    let ratios = matched_ratios(table, |c| {
        (c.layout == Layout::Uniform).then_some(Case::new(c.placement, Layout::Clustered))
    });
    GainStats::from_ratios(&ratios, "clustering gain")
}

/// Efficiency of sensor-facing over equal-arc placement on matched cells.
pub fn p1_gain_over_p2(table: &SweepTable) -> Result<GainStats> {
    let ratios = matched_ratios(table, |c| {
        (c.placement == Placement::EqualArc).then_some(Case::new(Placement::SensorFacing, c.layout))
    });
    GainStats::from_ratios(&ratios, "sensor-facing gain")
}

/// Clustered-over-uniform ratio at equal coverage: one stop per cluster
/// against one stop per sensor, regardless of feasibility.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverageGain {
    pub placement: Placement,
    pub dwell: f64,
    pub clustered_stops: usize,
    pub uniform_stops: usize,
    pub ratio: f64,
}

pub fn equal_coverage_gain(table: &SweepTable, n_sensors: usize) -> Vec<CoverageGain> {
    let idx = index(table);
    let (k2, k1) = (n_sensors / 2, n_sensors);
    let mut out = Vec::new();
    for &placement in &Placement::ALL {
        for &dwell in &table.dwells {
            let get = |layout, k| {
                idx.get(&(Case::new(placement, layout), k, dwell.to_bits()))
                    .and_then(|c| c.metrics())
            };
            if let (Some(s2), Some(s1)) = (get(Layout::Clustered, k2), get(Layout::Uniform, k1)) {
                if s1.efficiency > 0.0 {
                    out.push(CoverageGain {
                        placement,
                        dwell,
                        clustered_stops: k2,
                        uniform_stops: k1,
                        ratio: s2.efficiency / s1.efficiency,
                    });
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Peak {
    pub index: usize,
    /// The maximum is neither the first nor the last point.
    pub interior: bool,
}

/// Location of the maximum efficiency; ties go to the smaller stop count.
pub fn find_peak(curve: &[(usize, f64)]) -> Result<Peak> {
    if curve.len() < 3 {
        return Err(invalid(format!(
            "need at least 3 points, got {}",
            curve.len()
        )));
    }
    let mut best = 0;
    for (i, &(k, e)) in curve.iter().enumerate().skip(1) {
        let (bk, be) = curve[best];
        if e > be || (e == be && k < bk) {
            best = i;
        }
    }
    Ok(Peak {
        index: best,
        interior: best != 0 && best != curve.len() - 1,
    })
}
