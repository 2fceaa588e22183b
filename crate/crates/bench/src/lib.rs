//! Shared inputs for the criterion benches.

use hullcharge_core::ScenarioConfig;

/// Stop counts of the default sweep grid.
pub fn default_stop_counts() -> Vec<usize> {
    (4..=100).collect()
}

pub const DEFAULT_DWELLS: [f64; 2] = [20.0, 70.0];

pub fn base_config() -> ScenarioConfig {
    ScenarioConfig::default()
}
