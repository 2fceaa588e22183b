//! Deterministic model of a UAV that circles a vessel on an elliptical path,
//! wirelessly charges battery-less hull sensors from hover stop-points, and
//! collects the packets they can afford to send.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: flight-path ellipse, arc coordinates, link geometry.
//! * [`rf`]: free-space link budget, RF-DC harvesting, packet energy.
//! * [`layout`]: sensor deployments and stop-point plans.
//! * [`mission`]: one mission's energy and packet ledger.
//! * [`sweep`] and [`calibrate`]: grid sweeps, efficiency metrics, and the
//!   transmit-power and speed solvers.

pub mod calibrate;
pub mod config;
pub mod error;
pub mod geometry;
pub mod layout;
pub mod mission;
pub mod rf;
pub mod sweep;

pub use calibrate::{calibrate_speed, calibrate_tx_power, SpeedCalibration};
pub use config::{validate_config, Layout, Placement, ScenarioConfig, WptDrawMode};
pub use error::{Error, Result, Violation};
pub use geometry::{Ellipse, SurfacePose, Vec2};
pub use layout::{SensorPose, Stop, StopPlan};
pub use mission::{endurance, max_stops, run_mission, MissionLedger};
pub use rf::{EnergyCosts, LinkParams};
pub use sweep::{
    clustering_gain, efficiency, find_peak, p1_gain_over_p2, sweep, sweep_parallel, Case,
    CellMetrics, GainStats, SweepCell, SweepTable,
};
