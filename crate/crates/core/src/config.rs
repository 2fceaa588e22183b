//! Scenario parameters and their validation.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::Violation;
use crate::geometry::ellipse_from_perimeter;
use crate::rf::{EnergyCosts, LinkParams};

/// Sensor deployment pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Layout {
    /// S1: sensors equidistant along the whole hull.
    Uniform,
    /// S2: equidistant two-sensor clusters.
    Clustered,
}

/// How the UAV stop-points are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Placement {
    /// P1: stop in front of known sensor (or cluster) positions.
    SensorFacing,
    /// P2: split the path into equal-length sectors.
    EqualArc,
}

/// Whether the power-transfer transmitter draws from the 170.3 W flight
/// budget or on top of it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum WptDrawMode {
    IncludedInFlightPower,
    Additional,
}

impl Layout {
    pub const ALL: [Layout; 2] = [Layout::Uniform, Layout::Clustered];

    pub fn as_str(self) -> &'static str {
        match self {
            Layout::Uniform => "s1",
            Layout::Clustered => "s2",
        }
    }

    /// Number of stop targets a layout of `n_sensors` offers.
    pub fn target_count(self, n_sensors: usize) -> usize {
        match self {
            Layout::Uniform => n_sensors,
            Layout::Clustered => n_sensors / 2,
        }
    }
}

impl Placement {
    pub const ALL: [Placement; 2] = [Placement::SensorFacing, Placement::EqualArc];

    pub fn as_str(self) -> &'static str {
        match self {
            Placement::SensorFacing => "p1",
            Placement::EqualArc => "p2",
        }
    }
}

impl WptDrawMode {
    pub fn as_str(self) -> &'static str {
        match self {
            WptDrawMode::IncludedInFlightPower => "included",
            WptDrawMode::Additional => "additional",
        }
    }
}

macro_rules! str_enum {
    ($ty:ty, $what:literal, [$($s:literal => $v:expr),+ $(,)?]) => {
        impl FromStr for $ty {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                match s.trim().to_ascii_lowercase().as_str() {
                    $($s => Ok($v),)+
                    other => Err(format!(concat!("unknown ", $what, " '{}'"), other)),
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

str_enum!(Layout, "layout", ["s1" => Layout::Uniform, "s2" => Layout::Clustered]);
str_enum!(Placement, "placement", ["p1" => Placement::SensorFacing, "p2" => Placement::EqualArc]);
str_enum!(WptDrawMode, "wpt draw mode", [
    "included" => WptDrawMode::IncludedInFlightPower,
    "additional" => WptDrawMode::Additional,
]);

/// Every knob of one mission. Units are SI throughout.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub link: LinkParams,
    pub costs: EnergyCosts,
    pub n_sensors: usize,
    pub layout: Layout,
    pub placement: Placement,
    pub n_stops: usize,
    /// Total hover time per stop, s.
    pub dwell_time: f64,
    /// Share of the dwell spent on power transfer; the rest collects data.
    pub phase_split: f64,
    pub uav_flight_power: f64,
    /// Battery capacity, J.
    pub uav_battery: f64,
    pub cruise_speed: f64,
    pub path_perimeter: f64,
    /// Distance between the flight path and the hull, m.
    pub standoff: f64,
    /// Semi-major over semi-minor axis of the flight path.
    pub aspect_ratio: f64,
    /// Arc distance between the two members of a cluster, m.
    pub cluster_spacing: f64,
    /// Arc offset of equal-arc stops relative to the sensor layout, m.
    pub phase: f64,
    pub wpt_draw_mode: WptDrawMode,
}

pub const WH_TO_J: f64 = 3600.0;

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            link: LinkParams::default(),
            costs: EnergyCosts::default(),
            n_sensors: 100,
            layout: Layout::Uniform,
            placement: Placement::SensorFacing,
            n_stops: 100,
            dwell_time: 20.0,
            phase_split: 0.5,
            uav_flight_power: 170.3,
            uav_battery: 79.5 * WH_TO_J,
            cruise_speed: 6.25,
            path_perimeter: 500.0,
            standoff: 1.0,
            aspect_ratio: 5.0,
            cluster_spacing: 0.01,
            phase: 0.0,
            wpt_draw_mode: WptDrawMode::IncludedInFlightPower,
        }
    }
}

/// Checks every invariant of `config`, collecting all violations.
pub fn validate_config(config: &ScenarioConfig) -> Result<(), Vec<Violation>> {
    let mut v = Vec::new();
    let mut check = |ok: bool, field: &'static str, msg: String| {
        if !ok {
            v.push(Violation::new(field, msg));
        }
    };
    let pos = |x: f64| x.is_finite() && x > 0.0;
    let nonneg = |x: f64| x.is_finite() && x >= 0.0;

    let l = &config.link;
    check(
        pos(l.frequency),
        "frequency",
        format!("must be > 0, got {}", l.frequency),
    );
    check(
        nonneg(l.tx_power),
        "tx_power",
        format!("must be >= 0, got {}", l.tx_power),
    );
    check(
        l.tx_gain.is_finite(),
        "tx_gain",
        format!("must be finite, got {}", l.tx_gain),
    );
    check(
        l.rx_gain.is_finite(),
        "rx_gain",
        format!("must be finite, got {}", l.rx_gain),
    );
    check(
        l.rf_dc_efficiency > 0.0 && l.rf_dc_efficiency <= 1.0,
        "rf_dc_efficiency",
        format!("must lie in (0, 1], got {}", l.rf_dc_efficiency),
    );
    check(
        nonneg(l.harvest_threshold),
        "harvest_threshold",
        format!("must be >= 0, got {}", l.harvest_threshold),
    );
    check(
        nonneg(l.angle_exponent),
        "angle_exponent",
        format!("must be >= 0, got {}", l.angle_exponent),
    );

    let c = &config.costs;
    check(
        nonneg(c.e_measurement),
        "e_measurement",
        format!("must be >= 0, got {}", c.e_measurement),
    );
    check(
        nonneg(c.e_tx_packet),
        "e_tx_packet",
        format!("must be >= 0, got {}", c.e_tx_packet),
    );
    check(
        nonneg(c.e_rx_packet),
        "e_rx_packet",
        format!("must be >= 0, got {}", c.e_rx_packet),
    );
    check(
        !(nonneg(c.e_measurement) && nonneg(c.e_tx_packet)) || c.per_packet() >= 1e-12,
        "e_tx_packet",
        "measurement plus packet energy must be > 0".into(),
    );

    check(
        config.n_sensors >= 1,
        "n_sensors",
        "need at least one sensor".into(),
    );
    check(
        config.layout != Layout::Clustered || config.n_sensors.is_multiple_of(2),
        "n_sensors",
        format!(
            "clustered layout needs an even sensor count, got {}",
            config.n_sensors
        ),
    );
    check(
        pos(config.dwell_time),
        "dwell_time",
        format!("must be > 0, got {}", config.dwell_time),
    );
    check(
        config.phase_split > 0.0 && config.phase_split < 1.0,
        "phase_split",
        format!("must lie in (0, 1), got {}", config.phase_split),
    );
    check(
        pos(config.uav_flight_power),
        "uav_flight_power",
        format!("must be > 0, got {}", config.uav_flight_power),
    );
    check(
        nonneg(config.uav_battery),
        "uav_battery",
        format!("must be >= 0, got {}", config.uav_battery),
    );
    check(
        pos(config.cruise_speed),
        "cruise_speed",
        format!("must be > 0, got {}", config.cruise_speed),
    );
    check(
        pos(config.path_perimeter),
        "path_perimeter",
        format!("must be > 0, got {}", config.path_perimeter),
    );
    check(
        pos(config.standoff),
        "standoff",
        format!("must be > 0, got {}", config.standoff),
    );
    check(
        config.aspect_ratio.is_finite() && config.aspect_ratio >= 1.0,
        "aspect_ratio",
        format!("must be >= 1, got {}", config.aspect_ratio),
    );
    check(
        nonneg(config.cluster_spacing),
        "cluster_spacing",
        format!("must be >= 0, got {}", config.cluster_spacing),
    );
    check(
        config.phase.is_finite()
            && config.phase >= 0.0
            && (!pos(config.path_perimeter) || config.phase < config.path_perimeter),
        "phase",
        format!("must lie in [0, path_perimeter), got {}", config.phase),
    );

    if config.layout == Layout::Clustered
        && config.n_sensors >= 2
        && pos(config.path_perimeter)
        && nonneg(config.cluster_spacing)
    {
        let pitch = config.path_perimeter / (config.n_sensors / 2) as f64;
        check(
            config.cluster_spacing < pitch,
            "cluster_spacing",
            format!("must be smaller than the cluster pitch {pitch}"),
        );
    }

    // The hull is the inward parallel curve of the path; it stays regular
    // only while the standoff is below the smallest radius of curvature.
    if pos(config.path_perimeter) && config.aspect_ratio >= 1.0 && config.aspect_ratio.is_finite() {
        if let Ok(path) = ellipse_from_perimeter(config.aspect_ratio, config.path_perimeter, 1e-9) {
            let r = path.min_radius_of_curvature();
            check(
                !pos(config.standoff) || config.standoff < r,
                "standoff",
                format!("must be below the path's minimum radius of curvature {r:.6} m"),
            );
        }
    }

    if v.is_empty() {
        Ok(())
    } else {
        Err(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        assert_eq!(validate_config(&ScenarioConfig::default()), Ok(()));
        assert_eq!(ScenarioConfig::default().uav_battery, 286_200.0);
    }

    #[test]
    fn zero_phase_split_is_reported() {
        let cfg = ScenarioConfig {
            phase_split: 0.0,
            ..Default::default()
        };
        let errs = validate_config(&cfg).unwrap_err();
        assert!(errs.iter().any(|e| e.field == "phase_split"));
    }

    #[test]
    fn odd_clustered_is_reported() {
        let cfg = ScenarioConfig {
            layout: Layout::Clustered,
            n_sensors: 99,
            ..Default::default()
        };
        let errs = validate_config(&cfg).unwrap_err();
        assert!(errs.iter().any(|e| e.field == "n_sensors"));
    }

    #[test]
    fn all_violations_are_collected() {
        let cfg = ScenarioConfig {
            phase_split: 1.5,
            dwell_time: -1.0,
            cruise_speed: 0.0,
            standoff: 50.0,
            ..Default::default()
        };
        let fields: Vec<_> = validate_config(&cfg)
            .unwrap_err()
            .into_iter()
            .map(|e| e.field)
            .collect();
        for f in ["phase_split", "dwell_time", "cruise_speed", "standoff"] {
            assert!(fields.contains(&f), "missing {f} in {fields:?}");
        }
    }

    #[test]
    fn enum_round_trip() {
        for l in Layout::ALL {
            assert_eq!(l.as_str().parse::<Layout>().unwrap(), l);
        }
        for p in Placement::ALL {
            assert_eq!(p.to_string().parse::<Placement>().unwrap(), p);
        }
        assert_eq!(
            "Additional".parse::<WptDrawMode>().unwrap(),
            WptDrawMode::Additional
        );
        assert!("p3".parse::<Placement>().is_err());
    }
}
