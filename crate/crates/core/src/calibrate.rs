//! Solvers for the two model inputs the scenario leaves open: power-transfer
//! transmit power and cruise speed.

use serde::Serialize;

use crate::config::{ScenarioConfig, WptDrawMode};
use crate::error::{invalid, Error, Result};
use crate::mission::{endurance, max_stops};
use crate::rf::{harvest_rate, packet_cost_picojoules, received_power, to_picojoules, LinkParams};

/// Speeds returned by [`calibrate_speed`] are snapped to this grid, m/s.
pub const SPEED_GRID: f64 = 0.05;

/// Smallest transmit power for which a boresight sensor at the standoff
/// stores enough energy in one charge phase for `target_packets` packets.
pub fn calibrate_tx_power(target_packets: u64, config: &ScenarioConfig) -> Result<f64> {
    if target_packets == 0 {
        return Err(invalid("target packet count must be >= 1"));
    }
    let unit = packet_cost_picojoules(&config.costs)?;
    let charge_time = config.dwell_time * config.phase_split;
    if !(charge_time.is_finite() && charge_time > 0.0) {
        return Err(invalid(format!(
            "charge phase must be > 0 s, got {charge_time}"
        )));
    }
    let per_watt = received_power(
        &LinkParams {
            tx_power: 1.0,
            ..config.link
        },
        config.standoff,
        0.0,
    )?;
    if per_watt <= 0.0 {
        return Err(Error::NoSolution("no power reaches the sensor".into()));
    }

    let needed = target_packets as f64 * config.costs.per_packet();
    let mut tx = needed / (config.link.rf_dc_efficiency * per_watt * charge_time);
    tx = tx.max(config.link.harvest_threshold / per_watt);

    let packets_at = |tx: f64| -> Result<u64> {
        let link = LinkParams {
            tx_power: tx,
            ..config.link
        };
        let p = received_power(&link, config.standoff, 0.0)?;
        Ok(to_picojoules(harvest_rate(&link, p) * charge_time) / unit)
    };
    // the closed form can land a rounding step short
    for _ in 0..64 {
        if packets_at(tx)? >= target_packets {
            return Ok(tx);
        }
        tx = tx.next_up();
    }
    Err(Error::NoSolution(format!(
        "transmit power for {target_packets} packets"
    )))
}

/// Speed range over which exactly `stop_target` stops of `dwell` seconds fit
/// in the endurance, and the slowest grid speed inside it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpeedCalibration {
    pub speed: f64,
    /// Inclusive lower end of the band.
    pub min_speed: f64,
    /// Exclusive upper end of the band; infinite if unbounded.
    pub max_speed: f64,
}

impl SpeedCalibration {
    pub fn contains(&self, speed: f64) -> bool {
        self.min_speed <= speed && speed < self.max_speed
    }
}

pub fn calibrate_speed(
    stop_target: usize,
    dwell: f64,
    config: &ScenarioConfig,
) -> Result<SpeedCalibration> {
    if !(dwell.is_finite() && dwell > 0.0) {
        return Err(invalid(format!("dwell must be > 0, got {dwell}")));
    }
    let per_stop = match config.wpt_draw_mode {
        WptDrawMode::IncludedInFlightPower => dwell,
        WptDrawMode::Additional => {
            dwell + config.link.tx_power * dwell * config.phase_split / config.uav_flight_power
        }
    };
    let budget = endurance(config);
    let loop_max = budget - stop_target as f64 * per_stop;
    if loop_max.is_nan() || loop_max <= 0.0 {
        return Err(Error::NoSolution(format!(
            "{stop_target} stops of {dwell} s exceed the {budget:.2} s endurance"
        )));
    }
    let loop_min = budget - (stop_target + 1) as f64 * per_stop;
    let min_speed = config.path_perimeter / loop_max;
    let max_speed = if loop_min > 0.0 {
        config.path_perimeter / loop_min
    } else {
        f64::INFINITY
    };

    let fits = |speed: f64| -> Result<bool> {
        let c = ScenarioConfig {
            cruise_speed: speed,
            ..config.clone()
        };
        Ok(max_stops(&c, dwell)? == stop_target)
    };
    let mut step = (min_speed / SPEED_GRID).ceil();
    while step * SPEED_GRID < max_speed {
        let speed = step * SPEED_GRID;
        if fits(speed)? {
            return Ok(SpeedCalibration {
                speed,
                min_speed,
                max_speed,
            });
        }
        step += 1.0;
    }
    if fits(min_speed)? {
        return Ok(SpeedCalibration {
            speed: min_speed,
            min_speed,
            max_speed,
        });
    }
    Err(Error::NoSolution(format!(
        "no cruise speed yields {stop_target} stops"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_packets_at_twenty_seconds() {
        let c = ScenarioConfig::default();
        let tx = calibrate_tx_power(5, &c).unwrap();
        assert!((tx - 2.404).abs() / 2.404 < 0.01, "{tx}");
        assert!(tx <= 2.404);
        assert!(calibrate_tx_power(0, &c).is_err());
    }

    #[test]
    fn proportional_time_gives_same_power() {
        let c20 = ScenarioConfig::default();
        let c40 = ScenarioConfig {
            dwell_time: 40.0,
            ..Default::default()
        };
        let a = calibrate_tx_power(5, &c20).unwrap();
        let b = calibrate_tx_power(10, &c40).unwrap();
        assert!((a - b).abs() / a < 1e-12);
    }

    #[test]
    fn speed_for_eighty_stops() {
        let c = ScenarioConfig::default();
        let cal = calibrate_speed(80, 20.0, &c).unwrap();
        assert_eq!(cal.speed, 6.25);
        assert!(cal.contains(6.25));
    }

    #[test]
    fn speed_band_for_long_dwell_admits_default() {
        let c = ScenarioConfig::default();
        let cal = calibrate_speed(22, 70.0, &c).unwrap();
        assert!(cal.contains(6.25), "{cal:?}");
    }

    #[test]
    fn impossible_stop_count() {
        let c = ScenarioConfig::default();
        assert!(matches!(
            calibrate_speed(1000, 20.0, &c),
            Err(Error::NoSolution(_))
        ));
    }
}
