//! Free-space link budget, RF-DC harvesting and packet energy arithmetic.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{ensure_finite, invalid, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Sensor-side energy bookkeeping is done in integer picojoules so that
/// ledger identities hold exactly.
pub const PICOJOULES_PER_JOULE: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkParams {
    /// Carrier frequency, Hz.
    pub frequency: f64,
    /// UAV power-transfer transmit power, W.
    pub tx_power: f64,
    /// UAV antenna gain, dBi.
    pub tx_gain: f64,
    /// Sensor antenna gain, dBi.
    pub rx_gain: f64,
    pub rf_dc_efficiency: f64,
    /// Minimum received RF power that harvests anything, W.
    pub harvest_threshold: f64,
    /// Exponent `n` of the `cos^n` sensor aperture pattern.
    pub angle_exponent: f64,
}

impl Default for LinkParams {
    fn default() -> Self {
        Self {
            frequency: 2.3e9,
            tx_power: 2.404,
            tx_gain: 9.3,
            rx_gain: 8.0,
            rf_dc_efficiency: 0.72,
            harvest_threshold: 1e-3,
            angle_exponent: 1.0,
        }
    }
}

/// Per-operation energy costs, J.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyCosts {
    pub e_measurement: f64,
    pub e_tx_packet: f64,
    pub e_rx_packet: f64,
}

impl Default for EnergyCosts {
    fn default() -> Self {
        Self {
            e_measurement: 0.01,
            e_tx_packet: 0.01,
            e_rx_packet: 0.01,
        }
    }
}

impl EnergyCosts {
    /// Sensor energy for one measurement plus the packet carrying it.
    pub fn per_packet(&self) -> f64 {
        self.e_measurement + self.e_tx_packet
    }
}

pub fn to_picojoules(joules: f64) -> u64 {
    (joules * PICOJOULES_PER_JOULE).round() as u64
}

pub fn to_joules(picojoules: u64) -> f64 {
    picojoules as f64 / PICOJOULES_PER_JOULE
}

pub fn wavelength(frequency: f64) -> Result<f64> {
    ensure_finite("frequency", frequency)?;
    if frequency <= 0.0 {
        return Err(invalid(format!("frequency must be > 0, got {frequency}")));
    }
    Ok(SPEED_OF_LIGHT / frequency)
}

/// Friis free-space path loss between isotropic antennas, dB.
pub fn fspl_db(frequency: f64, distance: f64) -> Result<f64> {
    let lambda = wavelength(frequency)?;
    ensure_finite("distance", distance)?;
    if distance <= 0.0 {
        return Err(invalid(format!("distance must be > 0, got {distance}")));
    }
    Ok(20.0 * (4.0 * PI * distance / lambda).log10())
}

/// RF power arriving at the sensor, W. The drone antenna is assumed aimed;
/// only the sensor aperture sees the `cos^n` incidence loss.
pub fn received_power(params: &LinkParams, distance: f64, incidence: f64) -> Result<f64> {
    ensure_finite("incidence", incidence)?;
    if !(0.0..=PI).contains(&incidence) {
        return Err(invalid(format!("incidence {incidence} outside [0, pi]")));
    }
    let loss = fspl_db(params.frequency, distance)?;
    if incidence >= FRAC_PI_2 {
        return Ok(0.0);
    }
    let budget_db = params.tx_gain + params.rx_gain - loss;
    let angle_factor = incidence.cos().max(0.0).powf(params.angle_exponent);
    Ok(params.tx_power * 10f64.powf(budget_db / 10.0) * angle_factor)
}

/// DC power stored by the sensor; zero below the (inclusive) threshold.
pub fn harvest_rate(params: &LinkParams, p_received: f64) -> f64 {
    if p_received < params.harvest_threshold {
        0.0
    } else {
        params.rf_dc_efficiency * p_received
    }
}

/// Whole measurement+packet units payable from `stored_energy` joules.
pub fn packets_supported(stored_energy: f64, costs: &EnergyCosts) -> Result<u64> {
    ensure_finite("stored_energy", stored_energy)?;
    if stored_energy < 0.0 {
        return Err(invalid(format!(
            "stored energy must be >= 0, got {stored_energy}"
        )));
    }
    let unit = packet_cost_picojoules(costs)?;
    Ok(to_picojoules(stored_energy) / unit)
}

pub(crate) fn packet_cost_picojoules(costs: &EnergyCosts) -> Result<u64> {
    let unit = to_picojoules(costs.per_packet());
    if unit == 0 {
        return Err(invalid("per-packet sensor energy must be > 0"));
    }
    Ok(unit)
}

/// Largest boresight distance at which received power still meets the
/// harvest threshold. Zero when it is never met; infinite for a zero
/// threshold.
pub fn max_boresight_harvest_range(params: &LinkParams) -> Result<f64> {
    let lambda = wavelength(params.frequency)?;
    if params.tx_power <= 0.0 {
        return Ok(0.0);
    }
    if params.harvest_threshold <= 0.0 {
        return Ok(f64::INFINITY);
    }
    let gain = 10f64.powf((params.tx_gain + params.rx_gain) / 10.0);
    Ok(lambda / (4.0 * PI) * (params.tx_power * gain / params.harvest_threshold).sqrt())
}
