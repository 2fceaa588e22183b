//! One mission: a full loop around the hull with a charge-then-collect
//! dwell at every stop-point.

use serde::Serialize;

use crate::config::{validate_config, Placement, ScenarioConfig, WptDrawMode};
use crate::error::{Error, Result};
use crate::geometry::{ellipse_from_perimeter, link_geometry, Ellipse};
use crate::layout::{place_sensors, place_stops_p1, place_stops_p2, SensorPose, StopPlan};
use crate::rf::{
    harvest_rate, max_boresight_harvest_range, packet_cost_picojoules, received_power, to_joules,
    to_picojoules,
};

/// Relative perimeter tolerance used when building the mission geometry.
const PATH_REL_TOL: f64 = 1e-12;

/// Energy handed to one sensor during one stop's power-transfer phase.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Delivery {
    pub sensor_id: usize,
    pub energy_pj: u64,
    pub packets: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StopRecord {
    pub stop_index: usize,
    pub arc_coord: f64,
    /// Path length flown to reach this stop, m.
    pub leg_arc: f64,
    pub target: Option<usize>,
    pub deliveries: Vec<Delivery>,
    pub packets: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensorRecord {
    pub id: usize,
    pub cluster_id: usize,
    pub arc_coord: f64,
    pub harvested_pj: u64,
    pub spent_pj: u64,
    pub residual_pj: u64,
    pub packets: u64,
}

impl SensorRecord {
    pub fn harvested(&self) -> f64 {
        to_joules(self.harvested_pj)
    }

    pub fn spent(&self) -> f64 {
        to_joules(self.spent_pj)
    }

    pub fn residual(&self) -> f64 {
        to_joules(self.residual_pj)
    }
}

/// Full energy and packet accounting of one mission. UAV energies are in
/// joules; sensor energies are integer picojoules.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MissionLedger {
    pub total_uav_energy: f64,
    pub flight_energy: f64,
    pub hover_energy: f64,
    pub wpt_energy: f64,
    pub rx_energy: f64,
    pub uav_battery: f64,
    pub stops: Vec<StopRecord>,
    pub sensors: Vec<SensorRecord>,
    pub total_packets: u64,
    pub feasible: bool,
    pub mission_time: f64,
}

impl MissionLedger {
    /// Checks the bookkeeping identities; returns a description of the
    /// first one that fails.
    pub fn check_identities(&self) -> std::result::Result<(), String> {
        let total = self.flight_energy + self.hover_energy + self.wpt_energy + self.rx_energy;
        if total != self.total_uav_energy {
            return Err(format!(
                "uav energy {} != parts {}",
                self.total_uav_energy, total
            ));
        }
        for s in &self.sensors {
            if s.harvested_pj.checked_sub(s.spent_pj) != Some(s.residual_pj) {
                return Err(format!("sensor {} energy does not balance", s.id));
            }
        }
        let by_sensor: u64 = self.sensors.iter().map(|s| s.packets).sum();
        let by_stop: u64 = self.stops.iter().map(|s| s.packets).sum();
        if by_sensor != self.total_packets || by_stop != self.total_packets {
            return Err(format!(
                "packets: total {}, per-sensor {by_sensor}, per-stop {by_stop}",
                self.total_packets
            ));
        }
        if self.feasible != (self.total_uav_energy <= self.uav_battery) {
            return Err("feasibility flag disagrees with battery".into());
        }
        Ok(())
    }
}

/// Geometry, sensors and stop plan for a validated config.
#[derive(Debug, Clone)]
pub struct Deployment {
    pub path: Ellipse,
    pub sensors: Vec<SensorPose>,
    pub plan: StopPlan,
}

/// Airborne time on a full battery, s.
pub fn endurance(config: &ScenarioConfig) -> f64 {
    config.uav_battery / config.uav_flight_power
}

pub fn loop_flight_time(config: &ScenarioConfig) -> f64 {
    config.path_perimeter / config.cruise_speed
}

/// Largest stop count whose hover time still fits in the endurance after
/// flying the full loop.
pub fn max_stops(config: &ScenarioConfig, dwell: f64) -> Result<usize> {
    if !(dwell.is_finite() && dwell > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "dwell must be > 0, got {dwell}"
        )));
    }
    if !(config.cruise_speed.is_finite() && config.cruise_speed > 0.0) {
        return Err(Error::InvalidArgument("cruise speed must be > 0".into()));
    }
    let spare = endurance(config) - loop_flight_time(config);
    if spare.is_nan() || spare < 0.0 {
        return Ok(0);
    }
    let per_stop = match config.wpt_draw_mode {
        WptDrawMode::IncludedInFlightPower => dwell,
        WptDrawMode::Additional => {
            dwell + config.link.tx_power * dwell * config.phase_split / config.uav_flight_power
        }
    };
    Ok((spare / per_stop).floor() as usize)
}

pub fn build_deployment(config: &ScenarioConfig) -> Result<Deployment> {
    let path = ellipse_from_perimeter(config.aspect_ratio, config.path_perimeter, PATH_REL_TOL)?;
    let sensors = place_sensors(
        config.layout,
        config.n_sensors,
        config.cluster_spacing,
        &path,
        config.standoff,
    )?;
    let plan = if config.n_stops == 0 {
        StopPlan::empty(path.perimeter())
    } else {
        match config.placement {
            Placement::SensorFacing => place_stops_p1(
                &sensors,
                &path,
                config.n_stops,
                config.standoff,
                config.dwell_time,
            )?,
            Placement::EqualArc => {
                place_stops_p2(&path, config.n_stops, config.dwell_time, config.phase)?
            }
        }
    };
    Ok(Deployment {
        path,
        sensors,
        plan,
    })
}

pub fn run_mission(config: &ScenarioConfig) -> Result<MissionLedger> {
    validate_config(config).map_err(Error::InvalidConfig)?;
    let deployment = build_deployment(config)?;
    execute_plan(config, &deployment.sensors, &deployment.plan)
}

/// Runs a given plan against a given deployment. Stops are processed in
/// plan order and sensors by position in `sensors`, so repeated runs are
/// bit-identical.
pub fn execute_plan(
    config: &ScenarioConfig,
    sensors: &[SensorPose],
    plan: &StopPlan,
) -> Result<MissionLedger> {
    let unit = packet_cost_picojoules(&config.costs)?;
    let charge_time = plan.dwell_time * config.phase_split;

    let mut records: Vec<SensorRecord> = sensors
        .iter()
        .map(|s| SensorRecord {
            id: s.id,
            cluster_id: s.cluster_id,
            arc_coord: s.pose.arc_coord,
            harvested_pj: 0,
            spent_pj: 0,
            residual_pj: 0,
            packets: 0,
        })
        .collect();

    let flight_energy = config.path_perimeter / config.cruise_speed * config.uav_flight_power;
    let mut hover_energy = 0.0;
    let mut wpt_energy = 0.0;
    let mut stops = Vec::with_capacity(plan.stops.len());
    let mut charged = Vec::with_capacity(sensors.len());
    // beyond the boresight range nothing can reach the threshold
    let reach = max_boresight_harvest_range(&config.link)?;

    for (index, stop) in plan.stops.iter().enumerate() {
        // power transfer phase
        charged.clear();
        for (slot, sensor) in sensors.iter().enumerate() {
            let (distance, incidence) = link_geometry(&sensor.pose, stop.position)?;
            if distance > reach {
                continue;
            }
            let p = received_power(&config.link, distance, incidence)?;
            if p > 0.0 && p >= config.link.harvest_threshold {
                let energy = to_picojoules(harvest_rate(&config.link, p) * charge_time);
                records[slot].harvested_pj += energy;
                records[slot].residual_pj += energy;
                charged.push((slot, energy));
            }
        }

        // data phase: every sensor charged here reports what it can afford
        let mut deliveries = Vec::with_capacity(charged.len());
        let mut stop_packets = 0;
        for &(slot, energy_pj) in &charged {
            let rec = &mut records[slot];
            let packets = rec.residual_pj / unit;
            rec.residual_pj -= packets * unit;
            rec.spent_pj += packets * unit;
            rec.packets += packets;
            stop_packets += packets;
            deliveries.push(Delivery {
                sensor_id: rec.id,
                energy_pj,
                packets,
            });
        }

        hover_energy += plan.dwell_time * config.uav_flight_power;
        if config.wpt_draw_mode == WptDrawMode::Additional {
            wpt_energy += config.link.tx_power * charge_time;
        }
        stops.push(StopRecord {
            stop_index: index,
            arc_coord: stop.arc_coord,
            leg_arc: plan.inter_stop_arc[index],
            target: stop.target,
            deliveries,
            packets: stop_packets,
        });
    }

    let total_packets: u64 = stops.iter().map(|s| s.packets).sum();
    let rx_energy = total_packets as f64 * config.costs.e_rx_packet;
    let total_uav_energy = flight_energy + hover_energy + wpt_energy + rx_energy;
    Ok(MissionLedger {
        total_uav_energy,
        flight_energy,
        hover_energy,
        wpt_energy,
        rx_energy,
        uav_battery: config.uav_battery,
        stops,
        sensors: records,
        total_packets,
        feasible: total_uav_energy <= config.uav_battery,
        mission_time: loop_flight_time(config) + plan.stops.len() as f64 * plan.dwell_time,
    })
}
