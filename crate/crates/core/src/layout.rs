//! Sensor deployments (S1/S2) and stop-point plans (P1/P2).
//!
//! Sensors live on the hull, the inward parallel curve of the flight path at
//! the standoff distance. A sensor's `arc_coord` is the path arc coordinate
//! of the path point directly above it, so sensor and stop arcs share one
//! axis.

use serde::Serialize;

use crate::config::Layout;
use crate::error::{ensure_finite, invalid, Result};
use crate::geometry::{
    equidistant_arcs, offset_outward, point_at_arc, wrap_arc, Ellipse, SurfacePose, Vec2,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SensorPose {
    pub id: usize,
    pub cluster_id: usize,
    /// Pose on the hull; `arc_coord` is measured along the flight path.
    pub pose: SurfacePose,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stop {
    pub position: Vec2,
    pub arc_coord: f64,
    /// Cluster id this stop faces (sensor-facing plans only).
    pub target: Option<usize>,
}

/// A full loop: launch at arc 0, visit `stops` in arc order, return to arc 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StopPlan {
    pub stops: Vec<Stop>,
    pub dwell_time: f64,
    /// Leg lengths along the path: launch to first stop, stop to stop, and
    /// last stop back to launch. Sums to the path perimeter.
    pub inter_stop_arc: Vec<f64>,
}

impl StopPlan {
    fn new(mut stops: Vec<Stop>, dwell_time: f64, perimeter: f64) -> Result<Self> {
        ensure_finite("dwell_time", dwell_time)?;
        if dwell_time <= 0.0 {
            return Err(invalid(format!("dwell time must be > 0, got {dwell_time}")));
        }
        stops.sort_by(|a, b| a.arc_coord.total_cmp(&b.arc_coord));
        let mut legs = Vec::with_capacity(stops.len() + 1);
        let mut at = 0.0;
        for s in &stops {
            legs.push(s.arc_coord - at);
            at = s.arc_coord;
        }
        legs.push(perimeter - at);
        Ok(Self {
            stops,
            dwell_time,
            inter_stop_arc: legs,
        })
    }

    /// A plan with no stops: the UAV just flies the loop.
    pub fn empty(perimeter: f64) -> Self {
        Self {
            stops: Vec::new(),
            dwell_time: 0.0,
            inter_stop_arc: vec![perimeter],
        }
    }
}

/// Hull pose below the path point at arc `s`.
pub fn hull_pose(path: &Ellipse, s: f64, standoff: f64) -> Result<SurfacePose> {
    let above = point_at_arc(path, s)?;
    Ok(SurfacePose {
        position: offset_outward(&above, -standoff),
        ..above
    })
}

pub fn place_sensors(
    layout: Layout,
    n_sensors: usize,
    cluster_spacing: f64,
    path: &Ellipse,
    standoff: f64,
) -> Result<Vec<SensorPose>> {
    ensure_finite("cluster_spacing", cluster_spacing)?;
    ensure_finite("standoff", standoff)?;
    if n_sensors == 0 {
        return Err(invalid("need at least one sensor"));
    }
    if cluster_spacing < 0.0 {
        return Err(invalid(format!(
            "cluster spacing must be >= 0, got {cluster_spacing}"
        )));
    }
    let perimeter = path.perimeter();
    match layout {
        Layout::Uniform => equidistant_arcs(path, n_sensors, 0.0)?
            .into_iter()
            .enumerate()
            .map(|(id, s)| {
                Ok(SensorPose {
                    id,
                    cluster_id: id,
                    pose: hull_pose(path, s, standoff)?,
                })
            })
            .collect(),
        Layout::Clustered => {
            if !n_sensors.is_multiple_of(2) {
                return Err(invalid(format!(
                    "clustered layout needs an even sensor count, got {n_sensors}"
                )));
            }
            let half = 0.5 * cluster_spacing;
            let mut out = Vec::with_capacity(n_sensors);
            for (cluster_id, centre) in equidistant_arcs(path, n_sensors / 2, 0.0)?
                .into_iter()
                .enumerate()
            {
                for (member, offset) in [-half, half].into_iter().enumerate() {
                    out.push(SensorPose {
                        id: 2 * cluster_id + member,
                        cluster_id,
                        pose: hull_pose(path, wrap_arc(centre + offset, perimeter), standoff)?,
                    });
                }
            }
            Ok(out)
        }
    }
}

/// Arc coordinate of each cluster's centre, indexed by cluster id.
pub fn cluster_centres(sensors: &[SensorPose], perimeter: f64) -> Vec<f64> {
    let n_clusters = sensors.iter().map(|s| s.cluster_id + 1).max().unwrap_or(0);
    let mut anchor: Vec<Option<f64>> = vec![None; n_clusters];
    let mut offsets = vec![(0.0, 0usize); n_clusters];
    for s in sensors {
        let a = *anchor[s.cluster_id].get_or_insert(s.pose.arc_coord);
        // signed circular offset from the cluster's first member
        let mut d = wrap_arc(s.pose.arc_coord - a, perimeter);
        if d > 0.5 * perimeter {
            d -= perimeter;
        }
        offsets[s.cluster_id].0 += d;
        offsets[s.cluster_id].1 += 1;
    }
    anchor
        .into_iter()
        .zip(offsets)
        .map(|(a, (sum, n))| match a {
            Some(a) => wrap_arc(a + sum / n as f64, perimeter),
            None => f64::NAN,
        })
        .collect()
}

/// Sensor-facing plan. With `k` below the number of targets `m`, targets
/// `floor(i m / k)` are used; above it, the `k - m` surplus stops are spread
/// at equal arcs inside the gaps between facing stops.
pub fn place_stops_p1(
    sensors: &[SensorPose],
    path: &Ellipse,
    k: usize,
    standoff: f64,
    dwell: f64,
) -> Result<StopPlan> {
    if sensors.is_empty() {
        return Err(invalid("sensor-facing plan needs at least one sensor"));
    }
    if k == 0 {
        return Err(invalid("need at least one stop"));
    }
    ensure_finite("standoff", standoff)?;
    if standoff <= 0.0 {
        return Err(invalid(format!("standoff must be > 0, got {standoff}")));
    }
    let perimeter = path.perimeter();

    let mut targets: Vec<(usize, f64)> = cluster_centres(sensors, perimeter)
        .into_iter()
        .enumerate()
        .filter(|(_, s)| s.is_finite())
        .collect();
    targets.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let m = targets.len();

    let facing = |(id, s): (usize, f64)| -> Result<Stop> {
        let pose = hull_pose(path, s, standoff)?;
        Ok(Stop {
            position: offset_outward(&pose, standoff),
            arc_coord: s,
            target: Some(id),
        })
    };

    let mut stops = Vec::with_capacity(k);
    if k <= m {
        for i in 0..k {
            stops.push(facing(targets[i * m / k])?);
        }
    } else {
        for &t in &targets {
            stops.push(facing(t)?);
        }
        let surplus = k - m;
        let mut per_gap = vec![0usize; m];
        for e in 0..surplus {
            per_gap[e * m / surplus] += 1;
        }
        for (g, &count) in per_gap.iter().enumerate() {
            if count == 0 {
                continue;
            }
            let start = targets[g].1;
            let mut len = wrap_arc(targets[(g + 1) % m].1 - start, perimeter);
            if len == 0.0 {
                len = perimeter;
            }
            for q in 1..=count {
                let s = wrap_arc(start + len * q as f64 / (count + 1) as f64, perimeter);
                stops.push(Stop {
                    position: point_at_arc(path, s)?.position,
                    arc_coord: s,
                    target: None,
                });
            }
        }
    }
    StopPlan::new(stops, dwell, perimeter)
}

/// Equal-arc plan: `k` stops every `perimeter / k` starting at `phase`.
pub fn place_stops_p2(path: &Ellipse, k: usize, dwell: f64, phase: f64) -> Result<StopPlan> {
    let stops = equidistant_arcs(path, k, phase)?
        .into_iter()
        .map(|s| {
            Ok(Stop {
                position: point_at_arc(path, s)?.position,
                arc_coord: s,
                target: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    StopPlan::new(stops, dwell, path.perimeter())
}

/// Equal-arc phase that puts every stop half-way between adjacent targets
/// of an aligned layout.
pub fn worst_case_phase(layout: Layout, n_sensors: usize, perimeter: f64) -> f64 {
    0.5 * perimeter / layout.target_count(n_sensors).max(1) as f64
}
