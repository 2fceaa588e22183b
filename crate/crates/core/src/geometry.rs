//! Planar geometry of the flight-path ellipse and the hull curve beneath it.
//!
//! The ellipse is axis-aligned and centered at the origin, parameterized as
//! `(a cos t, b sin t)`. Arc coordinates are measured counter-clockwise from
//! the parameter origin `t = 0`.

use std::f64::consts::{PI, TAU};
use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

use crate::error::{ensure_finite, invalid, Error, Result};

/// Arc tolerance used by [`point_at_arc`], in meters.
pub const ARC_TOLERANCE: f64 = 1e-9;

/// Number of cumulative-arc nodes cached per ellipse.
const ARC_TABLE_NODES: usize = 256;

/// Relative tolerance handed to the adaptive Simpson integrator.
const QUADRATURE_REL_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// An axis-aligned ellipse with its perimeter and a cumulative arc table.
#[derive(Debug, Clone, PartialEq)]
pub struct Ellipse {
    semi_major: f64,
    semi_minor: f64,
    perimeter: f64,
    // cumulative arc length at t = TAU * j / ARC_TABLE_NODES
    arc_table: Vec<f64>,
}

/// Position, unit tangent and unit outward normal at an arc coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfacePose {
    pub position: Vec2,
    pub tangent: Vec2,
    pub outward_normal: Vec2,
    pub arc_coord: f64,
}

impl Ellipse {
    pub fn new(semi_major: f64, semi_minor: f64) -> Result<Self> {
        ensure_finite("semi_major", semi_major)?;
        ensure_finite("semi_minor", semi_minor)?;
        if !(semi_minor > 0.0 && semi_major >= semi_minor) {
            return Err(invalid(format!(
                "need semi_major >= semi_minor > 0, got {semi_major} and {semi_minor}"
            )));
        }
        let step = TAU / ARC_TABLE_NODES as f64;
        let mut arc_table = Vec::with_capacity(ARC_TABLE_NODES + 1);
        let mut acc = 0.0;
        arc_table.push(acc);
        for j in 0..ARC_TABLE_NODES {
            let t0 = step * j as f64;
            let t1 = if j + 1 == ARC_TABLE_NODES {
                TAU
            } else {
                step * (j + 1) as f64
            };
            acc += raw_arc(semi_major, semi_minor, t0, t1);
            arc_table.push(acc);
        }
        Ok(Self {
            semi_major,
            semi_minor,
            perimeter: acc,
            arc_table,
        })
    }

    pub fn circle(radius: f64) -> Result<Self> {
        Self::new(radius, radius)
    }

    pub fn semi_major(&self) -> f64 {
        self.semi_major
    }

    pub fn semi_minor(&self) -> f64 {
        self.semi_minor
    }

    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }

    pub fn aspect_ratio(&self) -> f64 {
        self.semi_major / self.semi_minor
    }

    /// Smallest radius of curvature, attained at the ends of the major axis.
    pub fn min_radius_of_curvature(&self) -> f64 {
        self.semi_minor * self.semi_minor / self.semi_major
    }

    fn pose_at_parameter(&self, t: f64, arc_coord: f64) -> SurfacePose {
        let (sin, cos) = t.sin_cos();
        let (a, b) = (self.semi_major, self.semi_minor);
        let speed = (a * sin).hypot(b * cos);
        let tangent = Vec2::new(-a * sin / speed, b * cos / speed);
        SurfacePose {
            position: Vec2::new(a * cos, b * sin),
            tangent,
            outward_normal: Vec2::new(tangent.y, -tangent.x),
            arc_coord,
        }
    }
}

/// Builds an ellipse with `semi_major / semi_minor = aspect_ratio` whose
/// perimeter matches `target_perimeter` to within `rel_tol`, by bisection on
/// the size.
pub fn ellipse_from_perimeter(
    aspect_ratio: f64,
    target_perimeter: f64,
    rel_tol: f64,
) -> Result<Ellipse> {
    ensure_finite("aspect_ratio", aspect_ratio)?;
    ensure_finite("target_perimeter", target_perimeter)?;
    ensure_finite("rel_tol", rel_tol)?;
    if aspect_ratio < 1.0 {
        return Err(invalid(format!(
            "aspect_ratio must be >= 1, got {aspect_ratio}"
        )));
    }
    if target_perimeter <= 0.0 {
        return Err(invalid(format!(
            "target_perimeter must be > 0, got {target_perimeter}"
        )));
    }
    if !(rel_tol > 0.0 && rel_tol < 1e-3) {
        return Err(invalid(format!(
            "rel_tol must lie in (0, 1e-3), got {rel_tol}"
        )));
    }

    // 4a <= perimeter <= 2 pi a, with a = aspect * scale. Perimeter is
    // linear in scale, so the unit shape is integrated once.
    let mut lo = target_perimeter / (TAU * aspect_ratio);
    let mut hi = target_perimeter / (4.0 * aspect_ratio);
    let unit_perimeter = raw_arc(aspect_ratio, 1.0, 0.0, TAU);
    let goal = 0.1 * rel_tol * target_perimeter;
    let mut scale = 0.5 * (lo + hi);
    for _ in 0..200 {
        scale = 0.5 * (lo + hi);
        let diff = scale * unit_perimeter - target_perimeter;
        if diff.abs() <= goal || hi - lo <= f64::EPSILON * scale {
            break;
        }
        if diff < 0.0 {
            lo = scale;
        } else {
            hi = scale;
        }
    }

    let ellipse = Ellipse::new(aspect_ratio * scale, scale)?;
    let err = (ellipse.perimeter - target_perimeter).abs() / target_perimeter;
    if err > rel_tol {
        return Err(Error::NoSolution(format!(
            "perimeter bisection stalled at relative error {err:e}"
        )));
    }
    Ok(ellipse)
}

/// Arc length between parameters `t0 <= t1` by adaptive Simpson quadrature.
pub fn arc_length(ellipse: &Ellipse, t0: f64, t1: f64) -> Result<f64> {
    ensure_finite("t0", t0)?;
    ensure_finite("t1", t1)?;
    if t0 > t1 {
        return Err(invalid(format!("need t0 <= t1, got {t0} > {t1}")));
    }
    Ok(raw_arc(ellipse.semi_major, ellipse.semi_minor, t0, t1))
}

/// Pose at arc coordinate `s` in `[0, perimeter)`.
pub fn point_at_arc(ellipse: &Ellipse, s: f64) -> Result<SurfacePose> {
    ensure_finite("s", s)?;
    if !(0.0..ellipse.perimeter).contains(&s) {
        return Err(invalid(format!(
            "arc coordinate {s} outside [0, {})",
            ellipse.perimeter
        )));
    }
    let table = &ellipse.arc_table;
    // last node whose cumulative arc is <= s
    let j = table
        .partition_point(|&c| c <= s)
        .saturating_sub(1)
        .min(ARC_TABLE_NODES - 1);
    let step = TAU / ARC_TABLE_NODES as f64;
    let t_base = step * j as f64;
    let mut lo = t_base;
    let mut hi = if j + 1 == ARC_TABLE_NODES {
        TAU
    } else {
        step * (j + 1) as f64
    };
    // Bisect to full precision; |d arc / dt| <= semi_major keeps the arc
    // error far below ARC_TOLERANCE. The arc up to `lo` is carried along so
    // each step only integrates [lo, mid].
    let (a, b) = (ellipse.semi_major, ellipse.semi_minor);
    let mut arc_lo = table[j];
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let arc = arc_lo + gauss_legendre_8(|t| arc_speed(a, b, t), lo, mid);
        if arc < s {
            lo = mid;
            arc_lo = arc;
        } else {
            hi = mid;
        }
    }
    debug_assert!((arc_lo - s).abs() <= ARC_TOLERANCE + (hi - lo) * a);
    Ok(ellipse.pose_at_parameter(0.5 * (lo + hi), s))
}

/// `k` arc coordinates spaced `perimeter / k` apart starting at `phase`,
/// wrapped into `[0, perimeter)` and sorted.
pub fn equidistant_arcs(ellipse: &Ellipse, k: usize, phase: f64) -> Result<Vec<f64>> {
    equidistant_arcs_on(ellipse.perimeter, k, phase)
}

pub(crate) fn equidistant_arcs_on(perimeter: f64, k: usize, phase: f64) -> Result<Vec<f64>> {
    ensure_finite("phase", phase)?;
    if k == 0 {
        return Err(invalid("need at least one arc coordinate"));
    }
    if !(0.0..perimeter).contains(&phase) {
        return Err(invalid(format!("phase {phase} outside [0, {perimeter})")));
    }
    let gap = perimeter / k as f64;
    let mut arcs: Vec<f64> = (0..k)
        .map(|i| wrap_arc(phase + gap * i as f64, perimeter))
        .collect();
    arcs.sort_by(f64::total_cmp);
    Ok(arcs)
}

/// Maps any finite arc coordinate into `[0, perimeter)`.
pub fn wrap_arc(s: f64, perimeter: f64) -> f64 {
    let w = s.rem_euclid(perimeter);
    if w >= perimeter {
        0.0
    } else {
        w
    }
}

pub fn offset_outward(pose: &SurfacePose, dist: f64) -> Vec2 {
    pose.position + pose.outward_normal * dist
}

/// Distance from the sensor to `uav_point` and the angle between the
/// sensor's outward normal and the direction toward the UAV.
pub fn link_geometry(sensor: &SurfacePose, uav_point: Vec2) -> Result<(f64, f64)> {
    if !uav_point.is_finite() {
        return Err(invalid("uav point must be finite"));
    }
    let v = uav_point - sensor.position;
    let distance = v.norm();
    if distance == 0.0 {
        return Err(Error::DegenerateGeometry(
            "uav point coincides with the sensor".into(),
        ));
    }
    let n = sensor.outward_normal;
    let incidence = n.cross(v).abs().atan2(n.dot(v));
    debug_assert!((0.0..=PI).contains(&incidence));
    Ok((distance, incidence))
}

fn arc_speed(a: f64, b: f64, t: f64) -> f64 {
    let (sin, cos) = t.sin_cos();
    (a * sin).hypot(b * cos)
}

fn raw_arc(a: f64, b: f64, t0: f64, t1: f64) -> f64 {
    if t1 <= t0 {
        return 0.0;
    }
    let f = |t: f64| arc_speed(a, b, t);
    let tol = QUADRATURE_REL_TOL * a * (t1 - t0);
    adaptive_simpson(&f, t0, t1, tol)
}

const GL8_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Fixed 8-point Gauss-Legendre rule; used on sub-intervals of one arc-table
/// segment, where the integrand is smooth enough for it to be exact to
/// rounding.
fn gauss_legendre_8<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut sum = 0.0;
    for (x, w) in GL8_NODES.iter().zip(GL8_WEIGHTS) {
        sum += w * (f(mid - half * x) + f(mid + half * x));
    }
    sum * half
}

fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let c = 0.5 * (a + b);
    let (fa, fb, fc) = (f(a), f(b), f(c));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fc + fb);
    simpson_step(f, a, b, fa, fb, fc, whole, tol, 0)
}

const MIN_DEPTH: u32 = 3;
const MAX_DEPTH: u32 = 48;

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    fc: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let c = 0.5 * (a + b);
    let (m1, m2) = (0.5 * (a + c), 0.5 * (c + b));
    let (f1, f2) = (f(m1), f(m2));
    let left = (c - a) / 6.0 * (fa + 4.0 * f1 + fc);
    let right = (b - c) / 6.0 * (fc + 4.0 * f2 + fb);
    let delta = left + right - whole;
    if depth >= MAX_DEPTH || (depth >= MIN_DEPTH && delta.abs() <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, c, fa, fc, f1, left, 0.5 * tol, depth + 1)
        + simpson_step(f, c, b, fc, fb, f2, right, 0.5 * tol, depth + 1)
}
