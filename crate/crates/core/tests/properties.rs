use std::f64::consts::{FRAC_PI_2, TAU};

use proptest::prelude::*;

use hullcharge_core::geometry::{
    arc_length, ellipse_from_perimeter, equidistant_arcs, link_geometry, point_at_arc, wrap_arc,
    Ellipse,
};
use hullcharge_core::layout::place_sensors;
use hullcharge_core::rf::{harvest_rate, packets_supported, received_power};
use hullcharge_core::{run_mission, EnergyCosts, Layout, LinkParams, Placement, ScenarioConfig};

fn path() -> Ellipse {
    ellipse_from_perimeter(5.0, 500.0, 1e-12).unwrap()
}

/// Arc coordinate of a point on the path, from its eccentric anomaly.
fn arc_of(e: &Ellipse, x: f64, y: f64) -> f64 {
    let t = (y / e.semi_minor())
        .atan2(x / e.semi_major())
        .rem_euclid(TAU);
    arc_length(e, 0.0, t).unwrap()
}

proptest! {
    #[test]
    fn arc_length_is_additive(
        aspect in 1.0f64..8.0,
        mut ts in proptest::array::uniform3(0.0f64..TAU),
    ) {
        ts.sort_by(f64::total_cmp);
        let e = Ellipse::new(aspect, 1.0).unwrap();
        let ab = arc_length(&e, ts[0], ts[1]).unwrap();
        let bc = arc_length(&e, ts[1], ts[2]).unwrap();
        let ac = arc_length(&e, ts[0], ts[2]).unwrap();
        prop_assert!(ab >= 0.0 && bc >= 0.0);
        prop_assert!((ab + bc - ac).abs() <= 1e-9 * ac.max(1e-12));
        if ts[0] < ts[2] {
            prop_assert!(ac > 0.0);
        }
    }

    #[test]
    fn point_at_arc_round_trip(s in 0.0f64..500.0) {
        let e = path();
        let s = s.min(e.perimeter() * (1.0 - 1e-15));
        let pose = point_at_arc(&e, s).unwrap();
        let back = arc_of(&e, pose.position.x, pose.position.y);
        let mut diff = (back - s).abs();
        diff = diff.min(e.perimeter() - diff);
        prop_assert!(diff <= 1e-9, "s {} recovered {} ", s, back);
    }

    #[test]
    fn circle_matches_closed_form(radius in 0.5f64..200.0, frac in 0.0f64..1.0) {
        let e = Ellipse::circle(radius).unwrap();
        let s = frac * e.perimeter() * (1.0 - 1e-15);
        prop_assert!((e.perimeter() - TAU * radius).abs() <= 1e-9 * radius.max(1.0));
        let p = point_at_arc(&e, s).unwrap().position;
        let angle = s / radius;
        prop_assert!((p.x - radius * angle.cos()).abs() <= 1e-9 * radius.max(1.0));
        prop_assert!((p.y - radius * angle.sin()).abs() <= 1e-9 * radius.max(1.0));
    }

    #[test]
    fn equidistant_spacing(k in 1usize..=200, phase_frac in 0.0f64..1.0) {
        let e = path();
        let p = e.perimeter();
        let phase = wrap_arc(phase_frac * p, p);
        let arcs = equidistant_arcs(&e, k, phase).unwrap();
        prop_assert_eq!(arcs.len(), k);
        for i in 0..k {
            let gap = wrap_arc(arcs[(i + 1) % k] - arcs[i], p);
            let gap = if k == 1 { p } else { gap };
            prop_assert!((gap - p / k as f64).abs() <= 1e-9);
        }
    }

    #[test]
    fn received_power_decreases_with_distance_and_angle(
        d in 0.1f64..50.0,
        step in 1e-6f64..10.0,
        angle in 0.0f64..FRAC_PI_2,
        dangle in 0.0f64..FRAC_PI_2,
        exponent in 0.0f64..4.0,
    ) {
        let link = LinkParams { angle_exponent: exponent, ..Default::default() };
        let near = received_power(&link, d, angle).unwrap();
        let far = received_power(&link, d + step, angle).unwrap();
        if near > 0.0 {
            prop_assert!(far < near);
        }
        let wider = (angle + dangle).min(FRAC_PI_2);
        prop_assert!(received_power(&link, d, wider).unwrap() <= near);
    }

    #[test]
    fn received_power_scales_with_tx_power(
        d in 0.1f64..20.0,
        angle in 0.0f64..1.5,
        alpha in 0.1f64..10.0,
    ) {
        let link = LinkParams { harvest_threshold: 0.0, ..Default::default() };
        let scaled = LinkParams { tx_power: alpha * link.tx_power, ..link };
        let p = received_power(&link, d, angle).unwrap();
        let q = received_power(&scaled, d, angle).unwrap();
        prop_assert!((q - alpha * p).abs() <= 1e-12 * q.abs().max(f64::MIN_POSITIVE));
        let (hp, hq) = (harvest_rate(&link, p), harvest_rate(&scaled, q));
        prop_assert!((hq - alpha * hp).abs() <= 1e-12 * hq.abs().max(f64::MIN_POSITIVE));
    }

    #[test]
    fn harvest_never_exceeds_conversion(p in 0.0f64..0.1, threshold in 0.0f64..0.01) {
        let link = LinkParams { harvest_threshold: threshold, ..Default::default() };
        let h = harvest_rate(&link, p);
        prop_assert!(h <= link.rf_dc_efficiency * p);
        if p >= threshold {
            prop_assert_eq!(h, link.rf_dc_efficiency * p);
        } else {
            prop_assert_eq!(h, 0.0);
        }
    }

    #[test]
    fn packets_monotone_and_ignore_remainders(
        e in 0.0f64..10.0,
        extra in 0.0f64..1.0,
        remainder in 0.0f64..0.019,
        whole in 0u64..400,
    ) {
        let costs = EnergyCosts::default();
        prop_assert!(packets_supported(e + extra, &costs).unwrap() >= packets_supported(e, &costs).unwrap());
        let base = whole as f64 * 0.02;
        prop_assert_eq!(
            packets_supported(base + remainder, &costs).unwrap(),
            packets_supported(base, &costs).unwrap()
        );
    }
}

fn mission_config() -> impl Strategy<Value = ScenarioConfig> {
    (
        prop_oneof![Just(Layout::Uniform), Just(Layout::Clustered)],
        prop_oneof![Just(Placement::SensorFacing), Just(Placement::EqualArc)],
        1usize..=100,
        5.0f64..90.0,
        0.0f64..25.0,
    )
        .prop_map(
            |(layout, placement, n_stops, dwell_time, phase)| ScenarioConfig {
                layout,
                placement,
                n_stops,
                dwell_time,
                phase,
                ..Default::default()
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ledger_identities_and_determinism(config in mission_config()) {
        let a = run_mission(&config).unwrap();
        prop_assert_eq!(a.check_identities(), Ok(()));
        let b = run_mission(&config).unwrap();
        prop_assert_eq!(a.total_uav_energy.to_bits(), b.total_uav_energy.to_bits());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn packets_grow_with_dwell(config in mission_config(), extra in 0.0f64..60.0) {
        let longer = ScenarioConfig { dwell_time: config.dwell_time + extra, ..config.clone() };
        let short = run_mission(&config).unwrap().total_packets;
        let long = run_mission(&longer).unwrap().total_packets;
        prop_assert!(long >= short, "{} < {}", long, short);
    }

    #[test]
    fn sensor_facing_packets_grow_with_stops(
        layout in prop_oneof![Just(Layout::Uniform), Just(Layout::Clustered)],
        k in 1usize..80,
        dwell in prop_oneof![Just(20.0), Just(70.0)],
    ) {
        let config = ScenarioConfig {
            layout,
            placement: Placement::SensorFacing,
            n_stops: k,
            dwell_time: dwell,
            ..Default::default()
        };
        let next = ScenarioConfig { n_stops: k + 1, ..config.clone() };
        let a = run_mission(&config).unwrap();
        let b = run_mission(&next).unwrap();
        if b.feasible {
            prop_assert!(b.total_packets >= a.total_packets);
        }
    }
}

#[test]
fn close_pairs_harvest_alike() {
    let e = path();
    let sensors = place_sensors(Layout::Clustered, 100, 1e-4, &e, 1.0).unwrap();
    let link = LinkParams::default();
    for pair in sensors.chunks(2) {
        // stop facing the cluster centre, one standoff out
        let centre = wrap_arc(
            pair[0].pose.arc_coord
                + 0.5
                    * wrap_arc(
                        pair[1].pose.arc_coord - pair[0].pose.arc_coord,
                        e.perimeter(),
                    ),
            e.perimeter(),
        );
        let above = point_at_arc(&e, centre).unwrap().position;
        let power = |i: usize| {
            let (d, inc) = link_geometry(&pair[i].pose, above).unwrap();
            received_power(&link, d, inc).unwrap()
        };
        let (p0, p1) = (power(0), power(1));
        assert!((p0 - p1).abs() / p0.max(p1) < 1e-3, "{p0} vs {p1}");
    }
}
