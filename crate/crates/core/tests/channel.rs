mod common;

use common::{brute_force_gain, integrated_table, RawLink};
use fdris::config::ScenarioConfig;
use fdris::geometry::{
    build_channels, build_channels_watts, build_theta, dbm_to_watts, effective_gain, watts_to_dbm, ArrayLayout,
    EvaluationContext, LinkGeometry, PathLoss, Placement,
};
use fdris::signal::{ModulationScheme, PhaseAlphabet, ReflectionCodes};
use fdris::{EvalMode, Scenario};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn link_2x2() -> RawLink {
    RawLink {
        rows: 2,
        cols: 2,
        spacing: common::C / (2.0 * 28e9),
        carrier: 28e9,
        bs: (30.0, 90f64.to_radians(), 0.0),
        user: (150.0, 90f64.to_radians(), 30f64.to_radians()),
        tx_watts: 1.0,
        path_loss: true,
    }
}

fn geometry_of(link: &RawLink) -> LinkGeometry {
    LinkGeometry::new(
        ArrayLayout::new(link.rows, link.cols, link.spacing).unwrap(),
        Placement::new(link.bs.0, link.bs.1, link.bs.2).unwrap(),
        Placement::new(link.user.0, link.user.1, link.user.2).unwrap(),
        link.carrier,
    )
    .unwrap()
}

#[test]
fn gain_matches_brute_force_sum() {
    let link = link_2x2();
    let geometry = geometry_of(&link);
    let alphabet = PhaseAlphabet::new(2).unwrap();
    let pair = build_channels_watts(&geometry, link.tx_watts, 1e-14, PathLoss::Model).unwrap();
    let coeffs = integrated_table(2, 1, 200_000);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..25 {
        let rows: Vec<Vec<u32>> = (0..4).map(|_| (0..2).map(|_| rng.random_range(0..4)).collect()).collect();
        let f0 = rng.random_range(1e5..2.8e5);
        let t = rng.random_range(0.0..2e-6);
        let scheme = ModulationScheme::new(2, f0, 1).unwrap();
        let codes = ReflectionCodes::from_flat(4, 2, rows.concat()).unwrap();
        let theta = build_theta(&codes, &alphabet, &scheme, &geometry, &EvaluationContext { obs_time: t }).unwrap();
        let got = effective_gain(&pair, &theta).unwrap();
        let expect = brute_force_gain(&link, &rows, 4, &coeffs, 1, f0, t);
        // the reference skips the cycle reduction, so its phase carries ~1e-11 rad of rounding
        assert!((got - expect).norm() <= 1e-8 * expect.norm().max(1e-9), "{got} vs {expect}");
    }
}

#[test]
fn scenario_gain_agrees_with_free_functions() {
    let cfg = ScenarioConfig::default();
    let scn = cfg.scenario().unwrap();
    let geometry = cfg.link_geometry().unwrap();
    let alphabet = cfg.alphabet().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let flat = (0..700).map(|_| rng.random_range(0..4)).collect();
    let codes = ReflectionCodes::from_flat(100, 7, flat).unwrap();
    let f0 = 1.7e5;
    let t = cfg.obs_time();
    let theta = build_theta(&codes, &alphabet, &cfg.scheme(f0).unwrap(), &geometry, &EvaluationContext { obs_time: t })
        .unwrap();
    let pair = build_channels(&geometry, 30.0, -110.0).unwrap();
    let a = effective_gain(&pair, &theta).unwrap();
    let b = scn.gain_at(&codes, f0, t);
    assert!((a - b).norm() <= 1e-12 * a.norm());
}

#[test]
fn gain_is_bounded_by_coherent_sum() {
    let cfg = ScenarioConfig::default();
    let scn = cfg.scenario().unwrap();
    let bound: f64 = scn.channels().cascade().iter().map(|c| c.norm()).sum();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..50 {
        let flat = (0..700).map(|_| rng.random_range(0..4)).collect();
        let codes = ReflectionCodes::from_flat(100, 7, flat).unwrap();
        let g = scn.gain_at(&codes, rng.random_range(1e5..2.8e5), rng.random_range(0.0..1e-5));
        assert!(g.norm() <= bound * (1.0 + 1e-12));
    }
}

#[test]
fn power_scaling_is_exact() {
    let mut cfg = ScenarioConfig::default();
    let codes = ReflectionCodes::constant(100, 7, 1);
    let base = cfg.scenario().unwrap().received_power(&codes, 2e5);
    cfg.power.tx_dbm += 10.0;
    let louder = cfg.scenario().unwrap().received_power(&codes, 2e5);
    assert!((louder / base - 10.0).abs() < 1e-9);
}

#[test]
fn time_averaging_of_static_surface_equals_snapshot() {
    let mut cfg = ScenarioConfig::default();
    cfg.modulation.slots = 1;
    let snap = cfg.scenario().unwrap();
    let geometry = cfg.link_geometry().unwrap();
    let avg = Scenario::new(
        geometry,
        cfg.alphabet().unwrap(),
        1,
        3,
        dbm_to_watts(30.0),
        dbm_to_watts(-110.0),
        (1e5, 2.8e5),
        EvalMode::TimeAveraged { samples: 64 },
    )
    .unwrap();
    let codes = ReflectionCodes::constant(100, 1, 2);
    let (a, b) = (snap.rate(&codes, 1.3e5), avg.rate(&codes, 1.3e5));
    assert!((a - b).abs() < 1e-12);
}

#[test]
fn too_few_averaging_samples_rejected() {
    let cfg = ScenarioConfig::default();
    let geometry = cfg.link_geometry().unwrap();
    let r = Scenario::new(
        geometry,
        cfg.alphabet().unwrap(),
        7,
        3,
        1.0,
        1e-14,
        (1e5, 2.8e5),
        EvalMode::TimeAveraged { samples: 8 },
    );
    assert!(r.is_err());
}

#[test]
fn code_shape_errors_are_reported() {
    let scn = ScenarioConfig::default().scenario().unwrap();
    assert!(scn.check_codes(&ReflectionCodes::constant(99, 7, 0)).is_err());
    assert!(scn.check_codes(&ReflectionCodes::constant(100, 6, 0)).is_err());
    assert!(scn.check_codes(&ReflectionCodes::constant(100, 7, 4)).is_err());
    assert!(scn.check_codes(&ReflectionCodes::constant(100, 7, 3)).is_ok());
}

proptest! {
    #[test]
    fn dbm_round_trip(dbm in -150.0f64..60.0) {
        prop_assert!((watts_to_dbm(dbm_to_watts(dbm)) - dbm).abs() < 1e-9);
    }

    #[test]
    fn global_rotation_keeps_power(steps in 0u32..4, seed in 0u64..1000, f0 in 1e5f64..2.8e5) {
        let cfg = ScenarioConfig { geometry: fdris::config::GeometryBlock { rows: 3, cols: 4, ..Default::default() }, ..Default::default() };
        let scn = cfg.scenario().unwrap();
        let alphabet = cfg.alphabet().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let flat = (0..84).map(|_| rng.random_range(0..4)).collect();
        let codes = ReflectionCodes::from_flat(12, 7, flat).unwrap();
        let a = scn.received_power(&codes, f0);
        let b = scn.received_power(&codes.rotated(steps, &alphabet), f0);
        prop_assert!((a - b).abs() <= 1e-10 * a.max(1e-300));
    }

    #[test]
    fn unit_cascade_without_path_loss(d in 10.0f64..400.0, az in -1.5f64..1.5) {
        let layout = ArrayLayout::new(3, 3, 0.005).unwrap();
        let g = LinkGeometry::new(layout, Placement::new(30.0, 1.0, 0.2).unwrap(), Placement::new(d, 1.2, az).unwrap(), 28e9).unwrap();
        let pair = build_channels_watts(&g, 4.0, 1.0, PathLoss::Ignore).unwrap();
        for c in pair.cascade() {
            prop_assert!((c.norm() - 2.0).abs() < 1e-12);
        }
    }
}
