use fdris::ceo::{self, sample_candidates, CategoricalTilting, CeoConfig, CeoState, GaussianTilting};
use fdris::config::ScenarioConfig;
use fdris::ga::{ga_run, GaConfig};
use fdris::geometry::ChannelPair;
use fdris::pattern::ris_quantized_oracle;
use fdris::signal::ReflectionCodes;
use fdris::Scenario;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small(rows: usize, cols: usize, slots: usize) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::default();
    cfg.geometry.rows = rows;
    cfg.geometry.cols = cols;
    cfg.modulation.slots = slots;
    cfg
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn categorical_sampling_follows_probabilities() {
    let config = CeoConfig { pop_size: 100_000, ..CeoConfig::default() };
    let mut state = CeoState::initial(2, 1, 4, &config);
    let rows = vec![vec![0.1, 0.2, 0.3, 0.4], vec![0.7, 0.0, 0.05, 0.25]];
    state.cat = CategoricalTilting::from_rows(&rows).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let cands = sample_candidates(&state, &config, &mut rng);
    for (p, row) in rows.iter().enumerate() {
        let mut counts = [0usize; 4];
        for c in &cands {
            counts[c.codes.flat()[p] as usize] += 1;
        }
        for q in 0..4 {
            let freq = counts[q] as f64 / cands.len() as f64;
            assert!((freq - row[q]).abs() < 0.01, "row {p} symbol {q}: {freq} vs {}", row[q]);
        }
        assert_eq!(counts[1] == 0, row[1] == 0.0);
    }
}

#[test]
fn sampled_frequencies_respect_bounds() {
    let config = CeoConfig { pop_size: 5000, ..CeoConfig::default() };
    let mut state = CeoState::initial(1, 1, 4, &config);
    // mean far outside the band forces the clamp fallback
    state.gauss = GaussianTilting { mean: 9e5, std: 10.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let cands = sample_candidates(&state, &config, &mut rng);
    assert!(cands.iter().all(|c| c.mod_freq == 2.8e5));
    state.gauss = GaussianTilting { mean: 1.1e5, std: 1e5 };
    let cands = sample_candidates(&state, &config, &mut rng);
    assert!(cands.iter().all(|c| (1e5..=2.8e5).contains(&c.mod_freq)));
}

#[test]
fn ceo_single_element_finds_best_phase() {
    let cfg = small(1, 1, 1);
    let scn = cfg.scenario().unwrap();
    let best = (0..4)
        .map(|q| scn.rate(&ReflectionCodes::constant(1, 1, q), 2e5))
        .fold(f64::NEG_INFINITY, f64::max);
    for seed in 0..5 {
        let state = ceo::run(&scn, &CeoConfig { rng_seed: seed, ..CeoConfig::default() }).unwrap();
        assert!((state.best_rate() - best).abs() < 1e-12);
    }
}

#[test]
fn ceo_static_surface_reaches_oracle() {
    let cfg = small(4, 4, 1);
    let scn = cfg.scenario().unwrap();
    let oracle = ris_quantized_oracle(scn.channels(), scn.alphabet());
    let target = scn.rate(&oracle.codes, 2e5);
    let state = ceo::run(&scn, &CeoConfig { rng_seed: 4, ..CeoConfig::default() }).unwrap();
    assert!(state.best_rate() >= target * (1.0 - 1e-3), "{} vs {target}", state.best_rate());
    assert!(state.best_rate() <= target * (1.0 + 1e-12));
}

#[test]
fn ceo_is_deterministic_across_thread_counts() {
    let scn = small(3, 3, 7).scenario().unwrap();
    let config = CeoConfig { rng_seed: 9, max_iters: 40, ..CeoConfig::default() };
    let a = in_pool(1, || ceo::run(&scn, &config).unwrap());
    let b = in_pool(4, || ceo::run(&scn, &config).unwrap());
    assert_eq!(a.best, b.best);
    assert_eq!(a.history, b.history);
    assert_eq!(a.cat, b.cat);
}

#[test]
fn ceo_history_is_monotone_and_bounded() {
    let scn = small(3, 3, 7).scenario().unwrap();
    let config = CeoConfig { rng_seed: 1, max_iters: 25, ..CeoConfig::default() };
    let state = ceo::run(&scn, &config).unwrap();
    assert!(state.iter <= 25 && state.history.len() == state.iter);
    assert!(state.history.windows(2).all(|w| w[1].best_rate >= w[0].best_rate));
    assert!(state.history.iter().all(|h| h.mean_elite_rate <= h.best_rate + 1e-12));
}

#[test]
fn ceo_rejects_wide_alphabets() {
    let mut cfg = small(2, 2, 1);
    cfg.modulation.bits = 9;
    let scn = cfg.scenario().unwrap();
    assert!(ceo::run(&scn, &CeoConfig::default()).is_err());
    assert!(ga_run(&scn, &GaConfig::default()).is_err());
}

#[test]
fn ga_single_element_finds_best_phase() {
    let scn = small(1, 1, 1).scenario().unwrap();
    let best = (0..4)
        .map(|q| scn.rate(&ReflectionCodes::constant(1, 1, q), 2e5))
        .fold(f64::NEG_INFINITY, f64::max);
    let out = ga_run(&scn, &GaConfig { generations: 20, rng_seed: 2, ..GaConfig::default() }).unwrap();
    assert!((out.best.objective - best).abs() < 1e-12);
}

#[test]
fn ga_full_elitism_freezes_flat_landscape() {
    let cfg = small(2, 2, 2);
    let geometry = cfg.link_geometry().unwrap();
    let zero = ChannelPair {
        h_br: vec![Complex64::new(0.0, 0.0); 4],
        h_ru: vec![Complex64::new(1.0, 0.0); 4],
        tx_power: 1.0,
        noise_power: 1.0,
    };
    let scn = Scenario::with_channels(
        geometry,
        zero,
        cfg.alphabet().unwrap(),
        2,
        3,
        (1e5, 2.8e5),
        Scenario::default_eval(&geometry),
    )
    .unwrap();
    let base = GaConfig { pop_size: 12, elitism_count: 12, rng_seed: 5, ..GaConfig::default() };
    let start = ga_run(&scn, &GaConfig { generations: 0, ..base.clone() }).unwrap();
    let later = ga_run(&scn, &GaConfig { generations: 30, ..base }).unwrap();
    assert!(start.population.iter().all(|c| c.objective == 0.0));
    assert_eq!(start.population, later.population);
}

#[test]
fn ga_is_deterministic_and_feasible() {
    let scn = small(2, 3, 7).scenario().unwrap();
    let config = GaConfig { generations: 30, rng_seed: 3, ..GaConfig::default() };
    let a = in_pool(1, || ga_run(&scn, &config).unwrap());
    let b = in_pool(3, || ga_run(&scn, &config).unwrap());
    assert_eq!(a.best, b.best);
    assert_eq!(a.population, b.population);
    for c in &a.population {
        assert!(scn.check_codes(&c.codes).is_ok());
        assert!((1e5..=2.8e5).contains(&c.mod_freq));
    }
    assert!(a.history.windows(2).all(|w| w[1].best_rate >= w[0].best_rate));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn elite_count_is_ceiling(k in 1usize..2000, frac in 0.001f64..0.999) {
        let c = CeoConfig { pop_size: k, elite_frac: frac, ..CeoConfig::default() };
        let n = c.elite_count();
        prop_assert!(n >= 1 && n <= k);
        prop_assert!(n as f64 >= frac * k as f64 - 1e-9);
        prop_assert!((n as f64 - 1.0) < frac * k as f64);
    }
}
