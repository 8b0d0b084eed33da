mod common;

use common::{integrated_table, phase_value};
use fdris::signal::{
    build_fourier_table, element_code_spectrum, equivalent_theta, fourier_coefficient, harmonic_phases,
    PhaseAlphabet,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn first_harmonic_matches_numerical_integral() {
    let got = fourier_coefficient(1, 1, 7).unwrap();
    let oracle = common::fourier_integral(1, 1, 7, 1_000_000);
    assert!((got - oracle).norm() < 1e-8, "{got} vs {oracle}");
}

#[test]
fn small_table_matches_numerical_integral() {
    let table = build_fourier_table(4, 2).unwrap();
    let oracle = integrated_table(4, 2, 1_000_000);
    for (l, row) in oracle.iter().enumerate() {
        for (col, a) in row.iter().enumerate() {
            assert!((table.at(l, col) - a).norm() < 1e-8);
        }
    }
}

#[test]
fn spectrum_matches_double_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let alphabet = PhaseAlphabet::new(2).unwrap();
    let table = build_fourier_table(5, 2).unwrap();
    let oracle = integrated_table(5, 2, 200_000);
    for _ in 0..20 {
        let row: Vec<u32> = (0..5).map(|_| rng.random_range(0..4)).collect();
        let c = element_code_spectrum(&row, &alphabet, &table).unwrap();
        for zi in 0..5 {
            let mut expect = Complex64::new(0.0, 0.0);
            for l in 0..5 {
                expect += phase_value(row[l], 4) * oracle[l][zi];
            }
            assert!((c[zi] - expect).norm() < 1e-9);
        }
    }
}

#[test]
fn theta_matches_triple_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let alphabet = PhaseAlphabet::new(2).unwrap();
    let table = build_fourier_table(7, 3).unwrap();
    let oracle = integrated_table(7, 3, 200_000);
    for _ in 0..20 {
        let row: Vec<u32> = (0..7).map(|_| rng.random_range(0..4)).collect();
        let f0 = rng.random_range(1e5..2.8e5);
        let t = 150.0 / common::C;
        let d_mn = 150.0 - rng.random_range(0.0..0.05);
        let b = harmonic_phases(f0, t - d_mn / common::C, 3);
        let theta = equivalent_theta(&row, &alphabet, &table, &b).unwrap();
        let mut expect = Complex64::new(0.0, 0.0);
        for (zi, z) in (-3i64..=3).enumerate() {
            for l in 0..7 {
                expect += phase_value(row[l], 4)
                    * oracle[l][zi]
                    * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * z as f64 * f0 * (t - d_mn / common::C));
            }
        }
        assert!((theta - expect).norm() < 1e-9);
    }
}

#[test]
fn single_slot_spectrum_is_the_static_phase() {
    let alphabet = PhaseAlphabet::new(3).unwrap();
    let table = build_fourier_table(1, 4).unwrap();
    for q in 0..8 {
        let c = element_code_spectrum(&[q], &alphabet, &table).unwrap();
        for (i, v) in c.iter().enumerate() {
            if i == 4 {
                assert_eq!(*v, alphabet.value(q));
            } else {
                assert_eq!(*v, Complex64::new(0.0, 0.0));
            }
        }
    }
}

proptest! {
    #[test]
    fn coefficients_are_hermitian_in_order(slots in 1usize..12, z in 0i64..40, l_seed in 0usize..100) {
        let l = 1 + l_seed % slots;
        let p = fourier_coefficient(l, z, slots).unwrap();
        let m = fourier_coefficient(l, -z, slots).unwrap();
        prop_assert!((m - p.conj()).norm() < 1e-15);
    }

    #[test]
    fn center_coefficient_exact(slots in 1usize..64, l_seed in 0usize..1000) {
        let l = 1 + l_seed % slots;
        prop_assert_eq!(fourier_coefficient(l, 0, slots).unwrap(), Complex64::new(1.0 / slots as f64, 0.0));
    }

    #[test]
    fn truncated_power_never_exceeds_one(row in proptest::collection::vec(0u32..4, 7), zmax in 0usize..60) {
        let alphabet = PhaseAlphabet::new(2).unwrap();
        let table = build_fourier_table(7, zmax).unwrap();
        let power: f64 = element_code_spectrum(&row, &alphabet, &table).unwrap().iter().map(|c| c.norm_sqr()).sum();
        prop_assert!(power <= 1.0 + 1e-12);
        prop_assert!(power >= 0.0);
    }

    #[test]
    fn constant_code_collapses_in_band(q in 0u32..4, slots in 2usize..10) {
        let alphabet = PhaseAlphabet::new(2).unwrap();
        let zmax = slots - 1;
        let table = build_fourier_table(slots, zmax).unwrap();
        let c = element_code_spectrum(&vec![q; slots], &alphabet, &table).unwrap();
        for (i, v) in c.iter().enumerate() {
            let expect = if i == zmax { alphabet.value(q) } else { Complex64::new(0.0, 0.0) };
            prop_assert!((v - expect).norm() < 1e-14);
        }
    }
}
