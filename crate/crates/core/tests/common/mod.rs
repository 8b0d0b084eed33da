//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls into the crate's model code paths: coefficients come
//! from numerically integrating the square wave, and gains are direct sums
//! over array positions, slots and harmonic orders.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;

pub const C: f64 = 299_792_458.0;

/// Duty-cycled square wave with period `t0` and on-time `tau`: 1 on `(g·T0, g·T0 + τ]`, else 0.
pub fn square_wave(t: f64, t0: f64, tau: f64) -> f64 {
    let g = (t / t0).floor();
    let local = t - g * t0;
    // t = g·T0 closes the previous period's off branch
    if local > 0.0 && local <= tau {
        1.0
    } else {
        0.0
    }
}

/// `(1/T0) ∫_0^{T0} V(t - (l-1)τ) e^{-j2π z f0 t} dt` by the composite
/// trapezoid rule with at least `points` nodes over the period.
///
/// The period is split at slot boundaries so the integrand is smooth on each
/// piece; the indicator value of a piece is read at its midpoint.
pub fn fourier_integral(l: usize, z: i64, slots: usize, points: usize) -> Complex64 {
    let t0 = 1.0;
    let tau = t0 / slots as f64;
    let per_piece = points.div_ceil(slots).max(2);
    let mut total = Complex64::new(0.0, 0.0);
    for piece in 0..slots {
        let (a, b) = (piece as f64 * tau, (piece + 1) as f64 * tau);
        let mid = 0.5 * (a + b);
        let v = square_wave(mid - (l as f64 - 1.0) * tau, t0, tau);
        if v == 0.0 {
            continue;
        }
        let h = (b - a) / per_piece as f64;
        let f = |t: f64| Complex64::from_polar(1.0, -2.0 * PI * z as f64 * t / t0);
        let mut acc = 0.5 * (f(a) + f(b));
        for k in 1..per_piece {
            acc += f(a + k as f64 * h);
        }
        total += v * acc * h;
    }
    total / t0
}

/// Table `coeffs[l][z + Z]` from numerical integration.
pub fn integrated_table(slots: usize, zmax: usize, points: usize) -> Vec<Vec<Complex64>> {
    (1..=slots)
        .map(|l| {
            (-(zmax as i64)..=zmax as i64)
                .map(|z| fourier_integral(l, z, slots, points))
                .collect()
        })
        .collect()
}

pub fn phase_value(idx: u32, q: usize) -> Complex64 {
    Complex64::from_polar(1.0, (idx as f64 + 1.0) * 2.0 * PI / q as f64)
}

pub fn path_loss_amp(d: f64) -> f64 {
    10f64.powf((-30.0 - 22.0 * d.log10()) / 20.0)
}

/// Plain-number description of a link for the brute-force gain.
#[derive(Clone, Copy, Debug)]
pub struct RawLink {
    pub rows: usize,
    pub cols: usize,
    pub spacing: f64,
    pub carrier: f64,
    pub bs: (f64, f64, f64),
    pub user: (f64, f64, f64),
    pub tx_watts: f64,
    pub path_loss: bool,
}

fn gamma(m: usize, n: usize, d: f64, p: (f64, f64, f64)) -> f64 {
    (m as f64 - 1.0) * d * p.1.sin() * p.2.cos() + (n as f64 - 1.0) * d * p.1.sin() * p.2.sin()
}

/// `Σ_{m,n} conj(h_br) h_ru Σ_z Σ_l Υ^l a_lz e^{j2π z f0 (t - d_ru^{mn}/c)}` evaluated term by term.
#[allow(clippy::too_many_arguments)]
pub fn brute_force_gain(
    link: &RawLink,
    codes: &[Vec<u32>],
    q: usize,
    coeffs: &[Vec<Complex64>],
    zmax: usize,
    f0: f64,
    t: f64,
) -> Complex64 {
    let (eta_br, eta_ru) = if link.path_loss {
        (path_loss_amp(link.bs.0), path_loss_amp(link.user.0))
    } else {
        (1.0, 1.0)
    };
    let mut total = Complex64::new(0.0, 0.0);
    for m in 1..=link.rows {
        for n in 1..=link.cols {
            let s = (m - 1) * link.cols + (n - 1);
            let d_br = link.bs.0 - gamma(m, n, link.spacing, link.bs);
            let d_ru = link.user.0 - gamma(m, n, link.spacing, link.user);
            let h_br = link.tx_watts.sqrt() * eta_br * Complex64::from_polar(1.0, -2.0 * PI * link.carrier * d_br / C);
            let h_ru = eta_ru * Complex64::from_polar(1.0, -2.0 * PI * link.carrier * d_ru / C);
            let mut theta = Complex64::new(0.0, 0.0);
            for (zi, z) in (-(zmax as i64)..=zmax as i64).enumerate() {
                for (l, &idx) in codes[s].iter().enumerate() {
                    theta += phase_value(idx, q)
                        * coeffs[l][zi]
                        * Complex64::from_polar(1.0, 2.0 * PI * z as f64 * f0 * (t - d_ru / C));
                }
            }
            total += h_br.conj() * theta * h_ru;
        }
    }
    total
}

/// All `q^len` index vectors in lexicographic order.
pub fn for_each_assignment(len: usize, q: usize, mut f: impl FnMut(&[u32])) {
    let mut idx = vec![0u32; len];
    loop {
        f(&idx);
        let mut k = 0;
        loop {
            if k == len {
                return;
            }
            idx[k] += 1;
            if (idx[k] as usize) < q {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Conventional static surface: `log2(1 + |Σ conj(h_br) φ h_ru|²/σ²)` with one phase index per element.
///
/// Carrier phases are reduced to a fraction of a cycle before scaling, as a
/// careful closed-form implementation would do at these path lengths.
pub fn static_ris_rate(link: &RawLink, idx: &[u32], q: usize, noise: f64) -> f64 {
    let (eta_br, eta_ru) = if link.path_loss {
        (path_loss_amp(link.bs.0), path_loss_amp(link.user.0))
    } else {
        (1.0, 1.0)
    };
    let cycles = |d: f64| (link.carrier * d / C).fract();
    let mut total = Complex64::new(0.0, 0.0);
    for m in 1..=link.rows {
        for n in 1..=link.cols {
            let s = (m - 1) * link.cols + (n - 1);
            let d_br = link.bs.0 - gamma(m, n, link.spacing, link.bs);
            let d_ru = link.user.0 - gamma(m, n, link.spacing, link.user);
            // conj(h_br)·h_ru has phase 2π f_c (d_br - d_ru)/c
            let phase = 2.0 * PI * (cycles(d_br) - cycles(d_ru));
            total += link.tx_watts.sqrt() * eta_br * eta_ru * Complex64::from_polar(1.0, phase) * phase_value(idx[s], q);
        }
    }
    (1.0 + total.norm_sqr() / noise).log2()
}
