//! Distance–azimuth beam patterns, the exact quantized static-surface optimum,
//! and rate helpers.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    build_channels_watts, ChannelPair, EvaluationContext, LinkGeometry, PathLoss, Placement,
};
use crate::signal::{element_code_spectrum, FourierTable, ModulationScheme, PhaseAlphabet, ReflectionCodes};

/// `log2(1 + |gain|²/σ²)`.
pub fn rate_from_gain(gain: Complex64, noise_power: f64) -> f64 {
    (1.0 + gain.norm_sqr() / noise_power).log2()
}

/// Sampling of the user plane: distances in meters, azimuths in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub distances: Vec<f64>,
    pub azimuths: Vec<f64>,
    /// Fixed elevation in radians.
    pub elevation: f64,
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

impl GridSpec {
    pub fn linear(
        (d_min, d_max, d_points): (f64, f64, usize),
        (az_min_deg, az_max_deg, az_points): (f64, f64, usize),
        elevation_deg: f64,
    ) -> Self {
        Self {
            distances: linspace(d_min, d_max, d_points),
            azimuths: linspace(az_min_deg, az_max_deg, az_points)
                .into_iter()
                .map(f64::to_radians)
                .collect(),
            elevation: elevation_deg.to_radians(),
        }
    }
}

impl Default for GridSpec {
    /// 50–300 m in 101 steps by −90°…90° in 181 steps, elevation 90°.
    fn default() -> Self {
        Self::linear((50.0, 300.0, 101), (-90.0, 90.0, 181), 90.0)
    }
}

/// Received power over a distance × azimuth grid, distance-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternGrid {
    pub distances: Vec<f64>,
    pub azimuths: Vec<f64>,
    pub elevation: f64,
    pub values: Vec<f64>,
}

#[derive(Serialize)]
struct PatternJson<'a> {
    distances: &'a [f64],
    azimuths_deg: Vec<f64>,
    elevation_deg: f64,
    values: Vec<&'a [f64]>,
}

impl PatternGrid {
    pub fn value(&self, i_dist: usize, i_az: usize) -> f64 {
        self.values[i_dist * self.azimuths.len() + i_az]
    }

    pub fn row(&self, i_dist: usize) -> &[f64] {
        let n = self.azimuths.len();
        &self.values[i_dist * n..(i_dist + 1) * n]
    }

    /// Largest cell value with its `(distance, azimuth)` indices.
    pub fn peak(&self) -> (f64, usize, usize) {
        let n = self.azimuths.len();
        let (i, v) = self
            .values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        (v, i / n, i % n)
    }

    /// Value at the cell nearest to `(distance, azimuth)`.
    pub fn nearest(&self, distance: f64, azimuth: f64) -> f64 {
        let nearest = |axis: &[f64], x: f64| {
            axis.iter()
                .enumerate()
                .min_by(|a, b| (a.1 - x).abs().total_cmp(&(b.1 - x).abs()))
                .map_or(0, |(i, _)| i)
        };
        self.value(nearest(&self.distances, distance), nearest(&self.azimuths, azimuth))
    }

    /// CSV with header `distance,azimuth,power`; azimuth in degrees.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("distance,azimuth,power\n");
        for (i, d) in self.distances.iter().enumerate() {
            for (j, az) in self.azimuths.iter().enumerate() {
                let _ = writeln!(out, "{},{},{}", d, az.to_degrees(), self.value(i, j));
            }
        }
        out
    }

    /// JSON object with both axes and the row-major value matrix.
    pub fn to_json(&self) -> Result<String> {
        let n = self.azimuths.len().max(1);
        let json = PatternJson {
            distances: &self.distances,
            azimuths_deg: self.azimuths.iter().map(|a| a.to_degrees()).collect(),
            elevation_deg: self.elevation.to_degrees(),
            values: self.values.chunks(n).collect(),
        };
        Ok(serde_json::to_string_pretty(&json)?)
    }
}

/// Received power `|h_brᴴ Θ h_ru|²` with the user swept over `grid`.
///
/// The harmonic phases use the fixed observation instant in `ctx`, so the
/// pattern of a time-modulated surface varies with distance while a static
/// one does not. With `include_path_loss = false` both hop attenuations are
/// one and only `√P` scales the channel.
#[allow(clippy::too_many_arguments)]
pub fn beam_pattern(
    codes: &ReflectionCodes,
    alphabet: &PhaseAlphabet,
    scheme: &ModulationScheme,
    geometry: &LinkGeometry,
    grid: &GridSpec,
    include_path_loss: bool,
    tx_power: f64,
    ctx: &EvaluationContext,
) -> Result<PatternGrid> {
    if grid.distances.is_empty() || grid.azimuths.is_empty() {
        return Err(Error::domain("pattern grid must be non-empty"));
    }
    if codes.elements() != geometry.layout.elements() || codes.slots() != scheme.slots {
        return Err(Error::Dimension {
            what: "code matrix size",
            expected: geometry.layout.elements() * scheme.slots,
            got: codes.elements() * codes.slots(),
        });
    }
    let table = FourierTable::cached(scheme.slots, scheme.truncation)?;
    let spectra: Vec<Vec<Complex64>> = (0..codes.elements())
        .map(|s| element_code_spectrum(codes.row(s), alphabet, &table))
        .collect::<Result<_>>()?;
    let path_loss = if include_path_loss { PathLoss::Model } else { PathLoss::Ignore };

    let cells: Vec<(f64, f64)> = grid
        .distances
        .iter()
        .flat_map(|&d| grid.azimuths.iter().map(move |&az| (d, az)))
        .collect();
    let values = cells
        .par_iter()
        .map(|&(d, az)| {
            let user = Placement::new(d, grid.elevation, az)?;
            let g = geometry.with_user(user);
            let pair = build_channels_watts(&g, tx_power, 1.0, path_loss)?;
            let zmax = scheme.truncation as i32;
            let gain: Complex64 = g
                .user_delays()
                .iter()
                .enumerate()
                .map(|(s, delay)| {
                    let base = Complex64::from_polar(1.0, 2.0 * PI * (scheme.mod_freq * (ctx.obs_time - delay)).fract());
                    let theta: Complex64 = (-zmax..=zmax)
                        .zip(&spectra[s])
                        .map(|(z, c)| c * base.powi(z))
                        .sum();
                    pair.h_br[s].conj() * theta * pair.h_ru[s]
                })
                .sum();
            Ok(gain.norm_sqr())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(PatternGrid {
        distances: grid.distances.clone(),
        azimuths: grid.azimuths.clone(),
        elevation: grid.elevation,
        values,
    })
}

/// Optimal static (single-slot) quantized assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct RisOracle {
    /// `S × 1` code matrix.
    pub codes: ReflectionCodes,
    /// Selected phase per element, radians.
    pub phases: Vec<f64>,
    pub gain: Complex64,
}

fn static_gain(cascade: &[Complex64], idx: &[u32], alphabet: &PhaseAlphabet) -> Complex64 {
    cascade.iter().zip(idx).map(|(u, &q)| u * alphabet.value(q)).sum()
}

/// Exact maximizer of `|Σ_s u_s φ_{q_s}|` over per-element alphabet choices.
///
/// At the optimum every element's term is the alphabet rotation closest to the
/// direction of the total, so the optimum is among the assignments obtained by
/// rounding to a common direction `ψ`. Those change only at `S·Q` breakpoints;
/// sweeping `ψ` once around the circle and updating the sum incrementally
/// visits every one of them.
pub fn ris_quantized_oracle(pair: &ChannelPair, alphabet: &PhaseAlphabet) -> RisOracle {
    let cascade = pair.cascade();
    let s_count = cascade.len();
    let q = alphabet.size();
    let step = 2.0 * PI / q as f64;
    let tau = 2.0 * PI;

    // rounding k = round((ψ - arg u_s)/step) gives phase index k ≡ alphabet idx k-1
    let assign = |psi: f64| -> Vec<u32> {
        cascade
            .iter()
            .map(|u| {
                let k = ((psi - u.arg()) / step).round() as i64;
                (k - 1).rem_euclid(q as i64) as u32
            })
            .collect()
    };

    let mut events: Vec<(f64, usize)> = Vec::with_capacity(s_count * q);
    for (s, u) in cascade.iter().enumerate() {
        for k in 0..q {
            let at = (u.arg() + (k as f64 + 0.5) * step).rem_euclid(tau);
            events.push((at, s));
        }
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let start = match (events.first(), events.last()) {
        (Some(first), Some(last)) => (0.5 * (last.0 + first.0 + tau)).rem_euclid(tau),
        _ => 0.0,
    };
    let mut idx = assign(start);
    let mut sum = static_gain(&cascade, &idx, alphabet);
    let mut best_norm = sum.norm_sqr();
    let mut best_after: Option<usize> = None;
    for (i, &(_, s)) in events.iter().enumerate() {
        let new = (idx[s] + 1) % q as u32;
        sum += cascade[s] * (alphabet.value(new) - alphabet.value(idx[s]));
        idx[s] = new;
        let n = sum.norm_sqr();
        if n > best_norm {
            best_norm = n;
            best_after = Some(i);
        }
    }
    // replay exactly instead of trusting the running sum
    let mut idx = assign(start);
    if let Some(last) = best_after {
        for &(_, s) in &events[..=last] {
            idx[s] = (idx[s] + 1) % q as u32;
        }
    }
    let gain = static_gain(&cascade, &idx, alphabet);
    RisOracle {
        phases: idx.iter().map(|&q| alphabet.angle(q)).collect(),
        codes: ReflectionCodes::from_flat(s_count, 1, idx).expect("one slot per element"),
        gain,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_values() {
        let s = 1e-14;
        assert_eq!(rate_from_gain(Complex64::new(0.0, 0.0), s), 0.0);
        assert!((rate_from_gain(Complex64::new((3.0 * s).sqrt(), 0.0), s) - 2.0).abs() < 1e-12);
        assert!((rate_from_gain(Complex64::new(0.0, (1023.0 * s).sqrt()), s) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn default_grid_shape() {
        let g = GridSpec::default();
        assert_eq!(g.distances.len(), 101);
        assert_eq!(g.azimuths.len(), 181);
        assert!((g.azimuths[0] + PI / 2.0).abs() < 1e-15);
        assert_eq!(g.distances[100], 300.0);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let p = PatternGrid {
            distances: vec![1.0, 2.0],
            azimuths: vec![0.0],
            elevation: 0.0,
            values: vec![3.0, 4.0],
        };
        assert_eq!(p.to_csv(), "distance,azimuth,power\n1,0,3\n2,0,4\n");
        assert_eq!(p.peak(), (4.0, 1, 0));
        assert!(p.to_json().unwrap().contains("\"values\""));
    }
}
