//! A compiled optimization instance: channels, alphabet and modulation table
//! fixed, with codes and modulation frequency left free.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{build_channels_watts, ChannelPair, EvaluationContext, LinkGeometry, PathLoss};
use crate::signal::{FourierTable, PhaseAlphabet, ReflectionCodes};

/// Minimum number of samples for the period-averaged objective.
pub const MIN_AVERAGE_SAMPLES: usize = 64;

/// How the time-varying received power is turned into a single objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum EvalMode {
    /// Instantaneous power at `obs_time` seconds.
    Snapshot { obs_time: f64 },
    /// Mean power over one modulation period (uniform periodic trapezoid rule).
    TimeAveraged { samples: usize },
}

/// One point of the search space `{γ, f0}` with its objective.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub codes: ReflectionCodes,
    /// Modulation frequency in Hz.
    pub mod_freq: f64,
    /// Achievable rate in bits/s/Hz; `NEG_INFINITY` until evaluated.
    pub objective: f64,
}

impl Candidate {
    pub fn new(codes: ReflectionCodes, mod_freq: f64) -> Self {
        Self { codes, mod_freq, objective: f64::NEG_INFINITY }
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    alphabet: PhaseAlphabet,
    table: Arc<FourierTable>,
    geometry: LinkGeometry,
    channels: ChannelPair,
    cascade: Vec<Complex64>,
    delays: Vec<f64>,
    eval: EvalMode,
    freq_bounds: (f64, f64),
}

impl Scenario {
    /// Build with path loss applied; powers in watts.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        geometry: LinkGeometry,
        alphabet: PhaseAlphabet,
        slots: usize,
        truncation: usize,
        tx_power: f64,
        noise_power: f64,
        freq_bounds: (f64, f64),
        eval: EvalMode,
    ) -> Result<Self> {
        let channels = build_channels_watts(&geometry, tx_power, noise_power, PathLoss::Model)?;
        Self::with_channels(geometry, channels, alphabet, slots, truncation, freq_bounds, eval)
    }

    /// Build around precomputed channels (e.g. with path loss ignored).
    pub fn with_channels(
        geometry: LinkGeometry,
        channels: ChannelPair,
        alphabet: PhaseAlphabet,
        slots: usize,
        truncation: usize,
        freq_bounds: (f64, f64),
        eval: EvalMode,
    ) -> Result<Self> {
        let (lo, hi) = freq_bounds;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::domain(format!("invalid modulation frequency bounds [{lo}, {hi}]")));
        }
        if channels.elements() != geometry.layout.elements() {
            return Err(Error::Dimension {
                what: "channel length",
                expected: geometry.layout.elements(),
                got: channels.elements(),
            });
        }
        match eval {
            EvalMode::Snapshot { obs_time } if !obs_time.is_finite() => {
                return Err(Error::domain("observation time must be finite"));
            }
            EvalMode::TimeAveraged { samples } if samples < MIN_AVERAGE_SAMPLES => {
                return Err(Error::domain(format!(
                    "time averaging needs at least {MIN_AVERAGE_SAMPLES} samples, got {samples}"
                )));
            }
            _ => {}
        }
        let table = FourierTable::cached(slots, truncation)?;
        let cascade = channels.cascade();
        let delays = geometry.user_delays();
        Ok(Self { alphabet, table, geometry, channels, cascade, delays, eval, freq_bounds })
    }

    /// Default snapshot mode for `geometry` (`t = d_ru / c`).
    pub fn default_eval(geometry: &LinkGeometry) -> EvalMode {
        EvalMode::Snapshot { obs_time: EvaluationContext::at_user(geometry).obs_time }
    }

    pub fn alphabet(&self) -> &PhaseAlphabet {
        &self.alphabet
    }

    pub fn table(&self) -> &FourierTable {
        &self.table
    }

    pub fn geometry(&self) -> &LinkGeometry {
        &self.geometry
    }

    pub fn channels(&self) -> &ChannelPair {
        &self.channels
    }

    pub fn eval_mode(&self) -> EvalMode {
        self.eval
    }

    pub fn elements(&self) -> usize {
        self.cascade.len()
    }

    pub fn slots(&self) -> usize {
        self.table.slots()
    }

    pub fn truncation(&self) -> usize {
        self.table.truncation()
    }

    pub fn freq_bounds(&self) -> (f64, f64) {
        self.freq_bounds
    }

    /// Number of discrete decision variables `P = S·L`.
    pub fn code_len(&self) -> usize {
        self.elements() * self.slots()
    }

    pub fn check_codes(&self, codes: &ReflectionCodes) -> Result<()> {
        if codes.elements() != self.elements() || codes.slots() != self.slots() {
            return Err(Error::Dimension {
                what: "code matrix size",
                expected: self.code_len(),
                got: codes.elements() * codes.slots(),
            });
        }
        codes.validate(&self.alphabet)
    }

    /// Equivalent reflection coefficients at time `t`.
    pub fn theta_at(&self, codes: &ReflectionCodes, mod_freq: f64, t: f64) -> Vec<Complex64> {
        let zmax = self.truncation();
        let h = self.table.harmonics();
        let mut phases = vec![Complex64::new(0.0, 0.0); h];
        (0..self.elements())
            .map(|s| {
                fill_harmonic_phases(&mut phases, mod_freq * (t - self.delays[s]), zmax);
                let mut theta = Complex64::new(0.0, 0.0);
                for (l, &idx) in codes.row(s).iter().enumerate() {
                    let w: Complex64 = self.table.row(l).iter().zip(&phases).map(|(a, b)| a * b).sum();
                    theta += self.alphabet.value(idx) * w;
                }
                theta
            })
            .collect()
    }

    /// Cascaded gain `h_brᴴ Θ h_ru` at time `t`.
    pub fn gain_at(&self, codes: &ReflectionCodes, mod_freq: f64, t: f64) -> Complex64 {
        self.theta_at(codes, mod_freq, t)
            .iter()
            .zip(&self.cascade)
            .map(|(th, c)| th * c)
            .sum()
    }

    /// Received signal power `|h_brᴴ Θ h_ru|²` under the configured evaluation mode.
    pub fn received_power(&self, codes: &ReflectionCodes, mod_freq: f64) -> f64 {
        match self.eval {
            EvalMode::Snapshot { obs_time } => self.gain_at(codes, mod_freq, obs_time).norm_sqr(),
            EvalMode::TimeAveraged { samples } => {
                let period = 1.0 / mod_freq;
                let t0 = self.geometry.user.distance / self.geometry.light_speed;
                let total: f64 = (0..samples)
                    .map(|k| {
                        let t = t0 + period * k as f64 / samples as f64;
                        self.gain_at(codes, mod_freq, t).norm_sqr()
                    })
                    .sum();
                total / samples as f64
            }
        }
    }

    /// Achievable rate `log2(1 + power/σ²)` in bits/s/Hz.
    pub fn rate(&self, codes: &ReflectionCodes, mod_freq: f64) -> f64 {
        (1.0 + self.received_power(codes, mod_freq) / self.channels.noise_power).log2()
    }
}

/// `phases[z + Z] = exp(j 2π z x)` for `z = -Z..=Z`.
fn fill_harmonic_phases(phases: &mut [Complex64], cycles: f64, zmax: usize) {
    let base = Complex64::from_polar(1.0, 2.0 * PI * cycles.fract());
    phases[zmax] = Complex64::new(1.0, 0.0);
    let mut p = Complex64::new(1.0, 0.0);
    for z in 1..=zmax {
        p *= base;
        phases[zmax + z] = p;
        phases[zmax - z] = p.conj();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ArrayLayout, Placement};
    use crate::signal::harmonic_phases;

    #[test]
    fn fast_phases_match_reference() {
        let mut fast = vec![Complex64::new(0.0, 0.0); 7];
        fill_harmonic_phases(&mut fast, 1.3e5 * 2.1e-6, 3);
        let slow = harmonic_phases(1.3e5, 2.1e-6, 3);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn rejects_bad_bounds_and_samples() {
        let g = LinkGeometry::new(
            ArrayLayout::new(2, 2, 0.005).unwrap(),
            Placement::from_degrees(30.0, 90.0, 0.0).unwrap(),
            Placement::from_degrees(150.0, 90.0, 30.0).unwrap(),
            28e9,
        )
        .unwrap();
        let a = PhaseAlphabet::new(2).unwrap();
        let eval = Scenario::default_eval(&g);
        assert!(Scenario::new(g, a.clone(), 7, 3, 1.0, 1e-14, (2e5, 1e5), eval).is_err());
        assert!(Scenario::new(g, a.clone(), 7, 3, 1.0, 1e-14, (1e5, 2e5), EvalMode::TimeAveraged { samples: 8 }).is_err());
        assert!(Scenario::new(g, a, 7, 3, 1.0, 1e-14, (1e5, 2e5), eval).is_ok());
    }
}
