//! Cross-entropy optimizer over reflection codes and modulation frequency.
//!
//! Codes are drawn entry-by-entry from a categorical distribution (one row of
//! the probability matrix per code entry) and `f0` from a Gaussian. Each
//! iteration keeps the top `⌈ϱK⌉` samples, refits the distributions to them in
//! closed form (elite frequencies, elite mean, elite population std) and mixes
//! the refit with the previous parameters using the smoothing weight `ξ`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{Candidate, Scenario};
use crate::signal::ReflectionCodes;

/// Largest alphabet the categorical sampler accepts (`b <= 8`).
pub const MAX_CATEGORICAL_BITS: u32 = 8;

const FREQ_REJECTION_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CeoConfig {
    /// Samples per iteration `K`.
    pub pop_size: usize,
    /// Elite fraction `ϱ`.
    pub elite_frac: f64,
    /// Smoothing weight `ξ` on the freshly fitted parameters.
    pub smoothing: f64,
    /// `[f_min, f_max]` in Hz.
    pub freq_bounds: (f64, f64),
    pub max_iters: usize,
    /// Stop after this many consecutive iterations improving by less than `stall_tol`.
    pub stall_iters: usize,
    /// Improvement threshold in bits/s/Hz.
    pub stall_tol: f64,
    pub rng_seed: u64,
    /// Lower bound per categorical cell, applied after smoothing.
    pub prob_floor: f64,
    /// Lower bound on `σ̃` as a fraction of `f_max - f_min`.
    pub std_floor_frac: f64,
}

impl Default for CeoConfig {
    fn default() -> Self {
        Self {
            pop_size: 200,
            elite_frac: 0.1,
            smoothing: 0.65,
            freq_bounds: (1.0e5, 2.8e5),
            max_iters: 500,
            stall_iters: 5,
            stall_tol: 1e-4,
            rng_seed: 0,
            prob_floor: 1e-6,
            std_floor_frac: 1e-6,
        }
    }
}

impl CeoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.pop_size == 0 {
            return Err(Error::invalid("pop_size", "must be at least 1"));
        }
        if !(self.elite_frac > 0.0 && self.elite_frac < 1.0) {
            return Err(Error::invalid("elite_frac", "must lie in (0, 1)"));
        }
        if !(0.0..=1.0).contains(&self.smoothing) {
            return Err(Error::invalid("smoothing", "must lie in [0, 1]"));
        }
        let (lo, hi) = self.freq_bounds;
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi) {
            return Err(Error::invalid("freq_bounds", format!("need 0 < f_min <= f_max, got [{lo}, {hi}]")));
        }
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters", "must be at least 1"));
        }
        if self.stall_tol.is_nan() || self.stall_tol < 0.0 {
            return Err(Error::invalid("stall_tol", "must be non-negative"));
        }
        if !(0.0..1.0).contains(&self.prob_floor) || self.std_floor_frac.is_nan() || self.std_floor_frac < 0.0 {
            return Err(Error::invalid("prob_floor", "floors must be non-negative (prob_floor < 1)"));
        }
        Ok(())
    }

    /// Elite set size `⌈ϱK⌉`, at least one.
    pub fn elite_count(&self) -> usize {
        let raw = self.elite_frac * self.pop_size as f64;
        // absorb representation error such as 0.1 * 30 = 3.0000000000000004
        ((raw - 1e-9).ceil() as usize).clamp(1, self.pop_size)
    }

    fn std_floor(&self) -> f64 {
        self.std_floor_frac * (self.freq_bounds.1 - self.freq_bounds.0)
    }
}

/// Per-entry categorical distributions, one row of `Q` probabilities per code entry.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoricalTilting {
    rows: usize,
    cols: usize,
    probs: Vec<f64>,
}

impl CategoricalTilting {
    pub fn uniform(rows: usize, cols: usize) -> Self {
        Self { rows, cols, probs: vec![1.0 / cols as f64; rows * cols] }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) || cols == 0 {
            return Err(Error::domain("probability rows must be non-empty and equal length"));
        }
        Ok(Self { rows: rows.len(), cols, probs: rows.concat() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, p: usize) -> &[f64] {
        &self.probs[p * self.cols..(p + 1) * self.cols]
    }

    fn row_mut(&mut self, p: usize) -> &mut [f64] {
        &mut self.probs[p * self.cols..(p + 1) * self.cols]
    }

    /// Mean Shannon entropy per row, in bits.
    pub fn mean_entropy(&self) -> f64 {
        if self.rows == 0 {
            return 0.0;
        }
        let total: f64 = self
            .probs
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| -p * p.log2())
            .sum();
        total / self.rows as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianTilting {
    /// Mean `μ` in Hz.
    pub mean: f64,
    /// Standard deviation `σ̃` in Hz.
    pub std: f64,
}

/// One row of optimizer history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Best-so-far rate after this iteration.
    pub best_rate: f64,
    pub mean_elite_rate: f64,
    pub mu: f64,
    pub sigma: f64,
    /// Mean per-row entropy of the code distribution, bits.
    pub mean_row_entropy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CeoState {
    pub cat: CategoricalTilting,
    pub gauss: GaussianTilting,
    pub iter: usize,
    pub best: Option<Candidate>,
    pub history: Vec<IterationRecord>,
    elements: usize,
    slots: usize,
}

impl CeoState {
    /// Maximum-entropy start: uniform rows, `μ` mid-band, `σ̃` half the band.
    pub fn initial(elements: usize, slots: usize, alphabet_size: usize, config: &CeoConfig) -> Self {
        let (lo, hi) = config.freq_bounds;
        Self {
            cat: CategoricalTilting::uniform(elements * slots, alphabet_size),
            gauss: GaussianTilting { mean: 0.5 * (lo + hi), std: 0.5 * (hi - lo) },
            iter: 0,
            best: None,
            history: Vec::new(),
            elements,
            slots,
        }
    }

    pub fn best_rate(&self) -> f64 {
        self.best.as_ref().map_or(f64::NEG_INFINITY, |c| c.objective)
    }
}

fn sample_index(row: &[f64], u: f64) -> u32 {
    let mut acc = 0.0;
    for (q, &p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return q as u32;
        }
    }
    // u landed in the rounding gap above the last cumulative sum
    row.iter().rposition(|&p| p > 0.0).unwrap_or(row.len() - 1) as u32
}

/// Draw `f0 ~ N(μ, σ̃²)` restricted to the bounds: rejection, then clamp.
fn sample_freq<R: Rng + ?Sized>(gauss: &GaussianTilting, bounds: (f64, f64), rng: &mut R) -> f64 {
    let (lo, hi) = bounds;
    if gauss.std > 0.0 {
        if let Ok(normal) = Normal::new(gauss.mean, gauss.std) {
            for _ in 0..FREQ_REJECTION_ATTEMPTS {
                let f = normal.sample(rng);
                if (lo..=hi).contains(&f) {
                    return f;
                }
            }
        }
    }
    gauss.mean.clamp(lo, hi)
}

/// Draw `K` candidates from the current tilting parameters.
pub fn sample_candidates<R: Rng + ?Sized>(state: &CeoState, config: &CeoConfig, rng: &mut R) -> Vec<Candidate> {
    let entries = state.cat.rows();
    (0..config.pop_size)
        .map(|_| {
            let flat: Vec<u32> = (0..entries)
                .map(|p| sample_index(state.cat.row(p), rng.random::<f64>()))
                .collect();
            let codes = ReflectionCodes::from_flat(state.elements, state.slots, flat)
                .expect("tilting rows match code shape");
            let f0 = sample_freq(&state.gauss, config.freq_bounds, rng);
            Candidate::new(codes, f0)
        })
        .collect()
}

/// Fill in and return the candidate's achievable rate.
pub fn evaluate(candidate: &mut Candidate, scenario: &Scenario) -> Result<f64> {
    scenario.check_codes(&candidate.codes)?;
    candidate.objective = scenario.rate(&candidate.codes, candidate.mod_freq);
    Ok(candidate.objective)
}

/// Evaluate all candidates; order is preserved regardless of thread count.
pub fn evaluate_all(candidates: &mut [Candidate], scenario: &Scenario) -> Result<()> {
    candidates
        .par_iter_mut()
        .try_for_each(|c| evaluate(c, scenario).map(|_| ()))
}

/// Indices of the `⌈ϱK⌉` best candidates, best first; ties go to the lower index.
pub fn elite_indices(candidates: &[Candidate], config: &CeoConfig) -> Result<Vec<usize>> {
    if candidates.is_empty() {
        return Err(Error::domain("cannot select elites from an empty population"));
    }
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| {
        candidates[b]
            .objective
            .total_cmp(&candidates[a].objective)
            .then(a.cmp(&b))
    });
    let keep = config.elite_count().min(candidates.len());
    order.truncate(keep);
    Ok(order)
}

pub fn select_elite(candidates: &[Candidate], config: &CeoConfig) -> Result<Vec<Candidate>> {
    Ok(elite_indices(candidates, config)?
        .into_iter()
        .map(|i| candidates[i].clone())
        .collect())
}

/// Closed-form cross-entropy fit to an elite set, before smoothing:
/// categorical rows are elite symbol frequencies, `μ` is the elite mean and
/// `σ̃` the elite population standard deviation about that `μ`.
pub fn closed_form_fit(elites: &[Candidate], alphabet_size: usize) -> Result<(CategoricalTilting, GaussianTilting)> {
    let first = elites
        .first()
        .ok_or_else(|| Error::domain("elite set is empty"))?;
    let entries = first.codes.flat().len();
    let ke = elites.len() as f64;
    let mut counts = vec![0u32; entries * alphabet_size];
    for e in elites {
        if e.codes.flat().len() != entries {
            return Err(Error::Dimension { what: "elite code length", expected: entries, got: e.codes.flat().len() });
        }
        for (p, &q) in e.codes.flat().iter().enumerate() {
            counts[p * alphabet_size + q as usize] += 1;
        }
    }
    let probs = counts.iter().map(|&c| c as f64 / ke).collect();
    let mean = elites.iter().map(|e| e.mod_freq).sum::<f64>() / ke;
    let var = elites.iter().map(|e| (e.mod_freq - mean).powi(2)).sum::<f64>() / ke;
    Ok((
        CategoricalTilting { rows: entries, cols: alphabet_size, probs },
        GaussianTilting { mean, std: var.sqrt() },
    ))
}

/// Refit to the elites, smooth toward the previous parameters and apply the floors.
pub fn update_tilting(state: &mut CeoState, elites: &[Candidate], config: &CeoConfig) -> Result<()> {
    let (fit_cat, fit_gauss) = closed_form_fit(elites, state.cat.cols())?;
    if fit_cat.rows() != state.cat.rows() {
        return Err(Error::Dimension { what: "elite code length", expected: state.cat.rows(), got: fit_cat.rows() });
    }
    let xi = config.smoothing;
    let keep = 1.0 - xi;
    for (old, new) in state.cat.probs.iter_mut().zip(&fit_cat.probs) {
        *old = xi * new + keep * *old;
    }
    if config.prob_floor > 0.0 {
        for p in 0..state.cat.rows() {
            let row = state.cat.row_mut(p);
            if row.iter().any(|&v| v < config.prob_floor) {
                row.iter_mut().for_each(|v| *v = v.max(config.prob_floor));
                let total: f64 = row.iter().sum();
                row.iter_mut().for_each(|v| *v /= total);
            }
        }
    }
    state.gauss.mean = xi * fit_gauss.mean + keep * state.gauss.mean;
    state.gauss.std = (xi * fit_gauss.std + keep * state.gauss.std).max(config.std_floor());
    Ok(())
}

/// Run the optimizer to convergence or `max_iters`.
pub fn run(scenario: &Scenario, config: &CeoConfig) -> Result<CeoState> {
    config.validate()?;
    if scenario.alphabet().bits() > MAX_CATEGORICAL_BITS {
        return Err(Error::domain(format!(
            "categorical sampling supports at most {MAX_CATEGORICAL_BITS}-bit alphabets"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut state = CeoState::initial(scenario.elements(), scenario.slots(), scenario.alphabet().size(), config);
    let mut stalled = 0;
    while state.iter < config.max_iters {
        let before = state.best_rate();
        let mut candidates = sample_candidates(&state, config, &mut rng);
        evaluate_all(&mut candidates, scenario)?;
        let elite_idx = elite_indices(&candidates, config)?;
        let elites: Vec<Candidate> = elite_idx.iter().map(|&i| candidates[i].clone()).collect();
        if elites[0].objective > before {
            state.best = Some(elites[0].clone());
        }
        update_tilting(&mut state, &elites, config)?;
        state.iter += 1;
        let mean_elite = elites.iter().map(|e| e.objective).sum::<f64>() / elites.len() as f64;
        state.history.push(IterationRecord {
            iteration: state.iter,
            best_rate: state.best_rate(),
            mean_elite_rate: mean_elite,
            mu: state.gauss.mean,
            sigma: state.gauss.std,
            mean_row_entropy: state.cat.mean_entropy(),
        });
        let improvement = state.best_rate() - before;
        if before.is_finite() && improvement < config.stall_tol {
            stalled += 1;
            if stalled >= config.stall_iters {
                break;
            }
        } else {
            stalled = 0;
        }
    }
    Ok(state)
}
