//! Genetic-algorithm baseline on the same search space as the cross-entropy optimizer.
//!
//! Chromosome: one integer gene per code entry plus one real gene for `f0`.
//! Tournament selection, uniform crossover, per-gene resampling mutation,
//! clamped Gaussian mutation of `f0`, and elitism.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::ceo::{evaluate_all, IterationRecord, MAX_CATEGORICAL_BITS};
use crate::error::{Error, Result};
use crate::scenario::{Candidate, Scenario};
use crate::signal::ReflectionCodes;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub pop_size: usize,
    pub generations: usize,
    pub tournament_size: usize,
    pub crossover_rate: f64,
    /// Per-gene mutation probability; `None` means `1/P` for `P` code entries.
    /// The same probability applies to the frequency gene.
    pub mutation_rate_discrete: Option<f64>,
    /// Std of the `f0` mutation in Hz; `None` means 5% of the band.
    pub mutation_sigma_freq: Option<f64>,
    pub elitism_count: usize,
    pub rng_seed: u64,
    pub freq_bounds: (f64, f64),
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            pop_size: 200,
            generations: 500,
            tournament_size: 4,
            crossover_rate: 0.9,
            mutation_rate_discrete: None,
            mutation_sigma_freq: None,
            elitism_count: 2,
            rng_seed: 0,
            freq_bounds: (1.0e5, 2.8e5),
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.pop_size < 2 {
            return Err(Error::invalid("pop_size", "must be at least 2"));
        }
        if self.tournament_size == 0 {
            return Err(Error::invalid("tournament_size", "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return Err(Error::invalid("crossover_rate", "must lie in [0, 1]"));
        }
        if let Some(r) = self.mutation_rate_discrete {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::invalid("mutation_rate_discrete", "must lie in [0, 1]"));
            }
        }
        if let Some(s) = self.mutation_sigma_freq {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(Error::invalid("mutation_sigma_freq", "must be non-negative"));
            }
        }
        if self.elitism_count > self.pop_size {
            return Err(Error::invalid("elitism_count", "cannot exceed pop_size"));
        }
        let (lo, hi) = self.freq_bounds;
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi) {
            return Err(Error::invalid("freq_bounds", format!("need 0 < f_min <= f_max, got [{lo}, {hi}]")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct GaOutcome {
    pub best: Candidate,
    pub history: Vec<IterationRecord>,
    /// Final population, evaluated, in rank order.
    pub population: Vec<Candidate>,
}

fn rank(pop: &[Candidate]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..pop.len()).collect();
    order.sort_by(|&a, &b| pop[b].objective.total_cmp(&pop[a].objective).then(a.cmp(&b)));
    order
}

fn tournament<R: Rng>(pop: &[Candidate], size: usize, rng: &mut R) -> usize {
    let mut best = rng.random_range(0..pop.len());
    for _ in 1..size {
        let c = rng.random_range(0..pop.len());
        if pop[c].objective > pop[best].objective || (pop[c].objective == pop[best].objective && c < best) {
            best = c;
        }
    }
    best
}

fn record(generation: usize, best: &Candidate, ranked: &[Candidate], alphabet_size: usize) -> IterationRecord {
    let top = (ranked.len() / 10).max(1);
    let mean_top = ranked[..top].iter().map(|c| c.objective).sum::<f64>() / top as f64;
    let n = ranked.len() as f64;
    let mu = ranked.iter().map(|c| c.mod_freq).sum::<f64>() / n;
    let sigma = (ranked.iter().map(|c| (c.mod_freq - mu).powi(2)).sum::<f64>() / n).sqrt();
    let entries = best.codes.flat().len();
    let mut counts = vec![0usize; alphabet_size];
    let mut entropy = 0.0;
    for p in 0..entries {
        counts.iter_mut().for_each(|c| *c = 0);
        for c in ranked {
            counts[c.codes.flat()[p] as usize] += 1;
        }
        entropy += counts
            .iter()
            .filter(|&&k| k > 0)
            .map(|&k| {
                let f = k as f64 / n;
                -f * f.log2()
            })
            .sum::<f64>();
    }
    IterationRecord {
        iteration: generation,
        best_rate: best.objective,
        mean_elite_rate: mean_top,
        mu,
        sigma,
        mean_row_entropy: entropy / entries.max(1) as f64,
    }
}

pub fn ga_run(scenario: &Scenario, config: &GaConfig) -> Result<GaOutcome> {
    config.validate()?;
    if scenario.alphabet().bits() > MAX_CATEGORICAL_BITS {
        return Err(Error::domain(format!(
            "genetic search supports at most {MAX_CATEGORICAL_BITS}-bit alphabets"
        )));
    }
    let q = scenario.alphabet().size() as u32;
    let (elements, slots) = (scenario.elements(), scenario.slots());
    let entries = elements * slots;
    let (lo, hi) = config.freq_bounds;
    let gene_rate = config.mutation_rate_discrete.unwrap_or(1.0 / entries as f64);
    let sigma = config.mutation_sigma_freq.unwrap_or(0.05 * (hi - lo));
    let freq_noise = if sigma > 0.0 { Normal::new(0.0, sigma).ok() } else { None };
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);

    let mut pop: Vec<Candidate> = (0..config.pop_size)
        .map(|_| {
            let flat = (0..entries).map(|_| rng.random_range(0..q)).collect();
            let codes = ReflectionCodes::from_flat(elements, slots, flat).expect("shape");
            Candidate::new(codes, rng.random_range(lo..=hi))
        })
        .collect();
    evaluate_all(&mut pop, scenario)?;

    let mut order = rank(&pop);
    let mut best = pop[order[0]].clone();
    let mut history = Vec::with_capacity(config.generations);

    for generation in 1..=config.generations {
        let mut next: Vec<Candidate> = order[..config.elitism_count].iter().map(|&i| pop[i].clone()).collect();
        let fresh_from = next.len();
        while next.len() < config.pop_size {
            let a = &pop[tournament(&pop, config.tournament_size, &mut rng)];
            let b = &pop[tournament(&pop, config.tournament_size, &mut rng)];
            let mut child = a.clone();
            if rng.random::<f64>() < config.crossover_rate {
                for (g, &other) in child.codes.flat_mut().iter_mut().zip(b.codes.flat()) {
                    if rng.random::<bool>() {
                        *g = other;
                    }
                }
                if rng.random::<bool>() {
                    child.mod_freq = b.mod_freq;
                }
            }
            for g in child.codes.flat_mut() {
                if rng.random::<f64>() < gene_rate {
                    *g = rng.random_range(0..q);
                }
            }
            if let Some(noise) = &freq_noise {
                if rng.random::<f64>() < gene_rate {
                    child.mod_freq = (child.mod_freq + noise.sample(&mut rng)).clamp(lo, hi);
                }
            }
            child.objective = f64::NEG_INFINITY;
            next.push(child);
        }
        evaluate_all(&mut next[fresh_from..], scenario)?;
        pop = next;
        order = rank(&pop);
        if pop[order[0]].objective > best.objective {
            best = pop[order[0]].clone();
        }
        let ranked: Vec<Candidate> = order.iter().map(|&i| pop[i].clone()).collect();
        history.push(record(generation, &best, &ranked, q as usize));
    }

    let population = order.iter().map(|&i| pop[i].clone()).collect();
    Ok(GaOutcome { best, history, population })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(GaConfig::default().validate().is_ok());
        assert!(GaConfig { pop_size: 1, ..Default::default() }.validate().is_err());
        assert!(GaConfig { crossover_rate: 1.5, ..Default::default() }.validate().is_err());
        assert!(GaConfig { elitism_count: 300, ..Default::default() }.validate().is_err());
        assert!(GaConfig { mutation_rate_discrete: Some(-0.1), ..Default::default() }.validate().is_err());
    }
}
