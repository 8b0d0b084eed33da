//! Cross-entropy optimizer against the genetic baseline on the same scenario,
//! over a handful of seeds.
//!
//! cargo run --release --example ceo_vs_ga

use fdris::config::{OptimizerMethod, ScenarioConfig};
use fdris::harness::optimize;

fn main() -> fdris::Result<()> {
    let mut cfg = ScenarioConfig::default();
    cfg.geometry.rows = 6;
    cfg.geometry.cols = 6;
    println!("seed  ceo_rate  ceo_evals  ga_rate  ga_evals");
    for seed in 1..=5 {
        cfg.seed = seed;
        cfg.optimizer.method = OptimizerMethod::Ceo;
        let ceo = optimize(&cfg)?;
        cfg.optimizer.method = OptimizerMethod::Ga;
        let ga = optimize(&cfg)?;
        println!(
            "{seed:>4}  {:>8.4}  {:>9}  {:>7.4}  {:>8}",
            ceo.best_rate, ceo.evaluations, ga.best_rate, ga.evaluations
        );
    }
    Ok(())
}
