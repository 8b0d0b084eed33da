//! Cross-entropy optimization of the default 10x10 scenario, printing the
//! convergence history.
//!
//! cargo run --release --example optimize_ceo [seed]

use fdris::config::ScenarioConfig;
use fdris::harness::optimize;

fn main() -> fdris::Result<()> {
    let mut cfg = ScenarioConfig::default();
    if let Some(seed) = std::env::args().nth(1).and_then(|s| s.parse().ok()) {
        cfg.seed = seed;
    }
    let record = optimize(&cfg)?;
    println!("iter  best_rate  elite_mean   mu (Hz)    sigma (Hz)  entropy");
    for h in &record.history {
        println!(
            "{:>4}  {:>9.4}  {:>10.4}  {:>9.1}  {:>10.1}  {:>7.4}",
            h.iteration, h.best_rate, h.mean_elite_rate, h.mu, h.sigma, h.mean_row_entropy
        );
    }
    println!(
        "best rate {:.4} bits/s/Hz at f0 = {:.1} Hz after {} evaluations (config {})",
        record.best_rate, record.best_mod_freq, record.evaluations, record.config_hash
    );
    println!("first element code (1-based): {:?}", record.best_codes[0]);
    Ok(())
}
