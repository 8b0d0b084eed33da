//! Exact best static configuration for increasing phase resolution, compared
//! with ideal coherent combining.
//!
//! cargo run --release --example ris_oracle

use fdris::config::ScenarioConfig;
use fdris::pattern::{rate_from_gain, ris_quantized_oracle};
use fdris::signal::PhaseAlphabet;

fn main() -> fdris::Result<()> {
    let cfg = ScenarioConfig::default();
    let scenario = cfg.scenario()?;
    let pair = scenario.channels();
    let coherent: f64 = pair.cascade().iter().map(|u| u.norm()).sum();
    println!("bits  |gain| / coherent  rate");
    for bits in [1, 2, 3, 4, 8, 16] {
        let oracle = ris_quantized_oracle(pair, &PhaseAlphabet::new(bits)?);
        println!(
            "{bits:>4}  {:>17.6}  {:.4}",
            oracle.gain.norm() / coherent,
            rate_from_gain(oracle.gain, pair.noise_power)
        );
    }
    let ideal = (1.0 + coherent * coherent / pair.noise_power).log2();
    println!("continuous phases: rate {ideal:.4}");
    Ok(())
}
