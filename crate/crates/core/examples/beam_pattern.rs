//! Distance-azimuth power maps of an optimized time-modulated surface and an
//! optimized static one, without path loss, plus their power ratio at the user.
//!
//! cargo run --release --example beam_pattern [out_dir]
//!
//! Writes fdris_pattern.csv and ris_pattern.csv to `out_dir` (default: the
//! system temp directory).

use std::path::PathBuf;

use fdris::config::ScenarioConfig;
use fdris::harness::{optimize, pattern_for_record, SweepMethod};
use fdris::pattern::GridSpec;

fn main() -> fdris::Result<()> {
    let out: PathBuf = std::env::args().nth(1).map_or_else(std::env::temp_dir, PathBuf::from);
    let mut cfg = ScenarioConfig::default();
    cfg.optimizer.ceo.pop_size = 1000;
    let grid = GridSpec::default();

    let mut target = [0.0; 2];
    for (i, method) in [SweepMethod::FdrisCeo, SweepMethod::RisCeo].into_iter().enumerate() {
        let record = optimize(&method.apply(&cfg))?;
        let (pattern, at_user) = pattern_for_record(&record, &grid, false)?;
        let (peak, di, ai) = pattern.peak();
        println!(
            "{:<9} rate {:.4}  power at user {:.1}  grid peak {:.1} at ({:.1} m, {:.0} deg)",
            method.as_str(),
            record.best_rate,
            at_user,
            peak,
            pattern.distances[di],
            pattern.azimuths[ai].to_degrees()
        );
        let file = out.join(format!("{}_pattern.csv", if method.is_fdris() { "fdris" } else { "ris" }));
        std::fs::write(&file, pattern.to_csv()).map_err(|source| fdris::Error::Io {
            path: file.display().to_string(),
            source,
        })?;
        println!("  wrote {}", file.display());
        target[i] = at_user;
    }
    println!("power ratio at the user: {:.3}", target[0] / target[1]);
    Ok(())
}
