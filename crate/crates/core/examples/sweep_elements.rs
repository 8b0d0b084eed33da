//! Mean optimized rate against surface size for the time-modulated surface and
//! a static one, with the SNR-equivalent gain between them.
//!
//! cargo run --release --example sweep_elements

use fdris::config::ScenarioConfig;
use fdris::harness::{sweep, SweepAxis, SweepMethod, SweepRequest};

fn main() -> fdris::Result<()> {
    let request = SweepRequest {
        axis: SweepAxis::S,
        values: vec![16.0, 36.0, 64.0, 100.0],
        methods: vec![SweepMethod::FdrisCeo, SweepMethod::RisCeo],
        trials: 5,
    };
    let outcome = sweep(&ScenarioConfig::default(), &request)?;
    print!("{}", outcome.to_csv());
    println!();
    print!("{}", outcome.gains_csv());
    Ok(())
}
