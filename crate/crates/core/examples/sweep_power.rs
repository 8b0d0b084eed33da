//! Rate against transmit power, including the 1-bit time-modulated surface
//! next to a 16-bit static one.
//!
//! cargo run --release --example sweep_power

use fdris::config::ScenarioConfig;
use fdris::harness::{sweep, SweepAxis, SweepMethod, SweepRequest};

fn main() -> fdris::Result<()> {
    let values = vec![10.0, 20.0, 30.0, 40.0];
    let mut one_bit = ScenarioConfig::default();
    one_bit.modulation.bits = 1;
    let fd = sweep(
        &one_bit,
        &SweepRequest { axis: SweepAxis::P, values: values.clone(), methods: vec![SweepMethod::FdrisCeo], trials: 3 },
    )?;
    let mut fine = ScenarioConfig::default();
    fine.modulation.bits = 16;
    let ris = sweep(
        &fine,
        &SweepRequest { axis: SweepAxis::P, values: values.clone(), methods: vec![SweepMethod::RisOracle], trials: 1 },
    )?;
    println!("P (dBm)  fdris 1-bit  ris 16-bit");
    for v in values {
        let a = fd.cell(v, SweepMethod::FdrisCeo).unwrap().mean_rate;
        let b = ris.cell(v, SweepMethod::RisOracle).unwrap().mean_rate;
        println!("{v:>7}  {a:>11.4}  {b:>10.4}");
    }
    Ok(())
}
