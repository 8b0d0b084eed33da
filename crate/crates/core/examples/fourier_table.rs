//! Harmonic coefficients of the slot-switching waveform and how much of a
//! code's energy survives truncation.
//!
//! cargo run --example fourier_table

use fdris::signal::{build_fourier_table, element_code_spectrum, PhaseAlphabet};

fn main() -> fdris::Result<()> {
    let slots = 7;
    let table = build_fourier_table(slots, 3)?;
    println!("a_lz for L = {slots}, |z| <= 3");
    for l in 1..=slots {
        let cells: Vec<String> = (-3..=3)
            .map(|z| {
                let a = table.coefficient(l, z).unwrap();
                format!("{:+.4}{:+.4}j", a.re, a.im)
            })
            .collect();
        println!("l={l}  {}", cells.join("  "));
    }

    let alphabet = PhaseAlphabet::new(2)?;
    let row = [0, 1, 3, 2, 2, 0, 1];
    for zmax in [0, 3, 10, 50, 350] {
        let t = build_fourier_table(slots, zmax)?;
        let energy: f64 = element_code_spectrum(&row, &alphabet, &t)?.iter().map(|c| c.norm_sqr()).sum();
        println!("Z = {zmax:>3}: retained energy {energy:.6}");
    }
    Ok(())
}
