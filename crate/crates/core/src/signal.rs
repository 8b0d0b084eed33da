//! Time-modulation mathematics.
//!
//! Every element switches its reflection phase through `L` equal slots per
//! modulation period `T0 = 1/f0`. The periodic slot indicator has a Fourier
//! series with coefficients `a_lz`; truncating it to orders `|z| <= Z` gives the
//! harmonic content of an element and, evaluated at an observation instant, its
//! equivalent complex reflection coefficient.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest supported phase resolution in bits.
pub const MAX_PHASE_BITS: u32 = 16;

/// Quantized phase alphabet `φ_q = exp(i·q·2π/Q)`, `q = 1..Q`, `Q = 2^bits`.
///
/// Index `k` (0-based) stores `φ_{k+1}`, so the last entry is the zero phase.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseAlphabet {
    bits: u32,
    values: Vec<Complex64>,
}

impl PhaseAlphabet {
    pub fn new(bits: u32) -> Result<Self> {
        if !(1..=MAX_PHASE_BITS).contains(&bits) {
            return Err(Error::domain(format!(
                "phase resolution must be 1..={MAX_PHASE_BITS} bits, got {bits}"
            )));
        }
        let q = 1usize << bits;
        let values = (1..=q)
            .map(|k| Complex64::from_polar(1.0, phase_of(k % q, q)))
            .collect();
        Ok(Self { bits, values })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Alphabet size `Q`.
    pub fn size(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Value at 0-based index `idx`.
    #[inline]
    pub fn value(&self, idx: u32) -> Complex64 {
        self.values[idx as usize]
    }

    /// Phase angle (radians, in `[0, 2π)`) of the entry at 0-based index `idx`.
    pub fn angle(&self, idx: u32) -> f64 {
        phase_of((idx as usize + 1) % self.size(), self.size())
    }
}

fn phase_of(k: usize, q: usize) -> f64 {
    2.0 * PI * k as f64 / q as f64
}

/// Square-wave time coding of the reflection coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationScheme {
    /// Coding length `L` (slots per period).
    pub slots: usize,
    /// Modulation frequency `f0` in Hz.
    pub mod_freq: f64,
    /// Truncation order `Z`; harmonics with `|z| > Z` are discarded.
    pub truncation: usize,
}

impl ModulationScheme {
    pub fn new(slots: usize, mod_freq: f64, truncation: usize) -> Result<Self> {
        if slots == 0 {
            return Err(Error::domain("coding length must be at least 1"));
        }
        if !(mod_freq.is_finite() && mod_freq > 0.0) {
            return Err(Error::domain(format!(
                "modulation frequency must be positive, got {mod_freq}"
            )));
        }
        Ok(Self {
            slots,
            mod_freq,
            truncation,
        })
    }

    /// Modulation period `T0 = 1/f0`.
    pub fn period(&self) -> f64 {
        1.0 / self.mod_freq
    }

    /// Slot length `τ = T0/L`.
    pub fn slot_len(&self) -> f64 {
        self.period() / self.slots as f64
    }

    /// Number of retained harmonic orders, `2Z + 1`.
    pub fn harmonics(&self) -> usize {
        2 * self.truncation + 1
    }

    /// A static (conventional) surface is the single-slot special case.
    pub fn is_static(&self) -> bool {
        self.slots == 1
    }
}

/// `sin(πz/L) / (πz/L)`, exact at the removable singularity and at the zeros.
fn slot_sinc(z: i64, slots: usize) -> f64 {
    if z == 0 {
        1.0
    } else if z.rem_euclid(slots as i64) == 0 {
        0.0
    } else {
        let x = PI * z as f64 / slots as f64;
        x.sin() / x
    }
}

/// Fourier coefficient `a_lz` of the slot-`l` indicator (`l` is 1-based).
pub fn fourier_coefficient(l: usize, z: i64, slots: usize) -> Result<Complex64> {
    if slots == 0 || l == 0 || l > slots {
        return Err(Error::domain(format!(
            "slot index {l} outside 1..={slots}"
        )));
    }
    let inv_l = 1.0 / slots as f64;
    if z == 0 {
        return Ok(Complex64::new(inv_l, 0.0));
    }
    // Both phase factors combine into one: -π z (2(l-1) + 1) / L.
    let phase = -PI * z as f64 * (2 * (l - 1) + 1) as f64 * inv_l;
    Ok(Complex64::from_polar(inv_l * slot_sinc(z, slots), phase))
}

type TableCache = HashMap<(usize, usize), Arc<FourierTable>>;

/// Fourier coefficients for all slots and orders `-Z..=Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierTable {
    slots: usize,
    truncation: usize,
    coeffs: Vec<Complex64>,
}

impl FourierTable {
    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn harmonics(&self) -> usize {
        2 * self.truncation + 1
    }

    /// Coefficient for 0-based slot `l` and column `z + Z`.
    #[inline]
    pub fn at(&self, l: usize, col: usize) -> Complex64 {
        self.coeffs[l * self.harmonics() + col]
    }

    /// Coefficient `a_lz` with 1-based `l` and signed order `z`.
    pub fn coefficient(&self, l: usize, z: i64) -> Option<Complex64> {
        if l == 0 || l > self.slots || z.unsigned_abs() as usize > self.truncation {
            return None;
        }
        Some(self.at(l - 1, (z + self.truncation as i64) as usize))
    }

    /// Row of coefficients for 0-based slot `l`.
    pub fn row(&self, l: usize) -> &[Complex64] {
        let h = self.harmonics();
        &self.coeffs[l * h..(l + 1) * h]
    }

    /// Shared table for `(L, Z)`; built on first use.
    pub fn cached(slots: usize, truncation: usize) -> Result<Arc<FourierTable>> {
        static CACHE: OnceLock<Mutex<TableCache>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(t) = cache.lock().unwrap().get(&(slots, truncation)) {
            return Ok(Arc::clone(t));
        }
        let table = Arc::new(build_fourier_table(slots, truncation)?);
        cache
            .lock()
            .unwrap()
            .insert((slots, truncation), Arc::clone(&table));
        Ok(table)
    }
}

pub fn build_fourier_table(slots: usize, truncation: usize) -> Result<FourierTable> {
    if slots == 0 {
        return Err(Error::domain("coding length must be at least 1"));
    }
    let zmax = truncation as i64;
    let mut coeffs = Vec::with_capacity(slots * (2 * truncation + 1));
    for l in 1..=slots {
        for z in -zmax..=zmax {
            coeffs.push(fourier_coefficient(l, z, slots)?);
        }
    }
    Ok(FourierTable {
        slots,
        truncation,
        coeffs,
    })
}

/// Per-element phase-index matrix (`S × L`), stored 0-based.
///
/// Element `s` (0-based) corresponds to array position `(m, n)` with
/// `s = m·N + n`, so the flattened vector is row-major over elements.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReflectionCodes {
    elements: usize,
    slots: usize,
    indices: Vec<u32>,
}

impl ReflectionCodes {
    /// All entries set to alphabet index `idx`.
    pub fn constant(elements: usize, slots: usize, idx: u32) -> Self {
        Self {
            elements,
            slots,
            indices: vec![idx; elements * slots],
        }
    }

    /// Build from a flattened vector `γ` of length `S·L` (0-based indices).
    pub fn from_flat(elements: usize, slots: usize, indices: Vec<u32>) -> Result<Self> {
        if indices.len() != elements * slots {
            return Err(Error::Dimension {
                what: "flattened code length",
                expected: elements * slots,
                got: indices.len(),
            });
        }
        Ok(Self {
            elements,
            slots,
            indices,
        })
    }

    /// Build from rows of 1-based alphabet numbers `q ∈ 1..=Q`.
    pub fn from_rows_one_based(rows: &[Vec<u32>], alphabet_size: usize) -> Result<Self> {
        let slots = rows.first().map_or(0, Vec::len);
        let mut indices = Vec::with_capacity(rows.len() * slots);
        for row in rows {
            if row.len() != slots {
                return Err(Error::Dimension {
                    what: "code row length",
                    expected: slots,
                    got: row.len(),
                });
            }
            for &q in row {
                if q == 0 || q as usize > alphabet_size {
                    return Err(Error::domain(format!(
                        "code entry {q} outside 1..={alphabet_size}"
                    )));
                }
                indices.push(q - 1);
            }
        }
        Ok(Self {
            elements: rows.len(),
            slots,
            indices,
        })
    }

    pub fn to_rows_one_based(&self) -> Vec<Vec<u32>> {
        (0..self.elements)
            .map(|s| self.row(s).iter().map(|&i| i + 1).collect())
            .collect()
    }

    pub fn elements(&self) -> usize {
        self.elements
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn flat(&self) -> &[u32] {
        &self.indices
    }

    pub fn flat_mut(&mut self) -> &mut [u32] {
        &mut self.indices
    }

    pub fn row(&self, s: usize) -> &[u32] {
        &self.indices[s * self.slots..(s + 1) * self.slots]
    }

    pub fn validate(&self, alphabet: &PhaseAlphabet) -> Result<()> {
        let q = alphabet.size() as u32;
        match self.indices.iter().find(|&&i| i >= q) {
            Some(bad) => Err(Error::domain(format!(
                "code index {bad} outside alphabet of size {q}"
            ))),
            None => Ok(()),
        }
    }

    /// Rotate every entry by `steps` alphabet positions (a global phase rotation).
    pub fn rotated(&self, steps: u32, alphabet: &PhaseAlphabet) -> Self {
        let q = alphabet.size() as u32;
        Self {
            elements: self.elements,
            slots: self.slots,
            indices: self.indices.iter().map(|&i| (i + steps) % q).collect(),
        }
    }
}

fn check_row(row: &[u32], alphabet: &PhaseAlphabet, table: &FourierTable) -> Result<()> {
    if row.len() != table.slots() {
        return Err(Error::Dimension {
            what: "code row length",
            expected: table.slots(),
            got: row.len(),
        });
    }
    if let Some(bad) = row.iter().find(|&&i| i as usize >= alphabet.size()) {
        return Err(Error::domain(format!(
            "code index {bad} outside alphabet of size {}",
            alphabet.size()
        )));
    }
    Ok(())
}

/// Harmonic content `c_z = Σ_l Υ^l a_lz` of one element's code, `z = -Z..=Z`.
pub fn element_code_spectrum(
    row: &[u32],
    alphabet: &PhaseAlphabet,
    table: &FourierTable,
) -> Result<Vec<Complex64>> {
    check_row(row, alphabet, table)?;
    let mut spectrum = vec![Complex64::new(0.0, 0.0); table.harmonics()];
    for (l, &idx) in row.iter().enumerate() {
        let phase = alphabet.value(idx);
        for (c, a) in spectrum.iter_mut().zip(table.row(l)) {
            *c += phase * a;
        }
    }
    Ok(spectrum)
}

/// Harmonic phase vector `b_z = exp(j2π z f0 Δt)` for `z = -Z..=Z`.
pub fn harmonic_phases(mod_freq: f64, delta_t: f64, truncation: usize) -> Vec<Complex64> {
    let base = Complex64::from_polar(1.0, 2.0 * PI * (mod_freq * delta_t).fract());
    let zmax = truncation as i32;
    (-zmax..=zmax).map(|z| base.powi(z)).collect()
}

/// Equivalent reflection coefficient `θ_s = γ_sᵀ A b_s`.
pub fn equivalent_theta(
    row: &[u32],
    alphabet: &PhaseAlphabet,
    table: &FourierTable,
    harmonic_phases: &[Complex64],
) -> Result<Complex64> {
    if harmonic_phases.len() != table.harmonics() {
        return Err(Error::Dimension {
            what: "harmonic phase vector",
            expected: table.harmonics(),
            got: harmonic_phases.len(),
        });
    }
    let spectrum = element_code_spectrum(row, alphabet, table)?;
    Ok(spectrum
        .iter()
        .zip(harmonic_phases)
        .map(|(c, b)| c * b)
        .sum())
}
