//! Array geometry, far-field propagation and the equivalent cascaded channel.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{equivalent_theta, harmonic_phases, FourierTable, ModulationScheme, PhaseAlphabet, ReflectionCodes};

/// Speed of light in vacuum, m/s.
pub const LIGHT_SPEED: f64 = 299_792_458.0;

/// Planar `M × N` surface with uniform spacing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayLayout {
    pub rows: usize,
    pub cols: usize,
    /// Element spacing in meters.
    pub spacing: f64,
}

impl ArrayLayout {
    pub fn new(rows: usize, cols: usize, spacing: f64) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::domain("array must have at least one row and column"));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::domain(format!("element spacing must be positive, got {spacing}")));
        }
        Ok(Self { rows, cols, spacing })
    }

    /// Half-wavelength spacing at `carrier` Hz.
    pub fn half_wavelength(rows: usize, cols: usize, carrier: f64) -> Result<Self> {
        Self::new(rows, cols, LIGHT_SPEED / (2.0 * carrier))
    }

    /// Total element count `S`.
    pub fn elements(&self) -> usize {
        self.rows * self.cols
    }

    /// 0-based flat index for 1-based `(m, n)`.
    pub fn flat_index(&self, m: usize, n: usize) -> usize {
        (m - 1) * self.cols + (n - 1)
    }

    /// Iterate 1-based `(m, n)` in flat order.
    pub fn positions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..=self.rows).flat_map(move |m| (1..=self.cols).map(move |n| (m, n)))
    }
}

/// Far-field position relative to the surface origin (element `(1, 1)`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    /// Distance in meters.
    pub distance: f64,
    /// Elevation angle in radians.
    pub elevation: f64,
    /// Azimuth angle in radians.
    pub azimuth: f64,
}

impl Placement {
    pub fn new(distance: f64, elevation: f64, azimuth: f64) -> Result<Self> {
        if !(distance.is_finite() && distance > 0.0) {
            return Err(Error::domain(format!("distance must be positive, got {distance}")));
        }
        if !(elevation.is_finite() && azimuth.is_finite()) {
            return Err(Error::domain("placement angles must be finite"));
        }
        Ok(Self { distance, elevation, azimuth })
    }

    pub fn from_degrees(distance: f64, elevation_deg: f64, azimuth_deg: f64) -> Result<Self> {
        Self::new(distance, elevation_deg.to_radians(), azimuth_deg.to_radians())
    }
}

/// Full link description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub layout: ArrayLayout,
    pub bs: Placement,
    pub user: Placement,
    /// Carrier frequency in Hz.
    pub carrier: f64,
    pub light_speed: f64,
}

impl LinkGeometry {
    pub fn new(layout: ArrayLayout, bs: Placement, user: Placement, carrier: f64) -> Result<Self> {
        if !(carrier.is_finite() && carrier > 0.0) {
            return Err(Error::domain(format!("carrier must be positive, got {carrier}")));
        }
        Ok(Self { layout, bs, user, carrier, light_speed: LIGHT_SPEED })
    }

    /// Same geometry with the user moved.
    pub fn with_user(&self, user: Placement) -> Self {
        Self { user, ..*self }
    }

    /// Per-element propagation delays `d_ru^{mn}/c` to the user, in seconds.
    pub fn user_delays(&self) -> Vec<f64> {
        self.layout
            .positions()
            .map(|(m, n)| (self.user.distance - offset(&self.layout, m, n, &self.user)) / self.light_speed)
            .collect()
    }
}

/// Instant at which harmonic phase terms are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvaluationContext {
    /// Observation time in seconds.
    pub obs_time: f64,
}

impl EvaluationContext {
    /// `t = d_ru / c`: the harmonic phase of element `(m, n)` reduces to `2π z f0 Γ_ru^{mn} / c`.
    pub fn at_user(geometry: &LinkGeometry) -> Self {
        Self { obs_time: geometry.user.distance / geometry.light_speed }
    }
}

fn offset(layout: &ArrayLayout, m: usize, n: usize, p: &Placement) -> f64 {
    let st = p.elevation.sin();
    layout.spacing * st * ((m - 1) as f64 * p.azimuth.cos() + (n - 1) as f64 * p.azimuth.sin())
}

/// Path-length offset `Γ^{mn}` of element `(m, n)` (1-based) toward `placement`.
pub fn element_offset(layout: &ArrayLayout, m: usize, n: usize, placement: &Placement) -> Result<f64> {
    if m == 0 || m > layout.rows || n == 0 || n > layout.cols {
        return Err(Error::domain(format!(
            "element ({m}, {n}) outside {}x{} array",
            layout.rows, layout.cols
        )));
    }
    Ok(offset(layout, m, n, placement))
}

/// Large-scale path loss in dB: `-30 - 22 log10(d)`.
pub fn path_loss_db(distance: f64) -> Result<f64> {
    if !(distance.is_finite() && distance > 0.0) {
        return Err(Error::domain(format!("path-loss distance must be positive, got {distance}")));
    }
    Ok(-30.0 - 22.0 * distance.log10())
}

/// Amplitude gain `10^{η_dB/20}`.
pub fn path_loss_amplitude(distance: f64) -> Result<f64> {
    Ok(10f64.powf(path_loss_db(distance)? / 20.0))
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

/// Whether large-scale attenuation is applied when building channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PathLoss {
    #[default]
    Model,
    /// Unit amplitude on both hops (beam-pattern visualisation).
    Ignore,
}

/// Equivalent channels `h_br`, `h_ru` plus the link powers.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelPair {
    pub h_br: Vec<Complex64>,
    pub h_ru: Vec<Complex64>,
    /// Transmit power `P` in watts.
    pub tx_power: f64,
    /// Noise power `σ²` in watts.
    pub noise_power: f64,
}

impl ChannelPair {
    pub fn elements(&self) -> usize {
        self.h_br.len()
    }

    /// Per-element cascade `conj(h_br,s) · h_ru,s`.
    pub fn cascade(&self) -> Vec<Complex64> {
        self.h_br.iter().zip(&self.h_ru).map(|(b, u)| b.conj() * u).collect()
    }
}

/// `exp(-j 2π f_c path / c)`, with the phase reduced modulo one cycle before scaling.
fn carrier_phasor(carrier: f64, path: f64, light_speed: f64) -> Complex64 {
    Complex64::from_polar(1.0, -2.0 * PI * (carrier * path / light_speed).fract())
}

fn hop(geometry: &LinkGeometry, p: &Placement, amplitude: f64) -> Vec<Complex64> {
    geometry
        .layout
        .positions()
        .map(|(m, n)| {
            let path = p.distance - offset(&geometry.layout, m, n, p);
            amplitude * carrier_phasor(geometry.carrier, path, geometry.light_speed)
        })
        .collect()
}

/// Channels for explicit powers in watts.
pub fn build_channels_watts(
    geometry: &LinkGeometry,
    tx_power: f64,
    noise_power: f64,
    path_loss: PathLoss,
) -> Result<ChannelPair> {
    if !(tx_power > 0.0 && noise_power > 0.0) {
        return Err(Error::domain("transmit and noise powers must be positive"));
    }
    let (eta_br, eta_ru) = match path_loss {
        PathLoss::Model => (
            path_loss_amplitude(geometry.bs.distance)?,
            path_loss_amplitude(geometry.user.distance)?,
        ),
        PathLoss::Ignore => (1.0, 1.0),
    };
    Ok(ChannelPair {
        h_br: hop(geometry, &geometry.bs, tx_power.sqrt() * eta_br),
        h_ru: hop(geometry, &geometry.user, eta_ru),
        tx_power,
        noise_power,
    })
}

/// Channels with powers given in dBm and the path-loss model applied.
pub fn build_channels(geometry: &LinkGeometry, tx_power_dbm: f64, noise_dbm: f64) -> Result<ChannelPair> {
    build_channels_watts(geometry, dbm_to_watts(tx_power_dbm), dbm_to_watts(noise_dbm), PathLoss::Model)
}

/// Diagonal of `Θ`: one equivalent reflection coefficient per element.
pub fn build_theta(
    codes: &ReflectionCodes,
    alphabet: &PhaseAlphabet,
    scheme: &ModulationScheme,
    geometry: &LinkGeometry,
    ctx: &EvaluationContext,
) -> Result<Vec<Complex64>> {
    if codes.elements() != geometry.layout.elements() {
        return Err(Error::Dimension {
            what: "code rows vs array elements",
            expected: geometry.layout.elements(),
            got: codes.elements(),
        });
    }
    if codes.slots() != scheme.slots {
        return Err(Error::Dimension { what: "code slots", expected: scheme.slots, got: codes.slots() });
    }
    let table = FourierTable::cached(scheme.slots, scheme.truncation)?;
    geometry
        .user_delays()
        .iter()
        .enumerate()
        .map(|(s, delay)| {
            let b = harmonic_phases(scheme.mod_freq, ctx.obs_time - delay, scheme.truncation);
            equivalent_theta(codes.row(s), alphabet, &table, &b)
        })
        .collect()
}

/// Scalar cascaded gain `h_brᴴ Θ h_ru`.
pub fn effective_gain(pair: &ChannelPair, theta: &[Complex64]) -> Result<Complex64> {
    if theta.len() != pair.elements() || pair.h_ru.len() != pair.elements() {
        return Err(Error::Dimension { what: "theta length", expected: pair.elements(), got: theta.len() });
    }
    Ok(pair
        .h_br
        .iter()
        .zip(theta)
        .zip(&pair.h_ru)
        .map(|((b, t), u)| b.conj() * t * u)
        .sum())
}
