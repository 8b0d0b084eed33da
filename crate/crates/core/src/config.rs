//! Scenario files and run records.
//!
//! A scenario is one JSON document; every field has a default, so `{}` is a
//! valid file describing the reference link (10×10 surface at 28 GHz, BS at
//! 30 m, user at 150 m / 90° / 30°, `L = 7`, `Z = 3`, 2-bit phases,
//! `f0 ∈ [100, 280] kHz`, 30 dBm transmit power, −110 dBm noise).

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ceo::{CeoConfig, IterationRecord};
use crate::error::{Error, Result};
use crate::ga::GaConfig;
use crate::geometry::{dbm_to_watts, ArrayLayout, LinkGeometry, Placement, LIGHT_SPEED};
use crate::scenario::{EvalMode, Scenario, MIN_AVERAGE_SAMPLES};
use crate::signal::{ModulationScheme, PhaseAlphabet, MAX_PHASE_BITS};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlacementDeg {
    pub distance: f64,
    pub elevation_deg: f64,
    pub azimuth_deg: f64,
}

impl PlacementDeg {
    fn to_placement(self, field: &str) -> Result<Placement> {
        Placement::from_degrees(self.distance, self.elevation_deg, self.azimuth_deg)
            .map_err(|e| Error::invalid(field, e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryBlock {
    pub rows: usize,
    pub cols: usize,
    /// Element spacing in meters; half a carrier wavelength when absent.
    pub spacing: Option<f64>,
    pub carrier_hz: f64,
    pub bs: PlacementDeg,
    pub user: PlacementDeg,
}

impl Default for GeometryBlock {
    fn default() -> Self {
        Self {
            rows: 10,
            cols: 10,
            spacing: None,
            carrier_hz: 28e9,
            bs: PlacementDeg { distance: 30.0, elevation_deg: 90.0, azimuth_deg: 0.0 },
            user: PlacementDeg { distance: 150.0, elevation_deg: 90.0, azimuth_deg: 30.0 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModulationBlock {
    pub slots: usize,
    pub truncation: usize,
    pub f_min: f64,
    pub f_max: f64,
    pub bits: u32,
}

impl Default for ModulationBlock {
    fn default() -> Self {
        Self { slots: 7, truncation: 3, f_min: 1.0e5, f_max: 2.8e5, bits: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowerBlock {
    pub tx_dbm: f64,
    pub noise_dbm: f64,
}

impl Default for PowerBlock {
    fn default() -> Self {
        Self { tx_dbm: 30.0, noise_dbm: -110.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerMethod {
    Ceo,
    Ga,
    /// Exact quantized optimum; static surfaces (`slots = 1`) only.
    Oracle,
}

impl OptimizerMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            OptimizerMethod::Ceo => "ceo",
            OptimizerMethod::Ga => "ga",
            OptimizerMethod::Oracle => "oracle",
        }
    }
}

/// Cross-entropy settings stored in a scenario file (bounds and seed come from
/// the modulation block and the top-level seed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CeoTuning {
    pub pop_size: usize,
    pub elite_frac: f64,
    pub smoothing: f64,
    pub max_iters: usize,
    pub stall_iters: usize,
    pub stall_tol: f64,
    pub prob_floor: f64,
    pub std_floor_frac: f64,
}

impl Default for CeoTuning {
    fn default() -> Self {
        let c = CeoConfig::default();
        Self {
            pop_size: c.pop_size,
            elite_frac: c.elite_frac,
            smoothing: c.smoothing,
            max_iters: c.max_iters,
            stall_iters: c.stall_iters,
            stall_tol: c.stall_tol,
            prob_floor: c.prob_floor,
            std_floor_frac: c.std_floor_frac,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaTuning {
    pub pop_size: usize,
    pub generations: usize,
    pub tournament_size: usize,
    pub crossover_rate: f64,
    pub mutation_rate_discrete: Option<f64>,
    pub mutation_sigma_freq: Option<f64>,
    pub elitism_count: usize,
}

impl Default for GaTuning {
    fn default() -> Self {
        let g = GaConfig::default();
        Self {
            pop_size: g.pop_size,
            generations: g.generations,
            tournament_size: g.tournament_size,
            crossover_rate: g.crossover_rate,
            mutation_rate_discrete: g.mutation_rate_discrete,
            mutation_sigma_freq: g.mutation_sigma_freq,
            elitism_count: g.elitism_count,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerBlock {
    pub method: OptimizerMethod,
    pub ceo: CeoTuning,
    pub ga: GaTuning,
}

impl Default for OptimizerBlock {
    fn default() -> Self {
        Self { method: OptimizerMethod::Ceo, ceo: CeoTuning::default(), ga: GaTuning::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvaluationKind {
    Snapshot,
    TimeAveraged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluationBlock {
    pub mode: EvaluationKind,
    /// Snapshot instant in seconds; `d_ru / c` when absent.
    pub obs_time: Option<f64>,
    /// Samples per period for the time-averaged objective.
    pub samples: usize,
}

impl Default for EvaluationBlock {
    fn default() -> Self {
        Self { mode: EvaluationKind::Snapshot, obs_time: None, samples: MIN_AVERAGE_SAMPLES }
    }
}

/// Complete description of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub geometry: GeometryBlock,
    pub modulation: ModulationBlock,
    pub power: PowerBlock,
    pub optimizer: OptimizerBlock,
    pub evaluation: EvaluationBlock,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            geometry: GeometryBlock::default(),
            modulation: ModulationBlock::default(),
            power: PowerBlock::default(),
            optimizer: OptimizerBlock::default(),
            evaluation: EvaluationBlock::default(),
            seed: 1,
        }
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be a positive number, got {v}")))
    }
}

fn finite(field: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(field, "must be finite"))
    }
}

impl ScenarioConfig {
    /// Parse JSON text, fill implied values and validate.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| Error::ConfigParse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let cfg = cfg.resolved();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Replace implied defaults (spacing, snapshot time) with concrete values.
    pub fn resolved(mut self) -> Self {
        if self.geometry.spacing.is_none() && self.geometry.carrier_hz > 0.0 {
            self.geometry.spacing = Some(LIGHT_SPEED / (2.0 * self.geometry.carrier_hz));
        }
        if self.evaluation.obs_time.is_none() {
            self.evaluation.obs_time = Some(self.geometry.user.distance / LIGHT_SPEED);
        }
        self
    }

    /// Same scenario with the snapshot instant re-derived from the user distance.
    pub fn with_user_distance(mut self, distance: f64) -> Self {
        self.geometry.user.distance = distance;
        self.evaluation.obs_time = None;
        self.resolved()
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.geometry;
        if g.rows == 0 {
            return Err(Error::invalid("geometry.rows", "must be at least 1"));
        }
        if g.cols == 0 {
            return Err(Error::invalid("geometry.cols", "must be at least 1"));
        }
        if let Some(d) = g.spacing {
            positive("geometry.spacing", d)?;
        }
        positive("geometry.carrier_hz", g.carrier_hz)?;
        g.bs.to_placement("geometry.bs")?;
        g.user.to_placement("geometry.user")?;

        let m = &self.modulation;
        if m.slots == 0 {
            return Err(Error::invalid("modulation.slots", "must be at least 1"));
        }
        positive("modulation.f_min", m.f_min)?;
        positive("modulation.f_max", m.f_max)?;
        if m.f_min > m.f_max {
            return Err(Error::invalid(
                "modulation.f_min",
                format!("f_min ({}) exceeds f_max ({})", m.f_min, m.f_max),
            ));
        }
        if !(1..=MAX_PHASE_BITS).contains(&m.bits) {
            return Err(Error::invalid("modulation.bits", format!("must be 1..={MAX_PHASE_BITS}")));
        }

        finite("power.tx_dbm", self.power.tx_dbm)?;
        finite("power.noise_dbm", self.power.noise_dbm)?;

        if let Some(t) = self.evaluation.obs_time {
            finite("evaluation.obs_time", t)?;
        }
        if self.evaluation.mode == EvaluationKind::TimeAveraged && self.evaluation.samples < MIN_AVERAGE_SAMPLES {
            return Err(Error::invalid(
                "evaluation.samples",
                format!("time averaging needs at least {MIN_AVERAGE_SAMPLES} samples"),
            ));
        }

        self.ceo_config()
            .validate()
            .map_err(|e| prefix_field(e, "optimizer.ceo"))?;
        self.ga_config()
            .validate()
            .map_err(|e| prefix_field(e, "optimizer.ga"))?;
        if self.optimizer.method == OptimizerMethod::Oracle && m.slots != 1 {
            return Err(Error::invalid("optimizer.method", "oracle requires modulation.slots = 1"));
        }
        Ok(())
    }

    /// Short content hash of the resolved configuration.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(&self.clone().resolved()).expect("config serializes");
        let digest = Sha256::digest(&canonical);
        hex::encode(&digest[..8])
    }

    pub fn elements(&self) -> usize {
        self.geometry.rows * self.geometry.cols
    }

    pub fn spacing(&self) -> f64 {
        self.geometry
            .spacing
            .unwrap_or(LIGHT_SPEED / (2.0 * self.geometry.carrier_hz))
    }

    pub fn link_geometry(&self) -> Result<LinkGeometry> {
        let g = &self.geometry;
        let layout = ArrayLayout::new(g.rows, g.cols, self.spacing())?;
        LinkGeometry::new(layout, g.bs.to_placement("geometry.bs")?, g.user.to_placement("geometry.user")?, g.carrier_hz)
    }

    pub fn alphabet(&self) -> Result<PhaseAlphabet> {
        PhaseAlphabet::new(self.modulation.bits)
    }

    pub fn obs_time(&self) -> f64 {
        self.evaluation
            .obs_time
            .unwrap_or(self.geometry.user.distance / LIGHT_SPEED)
    }

    pub fn eval_mode(&self) -> EvalMode {
        match self.evaluation.mode {
            EvaluationKind::Snapshot => EvalMode::Snapshot { obs_time: self.obs_time() },
            EvaluationKind::TimeAveraged => EvalMode::TimeAveraged { samples: self.evaluation.samples },
        }
    }

    pub fn scheme(&self, mod_freq: f64) -> Result<ModulationScheme> {
        ModulationScheme::new(self.modulation.slots, mod_freq, self.modulation.truncation)
    }

    pub fn scenario(&self) -> Result<Scenario> {
        let m = &self.modulation;
        Scenario::new(
            self.link_geometry()?,
            self.alphabet()?,
            m.slots,
            m.truncation,
            dbm_to_watts(self.power.tx_dbm),
            dbm_to_watts(self.power.noise_dbm),
            (m.f_min, m.f_max),
            self.eval_mode(),
        )
    }

    pub fn ceo_config(&self) -> CeoConfig {
        let t = &self.optimizer.ceo;
        CeoConfig {
            pop_size: t.pop_size,
            elite_frac: t.elite_frac,
            smoothing: t.smoothing,
            freq_bounds: (self.modulation.f_min, self.modulation.f_max),
            max_iters: t.max_iters,
            stall_iters: t.stall_iters,
            stall_tol: t.stall_tol,
            rng_seed: self.seed,
            prob_floor: t.prob_floor,
            std_floor_frac: t.std_floor_frac,
        }
    }

    pub fn ga_config(&self) -> GaConfig {
        let t = &self.optimizer.ga;
        GaConfig {
            pop_size: t.pop_size,
            generations: t.generations,
            tournament_size: t.tournament_size,
            crossover_rate: t.crossover_rate,
            mutation_rate_discrete: t.mutation_rate_discrete,
            mutation_sigma_freq: t.mutation_sigma_freq,
            elitism_count: t.elitism_count,
            rng_seed: self.seed,
            freq_bounds: (self.modulation.f_min, self.modulation.f_max),
        }
    }
}

fn prefix_field(e: Error, prefix: &str) -> Error {
    match e {
        Error::ConfigInvalid { field, message } => Error::ConfigInvalid { field: format!("{prefix}.{field}"), message },
        other => other,
    }
}

/// Persisted outcome of one optimization run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub tool_version: String,
    pub config_hash: String,
    pub seed: u64,
    pub method: OptimizerMethod,
    /// Resolved scenario snapshot; re-running it reproduces this record.
    pub config: ScenarioConfig,
    /// Best achievable rate, bits/s/Hz.
    pub best_rate: f64,
    /// Best modulation frequency, Hz.
    pub best_mod_freq: f64,
    /// Best codes as rows of 1-based alphabet numbers.
    pub best_codes: Vec<Vec<u32>>,
    pub iterations: usize,
    pub evaluations: usize,
    pub history: Vec<IterationRecord>,
    /// Wall-clock seconds; only recorded on request since it breaks byte-identical reruns.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_clock_s: Option<f64>,
}

impl RunRecord {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
