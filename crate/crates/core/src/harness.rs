//! Experiment orchestration: single optimizations, beam patterns, and sweeps
//! over element count, transmit power or phase resolution.
//!
//! Every file written here starts with (CSV) or contains (JSON) the seed and
//! the configuration hash, and identical inputs produce identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ceo;
use crate::config::{OptimizerMethod, RunRecord, ScenarioConfig, TOOL_VERSION};
use crate::error::{Error, Result};
use crate::ga::ga_run;
use crate::geometry::{dbm_to_watts, EvaluationContext, Placement};
use crate::pattern::{beam_pattern, ris_quantized_oracle, GridSpec, PatternGrid};
use crate::signal::ReflectionCodes;

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.display().to_string(), source })
}

fn csv_banner(seed: u64, hash: &str) -> String {
    format!("# fdris {TOOL_VERSION} seed={seed} config_hash={hash}\n")
}

/// Run the optimizer selected in `config`.
pub fn optimize(config: &ScenarioConfig) -> Result<RunRecord> {
    config.validate()?;
    let scenario = config.scenario()?;
    let (codes, f0, rate, iterations, evaluations, history) = match config.optimizer.method {
        OptimizerMethod::Ceo => {
            let cfg = config.ceo_config();
            let state = ceo::run(&scenario, &cfg)?;
            let best = state.best.clone().ok_or_else(|| Error::domain("optimizer produced no candidate"))?;
            (best.codes, best.mod_freq, best.objective, state.iter, state.iter * cfg.pop_size, state.history)
        }
        OptimizerMethod::Ga => {
            let cfg = config.ga_config();
            let out = ga_run(&scenario, &cfg)?;
            let evals = cfg.pop_size + cfg.generations * (cfg.pop_size - cfg.elitism_count);
            (out.best.codes, out.best.mod_freq, out.best.objective, cfg.generations, evals, out.history)
        }
        OptimizerMethod::Oracle => {
            let oracle = ris_quantized_oracle(scenario.channels(), scenario.alphabet());
            let f0 = config.modulation.f_min;
            let rate = scenario.rate(&oracle.codes, f0);
            let evals = scenario.elements() * scenario.alphabet().size();
            (oracle.codes, f0, rate, 1, evals, Vec::new())
        }
    };
    Ok(RunRecord {
        tool_version: TOOL_VERSION.to_string(),
        config_hash: config.hash(),
        seed: config.seed,
        method: config.optimizer.method,
        config: config.clone(),
        best_rate: rate,
        best_mod_freq: f0,
        best_codes: codes.to_rows_one_based(),
        iterations,
        evaluations,
        history,
        wall_clock_s: None,
    })
}

fn load_with_seed(config_path: &Path, seed: Option<u64>) -> Result<ScenarioConfig> {
    let mut config = ScenarioConfig::load(config_path)?;
    if let Some(s) = seed {
        config.seed = s;
    }
    Ok(config)
}

fn summary_line(record: &RunRecord) -> String {
    format!(
        "method={} S={} L={} bits={} rate={:.6} bits/s/Hz f0={:.3} Hz iterations={} seed={} config_hash={}",
        record.method.as_str(),
        record.config.elements(),
        record.config.modulation.slots,
        record.config.modulation.bits,
        record.best_rate,
        record.best_mod_freq,
        record.iterations,
        record.seed,
        record.config_hash,
    )
}

/// Optimize the scenario in `config_path`; writes `record.json` and `summary.txt`.
pub fn cmd_optimize(config_path: &Path, out_dir: &Path, seed: Option<u64>, record_timing: bool) -> Result<RunRecord> {
    let config = load_with_seed(config_path, seed)?;
    let start = Instant::now();
    let mut record = optimize(&config)?;
    if record_timing {
        record.wall_clock_s = Some(start.elapsed().as_secs_f64());
    }
    ensure_dir(out_dir)?;
    write_file(&out_dir.join("record.json"), &record.to_json()?)?;
    let line = summary_line(&record);
    write_file(&out_dir.join("summary.txt"), &format!("{line}\n"))?;
    println!("{line}");
    Ok(record)
}

/// Beam pattern of a record's best design plus its received power at the record's own user position.
pub fn pattern_for_record(record: &RunRecord, grid: &GridSpec, include_path_loss: bool) -> Result<(PatternGrid, f64)> {
    let cfg = &record.config;
    let geometry = cfg.link_geometry()?;
    let alphabet = cfg.alphabet()?;
    let codes = ReflectionCodes::from_rows_one_based(&record.best_codes, alphabet.size())?;
    let scheme = cfg.scheme(record.best_mod_freq)?;
    let ctx = EvaluationContext { obs_time: cfg.obs_time() };
    let tx = dbm_to_watts(cfg.power.tx_dbm);
    let pattern = beam_pattern(&codes, &alphabet, &scheme, &geometry, grid, include_path_loss, tx, &ctx)?;
    let user: Placement = geometry.user;
    let at_target = GridSpec { distances: vec![user.distance], azimuths: vec![user.azimuth], elevation: user.elevation };
    let target = beam_pattern(&codes, &alphabet, &scheme, &geometry, &at_target, include_path_loss, tx, &ctx)?;
    Ok((pattern, target.values[0]))
}

#[derive(Debug, Clone)]
pub struct PatternRequest {
    pub grid: GridSpec,
    pub include_path_loss: bool,
    /// Record supplying the design; the config is optimized when absent.
    pub record: Option<PathBuf>,
    /// Optional second record (typically a static surface) to compare against.
    pub baseline: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PatternSummary {
    pub seed: u64,
    pub config_hash: String,
    pub include_path_loss: bool,
    pub target_power: f64,
    pub grid_peak_power: f64,
    pub baseline_target_power: Option<f64>,
    pub baseline_grid_peak_power: Option<f64>,
    /// `target_power / baseline_target_power`.
    pub target_power_ratio: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct PatternOutcome {
    pub pattern: PatternGrid,
    pub baseline: Option<PatternGrid>,
    pub summary: PatternSummary,
}

/// Write `pattern.{csv,json}`, optional `baseline_pattern.{csv,json}` and `pattern_summary.json`.
pub fn cmd_pattern(config_path: &Path, out_dir: &Path, seed: Option<u64>, request: &PatternRequest) -> Result<PatternOutcome> {
    let config = load_with_seed(config_path, seed)?;
    ensure_dir(out_dir)?;
    let record = match &request.record {
        Some(path) => RunRecord::load(path)?,
        None => {
            let rec = optimize(&config)?;
            write_file(&out_dir.join("record.json"), &rec.to_json()?)?;
            rec
        }
    };
    let banner = csv_banner(record.seed, &record.config_hash);
    let (pattern, target_power) = pattern_for_record(&record, &request.grid, request.include_path_loss)?;
    write_file(&out_dir.join("pattern.csv"), &format!("{banner}{}", pattern.to_csv()))?;
    write_file(&out_dir.join("pattern.json"), &pattern_json(&pattern, &record)?)?;

    let baseline = match &request.baseline {
        Some(path) => {
            let base = RunRecord::load(path)?;
            let (grid, power) = pattern_for_record(&base, &request.grid, request.include_path_loss)?;
            let banner = csv_banner(base.seed, &base.config_hash);
            write_file(&out_dir.join("baseline_pattern.csv"), &format!("{banner}{}", grid.to_csv()))?;
            write_file(&out_dir.join("baseline_pattern.json"), &pattern_json(&grid, &base)?)?;
            Some((grid, power))
        }
        None => None,
    };
    let summary = PatternSummary {
        seed: record.seed,
        config_hash: record.config_hash.clone(),
        include_path_loss: request.include_path_loss,
        target_power,
        grid_peak_power: pattern.peak().0,
        baseline_target_power: baseline.as_ref().map(|b| b.1),
        baseline_grid_peak_power: baseline.as_ref().map(|b| b.0.peak().0),
        target_power_ratio: baseline.as_ref().map(|b| target_power / b.1),
    };
    write_file(&out_dir.join("pattern_summary.json"), &serde_json::to_string_pretty(&summary)?)?;
    match summary.target_power_ratio {
        Some(r) => println!("target power {target_power:.6} vs baseline {:.6}: ratio {r:.4}", summary.baseline_target_power.unwrap_or(0.0)),
        None => println!("target power {target_power:.6}, grid peak {:.6}", summary.grid_peak_power),
    }
    Ok(PatternOutcome { pattern, baseline: baseline.map(|b| b.0), summary })
}

fn pattern_json(grid: &PatternGrid, record: &RunRecord) -> Result<String> {
    let mut value: serde_json::Value = serde_json::from_str(&grid.to_json()?)?;
    value["seed"] = record.seed.into();
    value["config_hash"] = record.config_hash.clone().into();
    Ok(serde_json::to_string_pretty(&value)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepAxis {
    /// Element count (square-ish layout).
    S,
    /// Transmit power in dBm.
    P,
    /// Phase resolution in bits.
    Bits,
}

impl FromStr for SweepAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "S" | "s" => Ok(SweepAxis::S),
            "P" | "p" => Ok(SweepAxis::P),
            "bits" | "b" => Ok(SweepAxis::Bits),
            other => Err(Error::invalid("vary", format!("unknown axis `{other}` (expected S, P or bits)"))),
        }
    }
}

impl SweepAxis {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepAxis::S => "S",
            SweepAxis::P => "P",
            SweepAxis::Bits => "bits",
        }
    }
}

/// Surface type and optimizer for one sweep curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepMethod {
    FdrisCeo,
    FdrisGa,
    RisCeo,
    RisGa,
    RisOracle,
}

impl FromStr for SweepMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fdris-ceo" => Ok(SweepMethod::FdrisCeo),
            "fdris-ga" => Ok(SweepMethod::FdrisGa),
            "ris-ceo" => Ok(SweepMethod::RisCeo),
            "ris-ga" => Ok(SweepMethod::RisGa),
            "ris-oracle" => Ok(SweepMethod::RisOracle),
            other => Err(Error::invalid(
                "methods",
                format!("unknown method `{other}` (expected fdris-ceo, fdris-ga, ris-ceo, ris-ga, ris-oracle)"),
            )),
        }
    }
}

impl SweepMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepMethod::FdrisCeo => "fdris-ceo",
            SweepMethod::FdrisGa => "fdris-ga",
            SweepMethod::RisCeo => "ris-ceo",
            SweepMethod::RisGa => "ris-ga",
            SweepMethod::RisOracle => "ris-oracle",
        }
    }

    pub fn is_fdris(self) -> bool {
        matches!(self, SweepMethod::FdrisCeo | SweepMethod::FdrisGa)
    }

    /// `config` specialised to this surface type and optimizer.
    pub fn apply(self, config: &ScenarioConfig) -> ScenarioConfig {
        let mut c = config.clone();
        if !self.is_fdris() {
            c.modulation.slots = 1;
        }
        c.optimizer.method = match self {
            SweepMethod::FdrisCeo | SweepMethod::RisCeo => OptimizerMethod::Ceo,
            SweepMethod::FdrisGa | SweepMethod::RisGa => OptimizerMethod::Ga,
            SweepMethod::RisOracle => OptimizerMethod::Oracle,
        };
        c
    }
}

/// Near-square `rows × cols = S` with `rows <= cols`.
pub fn layout_for(elements: usize) -> (usize, usize) {
    let mut rows = (elements as f64).sqrt().floor() as usize;
    while rows > 1 && !elements.is_multiple_of(rows) {
        rows -= 1;
    }
    let rows = rows.max(1);
    (rows, elements / rows)
}

/// `config` with the sweep axis set to `value`.
pub fn apply_axis(config: &ScenarioConfig, axis: SweepAxis, value: f64) -> Result<ScenarioConfig> {
    let mut c = config.clone();
    match axis {
        SweepAxis::S => {
            if !(value >= 1.0 && value.fract() == 0.0) {
                return Err(Error::invalid("values", format!("element count must be a positive integer, got {value}")));
            }
            let (rows, cols) = layout_for(value as usize);
            c.geometry.rows = rows;
            c.geometry.cols = cols;
        }
        SweepAxis::P => c.power.tx_dbm = value,
        SweepAxis::Bits => {
            if !(value >= 1.0 && value.fract() == 0.0) {
                return Err(Error::invalid("values", format!("bit count must be a positive integer, got {value}")));
            }
            c.modulation.bits = value as u32;
        }
    }
    c.validate()?;
    Ok(c)
}

#[derive(Debug, Clone)]
pub struct SweepRequest {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub methods: Vec<SweepMethod>,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub axis_value: f64,
    pub method: String,
    pub mean_rate: f64,
    /// Sample standard deviation over trials (0 for a single trial).
    pub std_rate: f64,
    pub trials: usize,
    pub rates: Vec<f64>,
    pub seeds: Vec<u64>,
}

/// FD-RIS vs static-surface advantage expressed as equivalent transmit power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainRow {
    pub axis_value: f64,
    pub fdris_method: String,
    pub ris_method: String,
    /// `10 log10((2^R_fd - 1) / (2^R_ris - 1))`: extra power the static surface needs at equal channel gain.
    pub snr_equivalent_gain_db: f64,
    /// Power-axis interpolation of the static curve to the FD-RIS rate (P sweeps, in range only).
    pub interpolated_gain_db: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub axis: SweepAxis,
    pub seed: u64,
    pub config_hash: String,
    pub cells: Vec<SweepCell>,
    pub gains: Vec<GainRow>,
}

impl SweepOutcome {
    pub fn cell(&self, axis_value: f64, method: SweepMethod) -> Option<&SweepCell> {
        self.cells
            .iter()
            .find(|c| c.axis_value == axis_value && c.method == method.as_str())
    }

    pub fn to_csv(&self) -> String {
        let mut out = csv_banner(self.seed, &self.config_hash);
        out.push_str("axis_value,method,mean_rate,std_rate,trials\n");
        for c in &self.cells {
            let _ = writeln!(out, "{},{},{},{},{}", c.axis_value, c.method, c.mean_rate, c.std_rate, c.trials);
        }
        out
    }

    pub fn gains_csv(&self) -> String {
        let mut out = csv_banner(self.seed, &self.config_hash);
        out.push_str("axis_value,fdris_method,ris_method,snr_equivalent_gain_db,interpolated_gain_db\n");
        for g in &self.gains {
            let interp = g.interpolated_gain_db.map_or(String::new(), |v| v.to_string());
            let _ = writeln!(out, "{},{},{},{},{}", g.axis_value, g.fdris_method, g.ris_method, g.snr_equivalent_gain_db, interp);
        }
        out
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Power (dBm) at which the piecewise-linear curve `(p, r)` reaches `rate`.
fn interpolate_power(curve: &[(f64, f64)], rate: f64) -> Option<f64> {
    curve.windows(2).find_map(|w| {
        let ((p0, r0), (p1, r1)) = (w[0], w[1]);
        if r0 == r1 || (rate - r0) * (rate - r1) > 0.0 {
            return None;
        }
        Some(p0 + (rate - r0) * (p1 - p0) / (r1 - r0))
    })
}

fn gain_rows(axis: SweepAxis, values: &[f64], methods: &[SweepMethod], cells: &[SweepCell]) -> Vec<GainRow> {
    let find = |v: f64, m: SweepMethod| cells.iter().find(|c| c.axis_value == v && c.method == m.as_str());
    let mut rows = Vec::new();
    for &fd in methods.iter().filter(|m| m.is_fdris()) {
        for &ris in methods.iter().filter(|m| !m.is_fdris()) {
            let mut curve: Vec<(f64, f64)> = values
                .iter()
                .filter_map(|&v| find(v, ris).map(|c| (v, c.mean_rate)))
                .collect();
            curve.sort_by(|a, b| a.0.total_cmp(&b.0));
            for &v in values {
                let (Some(f), Some(r)) = (find(v, fd), find(v, ris)) else { continue };
                let snr_gain = 10.0 * ((2f64.powf(f.mean_rate) - 1.0) / (2f64.powf(r.mean_rate) - 1.0)).log10();
                let interpolated = match axis {
                    SweepAxis::P => interpolate_power(&curve, f.mean_rate).map(|p| p - v),
                    _ => None,
                };
                rows.push(GainRow {
                    axis_value: v,
                    fdris_method: fd.as_str().into(),
                    ris_method: ris.as_str().into(),
                    snr_equivalent_gain_db: snr_gain,
                    interpolated_gain_db: interpolated,
                });
            }
        }
    }
    rows
}

/// Run every (value, method, trial) job; trial `k` uses seed `config.seed + k` for all methods.
pub fn sweep(config: &ScenarioConfig, request: &SweepRequest) -> Result<SweepOutcome> {
    if request.values.is_empty() || request.methods.is_empty() || request.trials == 0 {
        return Err(Error::invalid("sweep", "need at least one value, one method and one trial"));
    }
    let mut jobs = Vec::new();
    for &v in &request.values {
        let axis_cfg = apply_axis(config, request.axis, v)?;
        for &m in &request.methods {
            let method_cfg = m.apply(&axis_cfg);
            method_cfg.validate()?;
            for t in 0..request.trials {
                let mut c = method_cfg.clone();
                c.seed = config.seed.wrapping_add(t as u64);
                jobs.push((v, m, c));
            }
        }
    }
    let rates: Vec<f64> = jobs
        .par_iter()
        .map(|(_, _, c)| optimize(c).map(|r| r.best_rate))
        .collect::<Result<_>>()?;

    let mut cells = Vec::new();
    for (chunk, rate_chunk) in jobs.chunks(request.trials).zip(rates.chunks(request.trials)) {
        let (v, m, _) = &chunk[0];
        let (mean, std) = mean_std(rate_chunk);
        cells.push(SweepCell {
            axis_value: *v,
            method: m.as_str().into(),
            mean_rate: mean,
            std_rate: std,
            trials: request.trials,
            rates: rate_chunk.to_vec(),
            seeds: chunk.iter().map(|j| j.2.seed).collect(),
        });
    }
    let gains = gain_rows(request.axis, &request.values, &request.methods, &cells);
    Ok(SweepOutcome { axis: request.axis, seed: config.seed, config_hash: config.hash(), cells, gains })
}

/// Write `sweep.csv`, `sweep.json`, and `gain_db.csv` when both surface types are present.
pub fn cmd_sweep(config_path: &Path, out_dir: &Path, seed: Option<u64>, request: &SweepRequest) -> Result<SweepOutcome> {
    let config = load_with_seed(config_path, seed)?;
    let outcome = sweep(&config, request)?;
    ensure_dir(out_dir)?;
    write_file(&out_dir.join("sweep.csv"), &outcome.to_csv())?;
    write_file(&out_dir.join("sweep.json"), &serde_json::to_string_pretty(&outcome)?)?;
    if !outcome.gains.is_empty() {
        write_file(&out_dir.join("gain_db.csv"), &outcome.gains_csv())?;
    }
    for c in &outcome.cells {
        println!(
            "{}={} {:<10} mean={:.4} std={:.4} trials={}",
            request.axis.as_str(),
            c.axis_value,
            c.method,
            c.mean_rate,
            c.std_rate,
            c.trials
        );
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layouts_are_near_square() {
        assert_eq!(layout_for(100), (10, 10));
        assert_eq!(layout_for(36), (6, 6));
        assert_eq!(layout_for(12), (3, 4));
        assert_eq!(layout_for(7), (1, 7));
        assert_eq!(layout_for(1), (1, 1));
    }

    #[test]
    fn axis_and_method_parsing() {
        assert_eq!("S".parse::<SweepAxis>().unwrap(), SweepAxis::S);
        assert_eq!("bits".parse::<SweepAxis>().unwrap(), SweepAxis::Bits);
        assert!("Q".parse::<SweepAxis>().is_err());
        assert_eq!("ris-oracle".parse::<SweepMethod>().unwrap(), SweepMethod::RisOracle);
        assert!("fd".parse::<SweepMethod>().is_err());
    }

    #[test]
    fn power_interpolation() {
        let curve = [(10.0, 1.0), (20.0, 3.0), (30.0, 6.0)];
        assert_eq!(interpolate_power(&curve, 2.0), Some(15.0));
        assert_eq!(interpolate_power(&curve, 4.5), Some(25.0));
        assert_eq!(interpolate_power(&curve, 7.0), None);
    }

    #[test]
    fn sample_std() {
        assert_eq!(mean_std(&[2.0]), (2.0, 0.0));
        let (m, s) = mean_std(&[1.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((s - 2f64.sqrt()).abs() < 1e-15);
    }
}
