//! Seeded Monte Carlo experiment runner: per-trial instantiation, parallel
//! execution, aggregation into phase-transition sweeps, CSV/JSON emission,
//! and paired procedure comparison.
//!
//! Determinism contract: every trial derives its random streams from
//! `(seed, grid point, trial index)` via counter-based stream selection, so
//! results are bit-identical regardless of how trials are scheduled across
//! threads.

use crate::error::{Error, Result};
use crate::recovery_cass::{
    cass_intervals, cass_sset, cass_star, cass_submatrix, nonadaptive_baseline,
};
use crate::recovery_slrt::{
    recover_intervals, recover_sset, recover_star, recover_submatrix,
    recover_submatrix_single_column, recover_union_stars, RecoveryResult,
};
use crate::sensing::{BudgetMode, LogPolicy, SensingOracle, SignalInstance};
use crate::support::{sample_support, symmetric_difference_indices, SupportClass, SupportSet};
use crate::theory::{self, ThresholdReport};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// Recovery procedure selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcedureId {
    Sset,
    Intervals,
    Star,
    UnionStars,
    Submatrix,
    SubmatrixSingleColumn,
    CassSset,
    CassIntervals,
    CassStar,
    CassSubmatrix,
    Baseline,
}

impl ProcedureId {
    pub fn name(&self) -> &'static str {
        match self {
            ProcedureId::Sset => "sset",
            ProcedureId::Intervals => "intervals",
            ProcedureId::Star => "star",
            ProcedureId::UnionStars => "union_stars",
            ProcedureId::Submatrix => "submatrix",
            ProcedureId::SubmatrixSingleColumn => "submatrix_single_column",
            ProcedureId::CassSset => "cass_sset",
            ProcedureId::CassIntervals => "cass_intervals",
            ProcedureId::CassStar => "cass_star",
            ProcedureId::CassSubmatrix => "cass_submatrix",
            ProcedureId::Baseline => "baseline",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "sset" => ProcedureId::Sset,
            "intervals" => ProcedureId::Intervals,
            "star" => ProcedureId::Star,
            "union_stars" => ProcedureId::UnionStars,
            "submatrix" => ProcedureId::Submatrix,
            "submatrix_single_column" => ProcedureId::SubmatrixSingleColumn,
            "cass_sset" => ProcedureId::CassSset,
            "cass_intervals" => ProcedureId::CassIntervals,
            "cass_star" => ProcedureId::CassStar,
            "cass_submatrix" => ProcedureId::CassSubmatrix,
            "baseline" => ProcedureId::Baseline,
            other => return Err(Error::Config(format!("procedure: unknown id '{other}'"))),
        })
    }
}

/// The signal-strength grid: absolute values or multiples of a named theory
/// threshold (resolved at sweep time).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum MuGridSpec {
    Absolute { values: Vec<f64> },
    ThresholdMultiples {
        /// Threshold id from the theory module; `None` picks the procedure's
        /// default sufficient threshold.
        #[serde(skip_serializing_if = "Option::is_none")]
        threshold: Option<String>,
        factors: Vec<f64>,
    },
}

impl MuGridSpec {
    pub fn single(mu: f64) -> Self {
        MuGridSpec::Absolute { values: vec![mu] }
    }
}

fn default_multiplier() -> f64 {
    4.0
}

fn default_trials() -> u64 {
    1
}

/// Everything needed to reproduce one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub class: SupportClass,
    pub procedure: ProcedureId,
    pub m: f64,
    pub epsilon: f64,
    pub mu_grid: MuGridSpec,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "ExperimentConfig::default_budget_mode")]
    pub budget_mode: BudgetMode,
    /// Hard-cap multiplier c: hard mode refuses once `c * m` is spent.
    #[serde(default = "default_multiplier")]
    pub hard_budget_multiplier: f64,
    /// Procedure calibration magnitude; defaults to the trial's signal mu.
    /// Must be set when the grid contains 0 (null signals).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration_mu: Option<f64>,
    /// Adversarial placement: when set, every trial uses this support
    /// instead of a uniform draw.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_support: Option<Vec<usize>>,
}

impl ExperimentConfig {
    fn default_budget_mode() -> BudgetMode {
        BudgetMode::Expected
    }

    pub fn validate(&self) -> Result<()> {
        self.class.validate().map_err(|e| Error::Config(format!("class: {e}")))?;
        if self.trials < 1 {
            return Err(Error::Config("trials: must be >= 1".into()));
        }
        // trial index and tag share the low 34 bits of the stream id
        if self.trials >= (1 << 32) {
            return Err(Error::Config("trials: must be below 2^32".into()));
        }
        if !(self.m > 0.0) {
            return Err(Error::Config("m: must be positive".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Config("epsilon: must lie in (0, 1)".into()));
        }
        if !(self.hard_budget_multiplier >= 1.0) {
            return Err(Error::Config("hard_budget_multiplier: must be >= 1".into()));
        }
        let grid_ok = match &self.mu_grid {
            MuGridSpec::Absolute { values } => {
                !values.is_empty()
                    && values.windows(2).all(|w| w[0] <= w[1])
                    && values.iter().all(|&v| v >= 0.0)
            }
            MuGridSpec::ThresholdMultiples { factors, .. } => {
                !factors.is_empty()
                    && factors.windows(2).all(|w| w[0] <= w[1])
                    && factors.iter().all(|&v| v >= 0.0)
            }
        };
        if !grid_ok {
            return Err(Error::Config(
                "mu_grid: must be nonempty, sorted, nonnegative".into(),
            ));
        }
        match (&self.procedure, &self.class) {
            (ProcedureId::Sset | ProcedureId::CassSset | ProcedureId::Baseline,
                SupportClass::Sset { .. }) => {}
            (ProcedureId::Intervals | ProcedureId::CassIntervals,
                SupportClass::Intervals { .. }) => {}
            (ProcedureId::Star | ProcedureId::CassStar, SupportClass::Stars { k: 1, .. }) => {}
            (ProcedureId::UnionStars, SupportClass::Stars { .. }) => {}
            (ProcedureId::Submatrix | ProcedureId::SubmatrixSingleColumn | ProcedureId::CassSubmatrix,
                SupportClass::Submatrix { .. }) => {}
            (p, c) => {
                return Err(Error::Config(format!(
                    "procedure: {} incompatible with class {:?}",
                    p.name(),
                    c
                )))
            }
        }
        if let Some(fixed) = &self.fixed_support {
            let set = SupportSet::new(fixed.clone(), self.class)
                .map_err(|e| Error::Config(format!("fixed_support: {e}")))?;
            if !set.validate_membership() {
                return Err(Error::Config(
                    "fixed_support: not a member of the class".into(),
                ));
            }
        }
        Ok(())
    }

    /// Resolves the grid to absolute signal magnitudes.
    pub fn resolve_mu_grid(&self) -> Result<Vec<f64>> {
        match &self.mu_grid {
            MuGridSpec::Absolute { values } => Ok(values.clone()),
            MuGridSpec::ThresholdMultiples { threshold, factors } => {
                let id = match threshold {
                    Some(id) => id.clone(),
                    None => theory::default_threshold_id(self.procedure.name())
                        .ok_or_else(|| {
                            Error::Config("mu_grid: no default threshold for procedure".into())
                        })?
                        .to_string(),
                };
                let base = theory::threshold_by_id(&self.class, self.m, self.epsilon, &id)?;
                Ok(factors.iter().map(|f| f * base).collect())
            }
        }
    }
}

/// One trial's outcome, flattened for CSV emission.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub schema_version: u32,
    pub point: usize,
    pub trial: u64,
    pub mu: f64,
    pub sym_diff: u64,
    pub exact: bool,
    pub energy: f64,
    pub samples: u64,
    pub search_energy: f64,
    pub refine_energy: f64,
    pub search_samples: u64,
    pub refine_samples: u64,
    pub truncated: bool,
    pub candidate_size: Option<usize>,
}

/// Runs the procedure once against a fresh instance. Deterministic in
/// `(config, point, trial)`.
pub fn run_trial(
    config: &ExperimentConfig,
    point: usize,
    mu: f64,
    trial: u64,
) -> Result<TrialRecord> {
    let cal_mu = config.calibration_mu.unwrap_or(mu);
    if !(cal_mu > 0.0) {
        return Err(Error::Config(
            "calibration_mu: required positive when the grid contains 0".into(),
        ));
    }
    let stream = |tag: u64| -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(config.seed);
        r.set_stream(((point as u64) << 34) | (trial << 2) | tag);
        r
    };

    let truth: Vec<usize> = match &config.fixed_support {
        Some(fixed) => fixed.clone(),
        None => {
            let mut srng = stream(0);
            sample_support(&config.class, &mut srng)?.indices().to_vec()
        }
    };
    let instance = if mu > 0.0 {
        let set = SupportSet::new(truth.clone(), config.class)?;
        SignalInstance::new(set, mu)?
    } else {
        SignalInstance::null(config.class.ambient_n())
    };
    let hard_cap = match config.budget_mode {
        BudgetMode::Expected => None,
        BudgetMode::Hard => Some(config.hard_budget_multiplier * config.m),
    };
    let mut oracle = SensingOracle::with_log(instance, stream(1), hard_cap, LogPolicy::Off);
    let mut proc_rng = stream(2);

    let result: RecoveryResult = match (config.procedure, config.class) {
        (ProcedureId::Sset, SupportClass::Sset { n, s }) => {
            recover_sset(&mut oracle, n, s, config.epsilon, cal_mu)?
        }
        (ProcedureId::Intervals, SupportClass::Intervals { n, s, k }) => {
            recover_intervals(&mut oracle, n, s, k, config.epsilon, cal_mu)?
        }
        (ProcedureId::Star, SupportClass::Stars { p, s, .. }) => {
            recover_star(&mut oracle, p, s, config.epsilon, cal_mu)?
        }
        (ProcedureId::UnionStars, SupportClass::Stars { p, s, k }) => {
            recover_union_stars(&mut oracle, p, s, k, config.epsilon, cal_mu)?
        }
        (ProcedureId::Submatrix, SupportClass::Submatrix { n_r, n_c, s_r, s_c }) => {
            recover_submatrix(&mut oracle, n_r, n_c, s_r, s_c, config.epsilon, cal_mu)?
        }
        (ProcedureId::SubmatrixSingleColumn, SupportClass::Submatrix { n_r, n_c, s_r, s_c }) => {
            recover_submatrix_single_column(
                &mut oracle,
                n_r,
                n_c,
                s_r,
                s_c,
                config.epsilon,
                cal_mu,
                &mut proc_rng,
            )?
        }
        (ProcedureId::CassSset, SupportClass::Sset { n, s }) => {
            cass_sset(&mut oracle, n, s, config.m, cal_mu)?
        }
        (ProcedureId::CassIntervals, SupportClass::Intervals { n, s, k }) => {
            cass_intervals(&mut oracle, n, s, k, config.m, cal_mu)?
        }
        (ProcedureId::CassStar, SupportClass::Stars { p, s, .. }) => {
            cass_star(&mut oracle, p, s, config.m, cal_mu)?
        }
        (ProcedureId::CassSubmatrix, SupportClass::Submatrix { n_r, n_c, s_r, s_c }) => {
            cass_submatrix(&mut oracle, n_r, n_c, s_r, s_c, config.m, cal_mu)?
        }
        (ProcedureId::Baseline, SupportClass::Sset { n, .. }) => {
            nonadaptive_baseline(&mut oracle, n, config.m, cal_mu)?
        }
        _ => unreachable!("validated procedure/class pairing"),
    };

    let sym_diff = symmetric_difference_indices(&result.estimate, &truth) as u64;
    Ok(TrialRecord {
        schema_version: SCHEMA_VERSION,
        point,
        trial,
        mu,
        sym_diff,
        exact: sym_diff == 0,
        energy: result.energy,
        samples: result.samples,
        search_energy: result.phases.search_energy,
        refine_energy: result.phases.refine_energy,
        search_samples: result.phases.search_samples,
        refine_samples: result.phases.refine_samples,
        truncated: result.truncated,
        candidate_size: result.candidate_size,
    })
}

/// Aggregate statistics at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub mu: f64,
    pub trials: u64,
    pub mean_sym_diff: f64,
    /// Half-width of the 95% normal-approximation confidence band on the
    /// mean symmetric difference.
    pub ci95_half_width: f64,
    pub exact_rate: f64,
    pub mean_energy: f64,
    pub max_energy: f64,
    pub mean_samples: f64,
    pub max_samples: u64,
    pub truncation_rate: f64,
}

/// Deterministic fold of one grid point's records (in trial order).
pub fn aggregate_point(mu: f64, records: &[TrialRecord]) -> SweepPoint {
    let n = records.len() as f64;
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    let mut exact = 0u64;
    let mut energy_sum = 0.0;
    let mut max_energy: f64 = 0.0;
    let mut samples_sum = 0.0;
    let mut max_samples = 0u64;
    let mut truncated = 0u64;
    for r in records {
        let d = r.sym_diff as f64;
        sum += d;
        sumsq += d * d;
        if r.exact {
            exact += 1;
        }
        energy_sum += r.energy;
        max_energy = max_energy.max(r.energy);
        samples_sum += r.samples as f64;
        max_samples = max_samples.max(r.samples);
        if r.truncated {
            truncated += 1;
        }
    }
    let mean = sum / n;
    let var = (sumsq / n - mean * mean).max(0.0);
    SweepPoint {
        mu,
        trials: records.len() as u64,
        mean_sym_diff: mean,
        ci95_half_width: 1.96 * (var / n).sqrt(),
        exact_rate: exact as f64 / n,
        mean_energy: energy_sum / n,
        max_energy,
        mean_samples: samples_sum / n,
        max_samples,
        truncation_rate: truncated as f64 / n,
    }
}

/// Full sweep output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub mu_grid: Vec<f64>,
    pub points: Vec<SweepPoint>,
    /// Smallest grid mu whose mean symmetric difference meets epsilon.
    pub critical_mu: Option<f64>,
    pub thresholds: ThresholdReport,
}

/// Runs every `(grid point, trial)` pair, in parallel, and folds per point.
pub fn sweep(config: &ExperimentConfig) -> Result<SweepResult> {
    sweep_with_records(config).map(|(result, _)| result)
}

/// Runs a sweep and returns the per-trial records alongside it.
pub fn sweep_with_records(config: &ExperimentConfig) -> Result<(SweepResult, Vec<TrialRecord>)> {
    config.validate()?;
    let grid = config.resolve_mu_grid()?;
    let trials = config.trials;
    let jobs: Vec<(usize, u64)> = (0..grid.len())
        .flat_map(|p| (0..trials).map(move |t| (p, t)))
        .collect();
    let results: Vec<Result<TrialRecord>> = jobs
        .par_iter()
        .map(|&(p, t)| run_trial(config, p, grid[p], t))
        .collect();
    let mut records = Vec::with_capacity(results.len());
    for r in results {
        records.push(r?);
    }
    let mut points = Vec::with_capacity(grid.len());
    for (p, &mu) in grid.iter().enumerate() {
        let chunk = &records[p * trials as usize..(p + 1) * trials as usize];
        points.push(aggregate_point(mu, chunk));
    }
    let critical_mu = points
        .iter()
        .find(|pt| pt.mean_sym_diff <= config.epsilon)
        .map(|pt| pt.mu);
    let result = SweepResult {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        mu_grid: grid,
        points,
        critical_mu,
        thresholds: theory::evaluate(&config.class, config.m, config.epsilon, None)?,
    };
    Ok((result, records))
}

/// Serializes trial records as CSV (stable column order, full precision).
pub fn trials_to_csv(records: &[TrialRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf8"))
}

pub fn trials_from_csv(data: &str) -> Result<Vec<TrialRecord>> {
    let mut r = csv::Reader::from_reader(data.as_bytes());
    let mut out = Vec::new();
    for rec in r.deserialize() {
        out.push(rec?);
    }
    Ok(out)
}

/// Paired per-point deltas between two procedures run on matched streams.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparePoint {
    pub mu: f64,
    pub a: SweepPoint,
    pub b: SweepPoint,
    pub mean_energy_delta: f64,
    pub mean_sym_diff_delta: f64,
    pub mean_samples_delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareResult {
    pub schema_version: u32,
    pub procedure_a: ProcedureId,
    pub procedure_b: ProcedureId,
    pub points: Vec<ComparePoint>,
}

/// Runs two procedures over the same config; matched seeds give each trial
/// pair the same support draw and noise stream.
pub fn compare(
    config: &ExperimentConfig,
    procedure_b: ProcedureId,
) -> Result<CompareResult> {
    let mut config_b = config.clone();
    config_b.procedure = procedure_b;
    let a = sweep(config)?;
    let b = sweep(&config_b)?;
    let points = a
        .points
        .iter()
        .zip(b.points.iter())
        .map(|(pa, pb)| ComparePoint {
            mu: pa.mu,
            mean_energy_delta: pa.mean_energy - pb.mean_energy,
            mean_sym_diff_delta: pa.mean_sym_diff - pb.mean_sym_diff,
            mean_samples_delta: pa.mean_samples - pb.mean_samples,
            a: pa.clone(),
            b: pb.clone(),
        })
        .collect();
    Ok(CompareResult {
        schema_version: SCHEMA_VERSION,
        procedure_a: config.procedure,
        procedure_b,
        points,
    })
}
