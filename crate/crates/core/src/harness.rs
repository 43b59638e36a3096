//! Monte Carlo experiment runner and result export.
//!
//! Trials run in parallel; their per-snapshot error vectors are folded into
//! running moments strictly in trial order, so a run is bit-reproducible for
//! a given seed regardless of thread count.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ollasso::{LambdaSchedule, LassoState};
use crate::olrls::RlsState;
use crate::olspice::SpiceState;
use crate::scalar::Scalar;
use crate::scenarios::{gen_iid, gen_sar, gen_sinusoids, ScenarioKind, ScenarioSpec, Trial};
use crate::OnlineEstimator;

/// Lowest NMSE reported, in dB; exact recovery would otherwise be `−∞`.
pub const NMSE_FLOOR_DB: f64 = -150.0;

/// Snapshot density of the logarithmic grid.
pub const SNAPSHOTS_PER_DECADE: usize = 20;

/// Regularization weight of the RLS baselines unless given explicitly.
pub const DEFAULT_RLS_LAMBDA: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LassoTuning {
    /// `√(n log p)`
    Feasible,
    /// `√(2σ²n log p)` with the scenario's true `σ²`.
    Infeasible,
    /// `factor·√(n log p)`
    Scaled(f64),
}

/// An estimator configuration as written on the command line, e.g.
/// `olspice:L=1`, `ollasso:feasible`, `ollasso:scaled=0.01`,
/// `olrls:lambda=1`, `olrls:oracle`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum EstimatorSpec {
    Spice {
        sweeps: usize,
    },
    Lasso(LassoTuning),
    Rls {
        lambda: f64,
    },
    /// RLS restricted to the true support.
    RlsOracle {
        lambda: f64,
    },
}

impl EstimatorSpec {
    /// True for configurations that need knowledge unavailable in practice.
    pub fn is_oracle(&self) -> bool {
        matches!(
            self,
            EstimatorSpec::Lasso(LassoTuning::Infeasible) | EstimatorSpec::RlsOracle { .. }
        )
    }

    pub fn label(&self) -> String {
        self.to_string()
    }

    /// Parses a comma-separated list.
    pub fn parse_list(s: &str) -> Result<Vec<Self>> {
        let list = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<Self>>>()?;
        if list.is_empty() {
            return Err(Error::config("no estimators given"));
        }
        Ok(list)
    }

    pub fn build<T: Scalar>(
        &self,
        p: usize,
        trial: &Trial<T>,
    ) -> Result<Box<dyn OnlineEstimator<T>>> {
        Ok(match *self {
            EstimatorSpec::Spice { sweeps } => Box::new(SpiceState::with_sweeps(p, sweeps)?),
            EstimatorSpec::Lasso(tuning) => {
                let schedule = match tuning {
                    LassoTuning::Feasible => LambdaSchedule::Feasible,
                    LassoTuning::Infeasible => LambdaSchedule::Infeasible {
                        noise_variance: trial.noise_variance,
                    },
                    LassoTuning::Scaled(factor) => LambdaSchedule::Scaled { factor },
                };
                Box::new(LassoState::new(p, schedule))
            }
            EstimatorSpec::Rls { lambda } => Box::new(RlsState::new(p, lambda)?),
            EstimatorSpec::RlsOracle { lambda } => {
                Box::new(RlsState::restricted(p, lambda, &trial.support)?)
            }
        })
    }
}

impl fmt::Display for EstimatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EstimatorSpec::Spice { sweeps } => write!(f, "olspice:L={sweeps}"),
            EstimatorSpec::Lasso(LassoTuning::Feasible) => write!(f, "ollasso:feasible"),
            EstimatorSpec::Lasso(LassoTuning::Infeasible) => write!(f, "ollasso:infeasible"),
            EstimatorSpec::Lasso(LassoTuning::Scaled(c)) => write!(f, "ollasso:scaled={c}"),
            EstimatorSpec::Rls { lambda } => write!(f, "olrls:lambda={lambda}"),
            EstimatorSpec::RlsOracle { lambda } if *lambda == DEFAULT_RLS_LAMBDA => {
                write!(f, "olrls:oracle")
            }
            EstimatorSpec::RlsOracle { lambda } => write!(f, "olrls:oracle:lambda={lambda}"),
        }
    }
}

fn parse_positive(key: &str, value: &str) -> Result<f64> {
    let v: f64 = value
        .parse()
        .map_err(|_| Error::config(format!("{key}: not a number: {value:?}")))?;
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::config(format!(
            "{key} must be positive, got {value}"
        )));
    }
    Ok(v)
}

impl FromStr for EstimatorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let bad = || Error::config(format!("unknown estimator {s:?}"));
        match parts.as_slice() {
            ["olspice"] => Ok(EstimatorSpec::Spice { sweeps: 1 }),
            ["olspice", arg] => {
                let v = arg.strip_prefix("L=").ok_or_else(bad)?;
                let sweeps: usize = v.parse().map_err(|_| bad())?;
                if sweeps == 0 {
                    return Err(Error::config("olspice needs L >= 1"));
                }
                Ok(EstimatorSpec::Spice { sweeps })
            }
            ["ollasso", "feasible"] => Ok(EstimatorSpec::Lasso(LassoTuning::Feasible)),
            ["ollasso", "infeasible"] => Ok(EstimatorSpec::Lasso(LassoTuning::Infeasible)),
            ["ollasso", arg] => {
                let v = arg.strip_prefix("scaled=").ok_or_else(bad)?;
                Ok(EstimatorSpec::Lasso(LassoTuning::Scaled(parse_positive(
                    "scaled", v,
                )?)))
            }
            ["olrls"] => Ok(EstimatorSpec::Rls {
                lambda: DEFAULT_RLS_LAMBDA,
            }),
            ["olrls", "oracle"] => Ok(EstimatorSpec::RlsOracle {
                lambda: DEFAULT_RLS_LAMBDA,
            }),
            ["olrls", "oracle", arg] => {
                let v = arg.strip_prefix("lambda=").ok_or_else(bad)?;
                Ok(EstimatorSpec::RlsOracle {
                    lambda: parse_positive("lambda", v)?,
                })
            }
            ["olrls", arg] => {
                let v = arg.strip_prefix("lambda=").ok_or_else(bad)?;
                Ok(EstimatorSpec::Rls {
                    lambda: parse_positive("lambda", v)?,
                })
            }
            _ => Err(bad()),
        }
    }
}

impl TryFrom<String> for EstimatorSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<EstimatorSpec> for String {
    fn from(e: EstimatorSpec) -> String {
        e.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Snapshots {
    /// Log-spaced `n`, [`SNAPSHOTS_PER_DECADE`] per decade, always including `n_max`.
    #[default]
    Log,
    /// Every `n` from 1 to `n_max`.
    All,
}

impl FromStr for Snapshots {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log" => Ok(Snapshots::Log),
            "all" => Ok(Snapshots::All),
            _ => Err(Error::config(format!(
                "snapshots must be log or all, got {s:?}"
            ))),
        }
    }
}

/// Sample counts at which estimates are evaluated.
pub fn snapshot_grid(n_max: usize, mode: Snapshots) -> Vec<usize> {
    match mode {
        Snapshots::All => (1..=n_max).collect(),
        Snapshots::Log => {
            if n_max == 0 {
                return Vec::new();
            }
            let decades = (n_max as f64).log10();
            let steps = (decades * SNAPSHOTS_PER_DECADE as f64).ceil() as usize;
            let mut grid: Vec<usize> = (0..=steps)
                .map(|k| 10f64.powf(k as f64 / SNAPSHOTS_PER_DECADE as f64).round() as usize)
                .filter(|&n| n <= n_max)
                .collect();
            grid.push(n_max);
            grid.dedup();
            grid
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct RunOptions {
    /// Report `θ̂ₙ = 0` for `n ≤ zero_hold` (evaluation only).
    pub zero_hold: Option<usize>,
    pub snapshots: Snapshots,
}

/// NMSE versus SNR at a fixed sample count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnrSweep {
    pub from_db: f64,
    pub to_db: f64,
    pub step_db: f64,
    pub fixed_n: usize,
}

impl SnrSweep {
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.step_db.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater)
            || !self.from_db.is_finite()
            || !self.to_db.is_finite()
            || self.to_db < self.from_db
        {
            return Err(Error::config(
                "SNR sweep needs finite from <= to and a positive step",
            ));
        }
        if self.fixed_n == 0 {
            return Err(Error::config("SNR sweep needs fixed_n >= 1"));
        }
        let count = ((self.to_db - self.from_db) / self.step_db + 1e-9).floor() as usize + 1;
        Ok((0..count)
            .map(|k| self.from_db + k as f64 * self.step_db)
            .collect())
    }
}

impl FromStr for SnrSweep {
    type Err = Error;

    /// `from:to:step`; `fixed_n` defaults to 250.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(':')
            .map(|v| v.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::config(format!("SNR sweep must be from:to:step, got {s:?}")))?;
        let [from_db, to_db, step_db] = parts[..] else {
            return Err(Error::config(format!(
                "SNR sweep must be from:to:step, got {s:?}"
            )));
        };
        let sweep = SnrSweep {
            from_db,
            to_db,
            step_db,
            fixed_n: 250,
        };
        sweep.values()?;
        Ok(sweep)
    }
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub scenario: ScenarioSpec,
    pub estimators: Vec<EstimatorSpec>,
    #[serde(default)]
    pub options: RunOptions,
    #[serde(default)]
    pub sweep: Option<SnrSweep>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        if self.estimators.is_empty() {
            return Err(Error::config("no estimators given"));
        }
        if let Some(sweep) = &self.sweep {
            sweep.values()?;
        }
        Ok(())
    }

    /// Reads the `config` object of a JSON sidecar written by [`emit`].
    pub fn from_sidecar(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        #[derive(Deserialize)]
        struct Sidecar {
            config: RunConfig,
        }
        let sidecar: Sidecar = serde_json::from_str(&text)
            .map_err(|e| Error::config(format!("{}: {e}", path.display())))?;
        sidecar.config.validate()?;
        Ok(sidecar.config)
    }
}

/// Per-trial outcome: error vectors `θ̂ₙ − θ` per estimator and snapshot.
#[derive(Debug, Clone)]
pub struct TrialResult<T: Scalar> {
    pub trial: usize,
    /// `‖θ‖²` of this trial's true parameters.
    pub theta_norm2: f64,
    /// `errors[estimator][snapshot]`
    pub errors: Vec<Vec<DVector<T>>>,
}

impl<T: Scalar> TrialResult<T> {
    /// `‖θ − θ̂ₙ‖²` per estimator and snapshot.
    pub fn squared_errors(&self) -> Vec<Vec<f64>> {
        self.errors
            .iter()
            .map(|per_n| per_n.iter().map(|e| e.norm_squared()).collect())
            .collect()
    }
}

/// Streams one trial through all estimators, recording errors at `grid`.
pub fn run_trial<T: Scalar>(
    trial_index: usize,
    trial: Trial<T>,
    estimators: &[EstimatorSpec],
    grid: &[usize],
    zero_hold: Option<usize>,
) -> Result<TrialResult<T>> {
    let p = trial.theta.len();
    let mut states = estimators
        .iter()
        .map(|e| e.build(p, &trial))
        .collect::<Result<Vec<_>>>()?;
    let mut errors = vec![Vec::with_capacity(grid.len()); estimators.len()];
    let held = zero_hold.unwrap_or(0);
    let mut next = grid.iter().peekable();
    let Trial { theta, samples, .. } = trial;
    let n_needed = grid.last().copied().unwrap_or(0);
    let mut n = 0;
    for sample in samples.take(n_needed) {
        n += 1;
        for state in states.iter_mut() {
            state.update(&sample)?;
        }
        while next.peek() == Some(&&n) {
            next.next();
            for (k, state) in states.iter().enumerate() {
                let err = if n <= held {
                    -theta.clone()
                } else {
                    state.estimate() - &theta
                };
                errors[k].push(err);
            }
        }
    }
    if n < n_needed {
        return Err(Error::config(format!(
            "scenario stream ended at n = {n}, snapshot grid needs {n_needed}"
        )));
    }
    Ok(TrialResult {
        trial: trial_index,
        theta_norm2: theta.norm_squared(),
        errors,
    })
}

/// Running first and second moments of error vectors (Welford).
#[derive(Debug, Clone)]
struct Moments<T: Scalar> {
    count: usize,
    mean: DVector<T>,
    /// `Σ ‖e − ē‖²`, accumulated coordinate-wise.
    m2: f64,
    sum_sq: f64,
}

impl<T: Scalar> Moments<T> {
    fn new(p: usize) -> Self {
        Self {
            count: 0,
            mean: DVector::zeros(p),
            m2: 0.0,
            sum_sq: 0.0,
        }
    }

    fn push(&mut self, e: &DVector<T>) {
        self.count += 1;
        let inv = 1.0 / self.count as f64;
        let mut m2 = 0.0;
        for (m, &x) in self.mean.iter_mut().zip(e.iter()) {
            let before = x - *m;
            *m += before.scale(inv);
            let after = x - *m;
            m2 += (before.conjugate() * after).real();
        }
        self.m2 += m2;
        self.sum_sq += e.norm_squared();
    }

    fn mse(&self) -> f64 {
        self.sum_sq / self.count as f64
    }

    fn variance(&self) -> f64 {
        self.m2 / self.count as f64
    }

    fn bias2(&self) -> f64 {
        self.mean.norm_squared()
    }
}

/// `E‖θ − θ̂‖² / E‖θ‖²` from per-trial squared errors and squared norms.
pub fn nmse(errors: &[f64], theta_norms: &[f64]) -> Result<f64> {
    if errors.is_empty() || errors.len() != theta_norms.len() {
        return Err(Error::config("NMSE needs one parameter norm per error"));
    }
    let denom = theta_norms.iter().sum::<f64>() / theta_norms.len() as f64;
    if denom.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::config(
            "NMSE undefined: true parameters are all zero",
        ));
    }
    Ok(errors.iter().sum::<f64>() / errors.len() as f64 / denom)
}

/// `10·log₁₀(x)`, floored at [`NMSE_FLOOR_DB`].
pub fn to_db(x: f64) -> f64 {
    if x > 0.0 {
        (10.0 * x.log10()).max(NMSE_FLOOR_DB)
    } else {
        NMSE_FLOOR_DB
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SummaryAxis {
    /// Rows indexed by sample count.
    N,
    /// Rows indexed by SNR at a fixed sample count.
    SnrDb,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub estimator: String,
    pub n: usize,
    pub snr_db: f64,
    pub nmse: f64,
    pub nmse_db: f64,
    /// `E‖θ̂ − Eθ̂‖²` (for random θ, of the error `θ̂ − θ`)
    pub variance: f64,
    /// `‖Eθ̂ − θ‖²`
    pub bias2: f64,
    /// `E‖θ̂ − θ‖²`
    pub mse: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub axis: SummaryAxis,
    pub rows: Vec<SummaryRow>,
    pub runtime_secs: f64,
    pub config: RunConfig,
}

impl RunSummary {
    /// Rows of one estimator in axis order.
    pub fn series(&self, estimator: &EstimatorSpec) -> Vec<&SummaryRow> {
        let label = estimator.label();
        self.rows.iter().filter(|r| r.estimator == label).collect()
    }
}

/// Folds trial results into per-(estimator, snapshot) moments.
///
/// The fold is sequential; feeding results in trial order makes a run
/// bit-reproducible, and any other order agrees up to rounding.
#[derive(Debug, Clone)]
pub struct Aggregator<T: Scalar> {
    estimators: Vec<EstimatorSpec>,
    grid: Vec<usize>,
    moments: Vec<Vec<Moments<T>>>,
    theta_norm2_sum: f64,
    trials: usize,
}

impl<T: Scalar> Aggregator<T> {
    pub fn new(estimators: &[EstimatorSpec], grid: &[usize], p: usize) -> Self {
        Self {
            estimators: estimators.to_vec(),
            grid: grid.to_vec(),
            moments: vec![vec![Moments::new(p); grid.len()]; estimators.len()],
            theta_norm2_sum: 0.0,
            trials: 0,
        }
    }

    pub fn push(&mut self, result: &TrialResult<T>) -> Result<()> {
        if result.errors.len() != self.estimators.len()
            || result
                .errors
                .iter()
                .any(|per_n| per_n.len() != self.grid.len())
        {
            return Err(Error::DimensionMismatch {
                expected: self.estimators.len() * self.grid.len(),
                found: result.errors.iter().map(Vec::len).sum(),
            });
        }
        for (k, per_n) in result.errors.iter().enumerate() {
            for (j, e) in per_n.iter().enumerate() {
                if e.len() != self.moments[k][j].mean.len() {
                    return Err(Error::DimensionMismatch {
                        expected: self.moments[k][j].mean.len(),
                        found: e.len(),
                    });
                }
                self.moments[k][j].push(e);
            }
        }
        self.theta_norm2_sum += result.theta_norm2;
        self.trials += 1;
        Ok(())
    }

    pub fn trials(&self) -> usize {
        self.trials
    }

    /// One row per (estimator, snapshot), estimators in configured order.
    pub fn rows(&self, snr_db: f64) -> Result<Vec<SummaryRow>> {
        let mean_theta = self.theta_norm2_sum / self.trials as f64;
        let mut rows = Vec::new();
        for (est, per_n) in self.estimators.iter().zip(&self.moments) {
            for (&n, m) in self.grid.iter().zip(per_n) {
                let ratio = nmse(&[m.mse()], &[mean_theta])?;
                rows.push(SummaryRow {
                    estimator: est.label(),
                    n,
                    snr_db,
                    nmse: ratio,
                    nmse_db: to_db(ratio),
                    variance: m.variance(),
                    bias2: m.bias2(),
                    mse: m.mse(),
                    trials: m.count,
                });
            }
        }
        Ok(rows)
    }
}

type Generator<T> = fn(&ScenarioSpec, usize) -> Result<Trial<T>>;

/// Runs every trial in parallel chunks and folds them in trial order.
fn aggregate_rows<T: Scalar>(
    spec: &ScenarioSpec,
    estimators: &[EstimatorSpec],
    options: &RunOptions,
    grid: &[usize],
    generate: Generator<T>,
) -> Result<Vec<SummaryRow>> {
    let mut agg = Aggregator::new(estimators, grid, spec.p);
    let chunk = 2 * rayon::current_num_threads().max(1);
    for start in (0..spec.trials).step_by(chunk) {
        let end = (start + chunk).min(spec.trials);
        let results = (start..end)
            .into_par_iter()
            .map(|t| run_trial(t, generate(spec, t)?, estimators, grid, options.zero_hold))
            .collect::<Result<Vec<_>>>()?;
        for result in &results {
            agg.push(result)?;
        }
    }
    agg.rows(spec.snr_db)
}

fn rows_for(
    spec: &ScenarioSpec,
    estimators: &[EstimatorSpec],
    options: &RunOptions,
    grid: &[usize],
) -> Result<Vec<SummaryRow>> {
    match spec.kind {
        ScenarioKind::IidGaussian => aggregate_rows(spec, estimators, options, grid, gen_iid),
        ScenarioKind::Sinusoids => aggregate_rows(spec, estimators, options, grid, gen_sinusoids),
        ScenarioKind::Sar => aggregate_rows(spec, estimators, options, grid, gen_sar),
    }
}

/// NMSE, variance and squared bias versus `n` for every estimator.
pub fn run_experiment(
    spec: &ScenarioSpec,
    estimators: &[EstimatorSpec],
    options: &RunOptions,
) -> Result<RunSummary> {
    let config = RunConfig {
        scenario: spec.clone(),
        estimators: estimators.to_vec(),
        options: options.clone(),
        sweep: None,
    };
    config.validate()?;
    let start = Instant::now();
    let grid = snapshot_grid(spec.n_max, options.snapshots);
    let rows = rows_for(spec, estimators, options, &grid)?;
    Ok(RunSummary {
        axis: SummaryAxis::N,
        rows,
        runtime_secs: start.elapsed().as_secs_f64(),
        config,
    })
}

/// NMSE versus SNR at `sweep.fixed_n`.
pub fn snr_sweep(
    spec: &ScenarioSpec,
    estimators: &[EstimatorSpec],
    options: &RunOptions,
    sweep: &SnrSweep,
) -> Result<RunSummary> {
    let config = RunConfig {
        scenario: spec.clone(),
        estimators: estimators.to_vec(),
        options: options.clone(),
        sweep: Some(sweep.clone()),
    };
    config.validate()?;
    let start = Instant::now();
    let grid = [sweep.fixed_n];
    let mut by_snr = Vec::new();
    for snr_db in sweep.values()? {
        let point = ScenarioSpec {
            snr_db,
            n_max: sweep.fixed_n,
            ..spec.clone()
        };
        point.validate()?;
        by_snr.push(rows_for(&point, estimators, options, &grid)?);
    }
    // group by estimator, SNR ascending
    let mut rows = Vec::new();
    for k in 0..estimators.len() {
        rows.extend(by_snr.iter().map(|r| r[k].clone()));
    }
    Ok(RunSummary {
        axis: SummaryAxis::SnrDb,
        rows,
        runtime_secs: start.elapsed().as_secs_f64(),
        config,
    })
}

pub fn run_config(config: &RunConfig) -> Result<RunSummary> {
    match &config.sweep {
        Some(sweep) => snr_sweep(&config.scenario, &config.estimators, &config.options, sweep),
        None => run_experiment(&config.scenario, &config.estimators, &config.options),
    }
}

/// CSV header for the given axis; always six columns.
pub fn csv_header(axis: SummaryAxis) -> [&'static str; 6] {
    let x = match axis {
        SummaryAxis::N => "n",
        SummaryAxis::SnrDb => "snr_db",
    };
    ["estimator", x, "nmse_db", "var", "bias2", "trials"]
}

/// Path of the JSON sidecar next to a CSV output.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

/// Writes the summary as CSV plus a JSON sidecar holding the full run
/// configuration. Returns the sidecar path.
pub fn emit(summary: &RunSummary, csv_path: &Path) -> Result<PathBuf> {
    let csv_err = |source| Error::Csv {
        path: csv_path.to_path_buf(),
        source,
    };
    let mut writer = csv::Writer::from_path(csv_path).map_err(csv_err)?;
    writer
        .write_record(csv_header(summary.axis))
        .map_err(csv_err)?;
    for row in &summary.rows {
        let x = match summary.axis {
            SummaryAxis::N => row.n.to_string(),
            SummaryAxis::SnrDb => row.snr_db.to_string(),
        };
        writer
            .write_record([
                row.estimator.clone(),
                x,
                row.nmse_db.to_string(),
                row.variance.to_string(),
                row.bias2.to_string(),
                row.trials.to_string(),
            ])
            .map_err(csv_err)?;
    }
    writer.flush().map_err(|source| Error::Io {
        path: csv_path.to_path_buf(),
        source,
    })?;

    let sidecar = sidecar_path(csv_path);
    let body = serde_json::json!({
        "config": summary.config,
        "columns": csv_header(summary.axis),
        "oracle_estimators": summary
            .config
            .estimators
            .iter()
            .filter(|e| e.is_oracle())
            .map(EstimatorSpec::label)
            .collect::<Vec<_>>(),
        "runtime": {
            "seconds": summary.runtime_secs,
            "version": env!("CARGO_PKG_VERSION"),
        },
    });
    let text = serde_json::to_string_pretty(&body).expect("sidecar serializes");
    std::fs::write(&sidecar, text).map_err(|source| Error::Io {
        path: sidecar.clone(),
        source,
    })?;
    Ok(sidecar)
}
