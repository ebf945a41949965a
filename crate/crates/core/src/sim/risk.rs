use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circular::Angle;
use crate::comparators::{cv_select, BaselineKind, BaselineMethod};
use crate::error::{Error, Result};
use crate::estimator::WarpedSample;
use crate::gl::{GlConfig, GlStatistics};
use crate::grid::{build_grid, GridMode};
use crate::sim::model::true_regression;
use crate::sim::scenario::{BandwidthSpec, EstimatorConfig, Scenario, WarpKind, SCHEMA_VERSION};
use crate::warp::{Sample, WarpMap};

/// The 12-point c0 grid of the one-dimensional calibration sweep.
pub const C0_GRID_1D: [f64; 12] = [
    0.001, 0.0025, 0.005, 0.0075, 0.01, 0.025, 0.05, 0.075, 0.1, 0.2, 0.3, 0.4,
];

/// The 10-point per-axis c0 grid of the two-dimensional calibration sweep.
pub const C0_GRID_2D: [f64; 10] = [0.001, 0.005, 0.01, 0.025, 0.05, 0.075, 0.1, 0.2, 0.3, 0.4];

/// Per-run random stream: the scenario seed selects the key, the run index the stream.
pub fn run_rng(seed: u64, run_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run_index);
    rng
}

/// Draws the dataset of run `run_index`: design points, then noise angles.
pub fn simulate_dataset(scenario: &Scenario, run_index: usize) -> Result<Sample> {
    let mut rng = run_rng(scenario.seed, run_index as u64);
    let xs = scenario.design.sample(&mut rng, scenario.n)?;
    let noise = scenario.noise.sample_with(&mut rng, scenario.n);
    let thetas = xs
        .iter()
        .zip(&noise)
        .map(|(&x, z)| true_regression(scenario.model, x)?.rotate(z.radians()))
        .collect::<Result<Vec<Angle>>>()?;
    Sample::new(xs, thetas)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Ok,
    Degenerate,
    Singular,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Ok => "ok",
            RunStatus::Degenerate => "degenerate",
            RunStatus::Singular => "singular",
        }
    }

    fn from_error(err: &Error) -> Option<Self> {
        match err {
            Error::DegenerateFit { .. } => Some(RunStatus::Degenerate),
            Error::SingularDesign { .. } => Some(RunStatus::Singular),
            _ => None,
        }
    }
}

/// One estimator on one simulated dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: usize,
    pub h1: Option<f64>,
    pub h2: Option<f64>,
    pub estimate: Option<f64>,
    /// `[wrap(m̂(x) - m(x))]²`, at most π².
    pub sq_error: Option<f64>,
    pub status: RunStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskSummary {
    pub successes: usize,
    pub failures: usize,
    pub mean: Option<f64>,
    pub median: Option<f64>,
    pub q1: Option<f64>,
    pub q3: Option<f64>,
}

impl RiskSummary {
    /// Summary over successful runs; failures are only counted.
    pub fn from_records(records: &[RunRecord]) -> Self {
        let errors: Vec<f64> = records.iter().filter_map(|r| r.sq_error).collect();
        Self::from_errors(&errors, records.len() - errors.len())
    }

    pub fn from_errors(errors: &[f64], failures: usize) -> Self {
        let mut sorted = errors.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mean = (!sorted.is_empty()).then(|| sorted.iter().sum::<f64>() / sorted.len() as f64);
        Self {
            successes: sorted.len(),
            failures,
            mean,
            median: quantile(&sorted, 0.5),
            q1: quantile(&sorted, 0.25),
            q3: quantile(&sorted, 0.75),
        }
    }
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], p: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    Some(sorted[lo] + (sorted[hi] - sorted[lo]) * frac)
}

/// Per-run records and summary for one estimator of a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskReport {
    pub estimator: String,
    pub summary: RiskSummary,
    pub runs: Vec<RunRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub schema_version: u32,
    pub scenario: Scenario,
    /// `m(x_eval)`.
    pub truth: f64,
    pub estimators: Vec<RiskReport>,
}

struct Fit {
    h1: Option<f64>,
    h2: Option<f64>,
    angle: Result<Angle>,
}

fn warp_for(scenario: &Scenario, kind: WarpKind, sample: &Sample) -> Result<WarpMap> {
    match kind {
        WarpKind::Empirical => Ok(WarpMap::ecdf(sample)),
        WarpKind::Known => scenario.design.cdf(),
    }
}

fn fit_estimator(scenario: &Scenario, config: &EstimatorConfig, sample: &Sample) -> Result<Fit> {
    let x = scenario.x_eval;
    match config {
        EstimatorConfig::Gl { warp, .. } => {
            let gl = config.gl_config().expect("gl config");
            let data = WarpedSample::new(sample, warp_for(scenario, *warp, sample)?);
            let est = crate::gl::gl_estimate(&data, &gl, x)?;
            Ok(Fit {
                h1: Some(est.h1),
                h2: Some(est.h2),
                angle: est.angle,
            })
        }
        EstimatorConfig::Nw { kernel, bandwidth, .. } | EstimatorConfig::Ll { kernel, bandwidth, .. } => {
            let kind = match config {
                EstimatorConfig::Nw { .. } => BaselineKind::Nw,
                _ => BaselineKind::Ll,
            };
            let h = match *bandwidth {
                BandwidthSpec::Fixed(h) => h,
                BandwidthSpec::Cv => {
                    let grid = build_grid(sample.len(), kernel, GridMode::Simulation, None)?;
                    cv_select(sample, kind, kernel, &grid)?
                }
            };
            let method = BaselineMethod::new(kind, *kernel, h)?;
            Ok(Fit {
                h1: Some(h),
                h2: Some(h),
                angle: method.estimate(sample, x),
            })
        }
    }
}

fn record(run: usize, fit: Fit, truth: Angle) -> Result<RunRecord> {
    match fit.angle {
        Ok(angle) => {
            let d = angle.diff(truth).radians();
            Ok(RunRecord {
                run,
                h1: fit.h1,
                h2: fit.h2,
                estimate: Some(angle.radians()),
                sq_error: Some(d * d),
                status: RunStatus::Ok,
            })
        }
        Err(err) => match RunStatus::from_error(&err) {
            Some(status) => Ok(RunRecord {
                run,
                h1: fit.h1,
                h2: fit.h2,
                estimate: None,
                sq_error: None,
                status,
            }),
            None => Err(err),
        },
    }
}

/// Runs `f` over run indices on a pool of `threads` workers (all cores when
/// `None`), returning results in run order.
fn par_runs<T, F>(runs: usize, threads: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidInput(format!("cannot start worker pool: {e}")))?;
    pool.install(|| (0..runs).into_par_iter().map(f).collect())
}

/// Monte Carlo pointwise risk of every estimator in the scenario.
///
/// All estimators see the same dataset in a given run. Runs are independent
/// given the scenario seed, so the report does not depend on `threads`.
pub fn mc_risk(scenario: &Scenario, threads: Option<usize>) -> Result<SimulationReport> {
    scenario.validate()?;
    let truth = true_regression(scenario.model, scenario.x_eval)?;
    let per_run: Vec<Vec<RunRecord>> = par_runs(scenario.runs, threads, |run| {
        let sample = simulate_dataset(scenario, run)?;
        scenario
            .estimators
            .iter()
            .map(|config| record(run, fit_estimator(scenario, config, &sample)?, truth))
            .collect()
    })?;
    let estimators = scenario
        .estimators
        .iter()
        .enumerate()
        .map(|(e, config)| {
            let runs: Vec<RunRecord> = per_run.iter().map(|r| r[e].clone()).collect();
            RiskReport {
                estimator: config.label(),
                summary: RiskSummary::from_records(&runs),
                runs,
            }
        })
        .collect();
    Ok(SimulationReport {
        schema_version: SCHEMA_VERSION,
        scenario: scenario.clone(),
        truth: truth.radians(),
        estimators,
    })
}

/// One cell of a c0 calibration sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRow {
    pub c0_sine: f64,
    pub c0_cosine: f64,
    pub median_risk: Option<f64>,
    pub mean_risk: Option<f64>,
    pub successes: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTable {
    pub schema_version: u32,
    pub scenario: Scenario,
    pub rows: Vec<CalibrationRow>,
}

/// Cells `(c, c)` for a one-dimensional sweep.
pub fn cells_1d(values: &[f64]) -> Vec<(f64, f64)> {
    values.iter().map(|&c| (c, c)).collect()
}

/// Cartesian cells `(c_sine, c_cosine)`, sine-major.
pub fn cells_2d(values: &[f64]) -> Vec<(f64, f64)> {
    values
        .iter()
        .flat_map(|&s| values.iter().map(move |&c| (s, c)))
        .collect()
}

/// Pointwise risk of the scenario's first GL estimator for every c0 cell.
///
/// Every cell is scored on the same datasets (common random numbers). The
/// kernel statistics do not depend on c0, so they are computed once per run.
pub fn calibrate_c0(scenario: &Scenario, cells: &[(f64, f64)], threads: Option<usize>) -> Result<CalibrationTable> {
    scenario.validate()?;
    if cells.is_empty() {
        return Err(Error::InvalidInput("c0 grid is empty".into()));
    }
    for &(s, c) in cells {
        if !(s.is_finite() && s > 0.0 && c.is_finite() && c > 0.0) {
            return Err(Error::InvalidInput(format!(
                "c0 values must be positive, got ({s}, {c})"
            )));
        }
    }
    let template = scenario
        .gl_template()
        .ok_or_else(|| Error::scenario("estimators", "calibration needs a gl estimator"))?;
    let EstimatorConfig::Gl { warp, .. } = template else {
        unreachable!("gl_template returns a gl estimator")
    };
    let base: GlConfig = template.gl_config().expect("gl config");
    let truth = true_regression(scenario.model, scenario.x_eval)?;
    let x = scenario.x_eval;

    let per_run: Vec<Vec<Option<f64>>> = par_runs(scenario.runs, threads, |run| {
        let sample = simulate_dataset(scenario, run)?;
        let data = WarpedSample::new(&sample, warp_for(scenario, *warp, &sample)?);
        let v = data.eval_point(x);
        let grid = base.grid.resolve(data.len(), &base.kernel, v)?;
        let stats = GlStatistics::compute(&data, &base.kernel, &grid, v);
        cells
            .iter()
            .map(|&(s, c)| {
                let est = stats.estimate(s, c, x)?;
                match est.angle {
                    Ok(a) => {
                        let d = a.diff(truth).radians();
                        Ok(Some(d * d))
                    }
                    Err(e) if e.is_fit_failure() => Ok(None),
                    Err(e) => Err(e),
                }
            })
            .collect()
    })?;

    let rows = cells
        .iter()
        .enumerate()
        .map(|(i, &(s, c))| {
            let errors: Vec<f64> = per_run.iter().filter_map(|r| r[i]).collect();
            let summary = RiskSummary::from_errors(&errors, scenario.runs - errors.len());
            CalibrationRow {
                c0_sine: s,
                c0_cosine: c,
                median_risk: summary.median,
                mean_risk: summary.mean,
                successes: summary.successes,
                failures: summary.failures,
            }
        })
        .collect();
    Ok(CalibrationTable {
        schema_version: SCHEMA_VERSION,
        scenario: scenario.clone(),
        rows,
    })
}
