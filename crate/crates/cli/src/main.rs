use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use circreg::sim::{
    calibrate_c0, cells_1d, cells_2d, mc_risk, write_calibration_csv, write_json, write_runs_csv, Scenario, C0_GRID_1D,
    C0_GRID_2D, SCHEMA_VERSION,
};
use circreg::{
    gl_estimate, load_dataset, Error, GlConfig, GridMode, GridPolicy, Kernel, SelectionTrace, WarpedSample, DEFAULT_C0,
};

#[derive(Parser)]
#[command(
    name = "circreg",
    version,
    about = "Adaptive kernel regression for circular responses"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the adaptive estimator to an `x,theta` CSV dataset.
    Fit(FitArgs),
    /// Run a Monte Carlo scenario and write its risk report.
    Simulate(RunArgs),
    /// Sweep c0 for the scenario's GL estimator and tabulate the risk.
    Calibrate(CalibrateArgs),
    /// Run a scenario with at least two estimators on paired datasets.
    Compare(RunArgs),
}

#[derive(Args)]
struct FitArgs {
    /// Dataset with header `x,theta`; angles in radians.
    dataset: PathBuf,
    /// Evaluation points (repeat or comma-separate).
    #[arg(long = "at", required = true, value_delimiter = ',', allow_negative_numbers = true)]
    at: Vec<f64>,
    #[arg(long, default_value = "epanechnikov")]
    kernel: Kernel,
    /// Sets both c0 constants.
    #[arg(long, conflicts_with_all = ["c0_sine", "c0_cosine"])]
    c0: Option<f64>,
    #[arg(long)]
    c0_sine: Option<f64>,
    #[arg(long)]
    c0_cosine: Option<f64>,
    #[arg(long, default_value = "simulation")]
    grid: GridMode,
    /// Include the per-bandwidth selection criteria in the output.
    #[arg(long)]
    trace: bool,
    /// Report degenerate points and continue instead of stopping.
    #[arg(long)]
    keep_going: bool,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario JSON file.
    scenario: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (all cores by default).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,
}

#[derive(Args)]
struct CalibrateArgs {
    #[command(flatten)]
    run: RunArgs,
    /// c0 values for the sweep (default: the 12-point calibration grid).
    #[arg(long = "c0", value_delimiter = ',')]
    c0: Vec<f64>,
    /// Sweep (c0_sine, c0_cosine) over the Cartesian product of the values
    /// (default: the 10-point per-axis surface grid).
    #[arg(long)]
    surface: bool,
}

#[derive(Serialize)]
struct FitOutput {
    schema_version: u32,
    kernel: Kernel,
    c0_sine: f64,
    c0_cosine: f64,
    grid: GridMode,
    n: usize,
    points: Vec<FitPoint>,
}

#[derive(Serialize)]
struct FitPoint {
    x: f64,
    m_hat: Option<f64>,
    h1: Option<f64>,
    h2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace_sine: Option<SelectionTrace>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace_cosine: Option<SelectionTrace>,
}

/// Exit status for a library error: 3 for bad input, 4 for numerical failures.
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidInput(_) | Error::Scenario { .. } | Error::Io(_) | Error::Json(_) => 3,
        Error::Domain(_) | Error::EmptyGrid(_) | Error::DegenerateFit { .. } | Error::SingularDesign { .. } => 4,
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure {
            code: exit_code(&err),
            message: err.to_string(),
        }
    }
}

fn input_error(message: String) -> Failure {
    Failure { code: 3, message }
}

fn io_context(path: &Path) -> impl FnOnce(std::io::Error) -> Failure + '_ {
    move |e| input_error(format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fit(args) => cmd_fit(args),
        Command::Simulate(args) => cmd_simulate(args, 1),
        Command::Compare(args) => cmd_simulate(args, 2),
        Command::Calibrate(args) => cmd_calibrate(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn cmd_fit(args: FitArgs) -> Result<u8, Failure> {
    if !args.dataset.is_file() {
        return Err(input_error(format!("{}: no such file", args.dataset.display())));
    }
    let sample = load_dataset(&args.dataset).map_err(|e| match e {
        Error::InvalidInput(m) => input_error(format!("{}: {m}", args.dataset.display())),
        other => other.into(),
    })?;
    if sample.len() < 2 {
        return Err(input_error(format!(
            "{}: at least 2 observations are required",
            args.dataset.display()
        )));
    }
    let c0_sine = args.c0.or(args.c0_sine).unwrap_or(DEFAULT_C0);
    let c0_cosine = args.c0.or(args.c0_cosine).unwrap_or(DEFAULT_C0);
    let config = GlConfig {
        kernel: args.kernel,
        c0_sine,
        c0_cosine,
        grid: GridPolicy::from_mode(args.grid),
        strict_theory: false,
    };
    config.validate()?;
    let data = WarpedSample::empirical(&sample);

    let mut points = Vec::with_capacity(args.at.len());
    let mut failed = false;
    for &x in &args.at {
        let point = match gl_estimate(&data, &config, x) {
            Ok(est) => {
                let (m_hat, error) = match est.angle {
                    Ok(a) => (Some(a.radians()), None),
                    Err(e) => (None, Some(e)),
                };
                FitPoint {
                    x,
                    m_hat,
                    h1: Some(est.h1),
                    h2: Some(est.h2),
                    error: error.map(|e| e.to_string()),
                    trace_sine: args.trace.then_some(est.trace_sine),
                    trace_cosine: args.trace.then_some(est.trace_cosine),
                }
            }
            Err(e) if exit_code(&e) == 4 => FitPoint {
                x,
                m_hat: None,
                h1: None,
                h2: None,
                error: Some(e.to_string()),
                trace_sine: None,
                trace_cosine: None,
            },
            Err(e) => return Err(e.into()),
        };
        if let Some(msg) = &point.error {
            failed = true;
            eprintln!("x = {x}: {msg}");
            if !args.keep_going {
                return Err(Failure {
                    code: 4,
                    message: format!("fit failed at x = {x} (use --keep-going to continue past failures)"),
                });
            }
        }
        points.push(point);
    }

    let output = FitOutput {
        schema_version: SCHEMA_VERSION,
        kernel: args.kernel,
        c0_sine,
        c0_cosine,
        grid: args.grid,
        n: sample.len(),
        points,
    };
    match &args.out {
        Some(path) => {
            let file = fs::File::create(path).map_err(io_context(path))?;
            write_json(&output, std::io::BufWriter::new(file))?;
        }
        None => {
            let stdout = std::io::stdout();
            write_json(&output, stdout.lock())?;
        }
    }
    Ok(if failed { 4 } else { 0 })
}

fn load_scenario(args: &RunArgs) -> Result<Scenario, Failure> {
    if !args.scenario.is_file() {
        return Err(input_error(format!("{}: no such file", args.scenario.display())));
    }
    let mut scenario = Scenario::load(&args.scenario).map_err(|e| match e {
        Error::Scenario { .. } | Error::Io(_) => input_error(format!("{}: {e}", args.scenario.display())),
        other => other.into(),
    })?;
    if let Some(seed) = args.seed {
        scenario.seed = seed;
    }
    fs::create_dir_all(&args.out).map_err(io_context(&args.out))?;
    Ok(scenario)
}

fn write_file(
    dir: &Path,
    name: &str,
    write: impl FnOnce(&mut dyn Write) -> circreg::Result<()>,
) -> Result<(), Failure> {
    let path = dir.join(name);
    let file = fs::File::create(&path).map_err(io_context(&path))?;
    let mut w = std::io::BufWriter::new(file);
    write(&mut w)?;
    Ok(())
}

fn cmd_simulate(args: RunArgs, min_estimators: usize) -> Result<u8, Failure> {
    let scenario = load_scenario(&args)?;
    if scenario.estimators.len() < min_estimators {
        return Err(input_error(format!(
            "{}: compare needs at least {min_estimators} estimators, found {}",
            args.scenario.display(),
            scenario.estimators.len()
        )));
    }
    let report = mc_risk(&scenario, args.threads.map(|t| t as usize))?;
    write_file(&args.out, "report.json", |w| write_json(&report, w))?;
    write_file(&args.out, "runs.csv", |w| write_runs_csv(&report, w))?;
    for est in &report.estimators {
        let s = &est.summary;
        let fmt = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |v| format!("{v:.6e}"));
        eprintln!(
            "{}: median {} mean {} ({} ok, {} failed)",
            est.estimator,
            fmt(s.median),
            fmt(s.mean),
            s.successes,
            s.failures
        );
    }
    Ok(0)
}

fn cmd_calibrate(args: CalibrateArgs) -> Result<u8, Failure> {
    let scenario = load_scenario(&args.run)?;
    if scenario.gl_template().is_none() {
        return Err(input_error(format!(
            "{}: calibration needs a gl estimator",
            args.run.scenario.display()
        )));
    }
    let cells = match (args.c0.is_empty(), args.surface) {
        (true, false) => cells_1d(&C0_GRID_1D),
        (true, true) => cells_2d(&C0_GRID_2D),
        (false, false) => cells_1d(&args.c0),
        (false, true) => cells_2d(&args.c0),
    };
    let table = calibrate_c0(&scenario, &cells, args.run.threads.map(|t| t as usize))?;
    write_file(&args.run.out, "calibration.csv", |w| write_calibration_csv(&table, w))?;
    write_file(&args.run.out, "calibration.json", |w| write_json(&table, w))?;
    Ok(0)
}
