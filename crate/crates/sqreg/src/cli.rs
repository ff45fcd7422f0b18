//! Command-line front end: simulation, transformation, fitting, bands,
//! coverage studies, prediction, and RMISE reports.
//!
//! Each subcommand is a thin wrapper over a `cmd_*` function so the same
//! entry points are callable from library code and examples. Exit codes:
//! 0 success, 2 usage error, 1 runtime error.

use crate::bands::{self, Method, TauGrid};
use crate::io::{self, FitManifest, SelectionRow, TransformSidecar};
use crate::model::Dataset;
use crate::model_select::{self, DomainFit, FitConfig, OrdinatePoint};
use crate::sampler::{ChainResult, ProposalConfig};
use crate::simgen::TruthSpec;
use crate::splines::SplineBasis;
use crate::transforms::{Direction, UnitTransform};
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] io::IoError),
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
    #[error(transparent)]
    Sampler(#[from] crate::sampler::SamplerError),
    #[error(transparent)]
    Select(#[from] crate::model_select::SelectError),
    #[error(transparent)]
    Band(#[from] crate::bands::BandError),
    #[error(transparent)]
    Simgen(#[from] crate::simgen::SimgenError),
    #[error(transparent)]
    Transform(#[from] crate::transforms::TransformError),
    #[error(transparent)]
    Spline(#[from] crate::splines::SplineError),
}

#[derive(Debug, Parser)]
#[command(
    name = "sqreg",
    about = "Bayesian simultaneous quantile regression with monotone B-spline priors",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a dataset from one of the synthetic truths.
    Simulate(SimulateArgs),
    /// Map a raw CSV onto the unit square, writing a transform sidecar.
    Transform(TransformArgs),
    /// Fit the model over a domain of knot counts.
    Fit(FitCmdArgs),
    /// Fit and emit uniform credible bands at chosen covariate values.
    Bands(BandsArgs),
    /// Replicated coverage experiment against a synthetic truth.
    Coverage(CoverageArgs),
    /// Back-transformed quantile estimates from a fit manifest.
    Predict(PredictArgs),
    /// RMISE of a fitted curve against a synthetic truth.
    Rmise(RmiseArgs),
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Which simulation study truth to draw from (1 or 2).
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    study: u8,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Study-1 shape parameters.
    #[arg(long, default_value_t = 0.3)]
    a: f64,
    #[arg(long, default_value_t = 0.6)]
    b: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct TransformArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Sidecar JSON recording the transforms for later inversion.
    #[arg(long)]
    sidecar: PathBuf,
    #[arg(long, default_value = "x")]
    x_column: String,
    #[arg(long, default_value = "y")]
    y_column: String,
    /// Predictor transform: linear|pareto|lognormal.
    #[arg(long, default_value = "linear")]
    x_transform: String,
    /// Response transform: linear|pareto|lognormal.
    #[arg(long, default_value = "lognormal")]
    y_transform: String,
    /// Linear range for the predictor (defaults to the data range).
    #[arg(long)]
    x_lo: Option<f64>,
    #[arg(long)]
    x_hi: Option<f64>,
    /// Linear range for the response (defaults to the data range).
    #[arg(long)]
    y_lo: Option<f64>,
    #[arg(long)]
    y_hi: Option<f64>,
    /// Power-Pareto parameters (applied to whichever side selects pareto).
    #[arg(long, default_value_t = 0.45)]
    pareto_a: f64,
    #[arg(long, default_value_t = 52.0)]
    pareto_sigma: f64,
    #[arg(long, default_value_t = 4.9)]
    pareto_k: f64,
    /// Log-normal parameters; fitted from the column when omitted.
    #[arg(long)]
    lognormal_mu: Option<f64>,
    #[arg(long)]
    lognormal_s: Option<f64>,
}

/// Sampler and model-selection options shared by fit-like commands.
#[derive(Debug, Args, Clone)]
struct SamplerArgs {
    /// Spline degree (2 quadratic, 3 cubic).
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(2..=3))]
    degree: u8,
    /// Smallest knot count (default 3 for degree 2, 5 for degree 3).
    #[arg(long)]
    k_min: Option<usize>,
    /// Largest knot count (default 10 for degree 2, 12 for degree 3).
    #[arg(long)]
    k_max: Option<usize>,
    #[arg(long, default_value_t = 20_000)]
    iterations: usize,
    #[arg(long, default_value_t = 5_000)]
    burn_in: usize,
    #[arg(long, default_value_t = 1)]
    thin: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fix the proposal half-width instead of adapting it during burn-in.
    #[arg(long)]
    fixed_r: Option<f64>,
    #[arg(long, default_value_t = 0.25)]
    target_acceptance: f64,
    /// Root tolerance for cubic inversion (quadratics solve analytically).
    #[arg(long, default_value_t = crate::model::DEFAULT_INVERSION_TOL)]
    inversion_tol: f64,
    /// Ordinate point for the marginal-likelihood estimate: max|last.
    #[arg(long, default_value = "max")]
    ordinate_point: String,
    /// Fresh proposal draws in the Chib denominator.
    #[arg(long, default_value_t = 5_000)]
    chib_draws: usize,
    /// Use only the last N stored samples in the Chib numerator.
    #[arg(long)]
    chib_samples: Option<usize>,
    /// Worker threads (defaults to min(|domain|, cores)).
    #[arg(long)]
    threads: Option<usize>,
}

impl SamplerArgs {
    fn fit_config(&self) -> Result<FitConfig, CliError> {
        let degree = self.degree as usize;
        let mut config = FitConfig::new(degree, self.seed);
        let default = FitConfig::default_domain(degree);
        let k_min = self.k_min.unwrap_or(default[0]);
        let k_max = self.k_max.unwrap_or(*default.last().expect("nonempty"));
        if k_min < 1 || k_max < k_min {
            return Err(CliError::Usage(format!(
                "invalid knot domain [{k_min}, {k_max}]"
            )));
        }
        config.domain = (k_min..=k_max).collect();
        config.iterations = self.iterations;
        config.burn_in = self.burn_in;
        config.thin = self.thin;
        config.proposal = match self.fixed_r {
            Some(r) => ProposalConfig::fixed(r),
            None => ProposalConfig {
                target_acceptance: self.target_acceptance,
                ..ProposalConfig::default()
            },
        };
        config.inversion_tol = self.inversion_tol;
        config.ordinate = match self.ordinate_point.as_str() {
            "max" => OrdinatePoint::HighestPosterior,
            "last" => OrdinatePoint::Last,
            other => {
                return Err(CliError::Usage(format!(
                    "--ordinate-point must be max or last, got '{other}'"
                )))
            }
        };
        config.chib_denominator_draws = self.chib_draws;
        config.chib_numerator_samples = self.chib_samples;
        Ok(config)
    }

    fn install_thread_pool(&self, domain_len: usize) {
        let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
        let width = self.threads.unwrap_or_else(|| domain_len.min(cores));
        // the global pool can only be built once per process; later calls
        // keep the first configuration
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(width.max(1))
            .build_global();
    }
}

#[derive(Debug, Args)]
struct FitCmdArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "x")]
    x_column: String,
    #[arg(long, default_value = "y")]
    y_column: String,
    #[arg(long)]
    outdir: PathBuf,
    /// Covariate values for Q(tau|x) slice outputs.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.3, 0.5, 0.7])]
    x: Vec<f64>,
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    /// Also dump per-k chain traces as CSV.
    #[arg(long)]
    dump_trace: bool,
    #[command(flatten)]
    sampler: SamplerArgs,
}

#[derive(Debug, Args)]
struct BandsArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "x")]
    x_column: String,
    #[arg(long, default_value = "y")]
    y_column: String,
    #[arg(long)]
    outdir: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.2, 0.5, 0.7])]
    x: Vec<f64>,
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    /// eb or hb.
    #[arg(long, default_value = "hb")]
    method: String,
    #[command(flatten)]
    sampler: SamplerArgs,
}

#[derive(Debug, Args)]
struct CoverageArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    study: u8,
    #[arg(long, default_value_t = 0.3)]
    a: f64,
    #[arg(long, default_value_t = 0.6)]
    b: f64,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    replications: usize,
    #[arg(long, default_value = "hb")]
    method: String,
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.2, 0.5, 0.7])]
    x: Vec<f64>,
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    sampler: SamplerArgs,
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Transform sidecar; omit for unit-scale data.
    #[arg(long)]
    sidecar: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    tau: Vec<f64>,
    /// Covariate values on the raw scale of the sidecar (unit scale if none).
    #[arg(long, value_delimiter = ',')]
    x: Vec<f64>,
    #[arg(long, default_value = "hb")]
    method: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct RmiseArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    study: u8,
    #[arg(long, default_value_t = 0.3)]
    a: f64,
    #[arg(long, default_value_t = 0.6)]
    b: f64,
    /// Curve CSV with a tau column.
    #[arg(long)]
    input: PathBuf,
    /// Which truth to compare against: qrf|xi1|xi2|intercept|slope.
    #[arg(long, default_value = "qrf")]
    kind: String,
    /// Covariate value for kind = qrf.
    #[arg(long, default_value_t = 0.5)]
    x: f64,
    /// Column holding the estimate (defaults to q for qrf, else the kind).
    #[arg(long)]
    column: Option<String>,
}

/// Parses argv and dispatches; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => 0,
        Err(CliError::Usage(message)) => {
            eprintln!("usage error: {message}");
            2
        }
        Err(err) => {
            eprintln!("error: {err}");
            1
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Transform(args) => cmd_transform(&args),
        Command::Fit(args) => cmd_fit(&args),
        Command::Bands(args) => cmd_bands(&args),
        Command::Coverage(args) => cmd_coverage(&args),
        Command::Predict(args) => cmd_predict(&args),
        Command::Rmise(args) => cmd_rmise(&args),
    }
}

fn truth_spec(study: u8, a: f64, b: f64) -> TruthSpec {
    match study {
        1 => TruthSpec::Study1 { a, b },
        _ => TruthSpec::Study2,
    }
}

fn parse_method(name: &str) -> Result<Method, CliError> {
    match name {
        "eb" => Ok(Method::Eb),
        "hb" => Ok(Method::Hb),
        other => Err(CliError::Usage(format!(
            "--method must be eb or hb, got '{other}'"
        ))),
    }
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let truth = truth_spec(args.study, args.a, args.b);
    let data = truth.generate(args.n, args.seed)?;
    io::write_dataset(&args.out, &data)?;
    Ok(())
}

fn build_transform(
    kind: &str,
    values: &[f64],
    lo: Option<f64>,
    hi: Option<f64>,
    args: &TransformArgs,
) -> Result<UnitTransform, CliError> {
    let transform = match kind {
        "linear" => {
            let lo = lo.unwrap_or_else(|| values.iter().copied().fold(f64::INFINITY, f64::min));
            let hi = hi.unwrap_or_else(|| values.iter().copied().fold(f64::NEG_INFINITY, f64::max));
            UnitTransform::Linear { lo, hi }
        }
        "pareto" => UnitTransform::PowerPareto {
            a: args.pareto_a,
            sigma: args.pareto_sigma,
            k: args.pareto_k,
        },
        "lognormal" => match (args.lognormal_mu, args.lognormal_s) {
            (Some(mu), Some(s)) => UnitTransform::LogNormal { mu, s },
            _ => UnitTransform::fit_lognormal(values)?,
        },
        other => {
            return Err(CliError::Usage(format!(
                "transform kind must be linear, pareto or lognormal, got '{other}'"
            )))
        }
    };
    transform.validate()?;
    Ok(transform)
}

fn cmd_transform(args: &TransformArgs) -> Result<(), CliError> {
    let (xs, ys) = io::read_two_columns(&args.input, &args.x_column, &args.y_column)?;
    let x_transform = build_transform(&args.x_transform, &xs, args.x_lo, args.x_hi, args)?;
    let y_transform = build_transform(&args.y_transform, &ys, args.y_lo, args.y_hi, args)?;
    let unit_x = x_transform.apply(&xs, Direction::Forward)?;
    let unit_y = y_transform.apply(&ys, Direction::Forward)?;
    let data = Dataset::new(unit_x, unit_y)?;
    io::write_dataset(&args.output, &data)?;
    io::write_json(
        &args.sidecar,
        &TransformSidecar {
            predictor_column: args.x_column.clone(),
            response_column: args.y_column.clone(),
            predictor: x_transform,
            response: y_transform,
        },
    )?;
    Ok(())
}

/// Fits the domain and writes selection table, curves, slices, manifest.
fn cmd_fit(args: &FitCmdArgs) -> Result<(), CliError> {
    let data = io::read_dataset(&args.input, &args.x_column, &args.y_column)?;
    let config = args.sampler.fit_config()?;
    args.sampler.install_thread_pool(config.domain.len());
    let fit = model_select::fit_domain(&data, &config)?;
    std::fs::create_dir_all(&args.outdir).map_err(|source| io::IoError::File {
        path: args.outdir.display().to_string(),
        source,
    })?;
    write_fit_outputs(&args.outdir, &fit, &config, &data, &args.x, args.level)?;
    if args.dump_trace {
        for f in &fit.fits {
            let path = args.outdir.join(format!("trace_k{}.csv", f.intervals));
            io::write_trace(&path, &f.chain)?;
        }
    }
    Ok(())
}

/// Shared output writer for fit-like commands.
fn write_fit_outputs(
    outdir: &Path,
    fit: &DomainFit,
    config: &FitConfig,
    data: &Dataset,
    x_slices: &[f64],
    level: f64,
) -> Result<(), CliError> {
    let grid = TauGrid::standard();
    let rows: Vec<SelectionRow> = fit
        .fits
        .iter()
        .zip(&fit.weights.weights)
        .map(|(f, &weight)| SelectionRow {
            k: f.intervals,
            log_marginal: f.marginal.log_marginal,
            weight,
        })
        .collect();
    io::write_selection(
        &outdir.join("selection.csv"),
        &outdir.join("selection.json"),
        &rows,
    )?;

    for (method, chains) in [
        (Method::Eb, vec![(&fit.eb_fit().chain, 1.0)]),
        (Method::Hb, fit.weighted_chains()),
    ] {
        let name = match method {
            Method::Eb => "eb",
            Method::Hb => "hb",
        };
        let xi1 = bands::mean_xi_curve(&chains, 1, &grid);
        let xi2 = bands::mean_xi_curve(&chains, 2, &grid);
        let intercept = xi2.clone();
        let slope: Vec<f64> = xi1.iter().zip(&xi2).map(|(a, b)| a - b).collect();
        io::write_curves(
            &outdir.join(format!("curves_{name}.csv")),
            grid.points(),
            &[
                ("xi1", &xi1),
                ("xi2", &xi2),
                ("intercept", &intercept),
                ("slope", &slope),
            ],
        )?;
        for &x in x_slices {
            let q = bands::mean_quantile_curve(&chains, x, &grid);
            io::write_curves(
                &outdir.join(format!("qrf_{name}_x{x}.csv")),
                grid.points(),
                &[("q", &q)],
            )?;
        }
    }

    let manifest = FitManifest::from_fit(fit, config, data.len(), level, x_slices);
    io::write_json(&outdir.join("manifest.json"), &manifest)?;
    Ok(())
}

fn cmd_bands(args: &BandsArgs) -> Result<(), CliError> {
    let method = parse_method(&args.method)?;
    let data = io::read_dataset(&args.input, &args.x_column, &args.y_column)?;
    let config = args.sampler.fit_config()?;
    args.sampler.install_thread_pool(config.domain.len());
    let fit = model_select::fit_domain(&data, &config)?;
    std::fs::create_dir_all(&args.outdir).map_err(|source| io::IoError::File {
        path: args.outdir.display().to_string(),
        source,
    })?;
    write_fit_outputs(&args.outdir, &fit, &config, &data, &args.x, args.level)?;

    let grid = TauGrid::standard();
    let chains: Vec<(&ChainResult, f64)> = match method {
        Method::Hb => fit.weighted_chains(),
        Method::Eb => vec![(&fit.eb_fit().chain, 1.0)],
    };
    for &x in &args.x {
        let band = bands::band(&chains, x, &grid, args.level, data.len())?;
        let path = args.outdir.join(format!("band_{}_x{x}.csv", args.method));
        io::write_band(&path, grid.points(), &band)?;
    }
    Ok(())
}

fn cmd_coverage(args: &CoverageArgs) -> Result<(), CliError> {
    let method = parse_method(&args.method)?;
    let truth = truth_spec(args.study, args.a, args.b);
    let config = args.sampler.fit_config()?;
    args.sampler.install_thread_pool(args.replications);
    let report = bands::coverage_experiment(
        &truth,
        args.n,
        args.replications,
        method,
        &args.x,
        &config,
        args.level,
        args.sampler.seed,
    )?;
    io::write_json(&args.out, &report)?;
    Ok(())
}

fn cmd_predict(args: &PredictArgs) -> Result<(), CliError> {
    let method = parse_method(&args.method)?;
    let manifest: FitManifest = io::read_json(&args.manifest)?;
    let sidecar: Option<TransformSidecar> = match &args.sidecar {
        Some(path) => Some(io::read_json(path)?),
        None => None,
    };
    if args.tau.is_empty() || args.x.is_empty() {
        return Err(CliError::Usage(
            "predict needs at least one --tau and one --x".to_string(),
        ));
    }

    let weighted: Vec<(usize, f64, &Vec<f64>, &Vec<f64>)> = match method {
        Method::Hb => manifest
            .per_k
            .iter()
            .map(|r| (r.k, r.weight, &r.posterior_mean_theta, &r.posterior_mean_phi))
            .collect(),
        Method::Eb => manifest
            .per_k
            .iter()
            .filter(|r| r.k == manifest.eb_k)
            .map(|r| (r.k, 1.0, &r.posterior_mean_theta, &r.posterior_mean_phi))
            .collect(),
    };

    let mut out = String::from("x,tau,quantile_unit,quantile\n");
    for &x_raw in &args.x {
        let x_unit = match &sidecar {
            Some(s) => s.predictor.forward(x_raw)?,
            None => x_raw,
        };
        if !(0.0..=1.0).contains(&x_unit) {
            return Err(CliError::Usage(format!(
                "covariate {x_raw} maps outside the unit interval"
            )));
        }
        for &tau in &args.tau {
            if !(0.0..=1.0).contains(&tau) {
                return Err(CliError::Usage(format!("tau {tau} outside [0,1]")));
            }
            let mut q_unit = 0.0;
            for (k, weight, theta, phi) in &weighted {
                let basis = SplineBasis::new(manifest.degree, *k)?;
                let (start, values) = basis.eval_nonzero(tau);
                let mut xi1 = 0.0;
                let mut xi2 = 0.0;
                for r in 0..=manifest.degree {
                    xi1 += theta[start + r] * values[r];
                    xi2 += phi[start + r] * values[r];
                }
                q_unit += weight * (x_unit * xi1 + (1.0 - x_unit) * xi2);
            }
            let q_raw = match &sidecar {
                Some(s) => {
                    let clamped = q_unit.clamp(1e-15, 1.0 - 1e-15);
                    match s.response {
                        UnitTransform::Linear { .. } => s.response.inverse(q_unit.clamp(0.0, 1.0))?,
                        _ => s.response.inverse(clamped)?,
                    }
                }
                None => q_unit,
            };
            out.push_str(&format!(
                "{},{},{},{}\n",
                x_raw,
                tau,
                io::fmt_f64(q_unit),
                io::fmt_f64(q_raw)
            ));
        }
    }
    std::fs::write(&args.out, out).map_err(|source| io::IoError::File {
        path: args.out.display().to_string(),
        source,
    })?;
    Ok(())
}

fn cmd_rmise(args: &RmiseArgs) -> Result<(), CliError> {
    let truth = truth_spec(args.study, args.a, args.b);
    let column = args.column.clone().unwrap_or_else(|| match args.kind.as_str() {
        "qrf" => "q".to_string(),
        other => other.to_string(),
    });
    let taus = io::read_column(&args.input, "tau")?;
    let estimate = io::read_column(&args.input, &column)?;
    let truth_curve: Vec<f64> = taus
        .iter()
        .map(|&tau| match args.kind.as_str() {
            "qrf" => Ok(truth.qrf(tau, args.x)),
            "xi1" => Ok(truth.xi(crate::simgen::Curve::Xi1, tau)),
            "xi2" | "intercept" => Ok(truth.xi(crate::simgen::Curve::Xi2, tau)),
            "slope" => {
                let (_, slope) = truth.slope_intercept(tau);
                Ok(slope)
            }
            other => Err(CliError::Usage(format!(
                "--kind must be qrf, xi1, xi2, intercept or slope, got '{other}'"
            ))),
        })
        .collect::<Result<_, _>>()?;
    let value = bands::rmise(&estimate, &truth_curve)?;
    println!("{}", io::fmt_f64(value));
    Ok(())
}
