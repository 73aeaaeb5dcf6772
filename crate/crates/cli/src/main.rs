//! `shiryaev-qsd`: eigenvalues, figure data, simulation and validation for
//! the quasi-stationary distribution of the killed Shiryaev martingale.

mod output;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use shiryaev_qsd::oracle::{run_suite, SuiteOptions, ValidationReport};
use shiryaev_qsd::sim::{self, SimConfig, DEFAULT_BINS};
use shiryaev_qsd::special_fns::{self, EvalResult, WhittakerParams};
use shiryaev_qsd::spectrum::eigenvalue_curve;
use shiryaev_qsd::{critical_threshold, principal_eigenvalue, Error, QsdModel, SpectralPoint};

use output::num;

const EXIT_VALIDATION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(
    name = "shiryaev-qsd",
    version,
    about = "Quasi-stationary distribution of the killed Shiryaev martingale"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Principal eigenvalue and regime for a killing level.
    Eigenvalue {
        #[arg(long = "A")]
        a: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Eigenvalue curve over an evenly spaced range of killing levels.
    Curve {
        #[arg(long = "A-min")]
        a_min: f64,
        #[arg(long = "A-max")]
        a_max: f64,
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Density and distribution function on an evenly spaced grid in 1/x.
    Dist {
        #[arg(long = "A")]
        a: f64,
        /// Member of the continuum family with this eigenvalue instead of
        /// the principal one.
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Simulate killed paths and compare survivors with the closed form.
    Simulate {
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the validation suite; exit status 1 if any check fails.
    Validate {
        #[arg(long = "A")]
        a: f64,
        #[arg(long, value_enum, default_value_t = Suite::Analytic)]
        suite: Suite,
        #[command(flatten)]
        mc: McArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Special-function evaluation (debugging aid).
    #[command(hide = true)]
    Sf {
        #[command(subcommand)]
        action: SfAction,
    },
}

#[derive(Subcommand)]
enum SfAction {
    /// Evaluate one special function.
    Eval {
        #[arg(value_enum)]
        function: SfName,
        /// Arguments in the function's natural order.
        #[arg(allow_negative_numbers = true, required = true)]
        args: Vec<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum SfName {
    Gamma,
    KummerM,
    TricomiU,
    WhittakerM,
    WhittakerW,
    BesselI,
    BesselK,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Suite {
    Analytic,
    Mc,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct OutputArgs {
    /// Output format; `eigenvalue` prints a one-line summary when omitted.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimArgs {
    #[arg(long = "A")]
    a: f64,
    /// Starting point; defaults to A + 1.
    #[arg(long)]
    x0: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, default_value_t = 40.0)]
    horizon: f64,
    #[arg(long, default_value_t = 100_000)]
    paths: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    bins: usize,
}

impl SimArgs {
    fn config(&self) -> SimConfig {
        SimConfig {
            bins: self.bins,
            ..SimConfig::new(
                self.a,
                self.x0.unwrap_or(self.a + 1.0),
                self.dt,
                self.horizon,
                self.paths,
                self.seed,
            )
        }
    }
}

#[derive(Args)]
struct McArgs {
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, default_value_t = 40.0)]
    horizon: f64,
    #[arg(long, default_value_t = 200_000)]
    paths: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug)]
enum Failure {
    Lib(Error),
    Usage(String),
    Io(io::Error),
    Validation,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn emit(out: &OutputArgs, text: &str) -> Result<(), Failure> {
    match &out.out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn format_or(out: &OutputArgs, default: Format) -> Format {
    out.format.unwrap_or(default)
}

fn require_json(out: &OutputArgs, command: &str) -> Result<(), Failure> {
    if out.format == Some(Format::Csv) {
        return Err(Failure::Usage(format!("{command} only writes JSON")));
    }
    Ok(())
}

#[derive(Serialize)]
struct EigenConfig {
    #[serde(rename = "A")]
    a: f64,
}

#[derive(Serialize)]
struct EigenOutput {
    #[serde(flatten)]
    point: SpectralPoint,
    #[serde(rename = "A_star")]
    a_star: f64,
}

fn cmd_eigenvalue(a: f64, out: &OutputArgs) -> Result<(), Failure> {
    let point = principal_eigenvalue(a)?;
    let a_star = critical_threshold();
    let config = EigenConfig { a };
    let text = match out.format {
        None => format!(
            "A = {a}: lambda = {}, xi = {}, regime {}, A* = {}\n",
            point.lambda, point.xi, point.regime, a_star
        ),
        Some(Format::Json) => output::json(
            "eigenvalue",
            &config,
            "result",
            &EigenOutput { point, a_star },
        ),
        Some(Format::Csv) => output::csv(
            "eigenvalue",
            &config,
            &["A", "lambda", "xi", "regime", "A_star"],
            &[vec![
                num(a),
                num(point.lambda),
                num(point.xi),
                point.regime.to_string(),
                num(a_star),
            ]],
        ),
    };
    emit(out, &text)
}

#[derive(Serialize)]
struct CurveConfig {
    #[serde(rename = "A_min")]
    a_min: f64,
    #[serde(rename = "A_max")]
    a_max: f64,
    n: usize,
}

fn cmd_curve(a_min: f64, a_max: f64, n: usize, out: &OutputArgs) -> Result<(), Failure> {
    if !(a_min > 0.0 && a_min < a_max && a_max.is_finite()) || n < 2 {
        return Err(Failure::Usage(format!(
            "need 0 < A-min < A-max and n >= 2, got A-min = {a_min}, A-max = {a_max}, n = {n}"
        )));
    }
    let grid: Vec<f64> = (0..n)
        .map(|i| {
            if i == n - 1 {
                a_max
            } else {
                a_min + (a_max - a_min) * i as f64 / (n - 1) as f64
            }
        })
        .collect();
    let curve = eigenvalue_curve(&grid)?;
    let config = CurveConfig { a_min, a_max, n };
    let text = match format_or(out, Format::Csv) {
        Format::Csv => {
            let rows: Vec<Vec<String>> = curve
                .iter()
                .map(|p| vec![num(p.boundary), num(p.lambda), num(p.xi)])
                .collect();
            output::csv("curve", &config, &["A", "lambda", "xi"], &rows)
        }
        Format::Json => output::json("curve", &config, "points", &curve),
    };
    emit(out, &text)
}

#[derive(Serialize)]
struct DistConfig {
    #[serde(rename = "A")]
    a: f64,
    lambda: Option<f64>,
    n: usize,
    form: String,
}

#[derive(Serialize)]
struct DistRow {
    x: f64,
    inv_x: f64,
    pdf: f64,
    cdf: f64,
}

fn cmd_dist(a: f64, lambda: Option<f64>, n: usize, out: &OutputArgs) -> Result<(), Failure> {
    if n < 1 {
        return Err(Failure::Usage("grid size n must be at least 1".into()));
    }
    let model = match lambda {
        Some(l) => QsdModel::family(a, l)?,
        None => QsdModel::principal(a)?,
    };
    // inv_x = (i/n)/A for i = 1..n, so the last row sits on the boundary
    let mut rows = Vec::with_capacity(n);
    for i in 1..=n {
        let inv_x = i as f64 / (n as f64 * a);
        let x = if i == n { a } else { a * n as f64 / i as f64 };
        rows.push(DistRow {
            x,
            inv_x,
            pdf: model.pdf(x)?,
            cdf: model.cdf(x)?,
        });
    }
    let config = DistConfig {
        a,
        lambda,
        n,
        form: format!("{:?}", model.form),
    };
    let text = match format_or(out, Format::Csv) {
        Format::Csv => {
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| vec![num(r.x), num(r.inv_x), num(r.pdf), num(r.cdf)])
                .collect();
            output::csv("dist", &config, &["x", "inv_x", "pdf", "cdf"], &table)
        }
        Format::Json => output::json("dist", &config, "rows", &rows),
    };
    emit(out, &text)
}

/// Survivor counts in `n` equal bins of `1/x` over `(0, 1/A]`.
#[derive(Serialize)]
struct Histogram {
    inv_x_edges: Vec<f64>,
    counts: Vec<u64>,
}

fn survivor_histogram(values: &[f64], a: f64, n: usize) -> Histogram {
    let width = 1.0 / (a * n as f64);
    let mut counts = vec![0u64; n];
    for &x in values {
        let i = ((1.0 / x) / width) as usize;
        counts[i.min(n - 1)] += 1;
    }
    Histogram {
        inv_x_edges: (0..=n).map(|i| i as f64 * width).collect(),
        counts,
    }
}

#[derive(Serialize)]
struct SimulationSummary {
    lambda: f64,
    survivors: usize,
    killed: usize,
    ks: Option<f64>,
    ks_error: Option<String>,
    rate_estimate: Option<f64>,
    rate_error: Option<String>,
    survival_curve: Vec<(f64, u64)>,
    survivor_histogram: Histogram,
}

fn cmd_simulate(args: &SimArgs, out: &OutputArgs) -> Result<(), Failure> {
    require_json(out, "simulate")?;
    let cfg = args.config();
    let model = QsdModel::principal(cfg.boundary)?;
    let ens = sim::simulate(&cfg)?;
    let (ks, ks_error) = split(sim::ks_distance(&ens, &model));
    let (rate_estimate, rate_error) = split(sim::estimate_kill_rate(&ens));
    let summary = SimulationSummary {
        lambda: model.lambda,
        survivors: ens.n_survivors(),
        killed: ens.n_killed,
        ks,
        ks_error,
        rate_estimate,
        rate_error,
        survival_curve: ens.survival_counts.clone(),
        survivor_histogram: survivor_histogram(&ens.survivor_values, cfg.boundary, 50),
    };
    emit(out, &output::json("simulate", &cfg, "result", &summary))
}

fn split(r: shiryaev_qsd::Result<f64>) -> (Option<f64>, Option<String>) {
    match r {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(e.to_string())),
    }
}

#[derive(Serialize)]
struct ValidateConfig {
    #[serde(rename = "A")]
    a: f64,
    suite: Suite,
    monte_carlo: Option<SimConfig>,
}

fn cmd_validate(a: f64, suite: Suite, mc: &McArgs, out: &OutputArgs) -> Result<(), Failure> {
    require_json(out, "validate")?;
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Domain(format!("A must be positive and finite, got {a}")).into());
    }
    let monte_carlo = (suite != Suite::Analytic)
        .then(|| SimConfig::new(a, a + 1.0, mc.dt, mc.horizon, mc.paths, mc.seed));
    if let Some(cfg) = &monte_carlo {
        cfg.validate()?;
        let requested = cfg.n_paths as f64 * cfg.horizon / cfg.dt;
        let budget = sim::step_budget();
        if requested > budget {
            return Err(Error::Budget { requested, budget }.into());
        }
    }
    let opts = SuiteOptions {
        analytic: suite != Suite::Mc,
        monte_carlo,
    };
    let report: ValidationReport = run_suite(a, &opts);
    let config = ValidateConfig {
        a,
        suite,
        monte_carlo,
    };
    emit(out, &output::json("validate", &config, "report", &report))?;
    if report.pass {
        Ok(())
    } else {
        Err(Failure::Validation)
    }
}

#[derive(Serialize)]
struct SfConfig<'a> {
    function: SfName,
    args: &'a [f64],
}

fn cmd_sf(function: SfName, args: &[f64]) -> Result<(), Failure> {
    let arity = match function {
        SfName::Gamma => 1,
        SfName::BesselI | SfName::BesselK => 2,
        _ => 3,
    };
    if args.len() != arity {
        return Err(Failure::Usage(format!(
            "{} arguments expected, got {}",
            arity,
            args.len()
        )));
    }
    let exact = |v: f64| EvalResult {
        value: v,
        est_rel_error: f64::EPSILON,
        method: special_fns::Method::Series,
    };
    let r = match function {
        SfName::Gamma => exact(special_fns::gamma(args[0])?),
        SfName::KummerM => special_fns::kummer_m(args[0], args[1], args[2])?,
        SfName::TricomiU => special_fns::tricomi_u(args[0], args[1], args[2])?,
        SfName::WhittakerM => {
            special_fns::whittaker_m(WhittakerParams::new(args[0], args[1], args[2])?)?
        }
        SfName::WhittakerW => {
            special_fns::whittaker_w(WhittakerParams::new(args[0], args[1], args[2])?)?
        }
        SfName::BesselI => exact(special_fns::bessel_i(args[0], args[1])?),
        SfName::BesselK => exact(special_fns::bessel_k(args[0], args[1])?),
    };
    let config = SfConfig { function, args };
    let text = output::json("sf eval", &config, "result", &r);
    io::stdout().lock().write_all(text.as_bytes())?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Eigenvalue { a, out } => cmd_eigenvalue(a, &out),
        Command::Curve {
            a_min,
            a_max,
            n,
            out,
        } => cmd_curve(a_min, a_max, n, &out),
        Command::Dist { a, lambda, n, out } => cmd_dist(a, lambda, n, &out),
        Command::Simulate { sim, out } => cmd_simulate(&sim, &out),
        Command::Validate { a, suite, mc, out } => cmd_validate(a, suite, &mc, &out),
        Command::Sf {
            action: SfAction::Eval { function, args },
        } => cmd_sf(function, &args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation) => ExitCode::from(EXIT_VALIDATION),
        Err(Failure::Lib(e @ Error::Budget { .. })) => {
            eprintln!("error: {e}; raise it with {}", sim::STEP_BUDGET_ENV);
            ExitCode::from(EXIT_BUDGET)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_covers_all_survivors() {
        let h = survivor_histogram(&[1.0, 1.5, 10.0, 1e9], 1.0, 4);
        assert_eq!(h.counts.iter().sum::<u64>(), 4);
        assert_eq!(h.counts, vec![2, 0, 1, 1]);
        assert_eq!(h.inv_x_edges.len(), 5);
    }
}
