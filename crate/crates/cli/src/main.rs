mod output;
mod selftest;

use std::fmt::{self, Display, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use projcomp::bergman::PolynomialCoeffs;
use projcomp::carleson::{self, CarlesonReport, ExampleConfig, DEFAULT_ANGLES, DEFAULT_RADII};
use projcomp::dbar::{kohn_identity_residual, KohnConfig};
use projcomp::hypotheses::{hypothesis_report, BoundarySampling, HypothesisOptions, HypothesisReport};
use projcomp::operators::{self, OperatorMatrix, RowPolicy, DEFAULT_MAX_ITER, DEFAULT_TOL};
use projcomp::quadrature::{DiskQuadrature, DiskRuleParams, RuleSelfTest};
use projcomp::{Error, Symbol};
use serde::Serialize;
use serde_json::json;

use output::{csv_bytes, svg_line_plot, write_atomic, Envelope};

const THREADS_VAR: &str = "PROJCOMP_THREADS";

#[derive(Debug)]
pub enum CliError {
    /// Bad input: exit 2.
    Usage(String),
    /// A computation failed: exit 3.
    Numerical { stage: &'static str, source: Error },
    /// Writing a report failed: exit 3.
    Output(String),
    /// `selftest` found a failing check: exit 3.
    Failed(String),
}

impl CliError {
    pub fn output(context: impl Display, err: impl Display) -> Self {
        CliError::Output(format!("{context}: {err}"))
    }

    fn stage(stage: &'static str) -> impl FnOnce(Error) -> CliError {
        move |source| match source {
            Error::InvalidParameter { .. } | Error::Parse { .. } => CliError::Usage(format!("{stage}: {source}")),
            source => CliError::Numerical { stage, source },
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 3,
        }
    }
}

impl Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "error: {msg}"),
            CliError::Numerical { stage, source } => write!(f, "error: numerical failure in stage `{stage}`: {source}"),
            CliError::Output(msg) => write!(f, "error: cannot write output: {msg}"),
            CliError::Failed(msg) => write!(f, "error: {msg}"),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(name = "projcomp", version, about = "Numerical laboratory for projected composition operators on the Bergman space of the disk")]
struct Cli {
    #[command(flatten)]
    rule: RuleArgs,

    /// Stdout format; `csv` is available for `carleson` and `trend`.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Pretty,
}

/// Overrides applied on top of each command's own base rule.
#[derive(Args, Clone, Copy)]
struct RuleArgs {
    /// Gauss-Legendre nodes per radial panel.
    #[arg(long, global = true)]
    radial_order: Option<usize>,
    /// Base angular node count per ring.
    #[arg(long, global = true)]
    angular: Option<usize>,
    #[arg(long, global = true)]
    grading_levels: Option<usize>,
    #[arg(long, global = true)]
    grading_ratio: Option<f64>,
}

impl RuleArgs {
    fn apply(&self, base: DiskRuleParams) -> DiskRuleParams {
        DiskRuleParams {
            radial_order: self.radial_order.unwrap_or(base.radial_order),
            angular_count: self.angular.unwrap_or(base.angular_count),
            grading_levels: self.grading_levels.unwrap_or(base.grading_levels),
            grading_ratio: self.grading_ratio.unwrap_or(base.grading_ratio),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Boundary sets and hypothesis verdicts for a symbol.
    Symbol {
        #[command(subcommand)]
        action: SymbolAction,
    },
    /// Carleson supremum search over a polar grid.
    Carleson(CarlesonArgs),
    /// Normalized Forelli-Rudin integrals on the circle.
    ForelliRudin {
        #[arg(long, default_value_t = 3.0)]
        c: f64,
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.5, 0.9, 0.99, 0.999])]
        radii: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Truncated matrices of the projected composition operator.
    Operator {
        #[command(subcommand)]
        action: OperatorAction,
    },
    /// Truncated operator norms against the truncation degree.
    Trend {
        #[arg(long, value_parser = parse_symbol)]
        symbol: Symbol,
        #[arg(long, value_delimiter = ',', default_values_t = [8usize, 16, 32, 64])]
        degrees: Vec<usize>,
        /// CSV file with columns `degree,k_norm,diff_norm`.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compares the canonical solution of the dbar equation with (I - P)(f∘φ).
    KohnCheck {
        #[arg(long, value_parser = parse_symbol)]
        symbol: Symbol,
        /// Coefficients of f in the monomial basis z^m, e.g. "0,1" or "0.5,0+1i".
        #[arg(long = "f")]
        f: String,
        /// Truncation degree of the projection.
        #[arg(long, default_value_t = 32)]
        degree: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full check of the cut-off example symbol.
    Example {
        #[command(subcommand)]
        action: ExampleAction,
    },
    /// Quadrature moment checks and closed-form oracles.
    Selftest,
}

#[derive(Subcommand)]
enum SymbolAction {
    Check {
        #[arg(long, value_parser = parse_symbol)]
        symbol: Symbol,
        #[arg(long, default_value_t = 256)]
        boundary_samples: usize,
        #[arg(long, default_value_t = 1e-6)]
        eps_b: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CarlesonArgs {
    #[arg(long, value_parser = parse_symbol)]
    symbol: Symbol,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_RADII)]
    radii: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_ANGLES)]
    angles: usize,
    /// CSV file with columns `r,alpha,C`.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// SVG plot of the largest C at each radius.
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum OperatorAction {
    Assemble {
        #[arg(long, value_parser = parse_symbol)]
        symbol: Symbol,
        #[arg(long)]
        degree: usize,
        /// Fixed row count; by default rows grow until the tail is negligible.
        #[arg(long)]
        rows: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Norm {
        /// Matrix written by `operator assemble`.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
        max_iter: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ExampleAction {
    Reproduce {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_symbol(s: &str) -> Result<Symbol, String> {
    s.parse::<Symbol>().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_VAR} must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("{THREADS_VAR}: {e}")))
}

/// Where a report goes once computed.
struct Sink<'a> {
    format: Format,
    out: Option<&'a Path>,
}

impl<'a> Sink<'a> {
    fn new(format: Format, out: &'a Option<PathBuf>) -> Self {
        Sink { format, out: out.as_deref() }
    }

    fn emit<C: Serialize, R: Serialize>(&self, envelope: &Envelope<C, R>, summary: &str, csv: Option<&[u8]>) -> CliResult<()> {
        let json = envelope.to_json()?;
        if let Some(path) = self.out {
            write_atomic(path, json.as_bytes())?;
            print!("{summary}");
            println!("report written to {}", path.display());
            return Ok(());
        }
        match self.format {
            Format::Json => print!("{json}"),
            Format::Pretty => print!("{summary}"),
            Format::Csv => match csv {
                Some(bytes) => print!("{}", String::from_utf8_lossy(bytes)),
                None => return Err(CliError::Usage(format!("--format csv is not available for `{}`", envelope.command))),
            },
        }
        Ok(())
    }
}

fn build_rule(params: DiskRuleParams) -> CliResult<DiskQuadrature> {
    DiskQuadrature::build(params).map_err(CliError::stage("quadrature"))
}

fn base_self_test(params: DiskRuleParams) -> CliResult<RuleSelfTest> {
    Ok(build_rule(params)?.self_test().clone())
}

fn run(cli: &Cli) -> CliResult<()> {
    let rule = cli.rule.apply(DiskRuleParams::default());
    match &cli.command {
        Command::Symbol {
            action: SymbolAction::Check {
                symbol,
                boundary_samples,
                eps_b,
                seed,
                out,
            },
        } => {
            let sampling = BoundarySampling::new(*boundary_samples, *eps_b).map_err(CliError::stage("boundary sampling"))?;
            let options = HypothesisOptions {
                seed: *seed,
                ..HypothesisOptions::default()
            };
            let report = hypothesis_report(symbol, &sampling, &options).map_err(CliError::stage("hypothesis checks"))?;
            let self_test = base_self_test(rule)?;
            let config = json!({ "symbol": symbol.to_string(), "sampling": sampling, "options": options, "rule": rule });
            let summary = hypothesis_summary(&report);
            Sink::new(cli.format, out).emit(&Envelope::new("symbol check", config, &self_test, &report), &summary, None)
        }
        Command::Carleson(args) => carleson_command(cli, args, rule),
        Command::ForelliRudin { c, radii, out } => {
            let table = carleson::forelli_rudin_table(*c, radii).map_err(CliError::stage("forelli-rudin"))?;
            let self_test = base_self_test(rule)?;
            let mut summary = format!("Forelli-Rudin, c = {c}\n{:>10} {:>10} {:>18} {:>18}\n", "r", "nodes", "ratio", "1 + r^2");
            for row in &table.rows {
                let exact = row.exact_ratio.map_or("-".to_string(), |v| format!("{v:.12}"));
                let _ = writeln!(summary, "{:>10} {:>10} {:>18.12} {exact:>18}", row.r, row.nodes, row.ratio);
            }
            if let Some(e) = table.exponent {
                let _ = writeln!(summary, "fitted exponent {e:.4}");
            }
            let config = json!({ "c": c, "radii": radii });
            Sink::new(cli.format, out).emit(&Envelope::new("forelli-rudin", config, &self_test, &table), &summary, None)
        }
        Command::Operator {
            action: OperatorAction::Assemble { symbol, degree, rows, out },
        } => {
            let params = operators::operator_rule_params(symbol, *degree, rule);
            let quad = build_rule(params)?;
            let policy = rows.map_or(RowPolicy::Auto, RowPolicy::Fixed);
            let matrix = operators::assemble_k_matrix(symbol, *degree, policy, &quad).map_err(CliError::stage("operator assembly"))?;
            let summary = format!(
                "{} matrix for {}: {} x {} (rule {}x{}), tail indicator {:.3e}{}\n",
                "K_phi",
                matrix.symbol,
                matrix.rows + 1,
                matrix.degree + 1,
                params.radial_order,
                params.angular_count,
                matrix.tail_indicator,
                if matrix.truncation_limited { ", truncation limited" } else { "" }
            );
            let config = json!({ "symbol": symbol.to_string(), "degree": degree, "rows": rows, "rule": params });
            Sink::new(cli.format, out).emit(&Envelope::new("operator assemble", config, quad.self_test(), &matrix), &summary, None)
        }
        Command::Operator {
            action: OperatorAction::Norm { input, tol, max_iter, out },
        } => {
            let matrix = read_matrix(input)?;
            let norm = operators::operator_norm_estimate(&matrix, *tol, *max_iter).map_err(CliError::stage("power iteration"))?;
            let self_test = base_self_test(matrix.rule)?;
            let result = json!({
                "symbol": matrix.symbol,
                "degree": matrix.degree,
                "rows": matrix.rows + 1,
                "norm": norm,
                "truncation_limited": matrix.truncation_limited,
            });
            let summary = format!("||K_phi|| on degree <= {} for {}: {norm:.12}\n", matrix.degree, matrix.symbol);
            let config = json!({ "input": input.display().to_string(), "tol": tol, "max_iter": max_iter });
            Sink::new(cli.format, out).emit(&Envelope::new("operator norm", config, &self_test, &result), &summary, None)
        }
        Command::Trend { symbol, degrees, csv, out } => {
            let trend = operators::norm_trend(symbol, degrees, rule).map_err(CliError::stage("norm trend"))?;
            let table = csv_bytes(
                &["degree", "k_norm", "diff_norm"],
                trend
                    .degrees
                    .iter()
                    .zip(&trend.k_norms)
                    .zip(&trend.diff_norms)
                    .map(|((d, k), g)| vec![d.to_string(), k.to_string(), g.to_string()]),
            )?;
            if let Some(path) = csv {
                write_atomic(path, &table)?;
            }
            let self_test = base_self_test(rule)?;
            let mut summary = format!("{:>8} {:>20} {:>20}\n", "degree", "||K_phi||", "diff form");
            for ((d, k), g) in trend.degrees.iter().zip(&trend.k_norms).zip(&trend.diff_norms) {
                let _ = writeln!(summary, "{d:>8} {k:>20.12} {g:>20.6e}");
            }
            let _ = writeln!(
                summary,
                "slopes: K {:.4} ({}), diff {:.4} ({})",
                trend.k_slope,
                if trend.k_bounded() { "bounded" } else { "growing" },
                trend.diff_slope,
                if trend.diff_bounded() { "bounded" } else { "growing" }
            );
            let config = json!({ "symbol": symbol.to_string(), "degrees": degrees, "rule": rule });
            Sink::new(cli.format, out).emit(&Envelope::new("trend", config, &self_test, &trend), &summary, Some(&table))
        }
        Command::KohnCheck { symbol, f, degree, out } => {
            let coeffs: PolynomialCoeffs = f.parse().map_err(|e| CliError::Usage(format!("--f: {e}")))?;
            let defaults = KohnConfig::default();
            let config = KohnConfig {
                rule: cli.rule.apply(defaults.rule),
                projection_degree: *degree,
                ..defaults
            };
            let report = kohn_identity_residual(symbol, &coeffs, &config).map_err(CliError::stage("kohn identity"))?;
            let self_test = base_self_test(config.rule)?;
            let summary = format!(
                "residual {:.3e}  left {:.6e}  right {:.6e}{}\n",
                report.residual,
                report.left_norm,
                report.right_norm,
                if report.truncation_flag { "  (truncated)" } else { "" }
            );
            let cfg = json!({ "symbol": symbol.to_string(), "f": coeffs, "kohn": config });
            Sink::new(cli.format, out).emit(&Envelope::new("kohn-check", cfg, &self_test, &report), &summary, None)
        }
        Command::Example {
            action: ExampleAction::Reproduce { seed, out },
        } => {
            let mut config = ExampleConfig {
                rule,
                ..ExampleConfig::default()
            };
            config.hypotheses.seed = *seed;
            let report = carleson::example_reproduce(&config).map_err(CliError::stage("example reproduction"))?;
            let self_test = base_self_test(rule)?;
            let mut summary = hypothesis_summary(&report.hypotheses);
            let _ = writeln!(summary, "{:>8} {:>14} {:>14} {:>14} {:>7}", "r", "bound", "ceiling", "direct C", "within");
            for row in &report.comparison {
                let direct = row.direct.map_or("-".to_string(), |c| format!("{c:.8}"));
                let _ = writeln!(
                    summary,
                    "{:>8} {:>14.8} {:>14.8} {direct:>14} {:>7}",
                    row.r, row.analytic_bound, row.ceiling, row.within_ceiling
                );
            }
            summary.push_str(&carleson_summary(&report.carleson));
            for note in &report.notes {
                let _ = writeln!(summary, "note: {note}");
            }
            let cfg = json!({ "seed": seed, "example": config });
            Sink::new(cli.format, out).emit(&Envelope::new("example reproduce", cfg, &self_test, &report), &summary, None)
        }
        Command::Selftest => {
            let checks = selftest::run(rule).map_err(CliError::stage("selftest"))?;
            let self_test = base_self_test(rule)?;
            let mut summary = String::new();
            for c in &checks {
                let status = if c.pass { "ok" } else { "FAILED" };
                let _ = writeln!(summary, "{status:>6}  {:<32} {:.3e}", c.name, (c.value - c.expected).abs());
            }
            let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
            let config = json!({ "rule": rule });
            Sink::new(cli.format, &None).emit(&Envelope::new("selftest", config, &self_test, &checks), &summary, None)?;
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Failed(format!("selftest failed: {}", failed.join(", "))))
            }
        }
    }
}

fn carleson_command(cli: &Cli, args: &CarlesonArgs, rule: DiskRuleParams) -> CliResult<()> {
    let report = carleson::carleson_sup_search(&args.symbol, &args.radii, args.angles, rule).map_err(CliError::stage("carleson search"))?;
    let table = csv_bytes(
        &["r", "alpha", "C"],
        report
            .grid
            .iter()
            .map(|p| vec![p.r.to_string(), p.alpha.to_string(), p.c.map_or_else(String::new, |c| c.to_string())]),
    )?;
    if let Some(path) = &args.csv {
        write_atomic(path, &table)?;
    }
    if let Some(path) = &args.svg {
        let profile: Vec<(f64, f64)> = (0..report.radii.len())
            .filter_map(|i| report.max_at_radius(i).map(|c| (report.radii[i], c)))
            .collect();
        write_atomic(path, svg_line_plot(&profile, "r", "max C").as_bytes())?;
    }
    let self_test = base_self_test(rule)?;
    let config = json!({
        "symbol": args.symbol.to_string(),
        "radii": args.radii,
        "angles": args.angles,
        "rule": rule,
    });
    let sink = Sink {
        format: cli.format,
        out: args.out.as_deref(),
    };
    sink.emit(&Envelope::new("carleson", config, &self_test, &report), &carleson_summary(&report), Some(&table))
}

fn read_matrix(path: &Path) -> CliResult<OperatorMatrix> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{} is not JSON: {e}", path.display())))?;
    if let Some(result) = value.get_mut("result") {
        value = result.take();
    }
    serde_json::from_value(value).map_err(|e| CliError::Usage(format!("{} does not hold an operator matrix: {e}", path.display())))
}

fn hypothesis_summary(r: &HypothesisReport) -> String {
    let mut s = format!("symbol {}\n", r.symbol);
    let _ = writeln!(
        s,
        "F: {} of {} samples{}, K {}",
        r.f_count,
        r.sampling.count,
        if r.f_is_whole_circle { " (whole circle)" } else { "" },
        if r.k_empty { "empty" } else { "nonempty" }
    );
    let _ = writeln!(s, "max |dbar phi| on F {:.3e}, near F {:.3e}", r.max_dzbar_on_f, r.max_dzbar_near_f);
    if let (Some(lo), Some(hi)) = (r.min_jac_on_f, r.max_jac_on_f) {
        let _ = writeln!(s, "Jacobian on F in [{lo:.12}, {hi:.12}]");
    }
    let _ = writeln!(
        s,
        "injectivity violations {} of {} pairs",
        r.injectivity_violations, r.injectivity.pairs_checked
    );
    if let Some(c) = r.distance_constant {
        let _ = writeln!(s, "distance constant {c:.6}");
    }
    let verdict = |v| serde_json::to_value(v).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
    let _ = writeln!(s, "thm1 {}  thm2 {}", verdict(r.thm1), verdict(r.thm2));
    s
}

fn carleson_summary(r: &CarlesonReport) -> String {
    let mut s = format!("Carleson search for {}\n{:>10} {:>18}\n", r.symbol, "r", "max C");
    for (i, radius) in r.radii.iter().enumerate() {
        let c = r.max_at_radius(i).map_or("failed".to_string(), |c| format!("{c:.12}"));
        let _ = writeln!(s, "{radius:>10} {c:>18}");
    }
    let _ = writeln!(
        s,
        "sup {:.12} at (r {}, alpha {:.6}); beta {:.4}; {} failures; verdict {}",
        r.sup_estimate,
        r.sup_at.0,
        r.sup_at.1,
        r.exponent_fit.beta,
        r.failures,
        r.verdict.as_str()
    );
    s
}
