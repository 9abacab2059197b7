//! Command-line surface. [`run`] returns the text to print and the exit
//! code so the binary stays a thin wrapper and tests can call it directly.

use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use jacobi_core::coefficients::{CoeffTable, LimitParams, Route};
use jacobi_core::exact::HalfIntegerParams;
use jacobi_core::moments::{finite_moment, limit_moment, Moment};
use jacobi_core::Rational;
use serde::Serialize;

use crate::cache::{par_build_table, Cache, CACHE_ENV};
use crate::formats::{
    estimates_grid, parse_rational, write_csv, CoeffTableJson, ExpPolyJson, Grid,
};
use crate::mc::{estimate_moments, MCConfig};
use crate::verify::{Report, Suite};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Pretty,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "jacobi", version, about = "Moments of the Hermitian Jacobi process and their free limits")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Pretty, global = true)]
    pub format: Format,
    /// Directory for cached coefficient tables.
    #[arg(long, env = CACHE_ENV, global = true)]
    pub cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Finite-size moment E tr(J^n) as an exponential polynomial.
    Finite(FiniteArgs),
    /// Limit of the normalized moment E tr(J^n)/m.
    Limit(LimitArgs),
    /// Coefficient table c_{n,h,l} at (lambda, theta).
    Coeff(CoeffArgs),
    /// Run a verification suite, or `all`.
    Verify(VerifyArgs),
    /// Monte Carlo estimate of (1/m) E tr(J^n).
    Simulate(SimulateArgs),
    /// CSV of t, M_1(t), ..., M_N(t).
    Table(TableArgs),
}

#[derive(Debug, Args)]
pub struct FiniteParams {
    #[arg(long)]
    pub m: u32,
    /// Corner width; a half-integer is allowed, e.g. 7/2.
    #[arg(long)]
    pub p: String,
    #[arg(long)]
    pub d: u32,
}

impl FiniteParams {
    fn parse(&self) -> anyhow::Result<HalfIntegerParams> {
        Ok(HalfIntegerParams::new(self.m, parse_rational(&self.p)?, self.d)?)
    }
}

#[derive(Debug, Args)]
pub struct LimitArgsCommon {
    #[arg(long)]
    pub lambda: String,
    #[arg(long)]
    pub theta: String,
}

impl LimitArgsCommon {
    fn parse(&self) -> anyhow::Result<LimitParams> {
        Ok(LimitParams::new(parse_rational(&self.lambda)?, parse_rational(&self.theta)?)?)
    }
}

#[derive(Debug, Args)]
pub struct FiniteArgs {
    #[arg(long)]
    pub n: u32,
    #[command(flatten)]
    pub params: FiniteParams,
    /// Comma-separated time grid.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub t: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct LimitArgs {
    #[arg(long)]
    pub n: u32,
    #[command(flatten)]
    pub params: LimitArgsCommon,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub t: Vec<f64>,
    /// Coefficient table JSON to use instead of computing or caching one.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CoeffArgs {
    #[arg(long)]
    pub n: u32,
    #[command(flatten)]
    pub params: LimitArgsCommon,
    /// Emit every n' <= n instead of n alone.
    #[arg(long)]
    pub all: bool,
    #[arg(long, default_value = "division")]
    pub route: Route,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suite name or `all`.
    pub suite: String,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub p: usize,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long, default_value_t = 400)]
    pub steps: usize,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 8)]
    pub streams: usize,
    #[arg(long, default_value_t = 2)]
    pub nmax: u32,
    /// Physical time per unit of t; defaults to 1/d.
    #[arg(long)]
    pub time_scale: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TableKind {
    Finite,
    Limit,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long, value_enum)]
    pub kind: TableKind,
    #[arg(long)]
    pub nmax: u32,
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long)]
    pub lambda: Option<String>,
    #[arg(long)]
    pub theta: Option<String>,
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,1,2,5")]
    pub t: Vec<f64>,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub exit_code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self { stdout, exit_code: 0 }
    }
}

pub fn run(cli: Cli) -> anyhow::Result<Outcome> {
    let cache = cli.cache_dir.clone().map(Cache::new);
    match cli.command {
        Command::Finite(a) => cmd_finite(&a, cli.format).map(Outcome::ok),
        Command::Limit(a) => cmd_limit(&a, cache.as_ref(), cli.format).map(Outcome::ok),
        Command::Coeff(a) => cmd_coeff(&a, cache.as_ref(), cli.format).map(Outcome::ok),
        Command::Verify(a) => cmd_verify(&a, cli.format),
        Command::Simulate(a) => cmd_simulate(&a, cli.format).map(Outcome::ok),
        Command::Table(a) => cmd_table(&a, cache.as_ref()).map(Outcome::ok),
    }
}

fn csv_string(grid: &Grid) -> anyhow::Result<String> {
    let mut buf = Vec::new();
    write_csv(grid, &mut buf)?;
    Ok(String::from_utf8(buf)?)
}

fn check_grid(t: &[f64]) -> anyhow::Result<()> {
    if let Some(x) = t.iter().find(|x| x.is_nan() || **x < 0.0 || x.is_infinite()) {
        bail!("time grid values must be finite and >= 0, got {x}");
    }
    Ok(())
}

fn moment_output(title: &str, label: &str, moment: &Moment, t: &[f64], format: Format) -> anyhow::Result<String> {
    check_grid(t)?;
    let rows: Vec<Vec<f64>> = t.iter().map(|&x| vec![x, moment.eval(x)]).collect();
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(&ExpPolyJson::from_exp_poly(&moment.to_exp_poly()))?),
        Format::Csv => csv_string(&Grid { header: vec!["t".into(), label.into()], rows }),
        Format::Pretty => {
            let mut s = String::new();
            writeln!(s, "{title}")?;
            writeln!(s, "stationary: {}", moment.stationary)?;
            writeln!(s, "time part:  {}", moment.time_part)?;
            writeln!(s, "{:>10}  {label}", "t")?;
            for row in rows {
                writeln!(s, "{:>10}  {}", row[0], row[1])?;
            }
            Ok(s)
        }
    }
}

pub fn cmd_finite(a: &FiniteArgs, format: Format) -> anyhow::Result<String> {
    let params = a.params.parse()?;
    let fm = finite_moment(a.n, &params)?;
    let title = format!("E tr(J^{}) at (m, p, d) = ({}, {}, {})", a.n, params.m(), params.p(), params.d());
    moment_output(&title, &format!("M_{}", a.n), &fm.moment(), &a.t, format)
}

/// A table covering `n_max`: read from `file`, else from the cache, else built.
pub fn obtain_table(
    params: &LimitParams,
    n_max: u32,
    file: Option<&PathBuf>,
    cache: Option<&Cache>,
) -> anyhow::Result<CoeffTable> {
    if let Some(path) = file {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let json: CoeffTableJson = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let table = json.to_table()?;
        if table.params() != params {
            bail!(
                "table is for (lambda, theta) = ({}, {}), not ({}, {})",
                table.params().lambda(),
                table.params().theta(),
                params.lambda(),
                params.theta()
            );
        }
        return Ok(table);
    }
    match cache {
        Some(c) => c.get_or_build(params, n_max, Route::Division),
        None => par_build_table(n_max, params, Route::Division),
    }
}

pub fn cmd_limit(a: &LimitArgs, cache: Option<&Cache>, format: Format) -> anyhow::Result<String> {
    let params = a.params.parse()?;
    let table = obtain_table(&params, a.n, a.table.as_ref(), cache)?;
    let moment = limit_moment(a.n, &table)?;
    let title = format!("lim E tr(J^{})/m at (lambda, theta) = ({}, {})", a.n, params.lambda(), params.theta());
    moment_output(&title, &format!("M_{}", a.n), &moment, &a.t, format)
}

pub fn cmd_coeff(a: &CoeffArgs, cache: Option<&Cache>, format: Format) -> anyhow::Result<String> {
    let params = a.params.parse()?;
    if a.n == 0 {
        bail!("n must be positive");
    }
    let table = match (cache, a.route) {
        (Some(c), Route::Division | Route::Symmetric | Route::Recurrence) => c.get_or_build(&params, a.n, a.route)?,
        _ => par_build_table(a.n, &params, a.route)?,
    };
    let n = a.n;
    let all = a.all;
    let json = CoeffTableJson::from_filtered(&table, |(k, _, _)| if all { k <= n } else { k == n });
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(&json)?),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["n", "h", "l", "value", "route"])?;
            for e in &json.entries {
                w.write_record([e.n.to_string(), e.h.to_string(), e.l.to_string(), e.value.clone(), e.route.clone()])?;
            }
            Ok(String::from_utf8(w.into_inner()?)?)
        }
        Format::Pretty => {
            let mut s = String::new();
            writeln!(s, "c_(n,h,l) at (lambda, theta) = ({}, {})", params.lambda(), params.theta())?;
            for e in &json.entries {
                let v = parse_rational(&e.value)?;
                writeln!(s, "c_({},{},{}) = {v}  [{}]", e.n, e.h, e.l, e.route)?;
            }
            Ok(s)
        }
    }
}

#[derive(Serialize)]
struct ReportJson<'a> {
    suite: &'a str,
    passed: bool,
    cases: usize,
    skipped: usize,
    notes: &'a [String],
    failures: &'a [String],
}

pub fn cmd_verify(a: &VerifyArgs, format: Format) -> anyhow::Result<Outcome> {
    let reports: Vec<Report> = if a.suite == "all" {
        crate::verify::run_all()
    } else {
        vec![a.suite.parse::<Suite>().map_err(anyhow::Error::msg)?.run()]
    };
    let passed = reports.iter().all(Report::passed);
    let stdout = match format {
        Format::Json => {
            let rows: Vec<ReportJson> = reports
                .iter()
                .map(|r| ReportJson {
                    suite: r.suite.name(),
                    passed: r.passed(),
                    cases: r.cases,
                    skipped: r.skipped,
                    notes: &r.notes,
                    failures: &r.failures,
                })
                .collect();
            serde_json::to_string_pretty(&rows)?
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["suite", "passed", "cases", "skipped", "failures"])?;
            for r in &reports {
                w.write_record([
                    r.suite.name().to_string(),
                    r.passed().to_string(),
                    r.cases.to_string(),
                    r.skipped.to_string(),
                    r.failures.len().to_string(),
                ])?;
            }
            String::from_utf8(w.into_inner()?)?
        }
        Format::Pretty => reports.iter().map(|r| format!("{r}\n")).collect(),
    };
    Ok(Outcome { stdout, exit_code: if passed { 0 } else { 1 } })
}

pub fn simulate_config(a: &SimulateArgs) -> MCConfig {
    let mut cfg = MCConfig::new(a.d, a.m, a.p, a.t);
    cfg.steps = a.steps;
    cfg.samples = a.samples;
    cfg.seed = a.seed;
    cfg.streams = a.streams;
    if let Some(s) = a.time_scale {
        cfg.time_scale = s;
    }
    cfg
}

pub fn cmd_simulate(a: &SimulateArgs, format: Format) -> anyhow::Result<String> {
    let cfg = simulate_config(a);
    let result = estimate_moments(&cfg, a.nmax)?;
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(&result.moments)?),
        Format::Csv => csv_string(&estimates_grid(&result.moments)),
        Format::Pretty => {
            let mut s = String::new();
            writeln!(
                s,
                "(1/m) E tr(J^n) at (d, m, p) = ({}, {}, {}), t = {}, {} samples in {:.2?}",
                cfg.d, cfg.m, cfg.p, cfg.t, result.samples_used, result.wall_time
            )?;
            for e in &result.moments {
                writeln!(s, "n = {}: {:.6} +/- {:.6}", e.n, e.mean, e.stderr)?;
            }
            Ok(s)
        }
    }
}

fn required<T: Clone>(v: &Option<T>, flag: &str) -> anyhow::Result<T> {
    v.clone().with_context(|| format!("--{flag} is required for this table"))
}

pub fn cmd_table(a: &TableArgs, cache: Option<&Cache>) -> anyhow::Result<String> {
    check_grid(&a.t)?;
    if a.nmax == 0 {
        bail!("nmax must be positive");
    }
    let moments: Vec<Moment> = match a.kind {
        TableKind::Finite => {
            let p = required(&a.p, "p")?;
            let params = HalfIntegerParams::new(required(&a.m, "m")?, parse_rational(&p)?, required(&a.d, "d")?)?;
            (1..=a.nmax).map(|n| finite_moment(n, &params).map(|f| f.moment())).collect::<Result<_, _>>()?
        }
        TableKind::Limit => {
            let lambda: Rational = parse_rational(&required(&a.lambda, "lambda")?)?;
            let params = LimitParams::new(lambda, parse_rational(&required(&a.theta, "theta")?)?)?;
            let table = obtain_table(&params, a.nmax, None, cache)?;
            (1..=a.nmax).map(|n| limit_moment(n, &table)).collect::<Result<_, _>>()?
        }
    };
    let mut header = vec!["t".to_string()];
    header.extend((1..=a.nmax).map(|n| format!("M_{n}")));
    let rows = a
        .t
        .iter()
        .map(|&t| std::iter::once(t).chain(moments.iter().map(|m| m.eval(t))).collect())
        .collect();
    let text = csv_string(&Grid { header, rows })?;
    match &a.out {
        Some(path) => {
            std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}
