//! Command-line front end: exact tables, Monte Carlo runs, duality audits
//! and plot data.
//!
//! Exit codes: `0` success, `1` numerical or sampler failure (and failed
//! duality audits), `2` bad arguments.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use poslab::exact::{self, TABLE_DIGITS};
use poslab::montecarlo::{self, Experiment, DEFAULT_Z};
use poslab::{DualityReport, Estimate, Method};
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "poslab", version, about = "Exact and sampled odds of positive vectors in random subspaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact probabilities p(n,k) for all 1 <= k <= n <= n-max.
    Table {
        #[arg(long)]
        n_max: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Monte Carlo estimate of p(n,k).
    Simulate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, value_enum, default_value_t = MethodArg::Kernel)]
        method: MethodArg,
        #[arg(long, default_value_t = DEFAULT_Z)]
        z: f64,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Check that exactly one of V and its complement contains a positive vector.
    Duality {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Decimal p(n,k) records for external plotting.
    Plot {
        #[arg(long)]
        n_max: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Master seed, or `random` to draw one from the OS.
    #[arg(long, default_value = "0")]
    seed: SeedArg,
    #[arg(long, default_value_t = poslab::decide::DEFAULT_TOL)]
    tol: f64,
    /// Worker threads; 0 or `auto` uses every core.
    #[arg(long, env = "POSLAB_THREADS", default_value = "auto")]
    threads: ThreadsArg,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Kernel,
    Span,
    Hull,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Kernel => Method::Kernel,
            MethodArg::Span => Method::Span,
            MethodArg::Hull => Method::Hull,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum SeedArg {
    Fixed(u64),
    Random,
}

impl FromStr for SeedArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "random" {
            return Ok(SeedArg::Random);
        }
        s.parse().map(SeedArg::Fixed).map_err(|_| format!("expected a u64 or `random`, got {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct ThreadsArg(usize);

impl FromStr for ThreadsArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(ThreadsArg(0));
        }
        s.parse().map(ThreadsArg).map_err(|_| format!("expected a thread count or `auto`, got {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Table,
    Simulate,
    Duality,
    Plot,
}

/// Fully validated invocation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub n: usize,
    pub k: usize,
    pub n_max: usize,
    pub trials: u64,
    pub seed: u64,
    pub method: Method,
    pub z: f64,
    pub tol: f64,
    pub threads: usize,
    pub format: Format,
    pub output: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] poslab::Error),
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("duality audit failed: {0} xor failures, {1} strict-duality failures")]
    AuditFailed(u64, u64),
}

fn usage_err<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

fn resolve_seed(seed: SeedArg, stderr: &mut dyn Write) -> u64 {
    match seed {
        SeedArg::Fixed(s) => s,
        SeedArg::Random => {
            let s = rand::random::<u64>();
            let _ = writeln!(stderr, "seed: {s}");
            s
        }
    }
}

fn check_positive(name: &str, v: f64) -> Result<(), CliError> {
    if !(v > 0.0 && v.is_finite()) {
        return usage_err(format!("--{name} must be a positive number, got {v}"));
    }
    Ok(())
}

fn build_config(cli: Cli, stderr: &mut dyn Write) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig {
        command: CommandKind::Table,
        n: 0,
        k: 0,
        n_max: 0,
        trials: 0,
        seed: 0,
        method: Method::Kernel,
        z: DEFAULT_Z,
        tol: poslab::decide::DEFAULT_TOL,
        threads: 0,
        format: Format::Text,
        output: None,
    };
    let out = match cli.command {
        Command::Table { n_max: 0, .. } | Command::Plot { n_max: 0, .. } => {
            return usage_err("--n-max must be at least 1");
        }
        Command::Table { n_max, out } => {
            cfg.command = CommandKind::Table;
            cfg.n_max = n_max;
            out
        }
        Command::Plot { n_max, out } => {
            cfg.command = CommandKind::Plot;
            cfg.n_max = n_max;
            out
        }
        Command::Simulate { n, k, trials, method, z, run, out } => {
            if n == 0 || k == 0 || k > n {
                return usage_err(format!("need 1 <= k <= n, got n={n}, k={k}"));
            }
            let method = Method::from(method);
            if method == Method::Hull && k == n {
                return usage_err("--method hull needs k < n");
            }
            if trials == 0 {
                return usage_err("--trials must be at least 1");
            }
            check_positive("z", z)?;
            check_positive("tol", run.tol)?;
            cfg.command = CommandKind::Simulate;
            (cfg.n, cfg.k, cfg.trials, cfg.method, cfg.z, cfg.tol) = (n, k, trials, method, z, run.tol);
            cfg.threads = run.threads.0;
            cfg.seed = resolve_seed(run.seed, stderr);
            out
        }
        Command::Duality { n, k, trials, run, out } => {
            if k == 0 || k >= n {
                return usage_err(format!("need 1 <= k < n, got n={n}, k={k}"));
            }
            if trials == 0 {
                return usage_err("--trials must be at least 1");
            }
            check_positive("tol", run.tol)?;
            cfg.command = CommandKind::Duality;
            (cfg.n, cfg.k, cfg.trials, cfg.tol) = (n, k, trials, run.tol);
            cfg.threads = run.threads.0;
            cfg.seed = resolve_seed(run.seed, stderr);
            out
        }
    };
    cfg.format = out.format;
    cfg.output = out.output;
    Ok(cfg)
}

/// Exact table in the requested format.
pub fn emit_table(n_max: usize, format: Format) -> String {
    let rows = exact::p_table(n_max);
    let mut s = String::new();
    match format {
        Format::Csv => {
            s.push_str("n,k,p_num,p_den,p_decimal\n");
            for r in &rows {
                let _ = writeln!(s, "{},{},{},{},{}", r.n, r.k, r.p.numer(), r.p.denom(), r.p_decimal);
            }
        }
        Format::Text => {
            let width = rows.iter().map(|r| r.p.to_string().len()).max().unwrap_or(1).max(1);
            let _ = writeln!(s, "{:>4} {:>4}  {:>width$}  {}", "n", "k", "p", "decimal");
            for r in &rows {
                let _ = writeln!(s, "{:>4} {:>4}  {:>width$}  {}", r.n, r.k, r.p.to_string(), r.p_decimal);
            }
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Table<'a> {
                n_max: usize,
                rows: &'a [exact::ProbTableRow],
            }
            s = serde_json::to_string(&Table { n_max, rows: &rows }).expect("table serializes");
            s.push('\n');
        }
    }
    s
}

/// One `n,k,p` record per table cell, `p` with six decimals.
pub fn emit_plot_data(n_max: usize, format: Format) -> String {
    let rows = exact::p_table(n_max);
    let mut s = String::new();
    match format {
        Format::Csv => {
            s.push_str("n,k,p\n");
            for r in &rows {
                let _ = writeln!(s, "{},{},{}", r.n, r.k, r.p_decimal);
            }
        }
        Format::Text => {
            s.push_str("# n k p\n");
            for r in &rows {
                let _ = writeln!(s, "{} {} {}", r.n, r.k, r.p_decimal);
            }
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Point {
                n: usize,
                k: usize,
                p: f64,
            }
            #[derive(Serialize)]
            struct Plot {
                n_max: usize,
                points: Vec<Point>,
            }
            let points = rows
                .iter()
                .map(|r| Point { n: r.n, k: r.k, p: r.p_decimal.parse().expect("decimal string") })
                .collect();
            s = serde_json::to_string(&Plot { n_max, points }).expect("plot serializes");
            s.push('\n');
        }
    }
    s
}

pub fn format_estimate(e: &Estimate, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string(e).expect("estimate serializes") + "\n",
        Format::Csv => format!(
            "n,k,method,trials,successes,p_hat,ci_low,ci_high,exact,z_score,seed,boundary_count\n\
             {},{},{},{},{},{},{},{},{},{},{},{}\n",
            e.n,
            e.k,
            e.method,
            e.trials,
            e.successes,
            e.p_hat,
            e.ci_low,
            e.ci_high,
            e.exact,
            e.z_score,
            e.seed,
            e.boundary_count
        ),
        Format::Text => format!(
            "n={} k={} method={} trials={} seed={}\n\
             successes={} p_hat={:.6} ci=[{:.6}, {:.6}]\n\
             exact={} ({}) z_score={:.3} boundary_count={}\n",
            e.n,
            e.k,
            e.method,
            e.trials,
            e.seed,
            e.successes,
            e.p_hat,
            e.ci_low,
            e.ci_high,
            e.exact,
            e.exact.to_decimal(TABLE_DIGITS),
            e.z_score,
            e.boundary_count
        ),
    }
}

pub fn format_duality(r: &DualityReport, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string(r).expect("report serializes") + "\n",
        Format::Csv => format!(
            "n,k,trials,seed,xor_holds,xor_fails,boundary,strict_dual_holds,strict_dual_fails\n\
             {},{},{},{},{},{},{},{},{}\n",
            r.n, r.k, r.trials, r.seed, r.xor_holds, r.xor_fails, r.boundary, r.strict_dual_holds, r.strict_dual_fails
        ),
        Format::Text => {
            let verdict = if r.xor_fails == 0 && r.strict_dual_fails == 0 { "PASS" } else { "FAIL" };
            format!(
                "duality audit n={} k={} trials={} seed={}: {verdict}\n\
                 xor: {} hold, {} fail; strict duality: {} hold, {} fail; boundary: {}\n",
                r.n,
                r.k,
                r.trials,
                r.seed,
                r.xor_holds,
                r.xor_fails,
                r.strict_dual_holds,
                r.strict_dual_fails,
                r.boundary
            )
        }
    }
}

fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let pool =
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| CliError::Io(io::Error::other(e)))?;
    Ok(pool.install(f))
}

struct Report {
    text: String,
    /// `(xor_fails, strict_dual_fails)` of a failed duality audit.
    audit_failure: Option<(u64, u64)>,
}

impl From<String> for Report {
    fn from(text: String) -> Self {
        Self { text, audit_failure: None }
    }
}

fn execute(cfg: &RunConfig) -> Result<Report, CliError> {
    match cfg.command {
        CommandKind::Table => Ok(emit_table(cfg.n_max, cfg.format).into()),
        CommandKind::Plot => Ok(emit_plot_data(cfg.n_max, cfg.format).into()),
        CommandKind::Simulate => {
            let exp = Experiment::new(cfg.n, cfg.k, cfg.trials, cfg.seed, cfg.method).z(cfg.z).tol(cfg.tol);
            let est = with_threads(cfg.threads, || exp.run())??;
            Ok(format_estimate(&est, cfg.format).into())
        }
        CommandKind::Duality => {
            let (n, k, trials, seed, tol) = (cfg.n, cfg.k, cfg.trials, cfg.seed, cfg.tol);
            let r = with_threads(cfg.threads, || montecarlo::duality_audit_with(n, k, trials, seed, tol))??;
            let failed = r.xor_fails > 0 || r.strict_dual_fails > 0;
            Ok(Report {
                text: format_duality(&r, cfg.format),
                audit_failure: failed.then_some((r.xor_fails, r.strict_dual_fails)),
            })
        }
    }
}

fn usage() -> clap::builder::StyledStr {
    <Cli as clap::CommandFactory>::command().render_usage()
}

/// Runs the CLI on `args` (including the program name), writing the report
/// to `stdout` or `--output`, diagnostics to `stderr`. Returns the exit code.
pub fn run_with<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    return EXIT_OK;
                }
                _ => EXIT_USAGE,
            };
            let msg = e.render().to_string();
            let _ = write!(stderr, "{msg}");
            if !msg.contains("Usage:") {
                let _ = writeln!(stderr, "\n{}", usage());
            }
            return code;
        }
    };
    let result = build_config(cli, stderr).and_then(|cfg| {
        let report = execute(&cfg)?;
        match &cfg.output {
            Some(path) => std::fs::write(path, &report.text)?,
            None => stdout.write_all(report.text.as_bytes())?,
        }
        match report.audit_failure {
            Some((xor, strict)) => Err(CliError::AuditFailed(xor, strict)),
            None => Ok(()),
        }
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(CliError::Usage(msg)) | Err(CliError::Core(poslab::Error::Domain(msg))) => {
            let _ = writeln!(stderr, "error: {msg}\n\n{}", usage());
            EXIT_USAGE
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_FAILURE
        }
    }
}

/// [`run_with`] bound to the process's standard streams.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    run_with(args, &mut io::stdout().lock(), &mut io::stderr().lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(std::iter::once("poslab").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn table_csv() {
        let (code, out, _) = run_capture(&["table", "--n-max", "5", "--format", "csv"]);
        assert_eq!(code, 0);
        let lines: Vec<_> = out.lines().collect();
        assert_eq!(lines[0], "n,k,p_num,p_den,p_decimal");
        assert_eq!(lines.len(), 16);
        assert!(lines.contains(&"3,2,3,4,0.750000"));
        assert!(!out.contains('\r'));
    }

    #[test]
    fn plot_rows() {
        let csv = emit_plot_data(2, Format::Csv);
        assert_eq!(csv.lines().count(), 4);
        let csv = emit_plot_data(5, Format::Csv);
        assert!(csv.lines().any(|l| l == "4,2,0.500000"));
        assert!(csv.lines().any(|l| l == "5,3,0.687500"));
        let json: serde_json::Value = serde_json::from_str(&emit_plot_data(5, Format::Json)).unwrap();
        let p = json["points"].as_array().unwrap().iter().find(|r| r["n"] == 5 && r["k"] == 3).unwrap();
        assert_eq!(p["p"].as_f64().unwrap(), 0.6875);
    }

    #[test]
    fn usage_errors_exit_2() {
        let (code, out, err) = run_capture(&["simulate", "--n", "3", "--k", "9"]);
        assert_eq!(code, 2);
        assert!(out.is_empty());
        assert!(err.contains("Usage"), "{err}");
        assert_eq!(run_capture(&["duality", "--n", "3", "--k", "3"]).0, 2);
        assert_eq!(run_capture(&["table", "--n-max", "0"]).0, 2);
        assert_eq!(run_capture(&["simulate", "--n", "3", "--k", "3", "--method", "hull"]).0, 2);
        assert_eq!(run_capture(&["simulate", "--n", "3", "--k", "1", "--seed", "x"]).0, 2);
        assert_eq!(run_capture(&["bogus"]).0, 2);
        assert_eq!(run_capture(&["--help"]).0, 0);
    }

    #[test]
    fn seed_and_thread_parsing() {
        assert_eq!("random".parse::<SeedArg>().unwrap(), SeedArg::Random);
        assert_eq!("17".parse::<SeedArg>().unwrap(), SeedArg::Fixed(17));
        assert_eq!("auto".parse::<ThreadsArg>().unwrap(), ThreadsArg(0));
        assert_eq!("3".parse::<ThreadsArg>().unwrap(), ThreadsArg(3));
        assert!("-1".parse::<ThreadsArg>().is_err());
    }

    #[test]
    fn random_seed_is_reported() {
        let (code, out, err) = run_capture(&[
            "simulate", "--n", "2", "--k", "1", "--trials", "10", "--seed", "random", "--format", "json",
        ]);
        assert_eq!(code, 0);
        let seed: u64 = err.trim().strip_prefix("seed: ").unwrap().parse().unwrap();
        let est: Estimate = serde_json::from_str(&out).unwrap();
        assert_eq!(est.seed, seed);
    }
}
