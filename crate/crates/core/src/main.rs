//! Command-line surface: formula generation, evaluation, Monte Carlo
//! verification, and cache management.
//!
//! Exit codes: 0 success, 1 usage error, 2 verification failure,
//! 3 internal invariant violation. Results go to stdout, diagnostics to
//! stderr.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};

use entropy_cumulants::convert;
use entropy_cumulants::engine::{self, CumulantKey, Engine, StatKind};
use entropy_cumulants::numverify::{self, VerifyOptions};
use entropy_cumulants::symexpr::{EmitFormat, SymExpr};

const EXIT_OK: i32 = 0;
const EXIT_USAGE: i32 = 1;
const EXIT_VERIFY_FAILED: i32 = 2;
const EXIT_INTERNAL: i32 = 3;

#[derive(Parser)]
#[command(
    name = "entropy-cumulants",
    version,
    about = "Exact cumulants of von Neumann entanglement entropy over the Hilbert-Schmidt ensemble",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    /// Entanglement entropy of the normalized spectrum.
    S,
    /// Induced entropy over the unnormalized ensemble.
    T,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MeanTarget {
    /// Power-weighted log statistic `T_k`.
    T,
    /// Pure power statistic `R_k`.
    R,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Latex,
    Json,
    Text,
}

impl From<Format> for EmitFormat {
    fn from(f: Format) -> EmitFormat {
        match f {
            Format::Latex => EmitFormat::Latex,
            Format::Json => EmitFormat::Json,
            Format::Text => EmitFormat::Text,
        }
    }
}

/// `KIND:K` selector for joint cumulants, e.g. `T:2` or `R:3`.
#[derive(Clone, Copy)]
struct JointSpec {
    kind: StatKind,
    k: u32,
}

impl FromStr for JointSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, k) = s
            .split_once(':')
            .ok_or_else(|| format!("expected KIND:K (e.g. T:2), got {s:?}"))?;
        Ok(JointSpec {
            kind: kind.parse()?,
            k: k.parse().map_err(|e| format!("bad index {k:?}: {e}"))?,
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CacheAction {
    /// List cache entries.
    List,
    /// Remove all cache entries.
    Clear,
    /// Hash-verify every cache entry.
    Check,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form cumulant formulas (the recursion's user-facing wrapper).
    Cumulant {
        /// Which entropy the cumulant refers to.
        #[arg(long, value_enum)]
        of: Target,
        /// Cumulant order `l >= 1`.
        #[arg(long)]
        order: u32,
        /// Joint cumulant `kappa_l(X_k, T, ..., T)` instead of `kappa_l(T)`;
        /// only meaningful with `--of t`.
        #[arg(long)]
        joint: Option<JointSpec>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Joint-cumulant cache directory.
        #[arg(long, default_value = ".cumcache")]
        cache: PathBuf,
    },
    /// Mean formulas of the ancillary statistics `T_k` and `R_k`.
    Mean {
        #[arg(long, value_enum)]
        of: MeanTarget,
        /// Statistic index `k >= 0`.
        #[arg(long)]
        k: u32,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long, default_value = ".cumcache")]
        cache: PathBuf,
    },
    /// Numerically evaluate a cumulant at integer dimensions.
    Eval {
        #[arg(long, value_enum)]
        of: Target,
        #[arg(long)]
        order: u32,
        #[arg(long)]
        joint: Option<JointSpec>,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
        /// Significant decimal digits of the output.
        #[arg(long, default_value_t = numverify::DEFAULT_PRECISION)]
        digits: usize,
        #[arg(long, default_value = ".cumcache")]
        cache: PathBuf,
    },
    /// Monte Carlo check of exact cumulants against sampled spectra.
    Verify {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
        /// Comma-separated cumulant orders, each in 1..=6.
        #[arg(long, value_delimiter = ',', required = true)]
        orders: Vec<u32>,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Pass threshold in jackknife standard errors.
        #[arg(long, default_value_t = numverify::DEFAULT_THRESHOLD)]
        threshold: f64,
        /// Sampling worker threads (results are worker-count independent).
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Precision for the exact side of the comparison.
        #[arg(long, default_value_t = numverify::DEFAULT_PRECISION)]
        digits: usize,
        #[arg(long, default_value = ".cumcache")]
        cache: PathBuf,
    },
    /// Inspect or reset the joint-cumulant cache directory.
    Cache {
        #[arg(value_enum)]
        action: CacheAction,
        #[arg(long, default_value = ".cumcache")]
        cache: PathBuf,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let outcome = std::panic::catch_unwind(|| dispatch(cli.cmd));
    let code = match outcome {
        Ok(code) => code,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            eprintln!("internal invariant violation: {msg}");
            EXIT_INTERNAL
        }
    };
    std::process::exit(code);
}

fn usage_error(msg: &str) -> i32 {
    eprintln!("error: {msg}");
    EXIT_USAGE
}

fn internal_error(e: impl std::fmt::Display) -> i32 {
    eprintln!("internal error: {e}");
    EXIT_INTERNAL
}

fn open_engine(cache: &PathBuf) -> Result<Engine, i32> {
    Engine::with_cache_dir(cache).map_err(|e| internal_error(e))
}

fn dispatch(cmd: Command) -> i32 {
    match cmd {
        Command::Cumulant { of, order, joint, format, cache } => {
            cmd_cumulant(of, order, joint, format, &cache)
        }
        Command::Mean { of, k, format, cache } => cmd_mean(of, k, format, &cache),
        Command::Eval { of, order, joint, m, n, digits, cache } => {
            cmd_eval(of, order, joint, m, n, digits, &cache)
        }
        Command::Verify { m, n, orders, samples, seed, threshold, workers, digits, cache } => {
            cmd_verify(m, n, orders, samples, seed, threshold, workers, digits, &cache)
        }
        Command::Cache { action, cache } => cmd_cache(action, &cache),
    }
}

/// Resolve the requested expression: `kappa_l(S)`, `kappa_l(T)`, or a joint
/// cumulant of the ancillary statistics.
fn resolve_expression(
    engine: &mut Engine,
    of: Target,
    order: u32,
    joint: Option<JointSpec>,
) -> Result<SymExpr, i32> {
    if order < 1 {
        return Err(usage_error("--order must be at least 1"));
    }
    match (of, joint) {
        (Target::S, Some(_)) => Err(usage_error(
            "--joint applies to the induced-entropy side only (use --of t)",
        )),
        (Target::S, None) => convert::cumulant_s(engine, order).map_err(|e| internal_error(e)),
        (Target::T, None) => engine.cumulant_t(order).map_err(|e| internal_error(e)),
        (Target::T, Some(spec)) => engine
            .joint_cumulant(&CumulantKey::new(spec.kind, spec.k, order))
            .map_err(|e| internal_error(e)),
    }
}

fn expression_label(of: Target, order: u32, joint: Option<JointSpec>) -> String {
    match (of, joint) {
        (Target::S, _) => format!("cumulant_s_{order}"),
        (Target::T, None) => format!("cumulant_t_{order}"),
        (Target::T, Some(spec)) => {
            format!("joint_{}_{}_order_{order}", spec.kind, spec.k)
        }
    }
}

fn emit(expr: &SymExpr, format: Format, label: &str) -> String {
    match format {
        Format::Json => expr.to_json_string(Some(label)),
        other => expr.emit(EmitFormat::from(other)),
    }
}

fn cmd_cumulant(
    of: Target,
    order: u32,
    joint: Option<JointSpec>,
    format: Format,
    cache: &PathBuf,
) -> i32 {
    let mut engine = match open_engine(cache) {
        Ok(e) => e,
        Err(code) => return code,
    };
    match resolve_expression(&mut engine, of, order, joint) {
        Ok(expr) => {
            println!("{}", emit(&expr, format, &expression_label(of, order, joint)));
            EXIT_OK
        }
        Err(code) => code,
    }
}

fn cmd_mean(of: MeanTarget, k: u32, format: Format, cache: &PathBuf) -> i32 {
    let mut engine = match open_engine(cache) {
        Ok(e) => e,
        Err(code) => return code,
    };
    let result = match of {
        MeanTarget::T => engine.mean_t(k),
        MeanTarget::R => engine.mean_r(k),
    };
    match result {
        Ok(expr) => {
            let kind = match of {
                MeanTarget::T => "t",
                MeanTarget::R => "r",
            };
            println!("{}", emit(&expr, format, &format!("mean_{kind}_{k}")));
            EXIT_OK
        }
        Err(e) => internal_error(e),
    }
}

fn cmd_eval(
    of: Target,
    order: u32,
    joint: Option<JointSpec>,
    m: u32,
    n: u32,
    digits: usize,
    cache: &PathBuf,
) -> i32 {
    if m < 1 || m > n {
        return usage_error("dimensions must satisfy 1 <= m <= n");
    }
    if digits < 1 || digits > 1_000 {
        return usage_error("--digits must be in 1..=1000");
    }
    let mut engine = match open_engine(cache) {
        Ok(e) => e,
        Err(code) => return code,
    };
    let expr = match resolve_expression(&mut engine, of, order, joint) {
        Ok(expr) => expr,
        Err(code) => return code,
    };
    match numverify::eval_expr(&expr, m, n, digits + 5) {
        Ok(v) => {
            println!("{}", v.to_decimal(digits));
            EXIT_OK
        }
        Err(e) => internal_error(e),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    m: u32,
    n: u32,
    orders: Vec<u32>,
    samples: u64,
    seed: u64,
    threshold: f64,
    workers: usize,
    digits: usize,
    cache: &PathBuf,
) -> i32 {
    if m < 1 || m > n || n > 64 {
        return usage_error("verification requires 1 <= m <= n <= 64");
    }
    if orders.is_empty() || orders.iter().any(|&o| !(1..=numverify::MAX_ORDER).contains(&o)) {
        return usage_error("--orders must be a non-empty subset of 1..=6");
    }
    if !(threshold.is_finite() && threshold > 0.0) {
        return usage_error("--threshold must be positive");
    }
    if workers < 1 || workers > 256 {
        return usage_error("--workers must be in 1..=256");
    }
    let mut engine = match open_engine(cache) {
        Ok(e) => e,
        Err(code) => return code,
    };
    let mut exact = Vec::new();
    for &order in &orders {
        match convert::cumulant_s(&mut engine, order) {
            Ok(expr) => exact.push((order, expr)),
            Err(e) => return internal_error(e),
        }
    }
    let opts = VerifyOptions {
        m,
        n,
        orders,
        samples,
        seed,
        threshold,
        workers,
        precision: digits,
    };
    match numverify::verify(&opts, &exact) {
        Ok(report) => {
            println!("{}", report.to_json_string());
            if report.all_pass() {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            }
        }
        Err(e) => internal_error(e),
    }
}

fn cmd_cache(action: CacheAction, cache: &PathBuf) -> i32 {
    match action {
        CacheAction::List => match engine::list_dir(cache) {
            Ok(files) => {
                for f in files {
                    if let Some(name) = f.file_name().and_then(|s| s.to_str()) {
                        println!("{name}");
                    }
                }
                EXIT_OK
            }
            Err(e) => internal_error(e),
        },
        CacheAction::Clear => match engine::list_dir(cache) {
            Ok(files) => {
                let mut removed = 0usize;
                for f in &files {
                    match std::fs::remove_file(f) {
                        Ok(()) => removed += 1,
                        Err(e) => return internal_error(e),
                    }
                }
                println!("removed {removed} entries");
                EXIT_OK
            }
            Err(e) => internal_error(e),
        },
        CacheAction::Check => match engine::list_dir(cache) {
            Ok(files) => {
                let mut bad = 0usize;
                for f in &files {
                    let name = f
                        .file_name()
                        .and_then(|s| s.to_str())
                        .unwrap_or("<non-utf8>")
                        .to_string();
                    match engine::read_entry(f, None) {
                        Ok(_) => println!("ok {name}"),
                        Err(e) => {
                            bad += 1;
                            println!("corrupt {name}: {e}");
                        }
                    }
                }
                if bad == 0 {
                    EXIT_OK
                } else {
                    EXIT_INTERNAL
                }
            }
            Err(e) => internal_error(e),
        },
    }
}
