//! `adaptive-mls`: fit scattered 1D data and run the convergence and
//! discontinuity benchmarks.

mod commands;
mod input;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use settings::{Settings, UsageError};

#[derive(Parser)]
#[command(name = "adaptive-mls", version, about = "Linear and WENO-weighted MLS partition-of-unity approximation in 1D")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Approximate user data read from a CSV of `x,f` rows.
    Approx(ApproxArgs),
    /// Error and rate tables for sin(pi x) on successive grid levels.
    Convergence(ConvergenceArgs),
    /// Overshoot near the jump of a discontinuous test function.
    Discontinuity(DiscontinuityArgs),
    /// Run the built-in consistency suites.
    Selftest(SelftestArgs),
}

/// Options shared by every computing subcommand.
#[derive(Args)]
struct Common {
    /// `key=value` file; flags given on the command line take precedence.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Weight function: G, IMQ, M0, M2, M4, W0, W2, W4 or POLY(p,q).
    #[arg(long)]
    kernel: Option<String>,
    /// Local polynomial degree.
    #[arg(long)]
    degree: Option<String>,
    /// Shape parameter [default: 0.15 for compact kernels, 0.7 otherwise].
    #[arg(long)]
    gamma: Option<String>,
    /// Exponent applied to the smoothness indicators [default: 4].
    #[arg(long)]
    t: Option<String>,
    /// Regularization added to the powered indicators [default: 1e-14].
    #[arg(long)]
    eps: Option<String>,
    /// Truncation threshold for globally supported kernels [default: 1e-9].
    #[arg(long)]
    trunc: Option<String>,
    /// Output path: a `.csv` file or a directory.
    #[arg(long)]
    out: Option<String>,
    /// Worker threads, 0 for one per core (also ADAPTIVE_MLS_THREADS).
    #[arg(long)]
    threads: Option<String>,
}

impl Common {
    fn flags(&self) -> Vec<(&'static str, Option<&String>)> {
        vec![
            ("kernel", self.kernel.as_ref()),
            ("degree", self.degree.as_ref()),
            ("gamma", self.gamma.as_ref()),
            ("t", self.t.as_ref()),
            ("eps", self.eps.as_ref()),
            ("trunc", self.trunc.as_ref()),
            ("out", self.out.as_ref()),
            ("threads", self.threads.as_ref()),
        ]
    }
}

#[derive(Args)]
struct ApproxArgs {
    #[command(flatten)]
    common: Common,
    /// Input CSV of `x,f` rows, `-` for stdin.
    #[arg(long = "in", value_name = "FILE")]
    input: Option<String>,
    /// Evaluation points: `nodes`, `midpoints`, `N` or `a:b:N` [default: 1001 over the data range].
    #[arg(long)]
    eval: Option<String>,
}

#[derive(Args)]
struct ConvergenceArgs {
    #[command(flatten)]
    common: Common,
    /// Grid levels, `A-B` or a comma list [default: 7-10].
    #[arg(long)]
    levels: Option<String>,
    /// `uniform` or `random`.
    #[arg(long)]
    grid: Option<String>,
    /// Seed for random grids [default: 0].
    #[arg(long)]
    seed: Option<String>,
    /// `linear`, `nonlinear` or both as a comma list [default: both].
    #[arg(long)]
    method: Option<String>,
}

#[derive(Args)]
struct DiscontinuityArgs {
    #[command(flatten)]
    common: Common,
    /// Test function with a jump: `g` or `z` [default: g].
    #[arg(long)]
    func: Option<String>,
    /// Grid level [default: 9].
    #[arg(long)]
    level: Option<String>,
    /// `uniform` or `random`.
    #[arg(long)]
    grid: Option<String>,
    /// Seed for random grids [default: 0].
    #[arg(long)]
    seed: Option<String>,
    /// `linear`, `nonlinear` or both as a comma list [default: both].
    #[arg(long)]
    method: Option<String>,
    /// Samples per curve dump when --out is a directory [default: 2001].
    #[arg(long)]
    curve_points: Option<String>,
}

#[derive(Args)]
struct SelftestArgs {
    /// Zero every smoothness indicator before the WENO suite (negative control).
    #[arg(long, hide = true)]
    corrupt_indicators: bool,
}

fn settings(common: &Common, extra: &[(&'static str, Option<&String>)]) -> Result<Settings, UsageError> {
    let mut flags = common.flags();
    flags.extend_from_slice(extra);
    let s = Settings::merge(common.config.as_deref(), &flags)?;
    if let Some(n) = s.threads()? {
        // a second call would fail because the pool already exists; ignore that
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(s)
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Approx(a) => {
            let s = settings(&a.common, &[("in", a.input.as_ref()), ("eval", a.eval.as_ref())])?;
            commands::approx(&s)?;
        }
        Command::Convergence(a) => {
            let s = settings(
                &a.common,
                &[
                    ("levels", a.levels.as_ref()),
                    ("grid", a.grid.as_ref()),
                    ("seed", a.seed.as_ref()),
                    ("method", a.method.as_ref()),
                ],
            )?;
            commands::convergence(&s)?;
        }
        Command::Discontinuity(a) => {
            let s = settings(
                &a.common,
                &[
                    ("func", a.func.as_ref()),
                    ("level", a.level.as_ref()),
                    ("grid", a.grid.as_ref()),
                    ("seed", a.seed.as_ref()),
                    ("method", a.method.as_ref()),
                    ("curve-points", a.curve_points.as_ref()),
                ],
            )?;
            commands::discontinuity(&s)?;
        }
        Command::Selftest(a) => return commands::selftest(a.corrupt_indicators),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
