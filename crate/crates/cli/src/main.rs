//! `dioph` — search and verification tool for the prime inequality
//! |λ₁p₁ + λ₂p₂² + λ₃p₃² + λ₄p₄^k − ω| ≤ η.
//!
//! Subcommands: `solve` (enumerate solutions at one scale), `scan` (follow
//! the convergent-driven scale sequence), `sums` (tabulate an exponential
//! sum on a frequency grid), `arcs` (integrate the product of the four sums
//! over the arc decomposition and check it against the exact prime-side
//! sum), `verify` (measure the stability of the constants in the analytic
//! bounds), and `report` (aggregate artifacts from earlier runs).
//!
//! Artifacts go to stdout (CSV or JSON) and, with `--output-dir`, to a file
//! with identical bytes. All diagnostics are structured JSON lines on
//! stderr. Exit codes: 0 success, 1 configuration error, 2 resource limit,
//! 3 result produced but a tolerance/stability target missed.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::arcs::{ArcChoice, PolicyArgs};
use commands::sums::SumKind;
use commands::{build_ctx, check_output_dir, exit_code_for, report_error, Global, ParamArgs};
use dioph::{Error, Result};

#[derive(Parser, Debug)]
#[command(
    name = "dioph",
    version,
    about = "Numerical laboratory for a quaternary prime inequality",
    propagate_version = true
)]
struct Cli {
    /// Flat `key = value` parameter file (CLI flags override it).
    #[arg(long, global = true, value_name = "FILE")]
    params: Option<PathBuf>,

    /// Override one config key, e.g. --set k=2.5 (repeatable, later wins).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Also write the artifact into this directory.
    #[arg(long, global = true, value_name = "DIR")]
    output_dir: Option<PathBuf>,

    /// Worker threads; 0 picks the machine default. Falls back to the
    /// DIOPH_THREADS environment variable. Outputs are byte-identical for
    /// every thread count.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    /// Seed for the Monte Carlo cross-check used by `arcs`.
    #[arg(long, global = true, default_value_t = 271_828)]
    seed: u64,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Enumerate every prime solution at scale X (CSV).
    Solve {
        #[command(flatten)]
        params: ParamArgs,
        /// Scale: slot values range over (delta·X, X].
        #[arg(long = "X", value_name = "X")]
        x: f64,
    },
    /// Search along the scale sequence X_n = q_n^(7/3) from the convergents
    /// of the coefficient ratio (CSV, one row per convergent).
    Scan {
        #[command(flatten)]
        params: ParamArgs,
        /// Number of convergents to follow.
        #[arg(long, default_value_t = 6)]
        n_convergents: usize,
        /// Stop once the derived scale exceeds this cap.
        #[arg(long, default_value_t = 1e7)]
        x_cap: f64,
    },
    /// Tabulate an exponential sum on a frequency grid (CSV).
    Sums {
        #[command(flatten)]
        params: ParamArgs,
        /// S = weighted prime sum, U = unweighted, T = smooth integral.
        #[arg(long, value_enum, ignore_case = true)]
        kind: SumKind,
        #[arg(long = "X", value_name = "X")]
        x: f64,
        /// Frequency grid: log:A:B:N, lin:A:B:N, or list:v1,v2,...
        #[arg(long, value_name = "SPEC")]
        alpha_grid: String,
    },
    /// Integrate the four-sum product over the arc decomposition and check
    /// the exact identity with the prime-side sum (JSON).
    Arcs {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long = "X", value_name = "X")]
        x: f64,
        /// Which arc family to integrate.
        #[arg(long, value_enum, default_value_t = ArcChoice::All)]
        arc: ArcChoice,
        /// Outer cutoff A; default max(R, 50/eta).
        #[arg(long)]
        truncation: Option<f64>,
        /// Simpson samples per oscillation cycle (central and middle arcs).
        #[arg(long)]
        samples_per_cycle: Option<f64>,
        /// Samples per cycle beyond the middle arc.
        #[arg(long)]
        trivial_samples_per_cycle: Option<f64>,
        /// Hard cap on quadrature points (the step coarsens, with the error
        /// reported honestly, rather than failing).
        #[arg(long)]
        max_points: Option<u64>,
        /// Monte Carlo samples for the measure-side main-term route.
        #[arg(long)]
        mc_samples: Option<u64>,
    },
    /// Measure the constants in the analytic bounds across scales and check
    /// they are stable (JSON; exit 3 when a constant drifts).
    Verify {
        #[command(flatten)]
        params: ParamArgs,
        /// Comma-separated scales to test.
        #[arg(long, default_value = "1000,10000")]
        scales: String,
        /// Allowed max/min factor for each fitted constant.
        #[arg(long, default_value_t = 2.0)]
        band: f64,
    },
    /// Aggregate earlier artifacts and check parameter-digest consistency
    /// (JSON).
    Report {
        /// Artifact files produced by other subcommands.
        #[arg(required = true, value_name = "FILE")]
        files: Vec<PathBuf>,
    },
}

fn resolve_threads(flag: Option<usize>) -> Result<usize> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var(commands::THREADS_ENV) {
        Ok(text) => text.trim().parse().map_err(|_| {
            Error::Config(format!(
                "{} must be a non-negative integer, got {text:?}",
                commands::THREADS_ENV
            ))
        }),
        Err(_) => Ok(0),
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    let threads = resolve_threads(cli.threads)?;
    if threads > 0 {
        // Ignore the error if a pool already exists (only possible in tests).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    check_output_dir(&cli.output_dir)?;

    let global = Global {
        params_file: cli.params.clone(),
        overrides: cli.set.clone(),
        output_dir: cli.output_dir.clone(),
        seed: cli.seed,
    };

    match &cli.command {
        Cmd::Solve { params, x } => {
            let ctx = build_ctx(&global, params)?;
            commands::solve::run(&ctx, *x)
        }
        Cmd::Scan {
            params,
            n_convergents,
            x_cap,
        } => {
            let ctx = build_ctx(&global, params)?;
            commands::scan::run(&ctx, *n_convergents, *x_cap)
        }
        Cmd::Sums {
            params,
            kind,
            x,
            alpha_grid,
        } => {
            let ctx = build_ctx(&global, params)?;
            commands::sums::run(&ctx, *kind, *x, alpha_grid)
        }
        Cmd::Arcs {
            params,
            x,
            arc,
            truncation,
            samples_per_cycle,
            trivial_samples_per_cycle,
            max_points,
            mc_samples,
        } => {
            let ctx = build_ctx(&global, params)?;
            let pol = PolicyArgs {
                truncation: *truncation,
                samples_per_cycle: *samples_per_cycle,
                trivial_samples_per_cycle: *trivial_samples_per_cycle,
                max_points: *max_points,
                mc_samples: *mc_samples,
            };
            commands::arcs::run(&ctx, *x, *arc, &pol)
        }
        Cmd::Verify {
            params,
            scales,
            band,
        } => {
            let ctx = build_ctx(&global, params)?;
            commands::verify::run(&ctx, scales, *band)
        }
        Cmd::Report { files } => {
            let ctx = build_ctx(&global, &ParamArgs::default())?;
            commands::report::run(&ctx, files)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                // clap renders help/version itself; not an error.
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            let line = serde_json::json!({
                "error": { "kind": "config", "message": e.to_string(), "exit_code": 1 }
            });
            eprintln!("{line}");
            return ExitCode::from(1);
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            report_error(&err);
            ExitCode::from(exit_code_for(&err))
        }
    }
}
