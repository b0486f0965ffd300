use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use opkernel::config::load_config;
use opkernel::run::{self, fmt_f64, RunError};

#[derive(Parser)]
#[command(
    name = "opkernel",
    version,
    about = "Operator-valued kernel learning on per-point label spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the configured problem and write the report, trace and meshes.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Override the sampling seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the number of multistart points.
        #[arg(long = "lhs-n")]
        lhs_n: Option<usize>,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Print PSD, Laplacian and search-cube diagnostics.
    Check {
        #[arg(long)]
        config: PathBuf,
    },
    /// Re-emit meshes from the coefficients of a saved report.
    Mesh {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        coeffs: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn execute(cli: Cli) -> Result<(), RunError> {
    match cli.command {
        Command::Solve {
            config,
            seed,
            lhs_n,
            out,
        } => {
            let mut cfg = load_config(&config)?;
            if let Some(seed) = seed {
                cfg.solve.seed = seed;
            }
            if let Some(n) = lhs_n {
                cfg.solve.lhs_count = n;
                cfg.solve
                    .validate()
                    .map_err(|e| RunError::Config(e.into()))?;
            }
            let (report, artifacts) = run::run(&cfg, &out)?;
            println!("objective = {}", fmt_f64(report.objective));
            println!("resid_paper_inf = {}", fmt_f64(report.resid_paper_inf));
            println!("grad_inf = {}", fmt_f64(report.grad_inf));
            println!("delta = {}", fmt_f64(report.delta));
            println!("seed = {}", report.seed);
            println!(
                "admissible = {}/{}",
                report.admissible_count, report.starts_run
            );
            if report.no_admissible {
                log::warn!("no start passed the admissibility test; reporting the lowest finish");
            }
            println!("report = {}", artifacts.report.display());
            println!("trace = {}", artifacts.trace.display());
            for m in &artifacts.meshes {
                println!("mesh = {}", m.display());
            }
        }
        Command::Check { config } => {
            let cfg = load_config(&config)?;
            let diag = run::check(&cfg)?;
            print!("{}", run::format_check(&diag));
            if !diag.passed() {
                return Err(RunError::Config(
                    opkernel::Error::NotPsd {
                        min_eig: diag.gram.min_eig.min(diag.regularizer.min_eig),
                        max_eig: diag.gram.max_eig.max(diag.regularizer.max_eig),
                    }
                    .into(),
                ));
            }
        }
        Command::Mesh {
            config,
            coeffs,
            out,
        } => {
            let cfg = load_config(&config)?;
            let a = run::read_report_coefficients(&coeffs)?;
            for m in run::write_meshes(&cfg, &a, &out)? {
                println!("mesh = {}", m.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
