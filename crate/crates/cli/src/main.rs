use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hmcf_core::config::MIN_NODES;
use hmcf_core::parse_config;

#[derive(Parser)]
#[command(name = "hmcf", version, about = "Harmonic mean curvature flow of surfaces of revolution")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a configuration file.
    Run { config: PathBuf },
    /// Check a profile file against the hypotheses of the flow.
    Validate {
        profile: PathBuf,
        /// Interior node count used to build the charts.
        #[arg(long, default_value_t = 400)]
        n: usize,
    },
    /// Closed-form values for a shrinking sphere.
    Oracle {
        #[command(subcommand)]
        shape: OracleShape,
    },
}

#[derive(Subcommand)]
enum OracleShape {
    Sphere {
        #[arg(long, default_value_t = 1.0)]
        r0: f64,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
    },
}

fn run(config: &Path) -> Result<ExitCode, String> {
    let text = std::fs::read_to_string(config).map_err(|e| format!("{}: {e}", config.display()))?;
    let cfg = parse_config(&text).map_err(|e| format!("{}: {e}", config.display()))?;
    let base = config.parent().unwrap_or(Path::new("."));
    let outcome = hmcf_cli::run(&cfg, base).map_err(|e| e.to_string())?;
    print!("{}", outcome.summary.to_text());
    eprintln!("summary written to {}", outcome.summary_path.display());
    let failures = outcome.failures();
    if failures.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        for f in &failures {
            eprintln!("error: {f}");
        }
        Ok(ExitCode::from(2))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config } => run(&config),
        Command::Validate { profile, n } => {
            if n < MIN_NODES {
                Err(format!("--n must be at least {MIN_NODES}"))
            } else {
                hmcf_cli::validate_file(&profile, n).map_err(|e| format!("{}: {e}", profile.display())).map(|report| {
                    print!("{}", hmcf_cli::describe_validation(&report).to_text());
                    if report.passed() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(2)
                    }
                })
            }
        }
        Command::Oracle { shape: OracleShape::Sphere { r0, epsilon } } => hmcf_cli::describe_sphere_oracle(r0, epsilon)
            .map(|s| {
                print!("{}", s.to_text());
                ExitCode::SUCCESS
            })
            .map_err(|e| e.to_string()),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::FAILURE
    })
}
