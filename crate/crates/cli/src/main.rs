//! `dcx`: declarative runner for degree-of-commutativity experiments.

mod config;
mod models;
mod run;
mod validate;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use crate::config::ExperimentConfig;
use crate::validate::{Diagnostic, Level};

/// Exit status when a run completes but some check fails.
const EXIT_CHECK_FAILED: u8 = 3;

#[derive(Parser)]
#[command(name = "dcx", version, about = "Degree of commutativity and satisfiability experiments")]
struct Cli {
    /// Worker threads for ball construction and pair counting (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Neither read nor write cached balls.
    #[arg(long, global = true)]
    no_cache: bool,
    /// Overrides `output.dir` from the config.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a config, then compute series and checks and write artifacts.
    Run { config: PathBuf },
    /// Print diagnostics for a config without running it.
    Validate { config: PathBuf },
}

fn load(path: &Path) -> Result<(ExperimentConfig, PathBuf)> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let config = config::parse(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((config, base))
}

fn print_diagnostics(diags: &[Diagnostic]) {
    for d in diags {
        eprintln!("{d}");
    }
}

fn resolve(base: &Path, p: &str) -> PathBuf {
    let p = Path::new(p);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn execute(cli: &Cli) -> Result<ExitCode> {
    let threads = match cli.threads {
        Some(0) => anyhow::bail!("--threads must be positive"),
        Some(n) => {
            rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
            n
        }
        None => rayon::current_num_threads(),
    };
    match &cli.command {
        Command::Validate { config } => {
            let (cfg, base) = load(config)?;
            let (diags, _) = validate::validate(&cfg, &base);
            print_diagnostics(&diags);
            let errors = diags.iter().filter(|d| d.level == Level::Error).count();
            if errors > 0 {
                eprintln!("{}: {errors} error(s)", config.display());
                return Ok(ExitCode::FAILURE);
            }
            println!("{}: ok", config.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Run { config } => {
            let (cfg, base) = load(config)?;
            let (diags, exp) = validate::validate(&cfg, &base);
            print_diagnostics(&diags);
            let Some(exp) = exp else {
                anyhow::bail!("{} does not validate", config.display());
            };
            let output_dir = match (&cli.output_dir, &cfg.output.dir) {
                (Some(p), _) => p.clone(),
                (None, Some(d)) => resolve(&base, d),
                (None, None) => {
                    let stem = config.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "run".into());
                    base.join("dcx-out").join(stem)
                }
            };
            let cache_dir = match (cli.no_cache, &cfg.output.cache_dir) {
                (true, _) => None,
                (false, Some(d)) => Some(resolve(&base, d)),
                (false, None) => Some(output_dir.join("cache")),
            };
            let opts = run::RunOptions { output_dir, cache_dir, threads };
            let summary = run::run(&exp, &opts)?;
            println!(
                "wrote {} ({} check(s), {} failed)",
                opts.output_dir.display(),
                summary.checks,
                summary.failed
            );
            Ok(if summary.failed > 0 { ExitCode::from(EXIT_CHECK_FAILED) } else { ExitCode::SUCCESS })
        }
    }
}
