use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use weinstein_cli::checks::{run_verify, Check};
use weinstein_cli::commands::{run_cwt, run_localize, run_transform};
use weinstein_cli::config::{parse_with_overrides, RunConfig};
use weinstein_cli::convergence::run_convergence;

/// Numerical experiments for the Weinstein transform, its wavelets and localization operators.
#[derive(Parser)]
#[command(name = "weinstein", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Configuration file of `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one configuration key; repeatable, applied after the file.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Forward and inverse transform of the input.
    Transform,
    /// Continuous wavelet transform and reconstruction.
    Cwt,
    /// Assemble a localization operator and measure its norms.
    Localize,
    /// Run the full verification suite.
    Verify,
    /// Refinement study on doubled grids.
    Convergence,
}

fn load(cli: &Cli) -> Result<RunConfig, String> {
    let text = match &cli.config {
        Some(p) => std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?,
        None => String::new(),
    };
    parse_with_overrides(&text, &cli.set).map_err(|e| match &cli.config {
        Some(p) if e.location.starts_with("line") => format!("{}: {e}", p.display()),
        _ => e.to_string(),
    })
}

fn summarize(checks: &[Check]) -> bool {
    let mut groups: Vec<_> = checks.iter().map(|c| c.group).collect();
    groups.dedup();
    for g in groups {
        let rows: Vec<&Check> = checks.iter().filter(|c| c.group == g).collect();
        let failed = rows.iter().filter(|c| !c.pass).count();
        println!("{:<8} {:<45} {}/{} rows", if failed == 0 { "PASS" } else { "FAIL" }, g.title(), rows.len() - failed, rows.len());
        for c in rows.iter().filter(|c| !c.pass) {
            println!("         failed {}: lhs={:e} rhs={:e} tol={:e}", c.id, c.lhs, c.rhs, c.tolerance);
        }
    }
    checks.iter().all(|c| c.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Transform => run_transform(&cfg),
        Command::Cwt => run_cwt(&cfg),
        Command::Localize => run_localize(&cfg),
        Command::Verify => run_verify(&cfg).and_then(|checks| {
            weinstein_cli::checks::write_report(&cfg.out.join("report.csv"), &checks)?;
            std::fs::write(cfg.out.join("config.txt"), cfg.serialize())?;
            Ok(checks)
        }),
        Command::Convergence => run_convergence(&cfg),
    };
    match result {
        Ok(checks) => {
            let ok = summarize(&checks);
            println!("report written to {}", cfg.out.join("report.csv").display());
            ExitCode::from(if ok { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
