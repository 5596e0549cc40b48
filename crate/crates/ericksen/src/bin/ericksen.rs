use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ericksen::config::{parse_config, Scenario};
use ericksen::scenario::{
    builtin, builtin_names, convergence_suite, inequalities, output_root, run_scenario, suite, validate,
    ExitStatus, ScenarioError,
};

/// Spectral Galerkin runner for the Ericksen–Leslie system.
///
/// Outputs go to `$ERICKSEN_OUT_DIR/<scenario>/` (default `ericksen-out`).
/// Exit codes: 0 pass, 1 assertion failure, 2 configuration error, 3 blow-up.
#[derive(Parser)]
#[command(name = "ericksen", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario and write its ledger, report, basis manifest and checkpoint.
    Run {
        /// TOML config, or `builtin:<name>`.
        config: String,
    },
    /// Check dissipativity, ellipticity, coercivity, growth and the Θ bound.
    Validate { config: String },
    /// Self-convergence study at Δt, Δt/2, Δt/4 against Δt/64.
    Convergence { config: String },
    /// Empirical interpolation constants over synthetic trajectories.
    Inequalities {
        config: String,
        #[arg(long, default_value_t = 1000)]
        count: usize,
    },
    /// Run every built-in scenario.
    Suite,
    /// List the built-in scenarios.
    List,
}

fn load(spec: &str) -> Result<Scenario, ScenarioError> {
    match spec.strip_prefix("builtin:") {
        Some(name) => builtin(name),
        None => Ok(parse_config(&PathBuf::from(spec))?),
    }
}

fn fail(e: ScenarioError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.status().code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config } => {
            let sc = match load(&config) {
                Ok(s) => s,
                Err(e) => return fail(e),
            };
            let root = output_root();
            match run_scenario(&sc, Some(&root)) {
                Ok(out) => {
                    print!("{}", out.report);
                    if let Some(d) = out.out_dir {
                        println!("output {}", d.display());
                    }
                    ExitCode::from(out.status.code() as u8)
                }
                Err(e) => fail(e),
            }
        }
        Command::Validate { config } => {
            let sc = match load(&config) {
                Ok(s) => s,
                Err(e) => return fail(e),
            };
            match validate(&sc.config) {
                Ok(v) => {
                    for l in &v.lines {
                        println!("{l}");
                    }
                    let status = if v.passed { ExitStatus::Pass } else { ExitStatus::AssertionFailed };
                    ExitCode::from(status.code() as u8)
                }
                Err(e) => fail(e),
            }
        }
        Command::Convergence { config } => {
            let sc = match load(&config) {
                Ok(s) => s,
                Err(e) => return fail(e),
            };
            match convergence_suite(&sc.config) {
                Ok(r) => {
                    print!("{}", r.table());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
        Command::Inequalities { config, count } => {
            let sc = match load(&config) {
                Ok(s) => s,
                Err(e) => return fail(e),
            };
            match inequalities(&sc.config, count) {
                Ok(pairs) => {
                    let mut ok = true;
                    for p in &pairs {
                        ok &= p.stable();
                        println!("{:<9} {}  spread {:.3}", p.kind, p.first, p.spread());
                    }
                    ExitCode::from(if ok { 0 } else { 1 })
                }
                Err(e) => fail(e),
            }
        }
        Command::Suite => {
            let root = output_root();
            let mut worst = ExitStatus::Pass;
            for (name, r) in suite(Some(&root)) {
                let status = match r {
                    Ok(out) => out.status,
                    Err(e) => {
                        eprintln!("{name}: {e}");
                        e.status()
                    }
                };
                println!("{name:<22} {}", status.code());
                worst = worst.max(status);
            }
            ExitCode::from(worst.code() as u8)
        }
        Command::List => {
            for n in builtin_names() {
                println!("{n}");
            }
            ExitCode::SUCCESS
        }
    }
}
