use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use talbot_cli::commands::{oracle_check, quench, simulate, Invocation};
use talbot_cli::config::OutputFormat;
use talbot_cli::CliError;

/// Temporal Talbot interferometry toolkit.
#[derive(Debug, Parser)]
#[command(name = "talbot", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a Talbot trace for one disorder model and fit it.
    Simulate(Common),
    /// Run the coherence-extraction pipeline over a schedule of equilibration times.
    Quench(Common),
    /// Compare the closed forms against quadrature, Monte Carlo and dual series.
    OracleCheck(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory [default: $TALBOT_OUT_DIR, else ./talbot-out].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Random seed; generated and recorded when neither given nor configured.
    #[arg(long)]
    seed: Option<u64>,
    /// Output files: csv or csv+svg.
    #[arg(long)]
    format: Option<OutputFormat>,
}

impl From<Common> for Invocation {
    fn from(c: Common) -> Self {
        Invocation {
            config: c.config,
            out: c.out,
            seed: c.seed,
            format: c.format,
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Simulate(c) => {
            let r = simulate(&c.into()).context("simulate")?;
            println!(
                "Talbot time {:.2} µs, {} resolvable revivals ({} markers in sweep)",
                r.talbot_time * 1e6,
                r.revivals,
                r.revival_markers
            );
            match (&r.fit, &r.fit_error) {
                (Some(f), _) => println!(
                    "fit: T_T = {:.2} ± {:.2} µs, t_T = {:.1} ± {:.1} µs",
                    f.talbot_time_fit * 1e6,
                    f.stderr(1) * 1e6,
                    f.decay_time * 1e6,
                    f.stderr(2) * 1e6
                ),
                (None, Some(e)) => println!("fit failed: {e}"),
                _ => {}
            }
            println!("wrote {}", r.output.dir.display());
        }
        Command::Quench(c) => {
            let r = quench(&c.into()).context("quench")?;
            println!("{:>10} {:>10} {:>10} {:>10}  status", "t_Q (ms)", "ξ_true", "ξ₀", "ξ_coh");
            for p in &r.series.points {
                match &p.estimate {
                    Ok(e) => println!(
                        "{:>10.3} {:>10.3} {:>10.3} {:>10}  {}",
                        p.t_q * 1e3,
                        p.xi_coh_true.as_f64(),
                        e.xi0.as_f64(),
                        format!("{:.3}", e.xi_coh.as_f64()),
                        if e.long_range_order { "long-range order" } else { "ok" }
                    ),
                    Err(err) => println!("{:>10.3} {:>10.3} {:>10} {:>10}  failed: {err}", p.t_q * 1e3, p.xi_coh_true.as_f64(), "-", "-"),
                }
            }
            if let Some(a) = &r.alpha {
                println!("α = {:.4} ± {:.4} ({} points)", a.alpha, a.alpha_stderr, a.used.len());
            }
            println!("wrote {}", r.output.dir.display());
            if let Some(e) = r.failure() {
                return Err(e.into());
            }
        }
        Command::OracleCheck(c) => {
            let r = oracle_check(&c.into()).context("oracle-check")?;
            print!("{r}");
            println!("wrote {}", r.output.dir.display());
            if let Some(e) = r.failure() {
                return Err(e.into());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = err.downcast_ref::<CliError>().map_or(1, CliError::exit_code);
            ExitCode::from(code as u8)
        }
    }
}
