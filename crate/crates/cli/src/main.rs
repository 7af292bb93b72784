//! `emforms`: run the canonical induction scenarios, verify custom field
//! specifications, or execute the built-in invariant suite.
//!
//! Exit code is 0 exactly when every pass flag in the emitted report is true.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use emforms_core::scenarios::{
    run_custom, run_faraday_disc, run_sliding_bar, run_translating_body, selftest,
    ScenarioConfig, ScenarioReport,
};
use emforms_core::specfile::parse_spec;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "emforms", version, about = "Galilei-invariant electromagnetic induction for moving bodies, computed with even/odd exterior forms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a canonical scenario and emit its report.
    Run {
        /// One of: translating_body, sliding_bar, faraday_disc.
        scenario: Scenario,
        #[command(flatten)]
        params: ScenarioArgs,
        /// Report format.
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate every applicable law residual on a custom spec file.
    Verify {
        /// UTF-8 spec file with [fields], [motion], [chain], [controls].
        spec_file: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full deterministic invariant suite.
    Selftest {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Scenario {
    TranslatingBody,
    SlidingBar,
    FaradayDisc,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Magnetic vortex magnitude B0 (along +z).
    #[arg(long, default_value_t = 1.0)]
    b0: f64,
    /// Body / bar speed (along +x).
    #[arg(long, default_value_t = 1.0)]
    v0: f64,
    /// Disc spin rate, rad per unit time.
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    /// Bar length (along +y).
    #[arg(long, default_value_t = 1.0)]
    length: f64,
    /// Disc radius.
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Chain-integral refinement depth.
    #[arg(long, default_value_t = 3)]
    depth: usize,
    /// Galilei boost for the invariance check, as "vx,vy,vz".
    #[arg(long, value_parser = parse_boost)]
    boost: Option<Boost>,
    /// Pass/fail tolerance.
    #[arg(long, default_value_t = 1e-4)]
    tolerance: f64,
}

#[derive(Clone)]
struct Boost(Vec<f64>);

fn parse_boost(text: &str) -> Result<Boost, String> {
    let parts: Result<Vec<f64>, _> = text.split(',').map(|p| p.trim().parse::<f64>()).collect();
    match parts {
        Ok(v) if v.len() == 3 => Ok(Boost(v)),
        _ => Err(format!("expected three comma-separated numbers, got '{text}'")),
    }
}

fn emit(text: String, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("writing report to {}", path.display()))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn render(report: &ScenarioReport, format: Format) -> String {
    match format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let pass = match cli.command {
        Command::Run { scenario, params, format, out } => {
            let cfg = ScenarioConfig {
                b0: params.b0,
                v0: params.v0,
                omega_spin: params.omega,
                length: params.length,
                radius: params.radius,
                depth: params.depth,
                tolerance: params.tolerance,
                boost: params.boost.map(|b| b.0),
                ..Default::default()
            };
            let report = match scenario {
                Scenario::TranslatingBody => run_translating_body(&cfg)?,
                Scenario::SlidingBar => run_sliding_bar(&cfg)?,
                Scenario::FaradayDisc => run_faraday_disc(&cfg)?,
            };
            emit(render(&report, format), out.as_ref())?;
            report.pass
        }
        Command::Verify { spec_file, format, out } => {
            let text = std::fs::read_to_string(&spec_file)
                .with_context(|| format!("reading {}", spec_file.display()))?;
            let spec = parse_spec(&text)?;
            let report = run_custom(&spec)?;
            emit(render(&report, format), out.as_ref())?;
            report.pass
        }
        Command::Selftest { out } => {
            let report = selftest();
            emit(report.to_json(), out.as_ref())?;
            report.pass
        }
    };
    if !pass {
        bail!("one or more checks failed");
    }
    Ok(())
}
