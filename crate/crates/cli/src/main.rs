mod cli;
mod commands;
mod config;
mod io;
mod report;
mod svg;

use anyhow::{Context, Result};
use clap::Parser;

use cli::{Cli, Command, Common};
use config::{OutputFormat, RunConfig};
use report::Report;

fn resolve_config(common: &Common) -> Result<RunConfig> {
    let format = match &common.format {
        Some(f) => Some(f.parse::<OutputFormat>()?),
        None => None,
    };
    RunConfig::resolve(common.config.as_deref(), common.seed, format)
}

fn write_report(report: &Report, cfg: &RunConfig, common: &Common) -> Result<()> {
    let rendered = match cfg.output_format {
        OutputFormat::Json => report.to_json_string(),
        OutputFormat::Csv => report.to_csv_string(),
    };
    match &common.out {
        Some(path) => std::fs::write(path, rendered)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{rendered}"),
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Fit(args) => {
            let mut cfg = resolve_config(&args.common)?;
            let report = commands::fit(&mut cfg, args)?;
            write_report(&report, &cfg, &args.common)
        }
        Command::Score(args) => {
            let mut cfg = resolve_config(&args.common)?;
            let report = commands::score(&mut cfg, args)?;
            write_report(&report, &cfg, &args.common)
        }
        Command::Rank(args) => {
            let mut cfg = resolve_config(&args.common)?;
            let report = commands::rank_cmd(&mut cfg, args)?;
            write_report(&report, &cfg, &args.common)
        }
        Command::Bias(args) => {
            let mut cfg = resolve_config(&args.common)?;
            let report = commands::bias(&mut cfg, args)?;
            write_report(&report, &cfg, &args.common)
        }
        Command::Sweep(args) => {
            let mut cfg = resolve_config(&args.common)?;
            let report = commands::sweep(&mut cfg, args)?;
            write_report(&report, &cfg, &args.common)
        }
        Command::Iqr(args) => {
            let mut cfg = resolve_config(&args.common)?;
            let report = commands::iqr(&mut cfg, args)?;
            write_report(&report, &cfg, &args.common)
        }
        Command::Chisq(args) => {
            let mut cfg = resolve_config(&args.common)?;
            let report = commands::chisq(&mut cfg, args)?;
            write_report(&report, &cfg, &args.common)
        }
        Command::Whipple(args) => {
            let mut cfg = resolve_config(&args.common)?;
            let report = commands::whipple(&mut cfg, args)?;
            write_report(&report, &cfg, &args.common)
        }
        Command::Digits(args) => {
            let mut cfg = resolve_config(&args.common)?;
            let report = commands::digits(&mut cfg, args)?;
            write_report(&report, &cfg, &args.common)
        }
        Command::Substitute(args) => {
            let mut cfg = resolve_config(&args.common)?;
            let report = commands::substitute(&mut cfg, args)?;
            write_report(&report, &cfg, &args.common)
        }
        Command::Split(args) => {
            let mut cfg = resolve_config(&args.common)?;
            let report = commands::split(&mut cfg, args)?;
            write_report(&report, &cfg, &args.common)
        }
        Command::Simulate(args) => {
            let common = args.what.common().clone();
            let mut cfg = resolve_config(&common)?;
            let report = commands::simulate(&mut cfg, &args.what)?;
            write_report(&report, &cfg, &common)
        }
        Command::Exclude(args) => {
            let mut cfg = resolve_config(&args.common)?;
            let report = commands::exclude(&mut cfg, args)?;
            write_report(&report, &cfg, &args.common)
        }
        Command::Plot(args) => commands::plot(args),
    }
}
