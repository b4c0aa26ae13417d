use std::process::ExitCode;

use clap::Parser;
use photon_gauge_kit::{init_threads, run, Cli, RunConfig, Sink};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match try_main(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn try_main(cli: &Cli) -> anyhow::Result<bool> {
    init_threads()?;
    let config = RunConfig::load(cli.config.as_deref(), &cli.sets)?;
    let sink = Sink::dir(&cli.out)?;
    let report = run(cli.command, &config, &sink)?;
    for a in report.assertions.iter().filter(|a| !a.passed) {
        eprintln!("FAILED {a}");
    }
    let status = if report.passed() { "passed" } else { "FAILED" };
    eprintln!(
        "{}: {} of {} assertions passed, {} files in {}",
        cli.command.name(),
        report.assertions.iter().filter(|a| a.passed).count(),
        report.assertions.len(),
        report.files.len(),
        cli.out.display()
    );
    log::info!("{status}");
    Ok(report.passed())
}
