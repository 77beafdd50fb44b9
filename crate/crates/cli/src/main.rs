mod cli;
mod commands;
mod output;
mod settings;

use anyhow::{Context, Result};
use clap::Parser;
use std::process::ExitCode;

use cli::{Cli, Command};
use output::OutDir;
use settings::{Settings, SEED_ENV};

fn run(cli: Cli) -> Result<()> {
    let settings = Settings::resolve(cli.command, &cli.overrides, std::env::var(SEED_ENV).ok())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(settings.jobs)
        .build()
        .context("cannot start worker threads")?;
    let out = OutDir::create(&settings.out)?;
    let summary = pool.install(|| match settings.command {
        Command::RankFeatures => commands::rank_features(&settings, &out),
        Command::Crossval => commands::crossval(&settings, &out),
        Command::Compare => commands::compare(&settings, &out),
        Command::BenchOptimizer => commands::bench_optimizer(&settings, &out),
        Command::Train => commands::train_model(&settings, &out),
        Command::Predict => commands::predict_csv(&settings, &out),
    })?;
    out.write("run_manifest.txt", settings.manifest())?;
    print!("{summary}");
    println!("reports written to {}", settings.out.display());
    Ok(())
}

fn one_line(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or_default();
            eprintln!("wolfnet: {}", one_line(first.trim_start_matches("error: ")));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wolfnet: error: {}", one_line(&format!("{e:#}")));
            ExitCode::FAILURE
        }
    }
}
