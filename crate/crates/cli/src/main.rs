mod args;
mod commands;
mod report;
mod tables;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use args::{Cli, Command};
use commands::CliError;

fn name(c: &Command) -> &'static str {
    match c {
        Command::Sieve { .. } => "sieve",
        Command::Voronoi(_) => "voronoi",
        Command::MellinCheck { .. } => "mellin-check",
        Command::Variance(_) => "variance",
        Command::ShiftedCheck(_) => "shifted-check",
        Command::Sweep(_) => "sweep",
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let cache_dir = tables::resolve_cache_dir(cli.cache_dir.as_deref());
    let cache = cache_dir.as_deref();
    let started = Instant::now();
    let outcome = match &cli.command {
        Command::Sieve { n_max } => commands::sieve(*n_max, cache),
        Command::Voronoi(a) => commands::voronoi(a, cache),
        Command::MellinCheck { suite } => commands::mellin_check(suite),
        Command::Variance(a) => commands::variance(a, cache),
        Command::ShiftedCheck(a) => commands::shifted_check(a, cache),
        Command::Sweep(a) => commands::sweep_cmd(a, cache, cli.threads),
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(2);
        }
        Err(CliError::Numeric(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(1);
        }
    };
    let cmd = name(&cli.command);
    if let Err(e) = report::emit(&cli.out, cmd, &outcome, started.elapsed().as_secs_f64(), !cli.quiet) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    if outcome.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        for &i in &outcome.failures {
            eprintln!("tolerance failure: {}", outcome.table.describe(i));
        }
        ExitCode::from(1)
    }
}
