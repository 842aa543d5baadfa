mod args;
mod commands;
mod report;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, Format};
use report::{Failure, Output};

fn run(cli: &Cli) -> Result<bool, Failure> {
    if let Ok(workers) = std::env::var("DYADIC_WORKERS") {
        let n: usize = workers
            .parse()
            .map_err(|_| Failure::Config(format!("DYADIC_WORKERS must be a positive integer, got {workers:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Config(format!("cannot start worker pool: {e}")))?;
    }
    let (output, common) = match &cli.command {
        Command::Validate(a) => (commands::validate(a)?, a),
        Command::Grids(a) => (commands::grids(a)?, &a.common),
        Command::Lattice(a) => (commands::lattice(a)?, &a.common),
        Command::Coloring(a) => (commands::coloring(a)?, &a.common),
        Command::Goodness(a) => (commands::goodness(a)?, &a.lattice.common),
        Command::A2(a) => (commands::a2(a)?, &a.common),
    };
    let Output { report, csv } = output;
    let text = match (common.format, csv) {
        (Format::Csv, Some(csv)) => csv,
        _ => {
            let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
            s.push('\n');
            s
        }
    };
    report::write(common.out.as_deref(), &text)?;
    for check in report.checks.iter().filter(|c| !c.passed) {
        eprintln!("check {} failed: {}", check.name, check.detail);
    }
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
