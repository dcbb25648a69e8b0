use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

/// Run a p-conductivity scenario.
#[derive(Parser, Debug)]
#[command(name = "pcond", version, about)]
struct Args {
    /// Scenario JSON file (schema version "1").
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory; created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads; 1 gives bit-identical reruns.
    #[arg(long)]
    threads: Option<usize>,
    /// Log stage progress to stderr.
    #[arg(long)]
    verbose: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let level = if args.verbose { log::LevelFilter::Info } else { log::LevelFilter::Warn };
    // Built without reading the environment: scenarios are the only input.
    env_logger::Builder::new().filter_level(level).init();

    if let Some(n) = args.threads {
        if n == 0 {
            eprintln!("--threads must be positive");
            return ExitCode::from(pcond::cli::EXIT_SCHEMA as u8);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("cannot configure thread pool: {e}");
        }
    }

    let (code, summary) = pcond::cli::execute(&args.scenario, &args.out);
    if let Some(summary) = summary {
        for stage in &summary.stages {
            log::info!("{:>20}  {:?}  {:.3}s", stage.name, stage.status, stage.wall_time_s);
        }
        println!("{}", args.out.join("summary.json").display());
    } else {
        eprintln!("failed; see {}", args.out.join("error.json").display());
    }
    ExitCode::from(code as u8)
}
