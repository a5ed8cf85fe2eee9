use std::path::PathBuf;
use std::process::ExitCode;

use charsums::experiments::{emit, run, OutputFormat, Scenario, ScenarioConfig};
use charsums::Error;
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "charsums", version, about = "Run short character sum experiments")]
struct Cli {
    #[command(subcommand)]
    scenario: Command,
    /// TOML scenario configuration; defaults apply to anything it omits
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    Theorem1,
    Theorem2,
    Theorem3,
    Theorem4,
    PolyaCheck,
    RmfOracle,
    BiasSearch,
}

impl From<Command> for Scenario {
    fn from(c: Command) -> Self {
        match c {
            Command::Theorem1 => Scenario::Theorem1,
            Command::Theorem2 => Scenario::Theorem2,
            Command::Theorem3 => Scenario::Theorem3,
            Command::Theorem4 => Scenario::Theorem4,
            Command::PolyaCheck => Scenario::PolyaCheck,
            Command::RmfOracle => Scenario::RmfOracle,
            Command::BiasSearch => Scenario::BiasSearch,
        }
    }
}

#[derive(ValueEnum, Clone, Copy)]
enum Format {
    Csv,
    Json,
}

const EXIT_IO: u8 = 1;
const EXIT_REJECTED: u8 = 2;
const EXIT_NOT_DEMONSTRATED: u8 = 3;

fn fail(err: &Error) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(if err.is_rejected_input() { EXIT_REJECTED } else { EXIT_IO })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut cfg = match &cli.config {
        Some(path) => match ScenarioConfig::from_path(path) {
            Ok(cfg) => cfg,
            Err(e) => return fail(&e),
        },
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(f) = cli.format {
        cfg.output.format = match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        };
    }
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(EXIT_REJECTED);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_IO);
        }
    }

    let report = match run(cli.scenario.into(), &cfg) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    for note in &report.notices {
        eprintln!("note: {note}");
    }
    match emit(&report, &out, cfg.output.format) {
        Ok(files) => files.iter().for_each(|f| println!("{}", f.display())),
        Err(e) => return fail(&e),
    }
    if report.demonstrated == Some(false) {
        eprintln!("mechanism not demonstrated");
        return ExitCode::from(EXIT_NOT_DEMONSTRATED);
    }
    ExitCode::SUCCESS
}
