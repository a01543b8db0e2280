//! `ecgspike`: dataset preparation, LC-ADC compression, SCNN/CNN training,
//! sensitivity sweeps, complexity tables and report generation.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};

use ecgspike_cli::commands::{self, Run};
use ecgspike_cli::config::ExperimentConfig;
use ecgspike_core::train::ModelKind;

#[derive(Debug, Parser)]
#[command(
    name = "ecgspike",
    version,
    about = "Event-driven ECG arrhythmia detection experiments"
)]
struct Cli {
    /// JSON experiment config; missing keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed (split, weight init and shuffling).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// LC-ADC resolutions, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    bits: Vec<u32>,
    /// Spike ticks per network input position, comma separated.
    #[arg(long = "bin", global = true, value_delimiter = ',')]
    bins: Vec<usize>,
    /// Experiment directory shared by all subcommands.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Continue when listed records are missing or a class is short.
    #[arg(long, global = true)]
    allow_partial: bool,
    /// Corpus directory; overrides `data_dir` in the config.
    #[arg(long, global = true)]
    data: Option<PathBuf>,
    /// Overrides the configured number of training epochs.
    #[arg(long, global = true)]
    epochs: Option<usize>,
    /// Repeat for more log output.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic annotated two-lead corpus in WFDB format.
    Synth {
        /// Target directory.
        dir: PathBuf,
        #[arg(long, default_value_t = 48)]
        records: usize,
        #[arg(long, default_value_t = 1805.0)]
        duration_s: f64,
    },
    /// Scan the corpus and write the balanced train/test manifest.
    Ingest,
    /// Data-point reduction of the LC-ADC per record and resolution.
    Compress,
    /// Train one model on the manifest split.
    Train {
        #[arg(long, value_enum, default_value_t = ModelArg::Scnn)]
        model: ModelArg,
        #[arg(long, value_enum, default_value_t = InputArg::Lcadc)]
        input: InputArg,
        /// Continue from the run's last checkpoint.
        #[arg(long)]
        resume: bool,
    },
    /// Evaluate a checkpoint on the manifest's test split.
    Eval { checkpoint: PathBuf },
    /// Train the resolution x bin-factor x seed grid plus baselines.
    Sweep,
    /// Cycle-count comparison of the CNN and SCNN under each cost reading.
    Complexity,
    /// Collect the other outputs into a markdown report and figure data.
    Report,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelArg {
    Scnn,
    Cnn,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum InputArg {
    /// Level-crossing spikes.
    Lcadc,
    /// Uniformly sampled amplitude.
    Nyquist,
}

fn run(cli: Cli) -> Result<bool> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(dir) = cli.data {
        config.data_dir = Some(dir);
    }
    if let Some(epochs) = cli.epochs {
        config.train.epochs = epochs;
    }
    let run = Run {
        config,
        out: cli.out,
        bits: (!cli.bits.is_empty()).then_some(cli.bits),
        bins: (!cli.bins.is_empty()).then_some(cli.bins),
        allow_partial: cli.allow_partial,
    };
    match cli.command {
        Command::Synth {
            dir,
            records,
            duration_s,
        } => commands::synth::run(&run, &dir, records, duration_s).map(|_| true),
        Command::Ingest => commands::ingest::run(&run).map(|_| true),
        Command::Compress => commands::compress::run(&run).map(|_| true),
        Command::Train {
            model,
            input,
            resume,
        } => {
            let kind = match model {
                ModelArg::Scnn => ModelKind::Scnn,
                ModelArg::Cnn => ModelKind::Cnn,
            };
            commands::train::run(&run, kind, matches!(input, InputArg::Nyquist), resume)
                .map(|_| true)
        }
        Command::Eval { checkpoint } => commands::train::eval(&run, &checkpoint).map(|_| true),
        Command::Sweep => commands::sweep::run(&run).map(|s| s.failed == 0),
        Command::Complexity => commands::complexity::run(&run).map(|_| true),
        Command::Report => commands::report::run(&run).map(|_| true),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "info",
        1 => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            log::error!("some computations failed; see the reports for details");
            ExitCode::FAILURE
        }
        Err(e) => {
            log::error!("{e:#}");
            ExitCode::FAILURE
        }
    }
}
