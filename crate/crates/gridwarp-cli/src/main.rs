use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use gridwarp_cli::{commands, CliError};
use gridwarp_core::dtw::{CostKind, PathMode};

/// Grid-pattern matching by column-wise DTW: synthetic structured-light
/// simulation, reconstruction, evaluation and benchmarking.
#[derive(Parser)]
#[command(name = "gridwarp", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Fixed,
    Free,
}

impl From<ModeArg> for PathMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Fixed => PathMode::Fixed,
            ModeArg::Free => PathMode::FreeJ,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CostArg {
    Abs,
    Sq,
}

impl From<CostArg> for CostKind {
    fn from(c: CostArg) -> Self {
        match c {
            CostArg::Abs => CostKind::Absolute,
            CostArg::Sq => CostKind::Squared,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Render a synthetic scene: writes image.pgm and ground_truth.csv.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Reconstruct a height map from an image: writes heightmap.csv/.pgm and
    /// matching diagnostics.
    Reconstruct {
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Endpoint mode of the matching path (overrides the config).
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Local cost of the column DTW (overrides the config).
        #[arg(long, value_enum)]
        cost: Option<CostArg>,
    },
    /// Score a height map against ground truth: writes report.json/.txt.
    Evaluate {
        #[arg(long)]
        heightmap: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Config whose digest goes into the report.
        #[arg(long)]
        config: Option<PathBuf>,
        /// timings.json from a reconstruct run to merge into the report.
        #[arg(long)]
        timings: Option<PathBuf>,
    },
    /// Time matching on random N x N grids and fit the log-log slope.
    Bench {
        /// Comma-separated sizes, e.g. 8,16,32,64.
        #[arg(long, default_value = "8,16,32,64")]
        sizes: String,
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate { config, out, seed } => commands::cmd_simulate(&config, &out, seed),
        Command::Reconstruct {
            image,
            config,
            out,
            mode,
            cost,
        } => commands::cmd_reconstruct(
            &image,
            &config,
            &out,
            mode.map(Into::into),
            cost.map(Into::into),
        ),
        Command::Evaluate {
            heightmap,
            truth,
            out,
            config,
            timings,
        } => {
            let text = commands::cmd_evaluate(
                &heightmap,
                &truth,
                &out,
                config.as_deref(),
                timings.as_deref(),
            )?;
            print!("{text}");
            Ok(())
        }
        Command::Bench {
            sizes,
            trials,
            out,
            seed,
        } => {
            let sizes = commands::parse_sizes(&sizes)?;
            let text = commands::cmd_bench(&sizes, trials, &out, seed)?;
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    gridwarp_cli::init_thread_pool();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
