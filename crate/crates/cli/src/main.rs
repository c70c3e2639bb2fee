use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use resource_engine_cli::config::{Mode, Overrides};
use resource_engine_cli::execute;

#[derive(Parser)]
#[command(
    name = "resengine",
    version,
    about = "Athermality and coherence engines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reachable sets of the two-temperature engine.
    Athermality(Common),
    /// Pattern, (H2) verdict, stroke bound and blockers for one unitary.
    Coherence(Common),
    /// Stroke lower bound over the fractional Fourier family.
    Fig4(Common),
    /// Alternating-rotation plans for qubit unitaries and states.
    QubitSynth(Common),
    /// Flat-column and unbiased-state search.
    MutualSearch(Common),
}

#[derive(Args)]
struct Common {
    /// TOML file mirroring the run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "resengine-out")]
    out: PathBuf,
    /// Stroke limit (athermality only).
    #[arg(long)]
    max_strokes: Option<usize>,
    /// Convergence threshold for athermality, flatness tolerance for
    /// coherence and mutual-search.
    #[arg(long)]
    tol: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, c) = match cli.command {
        Command::Athermality(c) => (Mode::Athermality, c),
        Command::Coherence(c) => (Mode::Coherence, c),
        Command::Fig4(c) => (Mode::Fig4, c),
        Command::QubitSynth(c) => (Mode::QubitSynth, c),
        Command::MutualSearch(c) => (Mode::Mutual, c),
    };
    let ov = Overrides {
        seed: c.seed,
        max_strokes: c.max_strokes,
        tol: c.tol,
    };
    match execute(mode, c.config.as_deref(), &ov, &c.out) {
        Ok(_) => {
            println!("wrote {}", c.out.join("report.json").display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("resengine: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
