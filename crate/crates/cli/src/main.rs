use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod error;
mod run;

use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "fracext", version, about = "Fractal measures, extension operators and Knapp constructions")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Debug, Args)]
pub struct GlobalOpts {
    /// JSON configuration for the subcommand; built-in sample parameters when absent.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides every seed in the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Run directory receiving all outputs.
    #[arg(long, global = true, default_value = "fracext-run")]
    pub out: PathBuf,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Largest number of atoms any measure may have.
    #[arg(long, global = true, default_value_t = fracext::measure::DEFAULT_ATOM_CAP)]
    pub cap_atoms: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Discretized measures and their dimensions.
    #[command(subcommand)]
    Measure(MeasureCmd),
    /// The Fourier extension operator.
    #[command(subcommand)]
    Extend(ExtendCmd),
    /// Convolution densities and the integrability harness.
    #[command(subcommand)]
    Convolve(ConvolveCmd),
    /// Knapp families and their ratio bounds.
    #[command(subcommand)]
    Knapp(KnappCmd),
    /// Exact counting oracles.
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// Known regions in the (1/p, 1/q) square.
    #[command(subcommand)]
    Regions(RegionsCmd),
    /// Runs the acceptance suite.
    Accept,
}

#[derive(Debug, Subcommand)]
enum MeasureCmd {
    Build,
    Dims,
    Decay,
}

#[derive(Debug, Subcommand)]
enum ExtendCmd {
    Norm,
    Ratio,
}

#[derive(Debug, Subcommand)]
enum ConvolveCmd {
    Run,
    #[command(name = "verify-thm31")]
    VerifyThm31,
}

#[derive(Debug, Subcommand)]
enum KnappCmd {
    Build,
    Validate,
    RatioTrend,
}

#[derive(Debug, Subcommand)]
enum OracleCmd {
    Count,
    Identity,
}

#[derive(Debug, Subcommand)]
enum RegionsCmd {
    Plot,
}

fn dispatch(cmd: &Command, g: &GlobalOpts) -> Result<(), CliError> {
    use commands as c;
    match cmd {
        Command::Measure(MeasureCmd::Build) => c::measure_build(g),
        Command::Measure(MeasureCmd::Dims) => c::measure_dims(g),
        Command::Measure(MeasureCmd::Decay) => c::measure_decay(g),
        Command::Extend(ExtendCmd::Norm) => c::extend_norm(g),
        Command::Extend(ExtendCmd::Ratio) => c::extend_ratio(g),
        Command::Convolve(ConvolveCmd::Run) => c::convolve_run(g),
        Command::Convolve(ConvolveCmd::VerifyThm31) => c::verify_thm31(g),
        Command::Knapp(KnappCmd::Build) => c::knapp_build(g),
        Command::Knapp(KnappCmd::Validate) => c::knapp_validate(g),
        Command::Knapp(KnappCmd::RatioTrend) => c::ratio_trend(g),
        Command::Oracle(OracleCmd::Count) => c::oracle_count(g),
        Command::Oracle(OracleCmd::Identity) => c::oracle_identity(g),
        Command::Regions(RegionsCmd::Plot) => c::regions_plot(g),
        Command::Accept => c::accept(g),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} worker threads: {e}");
            return ExitCode::from(1);
        }
    }
    match dispatch(&cli.command, &cli.global) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
