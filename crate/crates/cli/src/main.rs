//! `axiometer`: batch scoring of ranked-ballot elections.
//!
//! Exit codes: 0 success, 1 other failure, 2 unreadable or malformed input,
//! 3 bad configuration, 4 a sweep in which no file parsed.

mod commands;
mod failure;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use failure::Failure;

pub const DEFAULT_RULES: &str = "borda,3-approval,2-approval,plurality,stv";

#[derive(Parser, Debug)]
#[command(
    name = "axiometer",
    version,
    about = "Removal-stability and majority-alignment scores for ranked-ballot elections"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Comma-separated rules: borda, K-approval, plurality, stv, stv:k=K,
    /// optimal-u, dictator:i=I. A bare `stv` uses the election's seat count.
    #[arg(long, global = true, default_value = DEFAULT_RULES)]
    pub rules: String,
    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Worker threads (default: one per core).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Score one election under every rule.
    Analyze(AnalyzeArgs),
    /// Score every election file under a directory.
    Sweep(SweepArgs),
    /// Write synthetic Bradley-Terry profiles and their scores.
    Generate(GenerateArgs),
    /// Percentile bootstrap intervals over voters.
    Bootstrap(BootstrapArgs),
    /// Score Bradley-Terry replicates over a grid of alpha and m.
    BtExperiment(BtExperimentArgs),
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    pub profile: PathBuf,
    /// Output file. Without it, results go to stdout.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    /// STV seats when the file has no `# seats:` line; overrides it if set.
    #[arg(long)]
    pub seats: Option<usize>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    pub dir: PathBuf,
    #[arg(short, long)]
    pub out: PathBuf,
    /// Seat count for files without one.
    #[arg(long)]
    pub seats: Option<usize>,
    /// Also write per-group quartile summaries here.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// Summary grouping: any of rule, candidates, seats.
    #[arg(long, default_value = "rule")]
    pub group_by: String,
}

#[derive(Args, Debug, Clone)]
pub struct BtArgs {
    /// Voters per profile.
    #[arg(long, default_value_t = 1000)]
    pub voters: usize,
    /// Replicates.
    #[arg(long, default_value_t = 100)]
    pub profiles: usize,
    /// Draw one strength vector for all replicates.
    #[arg(long)]
    pub shared_strengths: bool,
    #[arg(long, value_enum, default_value_t = SamplerArg::Auto)]
    pub sampler: SamplerArg,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub thin: Option<usize>,
    /// STV seats.
    #[arg(long, default_value_t = 3)]
    pub seats: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SamplerArg {
    Auto,
    Exact,
    Mcmc,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub alpha: f64,
    #[command(flatten)]
    pub bt: BtArgs,
    /// Output directory.
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct BootstrapArgs {
    #[arg(required = true)]
    pub profiles: Vec<PathBuf>,
    #[arg(short, long)]
    pub out: PathBuf,
    #[arg(short = 'B', long, default_value_t = 1000)]
    pub resamples: usize,
    #[arg(long, default_value_t = 0.95)]
    pub confidence: f64,
    #[arg(long, default_value = "sigma_iia,sigma_u")]
    pub metrics: String,
    #[arg(long)]
    pub seats: Option<usize>,
    /// Also write intervals averaged by candidate and seat count here.
    #[arg(long)]
    pub pooled: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BtExperimentArgs {
    /// Comma-separated concentrations.
    #[arg(long, value_delimiter = ',', required = true)]
    pub alpha: Vec<f64>,
    /// Comma-separated candidate counts.
    #[arg(long, value_delimiter = ',', required = true)]
    pub m: Vec<usize>,
    #[command(flatten)]
    pub bt: BtArgs,
    #[arg(short, long)]
    pub out: PathBuf,
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(jobs) = cli.global.jobs {
        if jobs == 0 {
            return Err(Failure::Config("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure::Other(e.to_string()))?;
    }
    let g = &cli.global;
    match &cli.command {
        Command::Analyze(a) => commands::analyze(g, a),
        Command::Sweep(a) => commands::sweep(g, a),
        Command::Generate(a) => commands::generate(g, a),
        Command::Bootstrap(a) => commands::bootstrap(g, a),
        Command::BtExperiment(a) => commands::bt_experiment(g, a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(3),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn global_flags_after_subcommand() {
        let cli = Cli::try_parse_from(["axiometer", "analyze", "x.csv", "--rules", "borda", "--seed", "7"]).unwrap();
        assert_eq!(cli.global.rules, "borda");
        assert_eq!(cli.global.seed, 7);
    }

    #[test]
    fn lists_split_on_commas() {
        let cli = Cli::try_parse_from([
            "axiometer",
            "bt-experiment",
            "--alpha",
            "0.5,2",
            "--m",
            "4,6",
            "-o",
            "x",
        ])
        .unwrap();
        match cli.command {
            Command::BtExperiment(a) => {
                assert_eq!(a.alpha, [0.5, 2.0]);
                assert_eq!(a.m, [4, 6]);
                assert_eq!(a.bt.seats, 3);
            }
            _ => panic!(),
        }
    }
}
