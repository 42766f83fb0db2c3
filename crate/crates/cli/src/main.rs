use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use horizon::Precision;
use horizon_cli::{commands, exit_code, ExperimentConfig, Failure, Outcome};

#[derive(Parser)]
#[command(name = "horizon", version, about = "Limited-memory predictor experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Approximation error α_d of the Taylor and projection polynomials.
    AlphaSweep(Common),
    /// Sup error of the predictor against its bound across degrees.
    Convergence(Common),
    /// Empirical total error under chirp noise against the noisy bound.
    NoiseSweep(Common),
    /// Target and prediction at the largest configured degree.
    Predict {
        #[command(flatten)]
        common: Common,
        /// Comma-separated evaluation times; defaults to the config time grid.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        at: Option<Vec<f64>>,
    },
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, env = "HORIZON_THREADS")]
    threads: Option<usize>,
    /// Arithmetic for the projection construction; overrides `precision`.
    #[arg(long, value_enum)]
    precision: Option<PrecisionArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PrecisionArg {
    Double,
    Extended,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        if let Some(p) = self.precision {
            cfg.precision = match p {
                PrecisionArg::Double => Precision::Double,
                PrecisionArg::Extended => Precision::Extended,
            };
        }
        if let Some(n) = self.threads {
            if n == 0 {
                return Err(Failure::Config("--threads must be positive".into()).into());
            }
            rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    let outcome = match cli.command {
        Command::AlphaSweep(c) => commands::alpha_sweep(&c.load()?)?,
        Command::Convergence(c) => commands::convergence(&c.load()?)?,
        Command::NoiseSweep(c) => commands::noise_sweep(&c.load()?)?,
        Command::Predict { common, at } => commands::predict(&common.load()?, at.as_deref())?,
    };
    for file in &outcome.files {
        println!("wrote {}", file.display());
    }
    outcome.into_result()
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(_) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("horizon: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
