//! Command-line front end: `optimize`, `pattern` and `sweep`.
//!
//! Exit codes: 0 success, 2 configuration error, 3 runtime error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fdris::harness::{self, PatternRequest, SweepAxis, SweepMethod, SweepRequest};
use fdris::pattern::GridSpec;

#[derive(Parser)]
#[command(name = "fdris", version, about = "Frequency-diverse RIS link optimizer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file (JSON).
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Override the seed in the scenario file.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Maximize the achievable rate for one scenario.
    Optimize {
        #[command(flatten)]
        common: Common,
        /// Store wall-clock time in the record (makes reruns differ).
        #[arg(long)]
        timings: bool,
    },
    /// Received-power map over distance and azimuth.
    Pattern {
        #[command(flatten)]
        common: Common,
        /// Run record supplying the design (otherwise the scenario is optimized first).
        #[arg(long)]
        record: Option<PathBuf>,
        /// Second record to compare against at the target.
        #[arg(long)]
        baseline: Option<PathBuf>,
        #[arg(long, default_value_t = 50.0)]
        d_min: f64,
        #[arg(long, default_value_t = 300.0)]
        d_max: f64,
        #[arg(long, default_value_t = 101)]
        d_points: usize,
        #[arg(long, default_value_t = -90.0, allow_hyphen_values = true)]
        az_min: f64,
        #[arg(long, default_value_t = 90.0, allow_hyphen_values = true)]
        az_max: f64,
        #[arg(long, default_value_t = 181)]
        az_points: usize,
        #[arg(long, default_value_t = 90.0)]
        elevation: f64,
        #[arg(long)]
        no_path_loss: bool,
    },
    /// Mean/std of the optimized rate along one axis for several methods.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// S, P or bits.
        #[arg(long)]
        vary: SweepAxis,
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        values: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "fdris-ceo,ris-ceo")]
        methods: Vec<SweepMethod>,
        #[arg(long, default_value_t = 5)]
        trials: usize,
    },
}

fn init_threads(threads: Option<usize>) {
    if let Some(n) = threads {
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Optimize { common, timings } => {
            init_threads(common.threads);
            harness::cmd_optimize(&common.config, &common.out_dir, common.seed, timings).map(|_| ())
        }
        Command::Pattern {
            common,
            record,
            baseline,
            d_min,
            d_max,
            d_points,
            az_min,
            az_max,
            az_points,
            elevation,
            no_path_loss,
        } => {
            init_threads(common.threads);
            let request = PatternRequest {
                grid: GridSpec::linear((d_min, d_max, d_points), (az_min, az_max, az_points), elevation),
                include_path_loss: !no_path_loss,
                record,
                baseline,
            };
            harness::cmd_pattern(&common.config, &common.out_dir, common.seed, &request).map(|_| ())
        }
        Command::Sweep { common, vary, values, methods, trials } => {
            init_threads(common.threads);
            let request = SweepRequest { axis: vary, values, methods, trials };
            harness::cmd_sweep(&common.config, &common.out_dir, common.seed, &request).map(|_| ())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_error() { 2 } else { 3 })
        }
    }
}
