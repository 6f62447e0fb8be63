use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use povm_cli::{
    cmd_posterior, cmd_simulate, cmd_solve, cmd_surface, load_ensemble, CliError, InputOptions,
    SolveOptions, DEFAULT_SPECTRAL_CUTOFF,
};

/// Optimal unambiguous discrimination of linearly independent pure states.
#[derive(Debug, Parser)]
#[command(name = "povm", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Problem file (JSON): {"states": [[[re, im], ...], ...], "priors"?: [...], "values"?: [...]}
    input: PathBuf,
    /// Rescale states of any norm to unit length instead of rejecting them.
    #[arg(long)]
    normalize: bool,
    /// Accepted deviation of state norms and the priors' sum from 1.
    #[arg(long, default_value_t = InputOptions::default().norm_tolerance)]
    norm_tolerance: f64,
    /// Eigenvalue tolerance of the positivity test on the inconclusive operator.
    #[arg(long, default_value_t = SolveOptions::default().psd_tolerance)]
    tolerance: f64,
}

impl Common {
    fn load(&self) -> Result<povm_core::StateEnsemble, CliError> {
        load_ensemble(
            &self.input,
            &InputOptions {
                norm_tolerance: self.norm_tolerance,
                normalize: self.normalize,
            },
        )
    }

    fn solve_options(&self, oracle: Option<usize>) -> SolveOptions {
        SolveOptions {
            psd_tolerance: self.tolerance,
            oracle,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the optimal detector coefficients.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Also run the brute-force grid search at this resolution and report the gap.
        #[arg(long, value_name = "RESOLUTION")]
        oracle: Option<usize>,
    },
    /// Posterior probabilities and entropies of the inconclusive outcomes at the optimum.
    Posterior {
        #[command(flatten)]
        common: Common,
        /// Report the inconclusive result as one outcome instead of its spectral parts.
        #[arg(long)]
        merged: bool,
        /// Relative eigenvalue cutoff for the spectral decomposition.
        #[arg(long, default_value_t = DEFAULT_SPECTRAL_CUTOFF)]
        cutoff: f64,
    },
    /// Monte Carlo run of the optimal measurement.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Resolve the inconclusive outcome into its spectral parts.
        #[arg(long)]
        split: bool,
    },
    /// Boundary points of the positivity domain as CSV (three states only).
    Surface {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 50)]
        resolution: usize,
    },
}

fn run(command: Command) -> Result<String, CliError> {
    match command {
        Command::Solve { common, oracle } => {
            cmd_solve(&common.load()?, &common.solve_options(oracle))
        }
        Command::Posterior {
            common,
            merged,
            cutoff,
        } => cmd_posterior(&common.load()?, &common.solve_options(None), merged, cutoff),
        Command::Simulate {
            common,
            trials,
            seed,
            split,
        } => cmd_simulate(
            &common.load()?,
            &common.solve_options(None),
            trials,
            seed,
            split,
        ),
        Command::Surface { common, resolution } => cmd_surface(&common.load()?, resolution),
    }
}

fn main() -> ExitCode {
    // clap's own usage errors exit with 2, which is taken by linear dependence here.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(text) => {
            let mut stdout = std::io::stdout().lock();
            if stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
