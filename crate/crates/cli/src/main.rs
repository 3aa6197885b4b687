use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use monadic_sdp_cli::commands::{
    cmd_example, cmd_oracle, cmd_solve, cmd_trajectories, cmd_verify, ExampleName, Format,
    OracleCheck, PolicyArg, Range, ValueFnArg, EXIT_USAGE,
};

#[derive(Parser)]
#[command(
    name = "sdp",
    version,
    about = "Solve and verify finite-horizon monadic sequential decision problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RangeArgs {
    /// First decision step (default: the problem's first step)
    #[arg(long = "step", value_name = "T")]
    step: Option<usize>,
    /// Number of decision steps (default: up to the problem's last step)
    #[arg(long = "horizon", value_name = "N")]
    horizon: Option<usize>,
}

impl From<&RangeArgs> for Range {
    fn from(r: &RangeArgs) -> Self {
        Range {
            step: r.step,
            horizon: r.horizon,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Backward induction: optimal policies and their values
    Solve {
        file: PathBuf,
        #[command(flatten)]
        range: RangeArgs,
        #[arg(long, value_enum, default_value = "val")]
        value_fn: ValueFnArg,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run every correctness check and report whether backward induction is certified
    Verify {
        file: PathBuf,
        #[command(flatten)]
        range: RangeArgs,
        /// Case budget per law before switching from exhaustive to sampled checking
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
        #[arg(long, env = "SDP_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// List the possible trajectories of a policy sequence
    Trajectories {
        file: PathBuf,
        #[command(flatten)]
        range: RangeArgs,
        /// Start state (default: every state of the first step)
        #[arg(long)]
        state: Option<String>,
        /// `optimal`, `all`, or a JSON file holding one state-to-control map per step
        #[arg(long, default_value = "optimal")]
        policy: PolicyArg,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run a single brute-force oracle
    Oracle {
        file: PathBuf,
        #[command(flatten)]
        range: RangeArgs,
        #[arg(long, value_enum)]
        check: OracleCheck,
        #[arg(long, value_enum, default_value = "both")]
        value_fn: ValueFnArg,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Print a built-in problem as a problem file
    Example {
        #[arg(value_enum)]
        name: ExampleName,
        /// Measure for the climate problem
        #[arg(long, default_value = "min")]
        measure: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve {
            file,
            range,
            value_fn,
            format,
        } => cmd_solve(file, range.into(), *value_fn, *format),
        Command::Verify {
            file,
            range,
            budget,
            seed,
            format,
        } => cmd_verify(file, range.into(), *budget, *seed, *format),
        Command::Trajectories {
            file,
            range,
            state,
            policy,
            format,
        } => cmd_trajectories(file, range.into(), state.as_deref(), policy, *format),
        Command::Oracle {
            file,
            range,
            check,
            value_fn,
            format,
        } => cmd_oracle(file, range.into(), *check, *value_fn, *format),
        Command::Example { name, measure } => cmd_example(*name, measure),
    };
    match result {
        Ok(out) => {
            print!("{}", out.stdout);
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
