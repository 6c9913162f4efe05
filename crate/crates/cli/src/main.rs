use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use colotame::output::load_grading;
use colotame::selftest::{self, Fault};
use colotame::{certify, invert, CliError, RunConfig};

#[derive(Parser)]
#[command(
    name = "colotame",
    version,
    about = "Certified local inversion of composition operators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve f(y) = target near y0 and write result.csv and solution.txt.
    Invert(RunArgs),
    /// Build the generator family at y0 and write generator.txt.
    Certify(RunArgs),
    /// Run the reduced property suite.
    Selftest {
        #[arg(long, value_enum, hide = true)]
        fault: Option<FaultArg>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Run configuration (key=value lines or a JSON object).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Grading file overriding the default or canonical grading.
    #[arg(long)]
    grading: Option<PathBuf>,
    /// Seed overriding the configuration's.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    Theta,
}

fn prepare(args: &RunArgs) -> Result<(RunConfig, Option<colotame_core::Grading>), CliError> {
    let mut config = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let grading = args.grading.as_deref().map(load_grading).transpose()?;
    Ok((config, grading))
}

fn finish(result: Result<(), CliError>) -> ExitCode {
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.line());
            ExitCode::from(e.exit_code())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Invert(args) => finish(prepare(&args).and_then(|(config, m)| {
            let outcome = invert(&config, &args.out, m)?;
            println!(
                "certified in {} steps, residual {:e}",
                outcome.result.steps(),
                outcome.result.residual_sup
            );
            Ok(())
        })),
        Command::Certify(args) => finish(prepare(&args).and_then(|(config, m)| {
            let outcome = certify(&config, &args.out, m)?;
            println!("certified: {}", outcome.certified);
            Ok(())
        })),
        Command::Selftest { fault } => {
            let fault = fault.map(|FaultArg::Theta| Fault::Theta);
            match selftest::run(fault, |name, detail| println!("ok {name}: {detail}")) {
                Ok(()) => ExitCode::SUCCESS,
                Err((name, why)) => {
                    println!("FAIL {name}: {why}");
                    ExitCode::from(1)
                }
            }
        }
    }
}
