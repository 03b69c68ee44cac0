use clap::{Parser, Subcommand};
use oamlos_cli::{execute, parse_scenario, rerun, CliError, Invocation, PatternCutArgs, RunReport};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "oamlos", version, about = "OAM and plane-wave LoS MIMO sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory; created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the scenario's seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Azimuth cut of one beam, with the recovered phase slope.
    PatternCut {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        args: PatternCutArgs,
    },
    /// Shannon capacity per configuration over the SNR grid.
    CapacitySweep {
        #[command(flatten)]
        common: Common,
    },
    /// Condition number and correlation per configuration.
    ConditionTable {
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo BER of the 2×2 link over the SNR grid.
    BerSweep {
        #[command(flatten)]
        common: Common,
    },
    /// Repeats a run from its manifest.
    Rerun {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run_with(common: &Common, invocation: Invocation) -> Result<RunReport, CliError> {
    let mut scenario = parse_scenario(&common.scenario)?;
    if let Some(seed) = common.seed {
        scenario.seed = seed;
    }
    execute(&invocation, &scenario, &common.out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::PatternCut { common, args } => run_with(common, Invocation::PatternCut(args.clone())),
        Command::CapacitySweep { common } => run_with(common, Invocation::CapacitySweep),
        Command::ConditionTable { common } => run_with(common, Invocation::ConditionTable),
        Command::BerSweep { common } => run_with(common, Invocation::BerSweep),
        Command::Rerun { manifest, out } => rerun(manifest, out),
    };
    match result {
        Ok(report) => {
            for line in &report.summary {
                println!("{line}");
            }
            for p in report.outputs.iter().chain(std::iter::once(&report.manifest)) {
                println!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
