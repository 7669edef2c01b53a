use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use maxmatch_cli::args::{Cli, Command};
use maxmatch_cli::commands::{cmd_modelcheck, cmd_run, cmd_sweep};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            // Usage problems are input errors; keep the exit-code contract.
            eprint!("{e}");
            return ExitCode::from(3);
        }
    };
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Modelcheck(args) => cmd_modelcheck(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
