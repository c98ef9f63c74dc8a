mod args;
mod commands;
mod config;
mod error;
mod output;

use std::ffi::OsString;
use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use error::{CliError, CliResult};

/// Parses argv, merging a `--config` file in front of the explicit flags.
fn parse(argv: Vec<OsString>) -> Result<Cli, ExitCode> {
    let clap_exit = |e: clap::Error| {
        let _ = e.print();
        ExitCode::from(if e.use_stderr() { 2 } else { 0 })
    };
    let cli = Cli::try_parse_from(&argv).map_err(clap_exit)?;
    let Some(path) = cli.command.common().config.clone() else {
        return Ok(cli);
    };

    let merged = config::read_config(&path)
        .and_then(|entries| config::entries_to_args(cli.command.name(), &entries));
    let from_file = match merged {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return Err(ExitCode::from(e.exit_code() as u8));
        }
    };
    let position = argv
        .iter()
        .position(|a| a == cli.command.name())
        .expect("subcommand present after a successful parse");
    let mut full: Vec<OsString> = argv[..=position].to_vec();
    full.extend(from_file);
    full.extend_from_slice(&argv[position + 1..]);
    Cli::try_parse_from(full).map_err(clap_exit)
}

fn execute(cli: &Cli) -> CliResult<()> {
    let product = commands::dispatch(&cli.command)?;
    let common = cli.command.common();
    output::export(product.as_ref(), common.format, common.output.as_deref())?;
    match product.failure() {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match parse(std::env::args_os().collect()) {
        Ok(cli) => cli,
        Err(code) => return code,
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let kind = match e {
                CliError::Usage(_) => "invalid input",
                CliError::Numerical(_) => "numerical failure",
                CliError::Io(_) => "I/O failure",
            };
            eprintln!("error ({kind}): {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
