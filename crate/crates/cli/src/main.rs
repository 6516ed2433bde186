mod cli;
mod commands;
mod error;

use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches};

use cli::{Cli, Command};

fn main() -> ExitCode {
    let matches = Cli::command().after_help(cli::strategies_help()).get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let f = cli.format;
    let result = match &cli.command {
        Command::Ingest(a) => commands::ingest(a, f),
        Command::Validate(a) => commands::validate(a, f),
        Command::Rank(a) => commands::rank(a, f),
        Command::Select(a) => commands::select_cmd(a, f),
        Command::Prompt(a) => commands::prompt(a, f),
        Command::Run(a) => commands::run(a, f),
        Command::Sweep(a) => commands::sweep(a, f),
        Command::Eval(a) => commands::eval(a, f),
        Command::Report(a) => commands::report(a, f),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
