//! `akr` command-line tool.
//!
//! Exit status: 0 on success, 2 for malformed arguments or expressions,
//! 3 when a precondition fails, 4 when a numerical procedure fails, 1 when
//! the output cannot be written.

mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;

use akr_core::table::Format;
use akr_core::ErrorKind;
use clap::Parser;

use args::{Cli, Command, Output, OutputFormat};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, output) = match &cli.command {
        Command::Nodes(a) => (commands::nodes(a), &a.output),
        Command::Eval(a) => (commands::eval(a), &a.output),
        Command::Error(a) => (commands::error(a), &a.output),
        Command::Table(a) => (commands::table(a), &a.output),
        Command::Chain(a) => (commands::chain(a), &a.output),
        Command::Classify(a) => (commands::classify(a), &a.output),
        Command::Voronovskaja(a) => (commands::voronovskaja(a), &a.output),
        Command::Figure(a) => (commands::figure(a), &a.output),
        Command::Bounds(a) => (commands::bounds(a), &a.output),
    };
    match result {
        Ok(table) => match write(&table, output) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: cannot write output: {e}");
                ExitCode::from(1)
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Input => 2,
                ErrorKind::Precondition => 3,
                ErrorKind::Numerical => 4,
            })
        }
    }
}

fn write(table: &akr_core::table::Table, output: &Output) -> std::io::Result<()> {
    let format = match output.format {
        OutputFormat::Csv => Format::Csv,
        OutputFormat::Json => Format::Json,
    };
    let text = table.render(format);
    match &output.out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}
