#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod cli;
mod commands;
mod config;
mod output;

use std::fmt;
use std::io::IsTerminal;
use std::process::ExitCode;

use clap::Parser;

use crate::cli::{Cli, Command};

/// A failure with the process exit status it maps to.
#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    pub const VALIDATION: u8 = 1;
    pub const INPUT: u8 = 2;
    pub const NUMERICAL: u8 = 3;

    pub fn input(message: impl Into<String>) -> Self {
        Self { code: Self::INPUT, message: message.into() }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self { code: Self::NUMERICAL, message: message.into() }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        Self { code: Self::VALIDATION, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.message.trim_end())
    }
}

impl From<msum::PricingError> for CliError {
    fn from(err: msum::PricingError) -> Self {
        let code = if err.is_input_error() { Self::INPUT } else { Self::NUMERICAL };
        Self { code, message: err.to_string() }
    }
}

fn threads(command: &Command) -> Option<usize> {
    match command {
        Command::Price(a) => a.output.threads,
        Command::Mc(a) => a.output.threads,
        Command::Sweep(a) => a.output.threads,
        Command::Validate(a) => a.output.threads,
    }
}

fn dispatch(command: &Command) -> Result<(), CliError> {
    match command {
        Command::Price(a) => commands::price(a),
        Command::Mc(a) => commands::mc(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Validate(a) => commands::validate(a),
    }
}

#[cfg(feature = "parallel")]
fn run(command: &Command) -> Result<(), CliError> {
    match threads(command) {
        Some(0) => Err(CliError::input("threads: must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::input(format!("threads: {e}")))?
            .install(|| dispatch(command)),
        None => dispatch(command),
    }
}

#[cfg(not(feature = "parallel"))]
fn run(command: &Command) -> Result<(), CliError> {
    // sequential build: the flag is accepted and ignored
    match threads(command) {
        Some(0) => Err(CliError::input("threads: must be at least 1")),
        _ => dispatch(command),
    }
}

fn report(err: &CliError) {
    let stderr = std::io::stderr();
    let colour = stderr.is_terminal() && std::env::var_os("NO_COLOR").is_none();
    let prefix = if colour { "\x1b[31merror:\x1b[0m" } else { "error:" };
    eprintln!("{prefix} {err}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { CliError::INPUT } else { 0 });
        }
    };
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            report(&err);
            ExitCode::from(err.code)
        }
    }
}
