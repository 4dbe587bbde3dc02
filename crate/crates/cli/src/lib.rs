//! Command-line front end: `generate`, `detect`, `eval`, and `bench`.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 capacity refusal.
//! Failures print a single `error: code=<n> kind=<kind>: <message>` line.

mod args;
mod bench;
mod commands;
mod config;

use std::ffi::OsString;
use std::fmt;

use clap::Parser;

pub use args::Cli;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            kind: "usage",
            message: message.into(),
        }
    }

    pub fn capacity(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            kind: "capacity",
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one_line = self
            .message
            .split_whitespace()
            .collect::<Vec<_>>()
            .join(" ");
        write!(
            f,
            "error: code={} kind={}: {one_line}",
            self.code, self.kind
        )
    }
}

impl From<kns_core::Error> for CliError {
    fn from(e: kns_core::Error) -> Self {
        use kns_core::Error;
        let (code, kind) = match &e {
            Error::Capacity(_) => (3, "capacity"),
            Error::Param(_) => (2, "precondition"),
            Error::Io(_) => (2, "io"),
            Error::Eval(_) => (2, "eval"),
            _ => (2, "data"),
        };
        Self {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        kns_core::Error::Io(e).into()
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Runs one invocation and returns the process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let argv = match config::expand(argv) {
        Ok(a) => a,
        Err(e) => return report(e),
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let first = e.to_string();
            let first = first.lines().next().unwrap_or("invalid arguments");
            return report(CliError::usage(first.trim_start_matches("error: ")));
        }
    };
    match commands::dispatch(cli) {
        Ok(()) => 0,
        Err(e) => report(e),
    }
}

fn report(e: CliError) -> i32 {
    eprintln!("{e}");
    e.code
}
