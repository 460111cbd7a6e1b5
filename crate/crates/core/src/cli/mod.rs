mod args;
mod run;

use std::ffi::OsString;

use clap::Parser;

use args::Cli;

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable config, missing input files: exit 2.
    Usage(String),
    /// Anything the analysis itself rejects: exit 1.
    Domain(kqi::KqiError),
}

impl From<kqi::KqiError> for CliError {
    fn from(e: kqi::KqiError) -> Self {
        CliError::Domain(e)
    }
}

pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run::run(cli) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Domain(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}
