//! Command-line front end for the block-coordinate gradient coding library.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;

pub use config::{build_spec, parse_args, CommandKind, ExperimentSpec, Flags, Parsed};
pub use error::{CliError, Origin};

/// Parses `args`, runs the command and writes its CSV.
pub fn run<I, T>(args: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let spec = match parse_args(args)? {
        Parsed::Spec(spec) => spec,
        Parsed::Info(text) => {
            print!("{text}");
            return Ok(());
        }
    };
    let out = commands::execute(&spec)?;
    output::emit(spec.output.as_deref(), &out.csv)?;
    eprint!("{}", out.summary);
    Ok(())
}
