//! Executable front end for the vandalism-detection benchmark: corpus
//! generation, split management, stream replay, detector training and
//! scoring, score-table combination, evaluation, and leak auditing.
//!
//! Settings resolve in three layers: command-line flags (clap also
//! fills them from `WDVDB_*` environment variables), then an optional
//! JSON config file named by `--config` / `WDVDB_CONFIG`, then
//! built-in defaults.

pub mod commands;
pub mod config;
pub mod error;
pub mod pipeline;
pub mod score_table;

use std::ffi::OsString;

use clap::Parser;

use commands::Command;
use config::FileConfig;
use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "wdvdb",
    version,
    about = "Vandalism-detection benchmark: synthetic corpora, replay streams, detectors, evaluation"
)]
pub struct Cli {
    /// JSON settings file; flags and WDVDB_* variables override it
    #[arg(long, global = true, env = "WDVDB_CONFIG", value_name = "FILE")]
    pub config: Option<std::path::PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

/// Parses and runs one invocation, returning the process exit code:
/// 0 success, 1 usage error, 2 data error, 3 protocol error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version land here too; they are not errors
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("wdvdb: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let file = FileConfig::load(cli.config.as_deref())?;
    cli.command.dispatch(&file)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn help_exits_zero() {
        assert_eq!(run(["wdvdb", "--help"]), 0);
        assert_eq!(run(["wdvdb", "detect", "--help"]), 0);
    }

    #[test]
    fn unknown_flags_exit_one() {
        assert_eq!(run(["wdvdb", "gen", "--out", "x.tsv", "--bogus"]), 1);
        assert_eq!(run(["wdvdb", "frobnicate"]), 1);
        assert_eq!(run::<_, &str>(["wdvdb"]), 1);
    }

    #[test]
    fn missing_input_files_exit_two() {
        assert_eq!(
            run([
                "wdvdb",
                "stats",
                "--corpus",
                "/nonexistent/c.tsv",
                "--truth",
                "/nonexistent/t.tsv"
            ]),
            2
        );
    }
}
