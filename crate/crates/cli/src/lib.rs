//! The `folkengine` command line: text formats, corpus directories and the
//! command dispatcher.
//!
//! Exit codes: 0 when every checked property holds, 1 when one fails (a
//! witness is printed), 2 for input and usage errors.

pub mod corpus_dir;
mod commands;
pub use commands::{interval_document, interval_from_document};
pub mod text;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "folkengine", version, about = "Constructive homotopy theory on finite categories")]
pub struct Cli {
    /// extra definition files loaded before the input, in order
    #[arg(long = "include", global = true, value_name = "FILE")]
    pub include: Vec<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and validate definition files
    Check { files: Vec<PathBuf> },
    /// The interval groupoid and its structure functors
    Interval {
        #[command(subcommand)]
        action: IntervalAction,
    },
    /// Functor validation
    Functor {
        #[command(subcommand)]
        action: FunctorAction,
    },
    /// Decide whether a functor is an equivalence, printing a certificate
    Equiv {
        file: PathBuf,
        /// functor to check; defaults to the last one in the file
        #[arg(long)]
        name: Option<String>,
    },
    /// Decide whether a functor is a fibration
    Fib {
        file: PathBuf,
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        normally_cloven: bool,
    },
    /// Decide whether a functor is a cofibration
    Cofib {
        file: PathBuf,
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        normally_cloven: bool,
    },
    /// Factor a functor and write the middle object, both legs and certificates
    Factor {
        #[arg(long, value_enum)]
        mode: FactorMode,
        file: PathBuf,
        #[arg(long)]
        name: Option<String>,
        #[arg(short = 'o', long = "out", value_name = "DIR")]
        out: PathBuf,
    },
    /// Solve a lifting problem by the constructive formulas
    Lift {
        file: PathBuf,
        #[arg(long)]
        name: Option<String>,
        #[arg(short = 'o', long = "out", value_name = "FILE")]
        out: PathBuf,
    },
    /// Check the model structure conditions over a corpus
    Axioms {
        #[arg(long, value_enum)]
        variant: VariantArg,
        /// corpus directory; defaults to $FOLKENGINE_CORPUS, then the shipped default
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum IntervalAction {
    /// Run the axiom suite on the standard interval, or on one read from FILE
    Verify { file: Option<PathBuf> },
    /// Print the interval structure in the text format
    Dump {
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum FunctorAction {
    /// Validate functoriality
    Check {
        file: PathBuf,
        #[arg(long)]
        name: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FactorMode {
    Cyl,
    Cocyl,
    CofTfib,
    TcofFib,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum VariantArg {
    #[value(name = "A", alias = "a")]
    A,
    #[value(name = "B", alias = "b")]
    B,
}

/// Parse `argv` (program name first) and run, writing to the given streams.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(rendered.as_bytes()) } else { out.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match commands::dispatch(&cli, out) {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_INPUT
        }
    }
}
