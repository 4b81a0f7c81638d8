//! Batch front-end: loads description files and runs checks with
//! deterministic reports.

mod commands;
pub mod report;
pub mod suites;

use std::path::PathBuf;

use spantopos::text::{parse_topos, ToposFile};
use spantopos::Topos;

pub use report::{Format, Report, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Eval,
    Adjoin,
    CheckAllegory,
    Booleanize,
    Selftest,
}

/// Where a topos comes from: a description file or a built-in name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Builtin(String),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Command,
    pub topos: Option<Source>,
    pub formula: Option<String>,
    pub functor: Option<PathBuf>,
    /// Object to adjoin an indeterminate of (first named object by default).
    pub object: Option<String>,
    pub depth: usize,
    pub seed: u64,
    pub format: Format,
    /// Acceptance-scale suites in `selftest`.
    pub full: bool,
    /// Criteria to run in `selftest`; all when empty.
    pub criteria: Vec<u8>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            topos: None,
            formula: None,
            functor: None,
            object: None,
            depth: 2,
            seed: 0,
            format: Format::Text,
            full: false,
            criteria: Vec::new(),
        }
    }

    pub fn builtin(command: Command, name: &str, seed: u64) -> Self {
        RunConfig {
            topos: Some(Source::Builtin(name.into())),
            seed,
            ..Self::new(command)
        }
    }
}

/// Exit code and rendered report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub report: String,
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_COUNTEREXAMPLE: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

/// Failure to obtain usable input.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InputError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}: {source}")]
    Parse {
        path: String,
        source: spantopos::ParseError,
    },
    #[error("unknown built-in topos {0:?} (expected finset or sierpinski)")]
    UnknownBuiltin(String),
    #[error("{0}")]
    Usage(String),
}

pub fn exit_code(status: Status) -> i32 {
    match status {
        Status::Pass => EXIT_PASS,
        Status::Fail => EXIT_COUNTEREXAMPLE,
        Status::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

pub fn run(cfg: &RunConfig) -> Outcome {
    let result = match cfg.command {
        Command::Eval => commands::eval(cfg),
        Command::Adjoin => commands::adjoin(cfg),
        Command::CheckAllegory => commands::check_allegory(cfg),
        Command::Booleanize => commands::booleanize(cfg),
        Command::Selftest => Ok(commands::selftest(cfg)),
    };
    match result {
        Ok((code, report)) => Outcome {
            code,
            report: report.render(cfg.format),
        },
        Err(e) => {
            let mut report = Report::new();
            report.section("input error");
            report.info("error", e.to_string());
            Outcome {
                code: EXIT_INPUT,
                report: report.render(cfg.format),
            }
        }
    }
}

const SIERPINSKI_OBJECTS: &str = "
[index]
stages: 0 1
0 -> 1 : u

[object y0]
0: *

[object y1]
0: u
1: id

[object F]
0: r
1: p q
";

const FINSET_OBJECTS: &str = "
[object one]
*: a

[object two]
*: a b

[object three]
*: a b c
";

/// Built-in toposes with a few named objects.
pub fn builtin(name: &str) -> Result<ToposFile, InputError> {
    let (topos, src) = match name.to_ascii_lowercase().as_str() {
        "finset" => (Topos::finset(), FINSET_OBJECTS),
        "sierpinski" => (Topos::sierpinski(), SIERPINSKI_OBJECTS),
        _ => return Err(InputError::UnknownBuiltin(name.into())),
    };
    let parsed = parse_topos(src).map_err(|source| InputError::Parse {
        path: format!("<builtin {name}>"),
        source,
    })?;
    let mut file = parsed;
    // same index category; share the built-in topos and its name
    file.topos = topos;
    Ok(file)
}

pub fn load_file(path: &PathBuf) -> Result<ToposFile, InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| InputError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_topos(&text).map_err(|source| InputError::Parse {
        path: path.display().to_string(),
        source,
    })
}

pub fn load(source: &Source) -> Result<ToposFile, InputError> {
    match source {
        Source::Builtin(name) => builtin(name),
        Source::File(path) => load_file(path),
    }
}

/// A path argument naming an existing file, or else a built-in name.
pub fn source_of(arg: &str) -> Source {
    let path = PathBuf::from(arg);
    if path.exists() || arg.contains('/') || arg.contains('.') {
        Source::File(path)
    } else {
        Source::Builtin(arg.into())
    }
}
