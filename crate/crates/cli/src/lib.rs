//! Command-line front end: argument parsing lives in [`args`], each subcommand in
//! `commands`. [`run`] returns the text to print and the exit status, so the tests drive it
//! without spawning processes.

pub mod args;
mod commands;
mod input;
mod render;

use serde_json::{json, Value};

use args::{Cli, Command};
use hwcong::{Budget, Error};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NOT_INVERTIBLE: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Library(Error),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Library(e) => match e {
                Error::NotInvertibleModP(_) => EXIT_NOT_INVERTIBLE,
                Error::Budget { .. } => EXIT_BUDGET,
                Error::CheckFailed(_)
                | Error::Integrability { .. }
                | Error::InconsistentCounts(_) => EXIT_CHECK_FAILED,
                _ => EXIT_USAGE,
            },
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Library(e) => match e {
                Error::NotInvertibleModP(_) => "not_invertible",
                Error::Budget { .. } => "budget",
                Error::Syntax { .. }
                | Error::UnknownIdentifier { .. }
                | Error::NonIntegerExponent { .. } => "parse",
                Error::Json(_) => "json",
                _ => "invalid_input",
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Library(e) => write!(f, "{e}"),
        }
    }
}

/// What a subcommand produced before the exit status is decided.
pub(crate) struct Output {
    pub json: Value,
    pub text: String,
    pub hard_failures: usize,
    pub soft_failures: usize,
}

impl Output {
    pub fn new(json: Value, text: String) -> Self {
        Output {
            json,
            text,
            hard_failures: 0,
            soft_failures: 0,
        }
    }
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Hw(_) => "hw",
        Command::Verify(_) => "verify",
        Command::Limits(_) => "limits",
        Command::Fgl(_) => "fgl",
        Command::Zeta(_) => "zeta",
        Command::Corpus(_) => "corpus",
    }
}

pub(crate) fn budget(cli: &Cli) -> Result<Budget, CliError> {
    let d = Budget::default();
    let b = Budget {
        max_terms: cli.max_terms.unwrap_or(d.max_terms),
        max_work: cli.budget.unwrap_or(d.max_work),
    };
    if b.max_terms == 0 || b.max_work == 0 {
        return Err(CliError::Usage("budgets must be positive".into()));
    }
    Ok(b)
}

/// Exit status after checks ran: soft failures count only under `--strict`.
pub fn check_status(hard_failures: usize, soft_failures: usize, strict: bool) -> i32 {
    if hard_failures > 0 || (strict && soft_failures > 0) {
        EXIT_CHECK_FAILED
    } else {
        EXIT_OK
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let name = command_name(&cli.command);
    let result = match &cli.command {
        Command::Hw(a) => commands::hw(cli, a),
        Command::Verify(a) => commands::verify(cli, a),
        Command::Limits(a) => commands::limits(cli, a),
        Command::Fgl(a) => commands::fgl(cli, a),
        Command::Zeta(a) => commands::zeta(cli, a),
        Command::Corpus(a) => commands::corpus(cli, a),
    };
    match result {
        Ok(out) => {
            let code = check_status(out.hard_failures, out.soft_failures, cli.strict);
            let failed = code != EXIT_OK;
            let stdout = if cli.json {
                let mut v = out.json;
                v["command"] = json!(name);
                v["exit_code"] = json!(code);
                v["status"] = json!(if failed { "fail" } else { "pass" });
                to_json_text(&v)
            } else {
                out.text
            };
            Outcome {
                code,
                stdout,
                stderr: String::new(),
            }
        }
        Err(e) => {
            let code = e.exit_code();
            let stdout = if cli.json {
                to_json_text(&json!({
                    "command": name,
                    "exit_code": code,
                    "status": "error",
                    "error": {"kind": e.kind(), "message": e.to_string()},
                }))
            } else {
                String::new()
            };
            Outcome {
                code,
                stdout,
                stderr: format!("error: {e}\n"),
            }
        }
    }
}

fn to_json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}
