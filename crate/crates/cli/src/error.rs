use thiserror::Error;

use crate::config::Command;

fn at(line: &Option<usize>) -> String {
    match line {
        Some(l) => format!("line {l}: "),
        None => String::new(),
    }
}

fn for_command(c: &Option<Command>) -> String {
    match c {
        Some(c) => format!(" (required by {c})"),
        None => String::new(),
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("{}{msg}", at(line))]
    Syntax { line: Option<usize>, msg: String },
    #[error("{}unknown key `{key}`", at(line))]
    UnknownKey { key: String, line: Option<usize> },
    #[error("missing field `{field}`{}", for_command(command))]
    MissingField {
        field: &'static str,
        command: Option<Command>,
    },
    #[error("{}invalid value `{value}` for `{key}`: {reason}", at(line))]
    InvalidValue {
        key: &'static str,
        value: String,
        reason: String,
        line: Option<usize>,
    },
    #[error(transparent)]
    Core(#[from] a12::Error),
    #[error("{0}")]
    Io(String),
}
