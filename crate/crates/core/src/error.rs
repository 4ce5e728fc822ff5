use thiserror::Error;

use crate::automaton::Diagnostic;
use crate::words::DataValue;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("data value {0} does not occur in the word")]
    ValueAbsent(DataValue),
    #[error("locally fresh operations are not supported here")]
    UnsupportedOp,
    #[error("symbolic word is not well-formed: register {register} is read at position {position} before being written")]
    NotWellFormed { position: usize, register: u32 },
    #[error("invalid automaton: {}", display_diagnostics(.0))]
    Invalid(Vec<Diagnostic>),
    #[error("automaton `{0}` is not a session automaton")]
    NotSessionAutomaton(String),
    #[error("label `{0}` is not in the alphabet")]
    UnknownLabel(String),
    #[error("observation table is not closed")]
    NotClosed,
    #[error("no break-point along counterexample {0}")]
    NoBreakpoint(String),
    #[error("teacher is inconsistent: {0}")]
    TeacherInconsistent(String),
    #[error("query budget of {0} exceeded")]
    QueryBudgetExceeded(usize),
    #[error("scripted teacher ran out of counterexamples")]
    ScriptExhausted,
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

fn display_diagnostics(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
