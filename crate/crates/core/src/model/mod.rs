//! Instances, the interaction graph, assignments, file formats and instance
//! generators.

mod assignment;
mod cnf;
mod generators;
mod graph;
mod instance;

use thiserror::Error;

use crate::fieldarith::FieldError;

pub use assignment::{Assignment, PairState};
pub use cnf::{embed_cnf, Cnf};
pub use generators::{gen_lowerbound_chain, gen_lowerbound_full, random_instance, RandomSpec};
pub use graph::InteractionGraph;
pub use instance::{Constraint, Instance};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: {source}")]
    Field { line: usize, source: FieldError },
    #[error("line {line}: qubit index {index} out of range for {n} qubits")]
    IndexOutOfRange { line: usize, index: usize, n: usize },
    #[error("qubit index {index} out of range for {n} qubits")]
    QubitOutOfRange { index: usize, n: usize },
    #[error("constraint acts twice on qubit {0}")]
    SelfLoop(usize),
    #[error("constraint vector is zero")]
    ZeroConstraint,
    #[error("constraint coefficients must lie in the base field")]
    NotBaseField,
    #[error("clause {index}: {message}")]
    Clause { index: usize, message: String },
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error(transparent)]
    Arith(#[from] FieldError),
}

pub(crate) fn syntax(line: usize, column: usize, message: impl Into<String>) -> ModelError {
    ModelError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

/// Splits a line into whitespace-separated tokens with their 1-based columns,
/// dropping a trailing `#` comment.
pub(crate) fn tokens(line: &str) -> Vec<(usize, &str)> {
    let body = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in body.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &body[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &body[s..]));
    }
    out
}
