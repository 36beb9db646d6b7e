//! Exact arithmetic over a number field `Q[w]` and towers of possibly
//! redundant quadratic extensions.
//!
//! Nothing here decides whether an adjoined square root already lies in
//! the field below it. Equality stays exact regardless: the zero test
//! reduces along the tower and settles the one ambiguous case with a
//! certified numeric enclosure.

mod counter;
mod element;
mod field;
mod interval;
mod isqrt;
mod normalize;
mod tower;


use thiserror::Error;

pub use counter::{field_ops, reduce_threshold, set_reduce_threshold};
pub use element::{
    adjoin_sqrt, level_spec, parse_level_spec, ComplexBox, FieldElement, SqrtResult,
};
pub use field::{Conjugation, NumberField, RationalBox, MAX_DEGREE, MAX_SPEC_BITS};
pub use isqrt::{isqrt_ceil, isqrt_exact, isqrt_floor};
pub use normalize::{
    inner_product, normalize_vector, normalize_vector_cached, with_conjugation, NormCache,
};
pub use tower::{RootKind, TowerLevel, MAX_TOWER_DEPTH};

#[allow(unused_imports)]
pub(crate) use field::{format_rational, parse_rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("invalid field specification: {0}")]
    InvalidSpec(String),
    #[error("elements live in incompatible towers")]
    IncompatibleTowers,
    #[error("division by zero")]
    DivisionByZero,
    #[error("tower depth would exceed {0}")]
    TowerTooDeep(usize),
    #[error("complex conjugation is not available in this tower")]
    ConjugationUnsupported,
    #[error("could not certify the branch of a square root")]
    BranchUndecided,
    #[error("cannot normalize the zero vector")]
    ZeroVector,
    #[error("{0}")]
    Parse(String),
}

pub fn fe_add(a: &FieldElement, b: &FieldElement) -> FieldElement {
    a + b
}

pub fn fe_mul(a: &FieldElement, b: &FieldElement) -> FieldElement {
    a * b
}

pub fn fe_eq(a: &FieldElement, b: &FieldElement) -> bool {
    a.fe_eq(b)
}

pub fn numeric_box(a: &FieldElement, precision_bits: u32) -> ComplexBox {
    a.numeric_box(precision_bits)
}
