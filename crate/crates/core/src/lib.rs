//! Linear-time quantum 2-SAT with exact algebraic arithmetic.

pub mod families;
pub mod fieldarith;
pub mod model;
pub mod oracle;
pub mod preprocess;
pub mod solver;
pub mod transfer;
