//! Library surface of the experiment driver: configuration, runners, file
//! emission, and the validation suites. The `entherm` binary is a thin
//! argument-parsing layer over these modules.

// Domain guards use negated comparisons (`!(x > 0.0)`) so NaN inputs fail them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod config;
pub mod csvout;
pub mod gnuplot;
pub mod runner;
