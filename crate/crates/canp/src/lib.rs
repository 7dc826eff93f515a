//! Fock-space oracle, experiment driver and file formats for `canp-core`.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod experiments;
pub mod fock;
pub mod output;
pub mod validate;
