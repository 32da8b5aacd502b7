// `!(a < b)` is deliberate throughout: NaN must take the failing branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod canned;
pub mod cli;
pub mod csvfmt;
pub mod error;
pub mod gbdt;
pub mod matlin;
pub mod quad;
pub mod scenario;
pub mod seed;
pub mod solutions;
pub mod verify;
pub mod weyl;
