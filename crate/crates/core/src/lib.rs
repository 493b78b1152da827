//! Numerics for a two-dimensional magnetic double well.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod frozen;
pub mod hopping;
pub mod linalg;
pub mod model;
pub mod planar;
pub mod radial;
pub mod reduction;
pub mod specfun;

pub use error::{Error, Result};
