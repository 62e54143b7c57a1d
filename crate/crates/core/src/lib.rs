//! Cesàro and Copson operators on step functions, their K-functionals and
//! real-interpolation norms, with certificates.

// `!(x > a)` guards reject NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod funcore;
pub mod interp;
pub mod kfun;
pub mod norms;
pub mod operators;

pub use error::{Error, Result};
