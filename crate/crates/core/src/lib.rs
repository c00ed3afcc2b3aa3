//! Effective hyperbolicity of double characteristics for second-order
//! symbols `p = -tau^2 + a(t, x, xi)` that are hyperbolic only for `t >= 0`,
//! with construction and numerical certification of the associated time
//! functions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod linalg;
pub mod normal_form;
pub mod numeric;
pub mod spectral;
pub mod symbolic;
pub mod time_function;
pub mod verifier;

pub use error::{Error, Result};
