//! Pair correlation of nontrivial zeta zeros without assuming the Riemann
//! Hypothesis: empirical F(x, T) over zero tables, Tsang-type kernels,
//! simple-zero proportion bounds and explicit-formula residual checks.

// `!(a > b)` is used on purpose so that NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod explicit_formula;
pub mod kernels;
pub mod pair_correlation;
pub mod quadrature;
pub mod simple_zeros;
pub mod summation;
pub mod theory_utils;
pub mod zero_table;

pub use error::{Error, Result};

/// Serializes a complex number as `[re, im]`.
pub(crate) fn serde_complex<S: serde::Serializer>(
    z: &num_complex::Complex64,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}
