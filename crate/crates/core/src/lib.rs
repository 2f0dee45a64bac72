//! Numerics for mappings of the punctured unit ball: dilatations, spherical
//! means of majorants, the divergent-integral removability criterion, finite
//! mean oscillation and moduli of ring and sphere families.

// guards like `!(x > 0.0)` deliberately reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod criterion;
pub mod differential;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod linalg;
pub mod maps;
pub mod modulus;
pub mod numeric;

use serde::{Deserialize, Serialize};

pub use error::{Error, Result};

/// How a reported number was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Closed form or asymptotic rule.
    Symbolic,
    Quadrature,
    /// Independent reference computation.
    Oracle,
}
