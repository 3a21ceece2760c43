//! Graded sequence spaces: weight matrices, coefficient vectors with decay
//! envelopes, and seminorm evaluation with certified truncation error.
//!
//! A weight matrix `B = (b_{j,k})` (nonnegative, nondecreasing in the grading
//! index `k`, every row eventually positive) induces the seminorm family
//!
//! ```text
//! ‖x‖_k = ( Σ_j (b_{j,k} |x_j|)^r )^{1/r}     (finite order r ≥ 1)
//! ‖x‖_k = sup_j b_{j,k} |x_j|                 (order ∞)
//! ```
//!
//! Vectors carry closed-form coefficient rules plus a decay envelope; the
//! envelope is what turns a window computation into a certified value with an
//! explicit `abs_error`.

mod matrix;
mod seminorm;
mod vector;

pub use matrix::{ContinuousNorm, Family, GrowthBound, KotheMatrix, MatrixError};
pub(crate) use matrix::probe_indices;
pub use seminorm::{seminorm, seminorm_capped, LrOrder, SeminormError, SeminormValue, SpaceDescriptor};
pub(crate) use seminorm::window_seminorm;
pub use vector::{CoeffRule, CoefficientVector, Envelope, Index, VectorError};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Scope of a numeric claim: exhaustively justified by a closed form, or
/// established on the probed window only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scope {
    ClosedForm,
    ProbedWindow,
}

impl Scope {
    /// The weaker of two scopes: any probed-window ingredient makes the
    /// combination probed-window.
    pub fn combine(self, other: Scope) -> Scope {
        if self == Scope::ClosedForm && other == Scope::ClosedForm {
            Scope::ClosedForm
        } else {
            Scope::ProbedWindow
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::ClosedForm => f.write_str("closed form"),
            Scope::ProbedWindow => f.write_str("probed window"),
        }
    }
}

/// Identifier of one seminorm in a graded family.
///
/// Column indices grade the sequence spaces; radii grade the disc/plane
/// Taylor models; derivative orders grade the periodic smooth model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SeminormIndex<T> {
    Column(u32),
    Radius(T),
    SupOrder(u32),
}

impl<T: Scalar> SeminormIndex<T> {
    pub fn column(self) -> Option<u32> {
        match self {
            SeminormIndex::Column(k) => Some(k),
            _ => None,
        }
    }

    pub fn radius(self) -> Option<T> {
        match self {
            SeminormIndex::Radius(r) => Some(r),
            _ => None,
        }
    }

    pub fn sup_order(self) -> Option<u32> {
        match self {
            SeminormIndex::SupOrder(p) => Some(p),
            _ => None,
        }
    }
}

impl<T: fmt::Display> fmt::Display for SeminormIndex<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeminormIndex::Column(k) => write!(f, "k={k}"),
            SeminormIndex::Radius(r) => write!(f, "r={r}"),
            SeminormIndex::SupOrder(p) => write!(f, "p={p}"),
        }
    }
}
