//! Concrete function-space models behind the sequence-space machinery.
//!
//! Two families: holomorphic functions represented by Taylor coefficients
//! ([`hd`]), graded by circle sup norms, and zero-mean trigonometric
//! polynomials ([`trig`]), graded by derivative sup norms on a compact
//! interval.  Both provide the closed-form norm formulas, exact group
//! actions (shift, translation), and explicit divergence witnesses that the
//! classifier and the series evaluator build on.

mod hd;
mod trig;

pub use hd::{
    cauchy_mu, divergence_witness, hd_seminorm, taylor_shift, DivergenceWitness,
    TaylorFunction,
};
pub use trig::{
    cinfty_refutation, trig_norm, trig_norm_grid, CinftyRefutation,
    CompactSeminormIndex, FrequencyWitness, TrigInterval, TrigMode, TrigNormValue,
    TrigPhase, TrigPolynomial,
};

use thiserror::Error;

use crate::seqspace::VectorError;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("{0}")]
    BadParams(String),
    #[error("evaluation radius {q} is outside the open disc of holomorphy (0, {radius})")]
    BadRadius { q: f64, radius: f64 },
    #[error("requested tolerance unreachable: best certified error {achieved:e}")]
    TolUnreachable { achieved: f64 },
    #[error(transparent)]
    Vector(#[from] VectorError),
}
