//! Numerical laboratory for boundedness properties of operators on graded
//! sequence spaces, and for evaluating the semigroups those operators
//! generate through truncated exponential series with certified error bounds.
//!
//! The crate is organised as a pipeline:
//!
//! * [`seqspace`] — weight matrices, graded seminorms, and coefficient
//!   vectors with decay envelopes;
//! * [`operators`] — diagonal and Taylor-coefficient differentiation
//!   operators, with window scans for optimal domination constants;
//! * [`mu`] — log-domain growth-constant sequences, series summation with
//!   certified truncation tails, and the root-test radius estimate;
//! * [`classifier`] — certificates and refutations for the boundedness
//!   hierarchy, the implication closure between conditions, and the
//!   kernel-chain construction of sparse diagonal counterexamples;
//! * [`semigroup`] — truncated exponential-series evaluation, piecewise
//!   composition beyond the certified horizon, and the semigroup-law /
//!   generator / continuity verifications;
//! * [`models`] — disc/plane Taylor-coefficient models and the periodic
//!   smooth-function model with closed-form derivative norms;
//! * [`report`] — line-delimited classification records and merging.
//!
//! All numeric code is generic over [`scalar::Scalar`] (`f32` or `f64`);
//! the aliases at the crate root fix `f64`, the precision at which the
//! documented tolerances hold.

pub mod classifier;
pub mod expr;
pub mod logdomain;
pub mod models;
pub mod mu;
pub mod operators;
pub mod report;
pub mod scalar;
pub mod semigroup;
pub mod seqspace;

pub use scalar::Scalar;

/// Default-precision aliases (`f64`).
pub type KotheMatrix = seqspace::KotheMatrix<f64>;
pub type SpaceDescriptor = seqspace::SpaceDescriptor<f64>;
pub type CoefficientVector = seqspace::CoefficientVector<f64>;
pub type SeminormValue = seqspace::SeminormValue<f64>;
pub type DiagonalOperator = operators::DiagonalOperator<f64>;
pub type Operator = operators::Operator<f64>;
pub type DominationWitness = operators::DominationWitness<f64>;
pub type LogMuSequence = mu::LogMuSequence<f64>;
pub type SeriesValue = mu::SeriesValue<f64>;
pub type Certificate = classifier::Certificate<f64>;
pub type Refutation = classifier::Refutation<f64>;
pub type Verdict = classifier::Verdict<f64>;
pub type EvaluationPlan = semigroup::EvaluationPlan<f64>;
pub type TruncatedSemigroupValue = semigroup::TruncatedSemigroupValue<f64>;
pub type TaylorFunction = models::TaylorFunction<f64>;
pub type TrigPolynomial = models::TrigPolynomial<f64>;
