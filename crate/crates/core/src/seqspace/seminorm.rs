//! Seminorm evaluation with certified absolute error.
//!
//! The value is accumulated over a probe window; everything beyond the window
//! is controlled by a closed-form tail bound built from the column growth
//! bound of the matrix and the decay envelope of the vector.  The window is
//! doubled until the certified error meets the requested tolerance.

use thiserror::Error;

use super::matrix::{KotheMatrix, MatrixError};
use super::vector::{CoefficientVector, Envelope, Index, VectorError};
use super::SeminormIndex;
use crate::logdomain::{log_add_exp, CompensatedSum};
use crate::scalar::Scalar;

/// Summation order of the seminorm family: `ℓ^r` with `r ≥ 1`, or the sup
/// norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LrOrder {
    Finite(f64),
    Infinity,
}

/// A weight matrix together with a summation order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceDescriptor<T> {
    pub matrix: KotheMatrix<T>,
    pub order: LrOrder,
}

/// A seminorm value with a certified absolute error: the true value lies in
/// `[value, value + abs_error]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeminormValue<T> {
    pub value: T,
    pub abs_error: T,
    pub index: SeminormIndex<T>,
}

impl<T: Scalar> SeminormValue<T> {
    pub fn upper(&self) -> T {
        self.value + self.abs_error
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SeminormError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Vector(#[from] VectorError),
    #[error("summation order must be a finite r ≥ 1 (got {0})")]
    BadOrder(f64),
    #[error("seminorm k={k} diverges: unbounded term at j={j}")]
    Divergent { k: u32, j: Index },
    #[error("no certified tail bound for seminorm k={k}: {detail}")]
    TailNotCertifiable { k: u32, detail: String },
    #[error(
        "window cap reached for seminorm k={k}: value ≥ {value:e} with residual error {abs_error:e}"
    )]
    PrecisionLimit { k: u32, value: f64, abs_error: f64 },
}

impl<T: Scalar> SpaceDescriptor<T> {
    pub fn new(matrix: KotheMatrix<T>, order: LrOrder) -> Result<Self, SeminormError> {
        if let LrOrder::Finite(r) = order {
            if !(r >= 1.0) || !r.is_finite() {
                return Err(SeminormError::BadOrder(r));
            }
        }
        Ok(SpaceDescriptor { matrix, order })
    }

    /// All-sequences space graded by coordinate windows, sup order.
    pub fn omega_sup() -> Self {
        SpaceDescriptor {
            matrix: KotheMatrix::omega(),
            order: LrOrder::Infinity,
        }
    }

    /// Rapidly decreasing sequences, sup order.
    pub fn rapid_decay_sup() -> Self {
        SpaceDescriptor {
            matrix: KotheMatrix::rapid_decay(),
            order: LrOrder::Infinity,
        }
    }

    /// Rapidly decreasing sequences, ℓ¹ order.
    pub fn rapid_decay_l1() -> Self {
        SpaceDescriptor {
            matrix: KotheMatrix::rapid_decay(),
            order: LrOrder::Finite(1.0),
        }
    }
}

/// Parameters of a pointwise bound `exp(log_c) · j^degree · exp(log_base)^j`
/// on the seminorm terms beyond the probe window.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TailParams<T> {
    pub log_c: T,
    pub degree: T,
    pub log_base: T,
}

pub(crate) enum TailOutcome<T> {
    /// `ln` of a certified bound.
    Bounded(T),
    /// The bound only kicks in for a larger window.
    GrowWindow,
    /// No polynomial-geometric tail control exists for these parameters.
    Unbounded,
}

impl<T: Scalar> TailParams<T> {
    fn log_term(&self, u: T) -> T {
        self.log_c + self.degree * u.ln() + u * self.log_base
    }

    /// `ln sup_{j ≥ beyond}` of the bound.
    pub(crate) fn sup_tail(&self, beyond: Index) -> TailOutcome<T> {
        let l = self.log_base;
        let m = self.degree;
        if l > T::zero() || (l == T::zero() && m > T::zero()) {
            return TailOutcome::Unbounded;
        }
        let b = T::of_u64(beyond);
        if l == T::zero() {
            // m ≤ 0: nonincreasing.
            return TailOutcome::Bounded(self.log_term(b));
        }
        // l < 0: single interior peak at u* = -m/l when m > 0.
        let peak = if m > T::zero() { -m / l } else { T::zero() };
        if b >= peak {
            TailOutcome::Bounded(self.log_term(b))
        } else {
            TailOutcome::Bounded(self.log_term(peak))
        }
    }

    /// `ln Σ_{j ≥ beyond}` of the bound.
    pub(crate) fn sum_tail(&self, beyond: Index) -> TailOutcome<T> {
        let l = self.log_base;
        let m = self.degree;
        let b = T::of_u64(beyond);
        if l < T::zero() {
            // Ratio of consecutive bound terms for j ≥ beyond is at most
            // exp(l) · (1 + 1/beyond)^max(m,0).
            let log_rho = l + m.max(T::zero()) * (T::one() / b).ln_1p();
            if log_rho >= T::zero() {
                return TailOutcome::GrowWindow;
            }
            let rho = log_rho.exp();
            return TailOutcome::Bounded(self.log_term(b) - (T::one() - rho).ln());
        }
        if l == T::zero() && m < -T::one() {
            // Σ_{j ≥ b} j^m ≤ b^m + ∫_b^∞ t^m dt for decreasing j^m.
            let head = m * b.ln();
            let integral = (m + T::one()) * b.ln() - (-m - T::one()).ln();
            return TailOutcome::Bounded(self.log_c + log_add_exp(head, integral));
        }
        TailOutcome::Unbounded
    }
}

const DEFAULT_WINDOW_CAP: Index = 1 << 20;

/// Evaluate `‖x‖_k` with certified absolute error at most `tol` (or exact
/// with `abs_error = 0` when the window provably captures everything).
pub fn seminorm<T: Scalar>(
    space: &SpaceDescriptor<T>,
    x: &CoefficientVector<T>,
    k: u32,
    tol: T,
) -> Result<SeminormValue<T>, SeminormError> {
    seminorm_capped(space, x, k, tol, DEFAULT_WINDOW_CAP)
}

/// [`seminorm`] with an explicit probe-window cap.
pub fn seminorm_capped<T: Scalar>(
    space: &SpaceDescriptor<T>,
    x: &CoefficientVector<T>,
    k: u32,
    tol: T,
    window_cap: Index,
) -> Result<SeminormValue<T>, SeminormError> {
    let index = SeminormIndex::Column(k);
    let support = match (x.support_end(), space.matrix.column_support(k)) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };

    let mut acc = Accumulator::new(space.order);

    // Exact path: the window provably captures every nonzero term.  A
    // linear-domain pass keeps exactly representable values exact; on
    // overflow it falls back to the log-domain accumulator.
    if let Some(s) = support {
        if s <= window_cap {
            if let Some(value) = exact_linear(space, x, s, k)? {
                return Ok(SeminormValue {
                    value,
                    abs_error: T::zero(),
                    index,
                });
            }
            for j in 1..=s {
                acc.push(j, term_log(space, x, j, k)?)
                    .map_err(|j| SeminormError::Divergent { k, j })?;
            }
            return Ok(SeminormValue {
                value: acc.value(),
                abs_error: T::zero(),
                index,
            });
        }
    }

    // Tail-certified path: combine the column growth bound with the decay
    // envelope.
    let Envelope::Decay { c, degree, base } = x.envelope() else {
        return Err(SeminormError::PrecisionLimit {
            k,
            value: f64::NAN,
            abs_error: f64::INFINITY,
        });
    };
    let growth = space.matrix.column_growth(k, window_cap.min(1 << 17))?;
    let params = TailParams {
        log_c: growth.log_c + c.ln(),
        degree: growth.degree + degree,
        log_base: base.ln(),
    };

    let mut window: Index = 64;
    let mut next_j: Index = 1;
    loop {
        for j in next_j..=window {
            acc.push(j, term_log(space, x, j, k)?)
                .map_err(|j| SeminormError::Divergent { k, j })?;
        }
        next_j = window + 1;

        let (value, abs_error, done) = match acc.order {
            LrOrder::Infinity => match params.sup_tail(window + 1) {
                TailOutcome::Bounded(log_sup) => {
                    let v = acc.value_log();
                    if log_sup <= v {
                        (v.exp(), T::zero(), true)
                    } else {
                        (v.exp(), log_sup.exp(), log_sup.exp() <= tol)
                    }
                }
                TailOutcome::GrowWindow => (acc.value(), T::infinity(), false),
                TailOutcome::Unbounded => {
                    return Err(SeminormError::TailNotCertifiable {
                        k,
                        detail: format!(
                            "sup tail grows: degree {} with log base {}",
                            params.degree, params.log_base
                        ),
                    })
                }
            },
            LrOrder::Finite(r) => {
                let rr = T::of(r);
                let scaled = TailParams {
                    log_c: params.log_c * rr,
                    degree: params.degree * rr,
                    log_base: params.log_base * rr,
                };
                match scaled.sum_tail(window + 1) {
                    TailOutcome::Bounded(log_tail) => {
                        let s = acc.sum();
                        let v = s.powf(T::one() / rr);
                        let upper = (s + log_tail.exp()).powf(T::one() / rr);
                        let err = upper - v;
                        (v, err, err <= tol)
                    }
                    TailOutcome::GrowWindow => (acc.value(), T::infinity(), false),
                    TailOutcome::Unbounded => {
                        return Err(SeminormError::TailNotCertifiable {
                            k,
                            detail: format!(
                                "power-sum tail grows: degree {} with log base {}",
                                params.degree, params.log_base
                            ),
                        })
                    }
                }
            }
        };

        if done {
            return Ok(SeminormValue {
                value,
                abs_error,
                index,
            });
        }
        if window >= window_cap {
            return Err(SeminormError::PrecisionLimit {
                k,
                value: value.to_f64().unwrap_or(f64::NAN),
                abs_error: abs_error.to_f64().unwrap_or(f64::INFINITY),
            });
        }
        window = (window * 2).min(window_cap);
    }
}

/// Window-restricted seminorm of explicitly materialised coordinates: no tail
/// term, used for residual diagnostics on evaluation windows.
pub(crate) fn window_seminorm<T: Scalar>(
    space: &SpaceDescriptor<T>,
    values: &[T],
    k: u32,
) -> Result<T, SeminormError> {
    let mut acc = Accumulator::new(space.order);
    for (i, &v) in values.iter().enumerate() {
        let j = i as Index + 1;
        let lb = space.matrix.log_entry(j, k)?;
        acc.push(j, lb + v.abs().ln())
            .map_err(|j| SeminormError::Divergent { k, j })?;
    }
    Ok(acc.value())
}

/// Linear-domain evaluation over a complete support window.  Returns `None`
/// when any intermediate overflows, signalling a log-domain retry.
fn exact_linear<T: Scalar>(
    space: &SpaceDescriptor<T>,
    x: &CoefficientVector<T>,
    support: Index,
    k: u32,
) -> Result<Option<T>, SeminormError> {
    let mut max = T::zero();
    let mut sum = CompensatedSum::new();
    for j in 1..=support {
        let t = space.matrix.entry(j, k)? * x.coeff(j)?.abs();
        if !t.is_finite() {
            return Ok(None);
        }
        match space.order {
            LrOrder::Infinity => max = max.max(t),
            LrOrder::Finite(r) => sum.add(t.powf(T::of(r))),
        }
    }
    let value = match space.order {
        LrOrder::Infinity => max,
        LrOrder::Finite(r) => sum.value().powf(T::one() / T::of(r)),
    };
    Ok(value.is_finite().then_some(value))
}

fn term_log<T: Scalar>(
    space: &SpaceDescriptor<T>,
    x: &CoefficientVector<T>,
    j: Index,
    k: u32,
) -> Result<T, SeminormError> {
    let lb = space.matrix.log_entry(j, k)?;
    let lx = x.log_abs_coeff(j)?;
    Ok(lb + lx)
}

struct Accumulator<T> {
    order: LrOrder,
    max_log: T,
    sum: CompensatedSum<T>,
}

impl<T: Scalar> Accumulator<T> {
    fn new(order: LrOrder) -> Self {
        Accumulator {
            order,
            max_log: T::neg_infinity(),
            sum: CompensatedSum::new(),
        }
    }

    /// Push `ln` of one term `b_{j,k}|x_j|`.  Returns `Err(j)` on an infinite
    /// term (divergent seminorm).
    fn push(&mut self, j: Index, log_term: T) -> Result<(), Index> {
        if log_term == T::infinity() {
            return Err(j);
        }
        match self.order {
            LrOrder::Infinity => self.max_log = self.max_log.max(log_term),
            LrOrder::Finite(r) => {
                // NaN from (-∞)·0 cannot occur: log_term -∞ gives exp -∞·r = 0.
                let t = (log_term * T::of(r)).exp();
                self.sum.add(t);
            }
        }
        Ok(())
    }

    fn value_log(&self) -> T {
        self.max_log
    }

    fn sum(&self) -> T {
        self.sum.value()
    }

    fn value(&self) -> T {
        match self.order {
            LrOrder::Infinity => self.max_log.exp(),
            LrOrder::Finite(r) => self.sum.value().powf(T::one() / T::of(r)),
        }
    }
}
