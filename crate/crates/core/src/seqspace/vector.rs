//! Coefficient vectors: closed-form coefficient rules paired with a decay
//! envelope that certifies tail behaviour beyond any probed window.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::matrix::probe_indices;
use crate::expr::{Env, EvalError, Expr, Var};
use crate::operators::DiagonalSymbol;
use crate::scalar::Scalar;

/// Row index into a sequence; rows are numbered from 1.
pub type Index = u64;

#[derive(Debug, Error, PartialEq)]
pub enum VectorError {
    #[error("coefficient rule uses variable {0:?}; only j is allowed")]
    ForbiddenVariable(Var),
    #[error("coefficient at j={j} failed to evaluate: {source}")]
    Coeff { j: Index, source: EvalError },
    #[error("geometric ratio must be positive (got {0})")]
    BadRatio(f64),
    #[error(
        "declared envelope violated at j={j}: |x_j| = {value:e} exceeds the bound {bound:e}"
    )]
    EnvelopeViolation { j: Index, value: f64, bound: f64 },
    #[error("row index j must be ≥ 1")]
    BadRow,
}

/// A certified pointwise bound on the coefficients.
///
/// `Decay` asserts `|x_j| ≤ c · j^degree · base^j` for every `j ≥ 1`.
/// `FiniteSupport` asserts `x_j = 0` for `j > last` and nothing about
/// magnitudes (window computations read those directly).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Envelope<T> {
    Decay { c: T, degree: T, base: T },
    FiniteSupport { last: Index },
}

impl<T: Scalar> Envelope<T> {
    /// `ln` of the envelope bound at `j`; `+∞` inside a finite support
    /// (no magnitude claim), `-∞` beyond it.
    pub fn log_bound(&self, j: Index) -> T {
        match *self {
            Envelope::Decay { c, degree, base } => {
                let lj = T::of_u64(j).ln();
                c.ln() + degree * lj + T::of_u64(j) * base.ln()
            }
            Envelope::FiniteSupport { last } => {
                if j <= last {
                    T::infinity()
                } else {
                    T::neg_infinity()
                }
            }
        }
    }

    /// Envelope after multiplying the vector by `exp(log_c_add) · j^degree_add
    /// · exp(log_base_add)^j` coefficientwise.  Finite supports are unchanged.
    pub fn scaled_by(self, log_c_add: T, degree_add: T, log_base_add: T) -> Envelope<T> {
        match self {
            Envelope::Decay { c, degree, base } => Envelope::Decay {
                c: c * log_c_add.exp(),
                degree: degree + degree_add,
                base: base * log_base_add.exp(),
            },
            fs @ Envelope::FiniteSupport { .. } => fs,
        }
    }

    /// Envelope after one coefficient-shift differentiation step applied
    /// `order` times: `y_j = j(j+1)⋯(j+order-1) · x_{j+order}`.
    pub fn differentiated(self, order: u32) -> Envelope<T> {
        match self {
            Envelope::Decay { c, degree, base } => {
                let n = T::of_u32(order);
                // (j+n)^(n + max(degree,0)) ≤ (1+n)^(n+max(degree,0)) · j^(...)
                let bump = (T::one() + n).powf(n + degree.max(T::zero()));
                Envelope::Decay {
                    c: c * base.powf(n) * bump,
                    degree: degree + n,
                    base,
                }
            }
            Envelope::FiniteSupport { last } => Envelope::FiniteSupport {
                last: last.saturating_sub(order as Index),
            },
        }
    }
}

/// Closed-form coefficient rules.  The operator-applied wrappers (`Scaled`,
/// `Differentiated`, `ExpScaled`) keep images in closed form so coefficients
/// can be read at any index without materialising.
#[derive(Debug, Clone, PartialEq)]
pub enum CoeffRule<T> {
    /// The unit vector `e_{j0}`.
    Unit { j0: Index },
    /// The all-ones sequence.
    Ones,
    /// `x_j = ratio^j` with `ratio > 0`.
    Geometric { ratio: T },
    /// Coefficients from an expression in `j`.
    Expr(Expr),
    /// Explicit values for `x_1, …, x_len`; zero beyond.
    Finite(Vec<T>),
    /// `x_j = a(j)^power · base_j` for a diagonal symbol `a`.
    Scaled {
        base: Box<CoeffRule<T>>,
        symbol: DiagonalSymbol<T>,
        power: u32,
    },
    /// `x_j = j(j+1)⋯(j+order-1) · base_{j+order}` (Taylor-coefficient
    /// differentiation applied `order` times).
    Differentiated { base: Box<CoeffRule<T>>, order: u32 },
    /// `x_j = exp(t·a(j)) · base_j` — closed-form diagonal semigroup image.
    ExpScaled {
        base: Box<CoeffRule<T>>,
        symbol: DiagonalSymbol<T>,
        t: T,
    },
}

impl<T: Scalar> CoeffRule<T> {
    pub fn coeff(&self, j: Index) -> Result<T, VectorError> {
        if j == 0 {
            return Err(VectorError::BadRow);
        }
        match self {
            CoeffRule::Unit { j0 } => Ok(if j == *j0 { T::one() } else { T::zero() }),
            CoeffRule::Ones => Ok(T::one()),
            CoeffRule::Geometric { ratio } => Ok((ratio.ln() * T::of_u64(j)).exp()),
            CoeffRule::Expr(e) => {
                let env = Env::new().with_j(T::of_u64(j));
                e.eval(&env).map_err(|source| VectorError::Coeff { j, source })
            }
            CoeffRule::Finite(v) => Ok(v
                .get((j - 1) as usize)
                .copied()
                .unwrap_or_else(T::zero)),
            CoeffRule::Scaled {
                base,
                symbol,
                power,
            } => {
                let a = symbol
                    .value(j)
                    .map_err(|source| VectorError::Coeff { j, source })?;
                Ok(a.powi(*power as i32) * base.coeff(j)?)
            }
            CoeffRule::Differentiated { base, order } => {
                let mut rising = T::one();
                for i in 0..*order {
                    rising *= T::of_u64(j + i as Index);
                }
                Ok(rising * base.coeff(j + *order as Index)?)
            }
            CoeffRule::ExpScaled { base, symbol, t } => {
                let a = symbol
                    .value(j)
                    .map_err(|source| VectorError::Coeff { j, source })?;
                Ok((*t * a).exp() * base.coeff(j)?)
            }
        }
    }

    /// `ln |x_j|` with `-∞` for a zero coefficient.  Stays in the log domain
    /// through scaling wrappers, so large powers do not overflow.
    pub fn log_abs_coeff(&self, j: Index) -> Result<T, VectorError> {
        if j == 0 {
            return Err(VectorError::BadRow);
        }
        match self {
            CoeffRule::Unit { j0 } => Ok(if j == *j0 {
                T::zero()
            } else {
                T::neg_infinity()
            }),
            CoeffRule::Ones => Ok(T::zero()),
            CoeffRule::Geometric { ratio } => Ok(ratio.ln() * T::of_u64(j)),
            CoeffRule::Expr(_) | CoeffRule::Finite(_) => Ok(self.coeff(j)?.abs().ln()),
            CoeffRule::Scaled {
                base,
                symbol,
                power,
            } => {
                let a = symbol
                    .value(j)
                    .map_err(|source| VectorError::Coeff { j, source })?;
                Ok(T::of_u32(*power) * a.abs().ln() + base.log_abs_coeff(j)?)
            }
            CoeffRule::Differentiated { base, order } => {
                let mut sum = base.log_abs_coeff(j + *order as Index)?;
                for i in 0..*order {
                    sum += T::of_u64(j + i as Index).ln();
                }
                Ok(sum)
            }
            CoeffRule::ExpScaled { base, symbol, t } => {
                let a = symbol
                    .value(j)
                    .map_err(|source| VectorError::Coeff { j, source })?;
                Ok(*t * a + base.log_abs_coeff(j)?)
            }
        }
    }

    /// `Some(j_last)` when the rule certifies `x_j = 0` beyond `j_last`.
    pub fn support_end(&self) -> Option<Index> {
        match self {
            CoeffRule::Unit { j0 } => Some(*j0),
            CoeffRule::Finite(v) => Some(v.len() as Index),
            CoeffRule::Scaled { base, .. } | CoeffRule::ExpScaled { base, .. } => {
                base.support_end()
            }
            CoeffRule::Differentiated { base, order } => base
                .support_end()
                .map(|last| last.saturating_sub(*order as Index)),
            _ => None,
        }
    }
}

/// A coefficient rule together with its certified envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector<T> {
    rule: CoeffRule<T>,
    envelope: Envelope<T>,
}

impl<T: Scalar> CoefficientVector<T> {
    pub fn unit(j0: Index) -> Self {
        CoefficientVector {
            rule: CoeffRule::Unit { j0 },
            envelope: Envelope::FiniteSupport { last: j0 },
        }
    }

    pub fn ones() -> Self {
        CoefficientVector {
            rule: CoeffRule::Ones,
            envelope: Envelope::Decay {
                c: T::one(),
                degree: T::zero(),
                base: T::one(),
            },
        }
    }

    pub fn geometric(ratio: T) -> Result<Self, VectorError> {
        if !(ratio > T::zero()) || !ratio.is_finite() {
            return Err(VectorError::BadRatio(ratio.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(CoefficientVector {
            rule: CoeffRule::Geometric { ratio },
            // ratio^j ≤ 1 · j^0 · ratio^j exactly.
            envelope: Envelope::Decay {
                c: T::one(),
                degree: T::zero(),
                base: ratio,
            },
        })
    }

    /// Expression rule with a caller-declared envelope.  The declaration is
    /// spot-checked by [`validate_envelope`](Self::validate_envelope).
    pub fn from_expr(expr: Expr, envelope: Envelope<T>) -> Result<Self, VectorError> {
        for v in expr.free_vars() {
            if v != Var::J {
                return Err(VectorError::ForbiddenVariable(v));
            }
        }
        Ok(CoefficientVector {
            rule: CoeffRule::Expr(expr),
            envelope,
        })
    }

    pub fn finite(values: Vec<T>) -> Self {
        let last = values.len() as Index;
        CoefficientVector {
            rule: CoeffRule::Finite(values),
            envelope: Envelope::FiniteSupport { last },
        }
    }

    pub(crate) fn from_parts(rule: CoeffRule<T>, envelope: Envelope<T>) -> Self {
        CoefficientVector { rule, envelope }
    }

    pub fn rule(&self) -> &CoeffRule<T> {
        &self.rule
    }

    pub fn envelope(&self) -> Envelope<T> {
        self.envelope
    }

    pub fn coeff(&self, j: Index) -> Result<T, VectorError> {
        self.rule.coeff(j)
    }

    pub fn log_abs_coeff(&self, j: Index) -> Result<T, VectorError> {
        self.rule.log_abs_coeff(j)
    }

    /// Smallest certified support end from the rule and the envelope, if any.
    pub fn support_end(&self) -> Option<Index> {
        let from_env = match self.envelope {
            Envelope::FiniteSupport { last } => Some(last),
            _ => None,
        };
        match (self.rule.support_end(), from_env) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    /// Spot-check the declared envelope: coefficient magnitudes at dense and
    /// log-spaced probe indices up to `j_window` must respect the bound, and
    /// a finite-support claim must see zeros beyond its end.
    pub fn validate_envelope(&self, j_window: Index) -> Result<(), VectorError> {
        match self.envelope {
            Envelope::Decay { .. } => {
                for j in probe_indices(j_window) {
                    let v = self.coeff(j)?.abs();
                    let bound = self.envelope.log_bound(j).exp();
                    if v > bound * T::of(1.0 + 1e-9) + T::of(1e-300) {
                        return Err(VectorError::EnvelopeViolation {
                            j,
                            value: v.to_f64().unwrap_or(f64::NAN),
                            bound: bound.to_f64().unwrap_or(f64::NAN),
                        });
                    }
                }
                Ok(())
            }
            Envelope::FiniteSupport { last } => {
                for j in [last + 1, last + 2, last + 17, 2 * last.max(1) + 1] {
                    let v = self.coeff(j)?;
                    if v != T::zero() {
                        return Err(VectorError::EnvelopeViolation {
                            j,
                            value: v.abs().to_f64().unwrap_or(f64::NAN),
                            bound: 0.0,
                        });
                    }
                }
                Ok(())
            }
        }
    }

    /// Pointwise sum; available when both sides carry explicit finite values.
    pub fn add(&self, other: &Self) -> Option<Self> {
        match (&self.rule, &other.rule) {
            (CoeffRule::Finite(a), CoeffRule::Finite(b)) => {
                let len = a.len().max(b.len());
                let mut out = vec![T::zero(); len];
                for (i, slot) in out.iter_mut().enumerate() {
                    let av = a.get(i).copied().unwrap_or_else(T::zero);
                    let bv = b.get(i).copied().unwrap_or_else(T::zero);
                    *slot = av + bv;
                }
                Some(CoefficientVector::finite(out))
            }
            _ => None,
        }
    }

    /// Coefficientwise scaling by a constant.
    pub fn scale(&self, factor: T) -> Self {
        match &self.rule {
            CoeffRule::Finite(v) => {
                CoefficientVector::finite(v.iter().map(|&x| x * factor).collect())
            }
            rule => CoefficientVector {
                rule: CoeffRule::Scaled {
                    base: Box::new(rule.clone()),
                    symbol: DiagonalSymbol::Constant(factor),
                    power: 1,
                },
                envelope: self.envelope.scaled_by(
                    factor.abs().ln(),
                    T::zero(),
                    T::zero(),
                ),
            },
        }
    }

    /// Materialise the first `window` coefficients.
    pub fn materialize(&self, window: Index) -> Result<Vec<T>, VectorError> {
        (1..=window).map(|j| self.coeff(j)).collect()
    }
}
