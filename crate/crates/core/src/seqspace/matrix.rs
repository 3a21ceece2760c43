//! Weight matrices `B = (b_{j,k})` over row index `j ≥ 1` and grading index
//! `k ≥ 1`, with window validation, continuous-norm detection, and certified
//! per-column growth bounds.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::vector::Index;
use super::Scope;
use crate::expr::{Env, EvalError, Expr, Var};
use crate::scalar::Scalar;

/// The built-in matrix families plus a custom entry formula.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Family {
    /// `b(j,k) = 1` if `j ≤ k`, else `0`: the space of all sequences, graded
    /// by coordinate windows.  Columns have finite support.
    Omega,
    /// `b(j,k) = j^k`: rapidly decreasing sequences.
    RapidDecay,
    /// Entries given by an expression in the variables `j` and `k`.
    Custom(Expr),
}

#[derive(Debug, Error, PartialEq)]
pub enum MatrixError {
    #[error("custom matrix entry uses variable {0:?}; only j and k are allowed")]
    ForbiddenVariable(Var),
    #[error("matrix entry at (j={j}, k={k}) failed to evaluate: {source}")]
    Entry {
        j: Index,
        k: u32,
        source: EvalError,
    },
    #[error("matrix entry at (j={j}, k={k}) is negative ({value}); entries must be nonnegative")]
    NegativeEntry { j: Index, k: u32, value: f64 },
    #[error(
        "matrix entry at (j={j}, k={k}) exceeds the entry at (j={j}, k={k_next}); \
         columns must be nondecreasing in k"
    )]
    NotMonotone { j: Index, k: u32, k_next: u32 },
    #[error("row j={j} is zero for every probed k ≤ {k_max}; each row must eventually be positive")]
    ZeroRow { j: Index, k_max: u32 },
    #[error("grading index k must be ≥ 1 (got {0})")]
    BadGrading(u32),
    #[error("row index j must be ≥ 1")]
    BadRow,
    #[error("no certified polynomial growth bound for column k={k} within degree {max_degree}")]
    GrowthUnbounded { k: u32, max_degree: u32 },
}

/// A certified column bound `b(j,k) ≤ c · j^degree` for all `j ≥ 1` (closed
/// form) or for all probed `j` (probed window).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthBound<T> {
    pub log_c: T,
    pub degree: T,
    pub scope: Scope,
}

/// Outcome of the continuous-norm test: is some column positive at every row?
#[derive(Debug, Clone, PartialEq)]
pub enum ContinuousNorm {
    /// Column `k0` is positive at every row (so `‖·‖_{k0}` is a norm).
    Certified { k0: u32, scope: Scope },
    /// Every probed column vanishes somewhere; one witness row per column.
    Refuted {
        zeros: Vec<(u32, Index)>,
        scope: Scope,
    },
}

/// A weight matrix with nonnegative entries, nondecreasing in the grading
/// index.  Generic over the scalar used for entry evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct KotheMatrix<T> {
    family: Family,
    _scalar: std::marker::PhantomData<T>,
}

impl<T: Scalar> KotheMatrix<T> {
    pub fn omega() -> Self {
        KotheMatrix {
            family: Family::Omega,
            _scalar: std::marker::PhantomData,
        }
    }

    pub fn rapid_decay() -> Self {
        KotheMatrix {
            family: Family::RapidDecay,
            _scalar: std::marker::PhantomData,
        }
    }

    /// A custom matrix from an entry formula in `j` and `k`.  Rejects
    /// expressions that read any other variable.
    pub fn custom(entry: Expr) -> Result<Self, MatrixError> {
        for v in entry.free_vars() {
            if v != Var::J && v != Var::K {
                return Err(MatrixError::ForbiddenVariable(v));
            }
        }
        Ok(KotheMatrix {
            family: Family::Custom(entry),
            _scalar: std::marker::PhantomData,
        })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Entry `b(j,k)`.  May overflow to `+∞` for fast-growing custom
    /// formulas; use [`log_entry`](Self::log_entry) for scan work.
    pub fn entry(&self, j: Index, k: u32) -> Result<T, MatrixError> {
        self.check_indices(j, k)?;
        match &self.family {
            Family::Omega => Ok(if j <= k as Index { T::one() } else { T::zero() }),
            Family::RapidDecay => {
                // Repeated multiplication keeps small powers exact; the
                // log form is available for ranges where this overflows.
                Ok(T::of_u64(j).powi(k as i32))
            }
            Family::Custom(e) => {
                let env = Env::new().with_j(T::of_u64(j)).with_k(T::of_u32(k));
                let v = e
                    .eval(&env)
                    .map_err(|source| MatrixError::Entry { j, k, source })?;
                if v < T::zero() {
                    return Err(MatrixError::NegativeEntry {
                        j,
                        k,
                        value: v.to_f64().unwrap_or(f64::NAN),
                    });
                }
                Ok(v)
            }
        }
    }

    /// `ln b(j,k)`, with `-∞` for a zero entry.
    pub fn log_entry(&self, j: Index, k: u32) -> Result<T, MatrixError> {
        self.check_indices(j, k)?;
        match &self.family {
            Family::Omega => Ok(if j <= k as Index {
                T::zero()
            } else {
                T::neg_infinity()
            }),
            Family::RapidDecay => Ok(T::of_u64(j).ln() * T::of_u32(k)),
            Family::Custom(_) => Ok(self.entry(j, k)?.ln()),
        }
    }

    /// `Some(j_last)` when column `k` is known in closed form to vanish for
    /// all `j > j_last`.
    pub fn column_support(&self, k: u32) -> Option<Index> {
        match &self.family {
            Family::Omega => Some(k as Index),
            _ => None,
        }
    }

    /// Certified polynomial bound on column `k`.  Closed form for the
    /// built-in families; a probed fit (monitored over the window) otherwise.
    pub fn column_growth(&self, k: u32, j_window: Index) -> Result<GrowthBound<T>, MatrixError> {
        if k == 0 {
            return Err(MatrixError::BadGrading(k));
        }
        match &self.family {
            Family::Omega => Ok(GrowthBound {
                log_c: T::zero(),
                degree: T::zero(),
                scope: Scope::ClosedForm,
            }),
            Family::RapidDecay => Ok(GrowthBound {
                log_c: T::zero(),
                degree: T::of_u32(k),
                scope: Scope::ClosedForm,
            }),
            Family::Custom(_) => self.fitted_growth(k, j_window),
        }
    }

    /// Probed polynomial fit for a custom column: the smallest integer degree
    /// `m ≤ 12` for which `b(j,k)/j^m` stops growing across the last probed
    /// decade, with `c` the window maximum of that ratio.
    fn fitted_growth(&self, k: u32, j_window: Index) -> Result<GrowthBound<T>, MatrixError> {
        const MAX_DEGREE: u32 = 12;
        let samples = probe_indices(j_window.max(256));
        let mut logs = Vec::with_capacity(samples.len());
        for &j in &samples {
            let lb = self.log_entry(j, k)?;
            // An entry that overflows within the window can never sit under a
            // polynomial bound fitted on that window.
            if lb == T::infinity() || lb.is_nan() {
                return Err(MatrixError::GrowthUnbounded {
                    k,
                    max_degree: MAX_DEGREE,
                });
            }
            logs.push((j, lb));
        }
        let last_decade_start = T::of_u64(j_window.max(256)) * T::of(0.1);
        for m in 0..=MAX_DEGREE {
            let md = T::of_u32(m);
            let ratio = |j: Index, lb: T| lb - md * T::of_u64(j).ln();
            let mut all_max = T::neg_infinity();
            let mut early_max = T::neg_infinity();
            let mut late_max = T::neg_infinity();
            for &(j, lb) in &logs {
                let r = ratio(j, lb);
                all_max = all_max.max(r);
                if T::of_u64(j) >= last_decade_start {
                    late_max = late_max.max(r);
                } else {
                    early_max = early_max.max(r);
                }
            }
            // Stable when the last decade does not push the window maximum
            // up; relative slack tolerates columns creeping up to a sup.
            let slack = T::of(1e-9).max(early_max.abs() * T::of(1e-3));
            if late_max <= early_max + slack {
                return Ok(GrowthBound {
                    log_c: all_max,
                    degree: md,
                    scope: Scope::ProbedWindow,
                });
            }
        }
        Err(MatrixError::GrowthUnbounded {
            k,
            max_degree: MAX_DEGREE,
        })
    }

    /// Window validation: nonnegative entries, columns nondecreasing in `k`,
    /// and each probed row positive in some probed column.
    pub fn validate(&self, j_max: Index, k_max: u32) -> Result<(), MatrixError> {
        if k_max == 0 {
            return Err(MatrixError::BadGrading(k_max));
        }
        for j in 1..=j_max {
            let mut prev = T::zero();
            let mut row_positive = false;
            for k in 1..=k_max {
                let v = self.entry(j, k)?;
                if v < T::zero() {
                    return Err(MatrixError::NegativeEntry {
                        j,
                        k,
                        value: v.to_f64().unwrap_or(f64::NAN),
                    });
                }
                if k > 1 && v < prev {
                    return Err(MatrixError::NotMonotone {
                        j,
                        k: k - 1,
                        k_next: k,
                    });
                }
                if v > T::zero() {
                    row_positive = true;
                }
                prev = v;
            }
            if !row_positive {
                return Err(MatrixError::ZeroRow { j, k_max });
            }
        }
        Ok(())
    }

    /// Does some column stay positive at every row?  Closed-form answers for
    /// the built-in families, a probed answer otherwise.
    pub fn continuous_norm(&self, j_max: Index, k_max: u32) -> Result<ContinuousNorm, MatrixError> {
        match &self.family {
            // Column k vanishes at j = k+1; true for every k.
            Family::Omega => Ok(ContinuousNorm::Refuted {
                zeros: (1..=k_max).map(|k| (k, k as Index + 1)).collect(),
                scope: Scope::ClosedForm,
            }),
            // j^k ≥ 1 > 0 for every j, already at k = 1.
            Family::RapidDecay => Ok(ContinuousNorm::Certified {
                k0: 1,
                scope: Scope::ClosedForm,
            }),
            Family::Custom(_) => {
                let mut zeros = Vec::new();
                'columns: for k in 1..=k_max {
                    for j in 1..=j_max {
                        if self.entry(j, k)? == T::zero() {
                            zeros.push((k, j));
                            continue 'columns;
                        }
                    }
                    return Ok(ContinuousNorm::Certified {
                        k0: k,
                        scope: Scope::ProbedWindow,
                    });
                }
                Ok(ContinuousNorm::Refuted {
                    zeros,
                    scope: Scope::ProbedWindow,
                })
            }
        }
    }

    fn check_indices(&self, j: Index, k: u32) -> Result<(), MatrixError> {
        if j == 0 {
            return Err(MatrixError::BadRow);
        }
        if k == 0 {
            return Err(MatrixError::BadGrading(k));
        }
        Ok(())
    }
}

/// Dense indices 1..=256 plus log-spaced indices up to `j_window`.
pub(crate) fn probe_indices(j_window: Index) -> Vec<Index> {
    let mut out: Vec<Index> = (1..=256.min(j_window)).collect();
    if j_window > 256 {
        let mut j = 256f64;
        while j < j_window as f64 {
            j *= 1.1;
            let ji = (j as Index).min(j_window);
            if out.last() != Some(&ji) {
                out.push(ji);
            }
        }
        if out.last() != Some(&j_window) {
            out.push(j_window);
        }
    }
    out
}
