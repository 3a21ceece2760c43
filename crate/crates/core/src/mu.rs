//! Log-domain growth-constant sequences `μ = (μ_n)_{n≥0}` and the analysis
//! of their exponential generating series
//!
//! ```text
//! f_μ(t) = Σ_{n≥0} μ_n tⁿ / n!
//! ```
//!
//! with a root-test radius estimate, certified geometric tail bounds after
//! truncation, and partial summation to a requested tolerance.  Sequences
//! remember their origin; closed-form origins extend beyond the materialised
//! window and give exact tail ratios, scanned origins are honest about their
//! window.

use thiserror::Error;

use crate::expr::{Env, EvalError, Expr, Var};
use crate::logdomain::{CompensatedSum, LnFactorials};
use crate::scalar::Scalar;
use crate::seqspace::{Index, SeminormIndex};

/// Where a μ-sequence came from; drives tail ratios and radius shortcuts.
#[derive(Debug, Clone, PartialEq)]
pub enum MuOrigin<T> {
    /// Window scans of operator domination constants for one seminorm pair.
    /// `analytic_tail` records whether the scanned sups were backed by a
    /// closed form (exact beyond the window) or window-only.
    Scan {
        pair: (SeminormIndex<T>, SeminormIndex<T>),
        window: Index,
        analytic_tail: bool,
    },
    /// `μ_n = M·rateⁿ` — the series is entire.
    Geometric { log_m: T, log_rate: T },
    /// `μ_n = (n/d)ⁿ e⁻ⁿ` (with `μ_0 = 1`) — radius `d`.
    PowerForm { d: T },
    /// `μ_n = n!·s/(s-q)^{n+1}` — radius `s-q`.
    CauchyForm { q: T, s: T },
    /// Values from an expression in `n`.
    Expr(Expr),
}

/// A materialised μ-sequence in the log domain (`-∞` encodes `μ_n = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct LogMuSequence<T> {
    log_mu: Vec<T>,
    origin: MuOrigin<T>,
}

/// Root-test radius estimate for `f_μ`, from `est_n = (n!/μ_n)^{1/n}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusEstimate<T> {
    /// Conservative radius: the smallest estimate over the last probed
    /// decade (`+∞` when the origin or the trend certifies an entire series).
    pub value: T,
    /// Last-decade estimates agree within 1%.
    pub stabilized: bool,
    pub trend: Trend,
    /// Largest estimate over the last probed octave — an honest cap when
    /// arguing that the radius stays below some horizon.
    pub upper_last: T,
}

/// Movement of the octave-wise radius estimates across the window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    /// Structurally entire (geometric origin, zero sequence, or factorial
    /// divergence of the estimates).
    Entire,
    Flat,
    Decreasing,
    Increasing,
    Mixed,
}

/// A partial series value with its certified truncation tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue<T> {
    pub value: T,
    /// Certified bound on `Σ_{n>n_used} μ_n tⁿ/n!`.
    pub tail: T,
    pub n_used: u32,
}

#[derive(Debug, Error, PartialEq)]
pub enum MuError {
    #[error("invalid μ-sequence parameters: {0}")]
    BadParams(String),
    #[error("μ-expression uses variable {0:?}; only n is allowed")]
    ForbiddenVariable(Var),
    #[error("μ_{n} failed to evaluate: {source}")]
    EvalFailed { n: u32, source: EvalError },
    #[error("μ_{n} is negative ({value}); growth constants must be ≥ 0")]
    NegativeValue { n: u32, value: f64 },
    #[error("series time must be ≥ 0 (got {0})")]
    BadTime(f64),
    #[error(
        "t = {t} is outside the certified disc (radius estimate {radius}, stabilized: {stabilized})"
    )]
    OutsideCertifiedDisc {
        t: f64,
        radius: f64,
        stabilized: bool,
    },
    #[error("no contractive tail ratio at truncation n = {at}; increase the truncation order")]
    RatioNotContractive { at: u32 },
    #[error(
        "materialised window exhausted at n = {max_n} with tail still {best_tail:e}; \
         extend the sequence"
    )]
    WindowExhausted { max_n: u32, best_tail: f64 },
}

impl<T: Scalar> LogMuSequence<T> {
    /// `μ_n = m·rateⁿ` for `m, rate > 0`.
    pub fn from_geometric(m: T, rate: T, n_max: u32) -> Result<Self, MuError> {
        if !(m > T::zero()) || !(rate > T::zero()) || !m.is_finite() || !rate.is_finite() {
            return Err(MuError::BadParams(format!(
                "geometric needs m > 0 and rate > 0 (got m={m}, rate={rate})"
            )));
        }
        let (log_m, log_rate) = (m.ln(), rate.ln());
        let log_mu = (0..=n_max)
            .map(|n| log_m + T::of_u32(n) * log_rate)
            .collect();
        Ok(LogMuSequence {
            log_mu,
            origin: MuOrigin::Geometric { log_m, log_rate },
        })
    }

    /// `μ_n = (n/d)ⁿ e⁻ⁿ` with `μ_0 = 1`, for `d > 0`.
    pub fn power_form(d: T, n_max: u32) -> Result<Self, MuError> {
        if !(d > T::zero()) || !d.is_finite() {
            return Err(MuError::BadParams(format!("power form needs d > 0 (got {d})")));
        }
        let origin = MuOrigin::PowerForm { d };
        let log_mu = (0..=n_max).map(|n| power_form_log(d, n)).collect();
        Ok(LogMuSequence { log_mu, origin })
    }

    /// `μ_n = n!·s/(s-q)^{n+1}` for `0 < q < s`.
    pub fn cauchy_form(q: T, s: T, n_max: u32) -> Result<Self, MuError> {
        if !(T::zero() < q && q < s) || !s.is_finite() {
            return Err(MuError::BadParams(format!(
                "Cauchy form needs 0 < q < s (got q={q}, s={s})"
            )));
        }
        let mut lnf = LnFactorials::up_to(n_max as usize);
        let log_mu = (0..=n_max)
            .map(|n| cauchy_form_log(q, s, n, &mut lnf))
            .collect();
        Ok(LogMuSequence {
            log_mu,
            origin: MuOrigin::CauchyForm { q, s },
        })
    }

    /// Values from an expression in `n`, evaluated for `0 ≤ n ≤ n_max`.
    pub fn from_expr(expr: Expr, n_max: u32) -> Result<Self, MuError> {
        for v in expr.free_vars() {
            if v != Var::N {
                return Err(MuError::ForbiddenVariable(v));
            }
        }
        let mut log_mu = Vec::with_capacity(n_max as usize + 1);
        for n in 0..=n_max {
            let v = expr
                .eval(&Env::new().with_n(T::of_u32(n)))
                .map_err(|source| MuError::EvalFailed { n, source })?;
            if v < T::zero() {
                return Err(MuError::NegativeValue {
                    n,
                    value: v.to_f64().unwrap_or(f64::NAN),
                });
            }
            if !v.is_finite() {
                return Err(MuError::BadParams(format!(
                    "expression value overflows at n = {n}; shrink the window"
                )));
            }
            log_mu.push(v.ln());
        }
        Ok(LogMuSequence {
            log_mu,
            origin: MuOrigin::Expr(expr),
        })
    }

    /// A sequence materialised from window scans.
    pub fn from_scan(
        log_values: Vec<T>,
        pair: (SeminormIndex<T>, SeminormIndex<T>),
        window: Index,
        analytic_tail: bool,
    ) -> Result<Self, MuError> {
        if log_values.is_empty() {
            return Err(MuError::BadParams("scan sequence is empty".to_string()));
        }
        Ok(LogMuSequence {
            log_mu: log_values,
            origin: MuOrigin::Scan {
                pair,
                window,
                analytic_tail,
            },
        })
    }

    pub fn origin(&self) -> &MuOrigin<T> {
        &self.origin
    }

    /// Largest materialised index.
    pub fn max_n(&self) -> u32 {
        self.log_mu.len() as u32 - 1
    }

    /// `ln μ_n`; closed-form origins extend beyond the materialised window.
    pub fn log_mu(&self, n: u32) -> Option<T> {
        if let Some(&v) = self.log_mu.get(n as usize) {
            return Some(v);
        }
        match &self.origin {
            MuOrigin::Geometric { log_m, log_rate } => Some(*log_m + T::of_u32(n) * *log_rate),
            MuOrigin::PowerForm { d } => Some(power_form_log(*d, n)),
            MuOrigin::CauchyForm { q, s } => {
                let mut lnf = LnFactorials::up_to(0);
                Some(cauchy_form_log(*q, *s, n, &mut lnf))
            }
            MuOrigin::Expr(e) => match e.eval(&Env::new().with_n(T::of_u32(n))) {
                Ok(v) if v >= T::zero() && v.is_finite() => Some(v.ln()),
                _ => None,
            },
            MuOrigin::Scan { .. } => None,
        }
    }

    /// Radius known exactly from the origin, bypassing the root test.
    pub fn analytic_radius(&self) -> Option<T> {
        match &self.origin {
            MuOrigin::Geometric { .. } => Some(T::infinity()),
            MuOrigin::PowerForm { d } => Some(*d),
            MuOrigin::CauchyForm { q, s } => Some(*s - *q),
            _ => None,
        }
    }
}

fn power_form_log<T: Scalar>(d: T, n: u32) -> T {
    if n == 0 {
        T::zero()
    } else {
        let nf = T::of_u32(n);
        nf * (nf.ln() - d.ln() - T::one())
    }
}

fn cauchy_form_log<T: Scalar>(q: T, s: T, n: u32, lnf: &mut LnFactorials<T>) -> T {
    lnf.get(n as usize) + s.ln() - T::of_u32(n + 1) * (s - q).ln()
}

/// Root-test radius estimate over the materialised window.
pub fn radius<T: Scalar>(seq: &LogMuSequence<T>) -> RadiusEstimate<T> {
    if matches!(seq.origin(), MuOrigin::Geometric { .. }) {
        return RadiusEstimate {
            value: T::infinity(),
            stabilized: true,
            trend: Trend::Entire,
            upper_last: T::infinity(),
        };
    }
    let n_max = seq.max_n();
    let lnf = LnFactorials::<T>::up_to(n_max as usize);
    // est_n = exp((ln n! - ln μ_n)/n) for n ≥ 1 with μ_n > 0.
    let mut ests: Vec<(u32, T)> = Vec::new();
    for n in 1..=n_max {
        let lm = seq.log_mu[n as usize];
        if lm == T::neg_infinity() {
            continue;
        }
        ests.push((n, ((lnf.at(n as usize) - lm) / T::of_u32(n)).exp()));
    }
    if ests.is_empty() {
        // μ vanishes identically past n = 0: the series is a constant.
        return RadiusEstimate {
            value: T::infinity(),
            stabilized: true,
            trend: Trend::Entire,
            upper_last: T::infinity(),
        };
    }

    let last_n = ests.last().unwrap().0;
    let decade_floor = last_n / 10;
    let mut dec_min = T::infinity();
    let mut dec_max = T::neg_infinity();
    for &(n, e) in &ests {
        if n >= decade_floor.max(1) {
            dec_min = dec_min.min(e);
            dec_max = dec_max.max(e);
        }
    }
    // Spread of the last decade within 1%, and enough depth that a decade
    // actually exists — a handful of estimates proves nothing.
    let stabilized = last_n >= 32 && dec_max <= dec_min * T::of(1.01);

    // Octave-wise maxima for trend classification.
    let mut octaves: Vec<T> = Vec::new();
    let mut cur_oct = u32::MAX;
    for &(n, e) in &ests {
        let oct = 31 - n.leading_zeros();
        if oct != cur_oct {
            octaves.push(e);
            cur_oct = oct;
        } else {
            let last = octaves.last_mut().unwrap();
            *last = last.max(e);
        }
    }
    let tail: Vec<T> = octaves.iter().rev().take(5).rev().copied().collect();
    let up = tail
        .windows(2)
        .all(|w| w[1] >= w[0] * T::of(1.01));
    let down = tail
        .windows(2)
        .all(|w| w[1] <= w[0] * T::of(0.99));
    let flat = tail
        .windows(2)
        .all(|w| w[1] <= w[0] * T::of(1.01) && w[1] >= w[0] * T::of(0.99));
    let trend = if flat {
        Trend::Flat
    } else if up {
        Trend::Increasing
    } else if down {
        Trend::Decreasing
    } else {
        Trend::Mixed
    };

    // Factorial divergence: estimates keep growing at octave ratio ≈ 2 and
    // have covered at least two orders of magnitude — the series behaves as
    // entire over every probed scale.
    if trend == Trend::Increasing && tail.len() >= 2 {
        let first = *octaves.first().unwrap();
        let total_growth = *octaves.last().unwrap() / first;
        let last_ratio = tail[tail.len() - 1] / tail[tail.len() - 2];
        if total_growth >= T::of(100.0) && last_ratio >= T::of(1.8) {
            return RadiusEstimate {
                value: T::infinity(),
                stabilized: true,
                trend: Trend::Entire,
                upper_last: T::infinity(),
            };
        }
    }

    RadiusEstimate {
        value: dec_min,
        stabilized,
        trend,
        upper_last: dec_max,
    }
}

/// Certified bound on the discarded tail `Σ_{n > n_used} μ_n tⁿ/n!`.
///
/// The bound is `term_{N+1}/(1-ρ)` with `ρ` an upper bound on consecutive
/// term ratios beyond the truncation — exact for the closed-form origins,
/// window-scanned (and window-honest) otherwise.
pub fn tail_bound<T: Scalar>(seq: &LogMuSequence<T>, t: T, n_used: u32) -> Result<T, MuError> {
    if !(t >= T::zero()) {
        return Err(MuError::BadTime(t.to_f64().unwrap_or(f64::NAN)));
    }
    if t == T::zero() {
        return Ok(T::zero());
    }
    let mut lnf = LnFactorials::up_to(n_used as usize + 2);
    tail_bound_inner(seq, t, n_used, &mut lnf, None)
}

fn tail_bound_inner<T: Scalar>(
    seq: &LogMuSequence<T>,
    t: T,
    n_used: u32,
    lnf: &mut LnFactorials<T>,
    scan_suffix: Option<&[T]>,
) -> Result<T, MuError> {
    let next = n_used + 1;
    let log_next = seq.log_mu(next).ok_or(MuError::WindowExhausted {
        max_n: seq.max_n(),
        best_tail: f64::INFINITY,
    })?;
    if log_next == T::neg_infinity() {
        // A zero term with a closed-form origin stays zero (geometric /
        // power / Cauchy forms never vanish, so this is the scan/expr case
        // handled by the ratio sup below when nonzero terms remain).
        if seq
            .log_mu(next + 1)
            .map_or(true, |v| v == T::neg_infinity())
        {
            // Check the whole remaining window for scans.
            let all_zero = match &seq.origin {
                MuOrigin::Scan { .. } | MuOrigin::Expr(_) => (next..=seq.max_n())
                    .all(|n| seq.log_mu(n) == Some(T::neg_infinity())),
                _ => true,
            };
            if all_zero {
                return Ok(T::zero());
            }
        }
        return Err(MuError::RatioNotContractive { at: n_used });
    }
    let log_term_next = log_next + T::of_u32(next) * t.ln() - lnf.get(next as usize);

    let log_rho = match &seq.origin {
        MuOrigin::Geometric { log_rate, .. } => {
            // ratio_n = rate·t/(n+1), decreasing: sup at n = next.
            *log_rate + t.ln() - T::of_u32(next + 1).ln()
        }
        MuOrigin::PowerForm { d } => t.ln() - d.ln(),
        MuOrigin::CauchyForm { q, s } => t.ln() - (*s - *q).ln(),
        MuOrigin::Scan { .. } | MuOrigin::Expr(_) => {
            let base = match scan_suffix {
                Some(suffix) => {
                    // Need at least one observed increment at n ≥ next.
                    if (next as usize) + 1 < suffix.len() {
                        suffix[next as usize]
                    } else {
                        return Err(MuError::WindowExhausted {
                            max_n: seq.max_n(),
                            best_tail: f64::INFINITY,
                        });
                    }
                }
                None => {
                    // sup over the remaining window of
                    // ln μ_{n+1} - ln μ_n - ln(n+1).
                    let mut sup = T::neg_infinity();
                    let max_n = seq.max_n();
                    if next >= max_n {
                        return Err(MuError::WindowExhausted {
                            max_n,
                            best_tail: f64::INFINITY,
                        });
                    }
                    for n in next..max_n {
                        sup = sup.max(ratio_increment(seq, n));
                    }
                    sup
                }
            };
            base + t.ln()
        }
    };

    if log_rho >= T::zero() {
        return Err(MuError::RatioNotContractive { at: n_used });
    }
    let rho = log_rho.exp();
    Ok((log_term_next - (-rho).ln_1p()).exp())
}

/// `ln μ_{n+1} - ln μ_n - ln(n+1)`, with `+∞` when a zero term is followed
/// by a nonzero one (no geometric control possible).
fn ratio_increment<T: Scalar>(seq: &LogMuSequence<T>, n: u32) -> T {
    let a = seq.log_mu[n as usize];
    let b = seq.log_mu[n as usize + 1];
    if b == T::neg_infinity() {
        T::neg_infinity()
    } else if a == T::neg_infinity() {
        T::infinity()
    } else {
        b - a - T::of_u32(n + 1).ln()
    }
}

/// Sum the series at `t ≥ 0` until the certified tail is at most `tol`.
///
/// Requires `t` strictly inside the certified disc: the analytic radius when
/// the origin provides one, otherwise a stabilised root-test estimate.
pub fn series_sum<T: Scalar>(
    seq: &LogMuSequence<T>,
    t: T,
    tol: T,
    compensated: bool,
) -> Result<SeriesValue<T>, MuError> {
    if !(t >= T::zero()) || !t.is_finite() {
        return Err(MuError::BadTime(t.to_f64().unwrap_or(f64::NAN)));
    }
    // Disc guard.
    match seq.analytic_radius() {
        Some(r) => {
            if !(t < r) {
                return Err(MuError::OutsideCertifiedDisc {
                    t: t.to_f64().unwrap_or(f64::NAN),
                    radius: r.to_f64().unwrap_or(f64::NAN),
                    stabilized: true,
                });
            }
        }
        None => {
            // Refuse only on positive evidence of divergence; otherwise the
            // per-truncation tail certificates below carry the honesty (an
            // uncertifiable tail surfaces as WindowExhausted).
            let est = radius(seq);
            if est.stabilized && est.value.is_finite() && t >= est.value {
                return Err(MuError::OutsideCertifiedDisc {
                    t: t.to_f64().unwrap_or(f64::NAN),
                    radius: est.value.to_f64().unwrap_or(f64::NAN),
                    stabilized: est.stabilized,
                });
            }
        }
    }

    // Precompute the suffix maxima of ratio increments for scanned origins so
    // each tail check is O(1).
    let scan_suffix: Option<Vec<T>> = match &seq.origin {
        MuOrigin::Scan { .. } | MuOrigin::Expr(_) => {
            let max_n = seq.max_n();
            let mut suffix = vec![T::neg_infinity(); max_n as usize + 1];
            // suffix[n] = sup over m ≥ n of the increment at m (m < max_n).
            for n in (0..max_n).rev() {
                let inc = ratio_increment(seq, n);
                suffix[n as usize] = inc.max(suffix[n as usize + 1]);
            }
            Some(suffix)
        }
        _ => None,
    };

    let mut lnf = LnFactorials::up_to(0);
    let mut plain = T::zero();
    let mut kahan = CompensatedSum::new();
    let hard_cap: u32 = match &seq.origin {
        MuOrigin::Scan { .. } | MuOrigin::Expr(_) => seq.max_n(),
        _ => 100_000,
    };
    let ln_t = t.ln();

    let mut best_tail = f64::INFINITY;
    for n in 0..=hard_cap {
        let lm = match seq.log_mu(n) {
            Some(v) => v,
            None => break,
        };
        let term = if t == T::zero() {
            if n == 0 {
                lm.exp()
            } else {
                T::zero()
            }
        } else {
            (lm + T::of_u32(n) * ln_t - lnf.get(n as usize)).exp()
        };
        if compensated {
            kahan.add(term);
        } else {
            plain += term;
        }
        let value = if compensated { kahan.value() } else { plain };

        match tail_bound_inner(seq, t, n, &mut lnf, scan_suffix.as_deref()) {
            Ok(tail) if tail <= tol => {
                return Ok(SeriesValue {
                    value,
                    tail,
                    n_used: n,
                });
            }
            Ok(tail) => best_tail = tail.to_f64().unwrap_or(f64::INFINITY),
            Err(MuError::RatioNotContractive { .. }) => {}
            Err(MuError::WindowExhausted { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    Err(MuError::WindowExhausted {
        max_n: hard_cap.min(seq.max_n()),
        best_tail,
    })
}
