//! Log-domain arithmetic helpers.
//!
//! All growth-constant bookkeeping in this crate stores `log μ` rather than
//! `μ`, with `-∞` as the sentinel for `μ = 0`. Helpers here keep that sentinel
//! stable (no `NaN` from `-∞ - -∞`-style corner cases) and provide the two
//! flavours of `log n!` used downstream: an exact cumulative table for series
//! terms, and Stirling's approximation with the `1/(12n)` correction for the
//! root test, where only the `n → ∞` behaviour matters.

use crate::scalar::Scalar;

/// `log(exp(a) + exp(b))` without overflow; respects the `-∞` zero sentinel.
pub fn log_add_exp<T: Scalar>(a: T, b: T) -> T {
    if a == T::neg_infinity() {
        return b;
    }
    if b == T::neg_infinity() {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == T::infinity() {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Stirling's `log n!` with the standard `1/(12n)` correction.
///
/// Absolute error is below `2.3e-3` at `n = 1` and decays like `n^{-3}`;
/// adequate for root-test asymptotics, not for individual series terms.
pub fn stirling_ln_factorial<T: Scalar>(n: u64) -> T {
    if n == 0 {
        return T::zero();
    }
    let n = T::of_u64(n);
    let two_pi = T::of(2.0) * T::PI();
    n * n.ln() - n + (two_pi * n).ln() * T::of(0.5) + (T::of(12.0) * n).recip()
}

/// Exact (to rounding) `log n!` built as a cumulative sum of `log k`.
///
/// Used wherever a truncation bound depends on an individual `t^n / n!` term.
#[derive(Debug, Clone)]
pub struct LnFactorials<T> {
    cum: Vec<T>,
}

impl<T: Scalar> LnFactorials<T> {
    /// Table covering `0! ..= n_max!`.
    pub fn up_to(n_max: usize) -> Self {
        let mut cum = Vec::with_capacity(n_max + 1);
        let mut acc = T::zero();
        cum.push(acc);
        for k in 1..=n_max {
            acc += T::of_u64(k as u64).ln();
            cum.push(acc);
        }
        LnFactorials { cum }
    }

    pub fn len(&self) -> usize {
        self.cum.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cum.is_empty()
    }

    /// `log n!`; extends the table if `n` exceeds the current range.
    pub fn get(&mut self, n: usize) -> T {
        if n >= self.cum.len() {
            let mut acc = *self.cum.last().expect("table is never empty");
            for k in self.cum.len()..=n {
                acc += T::of_u64(k as u64).ln();
                self.cum.push(acc);
            }
        }
        self.cum[n]
    }

    /// `log n!` without extending; panics past the table end.
    pub fn at(&self, n: usize) -> T {
        self.cum[n]
    }
}

/// Kahan (compensated) running sum, used as the high-accuracy summation mode.
#[derive(Debug, Clone, Copy)]
pub struct CompensatedSum<T> {
    sum: T,
    carry: T,
}

impl<T: Scalar> CompensatedSum<T> {
    pub fn new() -> Self {
        CompensatedSum {
            sum: T::zero(),
            carry: T::zero(),
        }
    }

    pub fn add(&mut self, x: T) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum
    }
}

impl<T: Scalar> Default for CompensatedSum<T> {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn log_add_exp_handles_sentinels() {
        let ni = f64::NEG_INFINITY;
        assert_eq!(log_add_exp(ni, ni), ni);
        assert_eq!(log_add_exp(ni, 3.0), 3.0);
        assert_eq!(log_add_exp(3.0, ni), 3.0);
        assert_relative_eq!(log_add_exp(0.0, 0.0), std::f64::consts::LN_2);
    }

    #[test]
    fn log_add_exp_survives_huge_magnitudes() {
        // naive exp would overflow
        let v = log_add_exp(1e300_f64.ln() + 700.0, 1e300_f64.ln() + 700.0);
        assert!(v.is_finite());
    }

    #[test]
    fn cumulative_table_matches_direct_products() {
        let mut t = LnFactorials::<f64>::up_to(10);
        assert_eq!(t.get(0), 0.0);
        assert_relative_eq!(t.get(5), 120f64.ln(), max_relative = 1e-15);
        assert_relative_eq!(t.get(10), 3_628_800f64.ln(), max_relative = 1e-15);
        // extension past the initial range
        assert_relative_eq!(t.get(12), 479_001_600f64.ln(), max_relative = 1e-15);
    }

    #[test]
    fn stirling_tracks_cumulative_within_published_error() {
        let mut t = LnFactorials::<f64>::up_to(2000);
        // coarse at n=1, tight by n=100
        assert!((stirling_ln_factorial::<f64>(1) - t.get(1)).abs() < 2.5e-3);
        assert!((stirling_ln_factorial::<f64>(100) - t.get(100)).abs() < 1e-7);
        assert!((stirling_ln_factorial::<f64>(2000) - t.get(2000)).abs() < 1e-9);
    }

    #[test]
    fn compensated_sum_beats_naive_on_adversarial_input() {
        let mut k = CompensatedSum::<f64>::new();
        k.add(1.0);
        for _ in 0..10_000 {
            k.add(1e-16);
        }
        assert_relative_eq!(k.value(), 1.0 + 1e-12, max_relative = 1e-12);
    }

    proptest! {
        #[test]
        fn log_add_exp_commutes(a in -1e3f64..1e3, b in -1e3f64..1e3) {
            prop_assert_eq!(log_add_exp(a, b), log_add_exp(b, a));
        }

        #[test]
        fn log_add_exp_matches_direct_in_safe_range(a in -20f64..20.0, b in -20f64..20.0) {
            let direct = (a.exp() + b.exp()).ln();
            prop_assert!((log_add_exp(a, b) - direct).abs() < 1e-12);
        }

        #[test]
        fn log_add_exp_dominates_both_arguments(a in -1e3f64..1e3, b in -1e3f64..1e3) {
            let v = log_add_exp(a, b);
            prop_assert!(v >= a.max(b));
        }
    }
}
