//! Taylor-coefficient model of holomorphic functions on a disc or on the
//! whole plane.
//!
//! A function is its coefficient vector `(c_0, c_1, …)` (stored with the
//! 1-based coordinate convention `x_j = c_{j-1}`) together with a declared
//! radius of holomorphy.  Circle seminorms `sup_{|z| ≤ q} |f(z)|` collapse to
//! `|z| = q` by the maximum principle and are evaluated either exactly (for
//! nonnegative coefficients, where the sup sits at `z = q`) or by a dense
//! angular grid with a derivative-based modulus-of-continuity correction.

use num_complex::Complex;

use crate::logdomain::{CompensatedSum, LnFactorials};
use crate::operators::Operator;
use crate::scalar::Scalar;
use crate::seqspace::{
    CoeffRule, CoefficientVector, Envelope, Index, SeminormIndex, SeminormValue,
};

use super::ModelError;

/// A holomorphic function given by Taylor coefficients at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorFunction<T> {
    coeffs: CoefficientVector<T>,
    declared_radius: T,
}

impl<T: Scalar> TaylorFunction<T> {
    /// Wrap a coefficient vector with a declared radius of holomorphy.
    ///
    /// Consistency requirement: an infinite radius needs finite support
    /// (polynomials), while a finite radius needs a geometric envelope with
    /// `base · radius ≤ 1`, so that `|c_n| ≲ radius^{-n}` up to polynomial
    /// factors.
    pub fn from_vector(
        coeffs: CoefficientVector<T>,
        declared_radius: T,
    ) -> Result<Self, ModelError> {
        if !(declared_radius > T::zero()) {
            return Err(ModelError::BadParams(format!(
                "declared radius must be positive (got {declared_radius})"
            )));
        }
        match coeffs.envelope() {
            Envelope::FiniteSupport { .. } => {}
            Envelope::Decay { base, .. } => {
                if declared_radius == T::infinity() {
                    return Err(ModelError::BadParams(
                        "an infinite radius requires finite support; a fixed geometric \
                         envelope caps the radius at 1/base"
                            .to_string(),
                    ));
                }
                if base * declared_radius > T::one() + T::of(1e-9) {
                    return Err(ModelError::BadParams(format!(
                        "envelope base {base} is inconsistent with radius {declared_radius}: \
                         base·radius must be ≤ 1"
                    )));
                }
            }
        }
        Ok(TaylorFunction {
            coeffs,
            declared_radius,
        })
    }

    /// Polynomial `Σ_m coeffs[m]·z^m`; entire, radius ∞.
    pub fn polynomial(coeffs: Vec<T>) -> Self {
        TaylorFunction {
            coeffs: CoefficientVector::finite(coeffs),
            declared_radius: T::infinity(),
        }
    }

    /// The geometric section `f_k(z) = Σ_{n ≤ k} zⁿ` (a polynomial).
    pub fn geometric_section(k: u32) -> Self {
        Self::polynomial(vec![T::one(); k as usize + 1])
    }

    /// The exponential, truncated at the order where `1/n!` underflows f64
    /// (n = 170); the dropped coefficients are below 2⁻¹⁰⁷⁴ and the truncation
    /// is exact at machine precision.
    pub fn exponential() -> Self {
        let mut coeffs = Vec::with_capacity(171);
        let mut c = T::one();
        for n in 0..=170u32 {
            if n > 0 {
                c = c / T::of_u32(n);
            }
            coeffs.push(c);
        }
        Self::polynomial(coeffs)
    }

    pub fn coefficients(&self) -> &CoefficientVector<T> {
        &self.coeffs
    }

    pub fn declared_radius(&self) -> T {
        self.declared_radius
    }

    /// Taylor coefficient of `z^m`.
    pub fn coefficient(&self, m: u32) -> Result<T, ModelError> {
        Ok(self.coeffs.coeff(m as Index + 1)?)
    }

    /// Degree when the support is finite.
    pub fn degree(&self) -> Option<u32> {
        self.coeffs.support_end().map(|s| s.saturating_sub(1) as u32)
    }

    /// The `n`-th derivative (coefficientwise `(m+n)!/m!` pull-down).
    pub fn derivative(&self, n: u32) -> Result<Self, ModelError> {
        let coeffs = Operator::TaylorDifferentiation
            .apply_power(n, &self.coeffs)
            .map_err(|e| ModelError::BadParams(e.to_string()))?;
        Ok(TaylorFunction {
            coeffs,
            declared_radius: self.declared_radius,
        })
    }

    /// Exact polynomial shift `f(· + t)`; errors on infinite support.
    pub fn shifted(&self, t: T) -> Result<Self, ModelError> {
        let mut c = self.materialized()?;
        taylor_shift(&mut c, t);
        Ok(Self::polynomial(c))
    }

    /// Horner evaluation at a real point (finite support only).
    pub fn eval_real(&self, x: T) -> Result<T, ModelError> {
        let c = self.materialized()?;
        Ok(c.iter().rev().fold(T::zero(), |acc, &cm| acc * x + cm))
    }

    /// Horner evaluation at a complex point (finite support only).
    pub fn eval_complex(&self, z: Complex<T>) -> Result<Complex<T>, ModelError> {
        let c = self.materialized()?;
        Ok(c.iter()
            .rev()
            .fold(Complex::new(T::zero(), T::zero()), |acc, &cm| acc * z + cm))
    }

    fn materialized(&self) -> Result<Vec<T>, ModelError> {
        let Some(s) = self.coeffs.support_end() else {
            return Err(ModelError::BadParams(
                "operation requires finite support".to_string(),
            ));
        };
        Ok(self.coeffs.materialize(s)?)
    }
}

/// In-place Taylor shift: rewrite polynomial coefficients of `p(z)` into
/// those of `p(z + t)` by repeated synthetic Horner steps — exact for
/// polynomials, `O(d²)` operations, no binomials materialised.
pub fn taylor_shift<T: Scalar>(coeffs: &mut [T], t: T) {
    let d = coeffs.len().saturating_sub(1);
    for i in 0..d {
        for m in (i..d).rev() {
            let up = coeffs[m + 1];
            coeffs[m] += t * up;
        }
    }
}

/// `sup_{|z| ≤ q} |f(z)|` with certified absolute error at most `tol`.
///
/// Nonnegative coefficients put the sup at `z = q` (triangle equality), which
/// is summed directly; otherwise a doubling angular grid bounds the circle
/// sup via `sup ≤ grid max + (π/M)·Σ m|c_m|qᵐ`.
pub fn hd_seminorm<T: Scalar>(
    f: &TaylorFunction<T>,
    q: T,
    tol: T,
) -> Result<SeminormValue<T>, ModelError> {
    if !(T::zero() < q && q < f.declared_radius) {
        return Err(ModelError::BadRadius {
            q: q.to_f64().unwrap_or(f64::NAN),
            radius: f.declared_radius.to_f64().unwrap_or(f64::NAN),
        });
    }
    if !(tol >= T::zero()) {
        return Err(ModelError::BadParams(format!("tolerance must be ≥ 0 (got {tol})")));
    }
    let index = SeminormIndex::Radius(q);

    let Some(support) = f.coeffs.support_end() else {
        return hd_seminorm_infinite(f, q, tol, index);
    };
    let c = f.coeffs.materialize(support)?;

    if c.iter().all(|&v| v >= T::zero()) {
        // Triangle equality at z = q.
        let value = c.iter().rev().fold(T::zero(), |acc, &cm| acc * q + cm);
        return Ok(SeminormValue {
            value,
            abs_error: T::zero(),
            index,
        });
    }

    // Mixed signs: angular grid plus derivative correction.  |d/dθ f(qe^{iθ})|
    // ≤ Σ m|c_m|qᵐ =: D, and every circle point is within π/M of the grid.
    let mut d_bound = T::zero();
    let mut qm = T::one();
    for (m, &cm) in c.iter().enumerate() {
        if m > 0 {
            d_bound += T::of_u64(m as u64) * cm.abs() * qm;
        }
        qm *= q;
    }

    let mut grid_points: u32 = 64;
    loop {
        let corr = d_bound * T::PI() / T::of_u32(grid_points);
        if corr <= tol {
            let gmax = circle_grid_max(&c, q, grid_points);
            return Ok(SeminormValue {
                value: gmax,
                abs_error: corr,
                index,
            });
        }
        if grid_points >= 1 << 22 {
            return Err(ModelError::TolUnreachable {
                achieved: corr.to_f64().unwrap_or(f64::INFINITY),
            });
        }
        grid_points *= 2;
    }
}

fn circle_grid_max<T: Scalar>(c: &[T], q: T, grid_points: u32) -> T {
    let mut gmax = T::zero();
    for i in 0..grid_points {
        let theta = T::of(2.0) * T::PI() * T::of_u32(i) / T::of_u32(grid_points);
        let z = Complex::from_polar(q, theta);
        let v = c
            .iter()
            .rev()
            .fold(Complex::new(T::zero(), T::zero()), |acc, &cm| acc * z + cm);
        gmax = gmax.max(v.norm());
    }
    gmax
}

/// Infinite support: sum a window, certify the coefficient tail from the
/// geometric envelope, and require structurally nonnegative coefficients
/// (sign information beyond any window is otherwise unobtainable).
fn hd_seminorm_infinite<T: Scalar>(
    f: &TaylorFunction<T>,
    q: T,
    tol: T,
    index: SeminormIndex<T>,
) -> Result<SeminormValue<T>, ModelError> {
    let nonneg = matches!(
        f.coeffs.rule(),
        CoeffRule::Ones | CoeffRule::Unit { .. } | CoeffRule::Geometric { .. }
    );
    if !nonneg {
        return Err(ModelError::BadParams(
            "infinite-support circle seminorms need structurally nonnegative \
             coefficients"
                .to_string(),
        ));
    }
    let Envelope::Decay { c, degree, base } = f.coeffs.envelope() else {
        unreachable!("infinite support implies a decay envelope");
    };
    // |c_m| q^m = |x_{m+1}| q^m ≤ (c/q)·u^degree·(base·q)^u with u = m+1.
    let log_ratio = (base * q).ln();
    if log_ratio >= T::zero() {
        return Err(ModelError::TolUnreachable { achieved: f64::INFINITY });
    }
    let mut window: Index = 64;
    loop {
        // Geometric-dominated tail Σ_{u > window} — term ratio at most
        // (1 + 1/u)^max(degree,0) · base·q.
        let u0 = T::of_u64(window + 1);
        let log_rho =
            log_ratio + degree.max(T::zero()) * (T::one() / u0).ln_1p();
        if log_rho < T::zero() {
            let log_head = c.ln() - q.ln() + degree * u0.ln() + u0 * log_ratio;
            let tail = (log_head - (-log_rho.exp()).ln_1p()).exp();
            if tail <= tol {
                let mut sum = CompensatedSum::new();
                let mut qm = T::one();
                for m in 0..window {
                    sum.add(f.coeffs.coeff(m + 1)? * qm);
                    qm *= q;
                }
                return Ok(SeminormValue {
                    value: sum.value(),
                    abs_error: tail,
                    index,
                });
            }
        }
        if window >= 1 << 20 {
            return Err(ModelError::TolUnreachable {
                achieved: f64::INFINITY,
            });
        }
        window *= 2;
    }
}

/// The Cauchy-estimate domination constant `n!·s/(s-q)^{n+1}` in the log
/// domain: `‖f^{(n)}‖_q ≤ cauchy_mu(n,q,s)·‖f‖_s` for `0 < q < s`.
pub fn cauchy_mu<T: Scalar>(n: u32, q: T, s: T) -> Result<T, ModelError> {
    if !(T::zero() < q && q < s) || !s.is_finite() {
        return Err(ModelError::BadParams(format!(
            "Cauchy constant needs 0 < q < s (got q={q}, s={s})"
        )));
    }
    let mut lnf = LnFactorials::<T>::up_to(n as usize);
    Ok(lnf.get(n as usize) + s.ln() - T::of_u32(n + 1) * (s - q).ln())
}

/// The translate-then-evaluate divergence demonstration: shifting the
/// geometric section `f_k` by 1 and evaluating at 3/4 gives exactly
/// `f_k(7/4) = ((7/4)^{k+1} - 1)/(3/4)`, which dominates the lower bound
/// `(3/4)^k·2^k = 1.5^k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceWitness<T> {
    pub k: u32,
    /// `f_k(7/4)`, summed term by term (exact up to rounding).
    pub exact_value: T,
    /// `1.5^k`.
    pub lower_bound: T,
    /// `exact_value ≥ lower_bound` held.
    pub dominates: bool,
}

pub fn divergence_witness<T: Scalar>(k: u32) -> DivergenceWitness<T> {
    let x = T::of(1.75);
    let mut sum = T::zero();
    let mut pow = T::one();
    for _ in 0..=k {
        sum += pow;
        pow *= x;
    }
    let lower_bound = T::of(1.5).powi(k as i32);
    DivergenceWitness {
        k,
        exact_value: sum,
        lower_bound,
        dominates: sum >= lower_bound,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type F = TaylorFunction<f64>;

    #[test]
    fn monomial_seminorm_is_exact_power() {
        // f = z^5 → ‖f‖_q = q^5 exactly.
        let f = F::polynomial(vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let v = hd_seminorm(&f, 0.5, 0.0).unwrap();
        assert_eq!(v.value, 0.5f64.powi(5));
        assert_eq!(v.abs_error, 0.0);
        assert_eq!(v.index, SeminormIndex::Radius(0.5));
    }

    #[test]
    fn geometric_section_seminorm_brackets_closed_form() {
        // f_k on |z| = 1/2: sup |(1 - z^{k+1})/(1 - z)| ∈ [f_k(1/2), 2(1+2^{-k-1})].
        // Positive coefficients put the sup at z = q exactly.
        for k in [3u32, 10, 25] {
            let f = F::geometric_section(k);
            let v = hd_seminorm(&f, 0.5, 0.0).unwrap();
            let at_q = 2.0 * (1.0 - 0.5f64.powi(k as i32 + 1));
            assert!((v.value - at_q).abs() < 1e-14);
            assert_eq!(v.abs_error, 0.0);
            assert!(v.value <= 2.0 * (1.0 + 0.5f64.powi(k as i32 + 1)));
        }
    }

    #[test]
    fn exponential_seminorm_at_one_is_e() {
        let f = F::exponential();
        let v = hd_seminorm(&f, 1.0, 0.0).unwrap();
        assert!((v.value - std::f64::consts::E).abs() < 1e-13);
        assert_eq!(v.abs_error, 0.0);
    }

    #[test]
    fn mixed_sign_grid_brackets_true_sup() {
        // f(z) = 1 - z on |z| = 1/2: sup |1 - z| = 3/2 at z = -1/2.
        let f = F::polynomial(vec![1.0, -1.0]);
        let v = hd_seminorm(&f, 0.5, 1e-6).unwrap();
        assert!(v.value <= 1.5 + 1e-12);
        assert!(v.value + v.abs_error >= 1.5);
        assert!(v.abs_error <= 1e-6);
    }

    #[test]
    fn cauchy_mu_closed_forms() {
        // n=0, q=1/2, s=3/4 → 1·(3/4)/(1/4) = 3.
        assert!((cauchy_mu(0, 0.5f64, 0.75).unwrap().exp() - 3.0).abs() < 1e-12);
        // n=1 → (3/4)/(1/16) = 12.
        assert!((cauchy_mu(1, 0.5f64, 0.75).unwrap().exp() - 12.0).abs() < 1e-11);
        assert!(cauchy_mu(1, 0.75f64, 0.5).is_err());
    }

    #[test]
    fn cauchy_inequality_on_monomials() {
        // ‖(z^m)'‖_q = m·q^{m-1} ≤ cauchy_mu(1,q,s)·s^m for m ≤ 20.
        let (q, s) = (0.5f64, 0.75);
        let mu = cauchy_mu(1, q, s).unwrap().exp();
        for m in 1..=20u32 {
            let mut c = vec![0.0; m as usize + 1];
            c[m as usize] = 1.0;
            let f = F::polynomial(c);
            let lhs = hd_seminorm(&f.derivative(1).unwrap(), q, 0.0).unwrap().value;
            let rhs = mu * hd_seminorm(&f, s, 0.0).unwrap().value;
            assert!(lhs <= rhs * (1.0 + 1e-12), "m={m}: {lhs} > {rhs}");
        }
    }

    #[test]
    fn taylor_shift_matches_binomials() {
        // Shifting f_k by 1 gives coefficients C(k+1, m+1) (hockey-stick sum
        // of binomials), checked against an exact u128 Pascal triangle.
        let k = 20usize;
        let mut c = vec![1.0f64; k + 1];
        taylor_shift(&mut c, 1.0);
        let mut pascal = vec![vec![0u128; k + 2]; k + 2];
        for n in 0..=k + 1 {
            pascal[n][0] = 1;
            for m in 1..=n {
                pascal[n][m] = pascal[n - 1][m - 1]
                    + if m <= n - 1 { pascal[n - 1][m] } else { 0 };
            }
        }
        for (m, &cm) in c.iter().enumerate() {
            let expected = pascal[k + 1][m + 1] as f64;
            assert_eq!(cm, expected, "coefficient of z^{m}");
        }
    }

    #[test]
    fn shift_round_trip_is_identity() {
        let f = F::polynomial(vec![2.0, -3.0, 0.5, 7.0]);
        let g = f.shifted(1.25).unwrap().shifted(-1.25).unwrap();
        for m in 0..=3u32 {
            assert!((f.coefficient(m).unwrap() - g.coefficient(m).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn divergence_witness_matches_geometric_sum() {
        // k=0: both 1.  k=10: bound 1.5^10, exact ((7/4)^11 - 1)/(3/4).
        let w0 = divergence_witness::<f64>(0);
        assert_eq!((w0.exact_value, w0.lower_bound), (1.0, 1.0));
        assert!(w0.dominates);

        let w10 = divergence_witness::<f64>(10);
        assert!((w10.lower_bound - 57.6650390625).abs() < 1e-12);
        let closed = (1.75f64.powi(11) - 1.0) / 0.75;
        assert!((w10.exact_value - 627.241_909_980_773_925_78).abs() < 1e-10);
        assert!((w10.exact_value - closed).abs() < 1e-10);
        assert!(w10.dominates);
    }

    #[test]
    fn divergence_witness_monotone_and_dominant_through_60() {
        let mut prev = 0.0f64;
        for k in 0..=60u32 {
            let w = divergence_witness::<f64>(k);
            assert!(w.dominates, "k={k}");
            assert!(w.exact_value > prev, "k={k} not monotone");
            prev = w.exact_value;
        }
        // 1.5^35 ≈ 1.70×10⁶ passes a million.
        let w35 = divergence_witness::<f64>(35);
        assert!(w35.lower_bound > 1.0e6);
        assert!(w35.exact_value > 1.0e6);
    }

    #[test]
    fn radius_consistency_enforced() {
        // Geometric coefficients with ratio 1/2 live in radius 2.
        let x = CoefficientVector::<f64>::geometric(0.5).unwrap();
        assert!(TaylorFunction::from_vector(x.clone(), 2.0).is_ok());
        assert!(TaylorFunction::from_vector(x.clone(), 3.0).is_err());
        assert!(TaylorFunction::from_vector(x, f64::INFINITY).is_err());
    }

    #[test]
    fn infinite_support_seminorm_certifies_tail() {
        // f(z) = Σ_{m≥0} (1/2)^{m+1} z^m = 1/(2 - z); at q = 1: value 1.
        let x = CoefficientVector::<f64>::geometric(0.5).unwrap();
        let f = TaylorFunction::from_vector(x, 2.0).unwrap();
        let v = hd_seminorm(&f, 1.0, 1e-10).unwrap();
        assert!((v.value - 1.0).abs() <= v.abs_error + 1e-12);
        assert!(v.abs_error <= 1e-10);
    }

    #[test]
    fn seminorm_rejects_radius_out_of_range() {
        let f = F::geometric_section(4);
        assert!(hd_seminorm(&f, 0.5, 0.0).is_ok());
        let x = CoefficientVector::<f64>::geometric(0.5).unwrap();
        let g = TaylorFunction::from_vector(x, 2.0).unwrap();
        assert!(matches!(
            hd_seminorm(&g, 2.0, 1e-9),
            Err(ModelError::BadRadius { .. })
        ));
    }

    #[test]
    fn derivative_pulls_down_coefficients() {
        // (z³)'' = 6z.
        let f = F::polynomial(vec![0.0, 0.0, 0.0, 1.0]);
        let g = f.derivative(2).unwrap();
        assert_eq!(g.coefficient(0).unwrap(), 0.0);
        assert_eq!(g.coefficient(1).unwrap(), 6.0);
        assert_eq!(g.degree(), Some(1));
    }
}
