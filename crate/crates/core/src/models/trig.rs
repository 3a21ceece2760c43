//! Periodic smooth model: finite trigonometric sums with zero mean, graded by
//! sup norms of derivatives over a compact interval.
//!
//! The mode family `sin(kx)`, `cos(kx)` is closed under differentiation and
//! translation, so derivative norms have closed forms (`‖(d/dx)ⁿ sin(k·)‖ =
//! kⁿ` over a full period) and the translation group acts exactly.  This is
//! all the smooth-function machinery the unbounded-growth refutations need.

use crate::scalar::Scalar;
use crate::seqspace::Scope;

use super::ModelError;

/// Phase of a single mode: `sin(kx)` or `cos(kx)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TrigPhase {
    Sin,
    Cos,
}

/// One mode `amplitude · phase(frequency · x)` with integer frequency ≥ 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigMode<T> {
    pub frequency: u64,
    pub phase: TrigPhase,
    pub amplitude: T,
}

impl<T: Scalar> TrigMode<T> {
    pub fn sin(frequency: u64) -> Result<Self, ModelError> {
        Self::new(frequency, TrigPhase::Sin, T::one())
    }

    pub fn cos(frequency: u64) -> Result<Self, ModelError> {
        Self::new(frequency, TrigPhase::Cos, T::one())
    }

    pub fn new(frequency: u64, phase: TrigPhase, amplitude: T) -> Result<Self, ModelError> {
        if frequency == 0 {
            return Err(ModelError::BadParams(
                "mode frequency must be ≥ 1 (the model has zero mean)".to_string(),
            ));
        }
        if !amplitude.is_finite() {
            return Err(ModelError::BadParams(format!(
                "mode amplitude must be finite (got {amplitude})"
            )));
        }
        Ok(TrigMode {
            frequency,
            phase,
            amplitude,
        })
    }

    pub fn eval(&self, x: T) -> T {
        let arg = T::of_u64(self.frequency) * x;
        self.amplitude
            * match self.phase {
                TrigPhase::Sin => arg.sin(),
                TrigPhase::Cos => arg.cos(),
            }
    }

    /// `n`-th derivative: the 4-cycle sin → cos → −sin → −cos with a `kⁿ`
    /// amplitude factor.  Errors when the factor overflows; the log-domain
    /// norm [`trig_norm`] stays exact in that regime.
    pub fn differentiated(&self, n: u32) -> Result<Self, ModelError> {
        let k = T::of_u64(self.frequency);
        let amp = self.amplitude * k.powi(n as i32);
        if !amp.is_finite() {
            return Err(ModelError::BadParams(format!(
                "derivative amplitude k^n overflows (k={}, n={n})",
                self.frequency
            )));
        }
        // sin: +sin, +cos, -sin, -cos;  cos: +cos, -sin, -cos, +sin.
        let (phase, sign) = match (self.phase, n % 4) {
            (p, 0) => (p, T::one()),
            (TrigPhase::Sin, 1) => (TrigPhase::Cos, T::one()),
            (TrigPhase::Sin, 2) => (TrigPhase::Sin, -T::one()),
            (TrigPhase::Sin, _) => (TrigPhase::Cos, -T::one()),
            (TrigPhase::Cos, 1) => (TrigPhase::Sin, -T::one()),
            (TrigPhase::Cos, 2) => (TrigPhase::Cos, -T::one()),
            (TrigPhase::Cos, _) => (TrigPhase::Sin, T::one()),
        };
        Ok(TrigMode {
            frequency: self.frequency,
            phase,
            amplitude: sign * amp,
        })
    }

    /// Exact translate: `sin(k(x+t)) = cos(kt)·sin(kx) + sin(kt)·cos(kx)`,
    /// and the cosine analogue.
    fn translated(&self, t: T) -> [TrigMode<T>; 2] {
        let kt = T::of_u64(self.frequency) * t;
        let (c, s) = (kt.cos(), kt.sin());
        match self.phase {
            TrigPhase::Sin => [
                TrigMode {
                    phase: TrigPhase::Sin,
                    amplitude: self.amplitude * c,
                    ..*self
                },
                TrigMode {
                    phase: TrigPhase::Cos,
                    amplitude: self.amplitude * s,
                    ..*self
                },
            ],
            TrigPhase::Cos => [
                TrigMode {
                    phase: TrigPhase::Cos,
                    amplitude: self.amplitude * c,
                    ..*self
                },
                TrigMode {
                    phase: TrigPhase::Sin,
                    amplitude: -self.amplitude * s,
                    ..*self
                },
            ],
        }
    }
}

/// Finite zero-mean trig sum in canonical form: modes sorted by
/// `(frequency, phase)`, duplicates merged, zero amplitudes dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial<T> {
    modes: Vec<TrigMode<T>>,
}

impl<T: Scalar> TrigPolynomial<T> {
    pub fn from_modes(modes: Vec<TrigMode<T>>) -> Self {
        let mut modes = modes;
        modes.sort_by(|a, b| (a.frequency, a.phase).cmp(&(b.frequency, b.phase)));
        let mut canon: Vec<TrigMode<T>> = Vec::with_capacity(modes.len());
        for m in modes {
            match canon.last_mut() {
                Some(last) if last.frequency == m.frequency && last.phase == m.phase => {
                    last.amplitude += m.amplitude;
                }
                _ => canon.push(m),
            }
        }
        canon.retain(|m| m.amplitude != T::zero());
        TrigPolynomial { modes: canon }
    }

    /// The single witness mode `sin(kx)`.
    pub fn sin(frequency: u64) -> Result<Self, ModelError> {
        Ok(TrigPolynomial {
            modes: vec![TrigMode::sin(frequency)?],
        })
    }

    pub fn modes(&self) -> &[TrigMode<T>] {
        &self.modes
    }

    pub fn is_zero(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn eval(&self, x: T) -> T {
        self.modes.iter().map(|m| m.eval(x)).sum()
    }

    pub fn differentiate(&self, n: u32) -> Result<Self, ModelError> {
        let modes = self
            .modes
            .iter()
            .map(|m| m.differentiated(n))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_modes(modes))
    }

    /// Exact translation `f(· + t)` via angle addition; the translation group
    /// oracle of the model.
    pub fn translate(&self, t: T) -> Self {
        let mut out = Vec::with_capacity(2 * self.modes.len());
        for m in &self.modes {
            out.extend_from_slice(&m.translated(t));
        }
        Self::from_modes(out)
    }
}

/// Which compact interval grades the sup norms: the full torus `[0, 2π]`
/// (default) or a symmetric interval `[-L, L]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrigInterval<T> {
    FullTorus,
    Symmetric { half_width: T },
}

impl<T: Scalar> TrigInterval<T> {
    fn endpoints(&self) -> (T, T) {
        match *self {
            TrigInterval::FullTorus => (T::zero(), T::of(2.0) * T::PI()),
            TrigInterval::Symmetric { half_width } => (-half_width, half_width),
        }
    }

    /// Does the interval contain a full period of frequency `k`?
    fn covers_period(&self, k: u64) -> bool {
        match *self {
            TrigInterval::FullTorus => true,
            TrigInterval::Symmetric { half_width } => {
                T::of(2.0) * half_width * T::of_u64(k) >= T::of(2.0) * T::PI()
            }
        }
    }
}

/// Seminorm identifier of the model: `max_{α ≤ order} sup_interval |f^{(α)}|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompactSeminormIndex<T> {
    pub order: u32,
    pub interval: TrigInterval<T>,
}

impl<T: Scalar> CompactSeminormIndex<T> {
    pub fn full_torus(order: u32) -> Self {
        CompactSeminormIndex {
            order,
            interval: TrigInterval::FullTorus,
        }
    }

    pub fn symmetric(order: u32, half_width: T) -> Result<Self, ModelError> {
        if !(half_width > T::zero()) || !half_width.is_finite() {
            return Err(ModelError::BadParams(format!(
                "interval half-width must be positive and finite (got {half_width})"
            )));
        }
        Ok(CompactSeminormIndex {
            order,
            interval: TrigInterval::Symmetric { half_width },
        })
    }
}

/// `ln` of `max_{α ≤ p} sup_interval |(d/dx)^{n+α} mode|`, with the scope
/// recording whether the closed form `|amp|·k^{n+p}` applied (full period
/// covered) or only a grid evaluation was possible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigNormValue<T> {
    pub log_value: T,
    pub scope: Scope,
}

pub fn trig_norm<T: Scalar>(
    mode: &TrigMode<T>,
    n: u32,
    idx: &CompactSeminormIndex<T>,
) -> Result<TrigNormValue<T>, ModelError> {
    if mode.amplitude == T::zero() {
        return Err(ModelError::BadParams(
            "norm of the zero mode is identically zero; nothing to grade".to_string(),
        ));
    }
    let k = mode.frequency;
    if idx.interval.covers_period(k) {
        // Every derivative attains |amp|·k^power on a full period, and k ≥ 1
        // makes the highest order α = p dominant.
        let log_value = mode.amplitude.abs().ln()
            + T::of_u32(n + idx.order) * T::of_u64(k).ln();
        return Ok(TrigNormValue {
            log_value,
            scope: Scope::ClosedForm,
        });
    }
    Ok(TrigNormValue {
        log_value: trig_norm_grid(mode, n, idx, 10_000)?,
        scope: Scope::ProbedWindow,
    })
}

/// Grid evaluation of the same quantity (a lower bound on the sup): `ln` of
/// the max over `α ≤ p` and grid points.  The grid size is rounded up to a
/// multiple of `4k` so that sine/cosine extrema land exactly on grid points
/// whenever the interval is the full torus.
pub fn trig_norm_grid<T: Scalar>(
    mode: &TrigMode<T>,
    n: u32,
    idx: &CompactSeminormIndex<T>,
    target_points: u32,
) -> Result<T, ModelError> {
    if target_points == 0 {
        return Err(ModelError::BadParams("grid needs at least one point".to_string()));
    }
    let k = mode.frequency;
    let align = 4u64.saturating_mul(k).min(1 << 24);
    let points = align * (target_points as u64).div_ceil(align);
    let (a, b) = idx.interval.endpoints();
    let step = (b - a) / T::of_u64(points);

    // log |amp·k^{n+α}| + ln sup_grid |trig((n+α)-rotated)(kx)| per α.
    let mut best = T::neg_infinity();
    for alpha in 0..=idx.order {
        let order = n + alpha;
        let log_scale =
            mode.amplitude.abs().ln() + T::of_u32(order) * T::of_u64(k).ln();
        // Phase after `order` derivatives, amplitude sign irrelevant for sups.
        let phase = match (mode.phase, order % 2) {
            (p, 0) => p,
            (TrigPhase::Sin, _) => TrigPhase::Cos,
            (TrigPhase::Cos, _) => TrigPhase::Sin,
        };
        let mut sup = T::zero();
        for i in 0..=points {
            let x = a + step * T::of_u64(i);
            let arg = T::of_u64(k) * x;
            let v = match phase {
                TrigPhase::Sin => arg.sin().abs(),
                TrigPhase::Cos => arg.cos().abs(),
            };
            sup = sup.max(v);
        }
        best = best.max(log_scale + sup.ln());
    }
    Ok(best)
}

/// The smallest frequency `k` with `k^{n+p} > μₙ·k^q` at `n = q−p+1`, i.e.
/// `k > μₙ`; exact integer when representable, log-domain threshold beyond.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrequencyWitness<T> {
    Exact(u64),
    /// `k = ⌊μ⌋+1` exceeds `u64`; `ln k` reported instead.
    LogThreshold { log_k: T },
}

/// Demonstration that no constant `μₙ` can dominate the `n`-th derivative:
/// at `n = q−p+1`, `‖f_k^{(n)}‖_p = k^{n+p} = k^{q+1}` outruns `μₙ·k^q` as
/// soon as `k > μₙ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CinftyRefutation<T> {
    pub p: u32,
    pub q: u32,
    /// The probed derivative order `q − p + 1`.
    pub n: u32,
    /// The claimed constant for that order.
    pub mu: T,
    pub witness: FrequencyWitness<T>,
    /// `ln k^{n+p}` at the witness frequency.
    pub log_lhs: T,
    /// `ln (μₙ · k^q)` at the witness frequency.
    pub log_rhs: T,
    /// `log_lhs − log_rhs`, computed stably; strictly positive.
    pub log_excess: T,
}

pub fn cinfty_refutation<T: Scalar>(
    p: u32,
    q: u32,
    mu_list: &[T],
) -> Result<CinftyRefutation<T>, ModelError> {
    if q <= p {
        return Err(ModelError::BadParams(format!(
            "refutation needs q > p (got p={p}, q={q})"
        )));
    }
    let n = q - p + 1;
    if mu_list.len() != n as usize {
        return Err(ModelError::BadParams(format!(
            "need one constant per derivative order 1..={n} (got {} entries)",
            mu_list.len()
        )));
    }
    if let Some(bad) = mu_list.iter().find(|m| !(**m > T::zero()) || !m.is_finite()) {
        return Err(ModelError::BadParams(format!(
            "claimed constants must be positive and finite (got {bad})"
        )));
    }
    let mu = mu_list[n as usize - 1];

    // k^{n+p} > μ·k^q ⟺ k^{q+1} > μ·k^q ⟺ k > μ.
    let (witness, log_k, log_excess) = if mu < T::of(4.503_599_627_370_496e15) {
        // ⌊μ⌋+1 is an exact u64/f64 integer below 2^52.
        let k = mu.floor().to_u64().unwrap_or(0) + 1;
        let kf = T::of_u64(k);
        // ln(k/μ) via ln1p of the exact gap, immune to cancellation.
        (
            FrequencyWitness::Exact(k),
            kf.ln(),
            ((kf - mu) / mu).ln_1p(),
        )
    } else {
        // k = ⌊μ⌋+1 only in log form; ln k − ln μ = ln(1 + 1/μ) ≥ ln1p(1/μ).
        (
            FrequencyWitness::LogThreshold { log_k: mu.ln() },
            mu.ln(),
            (T::one() / mu).ln_1p(),
        )
    };
    Ok(CinftyRefutation {
        p,
        q,
        n,
        mu,
        witness,
        log_lhs: T::of_u32(n + p) * log_k,
        log_rhs: mu.ln() + T::of_u32(q) * log_k,
        log_excess,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_cycle_and_scaling() {
        // (sin 2x)' = 2 cos 2x; (sin 2x)'''' = 16 sin 2x.
        let m = TrigMode::<f64>::sin(2).unwrap();
        let d1 = m.differentiated(1).unwrap();
        assert_eq!((d1.phase, d1.amplitude), (TrigPhase::Cos, 2.0));
        let d4 = m.differentiated(4).unwrap();
        assert_eq!((d4.phase, d4.amplitude), (TrigPhase::Sin, 16.0));
        // cos' = -sin.
        let c = TrigMode::<f64>::cos(3).unwrap().differentiated(1).unwrap();
        assert_eq!((c.phase, c.amplitude), (TrigPhase::Sin, -3.0));
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let f = TrigPolynomial::from_modes(vec![
            TrigMode::<f64>::new(1, TrigPhase::Sin, 0.5).unwrap(),
            TrigMode::new(4, TrigPhase::Cos, -1.25).unwrap(),
        ]);
        let df = f.differentiate(1).unwrap();
        let h = 1e-6;
        for x in [0.0, 0.3, 1.7, 5.9] {
            let fd = (f.eval(x + h) - f.eval(x - h)) / (2.0 * h);
            assert!((df.eval(x) - fd).abs() < 1e-5, "x={x}");
        }
    }

    #[test]
    fn translation_is_exact_group_action() {
        let f = TrigPolynomial::from_modes(vec![
            TrigMode::<f64>::new(2, TrigPhase::Sin, 1.0).unwrap(),
            TrigMode::new(5, TrigPhase::Cos, -0.5).unwrap(),
        ]);
        let t = 0.73;
        let g = f.translate(t);
        for i in 0..100 {
            let x = 0.0628 * i as f64;
            assert!((g.eval(x) - f.eval(x + t)).abs() < 1e-12, "x={x}");
        }
        // Group law: translate(s)∘translate(t) = translate(s+t).
        let h2 = f.translate(0.2).translate(0.3);
        let h1 = f.translate(0.5);
        for i in 0..50 {
            let x = 0.1 * i as f64;
            assert!((h2.eval(x) - h1.eval(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn canonical_form_merges_and_drops() {
        let f = TrigPolynomial::from_modes(vec![
            TrigMode::<f64>::new(3, TrigPhase::Sin, 1.0).unwrap(),
            TrigMode::new(3, TrigPhase::Sin, -1.0).unwrap(),
            TrigMode::new(2, TrigPhase::Cos, 0.5).unwrap(),
        ]);
        assert_eq!(f.modes().len(), 1);
        assert_eq!(f.modes()[0].frequency, 2);
    }

    #[test]
    fn closed_form_norms() {
        // (k,n,p) → k^{n+p}: (1,0,0) → 1; (2,1,0) → 2; (3,2,1) → 27.
        let cases = [(1u64, 0u32, 0u32, 1.0f64), (2, 1, 0, 2.0), (3, 2, 1, 27.0)];
        for (k, n, p, expected) in cases {
            let m = TrigMode::<f64>::sin(k).unwrap();
            let v = trig_norm(&m, n, &CompactSeminormIndex::full_torus(p)).unwrap();
            assert_eq!(v.scope, Scope::ClosedForm);
            assert!(
                (v.log_value.exp() - expected).abs() < 1e-12 * expected,
                "k={k} n={n} p={p}"
            );
        }
    }

    #[test]
    fn grid_agrees_with_closed_form() {
        for (k, n, p) in [(1u64, 0u32, 0u32), (2, 1, 0), (3, 2, 1), (7, 3, 2)] {
            let m = TrigMode::<f64>::sin(k).unwrap();
            let idx = CompactSeminormIndex::full_torus(p);
            let closed = trig_norm(&m, n, &idx).unwrap().log_value;
            let grid = trig_norm_grid(&m, n, &idx, 10_000).unwrap();
            let rel = ((closed.exp() - grid.exp()) / closed.exp()).abs();
            assert!(rel < 1e-8, "k={k} n={n} p={p}: relative gap {rel:e}");
        }
    }

    #[test]
    fn short_interval_is_grid_only_and_smaller() {
        // [-1/10, 1/10] misses the period of sin(x); sup|sin| = sin(0.1) < 1.
        let m = TrigMode::<f64>::sin(1).unwrap();
        let idx = CompactSeminormIndex::symmetric(0, 0.1).unwrap();
        let v = trig_norm(&m, 0, &idx).unwrap();
        assert_eq!(v.scope, Scope::ProbedWindow);
        assert!((v.log_value.exp() - 0.1f64.sin()).abs() < 1e-6);
        // A wide symmetric interval recovers the closed form.
        let wide = CompactSeminormIndex::symmetric(0, 4.0).unwrap();
        assert_eq!(trig_norm(&m, 0, &wide).unwrap().scope, Scope::ClosedForm);
    }

    #[test]
    fn huge_frequency_norm_stays_in_log_domain() {
        // k = 10^15, n+p = 40: k^{n+p} ~ 10^600 overflows f64 but not its log.
        let m = TrigMode::<f64>::sin(1_000_000_000_000_000).unwrap();
        let v = trig_norm(&m, 20, &CompactSeminormIndex::full_torus(20)).unwrap();
        let expected = 40.0 * 1e15f64.ln();
        assert!((v.log_value - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn refutation_thresholds() {
        // p=0, q=1 → n=2, μ₂=10 → k=11.
        let r = cinfty_refutation::<f64>(0, 1, &[1.0, 10.0]).unwrap();
        assert_eq!(r.n, 2);
        assert_eq!(r.witness, FrequencyWitness::Exact(11));
        assert!(r.log_excess > 0.0);
        assert!(r.log_lhs > r.log_rhs);
        // 11² > 10·11 indeed.
        assert!((r.log_lhs.exp() - 121.0).abs() < 1e-9);
        assert!((r.log_rhs.exp() - 110.0).abs() < 1e-9);

        // p=1, q=2 → n=2, μ₂=5 → k=6 with 6³ = 216 > 5·36 = 180.
        let r = cinfty_refutation::<f64>(1, 2, &[1.0, 5.0]).unwrap();
        assert_eq!(r.witness, FrequencyWitness::Exact(6));
        assert!((r.log_lhs.exp() - 216.0).abs() < 1e-9);
        assert!((r.log_rhs.exp() - 180.0).abs() < 1e-9);
    }

    #[test]
    fn refutation_survives_huge_constants() {
        // μ = 10³⁰⁰: witness in log form, excess ln(1+1/μ) > 0, no overflow.
        let r = cinfty_refutation::<f64>(0, 1, &[1.0, 1e300]).unwrap();
        match r.witness {
            FrequencyWitness::LogThreshold { log_k } => {
                assert!((log_k - 1e300f64.ln()).abs() < 1e-9);
            }
            other => panic!("expected log threshold, got {other:?}"),
        }
        assert!(r.log_excess > 0.0);
        assert!(r.log_lhs.is_finite() && r.log_rhs.is_finite());
    }

    #[test]
    fn refutation_validates_input() {
        assert!(cinfty_refutation::<f64>(2, 1, &[1.0]).is_err());
        assert!(cinfty_refutation::<f64>(0, 1, &[1.0]).is_err()); // needs 2 entries
        assert!(cinfty_refutation::<f64>(0, 1, &[1.0, -3.0]).is_err());
        assert!(cinfty_refutation::<f64>(0, 1, &[1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn integer_threshold_exactness_near_boundary() {
        // μ exactly an integer: k = μ+1, not μ.
        let r = cinfty_refutation::<f64>(0, 1, &[1.0, 7.0]).unwrap();
        assert_eq!(r.witness, FrequencyWitness::Exact(8));
        // μ just below an integer: k = that integer.
        let r = cinfty_refutation::<f64>(0, 1, &[1.0, 6.999999]).unwrap();
        assert_eq!(r.witness, FrequencyWitness::Exact(7));
    }
}
