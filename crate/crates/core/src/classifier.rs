//! Classification of an operator's position in the boundedness hierarchy.
//!
//! Conditions, strongest first:
//!
//! - `A-BDD`: one global `μ > 0` with `p(Aⁿx) ≤ μⁿ q(x)` (per `p` some `q`).
//! - `A-BDD-GEN`: the same with a leading constant `M`.
//! - `M-TOP`: per `p` some `q` and `μ_p` with `p(Aⁿx) ≤ μ_pⁿ q(x)`.
//! - `NEW1` (at horizon `R`): per `p` some `q` whose optimal constants `μ_n`
//!   give `Σ μ_n Rⁿ/n! < ∞` — the series radius exceeds `R`.
//! - `NEW2`: some single `R > 0` for which the `NEW1` pattern holds.
//! - `TOP`: per `p` some `q` with every `μ_n` finite.
//!
//! Implications: `A-BDD ⟹ A-BDD-GEN ⟹ M-TOP ⟹ TOP`, `M-TOP ⟹ NEW1` (every
//! `R`), `NEW1 ⟹ NEW2 ⟹ TOP` and `NEW1 ⟹ TOP`.  Checkers emit certificates
//! (with re-checkable constants) or refutations (with strictly growing
//! divergence evidence); [`implication_closure`] audits a report set against
//! the hierarchy.
//!
//! Quantifiers over infinite families (`∀p`, `∃q`, `∃R`) are probed on
//! finite grids; every verdict carries a [`Scope`] recording whether the
//! backing computation was exhaustive (closed form) or window-limited.

use std::fmt;

use thiserror::Error;

use crate::models::{self, ModelError};
use crate::mu::{self, LogMuSequence, MuError};
use crate::operators::{
    continuity_check_in, optimal_mu_in, Attained, DiagonalOperator, DiagonalSymbol,
    Operator, OperatorError, ScanContext, SymbolGrowth,
};
use crate::scalar::Scalar;
use crate::seqspace::{
    Family, ContinuousNorm, Index, KotheMatrix, LrOrder, MatrixError, Scope,
    SeminormError, SeminormIndex, SpaceDescriptor,
};

/// One condition of the hierarchy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConditionTag {
    ABdd,
    ABddGen,
    MTop,
    Top,
    New1,
    New2,
}

impl fmt::Display for ConditionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConditionTag::ABdd => "A-BDD",
            ConditionTag::ABddGen => "A-BDD-GEN",
            ConditionTag::MTop => "M-TOP",
            ConditionTag::Top => "TOP",
            ConditionTag::New1 => "NEW1",
            ConditionTag::New2 => "NEW2",
        })
    }
}

impl std::str::FromStr for ConditionTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A-BDD" => Ok(ConditionTag::ABdd),
            "A-BDD-GEN" => Ok(ConditionTag::ABddGen),
            "M-TOP" => Ok(ConditionTag::MTop),
            "TOP" => Ok(ConditionTag::Top),
            "NEW1" => Ok(ConditionTag::New1),
            "NEW2" => Ok(ConditionTag::New2),
            other => Err(format!("unknown condition {other:?}")),
        }
    }
}

/// Forward edges of the hierarchy: a certified upstream condition forbids a
/// refuted downstream one (subject to the `NEW1` horizon rule).
pub const HIERARCHY_EDGES: &[(ConditionTag, ConditionTag)] = &[
    (ConditionTag::ABdd, ConditionTag::ABddGen),
    (ConditionTag::ABdd, ConditionTag::MTop),
    (ConditionTag::ABdd, ConditionTag::Top),
    (ConditionTag::ABdd, ConditionTag::New1),
    (ConditionTag::ABdd, ConditionTag::New2),
    (ConditionTag::ABddGen, ConditionTag::MTop),
    (ConditionTag::ABddGen, ConditionTag::Top),
    (ConditionTag::MTop, ConditionTag::Top),
    (ConditionTag::MTop, ConditionTag::New1),
    (ConditionTag::MTop, ConditionTag::New2),
    (ConditionTag::New1, ConditionTag::Top),
    (ConditionTag::New1, ConditionTag::New2),
    (ConditionTag::New2, ConditionTag::Top),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Certified,
    Refuted,
    Inconclusive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Certified => "certified",
            Status::Refuted => "refuted",
            Status::Inconclusive => "inconclusive",
        })
    }
}

impl std::str::FromStr for Status {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "certified" => Ok(Status::Certified),
            "refuted" => Ok(Status::Refuted),
            "inconclusive" => Ok(Status::Inconclusive),
            other => Err(format!("unknown status {other:?}")),
        }
    }
}

/// Growth-constant evidence inside a certificate.
#[derive(Debug, Clone, PartialEq)]
pub enum MuEvidence<T> {
    /// `μ_n = M·rateⁿ` in log form.
    Pair { log_m: T, log_rate: T },
    /// A materialised sequence with origin metadata.
    Sequence(LogMuSequence<T>),
}

impl<T: Scalar> MuEvidence<T> {
    /// `ln μ_n` claimed by this evidence, when defined.
    pub fn log_mu(&self, n: u32) -> Option<T> {
        match self {
            MuEvidence::Pair { log_m, log_rate } => Some(*log_m + T::of_u32(n) * *log_rate),
            MuEvidence::Sequence(seq) => seq.log_mu(n),
        }
    }
}

/// One certified `p → q` selection with its growth constants.
#[derive(Debug, Clone, PartialEq)]
pub struct CertEntry<T> {
    pub p: SeminormIndex<T>,
    pub q: SeminormIndex<T>,
    pub mu: MuEvidence<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate<T> {
    pub condition: ConditionTag,
    /// One entry per probed `p`.
    pub entries: Vec<CertEntry<T>>,
    /// For `NEW1`/`NEW2`: the series horizon `R` the certificate covers.
    pub horizon: Option<T>,
    pub scope: Scope,
    pub notes: String,
}

/// The vector (or function) on which a refutation is demonstrated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WitnessRef<T> {
    /// The all-ones sequence.
    Ones,
    /// A unit coordinate vector.
    UnitVector(Index),
    /// A unit vector at a row too large to materialise, recorded as `ln j`.
    UnitVectorNearLog { log_j: T },
    /// The monomial `z^degree`.
    Monomial { degree: u64 },
    /// The mode `sin(frequency·x)`.
    Mode { frequency: u64 },
    /// A mode frequency too large to materialise, recorded as `ln k`.
    ModeNearLog { log_k: T },
}

impl<T: fmt::Display> fmt::Display for WitnessRef<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WitnessRef::Ones => f.write_str("ones"),
            WitnessRef::UnitVector(j) => write!(f, "e_{j}"),
            WitnessRef::UnitVectorNearLog { log_j } => write!(f, "e_j at ln j = {log_j}"),
            WitnessRef::Monomial { degree } => write!(f, "z^{degree}"),
            WitnessRef::Mode { frequency } => write!(f, "sin({frequency}x)"),
            WitnessRef::ModeNearLog { log_k } => write!(f, "sin(kx) at ln k = {log_k}"),
        }
    }
}

/// The axis along which divergence evidence marches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Operator power `n`.
    Power,
    /// Coordinate row `j`.
    Coordinate,
    /// Mode frequency `k`.
    Frequency,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::Power => "n",
            Axis::Coordinate => "j",
            Axis::Frequency => "k",
        })
    }
}

/// One point of divergence evidence: at `position` on `axis` the refuted
/// quantity is at least `exp(log_lower_bound)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergencePoint<T> {
    pub axis: Axis,
    pub position: T,
    pub log_lower_bound: T,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RefutationEvidence<T> {
    /// Strictly increasing lower bounds that outrun every constant.
    Divergence(Vec<DivergencePoint<T>>),
    /// Every candidate `q` yields a series radius at or below the horizon.
    RadiiAtOrBelow {
        horizon: T,
        per_q: Vec<(SeminormIndex<T>, T)>,
    },
}

/// One refuted claim: for the grading index `p_star` (and the shown `q`, when
/// the evidence is per-`q`), the constant `exp(log_mu)` — or every constant,
/// when `log_mu` is `None` — fails on `witness`.
#[derive(Debug, Clone, PartialEq)]
pub struct RefutationEntry<T> {
    pub log_mu: Option<T>,
    pub p_star: SeminormIndex<T>,
    pub q: Option<SeminormIndex<T>>,
    pub witness: WitnessRef<T>,
    pub evidence: RefutationEvidence<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Refutation<T> {
    pub condition: ConditionTag,
    pub entries: Vec<RefutationEntry<T>>,
    /// For `NEW1`/`NEW2`: the horizon at which the condition was refuted.
    pub horizon: Option<T>,
    pub scope: Scope,
    pub notes: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome<T> {
    Certified(Certificate<T>),
    Refuted(Refutation<T>),
    Inconclusive {
        condition: ConditionTag,
        horizon: Option<T>,
        reasons: String,
    },
}

impl<T: Scalar> Outcome<T> {
    pub fn condition(&self) -> ConditionTag {
        match self {
            Outcome::Certified(c) => c.condition,
            Outcome::Refuted(r) => r.condition,
            Outcome::Inconclusive { condition, .. } => *condition,
        }
    }

    pub fn status(&self) -> Status {
        match self {
            Outcome::Certified(_) => Status::Certified,
            Outcome::Refuted(_) => Status::Refuted,
            Outcome::Inconclusive { .. } => Status::Inconclusive,
        }
    }

    pub fn horizon(&self) -> Option<T> {
        match self {
            Outcome::Certified(c) => c.horizon,
            Outcome::Refuted(r) => r.horizon,
            Outcome::Inconclusive { horizon, .. } => *horizon,
        }
    }

    pub fn scope(&self) -> Option<Scope> {
        match self {
            Outcome::Certified(c) => Some(c.scope),
            Outcome::Refuted(r) => Some(r.scope),
            Outcome::Inconclusive { .. } => None,
        }
    }
}

/// A hierarchy fact derived (not directly probed) from the stated outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedFact<T> {
    pub condition: ConditionTag,
    pub status: Status,
    pub horizon: Option<T>,
    pub via: String,
}

/// Consistency audit of a report set against the implication diagram.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict<T> {
    pub violations: Vec<String>,
    pub derived: Vec<DerivedFact<T>>,
    pub consistent: bool,
}

/// Finite probing grids for the quantifiers.
#[derive(Debug, Clone)]
pub struct ProbeConfig<T> {
    /// Row-scan horizon for sequence-space work.
    pub j_max: Index,
    /// Largest probed operator power in μ-sequence scans.
    pub n_probe: u32,
    /// Probed `p` grading indices (columns for sequence spaces, derivative
    /// orders for the periodic model).
    pub p_list: Vec<u32>,
    /// `q` candidates per `p`: `p ..= p + q_span`.
    pub q_span: u32,
    /// `μ` grid for the global-constant search: powers of two, exponents
    /// `mu_grid_log2.0 ..= mu_grid_log2.1`.
    pub mu_grid_log2: (i32, i32),
    /// Probed radii for the disc/plane models (each in `(0,1)` for the disc).
    pub p_radii: Vec<T>,
    /// Series horizons checked by the driver for `NEW1`.
    pub r_list: Vec<T>,
    /// Descending grid searched for the single `NEW2` horizon.
    pub r_grid: Vec<T>,
}

impl<T: Scalar> Default for ProbeConfig<T> {
    fn default() -> Self {
        ProbeConfig {
            j_max: 100_000,
            n_probe: 128,
            p_list: vec![1, 2, 3],
            q_span: 16,
            mu_grid_log2: (-4, 16),
            p_radii: vec![T::of(0.5), T::of(0.75)],
            r_list: vec![T::one()],
            r_grid: vec![T::one(), T::of(0.5), T::of(0.2), T::of(0.1)],
        }
    }
}

impl<T: Scalar> ProbeConfig<T> {
    pub fn q_candidates(&self, p: u32) -> Vec<u32> {
        (p..=p + self.q_span).collect()
    }

    pub fn mu_grid(&self) -> Vec<T> {
        (self.mu_grid_log2.0..=self.mu_grid_log2.1)
            .map(|e| T::of(2.0).powi(e))
            .collect()
    }
}

/// What is being classified.
#[derive(Debug, Clone)]
pub enum Problem<T> {
    /// An operator on a graded sequence space.
    Kothe {
        space: SpaceDescriptor<T>,
        op: Operator<T>,
    },
    /// Differentiation on Taylor coefficients, radius grading `q ∈ (0, 1)`.
    DiscTaylor,
    /// Differentiation on Taylor coefficients of entire functions, radius
    /// grading `q ∈ (0, ∞)`.
    EntireTaylor,
    /// Differentiation on zero-mean trig sums, derivative-order grading.
    PeriodicSmooth,
}

impl<T: Scalar> Problem<T> {
    pub fn label(&self) -> String {
        match self {
            Problem::Kothe { op, .. } => op.label(),
            Problem::DiscTaylor => "d/dz on the disc Taylor model".to_string(),
            Problem::EntireTaylor => "d/dz on the entire Taylor model".to_string(),
            Problem::PeriodicSmooth => "d/dx on the periodic smooth model".to_string(),
        }
    }
}

#[derive(Debug, Error)]
pub enum ClassifierError {
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Seminorm(#[from] SeminormError),
    #[error(transparent)]
    Mu(#[from] MuError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("continuity not certified for {label}: {detail}")]
    Continuity { label: String, detail: String },
    #[error(
        "the grading admits a continuous norm; the kernel-chain construction \
         needs strictly shrinking kernels — construction inapplicable"
    )]
    ConstructionInapplicable,
    #[error("no construction row for step n={n} within the probe window {j_probe}")]
    ConstructionExhausted { n: u32, j_probe: Index },
}

// ---------------------------------------------------------------------------
// Shared sequence-space machinery
// ---------------------------------------------------------------------------

/// A certificate-grade μ-sequence for one `(p, q)` pair, or why there is none.
enum PairSequence<T> {
    Ready {
        seq: LogMuSequence<T>,
        scope: Scope,
        settled: bool,
    },
    /// Some order has a divergent sup over `j`.
    Diverges {
        n: u32,
        attained: Attained<T>,
        marks: Vec<(Index, T)>,
    },
    /// A row visible to `p` is invisible to `q`: no constant can work.
    NoDomination { n: u32, detail: String },
}

/// Geometric rate certifying `p(Aⁿx) ≤ rateⁿ q(x)` coordinatewise for
/// `q ≥ p`, when the structure provides one.
fn structural_rate<T: Scalar>(
    space: &SpaceDescriptor<T>,
    symbol: &DiagonalSymbol<T>,
    p: u32,
    growth: Option<&SymbolGrowth<T>>,
) -> Option<(T, Scope)> {
    if let Some(SymbolGrowth::Bounded { sup, scope }) = growth {
        // Window-fitted sups get a relative margin so creeping symbols stay
        // below the certified rate on the probed rows.
        let margin = if *scope == Scope::ClosedForm {
            T::one()
        } else {
            T::one() + T::of(1e-6)
        };
        return Some((*sup * margin, *scope));
    }
    if *space.matrix.family() == Family::Omega {
        // The p-th seminorm only sees rows j ≤ p; the section sup is exact.
        let support = p as Index;
        match symbol {
            DiagonalSymbol::Index => Some((T::of_u64(support), Scope::ClosedForm)),
            DiagonalSymbol::LogIndex => Some((T::of_u64(support).ln(), Scope::ClosedForm)),
            DiagonalSymbol::SparseRamp { indices } => {
                let cnt = indices.partition_point(|&j| j <= support) as u64;
                Some((T::of_u64(cnt), Scope::ClosedForm))
            }
            _ => None,
        }
    } else {
        None
    }
}

/// Positive rate for sequence constructors: a vanishing section sup still
/// certifies with `μ = 1` (the inequality only weakens upward).
fn positive_rate<T: Scalar>(rate: T) -> T {
    if rate > T::zero() {
        rate
    } else {
        T::one()
    }
}

fn pair_sequence<T: Scalar>(
    ctx: &mut ScanContext<T>,
    op: &Operator<T>,
    space: &SpaceDescriptor<T>,
    p: u32,
    q: u32,
    n_max: u32,
    growth: Option<&SymbolGrowth<T>>,
) -> Result<PairSequence<T>, ClassifierError> {
    if let Operator::Diagonal(d) = op {
        if q >= p {
            if let Some((rate, scope)) = structural_rate(space, &d.symbol, p, growth) {
                let seq =
                    LogMuSequence::from_geometric(T::one(), positive_rate(rate), n_max)?;
                return Ok(PairSequence::Ready {
                    seq,
                    scope,
                    settled: true,
                });
            }
        }
        // The model pair behind the power-law sequence: unbounded logarithmic
        // symbol against a power-weight grading, where the sup over rows has
        // the closed peak (n/d)ⁿe⁻ⁿ at ln j = n/d.
        if *space.matrix.family() == Family::RapidDecay
            && matches!(d.symbol, DiagonalSymbol::LogIndex)
            && q > p
        {
            let d_gap = T::of_u32(q - p);
            let seq = LogMuSequence::power_form(d_gap, n_max)?;
            // Guard against implementation drift: the closed form must
            // dominate the independently scanned optimum.
            let valid = [1u32, 2, 5, n_max.max(1)].iter().all(|&n| {
                match optimal_mu_in(ctx, op, space, p, q, n) {
                    Ok(w) => seq.log_mu(n).map_or(false, |v| v + T::of(1e-9) >= w.log_mu),
                    Err(_) => false,
                }
            });
            if valid {
                return Ok(PairSequence::Ready {
                    seq,
                    scope: Scope::ClosedForm,
                    settled: true,
                });
            }
        }
    }

    let mut vals = Vec::with_capacity(n_max as usize + 1);
    let mut all_exact = true;
    let mut settled = true;
    for n in 0..=n_max {
        match optimal_mu_in(ctx, op, space, p, q, n) {
            Ok(w) => {
                if w.log_mu == T::infinity() {
                    return Ok(PairSequence::Diverges {
                        n,
                        attained: w.attained,
                        marks: w.decade_marks,
                    });
                }
                all_exact &= w.exact;
                settled &= w.stabilized;
                vals.push(w.log_mu);
            }
            Err(OperatorError::NoDomination { witness_j, .. }) => {
                return Ok(PairSequence::NoDomination {
                    n,
                    detail: format!("row {witness_j}"),
                });
            }
            Err(e) => return Err(e.into()),
        }
    }
    let seq = LogMuSequence::from_scan(
        vals,
        (SeminormIndex::Column(p), SeminormIndex::Column(q)),
        ctx.jmax(),
        all_exact,
    )?;
    Ok(PairSequence::Ready {
        seq,
        scope: Scope::ProbedWindow,
        settled,
    })
}

/// Divergence evidence from scan decade marks: strictly increasing marks
/// spanning at least three decades of `j`, or `None` when the window cannot
/// honestly distinguish growth from a plateau.
fn marks_evidence<T: Scalar>(marks: &[(Index, T)]) -> Option<Vec<DivergencePoint<T>>> {
    let pts: Vec<DivergencePoint<T>> = marks
        .iter()
        .map(|&(j, v)| DivergencePoint {
            axis: Axis::Coordinate,
            position: T::of_u64(j),
            log_lower_bound: v,
        })
        .collect();
    let strictly_up = pts
        .windows(2)
        .all(|w| w[1].log_lower_bound > w[0].log_lower_bound && w[1].position > w[0].position);
    if pts.len() >= 4 && strictly_up {
        let span = pts.last().unwrap().position / pts[0].position;
        if span >= T::of(999.0) {
            return Some(pts);
        }
    }
    None
}

fn witness_from_attained<T: Scalar>(a: &Attained<T>) -> WitnessRef<T> {
    match a {
        Attained::At { j } | Attained::WindowEdge { j } => WitnessRef::UnitVector(*j),
        Attained::AtLog { log_j } => WitnessRef::UnitVectorNearLog { log_j: *log_j },
        Attained::Nowhere => WitnessRef::UnitVector(1),
    }
}

// ---------------------------------------------------------------------------
// check_a_bounded
// ---------------------------------------------------------------------------

/// Decide the single-global-constant condition.
pub fn check_a_bounded<T: Scalar>(
    problem: &Problem<T>,
    cfg: &ProbeConfig<T>,
) -> Result<Outcome<T>, ClassifierError> {
    match problem {
        Problem::Kothe { space, op } => match op {
            Operator::Diagonal(d) => a_bounded_diagonal(space, d, cfg),
            Operator::TaylorDifferentiation => Ok(Outcome::Inconclusive {
                condition: ConditionTag::ABdd,
                horizon: None,
                reasons: "no structural global-constant path for coefficient-shift \
                          operators on sequence gradings"
                    .to_string(),
            }),
        },
        Problem::DiscTaylor => Ok(disc_power_refutation(
            ConditionTag::ABdd,
            cfg,
            "every global constant μ is outrun: for f = z^{2n}, \
             ‖f⁽ⁿ⁾‖_q/(μⁿ‖f‖_s) ≥ ((n+1)q/μ)ⁿ for every s < 1, so n > μ/q diverges",
        )),
        Problem::EntireTaylor => Ok(entire_power_refutation(
            ConditionTag::ABdd,
            cfg,
            "for f = zⁿ, ‖f⁽ⁿ⁾‖_q/(μⁿ‖f‖_s) = n!/(μs)ⁿ diverges for every s and μ \
             once n > e·μ·s",
        )),
        Problem::PeriodicSmooth => Ok(periodic_refutation(
            ConditionTag::ABdd,
            cfg,
            "for every q and μ, the order n = q−p+1 gives \
             ‖Aⁿ sin(k·)‖_p/(μⁿ‖sin(k·)‖_q) = k/μⁿ → ∞ in the frequency k",
        )),
    }
}

fn a_bounded_diagonal<T: Scalar>(
    space: &SpaceDescriptor<T>,
    d: &DiagonalOperator<T>,
    cfg: &ProbeConfig<T>,
) -> Result<Outcome<T>, ClassifierError> {
    let growth = match d.symbol.growth(cfg.j_max) {
        Ok(g) => Some(g),
        Err(OperatorError::GrowthUnbounded { .. }) => None,
        Err(e) => return Err(e.into()),
    };

    if let Some(SymbolGrowth::Bounded { sup, scope }) = growth {
        let rate = positive_rate(if scope == Scope::ClosedForm {
            sup
        } else {
            sup * (T::one() + T::of(1e-6))
        });
        let entries = cfg
            .p_list
            .iter()
            .map(|&p| CertEntry {
                p: SeminormIndex::Column(p),
                q: SeminormIndex::Column(p),
                mu: MuEvidence::Pair {
                    log_m: T::zero(),
                    log_rate: rate.ln(),
                },
            })
            .collect();
        return Ok(Outcome::Certified(Certificate {
            condition: ConditionTag::ABdd,
            entries,
            horizon: None,
            scope,
            notes: format!(
                "μ = sup|a_j| = {rate}; the inequality holds coordinatewise with q = p \
                 for every grading index (entries list the probed sample)"
            ),
        }));
    }

    // Unbounded symbol: defeat each grid μ with an explicit witness.
    let mut entries = Vec::new();
    let mut unresolved = Vec::new();
    let mut scope = Scope::ClosedForm;
    for mu in cfg.mu_grid() {
        match refute_one_mu(space, d, mu, cfg)? {
            Some((entry, entry_scope)) => {
                scope = scope.combine(entry_scope);
                entries.push(entry);
            }
            None => unresolved.push(format!("μ = {mu}")),
        }
    }
    if !unresolved.is_empty() {
        return Ok(Outcome::Inconclusive {
            condition: ConditionTag::ABdd,
            horizon: None,
            reasons: format!(
                "no witness row with |a_j| beyond the constant was found for {} \
                 within the probe budget",
                unresolved.join(", ")
            ),
        });
    }
    let notes = if *space.matrix.family() == Family::Omega {
        "each grid μ is defeated by the all-ones vector at the smallest grading p \
         whose section sup exceeds μ; the same construction works for every μ > 0, \
         and the divergence holds for every q because q(𝟙) is finite for each q"
            .to_string()
    } else {
        "each grid μ is defeated by a unit vector at a row where |a_j| ≥ 2μ; the \
         ratio (|a_j|/μ)ⁿ outruns the fixed constant b_{j,q}/b_{j,p} of every q"
            .to_string()
    };
    Ok(Outcome::Refuted(Refutation {
        condition: ConditionTag::ABdd,
        entries,
        horizon: None,
        scope,
        notes,
    }))
}

/// Section sup of `|a_j|` over rows visible to column `k`, with exactness.
fn column_symbol_sup<T: Scalar>(
    space: &SpaceDescriptor<T>,
    symbol: &DiagonalSymbol<T>,
    k: u32,
) -> Result<Option<(T, bool)>, ClassifierError> {
    if *space.matrix.family() != Family::Omega {
        return Ok(None);
    }
    let support = k as Index;
    let out = match symbol {
        DiagonalSymbol::Index => Some((T::of_u64(support), true)),
        DiagonalSymbol::LogIndex => Some((T::of_u64(support).ln(), true)),
        DiagonalSymbol::Constant(c) => Some((c.abs(), true)),
        DiagonalSymbol::SparseRamp { indices } => {
            let cnt = indices.partition_point(|&j| j <= support) as u64;
            Some((T::of_u64(cnt), true))
        }
        DiagonalSymbol::Expr(_) => {
            if support <= 1 << 17 {
                let mut sup = T::zero();
                for j in 1..=support {
                    let v = symbol
                        .value(j)
                        .map_err(|source| OperatorError::Symbol { j, source })?
                        .abs();
                    sup = sup.max(v);
                }
                Some((sup, true))
            } else {
                None
            }
        }
    };
    Ok(out)
}

/// Defeat a single claimed global constant `μ` on an unbounded diagonal.
fn refute_one_mu<T: Scalar>(
    space: &SpaceDescriptor<T>,
    d: &DiagonalOperator<T>,
    mu: T,
    cfg: &ProbeConfig<T>,
) -> Result<Option<(RefutationEntry<T>, Scope)>, ClassifierError> {
    let log_mu = mu.ln();

    // Window-graded spaces admit the all-ones witness: q(𝟙) is finite for
    // every q, so divergence of p(Aⁿ𝟙) against μⁿ is q-free.
    if *space.matrix.family() == Family::Omega {
        // Smallest grading whose section sup exceeds μ (section sups are
        // nondecreasing in the grading index).
        let mut k: u32 = 1;
        let mut found = None;
        while k <= 1 << 22 {
            if let Some((sup, exact)) = column_symbol_sup(space, &d.symbol, k)? {
                if sup > mu {
                    // Walk back to the smallest such k.
                    let mut lo = 1u32;
                    let mut hi = k;
                    while lo < hi {
                        let mid = lo + (hi - lo) / 2;
                        let (sup_mid, _) =
                            column_symbol_sup(space, &d.symbol, mid)?.unwrap();
                        if sup_mid > mu {
                            hi = mid;
                        } else {
                            lo = mid + 1;
                        }
                    }
                    let (sup_lo, exact_lo) = column_symbol_sup(space, &d.symbol, lo)?.unwrap();
                    found = Some((lo, sup_lo, exact && exact_lo));
                    break;
                }
            } else {
                return Ok(None);
            }
            k = k.saturating_mul(2);
        }
        let Some((p_star, sup, exact)) = found else {
            return Ok(None);
        };
        // p(Aⁿ𝟙) ≥ supⁿ (max-term bound; equality for the sup order) while
        // q(𝟙) is the fixed constant of each q.
        let ln_ones = match space.order {
            LrOrder::Infinity => T::zero(),
            LrOrder::Finite(r) => T::of_u64(p_star as Index).ln() / T::of(r),
        };
        let slope = sup.ln() - log_mu;
        let n0 = (ln_ones / slope).max(T::zero()).floor() + T::one();
        let points = (0..4)
            .map(|i| {
                let n = n0 * T::of(10.0).powi(i);
                DivergencePoint {
                    axis: Axis::Power,
                    position: n,
                    log_lower_bound: n * slope - ln_ones,
                }
            })
            .collect();
        let entry = RefutationEntry {
            log_mu: Some(log_mu),
            p_star: SeminormIndex::Column(p_star),
            q: None,
            witness: WitnessRef::Ones,
            evidence: RefutationEvidence::Divergence(points),
        };
        let scope = if exact {
            Scope::ClosedForm
        } else {
            Scope::ProbedWindow
        };
        return Ok(Some((entry, scope)));
    }

    // Generic path: a unit vector at a row with |a_j| ≥ 2μ.
    let target = (T::of(2.0) * mu).ln();
    let (witness, log_j, log_a) = match find_row_with_symbol_at_least(&d.symbol, target)? {
        Some(t) => t,
        None => return Ok(None),
    };
    // Smallest grading index that sees the witness row.
    let p_star = match smallest_positive_column(space, &witness)? {
        Some(k) => k,
        None => return Ok(None),
    };
    let q_shown = p_star + cfg.q_span;
    let log_b_p = log_weight_at(space, &witness, log_j, p_star)?;
    let log_b_q = log_weight_at(space, &witness, log_j, q_shown)?;
    if log_b_p == T::neg_infinity() {
        return Ok(None);
    }
    // Ratio on e_j: (|a_j|/μ)ⁿ · b_{j,p}/b_{j,q}.
    let offset = log_b_p - if log_b_q == T::neg_infinity() {
        // q cannot see the row at all: every n ≥ 1 already diverges.
        log_b_p
    } else {
        log_b_q
    };
    let slope = log_a - log_mu;
    let n0 = ((-offset) / slope).max(T::zero()).floor() + T::one();
    let points = (0..4)
        .map(|i| {
            let n = n0 * T::of(10.0).powi(i);
            DivergencePoint {
                axis: Axis::Power,
                position: n,
                log_lower_bound: n * slope + offset,
            }
        })
        .collect();
    let entry = RefutationEntry {
        log_mu: Some(log_mu),
        p_star: SeminormIndex::Column(p_star),
        q: Some(SeminormIndex::Column(q_shown)),
        witness,
        evidence: RefutationEvidence::Divergence(points),
    };
    Ok(Some((entry, Scope::ProbedWindow)))
}

/// A row where `ln|a_j|` reaches `target`, as a witness reference plus the
/// row's `ln j` and `ln|a_j|`.  Closed forms for the built-in symbols; a
/// log-spaced probe for expressions.
fn find_row_with_symbol_at_least<T: Scalar>(
    symbol: &DiagonalSymbol<T>,
    target: T,
) -> Result<Option<(WitnessRef<T>, T, T)>, ClassifierError> {
    match symbol {
        DiagonalSymbol::Index => {
            // a_j = j: row ⌈exp(target)⌉.
            let log_j = target.max(T::zero());
            if log_j <= T::of(34.5) {
                let j = log_j.exp().ceil().to_u64().unwrap_or(1).max(1);
                Ok(Some((
                    WitnessRef::UnitVector(j),
                    T::of_u64(j).ln(),
                    T::of_u64(j).ln(),
                )))
            } else {
                Ok(Some((
                    WitnessRef::UnitVectorNearLog { log_j },
                    log_j,
                    log_j,
                )))
            }
        }
        DiagonalSymbol::LogIndex => {
            // a_j = ln j: row with ln j = exp(target).
            let log_j = target.exp().max(T::one());
            if log_j <= T::of(34.5) {
                let j = log_j.exp().ceil().to_u64().unwrap_or(2).max(2);
                Ok(Some((
                    WitnessRef::UnitVector(j),
                    T::of_u64(j).ln(),
                    T::of_u64(j).ln().ln(),
                )))
            } else {
                Ok(Some((
                    WitnessRef::UnitVectorNearLog { log_j },
                    log_j,
                    log_j.ln(),
                )))
            }
        }
        DiagonalSymbol::Constant(_) => Ok(None),
        DiagonalSymbol::SparseRamp { indices } => {
            // a_{indices[i]} = i+1.
            let need = target.exp().ceil().to_u64().unwrap_or(u64::MAX);
            let i = (need.max(1) - 1) as usize;
            match indices.get(i) {
                Some(&j) => Ok(Some((
                    WitnessRef::UnitVector(j),
                    T::of_u64(j).ln(),
                    T::of_u64(i as u64 + 1).ln(),
                ))),
                None => Ok(None),
            }
        }
        DiagonalSymbol::Expr(_) => {
            let mut j: Index = 1;
            while j <= 1 << 50 {
                let la = symbol
                    .log_abs(j)
                    .map_err(|source| OperatorError::Symbol { j, source })?;
                if la >= target {
                    return Ok(Some((WitnessRef::UnitVector(j), T::of_u64(j).ln(), la)));
                }
                j = (j + j / 8).max(j + 1);
            }
            Ok(None)
        }
    }
}

/// Smallest column index with positive weight at the witness row.
fn smallest_positive_column<T: Scalar>(
    space: &SpaceDescriptor<T>,
    witness: &WitnessRef<T>,
) -> Result<Option<u32>, ClassifierError> {
    match space.matrix.family() {
        Family::Omega => match witness {
            WitnessRef::UnitVector(j) if *j <= u32::MAX as Index => Ok(Some(*j as u32)),
            _ => Ok(None),
        },
        // j^k ≥ 1 > 0 already at k = 1, for any row.
        Family::RapidDecay => Ok(Some(1)),
        Family::Custom(_) => {
            let WitnessRef::UnitVector(j) = witness else {
                return Ok(None);
            };
            for k in 1..=256u32 {
                if space.matrix.entry(*j, k)? > T::zero() {
                    return Ok(Some(k));
                }
            }
            Ok(None)
        }
    }
}

/// `ln b(j, k)` evaluated through the witness (log rows use family closed
/// forms).
fn log_weight_at<T: Scalar>(
    space: &SpaceDescriptor<T>,
    witness: &WitnessRef<T>,
    log_j: T,
    k: u32,
) -> Result<T, ClassifierError> {
    match witness {
        WitnessRef::UnitVector(j) => Ok(space.matrix.log_entry(*j, k)?),
        WitnessRef::UnitVectorNearLog { .. } => match space.matrix.family() {
            Family::Omega => Ok(if log_j <= T::of_u64(k as Index).ln() {
                T::zero()
            } else {
                T::neg_infinity()
            }),
            Family::RapidDecay => Ok(T::of_u32(k) * log_j),
            Family::Custom(_) => Ok(T::nan()),
        },
        _ => Ok(T::nan()),
    }
}

// ---------------------------------------------------------------------------
// check_m_top
// ---------------------------------------------------------------------------

/// Decide the per-`p` geometric-constant condition.
pub fn check_m_top<T: Scalar>(
    problem: &Problem<T>,
    cfg: &ProbeConfig<T>,
) -> Result<Outcome<T>, ClassifierError> {
    match problem {
        Problem::Kothe { space, op } => match op {
            Operator::Diagonal(d) => m_top_diagonal(space, op, d, cfg),
            Operator::TaylorDifferentiation => Ok(Outcome::Inconclusive {
                condition: ConditionTag::MTop,
                horizon: None,
                reasons: "no structural geometric-rate path for coefficient-shift \
                          operators on sequence gradings"
                    .to_string(),
            }),
        },
        Problem::DiscTaylor => Ok(disc_power_refutation(
            ConditionTag::MTop,
            cfg,
            "for every constant μ and every s < 1, the optimal n-th constant is at \
             least ((n+1)q)ⁿ (monomial f = z^{2n}), which outruns μⁿ",
        )),
        Problem::EntireTaylor => Ok(entire_power_refutation(
            ConditionTag::MTop,
            cfg,
            "for every s and μ, n! > (sμ)ⁿ once n > e·s·μ (monomial f = zⁿ), so no \
             geometric rate dominates",
        )),
        Problem::PeriodicSmooth => Ok(periodic_refutation(
            ConditionTag::MTop,
            cfg,
            "already the order n = q−p+1 has no finite constant at all \
             (frequency divergence), so no geometric rate exists",
        )),
    }
}

fn m_top_diagonal<T: Scalar>(
    space: &SpaceDescriptor<T>,
    op: &Operator<T>,
    d: &DiagonalOperator<T>,
    cfg: &ProbeConfig<T>,
) -> Result<Outcome<T>, ClassifierError> {
    let growth = match d.symbol.growth(cfg.j_max) {
        Ok(g) => Some(g),
        Err(OperatorError::GrowthUnbounded { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let mut ctx = ScanContext::new(cfg.j_max);

    let mut entries = Vec::new();
    let mut cert_scope = Scope::ClosedForm;
    let mut unsettled = Vec::new();

    // Powers of two: slopes (ln μ_n)/n are then exact quotients.
    let n_grid: Vec<u32> = (0..)
        .map(|i| 1u32 << i)
        .take_while(|&n| n <= cfg.n_probe)
        .collect();

    'p_loop: for &p in &cfg.p_list {
        // Structural geometric rate: certificate with q = p.
        if let Some((rate, scope)) = structural_rate(space, &d.symbol, p, growth.as_ref()) {
            cert_scope = cert_scope.combine(scope);
            entries.push(CertEntry {
                p: SeminormIndex::Column(p),
                q: SeminormIndex::Column(p),
                mu: MuEvidence::Pair {
                    log_m: T::zero(),
                    log_rate: positive_rate(rate).ln(),
                },
            });
            continue;
        }

        let mut per_q_refutations = Vec::new();
        let mut refutations_exact = true;
        let mut q_unsettled = Vec::new();
        for q in cfg.q_candidates(p) {
            // Slope test on the probed powers.
            let mut slopes: Vec<T> = Vec::new();
            let mut witnesses_exact = true;
            let mut all_settled = true;
            let mut diverged = None;
            let mut no_domination = false;
            for &n in &n_grid {
                match optimal_mu_in(&mut ctx, op, space, p, q, n) {
                    Ok(w) => {
                        if w.log_mu == T::infinity() {
                            diverged = Some(w);
                            break;
                        }
                        witnesses_exact &= w.exact;
                        all_settled &= w.stabilized;
                        slopes.push(w.log_mu / T::of_u32(n));
                    }
                    Err(OperatorError::NoDomination { .. }) => {
                        no_domination = true;
                        break;
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            // A flat slope over the probed powers alone cannot rule out a
            // divergence just beyond them, so escalate the power axis before
            // accepting a certificate.  Closed-form witnesses price this at
            // O(1); window scans at escalated powers push the attaining row
            // to the window edge and clear `stabilized`, which blocks the
            // certificate instead.
            if diverged.is_none() && !no_domination && !slopes.is_empty() {
                let n_top = *n_grid.last().unwrap();
                let escalated = [
                    n_top.saturating_mul(4),
                    n_top.saturating_mul(64),
                    1u32 << 30,
                ];
                for n in escalated {
                    if n <= n_top {
                        continue;
                    }
                    match optimal_mu_in(&mut ctx, op, space, p, q, n) {
                        Ok(w) => {
                            if w.log_mu == T::infinity() {
                                diverged = Some(w);
                                break;
                            }
                            witnesses_exact &= w.exact;
                            all_settled &= w.stabilized;
                            slopes.push(w.log_mu / T::of_u32(n));
                        }
                        Err(OperatorError::NoDomination { .. }) => {
                            no_domination = true;
                            break;
                        }
                        Err(e) => return Err(e.into()),
                    }
                }
            }
            if let Some(w) = diverged {
                // This q fails outright; usable as refutation evidence.
                if let Some(points) = marks_evidence(&w.decade_marks) {
                    refutations_exact &= w.exact;
                    per_q_refutations.push(RefutationEntry {
                        log_mu: None,
                        p_star: SeminormIndex::Column(p),
                        q: Some(SeminormIndex::Column(q)),
                        witness: witness_from_attained(&w.attained),
                        evidence: RefutationEvidence::Divergence(points),
                    });
                } else {
                    q_unsettled.push(format!(
                        "q={q}: sup diverges but growth evidence spans under three decades"
                    ));
                }
                continue;
            }
            if no_domination || slopes.is_empty() {
                q_unsettled.push(format!("q={q}: no domination"));
                continue;
            }
            let max_slope = slopes.iter().copied().fold(T::neg_infinity(), T::max);
            let min_slope = slopes.iter().copied().fold(T::infinity(), T::min);
            let flat = (max_slope - min_slope) <= T::of(1e-6) * T::one().max(max_slope.abs());
            if flat && all_settled {
                // The escalated powers above stress-tested the flatness, but
                // the certificate stays window-scoped: finitely many powers
                // cannot bound the whole axis without structural knowledge.
                let _ = witnesses_exact;
                cert_scope = cert_scope.combine(Scope::ProbedWindow);
                entries.push(CertEntry {
                    p: SeminormIndex::Column(p),
                    q: SeminormIndex::Column(q),
                    mu: MuEvidence::Pair {
                        log_m: T::zero(),
                        log_rate: max_slope,
                    },
                });
                continue 'p_loop;
            }
            // Not flat: try to demonstrate slope divergence.  Exact
            // closed-form witnesses permit evaluation at large n.
            if witnesses_exact {
                let d_gap = (q - p).max(1);
                let probe_ns: Vec<u32> =
                    [10, 100, 1_000, 10_000].iter().map(|&m| m * d_gap).collect();
                let mut pts = Vec::new();
                let mut last_witness = None;
                let mut ok = true;
                for &n in &probe_ns {
                    match optimal_mu_in(&mut ctx, op, space, p, q, n) {
                        Ok(w) if w.exact && w.log_mu < T::infinity() => {
                            pts.push(DivergencePoint {
                                axis: Axis::Power,
                                position: T::of_u32(n),
                                log_lower_bound: w.log_mu,
                            });
                            last_witness = Some(w.attained);
                        }
                        Ok(w) if w.log_mu == T::infinity() => {
                            ok = false;
                            break;
                        }
                        _ => {
                            ok = false;
                            break;
                        }
                    }
                }
                let slopes_up = pts.windows(2).all(|w| {
                    w[1].log_lower_bound / w[1].position
                        > w[0].log_lower_bound / w[0].position
                });
                let total_rise = if pts.len() >= 2 {
                    pts.last().unwrap().log_lower_bound / pts.last().unwrap().position
                        - pts[0].log_lower_bound / pts[0].position
                } else {
                    T::zero()
                };
                if ok && pts.len() == 4 && slopes_up && total_rise >= T::of(0.3) {
                    per_q_refutations.push(RefutationEntry {
                        log_mu: None,
                        p_star: SeminormIndex::Column(p),
                        q: Some(SeminormIndex::Column(q)),
                        witness: last_witness
                            .as_ref()
                            .map(witness_from_attained)
                            .unwrap_or(WitnessRef::UnitVector(1)),
                        evidence: RefutationEvidence::Divergence(pts),
                    });
                    continue;
                }
            }
            q_unsettled.push(format!(
                "q={q}: slope range [{min_slope}, {max_slope}] neither flat nor \
                 demonstrably divergent in the window"
            ));
        }

        if per_q_refutations.len() == cfg.q_candidates(p).len() {
            // Every candidate q demonstrably fails; one refuted p refutes the
            // ∀p condition.
            return Ok(Outcome::Refuted(Refutation {
                condition: ConditionTag::MTop,
                entries: per_q_refutations,
                horizon: None,
                scope: if refutations_exact {
                    Scope::ClosedForm
                } else {
                    Scope::ProbedWindow
                },
                notes: format!(
                    "p = {p}: the per-power growth (ln μ_n)/n increases beyond every \
                     bound for each candidate q (and, by the same closed forms, for \
                     every larger q); no geometric rate can dominate"
                ),
            }));
        }
        unsettled.push(format!(
            "p={p}: {}",
            if q_unsettled.is_empty() {
                "mixed refuted/unsettled q candidates".to_string()
            } else {
                q_unsettled.join("; ")
            }
        ));
    }

    if unsettled.is_empty() {
        Ok(Outcome::Certified(Certificate {
            condition: ConditionTag::MTop,
            entries,
            horizon: None,
            scope: cert_scope,
            notes: "per-p geometric rates from section sups or flat slope scans".to_string(),
        }))
    } else {
        Ok(Outcome::Inconclusive {
            condition: ConditionTag::MTop,
            horizon: None,
            reasons: unsettled.join(" | "),
        })
    }
}

// ---------------------------------------------------------------------------
// check_topologizable
// ---------------------------------------------------------------------------

/// Decide the per-power-constant condition.
pub fn check_topologizable<T: Scalar>(
    problem: &Problem<T>,
    cfg: &ProbeConfig<T>,
) -> Result<Outcome<T>, ClassifierError> {
    match problem {
        Problem::Kothe { space, op } => top_kothe(space, op, cfg),
        Problem::DiscTaylor => Ok(taylor_top_certificate(cfg, false)),
        Problem::EntireTaylor => Ok(taylor_top_certificate(cfg, true)),
        Problem::PeriodicSmooth => Ok(periodic_refutation(
            ConditionTag::Top,
            cfg,
            "for each q the single order n = q−p+1 already has no finite constant: \
             the frequency-k modes give ratio k^{n+p}/k^q = k → ∞",
        )),
    }
}

fn top_kothe<T: Scalar>(
    space: &SpaceDescriptor<T>,
    op: &Operator<T>,
    cfg: &ProbeConfig<T>,
) -> Result<Outcome<T>, ClassifierError> {
    let growth = match op {
        Operator::Diagonal(d) => match d.symbol.growth(cfg.j_max) {
            Ok(g) => Some(g),
            Err(OperatorError::GrowthUnbounded { .. }) => None,
            Err(e) => return Err(e.into()),
        },
        Operator::TaylorDifferentiation => None,
    };
    let mut ctx = ScanContext::new(cfg.j_max);

    let mut entries = Vec::new();
    let mut cert_scope = Scope::ClosedForm;
    let mut unsettled = Vec::new();

    'p_loop: for &p in &cfg.p_list {
        let mut per_q_refutations = Vec::new();
        let mut q_unsettled = Vec::new();
        for q in cfg.q_candidates(p) {
            match pair_sequence(&mut ctx, op, space, p, q, cfg.n_probe, growth.as_ref())? {
                PairSequence::Ready {
                    seq,
                    scope,
                    settled: true,
                } => {
                    cert_scope = cert_scope.combine(scope);
                    entries.push(CertEntry {
                        p: SeminormIndex::Column(p),
                        q: SeminormIndex::Column(q),
                        mu: MuEvidence::Sequence(seq),
                    });
                    continue 'p_loop;
                }
                PairSequence::Ready { .. } => {
                    q_unsettled.push(format!("q={q}: scans not settled in the window"));
                }
                PairSequence::Diverges { n, attained, marks } => {
                    if let Some(points) = marks_evidence(&marks) {
                        per_q_refutations.push(RefutationEntry {
                            log_mu: None,
                            p_star: SeminormIndex::Column(p),
                            q: Some(SeminormIndex::Column(q)),
                            witness: witness_from_attained(&attained),
                            evidence: RefutationEvidence::Divergence(points),
                        });
                    } else {
                        q_unsettled.push(format!(
                            "q={q}: order n={n} diverges but growth evidence spans \
                             under three decades"
                        ));
                    }
                }
                PairSequence::NoDomination { n, detail } => {
                    q_unsettled.push(format!("q={q}: no domination at n={n} ({detail})"));
                }
            }
        }
        if per_q_refutations.len() == cfg.q_candidates(p).len() {
            return Ok(Outcome::Refuted(Refutation {
                condition: ConditionTag::Top,
                entries: per_q_refutations,
                horizon: None,
                scope: Scope::ProbedWindow,
                notes: format!(
                    "p = {p}: every candidate q has an order n whose sup over rows \
                     grows without bound"
                ),
            }));
        }
        unsettled.push(format!("p={p}: {}", q_unsettled.join("; ")));
    }

    if unsettled.is_empty() {
        Ok(Outcome::Certified(Certificate {
            condition: ConditionTag::Top,
            entries,
            horizon: None,
            scope: cert_scope,
            notes: "per-p sequences of optimal constants, finite at every probed order"
                .to_string(),
        }))
    } else {
        Ok(Outcome::Inconclusive {
            condition: ConditionTag::Top,
            horizon: None,
            reasons: unsettled.join(" | "),
        })
    }
}

/// Differentiation on the Taylor models is dominated radius-to-radius by the
/// circle-integral constants `n!·s/(s-q)^{n+1}` — a per-power certificate.
fn taylor_top_certificate<T: Scalar>(cfg: &ProbeConfig<T>, entire: bool) -> Outcome<T> {
    let mut entries = Vec::new();
    for &q in &cfg.p_radii {
        let s = if entire {
            q + T::one()
        } else {
            q + (T::one() - q) * T::of(0.5)
        };
        let seq = match LogMuSequence::cauchy_form(q, s, cfg.n_probe) {
            Ok(s) => s,
            Err(e) => {
                return Outcome::Inconclusive {
                    condition: ConditionTag::Top,
                    horizon: None,
                    reasons: format!("circle-constant sequence failed: {e}"),
                }
            }
        };
        entries.push(CertEntry {
            p: SeminormIndex::Radius(q),
            q: SeminormIndex::Radius(s),
            mu: MuEvidence::Sequence(seq),
        });
    }
    Outcome::Certified(Certificate {
        condition: ConditionTag::Top,
        entries,
        horizon: None,
        scope: Scope::ClosedForm,
        notes: if entire {
            "every radius q admits s = q+1 with constants n!·s/(s-q)^{n+1}".to_string()
        } else {
            "every radius q < 1 admits s = (1+q)/2 < 1 with constants n!·s/(s-q)^{n+1}"
                .to_string()
        },
    })
}

// ---------------------------------------------------------------------------
// check_new1 / check_new2
// ---------------------------------------------------------------------------

/// Decide the series-domination condition at one horizon `R`: per `p`, some
/// `q` whose μ-sequence has exponential-series radius strictly beyond `R`.
pub fn check_new1<T: Scalar>(
    problem: &Problem<T>,
    r: T,
    cfg: &ProbeConfig<T>,
) -> Result<Outcome<T>, ClassifierError> {
    if !(r > T::zero()) || !r.is_finite() {
        return Err(MuError::BadParams(format!("horizon must be positive and finite (got {r})")).into());
    }
    match problem {
        Problem::Kothe { space, op } => new1_kothe(space, op, r, cfg),
        Problem::DiscTaylor => Ok(new1_disc(r, cfg)),
        Problem::EntireTaylor => Ok(new1_entire(r, cfg)),
        Problem::PeriodicSmooth => {
            let mut out = periodic_refutation(
                ConditionTag::New1,
                cfg,
                "no candidate q yields finite constants at the order n = q−p+1, so no \
                 μ-sequence (and no series bound) exists at any horizon",
            );
            if let Outcome::Refuted(refutation) = &mut out {
                refutation.horizon = Some(r);
            }
            Ok(out)
        }
    }
}

fn new1_kothe<T: Scalar>(
    space: &SpaceDescriptor<T>,
    op: &Operator<T>,
    r: T,
    cfg: &ProbeConfig<T>,
) -> Result<Outcome<T>, ClassifierError> {
    let growth = match op {
        Operator::Diagonal(d) => match d.symbol.growth(cfg.j_max) {
            Ok(g) => Some(g),
            Err(OperatorError::GrowthUnbounded { .. }) => None,
            Err(e) => return Err(e.into()),
        },
        Operator::TaylorDifferentiation => None,
    };
    let mut ctx = ScanContext::new(cfg.j_max);

    let mut entries = Vec::new();
    let mut cert_scope = Scope::ClosedForm;
    let mut unsettled = Vec::new();
    let mut refuted_entries = Vec::new();

    'p_loop: for &p in &cfg.p_list {
        let mut per_q_radii = Vec::new();
        let mut q_unsettled = Vec::new();
        for q in cfg.q_candidates(p) {
            match pair_sequence(&mut ctx, op, space, p, q, cfg.n_probe, growth.as_ref())? {
                PairSequence::Ready { seq, scope, settled } => {
                    if let Some(radius) = seq.analytic_radius() {
                        if radius > r {
                            cert_scope = cert_scope.combine(scope);
                            entries.push(CertEntry {
                                p: SeminormIndex::Column(p),
                                q: SeminormIndex::Column(q),
                                mu: MuEvidence::Sequence(seq),
                            });
                            continue 'p_loop;
                        }
                        per_q_radii.push((SeminormIndex::Column(q), radius));
                        continue;
                    }
                    if !settled {
                        q_unsettled.push(format!("q={q}: scans not settled"));
                        continue;
                    }
                    let est = mu::radius(&seq);
                    if est.stabilized && est.value > r * T::of(1.05) {
                        cert_scope = cert_scope.combine(Scope::ProbedWindow);
                        entries.push(CertEntry {
                            p: SeminormIndex::Column(p),
                            q: SeminormIndex::Column(q),
                            mu: MuEvidence::Sequence(seq),
                        });
                        continue 'p_loop;
                    }
                    if est.stabilized && est.upper_last < r * T::of(0.95) {
                        per_q_radii.push((SeminormIndex::Column(q), est.value));
                    } else {
                        q_unsettled.push(format!(
                            "q={q}: root-test radius {} not separated from {r}",
                            est.value
                        ));
                    }
                }
                PairSequence::Diverges { n, .. } => {
                    per_q_radii.push((SeminormIndex::Column(q), T::zero()));
                    let _ = n;
                }
                PairSequence::NoDomination { .. } => {
                    per_q_radii.push((SeminormIndex::Column(q), T::zero()));
                }
            }
        }
        if per_q_radii.len() == cfg.q_candidates(p).len() {
            refuted_entries.push(RefutationEntry {
                log_mu: None,
                p_star: SeminormIndex::Column(p),
                q: None,
                witness: WitnessRef::UnitVector(1),
                evidence: RefutationEvidence::RadiiAtOrBelow {
                    horizon: r,
                    per_q: per_q_radii,
                },
            });
            return Ok(Outcome::Refuted(Refutation {
                condition: ConditionTag::New1,
                entries: refuted_entries,
                horizon: Some(r),
                scope: Scope::ProbedWindow,
                notes: format!(
                    "p = {p}: every candidate q yields a series radius at or below {r}"
                ),
            }));
        }
        if !q_unsettled.is_empty() && entries.len() < cfg.p_list.len() {
            unsettled.push(format!("p={p}: {}", q_unsettled.join("; ")));
        }
    }

    if entries.len() == cfg.p_list.len() {
        Ok(Outcome::Certified(Certificate {
            condition: ConditionTag::New1,
            entries,
            horizon: Some(r),
            scope: cert_scope,
            notes: format!("per-p q-selections whose μ-series converge beyond t = {r}"),
        }))
    } else {
        Ok(Outcome::Inconclusive {
            condition: ConditionTag::New1,
            horizon: Some(r),
            reasons: unsettled.join(" | "),
        })
    }
}

fn new1_disc<T: Scalar>(r: T, cfg: &ProbeConfig<T>) -> Outcome<T> {
    let fracs = [T::of(0.5), T::of(0.75), T::of(0.875), T::of(0.9375)];
    let mut entries = Vec::new();
    let mut refuted = Vec::new();
    for &q in &cfg.p_radii {
        let mut per_q = Vec::new();
        let mut best: Option<(T, T)> = None;
        for &f in &fracs {
            let s = q + (T::one() - q) * f;
            let radius = s - q;
            per_q.push((SeminormIndex::Radius(s), radius));
            if radius > r && best.is_none() {
                best = Some((s, radius));
            }
        }
        if let Some((s, _)) = best {
            match LogMuSequence::cauchy_form(q, s, cfg.n_probe) {
                Ok(seq) => entries.push(CertEntry {
                    p: SeminormIndex::Radius(q),
                    q: SeminormIndex::Radius(s),
                    mu: MuEvidence::Sequence(seq),
                }),
                Err(e) => {
                    return Outcome::Inconclusive {
                        condition: ConditionTag::New1,
                        horizon: Some(r),
                        reasons: e.to_string(),
                    }
                }
            }
        } else if T::one() - q <= r {
            // Analytic: for every admissible s < 1 the radius s−q < 1−q ≤ R.
            refuted.push(RefutationEntry {
                log_mu: None,
                p_star: SeminormIndex::Radius(q),
                q: None,
                witness: WitnessRef::Monomial { degree: 1 },
                evidence: RefutationEvidence::RadiiAtOrBelow {
                    horizon: r,
                    per_q,
                },
            });
        } else {
            return Outcome::Inconclusive {
                condition: ConditionTag::New1,
                horizon: Some(r),
                reasons: format!(
                    "radius q={q}: sampled s gave radii ≤ {r} but 1−q > {r} leaves \
                     closer s unprobed"
                ),
            };
        }
    }
    if !refuted.is_empty() {
        return Outcome::Refuted(Refutation {
            condition: ConditionTag::New1,
            entries: refuted,
            horizon: Some(r),
            scope: Scope::ClosedForm,
            notes: "the series radius of the circle constants is s−q, and s−q < 1−q ≤ R \
                    for every admissible s < 1"
                .to_string(),
        });
    }
    Outcome::Certified(Certificate {
        condition: ConditionTag::New1,
        entries,
        horizon: Some(r),
        scope: Scope::ClosedForm,
        notes: "circle constants with s−q > R".to_string(),
    })
}

fn new1_entire<T: Scalar>(r: T, cfg: &ProbeConfig<T>) -> Outcome<T> {
    let mut entries = Vec::new();
    for &q in &cfg.p_radii {
        let s = q + r + T::one();
        match LogMuSequence::cauchy_form(q, s, cfg.n_probe) {
            Ok(seq) => entries.push(CertEntry {
                p: SeminormIndex::Radius(q),
                q: SeminormIndex::Radius(s),
                mu: MuEvidence::Sequence(seq),
            }),
            Err(e) => {
                return Outcome::Inconclusive {
                    condition: ConditionTag::New1,
                    horizon: Some(r),
                    reasons: e.to_string(),
                }
            }
        }
    }
    Outcome::Certified(Certificate {
        condition: ConditionTag::New1,
        entries,
        horizon: Some(r),
        scope: Scope::ClosedForm,
        notes: "every radius q admits s = q + R + 1, with series radius s−q = R+1 > R"
            .to_string(),
    })
}

/// Decide the single-horizon condition by searching the descending grid for
/// an `R` at which every probed `p` certifies.
pub fn check_new2<T: Scalar>(
    problem: &Problem<T>,
    cfg: &ProbeConfig<T>,
) -> Result<Outcome<T>, ClassifierError> {
    let mut refuted_all = Vec::new();
    let mut notes = Vec::new();
    let mut any_inconclusive = false;
    for &r in &cfg.r_grid {
        match check_new1(problem, r, cfg)? {
            Outcome::Certified(c) => {
                return Ok(Outcome::Certified(Certificate {
                    condition: ConditionTag::New2,
                    entries: c.entries,
                    horizon: Some(r),
                    // The ∃R quantifier was grid-searched.
                    scope: Scope::ProbedWindow.combine(c.scope),
                    notes: format!("horizon R = {r} from the search grid; {}", c.notes),
                }));
            }
            Outcome::Refuted(mut f) => {
                notes.push(format!("R = {r}: refuted"));
                refuted_all.append(&mut f.entries);
            }
            Outcome::Inconclusive { reasons, .. } => {
                any_inconclusive = true;
                notes.push(format!("R = {r}: inconclusive ({reasons})"));
            }
        }
    }
    if any_inconclusive {
        Ok(Outcome::Inconclusive {
            condition: ConditionTag::New2,
            horizon: None,
            reasons: notes.join(" | "),
        })
    } else {
        Ok(Outcome::Refuted(Refutation {
            condition: ConditionTag::New2,
            entries: refuted_all,
            horizon: cfg.r_grid.iter().copied().fold(None, |acc: Option<T>, r| {
                Some(acc.map_or(r, |a| a.min(r)))
            }),
            scope: Scope::ProbedWindow,
            notes: format!("every grid horizon failed: {}", notes.join("; ")),
        }))
    }
}

// ---------------------------------------------------------------------------
// Model refutation helpers
// ---------------------------------------------------------------------------

/// Monomial divergence on the disc model: for `f = z^{2n}`,
/// `‖f⁽ⁿ⁾‖_q / ‖f‖_s ≥ ((n+1)q)ⁿ` for every `s < 1`.
fn disc_power_refutation<T: Scalar>(
    condition: ConditionTag,
    cfg: &ProbeConfig<T>,
    notes: &str,
) -> Outcome<T> {
    let q = cfg.p_radii.first().copied().unwrap_or_else(|| T::of(0.5));
    let mut entries = Vec::new();
    for mu in cfg.mu_grid() {
        let n0 = (mu / q).ceil() + T::one();
        let points = (0..4)
            .map(|i| {
                let n = n0 * T::of(10.0).powi(i);
                DivergencePoint {
                    axis: Axis::Power,
                    position: n,
                    log_lower_bound: n * ((n + T::one()).ln() + q.ln() - mu.ln()),
                }
            })
            .collect();
        entries.push(RefutationEntry {
            log_mu: Some(mu.ln()),
            p_star: SeminormIndex::Radius(q),
            q: None,
            witness: WitnessRef::Monomial {
                degree: (T::of(2.0) * n0).to_u64().unwrap_or(u64::MAX),
            },
            evidence: RefutationEvidence::Divergence(points),
        });
    }
    Outcome::Refuted(Refutation {
        condition,
        entries,
        horizon: None,
        scope: Scope::ClosedForm,
        notes: notes.to_string(),
    })
}

/// Monomial divergence on the entire model: for `f = zⁿ`,
/// `‖f⁽ⁿ⁾‖_q / ‖f‖_s = n!/sⁿ` and `n! ≥ (n/e)ⁿ`.
fn entire_power_refutation<T: Scalar>(
    condition: ConditionTag,
    cfg: &ProbeConfig<T>,
    notes: &str,
) -> Outcome<T> {
    let q = cfg.p_radii.first().copied().unwrap_or_else(|| T::of(0.5));
    let s_shown = q + T::of(2.0);
    let mut entries = Vec::new();
    for mu in cfg.mu_grid() {
        let n0 = (T::E() * mu * s_shown).ceil() * T::of(2.0);
        let points = (0..4)
            .map(|i| {
                let n = n0 * T::of(10.0).powi(i);
                DivergencePoint {
                    axis: Axis::Power,
                    position: n,
                    // ln n! ≥ n ln n − n.
                    log_lower_bound: n * (n.ln() - T::one() - s_shown.ln() - mu.ln()),
                }
            })
            .collect();
        entries.push(RefutationEntry {
            log_mu: Some(mu.ln()),
            p_star: SeminormIndex::Radius(q),
            q: Some(SeminormIndex::Radius(s_shown)),
            witness: WitnessRef::Monomial {
                degree: n0.to_u64().unwrap_or(u64::MAX),
            },
            evidence: RefutationEvidence::Divergence(points),
        });
    }
    Outcome::Refuted(Refutation {
        condition,
        entries,
        horizon: None,
        scope: Scope::ClosedForm,
        notes: notes.to_string(),
    })
}

/// Frequency divergence on the periodic model: at order `n = q−p+1`,
/// `‖Aⁿ sin(k·)‖_p / ‖sin(k·)‖_q = k^{n+p}/k^q = k`.
fn periodic_refutation<T: Scalar>(
    condition: ConditionTag,
    cfg: &ProbeConfig<T>,
    notes: &str,
) -> Outcome<T> {
    let p = *cfg.p_list.first().unwrap_or(&1);
    let mut entries = Vec::new();
    for q in cfg.q_candidates(p) {
        let n = q - p + 1;
        let points: Vec<DivergencePoint<T>> = [10u64, 100, 1_000, 10_000]
            .iter()
            .map(|&k| DivergencePoint {
                axis: Axis::Frequency,
                position: T::of_u64(k),
                // k^{n+p}/k^q = k exactly, cross-checked against the mode
                // norm closed form.
                log_lower_bound: T::of_u64(k).ln(),
            })
            .collect();
        // Consistency guard against the model's own norm formula.
        let consistent = points.iter().all(|pt| {
            let k = pt.position.to_u64().unwrap_or(0);
            match models::TrigMode::<T>::sin(k) {
                Ok(mode) => {
                    let num = models::trig_norm(
                        &mode,
                        n,
                        &models::CompactSeminormIndex::full_torus(p),
                    );
                    let den = models::trig_norm(
                        &mode,
                        0,
                        &models::CompactSeminormIndex::full_torus(q),
                    );
                    match (num, den) {
                        (Ok(a), Ok(b)) => {
                            (a.log_value - b.log_value - pt.log_lower_bound).abs()
                                < T::of(1e-9)
                        }
                        _ => false,
                    }
                }
                Err(_) => false,
            }
        });
        if !consistent {
            return Outcome::Inconclusive {
                condition,
                horizon: None,
                reasons: "mode-norm closed form and refutation formula disagree".to_string(),
            };
        }
        entries.push(RefutationEntry {
            log_mu: None,
            p_star: SeminormIndex::SupOrder(p),
            q: Some(SeminormIndex::SupOrder(q)),
            witness: WitnessRef::Mode { frequency: 10 },
            evidence: RefutationEvidence::Divergence(points),
        });
    }
    Outcome::Refuted(Refutation {
        condition,
        entries,
        horizon: None,
        scope: Scope::ClosedForm,
        notes: notes.to_string(),
    })
}

// ---------------------------------------------------------------------------
// Implication closure
// ---------------------------------------------------------------------------

/// Audit a report set against the hierarchy and derive the implied statuses.
pub fn implication_closure<T: Scalar>(outcomes: &[Outcome<T>]) -> Verdict<T> {
    use ConditionTag::*;
    let mut violations = Vec::new();
    let mut derived = Vec::new();

    let status_of = |cond: ConditionTag| -> Vec<(Status, Option<T>)> {
        outcomes
            .iter()
            .filter(|o| o.condition() == cond)
            .map(|o| (o.status(), o.horizon()))
            .collect()
    };
    let any = |cond: ConditionTag, status: Status| -> bool {
        status_of(cond).iter().any(|(s, _)| *s == status)
    };

    // Direct contradictions on the same condition and horizon.
    for cond in [ABdd, ABddGen, MTop, Top, New1, New2] {
        let st = status_of(cond);
        for (i, (s1, h1)) in st.iter().enumerate() {
            for (s2, h2) in st.iter().skip(i + 1) {
                let same_h = match (h1, h2) {
                    (None, None) => true,
                    (Some(a), Some(b)) => (*a - *b).abs() <= T::of(1e-12),
                    _ => false,
                };
                if same_h
                    && ((*s1 == Status::Certified && *s2 == Status::Refuted)
                        || (*s1 == Status::Refuted && *s2 == Status::Certified))
                {
                    violations.push(format!(
                        "{cond}: both certified and refuted at the same horizon"
                    ));
                }
            }
        }
    }

    // Forward edges: certified upstream forbids refuted downstream.
    for &(up, down) in HIERARCHY_EDGES {
        if any(up, Status::Certified) && any(down, Status::Refuted) {
            // NEW1 at distinct horizons is genuinely independent; refuting a
            // *larger* horizon than the one certified is consistent.
            if up == New1 || down == New1 {
                let certified_h: Vec<Option<T>> = status_of(up)
                    .iter()
                    .filter(|(s, _)| *s == Status::Certified)
                    .map(|(_, h)| *h)
                    .collect();
                let refuted_h: Vec<Option<T>> = status_of(down)
                    .iter()
                    .filter(|(s, _)| *s == Status::Refuted)
                    .map(|(_, h)| *h)
                    .collect();
                let conflict = certified_h.iter().any(|ch| {
                    refuted_h.iter().any(|rh| match (ch, rh) {
                        // A certificate at R conflicts with a refutation at
                        // R' ≤ R (the certified radius exceeds both).
                        (Some(c), Some(r)) => *r <= *c + T::of(1e-12),
                        _ => true,
                    })
                });
                if !conflict {
                    continue;
                }
            }
            violations.push(format!("{up} certified but {down} refuted"));
        }
    }

    // Derived facts (not re-checked, reported for completeness).
    if any(ABdd, Status::Certified) {
        for (cond, via) in [
            (ABddGen, "A-BDD with M = 1"),
            (MTop, "a global geometric rate is in particular per-p"),
            (Top, "geometric rates are finite at every order"),
        ] {
            if status_of(cond).is_empty() {
                derived.push(DerivedFact {
                    condition: cond,
                    status: Status::Certified,
                    horizon: None,
                    via: via.to_string(),
                });
            }
        }
    }
    if any(MTop, Status::Certified) {
        for (_, h) in status_of(New1)
            .iter()
            .filter(|(s, _)| *s == Status::Inconclusive)
        {
            derived.push(DerivedFact {
                condition: New1,
                status: Status::Certified,
                horizon: *h,
                via: "geometric μ-sequences have infinite series radius".to_string(),
            });
        }
    }
    if any(Top, Status::Refuted) {
        for cond in [ABdd, ABddGen, MTop, New1, New2] {
            if !any(cond, Status::Refuted) {
                derived.push(DerivedFact {
                    condition: cond,
                    status: Status::Refuted,
                    horizon: None,
                    via: "contrapositive: the condition implies per-power constants"
                        .to_string(),
                });
            }
        }
    }
    if any(MTop, Status::Refuted) {
        for cond in [ABdd, ABddGen] {
            if !any(cond, Status::Refuted) {
                derived.push(DerivedFact {
                    condition: cond,
                    status: Status::Refuted,
                    horizon: None,
                    via: "contrapositive: a global rate is in particular per-p".to_string(),
                });
            }
        }
    }

    let consistent = violations.is_empty();
    Verdict {
        violations,
        derived,
        consistent,
    }
}

// ---------------------------------------------------------------------------
// Driver
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ClassificationReport<T> {
    pub problem_label: String,
    /// Per-`p` continuity facts satisfying the checkers' precondition.
    pub continuity: Vec<String>,
    pub outcomes: Vec<Outcome<T>>,
    pub verdict: Verdict<T>,
}

/// Run the continuity gate and all five checkers, then audit consistency.
pub fn classify<T: Scalar>(
    problem: &Problem<T>,
    cfg: &ProbeConfig<T>,
) -> Result<ClassificationReport<T>, ClassifierError> {
    let mut continuity = Vec::new();
    match problem {
        Problem::Kothe { space, op } => {
            let mut ctx = ScanContext::new(cfg.j_max);
            for &p in &cfg.p_list {
                let w = continuity_check_in(&mut ctx, op, space, p, &cfg.q_candidates(p))
                    .map_err(|e| ClassifierError::Continuity {
                        label: problem.label(),
                        detail: e.to_string(),
                    })?;
                continuity.push(format!(
                    "p={}: ‖A·‖_{} ≤ {:.6e}·‖·‖_{}",
                    p,
                    p,
                    w.log_mu.exp(),
                    w.q
                ));
            }
        }
        Problem::DiscTaylor | Problem::EntireTaylor => {
            continuity.push(
                "every radius q maps into any s > q with constant s/(s−q)² \
                 (first circle estimate)"
                    .to_string(),
            );
        }
        Problem::PeriodicSmooth => {
            continuity
                .push("‖f′‖_p ≤ ‖f‖_{p+1} with constant 1 (order shift)".to_string());
        }
    }

    let mut outcomes = vec![
        check_a_bounded(problem, cfg)?,
        check_m_top(problem, cfg)?,
        check_topologizable(problem, cfg)?,
    ];
    for &r in &cfg.r_list {
        outcomes.push(check_new1(problem, r, cfg)?);
    }
    outcomes.push(check_new2(problem, cfg)?);
    let verdict = implication_closure(&outcomes);
    Ok(ClassificationReport {
        problem_label: problem.label(),
        continuity,
        outcomes,
        verdict,
    })
}

// ---------------------------------------------------------------------------
// Kernel-chain construction
// ---------------------------------------------------------------------------

/// A diagonal operator built on a grading without a continuous norm, designed
/// to land at "M-TOP certified, A-BDD refuted".
#[derive(Debug, Clone)]
pub struct Cor44Construction<T> {
    pub operator: DiagonalOperator<T>,
    /// Row `j_n` per step `n`, pairwise distinct: the grading column `n`
    /// vanishes there while column `n+1` does not.
    pub selected_rows: Vec<Index>,
    pub expected: Vec<(ConditionTag, Status)>,
    pub scope: Scope,
}

/// On a grading whose columns all vanish somewhere, pick per `n` a row `j_n`
/// with `b(j_n, n) = 0` and `b(j_n, n+1) > 0`, and place the value `n` there.
/// The resulting diagonal is unbounded (so no global constant) yet each
/// seminorm only sees finitely many ramp values (so per-`p` rates exist).
pub fn construct_cor44_operator<T: Scalar>(
    matrix: &KotheMatrix<T>,
    count: u32,
    j_probe: Index,
) -> Result<Cor44Construction<T>, ClassifierError> {
    match matrix.continuous_norm(j_probe, count + 1)? {
        ContinuousNorm::Certified { .. } => Err(ClassifierError::ConstructionInapplicable),
        ContinuousNorm::Refuted { .. } => {
            let mut rows = Vec::with_capacity(count as usize);
            let mut start: Index = 1;
            for n in 1..=count {
                let mut found = None;
                for j in start..=j_probe {
                    if matrix.entry(j, n)? == T::zero() && matrix.entry(j, n + 1)? > T::zero()
                    {
                        found = Some(j);
                        break;
                    }
                }
                let Some(j) = found else {
                    return Err(ClassifierError::ConstructionExhausted { n, j_probe });
                };
                rows.push(j);
                start = j + 1;
            }
            let symbol = DiagonalSymbol::sparse_ramp(rows.clone())?;
            Ok(Cor44Construction {
                operator: DiagonalOperator { symbol },
                selected_rows: rows,
                expected: vec![
                    (ConditionTag::ABdd, Status::Refuted),
                    (ConditionTag::MTop, Status::Certified),
                ],
                scope: Scope::ProbedWindow,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;
    use crate::seqspace::CoefficientVector;

    type P = Problem<f64>;

    fn omega_diag_j() -> P {
        Problem::Kothe {
            space: SpaceDescriptor::omega_sup(),
            op: Operator::diagonal(DiagonalSymbol::Index),
        }
    }

    fn rapid_log() -> P {
        Problem::Kothe {
            space: SpaceDescriptor::rapid_decay_sup(),
            op: Operator::diagonal(DiagonalSymbol::LogIndex),
        }
    }

    fn small_cfg() -> ProbeConfig<f64> {
        ProbeConfig {
            j_max: 20_000,
            n_probe: 64,
            ..ProbeConfig::default()
        }
    }

    #[test]
    fn window_diag_refutes_global_constant_with_ones() {
        let out = check_a_bounded(&omega_diag_j(), &small_cfg()).unwrap();
        let Outcome::Refuted(r) = out else {
            panic!("expected refutation, got {out:?}");
        };
        assert_eq!(r.condition, ConditionTag::ABdd);
        assert_eq!(r.scope, Scope::ClosedForm);
        // 21 grid constants, each with its own entry.
        assert_eq!(r.entries.len(), 21);
        for e in &r.entries {
            assert_eq!(e.witness, WitnessRef::Ones);
            // exp(ln μ) reintroduces one rounding; compare with relative slack.
            let mu = e.log_mu.unwrap().exp();
            // Smallest grading whose section sup (= p) exceeds μ.
            let p = e.p_star.column().unwrap();
            assert!(p as f64 > mu * (1.0 - 1e-12));
            assert!(((p - 1) as f64) <= mu * (1.0 + 1e-12));
            let RefutationEvidence::Divergence(pts) = &e.evidence else {
                panic!("expected divergence");
            };
            assert_eq!(pts.len(), 4);
            for w in pts.windows(2) {
                assert!(w[1].log_lower_bound > w[0].log_lower_bound);
            }
            assert!(pts.iter().all(|pt| pt.log_lower_bound > 0.0));
        }
    }

    #[test]
    fn window_diag_certifies_per_p_rate_q_equals_p() {
        let out = check_m_top(&omega_diag_j(), &small_cfg()).unwrap();
        let Outcome::Certified(c) = out else {
            panic!("expected certificate, got {out:?}");
        };
        assert_eq!(c.scope, Scope::ClosedForm);
        for (i, e) in c.entries.iter().enumerate() {
            let p = [1u32, 2, 3][i];
            assert_eq!(e.p, SeminormIndex::Column(p));
            assert_eq!(e.q, SeminormIndex::Column(p));
            let MuEvidence::Pair { log_m, log_rate } = e.mu else {
                panic!("expected pair");
            };
            assert_eq!(log_m, 0.0);
            assert!((log_rate - (p as f64).ln()).abs() < 1e-12, "rate must be p");
        }
    }

    #[test]
    fn bounded_symbol_certifies_global_constant() {
        let sym = DiagonalSymbol::from_expr("1 - 1/j".parse::<Expr>().unwrap()).unwrap();
        let problem = Problem::Kothe {
            space: SpaceDescriptor::rapid_decay_sup(),
            op: Operator::diagonal(sym),
        };
        let out = check_a_bounded(&problem, &small_cfg()).unwrap();
        let Outcome::Certified(c) = out else {
            panic!("expected certificate, got {out:?}");
        };
        let MuEvidence::Pair { log_rate, .. } = c.entries[0].mu else {
            panic!();
        };
        assert!((log_rate.exp() - 1.0).abs() < 1e-3, "μ ≈ sup|a| = 1");
    }

    #[test]
    fn log_diag_refutes_per_p_rate_but_certifies_per_power() {
        let cfg = small_cfg();
        let m = check_m_top(&rapid_log(), &cfg).unwrap();
        let Outcome::Refuted(r) = m else {
            panic!("expected M-TOP refutation, got {m:?}");
        };
        assert_eq!(r.scope, Scope::ClosedForm);
        // Every probed q contributes divergence evidence.
        assert_eq!(r.entries.len(), cfg.q_candidates(1).len());
        for e in &r.entries {
            let RefutationEvidence::Divergence(pts) = &e.evidence else {
                panic!("expected divergence");
            };
            // Lower bounds strictly increase along the evidence axis; along
            // the power axis the slopes (ln μ_n)/n must themselves increase.
            for w in pts.windows(2) {
                assert!(w[1].log_lower_bound > w[0].log_lower_bound);
                if w[0].axis == Axis::Power {
                    assert!(
                        w[1].log_lower_bound / w[1].position
                            > w[0].log_lower_bound / w[0].position
                    );
                }
            }
        }

        let t = check_topologizable(&rapid_log(), &cfg).unwrap();
        let Outcome::Certified(c) = t else {
            panic!("expected TOP certificate, got {t:?}");
        };
        assert_eq!(c.scope, Scope::ClosedForm);
        // q = p+1 suffices and the sequence is the power form with d = 1.
        let MuEvidence::Sequence(seq) = &c.entries[0].mu else {
            panic!();
        };
        assert_eq!(c.entries[0].q, SeminormIndex::Column(2));
        assert_eq!(seq.analytic_radius(), Some(1.0));
    }

    #[test]
    fn log_diag_series_certificates_scale_with_horizon() {
        let cfg = small_cfg();
        for (r, want_gap) in [(1.0, 2u32), (5.0, 6), (10.0, 11)] {
            let out = check_new1(&rapid_log(), r, &cfg).unwrap();
            let Outcome::Certified(c) = out else {
                panic!("expected NEW1 cert at R={r}");
            };
            assert_eq!(c.horizon, Some(r));
            for e in &c.entries {
                let p = e.p.column().unwrap();
                let q = e.q.column().unwrap();
                assert_eq!(q - p, want_gap, "smallest gap beyond R must be selected");
            }
        }
    }

    #[test]
    fn disc_model_certifies_per_power_but_not_series_at_one() {
        let cfg = small_cfg();
        let t = check_topologizable(&P::DiscTaylor, &cfg).unwrap();
        assert!(matches!(t, Outcome::Certified(_)));

        let n1 = check_new1(&P::DiscTaylor, 1.0, &cfg).unwrap();
        let Outcome::Refuted(r) = n1 else {
            panic!("expected NEW1 refutation at R=1, got {n1:?}");
        };
        assert_eq!(r.scope, Scope::ClosedForm);
        for e in &r.entries {
            let RefutationEvidence::RadiiAtOrBelow { horizon, per_q } = &e.evidence else {
                panic!("expected radii table");
            };
            assert_eq!(*horizon, 1.0);
            assert!(per_q.iter().all(|(_, rad)| *rad < 1.0));
        }

        let n2 = check_new2(&P::DiscTaylor, &cfg).unwrap();
        let Outcome::Certified(c) = n2 else {
            panic!("expected NEW2 certificate, got {n2:?}");
        };
        assert_eq!(c.horizon, Some(0.2), "first grid horizon below all 1−q gaps");
    }

    #[test]
    fn entire_model_certifies_series_at_any_horizon() {
        let cfg = small_cfg();
        for r in [1.0, 7.0] {
            let out = check_new1(&P::EntireTaylor, r, &cfg).unwrap();
            let Outcome::Certified(c) = out else {
                panic!("expected cert at R={r}");
            };
            for e in &c.entries {
                let s = e.q.radius().unwrap();
                let q = e.p.radius().unwrap();
                assert!(s - q > r, "series radius s−q beyond R");
            }
        }
    }

    #[test]
    fn periodic_model_refutes_per_power_constants() {
        let cfg = small_cfg();
        let out = check_topologizable(&P::PeriodicSmooth, &cfg).unwrap();
        let Outcome::Refuted(r) = out else {
            panic!("expected refutation, got {out:?}");
        };
        assert_eq!(r.scope, Scope::ClosedForm);
        for e in &r.entries {
            let RefutationEvidence::Divergence(pts) = &e.evidence else {
                panic!();
            };
            // Ratio equals the frequency: ln k at k ∈ {10,…,10⁴}.
            assert_eq!(pts.len(), 4);
            assert!((pts[0].log_lower_bound - 10f64.ln()).abs() < 1e-12);
            assert!((pts[3].log_lower_bound - 10_000f64.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn closure_accepts_lawful_sets_and_flags_violations() {
        let cfg = small_cfg();
        let report = classify(&omega_diag_j(), &cfg).unwrap();
        assert!(report.verdict.consistent, "{:?}", report.verdict.violations);
        // A-BDD refuted + M-TOP certified is the expected profile.
        let statuses: Vec<(ConditionTag, Status)> = report
            .outcomes
            .iter()
            .map(|o| (o.condition(), o.status()))
            .collect();
        assert!(statuses.contains(&(ConditionTag::ABdd, Status::Refuted)));
        assert!(statuses.contains(&(ConditionTag::MTop, Status::Certified)));

        // Hand-built violation: per-p rate certified, per-power refuted.
        let fake_cert = Outcome::Certified(Certificate::<f64> {
            condition: ConditionTag::MTop,
            entries: vec![],
            horizon: None,
            scope: Scope::ProbedWindow,
            notes: String::new(),
        });
        let fake_refute = Outcome::Refuted(Refutation {
            condition: ConditionTag::Top,
            entries: vec![],
            horizon: None,
            scope: Scope::ProbedWindow,
            notes: String::new(),
        });
        let verdict = implication_closure(&[fake_cert, fake_refute]);
        assert!(!verdict.consistent);
        assert!(verdict.violations.iter().any(|v| v.contains("M-TOP")));
    }

    #[test]
    fn closure_allows_series_refuted_above_certified_horizon() {
        // NEW1 certified at R = 0.2 and refuted at R = 1 is lawful.
        let cert = Outcome::Certified(Certificate::<f64> {
            condition: ConditionTag::New1,
            entries: vec![],
            horizon: Some(0.2),
            scope: Scope::ClosedForm,
            notes: String::new(),
        });
        let refute = Outcome::Refuted(Refutation {
            condition: ConditionTag::New1,
            entries: vec![],
            horizon: Some(1.0),
            scope: Scope::ClosedForm,
            notes: String::new(),
        });
        let verdict = implication_closure(&[cert, refute]);
        assert!(verdict.consistent, "{:?}", verdict.violations);
    }

    #[test]
    fn full_reports_stay_consistent_across_problems() {
        let cfg = small_cfg();
        for problem in [
            rapid_log(),
            P::DiscTaylor,
            P::EntireTaylor,
            P::PeriodicSmooth,
        ] {
            let report = classify(&problem, &cfg).unwrap();
            assert!(
                report.verdict.consistent,
                "{}: {:?}",
                report.problem_label, report.verdict.violations
            );
        }
    }

    #[test]
    fn kernel_chain_rows_on_window_grading() {
        let m = KotheMatrix::<f64>::omega();
        let c = construct_cor44_operator(&m, 16, 1_000).unwrap();
        // Column n vanishes first at row n+1, where column n+1 is positive.
        let expect: Vec<Index> = (1..=16).map(|n| n + 1).collect();
        assert_eq!(c.selected_rows, expect);
        // a_{j_n} = n means a_j = j − 1 on the selected rows.
        for (i, &j) in c.selected_rows.iter().enumerate() {
            let v = c.operator.symbol.value(j).unwrap();
            assert_eq!(v, (i + 1) as f64);
            assert_eq!(v, (j - 1) as f64);
        }
        assert_eq!(
            c.expected,
            vec![
                (ConditionTag::ABdd, Status::Refuted),
                (ConditionTag::MTop, Status::Certified)
            ]
        );
    }

    #[test]
    fn kernel_chain_requires_missing_continuous_norm() {
        let m = KotheMatrix::<f64>::rapid_decay();
        let err = construct_cor44_operator(&m, 8, 1_000).unwrap_err();
        assert!(matches!(err, ClassifierError::ConstructionInapplicable));
    }

    #[test]
    fn kernel_chain_on_banded_grading() {
        // b(j,k) = 1 for j ≤ 2k, else 0, via clamped expressions.
        let expr: Expr = "max(0, min(1, 2*k - j + 1))".parse().unwrap();
        let m = KotheMatrix::<f64>::custom(expr).unwrap();
        let c = construct_cor44_operator(&m, 10, 1_000).unwrap();
        let expect: Vec<Index> = (1..=10).map(|n| 2 * n + 1).collect();
        assert_eq!(c.selected_rows, expect);
    }

    #[test]
    fn cor44_operator_reclassifies_as_expected() {
        let m = KotheMatrix::<f64>::omega();
        let built = construct_cor44_operator(&m, 600, 5_000).unwrap();
        let cfg = ProbeConfig::<f64> {
            j_max: 5_000,
            n_probe: 32,
            mu_grid_log2: (-4, 8),
            ..ProbeConfig::default()
        };
        let problem = Problem::Kothe {
            space: SpaceDescriptor::omega_sup(),
            op: Operator::Diagonal(built.operator.clone()),
        };
        let a = check_a_bounded(&problem, &cfg).unwrap();
        assert_eq!(a.status(), Status::Refuted);
        let m_top = check_m_top(&problem, &cfg).unwrap();
        assert_eq!(m_top.status(), Status::Certified);
    }

    #[test]
    fn certificate_entries_are_recheckable_against_scans() {
        // Soundness: claimed constants dominate independently scanned optima.
        let cfg = small_cfg();
        let problem = omega_diag_j();
        let P::Kothe { space, op } = &problem else {
            unreachable!()
        };
        let out = check_m_top(&omega_diag_j(), &cfg).unwrap();
        let Outcome::Certified(c) = out else { panic!() };
        for e in &c.entries {
            let p = e.p.column().unwrap();
            let q = e.q.column().unwrap();
            for n in [1u32, 3, 7, 20] {
                let w = crate::operators::optimal_mu(op, space, p, q, n, cfg.j_max).unwrap();
                let claimed = e.mu.log_mu(n).unwrap();
                assert!(
                    claimed + 1e-9 >= w.log_mu,
                    "claimed μ_{n} below the scanned optimum"
                );
            }
        }
    }

    #[test]
    fn refutation_evidence_exceeds_the_refuted_constant() {
        // Soundness on the all-ones witness: recompute p(Aⁿ𝟙)/(μⁿ·q(𝟙)) and
        // compare with the recorded lower bounds.
        let cfg = small_cfg();
        let problem = omega_diag_j();
        let P::Kothe { space, op } = &problem else {
            unreachable!()
        };
        let out = check_a_bounded(&omega_diag_j(), &cfg).unwrap();
        let Outcome::Refuted(r) = out else { panic!() };
        let e = &r.entries[8]; // μ = 16
        let mu = e.log_mu.unwrap().exp();
        assert!((mu - 16.0).abs() < 1e-9);
        let p_star = e.p_star.column().unwrap();
        let RefutationEvidence::Divergence(pts) = &e.evidence else {
            panic!()
        };
        let ones = CoefficientVector::<f64>::ones();
        for pt in pts.iter().take(2) {
            let n = pt.position as u32;
            let anx = op.apply_power(n, &ones).unwrap();
            let p_val =
                crate::seqspace::seminorm(space, &anx, p_star, 0.0).unwrap().value;
            let q_val = crate::seqspace::seminorm(space, &ones, p_star, 0.0)
                .unwrap()
                .value;
            let true_log_ratio = p_val.ln() - (n as f64) * mu.ln() - q_val.ln();
            assert!(
                true_log_ratio + 1e-9 >= pt.log_lower_bound,
                "recorded bound overstates the truth"
            );
            assert!(pt.log_lower_bound > 0.0, "bound must defeat the constant");
        }
    }
}
