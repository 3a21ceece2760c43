//! Line-delimited classification records: flat, diff-friendly rows for
//! certificates, refutations, and inconclusive verdicts, with merging and a
//! record-level consistency audit against the condition hierarchy.
//!
//! Records are one JSON object per line, one row per verdict locus
//! `(operator, condition, p, horizon)`, so runs can be concatenated,
//! deduplicated, and diffed by ordinary line tools.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifier::{
    ClassificationReport, ConditionTag, MuEvidence, Outcome, RefutationEvidence, Status,
    HIERARCHY_EDGES,
};
use crate::mu::MuOrigin;
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("record serialization failed: {0}")]
    Serde(#[from] serde_json::Error),
    #[error("line {line}: malformed record: {detail}")]
    Parse { line: usize, detail: String },
}

/// One flat record for one verdict locus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    /// Operator label the verdict refers to.
    pub op_id: String,
    /// Condition name (`A-BDD`, `A-BDD-GEN`, `M-TOP`, `TOP`, `NEW1`, `NEW2`).
    pub condition: String,
    /// `certified`, `refuted`, or `inconclusive`.
    pub status: String,
    /// `closed form` or `probed window`.
    pub scope: String,
    /// Grading index of the entry (certificates) or of the witness locus
    /// (refutations); absent for condition-level rows.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<String>,
    /// Controlling grading index, when the evidence names one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<String>,
    /// Series horizon for `NEW1`/`NEW2` rows.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    /// Growth-constant summary of a certificate entry, or the refuted
    /// constant.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_summary: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    /// Leading divergence points or radius bounds backing a refutation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evidence_head: Option<String>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub notes: String,
}

fn f64_of<T: Scalar>(v: T) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

fn mu_summary<T: Scalar>(mu: &MuEvidence<T>) -> String {
    match mu {
        MuEvidence::Pair { log_m, log_rate } => format!(
            "geometric: μ_n ≤ {}·{}^n",
            f64_of(log_m.exp()),
            f64_of(log_rate.exp())
        ),
        MuEvidence::Sequence(seq) => match seq.origin() {
            MuOrigin::Geometric { log_m, log_rate } => format!(
                "geometric: μ_n ≤ {}·{}^n",
                f64_of(log_m.exp()),
                f64_of(log_rate.exp())
            ),
            MuOrigin::PowerForm { d } => format!(
                "power form: μ_n = (n/{d})^n·e^-n, series radius {d}",
                d = f64_of(*d)
            ),
            MuOrigin::CauchyForm { q, s } => format!(
                "factorial form: μ_n = n!·{s}/({s}-{q})^(n+1), series radius {r}",
                s = f64_of(*s),
                q = f64_of(*q),
                r = f64_of(*s - *q)
            ),
            MuOrigin::Scan {
                window,
                analytic_tail,
                ..
            } => format!(
                "window scan up to n = {window}{}",
                if *analytic_tail {
                    ", closed-form tail"
                } else {
                    ""
                }
            ),
            MuOrigin::Expr(e) => format!("expression in n: {e}"),
        },
    }
}

fn evidence_head<T: Scalar>(ev: &RefutationEvidence<T>) -> String {
    match ev {
        RefutationEvidence::Divergence(points) => {
            let mut parts: Vec<String> = points
                .iter()
                .take(3)
                .map(|pt| {
                    format!(
                        "{}={}: log ≥ {}",
                        pt.axis,
                        f64_of(pt.position),
                        f64_of(pt.log_lower_bound)
                    )
                })
                .collect();
            if points.len() > 3 {
                parts.push(format!("… ({} points)", points.len()));
            }
            parts.join("; ")
        }
        RefutationEvidence::RadiiAtOrBelow { horizon, per_q } => {
            let qs: Vec<String> = per_q
                .iter()
                .take(4)
                .map(|(q, r)| format!("{q}: radius ≤ {}", f64_of(*r)))
                .collect();
            format!(
                "series radius at or below {} for every probed q — {}",
                f64_of(*horizon),
                qs.join("; ")
            )
        }
    }
}

/// Flatten one outcome into records, one per evidence entry.
pub fn records_from_outcome<T: Scalar>(op_id: &str, outcome: &Outcome<T>) -> Vec<ReportRecord> {
    let base = |status: Status, scope: String, horizon: Option<T>, notes: &str| ReportRecord {
        op_id: op_id.to_string(),
        condition: outcome.condition().to_string(),
        status: status.to_string(),
        scope,
        p: None,
        q: None,
        horizon: horizon.map(f64_of),
        mu_summary: None,
        witness: None,
        evidence_head: None,
        notes: notes.to_string(),
    };
    match outcome {
        Outcome::Certified(c) => {
            if c.entries.is_empty() {
                return vec![base(
                    Status::Certified,
                    c.scope.to_string(),
                    c.horizon,
                    &c.notes,
                )];
            }
            c.entries
                .iter()
                .map(|e| {
                    let mut rec = base(
                        Status::Certified,
                        c.scope.to_string(),
                        c.horizon,
                        &c.notes,
                    );
                    rec.p = Some(e.p.to_string());
                    rec.q = Some(e.q.to_string());
                    rec.mu_summary = Some(mu_summary(&e.mu));
                    rec
                })
                .collect()
        }
        Outcome::Refuted(r) => {
            if r.entries.is_empty() {
                return vec![base(
                    Status::Refuted,
                    r.scope.to_string(),
                    r.horizon,
                    &r.notes,
                )];
            }
            r.entries
                .iter()
                .map(|e| {
                    let mut rec = base(
                        Status::Refuted,
                        r.scope.to_string(),
                        r.horizon,
                        &r.notes,
                    );
                    rec.p = Some(e.p_star.to_string());
                    rec.q = e.q.map(|q| q.to_string());
                    rec.mu_summary = e
                        .log_mu
                        .map(|lm| format!("refutes μ = {}", f64_of(lm.exp())));
                    rec.witness = Some(e.witness.to_string());
                    rec.evidence_head = Some(evidence_head(&e.evidence));
                    rec
                })
                .collect()
        }
        Outcome::Inconclusive {
            horizon, reasons, ..
        } => {
            vec![base(
                Status::Inconclusive,
                "probed window".to_string(),
                *horizon,
                reasons,
            )]
        }
    }
}

/// Flatten a full classification run into records.
pub fn records_from_report<T: Scalar>(report: &ClassificationReport<T>) -> Vec<ReportRecord> {
    let mut out = Vec::new();
    for outcome in &report.outcomes {
        out.extend(records_from_outcome(&report.problem_label, outcome));
    }
    sort_records(&mut out);
    out
}

fn condition_rank(condition: &str) -> u8 {
    match ConditionTag::from_str(condition) {
        Ok(ConditionTag::ABdd) => 0,
        Ok(ConditionTag::ABddGen) => 1,
        Ok(ConditionTag::MTop) => 2,
        Ok(ConditionTag::Top) => 3,
        Ok(ConditionTag::New1) => 4,
        Ok(ConditionTag::New2) => 5,
        Err(_) => 6,
    }
}

/// Total order on optional horizons (absent first, then ascending).
fn horizon_key(h: Option<f64>) -> (u8, u64) {
    match h {
        None => (0, 0),
        Some(v) => (1, v.to_bits()),
    }
}

/// Deterministic order: operator, hierarchy position, horizon, grading
/// index, status, then the evidence fields as tie-breakers (several
/// refutation entries can share one locus, e.g. one row per grid constant).
pub fn sort_records(records: &mut [ReportRecord]) {
    let key = |r: &ReportRecord| {
        (
            r.op_id.clone(),
            condition_rank(&r.condition),
            horizon_key(r.horizon),
            r.p.clone(),
            r.status.clone(),
            r.q.clone(),
            r.mu_summary.clone(),
            r.witness.clone(),
            r.evidence_head.clone(),
            r.notes.clone(),
        )
    };
    records.sort_by_key(key);
}

/// Write records as one JSON object per line.
pub fn write_jsonl<W: Write>(records: &[ReportRecord], w: &mut W) -> Result<(), ReportError> {
    for rec in records {
        serde_json::to_writer(&mut *w, rec)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Read records from line-delimited JSON; blank lines are skipped.
pub fn read_jsonl<R: BufRead>(r: R) -> Result<Vec<ReportRecord>, ReportError> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let rec: ReportRecord =
            serde_json::from_str(trimmed).map_err(|e| ReportError::Parse {
                line: i + 1,
                detail: e.to_string(),
            })?;
        out.push(rec);
    }
    Ok(out)
}

/// Result of merging record sets from several runs.
#[derive(Debug, Clone)]
pub struct MergeOutcome {
    /// Deduplicated, deterministically sorted records.
    pub records: Vec<ReportRecord>,
    /// Hierarchy violations found across the merged set.
    pub conflicts: Vec<String>,
}

/// Merge record sets: drop exact duplicates, sort deterministically, and
/// audit the combined set against the condition hierarchy.
pub fn merge(sets: &[Vec<ReportRecord>]) -> MergeOutcome {
    let mut records: Vec<ReportRecord> = Vec::new();
    for set in sets {
        for rec in set {
            if !records.contains(rec) {
                records.push(rec.clone());
            }
        }
    }
    sort_records(&mut records);
    let conflicts = consistency_violations(&records);
    MergeOutcome { records, conflicts }
}

/// Audit records against the hierarchy, per operator: a condition must not
/// be both certified and refuted at one horizon, and a certified upstream
/// condition forbids a refuted downstream one — except that a `NEW1`
/// certificate at horizon `R` is compatible with a `NEW1` refutation at a
/// strictly larger horizon.
pub fn consistency_violations(records: &[ReportRecord]) -> Vec<String> {
    let mut violations = Vec::new();
    let mut by_op: BTreeMap<&str, Vec<(ConditionTag, Status, Option<f64>)>> = BTreeMap::new();
    for rec in records {
        let Ok(cond) = ConditionTag::from_str(&rec.condition) else {
            violations.push(format!(
                "{}: unknown condition {:?}",
                rec.op_id, rec.condition
            ));
            continue;
        };
        let Ok(status) = Status::from_str(&rec.status) else {
            violations.push(format!("{}: unknown status {:?}", rec.op_id, rec.status));
            continue;
        };
        by_op
            .entry(rec.op_id.as_str())
            .or_default()
            .push((cond, status, rec.horizon));
    }

    for (op, rows) in by_op {
        let of = |cond: ConditionTag, status: Status| -> Vec<Option<f64>> {
            rows.iter()
                .filter(|(c, s, _)| *c == cond && *s == status)
                .map(|(_, _, h)| *h)
                .collect()
        };
        // Same condition, same horizon, contradictory statuses.
        for cond in [
            ConditionTag::ABdd,
            ConditionTag::ABddGen,
            ConditionTag::MTop,
            ConditionTag::Top,
            ConditionTag::New1,
            ConditionTag::New2,
        ] {
            let certs = of(cond, Status::Certified);
            let refs = of(cond, Status::Refuted);
            let clash = certs.iter().any(|ch| {
                refs.iter().any(|rh| match (ch, rh) {
                    (None, None) => true,
                    (Some(a), Some(b)) => (a - b).abs() <= 1e-12,
                    _ => false,
                })
            });
            if clash {
                violations.push(format!(
                    "{op}: {cond} both certified and refuted at the same horizon"
                ));
            }
        }
        // Forward edges.
        for &(up, down) in HIERARCHY_EDGES {
            let certs = of(up, Status::Certified);
            let refs = of(down, Status::Refuted);
            if certs.is_empty() || refs.is_empty() {
                continue;
            }
            if up == ConditionTag::New1 || down == ConditionTag::New1 {
                // A certificate at R conflicts only with refutations at
                // R' ≤ R; refuting a larger horizon is consistent.
                let conflict = certs.iter().any(|ch| {
                    refs.iter().any(|rh| match (ch, rh) {
                        (Some(c), Some(r)) => *r <= *c + 1e-12,
                        _ => true,
                    })
                });
                if !conflict {
                    continue;
                }
            }
            violations.push(format!("{op}: {up} certified but {down} refuted"));
        }
    }
    violations
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::{classify, Problem, ProbeConfig};
    use crate::operators::{DiagonalSymbol, Operator};
    use crate::seqspace::SpaceDescriptor;

    fn sample_records() -> Vec<ReportRecord> {
        let problem = Problem::Kothe {
            space: SpaceDescriptor::omega_sup(),
            op: Operator::diagonal(DiagonalSymbol::<f64>::Index),
        };
        let report = classify(&problem, &ProbeConfig::default()).unwrap();
        records_from_report(&report)
    }

    #[test]
    fn records_round_trip_through_jsonl() {
        let records = sample_records();
        assert!(!records.is_empty());
        let mut buf = Vec::new();
        write_jsonl(&records, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), records.len());
        let back = read_jsonl(buf.as_slice()).unwrap();
        assert_eq!(back, records);
    }

    #[test]
    fn malformed_lines_are_reported_with_their_position() {
        let input = b"{\"op_id\":\"x\",\"condition\":\"TOP\",\"status\":\"certified\",\"scope\":\"closed form\"}\nnot json\n";
        let err = read_jsonl(&input[..]).unwrap_err();
        let ReportError::Parse { line, .. } = err else {
            panic!("expected a parse error");
        };
        assert_eq!(line, 2);
    }

    #[test]
    fn identical_runs_merge_without_duplicates_or_conflicts() {
        let records = sample_records();
        let merged = merge(&[records.clone(), records.clone()]);
        assert_eq!(merged.records.len(), records.len());
        assert!(
            merged.conflicts.is_empty(),
            "unexpected conflicts: {:?}",
            merged.conflicts
        );
    }

    #[test]
    fn sorting_is_deterministic_and_hierarchy_ordered() {
        let mut records = sample_records();
        let orig = records.clone();
        records.reverse();
        sort_records(&mut records);
        assert_eq!(records, orig);
        let ranks: Vec<u8> = records.iter().map(|r| condition_rank(&r.condition)).collect();
        let mut sorted = ranks.clone();
        sorted.sort();
        assert_eq!(ranks, sorted);
    }

    #[test]
    fn contradictory_records_are_flagged() {
        let mk = |condition: &str, status: &str, horizon: Option<f64>| ReportRecord {
            op_id: "op".to_string(),
            condition: condition.to_string(),
            status: status.to_string(),
            scope: "closed form".to_string(),
            p: None,
            q: None,
            horizon,
            mu_summary: None,
            witness: None,
            evidence_head: None,
            notes: String::new(),
        };
        // Upstream certified, downstream refuted.
        let bad = vec![mk("M-TOP", "certified", None), mk("TOP", "refuted", None)];
        let v = consistency_violations(&bad);
        assert_eq!(v.len(), 1, "got {v:?}");
        assert!(v[0].contains("M-TOP certified but TOP refuted"));

        // Same condition, same horizon.
        let bad = vec![
            mk("NEW1", "certified", Some(1.0)),
            mk("NEW1", "refuted", Some(1.0)),
        ];
        assert!(!consistency_violations(&bad).is_empty());

        // A series certificate below a refuted horizon is lawful.
        let ok = vec![
            mk("NEW1", "certified", Some(0.2)),
            mk("NEW1", "refuted", Some(1.0)),
        ];
        assert!(
            consistency_violations(&ok).is_empty(),
            "independent horizons must not conflict"
        );

        // Different operators do not interact.
        let mut other = mk("TOP", "refuted", None);
        other.op_id = "other".to_string();
        let ok = vec![mk("M-TOP", "certified", None), other];
        assert!(consistency_violations(&ok).is_empty());
    }

    #[test]
    fn refutation_records_carry_witness_and_evidence() {
        let records = sample_records();
        let refuted: Vec<&ReportRecord> = records
            .iter()
            .filter(|r| r.status == "refuted" && r.condition == "A-BDD")
            .collect();
        assert!(!refuted.is_empty());
        for rec in refuted {
            assert!(rec.witness.is_some(), "refutation without witness: {rec:?}");
            let head = rec.evidence_head.as_deref().unwrap();
            assert!(head.contains("log ≥"), "unexpected evidence head: {head}");
        }
        let certified: Vec<&ReportRecord> = records
            .iter()
            .filter(|r| r.status == "certified" && r.condition == "M-TOP")
            .collect();
        assert!(!certified.is_empty());
        for rec in certified {
            assert!(rec.mu_summary.as_deref().unwrap().contains("geometric"));
            assert!(rec.p.is_some() && rec.q.is_some());
        }
    }
}
