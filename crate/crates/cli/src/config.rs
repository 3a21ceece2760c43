//! Problem construction from TOML files or inline flags.
//!
//! A *space* is a weight family plus a summation order; an *operator* is a
//! diagonal symbol in `j` or the Taylor-coefficient shift.  Both can come
//! from small TOML files (`--space`, `--operator`) or directly from flags
//! (`--family`, `--order`, `--symbol`, `--taylor-shift`).  Any malformed
//! input surfaces as an error here, which the binary maps to exit code 2.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use semigen_core::expr::parse_expr;
use semigen_core::operators::DiagonalSymbol;
use semigen_core::seqspace::LrOrder;
use semigen_core::{KotheMatrix, Operator, SpaceDescriptor};
use serde::Deserialize;

/// Weight entry for the banded family: 1 on the band `j ≤ 2k`, 0 beyond it.
pub const BANDED_ENTRY: &str = "max(0, min(1, 2*k - j + 1))";

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    /// `omega`, `rapid-decay`, `banded`, or `custom`.
    pub kind: String,
    /// Weight expression in `j`, `k`; required when `kind = "custom"`.
    pub entry: Option<String>,
    /// `"inf"` (default) or a number `r ≥ 1`.
    pub order: Option<OrderSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum OrderSpec {
    Text(String),
    Number(f64),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorFile {
    /// `diagonal` or `taylor-shift`.
    pub kind: String,
    /// Symbol expression in `j`; required when `kind = "diagonal"`.
    pub symbol: Option<String>,
}

pub fn parse_order(spec: &OrderSpec) -> Result<LrOrder> {
    match spec {
        OrderSpec::Number(r) => Ok(LrOrder::Finite(*r)),
        OrderSpec::Text(s) => match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "sup" => Ok(LrOrder::Infinity),
            other => other
                .parse::<f64>()
                .map(LrOrder::Finite)
                .map_err(|_| anyhow!("unknown summation order {other:?} (use \"inf\" or r ≥ 1)")),
        },
    }
}

pub fn matrix_from_family(kind: &str, entry: Option<&str>) -> Result<KotheMatrix> {
    match kind {
        "omega" => Ok(KotheMatrix::omega()),
        "rapid-decay" => Ok(KotheMatrix::rapid_decay()),
        "banded" => {
            let expr = parse_expr(BANDED_ENTRY).expect("built-in banded entry parses");
            KotheMatrix::custom(expr).context("banded weight family")
        }
        "custom" => {
            let text =
                entry.ok_or_else(|| anyhow!("custom weight family needs an `entry` expression"))?;
            let expr = parse_expr(text).with_context(|| format!("weight entry {text:?}"))?;
            KotheMatrix::custom(expr).with_context(|| format!("weight entry {text:?}"))
        }
        other => bail!("unknown weight family {other:?} (omega, rapid-decay, banded, custom)"),
    }
}

pub fn space_from_file(path: &Path) -> Result<SpaceDescriptor> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading space file {}", path.display()))?;
    let file: SpaceFile = toml::from_str(&text)
        .with_context(|| format!("parsing space file {}", path.display()))?;
    let matrix = matrix_from_family(&file.kind, file.entry.as_deref())?;
    let order = match &file.order {
        Some(spec) => parse_order(spec)?,
        None => LrOrder::Infinity,
    };
    SpaceDescriptor::new(matrix, order).map_err(|e| anyhow!("space file rejected: {e}"))
}

pub fn space_inline(family: &str, order: &str) -> Result<SpaceDescriptor> {
    let matrix = matrix_from_family(family, None)?;
    let order = parse_order(&OrderSpec::Text(order.to_string()))?;
    SpaceDescriptor::new(matrix, order).map_err(|e| anyhow!("space rejected: {e}"))
}

/// Map a symbol expression to the diagonal symbol, preserving the
/// closed-form fast paths for the canonical texts `j` and `log(j)`.
pub fn symbol_from_text(text: &str) -> Result<DiagonalSymbol<f64>> {
    match text.trim() {
        "j" => Ok(DiagonalSymbol::Index),
        "log(j)" | "ln(j)" => Ok(DiagonalSymbol::LogIndex),
        other => {
            let expr = parse_expr(other).with_context(|| format!("symbol {other:?}"))?;
            if let Some(c) = expr.as_constant() {
                return Ok(DiagonalSymbol::Constant(c));
            }
            DiagonalSymbol::from_expr(expr).map_err(|e| anyhow!("symbol {other:?}: {e}"))
        }
    }
}

pub fn operator_from_file(path: &Path) -> Result<Operator> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading operator file {}", path.display()))?;
    let file: OperatorFile = toml::from_str(&text)
        .with_context(|| format!("parsing operator file {}", path.display()))?;
    match file.kind.as_str() {
        "diagonal" => {
            let symbol = file
                .symbol
                .as_deref()
                .ok_or_else(|| anyhow!("diagonal operator needs a `symbol` expression"))?;
            Ok(Operator::diagonal(symbol_from_text(symbol)?))
        }
        "taylor-shift" => Ok(Operator::TaylorDifferentiation),
        other => bail!("unknown operator kind {other:?} (diagonal, taylor-shift)"),
    }
}
