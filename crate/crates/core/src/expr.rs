//! Closed-form expression DSL over the index variables `j`, `k`, `n`, `t`.
//!
//! The language is deliberately small: arithmetic (`+ - * / ^`, with `^`
//! right-associative and unary minus), the functions `log` (natural), `exp`,
//! `sqrt`, `abs`, and two-argument `min` / `max`, plus decimal literals.
//! There is no factorial and no conditional; anything requiring those lives in
//! typed constructs elsewhere in the crate.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr  := term (("+" | "-") term)*
//! term  := unary (("*" | "/") unary)*
//! unary := "-" unary | power
//! power := atom ("^" unary)?            // right-associative
//! atom  := NUMBER | VAR | FUNC "(" expr ("," expr)? ")" | "(" expr ")"
//! VAR   := "j" | "k" | "n" | "t"
//! FUNC  := "log" | "exp" | "sqrt" | "abs" | "min" | "max"
//! ```
//!
//! Printing is the inverse of parsing on ASTs: `parse(print(e)) == e` for
//! every representable expression (numeric literals are printed with Rust's
//! shortest round-trip `f64` formatting).

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

/// Index variables an expression may reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Var {
    J,
    K,
    N,
    T,
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Var::J => "j",
            Var::K => "k",
            Var::N => "n",
            Var::T => "t",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Func {
    Log,
    Exp,
    Sqrt,
    Abs,
    Min,
    Max,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Log => "log",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Min => "min",
            Func::Max => "max",
        }
    }

    fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max => 2,
            _ => 1,
        }
    }
}

/// Parsed expression tree.
///
/// Negative literals are always represented as `Neg(Num(..))` so that
/// parsing and printing are mutually inverse on the AST.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

/// Variable bindings for evaluation; unbound variables are an error.
#[derive(Debug, Clone, Copy, Default)]
pub struct Env<T> {
    pub j: Option<T>,
    pub k: Option<T>,
    pub n: Option<T>,
    pub t: Option<T>,
}

impl<T: Scalar> Env<T> {
    pub fn new() -> Self {
        Env {
            j: None,
            k: None,
            n: None,
            t: None,
        }
    }

    pub fn with_j(mut self, v: T) -> Self {
        self.j = Some(v);
        self
    }

    pub fn with_k(mut self, v: T) -> Self {
        self.k = Some(v);
        self
    }

    pub fn with_n(mut self, v: T) -> Self {
        self.n = Some(v);
        self
    }

    pub fn with_t(mut self, v: T) -> Self {
        self.t = Some(v);
        self
    }

    fn get(&self, v: Var) -> Option<T> {
        match v {
            Var::J => self.j,
            Var::K => self.k,
            Var::N => self.n,
            Var::T => self.t,
        }
    }
}

/// Evaluation failure: an unbound variable or a domain violation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable `{0}` is not bound in this context")]
    Unbound(Var),
    #[error("domain error: {0}")]
    Domain(&'static str),
}

impl Expr {
    /// Evaluates under `env`. Total on its declared domain; domain violations
    /// (log/sqrt of a negative, division by zero, fractional power of a
    /// negative) are reported as [`EvalError::Domain`]. Overflow to `±∞` is
    /// passed through; `NaN` is never returned.
    pub fn eval<T: Scalar>(&self, env: &Env<T>) -> Result<T, EvalError> {
        let v = match self {
            Expr::Num(c) => T::of(*c),
            Expr::Var(var) => env.get(*var).ok_or(EvalError::Unbound(*var))?,
            Expr::Neg(e) => -e.eval(env)?,
            Expr::Bin(op, l, r) => {
                let a = l.eval(env)?;
                let b = r.eval(env)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == T::zero() {
                            return Err(EvalError::Domain("division by zero"));
                        }
                        a / b
                    }
                    BinOp::Pow => {
                        if a < T::zero() && b.fract() != T::zero() {
                            return Err(EvalError::Domain("fractional power of a negative base"));
                        }
                        if a == T::zero() && b < T::zero() {
                            return Err(EvalError::Domain("negative power of zero"));
                        }
                        if a == T::zero() && b == T::zero() {
                            T::one() // 0^0 = 1 by the empty-product convention
                        } else {
                            a.powf(b)
                        }
                    }
                }
            }
            Expr::Call(f, args) => {
                let a = args[0].eval(env)?;
                match f {
                    Func::Log => {
                        if a <= T::zero() {
                            return Err(EvalError::Domain("log of a non-positive value"));
                        }
                        a.ln()
                    }
                    Func::Exp => a.exp(),
                    Func::Sqrt => {
                        if a < T::zero() {
                            return Err(EvalError::Domain("sqrt of a negative value"));
                        }
                        a.sqrt()
                    }
                    Func::Abs => a.abs(),
                    Func::Min => a.min(args[1].eval(env)?),
                    Func::Max => a.max(args[1].eval(env)?),
                }
            }
        };
        if v.is_nan() {
            return Err(EvalError::Domain("result is not a number"));
        }
        Ok(v)
    }

    /// The set of variables that occur in the expression.
    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(v) => {
                out.insert(*v);
            }
            Expr::Neg(e) => e.collect_vars(out),
            Expr::Bin(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            Expr::Call(_, args) => {
                for a in args {
                    a.collect_vars(out);
                }
            }
        }
    }

    /// If the expression has no free variables and evaluates cleanly, its value.
    pub fn as_constant(&self) -> Option<f64> {
        if !self.free_vars().is_empty() {
            return None;
        }
        self.eval(&Env::<f64>::new()).ok()
    }

    /// Syntactic decomposition as a monomial `c · j^α`, returning `(c, α)`.
    ///
    /// Recognizes products, quotients, constant powers, square roots, and
    /// negation of such monomials; anything else (sums, other variables,
    /// transcendental calls) yields `None`.  Powers and square roots require a
    /// positive base coefficient so the result is real for every `j ≥ 1`.
    pub fn as_monomial_in_j(&self) -> Option<(f64, f64)> {
        match self {
            Expr::Num(c) => Some((*c, 0.0)),
            Expr::Var(Var::J) => Some((1.0, 1.0)),
            Expr::Var(_) => None,
            Expr::Neg(e) => {
                let (c, a) = e.as_monomial_in_j()?;
                Some((-c, a))
            }
            Expr::Bin(BinOp::Mul, l, r) => {
                let (cl, al) = l.as_monomial_in_j()?;
                let (cr, ar) = r.as_monomial_in_j()?;
                Some((cl * cr, al + ar))
            }
            Expr::Bin(BinOp::Div, l, r) => {
                let (cl, al) = l.as_monomial_in_j()?;
                let (cr, ar) = r.as_monomial_in_j()?;
                (cr != 0.0).then_some((cl / cr, al - ar))
            }
            Expr::Bin(BinOp::Pow, base, exp) => {
                let e = exp.as_constant()?;
                let (c, a) = base.as_monomial_in_j()?;
                (c > 0.0).then_some((c.powf(e), a * e))
            }
            Expr::Call(Func::Sqrt, args) => match args.as_slice() {
                [arg] => {
                    let (c, a) = arg.as_monomial_in_j()?;
                    (c > 0.0).then_some((c.sqrt(), a / 2.0))
                }
                _ => None,
            },
            _ => None,
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Num(_) | Expr::Var(_) | Expr::Call(..) => 5,
            Expr::Neg(_) => 3,
            Expr::Bin(op, ..) => op.precedence(),
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        let needs_parens = self.precedence() < min_prec;
        if needs_parens {
            f.write_str("(")?;
        }
        match self {
            Expr::Num(c) => write!(f, "{c}")?,
            Expr::Var(v) => write!(f, "{v}")?,
            Expr::Neg(e) => {
                f.write_str("-")?;
                e.fmt_prec(f, 3)?;
            }
            Expr::Bin(op, l, r) => match op {
                // left-associative: the right operand must bind strictly tighter
                BinOp::Add | BinOp::Sub => {
                    l.fmt_prec(f, 1)?;
                    f.write_str(op.symbol())?;
                    r.fmt_prec(f, 2)?;
                }
                BinOp::Mul | BinOp::Div => {
                    l.fmt_prec(f, 2)?;
                    f.write_str(op.symbol())?;
                    r.fmt_prec(f, 3)?;
                }
                // right-associative; the grammar takes a bare atom on the left
                // and a full unary on the right
                BinOp::Pow => {
                    l.fmt_prec(f, 5)?;
                    f.write_str(op.symbol())?;
                    r.fmt_prec(f, 3)?;
                }
            },
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    a.fmt_prec(f, 0)?;
                }
                f.write_str(")")?;
            }
        }
        if needs_parens {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// Parse failure with the byte offset at which it was detected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

impl FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_expr(s)
    }
}

/// Parses the DSL; see the module docs for the grammar.
pub fn parse_expr(input: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        src: input.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            self.skip_ws();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.term()?;
        loop {
            if self.eat(b'+') {
                e = Expr::Bin(BinOp::Add, Box::new(e), Box::new(self.term()?));
            } else if self.eat(b'-') {
                e = Expr::Bin(BinOp::Sub, Box::new(e), Box::new(self.term()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.unary()?;
        loop {
            if self.eat(b'*') {
                e = Expr::Bin(BinOp::Mul, Box::new(e), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                e = Expr::Bin(BinOp::Div, Box::new(e), Box::new(self.unary()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let exponent = self.unary()?;
            Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exponent)))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                self.skip_ws();
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.identifier(),
            Some(c) => Err(self.err(format!("unexpected character `{}`", c as char))),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.peek() == Some(b'.') {
            self.pos += 1;
            if !matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                return Err(self.err("expected digits after decimal point"));
            }
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        if matches!(self.peek(), Some(b'e') | Some(b'E')) {
            // only an exponent if something digit-like follows
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+') | Some(b'-')) {
                self.pos += 1;
            }
            if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.pos += 1;
                }
            } else {
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        let value: f64 = text
            .parse()
            .map_err(|_| self.err(format!("invalid numeric literal `{text}`")))?;
        self.skip_ws();
        Ok(Expr::Num(value))
    }

    fn identifier(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphabetic()) {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii letters");
        let name_pos = start;
        self.skip_ws();
        let var = match name {
            "j" => Some(Var::J),
            "k" => Some(Var::K),
            "n" => Some(Var::N),
            "t" => Some(Var::T),
            _ => None,
        };
        if let Some(v) = var {
            return Ok(Expr::Var(v));
        }
        let func = match name {
            "log" => Some(Func::Log),
            "exp" => Some(Func::Exp),
            "sqrt" => Some(Func::Sqrt),
            "abs" => Some(Func::Abs),
            "min" => Some(Func::Min),
            "max" => Some(Func::Max),
            _ => None,
        };
        let Some(func) = func else {
            return Err(ParseError {
                pos: name_pos,
                msg: format!("unknown identifier `{name}`"),
            });
        };
        if !self.eat(b'(') {
            return Err(self.err(format!("expected `(` after `{name}`")));
        }
        let mut args = vec![self.expr()?];
        while self.eat(b',') {
            args.push(self.expr()?);
        }
        if !self.eat(b')') {
            return Err(self.err("expected `)`"));
        }
        if args.len() != func.arity() {
            return Err(ParseError {
                pos: name_pos,
                msg: format!(
                    "`{name}` takes {} argument(s), got {}",
                    func.arity(),
                    args.len()
                ),
            });
        }
        Ok(Expr::Call(func, args))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn p(s: &str) -> Expr {
        parse_expr(s).unwrap()
    }

    fn ev(s: &str, env: &Env<f64>) -> f64 {
        p(s).eval(env).unwrap()
    }

    #[test]
    fn arithmetic_precedence() {
        let env = Env::new();
        assert_eq!(ev("1+2*3", &env), 7.0);
        assert_eq!(ev("(1+2)*3", &env), 9.0);
        assert_eq!(ev("2^3^2", &env), 512.0); // right-associative
        assert_eq!(ev("-2^2", &env), -4.0); // unary minus binds looser than ^
        assert_eq!(ev("2^-1", &env), 0.5);
        assert_eq!(ev("10-4-3", &env), 3.0); // left-associative
    }

    #[test]
    fn variables_and_functions() {
        let env = Env::new().with_j(4.0).with_k(2.0);
        assert_eq!(ev("j^k", &env), 16.0);
        assert_eq!(ev("1 - 1/j", &env), 0.75);
        assert_relative_eq!(ev("exp(-j/k)", &env), (-2.0f64).exp());
        assert_eq!(ev("min(3, j)", &env), 3.0);
        assert_eq!(ev("max(3, j)", &env), 4.0);
        assert_eq!(ev("abs(1-j)", &env), 3.0);
        assert_relative_eq!(ev("sqrt(j)", &env), 2.0);
        assert_relative_eq!(ev("log(j)", &env), 4.0f64.ln());
    }

    #[test]
    fn zero_pow_zero_is_one() {
        assert_eq!(ev("0^0", &Env::new()), 1.0);
    }

    #[test]
    fn domain_errors() {
        let env = Env::<f64>::new().with_j(1.0);
        assert!(matches!(
            p("log(j-1)").eval(&env),
            Err(EvalError::Domain(_))
        ));
        assert!(matches!(
            p("1/(j-1)").eval(&env),
            Err(EvalError::Domain(_))
        ));
        assert!(matches!(
            p("sqrt(j-2)").eval(&env),
            Err(EvalError::Domain(_))
        ));
        assert!(matches!(
            p("(0-2)^0.5").eval(&env),
            Err(EvalError::Domain(_))
        ));
        assert!(matches!(p("j^k").eval(&env), Err(EvalError::Unbound(Var::K))));
    }

    #[test]
    fn parse_errors_carry_positions() {
        let e = parse_expr("1 + foo(2)").unwrap_err();
        assert_eq!(e.pos, 4);
        assert!(e.msg.contains("unknown identifier"));
        assert!(parse_expr("min(1)").is_err()); // arity
        assert!(parse_expr("1 +").is_err());
        assert!(parse_expr("(1").is_err());
        assert!(parse_expr("1 2").is_err());
        assert!(parse_expr("").is_err());
    }

    #[test]
    fn display_round_trips_handwritten_cases() {
        for s in [
            "j^k",
            "1-1/j",
            "exp(-j/k)",
            "min(4,log(j))",
            "2^-3",
            "-(1+2)",
            "-2*3",
            "(1+2)*3",
            "2^3^2",
            "(2^3)^2",
            "j*(k+1)",
            "1e-3*j",
        ] {
            let e = p(s);
            let printed = e.to_string();
            assert_eq!(p(&printed), e, "round-trip failed for `{s}` -> `{printed}`");
        }
    }

    #[test]
    fn constant_recognition() {
        assert_eq!(p("2^4").as_constant(), Some(16.0));
        assert_eq!(p("j+1").as_constant(), None);
        assert_eq!(
            p("log(j)+k").free_vars().into_iter().collect::<Vec<_>>(),
            vec![Var::J, Var::K]
        );
    }

    #[test]
    fn monomial_recognition() {
        assert_eq!(p("j").as_monomial_in_j(), Some((1.0, 1.0)));
        assert_eq!(p("2*j").as_monomial_in_j(), Some((2.0, 1.0)));
        assert_eq!(p("j^2").as_monomial_in_j(), Some((1.0, 2.0)));
        assert_eq!(p("0.5*j^3").as_monomial_in_j(), Some((0.5, 3.0)));
        assert_eq!(p("4*j^1.5").as_monomial_in_j(), Some((4.0, 1.5)));
        assert_eq!(p("sqrt(j)").as_monomial_in_j(), Some((1.0, 0.5)));
        assert_eq!(p("3/j").as_monomial_in_j(), Some((3.0, -1.0)));
        assert_eq!(p("j*j*2").as_monomial_in_j(), Some((2.0, 2.0)));
        assert_eq!(p("-j").as_monomial_in_j(), Some((-1.0, 1.0)));
        assert_eq!(p("j+1").as_monomial_in_j(), None);
        assert_eq!(p("j^j").as_monomial_in_j(), None);
        assert_eq!(p("exp(j)").as_monomial_in_j(), None);
        assert_eq!(p("log(j)").as_monomial_in_j(), None);
        assert_eq!(p("(-2*j)^1.5").as_monomial_in_j(), None);
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0u32..1000).prop_map(|n| Expr::Num(f64::from(n) / 8.0)),
            prop_oneof![
                Just(Expr::Var(Var::J)),
                Just(Expr::Var(Var::K)),
                Just(Expr::Var(Var::N)),
                Just(Expr::Var(Var::T)),
            ],
        ];
        leaf.prop_recursive(6, 64, 4, |inner| {
            prop_oneof![
                inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
                (
                    prop_oneof![
                        Just(BinOp::Add),
                        Just(BinOp::Sub),
                        Just(BinOp::Mul),
                        Just(BinOp::Div),
                        Just(BinOp::Pow)
                    ],
                    inner.clone(),
                    inner.clone()
                )
                    .prop_map(|(op, l, r)| Expr::Bin(op, Box::new(l), Box::new(r))),
                (
                    prop_oneof![
                        Just(Func::Log),
                        Just(Func::Exp),
                        Just(Func::Sqrt),
                        Just(Func::Abs)
                    ],
                    inner.clone()
                )
                    .prop_map(|(f, a)| Expr::Call(f, vec![a])),
                (
                    prop_oneof![Just(Func::Min), Just(Func::Max)],
                    inner.clone(),
                    inner
                )
                    .prop_map(|(f, a, b)| Expr::Call(f, vec![a, b])),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn print_parse_round_trip(e in arb_expr()) {
            let printed = e.to_string();
            let reparsed = parse_expr(&printed)
                .unwrap_or_else(|err| panic!("printed form `{printed}` failed to parse: {err}"));
            prop_assert_eq!(reparsed, e);
        }
    }
}
