//! Scalar real functions of the single variable `t`: parsing, evaluation,
//! exact symbolic differentiation and adaptive quadrature.
//!
//! The node set is closed under differentiation, so the derivative of any
//! `Expr` is again an `Expr`. Values are immutable after construction and
//! every operation here is pure.

mod parser;
mod quadrature;

pub use parser::{parse, SyntaxError};
pub use quadrature::{antiderivative, integrate, QuadratureError};

use std::fmt;

/// Unary operations. `Neg` is the unary minus of the grammar; the rest are
/// the nine named functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Log,
    Sqrt,
}

impl UnaryOp {
    fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Tan => "tan",
            UnaryOp::Sinh => "sinh",
            UnaryOp::Cosh => "cosh",
            UnaryOp::Tanh => "tanh",
            UnaryOp::Exp => "exp",
            UnaryOp::Log => "log",
            UnaryOp::Sqrt => "sqrt",
        }
    }
}

/// Binary operations of the grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Pow => "^",
        }
    }
}

/// Parsed abstract syntax tree of a real function of `t`.
///
/// Construct via [`parse`] or via the constructor methods ([`Expr::add`],
/// [`Expr::sin`], ...), which fold constant subtrees and a handful of
/// trivial identities so that programmatically built trees match what the
/// parser produces.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Constant(f64),
    Variable,
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

/// What went wrong while evaluating an [`Expr`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalErrorKind {
    DivisionByZero,
    LogDomain,
    SqrtDomain,
    /// Negative base raised to a non-integer power (real-valued arithmetic only).
    PowDomain,
    /// Finite inputs produced a non-finite value (overflow).
    NonFinite,
}

impl EvalErrorKind {
    fn describe(self) -> &'static str {
        match self {
            EvalErrorKind::DivisionByZero => "division by zero",
            EvalErrorKind::LogDomain => "log of a non-positive value",
            EvalErrorKind::SqrtDomain => "sqrt of a negative value",
            EvalErrorKind::PowDomain => "negative base with non-integer exponent",
            EvalErrorKind::NonFinite => "non-finite result",
        }
    }
}

/// Evaluation failure, carrying the offending subexpression.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{} in `{node}` at t = {t}", kind.describe())]
pub struct EvalError {
    pub kind: EvalErrorKind,
    /// Rendering of the subexpression that failed.
    pub node: String,
    pub t: f64,
}

#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn constant(value: f64) -> Expr {
        Expr::Constant(value)
    }

    /// The variable `t`.
    pub fn t() -> Expr {
        Expr::Variable
    }

    fn as_constant(&self) -> Option<f64> {
        match self {
            Expr::Constant(c) => Some(*c),
            _ => None,
        }
    }

    fn is_zero(&self) -> bool {
        matches!(self, Expr::Constant(c) if *c == 0.0)
    }

    fn is_one(&self) -> bool {
        matches!(self, Expr::Constant(c) if *c == 1.0)
    }

    pub fn add(lhs: Expr, rhs: Expr) -> Expr {
        if let (Some(a), Some(b)) = (lhs.as_constant(), rhs.as_constant()) {
            let v = a + b;
            if v.is_finite() {
                return Expr::Constant(v);
            }
        }
        if lhs.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return lhs;
        }
        if let Expr::Unary(UnaryOp::Neg, inner) = rhs {
            return Expr::sub(lhs, *inner);
        }
        Expr::Binary(BinaryOp::Add, Box::new(lhs), Box::new(rhs))
    }

    pub fn sub(lhs: Expr, rhs: Expr) -> Expr {
        if let (Some(a), Some(b)) = (lhs.as_constant(), rhs.as_constant()) {
            let v = a - b;
            if v.is_finite() {
                return Expr::Constant(v);
            }
        }
        if rhs.is_zero() {
            return lhs;
        }
        if lhs.is_zero() {
            return Expr::neg(rhs);
        }
        if let Expr::Unary(UnaryOp::Neg, inner) = rhs {
            return Expr::add(lhs, *inner);
        }
        Expr::Binary(BinaryOp::Sub, Box::new(lhs), Box::new(rhs))
    }

    pub fn mul(lhs: Expr, rhs: Expr) -> Expr {
        if let (Some(a), Some(b)) = (lhs.as_constant(), rhs.as_constant()) {
            let v = a * b;
            if v.is_finite() {
                return Expr::Constant(v);
            }
        }
        if lhs.is_zero() || rhs.is_zero() {
            return Expr::Constant(0.0);
        }
        if lhs.is_one() {
            return rhs;
        }
        if rhs.is_one() {
            return lhs;
        }
        Expr::Binary(BinaryOp::Mul, Box::new(lhs), Box::new(rhs))
    }

    pub fn div(lhs: Expr, rhs: Expr) -> Expr {
        if let (Some(a), Some(b)) = (lhs.as_constant(), rhs.as_constant()) {
            if b != 0.0 {
                let v = a / b;
                if v.is_finite() {
                    return Expr::Constant(v);
                }
            }
        }
        if rhs.is_one() {
            return lhs;
        }
        Expr::Binary(BinaryOp::Div, Box::new(lhs), Box::new(rhs))
    }

    pub fn pow(base: Expr, exponent: Expr) -> Expr {
        if let (Some(a), Some(b)) = (base.as_constant(), exponent.as_constant()) {
            // Fold only values the evaluator would accept.
            if !(a < 0.0 && b.fract() != 0.0) && !(a == 0.0 && b < 0.0) {
                let v = a.powf(b);
                if v.is_finite() {
                    return Expr::Constant(v);
                }
            }
        }
        if exponent.is_one() {
            return base;
        }
        if exponent.is_zero() {
            // IEEE pow(x, 0) is 1 for every x.
            return Expr::Constant(1.0);
        }
        Expr::Binary(BinaryOp::Pow, Box::new(base), Box::new(exponent))
    }

    pub fn neg(inner: Expr) -> Expr {
        match inner {
            Expr::Constant(c) => Expr::Constant(-c),
            Expr::Unary(UnaryOp::Neg, child) => *child,
            other => Expr::Unary(UnaryOp::Neg, Box::new(other)),
        }
    }

    pub fn unary(op: UnaryOp, inner: Expr) -> Expr {
        if op == UnaryOp::Neg {
            return Expr::neg(inner);
        }
        if let Some(c) = inner.as_constant() {
            if let Ok(v) = apply_unary(op, c) {
                return Expr::Constant(v);
            }
        }
        Expr::Unary(op, Box::new(inner))
    }

    pub fn sin(inner: Expr) -> Expr {
        Expr::unary(UnaryOp::Sin, inner)
    }
    pub fn cos(inner: Expr) -> Expr {
        Expr::unary(UnaryOp::Cos, inner)
    }
    pub fn tan(inner: Expr) -> Expr {
        Expr::unary(UnaryOp::Tan, inner)
    }
    pub fn sinh(inner: Expr) -> Expr {
        Expr::unary(UnaryOp::Sinh, inner)
    }
    pub fn cosh(inner: Expr) -> Expr {
        Expr::unary(UnaryOp::Cosh, inner)
    }
    pub fn tanh(inner: Expr) -> Expr {
        Expr::unary(UnaryOp::Tanh, inner)
    }
    pub fn exp(inner: Expr) -> Expr {
        Expr::unary(UnaryOp::Exp, inner)
    }
    pub fn log(inner: Expr) -> Expr {
        Expr::unary(UnaryOp::Log, inner)
    }
    pub fn sqrt(inner: Expr) -> Expr {
        Expr::unary(UnaryOp::Sqrt, inner)
    }

    /// Value of the expression at `t`.
    pub fn eval(&self, t: f64) -> Result<f64, EvalError> {
        match self {
            Expr::Constant(c) => Ok(*c),
            Expr::Variable => Ok(t),
            Expr::Unary(op, inner) => {
                let x = inner.eval(t)?;
                apply_unary(*op, x).map_err(|kind| EvalError {
                    kind,
                    node: self.to_string(),
                    t,
                })
            }
            Expr::Binary(op, lhs, rhs) => {
                let a = lhs.eval(t)?;
                let b = rhs.eval(t)?;
                let fail = |kind| EvalError {
                    kind,
                    node: self.to_string(),
                    t,
                };
                let v = match op {
                    BinaryOp::Add => a + b,
                    BinaryOp::Sub => a - b,
                    BinaryOp::Mul => a * b,
                    BinaryOp::Div => {
                        if b == 0.0 {
                            return Err(fail(EvalErrorKind::DivisionByZero));
                        }
                        a / b
                    }
                    BinaryOp::Pow => {
                        if a < 0.0 && b.fract() != 0.0 {
                            return Err(fail(EvalErrorKind::PowDomain));
                        }
                        if a == 0.0 && b < 0.0 {
                            return Err(fail(EvalErrorKind::DivisionByZero));
                        }
                        a.powf(b)
                    }
                };
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(fail(EvalErrorKind::NonFinite))
                }
            }
        }
    }

    /// Exact symbolic derivative with respect to `t`.
    ///
    /// Built from the sum, product, quotient, chain and power rules; no
    /// numerical approximation is involved.
    pub fn differentiate(&self) -> Expr {
        match self {
            Expr::Constant(_) => Expr::Constant(0.0),
            Expr::Variable => Expr::Constant(1.0),
            Expr::Unary(op, inner) => {
                let u = inner.as_ref().clone();
                let du = inner.differentiate();
                match op {
                    UnaryOp::Neg => Expr::neg(du),
                    UnaryOp::Sin => Expr::mul(Expr::cos(u), du),
                    UnaryOp::Cos => Expr::neg(Expr::mul(Expr::sin(u), du)),
                    UnaryOp::Tan => Expr::div(du, Expr::pow(Expr::cos(u), Expr::Constant(2.0))),
                    UnaryOp::Sinh => Expr::mul(Expr::cosh(u), du),
                    UnaryOp::Cosh => Expr::mul(Expr::sinh(u), du),
                    UnaryOp::Tanh => Expr::div(du, Expr::pow(Expr::cosh(u), Expr::Constant(2.0))),
                    UnaryOp::Exp => Expr::mul(Expr::exp(u), du),
                    UnaryOp::Log => Expr::div(du, u),
                    UnaryOp::Sqrt => Expr::div(du, Expr::mul(Expr::Constant(2.0), Expr::sqrt(u))),
                }
            }
            Expr::Binary(op, lhs, rhs) => {
                let u = lhs.as_ref().clone();
                let v = rhs.as_ref().clone();
                let du = lhs.differentiate();
                let dv = rhs.differentiate();
                match op {
                    BinaryOp::Add => Expr::add(du, dv),
                    BinaryOp::Sub => Expr::sub(du, dv),
                    BinaryOp::Mul => Expr::add(Expr::mul(du, v.clone()), Expr::mul(u, dv)),
                    BinaryOp::Div => Expr::div(
                        Expr::sub(Expr::mul(du, v.clone()), Expr::mul(u, dv)),
                        Expr::pow(v, Expr::Constant(2.0)),
                    ),
                    BinaryOp::Pow => {
                        if let Some(n) = rhs.as_constant() {
                            // d(u^n) = n * u^(n-1) * u'
                            Expr::mul(
                                Expr::mul(Expr::Constant(n), Expr::pow(u, Expr::Constant(n - 1.0))),
                                du,
                            )
                        } else {
                            // d(u^v) = u^v * (v' log u + v u'/u)
                            Expr::mul(
                                Expr::pow(u.clone(), v.clone()),
                                Expr::add(
                                    Expr::mul(dv, Expr::log(u.clone())),
                                    Expr::div(Expr::mul(v, du), u),
                                ),
                            )
                        }
                    }
                }
            }
        }
    }
}

fn apply_unary(op: UnaryOp, x: f64) -> Result<f64, EvalErrorKind> {
    let v = match op {
        UnaryOp::Neg => -x,
        UnaryOp::Sin => x.sin(),
        UnaryOp::Cos => x.cos(),
        UnaryOp::Tan => x.tan(),
        UnaryOp::Sinh => x.sinh(),
        UnaryOp::Cosh => x.cosh(),
        UnaryOp::Tanh => x.tanh(),
        UnaryOp::Exp => x.exp(),
        UnaryOp::Log => {
            if x <= 0.0 {
                return Err(EvalErrorKind::LogDomain);
            }
            x.ln()
        }
        UnaryOp::Sqrt => {
            if x < 0.0 {
                return Err(EvalErrorKind::SqrtDomain);
            }
            x.sqrt()
        }
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalErrorKind::NonFinite)
    }
}

// Precedence ranks used by the printer. A child is parenthesized when its
// rank is below the minimum its position requires, which is exactly what the
// grammar needs for print-then-parse to reproduce the tree.
const PREC_ADD: u8 = 1;
const PREC_NEG: u8 = 2;
const PREC_MUL: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

fn precedence(e: &Expr) -> u8 {
    match e {
        // A negative constant prints with a leading minus, so it binds like
        // a unary minus, not like an atom.
        Expr::Constant(c) if c.is_sign_negative() => PREC_NEG,
        Expr::Constant(_) | Expr::Variable => PREC_ATOM,
        Expr::Unary(UnaryOp::Neg, _) => PREC_NEG,
        Expr::Unary(..) => PREC_ATOM,
        Expr::Binary(BinaryOp::Add | BinaryOp::Sub, ..) => PREC_ADD,
        Expr::Binary(BinaryOp::Mul | BinaryOp::Div, ..) => PREC_MUL,
        Expr::Binary(BinaryOp::Pow, ..) => PREC_POW,
    }
}

fn write_expr(e: &Expr, min_prec: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    if precedence(e) < min_prec {
        write!(out, "(")?;
        write_expr(e, 0, out)?;
        return write!(out, ")");
    }
    match e {
        Expr::Constant(c) => write!(out, "{c}"),
        Expr::Variable => write!(out, "t"),
        Expr::Unary(UnaryOp::Neg, inner) => {
            write!(out, "-")?;
            write_expr(inner, PREC_MUL, out)
        }
        Expr::Unary(op, inner) => {
            write!(out, "{}(", op.name())?;
            write_expr(inner, 0, out)?;
            write!(out, ")")
        }
        Expr::Binary(op, lhs, rhs) => {
            let (lmin, rmin) = match op {
                BinaryOp::Add | BinaryOp::Sub => (PREC_ADD, PREC_MUL),
                BinaryOp::Mul | BinaryOp::Div => (PREC_MUL, PREC_POW),
                BinaryOp::Pow => (PREC_ATOM, PREC_POW),
            };
            write_expr(lhs, lmin, out)?;
            write!(out, "{}", op.symbol())?;
            write_expr(rhs, rmin, out)
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(self, 0, f)
    }
}
