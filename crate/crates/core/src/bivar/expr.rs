//! Expression trees over the variables `s` and `eta`.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use super::taylor;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    S,
    Eta,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var(Var),
    Add(Expr, Expr),
    Sub(Expr, Expr),
    Mul(Expr, Expr),
    Div(Expr, Expr),
    Pow(Expr, u32),
    Neg(Expr),
    Exp(Expr),
    Sin(Expr),
    Cos(Expr),
    Log(Expr),
}

/// Immutable, cheaply clonable expression; subtrees are shared.
#[derive(Clone, PartialEq)]
pub struct Expr(Arc<Node>);

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

impl Expr {
    fn new(node: Node) -> Self {
        Self(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn constant(c: f64) -> Self {
        // normalise -0.0
        Self::new(Node::Const(if c == 0.0 { 0.0 } else { c }))
    }

    pub fn var(v: Var) -> Self {
        Self::new(Node::Var(v))
    }

    pub fn s() -> Self {
        Self::var(Var::S)
    }

    pub fn eta() -> Self {
        Self::var(Var::Eta)
    }

    pub fn as_const(&self) -> Option<f64> {
        match *self.0 {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    pub fn add(&self, rhs: &Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Self::constant(a + b),
            (Some(a), _) if a == 0.0 => rhs.clone(),
            (_, Some(b)) if b == 0.0 => self.clone(),
            _ => Self::new(Node::Add(self.clone(), rhs.clone())),
        }
    }

    pub fn sub(&self, rhs: &Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Self::constant(a - b),
            (_, Some(b)) if b == 0.0 => self.clone(),
            (Some(a), _) if a == 0.0 => rhs.neg(),
            _ => Self::new(Node::Sub(self.clone(), rhs.clone())),
        }
    }

    pub fn mul(&self, rhs: &Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Self::constant(a * b),
            (Some(a), _) | (_, Some(a)) if a == 0.0 => Self::constant(0.0),
            (Some(a), _) if a == 1.0 => rhs.clone(),
            (_, Some(b)) if b == 1.0 => self.clone(),
            _ => Self::new(Node::Mul(self.clone(), rhs.clone())),
        }
    }

    /// Quotient; `None` when the denominator is the literal zero.
    pub fn div(&self, rhs: &Expr) -> Option<Expr> {
        if rhs.is_zero() {
            return None;
        }
        Some(match (self.as_const(), rhs.as_const()) {
            (Some(a), _) if a == 0.0 => Self::constant(0.0),
            (Some(a), Some(b)) => Self::constant(a / b),
            (_, Some(b)) if b == 1.0 => self.clone(),
            _ => Self::new(Node::Div(self.clone(), rhs.clone())),
        })
    }

    pub fn powi(&self, n: u32) -> Expr {
        match (self.as_const(), n) {
            (_, 0) => Self::constant(1.0),
            (_, 1) => self.clone(),
            (Some(c), _) => Self::constant(libm::pow(c, n as f64)),
            _ => Self::new(Node::Pow(self.clone(), n)),
        }
    }

    pub fn neg(&self) -> Expr {
        match &*self.0 {
            Node::Const(c) => Self::constant(-c),
            Node::Neg(inner) => inner.clone(),
            _ => Self::new(Node::Neg(self.clone())),
        }
    }

    pub fn exp(&self) -> Expr {
        match self.as_const() {
            Some(c) => Self::constant(libm::exp(c)),
            None => Self::new(Node::Exp(self.clone())),
        }
    }

    pub fn sin(&self) -> Expr {
        match self.as_const() {
            Some(c) => Self::constant(libm::sin(c)),
            None => Self::new(Node::Sin(self.clone())),
        }
    }

    pub fn cos(&self) -> Expr {
        match self.as_const() {
            Some(c) => Self::constant(libm::cos(c)),
            None => Self::new(Node::Cos(self.clone())),
        }
    }

    pub fn log(&self) -> Expr {
        match self.as_const() {
            Some(c) if c > 0.0 => Self::constant(libm::log(c)),
            _ => Self::new(Node::Log(self.clone())),
        }
    }

    pub fn contains(&self, var: Var) -> bool {
        match &*self.0 {
            Node::Const(_) => false,
            Node::Var(v) => *v == var,
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.contains(var) || b.contains(var)
            }
            Node::Pow(a, _)
            | Node::Neg(a)
            | Node::Exp(a)
            | Node::Sin(a)
            | Node::Cos(a)
            | Node::Log(a) => a.contains(var),
        }
    }

    /// Symbolic partial derivative with respect to `var`.
    pub fn diff(&self, var: Var) -> Expr {
        match &*self.0 {
            Node::Const(_) => Self::constant(0.0),
            Node::Var(v) => Self::constant(if *v == var { 1.0 } else { 0.0 }),
            Node::Add(a, b) => a.diff(var).add(&b.diff(var)),
            Node::Sub(a, b) => a.diff(var).sub(&b.diff(var)),
            Node::Mul(a, b) => a.diff(var).mul(b).add(&a.mul(&b.diff(var))),
            Node::Div(a, b) => {
                let num = a.diff(var).mul(b).sub(&a.mul(&b.diff(var)));
                // b is syntactically nonzero, hence so is b^2
                num.div(&b.powi(2)).expect("nonzero denominator")
            }
            Node::Pow(a, n) => Self::constant(*n as f64)
                .mul(&a.powi(n - 1))
                .mul(&a.diff(var)),
            Node::Neg(a) => a.diff(var).neg(),
            Node::Exp(a) => self.mul(&a.diff(var)),
            Node::Sin(a) => a.cos().mul(&a.diff(var)),
            Node::Cos(a) => a.sin().mul(&a.diff(var)).neg(),
            Node::Log(a) => a
                .diff(var)
                .div(a)
                .unwrap_or_else(|| Self::new(Node::Div(a.diff(var), a.clone()))),
        }
    }

    pub fn eval(&self, s: f64, eta: f64) -> Result<f64> {
        let err = |reason| Error::Eval { s, eta, reason };
        let value = match &*self.0 {
            Node::Const(c) => *c,
            Node::Var(Var::S) => s,
            Node::Var(Var::Eta) => eta,
            Node::Add(a, b) => a.eval(s, eta)? + b.eval(s, eta)?,
            Node::Sub(a, b) => a.eval(s, eta)? - b.eval(s, eta)?,
            Node::Mul(a, b) => a.eval(s, eta)? * b.eval(s, eta)?,
            Node::Div(a, b) => {
                let den = b.eval(s, eta)?;
                if den == 0.0 {
                    return Err(err("division by zero"));
                }
                a.eval(s, eta)? / den
            }
            Node::Pow(a, n) => libm::pow(a.eval(s, eta)?, *n as f64),
            Node::Neg(a) => -a.eval(s, eta)?,
            Node::Exp(a) => libm::exp(a.eval(s, eta)?),
            Node::Sin(a) => libm::sin(a.eval(s, eta)?),
            Node::Cos(a) => libm::cos(a.eval(s, eta)?),
            Node::Log(a) => {
                let x = a.eval(s, eta)?;
                if x <= 0.0 {
                    return Err(err("log of a nonpositive value"));
                }
                libm::log(x)
            }
        };
        if !value.is_finite() {
            return Err(err("non-finite value"));
        }
        Ok(value)
    }

    /// Truncated Taylor series of `self(s(δ), eta(δ))` in one variable `δ`,
    /// given the series of both arguments (equal lengths).
    pub fn taylor(&self, s: &[f64], eta: &[f64]) -> Result<Vec<f64>> {
        let err = |reason| Error::Eval {
            s: s[0],
            eta: eta[0],
            reason,
        };
        let n = s.len();
        let out = match &*self.0 {
            Node::Const(c) => {
                let mut v = alloc::vec![0.0; n];
                v[0] = *c;
                v
            }
            Node::Var(Var::S) => s.to_vec(),
            Node::Var(Var::Eta) => eta.to_vec(),
            Node::Add(a, b) => zip_with(&a.taylor(s, eta)?, &b.taylor(s, eta)?, |x, y| x + y),
            Node::Sub(a, b) => zip_with(&a.taylor(s, eta)?, &b.taylor(s, eta)?, |x, y| x - y),
            Node::Mul(a, b) => taylor::mul(&a.taylor(s, eta)?, &b.taylor(s, eta)?),
            Node::Div(a, b) => taylor::div(&a.taylor(s, eta)?, &b.taylor(s, eta)?)
                .ok_or_else(|| err("division by zero"))?,
            Node::Pow(a, k) => taylor::powi(&a.taylor(s, eta)?, *k),
            Node::Neg(a) => a.taylor(s, eta)?.iter().map(|x| -x).collect(),
            Node::Exp(a) => taylor::exp(&a.taylor(s, eta)?),
            Node::Sin(a) => taylor::sin_cos(&a.taylor(s, eta)?).0,
            Node::Cos(a) => taylor::sin_cos(&a.taylor(s, eta)?).1,
            Node::Log(a) => {
                taylor::log(&a.taylor(s, eta)?).ok_or_else(|| err("log of a nonpositive value"))?
            }
        };
        if out.iter().any(|x| !x.is_finite()) {
            return Err(err("non-finite value"));
        }
        Ok(out)
    }

    fn precedence(&self) -> u8 {
        match &*self.0 {
            Node::Add(..) | Node::Sub(..) => 1,
            Node::Mul(..) | Node::Div(..) => 2,
            Node::Pow(..) => 3,
            _ => 4,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            f.write_str("(")?;
            fmt::Display::fmt(self, f)?;
            f.write_str(")")
        } else {
            fmt::Display::fmt(self, f)
        }
    }
}

fn zip_with(a: &[f64], b: &[f64], op: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    a.iter().zip(b).map(|(&x, &y)| op(x, y)).collect()
}

/// Prints in the input grammar: `print(parse(print(e))) == print(e)`.
/// The grammar has no unary minus, so negation is written `(0 - x)`.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Node::Const(c) if *c < 0.0 => write!(f, "(0 - {})", -c),
            Node::Const(c) => write!(f, "{c}"),
            Node::Var(Var::S) => f.write_str("s"),
            Node::Var(Var::Eta) => f.write_str("eta"),
            Node::Add(a, b) => {
                a.fmt_at(f, 1)?;
                f.write_str(" + ")?;
                b.fmt_at(f, 1)
            }
            Node::Sub(a, b) => {
                a.fmt_at(f, 1)?;
                f.write_str(" - ")?;
                b.fmt_at(f, 2)
            }
            Node::Mul(a, b) => {
                a.fmt_at(f, 2)?;
                f.write_str("*")?;
                b.fmt_at(f, 3)
            }
            Node::Div(a, b) => {
                a.fmt_at(f, 2)?;
                f.write_str("/")?;
                b.fmt_at(f, 3)
            }
            Node::Pow(a, n) => {
                a.fmt_at(f, 4)?;
                write!(f, "^{n}")
            }
            Node::Neg(a) => {
                f.write_str("(0 - ")?;
                a.fmt_at(f, 2)?;
                f.write_str(")")
            }
            Node::Exp(a) => write!(f, "exp({a})"),
            Node::Sin(a) => write!(f, "sin({a})"),
            Node::Cos(a) => write!(f, "cos({a})"),
            Node::Log(a) => write!(f, "log({a})"),
        }
    }
}
