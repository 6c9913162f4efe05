//! Smooth bivariate functions `φ(s, η)` on `[0, 1] × ℝ` as expression trees,
//! with exact symbolic partial derivatives and jets.

mod expr;
mod parse;
pub mod taylor;

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

pub use expr::{Expr, Node, Var};

use crate::error::{Error, Result};

/// Threshold below which `|∂₂φ|` counts as vanishing.
pub const VANISH_TOL: f64 = 1e-9;
/// Default per-axis sample count for box sups.
pub const DEFAULT_BOX_SAMPLES: usize = 200;
/// The `η`-range over which all box sups are taken.
pub const DEFAULT_ETA_RANGE: (f64, f64) = (-1.0, 1.0);

/// All partials `∂₁^{i₁} ∂₂^{i₂}` with `i₁ + i₂ ≤ order`, at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    order: usize,
    values: Vec<f64>,
}

impl Jet2 {
    /// Number of index pairs with total degree at most `order`.
    pub fn len_for(order: usize) -> usize {
        (order + 1) * (order + 2) / 2
    }

    fn index(i1: usize, i2: usize) -> usize {
        let d = i1 + i2;
        d * (d + 1) / 2 + i2
    }

    /// Builds a jet from a closure over the index set.
    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> Result<f64>) -> Result<Self> {
        let mut values = alloc::vec![0.0; Self::len_for(order)];
        for d in 0..=order {
            for i2 in 0..=d {
                values[Self::index(d - i2, i2)] = f(d - i2, i2)?;
            }
        }
        Ok(Self { order, values })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i1: usize, i2: usize) -> Option<f64> {
        (i1 + i2 <= self.order).then(|| self.values[Self::index(i1, i2)])
    }

    /// `(i₁, i₂, value)` in order of total degree.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..=self.order).flat_map(move |d| {
            (0..=d).map(move |i2| (d - i2, i2, self.values[Self::index(d - i2, i2)]))
        })
    }
}

impl core::ops::Index<(usize, usize)> for Jet2 {
    type Output = f64;

    fn index(&self, (i1, i2): (usize, usize)) -> &f64 {
        assert!(
            i1 + i2 <= self.order,
            "({i1}, {i2}) outside jet of order {}",
            self.order
        );
        &self.values[Self::index(i1, i2)]
    }
}

/// Anything that can report its value and jets on `[0, 1] × ℝ`.
pub trait JetSource {
    fn value(&self, s: f64, eta: f64) -> Result<f64>;

    fn jet(&self, order: usize, s: f64, eta: f64) -> Result<Jet2>;
}

type Memo = spin::Mutex<BTreeMap<(usize, usize), Expr>>;

/// Parsed `φ(s, η)` with a memo of its partial derivatives.
///
/// Clones share the memo; [`BivarFn::partial`] returns a function with a
/// fresh memo of its own.
#[derive(Clone)]
pub struct BivarFn {
    expr: Expr,
    memo: Arc<Memo>,
}

impl fmt::Debug for BivarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BivarFn({})", self.expr)
    }
}

impl fmt::Display for BivarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.expr, f)
    }
}

impl PartialEq for BivarFn {
    fn eq(&self, other: &Self) -> bool {
        self.expr == other.expr
    }
}

impl From<Expr> for BivarFn {
    fn from(expr: Expr) -> Self {
        Self {
            expr,
            memo: Arc::new(spin::Mutex::new(BTreeMap::new())),
        }
    }
}

impl BivarFn {
    pub fn parse(text: &str) -> Result<Self> {
        parse::parse(text).map(Self::from)
    }

    pub fn constant(c: f64) -> Self {
        Expr::constant(c).into()
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn as_const(&self) -> Option<f64> {
        self.expr.as_const()
    }

    pub fn depends_on(&self, var: Var) -> bool {
        self.expr.contains(var)
    }

    /// Expression of `∂₁^{i₁} ∂₂^{i₂} φ`, memoised.
    pub fn partial_expr(&self, i1: usize, i2: usize) -> Expr {
        if i1 == 0 && i2 == 0 {
            return self.expr.clone();
        }
        if let Some(e) = self.memo.lock().get(&(i1, i2)) {
            return e.clone();
        }
        // s-derivatives first, then eta-derivatives
        let e = if i2 > 0 {
            self.partial_expr(i1, i2 - 1).diff(Var::Eta)
        } else {
            self.partial_expr(i1 - 1, 0).diff(Var::S)
        };
        self.memo.lock().entry((i1, i2)).or_insert(e).clone()
    }

    pub fn partial(&self, i1: usize, i2: usize) -> BivarFn {
        self.partial_expr(i1, i2).into()
    }

    pub fn eval(&self, s: f64, eta: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::Domain { s });
        }
        self.expr.eval(s, eta)
    }

    /// Max of `|φ|` over a `samples × samples` grid on `[0, 1] × [eta_lo, eta_hi]`.
    pub fn box_sup(&self, eta_lo: f64, eta_hi: f64, samples: usize) -> Result<f64> {
        box_sup_with(|s, eta| self.expr.eval(s, eta), eta_lo, eta_hi, samples)
    }

    /// Checks `0 ∉ rng ∂₂φ` on the sampled box.
    ///
    /// Fails when `|∂₂φ| ≤ VANISH_TOL` at a grid point, or when `∂₂φ` changes
    /// sign between neighbouring grid points (a zero lies between them); the
    /// error reports the grid point of smallest `|∂₂φ|` involved.
    pub fn check_nonvanishing(&self, eta_lo: f64, eta_hi: f64, samples: usize) -> Result<()> {
        validate_box(eta_lo, eta_hi, samples)?;
        let d2 = self.partial_expr(0, 1);
        let mut sign = 0.0;
        let mut worst: Option<(f64, f64, f64)> = None;
        let mut crossing: Option<(f64, f64, f64)> = None;
        for a in 0..samples {
            let s = a as f64 / (samples - 1) as f64;
            let mut previous: Option<(f64, f64)> = None;
            for b in 0..samples {
                let eta = eta_lo + (eta_hi - eta_lo) * b as f64 / (samples - 1) as f64;
                let v = d2.eval(s, eta)?;
                if worst.is_none_or(|(_, _, w)| v.abs() < w.abs()) {
                    worst = Some((s, eta, v));
                }
                if sign == 0.0 && v != 0.0 {
                    sign = v.signum();
                }
                let flipped = v * sign < 0.0;
                if flipped && crossing.is_none() {
                    crossing = Some(match previous {
                        Some((pe, pv)) if pv.abs() < v.abs() => (s, pe, pv),
                        _ => (s, eta, v),
                    });
                }
                previous = Some((eta, v));
            }
        }
        let (s, eta, value) = worst.expect("at least one sample");
        if value.abs() <= VANISH_TOL {
            return Err(Error::VanishingDerivative { s, eta, value });
        }
        if let Some((s, eta, value)) = crossing {
            return Err(Error::VanishingDerivative { s, eta, value });
        }
        Ok(())
    }
}

impl JetSource for BivarFn {
    fn value(&self, s: f64, eta: f64) -> Result<f64> {
        self.eval(s, eta)
    }

    fn jet(&self, order: usize, s: f64, eta: f64) -> Result<Jet2> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::Domain { s });
        }
        Jet2::from_fn(order, |i1, i2| self.partial_expr(i1, i2).eval(s, eta))
    }
}

fn validate_box(eta_lo: f64, eta_hi: f64, samples: usize) -> Result<()> {
    if !(eta_lo <= eta_hi) || samples < 2 {
        return Err(Error::InvalidArgument(alloc::format!(
            "box sampling needs eta_lo <= eta_hi and samples >= 2 (got [{eta_lo}, {eta_hi}], {samples})"
        )));
    }
    Ok(())
}

/// Max of `|g|` over a `samples × samples` grid on `[0, 1] × [eta_lo, eta_hi]`.
pub fn box_sup_with(
    g: impl Fn(f64, f64) -> Result<f64>,
    eta_lo: f64,
    eta_hi: f64,
    samples: usize,
) -> Result<f64> {
    validate_box(eta_lo, eta_hi, samples)?;
    let mut sup = 0.0_f64;
    for a in 0..samples {
        let s = a as f64 / (samples - 1) as f64;
        for b in 0..samples {
            let eta = eta_lo + (eta_hi - eta_lo) * b as f64 / (samples - 1) as f64;
            sup = sup.max(g(s, eta)?.abs());
        }
    }
    Ok(sup)
}
