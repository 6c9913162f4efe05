//! Polynomials `P_i` in the higher-order product rule
//!
//! ```text
//! (χ₁(·, u)·u·v)^(i) = ∂₂χ₁·u^(i)·u·v + χ₁·u^(i)·v + χ₁·u·v^(i)
//!                      + P_i(J₂^i χ₁(·, u), J^{i-1} v, J^{i-1} u)
//! ```
//!
//! in the variables `ξ_(a,b) = ∂₁ᵃ∂₂ᵇχ₁(s, u(s))`, `η_k = v^(k)(s)` and
//! `ζ_k = u^(k)(s)`. `P_1 = ξ_(1,0)·η_0·ζ_0`, and `P_{i+1}` is the total
//! `s`-derivative of `P_i` plus the non-leading terms from differentiating
//! the three leading terms.

use alloc::collections::btree_map::Entry;
use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::bivar::Jet2;
use crate::error::{Error, Result};

/// One monomial `ξ_(a,b)·η_k·Π ζ_j` without its coefficient.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Monomial {
    pub xi: (usize, usize),
    pub eta: usize,
    /// Sorted indices of the `ζ` factors, with repetition.
    pub zeta: Vec<usize>,
}

impl Monomial {
    fn new(xi: (usize, usize), eta: usize, mut zeta: Vec<usize>) -> Self {
        zeta.sort_unstable();
        Self { xi, eta, zeta }
    }

    /// Number of `η` and `ζ` factors.
    pub fn jet_degree(&self) -> usize {
        1 + self.zeta.len()
    }
}

/// Integer polynomial of order `i`, one `ξ`-factor and one `η`-factor per monomial.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct JetPolynomial {
    order: usize,
    terms: BTreeMap<Monomial, i64>,
}

impl JetPolynomial {
    fn empty(order: usize) -> Self {
        Self {
            order,
            terms: BTreeMap::new(),
        }
    }

    fn add_term(&mut self, coeff: i64, mono: Monomial) {
        if coeff == 0 {
            return;
        }
        match self.terms.entry(mono) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if *e.get() == 0 {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, i64)> {
        self.terms.iter().map(|(m, c)| (m, *c))
    }

    /// Total `s`-derivative, with `ξ_(a,b)' = ξ_(a+1,b) + ξ_(a,b+1)·ζ_1`,
    /// `η_k' = η_{k+1}` and `ζ_k' = ζ_{k+1}`.
    fn total_derivative(&self) -> Self {
        let mut out = Self::empty(self.order + 1);
        for (mono, &c) in &self.terms {
            let (a, b) = mono.xi;
            out.add_term(c, Monomial::new((a + 1, b), mono.eta, mono.zeta.clone()));
            let mut chained = mono.zeta.clone();
            chained.push(1);
            out.add_term(c, Monomial::new((a, b + 1), mono.eta, chained));
            out.add_term(c, Monomial::new(mono.xi, mono.eta + 1, mono.zeta.clone()));
            for k in 0..mono.zeta.len() {
                let mut shifted = mono.zeta.clone();
                shifted[k] += 1;
                out.add_term(c, Monomial::new(mono.xi, mono.eta, shifted));
            }
        }
        out
    }

    /// Evaluates at `ξ = jet`, `η = eta`, `ζ = zeta`.
    pub fn eval(&self, jet: &Jet2, eta: &[f64], zeta: &[f64]) -> Result<f64> {
        if jet.order() < self.order || eta.len() < self.order || zeta.len() < self.order {
            return Err(Error::InvalidArgument(alloc::format!(
                "P_{} needs a jet of order {} and {} derivatives of u and v",
                self.order,
                self.order,
                self.order
            )));
        }
        let mut sum = 0.0;
        for (mono, &c) in &self.terms {
            let mut term = c as f64 * jet[mono.xi] * eta[mono.eta];
            for &k in &mono.zeta {
                term *= zeta[k];
            }
            sum += term;
        }
        Ok(sum)
    }
}

/// `[P_1, ..., P_{max_order}]`.
pub fn build_p(max_order: usize) -> Vec<JetPolynomial> {
    let mut out: Vec<JetPolynomial> = Vec::with_capacity(max_order);
    if max_order == 0 {
        return out;
    }
    let mut p1 = JetPolynomial::empty(1);
    p1.add_term(1, Monomial::new((1, 0), 0, vec![0]));
    out.push(p1);
    for i in 1..max_order {
        let mut next = out[i - 1].total_derivative();
        // derivatives of ∂₂χ·u_i·u·v
        next.add_term(1, Monomial::new((1, 1), 0, vec![i, 0]));
        next.add_term(1, Monomial::new((0, 2), 0, vec![1, i, 0]));
        next.add_term(1, Monomial::new((0, 1), 0, vec![i, 1]));
        next.add_term(1, Monomial::new((0, 1), 1, vec![i, 0]));
        // derivatives of χ·u_i·v
        next.add_term(1, Monomial::new((1, 0), 0, vec![i]));
        next.add_term(1, Monomial::new((0, 1), 0, vec![1, i]));
        next.add_term(1, Monomial::new((0, 0), 1, vec![i]));
        // derivatives of χ·u·v_i
        next.add_term(1, Monomial::new((1, 0), i, vec![0]));
        next.add_term(1, Monomial::new((0, 1), i, vec![1, 0]));
        next.add_term(1, Monomial::new((0, 0), i, vec![1]));
        out.push(next);
    }
    out
}

/// `P_1, ..., P_K` with evaluation of the product rule.
#[derive(Debug, Clone)]
pub struct JetRecursion {
    polys: Vec<JetPolynomial>,
}

impl JetRecursion {
    pub fn new(max_order: usize) -> Self {
        Self {
            polys: build_p(max_order),
        }
    }

    pub fn max_order(&self) -> usize {
        self.polys.len()
    }

    /// `P_i` for `1 ≤ i ≤ max_order`.
    pub fn poly(&self, i: usize) -> Option<&JetPolynomial> {
        i.checked_sub(1).and_then(|k| self.polys.get(k))
    }

    /// `(χ₁(·, u)·u·v)^(i)(s)` from the jet of `χ₁` at `(s, u(s))` and the
    /// derivative values `v_jet = [v(s), ..., v^(i)(s)]`, `u_jet` likewise.
    pub fn derivative(&self, i: usize, jet: &Jet2, v_jet: &[f64], u_jet: &[f64]) -> Result<f64> {
        if i == 0 {
            return Ok(jet[(0, 0)] * u_jet[0] * v_jet[0]);
        }
        let p = self.poly(i).ok_or(Error::OrderOutOfRange {
            order: i,
            max: self.max_order(),
        })?;
        if v_jet.len() <= i || u_jet.len() <= i {
            return Err(Error::InvalidArgument(
                "derivative values of u and v are too short".into(),
            ));
        }
        let (chi, d2chi) = (jet[(0, 0)], jet[(0, 1)]);
        let (u, v) = (u_jet[0], v_jet[0]);
        let leading = d2chi * u_jet[i] * u * v + chi * u_jet[i] * v + chi * u * v_jet[i];
        Ok(leading + p.eval(jet, v_jet, u_jet)?)
    }
}
