//! The kernel
//!
//! ```text
//! χ(s, η) = 4 / ∂₂φ(s, x(s)) · ∫₀¹ ∂₂²φ(s, x(s) + 2tη) dt
//! ```
//!
//! for which `2ℓ((f'(x + 2u) − f'(x))v) = χ(·, u)·u·v`. Partials are
//! computed by differentiating under the integral: `∂₂ᵇ` brings down
//! `(2t)ᵇ ∂₂^{b+2}φ`, and `∂₁ᵃ` is read off a Taylor expansion in `s` that
//! carries `x(s + δ)` and `1/∂₂φ(s + δ, x(s + δ))`.

use alloc::vec;
use alloc::vec::Vec;

use crate::bivar::taylor;
use crate::bivar::{Expr, Jet2, JetSource};
use crate::error::{Error, Result};
use crate::funrep::{clenshaw, SmoothFn};
use crate::nemytskii::CompOp;
use crate::quadrature::GaussLegendre;

/// Default number of Gauss–Legendre nodes.
pub const DEFAULT_QUAD_NODES: usize = 32;

/// Evaluator for `χ` and its jets around a base point `x`.
#[derive(Debug, Clone)]
pub struct ChiKernel {
    d2phi: Expr,
    // ψ_b = ∂₂^{b+2}φ for b = 0..=max_order
    psi: Vec<Expr>,
    // Chebyshev coefficients of x^(k) for k = 0..=max_order
    x_derivs: Vec<Vec<f64>>,
    quad: GaussLegendre,
    max_order: usize,
    zero: bool,
}

impl ChiKernel {
    /// Kernel at base point `x` providing jets up to total order `max_order`.
    pub fn new(op: &CompOp, x: &SmoothFn, quad_nodes: usize, max_order: usize) -> Result<Self> {
        // validates x against the η-range and the grid
        op.multiplier(x)?;
        let quad = GaussLegendre::new(quad_nodes)?;
        let phi = op.phi();
        let psi: Vec<Expr> = (0..=max_order)
            .map(|b| phi.partial_expr(0, b + 2))
            .collect();
        let zero = psi[0].is_zero();
        let mut x_derivs = Vec::with_capacity(max_order + 1);
        let mut d = x.clone();
        for k in 0..=max_order {
            if k > 0 {
                d = d.derivative();
            }
            x_derivs.push(d.coeffs().to_vec());
        }
        Ok(Self {
            d2phi: phi.partial_expr(0, 1),
            psi,
            x_derivs,
            quad,
            max_order,
            zero,
        })
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// Whether `∂₂²φ` folds to zero, so that `χ ≡ 0`.
    pub fn is_zero(&self) -> bool {
        self.zero
    }

    fn check_s(s: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::Domain { s });
        }
        Ok(())
    }

    /// `[x(s), x'(s), x''(s)/2!, ...]` of length `len`.
    fn x_series(&self, s: f64, len: usize) -> Vec<f64> {
        let t = 2.0 * s - 1.0;
        let mut factorial = 1.0;
        (0..len)
            .map(|k| {
                if k > 0 {
                    factorial *= k as f64;
                }
                clenshaw(&self.x_derivs[k], t) / factorial
            })
            .collect()
    }

    fn check_denominator(s: f64, a: f64) -> Result<()> {
        if a == 0.0 || !a.is_finite() {
            return Err(Error::SingularDerivative { s, value: a });
        }
        Ok(())
    }

    /// Series of `∂₂ᵇχ(s + δ, η)` in `δ`, of length `len`.
    fn eta_partial_series(
        &self,
        b: usize,
        s: f64,
        eta: f64,
        len: usize,
        xs: &[f64],
        inv_a: &[f64],
    ) -> Result<Vec<f64>> {
        let psi = &self.psi[b];
        if psi.is_zero() {
            return Ok(vec![0.0; len]);
        }
        let mut s_ser = vec![0.0; len];
        s_ser[0] = s;
        if len > 1 {
            s_ser[1] = 1.0;
        }
        let mut acc = vec![0.0; len];
        let mut arg = xs[..len].to_vec();
        for (t, w) in self.quad.pairs() {
            arg[0] = xs[0] + 2.0 * t * eta;
            let weight = w * libm::pow(2.0 * t, b as f64);
            for (a, p) in acc.iter_mut().zip(psi.taylor(&s_ser, &arg)?) {
                *a += weight * p;
            }
        }
        let mut out = taylor::mul(&inv_a[..len], &acc);
        out.iter_mut().for_each(|c| *c *= 4.0);
        Ok(out)
    }
}

impl JetSource for ChiKernel {
    fn value(&self, s: f64, eta: f64) -> Result<f64> {
        Self::check_s(s)?;
        if self.zero {
            return Ok(0.0);
        }
        let x = clenshaw(&self.x_derivs[0], 2.0 * s - 1.0);
        let a = self.d2phi.eval(s, x)?;
        Self::check_denominator(s, a)?;
        let integral: f64 = self
            .quad
            .pairs()
            .map(|(t, w)| Ok(w * self.psi[0].eval(s, x + 2.0 * t * eta)?))
            .sum::<Result<f64>>()?;
        Ok(4.0 * integral / a)
    }

    fn jet(&self, order: usize, s: f64, eta: f64) -> Result<Jet2> {
        Self::check_s(s)?;
        if order > self.max_order {
            return Err(Error::OrderOutOfRange {
                order,
                max: self.max_order,
            });
        }
        if self.zero {
            return Jet2::from_fn(order, |_, _| Ok(0.0));
        }
        let len = order + 1;
        let xs = self.x_series(s, len);
        let mut s_ser = vec![0.0; len];
        s_ser[0] = s;
        if len > 1 {
            s_ser[1] = 1.0;
        }
        let a_ser = self.d2phi.taylor(&s_ser, &xs)?;
        Self::check_denominator(s, a_ser[0])?;
        let mut one = vec![0.0; len];
        one[0] = 1.0;
        let inv_a = taylor::div(&one, &a_ser).ok_or(Error::SingularDerivative { s, value: 0.0 })?;
        let columns: Vec<Vec<f64>> = (0..=order)
            .map(|b| self.eta_partial_series(b, s, eta, order - b + 1, &xs, &inv_a))
            .collect::<Result<_>>()?;
        let mut factorials = vec![1.0; len];
        for k in 1..len {
            factorials[k] = factorials[k - 1] * k as f64;
        }
        Jet2::from_fn(order, |i1, i2| Ok(factorials[i1] * columns[i2][i1]))
    }
}

/// Kernel with jets up to order `N + 1`, where `N` is the grid's maximal order.
pub fn chi_kernel(op: &CompOp, x: &SmoothFn, quad_nodes: usize) -> Result<ChiKernel> {
    ChiKernel::new(op, x, quad_nodes, x.config().max_order + 1)
}

/// Sup over the nodes of `|2ℓ((f'(x + 2u) − f'(x))v) − χ(·, u)·u·v|`, with
/// the left side computed through the operator's own projections.
pub fn chi_identity_residual(
    op: &CompOp,
    chi: &ChiKernel,
    x: &SmoothFn,
    u: &SmoothFn,
    v: &SmoothFn,
) -> Result<f64> {
    let shifted = SmoothFn::lincomb(1.0, x, 2.0, u)?;
    let diff = &op.deriv_apply(&shifted, v)? - &op.deriv_apply(x, v)?;
    let lhs = op.ell_apply(x, &diff)?.scaled(2.0).node_values();
    let nodes = op.grid().nodes();
    let uv = u.node_values();
    let vv = v.node_values();
    let mut worst = 0.0_f64;
    for j in 0..nodes.len() {
        let rhs = chi.value(nodes[j], uv[j])? * uv[j] * vv[j];
        worst = worst.max((lhs[j] - rhs).abs());
    }
    Ok(worst)
}
