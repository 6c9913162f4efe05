//! Majorants `R_i`, `ρ`, `θ₀` built from box sups of the jets of `χ`.
//!
//! `R_i(s)` bounds `|P_{i+1}(ξ, η, ζ)|` when `ξ` ranges over the jets of `χ`
//! on `[0, 1] × [-1, 1]` and every `η`, `ζ` entry is at most `s` in absolute
//! value; it is the sum over monomials of `|c|·sup|ξ_(a,b)|·s^{1+|ζ|}`.

use alloc::sync::Arc;
use alloc::vec::Vec;

use super::jetpoly::{JetPolynomial, JetRecursion};
use crate::bivar::{Jet2, JetSource, DEFAULT_ETA_RANGE};
use crate::error::{Error, Result};

/// `Σ |c|·xi_sup(a, b)·s^{1+|ζ|}` over the monomials of `p`.
pub fn bound_r(p: &JetPolynomial, xi_sup: &Jet2, s: f64) -> f64 {
    p.terms()
        .map(|(mono, c)| {
            c.unsigned_abs() as f64 * xi_sup[mono.xi] * libm::pow(s, mono.jet_degree() as f64)
        })
        .sum()
}

/// Entrywise sup of `|∂₁ᵃ∂₂ᵇχ|` for `a + b ≤ order` over a
/// `samples × samples` grid on `[0, 1] × [eta_lo, eta_hi]`.
pub fn jet_box_sup(
    chi: &impl JetSource,
    order: usize,
    eta_lo: f64,
    eta_hi: f64,
    samples: usize,
) -> Result<Jet2> {
    if samples < 2 || !(eta_lo <= eta_hi) {
        return Err(Error::InvalidArgument(
            "jet_box_sup needs samples >= 2 and eta_lo <= eta_hi".into(),
        ));
    }
    let mut sup = alloc::vec![0.0_f64; Jet2::len_for(order)];
    for a in 0..samples {
        let s = a as f64 / (samples - 1) as f64;
        for b in 0..samples {
            let eta = eta_lo + (eta_hi - eta_lo) * b as f64 / (samples - 1) as f64;
            let jet = chi.jet(order, s, eta)?;
            for (slot, (_, _, v)) in sup.iter_mut().zip(jet.iter()) {
                *slot = slot.max(v.abs());
            }
        }
    }
    let mut values = sup.into_iter();
    Jet2::from_fn(order, |_, _| {
        Ok(values.next().expect("one value per index"))
    })
}

/// `B₀`, the `ξ` sups and the polynomials `P_1..P_{N+1}`.
#[derive(Debug, Clone)]
pub struct MajorantTable {
    b0: f64,
    xi_sup: Jet2,
    recursion: Arc<JetRecursion>,
    max_order: usize,
}

impl MajorantTable {
    /// Table for orders `0..=max_order`; needs jets of `χ` of order `max_order + 1`.
    pub fn build(
        chi: &impl JetSource,
        recursion: Arc<JetRecursion>,
        max_order: usize,
        samples: usize,
    ) -> Result<Self> {
        if recursion.max_order() < max_order + 1 {
            return Err(Error::InvalidArgument(alloc::format!(
                "majorants up to order {max_order} need P_1..P_{}",
                max_order + 1
            )));
        }
        let (lo, hi) = DEFAULT_ETA_RANGE;
        let xi_sup = jet_box_sup(chi, max_order + 1, lo, hi, samples)?;
        Ok(Self::from_parts(xi_sup, recursion, max_order))
    }

    /// Table from precomputed `ξ` sups; `B₀ = 1 + max(sup|χ|, sup|∂₂χ|)`.
    pub fn from_parts(xi_sup: Jet2, recursion: Arc<JetRecursion>, max_order: usize) -> Self {
        let b0 = 1.0 + xi_sup[(0, 0)].max(xi_sup[(0, 1)]);
        Self {
            b0,
            xi_sup,
            recursion,
            max_order,
        }
    }

    pub fn b0(&self) -> f64 {
        self.b0
    }

    pub fn xi_sup(&self) -> &Jet2 {
        &self.xi_sup
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn recursion(&self) -> &Arc<JetRecursion> {
        &self.recursion
    }

    fn check_order(&self, i: usize) -> Result<()> {
        if i > self.max_order {
            return Err(Error::OrderOutOfRange {
                order: i,
                max: self.max_order,
            });
        }
        Ok(())
    }

    /// `R_i(s)`, from `P_{i+1}`.
    pub fn bound_r(&self, i: usize, s: f64) -> Result<f64> {
        self.check_order(i)?;
        let p = self.recursion.poly(i + 1).expect("checked at construction");
        Ok(bound_r(p, &self.xi_sup, s))
    }

    /// `ρ(0, s) = max{s, R_0(s)}`, `ρ(i+1, s) = max{ρ(i, s), R_{i+1}(s)}`.
    pub fn rho(&self, i: usize, s: f64) -> Result<f64> {
        self.check_order(i)?;
        let mut acc = s;
        for k in 0..=i {
            acc = acc.max(self.bound_r(k, s)?);
        }
        Ok(acc)
    }

    /// `θ₀(r, s, i) = ρ(i, s) / (1 − B₀·r·(2 + r))`, defined while `B₀·r·(2 + r) < 1`.
    pub fn theta0(&self, r: f64, s: f64, i: usize) -> Result<f64> {
        let q = self.b0 * r * (2.0 + r);
        if !(q < 1.0) {
            return Err(Error::ThetaDomain { value: q });
        }
        Ok(self.rho(i, s)? / (1.0 - q))
    }
}

/// Values `[ρ(i, s) for s in grid]` for each `i`, for monotonicity checks.
pub fn rho_table(table: &MajorantTable, grid: &[f64]) -> Result<Vec<Vec<f64>>> {
    (0..=table.max_order())
        .map(|i| grid.iter().map(|&s| table.rho(i, s)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table_with(xi: impl Fn(usize, usize) -> f64, max_order: usize) -> MajorantTable {
        let recursion = Arc::new(JetRecursion::new(max_order + 1));
        let xi_sup = Jet2::from_fn(max_order + 1, |a, b| Ok(xi(a, b))).unwrap();
        MajorantTable::from_parts(xi_sup, recursion, max_order)
    }

    #[test]
    fn zero_kernel_gives_identity_majorant() {
        let t = table_with(|_, _| 0.0, 5);
        assert_eq!(t.b0(), 1.0);
        for i in 0..=5 {
            assert_eq!(t.bound_r(i, 3.0).unwrap(), 0.0);
            assert_eq!(t.rho(i, 0.7).unwrap(), 0.7);
            assert_eq!(t.rho(i, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn first_bound_for_linear_s_kernel() {
        // χ = s: only ∂₁χ = 1 is nonzero besides χ itself
        let t = table_with(
            |a, b| {
                if matches!((a, b), (0, 0) | (1, 0)) {
                    1.0
                } else {
                    0.0
                }
            },
            3,
        );
        for s in [0.0, 0.5, 2.0] {
            assert_eq!(t.bound_r(0, s).unwrap(), s * s);
        }
    }

    #[test]
    fn theta0_examples() {
        let t = table_with(|_, _| 0.0, 3);
        let value = t.theta0(0.2, 1.0, 0).unwrap();
        assert!((value - 25.0 / 14.0).abs() < 1e-15);
        assert_eq!(t.theta0(0.2, 0.0, 2).unwrap(), 0.0);
        assert!(matches!(
            t.theta0(0.5, 1.0, 0),
            Err(Error::ThetaDomain { .. })
        ));
    }

    #[test]
    fn rho_is_monotone() {
        let t = table_with(|a, b| 1.0 + (a + 2 * b) as f64, 4);
        let grid: Vec<f64> = (0..40).map(|k| k as f64 * 0.1).collect();
        let rows = rho_table(&t, &grid).unwrap();
        for i in 0..rows.len() {
            assert_eq!(rows[i][0], 0.0);
            for k in 1..grid.len() {
                assert!(rows[i][k] >= rows[i][k - 1]);
                assert!(rows[i][k] >= grid[k]);
                if i > 0 {
                    assert!(rows[i][k] >= rows[i - 1][k]);
                }
            }
        }
    }
}
