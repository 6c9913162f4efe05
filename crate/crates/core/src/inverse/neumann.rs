//! Perturbation bounds for a linear map `ℓ` close to the identity: if
//! `ν(ℓx − x) ≤ ε·ν(x)` with `ε < 1`, then `ℓ⁻¹ = Σ_k (id − ℓ)^k` and
//!
//! ```text
//! ν(ℓ⁻¹x) ≤ ν(x) / (1 − ε),        ν(ℓ⁻¹x − x) ≤ ε·ν(x) / (1 − ε).
//! ```

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::sampling::{stream, uniform, Purpose};

/// Relative size of the last Neumann term kept.
pub const SERIES_TOL: f64 = 1e-14;
/// Cap on the number of series terms.
pub const MAX_TERMS: usize = 10_000;
/// Relative tolerance on the two conclusions.
pub const BOUND_TOL: f64 = 1e-10;
/// Relative slack on the premise.
pub const PREMISE_SLACK: f64 = 1e-12;

/// `ℓ⁻¹x` by the Neumann series, stopped once a term has norm below
/// `SERIES_TOL·ν(x)`; also returns the number of terms added.
pub fn neumann_inverse(
    apply: impl Fn(&[f64]) -> Vec<f64>,
    norm: impl Fn(&[f64]) -> f64,
    x: &[f64],
) -> Result<(Vec<f64>, usize)> {
    let scale = norm(x);
    if scale == 0.0 {
        return Ok((vec![0.0; x.len()], 0));
    }
    let mut term = x.to_vec();
    let mut sum = x.to_vec();
    for k in 0..MAX_TERMS {
        if norm(&term) < SERIES_TOL * scale {
            return Ok((sum, k));
        }
        let image = apply(&term);
        for ((t, l), s) in term.iter_mut().zip(&image).zip(sum.iter_mut()) {
            *t -= l;
            *s += *t;
        }
    }
    Err(Error::NonConvergence {
        iterations: MAX_TERMS,
    })
}

/// Result of checking the perturbation bounds on a set of probes.
#[derive(Debug, Clone, PartialEq)]
pub struct NeumannVerdict {
    pub holds: bool,
    pub epsilon: f64,
    pub probes: usize,
    /// Largest `ν(ℓx − x)/ν(x)`.
    pub premise_ratio: f64,
    /// Largest `ν(ℓ⁻¹x)/ν(x)`; bounded by `1/(1 − ε)`.
    pub inverse_ratio: f64,
    /// Largest `ν(ℓ⁻¹x − x)/ν(x)`; bounded by `ε/(1 − ε)`.
    pub deviation_ratio: f64,
    /// Largest `ν(ℓx)/ν(x)`; bounded by `1 + ε`.
    pub forward_ratio: f64,
    pub max_terms: usize,
    /// First probe violating a conclusion.
    pub witness: Option<usize>,
}

/// Checks the premise and both conclusions on explicit probes.
///
/// A probe violating the premise is an error naming the probe; zero
/// probes are skipped.
pub fn neumann_bound_on(
    apply: impl Fn(&[f64]) -> Vec<f64>,
    norm: impl Fn(&[f64]) -> f64,
    epsilon: f64,
    probes: &[Vec<f64>],
) -> Result<NeumannVerdict> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::InvalidArgument("epsilon must lie in [0, 1)".into()));
    }
    let inverse_bound = 1.0 / (1.0 - epsilon);
    let deviation_bound = epsilon / (1.0 - epsilon);
    let mut verdict = NeumannVerdict {
        holds: true,
        epsilon,
        probes: 0,
        premise_ratio: 0.0,
        inverse_ratio: 0.0,
        deviation_ratio: 0.0,
        forward_ratio: 0.0,
        max_terms: 0,
        witness: None,
    };
    for (index, x) in probes.iter().enumerate() {
        let nx = norm(x);
        if nx == 0.0 {
            continue;
        }
        let lx = apply(x);
        let diff: Vec<f64> = lx.iter().zip(x).map(|(a, b)| a - b).collect();
        let premise = norm(&diff) / nx;
        if premise > epsilon * (1.0 + PREMISE_SLACK) + f64::EPSILON * 4.0 {
            return Err(Error::PremiseViolated {
                ratio: premise,
                epsilon,
                probe: index,
            });
        }
        let (inv, terms) = neumann_inverse(&apply, &norm, x)?;
        let dev: Vec<f64> = inv.iter().zip(x).map(|(a, b)| a - b).collect();
        let inverse_ratio = norm(&inv) / nx;
        let deviation_ratio = norm(&dev) / nx;
        let forward_ratio = norm(&lx) / nx;
        let ok = inverse_ratio <= inverse_bound * (1.0 + BOUND_TOL)
            && deviation_ratio <= deviation_bound * (1.0 + BOUND_TOL) + BOUND_TOL * f64::EPSILON
            && forward_ratio <= (1.0 + epsilon) * (1.0 + BOUND_TOL);
        if !ok && verdict.witness.is_none() {
            verdict.witness = Some(index);
            verdict.holds = false;
        }
        verdict.probes += 1;
        verdict.premise_ratio = verdict.premise_ratio.max(premise);
        verdict.inverse_ratio = verdict.inverse_ratio.max(inverse_ratio);
        verdict.deviation_ratio = verdict.deviation_ratio.max(deviation_ratio);
        verdict.forward_ratio = verdict.forward_ratio.max(forward_ratio);
        verdict.max_terms = verdict.max_terms.max(terms);
    }
    Ok(verdict)
}

/// [`neumann_bound_on`] with `probes` seeded vectors uniform in `[-1, 1]^dim`.
pub fn neumann_bound(
    dim: usize,
    apply: impl Fn(&[f64]) -> Vec<f64>,
    norm: impl Fn(&[f64]) -> f64,
    epsilon: f64,
    probes: usize,
    seed: u64,
) -> Result<NeumannVerdict> {
    let vectors: Vec<Vec<f64>> = (0..probes as u64)
        .map(|k| {
            let mut rng = stream(seed, Purpose::Probe, k);
            (0..dim).map(|_| uniform(&mut rng, -1.0, 1.0)).collect()
        })
        .collect();
    neumann_bound_on(apply, norm, epsilon, &vectors)
}

/// Max norm `max_i |x_i|`.
pub fn max_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}
