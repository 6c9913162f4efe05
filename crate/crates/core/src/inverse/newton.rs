//! Simplified Newton iteration `y_{i+1} = y_i + ℓ(x − f(y_i))` with the
//! derivative frozen at `y₀`.

use alloc::vec::Vec;

use super::neumann::{neumann_bound, NeumannVerdict};
use crate::bivar::VANISH_TOL;
use crate::error::{Error, Result};
use crate::funrep::SmoothFn;
use crate::grading::{Grading, CONTAINMENT_SLACK};
use crate::nemytskii::CompOp;
use crate::sampling::{disk_element, stream, uniform, Purpose};

pub const RATIO_SLACK: f64 = 1e-6;
pub const DOMAIN_SLACK: f64 = 1e-6;
pub const LIP_SLACK: f64 = 1e-9;
pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAXITER: usize = 200;
pub const DEFAULT_PROBES: usize = 64;

/// Largest gauge radius of sampled targets, kept below 1 so that rounding
/// cannot push `v₀` out of the unit disk.
const TARGET_RADIUS: f64 = 0.999;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// The increment fell below `tol`, or every node residual is at the
    /// rounding level of evaluating `φ`.
    Tolerance,
    /// The node residual stopped decreasing.
    NoiseFloor,
    MaxIter,
    /// An iterate left `y₀ + 2B_m` or the η-range of `φ`.
    DomainEscape,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Certificate {
    pub cauchy_ok: bool,
    pub domain_ok: bool,
    pub lipschitz_ok: bool,
    pub converged: bool,
}

impl Certificate {
    pub fn all(&self) -> bool {
        self.cauchy_ok && self.domain_ok && self.lipschitz_ok && self.converged
    }
}

#[derive(Debug, Clone)]
pub struct InversionResult {
    pub y: SmoothFn,
    /// `y₀, y₁, ...`; one longer than `increments`.
    pub iterates: Vec<SmoothFn>,
    /// `‖y_{i+1} − y_i‖_m`.
    pub increments: Vec<f64>,
    /// `increments[i] / increments[i-1]`, `None` for the first step and
    /// whenever `increments[i]` is below the noise floor.
    pub ratios: Vec<Option<f64>>,
    /// `max_j |f(y_{i+1})(s_j) − x(s_j)|` for each recorded iterate.
    pub residuals: Vec<f64>,
    pub residual_sup: f64,
    /// `‖v₀‖_m = ‖ℓ(x − f(y₀))‖_m`.
    pub v0_gauge: f64,
    /// `ε/(1 − ε)` times the last increment.
    pub error_bound: f64,
    /// Largest gauge that rounding alone can produce in an increment.
    pub noise_floor: f64,
    pub stop: StopReason,
    pub certificate: Certificate,
}

impl InversionResult {
    pub fn certified(&self) -> bool {
        self.certificate.all()
    }

    pub fn steps(&self) -> usize {
        self.increments.len()
    }
}

/// `2^i Σ_{k≤D} T_k^{(i)}(1)` for `i = 0..=N`: the largest `i`-th derivative
/// on `[0, 1]` of a Chebyshev series with unit coefficients.
pub fn derivative_amplification(degree: usize, max_order: usize) -> Vec<f64> {
    (0..=max_order)
        .map(|i| {
            let sum: f64 = (0..=degree)
                .map(|k| {
                    let k2 = (k * k) as f64;
                    (0..i)
                        .map(|j| (k2 - (j * j) as f64) / (2 * j + 1) as f64)
                        .product::<f64>()
                })
                .sum();
            libm::ldexp(sum, i as i32)
        })
        .collect()
}

/// Steps without a new smallest residual before the run counts as stagnated.
const STAGNATION_STEPS: usize = 3;

/// Frozen inverse derivative and the data shared by every step.
struct Stepper<'a> {
    op: &'a CompOp,
    target: Vec<f64>,
    target_sum: f64,
    d0: Vec<f64>,
    amplification: Vec<f64>,
}

struct Residual {
    values: Vec<f64>,
    /// Largest `(|x| + |f(y)| + |y|) / |∂₂φ(·, y₀)|` over the nodes.
    scale: f64,
    /// Every `|x − f(y)|` is within `4·ε_mach` of the sizes entering it.
    at_rounding: bool,
}

impl Stepper<'_> {
    /// Residual `x − f(y)` at the nodes.
    fn residual(&self, y: &SmoothFn) -> Result<Residual> {
        let values = self.op.range_values(y)?;
        let nodes = self.op.grid().nodes();
        // node values come from Chebyshev sums, each off by about ε·Σ|c_k|
        let y_sum: f64 = y.coeffs().iter().map(|c| c.abs()).sum();
        let mut r = Residual {
            values: Vec::with_capacity(values.len()),
            scale: 0.0,
            at_rounding: true,
        };
        for j in 0..values.len() {
            let fy = self.op.phi().eval(nodes[j], values[j])?;
            let rj = self.target[j] - fy;
            let size = self.target[j].abs() + fy.abs() + self.target_sum + self.d0[j].abs() * y_sum;
            r.values.push(rj);
            r.scale = r.scale.max((size + values[j].abs()) / self.d0[j].abs());
            r.at_rounding &= rj.abs() <= 4.0 * f64::EPSILON * size;
        }
        Ok(r)
    }

    fn increment(&self, r: &[f64]) -> Result<SmoothFn> {
        let samples: Vec<f64> = r.iter().zip(&self.d0).map(|(a, d)| a / d).collect();
        SmoothFn::project(self.op.grid(), &samples)
    }

    /// Gauge bound on a projection of node values each off by `4·ε_mach·scale`.
    fn noise_floor(&self, m: &Grading, scale: f64) -> f64 {
        let per_coeff = 8.0 * f64::EPSILON * scale;
        self.amplification
            .iter()
            .zip(m.values())
            .fold(0.0_f64, |acc, (a, mi)| acc.max(per_coeff * a / mi))
    }
}

/// Runs the simplified Newton iteration from `y₀` towards `f⁻¹(x)`.
///
/// The run ends when the node residual reaches rounding level, stagnates, or
/// an increment drops below `tol`. Increments below the rounding floor of
/// the gauge carry no ratio, since their size is not resolved.
pub fn newton_invert(
    op: &CompOp,
    y0: &SmoothFn,
    x: &SmoothFn,
    m: &Grading,
    epsilon: f64,
    tol: f64,
    maxiter: usize,
) -> Result<InversionResult> {
    if !(epsilon > 0.0 && epsilon <= 0.5) {
        return Err(Error::InvalidArgument(
            "epsilon must lie in (0, 1/2]".into(),
        ));
    }
    if !(tol >= 0.0) || maxiter == 0 {
        return Err(Error::InvalidArgument(
            "tol must be nonnegative and maxiter positive".into(),
        ));
    }
    if !x.same_grid(y0) || y0.config() != op.grid().config() {
        return Err(Error::GridMismatch);
    }
    let d0 = op.multiplier(y0)?;
    let nodes = op.grid().nodes();
    for (&s, &d) in nodes.iter().zip(&d0) {
        if d.abs() < VANISH_TOL {
            return Err(Error::SingularDerivative { s, value: d });
        }
    }
    let config = op.grid().config();
    let stepper = Stepper {
        op,
        target: x.node_values(),
        target_sum: x.coeffs().iter().map(|c| c.abs()).sum(),
        d0,
        amplification: derivative_amplification(config.degree, config.max_order),
    };

    let mut r = stepper.residual(y0)?;
    let mut result = InversionResult {
        y: y0.clone(),
        iterates: alloc::vec![y0.clone()],
        increments: Vec::new(),
        ratios: Vec::new(),
        residuals: Vec::new(),
        residual_sup: crate::funrep::max_abs(&r.values),
        v0_gauge: 0.0,
        error_bound: 0.0,
        noise_floor: 0.0,
        stop: StopReason::MaxIter,
        certificate: Certificate {
            cauchy_ok: true,
            domain_ok: true,
            lipschitz_ok: true,
            converged: false,
        },
    };

    let mut best = result.residual_sup;
    let mut since_best = 0;
    for k in 0..maxiter {
        if r.at_rounding {
            result.stop = StopReason::Tolerance;
            break;
        }
        if since_best >= STAGNATION_STEPS {
            result.stop = StopReason::NoiseFloor;
            break;
        }
        let delta = stepper.increment(&r.values)?;
        let inc = m.gauge(&delta)?;
        let floor = stepper.noise_floor(m, r.scale);
        result.noise_floor = result.noise_floor.max(floor);
        if k == 0 {
            if inc > 1.0 + CONTAINMENT_SLACK {
                return Err(Error::InadmissibleTarget { gauge: inc });
            }
            result.v0_gauge = inc;
        }
        let y_next = &result.y + &delta;
        let r_next = match stepper.residual(&y_next) {
            Ok(v) => v,
            Err(Error::EtaRange { .. }) => {
                result.certificate.domain_ok = false;
                result.stop = StopReason::DomainEscape;
                break;
            }
            Err(e) => return Err(e),
        };
        let ratio = match result.increments.last() {
            Some(&prev) if inc >= floor && prev > 0.0 => Some(inc / prev),
            _ => None,
        };
        if ratio.is_some_and(|q| q > epsilon + RATIO_SLACK) {
            result.certificate.cauchy_ok = false;
        }
        let residual = crate::funrep::max_abs(&r_next.values);
        if residual < best {
            best = residual;
            since_best = 0;
        } else {
            since_best += 1;
        }
        let drift = m.gauge(&(&y_next - y0))?;
        result.increments.push(inc);
        result.ratios.push(ratio);
        result.residuals.push(residual);
        result.residual_sup = residual;
        result.iterates.push(y_next.clone());
        result.y = y_next;
        r = r_next;
        if drift > 2.0 + DOMAIN_SLACK {
            result.certificate.domain_ok = false;
            result.stop = StopReason::DomainEscape;
            break;
        }
        if inc < tol {
            result.stop = StopReason::Tolerance;
            break;
        }
    }

    result.certificate.converged =
        matches!(result.stop, StopReason::Tolerance | StopReason::NoiseFloor);
    let last = result.increments.last().copied().unwrap_or(0.0);
    result.error_bound = epsilon / (1.0 - epsilon) * last;
    let drift = m.gauge(&(&result.y - y0))?;
    result.certificate.lipschitz_ok = drift <= result.v0_gauge / (1.0 - epsilon) + LIP_SLACK;
    Ok(result)
}

/// `f(y₀) + f'(y₀)v`, evaluated at the nodes and projected once; the
/// admissible targets are those with `‖v‖_m ≤ 1`.
pub fn admissible_target(op: &CompOp, y0: &SmoothFn, v: &SmoothFn) -> Result<SmoothFn> {
    let values = op.range_values(y0)?;
    let d0 = op.multiplier(y0)?;
    let nodes = op.grid().nodes();
    let samples = nodes
        .iter()
        .zip(&values)
        .zip(d0.iter().zip(v.node_values()))
        .map(|((&s, &y), (d, w))| Ok(op.phi().eval(s, y)? + d * w))
        .collect::<Result<Vec<f64>>>()?;
    SmoothFn::project(op.grid(), &samples)
}

/// Seeded admissible target `index` of stream `purpose`, with `‖v‖_m`
/// uniform in `[0.05, 0.999)`.
pub fn sample_target(
    op: &CompOp,
    y0: &SmoothFn,
    m: &Grading,
    seed: u64,
    purpose: Purpose,
    index: u64,
) -> Result<SmoothFn> {
    let mut rng = stream(seed, purpose, index);
    let radius = uniform(&mut rng, 0.05, TARGET_RADIUS);
    let v = disk_element(op.grid(), m, radius, &mut rng)?;
    admissible_target(op, y0, &v)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzVerdict {
    pub passed: bool,
    pub pairs: usize,
    /// Largest `‖g x₁ − g x₂‖_m / ‖ℓ(x₁ − x₂)‖_m`.
    pub max_ratio: f64,
    /// Largest `‖g x₁ − g x₂‖_m − (1 − ε)⁻¹‖ℓ(x₁ − x₂)‖_m`.
    pub max_excess: f64,
    pub witness: Option<u64>,
}

/// `‖g x₁ − g x₂‖_m ≤ (1 − ε)⁻¹‖ℓ(x₁ − x₂)‖_m + LIP_SLACK` on seeded
/// admissible pairs.
pub fn inverse_lipschitz_check(
    op: &CompOp,
    y0: &SmoothFn,
    m: &Grading,
    epsilon: f64,
    pairs: usize,
    seed: u64,
) -> Result<LipschitzVerdict> {
    let mut verdict = LipschitzVerdict {
        passed: true,
        pairs,
        max_ratio: 0.0,
        max_excess: f64::NEG_INFINITY,
        witness: None,
    };
    let solve = |x: &SmoothFn, index: u64| -> Result<SmoothFn> {
        let fail = |reason: alloc::string::String| Error::SolveFailed { index, reason };
        let result = newton_invert(op, y0, x, m, epsilon, DEFAULT_TOL, DEFAULT_MAXITER)
            .map_err(|e| fail(alloc::format!("{e}")))?;
        if !result.certified() {
            return Err(fail(alloc::format!(
                "uncertified solve: {:?}",
                result.certificate
            )));
        }
        Ok(result.y)
    };
    for k in 0..pairs as u64 {
        let x1 = sample_target(op, y0, m, seed, Purpose::Target, k)?;
        let x2 = sample_target(op, y0, m, seed, Purpose::TargetPair, k)?;
        let lhs = m.gauge(&(&solve(&x1, k)? - &solve(&x2, k)?))?;
        let rhs = m.gauge(&op.ell_apply(y0, &(&x1 - &x2))?)?;
        let excess = lhs - rhs / (1.0 - epsilon);
        if rhs > 0.0 {
            verdict.max_ratio = verdict.max_ratio.max(lhs / rhs);
        }
        if excess > verdict.max_excess {
            verdict.max_excess = excess;
        }
        if excess > LIP_SLACK && verdict.passed {
            verdict.passed = false;
            verdict.witness = Some(k);
        }
    }
    Ok(verdict)
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvertibilityVerdict {
    pub neumann: NeumannVerdict,
    /// `(1 − ε)⁻¹`, bounding `‖(f'(y₀)⁻¹f'(y₁))⁻¹w‖_m / ‖w‖_m`.
    pub inverse_bound: f64,
    /// `1 + ε`, bounding `‖f'(y₀)⁻¹f'(y₁)w‖_m / ‖w‖_m`.
    pub forward_bound: f64,
}

impl InvertibilityVerdict {
    pub fn holds(&self) -> bool {
        self.neumann.holds
    }
}

/// Perturbation bounds for `w ↦ ℓ f'(y₁) w` in Chebyshev coefficient
/// coordinates with the gauge of `m`.
pub fn derivative_invertibility(
    op: &CompOp,
    y0: &SmoothFn,
    y1: &SmoothFn,
    m: &Grading,
    epsilon: f64,
    probes: usize,
    seed: u64,
) -> Result<InvertibilityVerdict> {
    let d0 = op.multiplier(y0)?;
    let d1 = op.multiplier(y1)?;
    let nodes = op.grid().nodes();
    for (&s, &d) in nodes.iter().zip(&d0) {
        if d.abs() < VANISH_TOL {
            return Err(Error::SingularDerivative { s, value: d });
        }
    }
    let factor: Vec<f64> = d1.iter().zip(&d0).map(|(a, b)| a / b).collect();
    let grid = op.grid().clone();
    let to_fn = |c: &[f64]| {
        SmoothFn::from_coeffs(&grid, c.to_vec()).expect("probe dimension matches the grid")
    };
    let apply = |c: &[f64]| -> Vec<f64> {
        let samples: Vec<f64> = to_fn(c)
            .node_values()
            .iter()
            .zip(&factor)
            .map(|(w, q)| w * q)
            .collect();
        SmoothFn::project(&grid, &samples)
            .expect("finite samples")
            .coeffs()
            .to_vec()
    };
    let norm = |c: &[f64]| m.gauge(&to_fn(c)).expect("grading matches the grid");
    let neumann = neumann_bound(grid.degree() + 1, apply, norm, epsilon, probes, seed)?;
    Ok(InvertibilityVerdict {
        neumann,
        inverse_bound: 1.0 / (1.0 - epsilon),
        forward_bound: 1.0 + epsilon,
    })
}
