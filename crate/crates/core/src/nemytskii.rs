//! The composition operator `f(x)(s) = φ(s, x(s))`, its derivative
//! `f'(y)v = ∂₂φ(·, y)·v`, the frozen inverse derivative `ℓ = f'(y₀)⁻¹`,
//! the auxiliary map `f₁ = id − ℓ∘f`, and a sampled check of the inclusion
//! `(f'(y₁) − f'(y₀))[B_m] ⊆ ε·f'(y₀)[B_m]` for `y₁ ∈ y₀ + 2B_m`.
//!
//! The inclusion is tested in the transported form
//! `‖ℓ(f'(y₁) − f'(y₀))v‖_m ≤ ε‖v‖_m`, which is equivalent because `ℓ` is a
//! pointwise multiplier mapping `f'(y₀)[B_m]` onto `B_m`.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::bivar::{BivarFn, DEFAULT_BOX_SAMPLES, DEFAULT_ETA_RANGE, VANISH_TOL};
use crate::error::{Error, Result};
use crate::funrep::{Grid, SmoothFn};
use crate::grading::Grading;
use crate::sampling::{disk_element, stream, Purpose};

/// Absolute slack of the sampled inclusion test.
pub const COLO_SLACK: f64 = 1e-7;
/// Default number of disk samples for [`CompOp::colo_check`].
pub const DEFAULT_SAMPLES: usize = 64;
/// Default number of pairs for [`CompOp::contraction_ratio`].
pub const DEFAULT_PAIRS: usize = 64;

#[derive(Debug, Clone)]
pub struct CompOp {
    phi: BivarFn,
    d2phi: BivarFn,
    grid: Arc<Grid>,
    eta_range: (f64, f64),
}

/// Worst sample of an inclusion check.
#[derive(Debug, Clone)]
pub struct ColoWitness {
    pub index: u64,
    pub u: SmoothFn,
    pub v: SmoothFn,
    /// `‖ℓ(f'(y₀ + 2u) − f'(y₀))v‖_m / ‖v‖_m`; infinite when `y₀ + 2u` leaves the η-range.
    pub ratio: f64,
}

#[derive(Debug, Clone)]
pub struct ColoReport {
    pub passed: bool,
    pub epsilon: f64,
    pub max_ratio: f64,
    pub witness: Option<ColoWitness>,
}

impl CompOp {
    /// Operator on `grid` with the default η-range `[-1, 1]`.
    pub fn new(phi: BivarFn, grid: &Arc<Grid>) -> Result<Self> {
        let (lo, hi) = DEFAULT_ETA_RANGE;
        Self::with_eta_range(phi, grid, lo, hi, DEFAULT_BOX_SAMPLES)
    }

    /// Rejects `φ` unless `∂₂φ` stays away from zero on `[0, 1] × [lo, hi]`.
    pub fn with_eta_range(
        phi: BivarFn,
        grid: &Arc<Grid>,
        lo: f64,
        hi: f64,
        samples: usize,
    ) -> Result<Self> {
        phi.check_nonvanishing(lo, hi, samples)?;
        let d2phi = phi.partial(0, 1);
        Ok(Self {
            phi,
            d2phi,
            grid: grid.clone(),
            eta_range: (lo, hi),
        })
    }

    pub fn phi(&self) -> &BivarFn {
        &self.phi
    }

    pub fn d2phi(&self) -> &BivarFn {
        &self.d2phi
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn eta_range(&self) -> (f64, f64) {
        self.eta_range
    }

    /// Whether `∂₂²φ` simplifies to the constant zero, i.e. `φ` is affine in `η`.
    pub fn is_affine(&self) -> bool {
        self.phi.partial_expr(0, 2).is_zero()
    }

    fn check_grid(&self, x: &SmoothFn) -> Result<()> {
        if self.grid.config() != x.config() {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// Node values of `x`, checked against the η-range.
    pub(crate) fn range_values(&self, x: &SmoothFn) -> Result<Vec<f64>> {
        self.check_grid(x)?;
        let (lo, hi) = self.eta_range;
        let values = x.node_values();
        for (&s, &value) in self.grid.nodes().iter().zip(&values) {
            if !(lo..=hi).contains(&value) {
                return Err(Error::EtaRange { s, value, lo, hi });
            }
        }
        Ok(values)
    }

    fn sample_at_nodes(&self, g: &BivarFn, values: &[f64]) -> Result<Vec<f64>> {
        self.grid
            .nodes()
            .iter()
            .zip(values)
            .map(|(&s, &eta)| g.eval(s, eta))
            .collect()
    }

    /// Node values of `∂₂φ(s, y(s))`.
    pub fn multiplier(&self, y: &SmoothFn) -> Result<Vec<f64>> {
        let values = self.range_values(y)?;
        self.sample_at_nodes(&self.d2phi, &values)
    }

    pub fn apply(&self, x: &SmoothFn) -> Result<SmoothFn> {
        let values = self.range_values(x)?;
        SmoothFn::project(&self.grid, &self.sample_at_nodes(&self.phi, &values)?)
    }

    pub fn deriv_apply(&self, y: &SmoothFn, v: &SmoothFn) -> Result<SmoothFn> {
        self.check_grid(v)?;
        let d = self.multiplier(y)?;
        let samples: Vec<f64> = d.iter().zip(v.node_values()).map(|(a, b)| a * b).collect();
        SmoothFn::project(&self.grid, &samples)
    }

    pub fn ell_apply(&self, y0: &SmoothFn, w: &SmoothFn) -> Result<SmoothFn> {
        self.check_grid(w)?;
        let d = self.multiplier(y0)?;
        let mut samples = w.node_values();
        for ((&s, &dj), wj) in self.grid.nodes().iter().zip(&d).zip(samples.iter_mut()) {
            if dj.abs() < VANISH_TOL {
                return Err(Error::SingularDerivative { s, value: dj });
            }
            *wj /= dj;
        }
        SmoothFn::project(&self.grid, &samples)
    }

    /// `f₁(y) = y − ℓ(f(y))`, evaluated at the nodes and projected once.
    ///
    /// Agrees with `y − ell_apply(y₀, apply(y))` up to projection rounding,
    /// and is exactly zero when `φ(s, η) = c·η` with `c` a power of two.
    pub fn f1_apply(&self, y0: &SmoothFn, y: &SmoothFn) -> Result<SmoothFn> {
        let d = self.multiplier(y0)?;
        let values = self.range_values(y)?;
        let nodes = self.grid.nodes();
        let mut samples = Vec::with_capacity(values.len());
        for j in 0..values.len() {
            if d[j].abs() < VANISH_TOL {
                return Err(Error::SingularDerivative {
                    s: nodes[j],
                    value: d[j],
                });
            }
            samples.push(values[j] - self.phi.eval(nodes[j], values[j])? / d[j]);
        }
        SmoothFn::project(&self.grid, &samples)
    }

    /// Largest sampled `‖f₁y − f₁y'‖_m / ‖y − y'‖_m` over pairs in `y₀ + 2B_m`
    /// lying on the sphere of radius 2.
    pub fn contraction_ratio(
        &self,
        y0: &SmoothFn,
        m: &Grading,
        pairs: usize,
        seed: u64,
    ) -> Result<f64> {
        if pairs == 0 {
            return Err(Error::InvalidArgument(
                "contraction_ratio needs at least one pair".into(),
            ));
        }
        let mut worst: Option<f64> = None;
        for k in 0..pairs as u64 {
            let a = disk_element(
                &self.grid,
                m,
                2.0,
                &mut stream(seed, Purpose::ContractionLeft, k),
            )?;
            let b = disk_element(
                &self.grid,
                m,
                2.0,
                &mut stream(seed, Purpose::ContractionRight, k),
            )?;
            let denom = m.gauge(&(&a - &b))?;
            if denom == 0.0 {
                continue;
            }
            let ya = y0 + &a;
            let yb = y0 + &b;
            let num = m.gauge(&(&self.f1_apply(y0, &ya)? - &self.f1_apply(y0, &yb)?))?;
            let ratio = num / denom;
            worst = Some(worst.map_or(ratio, |w: f64| w.max(ratio)));
        }
        worst.ok_or(Error::Sampling("every sampled pair was degenerate"))
    }

    /// `ℓ(f'(y₀ + 2u) − f'(y₀))v` computed pointwise and projected once.
    pub fn transported_difference(
        &self,
        y0: &SmoothFn,
        u: &SmoothFn,
        v: &SmoothFn,
    ) -> Result<SmoothFn> {
        self.check_grid(v)?;
        let y1 = SmoothFn::lincomb(1.0, y0, 2.0, u)?;
        let d0 = self.multiplier(y0)?;
        let d1 = self.multiplier(&y1)?;
        let nodes = self.grid.nodes();
        let mut samples = v.node_values();
        for j in 0..samples.len() {
            if d0[j].abs() < VANISH_TOL {
                return Err(Error::SingularDerivative {
                    s: nodes[j],
                    value: d0[j],
                });
            }
            samples[j] *= (d1[j] - d0[j]) / d0[j];
        }
        SmoothFn::project(&self.grid, &samples)
    }

    /// Sampled inclusion check with `u, v` on the unit sphere of `B_m`.
    ///
    /// A displacement `y₀ + 2u` outside the η-range counts as a violation
    /// with infinite ratio.
    pub fn colo_check(
        &self,
        y0: &SmoothFn,
        epsilon: f64,
        m: &Grading,
        samples: usize,
        seed: u64,
    ) -> Result<ColoReport> {
        if !(epsilon > 0.0) {
            return Err(Error::InvalidArgument(
                "colo_check needs epsilon > 0".into(),
            ));
        }
        self.range_values(y0)?;
        let mut report = ColoReport {
            passed: true,
            epsilon,
            max_ratio: 0.0,
            witness: None,
        };
        for k in 0..samples as u64 {
            let u = disk_element(
                &self.grid,
                m,
                1.0,
                &mut stream(seed, Purpose::ColoDisplacement, k),
            )?;
            let v = disk_element(
                &self.grid,
                m,
                1.0,
                &mut stream(seed, Purpose::ColoDirection, k),
            )?;
            let ratio = match self.transported_difference(y0, &u, &v) {
                Ok(w) => m.gauge(&w)? / m.gauge(&v)?,
                Err(Error::EtaRange { .. }) => f64::INFINITY,
                Err(e) => return Err(e),
            };
            if ratio > epsilon + COLO_SLACK {
                report.passed = false;
            }
            if report.witness.is_none() || ratio > report.max_ratio {
                report.max_ratio = ratio;
                report.witness = Some(ColoWitness {
                    index: k,
                    u,
                    v,
                    ratio,
                });
            }
        }
        Ok(report)
    }
}
