//! Chebyshev model of `C^∞([0, 1])`.
//!
//! A [`SmoothFn`] is a polynomial of degree at most `D` stored by its
//! coefficients in the Chebyshev basis `T_k(2s - 1)`. Differentiation is an
//! exact coefficient recurrence; sup norms are taken over `M`
//! Chebyshev–Lobatto nodes and are therefore lower estimates of the true
//! sup (exact at the endpoints, where Chebyshev derivatives peak).

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};

/// Truncation parameters shared by every function on a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    /// Spectral degree `D`; functions carry `D + 1` coefficients.
    pub degree: usize,
    /// Number of sampling nodes `M`.
    pub nodes: usize,
    /// Highest derivative order `N` entering sup norms and gradings.
    pub max_order: usize,
    /// Trailing-coefficient magnitude above which a projection is flagged as aliased.
    pub aliasing_tol: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            degree: 64,
            nodes: 257,
            max_order: 8,
            aliasing_tol: 1e-8,
        }
    }
}

impl GridConfig {
    pub fn new(degree: usize, nodes: usize, max_order: usize) -> Result<Self> {
        let config = Self {
            degree,
            nodes,
            max_order,
            ..Self::default()
        };
        config.validate()?;
        Ok(config)
    }

    /// Degree `D` with the default node count `4D + 1`.
    pub fn with_degree(degree: usize, max_order: usize) -> Result<Self> {
        Self::new(degree, 4 * degree + 1, max_order)
    }

    pub fn validate(&self) -> Result<()> {
        if self.degree < 1 {
            return Err(Error::InvalidConfig("degree D must be at least 1".into()));
        }
        if self.nodes < self.degree + 1 {
            return Err(Error::InvalidConfig(
                "node count M must be at least D + 1".into(),
            ));
        }
        if self.max_order < 1 {
            return Err(Error::InvalidConfig(
                "max order N must be at least 1".into(),
            ));
        }
        if !(self.aliasing_tol >= 0.0) {
            return Err(Error::InvalidConfig(
                "aliasing_tol must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

/// Sampling nodes and the cosine table shared by all functions of one configuration.
pub struct Grid {
    config: GridConfig,
    nodes: Vec<f64>,
    // cos(r π / (M - 1)) for r in 0..2(M - 1)
    cos_table: Vec<f64>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("config", &self.config)
            .finish()
    }
}

impl Grid {
    pub fn new(config: GridConfig) -> Result<Arc<Self>> {
        config.validate()?;
        let intervals = config.nodes - 1;
        let cos_table: Vec<f64> = (0..2 * intervals)
            .map(|r| libm::cos(r as f64 * PI / intervals as f64))
            .collect();
        let nodes = (0..config.nodes)
            .map(|j| {
                // sin form keeps the endpoints and the midpoint exact
                let arg = PI * (intervals as f64 - 2.0 * j as f64) / (2.0 * intervals as f64);
                (0.5 + 0.5 * libm::sin(arg)).clamp(0.0, 1.0)
            })
            .collect();
        Ok(Arc::new(Self {
            config,
            nodes,
            cos_table,
        }))
    }

    pub fn config(&self) -> &GridConfig {
        &self.config
    }

    pub fn degree(&self) -> usize {
        self.config.degree
    }

    pub fn max_order(&self) -> usize {
        self.config.max_order
    }

    /// Sampling nodes in `[0, 1]`, ordered from `s = 1` down to `s = 0`.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    fn cos_at(&self, k: usize, j: usize) -> f64 {
        self.cos_table[(k * j) % self.cos_table.len()]
    }

    fn same_as(&self, other: &Grid) -> bool {
        core::ptr::eq(self, other) || self.config == other.config
    }

    /// Values of the expansion `coeffs` at every node.
    pub fn values_at_nodes(&self, coeffs: &[f64]) -> Vec<f64> {
        (0..self.config.nodes)
            .map(|j| {
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c * self.cos_at(k, j))
                    .sum()
            })
            .collect()
    }

    /// Node maximum of `|Σ c_k T_k|`, refined by golden-section search on
    /// the brackets around nodes within 1% of it. Never exceeds the true sup.
    fn sup_of(&self, coeffs: &[f64], values: &[f64]) -> f64 {
        let node_max = max_abs(values);
        if node_max == 0.0 {
            return 0.0;
        }
        let mut sup = node_max;
        let last = values.len() - 1;
        for j in 0..=last {
            let a = values[j].abs();
            if a < 0.99 * node_max {
                continue;
            }
            let left = if j == 0 { 0.0 } else { values[j - 1].abs() };
            let right = if j == last { 0.0 } else { values[j + 1].abs() };
            if a < left || a < right {
                continue;
            }
            let hi = self.nodes[j.saturating_sub(1)];
            let lo = self.nodes[(j + 1).min(last)];
            sup = sup.max(golden_max(
                |s| clenshaw(coeffs, 2.0 * s - 1.0).abs(),
                lo,
                hi,
            ));
        }
        sup
    }

    /// Discrete Chebyshev transform of node values, truncated to degree `D`.
    fn transform(&self, samples: &[f64]) -> Vec<f64> {
        let m = self.config.nodes;
        let intervals = m - 1;
        let scale = 2.0 / intervals as f64;
        (0..=self.config.degree)
            .map(|k| {
                let mut acc = 0.0;
                for (j, f) in samples.iter().enumerate() {
                    let w = if j == 0 || j == intervals { 0.5 } else { 1.0 };
                    acc += w * f * self.cos_at(k, j);
                }
                let mut c = scale * acc;
                if k == 0 || k == intervals {
                    c *= 0.5;
                }
                c
            })
            .collect()
    }
}

/// Polynomial element of the truncated model, in the Chebyshev basis on `[0, 1]`.
#[derive(Clone)]
pub struct SmoothFn {
    coeffs: Vec<f64>,
    grid: Arc<Grid>,
    aliased: bool,
}

impl fmt::Debug for SmoothFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothFn")
            .field("degree", &self.grid.degree())
            .field("coeffs", &self.coeffs)
            .field("aliased", &self.aliased)
            .finish()
    }
}

impl PartialEq for SmoothFn {
    fn eq(&self, other: &Self) -> bool {
        self.grid.same_as(&other.grid) && self.coeffs == other.coeffs
    }
}

impl SmoothFn {
    /// Builds a function from Chebyshev coefficients; shorter inputs are zero-padded.
    pub fn from_coeffs(grid: &Arc<Grid>, mut coeffs: Vec<f64>) -> Result<Self> {
        let len = grid.degree() + 1;
        if coeffs.len() > len {
            return Err(Error::InvalidArgument(alloc::format!(
                "{} coefficients exceed degree {}",
                coeffs.len(),
                grid.degree()
            )));
        }
        if let Some(index) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFiniteSample { index });
        }
        coeffs.resize(len, 0.0);
        Ok(Self {
            coeffs,
            grid: grid.clone(),
            aliased: false,
        })
    }

    pub fn zero(grid: &Arc<Grid>) -> Self {
        Self {
            coeffs: vec![0.0; grid.degree() + 1],
            grid: grid.clone(),
            aliased: false,
        }
    }

    pub fn constant(grid: &Arc<Grid>, value: f64) -> Self {
        let mut f = Self::zero(grid);
        f.coeffs[0] = value;
        f
    }

    /// The function `s ↦ s`.
    pub fn identity(grid: &Arc<Grid>) -> Self {
        let mut f = Self::zero(grid);
        f.coeffs[0] = 0.5;
        f.coeffs[1] = 0.5;
        f
    }

    /// Degree-`D` projection of node samples.
    ///
    /// Polynomials of degree at most `D` are reproduced up to rounding. The
    /// result is flagged as aliased when the trailing tenth of its
    /// coefficients exceeds the configured `aliasing_tol`.
    pub fn project(grid: &Arc<Grid>, samples: &[f64]) -> Result<Self> {
        if samples.len() != grid.config.nodes {
            return Err(Error::InvalidArgument(alloc::format!(
                "expected {} samples, got {}",
                grid.config.nodes,
                samples.len()
            )));
        }
        if let Some(index) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample { index });
        }
        let coeffs = grid.transform(samples);
        let len = coeffs.len();
        let tail = len.div_ceil(10).max(1);
        let tail_max = coeffs[len - tail..]
            .iter()
            .fold(0.0_f64, |acc, c| acc.max(c.abs()));
        Ok(Self {
            aliased: tail_max > grid.config.aliasing_tol,
            coeffs,
            grid: grid.clone(),
        })
    }

    /// Projection of `f` sampled at the nodes.
    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let samples: Vec<f64> = grid.nodes().iter().map(|&s| f(s)).collect();
        Self::project(grid, &samples)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn config(&self) -> &GridConfig {
        &self.grid.config
    }

    pub fn degree(&self) -> usize {
        self.grid.degree()
    }

    /// Whether the projection that produced this function saw a heavy coefficient tail.
    pub fn aliased(&self) -> bool {
        self.aliased
    }

    pub fn same_grid(&self, other: &SmoothFn) -> bool {
        self.grid.same_as(&other.grid)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Clenshaw evaluation at `s ∈ [0, 1]`.
    pub fn eval(&self, s: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::Domain { s });
        }
        Ok(clenshaw(&self.coeffs, 2.0 * s - 1.0))
    }

    pub fn node_values(&self) -> Vec<f64> {
        self.grid.values_at_nodes(&self.coeffs)
    }

    /// Exact derivative; the result keeps `D + 1` coefficients with a zero tail.
    pub fn derivative(&self) -> SmoothFn {
        Self {
            coeffs: chebyshev_derivative(&self.coeffs),
            grid: self.grid.clone(),
            aliased: false,
        }
    }

    pub fn nth_derivative(&self, order: usize) -> SmoothFn {
        let mut f = self.clone();
        for _ in 0..order {
            f = f.derivative();
        }
        f
    }

    /// Estimate of `sup |f^(i)|`: the node maximum, refined between the
    /// neighbouring nodes of every nearly maximal node.
    pub fn sup_abs(&self, order: usize) -> Result<f64> {
        let max = self.grid.max_order();
        if order > max {
            return Err(Error::OrderOutOfRange { order, max });
        }
        let f = self.nth_derivative(order);
        Ok(self.grid.sup_of(&f.coeffs, &f.node_values()))
    }

    /// `[sup |f|, sup |f'|, ..., sup |f^(N)|]`, estimated as in [`SmoothFn::sup_abs`].
    pub fn sup_abs_orders(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.grid.max_order() + 1);
        let mut f = self.clone();
        for order in 0..=self.grid.max_order() {
            if order > 0 {
                f = f.derivative();
            }
            out.push(self.grid.sup_of(&f.coeffs, &f.node_values()));
        }
        out
    }

    /// `a·f + b·g` coefficientwise.
    pub fn lincomb(a: f64, f: &SmoothFn, b: f64, g: &SmoothFn) -> Result<SmoothFn> {
        if !f.same_grid(g) {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            coeffs: f
                .coeffs
                .iter()
                .zip(&g.coeffs)
                .map(|(x, y)| a * x + b * y)
                .collect(),
            grid: f.grid.clone(),
            aliased: false,
        })
    }

    pub fn scaled(&self, t: f64) -> SmoothFn {
        Self {
            coeffs: self.coeffs.iter().map(|c| t * c).collect(),
            grid: self.grid.clone(),
            aliased: self.aliased,
        }
    }
}

impl Add for &SmoothFn {
    type Output = SmoothFn;

    fn add(self, rhs: &SmoothFn) -> SmoothFn {
        SmoothFn::lincomb(1.0, self, 1.0, rhs).expect("adding functions on different grids")
    }
}

impl Sub for &SmoothFn {
    type Output = SmoothFn;

    fn sub(self, rhs: &SmoothFn) -> SmoothFn {
        SmoothFn::lincomb(1.0, self, -1.0, rhs).expect("subtracting functions on different grids")
    }
}

impl Neg for &SmoothFn {
    type Output = SmoothFn;

    fn neg(self) -> SmoothFn {
        self.scaled(-1.0)
    }
}

pub(crate) fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

fn golden_max(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_895;
    let mut best = g(lo).max(g(hi));
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..60 {
        if hi - lo <= 1e-14 {
            break;
        }
        if gc > gd {
            hi = d;
            d = c;
            gd = gc;
            c = hi - INV_PHI * (hi - lo);
            gc = g(c);
        } else {
            lo = c;
            c = d;
            gc = gd;
            d = lo + INV_PHI * (hi - lo);
            gd = g(d);
        }
        best = best.max(gc).max(gd);
    }
    best
}

/// Clenshaw recurrence for `Σ c_k T_k(t)`.
pub fn clenshaw(coeffs: &[f64], t: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = 2.0 * t * b1 - b2 + c;
        b2 = b1;
        b1 = b0;
    }
    match coeffs.first() {
        Some(&c0) => t * b1 - b2 + c0,
        None => 0.0,
    }
}

/// Coefficients of `d/ds` of a Chebyshev series in `t = 2s - 1`.
fn chebyshev_derivative(coeffs: &[f64]) -> Vec<f64> {
    let n = coeffs.len();
    let mut out = vec![0.0; n + 1];
    for k in (1..n).rev() {
        out[k - 1] = out[k + 1] + 2.0 * k as f64 * coeffs[k];
    }
    out[0] *= 0.5;
    out.truncate(n);
    // dt/ds = 2
    out.iter_mut().for_each(|c| *c *= 2.0);
    out
}
