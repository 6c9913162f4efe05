//! The generator family: the base sequence `n`, the sequences `x₀`, `x₁`,
//! the threshold `θ`, the family `𝓜` of admissible gradings, and sampled
//! checks that every disk `B_m`, `m ∈ 𝓜`, maps into itself under
//! `(u, v) ↦ χ(·, u)·u·v` and lies in `½V₀ = {z : l₀|z^(i)| ≤ 1, i ≤ l₀}`.
//!
//! Membership in `𝓜` means: the first `l₀ + 1` entries equal `n`, and
//! `θ(n₀, m_i, i) ≤ m_{i+1}` for `l₀ ≤ i < N`. Below `l₀` the prefix is
//! governed by `θ₀` through the construction of `n`.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::chi::ChiKernel;
use super::jetpoly::JetRecursion;
use super::majorant::MajorantTable;
use crate::bivar::{JetSource, DEFAULT_BOX_SAMPLES};
use crate::error::{Error, Result};
use crate::funrep::SmoothFn;
use crate::grading::{Grading, CONTAINMENT_SLACK};
use crate::nemytskii::CompOp;
use crate::sampling::{disk_element, stream, Purpose};

/// Cap on the number of halvings of `n₀` in [`build_n`].
pub const MAX_HALVINGS: usize = 64;

/// Base sequence `n_0..n_{l₀}` and the number of halvings used.
///
/// Starts at `n₀ = 1/(3B₀)`, sets `n_{i+1} = θ₀(n₀, n_i, i)` and halves `n₀`
/// until `l₀·n_{l₀} ≤ 1`.
pub fn build_n(l0: usize, table: &MajorantTable) -> Result<(Vec<f64>, usize)> {
    if l0 == 0 {
        return Err(Error::InvalidArgument("l0 must be at least 1".into()));
    }
    if l0 > table.max_order() {
        return Err(Error::InvalidArgument(format!(
            "l0 = {l0} exceeds the maximal order {}",
            table.max_order()
        )));
    }
    let mut n0 = 1.0 / (3.0 * table.b0());
    for halvings in 0..=MAX_HALVINGS {
        let mut n = vec![n0];
        for i in 0..l0 {
            n.push(table.theta0(n0, n[i], i)?);
        }
        if l0 as f64 * n[l0] <= 1.0 {
            return Ok((n, halvings));
        }
        n0 *= 0.5;
    }
    Err(Error::Construction(format!(
        "l0 * n_l0 <= 1 not reached after {MAX_HALVINGS} halvings of n0"
    )))
}

/// `x₀_i = max_{l ≤ i} sup(1 + |x^(l)|)` and `x₁_i = x₀_i / (n₀·x₀_{l₀})`, for `i ≤ N`.
pub fn x_sequences(x: &SmoothFn, n0: f64, l0: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(n0 > 0.0) {
        return Err(Error::InvalidArgument("n0 must be positive".into()));
    }
    let sups = x.sup_abs_orders();
    if l0 >= sups.len() {
        return Err(Error::InvalidArgument(format!(
            "l0 = {l0} exceeds the maximal order {}",
            sups.len() - 1
        )));
    }
    let mut x0 = Vec::with_capacity(sups.len());
    let mut acc = 0.0_f64;
    for sup in sups {
        acc = acc.max(1.0 + sup);
        x0.push(acc);
    }
    let x1 = x0.iter().map(|v| v / (n0 * x0[l0])).collect();
    Ok((x0, x1))
}

/// Outcome of [`GeneratorFamily::verify_star`].
#[derive(Debug, Clone)]
pub struct StarReport {
    pub passed: bool,
    /// `m_i ≤ 1/l₀` for `i ≤ l₀`.
    pub v0_ok: bool,
    /// Largest `‖χ(·, u)·u·v‖_m` over the samples.
    pub max_gauge: f64,
    pub witness: Option<(u64, SmoothFn, SmoothFn)>,
}

/// Outcome of [`GeneratorFamily::deriv_bound_check`].
#[derive(Debug, Clone, Copy)]
pub struct DerivBoundReport {
    /// Every sample satisfies the bound with `ρ(i, m_i)`.
    pub passed: bool,
    /// Every sample satisfies the weaker bound with `ρ(i, m_{i+1})`.
    pub passed_loose: bool,
    /// Largest `|w^(i+1)(s)| / bound` with `ρ(i, m_i)`.
    pub max_ratio: f64,
    pub max_ratio_loose: f64,
    pub checks: usize,
}

#[derive(Debug, Clone)]
pub struct GeneratorFamily {
    l0: usize,
    n: Vec<f64>,
    halvings: usize,
    x0: Vec<f64>,
    x1: Vec<f64>,
    table: MajorantTable,
    x: SmoothFn,
    chi: ChiKernel,
}

impl GeneratorFamily {
    /// Assembles `χ`, `P`, the majorants, `n` and `x₀`, `x₁` at base point `x`.
    /// The maximal order `N` is the grid's.
    pub fn build(op: &CompOp, x: &SmoothFn, l0: usize, quad_nodes: usize) -> Result<Self> {
        Self::build_with_samples(op, x, l0, quad_nodes, DEFAULT_BOX_SAMPLES)
    }

    /// As [`GeneratorFamily::build`], with `box_samples` per axis for the jet sups.
    pub fn build_with_samples(
        op: &CompOp,
        x: &SmoothFn,
        l0: usize,
        quad_nodes: usize,
        box_samples: usize,
    ) -> Result<Self> {
        if l0 == 0 {
            return Err(Error::InvalidArgument("l0 must be at least 1".into()));
        }
        let max_order = x.config().max_order;
        let chi = ChiKernel::new(op, x, quad_nodes, max_order + 1)?;
        let recursion = Arc::new(JetRecursion::new(max_order + 1));
        let table = MajorantTable::build(&chi, recursion, max_order, box_samples)?;
        Self::from_parts(table, chi, x, l0)
    }

    /// Family from a precomputed majorant table.
    pub fn from_parts(
        table: MajorantTable,
        chi: ChiKernel,
        x: &SmoothFn,
        l0: usize,
    ) -> Result<Self> {
        let (n, halvings) = build_n(l0, &table)?;
        let (x0, x1) = x_sequences(x, n[0], l0)?;
        Ok(Self {
            l0,
            n,
            halvings,
            x0,
            x1,
            table,
            x: x.clone(),
            chi,
        })
    }

    pub fn l0(&self) -> usize {
        self.l0
    }

    pub fn n(&self) -> &[f64] {
        &self.n
    }

    pub fn halvings(&self) -> usize {
        self.halvings
    }

    pub fn b0(&self) -> f64 {
        self.table.b0()
    }

    pub fn x0(&self) -> &[f64] {
        &self.x0
    }

    pub fn x1(&self) -> &[f64] {
        &self.x1
    }

    pub fn table(&self) -> &MajorantTable {
        &self.table
    }

    pub fn chi(&self) -> &ChiKernel {
        &self.chi
    }

    pub fn base_point(&self) -> &SmoothFn {
        &self.x
    }

    pub fn max_order(&self) -> usize {
        self.table.max_order()
    }

    pub fn theta0(&self, r: f64, s: f64, i: usize) -> Result<f64> {
        self.table.theta0(r, s, i)
    }

    /// `θ(r, s, i) = max{θ₀(r, s, i), x₁_{i+1}}`, for `i < N`.
    pub fn theta(&self, r: f64, s: f64, i: usize) -> Result<f64> {
        let clamp = *self.x1.get(i + 1).ok_or(Error::OrderOutOfRange {
            order: i + 1,
            max: self.max_order(),
        })?;
        Ok(self.theta0(r, s, i)?.max(clamp))
    }

    fn finish(&self, values: Vec<f64>) -> Result<Grading> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Construction(format!(
                "grading entry {i} overflows binary64; lower the maximal order N"
            )));
        }
        Grading::new(values)
    }

    /// `m_i = n_i` for `i ≤ l₀`, then `m_{i+1} = step(m_i, i)` for `l₀ ≤ i < N`.
    pub fn recursive_grading(
        &self,
        mut step: impl FnMut(f64, usize) -> Result<f64>,
    ) -> Result<Grading> {
        let mut m = self.n.clone();
        for i in self.l0..self.max_order() {
            let next = step(m[i], i)?;
            m.push(next);
        }
        self.finish(m)
    }

    /// The canonical member: `m_{i+1} = θ(n₀, m_i, i)` above `l₀`.
    pub fn canonical(&self) -> Result<Grading> {
        let n0 = self.n[0];
        self.recursive_grading(|mi, i| self.theta(n0, mi, i))
    }

    /// Checks membership in `𝓜`, reporting the first failing condition.
    pub fn check_membership(&self, m: &Grading) -> Result<()> {
        let m = m.values();
        if m.len() != self.max_order() + 1 {
            return Err(Error::NotMember(format!(
                "expected {} entries, got {}",
                self.max_order() + 1,
                m.len()
            )));
        }
        for (i, (&mi, &ni)) in m.iter().zip(&self.n).enumerate() {
            if mi != ni {
                return Err(Error::NotMember(format!(
                    "m_{i} = {mi} differs from n_{i} = {ni}"
                )));
            }
        }
        let n0 = self.n[0];
        for i in 0..self.max_order() {
            let bound = if i < self.l0 {
                self.theta0(n0, m[i], i)?
            } else {
                self.theta(n0, m[i], i)?
            };
            if bound > m[i + 1] {
                return Err(Error::NotMember(format!(
                    "theta(n_0, m_{i}, {i}) = {bound} exceeds m_{} = {}",
                    i + 1,
                    m[i + 1]
                )));
            }
        }
        Ok(())
    }

    pub fn is_member(&self, m: &Grading) -> bool {
        self.check_membership(m).is_ok()
    }

    /// A member dominating both arguments entrywise.
    pub fn merge(&self, m1: &Grading, m2: &Grading) -> Result<Grading> {
        self.check_membership(m1)?;
        self.check_membership(m2)?;
        let n0 = self.n[0];
        self.recursive_grading(|mi, i| Ok(m1[i + 1].max(m2[i + 1]).max(self.theta(n0, mi, i)?)))
    }

    /// `ε > 0` and a member `m` with `ε·b_i ≤ m_i` for every index of `b`.
    ///
    /// `b` needs at least `l₀ + 1` positive entries; entries beyond its
    /// length impose no constraint.
    pub fn absorb(&self, b: &[f64]) -> Result<(f64, Grading)> {
        if b.len() <= self.l0 || b.len() > self.max_order() + 1 {
            return Err(Error::InvalidArgument(format!(
                "absorb needs between {} and {} entries, got {}",
                self.l0 + 1,
                self.max_order() + 1,
                b.len()
            )));
        }
        if b.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidArgument(
                "absorb needs positive finite entries".into(),
            ));
        }
        let eps = (0..=self.l0)
            .map(|i| self.n[i] / b[i])
            .fold(f64::INFINITY, f64::min);
        let n0 = self.n[0];
        let m = self.recursive_grading(|mi, i| {
            let floor = b.get(i + 1).map_or(0.0, |bi| eps * bi);
            Ok(floor.max(self.theta(n0, mi, i)?))
        })?;
        Ok((eps, m))
    }

    /// Explicit `t` with `x ∈ t·B_m` for every member `m`: `x₀_{l₀} / n₀`.
    pub fn base_point_scale(&self) -> f64 {
        self.x0[self.l0] / self.n[0]
    }

    /// Sampled check of `χ(·, u)·u·v ∈ B_m` for `u, v ∈ B_m`, and of `B_m ⊆ ½V₀`.
    pub fn verify_star(&self, m: &Grading, samples: usize, seed: u64) -> Result<StarReport> {
        self.check_membership(m)?;
        let v0_ok = (0..=self.l0).all(|i| self.l0 as f64 * m[i] <= 1.0);
        let grid = self.x.grid();
        let nodes = grid.nodes();
        let mut report = StarReport {
            passed: v0_ok,
            v0_ok,
            max_gauge: 0.0,
            witness: None,
        };
        for k in 0..samples as u64 {
            let u = disk_element(grid, m, 1.0, &mut stream(seed, Purpose::StarU, k))?;
            let v = disk_element(grid, m, 1.0, &mut stream(seed, Purpose::StarV, k))?;
            let uv = u.node_values();
            let vv = v.node_values();
            let w: Vec<f64> = (0..nodes.len())
                .map(|j| Ok(self.chi.value(nodes[j], uv[j])? * uv[j] * vv[j]))
                .collect::<Result<_>>()?;
            let gauge = m.gauge(&SmoothFn::project(grid, &w)?)?;
            if gauge > 1.0 + CONTAINMENT_SLACK {
                report.passed = false;
            }
            if report.witness.is_none() || gauge > report.max_gauge {
                report.max_gauge = gauge;
                report.witness = Some((k, u, v));
            }
        }
        Ok(report)
    }

    /// Sampled check, at every node and order `1 ≤ i + 1 ≤ N`, of
    /// `|(χ(·, u)·u·v)^(i+1)| ≤ B₀(m₀ + 2)m₀·m_{i+1} + ρ(i, m_i)`, with the
    /// left side from the product-rule recursion.
    pub fn deriv_bound_check(
        &self,
        m: &Grading,
        samples: usize,
        seed: u64,
    ) -> Result<DerivBoundReport> {
        let n = self.max_order();
        if m.max_order() != n {
            return Err(Error::InvalidGrading(format!("expected {} entries", n + 1)));
        }
        let grid = self.x.grid();
        let nodes = grid.nodes();
        let recursion = self.table.recursion();
        let b0 = self.b0();
        let m0 = m[0];
        let mut report = DerivBoundReport {
            passed: true,
            passed_loose: true,
            max_ratio: 0.0,
            max_ratio_loose: 0.0,
            checks: 0,
        };
        let bounds: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let lead = b0 * (m0 + 2.0) * m0 * m[i + 1];
                Ok((
                    lead + self.table.rho(i, m[i])?,
                    lead + self.table.rho(i, m[i + 1])?,
                ))
            })
            .collect::<Result<_>>()?;
        for k in 0..samples as u64 {
            let u = disk_element(grid, m, 1.0, &mut stream(seed, Purpose::BoundU, k))?;
            let v = disk_element(grid, m, 1.0, &mut stream(seed, Purpose::BoundV, k))?;
            let ud = derivative_node_values(&u, n);
            let vd = derivative_node_values(&v, n);
            for j in 0..nodes.len() {
                let u_jet: Vec<f64> = ud.iter().map(|d| d[j]).collect();
                let v_jet: Vec<f64> = vd.iter().map(|d| d[j]).collect();
                let jet = self.chi.jet(n, nodes[j], u_jet[0])?;
                for i in 0..n {
                    let lhs = recursion.derivative(i + 1, &jet, &v_jet, &u_jet)?.abs();
                    let (tight, loose) = bounds[i];
                    report.checks += 1;
                    report.max_ratio = report.max_ratio.max(lhs / tight);
                    report.max_ratio_loose = report.max_ratio_loose.max(lhs / loose);
                    if lhs > tight {
                        report.passed = false;
                    }
                    if lhs > loose {
                        report.passed_loose = false;
                    }
                }
            }
        }
        Ok(report)
    }
}

/// `[f, f', ..., f^(order)]` at the nodes.
fn derivative_node_values(f: &SmoothFn, order: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(order + 1);
    let mut d = f.clone();
    for k in 0..=order {
        if k > 0 {
            d = d.derivative();
        }
        out.push(d.node_values());
    }
    out
}

/// `(χ₁(·, u)·u·v)^(i)(s)` by the product-rule recursion.
pub fn jet_derivative(
    chi: &impl JetSource,
    recursion: &JetRecursion,
    u: &SmoothFn,
    v: &SmoothFn,
    i: usize,
    s: f64,
) -> Result<f64> {
    let mut u_jet = Vec::with_capacity(i + 1);
    let mut v_jet = Vec::with_capacity(i + 1);
    let (mut du, mut dv) = (u.clone(), v.clone());
    for k in 0..=i {
        if k > 0 {
            du = du.derivative();
            dv = dv.derivative();
        }
        u_jet.push(du.eval(s)?);
        v_jet.push(dv.eval(s)?);
    }
    let jet = chi.jet(i, s, u_jet[0])?;
    recursion.derivative(i, &jet, &v_jet, &u_jet)
}
