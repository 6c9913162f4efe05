//! Graded sup-norm disks `B_m = {x : sup |x^(i)| ≤ m_i for i ≤ N}` and their
//! gauge (Minkowski) norms `‖x‖_m = max_i sup |x^(i)| / m_i`.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::funrep::SmoothFn;

/// Slack absorbing node-sampling error in [`disk_contains`].
pub const CONTAINMENT_SLACK: f64 = 1e-9;

/// Positive, finite, nondecreasing sequence `m_0 ≤ m_1 ≤ ... ≤ m_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grading(Vec<f64>);

impl Grading {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidGrading("empty sequence".into()));
        }
        if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidGrading(format!(
                "entry {i} = {} is not a positive finite number",
                values[i]
            )));
        }
        if let Some(i) = values.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::InvalidGrading(format!(
                "sequence decreases at index {}: {} > {}",
                i + 1,
                values[i],
                values[i + 1]
            )));
        }
        Ok(Self(values))
    }

    pub fn constant(max_order: usize, value: f64) -> Result<Self> {
        Self::new(alloc::vec![value; max_order + 1])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn max_order(&self) -> usize {
        self.0.len() - 1
    }

    pub fn scaled(&self, t: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|v| t * v).collect())
    }

    /// Finite gauge of `x`; errors when the orders of `x`'s grid and `self` differ.
    pub fn gauge(&self, x: &SmoothFn) -> Result<f64> {
        if x.config().max_order != self.max_order() {
            return Err(Error::InvalidGrading(format!(
                "grading has {} entries but the grid tracks orders 0..={}",
                self.0.len(),
                x.config().max_order
            )));
        }
        Ok(x.sup_abs_orders()
            .iter()
            .zip(&self.0)
            .fold(0.0_f64, |acc, (sup, m)| acc.max(sup / m)))
    }
}

impl core::ops::Index<usize> for Grading {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Gauge value; `Infinite` is the value outside the linear span of the
/// disk, which truncation at order `N` never produces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GaugeValue {
    Finite(f64),
    Infinite,
}

impl GaugeValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            Self::Finite(v) => Some(v),
            Self::Infinite => None,
        }
    }
}

impl fmt::Display for GaugeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(v) => write!(f, "{v}"),
            Self::Infinite => f.write_str("inf"),
        }
    }
}

pub fn gauge_norm(x: &SmoothFn, m: &Grading) -> Result<GaugeValue> {
    m.gauge(x).map(GaugeValue::Finite)
}

pub fn disk_contains(x: &SmoothFn, m: &Grading) -> Result<bool> {
    Ok(m.gauge(x)? <= 1.0 + CONTAINMENT_SLACK)
}

/// Writes `x = t·u` with `t = ‖x‖_m` and `‖u‖_m = 1`.
pub fn scale_to_disk(x: &SmoothFn, m: &Grading) -> Result<(f64, SmoothFn)> {
    let t = m.gauge(x)?;
    if t == 0.0 {
        return Err(Error::DegenerateInput(
            "cannot scale the zero function onto the unit sphere",
        ));
    }
    Ok((t, x.scaled(1.0 / t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funrep::{Grid, GridConfig};
    use alloc::sync::Arc;
    use alloc::vec;
    use approx::assert_relative_eq;

    fn grid() -> Arc<Grid> {
        Grid::new(GridConfig::with_degree(16, 4).unwrap()).unwrap()
    }

    #[test]
    fn rejects_bad_sequences() {
        assert!(Grading::new(vec![]).is_err());
        assert!(Grading::new(vec![1.0, 0.0]).is_err());
        assert!(Grading::new(vec![1.0, f64::INFINITY]).is_err());
        assert!(Grading::new(vec![2.0, 1.0]).is_err());
        assert!(Grading::new(vec![1.0, 1.0, 3.0]).is_ok());
    }

    #[test]
    fn gauge_examples() {
        let g = grid();
        let ones = Grading::constant(4, 1.0).unwrap();
        assert_eq!(
            gauge_norm(&SmoothFn::zero(&g), &ones).unwrap(),
            GaugeValue::Finite(0.0)
        );
        let id = SmoothFn::identity(&g);
        assert_relative_eq!(ones.gauge(&id).unwrap(), 1.0, epsilon = 1e-15);
        let powers = Grading::new(vec![2.0, 4.0, 8.0, 16.0, 32.0]).unwrap();
        assert_relative_eq!(powers.gauge(&id).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn gauge_rejects_order_mismatch() {
        let id = SmoothFn::identity(&grid());
        assert!(Grading::constant(3, 1.0).unwrap().gauge(&id).is_err());
    }

    #[test]
    fn containment_examples() {
        let g = grid();
        let m = Grading::new(vec![0.5, 1.0, 1.0, 2.0, 2.0]).unwrap();
        assert!(disk_contains(&SmoothFn::zero(&g), &m).unwrap());
        assert!(disk_contains(&SmoothFn::constant(&g, 0.5), &m).unwrap());
        assert!(!disk_contains(&SmoothFn::constant(&g, 1.0), &m).unwrap());
    }

    #[test]
    fn scale_to_disk_examples() {
        let g = grid();
        let ones = Grading::constant(4, 1.0).unwrap();
        let (t, u) = scale_to_disk(&SmoothFn::constant(&g, 2.0), &ones).unwrap();
        assert_eq!(t, 2.0);
        assert_eq!(u, SmoothFn::constant(&g, 1.0));
        let (t, u) = scale_to_disk(&SmoothFn::identity(&g), &ones).unwrap();
        assert_relative_eq!(t, 1.0, epsilon = 1e-15);
        assert_relative_eq!(ones.gauge(&u).unwrap(), 1.0, epsilon = 1e-15);
        assert!(scale_to_disk(&SmoothFn::zero(&g), &ones).is_err());
    }
}
