//! Seeded sampling of disk elements.
//!
//! Every random draw comes from a ChaCha stream keyed by `(seed, purpose)`
//! and selected by the sample index, so sample `k` is reproducible without
//! generating samples `0..k` first.

use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::funrep::{Grid, SmoothFn};
use crate::grading::{scale_to_disk, Grading};

/// Highest Chebyshev degree of sampled disk elements.
pub const SAMPLE_DEGREE: usize = 16;

/// Independent random streams drawn from one seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    ColoDirection = 1,
    ColoDisplacement = 2,
    ContractionLeft = 3,
    ContractionRight = 4,
    StarU = 5,
    StarV = 6,
    Target = 7,
    TargetPair = 8,
    Probe = 9,
    Model = 10,
    Grading = 11,
    BoundU = 12,
    BoundV = 13,
    Aux = 14,
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// Generator for sample `index` of stream `purpose`.
pub fn stream(seed: u64, purpose: Purpose, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (purpose as u64).wrapping_mul(GOLDEN));
    rng.set_stream(index);
    rng
}

/// Random element of `grid` with `‖x‖_m = radius` exactly.
///
/// The degree is drawn from `0..=min(SAMPLE_DEGREE, D)` and the coefficients
/// uniformly from `[-1, 1]` before rescaling.
pub fn disk_element(
    grid: &Arc<Grid>,
    m: &Grading,
    radius: f64,
    rng: &mut impl Rng,
) -> Result<SmoothFn> {
    let top = SAMPLE_DEGREE.min(grid.degree());
    for _ in 0..64 {
        let degree = rng.random_range(0..=top);
        let coeffs: Vec<f64> = (0..=degree).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let x = SmoothFn::from_coeffs(grid, coeffs)?;
        if x.is_zero() {
            continue;
        }
        let (_, unit) = scale_to_disk(&x, m)?;
        return Ok(unit.scaled(radius));
    }
    Err(Error::Sampling("could not draw a nonzero disk element"))
}

/// Uniform draw from `[lo, hi)`.
pub fn uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}
