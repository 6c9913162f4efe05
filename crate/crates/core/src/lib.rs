//! Local inversion of composition (Nemytskii) operators
//! `f(x)(s) = φ(s, x(s))` on a truncated spectral model of `C^∞([0, 1])`.
//!
//! The crate is organised bottom-up:
//!
//! - [`funrep`]: Chebyshev representation of smooth functions on `[0, 1]`.
//! - [`bivar`]: symbolic bivariate expressions `φ(s, η)` with exact partials.
//! - [`grading`]: the graded sup-norm disks `B_m` and their gauge norms.
//! - [`nemytskii`]: the composition operator, its derivative, the frozen
//!   inverse derivative `ℓ`, and the sampled inclusion check.
//! - [`tameness`]: the kernel `χ`, the jet recursion, majorants and the
//!   generator family of gradings.
//! - [`inverse`]: Neumann-series perturbation bounds and the
//!   simplified-Newton inversion with certificates.
//!
//! Everything here is `no_std` (with `alloc`); file formats and the command
//! line live in the companion `colotame` crate.

#![no_std]

extern crate alloc;

pub mod bivar;
pub mod error;
pub mod funrep;
pub mod grading;
pub mod inverse;
pub mod nemytskii;
pub mod quadrature;
pub mod sampling;
pub mod tameness;

pub use bivar::{BivarFn, Jet2, JetSource};
pub use error::{Error, Result};
pub use funrep::{GridConfig, SmoothFn};
pub use grading::{GaugeValue, Grading};
pub use nemytskii::CompOp;
