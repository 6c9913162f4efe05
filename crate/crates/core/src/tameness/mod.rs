//! The kernel `χ`, the product-rule polynomials, majorants and the
//! generator family of gradings on which the composition operator satisfies
//! the inclusion condition with `ε = 1/2`.

pub mod chi;
pub mod generator;
pub mod jetpoly;
pub mod majorant;

pub use chi::{chi_identity_residual, chi_kernel, ChiKernel, DEFAULT_QUAD_NODES};
pub use generator::{
    build_n, jet_derivative, x_sequences, DerivBoundReport, GeneratorFamily, StarReport,
};
pub use jetpoly::{build_p, JetPolynomial, JetRecursion, Monomial};
pub use majorant::{bound_r, jet_box_sup, MajorantTable};
