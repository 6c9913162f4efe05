//! Neumann-series perturbation bounds and simplified-Newton inversion.

mod neumann;
mod newton;

pub use neumann::{
    max_norm, neumann_bound, neumann_bound_on, neumann_inverse, NeumannVerdict, BOUND_TOL,
    MAX_TERMS, PREMISE_SLACK, SERIES_TOL,
};
pub use newton::{
    admissible_target, derivative_amplification, derivative_invertibility, inverse_lipschitz_check,
    newton_invert, sample_target, Certificate, InversionResult, InvertibilityVerdict,
    LipschitzVerdict, StopReason, DEFAULT_MAXITER, DEFAULT_PROBES, DEFAULT_TOL, DOMAIN_SLACK,
    LIP_SLACK, RATIO_SLACK,
};
