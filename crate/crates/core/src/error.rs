use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("point s = {s} lies outside [0, 1]")]
    Domain { s: f64 },

    #[error("derivative order {order} exceeds the tracked maximum {max}")]
    OrderOutOfRange { order: usize, max: usize },

    #[error("functions live on different grids")]
    GridMismatch,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("non-finite sample at node {index}")]
    NonFiniteSample { index: usize },

    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("unknown identifier `{name}` at byte {position}")]
    UnknownIdentifier { position: usize, name: String },

    #[error("evaluation failed at (s, eta) = ({s}, {eta}): {reason}")]
    Eval {
        s: f64,
        eta: f64,
        reason: &'static str,
    },

    #[error("d/d(eta) phi vanishes near (s, eta) = ({s}, {eta}) (value {value})")]
    VanishingDerivative { s: f64, eta: f64, value: f64 },

    #[error("invalid grading: {0}")]
    InvalidGrading(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),

    #[error("value {value} at s = {s} leaves the admissible eta-range [{lo}, {hi}]")]
    EtaRange {
        s: f64,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("frozen derivative is singular at s = {s} (value {value})")]
    SingularDerivative { s: f64, value: f64 },

    #[error("sampling failed: {0}")]
    Sampling(&'static str),

    #[error("theta is undefined: B0 * r * (2 + r) = {value} >= 1")]
    ThetaDomain { value: f64 },

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("grading is not a member of the generator family: {0}")]
    NotMember(String),

    #[error("premise violated at probe {probe}: nu(l x - x) / nu(x) = {ratio} exceeds epsilon = {epsilon}")]
    PremiseViolated {
        ratio: f64,
        epsilon: f64,
        probe: usize,
    },

    #[error("Neumann series did not converge within {iterations} terms")]
    NonConvergence { iterations: usize },

    #[error("target is not admissible: gauge of the first increment is {gauge} > 1")]
    InadmissibleTarget { gauge: f64 },

    #[error("solve {index} failed: {reason}")]
    SolveFailed { index: u64, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
