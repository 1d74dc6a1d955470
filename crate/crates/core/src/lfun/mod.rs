//! L-function specifications, Dirichlet coefficients and special values.

pub mod eval;
pub mod spec;
pub mod weights;

pub use eval::{conductor_search, evaluate_l, evaluate_raw, terms_needed, ConductorSearch, EvalResult};
pub use spec::{assemble_spec, CoeffSource, Coeffs, LFunctionSpec, LocalFactor};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LfunError {
    #[error("need {need} coefficients, have {have}")]
    NeedMoreCoefficients { need: usize, have: usize },
    #[error("root number did not converge (|ε| = {abs})")]
    NoRootNumberConverged { abs: f64 },
    #[error("functional-equation residual {residual:e} above {threshold:e}")]
    ResidualTooLarge { residual: f64, threshold: f64 },
    #[error("no conductor candidate satisfies the functional equation")]
    NoCandidate,
    #[error("several conductor candidates survive: {0:?}")]
    AmbiguousCandidates(Vec<u64>),
    #[error("E additive and ξ ramified at the prime above {0}")]
    JointAdditiveRamification(u64),
    #[error(transparent)]
    Reps(#[from] crate::reps::RepsError),
    #[error(transparent)]
    Elliptic(#[from] crate::elliptic::EllError),
}
