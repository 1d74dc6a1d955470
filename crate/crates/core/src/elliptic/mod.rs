//! Elliptic curves over Q: local data, Frobenius traces, coefficients, periods.

pub mod count;
pub mod curve;
pub mod periods;
pub mod tate;

pub use count::{count_ap, count_ap_bsgs, count_ap_naive, dirichlet_coeffs_e, frobenius_trace_extension, ApTable};
pub use curve::{EllipticCurveModel, ReductionKind, ReductionType};
pub use periods::{compute_periods, PeriodPair};
pub use tate::tate_local_data;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EllError {
    #[error("model is singular")]
    Singular,
    #[error("model is not minimal at {0}")]
    NonMinimalAtL(u64),
    #[error("{0} is a bad prime")]
    BadPrime(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("trace {a} violates the Hasse bound at {ell}")]
    HasseViolation { a: i64, ell: u64 },
    #[error("precision exhausted")]
    PrecisionExhausted,
    #[error("cannot factor the discriminant")]
    Factorization,
}
