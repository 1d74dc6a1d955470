//! Exact substrate: integers mod n, cyclotomic numbers, F_ℓ[x], LLL, recognition.

pub mod arith;
pub mod cyclo;
pub mod fpoly;
pub mod lll;
pub mod recognize;

pub use cyclo::CyclotomicNumber;
pub use fpoly::{factor_poly_mod_l, FiniteFieldElem, FpPoly};
pub use lll::lll_reduce;
pub use recognize::{recognize_cyclotomic, recognize_stable};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("modulus is not prime")]
    NotPrime,
    #[error("argument not coprime to the modulus")]
    NotCoprime,
    #[error("polynomial vanishes modulo the prime")]
    ZeroPolynomial,
    #[error("lattice basis is linearly dependent")]
    DependentInput,
    #[error("no relation passes the residual test")]
    NoRelation,
    #[error("recognized value changed under precision escalation")]
    Unstable,
    #[error("coefficient vector has the wrong length")]
    BadLength,
    #[error("cannot parse rational")]
    Parse,
}

/// Multiplicative order of a modulo M.
pub fn mult_order(a: i64, m: u64) -> Result<u64, ExactError> {
    arith::mult_order(a.rem_euclid(m as i64) as u64, m).ok_or(ExactError::NotCoprime)
}
