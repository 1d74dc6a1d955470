//! Numerical verification of algebraicity and Galois equivariance for
//! L-values of elliptic curves twisted by Artin representations of the
//! false Tate tower Q(μ_{p^n}, m^{1/p^n}).

pub mod elliptic;
pub mod exact;
pub mod gauss;
pub mod lfun;
pub mod real;
pub mod reps;
pub mod verify;

pub use real::{Cx, MpFloat, Real};

/// High-precision scalar used for final values.
pub type Mp = MpFloat;
/// Fast scalar used for screening.
pub type F64 = f64;
