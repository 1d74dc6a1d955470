//! Representation theory of the false Tate tower Q(μ_{p^n}, m^{1/p^n}).

pub mod character;
pub mod dirichlet;
pub mod eisenstein;

use std::sync::Arc;

use thiserror::Error;

use crate::exact::arith::{euler_phi, is_prime, mult_order};
use crate::exact::cyclo::cyclotomic_poly;
use crate::exact::{factor_poly_mod_l, ExactError, FiniteFieldElem, FpPoly};

pub use character::{
    check_anticyclotomic, check_cyclotomic, classify_irreps, conjugate_rep, hecke_eval, kummer_eval, ArtinRepFT,
    FalseTateCharacter,
};
pub use dirichlet::DirichletChar;
pub use eisenstein::Eis;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RepsError {
    #[error("{0} is ramified in the cyclotomic field")]
    RamifiedPrime(u64),
    #[error("character is ramified at the prime above {0}")]
    RamifiedAtV(u64),
    #[error("m = {0} is a perfect p-th power")]
    InvalidM(u64),
    #[error("argument not coprime to the coefficient modulus")]
    NotCoprime,
    #[error("not enough split primes below the search bound")]
    InsufficientSplitPrimes,
    #[error("invalid character data: {0}")]
    BadCharacter(String),
    #[error("only K = Q(μ_3) is supported here")]
    Unsupported,
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// K_n = Q(μ_{p^n}).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CyclotomicLevel {
    pub p: u64,
    pub n: u32,
}

impl CyclotomicLevel {
    pub fn new(p: u64, n: u32) -> Result<Self, RepsError> {
        if p == 2 || !is_prime(p) || n == 0 {
            return Err(RepsError::BadCharacter(format!("level p={p}, n={n}")));
        }
        Ok(Self { p, n })
    }
    pub fn pn(&self) -> u64 {
        self.p.pow(self.n)
    }
    pub fn degree(&self) -> u64 {
        euler_phi(self.pn())
    }
    /// Residue degree f(ℓ) for ℓ ≠ p.
    pub fn residue_degree(&self, ell: u64) -> u32 {
        mult_order(ell % self.pn(), self.pn()).expect("ℓ ≠ p") as u32
    }
    pub fn num_primes(&self, ell: u64) -> u64 {
        self.degree() / self.residue_degree(ell) as u64
    }
}

/// A prime v of K_n above ℓ, given by an irreducible factor of Φ_{p^n} mod ℓ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeOfKn {
    pub ell: u64,
    pub f: u32,
    pub factor: Arc<FpPoly>,
    /// Image of ζ_{p^n} in the residue field.
    pub zeta_image: FiniteFieldElem,
}

impl PrimeOfKn {
    pub fn norm(&self) -> Option<u128> {
        (self.ell as u128).checked_pow(self.f)
    }

    /// For f = 1, the residue r with ζ ≡ r mod v.
    pub fn zeta_residue(&self) -> Option<u64> {
        (self.f == 1).then(|| self.zeta_image.rep.c.first().copied().unwrap_or(0))
    }
}

pub fn primes_of_kn(level: &CyclotomicLevel, ell: u64) -> Result<Vec<PrimeOfKn>, RepsError> {
    if ell == level.p {
        return Err(RepsError::RamifiedPrime(ell));
    }
    let phi = cyclotomic_poly(level.pn());
    let fac = factor_poly_mod_l(&phi, ell)?;
    Ok(fac
        .factors
        .into_iter()
        .map(|(g, _)| {
            let f = g.deg() as u32;
            let g = Arc::new(g);
            PrimeOfKn { ell, f, zeta_image: FiniteFieldElem::generator(g.clone()), factor: g }
        })
        .collect())
}

/// Complex conjugate prime: the factor whose roots are the inverses.
pub fn conjugate_prime(v: &PrimeOfKn, all: &[PrimeOfKn]) -> PrimeOfKn {
    let r = v.factor.reciprocal().monic();
    all.iter().find(|w| *w.factor == r).cloned().expect("conjugate factor present")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitting_examples() {
        let k1 = CyclotomicLevel::new(3, 1).unwrap();
        let v7 = primes_of_kn(&k1, 7).unwrap();
        assert_eq!(v7.len(), 2);
        let mut z: Vec<u64> = v7.iter().map(|v| v.zeta_residue().unwrap()).collect();
        z.sort();
        assert_eq!(z, vec![2, 4]);
        assert!(v7.iter().all(|v| v.norm() == Some(7)));
        let v5 = primes_of_kn(&k1, 5).unwrap();
        assert_eq!(v5.len(), 1);
        assert_eq!(v5[0].norm(), Some(25));
        let v13 = primes_of_kn(&k1, 13).unwrap();
        assert!(v13.len() == 2 && v13.iter().all(|v| v.norm() == Some(13)));
        assert!(matches!(primes_of_kn(&k1, 3), Err(RepsError::RamifiedPrime(3))));
    }

    #[test]
    fn zeta_image_has_exact_order() {
        for (p, n) in [(3u64, 1u32), (3, 2), (5, 1), (7, 1)] {
            let lv = CyclotomicLevel::new(p, n).unwrap();
            for ell in [2u64, 11, 19, 31, 37, 101] {
                if ell == p {
                    continue;
                }
                let vs = primes_of_kn(&lv, ell).unwrap();
                assert_eq!(vs.len() as u64 * lv.residue_degree(ell) as u64, lv.degree());
                for v in &vs {
                    let z = &v.zeta_image;
                    assert!(z.pow(lv.pn() as u128).is_one());
                    assert!(!z.pow((lv.pn() / p) as u128).is_one());
                    let c = conjugate_prime(v, &vs);
                    if let (Some(r), Some(s)) = (v.zeta_residue(), c.zeta_residue()) {
                        assert_eq!(r * s % ell, 1);
                    }
                }
            }
        }
    }
}
