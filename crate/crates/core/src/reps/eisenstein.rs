//! Eisenstein integers a + bω (ω = ζ₃) and ξ on principal ideals of Q(μ₃).

use std::ops::{Add, Mul, Neg, Sub};

use super::character::FalseTateCharacter;
use super::{primes_of_kn, CyclotomicLevel, RepsError};
use crate::exact::arith::factor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Eis {
    pub a: i64,
    pub b: i64,
}

impl Eis {
    pub const fn new(a: i64, b: i64) -> Self {
        Self { a, b }
    }
    pub const fn int(a: i64) -> Self {
        Self { a, b: 0 }
    }
    /// δ = 1 + 2ω = √−3.
    pub const fn delta() -> Self {
        Self { a: 1, b: 2 }
    }
    pub fn norm(&self) -> i64 {
        self.a * self.a - self.a * self.b + self.b * self.b
    }
    pub fn trace(&self) -> i64 {
        2 * self.a - self.b
    }
    pub fn conj(&self) -> Self {
        Self { a: self.a - self.b, b: -self.b }
    }
    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::int(1), |acc, _| acc * *self)
    }
    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }
    /// Exact quotient when d | self.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let n = d.norm();
        let t = *self * d.conj();
        (t.a % n == 0 && t.b % n == 0).then(|| Self { a: t.a / n, b: t.b / n })
    }
    pub fn divides(&self, x: &Self) -> bool {
        x.div_exact(self).is_some()
    }
    pub fn units() -> [Self; 6] {
        [Self::new(1, 0), Self::new(-1, 0), Self::new(0, 1), Self::new(0, -1), Self::new(1, 1), Self::new(-1, -1)]
    }
    /// Value in C under ω ↦ e^{2πi/3}: (re, im).
    pub fn to_complex(&self) -> (f64, f64) {
        (self.a as f64 - self.b as f64 / 2.0, self.b as f64 * 3f64.sqrt() / 2.0)
    }
}

impl Add for Eis {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { a: self.a + o.a, b: self.b + o.b }
    }
}
impl Sub for Eis {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { a: self.a - o.a, b: self.b - o.b }
    }
}
impl Neg for Eis {
    type Output = Self;
    fn neg(self) -> Self {
        Self { a: -self.a, b: -self.b }
    }
}
impl Mul for Eis {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        // ω² = −1 − ω
        let bb = self.b * o.b;
        Self { a: self.a * o.a - bb, b: self.a * o.b + self.b * o.a - bb }
    }
}

/// Exponent k with ξ((x)) = ζ_M^k, for K = Q(μ₃) and x coprime to 3m.
pub fn xi_principal(xi: &FalseTateCharacter, x: Eis) -> Result<u64, RepsError> {
    if xi.p != 3 || xi.n != 1 {
        return Err(RepsError::Unsupported);
    }
    let mm = xi.coeff_modulus();
    let level = CyclotomicLevel { p: 3, n: 1 };
    let mut total = 0u64;
    let mut y = x;
    for (ell, e) in factor(x.norm() as u64) {
        if ell == 3 || xi.m % ell == 0 {
            return Err(RepsError::RamifiedAtV(ell));
        }
        let vs = primes_of_kn(&level, ell)?;
        if ell % 3 == 2 {
            total += (e as u64 / 2) * xi.hecke_exponent(&vs[0])?;
            continue;
        }
        let l = ell as i64;
        let mut rest = e;
        while y.a % l == 0 && y.b % l == 0 {
            y = Eis::new(y.a / l, y.b / l);
            rest -= 2;
            for v in &vs {
                total += xi.hecke_exponent(v)?;
            }
        }
        if rest > 0 {
            let v = vs
                .iter()
                .find(|v| {
                    let r = v.zeta_residue().unwrap() as i64;
                    (y.a + y.b * r).rem_euclid(l) == 0
                })
                .unwrap();
            total += rest as u64 * xi.hecke_exponent(v)?;
        }
    }
    Ok(total % mm)
}

/// Whether ξ((x)) depends only on x mod g: ξ((1 + g z)) = 1 on a box of z.
pub fn defined_modulo(xi: &FalseTateCharacter, g: Eis, radius: i64) -> Result<bool, RepsError> {
    for a in -radius..=radius {
        for b in -radius..=radius {
            let x = Eis::int(1) + g * Eis::new(a, b);
            if x.is_zero() {
                continue;
            }
            match xi_principal(xi, x) {
                Ok(k) if k != 0 => return Ok(false),
                Ok(_) | Err(RepsError::RamifiedAtV(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(true)
}

/// Conductor δ^c·L of ξ with L the product of primes ℓ | m where ξ ramifies;
/// returns (c, L).
pub fn hecke_conductor(xi: &FalseTateCharacter) -> Result<(u32, i64), RepsError> {
    let mut l = 1i64;
    for (ell, _) in factor(xi.m) {
        if ell != 3 {
            l *= ell as i64;
        }
    }
    // drop primes of m where ξ is unramified
    for (ell, _) in factor(xi.m) {
        if ell == 3 {
            continue;
        }
        let smaller = l / ell as i64;
        if defined_modulo(xi, Eis::delta().pow(8) * Eis::int(smaller), 4)? {
            l = smaller;
        }
    }
    for c in 0..8 {
        if defined_modulo(xi, Eis::delta().pow(c) * Eis::int(l), 6)? {
            return Ok((c, l));
        }
    }
    Err(RepsError::BadCharacter("conductor exponent at 3 exceeds 7".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reps::DirichletChar;

    #[test]
    fn arithmetic() {
        let d = Eis::delta();
        assert_eq!(d * d, Eis::int(-3));
        assert_eq!(d.norm(), 3);
        assert_eq!(Eis::new(0, 1).pow(3), Eis::int(1));
        let x = Eis::new(5, -3);
        assert_eq!(x * x.conj(), Eis::int(x.norm()));
        assert_eq!((x * d).div_exact(&d), Some(x));
    }

    #[test]
    fn principal_matches_prime_product() {
        let xi = FalseTateCharacter::new(3, 1, 2, 1, DirichletChar::new(9, vec![2]).unwrap()).unwrap();
        let mm = xi.coeff_modulus();
        let level = CyclotomicLevel::new(3, 1).unwrap();
        for ell in [7u64, 13, 19, 31, 37, 43] {
            let sum: u64 = primes_of_kn(&level, ell).unwrap().iter().map(|v| xi.hecke_exponent(v).unwrap()).sum();
            assert_eq!(xi_principal(&xi, Eis::int(ell as i64)).unwrap(), sum % mm);
        }
        // multiplicative in x
        let (x, y) = (Eis::new(4, 1), Eis::new(7, 3));
        let lhs = xi_principal(&xi, x * y).unwrap();
        assert_eq!(lhs, (xi_principal(&xi, x).unwrap() + xi_principal(&xi, y).unwrap()) % mm);
        // units act trivially
        for u in Eis::units() {
            assert_eq!(xi_principal(&xi, x * u).unwrap(), xi_principal(&xi, x).unwrap());
        }
    }

    #[test]
    fn conductors_of_rho1() {
        // N(ρ) = 3·N(f): 108 and 675 for φ trivial, 324 and 2025 for φ cubic mod 9
        for (m, phi, nr) in [
            (2u64, DirichletChar::trivial(1), 108i64),
            (5, DirichletChar::trivial(1), 675),
            (2, DirichletChar::new(9, vec![2]).unwrap(), 324),
            (5, DirichletChar::new(9, vec![2]).unwrap(), 2025),
        ] {
            let xi = FalseTateCharacter::new(3, 1, m, 1, phi).unwrap();
            let (c, l) = hecke_conductor(&xi).unwrap();
            let nf = 3i64.pow(c) * l * l;
            assert_eq!(3 * nf, nr, "m={m}");
        }
    }
}
