use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::tate::tate_local_data;
use super::EllError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReductionKind {
    Good,
    SplitMultiplicative,
    NonsplitMultiplicative,
    Additive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionType {
    pub kind: ReductionKind,
    pub conductor_exponent: u32,
}

impl ReductionType {
    pub fn good() -> Self {
        Self { kind: ReductionKind::Good, conductor_exponent: 0 }
    }
    /// Trace of Frobenius on inertia invariants: ±1 multiplicative, 0 additive.
    pub fn bad_trace(&self) -> i64 {
        match self.kind {
            ReductionKind::SplitMultiplicative => 1,
            ReductionKind::NonsplitMultiplicative => -1,
            _ => 0,
        }
    }
}

/// Integral Weierstrass model with its standard invariants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Weierstrass {
    pub a1: BigInt,
    pub a2: BigInt,
    pub a3: BigInt,
    pub a4: BigInt,
    pub a6: BigInt,
}

impl Weierstrass {
    pub fn new(a: [i64; 5]) -> Self {
        let [a1, a2, a3, a4, a6] = a.map(BigInt::from);
        Self { a1, a2, a3, a4, a6 }
    }
    pub fn b2(&self) -> BigInt {
        &self.a1 * &self.a1 + &self.a2 * 4
    }
    pub fn b4(&self) -> BigInt {
        &self.a4 * 2 + &self.a1 * &self.a3
    }
    pub fn b6(&self) -> BigInt {
        &self.a3 * &self.a3 + &self.a6 * 4
    }
    pub fn b8(&self) -> BigInt {
        let (a1, a2, a3, a4, a6) = (&self.a1, &self.a2, &self.a3, &self.a4, &self.a6);
        a1 * a1 * a6 + a2 * a6 * 4 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    }
    pub fn c4(&self) -> BigInt {
        let b2 = self.b2();
        &b2 * &b2 - self.b4() * 24
    }
    pub fn c6(&self) -> BigInt {
        let (b2, b4, b6) = (self.b2(), self.b4(), self.b6());
        -(&b2 * &b2 * &b2) + &b2 * &b4 * 36 - b6 * 216
    }
    pub fn disc(&self) -> BigInt {
        let (b2, b4, b6, b8) = (self.b2(), self.b4(), self.b6(), self.b8());
        -(&b2 * &b2 * &b8) - &b4 * &b4 * &b4 * 8 - &b6 * &b6 * 27 + &b2 * &b4 * &b6 * 9
    }
    /// Substitution x = x' + r, y = y' + s x' + t.
    pub fn transform(&self, r: &BigInt, s: &BigInt, t: &BigInt) -> Self {
        let (a1, a2, a3, a4, a6) = (&self.a1, &self.a2, &self.a3, &self.a4, &self.a6);
        Self {
            a1: a1 + s * 2,
            a2: a2 - s * a1 + r * 3 - s * s,
            a3: a3 + r * a1 + t * 2,
            a4: a4 - s * a3 + r * a2 * 2 - (t + r * s) * a1 + r * r * 3 - s * t * 2,
            a6: a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EllipticCurveModel {
    pub a: [i64; 5],
    pub disc: BigInt,
    pub conductor: u64,
    pub local_data: BTreeMap<u64, ReductionType>,
}

impl EllipticCurveModel {
    /// Build from [a1, a2, a3, a4, a6]; the model must be minimal.
    pub fn new(a: [i64; 5]) -> Result<Self, EllError> {
        let w = Weierstrass::new(a);
        let disc = w.disc();
        if disc.is_zero() {
            return Err(EllError::Singular);
        }
        let mut local_data = BTreeMap::new();
        let mut conductor = 1u64;
        for p in prime_divisors(&disc.abs())? {
            let rt = tate_local_data(a, p)?;
            conductor *= p.pow(rt.conductor_exponent);
            local_data.insert(p, rt);
        }
        Ok(Self { a, disc, conductor, local_data })
    }

    pub fn weierstrass(&self) -> Weierstrass {
        Weierstrass::new(self.a)
    }

    pub fn reduction(&self, ell: u64) -> ReductionType {
        self.local_data.get(&ell).copied().unwrap_or_else(ReductionType::good)
    }

    /// b2, b4, b6 as i128 (used by point counting).
    pub fn b_invariants(&self) -> (i128, i128, i128) {
        let w = self.weierstrass();
        let f = |x: BigInt| x.to_i128().expect("small curve");
        (f(w.b2()), f(w.b4()), f(w.b6()))
    }
}

/// Distinct prime divisors of n > 0: trial division, then Pollard rho.
pub fn prime_divisors(n: &BigInt) -> Result<Vec<u64>, EllError> {
    let mut n = n.clone();
    let mut out = Vec::new();
    let mut p = 2u64;
    while p < 100_000 && BigInt::from(p * p) <= n {
        if (&n % p).is_zero() {
            out.push(p);
            while (&n % p).is_zero() {
                n /= p;
            }
        }
        p += 1;
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if probable_prime(&m) {
            out.push(m.to_u64().ok_or(EllError::Factorization)?);
            continue;
        }
        let d = rho(&m).ok_or(EllError::Factorization)?;
        stack.push(&m / &d);
        stack.push(d);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn probable_prime(n: &BigInt) -> bool {
    if n < &BigInt::from(2) {
        return false;
    }
    let one = BigInt::one();
    let nm1 = n - 1u32;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'w: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let a = BigInt::from(a);
        if &a >= n {
            continue;
        }
        let mut x = a.modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = &x * &x % n;
            if x == nm1 {
                continue 'w;
            }
        }
        return false;
    }
    true
}

fn rho(n: &BigInt) -> Option<BigInt> {
    for c in 1u32..50 {
        let f = |x: &BigInt| (x * x + c) % n;
        let (mut x, mut y) = (BigInt::from(2), BigInt::from(2));
        loop {
            x = f(&x);
            y = f(&f(&y));
            let d = (&x - &y).abs().gcd(n);
            if d == *n {
                break;
            }
            if !d.is_one() {
                return Some(d);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariants_11a1() {
        let e = EllipticCurveModel::new([0, -1, 1, -10, -20]).unwrap();
        assert_eq!(e.disc, BigInt::from(-161051));
        assert_eq!(e.conductor, 11);
        assert_eq!(e.local_data.keys().copied().collect::<Vec<_>>(), vec![11]);
    }

    #[test]
    fn rho_splits_semiprime() {
        let n = BigInt::from(1_000_003u64) * BigInt::from(998_244_353u64);
        assert_eq!(prime_divisors(&n).unwrap(), vec![1_000_003, 998_244_353]);
    }

    #[test]
    fn transform_preserves_disc() {
        let w = Weierstrass::new([1, -1, 1, -29, -53]);
        let v = w.transform(&BigInt::from(3), &BigInt::from(-2), &BigInt::from(5));
        assert_eq!(w.disc(), v.disc());
        assert_eq!(w.c4(), v.c4());
    }
}
