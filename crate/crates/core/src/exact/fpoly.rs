//! Polynomials over F_ℓ, factorisation, and finite-field elements.

use std::sync::Arc;

use super::arith::{invmod, is_prime, mulmod};
use super::ExactError;

/// Dense polynomial over F_ℓ, low degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FpPoly {
    pub ell: u64,
    pub c: Vec<u64>,
}

impl FpPoly {
    pub fn new(ell: u64, mut c: Vec<u64>) -> Self {
        for x in c.iter_mut() {
            *x %= ell;
        }
        let mut p = FpPoly { ell, c };
        p.trim();
        p
    }

    pub fn from_ints(ell: u64, c: &[i64]) -> Self {
        Self::new(ell, c.iter().map(|&x| x.rem_euclid(ell as i64) as u64).collect())
    }

    pub fn zero(ell: u64) -> Self {
        FpPoly { ell, c: vec![] }
    }

    pub fn one(ell: u64) -> Self {
        FpPoly { ell, c: vec![1] }
    }

    /// x.
    pub fn x(ell: u64) -> Self {
        Self::new(ell, vec![0, 1])
    }

    fn trim(&mut self) {
        while self.c.last() == Some(&0) {
            self.c.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree; −1 for zero.
    pub fn deg(&self) -> isize {
        self.c.len() as isize - 1
    }

    pub fn lead(&self) -> u64 {
        *self.c.last().unwrap_or(&0)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = invmod(self.lead(), self.ell).unwrap();
        self.scale(inv)
    }

    pub fn scale(&self, k: u64) -> Self {
        Self::new(self.ell, self.c.iter().map(|&x| mulmod(x, k, self.ell)).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let l = self.ell;
        let c = (0..n).map(|i| (self.c.get(i).copied().unwrap_or(0) + o.c.get(i).copied().unwrap_or(0)) % l).collect();
        Self::new(l, c)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let l = self.ell;
        let c =
            (0..n).map(|i| (self.c.get(i).copied().unwrap_or(0) + l - o.c.get(i).copied().unwrap_or(0)) % l).collect();
        Self::new(l, c)
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.ell);
        }
        let l = self.ell as u128;
        let mut acc = vec![0u128; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                acc[i + j] = (acc[i + j] + a as u128 * b as u128) % l;
            }
        }
        Self::new(self.ell, acc.into_iter().map(|x| x as u64).collect())
    }

    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero());
        let l = self.ell;
        let mut r = self.c.clone();
        let dd = d.c.len() - 1;
        if r.len() <= dd {
            return (Self::zero(l), self.clone());
        }
        let inv = invmod(d.lead(), l).unwrap();
        let mut q = vec![0u64; r.len() - dd];
        for i in (0..q.len()).rev() {
            let coef = mulmod(r[i + dd], inv, l);
            q[i] = coef;
            if coef == 0 {
                continue;
            }
            for j in 0..=dd {
                r[i + j] = (r[i + j] + l - mulmod(coef, d.c[j], l)) % l;
            }
        }
        r.truncate(dd);
        (Self::new(l, q), Self::new(l, r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        let l = self.ell;
        let c = self.c.iter().enumerate().skip(1).map(|(i, &x)| mulmod(x, i as u64 % l, l)).collect();
        Self::new(l, c)
    }

    /// self^e mod m.
    pub fn powmod(&self, mut e: u64, m: &Self) -> Self {
        let mut base = self.rem(m);
        let mut acc = Self::one(self.ell).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).rem(m);
            }
        }
        acc
    }

    pub fn eval(&self, x: u64) -> u64 {
        self.c.iter().rev().fold(0, |acc, &a| (mulmod(acc, x, self.ell) + a) % self.ell)
    }

    /// x^deg · f(1/x), made monic. Its roots are the inverses of the roots of f.
    pub fn reciprocal(&self) -> Self {
        let mut c = self.c.clone();
        c.reverse();
        Self::new(self.ell, c).monic()
    }
}

/// Unit times a list of monic irreducible factors with multiplicity.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub unit: u64,
    pub factors: Vec<(FpPoly, u32)>,
}

impl Factorization {
    pub fn product(&self) -> FpPoly {
        let l = self.factors.first().map(|f| f.0.ell).unwrap_or(2);
        let mut acc = FpPoly::new(l, vec![self.unit]);
        for (f, e) in &self.factors {
            for _ in 0..*e {
                acc = acc.mul(f);
            }
        }
        acc
    }
}

/// Factor an integer polynomial modulo the prime ℓ.
pub fn factor_poly_mod_l(poly: &[i64], ell: u64) -> Result<Factorization, ExactError> {
    if !is_prime(ell) {
        return Err(ExactError::NotPrime);
    }
    let f = FpPoly::from_ints(ell, poly);
    if f.is_zero() {
        return Err(ExactError::ZeroPolynomial);
    }
    let unit = f.lead();
    let mut factors = Vec::new();
    for (sq, mult) in squarefree(&f.monic()) {
        for (g, d) in distinct_degree(&sq) {
            for h in equal_degree(&g, d) {
                factors.push((h, mult));
            }
        }
    }
    factors.sort_by(|a, b| a.0.c.len().cmp(&b.0.c.len()).then(a.0.c.iter().rev().cmp(b.0.c.iter().rev())));
    Ok(Factorization { unit, factors })
}

/// Square-free decomposition of a monic polynomial.
fn squarefree(f: &FpPoly) -> Vec<(FpPoly, u32)> {
    let ell = f.ell;
    let mut out = Vec::new();
    if f.deg() < 1 {
        return out;
    }
    let d = f.derivative();
    if d.is_zero() {
        // f = g(x^ℓ) = g(x)^ℓ over F_ℓ.
        let g = FpPoly::new(ell, f.c.iter().step_by(ell as usize).copied().collect());
        for (h, m) in squarefree(&g) {
            out.push((h, m * ell as u32));
        }
        return out;
    }
    let mut c = f.gcd(&d);
    let mut w = f.divrem(&c).0;
    let mut i = 1;
    while w.deg() > 0 {
        let y = w.gcd(&c);
        let z = w.divrem(&y).0;
        if z.deg() > 0 {
            out.push((z.monic(), i));
        }
        i += 1;
        w = y;
        c = c.divrem(&w).0;
    }
    if c.deg() > 0 {
        let g = FpPoly::new(ell, c.c.iter().step_by(ell as usize).copied().collect());
        for (h, m) in squarefree(&g.monic()) {
            out.push((h, m * ell as u32));
        }
    }
    out
}

fn distinct_degree(f: &FpPoly) -> Vec<(FpPoly, usize)> {
    let ell = f.ell;
    let mut out = Vec::new();
    let mut rest = f.clone();
    let x = FpPoly::x(ell);
    let mut h = x.rem(&rest);
    let mut d = 0;
    while rest.deg() >= 2 * (d as isize + 1) {
        d += 1;
        h = h.powmod(ell, &rest);
        let g = h.sub(&x).gcd(&rest);
        if g.deg() > 0 {
            rest = rest.divrem(&g).0;
            h = h.rem(&rest);
            out.push((g, d));
        }
    }
    if rest.deg() > 0 {
        let dd = rest.deg() as usize;
        out.push((rest.monic(), dd));
    }
    out
}

struct Xorshift(u64);

impl Xorshift {
    fn next(&mut self) -> u64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        self.0
    }
}

/// Cantor–Zassenhaus splitting of a product of distinct degree-d irreducibles.
fn equal_degree(f: &FpPoly, d: usize) -> Vec<FpPoly> {
    let n = f.deg() as usize;
    if n == d {
        return vec![f.monic()];
    }
    let ell = f.ell;
    let mut rng = Xorshift(0x9e37_79b9_7f4a_7c15 ^ ell ^ (n as u64) << 32);
    loop {
        let a = FpPoly::new(ell, (0..n).map(|_| rng.next() % ell).collect());
        if a.deg() < 1 {
            continue;
        }
        let b = if ell == 2 {
            // Trace to F_2: a + a^2 + … + a^{2^{d−1}}.
            let mut t = a.clone();
            let mut acc = a.clone();
            for _ in 1..d {
                t = t.mul(&t).rem(f);
                acc = acc.add(&t);
            }
            acc
        } else {
            // a^{(ℓ^d−1)/2} = N(a)^{(ℓ−1)/2}, N the norm down to F_ℓ.
            let mut t = a.rem(f);
            let mut norm = t.clone();
            for _ in 1..d {
                t = t.powmod(ell, f);
                norm = norm.mul(&t).rem(f);
            }
            norm.powmod((ell - 1) / 2, f).sub(&FpPoly::one(ell))
        };
        let g = b.gcd(f);
        if g.deg() > 0 && g.deg() < f.deg() {
            let h = f.divrem(&g).0;
            let mut out = equal_degree(&g, d);
            out.extend(equal_degree(&h.monic(), d));
            return out;
        }
    }
}

/// Element of F_ℓ[x]/(g) for an irreducible g.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteFieldElem {
    pub modulus: Arc<FpPoly>,
    pub rep: FpPoly,
}

impl FiniteFieldElem {
    pub fn new(modulus: Arc<FpPoly>, rep: FpPoly) -> Self {
        let rep = rep.rem(&modulus);
        FiniteFieldElem { modulus, rep }
    }

    pub fn from_int(modulus: Arc<FpPoly>, k: i64) -> Self {
        let ell = modulus.ell;
        Self::new(modulus, FpPoly::from_ints(ell, &[k]))
    }

    /// The class of x.
    pub fn generator(modulus: Arc<FpPoly>) -> Self {
        let ell = modulus.ell;
        Self::new(modulus, FpPoly::x(ell))
    }

    pub fn characteristic(&self) -> u64 {
        self.modulus.ell
    }

    pub fn degree(&self) -> usize {
        self.modulus.deg() as usize
    }

    pub fn order_of_field(&self) -> u128 {
        (self.characteristic() as u128).pow(self.degree() as u32)
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(self.modulus.clone(), self.rep.mul(&o.rep))
    }

    pub fn is_one(&self) -> bool {
        self.rep.c == [1]
    }

    pub fn pow(&self, e: u128) -> Self {
        let mut base = self.clone();
        let mut acc = Self::from_int(self.modulus.clone(), 1);
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

/// Roots of a polynomial in F_ℓ (ℓ odd or 2), by brute force for tiny ℓ and via factoring otherwise.
pub fn roots_mod(poly: &[i64], ell: u64) -> Vec<u64> {
    if ell < 64 {
        let f = FpPoly::from_ints(ell, poly);
        return (0..ell).filter(|&x| f.eval(x) == 0).collect();
    }
    let fac = factor_poly_mod_l(poly, ell).expect("prime");
    let mut r: Vec<u64> = fac.factors.iter().filter(|(f, _)| f.deg() == 1).map(|(f, _)| (ell - f.c[0]) % ell).collect();
    r.sort_unstable();
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn phi3_mod_7_and_5() {
        let f = factor_poly_mod_l(&[1, 1, 1], 7).unwrap();
        let fs: Vec<Vec<u64>> = f.factors.iter().map(|(p, _)| p.c.clone()).collect();
        // x − 2 = x + 5, x − 4 = x + 3
        assert_eq!(fs, vec![vec![3, 1], vec![5, 1]]);
        let g = factor_poly_mod_l(&[1, 1, 1], 5).unwrap();
        assert_eq!(g.factors.len(), 1);
        assert_eq!(g.factors[0].0.deg(), 2);
        let h = factor_poly_mod_l(&[-1, 0, 1], 3).unwrap();
        assert_eq!(h.factors.len(), 2);
        assert!(factor_poly_mod_l(&[1, 1], 9).is_err());
    }

    #[test]
    fn phi9_splitting_types() {
        // f(ℓ) = ord of ℓ mod 9.
        for (ell, f) in [(2u64, 6usize), (19, 1), (7, 3), (17, 2), (37, 1), (5, 6), (10007, 2)] {
            let fac = factor_poly_mod_l(&[1, 0, 0, 1, 0, 0, 1], ell).unwrap();
            assert!(fac.factors.iter().all(|(g, e)| g.deg() as usize == f && *e == 1), "ℓ={ell}");
        }
    }

    #[test]
    fn repeated_factors() {
        // (x+1)^3 (x^2+1) mod 3
        let a = FpPoly::from_ints(3, &[1, 1]);
        let b = FpPoly::from_ints(3, &[1, 0, 1]);
        let p = a.mul(&a).mul(&a).mul(&b);
        let c: Vec<i64> = p.c.iter().map(|&x| x as i64).collect();
        let f = factor_poly_mod_l(&c, 3).unwrap();
        assert_eq!(f.factors, vec![(a.clone(), 3), (b, 1)]);
    }

    proptest! {
        #[test]
        fn product_reproduces(coeffs in prop::collection::vec(-20i64..20, 2..9),
                              ell in prop::sample::select(vec![2u64, 3, 5, 7, 11, 13, 101, 1009])) {
            let f = FpPoly::from_ints(ell, &coeffs);
            prop_assume!(f.deg() >= 1);
            let fac = factor_poly_mod_l(&coeffs, ell).unwrap();
            prop_assert_eq!(fac.product(), f);
            for (g, _) in &fac.factors {
                // irreducible: no proper factor of lower degree via x^{ℓ^k} − x gcds
                let x = FpPoly::x(ell);
                let mut h = x.clone();
                for _ in 1..=g.deg() / 2 {
                    h = h.powmod(ell, g);
                    prop_assert_eq!(h.sub(&x).gcd(g).deg(), 0);
                }
            }
        }
    }
}
