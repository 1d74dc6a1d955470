//! Dirichlet characters stored by generator images.

use serde::{Deserialize, Serialize};

use super::RepsError;
use crate::exact::arith::{carmichael, divisors, factor, gcd, invmod, lcm, primitive_root};
use crate::exact::CyclotomicNumber;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum GenKind {
    Odd,
    MinusOne,
    Five,
}

/// A generator of one cyclic factor of (Z/q)^*.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Gen {
    kind: GenKind,
    /// modulus of the prime-power component
    pe: u64,
    /// generator of the component (mod pe)
    g: u64,
    ord: u64,
}

fn structure(q: u64) -> Vec<Gen> {
    let mut out = Vec::new();
    for (p, e) in factor(q) {
        let pe = p.pow(e);
        if p == 2 {
            if e >= 2 {
                out.push(Gen { kind: GenKind::MinusOne, pe, g: pe - 1, ord: 2 });
            }
            if e >= 3 {
                out.push(Gen { kind: GenKind::Five, pe, g: 5, ord: pe / 4 });
            }
        } else {
            out.push(Gen { kind: GenKind::Odd, pe, g: primitive_root(p, e), ord: pe / p * (p - 1) });
        }
    }
    out
}

fn dlog(base: u64, a: u64, m: u64, ord: u64) -> u64 {
    let mut x = 1 % m;
    for k in 0..ord {
        if x == a % m {
            return k;
        }
        x = x * base % m;
    }
    unreachable!("element in cyclic group")
}

impl Gen {
    fn log(&self, a: u64) -> u64 {
        let a = a % self.pe;
        match self.kind {
            GenKind::Odd => dlog(self.g, a, self.pe, self.ord),
            GenKind::MinusOne => u64::from(a % 4 == 3),
            GenKind::Five => {
                let b = if a % 4 == 3 { self.pe - a } else { a };
                dlog(5, b, self.pe, self.ord)
            }
        }
    }
    /// Global residue mod q that is g on this component and 1 elsewhere.
    fn lift(&self, q: u64) -> u64 {
        let rest = q / self.pe;
        // x ≡ g mod pe, x ≡ 1 mod rest
        let t = (self.g + self.pe - 1 % self.pe) % self.pe * invmod(rest % self.pe, self.pe).unwrap_or(0) % self.pe;
        (1 + rest * t) % q
    }
}

/// χ mod q with χ(gen_i) = ζ_{ord_i}^{exps_i} on the standard generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DirichletChar {
    pub modulus: u64,
    pub exps: Vec<u64>,
}

impl DirichletChar {
    pub fn new(modulus: u64, exps: Vec<u64>) -> Result<Self, RepsError> {
        let st = structure(modulus);
        if st.len() != exps.len() || st.iter().zip(&exps).any(|(g, &e)| e >= g.ord) {
            return Err(RepsError::BadCharacter(format!("mod {modulus}: {exps:?}")));
        }
        Ok(Self { modulus, exps })
    }

    pub fn trivial(modulus: u64) -> Self {
        Self { modulus, exps: vec![0; structure(modulus).len()] }
    }

    /// All characters mod q.
    pub fn all(modulus: u64) -> Vec<Self> {
        let st = structure(modulus);
        let mut out = vec![vec![]];
        for g in &st {
            out = out
                .into_iter()
                .flat_map(|v: Vec<u64>| (0..g.ord).map(move |e| [v.clone(), vec![e]].concat()))
                .collect();
        }
        out.into_iter().map(|exps| Self { modulus, exps }).collect()
    }

    /// Generator orders of (Z/q)^*.
    pub fn generator_orders(&self) -> Vec<u64> {
        structure(self.modulus).iter().map(|g| g.ord).collect()
    }

    /// Exponent of (Z/q)^*; values are powers of ζ_λ.
    pub fn lambda(&self) -> u64 {
        carmichael(self.modulus).max(1)
    }

    pub fn order(&self) -> u64 {
        structure(self.modulus).iter().zip(&self.exps).fold(1, |acc, (g, &e)| lcm(acc, g.ord / gcd(g.ord, e)))
    }

    /// χ(a) = ζ_λ^k, or None when gcd(a, q) > 1.
    pub fn exponent(&self, a: i64) -> Option<u64> {
        let q = self.modulus;
        let a = a.rem_euclid(q as i64) as u64;
        if gcd(a, q) != 1 {
            return None;
        }
        let lam = self.lambda();
        Some(
            structure(q)
                .iter()
                .zip(&self.exps)
                .fold(0, |acc, (g, &e)| (acc + g.log(a) * e % g.ord * (lam / g.ord)) % lam),
        )
    }

    /// χ(a) = ζ_M^k for a modulus M divisible by the order.
    pub fn exponent_in(&self, a: i64, m: u64) -> Option<u64> {
        assert_eq!(m % self.order(), 0, "order must divide M");
        let lam = self.lambda();
        let g = gcd(lam, m);
        self.exponent(a).map(|k| {
            // ζ_λ^k has order dividing gcd(λ, M)
            debug_assert_eq!(k % (lam / g), 0);
            (k / (lam / g)) * (m / g) % m
        })
    }

    pub fn value(&self, a: i64) -> Option<CyclotomicNumber> {
        let o = self.order();
        self.exponent_in(a, o).map(|k| CyclotomicNumber::root_of_unity(o, k as i64))
    }

    pub fn pow(&self, a: i64) -> Self {
        let exps = structure(self.modulus)
            .iter()
            .zip(&self.exps)
            .map(|(g, &e)| (e as i128 * a as i128).rem_euclid(g.ord as i128) as u64)
            .collect();
        Self { modulus: self.modulus, exps }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.modulus, o.modulus);
        let exps = structure(self.modulus)
            .iter()
            .zip(self.exps.iter().zip(&o.exps))
            .map(|(g, (a, b))| (a + b) % g.ord)
            .collect();
        Self { modulus: self.modulus, exps }
    }

    pub fn conj(&self) -> Self {
        self.pow(-1)
    }

    pub fn is_trivial(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn is_even(&self) -> bool {
        self.exponent(-1) == Some(0)
    }

    pub fn conductor(&self) -> u64 {
        let q = self.modulus;
        for d in divisors(q) {
            let ok =
                (0..q / d).map(|t| 1 + d * t).filter(|&a| gcd(a, q) == 1).all(|a| self.exponent(a as i64) == Some(0));
            if ok {
                return d;
            }
        }
        q
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.modulus
    }

    /// The primitive character inducing χ.
    pub fn primitive(&self) -> Self {
        let d = self.conductor();
        let q = self.modulus;
        let lam_q = self.lambda();
        let exps = structure(d)
            .iter()
            .map(|g| {
                let mut a = g.lift(d);
                while gcd(a, q) != 1 {
                    a += d;
                }
                let k = self.exponent(a as i64).unwrap();
                // ζ_{λ_q}^k = ζ_{ord}^{k·ord/λ_q}
                k * g.ord / lam_q % g.ord
            })
            .collect();
        Self { modulus: d, exps }
    }

    /// Same character viewed modulo a multiple of the modulus.
    pub fn lift_to(&self, q: u64) -> Self {
        assert_eq!(q % self.modulus, 0);
        let lam = self.lambda();
        let exps = structure(q)
            .iter()
            .map(|g| {
                let a = g.lift(q);
                match self.exponent(a as i64) {
                    Some(k) => k * g.ord / lam % g.ord,
                    None => 0,
                }
            })
            .collect();
        Self { modulus: q, exps }
    }

    /// Exponent table k(a) with χ(a) = ζ_M^k, None at non-units.
    pub fn table(&self, m: u64) -> Vec<Option<u64>> {
        (0..self.modulus).map(|a| self.exponent_in(a as i64, m)).collect()
    }
}

/// Generator of the cyclic character group mod p^k (p odd): χ(g) = ζ_{φ(p^k)}.
pub fn generator_char(p: u64, k: u32) -> DirichletChar {
    let q = p.pow(k);
    if k == 0 {
        return DirichletChar::trivial(1);
    }
    DirichletChar { modulus: q, exps: vec![1] }
}

pub fn check_character_relation(chi: &DirichletChar, a: u64, b: u64) -> bool {
    let q = chi.modulus;
    match (chi.exponent(a as i64), chi.exponent(b as i64), chi.exponent((a * b % q) as i64)) {
        (Some(x), Some(y), Some(z)) => (x + y) % chi.lambda() == z,
        _ => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_moduli() {
        assert_eq!(DirichletChar::all(3).len(), 2);
        assert_eq!(DirichletChar::all(8).len(), 4);
        assert_eq!(DirichletChar::all(36).len(), 12);
        let chi4 = DirichletChar::new(4, vec![1]).unwrap();
        assert_eq!(chi4.exponent(3), Some(1));
        assert!(!chi4.is_even());
        assert_eq!(chi4.conductor(), 4);
        // order-3 character mod 9 with φ(2) = ζ₃
        let phi = DirichletChar::new(9, vec![2]).unwrap();
        assert_eq!(phi.order(), 3);
        assert_eq!(phi.exponent_in(2, 3), Some(1));
        // 25 ≡ 7 = 2^4 mod 9, so φ(25) = ζ₃^4 = ζ₃
        assert_eq!(phi.exponent_in(25, 3), Some(1));
        assert_eq!(phi.conductor(), 9);
        assert_eq!(phi.pow(2).exponent_in(2, 3), Some(2));
    }

    #[test]
    fn primitive_of_induced() {
        let chi3 = DirichletChar::new(3, vec![1]).unwrap();
        let lifted = chi3.lift_to(36);
        assert_eq!(lifted.conductor(), 3);
        assert_eq!(lifted.primitive(), chi3);
        for a in 1..36i64 {
            if gcd(a as u64, 36) == 1 {
                assert_eq!(lifted.exponent_in(a, 2), chi3.exponent_in(a, 2));
            }
        }
    }

    proptest! {
        #[test]
        fn multiplicative(q in 2u64..=60, idx in 0usize..1000, a in 1u64..500, b in 1u64..500) {
            let all = DirichletChar::all(q);
            let chi = &all[idx % all.len()];
            prop_assert!(check_character_relation(chi, a, b));
            prop_assert_eq!(chi.pow(chi.order() as i64).is_trivial(), true);
            prop_assert_eq!(chi.primitive().lift_to(q), chi.clone());
        }
    }
}
