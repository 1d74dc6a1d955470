//! Frobenius traces and Dirichlet coefficients.

use std::collections::HashMap;

use super::curve::EllipticCurveModel;
use super::EllError;
use crate::exact::arith::{invmod, is_prime, isqrt, jacobi, mulmod, primes_up_to, spf_table, sqrt_mod};

/// Below this bound traces are counted by enumeration.
pub const NAIVE_LIMIT: u64 = 2000;

/// a_ℓ = ℓ + 1 − #E(F_ℓ) for a good prime ℓ.
pub fn count_ap(e: &EllipticCurveModel, ell: u64) -> Result<i64, EllError> {
    if !is_prime(ell) {
        return Err(EllError::NotPrime(ell));
    }
    if e.conductor % ell == 0 {
        return Err(EllError::BadPrime(ell));
    }
    Ok(if ell < NAIVE_LIMIT { count_ap_naive(e, ell) } else { count_ap_bsgs(e, ell) })
}

/// Enumeration over x with a quadratic-residue table.
pub fn count_ap_naive(e: &EllipticCurveModel, ell: u64) -> i64 {
    if ell == 2 {
        let [a1, a2, a3, a4, a6] = e.a.map(|v| v.rem_euclid(2));
        let mut pts = 1i64;
        for x in 0..2 {
            for y in 0..2 {
                if (y * y + a1 * x * y + a3 * y - x * x * x - a2 * x * x - a4 * x - a6).rem_euclid(2) == 0 {
                    pts += 1;
                }
            }
        }
        return 3 - pts;
    }
    let l = ell as i128;
    let (b2, b4, b6) = e.b_invariants();
    let (b2, b4, b6) = (b2.rem_euclid(l) as u64, b4.rem_euclid(l) as u64, b6.rem_euclid(l) as u64);
    let mut chi = vec![-1i8; ell as usize];
    chi[0] = 0;
    for x in 1..=(ell / 2) {
        chi[mulmod(x, x, ell) as usize] = 1;
    }
    let mut s = 0i64;
    for x in 0..ell {
        // 4x³ + b2x² + 2b4x + b6
        let f = ((4 * x % ell + b2) % ell * x % ell + 2 * b4 % ell) % ell * x % ell;
        let f = (f + b6) % ell;
        s += chi[f as usize] as i64;
    }
    -s
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Pt {
    Inf,
    A(u64, u64),
}

struct Short {
    a: u64,
    p: u64,
}

impl Short {
    fn add(&self, u: Pt, v: Pt) -> Pt {
        let p = self.p;
        match (u, v) {
            (Pt::Inf, q) | (q, Pt::Inf) => q,
            (Pt::A(x1, y1), Pt::A(x2, y2)) => {
                let lam = if x1 == x2 {
                    if (y1 + y2) % p == 0 {
                        return Pt::Inf;
                    }
                    let num = (3 * mulmod(x1, x1, p) + self.a) % p;
                    mulmod(num, invmod(2 * y1 % p, p).unwrap(), p)
                } else {
                    mulmod((y2 + p - y1) % p, invmod((x2 + p - x1) % p, p).unwrap(), p)
                };
                let x3 = (mulmod(lam, lam, p) + 2 * p - x1 - x2) % p;
                let y3 = (mulmod(lam, (x1 + p - x3) % p, p) + p - y1) % p;
                Pt::A(x3, y3)
            }
        }
    }
    fn mul(&self, mut k: u64, q: Pt) -> Pt {
        let mut r = Pt::Inf;
        let mut b = q;
        while k > 0 {
            if k & 1 == 1 {
                r = self.add(r, b);
            }
            b = self.add(b, b);
            k >>= 1;
        }
        r
    }

    /// All k in [lo, hi] with kP = O.
    fn multiples(&self, pt: Pt, lo: u64, hi: u64) -> Vec<u64> {
        let m = isqrt(hi - lo + 1) + 1;
        let mut baby: HashMap<u64, Vec<(u64, u64)>> = HashMap::new();
        let mut q = Pt::Inf;
        for j in 1..=m {
            q = self.add(q, pt);
            match q {
                Pt::Inf => {
                    // order j ≤ m
                    return (lo.div_ceil(j) * j..=hi).step_by(j as usize).collect();
                }
                Pt::A(x, y) => baby.entry(x).or_default().push((j, y)),
            }
        }
        let step = self.mul(2 * m + 1, pt);
        let mut r = self.mul(lo + m, pt);
        let mut out = Vec::new();
        let mut centre = lo + m;
        while centre - m <= hi {
            match r {
                Pt::Inf => out.push(centre),
                Pt::A(x, y) => {
                    if let Some(js) = baby.get(&x) {
                        for &(j, yj) in js {
                            if yj == y {
                                out.push(centre - j);
                            }
                            if (yj + y) % self.p == 0 {
                                out.push(centre + j);
                            }
                        }
                    }
                }
            }
            r = self.add(r, step);
            centre += 2 * m + 1;
        }
        out.retain(|&k| k >= lo && k <= hi);
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Baby-step giant-step on the curve and its quadratic twist (ℓ > 3).
pub fn count_ap_bsgs(e: &EllipticCurveModel, ell: u64) -> i64 {
    assert!(ell > 3);
    let p = ell;
    let w = e.weierstrass();
    let red = |x: num_bigint::BigInt| -> u64 {
        use num_integer::Integer;
        use num_traits::ToPrimitive;
        x.mod_floor(&num_bigint::BigInt::from(p)).to_u64().unwrap()
    };
    let a = mulmod(p - 27 % p, red(w.c4()), p);
    let b = mulmod(p - 54 % p, red(w.c6()), p);
    let d = (2..p).find(|&d| jacobi(d as i64, p) == -1).unwrap();
    let d2 = mulmod(d, d, p);
    let curves = [(a, b), (mulmod(a, d2, p), mulmod(b, mulmod(d2, d, p), p))];
    let hw = isqrt(4 * p);
    let (lo, hi) = (p + 1 - hw, p + 1 + hw);
    let mut cands: Option<Vec<i64>> = None;
    let mut seed = p.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
    for iter in 0..400 {
        let tw = iter % 2;
        let (ca, cb) = curves[tw];
        let curve = Short { a: ca, p };
        let pt = loop {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            let x = seed % p;
            let rhs = (mulmod(mulmod(x, x, p), x, p) + mulmod(ca, x, p) + cb) % p;
            if let Some(y) = sqrt_mod(rhs, p) {
                break Pt::A(x, y);
            }
        };
        let ks = curve.multiples(pt, lo, hi);
        let avals: Vec<i64> =
            ks.iter().map(|&k| if tw == 0 { p as i64 + 1 - k as i64 } else { k as i64 - p as i64 - 1 }).collect();
        let next: Vec<i64> = match cands {
            None => avals,
            Some(c) => c.into_iter().filter(|x| avals.contains(x)).collect(),
        };
        if next.len() == 1 {
            return next[0];
        }
        cands = Some(next);
    }
    count_ap_naive(e, ell)
}

/// Power sum s_f of the Frobenius eigenvalues over the degree-f extension.
pub fn frobenius_trace_extension(a: i64, ell: u64, f: u32) -> Result<i128, EllError> {
    if (a as i128) * (a as i128) > 4 * ell as i128 {
        return Err(EllError::HasseViolation { a, ell });
    }
    let (a, l) = (a as i128, ell as i128);
    let (mut s0, mut s1) = (2i128, a);
    if f == 0 {
        return Ok(2);
    }
    for _ in 1..f {
        let s2 = a * s1 - l * s0;
        s0 = s1;
        s1 = s2;
    }
    Ok(s1)
}

/// Traces a_ℓ for all primes ℓ ≤ bound; bad primes carry the inertia-invariant trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApTable {
    pub primes: Vec<u64>,
    pub ap: Vec<i64>,
}

impl ApTable {
    pub fn compute(e: &EllipticCurveModel, bound: u64) -> Self {
        Self::extend(e, Self { primes: vec![], ap: vec![] }, bound)
    }

    /// Keep the known prefix, compute the rest.
    pub fn extend(e: &EllipticCurveModel, known: Self, bound: u64) -> Self {
        let mut primes = Vec::new();
        let mut ap = Vec::new();
        for ell in primes_up_to(bound) {
            let a = match known.get(ell) {
                Some(a) => a,
                None if e.conductor % ell == 0 => e.reduction(ell).bad_trace(),
                None => count_ap(e, ell).unwrap(),
            };
            primes.push(ell);
            ap.push(a);
        }
        Self { primes, ap }
    }

    pub fn bound(&self) -> u64 {
        self.primes.last().copied().unwrap_or(1)
    }

    pub fn get(&self, ell: u64) -> Option<i64> {
        self.primes.binary_search(&ell).ok().map(|i| self.ap[i])
    }
}

/// Expand an Euler product: `prime_power(ℓ, k, a)` gives the coefficient at ℓ^k from
/// the table `a` of earlier values. Returns a[0..=n] with a[0] = 0.
pub fn expand_multiplicative<T: Clone, Z: Fn() -> T, M: Fn(&T, &T) -> T>(
    n: usize,
    zero: Z,
    one: T,
    mul: M,
    prime_power: impl Fn(u64, u32, &[T]) -> T,
) -> Vec<T> {
    let spf = spf_table(n);
    let mut a = vec![zero(); n + 1];
    if n >= 1 {
        a[1] = one;
    }
    for i in 2..=n {
        let p = spf[i] as usize;
        let mut pe = p;
        let mut k = 1u32;
        while (i / pe) % p == 0 {
            pe *= p;
            k += 1;
        }
        a[i] = if pe == i { prime_power(p as u64, k, &a) } else { mul(&a[pe], &a[i / pe]) };
    }
    a
}

/// a_1..a_n of L(E, s) (index 0 unused).
pub fn dirichlet_coeffs_e(e: &EllipticCurveModel, n: usize) -> Vec<i64> {
    coeffs_from_table(e, &ApTable::compute(e, n as u64), n)
}

pub fn coeffs_from_table(e: &EllipticCurveModel, t: &ApTable, n: usize) -> Vec<i64> {
    expand_multiplicative(
        n,
        || 0i64,
        1,
        |x, y| x * y,
        |p, k, a| {
            let ap = t.get(p).expect("table covers cutoff");
            let pk = p.pow(k) as usize;
            if e.conductor % p == 0 {
                ap * a[pk / p as usize]
            } else if k == 1 {
                ap
            } else {
                ap * a[pk / p as usize] - p as i64 * a[pk / (p * p) as usize]
            }
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::arith::gcd;
    use proptest::prelude::*;

    fn e11() -> EllipticCurveModel {
        EllipticCurveModel::new([0, -1, 1, -10, -20]).unwrap()
    }

    /// Brute-force affine point count on the long Weierstrass form.
    fn brute(e: &EllipticCurveModel, p: u64) -> i64 {
        let [a1, a2, a3, a4, a6] = e.a.map(|v| v.rem_euclid(p as i64));
        let mut n = 1i64;
        for x in 0..p as i64 {
            for y in 0..p as i64 {
                let v = y * y + a1 * x * y + a3 * y - x * x * x - a2 * x * x - a4 * x - a6;
                if v.rem_euclid(p as i64) == 0 {
                    n += 1;
                }
            }
        }
        p as i64 + 1 - n
    }

    #[test]
    fn small_traces() {
        let e = e11();
        assert_eq!(count_ap(&e, 2).unwrap(), -2);
        assert_eq!(count_ap(&e, 3).unwrap(), -1);
        assert_eq!(count_ap(&e, 5).unwrap(), 1);
        assert_eq!(count_ap(&e, 7).unwrap(), -2);
        assert!(matches!(count_ap(&e, 11), Err(EllError::BadPrime(11))));
        for p in [2u64, 3, 5, 7, 13, 17, 19, 23, 29, 31] {
            assert_eq!(count_ap_naive(&e, p), brute(&e, p));
        }
    }

    #[test]
    fn bsgs_matches_naive() {
        for a in [[0, -1, 1, -10, -20], [0, 0, 1, -1, 0], [1, 0, 1, 4, -6]] {
            let e = EllipticCurveModel::new(a).unwrap();
            for p in primes_up_to(6000).into_iter().filter(|&p| p > 200 && e.conductor % p != 0).step_by(7) {
                assert_eq!(count_ap_bsgs(&e, p), count_ap_naive(&e, p), "{a:?} p={p}");
            }
        }
    }

    #[test]
    fn trace_extension() {
        assert_eq!(frobenius_trace_extension(1, 5, 2).unwrap(), -9);
        assert_eq!(frobenius_trace_extension(-2, 2, 2).unwrap(), 0);
        assert_eq!(frobenius_trace_extension(3, 7, 1).unwrap(), 3);
        assert!(frobenius_trace_extension(5, 5, 2).is_err());
        // s_2 = a² − 2ℓ
        let e = e11();
        let a = count_ap(&e, 3).unwrap();
        assert_eq!(frobenius_trace_extension(a, 3, 2).unwrap(), a as i128 * a as i128 - 6);
    }

    #[test]
    fn coefficients_11a1() {
        let a = dirichlet_coeffs_e(&e11(), 12);
        assert_eq!(&a[1..=5], &[1, -2, -1, 2, 1]);
        assert_eq!(a[6], 2);
        assert_eq!(a[11], 1);
        assert_eq!(dirichlet_coeffs_e(&e11(), 1)[1], 1);
    }

    #[test]
    fn hasse_and_multiplicativity() {
        let e = EllipticCurveModel::new([0, 0, 1, -1, 0]).unwrap();
        let n = 10_000usize;
        let t = ApTable::compute(&e, n as u64);
        for (&p, &ap) in t.primes.iter().zip(&t.ap) {
            assert!((ap * ap) as u64 <= 4 * p);
        }
        let a = coeffs_from_table(&e, &t, n);
        for m in 1..=100 {
            for k in 1..=n / m {
                if gcd(m as u64, k as u64) == 1 {
                    assert_eq!(a[m * k], a[m] * a[k]);
                }
            }
        }
        for &p in t.primes.iter().take_while(|&&p| p * p * p <= n as u64) {
            if e.conductor % p == 0 {
                continue;
            }
            let p = p as usize;
            let mut pk = p;
            while pk * p <= n {
                assert_eq!(a[pk * p], a[p] * a[pk] - p as i64 * a[pk / p]);
                pk *= p;
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn bsgs_random_curves(a4 in -50i64..50, a6 in -50i64..50, idx in 0usize..200) {
            prop_assume!(4 * a4.pow(3) + 27 * a6 * a6 != 0);
            let e = match EllipticCurveModel::new([0, 0, 0, a4, a6]) { Ok(e) => e, Err(_) => return Ok(()) };
            let ps = primes_up_to(20_000);
            let p = ps[ps.len() - 1 - idx];
            prop_assume!(e.conductor % p != 0);
            prop_assert_eq!(count_ap_bsgs(&e, p), count_ap_naive(&e, p));
        }
    }
}
