//! Elements of Q(μ_M) on the power basis 1, ζ_M, …, ζ_M^{φ(M)−1}.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::arith::{divisors, euler_phi, gcd, lcm};
use super::ExactError;
use crate::real::{Cx, Real};

/// Integer coefficients of Φ_M, low degree first.
pub fn cyclotomic_poly(m: u64) -> Vec<i64> {
    // Φ_M = Π_{d|M} (x^d − 1)^{μ(M/d)}.
    let mut num = vec![1i64];
    let mut den = vec![1i64];
    for d in divisors(m) {
        let mu = moebius(m / d);
        if mu == 0 {
            continue;
        }
        let mut f = vec![0i64; d as usize + 1];
        f[0] = -1;
        f[d as usize] = 1;
        let target = if mu == 1 { &mut num } else { &mut den };
        let mut prod = vec![0i64; target.len() + d as usize];
        for (i, &a) in target.iter().enumerate() {
            for (j, &b) in f.iter().enumerate() {
                prod[i + j] += a * b;
            }
        }
        *target = prod;
    }
    exact_div(&num, &den)
}

fn moebius(n: u64) -> i32 {
    let f = super::arith::factor(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

fn exact_div(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let da = a.len() - 1;
    let mut q = vec![0i64; da - db + 1];
    for i in (0..=da - db).rev() {
        let c = r[i + db] / b[db];
        q[i] = c;
        for j in 0..=db {
            r[i + j] -= c * b[j];
        }
    }
    debug_assert!(r.iter().all(|&x| x == 0));
    q
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CyclotomicNumber {
    modulus: u64,
    coeffs: Vec<BigRational>,
}

impl CyclotomicNumber {
    pub fn zero(m: u64) -> Self {
        CyclotomicNumber { modulus: m, coeffs: vec![BigRational::zero(); euler_phi(m) as usize] }
    }

    pub fn from_rational(m: u64, r: BigRational) -> Self {
        let mut c = Self::zero(m);
        c.coeffs[0] = r;
        c
    }

    pub fn from_int(m: u64, k: i64) -> Self {
        Self::from_rational(m, BigRational::from_integer(k.into()))
    }

    /// Build from power-basis coordinates; errors if the length is not φ(M).
    pub fn from_coeffs(m: u64, coeffs: Vec<BigRational>) -> Result<Self, ExactError> {
        if coeffs.len() as u64 != euler_phi(m) {
            return Err(ExactError::BadLength);
        }
        Ok(CyclotomicNumber { modulus: m, coeffs })
    }

    /// Σ_e c_e ζ_M^e for arbitrary exponents (reduced mod Φ_M).
    pub fn from_exponent_sum(m: u64, terms: &[BigRational]) -> Self {
        assert_eq!(terms.len() as u64, m);
        reduce(m, terms.to_vec())
    }

    /// ζ_M^e.
    pub fn root_of_unity(m: u64, e: i64) -> Self {
        let mut t = vec![BigRational::zero(); m as usize];
        t[e.rem_euclid(m as i64) as usize] = BigRational::one();
        reduce(m, t)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.iter().skip(1).all(|c| c.is_zero())
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        self.is_rational().then(|| self.coeffs[0].clone())
    }

    /// max(|num|, |den|) over all coordinates.
    pub fn height(&self) -> BigInt {
        self.coeffs.iter().map(|c| c.numer().abs().max(c.denom().abs())).max().unwrap_or_else(BigInt::one)
    }

    /// Re-express in Q(μ_L) for a multiple L of M.
    pub fn lift(&self, l: u64) -> Self {
        assert!(l % self.modulus == 0);
        if l == self.modulus {
            return self.clone();
        }
        let step = (l / self.modulus) as usize;
        let mut t = vec![BigRational::zero(); l as usize];
        for (j, c) in self.coeffs.iter().enumerate() {
            t[j * step] += c;
        }
        reduce(l, t)
    }

    /// Image under ζ_M ↦ ζ_M^a.
    pub fn galois_apply(&self, a: i64) -> Result<Self, ExactError> {
        let m = self.modulus as i64;
        let ar = a.rem_euclid(m) as u64;
        if gcd(ar, self.modulus) != 1 && self.modulus > 1 {
            return Err(ExactError::NotCoprime);
        }
        let mut t = vec![BigRational::zero(); self.modulus as usize];
        for (j, c) in self.coeffs.iter().enumerate() {
            let e = ((j as u64 * ar) % self.modulus) as usize;
            t[e] += c;
        }
        Ok(reduce(self.modulus, t))
    }

    pub fn conj(&self) -> Self {
        self.galois_apply(-1).expect("−1 is a unit")
    }

    /// Complex value at the embedding ζ_M = e^{2πi/M}.
    pub fn value<T: Real>(&self, prec: u32) -> Cx<T> {
        let mut acc = Cx::<T>::zero(prec);
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let z = Cx::<T>::root_of_unity(j as i64, self.modulus, prec);
            acc += &z.scale(&T::from_ratio(c, prec));
        }
        acc
    }

    fn common(&self, other: &Self) -> (Self, Self) {
        let l = lcm(self.modulus, other.modulus);
        (self.lift(l), other.lift(l))
    }

    /// Multiply by a rational.
    pub fn scale(&self, r: &BigRational) -> Self {
        CyclotomicNumber { modulus: self.modulus, coeffs: self.coeffs.iter().map(|c| c * r).collect() }
    }

    /// Equality as complex numbers, across different moduli.
    pub fn same_value(&self, other: &Self) -> bool {
        let (a, b) = self.common(other);
        a.coeffs == b.coeffs
    }

    /// Smallest modulus M' | M (up to the 2 mod 4 ambiguity) whose field contains the value.
    pub fn minimal_modulus(&self) -> u64 {
        for d in divisors(self.modulus) {
            if d % 4 == 2 {
                continue;
            }
            if let Some(c) = self.descend(d) {
                return c.modulus;
            }
        }
        self.modulus
    }

    /// Express in Q(μ_d) if the value lies there.
    pub fn descend(&self, d: u64) -> Option<Self> {
        if self.modulus % d != 0 {
            return None;
        }
        // Fixed by every σ_a with a ≡ 1 mod d.
        let m = self.modulus;
        for a in 1..m {
            if a % d == 1 % d && gcd(a, m) == 1 && self.galois_apply(a as i64).ok()? != *self {
                return None;
            }
        }
        // Solve for coordinates in Q(μ_d) by matching the lift.
        let phi_d = euler_phi(d) as usize;
        let basis: Vec<Self> = (0..phi_d).map(|j| Self::root_of_unity(d, j as i64).lift(m)).collect();
        let sol = solve_in_span(&basis, self)?;
        Some(CyclotomicNumber { modulus: d, coeffs: sol })
    }

    /// "num/den" strings, one per coordinate.
    pub fn coeff_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| format!("{}/{}", c.numer(), c.denom())).collect()
    }

    pub fn parse_coeff_strings(m: u64, s: &[String]) -> Result<Self, ExactError> {
        let coeffs = s
            .iter()
            .map(|x| {
                let (n, d) = x.split_once('/').unwrap_or((x.as_str(), "1"));
                let n: BigInt = n.trim().parse().map_err(|_| ExactError::Parse)?;
                let d: BigInt = d.trim().parse().map_err(|_| ExactError::Parse)?;
                if d.is_zero() {
                    return Err(ExactError::Parse);
                }
                Ok(BigRational::new(n, d))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_coeffs(m, coeffs)
    }
}

fn solve_in_span(basis: &[CyclotomicNumber], target: &CyclotomicNumber) -> Option<Vec<BigRational>> {
    // Gaussian elimination on the coordinate matrix (columns = basis vectors).
    let rows = target.coeffs.len();
    let cols = basis.len();
    let mut a: Vec<Vec<BigRational>> = (0..rows)
        .map(|r| {
            let mut row: Vec<BigRational> = basis.iter().map(|b| b.coeffs[r].clone()).collect();
            row.push(target.coeffs[r].clone());
            row
        })
        .collect();
    let mut piv_cols = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = BigRational::one() / &a[r][c];
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..=cols {
                    let v = &a[r][j] * &f;
                    a[i][j] -= v;
                }
            }
        }
        piv_cols.push(c);
        r += 1;
    }
    if a[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut sol = vec![BigRational::zero(); cols];
    for (i, &c) in piv_cols.iter().enumerate() {
        sol[c] = a[i][cols].clone();
    }
    Some(sol)
}

/// Reduce Σ t_e x^e (e < M) modulo Φ_M.
fn reduce(m: u64, mut t: Vec<BigRational>) -> CyclotomicNumber {
    let phi = cyclotomic_poly(m);
    let deg = phi.len() - 1;
    for i in (deg..t.len()).rev() {
        if t[i].is_zero() {
            continue;
        }
        let c = std::mem::replace(&mut t[i], BigRational::zero());
        for (j, &pj) in phi.iter().enumerate().take(deg) {
            if pj != 0 {
                let v = &c * BigRational::from_integer(pj.into());
                t[i - deg + j] -= v;
            }
        }
    }
    t.truncate(deg);
    t.resize(deg, BigRational::zero());
    CyclotomicNumber { modulus: m, coeffs: t }
}

impl Add for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn add(self, o: &CyclotomicNumber) -> CyclotomicNumber {
        let (a, b) = self.common(o);
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect();
        CyclotomicNumber { modulus: a.modulus, coeffs }
    }
}

impl Sub for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn sub(self, o: &CyclotomicNumber) -> CyclotomicNumber {
        let (a, b) = self.common(o);
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect();
        CyclotomicNumber { modulus: a.modulus, coeffs }
    }
}

impl Neg for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn neg(self) -> CyclotomicNumber {
        CyclotomicNumber { modulus: self.modulus, coeffs: self.coeffs.iter().map(|x| -x).collect() }
    }
}

impl Mul for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn mul(self, o: &CyclotomicNumber) -> CyclotomicNumber {
        let (a, b) = self.common(o);
        let m = a.modulus as usize;
        let mut t = vec![BigRational::zero(); m];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    t[(i + j) % m] += x * y;
                }
            }
        }
        reduce(a.modulus, t)
    }
}

impl fmt::Debug for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let cs = if c.denom().is_one() { c.numer().to_string() } else { format!("{}/{}", c.numer(), c.denom()) };
            parts.push(match j {
                0 => cs,
                1 => format!("{cs}*z{}", self.modulus),
                _ => format!("{cs}*z{}^{j}", self.modulus),
            });
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Exact integer-cyclotomic accumulator in Z[x]/(x^M − 1); cheap to multiply.
pub fn cyclic_mul(a: &[i64], b: &[i64], out: &mut [i64]) {
    let m = a.len();
    out.iter_mut().for_each(|x| *x = 0);
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if y != 0 {
                out[(i + j) % m] += x * y;
            }
        }
    }
}

/// Convert an element of Z[x]/(x^M − 1) into a `CyclotomicNumber`.
pub fn from_cyclic(a: &[i64]) -> CyclotomicNumber {
    let t: Vec<BigRational> = a.iter().map(|&x| BigRational::from_integer(x.into())).collect();
    reduce(a.len() as u64, t)
}

/// Rational from i64 pair, reduced.
pub fn ratio(n: i64, d: i64) -> BigRational {
    let g = n.gcd(&d).max(1);
    BigRational::new((n / g).into(), (d / g).into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn cyclotomic_polys() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(3), vec![1, 1, 1]);
        assert_eq!(cyclotomic_poly(9), vec![1, 0, 0, 1, 0, 0, 1]);
        assert_eq!(cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn galois_examples() {
        let z3 = CyclotomicNumber::root_of_unity(3, 1);
        let z3sq = z3.galois_apply(2).unwrap();
        assert_eq!(z3sq.coeffs(), &[r(-1), r(-1)]);
        let x = CyclotomicNumber::from_coeffs(3, vec![r(1), r(2)]).unwrap();
        assert_eq!(x.galois_apply(2).unwrap().coeffs(), &[r(-1), r(-2)]);
        assert!(x.galois_apply(3).is_err());
        let q = CyclotomicNumber::from_int(9, 7);
        assert_eq!(q.galois_apply(5).unwrap(), q);
    }

    #[test]
    fn i_sqrt3_value() {
        let x = CyclotomicNumber::from_coeffs(3, vec![r(1), r(2)]).unwrap();
        let v = x.value::<f64>(53);
        assert!(v.re.abs() < 1e-15 && (v.im - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn lift_and_descend() {
        let x = CyclotomicNumber::from_coeffs(3, vec![r(1), r(2)]).unwrap();
        let y = x.lift(36);
        assert!(x.same_value(&y));
        assert_eq!(y.minimal_modulus(), 3);
        assert_eq!(y.descend(3).unwrap(), x);
        let i = CyclotomicNumber::root_of_unity(4, 1).lift(12);
        assert!(i.descend(3).is_none());
    }

    fn arb(m: u64) -> impl Strategy<Value = CyclotomicNumber> {
        let n = euler_phi(m) as usize;
        prop::collection::vec((-50i64..=50, 1i64..=50), n).prop_map(move |v| {
            CyclotomicNumber::from_coeffs(m, v.into_iter().map(|(a, b)| ratio(a, b)).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn galois_composes(c in arb(9), a in prop::sample::select(vec![1i64, 2, 4, 5, 7, 8]), b in prop::sample::select(vec![1i64, 2, 4, 5, 7, 8])) {
            let lhs = c.galois_apply(a).unwrap().galois_apply(b).unwrap();
            let rhs = c.galois_apply(a * b % 9).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn mul_matches_values(x in arb(12), y in arb(12)) {
            let p = &x * &y;
            let (a, b) = (x.value::<f64>(53), y.value::<f64>(53));
            let v = p.value::<f64>(53);
            let w = a * &b;
            prop_assert!((v.re - w.re).abs() < 1e-6 * (1.0 + w.re.abs()));
            prop_assert!((v.im - w.im).abs() < 1e-6 * (1.0 + w.im.abs()));
        }

        #[test]
        fn galois_is_ring_hom(x in arb(9), y in arb(9)) {
            let lhs = (&x * &y).galois_apply(2).unwrap();
            let rhs = &x.galois_apply(2).unwrap() * &y.galois_apply(2).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
