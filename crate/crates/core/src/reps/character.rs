//! Kummer characters, composite Hecke characters ξ = χ·Resφ and the irreducibles ρ_nφ.

use serde::{Deserialize, Serialize};

use super::dirichlet::{generator_char, DirichletChar};
use super::{conjugate_prime, primes_of_kn, CyclotomicLevel, PrimeOfKn, RepsError};
use crate::exact::arith::{euler_phi, gcd, lcm, mulmod, powmod, primes_up_to, radical};
use crate::exact::{CyclotomicNumber, FiniteFieldElem};

/// True if m is a perfect p-th power.
pub fn is_pth_power(m: u64, p: u64) -> bool {
    let r = (m as f64).powf(1.0 / p as f64).round() as u64;
    (r.saturating_sub(1)..=r + 1).any(|x| x.checked_pow(p as u32) == Some(m))
}

/// Exponent k with χ(v) = ζ_{p^n}^k, χ the p^n-th power-residue character of m.
pub fn kummer_eval(p: u64, n: u32, m: u64, v: &PrimeOfKn) -> Result<u64, RepsError> {
    let ell = v.ell;
    if ell == p || m % ell == 0 {
        return Err(RepsError::RamifiedAtV(ell));
    }
    let pn = p.pow(n);
    // (Nv − 1)/p^n reduced mod ℓ − 1, since m ∈ F_ℓ^*
    let mm = (ell - 1) * pn;
    let r = (powmod(ell, v.f as u64, mm) + mm - 1) % mm;
    debug_assert_eq!(r % pn, 0);
    let e = if ell == 2 { 0 } else { (r / pn) % (ell - 1) };
    let t = powmod(m % ell, e, ell);
    if let Some(z) = v.zeta_residue() {
        let mut x = 1u64;
        for k in 0..pn {
            if x == t {
                return Ok(k);
            }
            x = mulmod(x, z, ell);
        }
    } else {
        let target = FiniteFieldElem::from_int(v.factor.clone(), t as i64);
        let mut x = FiniteFieldElem::from_int(v.factor.clone(), 1);
        for k in 0..pn {
            if x == target {
                return Ok(k);
            }
            x = x.mul(&v.zeta_image);
        }
    }
    unreachable!("power residue is a p^n-th root of unity")
}

/// ξ = χ^{chi_exp}·(φ∘N) on ideals of K_n.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FalseTateCharacter {
    pub p: u64,
    pub n: u32,
    pub m: u64,
    pub chi_exp: u64,
    pub phi: DirichletChar,
}

impl FalseTateCharacter {
    pub fn new(p: u64, n: u32, m: u64, chi_exp: u64, phi: DirichletChar) -> Result<Self, RepsError> {
        CyclotomicLevel::new(p, n)?;
        if m < 2 || is_pth_power(m, p) {
            return Err(RepsError::InvalidM(m));
        }
        let q = phi.modulus;
        if q > 1 && crate::exact::arith::factor(q).iter().any(|&(l, _)| l != p) {
            return Err(RepsError::BadCharacter(format!("φ modulus {q} is not a power of {p}")));
        }
        Ok(Self { p, n, m, chi_exp: chi_exp % p.pow(n), phi })
    }

    pub fn level(&self) -> CyclotomicLevel {
        CyclotomicLevel { p: self.p, n: self.n }
    }

    /// ξ takes values in μ_M.
    pub fn coeff_modulus(&self) -> u64 {
        lcm(self.p.pow(self.n), self.phi.order())
    }

    /// Exponent k with ξ(v) = ζ_M^k.
    pub fn hecke_exponent(&self, v: &PrimeOfKn) -> Result<u64, RepsError> {
        let mm = self.coeff_modulus();
        let pn = self.p.pow(self.n);
        let k = kummer_eval(self.p, self.n, self.m, v)?;
        let chi = k * self.chi_exp % pn * (mm / pn);
        let q = self.phi.modulus;
        let nv = powmod(v.ell, v.f as u64, q.max(1));
        let ph = self.phi.exponent_in(nv as i64, mm).ok_or(RepsError::RamifiedAtV(v.ell))?;
        Ok((chi + ph) % mm)
    }

    pub fn pow(&self, a: i64) -> Self {
        let pn = self.p.pow(self.n) as i64;
        Self { chi_exp: (self.chi_exp as i64 * a).rem_euclid(pn) as u64, phi: self.phi.pow(a), ..self.clone() }
    }
}

pub fn hecke_eval(xi: &FalseTateCharacter, v: &PrimeOfKn) -> Result<CyclotomicNumber, RepsError> {
    let m = xi.coeff_modulus();
    Ok(CyclotomicNumber::root_of_unity(m, xi.hecke_exponent(v)? as i64))
}

/// An irreducible Artin representation of the tower: ρ_nφ (n ≥ 1) or φ (n = 0).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtinRepFT {
    pub p: u64,
    pub n: u32,
    pub k: u32,
    pub m: u64,
    pub chi_exp: u64,
    pub phi: DirichletChar,
    pub dim: u64,
    pub d_plus: u64,
    pub d_minus: u64,
    pub coeff_modulus: u64,
    pub conductor_candidates: Vec<u64>,
    pub orbit_size: u64,
}

fn level_of(phi: &DirichletChar, p: u64) -> u32 {
    crate::exact::arith::valuation(phi.conductor(), p)
}

impl ArtinRepFT {
    /// Ind_{K_n}^{Q}(χ^{chi_exp}·Resφ).
    pub fn induced(p: u64, n: u32, m: u64, chi_exp: u64, phi: DirichletChar) -> Result<Self, RepsError> {
        let xi = FalseTateCharacter::new(p, n, m, chi_exp, phi)?;
        let k = level_of(&xi.phi, p);
        let dim = euler_phi(p.pow(n));
        let top = 2 * n.max(k) + 1;
        let rad = radical(m);
        let mut cands = Vec::new();
        for a in 0..=top {
            for b in 0..=dim as u32 {
                if let Some(c) = p.checked_pow(a).and_then(|x| rad.checked_pow(b).and_then(|y| x.checked_mul(y))) {
                    cands.push(c);
                }
            }
        }
        cands.sort_unstable();
        cands.dedup();
        Ok(Self {
            p,
            n,
            k,
            m,
            chi_exp: xi.chi_exp,
            coeff_modulus: xi.coeff_modulus(),
            phi: xi.phi,
            dim,
            d_plus: dim / 2,
            d_minus: dim / 2,
            conductor_candidates: cands,
            orbit_size: 1,
        })
    }

    /// One-dimensional ρ = φ.
    pub fn dirichlet(p: u64, m: u64, phi: DirichletChar) -> Self {
        let even = phi.is_even();
        Self {
            p,
            n: 0,
            k: level_of(&phi, p),
            m,
            chi_exp: 0,
            coeff_modulus: phi.order().max(1),
            conductor_candidates: vec![phi.conductor()],
            phi,
            dim: 1,
            d_plus: u64::from(even),
            d_minus: u64::from(!even),
            orbit_size: 1,
        }
    }

    pub fn xi(&self) -> Option<FalseTateCharacter> {
        (self.n > 0).then(|| FalseTateCharacter {
            p: self.p,
            n: self.n,
            m: self.m,
            chi_exp: self.chi_exp,
            phi: self.phi.clone(),
        })
    }
}

/// One entry per Galois orbit of irreducibles factoring through Q(μ_{p^K}, m^{1/p^{n_max}}).
pub fn classify_irreps(p: u64, n_max: u32, k_max: u32, m: u64) -> Result<Vec<ArtinRepFT>, RepsError> {
    CyclotomicLevel::new(p, 1)?;
    if m < 2 || is_pth_power(m, p) {
        return Err(RepsError::InvalidM(m));
    }
    let mut out = Vec::new();
    // 1-dimensional: characters mod p^{k_max}, orbits indexed by divisors of φ(p^{k_max})
    let big = euler_phi(p.pow(k_max));
    let gen = generator_char(p, k_max);
    for d in crate::exact::arith::divisors(big) {
        let phi = if d == big { DirichletChar::trivial(1) } else { gen.pow(d as i64).primitive() };
        let mut r = ArtinRepFT::dirichlet(p, m, phi);
        r.orbit_size = euler_phi(big / d);
        out.push(r);
    }
    for n in 1..=n_max {
        let kk = k_max.max(n);
        let gen = generator_char(p, kk);
        let depth = kk - n;
        let mut reps = vec![(DirichletChar::trivial(1), 1u64)];
        for j in 0..depth {
            let phi = gen.pow(((p - 1) * p.pow(j)) as i64).primitive();
            reps.push((phi, euler_phi(p.pow(depth - j))));
        }
        for (phi, size) in reps {
            let mut r = ArtinRepFT::induced(p, n, m, 1, phi)?;
            r.orbit_size = size;
            out.push(r);
        }
    }
    Ok(out)
}

/// ρ^{σ_a}: induced from ξ^a.
pub fn conjugate_rep(rho: &ArtinRepFT, a: i64) -> Result<ArtinRepFT, RepsError> {
    let mm = rho.coeff_modulus;
    if gcd(a.rem_euclid(mm as i64) as u64, mm) != 1 {
        return Err(RepsError::NotCoprime);
    }
    let mut r = rho.clone();
    r.phi = rho.phi.pow(a);
    if rho.n > 0 {
        r.chi_exp = (rho.chi_exp as i64 * a).rem_euclid(rho.p.pow(rho.n) as i64) as u64;
    }
    Ok(r)
}

/// Sample pairs (ξ(v), ξ(v̄)) at primes with v ≠ v̄.
fn conjugate_pairs(xi: &FalseTateCharacter, sample: usize) -> Result<Vec<(u64, u64)>, RepsError> {
    let level = xi.level();
    let mut out = Vec::new();
    for ell in primes_up_to(200_000) {
        if out.len() >= sample {
            break;
        }
        if ell == xi.p || xi.m % ell == 0 {
            continue;
        }
        let vs = primes_of_kn(&level, ell)?;
        for v in &vs {
            let w = conjugate_prime(v, &vs);
            if w.factor.c <= v.factor.c {
                continue;
            }
            out.push((xi.hecke_exponent(v)?, xi.hecke_exponent(&w)?));
        }
    }
    if out.len() < sample {
        return Err(RepsError::InsufficientSplitPrimes);
    }
    out.truncate(sample);
    Ok(out)
}

/// ξ(v)·ξ(v̄) = 1 at sampled primes.
pub fn check_anticyclotomic(xi: &FalseTateCharacter, sample: usize) -> Result<bool, RepsError> {
    let mm = xi.coeff_modulus();
    Ok(conjugate_pairs(xi, sample)?.iter().all(|&(a, b)| (a + b) % mm == 0))
}

/// ξ(v) = ξ(v̄) at sampled primes.
pub fn check_cyclotomic(xi: &FalseTateCharacter, sample: usize) -> Result<bool, RepsError> {
    Ok(conjugate_pairs(xi, sample)?.iter().all(|&(a, b)| a == b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::arith::is_prime;

    fn k1() -> CyclotomicLevel {
        CyclotomicLevel::new(3, 1).unwrap()
    }

    fn at(ell: u64, r: u64) -> PrimeOfKn {
        primes_of_kn(&k1(), ell).unwrap().into_iter().find(|v| v.zeta_residue() == Some(r)).unwrap()
    }

    #[test]
    fn kummer_examples() {
        assert_eq!(kummer_eval(3, 1, 2, &at(7, 2)).unwrap(), 2);
        assert_eq!(kummer_eval(3, 1, 2, &at(7, 4)).unwrap(), 1);
        let v5 = primes_of_kn(&k1(), 5).unwrap().remove(0);
        assert_eq!(kummer_eval(3, 1, 2, &v5).unwrap(), 0);
        assert!(matches!(kummer_eval(3, 1, 2, &primes_of_kn(&k1(), 2).unwrap()[0]), Err(RepsError::RamifiedAtV(2))));
    }

    #[test]
    fn hecke_examples() {
        let v5 = primes_of_kn(&k1(), 5).unwrap().remove(0);
        let triv = FalseTateCharacter::new(3, 1, 2, 0, DirichletChar::trivial(1)).unwrap();
        for ell in [5u64, 7, 11, 13, 17, 19] {
            for v in primes_of_kn(&k1(), ell).unwrap() {
                assert!(hecke_eval(&triv, &v).unwrap().same_value(&CyclotomicNumber::from_int(1, 1)));
            }
        }
        let xi = FalseTateCharacter::new(3, 1, 2, 1, DirichletChar::trivial(1)).unwrap();
        assert!(hecke_eval(&xi, &v5).unwrap().same_value(&CyclotomicNumber::from_int(1, 1)));
        // φ of order 3 mod 9 with φ(2) = ζ₃: ξ(5) = χ(5)·φ(25) = φ(7) = ζ₃^4 = ζ₃
        let phi = DirichletChar::new(9, vec![2]).unwrap();
        let xi = FalseTateCharacter::new(3, 1, 2, 1, phi).unwrap();
        assert_eq!(xi.coeff_modulus(), 3);
        assert_eq!(hecke_eval(&xi, &v5).unwrap(), CyclotomicNumber::root_of_unity(3, 1));
    }

    #[test]
    fn kummer_order_and_norm_relation() {
        for (p, n, m) in [(3u64, 1u32, 2u64), (3, 2, 2), (5, 1, 3), (3, 1, 5)] {
            let lv = CyclotomicLevel::new(p, n).unwrap();
            let pn = p.pow(n);
            let mut g = pn;
            let mut count = 0;
            for ell in primes_up_to(5000) {
                if ell == p || m % ell == 0 {
                    continue;
                }
                let vs = primes_of_kn(&lv, ell).unwrap();
                let ks: Vec<u64> = vs.iter().map(|v| kummer_eval(p, n, m, v).unwrap()).collect();
                for &k in &ks {
                    g = gcd(g, k);
                }
                if ell % pn == 1 {
                    // χ((ℓ)) = Π χ(v) = 1 because χ is anticyclotomic and (ℓ) is stable under c
                    assert_eq!(ks.iter().sum::<u64>() % pn, 0);
                }
                count += vs.len();
                if count > 50 {
                    break;
                }
            }
            assert_eq!(g, 1, "order of χ is exactly p^n");
        }
    }

    #[test]
    fn classification() {
        let r = classify_irreps(3, 1, 1, 2).unwrap();
        let dims: Vec<u64> = r.iter().map(|x| x.dim).collect();
        assert_eq!(dims, vec![1, 1, 2]);
        for (n, k) in [(1u32, 1u32), (2, 2), (1, 2), (1, 3)] {
            for p in [3u64, 5] {
                let r = classify_irreps(p, n, k, 2).unwrap();
                let total: u64 = r.iter().map(|x| x.orbit_size * x.dim * x.dim).sum();
                assert_eq!(total, p.pow(n) * euler_phi(p.pow(k.max(n))), "p={p} n={n} k={k}");
            }
        }
        let r = classify_irreps(3, 2, 2, 2).unwrap();
        let rho2 = r.iter().find(|x| x.n == 2).unwrap();
        assert_eq!((rho2.dim, rho2.d_plus, rho2.d_minus), (6, 3, 3));
        assert_eq!(classify_irreps(5, 1, 1, 2).unwrap().iter().find(|x| x.n == 1).unwrap().dim, 4);
        assert!(matches!(classify_irreps(3, 1, 1, 8), Err(RepsError::InvalidM(8))));
        // ρ₁ for m = 2 has conductor 108 among the candidates
        let rho1 = classify_irreps(3, 1, 2, 2).unwrap().into_iter().filter(|x| x.n == 1).collect::<Vec<_>>();
        assert!(rho1[0].conductor_candidates.contains(&108));
        assert!(rho1[1].conductor_candidates.contains(&324));
        assert_eq!(rho1[1].phi.order(), 3);
        assert_eq!(rho1[1].orbit_size, 2);
    }

    #[test]
    fn conjugation_is_an_action() {
        let rho = ArtinRepFT::induced(3, 1, 2, 1, DirichletChar::new(9, vec![2]).unwrap()).unwrap();
        assert_eq!(conjugate_rep(&rho, 1).unwrap(), rho);
        assert_eq!(conjugate_rep(&rho, 4).unwrap(), rho);
        assert!(matches!(conjugate_rep(&rho, 3), Err(RepsError::NotCoprime)));
        let m = rho.coeff_modulus as i64;
        for a in [2i64, 5, 7] {
            for b in [2i64, 4, 8] {
                let lhs = conjugate_rep(&conjugate_rep(&rho, a).unwrap(), b).unwrap();
                let rhs = conjugate_rep(&rho, (a * b).rem_euclid(m)).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
        // character table at split primes: ξ^2 values are galois conjugates
        let xi = rho.xi().unwrap();
        let xi2 = conjugate_rep(&rho, 2).unwrap().xi().unwrap();
        let mut seen = 0;
        for ell in primes_up_to(500).into_iter().filter(|&l| l % 3 == 1 && l != 7 && is_prime(l)) {
            for v in primes_of_kn(&k1(), ell).unwrap() {
                let a = hecke_eval(&xi, &v).unwrap().galois_apply(2).unwrap();
                assert_eq!(a, hecke_eval(&xi2, &v).unwrap());
                seen += 1;
            }
        }
        assert!(seen >= 20);
    }

    #[test]
    fn anti_and_cyclotomic() {
        let chi = FalseTateCharacter::new(3, 1, 2, 1, DirichletChar::trivial(1)).unwrap();
        assert!(check_anticyclotomic(&chi, 20).unwrap());
        assert!(!check_cyclotomic(&chi, 20).unwrap());
        let phi = FalseTateCharacter::new(3, 1, 2, 0, DirichletChar::new(9, vec![2]).unwrap()).unwrap();
        assert!(check_cyclotomic(&phi, 20).unwrap());
        let triv = FalseTateCharacter::new(3, 1, 2, 0, DirichletChar::trivial(1)).unwrap();
        assert!(check_cyclotomic(&triv, 20).unwrap() && check_anticyclotomic(&triv, 20).unwrap());
        let chi9 = FalseTateCharacter::new(3, 2, 2, 1, DirichletChar::trivial(1)).unwrap();
        assert!(check_anticyclotomic(&chi9, 20).unwrap());
    }
}
