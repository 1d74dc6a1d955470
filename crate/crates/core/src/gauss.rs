//! Gauss sums, archimedean ε-factors and global ε via inductivity.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::arith::{gcd, lcm};
use crate::exact::cyclo::from_cyclic;
use crate::exact::CyclotomicNumber;
use crate::lfun::{assemble_spec, evaluate_l, CoeffSource, LfunError};
use crate::real::{bits_for_digits, Cx, MpFloat, Real};
use crate::reps::eisenstein::{hecke_conductor, xi_principal, Eis};
use crate::reps::{ArtinRepFT, DirichletChar, FalseTateCharacter, RepsError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaussError {
    #[error("character mod {0} is not primitive")]
    ImprimitiveCharacter(u64),
    #[error("Gauss-sum and functional-equation routes disagree by {0:e}")]
    ConventionMismatch(f64),
    #[error(transparent)]
    Reps(#[from] RepsError),
    #[error(transparent)]
    Lfun(#[from] LfunError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldTag {
    Q,
    K1,
    F,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EpsSource {
    GaussSum,
    FeNumeric,
    Inductivity,
}

#[derive(Debug, Clone)]
pub struct EpsilonFactor {
    pub value: Cx<MpFloat>,
    pub exact: Option<CyclotomicNumber>,
    pub field: FieldTag,
    pub source: EpsSource,
}

impl EpsilonFactor {
    fn exact(c: CyclotomicNumber, field: FieldTag, source: EpsSource, prec: u32) -> Self {
        EpsilonFactor { value: c.value(prec), exact: Some(c), field, source }
    }
}

/// √3 = ζ₁₂ + ζ₁₂^{−1}.
pub fn sqrt3() -> CyclotomicNumber {
    &CyclotomicNumber::root_of_unity(12, 1) + &CyclotomicNumber::root_of_unity(12, -1)
}

/// i^k.
pub fn i_pow(k: i64) -> CyclotomicNumber {
    CyclotomicNumber::root_of_unity(4, k)
}

/// Σ_{a mod q} ψ(a) e^{2πia/q} in Q(μ_{lcm(q, ord ψ)}).
pub fn gauss_sum_dirichlet_exact(psi: &DirichletChar) -> Result<CyclotomicNumber, GaussError> {
    let q = psi.modulus;
    if !psi.is_primitive() {
        return Err(GaussError::ImprimitiveCharacter(q));
    }
    if q == 1 {
        return Ok(CyclotomicNumber::from_int(1, 1));
    }
    let mm = lcm(q, psi.order());
    let mut acc = vec![0i64; mm as usize];
    for a in 1..q {
        if let Some(k) = psi.exponent_in(a as i64, mm) {
            acc[((k + a * (mm / q)) % mm) as usize] += 1;
        }
    }
    Ok(from_cyclic(&acc))
}

pub fn gauss_sum_dirichlet(psi: &DirichletChar, digits: u32) -> Result<EpsilonFactor, GaussError> {
    Ok(EpsilonFactor::exact(gauss_sum_dirichlet_exact(psi)?, FieldTag::Q, EpsSource::GaussSum, bits_for_digits(digits)))
}

/// Candidate normalizations of τ_Q(ψ): ψ or ψ̄, with or without 1/√q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TauConvention {
    pub conjugate: bool,
    pub unit: bool,
}

impl TauConvention {
    pub const CANDIDATES: [TauConvention; 4] = [
        TauConvention { conjugate: false, unit: false },
        TauConvention { conjugate: true, unit: false },
        TauConvention { conjugate: false, unit: true },
        TauConvention { conjugate: true, unit: true },
    ];

    /// τ_Q(ψ) under this convention; exact unless a non-square √q is divided out.
    pub fn tau(&self, psi: &DirichletChar, prec: u32) -> Result<(Cx<MpFloat>, Option<CyclotomicNumber>), GaussError> {
        let chi = if self.conjugate { psi.conj() } else { psi.clone() };
        let g = gauss_sum_dirichlet_exact(&chi)?;
        if !self.unit {
            return Ok((g.value(prec), Some(g)));
        }
        let q = psi.modulus;
        let r = crate::exact::arith::isqrt(q);
        let v = g.value::<MpFloat>(prec).scale(&(MpFloat::one(prec) / MpFloat::from_i64(q as i64, prec).sqrt()));
        let ex = (r * r == q).then(|| g.scale(&num_rational::BigRational::new(1.into(), (r as i64).into())));
        Ok((v, ex))
    }
}

/// i^{d⁻} per real place, 1 per complex place.
pub fn eps_infinity(d_minus: u64, real_places: u64) -> CyclotomicNumber {
    i_pow((d_minus * real_places) as i64)
}

/// ξ_f on (O/f)^*: ξ((x)) with x moved within its class to avoid the primes of 3m.
fn xi_on_residue(xi: &FalseTateCharacter, x: Eis, k: i64) -> Result<u64, RepsError> {
    for r in 0..6i64 {
        for (s, t) in [(0, 0), (1, 0), (0, 1), (1, 1), (-1, 0), (0, -1), (2, 1), (1, 2)] {
            let y = x + Eis::int(k) * Eis::new(s + r, t - r);
            if y.is_zero() {
                continue;
            }
            match xi_principal(xi, y) {
                Ok(e) => return Ok(e),
                Err(RepsError::RamifiedAtV(_)) => continue,
                Err(e) => return Err(e),
            }
        }
    }
    Err(RepsError::BadCharacter("no admissible representative".into()))
}

/// τ_K(ξ) = Σ_{x ∈ (O/f)^*} ξ((x)) e^{2πi Tr(x/(δg))} for K = Q(μ₃), f = (g), g = δ^c·L.
/// Returns the exact value and N(f).
pub fn hecke_gauss_sum_exact(xi: &FalseTateCharacter) -> Result<(CyclotomicNumber, u64), GaussError> {
    let (c, l) = hecke_conductor(xi)?;
    let nf = 3u64.pow(c) * (l * l) as u64;
    if nf == 1 {
        return Ok((CyclotomicNumber::from_int(1, 1), 1));
    }
    let mm = xi.coeff_modulus();
    let k = 3i64.pow(c.div_ceil(2)) * l;
    let d = 3i64.pow(c + 1) * l;
    let w = lcm(mm, d as u64);
    let dc = Eis::delta().conj().pow(c + 1);
    let mut acc = vec![0i64; w as usize];
    for a in 0..k {
        for b in 0..k {
            let x = Eis::new(a, b);
            let n = x.norm();
            if (c > 0 && n % 3 == 0) || gcd(n.unsigned_abs(), l as u64) != 1 {
                continue;
            }
            let e = xi_on_residue(xi, x, k)?;
            let t = (x * dc).trace().rem_euclid(d) as u64;
            acc[((e * (w / mm) + t * (w / d as u64)) % w) as usize] += 1;
        }
    }
    let mult = (k * k) as u64 / nf;
    let v = from_cyclic(&acc).scale(&num_rational::BigRational::new(1.into(), (mult as i64).into()));
    Ok((v, nf))
}

pub fn hecke_gauss_sum(xi: &FalseTateCharacter, digits: u32) -> Result<EpsilonFactor, GaussError> {
    let (v, _) = hecke_gauss_sum_exact(xi)?;
    Ok(EpsilonFactor::exact(v, FieldTag::K1, EpsSource::GaussSum, bits_for_digits(digits)))
}

/// Root number of L(Ind ξ, s) solved from its functional equation.
pub fn artin_root_number(xi: &FalseTateCharacter, digits: u32) -> Result<Cx<MpFloat>, GaussError> {
    let spec = assemble_spec(CoeffSource::Artin { xi: xi.clone() })?;
    let r = evaluate_l::<MpFloat>(&spec, 0.5, digits)?;
    Ok(r.solved_root_number.expect("root number is solved"))
}

/// τ_K(ξ) from the functional equation: √N(f)·W(Ind ξ).
pub fn hecke_gauss_sum_fe(xi: &FalseTateCharacter, digits: u32) -> Result<EpsilonFactor, GaussError> {
    let prec = bits_for_digits(digits);
    let (c, l) = hecke_conductor(xi)?;
    let nf = 3u64.pow(c) * (l * l) as u64;
    let w = artin_root_number(xi, digits)?;
    let v = w.scale(&MpFloat::from_i64(nf as i64, prec).sqrt());
    Ok(EpsilonFactor { value: v, exact: None, field: FieldTag::K1, source: EpsSource::FeNumeric })
}

/// τ_K(ξ) by both routes; errors when they differ beyond 10^{−(digits−5)}.
pub fn hecke_gauss_sum_checked(xi: &FalseTateCharacter, digits: u32) -> Result<(EpsilonFactor, f64), GaussError> {
    let a = hecke_gauss_sum(xi, digits)?;
    let b = hecke_gauss_sum_fe(xi, digits)?;
    let scale = a.value.abs().to_f64().max(1.0);
    let res = (a.value.clone() - &b.value).abs().to_f64() / scale;
    if !(res < 10f64.powi(-(digits as i32 - 5))) {
        return Err(GaussError::ConventionMismatch(res));
    }
    Ok((a, res))
}

/// ε_Q(ρ): i^{d⁻}·τ_Q(φ) in dimension one, √3·τ_K(ξ) for ρ induced from K₁.
pub fn global_epsilon(rho: &ArtinRepFT, conv: TauConvention, digits: u32) -> Result<EpsilonFactor, GaussError> {
    let prec = bits_for_digits(digits);
    match rho.xi() {
        None => {
            let phi = rho.phi.primitive();
            let (v, ex) = conv.tau(&phi, prec)?;
            let i = eps_infinity(rho.d_minus, 1);
            let v = v * &i.value::<MpFloat>(prec);
            Ok(EpsilonFactor { value: v, exact: ex.map(|e| &e * &i), field: FieldTag::Q, source: EpsSource::GaussSum })
        }
        Some(xi) => {
            if xi.p.pow(xi.n) != 3 {
                return Err(RepsError::Unsupported.into());
            }
            let (t, _) = hecke_gauss_sum_exact(&xi)?;
            let e = &t * &sqrt3();
            Ok(EpsilonFactor::exact(e, FieldTag::Q, EpsSource::Inductivity, prec))
        }
    }
}

/// One instance of an exact identity check.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub lhs: String,
    pub rhs: String,
    pub residual: f64,
    pub pass: bool,
}

fn compare(name: String, lhs: &CyclotomicNumber, rhs: &CyclotomicNumber, digits: u32) -> IdentityCheck {
    let prec = bits_for_digits(digits) + 16;
    let (a, b) = (lhs.value::<MpFloat>(prec), rhs.value::<MpFloat>(prec));
    let residual = (a.clone() - &b).abs().to_f64() / b.abs().to_f64().max(1e-300);
    let pass = lhs.same_value(rhs) && residual < 10f64.powi(-(digits as i32 - 5));
    let f = |z: &Cx<MpFloat>| format!("{:.20e}{:+.20e}i", z.re.to_f64(), z.im.to_f64());
    IdentityCheck { name, lhs: f(&a), rhs: f(&b), residual, pass }
}

fn lifted(x: &CyclotomicNumber, m: u64) -> CyclotomicNumber {
    x.lift(lcm(x.modulus(), m))
}

fn mul(a: &CyclotomicNumber, b: &CyclotomicNumber) -> CyclotomicNumber {
    let m = lcm(a.modulus(), b.modulus());
    &a.lift(m) * &b.lift(m)
}

/// a' ≡ a mod `m` with a' prime to `big`: a σ ∈ Gal(Q̄/Q) acting as σ_a on Q(μ_m).
pub fn lift_exponent(a: i64, m: u64, big: u64) -> Result<i64, GaussError> {
    let m = m.max(1) as i64;
    let a = a.rem_euclid(m);
    if gcd(a as u64, m as u64) != 1 && m > 1 {
        return Err(RepsError::NotCoprime.into());
    }
    (0..big as i64).map(|t| a + t * m).find(|&x| gcd(x as u64, big) == 1).ok_or_else(|| RepsError::NotCoprime.into())
}

fn act(x: &CyclotomicNumber, a: i64, m: u64) -> Result<CyclotomicNumber, GaussError> {
    Ok(lifted(x, m).galois_apply(a).map_err(RepsError::from)?)
}

/// τ(ψ₁)^σ τ(ψ₂)^σ / τ(ψ₁ψ₂)^σ = τ(ψ₁^σ) τ(ψ₂^σ) / τ(ψ₁^σ ψ₂^σ), cross-multiplied.
pub fn check_tau_sigma(
    psi1: &DirichletChar,
    psi2: &DirichletChar,
    a: i64,
    digits: u32,
) -> Result<IdentityCheck, GaussError> {
    let q = lcm(psi1.modulus, psi2.modulus);
    let prod = psi1.lift_to(q).mul(&psi2.lift_to(q)).primitive();
    let tau = |c: &DirichletChar| gauss_sum_dirichlet_exact(c);
    let (t1, t2, t12) = (tau(psi1)?, tau(psi2)?, tau(&prod)?);
    let (s1, s2, s12) = (tau(&psi1.pow(a))?, tau(&psi2.pow(a))?, tau(&prod.pow(a))?);
    let big = [&t1, &t2, &t12, &s1, &s2, &s12].iter().fold(1, |m, x| lcm(m, x.modulus()));
    let ord = lcm(psi1.order(), psi2.order());
    let sa = lift_exponent(a, ord, big)?;
    let lhs = mul(&act(&mul(&t1, &t2), sa, big)?, &s12);
    let rhs = mul(&mul(&s1, &s2), &act(&t12, sa, big)?);
    let name = format!("tau_sigma({}:{:?}, {}:{:?}, a={a})", psi1.modulus, psi1.exps, psi2.modulus, psi2.exps);
    Ok(compare(name, &lhs, &rhs, digits))
}

/// Both sides of the equivariance of ε_K(χψ)/(i·τ_Q(ψ̃²ε)) over K = Q(μ₃), with
/// ψ = φ∘N, ψ̃ = φ and ε the quadratic character mod 3. Cross-multiplied.
pub fn check_tau_vs_epsilon(xi: &FalseTateCharacter, a: i64, digits: u32) -> Result<IdentityCheck, GaussError> {
    let eps3 = DirichletChar::new(3, vec![1]).map_err(GaussError::Reps)?;
    let den = |phi: &DirichletChar| -> Result<CyclotomicNumber, GaussError> {
        let q = lcm(phi.modulus, 3);
        let c = phi.lift_to(q).pow(2).mul(&eps3.lift_to(q)).primitive();
        Ok(mul(&i_pow(1), &gauss_sum_dirichlet_exact(&c)?))
    };
    let num = |x: &FalseTateCharacter| -> Result<CyclotomicNumber, GaussError> {
        Ok(mul(&hecke_gauss_sum_exact(x)?.0, &sqrt3()))
    };
    let xa = xi.pow(a);
    let (n1, d1) = (num(xi)?, den(&xi.phi)?);
    let (n2, d2) = (num(&xa)?, den(&xa.phi)?);
    let big = [&n1, &d1, &n2, &d2].iter().fold(1, |m, x| lcm(m, x.modulus()));
    let sa = lift_exponent(a, xi.coeff_modulus(), big)?;
    let lhs = mul(&act(&n1, sa, big)?, &d2);
    let rhs = mul(&n2, &act(&d1, sa, big)?);
    let name =
        format!("tau_vs_epsilon(m={}, chi^{}, phi={}:{:?}, a={a})", xi.m, xi.chi_exp, xi.phi.modulus, xi.phi.exps);
    Ok(compare(name, &lhs, &rhs, digits))
}

/// τ_K(χ)^σ = τ_K(χ^σ) for anticyclotomic χ.
pub fn check_anticyclotomic_tau(xi: &FalseTateCharacter, a: i64, digits: u32) -> Result<IdentityCheck, GaussError> {
    let t = hecke_gauss_sum_exact(xi)?.0;
    let ta = hecke_gauss_sum_exact(&xi.pow(a))?.0;
    let big = lcm(t.modulus(), ta.modulus());
    let lhs = act(&t, lift_exponent(a, xi.coeff_modulus(), big)?, big)?;
    Ok(compare(format!("anticyclotomic_tau(m={}, a={a})", xi.m), &lhs, &lifted(&ta, big), digits))
}

const SUITE_FIELD_BOUND: u64 = 252;

fn primitive_nontrivial(max_modulus: u64) -> Vec<DirichletChar> {
    (3..=max_modulus).flat_map(DirichletChar::all).filter(|c| !c.is_trivial() && c.is_primitive()).collect()
}

fn units(m: u64) -> impl Iterator<Item = i64> {
    (2..m.max(2) as i64).filter(move |&a| gcd(a as u64, m) == 1)
}

/// `count` instances of the τ-equivariance identity over primitive characters
/// of modulus ≤ `max_modulus`, spread deterministically across moduli.
pub fn tau_sigma_suite(count: usize, max_modulus: u64, digits: u32) -> Result<Vec<IdentityCheck>, GaussError> {
    let chars = primitive_nontrivial(max_modulus);
    let n = chars.len();
    let mut out = Vec::new();
    let mut i = 0usize;
    while out.len() < count && i < 200 * count {
        let (c1, c2) = (&chars[(i * 7) % n], &chars[(i * 13 + 5) % n]);
        i += 1;
        let ord = lcm(c1.order(), c2.order());
        // exact arithmetic happens in Q(μ_big); keep it small
        if lcm(lcm(c1.modulus, c2.modulus), ord) > SUITE_FIELD_BOUND {
            continue;
        }
        if let Some(a) = units(ord).nth(i % euler_phi_u(ord).max(1)) {
            let c = check_tau_sigma(c1, c2, a, digits)?;
            if !out.iter().any(|o: &IdentityCheck| o.name == c.name) {
                out.push(c);
            }
        }
    }
    Ok(out)
}

fn euler_phi_u(m: u64) -> usize {
    (1..=m).filter(|&a| gcd(a, m) == 1).count()
}

/// `count` instances of the ε_K/τ_Q equivariance over K = Q(μ₃): ξ = χ^j·Resφ with φ
/// primitive of modulus ≤ `max_modulus`, m cube-free.
pub fn tau_vs_epsilon_suite(count: usize, max_modulus: u64, digits: u32) -> Result<Vec<IdentityCheck>, GaussError> {
    let mut phis = vec![DirichletChar::trivial(1)];
    phis.extend(
        primitive_nontrivial(max_modulus).into_iter().filter(|c| c.modulus <= 12 || c.modulus == 9 * (c.modulus / 9)),
    );
    let ms = [2u64, 5, 7, 10, 3];
    let mut out = Vec::new();
    let mut i = 0usize;
    while out.len() < count && i < 50 * count {
        let phi = phis[(i * 5) % phis.len()].clone();
        let m = ms[i % ms.len()];
        let j = 1 + (i / ms.len()) as u64 % 2;
        i += 1;
        let Ok(xi) = FalseTateCharacter::new(3, 1, m, j, phi) else { continue };
        let big = xi.coeff_modulus();
        let Some(a) = units(big).nth(i % 3) else { continue };
        let c = check_tau_vs_epsilon(&xi, a, digits)?;
        if !out.iter().any(|o: &IdentityCheck| o.name == c.name) {
            out.push(c);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::cyclo::ratio;
    use crate::reps::dirichlet::generator_char;
    use proptest::prelude::*;

    fn kummer(m: u64) -> FalseTateCharacter {
        FalseTateCharacter::new(3, 1, m, 1, DirichletChar::trivial(1)).unwrap()
    }

    #[test]
    fn dirichlet_examples() {
        let g3 = gauss_sum_dirichlet_exact(&DirichletChar::new(3, vec![1]).unwrap()).unwrap();
        let want = &CyclotomicNumber::from_int(3, 1) + &CyclotomicNumber::root_of_unity(3, 1).scale(&ratio(2, 1));
        assert!(g3.same_value(&want));
        let g4 = gauss_sum_dirichlet_exact(&DirichletChar::new(4, vec![1]).unwrap()).unwrap();
        assert!(g4.same_value(&CyclotomicNumber::root_of_unity(4, 1).scale(&ratio(2, 1))));
        let g1 = gauss_sum_dirichlet_exact(&DirichletChar::trivial(1)).unwrap();
        assert_eq!(g1.as_rational(), Some(ratio(1, 1)));
        assert!(matches!(
            gauss_sum_dirichlet_exact(&DirichletChar::trivial(9)),
            Err(GaussError::ImprimitiveCharacter(9))
        ));
    }

    #[test]
    fn archimedean_factors() {
        assert!(eps_infinity(1, 1).same_value(&i_pow(1)));
        assert_eq!(eps_infinity(3, 0).as_rational(), Some(ratio(1, 1)));
        assert_eq!(eps_infinity(2, 1).as_rational(), Some(ratio(-1, 1)));
    }

    fn primitive_chars(max_q: u64) -> Vec<DirichletChar> {
        (1..=max_q).flat_map(DirichletChar::all).filter(|c| c.is_primitive()).collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]
        #[test]
        fn gauss_sum_absolute_value(i in 0usize..10_000) {
            let all = primitive_chars(200);
            let psi = &all[i % all.len()];
            let p = 120;
            let g = gauss_sum_dirichlet_exact(psi).unwrap();
            let q = psi.modulus as i64;
            let v = g.value::<MpFloat>(p);
            prop_assert!((v.abs() - MpFloat::from_i64(q, p).sqrt()).abs().to_f64() < 1e-20);
            // g(ψ) g(ψ̄) = ψ(−1) q
            let gc = gauss_sum_dirichlet_exact(&psi.conj()).unwrap();
            let sign = if psi.is_even() { 1 } else { -1 };
            prop_assert_eq!(mul(&g, &gc).as_rational(), Some(ratio(sign * q, 1)));
        }
    }

    #[test]
    fn hecke_gauss_sum_abs_law() {
        let (t, nf) = hecke_gauss_sum_exact(&kummer(2)).unwrap();
        assert_eq!(nf, 36);
        let v = t.value::<MpFloat>(120);
        assert!((v.abs().to_f64() - 6.0).abs() < 1e-25);
        let (t1, _) =
            hecke_gauss_sum_exact(&FalseTateCharacter::new(3, 1, 2, 0, DirichletChar::trivial(1)).unwrap()).unwrap();
        assert_eq!(t1.as_rational(), Some(ratio(1, 1)));
    }

    #[test]
    fn hecke_routes_agree() {
        for (m, phi) in
            [(2u64, DirichletChar::trivial(1)), (2, generator_char(3, 2).pow(2)), (5, DirichletChar::trivial(1))]
        {
            let xi = FalseTateCharacter::new(3, 1, m, 1, phi).unwrap();
            let (_, res) = hecke_gauss_sum_checked(&xi, 20).unwrap();
            assert!(res < 1e-15, "m={m}: {res}");
        }
    }

    #[test]
    fn induced_epsilon_has_conductor_norm() {
        let rho = ArtinRepFT::induced(3, 1, 2, 1, DirichletChar::trivial(1)).unwrap();
        let e = global_epsilon(&rho, TauConvention::CANDIDATES[0], 25).unwrap();
        let n = e.value.norm_sqr().to_f64();
        assert!((n - 108.0).abs() < 1e-18);
    }

    #[test]
    fn identities() {
        let c9 = generator_char(3, 2).pow(2);
        let q3 = DirichletChar::new(3, vec![1]).unwrap();
        let q4 = DirichletChar::new(4, vec![1]).unwrap();
        for (a, b, s) in [(&c9, &c9, 2), (&q3, &q4, 5), (&DirichletChar::trivial(1), &DirichletChar::trivial(1), 1)] {
            let r = check_tau_sigma(a, b, s, 25).unwrap();
            assert!(r.pass, "{r:?}");
        }
        for (m, phi) in [(2u64, DirichletChar::trivial(1)), (2, c9.clone())] {
            let xi = FalseTateCharacter::new(3, 1, m, 1, phi).unwrap();
            let r = check_tau_vs_epsilon(&xi, 2, 25).unwrap();
            assert!(r.pass, "{r:?}");
        }
        for m in [2u64, 5, 7] {
            for a in [2i64, 5] {
                let r = check_anticyclotomic_tau(&kummer(m), a, 25).unwrap();
                assert!(r.pass, "{r:?}");
            }
        }
    }
}
