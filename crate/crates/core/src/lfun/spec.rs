//! Local factors, Dirichlet-coefficient expansion and L-function specifications.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use super::LfunError;
use crate::elliptic::{count_ap, ApTable, EllipticCurveModel, ReductionKind};
use crate::exact::arith::{lcm, powmod, spf_table};
use crate::exact::cyclo::from_cyclic;
use crate::exact::CyclotomicNumber;
use crate::real::{Cx, Real};
use crate::reps::character::{hecke_eval, ArtinRepFT, FalseTateCharacter};
use crate::reps::dirichlet::DirichletChar;
use crate::reps::eisenstein::hecke_conductor;
use crate::reps::{primes_of_kn, PrimeOfKn, RepsError};

/// Polynomial in X with coefficients in Z[x]/(x^M − 1), x = ζ_M. Constant term 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalFactor {
    pub ell: u64,
    pub m: u64,
    pub poly: Vec<Vec<i64>>,
}

fn mono(m: u64, c: i64, e: u64) -> Vec<i64> {
    let mut v = vec![0; m as usize];
    v[(e % m) as usize] = c;
    v
}

fn cmul(a: &[i64], b: &[i64]) -> Vec<i64> {
    let m = a.len();
    let mut out = vec![0i128; m];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if y != 0 {
                out[(i + j) % m] += x as i128 * y as i128;
            }
        }
    }
    out.into_iter().map(|x| i64::try_from(x).expect("coefficient overflow")).collect()
}

/// Re-embed Z[ζ_m] into Z[ζ_M] for m | M.
fn lift(a: &[i64], mm: u64) -> Vec<i64> {
    let m = a.len() as u64;
    if m == mm {
        return a.to_vec();
    }
    let mut v = vec![0; mm as usize];
    for (i, &x) in a.iter().enumerate() {
        v[(i as u64 * (mm / m)) as usize] += x;
    }
    v
}

impl LocalFactor {
    pub fn one(ell: u64, m: u64) -> Self {
        LocalFactor { ell, m, poly: vec![mono(m, 1, 0)] }
    }

    pub fn degree(&self) -> usize {
        self.poly.iter().rposition(|c| c.iter().any(|&x| x != 0)).unwrap_or(0)
    }

    /// From integer coefficients.
    pub fn from_ints(ell: u64, m: u64, c: &[i64]) -> Self {
        LocalFactor { ell, m, poly: c.iter().map(|&x| mono(m, x, 0)).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let m = lcm(self.m, o.m);
        let a: Vec<Vec<i64>> = self.poly.iter().map(|c| lift(c, m)).collect();
        let b: Vec<Vec<i64>> = o.poly.iter().map(|c| lift(c, m)).collect();
        let mut poly = vec![vec![0; m as usize]; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                let p = cmul(x, y);
                for (t, v) in p.into_iter().enumerate() {
                    poly[i + j][t] += v;
                }
            }
        }
        LocalFactor { ell: self.ell, m, poly }
    }

    /// X ↦ X^f.
    pub fn subst_pow(&self, f: u32) -> Self {
        let f = f as usize;
        let mut poly = vec![vec![0; self.m as usize]; (self.poly.len() - 1) * f + 1];
        for (i, c) in self.poly.iter().enumerate() {
            poly[i * f] = c.clone();
        }
        LocalFactor { ell: self.ell, m: self.m, poly }
    }

    pub fn lift_to(&self, mm: u64) -> Self {
        LocalFactor { ell: self.ell, m: mm, poly: self.poly.iter().map(|c| lift(c, mm)).collect() }
    }

    pub fn coefficients(&self) -> Vec<CyclotomicNumber> {
        self.poly.iter().map(|c| from_cyclic(c)).collect()
    }
}

/// Dirichlet coefficients a_1..a_n in Z[x]/(x^M − 1); entry i occupies data[iM..(i+1)M].
#[derive(Debug, Clone)]
pub struct Coeffs {
    pub m: u64,
    pub n: usize,
    pub data: Vec<i64>,
}

impl Coeffs {
    pub fn get(&self, i: usize) -> &[i64] {
        let m = self.m as usize;
        &self.data[i * m..(i + 1) * m]
    }

    pub fn is_zero(&self, i: usize) -> bool {
        self.get(i).iter().all(|&x| x == 0)
    }

    pub fn exact(&self, i: usize) -> CyclotomicNumber {
        from_cyclic(self.get(i))
    }

    pub fn value<T: Real>(&self, i: usize, prec: u32) -> Cx<T> {
        let mut acc = Cx::zero(prec);
        for (j, &c) in self.get(i).iter().enumerate() {
            if c != 0 {
                acc = acc + Cx::<T>::root_of_unity(j as i64, self.m, prec).mul_i64(c);
            }
        }
        acc
    }

    /// Expand the Euler product Π_ℓ Q_ℓ(ℓ^{−s})^{−1}.
    pub fn expand(
        n: usize,
        m: u64,
        mut factor: impl FnMut(u64) -> Result<LocalFactor, LfunError>,
    ) -> Result<Self, LfunError> {
        let mu = m as usize;
        let spf = spf_table(n);
        let mut data = vec![0i64; (n + 1) * mu];
        if n >= 1 {
            data[mu] = 1;
        }
        for i in 2..=n {
            let p = spf[i] as usize;
            if p == i {
                let lf = factor(p as u64)?.lift_to(m);
                let mut powers = vec![1usize];
                while let Some(q) = powers.last().unwrap().checked_mul(p).filter(|&q| q <= n) {
                    powers.push(q);
                }
                for kk in 1..powers.len() {
                    let mut acc = vec![0i64; mu];
                    for (j, c) in lf.poly.iter().enumerate().skip(1).take(kk) {
                        let prev = &data[powers[kk - j] * mu..(powers[kk - j] + 1) * mu];
                        for (t, v) in cmul(c, prev).into_iter().enumerate() {
                            acc[t] -= v;
                        }
                    }
                    data[powers[kk] * mu..(powers[kk] + 1) * mu].copy_from_slice(&acc);
                }
                continue;
            }
            let mut pe = p;
            while (i / pe) % p == 0 {
                pe *= p;
            }
            if pe == i {
                continue;
            }
            let r = if mu == 1 {
                vec![data[pe].checked_mul(data[i / pe]).expect("coefficient overflow")]
            } else {
                cmul(&data[pe * mu..(pe + 1) * mu], &data[(i / pe) * mu..(i / pe + 1) * mu])
            };
            data[i * mu..(i + 1) * mu].copy_from_slice(&r);
        }
        Ok(Coeffs { m, n, data })
    }
}

fn ap_cache() -> &'static Mutex<HashMap<[i64; 5], Arc<ApTable>>> {
    static C: OnceLock<Mutex<HashMap<[i64; 5], Arc<ApTable>>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Traces a_ℓ for ℓ ≤ bound, memoized per curve for the life of the process.
pub fn ap_table(e: &EllipticCurveModel, bound: u64) -> Arc<ApTable> {
    let mut c = ap_cache().lock().expect("cache lock");
    if let Some(t) = c.get(&e.a) {
        if t.bound() >= bound || t.primes.last().map(|&l| l >= bound).unwrap_or(false) {
            return t.clone();
        }
    }
    let known = c.get(&e.a).map(|t| (**t).clone()).unwrap_or(ApTable { primes: vec![], ap: vec![] });
    let t = Arc::new(ApTable::extend(e, known, bound));
    c.insert(e.a, t.clone());
    t
}

/// Seed the in-process trace memo, e.g. from an on-disk cache.
pub fn seed_ap_table(a: [i64; 5], t: ApTable) {
    ap_cache().lock().expect("cache lock").insert(a, Arc::new(t));
}

fn trace(e: &EllipticCurveModel, t: Option<&ApTable>, ell: u64) -> Result<i64, LfunError> {
    if e.conductor % ell == 0 {
        return Ok(e.reduction(ell).bad_trace());
    }
    Ok(match t.and_then(|t| t.get(ell)) {
        Some(a) => a,
        None => count_ap(e, ell)?,
    })
}

/// P_v(E/K, X) for v of residue degree f over ℓ, in the variable X = Nv^{−s}.
pub fn euler_factor_e_over_kn(e: &EllipticCurveModel, ell: u64, f: u32, a: i64) -> Result<LocalFactor, LfunError> {
    let r = e.reduction(ell);
    Ok(match r.kind {
        ReductionKind::Good => {
            let sf = crate::elliptic::frobenius_trace_extension(a, ell, f)?;
            LocalFactor::from_ints(ell, 1, &[1, -(sf as i64), ell.pow(f) as i64])
        }
        ReductionKind::SplitMultiplicative => LocalFactor::from_ints(ell, 1, &[1, -1]),
        ReductionKind::NonsplitMultiplicative => LocalFactor::from_ints(ell, 1, &[1, if f % 2 == 0 { -1 } else { 1 }]),
        ReductionKind::Additive => LocalFactor::one(ell, 1),
    })
}

/// True when ξ is ramified at the primes above ℓ.
pub fn xi_ramified(xi: &FalseTateCharacter, ell: u64) -> bool {
    if ell == xi.p {
        return xi.chi_exp != 0 || !xi.phi.is_trivial();
    }
    xi.m % ell == 0 && xi.chi_exp != 0
}

/// Exponent e with ξ(v) = ζ_M^e, for v unramified for ξ.
pub fn xi_exponent(xi: &FalseTateCharacter, v: &PrimeOfKn) -> Result<u64, LfunError> {
    if xi.chi_exp == 0 && xi.m % v.ell == 0 {
        let mm = xi.coeff_modulus();
        let nv = powmod(v.ell, v.f as u64, xi.phi.modulus.max(1));
        return xi.phi.exponent_in(nv as i64, mm).ok_or(LfunError::Reps(RepsError::RamifiedAtV(v.ell)));
    }
    Ok(xi.hecke_exponent(v)?)
}

/// P_v(E/K, ξ, X), in the variable X = Nv^{−s}.
pub fn euler_factor_twist(
    e: &EllipticCurveModel,
    xi: &FalseTateCharacter,
    v: &PrimeOfKn,
    a: i64,
) -> Result<LocalFactor, LfunError> {
    let mm = xi.coeff_modulus();
    let ell = v.ell;
    let kind = e.reduction(ell).kind;
    if xi_ramified(xi, ell) {
        if kind == ReductionKind::Additive {
            return Err(LfunError::JointAdditiveRamification(ell));
        }
        return Ok(LocalFactor::one(ell, mm));
    }
    let j = xi_exponent(xi, v)?;
    twist_factor_with_exponent(e, ell, v.f, a, mm, j)
}

fn twist_factor_with_exponent(
    e: &EllipticCurveModel,
    ell: u64,
    f: u32,
    a: i64,
    mm: u64,
    j: u64,
) -> Result<LocalFactor, LfunError> {
    let base = euler_factor_e_over_kn(e, ell, f, a)?;
    let poly = base.poly.iter().enumerate().map(|(i, c)| mono(mm, c[0], j * i as u64)).collect();
    Ok(LocalFactor { ell, m: mm, poly })
}

/// Source of Dirichlet coefficients; determines the whole specification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoeffSource {
    Zeta,
    Dirichlet {
        chi: DirichletChar,
    },
    Curve {
        curve: [i64; 5],
    },
    /// L(E, ψ, s) for a Dirichlet character ψ.
    CurveTwist {
        curve: [i64; 5],
        psi: DirichletChar,
    },
    /// L(Ind ξ, s) = L(K_n, ξ, s).
    Artin {
        xi: FalseTateCharacter,
    },
    /// L(E ⊗ Ind ξ, s) = L(E/K_n, ξ, s). `perturb` replaces ξ(v) by ξ(v)² at one prime above that ℓ.
    Twist {
        curve: [i64; 5],
        xi: FalseTateCharacter,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        perturb: Option<u64>,
    },
    Sym2 {
        curve: [i64; 5],
    },
    Product {
        parts: Vec<CoeffSource>,
    },
}

impl CoeffSource {
    /// Coefficients lie in Z[ζ_M].
    pub fn modulus(&self) -> u64 {
        match self {
            CoeffSource::Zeta | CoeffSource::Curve { .. } | CoeffSource::Sym2 { .. } => 1,
            CoeffSource::Dirichlet { chi } => chi.order().max(1),
            CoeffSource::CurveTwist { psi, .. } => psi.order().max(1),
            CoeffSource::Artin { xi } | CoeffSource::Twist { xi, .. } => xi.coeff_modulus(),
            CoeffSource::Product { parts } => parts.iter().fold(1, |m, p| lcm(m, p.modulus())),
        }
    }

    fn curve(&self) -> Option<[i64; 5]> {
        match self {
            CoeffSource::Curve { curve }
            | CoeffSource::CurveTwist { curve, .. }
            | CoeffSource::Twist { curve, .. }
            | CoeffSource::Sym2 { curve } => Some(*curve),
            _ => None,
        }
    }

    /// Q_ℓ(X), X = ℓ^{−s}.
    pub fn local_factor(&self, ell: u64, ctx: &Ctx) -> Result<LocalFactor, LfunError> {
        let mm = self.modulus();
        match self {
            CoeffSource::Zeta => Ok(LocalFactor::from_ints(ell, 1, &[1, -1])),
            CoeffSource::Dirichlet { chi } => Ok(match chi.exponent_in(ell as i64, mm) {
                Some(j) => LocalFactor { ell, m: mm, poly: vec![mono(mm, 1, 0), mono(mm, -1, j)] },
                None => LocalFactor::one(ell, mm),
            }),
            CoeffSource::Curve { .. } => {
                let e = ctx.curve(self)?;
                let a = trace(e, ctx.table(self), ell)?;
                euler_factor_e_over_kn(e, ell, 1, a)
            }
            CoeffSource::CurveTwist { psi, .. } => {
                let e = ctx.curve(self)?;
                let a = trace(e, ctx.table(self), ell)?;
                match psi.exponent_in(ell as i64, mm) {
                    Some(j) => twist_factor_with_exponent(e, ell, 1, a, mm, j),
                    None if e.reduction(ell).kind == ReductionKind::Additive => {
                        Err(LfunError::JointAdditiveRamification(ell))
                    }
                    None => Ok(LocalFactor::one(ell, mm)),
                }
            }
            CoeffSource::Artin { xi } => {
                if xi_ramified(xi, ell) {
                    return Ok(LocalFactor::one(ell, mm));
                }
                if ell == xi.p {
                    return Ok(LocalFactor::from_ints(ell, mm, &[1, -1]));
                }
                let mut q = LocalFactor::one(ell, mm);
                for v in primes_of_kn(&xi.level(), ell)? {
                    let j = xi_exponent(xi, &v)?;
                    let pv = LocalFactor { ell, m: mm, poly: vec![mono(mm, 1, 0), mono(mm, -1, j)] };
                    q = q.mul(&pv.subst_pow(v.f));
                }
                Ok(q)
            }
            CoeffSource::Twist { xi, perturb, .. } => {
                let e = ctx.curve(self)?;
                let a = trace(e, ctx.table(self), ell)?;
                if ell == xi.p {
                    if xi_ramified(xi, ell) {
                        if e.reduction(ell).kind == ReductionKind::Additive {
                            return Err(LfunError::JointAdditiveRamification(ell));
                        }
                        return Ok(LocalFactor::one(ell, mm));
                    }
                    // ξ trivial, one prime of degree 1 above p
                    return twist_factor_with_exponent(e, ell, 1, a, mm, 0);
                }
                let mut q = LocalFactor::one(ell, mm);
                for (i, v) in primes_of_kn(&xi.level(), ell)?.iter().enumerate() {
                    let mut pv = euler_factor_twist(e, xi, v, a)?;
                    if *perturb == Some(ell) && i == 0 && !xi_ramified(xi, ell) {
                        let j = xi_exponent(xi, v)?;
                        pv = twist_factor_with_exponent(e, ell, v.f, a, mm, 2 * j)?;
                    }
                    q = q.mul(&pv.subst_pow(v.f));
                }
                Ok(q)
            }
            CoeffSource::Sym2 { .. } => {
                let e = ctx.curve(self)?;
                let a = trace(e, ctx.table(self), ell)?;
                let l = ell as i64;
                Ok(match e.reduction(ell).kind {
                    ReductionKind::Good => {
                        let t = a * a - l;
                        // a term that overflows sits at ℓ^k far beyond any table length
                        let c: Vec<i64> = [Some(1), Some(-t), l.checked_mul(t), l.checked_pow(3).map(|x| -x)]
                            .into_iter()
                            .map_while(|x| x)
                            .collect();
                        LocalFactor::from_ints(ell, 1, &c)
                    }
                    ReductionKind::Additive => return Err(LfunError::JointAdditiveRamification(ell)),
                    _ => LocalFactor::from_ints(ell, 1, &[1, -1]),
                })
            }
            CoeffSource::Product { parts } => {
                let mut q = LocalFactor::one(ell, mm);
                for (i, p) in parts.iter().enumerate() {
                    q = q.mul(&p.local_factor(ell, &ctx.parts[i])?);
                }
                Ok(q)
            }
        }
    }
}

/// Curves and trace tables needed while expanding coefficients.
pub struct Ctx {
    curve: Option<EllipticCurveModel>,
    table: Option<Arc<ApTable>>,
    parts: Vec<Ctx>,
}

impl Ctx {
    pub fn new(src: &CoeffSource, n: usize) -> Result<Self, LfunError> {
        let curve = src.curve().map(EllipticCurveModel::new).transpose()?;
        let table = curve.as_ref().map(|e| ap_table(e, n as u64));
        let parts = match src {
            CoeffSource::Product { parts } => parts.iter().map(|p| Ctx::new(p, n)).collect::<Result<_, _>>()?,
            _ => Vec::new(),
        };
        Ok(Ctx { curve, table, parts })
    }

    fn curve(&self, _: &CoeffSource) -> Result<&EllipticCurveModel, LfunError> {
        Ok(self.curve.as_ref().expect("curve source"))
    }

    fn table(&self, _: &CoeffSource) -> Option<&ApTable> {
        self.table.as_deref()
    }
}

/// Λ(s) = q^{s/2} Π Γ_R(s + λ_j) L(s) = ε·conj(Λ)(k − s).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LFunctionSpec {
    pub degree: usize,
    pub conductor: u64,
    pub gamma_shifts: Vec<u32>,
    /// k in s ↦ k − s.
    pub reflection_point: u32,
    pub root_number: Option<[f64; 2]>,
    /// Poles of Λ as (location, residue).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub poles: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub conductor_candidates: Vec<u64>,
    pub coeffs_source: CoeffSource,
}

impl LFunctionSpec {
    pub fn coefficients(&self, n: usize) -> Result<Coeffs, LfunError> {
        let ctx = Ctx::new(&self.coeffs_source, n)?;
        Coeffs::expand(n, self.coeffs_source.modulus(), |ell| self.coeffs_source.local_factor(ell, &ctx))
    }

    pub fn with_conductor(&self, q: u64) -> Self {
        LFunctionSpec { conductor: q, ..self.clone() }
    }

    /// Product of specifications: Dirichlet convolution of coefficients.
    pub fn product(parts: &[LFunctionSpec]) -> Self {
        let mut shifts: Vec<u32> = parts.iter().flat_map(|p| p.gamma_shifts.clone()).collect();
        shifts.sort_unstable();
        let rn = parts.iter().try_fold([1.0f64, 0.0], |acc, p| {
            p.root_number.map(|r| [acc[0] * r[0] - acc[1] * r[1], acc[0] * r[1] + acc[1] * r[0]])
        });
        LFunctionSpec {
            degree: parts.iter().map(|p| p.degree).sum(),
            conductor: parts.iter().map(|p| p.conductor).product(),
            gamma_shifts: shifts,
            reflection_point: parts[0].reflection_point,
            root_number: rn,
            poles: Vec::new(),
            conductor_candidates: Vec::new(),
            coeffs_source: CoeffSource::Product { parts: parts.iter().map(|p| p.coeffs_source.clone()).collect() },
        }
    }
}

/// N(ρ) for ρ = Ind ξ from Q(μ₃), from the Hecke conductor of ξ.
pub fn artin_conductor_k1(xi: &FalseTateCharacter) -> Result<u64, LfunError> {
    let (c, l) = hecke_conductor(xi)?;
    Ok(3 * 3u64.pow(c) * (l * l) as u64)
}

/// Build a specification. Conductors of induced representations are taken from
/// the algebraic Hecke conductor when p^n = 3 and are otherwise provisional;
/// `conductor_candidates` lists the set for [`super::conductor_search`].
pub fn assemble_spec(src: CoeffSource) -> Result<LFunctionSpec, LfunError> {
    let mut spec = LFunctionSpec {
        degree: 1,
        conductor: 1,
        gamma_shifts: vec![0],
        reflection_point: 1,
        root_number: None,
        poles: Vec::new(),
        conductor_candidates: Vec::new(),
        coeffs_source: src.clone(),
    };
    match &src {
        CoeffSource::Zeta => {
            spec.root_number = Some([1.0, 0.0]);
            spec.poles = vec![[1.0, 1.0], [0.0, -1.0]];
        }
        CoeffSource::Dirichlet { chi } => {
            spec.conductor = chi.conductor();
            spec.gamma_shifts = vec![u32::from(!chi.is_even())];
            if chi.conductor() == 1 {
                spec.root_number = Some([1.0, 0.0]);
                spec.poles = vec![[1.0, 1.0], [0.0, -1.0]];
            }
        }
        CoeffSource::Curve { curve } => {
            let e = EllipticCurveModel::new(*curve)?;
            spec.degree = 2;
            spec.conductor = e.conductor;
            spec.gamma_shifts = vec![0, 1];
            spec.reflection_point = 2;
        }
        CoeffSource::CurveTwist { curve, psi } => {
            let e = EllipticCurveModel::new(*curve)?;
            let q = psi.conductor();
            spec.degree = 2;
            spec.conductor = e.conductor * q * q;
            spec.gamma_shifts = vec![0, 1];
            spec.reflection_point = 2;
        }
        CoeffSource::Artin { xi } => {
            let rho = ArtinRepFT::induced(xi.p, xi.n, xi.m, xi.chi_exp, xi.phi.clone())?;
            spec.degree = rho.dim as usize;
            spec.gamma_shifts = [vec![0; rho.d_plus as usize], vec![1; rho.d_minus as usize]].concat();
            spec.conductor_candidates = rho.conductor_candidates.clone();
            spec.conductor = if xi.p.pow(xi.n) == 3 { artin_conductor_k1(xi)? } else { 0 };
        }
        CoeffSource::Twist { curve, xi, .. } => {
            let e = EllipticCurveModel::new(*curve)?;
            let rho = ArtinRepFT::induced(xi.p, xi.n, xi.m, xi.chi_exp, xi.phi.clone())?;
            let dim = rho.dim as u32;
            let ne = e.conductor.pow(dim);
            spec.degree = 2 * dim as usize;
            spec.gamma_shifts = [vec![0; dim as usize], vec![1; dim as usize]].concat();
            spec.reflection_point = 2;
            spec.conductor_candidates = rho.conductor_candidates.iter().map(|c| ne * c * c).collect();
            spec.conductor = if xi.p.pow(xi.n) == 3 {
                let c = artin_conductor_k1(xi)?;
                ne * c * c
            } else {
                0
            };
        }
        CoeffSource::Sym2 { curve } => {
            let e = EllipticCurveModel::new(*curve)?;
            spec.degree = 3;
            spec.conductor = e.conductor * e.conductor;
            spec.gamma_shifts = vec![0, 0, 1];
            spec.reflection_point = 3;
            spec.root_number = Some([1.0, 0.0]);
        }
        CoeffSource::Product { parts } => {
            let specs = parts.iter().cloned().map(assemble_spec).collect::<Result<Vec<_>, _>>()?;
            return Ok(LFunctionSpec::product(&specs));
        }
    }
    Ok(spec)
}

/// Cyclotomic value ξ(v) for reporting.
pub fn xi_value(xi: &FalseTateCharacter, v: &PrimeOfKn) -> Result<CyclotomicNumber, LfunError> {
    Ok(hecke_eval(xi, v)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reps::dirichlet::generator_char;
    use crate::reps::CyclotomicLevel;

    const E11: [i64; 5] = [0, -1, 1, -10, -20];

    fn kummer(m: u64) -> FalseTateCharacter {
        FalseTateCharacter::new(3, 1, m, 1, DirichletChar::trivial(1)).unwrap()
    }

    #[test]
    fn local_factor_examples() {
        let e = EllipticCurveModel::new(E11).unwrap();
        let lvl = CyclotomicLevel::new(3, 1).unwrap();
        // (5) inert in Q(μ₃), a_5 = 1
        let v5 = &primes_of_kn(&lvl, 5).unwrap()[0];
        assert_eq!(v5.f, 2);
        let p = euler_factor_e_over_kn(&e, 5, 2, 1).unwrap();
        assert_eq!(p, LocalFactor::from_ints(5, 1, &[1, 9, 25]));
        let t = euler_factor_twist(&e, &kummer(2), v5, 1).unwrap();
        assert_eq!(t.poly, vec![vec![1, 0, 0], vec![9, 0, 0], vec![25, 0, 0]]);
        // 11 inert, split multiplicative
        assert_eq!(euler_factor_e_over_kn(&e, 11, 2, 1).unwrap(), LocalFactor::from_ints(11, 1, &[1, -1]));
        // ξ ramified above 2
        let v2 = &primes_of_kn(&lvl, 2).unwrap()[0];
        assert_eq!(euler_factor_twist(&e, &kummer(2), v2, -2).unwrap(), LocalFactor::one(2, 3));
        // additive: 1; additive with ξ ramified: error
        let e27 = EllipticCurveModel::new([0, 0, 1, 0, -7]).unwrap();
        assert_eq!(euler_factor_e_over_kn(&e27, 3, 1, 0).unwrap(), LocalFactor::one(3, 1));
        let src = CoeffSource::Twist { curve: [0, 0, 1, 0, -7], xi: kummer(2), perturb: None };
        let ctx = Ctx::new(&src, 10).unwrap();
        assert_eq!(src.local_factor(3, &ctx), Err(LfunError::JointAdditiveRamification(3)));
    }

    #[test]
    fn twist_factor_at_multiplicative_prime() {
        // 11 splits in Q(μ₃) when 11 | m is avoided; take m = 2 and ℓ = 37 for 37a1
        let e = EllipticCurveModel::new([0, 0, 1, -1, 0]).unwrap();
        let lvl = CyclotomicLevel::new(3, 1).unwrap();
        let xi = kummer(2);
        for v in primes_of_kn(&lvl, 37).unwrap() {
            let j = xi_exponent(&xi, &v).unwrap();
            let a = e.reduction(37).bad_trace();
            let f = euler_factor_twist(&e, &xi, &v, a).unwrap();
            assert_eq!(f.poly, vec![mono(3, 1, 0), mono(3, -a, j)]);
        }
    }

    #[test]
    fn curve_coefficients_match_point_counts() {
        let spec = assemble_spec(CoeffSource::Curve { curve: E11 }).unwrap();
        let c = spec.coefficients(200).unwrap();
        let direct = crate::elliptic::dirichlet_coeffs_e(&EllipticCurveModel::new(E11).unwrap(), 200);
        for i in 1..=200 {
            assert_eq!(c.get(i)[0], direct[i]);
        }
    }

    #[test]
    fn product_spec_is_convolution() {
        let e = assemble_spec(CoeffSource::Curve { curve: E11 }).unwrap();
        let t = assemble_spec(CoeffSource::Twist { curve: E11, xi: kummer(2), perturb: None }).unwrap();
        let prod = LFunctionSpec::product(&[e.clone(), t.clone()]);
        assert_eq!(prod.degree, 6);
        assert_eq!(prod.conductor, 11 * 121 * 108 * 108);
        let n = 300;
        let (ce, ct, cp) = (e.coefficients(n).unwrap(), t.coefficients(n).unwrap(), prod.coefficients(n).unwrap());
        for i in 1..=n {
            let mut acc = vec![0i64; 3];
            for d in 1..=i {
                if i % d == 0 {
                    for (j, &x) in ct.get(i / d).iter().enumerate() {
                        acc[j] += ce.get(d)[0] * x;
                    }
                }
            }
            assert!(from_cyclic(&acc).same_value(&cp.exact(i)), "n = {i}");
        }
    }

    #[test]
    fn twist_coefficients_obey_divisor_bound() {
        let t = assemble_spec(CoeffSource::Twist { curve: E11, xi: kummer(2), perturb: None }).unwrap();
        let c = t.coefficients(10_000).unwrap();
        let spf = spf_table(10_000);
        for n in 1..=10_000usize {
            // d_4(n) from the factorization
            let (mut x, mut d4) = (n, 1u64);
            while x > 1 {
                let p = spf[x] as usize;
                let mut e = 0u64;
                while x % p == 0 {
                    x /= p;
                    e += 1;
                }
                d4 *= (e + 1) * (e + 2) * (e + 3) / 6;
            }
            let v = c.value::<f64>(n, 53).abs();
            assert!(v <= d4 as f64 * (n as f64).sqrt() + 1e-6, "n = {n}: {v} > {d4}·√n");
        }
    }

    #[test]
    fn local_factors_are_galois_equivariant() {
        // ξ^a has local factors σ_a(P_v(ξ))
        let e = EllipticCurveModel::new(E11).unwrap();
        let lvl = CyclotomicLevel::new(3, 1).unwrap();
        let phi = generator_char(3, 2).pow(2);
        let xi = FalseTateCharacter::new(3, 1, 2, 1, phi).unwrap();
        let mut pairs = 0;
        for ell in crate::exact::arith::primes_up_to(400) {
            if ell == 3 || ell == 2 || ell == 11 {
                continue;
            }
            let a = count_ap(&e, ell).unwrap();
            for v in primes_of_kn(&lvl, ell).unwrap() {
                let base = euler_factor_twist(&e, &xi, &v, a).unwrap().coefficients();
                for aa in [1i64, 2, 4, 5, 7, 8] {
                    let conj = euler_factor_twist(&e, &xi.pow(aa), &v, a).unwrap().coefficients();
                    for (x, y) in base.iter().zip(&conj) {
                        assert!(x.galois_apply(aa).unwrap().same_value(y));
                    }
                    pairs += 1;
                }
            }
        }
        assert!(pairs >= 100);
    }

    #[test]
    fn spec_json_roundtrip() {
        let t = assemble_spec(CoeffSource::Twist { curve: E11, xi: kummer(2), perturb: None }).unwrap();
        assert_eq!(t.conductor, 121 * 108 * 108);
        let s = serde_json::to_string(&t).unwrap();
        assert!(s.contains("\"gamma_shifts\":[0,0,1,1]"));
        let back: LFunctionSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
    }
}
