//! Smoothed approximate functional equation.
//!
//! With θ(x) = Σ a_n φ(nx/A) and G_s the incomplete Mellin transform of φ,
//! Λ(s) = τ^s Σ a_n G_s(nτ/A) + ε τ^{s−k} Σ ā_n G_{k−s}(n/(τA)) + Σ_ρ r_ρ τ^{s−ρ}/(s − ρ)
//! for every τ > 0. Three values of τ give the root number (when unknown) and a
//! residual that certifies the assumed functional equation.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::spec::{Coeffs, LFunctionSpec};
use super::weights::{eval_cells, CellT, WeightFn};
use super::LfunError;
use crate::real::{bits_for_digits, Cx, MpFloat, Real};

const TAUS: [(i64, i64); 3] = [(1, 1), (11, 10), (21, 20)];

#[derive(Debug, Clone)]
pub struct EvalResult<T> {
    pub value: Cx<T>,
    pub fe_residual: f64,
    pub terms_used: usize,
    pub solved_root_number: Option<Cx<T>>,
}

type Key = (Vec<u32>, u64, u32, i64);

fn weight_cache() -> &'static Mutex<HashMap<Key, Arc<Mutex<WeightFn>>>> {
    static C: OnceLock<Mutex<HashMap<Key, Arc<Mutex<WeightFn>>>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Working precision of the weight tables and of the MP sums.
fn work_prec(digits: u32) -> u32 {
    bits_for_digits(digits) + 32
}

/// log2 |A^s γ(s)|.
fn log2_scale(spec: &LFunctionSpec, q: u64, s: f64) -> f64 {
    let p = 64;
    let mut g = MpFloat::one(p);
    for &l in &spec.gamma_shifts {
        g *= MpFloat::from_f64((s + l as f64) / 2.0, p).gamma();
    }
    let d = spec.gamma_shifts.len() as f64;
    let lg = g.log2_abs() - (s * d + spec.gamma_shifts.iter().sum::<u32>() as f64) / 2.0 * std::f64::consts::PI.log2();
    lg + s / 2.0 * (q as f64).log2()
}

struct Table {
    s: f64,
    /// Offsets t − 2 ln n for τ_0, τ_1, τ_2.
    offs: [f64; 3],
    cells: Vec<CellT<MpFloat>>,
    t_max: f64,
}

/// Tabulate G_s far enough that every dropped term is below 2^{log2 S − bits}.
fn table(spec: &LFunctionSpec, q: u64, s: f64, primal: bool, target: f64, prec: u32) -> Table {
    let d = spec.gamma_shifts.len() as f64;
    let base = d * std::f64::consts::PI.ln() - (q as f64).ln();
    let offs = TAUS.map(|(a, b)| {
        let lt = (a as f64 / b as f64).ln();
        if primal {
            base + 2.0 * lt
        } else {
            base - 2.0 * lt
        }
    });
    let off_min = offs.iter().cloned().fold(f64::INFINITY, f64::min);
    let t_lo = off_min.floor() as i64 - 1;
    let key = (spec.gamma_shifts.clone(), s.to_bits(), prec, t_lo);
    let wf = {
        let mut c = weight_cache().lock().expect("cache lock");
        c.entry(key).or_insert_with(|| Arc::new(Mutex::new(WeightFn::new(&spec.gamma_shifts, s, prec)))).clone()
    };
    let k = spec.reflection_point as f64;
    let mut stop = move |t: f64, mag: f64| {
        let n = ((t - off_min) / 2.0).exp().max(1.0);
        t > 1.0 && mag + (k - 1.0) / 2.0 * n.log2() + d * (n.ln() + 1.0).log2() + n.log2() + 4.0 < target
    };
    let mut w = wf.lock().expect("weight lock");
    let done = w.cells.last().map(|c| stop(c.t_hi, c.log2_mag)).unwrap_or(false);
    if !done {
        w.tabulate(t_lo as f64, &mut stop);
    }
    Table { s, offs, cells: w.cells_as::<MpFloat>(prec), t_max: w.t_max() }
}

impl Table {
    fn n_max(&self, i: usize) -> usize {
        ((self.t_max - self.offs[i]) / 2.0).exp().floor() as usize
    }
}

struct Plan {
    prim: Table,
    dual: Option<Table>,
    n: usize,
}

fn plan(spec: &LFunctionSpec, q: u64, s: f64, digits: u32, prec: u32) -> Plan {
    let k = spec.reflection_point as f64;
    let target = log2_scale(spec, q, s) - digits as f64 * std::f64::consts::LOG2_10 - 10.0;
    let prim = table(spec, q, s, true, target, prec);
    let dual = table(spec, q, k - s, false, target, prec);
    let n = (0..3).map(|i| prim.n_max(i).max(dual.n_max(i))).max().unwrap_or(1).max(1);
    Plan { prim, dual: Some(dual), n }
}

/// Number of coefficients the evaluation at s0 to `digits` digits will read.
pub fn terms_needed(spec: &LFunctionSpec, s0: f64, digits: u32) -> usize {
    plan(spec, spec.conductor, s0, digits, work_prec(digits)).n
}

struct Slot<'a, T> {
    cells: &'a [CellT<T>],
    off: T,
    off_f: f64,
    n_max: usize,
}

/// Σ_n a_n G(n) per slot, split by the class of ζ_M in a_n.
fn sums<T: Real>(coeffs: &Coeffs, slots: &[Slot<T>], n_all: usize, prec: u32) -> Vec<Vec<T>> {
    let m = coeffs.m as usize;
    let mut acc = vec![vec![T::zero(prec); m]; slots.len()];
    let two = T::from_i64(2, prec);
    for n in 1..=n_all {
        let a = coeffs.get(n);
        if a.iter().all(|&x| x == 0) {
            continue;
        }
        let ln = T::from_i64(n as i64, prec).ln() * &two;
        let lnf = 2.0 * (n as f64).ln();
        for (slot, acc) in slots.iter().zip(acc.iter_mut()) {
            if n > slot.n_max {
                continue;
            }
            let t = ln.clone() + &slot.off;
            let Some(g) = eval_cells(slot.cells, &t, lnf + slot.off_f) else { continue };
            for (j, &c) in a.iter().enumerate() {
                if c == 1 {
                    acc[j] += &g;
                } else if c != 0 {
                    acc[j] += g.mul_i64(c);
                }
            }
        }
    }
    acc
}

fn combine<T: Real>(classes: &[T], conj: bool, prec: u32) -> Cx<T> {
    let m = classes.len() as u64;
    let mut out = Cx::zero(prec);
    for (j, x) in classes.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let e = if conj { -(j as i64) } else { j as i64 };
        out = out + Cx::<T>::root_of_unity(e, m, prec).scale(x);
    }
    out
}

/// Λ(s0) at three values of τ, without a residual threshold.
pub fn evaluate_raw<T: Real>(
    spec: &LFunctionSpec,
    coeffs: Option<&Coeffs>,
    s0: f64,
    digits: u32,
) -> Result<EvalResult<T>, LfunError> {
    let wp = work_prec(digits);
    let pl = plan(spec, spec.conductor, s0, digits, wp);
    let owned;
    let coeffs = match coeffs {
        Some(c) if c.n >= pl.n => c,
        Some(c) => return Err(LfunError::NeedMoreCoefficients { need: pl.n, have: c.n }),
        None => {
            owned = spec.coefficients(pl.n)?;
            &owned
        }
    };
    let prec = T::from_i64(0, wp).prec();
    let k = spec.reflection_point as f64;
    let dual = pl.dual.as_ref().expect("dual table");
    let pc: Vec<CellT<T>> = convert(&pl.prim.cells, prec);
    let dc: Vec<CellT<T>> = convert(&dual.cells, prec);
    let d = spec.gamma_shifts.len() as i64;
    let ln_pi = T::pi(prec).ln();
    let ln_q = T::from_i64(spec.conductor as i64, prec).ln();
    let base = ln_pi.mul_i64(d) - &ln_q;
    let ln_tau: Vec<T> = TAUS.iter().map(|&(a, b)| (T::from_i64(a, prec) / T::from_i64(b, prec)).ln()).collect();
    let mut slots = Vec::new();
    for (i, lt) in ln_tau.iter().enumerate() {
        slots.push(Slot {
            cells: &pc,
            off: base.clone() + lt.mul_i64(2),
            off_f: pl.prim.offs[i],
            n_max: pl.prim.n_max(i),
        });
    }
    for (i, lt) in ln_tau.iter().enumerate() {
        slots.push(Slot { cells: &dc, off: base.clone() - lt.mul_i64(2), off_f: dual.offs[i], n_max: dual.n_max(i) });
    }
    let acc = sums(coeffs, &slots, pl.n, prec);

    let s = T::from_f64(s0, prec);
    let ks = T::from_f64(k - s0, prec);
    debug_assert_eq!(pl.prim.s, s0);
    let mut p = Vec::new();
    let mut qd = Vec::new();
    let mut r = Vec::new();
    for (i, lt) in ln_tau.iter().enumerate() {
        p.push(combine(&acc[i], false, prec).scale(&(lt.clone() * &s).exp()));
        qd.push(combine(&acc[3 + i], true, prec).scale(&(-(lt.clone() * &ks)).exp()));
        let mut rr = Cx::zero(prec);
        for &[rho, res] in &spec.poles {
            let sr = T::from_f64(s0 - rho, prec);
            rr = rr + Cx::from_real((lt.clone() * &sr).exp() * T::from_f64(res, prec) / sr);
        }
        r.push(rr);
    }
    let (eps, solved) = match spec.root_number {
        Some([re, im]) => (Cx::new(T::from_f64(re, prec), T::from_f64(im, prec)), false),
        None => {
            let num = p[1].clone() + &r[1] - &p[0] - &r[0];
            let den = qd[0].clone() - &qd[1];
            if den.abs().is_zero() {
                return Err(LfunError::NoRootNumberConverged { abs: f64::NAN });
            }
            (num / den, true)
        }
    };
    let lam: Vec<Cx<T>> = (0..3).map(|i| p[i].clone() + &(eps.clone() * &qd[i]) + &r[i]).collect();

    // A^s γ(s)
    let mut scale = (ln_q * &s / T::from_i64(2, prec)).exp();
    for &l in &spec.gamma_shifts {
        let x = (s.clone() + T::from_i64(l as i64, prec)) / T::from_i64(2, prec);
        scale *= (-(ln_pi.clone() * &x)).exp() * x.gamma();
    }
    let mut res = (lam[2].clone() - &lam[0]).abs() / &scale;
    if !solved {
        res = T::max_of(res, (lam[1].clone() - &lam[0]).abs() / &scale);
    }
    let mut fe_residual = res.to_f64();
    if solved {
        fe_residual = fe_residual.max((eps.abs().to_f64() - 1.0).abs());
    }
    Ok(EvalResult {
        value: lam[0].clone().scale(&(T::one(prec) / &scale)),
        fe_residual,
        terms_used: pl.n,
        solved_root_number: solved.then_some(eps),
    })
}

fn convert<T: Real>(cells: &[CellT<MpFloat>], prec: u32) -> Vec<CellT<T>> {
    cells
        .iter()
        .map(|c| CellT {
            t_lo: c.t_lo,
            t_hi: c.t_hi,
            t0: T::from_mp(&c.t0, prec),
            coef: c.coef.iter().map(|x| T::from_mp(x, prec)).collect(),
        })
        .collect()
}

/// L(s0) with the functional equation certified to 10^{−(digits−5)}.
pub fn evaluate_l<T: Real>(spec: &LFunctionSpec, s0: f64, digits: u32) -> Result<EvalResult<T>, LfunError> {
    let r = evaluate_raw::<T>(spec, None, s0, digits)?;
    certify(r, digits)
}

fn certify<T>(r: EvalResult<T>, digits: u32) -> Result<EvalResult<T>, LfunError> {
    let threshold = 10f64.powi(-(digits as i32 - 5));
    if r.solved_root_number.is_some() && r.fe_residual > 0.1 {
        return Err(LfunError::NoRootNumberConverged { abs: r.fe_residual });
    }
    if !(r.fe_residual < threshold) {
        return Err(LfunError::ResidualTooLarge { residual: r.fe_residual, threshold });
    }
    Ok(r)
}

#[derive(Debug, Clone)]
pub struct ConductorSearch {
    pub conductor: u64,
    /// (candidate, screening residual) for every candidate.
    pub screen: Vec<(u64, f64)>,
    pub result: EvalResult<MpFloat>,
}

/// Pick the unique candidate conductor satisfying the functional equation at
/// s = k/2 and s = k/2 + 1/4. Candidates are screened in double precision and
/// confirmed at `digits`; the returned evaluation is at `s0`.
pub fn conductor_search(spec: &LFunctionSpec, s0: f64, digits: u32) -> Result<ConductorSearch, LfunError> {
    let cands =
        if spec.conductor_candidates.is_empty() { vec![spec.conductor] } else { spec.conductor_candidates.clone() };
    let k = spec.reflection_point as f64;
    let pts = [k / 2.0, k / 2.0 + 0.25];
    let specs: Vec<LFunctionSpec> = cands.iter().map(|&q| spec.with_conductor(q)).collect();
    let need = specs.iter().flat_map(|sp| pts.iter().map(move |&s| terms_needed(sp, s, 14))).max().unwrap_or(1);
    let coeffs = spec.coefficients(need)?;
    let mut screen = Vec::new();
    for sp in &specs {
        let mut worst = 0.0f64;
        for &s in &pts {
            worst = match evaluate_raw::<f64>(sp, Some(&coeffs), s, 14) {
                Ok(r) => worst.max(r.fe_residual),
                Err(_) => f64::INFINITY,
            };
        }
        screen.push((sp.conductor, if worst.is_nan() { f64::INFINITY } else { worst }));
    }
    let survivors: Vec<&LFunctionSpec> =
        specs.iter().zip(&screen).filter(|(_, &(_, r))| r < 1e-6).map(|(sp, _)| sp).collect();
    let mut confirmed = Vec::new();
    for sp in survivors {
        let need = pts.iter().chain([&s0]).map(|&s| terms_needed(sp, s, digits)).max().unwrap_or(1);
        let c = if need <= coeffs.n { None } else { Some(sp.coefficients(need)?) };
        let c = c.as_ref().unwrap_or(&coeffs);
        let ok = pts.iter().all(|&s| {
            evaluate_raw::<MpFloat>(sp, Some(c), s, digits).map(|r| certify(r, digits).is_ok()).unwrap_or(false)
        });
        if ok {
            let r = certify(evaluate_raw::<MpFloat>(sp, Some(c), s0, digits)?, digits)?;
            confirmed.push((sp.conductor, r));
        }
    }
    match confirmed.len() {
        0 => Err(LfunError::NoCandidate),
        1 => {
            let (conductor, result) = confirmed.pop().expect("one survivor");
            Ok(ConductorSearch { conductor, screen, result })
        }
        _ => Err(LfunError::AmbiguousCandidates(confirmed.iter().map(|c| c.0).collect())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lfun::spec::{assemble_spec, CoeffSource};
    use crate::reps::DirichletChar;

    #[test]
    fn zeta_two() {
        let z = assemble_spec(CoeffSource::Zeta).unwrap();
        let r = evaluate_l::<MpFloat>(&z, 2.0, 25).unwrap();
        let pi = MpFloat::pi(120);
        let want = pi.clone() * &pi / MpFloat::from_i64(6, 120);
        assert!((r.value.re.clone() - &want).abs().to_f64() < 1e-22, "{:?}", r.value);
        assert!(r.value.im.abs().to_f64() < 1e-22);
    }

    #[test]
    fn zeta_in_double_precision() {
        let z = assemble_spec(CoeffSource::Zeta).unwrap();
        let r = evaluate_l::<f64>(&z, 3.0, 14).unwrap();
        assert!((r.value.re - 1.2020569031595942).abs() < 1e-12);
    }

    #[test]
    fn quadratic_character_mod_3() {
        let chi = DirichletChar::new(3, vec![1]).unwrap();
        let sp = assemble_spec(CoeffSource::Dirichlet { chi }).unwrap();
        assert_eq!(sp.gamma_shifts, vec![1]);
        let r = evaluate_l::<MpFloat>(&sp, 1.0, 25).unwrap();
        let p = 120;
        let want = MpFloat::pi(p) / (MpFloat::from_i64(3, p) * MpFloat::from_i64(3, p).sqrt());
        assert!((r.value.re.clone() - &want).abs().to_f64() < 1e-22);
        let eps = r.solved_root_number.unwrap();
        assert!((eps.re.to_f64() - 1.0).abs() < 1e-20);
    }

    #[test]
    fn wrong_root_number_is_detected() {
        let mut z = assemble_spec(CoeffSource::Zeta).unwrap();
        z.root_number = Some([-1.0, 0.0]);
        let r = evaluate_raw::<f64>(&z, None, 2.0, 14).unwrap();
        assert!(r.fe_residual > 1e-3);
    }

    #[test]
    fn search_picks_eleven() {
        let mut sp = assemble_spec(CoeffSource::Curve { curve: [0, -1, 1, -10, -20] }).unwrap();
        sp.conductor_candidates = vec![11, 121];
        let r = conductor_search(&sp, 1.0, 20).unwrap();
        assert_eq!(r.conductor, 11);
        assert!(r.screen.iter().any(|&(q, res)| q == 121 && res > 1e-3));
    }
}
