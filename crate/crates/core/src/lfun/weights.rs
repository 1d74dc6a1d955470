//! Incomplete Mellin transforms of γ(s) = Π Γ_R(s + λ_j).
//!
//! With φ the inverse Mellin transform of γ,
//! G_s(x) = ∫_1^∞ φ(xu) u^s du/u = π^{−Σλ/2} H_σ(π^d x²), σ = s/2, where
//! H_σ(Y) = (1/2πi) ∫ Π Γ(u + b_j) Y^{−u} du/(u − σ) and b_j = λ_j/2.
//!
//! H is evaluated by its residue series (small Y) or its asymptotic series
//! (large Y), then tabulated as Taylor cells in t = log Y. Higher Taylor
//! coefficients come from the differential equation
//! Π(b_j − θ)(θ + σ)H = Y(θ + σ)H, θ = d/dt.

use crate::real::{MpFloat, Real};

type F = MpFloat;

fn k(x: i64, p: u32) -> F {
    F::from_i64(x, p)
}

fn half(x2: i64, p: u32) -> F {
    k(x2, p) / k(2, p)
}

fn ser_mul(a: &[F], b: &[F], n: usize, p: u32) -> Vec<F> {
    let mut out = vec![k(0, p); n];
    for (i, ai) in a.iter().enumerate().take(n) {
        for (j, bj) in b.iter().enumerate().take(n - i) {
            out[i + j] += ai.clone() * bj;
        }
    }
    out
}

/// exp of a series with zero constant term.
fn ser_exp(a: &[F], n: usize, p: u32) -> Vec<F> {
    let mut e = vec![k(0, p); n];
    e[0] = k(1, p);
    for m in 1..n {
        let mut acc = k(0, p);
        for j in 1..=m.min(a.len().saturating_sub(1)) {
            acc += a[j].mul_i64(j as i64) * &e[m - j];
        }
        e[m] = acc / k(m as i64, p);
    }
    e
}

/// Laurent data of Γ(a + ε) as a moves down through a, a − 1, a − 2, …
enum GammaState {
    /// Γ(a) and ψ^{(i)}(a).
    Reg { a2: i64, g: F, psi: Vec<F> },
    /// a = −n; series of Π_{i=1}^n 1/(ε − i), to be multiplied by Γ(1+ε)/ε.
    Pole { n: i64, h: Vec<F> },
}

impl GammaState {
    fn new(a2: i64, r: usize, p: u32) -> Self {
        if a2 <= 0 && a2 % 2 == 0 {
            let mut h = vec![k(0, p); r];
            h[0] = k(1, p);
            let mut st = GammaState::Pole { n: 0, h };
            for _ in 0..(-a2 / 2) {
                st.step(r, p);
            }
            return st;
        }
        // start at 1 or 1/2
        let (mut a2c, mut g, mut psi) = if a2 % 2 == 0 {
            let mut psi = vec![-F::euler_gamma(p)];
            let mut fact = k(1, p);
            for i in 1..r.max(1) {
                fact = fact.mul_i64(i as i64);
                let z = F::zeta_int(i as u32 + 1, p) * &fact;
                psi.push(if i % 2 == 1 { z } else { -z });
            }
            (2, k(1, p), psi)
        } else {
            let ln2 = k(2, p).ln();
            let mut psi = vec![-F::euler_gamma(p) - ln2.mul_i64(2)];
            let mut fact = k(1, p);
            for i in 1..r.max(1) {
                fact = fact.mul_i64(i as i64);
                let z = F::zeta_int(i as u32 + 1, p) * &fact * &(k(2, p).powi(i as i64 + 1) - k(1, p));
                psi.push(if i % 2 == 1 { z } else { -z });
            }
            (1, F::pi(p).sqrt(), psi)
        };
        while a2c < a2 {
            let a = half(a2c, p);
            let mut fact = k(1, p);
            for (i, ps) in psi.iter_mut().enumerate() {
                if i > 0 {
                    fact = fact.mul_i64(i as i64);
                }
                let t = fact.clone() / a.powi(i as i64 + 1);
                if i % 2 == 0 {
                    *ps += &t;
                } else {
                    *ps -= &t;
                }
            }
            g *= &a;
            a2c += 2;
        }
        let mut st = GammaState::Reg { a2: a2c, g, psi };
        while a2c > a2 {
            st.step(r, p);
            a2c -= 2;
        }
        st
    }

    /// a ↦ a − 1.
    fn step(&mut self, r: usize, p: u32) {
        match self {
            GammaState::Reg { a2, g, psi } => {
                if *a2 == 2 {
                    let mut h = vec![k(0, p); r];
                    h[0] = k(1, p);
                    *self = GammaState::Pole { n: 0, h };
                    return;
                }
                let am1 = half(*a2 - 2, p);
                *g /= &am1;
                let mut fact = k(1, p);
                for (i, ps) in psi.iter_mut().enumerate() {
                    if i > 0 {
                        fact = fact.mul_i64(i as i64);
                    }
                    let t = fact.clone() / am1.powi(i as i64 + 1);
                    if i % 2 == 0 {
                        *ps -= &t;
                    } else {
                        *ps += &t;
                    }
                }
                *a2 -= 2;
            }
            GammaState::Pole { n, h } => {
                *n += 1;
                // 1/(ε − n) = −(1/n) Σ (ε/n)^t
                let inv = k(1, p) / k(*n, p);
                let mut f = Vec::with_capacity(r);
                let mut c = -inv.clone();
                for _ in 0..r {
                    f.push(c.clone());
                    c *= &inv;
                }
                *h = ser_mul(h, &f, r, p);
            }
        }
    }

    /// (valuation, series) of Γ(a + ε).
    fn laurent(&self, gam1: &[F], r: usize, p: u32) -> (i32, Vec<F>) {
        match self {
            GammaState::Pole { h, .. } => (-1, ser_mul(gam1, h, r, p)),
            GammaState::Reg { g, psi, .. } => {
                let mut a = vec![k(0, p); r];
                let mut fact = k(1, p);
                for i in 1..r {
                    fact = fact.mul_i64(i as i64);
                    a[i] = psi[i - 1].clone() / &fact;
                }
                let mut e = ser_exp(&a, r, p);
                for x in e.iter_mut() {
                    *x *= g;
                }
                (0, e)
            }
        }
    }
}

/// Series of Γ(1 + ε) = exp(−γε + Σ_{k≥2} (−1)^k ζ(k) ε^k / k).
fn gamma1_series(r: usize, p: u32) -> Vec<F> {
    let mut a = vec![k(0, p); r];
    if r > 1 {
        a[1] = -F::euler_gamma(p);
    }
    for (i, ai) in a.iter_mut().enumerate().skip(2) {
        let z = F::zeta_int(i as u32, p) / k(i as i64, p);
        *ai = if i % 2 == 0 { z } else { -z };
    }
    ser_exp(&a, r, p)
}

/// H_σ and G_s for a fixed multiset of Γ_R shifts.
pub struct WeightFn {
    /// 2b_j = λ_j.
    b2: Vec<i64>,
    d: usize,
    /// The point s; σ = s/2.
    pub s: f64,
    prec: u32,
    pub cells: Vec<Cell>,
}

/// Taylor cell: G(t0 + u) ≈ Σ coef_k u^k for t0 + u ∈ [t_lo, t_hi].
#[derive(Clone, Debug)]
pub struct Cell {
    pub t_lo: f64,
    pub t_hi: f64,
    pub t0: F,
    pub coef: Vec<F>,
    pub log2_mag: f64,
}

/// A [`Cell`] converted to the evaluation scalar.
#[derive(Clone, Debug)]
pub struct CellT<T> {
    pub t_lo: f64,
    pub t_hi: f64,
    pub t0: T,
    pub coef: Vec<T>,
}

impl WeightFn {
    pub fn new(shifts: &[u32], s: f64, prec: u32) -> Self {
        let b2 = shifts.iter().map(|&l| l as i64).collect::<Vec<_>>();
        WeightFn { d: b2.len(), b2, s, prec, cells: Vec::new() }
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    fn sigma(&self, p: u32) -> F {
        F::from_f64(self.s, p) / k(2, p)
    }

    /// π^{−Σλ/2}.
    fn prefactor(&self, p: u32) -> F {
        let sl: i64 = self.b2.iter().sum();
        (F::pi(p).ln() * &half(-sl, p)).exp()
    }

    /// θ^i H_σ(Y) for i = 0..=d.
    pub fn derivs(&self, y: &F, prec: u32) -> Vec<F> {
        if let Some(v) = self.asymptotic(y, prec) {
            return v;
        }
        self.residue_series(y, prec)
    }

    /// G_s(x), evaluated directly.
    pub fn value(&self, x: &F) -> F {
        let p = self.prec;
        let y = F::pi(p).powi(self.d as i64) * x * x;
        self.derivs(&y, p)[0].clone() * &self.prefactor(p)
    }

    fn zf(&self, y: &F) -> f64 {
        (y.log2_abs() * std::f64::consts::LN_2 / self.d as f64).exp()
    }

    pub fn residue_series(&self, y: &F, prec: u32) -> Vec<F> {
        let d = self.d;
        let zf = self.zf(y);
        let extra = (2.0 * d as f64 * zf / std::f64::consts::LN_2).ceil() as u32;
        let p = prec + 40 + extra;
        let y = y.with_prec(p);
        let lny = y.ln();
        let sig = self.sigma(p);
        let sig2 = self.s;
        let r = d + 2;
        let gam1 = gamma1_series(r, p);
        let mut out = vec![k(0, p); d + 1];

        let mut classes: Vec<(i64, i64)> = Vec::new();
        for c in 0..2i64 {
            let m0 = self.b2.iter().filter(|&&b| b.rem_euclid(2) == c).map(|&b| (b - c) / 2).min();
            if let Some(m0) = m0 {
                classes.push((c, m0));
            }
        }
        let collides = |u2: i64| sig2.fract() == 0.0 && sig2 as i64 == u2;
        let sigma_is_pole = classes
            .iter()
            .any(|&(c, m0)| sig2.fract() == 0.0 && (sig2 as i64).rem_euclid(2) == c && (sig2 as i64) <= -c - 2 * m0);
        if !sigma_is_pole {
            let mut g = (-(lny.clone() * &sig)).exp();
            for &b in &self.b2 {
                g *= &(sig.clone() + &half(b, p)).gamma();
            }
            let mut pw = k(1, p);
            for o in out.iter_mut() {
                *o += g.clone() * &pw;
                pw *= &(-sig.clone());
            }
        }

        let mut binom = vec![vec![0i64; d + 1]; d + 1];
        for i in 0..=d {
            binom[i][0] = 1;
            for t in 1..=i {
                binom[i][t] = binom[i - 1][t - 1] + if t < i { binom[i - 1][t] } else { 0 };
            }
        }

        for &(c, m0) in &classes {
            let mut states: Vec<GammaState> = self.b2.iter().map(|&b| GammaState::new(b - c - 2 * m0, r, p)).collect();
            // Y^{−u0} with 2u0 = −c − 2m
            let mut ypow = (lny.clone() * &half(c + 2 * m0, p)).exp();
            let mut maxlog = f64::NEG_INFINITY;
            let mut small = 0;
            let mut m = m0;
            loop {
                let u2 = -c - 2 * m;
                let u0 = half(u2, p);
                let mut val = 0i32;
                let mut parts: Vec<Vec<F>> = Vec::new();
                for st in &states {
                    let (v, s) = st.laurent(&gam1, r, p);
                    val += v;
                    parts.push(s);
                }
                let coll = collides(u2);
                if coll {
                    val -= 1;
                } else {
                    let inv = k(1, p) / (u0.clone() - &sig);
                    let mut f = Vec::with_capacity(r);
                    let mut cpow = inv.clone();
                    for _ in 0..r {
                        f.push(cpow.clone());
                        cpow *= &(-inv.clone());
                    }
                    parts.push(f);
                }
                let rr = (-val) as usize;
                // Y^{−ε} = exp(−Lε)
                let mut ly = vec![k(0, p); rr.max(1)];
                let mut fact = k(1, p);
                let mut pw = k(1, p);
                for (t, lt) in ly.iter_mut().enumerate() {
                    if t > 0 {
                        fact = fact.mul_i64(t as i64);
                        pw *= &(-lny.clone());
                    }
                    *lt = pw.clone() / &fact;
                }
                let mut s = ly;
                for part in &parts {
                    s = ser_mul(&s, part, rr.max(1), p);
                }
                for x in s.iter_mut() {
                    *x *= &ypow;
                }
                let mut lg = f64::NEG_INFINITY;
                let nu0 = -u0.clone();
                for (i, o) in out.iter_mut().enumerate() {
                    let mut acc = k(0, p);
                    for t in 0..=i.min(rr - 1) {
                        let mut term = s[rr - 1 - t].clone() * &nu0.powi((i - t) as i64);
                        term = term.mul_i64(binom[i][t]);
                        if t % 2 == 1 {
                            acc -= &term;
                        } else {
                            acc += &term;
                        }
                    }
                    lg = lg.max(acc.log2_abs());
                    *o += &acc;
                }
                maxlog = maxlog.max(lg);
                if (m as f64) > zf + d as f64 + 2.0 && lg < maxlog - p as f64 {
                    small += 1;
                    if small >= 2 {
                        break;
                    }
                } else {
                    small = 0;
                }
                for st in states.iter_mut() {
                    st.step(r, p);
                }
                ypow *= &y;
                m += 1;
            }
        }
        out.into_iter().map(|x| x.with_prec(prec)).collect()
    }

    /// Asymptotic expansion; None when it cannot reach 2^{−prec} relative accuracy.
    pub fn asymptotic(&self, y: &F, prec: u32) -> Option<Vec<F>> {
        let d = self.d;
        let zf = self.zf(y);
        if zf < 2.0 {
            return None;
        }
        let p = prec + 40;
        let dd = d as i64;
        let y = y.with_prec(p);
        let z = (y.ln() / k(dd, p)).exp();
        let zinv = k(1, p) / &z;
        let sig = self.sigma(p);
        let sb2: i64 = self.b2.iter().sum();
        let theta = half(sb2 - (dd - 1), p);
        let db: Vec<F> = self.b2.iter().map(|&b| half(b * dd, p)).collect();
        // q_i(β): Π_j (D − d b_j) z^β = Σ_i q_i(β) z^{β+i}
        let qv = |beta: &F| -> Vec<F> {
            let mut v = vec![k(1, p)];
            for bj in &db {
                let mut nv = vec![k(0, p); v.len() + 1];
                for (i, vi) in v.iter().enumerate() {
                    nv[i] += (beta.clone() + &k(i as i64, p) - bj) * vi;
                    nv[i + 1] -= vi.clone().mul_i64(dd);
                }
                v = nv;
            }
            v
        };
        let c0 = (F::pi(p).mul_i64(2).ln() * &half(dd - 1, p)).exp() / k(dd, p).sqrt();
        let mut cs = vec![c0.clone()];
        let mut qs = vec![qv(&theta)];
        let mut hs = vec![c0];
        let tol = -((prec + 30) as f64);
        let kmax = (4.0 * d as f64 * zf) as usize + 60;
        let mut prev = f64::INFINITY;
        let mut zpow = k(1, p);
        let mut done = false;
        for j in 1..kmax {
            qs.push(qv(&(theta.clone() - &k(j as i64, p))));
            let mut acc = k(0, p);
            if d >= 2 {
                for i in 0..=d - 2 {
                    let idx = j as i64 - dd + 1 + i as i64;
                    if idx >= 0 {
                        acc += cs[idx as usize].clone() * &qs[idx as usize][i];
                    }
                }
            }
            let cj = if d >= 2 { -acc / &qs[j][d - 1] } else { k(0, p) };
            cs.push(cj.clone());
            // h_j = c_j + ((θ' − j)/d + σ) h_{j−1}
            let hj = cj + ((theta.clone() - &k(j as i64, p)) / k(dd, p) + &sig) * &hs[j - 1];
            zpow *= &zinv;
            let lt = (hj.clone() * &zpow).log2_abs() - hs[0].log2_abs();
            hs.push(hj);
            if lt < tol {
                done = true;
                break;
            }
            if j > 3 && lt > prev + 8.0 {
                return None;
            }
            prev = prev.min(lt);
        }
        if !done {
            return None;
        }
        // θ^i of e^{−dz} z^γ is e^{−dz} z^γ P_i(z), P_{i+1} = (γ/d − z)P_i + (z/d)P_i'
        let beta = theta - &k(1, p);
        let ez = (-(z.clone().mul_i64(dd))).exp();
        let zb = (z.ln() * &beta).exp();
        let mut out = vec![k(0, p); d + 1];
        let mut zk = k(1, p);
        for (j, hj) in hs.iter().enumerate() {
            let gam = (beta.clone() - &k(j as i64, p)) / k(dd, p);
            let mut poly = vec![k(1, p)];
            for (i, o) in out.iter_mut().enumerate() {
                let mut v = k(0, p);
                let mut zp = k(1, p);
                for c in &poly {
                    v += c.clone() * &zp;
                    zp *= &z;
                }
                *o += v * hj * &zk;
                if i == d {
                    break;
                }
                let mut np = vec![k(0, p); poly.len() + 1];
                for (e, c) in poly.iter().enumerate() {
                    np[e] += c.clone() * &gam;
                    np[e + 1] -= c;
                    np[e] += c.clone().mul_i64(e as i64) / k(dd, p);
                }
                poly = np;
            }
            zk *= &zinv;
        }
        let scale = ez * &zb;
        Some(out.into_iter().map(|x| (x * &scale).with_prec(prec)).collect())
    }

    /// Taylor coefficients D_k/k! at Y from the differential equation.
    fn taylor(&self, y: &F, w: f64, prec: u32) -> Option<Vec<F>> {
        let d = self.d;
        let p = prec + 64;
        let init = self.derivs(y, p);
        let sig = self.sigma(p);
        // Q(θ) = Π(b_j − θ)(θ + σ)
        let mut q = vec![sig.clone(), k(1, p)];
        for &b in &self.b2 {
            let bj = half(b, p);
            let mut nq = vec![k(0, p); q.len() + 1];
            for (i, qi) in q.iter().enumerate() {
                nq[i] += bj.clone() * qi;
                nq[i + 1] -= qi;
            }
            q = nq;
        }
        let top = q[d + 1].clone();
        let mut dv: Vec<F> = init;
        let wl = w.log2();
        let tol = (prec + 10) as f64;
        let mut maxlog = f64::NEG_INFINITY;
        let mut small = 0;
        let mut coef = Vec::new();
        let mut fact = k(1, p);
        for kk in 0..400usize {
            while dv.len() <= kk {
                // D_{kp+d+1} from the recurrence
                let kp = dv.len() - d - 1;
                let mut s = k(0, p);
                let mut bin = k(1, p);
                for j in 0..=kp {
                    if j > 0 {
                        bin = bin.mul_i64((kp - j + 1) as i64) / k(j as i64, p);
                    }
                    s += (dv[j + 1].clone() + &(sig.clone() * &dv[j])) * &bin;
                }
                s *= y;
                for (i, qi) in q.iter().enumerate().take(d + 1) {
                    s -= qi.clone() * &dv[kp + i];
                }
                dv.push(s / &top);
            }
            if kk > 0 {
                fact = fact.mul_i64(kk as i64);
            }
            let c = dv[kk].clone() / &fact;
            let lg = c.log2_abs() + kk as f64 * wl;
            maxlog = maxlog.max(lg);
            coef.push(c.with_prec(prec));
            if kk > 4 && lg < maxlog - tol {
                small += 1;
                if small >= 3 {
                    return Some(coef);
                }
            } else {
                small = 0;
            }
        }
        None
    }

    /// Tabulate cells from t_lo upward until `stop(t, log2|G(t)|)`.
    pub fn tabulate(&mut self, t_lo: f64, mut stop: impl FnMut(f64, f64) -> bool) {
        let p = self.prec;
        let pref = self.prefactor(p + 64);
        let bmax = self.b2.iter().copied().max().unwrap_or(0) as f64 / 2.0;
        let mut lo = self.cells.last().map(|c| c.t_hi).unwrap_or(t_lo);
        let smax = (self.s / 2.0).abs();
        loop {
            let mut w = 0.6 / ((lo + 1.0) / self.d as f64).exp().max(1.0).max(smax + bmax + 1.0);
            w = w.min(0.5);
            let cell = loop {
                let t0 = lo + w;
                let y = F::from_f64(t0, p + 64).exp();
                if let Some(coef) = self.taylor(&y, w, p) {
                    let coef: Vec<F> = coef.into_iter().map(|c| (c * &pref).with_prec(p)).collect();
                    let log2_mag = coef[0].log2_abs();
                    break Cell { t_lo: lo, t_hi: t0 + w, t0: F::from_f64(t0, p), coef, log2_mag };
                }
                w /= 2.0;
            };
            let (th, mag) = (cell.t_hi, cell.log2_mag);
            lo = th;
            self.cells.push(cell);
            if stop(th, mag) {
                break;
            }
        }
    }

    pub fn t_max(&self) -> f64 {
        self.cells.last().map(|c| c.t_hi).unwrap_or(f64::NEG_INFINITY)
    }

    pub fn cells_as<T: Real>(&self, prec: u32) -> Vec<CellT<T>> {
        self.cells
            .iter()
            .map(|c| CellT {
                t_lo: c.t_lo,
                t_hi: c.t_hi,
                t0: T::from_mp(&c.t0, prec),
                coef: c.coef.iter().map(|x| T::from_mp(x, prec)).collect(),
            })
            .collect()
    }
}

/// G at t = log Y, from a table. `tf` is t in double precision for the lookup.
pub fn eval_cells<T: Real>(cells: &[CellT<T>], t: &T, tf: f64) -> Option<T> {
    let i = cells.partition_point(|c| c.t_hi < tf);
    let c = cells.get(i)?;
    if tf < c.t_lo - 1e-9 {
        return None;
    }
    let u = t.clone() - &c.t0;
    let mut acc = c.coef.last()?.clone();
    for x in c.coef.iter().rev().skip(1) {
        acc *= &u;
        acc += x;
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Float;

    fn close(a: &F, b: &F, bits: f64) -> bool {
        let d = (a.clone() - b).log2_abs() - b.log2_abs();
        d < -bits
    }

    fn inc_gamma(a: f64, y: &F, p: u32) -> F {
        MpFloat(Float::with_val(p, a).gamma_inc(&y.0))
    }

    #[test]
    fn degree_one_is_incomplete_gamma() {
        let p = 120;
        for &(sh, s) in &[(0u32, 2.0f64), (0, 0.7), (1, 1.0), (1, 0.0), (0, -1.0)] {
            let w = WeightFn::new(&[sh], s, p);
            for &x in &[0.05f64, 0.4, 1.0, 2.5, 6.0] {
                let xm = F::from_f64(x, p);
                let y = F::pi(p) * &xm * &xm;
                let a = s / 2.0 + sh as f64 / 2.0;
                let h = inc_gamma(a, &y, p) * &(y.ln() * &F::from_f64(-s / 2.0, p)).exp();
                let want = h / (F::pi(p).ln() * &F::from_f64(sh as f64 / 2.0, p)).exp();
                let got = w.value(&xm);
                assert!(close(&got, &want, 100.0), "shift {sh} s {s} x {x}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn branches_agree_in_overlap() {
        let p = 100;
        for (sh, s, zz) in [
            (vec![0u32, 1], 1.0, 50.0f64),
            (vec![0, 0, 1, 1], 1.0, 25.0),
            (vec![0, 0, 1], 2.0, 32.0),
            (vec![0, 1], 0.5, 50.0),
        ] {
            let w = WeightFn::new(&sh, s, p);
            let y = F::from_f64(zz, p).powi(sh.len() as i64);
            let a = w.asymptotic(&y, p).unwrap_or_else(|| panic!("asymptotic branch for {sh:?}"));
            let r = w.residue_series(&y, p);
            for (u, v) in a.iter().zip(&r) {
                assert!(close(u, v, 90.0), "{sh:?}: {u} vs {v}");
            }
        }
    }

    #[test]
    fn derivatives_match_differences() {
        let p = 120;
        let w = WeightFn::new(&[0, 0, 1, 1], 1.0, p);
        let t = F::from_f64(1.3, p);
        let h = F::from_f64(1e-12, p);
        let d0 = w.derivs(&t.exp(), p);
        let dp = w.derivs(&(t.clone() + &h).exp(), p);
        let dm = w.derivs(&(t - &h).exp(), p);
        let fd = (dp[0].clone() - &dm[0]) / (h.mul_i64(2));
        assert!(close(&fd, &d0[1], 60.0));
    }

    #[test]
    fn cells_reproduce_direct_values() {
        let p = 110;
        for (sh, s) in
            [(vec![0u32, 0, 1, 1], 1.0), (vec![0, 1], 1.0), (vec![0], 2.0), (vec![0], -1.0), (vec![0, 0, 1], 1.0)]
        {
            let mut w = WeightFn::new(&sh, s, p);
            w.tabulate(-12.0, |t, m| t > 14.0 || m < -300.0);
            let cells = w.cells_as::<F>(p);
            let pref = w.prefactor(p);
            for i in 0..40 {
                let tf = -11.7 + i as f64 * 0.6487;
                if tf > w.t_max() {
                    break;
                }
                let t = F::from_f64(tf, p);
                let got = eval_cells(&cells, &t, tf).unwrap();
                let want = w.derivs(&t.exp(), p)[0].clone() * &pref;
                assert!(close(&got, &want, 100.0), "{sh:?} t={tf}: {got} vs {want}");
            }
        }
    }
}
