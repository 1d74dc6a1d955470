//! Real and imaginary periods by the arithmetic-geometric mean.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::curve::EllipticCurveModel;
use super::EllError;
use crate::real::{bits_for_digits, Cx, Real};

/// Ω₊ > 0 and Ω₋ = i·omega_minus_im with omega_minus_im > 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodPair<T> {
    pub omega_plus: T,
    pub omega_minus_im: T,
}

impl<T: Real> PeriodPair<T> {
    pub fn omega_minus(&self) -> Cx<T> {
        Cx::new(T::zero(self.omega_minus_im.prec()), self.omega_minus_im.clone())
    }
}

struct Cubic<T> {
    // f(x) = 4x³ + b2 x² + 2 b4 x + b6
    b2: T,
    b4: T,
    b6: T,
}

impl<T: Real> Cubic<T> {
    fn new(e: &EllipticCurveModel, twist: bool, prec: u32) -> Self {
        let w = e.weierstrass();
        let c = |x: BigInt| T::from_bigint(&x, prec);
        let sg = if twist { -1 } else { 1 };
        Self { b2: c(w.b2()).mul_i64(sg), b4: c(w.b4()), b6: c(w.b6()).mul_i64(sg) }
    }

    fn eval(&self, x: &T) -> T {
        ((x.mul_i64(4) + &self.b2) * x + self.b4.mul_i64(2)) * x + &self.b6
    }

    /// Largest real root by bisection.
    fn largest_root(&self) -> T {
        let prec = self.b2.prec();
        let bnd = T::one(prec) + self.b2.abs() + self.b4.abs() + self.b6.abs();
        // f' = 12x² + 2b2 x + 2b4
        let disc = self.b2.clone() * &self.b2 - self.b4.mul_i64(24);
        let mut lo = -bnd.clone();
        if disc > T::zero(prec) {
            let c2 = (-self.b2.clone() + disc.sqrt()) / T::from_i64(12, prec);
            if self.eval(&c2) <= T::zero(prec) {
                lo = c2;
            }
        }
        let mut hi = bnd;
        let half = T::from_f64(0.5, prec);
        for _ in 0..(prec + 64) {
            let mid = (lo.clone() + &hi) * &half;
            if self.eval(&mid) > T::zero(prec) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        (lo + hi) * half
    }

    /// f(x) = 4(x − e1)(x² + βx + γ).
    fn deflate(&self, e1: &T) -> (T, T) {
        let prec = e1.prec();
        let beta = self.b2.clone() / T::from_i64(4, prec) + e1;
        let gamma = self.b4.clone() / T::from_i64(2, prec) + beta.clone() * e1;
        (beta, gamma)
    }
}

fn agm<T: Real>(a: T, b: T) -> Result<T, EllError> {
    let prec = a.prec();
    let (mut a, mut b) = (a, b);
    let half = T::from_f64(0.5, prec);
    for _ in 0..200 {
        let diff = (a.clone() - &b).abs();
        if diff.is_zero() || diff.log2_abs() < a.log2_abs() - prec as f64 + 4.0 {
            return Ok(a);
        }
        let na = (a.clone() + &b) * &half;
        b = (a * b).sqrt();
        a = na;
    }
    Err(EllError::PrecisionExhausted)
}

/// Ω± to `digits` significant digits.
pub fn compute_periods<T: Real>(e: &EllipticCurveModel, digits: u32) -> Result<PeriodPair<T>, EllError> {
    let prec = bits_for_digits(digits) + 32;
    let f = Cubic::<T>::new(e, false, prec);
    let e1 = f.largest_root();
    let (beta, gamma) = f.deflate(&e1);
    let pi = T::pi(prec);
    let d = beta.clone() * &beta - gamma.mul_i64(4);
    let half = T::from_f64(0.5, prec);
    if e.disc > BigInt::from(0) {
        let s = d.sqrt();
        let e2 = (-beta.clone() + &s) * &half;
        let e3 = (-beta - s) * &half;
        let a13 = (e1.clone() - &e3).sqrt();
        Ok(PeriodPair {
            omega_plus: pi.clone() / agm(a13.clone(), (e1 - &e2).sqrt())?,
            omega_minus_im: pi / agm(a13, (e2 - e3).sqrt())?,
        })
    } else {
        let e2 = Cx::new(-beta * &half, (-d).sqrt() * &half);
        let c = Cx::from_real(e1) - &e2;
        let sc = c.sqrt();
        let sm = (-c.clone()).sqrt();
        let r = c.abs().sqrt();
        Ok(PeriodPair { omega_plus: pi.clone() / agm(sc.re, r.clone())?, omega_minus_im: pi / agm(sm.re, r)? })
    }
}

/// Tanh-sinh quadrature of an analytic integrand on [0, 1].
pub fn tanh_sinh<T: Real>(f: impl Fn(&T) -> T, prec: u32, tol_bits: f64) -> T {
    let pi = T::pi(prec);
    let half = T::from_f64(0.5, prec);
    let one = T::one(prec);
    let mut prev: Option<T> = None;
    let tmax = 4.5f64 + (prec as f64 / 200.0);
    for level in 3..14 {
        let h = T::from_f64(2f64.powi(-level), prec);
        let n = (tmax * 2f64.powi(level)) as i64;
        let mut acc = T::zero(prec);
        for k in -n..=n {
            let t = h.mul_i64(k);
            let et = t.exp();
            let (sh, ch) = ((et.clone() - one.clone() / &et) * &half, (et.clone() + one.clone() / &et) * &half);
            let u = pi.clone() * &half * sh;
            let eu = u.exp();
            let ieu = one.clone() / &eu;
            // x = 1/(1 + e^{−2u}), weight = (π/4)·cosh t / cosh² u
            let x = one.clone() / (one.clone() + ieu.clone() * &ieu);
            let chu = (eu + ieu) * &half;
            let wgt = pi.clone() * &half * &half * ch / (chu.clone() * &chu);
            if wgt.log2_abs() < -(prec as f64) - 10.0 {
                continue;
            }
            acc += f(&x) * wgt;
        }
        acc *= &h;
        if let Some(p) = &prev {
            let diff = (acc.clone() - p).abs();
            if diff.is_zero() || diff.log2_abs() < -tol_bits {
                return acc;
            }
        }
        prev = Some(acc);
    }
    prev.unwrap()
}

/// Ω₊ and −iΩ₋ by direct integration along the real locus (independent of the AGM).
pub fn periods_by_quadrature<T: Real>(e: &EllipticCurveModel, digits: u32) -> PeriodPair<T> {
    let prec = bits_for_digits(digits) + 32;
    let one_component = |twist: bool| {
        let f = Cubic::<T>::new(e, twist, prec);
        let e1 = f.largest_root();
        let (beta, gamma) = f.deflate(&e1);
        let one = T::one(prec);
        // 2∫_{e1}^∞ dx/√f = 2∫_0^∞ dt/√q(e1 + t²), split at t = 1 and folded by t = 1/s.
        let q = |x: &T| (x.clone() + &beta) * x + &gamma;
        let head = tanh_sinh(|t: &T| one.clone() / q(&(e1.clone() + t.clone() * t)).sqrt(), prec, (prec - 16) as f64);
        let tail = tanh_sinh(
            |s: &T| {
                let s2 = s.clone() * s;
                let u = one.clone() + e1.clone() * &s2;
                one.clone() / (u.clone() * &u + beta.clone() * &s2 * &u + gamma.clone() * &s2 * &s2).sqrt()
            },
            prec,
            (prec - 16) as f64,
        );
        (head + tail).mul_i64(2)
    };
    PeriodPair { omega_plus: one_component(false), omega_minus_im: one_component(true) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::MpFloat;

    #[test]
    fn omega_11a1() {
        let e = EllipticCurveModel::new([0, -1, 1, -10, -20]).unwrap();
        let p: PeriodPair<MpFloat> = compute_periods(&e, 30).unwrap();
        assert!((p.omega_plus.to_f64() - 1.269_209_304_279_55).abs() < 1e-13);
        assert!(p.omega_minus_im > MpFloat::zero(64));
        // Im(Ω₋/Ω₊) > 0
        let r = p.omega_minus() / Cx::from_real(p.omega_plus.clone());
        assert!(r.im > MpFloat::zero(64));
    }

    #[test]
    fn omega_37a1() {
        let e = EllipticCurveModel::new([0, 0, 1, -1, 0]).unwrap();
        let p: PeriodPair<f64> = compute_periods(&e, 15).unwrap();
        assert!((p.omega_plus - 2.993_458_646_231_96).abs() < 1e-12);
        assert!((p.omega_minus_im - 2.451_389_381_986_5).abs() < 1e-9);
    }

    #[test]
    fn agm_matches_quadrature() {
        let digits = 30;
        for a in [
            [0, -1, 1, -10, -20],
            [0, 0, 1, -1, 0],
            [1, 0, 1, 4, -6],
            [1, 1, 1, -10, -10],
            [0, 0, 0, -1, 0],
            [0, 0, 1, 0, -7],
        ] {
            let e = EllipticCurveModel::new(a).unwrap();
            let x: PeriodPair<MpFloat> = compute_periods(&e, digits).unwrap();
            let y: PeriodPair<MpFloat> = periods_by_quadrature(&e, digits);
            for (u, v) in [(&x.omega_plus, &y.omega_plus), (&x.omega_minus_im, &y.omega_minus_im)] {
                let rel = ((u.clone() - v) / u).abs().log2_abs() / std::f64::consts::LOG2_10;
                assert!(rel < -(digits as f64 - 3.0), "{a:?} {u} {v}");
            }
        }
    }
}
