//! Scalar abstraction: `f64` for screening, MPFR floats for final values.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rug::float::Constant;
use rug::Float;

/// Bits of precision needed for `digits` decimal digits.
pub fn bits_for_digits(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 8
}

pub trait Real:
    Clone
    + Send
    + Sync
    + fmt::Debug
    + PartialEq
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
    + for<'a> DivAssign<&'a Self>
{
    /// Working precision in bits (53 for `f64`).
    fn prec(&self) -> u32;
    /// Copy at another precision. No-op for `f64`.
    fn with_prec(&self, prec: u32) -> Self;
    fn from_f64(x: f64, prec: u32) -> Self;
    fn from_i64(x: i64, prec: u32) -> Self;
    fn from_bigint(x: &BigInt, prec: u32) -> Self;
    fn from_ratio(x: &BigRational, prec: u32) -> Self {
        Self::from_bigint(x.numer(), prec) / Self::from_bigint(x.denom(), prec)
    }
    fn to_f64(&self) -> f64;
    fn from_mp(x: &MpFloat, prec: u32) -> Self;
    fn pi(prec: u32) -> Self;
    fn euler_gamma(prec: u32) -> Self;
    /// ζ(k) for integer k ≥ 2.
    fn zeta_int(k: u32, prec: u32) -> Self;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sin_cos(&self) -> (Self, Self);
    fn atan2(&self, x: &Self) -> Self;
    fn gamma(&self) -> Self;
    fn abs(&self) -> Self;
    fn floor(&self) -> Self;
    fn mul_i64(&self, k: i64) -> Self;
    fn is_zero(&self) -> bool;
    /// Nearest integer; panics on non-finite input.
    fn round_bigint(&self) -> BigInt;
    /// log2 |x|, valid far outside the `f64` exponent range. `-inf` for zero.
    fn log2_abs(&self) -> f64;
    /// Decimal string with `digits` significant digits.
    fn to_decimal(&self, digits: usize) -> String;

    fn zero(prec: u32) -> Self {
        Self::from_i64(0, prec)
    }
    fn one(prec: u32) -> Self {
        Self::from_i64(1, prec)
    }
    fn powi(&self, n: i64) -> Self {
        let mut base = if n < 0 { Self::one(self.prec()) / self } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one(self.prec());
        while e > 0 {
            if e & 1 == 1 {
                acc *= &base;
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * &base;
            }
        }
        acc
    }
    /// x^y for x > 0.
    fn powf(&self, y: &Self) -> Self {
        (self.ln() * y).exp()
    }
    fn max_of(a: Self, b: Self) -> Self {
        if a >= b {
            a
        } else {
            b
        }
    }
}

impl Real for f64 {
    fn prec(&self) -> u32 {
        53
    }
    fn with_prec(&self, _: u32) -> Self {
        *self
    }
    fn from_f64(x: f64, _: u32) -> Self {
        x
    }
    fn from_i64(x: i64, _: u32) -> Self {
        x as f64
    }
    fn from_bigint(x: &BigInt, _: u32) -> Self {
        x.to_f64().unwrap_or(f64::NAN)
    }
    fn from_ratio(x: &BigRational, _: u32) -> Self {
        x.to_f64().unwrap_or(f64::NAN)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn from_mp(x: &MpFloat, _: u32) -> Self {
        x.0.to_f64()
    }
    fn pi(_: u32) -> Self {
        std::f64::consts::PI
    }
    fn euler_gamma(_: u32) -> Self {
        0.577_215_664_901_532_9
    }
    fn zeta_int(k: u32, _: u32) -> Self {
        // Euler-Maclaurin with a short head.
        const B: [f64; 5] = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0];
        let n = 30.0f64;
        let s = k as f64;
        let mut acc: f64 = (1..30).map(|j| (j as f64).powf(-s)).sum();
        acc += n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
        // B_{2j}/(2j)! · s(s+1)…(s+2j−2) · n^{−s−2j+1}
        let mut rising = s;
        let mut fact = 2.0;
        for (j, b) in B.iter().enumerate() {
            let m = 2 * j as i32 + 2;
            acc += b / fact * rising * n.powi(-(m - 1)) * n.powf(-s);
            rising *= (s + m as f64 - 1.0) * (s + m as f64);
            fact *= (m + 1) as f64 * (m + 2) as f64;
        }
        acc
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sin_cos(&self) -> (Self, Self) {
        f64::sin_cos(*self)
    }
    fn atan2(&self, x: &Self) -> Self {
        f64::atan2(*self, *x)
    }
    fn gamma(&self) -> Self {
        lanczos_gamma(*self)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn floor(&self) -> Self {
        f64::floor(*self)
    }
    fn mul_i64(&self, k: i64) -> Self {
        *self * k as f64
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn round_bigint(&self) -> BigInt {
        num_traits::FromPrimitive::from_f64(self.round()).expect("finite")
    }
    fn log2_abs(&self) -> f64 {
        f64::abs(*self).log2()
    }
    fn to_decimal(&self, digits: usize) -> String {
        format!("{:.*e}", digits.saturating_sub(1).min(16), self)
    }
    fn powf(&self, y: &Self) -> Self {
        f64::powf(*self, *y)
    }
}

fn lanczos_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * lanczos_gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut a = C[0];
        let t = x + G + 0.5;
        for (i, c) in C.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }
}

/// MPFR float with per-value precision. Binary ops take the larger precision.
#[derive(Clone)]
pub struct MpFloat(pub Float);

impl MpFloat {
    pub fn inner(&self) -> &Float {
        &self.0
    }
}

impl fmt::Debug for MpFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(30))
    }
}

impl fmt::Display for MpFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(30))
    }
}

impl PartialEq for MpFloat {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl PartialOrd for MpFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

macro_rules! mp_binop {
    ($tr:ident, $f:ident, $atr:ident, $af:ident) => {
        impl $atr<&MpFloat> for MpFloat {
            fn $af(&mut self, rhs: &MpFloat) {
                if rhs.0.prec() > self.0.prec() {
                    self.0.set_prec(rhs.0.prec());
                }
                $atr::$af(&mut self.0, &rhs.0);
            }
        }
        impl $atr for MpFloat {
            fn $af(&mut self, rhs: MpFloat) {
                $atr::$af(self, &rhs);
            }
        }
        impl $tr<&MpFloat> for MpFloat {
            type Output = MpFloat;
            fn $f(mut self, rhs: &MpFloat) -> MpFloat {
                $atr::$af(&mut self, rhs);
                self
            }
        }
        impl $tr for MpFloat {
            type Output = MpFloat;
            fn $f(mut self, rhs: MpFloat) -> MpFloat {
                $atr::$af(&mut self, &rhs);
                self
            }
        }
    };
}

mp_binop!(Add, add, AddAssign, add_assign);
mp_binop!(Sub, sub, SubAssign, sub_assign);
mp_binop!(Mul, mul, MulAssign, mul_assign);
mp_binop!(Div, div, DivAssign, div_assign);

impl Neg for MpFloat {
    type Output = MpFloat;
    fn neg(self) -> MpFloat {
        MpFloat(-self.0)
    }
}

impl Real for MpFloat {
    fn prec(&self) -> u32 {
        self.0.prec()
    }
    fn with_prec(&self, prec: u32) -> Self {
        MpFloat(Float::with_val(prec, &self.0))
    }
    fn from_f64(x: f64, prec: u32) -> Self {
        MpFloat(Float::with_val(prec, x))
    }
    fn from_i64(x: i64, prec: u32) -> Self {
        MpFloat(Float::with_val(prec, x))
    }
    fn from_bigint(x: &BigInt, prec: u32) -> Self {
        let i = rug::Integer::from_str_radix(&x.to_str_radix(16), 16).expect("hex integer");
        MpFloat(Float::with_val(prec, i))
    }
    fn from_ratio(x: &BigRational, prec: u32) -> Self {
        Self::from_bigint(x.numer(), prec) / Self::from_bigint(x.denom(), prec)
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
    fn from_mp(x: &MpFloat, prec: u32) -> Self {
        MpFloat(Float::with_val(prec, &x.0))
    }
    fn pi(prec: u32) -> Self {
        MpFloat(Float::with_val(prec, Constant::Pi))
    }
    fn euler_gamma(prec: u32) -> Self {
        MpFloat(Float::with_val(prec, Constant::Euler))
    }
    fn zeta_int(k: u32, prec: u32) -> Self {
        MpFloat(Float::with_val(prec, Float::zeta_u(k)))
    }
    fn sqrt(&self) -> Self {
        MpFloat(self.0.clone().sqrt())
    }
    fn exp(&self) -> Self {
        MpFloat(self.0.clone().exp())
    }
    fn ln(&self) -> Self {
        MpFloat(self.0.clone().ln())
    }
    fn sin_cos(&self) -> (Self, Self) {
        let (s, c) = self.0.clone().sin_cos(Float::new(self.0.prec()));
        (MpFloat(s), MpFloat(c))
    }
    fn atan2(&self, x: &Self) -> Self {
        let p = self.prec().max(x.prec());
        MpFloat(Float::with_val(p, &self.0).atan2(&x.0))
    }
    fn gamma(&self) -> Self {
        MpFloat(self.0.clone().gamma())
    }
    fn abs(&self) -> Self {
        MpFloat(self.0.clone().abs())
    }
    fn floor(&self) -> Self {
        MpFloat(self.0.clone().floor())
    }
    fn mul_i64(&self, k: i64) -> Self {
        MpFloat(Float::with_val(self.0.prec(), &self.0 * k))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn round_bigint(&self) -> BigInt {
        let i = self.0.to_integer().expect("finite");
        BigInt::parse_bytes(i.to_string_radix(16).as_bytes(), 16).expect("hex")
    }
    fn log2_abs(&self) -> f64 {
        if self.0.is_zero() {
            return f64::NEG_INFINITY;
        }
        let (m, e) = self.0.to_f64_exp();
        m.abs().log2() + e as f64
    }
    fn to_decimal(&self, digits: usize) -> String {
        self.0.to_string_radix(10, Some(digits.max(2)))
    }
    fn powf(&self, y: &Self) -> Self {
        let p = self.prec().max(y.prec());
        MpFloat(Float::with_val(p, rug::ops::Pow::pow(&self.0, &y.0)))
    }
}

/// Minimal complex number over a [`Real`].
#[derive(Clone, Debug, PartialEq)]
pub struct Cx<T> {
    pub re: T,
    pub im: T,
}

impl<T: Real> Cx<T> {
    pub fn new(re: T, im: T) -> Self {
        Cx { re, im }
    }
    pub fn from_real(re: T) -> Self {
        let im = T::zero(re.prec());
        Cx { re, im }
    }
    pub fn zero(prec: u32) -> Self {
        Cx { re: T::zero(prec), im: T::zero(prec) }
    }
    pub fn one(prec: u32) -> Self {
        Cx { re: T::one(prec), im: T::zero(prec) }
    }
    pub fn i(prec: u32) -> Self {
        Cx { re: T::zero(prec), im: T::one(prec) }
    }
    pub fn prec(&self) -> u32 {
        self.re.prec()
    }
    /// e^{2πi·num/den}.
    pub fn root_of_unity(num: i64, den: u64, prec: u32) -> Self {
        let den = den as i64;
        let r = num.rem_euclid(den);
        let theta = T::pi(prec).mul_i64(2 * r) / T::from_i64(den, prec);
        let (s, c) = theta.sin_cos();
        Cx { re: c, im: s }
    }
    pub fn conj(&self) -> Self {
        Cx { re: self.re.clone(), im: -self.im.clone() }
    }
    pub fn norm_sqr(&self) -> T {
        self.re.clone() * &self.re + self.im.clone() * &self.im
    }
    pub fn abs(&self) -> T {
        self.norm_sqr().sqrt()
    }
    pub fn arg(&self) -> T {
        self.im.atan2(&self.re)
    }
    pub fn scale(&self, k: &T) -> Self {
        Cx { re: self.re.clone() * k, im: self.im.clone() * k }
    }
    pub fn mul_i64(&self, k: i64) -> Self {
        Cx { re: self.re.mul_i64(k), im: self.im.mul_i64(k) }
    }
    pub fn inv(&self) -> Self {
        let n = self.norm_sqr();
        Cx { re: self.re.clone() / &n, im: -(self.im.clone() / &n) }
    }
    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        let r = self.abs();
        if r.is_zero() {
            return self.clone();
        }
        let two = T::from_i64(2, self.prec());
        let a = ((r.clone() + &self.re) / &two).sqrt();
        let b = ((r - &self.re) / &two).sqrt();
        if self.im < T::zero(self.prec()) {
            Cx { re: a, im: -b }
        } else {
            Cx { re: a, im: b }
        }
    }
    pub fn with_prec(&self, prec: u32) -> Self {
        Cx { re: self.re.with_prec(prec), im: self.im.with_prec(prec) }
    }
    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
    pub fn powi(&self, n: i64) -> Self {
        let mut base = if n < 0 { self.inv() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Cx::one(self.prec());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * &base;
            }
        }
        acc
    }
}

impl<T: Real> Add<&Cx<T>> for Cx<T> {
    type Output = Cx<T>;
    fn add(self, o: &Cx<T>) -> Cx<T> {
        Cx { re: self.re + &o.re, im: self.im + &o.im }
    }
}
impl<T: Real> Add for Cx<T> {
    type Output = Cx<T>;
    fn add(self, o: Cx<T>) -> Cx<T> {
        self + &o
    }
}
impl<T: Real> Sub<&Cx<T>> for Cx<T> {
    type Output = Cx<T>;
    fn sub(self, o: &Cx<T>) -> Cx<T> {
        Cx { re: self.re - &o.re, im: self.im - &o.im }
    }
}
impl<T: Real> Sub for Cx<T> {
    type Output = Cx<T>;
    fn sub(self, o: Cx<T>) -> Cx<T> {
        self - &o
    }
}
impl<T: Real> Mul<&Cx<T>> for Cx<T> {
    type Output = Cx<T>;
    fn mul(self, o: &Cx<T>) -> Cx<T> {
        let re = self.re.clone() * &o.re - self.im.clone() * &o.im;
        let im = self.re * &o.im + self.im * &o.re;
        Cx { re, im }
    }
}
impl<T: Real> Mul for Cx<T> {
    type Output = Cx<T>;
    fn mul(self, o: Cx<T>) -> Cx<T> {
        self * &o
    }
}
impl<T: Real> Div<&Cx<T>> for Cx<T> {
    type Output = Cx<T>;
    fn div(self, o: &Cx<T>) -> Cx<T> {
        self * &o.inv()
    }
}
impl<T: Real> Div for Cx<T> {
    type Output = Cx<T>;
    fn div(self, o: Cx<T>) -> Cx<T> {
        self / &o
    }
}
impl<T: Real> Neg for Cx<T> {
    type Output = Cx<T>;
    fn neg(self) -> Cx<T> {
        Cx { re: -self.re, im: -self.im }
    }
}
impl<T: Real> AddAssign<&Cx<T>> for Cx<T> {
    fn add_assign(&mut self, o: &Cx<T>) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl<T: Real> Zero for Cx<T> {
    fn zero() -> Self {
        Cx::zero(53)
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lanczos_matches_factorials() {
        let mut f = 1.0;
        for n in 1..15 {
            assert!((lanczos_gamma(n as f64) - f).abs() / f < 1e-13);
            f *= n as f64;
        }
        assert!((lanczos_gamma(0.5) - std::f64::consts::PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn f64_zeta_close_to_mpfr() {
        for k in 2..12 {
            let a = <f64 as Real>::zeta_int(k, 53);
            let b = MpFloat::zeta_int(k, 100).to_f64();
            assert!((a - b).abs() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn mp_mixed_precision_takes_max() {
        let a = MpFloat::from_i64(1, 64);
        let b = MpFloat::from_i64(3, 256);
        let c = a / &b;
        assert_eq!(c.prec(), 256);
        let back = c.mul_i64(3) - MpFloat::one(256);
        assert!(back.log2_abs() < -250.0);
    }

    #[test]
    fn bigint_roundtrip() {
        let x: BigInt = "-123456789012345678901234567890".parse().unwrap();
        let y = MpFloat::from_bigint(&x, 200).round_bigint();
        assert_eq!(x, y);
    }

    #[test]
    fn complex_sqrt_branch() {
        let r = Cx::new(-4.0f64, 0.0).sqrt();
        assert!((r.re).abs() < 1e-15 && (r.im - 2.0).abs() < 1e-15);
        let r = Cx::new(-3.0f64, -4.0).sqrt();
        assert!((r.re - 1.0).abs() < 1e-15 && (r.im + 2.0).abs() < 1e-15);
        let w = Cx::<f64>::root_of_unity(1, 4, 53);
        assert!((w.im - 1.0).abs() < 1e-15);
    }
}
