//! Integer-relation recognition of complex floats as cyclotomic numbers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::arith::euler_phi;
use super::cyclo::CyclotomicNumber;
use super::lll::lll_reduce;
use super::ExactError;
use crate::real::{Cx, Real};

pub const DEFAULT_HEIGHT_BOUND: u64 = 1_000_000;

/// Find c ∈ Q(μ_M) with |c − z| < 10^{−(digits−5)} and height ≤ `height_bound`.
pub fn recognize_cyclotomic<T: Real>(
    z: &Cx<T>,
    m: u64,
    height_bound: u64,
    digits: u32,
) -> Result<CyclotomicNumber, ExactError> {
    let n = euler_phi(m) as usize;
    let prec = z.prec();
    let scale = T::from_i64(10, prec).powi(digits as i64);
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n + 1);
    let mut push = |idx: usize, w: &Cx<T>| {
        let mut row = vec![BigInt::zero(); n + 3];
        row[idx] = BigInt::from(1);
        row[n + 1] = (w.re.clone() * &scale).round_bigint();
        row[n + 2] = (w.im.clone() * &scale).round_bigint();
        rows.push(row);
    };
    for j in 0..n {
        push(j, &Cx::<T>::root_of_unity(j as i64, m, prec));
    }
    push(n, z);
    let reduced = lll_reduce(&rows)?;

    let tol = -((digits as f64 - 5.0) * std::f64::consts::LOG2_10);
    let bound = BigInt::from(height_bound);
    let mut best: Option<(f64, CyclotomicNumber)> = None;
    for row in &reduced {
        let kz = &row[n];
        if kz.is_zero() {
            continue;
        }
        let coeffs: Vec<BigRational> = (0..n).map(|j| BigRational::new(-row[j].clone(), kz.clone())).collect();
        let c = CyclotomicNumber::from_coeffs(m, coeffs)?;
        if c.height() > bound {
            continue;
        }
        let diff = c.value::<T>(prec) - z;
        let r = diff.abs().log2_abs();
        if best.as_ref().map_or(true, |(b, _)| r < *b) {
            best = Some((r, c));
        }
    }
    match best {
        Some((r, c)) if r < tol => Ok(c),
        _ => Err(ExactError::NoRelation),
    }
}

/// Recognise at two precisions; the candidate must not change.
pub fn recognize_stable<T: Real>(
    z_lo: &Cx<T>,
    z_hi: &Cx<T>,
    m: u64,
    height_bound: u64,
    digits: u32,
) -> Result<CyclotomicNumber, ExactError> {
    let a = recognize_cyclotomic(z_lo, m, height_bound, digits)?;
    let b = recognize_cyclotomic(z_hi, m, height_bound, digits + 15)
        .or_else(|_| recognize_cyclotomic(z_hi, m, height_bound, digits))?;
    if a != b {
        return Err(ExactError::Unstable);
    }
    Ok(a)
}

/// |value(c) − z| as a float (log10 scale clamp at −1000).
pub fn residual<T: Real>(c: &CyclotomicNumber, z: &Cx<T>) -> f64 {
    let d = c.value::<T>(z.prec()) - z;
    let l = d.abs().log2_abs() / std::f64::consts::LOG2_10;
    if l.is_finite() {
        10f64.powf(l.max(-1000.0))
    } else {
        0.0
    }
}

pub fn height_ok(c: &CyclotomicNumber, bound: u64) -> bool {
    c.height().abs() <= BigInt::from(bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::cyclo::ratio;
    use crate::real::{bits_for_digits, MpFloat};
    use proptest::prelude::*;

    fn mp(x: f64, p: u32) -> MpFloat {
        MpFloat::from_f64(x, p)
    }

    #[test]
    fn half_and_i_sqrt3() {
        let p = bits_for_digits(45);
        let z = Cx::from_real(mp(0.5, p));
        let c = recognize_cyclotomic(&z, 1, DEFAULT_HEIGHT_BOUND, 25).unwrap();
        assert_eq!(c.as_rational().unwrap(), ratio(1, 2));
        let s3 = MpFloat::from_i64(3, p).sqrt();
        let z = Cx::new(MpFloat::zero(p), s3);
        let c = recognize_cyclotomic(&z, 3, DEFAULT_HEIGHT_BOUND, 25).unwrap();
        assert_eq!(c.coeffs(), &[ratio(1, 1), ratio(2, 1)]);
    }

    #[test]
    fn pi_has_no_relation() {
        let p = bits_for_digits(45);
        let z = Cx::from_real(MpFloat::pi(p));
        assert!(matches!(recognize_cyclotomic(&z, 3, DEFAULT_HEIGHT_BOUND, 25), Err(ExactError::NoRelation)));
    }

    #[test]
    fn zero_is_recognized() {
        let p = bits_for_digits(45);
        let c = recognize_cyclotomic(&Cx::<MpFloat>::zero(p), 9, DEFAULT_HEIGHT_BOUND, 25).unwrap();
        assert!(c.is_zero());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn roundtrip(m in prop::sample::select(vec![1u64, 3, 4, 9]), raw in prop::collection::vec(-50i64..=50, 6), den in 1i64..=50) {
            let n = euler_phi(m) as usize;
            let c = CyclotomicNumber::from_coeffs(m, raw[..n].iter().map(|&a| ratio(a, den)).collect()).unwrap();
            let p = bits_for_digits(35);
            let z = c.value::<MpFloat>(p);
            let got = recognize_cyclotomic(&z, m, DEFAULT_HEIGHT_BOUND, 30).unwrap();
            prop_assert_eq!(got, c);
        }
    }
}
