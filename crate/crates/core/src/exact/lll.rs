//! Integral LLL (all-integer Gram–Schmidt bookkeeping), δ = 99/100.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::ExactError;

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Nearest integer to n/d for d > 0, ties toward +∞.
fn round_div(n: &BigInt, d: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    (n * &two + d).div_floor(&(d * &two))
}

/// Reduce `basis` (rows). Errors on linearly dependent input.
pub fn lll_reduce(basis: &[Vec<BigInt>]) -> Result<Vec<Vec<BigInt>>, ExactError> {
    let n = basis.len();
    let mut b: Vec<Vec<BigInt>> = basis.to_vec();
    if n == 0 {
        return Ok(b);
    }
    // d[i+1] = Π_{j≤i} |b*_j|², d[0] = 1. lam[k][j] = d[j+1]·μ_{k,j}.
    let mut d = vec![BigInt::zero(); n + 1];
    let mut lam = vec![vec![BigInt::zero(); n]; n];
    d[0] = BigInt::from(1);
    d[1] = dot(&b[0], &b[0]);
    if d[1].is_zero() {
        return Err(ExactError::DependentInput);
    }
    let mut k = 1usize;
    let mut kmax = 0usize;
    while k < n {
        if k > kmax {
            kmax = k;
            for j in 0..=k {
                let mut u = dot(&b[k], &b[j]);
                for i in 0..j {
                    u = (&d[i + 1] * &u - &lam[k][i] * &lam[j][i]) / &d[i];
                }
                if j < k {
                    lam[k][j] = u;
                } else {
                    if u.is_zero() {
                        return Err(ExactError::DependentInput);
                    }
                    d[k + 1] = u;
                }
            }
        }
        loop {
            red(&mut b, &mut lam, &d, k, k - 1);
            let l = &lam[k][k - 1];
            let lhs = (&d[k + 1] * &d[k - 1] + l * l) * 100;
            let rhs = &d[k] * &d[k] * 99;
            if lhs < rhs {
                swap(&mut b, &mut lam, &mut d, k, kmax);
                if k > 1 {
                    k -= 1;
                }
            } else {
                break;
            }
        }
        for l in (0..k - 1).rev() {
            red(&mut b, &mut lam, &d, k, l);
        }
        k += 1;
    }
    Ok(b)
}

fn red(b: &mut [Vec<BigInt>], lam: &mut [Vec<BigInt>], d: &[BigInt], k: usize, l: usize) {
    let two = BigInt::from(2);
    if (&lam[k][l] * &two).abs() > d[l + 1] {
        let q = round_div(&lam[k][l], &d[l + 1]);
        let bl = b[l].clone();
        for (x, y) in b[k].iter_mut().zip(&bl) {
            *x -= &q * y;
        }
        lam[k][l] -= &q * &d[l + 1];
        for i in 0..l {
            let t = &q * &lam[l][i];
            lam[k][i] -= t;
        }
    }
}

fn swap(b: &mut [Vec<BigInt>], lam: &mut [Vec<BigInt>], d: &mut [BigInt], k: usize, kmax: usize) {
    b.swap(k, k - 1);
    for j in 0..k - 1 {
        let t = lam[k][j].clone();
        lam[k][j] = lam[k - 1][j].clone();
        lam[k - 1][j] = t;
    }
    let l = lam[k][k - 1].clone();
    let bb = (&d[k - 1] * &d[k + 1] + &l * &l) / &d[k];
    for i in k + 1..=kmax {
        let t = lam[i][k].clone();
        lam[i][k] = (&d[k + 1] * &lam[i][k - 1] - &l * &t) / &d[k];
        lam[i][k - 1] = (&bb * &t + &l * &lam[i][k]) / &d[k + 1];
    }
    d[k] = bb;
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn v(x: &[i64]) -> Vec<BigInt> {
        x.iter().map(|&a| BigInt::from(a)).collect()
    }

    /// Exact rational Gram–Schmidt check of size reduction and Lovász.
    fn is_reduced(b: &[Vec<BigInt>]) -> bool {
        let n = b.len();
        let q = |x: &BigInt| BigRational::from_integer(x.clone());
        let mut bstar: Vec<Vec<BigRational>> = Vec::new();
        let mut mu = vec![vec![BigRational::zero(); n]; n];
        let mut norms = Vec::new();
        for i in 0..n {
            let mut w: Vec<BigRational> = b[i].iter().map(q).collect();
            for j in 0..i {
                let num: BigRational = b[i].iter().map(q).zip(&bstar[j]).map(|(x, y)| x * y).sum();
                mu[i][j] = num / &norms[j];
                for (t, s) in w.iter_mut().zip(&bstar[j]) {
                    *t -= &mu[i][j] * s;
                }
            }
            let nn: BigRational = w.iter().map(|x| x * x).sum();
            norms.push(nn);
            bstar.push(w);
        }
        let half = BigRational::new(1.into(), 2.into());
        for i in 0..n {
            for j in 0..i {
                if mu[i][j].abs() > half {
                    return false;
                }
            }
        }
        let delta = BigRational::new(99.into(), 100.into());
        for k in 1..n {
            let m = &mu[k][k - 1];
            if norms[k] < (&delta - m * m) * &norms[k - 1] {
                return false;
            }
        }
        true
    }

    #[test]
    fn examples() {
        let id = vec![v(&[1, 0]), v(&[0, 1])];
        assert_eq!(lll_reduce(&id).unwrap(), id);
        let r = lll_reduce(&[v(&[1, 0]), v(&[10, 1])]).unwrap();
        let mut abs: Vec<Vec<BigInt>> = r.iter().map(|x| x.iter().map(|y| y.abs()).collect()).collect();
        abs.sort();
        assert_eq!(abs, vec![v(&[0, 1]), v(&[1, 0])]);
        let r = lll_reduce(&[v(&[201, 0]), v(&[200, 1])]).unwrap();
        assert!(r.iter().any(|x| dot(x, x) <= BigInt::from(2)));
        assert!(lll_reduce(&[v(&[1, 2]), v(&[2, 4])]).is_err());
    }

    proptest! {
        #[test]
        fn output_reduced_same_lattice(rows in prop::collection::vec(prop::collection::vec(-1000i64..1000, 4), 4)) {
            let b: Vec<Vec<BigInt>> = rows.iter().map(|r| v(r)).collect();
            match lll_reduce(&b) {
                Ok(r) => {
                    prop_assert!(is_reduced(&r));
                    // Same determinant of the Gram matrix.
                    let gram = |m: &[Vec<BigInt>]| -> BigRational {
                        let n = m.len();
                        let mut g: Vec<Vec<BigRational>> = (0..n).map(|i| (0..n).map(|j| BigRational::from_integer(dot(&m[i], &m[j]))).collect()).collect();
                        let mut det = BigRational::from_integer(1.into());
                        for c in 0..n {
                            let Some(p) = (c..n).find(|&i| !g[i][c].is_zero()) else { return BigRational::zero() };
                            if p != c { g.swap(p, c); det = -det; }
                            det *= &g[c][c];
                            for i in c + 1..n {
                                let f = &g[i][c] / &g[c][c];
                                for j in c..n { let t = &f * &g[c][j]; g[i][j] -= t; }
                            }
                        }
                        det
                    };
                    prop_assert_eq!(gram(&b), gram(&r));
                }
                Err(_) => {}
            }
        }
    }
}
