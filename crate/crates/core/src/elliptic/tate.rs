//! Tate's algorithm.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::curve::{ReductionKind, ReductionType, Weierstrass};
use super::EllError;
use crate::exact::arith::{is_prime, jacobi};

fn val(x: &BigInt, p: u64) -> u32 {
    if x.is_zero() {
        return u32::MAX;
    }
    let mut x = x.clone();
    let mut v = 0;
    while (&x % p).is_zero() {
        x /= p;
        v += 1;
    }
    v
}

fn md(x: &BigInt, m: u64) -> u64 {
    x.mod_floor(&BigInt::from(m)).to_u64().unwrap()
}

fn divp(x: &BigInt, pk: u64) -> BigInt {
    x / pk
}

fn inv(a: u64, m: u64) -> u64 {
    crate::exact::arith::invmod(a % m, m).expect("invertible")
}

/// Double root mod p of a·X² + b·X + c (discriminant ≡ 0).
fn double_root(a: u64, b: u64, c: u64, p: u64) -> u64 {
    if p == 2 {
        c * a % 2
    } else {
        // −b / (2a)
        (p - b % p) % p * inv(2 * a % p, p) % p
    }
}

/// Roots of T³ + bT² + cT + d over F_p with multiplicity.
fn cubic_roots(b: u64, c: u64, d: u64, p: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut poly = vec![d % p, c % p, b % p, 1u64];
    for x in 0..p {
        let mut mult = 0;
        loop {
            // synthetic division by (T − x)
            let n = poly.len();
            if n < 2 {
                break;
            }
            let mut q = vec![0u64; n - 1];
            let mut acc = 0u64;
            for i in (1..n).rev() {
                acc = (acc * x + poly[i]) % p;
                q[i - 1] = acc;
            }
            let rem = (acc * x + poly[0]) % p;
            if rem != 0 {
                break;
            }
            poly = q;
            mult += 1;
        }
        if mult > 0 {
            out.push((x, mult));
        }
        if poly.len() == 1 {
            break;
        }
    }
    out
}

/// Reduction type and conductor exponent at ℓ of the integral model `a`.
pub fn tate_local_data(a: [i64; 5], p: u64) -> Result<ReductionType, EllError> {
    if !is_prime(p) {
        return Err(EllError::NotPrime(p));
    }
    let mut w = Weierstrass::new(a);
    let n = val(&w.disc(), p);
    if n == 0 {
        return Ok(ReductionType::good());
    }
    let z = BigInt::zero();
    let bi = |x: u64| BigInt::from(x);

    // Move the singular point of the reduction to (0, 0).
    let (r, t) = if p <= 3 {
        singular_point_small(&w, p)
    } else {
        let (b2, c4, c6) = (w.b2(), w.c4(), w.c6());
        let r = if md(&c4, p) == 0 {
            (p - md(&b2, p)) % p * inv(12, p) % p
        } else {
            let num = md(&(c6 + &b2 * &c4), p);
            (p - num) % p * inv(md(&(c4 * 12), p), p) % p
        };
        let s = (md(&w.a1, p) * r + md(&w.a3, p)) % p;
        let t = (p - s) % p * inv(2, p) % p;
        (r, t)
    };
    w = w.transform(&bi(r), &z, &bi(t));

    // Multiplicative.
    let b2 = w.b2();
    if md(&b2, p) != 0 {
        let split = if p == 2 {
            // T² + a1 T − a2 with a1 odd splits iff a2 even
            md(&w.a2, 2) == 0
        } else {
            jacobi(md(&b2, p) as i64, p) == 1
        };
        let kind = if split { ReductionKind::SplitMultiplicative } else { ReductionKind::NonsplitMultiplicative };
        return Ok(ReductionType { kind, conductor_exponent: 1 });
    }
    let add = |f: u32| Ok(ReductionType { kind: ReductionKind::Additive, conductor_exponent: f });
    let p2 = p * p;
    let p3 = p2 * p;
    if val(&w.a6, p) < 2 {
        return add(n);
    }
    if val(&w.b8(), p) < 3 {
        return add(n - 1);
    }
    if val(&w.b6(), p) < 3 {
        return add(n - 2);
    }

    // p | a1, a2; p² | a3, a4; p³ | a6.
    let (s, t) = if p == 2 {
        (md(&w.a2, 2), 2 * md(&divp(&w.a6, 4), 2))
    } else {
        let s = (p - md(&w.a1, p)) % p * inv(2, p) % p;
        let t = (p2 - md(&w.a3, p2)) % p2 * inv(2, p2) % p2;
        (s, t)
    };
    w = w.transform(&z, &bi(s), &bi(t));

    let b = md(&divp(&w.a2, p), p);
    let c = md(&divp(&w.a4, p2), p);
    let d = md(&divp(&w.a6, p3), p);
    let roots = cubic_roots(b, c, d, p);
    let max_mult = roots.iter().map(|r| r.1).max().unwrap_or(1);
    let nroots: u32 = roots.iter().map(|r| r.1).sum();
    let distinct = max_mult == 1 && {
        // all roots simple; need the cubic squarefree over the closure
        let bb = b as i128;
        let cc = c as i128;
        let dd = d as i128;
        let disc = bb * bb * cc * cc - 4 * cc * cc * cc - 4 * bb * bb * bb * dd - 27 * dd * dd + 18 * bb * cc * dd;
        disc.rem_euclid(p as i128) != 0
    };
    let _ = nroots;
    if distinct {
        return add(n - 4);
    }
    if max_mult == 2 {
        // I_m^*: move the double root to 0 and alternate between y and x shifts.
        let x0 = roots.iter().find(|r| r.1 == 2).unwrap().0;
        w = w.transform(&bi(p * x0), &z, &z);
        let mut m = 1u32;
        let mut mx = BigInt::from(p2);
        let mut my = BigInt::from(p2);
        loop {
            let xa3 = md(&(&w.a3 / &my), p);
            let xa6 = md(&(&w.a6 / (&mx * &my)), p);
            if (xa3 * xa3 + 4 * xa6) % p != 0 {
                break;
            }
            let y0 = double_root(1, xa3, (p - xa6) % p, p);
            w = w.transform(&z, &z, &(&my * y0));
            my *= p;
            m += 1;
            let xa2 = md(&(&w.a2 / p), p);
            let xa4 = md(&(&w.a4 / (&mx * p)), p);
            let xa6 = md(&(&w.a6 / (&mx * &my)), p);
            if ((xa4 * xa4) as i128 - 4 * (xa2 * xa6) as i128).rem_euclid(p as i128) != 0 {
                break;
            }
            let x0 = double_root(xa2, xa4, xa6, p);
            w = w.transform(&(&mx * x0), &z, &z);
            mx *= p;
            m += 1;
        }
        return add(n - 4 - m);
    }
    // Triple root.
    let x0 = roots[0].0;
    w = w.transform(&bi(p * x0), &z, &z);
    let xa3 = md(&divp(&w.a3, p2), p);
    let xa6 = md(&divp(&w.a6, p2 * p2), p);
    if (xa3 * xa3 + 4 * xa6) % p != 0 {
        return add(n - 6);
    }
    let y0 = double_root(1, xa3, (p - xa6) % p, p);
    w = w.transform(&z, &z, &bi(p2 * y0));
    if val(&w.a4, p) < 4 {
        return add(n - 7);
    }
    if val(&w.a6, p) < 6 {
        return add(n - 8);
    }
    Err(EllError::NonMinimalAtL(p))
}

fn singular_point_small(w: &Weierstrass, p: u64) -> (u64, u64) {
    let [a1, a2, a3, a4, a6] = [&w.a1, &w.a2, &w.a3, &w.a4, &w.a6].map(|x| md(x, p) as i64);
    let pi = p as i64;
    for x in 0..pi {
        for y in 0..pi {
            let f = y * y + a1 * x * y + a3 * y - x * x * x - a2 * x * x - a4 * x - a6;
            let fx = a1 * y - 3 * x * x - 2 * a2 * x - a4;
            let fy = 2 * y + a1 * x + a3;
            if f.rem_euclid(pi) == 0 && fx.rem_euclid(pi) == 0 && fy.rem_euclid(pi) == 0 {
                return (x as u64, y as u64);
            }
        }
    }
    unreachable!("singular reduction has a singular point")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::curve::EllipticCurveModel;

    #[test]
    fn examples() {
        let e11 = [0, -1, 1, -10, -20];
        let r = tate_local_data(e11, 11).unwrap();
        assert_eq!((r.kind, r.conductor_exponent), (ReductionKind::SplitMultiplicative, 1));
        assert_eq!(tate_local_data(e11, 7).unwrap(), ReductionType::good());
        // conductor 27 = 3³
        let r = tate_local_data([0, 0, 1, 0, -7], 3).unwrap();
        assert_eq!((r.kind, r.conductor_exponent), (ReductionKind::Additive, 3));
        // exponent 2: y² = x³ + 1 has conductor 36
        let r = tate_local_data([0, 0, 0, 0, 1], 3).unwrap();
        assert_eq!((r.kind, r.conductor_exponent), (ReductionKind::Additive, 2));
    }

    #[test]
    fn known_conductors() {
        for (a, n) in [
            ([0, -1, 1, -10, -20], 11u64),
            ([1, 0, 1, 4, -6], 14),
            ([1, 1, 1, -10, -10], 15),
            ([0, 0, 1, -1, 0], 37),
            ([0, 0, 1, 0, -7], 27),
            ([0, 0, 1, 0, 0], 27),
            ([0, 0, 0, -1, 0], 32),
            ([0, 0, 0, 1, 0], 64),
            ([0, 0, 0, 0, 1], 36),
            ([0, 0, 0, -2, 0], 256),
        ] {
            let e = EllipticCurveModel::new(a).unwrap();
            assert_eq!(e.conductor, n, "{a:?}");
        }
    }

    #[test]
    fn non_minimal_detected() {
        // 11a1 scaled by u = 2: a_i ↦ 2^i a_i.
        assert!(matches!(tate_local_data([0, -4, 8, -160, -1280], 2), Err(EllError::NonMinimalAtL(2))));
    }
}
