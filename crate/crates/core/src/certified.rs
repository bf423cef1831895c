//! Certified rational bounds for irrational quantities.
//!
//! Every routine returns one-sided rational enclosures (or decides a
//! comparison exactly); nothing is approximated in floating point.

use std::cmp::Ordering;

use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};

use crate::linalg::Matrix;
use crate::{int, Integer, Rational};

/// Dyadic precision used when a bound is not exact.
pub const PRECISION_BITS: u32 = 64;

pub fn floor(x: &Rational) -> Integer {
    x.floor().to_integer()
}

pub fn ceil(x: &Rational) -> Integer {
    x.ceil().to_integer()
}

/// Exact square root when `x` is the square of a rational.
pub fn exact_sqrt(x: &Rational) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    let (n, d) = (x.numer(), x.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    (&rn * &rn == *n && &rd * &rd == *d).then(|| Rational::new(rn, rd))
}

/// `floor(sqrt(x))` for `x >= 0`.
pub fn floor_sqrt(x: &Rational) -> Integer {
    assert!(!x.is_negative(), "floor_sqrt of a negative rational");
    floor(x).sqrt()
}

/// Dyadic `(lo, hi)` with `lo² <= x <= hi²`, `0 <= lo <= hi`, equal when `x`
/// is a rational square.
pub fn sqrt_bounds(x: &Rational) -> (Rational, Rational) {
    root_bounds(x, 2)
}

pub fn sqrt_lower(x: &Rational) -> Rational {
    sqrt_bounds(x).0
}

pub fn sqrt_upper(x: &Rational) -> Rational {
    sqrt_bounds(x).1
}

/// Dyadic `(lo, hi)` with `lo^n <= x <= hi^n` for `x >= 0`.
pub fn root_bounds(x: &Rational, n: u32) -> (Rational, Rational) {
    assert!(!x.is_negative(), "root of a negative rational");
    assert!(n >= 1);
    if n == 1 {
        return (x.clone(), x.clone());
    }
    let (num, den) = (x.numer(), x.denom());
    let (rn, rd) = (num.nth_root(n), den.nth_root(n));
    if rn.pow(n) == *num && rd.pow(n) == *den {
        let r = Rational::new(rn, rd);
        return (r.clone(), r);
    }
    let scale = Integer::one() << PRECISION_BITS;
    let scaled = floor(&(x * Rational::from_integer(scale.pow(n))));
    let lo = scaled.nth_root(n);
    let lo_r = Rational::new(lo.clone(), scale.clone());
    let hi_r = Rational::new(lo + 1, scale);
    (lo_r, hi_r)
}

/// Bounds on `x^e` for `x > 0` and rational exponent `e`.
pub fn pow_bounds(x: &Rational, e: &Rational) -> (Rational, Rational) {
    assert!(x.is_positive(), "pow_bounds needs a positive base");
    let p = e.numer().abs();
    let q: u32 = e
        .denom()
        .try_into()
        .expect("exponent denominator too large");
    let p: u32 = (&p).try_into().expect("exponent numerator too large");
    if e.is_negative() {
        root_bounds(&Pow::pow(&x.recip(), p), q)
    } else {
        root_bounds(&Pow::pow(x, p), q)
    }
}

struct Pow;

impl Pow {
    fn pow(x: &Rational, p: u32) -> Rational {
        let mut acc = Rational::one();
        for _ in 0..p {
            acc *= x;
        }
        acc
    }
}

/// Exact comparison of `x` with `y·sqrt(n)` for `n >= 0`.
pub fn cmp_with_scaled_sqrt(x: &Rational, y: &Rational, n: &Rational) -> Ordering {
    assert!(!n.is_negative(), "negative radicand");
    let rhs_sign = if n.is_zero() { Ordering::Equal } else { y.cmp(&Rational::zero()) };
    let lhs_sign = x.cmp(&Rational::zero());
    match (lhs_sign, rhs_sign) {
        (Ordering::Equal, Ordering::Equal) => Ordering::Equal,
        (a, b) if a != b => a.cmp(&b),
        (s, _) => {
            // same nonzero sign: compare squares, flipping for negatives
            let lsq = x * x;
            let rsq = y * y * n;
            let c = lsq.cmp(&rsq);
            if s == Ordering::Less {
                c.reverse()
            } else {
                c
            }
        }
    }
}

/// `floor(w / sqrt(rad))` for `rad > 0`.
pub fn floor_div_sqrt(w: &Rational, rad: &Rational) -> Integer {
    assert!(rad.is_positive(), "radicand must be positive");
    let sq = w * w / rad;
    let f = floor_sqrt(&sq);
    if !w.is_negative() {
        f
    } else {
        // -ceil(|w|/sqrt(rad))
        let exact = exact_sqrt(&sq).is_some_and(|r| r.is_integer());
        if exact {
            -f
        } else {
            -(f + Integer::one())
        }
    }
}

/// Upper bound on `(sqrt(a) + sqrt(b))²`.
pub fn sum_of_roots_sq_upper(a: &Rational, b: &Rational) -> Rational {
    a + b + Rational::from_integer(int(2)) * sqrt_upper(&(a * b))
}

/// Upper bound on `(Σ sqrt(v_i))`.
pub fn sum_of_roots_upper<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Rational {
    values
        .into_iter()
        .fold(Rational::zero(), |acc, v| acc + sqrt_upper(v))
}

/// Smallest positive integer `q` with `q·sqrt(eps_sq) >= sqrt(a_sq) + sqrt(b_sq)`.
pub fn ceil_root_sum_over_root(a_sq: &Rational, b_sq: &Rational, eps_sq: &Rational) -> Integer {
    assert!(eps_sq.is_positive());
    // q² eps² >= a² + b² + 2 sqrt(a² b²)
    let holds = |q: &Integer| {
        let lhs = Rational::from_integer(q * q) * eps_sq - a_sq - b_sq;
        let two = Rational::from_integer(int(2));
        cmp_with_scaled_sqrt(&lhs, &two, &(a_sq * b_sq)) != Ordering::Less
    };
    let approx = ceil(&(sum_of_roots_sq_upper(a_sq, b_sq) / eps_sq));
    let mut hi = approx.sqrt() + 1;
    if hi < Integer::one() {
        hi = Integer::one();
    }
    while !holds(&hi) {
        hi *= 2;
    }
    let mut lo = Integer::zero();
    // invariant: holds(hi), !holds(lo) or lo == 0
    while &hi - &lo > Integer::one() {
        let mid: Integer = (&lo + &hi).div_floor(&int(2));
        if holds(&mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi.max(Integer::one())
}

/// Certified lower bound on the smallest eigenvalue of a symmetric positive
/// definite rational matrix; exact when that eigenvalue is a small-height
/// rational. Returns `None` when the matrix is not positive definite.
pub fn min_eigenvalue_lower_bound(g: &Matrix<Rational>) -> Option<Rational> {
    if !g.is_positive_definite() {
        return None;
    }
    let n = g.rows();
    let shifted = |l: &Rational| {
        Matrix::from_fn(n, n, |r, c| {
            if r == c {
                g.get(r, c) - l
            } else {
                g.get(r, c).clone()
            }
        })
    };
    let mut hi = (0..n).map(|i| g.get(i, i).clone()).min().expect("non-empty");
    if shifted(&hi).is_positive_semidefinite() {
        return Some(hi);
    }
    let mut lo = Rational::zero();
    // invariant: G - lo·I is PD (lo < λ_min) and G - hi·I is not PSD (hi > λ_min)
    for _ in 0..PRECISION_BITS {
        let mid = (&lo + &hi) / Rational::from_integer(int(2));
        if shifted(&mid).is_positive_definite() {
            lo = mid;
        } else if shifted(&mid).is_positive_semidefinite() {
            return Some(mid);
        } else {
            hi = mid;
        }
    }
    let simple = simplest_in(&lo, &hi);
    if simple > lo && shifted(&simple).is_positive_semidefinite() {
        return Some(simple);
    }
    Some(lo)
}

/// The rational of smallest denominator in the closed interval `[lo, hi]`
/// (Stern–Brocot descent), for `0 <= lo <= hi`.
pub fn simplest_in(lo: &Rational, hi: &Rational) -> Rational {
    assert!(lo <= hi);
    let fl = floor(lo);
    if Rational::from_integer(fl.clone()) == *lo {
        return lo.clone();
    }
    if Rational::from_integer(fl.clone() + 1) <= *hi {
        return Rational::from_integer(fl + 1);
    }
    let base = Rational::from_integer(fl);
    let (a, b) = ((lo - &base).recip(), (hi - &base).recip());
    base + simplest_in(&b, &a).recip()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    #[test]
    fn sqrt_bounds_bracket() {
        for n in [2i64, 3, 5, 10, 99] {
            let x = rat(n, 7);
            let (lo, hi) = sqrt_bounds(&x);
            assert!(&lo * &lo <= x && x <= &hi * &hi);
        }
        assert_eq!(sqrt_bounds(&rat(9, 4)), (rat(3, 2), rat(3, 2)));
    }

    #[test]
    fn scaled_sqrt_comparison() {
        // 1.41 < sqrt(2) < 1.42
        assert_eq!(cmp_with_scaled_sqrt(&rat(141, 100), &rat(1, 1), &rat(2, 1)), Ordering::Less);
        assert_eq!(cmp_with_scaled_sqrt(&rat(142, 100), &rat(1, 1), &rat(2, 1)), Ordering::Greater);
        assert_eq!(cmp_with_scaled_sqrt(&rat(-3, 1), &rat(-1, 1), &rat(9, 1)), Ordering::Equal);
        assert_eq!(cmp_with_scaled_sqrt(&rat(-1, 1), &rat(1, 1), &rat(2, 1)), Ordering::Less);
        assert_eq!(cmp_with_scaled_sqrt(&rat(0, 1), &rat(-1, 1), &rat(0, 1)), Ordering::Equal);
    }

    #[test]
    fn floor_of_surd_ratio() {
        assert_eq!(floor_div_sqrt(&rat(3, 1), &rat(2, 1)), int(2)); // 2.12
        assert_eq!(floor_div_sqrt(&rat(-3, 1), &rat(2, 1)), int(-3));
        assert_eq!(floor_div_sqrt(&rat(-4, 1), &rat(4, 1)), int(-2));
        assert_eq!(floor_div_sqrt(&rat(7, 1), &rat(49, 4)), int(2));
    }

    #[test]
    fn eigenvalue_bounds() {
        let diag = Matrix::from_rows(vec![vec![rat(2, 1), rat(0, 1)], vec![rat(0, 1), rat(3, 1)]]).unwrap();
        assert_eq!(min_eigenvalue_lower_bound(&diag), Some(rat(2, 1)));
        let eis = Matrix::from_rows(vec![vec![rat(1, 1), rat(-1, 2)], vec![rat(-1, 2), rat(1, 1)]]).unwrap();
        assert_eq!(min_eigenvalue_lower_bound(&eis), Some(rat(1, 2)));
        // eigenvalues 1 ± 1/sqrt(2): irrational, must stay strictly below
        let irr = Matrix::from_rows(vec![vec![rat(1, 1), rat(1, 2)], vec![rat(1, 2), rat(1, 2)]]).unwrap();
        let lb = min_eigenvalue_lower_bound(&irr).unwrap();
        let shifted = Matrix::from_fn(2, 2, |r, c| if r == c { irr.get(r, c) - &lb } else { irr.get(r, c).clone() });
        assert!(shifted.is_positive_definite());
        assert!(lb > rat(19, 100));
    }

    #[test]
    fn root_sum_ceiling() {
        // (sqrt(4) + sqrt(9)) / sqrt(1) = 5
        assert_eq!(ceil_root_sum_over_root(&rat(4, 1), &rat(9, 1), &rat(1, 1)), int(5));
        // (1 + sqrt 2)/1 = 2.414 -> 3
        assert_eq!(ceil_root_sum_over_root(&rat(1, 1), &rat(2, 1), &rat(1, 1)), int(3));
        assert_eq!(ceil_root_sum_over_root(&rat(0, 1), &rat(0, 1), &rat(1, 1)), int(1));
    }

    #[test]
    fn simplest_rational() {
        assert_eq!(simplest_in(&rat(49, 100), &rat(51, 100)), rat(1, 2));
        assert_eq!(simplest_in(&rat(3, 10), &rat(34, 100)), rat(1, 3));
    }

    #[test]
    fn fractional_powers() {
        let (lo, hi) = pow_bounds(&rat(8, 1), &rat(2, 3));
        assert_eq!((lo, hi), (rat(4, 1), rat(4, 1)));
        let (lo, hi) = pow_bounds(&rat(2, 1), &rat(-1, 2));
        assert!(&lo * &lo <= rat(1, 2) && rat(1, 2) <= &hi * &hi);
    }
}
