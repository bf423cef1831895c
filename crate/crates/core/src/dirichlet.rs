//! Simultaneous Diophantine approximation by exhaustive search.
//!
//! For `α ∈ R^m` and `Q >= 2` there is `1 <= b < Q^m` with every
//! `|α_i b − β_i| <= 1/Q`. The search scans `b` upwards and returns the first
//! feasible one, so results are minimal and deterministic. Targets are either
//! rationals or quotients `x/√N` with rational `x`, `N`; both are decided
//! exactly.

use std::cmp::Ordering;

use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};

use crate::certified::{cmp_with_scaled_sqrt, floor, floor_div_sqrt, sqrt_lower};
use crate::error::{domain, Error, Result};
use crate::{ratz, Integer, Rational};

/// Default cap on `Q^m`.
pub const DEFAULT_BUDGET: u64 = 1 << 40;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproxResult {
    pub b: Integer,
    pub beta: Vec<Integer>,
    /// Exact `max_i |α_i b − β_i|` for rational targets; a rational upper
    /// bound (never above `1/Q`) for surd targets.
    pub error: Rational,
}

/// A real vector the search can round and test exactly.
pub trait Target {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Nearest integer to `α_i b`, ties to even.
    fn nearest(&self, i: usize, b: &Integer) -> Integer;

    /// Whether `|α_i b − β| <= 1/Q`.
    fn within(&self, i: usize, b: &Integer, beta: &Integer, q: &Integer) -> bool;

    /// Upper bound on `|α_i b − β|`.
    fn error_bound(&self, i: usize, b: &Integer, beta: &Integer) -> Rational;
}

fn round_half_even(x: &Rational) -> Integer {
    let f = floor(x);
    let diff = x - ratz(&f);
    let half = Rational::new(Integer::one(), Integer::from(2));
    match diff.cmp(&half) {
        Ordering::Less => f,
        Ordering::Greater => f + 1,
        Ordering::Equal => {
            if f.is_even() {
                f
            } else {
                f + 1
            }
        }
    }
}

/// Plain rational targets.
pub struct RationalTarget<'a>(pub &'a [Rational]);

impl Target for RationalTarget<'_> {
    fn len(&self) -> usize {
        self.0.len()
    }

    fn nearest(&self, i: usize, b: &Integer) -> Integer {
        round_half_even(&(&self.0[i] * ratz(b)))
    }

    fn within(&self, i: usize, b: &Integer, beta: &Integer, q: &Integer) -> bool {
        self.error_bound(i, b, beta) * ratz(q) <= Rational::one()
    }

    fn error_bound(&self, i: usize, b: &Integer, beta: &Integer) -> Rational {
        (&self.0[i] * ratz(b) - ratz(beta)).abs()
    }
}

/// Targets `x_i / √N` with a common positive rational radicand.
pub struct SurdTarget<'a> {
    pub num: &'a [Rational],
    pub rad: &'a Rational,
}

impl Target for SurdTarget<'_> {
    fn len(&self) -> usize {
        self.num.len()
    }

    fn nearest(&self, i: usize, b: &Integer) -> Integer {
        let w = &self.num[i] * ratz(b);
        let f = floor_div_sqrt(&w, self.rad);
        // compare w/√N with f + 1/2
        let half = ratz(&f) + Rational::new(Integer::one(), Integer::from(2));
        match cmp_with_scaled_sqrt(&w, &half, self.rad) {
            Ordering::Less => f,
            Ordering::Greater => f + 1,
            Ordering::Equal => {
                if f.is_even() {
                    f
                } else {
                    f + 1
                }
            }
        }
    }

    fn within(&self, i: usize, b: &Integer, beta: &Integer, q: &Integer) -> bool {
        // (β − 1/Q)√N <= x b <= (β + 1/Q)√N
        let w = &self.num[i] * ratz(b);
        let inv_q = ratz(q).recip();
        let lo = ratz(beta) - &inv_q;
        let hi = ratz(beta) + &inv_q;
        cmp_with_scaled_sqrt(&w, &lo, self.rad) != Ordering::Less && cmp_with_scaled_sqrt(&w, &hi, self.rad) != Ordering::Greater
    }

    fn error_bound(&self, i: usize, b: &Integer, beta: &Integer) -> Rational {
        // |x b/√N − β| = |x b − β√N| / √N
        let w = &self.num[i] * ratz(b);
        let root_lo = sqrt_lower(self.rad);
        let root_hi = crate::certified::sqrt_upper(self.rad);
        let b_ = ratz(beta);
        let d1 = (&w - &b_ * &root_lo).abs();
        let d2 = (&w - &b_ * &root_hi).abs();
        d1.max(d2) / root_lo
    }
}

fn search_size(m: usize, q: &Integer, budget: u64) -> Result<Integer> {
    if m == 0 {
        return domain("Dirichlet approximation needs at least one target");
    }
    if *q < Integer::from(2) {
        return domain("Dirichlet approximation needs Q >= 2");
    }
    let exp = u32::try_from(m).map_err(|_| Error::Resource("dimension too large".into()))?;
    let qm = num_traits::pow::Pow::pow(q, exp);
    if qm > Integer::from(budget) {
        return Err(Error::Resource(format!("Q^m = {qm} exceeds the search budget {budget}")));
    }
    Ok(qm)
}

/// Smallest `b` in `[1, Q^m)` with all targets within `1/Q`.
pub fn dirichlet_search<T: Target>(target: &T, q: &Integer, budget: u64) -> Result<ApproxResult> {
    let qm = search_size(target.len(), q, budget)?;
    let q_inv = ratz(q).recip();
    let mut b = Integer::one();
    while b < qm {
        let mut beta = Vec::with_capacity(target.len());
        let ok = (0..target.len()).all(|i| {
            let n = target.nearest(i, &b);
            let ok = target.within(i, &b, &n, q);
            beta.push(n);
            ok
        });
        if ok {
            let error = (0..target.len())
                .map(|i| target.error_bound(i, &b, &beta[i]).min(q_inv.clone()))
                .max()
                .unwrap_or_else(Rational::zero);
            return Ok(ApproxResult { b, beta, error });
        }
        b += 1;
    }
    Err(Error::Consistency("no Dirichlet denominator found below Q^m".into()))
}

pub fn dirichlet_approx(alpha: &[Rational], q: &Integer, budget: u64) -> Result<ApproxResult> {
    dirichlet_search(&RationalTarget(alpha), q, budget)
}

/// Every `b < Q^m` with its best achievable error `max_i ‖α_i b‖`,
/// computed from fractional parts.
pub fn feasibility_oracle(alpha: &[Rational], q: &Integer, budget: u64) -> Result<Vec<(Integer, Rational)>> {
    let qm = search_size(alpha.len(), q, budget)?;
    let mut rows = Vec::new();
    let mut b = Integer::one();
    while b < qm {
        let err = alpha
            .iter()
            .map(|a| {
                let x = a * ratz(&b);
                let fr = &x - ratz(&x.floor().to_integer());
                let other = Rational::one() - &fr;
                fr.min(other)
            })
            .max()
            .unwrap_or_else(Rational::zero);
        rows.push((b.clone(), err));
        b += 1;
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{int, rat};
    use proptest::prelude::*;

    #[test]
    fn examples() {
        let r = dirichlet_approx(&[rat(1, 2)], &int(2), DEFAULT_BUDGET).unwrap();
        assert_eq!((r.b, r.beta, r.error), (int(1), vec![int(0)], rat(1, 2)));
        let r = dirichlet_approx(&[rat(5, 1), rat(-3, 1)], &int(7), DEFAULT_BUDGET).unwrap();
        assert_eq!((r.b, r.beta, r.error), (int(1), vec![int(5), int(-3)], rat(0, 1)));
        // the bound is closed, so b = 1 already meets 1/3 on both coordinates
        let r = dirichlet_approx(&[rat(2, 3), rat(1, 3)], &int(3), DEFAULT_BUDGET).unwrap();
        assert_eq!((r.b, r.beta, r.error), (int(1), vec![int(1), int(0)], rat(1, 3)));
        // with a strictly smaller tolerance only b = 3 is exact
        let r = dirichlet_approx(&[rat(2, 3), rat(1, 3)], &int(4), DEFAULT_BUDGET).unwrap();
        assert_eq!((r.b, r.beta, r.error), (int(3), vec![int(2), int(1)], rat(0, 1)));
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(feasibility_oracle(&[rat(1, 2)], &int(2), 100).unwrap(), vec![(int(1), rat(1, 2))]);
        let rows = feasibility_oracle(&[rat(2, 3), rat(1, 3)], &int(3), 100).unwrap();
        assert_eq!(rows.len(), 8);
        assert_eq!(rows[2], (int(3), rat(0, 1)));
        assert_eq!((rows[0].1.clone(), rows[1].1.clone()), (rat(1, 3), rat(1, 3)));
        assert!(matches!(feasibility_oracle(&[], &int(3), 100), Err(Error::Domain(_))));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(dirichlet_approx(&[], &int(3), 100), Err(Error::Domain(_))));
        assert!(matches!(dirichlet_approx(&[rat(1, 3)], &int(1), 100), Err(Error::Domain(_))));
        assert!(matches!(dirichlet_approx(&[rat(1, 3), rat(1, 5)], &int(11), 100), Err(Error::Resource(_))));
    }

    #[test]
    fn ties_round_to_even() {
        assert_eq!(round_half_even(&rat(5, 2)), int(2));
        assert_eq!(round_half_even(&rat(7, 2)), int(4));
        assert_eq!(round_half_even(&rat(-5, 2)), int(-2));
    }

    #[test]
    fn surd_targets_match_direct_check() {
        // α = (3, 4)/5 is rational in disguise: √25
        let num = [rat(3, 1), rat(4, 1)];
        let rad = rat(25, 1);
        let s = dirichlet_search(&SurdTarget { num: &num, rad: &rad }, &int(4), 1000).unwrap();
        let r = dirichlet_approx(&[rat(3, 5), rat(4, 5)], &int(4), 1000).unwrap();
        assert_eq!((s.b, s.beta), (r.b, r.beta));
        // irrational: 1/√2
        let num = [rat(1, 1)];
        let rad = rat(2, 1);
        let s = dirichlet_search(&SurdTarget { num: &num, rad: &rad }, &int(5), 1000).unwrap();
        assert_eq!((s.b.clone(), s.beta.clone()), (int(3), vec![int(2)]));
        assert!(s.error <= rat(1, 5));
    }

    proptest! {
        #[test]
        fn matches_oracle(nums in proptest::collection::vec((-200i64..200, 1i64..=100), 1..=3), q in 2i64..=8) {
            let alpha: Vec<Rational> = nums.iter().map(|(n, d)| rat(*n, *d)).collect();
            let q = int(q);
            let r = dirichlet_approx(&alpha, &q, DEFAULT_BUDGET).unwrap();
            let rows = feasibility_oracle(&alpha, &q, DEFAULT_BUDGET).unwrap();
            let first = rows.iter().find(|(_, e)| e * ratz(&q) <= Rational::one()).unwrap();
            prop_assert_eq!(&r.b, &first.0);
            prop_assert_eq!(&r.error, &first.1);
        }
    }
}
