//! Built-in rings: Z, Z[i], Z[ζ₃] and two quaternion orders, plus a few
//! test-only variants with non-standard norm forms.
//!
//! Quaternion orders are described by a rational basis in `(1, i, j, k)`;
//! structure constants, conjugation and the reduced-norm Gram form are
//! computed from it. The lattice representation of a rank-4 order on `A²`
//! is its left regular representation.

use num_traits::{One, Zero};

use crate::linalg::Matrix;
use crate::rings::{RingSpec, RingSpecData};
use crate::wire::{WireInteger, WireRational};
use crate::{int, rat, Rational};

/// Hamilton product in coordinates `(1, i, j, k)`.
fn quat_mul(a: &[Rational; 4], b: &[Rational; 4]) -> [Rational; 4] {
    let [a0, a1, a2, a3] = a;
    let [b0, b1, b2, b3] = b;
    [
        a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
        a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
        a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
        a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
    ]
}

fn quat_conj(a: &[Rational; 4]) -> [Rational; 4] {
    [a[0].clone(), -&a[1], -&a[2], -&a[3]]
}

fn to_int(r: &Rational, what: &str) -> i64 {
    assert!(r.is_integer(), "{what} is not integral: {r}");
    i64::try_from(r.to_integer()).expect("small structure constant")
}

/// Ring data for the order spanned by `basis` (first element must be 1).
pub fn quaternion_order_data(tag: &str, labels: &[&str], basis: &[[Rational; 4]; 4]) -> RingSpecData {
    let b = Matrix::from_fn(4, 4, |r, c| basis[c][r].clone());
    let binv = b.inverse().expect("square").expect("basis must span");
    let coords = |q: &[Rational; 4]| binv.mul_vec(q).expect("4x4");
    let mul_table: Vec<Vec<Vec<i64>>> = (0..4)
        .map(|j| {
            (0..4)
                .map(|k| {
                    coords(&quat_mul(&basis[j], &basis[k]))
                        .iter()
                        .map(|c| to_int(c, "structure constant"))
                        .collect()
                })
                .collect()
        })
        .collect();
    let conj_cols: Vec<Vec<i64>> = (0..4)
        .map(|j| coords(&quat_conj(&basis[j])).iter().map(|c| to_int(c, "conjugate")).collect())
        .collect();
    let involution = (0..4).map(|r| (0..4).map(|c| conj_cols[c][r]).collect()).collect();
    let gram = (0..4)
        .map(|j| {
            (0..4)
                .map(|k| {
                    let dot = (0..4).fold(Rational::zero(), |acc, l| acc + &basis[j][l] * &basis[k][l]);
                    WireRational(dot)
                })
                .collect()
        })
        .collect();
    let lattice_rep = (0..4)
        .map(|j| {
            (0..4)
                .map(|l| (0..4).map(|k| WireInteger(int(mul_table[j][k][l]))).collect())
                .collect()
        })
        .collect();
    RingSpecData {
        tag: tag.to_owned(),
        rank: 4,
        labels: labels.iter().map(|s| s.to_string()).collect(),
        mul_table,
        involution,
        gram,
        lattice_rep,
        dimension: 2,
    }
}

fn q(v: [i64; 4], den: i64) -> [Rational; 4] {
    v.map(|x| rat(x, den))
}

/// Hurwitz order, basis `(1, i, j, ω)` with `ω = (1+i+j+k)/2`.
pub fn hurwitz() -> RingSpec {
    let basis = [q([1, 0, 0, 0], 1), q([0, 1, 0, 0], 1), q([0, 0, 1, 0], 1), q([1, 1, 1, 1], 2)];
    RingSpec::from_data(&quaternion_order_data("Hurwitz", &["1", "i", "j", "w"], &basis)).expect("valid order")
}

/// Lipschitz order `Z⟨1, i, j, k⟩`.
pub fn lipschitz() -> RingSpec {
    let basis = [q([1, 0, 0, 0], 1), q([0, 1, 0, 0], 1), q([0, 0, 1, 0], 1), q([0, 0, 0, 1], 1)];
    RingSpec::from_data(&quaternion_order_data("Lipschitz", &["1", "i", "j", "k"], &basis)).expect("valid order")
}

/// Rank-2 quadratic order `Z[x]/(x² − tr·x + nm)` with the given Gram form;
/// conjugation sends `x` to `tr − x`.
fn quadratic_data(tag: &str, labels: [&str; 2], trace: i64, norm: i64, gram: [[Rational; 2]; 2]) -> RingSpecData {
    // x² = −nm + tr·x
    let mul_table = vec![vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1], vec![-norm, trace]]];
    let involution = vec![vec![1, trace], vec![0, -1]];
    let lattice_rep = vec![
        vec![vec![WireInteger(int(1)), WireInteger(int(0))], vec![WireInteger(int(0)), WireInteger(int(1))]],
        vec![vec![WireInteger(int(0)), WireInteger(int(-norm))], vec![WireInteger(int(1)), WireInteger(int(trace))]],
    ];
    RingSpecData {
        tag: tag.to_owned(),
        rank: 2,
        labels: labels.iter().map(|s| s.to_string()).collect(),
        mul_table,
        involution,
        gram: gram.iter().map(|r| r.iter().cloned().map(WireRational).collect()).collect(),
        lattice_rep,
        dimension: 1,
    }
}

pub fn gaussian() -> RingSpec {
    gaussian_with_gram("Z[i]", [rat(1, 1), rat(1, 1)])
}

/// `Z[i]` with the diagonal norm form `diag(g₀, g₁)`, which is still
/// invariant under conjugation.
pub fn gaussian_with_gram(tag: &str, diag: [Rational; 2]) -> RingSpec {
    let [g0, g1] = diag;
    let gram = [[g0, Rational::zero()], [Rational::zero(), g1]];
    RingSpec::from_data(&quadratic_data(tag, ["1", "i"], 0, 1, gram)).expect("valid order")
}

/// Eisenstein integers, basis `(1, ω)` with `ω² = −1 − ω`.
pub fn eisenstein() -> RingSpec {
    let gram = [[rat(1, 1), rat(-1, 2)], [rat(-1, 2), rat(1, 1)]];
    RingSpec::from_data(&quadratic_data("Z[w3]", ["1", "w"], -1, 1, gram)).expect("valid order")
}

pub fn integers() -> RingSpec {
    integers_tagged("Z")
}

pub fn integers_tagged(tag: &str) -> RingSpec {
    integers_with_gram(tag, Rational::one())
}

/// `Z` with norm `|n|² = g·n²`.
pub fn integers_with_gram(tag: &str, g: Rational) -> RingSpec {
    let one = || WireInteger(int(1));
    let zero = || WireInteger(int(0));
    let data = RingSpecData {
        tag: tag.to_owned(),
        rank: 1,
        labels: vec!["1".into()],
        mul_table: vec![vec![vec![1]]],
        involution: vec![vec![1]],
        gram: vec![vec![WireRational(g)]],
        lattice_rep: vec![vec![vec![one(), zero()], vec![zero(), one()]]],
        dimension: 1,
    };
    RingSpec::from_data(&data).expect("valid ring")
}

/// Rank-1 or rank-2 order with a diagonal Gram form (test fixtures).
pub fn diagonal_order(tag: &str, diag: &[Rational]) -> RingSpec {
    match diag {
        [g] => integers_with_gram(tag, g.clone()),
        [g0, g1] => gaussian_with_gram(tag, [g0.clone(), g1.clone()]),
        _ => panic!("diagonal_order supports rank 1 or 2"),
    }
}

/// The four reference rings, in order Z, Z[i], Z[ζ₃], Hurwitz.
pub fn all_reference_rings() -> Vec<RingSpec> {
    vec![integers(), gaussian(), eisenstein(), hurwitz()]
}

/// Reference ring by tag, including the Lipschitz order.
pub fn by_tag(tag: &str) -> Option<RingSpec> {
    match tag {
        "Z" => Some(integers()),
        "Z[i]" => Some(gaussian()),
        "Z[w3]" => Some(eisenstein()),
        "Hurwitz" => Some(hurwitz()),
        "Lipschitz" => Some(lipschitz()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::ProductRingSpec;
    use std::sync::Arc;

    #[test]
    fn hurwitz_table() {
        let h = hurwitz();
        assert_eq!(h.mul(&h.basis(1), &h.basis(2)).unwrap(), h.element_i64(&[-1, -1, -1, 2]).unwrap());
        // ω² = ω − 1
        let w = h.basis(3);
        assert_eq!(h.mul(&w, &w).unwrap(), h.element_i64(&[-1, 0, 0, 1]).unwrap());
        assert_eq!(h.norm_sq(&w), rat(1, 1));
        assert_eq!(h.lambda_min_nonzero().0, rat(1, 1));
        assert!(!h.is_commutative());
        assert!(h.is_norm_multiplicative());
    }

    #[test]
    fn eisenstein_constants() {
        let e = eisenstein();
        let w = e.basis(1);
        assert_eq!(e.mul(&w, &w).unwrap(), e.element_i64(&[-1, -1]).unwrap());
        assert_eq!(e.lambda_min_nonzero().0, rat(1, 1));
        let (c0, c1) = e.norm_equivalence_constants().unwrap();
        assert_eq!(c0, rat(1, 2));
        assert_eq!(c1, rat(3, 1));
        let p = ProductRingSpec::new(vec![Arc::new(e)]).unwrap();
        assert_eq!(p.compute_q0().unwrap(), int(4));
    }

    #[test]
    fn hurwitz_q0() {
        let p = ProductRingSpec::new(vec![Arc::new(hurwitz())]).unwrap();
        assert_eq!(p.compute_q0().unwrap(), int(8));
    }

    #[test]
    fn round_trip_data() {
        for r in all_reference_rings() {
            let again = RingSpec::from_data(&r.to_data()).unwrap();
            assert_eq!(again.to_data().mul_table, r.to_data().mul_table);
        }
    }
}
