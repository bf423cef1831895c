//! Lower bounds for linear combinations of points of full rank.
//!
//! For a point `p = (p_1, …, p_s)` of a simple factor whose orbit
//! `{τ_k p_i}` is linearly independent, the Gram matrix `H` of the orbit
//! under the height form is positive definite. Writing `b_i = Σ_k β_ik τ_k`,
//!
//! `‖Σ b_i p_i‖² = βᵀHβ >= λ_H |β|² >= λ_H/(c1²·max h(p_i)) · Σ|b_i|² h(p_i)`.
//!
//! A perturbation with `h(ξ_i) <= ε₀²` moves the sum by at most
//! `κ ε₀ √s (Σ|b_i|²)^{1/2}`; with `ε₀² = μ·min h/(4κ²s)` it eats at most
//! half, leaving `c = μ/4`.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::certified::{min_eigenvalue_lower_bound, sqrt_lower, sum_of_roots_sq_upper};
use crate::error::{domain, shape, Result};
use crate::linalg::Matrix;
use crate::model::{ModelPoint, ModelSpace, Slot};
use crate::morphisms::BlockMorphism;
use crate::rings::RingElement;
use crate::{int, rat, ratz, Integer, Rational};

/// `(c_sq, eps0_sq)` for one factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorConstants {
    pub factor: usize,
    pub lambda_h: Rational,
    pub c_sq: Rational,
    pub eps0_sq: Rational,
    pub min_h: Rational,
}

/// Constants for a point spread over several factors; the combined values
/// are the minima over factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointConstants {
    pub c_sq: Rational,
    pub eps0_sq: Rational,
    pub factors: Vec<FactorConstants>,
}

impl PointConstants {
    pub fn factor(&self, i: usize) -> Option<&FactorConstants> {
        self.factors.iter().find(|f| f.factor == i)
    }
}

fn slot_height(space: &ModelSpace, i: usize, s: &Slot) -> Rational {
    space.slot_height(i, s)
}

/// Height bilinear form on free parts of factor `i`.
fn height_form(space: &ModelSpace, i: usize, u: &[Rational], v: &[Rational]) -> Rational {
    let ring = space.ring().factor(i);
    let t = ring.rank();
    (0..space.nu()[i]).fold(Rational::zero(), |acc, c| {
        acc + ring.gram().bilinear_form(&u[c * t..(c + 1) * t], &v[c * t..(c + 1) * t])
    })
}

/// Constants of the lower bound for the full-rank point `p`.
pub fn point_lower_constants(space: &ModelSpace, p: &ModelPoint) -> Result<PointConstants> {
    let ring = space.ring();
    if p.shape().len() != ring.len() {
        return shape("point over a different product ring");
    }
    if space.rank_of_point(p) != p.shape() {
        return domain(format!("point has rank {} but {} coordinates", space.rank_of_point(p), p.shape()));
    }
    let mut factors = Vec::new();
    for i in 0..ring.len() {
        let slots = p.slots(i);
        if slots.is_empty() {
            continue;
        }
        let f = ring.factor(i);
        let vecs = space.orbit_vectors(i, slots);
        let h = Matrix::from_fn(vecs.len(), vecs.len(), |r, c| height_form(space, i, &vecs[r], &vecs[c]));
        let lambda_h = min_eigenvalue_lower_bound(&h)
            .ok_or_else(|| crate::error::Error::Domain("orbit Gram matrix is not positive definite".into()))?;
        let heights: Vec<Rational> = slots.iter().map(|s| slot_height(space, i, s)).collect();
        let max_h = heights.iter().max().expect("non-empty").clone();
        let min_h = heights.iter().min().expect("non-empty").clone();
        let (_, c1_sq) = f.norm_equivalence_constants()?;
        let mu = &lambda_h / (&c1_sq * &max_h);
        let kappa_sq = f.operator_constant_sq();
        let s = ratz(&int(slots.len() as i64));
        let c_sq = &mu / rat(4, 1);
        let eps0_sq = &mu * &min_h / (rat(4, 1) * kappa_sq * s);
        factors.push(FactorConstants {
            factor: i,
            lambda_h,
            c_sq,
            eps0_sq,
            min_h,
        });
    }
    if factors.is_empty() {
        return domain("point has no coordinates");
    }
    Ok(PointConstants {
        c_sq: factors.iter().map(|f| f.c_sq.clone()).min().expect("non-empty"),
        eps0_sq: factors.iter().map(|f| f.eps0_sq.clone()).min().expect("non-empty"),
        factors,
    })
}

/// `Σ_i b_i (p_i − ξ_i)` in factor `i`, as a single slot.
fn combination(space: &ModelSpace, i: usize, b: &[RingElement], p: &[Slot], xi: &[Slot]) -> Slot {
    let mut acc = space.zero_slot(i);
    for ((bi, pi), xii) in b.iter().zip(p).zip(xi) {
        let d = Slot {
            torsion: pi.torsion.iter().zip(&xii.torsion).map(|(x, y)| x - y).collect(),
            free: pi.free.iter().zip(&xii.free).map(|(x, y)| x - y).collect(),
        };
        let t = space.act(i, bi, &d);
        acc = Slot {
            torsion: acc.torsion.iter().zip(&t.torsion).map(|(x, y)| x + y).collect(),
            free: acc.free.iter().zip(&t.free).map(|(x, y)| x + y).collect(),
        };
    }
    acc
}

/// Whether `c_sq Σ|b_i|² h(p_i) <= h(Σ b_i (p_i − ξ_i))` in factor `i`.
pub fn lower_bound_holds(space: &ModelSpace, i: usize, c_sq: &Rational, b: &[RingElement], p: &[Slot], xi: &[Slot]) -> bool {
    let ring = space.ring().factor(i);
    let lhs = b
        .iter()
        .zip(p)
        .fold(Rational::zero(), |acc, (bi, pi)| acc + ring.norm_sq(bi) * slot_height(space, i, pi));
    c_sq * lhs <= slot_height(space, i, &combination(space, i, b, p, xi))
}

/// Outcome of a randomized search for counterexamples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Falsification {
    pub trials: u64,
    pub violations: u64,
    /// Trial indices of the first few violations.
    pub first: Vec<u64>,
}

/// A random slot of factor `i` with `h <= eps_sq`, free coordinates on a
/// grid and scaled into the ball by a rational factor.
fn random_small_slot(space: &ModelSpace, rng: &mut ChaCha8Rng, i: usize, eps_sq: &Rational) -> Slot {
    let mut s = space.zero_slot(i);
    if eps_sq.is_zero() {
        return s;
    }
    for v in &mut s.free {
        *v = rat(rng.gen_range(-8..=8), 8);
    }
    let h = slot_height(space, i, &s);
    if h > *eps_sq {
        // push some samples onto the boundary region
        let f = sqrt_lower(&(eps_sq / &h));
        for v in &mut s.free {
            *v = &*v * &f;
        }
    }
    s
}

/// Searches `trials` random `(b, ξ)` with `|b_i|∞ <= coeff_bound` and
/// `h(ξ_i) <= eps0_sq` for violations of the lower bound.
pub fn falsify_point_constants(
    space: &ModelSpace,
    p: &ModelPoint,
    consts: &PointConstants,
    trials: u64,
    coeff_bound: i64,
    seed: u64,
) -> Falsification {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Falsification {
        trials,
        violations: 0,
        first: Vec::new(),
    };
    for n in 0..trials {
        let fc = &consts.factors[(n as usize) % consts.factors.len()];
        let i = fc.factor;
        let ring = space.ring().factor(i);
        let slots = p.slots(i);
        let b: Vec<RingElement> = loop {
            let b: Vec<RingElement> = slots.iter().map(|_| ring.random_element(&mut rng, coeff_bound)).collect();
            if b.iter().any(|e| !e.is_zero()) {
                break b;
            }
        };
        let xi: Vec<Slot> = slots.iter().map(|_| random_small_slot(space, &mut rng, i, &fc.eps0_sq)).collect();
        if !lower_bound_holds(space, i, &fc.c_sq, &b, slots, &xi) {
            out.violations += 1;
            if out.first.len() < 8 {
                out.first.push(n);
            }
        }
    }
    out
}

/// `c_sq·min h(p_i)·|φ₀|² <= C²·h(φ₀(p − ξ))` for a single-row `φ₀`.
pub fn morphism_lower_bound_check(
    space: &ModelSpace,
    p: &ModelPoint,
    consts: &PointConstants,
    phi0: &BlockMorphism,
    xi: &ModelPoint,
    c_sq_ledger: &Rational,
) -> Result<bool> {
    let target = phi0.target();
    if target.total() != 1 {
        return shape("φ₀ must have a single row");
    }
    if phi0.source() != p.shape() || xi.shape() != p.shape() {
        return shape("φ₀, p and ξ must share the source shape");
    }
    if phi0.is_zero() {
        return domain("φ₀ = 0 has no lower bound");
    }
    let i = target.0.iter().position(|r| *r == 1).expect("one row");
    let fc = consts
        .factor(i)
        .ok_or_else(|| crate::error::Error::Domain(format!("point has no coordinates in factor {i}")))?;
    if space.height(xi) > fc.eps0_sq {
        return domain("h(ξ) exceeds ε₀²");
    }
    let lhs = &fc.c_sq * &fc.min_h * phi0.norm_sq();
    let img = space.apply(phi0, &space.sub(p, xi)?)?;
    Ok(lhs <= c_sq_ledger * space.height(&img))
}

/// Result of [`inflate_generators`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inflation {
    pub n: Integer,
    pub gamma: ModelPoint,
    /// `(K₀ + ε)²` rounded up.
    pub radius_sq: Rational,
}

/// Smallest power of two `N` with `N²·c_sq·min h(γ_i) >= (K₀ + ε)²·C²`,
/// together with `Nγ`.
pub fn inflate_generators(
    space: &ModelSpace,
    gamma: &ModelPoint,
    consts: &PointConstants,
    k0_sq: &Rational,
    eps_sq: &Rational,
    c_sq_ledger: &Rational,
) -> Result<Inflation> {
    if k0_sq.is_negative() || eps_sq.is_negative() {
        return domain("radii must be non-negative");
    }
    let radius_sq = sum_of_roots_sq_upper(k0_sq, eps_sq);
    let base = consts
        .factors
        .iter()
        .map(|f| &f.c_sq * &f.min_h)
        .min()
        .expect("non-empty");
    let need = &radius_sq * c_sq_ledger;
    let mut n = Integer::one();
    while ratz(&(&n * &n)) * &base < need {
        n *= 2;
    }
    Ok(Inflation {
        gamma: space.scale(gamma, &n),
        n,
        radius_sq,
    })
}

/// Per-factor summary for reports.
pub fn constants_table(consts: &PointConstants) -> BTreeMap<usize, (Rational, Rational)> {
    consts
        .factors
        .iter()
        .map(|f| (f.factor, (f.c_sq.clone(), f.eps0_sq.clone())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphisms::MultiIndex;
    use crate::reference;
    use crate::rings::{ProductRingSpec, RingSpec};
    use proptest::prelude::*;
    use std::sync::Arc;

    fn space(r: RingSpec, nu: usize) -> ModelSpace {
        ModelSpace::new(Arc::new(ProductRingSpec::new(vec![Arc::new(r)]).unwrap()), vec![nu]).unwrap()
    }

    #[test]
    fn unit_point_over_z() {
        let sp = space(reference::integers(), 1);
        let p = sp.free_point(vec![vec![vec![rat(1, 1)]]]).unwrap();
        let c = point_lower_constants(&sp, &p).unwrap();
        assert_eq!(c.factors[0].lambda_h, rat(1, 1));
        assert!(c.c_sq <= rat(1, 4));
        assert_eq!(c.eps0_sq, rat(1, 4));
        let f = falsify_point_constants(&sp, &p, &c, 2000, 20, 1);
        assert_eq!(f.violations, 0);
        let tighter = PointConstants {
            eps0_sq: rat(1, 16),
            factors: vec![FactorConstants {
                eps0_sq: rat(1, 16),
                ..c.factors[0].clone()
            }],
            ..c.clone()
        };
        assert_eq!(falsify_point_constants(&sp, &p, &tighter, 2000, 20, 2).violations, 0);
        // ξ = 0, b = 1
        let one = sp.ring().factor(0).one();
        assert!(lower_bound_holds(&sp, 0, &c.c_sq, &[one], p.slots(0), &[sp.zero_slot(0)]));
    }

    #[test]
    fn scaled_point_keeps_c() {
        let sp = space(reference::gaussian(), 2);
        let p = sp.free_point(vec![vec![vec![rat(1, 1), rat(0, 1), rat(1, 2), rat(1, 1)]]]).unwrap();
        let c = point_lower_constants(&sp, &p).unwrap();
        let c2 = point_lower_constants(&sp, &sp.scale(&p, &int(2))).unwrap();
        assert_eq!(c.c_sq, c2.c_sq);
        assert_eq!(&c.eps0_sq * rat(4, 1), c2.eps0_sq);
    }

    #[test]
    fn rank_deficient_point_rejected() {
        let sp = space(reference::integers(), 1);
        let p = sp.free_point(vec![vec![vec![rat(1, 1)], vec![rat(2, 1)]]]).unwrap();
        assert!(matches!(point_lower_constants(&sp, &p), Err(crate::error::Error::Domain(_))));
    }

    #[test]
    fn morphism_check() {
        let sp = space(reference::integers(), 2);
        let p = sp.free_point(vec![vec![vec![rat(1, 1), rat(0, 1)], vec![rat(1, 3), rat(1, 1)]]]).unwrap();
        let c = point_lower_constants(&sp, &p).unwrap();
        let ring = sp.ring().clone();
        let zero = sp.zero(&p.shape());
        let unit = BlockMorphism::from_i64(ring.clone(), &[vec![vec![vec![1], vec![0]]]]).unwrap();
        assert!(morphism_lower_bound_check(&sp, &p, &c, &unit, &zero, &rat(1, 1)).unwrap());
        for a in -10i64..=10 {
            for b in -10i64..=10 {
                if a == 0 && b == 0 {
                    continue;
                }
                let phi = BlockMorphism::from_i64(ring.clone(), &[vec![vec![vec![a], vec![b]]]]).unwrap();
                assert!(morphism_lower_bound_check(&sp, &p, &c, &phi, &zero, &rat(1, 1)).unwrap());
            }
        }
        let z = BlockMorphism::zero(ring, &MultiIndex(vec![1]), &MultiIndex(vec![2]));
        assert!(morphism_lower_bound_check(&sp, &p, &c, &z, &zero, &rat(1, 1)).is_err());
    }

    #[test]
    fn inflation_examples() {
        let sp = space(reference::integers(), 1);
        let g = sp.free_point(vec![vec![vec![rat(1, 1)]]]).unwrap();
        let c = point_lower_constants(&sp, &g).unwrap();
        let r = inflate_generators(&sp, &g, &c, &rat(0, 1), &rat(0, 1), &rat(1, 1)).unwrap();
        assert_eq!(r.n, int(1));
        // N²/4 >= 100·2
        let r = inflate_generators(&sp, &g, &c, &rat(100, 1), &rat(0, 1), &rat(2, 1)).unwrap();
        assert_eq!(r.n, int(32));
        assert_eq!(r.gamma, sp.scale(&g, &int(32)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn random_points_survive_search(seed in any::<u64>(), which in 0usize..4, s in 1usize..=2) {
            let ring = reference::all_reference_rings().remove(which);
            let sp = space(ring, s);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = loop {
                let p = sp.random_point(&mut rng, &MultiIndex(vec![s]), 3, 2, 1);
                if sp.rank_of_point(&p) == p.shape() {
                    break p;
                }
            };
            let c = point_lower_constants(&sp, &p).unwrap();
            prop_assert!(c.c_sq.is_positive() && c.eps0_sq.is_positive());
            prop_assert_eq!(falsify_point_constants(&sp, &p, &c, 200, 20, seed).violations, 0);
        }
    }
}
