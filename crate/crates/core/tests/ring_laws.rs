use std::sync::Arc;

use anomalous_core::model::ModelSpace;
use anomalous_core::morphisms::{BlockMorphism, MultiIndex};
use anomalous_core::reference;
use anomalous_core::rings::{ProductRingSpec, RingElement, RingSpec};
use anomalous_core::{int, rat};
use proptest::prelude::*;

fn rings() -> Vec<RingSpec> {
    reference::all_reference_rings()
}

fn elem(ring: &RingSpec, c: &[i64]) -> RingElement {
    ring.element_i64(&c[..ring.rank()]).unwrap()
}

fn coords() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-50i64..=50, 4)
}

#[test]
fn weighted_gram_breaks_multiplicativity() {
    let skew = reference::gaussian_with_gram("Z[i]-skew", [rat(2, 1), rat(3, 1)]);
    assert!(!skew.is_norm_multiplicative());
    let i = skew.basis(1);
    // |i·i|² = |−1|² = 2 but |i|⁴ = 9
    assert_ne!(skew.norm_sq(&skew.mul(&i, &i).unwrap()), skew.norm_sq(&i) * skew.norm_sq(&i));
    for r in rings() {
        assert!(r.is_norm_multiplicative(), "{}", r.tag());
    }
}

#[test]
fn reference_constants() {
    for (r, q0) in rings().into_iter().zip([2, 4, 4, 8]) {
        let p = ProductRingSpec::new(vec![Arc::new(r)]).unwrap();
        assert_eq!(p.compute_q0().unwrap(), int(q0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplication_laws(a in coords(), b in coords(), c in coords()) {
        for r in rings() {
            let (a, b, c) = (elem(&r, &a), elem(&r, &b), elem(&r, &c));
            let ab = r.mul(&a, &b).unwrap();
            prop_assert_eq!(r.mul(&ab, &c).unwrap(), r.mul(&a, &r.mul(&b, &c).unwrap()).unwrap());
            prop_assert_eq!(
                r.mul(&a, &r.add(&b, &c).unwrap()).unwrap(),
                r.add(&ab, &r.mul(&a, &c).unwrap()).unwrap()
            );
            prop_assert_eq!(r.norm_sq(&ab), r.norm_sq(&a) * r.norm_sq(&b));
            prop_assert_eq!(r.conj(&ab), r.mul(&r.conj(&b), &r.conj(&a)).unwrap());
            prop_assert_eq!(r.norm_sq(&r.conj(&a)), r.norm_sq(&a));
        }
    }

    #[test]
    fn apply_is_additive_and_height_quadratic(seed in any::<u64>(), n in -4i64..=4) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for r in rings() {
            let ring = Arc::new(ProductRingSpec::new(vec![Arc::new(r.clone())]).unwrap());
            let sp = ModelSpace::new(ring.clone(), vec![2]).unwrap();
            let g = MultiIndex(vec![2]);
            let blocks = vec![vec![(0..2).map(|_| r.random_element(&mut rng, 5)).collect()]];
            let phi = BlockMorphism::new(ring, &MultiIndex(vec![1]), &g, blocks).unwrap();
            let x = sp.random_point(&mut rng, &g, 3, 4, 6);
            let y = sp.random_point(&mut rng, &g, 3, 4, 6);
            let lhs = sp.apply(&phi, &sp.add(&x, &y).unwrap()).unwrap();
            let rhs = sp.add(&sp.apply(&phi, &x).unwrap(), &sp.apply(&phi, &y).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(sp.height(&sp.scale(&x, &int(n))), sp.height(&x) * rat(n * n, 1));
        }
    }
}
