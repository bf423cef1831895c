//! A computable stand-in for the points of `A^g`.
//!
//! Each coordinate of `A_i` is a torsion part in `(Q/Z)^{2d_i}` plus a free
//! part in `(E_i ⊗ Q)^{ν_i}`. `E_i` acts on torsion through the lattice
//! representation and on the free part by left multiplication; the height is
//! the Rosati norm² of the free part, maximised over coordinates.

use std::sync::Arc;

use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, shape, Error, Result};
use crate::morphisms::{BlockMorphism, MultiIndex};
use crate::rings::{ProductRingSpec, RingElement, RingSpec};
use crate::wire::WireRational;
use crate::{int, ratz, Integer, Rational};

/// One coordinate of `A_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Slot {
    pub torsion: Vec<Rational>,
    pub free: Vec<Rational>,
}

fn frac(x: &Rational) -> Rational {
    x - Rational::from_integer(x.floor().to_integer())
}

impl Slot {
    fn normalized(mut self) -> Self {
        for t in &mut self.torsion {
            *t = frac(t);
        }
        self
    }

    pub fn is_torsion(&self) -> bool {
        self.free.iter().all(Zero::is_zero)
    }

    pub fn is_zero(&self) -> bool {
        self.is_torsion() && self.torsion.iter().all(Zero::is_zero)
    }
}

/// A point of `A^g`: `slots[i][j]` is coordinate `j` of factor `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModelPoint {
    slots: Vec<Vec<Slot>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotData {
    pub torsion: Vec<WireRational>,
    pub free: Vec<WireRational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointData(pub Vec<Vec<SlotData>>);

impl ModelPoint {
    pub fn shape(&self) -> MultiIndex {
        MultiIndex(self.slots.iter().map(Vec::len).collect())
    }

    pub fn slots(&self, factor: usize) -> &[Slot] {
        &self.slots[factor]
    }

    pub fn slot(&self, factor: usize, j: usize) -> &Slot {
        &self.slots[factor][j]
    }

    pub fn is_torsion(&self) -> bool {
        self.slots.iter().flatten().all(Slot::is_torsion)
    }

    pub fn is_zero(&self) -> bool {
        self.slots.iter().flatten().all(Slot::is_zero)
    }

    /// Order of the point when it is torsion.
    pub fn torsion_order(&self) -> Option<Integer> {
        if !self.is_torsion() {
            return None;
        }
        Some(
            self.slots
                .iter()
                .flatten()
                .flat_map(|s| s.torsion.iter())
                .fold(Integer::one(), |acc, t| acc.lcm(t.denom())),
        )
    }

    pub fn to_data(&self) -> PointData {
        PointData(
            self.slots
                .iter()
                .map(|f| {
                    f.iter()
                        .map(|s| SlotData {
                            torsion: s.torsion.iter().cloned().map(WireRational).collect(),
                            free: s.free.iter().cloned().map(WireRational).collect(),
                        })
                        .collect()
                })
                .collect(),
        )
    }
}

/// The model group: a product ring plus free ranks `ν_i`.
#[derive(Debug, Clone)]
pub struct ModelSpace {
    ring: Arc<ProductRingSpec>,
    nu: Vec<usize>,
}

impl ModelSpace {
    pub fn new(ring: Arc<ProductRingSpec>, nu: Vec<usize>) -> Result<Self> {
        if nu.len() != ring.len() {
            return shape("one free rank per factor");
        }
        Ok(ModelSpace { ring, nu })
    }

    pub fn ring(&self) -> &Arc<ProductRingSpec> {
        &self.ring
    }

    pub fn nu(&self) -> &[usize] {
        &self.nu
    }

    fn torsion_len(&self, i: usize) -> usize {
        2 * self.ring.factor(i).dimension()
    }

    fn free_len(&self, i: usize) -> usize {
        self.ring.factor(i).rank() * self.nu[i]
    }

    fn check_slot(&self, i: usize, s: &Slot) -> Result<()> {
        if s.torsion.len() != self.torsion_len(i) || s.free.len() != self.free_len(i) {
            return shape(format!(
                "slot of factor {i} needs {} torsion and {} free coordinates",
                self.torsion_len(i),
                self.free_len(i)
            ));
        }
        Ok(())
    }

    pub fn point(&self, slots: Vec<Vec<Slot>>) -> Result<ModelPoint> {
        if slots.len() != self.ring.len() {
            return shape("one slot list per factor");
        }
        for (i, f) in slots.iter().enumerate() {
            for s in f {
                self.check_slot(i, s)?;
            }
        }
        Ok(ModelPoint {
            slots: slots.into_iter().map(|f| f.into_iter().map(Slot::normalized).collect()).collect(),
        })
    }

    pub fn from_data(&self, data: &PointData) -> Result<ModelPoint> {
        self.point(
            data.0
                .iter()
                .map(|f| {
                    f.iter()
                        .map(|s| Slot {
                            torsion: s.torsion.iter().map(|w| w.0.clone()).collect(),
                            free: s.free.iter().map(|w| w.0.clone()).collect(),
                        })
                        .collect()
                })
                .collect(),
        )
    }

    pub fn zero_slot(&self, i: usize) -> Slot {
        Slot {
            torsion: vec![Rational::zero(); self.torsion_len(i)],
            free: vec![Rational::zero(); self.free_len(i)],
        }
    }

    pub fn zero(&self, g: &MultiIndex) -> ModelPoint {
        ModelPoint {
            slots: (0..self.ring.len()).map(|i| vec![self.zero_slot(i); g.get(i)]).collect(),
        }
    }

    /// Point with the given free parts and zero torsion.
    pub fn free_point(&self, free: Vec<Vec<Vec<Rational>>>) -> Result<ModelPoint> {
        let slots = free
            .into_iter()
            .enumerate()
            .map(|(i, f)| {
                f.into_iter()
                    .map(|v| Slot {
                        torsion: vec![Rational::zero(); self.torsion_len(i)],
                        free: v,
                    })
                    .collect()
            })
            .collect();
        self.point(slots)
    }

    fn same_shape(&self, a: &ModelPoint, b: &ModelPoint) -> Result<()> {
        if a.shape() != b.shape() {
            return shape(format!("points of shapes {} and {}", a.shape(), b.shape()));
        }
        Ok(())
    }

    fn zip(&self, a: &ModelPoint, b: &ModelPoint, f: impl Fn(&Rational, &Rational) -> Rational) -> Result<ModelPoint> {
        self.same_shape(a, b)?;
        let slots = a
            .slots
            .iter()
            .zip(&b.slots)
            .map(|(fa, fb)| {
                fa.iter()
                    .zip(fb)
                    .map(|(sa, sb)| {
                        Slot {
                            torsion: sa.torsion.iter().zip(&sb.torsion).map(|(x, y)| f(x, y)).collect(),
                            free: sa.free.iter().zip(&sb.free).map(|(x, y)| f(x, y)).collect(),
                        }
                        .normalized()
                    })
                    .collect()
            })
            .collect();
        Ok(ModelPoint { slots })
    }

    pub fn add(&self, a: &ModelPoint, b: &ModelPoint) -> Result<ModelPoint> {
        self.zip(a, b, |x, y| x + y)
    }

    pub fn sub(&self, a: &ModelPoint, b: &ModelPoint) -> Result<ModelPoint> {
        self.zip(a, b, |x, y| x - y)
    }

    pub fn neg(&self, a: &ModelPoint) -> ModelPoint {
        self.scale(a, &int(-1))
    }

    /// `[n]x`.
    pub fn scale(&self, a: &ModelPoint, n: &Integer) -> ModelPoint {
        let k = ratz(n);
        ModelPoint {
            slots: a
                .slots
                .iter()
                .map(|f| {
                    f.iter()
                        .map(|s| {
                            Slot {
                                torsion: s.torsion.iter().map(|t| t * &k).collect(),
                                free: s.free.iter().map(|v| v * &k).collect(),
                            }
                            .normalized()
                        })
                        .collect()
                })
                .collect(),
        }
    }

    /// The canonical `y/b`: free part divided by `b`, torsion `t ↦ t/b` with
    /// `t ∈ [0,1)`.
    pub fn divide(&self, y: &ModelPoint, b: &Integer) -> Result<ModelPoint> {
        if !b.is_positive() {
            return domain("divide needs b >= 1");
        }
        let k = ratz(b);
        Ok(ModelPoint {
            slots: y
                .slots
                .iter()
                .map(|f| {
                    f.iter()
                        .map(|s| Slot {
                            torsion: s.torsion.iter().map(|t| t / &k).collect(),
                            free: s.free.iter().map(|v| v / &k).collect(),
                        })
                        .collect()
                })
                .collect(),
        })
    }

    /// `e·s` for `e ∈ E_i`.
    pub fn act(&self, i: usize, e: &RingElement, s: &Slot) -> Slot {
        let ring = self.ring.factor(i);
        let t = ring.rank();
        let coeffs = e.rational_coords();
        let mut free = Vec::with_capacity(s.free.len());
        for u in 0..self.nu[i] {
            free.extend(ring.mul_coords(&coeffs, &s.free[u * t..(u + 1) * t]));
        }
        let rho = ring.lattice_image(e).map(ratz);
        let torsion = rho.mul_vec(&s.torsion).expect("lattice size");
        Slot { torsion, free }.normalized()
    }

    fn add_slots(a: &Slot, b: &Slot) -> Slot {
        Slot {
            torsion: a.torsion.iter().zip(&b.torsion).map(|(x, y)| x + y).collect(),
            free: a.free.iter().zip(&b.free).map(|(x, y)| x + y).collect(),
        }
        .normalized()
    }

    /// `φ(x)`.
    pub fn apply(&self, phi: &BlockMorphism, x: &ModelPoint) -> Result<ModelPoint> {
        if phi.source() != x.shape() {
            return shape(format!("morphism source {} but point of shape {}", phi.source(), x.shape()));
        }
        let target = phi.target();
        let slots = (0..self.ring.len())
            .map(|i| {
                (0..target.get(i))
                    .map(|k| {
                        x.slots[i].iter().enumerate().fold(self.zero_slot(i), |acc, (c, xs)| {
                            Self::add_slots(&acc, &self.act(i, phi.entry(i, k, c), xs))
                        })
                    })
                    .collect()
            })
            .collect();
        Ok(ModelPoint { slots })
    }

    /// Norm² of the free part of one slot of factor `i`.
    pub fn slot_height(&self, i: usize, s: &Slot) -> Rational {
        let ring: &RingSpec = self.ring.factor(i);
        let t = ring.rank();
        (0..self.nu[i]).fold(Rational::zero(), |acc, u| acc + ring.norm_sq_rational(&s.free[u * t..(u + 1) * t]))
    }

    /// `h(x)`: largest slot norm², zero on torsion.
    pub fn height(&self, x: &ModelPoint) -> Rational {
        x.slots
            .iter()
            .enumerate()
            .flat_map(|(i, f)| f.iter().map(move |s| self.slot_height(i, s)))
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub fn in_ball(&self, x: &ModelPoint, eps_sq: &Rational) -> Result<bool> {
        if eps_sq.is_negative() {
            return domain("ball radius² must be non-negative");
        }
        Ok(self.height(x) <= *eps_sq)
    }

    /// Every point with zero free part and torsion in `(1/N)Z/Z`.
    pub fn torsion_enum(&self, g: &MultiIndex, n: u32, budget: u64) -> Result<Vec<ModelPoint>> {
        if n == 0 {
            return domain("torsion level must be positive");
        }
        let coords: usize = (0..self.ring.len()).map(|i| self.torsion_len(i) * g.get(i)).sum();
        let count = u64::from(n)
            .checked_pow(u32::try_from(coords).unwrap_or(u32::MAX))
            .filter(|c| *c <= budget)
            .ok_or_else(|| Error::Resource(format!("{n}^{coords} torsion points exceed the budget {budget}")))?;
        let mut out = Vec::with_capacity(count as usize);
        let mut digits = vec![0u32; coords];
        let den = i64::from(n);
        for _ in 0..count {
            let mut it = digits.iter();
            let slots = (0..self.ring.len())
                .map(|i| {
                    (0..g.get(i))
                        .map(|_| Slot {
                            torsion: (0..self.torsion_len(i))
                                .map(|_| crate::rat(i64::from(*it.next().expect("digit")), den))
                                .collect(),
                            free: vec![Rational::zero(); self.free_len(i)],
                        })
                        .collect()
                })
                .collect();
            out.push(ModelPoint { slots });
            for d in digits.iter_mut() {
                *d += 1;
                if *d < n {
                    break;
                }
                *d = 0;
            }
        }
        Ok(out)
    }

    /// Per factor, `rank_Q span{τ_k·p_j} / t_i`.
    pub fn rank_of_point(&self, p: &ModelPoint) -> MultiIndex {
        MultiIndex(
            (0..self.ring.len())
                .map(|i| {
                    let ring = self.ring.factor(i);
                    let vecs = self.orbit_vectors(i, p.slots(i));
                    if vecs.is_empty() {
                        return 0;
                    }
                    let m = crate::linalg::Matrix::from_rows(vecs).expect("rectangular");
                    m.rank() / ring.rank()
                })
                .collect(),
        )
    }

    /// Free parts of `τ_k·p_j`, ordered `j`-major.
    pub fn orbit_vectors(&self, i: usize, slots: &[Slot]) -> Vec<Vec<Rational>> {
        let ring = self.ring.factor(i);
        slots
            .iter()
            .flat_map(|s| (0..ring.rank()).map(move |k| self.act(i, &ring.basis(k), s).free))
            .collect()
    }

    /// `(x, p)` in `A^{g+s}`.
    pub fn concat(&self, x: &ModelPoint, p: &ModelPoint) -> Result<ModelPoint> {
        if x.slots.len() != p.slots.len() {
            return shape("concat needs points over the same ring");
        }
        Ok(ModelPoint {
            slots: x.slots.iter().zip(&p.slots).map(|(a, b)| a.iter().chain(b).cloned().collect()).collect(),
        })
    }

    /// Inverse of [`concat`](Self::concat) at the split point `g`.
    pub fn split(&self, xp: &ModelPoint, g: &MultiIndex) -> Result<(ModelPoint, ModelPoint)> {
        if g.len() != xp.slots.len() || g.0.iter().zip(&xp.slots).any(|(gi, f)| *gi > f.len()) {
            return shape("split point outside the point");
        }
        let (a, b) = xp
            .slots
            .iter()
            .zip(&g.0)
            .map(|(f, gi)| (f[..*gi].to_vec(), f[*gi..].to_vec()))
            .unzip();
        Ok((ModelPoint { slots: a }, ModelPoint { slots: b }))
    }

    /// Random point with free coordinates `k/den`, `|k| <= bound·den`, and
    /// torsion with denominator `tors_den`.
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R, g: &MultiIndex, bound: i64, den: i64, tors_den: i64) -> ModelPoint {
        let slots = (0..self.ring.len())
            .map(|i| {
                (0..g.get(i))
                    .map(|_| {
                        Slot {
                            torsion: (0..self.torsion_len(i))
                                .map(|_| crate::rat(rng.gen_range(0..tors_den.max(1)), tors_den.max(1)))
                                .collect(),
                            free: (0..self.free_len(i))
                                .map(|_| crate::rat(rng.gen_range(-bound * den..=bound * den), den))
                                .collect(),
                        }
                        .normalized()
                    })
                    .collect()
            })
            .collect();
        ModelPoint { slots }
    }

    /// Upper bound `C_op²` with `h(φx) <= C_op²·|φ|²·h(x)` for morphisms with
    /// at most `max_cols` columns per block.
    pub fn operator_constant_sq(&self, max_cols: usize) -> Rational {
        let g = ratz(&int(max_cols.max(1) as i64));
        &g * &g * self.ring.operator_constant_sq()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference;
    use crate::rat;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn space(rings: Vec<RingSpec>, nu: Vec<usize>) -> ModelSpace {
        let prod = ProductRingSpec::new(rings.into_iter().map(Arc::new).collect()).unwrap();
        ModelSpace::new(Arc::new(prod), nu).unwrap()
    }

    fn z_space() -> ModelSpace {
        space(vec![reference::integers()], vec![1])
    }

    #[test]
    fn apply_examples() {
        let sp = z_space();
        let g = MultiIndex(vec![1]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = sp.random_point(&mut rng, &g, 5, 3, 4);
        let id = BlockMorphism::identity(sp.ring().clone(), &g);
        assert_eq!(sp.apply(&id, &x).unwrap(), x);
        let t = sp
            .point(vec![vec![Slot {
                torsion: vec![rat(1, 2), rat(0, 1)],
                free: vec![rat(0, 1)],
            }]])
            .unwrap();
        let two = BlockMorphism::scalar(sp.ring().clone(), &g, &int(2));
        assert!(sp.apply(&two, &t).unwrap().is_zero());
    }

    #[test]
    fn height_examples() {
        let sp = z_space();
        let t = sp
            .point(vec![vec![Slot {
                torsion: vec![rat(1, 3), rat(2, 3)],
                free: vec![rat(0, 1)],
            }]])
            .unwrap();
        assert_eq!(sp.height(&t), rat(0, 1));
        let e = sp.free_point(vec![vec![vec![rat(1, 1)]]]).unwrap();
        assert_eq!(sp.height(&e), rat(1, 1));
        assert!(sp.in_ball(&t, &rat(0, 1)).unwrap());
        let two = sp.free_point(vec![vec![vec![rat(2, 1)]]]).unwrap();
        let hx = sp.height(&two);
        assert_eq!(hx, rat(4, 1));
        assert!(!sp.in_ball(&two, &rat(1, 1)).unwrap());
        assert!(sp.in_ball(&two, &rat(4, 1)).unwrap());
    }

    #[test]
    fn divide_examples() {
        let sp = z_space();
        let y = sp.free_point(vec![vec![vec![rat(2, 1)]]]).unwrap();
        assert_eq!(sp.divide(&y, &int(1)).unwrap(), y);
        let half = sp.divide(&y, &int(2)).unwrap();
        assert_eq!(half.slot(0, 0).free, vec![rat(1, 1)]);
        assert_eq!(sp.height(&half), sp.height(&y) / rat(4, 1));
        let t = sp
            .point(vec![vec![Slot {
                torsion: vec![rat(1, 2), rat(0, 1)],
                free: vec![rat(0, 1)],
            }]])
            .unwrap();
        let q = sp.divide(&t, &int(2)).unwrap();
        assert_eq!(q.slot(0, 0).torsion[0], rat(1, 4));
        assert_eq!(sp.scale(&q, &int(2)), t);
    }

    #[test]
    fn torsion_enum_counts() {
        let sp = z_space();
        assert_eq!(sp.torsion_enum(&MultiIndex(vec![1]), 1, 10).unwrap().len(), 1);
        assert_eq!(sp.torsion_enum(&MultiIndex(vec![1]), 2, 10).unwrap().len(), 4);
        assert_eq!(sp.torsion_enum(&MultiIndex(vec![2]), 3, 100).unwrap().len(), 81);
        assert!(matches!(sp.torsion_enum(&MultiIndex(vec![2]), 3, 80), Err(Error::Resource(_))));
    }

    #[test]
    fn rank_examples() {
        let sp = space(vec![reference::integers(), reference::gaussian()], vec![2, 1]);
        let s = MultiIndex(vec![1, 1]);
        assert_eq!(sp.rank_of_point(&sp.zero(&s)), MultiIndex(vec![0, 0]));
        let p = sp
            .free_point(vec![vec![vec![rat(1, 1), rat(0, 1)]], vec![vec![rat(1, 1), rat(0, 1)]]])
            .unwrap();
        assert_eq!(sp.rank_of_point(&p), MultiIndex(vec![1, 1]));
        let p2 = sp
            .free_point(vec![vec![vec![rat(1, 1), rat(0, 1)], vec![rat(2, 1), rat(0, 1)]], vec![]])
            .unwrap();
        assert_eq!(sp.rank_of_point(&p2), MultiIndex(vec![1, 0]));
    }

    #[test]
    fn quaternion_action_is_a_module() {
        let sp = space(vec![reference::hurwitz()], vec![1]);
        let ring = sp.ring().factor(0).clone();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x = sp.random_point(&mut rng, &MultiIndex(vec![1]), 3, 2, 5);
        let a = ring.random_element(&mut rng, 3);
        let b = ring.random_element(&mut rng, 3);
        let ab = ring.mul(&a, &b).unwrap();
        let s = x.slot(0, 0);
        assert_eq!(sp.act(0, &ab, s), sp.act(0, &a, &sp.act(0, &b, s)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn group_laws_and_linearity(seed in any::<u64>(), which in 0usize..4) {
            let ring = reference::all_reference_rings().remove(which);
            let sp = space(vec![ring], vec![2]);
            let g = MultiIndex(vec![2]);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = sp.random_point(&mut rng, &g, 4, 3, 6);
            let y = sp.random_point(&mut rng, &g, 4, 3, 6);
            let z = sp.random_point(&mut rng, &g, 4, 3, 6);
            prop_assert_eq!(sp.add(&sp.add(&x, &y).unwrap(), &z).unwrap(), sp.add(&x, &sp.add(&y, &z).unwrap()).unwrap());
            prop_assert_eq!(sp.add(&x, &y).unwrap(), sp.add(&y, &x).unwrap());
            prop_assert!(sp.add(&x, &sp.neg(&x)).unwrap().is_zero());

            let r = MultiIndex(vec![2]);
            let f = sp.ring().factor(0).clone();
            let mk = |rng: &mut ChaCha8Rng| {
                let rows = (0..2).map(|_| (0..2).map(|_| f.random_element(rng, 3)).collect()).collect();
                BlockMorphism::new(sp.ring().clone(), &r, &g, vec![rows]).unwrap()
            };
            let phi = mk(&mut rng);
            let psi = mk(&mut rng);
            let sum = sp.add(&x, &y).unwrap();
            prop_assert_eq!(sp.apply(&phi, &sum).unwrap(), sp.add(&sp.apply(&phi, &x).unwrap(), &sp.apply(&phi, &y).unwrap()).unwrap());
            prop_assert_eq!(sp.apply(&phi.compose(&psi).unwrap(), &x).unwrap(), sp.apply(&phi, &sp.apply(&psi, &x).unwrap()).unwrap());

            // h(φx) <= C_op² |φ|² h(x)
            let bound = sp.operator_constant_sq(2) * phi.norm_sq() * sp.height(&x);
            prop_assert!(sp.height(&sp.apply(&phi, &x).unwrap()) <= bound);

            // h(3x) = 9 h(x)
            prop_assert_eq!(sp.height(&sp.scale(&x, &int(3))), sp.height(&x) * rat(9, 1));

            // h(x+y) <= h(x) + h(y) + 2 sqrt(h(x)h(y))
            let (hx, hy, hs) = (sp.height(&x), sp.height(&y), sp.height(&sum));
            let slack = &hs - &hx - &hy;
            prop_assert!(!slack.is_positive() || &slack * &slack <= rat(4, 1) * &hx * &hy);

            let b = int(rand::Rng::gen_range(&mut rng, 1..6));
            prop_assert_eq!(sp.scale(&sp.divide(&x, &b).unwrap(), &b), x.clone());
            prop_assert_eq!(sp.height(&sp.divide(&x, &b).unwrap()), sp.height(&x) / ratz(&(&b * &b)));
        }
    }
}
