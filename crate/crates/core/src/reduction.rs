//! Witness-level reductions between the sets `B_φ + F`.
//!
//! A witness records a point together with the morphism and perturbation
//! that put it in the set, so every transformation can be re-checked by
//! evaluating the defining equation in the model.

use num_integer::Integer as _;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::certified::sum_of_roots_sq_upper;
use crate::error::{consistency, domain, shape, Error, Result};
use crate::geomnum::PointConstants;
use crate::ledger::ConstantLedger;
use crate::linalg::Matrix;
use crate::model::{ModelPoint, ModelSpace, PointData};
use crate::morphisms::{weightify, BlockMorphism, MorphismData, MultiIndex, SpecialCertificate, WeightedCertificate};
use crate::rings::RingElement;
use crate::{ratz, Integer, Rational};

/// `N·y = G·γ` for `y ∈ Γ^g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupData {
    pub n: Integer,
    /// `G: A^s → A^g`.
    pub g: BlockMorphism,
}

/// A point of `B_φ + F` with its certificate of membership.
///
/// Plain form (`p = None`): `φ(x + y + ξ) = 0` with `y` defaulting to 0.
/// Pair form: `φ((x, p) + ξ) = 0` with `ξ ∈ A^{g+s}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InclusionWitness {
    pub x: ModelPoint,
    pub p: Option<ModelPoint>,
    pub y: Option<ModelPoint>,
    pub phi: BlockMorphism,
    pub xi: ModelPoint,
    /// Recorded bound on `h(ξ)`.
    pub h_bound: Rational,
    pub group: Option<GroupData>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessData {
    pub x: PointData,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<PointData>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<PointData>,
    pub phi: MorphismData,
    pub xi: PointData,
    pub h_bound: crate::wire::WireRational,
}

impl InclusionWitness {
    pub fn plain(x: ModelPoint, y: Option<ModelPoint>, phi: BlockMorphism, xi: ModelPoint, h_bound: Rational) -> Self {
        InclusionWitness {
            x,
            p: None,
            y,
            phi,
            xi,
            h_bound,
            group: None,
        }
    }

    pub fn pair(x: ModelPoint, p: ModelPoint, phi: BlockMorphism, xi: ModelPoint, h_bound: Rational) -> Self {
        InclusionWitness {
            x,
            p: Some(p),
            y: None,
            phi,
            xi,
            h_bound,
            group: None,
        }
    }

    /// The point the equation is evaluated at, before adding `ξ`.
    pub fn base(&self, space: &ModelSpace) -> Result<ModelPoint> {
        match (&self.p, &self.y) {
            (Some(p), _) => space.concat(&self.x, p),
            (None, Some(y)) => space.add(&self.x, y),
            (None, None) => Ok(self.x.clone()),
        }
    }

    /// Exact equation and height bound; also `N·y = G·γ` when recorded.
    pub fn verify(&self, space: &ModelSpace) -> Result<()> {
        let base = self.base(space)?;
        if !space.apply(&self.phi, &space.add(&base, &self.xi)?)?.is_zero() {
            return domain("witness equation does not vanish");
        }
        if space.height(&self.xi) > self.h_bound {
            return domain(format!("h(ξ) = {} exceeds the recorded bound {}", space.height(&self.xi), self.h_bound));
        }
        Ok(())
    }

    pub fn verify_group(&self, space: &ModelSpace, y: &ModelPoint, gamma: &ModelPoint) -> Result<()> {
        if let Some(gd) = &self.group {
            if space.scale(y, &gd.n) != space.apply(&gd.g, gamma)? {
                return domain("N·y differs from G·γ");
            }
        }
        Ok(())
    }

    pub fn to_data(&self) -> WitnessData {
        WitnessData {
            x: self.x.to_data(),
            p: self.p.as_ref().map(ModelPoint::to_data),
            y: self.y.as_ref().map(ModelPoint::to_data),
            phi: self.phi.to_data(),
            xi: self.xi.to_data(),
            h_bound: crate::wire::WireRational(self.h_bound.clone()),
        }
    }

    pub fn from_data(space: &ModelSpace, d: &WitnessData) -> Result<Self> {
        Ok(InclusionWitness {
            x: space.from_data(&d.x)?,
            p: d.p.as_ref().map(|p| space.from_data(p)).transpose()?,
            y: d.y.as_ref().map(|y| space.from_data(y)).transpose()?,
            phi: BlockMorphism::from_data(space.ring().clone(), &d.phi)?,
            xi: space.from_data(&d.xi)?,
            h_bound: d.h_bound.0.clone(),
            group: None,
        })
    }
}

/// Solves `N·y = G·γ` on free parts and clears the torsion remainder.
pub fn solve_group_relation(space: &ModelSpace, y: &ModelPoint, gamma: &ModelPoint) -> Result<GroupData> {
    let ring = space.ring().clone();
    let (g, s) = (y.shape(), gamma.shape());
    if g.len() != ring.len() || s.len() != ring.len() {
        return shape("y and γ must live over the same ring");
    }
    // coefficients[i][j][k] = coordinates of G_{jk} in factor i
    let mut coeffs: Vec<Vec<Vec<Vec<Rational>>>> = Vec::new();
    let mut n = Integer::one();
    for i in 0..ring.len() {
        let t = ring.factor(i).rank();
        let vecs = space.orbit_vectors(i, gamma.slots(i));
        let mut block = Vec::new();
        for slot in y.slots(i) {
            let sol: Vec<Rational> = if vecs.is_empty() {
                if !slot.is_torsion() {
                    return domain("y has a free part but Γ has no generators in this factor");
                }
                Vec::new()
            } else {
                let m = Matrix::from_fn(slot.free.len(), vecs.len(), |r, c| vecs[c][r].clone());
                m.solve(&slot.free)?
                    .ok_or_else(|| Error::Domain("y is not in the span of γ".into()))?
            };
            for c in &sol {
                n = n.lcm(c.denom());
            }
            block.push(sol.chunks(t).map(<[Rational]>::to_vec).collect::<Vec<_>>());
        }
        coeffs.push(block);
    }
    let nq = ratz(&n);
    let blocks: Vec<Vec<Vec<RingElement>>> = coeffs
        .iter()
        .enumerate()
        .map(|(i, block)| {
            let f = ring.factor(i);
            block
                .iter()
                .map(|row| {
                    let row: Vec<RingElement> = row
                        .iter()
                        .map(|c| f.element(c.iter().map(|v| (v * &nq).to_integer()).collect()))
                        .collect::<Result<_>>()?;
                    if row.is_empty() {
                        Ok(vec![f.zero(); s.get(i)])
                    } else {
                        Ok(row)
                    }
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut gm = BlockMorphism::new(ring, &g, &s, blocks)?;
    let rem = space.sub(&space.scale(y, &n), &space.apply(&gm, gamma)?)?;
    let t = rem
        .torsion_order()
        .ok_or_else(|| Error::Consistency("N·y − G·γ has a free part".into()))?;
    n *= &t;
    gm = gm.scale(&t);
    let gd = GroupData { n, g: gm };
    if space.scale(y, &gd.n) != space.apply(&gd.g, gamma)? {
        return consistency("N·y = G·γ fails after clearing torsion");
    }
    Ok(gd)
}

/// Result of [`specialize`].
#[derive(Debug, Clone)]
pub struct Specialized {
    pub phi_tilde: BlockMorphism,
    pub cert: SpecialCertificate,
    pub group: GroupData,
    pub witness: InclusionWitness,
    pub ledger: ConstantLedger,
}

fn weighted_cert(phi: &BlockMorphism, cert: Option<&WeightedCertificate>) -> Result<WeightedCertificate> {
    match cert {
        Some(c) => {
            c.verify(phi)?;
            Ok(c.clone())
        }
        None => phi
            .is_weighted()
            .ok_or_else(|| Error::Domain("morphism is not weighted".into())),
    }
}

/// From `φ(x + y + ξ) = 0`, `y ∈ Γ^g`, to `φ̃((x, γ) + (ξ, 0)) = 0` with
/// `φ̃ = (Nφ | φG)`.
pub fn specialize(
    space: &ModelSpace,
    w: &InclusionWitness,
    cert: Option<&WeightedCertificate>,
    gamma: &ModelPoint,
    eps_sq: &Rational,
    k0_sq: &Rational,
) -> Result<Specialized> {
    if w.p.is_some() {
        return domain("specialize expects a plain witness");
    }
    if eps_sq > k0_sq {
        return domain("specialize needs ε <= K₀");
    }
    w.verify(space)?;
    if w.h_bound > *eps_sq {
        return domain("h(ξ) bound exceeds ε²");
    }
    let phi = &w.phi;
    let wc = weighted_cert(phi, cert)?;
    let g = phi.source();
    let y = w.y.clone().unwrap_or_else(|| space.zero(&g));
    let group = solve_group_relation(space, &y, gamma)?;
    let n_phi = phi.scale(&group.n);
    let phi_prime = phi.compose(&group.g)?;
    let phi_tilde = n_phi.hconcat(&phi_prime)?;
    let n_cert = WeightedCertificate::new(&n_phi, wc.a() * &group.n, wc.columns.clone())?;
    let special = SpecialCertificate::with_weighted(&phi_tilde, &g, n_cert)?;
    let mut ledger = ConstantLedger::new();
    let ratio = phi_prime.norm_sq() / (ratz(&(&group.n * &group.n)) * phi.norm_sq());
    ledger.record("C_gamma^2", ratio.max(Rational::one()), "max(1, |φ′|²/(N²|φ|²)), realised")?;
    ledger.record("C_s^2", special.cs_sq().clone(), "|φ̃|²/|Nφ|², realised")?;
    let xi = space.concat(&w.xi, &space.zero(&gamma.shape()))?;
    let mut witness = InclusionWitness::pair(w.x.clone(), gamma.clone(), phi_tilde.clone(), xi, w.h_bound.clone());
    witness.group = Some(group.clone());
    witness.verify(space)?;
    Ok(Specialized {
        phi_tilde,
        cert: special,
        group,
        witness,
        ledger,
    })
}

/// Result of [`translate_witness`].
#[derive(Debug, Clone)]
pub struct Translated {
    pub y: ModelPoint,
    pub xi_prime: ModelPoint,
    pub phi: BlockMorphism,
    /// `ε′² = C_tr²·ε²`.
    pub eps_prime_sq: Rational,
    pub witness: InclusionWitness,
    pub ledger: ConstantLedger,
}

/// From `φ̃((x, p) + ξ) = 0`, `h(ξ)|φ|² <= ε²`, to `φ(x + y + ξ′) = 0` with
/// `y = i_r(φ′(p)/a)` and `h(ξ′)|φ|² <= ε′²`.
pub fn translate_witness(space: &ModelSpace, w: &InclusionWitness, cert: &SpecialCertificate, eps_sq: &Rational) -> Result<Translated> {
    let p = w
        .p
        .as_ref()
        .ok_or_else(|| Error::Domain("translate_witness expects a pair witness".into()))?;
    cert.verify(&w.phi)?;
    w.verify(space)?;
    let (phi, phi_prime) = w.phi.split_columns(&cert.g)?;
    let phi_sq = phi.norm_sq();
    if space.height(&w.xi) * &phi_sq > *eps_sq {
        return domain("h(ξ)·|φ|² exceeds ε²");
    }
    let a = cert.weighted.a();
    let ir = cert.weighted.embedding(phi.ring().clone(), &phi.source())?;
    let y = space.apply(&ir, &space.divide(&space.apply(&phi_prime, p)?, a)?)?;
    let xi_prime = space.apply(&ir, &space.divide(&space.apply(&w.phi, &w.xi)?, a)?)?;
    let mut ledger = ConstantLedger::new();
    let max_cols = w.phi.source().0.iter().copied().max().unwrap_or(1);
    let c_op_sq = ledger.record("C_op^2", space.operator_constant_sq(max_cols), "(max columns)²·κ²")?;
    let c_tr_sq = ledger.record(
        "C_tr^2",
        &c_op_sq * cert.cs_sq() * cert.weighted.cw_sq(),
        "C_op²·C_s²·C_w²",
    )?;
    let eps_prime_sq = &c_tr_sq * eps_sq;
    let witness = InclusionWitness::plain(w.x.clone(), Some(y.clone()), phi.clone(), xi_prime.clone(), &eps_prime_sq / &phi_sq);
    witness.verify(space)?;
    Ok(Translated {
        y,
        xi_prime,
        phi,
        eps_prime_sq,
        witness,
        ledger,
    })
}

/// Weightify (when needed) then specialize.
pub fn gamma_embed(space: &ModelSpace, w: &InclusionWitness, gamma: &ModelPoint, eps_sq: &Rational, k0_sq: &Rational) -> Result<Specialized> {
    let wf = weightify(&w.phi)?;
    let mut wd = w.clone();
    wd.phi = wf.phi.clone();
    specialize(space, &wd, Some(&wf.cert), gamma, eps_sq, k0_sq)
}

/// Result of [`rank_check_special`].
#[derive(Debug, Clone)]
pub struct RankChecked {
    pub psi_tilde: BlockMorphism,
    pub delta: BlockMorphism,
    pub cert: SpecialCertificate,
    /// Torsion points of level 2 checked for `B_φ̃ ⊂ B_ψ̃`, or `None` when
    /// the enumeration is over budget.
    pub torsion_checked: Option<usize>,
}

const TORSION_BUDGET: u64 = 4096;

/// `φ` has full rank and `ψ̃ = Δφ̃` has a weighted left part.
pub fn rank_check_special(
    space: &ModelSpace,
    phi_tilde: &BlockMorphism,
    g: &MultiIndex,
    w: &InclusionWitness,
    eps0_sq: Option<&Rational>,
) -> Result<RankChecked> {
    if let Some(e0) = eps0_sq {
        if w.h_bound > *e0 {
            return domain("witness radius exceeds ε₀(p); the rank of φ is not forced");
        }
    }
    w.verify(space)?;
    let (phi, _) = phi_tilde.split_columns(g)?;
    let (rank, _) = phi.rank_and_codim();
    if rank != phi.target() {
        return consistency(format!("φ has rank {rank} below {} despite a valid witness", phi.target()));
    }
    let wf = weightify(&phi)?;
    let psi_tilde = wf.delta.compose(phi_tilde)?;
    let cert = SpecialCertificate::with_weighted(&psi_tilde, g, wf.cert)?;
    let src = phi_tilde.source();
    let torsion_checked = match space.torsion_enum(&src, 2, TORSION_BUDGET) {
        Ok(pts) => {
            for z in &pts {
                if space.apply(phi_tilde, z)?.is_zero() && !space.apply(&psi_tilde, z)?.is_zero() {
                    return consistency("B_φ̃ is not inside B_ψ̃");
                }
            }
            Some(pts.len())
        }
        Err(Error::Resource(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(RankChecked {
        psi_tilde,
        delta: wf.delta,
        cert,
        torsion_checked,
    })
}

/// Result of [`point_project`].
#[derive(Debug, Clone)]
pub struct Projected {
    pub psi_tilde: BlockMorphism,
    pub cert: SpecialCertificate,
    pub y: ModelPoint,
    pub zeta: ModelPoint,
    pub eps_prime_sq: Rational,
    pub witness: InclusionWitness,
    pub ledger: ConstantLedger,
}

/// From `φ̃((x, p) + ξ) = 0`, `h(ξ) <= ε²`, to `ψ(x + y + ζ) = 0` with
/// `y ∈ Γ_p^g` and `h(ζ) <= ε′²`.
pub fn point_project(
    space: &ModelSpace,
    w: &InclusionWitness,
    g: &MultiIndex,
    consts: Option<&PointConstants>,
    eps_sq: &Rational,
    k0_sq: &Rational,
) -> Result<Projected> {
    let p = w
        .p
        .as_ref()
        .ok_or_else(|| Error::Domain("point_project expects a pair witness".into()))?;
    let has_p = p.shape().total() > 0;
    if has_p {
        let c = consts.ok_or_else(|| Error::Domain("point constants are required when p is non-empty".into()))?;
        if *eps_sq > c.eps0_sq {
            return domain("ε² exceeds ε₀(p)²");
        }
    }
    if space.height(&w.x) > *k0_sq {
        return domain("h(x) exceeds K₀²");
    }
    if w.h_bound > *eps_sq {
        return domain("witness radius exceeds ε");
    }
    let rc = rank_check_special(space, &w.phi, g, w, if has_p { consts.map(|c| &c.eps0_sq) } else { None })?;
    let (psi, psi_prime) = rc.psi_tilde.split_columns(g)?;
    let a = rc.cert.weighted.a();
    let ir = rc.cert.weighted.embedding(psi.ring().clone(), &psi.source())?;
    let y = space.apply(&ir, &space.divide(&space.apply(&psi_prime, p)?, a)?)?;
    let zeta_full = space.apply(&ir, &space.divide(&space.apply(&rc.psi_tilde, &w.xi)?, a)?)?;

    let mut ledger = ConstantLedger::new();
    let max_cols = w.phi.source().0.iter().copied().max().unwrap_or(1);
    let c_op_sq = ledger.record("C_op^2", space.operator_constant_sq(max_cols), "(max columns)²·κ²")?;
    let cw_sq = ledger.record("C_w^2", rc.cert.weighted.cw_sq().clone(), "|ψ|²/a², realised")?;
    // |ψ′|² <= C_op²|ψ|²(K₀+ε)²/(c_sq·min h(p))
    let spread = match consts.filter(|_| has_p) {
        Some(c) => {
            let base = c.factors.iter().map(|f| &f.c_sq * &f.min_h).min().expect("non-empty");
            (&c_op_sq * sum_of_roots_sq_upper(k0_sq, eps_sq) / base).max(Rational::one())
        }
        None => Rational::one(),
    };
    let spread = ledger.record("C_p^2", spread, "max(1, C_op²(K₀+ε)²/(c_sq·min h(p)))")?;
    if rc.psi_tilde.norm_sq() > &cw_sq * ratz(&(a * a)) * &spread {
        return consistency("|ψ̃|² exceeds C_w²a²·max(1, C_op²(K₀+ε)²/c(p)²)");
    }
    let eps_prime_sq = &c_op_sq * &cw_sq * &spread * eps_sq;
    let witness = InclusionWitness::plain(w.x.clone(), Some(y.clone()), psi.clone(), zeta_full.clone(), eps_prime_sq.clone());
    witness.verify(space)?;
    Ok(Projected {
        psi_tilde: rc.psi_tilde,
        cert: rc.cert,
        y,
        zeta: zeta_full,
        eps_prime_sq,
        witness,
        ledger,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geomnum::point_lower_constants;
    use crate::reference;
    use crate::rings::{ProductRingSpec, RingSpec};
    use crate::{int, rat};
    use std::sync::Arc;

    fn space(r: RingSpec, nu: usize) -> ModelSpace {
        ModelSpace::new(Arc::new(ProductRingSpec::new(vec![Arc::new(r)]).unwrap()), vec![nu]).unwrap()
    }

    fn pt(sp: &ModelSpace, v: &[i64], den: i64) -> ModelPoint {
        sp.free_point(vec![v.iter().map(|x| vec![rat(*x, den)]).collect()]).unwrap()
    }

    #[test]
    fn group_relation_examples() {
        // γ₁, γ₂ independent in a rank-two model
        let sp2 = space(reference::integers(), 2);
        let g2 = sp2
            .free_point(vec![vec![vec![rat(1, 1), rat(0, 1)], vec![rat(0, 1), rat(1, 1)]]])
            .unwrap();
        let y0 = sp2.zero(&MultiIndex(vec![1]));
        let gd = solve_group_relation(&sp2, &y0, &g2).unwrap();
        assert_eq!(gd.n, int(1));
        assert!(gd.g.is_zero());
        let y = sp2.free_point(vec![vec![vec![rat(2, 1), rat(0, 1)]]]).unwrap();
        let gd = solve_group_relation(&sp2, &y, &g2).unwrap();
        assert_eq!(gd.n, int(1));
        assert_eq!(gd.g, BlockMorphism::from_i64(sp2.ring().clone(), &[vec![vec![vec![2], vec![0]]]]).unwrap());
        let y = sp2.free_point(vec![vec![vec![rat(1, 3), rat(1, 1)]]]).unwrap();
        let gd = solve_group_relation(&sp2, &y, &g2).unwrap();
        assert_eq!(gd.n, int(3));
        assert_eq!(gd.g, BlockMorphism::from_i64(sp2.ring().clone(), &[vec![vec![vec![1], vec![3]]]]).unwrap());
        // not in the span
        let g1 = sp2.free_point(vec![vec![vec![rat(1, 1), rat(0, 1)]]]).unwrap();
        assert!(solve_group_relation(&sp2, &y, &g1).is_err());
    }

    #[test]
    fn specialize_then_translate() {
        let sp = space(reference::integers(), 1);
        let ring = sp.ring().clone();
        let phi = BlockMorphism::from_i64(ring.clone(), &[vec![vec![vec![2], vec![1]]]]).unwrap();
        let gamma = pt(&sp, &[1], 1);
        // φ(x + y) = 0 with y = (1, 0) ∈ Γ², x = (0, −2)
        let x = pt(&sp, &[0, -2], 1);
        let y = pt(&sp, &[1, 0], 1);
        let xi = sp.zero(&MultiIndex(vec![2]));
        let w = InclusionWitness::plain(x.clone(), Some(y), phi.clone(), xi, rat(0, 1));
        w.verify(&sp).unwrap();
        let s = specialize(&sp, &w, None, &gamma, &rat(0, 1), &rat(4, 1)).unwrap();
        assert_eq!(s.group.n, int(1));
        s.witness.verify(&sp).unwrap();
        let t = translate_witness(&sp, &s.witness, &s.cert, &rat(0, 1)).unwrap();
        t.witness.verify(&sp).unwrap();
        assert!(t.xi_prime.is_zero());
        assert_eq!(t.witness.x, x);
    }

    #[test]
    fn translate_with_zero_phi_prime() {
        let sp = space(reference::integers(), 1);
        let ring = sp.ring().clone();
        let full = BlockMorphism::from_i64(ring, &[vec![vec![vec![3], vec![0]]]]).unwrap();
        let cert = SpecialCertificate::new(&full, &MultiIndex(vec![1])).unwrap();
        let x = sp
            .point(vec![vec![crate::model::Slot {
                torsion: vec![rat(1, 3), rat(0, 1)],
                free: vec![rat(0, 1)],
            }]])
            .unwrap();
        let p = pt(&sp, &[5], 1);
        let w = InclusionWitness::pair(x, p, full, sp.zero(&MultiIndex(vec![2])), rat(0, 1));
        let t = translate_witness(&sp, &w, &cert, &rat(1, 1)).unwrap();
        assert!(t.y.is_torsion());
        t.witness.verify(&sp).unwrap();
    }

    #[test]
    fn rank_check_examples() {
        let sp = space(reference::integers(), 1);
        let ring = sp.ring().clone();
        // already weighted: Δ = I
        let full = BlockMorphism::from_i64(ring.clone(), &[vec![vec![vec![1], vec![0], vec![0]]]]).unwrap();
        let w = InclusionWitness::pair(pt(&sp, &[0, 3], 1), pt(&sp, &[1], 1), full.clone(), sp.zero(&MultiIndex(vec![3])), rat(0, 1));
        let rc = rank_check_special(&sp, &full, &MultiIndex(vec![2]), &w, Some(&rat(1, 4))).unwrap();
        assert_eq!(rc.delta, BlockMorphism::identity(ring.clone(), &MultiIndex(vec![1])));
        // rank-deficient φ only admits witnesses outside the ε₀ ball
        let bad = BlockMorphism::from_i64(ring.clone(), &[vec![vec![vec![0], vec![1]]]]).unwrap();
        let p = pt(&sp, &[1], 1);
        let xi = sp.concat(&pt(&sp, &[0], 1), &pt(&sp, &[-1], 1)).unwrap();
        let w = InclusionWitness::pair(pt(&sp, &[7], 1), p.clone(), bad.clone(), xi, rat(1, 1));
        let c = point_lower_constants(&sp, &p).unwrap();
        assert!(matches!(
            rank_check_special(&sp, &bad, &MultiIndex(vec![1]), &w, Some(&c.eps0_sq)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(rank_check_special(&sp, &bad, &MultiIndex(vec![1]), &w, None), Err(Error::Consistency(_))));
    }

    #[test]
    fn rank_check_gauss() {
        let sp = space(reference::integers(), 1);
        let ring = sp.ring().clone();
        let full = BlockMorphism::from_i64(ring, &[vec![vec![vec![1], vec![1], vec![0]], vec![vec![0], vec![2], vec![0]]]]).unwrap();
        let x = pt(&sp, &[0, 0], 1);
        let w = InclusionWitness::pair(x, pt(&sp, &[1], 1), full.clone(), sp.zero(&MultiIndex(vec![3])), rat(0, 1));
        let rc = rank_check_special(&sp, &full, &MultiIndex(vec![2]), &w, None).unwrap();
        let (psi, _) = rc.psi_tilde.split_columns(&MultiIndex(vec![2])).unwrap();
        assert!(psi.is_weighted().is_some());
        assert_eq!(rc.delta.compose(&full).unwrap(), rc.psi_tilde);
    }

    #[test]
    fn round_trip_at_zero() {
        let sp = space(reference::gaussian(), 1);
        let ring = sp.ring().clone();
        let phi = BlockMorphism::from_i64(ring, &[vec![vec![vec![1, 1], vec![2, 0]]]]).unwrap();
        let x = sp
            .free_point(vec![vec![vec![rat(2, 1), rat(0, 1)], vec![rat(-1, 1), rat(-1, 1)]]])
            .unwrap();
        let w = InclusionWitness::plain(x.clone(), None, phi, sp.zero(&MultiIndex(vec![2])), rat(0, 1));
        w.verify(&sp).unwrap();
        let gamma = sp.zero(&MultiIndex(vec![0]));
        let s = gamma_embed(&sp, &w, &gamma, &rat(0, 1), &rat(100, 1)).unwrap();
        let pr = point_project(&sp, &s.witness, &MultiIndex(vec![2]), None, &rat(0, 1), &rat(100, 1)).unwrap();
        assert_eq!(pr.witness.x, x);
        assert_eq!(pr.eps_prime_sq, rat(0, 1));
        pr.witness.verify(&sp).unwrap();
    }

    #[test]
    fn point_project_generic() {
        let sp = space(reference::integers(), 1);
        let ring = sp.ring().clone();
        let p = pt(&sp, &[1], 1);
        let c = point_lower_constants(&sp, &p).unwrap();
        // 2x₁ + x₂ + 3p = 0 at x = (1, −5)
        let full = BlockMorphism::from_i64(ring, &[vec![vec![vec![2], vec![1], vec![3]]]]).unwrap();
        let x = pt(&sp, &[1, -5], 1);
        let w = InclusionWitness::pair(x.clone(), p, full, sp.zero(&MultiIndex(vec![3])), rat(0, 1));
        let pr = point_project(&sp, &w, &MultiIndex(vec![2]), Some(&c), &rat(0, 1), &rat(26, 1)).unwrap();
        pr.witness.verify(&sp).unwrap();
        // ε′ grows with ε
        let small = rat(1, 100);
        let w2 = InclusionWitness { h_bound: small.clone(), ..w.clone() };
        let e1 = point_project(&sp, &w2, &MultiIndex(vec![2]), Some(&c), &small, &rat(26, 1)).unwrap().eps_prime_sq;
        let e2 = point_project(&sp, &w2, &MultiIndex(vec![2]), Some(&c), &rat(1, 50), &rat(26, 1)).unwrap().eps_prime_sq;
        assert!(e1 <= e2);
    }
}
