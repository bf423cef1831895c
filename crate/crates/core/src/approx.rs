//! Approximating vectors over `E`, weighted morphisms and special morphisms
//! by ones of bounded norm.
//!
//! Every routine re-checks its conclusions with exact rationals before
//! returning and reports the constants it used in a [`ConstantLedger`].
//! Square roots only ever appear inside cross-multiplied comparisons or as
//! certified rational upper bounds.

use std::cmp::Ordering;

use num_traits::{One, Pow, Signed, Zero};

use crate::certified::{ceil_root_sum_over_root, cmp_with_scaled_sqrt, sqrt_upper};
use crate::dirichlet::{dirichlet_search, RationalTarget, SurdTarget};
use crate::error::{consistency, domain, shape, Error, Result};
use crate::ledger::ConstantLedger;
use crate::model::{ModelPoint, ModelSpace};
use crate::morphisms::{embedding_ir, BlockMorphism, MultiIndex, SpecialCertificate, WeightedCertificate};
use crate::rings::{ProductRingSpec, RingElement};
use crate::{int, rat, ratz, Integer, Rational};

fn check(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        consistency(format!("postcondition failed: {what}"))
    }
}

/// `(√x + y)²` rounded up.
fn root_plus_sq_upper(x: &Rational, y: &Rational) -> Rational {
    let s = sqrt_upper(x) + y;
    &s * &s
}

/// Output of [`approx_vector`].
#[derive(Debug, Clone)]
pub struct VectorApprox {
    pub q: Integer,
    /// Number of real coordinates approximated.
    pub m: usize,
    pub b: Integer,
    pub b_bar: Vec<RingElement>,
    pub ledger: ConstantLedger,
}

/// Constants shared by the approximation lemmas for a product ring.
#[derive(Debug, Clone)]
pub struct ApproxConstants {
    pub q0: Integer,
    pub c0_sq: Rational,
    pub lambda_sq: Rational,
    /// Rational upper bound on `S = Σ|τ|` over the basis of `E`.
    pub s_up: Rational,
}

impl ApproxConstants {
    pub fn new(ring: &ProductRingSpec) -> Result<Self> {
        Ok(ApproxConstants {
            q0: ring.compute_q0()?,
            c0_sq: ring.norm_equivalence_constants()?.0,
            lambda_sq: ring.lambda_sq(),
            s_up: ring.basis_norm_sum_upper(),
        })
    }
}

fn vector_norm_sq(ring: &ProductRingSpec, v: &[RingElement]) -> Result<Rational> {
    v.iter()
        .map(|e| Ok(ring.ring_of(e)?.norm_sq(e)))
        .try_fold(Rational::zero(), |acc, n: Result<Rational>| Ok(acc.max(n?)))
}

/// Approximates the direction of `ā ∈ E^n`: `b ≥ 1` and `b̄` with
/// `|ā/|ā| − b̄/b| <= S/(Qb)`, where `|ā|` is the largest entry norm.
pub fn approx_vector(ring: &ProductRingSpec, a_bar: &[RingElement], q: &Integer, budget: u64) -> Result<VectorApprox> {
    let k = ApproxConstants::new(ring)?;
    if a_bar.is_empty() || a_bar.iter().all(RingElement::is_zero) {
        return domain("approx_vector needs a non-trivial vector");
    }
    if *q < k.q0 {
        return domain(format!("Q = {q} is below Q0 = {}", k.q0));
    }
    let n_sq = vector_norm_sq(ring, a_bar)?;
    let nums: Vec<Rational> = a_bar.iter().flat_map(RingElement::rational_coords).collect();
    let m = nums.len();
    let res = dirichlet_search(&SurdTarget { num: &nums, rad: &n_sq }, q, budget)?;
    let mut it = res.beta.into_iter();
    let b_bar = a_bar
        .iter()
        .map(|e| {
            let r = ring.ring_of(e)?;
            r.element((0..r.rank()).map(|_| it.next().expect("coordinate")).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    let b = res.b;

    let mut ledger = ConstantLedger::new();
    let inv_c0_up = sqrt_upper(&k.c0_sq.recip());
    let half = rat(1, 2);
    let ca_sq = {
        let f = &k.s_up * (&inv_c0_up + &half);
        ledger.record("C_a^2", &f * &f, "(S·(1/c0 + 1/2))², S = Σ|τ| rounded up")?
    };
    let cb_sq = ledger.record("C_b^2", rat(9, 4), "(3/2)², from Q >= 2S/λ_E")?;
    let cc_sq = ledger.record("C_c^2", &k.s_up * &k.s_up, "S², S = Σ|τ| rounded up")?;

    verify_vector(ring, a_bar, &n_sq, q, m, &b, &b_bar, &ca_sq, &cb_sq, &cc_sq)?;
    Ok(VectorApprox {
        q: q.clone(),
        m,
        b,
        b_bar,
        ledger,
    })
}

#[allow(clippy::too_many_arguments)]
fn verify_vector(
    ring: &ProductRingSpec,
    a_bar: &[RingElement],
    n_sq: &Rational,
    q: &Integer,
    m: usize,
    b: &Integer,
    b_bar: &[RingElement],
    ca_sq: &Rational,
    cb_sq: &Rational,
    cc_sq: &Rational,
) -> Result<()> {
    let qm: Integer = Pow::pow(q, m as u32);
    check(b.is_positive() && *b < qm, "1 <= b < Q^m")?;
    let bq = ratz(b);
    let bb_sq = vector_norm_sq(ring, b_bar)?;
    check(bb_sq <= ca_sq * &bq * &bq, "|b̄|² <= C_a² b²")?;
    if bb_sq.is_zero() {
        return Err(Error::Domain("degenerate approximation: b̄ = 0 (possible only when λ_E >= 2)".into()));
    }
    check(&bq * &bq <= cb_sq * &bb_sq, "b² <= C_b² |b̄|²")?;
    let qq = ratz(&(q * q));
    for (a, bk) in a_bar.iter().zip(b_bar) {
        let r = ring.ring_of(a)?;
        let (ac, bc) = (a.rational_coords(), bk.rational_coords());
        let a2 = r.norm_sq_rational(&ac);
        let b2 = r.norm_sq_rational(&bc);
        let ab = r.gram().bilinear_form(&ac, &bc);
        // |a_k|² b² + |b_k|² N − C² N / Q² <= 2 b ⟨a_k, b_k⟩ √N
        let lhs = &a2 * &bq * &bq + &b2 * n_sq - cc_sq * n_sq / &qq;
        let rhs = Rational::from_integer(int(2)) * &bq * &ab;
        check(cmp_with_scaled_sqrt(&lhs, &rhs, n_sq) != Ordering::Greater, "|ā/|ā| − b̄/b|² <= C_c²/(Qb)²")?;
    }
    Ok(())
}

/// Output of [`approx_weighted`].
#[derive(Debug, Clone)]
pub struct WeightedApprox {
    pub q: Integer,
    /// `t·(rg − r² + 1)`.
    pub m: usize,
    pub psi: BlockMorphism,
    pub b: Integer,
    pub cert: WeightedCertificate,
    /// `ψ = φ` because `|φ|` was already small.
    pub unchanged: bool,
    pub ledger: ConstantLedger,
}

/// `t·(r·g − r² + 1)` for the totals of a morphism's shape.
pub fn weighted_exponent(ring: &ProductRingSpec, r: usize, g: usize) -> usize {
    ring.total_rank() * (r * g - r * r + 1)
}

/// Approximates a weighted `φ` (weight `a`) by `ψ` with `ψ ∘ i_r = [b]`.
///
/// The direction is normalised by `a` rather than `|φ|`: the weight slot of
/// `φ/a` is exactly 1, so the approximation keeps `b` there and the
/// embedding identity holds exactly. Conclusion iii reads
/// `|ψ/b − φ/a| <= S/(Qb)`.
pub fn approx_weighted(phi: &BlockMorphism, cert: &WeightedCertificate, q: &Integer, budget: u64) -> Result<WeightedApprox> {
    weighted_inner(phi, cert, q, budget, false)
}

fn weighted_inner(phi: &BlockMorphism, cert: &WeightedCertificate, q: &Integer, budget: u64, force: bool) -> Result<WeightedApprox> {
    cert.verify(phi)?;
    let ring = phi.ring().clone();
    let k = ApproxConstants::new(&ring)?;
    if *q < k.q0 {
        return domain(format!("Q = {q} is below Q0 = {}", k.q0));
    }
    let (r, g) = (phi.target(), phi.source());
    let m = weighted_exponent(&ring, r.total(), g.total());
    let qm: Integer = Pow::pow(q, m as u32);
    let a = cert.a().clone();
    let mut ledger = ConstantLedger::new();
    ledger.record("C_w^2", cert.cw_sq().clone(), "|φ|²/a², realised by the weighted certificate")?;
    let qm_sq = ratz(&(&qm * &qm));

    if !force && phi.norm_sq() <= qm_sq && a < qm {
        let mut out = WeightedApprox {
            q: q.clone(),
            m,
            psi: phi.clone(),
            b: a,
            cert: cert.clone(),
            unchanged: true,
            ledger,
        };
        let cpsi_sq = ledger_cpsi(&mut out.ledger, cert, &k, q)?;
        verify_weighted(phi, cert.a(), &out, &k, &cpsi_sq)?;
        return Ok(out);
    }

    // Coordinates of the non-selected entries, divided by a.
    let mut slots: Vec<(usize, usize, usize)> = Vec::new();
    let mut nums: Vec<Rational> = Vec::new();
    let a_q = ratz(&a);
    for (i, cols) in cert.columns.iter().enumerate() {
        for row in 0..r.get(i) {
            for c in (0..g.get(i)).filter(|c| !cols.contains(c)) {
                slots.push((i, row, c));
                nums.extend(phi.entry(i, row, c).rational_coords().into_iter().map(|v| v / &a_q));
            }
        }
    }
    let (b, beta) = if nums.is_empty() {
        (Integer::one(), Vec::new())
    } else {
        let res = dirichlet_search(&RationalTarget(&nums), q, budget)?;
        (res.b, res.beta)
    };
    let mut blocks: Vec<Vec<Vec<RingElement>>> = (0..ring.len())
        .map(|i| vec![vec![ring.factor(i).zero(); g.get(i)]; r.get(i)])
        .collect();
    for (i, cols) in cert.columns.iter().enumerate() {
        for (row, c) in cols.iter().enumerate() {
            blocks[i][row][*c] = ring.factor(i).from_integer(b.clone());
        }
    }
    let mut it = beta.into_iter();
    for (i, row, c) in slots {
        let f = ring.factor(i);
        blocks[i][row][c] = f.element((0..f.rank()).map(|_| it.next().expect("coordinate")).collect())?;
    }
    let psi = BlockMorphism::new(ring.clone(), &r, &g, blocks)?;
    let psi_cert = WeightedCertificate::new(&psi, b.clone(), cert.columns.clone())?;
    let mut out = WeightedApprox {
        q: q.clone(),
        m,
        psi,
        b,
        cert: psi_cert,
        unchanged: false,
        ledger,
    };
    let cpsi_sq = ledger_cpsi(&mut out.ledger, cert, &k, q)?;
    verify_weighted(phi, cert.a(), &out, &k, &cpsi_sq)?;
    Ok(out)
}

fn ledger_cpsi(ledger: &mut ConstantLedger, cert: &WeightedCertificate, k: &ApproxConstants, q: &Integer) -> Result<Rational> {
    let v = root_plus_sq_upper(cert.cw_sq(), &(&k.s_up / ratz(q)));
    ledger.record("C_psi^2", v, "(C_w + S/Q)², S rounded up")
}

fn verify_weighted(phi: &BlockMorphism, a: &Integer, out: &WeightedApprox, k: &ApproxConstants, cpsi_sq: &Rational) -> Result<()> {
    let qm: Integer = Pow::pow(&out.q, out.m as u32);
    check(out.b.is_positive() && out.b < qm, "1 <= b < Q^m")?;
    let b = ratz(&out.b);
    let psi_sq = out.psi.norm_sq();
    check(psi_sq <= cpsi_sq * &b * &b, "|ψ|² <= C_ψ² b²")?;
    let unit_sq = phi.ring().factors().iter().map(|f| f.norm_sq(&f.one())).min().expect("factors");
    check(&b * &b * unit_sq <= psi_sq, "b² |1|² <= |ψ|²")?;
    // |a ψ_e − b φ_e|² Q² <= S² a²
    let diff = out.psi.scale(a).sub(&phi.scale(&out.b))?;
    let qq = ratz(&(&out.q * &out.q));
    let aq = ratz(a);
    check(diff.norm_sq() * qq <= &k.s_up * &k.s_up * &aq * &aq, "|ψ/b − φ/a|² <= S²/(Qb)²")?;
    let ir = embedding_ir(&out.psi, &out.cert)?;
    check(
        out.psi.compose(&ir)? == BlockMorphism::scalar(phi.ring().clone(), &phi.target(), &out.b),
        "ψ ∘ i_r = [b]",
    )?;
    Ok(())
}

/// Output of [`approx_special`].
#[derive(Debug, Clone)]
pub struct SpecialApprox {
    pub q: Integer,
    /// `t·(r(g+s) − r² + n)`.
    pub m: usize,
    pub big_m: Integer,
    pub psi_tilde: BlockMorphism,
    pub cert: SpecialCertificate,
    pub b: Integer,
    pub unchanged: bool,
    pub eps_sq: Rational,
    pub k0_sq: Rational,
    /// `C²` in `|ψ̃|² <= C² M²`.
    pub c_sq: Rational,
    /// `C_ε²` in `ε′² <= C_ε² ε²`.
    pub c_eps_sq: Rational,
    pub eps_prime_sq: Rational,
    pub ledger: ConstantLedger,
}

/// `m = t·(r(g+s) − r² + n)`.
pub fn special_exponent(ring: &ProductRingSpec, r: usize, g: usize, s: usize) -> usize {
    ring.total_rank() * (r * (g + s) - r * r + ring.len())
}

/// `Q = max(Q₀, ⌈(K₀ + ‖p‖)/ε⌉)` decided on squares.
pub fn special_q(q0: &Integer, k0_sq: &Rational, hp_sq: &Rational, eps_sq: &Rational) -> Result<Integer> {
    if !eps_sq.is_positive() {
        return domain("ε must be positive");
    }
    Ok(q0.clone().max(ceil_root_sum_over_root(k0_sq, hp_sq, eps_sq)))
}

/// Replaces a special `φ̃` by `ψ̃` with `|ψ̃| <= C·M` and builds the
/// witness transformer data.
pub fn approx_special(
    space: &ModelSpace,
    phi_tilde: &BlockMorphism,
    cert: &SpecialCertificate,
    eps_sq: &Rational,
    k0_sq: &Rational,
    hp_sq: &Rational,
    budget: u64,
) -> Result<SpecialApprox> {
    cert.verify(phi_tilde)?;
    let ring = phi_tilde.ring().clone();
    let k = ApproxConstants::new(&ring)?;
    let q = special_q(&k.q0, k0_sq, hp_sq, eps_sq)?;
    let (r, g, s) = (phi_tilde.target().total(), cert.g.total(), cert.s.total());
    let m = special_exponent(&ring, r, g, s);
    let big_m: Integer = Pow::pow(&q, m as u32);
    let big_m_sq = ratz(&(&big_m * &big_m));

    let mut ledger = ConstantLedger::new();
    let full_cert = WeightedCertificate::new(phi_tilde, cert.weighted.a().clone(), cert.weighted.columns.clone())?;
    ledger.record("C_w^2", cert.weighted.cw_sq().clone(), "|φ|²/a² of the weighted part")?;
    ledger.record("C_s^2", cert.cs_sq().clone(), "|φ̃|²/|φ|² of the special certificate")?;
    let max_cols = phi_tilde.source().0.iter().copied().max().unwrap_or(1);
    let c_op_sq = ledger.record("C_op^2", space.operator_constant_sq(max_cols), "(max columns)²·κ², κ² from the ring's operator bound")?;

    let (psi_tilde, b, unchanged, cpsi_sq) = if phi_tilde.norm_sq() <= big_m_sq {
        (phi_tilde.clone(), cert.weighted.a().clone(), true, Rational::one())
    } else {
        let w = weighted_inner(phi_tilde, &full_cert, &q, budget, true)?;
        let cpsi = w.ledger.get("C_psi^2").cloned().expect("recorded");
        ledger.merge(&w.ledger);
        (w.psi, w.b, false, cpsi)
    };
    let (psi_left, _) = psi_tilde.split_columns(&cert.g)?;
    let psi_w = WeightedCertificate::new(&psi_left, b.clone(), cert.weighted.columns.clone())?;
    let new_cert = SpecialCertificate::with_weighted(&psi_tilde, &cert.g, psi_w)?;

    let c_sq = ledger.record("C^2", cpsi_sq.clone().max(Rational::one()), "max(1, C_ψ²)")?;
    let c_eps_sq = if unchanged {
        ledger.record("C_eps^2", Rational::one(), "ψ̃ = φ̃, ξ′ = ξ")?
    } else {
        // C_op (C_s C_w + S) C_ψ
        let inner = sqrt_upper(&(cert.cs_sq() * cert.weighted.cw_sq())) + &k.s_up;
        let v = sqrt_upper(&c_op_sq) * inner * sqrt_upper(&cpsi_sq);
        ledger.record("C_eps^2", &v * &v, "(C_op·(C_s·C_w + S)·C_ψ)², roots rounded up")?
    };
    let eps_prime_sq = &c_eps_sq * eps_sq;

    check(psi_tilde.norm_sq() <= &c_sq * &big_m_sq, "|ψ̃|² <= C² M²")?;
    check(b.is_positive() && (unchanged || b < big_m), "1 <= b < M")?;
    Ok(SpecialApprox {
        q,
        m,
        big_m,
        psi_tilde,
        cert: new_cert,
        b,
        unchanged,
        eps_sq: eps_sq.clone(),
        k0_sq: k0_sq.clone(),
        c_sq,
        c_eps_sq,
        eps_prime_sq,
        ledger,
    })
}

/// A transported witness `ψ̃((x,p) + ξ′) = 0`.
#[derive(Debug, Clone)]
pub struct Transported {
    pub xi_prime: ModelPoint,
    pub xi_double_prime: Option<ModelPoint>,
}

impl SpecialApprox {
    /// Maps `φ̃((x,p) + ξ) = 0`, `h(ξ) <= ε²/M²` to a witness for `ψ̃`.
    pub fn transport(&self, space: &ModelSpace, phi_tilde: &BlockMorphism, x: &ModelPoint, p: &ModelPoint, xi: &ModelPoint) -> Result<Transported> {
        let xp = space.concat(x, p)?;
        if xi.shape() != xp.shape() {
            return shape("perturbation must live in A^{g+s}");
        }
        if !space.apply(phi_tilde, &space.add(&xp, xi)?)?.is_zero() {
            return domain("input witness does not satisfy φ̃((x,p) + ξ) = 0");
        }
        let big_m_sq = ratz(&(&self.big_m * &self.big_m));
        if space.height(xi) * big_m_sq > self.eps_sq {
            return domain("input perturbation exceeds ε/M");
        }
        if space.height(x) > self.k0_sq {
            return domain("h(x) exceeds K0²");
        }
        let out = if self.unchanged {
            Transported {
                xi_prime: xi.clone(),
                xi_double_prime: None,
            }
        } else {
            let y = space.neg(&space.apply(&self.psi_tilde, &xp)?);
            let xi2 = space.divide(&y, &self.b)?;
            let ir = self.cert.weighted.embedding(self.psi_tilde.ring().clone(), &self.psi_tilde.source())?;
            Transported {
                xi_prime: space.apply(&ir, &xi2)?,
                xi_double_prime: Some(xi2),
            }
        };
        check(space.apply(&self.psi_tilde, &space.add(&xp, &out.xi_prime)?)?.is_zero(), "ψ̃((x,p) + ξ′) = 0")?;
        check(space.height(&out.xi_prime) * self.psi_tilde.norm_sq() <= self.eps_prime_sq, "h(ξ′)·|ψ̃|² <= ε′²")?;
        Ok(out)
    }
}

/// Shape helper for callers building special morphisms.
pub fn special_shape(g: &MultiIndex, s: &MultiIndex) -> MultiIndex {
    g.add(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference;
    use crate::rings::RingSpec;
    use std::sync::Arc;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const B: u64 = crate::dirichlet::DEFAULT_BUDGET;

    fn single(ring: RingSpec) -> Arc<ProductRingSpec> {
        Arc::new(ProductRingSpec::new(vec![Arc::new(ring)]).unwrap())
    }

    #[test]
    fn vector_examples() {
        let z = single(reference::integers());
        let f = z.factor(0);
        let v = |xs: &[i64]| xs.iter().map(|x| f.element_i64(&[*x]).unwrap()).collect::<Vec<_>>();
        let r = approx_vector(&z, &v(&[7]), &int(2), B).unwrap();
        assert_eq!((r.b, r.b_bar), (int(1), v(&[1])));
        let r = approx_vector(&z, &v(&[3, 4]), &int(2), B).unwrap();
        assert_eq!((r.b, r.b_bar), (int(1), v(&[1, 1])));
        let r = approx_vector(&z, &v(&[5, 0]), &int(2), B).unwrap();
        assert_eq!((r.b, r.b_bar), (int(1), v(&[1, 0])));
        assert!(approx_vector(&z, &v(&[0, 0]), &int(2), B).is_err());
        let zi = single(reference::gaussian());
        let e = zi.factor(0).element_i64(&[3, 1]).unwrap();
        assert!(matches!(approx_vector(&zi, &[e], &int(3), B), Err(Error::Domain(_))));
    }

    #[test]
    fn weighted_examples() {
        let z = single(reference::integers());
        let phi = BlockMorphism::from_i64(z.clone(), &[vec![vec![vec![7], vec![5]]]]).unwrap();
        let cert = WeightedCertificate::new(&phi, int(7), vec![vec![0]]).unwrap();
        // m = 2 and |φ|² = 49 <= 8^4, a = 7 < 8^2, so φ is kept
        let w = approx_weighted(&phi, &cert, &int(8), B).unwrap();
        assert!(w.unchanged);
        assert_eq!(w.psi, phi);
        // a large morphism is approximated and keeps the weight slot
        let phi = BlockMorphism::from_i64(z.clone(), &[vec![vec![vec![70001], vec![50000]]]]).unwrap();
        let cert = WeightedCertificate::new(&phi, int(70001), vec![vec![0]]).unwrap();
        let w = approx_weighted(&phi, &cert, &int(2), B).unwrap();
        assert!(!w.unchanged);
        // 50000/70001 ≈ 0.714: first b with |αb − β| <= 1/2 is b = 1
        assert_eq!(w.psi, BlockMorphism::from_i64(z, &[vec![vec![vec![1], vec![1]]]]).unwrap());
    }

    #[test]
    fn special_identity_branch() {
        let z = single(reference::integers());
        let space = ModelSpace::new(z.clone(), vec![1]).unwrap();
        let full = BlockMorphism::from_i64(z, &[vec![vec![vec![3], vec![1], vec![2]]]]).unwrap();
        let cert = SpecialCertificate::new(&full, &MultiIndex(vec![2])).unwrap();
        let out = approx_special(&space, &full, &cert, &rat(1, 1), &rat(4, 1), &rat(1, 1), B).unwrap();
        assert!(out.unchanged);
        assert_eq!(out.psi_tilde, full);
        // Q = max(2, ⌈(2 + 1)/1⌉) = 3, m = 1·(1·3 − 1 + 1) = 3
        assert_eq!((out.q.clone(), out.m, out.big_m.clone()), (int(3), 3, int(27)));
    }

    #[test]
    fn special_transport_example() {
        // E = Z, g = 2, s = 1, r = 1
        let z = single(reference::integers());
        let space = ModelSpace::new(z.clone(), vec![1]).unwrap();
        let full = BlockMorphism::from_i64(z.clone(), &[vec![vec![vec![1000], vec![377], vec![-611]]]]).unwrap();
        let cert = SpecialCertificate::new(&full, &MultiIndex(vec![2])).unwrap();
        let out = approx_special(&space, &full, &cert, &rat(1, 1), &rat(4, 1), &rat(1, 1), B).unwrap();
        assert!(!out.unchanged);
        assert!(out.psi_tilde.norm_sq() <= &out.c_sq * ratz(&(&out.big_m * &out.big_m)));
        // witness: p = 1, x = (x1, x2) with 1000 x1 + 377 x2 − 611 = 0
        let p = space.free_point(vec![vec![vec![rat(1, 1)]]]).unwrap();
        let x = space.free_point(vec![vec![vec![rat(611 - 377, 1000)], vec![rat(1, 1)]]]).unwrap();
        let xi = space.zero(&MultiIndex(vec![3]));
        let t = out.transport(&space, &full, &x, &p, &xi).unwrap();
        let xp = space.concat(&x, &p).unwrap();
        assert!(space.apply(&out.psi_tilde, &space.add(&xp, &t.xi_prime).unwrap()).unwrap().is_zero());
        let xi2 = t.xi_double_prime.unwrap();
        let hx = space.height(&space.apply(&out.psi_tilde, &xp).unwrap());
        assert_eq!(space.height(&xi2), hx / ratz(&(&out.b * &out.b)));
    }

    fn random_vector(ring: &RingSpec, rng: &mut ChaCha8Rng, n: usize) -> Vec<RingElement> {
        loop {
            let v: Vec<RingElement> = (0..n).map(|_| ring.random_element(rng, 50)).collect();
            if v.iter().any(|e| !e.is_zero()) {
                return v;
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn vector_conclusions(seed in any::<u64>(), which in 0usize..3, n in 1usize..=2, dq in 0i64..=1) {
            let ring = reference::all_reference_rings().remove(which);
            let prod = single(ring.clone());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let v = random_vector(&ring, &mut rng, n);
            let q = prod.compute_q0().unwrap() + dq;
            let r = approx_vector(&prod, &v, &q, B).unwrap();
            // scaling ā does not move b̄/b
            let v2: Vec<RingElement> = v.iter().map(|e| ring.scale(e, &int(2))).collect();
            let r2 = approx_vector(&prod, &v2, &q, B).unwrap();
            prop_assert_eq!(r.b, r2.b);
            prop_assert_eq!(r.b_bar, r2.b_bar);
        }

        #[test]
        fn weighted_embedding(seed in any::<u64>(), which in 0usize..4) {
            let ring = reference::all_reference_rings().remove(which);
            let prod = single(ring.clone());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = int(rand::Rng::gen_range(&mut rng, 1..10_000));
            let l = ring.random_element(&mut rng, 10_000);
            let phi = BlockMorphism::new(prod.clone(), &MultiIndex(vec![1]), &MultiIndex(vec![2]), vec![vec![vec![ring.from_integer(a.clone()), l]]]).unwrap();
            let cert = WeightedCertificate::new(&phi, a, vec![vec![0]]).unwrap();
            let q = prod.compute_q0().unwrap();
            let w = approx_weighted(&phi, &cert, &q, B).unwrap();
            let ir = embedding_ir(&w.psi, &w.cert).unwrap();
            prop_assert_eq!(w.psi.compose(&ir).unwrap(), BlockMorphism::scalar(prod, &MultiIndex(vec![1]), &w.b));
        }
    }
}
