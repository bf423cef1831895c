//! Degree bounds, essential-minimum lower bounds and the finiteness
//! thresholds built on them.
//!
//! The constants `c(A, η)` of the functorial Bogomolov bound are supplied
//! as data through [`ConjecturalOracle`]; everything downstream is computed
//! here. Irrational powers are replaced by certified rational endpoints
//! rounded in the direction that keeps each inequality valid: lower bounds
//! on `ε₁`, `ε₂`, `ε₁*` and an upper bound on `m`.

use std::collections::BTreeMap;

use num_traits::{One, Pow, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::certified::{pow_bounds, PRECISION_BITS};
use crate::error::{domain, Error, Result};
use crate::morphisms::MultiIndex;
use crate::wire::WireRational;
use crate::{int, rat, ratz, Integer, Rational};

/// Numerical data of `V ⊂ A^g`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarietyCard {
    pub deg_v: WireRational,
    pub d: usize,
    pub cod: usize,
    /// `deg A^g`.
    pub deg_a: WireRational,
    /// `g = dim A^g`.
    pub g: usize,
}

impl VarietyCard {
    pub fn new(deg_v: Rational, d: usize, cod: usize, deg_a: Rational, g: usize) -> Result<Self> {
        let card = VarietyCard {
            deg_v: WireRational(deg_v),
            d,
            cod,
            deg_a: WireRational(deg_a),
            g,
        };
        card.validate()?;
        Ok(card)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.deg_v.0.is_positive() || !self.deg_a.0.is_positive() {
            return domain("degrees must be positive");
        }
        if self.d + self.cod != self.g {
            return domain(format!("d + cod V = {} but the ambient has dimension {}", self.d + self.cod, self.g));
        }
        if self.cod == 0 || self.g == 0 {
            return domain("V must be a proper subvariety of a non-trivial ambient");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleEntry {
    pub ambient: String,
    pub eta: WireRational,
    pub value: WireRational,
}

/// Supplied values of the conjectural constant `c(A, η)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConjecturalOracle {
    entries: Vec<OracleEntry>,
}

impl ConjecturalOracle {
    pub fn new(entries: Vec<OracleEntry>) -> Result<Self> {
        let o = ConjecturalOracle { entries };
        o.validate()?;
        Ok(o)
    }

    pub fn validate(&self) -> Result<()> {
        if self.entries.iter().any(|e| !e.value.0.is_positive()) {
            return domain("oracle values must be positive");
        }
        Ok(())
    }

    pub fn insert(&mut self, ambient: &str, eta: Rational, value: Rational) -> Result<()> {
        if !value.is_positive() {
            return domain("oracle values must be positive");
        }
        self.entries.retain(|e| !(e.ambient == ambient && e.eta.0 == eta));
        self.entries.push(OracleEntry {
            ambient: ambient.to_owned(),
            eta: WireRational(eta),
            value: WireRational(value),
        });
        Ok(())
    }

    pub fn get(&self, ambient: &str, eta: &Rational) -> Result<Rational> {
        self.entries
            .iter()
            .find(|e| e.ambient == ambient && e.eta.0 == *eta)
            .map(|e| e.value.0.clone())
            .ok_or_else(|| Error::Domain(format!("no oracle value for c({ambient}, {eta})")))
    }

    pub fn entries(&self) -> &[OracleEntry] {
        &self.entries
    }
}

fn check_eta(eta: &Rational) -> Result<()> {
    if !eta.is_positive() || *eta > rat(1, 2) {
        return domain(format!("η = {eta} must lie in (0, 1/2]"));
    }
    Ok(())
}

fn pow_lo(x: &Rational, e: &Rational) -> Rational {
    pow_bounds(x, e).0
}

fn pow_hi(x: &Rational, e: &Rational) -> Rational {
    pow_bounds(x, e).1
}

/// `C·|φ|^{2d}·deg V`.
pub fn degree_pushforward_bound(card: &VarietyCard, phi_sq: &Rational, c: &Rational) -> Rational {
    c * Pow::pow(phi_sq, card.d as u32) * &card.deg_v.0
}

/// `a^{2 Σ d_i r_i}`.
pub fn kernel_degree(a: &Integer, r: &MultiIndex, dims: &[usize]) -> Result<Integer> {
    if *a < Integer::one() {
        return domain("kernel_degree needs a >= 1");
    }
    if r.len() != dims.len() {
        return domain("one dimension per factor");
    }
    let e: usize = r.0.iter().zip(dims).map(|(r, d)| r * d).sum();
    Ok(Pow::pow(a, (2 * e) as u32))
}

/// Lower bound on `ε₁ = c(A^r, η/2)·(deg A^r)^{(1−η)/2}/(deg V)^{(1+η)/2}`.
pub fn epsilon1_lower(card: &VarietyCard, c_r: &Rational, deg_ar: &Rational, eta: &Rational) -> Result<Rational> {
    check_eta(eta)?;
    if !deg_ar.is_positive() {
        return domain("deg A^r must be positive");
    }
    let half = rat(1, 2);
    let one = Rational::one();
    Ok(c_r * pow_lo(deg_ar, &((&one - eta) * &half)) * pow_lo(&card.deg_v.0, &(-(&one + eta) * &half)))
}

/// Lower bound on `ε₂ = c′(A^g, η/2)·min_{η′=±η/2} (deg A^g/deg V)^{1/(2 cod V)+η′}`.
pub fn epsilon2_lower(card: &VarietyCard, c_g: &Rational, eta: &Rational) -> Result<Rational> {
    check_eta(eta)?;
    let ratio = &card.deg_a.0 / &card.deg_v.0;
    let base = Rational::new(int(1), int(2 * card.cod as i64));
    let half_eta = eta * rat(1, 2);
    let m = [&base + &half_eta, &base - &half_eta]
        .iter()
        .map(|e| pow_lo(&ratio, e))
        .min()
        .expect("two exponents");
    Ok(c_g * m)
}

/// Lower bounds `(ε₁/|φ|^{d+η}, ε₂·|φ|^{1/cod V − η})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MuBounds {
    pub epsilon1: Rational,
    pub epsilon2: Rational,
    pub bound_phi: Rational,
    pub bound_big_phi: Rational,
}

/// Essential-minimum lower bounds for `φ(V+y)` and `Φ(V+y)`.
#[allow(clippy::too_many_arguments)]
pub fn mu_lower_bounds(
    card: &VarietyCard,
    oracle: &ConjecturalOracle,
    ambient_r: &str,
    deg_ar: &Rational,
    ambient_g: &str,
    eta: &Rational,
    phi_sq: &Rational,
) -> Result<MuBounds> {
    check_eta(eta)?;
    card.validate()?;
    if !phi_sq.is_positive() {
        return domain("|φ| must be positive");
    }
    let half_eta = eta * rat(1, 2);
    let epsilon1 = epsilon1_lower(card, &oracle.get(ambient_r, &half_eta)?, deg_ar, eta)?;
    let epsilon2 = epsilon2_lower(card, &oracle.get(ambient_g, &half_eta)?, eta)?;
    let half = rat(1, 2);
    let d = ratz(&int(card.d as i64));
    let bound_phi = &epsilon1 * pow_lo(phi_sq, &(-(d + eta) * &half));
    let e2 = (Rational::new(int(1), int(card.cod as i64)) - eta) * &half;
    let bound_big_phi = &epsilon2 * pow_lo(phi_sq, &e2);
    Ok(MuBounds {
        epsilon1,
        epsilon2,
        bound_phi,
        bound_big_phi,
    })
}

/// The two cases of the finiteness argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Case {
    /// `|φ| <= m`: `φ(x+y)` lies in a ball of radius `ε₁/m^{d+1}`.
    Small,
    /// `|φ| >= m`: `Φ(x+y)` lies in the ball of radius `K₀`.
    Large,
}

/// `m`, `ε₁*` and the data needed to classify morphisms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Thresholds {
    pub eta: Rational,
    pub k0_sq: Rational,
    pub g: usize,
    pub d: usize,
    pub cod: usize,
    pub epsilon1: Rational,
    pub epsilon2: Rational,
    /// Upper bound on `(K₀/ε₂)^{cod V/(1 − cod V·η)}`.
    pub m: Rational,
    /// `(1/g²)·min(K₀², ε₁²/m^{2(d+1)})`.
    pub eps1_star_sq: Rational,
}

/// Classification of one morphism, with the squared ball radius.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classified {
    pub case: Case,
    pub radius_sq: Rational,
}

/// Thresholds of the finiteness argument from lower bounds on `ε₁`, `ε₂`.
pub fn finito_thresholds_from(card: &VarietyCard, epsilon1: Rational, epsilon2: Rational, eta: &Rational, k0_sq: &Rational) -> Result<Thresholds> {
    check_eta(eta)?;
    card.validate()?;
    let cod = ratz(&int(card.cod as i64));
    if &cod * eta >= Rational::one() {
        return domain("cod V·η must be below 1");
    }
    if !k0_sq.is_positive() || !epsilon1.is_positive() || !epsilon2.is_positive() {
        return domain("K₀, ε₁ and ε₂ must be positive");
    }
    let e = &cod / (Rational::one() - &cod * eta);
    let half = rat(1, 2);
    let base_sq = k0_sq / (&epsilon2 * &epsilon2);
    let mut m = pow_hi(&base_sq, &(&e * &half));
    // m must satisfy K₀² <= ε₂²·m^{2(1/cod − η)} with the lower-rounded power
    let e_case2 = Rational::one() / &cod - eta;
    let step = Rational::one() + Rational::new(int(1), Integer::one() << (PRECISION_BITS / 2));
    while &epsilon2 * &epsilon2 * pow_lo(&(&m * &m), &e_case2) < *k0_sq {
        m = &m * &step;
    }
    let g = ratz(&int(card.g as i64));
    let m_pow = Pow::pow(&(&m * &m), (card.d + 1) as u32);
    let eps1_star_sq = k0_sq.clone().min(&epsilon1 * &epsilon1 / m_pow) / (&g * &g);
    Ok(Thresholds {
        eta: eta.clone(),
        k0_sq: k0_sq.clone(),
        g: card.g,
        d: card.d,
        cod: card.cod,
        epsilon1,
        epsilon2,
        m,
        eps1_star_sq,
    })
}

/// Thresholds with `ε₁` minimised over the supplied `(ambient, deg A^r)`
/// targets and `ε₂` from the ambient `A^g`.
pub fn finito_thresholds(
    card: &VarietyCard,
    oracle: &ConjecturalOracle,
    targets: &[(String, Rational)],
    ambient_g: &str,
    eta: &Rational,
    k0_sq: &Rational,
) -> Result<Thresholds> {
    check_eta(eta)?;
    if targets.is_empty() {
        return domain("at least one target ambient is needed for ε₁");
    }
    let half_eta = eta * rat(1, 2);
    let epsilon1 = targets
        .iter()
        .map(|(tag, deg)| epsilon1_lower(card, &oracle.get(tag, &half_eta)?, deg, eta))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .min()
        .expect("non-empty");
    let epsilon2 = epsilon2_lower(card, &oracle.get(ambient_g, &half_eta)?, eta)?;
    finito_thresholds_from(card, epsilon1, epsilon2, eta, k0_sq)
}

impl Thresholds {
    pub fn classify(&self, phi_sq: &Rational) -> Classified {
        if *phi_sq <= &self.m * &self.m {
            Classified {
                case: Case::Small,
                radius_sq: &self.epsilon1 * &self.epsilon1 / Pow::pow(&(&self.m * &self.m), (self.d + 1) as u32),
            }
        } else {
            Classified {
                case: Case::Large,
                radius_sq: self.k0_sq.clone(),
            }
        }
    }

    /// Whether the inequality each case relies on holds at `|φ|²`:
    /// `g²ε₁*²|φ|^{2(d+1)} <= ε₁²` for the first, `K₀² <= ε₂²|φ|^{2(1/cod−η)}`
    /// for the second.
    pub fn case_inequalities(&self, phi_sq: &Rational) -> (bool, bool) {
        let g = ratz(&int(self.g as i64));
        let m_sq = &self.m * &self.m;
        let small = *phi_sq <= m_sq
            && &g * &g * &self.eps1_star_sq * Pow::pow(phi_sq, (self.d + 1) as u32) <= &self.epsilon1 * &self.epsilon1;
        let e = Rational::one() / ratz(&int(self.cod as i64)) - &self.eta;
        let large = *phi_sq >= m_sq
            && phi_sq.is_positive()
            && self.k0_sq <= &self.epsilon2 * &self.epsilon2 * pow_lo(phi_sq, &e);
        (small, large)
    }

    pub fn summary(&self) -> BTreeMap<&'static str, Rational> {
        BTreeMap::from([
            ("epsilon1", self.epsilon1.clone()),
            ("epsilon2", self.epsilon2.clone()),
            ("m", self.m.clone()),
            ("eps1_star_sq", self.eps1_star_sq.clone()),
        ])
    }
}

/// `ε₁*²` is never above `K₀²/g²`, so in particular `ε <= K₀`.
pub fn eps_within_k0(t: &Thresholds) -> bool {
    t.eps1_star_sq <= t.k0_sq && !t.eps1_star_sq.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelSpace;
    use crate::morphisms::BlockMorphism;
    use crate::reference;
    use crate::rings::ProductRingSpec;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn card() -> VarietyCard {
        VarietyCard::new(rat(3, 1), 1, 2, rat(8, 1), 3).unwrap()
    }

    fn oracle() -> ConjecturalOracle {
        let mut o = ConjecturalOracle::default();
        o.insert("A^r", rat(1, 8), rat(1, 10)).unwrap();
        o.insert("A^g", rat(1, 8), rat(1, 5)).unwrap();
        o
    }

    #[test]
    fn pushforward_examples() {
        let c = card();
        assert_eq!(degree_pushforward_bound(&c, &rat(1, 1), &rat(1, 1)), rat(3, 1));
        let c0 = VarietyCard::new(rat(3, 1), 0, 3, rat(8, 1), 3).unwrap();
        assert_eq!(degree_pushforward_bound(&c0, &rat(49, 1), &rat(2, 1)), rat(6, 1));
        assert!(degree_pushforward_bound(&c, &rat(4, 1), &rat(1, 1)) < degree_pushforward_bound(&c, &rat(9, 1), &rat(1, 1)));
    }

    #[test]
    fn kernel_degree_examples() {
        let r = MultiIndex(vec![1]);
        assert_eq!(kernel_degree(&int(1), &r, &[1]).unwrap(), int(1));
        assert_eq!(kernel_degree(&int(2), &MultiIndex(vec![2]), &[1]).unwrap(), int(16));
        assert_eq!(kernel_degree(&int(3), &r, &[1]).unwrap(), int(9));
        assert!(kernel_degree(&int(0), &r, &[1]).is_err());
    }

    #[test]
    fn kernel_degree_matches_enumeration() {
        let prod = Arc::new(ProductRingSpec::new(vec![Arc::new(reference::integers())]).unwrap());
        let space = ModelSpace::new(prod.clone(), vec![0]).unwrap();
        let g = MultiIndex(vec![1]);
        for a in 1i64..=3 {
            let phi = BlockMorphism::scalar(prod.clone(), &g, &int(a));
            let kernel = space
                .torsion_enum(&g, a as u32, 1000)
                .unwrap()
                .into_iter()
                .filter(|x| space.apply(&phi, x).unwrap().is_zero())
                .count();
            assert_eq!(int(kernel as i64), kernel_degree(&int(a), &g, &[1]).unwrap());
        }
    }

    #[test]
    fn mu_examples() {
        let c = VarietyCard::new(rat(1, 1), 1, 2, rat(1, 1), 3).unwrap();
        let b = mu_lower_bounds(&c, &oracle(), "A^r", &rat(1, 1), "A^g", &rat(1, 4), &rat(4, 1)).unwrap();
        assert_eq!(b.epsilon1, rat(1, 10));
        let big = VarietyCard::new(rat(50, 1), 1, 2, rat(1, 1), 3).unwrap();
        let b2 = mu_lower_bounds(&big, &oracle(), "A^r", &rat(1, 1), "A^g", &rat(1, 4), &rat(4, 1)).unwrap();
        assert!(b2.epsilon1 < b.epsilon1);
        let b3 = mu_lower_bounds(&c, &oracle(), "A^r", &rat(1, 1), "A^g", &rat(1, 4), &rat(100, 1)).unwrap();
        assert!(b3.bound_big_phi > b.bound_big_phi);
        assert!(b3.bound_phi < b.bound_phi);
        assert!(mu_lower_bounds(&c, &oracle(), "A^r", &rat(1, 1), "A^g", &rat(3, 4), &rat(4, 1)).is_err());
        assert!(mu_lower_bounds(&c, &oracle(), "A^r", &rat(1, 1), "A^g", &rat(0, 1), &rat(4, 1)).is_err());
    }

    #[test]
    fn finito_examples() {
        let c = card();
        // K₀ = ε₂ gives m = 1 exactly
        let t = finito_thresholds_from(&c, rat(1, 10), rat(1, 3), &rat(1, 4), &rat(1, 9)).unwrap();
        assert_eq!(t.m, rat(1, 1));
        assert_eq!(t.classify(&rat(2, 1)).case, Case::Large);
        assert_eq!(t.classify(&rat(1, 1)).case, Case::Small);
        let (s, l) = t.case_inequalities(&rat(1, 1));
        assert!(s && l);
        let t2 = finito_thresholds_from(&c, rat(1, 10), rat(1, 3), &rat(1, 4), &rat(4, 1)).unwrap();
        assert!(t2.m > t.m);
        assert!(eps_within_k0(&t2));
        // cod·η >= 1
        assert!(finito_thresholds_from(&c, rat(1, 10), rat(1, 3), &rat(1, 2), &rat(1, 9)).is_err());
        let full = finito_thresholds(&c, &oracle(), &[("A^r".into(), rat(2, 1))], "A^g", &rat(1, 4), &rat(4, 1)).unwrap();
        assert!(full.m.is_positive());
    }

    proptest! {
        #[test]
        fn boundary_satisfies_both_cases(k0 in 1i64..50, e2 in 1i64..20, e1 in 1i64..20, eta_den in 3i64..8) {
            let c = card();
            let eta = rat(1, eta_den);
            let t = finito_thresholds_from(&c, rat(e1, 10), rat(e2, 10), &eta, &rat(k0 * k0, 1)).unwrap();
            let m_sq = &t.m * &t.m;
            let (s, l) = t.case_inequalities(&m_sq);
            prop_assert!(s && l);
            prop_assert!(t.eps1_star_sq <= &t.k0_sq / rat(9, 1));
        }
    }
}
