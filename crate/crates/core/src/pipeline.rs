//! End-to-end runs over a scenario: the full reduction chain, its
//! independent re-verification from the serialized report, and the
//! smaller per-stage commands.

use std::collections::BTreeSet;

use num_traits::{One, Pow};
use serde::{Deserialize, Serialize};

use crate::approx::{approx_special, approx_weighted, special_exponent, ApproxConstants};
use crate::error::{Error, Result};
use crate::geomnum::point_lower_constants;
use crate::ledger::ConstantLedger;
use crate::morphisms::{BlockMorphism, MorphismData};
use crate::pack::chain_m;
use crate::reduction::{gamma_embed, point_project, translate_witness, InclusionWitness, WitnessData};
use crate::scenario::Scenario;
use crate::thresholds::{finito_thresholds, Case, Thresholds};
use crate::wire::{WireInteger, WireRational};
use crate::{ratz, Integer, Rational};

pub const PIPELINE_SCHEMA: &str = "anomalous-pipeline/1";
pub const VERIFY_SCHEMA: &str = "anomalous-verify/1";
pub const REDUCE_SCHEMA: &str = "anomalous-reduce/1";
pub const APPROX_SCHEMA: &str = "anomalous-approx/1";
pub const THRESHOLDS_SCHEMA: &str = "anomalous-thresholds/1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
}

fn push(checks: &mut Vec<Check>, name: &str, pass: bool) {
    checks.push(Check { name: name.into(), pass });
}

fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.pass)
}

fn w(r: &Rational) -> WireRational {
    WireRational(r.clone())
}

fn wi(n: &Integer) -> WireInteger {
    WireInteger(n.clone())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamsOut {
    pub eps_sq: WireRational,
    pub k0_sq: WireRational,
    pub eta: WireRational,
    pub h_gamma: WireRational,
}

impl ParamsOut {
    fn new(sc: &Scenario) -> Self {
        ParamsOut {
            eps_sq: w(&sc.eps_sq),
            k0_sq: w(&sc.k0_sq),
            eta: w(&sc.eta),
            h_gamma: w(&sc.space.height(&sc.gamma)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdsOut {
    pub epsilon1: WireRational,
    pub epsilon2: WireRational,
    pub m: WireRational,
    pub eps1_star_sq: WireRational,
}

impl From<&Thresholds> for ThresholdsOut {
    fn from(t: &Thresholds) -> Self {
        ThresholdsOut {
            epsilon1: w(&t.epsilon1),
            epsilon2: w(&t.epsilon2),
            m: w(&t.m),
            eps1_star_sq: w(&t.eps1_star_sq),
        }
    }
}

/// `M = Q^m` for one morphism of the scenario.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismBound {
    pub index: usize,
    pub r: usize,
    pub m: usize,
    pub big_m: WireInteger,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecializeOut {
    pub delta_is_identity: bool,
    pub n: WireInteger,
    pub g_map: MorphismData,
    pub phi_tilde: MorphismData,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CentroOut {
    pub q: WireInteger,
    pub m: usize,
    pub big_m: WireInteger,
    pub unchanged: bool,
    pub b: WireInteger,
    pub c_sq: WireRational,
    pub c_eps_sq: WireRational,
    pub eps_prime_sq: WireRational,
    pub psi_tilde_norm_sq: WireRational,
    /// `C²M²`.
    pub bound_sq: WireRational,
    pub ledger: ConstantLedger,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationOut {
    pub psi_norm_sq: WireRational,
    pub case: Case,
    pub radius_sq: WireRational,
    /// `h(ψ(x + y))` for the translate `y = i_r(ψ′(γ)/b)`.
    pub image_height: WireRational,
    pub image_in_ball: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessOut {
    pub index: usize,
    pub morphism: usize,
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub specialize: Option<SpecializeOut>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centro: Option<CentroOut>,
    /// `ψ̃((x, γ) + ξ′) = 0` with `h_bound = ε′²/|ψ̃|²`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transported: Option<WitnessData>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classification: Option<ClassificationOut>,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyOut {
    pub morphisms: Vec<MorphismBound>,
    pub distinct_psi_tilde: usize,
    pub max_norm_sq: WireRational,
    pub max_bound_sq: WireRational,
    pub within_bound: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub schema: String,
    pub scenario: String,
    pub seed: u64,
    pub budget: u64,
    pub params: ParamsOut,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<ThresholdsOut>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds_error: Option<String>,
    pub family: FamilyOut,
    pub witnesses: Vec<WitnessOut>,
    pub pass: bool,
}

struct Done {
    out: WitnessOut,
    psi_tilde: BlockMorphism,
    norm_sq: Rational,
    bound_sq: Rational,
}

fn run_witness(sc: &Scenario, th: Option<&Thresholds>, index: usize, wit: &InclusionWitness) -> Result<Done> {
    let space = &sc.space;
    let morphism = sc.data.cloud[index].morphism;
    let mut checks = Vec::new();
    push(&mut checks, "input witness equation and height", wit.verify(space).is_ok());
    wit.verify(space)?;

    let spec = gamma_embed(space, wit, &sc.gamma, &sc.eps_sq, &sc.k0_sq)?;
    let y = wit.y.clone().unwrap_or_else(|| space.zero(sc.g()));
    push(&mut checks, "specialized witness equation", spec.witness.verify(space).is_ok());
    push(&mut checks, "N·y = G·γ", spec.witness.verify_group(space, &y, &sc.gamma).is_ok());
    let (phi_w, _) = spec.phi_tilde.split_columns(sc.g())?;
    let delta_is_identity = phi_w == wit.phi.scale(&spec.group.n);

    let hp = space.height(&sc.gamma);
    let sa = approx_special(space, &spec.phi_tilde, &spec.cert, &sc.eps_sq, &sc.k0_sq, &hp, sc.budget())?;
    let tr = sa.transport(space, &spec.phi_tilde, &wit.x, &sc.gamma, &spec.witness.xi)?;
    let psi_sq = sa.psi_tilde.norm_sq();
    let big_m_sq = ratz(&(&sa.big_m * &sa.big_m));
    let bound_sq = &sa.c_sq * &big_m_sq;
    let out_w = InclusionWitness::pair(wit.x.clone(), sc.gamma.clone(), sa.psi_tilde.clone(), tr.xi_prime.clone(), &sa.eps_prime_sq / &psi_sq);
    push(&mut checks, "transported witness equation and height", out_w.verify(space).is_ok());
    push(
        &mut checks,
        "h(ξ′)·|ψ̃|² <= ε′²",
        space.height(&tr.xi_prime) * &psi_sq <= sa.eps_prime_sq,
    );
    push(&mut checks, "ε′² <= C_ε²ε²", sa.eps_prime_sq <= &sa.c_eps_sq * &sc.eps_sq);
    push(&mut checks, "|ψ̃|² <= C²M²", psi_sq <= bound_sq);

    let (psi, psi_prime) = sa.psi_tilde.split_columns(sc.g())?;
    let classification = match th {
        Some(t) => {
            let psi_norm = psi.norm_sq();
            let cl = t.classify(&psi_norm);
            let (small, large) = t.case_inequalities(&psi_norm);
            push(
                &mut checks,
                "case inequality at |ψ|",
                match cl.case {
                    Case::Small => small,
                    Case::Large => large,
                },
            );
            let ir = sa.cert.weighted.embedding(psi.ring().clone(), &psi.source())?;
            let ytr = space.apply(&ir, &space.divide(&space.apply(&psi_prime, &sc.gamma)?, &sa.b)?)?;
            let image = space.apply(&psi, &space.add(&wit.x, &ytr)?)?;
            let image_height = space.height(&image);
            Some(ClassificationOut {
                psi_norm_sq: w(&psi_norm),
                case: cl.case,
                image_in_ball: image_height <= cl.radius_sq,
                radius_sq: w(&cl.radius_sq),
                image_height: w(&image_height),
            })
        }
        None => None,
    };
    let status = if all_pass(&checks) { "ok" } else { "failed" };
    Ok(Done {
        out: WitnessOut {
            index,
            morphism,
            status: status.into(),
            diagnostic: None,
            specialize: Some(SpecializeOut {
                delta_is_identity,
                n: wi(&spec.group.n),
                g_map: spec.group.g.to_data(),
                phi_tilde: spec.phi_tilde.to_data(),
            }),
            centro: Some(CentroOut {
                q: wi(&sa.q),
                m: sa.m,
                big_m: wi(&sa.big_m),
                unchanged: sa.unchanged,
                b: wi(&sa.b),
                c_sq: w(&sa.c_sq),
                c_eps_sq: w(&sa.c_eps_sq),
                eps_prime_sq: w(&sa.eps_prime_sq),
                psi_tilde_norm_sq: w(&psi_sq),
                bound_sq: w(&bound_sq),
                ledger: sa.ledger.clone(),
            }),
            transported: Some(out_w.to_data()),
            classification,
            checks,
        },
        psi_tilde: sa.psi_tilde,
        norm_sq: psi_sq,
        bound_sq,
    })
}

fn scenario_thresholds(sc: &Scenario) -> Result<Thresholds> {
    finito_thresholds(sc.card(), sc.oracle(), &sc.targets(), &sc.data.thresholds.ambient_g, &sc.eta, &sc.k0_sq)
}

fn morphism_bounds(sc: &Scenario) -> Result<Vec<MorphismBound>> {
    let hp = sc.space.height(&sc.gamma);
    sc.morphisms
        .iter()
        .enumerate()
        .map(|(index, phi)| {
            let r = phi.target().total();
            Ok(MorphismBound {
                index,
                r,
                m: special_exponent(sc.space.ring(), r, sc.g().total(), sc.s().total()),
                big_m: WireInteger(chain_m(&sc.space, r, sc.g().total(), sc.s().total(), &sc.k0_sq, &hp, &sc.eps_sq)?),
            })
        })
        .collect()
}

/// Runs the chain on every cloud witness, in input order.
pub fn run_pipeline(sc: &Scenario) -> Result<PipelineReport> {
    let (thresholds, thresholds_error) = match scenario_thresholds(sc) {
        Ok(t) => (Some(t), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let mut witnesses = Vec::new();
    let mut family: BTreeSet<String> = BTreeSet::new();
    let mut max_norm = Rational::from_integer(Integer::from(0));
    let mut max_bound = max_norm.clone();
    let mut within = true;
    for (index, wit) in sc.witnesses.iter().enumerate() {
        match run_witness(sc, thresholds.as_ref(), index, wit) {
            Ok(d) => {
                family.insert(serde_json::to_string(&d.psi_tilde.to_data()).expect("serializable"));
                within &= d.norm_sq <= d.bound_sq;
                max_norm = max_norm.max(d.norm_sq);
                max_bound = max_bound.max(d.bound_sq);
                witnesses.push(d.out);
            }
            Err(e) => witnesses.push(WitnessOut {
                index,
                morphism: sc.data.cloud[index].morphism,
                status: "failed".into(),
                diagnostic: Some(e.to_string()),
                specialize: None,
                centro: None,
                transported: None,
                classification: None,
                checks: Vec::new(),
            }),
        }
    }
    let pass = thresholds_error.is_none() && within && witnesses.iter().all(|w| w.status == "ok");
    Ok(PipelineReport {
        schema: PIPELINE_SCHEMA.into(),
        scenario: sc.name().into(),
        seed: sc.data.params.seed,
        budget: sc.budget(),
        params: ParamsOut::new(sc),
        thresholds: thresholds.as_ref().map(ThresholdsOut::from),
        thresholds_error,
        family: FamilyOut {
            morphisms: morphism_bounds(sc)?,
            distinct_psi_tilde: family.len(),
            max_norm_sq: w(&max_norm),
            max_bound_sq: w(&max_bound),
            within_bound: within,
        },
        witnesses,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifiedWitness {
    pub index: usize,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema: String,
    pub scenario: String,
    pub seed: u64,
    pub pipeline_pass: bool,
    pub witnesses: Vec<VerifiedWitness>,
    pub distinct_psi_tilde: usize,
    pub pass: bool,
}

fn verify_one(sc: &Scenario, eps_sq: &Rational, wo: &WitnessOut) -> Result<Vec<Check>> {
    let space = &sc.space;
    let mut checks = Vec::new();
    let (Some(t), Some(c)) = (&wo.transported, &wo.centro) else {
        push(&mut checks, "witness completed the chain", false);
        return Ok(checks);
    };
    let wit = InclusionWitness::from_data(space, t)?;
    let p = wit.p.clone().ok_or_else(|| Error::Parse("transported witness lacks p".into()))?;
    push(&mut checks, "x and p match the scenario", wit.x == sc.witnesses[wo.index].x && p == sc.gamma);
    push(&mut checks, "ψ̃((x,p) + ξ′) = 0", wit.verify(space).is_ok());
    let psi_sq = wit.phi.norm_sq();
    push(&mut checks, "recorded |ψ̃|²", psi_sq == c.psi_tilde_norm_sq.0);
    let eps_p = &c.eps_prime_sq.0;
    push(&mut checks, "h(ξ′)·|ψ̃|² <= ε′²", space.height(&wit.xi) * &psi_sq <= *eps_p);
    push(&mut checks, "ε′² <= C_ε²ε²", *eps_p <= &c.c_eps_sq.0 * eps_sq);
    // m = t(r(g+s) − r² + n), from the ring and shapes alone
    let ring = space.ring();
    let t_rank: usize = ring.factors().iter().map(|f| f.rank()).sum();
    let (r, g, s) = (wit.phi.target().total(), sc.g().total(), sc.s().total());
    let m = t_rank * (r * (g + s) - r * r + ring.len());
    push(&mut checks, "m recomputed", m == c.m);
    let q = ring.compute_q0()?.max(crate::certified::ceil_root_sum_over_root(&sc.k0_sq, &space.height(&sc.gamma), eps_sq));
    let big_m: Integer = Pow::pow(&q, m as u32);
    push(&mut checks, "M = Q^m recomputed", big_m == c.big_m.0);
    push(&mut checks, "|ψ̃|² <= C²M²", psi_sq <= &c.c_sq.0 * ratz(&(&big_m * &big_m)) && c.c_sq.0 >= Rational::one());
    Ok(checks)
}

/// Re-checks a serialized pipeline report against its scenario, using only
/// the wire data of the report.
pub fn verify_report(sc: &Scenario, report_json: &str) -> Result<VerifyReport> {
    let rep: PipelineReport = serde_json::from_str(report_json).map_err(|e| Error::Parse(e.to_string()))?;
    if rep.schema != PIPELINE_SCHEMA {
        return Err(Error::Parse(format!("unsupported report schema {:?}", rep.schema)));
    }
    if rep.witnesses.len() != sc.witnesses.len() {
        return Err(Error::Parse("report and scenario disagree on the witness count".into()));
    }
    let eps_sq = &rep.params.eps_sq.0;
    let mut witnesses = Vec::new();
    let mut family = BTreeSet::new();
    for wo in &rep.witnesses {
        let checks = match verify_one(sc, eps_sq, wo) {
            Ok(c) => c,
            Err(e) => vec![Check {
                name: format!("decode: {e}"),
                pass: false,
            }],
        };
        if let Some(t) = &wo.transported {
            family.insert(serde_json::to_string(&t.phi).expect("serializable"));
        }
        witnesses.push(VerifiedWitness { index: wo.index, checks });
    }
    let pass = rep.pass && family.len() == rep.family.distinct_psi_tilde && witnesses.iter().all(|w| all_pass(&w.checks));
    Ok(VerifyReport {
        schema: VERIFY_SCHEMA.into(),
        scenario: rep.scenario,
        seed: rep.seed,
        pipeline_pass: rep.pass,
        witnesses,
        distinct_psi_tilde: family.len(),
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedWitness {
    pub index: usize,
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translated: Option<WitnessData>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projected: Option<WitnessData>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projected_eps_sq: Option<WireRational>,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReduceReport {
    pub schema: String,
    pub scenario: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps0_sq: Option<WireRational>,
    pub witnesses: Vec<ReducedWitness>,
    pub pass: bool,
}

fn reduce_one(sc: &Scenario, consts: Option<&crate::geomnum::PointConstants>, wit: &InclusionWitness) -> Result<ReducedWitness> {
    let space = &sc.space;
    let mut checks = Vec::new();
    let spec = gamma_embed(space, wit, &sc.gamma, &sc.eps_sq, &sc.k0_sq)?;
    push(&mut checks, "gamma_embed witness", spec.witness.verify(space).is_ok());
    let (phi, _) = spec.phi_tilde.split_columns(sc.g())?;
    let tr = translate_witness(space, &spec.witness, &spec.cert, &(&wit.h_bound * phi.norm_sq()))?;
    push(&mut checks, "translated witness", tr.witness.verify(space).is_ok());
    push(&mut checks, "translate keeps x", tr.witness.x == wit.x);
    let pp_eps = match consts {
        Some(c) => c.eps0_sq.clone().min(sc.eps_sq.clone()),
        None => sc.eps_sq.clone(),
    };
    let (projected, projected_eps_sq) = if wit.h_bound <= pp_eps {
        let pr = point_project(space, &spec.witness, sc.g(), consts, &pp_eps, &sc.k0_sq)?;
        push(&mut checks, "projected witness", pr.witness.verify(space).is_ok());
        push(&mut checks, "projection keeps x", pr.witness.x == wit.x);
        (Some(pr.witness.to_data()), Some(WireRational(pr.eps_prime_sq)))
    } else {
        (None, None)
    };
    Ok(ReducedWitness {
        index: 0,
        status: if all_pass(&checks) { "ok".into() } else { "failed".into() },
        diagnostic: None,
        translated: Some(tr.witness.to_data()),
        projected,
        projected_eps_sq,
        checks,
    })
}

/// `gamma_embed`, `translate_witness` and `point_project` on every witness.
pub fn run_reduce(sc: &Scenario) -> Result<ReduceReport> {
    let consts = if sc.s().total() > 0 {
        Some(point_lower_constants(&sc.space, &sc.gamma)?)
    } else {
        None
    };
    let witnesses: Vec<ReducedWitness> = sc
        .witnesses
        .iter()
        .enumerate()
        .map(|(index, wit)| match reduce_one(sc, consts.as_ref(), wit) {
            Ok(r) => ReducedWitness { index, ..r },
            Err(e) => ReducedWitness {
                index,
                status: "failed".into(),
                diagnostic: Some(e.to_string()),
                translated: None,
                projected: None,
                projected_eps_sq: None,
                checks: Vec::new(),
            },
        })
        .collect();
    let pass = witnesses.iter().all(|w| w.status == "ok");
    Ok(ReduceReport {
        schema: REDUCE_SCHEMA.into(),
        scenario: sc.name().into(),
        eps0_sq: consts.map(|c| WireRational(c.eps0_sq)),
        witnesses,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproxOut {
    pub morphism: usize,
    pub q: WireInteger,
    pub m: usize,
    pub b: WireInteger,
    pub unchanged: bool,
    pub psi: MorphismData,
    pub ledger: ConstantLedger,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproxReport {
    pub schema: String,
    pub scenario: String,
    pub q0: WireInteger,
    pub results: Vec<ApproxOut>,
    pub errors: Vec<String>,
    pub pass: bool,
}

/// Weightify and approximate every scenario morphism at `Q = Q₀`.
pub fn run_approx(sc: &Scenario) -> Result<ApproxReport> {
    let k = ApproxConstants::new(sc.space.ring())?;
    let mut results = Vec::new();
    let mut errors = Vec::new();
    for (i, phi) in sc.morphisms.iter().enumerate() {
        let r = crate::morphisms::weightify(phi).and_then(|wf| approx_weighted(&wf.phi, &wf.cert, &k.q0, sc.budget()));
        match r {
            Ok(a) => results.push(ApproxOut {
                morphism: i,
                q: wi(&a.q),
                m: a.m,
                b: wi(&a.b),
                unchanged: a.unchanged,
                psi: a.psi.to_data(),
                ledger: a.ledger,
            }),
            Err(e) => errors.push(format!("morphism {i}: {e}")),
        }
    }
    Ok(ApproxReport {
        schema: APPROX_SCHEMA.into(),
        scenario: sc.name().into(),
        q0: wi(&k.q0),
        pass: errors.is_empty(),
        results,
        errors,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifiedMorphism {
    pub morphism: usize,
    pub norm_sq: WireRational,
    pub case: Case,
    pub radius_sq: WireRational,
    pub inequality_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdsReport {
    pub schema: String,
    pub scenario: String,
    pub thresholds: ThresholdsOut,
    pub classified: Vec<ClassifiedMorphism>,
    pub pass: bool,
}

pub fn run_thresholds(sc: &Scenario) -> Result<ThresholdsReport> {
    let t = scenario_thresholds(sc)?;
    let classified: Vec<ClassifiedMorphism> = sc
        .morphisms
        .iter()
        .enumerate()
        .map(|(i, phi)| {
            let n = phi.norm_sq();
            let c = t.classify(&n);
            let (small, large) = t.case_inequalities(&n);
            ClassifiedMorphism {
                morphism: i,
                norm_sq: w(&n),
                inequality_holds: if c.case == Case::Small { small } else { large },
                case: c.case,
                radius_sq: w(&c.radius_sq),
            }
        })
        .collect();
    Ok(ThresholdsReport {
        schema: THRESHOLDS_SCHEMA.into(),
        scenario: sc.name().into(),
        thresholds: ThresholdsOut::from(&t),
        pass: classified.iter().all(|c| c.inequality_holds),
        classified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pack;
    use crate::scenario::to_pretty_json;

    #[test]
    fn pack_pipeline_passes_and_verifies() {
        for sc in pack::default_pack() {
            let rep = run_pipeline(&sc).unwrap();
            for w in &rep.witnesses {
                assert_eq!(w.status, "ok", "{} #{}: {:?} {:?}", sc.name(), w.index, w.diagnostic, w.checks);
            }
            assert!(rep.pass, "{}", sc.name());
            let v = verify_report(&sc, &to_pretty_json(&rep)).unwrap();
            assert!(v.pass, "{}: {:?}", sc.name(), v.witnesses);
        }
    }

    #[test]
    fn forced_approximation_occurs() {
        let sc = pack::default_pack().into_iter().find(|s| s.name() == "z-plane").unwrap();
        let rep = run_pipeline(&sc).unwrap();
        assert!(rep.witnesses.iter().any(|w| !w.centro.as_ref().unwrap().unchanged));
    }

    #[test]
    fn empty_cloud_still_bounds_m() {
        let mut sc = pack::default_pack().remove(0);
        sc.witnesses.clear();
        sc.data.cloud.clear();
        let rep = run_pipeline(&sc).unwrap();
        assert!(rep.witnesses.is_empty());
        assert_eq!(rep.family.distinct_psi_tilde, 0);
        assert_eq!(rep.family.morphisms.len(), sc.morphisms.len());
        assert!(rep.family.morphisms.iter().all(|m| m.big_m.0 > Integer::one()));
    }

    #[test]
    fn torsion_scenario_skips_specialization() {
        let sc = pack::default_pack().into_iter().find(|s| s.name() == "z-torsion").unwrap();
        let rep = run_pipeline(&sc).unwrap();
        assert!(rep.pass);
        for w in &rep.witnesses {
            let s = w.specialize.as_ref().unwrap();
            assert_eq!(s.n.0, Integer::one());
        }
    }

    #[test]
    fn fabricated_witness_fails() {
        let mut sc = pack::default_pack().remove(0);
        let x = sc.witnesses[0].x.clone();
        sc.witnesses[0].x = sc.space.add(&x, &x).unwrap();
        let rep = run_pipeline(&sc).unwrap();
        assert!(!rep.pass);
        assert_eq!(rep.witnesses[0].status, "failed");
    }

    #[test]
    fn tampered_report_is_rejected() {
        let sc = pack::default_pack().remove(0);
        let mut rep = run_pipeline(&sc).unwrap();
        let c = rep.witnesses[0].centro.as_mut().unwrap();
        c.m += 1;
        let v = verify_report(&sc, &to_pretty_json(&rep)).unwrap();
        assert!(!v.pass);
    }

    #[test]
    fn reduce_and_side_commands() {
        for sc in pack::default_pack() {
            let r = run_reduce(&sc).unwrap();
            assert!(r.pass, "{}: {:?}", sc.name(), r.witnesses);
            assert!(run_approx(&sc).unwrap().pass, "{}", sc.name());
            assert!(run_thresholds(&sc).unwrap().pass, "{}", sc.name());
        }
    }
}
