//! Scenario files: rings, ambient shape, generators, a sample cloud of
//! witnesses and the numeric parameters of a run.

use std::sync::Arc;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::dirichlet::DEFAULT_BUDGET;
use crate::error::{domain, shape, Error, Result};
use crate::model::{ModelPoint, ModelSpace, PointData};
use crate::morphisms::{BlockMorphism, MorphismData, MultiIndex};
use crate::reduction::InclusionWitness;
use crate::reference;
use crate::rings::{ProductRingSpec, RingSpec, RingSpecData};
use crate::thresholds::{ConjecturalOracle, VarietyCard};
use crate::wire::WireRational;
use crate::Rational;

pub const SCENARIO_SCHEMA: &str = "anomalous-scenario/1";

/// A ring given by reference tag or in full.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RingRef {
    Reference { reference: String },
    Full(RingSpecData),
}

impl RingRef {
    pub fn resolve(&self) -> Result<RingSpec> {
        match self {
            RingRef::Reference { reference } => {
                reference::by_tag(reference).ok_or_else(|| Error::Parse(format!("unknown reference ring {reference:?}")))
            }
            RingRef::Full(d) => RingSpec::from_data(d),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    pub eps_sq: WireRational,
    pub k0_sq: WireRational,
    pub eta: WireRational,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_budget")]
    pub budget: u64,
    /// Random trials per property suite.
    #[serde(default = "default_trials")]
    pub trials: u64,
}

fn default_budget() -> u64 {
    DEFAULT_BUDGET
}

fn default_trials() -> u64 {
    200
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdTarget {
    pub ambient: String,
    pub deg: WireRational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdInputs {
    pub card: VarietyCard,
    pub oracle: ConjecturalOracle,
    pub ambient_g: String,
    pub targets: Vec<ThresholdTarget>,
}

/// One point of the sample cloud: `φ_k(x + y + ξ) = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CloudPoint {
    pub x: PointData,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<PointData>,
    pub morphism: usize,
    pub xi: PointData,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioData {
    pub schema: String,
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub rings: Vec<RingRef>,
    pub nu: Vec<usize>,
    pub g: MultiIndex,
    pub gamma: PointData,
    pub morphisms: Vec<MorphismData>,
    pub cloud: Vec<CloudPoint>,
    pub params: Params,
    pub thresholds: ThresholdInputs,
}

/// A validated scenario with every cross-reference resolved.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub data: ScenarioData,
    pub space: ModelSpace,
    pub gamma: ModelPoint,
    pub morphisms: Vec<BlockMorphism>,
    /// One plain witness per cloud point, `h_bound = h(ξ)`.
    pub witnesses: Vec<InclusionWitness>,
    pub eps_sq: Rational,
    pub k0_sq: Rational,
    pub eta: Rational,
}

impl Scenario {
    pub fn from_json(s: &str) -> Result<Self> {
        let data: ScenarioData = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_data(data)
    }

    pub fn from_data(data: ScenarioData) -> Result<Self> {
        if data.schema != SCENARIO_SCHEMA {
            return Err(Error::Parse(format!("unsupported scenario schema {:?}", data.schema)));
        }
        let rings = data
            .rings
            .iter()
            .map(|r| r.resolve().map(Arc::new))
            .collect::<Result<Vec<_>>>()?;
        let ring = Arc::new(ProductRingSpec::new(rings)?);
        let space = ModelSpace::new(ring.clone(), data.nu.clone())?;
        if data.g.len() != ring.len() {
            return shape("ambient g must have one entry per ring factor");
        }
        let gamma = space.from_data(&data.gamma)?;
        let morphisms = data
            .morphisms
            .iter()
            .map(|m| {
                let phi = BlockMorphism::from_data(ring.clone(), m)?;
                if phi.source() != data.g {
                    return shape("every morphism must have source A^g");
                }
                Ok(phi)
            })
            .collect::<Result<Vec<_>>>()?;
        let eps_sq = data.params.eps_sq.0.clone();
        let k0_sq = data.params.k0_sq.0.clone();
        if !eps_sq.is_positive() || k0_sq < eps_sq {
            return domain("parameters need 0 < ε² <= K₀²");
        }
        data.thresholds.card.validate()?;
        data.thresholds.oracle.validate()?;
        let witnesses = data
            .cloud
            .iter()
            .map(|c| {
                let phi = morphisms
                    .get(c.morphism)
                    .ok_or_else(|| Error::Parse(format!("cloud point refers to missing morphism {}", c.morphism)))?;
                let x = space.from_data(&c.x)?;
                let y = c.y.as_ref().map(|y| space.from_data(y)).transpose()?;
                let xi = space.from_data(&c.xi)?;
                for p in [Some(&x), y.as_ref(), Some(&xi)].into_iter().flatten() {
                    if p.shape() != data.g {
                        return shape("cloud points must live in A^g");
                    }
                }
                let h = space.height(&xi);
                Ok(InclusionWitness::plain(x, y, phi.clone(), xi, h))
            })
            .collect::<Result<Vec<_>>>()?;
        let eta = data.params.eta.0.clone();
        Ok(Scenario {
            data,
            space,
            gamma,
            morphisms,
            witnesses,
            eps_sq,
            k0_sq,
            eta,
        })
    }

    pub fn name(&self) -> &str {
        &self.data.name
    }

    pub fn g(&self) -> &MultiIndex {
        &self.data.g
    }

    pub fn s(&self) -> MultiIndex {
        self.gamma.shape()
    }

    pub fn targets(&self) -> Vec<(String, Rational)> {
        self.data
            .thresholds
            .targets
            .iter()
            .map(|t| (t.ambient.clone(), t.deg.0.clone()))
            .collect()
    }

    pub fn card(&self) -> &VarietyCard {
        &self.data.thresholds.card
    }

    pub fn oracle(&self) -> &ConjecturalOracle {
        &self.data.thresholds.oracle
    }

    pub fn budget(&self) -> u64 {
        self.data.params.budget
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.data.params.budget = budget;
        self
    }

    pub fn to_json(&self) -> String {
        to_pretty_json(&self.data)
    }
}

/// Pretty JSON with a trailing newline; stable for byte comparisons.
pub fn to_pretty_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}
