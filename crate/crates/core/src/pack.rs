//! The bundled scenario pack, generated from a seed.
//!
//! Cloud points are built backwards from the equation: a kernel point `z`
//! of `φ`, a translate `y = Gγ/N` and a perturbation `ξ` small enough for
//! the whole chain (`h(ξ)·M² <= ε²`), then `x = z − y − ξ`.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::approx::{special_exponent, special_q};
use crate::certified::{ceil, sqrt_upper};
use crate::error::{consistency, Error, Result};
use crate::model::{ModelPoint, ModelSpace};
use crate::morphisms::{weightify, BlockMorphism, MultiIndex};
use crate::rings::{ProductRingSpec, RingElement};
use crate::scenario::{CloudPoint, Params, RingRef, Scenario, ScenarioData, ThresholdInputs, ThresholdTarget, SCENARIO_SCHEMA};
use crate::thresholds::{ConjecturalOracle, OracleEntry, VarietyCard};
use crate::wire::WireRational;
use crate::{int, rat, ratz, reference, Integer, Rational};

/// Kind of perturbation attached to a cloud point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Perturbation {
    Zero,
    Torsion,
    Small,
}

/// Recipe for one scenario.
#[derive(Debug, Clone)]
pub struct PackSpec {
    pub name: &'static str,
    pub description: &'static str,
    pub rings: Vec<&'static str>,
    pub nu: Vec<usize>,
    pub g: Vec<usize>,
    /// Free coordinates of `γ`, per factor and slot.
    pub gamma: Vec<Vec<Vec<i64>>>,
    /// Per-factor integer-coordinate blocks.
    pub morphisms: Vec<Vec<Vec<Vec<Vec<i64>>>>>,
    pub per_morphism: usize,
    /// Torsion-only kernel points and no translates.
    pub torsion_only: bool,
    pub k0_sq: i64,
    pub eps_sq: i64,
    pub seed: u64,
    pub trials: u64,
    /// Supplied `c(A^g, η/2)`.
    pub oracle_g: (i64, i64),
}

fn random_map(ring: &ProductRingSpec, rng: &mut ChaCha8Rng, target: &MultiIndex, source: &MultiIndex) -> Result<BlockMorphism> {
    let blocks = (0..ring.len())
        .map(|i| {
            let f = ring.factor(i);
            (0..target.get(i))
                .map(|_| (0..source.get(i)).map(|_| f.random_element(rng, 2)).collect::<Vec<RingElement>>())
                .collect()
        })
        .collect();
    BlockMorphism::new(Arc::new(ring.clone()), target, source, blocks)
}

/// A point `z` with `φ(z) = 0` built from `u`.
pub fn kernel_point(space: &ModelSpace, phi: &BlockMorphism, u: &ModelPoint) -> Result<ModelPoint> {
    let wf = weightify(phi)?;
    let ir = wf.cert.embedding(phi.ring().clone(), &phi.source())?;
    let z0 = space.sub(u, &space.apply(&ir, &space.divide(&space.apply(&wf.phi, u)?, wf.cert.a())?)?)?;
    let k = space
        .apply(phi, &z0)?
        .torsion_order()
        .ok_or_else(|| Error::Consistency("φ(z) has a free part after weightify".into()))?;
    Ok(space.scale(&z0, &k))
}

/// `M = Q^m` for a morphism with `r` rows in the scenario's ambient.
pub fn chain_m(space: &ModelSpace, r: usize, g: usize, s: usize, k0_sq: &Rational, hp_sq: &Rational, eps_sq: &Rational) -> Result<Integer> {
    let q = special_q(&space.ring().compute_q0()?, k0_sq, hp_sq, eps_sq)?;
    Ok(num_traits::pow::Pow::pow(&q, special_exponent(space.ring(), r, g, s) as u32))
}

fn small_perturbation(space: &ModelSpace, rng: &mut ChaCha8Rng, g: &MultiIndex, big_m: &Integer, eps_sq: &Rational) -> Result<ModelPoint> {
    let v = space.random_point(rng, g, 1, 1, 1);
    let h = space.height(&v);
    if h.is_zero() {
        return Ok(v);
    }
    let mq = ratz(big_m);
    let k = ceil(&sqrt_upper(&(h * &mq * &mq / eps_sq))).max(Integer::one());
    space.divide(&v, &k)
}

fn build_cloud(spec: &PackSpec, space: &ModelSpace, gamma: &ModelPoint, morphisms: &[BlockMorphism]) -> Result<Vec<CloudPoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let g = MultiIndex(spec.g.clone());
    let s = gamma.shape();
    let (k0_sq, eps_sq) = (rat(spec.k0_sq, 1), rat(spec.eps_sq, 1));
    let hp_sq = space.height(gamma);
    let mut cloud = Vec::new();
    for (k, phi) in morphisms.iter().enumerate() {
        let big_m = chain_m(space, phi.target().total(), g.total(), s.total(), &k0_sq, &hp_sq, &eps_sq)?;
        for j in 0..spec.per_morphism {
            let kind = [Perturbation::Zero, Perturbation::Torsion, Perturbation::Small][j % 3];
            let mut attempt = 0;
            let point = loop {
                attempt += 1;
                if attempt > 64 {
                    return consistency(format!("{}: no cloud point within K₀ for morphism {k}", spec.name));
                }
                let u = if spec.torsion_only {
                    space.random_point(&mut rng, &g, 0, 1, 6)
                } else {
                    space.random_point(&mut rng, &g, 1, 2, 4)
                };
                let z = kernel_point(space, phi, &u)?;
                let y = if spec.torsion_only || s.total() == 0 {
                    None
                } else {
                    let gm = random_map(space.ring(), &mut rng, &g, &s)?;
                    let n = int(rng.gen_range(1..=3));
                    Some(space.divide(&space.apply(&gm, gamma)?, &n)?)
                };
                let xi = match kind {
                    Perturbation::Zero => space.zero(&g),
                    Perturbation::Torsion => space.random_point(&mut rng, &g, 0, 1, 6),
                    Perturbation::Small if spec.torsion_only => space.random_point(&mut rng, &g, 0, 1, 5),
                    Perturbation::Small => small_perturbation(space, &mut rng, &g, &big_m, &eps_sq)?,
                };
                let mut x = space.sub(&z, &xi)?;
                if let Some(y) = &y {
                    x = space.sub(&x, y)?;
                }
                if space.height(&x) <= k0_sq {
                    break CloudPoint {
                        x: x.to_data(),
                        y: y.map(|y| y.to_data()),
                        morphism: k,
                        xi: xi.to_data(),
                    };
                }
            };
            cloud.push(point);
        }
    }
    Ok(cloud)
}

fn threshold_inputs(g_total: usize, oracle_g: (i64, i64)) -> Result<ThresholdInputs> {
    let d = g_total / 2;
    let card = VarietyCard::new(rat(3, 1), d, g_total - d, rat(2, 1), g_total)?;
    let half_eta = rat(1, 8);
    let oracle = ConjecturalOracle::new(vec![
        OracleEntry {
            ambient: "A^1".into(),
            eta: WireRational(half_eta.clone()),
            value: WireRational(rat(1, 2)),
        },
        OracleEntry {
            ambient: "A^g".into(),
            eta: WireRational(half_eta),
            value: WireRational(rat(oracle_g.0, oracle_g.1)),
        },
    ])?;
    Ok(ThresholdInputs {
        card,
        oracle,
        ambient_g: "A^g".into(),
        targets: vec![ThresholdTarget {
            ambient: "A^1".into(),
            deg: WireRational(rat(2, 1)),
        }],
    })
}

pub fn build(spec: &PackSpec) -> Result<Scenario> {
    let rings = spec
        .rings
        .iter()
        .map(|t| {
            reference::by_tag(t)
                .map(Arc::new)
                .ok_or_else(|| Error::Parse(format!("unknown reference ring {t:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let ring = Arc::new(ProductRingSpec::new(rings)?);
    let space = ModelSpace::new(ring.clone(), spec.nu.clone())?;
    let gamma = space.free_point(
        spec.gamma
            .iter()
            .map(|f| f.iter().map(|v| v.iter().map(|c| rat(*c, 1)).collect()).collect())
            .collect(),
    )?;
    let morphisms = spec
        .morphisms
        .iter()
        .map(|b| BlockMorphism::from_i64(ring.clone(), b))
        .collect::<Result<Vec<_>>>()?;
    let cloud = build_cloud(spec, &space, &gamma, &morphisms)?;
    let data = ScenarioData {
        schema: SCENARIO_SCHEMA.into(),
        name: spec.name.into(),
        description: spec.description.into(),
        rings: spec.rings.iter().map(|t| RingRef::Reference { reference: (*t).into() }).collect(),
        nu: spec.nu.clone(),
        g: MultiIndex(spec.g.clone()),
        gamma: gamma.to_data(),
        morphisms: morphisms.iter().map(BlockMorphism::to_data).collect(),
        cloud,
        params: Params {
            eps_sq: WireRational(rat(spec.eps_sq, 1)),
            k0_sq: WireRational(rat(spec.k0_sq, 1)),
            eta: WireRational(rat(1, 4)),
            seed: spec.seed,
            budget: crate::dirichlet::DEFAULT_BUDGET,
            trials: spec.trials,
        },
        thresholds: threshold_inputs(spec.g.iter().sum(), spec.oracle_g)?,
    };
    Scenario::from_data(data)
}

pub fn default_specs() -> Vec<PackSpec> {
    vec![
        PackSpec {
            name: "z-plane",
            description: "Z, g = 2, one generator; includes a morphism large enough to force the Dirichlet branch",
            rings: vec!["Z"],
            nu: vec![2],
            g: vec![2],
            gamma: vec![vec![vec![1, 0]]],
            morphisms: vec![
                vec![vec![vec![vec![1], vec![3]]]],
                vec![vec![vec![vec![2], vec![3]]]],
                vec![vec![vec![vec![1], vec![9]]]],
            ],
            per_morphism: 3,
            torsion_only: false,
            k0_sq: 2500,
            eps_sq: 2500,
            seed: 11,
            trials: 200,
            oracle_g: (1, 3),
        },
        PackSpec {
            name: "z-torsion",
            description: "Z, g = 2, no generators, torsion witnesses only",
            rings: vec!["Z"],
            nu: vec![1],
            g: vec![2],
            gamma: vec![vec![]],
            morphisms: vec![vec![vec![vec![vec![1], vec![2]]]], vec![vec![vec![vec![1], vec![0]], vec![vec![1], vec![2]]]]],
            per_morphism: 3,
            torsion_only: true,
            k0_sq: 4,
            eps_sq: 4,
            seed: 12,
            trials: 200,
            oracle_g: (10, 1),
        },
        PackSpec {
            name: "gaussian-line",
            description: "Z[i], g = 2, one generator",
            rings: vec!["Z[i]"],
            nu: vec![1],
            g: vec![2],
            gamma: vec![vec![vec![1, 0]]],
            morphisms: vec![vec![vec![vec![vec![1, 0], vec![1, 1]]]], vec![vec![vec![vec![1, 1], vec![2, 0]]]]],
            per_morphism: 3,
            torsion_only: false,
            k0_sq: 400,
            eps_sq: 400,
            seed: 13,
            trials: 200,
            oracle_g: (1, 3),
        },
        PackSpec {
            name: "eisenstein-line",
            description: "Z[w3], g = 2, one generator",
            rings: vec!["Z[w3]"],
            nu: vec![1],
            g: vec![2],
            gamma: vec![vec![vec![1, 1]]],
            morphisms: vec![vec![vec![vec![vec![1, 0], vec![0, 1]]]], vec![vec![vec![vec![2, 0], vec![1, -1]]]]],
            per_morphism: 3,
            torsion_only: false,
            k0_sq: 400,
            eps_sq: 400,
            seed: 14,
            trials: 200,
            oracle_g: (1, 3),
        },
        PackSpec {
            name: "hurwitz-line",
            description: "Hurwitz order, g = 2, one generator",
            rings: vec!["Hurwitz"],
            nu: vec![1],
            g: vec![2],
            gamma: vec![vec![vec![1, 0, 0, 0]]],
            morphisms: vec![vec![vec![vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0]]]]],
            per_morphism: 3,
            torsion_only: false,
            k0_sq: 400,
            eps_sq: 400,
            seed: 15,
            trials: 100,
            oracle_g: (1, 3),
        },
        PackSpec {
            name: "z-gaussian-product",
            description: "Z × Z[i], g = (2, 1), one generator per factor",
            rings: vec!["Z", "Z[i]"],
            nu: vec![1, 1],
            g: vec![2, 1],
            gamma: vec![vec![vec![1]], vec![vec![1, 0]]],
            morphisms: vec![vec![vec![vec![vec![1], vec![2]]], vec![vec![vec![1, 0]]]]],
            per_morphism: 3,
            torsion_only: false,
            k0_sq: 400,
            eps_sq: 400,
            seed: 16,
            trials: 100,
            oracle_g: (1, 3),
        },
    ]
}

pub fn default_pack() -> Vec<Scenario> {
    default_specs().iter().map(|s| build(s).expect("pack scenarios build")).collect()
}

/// Directory holding the bundled scenario files.
pub fn bundled_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

pub fn file_name(s: &Scenario) -> String {
    format!("{}.json", s.name())
}

/// Every `*.json` under `dir`, sorted by file name.
pub fn scenario_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::Parse(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

pub fn load_file(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Scenario::from_json(&text)
}

pub fn load_bundled() -> Result<Vec<Scenario>> {
    scenario_files(&bundled_dir())?.iter().map(|p| load_file(p)).collect()
}
