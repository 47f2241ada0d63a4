//! Seeded random instances.
//!
//! The contraction-toward-anchor mode builds a map `G` as a random tree
//! rooted at an anchor `a` (every point moves to its parent) and then
//! chooses distances so that `d(Gx, Gy) <= γ d(x, y)` holds on the whole
//! space. Pairs are weighted level by level, from the anchor outwards, with
//! `w(x, y) >= w(Gx, Gy) / γ`; the shortest-path closure of such weights
//! keeps the Lipschitz bound because `G` maps every path to a path at most
//! `γ` times as long. The mappings are then `S = G∘f`, `T = G∘g` with
//! `f(a) = g(a) = a`, so `a` is the unique common fixed point and both
//! pairs are weakly compatible.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::OracleError;
use crate::contraction::{
    check_condition, check_range_inclusions, CheckOptions, Coefficients, ConditionMaps, PairSource,
    ViolationReport,
};
use crate::mapping::{Arity, Mapping, MappingSet};
use crate::metric::{verify_metric_axioms_with, FiniteSpace, MetricSpace};
use crate::par::Execution;
use crate::reduction::is_weakly_compatible;

/// Distance kept between generated coefficient budgets and 1.
pub const GENERATOR_SLACK: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MetricMode {
    /// Random points of the unit cube, distances tabulated.
    Embedding { dimension: usize },
    /// Uniform random table in `[0.05, 1]`, repaired by metric closure.
    RandomTable,
}

impl Default for MetricMode {
    fn default() -> Self {
        MetricMode::Embedding { dimension: 2 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MappingMode {
    #[default]
    ContractionTowardAnchor,
    Random,
    Identity,
    Constant,
}

/// How `f` and `g` are chosen for three and four maps.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnchorMode {
    /// Independent random surjections onto a common image (usually not
    /// one-to-one).
    #[default]
    Independent,
    /// `g = f`.
    Shared,
    /// `f = g = identity`.
    Identity,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecipe {
    pub seed: u64,
    pub n: usize,
    pub arity: Arity,
    #[serde(default)]
    pub metric: MetricMode,
    #[serde(default)]
    pub mapping: MappingMode,
    #[serde(default)]
    pub anchors: AnchorMode,
    /// The coefficient `γ`; also the Lipschitz factor in contraction mode.
    pub factor: f64,
}

impl Default for InstanceRecipe {
    fn default() -> Self {
        Self {
            seed: 0,
            n: 8,
            arity: Arity::Two,
            metric: MetricMode::default(),
            mapping: MappingMode::default(),
            anchors: AnchorMode::default(),
            factor: 0.5,
        }
    }
}

impl InstanceRecipe {
    fn validate(&self) -> Result<(), OracleError> {
        if self.n == 0 {
            return Err(OracleError::InvalidRecipe("n must be at least 1".into()));
        }
        if !(self.factor > 0.0 && self.factor <= 1.0 - GENERATOR_SLACK) {
            return Err(OracleError::InvalidRecipe(format!(
                "factor must lie in (0, {}], got {}",
                1.0 - GENERATOR_SLACK,
                self.factor
            )));
        }
        if let MetricMode::Embedding { dimension: 0 } = self.metric {
            return Err(OracleError::InvalidRecipe("embedding dimension must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceChecks {
    pub axioms: bool,
    pub coefficients: bool,
    pub condition: ViolationReport,
    /// Range inclusions, three and four maps only.
    pub inclusions: Option<bool>,
    pub weakly_compatible: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub recipe: InstanceRecipe,
    pub space: MetricSpace,
    pub maps: MappingSet,
    pub coefficients: Coefficients,
    /// The intended common fixed point (contraction and constant modes).
    pub anchor: Option<usize>,
    /// All hypotheses re-verified exhaustively.
    pub verified: bool,
    pub checks: InstanceChecks,
}

/// Builds the instance described by `recipe`. Identical recipes give
/// bit-identical instances.
pub fn generate_instance(recipe: &InstanceRecipe) -> Result<Instance, OracleError> {
    recipe.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(recipe.seed);
    let n = recipe.n;
    let anchor = rng.random_range(0..n);

    let reduced = recipe.arity != Arity::Two && recipe.anchors != AnchorMode::Identity;
    let image = if reduced { image_set(&mut rng, n, anchor) } else { (0..n).collect() };
    let f = if reduced { surjection(&mut rng, n, anchor, &image) } else { (0..n).collect() };
    let g = if recipe.anchors == AnchorMode::Independent && recipe.arity == Arity::Four {
        surjection(&mut rng, n, anchor, &image)
    } else {
        f.clone()
    };

    let base = base_weights(&mut rng, n, recipe.metric);
    let (weights, s, t, anchor) = match recipe.mapping {
        MappingMode::ContractionTowardAnchor => {
            let parent = random_tree(&mut rng, n, anchor, &image);
            let w = lipschitz_weights(&base, &parent, recipe.factor);
            (w, compose(&parent, &f), compose(&parent, &g), Some(anchor))
        }
        MappingMode::Random => {
            let s = (0..n).map(|_| rng.random_range(0..n)).collect();
            let t = (0..n).map(|_| rng.random_range(0..n)).collect();
            (base, s, t, None)
        }
        MappingMode::Identity => (base, (0..n).collect(), (0..n).collect(), None),
        MappingMode::Constant => (base, vec![anchor; n], vec![anchor; n], Some(anchor)),
    };
    let table = close_and_scale(weights, n)?;
    let space: MetricSpace = FiniteSpace::from_flat(n, table)?.into();

    let maps = match recipe.arity {
        Arity::Two => MappingSet::two(s, t),
        Arity::Three => MappingSet::three(s, t, f),
        Arity::Four => MappingSet::four(s, t, f, g),
    };
    let coefficients = Coefficients::new(0.0, 0.0, recipe.factor, 0.0, 0.0);
    let checks = run_checks(&space, &maps, &coefficients)?;
    let verified = checks.axioms
        && checks.coefficients
        && checks.condition.satisfied
        && checks.inclusions.unwrap_or(true)
        && checks.weakly_compatible;
    Ok(Instance {
        recipe: *recipe,
        space,
        maps,
        coefficients,
        anchor,
        verified,
        checks,
    })
}

fn run_checks(space: &MetricSpace, maps: &MappingSet, c: &Coefficients) -> Result<InstanceChecks, OracleError> {
    let seq = CheckOptions {
        execution: Execution::Sequential,
        ..CheckOptions::default()
    };
    let axioms = verify_metric_axioms_with(space, 0.0, Execution::Sequential).passed;
    let condition = check_condition(space, &ConditionMaps::from_set(maps)?, c, &PairSource::Exhaustive, seq)?;
    let inclusions = match maps.arity {
        Arity::Two => None,
        _ => Some(check_range_inclusions(space, maps)?.holds),
    };
    let f = maps.f().ok();
    let g = maps.g().ok().or(f);
    let weakly_compatible = match (f, g) {
        (Some(f), Some(g)) => {
            let compatible = |m: &Mapping, a: &Mapping| is_weakly_compatible(space, m, a).map(|w| w.compatible);
            compatible(&maps.s, f)? && compatible(&maps.t, g)?
        }
        _ => true,
    };
    Ok(InstanceChecks {
        axioms,
        coefficients: c.validate().is_ok(),
        condition,
        inclusions,
        weakly_compatible,
    })
}

/// A random image set containing the anchor, strictly smaller than the
/// space when it has more than one point.
fn image_set(rng: &mut ChaCha8Rng, n: usize, anchor: usize) -> Vec<usize> {
    let size = if n >= 2 { rng.random_range(1..n) } else { 1 };
    let mut others: Vec<usize> = (0..n).filter(|&x| x != anchor).collect();
    others.shuffle(rng);
    let mut image: Vec<usize> = others.into_iter().take(size - 1).collect();
    image.push(anchor);
    image.sort_unstable();
    image
}

/// A map onto `image` fixing the anchor.
fn surjection(rng: &mut ChaCha8Rng, n: usize, anchor: usize, image: &[usize]) -> Vec<usize> {
    let mut domain: Vec<usize> = (0..n).filter(|&x| x != anchor).collect();
    domain.shuffle(rng);
    let mut f = vec![usize::MAX; n];
    f[anchor] = anchor;
    let targets = image.iter().copied().filter(|&y| y != anchor);
    let mut rest = domain.iter();
    for (y, &x) in targets.zip(&mut rest) {
        f[x] = y;
    }
    for &x in rest {
        f[x] = image[rng.random_range(0..image.len())];
    }
    f
}

/// Parent pointers of a random recursive tree rooted at the anchor. Points
/// of `image` only get parents inside `image`, so `G(image) ⊆ image`.
fn random_tree(rng: &mut ChaCha8Rng, n: usize, anchor: usize, image: &[usize]) -> Vec<usize> {
    let mut in_image = vec![false; n];
    for &y in image {
        in_image[y] = true;
    }
    let mut inner: Vec<usize> = image.iter().copied().filter(|&y| y != anchor).collect();
    let mut outer: Vec<usize> = (0..n).filter(|&x| !in_image[x]).collect();
    inner.shuffle(rng);
    outer.shuffle(rng);
    let order: Vec<usize> = std::iter::once(anchor).chain(inner).chain(outer).collect();
    let mut parent = vec![anchor; n];
    for i in 1..n {
        parent[order[i]] = order[rng.random_range(0..i)];
    }
    parent
}

fn base_weights(rng: &mut ChaCha8Rng, n: usize, mode: MetricMode) -> Vec<f64> {
    let mut w = vec![0.0; n * n];
    match mode {
        MetricMode::Embedding { dimension } => {
            let points: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..dimension).map(|_| rng.random::<f64>()).collect())
                .collect();
            for i in 0..n {
                for j in 0..i {
                    let d = crate::metric::euclidean(&points[i], &points[j]).max(1e-3);
                    w[i * n + j] = d;
                    w[j * n + i] = d;
                }
            }
        }
        MetricMode::RandomTable => {
            for i in 0..n {
                for j in 0..i {
                    let d = rng.random_range(0.05..=1.0);
                    w[i * n + j] = d;
                    w[j * n + i] = d;
                }
            }
        }
    }
    w
}

fn depths(parent: &[usize]) -> Vec<usize> {
    let n = parent.len();
    let mut depth = vec![usize::MAX; n];
    fn walk(x: usize, parent: &[usize], depth: &mut [usize]) -> usize {
        if depth[x] != usize::MAX {
            return depth[x];
        }
        let d = if parent[x] == x { 0 } else { walk(parent[x], parent, depth) + 1 };
        depth[x] = d;
        d
    }
    for x in 0..n {
        walk(x, parent, &mut depth);
    }
    depth
}

/// Raises `base` until `w(x, y) >= w(Gx, Gy) / factor` for every pair.
fn lipschitz_weights(base: &[f64], parent: &[usize], factor: f64) -> Vec<f64> {
    let n = parent.len();
    let depth = depths(parent);
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..i).map(move |j| (i, j))).collect();
    pairs.sort_by_key(|&(i, j)| (depth[i].max(depth[j]), i, j));
    let mut w = base.to_vec();
    for (i, j) in pairs {
        let (gi, gj) = (parent[i], parent[j]);
        let image = if gi == gj { 0.0 } else { w[gi * n + gj] };
        let v = w[i * n + j].max(image / factor);
        w[i * n + j] = v;
        w[j * n + i] = v;
    }
    w
}

/// Shortest-path closure, repeated until a full pass changes nothing so the
/// triangle inequality holds exactly in floating point, then scaled by a
/// power of two so the diameter is at most 1.
fn close_and_scale(mut d: Vec<f64>, n: usize) -> Result<Vec<f64>, OracleError> {
    loop {
        let mut changed = false;
        for k in 0..n {
            for i in 0..n {
                let dik = d[i * n + k];
                for j in 0..n {
                    let via = dik + d[k * n + j];
                    if via < d[i * n + j] {
                        d[i * n + j] = via;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    for i in 0..n {
        for j in 0..n {
            let v = d[i * n + j];
            if i != j && v <= 0.0 {
                return Err(OracleError::RepairFailure(i, j, v));
            }
        }
    }
    let diameter = d.iter().copied().fold(0.0_f64, f64::max);
    if diameter > 1.0 {
        let scale = 2f64.powi(-(diameter.log2().ceil() as i32));
        d.iter_mut().for_each(|v| *v *= scale);
    }
    Ok(d)
}

fn compose(outer: &[usize], inner: &[usize]) -> Vec<usize> {
    inner.iter().map(|&x| outer[x]).collect()
}
