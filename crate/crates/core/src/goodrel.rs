//! Set relations `f: I -> J` on `[K]` and the conditions that make them good.
//!
//! A relation is stored densely over every `I` with `|I| <= M`, as bitmasks.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{ceil_div, items_of, mask_of, subsets_of_size};
use crate::gpcip::{coefficient_matrix, Instance, Query};
use crate::motherset::Digraph;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetRelation {
    k: usize,
    side: usize,
    demand: usize,
    /// Every `I` with `|I| <= M`, by size and then colex order.
    domain: Vec<u64>,
    image: Vec<u64>,
    index: HashMap<u64, usize>,
}

fn domain_of(k: usize, side: usize) -> Vec<u64> {
    (0..=side.min(k))
        .flat_map(|s| subsets_of_size(k, s))
        .collect()
}

impl SetRelation {
    /// Builds `f` by evaluating `image` on every domain element (masks over `[K]`).
    pub fn from_fn(
        k: usize,
        side: usize,
        demand: usize,
        mut image: impl FnMut(u64) -> u64,
    ) -> Result<Self> {
        if k == 0 || k > 63 {
            return Err(Error::InvalidRelation(format!("K = {k} outside 1..=63")));
        }
        let domain = domain_of(k, side);
        let full = (1u64 << k) - 1;
        let mut images = Vec::with_capacity(domain.len());
        for &i in &domain {
            let j = image(i);
            if j & !full != 0 {
                return Err(Error::InvalidRelation("image outside [K]".into()));
            }
            images.push(j);
        }
        let index = domain.iter().enumerate().map(|(n, &m)| (m, n)).collect();
        Ok(Self {
            k,
            side,
            demand,
            domain,
            image: images,
            index,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn demand(&self) -> usize {
        self.demand
    }

    pub fn domain_len(&self) -> usize {
        self.domain.len()
    }

    /// `f(I)` for a 0-based index set; `None` outside the domain.
    pub fn image_of(&self, set: &[usize]) -> Option<Vec<usize>> {
        self.image_mask(mask_of(set)).map(items_of)
    }

    pub fn image_mask(&self, set: u64) -> Option<u64> {
        self.index.get(&set).map(|&n| self.image[n])
    }

    fn pairs(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.domain.iter().copied().zip(self.image.iter().copied())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let wire: RelationWire = serde_json::from_str(text)?;
        let k = wire.k;
        if k == 0 || k > 63 {
            return Err(Error::InvalidRelation(format!("K = {k} outside 1..=63")));
        }
        let mut given: HashMap<u64, u64> = HashMap::new();
        for entry in &wire.f {
            let to_mask = |v: &[usize]| -> Result<u64> {
                let mut m = 0u64;
                for &x in v {
                    if x == 0 || x > k {
                        return Err(Error::InvalidRelation(format!("index {x} outside 1..={k}")));
                    }
                    m |= 1 << (x - 1);
                }
                Ok(m)
            };
            let i = to_mask(&entry.i)?;
            if i.count_ones() as usize != entry.i.len() || i.count_ones() as usize > wire.side {
                return Err(Error::InvalidRelation(format!(
                    "bad domain element {:?}",
                    entry.i
                )));
            }
            if given.insert(i, to_mask(&entry.j)?).is_some() {
                return Err(Error::InvalidRelation(format!(
                    "f{:?} given twice",
                    entry.i
                )));
            }
        }
        let domain = domain_of(k, wire.side);
        if let Some(missing) = domain.iter().find(|i| !given.contains_key(i)) {
            let shown: Vec<usize> = items_of(*missing).into_iter().map(|x| x + 1).collect();
            return Err(Error::InvalidRelation(format!(
                "f is not defined on {shown:?}"
            )));
        }
        Self::from_fn(k, wire.side, wire.demand, |i| given[&i])
    }

    pub fn to_json(&self) -> String {
        let one_based = |m: u64| items_of(m).into_iter().map(|x| x + 1).collect();
        let wire = RelationWire {
            k: self.k,
            side: self.side,
            demand: self.demand,
            f: self
                .pairs()
                .map(|(i, j)| RelationEntry {
                    i: one_based(i),
                    j: one_based(j),
                })
                .collect(),
        };
        serde_json::to_string(&wire).expect("relation serialisation cannot fail")
    }
}

#[derive(Serialize, Deserialize)]
struct RelationWire {
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "M")]
    side: usize,
    #[serde(rename = "D")]
    demand: usize,
    f: Vec<RelationEntry>,
}

#[derive(Serialize, Deserialize)]
struct RelationEntry {
    #[serde(rename = "I")]
    i: Vec<usize>,
    #[serde(rename = "J")]
    j: Vec<usize>,
}

/// How the disjointness test in the covering condition treats `I` itself.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GoodVariant {
    /// Some nonempty `I` has `f(I)` disjoint from `J*`.
    #[default]
    Literal,
    /// Some nonempty `I` has `f(I) \ I` disjoint from `J*`.
    ExcludingI,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub pass: bool,
    /// 1-based sets exhibiting the failure, empty on success.
    pub witness: Vec<Vec<usize>>,
}

impl ConditionCheck {
    fn ok() -> Self {
        Self {
            pass: true,
            witness: Vec::new(),
        }
    }

    fn fail(sets: &[u64]) -> Self {
        let witness = sets
            .iter()
            .map(|&m| items_of(m).into_iter().map(|x| x + 1).collect())
            .collect();
        Self {
            pass: false,
            witness,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodReport {
    pub variant: GoodVariant,
    /// `I ⊆ f(I)`. Witness `[I]`.
    pub contains_argument: ConditionCheck,
    /// Every `j` lies in a `D`-set `J ⊆ f(I)` with `I ∩ J = ∅`. Witness `[{j}]`.
    pub demand_cover: ConditionCheck,
    /// `I2 ⊆ f(I1)` implies `f(I2) ⊆ f(I1)`. Witness `[I1, I2]`.
    pub closure: ConditionCheck,
    /// Every `J*` with `|J*| < ceil(K/D)` misses some `f(I)`, `I` nonempty. Witness `[J*]`.
    pub avoidance: ConditionCheck,
    /// `|f(I)| >= D` everywhere. Reported only; not part of goodness.
    pub codomain: ConditionCheck,
    pub good: bool,
}

pub fn validate_good(rel: &SetRelation, variant: GoodVariant) -> GoodReport {
    let contains_argument = match rel.pairs().find(|&(i, j)| i & !j != 0) {
        Some((i, _)) => ConditionCheck::fail(&[i]),
        None => ConditionCheck::ok(),
    };

    // a D-set J ∋ j inside f(I) \ I exists iff j ∈ f(I) \ I and |f(I) \ I| >= D
    let mut covered = 0u64;
    for (i, j) in rel.pairs() {
        let free = j & !i;
        if free.count_ones() as usize >= rel.demand {
            covered |= free;
        }
    }
    let demand_cover = match (0..rel.k).find(|&j| covered >> j & 1 == 0) {
        Some(j) => ConditionCheck::fail(&[1 << j]),
        None => ConditionCheck::ok(),
    };

    let mut closure = ConditionCheck::ok();
    'outer: for (i1, f1) in rel.pairs() {
        for (i2, f2) in rel.pairs() {
            if i2 & !f1 == 0 && f2 & !f1 != 0 {
                closure = ConditionCheck::fail(&[i1, i2]);
                break 'outer;
            }
        }
    }

    let limit = ceil_div(rel.k, rel.demand);
    let nonempty: Vec<(u64, u64)> = rel
        .pairs()
        .filter(|&(i, _)| i != 0)
        .map(|(i, j)| match variant {
            GoodVariant::Literal => (i, j),
            GoodVariant::ExcludingI => (i, j & !i),
        })
        .collect();
    let mut avoidance = ConditionCheck::ok();
    'sizes: for size in 0..limit {
        for jstar in subsets_of_size(rel.k, size) {
            if !nonempty.iter().any(|&(_, img)| img & jstar == 0) {
                avoidance = ConditionCheck::fail(&[jstar]);
                break 'sizes;
            }
        }
    }

    let codomain = match rel
        .pairs()
        .find(|&(_, j)| (j.count_ones() as usize) < rel.demand)
    {
        Some((i, _)) => ConditionCheck::fail(&[i]),
        None => ConditionCheck::ok(),
    };

    let good = contains_argument.pass && demand_cover.pass && closure.pass && avoidance.pass;
    GoodReport {
        variant,
        contains_argument,
        demand_cover,
        closure,
        avoidance,
        codomain,
        good,
    }
}

/// Smallest `I*` whose sub-relation images cover `[K]`; `None` if even `[K]` fails.
pub fn min_cover_size(rel: &SetRelation) -> Option<(usize, Vec<usize>)> {
    let full = (1u64 << rel.k) - 1;
    for size in 0..=rel.k {
        for cand in subsets_of_size(rel.k, size) {
            let union = rel
                .pairs()
                .filter(|&(i, _)| i & !cand == 0)
                .fold(0u64, |u, (_, j)| u | j);
            if union == full {
                return Some((size, items_of(cand)));
            }
        }
    }
    None
}

/// `max{K - D ceil(K/(M+D)), M floor(K/(M+D))}`.
pub fn cover_bound(k: usize, side: usize, demand: usize) -> usize {
    let alpha = side + demand;
    (k.saturating_sub(demand * ceil_div(k, alpha))).max(side * (k / alpha))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverBoundReport {
    /// `None` when no cover exists.
    pub cover_size: Option<usize>,
    #[serde(with = "crate::exact::one_based")]
    pub cover: Vec<usize>,
    pub bound: usize,
    pub ok: bool,
}

pub fn check_cover_bound(rel: &SetRelation, variant: GoodVariant) -> Result<CoverBoundReport> {
    let report = validate_good(rel, variant);
    if !report.good {
        let failed: Vec<&str> = [
            ("contains-argument", &report.contains_argument),
            ("demand-cover", &report.demand_cover),
            ("closure", &report.closure),
            ("avoidance", &report.avoidance),
        ]
        .iter()
        .filter(|(_, c)| !c.pass)
        .map(|(n, _)| *n)
        .collect();
        return Err(Error::NotGood(failed.join(", ")));
    }
    let bound = cover_bound(rel.k, rel.side, rel.demand);
    let (cover_size, cover) = match min_cover_size(rel) {
        Some((s, c)) => (Some(s), c),
        None => (None, Vec::new()),
    };
    Ok(CoverBoundReport {
        cover_size,
        cover,
        bound,
        ok: cover_size.is_some_and(|s| s <= bound),
    })
}

/// `M = 1` relation of a graph: `f({v})` is the reach set of `v`, `f(∅) = ∅`.
pub fn relation_from_graph(g: &Digraph, demand: usize) -> SetRelation {
    let reach = g.reach_masks();
    SetRelation::from_fn(g.node_count(), 1, demand, |i| {
        if i == 0 {
            0
        } else {
            reach[i.trailing_zeros() as usize]
        }
    })
    .expect("reach sets stay inside the node set")
}

/// `f(I)` is every message determined by the answer to `query` plus `X_I`.
pub fn relation_from_protocol(inst: &Instance, query: &Query) -> Result<SetRelation> {
    let base = coefficient_matrix(query)?.row_space();
    SetRelation::from_fn(inst.k, inst.side, inst.demand, |i| {
        let mut space = base.clone();
        for x in items_of(i) {
            space.insert_unit(x);
        }
        // decoded units already lie in the span, so one pass is the fixed point
        (0..inst.k)
            .filter(|&j| space.contains_unit(j))
            .fold(0u64, |m, j| m | 1 << j)
    })
}
