//! The partition-and-code protocol for individually-private retrieval with side
//! information.
//!
//! The aggregator splits the `K` message indices into a residual block `Q0` of
//! size `rho = K mod (M + D)` and `beta = K div (M + D)` blocks of size `M + D`. The
//! server answers each block with Vandermonde-coded sums (`gamma = min(rho, D)` of them
//! for the residual block, `D` for every full block). Which indices land where is
//! randomised with branch weights chosen so that every index is equally likely to be
//! a demand index given the query.

mod partition;
mod query;
mod weights;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{ceil_div, ratio, Rational};
use crate::ff::PrimeField;
use crate::rng::ProtocolRng;

pub use partition::{
    branch_probability, enumerate_placements, placement_count, sample_partition,
    sample_partition_with, Branch, Mutation, Partition,
};
pub use query::{
    answer_query, build_query, build_query_with, coefficient_matrix, measured_rate, recover,
    Answer, Block, Query,
};
pub use weights::{branch_weights, count_corrected_weights, BranchWeights};

/// Protocol parameters: `K` messages, side information of size `M`, demand of size `D`,
/// messages in `F_{q^m}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Instance {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "M")]
    pub side: usize,
    #[serde(rename = "D")]
    pub demand: usize,
    pub q: u64,
    pub m: usize,
}

impl Instance {
    pub fn new(k: usize, side: usize, demand: usize, q: u64, m: usize) -> Result<Self> {
        validate_kmd(k, side, demand)?;
        if m == 0 {
            return Err(Error::InvalidInstance(
                "extension degree m must be at least 1".into(),
            ));
        }
        PrimeField::new(q)?;
        let alpha = side + demand;
        if (q as usize) < alpha {
            return Err(Error::FieldTooSmall { q, alpha });
        }
        Ok(Self {
            k,
            side,
            demand,
            q,
            m,
        })
    }

    /// Smallest prime field that fits, `m = 1`.
    pub fn with_default_field(k: usize, side: usize, demand: usize) -> Result<Self> {
        validate_kmd(k, side, demand)?;
        let q = PrimeField::at_least((side + demand) as u64).order();
        Self::new(k, side, demand, q, 1)
    }

    pub fn field(&self) -> PrimeField {
        PrimeField::new(self.q).expect("validated at construction")
    }

    pub fn params(&self) -> DerivedParams {
        DerivedParams::new(self)
    }

    /// `rho < D`: the residual block holds only demand indices in the spread branch.
    pub fn short_residual(&self) -> bool {
        self.k % (self.side + self.demand) < self.demand
    }
}

pub(crate) fn validate_kmd(k: usize, side: usize, demand: usize) -> Result<()> {
    if demand < 2 {
        return Err(Error::InvalidInstance("D must be at least 2".into()));
    }
    if side < 1 {
        return Err(Error::InvalidInstance("M must be at least 1".into()));
    }
    if side + demand > k {
        return Err(Error::InvalidInstance("D+M must be ≤ K".into()));
    }
    if k > 63 {
        return Err(Error::InvalidInstance("K above 63 is not supported".into()));
    }
    Ok(())
}

/// Block layout derived from an instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivedParams {
    /// `M + D`, the size of every full block.
    #[serde(rename = "alpha")]
    pub block_len: usize,
    /// Number of full blocks, `floor(K / (M + D))`.
    #[serde(rename = "beta")]
    pub blocks: usize,
    /// Size of the residual block `Q0`.
    #[serde(rename = "rho")]
    pub residual_len: usize,
    /// Equations answered for `Q0`, `min(rho, D)`.
    #[serde(rename = "gamma")]
    pub residual_eqs: usize,
    /// Distinct evaluation points, `0, 1, ..., M + D - 1`.
    pub omegas: Vec<u64>,
}

impl DerivedParams {
    pub fn new(inst: &Instance) -> Self {
        let block_len = inst.side + inst.demand;
        let blocks = inst.k / block_len;
        let residual_len = inst.k - block_len * blocks;
        Self {
            block_len,
            blocks,
            residual_len,
            residual_eqs: residual_len.min(inst.demand),
            omegas: (0..block_len as u64).collect(),
        }
    }
}

pub fn derive_params(inst: &Instance) -> Result<DerivedParams> {
    let alpha = inst.side + inst.demand;
    if (inst.q as usize) < alpha {
        return Err(Error::FieldTooSmall { q: inst.q, alpha });
    }
    Ok(DerivedParams::new(inst))
}

/// Demand set `W` and side-information set `S`, 0-based and sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DemandSideInfo {
    pub demand: Vec<usize>,
    pub side: Vec<usize>,
}

impl DemandSideInfo {
    pub fn new(inst: &Instance, demand: &[usize], side: &[usize]) -> Result<Self> {
        let w: BTreeSet<usize> = demand.iter().copied().collect();
        let s: BTreeSet<usize> = side.iter().copied().collect();
        if w.len() != demand.len() || s.len() != side.len() {
            return Err(Error::InvalidSets("repeated index".into()));
        }
        if w.len() != inst.demand {
            return Err(Error::InvalidSets(format!(
                "demand set has {} indices, expected D = {}",
                w.len(),
                inst.demand
            )));
        }
        if s.len() != inst.side {
            return Err(Error::InvalidSets(format!(
                "side-information set has {} indices, expected M = {}",
                s.len(),
                inst.side
            )));
        }
        if w.iter().chain(&s).any(|&i| i >= inst.k) {
            return Err(Error::InvalidSets(format!("index outside 1..={}", inst.k)));
        }
        if !w.is_disjoint(&s) {
            return Err(Error::InvalidSets(
                "demand and side information overlap".into(),
            ));
        }
        Ok(Self {
            demand: w.into_iter().collect(),
            side: s.into_iter().collect(),
        })
    }

    /// Draws `S` uniformly among `M`-subsets, then `W` uniformly among `D`-subsets of the rest.
    pub fn sample(inst: &Instance, rng: &mut ProtocolRng) -> Self {
        let all: Vec<usize> = (0..inst.k).collect();
        let (side, rest) = rng.split_subset(&all, inst.side);
        let (demand, _) = rng.split_subset(&rest, inst.demand);
        Self { demand, side }
    }

    /// Every valid `(W, S)` pair for the instance, in lexicographic order.
    pub fn all(inst: &Instance) -> Vec<Self> {
        let all: Vec<usize> = (0..inst.k).collect();
        let mut out = Vec::new();
        for w in crate::exact::combinations(&all, inst.demand) {
            let rest: Vec<usize> = all.iter().copied().filter(|i| !w.contains(i)).collect();
            for s in crate::exact::combinations(&rest, inst.side) {
                out.push(Self {
                    demand: w.clone(),
                    side: s,
                });
            }
        }
        out
    }
}

/// Rate guaranteed by the protocol: `D / (K - M floor(K/(M+D)))` when
/// `(K - D)/(M + D) <= floor(K/(M+D))`, else `1 / ceil(K/(M+D))`.
pub fn achievable_rate(k: usize, side: usize, demand: usize) -> Result<Rational> {
    validate_kmd(k, side, demand)?;
    let alpha = side + demand;
    let beta = k / alpha;
    if k - demand <= alpha * beta {
        Ok(ratio(demand as i64, (k - side * beta) as i64))
    } else {
        Ok(ratio(1, ceil_div(k, alpha) as i64))
    }
}
