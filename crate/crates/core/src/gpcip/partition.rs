use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::{branch_weights, DemandSideInfo, DerivedParams, Instance};
use crate::error::{Error, Result};
use crate::exact::{binom, combinations, int, Rational};
use crate::rng::ProtocolRng;

/// Which Step-1 branch produced a partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// Demand indices go to `Q0`: a `rho`-subset of `W` when `rho < D`, else all of `W`
    /// plus `rho - D` side indices.
    Spread,
    /// `S ∪ W` forms one block exactly.
    Bundle,
}

/// Protocol variants used to check that the privacy audit is not vacuous.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    #[default]
    Honest,
    /// Never take the bundle branch.
    AlwaysSpread,
    /// Spread weight multiplied by two before normalising.
    DoubledSpreadWeight,
    /// Skip the Step-2 permutation: the distinguished block is always sent first.
    NoShuffle,
}

/// Step-1 output. `parts[0]` is the distinguished block `Q1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    pub q0: Vec<usize>,
    pub parts: Vec<Vec<usize>>,
    pub branch: Branch,
}

impl Partition {
    /// Cells disjoint, covering `0..k`, with sizes `(rho, alpha, ..., alpha)`.
    pub fn validate(&self, inst: &Instance) -> Result<()> {
        let p = inst.params();
        if self.q0.len() != p.residual_len {
            return Err(Error::MalformedQuery(format!(
                "Q0 has {} indices, expected {}",
                self.q0.len(),
                p.residual_len
            )));
        }
        if self.parts.len() != p.blocks || self.parts.iter().any(|b| b.len() != p.block_len) {
            return Err(Error::MalformedQuery(
                "block sizes do not match (alpha, beta)".into(),
            ));
        }
        let mut seen = vec![false; inst.k];
        for &i in self.q0.iter().chain(self.parts.iter().flatten()) {
            if i >= inst.k || seen[i] {
                return Err(Error::MalformedQuery(format!(
                    "index {} repeated or out of range",
                    i + 1
                )));
            }
            seen[i] = true;
        }
        Ok(())
    }
}

/// Probability of the spread branch under the given variant.
pub fn branch_probability(inst: &Instance, mutation: Mutation) -> Rational {
    let w = branch_weights(inst);
    match mutation {
        Mutation::Honest | Mutation::NoShuffle => w.spread_probability(),
        Mutation::AlwaysSpread => int(1),
        Mutation::DoubledSpreadWeight => {
            let s = &w.spread * int(2);
            &s / (&s + &w.bundle)
        }
    }
}

/// The shape of one branch: pick `q0_pick` of `q0_pool` on top of `q0_forced`, then
/// fill `Q1` around its forced members, then split the rest into labelled blocks.
struct Plan {
    q0_forced: Vec<usize>,
    q0_pool: Vec<usize>,
    q0_pick: usize,
}

fn plan(inst: &Instance, ws: &DemandSideInfo, branch: Branch) -> Plan {
    let rho = inst.params().residual_len;
    let in_ws = |i: &usize| ws.demand.contains(i) || ws.side.contains(i);
    match branch {
        Branch::Spread if inst.short_residual() => Plan {
            q0_forced: vec![],
            q0_pool: ws.demand.clone(),
            q0_pick: rho,
        },
        Branch::Spread => Plan {
            q0_forced: ws.demand.clone(),
            q0_pool: ws.side.clone(),
            q0_pick: rho - inst.demand,
        },
        Branch::Bundle => Plan {
            q0_forced: vec![],
            q0_pool: (0..inst.k).filter(|i| !in_ws(i)).collect(),
            q0_pick: rho,
        },
    }
}

/// Members `Q1` must contain once `Q0` is fixed.
fn q1_forced(inst: &Instance, ws: &DemandSideInfo, branch: Branch, q0: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = match branch {
        Branch::Spread if inst.short_residual() => ws
            .demand
            .iter()
            .filter(|i| !q0.contains(i))
            .chain(&ws.side)
            .copied()
            .collect(),
        // with rho >= D no block is distinguished; the leftover side indices are
        // scattered with everything else
        Branch::Spread => vec![],
        Branch::Bundle => ws.demand.iter().chain(&ws.side).copied().collect(),
    };
    out.sort_unstable();
    out
}

fn multinomial_blocks(n_blocks: usize, block_len: usize) -> BigInt {
    (0..n_blocks).fold(BigInt::one(), |acc, i| {
        acc * binom(((n_blocks - i) * block_len) as i64, block_len as i64)
    })
}

/// Number of equally likely labelled placements in a branch (independent of `(W, S)`).
pub fn placement_count(inst: &Instance, branch: Branch) -> BigInt {
    let p = inst.params();
    let ws = DemandSideInfo {
        demand: (0..inst.demand).collect(),
        side: (inst.demand..inst.demand + inst.side).collect(),
    };
    let pl = plan(inst, &ws, branch);
    let q0 = pl
        .q0_forced
        .iter()
        .chain(&pl.q0_pool[..pl.q0_pick])
        .copied()
        .collect::<Vec<_>>();
    let forced = q1_forced(inst, &ws, branch, &q0);
    let free = inst.k - q0.len() - forced.len();
    let fill = p.block_len - forced.len();
    binom(pl.q0_pool.len() as i64, pl.q0_pick as i64)
        * binom(free as i64, fill as i64)
        * multinomial_blocks(p.blocks - 1, p.block_len)
}

fn complement(k: usize, taken: &[&[usize]]) -> Vec<usize> {
    (0..k)
        .filter(|i| !taken.iter().any(|t| t.contains(i)))
        .collect()
}

fn merge_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
    v.sort_unstable();
    v
}

pub fn sample_partition(inst: &Instance, ws: &DemandSideInfo, rng: &mut ProtocolRng) -> Partition {
    sample_partition_with(inst, ws, rng, Mutation::Honest)
}

pub fn sample_partition_with(
    inst: &Instance,
    ws: &DemandSideInfo,
    rng: &mut ProtocolRng,
    mutation: Mutation,
) -> Partition {
    let p = inst.params();
    let branch = if rng.bernoulli(&branch_probability(inst, mutation)) {
        Branch::Spread
    } else {
        Branch::Bundle
    };
    let pl = plan(inst, ws, branch);
    let (picked, _) = rng.split_subset(&pl.q0_pool, pl.q0_pick);
    let q0 = merge_sorted(&pl.q0_forced, &picked);
    let forced = q1_forced(inst, ws, branch, &q0);
    let free = complement(inst.k, &[&q0, &forced]);
    let (fill, rest) = rng.split_subset(&free, p.block_len - forced.len());
    let q1 = merge_sorted(&forced, &fill);

    let mut rest = rest;
    rng.shuffle(&mut rest);
    let mut parts = vec![q1];
    for chunk in rest.chunks(p.block_len) {
        let mut c = chunk.to_vec();
        c.sort_unstable();
        parts.push(c);
    }
    Partition { q0, parts, branch }
}

/// Calls `visit` on every labelled placement of the branch. Each is equally likely
/// given the branch; there are `placement_count(inst, branch)` of them.
pub fn enumerate_placements(
    inst: &Instance,
    ws: &DemandSideInfo,
    branch: Branch,
    visit: &mut impl FnMut(&Partition),
) {
    let p: DerivedParams = inst.params();
    let pl = plan(inst, ws, branch);
    for picked in combinations(&pl.q0_pool, pl.q0_pick) {
        let q0 = merge_sorted(&pl.q0_forced, &picked);
        let forced = q1_forced(inst, ws, branch, &q0);
        let free = complement(inst.k, &[&q0, &forced]);
        for fill in combinations(&free, p.block_len - forced.len()) {
            let q1 = merge_sorted(&forced, &fill);
            let rest: Vec<usize> = free.iter().copied().filter(|i| !fill.contains(i)).collect();
            let mut partition = Partition {
                q0: q0.clone(),
                parts: vec![q1],
                branch,
            };
            split_rest(&rest, p.block_len, &mut partition, visit);
        }
    }
}

fn split_rest(
    rest: &[usize],
    block_len: usize,
    partition: &mut Partition,
    visit: &mut impl FnMut(&Partition),
) {
    if rest.is_empty() {
        visit(partition);
        return;
    }
    for block in combinations(rest, block_len) {
        let remaining: Vec<usize> = rest
            .iter()
            .copied()
            .filter(|i| !block.contains(i))
            .collect();
        partition.parts.push(block);
        split_rest(&remaining, block_len, partition, visit);
        partition.parts.pop();
    }
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;

    fn setup(k: usize, m: usize, d: usize, w: &[usize], s: &[usize]) -> (Instance, DemandSideInfo) {
        let inst = Instance::with_default_field(k, m, d).unwrap();
        let ws = DemandSideInfo::new(&inst, w, s).unwrap();
        (inst, ws)
    }

    fn collect(inst: &Instance, ws: &DemandSideInfo, branch: Branch) -> Vec<Partition> {
        let mut out = Vec::new();
        enumerate_placements(inst, ws, branch, &mut |p| out.push(p.clone()));
        out
    }

    #[test]
    fn bundle_is_forced_for_k4() {
        let (inst, ws) = setup(4, 1, 2, &[0, 1], &[2]);
        let all = collect(&inst, &ws, Branch::Bundle);
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].q0, vec![3]);
        assert_eq!(all[0].parts, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn long_residual_spread_pins_q0_to_demand() {
        let (inst, ws) = setup(11, 1, 2, &[0, 1], &[2]);
        let all = collect(&inst, &ws, Branch::Spread);
        assert!(all.iter().all(|p| p.q0 == vec![0, 1]));
        assert_eq!(
            all.len() as u64,
            u64::try_from(placement_count(&inst, Branch::Spread)).unwrap()
        );
    }

    #[test]
    fn zero_residual_branches_coincide() {
        let (inst, ws) = setup(6, 1, 2, &[1, 4], &[3]);
        let a: HashSet<_> = collect(&inst, &ws, Branch::Spread)
            .into_iter()
            .map(|p| p.parts)
            .collect();
        let b: HashSet<_> = collect(&inst, &ws, Branch::Bundle)
            .into_iter()
            .map(|p| p.parts)
            .collect();
        assert_eq!(a, b);
        assert!(a.iter().all(|parts| parts[0] == vec![1, 3, 4]));
    }

    #[test]
    fn enumeration_sizes_match_counts() {
        for (k, m, d) in [
            (4, 1, 2),
            (5, 1, 2),
            (7, 1, 2),
            (8, 1, 2),
            (6, 2, 2),
            (7, 2, 2),
            (9, 2, 3),
        ] {
            let inst = Instance::with_default_field(k, m, d).unwrap();
            for ws in DemandSideInfo::all(&inst).into_iter().take(5) {
                for branch in [Branch::Spread, Branch::Bundle] {
                    let all = collect(&inst, &ws, branch);
                    let count = u64::try_from(placement_count(&inst, branch)).unwrap();
                    assert_eq!(all.len() as u64, count, "{k} {m} {d} {branch:?}");
                    let distinct: HashSet<_> = all.iter().collect();
                    assert_eq!(distinct.len(), all.len());
                    for p in &all {
                        p.validate(&inst).unwrap();
                    }
                }
            }
        }
    }

    #[test]
    fn samples_respect_branch_constraints() {
        let mut rng = ProtocolRng::from_seed(5);
        for (k, m, d) in [
            (7, 1, 2),
            (8, 1, 2),
            (11, 1, 2),
            (9, 2, 3),
            (6, 1, 2),
            (7, 2, 2),
        ] {
            let inst = Instance::with_default_field(k, m, d).unwrap();
            for _ in 0..200 {
                let ws = DemandSideInfo::sample(&inst, &mut rng);
                let part = sample_partition(&inst, &ws, &mut rng);
                part.validate(&inst).unwrap();
                let mut bundle: Vec<usize> = ws.demand.iter().chain(&ws.side).copied().collect();
                bundle.sort();
                match part.branch {
                    Branch::Bundle => assert_eq!(part.parts[0], bundle),
                    Branch::Spread if inst.short_residual() => {
                        assert!(part.q0.iter().all(|i| ws.demand.contains(i)))
                    }
                    Branch::Spread => assert!(ws.demand.iter().all(|i| part.q0.contains(i))),
                }
            }
        }
    }

    #[test]
    fn always_spread_never_bundles() {
        let inst = Instance::with_default_field(7, 1, 2).unwrap();
        let mut rng = ProtocolRng::from_seed(11);
        let ws = DemandSideInfo::sample(&inst, &mut rng);
        for _ in 0..100 {
            let p = sample_partition_with(&inst, &ws, &mut rng, Mutation::AlwaysSpread);
            assert_eq!(p.branch, Branch::Spread);
        }
    }
}
