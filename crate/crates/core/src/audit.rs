//! Exact verification of the protocol by enumerating its randomness.
//!
//! The server's view is the query alone. Coefficient rows are the same for every
//! `(W, S)` and the block order is a uniform permutation, so the observable is the
//! canonical [`QueryKey`]: `Q0` plus the unordered collection of full blocks. All
//! probabilities are exact rationals; every comparison is an equality test.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{
    binom, ceil_div, combinations, fmt_ratio, int, items_of, mask_of, one_based, one_based_nested,
    opt_ratio_str, ratio, ratio_str, subsets_of_size, Rational,
};
use crate::ff::RowSpace;
use crate::gpcip::{
    branch_probability, branch_weights, coefficient_matrix, enumerate_placements, placement_count,
    Branch, BranchWeights, DemandSideInfo, Instance, Mutation, Partition, Query,
};
use crate::rng::ProtocolRng;

/// Default cap on enumerated placements before exact mode refuses to run.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Canonical observable of a query.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QueryKey {
    #[serde(with = "one_based")]
    pub q0: Vec<usize>,
    #[serde(with = "one_based_nested")]
    pub parts: Vec<Vec<usize>>,
}

impl QueryKey {
    pub fn new(mut q0: Vec<usize>, parts: Vec<Vec<usize>>) -> Self {
        q0.sort_unstable();
        let mut parts: Vec<Vec<usize>> = parts
            .into_iter()
            .map(|mut p| {
                p.sort_unstable();
                p
            })
            .collect();
        parts.sort();
        Self { q0, parts }
    }

    pub fn from_query(query: &Query) -> Self {
        Self::new(
            query.q0.indices.clone(),
            query.parts.iter().map(|b| b.indices.clone()).collect(),
        )
    }

    /// Key as the server would see it. Without the permutation the block order leaks,
    /// so `NoShuffle` keeps it.
    pub fn observe(partition: &Partition, mutation: Mutation) -> Self {
        if mutation == Mutation::NoShuffle {
            Self {
                q0: partition.q0.clone(),
                parts: partition.parts.clone(),
            }
        } else {
            Self::new(partition.q0.clone(), partition.parts.clone())
        }
    }

    pub fn to_query(&self, inst: &Instance) -> Query {
        Query::from_blocks(inst, self.q0.clone(), self.parts.clone())
    }
}

/// Uniform priors: `S` over all `M`-subsets, then `W` over `D`-subsets disjoint from `S`.
#[derive(Clone, Copy, Debug)]
pub struct Prior {
    k: usize,
    side: usize,
    demand: usize,
}

pub fn prior(inst: &Instance) -> Prior {
    Prior {
        k: inst.k,
        side: inst.side,
        demand: inst.demand,
    }
}

impl Prior {
    pub fn p_side(&self, side: &[usize]) -> Rational {
        if side.len() != self.side || side.iter().any(|&i| i >= self.k) {
            return int(0);
        }
        Rational::new(1.into(), binom(self.k as i64, self.side as i64))
    }

    pub fn p_demand_given_side(&self, demand: &[usize], side: &[usize]) -> Rational {
        let overlap = demand.iter().any(|i| side.contains(i));
        if overlap || demand.len() != self.demand || demand.iter().any(|&i| i >= self.k) {
            return int(0);
        }
        Rational::new(
            1.into(),
            binom((self.k - self.side) as i64, self.demand as i64),
        )
    }

    pub fn joint(&self, ws: &DemandSideInfo) -> Rational {
        self.p_side(&ws.side) * self.p_demand_given_side(&ws.demand, &ws.side)
    }
}

/// `P(key | W, S)` for one pair; masses sum to one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryDistribution {
    pub masses: BTreeMap<QueryKey, Rational>,
}

impl QueryDistribution {
    pub fn total(&self) -> Rational {
        self.masses.values().fold(int(0), |a, b| a + b)
    }
}

/// Total number of labelled placements an exact audit will visit.
pub fn enumeration_size(inst: &Instance) -> BigInt {
    let pairs = binom(inst.k as i64, inst.side as i64)
        * binom((inst.k - inst.side) as i64, inst.demand as i64);
    pairs * (placement_count(inst, Branch::Spread) + placement_count(inst, Branch::Bundle))
}

fn check_budget(inst: &Instance, budget: u64) -> Result<()> {
    let needed = enumeration_size(inst);
    if needed > BigInt::from(budget) {
        return Err(Error::BudgetExceeded {
            needed: needed.to_string(),
            budget,
        });
    }
    Ok(())
}

pub fn query_distribution(inst: &Instance, ws: &DemandSideInfo) -> Result<QueryDistribution> {
    query_distribution_with(inst, ws, Mutation::Honest, DEFAULT_BUDGET)
}

pub fn query_distribution_with(
    inst: &Instance,
    ws: &DemandSideInfo,
    mutation: Mutation,
    budget: u64,
) -> Result<QueryDistribution> {
    let per_pair = placement_count(inst, Branch::Spread) + placement_count(inst, Branch::Bundle);
    if per_pair > BigInt::from(budget) {
        return Err(Error::BudgetExceeded {
            needed: per_pair.to_string(),
            budget,
        });
    }
    let spread = branch_probability(inst, mutation);
    Ok(distribution_for(inst, ws, mutation, &spread))
}

fn distribution_for(
    inst: &Instance,
    ws: &DemandSideInfo,
    mutation: Mutation,
    spread_prob: &Rational,
) -> QueryDistribution {
    let mut masses = BTreeMap::new();
    for (branch, prob) in [
        (Branch::Spread, spread_prob.clone()),
        (Branch::Bundle, int(1) - spread_prob),
    ] {
        if prob.is_zero() {
            continue;
        }
        let mut counts: BTreeMap<QueryKey, u64> = BTreeMap::new();
        enumerate_placements(inst, ws, branch, &mut |p| {
            *counts.entry(QueryKey::observe(p, mutation)).or_default() += 1;
        });
        let leaf = prob / int(placement_count(inst, branch));
        for (key, c) in counts {
            let add = &leaf * int(c);
            *masses.entry(key).or_insert_with(|| int(0)) += add;
        }
    }
    QueryDistribution { masses }
}

/// Aggregated statistics of one observable key.
#[derive(Clone, Debug)]
pub struct KeyStats {
    /// `P(key)` under the prior.
    pub mass: Rational,
    /// `P(key, j ∈ W)` for every `j`.
    pub demand_mass: Vec<Rational>,
    /// Demand sets with positive probability given the key, as masks.
    pub support: BTreeSet<u64>,
}

/// The joint law of `(W, S, key)` for an instance, summarised per key.
#[derive(Clone, Debug)]
pub struct JointDistribution {
    pub instance: Instance,
    pub mutation: Mutation,
    pub keys: BTreeMap<QueryKey, KeyStats>,
}

impl JointDistribution {
    pub fn build(inst: &Instance, mutation: Mutation, budget: u64) -> Result<Self> {
        Self::build_with_spread(inst, mutation, &branch_probability(inst, mutation), budget)
    }

    /// Same as [`JointDistribution::build`] with an explicit spread-branch probability.
    pub fn build_with_spread(
        inst: &Instance,
        mutation: Mutation,
        spread: &Rational,
        budget: u64,
    ) -> Result<Self> {
        check_budget(inst, budget)?;
        let pri = prior(inst);
        let pairs = DemandSideInfo::all(inst);
        let per_pair: Vec<(DemandSideInfo, QueryDistribution)> = pairs
            .into_par_iter()
            .map(|ws| {
                let d = distribution_for(inst, &ws, mutation, spread);
                (ws, d)
            })
            .collect();

        let mut keys: BTreeMap<QueryKey, KeyStats> = BTreeMap::new();
        for (ws, dist) in per_pair {
            let weight = pri.joint(&ws);
            let wmask = mask_of(&ws.demand);
            for (key, p) in dist.masses {
                let mass = &weight * p;
                let entry = keys.entry(key).or_insert_with(|| KeyStats {
                    mass: int(0),
                    demand_mass: vec![int(0); inst.k],
                    support: BTreeSet::new(),
                });
                for &j in &ws.demand {
                    entry.demand_mass[j] += &mass;
                }
                entry.mass += mass;
                entry.support.insert(wmask);
            }
        }
        Ok(Self {
            instance: *inst,
            mutation,
            keys,
        })
    }

    pub fn posterior(&self, key: &QueryKey) -> Result<PosteriorReport> {
        let stats = self.keys.get(key).ok_or(Error::UnreachableKey)?;
        if stats.mass.is_zero() {
            return Err(Error::UnreachableKey);
        }
        Ok(PosteriorReport {
            values: stats.demand_mass.iter().map(|m| m / &stats.mass).collect(),
        })
    }
}

/// `P(j ∈ W | key)` for every `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PosteriorReport {
    pub values: Vec<Rational>,
}

impl PosteriorReport {
    pub fn sum(&self) -> Rational {
        self.values.iter().fold(int(0), |a, b| a + b)
    }
}

/// Builds the joint distribution and returns the posterior for one key.
pub fn posterior(inst: &Instance, key: &QueryKey) -> Result<PosteriorReport> {
    JointDistribution::build(inst, Mutation::Honest, DEFAULT_BUDGET)?.posterior(key)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrivacyViolation {
    pub key: QueryKey,
    /// 1-based message index.
    pub j: usize,
    #[serde(with = "ratio_str")]
    pub posterior: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrivacyReport {
    pub instance: Instance,
    pub keys_checked: usize,
    pub pass: bool,
    pub violations: Vec<PrivacyViolation>,
    /// Largest `|P(j ∈ W | key) - D/K|`.
    #[serde(with = "ratio_str")]
    pub worst_violation: Rational,
}

pub fn audit_individual_privacy(inst: &Instance) -> Result<PrivacyReport> {
    let joint = JointDistribution::build(inst, Mutation::Honest, DEFAULT_BUDGET)?;
    Ok(privacy_report(&joint))
}

pub fn privacy_report(joint: &JointDistribution) -> PrivacyReport {
    let inst = &joint.instance;
    let target = ratio(inst.demand as i64, inst.k as i64);
    let mut violations = Vec::new();
    let mut worst = int(0);
    for key in joint.keys.keys() {
        let post = joint
            .posterior(key)
            .expect("every stored key has positive mass");
        for (j, p) in post.values.into_iter().enumerate() {
            if p != target {
                let gap = (&p - &target).abs();
                if gap > worst {
                    worst = gap;
                }
                violations.push(PrivacyViolation {
                    key: key.clone(),
                    j: j + 1,
                    posterior: p,
                });
            }
        }
    }
    PrivacyReport {
        instance: *inst,
        keys_checked: joint.keys.len(),
        pass: violations.is_empty(),
        violations,
        worst_violation: worst,
    }
}

/// Both sides of the balance identity that makes the residual-block and full-block
/// posteriors agree, evaluated from the closed-form conditional query probabilities.
///
/// For `rho < D` the residual-side sum is
/// `a C(alpha, M+rho) C(M+rho, M) beta! / (C(D, rho) C(K-alpha, rho) P')` and the
/// block-side sum is `C(alpha-1, M) (beta-1)! (b / P + a (D-rho)/D / (C(K-alpha, rho) P'))`,
/// with `P = prod_{i=1}^{beta-1} C(K - i alpha, alpha)`,
/// `P' = prod_{i=1}^{beta-1} C(K - i alpha - rho, alpha)` and `a`, `b` the normalised
/// branch probabilities. For `rho >= D` the sides are
/// `a C(rho, D) C(K-rho, alpha-rho) beta! / (C(M, rho-D) prod_{i=0}^{beta-1} C(K - i alpha - rho, alpha))`
/// and `b C(alpha-1, M) (beta-1)! / P`.
pub fn branch_balance_sides(inst: &Instance, weights: &BranchWeights) -> (Rational, Rational) {
    let k = inst.k as i64;
    let m = inst.side as i64;
    let d = inst.demand as i64;
    let alpha = m + d;
    let beta = k / alpha;
    let rho = k - alpha * beta;
    let a = weights.spread_probability();
    let b = weights.bundle_probability();
    let fact = |n: i64| int((1..=n).fold(BigInt::from(1), |acc, i| acc * i));
    let prod = |from: i64, shift: i64| {
        int((from..beta).fold(BigInt::from(1), |acc, i| {
            acc * binom(k - i * alpha - shift, alpha)
        }))
    };
    let p_full = prod(1, 0);

    if rho < d {
        let p_shift = prod(1, rho);
        let residual = &a * int(binom(alpha, m + rho) * binom(m + rho, m)) * fact(beta)
            / (int(binom(d, rho) * binom(k - alpha, rho)) * &p_shift);
        let block = int(binom(alpha - 1, m))
            * fact(beta - 1)
            * (&b / &p_full + &a * ratio(d - rho, d) / (int(binom(k - alpha, rho)) * &p_shift));
        (residual, block)
    } else {
        let p0 = prod(0, rho);
        let residual = &a * int(binom(rho, d) * binom(k - rho, alpha - rho)) * fact(beta)
            / (int(binom(m, rho - d)) * p0);
        let block = &b * int(binom(alpha - 1, m)) * fact(beta - 1) / p_full;
        (residual, block)
    }
}

pub fn verify_branch_balance(inst: &Instance) -> bool {
    verify_branch_balance_with(inst, &branch_weights(inst))
}

pub fn verify_branch_balance_with(inst: &Instance, weights: &BranchWeights) -> bool {
    let (lhs, rhs) = branch_balance_sides(inst, weights);
    lhs == rhs
}

/// Smallest `J` that meets every demand set still possible under `key`.
pub fn min_certain_cover(joint: &JointDistribution, key: &QueryKey) -> Result<(usize, Vec<usize>)> {
    let stats = joint.keys.get(key).ok_or(Error::UnreachableKey)?;
    let support: Vec<u64> = stats.support.iter().copied().collect();
    let k = joint.instance.k;
    for size in 0..=k {
        for j in subsets_of_size(k, size) {
            if support.iter().all(|w| w & j != 0) {
                return Ok((size, items_of(j)));
            }
        }
    }
    unreachable!("J = [K] meets every nonempty demand set")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportViolation {
    pub key: QueryKey,
    pub size: usize,
    #[serde(with = "one_based")]
    pub cover: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportReport {
    pub instance: Instance,
    pub keys_checked: usize,
    pub bound: usize,
    pub min_cover_seen: usize,
    pub pass: bool,
    pub violations: Vec<SupportViolation>,
}

/// Checks `min_certain_cover >= ceil(K/D)` on every reachable key.
pub fn audit_support(joint: &JointDistribution) -> SupportReport {
    let inst = &joint.instance;
    let bound = ceil_div(inst.k, inst.demand);
    let mut min_seen = usize::MAX;
    let mut violations = Vec::new();
    for key in joint.keys.keys() {
        let (size, cover) = min_certain_cover(joint, key).expect("key is reachable");
        min_seen = min_seen.min(size);
        if size < bound {
            violations.push(SupportViolation {
                key: key.clone(),
                size,
                cover,
            });
        }
    }
    SupportReport {
        instance: *inst,
        keys_checked: joint.keys.len(),
        bound,
        min_cover_seen: min_seen,
        pass: violations.is_empty(),
        violations,
    }
}

/// True iff every `X_j`, `j ∈ W*`, is determined by the answer to `query` together
/// with `X_{S*}`. Sizes are taken from the query: `|W*| = D`, `|S*| = alpha - D`.
pub fn decodability_check(
    query: &Query,
    side_star: &[usize],
    demand_star: &[usize],
) -> Result<bool> {
    let side_len = query.block_len - query.demand;
    if side_star.len() != side_len || demand_star.len() != query.demand {
        return Err(Error::InvalidSets(format!(
            "need |S*| = {side_len} and |W*| = {}, got {} and {}",
            query.demand,
            side_star.len(),
            demand_star.len()
        )));
    }
    if side_star.iter().chain(demand_star).any(|&i| i >= query.k)
        || side_star.iter().any(|i| demand_star.contains(i))
    {
        return Err(Error::InvalidSets(
            "S* and W* must be disjoint subsets of [K]".into(),
        ));
    }
    let space = augmented_space(query, side_star)?;
    Ok(demand_star.iter().all(|&j| space.contains_unit(j)))
}

fn augmented_space(query: &Query, known: &[usize]) -> Result<RowSpace> {
    let mut space = coefficient_matrix(query)?.row_space();
    for &i in known {
        space.insert_unit(i);
    }
    Ok(space)
}

/// Indices `j` for which no `(W* ∋ j, S*)` is decodable from `query`.
///
/// For each `S*` the decodable indices form a set `Dec(S*)`; `j` is fine iff some
/// `Dec(S*) \ S*` contains `j` and has at least `D` elements.
pub fn undecodable_indices(query: &Query) -> Result<Vec<usize>> {
    let side_len = query.block_len - query.demand;
    let all: Vec<usize> = (0..query.k).collect();
    let mut ok = vec![false; query.k];
    for side in combinations(&all, side_len) {
        let space = augmented_space(query, &side)?;
        let dec: Vec<usize> = all
            .iter()
            .copied()
            .filter(|i| !side.contains(i) && space.contains_unit(*i))
            .collect();
        if dec.len() >= query.demand {
            for j in dec {
                ok[j] = true;
            }
        }
    }
    Ok(all.into_iter().filter(|&j| !ok[j]).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodabilityFailure {
    pub key: QueryKey,
    #[serde(with = "one_based")]
    pub indices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodabilityReport {
    pub instance: Instance,
    pub keys_checked: usize,
    pub pass: bool,
    pub failures: Vec<DecodabilityFailure>,
}

pub fn decodability_audit(inst: &Instance) -> Result<DecodabilityReport> {
    let joint = JointDistribution::build(inst, Mutation::Honest, DEFAULT_BUDGET)?;
    decodability_report(&joint)
}

pub fn decodability_report(joint: &JointDistribution) -> Result<DecodabilityReport> {
    let inst = &joint.instance;
    let keys: Vec<&QueryKey> = joint.keys.keys().collect();
    let results: Vec<Result<Vec<usize>>> = keys
        .par_iter()
        .map(|key| undecodable_indices(&key.to_query(inst)))
        .collect();
    let mut failures = Vec::new();
    for (key, r) in keys.into_iter().zip(results) {
        let bad = r?;
        if !bad.is_empty() {
            failures.push(DecodabilityFailure {
                key: key.clone(),
                indices: bad,
            });
        }
    }
    Ok(DecodabilityReport {
        instance: *inst,
        keys_checked: joint.keys.len(),
        pass: failures.is_empty(),
        failures,
    })
}

/// Binomial estimate of `P(j ∈ W | class of j in the query)` for one position class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassEstimate {
    pub class: String,
    pub trials: u64,
    pub hits: u64,
    pub estimate: f64,
    #[serde(with = "ratio_str")]
    pub expected: Rational,
    pub sigma: f64,
    pub within_3_sigma: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub instance: Instance,
    pub samples: u64,
    pub classes: Vec<ClassEstimate>,
    pub pass: bool,
}

/// Statistical smoke test for instances too large to enumerate.
///
/// Each sample draws `(W, S)` from the prior, runs Step 1 and 2, picks one index `j`
/// uniformly and records whether `j ∈ W`, split by whether `j` sits in `Q0` or in a
/// full block. Exact privacy implies both frequencies are `D/K`.
pub fn monte_carlo_privacy(inst: &Instance, samples: u64, seed: u64) -> MonteCarloReport {
    let mut rng = ProtocolRng::from_seed(seed);
    let mut trials = [0u64; 2];
    let mut hits = [0u64; 2];
    for _ in 0..samples {
        let ws = DemandSideInfo::sample(inst, &mut rng);
        let part = crate::gpcip::sample_partition(inst, &ws, &mut rng);
        let j = rng.below(inst.k as u64) as usize;
        let class = usize::from(!part.q0.contains(&j));
        trials[class] += 1;
        if ws.demand.contains(&j) {
            hits[class] += 1;
        }
    }
    let expected = ratio(inst.demand as i64, inst.k as i64);
    let p = expected.to_f64().unwrap_or(0.0);
    let classes: Vec<ClassEstimate> = ["residual", "block"]
        .iter()
        .enumerate()
        .filter(|(c, _)| trials[*c] > 0)
        .map(|(c, name)| {
            let n = trials[c] as f64;
            let estimate = hits[c] as f64 / n;
            let sigma = (p * (1.0 - p) / n).sqrt();
            ClassEstimate {
                class: name.to_string(),
                trials: trials[c],
                hits: hits[c],
                estimate,
                expected: expected.clone(),
                sigma,
                within_3_sigma: (estimate - p).abs() <= 3.0 * sigma,
            }
        })
        .collect();
    let pass = classes.iter().all(|c| c.within_3_sigma);
    MonteCarloReport {
        instance: *inst,
        samples,
        classes,
        pass,
    }
}

/// Exact rate summary for one instance; the measured side comes from seeded runs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RateRow {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "M")]
    pub side: usize,
    #[serde(rename = "D")]
    pub demand: usize,
    #[serde(with = "ratio_str")]
    pub achievable: Rational,
    #[serde(with = "opt_ratio_str")]
    pub measured: Option<Rational>,
    #[serde(rename = "match")]
    pub matches: bool,
}

/// Runs `seeds` seeded protocol instances with random `(W, S)` and compares `D / rank`
/// with the closed-form rate. `measured` is `None` if runs disagree with each other.
pub fn rate_row(inst: &Instance, seeds: u64, base_seed: u64) -> Result<RateRow> {
    let achievable = crate::gpcip::achievable_rate(inst.k, inst.side, inst.demand)?;
    let mut seen: Option<Rational> = None;
    let mut consistent = true;
    for s in 0..seeds {
        let mut rng = ProtocolRng::from_seed(base_seed.wrapping_add(s));
        let ws = DemandSideInfo::sample(inst, &mut rng);
        let part = crate::gpcip::sample_partition(inst, &ws, &mut rng);
        let query = crate::gpcip::build_query(&part, inst, &mut rng);
        let r = crate::gpcip::measured_rate(&query)?;
        match &seen {
            None => seen = Some(r),
            Some(prev) if *prev != r => consistent = false,
            _ => {}
        }
    }
    let measured = if consistent { seen } else { None };
    let matches = measured.as_ref() == Some(&achievable);
    Ok(RateRow {
        k: inst.k,
        side: inst.side,
        demand: inst.demand,
        achievable,
        measured,
        matches,
    })
}

pub fn describe_key(key: &QueryKey) -> String {
    let fmt = |v: &[usize]| {
        let inner: Vec<String> = v.iter().map(|i| (i + 1).to_string()).collect();
        format!("{{{}}}", inner.join(","))
    };
    let parts: Vec<String> = key.parts.iter().map(|p| fmt(p)).collect();
    format!("Q0={} parts=[{}]", fmt(&key.q0), parts.join(","))
}

pub fn fmt_posterior(report: &PosteriorReport) -> Vec<String> {
    report.values.iter().map(fmt_ratio).collect()
}
