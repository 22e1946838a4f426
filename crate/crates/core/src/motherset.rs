//! Directed graphs, mother vertex sets and the D-graph mother-set bound scan.
//!
//! Graphs are small (at most 63 nodes) and stored as out-neighbour bitmasks.
//! Minimum mother vertex sets are found by brute force over subsets in increasing
//! size, so the first hit is a minimum-cardinality witness.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{ceil_div, items_of, subsets_of_size};
use crate::rng::ProtocolRng;

/// Largest node count accepted by the brute-force mother-set search.
pub const MOTHER_SET_BUDGET: usize = 20;

/// Default cap on the number of graphs an exhaustive scan may visit.
pub const DEFAULT_SCAN_BUDGET: u64 = 10_000_000;

/// Loop-free digraph without parallel edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Digraph {
    n: usize,
    out: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct DigraphWire {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl Serialize for Digraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let edges = self
            .edges()
            .into_iter()
            .map(|(u, v)| [u + 1, v + 1])
            .collect();
        DigraphWire { n: self.n, edges }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Digraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = DigraphWire::deserialize(d)?;
        let mut edges = Vec::with_capacity(wire.edges.len());
        for [u, v] in wire.edges {
            if u == 0 || v == 0 {
                return Err(serde::de::Error::custom("node labels are 1-based"));
            }
            edges.push((u - 1, v - 1));
        }
        Digraph::new(wire.n, &edges).map_err(serde::de::Error::custom)
    }
}

impl Digraph {
    /// Builds a graph from 0-based edges; rejects self-loops and repeated edges.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n > 63 {
            return Err(Error::InvalidGraph(format!(
                "{n} nodes exceeds the limit of 63"
            )));
        }
        let mut out = vec![0u64; n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) out of range",
                    u + 1,
                    v + 1
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at node {}", u + 1)));
            }
            if out[u] >> v & 1 == 1 {
                return Err(Error::InvalidGraph(format!(
                    "parallel edge ({}, {})",
                    u + 1,
                    v + 1
                )));
            }
            out[u] |= 1 << v;
        }
        Ok(Self { n, out })
    }

    pub fn empty(n: usize) -> Self {
        Self { n, out: vec![0; n] }
    }

    pub fn complete(n: usize) -> Self {
        let full = full_mask(n);
        Self {
            n,
            out: (0..n).map(|u| full & !(1 << u)).collect(),
        }
    }

    /// Graph number `code` in the enumeration of all labelled digraphs on `n` nodes:
    /// bit `t` is the `t`-th ordered pair `(u, v)`, `u != v`, in row-major order.
    pub fn from_code(n: usize, code: u64) -> Self {
        let mut out = vec![0u64; n];
        let mut t = 0;
        for (u, row) in out.iter_mut().enumerate() {
            for v in (0..n).filter(|&v| v != u) {
                if code >> t & 1 == 1 {
                    *row |= 1 << v;
                }
                t += 1;
            }
        }
        Self { n, out }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serialisation cannot fail")
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn out_mask(&self, u: usize) -> u64 {
        self.out[u]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.out[u] >> v & 1 == 1
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|u| items_of(self.out[u]).into_iter().map(move |v| (u, v)))
            .collect()
    }

    pub fn out_degree(&self, u: usize) -> usize {
        self.out[u].count_ones() as usize
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.out.iter().filter(|&&row| row >> v & 1 == 1).count()
    }

    pub fn transpose(&self) -> Self {
        let mut out = vec![0u64; self.n];
        for (u, &row) in self.out.iter().enumerate() {
            for v in items_of(row) {
                out[v] |= 1 << u;
            }
        }
        Self { n: self.n, out }
    }

    /// Nodes reachable from `v`, including `v`.
    pub fn reach_set(&self, v: usize) -> Vec<usize> {
        items_of(self.reach_mask(v))
    }

    pub fn reach_mask(&self, v: usize) -> u64 {
        let mut seen = 1u64 << v;
        let mut frontier = seen;
        while frontier != 0 {
            let u = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let fresh = self.out[u] & !seen;
            seen |= fresh;
            frontier |= fresh;
        }
        seen
    }

    /// Reach masks for every node by direct search.
    pub fn reach_masks(&self) -> Vec<u64> {
        (0..self.n).map(|v| self.reach_mask(v)).collect()
    }
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Strongly connected components in reverse topological order (sinks first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Condensation {
    /// Component index of every node.
    pub component_of: Vec<usize>,
    /// Node mask of every component.
    pub members: Vec<u64>,
    /// Successor components of every component.
    pub successors: Vec<Vec<usize>>,
}

impl Condensation {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Reach masks of every node, computed on the DAG.
    pub fn reach_masks(&self) -> Vec<u64> {
        let mut comp_reach = vec![0u64; self.len()];
        // successors always have smaller indices
        for c in 0..self.len() {
            let mut r = self.members[c];
            for &s in &self.successors[c] {
                r |= comp_reach[s];
            }
            comp_reach[c] = r;
        }
        self.component_of.iter().map(|&c| comp_reach[c]).collect()
    }
}

/// Tarjan's algorithm, iterative.
pub fn scc_condensation(g: &Digraph) -> Condensation {
    const UNSEEN: usize = usize::MAX;
    let n = g.n;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut component_of = vec![UNSEEN; n];
    let mut members = Vec::new();
    let mut next = 0;

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        // (node, remaining successors)
        let mut call: Vec<(usize, u64)> = vec![(root, g.out[root])];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (u, ref mut rest)) = call.last_mut() {
            if *rest != 0 {
                let v = rest.trailing_zeros() as usize;
                *rest &= *rest - 1;
                if index[v] == UNSEEN {
                    index[v] = next;
                    low[v] = next;
                    next += 1;
                    stack.push(v);
                    on_stack[v] = true;
                    call.push((v, g.out[v]));
                } else if on_stack[v] {
                    low[u] = low[u].min(index[v]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[u]);
            }
            if low[u] == index[u] {
                let c = members.len();
                let mut mask = 0u64;
                loop {
                    let w = stack.pop().expect("u is on the stack");
                    on_stack[w] = false;
                    component_of[w] = c;
                    mask |= 1 << w;
                    if w == u {
                        break;
                    }
                }
                members.push(mask);
            }
        }
    }

    let mut successors = vec![Vec::new(); members.len()];
    for (u, &cu) in component_of.iter().enumerate() {
        for v in items_of(g.out[u]) {
            let cv = component_of[v];
            if cv != cu && !successors[cu].contains(&cv) {
                successors[cu].push(cv);
            }
        }
    }
    for s in &mut successors {
        s.sort_unstable();
    }
    Condensation {
        component_of,
        members,
        successors,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MotherSetVariant {
    /// Only nodes with the relevant degree nonzero must be reached.
    RestrictedTarget,
    /// Every node must be covered by the reach sets of the chosen nodes.
    FullCover,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MotherSetResult {
    pub size: usize,
    #[serde(with = "crate::exact::one_based")]
    pub witness: Vec<usize>,
    pub variant: MotherSetVariant,
}

fn min_reaching_set(
    g: &Digraph,
    targets: u64,
    variant: MotherSetVariant,
) -> Result<MotherSetResult> {
    if g.n > MOTHER_SET_BUDGET {
        return Err(Error::InvalidGraph(format!(
            "mother-set search is limited to {MOTHER_SET_BUDGET} nodes, got {}",
            g.n
        )));
    }
    let reach = g.reach_masks();
    let (size, mask) = min_reaching_mask(g.n, &reach, targets);
    Ok(MotherSetResult {
        size,
        witness: items_of(mask),
        variant,
    })
}

/// Smallest `I` with every target outside `I` inside the union of reach sets of `I`.
fn min_reaching_mask(n: usize, reach: &[u64], targets: u64) -> (usize, u64) {
    for size in 0..=n {
        for set in subsets_of_size(n, size) {
            let mut covered = set;
            let mut rest = set;
            while rest != 0 {
                covered |= reach[rest.trailing_zeros() as usize];
                rest &= rest - 1;
            }
            if targets & !covered == 0 {
                return (size, set);
            }
        }
    }
    unreachable!("the full node set reaches every target")
}

fn targets(g: &Digraph, variant: MotherSetVariant, degree_of: impl Fn(usize) -> usize) -> u64 {
    match variant {
        MotherSetVariant::FullCover => full_mask(g.n),
        MotherSetVariant::RestrictedTarget => (0..g.n)
            .filter(|&u| degree_of(u) != 0)
            .fold(0, |m, u| m | 1 << u),
    }
}

/// Minimum external mother vertex set; restricted targets are nodes with out-degree > 0.
pub fn external_mother_set(g: &Digraph, variant: MotherSetVariant) -> Result<MotherSetResult> {
    min_reaching_set(g, targets(g, variant, |u| g.out_degree(u)), variant)
}

/// Minimum internal mother vertex set; restricted targets are nodes with in-degree > 0.
/// The full-cover variant coincides with [`external_mother_set`].
pub fn internal_mother_set(g: &Digraph, variant: MotherSetVariant) -> Result<MotherSetResult> {
    min_reaching_set(g, targets(g, variant, |u| g.in_degree(u)), variant)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DGraphCondition {
    /// Every node has an incoming edge.
    InDegree,
    /// Every out-degree is zero or at least `D`.
    OutDegree,
    /// The transpose needs at least `ceil(n/D)` nodes to reach all nodes with in-degree > 0.
    InternalMotherSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DGraphReport {
    pub ok: bool,
    pub failed_conditions: Vec<DGraphCondition>,
}

pub fn is_d_graph(g: &Digraph, demand: usize) -> DGraphReport {
    let mut failed = Vec::new();
    if (0..g.n).any(|v| g.in_degree(v) == 0) {
        failed.push(DGraphCondition::InDegree);
    }
    if (0..g.n).any(|u| (1..demand).contains(&g.out_degree(u))) {
        failed.push(DGraphCondition::OutDegree);
    }
    let t = g.transpose();
    let mu = internal_mother_set(&t, MotherSetVariant::RestrictedTarget)
        .map(|r| r.size)
        .unwrap_or(usize::MAX);
    if mu < ceil_div(g.n, demand) {
        failed.push(DGraphCondition::InternalMotherSet);
    }
    DGraphReport {
        ok: failed.is_empty(),
        failed_conditions: failed,
    }
}

/// `Some(external_mother_set restricted)` iff `g` is a D-graph; cheap degree tests run first.
fn d_graph_mother_set(g: &Digraph, demand: usize) -> Option<usize> {
    let n = g.n;
    let mut has_in = 0u64;
    for &row in &g.out {
        let d = row.count_ones() as usize;
        if d != 0 && d < demand {
            return None;
        }
        has_in |= row;
    }
    if has_in != full_mask(n) {
        return None;
    }
    // in-degree > 0 in the transpose is out-degree > 0 in g
    let ext_targets = (0..n)
        .filter(|&u| g.out[u] != 0)
        .fold(0u64, |m, u| m | 1 << u);
    let (transposed_cover, _) = min_reaching_mask(n, &g.transpose().reach_masks(), ext_targets);
    if transposed_cover < ceil_div(n, demand) {
        return None;
    }
    Some(min_reaching_mask(n, &g.reach_masks(), ext_targets).0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum ScanMode {
    Exhaustive,
    Sample { count: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DGraphScanReport {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "D")]
    pub demand: usize,
    #[serde(flatten)]
    pub mode: ScanMode,
    pub graphs_scanned: u64,
    pub d_graphs_found: u64,
    /// `None` when no D-graph was found.
    #[serde(rename = "max_mu_ext")]
    pub max_mother_set: Option<usize>,
    /// `floor(K / (D + 1))`.
    pub bound: usize,
    pub counterexamples: Vec<Digraph>,
}

impl DGraphScanReport {
    pub fn pass(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

#[derive(Default)]
struct ScanTally {
    scanned: u64,
    found: u64,
    max_mu: Option<usize>,
    counterexamples: Vec<Digraph>,
}

impl ScanTally {
    fn visit(&mut self, g: Digraph, demand: usize, bound: usize) {
        self.scanned += 1;
        if let Some(mu) = d_graph_mother_set(&g, demand) {
            self.found += 1;
            self.max_mu = self.max_mu.max(Some(mu));
            if mu > bound {
                self.counterexamples.push(g);
            }
        }
    }

    fn merge(mut self, other: ScanTally) -> ScanTally {
        self.scanned += other.scanned;
        self.found += other.found;
        self.max_mu = self.max_mu.max(other.max_mu);
        self.counterexamples.extend(other.counterexamples);
        self
    }
}

const SHARD: u64 = 1 << 14;

pub fn scan_d_graphs(k: usize, demand: usize, mode: ScanMode) -> Result<DGraphScanReport> {
    scan_d_graphs_with_budget(k, demand, mode, DEFAULT_SCAN_BUDGET)
}

pub fn scan_d_graphs_with_budget(
    k: usize,
    demand: usize,
    mode: ScanMode,
    budget: u64,
) -> Result<DGraphScanReport> {
    if k == 0 || k > MOTHER_SET_BUDGET {
        return Err(Error::InvalidGraph(format!(
            "K must be in 1..={MOTHER_SET_BUDGET}"
        )));
    }
    if demand == 0 {
        return Err(Error::InvalidGraph("D must be positive".into()));
    }
    let bound = k / (demand + 1);
    let pairs = (k * (k - 1)) as u32;
    let tally = match mode {
        ScanMode::Exhaustive => {
            if pairs >= 64 || (1u64 << pairs) > budget {
                let needed = if pairs >= 64 {
                    format!("2^{pairs}")
                } else {
                    (1u64 << pairs).to_string()
                };
                return Err(Error::BudgetExceeded { needed, budget });
            }
            let total = 1u64 << pairs;
            let shards = total.div_ceil(SHARD);
            (0..shards)
                .into_par_iter()
                .map(|s| {
                    let mut t = ScanTally::default();
                    for code in s * SHARD..((s + 1) * SHARD).min(total) {
                        t.visit(Digraph::from_code(k, code), demand, bound);
                    }
                    t
                })
                .collect::<Vec<_>>()
                .into_iter()
                .fold(ScanTally::default(), ScanTally::merge)
        }
        ScanMode::Sample { count, seed } => {
            let mut rng = ProtocolRng::from_seed(seed);
            let edge_mask = if pairs >= 64 {
                u64::MAX
            } else {
                (1u64 << pairs) - 1
            };
            let mut tally = ScanTally::default();
            let mut left = count;
            while left > 0 {
                let batch = left.min(SHARD * 16);
                // each bit of a fresh word is an independent fair coin
                let codes: Vec<u64> = (0..batch).map(|_| rng.next_u64() & edge_mask).collect();
                let part = codes
                    .par_chunks(SHARD as usize)
                    .map(|chunk| {
                        let mut t = ScanTally::default();
                        for &code in chunk {
                            t.visit(Digraph::from_code(k, code), demand, bound);
                        }
                        t
                    })
                    .collect::<Vec<_>>()
                    .into_iter()
                    .fold(ScanTally::default(), ScanTally::merge);
                tally = tally.merge(part);
                left -= batch;
            }
            tally
        }
    };
    Ok(DGraphScanReport {
        k,
        demand,
        mode,
        graphs_scanned: tally.scanned,
        d_graphs_found: tally.found,
        max_mother_set: tally.max_mu,
        bound,
        counterexamples: tally.counterexamples,
    })
}

/// Uniform random digraph: every ordered pair is an edge with probability 1/2.
pub fn random_digraph(n: usize, rng: &mut ProtocolRng) -> Digraph {
    let pairs = n * n.saturating_sub(1);
    assert!(pairs <= 64, "random_digraph supports at most 8 nodes");
    let mask = if pairs == 64 {
        u64::MAX
    } else {
        (1u64 << pairs) - 1
    };
    Digraph::from_code(n, rng.next_u64() & mask)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize, edges: &[(usize, usize)]) -> Digraph {
        let e: Vec<_> = edges.iter().map(|&(u, v)| (u - 1, v - 1)).collect();
        Digraph::new(n, &e).unwrap()
    }

    #[test]
    fn construction_rules() {
        assert!(Digraph::new(3, &[(0, 0)]).is_err());
        assert!(Digraph::new(3, &[(0, 1), (0, 1)]).is_err());
        assert!(Digraph::new(3, &[(0, 3)]).is_err());
        let c = Digraph::complete(3);
        assert_eq!(c.edges().len(), 6);
        assert_eq!(Digraph::from_code(3, 0b111111), c);
    }

    #[test]
    fn transpose_examples() {
        assert_eq!(g(2, &[(1, 2)]).transpose(), g(2, &[(2, 1)]));
        let cyc = g(3, &[(1, 2), (2, 3), (3, 1)]);
        assert_eq!(cyc.transpose(), g(3, &[(1, 3), (3, 2), (2, 1)]));
        assert_eq!(cyc.transpose().transpose(), cyc);
    }

    #[test]
    fn reach_examples() {
        let path = g(3, &[(1, 2), (2, 3)]);
        assert_eq!(path.reach_set(0), vec![0, 1, 2]);
        assert_eq!(Digraph::empty(3).reach_set(1), vec![1]);
        let c = Digraph::complete(3);
        assert!((0..3).all(|v| c.reach_set(v) == vec![0, 1, 2]));
    }

    #[test]
    fn condensation_examples() {
        let cyc = g(3, &[(1, 2), (2, 3), (3, 1)]);
        assert_eq!(scc_condensation(&cyc).len(), 1);
        let path = g(3, &[(1, 2), (2, 3)]);
        let c = scc_condensation(&path);
        assert_eq!(c.len(), 3);
        assert_eq!(c.reach_masks(), path.reach_masks());
        // sinks come first
        assert_eq!(c.members[0], 0b100);
        assert_eq!(c.successors[2], vec![1]);
    }

    #[test]
    fn mother_set_examples() {
        use MotherSetVariant::*;
        let c = Digraph::complete(3);
        assert_eq!(external_mother_set(&c, RestrictedTarget).unwrap().size, 1);
        assert_eq!(external_mother_set(&c, FullCover).unwrap().size, 1);
        let e = Digraph::empty(3);
        assert_eq!(external_mother_set(&e, RestrictedTarget).unwrap().size, 0);
        assert_eq!(external_mother_set(&e, FullCover).unwrap().size, 3);
        let cyc = g(3, &[(1, 2), (2, 3), (3, 1)]);
        assert_eq!(external_mother_set(&cyc, RestrictedTarget).unwrap().size, 1);

        let path = g(3, &[(1, 2), (2, 3)]);
        let r = internal_mother_set(&path, RestrictedTarget).unwrap();
        assert_eq!((r.size, r.witness.clone()), (1, vec![0]));
        assert_eq!(internal_mother_set(&e, RestrictedTarget).unwrap().size, 0);
        assert_eq!(internal_mother_set(&c, RestrictedTarget).unwrap().size, 1);
        assert!(external_mother_set(&Digraph::empty(21), FullCover).is_err());
    }

    #[test]
    fn d_graph_examples() {
        let r = is_d_graph(&Digraph::complete(3), 2);
        assert_eq!(
            r.failed_conditions,
            vec![DGraphCondition::InternalMotherSet]
        );
        // a=1, b=2, c=3
        let r = is_d_graph(&g(3, &[(1, 2), (1, 3), (2, 1), (2, 3)]), 2);
        assert_eq!(
            r.failed_conditions,
            vec![DGraphCondition::InternalMotherSet]
        );
        assert!(is_d_graph(&g(3, &[(1, 2), (1, 3)]), 2)
            .failed_conditions
            .contains(&DGraphCondition::InDegree));
        assert!(is_d_graph(&g(3, &[(1, 2), (2, 3), (3, 1)]), 2)
            .failed_conditions
            .contains(&DGraphCondition::OutDegree));
    }

    #[test]
    fn fast_filter_matches_report() {
        for code in 0..(1u64 << 12) {
            let graph = Digraph::from_code(4, code);
            let fast = d_graph_mother_set(&graph, 2);
            assert_eq!(fast.is_some(), is_d_graph(&graph, 2).ok);
            if let Some(mu) = fast {
                assert_eq!(
                    mu,
                    external_mother_set(&graph, MotherSetVariant::RestrictedTarget)
                        .unwrap()
                        .size
                );
            }
        }
    }

    #[test]
    fn small_exhaustive_scans() {
        let r = scan_d_graphs(3, 2, ScanMode::Exhaustive).unwrap();
        assert_eq!(r.graphs_scanned, 64);
        assert!(r.pass());
        let r = scan_d_graphs(4, 2, ScanMode::Exhaustive).unwrap();
        assert_eq!(r.graphs_scanned, 4096);
        assert!(r.pass());
        assert!(matches!(
            scan_d_graphs(7, 2, ScanMode::Exhaustive),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn sample_scan_is_deterministic() {
        let mode = ScanMode::Sample {
            count: 3000,
            seed: 5,
        };
        let a = scan_d_graphs(6, 2, mode).unwrap();
        let b = scan_d_graphs(6, 2, mode).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.graphs_scanned, 3000);
    }

    #[test]
    fn json_round_trip() {
        let graph = g(3, &[(1, 2), (3, 1)]);
        let text = graph.to_json();
        assert_eq!(text, r#"{"n":3,"edges":[[1,2],[3,1]]}"#);
        assert_eq!(Digraph::from_json(&text).unwrap(), graph);
        assert!(Digraph::from_json(r#"{"n":2,"edges":[[1,1]]}"#).is_err());
        assert!(Digraph::from_json(r#"{"n":2,"edges":[[0,1]]}"#).is_err());
    }
}
