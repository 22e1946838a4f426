use std::collections::BTreeMap;

use ipir_core::audit::{decodability_check, JointDistribution, QueryKey, DEFAULT_BUDGET};
use ipir_core::exact::{combinations, int};
use ipir_core::ff::{vandermonde_solve, CoeffMatrix, MessageVec, PrimeField};
use ipir_core::goodrel::{
    min_cover_size, relation_from_graph, relation_from_protocol, validate_good, GoodVariant,
};
use ipir_core::gpcip::{
    answer_query, build_query, coefficient_matrix, recover, sample_partition, DemandSideInfo,
    Instance, Mutation, Query,
};
use ipir_core::motherset::{
    external_mother_set, internal_mother_set, scc_condensation, MotherSetVariant,
};
use ipir_core::rng::ProtocolRng;
use proptest::prelude::*;

const PRIMES: [u64; 6] = [3, 5, 7, 11, 13, 101];

fn field_and_nodes() -> impl Strategy<Value = (u64, Vec<u64>, u64)> {
    prop::sample::select(PRIMES.to_vec()).prop_flat_map(|q| {
        let max_n = (q as usize).min(8);
        (
            Just(q),
            prop::sample::subsequence((0..q).collect::<Vec<_>>(), 1..=max_n),
            any::<u64>(),
        )
    })
}

fn small_instance() -> impl Strategy<Value = Instance> {
    (1usize..=3, 2usize..=3, 0usize..=5).prop_filter_map("D+M <= K", |(m, d, extra)| {
        let k = m + d + extra;
        (k <= 10).then(|| Instance::with_default_field(k, m, d).unwrap())
    })
}

fn random_messages(inst: &Instance, rng: &mut ProtocolRng) -> Vec<MessageVec> {
    (0..inst.k)
        .map(|_| MessageVec::new((0..inst.m).map(|_| rng.below(inst.q)).collect()))
        .collect()
}

proptest! {
    #[test]
    fn field_axioms(q in prop::sample::select(PRIMES.to_vec()), a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let f = PrimeField::new(q).unwrap();
        let (a, b, c) = (f.reduce(a), f.reduce(b), f.reduce(c));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(f.sub(a, b), b), a);
        if a != 0 {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            prop_assert_eq!(f.pow(a, q - 1), 1);
        }
    }

    #[test]
    fn vandermonde_agrees_with_elimination((q, nodes, seed) in field_and_nodes(), width in 1usize..=3) {
        let f = PrimeField::new(q).unwrap();
        let mut rng = ProtocolRng::from_seed(seed);
        let rhs: Vec<MessageVec> = nodes
            .iter()
            .map(|_| MessageVec::new((0..width).map(|_| rng.below(q)).collect()))
            .collect();
        let fast = vandermonde_solve(&f, &nodes, &rhs).unwrap();
        let matrix = CoeffMatrix::new(f, nodes.len(), f.power_rows(&nodes, nodes.len())).unwrap();
        prop_assert_eq!(&fast, &matrix.solve(&rhs).unwrap());
    }

    #[test]
    fn rank_invariants(q in prop::sample::select(PRIMES.to_vec()), rows in 1usize..6, cols in 1usize..6, seed in any::<u64>()) {
        let f = PrimeField::new(q).unwrap();
        let mut rng = ProtocolRng::from_seed(seed);
        let data: Vec<Vec<u64>> = (0..rows).map(|_| (0..cols).map(|_| rng.below(q)).collect()).collect();
        let m = CoeffMatrix::new(f, cols, data.clone()).unwrap();
        prop_assert!(m.rank() <= rows.min(cols));
        prop_assert_eq!(m.rank(), m.transpose().rank());
        for row in &data {
            prop_assert!(m.in_row_space(row).unwrap());
        }
    }

    #[test]
    fn recovery_round_trip(inst in small_instance(), m in 1usize..=3, seed in 1u64..u64::MAX) {
        let inst = Instance::new(inst.k, inst.side, inst.demand, inst.q, m).unwrap();
        let mut rng = ProtocolRng::from_seed(seed);
        let messages = random_messages(&inst, &mut rng);
        let ws = DemandSideInfo::sample(&inst, &mut rng);
        let part = sample_partition(&inst, &ws, &mut rng);
        prop_assert!(part.validate(&inst).is_ok());
        let query = build_query(&part, &inst, &mut rng);
        let answer = answer_query(&query, &messages).unwrap();
        let side: BTreeMap<usize, MessageVec> = ws.side.iter().map(|&i| (i, messages[i].clone())).collect();
        let got = recover(&query, &answer, &ws, &side).unwrap();
        for j in &ws.demand {
            prop_assert_eq!(&got[j], &messages[*j]);
        }
        prop_assert!(decodability_check(&query, &ws.side, &ws.demand).unwrap());
        prop_assert_eq!(Query::from_json(&query.to_json()).unwrap(), query.clone());
        let p = inst.params();
        prop_assert_eq!(coefficient_matrix(&query).unwrap().rank(), p.residual_eqs + p.blocks * inst.demand);
    }

    #[test]
    fn condensation_reachability_matches_search(n in 1usize..=8, seed in any::<u64>()) {
        let mut rng = ProtocolRng::from_seed(seed);
        let g = ipir_core::motherset::random_digraph(n, &mut rng);
        prop_assert_eq!(scc_condensation(&g).reach_masks(), g.reach_masks());
        prop_assert_eq!(g.transpose().transpose(), g.clone());
    }

    #[test]
    fn mother_sets_are_minimum(n in 1usize..=6, seed in any::<u64>()) {
        let mut rng = ProtocolRng::from_seed(seed);
        let g = ipir_core::motherset::random_digraph(n, &mut rng);
        let reach = g.reach_masks();
        for (result, targets) in [
            (external_mother_set(&g, MotherSetVariant::RestrictedTarget).unwrap(), (0..n).filter(|&u| g.out_degree(u) > 0).collect::<Vec<_>>()),
            (internal_mother_set(&g, MotherSetVariant::RestrictedTarget).unwrap(), (0..n).filter(|&u| g.in_degree(u) > 0).collect()),
            (external_mother_set(&g, MotherSetVariant::FullCover).unwrap(), (0..n).collect()),
        ] {
            let covers = |set: &[usize]| {
                let union = set.iter().fold(0u64, |m, &v| m | reach[v]);
                targets.iter().all(|&u| union >> u & 1 == 1)
            };
            prop_assert!(covers(&result.witness));
            prop_assert_eq!(result.witness.len(), result.size);
            if result.size > 0 {
                let all: Vec<usize> = (0..n).collect();
                prop_assert!(combinations(&all, result.size - 1).iter().all(|s| !covers(s)));
            }
        }
    }

    #[test]
    fn graph_cover_equals_full_cover_mother_set(n in 2usize..=7, seed in any::<u64>()) {
        let mut rng = ProtocolRng::from_seed(seed);
        let g = loop {
            let g = ipir_core::motherset::random_digraph(n, &mut rng);
            if (0..n).all(|u| g.out_degree(u) > 0) {
                break g;
            }
        };
        let f = relation_from_graph(&g, 2);
        let full = external_mother_set(&g, MotherSetVariant::FullCover).unwrap().size;
        prop_assert_eq!(min_cover_size(&f).unwrap().0, full);
        prop_assert_eq!(external_mother_set(&g, MotherSetVariant::RestrictedTarget).unwrap().size, full);
        let r = validate_good(&f, GoodVariant::Literal);
        prop_assert!(r.contains_argument.pass && r.closure.pass);
    }
}

#[test]
fn protocol_relations_are_monotone_and_closed() {
    for (k, m, d) in [(4, 1, 2), (5, 2, 2), (7, 1, 2)] {
        let inst = Instance::with_default_field(k, m, d).unwrap();
        let joint = JointDistribution::build(&inst, Mutation::Honest, DEFAULT_BUDGET).unwrap();
        for key in joint.keys.keys() {
            let f = relation_from_protocol(&inst, &key.to_query(&inst)).unwrap();
            let report = validate_good(&f, GoodVariant::ExcludingI);
            assert!(
                report.contains_argument.pass && report.demand_cover.pass && report.closure.pass
            );
            let empty = f.image_of(&[]).unwrap();
            for i in 0..k {
                let fi = f.image_of(&[i]).unwrap();
                assert!(empty.iter().all(|x| fi.contains(x)), "f(∅) ⊆ f({{{i}}})");
            }
        }
    }
}

#[test]
fn posteriors_sum_to_demand_under_every_mutation() {
    let inst = Instance::with_default_field(7, 1, 2).unwrap();
    for mutation in [
        Mutation::Honest,
        Mutation::AlwaysSpread,
        Mutation::DoubledSpreadWeight,
        Mutation::NoShuffle,
    ] {
        let joint = JointDistribution::build(&inst, mutation, DEFAULT_BUDGET).unwrap();
        let total = joint.keys.values().fold(int(0), |a, s| a + &s.mass);
        assert_eq!(total, int(1), "{mutation:?}");
        for key in joint.keys.keys() {
            assert_eq!(joint.posterior(key).unwrap().sum(), int(2));
        }
    }
}

#[test]
fn query_key_json_is_one_based() {
    let key = QueryKey::new(vec![3], vec![vec![0, 1, 2]]);
    let text = serde_json::to_string(&key).unwrap();
    assert_eq!(text, r#"{"q0":[4],"parts":[[1,2,3]]}"#);
    assert_eq!(serde_json::from_str::<QueryKey>(&text).unwrap(), key);
}

#[test]
fn seeded_runs_are_reproducible() {
    let inst = Instance::with_default_field(9, 2, 3).unwrap();
    let run = |seed| {
        let mut rng = ProtocolRng::from_seed(seed);
        let ws = DemandSideInfo::sample(&inst, &mut rng);
        let part = sample_partition(&inst, &ws, &mut rng);
        build_query(&part, &inst, &mut rng).to_json()
    };
    assert_eq!(run(11), run(11));
    assert_ne!(
        (1..20)
            .map(run)
            .collect::<std::collections::BTreeSet<_>>()
            .len(),
        1
    );
}
