mod common;

use std::collections::HashSet;

use advgraph::attacks::{
    attack_gradargmax, attack_meta, attack_meta_with, attack_nettack, meta_gradient_proxy, nettack_objective,
    row_delta, AttackKind, ClassScoreMatrix, MetaScope,
};
use advgraph::attacks::surrogate::softmax;
use advgraph::attributes::attribute_vector;
use advgraph::synth::{GraphModel, SyntheticRecipe};
use advgraph::{FlipAction, Graph};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_labeled(rng: &mut ChaCha8Rng, n: usize, p: f64, k: usize) -> (Graph, Vec<(usize, usize)>) {
    let edges = common::random_edges(rng, n, p);
    let labels: Vec<usize> = (0..n).map(|i| if i < k { i } else { rng.gen_range(0..k) }).collect();
    (Graph::new(n, edges.clone(), labels, k).unwrap(), edges)
}

fn dense_row(g: &Graph, edges: &[(usize, usize)], target: usize) -> Vec<f64> {
    let c = common::one_hot(g.labels(), g.class_count());
    common::dense_propagation(g.node_count(), edges, &c, target)
}

#[test]
fn nettack_objective_matches_dense_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..60 {
        let n = rng.gen_range(3..16);
        let k = rng.gen_range(2..4);
        let p = rng.gen_range(0.1..0.6);
        let (g, edges) = random_labeled(&mut rng, n, p, k);
        let c = ClassScoreMatrix::from_labels(&g);
        let t = rng.gen_range(0..n);
        let row = dense_row(&g, &edges, t);
        for y in (0..k).filter(|&y| y != g.label(t)) {
            let got = nettack_objective(&g, &c, t, y).unwrap();
            let want = row[y] - row[g.label(t)];
            assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        }
    }
}

#[test]
fn path_example_by_hand() {
    let g = Graph::new(3, [(0, 1), (1, 2)], vec![0, 1, 0], 2).unwrap();
    let c = ClassScoreMatrix::from_labels(&g);
    // augmented degrees (2, 3, 2); [Â²]_{1,0} = [Â²]_{1,2} = 5/(6√6), [Â²]_{11} = 4/9
    let want = 2.0 * (5.0 / 6.0) / 6f64.sqrt() - 4.0 / 9.0;
    assert!((nettack_objective(&g, &c, 1, 0).unwrap() - want).abs() < 1e-12);
}

#[test]
fn meta_proxy_matches_dense_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..60 {
        let n = rng.gen_range(3..14);
        let p = rng.gen_range(0.1..0.6);
        let (g, edges) = random_labeled(&mut rng, n, p, 3);
        let c = ClassScoreMatrix::from_labels(&g);
        let t = rng.gen_range(0..n);
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u == v {
            continue;
        }
        let before = dense_row(&g, &edges, t);
        let flipped: Vec<(usize, usize)> = if g.has_edge(u, v) {
            edges.iter().copied().filter(|&e| e != (u.min(v), u.max(v))).collect()
        } else {
            edges.iter().copied().chain([(u, v)]).collect()
        };
        let after = dense_row(&g, &flipped, t);
        let mut weights = softmax(&before);
        weights[g.label(t)] -= 1.0;
        let want: f64 = weights.iter().zip(after.iter().zip(&before)).map(|(w, (a, b))| w * (a - b)).sum();
        let got = meta_gradient_proxy(&g, &c, t, u, v).unwrap();
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }
}

#[test]
fn flip_and_unflip_are_antisymmetric() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let (g, _) = random_labeled(&mut rng, 10, 0.3, 3);
        let c = ClassScoreMatrix::from_labels(&g);
        let (t, u, v) = (rng.gen_range(0..10), rng.gen_range(0..10), rng.gen_range(0..10));
        if u == v {
            continue;
        }
        let flip = advgraph::EdgeFlip::toggle(&g, u, v);
        let h = g.apply_flips(&[flip]).unwrap();
        let forward = row_delta(&g, &c, t, u, v).unwrap();
        let back = row_delta(&h, &c, t, u, v).unwrap();
        // same softmax weights on both sides
        let mut w = softmax(&common::dense_propagation(10, &g.edges().collect::<Vec<_>>(), &common::one_hot(g.labels(), 3), t));
        w[g.label(t)] -= 1.0;
        let dot = |d: &[f64]| d.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>();
        assert!((dot(&forward) + dot(&back)).abs() < 1e-9);
    }
}

#[test]
fn far_flip_has_zero_proxy() {
    // target 0 in one component, the flip in another
    let g = Graph::new(6, [(0, 1), (1, 2), (3, 4)], vec![0, 1, 0, 1, 0, 1], 2).unwrap();
    let c = ClassScoreMatrix::from_labels(&g);
    assert_eq!(meta_gradient_proxy(&g, &c, 0, 4, 5).unwrap(), 0.0);
    assert_eq!(meta_gradient_proxy(&g, &c, 0, 3, 4).unwrap(), 0.0);
}

#[test]
fn global_scope_agrees_on_local_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10 {
        let (g, _) = random_labeled(&mut rng, 12, 0.2, 3);
        let t = rng.gen_range(0..12);
        assert_eq!(
            attack_meta_with(&g, t, 2, MetaScope::Local).unwrap(),
            attack_meta_with(&g, t, 2, MetaScope::Global).unwrap()
        );
    }
}

fn sparse_graph(seed: u64) -> Graph {
    SyntheticRecipe {
        model: GraphModel::ErdosRenyi,
        nodes: 20,
        parameter: 0.15,
        classes: 3,
        seed,
    }
    .build()
    .unwrap()
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 0 {
        (xs[m - 1] + xs[m]) / 2.0
    } else {
        xs[m]
    }
}

#[test]
fn nettack_links_small_degree_nodes() {
    let (mut linked, mut all) = (Vec::new(), Vec::new());
    for seed in 0..100 {
        let g = sparse_graph(seed);
        let t = (seed as usize * 7) % 20;
        let plan = attack_nettack(&g, t, AttackKind::Nettack.default_budget(&g, t)).unwrap();
        for f in plan.flips.iter().filter(|f| f.flip.action == FlipAction::Add) {
            let (u, v) = f.flip.pair();
            let other = if u == t { v } else { u };
            linked.push(g.neighbors(other).len() as f64);
        }
        all.extend((0..20).map(|x| g.neighbors(x).len() as f64));
    }
    assert!(!linked.is_empty());
    assert!(median(linked.clone()) <= median(all.clone()), "{} > {}", median(linked), median(all));
}

// Measured: endpoint mean 3.33 vs graph mean 2.85. Most flips delete the
// target's own edges, and neighbours have above-average degree.
#[test]
#[ignore = "fails under the exact surrogate delta; run with --ignored"]
fn meta_prefers_small_degree_endpoints() {
    let (mut touched, mut all) = (Vec::new(), Vec::new());
    for seed in 0..100 {
        let g = sparse_graph(seed);
        let t = (seed as usize * 7) % 20;
        let plan = attack_meta(&g, t, AttackKind::Meta.default_budget(&g, t)).unwrap();
        for f in &plan.flips {
            let (u, v) = f.flip.pair();
            touched.extend([u, v].into_iter().filter(|&x| x != t).map(|x| g.neighbors(x).len() as f64));
        }
        all.extend((0..20).map(|x| g.neighbors(x).len() as f64));
    }
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    assert!(!touched.is_empty());
    assert!(mean(&touched) < mean(&all), "{} >= {}", mean(&touched), mean(&all));
}

#[test]
fn greedy_prefix() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..10 {
        let (g, _) = random_labeled(&mut rng, 15, 0.2, 3);
        let t = rng.gen_range(0..15);
        for attack in AttackKind::ALL {
            let short = attack.run(&g, t, 1).unwrap();
            let long = attack.run(&g, t, 3).unwrap();
            assert_eq!(short.flips[..], long.flips[..short.flips.len()]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn plans_are_valid_and_deterministic(seed in any::<u64>(), budget in 1usize..5, attack in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, _) = random_labeled(&mut rng, 14, 0.2, 3);
        let t = rng.gen_range(0..14);
        let attack = AttackKind::ALL[attack];
        let plan = attack.run(&g, t, budget).unwrap();
        prop_assert!(plan.flips.len() <= budget);
        let pairs: HashSet<_> = plan.flips.iter().map(|f| f.flip.pair()).collect();
        prop_assert_eq!(pairs.len(), plan.flips.len());
        prop_assert!(plan.apply(&g).is_ok());
        prop_assert_eq!(&plan, &attack.run(&g, t, budget).unwrap());
        if attack == AttackKind::Nettack {
            let incident = plan.flips.iter().all(|f| f.flip.pair().0 == t || f.flip.pair().1 == t);
            prop_assert!(incident);
        }
    }

    #[test]
    fn gradargmax_shrinks_ego_subgraph(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, _) = random_labeled(&mut rng, 16, 0.2, 2);
        let t = rng.gen_range(0..16);
        let plan = attack_gradargmax(&g, t, 2).unwrap();
        prop_assume!(!plan.is_empty());
        prop_assert!(plan.flips.iter().all(|f| f.flip.action == FlipAction::Delete));
        let (before, after) = (attribute_vector(&g, t).unwrap(), attribute_vector(&plan.apply(&g).unwrap(), t).unwrap());
        prop_assert!(after.get("E_sg").unwrap() < before.get("E_sg").unwrap());
        prop_assert!(after.get("N_sg").unwrap() <= before.get("N_sg").unwrap());
    }
}
