use std::collections::BTreeSet;
use std::time::Duration;

use num_rational::Rational64;
use perturb_core::density::{check_small_density, m1_bruteforce, m1_exact, DEFAULT_ENUMERATION_BUDGET};
use perturb_core::embed::{exact_spanning_embed, two_phase_embed, ExactOutcome, TwoPhaseOutcome, TwoPhaseParams};
use perturb_core::expansion::expansion_check;
use perturb_core::generators::{random_regular, sample_gnp};
use perturb_core::graph::{degeneracy_order, edge_boundary, induced_subgraph};
use perturb_core::orient::{level_orientation, orient_by_order, out_ball, RootRule};
use perturb_core::reduction::{prune_to_independent, select_in_stars};
use perturb_core::spread::uniform_permutation;
use perturb_core::{Graph, VertexSet};
use proptest::prelude::*;

fn graph_on(n: usize) -> impl Strategy<Value = Graph> {
    prop::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
        let pairs = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Graph::new(n, pairs.zip(bits).filter(|(_, b)| *b).map(|(e, _)| e)).unwrap()
    })
}

fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(graph_on)
}

fn nonempty_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    graph(max_n).prop_filter("needs an edge", |g| g.edge_count() > 0)
}

/// A graph, a random vertex order and a random subset.
fn dag_with_subset(max_n: usize) -> impl Strategy<Value = (Graph, Vec<usize>, Vec<bool>)> {
    graph(max_n).prop_flat_map(|g| {
        let n = g.n();
        (
            Just(g),
            Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
            prop::collection::vec(any::<bool>(), n),
        )
    })
}

fn subset(mask: &[bool]) -> VertexSet {
    mask.iter().enumerate().filter(|(_, b)| **b).map(|(v, _)| v).collect()
}

/// `max e(S)/(|S|-1)` over all vertex subsets, connected or not.
fn m1_all_subsets(g: &Graph) -> Rational64 {
    let n = g.n();
    let mut best = Rational64::from_integer(0);
    for mask in 1u32..(1 << n) {
        let size = mask.count_ones() as i64;
        if size < 2 {
            continue;
        }
        let e = g
            .edges()
            .iter()
            .filter(|&&(u, v)| mask >> u & 1 == 1 && mask >> v & 1 == 1)
            .count() as i64;
        best = best.max(Rational64::new(e, size - 1));
    }
    best
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn contains_spanning_copy(h: &Graph, host: &Graph) -> bool {
    permutations(h.n())
        .iter()
        .any(|p| h.edges().iter().all(|&(u, v)| host.has_edge(p[u], p[v])))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn handshake(g in graph(12)) {
        prop_assert_eq!(g.degrees().iter().sum::<usize>(), 2 * g.edge_count());
    }

    #[test]
    fn induced_subgraph_round_trip(g in graph(10), mask in prop::collection::vec(any::<bool>(), 10)) {
        let s = subset(&mask[..g.n()]);
        let (sub, back) = induced_subgraph(&g, &s).unwrap();
        prop_assert_eq!(sub.n(), s.len());
        prop_assert_eq!(sub.edge_count(), g.induced_edge_count(&s));
        for &(u, v) in sub.edges() {
            prop_assert!(g.has_edge(back[u], back[v]));
        }
        let boundary = edge_boundary(&g, &s).unwrap();
        let degree_sum: usize = s.iter().map(|v| g.degree(v)).sum();
        prop_assert_eq!(boundary.len(), degree_sum - 2 * sub.edge_count());
    }

    #[test]
    fn orientations_are_acyclic(g in graph(14)) {
        let order = degeneracy_order(&g);
        let d = orient_by_order(&g, &order.order).unwrap();
        prop_assert!(d.topological_order().is_some());
        prop_assert_eq!(d.max_out_degree(), order.degeneracy);
        let (lv, levels) = level_orientation(&g, RootRule::Seeded(7));
        prop_assert!(lv.topological_order().is_some());
        for (u, v) in lv.arcs() {
            prop_assert!(levels.levels[u] >= levels.levels[v]);
        }
    }

    #[test]
    fn out_balls_grow_with_radius((g, order, _) in dag_with_subset(12), v in 0usize..12) {
        let d = orient_by_order(&g, &order).unwrap();
        let v = v % g.n();
        let mut prev = out_ball(&d, v, 0);
        prop_assert_eq!(prev.as_slice(), &[v]);
        for r in 1..5 {
            let ball = out_ball(&d, v, r);
            prop_assert!(prev.iter().all(|x| ball.contains(x)));
            prev = ball;
        }
    }

    #[test]
    fn connected_sets_suffice_for_density(g in nonempty_graph(8)) {
        let brute = m1_bruteforce(&g, 8).unwrap();
        prop_assert_eq!(brute.value(), m1_all_subsets(&g));
        let exact = m1_exact(&g).unwrap();
        prop_assert_eq!(exact.value(), brute.value());
        let w = &exact.witness;
        prop_assert_eq!(
            Rational64::new(g.induced_edge_count(w) as i64, w.len() as i64 - 1),
            exact.value()
        );
    }

    #[test]
    fn deleting_an_edge_never_raises_density(g in nonempty_graph(9), pick in any::<prop::sample::Index>()) {
        let e = g.edges()[pick.index(g.edge_count())];
        let smaller = g.without_edges([e]);
        prop_assume!(smaller.edge_count() > 0);
        prop_assert!(m1_exact(&smaller).unwrap().value() <= m1_exact(&g).unwrap().value());
    }

    #[test]
    fn small_density_check_splits_over_components(
        a in graph(7),
        b in graph(7),
        d in 1i64..4,
        k in 4usize..12,
    ) {
        let d = Rational64::from_integer(d);
        let shift = a.n();
        let joined = Graph::new(
            a.n() + b.n(),
            a.edges().iter().copied().chain(b.edges().iter().map(|&(u, v)| (u + shift, v + shift))),
        )
        .unwrap();
        let pass = |g: &Graph| check_small_density(g, d, k, DEFAULT_ENUMERATION_BUDGET).unwrap().passed();
        prop_assert_eq!(pass(&joined), pass(&a) && pass(&b));
    }

    #[test]
    fn pruning_is_independent_and_stable((g, order, mask) in dag_with_subset(14), k in 1usize..5) {
        let d = orient_by_order(&g, &order).unwrap();
        let x1 = subset(&mask);
        let pruned = prune_to_independent(&d, &x1);
        let x = &pruned.independent;
        prop_assert!(g.is_independent(x));
        prop_assert!(x.iter().all(|v| x1.contains(v)));
        let again = prune_to_independent(&d, x);
        prop_assert_eq!(&again.independent, x);
        prop_assert_eq!(again.rounds, 0);
        for &(u, s) in &pruned.deleted {
            prop_assert!(d.has_arc(u, s));
        }
        // a set meeting every punctured K-ball still meets every punctured (K+1)-ball
        for v in 0..g.n() {
            let hit_before = out_ball(&d, v, k).iter().any(|w| w != v && x1.contains(w));
            if hit_before {
                prop_assert!(out_ball(&d, v, k + 1).iter().any(|w| w != v && x.contains(w)));
            }
        }
    }

    #[test]
    fn in_stars_are_disjoint((g, order, mask) in dag_with_subset(14)) {
        let d = orient_by_order(&g, &order).unwrap();
        let x = prune_to_independent(&d, &subset(&mask)).independent;
        let sel = select_in_stars(&d, &x).unwrap();
        let mut sources = BTreeSet::new();
        for &(u, q) in &sel.arcs {
            prop_assert!(!x.contains(u) && x.contains(q));
            prop_assert!(d.has_arc(u, q));
            prop_assert!(sources.insert(u));
            let first = d.out_neighbors(u).iter().copied().filter(|&w| x.contains(w)).min();
            prop_assert_eq!(first, Some(q));
        }
        for v in (0..g.n()).filter(|&v| !x.contains(v)) {
            let has_root = d.out_neighbors(v).iter().any(|&w| x.contains(w));
            prop_assert_eq!(has_root, sources.contains(&v));
        }
        prop_assert!(sel.arcs.len() <= g.max_degree() * x.len());
    }

    #[test]
    fn exact_embedder_matches_permutation_search((h, host) in (2usize..=6).prop_flat_map(|n| (graph_on(n), graph_on(n)))) {
        let out = exact_spanning_embed(&h, &host, Duration::from_secs(10)).unwrap();
        match out {
            ExactOutcome::Found(e) => prop_assert!(e.is_copy_of(&h, &host)),
            ExactOutcome::NoneExists => prop_assert!(!contains_spanning_copy(&h, &host)),
            ExactOutcome::Timeout => prop_assert!(false, "timeout on a tiny instance"),
        }
    }

    #[test]
    fn uniform_permutations_are_bijections(n in 5usize..=12, seed in any::<u64>()) {
        let p = uniform_permutation(n, seed);
        let mut sorted = p.clone();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, (0..n).collect::<Vec<_>>());
        prop_assert_eq!(p, uniform_permutation(n, seed));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// On a `d`-regular host with `bound <= d + 1`, the connected-only search
    /// finds a violator exactly when one exists among all sets.
    #[test]
    fn connected_expansion_search_is_sound(n in 6usize..=12, d in 2usize..=4, bound in 1usize..=5, seed in 0u64..1000) {
        prop_assume!(n * d % 2 == 0 && d < n && bound <= d + 1);
        let g = random_regular(n, d, seed).unwrap();
        let max_size = 5;
        let report = expansion_check(&g, 2, max_size, bound, DEFAULT_ENUMERATION_BUDGET).unwrap();
        let mut all_min = usize::MAX;
        for mask in 1u32..(1 << n) {
            let size = mask.count_ones() as usize;
            if !(2..=max_size).contains(&size) {
                continue;
            }
            let s: VertexSet = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            all_min = all_min.min(edge_boundary(&g, &s).unwrap().len());
        }
        prop_assert_eq!(report.passed(), all_min >= bound);
    }

    /// Heuristic successes are real copies, so the heuristic never beats the
    /// exact embedder.
    #[test]
    fn two_phase_is_one_sided(p in 0.3f64..1.0, seed in any::<u64>()) {
        let n = 12;
        let h = perturb_core::generators::power_of_cycle(n, 2).unwrap();
        let (d, _) = level_orientation(&h, RootRule::LowestIndex);
        let stars = select_in_stars(&d, &VertexSet::new([0], n).unwrap()).unwrap();
        let g = Graph::new(n, (0..6).flat_map(|u| (u + 1..6).map(move |v| (u, v)))).unwrap();
        let r = sample_gnp(n, p, seed).unwrap();
        let host = g.union(&r).unwrap();
        let params = TwoPhaseParams::new(Rational64::new(15, 144), seed);
        if let TwoPhaseOutcome::Found(e) = two_phase_embed(&h, &stars, &g, &r, &params).unwrap() {
            prop_assert!(e.is_copy_of(&h, &host));
            for &(u, q) in &stars.arcs {
                prop_assert!(g.has_edge(e.image(u), e.image(q)));
            }
            let exact = exact_spanning_embed(&h, &host, Duration::from_secs(10)).unwrap();
            prop_assert!(matches!(exact, ExactOutcome::Found(_)));
        }
    }
}
