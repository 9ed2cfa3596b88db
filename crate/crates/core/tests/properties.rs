use std::collections::{BTreeMap, BTreeSet};

use cliquetree::chordal::{
    build_junction_tree, check_chordal, compute_metrics, extract_cliques, is_perfect_elimination_ordering, Chordality,
};
use cliquetree::cuts::{min_st_vertex_cut, three_way_cut_2approx, Capacity, CapacityAssignment, CutOutcome};
use cliquetree::decomp::{find_w_decomposition, is_w_decomposition, DecompBudget};
use cliquetree::minimize::minimize_fill;
use cliquetree::oracle::{exact_cliquewidth, optimal_three_way_cut};
use cliquetree::pipeline::{self, Config};
use cliquetree::triangulate::{greedy_min_weight, triangulate, w_triangulate};
use cliquetree::{Graph, Measure, StateSpace, Vertex, VertexSet};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn graph_from_bits(n: usize, bits: &[bool]) -> Graph {
    let mut edges = Vec::new();
    let mut k = 0;
    for u in 1..=n {
        for v in u + 1..=n {
            if bits[k] {
                edges.push((u, v));
            }
            k += 1;
        }
    }
    Graph::from_edges(1..=n, edges).unwrap()
}

fn graphs(lo: usize, hi: usize) -> impl Strategy<Value = Graph> {
    (lo..=hi, 0.1f64..0.8).prop_flat_map(|(n, p)| {
        proptest::collection::vec(proptest::bool::weighted(p), n * (n - 1) / 2)
            .prop_map(move |bits| graph_from_bits(n, &bits))
    })
}

fn with_sizes(lo: usize, hi: usize, sizes: &'static [u64]) -> impl Strategy<Value = (Graph, StateSpace)> {
    graphs(lo, hi).prop_flat_map(move |g| {
        let n = g.n();
        proptest::collection::vec(proptest::sample::select(sizes), n).prop_map(move |s| {
            let ss = StateSpace::new(g.vertices().zip(s).collect()).unwrap();
            (g.clone(), ss)
        })
    })
}

fn set(vs: impl IntoIterator<Item = Vertex>) -> VertexSet {
    vs.into_iter().collect()
}

/// Vertices reachable from `from` avoiding `blocked`.
fn reach(g: &Graph, from: &VertexSet, blocked: &VertexSet) -> VertexSet {
    let mut seen: VertexSet = from.iter().copied().filter(|v| !blocked.contains(v)).collect();
    let mut stack: Vec<Vertex> = seen.iter().copied().collect();
    while let Some(u) = stack.pop() {
        for &v in g.neighbors(u) {
            if !blocked.contains(&v) && seen.insert(v) {
                stack.push(v);
            }
        }
    }
    seen
}

fn separates(g: &Graph, cut: &VertexSet, a: &VertexSet, b: &VertexSet) -> bool {
    reach(g, a, cut).is_disjoint(b)
}

/// Cheapest vertex set outside the terminals separating every pair of
/// `groups`, by enumeration.
fn brute_multiway(g: &Graph, groups: &[&VertexSet], wt: &BTreeMap<Vertex, f64>) -> Option<f64> {
    let terminals: VertexSet = groups.iter().flat_map(|s| s.iter().copied()).collect();
    let free: Vec<Vertex> = g.vertices().filter(|v| !terminals.contains(v)).collect();
    let mut best: Option<f64> = None;
    for mask in 0u32..1 << free.len() {
        let cut: VertexSet = (0..free.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| free[i])
            .collect();
        let ok = (0..groups.len()).all(|i| (i + 1..groups.len()).all(|j| separates(g, &cut, groups[i], groups[j])));
        if ok {
            let w: f64 = cut.iter().map(|v| wt[v]).sum();
            best = Some(best.map_or(w, |b: f64| b.min(w)));
        }
    }
    best
}

/// Chordality by repeatedly deleting simplicial vertices.
fn brute_chordal(g: &Graph) -> bool {
    let mut left: VertexSet = g.vertex_set();
    'outer: while !left.is_empty() {
        for &v in &left {
            let nbrs: Vec<Vertex> = g.neighbors(v).iter().copied().filter(|u| left.contains(u)).collect();
            let clique = nbrs
                .iter()
                .enumerate()
                .all(|(i, &a)| nbrs[i + 1..].iter().all(|&b| g.has_edge(a, b)));
            if clique {
                left.remove(&v);
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn brute_maximal_cliques(g: &Graph) -> BTreeSet<VertexSet> {
    let vs: Vec<Vertex> = g.vertices().collect();
    let cliques: Vec<VertexSet> = (1u32..1 << vs.len())
        .map(|m| {
            (0..vs.len())
                .filter(|i| m >> i & 1 == 1)
                .map(|i| vs[i])
                .collect::<VertexSet>()
        })
        .filter(|s| s.iter().all(|&a| s.iter().all(|&b| a == b || g.has_edge(a, b))))
        .collect();
    cliques
        .iter()
        .filter(|c| !cliques.iter().any(|d| d.len() > c.len() && c.is_subset(d)))
        .cloned()
        .collect()
}

/// Minimum over all elimination orders of the heaviest clique created.
fn cliquewidth_by_permutations(g: &Graph, wt: &dyn Fn(Vertex) -> f64) -> f64 {
    fn go(h: &Graph, wt: &dyn Fn(Vertex) -> f64, so_far: f64, best: &mut f64) {
        if h.is_empty() {
            *best = best.min(so_far);
            return;
        }
        for v in h.vertices() {
            let cost = wt(v) + h.neighbors(v).iter().map(|&u| wt(u)).sum::<f64>();
            let worst = so_far.max(cost);
            if worst >= *best {
                continue;
            }
            let nbrs = h.neighbors(v).clone();
            let (mut next, _) = h.add_clique_edges(&nbrs).unwrap();
            let rest: VertexSet = next.vertices().filter(|&u| u != v).collect();
            next = next.induced_subgraph(&rest).unwrap();
            go(&next, wt, worst, best);
        }
    }
    let mut best = f64::INFINITY;
    if g.is_empty() {
        return 0.0;
    }
    go(g, wt, 0.0, &mut best);
    best
}

fn largest_clique(h: &Graph) -> usize {
    brute_maximal_cliques(h).iter().map(|c| c.len()).max().unwrap_or(0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn st_cut_is_minimum_and_separates(
        (g, ss) in with_sizes(2, 9, &[2, 3, 5, 8, 13]),
        pick in any::<(prop::sample::Index, prop::sample::Index)>(),
    ) {
        let vs: Vec<Vertex> = g.vertices().collect();
        let (s, t) = (*pick.0.get(&vs), *pick.1.get(&vs));
        prop_assume!(s != t);
        let cap = CapacityAssignment::from_measure(&g, Measure::Weighted(&ss));
        let wt: BTreeMap<Vertex, f64> = g.vertices().map(|v| (v, ss.weight(v).unwrap())).collect();
        let (a, b) = (set([s]), set([t]));
        match min_st_vertex_cut(&g, &a, &b, &cap).unwrap() {
            CutOutcome::Uncuttable => prop_assert!(g.has_edge(s, t)),
            CutOutcome::Cut(c) => {
                prop_assert!(separates(&g, &c.cut, &a, &b));
                prop_assert!(!c.cut.contains(&s) && !c.cut.contains(&t));
                let brute = brute_multiway(&g, &[&a, &b], &wt).unwrap();
                prop_assert!((c.weight - brute).abs() < TOL, "{} vs {}", c.weight, brute);
            }
        }
    }

    #[test]
    fn three_way_cut_within_factor_two(
        g in graphs(3, 10),
        seed in any::<u64>(),
    ) {
        let vs: Vec<Vertex> = g.vertices().collect();
        let n = vs.len();
        let pick = |i: u64| vs[(seed.rotate_left(i as u32 * 7) % n as u64) as usize];
        let (a, b, c) = (pick(0), pick(1), pick(2));
        prop_assume!(a != b && b != c && a != c);
        let cap = CapacityAssignment::unit(&g);
        let (wa, wb, wc) = (set([a]), set([b]), set([c]));
        let approx = three_way_cut_2approx(&g, &wa, &wb, &wc, &cap).unwrap();
        let exact = optimal_three_way_cut(&g, &wa, &wb, &wc, &cap).unwrap();
        match (approx, exact) {
            (CutOutcome::Uncuttable, CutOutcome::Uncuttable) => {}
            (CutOutcome::Cut(x), CutOutcome::Cut(o)) => {
                for (p, q) in [(&wa, &wb), (&wa, &wc), (&wb, &wc)] {
                    prop_assert!(separates(&g, &x.cut, p, q));
                }
                prop_assert!(x.weight <= 2.0 * o.weight + TOL);
                prop_assert!(x.weight + TOL >= o.weight);
            }
            (x, o) => prop_assert!(false, "disagree on cuttability: {x:?} vs {o:?}"),
        }
    }

    #[test]
    fn chordality_and_cliques_match_brute_force(g in graphs(1, 9)) {
        match check_chordal(&g) {
            Chordality::Chordal(peo) => {
                prop_assert!(brute_chordal(&g));
                prop_assert!(is_perfect_elimination_ordering(&g, &peo));
                let got: BTreeSet<VertexSet> = extract_cliques(&g, &peo).unwrap().into_iter().collect();
                prop_assert_eq!(got, brute_maximal_cliques(&g));
            }
            Chordality::NotChordal(cycle) => {
                prop_assert!(!brute_chordal(&g));
                let k = cycle.len();
                prop_assert!(k >= 4);
                for i in 0..k {
                    for j in i + 1..k {
                        let consecutive = j == i + 1 || (i == 0 && j == k - 1);
                        prop_assert_eq!(g.has_edge(cycle[i], cycle[j]), consecutive);
                    }
                }
            }
        }
    }

    #[test]
    fn oracle_matches_permutations((g, ss) in with_sizes(1, 7, &[2, 3, 4])) {
        let card = exact_cliquewidth(&g, None).unwrap();
        prop_assert_eq!(card, cliquewidth_by_permutations(&g, &|_| 1.0));
        let weighted = exact_cliquewidth(&g, Some(&ss)).unwrap();
        let brute = cliquewidth_by_permutations(&g, &|v| ss.weight(v).unwrap());
        prop_assert!((weighted - brute).abs() < TOL);
    }

    #[test]
    fn decompositions_are_valid(g in graphs(5, 10), k in 1usize..4, wbits in any::<u16>()) {
        let w: VertexSet = g.vertices().filter(|&v| wbits >> (v - 1) & 1 == 1).take(3 * k - 1).collect();
        let budget = DecompBudget::cardinality(k, 2.0);
        prop_assume!((g.n() as f64) >= budget.leaf_bound());
        if let Some(d) = find_w_decomposition(&g, &w, &budget).unwrap() {
            d.validate(&g).unwrap();
            prop_assert!(is_w_decomposition(&d, &w, &budget));
        }
    }

    #[test]
    fn failures_are_sound_and_successes_bounded(g in graphs(1, 10), k in 1usize..5) {
        let r = triangulate(&g, &VertexSet::new(), k, 2.0).unwrap();
        if r.is_success() {
            let h = r.triangulated(&g).unwrap();
            prop_assert!(brute_chordal(&h));
            prop_assert!(is_perfect_elimination_ordering(&h, &r.ordering));
            prop_assert_eq!(largest_clique(&h), r.largest_clique_size);
            prop_assert!(r.largest_clique_size < 5 * k);
        } else {
            prop_assert!(exact_cliquewidth(&g, None).unwrap() > k as f64);
        }
    }

    #[test]
    fn monitored_set_ends_up_a_clique(g in graphs(4, 10), k in 1usize..4, wbits in any::<u16>()) {
        let w: VertexSet = g.vertices().filter(|&v| wbits >> (v - 1) & 1 == 1).take(3 * k - 1).collect();
        let r = triangulate(&g, &w, k, 2.0).unwrap();
        if r.is_success() {
            let h = r.triangulated(&g).unwrap();
            prop_assert!(h.is_clique(&w));
            prop_assert!(brute_chordal(&h));
            prop_assert!(r.largest_clique_size < 5 * k);
        }
    }

    #[test]
    fn weighted_successes_bounded_and_failures_sound(
        (g, ss) in with_sizes(1, 8, &[2, 3, 4]),
        m in 1.0f64..9.0,
    ) {
        let r = w_triangulate(&g, &VertexSet::new(), m, 2.0, &ss).unwrap();
        if r.is_success() {
            let h = r.triangulated(&g).unwrap();
            prop_assert!(brute_chordal(&h));
            prop_assert!(r.heaviest_clique_weight < 5.0 * m + TOL);
        } else {
            prop_assert!(exact_cliquewidth(&g, Some(&ss)).unwrap() > m - TOL);
        }
    }

    #[test]
    fn binary_weights_reduce_to_cardinality(g in graphs(1, 10), k in 1usize..5) {
        let ss = StateSpace::uniform(&g, 2).unwrap();
        let card = triangulate(&g, &VertexSet::new(), k, 2.0).unwrap();
        let weighted = w_triangulate(&g, &VertexSet::new(), k as f64, 2.0, &ss).unwrap();
        prop_assert_eq!(card.verdict, weighted.verdict);
        prop_assert_eq!(card.fill_edges, weighted.fill_edges);
        prop_assert_eq!(card.ordering, weighted.ordering);
    }

    #[test]
    fn minimized_fill_is_minimal(g in graphs(1, 10)) {
        let greedy = greedy_min_weight(&g, None).unwrap();
        let r = minimize_fill(&g, &greedy.fill_edges, &greedy.ordering).unwrap();
        let h = g.with_edges(&r.kept).unwrap();
        prop_assert!(brute_chordal(&h));
        prop_assert_eq!(r.kept.len() + r.removed.len(), greedy.fill_edges.len());
        for e in &r.kept {
            let rest: BTreeSet<_> = r.kept.iter().copied().filter(|f| f != e).collect();
            prop_assert!(!brute_chordal(&g.with_edges(&rest).unwrap()));
        }
    }

    #[test]
    fn pipeline_trees_verify_and_metrics_are_bounded((g, ss) in with_sizes(1, 10, &[2, 3, 5, 7])) {
        let cfg = Config { mode: pipeline::Mode::Weighted, ..Config::default() };
        let out = pipeline::run(&g, Some(&ss), &cfg).unwrap();
        out.junction_tree.verify(&out.triangulated, false).unwrap();
        prop_assert!(brute_chordal(&out.triangulated));
        let got: BTreeSet<VertexSet> = out.junction_tree.bags.iter().cloned().collect();
        prop_assert_eq!(got, brute_maximal_cliques(&out.triangulated));
        let mt = out.metrics;
        let bags = out.junction_tree.bags.len() as f64;
        prop_assert!(mt.total + TOL >= mt.heaviest);
        prop_assert!(mt.total <= mt.heaviest + bags.log2() + TOL);
    }

    #[test]
    fn junction_tree_verifier_rejects_damage(g in graphs(3, 9)) {
        let greedy = greedy_min_weight(&g, None).unwrap();
        let h = greedy.triangulated(&g).unwrap();
        let peo = match check_chordal(&h) {
            Chordality::Chordal(p) => p,
            Chordality::NotChordal(c) => panic!("greedy output has chordless cycle {c:?}"),
        };
        let jt = build_junction_tree(&extract_cliques(&h, &peo).unwrap()).unwrap();
        jt.verify(&h, true).unwrap();
        let mut missing = jt.clone();
        missing.bags.pop();
        missing.edges.retain(|&(a, b)| a < missing.bags.len() && b < missing.bags.len());
        prop_assert!(missing.verify(&h, false).is_err());
        if jt.bags.len() >= 3 {
            // a path over the bags in a wrong order breaks running intersection
            // unless the bags happen to allow it; a cycle is always wrong
            let mut cyclic = jt.clone();
            let extra = (0..jt.bags.len())
                .flat_map(|a| (a + 1..jt.bags.len()).map(move |b| (a, b)))
                .find(|e| !jt.edges.contains(e));
            if let Some(e) = extra {
                cyclic.edges.push(e);
                prop_assert!(cyclic.verify(&h, false).is_err());
            }
        }
    }

    #[test]
    fn metrics_match_exact_products((g, ss) in with_sizes(1, 10, &[2, 3, 4, 6, 21])) {
        let greedy = greedy_min_weight(&g, Some(&ss)).unwrap();
        let h = greedy.triangulated(&g).unwrap();
        let jt = pipeline::junction_tree_of(&h, false).unwrap();
        let mt = compute_metrics(&jt, &ss).unwrap();
        let products: Vec<u128> = jt
            .bags
            .iter()
            .map(|b| b.iter().map(|&v| u128::from(ss.size(v).unwrap())).product())
            .collect();
        let heaviest = (*products.iter().max().unwrap() as f64).log2();
        let total = (products.iter().sum::<u128>() as f64).log2();
        prop_assert!((mt.heaviest - heaviest).abs() < TOL);
        prop_assert!((mt.total - total).abs() < TOL);
    }
}

#[test]
fn capacities_can_exclude_vertices_from_cuts() {
    // path 1-2-3 with 2 uncuttable
    let g = Graph::path(3);
    let cap = CapacityAssignment::unit(&g).with_infinite([2].iter());
    assert_eq!(cap.get(2), Some(Capacity::Infinite));
    assert_eq!(
        min_st_vertex_cut(&g, &set([1]), &set([3]), &cap).unwrap(),
        CutOutcome::Uncuttable
    );
}
