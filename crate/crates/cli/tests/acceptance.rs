//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process fails if any criterion does.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use cliquetree::cuts::{min_st_vertex_cut, three_way_cut_2approx, CapacityAssignment, CutOutcome};
use cliquetree::decomp::{find_w_decomposition, is_w_decomposition, DecompBudget, Decomposition};
use cliquetree::oracle::{exact_cliquewidth, optimal_three_way_cut};
use cliquetree::pipeline::{self, Config, Mode};
use cliquetree::triangulate::{escalate, triangulate, w_triangulate, weighted_start};
use cliquetree::{EscalationPolicy, Graph, Measure, StateSpace, Vertex, VertexSet};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;
const ALPHA: f64 = 2.0;

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict {
            pass,
            detail: detail.into(),
        }
    }
}

/// Mixed-density random graphs, `n` cycling through `1..=max_n`.
fn corpus(count: usize, max_n: usize, seed: u64) -> Vec<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let n = 1 + i % max_n;
            let pairs = n * (n - 1) / 2;
            let density = [0.15, 0.3, 0.5, 0.75][i / max_n % 4];
            let m = (pairs as f64 * density).round() as usize;
            pipeline::random_graph(n, m, &mut rng).unwrap()
        })
        .collect()
}

fn random_sizes(g: &Graph, choices: &[u64], rng: &mut impl Rng) -> StateSpace {
    StateSpace::new(g.vertices().map(|v| (v, *choices.choose(rng).unwrap())).collect()).unwrap()
}

/// Deletes simplicial vertices one by one; on success returns the largest
/// clique seen, which is the clique number of a chordal graph.
fn simplicial_elimination(g: &Graph) -> Option<usize> {
    let mut left = g.vertex_set();
    let mut largest = 0;
    'outer: while !left.is_empty() {
        for &v in &left {
            let nbrs: Vec<Vertex> = g.neighbors(v).iter().copied().filter(|u| left.contains(u)).collect();
            if nbrs
                .iter()
                .enumerate()
                .all(|(i, &a)| nbrs[i + 1..].iter().all(|&b| g.has_edge(a, b)))
            {
                largest = largest.max(nbrs.len() + 1);
                left.remove(&v);
                continue 'outer;
            }
        }
        return None;
    }
    Some(largest)
}

fn is_chordal(g: &Graph) -> bool {
    simplicial_elimination(g).is_some()
}

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

/// Most internally vertex-disjoint s-t paths, by search over path choices
/// with the used interior vertices memoized.
fn disjoint_paths(g: &Graph, s: Vertex, t: Vertex) -> usize {
    fn simple_paths(
        g: &Graph,
        at: Vertex,
        t: Vertex,
        used: &VertexSet,
        path: &mut Vec<Vertex>,
        out: &mut Vec<VertexSet>,
    ) {
        for &v in g.neighbors(at) {
            if v == t {
                out.push(path.iter().copied().collect());
            } else if !used.contains(&v) && !path.contains(&v) {
                path.push(v);
                simple_paths(g, v, t, used, path, out);
                path.pop();
            }
        }
    }
    fn best(g: &Graph, s: Vertex, t: Vertex, used: VertexSet, memo: &mut BTreeMap<VertexSet, usize>) -> usize {
        if let Some(&b) = memo.get(&used) {
            return b;
        }
        let mut used_s = used.clone();
        used_s.insert(s);
        let mut paths = Vec::new();
        simple_paths(g, s, t, &used_s, &mut Vec::new(), &mut paths);
        let mut top = 0;
        for interior in paths {
            let next: VertexSet = used.union(&interior).copied().collect();
            top = top.max(1 + best(g, s, t, next, memo));
        }
        memo.insert(used, top);
        top
    }
    best(g, s, t, VertexSet::new(), &mut BTreeMap::new())
}

fn criterion_1(corpus: &[Graph]) -> Verdict {
    let start = Instant::now();
    let (mut verdicts, mut violations) = (0, 0);
    for g in corpus {
        let oracle = exact_cliquewidth(g, None).unwrap();
        for k in 1..=g.n().max(1) {
            let r = triangulate(g, &VertexSet::new(), k, ALPHA).unwrap();
            if !r.is_success() {
                verdicts += 1;
                if oracle <= k as f64 {
                    violations += 1;
                }
            }
        }
    }
    let took = start.elapsed();
    Verdict::new(
        corpus.len() >= 500 && violations == 0 && took < Duration::from_secs(300),
        format!(
            "{} graphs, {verdicts} exceeds verdicts, {violations} violations, {:.1} s",
            corpus.len(),
            took.as_secs_f64()
        ),
    )
}

fn criterion_2(corpus: &[Graph], large: &[Graph]) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut successes, mut violations) = (0, 0);
    let mut check = |g: &Graph, w: &VertexSet, k: usize| {
        let r = triangulate(g, w, k, ALPHA).unwrap();
        if r.is_success() {
            successes += 1;
            let h = r.triangulated(g).unwrap();
            let ok =
                simplicial_elimination(&h).is_some_and(|l| l == r.largest_clique_size && l < 5 * k) && h.is_clique(w);
            if !ok {
                violations += 1;
            }
        }
    };
    for g in corpus {
        let vs: Vec<Vertex> = g.vertices().collect();
        for k in 1..=3 {
            check(g, &VertexSet::new(), k);
            let take = rng.random_range(0..=(3 * k - 1).min(vs.len()));
            let w: VertexSet = vs.choose_multiple(&mut rng, take).copied().collect();
            check(g, &w, k);
        }
    }
    for g in large {
        let esc = escalate(g, ALPHA, EscalationPolicy::default(), None).unwrap();
        check(g, &VertexSet::new(), esc.threshold as usize);
    }
    Verdict::new(
        violations == 0 && successes > 0,
        format!(
            "{successes} successes incl. {} graphs up to n = 43, {violations} violations",
            large.len()
        ),
    )
}

fn criterion_3() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut graphs, mut successes, mut violations) = (0, 0, 0);
    for i in 0..240 {
        let n = 1 + i % 8;
        let m = rng.random_range(0..=n * (n - 1) / 2);
        let g = pipeline::random_graph(n, m, &mut rng).unwrap();
        let ss = random_sizes(&g, &[2, 3, 4], &mut rng);
        graphs += 1;
        let mut m = weighted_start(&g, &ss);
        loop {
            let r = w_triangulate(&g, &VertexSet::new(), m, ALPHA, &ss).unwrap();
            if r.is_success() {
                successes += 1;
                let h = r.triangulated(&g).unwrap();
                let heaviest = brute_heaviest_clique(&h, &ss);
                let ok =
                    is_chordal(&h) && (heaviest - r.heaviest_clique_weight).abs() < TOL && heaviest < 5.0 * m + TOL;
                if !ok {
                    violations += 1;
                }
                break;
            }
            m += 0.5;
        }
    }
    Verdict::new(
        graphs >= 200 && violations == 0,
        format!("{graphs} graphs, {successes} successes, {violations} violations"),
    )
}

fn brute_heaviest_clique(h: &Graph, ss: &StateSpace) -> f64 {
    let vs: Vec<Vertex> = h.vertices().collect();
    (1u32..1 << vs.len())
        .map(|mask| {
            (0..vs.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| vs[i])
                .collect::<Vec<_>>()
        })
        .filter(|c| {
            c.iter()
                .enumerate()
                .all(|(i, &a)| c[i + 1..].iter().all(|&b| h.has_edge(a, b)))
        })
        .map(|c| c.iter().map(|&v| ss.weight(v).unwrap()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn criterion_4() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut cases, mut cut, mut violations) = (0, 0, 0);
    while cut < 200 {
        let n = rng.random_range(3..=12);
        let m = rng.random_range(0..=(2 * n).min(n * (n - 1) / 2));
        let g = pipeline::random_graph(n, m, &mut rng).unwrap();
        let mut vs: Vec<Vertex> = g.vertices().collect();
        vs.shuffle(&mut rng);
        let sizes: Vec<usize> = (0..3).map(|_| rng.random_range(1..=2)).collect();
        if sizes.iter().sum::<usize>() > n {
            continue;
        }
        let mut it = vs.into_iter();
        let groups: Vec<VertexSet> = sizes.iter().map(|&s| it.by_ref().take(s).collect()).collect();
        let ss = random_sizes(&g, &[2, 3, 5, 9], &mut rng);
        let cap = CapacityAssignment::from_measure(&g, Measure::Weighted(&ss));
        let approx = three_way_cut_2approx(&g, &groups[0], &groups[1], &groups[2], &cap).unwrap();
        let exact = optimal_three_way_cut(&g, &groups[0], &groups[1], &groups[2], &cap).unwrap();
        cases += 1;
        let ok = match (&approx, &exact) {
            (CutOutcome::Uncuttable, CutOutcome::Uncuttable) => true,
            (CutOutcome::Cut(x), CutOutcome::Cut(o)) => {
                cut += 1;
                let apart =
                    (0..3).all(|i| (0..3).all(|j| i == j || reach(&g, &groups[i], &x.cut).is_disjoint(&groups[j])));
                let weight: f64 = x.cut.iter().map(|&v| ss.weight(v).unwrap()).sum();
                apart && (weight - x.weight).abs() < TOL && x.weight <= 2.0 * o.weight + TOL
            }
            _ => false,
        };
        if !ok {
            violations += 1;
        }
    }
    Verdict::new(
        violations == 0,
        format!("{cases} terminal triples, {cut} of them cuttable, {violations} violations"),
    )
}

fn criterion_5() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut cases, mut violations) = (0, 0);
    while cases < 240 {
        let n = rng.random_range(2..=10);
        let m = rng.random_range(0..=n * (n - 1) / 2);
        let g = pipeline::random_graph(n, m, &mut rng).unwrap();
        let s = rng.random_range(1..=n);
        let t = rng.random_range(1..=n);
        if s == t || g.has_edge(s, t) {
            continue;
        }
        cases += 1;
        let outcome = min_st_vertex_cut(&g, &[s].into(), &[t].into(), &CapacityAssignment::unit(&g)).unwrap();
        let paths = disjoint_paths(&g, s, t);
        match outcome {
            CutOutcome::Cut(c) if (c.weight - paths as f64).abs() < TOL => {}
            _ => violations += 1,
        }
    }
    Verdict::new(violations == 0, format!("{cases} s-t pairs, {violations} violations"))
}

fn criterion_6(corpus: &[Graph]) -> Verdict {
    let (mut kept, mut violations) = (0, 0);
    for g in corpus {
        let out = pipeline::run(g, None, &Config::default()).unwrap();
        if !is_chordal(&out.triangulated) {
            violations += 1;
        }
        for e in &out.fill_edges {
            kept += 1;
            let rest: BTreeSet<_> = out.fill_edges.iter().copied().filter(|f| f != e).collect();
            if is_chordal(&g.with_edges(&rest).unwrap()) {
                violations += 1;
            }
        }
    }
    Verdict::new(
        violations == 0,
        format!(
            "{} graphs, {kept} kept fill edges, {violations} violations",
            corpus.len()
        ),
    )
}

fn criterion_7() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut failures = Vec::new();
    let mut check = |name: String, g: &Graph, want: usize| {
        let l = pipeline::run(g, None, &Config::default()).unwrap().report.l;
        let oracle = exact_cliquewidth(g, None).unwrap();
        if l != want || oracle != want as f64 {
            failures.push(format!("{name}: l = {l}, oracle = {oracle}"));
        }
    };
    for n in 2..=15 {
        let edges: Vec<(Vertex, Vertex)> = (2..=n).map(|v| (rng.random_range(1..v), v)).collect();
        check(format!("tree on {n}"), &Graph::from_edges(1..=n, edges).unwrap(), 2);
    }
    for n in 4..=12 {
        check(format!("C{n}"), &Graph::cycle(n), 3);
    }
    for j in 1..=10 {
        check(format!("K{j}"), &Graph::complete(j), j);
    }
    let detail = if failures.is_empty() {
        "14 trees, C4..C12, K1..K10 exact".to_string()
    } else {
        failures.join("; ")
    };
    Verdict::new(failures.is_empty(), detail)
}

fn criterion_8() -> Verdict {
    // a-b-c-d-e as 1..5
    let g = Graph::path(5);
    let w: VertexSet = [2, 4].into();
    let budget = DecompBudget::cardinality(1, ALPHA);
    let found = find_w_decomposition(&g, &w, &budget).unwrap();
    let expected = Decomposition {
        x: [3].into(),
        a: [1, 2].into(),
        b: [4, 5].into(),
        c: VertexSet::new(),
    };
    let found_ok = found
        .as_ref()
        .is_some_and(|d| *d == expected || is_w_decomposition(d, &w, &budget));
    let variant = Decomposition {
        x: [4].into(),
        a: [1, 2, 3].into(),
        b: [5].into(),
        c: VertexSet::new(),
    };
    let rejected = !is_w_decomposition(&variant, &[2, 3].into(), &budget);
    Verdict::new(
        found_ok && rejected,
        format!(
            "found {}, W = {{2, 3}} with X = {{4}} {}",
            match &found {
                Some(d) => format!("X = {:?}, A = {:?}, B = {:?}, C = {:?}", d.x, d.a, d.b, d.c),
                None => "nothing".into(),
            },
            if rejected { "rejected" } else { "accepted" }
        ),
    )
}

fn criterion_9(dir: &Path) -> Verdict {
    let bin = env!("CARGO_BIN_EXE_cliquetree");
    let mut times = Vec::new();
    let mut ok = true;
    for seed in 1..=5u64 {
        let (gr, st) = (dir.join(format!("g{seed}.gr")), dir.join(format!("g{seed}.st")));
        let gen = Command::new(bin)
            .args([
                "gen",
                "--n",
                "43",
                "--m",
                "110",
                "--sizes",
                "3..21",
                "--seed",
                &seed.to_string(),
            ])
            .arg("--out")
            .arg(&gr)
            .arg("--states-out")
            .arg(&st)
            .status()
            .unwrap();
        let start = Instant::now();
        let run = Command::new(bin)
            .arg("triangulate")
            .arg(&gr)
            .arg("--states")
            .arg(&st)
            .output()
            .unwrap();
        let took = start.elapsed();
        times.push(took.as_secs_f64());
        ok &= gen.success() && run.status.success() && took < Duration::from_secs(120);
    }
    let worst = times.iter().copied().fold(0.0, f64::max);
    Verdict::new(ok, format!("5 instances, slowest {worst:.1} s, limit 120 s"))
}

fn criterion_10(corpus: &[Graph], large: &[Graph]) -> Verdict {
    let (mut bounded, mut violations, mut worst) = (0, 0, 0.0f64);
    for g in corpus.iter().chain(large) {
        let esc = escalate(g, ALPHA, EscalationPolicy::default(), None).unwrap();
        let k = esc.threshold;
        if esc.failed_at == Some(k - 1.0) {
            bounded += 1;
            let l = esc.result.largest_clique_size as f64;
            worst = worst.max(l / k);
            if esc.result.ratio_bound != Some(l / k) || l / k > 5.0 {
                violations += 1;
            }
        }
        let report = pipeline::run(g, None, &Config::default()).unwrap().report;
        if report.lower_bound >= report.k_accepted && report.k_accepted > 0.0 {
            let want = report.l as f64 / report.k_accepted;
            worst = worst.max(want);
            if report.ratio_bound != Some(want) || want > 5.0 {
                violations += 1;
            }
        }
    }
    Verdict::new(
        violations == 0 && bounded > 0,
        format!("{bounded} runs with a failure at k - 1, largest l/k {worst:.3}, {violations} violations"),
    )
}

fn criterion_11(corpus: &[Graph]) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut trees, mut violations) = (0, 0);
    for g in corpus {
        let ss = random_sizes(g, &(2..=21).collect::<Vec<_>>(), &mut rng);
        for mode in [Mode::Cardinality, Mode::Weighted] {
            let out = pipeline::run(
                g,
                Some(&ss),
                &Config {
                    mode,
                    ..Config::default()
                },
            )
            .unwrap();
            trees += 1;
            let mt = out.metrics;
            let bags = out.junction_tree.bags.len();
            let products: Vec<u128> = out
                .junction_tree
                .bags
                .iter()
                .map(|b| b.iter().map(|&v| u128::from(ss.size(v).unwrap())).product())
                .collect();
            let exact_m = products.iter().copied().max().map_or(0.0, |p| (p as f64).log2());
            let exact_t = match products.iter().sum::<u128>() {
                0 => 0.0,
                s => (s as f64).log2(),
            };
            let ok = mt.total + TOL >= mt.heaviest
                && mt.total <= mt.heaviest + (bags.max(1) as f64).log2() + TOL
                && (mt.heaviest - exact_m).abs() < TOL
                && (mt.total - exact_t).abs() < TOL;
            if !ok {
                violations += 1;
            }
        }
    }
    Verdict::new(
        violations == 0,
        format!("{trees} junction trees, {violations} violations"),
    )
}

type Check<'a> = Box<dyn Fn() -> Verdict + 'a>;

fn main() -> ExitCode {
    let corpus = corpus(600, 10, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let large: Vec<Graph> = [(20, 40), (30, 70), (43, 110), (43, 110)]
        .iter()
        .map(|&(n, m)| pipeline::random_graph(n, m, &mut rng).unwrap())
        .collect();
    let dir = tempfile::tempdir().unwrap();

    let criteria: Vec<(&str, Check)> = vec![
        (
            "soundness of exceeds verdicts against the exact oracle",
            Box::new(|| criterion_1(&corpus)),
        ),
        (
            "successes are chordal with largest clique below 5k",
            Box::new(|| criterion_2(&corpus, &large)),
        ),
        ("weighted successes stay below 5m", Box::new(criterion_3)),
        ("3-way cut within twice the optimum", Box::new(criterion_4)),
        ("s-t vertex cut equals disjoint path count", Box::new(criterion_5)),
        ("minimized fill is minimal", Box::new(|| criterion_6(&corpus))),
        ("exact on trees, cycles and cliques", Box::new(criterion_7)),
        ("chain example", Box::new(criterion_8)),
        (
            "43 vertices and 110 edges within two minutes",
            Box::new(|| criterion_9(dir.path())),
        ),
        (
            "ratio bound reported and at most 5",
            Box::new(|| criterion_10(&corpus, &large)),
        ),
        ("junction tree metrics consistent", Box::new(|| criterion_11(&corpus))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        println!(
            "criterion {:>2} {}: {} ({})",
            i + 1,
            name,
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
        failed += usize::from(!v.pass);
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
