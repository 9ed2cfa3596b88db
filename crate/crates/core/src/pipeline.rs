//! End-to-end runs: simplicial stripping, per-component escalation, fill
//! minimization and the junction tree with its metrics. Also the baseline
//! comparison, oracle verification, random instances and Δ statistics.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::Instant;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;
use serde::Serialize;

use crate::chordal::{build_junction_tree, check_chordal, compute_metrics, extract_cliques, Chordality};
use crate::chordal::{JunctionTree, Metrics};
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, Vertex};
use crate::minimize::minimize_fill;
use crate::oracle::exact_cliquewidth;
use crate::state::{le, lt, Measure, StateSpace};
use crate::triangulate::{escalate, greedy_min_weight, EscalationPolicy, Jump, Round, Trace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Thresholds on clique size.
    Cardinality,
    /// Thresholds on log2 state space.
    Weighted,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Config {
    pub alpha: f64,
    pub mode: Mode,
    pub jump: Jump,
    pub minimize: bool,
    /// Join per-component junction trees into one tree.
    pub force_tree: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            alpha: 2.0,
            mode: Mode::Cardinality,
            jump: Jump::Increment,
            minimize: true,
            force_tree: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentReport {
    pub vertices: usize,
    pub threshold: f64,
    pub failed_at: Option<f64>,
    /// Largest clique of this component's triangulation before
    /// minimization.
    pub l: usize,
    pub heaviest: f64,
    pub rounds: Vec<Round>,
    pub trace: Trace,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub input: String,
    pub mode: Mode,
    pub alpha: f64,
    pub n: usize,
    pub m: usize,
    pub simplicial: usize,
    /// Threshold at which the whole graph is triangulated: the largest
    /// accepted component threshold or simplicial clique.
    pub k_accepted: f64,
    /// Proven lower bound on the (weighted) cliquewidth.
    pub lower_bound: f64,
    /// Largest bag size of the junction tree.
    pub l: usize,
    /// Heaviest bag under the run's measure.
    pub heaviest: f64,
    /// `l / k_accepted` when the cliquewidth is known to be at least
    /// `k_accepted`; in weighted mode, `heaviest / lower_bound`.
    pub ratio_bound: Option<f64>,
    #[serde(rename = "M")]
    pub heaviest_log_states: f64,
    #[serde(rename = "T")]
    pub total_log_states: f64,
    pub bags: usize,
    pub fills_before: usize,
    pub fills_after: usize,
    pub wall_ms: u64,
    pub components: Vec<ComponentReport>,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: RunReport,
    pub fill_edges: BTreeSet<Edge>,
    pub triangulated: Graph,
    pub junction_tree: JunctionTree,
    pub metrics: Metrics,
}

/// Junction tree of a chordal graph, re-verified.
pub fn junction_tree_of(h: &Graph, force_tree: bool) -> Result<JunctionTree> {
    let peo = match check_chordal(h) {
        Chordality::Chordal(peo) => peo,
        Chordality::NotChordal(cycle) => {
            return Err(Error::invariant(format!(
                "triangulation has the chordless cycle {cycle:?}"
            )))
        }
    };
    let jt = build_junction_tree(&extract_cliques(h, &peo)?)?;
    let jt = if force_tree { jt } else { jt.into_forest() };
    jt.verify(h, force_tree)?;
    Ok(jt)
}

/// Triangulates `g`, minimizes the fill and builds the junction tree.
/// Without a state space every vertex has 2 states.
pub fn run(g: &Graph, ss: Option<&StateSpace>, cfg: &Config) -> Result<Outcome> {
    let start = Instant::now();
    let binary;
    let states = match ss {
        Some(ss) => {
            ss.covers(g)?;
            ss
        }
        None => {
            binary = StateSpace::uniform(g, 2)?;
            &binary
        }
    };
    let (measure, escalation_ss) = match cfg.mode {
        Mode::Cardinality => (Measure::Cardinality, None),
        Mode::Weighted => (Measure::Weighted(states), Some(states)),
    };

    let (residual, simplicial) = g.strip_simplicial();
    let mut bound = 0.0f64;
    let mut peeled = g.clone();
    for &v in &simplicial {
        bound = bound.max(measure.weight(v) + measure.of(peeled.neighbors(v)));
        peeled.remove_vertex(v);
    }
    let mut k_accepted = bound;
    let mut lower_bound = bound;

    let policy = EscalationPolicy {
        start: None,
        jump: cfg.jump,
    };
    let mut fills = BTreeSet::new();
    let mut ordering: Vec<Vertex> = simplicial.clone();
    let mut components = Vec::new();
    for comp in residual.connected_components() {
        let sub = residual.induced_subgraph(&comp)?;
        let esc = escalate(&sub, cfg.alpha, policy, escalation_ss)?;
        k_accepted = k_accepted.max(esc.threshold);
        if let Some(f) = esc.failed_at {
            let proven = if measure.is_cardinality() { f + 1.0 } else { f };
            lower_bound = lower_bound.max(proven);
        }
        fills.extend(esc.result.fill_edges.iter().copied());
        ordering.extend(&esc.result.ordering);
        components.push(ComponentReport {
            vertices: sub.n(),
            threshold: esc.threshold,
            failed_at: esc.failed_at,
            l: esc.result.largest_clique_size,
            heaviest: esc.result.heaviest_clique_weight,
            rounds: esc.rounds,
            trace: esc.result.trace,
        });
    }

    let fills_before = fills.len();
    if cfg.minimize {
        fills = minimize_fill(g, &fills, &ordering)?.kept;
    }
    let triangulated = g.with_edges(&fills)?;
    let junction_tree = junction_tree_of(&triangulated, cfg.force_tree)?;
    let metrics = compute_metrics(&junction_tree, states)?;
    let l = metrics.largest_bag_size;
    let heaviest = junction_tree.bags.iter().map(|b| measure.of(b)).fold(0.0, f64::max);
    let ratio_bound = match cfg.mode {
        Mode::Cardinality if lower_bound >= k_accepted && k_accepted > 0.0 => Some(l as f64 / k_accepted),
        Mode::Weighted if lower_bound > 0.0 => Some(heaviest / lower_bound),
        _ => None,
    };
    let report = RunReport {
        input: String::new(),
        mode: cfg.mode,
        alpha: cfg.alpha,
        n: g.n(),
        m: g.m(),
        simplicial: simplicial.len(),
        k_accepted,
        lower_bound,
        l,
        heaviest,
        ratio_bound,
        heaviest_log_states: metrics.heaviest,
        total_log_states: metrics.total,
        bags: junction_tree.bags.len(),
        fills_before,
        fills_after: fills.len(),
        wall_ms: start.elapsed().as_millis() as u64,
        components,
    };
    Ok(Outcome {
        report,
        fill_edges: fills,
        triangulated,
        junction_tree,
        metrics,
    })
}

/// Metrics of the greedy minimum-weight heuristic followed by fill
/// minimization.
pub fn enhanced_greedy(g: &Graph, ss: &StateSpace) -> Result<Metrics> {
    let r = greedy_min_weight(g, Some(ss))?;
    let kept = minimize_fill(g, &r.fill_edges, &r.ordering)?.kept;
    let jt = junction_tree_of(&g.with_edges(&kept)?, false)?;
    compute_metrics(&jt, ss)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub recursive: Metrics,
    pub greedy: Metrics,
}

/// Weighted recursive triangulation against the enhanced greedy baseline
/// on one instance.
pub fn compare_instance(g: &Graph, ss: &StateSpace, cfg: &Config) -> Result<Comparison> {
    let cfg = Config {
        mode: Mode::Weighted,
        ..*cfg
    };
    let recursive = run(g, Some(ss), &cfg)?.metrics;
    let greedy = enhanced_greedy(g, ss)?;
    Ok(Comparison { recursive, greedy })
}

/// Runs `trials` comparisons on `g`, drawing fresh state sizes for each
/// trial from `sizes`. Results are in trial order whatever the thread
/// schedule.
pub fn compare_trials(
    g: &Graph,
    sizes: SizeDistribution,
    trials: usize,
    seed: u64,
    cfg: &Config,
) -> Result<Vec<Comparison>> {
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            let ss = random_state_space(g, sizes, &mut rng)?;
            compare_instance(g, &ss, cfg)
        })
        .collect()
}

/// Win count and the average and largest margin of the wins.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Wins {
    pub count: usize,
    pub delta_ave: f64,
    pub delta_max: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct CompareRow {
    pub recursive: Wins,
    pub ties: usize,
    pub greedy: Wins,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct CompareTable {
    pub trials: usize,
    #[serde(rename = "M")]
    pub heaviest: CompareRow,
    #[serde(rename = "T")]
    pub total: CompareRow,
}

fn row(pairs: impl Iterator<Item = (f64, f64)>) -> CompareRow {
    let (mut ours, mut theirs, mut ties) = (Vec::new(), Vec::new(), 0);
    for (r, g) in pairs {
        if lt(r, g) {
            ours.push(g - r);
        } else if lt(g, r) {
            theirs.push(r - g);
        } else {
            ties += 1;
        }
    }
    let wins = |d: &[f64]| Wins {
        count: d.len(),
        delta_ave: if d.is_empty() {
            0.0
        } else {
            d.iter().sum::<f64>() / d.len() as f64
        },
        delta_max: d.iter().copied().fold(0.0, f64::max),
    };
    CompareRow {
        recursive: wins(&ours),
        ties,
        greedy: wins(&theirs),
    }
}

pub fn tabulate(results: &[Comparison]) -> CompareTable {
    CompareTable {
        trials: results.len(),
        heaviest: row(results.iter().map(|c| (c.recursive.heaviest, c.greedy.heaviest))),
        total: row(results.iter().map(|c| (c.recursive.total, c.greedy.total))),
    }
}

impl fmt::Display for CompareTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<3}{:^26}{:^6}{:^26}", "", "W-Triangulate", "Eq", "Greedy")?;
        writeln!(
            f,
            "{:<3}{:>6}{:>10}{:>10}{:6}{:>6}{:>10}{:>10}",
            "", "#", "Δ_ave", "Δ_max", "", "#", "Δ_ave", "Δ_max"
        )?;
        for (name, r) in [("M", &self.heaviest), ("T", &self.total)] {
            writeln!(
                f,
                "{:<3}{:>6}{:>10.2}{:>10.2}{:^6}{:>6}{:>10.2}{:>10.2}",
                name,
                r.recursive.count,
                r.recursive.delta_ave,
                r.recursive.delta_max,
                r.ties,
                r.greedy.count,
                r.greedy.delta_ave,
                r.greedy.delta_max
            )?;
        }
        Ok(())
    }
}

/// How state sizes are drawn for random instances.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum SizeDistribution {
    Uniform {
        lo: u64,
        hi: u64,
    },
    /// `lo` plus a geometric number of steps with mean `mean - lo`, redrawn
    /// when it lands above `hi`.
    Skewed {
        lo: u64,
        hi: u64,
        mean: f64,
    },
}

impl SizeDistribution {
    fn check(&self) -> Result<()> {
        let (lo, hi) = match *self {
            SizeDistribution::Uniform { lo, hi } => (lo, hi),
            SizeDistribution::Skewed { lo, hi, mean } => {
                if !(mean > lo as f64 && mean < hi as f64) {
                    return Err(Error::domain(format!(
                        "mean {mean} must lie strictly inside {lo}..{hi}"
                    )));
                }
                (lo, hi)
            }
        };
        if lo < 2 || lo > hi {
            return Err(Error::domain(format!(
                "size range {lo}..{hi} must satisfy 2 <= lo <= hi"
            )));
        }
        Ok(())
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> u64 {
        match *self {
            SizeDistribution::Uniform { lo, hi } => rng.random_range(lo..=hi),
            SizeDistribution::Skewed { lo, hi, mean } => {
                let steps = Geometric::new(1.0 / (1.0 + mean - lo as f64)).expect("valid probability");
                loop {
                    let s = lo.saturating_add(steps.sample(rng));
                    if s <= hi {
                        return s;
                    }
                }
            }
        }
    }
}

/// A uniformly random simple graph on `1..=n` with exactly `m` edges.
pub fn random_graph<R: Rng>(n: usize, m: usize, rng: &mut R) -> Result<Graph> {
    let pairs = n * n.saturating_sub(1) / 2;
    if m > pairs {
        return Err(Error::domain(format!(
            "{m} edges do not fit in a simple graph on {n} vertices"
        )));
    }
    let edges = index::sample(rng, pairs, m).into_iter().map(|mut i| {
        // pairs (u, v), u < v, listed row by row
        let mut u = 0;
        while i >= n - 1 - u {
            i -= n - 1 - u;
            u += 1;
        }
        (u + 1, u + 2 + i)
    });
    Graph::from_edges(1..=n, edges)
}

pub fn random_state_space<R: Rng>(g: &Graph, sizes: SizeDistribution, rng: &mut R) -> Result<StateSpace> {
    sizes.check()?;
    StateSpace::new(g.vertices().map(|v| (v, sizes.sample(rng))).collect())
}

/// A random instance, reproducible from `seed`.
pub fn generate(n: usize, m: usize, sizes: SizeDistribution, seed: u64) -> Result<(Graph, StateSpace)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random_graph(n, m, &mut rng)?;
    let ss = random_state_space(&g, sizes, &mut rng)?;
    Ok((g, ss))
}

/// Counts of Δ = l − k over a set of runs.
pub fn delta_histogram(runs: impl IntoIterator<Item = (usize, usize)>) -> BTreeMap<i64, usize> {
    let mut hist = BTreeMap::new();
    for (l, k) in runs {
        *hist.entry(l as i64 - k as i64).or_insert(0) += 1;
    }
    hist
}

/// "Δ was 0 in 6 graphs, 1 in 14 graphs and 2 in 1 graph."
pub fn delta_sentence(hist: &BTreeMap<i64, usize>) -> String {
    let parts: Vec<String> = hist
        .iter()
        .map(|(d, c)| format!("{d} in {c} graph{}", if *c == 1 { "" } else { "s" }))
        .collect();
    match parts.as_slice() {
        [] => "Δ was not observed.".to_string(),
        [one] => format!("Δ was {one}."),
        [init @ .., last] => format!("Δ was {} and {last}.", init.join(", ")),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verification {
    pub n: usize,
    pub oracle: f64,
    pub k_accepted: f64,
    pub failed_at: Option<f64>,
    /// Largest clique (or heaviest clique, by weight) before minimization.
    pub l: f64,
    pub chordal: bool,
    /// `l < (2 alpha + 1) k_accepted`.
    pub bound_holds: bool,
    /// Failure at `failed_at` is consistent with the oracle.
    pub sound: bool,
}

impl Verification {
    pub fn holds(&self) -> bool {
        self.chordal && self.bound_holds && self.sound
    }
}

/// Escalates on the whole graph and checks the result against the exact
/// cliquewidth.
pub fn verify(g: &Graph, ss: Option<&StateSpace>, cfg: &Config) -> Result<Verification> {
    let binary;
    let escalation_ss = match (cfg.mode, ss) {
        (Mode::Cardinality, _) => None,
        (Mode::Weighted, Some(ss)) => Some(ss),
        (Mode::Weighted, None) => {
            binary = StateSpace::uniform(g, 2)?;
            Some(&binary)
        }
    };
    let oracle = exact_cliquewidth(g, escalation_ss)?;
    let policy = EscalationPolicy {
        start: None,
        jump: cfg.jump,
    };
    let esc = escalate(g, cfg.alpha, policy, escalation_ss)?;
    let r = &esc.result;
    let l = match escalation_ss {
        None => r.largest_clique_size as f64,
        Some(_) => r.heaviest_clique_weight,
    };
    let chordal = crate::chordal::is_chordal(&r.triangulated(g)?);
    let bound_holds = lt(l, (2.0 * cfg.alpha + 1.0) * esc.threshold);
    let sound = esc.failed_at.is_none_or(|f| !le(oracle, f));
    Ok(Verification {
        n: g.n(),
        oracle,
        k_accepted: esc.threshold,
        failed_at: esc.failed_at,
        l,
        chordal,
        bound_holds,
        sound,
    })
}
