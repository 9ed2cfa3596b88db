//! W-decompositions: partitions (X, A, B, C) of a graph with no edges
//! between A, B and C whose parts, together with the monitored set W, stay
//! under the size (or weight) bounds set by a threshold `t` and `alpha`.
//!
//! The search enumerates assignments of W to (W_A, W_B, W_C, W_X) and turns
//! each into a candidate with a vertex cut: a 3-way cut when W_A is light
//! (procedure one), a 2-way cut between W_A and the rest otherwise
//! (procedure two). Every candidate is checked against the definition
//! before it is returned.

use crate::cuts::Capacity;
use crate::error::{Error, Result};
use crate::flow::{Dense, DenseCut, Flow, FlowNet};
use crate::graph::{Graph, VertexSet};
use crate::state::{le, lt, Measure, EPS};

/// Threshold `t` (k or m), the cut approximation factor `alpha`, and how
/// sets are measured.
#[derive(Clone, Copy, Debug)]
pub struct DecompBudget<'a> {
    pub threshold: f64,
    pub alpha: f64,
    pub measure: Measure<'a>,
}

impl<'a> DecompBudget<'a> {
    pub fn cardinality(k: usize, alpha: f64) -> Self {
        DecompBudget {
            threshold: k as f64,
            alpha,
            measure: Measure::Cardinality,
        }
    }

    pub fn weighted(m: f64, alpha: f64, measure: Measure<'a>) -> Self {
        DecompBudget {
            threshold: m,
            alpha,
            measure,
        }
    }

    pub fn check(&self) -> Result<()> {
        if !(self.threshold.is_finite() && self.threshold > 0.0) {
            return Err(Error::domain(format!("threshold {} must be positive", self.threshold)));
        }
        if !(self.alpha.is_finite() && self.alpha >= 1.0) {
            return Err(Error::domain(format!("alpha {} must be at least 1", self.alpha)));
        }
        if self.measure.is_cardinality() && self.threshold.fract() != 0.0 {
            return Err(Error::domain("cardinality threshold must be an integer"));
        }
        Ok(())
    }

    /// Graphs lighter than this are handled by the leaf heuristic.
    pub fn leaf_bound(&self) -> f64 {
        (2.0 * self.alpha + 1.0) * self.threshold
    }

    /// Upper bound (exclusive) on the monitored set W.
    pub fn w_bound(&self) -> f64 {
        (self.alpha + 1.0) * self.threshold
    }

    pub fn x_bound(&self) -> f64 {
        self.alpha * self.threshold
    }

    fn integral(&self) -> bool {
        self.measure.is_cardinality()
    }
}

/// An assignment of the monitored set W to four disjoint parts.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WPartition {
    pub wa: VertexSet,
    pub wb: VertexSet,
    pub wc: VertexSet,
    pub wx: VertexSet,
}

impl WPartition {
    pub fn union(&self) -> VertexSet {
        let mut all = self.wa.clone();
        all.extend(&self.wb);
        all.extend(&self.wc);
        all.extend(&self.wx);
        all
    }

    fn check(&self, measure: Measure<'_>) -> Result<()> {
        let parts = [&self.wa, &self.wb, &self.wc, &self.wx];
        if parts.iter().map(|p| p.len()).sum::<usize>() != self.union().len() {
            return Err(Error::domain("partition parts overlap"));
        }
        let (a, b, c) = (measure.of(&self.wa), measure.of(&self.wb), measure.of(&self.wc));
        if a + EPS < b || b + EPS < c {
            return Err(Error::domain(
                "partition needs measure(W_A) >= measure(W_B) >= measure(W_C)",
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub x: VertexSet,
    pub a: VertexSet,
    pub b: VertexSet,
    pub c: VertexSet,
}

impl Decomposition {
    pub fn vertices(&self) -> VertexSet {
        let mut all = self.x.clone();
        all.extend(&self.a);
        all.extend(&self.b);
        all.extend(&self.c);
        all
    }

    /// Partition of V(g), A and B nonempty, no edge between two of A, B, C.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        let parts = [&self.x, &self.a, &self.b, &self.c];
        let total: usize = parts.iter().map(|p| p.len()).sum();
        if total != g.n() || self.vertices() != g.vertex_set() {
            return Err(Error::invariant("decomposition is not a partition of the vertex set"));
        }
        if self.a.is_empty() || self.b.is_empty() {
            return Err(Error::invariant("decomposition has an empty A or B"));
        }
        for (i, p) in [&self.a, &self.b, &self.c].iter().enumerate() {
            for q in [&self.a, &self.b, &self.c].iter().skip(i + 1) {
                if p.iter().any(|&u| g.neighbors(u).iter().any(|v| q.contains(v))) {
                    return Err(Error::invariant("decomposition has an edge between two sides"));
                }
            }
        }
        Ok(())
    }
}

/// The size bounds of a W-decomposition, including the premise
/// `measure(V) >= (2 alpha + 1) t`.
pub fn is_w_decomposition(d: &Decomposition, w: &VertexSet, budget: &DecompBudget<'_>) -> bool {
    let m = budget.measure;
    let v = m.of(&d.vertices());
    if lt(v, budget.leaf_bound()) || !w.iter().all(|x| d.vertices().contains(x)) {
        return false;
    }
    requirements(budget, w, &d.x, [&d.a, &d.b, &d.c])
        .iter()
        .all(|r| r.holds(budget.threshold))
}

/// One threshold condition `lhs < coef * t` (strict) or `lhs <= coef * t`.
#[derive(Clone, Copy, Debug)]
struct Requirement {
    lhs: f64,
    coef: f64,
    strict: bool,
}

impl Requirement {
    fn holds(&self, t: f64) -> bool {
        if self.strict {
            lt(self.lhs, self.coef * t)
        } else {
            le(self.lhs, self.coef * t)
        }
    }

    /// Smallest threshold at which the condition holds.
    fn satisfied_at(&self, integral: bool) -> f64 {
        if !integral {
            return if self.strict {
                (self.lhs + 2.0 * EPS) / self.coef
            } else {
                self.lhs / self.coef
            };
        }
        let mut k = (self.lhs / self.coef).floor().max(1.0);
        while k > 1.0 && self.holds(k - 1.0) {
            k -= 1.0;
        }
        while !self.holds(k) {
            k += 1.0;
        }
        k
    }
}

fn requirements(budget: &DecompBudget<'_>, w: &VertexSet, x: &VertexSet, sides: [&VertexSet; 3]) -> Vec<Requirement> {
    let m = budget.measure;
    let (wb, xb) = (budget.alpha + 1.0, budget.alpha);
    let mx = m.of(x);
    let mut reqs = vec![
        Requirement {
            lhs: m.of(w),
            coef: wb,
            strict: true,
        },
        Requirement {
            lhs: mx,
            coef: xb,
            strict: false,
        },
    ];
    for side in sides {
        let lhs = m.of(w.intersection(side)) + mx;
        reqs.push(Requirement {
            lhs,
            coef: wb,
            strict: true,
        });
    }
    reqs
}

/// Smallest threshold at which a graph of measure `mv` becomes a leaf.
pub(crate) fn leaf_flip(budget: &DecompBudget<'_>, mv: f64) -> f64 {
    let coef = 2.0 * budget.alpha + 1.0;
    Requirement {
        lhs: mv,
        coef,
        strict: true,
    }
    .satisfied_at(budget.integral())
}

/// Bookkeeping for threshold escalation and for the run trace.
#[derive(Clone, Debug, Default)]
pub struct Probe {
    /// Smallest threshold at which some tested candidate would have passed
    /// every size bound.
    pub kstar: Option<f64>,
    /// Smallest threshold that flips at least one failed comparison.
    pub margin: Option<f64>,
    pub partitions: u64,
    pub candidates: u64,
}

impl Probe {
    pub(crate) fn note_margin(&mut self, t: f64) {
        self.margin = Some(self.margin.map_or(t, |m| m.min(t)));
    }

    fn note_kstar(&mut self, t: f64) {
        self.kstar = Some(self.kstar.map_or(t, |m| m.min(t)));
    }
}

const A: u8 = 0;
const B: u8 = 1;
const C: u8 = 2;
const X: u8 = 3;

/// A decomposition in dense indices: side label per vertex.
#[derive(Clone, Debug)]
struct Candidate {
    side: Vec<u8>,
    x_measure: f64,
}

struct Searcher<'b, 'p> {
    d: Dense,
    wt: Vec<f64>,
    cap: Vec<Capacity>,
    budget: DecompBudget<'b>,
    w: Vec<usize>,
    in_w: Vec<bool>,
    net: FlowNet,
    /// W vertices not yet placed in a terminal group, during the DFS.
    detached: Vec<bool>,
    /// Flows W_A to W_B and W_A to W_C on the graph minus `detached`,
    /// grown along the DFS.
    separators: [FlowNet; 2],
    /// Saved residuals of `separators`, one entry per DFS depth.
    saved: Vec<[(Vec<f64>, f64); 2]>,
    /// Measure of W_X and of the heaviest side's share of W for the
    /// partition being tried.
    frame: (f64, f64),
    probe: &'p mut Probe,
}

impl<'b, 'p> Searcher<'b, 'p> {
    fn new(g: &Graph, w: &VertexSet, budget: DecompBudget<'b>, probe: &'p mut Probe) -> Self {
        let d = Dense::new(g);
        let wt: Vec<f64> = d.ids.iter().map(|&v| budget.measure.weight(v)).collect();
        let cap = wt.iter().map(|&x| Capacity::Finite(x)).collect();
        let w: Vec<usize> = w.iter().map(|v| d.index[v]).collect();
        let mut in_w = vec![false; d.n()];
        for &i in &w {
            in_w[i] = true;
        }
        let net = FlowNet::new(&d);
        let detached = in_w.clone();
        let separators = [FlowNet::new(&d), FlowNet::new(&d)];
        let saved = vec![Default::default(); w.len()];
        Searcher {
            d,
            wt,
            cap,
            budget,
            w,
            in_w,
            net,
            detached,
            separators,
            saved,
            frame: (0.0, 0.0),
            probe,
        }
    }

    fn to_set(&self, idx: impl IntoIterator<Item = usize>) -> VertexSet {
        idx.into_iter().map(|i| self.d.ids[i]).collect()
    }

    fn decomposition(&self, cand: &Candidate) -> Decomposition {
        let part = |s: u8| self.to_set((0..self.d.n()).filter(|&i| cand.side[i] == s));
        Decomposition {
            x: part(X),
            a: part(A),
            b: part(B),
            c: part(C),
        }
    }

    /// Builds sides from a cut. `terminals[0]` seeds A; `terminals[1]` seeds
    /// B when `three_sided`, otherwise B takes everything left over.
    fn candidate(&self, wx: &[bool], cut: &[usize], terminals: [&[usize]; 2], three_sided: bool) -> Option<Candidate> {
        let n = self.d.n();
        let mut blocked = wx.to_vec();
        for &v in cut {
            blocked[v] = true;
        }
        let (label, ncomp) = self.d.components(&blocked);
        let mut comp_side = vec![if three_sided { C } else { B }; ncomp];
        if three_sided {
            for &t in terminals[1] {
                comp_side[label[t]] = B;
            }
        }
        for &t in terminals[0] {
            comp_side[label[t]] = A;
        }
        let side: Vec<u8> = (0..n)
            .map(|i| if blocked[i] { X } else { comp_side[label[i]] })
            .collect();
        if !side.contains(&A) || !side.contains(&B) {
            return None;
        }
        let x_measure = (0..n).filter(|&i| side[i] == X).map(|i| self.wt[i]).sum();
        Some(Candidate { side, x_measure })
    }

    fn requirements(&self, cand: &Candidate) -> Vec<Requirement> {
        let (mut mw, mut mx) = (0.0, 0.0);
        let mut wside = [0.0; 3];
        for (i, &s) in cand.side.iter().enumerate() {
            if s == X {
                mx += self.wt[i];
            }
            if self.in_w[i] {
                mw += self.wt[i];
                if s != X {
                    wside[s as usize] += self.wt[i];
                }
            }
        }
        let (wb, xb) = (self.budget.alpha + 1.0, self.budget.alpha);
        let mut reqs = vec![
            Requirement {
                lhs: mw,
                coef: wb,
                strict: true,
            },
            Requirement {
                lhs: mx,
                coef: xb,
                strict: false,
            },
        ];
        reqs.extend(wside.iter().map(|&s| Requirement {
            lhs: s + mx,
            coef: wb,
            strict: true,
        }));
        reqs
    }

    /// Records escalation hints and reports whether the candidate is a
    /// W-decomposition at the current threshold.
    fn accepts(&mut self, cand: &Candidate) -> bool {
        let reqs = self.requirements(cand);
        self.record(&reqs)
    }

    /// A cut abandoned at flow `f`: the candidate it would have produced
    /// fails, and `f` gives thresholds at which it might not.
    fn note_excess(&mut self, f: f64) {
        let (wx, heaviest_side) = self.frame;
        let x = wx + f;
        let reqs = [
            Requirement {
                lhs: x,
                coef: self.budget.alpha,
                strict: false,
            },
            Requirement {
                lhs: heaviest_side + x,
                coef: self.budget.alpha + 1.0,
                strict: true,
            },
        ];
        self.record(&reqs);
    }

    fn record(&mut self, reqs: &[Requirement]) -> bool {
        self.probe.candidates += 1;
        let t = self.budget.threshold;
        let integral = self.budget.integral();
        let mut ok = true;
        let mut all_at = t;
        for r in reqs {
            if !r.holds(t) {
                ok = false;
                let at = r.satisfied_at(integral);
                self.probe.note_margin(at);
                all_at = all_at.max(at);
            }
        }
        if !ok {
            self.probe.note_kstar(all_at);
        }
        ok
    }

    fn cut(&mut self, wx: &[bool], s: &[usize], t: &[usize], limit: f64) -> Result<Option<Vec<usize>>> {
        Ok(match self.net.min_cut(&self.d, &self.cap, wx, s, t, Some(limit))? {
            DenseCut::Cut { members, .. } => Some(members),
            DenseCut::Uncuttable => None,
            DenseCut::Exceeds(f) => {
                self.note_excess(f);
                None
            }
        })
    }

    /// Largest cut that could still give an acceptable X, given the measure
    /// of W_X and of the heaviest side's share of W.
    fn cut_limit(&self, wx: f64, heaviest_side: f64) -> f64 {
        (self.budget.x_bound() - wx).min(self.budget.w_bound() - wx - heaviest_side)
    }

    fn keep_cheapest(best: &mut Option<Candidate>, cand: Candidate) {
        if best.as_ref().is_none_or(|b| lt(cand.x_measure, b.x_measure)) {
            *best = Some(cand);
        }
    }

    /// Vertices usable as a stand-in terminal: outside W and W_X.
    fn outside_w(&self, wx: &[bool]) -> Vec<usize> {
        (0..self.d.n()).filter(|&i| !self.in_w[i] && !wx[i]).collect()
    }

    fn procedure_one(&mut self, wx: &[bool], groups: &[Vec<usize>; 3], limit: f64) -> Result<Option<Candidate>> {
        let [ga, gb, gc] = groups;
        if !gc.is_empty() {
            let cut = crate::cuts::dense_three_way(&mut self.net, &self.d, &self.cap, wx, groups, Some(limit))?;
            let y = match cut {
                DenseCut::Cut { members, .. } => members,
                DenseCut::Uncuttable => return Ok(None),
                DenseCut::Exceeds(f) => {
                    self.note_excess(f);
                    return Ok(None);
                }
            };
            return Ok(self.candidate(wx, &y, [ga, gb], true).filter(|c| self.accepts(c)));
        }
        if !gb.is_empty() {
            let Some(y) = self.cut(wx, ga, gb, limit)? else {
                return Ok(None);
            };
            return Ok(self.candidate(wx, &y, [ga, gb], true).filter(|c| self.accepts(c)));
        }
        let free = self.outside_w(wx);
        let mut best = None;
        if !ga.is_empty() {
            for &b in &free {
                if let Some(y) = self.cut(wx, ga, &[b], limit)? {
                    if let Some(c) = self.candidate(wx, &y, [ga, &[b]], true) {
                        if self.accepts(&c) {
                            Self::keep_cheapest(&mut best, c);
                        }
                    }
                }
            }
            return Ok(best);
        }
        for (i, &a) in free.iter().enumerate() {
            for &b in &free[i + 1..] {
                if self.d.has_edge(a, b) {
                    continue;
                }
                if let Some(y) = self.cut(wx, &[a], &[b], limit)? {
                    if let Some(c) = self.candidate(wx, &y, [&[a], &[b]], true) {
                        if self.accepts(&c) {
                            Self::keep_cheapest(&mut best, c);
                        }
                    }
                }
            }
        }
        Ok(best)
    }

    fn procedure_two(&mut self, wx: &[bool], groups: &[Vec<usize>; 3], limit: f64) -> Result<Option<Candidate>> {
        let ga = &groups[0];
        let rest: Vec<usize> = groups[1].iter().chain(&groups[2]).copied().collect();
        if !rest.is_empty() {
            let Some(y) = self.cut(wx, ga, &rest, limit)? else {
                return Ok(None);
            };
            return Ok(self.candidate(wx, &y, [ga, &rest], false).filter(|c| self.accepts(c)));
        }
        let mut best = None;
        for b in self.outside_w(wx) {
            if let Some(y) = self.cut(wx, ga, &[b], limit)? {
                if let Some(c) = self.candidate(wx, &y, [ga, &[b]], false) {
                    if self.accepts(&c) {
                        Self::keep_cheapest(&mut best, c);
                    }
                }
            }
        }
        Ok(best)
    }

    fn run_partition(&mut self, labels: &[u8]) -> Result<Option<Candidate>> {
        self.probe.partitions += 1;
        let mut wx = vec![false; self.d.n()];
        let mut groups: [Vec<usize>; 3] = Default::default();
        for (&v, &l) in self.w.iter().zip(labels) {
            if l == X {
                wx[v] = true;
            } else {
                groups[l as usize].push(v);
            }
        }
        self.dispatch(&wx, &groups)
    }

    fn dispatch(&mut self, wx: &[bool], groups: &[Vec<usize>; 3]) -> Result<Option<Candidate>> {
        let [wa, wb, wc] = groups.each_ref().map(|g| g.iter().map(|&i| self.wt[i]).sum::<f64>());
        let mx: f64 = self.w.iter().filter(|&&v| wx[v]).map(|&v| self.wt[v]).sum();
        let proc_one = lt(wa, self.budget.threshold);
        let heaviest_side = if proc_one { wa.max(wb).max(wc) } else { wa.max(wb + wc) };
        self.frame = (mx, heaviest_side);
        let limit = self.cut_limit(mx, heaviest_side);
        if proc_one {
            self.procedure_one(wx, groups, limit)
        } else {
            self.procedure_two(wx, groups, limit)
        }
    }

    /// Partitions in canonical order: by |W_X| ascending, then
    /// lexicographically by label vector (A < B < C < X).
    fn search(&mut self) -> Result<Option<Candidate>> {
        let k = self.w.len();
        let mut labels = vec![A; k];
        for xs in 0..=k {
            for net in &mut self.separators {
                net.reset(&self.cap, &self.detached);
            }
            let mut state = Dfs {
                sums: [0.0; 4],
                counts: [0; 4],
                first: [usize::MAX; 4],
                separation: [0.0; 2],
            };
            if let Some(found) = self.dfs(0, xs, &mut labels, &mut state)? {
                return Ok(Some(found));
            }
        }
        Ok(None)
    }

    fn dfs(&mut self, i: usize, xs: usize, labels: &mut [u8], st: &mut Dfs) -> Result<Option<Candidate>> {
        let k = self.w.len();
        if i == k {
            if !self.canonical(st) {
                return Ok(None);
            }
            return self.run_partition(labels);
        }
        let v = self.w[i];
        let wv = self.wt[v];
        let (wb, xb) = (self.budget.w_bound(), self.budget.x_bound());
        for l in [A, B, C, X] {
            let remaining = k - i - 1;
            let xs_after = st.counts[X as usize] + usize::from(l == X);
            if xs_after > xs || xs_after + remaining < xs {
                continue;
            }
            if l == X {
                let x = st.sums[3] + wv;
                if !le(x, xb) || (0..3).any(|s| !lt(st.sums[s] + x, wb)) {
                    continue;
                }
            } else {
                if !lt(st.sums[l as usize] + wv + st.sums[3], wb) {
                    continue;
                }
                // a direct edge between two terminal groups cannot be cut
                let clash = self.w[..i]
                    .iter()
                    .zip(labels.iter())
                    .any(|(&u, &lu)| lu != X && lu != l && self.d.has_edge(u, v));
                if clash {
                    continue;
                }
            }
            labels[i] = l;
            let li = l as usize;
            st.sums[li] += wv;
            st.counts[li] += 1;
            let first_set = st.first[li] == usize::MAX;
            if first_set {
                st.first[li] = i;
            }
            if l != X {
                self.detached[v] = false;
                for (net, slot) in self.separators.iter().zip(&mut self.saved[i]) {
                    slot.1 = net.save(&mut slot.0);
                }
            }
            let separation = st.separation;
            let found = if self.hopeless(i, l, st) {
                None
            } else {
                self.dfs(i + 1, xs, labels, st)?
            };
            st.separation = separation;
            if l != X {
                self.detached[v] = true;
                for (net, slot) in self.separators.iter_mut().zip(&self.saved[i]) {
                    net.restore(&slot.0, slot.1);
                }
            }
            st.sums[li] -= wv;
            st.counts[li] -= 1;
            if first_set {
                st.first[li] = usize::MAX;
            }
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }

    /// Whether no completion of the labels `..=i` can be accepted. Unplaced W
    /// vertices are left out of the graph, so a cut between two partial
    /// groups bounds the cut any completion will need from below.
    fn hopeless(&mut self, i: usize, l: u8, st: &mut Dfs) -> bool {
        let rest: f64 = self.w[i + 1..].iter().map(|&v| self.wt[v]).sum();
        let [a, b, c, x] = st.sums;
        if b > a + rest + EPS || c > b + rest + EPS {
            return true;
        }
        let limit = self.cut_limit(x, a.max(b).max(c));
        if l != X {
            let v = self.w[i];
            for (slot, other) in [B, C].into_iter().enumerate() {
                let net = &mut self.separators[slot];
                net.attach(v, self.cap[v], &self.detached);
                if l == A {
                    net.add_source(v);
                } else if l == other {
                    net.add_sink(v);
                }
                if st.counts[A as usize] > 0 && st.counts[other as usize] > 0 {
                    match net.augment(Some(limit)) {
                        Flow::Value(f) => st.separation[slot] = f,
                        Flow::Uncuttable | Flow::Exceeds(_) => return true,
                    }
                }
            }
        }
        st.separation.iter().any(|&s| s > limit + EPS)
    }

    /// measure(W_A) >= measure(W_B) >= measure(W_C); among equal-measure
    /// groups that the procedure treats symmetrically, keep one labelling.
    fn canonical(&self, st: &Dfs) -> bool {
        let [a, b, c, _] = st.sums;
        if a + EPS < b || b + EPS < c {
            return false;
        }
        let tie = |p: usize, q: usize| st.counts[p] > 0 && st.counts[q] > 0 && (st.sums[p] - st.sums[q]).abs() <= EPS;
        if tie(1, 2) && st.first[1] > st.first[2] {
            return false;
        }
        let proc_one = lt(a, self.budget.threshold);
        if proc_one && tie(0, 1) && st.first[0] > st.first[1] {
            return false;
        }
        true
    }
}

struct Dfs {
    sums: [f64; 4],
    counts: [usize; 4],
    first: [usize; 4],
    /// Lower bounds on the cut between W_A and W_B, and W_A and W_C.
    separation: [f64; 2],
}

fn check_inputs(g: &Graph, w: &VertexSet, budget: &DecompBudget<'_>) -> Result<()> {
    budget.check()?;
    budget.measure.check(g)?;
    g.check_subset(w)
}

/// Searches for a W-decomposition of `g` wrt the budget. Returns the first
/// one found in canonical partition order, or `None`. With `alpha >= 2`,
/// `None` means the (weighted) cliquewidth of `g` exceeds the threshold.
pub fn find_w_decomposition(g: &Graph, w: &VertexSet, budget: &DecompBudget<'_>) -> Result<Option<Decomposition>> {
    search(g, w, budget, &mut Probe::default())
}

pub(crate) fn search(
    g: &Graph,
    w: &VertexSet,
    budget: &DecompBudget<'_>,
    probe: &mut Probe,
) -> Result<Option<Decomposition>> {
    check_inputs(g, w, budget)?;
    let m = budget.measure;
    if !lt(m.of(w), budget.w_bound()) {
        return Err(Error::domain("monitored set W is too heavy for the threshold"));
    }
    if lt(m.of(&g.vertex_set()), budget.leaf_bound()) {
        return Err(Error::domain(
            "graph is below the leaf bound; no decomposition is needed",
        ));
    }
    let mut s = Searcher::new(g, w, *budget, probe);
    let Some(cand) = s.search()? else {
        return Ok(None);
    };
    let d = s.decomposition(&cand);
    d.validate(g)?;
    if !is_w_decomposition(&d, w, budget) {
        return Err(Error::invariant("accepted candidate is not a W-decomposition"));
    }
    Ok(Some(d))
}

fn run_procedure(g: &Graph, p: &WPartition, budget: &DecompBudget<'_>, two: bool) -> Result<Option<Decomposition>> {
    let w = p.union();
    check_inputs(g, &w, budget)?;
    p.check(budget.measure)?;
    let light = lt(budget.measure.of(&p.wa), budget.threshold);
    if light == two {
        let which = if two {
            "two needs measure(W_A) >= t"
        } else {
            "one needs measure(W_A) < t"
        };
        return Err(Error::domain(format!("procedure {which}")));
    }
    let mut probe = Probe::default();
    let mut s = Searcher::new(g, &w, *budget, &mut probe);
    let dense = |set: &VertexSet| -> Vec<usize> { set.iter().map(|v| s.d.index[v]).collect() };
    let groups = [dense(&p.wa), dense(&p.wb), dense(&p.wc)];
    let mut wx = vec![false; s.d.n()];
    for v in &p.wx {
        wx[s.d.index[v]] = true;
    }
    let Some(cand) = s.dispatch(&wx, &groups)? else {
        return Ok(None);
    };
    let d = s.decomposition(&cand);
    d.validate(g)?;
    Ok(is_w_decomposition(&d, &w, budget).then_some(d))
}

/// Procedure for a light W_A (`measure(W_A) < t`): X is W_X plus a
/// 2-approximate 3-way cut between W_A, W_B and W_C.
pub fn procedure_one(g: &Graph, p: &WPartition, budget: &DecompBudget<'_>) -> Result<Option<Decomposition>> {
    run_procedure(g, p, budget, false)
}

/// Procedure for a heavy W_A (`measure(W_A) >= t`): X is W_X plus a minimum
/// cut between W_A and W_B ∪ W_C; C is empty.
pub fn procedure_two(g: &Graph, p: &WPartition, budget: &DecompBudget<'_>) -> Result<Option<Decomposition>> {
    run_procedure(g, p, budget, true)
}
