//! Exact decision procedures and a checker for plain, list and nonuniform
//! list multicoloring.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, DEFAULT_INDEPENDENT_SET_CAP};

/// Default number of search nodes [`solve_backtracking`] may visit.
pub const DEFAULT_NODE_BUDGET: u64 = 200_000_000;
/// Default bound on `(b+1)^n · a` for [`solve_dp`].
pub const DEFAULT_DP_CAP: u64 = 1 << 27;

/// Graph, palette `[a]`, optional per-vertex lists and optional per-vertex
/// demands. Missing lists mean the full palette, missing demands mean `b`.
///
/// A demand larger than the vertex's list is accepted; such an instance is
/// simply not colorable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "InstanceRepr", into = "InstanceRepr")]
pub struct MulticolorInstance {
    graph: Graph,
    a: usize,
    b: usize,
    lists: Option<Vec<Vec<usize>>>,
    demands: Option<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct InstanceRepr {
    n: usize,
    edges: Vec<[usize; 2]>,
    a: usize,
    b: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lists: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    demands: Option<Vec<usize>>,
}

impl TryFrom<InstanceRepr> for MulticolorInstance {
    type Error = Error;

    fn try_from(r: InstanceRepr) -> Result<Self> {
        let graph = Graph::new(r.n, r.edges.into_iter().map(|[u, v]| (u, v)))?;
        MulticolorInstance::new(graph, r.a, r.b, r.lists, r.demands)
    }
}

impl From<MulticolorInstance> for InstanceRepr {
    fn from(inst: MulticolorInstance) -> Self {
        InstanceRepr {
            n: inst.graph.vertex_count(),
            edges: inst.graph.edges().map(|(u, v)| [u, v]).collect(),
            a: inst.a,
            b: inst.b,
            lists: inst.lists,
            demands: inst.demands,
        }
    }
}

impl MulticolorInstance {
    pub fn new(
        graph: Graph,
        a: usize,
        b: usize,
        lists: Option<Vec<Vec<usize>>>,
        demands: Option<Vec<usize>>,
    ) -> Result<Self> {
        let n = graph.vertex_count();
        if a == 0 {
            return Err(Error::params("palette size must be at least 1"));
        }
        let lists = match lists {
            None => None,
            Some(ls) => {
                if ls.len() != n {
                    return Err(Error::params(format!("{} lists for {n} vertices", ls.len())));
                }
                let mut clean = Vec::with_capacity(n);
                for (v, mut l) in ls.into_iter().enumerate() {
                    l.sort_unstable();
                    l.dedup();
                    if let Some(&c) = l.iter().find(|&&c| c >= a) {
                        return Err(Error::params(format!(
                            "list of vertex {v} contains color {c} outside palette {a}"
                        )));
                    }
                    clean.push(l);
                }
                Some(clean)
            }
        };
        if let Some(ds) = &demands {
            if ds.len() != n {
                return Err(Error::params(format!("{} demands for {n} vertices", ds.len())));
            }
        }
        Ok(MulticolorInstance {
            graph,
            a,
            b,
            lists,
            demands,
        })
    }

    /// Plain (a:b)-coloring instance.
    pub fn plain(graph: Graph, a: usize, b: usize) -> Result<Self> {
        Self::new(graph, a, b, None, None)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn lists(&self) -> Option<&[Vec<usize>]> {
        self.lists.as_deref()
    }

    pub fn demands(&self) -> Option<&[usize]> {
        self.demands.as_deref()
    }

    /// Allowed colors of `v`, sorted.
    pub fn list(&self, v: usize) -> Vec<usize> {
        match &self.lists {
            Some(ls) => ls[v].clone(),
            None => (0..self.a).collect(),
        }
    }

    pub fn list_len(&self, v: usize) -> usize {
        self.lists.as_ref().map_or(self.a, |ls| ls[v].len())
    }

    pub fn demand(&self, v: usize) -> usize {
        self.demands.as_ref().map_or(self.b, |ds| ds[v])
    }

    pub fn max_demand(&self) -> usize {
        (0..self.vertex_count()).map(|v| self.demand(v)).max().unwrap_or(0)
    }

    /// True when every list is the full palette and every demand equals `b`.
    pub fn is_plain(&self) -> bool {
        let n = self.vertex_count();
        let full_lists = match &self.lists {
            None => true,
            Some(ls) => ls.iter().all(|l| l.len() == self.a),
        };
        full_lists && (0..n).all(|v| self.demand(v) == self.b)
    }

    /// Same instance with lists and demands dropped if they are trivial.
    pub fn normalized(&self) -> Self {
        if self.is_plain() {
            MulticolorInstance {
                lists: None,
                demands: None,
                ..self.clone()
            }
        } else {
            self.clone()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Color set per vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiColoring {
    pub assignment: Vec<Vec<usize>>,
}

impl MultiColoring {
    pub fn new(assignment: Vec<Vec<usize>>) -> Self {
        MultiColoring { assignment }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("coloring serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    VertexCount {
        expected: usize,
        found: usize,
    },
    DuplicateColor {
        vertex: usize,
        color: usize,
    },
    NotInList {
        vertex: usize,
        color: usize,
    },
    Demand {
        vertex: usize,
        expected: usize,
        found: usize,
    },
    EdgeConflict {
        u: usize,
        v: usize,
        color: usize,
    },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::VertexCount { expected, found } => {
                write!(f, "coloring covers {found} vertices, instance has {expected}")
            }
            Violation::DuplicateColor { vertex, color } => {
                write!(f, "vertex {vertex} lists color {color} twice")
            }
            Violation::NotInList { vertex, color } => {
                write!(f, "color {color} is not in the list of vertex {vertex}")
            }
            Violation::Demand {
                vertex,
                expected,
                found,
            } => {
                write!(f, "vertex {vertex} has {found} colors, demand is {expected}")
            }
            Violation::EdgeConflict { u, v, color } => {
                write!(f, "adjacent vertices {u} and {v} share color {color}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Invalid(Violation),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

/// Checks list containment, exact demands and disjointness across edges, in
/// that order, reporting the first violation.
pub fn check_multicoloring(inst: &MulticolorInstance, col: &MultiColoring) -> Result<Verdict> {
    let n = inst.vertex_count();
    for (v, set) in col.assignment.iter().enumerate() {
        if let Some(&c) = set.iter().find(|&&c| c >= inst.a) {
            return Err(Error::InvalidColoring(format!(
                "vertex {v} uses color {c} outside palette {}",
                inst.a
            )));
        }
    }
    if col.assignment.len() != n {
        return Ok(Verdict::Invalid(Violation::VertexCount {
            expected: n,
            found: col.assignment.len(),
        }));
    }
    let mut sets = Vec::with_capacity(n);
    for (v, set) in col.assignment.iter().enumerate() {
        let mut s = set.clone();
        s.sort_unstable();
        if let Some(w) = s.windows(2).find(|w| w[0] == w[1]) {
            return Ok(Verdict::Invalid(Violation::DuplicateColor { vertex: v, color: w[0] }));
        }
        if let Some(ls) = &inst.lists {
            if let Some(&c) = s.iter().find(|c| ls[v].binary_search(c).is_err()) {
                return Ok(Verdict::Invalid(Violation::NotInList { vertex: v, color: c }));
            }
        }
        sets.push(s);
    }
    for (v, s) in sets.iter().enumerate() {
        if s.len() != inst.demand(v) {
            return Ok(Verdict::Invalid(Violation::Demand {
                vertex: v,
                expected: inst.demand(v),
                found: s.len(),
            }));
        }
    }
    for (u, v) in inst.graph.edges() {
        if let Some(&c) = sets[u].iter().find(|c| sets[v].binary_search(c).is_ok()) {
            return Ok(Verdict::Invalid(Violation::EdgeConflict { u, v, color: c }));
        }
    }
    Ok(Verdict::Valid)
}

/// Backtracking with the default node budget.
pub fn solve_backtracking(inst: &MulticolorInstance) -> Result<Option<MultiColoring>> {
    solve_backtracking_with(inst, DEFAULT_NODE_BUDGET)
}

/// Exhaustive search for a multicoloring.
///
/// At each step the uncolored vertex with the least slack (available colors
/// minus demand) is colored next, ties going to the lower index, and its
/// color sets are tried in lexicographic order. After every choice each
/// uncolored neighbor must still have enough available colors. When all lists
/// are the full palette, colors not used anywhere yet are interchangeable, so
/// only the smallest of them are ever introduced. Connected components of the
/// uncolored part are searched independently. The search is deterministic.
///
/// Returns a capacity error once more than `node_budget` color sets have been
/// tried.
pub fn solve_backtracking_with(inst: &MulticolorInstance, node_budget: u64) -> Result<Option<MultiColoring>> {
    let n = inst.vertex_count();
    for v in 0..n {
        if inst.demand(v) > inst.list_len(v) {
            return Ok(None);
        }
    }
    let mut search = Backtrack::new(inst, node_budget);
    if search.run((0..n).collect())? {
        Ok(Some(MultiColoring::new(search.chosen)))
    } else {
        Ok(None)
    }
}

struct Backtrack<'a> {
    inst: &'a MulticolorInstance,
    lists: Vec<Vec<usize>>,
    in_list: Vec<Vec<bool>>,
    // number of colored neighbors holding each color
    forbid: Vec<Vec<u32>>,
    available: Vec<usize>,
    colored: Vec<bool>,
    chosen: Vec<Vec<usize>>,
    // global use counts, only tracked for symmetry breaking
    use_count: Vec<u32>,
    symmetric: bool,
    nodes: u64,
    budget: u64,
}

impl<'a> Backtrack<'a> {
    fn new(inst: &'a MulticolorInstance, budget: u64) -> Self {
        let n = inst.vertex_count();
        let a = inst.a;
        let lists: Vec<Vec<usize>> = (0..n).map(|v| inst.list(v)).collect();
        let in_list = lists
            .iter()
            .map(|l| {
                let mut m = vec![false; a];
                for &c in l {
                    m[c] = true;
                }
                m
            })
            .collect();
        let available = lists.iter().map(Vec::len).collect();
        Backtrack {
            inst,
            lists,
            in_list,
            forbid: vec![vec![0; a]; n],
            available,
            colored: vec![false; n],
            chosen: vec![Vec::new(); n],
            use_count: vec![0; a],
            symmetric: inst.lists.as_ref().is_none_or(|ls| ls.iter().all(|l| l.len() == a)),
            nodes: 0,
            budget,
        }
    }

    /// Colors every vertex of `region` (uncolored vertices, ascending). The
    /// region is split into connected components of the uncolored graph,
    /// which are solved one after another since they cannot interact.
    fn run(&mut self, region: Vec<usize>) -> Result<bool> {
        let comps = self.components(&region);
        if comps.len() <= 1 {
            return self.run_connected(region);
        }
        for (idx, comp) in comps.iter().enumerate() {
            if !self.run_connected(comp.clone())? {
                for done in &comps[..idx] {
                    for &v in done {
                        let colors = std::mem::take(&mut self.chosen[v]);
                        self.retract(v, &colors);
                        self.colored[v] = false;
                    }
                }
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn components(&self, region: &[usize]) -> Vec<Vec<usize>> {
        let n = self.inst.vertex_count();
        let mut in_region = vec![false; n];
        for &v in region {
            in_region[v] = true;
        }
        let mut comps = Vec::new();
        for &start in region {
            if !in_region[start] {
                continue;
            }
            in_region[start] = false;
            let mut comp = vec![start];
            let mut head = 0;
            while head < comp.len() {
                let u = comp[head];
                head += 1;
                for &w in self.inst.graph.neighbors(u) {
                    if in_region[w] {
                        in_region[w] = false;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    fn run_connected(&mut self, mut region: Vec<usize>) -> Result<bool> {
        let pos = region
            .iter()
            .enumerate()
            .min_by_key(|&(_, &v)| (self.available[v] - self.inst.demand(v), v))
            .map(|(p, _)| p);
        let Some(pos) = pos else {
            return Ok(true);
        };
        let v = region.remove(pos);
        let demand = self.inst.demand(v);
        let free: Vec<usize> = self.lists[v]
            .iter()
            .copied()
            .filter(|&c| self.forbid[v][c] == 0)
            .collect();
        let (candidates, fresh) = if self.symmetric {
            let fresh: Vec<usize> = free
                .iter()
                .copied()
                .filter(|&c| self.use_count[c] == 0)
                .take(demand)
                .collect();
            let cands: Vec<usize> = free
                .iter()
                .copied()
                .filter(|&c| self.use_count[c] > 0 || fresh.contains(&c))
                .collect();
            (cands, fresh)
        } else {
            (free, Vec::new())
        };

        self.colored[v] = true;
        for combo in candidates.into_iter().combinations(demand) {
            if self.symmetric {
                // fresh colors must form a prefix of the unused ones
                let k = combo.iter().filter(|c| fresh.contains(c)).count();
                if !combo.iter().filter(|c| fresh.contains(c)).eq(fresh[..k].iter()) {
                    continue;
                }
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(Error::capacity(format!(
                    "backtracking exceeded its budget of {} nodes",
                    self.budget
                )));
            }
            if self.apply(v, &combo) && self.run(region.clone())? {
                self.chosen[v] = combo;
                return Ok(true);
            }
            self.retract(v, &combo);
        }
        self.colored[v] = false;
        Ok(false)
    }

    /// Marks `colors` as used by `v`; false if an uncolored neighbor is left
    /// with fewer available colors than it needs.
    fn apply(&mut self, v: usize, colors: &[usize]) -> bool {
        let mut ok = true;
        for &c in colors {
            self.use_count[c] += 1;
        }
        for &w in self.inst.graph.neighbors(v) {
            for &c in colors {
                self.forbid[w][c] += 1;
                if self.forbid[w][c] == 1 && self.in_list[w][c] {
                    self.available[w] -= 1;
                }
            }
            if !self.colored[w] && self.available[w] < self.inst.demand(w) {
                ok = false;
            }
        }
        ok
    }

    fn retract(&mut self, v: usize, colors: &[usize]) {
        for &c in colors {
            self.use_count[c] -= 1;
        }
        for &w in self.inst.graph.neighbors(v) {
            for &c in colors {
                self.forbid[w][c] -= 1;
                if self.forbid[w][c] == 0 && self.in_list[w][c] {
                    self.available[w] += 1;
                }
            }
        }
    }
}

/// Dynamic program over demand vectors with the default cap.
pub fn solve_dp(inst: &MulticolorInstance) -> Result<bool> {
    solve_dp_with(inst, DEFAULT_DP_CAP)
}

/// `D[η, k]` is true when `k` independent sets (possibly empty) cover each
/// vertex `v` exactly `η(v)` times. The answer is `D[η_b, a]` for the all-`b`
/// vector `η_b`. Layer `k` is computed from layer `k−1` alone and both are
/// kept as bitsets over the mixed-radix index of `η`.
pub fn solve_dp_with(inst: &MulticolorInstance, cap: u64) -> Result<bool> {
    if !inst.is_plain() {
        return Err(Error::params("the dynamic program only handles plain instances"));
    }
    let n = inst.vertex_count();
    let (a, b) = (inst.a, inst.b);
    if n == 0 || b == 0 {
        return Ok(true);
    }
    let radix = b as u64 + 1;
    let mut states: u64 = 1;
    for _ in 0..n {
        states = states
            .checked_mul(radix)
            .filter(|&s| s.saturating_mul(a as u64) <= cap)
            .ok_or_else(|| Error::capacity(format!("({}+1)^{n}·{a} dynamic-program states exceed cap {cap}", b)))?;
    }
    if states.saturating_mul(a as u64) > cap {
        return Err(Error::capacity(format!(
            "({b}+1)^{n}·{a} dynamic-program states exceed cap {cap}"
        )));
    }
    let sets = inst.graph.independent_sets(DEFAULT_INDEPENDENT_SET_CAP)?;
    let pow: Vec<u64> = (0..n).map(|v| radix.pow(v as u32)).collect();
    let steps: Vec<(u64, u64)> = sets
        .iter()
        .filter(|&&s| s != 0)
        .map(|&s| {
            let delta = (0..n).filter(|&v| s >> v & 1 == 1).map(|v| pow[v]).sum();
            (s, delta)
        })
        .collect();
    let target = states - 1; // every digit equal to b
    let words = states.div_ceil(64) as usize;
    let get = |bits: &[u64], i: u64| bits[(i / 64) as usize] >> (i % 64) & 1 == 1;
    let mut cur = vec![0u64; words];
    cur[0] = 1;
    for _ in 0..a {
        let mut next = cur.clone();
        for idx in 0..states {
            if !get(&cur, idx) {
                continue;
            }
            let mut full = 0u64;
            let mut rest = idx;
            for v in 0..n {
                if rest % radix == b as u64 {
                    full |= 1 << v;
                }
                rest /= radix;
            }
            for &(s, delta) in &steps {
                if s & full == 0 {
                    let j = idx + delta;
                    next[(j / 64) as usize] |= 1 << (j % 64);
                }
            }
        }
        cur = next;
        if get(&cur, target) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Solver choice for [`decide`] and [`min_colors`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Backtracking,
    Dp,
}

#[derive(Debug, Clone, Copy)]
pub struct SolverCaps {
    pub node_budget: u64,
    pub dp_cap: u64,
}

impl Default for SolverCaps {
    fn default() -> Self {
        SolverCaps {
            node_budget: DEFAULT_NODE_BUDGET,
            dp_cap: DEFAULT_DP_CAP,
        }
    }
}

/// Satisfiability with the chosen engine; a witness is returned only by
/// backtracking.
pub fn decide(inst: &MulticolorInstance, engine: Engine, caps: SolverCaps) -> Result<(bool, Option<MultiColoring>)> {
    match engine {
        Engine::Backtracking => {
            let col = solve_backtracking_with(inst, caps.node_budget)?;
            Ok((col.is_some(), col))
        }
        Engine::Dp => Ok((solve_dp_with(inst, caps.dp_cap)?, None)),
    }
}

/// Result of [`min_colors`]: the b-fold chromatic number with a coloring at
/// that palette size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinColors {
    pub a: usize,
    pub witness: MultiColoring,
}

/// Smallest `a` admitting an (a:b)-coloring. Palette sizes are tried upward
/// from `b`; each refusal comes from the dynamic program when it fits the cap
/// and from backtracking otherwise.
pub fn min_colors(g: &Graph, b: usize, caps: SolverCaps) -> Result<MinColors> {
    let n = g.vertex_count();
    if n == 0 || b == 0 {
        return Ok(MinColors {
            a: if n == 0 { 0 } else { 1 },
            witness: MultiColoring::new(vec![Vec::new(); n]),
        });
    }
    let mut a = b;
    loop {
        let inst = MulticolorInstance::plain(g.clone(), a, b)?;
        let dp = match solve_dp_with(&inst, caps.dp_cap) {
            Ok(res) => Some(res),
            Err(Error::Capacity(_)) => None,
            Err(e) => return Err(e),
        };
        if dp != Some(false) {
            if let Some(witness) = solve_backtracking_with(&inst, caps.node_budget)? {
                return Ok(MinColors { a, witness });
            }
        }
        a += 1;
    }
}
