//! Simple undirected graphs, Kneser graphs, greedy coloring, independent-set
//! enumeration and homomorphism checks.

use std::collections::BTreeSet;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of independent sets produced by [`Graph::independent_sets`].
pub const DEFAULT_INDEPENDENT_SET_CAP: usize = 1 << 22;

/// Simple undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphRepr", into = "GraphRepr")]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<GraphRepr> for Graph {
    type Error = Error;

    fn try_from(r: GraphRepr) -> Result<Self> {
        Graph::new(r.n, r.edges.into_iter().map(|[u, v]| (u, v)))
    }
}

impl From<Graph> for GraphRepr {
    fn from(g: Graph) -> Self {
        GraphRepr {
            n: g.n,
            edges: g.edges.iter().map(|&(u, v)| [u, v]).collect(),
        }
    }
}

impl Graph {
    /// Builds a graph, rejecting loops, duplicate edges and out-of-range endpoints.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::params(format!("edge ({u},{v}) out of range for {n} vertices")));
            }
            if u == v {
                return Err(Error::params(format!("loop at vertex {u}")));
            }
            if !set.insert((u.min(v), u.max(v))) {
                return Err(Error::params(format!("duplicate edge ({u},{v})")));
            }
        }
        Ok(Self::from_edge_set(n, set))
    }

    fn from_edge_set(n: usize, edges: BTreeSet<(usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Graph { n, edges, adj }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_edge_set(n, BTreeSet::new())
    }

    pub fn complete(n: usize) -> Self {
        Self::from_edge_set(n, (0..n).tuple_combinations().collect())
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle edges are valid")
    }

    pub fn path(n: usize) -> Self {
        Self::new(n, (1..n).map(|i| (i - 1, i))).expect("path edges are valid")
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    /// Neighborhood bitmasks; only available for graphs with at most 64 vertices.
    pub fn adjacency_masks(&self) -> Result<Vec<u64>> {
        if self.n > 64 {
            return Err(Error::capacity(format!(
                "bitmask adjacency needs at most 64 vertices, graph has {}",
                self.n
            )));
        }
        Ok(self
            .adj
            .iter()
            .map(|ns| ns.iter().fold(0u64, |m, &w| m | (1 << w)))
            .collect())
    }

    /// Disjoint union: vertices of `other` are shifted by `self.vertex_count()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let off = self.n;
        let edges = self
            .edges
            .iter()
            .copied()
            .chain(other.edges.iter().map(|&(u, v)| (u + off, v + off)))
            .collect();
        Self::from_edge_set(self.n + other.n, edges)
    }

    /// Adds edges to a copy of the graph; duplicates of existing edges are an error.
    pub fn with_extra_edges(&self, extra: impl IntoIterator<Item = (usize, usize)>) -> Result<Graph> {
        Graph::new(self.n, self.edges.iter().copied().chain(extra))
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter().tuple_combinations().all(|(&u, &v)| !self.has_edge(u, v))
    }

    /// All independent sets (including the empty one) as bitmasks, in
    /// increasing numeric order of the mask.
    pub fn independent_sets(&self, cap: usize) -> Result<Vec<u64>> {
        let all = if self.n >= 64 { u64::MAX } else { (1u64 << self.n) - 1 };
        self.independent_sets_within(all, cap)
    }

    /// Independent sets using only vertices in `allowed`, in increasing mask order.
    pub fn independent_sets_within(&self, allowed: u64, cap: usize) -> Result<Vec<u64>> {
        let masks = self.adjacency_masks()?;
        // Sets over vertices 0..k in increasing order, extended one vertex at a
        // time: the sets containing vertex k all exceed those that do not.
        let mut sets = vec![0u64];
        for (v, &nbrs) in masks.iter().enumerate() {
            if allowed >> v & 1 == 0 {
                continue;
            }
            let len = sets.len();
            for i in 0..len {
                let s = sets[i];
                if s & nbrs == 0 {
                    if sets.len() >= cap {
                        return Err(Error::capacity(format!("more than {cap} independent sets")));
                    }
                    sets.push(s | (1 << v));
                }
            }
        }
        Ok(sets)
    }

    /// Vertex lists for [`Graph::independent_sets`].
    pub fn independent_set_lists(&self, cap: usize) -> Result<Vec<Vec<usize>>> {
        Ok(self.independent_sets(cap)?.into_iter().map(mask_to_vec).collect())
    }

    /// Checks that every edge is mapped onto an edge of `h`.
    pub fn is_homomorphism_to(&self, h: &Graph, map: &[usize]) -> Result<bool> {
        if map.len() != self.n {
            return Err(Error::InvalidMapping(format!(
                "mapping has {} entries for {} vertices",
                map.len(),
                self.n
            )));
        }
        if let Some((v, &img)) = map.iter().enumerate().find(|&(_, &img)| img >= h.n) {
            return Err(Error::InvalidMapping(format!(
                "vertex {v} maps to {img}, target has {} vertices",
                h.n
            )));
        }
        Ok(self.edges.iter().all(|&(u, v)| h.has_edge(map[u], map[v])))
    }

    /// Whether `colors` is a proper coloring of the graph.
    pub fn is_proper_coloring(&self, colors: &[usize]) -> bool {
        colors.len() == self.n && self.edges.iter().all(|&(u, v)| colors[u] != colors[v])
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

pub(crate) fn mask_to_vec(mut m: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(m.count_ones() as usize);
    while m != 0 {
        out.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    out
}

/// A b-element subset of `[a]`, stored sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct KneserLabel(Vec<usize>);

impl KneserLabel {
    pub fn new(mut elems: Vec<usize>) -> Self {
        elems.sort_unstable();
        elems.dedup();
        KneserLabel(elems)
    }

    pub fn elements(&self) -> &[usize] {
        &self.0
    }

    pub fn is_disjoint(&self, other: &KneserLabel) -> bool {
        // Both sides sorted: merge walk.
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }
}

/// Kneser graph on the b-subsets of `[a]` (lexicographic vertex order), edges
/// between disjoint subsets. Returns the graph and the label of each vertex.
pub fn kneser_graph(a: usize, b: usize) -> Result<(Graph, Vec<KneserLabel>)> {
    if b == 0 || b > a {
        return Err(Error::params(format!(
            "Kneser graph needs 0 < b <= a, got a={a}, b={b}"
        )));
    }
    let labels: Vec<KneserLabel> = (0..a).combinations(b).map(KneserLabel).collect();
    let mut edges = BTreeSet::new();
    for (i, x) in labels.iter().enumerate() {
        for (j, y) in labels.iter().enumerate().skip(i + 1) {
            if x.is_disjoint(y) {
                edges.insert((i, j));
            }
        }
    }
    Ok((Graph::from_edge_set(labels.len(), edges), labels))
}

/// Vertex colors with the number of distinct colors used.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProperColoring {
    pub colors: Vec<usize>,
    pub color_count: usize,
}

impl ProperColoring {
    /// Wraps an explicit coloring after checking it is proper.
    pub fn from_colors(g: &Graph, colors: Vec<usize>) -> Result<Self> {
        if !g.is_proper_coloring(&colors) {
            return Err(Error::params("coloring is not proper"));
        }
        let color_count = colors.iter().copied().collect::<BTreeSet<_>>().len();
        Ok(ProperColoring { colors, color_count })
    }

    /// One more than the largest color index (the palette size the coloring needs).
    pub fn palette_size(&self) -> usize {
        self.colors.iter().max().map_or(0, |&c| c + 1)
    }
}

/// Greedy coloring along `order`: each vertex takes the least color not used
/// by an already-colored neighbor.
pub fn greedy_color(g: &Graph, order: &[usize]) -> Result<ProperColoring> {
    let n = g.vertex_count();
    let mut seen = vec![false; n];
    if order.len() != n || order.iter().any(|&v| v >= n || std::mem::replace(&mut seen[v], true)) {
        return Err(Error::params("greedy order is not a permutation of the vertices"));
    }
    let mut colors = vec![usize::MAX; n];
    let mut used = Vec::new();
    let mut max_color = 0;
    for &v in order {
        used.clear();
        used.resize(g.degree(v) + 1, false);
        for &w in g.neighbors(v) {
            let c = colors[w];
            if c < used.len() {
                used[c] = true;
            }
        }
        let c = used
            .iter()
            .position(|&u| !u)
            .expect("degree+1 slots, at most degree used");
        colors[v] = c;
        max_color = max_color.max(c + 1);
    }
    Ok(ProperColoring {
        colors,
        color_count: max_color,
    })
}

/// Greedy coloring in vertex-index order.
pub fn greedy_color_natural(g: &Graph) -> ProperColoring {
    let order: Vec<usize> = (0..g.vertex_count()).collect();
    greedy_color(g, &order).expect("identity is a permutation")
}
