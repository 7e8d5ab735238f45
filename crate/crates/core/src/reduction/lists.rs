//! Removing nonuniform demands with filling colors, and removing lists by
//! attaching a Kneser graph.

use crate::error::{Error, Result};
use crate::graph::{kneser_graph, ProperColoring};
use crate::solvers::MulticolorInstance;

/// Default bound on the number of Kneser vertices [`remove_lists`] adds.
pub const DEFAULT_KNESER_CAP: u64 = 200_000;
/// Bound on the number of edges [`remove_lists`] may create.
pub const MAX_LIST_REMOVAL_EDGES: u64 = 20_000_000;

/// Raises every demand to `target_b` using filling colors
/// `F(v) = {a + c(v)·b + i : i < b − β(v)}`, where `c` is a proper coloring
/// with `t` classes. The new palette is `a + t·b` and all demands are `b`.
pub fn uniformize(inst: &MulticolorInstance, coloring: &ProperColoring, target_b: usize) -> Result<MulticolorInstance> {
    let g = inst.graph();
    let n = g.vertex_count();
    if !g.is_proper_coloring(&coloring.colors) {
        return Err(Error::params("coloring is not proper on the instance graph"));
    }
    if let Some(v) = (0..n).find(|&v| inst.demand(v) > target_b) {
        return Err(Error::params(format!(
            "demand {} of vertex {v} exceeds the target {target_b}",
            inst.demand(v)
        )));
    }
    let t = coloring.palette_size();
    let a = inst.a();
    let lists = (0..n)
        .map(|v| {
            let c = coloring.colors[v];
            let mut l = inst.list(v);
            l.extend((0..target_b - inst.demand(v)).map(|i| a + c * target_b + i));
            l
        })
        .collect();
    MulticolorInstance::new(g.clone(), a + t * target_b, target_b, Some(lists), None)
}

fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// Plain ((a+b):b)-coloring instance equivalent to a list instance with
/// uniform demand `b`: the input graph plus `KG_{a+b,b}` on vertices
/// `n, n+1, …` (labels in lexicographic order), with `v` joined to label `X`
/// exactly when `L(v) ∩ X = ∅`.
///
/// The Kneser part only pins its colors down when `a + b > 2b`, so a palette
/// with `a ≤ b` is first widened to `b + 1` unused colors (the lists do not
/// change). Otherwise the output has `n + C(a+b, b)` vertices.
pub fn remove_lists(inst: &MulticolorInstance, kneser_cap: u64) -> Result<MulticolorInstance> {
    let n = inst.vertex_count();
    let b = inst.b();
    let a = inst.a().max(b + 1);
    if let Some(v) = (0..n).find(|&v| inst.demand(v) != b) {
        return Err(Error::params(format!(
            "vertex {v} has demand {}, list removal needs uniform demand {b}",
            inst.demand(v)
        )));
    }
    if b == 0 {
        return Err(Error::params("list removal needs b ≥ 1"));
    }
    let total = (a + b) as u64;
    let kneser_vertices = binomial(total, b as u64).filter(|&k| k <= kneser_cap).ok_or_else(|| {
        Error::capacity(format!(
            "C({}, {b}) Kneser vertices exceed the cap of {kneser_cap}",
            a + b
        ))
    })?;
    let degree = binomial(a as u64, b as u64).unwrap_or(u64::MAX);
    let edge_estimate = kneser_vertices.saturating_mul(degree) / 2
        + kneser_vertices.saturating_mul(n as u64)
        + inst.graph().edge_count() as u64;
    if edge_estimate > MAX_LIST_REMOVAL_EDGES {
        return Err(Error::capacity(format!(
            "list removal would create about {edge_estimate} edges, limit is {MAX_LIST_REMOVAL_EDGES}"
        )));
    }
    let (kneser, labels) = kneser_graph(a + b, b)?;
    let mut edges: Vec<(usize, usize)> = inst.graph().edges().collect();
    edges.extend(kneser.edges().map(|(x, y)| (n + x, n + y)));
    for v in 0..n {
        let list = inst.list(v);
        for (x, label) in labels.iter().enumerate() {
            if label.elements().iter().all(|c| list.binary_search(c).is_err()) {
                edges.push((v, n + x));
            }
        }
    }
    let graph = crate::graph::Graph::new(n + labels.len(), edges)?;
    MulticolorInstance::plain(graph, a + b, b)
}
