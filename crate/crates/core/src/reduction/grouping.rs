//! Partition of variables and clauses into groups with a coloring σ of the
//! variable groups, such that within every clause group all variables are
//! distinct, lie in distinct variable groups, and those groups get distinct σ.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{greedy_color_natural, Graph};
use crate::sat::{is_34_form, CnfFormula};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupedFormula {
    pub formula: CnfFormula,
    /// Variable indices of each group, sorted.
    pub variable_groups: Vec<Vec<usize>>,
    /// Clause indices of each group, sorted.
    pub clause_groups: Vec<Vec<usize>>,
    /// σ value of each variable group.
    pub sigma: Vec<usize>,
    pub sigma_range: usize,
}

impl GroupedFormula {
    /// Group index of every variable.
    pub fn group_of_variable(&self) -> Vec<usize> {
        let mut out = vec![usize::MAX; self.formula.variable_count()];
        for (i, g) in self.variable_groups.iter().enumerate() {
            for &x in g {
                if x < out.len() {
                    out[x] = i;
                }
            }
        }
        out
    }

    /// Indices of the variable groups touched by each clause group, sorted.
    pub fn index_sets(&self) -> Vec<Vec<usize>> {
        let group_of = self.group_of_variable();
        self.clause_groups
            .iter()
            .map(|cg| {
                cg.iter()
                    .flat_map(|&c| self.formula.clauses()[c].iter().map(|l| group_of[l.var]))
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect()
            })
            .collect()
    }
}

/// Largest `b` accepted for `n` variables: `⌊n / log2 n⌋`, but never below 2
/// so the smallest setting is always usable.
pub fn max_group_parameter(n: usize) -> usize {
    if n < 2 {
        return 2;
    }
    let bound = (n as f64 / (n as f64).log2()).floor() as usize;
    bound.max(2)
}

fn floor_log2(b: usize) -> usize {
    (usize::BITS - 1 - b.leading_zeros()) as usize
}

fn chunk_classes(colors: &[usize], count: usize, size: usize) -> Vec<Vec<usize>> {
    let mut classes = vec![Vec::new(); count];
    for (v, &c) in colors.iter().enumerate() {
        classes[c].push(v);
    }
    classes
        .into_iter()
        .flat_map(|class| class.chunks(size).map(<[usize]>::to_vec).collect::<Vec<_>>())
        .collect()
}

/// Groups a (3,4) formula for parameter `b`.
///
/// Variables: greedy coloring of the primal graph, color classes cut into
/// groups of at most `⌊log2 b⌋`. Clauses: two clauses are in conflict when
/// they use variables of a common variable group (the same variable
/// included), and color classes of that conflict graph are cut into groups of
/// at most `b`. σ is a greedy coloring of the graph on variable groups joining
/// two groups that meet a common clause group.
pub fn group_formula(f: &CnfFormula, b: usize) -> Result<GroupedFormula> {
    if !is_34_form(f) {
        return Err(Error::params("grouping needs a formula in (3,4) form"));
    }
    let n = f.variable_count();
    let max_b = max_group_parameter(n);
    if b < 2 || b > max_b {
        return Err(Error::params(format!("b = {b} outside 2..={max_b} for {n} variables")));
    }
    let clauses = f.clauses();

    let mut primal = BTreeSet::new();
    for c in clauses {
        for (i, x) in c.iter().enumerate() {
            for y in &c[i + 1..] {
                primal.insert((x.var.min(y.var), x.var.max(y.var)));
            }
        }
    }
    let g1 = Graph::new(n, primal)?;
    let c1 = greedy_color_natural(&g1);
    let variable_groups = chunk_classes(&c1.colors, c1.palette_size(), floor_log2(b));
    let mut group_of = vec![0; n];
    for (i, g) in variable_groups.iter().enumerate() {
        for &x in g {
            group_of[x] = i;
        }
    }

    let mut clauses_of_group = vec![Vec::new(); variable_groups.len()];
    for (ci, c) in clauses.iter().enumerate() {
        for l in c {
            clauses_of_group[group_of[l.var]].push(ci);
        }
    }
    let mut conflicts = BTreeSet::new();
    for cs in &clauses_of_group {
        for (i, &x) in cs.iter().enumerate() {
            for &y in &cs[i + 1..] {
                if x != y {
                    conflicts.insert((x.min(y), x.max(y)));
                }
            }
        }
    }
    let g2 = Graph::new(clauses.len(), conflicts)?;
    let c2 = greedy_color_natural(&g2);
    let clause_groups = chunk_classes(&c2.colors, c2.palette_size(), b);

    let mut shared = BTreeSet::new();
    for cg in &clause_groups {
        let touched: BTreeSet<usize> = cg
            .iter()
            .flat_map(|&c| clauses[c].iter().map(|l| group_of[l.var]))
            .collect();
        let touched: Vec<usize> = touched.into_iter().collect();
        for (i, &x) in touched.iter().enumerate() {
            for &y in &touched[i + 1..] {
                shared.insert((x, y));
            }
        }
    }
    let g3 = Graph::new(variable_groups.len(), shared)?;
    let c3 = greedy_color_natural(&g3);

    Ok(GroupedFormula {
        formula: f.clone(),
        variable_groups,
        clause_groups,
        sigma_range: c3.palette_size(),
        sigma: c3.colors,
    })
}

/// Property (✠) for every clause group. Malformed groupings (bad indices,
/// partitions that do not cover each variable and clause exactly once) are
/// reported as false.
pub fn check_maltese(g: &GroupedFormula) -> bool {
    let n = g.formula.variable_count();
    let m = g.formula.clause_count();
    if g.sigma.len() != g.variable_groups.len() {
        return false;
    }
    let mut seen_var = vec![false; n];
    for x in g.variable_groups.iter().flatten() {
        if *x >= n || std::mem::replace(&mut seen_var[*x], true) {
            return false;
        }
    }
    let mut seen_clause = vec![false; m];
    for c in g.clause_groups.iter().flatten() {
        if *c >= m || std::mem::replace(&mut seen_clause[*c], true) {
            return false;
        }
    }
    if !seen_var.iter().all(|&s| s) || !seen_clause.iter().all(|&s| s) {
        return false;
    }
    let group_of = g.group_of_variable();
    g.clause_groups.iter().all(|cg| {
        let mut vars = BTreeSet::new();
        let mut groups = BTreeSet::new();
        let mut sigmas = BTreeSet::new();
        cg.iter().flat_map(|&c| g.formula.clauses()[c].iter()).all(|l| {
            let i = group_of[l.var];
            vars.insert(l.var) && groups.insert(i) && sigmas.insert(g.sigma[i])
        })
    })
}
