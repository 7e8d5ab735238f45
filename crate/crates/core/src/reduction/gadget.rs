//! Nonuniform list multicoloring instance built from a grouped (3,4) formula,
//! with witness translation in both directions.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::detecting::{build_family, DetectingFamily, DEFAULT_ATTEMPTS, DEFAULT_VERIFY_CAP};
use crate::error::{Error, Result};
use crate::graph::{Graph, ProperColoring};
use crate::reduction::grouping::{check_maltese, GroupedFormula};
use crate::sat::Assignment;
use crate::solvers::{check_multicoloring, MultiColoring, MulticolorInstance, Verdict};

/// What a constructed vertex stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "lowercase")]
pub enum VertexRole {
    /// `v_i` for variable group `group`.
    V { group: usize },
    /// `u_{j,k}` for clause group `clause_group` and set index `k < 2·n_F`.
    U { clause_group: usize, k: usize },
    /// `w_j`.
    W { clause_group: usize },
}

impl VertexRole {
    /// Color of the role-based proper 3-coloring.
    pub fn class(self) -> usize {
        match self {
            VertexRole::V { .. } => 0,
            VertexRole::U { .. } => 1,
            VertexRole::W { .. } => 2,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GadgetOptions {
    pub seed: u64,
    pub family_attempts: usize,
    pub verify_cap: u64,
}

impl Default for GadgetOptions {
    fn default() -> Self {
        GadgetOptions {
            seed: 0,
            family_attempts: DEFAULT_ATTEMPTS,
            verify_cap: DEFAULT_VERIFY_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionArtifacts {
    pub grouped: GroupedFormula,
    pub b: usize,
    pub a: usize,
    pub n_f: usize,
    /// Verified 4-detecting family per clause group, over positions in the group.
    pub families: Vec<DetectingFamily>,
    /// Per clause group, the `2·n_F` clause sets `C_{j,k}` (clause indices):
    /// the padded family followed by the complements.
    pub clause_sets: Vec<Vec<Vec<usize>>>,
    /// `I_j` per clause group.
    pub index_sets: Vec<Vec<usize>>,
    pub vertex_roles: Vec<VertexRole>,
    pub three_coloring: ProperColoring,
    /// The constructed instance, kept for decoding.
    pub instance: MulticolorInstance,
}

impl ReductionArtifacts {
    /// Vertex count as predicted by the construction:
    /// `n_V + Σ_j (1 + #non-empty sets)`.
    pub fn expected_vertex_count(&self) -> usize {
        self.grouped.variable_groups.len()
            + self
                .clause_sets
                .iter()
                .map(|sets| 1 + sets.iter().filter(|s| !s.is_empty()).count())
                .sum::<usize>()
    }
}

fn group_seed(seed: u64, j: usize) -> u64 {
    seed ^ (j as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Random family size tried first for a group of `u` clauses: `2u / log_4 u`,
/// never more than `u`.
fn family_target(u: usize) -> usize {
    if u < 2 {
        return u;
    }
    let t = (2.0 * u as f64 / (u as f64).log(4.0)).ceil() as usize;
    t.clamp(1, u)
}

/// Builds the nonuniform instance. Vertices come in the order
/// `v_1..v_{n_V}`, then for each clause group its non-empty `u_{j,k}`
/// followed by `w_j`. The palette is `b · sigma_range`.
pub fn build_nonuniform(
    g: &GroupedFormula,
    b: usize,
    opts: GadgetOptions,
) -> Result<(MulticolorInstance, ReductionArtifacts)> {
    let mut families = Vec::with_capacity(g.clause_groups.len());
    for (j, cg) in g.clause_groups.iter().enumerate() {
        let u = cg.len();
        families.push(build_family(
            u,
            4,
            group_seed(opts.seed, j),
            family_target(u),
            opts.family_attempts,
            opts.verify_cap,
        )?);
    }
    build_nonuniform_with_families(g, b, families, opts.verify_cap)
}

/// Same construction with caller-supplied families, one per clause group over
/// positions `0..|C_j|`. Families not yet verified are checked with `d = 4`.
pub fn build_nonuniform_with_families(
    g: &GroupedFormula,
    b: usize,
    mut families: Vec<DetectingFamily>,
    verify_cap: u64,
) -> Result<(MulticolorInstance, ReductionArtifacts)> {
    if b < 2 {
        return Err(Error::params(format!("b = {b} must be at least 2")));
    }
    if !check_maltese(g) {
        return Err(Error::params("grouping does not satisfy the clause-group condition"));
    }
    if let Some(v) = g.variable_groups.iter().find(|v| 1usize << v.len() > b) {
        return Err(Error::params(format!(
            "variable group of size {} does not fit into [{b}]",
            v.len()
        )));
    }
    if families.len() != g.clause_groups.len() {
        return Err(Error::params(format!(
            "{} families for {} clause groups",
            families.len(),
            g.clause_groups.len()
        )));
    }
    for (j, fam) in families.iter_mut().enumerate() {
        if fam.d() != 4 || fam.universe_size() != g.clause_groups[j].len() {
            return Err(Error::params(format!(
                "family {j} must be 4-detecting over {} clauses",
                g.clause_groups[j].len()
            )));
        }
        if !fam.is_verified() && !fam.verify(verify_cap)? {
            return Err(Error::params(format!("family {j} is not 4-detecting")));
        }
    }
    let clauses = g.formula.clauses();
    let n_v = g.variable_groups.len();
    let group_of = g.group_of_variable();
    let index_sets = g.index_sets();
    let n_f = families.iter().map(DetectingFamily::len).max().unwrap_or(0);
    let clause_sets: Vec<Vec<Vec<usize>>> = g
        .clause_groups
        .iter()
        .zip(&families)
        .map(|(cg, fam)| {
            let mut sets: Vec<Vec<usize>> = fam.sets().iter().map(|s| s.iter().map(|&p| cg[p]).collect()).collect();
            sets.resize(n_f, cg.clone());
            let complements: Vec<Vec<usize>> = sets
                .iter()
                .map(|s| cg.iter().copied().filter(|c| !s.contains(c)).collect())
                .collect();
            sets.extend(complements);
            sets
        })
        .collect();

    let v_list = |i: usize| -> Vec<usize> { (0..b).map(|x| b * g.sigma[i] + x).collect() };

    let mut roles: Vec<VertexRole> = (0..n_v).map(|group| VertexRole::V { group }).collect();
    let mut lists: Vec<Vec<usize>> = (0..n_v).map(v_list).collect();
    let mut demands: Vec<usize> = vec![b - 1; n_v];
    let mut edges = Vec::new();

    for (j, sets) in clause_sets.iter().enumerate() {
        let mut u_vertices = Vec::new();
        for (k, set) in sets.iter().enumerate() {
            if set.is_empty() {
                continue;
            }
            let id = roles.len();
            roles.push(VertexRole::U { clause_group: j, k });
            // colors b·σ(i)+x with x < 2^{|V_i|} whose assignment of V_i
            // satisfies a literal of some clause in the set
            let mut list = BTreeSet::new();
            for &c in set {
                for lit in &clauses[c] {
                    let i = group_of[lit.var];
                    let vars = &g.variable_groups[i];
                    let pos = vars.iter().position(|&x| x == lit.var).expect("variable in its group");
                    for x in 0..1usize << vars.len() {
                        if (x >> pos & 1 == 1) == lit.positive {
                            list.insert(b * g.sigma[i] + x);
                        }
                    }
                }
            }
            lists.push(list.into_iter().collect());
            demands.push(set.len());
            for &i in &index_sets[j] {
                edges.push((i, id));
            }
            u_vertices.push(id);
        }
        let w = roles.len();
        roles.push(VertexRole::W { clause_group: j });
        lists.push(index_sets[j].iter().flat_map(|&i| v_list(i)).collect());
        demands.push(2 * g.clause_groups[j].len());
        for &i in &index_sets[j] {
            edges.push((i, w));
        }
        for &u in &u_vertices {
            edges.push((u, w));
        }
    }

    let graph = Graph::new(roles.len(), edges)?;
    let a = b * g.sigma_range.max(1);
    let instance = MulticolorInstance::new(graph, a, b, Some(lists), Some(demands))?;
    let three_coloring = ProperColoring::from_colors(instance.graph(), roles.iter().map(|r| r.class()).collect())?;
    let artifacts = ReductionArtifacts {
        grouped: g.clone(),
        b,
        a,
        n_f,
        families,
        clause_sets,
        index_sets,
        vertex_roles: roles,
        three_coloring,
        instance: instance.clone(),
    };
    Ok((instance, artifacts))
}

/// `x_i` per variable group: bit `t` is the value of the `t`-th smallest
/// variable of the group.
fn group_codes(art: &ReductionArtifacts, assignment: &Assignment) -> Vec<usize> {
    art.grouped
        .variable_groups
        .iter()
        .map(|vars| {
            vars.iter()
                .enumerate()
                .filter(|&(_, &x)| assignment.values[x])
                .map(|(t, _)| 1usize << t)
                .sum()
        })
        .collect()
}

/// Coloring of the constructed instance from a satisfying assignment. Each
/// clause is charged to its satisfied literal with the smallest variable index.
pub fn encode_witness(assignment: &Assignment, art: &ReductionArtifacts) -> Result<MultiColoring> {
    let f = &art.grouped.formula;
    if !f.satisfied_by(assignment) {
        return Err(Error::Witness("assignment does not satisfy the formula".into()));
    }
    let b = art.b;
    let sigma = &art.grouped.sigma;
    let group_of = art.grouped.group_of_variable();
    let x = group_codes(art, assignment);
    let missing = |i: usize| b * sigma[i] + x[i];

    // group of the chosen literal per clause
    let chosen: Vec<usize> = f
        .clauses()
        .iter()
        .map(|c| {
            let lit = c
                .iter()
                .filter(|l| l.is_true_under(&assignment.values))
                .min_by_key(|l| l.var)
                .expect("clause is satisfied");
            group_of[lit.var]
        })
        .collect();

    let assignment_sets = art
        .vertex_roles
        .iter()
        .map(|role| match *role {
            VertexRole::V { group } => (0..b)
                .filter(|&y| y != x[group])
                .map(|y| b * sigma[group] + y)
                .collect(),
            VertexRole::U { clause_group, k } => {
                let mut s: Vec<usize> = art.clause_sets[clause_group][k]
                    .iter()
                    .map(|&c| missing(chosen[c]))
                    .collect();
                s.sort_unstable();
                s
            }
            VertexRole::W { clause_group } => {
                let used: BTreeSet<usize> = art.grouped.clause_groups[clause_group]
                    .iter()
                    .map(|&c| chosen[c])
                    .collect();
                let mut s: Vec<usize> = art.index_sets[clause_group]
                    .iter()
                    .filter(|i| !used.contains(i))
                    .map(|&i| missing(i))
                    .collect();
                s.sort_unstable();
                s
            }
        })
        .collect();
    Ok(MultiColoring::new(assignment_sets))
}

/// Assignment read off a valid coloring: `x_i` is the color of `L(v_i)` left
/// out of `v_i`'s set, reduced modulo `2^{|V_i|}`.
pub fn decode_witness(col: &MultiColoring, art: &ReductionArtifacts) -> Result<Assignment> {
    let verdict =
        check_multicoloring(&art.instance, col).map_err(|e| Error::Witness(format!("coloring is invalid: {e}")))?;
    if let Verdict::Invalid(why) = verdict {
        return Err(Error::Witness(format!("coloring is invalid: {why}")));
    }
    let b = art.b;
    let mut values = vec![false; art.grouped.formula.variable_count()];
    for (i, vars) in art.grouped.variable_groups.iter().enumerate() {
        let base = b * art.grouped.sigma[i];
        let have = &col.assignment[i];
        let x = (0..b)
            .find(|&y| !have.contains(&(base + y)))
            .ok_or_else(|| Error::Witness(format!("vertex v_{i} misses no color")))?;
        let x = x % (1 << vars.len());
        for (t, &var) in vars.iter().enumerate() {
            values[var] = x >> t & 1 == 1;
        }
    }
    let assignment = Assignment::new(values);
    if !art.grouped.formula.satisfied_by(&assignment) {
        return Err(Error::Witness("decoded assignment does not satisfy the formula".into()));
    }
    Ok(assignment)
}
