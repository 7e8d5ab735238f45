use std::collections::HashMap;

use super::{degree_filter, Circuit, CircuitBuilder};
use crate::error::{Error, Result};
use crate::solvers::MulticolorInstance;

/// Variable numbering of the graph polynomials: `x_v = v` and
/// `y_{v,j} = n + v·a + j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphPolyVars {
    pub n: usize,
    pub a: usize,
}

impl GraphPolyVars {
    pub fn for_instance(inst: &MulticolorInstance) -> Self {
        GraphPolyVars {
            n: inst.vertex_count(),
            a: inst.a(),
        }
    }

    pub fn x(&self, v: usize) -> usize {
        v
    }

    pub fn y(&self, v: usize, j: usize) -> usize {
        self.n + v * self.a + j
    }
}

/// `∏_j Σ_I ∏_{v∈I} x_v y_{v,j}` over `F_2`, where for color `j` the sum runs
/// over the independent sets inside `{v : j ∈ L(v)}`. Each set's product
/// extends the product of the set without its largest vertex.
pub fn build_q_g(inst: &MulticolorInstance, set_cap: usize) -> Result<Circuit> {
    let g = inst.graph();
    let n = g.vertex_count();
    if n > 64 {
        return Err(Error::capacity("graph polynomials support at most 64 vertices"));
    }
    let vars = GraphPolyVars::for_instance(inst);
    let mut b = CircuitBuilder::new(2)?;
    let mut allowed = vec![0u64; inst.a()];
    for v in 0..n {
        for c in inst.list(v) {
            allowed[c] |= 1 << v;
        }
    }
    let x: Vec<usize> = (0..n).map(|v| b.input(vars.x(v))).collect();
    let mut factors = Vec::with_capacity(inst.a());
    for (j, &mask) in allowed.iter().enumerate() {
        let sets = g.independent_sets_within(mask, set_cap)?;
        let mut prod: HashMap<u64, usize> = HashMap::with_capacity(sets.len());
        let mut summands = Vec::with_capacity(sets.len());
        for s in sets {
            let gate = if s == 0 {
                b.constant(1)
            } else {
                let top = 63 - s.leading_zeros() as usize;
                let rest = s & !(1 << top);
                let y = b.input(vars.y(top, j));
                let xy = b.mul(x[top], y);
                match rest {
                    0 => xy,
                    _ => b.mul(prod[&rest], xy),
                }
            };
            prod.insert(s, gate);
            summands.push(gate);
        }
        factors.push(b.sum(&summands));
    }
    let out = b.product(&factors);
    b.finish(out)
}

/// Degree-`2bn` part of [`build_q_g`]: the sum over list colorings `c` with
/// `Σ|c(v)| = bn` of `∏_v x_v^{|c(v)|} ∏_{j∈c(v)} y_{v,j}`.
pub fn build_p_g(inst: &MulticolorInstance, set_cap: usize) -> Result<Circuit> {
    let n = inst.vertex_count();
    if (0..n).any(|v| inst.demand(v) != inst.b()) {
        return Err(Error::params("graph polynomial needs a uniform demand"));
    }
    let q = build_q_g(inst, set_cap)?;
    let k = 2 * inst.b() * n;
    degree_filter(&q, k, k)
}

#[cfg(test)]
mod tests {
    use super::super::{eval_circuit, expand_circuit, has_r_monomial, SparsePolynomial, DEFAULT_TERM_CAP};
    use super::*;
    use crate::graph::{Graph, DEFAULT_INDEPENDENT_SET_CAP};

    const CAP: usize = DEFAULT_INDEPENDENT_SET_CAP;

    fn poly(terms: &[&[(usize, u32)]]) -> SparsePolynomial {
        SparsePolynomial::from_terms(2, terms.iter().map(|t| (t.to_vec(), 1))).unwrap()
    }

    #[test]
    fn single_vertex() {
        let inst = MulticolorInstance::new(Graph::empty(1), 1, 1, Some(vec![vec![0]]), None).unwrap();
        let q = build_q_g(&inst, CAP).unwrap();
        assert_eq!(
            expand_circuit(&q, DEFAULT_TERM_CAP).unwrap(),
            poly(&[&[], &[(0, 1), (1, 1)]])
        );
        let ones = [(0, 1), (1, 1)].into_iter().collect();
        assert_eq!(eval_circuit(&q, &ones).unwrap(), 0);
        let p = build_p_g(&inst, CAP).unwrap();
        assert_eq!(
            expand_circuit(&p, DEFAULT_TERM_CAP).unwrap(),
            poly(&[&[(0, 1), (1, 1)]])
        );
    }

    #[test]
    fn k2_one_color() {
        let inst = MulticolorInstance::plain(Graph::complete(2), 1, 1).unwrap();
        let q = build_q_g(&inst, CAP).unwrap();
        // y_{0,0} = 2, y_{1,0} = 3
        assert_eq!(
            expand_circuit(&q, DEFAULT_TERM_CAP).unwrap(),
            poly(&[&[], &[(0, 1), (2, 1)], &[(1, 1), (3, 1)]])
        );
    }

    #[test]
    fn empty_list_vertex_is_absent() {
        let inst = MulticolorInstance::new(Graph::empty(2), 1, 1, Some(vec![vec![0], vec![]]), None).unwrap();
        let q = expand_circuit(&build_q_g(&inst, CAP).unwrap(), DEFAULT_TERM_CAP).unwrap();
        let vars = GraphPolyVars::for_instance(&inst);
        assert!(q.terms().keys().all(|m| m.iter().all(|&(v, _)| v != vars.y(1, 0))));
        assert_eq!(q.len(), 2);
    }

    #[test]
    fn k2_two_colors() {
        let inst = MulticolorInstance::plain(Graph::complete(2), 2, 1).unwrap();
        let vars = GraphPolyVars::for_instance(&inst);
        let (xu, xv) = (vars.x(0), vars.x(1));
        let (yu0, yu1, yv0, yv1) = (vars.y(0, 0), vars.y(0, 1), vars.y(1, 0), vars.y(1, 1));
        let q = expand_circuit(&build_q_g(&inst, CAP).unwrap(), DEFAULT_TERM_CAP).unwrap();
        // (1 + x_u y_u0 + x_v y_v0)(1 + x_u y_u1 + x_v y_v1)
        let mut terms: Vec<Vec<(usize, u32)>> = vec![vec![]];
        for m in [
            vec![(xu, 1), (yu0, 1)],
            vec![(xv, 1), (yv0, 1)],
            vec![(xu, 1), (yu1, 1)],
            vec![(xv, 1), (yv1, 1)],
        ] {
            terms.push(m);
        }
        let mut expected = SparsePolynomial::from_terms(2, terms.into_iter().map(|m| (m, 1))).unwrap();
        for (a, b) in [
            ((xu, yu0), (xu, yu1)),
            ((xu, yu0), (xv, yv1)),
            ((xv, yv0), (xu, yu1)),
            ((xv, yv0), (xv, yv1)),
        ] {
            let m = vec![(a.0, 1), (a.1, 1), (b.0, 1), (b.1, 1)];
            expected = expected.add(&SparsePolynomial::from_terms(2, [(m, 1)]).unwrap());
        }
        assert_eq!(q, expected);

        let p = expand_circuit(&build_p_g(&inst, CAP).unwrap(), DEFAULT_TERM_CAP).unwrap();
        assert_eq!(p, expected.homogeneous_part(4));
        assert_eq!(p.len(), 4);
        assert!(has_r_monomial(&p, 1));
    }

    #[test]
    fn triangle_has_no_two_coloring() {
        let inst = MulticolorInstance::plain(Graph::complete(3), 2, 1).unwrap();
        let p = expand_circuit(&build_p_g(&inst, CAP).unwrap(), DEFAULT_TERM_CAP).unwrap();
        assert!(!has_r_monomial(&p, 1));
    }
}
