mod common;

use std::collections::BTreeMap;

use multicolor::circuits::{
    build_p_g, build_p_s, build_q_g, build_q_s, degree_filter, eval_circuit, expand_circuit, has_r_monomial,
    solve_carryless, DEFAULT_SUBSET_CAP, DEFAULT_TERM_CAP,
};
use multicolor::graph::DEFAULT_INDEPENDENT_SET_CAP;
use multicolor::solvers::solve_backtracking;
use multicolor::MulticolorInstance;
use proptest::prelude::*;
use rand::Rng;

fn gate_bound(max_degree: usize, source: usize) -> usize {
    (2 * max_degree + 1).pow(2) * source
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn filter_extracts_the_homogeneous_part(
        seed in any::<u64>(),
        p in prop::sample::select(vec![2u64, 3, 5, 7]),
        max_degree in 1usize..=8,
        gates in 4usize..=12,
    ) {
        let mut rng = common::rng(seed);
        let c = common::random_circuit(&mut rng, p, 3, gates, max_degree);
        let full = expand_circuit(&c, DEFAULT_TERM_CAP).unwrap();
        for k in 0..=max_degree {
            let f = degree_filter(&c, k, max_degree).unwrap();
            prop_assert!(f.gate_count() <= gate_bound(max_degree, c.gate_count()));
            let part = full.homogeneous_part(k as u64);
            prop_assert_eq!(expand_circuit(&f, DEFAULT_TERM_CAP).unwrap(), part.clone());
        }
    }

    #[test]
    fn filter_evaluates_like_the_homogeneous_part(seed in any::<u64>(), k in 0usize..=4) {
        let mut rng = common::rng(seed);
        let c = common::random_circuit(&mut rng, 101, 3, 12, 4);
        let part = expand_circuit(&c, DEFAULT_TERM_CAP).unwrap().homogeneous_part(k as u64);
        let f = degree_filter(&c, k, 4).unwrap();
        for _ in 0..100 {
            let point: BTreeMap<usize, u64> = (0..3).map(|v| (v, rng.gen_range(0..101))).collect();
            prop_assert_eq!(eval_circuit(&f, &point).unwrap(), part.eval(&point).unwrap());
        }
    }

    #[test]
    fn graph_polynomial_detects_list_colorings(seed in any::<u64>(), n in 1usize..=4, a in 1usize..=3, b in 1usize..=2) {
        let mut rng = common::rng(seed);
        let g = common::random_graph(&mut rng, n, 0.5);
        let lists = (0..n).map(|_| common::random_list(&mut rng, a, 0.7)).collect();
        let inst = MulticolorInstance::new(g, a, b, Some(lists), None).unwrap();
        let q = build_q_g(&inst, DEFAULT_INDEPENDENT_SET_CAP).unwrap();
        let p = build_p_g(&inst, DEFAULT_INDEPENDENT_SET_CAP).unwrap();
        prop_assert!(p.gate_count() <= gate_bound(2 * b * n, q.gate_count()));
        let poly = expand_circuit(&p, DEFAULT_TERM_CAP).unwrap();
        prop_assert_eq!(has_r_monomial(&poly, b as u32), solve_backtracking(&inst).unwrap().is_some());
    }

    #[test]
    fn subset_sum_polynomial_detects_solutions(seed in any::<u64>(), m in 1usize..=4, len in 1usize..=2, t_is_len in any::<bool>()) {
        let inst = common::random_carryless(&mut common::rng(seed), m, len);
        let t = if t_is_len { len } else { 1 };
        let q = build_q_s(&inst, t).unwrap();
        let p = build_p_s(&inst, t).unwrap();
        prop_assert!(p.circuit.gate_count() <= gate_bound(p.k as usize, q.circuit.gate_count()));
        let poly = expand_circuit(&p.circuit, DEFAULT_TERM_CAP).unwrap();
        let r = u32::try_from(p.r).unwrap();
        prop_assert_eq!(
            has_r_monomial(&poly, r),
            solve_carryless(&inst, DEFAULT_SUBSET_CAP).unwrap().is_some()
        );
    }
}
