mod common;

use multicolor::detecting::{verify_family, DEFAULT_VERIFY_CAP};
use multicolor::graph::greedy_color_natural;
use multicolor::reduction::{
    build_nonuniform, check_maltese, decode_witness, encode_witness, group_formula, max_group_parameter, remove_lists,
    uniformize, GadgetOptions, DEFAULT_KNESER_CAP,
};
use multicolor::sat::brute_force_sat;
use multicolor::solvers::{check_multicoloring, solve_backtracking};
use multicolor::Assignment;
use proptest::prelude::*;
use rand::Rng;

/// Frozen regression bound on nonuniform vertices per variable, measured at
/// b ∈ {2, 3, 4} on random (3,4) formulas with up to 60 variables (largest
/// observed ratio 4.375).
const KAPPA: f64 = 4.5;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn grouping_satisfies_maltese_property(seed in any::<u64>(), n in 3usize..=30) {
        let mut rng = common::rng(seed);
        let f = common::random_34(&mut rng, n);
        let b = rng.gen_range(2..=max_group_parameter(n));
        let g = group_formula(&f, b).unwrap();
        prop_assert!(check_maltese(&g));
        let cap = (b as f64).log2().floor() as usize;
        prop_assert!(g.variable_groups.iter().all(|v| v.len() <= cap.max(1)));
        prop_assert!(g.clause_groups.iter().all(|c| c.len() <= b));
    }

    #[test]
    fn constructed_instances_are_well_formed(seed in any::<u64>(), n in 3usize..=40) {
        let mut rng = common::rng(seed);
        let f = common::random_34(&mut rng, n);
        let b = rng.gen_range(2..=max_group_parameter(n).min(4));
        let g = group_formula(&f, b).unwrap();
        let (inst, art) = build_nonuniform(&g, b, GadgetOptions { seed, ..Default::default() }).unwrap();
        // role coloring
        prop_assert!(inst.graph().is_proper_coloring(&art.three_coloring.colors));
        for (v, role) in art.vertex_roles.iter().enumerate() {
            prop_assert_eq!(art.three_coloring.colors[v], role.class());
        }
        // every per-group family is 4-detecting
        for fam in &art.families {
            prop_assert_eq!(fam.d(), 4);
            prop_assert!(verify_family(fam, DEFAULT_VERIFY_CAP).unwrap());
        }
        prop_assert_eq!(inst.vertex_count(), art.expected_vertex_count());
        prop_assert!(inst.vertex_count() as f64 <= KAPPA * n as f64);
    }

    #[test]
    fn every_model_encodes_to_a_valid_coloring(seed in any::<u64>(), n in 3usize..=9) {
        let f = common::random_34(&mut common::rng(seed), n);
        let g = group_formula(&f, 2).unwrap();
        let (inst, art) = build_nonuniform(&g, 2, GadgetOptions::default()).unwrap();
        for bits in 0u64..1 << n {
            let eta = Assignment::from_bits(bits, n);
            if !f.satisfied_by(&eta) {
                continue;
            }
            let col = encode_witness(&eta, &art).unwrap();
            prop_assert!(check_multicoloring(&inst, &col).unwrap().is_valid());
            prop_assert!(f.satisfied_by(&decode_witness(&col, &art).unwrap()));
        }
    }

    #[test]
    fn nonuniform_instance_is_equivalent(seed in any::<u64>(), n in 3usize..=9) {
        let f = common::random_34(&mut common::rng(seed), n);
        let g = group_formula(&f, 2).unwrap();
        let (inst, art) = build_nonuniform(&g, 2, GadgetOptions::default()).unwrap();
        let col = solve_backtracking(&inst).unwrap();
        prop_assert_eq!(col.is_some(), brute_force_sat(&f, 24).unwrap().is_some());
        if let Some(col) = col {
            prop_assert!(f.satisfied_by(&decode_witness(&col, &art).unwrap()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn uniformize_preserves_satisfiability(seed in any::<u64>(), n in 1usize..=6, a in 1usize..=6, b in 1usize..=3) {
        let inst = common::random_list_instance(&mut common::rng(seed), n, a, b, false);
        let coloring = greedy_color_natural(inst.graph());
        let target = inst.max_demand().max(b);
        let out = uniformize(&inst, &coloring, target).unwrap();
        prop_assert_eq!(out.a(), a + coloring.color_count * target);
        prop_assert!((0..n).all(|v| out.demand(v) == target));
        prop_assert_eq!(solve_backtracking(&inst).unwrap().is_some(), solve_backtracking(&out).unwrap().is_some());
    }

    #[test]
    fn remove_lists_preserves_satisfiability(seed in any::<u64>(), n in 1usize..=5, a in 1usize..=4, b in 1usize..=2) {
        let inst = common::random_list_instance(&mut common::rng(seed), n, a, b, true);
        let out = remove_lists(&inst, DEFAULT_KNESER_CAP).unwrap();
        let widened = a.max(b + 1);
        let kneser = (0..b).fold(1, |acc, i| acc * (widened + b - i) / (i + 1));
        prop_assert_eq!(out.vertex_count(), n + kneser);
        prop_assert!(out.is_plain());
        prop_assert_eq!(solve_backtracking(&inst).unwrap().is_some(), solve_backtracking(&out).unwrap().is_some());
    }
}
