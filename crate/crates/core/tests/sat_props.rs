mod common;

use multicolor::sat::{brute_force_sat, is_34_form, parse_dimacs, tovey_regularize};
use proptest::prelude::*;

// regularized formulas grow with padding gadgets; the oracle propagates units
const ORACLE_CAP: usize = 512;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn regularization_preserves_satisfiability(seed in any::<u64>(), n in 1usize..=10, m in 0usize..=15) {
        let mut rng = common::rng(seed);
        let f = common::random_cnf(&mut rng, n, m, 5);
        let g = tovey_regularize(&f);
        prop_assert!(is_34_form(&g));
        let orig = brute_force_sat(&f, ORACLE_CAP).unwrap();
        let reg = brute_force_sat(&g, ORACLE_CAP).unwrap();
        prop_assert_eq!(orig.is_some(), reg.is_some());
        if let Some(model) = reg {
            let restricted = multicolor::Assignment::new(model.values[..n].to_vec());
            prop_assert!(f.satisfied_by(&restricted));
        }
    }

    #[test]
    fn regularizing_34_formulas_keeps_satisfiability(seed in any::<u64>(), n in 3usize..=10) {
        let f = common::random_34(&mut common::rng(seed), n);
        prop_assert!(is_34_form(&f));
        let g = tovey_regularize(&f);
        prop_assert!(is_34_form(&g));
        prop_assert_eq!(
            brute_force_sat(&f, ORACLE_CAP).unwrap().is_some(),
            brute_force_sat(&g, ORACLE_CAP).unwrap().is_some()
        );
    }

    #[test]
    fn dimacs_round_trip(seed in any::<u64>(), n in 1usize..=12, m in 0usize..=20) {
        let f = common::random_cnf(&mut common::rng(seed), n, m, 6);
        prop_assert_eq!(parse_dimacs(&f.to_dimacs()).unwrap(), f);
    }

    #[test]
    fn oracle_models_satisfy(seed in any::<u64>(), n in 1usize..=12, m in 0usize..=30) {
        let f = common::random_cnf(&mut common::rng(seed), n, m, 3);
        let model = brute_force_sat(&f, 24).unwrap();
        let exhaustive = (0u64..1 << n).find(|&bits| f.satisfied_by(&multicolor::Assignment::from_bits(bits, n)));
        prop_assert_eq!(model.is_some(), exhaustive.is_some());
        if let Some(m) = model {
            prop_assert!(f.satisfied_by(&m));
        }
    }
}
