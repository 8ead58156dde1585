mod common;

use proptest::prelude::*;
use rand::rngs::SmallRng;
use rand::SeedableRng;
use wpms_sls::bench::brute_force_optimum;
use wpms_sls::wcnf::{write_wcnf_string, WcnfDialect};
use wpms_sls::{Assignment, Cost, Var};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cost_is_infinite_exactly_when_infeasible(seed in any::<u64>(), bits in any::<u16>()) {
        let mut rng = SmallRng::seed_from_u64(seed);
        let f = common::random_formula(&mut rng, 10, 25, 0.4, 30);
        let a = Assignment::from_bits(bits as u64, f.num_vars());
        prop_assert_eq!(f.cost(&a) == Cost::Infinite, !f.is_feasible(&a));
        let text = write_wcnf_string(&f, WcnfDialect::New2022);
        let checked = common::check_model(&text, &a.to_bitstring());
        prop_assert_eq!(checked.map_or(Cost::Infinite, Cost::Finite), f.cost(&a));
    }

    #[test]
    fn occurrence_lists_match_clauses(seed in any::<u64>()) {
        let mut rng = SmallRng::seed_from_u64(seed);
        let f = common::random_formula(&mut rng, 12, 40, 0.5, 5);
        for v in 0..f.num_vars() {
            for pos in [true, false] {
                let lit = Var::new(v as u32).lit(pos);
                let mut expected: Vec<u32> =
                    (0..f.num_clauses()).filter(|&c| f.clause_lits(c).contains(&lit)).map(|c| c as u32).collect();
                let mut got: Vec<u32> = f.occurrences(lit).to_vec();
                expected.sort_unstable();
                got.sort_unstable();
                prop_assert_eq!(got, expected);
            }
        }
    }

    #[test]
    fn optimum_is_a_lower_bound(seed in any::<u64>(), bits in any::<u16>()) {
        let mut rng = SmallRng::seed_from_u64(seed);
        let f = common::random_formula(&mut rng, 12, 30, 0.3, 9);
        let a = Assignment::from_bits(bits as u64, f.num_vars());
        prop_assert!(brute_force_optimum(&f).unwrap() <= f.cost(&a));
    }
}
