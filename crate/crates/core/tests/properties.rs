use fct_core::balanced::{solve_pfct_u, PfctuOptions};
use fct_core::bicriteria::solve_bicriteria;
use fct_core::fct_u::solve_fct_u;
use fct_core::format::{parse_instance, parse_solution, serialize_instance, serialize_solution};
use fct_core::greedy::{greedy_solve, greedy_upper_bound, no_crossing_check, opt_lower_bound};
use fct_core::oracle::{exact_balanced_partition, exact_fct, exact_fct_by_assignment, partition_cost};
use fct_core::ptas::ptas_solve;
use fct_core::random::Family;
use fct_core::rational::{from_u64, int, ratio};
use fct_core::transport::{cancel_cycles, is_forest, solve_transportation, WeightMatrix};
use fct_core::{evaluate_cost, Rational};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn serialization_round_trips(n in 1usize..4, m in 1usize..5, seed: u64) {
        for family in Family::ALL {
            let inst = family.instance(n, m, seed);
            prop_assert_eq!(parse_instance(&serialize_instance(&inst)).unwrap(), inst.clone());
            let x = exact_fct(&inst).unwrap().flow;
            prop_assert_eq!(parse_solution(&serialize_solution(&x)).unwrap(), x);
        }
    }

    #[test]
    fn cycle_cancelling_keeps_value_and_leaves_a_forest(n in 1usize..4, m in 1usize..5, seed: u64) {
        let inst = Family::Fct.instance(n, m, seed);
        let w = WeightMatrix::linear_costs(&inst);
        let lp = solve_transportation(&inst, &w).unwrap();
        let x = cancel_cycles(&lp.flow, &w);
        prop_assert!(is_forest(&x.support(), n, m));
        prop_assert_eq!(x.check_marginals(&inst), Ok(()));
        prop_assert_eq!(w.weighted_cost(&x).finite().cloned(), Some(lp.value));
    }

    #[test]
    fn greedy_is_sandwiched(n in 1usize..4, m in 1usize..6, seed: u64) {
        let inst = Family::PfctS.instance(n, m, seed);
        let x = greedy_solve(&inst).unwrap();
        let cost = evaluate_cost(&inst, &x).unwrap();
        let opt = exact_fct(&inst).unwrap().cost;
        prop_assert!(opt_lower_bound(&inst).unwrap() <= opt);
        prop_assert!(opt <= cost);
        prop_assert!(cost <= greedy_upper_bound(&inst).unwrap());
        prop_assert!(cost <= int(2) * opt);
        prop_assert!(no_crossing_check(&inst, &x).unwrap());
    }

    #[test]
    fn fct_u_output_is_a_cheap_forest(n in 1usize..4, m in 1usize..5, seed: u64) {
        let inst = Family::FctU.instance(n, m, seed);
        let sol = solve_fct_u(&inst).unwrap();
        prop_assert!(is_forest(&sol.flow.support(), n, m));
        prop_assert!(sol.flow.support_len() < n + m);
        let opt = exact_fct(&inst).unwrap().cost;
        prop_assert!(sol.cost <= int(2) * opt);
    }

    #[test]
    fn pfct_u_within_six_fifths(n in 1usize..6, m in 1usize..7, seed: u64) {
        let inst = Family::PfctU.instance(n, m, seed);
        let sol = solve_pfct_u(&inst, PfctuOptions::default()).unwrap();
        prop_assert_eq!(sol.flow.check_marginals(&inst), Ok(()));
        prop_assert_eq!(evaluate_cost(&inst, &sol.flow).unwrap(), from_u64(sol.cost as u64));
        let opt = partition_cost(&exact_balanced_partition(&inst).unwrap());
        prop_assert!(from_u64(sol.cost as u64) <= ratio(6, 5) * opt);
    }

    #[test]
    fn bicriteria_meets_band_and_bound(n in 1usize..4, m in 1usize..5, seed: u64, eighth: bool) {
        let inst = Family::Fct.instance(n, m, seed);
        let eps = if eighth { ratio(1, 8) } else { ratio(1, 4) };
        let sol = solve_bicriteria(&inst, &eps).unwrap();
        prop_assert_eq!(sol.flow.check_marginals(&inst), Ok(()));
        let one = Rational::from_integer(1.into());
        for (j, got) in sol.flow.column_sums(m).iter().enumerate() {
            let b = from_u64(inst.demands[j]);
            prop_assert!(*got >= (&one - &eps) * &b && *got <= (&one + &eps) * &b);
        }
        prop_assert!(sol.cost <= sol.cost_bound);
        prop_assert!(sol.lp_value <= exact_fct(&inst).unwrap().cost);
    }

    #[test]
    fn ptas_within_factor(n in 1usize..4, m in 1usize..6, seed: u64) {
        let inst = Family::Pfct.instance(n, m, seed);
        let sol = ptas_solve(&inst, &ratio(1, 2)).unwrap();
        prop_assert!(sol.cost <= ratio(3, 2) * exact_fct(&inst).unwrap().cost);
    }

    #[test]
    fn oracles_agree(n in 1usize..4, m in 1usize..4, seed: u64) {
        let inst = Family::Fct.instance(n, m, seed);
        prop_assert_eq!(exact_fct(&inst).unwrap().cost, exact_fct_by_assignment(&inst).unwrap().cost);
    }
}
