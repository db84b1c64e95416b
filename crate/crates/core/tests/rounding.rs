use fct_core::bicriteria::{check_rounding, relaxation_weights, round_tree, NormalizedFractional};
use fct_core::random::Family;
use fct_core::rational::ratio;
use fct_core::transport::{cancel_cycles, solve_transportation};
use fct_core::Instance;

fn scaled(seed: u64) -> Instance {
    let base = Family::Fct.instance(2, 3, seed);
    let supplies = vec![16 * base.supplies[0] + 1, 16 * base.supplies[1]];
    let mut demands: Vec<u64> = base.demands.iter().map(|b| 16 * b).collect();
    demands[seed as usize % 3] += 1;
    Instance::new(supplies, demands, base.fixed, base.linear).unwrap()
}

#[test]
fn rounding_properties_hold_on_small_lp_edges() {
    let eps = ratio(1, 16);
    let mut rounded_cases = 0;
    for seed in 0..200 {
        let inst = scaled(seed);
        let w = relaxation_weights(&inst);
        let lp = solve_transportation(&inst, &w).unwrap();
        let nf = NormalizedFractional::from_flow(&inst, &cancel_cycles(&lp.flow, &w));
        let after = round_tree(&nf, &w, &eps, 2, 3).unwrap();
        assert_eq!(check_rounding(&nf, &after, &w, &eps, &inst), Ok(()), "seed {seed}");
        if nf.y.values().any(|y| *y < eps) {
            rounded_cases += 1;
        }
    }
    assert!(rounded_cases > 0);
}
