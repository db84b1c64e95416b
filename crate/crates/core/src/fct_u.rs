//! FCT-U: unit fixed costs with arbitrary linear costs.
//!
//! A linear-cost optimum with forest support costs at most `n + m - 1` in
//! fixed charges, while any solution pays at least `max(n, m)`, so the
//! result is within a factor two.

use crate::error::{Error, Result};
use crate::model::{classify_variant, evaluate_cost, linear_cost, FlowSolution, Instance};
use crate::rational::Rational;
use crate::transport::{cancel_cycles, solve_transportation, WeightMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FctuSolution {
    pub flow: FlowSolution,
    pub cost: Rational,
    /// Linear part of `cost`; equals the transportation optimum.
    pub linear: Rational,
}

pub fn solve_fct_u(inst: &Instance) -> Result<FctuSolution> {
    if !classify_variant(inst).uniform {
        return Err(Error::WrongVariant("FCT-U"));
    }
    let w = WeightMatrix::linear_costs(inst);
    let lp = solve_transportation(inst, &w)?;
    let flow = cancel_cycles(&lp.flow, &w);
    Ok(FctuSolution {
        cost: evaluate_cost(inst, &flow)?,
        linear: linear_cost(inst, &flow)?,
        flow,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, Cost};
    use crate::transport::is_forest;

    #[test]
    fn two_by_two_example() {
        let c = |v: i64| Cost::Finite(int(v));
        let inst =
            Instance::uniform_with_linear(vec![2, 2], vec![3, 1], vec![vec![c(0), c(1)], vec![c(1), c(0)]])
                .unwrap();
        let sol = solve_fct_u(&inst).unwrap();
        assert_eq!(
            sol.flow,
            FlowSolution::from_entries([((0, 0), int(2)), ((1, 0), int(1)), ((1, 1), int(1))])
        );
        assert_eq!(sol.cost, int(4));
        assert_eq!(sol.linear, int(1));
    }

    #[test]
    fn zero_linear_costs_give_a_forest() {
        let inst = Instance::pure_uniform(vec![3, 4, 2], vec![2, 2, 5]).unwrap();
        let sol = solve_fct_u(&inst).unwrap();
        assert!(is_forest(&sol.flow.support(), 3, 3));
        assert!(sol.flow.support_len() <= 5);
        assert_eq!(sol.cost, int(sol.flow.support_len() as i64));
    }

    #[test]
    fn single_cell() {
        let inst = Instance::uniform_with_linear(vec![4], vec![4], vec![vec![Cost::Finite(int(3))]]).unwrap();
        assert_eq!(solve_fct_u(&inst).unwrap().cost, int(13));
    }

    #[test]
    fn requires_unit_fixed_costs() {
        let inst = Instance::pure(vec![1], vec![1], vec![vec![int(2)]]).unwrap();
        assert_eq!(solve_fct_u(&inst), Err(Error::WrongVariant("FCT-U")));
    }
}
