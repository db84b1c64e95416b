//! Bicriteria approximation for general FCT: cost within `O(1/ε)` of the
//! optimum while every sink receives between `(1-ε) b_j` and `(1+ε) b_j`.
//!
//! The linear relaxation with per-unit weight `c_ij + f_ij / p_ij`,
//! `p_ij = min(a_i, b_j)`, is solved on a forest support. Edges are then
//! rounded tree by tree in normalized units `y = x / p`, and every source
//! row is rescaled back to its exact supply.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::model::{evaluate_cost, FlowSolution, Instance};
use crate::rational::{from_u64, ratio, Cost, Rational};
use crate::transport::{cancel_cycles, is_forest, solve_transportation, WeightMatrix};

/// Normalized fractional solution `y = x / p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedFractional {
    pub y: BTreeMap<(usize, usize), Rational>,
    /// `p_ij = min(a_i, b_j)`.
    pub p: Vec<Vec<u64>>,
}

impl NormalizedFractional {
    pub fn from_flow(inst: &Instance, x: &FlowSolution) -> Self {
        let p = capacities(inst);
        let y = x
            .iter()
            .map(|(&(i, j), v)| ((i, j), v / from_u64(p[i][j])))
            .collect();
        NormalizedFractional { y, p }
    }

    pub fn to_flow(&self) -> FlowSolution {
        FlowSolution::from_entries(
            self.y
                .iter()
                .map(|(&(i, j), y)| ((i, j), y * from_u64(self.p[i][j]))),
        )
    }

    fn mass(&self, e: (usize, usize), y: &Rational) -> Rational {
        y * from_u64(self.p[e.0][e.1])
    }
}

pub fn capacities(inst: &Instance) -> Vec<Vec<u64>> {
    inst.supplies
        .iter()
        .map(|&a| inst.demands.iter().map(|&b| a.min(b)).collect())
        .collect()
}

/// Per-unit relaxation weight `c_ij + f_ij / p_ij`.
pub fn relaxation_weights(inst: &Instance) -> WeightMatrix {
    let p = capacities(inst);
    WeightMatrix::from_fn(inst.n(), inst.m(), |i, j| match &inst.linear[i][j] {
        Cost::Infinite => Cost::Infinite,
        Cost::Finite(c) => Cost::Finite(c + &inst.fixed[i][j] / from_u64(p[i][j])),
    })
}

/// `1 / (ε (1 - 2ε))`.
pub fn cost_factor(eps: &Rational) -> Rational {
    Rational::one() / (eps * (Rational::one() - eps * Rational::from_integer(2.into())))
}

/// For every vertex, the edges to its children when each tree of the
/// support is rooted at its lowest vertex (sources `0..n`, then sinks).
pub fn child_groups(support: &[(usize, usize)], n: usize, m: usize) -> Result<Vec<Vec<(usize, usize)>>> {
    if !is_forest(support, n, m) {
        return Err(Error::NotAForest);
    }
    let mut adjacent: Vec<Vec<((usize, usize), usize)>> = vec![Vec::new(); n + m];
    for &(i, j) in support {
        adjacent[i].push(((i, j), n + j));
        adjacent[n + j].push(((i, j), i));
    }
    let mut groups = vec![Vec::new(); n + m];
    let mut seen = vec![false; n + m];
    for root in 0..n + m {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for &(e, u) in &adjacent[v] {
                if !seen[u] {
                    seen[u] = true;
                    groups[v].push(e);
                    stack.push(u);
                }
            }
        }
    }
    for g in &mut groups {
        g.sort_unstable();
    }
    Ok(groups)
}

/// Rounds every child group so that small entries (`y < eps`) become `0` or
/// `eps`.
///
/// Within a group, mass moves from the most expensive small edge (per unit
/// of `p`, by `w`) into the cheapest until at most one small edge is
/// fractional; that one is dropped.
pub fn round_tree(
    nf: &NormalizedFractional,
    w: &WeightMatrix,
    eps: &Rational,
    n: usize,
    m: usize,
) -> Result<NormalizedFractional> {
    let support: Vec<(usize, usize)> = nf.y.keys().copied().collect();
    let groups = child_groups(&support, n, m)?;
    let mut out = nf.clone();
    for group in groups {
        let mut small: Vec<(usize, usize)> = group
            .into_iter()
            .filter(|e| nf.y[e] < *eps)
            .collect();
        small.sort_by(|a, b| w.get(b.0, b.1).cmp(w.get(a.0, a.1)).then(a.cmp(b)));
        let mut mass: Vec<Rational> = small.iter().map(|e| nf.mass(*e, &nf.y[e])).collect();
        let target: Vec<Rational> = small.iter().map(|e| nf.mass(*e, eps)).collect();
        let (mut lo, mut hi) = (0usize, small.len());
        while hi > lo + 1 {
            let cheap = hi - 1;
            let room = &target[cheap] - &mass[cheap];
            let moved = room.clone().min(mass[lo].clone());
            mass[cheap] += &moved;
            mass[lo] -= &moved;
            if mass[cheap] == target[cheap] {
                hi -= 1;
            }
            if mass[lo].is_zero() {
                lo += 1;
            }
        }
        if hi == lo + 1 && mass[lo] != target[lo] {
            mass[lo] = Rational::zero();
        }
        for (k, e) in small.iter().enumerate() {
            if mass[k].is_zero() {
                out.y.remove(e);
            } else {
                out.y.insert(*e, eps.clone());
            }
        }
    }
    Ok(out)
}

/// Checks the per-group rounding guarantees; returns a description of the
/// first violation.
pub fn check_rounding(
    before: &NormalizedFractional,
    after: &NormalizedFractional,
    w: &WeightMatrix,
    eps: &Rational,
    inst: &Instance,
) -> std::result::Result<(), String> {
    let (n, m) = (inst.n(), inst.m());
    let support: Vec<(usize, usize)> = before.y.keys().copied().collect();
    let groups = child_groups(&support, n, m).map_err(|e| e.to_string())?;
    if let Some(e) = after.y.keys().find(|e| !before.y.contains_key(e)) {
        return Err(format!("edge {e:?} added by rounding"));
    }
    let zero = Rational::zero();
    for (v, group) in groups.iter().enumerate() {
        let weight = if v < n { inst.supplies[v] } else { inst.demands[v - n] };
        let mut drift = Rational::zero();
        let mut cost_before = Rational::zero();
        let mut cost_after = Rational::zero();
        for e in group {
            let y = &before.y[e];
            let y2 = after.y.get(e).unwrap_or(&zero);
            if y >= eps && y2 != y {
                return Err(format!("large edge {e:?} changed"));
            }
            if y < eps && !(y2.is_zero() || y2 == eps) {
                return Err(format!("small edge {e:?} not rounded to 0 or eps"));
            }
            drift += before.mass(*e, y2) - before.mass(*e, y);
            let unit = w.get(e.0, e.1).finite().cloned().unwrap_or_default() * from_u64(before.p[e.0][e.1]);
            cost_before += &unit * y;
            cost_after += &unit * y2;
        }
        if drift > zero || drift <= -(eps * from_u64(weight)) {
            return Err(format!("vertex {v}: mass drift outside (-eps*weight, 0]"));
        }
        if cost_after > cost_before {
            return Err(format!("vertex {v}: rounding increased cost"));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BicriteriaSolution {
    /// Tagged with the requested `ε`.
    pub flow: FlowSolution,
    pub cost: Rational,
    /// Optimal value of the relaxation.
    pub lp_value: Rational,
    /// Rounding threshold `ε / 4`.
    pub inner_epsilon: Rational,
    /// `cost_factor(inner_epsilon) * lp_value`; `cost` never exceeds it.
    pub cost_bound: Rational,
}

pub fn solve_bicriteria(inst: &Instance, eps: &Rational) -> Result<BicriteriaSolution> {
    if !(eps > &Rational::zero() && eps <= &ratio(1, 4)) {
        return Err(Error::InvalidArgument("epsilon must lie in (0, 1/4]".into()));
    }
    let inner = eps / Rational::from_integer(4.into());
    let w = relaxation_weights(inst);
    let lp = solve_transportation(inst, &w)?;
    let x = cancel_cycles(&lp.flow, &w);
    let nf = NormalizedFractional::from_flow(inst, &x);
    let rounded = round_tree(&nf, &w, &inner, inst.n(), inst.m())?.to_flow();

    let rows = rounded.row_sums(inst.n());
    let mut flow = FlowSolution::new();
    for (&(i, j), v) in rounded.iter() {
        flow.set((i, j), v * from_u64(inst.supplies[i]) / &rows[i]);
    }
    flow.relaxation = Some(eps.clone());
    let cost = evaluate_cost(inst, &flow)?;
    let cost_bound = cost_factor(&inner) * &lp.value;
    Ok(BicriteriaSolution {
        flow,
        cost,
        lp_value: lp.value,
        inner_epsilon: inner,
        cost_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn c(v: i64) -> Cost {
        Cost::Finite(int(v))
    }

    #[test]
    fn factor_value() {
        assert_eq!(cost_factor(&ratio(1, 16)), Rational::new(128.into(), 7.into()));
    }

    #[test]
    fn single_cell() {
        let inst = Instance::new(vec![3], vec![3], vec![vec![int(5)]], vec![vec![c(2)]]).unwrap();
        let sol = solve_bicriteria(&inst, &ratio(1, 4)).unwrap();
        assert_eq!(sol.flow.get(0, 0), int(3));
        assert_eq!(sol.cost, int(11));
        assert_eq!(sol.lp_value, int(11));
    }

    #[test]
    fn no_small_edges_means_exact_marginals() {
        let inst = Instance::new(
            vec![4, 2],
            vec![3, 3],
            vec![vec![int(1), int(1)], vec![int(1), int(1)]],
            vec![vec![c(0), c(5)], vec![c(5), c(0)]],
        )
        .unwrap();
        let sol = solve_bicriteria(&inst, &ratio(1, 8)).unwrap();
        let mut exact = sol.flow.clone();
        exact.relaxation = None;
        assert_eq!(exact.check_marginals(&inst), Ok(()));
        assert!(sol.cost <= sol.cost_bound);
    }

    #[test]
    fn two_equal_small_edges_merge() {
        let eps = ratio(1, 16);
        let inst = Instance::pure(vec![64], vec![32, 32], vec![vec![int(1), int(1)]]).unwrap();
        let w = WeightMatrix::from_fn(1, 2, |_, _| c(1));
        let nf = NormalizedFractional {
            y: BTreeMap::from([((0, 0), ratio(1, 32)), ((0, 1), ratio(1, 32))]),
            p: vec![vec![32, 32]],
        };
        let rounded = round_tree(&nf, &w, &eps, 1, 2).unwrap();
        assert_eq!(rounded.y, BTreeMap::from([((0, 1), eps.clone())]));
        assert_eq!(check_rounding(&nf, &rounded, &w, &eps, &inst), Ok(()));
    }

    #[test]
    fn leaves_and_large_edges_are_untouched() {
        let eps = ratio(1, 16);
        let inst = Instance::pure(vec![4], vec![2, 2], vec![vec![int(1), int(1)]]).unwrap();
        let w = WeightMatrix::from_fn(1, 2, |_, _| c(1));
        let nf = NormalizedFractional::from_flow(
            &inst,
            &FlowSolution::from_entries([((0, 0), int(2)), ((0, 1), int(2))]),
        );
        assert_eq!(round_tree(&nf, &w, &eps, 1, 2).unwrap(), nf);
    }

    #[test]
    fn mass_moves_toward_cheaper_edges() {
        let eps = ratio(1, 8);
        let inst = Instance::pure(vec![30], vec![10, 10, 10], vec![vec![int(1), int(1), int(1)]]).unwrap();
        let w = WeightMatrix::new(vec![vec![c(3), c(1), c(2)]]);
        let nf = NormalizedFractional {
            y: BTreeMap::from([
                ((0, 0), ratio(1, 10)),
                ((0, 1), ratio(1, 10)),
                ((0, 2), ratio(1, 20)),
            ]),
            p: vec![vec![10, 10, 10]],
        };
        let rounded = round_tree(&nf, &w, &eps, 1, 3).unwrap();
        assert_eq!(
            rounded.y,
            BTreeMap::from([((0, 1), eps.clone()), ((0, 2), eps.clone())])
        );
        assert_eq!(check_rounding(&nf, &rounded, &w, &eps, &inst), Ok(()));
    }

    #[test]
    fn epsilon_range() {
        let inst = Instance::pure_uniform(vec![1], vec![1]).unwrap();
        assert!(solve_bicriteria(&inst, &ratio(1, 3)).is_err());
        assert!(solve_bicriteria(&inst, &int(0)).is_err());
        assert!(solve_bicriteria(&inst, &ratio(1, 4)).is_ok());
    }
}
