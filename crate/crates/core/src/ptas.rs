//! `(1+ε)`-approximation for pure FCT with few sources.
//!
//! Every set `P` of `⌈2n/ε⌉` allowed edges is tried as the guess for the
//! most expensive edges of an optimum. Edges outside `P` dearer than the
//! cheapest edge of `P` are forbidden, the rest are charged `f_ij / b_j`
//! per unit, and the best actual cost over all guesses wins.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::model::{classify_variant, evaluate_cost, FlowSolution, Instance};
use crate::rational::{from_u64, Cost, Rational};
use crate::oracle::forest_flow;
use crate::transport::{cancel_cycles, is_forest, solve_transportation, TransportSolution, WeightMatrix};

/// Limit on the number of guessed sets.
pub const PTAS_MAX_CANDIDATES: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuessedSet {
    /// Sorted edges of `P`.
    pub edges: Vec<(usize, usize)>,
    /// Cheapest fixed cost in `P`; `None` when `P` is empty.
    pub threshold: Option<Rational>,
}

impl GuessedSet {
    pub fn new(inst: &Instance, mut edges: Vec<(usize, usize)>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        let threshold = edges.iter().map(|&(i, j)| inst.fixed[i][j].clone()).min();
        GuessedSet { edges, threshold }
    }

    pub fn contains(&self, edge: (usize, usize)) -> bool {
        self.edges.binary_search(&edge).is_ok()
    }

    pub fn fixed_total(&self, inst: &Instance) -> Rational {
        self.edges.iter().map(|&(i, j)| inst.fixed[i][j].clone()).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PtasSolution {
    pub flow: FlowSolution,
    pub cost: Rational,
    pub guess: GuessedSet,
    /// Guesses whose restricted relaxation was feasible.
    pub feasible_guesses: u64,
}

/// `min(⌈2n/ε⌉, allowed edges)`.
pub fn guess_size(inst: &Instance, eps: &Rational) -> usize {
    let bound = (Rational::from_integer((2 * inst.n()).into()) / eps).ceil();
    let allowed = inst.allowed_edge_count();
    bound
        .to_integer()
        .try_into()
        .map_or(allowed, |b: usize| b.min(allowed))
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k) as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n as u128 - i) / (i + 1);
        if acc > PTAS_MAX_CANDIDATES {
            return u128::MAX;
        }
    }
    acc
}

/// Solves the relaxation restricted by `guess`. The returned value includes
/// the fixed costs of `P`; `None` when the restriction is infeasible.
pub fn restricted_lp(inst: &Instance, guess: &GuessedSet) -> Result<Option<TransportSolution>> {
    let w = WeightMatrix::from_fn(inst.n(), inst.m(), |i, j| {
        if !inst.is_allowed(i, j) {
            Cost::Infinite
        } else if guess.contains((i, j)) {
            Cost::zero()
        } else if guess.threshold.as_ref().is_some_and(|f| inst.fixed[i][j] > *f) {
            Cost::Infinite
        } else {
            Cost::Finite(&inst.fixed[i][j] / from_u64(inst.demands[j]))
        }
    });
    match solve_transportation(inst, &w) {
        Ok(sol) => Ok(Some(TransportSolution {
            flow: cancel_cycles(&sol.flow, &w),
            value: sol.value + guess.fixed_total(inst),
        })),
        Err(Error::NoFeasibleTransportation) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Edges outside `P` carrying a partial sink demand, `0 < x_ij < b_j`.
pub fn partial_edges_outside(inst: &Instance, flow: &FlowSolution, guess: &GuessedSet) -> usize {
    flow.iter()
        .filter(|&(&(i, j), v)| !guess.contains((i, j)) && *v < from_u64(inst.demands[j]))
        .count()
}

/// Runs every guess. A guess smaller than the full guess size stands for
/// the whole support of an optimum and is evaluated directly as a support;
/// a full-size guess goes through [`restricted_lp`]. Optimal supports are
/// forests, so only acyclic guesses with at most `n + m - 1` edges are
/// tried.
pub fn ptas_solve(inst: &Instance, eps: &Rational) -> Result<PtasSolution> {
    if !classify_variant(inst).pure_modulo_forbidden {
        return Err(Error::WrongVariant("PFCT"));
    }
    if *eps <= Rational::zero() || !eps.numer().is_one() {
        return Err(Error::InvalidArgument("1/epsilon must be a positive integer".into()));
    }
    let (n, m) = (inst.n(), inst.m());
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .filter(|&(i, j)| inst.is_allowed(i, j))
        .collect();
    let size = guess_size(inst, eps);
    let largest = size.min(n + m - 1);
    let candidates = (0..=largest).fold(0u128, |acc, k| acc.saturating_add(binomial(edges.len(), k)));
    if candidates > PTAS_MAX_CANDIDATES {
        return Err(Error::TooLarge("PTAS enumeration"));
    }

    let mut best: Option<PtasSolution> = None;
    let mut feasible = 0u64;
    for k in 0..=largest {
        let mut pick: Vec<usize> = (0..k).collect();
        loop {
            let chosen: Vec<(usize, usize)> = pick.iter().map(|&q| edges[q]).collect();
            if is_forest(&chosen, n, m) {
                let guess = GuessedSet::new(inst, chosen);
                let found = if k < size {
                    forest_flow(&guess.edges, &inst.supplies, &inst.demands).map(|flows| {
                        FlowSolution::from_entries(guess.edges.iter().zip(flows).map(|(&e, v)| (e, from_u64(v))))
                    })
                } else {
                    restricted_lp(inst, &guess)?.map(|sol| sol.flow)
                };
                if let Some(flow) = found {
                    feasible += 1;
                    let cost = evaluate_cost(inst, &flow)?;
                    if best.as_ref().is_none_or(|b| cost < b.cost) {
                        best = Some(PtasSolution {
                            flow,
                            cost,
                            guess,
                            feasible_guesses: 0,
                        });
                    }
                }
            }
            if !next_combination(&mut pick, edges.len()) {
                break;
            }
        }
    }
    let mut best = best.ok_or(Error::NoFeasibleTransportation)?;
    best.feasible_guesses = feasible;
    Ok(best)
}

fn next_combination(pick: &mut [usize], n: usize) -> bool {
    let k = pick.len();
    for pos in (0..k).rev() {
        if pick[pos] < n - k + pos {
            pick[pos] += 1;
            for q in pos + 1..k {
                pick[q] = pick[q - 1] + 1;
            }
            return true;
        }
    }
    false
}
