//! PFCT-S: pure instances whose fixed costs depend only on the source.
//!
//! Sources are taken by decreasing fixed cost and sinks by decreasing
//! demand; the greedy two-pointer fill is crossing-free, optimal for the
//! linear relaxation `Σ f_i x_ij / b_j`, and costs at most twice the optimum.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::model::{classify_variant, evaluate_cost, FlowSolution, Instance};
use crate::oracle::exact_fct;
use crate::rational::{format_rational, from_u64, Rational};

/// Sources by nonincreasing fixed cost and sinks by nonincreasing demand,
/// ties by original index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortedView {
    pub sources: Vec<usize>,
    pub sinks: Vec<usize>,
    pub source_rank: Vec<usize>,
    pub sink_rank: Vec<usize>,
    /// Fixed cost per source, in original order.
    pub costs: Vec<Rational>,
}

fn inverse(order: &[usize]) -> Vec<usize> {
    let mut rank = vec![0; order.len()];
    for (r, &v) in order.iter().enumerate() {
        rank[v] = r;
    }
    rank
}

impl SortedView {
    pub fn new(inst: &Instance) -> Result<Self> {
        let tag = classify_variant(inst);
        let costs = match inst.source_costs() {
            Some(costs) if tag.pure => costs,
            _ => return Err(Error::WrongVariant("PFCT-S")),
        };
        let mut sources: Vec<usize> = (0..inst.n()).collect();
        sources.sort_by(|&a, &b| costs[b].cmp(&costs[a]).then(a.cmp(&b)));
        let mut sinks: Vec<usize> = (0..inst.m()).collect();
        sinks.sort_by(|&a, &b| inst.demands[b].cmp(&inst.demands[a]).then(a.cmp(&b)));
        Ok(SortedView {
            source_rank: inverse(&sources),
            sink_rank: inverse(&sinks),
            sources,
            sinks,
            costs,
        })
    }

    /// Fixed costs in sorted order.
    pub fn sorted_costs(&self) -> Vec<Rational> {
        self.sources.iter().map(|&i| self.costs[i].clone()).collect()
    }
}

/// Two-pointer fill over the sorted view.
pub fn greedy_solve(inst: &Instance) -> Result<FlowSolution> {
    let view = SortedView::new(inst)?;
    let mut x = FlowSolution::new();
    let (mut s, mut t) = (0, 0);
    let mut ra = inst.supplies[view.sources[0]];
    let mut rb = inst.demands[view.sinks[0]];
    while s < inst.n() && t < inst.m() {
        let v = ra.min(rb);
        x.add((view.sources[s], view.sinks[t]), &from_u64(v));
        ra -= v;
        rb -= v;
        if ra == 0 {
            s += 1;
            ra = view.sources.get(s).map_or(0, |&i| inst.supplies[i]);
        }
        if rb == 0 {
            t += 1;
            rb = view.sinks.get(t).map_or(0, |&j| inst.demands[j]);
        }
    }
    Ok(x)
}

/// `Σ f_i x_ij / b_j`.
pub fn lp_cost(inst: &Instance, x: &FlowSolution) -> Result<Rational> {
    let costs = inst.source_costs().ok_or(Error::WrongVariant("PFCT-S"))?;
    Ok(x.iter()
        .map(|(&(i, j), v)| &costs[i] * v / from_u64(inst.demands[j]))
        .sum())
}

/// Smallest number of largest-demand sinks whose total demand reaches `t`.
pub fn pi(inst: &Instance, t: &Rational) -> Result<usize> {
    if !t.is_positive() || *t > from_u64(inst.total_supply()) {
        return Err(Error::InvalidArgument(format!(
            "t = {} outside (0, {}]",
            format_rational(t),
            inst.total_supply()
        )));
    }
    let mut demands = inst.demands.clone();
    demands.sort_unstable_by(|a, b| b.cmp(a));
    let mut prefix = 0u64;
    for (k, b) in demands.iter().enumerate() {
        prefix += b;
        if from_u64(prefix) >= *t {
            return Ok(k + 1);
        }
    }
    unreachable!("t is at most the total demand")
}

fn supply_breakpoints(inst: &Instance, view: &SortedView) -> Vec<u64> {
    view.sources
        .iter()
        .scan(0u64, |acc, &i| {
            *acc += inst.supplies[i];
            Some(*acc)
        })
        .collect()
}

/// `Σ_i (f_i - f_{i+1}) π(a([i]))` over the sorted view, with `f_{n+1} = 0`.
pub fn opt_lower_bound(inst: &Instance) -> Result<Rational> {
    let view = SortedView::new(inst)?;
    let f = view.sorted_costs();
    let mut bound = Rational::zero();
    for (k, prefix) in supply_breakpoints(inst, &view).into_iter().enumerate() {
        let next = f.get(k + 1).cloned().unwrap_or_else(Rational::zero);
        let steps = pi(inst, &from_u64(prefix))?;
        bound += (&f[k] - next) * from_u64(steps as u64);
    }
    Ok(bound)
}

/// Sum of all but the largest source fixed cost.
fn tail_costs(view: &SortedView) -> Rational {
    view.sorted_costs().into_iter().skip(1).sum()
}

/// [`opt_lower_bound`] plus every source cost but the largest.
pub fn greedy_upper_bound(inst: &Instance) -> Result<Rational> {
    let view = SortedView::new(inst)?;
    Ok(opt_lower_bound(inst)? + tail_costs(&view))
}

/// True iff no sources `i < i'` and sinks `j < j'` (in sorted order) have
/// both `x_ij' > 0` and `x_i'j > 0`.
pub fn no_crossing_check(inst: &Instance, x: &FlowSolution) -> Result<bool> {
    let view = SortedView::new(inst)?;
    let ranked: Vec<(usize, usize)> = x
        .support()
        .into_iter()
        .map(|(i, j)| (view.source_rank[i], view.sink_rank[j]))
        .collect();
    Ok(!ranked
        .iter()
        .any(|&(i, jp)| ranked.iter().any(|&(ip, j)| i < ip && j < jp)))
}

/// Checks `greedy(inst2) <= opt(inst1) + Δ f_1 + Σ_{i>=2} f_i` for two
/// PFCT-S instances with the same sources, given `π2(t) <= π1(t) + Δ` at
/// every supply breakpoint `t`.
///
/// The optimum of `inst1` comes from [`exact_fct`], so its size limits
/// apply.
pub fn compare_residual_bound(inst1: &Instance, inst2: &Instance, delta: u64) -> Result<bool> {
    let view1 = SortedView::new(inst1)?;
    let view2 = SortedView::new(inst2)?;
    if inst1.supplies != inst2.supplies || view1.costs != view2.costs {
        return Err(Error::InvalidArgument(
            "instances must share sources, supplies and costs".into(),
        ));
    }
    for t in supply_breakpoints(inst1, &view1) {
        let t = from_u64(t);
        if pi(inst2, &t)? > pi(inst1, &t)? + delta as usize {
            return Err(Error::PiShiftExceedsDelta {
                breakpoint: format_rational(&t),
            });
        }
    }
    let greedy = evaluate_cost(inst2, &greedy_solve(inst2)?)?;
    let f = view1.sorted_costs();
    let bound = exact_fct(inst1)?.cost + from_u64(delta) * &f[0] + tail_costs(&view1);
    Ok(greedy <= bound)
}
