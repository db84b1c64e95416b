//! Exact brute-force solvers for small instances.
//!
//! [`exact_fct`] enumerates forest supports edge by edge with a fixed-cost
//! lower bound; the flow on a forest support is unique, so every leaf of the
//! search is evaluated by peeling leaves. [`exact_fct_by_assignment`] is an
//! independent second strategy that enumerates integral flows directly.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::balanced::{elements, BalancedPartition, BalancedSet, Element};
use crate::error::{Error, Result};
use crate::model::{classify_variant, evaluate_cost, FlowSolution, Instance};
use crate::rational::{common_denominator, from_u64, Cost, Rational};
use crate::reductions::{DigraphInstance, DstInstance, SetCoverInstance};

/// Default limit on edges with finite linear cost for [`exact_fct`].
pub const DEFAULT_MAX_EDGES: usize = 24;
/// Cell limit for [`exact_fct_by_assignment`].
pub const ASSIGNMENT_MAX_CELLS: usize = 12;
/// Node budget for [`exact_fct_by_assignment`].
pub const ASSIGNMENT_NODE_BUDGET: u64 = 50_000_000;
pub const PARTITION_MAX_ELEMENTS: usize = 16;
pub const DST_MAX_VERTICES: usize = 7;
pub const DST_MAX_EDGES: usize = 24;
pub const DIGRAPH_MAX_EDGES: usize = 24;
pub const DOMINATING_MAX_SETS: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleSolution {
    pub cost: Rational,
    pub flow: FlowSolution,
}

/// Integer costs scaled by a common denominator.
struct Scaled {
    scale: BigInt,
    fixed: Vec<Vec<i128>>,
    linear: Vec<Vec<Option<i128>>>,
}

const SCALED_LIMIT: i128 = 1 << 60;

fn scale_costs(inst: &Instance) -> Result<Scaled> {
    let finite = inst
        .fixed
        .iter()
        .flatten()
        .chain(inst.linear.iter().flatten().filter_map(Cost::finite));
    let scale = common_denominator(finite);
    let to_int = |r: &Rational| -> Result<i128> {
        let v = (r * Rational::from_integer(scale.clone())).to_integer();
        v.to_i128()
            .filter(|v| v.abs() < SCALED_LIMIT)
            .ok_or(Error::TooLarge("oracle"))
    };
    let fixed = inst
        .fixed
        .iter()
        .map(|row| row.iter().map(to_int).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let linear = inst
        .linear
        .iter()
        .map(|row| {
            row.iter()
                .map(|c| c.finite().map(to_int).transpose())
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(Scaled {
        scale,
        fixed,
        linear,
    })
}

fn unscale(v: i128, scale: &BigInt) -> Rational {
    Rational::new(BigInt::from(v), scale.clone())
}

/// Disjoint sets with undo, for backtracking searches.
struct RollbackDsu {
    parent: Vec<usize>,
    size: Vec<usize>,
    history: Vec<Option<(usize, usize)>>,
}

impl RollbackDsu {
    fn new(n: usize) -> Self {
        RollbackDsu {
            parent: (0..n).collect(),
            size: vec![1; n],
            history: Vec::new(),
        }
    }

    fn find(&self, mut v: usize) -> usize {
        while self.parent[v] != v {
            v = self.parent[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            self.history.push(None);
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.history.push(Some((ra, rb)));
        true
    }

    fn undo(&mut self) {
        if let Some(Some((ra, rb))) = self.history.pop() {
            self.parent[rb] = rb;
            self.size[ra] -= self.size[rb];
        }
    }
}

type IntegralFlow = Vec<((usize, usize), u64)>;

struct ForestSearch<'a> {
    inst: &'a Instance,
    costs: &'a Scaled,
    edges: Vec<(usize, usize)>,
    /// Cheapest fixed cost still needed by sinks after position `k`.
    suffix_bound: Vec<i128>,
    chosen: Vec<usize>,
    sink_covered: Vec<u32>,
    dsu: RollbackDsu,
    best: Option<(i128, IntegralFlow)>,
    linear_floor: i128,
}

impl ForestSearch<'_> {
    fn search(&mut self, k: usize, fixed: i128) {
        if let Some((best, _)) = &self.best {
            let mut bound = fixed + self.linear_floor + self.suffix_bound[k];
            if k < self.edges.len() {
                let j = self.edges[k].1;
                if self.sink_covered[j] == 0 {
                    bound += self.cheapest_remaining(k, j);
                }
            }
            if bound >= *best {
                return;
            }
        }
        if k == self.edges.len() {
            self.evaluate(fixed);
            return;
        }
        let (i, j) = self.edges[k];
        let last_for_sink = self.edges.get(k + 1).is_none_or(|e| e.1 != j);

        let n = self.inst.n();
        if self.dsu.union(i, n + j) {
            self.chosen.push(k);
            self.sink_covered[j] += 1;
            self.search(k + 1, fixed + self.costs.fixed[i][j]);
            self.sink_covered[j] -= 1;
            self.chosen.pop();
        }
        self.dsu.undo();

        if !(last_for_sink && self.sink_covered[j] == 0) {
            self.search(k + 1, fixed);
        }
    }

    fn cheapest_remaining(&self, k: usize, j: usize) -> i128 {
        self.edges[k..]
            .iter()
            .take_while(|e| e.1 == j)
            .map(|&(i, j)| self.costs.fixed[i][j])
            .min()
            .unwrap_or(0)
    }

    fn evaluate(&mut self, fixed: i128) {
        let n = self.inst.n();
        let m = self.inst.m();
        let support: Vec<(usize, usize)> = self.chosen.iter().map(|&k| self.edges[k]).collect();
        let Some(flows) = forest_flow(&support, &self.inst.supplies, &self.inst.demands) else {
            return;
        };
        let mut degree = vec![0usize; n + m];
        for &(i, j) in &support {
            degree[i] += 1;
            degree[n + j] += 1;
        }
        if degree.contains(&0) {
            return;
        }
        let linear: i128 = support
            .iter()
            .zip(&flows)
            .map(|(&(i, j), &x)| self.costs.linear[i][j].expect("allowed edge") * x as i128)
            .sum();
        let total = fixed + linear;
        if self.best.as_ref().is_none_or(|(b, _)| total < *b) {
            self.best = Some((total, support.into_iter().zip(flows).collect()));
        }
    }
}

/// Unique flow on a forest support, or `None` if some edge would carry a
/// nonpositive amount or a component is unbalanced.
pub fn forest_flow(support: &[(usize, usize)], supplies: &[u64], demands: &[u64]) -> Option<Vec<u64>> {
    let n = supplies.len();
    let total = n + demands.len();
    let mut residual: Vec<i128> = supplies
        .iter()
        .map(|&a| a as i128)
        .chain(demands.iter().map(|&b| -(b as i128)))
        .collect();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); total];
    for (e, &(i, j)) in support.iter().enumerate() {
        incident[i].push(e);
        incident[n + j].push(e);
    }
    let mut degree: Vec<usize> = incident.iter().map(Vec::len).collect();
    let mut done = vec![false; support.len()];
    let mut flows = vec![0u64; support.len()];
    let mut stack: Vec<usize> = (0..total).filter(|&v| degree[v] == 1).collect();
    while let Some(v) = stack.pop() {
        if degree[v] != 1 {
            continue;
        }
        let e = *incident[v].iter().find(|&&e| !done[e])?;
        done[e] = true;
        let (i, j) = support[e];
        let other = if v < n { n + j } else { i };
        let x = if v < n { residual[v] } else { -residual[v] };
        if x <= 0 {
            return None;
        }
        flows[e] = x as u64;
        residual[v] = 0;
        if v < n {
            residual[other] += x;
        } else {
            residual[other] -= x;
        }
        degree[v] = 0;
        degree[other] -= 1;
        if degree[other] == 1 {
            stack.push(other);
        }
    }
    if done.iter().all(|&d| d) && residual.iter().all(Zero::is_zero) {
        Some(flows)
    } else {
        None
    }
}

/// Exact optimum by forest-support enumeration.
pub fn exact_fct(inst: &Instance) -> Result<OracleSolution> {
    exact_fct_with_limit(inst, DEFAULT_MAX_EDGES)
}

pub fn exact_fct_with_limit(inst: &Instance, max_edges: usize) -> Result<OracleSolution> {
    if inst.allowed_edge_count() > max_edges {
        return Err(Error::TooLarge("oracle"));
    }
    let costs = scale_costs(inst)?;
    let (n, m) = (inst.n(), inst.m());
    let mut edges: Vec<(usize, usize)> = (0..m)
        .flat_map(|j| (0..n).map(move |i| (i, j)))
        .filter(|&(i, j)| inst.is_allowed(i, j))
        .collect();
    edges.sort_by_key(|&(i, j)| (j, costs.fixed[i][j], i));

    let mut sink_min = vec![None::<i128>; m];
    for &(i, j) in &edges {
        let f = costs.fixed[i][j];
        sink_min[j] = Some(sink_min[j].map_or(f, |v| v.min(f)));
    }
    if sink_min.iter().any(Option::is_none) {
        return Err(Error::NoFeasibleTransportation);
    }
    let mut suffix_bound = vec![0i128; edges.len() + 1];
    for k in (0..edges.len()).rev() {
        let j = edges[k].1;
        let next_is_other_sink = edges.get(k + 1).is_none_or(|e| e.1 != j);
        let later_sinks = if next_is_other_sink {
            sink_min[j + 1..].iter().flatten().sum::<i128>()
        } else {
            suffix_bound[k + 1]
        };
        suffix_bound[k] = later_sinks;
    }
    let linear_floor: i128 = (0..m)
        .map(|j| {
            let cheapest = (0..n).filter_map(|i| costs.linear[i][j]).min().unwrap_or(0);
            cheapest * inst.demands[j] as i128
        })
        .sum();

    let mut search = ForestSearch {
        inst,
        costs: &costs,
        edges,
        suffix_bound,
        chosen: Vec::new(),
        sink_covered: vec![0; m],
        dsu: RollbackDsu::new(n + m),
        best: None,
        linear_floor,
    };
    search.search(0, 0);
    let (scaled, support) = search.best.ok_or(Error::NoFeasibleTransportation)?;
    let flow = FlowSolution::from_entries(support.into_iter().map(|(e, x)| (e, from_u64(x))));
    let cost = unscale(scaled, &costs.scale);
    debug_assert_eq!(evaluate_cost(inst, &flow).ok(), Some(cost.clone()));
    Ok(OracleSolution { cost, flow })
}

/// Exact optimum by enumerating every integral feasible flow.
pub fn exact_fct_by_assignment(inst: &Instance) -> Result<OracleSolution> {
    let (n, m) = (inst.n(), inst.m());
    if n * m > ASSIGNMENT_MAX_CELLS {
        return Err(Error::TooLarge("assignment enumeration"));
    }
    let costs = scale_costs(inst)?;

    struct Walk<'a> {
        costs: &'a Scaled,
        n: usize,
        m: usize,
        row_left: Vec<u64>,
        col_left: Vec<u64>,
        cells: Vec<u64>,
        nodes: u64,
        best: Option<(i128, Vec<u64>)>,
    }

    impl Walk<'_> {
        fn go(&mut self, cell: usize, cost: i128) -> Result<()> {
            self.nodes += 1;
            if self.nodes > ASSIGNMENT_NODE_BUDGET {
                return Err(Error::TooLarge("assignment enumeration"));
            }
            if cell == self.n * self.m {
                if self.best.as_ref().is_none_or(|(b, _)| cost < *b) {
                    self.best = Some((cost, self.cells.clone()));
                }
                return Ok(());
            }
            let (i, j) = (cell / self.m, cell % self.m);
            let later_in_row: u64 = self.col_left[j + 1..].iter().sum();
            let low = self.row_left[i].saturating_sub(later_in_row);
            let high = self.row_left[i].min(self.col_left[j]);
            for v in low..=high {
                let mut c = cost;
                if v > 0 {
                    let Some(lin) = self.costs.linear[i][j] else { continue };
                    c += self.costs.fixed[i][j] + lin * v as i128;
                }
                self.row_left[i] -= v;
                self.col_left[j] -= v;
                self.cells[cell] = v;
                let r = self.go(cell + 1, c);
                self.row_left[i] += v;
                self.col_left[j] += v;
                r?;
            }
            self.cells[cell] = 0;
            Ok(())
        }
    }

    let mut walk = Walk {
        costs: &costs,
        n,
        m,
        row_left: inst.supplies.clone(),
        col_left: inst.demands.clone(),
        cells: vec![0; n * m],
        nodes: 0,
        best: None,
    };
    walk.go(0, 0)?;
    let (scaled, cells) = walk.best.ok_or(Error::NoFeasibleTransportation)?;
    let flow = FlowSolution::from_entries(
        cells
            .iter()
            .enumerate()
            .map(|(c, &v)| ((c / m, c % m), from_u64(v))),
    );
    Ok(OracleSolution {
        cost: unscale(scaled, &costs.scale),
        flow,
    })
}

/// Maximum number of parts in a partition of all sources and sinks into
/// balanced sets.
pub fn exact_balanced_partition(inst: &Instance) -> Result<BalancedPartition> {
    let tag = classify_variant(inst);
    if !tag.pure_modulo_forbidden {
        return Err(Error::WrongVariant("a pure instance"));
    }
    let elems: Vec<Element> = elements(inst);
    let size = elems.len();
    if size > PARTITION_MAX_ELEMENTS {
        return Err(Error::TooLarge("balanced partition oracle"));
    }
    let signed: Vec<i64> = elems
        .iter()
        .map(|e| match e.side {
            crate::balanced::Side::Source => e.weight as i64,
            crate::balanced::Side::Sink => -(e.weight as i64),
        })
        .collect();
    let full = (1usize << size) - 1;
    let mut sum = vec![0i64; full + 1];
    for mask in 1..=full {
        let low = mask.trailing_zeros() as usize;
        sum[mask] = sum[mask & (mask - 1)] + signed[low];
    }
    // best[mask]: most balanced prefixes over orderings of `mask`.
    let mut best = vec![0u8; full + 1];
    let mut last = vec![0u8; full + 1];
    for mask in 1..=full {
        let mut value = 0u8;
        let mut pick = mask.trailing_zeros() as u8;
        let mut rest = mask;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let candidate = best[mask & !(1 << v)];
            if candidate > value {
                value = candidate;
                pick = v as u8;
            }
        }
        best[mask] = value + u8::from(sum[mask] == 0);
        last[mask] = pick;
    }

    let mut order = Vec::with_capacity(size);
    let mut mask = full;
    while mask != 0 {
        let v = last[mask] as usize;
        order.push(v);
        mask &= !(1 << v);
    }
    order.reverse();
    let mut parts = Vec::new();
    let mut current = Vec::new();
    let mut running = 0i64;
    for v in order {
        current.push(elems[v]);
        running += signed[v];
        if running == 0 {
            parts.push(BalancedSet::new(std::mem::take(&mut current))?);
        }
    }
    debug_assert_eq!(parts.len(), best[full] as usize);
    parts.sort();
    Ok(BalancedPartition { parts })
}

/// Include/exclude search over edges sorted by cost. `feasible` must be
/// monotone under adding edges; costs are nonnegative, so the first
/// feasible subset on a branch ends it.
fn cheapest_feasible_subset(
    costs: &[Rational],
    feasible: &dyn Fn(&[bool]) -> bool,
) -> Option<Rational> {
    let mut order: Vec<usize> = (0..costs.len()).collect();
    order.sort_by(|&a, &b| costs[a].cmp(&costs[b]).then(a.cmp(&b)));

    struct Walk<'a> {
        order: Vec<usize>,
        costs: &'a [Rational],
        feasible: &'a dyn Fn(&[bool]) -> bool,
        chosen: Vec<bool>,
        best: Option<Rational>,
    }

    impl Walk<'_> {
        fn go(&mut self, k: usize, cost: Rational) {
            if self.best.as_ref().is_some_and(|b| cost >= *b) {
                return;
            }
            if (self.feasible)(&self.chosen) {
                self.best = Some(cost);
                return;
            }
            if k == self.order.len() {
                return;
            }
            let mut optimistic = self.chosen.clone();
            for &e in &self.order[k..] {
                optimistic[e] = true;
            }
            if !(self.feasible)(&optimistic) {
                return;
            }
            let e = self.order[k];
            self.chosen[e] = true;
            let with = &cost + &self.costs[e];
            self.go(k + 1, with);
            self.chosen[e] = false;
            self.go(k + 1, cost);
        }
    }

    let mut walk = Walk {
        order,
        costs,
        feasible,
        chosen: vec![false; costs.len()],
        best: None,
    };
    walk.go(0, Rational::zero());
    walk.best
}

/// Cheapest edge subset connecting the root to every terminal.
pub fn exact_dst(dst: &DstInstance) -> Result<Rational> {
    if dst.vertex_count > DST_MAX_VERTICES || dst.edges.len() > DST_MAX_EDGES {
        return Err(Error::TooLarge("DST oracle"));
    }
    dst.validate()?;
    let costs: Vec<Rational> = dst.edges.iter().map(|e| e.cost.clone()).collect();
    let connects = |chosen: &[bool]| -> bool {
        let mut seen = vec![false; dst.vertex_count];
        seen[dst.root] = true;
        let mut stack = vec![dst.root];
        while let Some(v) = stack.pop() {
            for (e, edge) in dst.edges.iter().enumerate() {
                if chosen[e] && edge.from == v && !seen[edge.to] {
                    seen[edge.to] = true;
                    stack.push(edge.to);
                }
            }
        }
        dst.terminals.iter().all(|&t| seen[t])
    };
    cheapest_feasible_subset(&costs, &connects).ok_or(Error::InfeasibleDst(dst.terminals[0]))
}

/// Whether all supply can be routed to the demands over the chosen edges,
/// which have unbounded capacity.
fn routable(dg: &DigraphInstance, chosen: &[bool]) -> bool {
    let size = dg.vertex_count + 2;
    let (source, sink) = (size - 2, size - 1);
    let total = dg.total_supply();
    let mut cap = vec![vec![0u64; size]; size];
    for (e, edge) in dg.edges.iter().enumerate() {
        if chosen[e] {
            cap[edge.from][edge.to] = total;
        }
    }
    for &(v, a) in &dg.supplies {
        cap[source][v] += a;
    }
    for &(v, b) in &dg.demands {
        cap[v][sink] += b;
    }
    let mut flow = 0u64;
    loop {
        let mut prev = vec![usize::MAX; size];
        prev[source] = source;
        let mut queue = std::collections::VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for v in 0..size {
                if prev[v] == usize::MAX && cap[u][v] > 0 {
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if prev[sink] == usize::MAX {
            return flow == total;
        }
        let mut push = u64::MAX;
        let mut v = sink;
        while v != source {
            push = push.min(cap[prev[v]][v]);
            v = prev[v];
        }
        let mut v = sink;
        while v != source {
            cap[prev[v]][v] -= push;
            cap[v][prev[v]] += push;
            v = prev[v];
        }
        flow += push;
    }
}

/// Exact optimum of a flow problem on a digraph with fixed edge costs.
pub fn exact_pfct_digraph(dg: &DigraphInstance) -> Result<Rational> {
    if dg.edges.len() > DIGRAPH_MAX_EDGES {
        return Err(Error::TooLarge("digraph oracle"));
    }
    dg.validate()?;
    let costs: Vec<Rational> = dg.edges.iter().map(|e| e.cost.clone()).collect();
    cheapest_feasible_subset(&costs, &|chosen: &[bool]| routable(dg, chosen))
        .ok_or(Error::NoFeasibleTransportation)
}

/// Fewest sets covering every element.
pub fn exact_min_dominating(sc: &SetCoverInstance) -> Result<usize> {
    if sc.sets > DOMINATING_MAX_SETS {
        return Err(Error::TooLarge("dominating set oracle"));
    }
    sc.validate()?;
    let covers: Vec<u64> = (0..sc.sets)
        .map(|v| {
            sc.membership
                .iter()
                .filter(|&&(s, _)| s == v)
                .fold(0u64, |acc, &(_, u)| acc | 1 << u)
        })
        .collect();
    let all = if sc.elements == 0 { 0 } else { (1u64 << sc.elements) - 1 };
    (0u32..1 << sc.sets)
        .filter(|mask| {
            let union = (0..sc.sets)
                .filter(|v| mask >> v & 1 == 1)
                .fold(0u64, |acc, v| acc | covers[v]);
            union == all
        })
        .map(|mask| mask.count_ones() as usize)
        .min()
        .ok_or(Error::UncoveredElement(0))
}

/// `Σ_parts (|part| - 1)` as a rational, for comparing with [`exact_fct`].
pub fn partition_cost(partition: &BalancedPartition) -> Rational {
    partition
        .parts
        .iter()
        .map(|p| from_u64(p.len() as u64) - Rational::one())
        .sum()
}
