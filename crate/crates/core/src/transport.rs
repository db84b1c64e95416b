//! Exact minimisation of linear objectives over the transportation polytope,
//! and cycle cancellation down to forest support.
//!
//! The solver runs successive shortest paths with node potentials on the
//! bipartite network `source → i → j → sink`. Weights are scaled by the
//! common denominator to integers first; the search then runs on `i64` when
//! the scaled magnitudes leave enough headroom and on `BigInt` otherwise.

use std::ops::{Add, Sub};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::model::{FlowSolution, Instance};
use crate::rational::{common_denominator, from_u64, Cost, Rational};

/// Objective coefficients for a linear program over the transportation
/// polytope. `Cost::Infinite` excludes the edge entirely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightMatrix {
    pub w: Vec<Vec<Cost>>,
}

impl WeightMatrix {
    pub fn new(w: Vec<Vec<Cost>>) -> Self {
        WeightMatrix { w }
    }

    pub fn zeros(n: usize, m: usize) -> Self {
        WeightMatrix {
            w: vec![vec![Cost::zero(); m]; n],
        }
    }

    pub fn from_fn(n: usize, m: usize, mut f: impl FnMut(usize, usize) -> Cost) -> Self {
        WeightMatrix {
            w: (0..n).map(|i| (0..m).map(|j| f(i, j)).collect()).collect(),
        }
    }

    /// The instance's own linear costs.
    pub fn linear_costs(inst: &Instance) -> Self {
        WeightMatrix {
            w: inst.linear.clone(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> &Cost {
        &self.w[i][j]
    }

    /// `Σ w_ij x_ij`, infinite if any support edge is forbidden.
    pub fn weighted_cost(&self, x: &FlowSolution) -> Cost {
        let mut total = Rational::zero();
        for (&(i, j), v) in x.iter() {
            match &self.w[i][j] {
                Cost::Finite(c) => total += c * v,
                Cost::Infinite => return Cost::Infinite,
            }
        }
        Cost::Finite(total)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransportSolution {
    pub flow: FlowSolution,
    pub value: Rational,
}

trait Scalar: Clone + Ord + Zero + Add<Output = Self> + Sub<Output = Self> {}
impl<T: Clone + Ord + Zero + Add<Output = T> + Sub<Output = T>> Scalar for T {}

struct Arc<T> {
    to: usize,
    cap: u64,
    cost: T,
}

struct Network<T> {
    arcs: Vec<Arc<T>>,
    adj: Vec<Vec<usize>>,
}

impl<T: Scalar> Network<T> {
    fn new(nodes: usize) -> Self {
        Network {
            arcs: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    fn add_arc(&mut self, from: usize, to: usize, cap: u64, cost: T) -> usize {
        let id = self.arcs.len();
        let neg = T::zero() - cost.clone();
        self.arcs.push(Arc { to, cap, cost });
        self.arcs.push(Arc {
            to: from,
            cap: 0,
            cost: neg,
        });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }

    /// Pushes up to `demand` units from `s` to `t` along successive shortest
    /// paths. Returns the amount actually sent.
    fn min_cost_flow(&mut self, s: usize, t: usize, demand: u64) -> u64 {
        let nodes = self.adj.len();
        let mut potential = vec![T::zero(); nodes];
        let mut sent = 0;
        while sent < demand {
            // Dense Dijkstra on reduced costs.
            let mut dist: Vec<Option<T>> = vec![None; nodes];
            let mut parent = vec![usize::MAX; nodes];
            let mut done = vec![false; nodes];
            dist[s] = Some(T::zero());
            loop {
                let mut best: Option<usize> = None;
                for v in 0..nodes {
                    if done[v] {
                        continue;
                    }
                    if let Some(d) = &dist[v] {
                        if best.is_none_or(|b| d < dist[b].as_ref().unwrap()) {
                            best = Some(v);
                        }
                    }
                }
                let Some(u) = best else { break };
                done[u] = true;
                let du = dist[u].clone().unwrap();
                for &a in &self.adj[u] {
                    let arc = &self.arcs[a];
                    if arc.cap == 0 || done[arc.to] {
                        continue;
                    }
                    let nd = du.clone() + arc.cost.clone() + potential[u].clone()
                        - potential[arc.to].clone();
                    if dist[arc.to].as_ref().is_none_or(|d| nd < *d) {
                        dist[arc.to] = Some(nd);
                        parent[arc.to] = a;
                    }
                }
            }
            if dist[t].is_none() {
                break;
            }
            let max_dist = dist.iter().flatten().max().cloned().unwrap();
            for v in 0..nodes {
                let d = dist[v].clone().unwrap_or_else(|| max_dist.clone());
                potential[v] = potential[v].clone() + d;
            }
            let mut push = demand - sent;
            let mut v = t;
            while v != s {
                let a = parent[v];
                push = push.min(self.arcs[a].cap);
                v = self.arcs[a ^ 1].to;
            }
            let mut v = t;
            while v != s {
                let a = parent[v];
                self.arcs[a].cap -= push;
                self.arcs[a ^ 1].cap += push;
                v = self.arcs[a ^ 1].to;
            }
            sent += push;
        }
        sent
    }
}

fn run_ssp<T: Scalar>(
    inst: &Instance,
    weights: &[Vec<Option<T>>],
) -> Result<FlowSolution> {
    let (n, m) = (inst.n(), inst.m());
    let total = inst.total_supply();
    let (s, t) = (0, n + m + 1);
    let mut net = Network::new(n + m + 2);
    for (i, &a) in inst.supplies.iter().enumerate() {
        net.add_arc(s, 1 + i, a, T::zero());
    }
    let mut middle = Vec::new();
    for (i, row) in weights.iter().enumerate() {
        for (j, w) in row.iter().enumerate() {
            if let Some(w) = w {
                let id = net.add_arc(1 + i, 1 + n + j, total, w.clone());
                middle.push(((i, j), id));
            }
        }
    }
    for (j, &b) in inst.demands.iter().enumerate() {
        net.add_arc(1 + n + j, t, b, T::zero());
    }
    if net.min_cost_flow(s, t, total) < total {
        return Err(Error::NoFeasibleTransportation);
    }
    Ok(FlowSolution::from_entries(middle.into_iter().map(
        |(edge, id)| (edge, from_u64(net.arcs[id ^ 1].cap)),
    )))
}

/// Minimises `Σ w_ij x_ij` over the transportation polytope of `inst`.
///
/// The returned flow is integral with forest support (at most `n + m - 1`
/// edges) and never uses an infinite-weight edge.
pub fn solve_transportation(inst: &Instance, w: &WeightMatrix) -> Result<TransportSolution> {
    let (n, m) = (inst.n(), inst.m());
    if w.w.len() != n || w.w.iter().any(|r| r.len() != m) {
        return Err(Error::InvalidArgument("weight matrix shape".into()));
    }
    let denom = common_denominator(w.w.iter().flatten().filter_map(Cost::finite));
    let scaled: Vec<Vec<Option<BigInt>>> = w
        .w
        .iter()
        .map(|row| {
            row.iter()
                .map(|c| c.finite().map(|r| (r * &denom).to_integer()))
                .collect()
        })
        .collect();
    let max_abs = scaled
        .iter()
        .flatten()
        .flatten()
        .map(|v| v.abs())
        .max()
        .unwrap_or_default();
    // Path lengths and potentials stay within a few multiples of
    // (nodes · max |w|).
    let headroom = BigInt::from(i64::MAX / 8) / BigInt::from((n + m + 2) as i64);
    let flow = if max_abs < headroom {
        let small: Vec<Vec<Option<i64>>> = scaled
            .iter()
            .map(|row| row.iter().map(|v| v.as_ref().and_then(ToPrimitive::to_i64)).collect())
            .collect();
        run_ssp(inst, &small)?
    } else {
        run_ssp(inst, &scaled)?
    };
    let flow = cancel_cycles(&flow, w);
    let value = match w.weighted_cost(&flow) {
        Cost::Finite(v) => v,
        Cost::Infinite => unreachable!("forbidden edges are not in the network"),
    };
    Ok(TransportSolution { flow, value })
}

/// Disjoint-set forest over `n + m` bipartite vertices (sinks offset by `n`).
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(size: usize) -> Self {
        UnionFind {
            parent: (0..size).collect(),
        }
    }

    pub fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    /// Returns false if `a` and `b` were already connected.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// True iff the bipartite support graph has no cycle.
pub fn is_forest(support: &[(usize, usize)], n: usize, m: usize) -> bool {
    let mut uf = UnionFind::new(n + m);
    support.iter().all(|&(i, j)| uf.union(i, n + j))
}

/// Returns the edges of the first cycle found scanning the support in
/// lexicographic order, as a closed walk starting with the closing edge
/// traversed source → sink.
fn find_cycle(x: &FlowSolution, n: usize, m: usize) -> Option<Vec<(usize, usize)>> {
    let mut uf = UnionFind::new(n + m);
    let mut adj: Vec<Vec<(usize, (usize, usize))>> = vec![Vec::new(); n + m];
    for (i, j) in x.support() {
        let (u, v) = (i, n + j);
        if uf.union(u, v) {
            adj[u].push((v, (i, j)));
            adj[v].push((u, (i, j)));
            continue;
        }
        // Forest path from the sink v back to the source u.
        let mut prev: Vec<Option<(usize, (usize, usize))>> = vec![None; n + m];
        let mut seen = vec![false; n + m];
        let mut queue = std::collections::VecDeque::from([v]);
        seen[v] = true;
        while let Some(a) = queue.pop_front() {
            if a == u {
                break;
            }
            for &(b, e) in &adj[a] {
                if !seen[b] {
                    seen[b] = true;
                    prev[b] = Some((a, e));
                    queue.push_back(b);
                }
            }
        }
        let mut path = Vec::new();
        let mut cur = u;
        while cur != v {
            let (p, e) = prev[cur].expect("connected in union-find");
            path.push(e);
            cur = p;
        }
        path.reverse();
        let mut cycle = vec![(i, j)];
        cycle.extend(path);
        return Some(cycle);
    }
    None
}

struct Rotation {
    increase: Vec<(usize, usize)>,
    decrease: Vec<(usize, usize)>,
}

impl Rotation {
    /// Per-unit change of `Σ w x`, as (change in number of infinite edges
    /// used, finite part). Compared lexicographically.
    fn unit_delta(&self, w: &WeightMatrix) -> (i64, Rational) {
        let mut inf = 0i64;
        let mut fin = Rational::zero();
        for &(i, j) in &self.increase {
            match w.get(i, j) {
                Cost::Finite(c) => fin += c,
                Cost::Infinite => inf += 1,
            }
        }
        for &(i, j) in &self.decrease {
            match w.get(i, j) {
                Cost::Finite(c) => fin -= c,
                Cost::Infinite => inf -= 1,
            }
        }
        (inf, fin)
    }

    fn step(&self, x: &FlowSolution) -> (Rational, (usize, usize)) {
        let theta = self
            .decrease
            .iter()
            .map(|&(i, j)| x.get(i, j))
            .min()
            .expect("cycles have decreasing edges");
        let first_zeroed = self
            .decrease
            .iter()
            .filter(|&&(i, j)| x.get(i, j) == theta)
            .min()
            .copied()
            .unwrap();
        (theta, first_zeroed)
    }
}

/// Rotates flow around cycles until the support is a forest.
///
/// Each rotation goes in the direction that does not increase `Σ w x`; when
/// both directions cost the same, the one that zeroes the lexicographically
/// smallest edge wins. Marginals are preserved exactly.
pub fn cancel_cycles(x: &FlowSolution, w: &WeightMatrix) -> FlowSolution {
    let n = w.w.len();
    let m = w.w.first().map_or(0, Vec::len);
    let mut x = x.clone();
    while let Some(cycle) = find_cycle(&x, n, m) {
        // Even positions are traversed source → sink.
        let (even, odd): (Vec<_>, Vec<_>) = cycle.iter().enumerate().partition(|(k, _)| k % 2 == 0);
        let even: Vec<_> = even.into_iter().map(|(_, e)| *e).collect();
        let odd: Vec<_> = odd.into_iter().map(|(_, e)| *e).collect();
        let forward = Rotation {
            increase: even.clone(),
            decrease: odd.clone(),
        };
        let backward = Rotation {
            increase: odd,
            decrease: even,
        };
        let (df, db) = (forward.unit_delta(w), backward.unit_delta(w));
        let (ff, fb) = (forward.step(&x), backward.step(&x));
        let chosen = match df.cmp(&db) {
            std::cmp::Ordering::Less => (&forward, ff.0),
            std::cmp::Ordering::Greater => (&backward, fb.0),
            std::cmp::Ordering::Equal if ff.1 <= fb.1 => (&forward, ff.0),
            std::cmp::Ordering::Equal => (&backward, fb.0),
        };
        let (rot, theta) = chosen;
        for &e in &rot.increase {
            x.add(e, &theta);
        }
        for &e in &rot.decrease {
            x.add(e, &-theta.clone());
        }
    }
    x
}
