//! Instance generators for the hardness reductions: digraph splitting,
//! directed Steiner tree, set cover and bounded 3-dimensional matching.

mod digraph;
mod dst;
mod setcover;
mod text;
mod threedm;

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::rational::Rational;

pub use digraph::{normalize_digraph, split_digraph_to_bipartite};
pub use dst::dst_to_pfct_digraph;
pub use setcover::setcover_to_fct_s;
pub use text::{
    parse_dst, parse_setcover, parse_threedm, serialize_dst, serialize_setcover,
    serialize_threedm,
};
pub use threedm::{
    canonical_sets_only, default_delta, threedm_to_pfct_u, threedm_to_pfct_u_with_delta, verify_h_independence,
    ThreeDmReduction, INDEPENDENCE_ENUMERATION_LIMIT, INDEPENDENCE_ORDER, MAX_DRAWS,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiEdge {
    pub from: usize,
    pub to: usize,
    pub cost: Rational,
}

impl DiEdge {
    pub fn new(from: usize, to: usize, cost: Rational) -> Self {
        DiEdge { from, to, cost }
    }
}

/// Flow problem on a directed graph, paying the fixed cost of every edge
/// that carries flow.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigraphInstance {
    pub vertex_count: usize,
    pub edges: Vec<DiEdge>,
    /// `(vertex, supply)`.
    pub supplies: Vec<(usize, u64)>,
    /// `(vertex, demand)`.
    pub demands: Vec<(usize, u64)>,
}

impl DigraphInstance {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        for e in &self.edges {
            if e.from >= self.vertex_count || e.to >= self.vertex_count {
                return bad(format!("edge ({}, {}) out of range", e.from, e.to));
            }
            if e.cost.is_negative() {
                return bad(format!("edge ({}, {}) has negative cost", e.from, e.to));
            }
        }
        let mut terminals: Vec<usize> = self
            .supplies
            .iter()
            .chain(&self.demands)
            .map(|&(v, _)| v)
            .collect();
        if terminals.iter().any(|&v| v >= self.vertex_count) {
            return bad("supply or demand vertex out of range".into());
        }
        if self.supplies.iter().chain(&self.demands).any(|&(_, w)| w == 0) {
            return bad("supplies and demands must be positive".into());
        }
        let count = terminals.len();
        terminals.sort_unstable();
        terminals.dedup();
        if terminals.len() != count {
            return bad("a vertex is listed twice among sources and sinks".into());
        }
        let supply: u64 = self.supplies.iter().map(|s| s.1).sum();
        let demand: u64 = self.demands.iter().map(|d| d.1).sum();
        if supply != demand {
            return bad(format!("total supply {supply} != total demand {demand}"));
        }
        Ok(())
    }

    pub fn total_supply(&self) -> u64 {
        self.supplies.iter().map(|s| s.1).sum()
    }
}

/// Directed Steiner tree: connect `root` to every terminal as cheaply as
/// possible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DstInstance {
    pub vertex_count: usize,
    pub edges: Vec<DiEdge>,
    pub root: usize,
    pub terminals: Vec<usize>,
}

impl DstInstance {
    pub fn validate(&self) -> Result<()> {
        if self.root >= self.vertex_count {
            return Err(Error::InvalidArgument("root out of range".into()));
        }
        for e in &self.edges {
            if e.from >= self.vertex_count || e.to >= self.vertex_count {
                return Err(Error::InvalidArgument(format!(
                    "edge ({}, {}) out of range",
                    e.from, e.to
                )));
            }
            if e.cost.is_negative() {
                return Err(Error::InvalidArgument("negative edge cost".into()));
            }
        }
        let mut seen = vec![false; self.vertex_count];
        for &t in &self.terminals {
            if t >= self.vertex_count || t == self.root || seen[t] {
                return Err(Error::InvalidArgument(format!("bad terminal {t}")));
            }
            seen[t] = true;
        }
        if self.terminals.is_empty() {
            return Err(Error::InvalidArgument("no terminals".into()));
        }
        let reach = self.reachable();
        if let Some(&t) = self.terminals.iter().find(|&&t| !reach[t]) {
            return Err(Error::InfeasibleDst(t));
        }
        Ok(())
    }

    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.vertex_count];
        seen[self.root] = true;
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            for e in self.edges.iter().filter(|e| e.from == v) {
                if !seen[e.to] {
                    seen[e.to] = true;
                    stack.push(e.to);
                }
            }
        }
        seen
    }
}

/// Set cover as domination in a bipartite graph: `sets` vertices on one
/// side, `elements` on the other.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetCoverInstance {
    pub sets: usize,
    pub elements: usize,
    /// `(set, element)` memberships.
    pub membership: Vec<(usize, usize)>,
}

impl SetCoverInstance {
    pub fn validate(&self) -> Result<()> {
        if self.sets == 0 || self.elements == 0 {
            return Err(Error::InvalidArgument(
                "set cover needs at least one set and one element".into(),
            ));
        }
        if let Some(&(v, u)) = self
            .membership
            .iter()
            .find(|&&(v, u)| v >= self.sets || u >= self.elements)
        {
            return Err(Error::InvalidArgument(format!(
                "membership ({v}, {u}) out of range"
            )));
        }
        for u in 0..self.elements {
            if !self.membership.iter().any(|&(_, e)| e == u) {
                return Err(Error::UncoveredElement(u));
            }
        }
        Ok(())
    }

    pub fn members(&self, set: usize) -> impl Iterator<Item = usize> + '_ {
        self.membership
            .iter()
            .filter(move |&&(v, _)| v == set)
            .map(|&(_, u)| u)
    }
}

/// Three disjoint ground sets of `size` elements each, and triples over
/// them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThreeDmInstance {
    pub size: usize,
    pub triples: Vec<[usize; 3]>,
}

impl ThreeDmInstance {
    pub fn validate(&self) -> Result<()> {
        if self.size == 0 {
            return Err(Error::InvalidArgument("empty ground sets".into()));
        }
        if let Some(t) = self.triples.iter().find(|t| t.iter().any(|&v| v >= self.size)) {
            return Err(Error::InvalidArgument(format!("triple {t:?} out of range")));
        }
        Ok(())
    }

    /// Number of triples containing each element, in `X ∪ Y ∪ Z` order.
    pub fn frequencies(&self) -> Vec<usize> {
        let mut freq = vec![0; 3 * self.size];
        for t in &self.triples {
            for (axis, &v) in t.iter().enumerate() {
                freq[axis * self.size + v] += 1;
            }
        }
        freq
    }
}
