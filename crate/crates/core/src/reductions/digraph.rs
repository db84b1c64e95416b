use num_traits::Zero;

use super::{DiEdge, DigraphInstance};
use crate::error::{Error, Result};
use crate::model::Instance;
use crate::rational::{Cost, Rational};

/// Gives every source with incoming edges a fresh pendant source, and every
/// sink with outgoing edges a fresh pendant sink, joined by zero-cost edges.
pub fn normalize_digraph(dg: &DigraphInstance) -> Result<DigraphInstance> {
    dg.validate()?;
    let mut out = dg.clone();
    for k in 0..out.supplies.len() {
        let (v, a) = out.supplies[k];
        if out.edges.iter().any(|e| e.to == v) {
            let fresh = out.vertex_count;
            out.vertex_count += 1;
            out.edges.push(DiEdge::new(fresh, v, Rational::zero()));
            out.supplies[k] = (fresh, a);
        }
    }
    for k in 0..out.demands.len() {
        let (v, b) = out.demands[k];
        if out.edges.iter().any(|e| e.from == v) {
            let fresh = out.vertex_count;
            out.vertex_count += 1;
            out.edges.push(DiEdge::new(v, fresh, Rational::zero()));
            out.demands[k] = (fresh, b);
        }
    }
    Ok(out)
}

/// Splits every internal vertex `v` into a source `v_out` and a sink `v_in`
/// of supply and demand `D = Σ a`, joined by a free edge.
///
/// Sources are the digraph sources (in listed order) followed by `v_out`
/// for internal vertices by increasing id; sinks likewise. Pairs that are
/// not digraph edges get `f = 0, c = inf`; parallel edges keep the cheapest
/// cost and self-loops are dropped.
pub fn split_digraph_to_bipartite(dg: &DigraphInstance) -> Result<Instance> {
    let dg = normalize_digraph(dg)?;
    let d = dg.total_supply();
    let mut role = vec![None; dg.vertex_count];
    for &(v, _) in &dg.supplies {
        role[v] = Some(true);
    }
    for &(v, _) in &dg.demands {
        role[v] = Some(false);
    }
    let internal: Vec<usize> = (0..dg.vertex_count).filter(|&v| role[v].is_none()).collect();

    let mut row_of = vec![None; dg.vertex_count];
    let mut col_of = vec![None; dg.vertex_count];
    let mut supplies = Vec::new();
    let mut demands = Vec::new();
    for &(v, a) in &dg.supplies {
        row_of[v] = Some(supplies.len());
        supplies.push(a);
    }
    for &v in &internal {
        row_of[v] = Some(supplies.len());
        supplies.push(d);
    }
    for &(v, b) in &dg.demands {
        col_of[v] = Some(demands.len());
        demands.push(b);
    }
    for &v in &internal {
        col_of[v] = Some(demands.len());
        demands.push(d);
    }

    let (n, m) = (supplies.len(), demands.len());
    let mut fixed = vec![vec![Rational::zero(); m]; n];
    let mut linear = vec![vec![Cost::Infinite; m]; n];
    for &v in &internal {
        let (i, j) = (row_of[v].unwrap(), col_of[v].unwrap());
        linear[i][j] = Cost::zero();
    }
    for e in dg.edges.iter().filter(|e| e.from != e.to) {
        let (Some(i), Some(j)) = (row_of[e.from], col_of[e.to]) else {
            return Err(Error::InvalidArgument(format!(
                "edge ({}, {}) leaves a sink or enters a source",
                e.from, e.to
            )));
        };
        if linear[i][j].is_infinite() || e.cost < fixed[i][j] {
            fixed[i][j] = e.cost.clone();
        }
        linear[i][j] = Cost::zero();
    }
    Instance::new(supplies, demands, fixed, linear)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::classify_variant;
    use crate::rational::int;

    #[test]
    fn path_through_one_internal_vertex() {
        let dg = DigraphInstance {
            vertex_count: 3,
            edges: vec![DiEdge::new(0, 1, int(2)), DiEdge::new(1, 2, int(3))],
            supplies: vec![(0, 1)],
            demands: vec![(2, 1)],
        };
        let inst = split_digraph_to_bipartite(&dg).unwrap();
        assert_eq!(inst.supplies, vec![1, 1]);
        assert_eq!(inst.demands, vec![1, 1]);
        assert_eq!(inst.fixed[0][1], int(2));
        assert_eq!(inst.fixed[1][0], int(3));
        assert!(inst.linear[0][0].is_infinite());
        assert!(inst.linear[1][1].is_zero());
        let tag = classify_variant(&inst);
        assert!(tag.pure_modulo_forbidden && !tag.pure);
    }

    #[test]
    fn already_bipartite_is_identity_up_to_forbidden_edges() {
        let dg = DigraphInstance {
            vertex_count: 3,
            edges: vec![DiEdge::new(0, 1, int(4)), DiEdge::new(0, 2, int(5))],
            supplies: vec![(0, 3)],
            demands: vec![(1, 1), (2, 2)],
        };
        let inst = split_digraph_to_bipartite(&dg).unwrap();
        assert_eq!(inst.n(), 1);
        assert_eq!(inst.m(), 2);
        assert_eq!(inst.fixed, vec![vec![int(4), int(5)]]);
        assert!(classify_variant(&inst).pure);
    }

    #[test]
    fn normalization_adds_pendants() {
        let dg = DigraphInstance {
            vertex_count: 3,
            edges: vec![DiEdge::new(0, 1, int(1)), DiEdge::new(1, 0, int(1)), DiEdge::new(1, 2, int(1))],
            supplies: vec![(0, 2)],
            demands: vec![(1, 1), (2, 1)],
        };
        let norm = normalize_digraph(&dg).unwrap();
        assert_eq!(norm.vertex_count, 5);
        assert_eq!(norm.supplies, vec![(3, 2)]);
        assert_eq!(norm.demands, vec![(4, 1), (2, 1)]);
    }

    #[test]
    fn source_that_is_also_sink_is_rejected() {
        let dg = DigraphInstance {
            vertex_count: 2,
            edges: vec![DiEdge::new(0, 1, int(1))],
            supplies: vec![(0, 1)],
            demands: vec![(0, 1)],
        };
        assert!(split_digraph_to_bipartite(&dg).is_err());
    }
}
