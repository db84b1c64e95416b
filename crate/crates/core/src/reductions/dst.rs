use num_traits::Zero;

use super::{DiEdge, DigraphInstance, DstInstance};
use crate::error::Result;
use crate::rational::Rational;

/// Root becomes the only source with supply `k = |T|`, every terminal a
/// sink of demand one.
///
/// A terminal with other than exactly one incoming edge, or with outgoing
/// edges, is replaced by a fresh pendant copy behind a zero-cost edge.
pub fn dst_to_pfct_digraph(dst: &DstInstance) -> Result<DigraphInstance> {
    dst.validate()?;
    let mut vertex_count = dst.vertex_count;
    let mut edges = dst.edges.clone();
    let mut sinks = Vec::with_capacity(dst.terminals.len());
    for &t in &dst.terminals {
        let incoming = dst.edges.iter().filter(|e| e.to == t).count();
        let outgoing = dst.edges.iter().any(|e| e.from == t);
        if incoming == 1 && !outgoing {
            sinks.push((t, 1));
        } else {
            let copy = vertex_count;
            vertex_count += 1;
            edges.push(DiEdge::new(t, copy, Rational::zero()));
            sinks.push((copy, 1));
        }
    }
    Ok(DigraphInstance {
        vertex_count,
        edges,
        supplies: vec![(dst.root, dst.terminals.len() as u64)],
        demands: sinks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::rational::int;

    #[test]
    fn star_maps_directly() {
        let dst = DstInstance {
            vertex_count: 3,
            edges: vec![DiEdge::new(0, 1, int(1)), DiEdge::new(0, 2, int(1))],
            root: 0,
            terminals: vec![1, 2],
        };
        let dg = dst_to_pfct_digraph(&dst).unwrap();
        assert_eq!(dg.supplies, vec![(0, 2)]);
        assert_eq!(dg.demands, vec![(1, 1), (2, 1)]);
        assert_eq!(dg.vertex_count, 3);
    }

    #[test]
    fn terminal_with_two_in_edges_gets_pendant_copy() {
        let dst = DstInstance {
            vertex_count: 3,
            edges: vec![DiEdge::new(0, 1, int(1)), DiEdge::new(0, 2, int(1)), DiEdge::new(1, 2, int(1))],
            root: 0,
            terminals: vec![2],
        };
        let dg = dst_to_pfct_digraph(&dst).unwrap();
        assert_eq!(dg.vertex_count, 4);
        assert_eq!(dg.demands, vec![(3, 1)]);
        assert!(dg.edges.contains(&DiEdge::new(2, 3, int(0))));
    }

    #[test]
    fn unreachable_terminal() {
        let dst = DstInstance {
            vertex_count: 3,
            edges: vec![DiEdge::new(0, 1, int(1))],
            root: 0,
            terminals: vec![2],
        };
        assert_eq!(dst_to_pfct_digraph(&dst), Err(Error::InfeasibleDst(2)));
    }
}
