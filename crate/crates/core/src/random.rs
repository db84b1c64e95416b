//! Seeded instance generators. The same family, shape and seed always give
//! the same instance.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::Instance;
use crate::rational::{int, ratio, Cost, Rational};
use crate::reductions::{DiEdge, DstInstance, SetCoverInstance, ThreeDmInstance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    /// Pure, sink-independent: supplies up to 12, `f_i` up to 20.
    PfctS,
    /// Pure, uniform: supplies up to 6.
    PfctU,
    /// Uniform fixed costs with linear costs up to 5 in halves.
    FctU,
    /// General: `f` up to 20, `c` up to 5 in halves.
    Fct,
    /// Pure with arbitrary fixed costs `1..=20`.
    Pfct,
}

impl Family {
    pub const ALL: [Family; 5] = [Family::PfctS, Family::PfctU, Family::FctU, Family::Fct, Family::Pfct];

    pub fn name(self) -> &'static str {
        match self {
            Family::PfctS => "pfct-s",
            Family::PfctU => "pfct-u",
            Family::FctU => "fct-u",
            Family::Fct => "fct",
            Family::Pfct => "pfct",
        }
    }

    pub fn instance(self, n: usize, m: usize, seed: u64) -> Instance {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let max_supply = match self {
            Family::PfctU => 6,
            Family::FctU => 8,
            _ => 12,
        };
        let (supplies, demands) = marginals(&mut rng, n, m, max_supply);
        let half = |rng: &mut ChaCha8Rng| ratio(rng.random_range(0..=10), 2);
        let (fixed, linear): (Vec<Vec<Rational>>, Vec<Vec<Cost>>) = match self {
            Family::PfctS => {
                let f: Vec<Rational> = (0..n).map(|_| int(rng.random_range(0..=20))).collect();
                (f.iter().map(|fi| vec![fi.clone(); m]).collect(), zeros(n, m))
            }
            Family::PfctU => (vec![vec![int(1); m]; n], zeros(n, m)),
            Family::FctU => (
                vec![vec![int(1); m]; n],
                (0..n)
                    .map(|_| (0..m).map(|_| Cost::Finite(half(&mut rng))).collect())
                    .collect(),
            ),
            Family::Fct => {
                let f = (0..n)
                    .map(|_| (0..m).map(|_| int(rng.random_range(0..=20))).collect())
                    .collect();
                let c = (0..n)
                    .map(|_| (0..m).map(|_| Cost::Finite(half(&mut rng))).collect())
                    .collect();
                (f, c)
            }
            Family::Pfct => (
                (0..n)
                    .map(|_| (0..m).map(|_| int(rng.random_range(1..=20))).collect())
                    .collect(),
                zeros(n, m),
            ),
        };
        Instance::new(supplies, demands, fixed, linear).expect("generated instance is valid")
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown family '{s}'")))
    }
}

fn zeros(n: usize, m: usize) -> Vec<Vec<Cost>> {
    vec![vec![Cost::zero(); m]; n]
}

/// Splits `total` into `parts` positive integers.
fn composition(rng: &mut ChaCha8Rng, total: u64, parts: usize) -> Vec<u64> {
    let mut cuts: Vec<u64> = sample(rng, total as usize - 1, parts - 1)
        .into_iter()
        .map(|c| c as u64 + 1)
        .collect();
    cuts.sort_unstable();
    cuts.push(total);
    let mut prev = 0;
    cuts.into_iter()
        .map(|c| {
            let part = c - prev;
            prev = c;
            part
        })
        .collect()
}

/// Supplies drawn from `1..=max_supply` (raised if needed so every sink
/// gets a positive demand), demands a random composition of the total.
pub fn marginals(rng: &mut ChaCha8Rng, n: usize, m: usize, max_supply: u64) -> (Vec<u64>, Vec<u64>) {
    let mut supplies: Vec<u64> = (0..n).map(|_| rng.random_range(1..=max_supply)).collect();
    let mut total: u64 = supplies.iter().sum();
    let mut i = 0;
    while total < m as u64 {
        supplies[i % n] += 1;
        total += 1;
        i += 1;
    }
    let demands = composition(rng, total, m);
    (supplies, demands)
}

/// Random digraph rooted at vertex 0 with costs `1..=5`. A spanning
/// arborescence is laid down first, so every terminal is reachable.
pub fn random_dst(vertex_count: usize, seed: u64) -> DstInstance {
    assert!(vertex_count >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for v in 1..vertex_count {
        let parent = rng.random_range(0..v);
        edges.push(DiEdge::new(parent, v, int(rng.random_range(1..=5))));
    }
    for from in 0..vertex_count {
        for to in 1..vertex_count {
            if from != to && rng.random_bool(0.2) && !edges.iter().any(|e| e.from == from && e.to == to) {
                edges.push(DiEdge::new(from, to, int(rng.random_range(1..=5))));
            }
        }
    }
    let count = rng.random_range(1..vertex_count);
    let mut terminals: Vec<usize> = sample(&mut rng, vertex_count - 1, count).into_iter().map(|t| t + 1).collect();
    terminals.sort_unstable();
    DstInstance {
        vertex_count,
        edges,
        root: 0,
        terminals,
    }
}

/// Random set system where every element lies in at least one set.
pub fn random_setcover(sets: usize, elements: usize, seed: u64) -> SetCoverInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut membership = Vec::new();
    for u in 0..elements {
        let mut covered = false;
        for v in 0..sets {
            if rng.random_bool(0.4) {
                membership.push((v, u));
                covered = true;
            }
        }
        if !covered {
            membership.push((rng.random_range(0..sets), u));
        }
    }
    membership.sort_unstable();
    SetCoverInstance {
        sets,
        elements,
        membership,
    }
}

/// A hidden perfect matching plus `extra` random triples, shuffled.
pub fn random_threedm_matching(size: usize, extra: usize, seed: u64) -> ThreeDmInstance {
    use rand::seq::SliceRandom;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ys: Vec<usize> = (0..size).collect();
    let mut zs: Vec<usize> = (0..size).collect();
    ys.shuffle(&mut rng);
    zs.shuffle(&mut rng);
    let mut triples: Vec<[usize; 3]> = (0..size).map(|x| [x, ys[x], zs[x]]).collect();
    while triples.len() < size + extra {
        let t = [rng.random_range(0..size), rng.random_range(0..size), rng.random_range(0..size)];
        if !triples.contains(&t) {
            triples.push(t);
        }
    }
    triples.shuffle(&mut rng);
    ThreeDmInstance { size, triples }
}
