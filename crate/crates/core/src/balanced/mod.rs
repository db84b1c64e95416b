//! PFCT-U through balanced partitions.
//!
//! With no linear costs and unit fixed costs, a forest solution with `q`
//! components costs `n + m - q`, and each component is a balanced set
//! (supply equals demand). Maximising the number of parts is a set packing
//! problem over small balanced sets: matched pairs `a_i == b_j` are taken
//! first, then for each size bound `k` the balanced sets of size `3..=k` are
//! packed and the leftover elements form one more balanced part.

mod certificate;
mod packing;

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::model::{classify_variant, FlowSolution, Instance};
use crate::rational::from_u64;

pub use certificate::{
    verify_factor_revealing_certificate, Constraint, DualSolution, LpCertificate, PrimalSolution,
};
pub use packing::{exact_packing, local_search_packing, EXACT_PACKING_MAX_FAMILY, EXACT_PACKING_MAX_GROUND};

/// Largest `Σ C(N, s)` the balanced-set enumeration will visit.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Source,
    Sink,
}

/// A source or sink together with its supply or demand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element {
    pub side: Side,
    pub index: usize,
    pub weight: u64,
}

impl Element {
    pub fn source(index: usize, weight: u64) -> Self {
        Element {
            side: Side::Source,
            index,
            weight,
        }
    }

    pub fn sink(index: usize, weight: u64) -> Self {
        Element {
            side: Side::Sink,
            index,
            weight,
        }
    }

    fn signed(&self) -> i128 {
        match self.side {
            Side::Source => self.weight as i128,
            Side::Sink => -(self.weight as i128),
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.side {
            Side::Source => 's',
            Side::Sink => 't',
        };
        write!(f, "{tag}{}", self.index + 1)
    }
}

/// All sources and sinks of an instance, sources first.
pub fn elements(inst: &Instance) -> Vec<Element> {
    let sources = inst
        .supplies
        .iter()
        .enumerate()
        .map(|(i, &a)| Element::source(i, a));
    let sinks = inst
        .demands
        .iter()
        .enumerate()
        .map(|(j, &b)| Element::sink(j, b));
    sources.chain(sinks).collect()
}

/// A nonempty set of elements whose supply equals its demand.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BalancedSet {
    elements: Vec<Element>,
}

impl BalancedSet {
    pub fn new(mut elements: Vec<Element>) -> Result<Self> {
        elements.sort();
        elements.dedup();
        if elements.is_empty() {
            return Err(Error::InvalidArgument("balanced set is empty".into()));
        }
        if elements.iter().map(Element::signed).sum::<i128>() != 0 {
            return Err(Error::InvalidArgument(format!(
                "set {{{}}} is not balanced",
                elements.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
            )));
        }
        Ok(BalancedSet { elements })
    }

    /// Sorted: sources by index, then sinks by index.
    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn sources(&self) -> impl Iterator<Item = &Element> {
        self.elements.iter().filter(|e| e.side == Side::Source)
    }

    pub fn sinks(&self) -> impl Iterator<Item = &Element> {
        self.elements.iter().filter(|e| e.side == Side::Sink)
    }

    pub fn contains(&self, e: &Element) -> bool {
        self.elements.binary_search(e).is_ok()
    }
}

impl PartialOrd for BalancedSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical order: size first, then lexicographic element list.
impl Ord for BalancedSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.elements.cmp(&other.elements))
    }
}

impl fmt::Display for BalancedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.elements.iter().map(|e| e.to_string()).collect();
        write!(f, "{{{}}}", names.join(","))
    }
}

/// Disjoint balanced sets covering every source and sink.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalancedPartition {
    pub parts: Vec<BalancedSet>,
}

impl BalancedPartition {
    /// Cost of the corresponding forest solution, `n + m - #parts`.
    pub fn cost(&self) -> usize {
        let total: usize = self.parts.iter().map(BalancedSet::len).sum();
        total - self.parts.len()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Checks disjointness, coverage of `inst`, and element weights.
    pub fn validate(&self, inst: &Instance) -> Result<()> {
        let mut seen: Vec<Element> = self.parts.iter().flat_map(|p| p.elements.clone()).collect();
        seen.sort();
        if seen != elements(inst) {
            return Err(Error::InvalidArgument(
                "parts are not a disjoint cover of the instance".into(),
            ));
        }
        Ok(())
    }

    fn sort(&mut self) {
        self.parts.sort();
    }
}

/// Outcome of matched-pair extraction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairPreprocessing {
    pub pairs: Vec<BalancedSet>,
    /// Elements left over, sources first; no source weight equals a sink
    /// weight among them.
    pub residual: Vec<Element>,
}

fn require_pfct_u(inst: &Instance) -> Result<()> {
    let tag = classify_variant(inst);
    if tag.pure && tag.uniform {
        Ok(())
    } else {
        Err(Error::WrongVariant("PFCT-U"))
    }
}

/// Repeatedly pairs a source and a sink of equal weight, smallest weight
/// first and then smallest indices.
pub fn preprocess_matched_pairs(inst: &Instance) -> Result<PairPreprocessing> {
    require_pfct_u(inst)?;
    let mut sources: Vec<Option<Element>> = elements(inst)
        .into_iter()
        .filter(|e| e.side == Side::Source)
        .map(Some)
        .collect();
    let mut sinks: Vec<Option<Element>> = elements(inst)
        .into_iter()
        .filter(|e| e.side == Side::Sink)
        .map(Some)
        .collect();
    let mut weights: Vec<u64> = inst.supplies.clone();
    weights.sort_unstable();
    weights.dedup();

    let mut pairs = Vec::new();
    for w in weights {
        loop {
            let s = sources.iter().position(|e| e.is_some_and(|e| e.weight == w));
            let t = sinks.iter().position(|e| e.is_some_and(|e| e.weight == w));
            match (s, t) {
                (Some(s), Some(t)) => {
                    let pair = vec![sources[s].take().unwrap(), sinks[t].take().unwrap()];
                    pairs.push(BalancedSet::new(pair)?);
                }
                _ => break,
            }
        }
    }
    let residual = sources.into_iter().chain(sinks).flatten().collect();
    Ok(PairPreprocessing { pairs, residual })
}

/// A `k`-set packing instance over balanced sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PackingInstance {
    pub ground: Vec<Element>,
    /// Canonically ordered.
    pub family: Vec<BalancedSet>,
    pub k: usize,
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// All balanced subsets of `ground` with size in `3..=k`.
///
/// `ground` should be pair-free (see [`preprocess_matched_pairs`]); sets of
/// size two are never produced.
pub fn enumerate_balanced_sets(ground: &[Element], k: usize) -> Result<PackingInstance> {
    if !(3..=6).contains(&k) {
        return Err(Error::InvalidArgument(format!("k = {k} outside 3..=6")));
    }
    let mut ground = ground.to_vec();
    ground.sort();
    let size = ground.len() as u128;
    let work: u128 = (3..=k as u128).map(|s| binomial(size, s)).sum();
    if work > ENUMERATION_LIMIT {
        return Err(Error::TooLarge("enumeration"));
    }

    fn walk(
        ground: &[Element],
        start: usize,
        k: usize,
        sum: i128,
        current: &mut Vec<Element>,
        out: &mut Vec<BalancedSet>,
    ) {
        if current.len() >= 3 && sum == 0 {
            out.push(BalancedSet {
                elements: current.clone(),
            });
        }
        if current.len() == k {
            return;
        }
        for idx in start..ground.len() {
            let e = ground[idx];
            current.push(e);
            walk(ground, idx + 1, k, sum + e.signed(), current, out);
            current.pop();
        }
    }

    let mut family = Vec::new();
    walk(&ground, 0, k, 0, &mut Vec::new(), &mut family);
    family.sort();
    Ok(PackingInstance { ground, family, k })
}

/// How to solve the packing step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PackingMode {
    Exact,
    LocalSearch { swap: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PfctuSolution {
    pub partition: BalancedPartition,
    pub flow: FlowSolution,
    /// Size bound whose packing produced the returned partition.
    pub k: usize,
    pub cost: usize,
}

/// Options for [`solve_pfct_u`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PfctuOptions {
    pub mode: PackingMode,
    /// Largest set size considered; 5 by default, at most 6.
    pub max_k: usize,
}

impl Default for PfctuOptions {
    fn default() -> Self {
        PfctuOptions {
            mode: PackingMode::Exact,
            max_k: 5,
        }
    }
}

/// Splits a balanced set wherever the two-pointer fill empties a source and
/// a sink at the same time before the end.
pub fn split_at_balanced_prefixes(part: &BalancedSet) -> Vec<BalancedSet> {
    let sources: Vec<Element> = part.sources().copied().collect();
    let sinks: Vec<Element> = part.sinks().copied().collect();
    let mut out = Vec::new();
    let mut current = Vec::new();
    let (mut s, mut t) = (0, 0);
    let (mut ra, mut rb) = (
        sources.first().map_or(0, |e| e.weight),
        sinks.first().map_or(0, |e| e.weight),
    );
    while s < sources.len() && t < sinks.len() {
        let push_s = current.last() != Some(&sources[s]) && !current.contains(&sources[s]);
        if push_s {
            current.push(sources[s]);
        }
        if !current.contains(&sinks[t]) {
            current.push(sinks[t]);
        }
        let x = ra.min(rb);
        ra -= x;
        rb -= x;
        let source_done = ra == 0;
        let sink_done = rb == 0;
        if source_done {
            s += 1;
            ra = sources.get(s).map_or(0, |e| e.weight);
        }
        if sink_done {
            t += 1;
            rb = sinks.get(t).map_or(0, |e| e.weight);
        }
        if source_done && sink_done {
            out.push(BalancedSet::new(std::mem::take(&mut current)).expect("balanced prefix"));
        }
    }
    out
}

/// Routes supply to demand inside each part with a two-pointer fill.
///
/// A part with no proper balanced prefix contributes exactly `|part| - 1`
/// edges; refine with [`split_at_balanced_prefixes`] first to get that for
/// every part.
pub fn flow_within_balanced_sets(partition: &BalancedPartition) -> FlowSolution {
    let mut x = FlowSolution::new();
    for part in &partition.parts {
        let sources: Vec<Element> = part.sources().copied().collect();
        let sinks: Vec<Element> = part.sinks().copied().collect();
        let (mut s, mut t) = (0, 0);
        let mut ra = sources.first().map_or(0, |e| e.weight);
        let mut rb = sinks.first().map_or(0, |e| e.weight);
        while s < sources.len() && t < sinks.len() {
            let v = ra.min(rb);
            x.add((sources[s].index, sinks[t].index), &from_u64(v));
            ra -= v;
            rb -= v;
            if ra == 0 {
                s += 1;
                ra = sources.get(s).map_or(0, |e| e.weight);
            }
            if rb == 0 {
                t += 1;
                rb = sinks.get(t).map_or(0, |e| e.weight);
            }
        }
    }
    x
}

/// Pairs, then packing for each `k` in `3..=max_k`, keeping the partition
/// with the most parts (smallest `k` on ties).
pub fn solve_pfct_u(inst: &Instance, options: PfctuOptions) -> Result<PfctuSolution> {
    if !(3..=6).contains(&options.max_k) {
        return Err(Error::InvalidArgument(format!(
            "max_k = {} outside 3..=6",
            options.max_k
        )));
    }
    let pre = preprocess_matched_pairs(inst)?;
    let mut best: Option<(BalancedPartition, usize)> = None;
    for k in 3..=options.max_k {
        let pk = enumerate_balanced_sets(&pre.residual, k)?;
        let packed = match options.mode {
            PackingMode::Exact => exact_packing(&pk)?,
            PackingMode::LocalSearch { swap } => local_search_packing(&pk, swap),
        };
        let mut parts = pre.pairs.clone();
        let covered: Vec<Element> = packed.iter().flat_map(|p| p.elements.clone()).collect();
        let remainder: Vec<Element> = pre
            .residual
            .iter()
            .filter(|e| !covered.contains(e))
            .copied()
            .collect();
        parts.extend(packed);
        if !remainder.is_empty() {
            parts.push(BalancedSet::new(remainder)?);
        }
        let mut partition = BalancedPartition {
            parts: parts.iter().flat_map(split_at_balanced_prefixes).collect(),
        };
        partition.sort();
        if best.as_ref().is_none_or(|(b, _)| partition.len() > b.len()) {
            best = Some((partition, k));
        }
    }
    let (partition, k) = best.expect("at least one k");
    partition.validate(inst)?;
    let flow = flow_within_balanced_sets(&partition);
    let cost = partition.cost();
    Ok(PfctuSolution {
        partition,
        flow,
        k,
        cost,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::evaluate_cost;
    use crate::rational::int;

    fn set(elems: &[Element]) -> BalancedSet {
        BalancedSet::new(elems.to_vec()).unwrap()
    }

    #[test]
    fn pair_extraction() {
        let inst = Instance::pure_uniform(vec![3, 5], vec![1, 2, 5]).unwrap();
        let pre = preprocess_matched_pairs(&inst).unwrap();
        assert_eq!(pre.pairs, vec![set(&[Element::source(1, 5), Element::sink(2, 5)])]);
        assert_eq!(
            pre.residual,
            vec![Element::source(0, 3), Element::sink(0, 1), Element::sink(1, 2)]
        );

        let inst = Instance::pure_uniform(vec![2], vec![2]).unwrap();
        let pre = preprocess_matched_pairs(&inst).unwrap();
        assert_eq!(pre.pairs.len(), 1);
        assert!(pre.residual.is_empty());

        let inst = Instance::pure_uniform(vec![3], vec![1, 2]).unwrap();
        let pre = preprocess_matched_pairs(&inst).unwrap();
        assert!(pre.pairs.is_empty());
        assert_eq!(pre.residual.len(), 3);
    }

    #[test]
    fn pair_extraction_order() {
        let inst = Instance::pure_uniform(vec![4, 2, 2], vec![2, 4, 2]).unwrap();
        let pre = preprocess_matched_pairs(&inst).unwrap();
        let expect = vec![
            set(&[Element::source(1, 2), Element::sink(0, 2)]),
            set(&[Element::source(2, 2), Element::sink(2, 2)]),
            set(&[Element::source(0, 4), Element::sink(1, 4)]),
        ];
        assert_eq!(pre.pairs, expect);
    }

    #[test]
    fn pair_extraction_requires_pfct_u() {
        let inst =
            Instance::pure_sink_independent(vec![1], vec![1], vec![int(2)]).unwrap();
        assert_eq!(
            preprocess_matched_pairs(&inst),
            Err(Error::WrongVariant("PFCT-U"))
        );
    }

    #[test]
    fn enumeration_examples() {
        let g = [Element::source(0, 3), Element::sink(0, 1), Element::sink(1, 2)];
        let pk = enumerate_balanced_sets(&g, 3).unwrap();
        assert_eq!(pk.family, vec![set(&g)]);

        let g = [
            Element::source(0, 2),
            Element::source(1, 2),
            Element::sink(0, 1),
            Element::sink(1, 3),
        ];
        assert!(enumerate_balanced_sets(&g, 3).unwrap().family.is_empty());
        assert_eq!(enumerate_balanced_sets(&g, 4).unwrap().family, vec![set(&g)]);
    }

    #[test]
    fn enumeration_guard() {
        let g: Vec<Element> = (0..400).map(|i| Element::source(i, 1)).collect();
        assert_eq!(
            enumerate_balanced_sets(&g, 3),
            Err(Error::TooLarge("enumeration"))
        );
    }

    #[test]
    fn flows_inside_parts() {
        let part = set(&[Element::source(0, 3), Element::sink(0, 1), Element::sink(1, 2)]);
        let x = flow_within_balanced_sets(&BalancedPartition { parts: vec![part] });
        assert_eq!(x, FlowSolution::from_entries([((0, 0), int(1)), ((0, 1), int(2))]));

        let part = set(&[
            Element::source(0, 2),
            Element::source(1, 2),
            Element::sink(0, 1),
            Element::sink(1, 3),
        ]);
        let x = flow_within_balanced_sets(&BalancedPartition { parts: vec![part] });
        assert_eq!(
            x,
            FlowSolution::from_entries([((0, 0), int(1)), ((0, 1), int(1)), ((1, 1), int(2))])
        );

        let pair = set(&[Element::source(4, 7), Element::sink(2, 7)]);
        let x = flow_within_balanced_sets(&BalancedPartition { parts: vec![pair] });
        assert_eq!(x.support(), vec![(4, 2)]);
    }

    #[test]
    fn splitting_balanced_prefixes() {
        let part = set(&[
            Element::source(0, 2),
            Element::source(1, 3),
            Element::sink(0, 2),
            Element::sink(1, 1),
            Element::sink(2, 2),
        ]);
        let pieces = split_at_balanced_prefixes(&part);
        assert_eq!(
            pieces,
            vec![
                set(&[Element::source(0, 2), Element::sink(0, 2)]),
                set(&[Element::source(1, 3), Element::sink(1, 1), Element::sink(2, 2)]),
            ]
        );
        let whole = set(&[Element::source(0, 3), Element::sink(0, 1), Element::sink(1, 2)]);
        assert_eq!(split_at_balanced_prefixes(&whole), vec![whole.clone()]);
    }

    #[test]
    fn solve_examples() {
        let inst = Instance::pure_uniform(vec![3, 5], vec![1, 2, 5]).unwrap();
        let sol = solve_pfct_u(&inst, PfctuOptions::default()).unwrap();
        assert_eq!(sol.cost, 3);
        assert_eq!(
            sol.partition.parts,
            vec![
                set(&[Element::source(1, 5), Element::sink(2, 5)]),
                set(&[Element::source(0, 3), Element::sink(0, 1), Element::sink(1, 2)]),
            ]
        );
        assert_eq!(evaluate_cost(&inst, &sol.flow).unwrap(), int(3));
        assert_eq!(sol.flow.check_marginals(&inst), Ok(()));

        let inst = Instance::pure_uniform(vec![2], vec![2]).unwrap();
        let sol = solve_pfct_u(&inst, PfctuOptions::default()).unwrap();
        assert_eq!(sol.cost, 1);

        let inst = Instance::pure_uniform(vec![7], vec![1, 2, 4]).unwrap();
        let sol = solve_pfct_u(&inst, PfctuOptions::default()).unwrap();
        assert_eq!(sol.partition.len(), 1);
        assert_eq!(sol.cost, 3);
    }

    #[test]
    fn local_search_mode_is_feasible() {
        let inst = Instance::pure_uniform(vec![3, 4, 6], vec![1, 2, 2, 2, 5, 1]).unwrap();
        let options = PfctuOptions {
            mode: PackingMode::LocalSearch { swap: 2 },
            max_k: 5,
        };
        let sol = solve_pfct_u(&inst, options).unwrap();
        assert_eq!(sol.flow.check_marginals(&inst), Ok(()));
        assert_eq!(
            evaluate_cost(&inst, &sol.flow).unwrap(),
            int(sol.cost as i64)
        );
        assert_eq!(sol.flow.support_len() + sol.partition.len(), inst.n() + inst.m());
    }
}
