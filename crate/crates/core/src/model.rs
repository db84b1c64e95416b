//! Instances, flow solutions, validation, variant classification and cost
//! evaluation.
//!
//! Sources are indexed `0..n` and sinks `0..m` internally; every user-facing
//! message and file format uses 1-based indices.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{from_u64, Cost, Rational};

/// Largest supply or demand accepted by validation.
pub const MAX_MARGINAL: u64 = 1 << 31;

/// A bipartite fixed charge transportation instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub supplies: Vec<u64>,
    pub demands: Vec<u64>,
    /// `n × m`, always finite.
    pub fixed: Vec<Vec<Rational>>,
    /// `n × m`; `Cost::Infinite` forbids the edge.
    pub linear: Vec<Vec<Cost>>,
}

/// First violated instance invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoSources,
    NoSinks,
    SupplyNotPositive(usize),
    DemandNotPositive(usize),
    SupplyTooLarge(usize),
    DemandTooLarge(usize),
    Imbalanced,
    FixedShape,
    LinearShape,
    NegativeFixed(usize, usize),
    NegativeLinear(usize, usize),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoSources => f.write_str("no sources"),
            Violation::NoSinks => f.write_str("no sinks"),
            Violation::SupplyNotPositive(i) => write!(f, "a_{} not positive", i + 1),
            Violation::DemandNotPositive(j) => write!(f, "b_{} not positive", j + 1),
            Violation::SupplyTooLarge(i) => write!(f, "a_{} exceeds 2^31", i + 1),
            Violation::DemandTooLarge(j) => write!(f, "b_{} exceeds 2^31", j + 1),
            Violation::Imbalanced => f.write_str("sum(a) != sum(b)"),
            Violation::FixedShape => f.write_str("fixed cost matrix is not n x m"),
            Violation::LinearShape => f.write_str("linear cost matrix is not n x m"),
            Violation::NegativeFixed(i, j) => write!(f, "f_{},{} negative", i + 1, j + 1),
            Violation::NegativeLinear(i, j) => write!(f, "c_{},{} negative", i + 1, j + 1),
        }
    }
}

/// Which restricted variant an instance belongs to.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct VariantTag {
    /// All linear costs are zero.
    pub pure: bool,
    /// All linear costs are zero or infinite (forbidden edges only).
    pub pure_modulo_forbidden: bool,
    /// `f_ij` is constant along each row.
    pub sink_independent: bool,
    /// All fixed costs equal one.
    pub uniform: bool,
}

impl Instance {
    /// Builds and validates an instance.
    pub fn new(
        supplies: Vec<u64>,
        demands: Vec<u64>,
        fixed: Vec<Vec<Rational>>,
        linear: Vec<Vec<Cost>>,
    ) -> Result<Self> {
        let inst = Instance {
            supplies,
            demands,
            fixed,
            linear,
        };
        validate_instance(&inst).map_err(Error::InvalidInstance)?;
        Ok(inst)
    }

    /// Pure instance (`c ≡ 0`) with an arbitrary fixed cost matrix.
    pub fn pure(supplies: Vec<u64>, demands: Vec<u64>, fixed: Vec<Vec<Rational>>) -> Result<Self> {
        let linear = vec![vec![Cost::zero(); demands.len()]; supplies.len()];
        Self::new(supplies, demands, fixed, linear)
    }

    /// Pure instance with sink-independent fixed costs `f_ij = f_i`.
    pub fn pure_sink_independent(
        supplies: Vec<u64>,
        demands: Vec<u64>,
        source_costs: Vec<Rational>,
    ) -> Result<Self> {
        let m = demands.len();
        let fixed = source_costs.into_iter().map(|f| vec![f; m]).collect();
        Self::pure(supplies, demands, fixed)
    }

    /// Pure instance with uniform fixed costs.
    pub fn pure_uniform(supplies: Vec<u64>, demands: Vec<u64>) -> Result<Self> {
        let fixed = vec![vec![Rational::one(); demands.len()]; supplies.len()];
        Self::pure(supplies, demands, fixed)
    }

    /// Uniform fixed costs with the given linear costs.
    pub fn uniform_with_linear(
        supplies: Vec<u64>,
        demands: Vec<u64>,
        linear: Vec<Vec<Cost>>,
    ) -> Result<Self> {
        let fixed = vec![vec![Rational::one(); demands.len()]; supplies.len()];
        Self::new(supplies, demands, fixed, linear)
    }

    pub fn n(&self) -> usize {
        self.supplies.len()
    }

    pub fn m(&self) -> usize {
        self.demands.len()
    }

    pub fn total_supply(&self) -> u64 {
        self.supplies.iter().sum()
    }

    pub fn is_allowed(&self, i: usize, j: usize) -> bool {
        !self.linear[i][j].is_infinite()
    }

    /// Number of edges with finite linear cost.
    pub fn allowed_edge_count(&self) -> usize {
        self.linear
            .iter()
            .flatten()
            .filter(|c| !c.is_infinite())
            .count()
    }

    /// Per-source fixed cost for sink-independent instances.
    pub fn source_costs(&self) -> Option<Vec<Rational>> {
        if !classify_variant(self).sink_independent {
            return None;
        }
        Some(self.fixed.iter().map(|row| row[0].clone()).collect())
    }
}

/// Returns the first violated invariant, if any.
pub fn validate_instance(inst: &Instance) -> std::result::Result<(), Violation> {
    let (n, m) = (inst.n(), inst.m());
    if n == 0 {
        return Err(Violation::NoSources);
    }
    if m == 0 {
        return Err(Violation::NoSinks);
    }
    for (i, &a) in inst.supplies.iter().enumerate() {
        if a == 0 {
            return Err(Violation::SupplyNotPositive(i));
        }
        if a > MAX_MARGINAL {
            return Err(Violation::SupplyTooLarge(i));
        }
    }
    for (j, &b) in inst.demands.iter().enumerate() {
        if b == 0 {
            return Err(Violation::DemandNotPositive(j));
        }
        if b > MAX_MARGINAL {
            return Err(Violation::DemandTooLarge(j));
        }
    }
    if inst.supplies.iter().sum::<u64>() != inst.demands.iter().sum::<u64>() {
        return Err(Violation::Imbalanced);
    }
    if inst.fixed.len() != n || inst.fixed.iter().any(|r| r.len() != m) {
        return Err(Violation::FixedShape);
    }
    if inst.linear.len() != n || inst.linear.iter().any(|r| r.len() != m) {
        return Err(Violation::LinearShape);
    }
    for i in 0..n {
        for j in 0..m {
            if inst.fixed[i][j].is_negative() {
                return Err(Violation::NegativeFixed(i, j));
            }
            if matches!(&inst.linear[i][j], Cost::Finite(c) if c.is_negative()) {
                return Err(Violation::NegativeLinear(i, j));
            }
        }
    }
    Ok(())
}

pub fn classify_variant(inst: &Instance) -> VariantTag {
    let pure = inst.linear.iter().flatten().all(Cost::is_zero);
    let pure_modulo_forbidden = inst
        .linear
        .iter()
        .flatten()
        .all(|c| c.is_zero() || c.is_infinite());
    let sink_independent = inst.fixed.iter().all(|row| row.iter().all(|f| *f == row[0]));
    let uniform = inst.fixed.iter().flatten().all(One::is_one);
    VariantTag {
        pure,
        pure_modulo_forbidden,
        sink_independent,
        uniform,
    }
}

/// Sparse nonnegative edge flows. Zero entries are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FlowSolution {
    entries: BTreeMap<(usize, usize), Rational>,
    /// Demand band `ε` for bicriteria solutions: column sums lie in
    /// `[(1-ε) b_j, (1+ε) b_j]` instead of matching exactly.
    pub relaxation: Option<Rational>,
}

/// A failed marginal check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MarginalViolation {
    OutOfRange(usize, usize),
    NonPositive(usize, usize),
    Row { source: usize, got: Rational, want: Rational },
    Column { sink: usize, got: Rational, want: Rational },
    ColumnOutsideBand { sink: usize, got: Rational },
}

impl fmt::Display for MarginalViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MarginalViolation::OutOfRange(i, j) => {
                write!(f, "edge ({}, {}) outside instance", i + 1, j + 1)
            }
            MarginalViolation::NonPositive(i, j) => {
                write!(f, "flow on ({}, {}) not positive", i + 1, j + 1)
            }
            MarginalViolation::Row { source, got, want } => {
                write!(f, "source {} sends {got}, expected {want}", source + 1)
            }
            MarginalViolation::Column { sink, got, want } => {
                write!(f, "sink {} receives {got}, expected {want}", sink + 1)
            }
            MarginalViolation::ColumnOutsideBand { sink, got } => {
                write!(f, "sink {} receives {got}, outside the relaxation band", sink + 1)
            }
        }
    }
}

impl FlowSolution {
    pub fn new() -> Self {
        Self::default()
    }

    /// Collects entries, summing duplicates and dropping zeros.
    pub fn from_entries(entries: impl IntoIterator<Item = ((usize, usize), Rational)>) -> Self {
        let mut x = FlowSolution::new();
        for (edge, v) in entries {
            x.add(edge, &v);
        }
        x
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.entries
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Sets the flow on an edge; zero removes it.
    pub fn set(&mut self, edge: (usize, usize), v: Rational) {
        if v.is_zero() {
            self.entries.remove(&edge);
        } else {
            self.entries.insert(edge, v);
        }
    }

    pub fn add(&mut self, edge: (usize, usize), delta: &Rational) {
        let v = self.get(edge.0, edge.1) + delta;
        self.set(edge, v);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize), &Rational)> {
        self.entries.iter()
    }

    /// Support edges in `(i, j)` lexicographic order.
    pub fn support(&self) -> Vec<(usize, usize)> {
        self.entries.keys().copied().collect()
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn row_sums(&self, n: usize) -> Vec<Rational> {
        let mut rows = vec![Rational::zero(); n];
        for (&(i, _), v) in &self.entries {
            rows[i] += v;
        }
        rows
    }

    pub fn column_sums(&self, m: usize) -> Vec<Rational> {
        let mut cols = vec![Rational::zero(); m];
        for (&(_, j), v) in &self.entries {
            cols[j] += v;
        }
        cols
    }

    pub fn is_integral(&self) -> bool {
        self.entries.values().all(|v| v.is_integer())
    }

    /// Exact marginal check. Rows must always match `a`; columns must match
    /// `b` exactly unless a relaxation band is attached.
    pub fn check_marginals(&self, inst: &Instance) -> std::result::Result<(), MarginalViolation> {
        for (&(i, j), v) in &self.entries {
            if i >= inst.n() || j >= inst.m() {
                return Err(MarginalViolation::OutOfRange(i, j));
            }
            if !v.is_positive() {
                return Err(MarginalViolation::NonPositive(i, j));
            }
        }
        for (i, got) in self.row_sums(inst.n()).into_iter().enumerate() {
            let want = from_u64(inst.supplies[i]);
            if got != want {
                return Err(MarginalViolation::Row { source: i, got, want });
            }
        }
        for (j, got) in self.column_sums(inst.m()).into_iter().enumerate() {
            let want = from_u64(inst.demands[j]);
            match &self.relaxation {
                None if got != want => {
                    return Err(MarginalViolation::Column { sink: j, got, want });
                }
                Some(eps) => {
                    let lo = &want * (Rational::one() - eps);
                    let hi = &want * (Rational::one() + eps);
                    if got < lo || got > hi {
                        return Err(MarginalViolation::ColumnOutsideBand { sink: j, got });
                    }
                }
                None => {}
            }
        }
        Ok(())
    }
}

/// Σ over the support of `f_ij + c_ij · x_ij`.
pub fn evaluate_cost(inst: &Instance, x: &FlowSolution) -> Result<Rational> {
    let mut total = Rational::zero();
    for (&(i, j), v) in x.iter() {
        if i >= inst.n() || j >= inst.m() {
            return Err(Error::InvalidArgument(format!(
                "edge ({}, {}) outside instance",
                i + 1,
                j + 1
            )));
        }
        match &inst.linear[i][j] {
            Cost::Infinite => return Err(Error::InfeasibleEdge(i, j)),
            Cost::Finite(c) => {
                total += &inst.fixed[i][j];
                total += c * v;
            }
        }
    }
    Ok(total)
}

/// Linear part `Σ c_ij x_ij` only.
pub fn linear_cost(inst: &Instance, x: &FlowSolution) -> Result<Rational> {
    let mut total = Rational::zero();
    for (&(i, j), v) in x.iter() {
        match &inst.linear[i][j] {
            Cost::Infinite => return Err(Error::InfeasibleEdge(i, j)),
            Cost::Finite(c) => total += c * v,
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn e1() -> Instance {
        Instance::pure_sink_independent(vec![5, 3], vec![4, 2, 2], vec![int(10), int(4)]).unwrap()
    }

    fn flow(entries: &[((usize, usize), i64)]) -> FlowSolution {
        FlowSolution::from_entries(entries.iter().map(|&(e, v)| (e, int(v))))
    }

    #[test]
    fn validation_examples() {
        let ok = Instance {
            supplies: vec![1],
            demands: vec![1],
            fixed: vec![vec![int(0)]],
            linear: vec![vec![Cost::zero()]],
        };
        assert_eq!(validate_instance(&ok), Ok(()));

        let imbalanced = Instance {
            supplies: vec![2],
            ..ok.clone()
        };
        let v = validate_instance(&imbalanced).unwrap_err();
        assert_eq!(v.to_string(), "sum(a) != sum(b)");

        let zero = Instance {
            supplies: vec![0, 2],
            demands: vec![2],
            fixed: vec![vec![int(0)], vec![int(0)]],
            linear: vec![vec![Cost::zero()], vec![Cost::zero()]],
        };
        assert_eq!(
            validate_instance(&zero).unwrap_err().to_string(),
            "a_1 not positive"
        );
    }

    #[test]
    fn validation_rejects_bad_shapes_and_signs() {
        let neg = Instance {
            supplies: vec![1],
            demands: vec![1],
            fixed: vec![vec![int(-1)]],
            linear: vec![vec![Cost::zero()]],
        };
        assert_eq!(validate_instance(&neg), Err(Violation::NegativeFixed(0, 0)));
        let shape = Instance {
            fixed: vec![vec![int(1), int(1)]],
            ..neg.clone()
        };
        assert_eq!(validate_instance(&shape), Err(Violation::FixedShape));
        let big = Instance {
            supplies: vec![MAX_MARGINAL + 1],
            demands: vec![MAX_MARGINAL + 1],
            fixed: vec![vec![int(1)]],
            linear: vec![vec![Cost::zero()]],
        };
        assert_eq!(validate_instance(&big), Err(Violation::SupplyTooLarge(0)));
    }

    #[test]
    fn cost_examples() {
        let u = Instance::pure_uniform(vec![2, 2], vec![1, 3]).unwrap();
        let x = flow(&[((0, 0), 1), ((0, 1), 1), ((1, 1), 2)]);
        assert_eq!(evaluate_cost(&u, &x).unwrap(), int(3));

        let x = flow(&[((0, 0), 4), ((0, 1), 1), ((1, 1), 1), ((1, 2), 2)]);
        assert_eq!(evaluate_cost(&e1(), &x).unwrap(), int(28));

        let mut forbidden = Instance::pure_uniform(vec![1], vec![1]).unwrap();
        forbidden.linear[0][0] = Cost::Infinite;
        let x = flow(&[((0, 0), 1)]);
        assert_eq!(
            evaluate_cost(&forbidden, &x),
            Err(Error::InfeasibleEdge(0, 0))
        );
    }

    #[test]
    fn cost_includes_linear_part() {
        let inst = Instance::uniform_with_linear(
            vec![3],
            vec![3],
            vec![vec![Cost::Finite(ratio(1, 2))]],
        )
        .unwrap();
        let x = flow(&[((0, 0), 3)]);
        assert_eq!(evaluate_cost(&inst, &x).unwrap(), ratio(5, 2));
    }

    #[test]
    fn classification_examples() {
        let u = Instance::pure_uniform(vec![1, 1], vec![1, 1]).unwrap();
        let t = classify_variant(&u);
        assert!(t.pure && t.sink_independent && t.uniform);

        let s = Instance::pure_sink_independent(vec![1, 1], vec![1, 1], vec![int(3), int(2)])
            .unwrap();
        let t = classify_variant(&s);
        assert!(t.pure && t.sink_independent && !t.uniform);

        let c = vec![
            vec![Cost::zero(), Cost::Finite(int(1))],
            vec![Cost::Finite(int(1)), Cost::zero()],
        ];
        let fu = Instance::uniform_with_linear(vec![1, 1], vec![1, 1], c).unwrap();
        let t = classify_variant(&fu);
        assert!(!t.pure && !t.pure_modulo_forbidden && t.sink_independent && t.uniform);
    }

    #[test]
    fn marginal_checks() {
        let inst = e1();
        let good = flow(&[((0, 0), 4), ((0, 1), 1), ((1, 1), 1), ((1, 2), 2)]);
        assert_eq!(good.check_marginals(&inst), Ok(()));
        let bad = flow(&[((0, 0), 4), ((0, 1), 1), ((1, 2), 3)]);
        assert!(matches!(
            bad.check_marginals(&inst),
            Err(MarginalViolation::Column { sink: 1, .. })
        ));
        let mut relaxed = flow(&[((0, 0), 5), ((1, 1), 1), ((1, 2), 2)]);
        relaxed.relaxation = Some(ratio(1, 4));
        assert_eq!(
            relaxed.check_marginals(&inst),
            Err(MarginalViolation::ColumnOutsideBand { sink: 1, got: int(1) })
        );
        let mut banded = FlowSolution::from_entries([
            ((0, 0), ratio(7, 2)),
            ((0, 1), ratio(3, 2)),
            ((1, 1), ratio(1, 2)),
            ((1, 2), ratio(5, 2)),
        ]);
        banded.relaxation = Some(ratio(1, 4));
        assert_eq!(banded.check_marginals(&inst), Ok(()));
        banded.relaxation = None;
        assert!(banded.check_marginals(&inst).is_err());
    }

    #[test]
    fn zero_entries_are_dropped() {
        let mut x = FlowSolution::from_entries([((0, 0), int(0)), ((0, 1), int(2))]);
        assert_eq!(x.support(), vec![(0, 1)]);
        x.add((0, 1), &int(-2));
        assert!(x.is_empty());
    }
}
