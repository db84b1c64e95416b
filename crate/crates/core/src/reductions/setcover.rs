use num_traits::{One, Zero};

use super::SetCoverInstance;
use crate::error::Result;
use crate::model::Instance;
use crate::rational::{Cost, Rational};

/// Sources `s*, v_out...`, sinks `v_in..., u...`.
///
/// `s*` has supply `|U|` and fixed cost one; each `v_out` has supply `|U|`
/// and fixed cost zero; each `v_in` has demand `|U|` and each element
/// demand one. Allowed edges are `v_out -> v_in`, `s* -> v_in` and
/// `v_out -> u` for members `u` of `v`.
pub fn setcover_to_fct_s(sc: &SetCoverInstance) -> Result<Instance> {
    sc.validate()?;
    let (sets, elems) = (sc.sets, sc.elements);
    let n = 1 + sets;
    let m = sets + elems;
    let supplies = vec![elems as u64; n];
    let demands: Vec<u64> = std::iter::repeat_n(elems as u64, sets)
        .chain(std::iter::repeat_n(1, elems))
        .collect();
    let mut fixed = vec![vec![Rational::zero(); m]; n];
    fixed[0] = vec![Rational::one(); m];
    let mut linear = vec![vec![Cost::Infinite; m]; n];
    for v in 0..sets {
        linear[0][v] = Cost::zero();
        linear[1 + v][v] = Cost::zero();
        for u in sc.members(v) {
            linear[1 + v][sets + u] = Cost::zero();
        }
    }
    Instance::new(supplies, demands, fixed, linear)
}
