use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ThreeDmInstance;
use crate::balanced::{enumerate_balanced_sets, BalancedSet, Element};
use crate::error::{Error, Result};
use crate::model::{Instance, MAX_MARGINAL};

/// Largest `|h|_1` checked by the default generator.
pub const INDEPENDENCE_ORDER: u32 = 6;
/// Limit on the number of integer vectors the independence check visits.
pub const INDEPENDENCE_ENUMERATION_LIMIT: u128 = 10_000_000;
/// Draws attempted before giving up on independence.
pub const MAX_DRAWS: u32 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThreeDmReduction {
    pub instance: Instance,
    /// Demands of `X ∪ Y ∪ Z`, in that order.
    pub element_demands: Vec<u64>,
    pub dummy_demand: u64,
    pub delta: u64,
    /// Draws needed to pass the independence check.
    pub draws: u32,
}

fn vectors_with_small_norm(dim: usize, order: u32) -> u128 {
    let choose = |n: u128, k: u128| -> u128 {
        if k > n {
            0
        } else {
            (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
        }
    };
    (0..=order.min(dim as u32) as u128)
        .map(|k| (1u128 << k) * choose(dim as u128, k) * choose(order as u128, k))
        .sum()
}

/// True iff no integer vector `h` with `1 <= |h|_1 <= order` has
/// `Σ h_v b_v = 0`.
pub fn verify_h_independence(values: &[u64], order: u32) -> Result<bool> {
    if vectors_with_small_norm(values.len(), order) > INDEPENDENCE_ENUMERATION_LIMIT {
        return Err(Error::TooLarge("independence check"));
    }

    fn dependent(values: &[u64], k: usize, budget: i64, sum: i128, nonzero: bool) -> bool {
        if k == values.len() {
            return nonzero && sum == 0;
        }
        (-budget..=budget).any(|h| {
            dependent(
                values,
                k + 1,
                budget - h.abs(),
                sum + h as i128 * values[k] as i128,
                nonzero || h != 0,
            )
        })
    }

    Ok(!dependent(values, 0, order as i64, 0, false))
}

/// `2 (6n + 1)^order`, the spread of the demand distribution.
pub fn default_delta(size: usize, order: u32) -> Result<u64> {
    let delta = BigUint::from(2u32) * BigUint::from(6 * size as u64 + 1).pow(order);
    delta.to_u64().ok_or(Error::TooLarge("3DM reduction"))
}

/// [`threedm_to_pfct_u_with_delta`] with the default spread.
pub fn threedm_to_pfct_u(tdm: &ThreeDmInstance, seed: u64) -> Result<ThreeDmReduction> {
    let delta = default_delta(tdm.size, INDEPENDENCE_ORDER)?;
    threedm_to_pfct_u_with_delta(tdm, delta, seed)
}

/// Sources are the triples with `a_ijk = b_i + b_j + b_k`; sinks are the
/// elements with demands drawn from `(delta, 2 delta]` and a dummy sink
/// absorbing the surplus. Draws repeat until the demands pass
/// [`verify_h_independence`] at order six.
pub fn threedm_to_pfct_u_with_delta(
    tdm: &ThreeDmInstance,
    delta: u64,
    seed: u64,
) -> Result<ThreeDmReduction> {
    tdm.validate()?;
    if delta == 0 {
        return Err(Error::InvalidArgument("delta must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let elements = 3 * tdm.size;
    for draw in 1..=MAX_DRAWS {
        let demands: Vec<u64> = (0..elements)
            .map(|_| rng.random_range(delta + 1..=2 * delta))
            .collect();
        if !verify_h_independence(&demands, INDEPENDENCE_ORDER)? {
            continue;
        }
        let supplies: Vec<u64> = tdm
            .triples
            .iter()
            .map(|t| {
                (0..3)
                    .map(|axis| demands[axis * tdm.size + t[axis]])
                    .sum()
            })
            .collect();
        let supply: u128 = supplies.iter().map(|&a| a as u128).sum();
        let demand: u128 = demands.iter().map(|&b| b as u128).sum();
        if supply <= demand {
            return Err(Error::DegenerateDummySink);
        }
        let dummy = supply - demand;
        if dummy > MAX_MARGINAL as u128 {
            return Err(Error::TooLarge("3DM reduction"));
        }
        let mut sinks = demands.clone();
        sinks.push(dummy as u64);
        let instance = Instance::pure_uniform(supplies, sinks)?;
        return Ok(ThreeDmReduction {
            instance,
            element_demands: demands,
            dummy_demand: dummy as u64,
            delta,
            draws: draw,
        });
    }
    Err(Error::IndependenceNotAchieved(MAX_DRAWS))
}

fn is_canonical(set: &BalancedSet, tdm: &ThreeDmInstance) -> bool {
    let sources: Vec<&Element> = set.sources().collect();
    let sinks: Vec<usize> = set.sinks().map(|e| e.index).collect();
    let [source] = sources.as_slice() else {
        return false;
    };
    let t = tdm.triples[source.index];
    let mut expect: Vec<usize> = (0..3).map(|axis| axis * tdm.size + t[axis]).collect();
    expect.sort_unstable();
    sinks == expect
}

/// Checks that every balanced set of at most `max_size` elements that
/// avoids the dummy sink is a canonical set `{i, j, k, ijk}`.
///
/// Sets are enumerated directly; `max_size` is capped at six.
pub fn canonical_sets_only(reduction: &ThreeDmReduction, tdm: &ThreeDmInstance, max_size: usize) -> Result<bool> {
    if max_size < 3 {
        return Ok(true);
    }
    let ground: Vec<Element> = crate::balanced::elements(&reduction.instance);
    let family = enumerate_balanced_sets(&ground, max_size.min(6))?.family;
    let dummy = Element::sink(3 * tdm.size, reduction.dummy_demand);
    Ok(family
        .iter()
        .filter(|set| !set.contains(&dummy))
        .all(|set| is_canonical(set, tdm)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn independence_examples() {
        assert!(verify_h_independence(&[2, 3], 1).unwrap());
        assert!(!verify_h_independence(&[2, 2], 2).unwrap());
        assert!(verify_h_independence(&[5, 7, 11], 2).unwrap());
        assert!(!verify_h_independence(&[5, 7, 5], 2).unwrap());
        assert!(!verify_h_independence(&[5, 7, 12], 3).unwrap());
    }

    #[test]
    fn independence_guard() {
        let values: Vec<u64> = (1..=60).collect();
        assert_eq!(
            verify_h_independence(&values, 6),
            Err(Error::TooLarge("independence check"))
        );
    }

    fn matching_instance() -> ThreeDmInstance {
        ThreeDmInstance {
            size: 2,
            triples: vec![[0, 0, 0], [1, 1, 1], [0, 1, 0]],
        }
    }

    #[test]
    fn generated_instance_shape() {
        let tdm = matching_instance();
        let red = threedm_to_pfct_u_with_delta(&tdm, 1_000_000, 7).unwrap();
        let inst = &red.instance;
        assert_eq!(inst.n(), 3);
        assert_eq!(inst.m(), 7);
        for (t, &a) in tdm.triples.iter().zip(&inst.supplies) {
            let b = &red.element_demands;
            assert_eq!(a, b[t[0]] + b[2 + t[1]] + b[4 + t[2]]);
        }
        assert!(red
            .element_demands
            .iter()
            .all(|&b| b > 1_000_000 && b <= 2_000_000));
        assert_eq!(inst.demands[6], red.dummy_demand);
        assert!(canonical_sets_only(&red, &tdm, 6).unwrap());
    }

    #[test]
    fn seeded_generation_is_reproducible() {
        let tdm = matching_instance();
        let a = threedm_to_pfct_u_with_delta(&tdm, 1_000_000, 11).unwrap();
        let b = threedm_to_pfct_u_with_delta(&tdm, 1_000_000, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn dependent_draws_are_retried() {
        let tdm = matching_instance();
        assert_eq!(
            threedm_to_pfct_u_with_delta(&tdm, 1, 3),
            Err(Error::IndependenceNotAchieved(MAX_DRAWS))
        );
        let retried = (0..200)
            .filter_map(|seed| threedm_to_pfct_u_with_delta(&tdm, 5_000, seed).ok())
            .find(|red| red.draws > 1)
            .expect("some seed needs a second draw");
        assert!(verify_h_independence(&retried.element_demands, INDEPENDENCE_ORDER).unwrap());
    }

    #[test]
    fn single_triple_has_no_dummy_demand() {
        let tdm = ThreeDmInstance {
            size: 1,
            triples: vec![[0, 0, 0]],
        };
        assert_eq!(
            threedm_to_pfct_u_with_delta(&tdm, 1_000, 1),
            Err(Error::DegenerateDummySink)
        );
    }

    #[test]
    fn default_delta_value() {
        assert_eq!(default_delta(2, 6).unwrap(), 2 * 13u64.pow(6));
    }
}
