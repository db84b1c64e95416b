use std::collections::HashMap;

use super::{BalancedSet, PackingInstance};
use crate::error::{Error, Result};

/// Exact packing accepts families up to this size...
pub const EXACT_PACKING_MAX_FAMILY: usize = 25;
/// ...or ground sets up to this size.
pub const EXACT_PACKING_MAX_GROUND: usize = 20;

fn positions(pk: &PackingInstance) -> Vec<Vec<usize>> {
    pk.family
        .iter()
        .map(|s| {
            s.elements()
                .iter()
                .map(|e| pk.ground.binary_search(e).expect("set element in ground"))
                .collect()
        })
        .collect()
}

/// Maximum number of pairwise disjoint sets of the family.
pub fn exact_packing(pk: &PackingInstance) -> Result<Vec<BalancedSet>> {
    if pk.family.len() > EXACT_PACKING_MAX_FAMILY && pk.ground.len() > EXACT_PACKING_MAX_GROUND {
        return Err(Error::TooLarge("exact packing"));
    }
    let sets = positions(pk);
    let chosen = if pk.ground.len() <= 64 {
        by_element(&sets, pk.ground.len())
    } else {
        by_set(&sets, pk.ground.len())
    };
    Ok(chosen.into_iter().map(|i| pk.family[i].clone()).collect())
}

fn by_element(sets: &[Vec<usize>], ground: usize) -> Vec<usize> {
    let masks: Vec<u64> = sets
        .iter()
        .map(|s| s.iter().fold(0u64, |m, &p| m | 1 << p))
        .collect();
    let mut containing: Vec<Vec<usize>> = vec![Vec::new(); ground];
    for (i, s) in sets.iter().enumerate() {
        containing[s[0]].push(i);
    }

    fn best(free: u64, masks: &[u64], containing: &[Vec<usize>], memo: &mut HashMap<u64, u32>) -> u32 {
        if free == 0 {
            return 0;
        }
        if let Some(&v) = memo.get(&free) {
            return v;
        }
        let e = free.trailing_zeros() as usize;
        let mut v = best(free & !(1 << e), masks, containing, memo);
        for &i in &containing[e] {
            if masks[i] & !free == 0 {
                v = v.max(1 + best(free & !masks[i], masks, containing, memo));
            }
        }
        memo.insert(free, v);
        v
    }

    let full = if ground == 64 { u64::MAX } else { (1u64 << ground) - 1 };
    let mut memo = HashMap::new();
    let mut free = full;
    let mut chosen = Vec::new();
    let mut remaining = best(free, &masks, &containing, &mut memo);
    while free != 0 && remaining > 0 {
        let e = free.trailing_zeros() as usize;
        let pick = containing[e].iter().copied().find(|&i| {
            masks[i] & !free == 0 && 1 + best(free & !masks[i], &masks, &containing, &mut memo) == remaining
        });
        match pick {
            Some(i) => {
                chosen.push(i);
                free &= !masks[i];
                remaining -= 1;
            }
            None => free &= !(1 << e),
        }
    }
    chosen.sort_unstable();
    chosen
}

fn by_set(sets: &[Vec<usize>], ground: usize) -> Vec<usize> {
    fn walk(
        k: usize,
        sets: &[Vec<usize>],
        used: &mut [bool],
        current: &mut Vec<usize>,
        best: &mut Vec<usize>,
    ) {
        if current.len() > best.len() {
            *best = current.clone();
        }
        if k == sets.len() || current.len() + (sets.len() - k) <= best.len() {
            return;
        }
        if sets[k].iter().all(|&p| !used[p]) {
            sets[k].iter().for_each(|&p| used[p] = true);
            current.push(k);
            walk(k + 1, sets, used, current, best);
            current.pop();
            sets[k].iter().for_each(|&p| used[p] = false);
        }
        walk(k + 1, sets, used, current, best);
    }
    let mut best = Vec::new();
    walk(0, sets, &mut vec![false; ground], &mut Vec::new(), &mut best);
    best
}

struct LocalSearch<'a> {
    sets: &'a [Vec<usize>],
    owner: Vec<Option<usize>>,
    chosen: Vec<bool>,
}

impl LocalSearch<'_> {
    fn conflicts(&self, set: usize) -> Vec<usize> {
        let mut c: Vec<usize> = self.sets[set].iter().filter_map(|&p| self.owner[p]).collect();
        c.sort_unstable();
        c.dedup();
        c
    }

    fn insert(&mut self, set: usize) {
        self.chosen[set] = true;
        for &p in &self.sets[set] {
            self.owner[p] = Some(set);
        }
    }

    fn remove(&mut self, set: usize) {
        self.chosen[set] = false;
        for &p in &self.sets[set] {
            self.owner[p] = None;
        }
    }

    /// Finds `s` disjoint unchosen sets whose combined conflicts number
    /// fewer than `s`.
    fn find_swap(&self, s: usize) -> Option<(Vec<usize>, Vec<usize>)> {
        let candidates: Vec<(usize, Vec<usize>)> = (0..self.sets.len())
            .filter(|&i| !self.chosen[i])
            .map(|i| (i, self.conflicts(i)))
            .filter(|(_, c)| c.len() < s)
            .collect();
        let mut taken = vec![false; self.owner.len()];
        let mut picked = Vec::new();
        self.extend(&candidates, 0, s, &mut taken, &mut picked, &[])
    }

    fn extend(
        &self,
        candidates: &[(usize, Vec<usize>)],
        start: usize,
        s: usize,
        taken: &mut [bool],
        picked: &mut Vec<usize>,
        conflicts: &[usize],
    ) -> Option<(Vec<usize>, Vec<usize>)> {
        if picked.len() == s {
            return Some((picked.clone(), conflicts.to_vec()));
        }
        for (idx, (set, c)) in candidates.iter().enumerate().skip(start) {
            if self.sets[*set].iter().any(|&p| taken[p]) {
                continue;
            }
            let mut merged: Vec<usize> = conflicts.iter().chain(c).copied().collect();
            merged.sort_unstable();
            merged.dedup();
            if merged.len() >= s {
                continue;
            }
            self.sets[*set].iter().for_each(|&p| taken[p] = true);
            picked.push(*set);
            let found = self.extend(candidates, idx + 1, s, taken, picked, &merged);
            picked.pop();
            self.sets[*set].iter().for_each(|&p| taken[p] = false);
            if found.is_some() {
                return found;
            }
        }
        None
    }
}

/// Greedy packing in canonical order, improved by swaps that add up to
/// `swap` sets while removing fewer, until none applies.
pub fn local_search_packing(pk: &PackingInstance, swap: usize) -> Vec<BalancedSet> {
    let sets = positions(pk);
    let mut ls = LocalSearch {
        sets: &sets,
        owner: vec![None; pk.ground.len()],
        chosen: vec![false; sets.len()],
    };
    for i in 0..sets.len() {
        if ls.conflicts(i).is_empty() {
            ls.insert(i);
        }
    }
    'improve: loop {
        for s in 1..=swap.max(1) {
            if let Some((add, drop)) = ls.find_swap(s) {
                drop.into_iter().for_each(|d| ls.remove(d));
                add.into_iter().for_each(|a| ls.insert(a));
                continue 'improve;
            }
        }
        break;
    }
    (0..sets.len())
        .filter(|&i| ls.chosen[i])
        .map(|i| pk.family[i].clone())
        .collect()
}
