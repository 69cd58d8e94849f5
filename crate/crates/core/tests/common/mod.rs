#![allow(dead_code)]

use qaf::family::{PointSet, SetFamily};
use qaf::properties::{check_bracket, check_pq, find_representations, RepresentationMap};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Distinct nonempty random sets over `0..points`; the universe is exactly
/// `points`.
pub fn random_family(rng: &mut impl Rng, points: u32, max_sets: usize) -> SetFamily {
    let count = rng.gen_range(1..=max_sets);
    let mut sets: Vec<PointSet> = Vec::new();
    for _ in 0..count {
        let size = rng.gen_range(1..=points.min(5));
        let mut all: Vec<u32> = (0..points).collect();
        all.shuffle(rng);
        let s: PointSet = all[..size as usize].iter().copied().collect();
        if !sets.contains(&s) {
            sets.push(s);
        }
    }
    SetFamily::new(sets, points).unwrap()
}

/// Random antichain: every member has a representation for some `t`.
pub fn random_antichain(rng: &mut impl Rng, points: u32, max_sets: usize) -> SetFamily {
    let f = random_family(rng, points, max_sets);
    let sets: Vec<PointSet> = f
        .iter()
        .filter(|a| !f.iter().any(|b| b != *a && a.is_subset(b)))
        .cloned()
        .collect();
    SetFamily::new(sets, points).unwrap()
}

/// Smallest `t` for which every member has a representation.
pub fn least_t(family: &SetFamily) -> Option<(usize, RepresentationMap)> {
    (1..=family.len().max(1)).find_map(|t| find_representations(family, t).ok().map(|r| (t, r)))
}

/// Smallest `d` with the `[d,m]` property.
pub fn least_d(family: &SetFamily, m: usize) -> usize {
    (0..).find(|&d| check_bracket(family, d, m).is_holds()).unwrap()
}

/// A linear family with the `(p,3)` property of at least `min_size`
/// members: `pencils` groups of members through a common center plus
/// `extras` further members, with `p >= 2 * pencils + extras + 1`.
pub fn pencil_family(rng: &mut impl Rng, p: usize, pencils: usize, extras: usize, min_size: usize) -> SetFamily {
    assert!(p > 2 * pencils + extras);
    let mut next_point = pencils as u32;
    let mut sets: Vec<PointSet> = Vec::new();
    let fits = |sets: &[PointSet], s: &PointSet| !sets.contains(s) && sets.iter().all(|b| b.intersection_len(s) <= 1);
    let mut shared: Vec<u32> = Vec::new();
    let target = min_size - extras;
    while sets.len() < target {
        let center = rng.gen_range(0..pencils as u32);
        let mut s = PointSet::singleton(center);
        // Private points, plus occasionally a point already in use.
        for _ in 0..rng.gen_range(1..=3) {
            if !shared.is_empty() && rng.gen_bool(0.3) {
                s.insert(*shared.choose(rng).unwrap());
            } else {
                s.insert(next_point);
                shared.push(next_point);
                next_point += 1;
            }
        }
        if s.len() >= 2 && fits(&sets, &s) {
            sets.push(s);
        }
    }
    let mut added = 0;
    while added < extras {
        let mut s = PointSet::new();
        for _ in 0..rng.gen_range(1..=3) {
            if rng.gen_bool(0.5) && !shared.is_empty() {
                s.insert(*shared.choose(rng).unwrap());
            } else {
                s.insert(next_point);
                next_point += 1;
            }
        }
        if !s.is_empty() && fits(&sets, &s) && !sets.iter().any(|b| s.is_subset(b) || b.is_subset(&s)) {
            sets.push(s);
            added += 1;
        }
    }
    sets.shuffle(rng);
    let f = SetFamily::from_sets(sets).unwrap();
    debug_assert!(check_bracket(&f, 1, 1).is_holds());
    debug_assert!(check_pq(&f, p, 3).unwrap().is_holds());
    f
}
