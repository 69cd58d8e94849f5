//! Minimum hitting sets (transversals).
//!
//! [`tau_exact`] is a depth-first branch and bound. At every node it branches
//! on the unhit member with the fewest usable points; in the `i`-th branch the
//! first `i - 1` points of that member are forbidden for the whole subtree,
//! which keeps the branches disjoint. The lower bound is a greedy packing of
//! pairwise disjoint unhit members and the incumbent starts at the greedy
//! transversal. All choices break ties by lowest member index and lowest
//! point id, so witnesses are reproducible.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{Point, PointSet, SetFamily};

/// A point set that hits every member of the family it was computed for.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Transversal {
    pub points: PointSet,
    /// Fingerprint of the family the transversal was verified against.
    pub verified_against: u64,
}

impl Transversal {
    pub(crate) fn certify(points: PointSet, family: &SetFamily) -> Self {
        debug_assert!(hits_all(family, &points));
        Self { points, verified_against: family.fingerprint() }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Independent re-check against `family`.
    pub fn verify(&self, family: &SetFamily) -> bool {
        self.verified_against == family.fingerprint() && hits_all(family, &self.points)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TauResult {
    pub tau: usize,
    pub witness: Transversal,
    pub nodes_explored: u64,
}

/// Whether `points` meets every member.
pub fn hits_all(family: &SetFamily, points: &PointSet) -> bool {
    family.iter().all(|a| a.intersects(points))
}

fn check_hittable(family: &SetFamily) -> Result<()> {
    match family.iter().position(PointSet::is_empty) {
        Some(index) => Err(Error::UnhittableMember { index }),
        None => Ok(()),
    }
}

/// Greedy transversal: repeatedly take the point hitting the most unhit
/// members, lowest id on ties.
pub fn tau_greedy(family: &SetFamily) -> Transversal {
    Transversal::certify(greedy_points(family.sets()), family)
}

fn greedy_points(sets: &[PointSet]) -> PointSet {
    let mut unhit: Vec<&PointSet> = sets.iter().collect();
    let mut chosen = PointSet::new();
    let mut counts: Vec<usize> = Vec::new();
    while !unhit.is_empty() {
        counts.clear();
        for s in &unhit {
            for p in s.iter() {
                let p = p as usize;
                if counts.len() <= p {
                    counts.resize(p + 1, 0);
                }
                counts[p] += 1;
            }
        }
        // max_by_key returns the last maximum; scan in reverse to get the lowest id.
        let Some((best, _)) = counts.iter().enumerate().rev().max_by_key(|&(_, c)| *c) else {
            break;
        };
        let best = best as Point;
        chosen.insert(best);
        unhit.retain(|s| !s.contains(best));
    }
    chosen
}

struct BranchAndBound<'a> {
    sets: &'a [PointSet],
    best: Option<PointSet>,
    /// Only solutions strictly smaller than this are of interest.
    bound: usize,
    stop_on_first: bool,
    done: bool,
    nodes: u64,
}

impl BranchAndBound<'_> {
    fn packing_bound(&self, unhit: &[usize], allowed: &PointSet) -> usize {
        let mut used = PointSet::new();
        let mut count = 0;
        for &m in unhit {
            let usable = self.sets[m].intersection(allowed);
            if usable.is_disjoint(&used) {
                used = used.union(&usable);
                count += 1;
            }
        }
        count
    }

    fn search(&mut self, unhit: &[usize], allowed: &mut PointSet, chosen: &mut Vec<Point>) {
        self.nodes += 1;
        if unhit.is_empty() {
            if chosen.len() < self.bound {
                self.bound = chosen.len();
                self.best = Some(chosen.iter().copied().collect());
                self.done = self.stop_on_first;
            }
            return;
        }
        if chosen.len() + self.packing_bound(unhit, allowed) >= self.bound {
            return;
        }
        let (_, usable) = unhit
            .iter()
            .map(|&m| (m, self.sets[m].intersection(allowed)))
            .min_by_key(|(m, u)| (u.len(), *m))
            .expect("unhit is nonempty");
        if usable.is_empty() {
            return;
        }
        let mut banned = Vec::new();
        for p in usable.iter() {
            let rest: Vec<usize> = unhit.iter().copied().filter(|&m| !self.sets[m].contains(p)).collect();
            chosen.push(p);
            self.search(&rest, allowed, chosen);
            chosen.pop();
            allowed.remove(p);
            banned.push(p);
            if self.done {
                break;
            }
        }
        for p in banned {
            allowed.insert(p);
        }
    }
}

fn run_bnb(sets: &[PointSet], initial: Option<PointSet>, bound: usize, stop_on_first: bool) -> (Option<PointSet>, u64) {
    let mut bnb = BranchAndBound { sets, best: initial, bound, stop_on_first, done: false, nodes: 0 };
    let unhit: Vec<usize> = (0..sets.len()).collect();
    let mut allowed = sets.iter().fold(PointSet::new(), |acc, s| acc.union(s));
    let mut chosen = Vec::new();
    bnb.search(&unhit, &mut allowed, &mut chosen);
    (bnb.best, bnb.nodes)
}

/// Exact transversal number with a minimum witness.
pub fn tau_exact(family: &SetFamily) -> Result<TauResult> {
    if family.is_empty() {
        return Err(Error::Precondition("transversal number of an empty family".into()));
    }
    check_hittable(family)?;
    let greedy = greedy_points(family.sets());
    let bound = greedy.len();
    let (best, nodes) = run_bnb(family.sets(), Some(greedy), bound, false);
    let points = best.expect("greedy incumbent is always present");
    Ok(TauResult { tau: points.len(), witness: Transversal::certify(points, family), nodes_explored: nodes })
}

/// Minimum transversal if its size is at most `cutoff`.
fn minimum_up_to(sets: &[PointSet], cutoff: usize) -> Option<PointSet> {
    let greedy = greedy_points(sets);
    if greedy.len() <= cutoff {
        let bound = greedy.len();
        run_bnb(sets, Some(greedy), bound, false).0
    } else {
        run_bnb(sets, None, cutoff + 1, false).0
    }
}

/// Some transversal of size at most `t`, if one exists. The empty family is
/// hit by the empty set.
pub fn has_t_transversal(family: &SetFamily, t: usize) -> Result<Option<Transversal>> {
    check_hittable(family)?;
    let greedy = greedy_points(family.sets());
    if greedy.len() <= t {
        return Ok(Some(Transversal::certify(greedy, family)));
    }
    let (found, _) = run_bnb(family.sets(), None, t + 1, true);
    Ok(found.map(|p| Transversal::certify(p, family)))
}

/// A minimum transversal of `family` that uses no point of `forbidden`,
/// provided its size is at most `t`.
///
/// Forbidden points are deleted from every member first; a member that
/// becomes empty makes the answer absent.
pub fn min_hitting_avoiding(family: &SetFamily, forbidden: &PointSet, t: usize) -> Option<Transversal> {
    let reduced: Vec<PointSet> = family.iter().map(|a| a.difference(forbidden)).collect();
    if reduced.iter().any(PointSet::is_empty) {
        return None;
    }
    minimum_up_to(&reduced, t).map(|p| Transversal::certify(p, family))
}

/// Reference oracle: tries every point subset of the covered points in
/// order of size, lexicographically within a size. Exponential; meant for
/// tests only.
pub fn brute_force_tau(family: &SetFamily, cap: usize) -> Option<usize> {
    let points = family.covered_points().to_vec();
    if family.is_empty() {
        return Some(0);
    }
    for size in 1..=cap.min(points.len()) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let candidate: PointSet = idx.iter().map(|&i| points[i]).collect();
            if hits_all(family, &candidate) {
                return Some(size);
            }
            let n = points.len();
            let Some(i) = (0..size).rev().find(|&i| idx[i] < n - size + i) else {
                break;
            };
            idx[i] += 1;
            for j in i + 1..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    None
}
