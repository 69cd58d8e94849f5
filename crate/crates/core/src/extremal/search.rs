//! Bounded exhaustive search for the largest family with the `[d,m]` and
//! `t` properties inside a finite scope (`n` points, sets of size at most
//! `s_max`).
//!
//! Both properties are inherited by subfamilies, so a family that fails
//! either one is never extended. Candidates are enumerated in a fixed
//! canonical order (larger sets first, lexicographic within a size) and a
//! family is only extended by later candidates, so every family is visited
//! at most once.
//!
//! Isomorph pruning uses the partition of points into cells of identical
//! membership pattern over the sets chosen so far. Points within a cell are
//! interchangeable for the current family, so a new set must use a prefix of
//! every cell (its lowest points). The lexicographically least relabeling of
//! any family satisfies this at every step of its own construction, so the
//! rule never removes an isomorphism class, only duplicates within it.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{k_subsets, PointSet, SetFamily};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SearchParams {
    pub d: usize,
    pub m: usize,
    pub t: usize,
    /// Universe size.
    pub n: u32,
    /// Largest allowed member size.
    pub s_max: usize,
    /// Node limit; the search stops and reports a non-exhaustive result
    /// once it is exceeded.
    pub budget: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchCertificate {
    pub params: SearchParams,
    pub best: SetFamily,
    pub best_size: usize,
    /// `true` iff the whole scope was searched, in which case no family in
    /// scope is larger than `best`.
    pub exhaustive: bool,
    pub nodes: u64,
}

const MAX_CANDIDATES: usize = 1 << 16;

pub fn search_max_b(params: SearchParams) -> Result<SearchCertificate> {
    let SearchParams { d, m, t, n, s_max, budget } = params;
    if n == 0 || s_max == 0 {
        return Err(Error::InvalidParameter("search needs n >= 1 and s_max >= 1".into()));
    }
    if t == 0 {
        return Err(Error::InvalidParameter("t must be at least 1".into()));
    }
    if n > 64 {
        return Err(Error::InvalidParameter(format!("search universe is limited to 64 points, got {n}")));
    }
    let top = s_max.min(n as usize);
    // With m = 0 the property bounds the members themselves.
    let top = if m == 0 { top.min(d) } else { top };
    let mut candidates = Vec::new();
    for size in (1..=top).rev() {
        for s in k_subsets(n, size) {
            candidates.push(to_mask(&s));
            if candidates.len() > MAX_CANDIDATES {
                return Err(Error::InvalidParameter(format!(
                    "scope n = {n}, s_max = {s_max} has more than {MAX_CANDIDATES} candidate sets"
                )));
            }
        }
    }

    let all_points = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut search = Search {
        candidates: &candidates,
        d,
        m,
        t,
        budget,
        nodes: 0,
        aborted: false,
        best: Vec::new(),
    };
    let children: Vec<usize> = (0..candidates.len()).collect();
    search.extend(&mut Vec::new(), &mut Vec::new(), &[], &[all_points], &children);

    let sets: Vec<PointSet> = search.best.iter().map(|&c| from_mask(candidates[c])).collect();
    let best = SetFamily::new(sets, n)?;
    Ok(SearchCertificate {
        params,
        best_size: best.len(),
        best,
        exhaustive: !search.aborted,
        nodes: search.nodes,
    })
}

fn to_mask(s: &PointSet) -> u64 {
    s.iter().fold(0, |acc, p| acc | 1 << p)
}

fn from_mask(mut mask: u64) -> PointSet {
    let mut s = PointSet::new();
    while mask != 0 {
        s.insert(mask.trailing_zeros());
        mask &= mask - 1;
    }
    s
}

struct Search<'a> {
    candidates: &'a [u64],
    d: usize,
    m: usize,
    t: usize,
    budget: u64,
    nodes: u64,
    aborted: bool,
    best: Vec<usize>,
}

impl Search<'_> {
    fn extend(&mut self, chosen: &mut Vec<usize>, masks: &mut Vec<u64>, reps: &[u64], cells: &[u64], children: &[usize]) {
        if chosen.len() > self.best.len() {
            self.best = chosen.clone();
        }
        for (pos, &c) in children.iter().enumerate() {
            if chosen.len() + children.len() - pos <= self.best.len() {
                return;
            }
            if self.nodes >= self.budget {
                self.aborted = true;
                return;
            }
            self.nodes += 1;

            let s = self.candidates[c];
            if !uses_cell_prefixes(cells, s) {
                continue;
            }
            masks.push(s);
            let accepted = (self.m < 2 || bracket_holds(masks, self.d, self.m))
                && stabilizer_bound_holds(masks, self.t);
            let new_reps = if accepted { extend_representations(masks, reps, self.t) } else { None };
            if let Some(new_reps) = new_reps {
                let new_cells = refine(cells, s);
                let next: Vec<usize> = children[pos + 1..]
                    .iter()
                    .copied()
                    .filter(|&o| self.compatible(s, self.candidates[o]))
                    .collect();
                chosen.push(c);
                self.extend(chosen, masks, &new_reps, &new_cells, &next);
                chosen.pop();
            }
            masks.pop();
            if self.aborted {
                return;
            }
        }
    }

    /// Pairwise conditions every pair of members must satisfy: no member
    /// contains another (a representation of the larger one would have to
    /// hit the smaller one inside it), and for `m = 1` the `[d,1]` bound.
    fn compatible(&self, a: u64, b: u64) -> bool {
        let meet = a & b;
        meet != a && meet != b && (self.m != 1 || meet.count_ones() as usize <= self.d)
    }
}

fn uses_cell_prefixes(cells: &[u64], s: u64) -> bool {
    cells.iter().all(|&cell| {
        let part = s & cell;
        if part == 0 {
            return true;
        }
        let high = 63 - part.leading_zeros();
        let below = if high == 63 { u64::MAX } else { (1u64 << (high + 1)) - 1 };
        cell & below == part
    })
}

fn refine(cells: &[u64], s: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(cells.len() + 1);
    for &cell in cells {
        for part in [cell & s, cell & !s] {
            if part != 0 {
                out.push(part);
            }
        }
    }
    out
}

/// `[d,m]` for `m >= 2` on bitmask families.
fn bracket_holds(masks: &[u64], d: usize, m: usize) -> bool {
    let mut level: Vec<u64> = masks.to_vec();
    for _ in 0..m {
        let mut next = Vec::new();
        for (i, &a) in level.iter().enumerate() {
            for &b in &level[i + 1..] {
                let c = a & b;
                if c != 0 && !next.contains(&c) {
                    next.push(c);
                }
            }
        }
        if next.is_empty() {
            return true;
        }
        level = next;
    }
    level.iter().all(|x| x.count_ones() as usize <= d)
}

/// Necessary condition for the `t` property: every member other than `A` is
/// in one of the `t` stabilizers of the points of `X(A)`, so
/// `|F| <= t * max_x |G_x| + 1`.
fn stabilizer_bound_holds(masks: &[u64], t: usize) -> bool {
    if masks.len() < 2 {
        return true;
    }
    let mut degree = [0usize; 64];
    for &s in masks {
        let mut rest = s;
        while rest != 0 {
            degree[rest.trailing_zeros() as usize] += 1;
            rest &= rest - 1;
        }
    }
    let max_degree = degree.iter().copied().max().unwrap_or(0);
    masks.len() <= t * max_degree + 1
}

/// Representations for `masks` (whose last entry is new), reusing those of
/// the previous family where they still hit the new set.
fn extend_representations(masks: &[u64], reps: &[u64], t: usize) -> Option<Vec<u64>> {
    let k = masks.len() - 1;
    let new = masks[k];
    let mut out = Vec::with_capacity(k + 1);
    let mut others = Vec::with_capacity(k);
    for i in 0..k {
        if reps[i] & new != 0 {
            out.push(reps[i]);
            continue;
        }
        others.clear();
        others.extend(masks.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &s)| s));
        out.push(small_transversal(&others, masks[i], t)?);
    }
    out.push(small_transversal(&masks[..k], new, t)?);
    Some(out)
}

/// Some transversal of at most `t` points avoiding `avoid`.
fn small_transversal(sets: &[u64], avoid: u64, t: usize) -> Option<u64> {
    fn go(sets: &[u64], avoid: u64, budget: usize, chosen: u64, banned: u64) -> Option<u64> {
        let mut pivot: Option<u64> = None;
        for &s in sets {
            if s & chosen != 0 {
                continue;
            }
            let usable = s & !avoid & !banned;
            if usable == 0 {
                return None;
            }
            if pivot.map_or(true, |p| usable.count_ones() < p.count_ones()) {
                pivot = Some(usable);
            }
        }
        let Some(usable) = pivot else {
            return Some(chosen);
        };
        if budget == 0 {
            return None;
        }
        let mut banned = banned;
        let mut rest = usable;
        while rest != 0 {
            let bit = rest & rest.wrapping_neg();
            rest ^= bit;
            if let Some(x) = go(sets, avoid, budget - 1, chosen | bit, banned) {
                return Some(x);
            }
            banned |= bit;
        }
        None
    }
    go(sets, avoid, t, 0, 0)
}
