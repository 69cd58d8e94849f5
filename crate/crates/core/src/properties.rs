//! Family property checkers.
//!
//! Each checker returns a [`PropertyReport`]; a failing report always carries
//! a witness that can be re-checked without repeating the search.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{iterate, Point, PointSet, SetFamily, Subfamily};
use crate::solver::{has_t_transversal, min_hitting_avoiding};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Witness {
    Set(PointSet),
    Subfamily(Subfamily),
    Member(usize),
    Point(Point),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub property: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl PropertyReport {
    fn holds(property: String, detail: impl Into<String>) -> Self {
        Self { property, verdict: Verdict::Holds, witness: None, detail: detail.into(), note: None }
    }

    fn fails(property: String, witness: Witness, detail: impl Into<String>) -> Self {
        Self { property, verdict: Verdict::Fails, witness: Some(witness), detail: detail.into(), note: None }
    }

    pub fn is_holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }
}

/// `[d,m]`: every member of `F^m` has at most `d` points.
pub fn check_bracket(family: &SetFamily, d: usize, m: usize) -> PropertyReport {
    let name = format!("[{d},{m}]");
    let level = iterate(family, m);
    match level.iter().find(|a| a.len() > d) {
        Some(bad) => PropertyReport::fails(
            name,
            Witness::Set(bad.clone()),
            format!("{bad} is a member of F^{m} with {} > {d} points", bad.len()),
        ),
        None => PropertyReport::holds(name, format!("all {} members of F^{m} have at most {d} points", level.len())),
    }
}

/// `{d,m}`: every `m` members intersect in at most `d` points. With fewer
/// than `m` members this holds vacuously and the report carries a note.
pub fn check_brace(family: &SetFamily, d: usize, m: usize) -> Result<PropertyReport> {
    if m == 0 {
        return Err(Error::InvalidParameter("{d,m} needs m >= 1".into()));
    }
    let name = format!("{{{d},{m}}}");
    if m > family.len() {
        let mut r = PropertyReport::holds(name, "no m-member subfamilies");
        r.note = Some(format!("vacuous: m = {m} exceeds the family size {}", family.len()));
        return Ok(r);
    }
    let sets = family.sets();
    let mut chosen = Vec::with_capacity(m);
    let found = brace_violation(sets, d, m, 0, None, &mut chosen);
    Ok(match found {
        Some(indices) => {
            let sub = Subfamily::new(indices);
            let meet = sub.intersection(family).unwrap_or_default();
            PropertyReport::fails(
                name,
                Witness::Subfamily(sub),
                format!("{m} members share {} > {d} points", meet.len()),
            )
        }
        None => PropertyReport::holds(name, format!("every {m} members share at most {d} points")),
    })
}

// Combinations in lexicographic order; a partial intersection already of
// size <= d can only shrink, so such branches are cut.
fn brace_violation(
    sets: &[PointSet],
    d: usize,
    m: usize,
    start: usize,
    meet: Option<&PointSet>,
    chosen: &mut Vec<usize>,
) -> Option<Vec<usize>> {
    if let Some(meet) = meet {
        if meet.len() <= d {
            return None;
        }
    }
    if chosen.len() == m {
        return Some(chosen.clone());
    }
    let need = m - chosen.len();
    for i in start..=sets.len().saturating_sub(need) {
        let next = match meet {
            Some(x) => x.intersection(&sets[i]),
            None => sets[i].clone(),
        };
        chosen.push(i);
        let r = brace_violation(sets, d, m, i + 1, Some(&next), chosen);
        chosen.pop();
        if r.is_some() {
            return r;
        }
    }
    None
}

/// Searches for `p` members no `q` of which share a point.
///
/// This is the failure witness of the `(p,q)` property. For `q = 3` the
/// search keeps the set of pairwise meeting points of the chosen members and
/// a candidate is admissible iff it avoids that set; for other `q` it keeps a
/// per-point multiplicity count.
pub fn q_independent_subfamily(family: &SetFamily, p: usize, q: usize) -> Option<Subfamily> {
    if p == 0 {
        return Some(Subfamily::default());
    }
    let sets = family.sets();
    let mut chosen = Vec::with_capacity(p);
    let found = if q == 3 {
        let meets: Vec<Vec<PointSet>> = sets
            .iter()
            .map(|a| sets.iter().map(|b| a.intersection(b)).collect())
            .collect();
        independent_q3(sets, &meets, p, 0, &PointSet::new(), &mut chosen)
    } else {
        let mut counts = vec![0usize; family.universe() as usize];
        independent_general(sets, p, q, 0, &mut counts, &mut chosen)
    };
    found.then(|| Subfamily::new(chosen))
}

fn independent_q3(
    sets: &[PointSet],
    meets: &[Vec<PointSet>],
    p: usize,
    start: usize,
    forbidden: &PointSet,
    chosen: &mut Vec<usize>,
) -> bool {
    if chosen.len() == p {
        return true;
    }
    let need = p - chosen.len();
    let admissible: Vec<usize> = (start..sets.len()).filter(|&i| !sets[i].intersects(forbidden)).collect();
    if q3_capacity(sets, &admissible, chosen, need) < need {
        return false;
    }
    for (pos, &i) in admissible.iter().enumerate() {
        if admissible.len() - pos < need {
            break;
        }
        let next = chosen.iter().fold(forbidden.clone(), |acc, &j| acc.union(&meets[i][j]));
        chosen.push(i);
        if independent_q3(sets, meets, p, i + 1, &next, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Upper bound on how many of `admissible` can still be chosen, stopping
/// early once it reaches `need`. A point already in one chosen member can
/// take one more and a fresh point two, so partitioning the candidates by a
/// shared point caps each part.
fn q3_capacity(sets: &[PointSet], admissible: &[usize], chosen: &[usize], need: usize) -> usize {
    let mut open: Vec<usize> = admissible.to_vec();
    let mut bound = 0;
    let mut counts: HashMap<Point, usize> = HashMap::new();
    while bound < need && !open.is_empty() {
        counts.clear();
        for &i in &open {
            for x in sets[i].iter() {
                *counts.entry(x).or_default() += 1;
            }
        }
        let (x, count) = counts
            .iter()
            .map(|(&x, &c)| (x, c))
            .max_by_key(|&(x, c)| (c, std::cmp::Reverse(x)))
            .expect("open members are nonempty");
        if count <= 1 {
            return bound + open.len();
        }
        let used = chosen.iter().filter(|&&j| sets[j].contains(x)).count();
        bound += count.min(2usize.saturating_sub(used));
        open.retain(|&i| !sets[i].contains(x));
    }
    bound + open.len().min(need)
}

fn independent_general(
    sets: &[PointSet],
    p: usize,
    q: usize,
    start: usize,
    counts: &mut [usize],
    chosen: &mut Vec<usize>,
) -> bool {
    if chosen.len() == p {
        return true;
    }
    let need = p - chosen.len();
    for i in start..sets.len() {
        if sets.len() - i < need {
            break;
        }
        if sets[i].iter().any(|x| counts[x as usize] + 1 >= q) {
            continue;
        }
        for x in sets[i].iter() {
            counts[x as usize] += 1;
        }
        chosen.push(i);
        if independent_general(sets, p, q, i + 1, counts, chosen) {
            return true;
        }
        chosen.pop();
        for x in sets[i].iter() {
            counts[x as usize] -= 1;
        }
    }
    false
}

/// `(p,q)`: the family has at least `p` members and among every `p` of them
/// some `q` share a point.
pub fn check_pq(family: &SetFamily, p: usize, q: usize) -> Result<PropertyReport> {
    if q < 2 || p < q {
        return Err(Error::InvalidParameter(format!("(p,q) needs p >= q >= 2, got ({p},{q})")));
    }
    if family.len() < p {
        return Err(Error::Precondition(format!("(p,q) needs at least p = {p} members, family has {}", family.len())));
    }
    let name = format!("({p},{q})");
    Ok(match q_independent_subfamily(family, p, q) {
        Some(sub) => PropertyReport::fails(name, Witness::Subfamily(sub), format!("{p} members with no {q} sharing a point")),
        None => PropertyReport::holds(name, format!("every {p} members contain {q} with a common point")),
    })
}

/// Per-member representations: `X(A)` hits every other member and avoids `A`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RepresentationMap {
    pub t: usize,
    pub entries: Vec<PointSet>,
}

impl RepresentationMap {
    pub fn get(&self, member: usize) -> &PointSet {
        &self.entries[member]
    }

    /// Re-checks every defining condition; returns the first violation.
    pub fn validate(&self, family: &SetFamily) -> std::result::Result<(), String> {
        if self.entries.len() != family.len() {
            return Err(format!("{} entries for {} members", self.entries.len(), family.len()));
        }
        for (i, x) in self.entries.iter().enumerate() {
            if x.len() > self.t {
                return Err(format!("X({i}) has {} > t = {} points", x.len(), self.t));
            }
            if x.intersects(&family.sets()[i]) {
                return Err(format!("X({i}) meets member {i}"));
            }
            if let Some(j) = (0..family.len()).find(|&j| j != i && !x.intersects(&family.sets()[j])) {
                return Err(format!("X({i}) misses member {j}"));
            }
        }
        self.distinctness().map_err(|(j, i)| format!("X({j}) = X({i}) = {}", self.entries[i]))
    }

    /// Representations of distinct members are distinct sets; on violation
    /// returns the two member indices.
    pub fn distinctness(&self) -> std::result::Result<(), (usize, usize)> {
        let mut seen = std::collections::HashMap::new();
        for (i, x) in self.entries.iter().enumerate() {
            if let Some(j) = seen.insert(x, i) {
                return Err((j, i));
            }
        }
        Ok(())
    }
}

/// Computes a representation for every member, or reports the first member
/// (lowest index) that has none.
///
/// Each `X(A)` is a minimum transversal of `F \ {A}` avoiding `A`, chosen
/// deterministically by the solver. Members are processed in parallel; the
/// result does not depend on scheduling.
pub fn find_representations(family: &SetFamily, t: usize) -> std::result::Result<RepresentationMap, PropertyReport> {
    let entries: Vec<Option<PointSet>> = (0..family.len())
        .into_par_iter()
        .map(|i| min_hitting_avoiding(&family.without(i), &family.sets()[i], t).map(|x| x.points))
        .collect();
    let name = format!("{t}-property");
    if let Some(i) = entries.iter().position(Option::is_none) {
        return Err(PropertyReport::fails(
            name,
            Witness::Member(i),
            format!("F \\ {{{}}} has no {t}-transversal avoiding it", family.sets()[i]),
        ));
    }
    let map = RepresentationMap { t, entries: entries.into_iter().map(Option::unwrap).collect() };
    if let Err((j, i)) = map.distinctness() {
        // Cannot happen for a valid map: X(A) = X(B) would hit B and avoid B.
        let mut r = PropertyReport::fails(
            name,
            Witness::Member(i),
            format!("members {j} and {i} received the same representation"),
        );
        r.note = Some("representation distinctness violated; this indicates a solver defect".into());
        return Err(r);
    }
    Ok(map)
}

/// The `t`-property as a report.
pub fn check_t_property(family: &SetFamily, t: usize) -> PropertyReport {
    match find_representations(family, t) {
        Ok(_) => PropertyReport::holds(format!("{t}-property"), format!("every member has a representation of size <= {t}")),
        Err(r) => r,
    }
}

/// `F` has no `t`-transversal but every `F \ {A}` does.
pub fn is_t_critical(family: &SetFamily, t: usize) -> Result<PropertyReport> {
    let name = format!("{t}-critical");
    if let Some(x) = has_t_transversal(family, t)? {
        return Ok(PropertyReport::fails(name, Witness::Set(x.points), format!("the family itself has a {t}-transversal")));
    }
    for i in 0..family.len() {
        if has_t_transversal(&family.without(i), t)?.is_none() {
            return Ok(PropertyReport::fails(
                name,
                Witness::Member(i),
                format!("removing member {i} still leaves no {t}-transversal"),
            ));
        }
    }
    Ok(PropertyReport::holds(name, format!("no {t}-transversal, but every one-member deletion has one")))
}

/// Re-checks a failure witness independently of the search that produced it.
pub fn witness_confirms_failure(family: &SetFamily, report: &PropertyReport, check: &Check) -> bool {
    let Some(w) = &report.witness else {
        return report.is_holds();
    };
    match (check, w) {
        (Check::Bracket { d, m }, Witness::Set(s)) => s.len() > *d && iterate(family, *m).contains_set(s),
        (Check::Brace { d, m }, Witness::Subfamily(sub)) => {
            sub.len() == *m && sub.fits(family) && sub.intersection(family).map_or(false, |x| x.len() > *d)
        }
        (Check::Pq { p, q }, Witness::Subfamily(sub)) => {
            sub.len() == *p && sub.fits(family) && {
                let members = family.subfamily(sub);
                members.covered_points().iter().all(|x| members.degree(x) < *q)
            }
        }
        (Check::TProperty { t }, Witness::Member(i)) => {
            *i < family.len() && min_hitting_avoiding(&family.without(*i), &family.sets()[*i], *t).is_none()
        }
        _ => false,
    }
}

/// Identifies a checker together with its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Check {
    Bracket { d: usize, m: usize },
    Brace { d: usize, m: usize },
    Pq { p: usize, q: usize },
    TProperty { t: usize },
}
