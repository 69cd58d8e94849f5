//! Piercing linear families with the `(p,q)` property by `p - q + 1` points.
//!
//! A family with the `(p,q)` property also has the `(p-q+3, 3)` property, so
//! the work happens at level `L = p - q + 3` with the goal of `L - 2` points.
//! At level 3 all members share a point. At level 4 some three members meet
//! in a point `x` and at most one member misses `x`. Above that, either the
//! family already has the `(L-1, 3)` property, or there are `L - 1` members
//! no three of which share a point; their pairwise meeting points `W(Q)`
//! contain a point `x` lying in many members, and the members avoiding `x`
//! have the `(L-2, 3)` property.
//!
//! Every numerical guarantee is checked as it is used. When one fails, the
//! remaining subfamily is handed to the exact solver with the remaining point
//! budget and the event is recorded in the trace. The final result is always
//! verified.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::extremal::{binomial, piercing_threshold, step_threshold};
use crate::family::{PointSet, SetFamily, Subfamily};
use crate::properties::{check_bracket, check_pq, q_independent_subfamily};
use crate::solver::{has_t_transversal, hits_all, Transversal};

/// One reduction step: `point` was chosen from the meeting points of
/// `witness`, and every member through it was removed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PierceStep {
    pub level: usize,
    pub point: u32,
    /// `|G_x|` in the family the step worked on.
    pub degree: usize,
    /// Member indices into the input family.
    pub witness: Subfamily,
    pub meeting_points: usize,
    /// Whether the family at this step met the size the argument assumes.
    pub size_threshold_met: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fallback {
    pub level: usize,
    pub members: usize,
    pub budget: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PierceTrace {
    pub p: usize,
    pub q: usize,
    pub steps: Vec<PierceStep>,
    pub fallbacks: Vec<Fallback>,
    pub result: Transversal,
}

/// `p` members no three of which share a point, if any.
pub fn witness_q_free(family: &SetFamily, p: usize) -> Result<Option<Subfamily>> {
    if p < 3 {
        return Err(Error::InvalidParameter(format!("p must be at least 3, got {p}")));
    }
    Ok(q_independent_subfamily(family, p, 3))
}

/// Points in which two members of `q` meet. Every two members must share at
/// most one point.
pub fn w_of_q(family: &SetFamily, q: &Subfamily) -> Result<PointSet> {
    if !q.fits(family) {
        return Err(Error::InvalidParameter("subfamily index out of range".into()));
    }
    let idx = q.indices();
    let mut w = PointSet::new();
    for (i, &a) in idx.iter().enumerate() {
        for &b in &idx[i + 1..] {
            let meet = family.sets()[a].intersection(&family.sets()[b]);
            if meet.len() > 1 {
                return Err(Error::Precondition(format!("members {a} and {b} share {} points", meet.len())));
            }
            w = w.union(&meet);
        }
    }
    Ok(w)
}

/// Pierces `family` with at most `p - q + 1` points.
///
/// Requires the family to be linear, to have the `(p,q)` property, and to
/// have at least [`piercing_threshold`]`(p, q)` members.
pub fn pierce_pq(family: &SetFamily, p: usize, q: usize) -> Result<PierceTrace> {
    let need = piercing_threshold(p as u64, q as u64)?;
    if (family.len() as u128) < need {
        return Err(Error::Precondition(format!("family has {} members, at least {need} are needed", family.len())));
    }
    let linear = check_bracket(family, 1, 1);
    if !linear.is_holds() {
        return Err(Error::Precondition(format!("family is not linear: {}", linear.detail)));
    }
    let pq = check_pq(family, p, q)?;
    if !pq.is_holds() {
        return Err(Error::Precondition(format!("family does not have the ({p},{q}) property")));
    }
    let budget = p - q + 1;
    let mut run = Run { steps: Vec::new(), fallbacks: Vec::new() };
    let members: Vec<usize> = (0..family.len()).collect();
    let points = run.solve(family, &members, p - q + 3, budget)?;
    if points.len() > budget || !hits_all(family, &points) {
        return Err(Error::Inconsistency(format!("computed set {points} does not pierce the family with {budget} points")));
    }
    let result = Transversal::certify(points, family);
    Ok(PierceTrace { p, q, steps: run.steps, fallbacks: run.fallbacks, result })
}

struct Run {
    steps: Vec<PierceStep>,
    fallbacks: Vec<Fallback>,
}

impl Run {
    /// Pierces the members listed in `members` (indices into `family`) with
    /// at most `budget` points, assuming the `(level, 3)` property.
    fn solve(&mut self, family: &SetFamily, members: &[usize], level: usize, budget: usize) -> Result<PointSet> {
        let sub = SetFamily::from_distinct(members.iter().map(|&i| family.sets()[i].clone()).collect(), family.universe());
        if sub.is_empty() {
            return Ok(PointSet::new());
        }
        if sub.len() <= budget {
            return Ok(sub.iter().filter_map(PointSet::first).collect());
        }
        if q_independent_subfamily(&sub, level, 3).is_some() {
            return self.fallback(&sub, level, budget, format!("({level},3) property does not hold"));
        }
        match level {
            3 => {
                let common = sub.iter().skip(1).fold(sub.sets()[0].clone(), |acc, a| acc.intersection(a));
                match common.first() {
                    Some(x) => Ok(PointSet::singleton(x)),
                    None => self.fallback(&sub, level, budget, "members have no common point".into()),
                }
            }
            4 => self.solve_four(&sub, budget),
            _ => self.step(family, members, &sub, level, budget),
        }
    }

    fn solve_four(&mut self, sub: &SetFamily, budget: usize) -> Result<PointSet> {
        let Some(x) = first_triple_point(sub) else {
            return self.fallback(sub, 4, budget, "no three members share a point".into());
        };
        let missing: Vec<&PointSet> = sub.iter().filter(|a| !a.contains(x)).collect();
        match missing.as_slice() {
            [] => Ok(PointSet::singleton(x)),
            [d] if budget >= 2 => {
                let mut out = PointSet::singleton(x);
                out.insert(d.first().expect("members are nonempty"));
                Ok(out)
            }
            _ => self.fallback(sub, 4, budget, format!("{} members miss the triple point {x}", missing.len())),
        }
    }

    fn step(&mut self, family: &SetFamily, members: &[usize], sub: &SetFamily, level: usize, budget: usize) -> Result<PointSet> {
        let Some(q) = q_independent_subfamily(sub, level - 1, 3) else {
            return self.solve(family, members, level - 1, budget);
        };
        let w = w_of_q(sub, &q)?;
        let Some(x) = w.to_vec().into_iter().rev().max_by_key(|&x| sub.degree(x)) else {
            return self.fallback(sub, level, budget, "witness members are pairwise disjoint".into());
        };
        let degree = sub.degree(x);
        let threshold_met = sub.len() as u128 >= step_threshold(level as u64);
        self.steps.push(PierceStep {
            level,
            point: x,
            degree,
            witness: Subfamily::new(q.indices().iter().map(|&i| members[i]).collect()),
            meeting_points: w.len(),
            size_threshold_met: threshold_met,
        });
        if !threshold_met {
            return self.fallback(sub, level, budget, format!("{} members, below the step size {}", sub.len(), step_threshold(level as u64)));
        }
        let need = binomial(level as u64 - 2, 2).unwrap_or(u128::MAX) + 2;
        if (degree as u128) < need || budget == 0 {
            return self.fallback(sub, level, budget, format!("|G_{x}| = {degree} < {need}"));
        }
        let rest: Vec<usize> = members.iter().copied().filter(|&i| !family.sets()[i].contains(x)).collect();
        let mut out = if rest.len() <= level - 3 {
            rest.iter().filter_map(|&i| family.sets()[i].first()).collect()
        } else {
            self.solve(family, &rest, level - 2, budget - 1)?
        };
        out.insert(x);
        Ok(out)
    }

    fn fallback(&mut self, sub: &SetFamily, level: usize, budget: usize, reason: String) -> Result<PointSet> {
        self.fallbacks.push(Fallback { level, members: sub.len(), budget, reason });
        match has_t_transversal(sub, budget)? {
            Some(x) => Ok(x.points),
            None => Err(Error::Inconsistency(format!(
                "a subfamily of {} members at level {level} has no transversal of {budget} points",
                sub.len()
            ))),
        }
    }
}

fn first_triple_point(family: &SetFamily) -> Option<u32> {
    let sets = family.sets();
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            let ab = sets[i].intersection(&sets[j]);
            if ab.is_empty() {
                continue;
            }
            for c in &sets[j + 1..] {
                if let Some(x) = ab.intersection(c).first() {
                    return Some(x);
                }
            }
        }
    }
    None
}
