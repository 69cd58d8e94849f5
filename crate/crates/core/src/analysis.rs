//! Counting tools for families with representations: triples, prices,
//! the greedy ordering of a representation, and an audit that evaluates
//! the structural inequalities such families must satisfy.
//!
//! A triple is `(B, C, x)` with `B != C` members and `x` in `B ∩ C`; pairs
//! are unordered. With `G_x` the members through `x` and `H_x` the members
//! whose representation contains `x`, the price of `X(A)` is
//! `sum_{x in X(A)} C(|G_x|, 2) / |H_x|`.

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extremal::geometric_sum;
use crate::family::{codim, g_sets, proper_sets, Point, PointSet, SetFamily, Subfamily};
use crate::properties::{check_bracket, RepresentationMap};

pub type Price = Ratio<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TripleCount {
    pub total: u64,
    pub covered: u64,
}

fn pairs_choose(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

/// Sum over unordered member pairs of `|B ∩ C|`.
pub fn triples_total(family: &SetFamily) -> u64 {
    let sets = family.sets();
    let mut total = 0;
    for (i, b) in sets.iter().enumerate() {
        for c in &sets[i + 1..] {
            total += b.intersection_len(c) as u64;
        }
    }
    total
}

/// Triples whose point lies in at least one representation.
pub fn triples_covered(family: &SetFamily, reps: &RepresentationMap) -> u64 {
    let used = reps.entries.iter().fold(PointSet::new(), |acc, x| acc.union(x));
    let sets = family.sets();
    let mut covered = 0;
    for (i, b) in sets.iter().enumerate() {
        for c in &sets[i + 1..] {
            covered += b.intersection(c).intersection_len(&used) as u64;
        }
    }
    covered
}

pub fn triple_count(family: &SetFamily, reps: &RepresentationMap) -> TripleCount {
    TripleCount { total: triples_total(family), covered: triples_covered(family, reps) }
}

/// `|H_x|`: members whose representation contains `x`.
pub fn h_count(reps: &RepresentationMap, x: Point) -> usize {
    reps.entries.iter().filter(|r| r.contains(x)).count()
}

/// Exact price of the representation of member `a`.
pub fn price(family: &SetFamily, reps: &RepresentationMap, a: usize) -> Result<Price> {
    let x_a = reps
        .entries
        .get(a)
        .ok_or_else(|| Error::InvalidParameter(format!("member index {a} out of range")))?;
    let mut sum = Price::from_integer(0);
    for x in x_a.iter() {
        let g = i64::try_from(pairs_choose(family.degree(x))).map_err(|_| Error::Overflow("C(|G_x|,2)".into()))?;
        // x is in X(A), so H_x contains A.
        let h = h_count(reps, x) as i64;
        sum += Price::new(g, h);
    }
    Ok(sum)
}

/// Greedy ordering of one representation.
///
/// `order[0]` has the largest stabilizer, and each later point maximizes
/// the number of members not yet covered by earlier points (lowest id on
/// ties). `blocks[i]` holds those newly covered members and `k[i]` its size.
/// `plateau` is the largest 1-based index `i` with `k[i-1] = t`, or 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RepOrdering {
    pub member: usize,
    pub order: Vec<Point>,
    pub k: Vec<usize>,
    pub blocks: Vec<Subfamily>,
    pub plateau: usize,
}

pub fn rep_ordering(family: &SetFamily, reps: &RepresentationMap, a: usize) -> Result<RepOrdering> {
    let x_a = reps
        .entries
        .get(a)
        .ok_or_else(|| Error::InvalidParameter(format!("member index {a} out of range")))?;
    let mut remaining: Vec<Point> = x_a.to_vec();
    let mut covered = vec![false; family.len()];
    let mut ordering = RepOrdering { member: a, order: Vec::new(), k: Vec::new(), blocks: Vec::new(), plateau: 0 };
    while !remaining.is_empty() {
        let fresh = |x: Point| -> Vec<usize> {
            family
                .iter()
                .enumerate()
                .filter(|&(i, s)| !covered[i] && s.contains(x))
                .map(|(i, _)| i)
                .collect()
        };
        let (pos, block) = remaining
            .iter()
            .enumerate()
            .map(|(pos, &x)| (pos, fresh(x)))
            .rev()
            .max_by_key(|(_, b)| b.len())
            .expect("remaining is nonempty");
        let x = remaining.remove(pos);
        for &i in &block {
            covered[i] = true;
        }
        ordering.order.push(x);
        ordering.k.push(block.len());
        ordering.blocks.push(Subfamily::new(block));
    }
    ordering.plateau = ordering.k.iter().rposition(|&k| k == reps.t).map_or(0, |i| i + 1);
    Ok(ordering)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AuditVerdict {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditEntry {
    pub check: &'static str,
    pub verdict: AuditVerdict,
    /// A failing strict entry fails the audit; non-strict entries are
    /// informational.
    pub strict: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub entries: Vec<AuditEntry>,
}

impl AuditReport {
    pub fn failures(&self) -> Vec<&AuditEntry> {
        self.entries.iter().filter(|e| e.strict && e.verdict == AuditVerdict::Fail).collect()
    }

    pub fn passed(&self) -> bool {
        self.failures().is_empty()
    }

    pub fn count(&self, verdict: AuditVerdict) -> usize {
        self.entries.iter().filter(|e| e.verdict == verdict).count()
    }

    fn push(&mut self, check: &'static str, strict: bool, outcome: Outcome) {
        let (verdict, detail) = match outcome {
            Outcome::Pass(d) => (AuditVerdict::Pass, d),
            Outcome::Fail(d) => (AuditVerdict::Fail, d),
            Outcome::Skip(d) => (AuditVerdict::Skipped, d),
        };
        self.entries.push(AuditEntry { check, verdict, strict, detail });
    }
}

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn surrogate_b(e: usize, m: usize, t: usize) -> u128 {
    geometric_sum(t as u64, (e + m) as u64).unwrap_or(u128::MAX)
}

/// Evaluates every applicable inequality on `family`, which must have the
/// `[d,m]` property and carry total representations of size at most `t`.
///
/// Checks whose hypotheses are not met are reported as skipped. Unknown
/// extremal numbers `b(e,m;t)` are replaced by the upper bound
/// `sum_{i=0}^{e+m} t^i`, which keeps every check sound.
pub fn audit_lemmas(family: &SetFamily, d: usize, m: usize, t: usize, reps: &RepresentationMap) -> Result<AuditReport> {
    if !check_bracket(family, d, m).is_holds() {
        return Err(Error::Precondition(format!("family does not have the [{d},{m}] property")));
    }
    if reps.t > t {
        return Err(Error::Precondition(format!("representations allow {} > t = {t} points", reps.t)));
    }
    reps.validate(family).map_err(Error::Precondition)?;

    let mut report = AuditReport { entries: Vec::new() };
    let points = family.covered_points().to_vec();
    let degree: Vec<(Point, usize)> = points.iter().map(|&x| (x, family.degree(x))).collect();
    let max_degree = degree.iter().map(|&(_, g)| g).max().unwrap_or(0);

    report.push("representation-cover", true, representation_cover(family, reps));
    report.push("stabilizer-size", true, stabilizer_size(&degree, d, m, t));
    report.push("subfamily-size", true, subfamily_size(family, d, m, t)?);
    report.push("codimension-stabilizer", true, codimension_stabilizer(family, d, t)?);
    report.push("pinned-multiplicity", true, pinned_multiplicity(family, reps, &degree, d, m, t));

    let linear = check_bracket(family, 1, 1).is_holds();
    let (triples, pairs) = all_or_none(family, reps, &degree, t, linear);
    report.push("all-or-none-triple", true, triples);
    report.push("all-or-none-pair", true, pairs);

    let threshold = (t * t).saturating_sub(t) + 4;
    let ordered = if !linear {
        Err("family is not linear".to_string())
    } else if family.len() < threshold {
        Err(format!("|F| = {} < t^2 - t + 4 = {threshold}", family.len()))
    } else if max_degree > t {
        Err(format!("some point lies in {max_degree} > t = {t} members"))
    } else {
        Ok(())
    };
    match ordered {
        Ok(()) => {
            for (check, strict, outcome) in ordering_checks(family, reps, t)? {
                report.push(check, strict, outcome);
            }
            report.push("disjoint-representations", true, disjoint_representations(reps));
        }
        Err(why) => {
            for check in
                ["ordering-sum", "ordering-plateau", "ordering-lower-bound", "ordering-lower-bound-strong", "ordering-tail"]
            {
                report.push(check, check != "ordering-lower-bound-strong", Outcome::Skip(why.clone()));
            }
            report.push("disjoint-representations", true, Outcome::Skip(why));
        }
    }
    Ok(report)
}

fn representation_cover(family: &SetFamily, reps: &RepresentationMap) -> Outcome {
    for (a, x_a) in reps.entries.iter().enumerate() {
        let reach: usize = x_a.iter().map(|x| family.degree(x)).sum();
        if family.len() > reach + 1 {
            return Outcome::Fail(format!("|F| = {} > 1 + sum of |G_x| over X({a}) = {}", family.len(), reach + 1));
        }
    }
    Outcome::Pass("every family is covered by one member and the stabilizers of its representation".into())
}

fn stabilizer_size(degree: &[(Point, usize)], d: usize, m: usize, t: usize) -> Outcome {
    if d == 0 {
        return Outcome::Skip("needs d >= 1".into());
    }
    let bound = surrogate_b(d - 1, m, t);
    match degree.iter().find(|&&(_, g)| g as u128 > bound) {
        Some(&(x, g)) => Outcome::Fail(format!("|G_{x}| = {g} > {bound}")),
        None => Outcome::Pass(format!("every |G_x| <= {bound}")),
    }
}

fn subfamily_size(family: &SetFamily, d: usize, m: usize, t: usize) -> Result<Outcome> {
    let mut checked = 0;
    for p in proper_sets(family) {
        let Some(e) = d.checked_sub(p.points.len()) else {
            continue;
        };
        let g = g_sets(family, &p.points)?.len();
        let bound = surrogate_b(e, m, t);
        if g as u128 > bound {
            return Ok(Outcome::Fail(format!("{} members contain {} but the bound is {bound}", g, p.points)));
        }
        checked += 1;
    }
    Ok(if checked == 0 {
        Outcome::Skip("no proper set has at most d points".into())
    } else {
        Outcome::Pass(format!("{checked} proper sets within bound"))
    })
}

fn codimension_stabilizer(family: &SetFamily, d: usize, t: usize) -> Result<Outcome> {
    if d != 0 {
        return Ok(Outcome::Skip("needs d = 0".into()));
    }
    let mut checked = 0;
    for p in proper_sets(family) {
        let k = codim(family, &p.points)?;
        let g = g_sets(family, &p.points)?.len();
        let bound = geometric_sum(t as u64, k.saturating_sub(1) as u64).unwrap_or(u128::MAX);
        if k == 0 || g as u128 > bound {
            return Ok(Outcome::Fail(format!("|G_{}| = {g} with codimension {k}, bound {bound}", p.points)));
        }
        checked += 1;
    }
    Ok(if checked == 0 {
        Outcome::Skip("no proper sets".into())
    } else {
        Outcome::Pass(format!("{checked} proper sets within bound"))
    })
}

fn pinned_multiplicity(
    family: &SetFamily,
    reps: &RepresentationMap,
    degree: &[(Point, usize)],
    d: usize,
    m: usize,
    t: usize,
) -> Outcome {
    if m != 1 || t != 2 || d == 0 {
        return Outcome::Skip("needs m = 1, t = 2 and d >= 1".into());
    }
    let need = surrogate_b(d - 1, 1, 2).saturating_add(d as u128 + 3);
    if (family.len() as u128) < need {
        return Outcome::Skip(format!("|F| = {} < {need}", family.len()));
    }
    for &(x, g) in degree {
        let h = h_count(reps, x);
        if h > d {
            return Outcome::Fail(format!("|H_{x}| = {h} > d = {d}"));
        }
        let rest = (family.len() - g).saturating_sub(h) as u128;
        if rest > surrogate_b(d - h, 1, 2) {
            return Outcome::Fail(format!("|F \\ G_{x}| - |H_{x}| = {rest} exceeds the bound"));
        }
    }
    Outcome::Pass("every |H_x| <= d".into())
}

/// Representations contain all or none of a group of points whose
/// stabilizers have exactly `t` members and are pairwise disjoint. For
/// triples this holds for every member, for pairs for members outside both
/// stabilizers.
fn all_or_none(
    family: &SetFamily,
    reps: &RepresentationMap,
    degree: &[(Point, usize)],
    t: usize,
    linear: bool,
) -> (Outcome, Outcome) {
    if !linear {
        let why = "family is not linear".to_string();
        return (Outcome::Skip(why.clone()), Outcome::Skip(why));
    }
    let full: Vec<(Point, Subfamily)> = degree
        .iter()
        .filter(|&&(_, g)| g == t)
        .map(|&(x, _)| (x, g_sets(family, &PointSet::singleton(x)).expect("singleton is nonempty")))
        .collect();
    let disjoint = |a: &Subfamily, b: &Subfamily| a.indices().iter().all(|i| !b.contains(*i));
    let mixed = |group: &[Point], a: usize| {
        let hits = group.iter().filter(|&&x| reps.get(a).contains(x)).count();
        hits != 0 && hits != group.len()
    };

    let mut pair_count = 0;
    let mut pair_result = None;
    let mut triple_count = 0;
    let mut triple_result = None;
    for i in 0..full.len() {
        for j in i + 1..full.len() {
            if !disjoint(&full[i].1, &full[j].1) {
                continue;
            }
            pair_count += 1;
            let group = [full[i].0, full[j].0];
            let outside = (0..family.len()).filter(|a| !full[i].1.contains(*a) && !full[j].1.contains(*a));
            if pair_result.is_none() {
                if let Some(a) = outside.into_iter().find(|&a| mixed(&group, a)) {
                    pair_result = Some(format!("X({a}) splits {{{}, {}}}", group[0], group[1]));
                }
            }
            for l in j + 1..full.len() {
                if !disjoint(&full[i].1, &full[l].1) || !disjoint(&full[j].1, &full[l].1) {
                    continue;
                }
                triple_count += 1;
                let group = [full[i].0, full[j].0, full[l].0];
                if triple_result.is_none() {
                    if let Some(a) = (0..family.len()).find(|&a| mixed(&group, a)) {
                        triple_result = Some(format!("X({a}) splits {{{}, {}, {}}}", group[0], group[1], group[2]));
                    }
                }
            }
        }
    }
    let outcome = |count: usize, failure: Option<String>, what: &str| match (count, failure) {
        (0, _) => Outcome::Skip(format!("no {what} of points with disjoint stabilizers of size t")),
        (_, Some(f)) => Outcome::Fail(f),
        (n, None) => Outcome::Pass(format!("{n} {what}s checked")),
    };
    (outcome(triple_count, triple_result, "triple"), outcome(pair_count, pair_result, "pair"))
}

fn ordering_checks(family: &SetFamily, reps: &RepresentationMap, t: usize) -> Result<Vec<(&'static str, bool, Outcome)>> {
    let mut sum = Outcome::Pass("sum of k_i = |F| - 1 for every member".into());
    let mut plateau = Outcome::Pass("plateau index s >= 3 for every member".into());
    let mut lower = Outcome::Pass("k_i >= t - s for every member".into());
    let mut strong = Outcome::Pass("k_i >= t - s + 2 for every member".into());
    let mut tail = Outcome::Pass("sum_{i>=s} (t - k_i) <= t - 3 for every member".into());
    let is_pass = |o: &Outcome| matches!(o, Outcome::Pass(_));
    for a in 0..family.len() {
        let o = rep_ordering(family, reps, a)?;
        let s = o.plateau;
        let mut k = o.k.clone();
        k.resize(t, 0);
        let total: usize = k.iter().sum();
        if is_pass(&sum) && total + 1 != family.len() {
            sum = Outcome::Fail(format!("member {a}: sum of k_i = {total}, |F| - 1 = {}", family.len() - 1));
        }
        if is_pass(&plateau) && s < 3 {
            plateau = Outcome::Fail(format!("member {a}: s = {s}"));
        }
        let min_k = k.iter().copied().min().unwrap_or(0);
        if is_pass(&lower) && min_k + s < t {
            lower = Outcome::Fail(format!("member {a}: min k_i = {min_k} < t - s = {}", t as i64 - s as i64));
        }
        if is_pass(&strong) && min_k + s < t + 2 {
            strong = Outcome::Fail(format!("member {a}: min k_i = {min_k} < t - s + 2 = {}", t as i64 - s as i64 + 2));
        }
        let deficit: usize = k.iter().skip(s.saturating_sub(1)).map(|&ki| t - ki.min(t)).sum();
        if is_pass(&tail) && deficit + 3 > t {
            tail = Outcome::Fail(format!("member {a}: tail deficit {deficit} > t - 3"));
        }
    }
    Ok(vec![
        ("ordering-sum", true, sum),
        ("ordering-plateau", true, plateau),
        ("ordering-lower-bound", true, lower),
        ("ordering-lower-bound-strong", false, strong),
        ("ordering-tail", true, tail),
    ])
}

fn disjoint_representations(reps: &RepresentationMap) -> Outcome {
    for (a, x_a) in reps.entries.iter().enumerate() {
        if let Some(b) = (a + 1..reps.entries.len()).find(|&b| x_a.intersects(&reps.entries[b])) {
            return Outcome::Fail(format!("X({a}) and X({b}) share a point"));
        }
    }
    Outcome::Pass("representations are pairwise disjoint".into())
}
