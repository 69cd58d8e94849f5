//! Point sets, set families and the intersection calculus.
//!
//! A [`SetFamily`] is an ordered list of distinct nonempty [`PointSet`]s over
//! the universe `0..n`. The member index is the identity of a set; every
//! other module refers to members by index.
//!
//! The iterated intersection families are defined by `F^0 = F` and
//! `F^{k+1} = { A ∩ B : A, B ∈ F^k, A ≠ B }`, with empty intersections
//! dropped. Proper sets are the nonempty intersections of nonempty
//! subfamilies, and the codimension of a set `W` is the deepest level of the
//! minimal proper set containing `W`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Point identifier.
pub type Point = u32;

/// A finite set of points stored as a bitset.
///
/// Trailing zero words are never stored, so structural equality and hashing
/// coincide with set equality. Iteration is ascending, and the ordering is
/// lexicographic on the ascending member lists: `{1} < {1, 2} < {2}`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct PointSet {
    words: Vec<u64>,
}

impl PointSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(p: Point) -> Self {
        let mut s = Self::new();
        s.insert(p);
        s
    }

    /// The interval `lo..hi`.
    pub fn range(lo: Point, hi: Point) -> Self {
        (lo..hi).collect()
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        let (w, b) = (p as usize / 64, p % 64);
        self.words.get(w).map_or(false, |word| word >> b & 1 == 1)
    }

    /// Returns `true` if the point was not already present.
    pub fn insert(&mut self, p: Point) -> bool {
        let (w, b) = (p as usize / 64, p % 64);
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        let fresh = self.words[w] >> b & 1 == 0;
        self.words[w] |= 1 << b;
        fresh
    }

    pub fn remove(&mut self, p: Point) -> bool {
        let (w, b) = (p as usize / 64, p % 64);
        let Some(word) = self.words.get_mut(w) else {
            return false;
        };
        let present = *word >> b & 1 == 1;
        *word &= !(1 << b);
        self.trim();
        present
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter {
            words: &self.words,
            index: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    pub fn first(&self) -> Option<Point> {
        self.iter().next()
    }

    pub fn last(&self) -> Option<Point> {
        let (i, w) = self.words.iter().enumerate().last()?;
        Some(i as Point * 64 + 63 - w.leading_zeros())
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        let mut words: Vec<u64> = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a & b)
            .collect();
        while words.last() == Some(&0) {
            words.pop();
        }
        PointSet { words }
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        let (long, short) = if self.words.len() >= other.words.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut words = long.words.clone();
        for (w, s) in words.iter_mut().zip(&short.words) {
            *w |= s;
        }
        PointSet { words }
    }

    pub fn difference(&self, other: &PointSet) -> PointSet {
        let mut words = self.words.clone();
        for (w, o) in words.iter_mut().zip(&other.words) {
            *w &= !o;
        }
        let mut s = PointSet { words };
        s.trim();
        s
    }

    pub fn intersects(&self, other: &PointSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn is_disjoint(&self, other: &PointSet) -> bool {
        !self.intersects(other)
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.words.len() <= other.words.len()
            && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn is_superset(&self, other: &PointSet) -> bool {
        other.is_subset(self)
    }

    pub fn intersection_len(&self, other: &PointSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn to_vec(&self) -> Vec<Point> {
        self.iter().collect()
    }
}

pub struct Iter<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl Iterator for Iter<'_> {
    type Item = Point;

    fn next(&mut self) -> Option<Point> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros();
                self.current &= self.current - 1;
                return Some(self.index as Point * 64 + bit);
            }
            self.index += 1;
            self.current = *self.words.get(self.index)?;
        }
    }
}

impl<'a> IntoIterator for &'a PointSet {
    type Item = Point;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

impl FromIterator<Point> for PointSet {
    fn from_iter<I: IntoIterator<Item = Point>>(iter: I) -> Self {
        let mut s = PointSet::new();
        for p in iter {
            s.insert(p);
        }
        s
    }
}

impl<const N: usize> From<[Point; N]> for PointSet {
    fn from(points: [Point; N]) -> Self {
        points.into_iter().collect()
    }
}

impl Ord for PointSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for PointSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for PointSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for PointSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let points = Vec::<Point>::deserialize(deserializer)?;
        Ok(points.into_iter().collect())
    }
}

/// An ordered family of distinct nonempty sets over the universe `0..universe`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SetFamily {
    sets: Vec<PointSet>,
    universe: u32,
}

impl SetFamily {
    /// Strict constructor: rejects empty members, duplicates and points
    /// outside the universe.
    pub fn new(sets: Vec<PointSet>, universe: u32) -> Result<Self> {
        let mut seen: HashMap<&PointSet, usize> = HashMap::with_capacity(sets.len());
        for (index, set) in sets.iter().enumerate() {
            if set.is_empty() {
                return Err(Error::EmptySet { index });
            }
            if let Some(point) = set.last().filter(|&p| p >= universe) {
                return Err(Error::PointOutOfUniverse { index, point, universe });
            }
            if let Some(&first) = seen.get(set) {
                return Err(Error::DuplicateSet { first, second: index });
            }
            seen.insert(set, index);
        }
        Ok(Self { sets, universe })
    }

    /// Strict constructor with the universe inferred as `1 + max point`.
    pub fn from_sets(sets: Vec<PointSet>) -> Result<Self> {
        let universe = sets.iter().filter_map(PointSet::last).max().map_or(0, |p| p + 1);
        Self::new(sets, universe)
    }

    /// Convenience constructor for literals; panics on invalid input.
    pub fn from_lists<I, S>(lists: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: IntoIterator<Item = Point>,
    {
        let sets = lists.into_iter().map(|s| s.into_iter().collect()).collect();
        Self::from_sets(sets).expect("invalid family literal")
    }

    /// Lenient constructor: later copies of a repeated set are dropped.
    /// Returns the family and the input positions that were merged away.
    pub fn merging_duplicates(sets: Vec<PointSet>, universe: u32) -> Result<(Self, Vec<usize>)> {
        let mut seen = HashSet::with_capacity(sets.len());
        let mut kept = Vec::with_capacity(sets.len());
        let mut dropped = Vec::new();
        for (i, set) in sets.into_iter().enumerate() {
            if seen.contains(&set) {
                dropped.push(i);
            } else {
                seen.insert(set.clone());
                kept.push(set);
            }
        }
        Ok((Self::new(kept, universe)?, dropped))
    }

    pub fn empty(universe: u32) -> Self {
        Self { sets: Vec::new(), universe }
    }

    /// Caller guarantees the members are distinct, nonempty and inside the
    /// universe.
    pub(crate) fn from_distinct(sets: Vec<PointSet>, universe: u32) -> Self {
        debug_assert!(Self::new(sets.clone(), universe).is_ok());
        Self { sets, universe }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn universe(&self) -> u32 {
        self.universe
    }

    pub fn sets(&self) -> &[PointSet] {
        &self.sets
    }

    pub fn get(&self, index: usize) -> Option<&PointSet> {
        self.sets.get(index)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, PointSet> {
        self.sets.iter()
    }

    pub fn position(&self, set: &PointSet) -> Option<usize> {
        self.sets.iter().position(|s| s == set)
    }

    pub fn contains_set(&self, set: &PointSet) -> bool {
        self.position(set).is_some()
    }

    /// Union of all members.
    pub fn covered_points(&self) -> PointSet {
        self.sets.iter().fold(PointSet::new(), |acc, s| acc.union(s))
    }

    pub fn max_member_size(&self) -> usize {
        self.sets.iter().map(PointSet::len).max().unwrap_or(0)
    }

    /// Number of members through `p`, i.e. `|G_p|`.
    pub fn degree(&self, p: Point) -> usize {
        self.sets.iter().filter(|s| s.contains(p)).count()
    }

    /// `F \ {A}` for the member at `index`; remaining members keep their order.
    pub fn without(&self, index: usize) -> SetFamily {
        let sets = self
            .sets
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != index)
            .map(|(_, s)| s.clone())
            .collect();
        Self { sets, universe: self.universe }
    }

    pub fn subfamily(&self, sub: &Subfamily) -> SetFamily {
        let sets = sub.indices.iter().map(|&i| self.sets[i].clone()).collect();
        Self { sets, universe: self.universe }
    }

    /// Members not listed in `removed`.
    pub fn complement(&self, removed: &Subfamily) -> SetFamily {
        let sets = self
            .sets
            .iter()
            .enumerate()
            .filter(|(i, _)| !removed.contains(*i))
            .map(|(_, s)| s.clone())
            .collect();
        Self { sets, universe: self.universe }
    }

    /// Family equality ignoring member order.
    pub fn same_sets(&self, other: &SetFamily) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let mine: HashSet<&PointSet> = self.sets.iter().collect();
        other.sets.iter().all(|s| mine.contains(s))
    }

    /// The members in canonical (lexicographic) order.
    pub fn canonical_sets(&self) -> Vec<PointSet> {
        let mut sets = self.sets.clone();
        sets.sort();
        sets
    }

    /// A stable 64-bit fingerprint of the family as a set of sets.
    pub fn fingerprint(&self) -> u64 {
        const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
        const PRIME: u64 = 0x0000_0100_0000_01b3;
        let mut h = OFFSET;
        let mut feed = |x: u64| {
            for byte in x.to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(PRIME);
            }
        };
        feed(self.universe as u64);
        for set in self.canonical_sets() {
            feed(set.len() as u64);
            for p in &set {
                feed(p as u64);
            }
        }
        h
    }
}

impl fmt::Display for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, s) in self.sets.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "}}")
    }
}

/// A set of member indices of some parent family, kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Subfamily {
    indices: Vec<usize>,
}

impl Subfamily {
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        Self { indices }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    pub fn is_subset(&self, other: &Subfamily) -> bool {
        self.indices.iter().all(|&i| other.contains(i))
    }

    /// Whether every index refers to a member of `family`.
    pub fn fits(&self, family: &SetFamily) -> bool {
        self.indices.last().map_or(true, |&i| i < family.len())
    }

    /// Intersection of the referenced members; `None` for the empty subfamily.
    pub fn intersection(&self, family: &SetFamily) -> Option<PointSet> {
        let mut it = self.indices.iter().map(|&i| &family.sets[i]);
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, s| acc.intersection(s)))
    }
}

/// A nonempty intersection of a nonempty subfamily, with one witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProperSet {
    pub points: PointSet,
    pub witness: Subfamily,
}

impl ProperSet {
    pub fn verify(&self, family: &SetFamily) -> bool {
        !self.points.is_empty()
            && self.witness.fits(family)
            && self.witness.intersection(family).as_ref() == Some(&self.points)
    }
}

/// All distinct nonempty pairwise intersections of distinct members, in
/// canonical order.
pub fn intersect_step(family: &SetFamily) -> SetFamily {
    let sets = family.sets();
    let mut out = HashSet::new();
    for (i, a) in sets.iter().enumerate() {
        for b in &sets[i + 1..] {
            let c = a.intersection(b);
            if !c.is_empty() {
                out.insert(c);
            }
        }
    }
    let mut out: Vec<PointSet> = out.into_iter().collect();
    out.sort();
    SetFamily::from_distinct(out, family.universe())
}

/// `F^k`.
pub fn iterate(family: &SetFamily, k: usize) -> SetFamily {
    let mut current = family.clone();
    for _ in 0..k {
        if current.is_empty() {
            break;
        }
        current = intersect_step(&current);
    }
    current
}

/// `F^0, F^1, ...` up to and including the first empty level.
///
/// Every member of `F^{k+1}` is strictly contained in some member of `F^k`,
/// so the maximal member size drops at each step and the sequence reaches
/// the empty family after at most `max |A| + 1` steps.
pub fn levels(family: &SetFamily) -> Vec<SetFamily> {
    let mut out = vec![family.clone()];
    while !out.last().unwrap().is_empty() {
        let next = intersect_step(out.last().unwrap());
        out.push(next);
    }
    out
}

/// `G_W`: indices of members containing `w`.
pub fn g_sets(family: &SetFamily, w: &PointSet) -> Result<Subfamily> {
    if w.is_empty() {
        return Err(Error::EmptyQuery);
    }
    Ok(Subfamily::new(
        family
            .iter()
            .enumerate()
            .filter(|(_, a)| w.is_subset(a))
            .map(|(i, _)| i)
            .collect(),
    ))
}

/// `G^k_W`, with indices referring to `iterate(family, k)`.
pub fn g_sets_k(family: &SetFamily, k: usize, w: &PointSet) -> Result<Subfamily> {
    g_sets(&iterate(family, k), w)
}

/// All proper sets, computed as the intersection closure of the members.
///
/// Members come first with themselves as witness; every other proper set is
/// reached by intersecting an already-known proper set with one more member,
/// so its witness is the parent's witness plus that member.
pub fn proper_sets(family: &SetFamily) -> Vec<ProperSet> {
    let mut found: BTreeMap<PointSet, Subfamily> = BTreeMap::new();
    let mut queue = VecDeque::new();
    for (i, a) in family.iter().enumerate() {
        found.insert(a.clone(), Subfamily::new(vec![i]));
        queue.push_back(a.clone());
    }
    while let Some(p) = queue.pop_front() {
        for (i, a) in family.iter().enumerate() {
            let c = p.intersection(a);
            if c.is_empty() || found.contains_key(&c) {
                continue;
            }
            let mut witness = found[&p].indices.clone();
            witness.push(i);
            found.insert(c.clone(), Subfamily::new(witness));
            queue.push_back(c);
        }
    }
    found
        .into_iter()
        .map(|(points, witness)| ProperSet { points, witness })
        .collect()
}

/// The minimal proper set containing `w`, if any: the intersection of all
/// members containing `w`.
pub fn minimal_proper_superset(family: &SetFamily, w: &PointSet) -> Result<Option<ProperSet>> {
    let witness = g_sets(family, w)?;
    Ok(witness
        .intersection(family)
        .map(|points| ProperSet { points, witness }))
}

/// Codimension of `w`: the largest `k` with `B ∈ F^{k-1}`, where `B` is the
/// minimal proper set containing `w`; 0 when no member contains `w`.
pub fn codim(family: &SetFamily, w: &PointSet) -> Result<usize> {
    let Some(b) = minimal_proper_superset(family, w)? else {
        return Ok(0);
    };
    Ok(levels(family)
        .iter()
        .rposition(|level| level.contains_set(&b.points))
        .map_or(0, |j| j + 1))
}

/// Length of the longest chain `B = B_k ⊂ B_{k-1} ⊂ ... ⊂ B_1` of proper sets.
pub fn codim_chain(family: &SetFamily, b: &PointSet) -> Result<usize> {
    let is_proper = matches!(
        minimal_proper_superset(family, b)?,
        Some(ref p) if p.points == *b
    );
    if !is_proper {
        return Err(Error::NotProper(b.to_string()));
    }
    let mut above: Vec<PointSet> = proper_sets(family)
        .into_iter()
        .map(|p| p.points)
        .filter(|p| b.is_subset(p))
        .collect();
    // Larger sets first, so every strict superset is scored before its subsets.
    above.sort_by(|x, y| y.len().cmp(&x.len()).then_with(|| x.cmp(y)));
    let mut depth: Vec<usize> = Vec::with_capacity(above.len());
    for (i, p) in above.iter().enumerate() {
        let d = (0..i)
            .filter(|&j| above[j].len() > p.len() && p.is_subset(&above[j]))
            .map(|j| depth[j])
            .max()
            .unwrap_or(0)
            + 1;
        depth.push(d);
    }
    Ok(above.iter().position(|p| p == b).map(|i| depth[i]).unwrap_or(0))
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn k_subsets(n: u32, k: usize) -> Vec<PointSet> {
    let n = n as usize;
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| i as Point).collect());
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
