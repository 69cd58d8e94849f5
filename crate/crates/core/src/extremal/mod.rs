//! Extremal families: the complete uniform construction, closed-form bounds
//! on Helly-Gallai numbers, the table of exactly known `b(d,m;t)` values and
//! a bounded exhaustive search for large families with the `[d,m]` and
//! `t` properties.
//!
//! `b(d,m;t)` is the largest size of a family with the `[d,m]` property and
//! the `t` property. All integer formulas use checked `u128` arithmetic.

mod search;

pub use search::{search_max_b, SearchCertificate, SearchParams};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{k_subsets, SetFamily};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Bounds {
    pub lower: u128,
    pub upper: u128,
}

pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step.
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// `1 + t + t^2 + ... + t^top`.
pub fn geometric_sum(t: u64, top: u64) -> Option<u128> {
    let mut sum: u128 = 0;
    let mut power: u128 = 1;
    for i in 0..=top {
        sum = sum.checked_add(power)?;
        if i < top {
            power = power.checked_mul(t as u128)?;
        }
    }
    Some(sum)
}

fn overflow(what: &str) -> Error {
    Error::Overflow(what.to_string())
}

/// Upper bound on `b(d,m;t)` valid for every parameter triple:
/// `sum_{i=0}^{d+m} t^i`.
pub fn b_upper_bound(d: u64, m: u64, t: u64) -> Result<u128> {
    geometric_sum(t, d + m).ok_or_else(|| overflow("the geometric upper bound"))
}

/// Bounds on `HG(t, QA^d_m)`: `C(d+m+t, d+m) <= HG <= sum_{i=0}^{d+m} t^i`.
/// At `t = 1` both sides equal `d + m + 1`.
pub fn helly_gallai_bounds(d: u64, m: u64, t: u64) -> Result<Bounds> {
    if t == 0 {
        return Err(Error::InvalidParameter("t must be at least 1".into()));
    }
    let lower = binomial(d + m + t, d + m).ok_or_else(|| overflow("the binomial lower bound"))?;
    let upper = b_upper_bound(d, m, t)?;
    Ok(Bounds { lower, upper })
}

/// The closed-form bounds on `HG(2, QA^d_1)`: `C(d+3, 2)` and
/// `max(2d^2 + 3, C(d+3, 2))`.
pub fn dimension_one_pair_formula(d: u64) -> Result<Bounds> {
    if d == 0 {
        return Err(Error::InvalidParameter("d must be at least 1".into()));
    }
    let lower = binomial(d + 3, 2).ok_or_else(|| overflow("C(d+3,2)"))?;
    let quad = (d as u128)
        .checked_mul(d as u128)
        .and_then(|x| x.checked_mul(2))
        .and_then(|x| x.checked_add(3))
        .ok_or_else(|| overflow("2d^2+3"))?;
    Ok(Bounds { lower, upper: quad.max(lower) })
}

/// Best known bounds on `HG(2, QA^d_1)`: the closed form, tightened to the
/// exact value `C(d+3, 2)` for `d <= 3`.
pub fn dimension_one_pair_bounds(d: u64) -> Result<Bounds> {
    let formula = dimension_one_pair_formula(d)?;
    Ok(if d <= 3 { Bounds { lower: formula.lower, upper: formula.lower } } else { formula })
}

/// Bounds on `HG(t, QA^1_1)` for linear families: `C(t+2, 2)` and
/// `max(t^2 - t + 3, C(t+2, 2))`.
pub fn linear_family_bounds(t: u64) -> Result<Bounds> {
    if t == 0 {
        return Err(Error::InvalidParameter("t must be at least 1".into()));
    }
    let lower = binomial(t + 2, 2).ok_or_else(|| overflow("C(t+2,2)"))?;
    let quad = (t as u128)
        .checked_mul(t as u128)
        .map(|x| x - t as u128 + 3)
        .ok_or_else(|| overflow("t^2-t+3"))?;
    Ok(Bounds { lower, upper: quad.max(lower) })
}

/// Minimum family size above which a linear family with the `(p,q)`
/// property is pierced by `p - q + 1` points:
/// `C(p-q+3, 2) * (C(p-q+2, 2) - 1) + p - q + 4`.
pub fn piercing_threshold(p: u64, q: u64) -> Result<u128> {
    if q < 3 || p < q {
        return Err(Error::InvalidParameter(format!("piercing threshold needs p >= q >= 3, got ({p},{q})")));
    }
    let r = p - q;
    let a = binomial(r + 3, 2).ok_or_else(|| overflow("C(p-q+3,2)"))?;
    let b = binomial(r + 2, 2).ok_or_else(|| overflow("C(p-q+2,2)"))? - 1;
    a.checked_mul(b)
        .and_then(|x| x.checked_add(r as u128 + 4))
        .ok_or_else(|| overflow("the piercing threshold"))
}

/// Threshold used by one inductive step at level `level` (a family with the
/// `(level, 3)` property): `C(level-1, 2) * (C(level-2, 2) - 1) + level`.
/// [`piercing_threshold`] at `(level, 3)` is the same expression one level up.
pub fn step_threshold(level: u64) -> u128 {
    if level < 3 {
        return 0;
    }
    let a = binomial(level - 1, 2).unwrap_or(u128::MAX);
    let b = binomial(level - 2, 2).unwrap_or(u128::MAX).saturating_sub(1);
    a.saturating_mul(b).saturating_add(level as u128)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct KnownB {
    pub value: u128,
    /// How the value was established.
    pub provenance: &'static str,
}

/// Exactly known values of `b(d,m;t)`.
pub fn known_b(d: u64, m: u64, t: u64) -> Option<KnownB> {
    let entry = |value: u128, provenance| Some(KnownB { value, provenance });
    match (d, m, t) {
        (_, _, 0) => None,
        (0, 1, t) => entry(t as u128 + 1, "pairwise disjoint members: F \\ {A} needs one point per set"),
        (d, 1, 1) => entry(d as u128 + 2, "t = 1: the d+3 single-point representations would share d+1 points"),
        (1, 1, 2) => entry(6, "linear families, t = 2: stabilizer case analysis"),
        (2, 1, 2) => entry(10, "t = 2, d = 2: price counting against the triple count"),
        (3, 1, 2) => entry(15, "t = 2, d = 3: price counting against the triple count"),
        (1, 1, 3) => entry(10, "linear families, t = 3: stabilizer case analysis"),
        (1, 1, 4) => entry(15, "linear families, t = 4: disjoint stabilizer triples and price counting"),
        _ => None,
    }
}

/// All `(d+m)`-subsets of `{0, ..., d+m+t-1}`.
///
/// The family has the `[d,m]` property, the `t` property and no
/// `t`-transversal; it has `C(d+m+t, t)` members.
pub fn critical_construction(d: usize, m: usize, t: usize) -> Result<SetFamily> {
    if d + m == 0 {
        return Err(Error::InvalidParameter("the construction needs d + m >= 1".into()));
    }
    if t == 0 {
        return Err(Error::InvalidParameter("t must be at least 1".into()));
    }
    let n = u32::try_from(d + m + t).map_err(|_| overflow("the ground set size"))?;
    SetFamily::new(k_subsets(n, d + m), n)
}
