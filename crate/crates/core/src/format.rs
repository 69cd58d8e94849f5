//! The QAF text format.
//!
//! ```text
//! # anything after '#' is a comment
//! universe 6
//! 0 1 2
//! 0 3
//! ```
//!
//! The optional `universe <n>` header must precede every set. Each other
//! nonblank line is one member, written as strictly ascending decimal point
//! ids separated by whitespace. Without a header the universe is one more
//! than the largest point.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::family::{Point, PointSet, SetFamily};

/// A parsed file. `merged_lines` lists lines whose set repeated an earlier
/// one and was dropped (only in merging mode).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedFamily {
    pub family: SetFamily,
    pub merged_lines: Vec<usize>,
}

pub fn parse_family(text: &str) -> Result<SetFamily> {
    parse_family_with(text, false).map(|p| p.family)
}

pub fn parse_family_with(text: &str, merge_duplicates: bool) -> Result<ParsedFamily> {
    let mut universe: Option<u32> = None;
    let mut sets: Vec<PointSet> = Vec::new();
    let mut first_line: HashMap<PointSet, usize> = HashMap::new();
    let mut merged_lines = Vec::new();
    for (number, raw) in text.lines().enumerate() {
        let line = number + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse { line, message };
        if let Some(rest) = content.strip_prefix("universe") {
            if universe.is_some() {
                return Err(err("repeated universe header".into()));
            }
            if !sets.is_empty() {
                return Err(err("universe header must precede all sets".into()));
            }
            let n = rest.trim().parse::<u32>().map_err(|_| err(format!("malformed universe header '{content}'")))?;
            universe = Some(n);
            continue;
        }
        let mut points: Vec<Point> = Vec::new();
        for token in content.split_whitespace() {
            let p = token.parse::<Point>().map_err(|_| err(format!("malformed point id '{token}'")))?;
            if points.last().is_some_and(|&last| last >= p) {
                return Err(err("points must be strictly ascending".into()));
            }
            points.push(p);
        }
        if let Some(n) = universe {
            if let Some(&p) = points.last().filter(|&&p| p >= n) {
                return Err(err(format!("point {p} is outside the universe 0..{n}")));
            }
        }
        let set: PointSet = points.into_iter().collect();
        if let Some(&earlier) = first_line.get(&set) {
            if merge_duplicates {
                merged_lines.push(line);
                continue;
            }
            return Err(err(format!("duplicate set at line {line} (first seen at line {earlier})")));
        }
        first_line.insert(set.clone(), line);
        sets.push(set);
    }
    let family = match universe {
        Some(n) => SetFamily::new(sets, n)?,
        None => SetFamily::from_sets(sets)?,
    };
    Ok(ParsedFamily { family, merged_lines })
}

/// Renders `family` with an explicit universe header, so that
/// `parse_family(render_family(F)) == F`.
pub fn render_family(family: &SetFamily) -> String {
    let mut out = format!("universe {}\n", family.universe());
    for set in family.iter() {
        let line: Vec<String> = set.iter().map(|p| p.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}
