//! Command-line front end. Every command produces a [`Report`] that renders
//! as JSON or as flattened `key = value` text holding the same data.

use std::io::Read;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::analysis::{audit_lemmas, price, triple_count, Price};
use crate::error::{Error, Result};
use crate::extremal::{
    binomial, critical_construction, dimension_one_pair_bounds, dimension_one_pair_formula, geometric_sum, helly_gallai_bounds, known_b,
    linear_family_bounds, piercing_threshold, search_max_b, SearchParams,
};
use crate::family::SetFamily;
use crate::format::{parse_family_with, render_family};
use crate::piercing::pierce_pq;
use crate::properties::{check_brace, check_bracket, check_pq, find_representations, witness_confirms_failure, Check};
use crate::solver::{has_t_transversal, tau_exact, tau_greedy};

#[derive(Parser, Debug)]
#[command(name = "qaf", version, about = "Transversals of set families with bounded iterated intersections")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Recorded in the report; no command draws random numbers.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Adds wall-clock time to the report, which makes it non-reproducible.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TauMode {
    Exact,
    Greedy,
    Decision,
}

#[derive(Args, Debug)]
pub struct Input {
    /// QAF file, or '-' for standard input.
    pub file: PathBuf,
    /// Drop repeated sets instead of rejecting the file.
    #[arg(long)]
    pub merge_duplicates: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the [d,m], {d,m}, (p,q) and t properties.
    Props {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        t: Option<usize>,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        q: Option<usize>,
    },
    /// Transversal number.
    Tau {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = TauMode::Exact)]
        mode: TauMode,
        /// Size limit for the decision mode.
        #[arg(long)]
        t: Option<usize>,
    },
    /// Pierce a linear family with the (p,q) property by p-q+1 points.
    Pierce {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
    },
    /// All (d+m)-subsets of d+m+t points, with its verification.
    Construct {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        t: usize,
        /// Print the family in QAF format instead of a report.
        #[arg(long)]
        emit_qaf: bool,
    },
    /// Largest family with the [d,m] and t properties in a bounded scope.
    SearchB {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        smax: usize,
        #[arg(long, default_value_t = 50_000_000)]
        budget: u64,
    },
    /// Evaluate the structural inequalities on a family with representations.
    Audit {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        t: usize,
    },
    /// Closed-form bounds for the given parameters.
    Bounds {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        q: Option<usize>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub tool_version: String,
    pub params: Value,
    pub result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

/// What the process should print and its exit status.
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::Inconsistency(_) => 2,
        _ => 1,
    }
}

pub fn execute(cli: &Cli) -> Outcome {
    if let Some(n) = cli.threads {
        // Fails only if a pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    if let Command::Construct { d, m, t, emit_qaf: true } = cli.command {
        return match critical_construction(d, m, t) {
            Ok(f) => Outcome { stdout: render_family(&f), stderr: String::new(), code: 0 },
            Err(e) => Outcome { stdout: String::new(), stderr: format!("error: {e}\n"), code: exit_code(&e) },
        };
    }
    let start = Instant::now();
    match run(cli) {
        Ok(mut report) => {
            if cli.timing {
                report.elapsed_ms = Some(start.elapsed().as_secs_f64() * 1e3);
            }
            Outcome { stdout: render(&report, cli.format), stderr: String::new(), code: 0 }
        }
        Err(e) => Outcome { stdout: String::new(), stderr: format!("error: {e}\n"), code: exit_code(&e) },
    }
}

fn read_input(input: &Input) -> Result<(SetFamily, Vec<usize>)> {
    let text = if input.file.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Error::Precondition(format!("cannot read standard input: {e}")))?;
        s
    } else {
        std::fs::read_to_string(&input.file)
            .map_err(|e| Error::Precondition(format!("cannot read {}: {e}", input.file.display())))?
    };
    let parsed = parse_family_with(&text, input.merge_duplicates)?;
    Ok((parsed.family, parsed.merged_lines))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

fn input_params(input: &Input, family: &SetFamily, merged: &[usize]) -> Map<String, Value> {
    let mut params = Map::new();
    params.insert("file".into(), json!(input.file.display().to_string()));
    params.insert("members".into(), json!(family.len()));
    params.insert("universe".into(), json!(family.universe()));
    params.insert("fingerprint".into(), json!(format!("{:016x}", family.fingerprint())));
    if input.merge_duplicates {
        params.insert("merged_lines".into(), json!(merged));
    }
    params
}

pub fn run(cli: &Cli) -> Result<Report> {
    let (name, mut params, result) = match &cli.command {
        Command::Props { input, d, m, t, p, q } => {
            let (family, merged) = read_input(input)?;
            let mut params = input_params(input, &family, &merged);
            for (k, v) in [("d", d), ("m", m), ("t", t), ("p", p), ("q", q)] {
                if let Some(v) = v {
                    params.insert(k.into(), json!(v));
                }
            }
            ("props", params, props(&family, *d, *m, *t, *p, *q)?)
        }
        Command::Tau { input, mode, t } => {
            let (family, merged) = read_input(input)?;
            let mut params = input_params(input, &family, &merged);
            params.insert("mode".into(), to_value(mode));
            if let Some(t) = t {
                params.insert("t".into(), json!(t));
            }
            ("tau", params, tau(&family, *mode, *t)?)
        }
        Command::Pierce { input, p, q } => {
            let (family, merged) = read_input(input)?;
            let mut params = input_params(input, &family, &merged);
            params.insert("p".into(), json!(p));
            params.insert("q".into(), json!(q));
            let trace = pierce_pq(&family, *p, *q)?;
            let verified = trace.result.verify(&family) && trace.result.len() <= p - q + 1;
            let mut result = to_value(&trace);
            result["verified"] = json!(verified);
            ("pierce", params, result)
        }
        Command::Construct { d, m, t, .. } => {
            let params = [("d", *d), ("m", *m), ("t", *t)].into_iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
            ("construct", params, construct(*d, *m, *t)?)
        }
        Command::SearchB { d, m, t, n, smax, budget } => {
            let params = SearchParams { d: *d, m: *m, t: *t, n: *n, s_max: *smax, budget: *budget };
            let cert = search_max_b(params)?;
            let reps_ok = find_representations(&cert.best, *t).is_ok();
            let bracket_ok = check_bracket(&cert.best, *d, *m).is_holds();
            let mut result = to_value(&cert);
            result.as_object_mut().expect("certificate is an object").remove("params");
            result["verified"] = json!(reps_ok && bracket_ok);
            result["known_b"] = to_value(&known_b(*d as u64, *m as u64, *t as u64));
            let params = to_value(&params).as_object().cloned().expect("params are an object");
            ("search-b", params, result)
        }
        Command::Audit { input, d, m, t } => {
            let (family, merged) = read_input(input)?;
            let mut params = input_params(input, &family, &merged);
            for (k, v) in [("d", d), ("m", m), ("t", t)] {
                params.insert(k.into(), json!(v));
            }
            ("audit", params, audit(&family, *d, *m, *t)?)
        }
        Command::Bounds { d, m, t, p, q } => {
            let mut params: Map<String, Value> =
                [("d", *d), ("m", *m), ("t", *t)].into_iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
            if let Some(p) = p {
                params.insert("p".into(), json!(p));
            }
            if let Some(q) = q {
                params.insert("q".into(), json!(q));
            }
            ("bounds", params, bounds(*d as u64, *m as u64, *t as u64, *p, *q)?)
        }
    };
    if let Some(seed) = cli.seed {
        params.insert("seed".into(), json!(seed));
    }
    Ok(Report {
        command: name.into(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
        params: Value::Object(params),
        result,
        elapsed_ms: None,
    })
}

fn props(
    family: &SetFamily,
    d: Option<usize>,
    m: Option<usize>,
    t: Option<usize>,
    p: Option<usize>,
    q: Option<usize>,
) -> Result<Value> {
    let mut checks = Vec::new();
    let confirm = |report: &crate::properties::PropertyReport, check: Check| {
        let mut v = to_value(report);
        if !report.is_holds() {
            v["witness_verified"] = json!(witness_confirms_failure(family, report, &check));
        }
        v
    };
    match (d, m) {
        (Some(d), Some(m)) => {
            checks.push(confirm(&check_bracket(family, d, m), Check::Bracket { d, m }));
            if m >= 1 {
                checks.push(confirm(&check_brace(family, d, m)?, Check::Brace { d, m }));
            }
        }
        (None, None) => {}
        _ => return Err(Error::InvalidParameter("--d and --m must be given together".into())),
    }
    match (p, q) {
        (Some(p), Some(q)) => checks.push(confirm(&check_pq(family, p, q)?, Check::Pq { p, q })),
        (None, None) => {}
        _ => return Err(Error::InvalidParameter("--p and --q must be given together".into())),
    }
    if let Some(t) = t {
        match find_representations(family, t) {
            Ok(reps) => {
                let mut v = json!({
                    "property": format!("{t}-property"),
                    "verdict": "holds",
                    "detail": format!("every member has a representation of size <= {t}"),
                    "representations": reps.entries,
                });
                v["witness_verified"] = json!(reps.validate(family).is_ok());
                checks.push(v);
            }
            Err(report) => checks.push(confirm(&report, Check::TProperty { t })),
        }
    }
    if checks.is_empty() {
        return Err(Error::InvalidParameter("nothing to check: give --d/--m, --p/--q or --t".into()));
    }
    Ok(json!({ "checks": checks }))
}

fn tau(family: &SetFamily, mode: TauMode, t: Option<usize>) -> Result<Value> {
    Ok(match mode {
        TauMode::Exact => {
            let r = tau_exact(family)?;
            json!({
                "tau": r.tau,
                "witness": r.witness.points,
                "nodes_explored": r.nodes_explored,
                "verified": r.witness.verify(family),
            })
        }
        TauMode::Greedy => {
            let x = tau_greedy(family);
            json!({ "size": x.len(), "witness": x.points, "verified": x.verify(family) })
        }
        TauMode::Decision => {
            let t = t.ok_or_else(|| Error::InvalidParameter("decision mode needs --t".into()))?;
            match has_t_transversal(family, t)? {
                Some(x) => json!({ "t": t, "found": true, "witness": x.points, "verified": x.verify(family) }),
                None => json!({ "t": t, "found": false }),
            }
        }
    })
}

fn construct(d: usize, m: usize, t: usize) -> Result<Value> {
    let family = critical_construction(d, m, t)?;
    let expected = binomial((d + m + t) as u64, t as u64).ok_or_else(|| Error::Overflow("C(d+m+t,t)".into()))?;
    let bracket = check_bracket(&family, d, m).is_holds();
    let reps = find_representations(&family, t);
    let no_transversal = has_t_transversal(&family, t)?.is_none();
    Ok(json!({
        "family": family.sets(),
        "universe": family.universe(),
        "verification": {
            "size": family.len(),
            "expected_size": expected,
            "bracket_holds": bracket,
            "representations_total": reps.is_ok(),
            "has_t_transversal": !no_transversal,
        },
        "representations": reps.ok().map(|r| r.entries),
    }))
}

fn audit(family: &SetFamily, d: usize, m: usize, t: usize) -> Result<Value> {
    let reps = find_representations(family, t)
        .map_err(|r| Error::Precondition(format!("family lacks the {t}-property: {}", r.detail)))?;
    let report = audit_lemmas(family, d, m, t, &reps)?;
    let triples = triple_count(family, &reps);
    let mut total_price = Price::from_integer(0);
    for a in 0..family.len() {
        total_price += price(family, &reps, a)?;
    }
    let price_matches = total_price == Price::from_integer(triples.covered as i64);
    Ok(json!({
        "passed": report.passed(),
        "failures": report.failures().len(),
        "entries": report.entries,
        "triples": triples,
        "price_sum": total_price.to_string(),
        "price_sum_matches_covered_triples": price_matches,
        "representations": reps.entries,
    }))
}

fn bounds(d: u64, m: u64, t: u64, p: Option<usize>, q: Option<usize>) -> Result<Value> {
    if t == 0 {
        return Err(Error::InvalidParameter("t must be at least 1".into()));
    }
    let lower = binomial(d + m + t, t).ok_or_else(|| Error::Overflow("C(d+m+t,t)".into()))?;
    let upper = geometric_sum(t, d + m).ok_or_else(|| Error::Overflow("the geometric upper bound".into()))?;
    let mut out = json!({
        "b": { "lower": lower, "upper": upper, "known": known_b(d, m, t) },
        "helly_gallai": helly_gallai_bounds(d, m, t)?,
    });
    if m == 1 && t == 2 && d >= 1 {
        out["helly_gallai_dimension_one_t2"] = to_value(&dimension_one_pair_bounds(d)?);
        out["helly_gallai_dimension_one_t2_formula"] = to_value(&dimension_one_pair_formula(d)?);
    }
    if d == 1 && m == 1 {
        out["helly_gallai_linear"] = to_value(&linear_family_bounds(t)?);
    }
    match (p, q) {
        (Some(p), Some(q)) => {
            out["piercing"] = json!({
                "threshold": piercing_threshold(p as u64, q as u64)?,
                "points": p - q + 1,
            });
        }
        (None, None) => {}
        _ => return Err(Error::InvalidParameter("--p and --q must be given together".into())),
    }
    Ok(out)
}

/// Renders a report; text mode lists every leaf of the JSON value as
/// `path = value`.
pub fn render(report: &Report, format: Format) -> String {
    let value = to_value(report);
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&value).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut out = String::new();
            flatten("", &value, &mut out);
            out
        }
    }
}

fn flatten(path: &str, value: &Value, out: &mut String) {
    let scalar_array = |items: &[Value]| items.iter().all(|v| !v.is_object() && !v.is_array());
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let child = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                flatten(&child, v, out);
            }
        }
        Value::Array(items) if !scalar_array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&format!("{path}[{i}]"), v, out);
            }
        }
        Value::String(s) => out.push_str(&format!("{path} = {s}\n")),
        other => out.push_str(&format!("{path} = {other}\n")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("qaf").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn construct_report() {
        let report = run(&parse(&["construct", "--d", "1", "--m", "1", "--t", "2"])).unwrap();
        assert_eq!(report.result["verification"]["size"], json!(6));
        assert_eq!(report.result["verification"]["has_t_transversal"], json!(false));
        assert_eq!(report.result["verification"]["representations_total"], json!(true));
    }

    #[test]
    fn bounds_report() {
        let report = run(&parse(&["bounds", "--d", "0", "--m", "1", "--t", "5"])).unwrap();
        assert_eq!(report.result["b"]["lower"], json!(6));
        assert_eq!(report.result["b"]["upper"], json!(6));
        assert_eq!(report.result["b"]["known"]["value"], json!(6));
    }

    #[test]
    fn text_rendering_flattens() {
        let report = run(&parse(&["bounds", "--d", "1", "--m", "1", "--t", "2", "--p", "4", "--q", "3"])).unwrap();
        let text = render(&report, Format::Text);
        assert!(text.contains("command = bounds\n"));
        assert!(text.contains("result.piercing.threshold = 17\n"));
        assert!(text.contains("result.b.lower = 6\n"));
    }

    #[test]
    fn error_codes() {
        assert_eq!(exit_code(&Error::Inconsistency("x".into())), 2);
        assert_eq!(exit_code(&Error::Precondition("x".into())), 1);
        assert!(run(&parse(&["bounds", "--d", "1", "--m", "1", "--t", "0"])).is_err());
    }
}
