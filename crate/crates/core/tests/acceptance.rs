//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use qaf::analysis::{audit_lemmas, price, triples_covered, triples_total, AuditVerdict};
use qaf::error::Error;
use qaf::extremal::{
    binomial, critical_construction, dimension_one_pair_bounds, helly_gallai_bounds, piercing_threshold, search_max_b,
    Bounds, SearchParams,
};
use qaf::family::{codim, codim_chain, proper_sets, SetFamily};
use qaf::format::render_family;
use qaf::piercing::pierce_pq;
use qaf::properties::{check_bracket, check_pq, find_representations};
use qaf::solver::{brute_force_tau, has_t_transversal, hits_all, tau_exact};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let spent = start.elapsed();
    ensure(spent < limit, || format!("{what} took {spent:?}, limit {limit:?}"))
}

/// Complete uniform constructions have the claimed size and properties.
fn construction_suite() -> Outcome {
    let start = Instant::now();
    let mut count = 0;
    for dm in 1..=3usize {
        for m in 0..=dm {
            let d = dm - m;
            for t in 1..=4usize {
                let f = critical_construction(d, m, t).map_err(|e| e.to_string())?;
                let expected = binomial((d + m + t) as u64, t as u64).unwrap() as usize;
                let tag = format!("(d,m,t) = ({d},{m},{t})");
                ensure(f.len() == expected, || format!("{tag}: {} members, expected {expected}", f.len()))?;
                ensure(check_bracket(&f, d, m).is_holds(), || format!("{tag}: bracket fails"))?;
                let reps = find_representations(&f, t).map_err(|r| format!("{tag}: {}", r.detail))?;
                ensure(reps.validate(&f).is_ok(), || format!("{tag}: invalid representations"))?;
                ensure(has_t_transversal(&f, t).unwrap().is_none(), || format!("{tag}: has a {t}-transversal"))?;
                count += 1;
            }
        }
    }
    within(start, Duration::from_secs(5), "construction suite")?;
    Ok(format!("{count} constructions in {:?}", start.elapsed()))
}

fn run_search(d: usize, m: usize, t: usize, n: u32, s_max: usize) -> Result<qaf::extremal::SearchCertificate, String> {
    search_max_b(SearchParams { d, m, t, n, s_max, budget: u64::MAX }).map_err(|e| e.to_string())
}

/// The search reproduces the exactly known extremal sizes.
fn exact_values() -> Outcome {
    let mut cases: Vec<(usize, usize, usize, u32, usize, usize)> = vec![
        (1, 1, 2, 4, 2, 6),
        (2, 1, 2, 5, 3, 10),
        (3, 1, 2, 6, 4, 15),
        (1, 1, 3, 5, 2, 10),
        (1, 1, 4, 6, 2, 15),
    ];
    for t in 1..=5 {
        cases.push((0, 1, t, t as u32 + 3, 2, t + 1));
    }
    for d in 0..=4 {
        cases.push((d, 1, 1, d as u32 + 3, d + 1, d + 2));
    }
    let mut slowest = Duration::ZERO;
    for &(d, m, t, n, s_max, expected) in &cases {
        let start = Instant::now();
        let cert = run_search(d, m, t, n, s_max)?;
        let tag = format!("(d,m,t) = ({d},{m},{t}), n = {n}, s_max = {s_max}");
        within(start, Duration::from_secs(60), &tag)?;
        slowest = slowest.max(start.elapsed());
        ensure(cert.best_size == expected, || format!("{tag}: best {} != {expected}", cert.best_size))?;
        ensure(check_bracket(&cert.best, d, m).is_holds(), || format!("{tag}: best family fails the bracket"))?;
        ensure(find_representations(&cert.best, t).is_ok(), || format!("{tag}: best family lacks the {t}-property"))?;
    }
    Ok(format!("{} parameter sets, slowest {slowest:?}", cases.len()))
}

/// Exhaustive search finds nothing larger than the known maxima.
fn bounded_upper() -> Outcome {
    let mut cases = vec![(1usize, 1usize, 2usize, 6u32, 3usize, 6usize)];
    for t in 1..=4 {
        cases.push((0, 1, t, 8, 2, t + 1));
    }
    let mut nodes = 0;
    for (d, m, t, n, s_max, b) in cases {
        let start = Instant::now();
        let cert = run_search(d, m, t, n, s_max)?;
        let tag = format!("(d,m,t) = ({d},{m},{t}), n = {n}, s_max = {s_max}");
        within(start, Duration::from_secs(600), &tag)?;
        ensure(cert.exhaustive, || format!("{tag}: search not exhaustive"))?;
        ensure(cert.best_size == b, || format!("{tag}: found {} members, expected at most {b}", cert.best_size))?;
        nodes += cert.nodes;
    }
    Ok(format!("no family of size b + 1 in any scope, {nodes} nodes"))
}

fn counting_identities() -> Outcome {
    let mut rng = common::rng(0x5eed_0004);
    let mut nontrivial = 0;
    for i in 0..200 {
        let f = common::random_antichain(&mut rng, 10, 8);
        let (_, reps) = common::least_t(&f).ok_or_else(|| format!("family {i}: no representations"))?;
        let total: Ratio<i64> = (0..f.len()).map(|a| price(&f, &reps, a).unwrap()).sum();
        let covered = triples_covered(&f, &reps);
        ensure(total == Ratio::from_integer(covered as i64), || format!("family {i}: price sum {total} != {covered}"))?;
        let by_points: u64 = f
            .covered_points()
            .iter()
            .map(|x| {
                let g = f.iter().filter(|a| a.contains(x)).count() as u64;
                g * g.saturating_sub(1) / 2
            })
            .sum();
        ensure(triples_total(&f) == by_points, || format!("family {i}: triple totals differ"))?;
        if covered > 0 {
            nontrivial += 1;
        }
    }
    Ok(format!("200 families, {nontrivial} with covered triples"))
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = common::rng(0x5eed_0005);
    for i in 0..500 {
        let f = common::random_family(&mut rng, 12, 10);
        let exact = tau_exact(&f).map_err(|e| e.to_string())?;
        let brute = brute_force_tau(&f, 12);
        ensure(Some(exact.tau) == brute, || format!("family {i}: exact {} vs brute force {brute:?}", exact.tau))?;
        ensure(exact.witness.verify(&f), || format!("family {i}: witness does not verify"))?;
    }
    within(start, Duration::from_secs(120), "oracle equivalence")?;
    Ok(format!("500 families in {:?}", start.elapsed()))
}

fn codimension() -> Outcome {
    let mut rng = common::rng(0x5eed_0006);
    let mut sets = 0;
    for i in 0..200 {
        let f = common::random_family(&mut rng, 10, 8);
        for p in proper_sets(&f) {
            let a = codim(&f, &p.points).map_err(|e| e.to_string())?;
            let b = codim_chain(&f, &p.points).map_err(|e| e.to_string())?;
            ensure(a == b, || format!("family {i}: codim of {} is {a} by levels, {b} by chains", p.points))?;
            sets += 1;
        }
    }
    Ok(format!("{sets} proper sets across 200 families"))
}

fn piercing() -> Outcome {
    let mut rng = common::rng(0x5eed_0007);
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut fallbacks = 0;
    let mut produced = BTreeMap::new();
    for i in 0..50 {
        let (p, pencils, extras) = match i % 4 {
            0 => (3, 1, 0),
            1 => (4, 1, 1),
            2 => (5, 2, 0),
            _ => (5, 1, 2),
        };
        let threshold = piercing_threshold(p as u64, 3).unwrap() as usize;
        let size = threshold + i % 7;
        let f = common::pencil_family(&mut rng, p, pencils, extras, size);
        let tag = format!("instance {i} (p = {p})");
        ensure(check_bracket(&f, 1, 1).is_holds(), || format!("{tag}: not linear"))?;
        ensure(check_pq(&f, p, 3).unwrap().is_holds(), || format!("{tag}: lacks the ({p},3) property"))?;
        ensure(f.len() >= threshold, || format!("{tag}: below threshold"))?;
        let trace = match pierce_pq(&f, p, 3) {
            Ok(t) => t,
            Err(e @ Error::Inconsistency(_)) => return Err(format!("{tag}: inconsistency: {e}")),
            Err(e) => return Err(format!("{tag}: {e}")),
        };
        let x = &trace.result.points;
        ensure(hits_all(&f, x) && trace.result.verify(&f), || format!("{tag}: result does not pierce"))?;
        ensure(x.len() <= p - 2, || format!("{tag}: {} points > p - 2", x.len()))?;
        let tau = tau_exact(&f).map_err(|e| e.to_string())?.tau;
        ensure(tau <= x.len(), || format!("{tag}: tau {tau} exceeds the result size"))?;
        fallbacks += trace.fallbacks.len();
        *produced.entry(p).or_insert(0) += 1;

        let path = dir.path().join(format!("f{i}.qaf"));
        std::fs::write(&path, render_family(&f)).map_err(|e| e.to_string())?;
        let out = Command::new(env!("CARGO_BIN_EXE_qaf"))
            .args(["pierce", path.to_str().unwrap(), "--p", &p.to_string(), "--q", "3"])
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.code() == Some(0), || format!("{tag}: CLI exit code {:?}", out.status.code()))?;
    }
    Ok(format!("instances per p {produced:?}, {fallbacks} solver fallbacks, all CLI runs exited 0"))
}

fn bound_tables() -> Outcome {
    for dm in 0..=10u64 {
        for m in 0..=dm {
            let b = helly_gallai_bounds(dm - m, m, 1).map_err(|e| e.to_string())?;
            ensure(b == Bounds { lower: dm as u128 + 1, upper: dm as u128 + 1 }, || {
                format!("t = 1, d + m = {dm}: {b:?}")
            })?;
        }
    }
    for d in 1..=3u64 {
        let c = binomial(d + 3, 2).unwrap();
        let b = dimension_one_pair_bounds(d).map_err(|e| e.to_string())?;
        ensure(b == Bounds { lower: c, upper: c }, || format!("d = {d}: {b:?}, expected ({c}, {c})"))?;
    }
    Ok("t = 1 tables collapse for d + m <= 10; dimension-one t = 2 bounds exact for d <= 3".into())
}

fn audit_corpus() -> Outcome {
    let mut families: Vec<SetFamily> = Vec::new();
    let mut rng = common::rng(0x5eed_0009);
    for _ in 0..300 {
        families.push(common::random_antichain(&mut rng, 10, 8));
    }
    for _ in 0..100 {
        families.push(common::random_antichain(&mut rng, 6, 12));
    }
    let mut runs = 0;
    let mut verdicts: BTreeMap<&'static str, [usize; 3]> = BTreeMap::new();
    let mut record = |report: &qaf::analysis::AuditReport| {
        for e in &report.entries {
            let slot = match e.verdict {
                AuditVerdict::Pass => 0,
                AuditVerdict::Fail => 1,
                AuditVerdict::Skipped => 2,
            };
            verdicts.entry(e.check).or_default()[slot] += 1;
        }
    };
    let mut audit = |f: &SetFamily, d: usize, m: usize, t: usize| -> Result<(), String> {
        let Ok(reps) = find_representations(f, t) else {
            return Ok(());
        };
        let report = audit_lemmas(f, d, m, t, &reps).map_err(|e| e.to_string())?;
        record(&report);
        runs += 1;
        match report.failures().first() {
            Some(e) => Err(format!("{} failed on d = {d}, m = {m}, t = {t}: {}\n{}", e.check, e.detail, render_family(f))),
            None => Ok(()),
        }
    };
    for f in &families {
        let Some((t0, _)) = common::least_t(f) else { continue };
        for m in 1..=3 {
            let d = common::least_d(f, m);
            for t in [t0, t0 + 1] {
                audit(f, d, m, t)?;
            }
        }
    }
    for dm in 1..=3usize {
        for m in 0..=dm {
            for t in 1..=4 {
                audit(&critical_construction(dm - m, m, t).unwrap(), dm - m, m, t)?;
            }
        }
    }
    for (d, m, t, n, s_max) in [(1, 1, 2, 6, 3), (2, 1, 2, 5, 3), (1, 1, 3, 5, 2), (0, 2, 2, 5, 3)] {
        let cert = run_search(d, m, t, n, s_max)?;
        audit(&cert.best, d, m, t)?;
    }
    let summary: Vec<String> =
        verdicts.iter().map(|(k, [p, f, s])| format!("{k} {p}/{f}/{s}")).collect();
    Ok(format!("{runs} audits, zero failures (pass/fail/skip: {})", summary.join(", ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("construction suite", construction_suite),
        ("exact extremal values", exact_values),
        ("bounded upper-bound confirmation", bounded_upper),
        ("counting identities", counting_identities),
        ("transversal oracle equivalence", oracle_equivalence),
        ("codimension equivalence", codimension),
        ("piercing end to end", piercing),
        ("bound formula tables", bound_tables),
        ("structural audit", audit_corpus),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        match check() {
            Ok(detail) => println!("criterion {} [{name}]: PASS ({detail}; {:?})", i + 1, start.elapsed()),
            Err(why) => {
                failed += 1;
                println!("criterion {} [{name}]: FAIL ({why})", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
