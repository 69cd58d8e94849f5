//! The pruned search must agree with plain enumeration of every subfamily
//! of the candidate sets.

use qaf::extremal::{search_max_b, SearchParams};
use qaf::family::{k_subsets, PointSet, SetFamily};
use qaf::properties::{check_bracket, find_representations};

fn brute_force_max(d: usize, m: usize, t: usize, n: u32, s_max: usize) -> usize {
    let candidates: Vec<PointSet> = (1..=s_max).flat_map(|k| k_subsets(n, k)).collect();
    assert!(candidates.len() <= 20);
    let mut best = 0;
    for mask in 0u32..(1 << candidates.len()) {
        let size = mask.count_ones() as usize;
        if size <= best {
            continue;
        }
        let sets: Vec<PointSet> = (0..candidates.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| candidates[i].clone())
            .collect();
        let f = SetFamily::new(sets, n).unwrap();
        if check_bracket(&f, d, m).is_holds() && find_representations(&f, t).is_ok() {
            best = size;
        }
    }
    best
}

#[test]
fn pruned_search_matches_plain_enumeration() {
    let scopes = [(4, 2), (4, 3), (5, 2)];
    for (n, s_max) in scopes {
        for d in 0..=2 {
            for m in 1..=2 {
                for t in 1..=3 {
                    let cert = search_max_b(SearchParams { d, m, t, n, s_max, budget: u64::MAX }).unwrap();
                    assert!(cert.exhaustive);
                    let expected = brute_force_max(d, m, t, n, s_max);
                    assert_eq!(cert.best_size, expected, "d={d} m={m} t={t} n={n} s_max={s_max}");
                    assert!(check_bracket(&cert.best, d, m).is_holds());
                    assert!(find_representations(&cert.best, t).is_ok());
                }
            }
        }
    }
}
