//! Search results checked against plain enumeration without symmetry
//! reduction.

mod common;

use common::naive;
use perfdir::search::{run_search, run_search_with, Constraint, SearchOptions, SearchSpec};

/// Largest N over all ±1 weights on F_3² with support size `k`, by brute
/// force over every subset and sign pattern.
fn brute_best(k: usize, exclude_lines: bool) -> usize {
    let mut best = 0;
    for mask in 0u32..1 << 9 {
        if mask.count_ones() as usize != k {
            continue;
        }
        let pts: Vec<(u32, u32)> = (0..9)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| (i % 3, i / 3))
            .collect();
        if exclude_lines
            && k == 3
            && naive(3, &pts.iter().map(|&(x, y)| (x, y, 1)).collect::<Vec<_>>()).d() == 1
        {
            continue;
        }
        for signs in 0u32..1 << k {
            let entries: Vec<(u32, u32, i64)> = pts
                .iter()
                .enumerate()
                .map(|(j, &(x, y))| (x, y, if signs >> j & 1 == 1 { -1 } else { 1 }))
                .collect();
            best = best.max(naive(3, &entries).n());
        }
    }
    best
}

#[test]
fn p3_sign_weights_match_brute_force() {
    for k in 1..=9 {
        for exclude in [true, false] {
            let mut spec = SearchSpec::exhaustive(3, (k, k), &["-1", "1"], 10_000_000);
            spec.exclude_lines = exclude;
            let got = run_search(&spec).unwrap();
            assert!(got.exhaustive && got.witnesses_verified);
            assert_eq!(
                got.best_n,
                brute_best(k, exclude),
                "k = {k}, exclude = {exclude}"
            );
        }
    }
}

#[test]
fn p5_five_points_and_nonzero_average() {
    let r = run_search(&SearchSpec::exhaustive(5, (5, 5), &["1"], 10_000_000)).unwrap();
    assert_eq!(r.best_n, 2);
    assert!(r.exhaustive);
    let spec = SearchSpec::exhaustive(5, (4, 4), &["-1", "1", "2"], 10_000_000)
        .with_constraint(Constraint::NonzeroAverage);
    let r = run_search(&spec).unwrap();
    for w in &r.witnesses {
        assert_ne!(w.total_mass(), perfdir::weights::int(0));
    }
}

#[test]
fn spec_documents_parse_and_resume_gives_the_same_answer() {
    let spec: SearchSpec = serde_json::from_str(
        r#"{"p": 5, "supportSizes": {"min": 3, "max": 5}, "valueSet": ["1", "-1"],
            "constraint": "none", "budget": {"maxNodes": 1000000}, "mode": {"kind": "exhaustive"}}"#,
    )
    .unwrap();
    assert!(spec.exclude_lines);
    let full = run_search(&spec).unwrap();
    let half: std::collections::BTreeSet<String> =
        full.ranges_completed.iter().step_by(2).cloned().collect();
    let rest = run_search_with(
        &spec,
        &SearchOptions {
            completed: half.clone(),
            threads: Some(2),
        },
    )
    .unwrap();
    assert!(!rest.exhaustive);
    assert!(rest.best_n <= full.best_n);
    assert_eq!(rest.ranges_skipped, half.len());
    let mut union = half;
    union.extend(rest.ranges_completed.iter().cloned());
    let all: std::collections::BTreeSet<String> = full.ranges_completed.iter().cloned().collect();
    assert_eq!(union, all);
}

#[test]
fn bad_specs_are_rejected() {
    assert!(run_search(&SearchSpec::exhaustive(17, (1, 2), &["1"], 10)).is_err());
    assert!(run_search(&SearchSpec::exhaustive(5, (0, 2), &["1"], 10)).is_err());
    assert!(run_search(&SearchSpec::exhaustive(5, (1, 2), &["0"], 10)).is_err());
    assert!(serde_json::from_str::<SearchSpec>(r#"{"p": 5, "bogus": 1}"#).is_err());
}
