//! Extremal search: the largest number of perfect directions over a family
//! of weight functions with a prescribed support size and values drawn from
//! a finite set.
//!
//! Exhaustive mode enumerates one support per affine orbit, grown level by
//! level (every (k+1)-set is a k-set plus a point, so extending one
//! representative of each k-orbit in every possible way reaches every
//! (k+1)-orbit), then tries every value assignment on each support.
//! Randomized mode samples supports and values from a seeded generator.
//!
//! Work is cut into ranges of supports. Ranges share nothing, and their
//! results are merged by taking the larger count and, on ties, the union of
//! the least witnesses, so any degree of parallelism gives the same result.

mod canonical;

use std::collections::{BTreeSet, HashSet};
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use canonical::{
    affine_canonical, form_of, index_of, point_of, weight_of, Canonicalizer, Form, GroupTable,
    FULL_GROUP_MAX_P,
};

use crate::analysis::{perfect_count, verify_main_theorem, TheoremVerdict};
use crate::error::{Error, Result};
use crate::plane::{enumerate_directions, PrimeModulus};
use crate::weights::{format_rational, parse_rational, Rational, WeightDoc, WeightFunction};

pub const MAX_EXHAUSTIVE_P: u32 = 13;
pub const MAX_RANDOMIZED_P: u32 = 31;
pub const DEFAULT_WITNESS_CAP: usize = 16;
/// Supports per range in exhaustive mode.
const RANGE_SUPPORTS: usize = 4;
/// Samples per range in randomized mode.
const RANGE_SAMPLES: u64 = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "camelCase")]
pub enum Constraint {
    #[default]
    None,
    NonzeroAverage,
    NonnegativeValues,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum SearchMode {
    Exhaustive,
    Randomized { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Budget {
    /// Weight functions to evaluate (samples in randomized mode).
    pub max_nodes: u64,
    /// Wall-clock limit. Runs cut short by it are not reproducible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_seconds: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeRange {
    pub min: usize,
    pub max: usize,
}

fn default_true() -> bool {
    true
}

fn default_cap() -> usize {
    DEFAULT_WITNESS_CAP
}

/// What to search. Values are `"num/den"` strings or integers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SearchSpec {
    pub p: u64,
    pub support_sizes: SizeRange,
    pub value_set: Vec<String>,
    #[serde(default)]
    pub constraint: Constraint,
    pub budget: Budget,
    pub mode: SearchMode,
    /// Skip supports that are a whole line (the trivial case with p
    /// perfect directions).
    #[serde(default = "default_true")]
    pub exclude_lines: bool,
    #[serde(default = "default_cap")]
    pub witness_cap: usize,
}

impl SearchSpec {
    pub fn exhaustive(p: u64, sizes: (usize, usize), values: &[&str], max_nodes: u64) -> Self {
        SearchSpec {
            p,
            support_sizes: SizeRange {
                min: sizes.0,
                max: sizes.1,
            },
            value_set: values.iter().map(|s| s.to_string()).collect(),
            constraint: Constraint::None,
            budget: Budget {
                max_nodes,
                max_seconds: None,
            },
            mode: SearchMode::Exhaustive,
            exclude_lines: true,
            witness_cap: DEFAULT_WITNESS_CAP,
        }
    }

    pub fn with_constraint(mut self, c: Constraint) -> Self {
        self.constraint = c;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub best_n: usize,
    /// Canonical witnesses attaining `best_n`, least first, at most the cap.
    pub witnesses: Vec<WeightFunction>,
    /// Distinct canonical witnesses found (may exceed `witnesses.len()`).
    pub witness_count: u64,
    pub nodes_explored: u64,
    pub exhaustive: bool,
    /// Every witness re-checked by the analysis module.
    pub witnesses_verified: bool,
    pub ranges_completed: Vec<String>,
    pub ranges_skipped: usize,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchResultDoc {
    #[serde(rename = "bestN")]
    pub best_n: usize,
    pub witnesses: Vec<WeightDoc>,
    pub witness_count: u64,
    pub nodes_explored: u64,
    pub exhaustive: bool,
    pub witnesses_verified: bool,
    pub ranges_completed: Vec<String>,
    pub ranges_skipped: usize,
    pub note: String,
}

impl SearchResult {
    pub fn to_doc(&self) -> SearchResultDoc {
        SearchResultDoc {
            best_n: self.best_n,
            witnesses: self.witnesses.iter().map(WeightFunction::to_doc).collect(),
            witness_count: self.witness_count,
            nodes_explored: self.nodes_explored,
            exhaustive: self.exhaustive,
            witnesses_verified: self.witnesses_verified,
            ranges_completed: self.ranges_completed.clone(),
            ranges_skipped: self.ranges_skipped,
            note: self.note.clone(),
        }
    }
}

/// Run-time knobs that do not change the result.
#[derive(Debug, Clone, Default)]
pub struct SearchOptions {
    /// Ranges finished by an earlier run; they are skipped.
    pub completed: BTreeSet<String>,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

/// Value set scaled to integers with a common positive factor, sorted.
struct ScaledValues {
    exact: Vec<Rational>,
    ints: Vec<i64>,
}

impl ScaledValues {
    fn new(p: PrimeModulus, raw: &[String], constraint: Constraint) -> Result<Self> {
        let mut exact = raw
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()?;
        if exact.iter().any(Zero::is_zero) {
            return Err(Error::InfeasibleSearch("value set contains 0".into()));
        }
        if constraint == Constraint::NonnegativeValues {
            exact.retain(|v| v.is_positive());
        }
        exact.sort();
        exact.dedup();
        if exact.is_empty() {
            return Err(Error::InfeasibleSearch("value set is empty".into()));
        }
        let lcm = exact
            .iter()
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let limit = i64::MAX / (4 * i64::from(p.get()).pow(2));
        let ints = exact
            .iter()
            .map(|v| {
                (v * Rational::from_integer(lcm.clone()))
                    .to_integer()
                    .to_i64()
                    .filter(|n| n.abs() <= limit)
                    .ok_or_else(|| Error::InfeasibleSearch("value set too large".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ScaledValues { exact, ints })
    }
}

/// Line offsets for every (direction, point index) pair.
struct OffsetTable {
    p: usize,
    /// `table[d·p² + i]` is the offset of point `i` in direction `d`.
    table: Vec<u16>,
}

impl OffsetTable {
    fn new(p: PrimeModulus) -> Self {
        let n = p.get() as usize;
        let mut table = Vec::with_capacity((n + 1) * n * n);
        for d in enumerate_directions(p) {
            for i in 0..(n * n) as u16 {
                table.push(d.offset_of(p, point_of(p, i)) as u16);
            }
        }
        OffsetTable { p: n, table }
    }

    /// Perfect directions of the integer weight `values` on `points`.
    fn perfect_count(&self, points: &[u16], values: &[i64], sums: &mut Vec<i64>) -> usize {
        let n = self.p;
        let mass: i64 = values.iter().sum();
        let mut count = 0;
        for d in 0..=n {
            let row = &self.table[d * n * n..(d + 1) * n * n];
            sums.clear();
            sums.resize(n, 0);
            for (&i, &v) in points.iter().zip(values) {
                sums[row[i as usize] as usize] += v;
            }
            if sums.iter().all(|&s| s * n as i64 == mass) {
                count += 1;
            }
        }
        count
    }

    fn is_line(&self, points: &[u16]) -> bool {
        let n = self.p;
        if points.len() != n {
            return false;
        }
        (0..=n).any(|d| {
            let row = &self.table[d * n * n..(d + 1) * n * n];
            let first = row[points[0] as usize];
            points.iter().all(|&i| row[i as usize] == first)
        })
    }
}

/// Result of one range (or of a merge of several).
#[derive(Debug, Clone, Default)]
struct Partial {
    best_n: Option<usize>,
    /// Least `cap` canonical witnesses, values as indices into the sorted
    /// value set.
    witnesses: BTreeSet<Form<u8>>,
    count: u64,
    nodes: u64,
}

impl Partial {
    fn merge(mut self, other: Partial, cap: usize) -> Partial {
        self.nodes += other.nodes;
        match (self.best_n, other.best_n) {
            (_, None) => self,
            (None, Some(_)) => Partial {
                nodes: self.nodes,
                ..other
            },
            (Some(a), Some(b)) if b > a => Partial {
                nodes: self.nodes,
                ..other
            },
            (Some(a), Some(b)) if b < a => self,
            _ => {
                self.count += other.count;
                self.witnesses.extend(other.witnesses);
                while self.witnesses.len() > cap {
                    self.witnesses.pop_last();
                }
                self
            }
        }
    }
}

/// Collects witnesses for one range, deduplicating exactly within it.
struct RangeAccumulator {
    best: Option<usize>,
    seen: HashSet<Form<u8>>,
    nodes: u64,
}

impl RangeAccumulator {
    fn new() -> Self {
        RangeAccumulator {
            best: None,
            seen: HashSet::new(),
            nodes: 0,
        }
    }

    fn offer(&mut self, n: usize, form: impl FnOnce() -> Form<u8>) {
        match self.best {
            Some(b) if n < b => {}
            Some(b) if n == b => {
                self.seen.insert(form());
            }
            _ => {
                self.best = Some(n);
                self.seen.clear();
                self.seen.insert(form());
            }
        }
    }

    fn finish(self, cap: usize) -> Partial {
        let count = self.seen.len() as u64;
        let mut all: Vec<Form<u8>> = self.seen.into_iter().collect();
        all.sort_unstable();
        all.truncate(cap);
        Partial {
            best_n: self.best,
            witnesses: all.into_iter().collect(),
            count,
            nodes: self.nodes,
        }
    }
}

/// One representative support per affine orbit, for sizes `1..=max`.
/// Returns `None` when more than `limit` canonicalizations would be needed.
pub fn canonical_supports(p: PrimeModulus, max: usize, limit: u64) -> Option<Vec<Vec<Vec<u16>>>> {
    let canon = Canonicalizer::new(p);
    let n = (p.get() * p.get()) as u16;
    let unit = |pts: Vec<u16>| Form {
        values: vec![(); pts.len()],
        points: pts,
    };
    let mut levels: Vec<Vec<Vec<u16>>> = vec![vec![Vec::new()]];
    let mut work = 0u64;
    for k in 1..=max.min(n as usize) {
        let prev = &levels[k - 1];
        work += prev.len() as u64 * u64::from(n);
        if work > limit {
            return None;
        }
        let next: BTreeSet<Vec<u16>> = prev
            .par_iter()
            .flat_map_iter(|rep| {
                let canon = &canon;
                (0..n)
                    .filter(move |i| rep.binary_search(i).is_err())
                    .map(move |i| {
                        let mut pts = rep.clone();
                        pts.push(i);
                        pts.sort_unstable();
                        canon.canonical(&unit(pts)).points
                    })
            })
            .collect::<Vec<_>>()
            .into_iter()
            .collect();
        levels.push(next.into_iter().collect());
    }
    Some(levels)
}

fn validate(spec: &SearchSpec) -> Result<PrimeModulus> {
    let p = PrimeModulus::new(spec.p)?;
    let cap = match spec.mode {
        SearchMode::Exhaustive => MAX_EXHAUSTIVE_P,
        SearchMode::Randomized { .. } => MAX_RANDOMIZED_P,
    };
    if p.get() > cap {
        return Err(Error::InfeasibleSearch(format!(
            "p = {p} exceeds {cap} for this mode"
        )));
    }
    let SizeRange { min, max } = spec.support_sizes;
    let area = (p.get() * p.get()) as usize;
    if min == 0 || min > max || max > area {
        return Err(Error::InfeasibleSearch(format!(
            "support sizes {min}..={max} outside 1..={area}"
        )));
    }
    if spec.budget.max_nodes == 0 || spec.budget.max_seconds.is_some_and(|s| s <= 0.0) {
        return Err(Error::InfeasibleSearch("budget must be positive".into()));
    }
    if spec.value_set.len() > usize::from(u8::MAX) {
        return Err(Error::InfeasibleSearch("value set too large".into()));
    }
    Ok(p)
}

fn admissible(constraint: Constraint, mass: i64) -> bool {
    match constraint {
        Constraint::NonzeroAverage => mass != 0,
        Constraint::None | Constraint::NonnegativeValues => true,
    }
}

fn in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| Error::InvalidArgument(e.to_string())),
    }
}

pub fn run_search(spec: &SearchSpec) -> Result<SearchResult> {
    run_search_with(spec, &SearchOptions::default())
}

pub fn run_search_with(spec: &SearchSpec, opts: &SearchOptions) -> Result<SearchResult> {
    let p = validate(spec)?;
    let values = ScaledValues::new(p, &spec.value_set, spec.constraint)?;
    in_pool(opts.threads, || match spec.mode {
        SearchMode::Exhaustive => exhaustive(p, spec, &values, opts),
        SearchMode::Randomized { seed } => randomized(p, spec, &values, seed),
    })?
}

fn finish(
    p: PrimeModulus,
    spec: &SearchSpec,
    values: &ScaledValues,
    merged: Partial,
    exhaustive: bool,
    ranges_completed: Vec<String>,
    ranges_skipped: usize,
) -> SearchResult {
    let witnesses: Vec<WeightFunction> = merged
        .witnesses
        .iter()
        .map(|f| {
            let exact = Form {
                points: f.points.clone(),
                values: f
                    .values
                    .iter()
                    .map(|&v| values.exact[v as usize].clone())
                    .collect(),
            };
            weight_of(p, &exact)
        })
        .collect();
    let best_n = merged.best_n.unwrap_or(0);
    let witnesses_verified = witnesses.iter().all(|w| {
        perfect_count(w).ok() == Some(best_n)
            && match spec.constraint {
                Constraint::NonzeroAverage => !w.total_mass().is_zero(),
                Constraint::NonnegativeValues => w.iter().all(|(_, v)| v.is_positive()),
                Constraint::None => true,
            }
    });
    let values_note = values
        .exact
        .iter()
        .map(format_rational)
        .collect::<Vec<_>>()
        .join(", ");
    let note = format!(
        "maximum over values in {{{values_note}}} only; {} canonical forms{}",
        if Canonicalizer::new(p).is_exact() {
            "exact"
        } else {
            "greedy (may over-count)"
        },
        if merged.best_n.is_none() {
            "; no admissible weight found"
        } else {
            ""
        }
    );
    SearchResult {
        best_n,
        witnesses,
        witness_count: merged.count,
        nodes_explored: merged.nodes,
        exhaustive,
        witnesses_verified,
        ranges_completed,
        ranges_skipped,
        note,
    }
}

struct Range<'a> {
    id: String,
    supports: &'a [Vec<u16>],
    nodes: u64,
}

fn exhaustive(
    p: PrimeModulus,
    spec: &SearchSpec,
    values: &ScaledValues,
    opts: &SearchOptions,
) -> Result<SearchResult> {
    let start = Instant::now();
    let SizeRange { min, max } = spec.support_sizes;
    let levels = canonical_supports(p, max, spec.budget.max_nodes.saturating_mul(64))
        .ok_or_else(|| Error::InfeasibleSearch("support enumeration exceeds the budget".into()))?;
    let nv = values.ints.len() as u64;
    let mut ranges = Vec::new();
    for (k, level) in levels.iter().enumerate().take(max + 1).skip(min) {
        let per_support = nv.checked_pow(k as u32).unwrap_or(u64::MAX);
        for (c, chunk) in level.chunks(RANGE_SUPPORTS).enumerate() {
            ranges.push(Range {
                id: format!("k{k}:{c}"),
                supports: chunk,
                nodes: per_support.saturating_mul(chunk.len() as u64),
            });
        }
    }
    // Deterministic budget cut: ranges are admitted in order.
    let mut used = 0u64;
    let mut admitted = Vec::new();
    let mut skipped = 0usize;
    let mut over_budget = false;
    for r in &ranges {
        if opts.completed.contains(&r.id) {
            skipped += 1;
            continue;
        }
        if over_budget || used.saturating_add(r.nodes) > spec.budget.max_nodes {
            over_budget = true;
            skipped += 1;
            continue;
        }
        used += r.nodes;
        admitted.push(r);
    }
    let canon = Canonicalizer::new(p);
    let offsets = OffsetTable::new(p);
    let deadline = spec.budget.max_seconds;
    let results: Vec<Option<(String, Partial)>> = admitted
        .par_iter()
        .map(|r| {
            if deadline.is_some_and(|s| start.elapsed().as_secs_f64() > s) {
                return None;
            }
            Some((
                r.id.clone(),
                run_range(r.supports, spec, values, &canon, &offsets),
            ))
        })
        .collect();
    let mut merged = Partial::default();
    let mut completed = Vec::new();
    for res in results {
        match res {
            Some((id, part)) => {
                merged = merged.merge(part, spec.witness_cap);
                completed.push(id);
            }
            None => skipped += 1,
        }
    }
    let exhaustive = skipped == 0;
    Ok(finish(
        p, spec, values, merged, exhaustive, completed, skipped,
    ))
}

fn run_range(
    supports: &[Vec<u16>],
    spec: &SearchSpec,
    values: &ScaledValues,
    canon: &Canonicalizer,
    offsets: &OffsetTable,
) -> Partial {
    let nv = values.ints.len();
    let mut acc = RangeAccumulator::new();
    let mut sums = Vec::new();
    let mut vals = Vec::new();
    for pts in supports {
        if spec.exclude_lines && offsets.is_line(pts) {
            continue;
        }
        let k = pts.len();
        let stab: Option<Vec<&[u16]>> = match canon {
            Canonicalizer::Full(t) => Some(t.stabilizer(&Form {
                points: pts.clone(),
                values: vec![(); k],
            })),
            Canonicalizer::Greedy(_) => None,
        };
        let mut digits = vec![0u8; k];
        loop {
            acc.nodes += 1;
            vals.clear();
            vals.extend(digits.iter().map(|&d| values.ints[d as usize]));
            let mass: i64 = vals.iter().sum();
            if admissible(spec.constraint, mass) {
                let n = offsets.perfect_count(pts, &vals, &mut sums);
                acc.offer(n, || {
                    let form = Form {
                        points: pts.clone(),
                        values: digits.clone(),
                    };
                    match &stab {
                        // The support is canonical, so the canonical
                        // weighted form is the best image under its
                        // stabilizer.
                        Some(stab) => stab
                            .iter()
                            .map(|perm| {
                                Form::new(
                                    pts.iter()
                                        .map(|&i| perm[i as usize])
                                        .zip(digits.iter().copied())
                                        .collect(),
                                )
                            })
                            .min()
                            .unwrap_or(form),
                        None => canon.canonical(&form),
                    }
                });
            }
            // odometer
            let mut pos = 0;
            loop {
                if pos == k {
                    break;
                }
                digits[pos] += 1;
                if (digits[pos] as usize) < nv {
                    break;
                }
                digits[pos] = 0;
                pos += 1;
            }
            if pos == k {
                break;
            }
        }
    }
    acc.finish(spec.witness_cap)
}

fn randomized(
    p: PrimeModulus,
    spec: &SearchSpec,
    values: &ScaledValues,
    seed: u64,
) -> Result<SearchResult> {
    let start = Instant::now();
    let total = spec.budget.max_nodes;
    let chunks = total.div_ceil(RANGE_SAMPLES);
    let canon = Canonicalizer::new(p);
    let offsets = OffsetTable::new(p);
    let area = (p.get() * p.get()) as usize;
    let SizeRange { min, max } = spec.support_sizes;
    let deadline = spec.budget.max_seconds;
    let results: Vec<Option<(String, Partial)>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            if deadline.is_some_and(|s| start.elapsed().as_secs_f64() > s) {
                return None;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let count = RANGE_SAMPLES.min(total - c * RANGE_SAMPLES);
            let mut acc = RangeAccumulator::new();
            let mut sums = Vec::new();
            for _ in 0..count {
                acc.nodes += 1;
                let k = rng.random_range(min..=max);
                let mut pts: Vec<u16> = sample(&mut rng, area, k)
                    .into_iter()
                    .map(|i| i as u16)
                    .collect();
                pts.sort_unstable();
                let digits: Vec<u8> = (0..k)
                    .map(|_| rng.random_range(0..values.ints.len()) as u8)
                    .collect();
                if spec.exclude_lines && offsets.is_line(&pts) {
                    continue;
                }
                let vals: Vec<i64> = digits.iter().map(|&d| values.ints[d as usize]).collect();
                if !admissible(spec.constraint, vals.iter().sum()) {
                    continue;
                }
                let n = offsets.perfect_count(&pts, &vals, &mut sums);
                acc.offer(n, || {
                    canon.canonical(&Form {
                        points: pts.clone(),
                        values: digits.clone(),
                    })
                });
            }
            Some((format!("r{c}"), acc.finish(spec.witness_cap)))
        })
        .collect();
    let mut merged = Partial::default();
    let mut completed = Vec::new();
    let mut skipped = 0;
    for res in results {
        match res {
            Some((id, part)) => {
                merged = merged.merge(part, spec.witness_cap);
                completed.push(id);
            }
            None => skipped += 1,
        }
    }
    Ok(finish(p, spec, values, merged, false, completed, skipped))
}

/// Outcome of running the main-theorem check over a whole family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoremSweep {
    pub checked: u64,
    pub violations: Vec<(WeightFunction, TheoremVerdict)>,
    pub complete: bool,
}

/// Runs [`verify_main_theorem`] on one representative of every affine
/// orbit of supports of size `1..=max_support`, under every assignment of
/// values from `value_set`. `max_nodes` bounds the number of weights
/// checked; exceeding it leaves `complete` false.
pub fn verify_theorem_exhaustive(
    p: PrimeModulus,
    max_support: usize,
    value_set: &[Rational],
    max_nodes: u64,
) -> Result<TheoremSweep> {
    let mut vals: Vec<Rational> = value_set.to_vec();
    if vals.is_empty() || vals.iter().any(Zero::is_zero) {
        return Err(Error::InfeasibleSearch(
            "value set must be nonempty and exclude 0".into(),
        ));
    }
    vals.sort();
    vals.dedup();
    let area = (p.get() * p.get()) as usize;
    let max_support = max_support.min(area);
    let Some(levels) = canonical_supports(p, max_support, max_nodes.saturating_mul(64)) else {
        return Ok(TheoremSweep {
            checked: 0,
            violations: Vec::new(),
            complete: false,
        });
    };
    let nv = vals.len() as u64;
    let mut jobs: Vec<&Vec<u16>> = Vec::new();
    let mut planned = 0u64;
    let mut complete = true;
    'levels: for level in levels.iter().skip(1) {
        for pts in level {
            let cost = nv.checked_pow(pts.len() as u32).unwrap_or(u64::MAX);
            if planned.saturating_add(cost) > max_nodes {
                complete = false;
                break 'levels;
            }
            planned += cost;
            jobs.push(pts);
        }
    }
    let per_job: Vec<(u64, Vec<(WeightFunction, TheoremVerdict)>)> = jobs
        .par_iter()
        .map(|pts| {
            let k = pts.len();
            let mut digits = vec![0usize; k];
            let mut checked = 0u64;
            let mut bad = Vec::new();
            loop {
                let w = weight_of(
                    p,
                    &Form {
                        points: pts.to_vec(),
                        values: digits.iter().map(|&d| vals[d].clone()).collect(),
                    },
                );
                let verdict = verify_main_theorem(&w).expect("support is nonempty");
                checked += 1;
                if !verdict.pass {
                    bad.push((w, verdict));
                }
                let mut pos = 0;
                while pos < k {
                    digits[pos] += 1;
                    if digits[pos] < vals.len() {
                        break;
                    }
                    digits[pos] = 0;
                    pos += 1;
                }
                if pos == k {
                    break;
                }
            }
            (checked, bad)
        })
        .collect();
    let mut checked = 0;
    let mut violations = Vec::new();
    for (c, bad) in per_job {
        checked += c;
        violations.extend(bad);
    }
    Ok(TheoremSweep {
        checked,
        violations,
        complete,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::power_graph_example;
    use crate::plane::{all_points, Point};
    use crate::weights::int;

    fn pm(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    #[test]
    fn p5_sets_of_size_five() {
        let spec = SearchSpec::exhaustive(5, (5, 5), &["1"], 1_000_000);
        let r = run_search(&spec).unwrap();
        assert!(r.exhaustive);
        assert!(r.witnesses_verified);
        assert_eq!(r.best_n, 2);
        let graph = affine_canonical(&power_graph_example(pm(5)).w);
        assert!(r.witnesses.contains(&graph));
    }

    #[test]
    fn p5_lines_are_excluded_only_on_request() {
        let mut spec = SearchSpec::exhaustive(5, (5, 5), &["1"], 1_000_000);
        spec.exclude_lines = false;
        let r = run_search(&spec).unwrap();
        assert_eq!(r.best_n, 5);
        assert_eq!(r.witness_count, 1);
    }

    #[test]
    fn p5_size_six_nonzero_average_has_at_most_one() {
        let spec = SearchSpec::exhaustive(5, (6, 6), &["-1", "1", "2", "1/2"], 10_000_000)
            .with_constraint(Constraint::NonzeroAverage);
        let r = run_search(&spec).unwrap();
        assert!(r.exhaustive);
        assert!(r.best_n <= 1);
        assert!(r.witnesses_verified);
        for w in &r.witnesses {
            assert!(!w.total_mass().is_zero());
        }
    }

    #[test]
    fn single_point_has_no_perfect_direction() {
        let r = run_search(&SearchSpec::exhaustive(3, (1, 1), &["1"], 100)).unwrap();
        assert_eq!(r.best_n, 0);
        assert_eq!(r.witness_count, 1);
        assert_eq!(
            r.witnesses,
            vec![WeightFunction::indicator(pm(3), [Point::ORIGIN])]
        );
    }

    /// Brute force over every subset of F_3² of size 1..=4, no symmetry.
    fn naive_p3(max: usize) -> (usize, BTreeSet<WeightFunction>) {
        let p = pm(3);
        let pts: Vec<Point> = all_points(p).collect();
        let mut best = 0;
        let mut winners = BTreeSet::new();
        for mask in 1u32..(1 << 9) {
            let k = mask.count_ones() as usize;
            if k > max {
                continue;
            }
            let set: Vec<Point> = (0..9)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| pts[i])
                .collect();
            if k == 3 && crate::analysis::is_collinear(&set, p) {
                continue;
            }
            let w = WeightFunction::indicator(p, set);
            let n = perfect_count(&w).unwrap();
            if n > best {
                best = n;
                winners.clear();
            }
            if n == best {
                winners.insert(affine_canonical(&w));
            }
        }
        (best, winners)
    }

    #[test]
    fn matches_naive_enumeration_at_p3() {
        let (best, winners) = naive_p3(4);
        let r = run_search(&SearchSpec::exhaustive(3, (1, 4), &["1"], 1_000_000)).unwrap();
        assert_eq!(r.best_n, best);
        assert_eq!(r.witness_count as usize, winners.len());
        assert_eq!(r.witnesses.into_iter().collect::<BTreeSet<_>>(), winners);
    }

    #[test]
    fn parallel_and_serial_agree() {
        let spec = SearchSpec::exhaustive(5, (4, 6), &["-1", "1"], 10_000_000);
        let serial = run_search_with(
            &spec,
            &SearchOptions {
                threads: Some(1),
                ..Default::default()
            },
        )
        .unwrap();
        let par = run_search_with(
            &spec,
            &SearchOptions {
                threads: Some(4),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(serial, par);
        let mut rspec = spec.clone();
        rspec.mode = SearchMode::Randomized { seed: 99 };
        rspec.budget.max_nodes = 20_000;
        let a = run_search_with(
            &rspec,
            &SearchOptions {
                threads: Some(1),
                ..Default::default()
            },
        )
        .unwrap();
        let b = run_search_with(
            &rspec,
            &SearchOptions {
                threads: Some(3),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(a, b);
        assert!(!a.exhaustive);
        assert_eq!(a.nodes_explored, 20_000);
    }

    #[test]
    fn enlarging_the_value_set_never_hurts() {
        let small = run_search(&SearchSpec::exhaustive(3, (2, 5), &["1"], 1_000_000)).unwrap();
        let large =
            run_search(&SearchSpec::exhaustive(3, (2, 5), &["1", "-1"], 1_000_000)).unwrap();
        let wider =
            run_search(&SearchSpec::exhaustive(3, (1, 6), &["1", "-1"], 1_000_000)).unwrap();
        assert!(small.best_n <= large.best_n);
        assert!(large.best_n <= wider.best_n);
    }

    #[test]
    fn budget_cut_is_flagged() {
        let r = run_search(&SearchSpec::exhaustive(5, (4, 6), &["1", "-1"], 500)).unwrap();
        assert!(!r.exhaustive);
        assert!(r.ranges_skipped > 0);
        assert!(r.nodes_explored <= 500);
    }

    #[test]
    fn resume_skips_completed_ranges() {
        let spec = SearchSpec::exhaustive(5, (5, 5), &["1"], 1_000_000);
        let full = run_search(&spec).unwrap();
        let half: BTreeSet<String> = full.ranges_completed.iter().take(2).cloned().collect();
        let rest = run_search_with(
            &spec,
            &SearchOptions {
                completed: half.clone(),
                threads: None,
            },
        )
        .unwrap();
        assert_eq!(rest.ranges_skipped, 2);
        assert!(!rest.exhaustive);
        assert!(rest.ranges_completed.iter().all(|id| !half.contains(id)));
        assert_eq!(rest.ranges_completed.len() + 2, full.ranges_completed.len());
    }

    #[test]
    fn nonnegative_constraint_drops_negative_values() {
        let spec = SearchSpec::exhaustive(3, (3, 4), &["-1", "1", "2"], 1_000_000)
            .with_constraint(Constraint::NonnegativeValues);
        let r = run_search(&spec).unwrap();
        assert!(r
            .witnesses
            .iter()
            .all(|w| w.iter().all(|(_, v)| v.is_positive())));
        let only_neg = SearchSpec::exhaustive(3, (3, 4), &["-1"], 1_000)
            .with_constraint(Constraint::NonnegativeValues);
        assert!(run_search(&only_neg).is_err());
    }

    #[test]
    fn infeasible_specs() {
        assert!(run_search(&SearchSpec::exhaustive(17, (1, 2), &["1"], 100)).is_err());
        assert!(run_search(&SearchSpec::exhaustive(5, (0, 2), &["1"], 100)).is_err());
        assert!(run_search(&SearchSpec::exhaustive(5, (3, 2), &["1"], 100)).is_err());
        assert!(run_search(&SearchSpec::exhaustive(5, (1, 2), &["0"], 100)).is_err());
        assert!(run_search(&SearchSpec::exhaustive(5, (1, 2), &[], 100)).is_err());
        assert!(run_search(&SearchSpec::exhaustive(5, (1, 2), &["1"], 0)).is_err());
        assert!(run_search(&SearchSpec::exhaustive(5, (1, 26), &["1"], 100)).is_err());
    }

    #[test]
    fn orbit_counts_of_small_sets() {
        // AGL(2,3) acts transitively on points, on pairs, on collinear
        // and on non-collinear triples.
        let levels = canonical_supports(pm(3), 3, u64::MAX).unwrap();
        assert_eq!(levels[1].len(), 1);
        assert_eq!(levels[2].len(), 1);
        assert_eq!(levels[3].len(), 2);
    }

    #[test]
    fn theorem_sweeps_find_nothing() {
        let sweep = verify_theorem_exhaustive(pm(3), 9, &[int(-1), int(1)], 10_000_000).unwrap();
        assert!(sweep.complete);
        assert!(sweep.violations.is_empty());
        assert!(sweep.checked > 0);
        let sweep = verify_theorem_exhaustive(pm(5), 6, &[int(1)], 10_000_000).unwrap();
        assert!(sweep.complete);
        assert!(sweep.violations.is_empty());
    }
}
