//! Shared helpers for the integration targets: an independent brute-force
//! oracle working on plain integers, and seeded random corpora.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::seq::index::sample;
use rand::Rng;

use perfdir::plane::{all_points, enumerate_directions, AffineMap, Direction, Point, PrimeModulus};
use perfdir::weights::{rat, Rational, WeightFunction};

pub fn pm(p: u64) -> PrimeModulus {
    PrimeModulus::new(p).unwrap()
}

/// Direction code used by the oracle: slope `s` is `s`, the vertical is `p`.
pub fn code(d: Direction, p: u32) -> u32 {
    match d {
        Direction::Slope(s) => s,
        Direction::Infinity => p,
    }
}

/// Offset of `(x, y)` along direction code `c`: `y - c·x`, or `x` when `c = p`.
fn offset(p: i64, c: i64, x: i64, y: i64) -> usize {
    if c == p {
        x as usize
    } else {
        (y - c * x).rem_euclid(p) as usize
    }
}

/// Result of the brute-force oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Naive {
    /// Direction codes whose line sums all equal mass/p.
    pub perfect: Vec<u32>,
    /// Direction codes with a line through two support points.
    pub determined: Vec<u32>,
}

impl Naive {
    pub fn n(&self) -> usize {
        self.perfect.len()
    }
    pub fn d(&self) -> usize {
        self.determined.len()
    }
}

/// Perfect and determined directions of an integer-valued weight, straight
/// from the definitions: `p·(line sum) = mass` for every line of a pencil,
/// and some line holding two support points.
pub fn naive(p: u32, entries: &[(u32, u32, i64)]) -> Naive {
    let q = i64::from(p);
    let mass: i64 = entries.iter().map(|e| e.2).sum();
    let mut perfect = Vec::new();
    let mut determined = Vec::new();
    for c in 0..=q {
        let mut sums = vec![0i64; p as usize];
        let mut counts = vec![0usize; p as usize];
        for &(x, y, v) in entries {
            let o = offset(q, c, i64::from(x), i64::from(y));
            sums[o] += v;
            counts[o] += 1;
        }
        if sums.iter().all(|&s| q * s == mass) {
            perfect.push(c as u32);
        }
        if counts.iter().any(|&k| k >= 2) {
            determined.push(c as u32);
        }
    }
    Naive {
        perfect,
        determined,
    }
}

/// `w` scaled by the least common denominator, as plain integers.
pub fn integer_entries(w: &WeightFunction) -> Vec<(u32, u32, i64)> {
    let lcm = w.iter().fold(BigInt::from(1), |acc, (_, v)| {
        num_integer::lcm(acc, v.denom().clone())
    });
    w.iter()
        .map(|(z, v)| {
            let scaled = v * Rational::from_integer(lcm.clone());
            (
                z.x,
                z.y,
                scaled.to_integer().to_i64().expect("small weights"),
            )
        })
        .collect()
}

pub fn naive_of(w: &WeightFunction) -> Naive {
    naive(w.modulus().get(), &integer_entries(w))
}

/// Whether every line of direction code `c` sees a single value of `w`
/// (extended by zero), checked point by point.
pub fn naive_line_constant(p: u32, entries: &[(u32, u32, i64)], c: u32) -> bool {
    let q = i64::from(p);
    let mut grid = vec![0i64; (p * p) as usize];
    for &(x, y, v) in entries {
        grid[(y * p + x) as usize] = v;
    }
    let mut seen: Vec<Option<i64>> = vec![None; p as usize];
    for y in 0..p {
        for x in 0..p {
            let o = offset(q, i64::from(c), i64::from(x), i64::from(y));
            let v = grid[(y * p + x) as usize];
            match seen[o] {
                None => seen[o] = Some(v),
                Some(u) if u != v => return false,
                _ => {}
            }
        }
    }
    true
}

/// Random weight: `1..=max_support` distinct points, numerators drawn from
/// `±1..=max_num`, denominators from `1..=max_den`.
pub fn random_weight<R: Rng>(
    rng: &mut R,
    p: PrimeModulus,
    max_support: usize,
    max_num: i64,
    max_den: i64,
) -> WeightFunction {
    let area = (p.get() * p.get()) as usize;
    let k = rng.random_range(1..=max_support.min(area));
    let idx = sample(rng, area, k);
    let m = p.get() as usize;
    WeightFunction::from_entries(
        p,
        idx.iter().map(|i| {
            let mut n = rng.random_range(1..=max_num);
            if rng.random_bool(0.5) {
                n = -n;
            }
            let d = rng.random_range(1..=max_den);
            (Point::new((i % m) as u32, (i / m) as u32), rat(n, d))
        }),
    )
    .unwrap()
}

/// A nonzero function constant along every line of one random pencil.
pub fn random_periodic<R: Rng>(rng: &mut R, p: PrimeModulus) -> WeightFunction {
    let dirs = enumerate_directions(p);
    let d = dirs[rng.random_range(0..dirs.len())];
    let f: Vec<i64> = loop {
        let f: Vec<i64> = (0..p.get()).map(|_| rng.random_range(-2..=2)).collect();
        if f.iter().any(|&v| v != 0) {
            break f;
        }
    };
    WeightFunction::accumulate(
        p,
        all_points(p).map(|z| {
            (
                z,
                Rational::from_integer(f[d.offset_of(p, z) as usize].into()),
            )
        }),
    )
}

/// Integer combination of a few random lines, zero entries dropped. Small
/// combinations of lines are the usual extremal shapes.
pub fn random_line_combination<R: Rng>(rng: &mut R, p: PrimeModulus) -> Option<WeightFunction> {
    let dirs = enumerate_directions(p);
    let lines = rng.random_range(1..=3);
    let mut entries = Vec::new();
    for _ in 0..lines {
        let d = dirs[rng.random_range(0..dirs.len())];
        let base = Point::new(rng.random_range(0..p.get()), rng.random_range(0..p.get()));
        let c = *[-2i64, -1, 1, 2].get(rng.random_range(0..4)).unwrap();
        entries.extend(
            d.line_through(p, base)
                .points(p)
                .map(|z| (z, Rational::from_integer(c.into()))),
        );
    }
    let w = WeightFunction::accumulate(p, entries);
    (!w.is_empty()).then_some(w)
}

/// Mixed corpus of integer weights: mostly uniform random supports, with
/// periodic functions and line combinations folded in.
pub fn integer_corpus<R: Rng>(rng: &mut R, p: PrimeModulus, size: usize) -> Vec<WeightFunction> {
    let area = (p.get() * p.get()) as usize;
    let mut out = Vec::with_capacity(size);
    while out.len() < size {
        let w = match rng.random_range(0..10) {
            0 => random_periodic(rng, p),
            1 | 2 => match random_line_combination(rng, p) {
                Some(w) => w,
                None => continue,
            },
            3 | 4 => random_weight(rng, p, 2 * p.get() as usize + 2, 1, 1),
            _ => random_weight(rng, p, area, 3, 1),
        };
        out.push(w);
    }
    out
}

/// A uniformly random invertible affine map.
pub fn random_affine<R: Rng>(rng: &mut R, p: PrimeModulus) -> AffineMap {
    let m = i64::from(p.get());
    loop {
        let mat = [
            [rng.random_range(0..m), rng.random_range(0..m)],
            [rng.random_range(0..m), rng.random_range(0..m)],
        ];
        let t = Point::new(rng.random_range(0..p.get()), rng.random_range(0..p.get()));
        if let Ok(map) = AffineMap::new(p, mat, t) {
            return map;
        }
    }
}

/// Nonzero rational `±n/d` with small parts.
pub fn random_scalar<R: Rng>(rng: &mut R) -> Rational {
    let n = rng.random_range(1..=7);
    let d = rng.random_range(1..=5);
    let r = rat(n, d);
    if rng.random_bool(0.5) {
        -r
    } else {
        r
    }
}
