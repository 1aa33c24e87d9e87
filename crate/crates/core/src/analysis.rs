//! Perfect and determined directions.
//!
//! A direction is *perfect* for `w` when every line of its pencil carries
//! exactly `total_mass / p`; it is *determined* by a set `S` when some line
//! of the pencil meets `S` in at least two points.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plane::{direction_of_pair, enumerate_directions, Direction, Point, PrimeModulus};
use crate::spectral::{annihilator, fourier_is_zero};
use crate::weights::{format_rational, Rational, WeightFunction};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectionEntry {
    pub direction: Direction,
    /// Indexed by line offset.
    pub line_sums: Vec<Rational>,
    pub perfect: bool,
    pub determined: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectionReport {
    pub p: PrimeModulus,
    /// One entry per direction, canonical order.
    pub per_direction: Vec<DirectionEntry>,
    /// Number of perfect directions.
    pub n: usize,
    /// Number of determined directions.
    pub d: usize,
    /// `total_mass / p`.
    pub share: Rational,
}

impl DirectionReport {
    pub fn perfect_set(&self) -> Vec<Direction> {
        self.per_direction
            .iter()
            .filter(|e| e.perfect)
            .map(|e| e.direction)
            .collect()
    }

    pub fn determined_set(&self) -> Vec<Direction> {
        self.per_direction
            .iter()
            .filter(|e| e.determined)
            .map(|e| e.direction)
            .collect()
    }

    pub fn entry(&self, d: Direction) -> &DirectionEntry {
        &self.per_direction[d.index(self.p)]
    }

    pub fn to_doc(&self) -> DirectionReportDoc {
        DirectionReportDoc {
            p: self.p.as_u64(),
            share: RationalDoc::from(&self.share),
            n: self.n,
            d: self.d,
            directions: self
                .per_direction
                .iter()
                .map(|e| DirectionEntryDoc {
                    slope: e.direction,
                    perfect: e.perfect,
                    determined: e.determined,
                    line_sums: e.line_sums.iter().map(format_rational).collect(),
                })
                .collect(),
        }
    }

    /// One row per (direction, offset): `slope,offset,sum`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("slope,offset,sum\n");
        for e in &self.per_direction {
            for (offset, s) in e.line_sums.iter().enumerate() {
                let _ = writeln!(out, "{},{},{}", e.direction, offset, format_rational(s));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalDoc {
    pub num: String,
    pub den: String,
}

impl From<&Rational> for RationalDoc {
    fn from(r: &Rational) -> Self {
        RationalDoc {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionReportDoc {
    pub p: u64,
    pub share: RationalDoc,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "D")]
    pub d: usize,
    pub directions: Vec<DirectionEntryDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DirectionEntryDoc {
    pub slope: Direction,
    pub perfect: bool,
    pub determined: bool,
    pub line_sums: Vec<String>,
}

/// Line sums, perfect and determined flags for every direction.
pub fn perfect_directions(w: &WeightFunction) -> Result<DirectionReport> {
    if w.is_empty() {
        return Err(Error::EmptySupport);
    }
    let p = w.modulus();
    let share = w.total_mass() / Rational::from_integer(BigInt::from(p.get()));
    let per_direction: Vec<DirectionEntry> = enumerate_directions(p)
        .into_iter()
        .map(|d| {
            let line_sums = w.line_sums(d);
            let perfect = line_sums.iter().all(|s| *s == share);
            let determined = w.line_counts(d).iter().any(|&c| c >= 2);
            DirectionEntry {
                direction: d,
                line_sums,
                perfect,
                determined,
            }
        })
        .collect();
    let n = per_direction.iter().filter(|e| e.perfect).count();
    let d = per_direction.iter().filter(|e| e.determined).count();
    Ok(DirectionReport {
        p,
        per_direction,
        n,
        d,
        share,
    })
}

/// Number of perfect directions without building the full report.
pub fn perfect_count(w: &WeightFunction) -> Result<usize> {
    if w.is_empty() {
        return Err(Error::EmptySupport);
    }
    let p = w.modulus();
    let share = w.total_mass() / Rational::from_integer(BigInt::from(p.get()));
    Ok(enumerate_directions(p)
        .into_iter()
        .filter(|&d| w.line_sums(d).iter().all(|s| *s == share))
        .count())
}

/// Perfect directions found on the Fourier side: those whose annihilator
/// carries no nonprincipal character in the support of `ŵ`.
pub fn perfect_directions_spectral(w: &WeightFunction) -> Result<Vec<Direction>> {
    if w.is_empty() {
        return Err(Error::EmptySupport);
    }
    let p = w.modulus();
    Ok(enumerate_directions(p)
        .into_iter()
        .filter(|&d| {
            annihilator(p, d)
                .characters
                .iter()
                .filter(|chi| !chi.is_principal())
                .all(|chi| fourier_is_zero(w, *chi))
        })
        .collect())
}

/// Directions of all lines through two distinct points of `points`, in
/// canonical order. Repeated points are ignored.
pub fn determined_directions(points: &[Point], p: PrimeModulus) -> Vec<Direction> {
    let set: BTreeSet<Point> = points.iter().copied().collect();
    let pts: Vec<Point> = set.into_iter().collect();
    let mut dirs = BTreeSet::new();
    for (i, &a) in pts.iter().enumerate() {
        for &b in &pts[i + 1..] {
            dirs.insert(direction_of_pair(p, a, b).expect("points are distinct"));
            if dirs.len() == p.direction_count() {
                return dirs.into_iter().collect();
            }
        }
    }
    dirs.into_iter().collect()
}

/// Number of determined directions by counting points per line.
pub fn determined_count(points: &[Point], p: PrimeModulus) -> usize {
    let mut counts = vec![0u32; p.get() as usize];
    enumerate_directions(p)
        .into_iter()
        .filter(|&d| {
            counts.iter_mut().for_each(|c| *c = 0);
            points.iter().any(|z| {
                let c = &mut counts[d.offset_of(p, *z) as usize];
                *c += 1;
                *c >= 2
            })
        })
        .count()
}

/// True when all points lie on one line (vacuously for fewer than two).
pub fn is_collinear(points: &[Point], p: PrimeModulus) -> bool {
    let Some((&first, rest)) = points.split_first() else {
        return true;
    };
    let mut dir = None;
    for &z in rest {
        if z == first {
            continue;
        }
        let d = direction_of_pair(p, first, z).expect("distinct");
        match dir {
            None => dir = Some(d),
            Some(e) if e != d => return false,
            _ => {}
        }
    }
    true
}

/// `N ≤ |S|/2` unless `S` is a whole line carrying a constant weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoremVerdict {
    pub n: usize,
    pub bound: Rational,
    pub exempt: bool,
    pub pass: bool,
}

/// `S` is a full line and `w` takes a single value on it.
pub fn is_exempt(w: &WeightFunction) -> bool {
    let p = w.modulus();
    if w.len() != p.get() as usize {
        return false;
    }
    let pts: Vec<Point> = w.support().collect();
    let mut values = w.iter().map(|(_, v)| v);
    let first = values.next();
    values.all(|v| Some(v) == first) && is_collinear(&pts, p)
}

pub fn verify_main_theorem(w: &WeightFunction) -> Result<TheoremVerdict> {
    let n = perfect_count(w)?;
    let exempt = is_exempt(w);
    Ok(TheoremVerdict {
        n,
        bound: Rational::new(BigInt::from(w.len()), BigInt::from(2)),
        exempt,
        pass: 2 * n <= w.len() || exempt,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RedeiMegyesiRecord {
    #[serde(rename = "D")]
    pub d: usize,
    pub is_line: bool,
    pub pass: bool,
}

/// A p-point set determines at least (p+3)/2 directions unless it is a line.
pub fn redei_megyesi_check(points: &[Point], p: PrimeModulus) -> Result<RedeiMegyesiRecord> {
    let distinct: BTreeSet<Point> = points.iter().copied().collect();
    if distinct.len() != p.get() as usize || points.len() != distinct.len() {
        return Err(Error::WrongSupportSize {
            got: distinct.len(),
            expected: p.get() as usize,
        });
    }
    let d = determined_count(points, p);
    let is_line = d == 1;
    Ok(RedeiMegyesiRecord {
        d,
        is_line,
        pass: is_line || 2 * d >= p.get() as usize + 3,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "direction")]
pub enum Degeneracy {
    AllPerfect,
    ExactlyOneImperfect(Direction),
    Generic,
}

/// Classifies `w` (extended by zero to the whole plane): constant,
/// nonconstant but constant along every line of exactly one pencil, or
/// neither.
pub fn classify_degenerate(w: &WeightFunction) -> Degeneracy {
    let p = w.modulus();
    let full = p.get() as usize * p.get() as usize;
    let constant = w.is_empty() || (w.len() == full && w.distinct_values().len() == 1);
    if constant {
        return Degeneracy::AllPerfect;
    }
    // A nonconstant function is line-constant along at most one pencil:
    // two distinct pencils would make it constant on the whole plane.
    match enumerate_directions(p)
        .into_iter()
        .find(|&d| w.is_line_constant(d))
    {
        Some(d) => Degeneracy::ExactlyOneImperfect(d),
        None => Degeneracy::Generic,
    }
}

/// `Σ_lines (Σ_{z∈l} w₀(z))²` and `p·Σ_z w₀(z)²` for `w₀ = w - mass/p²`.
/// The two agree for every `w`.
pub fn variance_identity_sides(w: &WeightFunction) -> (Rational, Rational) {
    let p = w.modulus();
    let pp = Rational::from_integer(BigInt::from(p.get()));
    let mean = w.total_mass() / (&pp * &pp);
    let shift = &mean * &pp;
    let mut lines = Rational::zero();
    for d in enumerate_directions(p) {
        for s in w.line_sums(d) {
            let c = s - &shift;
            lines += &c * &c;
        }
    }
    let mut points = Rational::zero();
    for z in crate::plane::all_points(p) {
        let c = w.value(z) - &mean;
        points += &c * &c;
    }
    (lines, points * pp)
}
