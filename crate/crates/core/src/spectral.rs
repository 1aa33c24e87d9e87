//! Exact Fourier analysis on F_p².
//!
//! The character indexed by `(a, b)` is `(x, y) ↦ ζ^{a·x + b·y}` with
//! `ζ = exp(2πi/p)`. Grouping the points of F_p² by the residue
//! `j = a·x + b·y` gives class sums `c_0, …, c_{p-1}`, and `ŵ(χ)` is a
//! nonzero multiple of `Σ_j c_j ζ^{-j}`. Since `1, ζ, …, ζ^{p-2}` are
//! linearly independent over Q and `1 + ζ + … + ζ^{p-1} = 0`, that sum
//! vanishes exactly when all `c_j` are equal. Every zero test below is this
//! rational comparison; no complex numbers are ever formed.

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plane::{enumerate_directions, Direction, PrimeModulus};
use crate::weights::{Rational, WeightFunction};

/// A character of F_p², `(x, y) ↦ exp(2πi(a·x + b·y)/p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Character {
    pub a: u32,
    pub b: u32,
}

impl Character {
    pub const PRINCIPAL: Character = Character { a: 0, b: 0 };

    pub const fn new(a: u32, b: u32) -> Self {
        Character { a, b }
    }

    pub fn is_principal(self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn scale(self, p: PrimeModulus, t: u32) -> Character {
        Character::new(p.mul(self.a, t), p.mul(self.b, t))
    }

    /// The direction whose annihilator contains this (nonprincipal)
    /// character.
    pub fn direction(self, p: PrimeModulus) -> Option<Direction> {
        match (self.a, self.b) {
            (0, 0) => None,
            (_, 0) => Some(Direction::Infinity),
            // (a, b) = t·(s, -1) with t = -b, s = -a/b
            (a, b) => Some(Direction::Slope(p.mul(p.neg(a), p.inv(b)))),
        }
    }
}

/// `H^⊥` for the subgroup `H` of a direction: the p characters trivial on
/// `H`, listed as `t·g` for `t = 0, …, p-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnihilatorSubgroup {
    pub direction: Direction,
    pub characters: Vec<Character>,
}

impl AnnihilatorSubgroup {
    pub fn contains(&self, chi: Character) -> bool {
        self.characters.contains(&chi)
    }
}

/// Generator of `H^⊥`: `(s, -1)` for slope `s`, `(1, 0)` for ∞.
pub fn annihilator_generator(p: PrimeModulus, d: Direction) -> Character {
    match d {
        Direction::Slope(s) => Character::new(s, p.get() - 1),
        Direction::Infinity => Character::new(1, 0),
    }
}

pub fn annihilator(p: PrimeModulus, d: Direction) -> AnnihilatorSubgroup {
    let g = annihilator_generator(p, d);
    AnnihilatorSubgroup {
        direction: d,
        characters: (0..p.get()).map(|t| g.scale(p, t)).collect(),
    }
}

/// `c_j = Σ { w(x, y) : a·x + b·y ≡ j }` for `j = 0, …, p-1`.
pub fn residue_class_sums(w: &WeightFunction, chi: Character) -> Vec<Rational> {
    let p = w.modulus();
    let mut sums = vec![Rational::zero(); p.get() as usize];
    for (z, v) in w.iter() {
        let j = p.add(p.mul(chi.a, z.x), p.mul(chi.b, z.y));
        sums[j as usize] += v;
    }
    sums
}

/// `ŵ(χ) = 0` exactly.
pub fn fourier_is_zero(w: &WeightFunction, chi: Character) -> bool {
    let sums = residue_class_sums(w, chi);
    sums.windows(2).all(|pair| pair[0] == pair[1])
}

/// Support of `ŵ`, organised by annihilator subgroups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumReport {
    pub support_size: usize,
    /// Nonvanishing nonprincipal characters in each `H^⊥`, canonical order.
    pub support_by_direction: Vec<(Direction, usize)>,
    pub principal_nonzero: bool,
}

impl SpectrumReport {
    pub fn count(&self, d: Direction) -> usize {
        self.support_by_direction
            .iter()
            .find(|(e, _)| *e == d)
            .map_or(0, |(_, c)| *c)
    }

    pub fn to_doc(&self) -> SpectrumDoc {
        SpectrumDoc {
            support_size: self.support_size,
            principal_nonzero: self.principal_nonzero,
            by_direction: self
                .support_by_direction
                .iter()
                .map(|&(slope, count)| DirectionCount { slope, count })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SpectrumDoc {
    pub support_size: usize,
    pub principal_nonzero: bool,
    pub by_direction: Vec<DirectionCount>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionCount {
    pub slope: Direction,
    pub count: usize,
}

/// Exact support of `ŵ`.
///
/// The nonprincipal characters of one `H^⊥` are `t·g`, `t ≠ 0`; their class
/// sums are permutations of those of `g` (`c'_j = c_{j/t}`), so they all
/// vanish or none does and one test per direction suffices.
pub fn fourier_support(w: &WeightFunction) -> SpectrumReport {
    let p = w.modulus();
    let nonprincipal = p.get() as usize - 1;
    let principal_nonzero = !w.total_mass().is_zero();
    let support_by_direction: Vec<(Direction, usize)> = enumerate_directions(p)
        .into_iter()
        .map(|d| {
            let g = annihilator_generator(p, d);
            (
                d,
                if fourier_is_zero(w, g) {
                    0
                } else {
                    nonprincipal
                },
            )
        })
        .collect();
    let support_size =
        support_by_direction.iter().map(|(_, c)| c).sum::<usize>() + usize::from(principal_nonzero);
    SpectrumReport {
        support_size,
        support_by_direction,
        principal_nonzero,
    }
}

/// Same report as [`fourier_support`], testing every one of the p²
/// characters individually. Cost O(p²·(|S| + p)); meant for small p.
pub fn fourier_support_exhaustive(w: &WeightFunction) -> SpectrumReport {
    let p = w.modulus();
    let principal_nonzero = !fourier_is_zero(w, Character::PRINCIPAL);
    let support_by_direction: Vec<(Direction, usize)> = enumerate_directions(p)
        .into_iter()
        .map(|d| {
            let count = annihilator(p, d)
                .characters
                .into_iter()
                .filter(|chi| !chi.is_principal() && !fourier_is_zero(w, *chi))
                .count();
            (d, count)
        })
        .collect();
    let support_size =
        support_by_direction.iter().map(|(_, c)| c).sum::<usize>() + usize::from(principal_nonzero);
    SpectrumReport {
        support_size,
        support_by_direction,
        principal_nonzero,
    }
}

/// Evaluation of `½|supp w| + |supp ŵ|/(p-1) ≥ p+1` and of its alternative,
/// a pencil along whose lines `w` is constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UncertaintyReport {
    pub lhs: Rational,
    pub rhs: u64,
    pub holds: bool,
    pub constant_direction: Option<Direction>,
}

impl UncertaintyReport {
    /// One of the two alternatives is witnessed.
    pub fn dichotomy_satisfied(&self) -> bool {
        self.holds || self.constant_direction.is_some()
    }
}

pub fn check_uncertainty(w: &WeightFunction) -> UncertaintyReport {
    let p = w.modulus();
    let rhs = p.as_u64() + 1;
    if w.is_empty() {
        return UncertaintyReport {
            lhs: Rational::zero(),
            rhs,
            holds: false,
            constant_direction: Some(Direction::Slope(0)),
        };
    }
    let spectrum = fourier_support(w);
    let lhs = BigRational::new(w.len().into(), 2.into())
        + BigRational::new(spectrum.support_size.into(), (p.as_u64() - 1).into());
    let holds = lhs >= BigRational::from_integer(rhs.into());
    let constant_direction = enumerate_directions(p)
        .into_iter()
        .find(|&d| w.is_line_constant(d));
    UncertaintyReport {
        lhs,
        rhs,
        holds,
        constant_direction,
    }
}

/// `|supp ŵ| ≤ (p-1)(p+1-N) + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportBound {
    pub lhs: u64,
    pub rhs: u64,
    pub holds: bool,
}

pub fn check_support_bound(w: &WeightFunction, perfect_count: usize) -> Result<SupportBound> {
    let p = w.modulus().as_u64();
    let n = perfect_count as u64;
    if n > p + 1 {
        return Err(Error::InvalidArgument(format!(
            "perfect-direction count {n} outside [0, {}]",
            p + 1
        )));
    }
    let lhs = fourier_support(w).support_size as u64;
    let rhs = (p - 1) * (p + 1 - n) + 1;
    Ok(SupportBound {
        lhs,
        rhs,
        holds: lhs <= rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plane::Point;
    use crate::weights::{int, rat};
    use num_complex::Complex64;

    fn pm(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    fn line_y0(p: PrimeModulus) -> WeightFunction {
        WeightFunction::indicator(p, (0..p.get()).map(|x| Point::new(x, 0)))
    }

    /// Direct floating-point evaluation of `Σ_z w(z) conj(χ(z))`.
    fn numeric_transform(w: &WeightFunction, chi: Character) -> Complex64 {
        let p = w.modulus().get();
        w.iter()
            .map(|(z, v)| {
                let j = (chi.a as u64 * z.x as u64 + chi.b as u64 * z.y as u64) % p as u64;
                let theta = -2.0 * std::f64::consts::PI * j as f64 / p as f64;
                let val = v.numer().to_string().parse::<f64>().unwrap()
                    / v.denom().to_string().parse::<f64>().unwrap();
                Complex64::from_polar(val, theta)
            })
            .sum()
    }

    #[test]
    fn class_sum_examples() {
        let p = pm(5);
        let delta = WeightFunction::indicator(p, [Point::ORIGIN]);
        for a in 0..5 {
            for b in 0..5 {
                let c = residue_class_sums(&delta, Character::new(a, b));
                assert_eq!(c[0], int(1));
                assert!(c[1..].iter().all(|v| v.is_zero()));
                assert!(!fourier_is_zero(&delta, Character::new(a, b)));
            }
        }
        let ones = WeightFunction::constant(p, int(1));
        assert_eq!(
            residue_class_sums(&ones, Character::new(2, 3)),
            vec![int(5); 5]
        );
        assert!(fourier_is_zero(&ones, Character::new(2, 3)));
        assert_eq!(
            residue_class_sums(&line_y0(p), Character::new(0, 1)),
            vec![int(5), int(0), int(0), int(0), int(0)]
        );
    }

    #[test]
    fn annihilator_examples() {
        let p3 = pm(3);
        let h = annihilator(p3, Direction::Slope(0));
        let mut chars = h.characters.clone();
        chars.sort();
        assert_eq!(
            chars,
            vec![
                Character::new(0, 0),
                Character::new(0, 1),
                Character::new(0, 2)
            ]
        );
        let mut inf = annihilator(p3, Direction::Infinity).characters;
        inf.sort();
        assert_eq!(
            inf,
            vec![
                Character::new(0, 0),
                Character::new(1, 0),
                Character::new(2, 0)
            ]
        );
        let p5 = pm(5);
        let h = annihilator(p5, Direction::Slope(2));
        assert_eq!(h.characters.len(), 5);
        for chi in &h.characters {
            // trivial on the generator (1, 2) of H
            assert_eq!(p5.add(chi.a, p5.mul(chi.b, 2)), 0);
        }
    }

    #[test]
    fn annihilators_partition_nonprincipal_characters() {
        for q in [3, 5, 7] {
            let p = pm(q);
            let mut seen = vec![0; (q * q) as usize];
            for d in enumerate_directions(p) {
                for chi in annihilator(p, d).characters {
                    seen[(chi.a * q as u32 + chi.b) as usize] += 1;
                    if !chi.is_principal() {
                        assert_eq!(chi.direction(p), Some(d));
                    }
                }
            }
            assert_eq!(seen[0], q + 1);
            assert!(seen[1..].iter().all(|&c| c == 1));
        }
    }

    #[test]
    fn subgroup_indicator_transform_is_supported_on_annihilator() {
        for q in [3, 5, 7] {
            let p = pm(q);
            for d in enumerate_directions(p) {
                let h = WeightFunction::indicator(p, d.line_through(p, Point::ORIGIN).points(p));
                let perp = annihilator(p, d);
                for a in 0..q as u32 {
                    for b in 0..q as u32 {
                        let chi = Character::new(a, b);
                        assert_eq!(fourier_is_zero(&h, chi), !perp.contains(chi));
                    }
                }
                let report = fourier_support(&h);
                assert_eq!(report.support_size, q as usize);
                assert_eq!(report.count(d), q as usize - 1);
            }
        }
    }

    #[test]
    fn support_examples() {
        let p = pm(5);
        let c = fourier_support(&WeightFunction::constant(p, rat(3, 2)));
        assert_eq!(c.support_size, 1);
        assert!(c.principal_nonzero);
        let delta = fourier_support(&WeightFunction::indicator(p, [Point::ORIGIN]));
        assert_eq!(delta.support_size, 25);
        let p3 = pm(3);
        let line = fourier_support(&line_y0(p3));
        assert_eq!(line.support_size, 3);
        assert_eq!(line.count(Direction::Slope(0)), 2);
    }

    #[test]
    fn exact_zero_test_agrees_with_numeric_transform() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for q in [3u64, 5, 7] {
            let p = pm(q);
            for _ in 0..200 {
                let k = rng.random_range(1..=(q * q) as usize);
                let entries: Vec<_> = (0..k)
                    .map(|_| {
                        let z = Point::new(
                            rng.random_range(0..q as u32),
                            rng.random_range(0..q as u32),
                        );
                        (z, int(rng.random_range(-2..=2)))
                    })
                    .collect();
                let w = WeightFunction::accumulate(p, entries);
                for a in 0..q as u32 {
                    for b in 0..q as u32 {
                        let chi = Character::new(a, b);
                        let numeric = numeric_transform(&w, chi).norm() < 1e-9;
                        assert_eq!(fourier_is_zero(&w, chi), numeric, "{w:?} {chi:?}");
                    }
                }
                assert_eq!(fourier_support(&w), fourier_support_exhaustive(&w));
            }
        }
    }

    #[test]
    fn uncertainty_examples() {
        let p = pm(5);
        let delta = check_uncertainty(&WeightFunction::indicator(p, [Point::ORIGIN]));
        assert_eq!(delta.lhs, rat(27, 4));
        assert!(delta.holds);
        assert_eq!(delta.rhs, 6);

        for q in [3u64, 5, 7, 11] {
            let p = pm(q);
            let r = check_uncertainty(&line_y0(p));
            let qq = q as i64;
            assert_eq!(r.lhs, rat(qq, 2) + rat(qq, qq - 1));
            assert!(!r.holds);
            assert_eq!(r.constant_direction, Some(Direction::Slope(0)));
        }

        let ones = check_uncertainty(&WeightFunction::constant(p, int(1)));
        assert!(ones.constant_direction.is_some());
        let empty = check_uncertainty(&WeightFunction::empty(p));
        assert_eq!(empty.lhs, int(0));
        assert_eq!(empty.constant_direction, Some(Direction::Slope(0)));
    }

    #[test]
    fn support_bound_examples() {
        let p = pm(5);
        let ones = check_support_bound(&WeightFunction::constant(p, int(1)), 6).unwrap();
        assert_eq!((ones.lhs, ones.rhs, ones.holds), (1, 1, true));
        let h = WeightFunction::indicator(
            p,
            Direction::Slope(3).line_through(p, Point::ORIGIN).points(p),
        );
        let b = check_support_bound(&h, 5).unwrap();
        assert_eq!((b.lhs, b.rhs, b.holds), (5, 5, true));
        assert!(check_support_bound(&h, 7).is_err());
    }
}
