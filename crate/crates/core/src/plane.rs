//! The affine plane F_p²: points, the p+1 directions, the lines of each
//! pencil, and invertible affine maps.
//!
//! A direction is stored by its slope. Slope `s` is the pencil of lines
//! `{(x, s·x + c)}` and corresponds to the subgroup spanned by `(1, s)`;
//! the vertical direction (`Infinity`) is the pencil `{(c, y)}` and
//! corresponds to the subgroup spanned by `(0, 1)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default upper bound on the modulus accepted by analysis operations.
pub const MAX_MODULUS: u32 = 10007;

/// An odd prime `p` with `3 <= p <= cap`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u32")]
pub struct PrimeModulus(u32);

impl PrimeModulus {
    pub fn new(p: u64) -> Result<Self> {
        Self::with_cap(p, MAX_MODULUS)
    }

    /// Like [`PrimeModulus::new`] but with an explicit upper bound.
    pub fn with_cap(p: u64, cap: u32) -> Result<Self> {
        if p < 3 || p > u64::from(cap) || !is_prime(p) {
            return Err(Error::InvalidModulus(p, cap));
        }
        Ok(PrimeModulus(p as u32))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn as_u64(self) -> u64 {
        u64::from(self.0)
    }

    /// Number of directions, `p + 1`.
    #[inline]
    pub fn direction_count(self) -> usize {
        self.0 as usize + 1
    }

    #[inline]
    pub fn reduce(self, v: i64) -> u32 {
        v.rem_euclid(i64::from(self.0)) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        ((u64::from(a) + u64::from(b)) % self.as_u64()) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        ((u64::from(a) + self.as_u64() - u64::from(b)) % self.as_u64()) as u32
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((u64::from(a) * u64::from(b)) % self.as_u64()) as u32
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        self.sub(0, a)
    }

    pub fn pow(self, base: u32, mut exp: u64) -> u32 {
        let m = self.as_u64();
        let mut b = u64::from(base) % m;
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * b % m;
            }
            b = b * b % m;
            exp >>= 1;
        }
        acc as u32
    }

    /// Multiplicative inverse of a nonzero residue.
    pub fn inv(self, a: u32) -> u32 {
        debug_assert!(!a.is_multiple_of(self.0), "inverse of zero");
        self.pow(a, self.as_u64() - 2)
    }

    /// Legendre symbol `(a/p)` as -1, 0 or 1 (Euler's criterion).
    pub fn legendre(self, a: i64) -> i32 {
        let r = self.reduce(a);
        if r == 0 {
            return 0;
        }
        if self.pow(r, (self.as_u64() - 1) / 2) == 1 {
            1
        } else {
            -1
        }
    }
}

impl TryFrom<u64> for PrimeModulus {
    type Error = Error;
    fn try_from(p: u64) -> Result<Self> {
        PrimeModulus::new(p)
    }
}

impl From<PrimeModulus> for u32 {
    fn from(p: PrimeModulus) -> u32 {
        p.0
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Trial division; the moduli involved are tiny.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// A point of F_p², coordinates already reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Point {
    pub x: u32,
    pub y: u32,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0, y: 0 };

    #[inline]
    pub const fn new(x: u32, y: u32) -> Self {
        Point { x, y }
    }

    /// Checked constructor from arbitrary integers.
    pub fn checked(p: PrimeModulus, x: i64, y: i64) -> Result<Self> {
        let m = i64::from(p.get());
        if !(0..m).contains(&x) || !(0..m).contains(&y) {
            return Err(Error::CoordinateOutOfRange { x, y, p: p.get() });
        }
        Ok(Point::new(x as u32, y as u32))
    }

    pub fn add(self, p: PrimeModulus, other: Point) -> Point {
        Point::new(p.add(self.x, other.x), p.add(self.y, other.y))
    }

    pub fn sub(self, p: PrimeModulus, other: Point) -> Point {
        Point::new(p.sub(self.x, other.x), p.sub(self.y, other.y))
    }

    /// Row-major index `x·p + y` into a dense p² array.
    #[inline]
    pub fn index(self, p: PrimeModulus) -> usize {
        self.x as usize * p.get() as usize + self.y as usize
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// All p² points in row-major order.
pub fn all_points(p: PrimeModulus) -> impl Iterator<Item = Point> {
    let m = p.get();
    (0..m).flat_map(move |x| (0..m).map(move |y| Point::new(x, y)))
}

/// One of the p+1 pencils of parallel lines.
///
/// The derived ordering (all slopes ascending, then `Infinity`) is the
/// canonical order used in every report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Slope(u32),
    Infinity,
}

impl Direction {
    /// Position in canonical order: slope `s` is `s`, `Infinity` is `p`.
    #[inline]
    pub fn index(self, p: PrimeModulus) -> usize {
        match self {
            Direction::Slope(s) => s as usize,
            Direction::Infinity => p.get() as usize,
        }
    }

    pub fn from_index(p: PrimeModulus, i: usize) -> Direction {
        if i == p.get() as usize {
            Direction::Infinity
        } else {
            Direction::Slope(i as u32)
        }
    }

    pub fn is_valid(self, p: PrimeModulus) -> bool {
        match self {
            Direction::Slope(s) => s < p.get(),
            Direction::Infinity => true,
        }
    }

    /// Generator of the subgroup H of F_p² this direction corresponds to.
    pub fn generator(self) -> Point {
        match self {
            Direction::Slope(s) => Point::new(1, s),
            Direction::Infinity => Point::new(0, 1),
        }
    }

    /// Direction of a nonzero vector.
    pub fn of_vector(p: PrimeModulus, v: Point) -> Result<Direction> {
        match (v.x, v.y) {
            (0, 0) => Err(Error::EqualPoints),
            (0, _) => Ok(Direction::Infinity),
            (dx, dy) => Ok(Direction::Slope(p.mul(dy, p.inv(dx)))),
        }
    }

    /// Offset of the line of this pencil through `z`.
    #[inline]
    pub fn offset_of(self, p: PrimeModulus, z: Point) -> u32 {
        match self {
            Direction::Slope(s) => p.sub(z.y, p.mul(s, z.x)),
            Direction::Infinity => z.x,
        }
    }

    /// The line of this pencil through `z`.
    pub fn line_through(self, p: PrimeModulus, z: Point) -> Line {
        Line {
            direction: self,
            offset: self.offset_of(p, z),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Slope(s) => s.fmt(f),
            Direction::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Direction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inf" | "∞" => Ok(Direction::Infinity),
            _ => s
                .parse::<u32>()
                .map(Direction::Slope)
                .map_err(|_| Error::Malformed(format!("bad direction {s:?}"))),
        }
    }
}

impl Serialize for Direction {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Direction {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The p+1 directions in canonical order: slopes 0..p-1, then ∞.
pub fn enumerate_directions(p: PrimeModulus) -> Vec<Direction> {
    (0..p.direction_count())
        .map(|i| Direction::from_index(p, i))
        .collect()
}

/// A line: slope `s` with offset `c` is `{(x, s·x + c)}`; the vertical
/// line with offset `c` is `{(c, y)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Line {
    pub direction: Direction,
    pub offset: u32,
}

impl Line {
    pub fn points(self, p: PrimeModulus) -> impl Iterator<Item = Point> {
        let m = p.get();
        (0..m).map(move |t| match self.direction {
            Direction::Slope(s) => Point::new(t, p.add(p.mul(s, t), self.offset)),
            Direction::Infinity => Point::new(self.offset, t),
        })
    }

    pub fn contains(self, p: PrimeModulus, z: Point) -> bool {
        self.direction.offset_of(p, z) == self.offset
    }
}

/// The p lines of one pencil, ordered by offset.
pub fn lines_in_direction(p: PrimeModulus, d: Direction) -> Vec<Line> {
    debug_assert!(d.is_valid(p));
    (0..p.get())
        .map(|offset| Line {
            direction: d,
            offset,
        })
        .collect()
}

/// The unique direction of the line through two distinct points.
pub fn direction_of_pair(p: PrimeModulus, z1: Point, z2: Point) -> Result<Direction> {
    Direction::of_vector(p, z2.sub(p, z1))
}

/// `z ↦ M·z + t` with `det M ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AffineMap {
    p: PrimeModulus,
    matrix: [[u32; 2]; 2],
    translation: Point,
}

impl AffineMap {
    pub fn new(p: PrimeModulus, matrix: [[i64; 2]; 2], translation: Point) -> Result<Self> {
        let m = [
            [p.reduce(matrix[0][0]), p.reduce(matrix[0][1])],
            [p.reduce(matrix[1][0]), p.reduce(matrix[1][1])],
        ];
        let map = AffineMap {
            p,
            matrix: m,
            translation: Point::new(translation.x % p.get(), translation.y % p.get()),
        };
        if map.determinant() == 0 {
            return Err(Error::SingularMatrix(p.get()));
        }
        Ok(map)
    }

    pub fn identity(p: PrimeModulus) -> Self {
        AffineMap {
            p,
            matrix: [[1, 0], [0, 1]],
            translation: Point::ORIGIN,
        }
    }

    pub fn translation(p: PrimeModulus, t: Point) -> Self {
        AffineMap {
            translation: t,
            ..Self::identity(p)
        }
    }

    pub fn linear(p: PrimeModulus, matrix: [[i64; 2]; 2]) -> Result<Self> {
        Self::new(p, matrix, Point::ORIGIN)
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    pub fn matrix(&self) -> [[u32; 2]; 2] {
        self.matrix
    }

    pub fn translation_part(&self) -> Point {
        self.translation
    }

    pub fn determinant(&self) -> u32 {
        let [[a, b], [c, d]] = self.matrix;
        self.p.sub(self.p.mul(a, d), self.p.mul(b, c))
    }

    #[inline]
    pub fn apply_linear(&self, v: Point) -> Point {
        let p = self.p;
        let [[a, b], [c, d]] = self.matrix;
        Point::new(
            p.add(p.mul(a, v.x), p.mul(b, v.y)),
            p.add(p.mul(c, v.x), p.mul(d, v.y)),
        )
    }

    #[inline]
    pub fn apply(&self, z: Point) -> Point {
        self.apply_linear(z).add(self.p, self.translation)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &AffineMap) -> AffineMap {
        let p = self.p;
        let [[a, b], [c, d]] = self.matrix;
        let [[e, f], [g, h]] = other.matrix;
        let matrix = [
            [
                p.add(p.mul(a, e), p.mul(b, g)),
                p.add(p.mul(a, f), p.mul(b, h)),
            ],
            [
                p.add(p.mul(c, e), p.mul(d, g)),
                p.add(p.mul(c, f), p.mul(d, h)),
            ],
        ];
        AffineMap {
            p,
            matrix,
            translation: self.apply(other.translation),
        }
    }

    pub fn inverse(&self) -> AffineMap {
        let p = self.p;
        let [[a, b], [c, d]] = self.matrix;
        let k = p.inv(self.determinant());
        let matrix = [
            [p.mul(d, k), p.mul(p.neg(b), k)],
            [p.mul(p.neg(c), k), p.mul(a, k)],
        ];
        let lin = AffineMap {
            p,
            matrix,
            translation: Point::ORIGIN,
        };
        let t = lin.apply_linear(self.translation);
        AffineMap {
            translation: Point::new(p.neg(t.x), p.neg(t.y)),
            ..lin
        }
    }

    /// The permutation of directions induced by the map.
    pub fn map_direction(&self, d: Direction) -> Direction {
        Direction::of_vector(self.p, self.apply_linear(d.generator()))
            .expect("invertible map sends nonzero vectors to nonzero vectors")
    }
}

/// Every invertible 2×2 matrix over F_p, in lexicographic order of entries.
pub fn general_linear_group(p: PrimeModulus) -> Vec<AffineMap> {
    let m = i64::from(p.get());
    let mut out = Vec::new();
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                for d in 0..m {
                    if let Ok(map) = AffineMap::linear(p, [[a, b], [c, d]]) {
                        out.push(map);
                    }
                }
            }
        }
    }
    out
}
