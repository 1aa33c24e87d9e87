//! Weight functions `w: F_p² → Q`, stored sparsely so that the key set is
//! exactly the support `S`.

use std::collections::btree_map::{self, BTreeMap};
use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plane::{AffineMap, Direction, Line, Point, PrimeModulus};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `"num/den"`, always with an explicit denominator.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Inverse of [`format_rational`]; also accepts a bare integer.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Malformed(format!("bad rational {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

/// Exact value of a decimal literal such as `-12.5e-3`.
pub fn parse_decimal(s: &str) -> Result<Rational> {
    let bad = || Error::Malformed(format!("bad decimal {s:?}"));
    let t = s.trim();
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part
            .bytes()
            .chain(frac_part.bytes())
            .all(|b| b.is_ascii_digit())
    {
        return Err(bad());
    }
    let all: BigInt = format!("{int_part}{frac_part}0")
        .parse()
        .map_err(|_| bad())?;
    let scale = exp - frac_part.len() as i32 - 1;
    let ten = BigInt::from(10);
    let mut value = Rational::from_integer(all);
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -value } else { value })
}

/// A rational weight function on F_p². Every stored value is nonzero.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeightFunction {
    p: PrimeModulus,
    entries: BTreeMap<Point, Rational>,
}

impl WeightFunction {
    pub fn empty(p: PrimeModulus) -> Self {
        WeightFunction {
            p,
            entries: BTreeMap::new(),
        }
    }

    /// Builds a weight from `(point, value)` pairs. Zero values and
    /// repeated points are rejected.
    pub fn from_entries<I>(p: PrimeModulus, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Point, Rational)>,
    {
        let mut w = Self::empty(p);
        for (z, v) in entries {
            if z.x >= p.get() || z.y >= p.get() {
                return Err(Error::CoordinateOutOfRange {
                    x: z.x.into(),
                    y: z.y.into(),
                    p: p.get(),
                });
            }
            if v.is_zero() {
                return Err(Error::ZeroWeight { x: z.x, y: z.y });
            }
            if w.entries.insert(z, v).is_some() {
                return Err(Error::DuplicateEntry { x: z.x, y: z.y });
            }
        }
        Ok(w)
    }

    /// Like [`from_entries`](Self::from_entries) but silently drops zeros
    /// and adds up repeated points.
    pub fn accumulate<I>(p: PrimeModulus, entries: I) -> Self
    where
        I: IntoIterator<Item = (Point, Rational)>,
    {
        let mut map: BTreeMap<Point, Rational> = BTreeMap::new();
        for (z, v) in entries {
            debug_assert!(z.x < p.get() && z.y < p.get());
            *map.entry(z).or_insert_with(Rational::zero) += v;
        }
        map.retain(|_, v| !v.is_zero());
        WeightFunction { p, entries: map }
    }

    /// Indicator function of a set of points.
    pub fn indicator<I: IntoIterator<Item = Point>>(p: PrimeModulus, points: I) -> Self {
        Self::accumulate(p, points.into_iter().map(|z| (z, Rational::one())))
            .map_values(|_| Rational::one())
    }

    /// The constant function `c` on all of F_p² (empty when `c = 0`).
    pub fn constant(p: PrimeModulus, c: Rational) -> Self {
        if c.is_zero() {
            return Self::empty(p);
        }
        WeightFunction {
            p,
            entries: crate::plane::all_points(p)
                .map(|z| (z, c.clone()))
                .collect(),
        }
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `(point, value)` pairs in point order.
    pub fn iter(&self) -> btree_map::Iter<'_, Point, Rational> {
        self.entries.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = Point> + '_ {
        self.entries.keys().copied()
    }

    pub fn get(&self, z: Point) -> Option<&Rational> {
        self.entries.get(&z)
    }

    /// Value at `z`, zero off the support.
    pub fn value(&self, z: Point) -> Rational {
        self.entries.get(&z).cloned().unwrap_or_else(Rational::zero)
    }

    /// Distinct values taken on the support.
    pub fn distinct_values(&self) -> Vec<Rational> {
        let mut v: Vec<Rational> = self.entries.values().cloned().collect();
        v.sort();
        v.dedup();
        v
    }

    fn map_values(mut self, f: impl Fn(&Rational) -> Rational) -> Self {
        for v in self.entries.values_mut() {
            *v = f(v);
        }
        self
    }

    /// `c·w`. Scaling by zero gives the empty function.
    pub fn scaled(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::empty(self.p);
        }
        self.clone().map_values(|v| v * c)
    }

    /// Sum of all values.
    pub fn total_mass(&self) -> Rational {
        self.entries
            .values()
            .fold(Rational::zero(), |acc, v| acc + v)
    }

    /// Sum of `w` over the points of `l`.
    pub fn line_sum(&self, l: &Line) -> Result<Rational> {
        let p = self.p;
        if !l.direction.is_valid(p) || l.offset >= p.get() {
            return Err(Error::InvalidArgument(format!(
                "line {:?} does not belong to the plane mod {p}",
                l
            )));
        }
        Ok(self
            .entries
            .iter()
            .filter(|(z, _)| l.contains(p, **z))
            .fold(Rational::zero(), |acc, (_, v)| acc + v))
    }

    /// Sums over all p lines of the pencil of `d`, indexed by offset.
    pub fn line_sums(&self, d: Direction) -> Vec<Rational> {
        let p = self.p;
        let mut sums = vec![Rational::zero(); p.get() as usize];
        for (z, v) in &self.entries {
            sums[d.offset_of(p, *z) as usize] += v;
        }
        sums
    }

    /// Number of support points on each line of the pencil of `d`.
    pub fn line_counts(&self, d: Direction) -> Vec<usize> {
        let p = self.p;
        let mut counts = vec![0usize; p.get() as usize];
        for z in self.entries.keys() {
            counts[d.offset_of(p, *z) as usize] += 1;
        }
        counts
    }

    /// True when `w`, extended by zero, is constant along every line of
    /// the pencil of `d`.
    pub fn is_line_constant(&self, d: Direction) -> bool {
        let p = self.p;
        let full = p.get() as usize;
        let mut first: HashMap<u32, (&Rational, usize)> = HashMap::new();
        for (z, v) in &self.entries {
            let e = first.entry(d.offset_of(p, *z)).or_insert((v, 0));
            if e.0 != v {
                return false;
            }
            e.1 += 1;
        }
        first.values().all(|&(_, n)| n == full)
    }

    /// Image of `w` under `m`: the result takes the value `w(z)` at `m(z)`.
    pub fn transform(&self, m: &AffineMap) -> Result<Self> {
        if m.modulus() != self.p {
            return Err(Error::ModulusMismatch(m.modulus().get(), self.p.get()));
        }
        Ok(WeightFunction {
            p: self.p,
            entries: self
                .entries
                .iter()
                .map(|(z, v)| (m.apply(*z), v.clone()))
                .collect(),
        })
    }

    pub fn to_doc(&self) -> WeightDoc {
        WeightDoc {
            p: self.p.as_u64(),
            entries: self
                .entries
                .iter()
                .map(|(z, v)| EntryDoc {
                    x: z.x.into(),
                    y: z.y.into(),
                    num: v.numer().to_string(),
                    den: v.denom().to_string(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("weight serialization cannot fail")
    }

    pub fn from_doc(doc: &WeightDoc) -> Result<Self> {
        let p = PrimeModulus::new(doc.p)?;
        let mut entries = Vec::with_capacity(doc.entries.len());
        for e in &doc.entries {
            let z = Point::checked(p, e.x, e.y)?;
            let num: BigInt = e
                .num
                .parse()
                .map_err(|_| Error::Malformed(format!("bad numerator {:?}", e.num)))?;
            let den: BigInt = e
                .den
                .parse()
                .map_err(|_| Error::Malformed(format!("bad denominator {:?}", e.den)))?;
            if den.is_zero() {
                return Err(Error::ZeroDenominator { x: z.x, y: z.y });
            }
            if num.is_zero() {
                return Err(Error::ZeroWeight { x: z.x, y: z.y });
            }
            entries.push((z, Rational::new(num, den)));
        }
        Self::from_entries(p, entries)
    }
}

/// Applies an invertible affine map to a weight function.
pub fn transform_weight(m: &AffineMap, w: &WeightFunction) -> Result<WeightFunction> {
    w.transform(m)
}

/// Parses the weight JSON document `{"p": .., "entries": [{"x","y","num","den"}]}`.
pub fn parse_weight(json: &str) -> Result<WeightFunction> {
    let doc: WeightDoc = serde_json::from_str(json).map_err(|e| Error::Malformed(e.to_string()))?;
    WeightFunction::from_doc(&doc)
}

/// Integers in documents may be written as JSON numbers or as strings.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum IntLit {
    Num(i64),
    Str(String),
}

impl From<IntLit> for String {
    fn from(v: IntLit) -> String {
        match v {
            IntLit::Num(n) => n.to_string(),
            IntLit::Str(s) => s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryDoc {
    pub x: i64,
    pub y: i64,
    #[serde(deserialize_with = "de_int_string")]
    pub num: String,
    #[serde(deserialize_with = "de_int_string")]
    pub den: String,
}

fn de_int_string<'de, D: serde::Deserializer<'de>>(de: D) -> std::result::Result<String, D::Error> {
    IntLit::deserialize(de).map(String::from)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightDoc {
    pub p: u64,
    pub entries: Vec<EntryDoc>,
}

/// A real-valued weight given by exact decimal literals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealWeightInput {
    p: PrimeModulus,
    entries: BTreeMap<Point, Rational>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RealEntryDoc {
    x: i64,
    y: i64,
    value: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RealWeightDoc {
    p: u64,
    entries: Vec<RealEntryDoc>,
}

impl RealWeightInput {
    pub fn new<'a, I>(p: PrimeModulus, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Point, &'a str)>,
    {
        let mut map = BTreeMap::new();
        for (z, s) in entries {
            if z.x >= p.get() || z.y >= p.get() {
                return Err(Error::CoordinateOutOfRange {
                    x: z.x.into(),
                    y: z.y.into(),
                    p: p.get(),
                });
            }
            let v = parse_decimal(s)?;
            if v.is_zero() {
                return Err(Error::ZeroWeight { x: z.x, y: z.y });
            }
            if map.insert(z, v).is_some() {
                return Err(Error::DuplicateEntry { x: z.x, y: z.y });
            }
        }
        Ok(RealWeightInput { p, entries: map })
    }

    /// Parses `{"p": .., "entries": [{"x","y","value": "<decimal>"}]}`.
    pub fn parse(json: &str) -> Result<Self> {
        let doc: RealWeightDoc =
            serde_json::from_str(json).map_err(|e| Error::Malformed(e.to_string()))?;
        let p = PrimeModulus::new(doc.p)?;
        let pts = doc
            .entries
            .iter()
            .map(|e| Point::checked(p, e.x, e.y).map(|z| (z, e.value.as_str())))
            .collect::<Result<Vec<_>>>()?;
        Self::new(p, pts)
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    pub fn iter(&self) -> btree_map::Iter<'_, Point, Rational> {
        self.entries.iter()
    }
}

/// Outcome of [`rationalize`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rationalized {
    /// `w_Q / Q`.
    pub weight: WeightFunction,
    /// The integer-valued `w_Q`.
    pub integer_weight: WeightFunction,
    pub q: u64,
    /// `max |w(z) - w_Q(z)/Q|`.
    pub max_error: Rational,
}

/// Finds the smallest `Q <= max_q` such that rounding `Q·w` to the nearest
/// integers gives `w_Q` with `|w - w_Q/Q| < 1/(2pQ)` everywhere, the same
/// support, and the same pattern of equal values.
pub fn rationalize(input: &RealWeightInput, max_q: u64) -> Result<Rationalized> {
    if max_q == 0 {
        return Err(Error::InvalidArgument("maxQ must be at least 1".into()));
    }
    let p = input.p;
    let two_p = BigInt::from(2 * p.as_u64());
    let half = rat(1, 2);
    'scan: for q in 1..=max_q {
        let qr = Rational::from_integer(BigInt::from(q));
        let mut rounded: Vec<(Point, BigInt)> = Vec::with_capacity(input.entries.len());
        let mut seen: HashMap<BigInt, &Rational> = HashMap::new();
        for (z, v) in &input.entries {
            let t = v * &qr;
            let r = (&t + &half).floor().to_integer();
            if r.is_zero() {
                continue 'scan;
            }
            // |t - r| < 1/(2p)  ⟺  2p·|t - r| < 1
            let gap = (t - Rational::from_integer(r.clone())).abs();
            if gap * Rational::from_integer(two_p.clone()) >= Rational::one() {
                continue 'scan;
            }
            match seen.get(&r) {
                Some(&prev) if prev != v => continue 'scan,
                _ => {
                    seen.insert(r.clone(), v);
                }
            }
            rounded.push((*z, r));
        }
        let max_error = input
            .entries
            .values()
            .zip(&rounded)
            .map(|(v, (_, r))| (v - Rational::new(r.clone(), BigInt::from(q))).abs())
            .max()
            .unwrap_or_else(Rational::zero);
        let integer_weight = WeightFunction::from_entries(
            p,
            rounded
                .iter()
                .map(|(z, r)| (*z, Rational::from_integer(r.clone()))),
        )?;
        let weight = integer_weight.scaled(&Rational::new(BigInt::one(), BigInt::from(q)));
        return Ok(Rationalized {
            weight,
            integer_weight,
            q,
            max_error,
        });
    }
    Err(Error::NoAdmissibleDenominator(max_q))
}

/// Least common multiple of all denominators; `c·w` is integer-valued for
/// this `c`.
pub fn common_denominator(w: &WeightFunction) -> BigInt {
    w.iter()
        .fold(BigInt::one(), |acc, (_, v)| acc.lcm(v.denom()))
}
