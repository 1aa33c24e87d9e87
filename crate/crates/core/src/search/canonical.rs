//! Canonical representatives of weight functions under the affine group.
//!
//! A weighted point set is serialized as its sorted list of point indices
//! (`y·p + x`, so rows come first) followed by the values in that point
//! order; the canonical form is the least serialization over the orbit.
//! For p ≤ 5 the whole of AGL(2, p) is scanned. Larger p use a greedy
//! descent over a fixed generating set: the result is always in the orbit
//! and is a fixed point of the procedure, but two members of one orbit may
//! land on different local minima.

use std::cmp::Ordering;
use std::sync::OnceLock;

use crate::plane::{general_linear_group, AffineMap, Point, PrimeModulus};
use crate::weights::{Rational, WeightFunction};

/// Largest modulus for which the full group is scanned.
pub const FULL_GROUP_MAX_P: u32 = 5;

/// Sorted point indices followed by their values.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Form<V> {
    pub points: Vec<u16>,
    pub values: Vec<V>,
}

impl<V: Ord + Clone> Form<V> {
    pub fn new(mut pairs: Vec<(u16, V)>) -> Self {
        pairs.sort_unstable_by_key(|(i, _)| *i);
        let (points, values) = pairs.into_iter().unzip();
        Form { points, values }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn permuted(&self, perm: &[u16]) -> Self {
        Form::new(
            self.points
                .iter()
                .map(|&i| perm[i as usize])
                .zip(self.values.iter().cloned())
                .collect(),
        )
    }
}

/// The affine group as permutations of point indices.
pub struct GroupTable {
    pub p: PrimeModulus,
    pub perms: Vec<Box<[u16]>>,
}

/// Row-major index `y·p + x`.
#[inline]
pub fn index_of(p: PrimeModulus, z: Point) -> u16 {
    (z.y * p.get() + z.x) as u16
}

#[inline]
pub fn point_of(p: PrimeModulus, i: u16) -> Point {
    let m = p.get() as u16;
    Point::new(u32::from(i % m), u32::from(i / m))
}

fn perm_of(map: &AffineMap) -> Box<[u16]> {
    let p = map.modulus();
    let n = (p.get() * p.get()) as u16;
    (0..n)
        .map(|i| index_of(p, map.apply(point_of(p, i))))
        .collect()
}

impl GroupTable {
    fn build(p: PrimeModulus) -> Self {
        let mut perms = Vec::new();
        for lin in general_linear_group(p) {
            for t in crate::plane::all_points(p) {
                let map = AffineMap::translation(p, t).compose(&lin);
                perms.push(perm_of(&map));
            }
        }
        GroupTable { p, perms }
    }

    /// Cached full table for p ∈ {3, 5}.
    pub fn full(p: PrimeModulus) -> Option<&'static GroupTable> {
        static P3: OnceLock<GroupTable> = OnceLock::new();
        static P5: OnceLock<GroupTable> = OnceLock::new();
        match p.get() {
            3 => Some(P3.get_or_init(|| GroupTable::build(p))),
            5 => Some(P5.get_or_init(|| GroupTable::build(p))),
            _ => None,
        }
    }

    fn mask(perm: &[u16], points: &[u16]) -> u32 {
        points.iter().fold(0u32, |m, &i| m | 1 << perm[i as usize])
    }

    /// Permutations fixing the point set of `form` (as a set).
    pub fn stabilizer<V: Ord + Clone>(&self, form: &Form<V>) -> Vec<&[u16]> {
        let target = form.points.iter().fold(0u32, |m, &i| m | 1 << i);
        self.perms
            .iter()
            .filter(|perm| Self::mask(perm, &form.points) == target)
            .map(|b| &**b)
            .collect()
    }

    /// Exact canonical form by scanning every group element.
    pub fn canonical<V: Ord + Clone>(&self, form: &Form<V>) -> Form<V> {
        // p² ≤ 25, so a point set is a u32 mask. For sets of equal size the
        // sorted index lists compare like the masks' lowest differing bit:
        // whichever set owns that bit is smaller.
        let mut best: Option<u32> = None;
        let mut winners: Vec<&[u16]> = Vec::new();
        for perm in &self.perms {
            let img = Self::mask(perm, &form.points);
            let ord = match best {
                None => Ordering::Less,
                Some(b) if b == img => Ordering::Equal,
                Some(b) => {
                    let low = (b ^ img) & (b ^ img).wrapping_neg();
                    if img & low != 0 {
                        Ordering::Less
                    } else {
                        Ordering::Greater
                    }
                }
            };
            match ord {
                Ordering::Less => {
                    best = Some(img);
                    winners.clear();
                    winners.push(perm);
                }
                Ordering::Equal => winners.push(perm),
                Ordering::Greater => {}
            }
        }
        winners
            .into_iter()
            .map(|perm| form.permuted(perm))
            .min()
            .unwrap_or_else(|| form.clone())
    }
}

/// Generating set used by the greedy descent.
pub struct Generators {
    p: PrimeModulus,
    perms: Vec<Box<[u16]>>,
}

fn primitive_root(p: PrimeModulus) -> u32 {
    let m = p.get();
    let order = u64::from(m - 1);
    let mut factors = Vec::new();
    let mut n = order;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            factors.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        factors.push(n);
    }
    (2..m)
        .find(|&g| factors.iter().all(|&f| p.pow(g, order / f) != 1))
        .unwrap_or(1)
}

impl Generators {
    pub fn new(p: PrimeModulus) -> Self {
        let g = i64::from(primitive_root(p));
        let mats: [[[i64; 2]; 2]; 5] = [
            [[g, 0], [0, 1]],
            [[1, 0], [0, g]],
            [[1, 1], [0, 1]],
            [[1, 0], [1, 1]],
            [[0, 1], [1, 0]],
        ];
        let mut perms = Vec::new();
        for m in mats {
            let map = AffineMap::linear(p, m).expect("generators are invertible");
            perms.push(perm_of(&map));
            perms.push(perm_of(&map.inverse()));
        }
        Generators { p, perms }
    }

    /// Least translate of `form` that moves one of its points to the origin.
    fn translation_normal<V: Ord + Clone>(&self, form: &Form<V>) -> Form<V> {
        let p = self.p;
        form.points
            .iter()
            .map(|&u| {
                let o = point_of(p, u);
                Form::new(
                    form.points
                        .iter()
                        .zip(&form.values)
                        .map(|(&i, v)| (index_of(p, point_of(p, i).sub(p, o)), v.clone()))
                        .collect(),
                )
            })
            .min()
            .unwrap_or_else(|| form.clone())
    }

    pub fn descend<V: Ord + Clone>(&self, form: &Form<V>) -> Form<V> {
        let mut cur = self.translation_normal(form);
        'outer: loop {
            for perm in &self.perms {
                let cand = self.translation_normal(&cur.permuted(perm));
                if cand < cur {
                    cur = cand;
                    continue 'outer;
                }
            }
            return cur;
        }
    }
}

/// Canonicalizer for one modulus: exact for p ≤ 5, greedy above.
pub enum Canonicalizer {
    Full(&'static GroupTable),
    Greedy(Generators),
}

impl Canonicalizer {
    pub fn new(p: PrimeModulus) -> Self {
        match GroupTable::full(p) {
            Some(t) => Canonicalizer::Full(t),
            None => Canonicalizer::Greedy(Generators::new(p)),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Canonicalizer::Full(_))
    }

    pub fn canonical<V: Ord + Clone>(&self, form: &Form<V>) -> Form<V> {
        match self {
            Canonicalizer::Full(t) => t.canonical(form),
            Canonicalizer::Greedy(g) => g.descend(form),
        }
    }
}

pub fn form_of(w: &WeightFunction) -> Form<Rational> {
    let p = w.modulus();
    Form::new(
        w.iter()
            .map(|(z, v)| (index_of(p, *z), v.clone()))
            .collect(),
    )
}

pub fn weight_of(p: PrimeModulus, form: &Form<Rational>) -> WeightFunction {
    WeightFunction::from_entries(
        p,
        form.points
            .iter()
            .zip(&form.values)
            .map(|(&i, v)| (point_of(p, i), v.clone())),
    )
    .expect("forms come from valid weights")
}

/// Canonical representative of the affine orbit of `w`.
pub fn affine_canonical(w: &WeightFunction) -> WeightFunction {
    let p = w.modulus();
    let canon = Canonicalizer::new(p).canonical(&form_of(w));
    weight_of(p, &canon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plane::Direction;
    use crate::weights::int;

    fn pm(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    #[test]
    fn group_sizes() {
        assert_eq!(GroupTable::full(pm(3)).unwrap().perms.len(), 432);
        assert_eq!(GroupTable::full(pm(5)).unwrap().perms.len(), 12000);
        assert!(GroupTable::full(pm(7)).is_none());
    }

    #[test]
    fn delta_goes_to_origin() {
        let p = pm(5);
        let w = WeightFunction::indicator(p, [Point::new(3, 4)]);
        assert_eq!(
            affine_canonical(&w),
            WeightFunction::indicator(p, [Point::ORIGIN])
        );
    }

    #[test]
    fn every_line_goes_to_the_same_canonical_line() {
        let p = pm(5);
        let mut forms = std::collections::BTreeSet::new();
        for d in crate::plane::enumerate_directions(p) {
            for l in crate::plane::lines_in_direction(p, d) {
                forms.insert(affine_canonical(&WeightFunction::indicator(p, l.points(p))));
            }
        }
        assert_eq!(forms.len(), 1);
        let canon = forms.into_iter().next().unwrap();
        let expect = WeightFunction::indicator(
            p,
            Direction::Slope(0).line_through(p, Point::ORIGIN).points(p),
        );
        assert_eq!(canon, expect);
    }

    #[test]
    fn canonical_is_idempotent_and_in_orbit() {
        let p = pm(7);
        let w = WeightFunction::from_entries(
            p,
            [
                (Point::new(1, 2), int(3)),
                (Point::new(5, 5), int(-1)),
                (Point::new(6, 0), int(3)),
            ],
        )
        .unwrap();
        let c = affine_canonical(&w);
        assert_eq!(affine_canonical(&c), c);
        assert_eq!(c.len(), 3);
        assert_eq!(c.distinct_values(), w.distinct_values());
    }
}
