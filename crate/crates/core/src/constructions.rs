//! Weight functions that attain (or nearly attain) the bound `N ≤ |S|/2`,
//! each paired with the counts it is expected to produce.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::analysis::{perfect_directions, verify_main_theorem};
use crate::error::{Error, Result};
use crate::plane::{direction_of_pair, Direction, Point, PrimeModulus};
use crate::weights::{rat, Rational, WeightDoc, WeightFunction};

/// The rotation `[[a, -b], [b, a]]` with `a² + b² = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RotationMatrix {
    pub a: u32,
    pub b: u32,
}

impl RotationMatrix {
    pub const IDENTITY: RotationMatrix = RotationMatrix { a: 1, b: 0 };

    pub fn new(p: PrimeModulus, a: u32, b: u32) -> Result<Self> {
        if a >= p.get() || b >= p.get() || p.add(p.mul(a, a), p.mul(b, b)) != 1 {
            return Err(Error::InvalidArgument(format!(
                "({a}, {b}) is not a rotation mod {p}"
            )));
        }
        Ok(RotationMatrix { a, b })
    }

    pub fn compose(self, p: PrimeModulus, other: RotationMatrix) -> RotationMatrix {
        RotationMatrix {
            a: p.sub(p.mul(self.a, other.a), p.mul(self.b, other.b)),
            b: p.add(p.mul(self.a, other.b), p.mul(self.b, other.a)),
        }
    }

    pub fn apply(self, p: PrimeModulus, z: Point) -> Point {
        Point::new(
            p.sub(p.mul(self.a, z.x), p.mul(self.b, z.y)),
            p.add(p.mul(self.b, z.x), p.mul(self.a, z.y)),
        )
    }

    pub fn order(self, p: PrimeModulus) -> usize {
        let mut g = self;
        let mut k = 1;
        while g != Self::IDENTITY {
            g = g.compose(p, self);
            k += 1;
        }
        k
    }
}

/// `|SO(2, p)| = p - (-1/p)`.
pub fn so2_order(p: PrimeModulus) -> usize {
    (p.as_u64() as i64 - i64::from(p.legendre(-1))) as usize
}

/// All of SO(2, p) as `[1, g, g², …]`, where `g` is the first element of
/// maximal order in lexicographic `(a, b)` order.
pub fn so2_group(p: PrimeModulus) -> Vec<RotationMatrix> {
    let m = p.get();
    let mut best: Option<(usize, RotationMatrix)> = None;
    for a in 0..m {
        for b in 0..m {
            if p.add(p.mul(a, a), p.mul(b, b)) != 1 {
                continue;
            }
            let r = RotationMatrix { a, b };
            let ord = r.order(p);
            if best.is_none_or(|(o, _)| ord > o) {
                best = Some((ord, r));
            }
        }
    }
    let (ord, g) = best.expect("identity is always a solution");
    let mut out = Vec::with_capacity(ord);
    let mut cur = RotationMatrix::IDENTITY;
    for _ in 0..ord {
        out.push(cur);
        cur = cur.compose(p, g);
    }
    out
}

/// A construction together with the counts it should produce.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionResult {
    pub w: WeightFunction,
    pub predicted_n: usize,
    pub predicted_d: Option<usize>,
    pub notes: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConstructionDoc {
    pub weight: WeightDoc,
    #[serde(rename = "predictedN")]
    pub predicted_n: usize,
    #[serde(rename = "predictedD")]
    pub predicted_d: Option<usize>,
    pub notes: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check: Option<ConstructionCheck>,
}

/// Predictions compared with what the analysis computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConstructionCheck {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "D")]
    pub d: usize,
    pub n_matches: bool,
    pub d_matches: bool,
    pub theorem_pass: bool,
}

impl ConstructionCheck {
    pub fn ok(&self) -> bool {
        self.n_matches && self.d_matches && self.theorem_pass
    }
}

impl ConstructionResult {
    pub fn check(&self) -> Result<ConstructionCheck> {
        let report = perfect_directions(&self.w)?;
        let verdict = verify_main_theorem(&self.w)?;
        Ok(ConstructionCheck {
            n: report.n,
            d: report.d,
            n_matches: report.n == self.predicted_n,
            d_matches: self.predicted_d.is_none_or(|d| d == report.d),
            theorem_pass: verdict.pass,
        })
    }

    pub fn to_doc(&self, check: Option<ConstructionCheck>) -> ConstructionDoc {
        ConstructionDoc {
            weight: self.w.to_doc(),
            predicted_n: self.predicted_n,
            predicted_d: self.predicted_d,
            notes: self.notes.clone(),
            check,
        }
    }
}

/// `S` is the orbit of `z` under the order-`2n` subgroup `H` of SO(2, p);
/// `w = +1` on the orbit of the index-two subgroup `H₀`, `-1` on the rest.
/// `z` must be nonzero and non-isotropic.
pub fn so2_orbit_example(p: PrimeModulus, n: usize, z: Point) -> Result<ConstructionResult> {
    let order = so2_order(p);
    if n == 0 || !order.is_multiple_of(2 * n) {
        return Err(Error::InvalidArgument(format!(
            "2n = {} does not divide |SO(2, {p})| = {order}",
            2 * n
        )));
    }
    if z == Point::ORIGIN {
        return Err(Error::InvalidArgument(
            "base point must be nonzero".to_string(),
        ));
    }
    if z.x >= p.get() || z.y >= p.get() {
        return Err(Error::CoordinateOutOfRange {
            x: z.x.into(),
            y: z.y.into(),
            p: p.get(),
        });
    }
    // On an isotropic line (x² + y² = 0, only when -1 is a square) the
    // rotations act by scalars, so the orbit would be collinear.
    if p.add(p.mul(z.x, z.x), p.mul(z.y, z.y)) == 0 {
        return Err(Error::InvalidArgument(format!(
            "base point {z} is isotropic (x^2 + y^2 = 0 mod {p})"
        )));
    }
    let group = so2_group(p);
    let step = order / (2 * n);
    // H = ⟨g^step⟩; the even powers of its generator form H₀.
    let entries = (0..2 * n).map(|k| {
        let rot = group[k * step];
        let value = if k % 2 == 0 {
            Rational::one()
        } else {
            -Rational::one()
        };
        (rot.apply(p, z), value)
    });
    let w = WeightFunction::from_entries(p, entries)?;
    Ok(ConstructionResult {
        w,
        predicted_n: n,
        predicted_d: None,
        notes: format!(
            "orbit of {z} under the order-{} subgroup of SO(2,{p}); +1 on the order-{n} suborbit, -1 elsewhere",
            2 * n
        ),
    })
}

/// Directions of lines through two support points carrying different values.
pub fn mixed_value_directions(w: &WeightFunction) -> Vec<Direction> {
    let p = w.modulus();
    let entries: Vec<_> = w.iter().collect();
    let mut dirs = BTreeSet::new();
    for (i, (za, va)) in entries.iter().enumerate() {
        for (zb, vb) in &entries[i + 1..] {
            if va != vb {
                dirs.insert(direction_of_pair(p, **za, **zb).expect("distinct keys"));
            }
        }
    }
    dirs.into_iter().collect()
}

/// Indicator of the graph of `z ↦ z^((p+1)/2)`.
pub fn power_graph_example(p: PrimeModulus) -> ConstructionResult {
    let e = p.as_u64().div_ceil(2);
    let w = WeightFunction::indicator(p, (0..p.get()).map(|x| Point::new(x, p.pow(x, e))));
    let q = p.get() as usize;
    ConstructionResult {
        w,
        predicted_n: (q - 1) / 2,
        predicted_d: Some((q + 3) / 2),
        notes: format!("indicator of the graph of z -> z^{e} over F_{p}"),
    }
}

/// Two lines: `+1` on `y = 0` and `-1` on `x = 0` (the crossing cancels),
/// or `+1` on `y = 0` and `-1` on `y = 1` when `parallel`.
pub fn two_lines_example(p: PrimeModulus, parallel: bool) -> ConstructionResult {
    let m = p.get();
    let first = (0..m).map(|x| (Point::new(x, 0), Rational::one()));
    let q = m as usize;
    if parallel {
        let second = (0..m).map(|x| (Point::new(x, 1), -Rational::one()));
        ConstructionResult {
            w: WeightFunction::accumulate(p, first.chain(second)),
            predicted_n: q,
            predicted_d: None,
            notes: "+1 on y=0, -1 on y=1".to_string(),
        }
    } else {
        let second = (0..m).map(|y| (Point::new(0, y), -Rational::one()));
        ConstructionResult {
            w: WeightFunction::accumulate(p, first.chain(second)),
            predicted_n: q - 1,
            predicted_d: None,
            notes: "+1 on y=0 minus 1 on x=0; the crossing point cancels".to_string(),
        }
    }
}

/// `|S| = p + 2` with nonzero mass and two perfect directions: `1/2` on the
/// unit square, `1` on the diagonal points `(x, x)`, `2 ≤ x ≤ p-1`.
pub fn small_support_example(p: PrimeModulus) -> Result<ConstructionResult> {
    if p.get() < 5 {
        return Err(Error::InvalidArgument(
            "small-support construction needs p >= 5".to_string(),
        ));
    }
    let half = rat(1, 2);
    let square = [(0, 0), (0, 1), (1, 0), (1, 1)]
        .into_iter()
        .map(|(x, y)| (Point::new(x, y), half.clone()));
    let diagonal = (2..p.get()).map(|x| (Point::new(x, x), Rational::one()));
    let w = WeightFunction::from_entries(p, square.chain(diagonal))?;
    debug_assert!(!w.total_mass().is_zero());
    Ok(ConstructionResult {
        w,
        predicted_n: 2,
        predicted_d: None,
        notes: "1/2 on {0,1}^2, 1 on (x,x) for 2 <= x <= p-1".to_string(),
    })
}
