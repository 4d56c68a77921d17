//! Ricci components, scalar curvature and the two families of intermediate
//! positivity conditions, with region membership and boundary extraction.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Block, CrossCurvatures, MetricPoint};
use crate::compensated::Quadratic;
use crate::contour::{chain, march, NodeGrid, Segment};
use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Ricci eigenvalue of each isotropy block; each has multiplicity 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RicciComponents<T> {
    pub r_x: T,
    pub r_y: T,
    pub r_z: T,
}

impl<T: Scalar> RicciComponents<T> {
    pub fn at(m: &MetricPoint<T>) -> Self {
        let [x, y, z] = m.xyz();
        Self::from_triple(x, y, z)
    }

    /// Closed form for an arbitrary positive triple; homogeneous of degree -1.
    pub fn from_triple(x: T, y: T, z: T) -> Self {
        let half = lit::<T>(0.5);
        let twelfth = lit::<T>(1.0 / 12.0);
        let a = x / (y * z);
        let b = z / (x * y);
        let c = y / (x * z);
        Self {
            r_x: half / x + twelfth * (a - b - c),
            r_y: half / y + twelfth * (-a - b + c),
            r_z: half / z + twelfth * (-a + b - c),
        }
    }

    pub fn as_array(&self) -> [T; 3] {
        [self.r_x, self.r_y, self.r_z]
    }

    pub fn of(&self, block: Block) -> T {
        self.as_array()[block.index()]
    }

    /// True when the three eigenvalues agree to `rel_tol` relative to their mean magnitude.
    pub fn is_einstein(&self, rel_tol: T) -> bool {
        let r = self.as_array();
        let scale = (r[0].abs() + r[1].abs() + r[2].abs()) / lit(3.0);
        let spread = (r[0] - r[1]).abs().max((r[1] - r[2]).abs()).max((r[0] - r[2]).abs());
        spread <= rel_tol * scale.max(T::min_positive_value())
    }
}

pub fn ricci_components<T: Scalar>(m: &MetricPoint<T>) -> RicciComponents<T> {
    RicciComponents::at(m)
}

/// Trace of the Ricci tensor over the six orthonormal basis vectors.
pub fn scalar_curvature<T: Scalar>(m: &MetricPoint<T>) -> T {
    let r = RicciComponents::at(m);
    lit::<T>(2.0) * (r.r_x + r.r_y + r.r_z)
}

/// Family of intermediate positivity conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Sums of `d` sectional curvatures (sectional at `d = 1`, Ricci at `d = 5`).
    SecRic,
    /// Multiplicity-constrained sums of `d` Ricci eigenvalues (Ricci at `d = 1`, scalar at `d = 6`).
    RicScal,
}

impl Family {
    pub fn max_level(self) -> u32 {
        match self {
            Family::SecRic => 5,
            Family::RicScal => 6,
        }
    }

    fn max_a(self) -> u32 {
        match self {
            Family::SecRic => 1,
            Family::RicScal => 2,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::SecRic => "sec-ric",
            Family::RicScal => "ric-scal",
        })
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "sec-ric" => Ok(Family::SecRic),
            "ric-scal" => Ok(Family::RicScal),
            other => Err(format!("unknown family '{other}' (expected sec-ric or ric-scal)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CoefficientTriple {
    pub a: u32,
    pub b: u32,
    pub c: u32,
}

impl CoefficientTriple {
    pub const fn new(a: u32, b: u32, c: u32) -> Self {
        Self { a, b, c }
    }

    pub fn level(&self) -> u32 {
        self.a + self.b + self.c
    }

    pub fn admissible(&self, family: Family) -> bool {
        let d = self.level();
        self.a <= family.max_a() && self.b <= 2 && self.c <= 2 && (1..=family.max_level()).contains(&d)
    }

    fn check(&self, family: Family) -> Result<()> {
        if self.admissible(family) {
            Ok(())
        } else {
            Err(Error::Triple { family, a: self.a, b: self.b, c: self.c })
        }
    }
}

impl fmt::Display for CoefficientTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

/// A family together with its level `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RegionSpec {
    pub family: Family,
    pub d: u32,
}

impl RegionSpec {
    pub fn new(family: Family, d: u32) -> Result<Self> {
        if (1..=family.max_level()).contains(&d) {
            Ok(Self { family, d })
        } else {
            Err(Error::Level { family, d })
        }
    }

    pub fn sec_ric(d: u32) -> Result<Self> {
        Self::new(Family::SecRic, d)
    }

    pub fn ric_scal(d: u32) -> Result<Self> {
        Self::new(Family::RicScal, d)
    }
}

impl fmt::Display for RegionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} d={}", self.family, self.d)
    }
}

/// All admissible triples of the given level, in descending lexicographic order.
pub fn enumerate_triples(spec: RegionSpec) -> Vec<CoefficientTriple> {
    let mut out = Vec::new();
    for a in (0..=spec.family.max_a()).rev() {
        for b in (0..=2).rev() {
            for c in (0..=2).rev() {
                if a + b + c == spec.d {
                    out.push(CoefficientTriple::new(a, b, c));
                }
            }
        }
    }
    out
}

/// The two other blocks of `block`, in the order their weights `b` and `c` apply.
fn partners(block: Block) -> (Block, Block) {
    match block {
        Block::B12 => (Block::B34, Block::B56),
        Block::B34 => (Block::B12, Block::B56),
        Block::B56 => (Block::B12, Block::B34),
    }
}

fn sec_ric_unchecked<T: Scalar>(m: &MetricPoint<T>, cross: &CrossCurvatures<T>, block: Block, t: CoefficientTriple) -> T {
    let (p, q) = partners(block);
    let w = |n: u32| T::from_u32(n).unwrap();
    w(t.a) / m.weight(block) + w(t.b) * cross.between(block, p) + w(t.c) * cross.between(block, q)
}

fn ric_scal_unchecked<T: Scalar>(r: &RicciComponents<T>, t: CoefficientTriple) -> T {
    let w = |n: u32| T::from_u32(n).unwrap();
    w(t.a) * r.r_x + w(t.b) * r.r_y + w(t.c) * r.r_z
}

/// `a·K_within + b·K_first-partner + c·K_second-partner` for the basis directions of `block`.
pub fn sec_ric_value<T: Scalar>(m: &MetricPoint<T>, block: Block, t: CoefficientTriple) -> Result<T> {
    t.check(Family::SecRic)?;
    Ok(sec_ric_unchecked(m, &CrossCurvatures::at(m), block, t))
}

/// `a·r_x + b·r_y + c·r_z`.
pub fn ric_scal_value<T: Scalar>(m: &MetricPoint<T>, t: CoefficientTriple) -> Result<T> {
    t.check(Family::RicScal)?;
    Ok(ric_scal_unchecked(&RicciComponents::at(m), t))
}

/// One scalar inequality of a region: `block` is `None` for the ric-scal family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Constraint {
    pub block: Option<Block>,
    pub triple: CoefficientTriple,
}

// Each functional is an integer quadratic in (x, y) over 16xyz (sec-ric) or 12xyz
// (ric-scal). Evaluating the numerator with compensated arithmetic keeps the sign
// right close to L, M and N, where the raw formulas cancel terms of size 1/x.
const WITHIN: [Quadratic; 3] = [
    Quadratic([0, 0, 16, 0, -16, -16]),
    Quadratic([0, 16, 0, -16, -16, 0]),
    Quadratic([0, 0, 0, 0, 16, 0]),
];
const K_XY: Quadratic = Quadratic([-3, 8, 8, -4, -12, -4]);
const K_XZ: Quadratic = Quadratic([1, -4, 0, 4, 4, -4]);
const K_YZ: Quadratic = Quadratic([1, 0, -4, -4, 4, 4]);
const RICCI: [Quadratic; 3] = [
    Quadratic([-1, 2, 8, 0, -8, -8]),
    Quadratic([-1, 8, 2, -8, -8, 0]),
    Quadratic([1, -2, -2, 0, 8, 0]),
];

fn cross_numerator(a: Block, b: Block) -> Quadratic {
    match (a.index().min(b.index()), a.index().max(b.index())) {
        (0, 1) => K_XY,
        (0, 2) => K_XZ,
        _ => K_YZ,
    }
}

impl Constraint {
    /// Value of the functional at `m`.
    pub fn eval<T: Scalar>(&self, m: &MetricPoint<T>) -> T {
        let [x, y, z] = m.xyz();
        self.numerator().eval(x, y) / (lit::<T>(self.denominator_scale()) * x * y * z)
    }

    fn numerator(&self) -> Quadratic {
        let t = self.triple;
        match self.block {
            Some(block) => {
                let (p, q) = partners(block);
                Quadratic::ZERO
                    .add_scaled(t.a, WITHIN[block.index()])
                    .add_scaled(t.b, cross_numerator(block, p))
                    .add_scaled(t.c, cross_numerator(block, q))
            }
            None => Quadratic::ZERO.add_scaled(t.a, RICCI[0]).add_scaled(t.b, RICCI[1]).add_scaled(t.c, RICCI[2]),
        }
    }

    fn denominator_scale(&self) -> f64 {
        if self.block.is_some() {
            16.0
        } else {
            12.0
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.block {
            Some(b) => write!(f, "block {b} triple {}", self.triple),
            None => write!(f, "triple {}", self.triple),
        }
    }
}

/// Every constraint of the region; sec-ric regions range over all three blocks.
pub fn constraints(spec: RegionSpec) -> Vec<Constraint> {
    let triples = enumerate_triples(spec);
    match spec.family {
        Family::SecRic => Block::ALL
            .iter()
            .flat_map(|&b| triples.iter().map(move |&t| Constraint { block: Some(b), triple: t }))
            .collect(),
        Family::RicScal => triples.into_iter().map(|t| Constraint { block: None, triple: t }).collect(),
    }
}

/// Precomputed constraint list for repeated evaluation.
#[derive(Debug, Clone)]
pub struct Region {
    pub spec: RegionSpec,
    constraints: Vec<Constraint>,
    numerators: Vec<Quadratic>,
}

impl Region {
    pub fn new(spec: RegionSpec) -> Self {
        let constraints = constraints(spec);
        let numerators = constraints.iter().map(Constraint::numerator).collect();
        Self { spec, constraints, numerators }
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Smallest constraint value and the first constraint attaining it.
    pub fn min_constraint<T: Scalar>(&self, m: &MetricPoint<T>) -> Witness<T> {
        let [x, y, z] = m.xyz();
        let scale = match self.spec.family {
            Family::SecRic => lit::<T>(16.0),
            Family::RicScal => lit::<T>(12.0),
        };
        let denom = scale * x * y * z;
        let mut best: Option<Witness<T>> = None;
        for (&c, num) in self.constraints.iter().zip(&self.numerators) {
            let value = num.eval(x, y) / denom;
            // NaN compares false, so keep it as the witness
            if best.is_none_or(|w| value < w.value || value.is_nan()) {
                best = Some(Witness { constraint: c, value });
                if value.is_nan() {
                    break;
                }
            }
        }
        best.expect("regions have at least one constraint")
    }

    pub fn membership<T: Scalar>(&self, m: &MetricPoint<T>, margin: T) -> Membership<T> {
        let w = self.min_constraint(m);
        if w.value > margin {
            Membership::Member
        } else {
            Membership::NonMember(w)
        }
    }

    pub fn contains<T: Scalar>(&self, m: &MetricPoint<T>) -> bool {
        self.membership(m, T::zero()).is_member()
    }
}

/// A constraint that fails (or the tightest one), with its value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness<T> {
    pub constraint: Constraint,
    pub value: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Membership<T> {
    Member,
    NonMember(Witness<T>),
}

impl<T> Membership<T> {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member)
    }
}

/// Strict membership: every constraint of `spec` is `> 0`.
pub fn is_member<T: Scalar>(m: &MetricPoint<T>, spec: RegionSpec) -> Membership<T> {
    Region::new(spec).membership(m, T::zero())
}

/// Membership requiring every constraint to exceed `margin`.
pub fn is_member_with_margin<T: Scalar>(m: &MetricPoint<T>, spec: RegionSpec, margin: T) -> Membership<T> {
    Region::new(spec).membership(m, margin)
}

pub const MIN_RESOLUTION: usize = 16;
pub const DEFAULT_RESOLUTION: usize = 512;

/// A piece of a region boundary along which one constraint is the active one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polyline<T> {
    pub constraint: Constraint,
    pub points: Vec<[T; 2]>,
}

/// Zero set of the region's minimum constraint inside the triangle, split into
/// polylines by which constraint is active.
///
/// Nodes sit at `(i/resolution, j/resolution)`; nodes on or outside the triangle
/// boundary are excluded, so curves stop one cell short of it.
pub fn region_boundary<T: Scalar>(spec: RegionSpec, resolution: usize) -> Result<Vec<Polyline<T>>> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::Resolution { got: resolution, min: MIN_RESOLUTION });
    }
    let region = Region::new(spec);
    let n = resolution;
    let scale = T::from_usize(n).unwrap();
    let values: Vec<T> = (0..(n + 1) * (n + 1))
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k % (n + 1), k / (n + 1));
            let x = T::from_usize(i).unwrap() / scale;
            let y = T::from_usize(j).unwrap() / scale;
            match MetricPoint::new(x, y) {
                Ok(m) => region.min_constraint(&m).value,
                Err(_) => T::nan(),
            }
        })
        .collect();
    let grid = NodeGrid { nx: n, ny: n, values };
    let segments = march(&grid);

    // group segments by the constraint active at their midpoint, in first-seen order
    let mut groups: Vec<(Constraint, Vec<Segment<T>>)> = Vec::new();
    for s in segments {
        let [gx, gy] = s.midpoint();
        let Ok(m) = MetricPoint::new(gx / scale, gy / scale) else { continue };
        let active = region.min_constraint(&m).constraint;
        match groups.iter_mut().find(|(c, _)| *c == active) {
            Some((_, v)) => v.push(s),
            None => groups.push((active, vec![s])),
        }
    }
    let mut out = Vec::new();
    for (constraint, segs) in groups {
        for line in chain(&segs) {
            let points = line.into_iter().map(|[gx, gy]| [gx / scale, gy / scale]).collect();
            out.push(Polyline { constraint, points });
        }
    }
    Ok(out)
}
