//! Scaled Weyl basis of the isotropy representation of SU(3)/T², its bracket
//! coefficients and the pairwise sectional curvatures of the basis planes.
//!
//! The basis is `X_1 = A_12/(2√x)`, `X_2 = S_12/(2√x)`, `X_3 = A_13/(2√y)`,
//! `X_4 = S_13/(2√y)`, `X_5 = A_23/(2√z)`, `X_6 = S_23/(2√z)`; it is orthonormal
//! for the invariant metric `(x, y, z)`.

mod lie;

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

pub use lie::BracketAlgebra;

/// An invariant metric normalized to `x + y + z = 1`; `z` is always derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricPoint<T> {
    x: T,
    y: T,
}

impl<T: Scalar> MetricPoint<T> {
    pub fn new(x: T, y: T) -> Result<Self> {
        let valid = x > T::zero() && y > T::zero() && x + y < T::one();
        if !valid {
            return Err(Error::OutOfDomain { x: x.to_f64_lossy(), y: y.to_f64_lossy() });
        }
        Ok(Self { x, y })
    }

    /// Builds a point from an unnormalized positive triple by scaling onto the simplex.
    pub fn from_unnormalized(x: T, y: T, z: T) -> Result<Self> {
        if !(x > T::zero() && y > T::zero() && z > T::zero()) {
            return Err(Error::NonPositiveState {
                x: x.to_f64_lossy(),
                y: y.to_f64_lossy(),
                z: z.to_f64_lossy(),
            });
        }
        let s = x + y + z;
        Self::new(x / s, y / s)
    }

    #[inline]
    pub fn x(&self) -> T {
        self.x
    }

    #[inline]
    pub fn y(&self) -> T {
        self.y
    }

    #[inline]
    pub fn z(&self) -> T {
        T::one() - self.x - self.y
    }

    #[inline]
    pub fn xyz(&self) -> [T; 3] {
        [self.x, self.y, self.z()]
    }

    /// Block weight for `block`.
    #[inline]
    pub fn weight(&self, block: Block) -> T {
        match block {
            Block::B12 => self.x,
            Block::B34 => self.y,
            Block::B56 => self.z(),
        }
    }
}

/// One of the three 2-dimensional isotropy summands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Block {
    /// `span{X_1, X_2}`, weight `x`.
    B12,
    /// `span{X_3, X_4}`, weight `y`.
    B34,
    /// `span{X_5, X_6}`, weight `z`.
    B56,
}

impl Block {
    pub const ALL: [Block; 3] = [Block::B12, Block::B34, Block::B56];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Block::B12 => "12",
            Block::B34 => "34",
            Block::B56 => "56",
        }
    }

    pub fn parse(s: &str) -> Option<Block> {
        match s {
            "12" => Some(Block::B12),
            "34" => Some(Block::B34),
            "56" => Some(Block::B56),
            _ => None,
        }
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Label `i ∈ 1..=6` of a basis vector `X_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BasisIndex(u8);

impl BasisIndex {
    pub fn new(i: usize) -> Result<Self> {
        if (1..=6).contains(&i) {
            Ok(Self(i as u8))
        } else {
            Err(Error::BasisIndex(i))
        }
    }

    pub fn all() -> impl Iterator<Item = BasisIndex> {
        (1..=6u8).map(BasisIndex)
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0 as usize
    }

    /// Zero-based position, for array indexing.
    #[inline]
    pub fn offset(self) -> usize {
        self.0 as usize - 1
    }

    #[inline]
    pub fn block(self) -> Block {
        match self.0 {
            1 | 2 => Block::B12,
            3 | 4 => Block::B34,
            _ => Block::B56,
        }
    }
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X{}", self.0)
    }
}

/// Diagonal torus element a within-block bracket lands on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TorusLabel {
    /// `diag(i, -i, 0)`
    D12,
    /// `diag(i, 0, -i)`
    D13,
    /// `diag(0, i, -i)`
    D23,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BracketTarget {
    Tangent(BasisIndex),
    Torus(TorusLabel),
}

/// `[X_i, X_j]` expressed as `value · target`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StructureConstant<T> {
    pub i: BasisIndex,
    pub j: BasisIndex,
    pub target: BracketTarget,
    pub value: T,
}

/// The three distinct cross-block sectional curvatures.
///
/// `xy` is shared by every plane spanned by one vector of block 12 and one of
/// block 34, and likewise for `xz` (12/56) and `yz` (34/56).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossCurvatures<T> {
    pub xy: T,
    pub xz: T,
    pub yz: T,
}

impl<T: Scalar> CrossCurvatures<T> {
    pub fn at(m: &MetricPoint<T>) -> Self {
        let [x, y, z] = m.xyz();
        let c3 = lit::<T>(3.0 / 16.0);
        let c8 = lit::<T>(1.0 / 8.0);
        let c16 = lit::<T>(1.0 / 16.0);
        let xyz = x * y * z;
        let sq = |a: T| a * a;
        Self {
            xy: -c3 * z / (x * y) + c8 / x + c8 / y + c16 * sq(x - y) / xyz,
            xz: -c3 * y / (x * z) + c8 / x + c8 / z + c16 * sq(z - x) / xyz,
            yz: -c3 * x / (y * z) + c8 / y + c8 / z + c16 * sq(y - z) / xyz,
        }
    }

    /// Cross curvature between two distinct blocks.
    pub fn between(&self, a: Block, b: Block) -> T {
        use Block::*;
        match (a, b) {
            (B12, B34) | (B34, B12) => self.xy,
            (B12, B56) | (B56, B12) => self.xz,
            (B34, B56) | (B56, B34) => self.yz,
            _ => panic!("cross curvature requested within block {a}"),
        }
    }
}

/// Sectional curvatures of all basis planes plus the bracket coefficients.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureTable<T> {
    /// `sectional[i][j] = K(X_{i+1}, X_{j+1})`, zero on the diagonal.
    pub sectional: [[T; 6]; 6],
    pub constants: Vec<StructureConstant<T>>,
}

impl<T: Scalar> CurvatureTable<T> {
    pub fn at(m: &MetricPoint<T>) -> Self {
        let cross = CrossCurvatures::at(m);
        let mut sectional = [[T::zero(); 6]; 6];
        for i in BasisIndex::all() {
            for j in BasisIndex::all() {
                if i != j {
                    sectional[i.offset()][j.offset()] = table_entry(m, &cross, i, j);
                }
            }
        }
        Self { sectional, constants: structure_constants(m) }
    }

    pub fn k(&self, i: BasisIndex, j: BasisIndex) -> T {
        self.sectional[i.offset()][j.offset()]
    }

    /// `Σ_{j≠i} K_ij`.
    pub fn row_sum(&self, i: BasisIndex) -> T {
        self.sectional[i.offset()].iter().fold(T::zero(), |acc, &k| acc + k)
    }

    /// The coefficient of `[X_i, X_j]`, if the pair appears in the table (`i < j`).
    pub fn constant(&self, i: BasisIndex, j: BasisIndex) -> Option<&StructureConstant<T>> {
        self.constants.iter().find(|c| c.i == i && c.j == j)
    }
}

fn table_entry<T: Scalar>(m: &MetricPoint<T>, cross: &CrossCurvatures<T>, i: BasisIndex, j: BasisIndex) -> T {
    let (bi, bj) = (i.block(), j.block());
    if bi == bj {
        T::one() / m.weight(bi)
    } else {
        cross.between(bi, bj)
    }
}

/// Bracket coefficients `C_ij^k = g([X_i, X_j], X_k)` for the 15 pairs `i < j`.
///
/// Within-block brackets land in the torus and are reported against an opaque
/// diagonal label with coefficient `1/weight`.
pub fn structure_constants<T: Scalar>(m: &MetricPoint<T>) -> Vec<StructureConstant<T>> {
    let [x, y, z] = m.xyz();
    let two = lit::<T>(2.0);
    let cz = z.sqrt() / (two * (x * y).sqrt());
    let cy = y.sqrt() / (two * (x * z).sqrt());
    let cx = x.sqrt() / (two * (y * z).sqrt());

    use BracketTarget::{Tangent, Torus};
    let t = |k: u8| Tangent(BasisIndex(k));
    let rows: [(u8, u8, BracketTarget, T); 15] = [
        (1, 2, Torus(TorusLabel::D12), T::one() / x),
        (1, 3, t(5), -cz),
        (1, 4, t(6), -cz),
        (1, 5, t(3), cy),
        (1, 6, t(4), cy),
        (2, 3, t(6), cz),
        (2, 4, t(5), -cz),
        (2, 5, t(4), cy),
        (2, 6, t(3), -cy),
        (3, 4, Torus(TorusLabel::D13), T::one() / y),
        (3, 5, t(1), -cx),
        (3, 6, t(2), cx),
        (4, 5, t(2), -cx),
        (4, 6, t(1), -cx),
        (5, 6, Torus(TorusLabel::D23), T::one() / z),
    ];
    rows.into_iter()
        .map(|(i, j, target, value)| StructureConstant { i: BasisIndex(i), j: BasisIndex(j), target, value })
        .collect()
}

/// Closed-form sectional curvature of the plane `span{X_i, X_j}`.
pub fn sectional_curvature<T: Scalar>(m: &MetricPoint<T>, i: BasisIndex, j: BasisIndex) -> Result<T> {
    if i == j {
        return Err(Error::ZeroPlane(i.get()));
    }
    Ok(table_entry(m, &CrossCurvatures::at(m), i, j))
}

/// Sectional curvature from the homogeneous-space curvature formula, evaluated
/// on brackets computed in the matrix model of su(3).
///
/// Shares nothing with the closed forms of [`sectional_curvature`].
pub fn sectional_from_general_formula<T: Scalar>(
    m: &MetricPoint<T>,
    i: BasisIndex,
    j: BasisIndex,
) -> Result<T> {
    if i == j {
        return Err(Error::ZeroPlane(i.get()));
    }
    Ok(BracketAlgebra::new(m).sectional(i.offset(), j.offset()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn b(i: usize) -> BasisIndex {
        BasisIndex::new(i).unwrap()
    }

    fn mp(x: f64, y: f64) -> MetricPoint<f64> {
        MetricPoint::new(x, y).unwrap()
    }

    #[test]
    fn domain() {
        assert!(MetricPoint::new(0.0, 0.5).is_err());
        assert!(MetricPoint::new(0.5, 0.5).is_err());
        assert!(MetricPoint::new(0.6, 0.5).is_err());
        assert!(MetricPoint::new(0.2, -0.1).is_err());
        let m = mp(0.2, 0.3);
        assert_eq!(m.z(), 1.0 - 0.2 - 0.3);
        assert!(BasisIndex::new(0).is_err());
        assert!(BasisIndex::new(7).is_err());
    }

    #[test]
    fn blocks() {
        let blocks: Vec<_> = BasisIndex::all().map(|i| i.block()).collect();
        use Block::*;
        assert_eq!(blocks, vec![B12, B12, B34, B34, B56, B56]);
    }

    #[test]
    fn structure_constants_at_normal_metric() {
        let m = mp(1.0 / 3.0, 1.0 / 3.0);
        let cs = structure_constants(&m);
        assert_eq!(cs.len(), 15);
        let c12 = cs.iter().find(|c| c.i == b(1) && c.j == b(2)).unwrap();
        assert_relative_eq!(c12.value, 3.0, epsilon = 1e-14);
        assert_eq!(c12.target, BracketTarget::Torus(TorusLabel::D12));
        let c13 = cs.iter().find(|c| c.i == b(1) && c.j == b(3)).unwrap();
        assert_relative_eq!(c13.value, -(3.0f64).sqrt() / 2.0, epsilon = 1e-14);
        assert_eq!(c13.target, BracketTarget::Tangent(b(5)));
    }

    #[test]
    fn every_pair_listed_once() {
        let table = CurvatureTable::at(&mp(0.2, 0.45));
        for i in BasisIndex::all() {
            for j in BasisIndex::all() {
                let listed = table.constant(i, j).is_some();
                assert_eq!(listed, i < j, "pair ({i}, {j})");
            }
        }
    }

    #[test]
    fn sectional_examples() {
        let u = mp(1.0 / 3.0, 1.0 / 3.0);
        assert_relative_eq!(sectional_curvature(&u, b(1), b(2)).unwrap(), 3.0, epsilon = 1e-14);
        assert_relative_eq!(sectional_curvature(&u, b(1), b(3)).unwrap(), 3.0 / 16.0, epsilon = 1e-14);
        let s = mp(0.5, 0.25);
        assert_relative_eq!(sectional_curvature(&s, b(1), b(3)).unwrap(), 0.5, epsilon = 1e-14);
        assert_eq!(sectional_curvature(&s, b(4), b(4)), Err(Error::ZeroPlane(4)));
        assert_eq!(sectional_from_general_formula(&s, b(2), b(2)), Err(Error::ZeroPlane(2)));
    }

    #[test]
    fn table_invariants() {
        let m = mp(0.17, 0.52);
        let t = CurvatureTable::at(&m);
        for i in BasisIndex::all() {
            assert_eq!(t.k(i, i), 0.0);
            for j in BasisIndex::all() {
                assert_eq!(t.k(i, j), t.k(j, i));
            }
        }
        assert_eq!(t.k(b(1), b(2)), 1.0 / m.x());
        assert_eq!(t.k(b(3), b(4)), 1.0 / m.y());
        assert_eq!(t.k(b(5), b(6)), 1.0 / m.z());
        for (p, q) in [((1, 3), (2, 4)), ((1, 5), (2, 5)), ((3, 5), (4, 6)), ((1, 4), (2, 3)), ((1, 6), (2, 6))] {
            assert_eq!(t.k(b(p.0), b(p.1)), t.k(b(q.0), b(q.1)));
        }
    }

    #[test]
    fn general_formula_examples() {
        let u = mp(1.0 / 3.0, 1.0 / 3.0);
        assert_relative_eq!(sectional_from_general_formula(&u, b(1), b(2)).unwrap(), 3.0, epsilon = 1e-12);
        // row (2,5) carries the same 1/16 coefficient as row (1,5)
        let s = mp(0.5, 0.25);
        let k25 = sectional_from_general_formula(&s, b(2), b(5)).unwrap();
        let k15 = sectional_curvature(&s, b(1), b(5)).unwrap();
        assert_relative_eq!(k25, k15, epsilon = 1e-12);
        let (x, y, z) = (0.5, 0.25, 0.25);
        let with_eighth = k15 + (z - x) * (z - x) / (16.0 * x * y * z);
        assert!((k25 - with_eighth).abs() > 0.1);
        let m = mp(0.21, 0.33);
        assert_relative_eq!(sectional_from_general_formula(&m, b(3), b(4)).unwrap(), 1.0 / 0.33, epsilon = 1e-12);
    }

    #[test]
    fn single_precision_agrees() {
        let m = MetricPoint::<f32>::new(0.3, 0.45).unwrap();
        for i in BasisIndex::all() {
            for j in BasisIndex::all().filter(|&j| j != i) {
                let a = sectional_curvature(&m, i, j).unwrap();
                let g = sectional_from_general_formula(&m, i, j).unwrap();
                assert!((a - g).abs() < 1e-4, "({i},{j}): {a} vs {g}");
            }
        }
    }
}
