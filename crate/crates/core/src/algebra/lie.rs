//! Matrix model of su(3) = t ⊕ m used to evaluate brackets and curvature from first principles.

use num_complex::Complex;

use super::MetricPoint;
use crate::scalar::{lit, Scalar};

type Mat3<T> = [[Complex<T>; 3]; 3];

/// Off-diagonal index pairs of the three blocks, zero-based.
const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// Dimension of su(3): six tangent directions followed by two torus directions.
const DIM: usize = 8;
const TANGENT: usize = 6;

/// Full bracket tensor of su(3) in the basis `X_1..X_6, H_1, H_2`, where the
/// `X_i` are orthonormal for the metric and `H_1 = diag(i,-i,0)`, `H_2 = diag(0,i,-i)`.
///
/// `c[a][b][e]` is the `e`-th coordinate of `[E_a, E_b]`.
#[derive(Debug, Clone)]
pub struct BracketAlgebra<T> {
    c: [[[T; DIM]; DIM]; DIM],
}

fn zero<T: Scalar>() -> Mat3<T> {
    [[Complex::new(T::zero(), T::zero()); 3]; 3]
}

fn mul<T: Scalar>(a: &Mat3<T>, b: &Mat3<T>) -> Mat3<T> {
    let mut out = zero();
    for (r, row) in out.iter_mut().enumerate() {
        for (col, cell) in row.iter_mut().enumerate() {
            *cell = (0..3).fold(Complex::new(T::zero(), T::zero()), |acc, k| acc + a[r][k] * b[k][col]);
        }
    }
    out
}

fn commutator<T: Scalar>(a: &Mat3<T>, b: &Mat3<T>) -> Mat3<T> {
    let ab = mul(a, b);
    let ba = mul(b, a);
    let mut out = zero();
    for r in 0..3 {
        for col in 0..3 {
            out[r][col] = ab[r][col] - ba[r][col];
        }
    }
    out
}

impl<T: Scalar> BracketAlgebra<T> {
    pub fn new(m: &MetricPoint<T>) -> Self {
        let weights = m.xyz();
        let half = lit::<T>(0.5);
        let mut basis: Vec<Mat3<T>> = Vec::with_capacity(DIM);
        for (&(j, k), &w) in PAIRS.iter().zip(weights.iter()) {
            let s = half / w.sqrt();
            // A_jk: +1 at (j,k), -1 at (k,j)
            let mut a = zero();
            a[j][k] = Complex::new(s, T::zero());
            a[k][j] = Complex::new(-s, T::zero());
            // S_jk: i at (j,k) and (k,j)
            let mut sym = zero();
            sym[j][k] = Complex::new(T::zero(), s);
            sym[k][j] = Complex::new(T::zero(), s);
            basis.push(a);
            basis.push(sym);
        }
        let mut h1 = zero();
        h1[0][0] = Complex::new(T::zero(), T::one());
        h1[1][1] = Complex::new(T::zero(), -T::one());
        let mut h2 = zero();
        h2[1][1] = Complex::new(T::zero(), T::one());
        h2[2][2] = Complex::new(T::zero(), -T::one());
        basis.push(h1);
        basis.push(h2);

        let mut c = [[[T::zero(); DIM]; DIM]; DIM];
        for a in 0..DIM {
            for b in 0..DIM {
                c[a][b] = coordinates(&commutator(&basis[a], &basis[b]), &weights);
            }
        }
        Self { c }
    }

    /// `e`-th coordinate of `[E_a, E_b]`.
    pub fn bracket(&self, a: usize, b: usize, e: usize) -> T {
        self.c[a][b][e]
    }

    /// Metric inner product of the m-parts of `[E_a, E_b]` and `E_k` (`k < 6`).
    pub fn structure_constant(&self, a: usize, b: usize, k: usize) -> T {
        debug_assert!(k < TANGENT);
        self.c[a][b][k]
    }

    /// Component `k` of `U(X_i, X_j)`, where `2g(U(X,Y),Z) = g([Z,X]_m,Y) + g(X,[Z,Y]_m)`.
    fn u_tensor(&self, i: usize, j: usize, k: usize) -> T {
        lit::<T>(0.5) * (self.c[k][i][j] + self.c[k][j][i])
    }

    /// Sectional curvature of `span{X_i, X_j}` (zero-based, distinct tangent indices).
    ///
    /// `K = -3/4 |[X,Y]_m|² - 1/2 g([X,[X,Y]]_m, Y) - 1/2 g([Y,[Y,X]]_m, X)
    ///      + |U(X,Y)|² - g(U(X,X), U(Y,Y))`.
    pub fn sectional(&self, i: usize, j: usize) -> T {
        let three_quarters = lit::<T>(0.75);
        let half = lit::<T>(0.5);
        let sum = |f: &dyn Fn(usize) -> T, n: usize| (0..n).fold(T::zero(), |acc, e| acc + f(e));

        let bracket_norm = sum(&|k| self.c[i][j][k] * self.c[i][j][k], TANGENT);
        // [X,[X,Y]_g]_m paired with Y: the inner bracket keeps its torus part
        let xxy = sum(&|e| self.c[i][j][e] * self.c[i][e][j], DIM);
        let yyx = sum(&|e| self.c[j][i][e] * self.c[j][e][i], DIM);
        let u_xy = sum(&|k| self.u_tensor(i, j, k) * self.u_tensor(i, j, k), TANGENT);
        let u_xx_yy = sum(&|k| self.u_tensor(i, i, k) * self.u_tensor(j, j, k), TANGENT);

        -three_quarters * bracket_norm - half * xxy - half * yyx + u_xy - u_xx_yy
    }
}

/// Coordinates of a traceless anti-Hermitian matrix in the basis `X_1..X_6, H_1, H_2`.
fn coordinates<T: Scalar>(mat: &Mat3<T>, weights: &[T; 3]) -> [T; DIM] {
    let mut out = [T::zero(); DIM];
    for (n, (&(j, k), &w)) in PAIRS.iter().zip(weights.iter()).enumerate() {
        // mat = a·A_jk/2 + s·S_jk/2 on this pair, and A_jk/2 = √w X
        let a = mat[j][k].re - mat[k][j].re;
        let s = mat[j][k].im + mat[k][j].im;
        let root = w.sqrt();
        out[2 * n] = a * root;
        out[2 * n + 1] = s * root;
    }
    // diag(i d1, i d2, i d3) = d1 H_1 - d3 H_2
    out[6] = mat[0][0].im;
    out[7] = -mat[2][2].im;
    out
}
