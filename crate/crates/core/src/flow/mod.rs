//! Homogeneous Ricci flow of invariant metrics and its projection onto the simplex.
//!
//! The unnormalized flow is `x' = -2x r_x`, `y' = -2y r_y`, `z' = -2z r_z`. After a
//! change of time it projects to the planar cubic field `(u, v)` on the closed
//! triangle `x, y ≥ 0, x + y ≤ 1`, whose boundary edges are invariant.

mod equilibria;
mod integrate;
mod projected;

use serde::Serialize;

use crate::curvature::RicciComponents;
use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

pub use equilibria::{find_equilibria, Equilibrium, EquilibriumLabel, StabilityClass};
pub use integrate::{Integrator, Method, StepInfo, Tolerances};
pub use projected::{
    Direction, FullSample, FullTrajectory, ProjectedFlow, Sample, Termination, Trajectory,
};

/// Projected field `(u, v)` at `(x, y)`; a polynomial, defined everywhere.
pub fn vector_field<T: Scalar>(x: T, y: T) -> [T; 2] {
    let one = T::one();
    let two = lit::<T>(2.0);
    let three = lit::<T>(3.0);
    let four = lit::<T>(4.0);
    let six = lit::<T>(6.0);
    let twelve = lit::<T>(12.0);
    let g = x * x * (two - twelve * y) - three * x * (four * y * y - six * y + one) + six * y * y - six * y + one;
    let h = six * x * x + six * x * (y - one) - y + one;
    [two * x * g, -two * y * (two * y - one) * h]
}

/// Unnormalized flow `(-2x r_x, -2y r_y, -2z r_z)` for a positive triple.
pub fn full_flow_field<T: Scalar>(x: T, y: T, z: T) -> Result<[T; 3]> {
    if !(x > T::zero() && y > T::zero() && z > T::zero()) {
        return Err(Error::NonPositiveState { x: x.to_f64_lossy(), y: y.to_f64_lossy(), z: z.to_f64_lossy() });
    }
    Ok(full_flow_unchecked(x, y, z))
}

pub(crate) fn full_flow_unchecked<T: Scalar>(x: T, y: T, z: T) -> [T; 3] {
    let r = ricci_unnormalized(x, y, z);
    let m2 = lit::<T>(-2.0);
    [m2 * x * r[0], m2 * y * r[1], m2 * z * r[2]]
}

pub(crate) fn ricci_unnormalized<T: Scalar>(x: T, y: T, z: T) -> [T; 3] {
    RicciComponents::from_triple(x, y, z).as_array()
}

/// 2×2 real matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mat2<T>(pub [[T; 2]; 2]);

impl<T: Scalar> Mat2<T> {
    pub fn trace(&self) -> T {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> T {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    /// Real eigenvalues in ascending order, or `None` for a complex pair.
    pub fn real_eigenvalues(&self) -> Option<[T; 2]> {
        let half_tr = self.trace() * lit(0.5);
        let disc = half_tr * half_tr - self.det();
        // a repeated eigenvalue can leave a discriminant of a few ulps below zero
        let noise = T::epsilon() * lit(64.0) * (half_tr * half_tr + self.det().abs());
        if disc < -noise {
            return None;
        }
        let root = disc.max(T::zero()).sqrt();
        Some([half_tr - root, half_tr + root])
    }

    pub fn solve(&self, rhs: [T; 2]) -> Option<[T; 2]> {
        let det = self.det();
        if det == T::zero() || !det.is_finite() {
            return None;
        }
        let [[a, b], [c, d]] = self.0;
        Some([(d * rhs[0] - b * rhs[1]) / det, (a * rhs[1] - c * rhs[0]) / det])
    }
}

/// Analytic Jacobian of `(u, v)`.
pub fn jacobian<T: Scalar>(x: T, y: T) -> Mat2<T> {
    let one = T::one();
    let two = lit::<T>(2.0);
    let three = lit::<T>(3.0);
    let four = lit::<T>(4.0);
    let six = lit::<T>(6.0);
    let eight = lit::<T>(8.0);
    let twelve = lit::<T>(12.0);

    let g = x * x * (two - twelve * y) - three * x * (four * y * y - six * y + one) + six * y * y - six * y + one;
    let g_x = two * x * (two - twelve * y) - three * (four * y * y - six * y + one);
    let g_y = -twelve * x * x - three * x * (eight * y - six) + twelve * y - six;

    let p = -four * y * y + two * y;
    let p_y = -eight * y + two;
    let h = six * x * x + six * x * (y - one) - y + one;
    let h_x = twelve * x + six * (y - one);
    let h_y = six * x - one;

    Mat2([[two * g + two * x * g_x, two * x * g_y], [p * h_x, p_y * h + p * h_y]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn field_examples() {
        let [u, v] = vector_field::<f64>(1.0 / 3.0, 1.0 / 3.0);
        assert!(u.abs() < 1e-15 && v.abs() < 1e-15);
        assert_eq!(vector_field(0.5, 0.25), [0.0, 0.0]);
        let [u, v] = vector_field(0.4, 0.3);
        assert_relative_eq!(u, 0.0096, epsilon = 1e-15);
        assert_relative_eq!(v, -0.0048, epsilon = 1e-15);
    }

    #[test]
    fn full_field_examples() {
        let f = full_flow_field(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0).unwrap();
        for c in f {
            assert_relative_eq!(c, -5.0 / 6.0, epsilon = 1e-14);
        }
        let f = full_flow_field(0.5, 0.25, 0.25).unwrap();
        let k = -8.0 / 3.0;
        assert_relative_eq!(f[0], k * 0.5, epsilon = 1e-14);
        assert_relative_eq!(f[1], k * 0.25, epsilon = 1e-14);
        assert_relative_eq!(f[2], k * 0.25, epsilon = 1e-14);
        let f = full_flow_field(0.4, 0.3, 0.3).unwrap();
        assert_relative_eq!(f[0], -0.962963, epsilon = 1e-6);
        assert_relative_eq!(f[1], -0.777778, epsilon = 1e-6);
        assert_relative_eq!(f[2], -0.777778, epsilon = 1e-6);
        assert!(full_flow_field(0.4, 0.0, 0.3).is_err());
    }

    #[test]
    fn full_field_is_homogeneous() {
        let a = full_flow_field(0.2, 0.3, 0.5).unwrap();
        let b = full_flow_field(2.0, 3.0, 5.0).unwrap();
        for k in 0..3 {
            assert_relative_eq!(a[k], b[k], epsilon = 1e-13);
        }
    }

    #[test]
    fn jacobian_matches_central_differences() {
        let h = 1e-6;
        for &(x, y) in &[(0.1, 0.2), (0.4, 0.3), (0.7, 0.05), (0.25, 0.6)] {
            let j = jacobian(x, y);
            let fx = |x: f64, y: f64| vector_field(x, y);
            for k in 0..2 {
                let dx = (fx(x + h, y)[k] - fx(x - h, y)[k]) / (2.0 * h);
                let dy = (fx(x, y + h)[k] - fx(x, y - h)[k]) / (2.0 * h);
                assert_relative_eq!(j.0[k][0], dx, epsilon = 1e-8);
                assert_relative_eq!(j.0[k][1], dy, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn jacobian_at_nodes() {
        let cases: [((f64, f64), f64); 7] = [
            ((0.0, 0.0), 2.0),
            ((1.0, 0.0), 2.0),
            ((0.0, 1.0), 2.0),
            ((0.5, 0.0), -1.0),
            ((0.5, 0.5), -1.0),
            ((0.0, 0.5), -1.0),
            ((1.0 / 3.0, 1.0 / 3.0), 2.0 / 9.0),
        ];
        for ((x, y), s) in cases {
            let j = jacobian(x, y);
            assert_relative_eq!(j.0[0][0], s, epsilon = 1e-14);
            assert_relative_eq!(j.0[1][1], s, epsilon = 1e-14);
            assert!(j.0[0][1].abs() < 1e-14 && j.0[1][0].abs() < 1e-14);
        }
    }

    #[test]
    fn eigen_and_solve() {
        let m = Mat2([[0.125, -0.375], [-0.375, 0.125]]);
        let [a, b] = m.real_eigenvalues().unwrap();
        assert_relative_eq!(a, -0.25, epsilon = 1e-15);
        assert_relative_eq!(b, 0.5, epsilon = 1e-15);
        assert!(Mat2([[0.0, -1.0], [1.0, 0.0]]).real_eigenvalues().is_none());
        let near_double = Mat2([[2.000000000000002, 0.0], [0.0, 2.0000000000000036]]);
        assert!(near_double.real_eigenvalues().is_some());
        let sol = Mat2([[2.0, 1.0], [1.0, 3.0]]).solve([3.0, 5.0]).unwrap();
        assert_relative_eq!(sol[0], 0.8, epsilon = 1e-15);
        assert_relative_eq!(sol[1], 1.4, epsilon = 1e-15);
        assert!(Mat2([[1.0, 2.0], [2.0, 4.0]]).solve([1.0, 1.0]).is_none());
    }
}
