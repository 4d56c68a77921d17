use std::fmt;

use serde::Serialize;

use super::{jacobian, vector_field, Mat2};
use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Names of the ten equilibria of the projected flow on the closed triangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum EquilibriumLabel {
    O,
    P,
    Q,
    L,
    M,
    N,
    R,
    S,
    T,
    U,
}

impl EquilibriumLabel {
    pub const ALL: [EquilibriumLabel; 10] = {
        use EquilibriumLabel::*;
        [O, P, Q, L, M, N, R, S, T, U]
    };

    /// Analytic position.
    pub fn position<F: Scalar>(self) -> [F; 2] {
        use EquilibriumLabel::*;
        let (x, y) = match self {
            O => (0.0, 0.0),
            P => (1.0, 0.0),
            Q => (0.0, 1.0),
            L => (0.5, 0.0),
            M => (0.5, 0.5),
            N => (0.0, 0.5),
            R => (0.25, 0.25),
            S => (0.5, 0.25),
            T => (0.25, 0.5),
            U => (1.0 / 3.0, 1.0 / 3.0),
        };
        [lit(x), lit(y)]
    }

    pub fn name(self) -> &'static str {
        use EquilibriumLabel::*;
        match self {
            O => "O",
            P => "P",
            Q => "Q",
            L => "L",
            M => "M",
            N => "N",
            R => "R",
            S => "S",
            T => "T",
            U => "U",
        }
    }

    /// Interior (of the big triangle) equilibria are exactly the Einstein metrics.
    pub fn is_interior(self) -> bool {
        use EquilibriumLabel::*;
        matches!(self, R | S | T | U)
    }
}

impl fmt::Display for EquilibriumLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StabilityClass {
    UnstableStarNode,
    StableStarNode,
    Saddle,
    /// Anything else (non-star nodes, foci, degenerate); does not occur for this field.
    Other,
}

impl StabilityClass {
    pub fn classify<T: Scalar>(jac: &Mat2<T>, tol: T) -> Self {
        let Some([lo, hi]) = jac.real_eigenvalues() else { return StabilityClass::Other };
        let [[a, b], [c, d]] = jac.0;
        let scalar_multiple = b.abs() <= tol && c.abs() <= tol && (a - d).abs() <= tol;
        if lo < -tol && hi > tol {
            StabilityClass::Saddle
        } else if scalar_multiple && lo > tol {
            StabilityClass::UnstableStarNode
        } else if scalar_multiple && hi < -tol {
            StabilityClass::StableStarNode
        } else {
            StabilityClass::Other
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            StabilityClass::UnstableStarNode => "unstable star node",
            StabilityClass::StableStarNode => "stable star node",
            StabilityClass::Saddle => "saddle",
            StabilityClass::Other => "other",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Equilibrium<T> {
    pub label: EquilibriumLabel,
    pub position: [T; 2],
    pub jacobian: Mat2<T>,
    /// Ascending.
    pub eigenvalues: [T; 2],
    pub class: StabilityClass,
}

impl<T: Scalar> Equilibrium<T> {
    pub fn residual(&self) -> T {
        let [u, v] = vector_field(self.position[0], self.position[1]);
        u.hypot(v)
    }

    pub fn distance_to(&self, p: [T; 2]) -> T {
        (p[0] - self.position[0]).hypot(p[1] - self.position[1])
    }
}

const GRID: usize = 10;
const NEWTON_MAX_ITER: usize = 60;

fn newton<T: Scalar>(mut p: [T; 2]) -> Option<[T; 2]> {
    let tiny = T::epsilon() * lit(4.0);
    for _ in 0..NEWTON_MAX_ITER {
        let f = vector_field(p[0], p[1]);
        let step = jacobian(p[0], p[1]).solve(f)?;
        p = [p[0] - step[0], p[1] - step[1]];
        if !(p[0].is_finite() && p[1].is_finite()) {
            return None;
        }
        if step[0].abs().max(step[1].abs()) <= tiny {
            return Some(p);
        }
    }
    // accept a stalled iterate if it is a root to working precision
    let [u, v] = vector_field(p[0], p[1]);
    (u.hypot(v) <= T::epsilon() * lit(64.0)).then_some(p)
}

/// Equilibria of the projected field on the closed triangle, located by Newton
/// iteration from an 11×11 seed lattice and matched to their analytic labels.
pub fn find_equilibria<T: Scalar>() -> Result<Vec<Equilibrium<T>>> {
    // tolerances are floored by the working precision so that f32 searches still resolve
    let floor = T::epsilon() * lit(1e4);
    let slack = lit::<T>(1e-9).max(T::epsilon() * lit(16.0));
    let dedup_tol = lit::<T>(1e-7).max(floor);
    let grid = T::from_usize(GRID).unwrap();
    let mut roots: Vec<[T; 2]> = Vec::new();
    for i in 0..=GRID {
        for j in 0..=(GRID - i) {
            let seed = [T::from_usize(i).unwrap() / grid, T::from_usize(j).unwrap() / grid];
            let Some(p) = newton(seed) else { continue };
            let inside = p[0] >= -slack && p[1] >= -slack && p[0] + p[1] <= T::one() + slack;
            if !inside {
                continue;
            }
            let dup = roots.iter().any(|q| (q[0] - p[0]).hypot(q[1] - p[1]) < dedup_tol);
            if !dup {
                roots.push(p);
            }
        }
    }

    let match_tol = lit::<T>(1e-6).max(floor);
    let class_tol = lit::<T>(1e-9).max(floor);
    let mut out = Vec::with_capacity(EquilibriumLabel::ALL.len());
    for label in EquilibriumLabel::ALL {
        let target = label.position::<T>();
        let found = roots
            .iter()
            .copied()
            .filter(|q| (q[0] - target[0]).hypot(q[1] - target[1]) < match_tol)
            .min_by(|a, b| {
                let da = (a[0] - target[0]).hypot(a[1] - target[1]);
                let db = (b[0] - target[0]).hypot(b[1] - target[1]);
                da.partial_cmp(&db).unwrap()
            });
        let Some(position) = found else {
            return Err(Error::Newton { label: label.name(), x: target[0].to_f64_lossy(), y: target[1].to_f64_lossy() });
        };
        let jac = jacobian(position[0], position[1]);
        let eigenvalues = jac.real_eigenvalues().unwrap_or([T::nan(), T::nan()]);
        out.push(Equilibrium { label, position, jacobian: jac, eigenvalues, class: StabilityClass::classify(&jac, class_tol) });
    }
    if roots.len() != out.len() {
        return Err(Error::EquilibriumCount { found: roots.len(), expected: out.len() });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_labelled_equilibria() {
        let eqs = find_equilibria::<f64>().unwrap();
        assert_eq!(eqs.len(), 10);
        for e in &eqs {
            assert!(e.residual() < 1e-12, "{} residual {}", e.label, e.residual());
            let p = e.label.position::<f64>();
            assert!(e.distance_to(p) < 1e-10);
        }
    }

    #[test]
    fn classes() {
        use EquilibriumLabel::*;
        let eqs = find_equilibria::<f64>().unwrap();
        let class = |l| eqs.iter().find(|e| e.label == l).unwrap().class;
        for l in [O, P, Q, U] {
            assert_eq!(class(l), StabilityClass::UnstableStarNode, "{l}");
        }
        for l in [L, M, N] {
            assert_eq!(class(l), StabilityClass::StableStarNode, "{l}");
        }
        for l in [R, S, T] {
            assert_eq!(class(l), StabilityClass::Saddle, "{l}");
        }
        let r = eqs.iter().find(|e| e.label == R).unwrap();
        assert!((r.eigenvalues[0] + 0.25).abs() < 1e-12);
        assert!((r.eigenvalues[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_precision_search() {
        let eqs = find_equilibria::<f32>().unwrap();
        assert_eq!(eqs.len(), 10);
    }
}
