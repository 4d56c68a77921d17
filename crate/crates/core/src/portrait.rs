//! Phase portrait: equilibria, the straight heteroclinic segments, and
//! trajectories through a grid of seeds.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::flow::{Direction, Equilibrium, EquilibriumLabel, ProjectedFlow, Trajectory};
use crate::scalar::Scalar;
use crate::verify::point_on_segment;

use EquilibriumLabel::{L, M, N, O, P, Q, U};

/// Segments that are unions of equilibria and heteroclinic orbits: the stable
/// manifolds of the saddles (through `U`) and the unstable ones (the sides of the
/// central triangle).
pub const HETEROCLINIC_SEGMENTS: [(EquilibriumLabel, EquilibriumLabel); 6] =
    [(O, U), (P, U), (Q, U), (N, L), (L, M), (M, N)];

/// Distance from `p` to the line through `from` and `to`.
pub fn transverse_deviation<T: Scalar>(from: EquilibriumLabel, to: EquilibriumLabel, p: [T; 2]) -> T {
    let (a, b) = (from.position::<T>(), to.position::<T>());
    let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
    ((ex * (p[1] - a[1]) - ey * (p[0] - a[0])) / ex.hypot(ey)).abs()
}

/// Largest transverse deviation along the forward trajectory seeded at
/// `from + s (to - from)`, over `[0, t_max]`.
pub fn segment_drift<T: Scalar>(
    flow: &ProjectedFlow<T>,
    from: EquilibriumLabel,
    to: EquilibriumLabel,
    s: T,
    t_max: T,
) -> Result<T> {
    let start = point_on_segment(from, to, s);
    let traj = flow.integrate_point(start, Direction::Forward, t_max, 1)?;
    Ok(traj
        .samples
        .iter()
        .map(|p| transverse_deviation(from, to, [p.x, p.y]))
        .fold(T::zero(), |a, b| a.max(b)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Portrait<T> {
    pub equilibria: Vec<Equilibrium<T>>,
    pub segments: Vec<(EquilibriumLabel, EquilibriumLabel)>,
    /// Forward and backward trajectory per seed, seeds in row order.
    pub trajectories: Vec<Trajectory<T>>,
}

/// Seeds `(i/k, j/k)` strictly inside the triangle, skipping equilibria.
pub fn seed_grid<T: Scalar>(k: usize) -> Vec<[T; 2]> {
    let scale = T::from_usize(k).unwrap();
    let mut out = Vec::new();
    for j in 1..k {
        for i in 1..(k - j) {
            let p = [T::from_usize(i).unwrap() / scale, T::from_usize(j).unwrap() / scale];
            let at_equilibrium = EquilibriumLabel::ALL.iter().any(|l| {
                let q = l.position::<T>();
                (p[0] - q[0]).hypot(p[1] - q[1]) < T::epsilon().sqrt()
            });
            if !at_equilibrium {
                out.push(p);
            }
        }
    }
    out
}

pub fn assemble_portrait<T: Scalar>(flow: &ProjectedFlow<T>, k: usize, t_max: T, stride: usize) -> Result<Portrait<T>> {
    let seeds = seed_grid::<T>(k);
    let trajectories = seeds
        .par_iter()
        .flat_map_iter(|&p| [Direction::Forward, Direction::Backward].map(move |d| (p, d)))
        .map(|(p, d)| flow.integrate_point(p, d, t_max, stride))
        .collect::<Result<Vec<_>>>()?;
    Ok(Portrait { equilibria: flow.equilibria().to_vec(), segments: HETEROCLINIC_SEGMENTS.to_vec(), trajectories })
}
