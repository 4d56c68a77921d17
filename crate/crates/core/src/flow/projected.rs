use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::equilibria::{find_equilibria, Equilibrium, EquilibriumLabel};
use super::integrate::{Integrator, Tolerances};
use super::{full_flow_unchecked, vector_field};
use crate::algebra::MetricPoint;
use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn sign<T: Scalar>(self) -> T {
        match self {
            Direction::Forward => T::one(),
            Direction::Backward => -T::one(),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        })
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "forward" => Ok(Direction::Forward),
            "backward" => Ok(Direction::Backward),
            other => Err(format!("unknown direction '{other}' (expected forward or backward)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ReachedEquilibrium(EquilibriumLabel),
    HitBoundary,
    HorizonExhausted,
    StepFailure,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Termination::ReachedEquilibrium(l) => write!(f, "reached_equilibrium({l})"),
            Termination::HitBoundary => f.write_str("hit_boundary"),
            Termination::HorizonExhausted => f.write_str("horizon_exhausted"),
            Termination::StepFailure => f.write_str("step_failure"),
        }
    }
}

/// A point of a planar trajectory; `t` is signed (negative when integrating backward).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample<T> {
    pub t: T,
    pub x: T,
    pub y: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory<T> {
    pub samples: Vec<Sample<T>>,
    pub direction: Direction,
    pub termination: Termination,
}

impl<T: Scalar> Trajectory<T> {
    pub fn last(&self) -> &Sample<T> {
        self.samples.last().expect("trajectories start with their initial point")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FullSample<T> {
    pub t: T,
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> FullSample<T> {
    /// Radial projection onto `x + y + z = 1`.
    pub fn normalized(&self) -> [T; 3] {
        let s = self.x + self.y + self.z;
        [self.x / s, self.y / s, self.z / s]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FullTrajectory<T> {
    pub samples: Vec<FullSample<T>>,
    pub direction: Direction,
    pub termination: Termination,
}

impl<T: Scalar> FullTrajectory<T> {
    pub fn last(&self) -> &FullSample<T> {
        self.samples.last().expect("trajectories start with their initial point")
    }
}

/// The projected flow together with its refined equilibria and integration settings.
#[derive(Debug, Clone)]
pub struct ProjectedFlow<T> {
    equilibria: Vec<Equilibrium<T>>,
    tol: Tolerances<T>,
}

/// Planar field with time direction applied.
pub fn directed_field<T: Scalar>(direction: Direction) -> impl Fn(&[T; 2]) -> [T; 2] + Clone {
    let s = direction.sign::<T>();
    move |p: &[T; 2]| {
        let [u, v] = vector_field(p[0], p[1]);
        [s * u, s * v]
    }
}

impl<T: Scalar> ProjectedFlow<T> {
    pub fn new() -> Result<Self> {
        Self::with_tolerances(Tolerances::default())
    }

    pub fn with_tolerances(tol: Tolerances<T>) -> Result<Self> {
        tol.validate()?;
        Ok(Self { equilibria: find_equilibria()?, tol })
    }

    pub fn equilibria(&self) -> &[Equilibrium<T>] {
        &self.equilibria
    }

    pub fn equilibrium(&self, label: EquilibriumLabel) -> &Equilibrium<T> {
        self.equilibria.iter().find(|e| e.label == label).expect("all ten equilibria are present")
    }

    pub fn tolerances(&self) -> &Tolerances<T> {
        &self.tol
    }

    /// Nearest refined equilibrium within the capture radius.
    pub fn captured(&self, p: [T; 2]) -> Option<EquilibriumLabel> {
        self.equilibria
            .iter()
            .map(|e| (e.label, e.distance_to(p)))
            .filter(|&(_, d)| d <= self.tol.capture_radius)
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .map(|(l, _)| l)
    }

    pub fn near_boundary(&self, p: [T; 2]) -> bool {
        let gap = p[0].min(p[1]).min(T::one() - p[0] - p[1]);
        !(gap >= self.tol.boundary_margin)
    }

    /// A raw stepper in elapsed time, for callers that monitor every step.
    pub fn integrator(&self, start: [T; 2], direction: Direction) -> Integrator<T, 2, impl Fn(&[T; 2]) -> [T; 2] + Clone> {
        Integrator::new(directed_field(direction), start, self.tol)
    }

    /// Integrates from `m0` until capture, boundary contact, the horizon, or step failure.
    ///
    /// Every `stride`-th accepted step is recorded, along with the first and last states.
    pub fn integrate(&self, m0: &MetricPoint<T>, direction: Direction, t_max: T, stride: usize) -> Result<Trajectory<T>> {
        self.integrate_point([m0.x(), m0.y()], direction, t_max, stride)
    }

    /// As [`integrate`](Self::integrate), from any point of the closed triangle.
    pub fn integrate_point(&self, start: [T; 2], direction: Direction, t_max: T, stride: usize) -> Result<Trajectory<T>> {
        if !(t_max >= T::zero()) {
            return Err(Error::Tolerance("t_max must be non-negative"));
        }
        let stride = stride.max(1);
        let sign = direction.sign::<T>();
        let sample = |t: T, p: [T; 2]| Sample { t: sign * t, x: p[0], y: p[1] };
        let mut samples = vec![sample(T::zero(), start)];
        if let Some(label) = self.captured(start) {
            return Ok(Trajectory { samples, direction, termination: Termination::ReachedEquilibrium(label) });
        }
        let mut it = self.integrator(start, direction);
        let done_eps = t_max * T::epsilon() * lit(8.0);
        let mut accepted = 0usize;
        let termination = loop {
            let remaining = t_max - it.time();
            if remaining <= done_eps {
                break Termination::HorizonExhausted;
            }
            if it.steps() >= self.tol.max_steps {
                break Termination::StepFailure;
            }
            if it.step(remaining).is_err() {
                break Termination::StepFailure;
            }
            accepted += 1;
            let p = it.state();
            if let Some(label) = self.captured(p) {
                break Termination::ReachedEquilibrium(label);
            }
            if self.near_boundary(p) {
                break Termination::HitBoundary;
            }
            if accepted.is_multiple_of(stride) {
                samples.push(sample(it.time(), p));
            }
        };
        if samples.last().map(|s| s.t) != Some(sign * it.time()) {
            samples.push(sample(it.time(), it.state()));
        }
        Ok(Trajectory { samples, direction, termination })
    }

    /// Equilibrium reached from `m0`: the ω-limit forward, the α-limit backward.
    pub fn limit_set(&self, m0: &MetricPoint<T>, direction: Direction, t_max: T) -> Result<EquilibriumLabel> {
        let traj = self.integrate(m0, direction, t_max, usize::MAX)?;
        match traj.termination {
            Termination::ReachedEquilibrium(label) => Ok(label),
            Termination::StepFailure => Err(Error::StepFailure { t: traj.last().t.to_f64_lossy() }),
            _ => Err(Error::HorizonExhausted { t_max: t_max.to_f64_lossy() }),
        }
    }

    /// Integrates the unnormalized three-block flow until a coordinate collapses
    /// below the boundary margin or the horizon is reached.
    pub fn integrate_full(&self, start: [T; 3], direction: Direction, t_max: T, stride: usize) -> Result<FullTrajectory<T>> {
        if !start.iter().all(|&c| c > T::zero()) {
            return Err(Error::NonPositiveState {
                x: start[0].to_f64_lossy(),
                y: start[1].to_f64_lossy(),
                z: start[2].to_f64_lossy(),
            });
        }
        let stride = stride.max(1);
        let sign = direction.sign::<T>();
        let field = move |p: &[T; 3]| {
            let f = full_flow_unchecked(p[0], p[1], p[2]);
            [sign * f[0], sign * f[1], sign * f[2]]
        };
        let sample = |t: T, p: [T; 3]| FullSample { t: sign * t, x: p[0], y: p[1], z: p[2] };
        let mut samples = vec![sample(T::zero(), start)];
        let mut it = Integrator::new(field, start, self.tol);
        let done_eps = t_max * T::epsilon() * lit(8.0);
        let mut accepted = 0usize;
        // last state inside the open octant, kept in case the final step overshoots
        let mut inside = (T::zero(), start);
        let termination = loop {
            let remaining = t_max - it.time();
            if remaining <= done_eps {
                break Termination::HorizonExhausted;
            }
            if it.steps() >= self.tol.max_steps || it.step(remaining).is_err() {
                break Termination::StepFailure;
            }
            accepted += 1;
            let p = it.state();
            if p.iter().all(|&c| c > T::zero()) {
                inside = (it.time(), p);
            }
            if !p.iter().all(|&c| c >= self.tol.boundary_margin) {
                break Termination::HitBoundary;
            }
            if accepted.is_multiple_of(stride) {
                samples.push(sample(it.time(), p));
            }
        };
        if samples.last().map(|s| s.t) != Some(sign * inside.0) {
            samples.push(sample(inside.0, inside.1));
        }
        Ok(FullTrajectory { samples, direction, termination })
    }
}
