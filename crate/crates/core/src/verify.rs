//! Numerical verification of region invariance and escape under the projected flow.
//!
//! All checks are evidence at configured tolerances, not proofs. Every failure or
//! escape carries a point and a constraint so it can be re-evaluated independently.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::MetricPoint;
use crate::curvature::{region_boundary, Constraint, Family, Polyline, Region, RegionSpec, Witness};
use crate::error::{Error, Result};
use crate::flow::{Direction, EquilibriumLabel, ProjectedFlow, Termination};
use crate::scalar::{lit, Scalar};

/// Tolerance for leaving a closed triangle.
pub const TRIANGLE_MARGIN: f64 = 1e-9;
/// Bisection width for escape times.
pub const BISECTION_TOL: f64 = 1e-9;
/// Offset from the crossing to the reported escape time, so that `t* ± 5e-7` both
/// lie past the crossing.
pub const ESCAPE_OFFSET: f64 = 6e-7;
pub const NEIGHBORHOOD_HALF_WIDTH: f64 = 5e-7;
pub const REPRODUCE_HALF_WIDTH: f64 = 1e-6;
/// Distance kept from the endpoints when seeding on heteroclinic segments.
pub const END_CLEARANCE: f64 = 1e-4;
/// Membership is not monitored this close to the six boundary equilibria. The
/// functionals are singular there, and region boundaries meet trajectories
/// tangentially, so the margin (of order r²) drops below double resolution
/// well before the equilibrium capture radius.
pub const SINGULAR_CORNER_RADIUS: f64 = 1e-6;
const MAX_REJECTION_TRIES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Theorem {
    A,
    B,
}

impl Theorem {
    pub fn family(self) -> Family {
        match self {
            Theorem::A => Family::SecRic,
            Theorem::B => Family::RicScal,
        }
    }

    pub fn of(family: Family) -> Self {
        match family {
            Family::SecRic => Theorem::A,
            Family::RicScal => Theorem::B,
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theorem::A => "A",
            Theorem::B => "B",
        })
    }
}

impl FromStr for Theorem {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "A" | "a" => Ok(Theorem::A),
            "B" | "b" => Ok(Theorem::B),
            other => Err(format!("unknown theorem '{other}' (expected A or B)")),
        }
    }
}

/// A closed triangle in the `(x, y)` plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Triangle {
    pub name: &'static str,
    pub vertices: [[f64; 2]; 3],
}

impl Triangle {
    /// `x + y ≤ 1/2`.
    pub const T1: Triangle = Triangle { name: "T1", vertices: [[0.0, 0.0], [0.5, 0.0], [0.0, 0.5]] };
    /// `x ≥ 1/2`.
    pub const T2: Triangle = Triangle { name: "T2", vertices: [[0.5, 0.0], [1.0, 0.0], [0.5, 0.5]] };
    /// `y ≥ 1/2`.
    pub const T3: Triangle = Triangle { name: "T3", vertices: [[0.0, 0.5], [0.5, 0.5], [0.0, 1.0]] };
    /// `x ≤ 1/2, y ≤ 1/2, x + y ≥ 1/2`.
    pub const CENTRAL: Triangle = Triangle { name: "Tc", vertices: [[0.5, 0.0], [0.5, 0.5], [0.0, 0.5]] };
    pub const OUQ: Triangle = Triangle { name: "OUQ", vertices: [[0.0, 0.0], [1.0 / 3.0, 1.0 / 3.0], [0.0, 1.0]] };
    pub const OPU: Triangle = Triangle { name: "OPU", vertices: [[0.0, 0.0], [1.0, 0.0], [1.0 / 3.0, 1.0 / 3.0]] };
    pub const PQU: Triangle = Triangle { name: "PQU", vertices: [[1.0, 0.0], [0.0, 1.0], [1.0 / 3.0, 1.0 / 3.0]] };

    /// Signed distances to the three edge lines, positive inside.
    pub fn edge_distances<T: Scalar>(&self, p: [T; 2]) -> [T; 3] {
        let v = self.vertices.map(|q| [lit::<T>(q[0]), lit::<T>(q[1])]);
        let mut out = [T::zero(); 3];
        for (k, slot) in out.iter_mut().enumerate() {
            let (a, b, c) = (v[k], v[(k + 1) % 3], v[(k + 2) % 3]);
            let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
            let len = ex.hypot(ey);
            let side = |q: [T; 2]| (ex * (q[1] - a[1]) - ey * (q[0] - a[0])) / len;
            let orient = if side(c) > T::zero() { T::one() } else { -T::one() };
            *slot = orient * side(p);
        }
        out
    }

    /// How far `p` lies outside; non-positive when inside.
    pub fn excess<T: Scalar>(&self, p: [T; 2]) -> T {
        let d = self.edge_distances(p);
        -(d[0].min(d[1]).min(d[2]))
    }

    pub fn contains<T: Scalar>(&self, p: [T; 2], margin: T) -> bool {
        self.excess(p) <= margin
    }

    pub fn contains_interior<T: Scalar>(&self, p: [T; 2]) -> bool {
        self.excess(p) < T::zero()
    }

    /// Uniform sample from the open triangle.
    pub fn sample<T: Scalar, R: Rng>(&self, rng: &mut R) -> [T; 2] {
        let [a, b, c] = self.vertices;
        loop {
            let (mut r1, mut r2): (f64, f64) = (rng.gen(), rng.gen());
            if r1 + r2 > 1.0 {
                r1 = 1.0 - r1;
                r2 = 1.0 - r2;
            }
            let p = [
                lit::<T>(a[0] + r1 * (b[0] - a[0]) + r2 * (c[0] - a[0])),
                lit::<T>(a[1] + r1 * (b[1] - a[1]) + r2 * (c[1] - a[1])),
            ];
            if self.contains_interior(p) {
                return p;
            }
        }
    }
}

/// The three medians of the central triangle, from `U` to `L`, `M` and `N`.
pub const MEDIANS: [(EquilibriumLabel, EquilibriumLabel); 3] =
    [(EquilibriumLabel::U, EquilibriumLabel::L), (EquilibriumLabel::U, EquilibriumLabel::M), (EquilibriumLabel::U, EquilibriumLabel::N)];

/// Where invariance is claimed, and hence where starting points are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClaimedRegion {
    /// The open central triangle; trajectories must also stay in its closure.
    CentralTriangle,
    /// The segments from `U` to `L`, `M`, `N`, minus small end neighbourhoods.
    Medians,
    /// The region itself, by rejection sampling over the big triangle.
    Membership,
}

impl ClaimedRegion {
    /// The invariant set the theorems assert for `spec`.
    pub fn for_spec(spec: RegionSpec) -> Self {
        match (spec.family, spec.d) {
            (Family::SecRic, d) if d <= 3 => ClaimedRegion::Medians,
            _ => ClaimedRegion::CentralTriangle,
        }
    }

    pub fn sample<T: Scalar, R: Rng>(&self, spec: RegionSpec, n: usize, rng: &mut R) -> Result<Vec<[T; 2]>> {
        match self {
            ClaimedRegion::CentralTriangle => Ok((0..n).map(|_| Triangle::CENTRAL.sample(rng)).collect()),
            ClaimedRegion::Medians => Ok((0..n)
                .map(|k| {
                    let (from, to) = MEDIANS[k % 3];
                    let s = END_CLEARANCE + rng.gen::<f64>() * (1.0 - 2.0 * END_CLEARANCE);
                    point_on_segment(from, to, lit(s))
                })
                .collect()),
            ClaimedRegion::Membership => sample_members(spec, n, rng),
        }
    }
}

/// `from + s (to - from)`.
pub fn point_on_segment<T: Scalar>(from: EquilibriumLabel, to: EquilibriumLabel, s: T) -> [T; 2] {
    let (a, b) = (from.position::<T>(), to.position::<T>());
    [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
}

/// Distance from `p` to the segment `from`–`to`.
pub fn distance_to_segment<T: Scalar>(from: EquilibriumLabel, to: EquilibriumLabel, p: [T; 2]) -> T {
    let (a, b) = (from.position::<T>(), to.position::<T>());
    let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
    let s = (((p[0] - a[0]) * ex + (p[1] - a[1]) * ey) / (ex * ex + ey * ey)).max(T::zero()).min(T::one());
    (p[0] - a[0] - s * ex).hypot(p[1] - a[1] - s * ey)
}

/// Uniform samples from the region by rejection against strict membership.
pub fn sample_members<T: Scalar, R: Rng>(spec: RegionSpec, n: usize, rng: &mut R) -> Result<Vec<[T; 2]>> {
    let region = Region::new(spec);
    let mut out = Vec::with_capacity(n);
    let mut tries = 0usize;
    while out.len() < n {
        if tries >= MAX_REJECTION_TRIES.saturating_mul(n.max(1)) {
            return Err(Error::NotInRegion(format!("rejection sampling found no members of {spec}")));
        }
        tries += 1;
        let p = [lit::<T>(rng.gen::<f64>()), lit::<T>(rng.gen::<f64>())];
        if let Ok(m) = MetricPoint::new(p[0], p[1]) {
            if region.contains(&m) {
                out.push(p);
            }
        }
    }
    Ok(out)
}

/// Within [`SINGULAR_CORNER_RADIUS`] of `O`, `P`, `Q`, `L`, `M` or `N`.
pub fn near_singular_corner<T: Scalar>(p: [T; 2]) -> bool {
    let r = lit::<T>(SINGULAR_CORNER_RADIUS);
    EquilibriumLabel::ALL.iter().filter(|l| !l.is_interior()).any(|l| {
        let q = l.position::<T>();
        (p[0] - q[0]).hypot(p[1] - q[1]) < r
    })
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind<T> {
    LostMembership(Witness<T>),
    LeftTriangle { excess: T },
    OutOfDomain,
    Integration(Termination),
}

/// A point along a trajectory where a claimed invariance failed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvarianceFailure<T> {
    pub start: [T; 2],
    pub direction: Direction,
    /// Signed time.
    pub t: T,
    pub point: [T; 2],
    pub kind: FailureKind<T>,
}

impl<T: Scalar> InvarianceFailure<T> {
    /// Re-evaluates the witness at the recorded point.
    pub fn confirm(&self) -> bool {
        match self.kind {
            FailureKind::LostMembership(w) => match MetricPoint::new(self.point[0], self.point[1]) {
                Ok(m) => !(w.constraint.eval(&m) > T::zero()),
                Err(_) => true,
            },
            FailureKind::LeftTriangle { .. } => Triangle::CENTRAL.excess(self.point) > lit(TRIANGLE_MARGIN),
            FailureKind::OutOfDomain => MetricPoint::new(self.point[0], self.point[1]).is_err(),
            FailureKind::Integration(_) => true,
        }
    }
}

/// Localized loss of membership along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EscapeRecord<T> {
    pub start: [T; 2],
    pub direction: Direction,
    /// Signed time just past the crossing, inside the violating neighbourhood.
    pub t_star: T,
    /// Signed bisection bracket: the functional is positive at `t_before`, not at `t_after`.
    pub t_before: T,
    pub t_after: T,
    pub violated: Constraint,
    pub value_before: T,
    pub value_after: T,
    /// Whether the violated functional is also non-positive at `t* ± 5e-7`.
    pub neighborhood_confirmed: bool,
}

impl<T: Scalar> EscapeRecord<T> {
    /// Re-integrates from the start and checks that the violated functional changes
    /// sign within `[t* − 1e-6, t* + 1e-6]`.
    pub fn reproduce(&self, flow: &ProjectedFlow<T>) -> Result<bool> {
        let t = self.t_star.abs();
        let w = lit::<T>(REPRODUCE_HALF_WIDTH);
        let states = states_at(flow, self.start, self.direction, &[t - w, t + w])?;
        let value = |p: [T; 2]| MetricPoint::new(p[0], p[1]).map(|m| self.violated.eval(&m));
        match (value(states[0]), value(states[1])) {
            (Ok(before), Ok(after)) => Ok(before > T::zero() && !(after > T::zero())),
            _ => Ok(false),
        }
    }
}

/// States at the given elapsed times (ascending, non-negative), by landing steps on each.
pub fn states_at<T: Scalar>(flow: &ProjectedFlow<T>, start: [T; 2], direction: Direction, times: &[T]) -> Result<Vec<[T; 2]>> {
    let mut it = flow.integrator(start, direction);
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        let tiny = T::epsilon() * lit::<T>(8.0) * target.abs().max(T::one());
        while target - it.time() > tiny {
            it.step(target - it.time())?;
        }
        out.push(it.state());
    }
    Ok(out)
}

fn min_witness<T: Scalar>(region: &Region, p: [T; 2]) -> Option<Witness<T>> {
    MetricPoint::new(p[0], p[1]).ok().map(|m| region.min_constraint(&m))
}

/// A bisected loss of membership, in elapsed time.
struct Crossing<T> {
    t_lo: T,
    t_hi: T,
    value_before: T,
    witness: Witness<T>,
}

/// Steps from `start`, probing the minimum constraint at four points inside each
/// accepted step, and bisects the first non-positive probe to [`BISECTION_TOL`].
fn first_crossing<T: Scalar>(
    flow: &ProjectedFlow<T>,
    region: &Region,
    start: [T; 2],
    direction: Direction,
    horizon: T,
) -> Result<Option<Crossing<T>>> {
    if flow.captured(start).is_some() || near_singular_corner(start) {
        return Ok(None);
    }
    let bis_tol = lit::<T>(BISECTION_TOL);
    let mut it = flow.integrator(start, direction);
    let done_eps = horizon.abs() * T::epsilon() * lit(8.0);
    loop {
        let remaining = horizon - it.time();
        if remaining <= done_eps {
            return Ok(None);
        }
        let info = it.step(remaining)?;
        let h = info.t1 - info.t0;
        let quarter = h * lit(0.25);
        let mut lo = T::zero();
        let mut crossing = None;
        for k in 1..=4 {
            let s = if k == 4 { h } else { quarter * T::from_usize(k).unwrap() };
            let p = if k == 4 { info.y1 } else { it.substep(&info.y0, s) };
            if near_singular_corner(p) {
                return Ok(None);
            }
            let Some(w) = min_witness(region, p) else { return Ok(None) };
            if !(w.value > T::zero()) {
                crossing = Some(s);
                break;
            }
            lo = s;
        }
        if let Some(mut hi) = crossing {
            let floor = T::epsilon() * lit::<T>(4.0) * info.t1.max(T::one());
            while hi - lo > bis_tol.max(floor) {
                let mid = (lo + hi) * lit(0.5);
                if mid <= lo || mid >= hi {
                    break;
                }
                match min_witness(region, it.substep(&info.y0, mid)) {
                    Some(w) if w.value > T::zero() => lo = mid,
                    _ => hi = mid,
                }
            }
            let p_lo = if lo == T::zero() { info.y0 } else { it.substep(&info.y0, lo) };
            let p_hi = if hi == h { info.y1 } else { it.substep(&info.y0, hi) };
            let Some(witness) = min_witness(region, p_hi) else { return Ok(None) };
            let Ok(m_lo) = MetricPoint::new(p_lo[0], p_lo[1]) else { return Ok(None) };
            let value_before = witness.constraint.eval(&m_lo);
            return Ok(Some(Crossing { t_lo: info.t0 + lo, t_hi: info.t0 + hi, value_before, witness }));
        }
        if flow.captured(info.y1).is_some() || flow.near_boundary(info.y1) {
            return Ok(None);
        }
    }
}

/// Searches for the first loss of membership of the trajectory from `m0`.
///
/// The minimum constraint is monitored at four points inside each accepted step;
/// the first non-positive value is bisected to [`BISECTION_TOL`]. Returns `None`
/// if the trajectory is captured, enters a singular corner, reaches the boundary,
/// or the horizon runs out.
pub fn find_escape<T: Scalar>(
    flow: &ProjectedFlow<T>,
    m0: &MetricPoint<T>,
    spec: RegionSpec,
    horizon: T,
    direction: Direction,
) -> Result<Option<EscapeRecord<T>>> {
    let region = Region::new(spec);
    if !region.contains(m0) {
        return Err(Error::NotInRegion(format!("({}, {}) is not in {spec}", m0.x(), m0.y())));
    }
    let start = [m0.x(), m0.y()];
    let Some(c) = first_crossing(flow, &region, start, direction, horizon)? else { return Ok(None) };
    let sign = direction.sign::<T>();
    let t_star = c.t_hi + lit(ESCAPE_OFFSET);
    let nb = lit::<T>(NEIGHBORHOOD_HALF_WIDTH);
    let violated = c.witness.constraint;
    let neighborhood_confirmed = states_at(flow, start, direction, &[t_star - nb, t_star + nb])?
        .into_iter()
        .all(|p| match MetricPoint::new(p[0], p[1]) {
            Ok(m) => !(violated.eval(&m) > T::zero()),
            Err(_) => false,
        });
    Ok(Some(EscapeRecord {
        start,
        direction,
        t_star: sign * t_star,
        t_before: sign * c.t_lo,
        t_after: sign * c.t_hi,
        violated,
        value_before: c.value_before,
        value_after: c.witness.value,
        neighborhood_confirmed,
    }))
}

/// Tries forward first, then backward.
pub fn find_escape_either<T: Scalar>(
    flow: &ProjectedFlow<T>,
    m0: &MetricPoint<T>,
    spec: RegionSpec,
    horizon: T,
) -> Result<Option<EscapeRecord<T>>> {
    match find_escape(flow, m0, spec, horizon, Direction::Forward)? {
        Some(rec) => Ok(Some(rec)),
        None => find_escape(flow, m0, spec, horizon, Direction::Backward),
    }
}

/// Integrates from `start` and reports the first point where `check` fails, probing
/// every accepted step end and midpoint.
fn monitor<T: Scalar>(
    flow: &ProjectedFlow<T>,
    start: [T; 2],
    direction: Direction,
    horizon: T,
    check: &impl Fn([T; 2]) -> Option<FailureKind<T>>,
) -> Option<InvarianceFailure<T>> {
    let sign = direction.sign::<T>();
    let fail = |t: T, point: [T; 2], kind| Some(InvarianceFailure { start, direction, t: sign * t, point, kind });
    if let Some(kind) = check(start) {
        return fail(T::zero(), start, kind);
    }
    if !(horizon > T::zero()) || flow.captured(start).is_some() {
        return None;
    }
    let mut it = flow.integrator(start, direction);
    let done_eps = horizon * T::epsilon() * lit(8.0);
    loop {
        let remaining = horizon - it.time();
        if remaining <= done_eps {
            return None;
        }
        let Ok(info) = it.step(remaining) else {
            return fail(it.time(), it.state(), FailureKind::Integration(Termination::StepFailure));
        };
        let half = (info.t1 - info.t0) * lit(0.5);
        let mid = it.substep(&info.y0, half);
        for (t, p) in [(info.t0 + half, mid), (info.t1, info.y1)] {
            if let Some(kind) = check(p) {
                return fail(t, p, kind);
            }
        }
        if flow.captured(info.y1).is_some() || flow.near_boundary(info.y1) {
            return None;
        }
    }
}

/// Outcome of an invariance check or escape sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport<T> {
    pub theorem: Theorem,
    pub spec: RegionSpec,
    pub claimed: ClaimedRegion,
    pub samples: usize,
    pub horizon: T,
    pub passes: usize,
    pub failures: Vec<InvarianceFailure<T>>,
    pub escapes: Vec<EscapeRecord<T>>,
    /// Starting points with no escape in either direction within the horizon.
    pub non_escaping: Vec<[T; 2]>,
}

impl<T> VerificationReport<T> {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Samples `n_samples` points of the claimed region and integrates each forward and
/// backward over `horizon`, checking strict membership in `spec` (and, for the
/// central triangle, staying within its closure up to [`TRIANGLE_MARGIN`]).
pub fn verify_invariance<T: Scalar>(
    flow: &ProjectedFlow<T>,
    spec: RegionSpec,
    claimed: ClaimedRegion,
    n_samples: usize,
    horizon: T,
    seed: u64,
) -> Result<VerificationReport<T>> {
    let region = Region::new(spec);
    let starts: Vec<[T; 2]> = claimed.sample(spec, n_samples, &mut rng(seed))?;
    let margin = lit::<T>(TRIANGLE_MARGIN);
    let check = |p: [T; 2]| -> Option<FailureKind<T>> {
        if claimed == ClaimedRegion::CentralTriangle {
            let excess = Triangle::CENTRAL.excess(p);
            if excess > margin {
                return Some(FailureKind::LeftTriangle { excess });
            }
        }
        if near_singular_corner(p) {
            return None;
        }
        let Ok(m) = MetricPoint::new(p[0], p[1]) else { return Some(FailureKind::OutOfDomain) };
        let w = region.min_constraint(&m);
        (!(w.value > T::zero())).then_some(FailureKind::LostMembership(w))
    };
    let outcomes: Vec<Vec<InvarianceFailure<T>>> = starts
        .par_iter()
        .map(|&p| {
            [Direction::Forward, Direction::Backward]
                .into_iter()
                .filter_map(|dir| monitor(flow, p, dir, horizon, &check))
                .collect()
        })
        .collect();
    let passes = outcomes.iter().filter(|f| f.is_empty()).count();
    Ok(VerificationReport {
        theorem: Theorem::of(spec.family),
        spec,
        claimed,
        samples: starts.len(),
        horizon,
        passes,
        failures: outcomes.into_iter().flatten().collect(),
        escapes: Vec::new(),
        non_escaping: Vec::new(),
    })
}

/// Samples members of `spec` and searches each for an escape, forward then backward.
/// A pass is a start whose escape was found and reproduced.
pub fn escape_sweep<T: Scalar>(
    flow: &ProjectedFlow<T>,
    spec: RegionSpec,
    n_samples: usize,
    horizon: T,
    seed: u64,
) -> Result<VerificationReport<T>> {
    let starts: Vec<[T; 2]> = sample_members(spec, n_samples, &mut rng(seed))?;
    let outcomes = starts
        .par_iter()
        .map(|&p| {
            let m = MetricPoint::new(p[0], p[1])?;
            let rec = find_escape_either(flow, &m, spec, horizon)?;
            let ok = match &rec {
                Some(r) => r.reproduce(flow)?,
                None => false,
            };
            Ok((p, rec, ok))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = VerificationReport {
        theorem: Theorem::of(spec.family),
        spec,
        claimed: ClaimedRegion::Membership,
        samples: starts.len(),
        horizon,
        passes: 0,
        failures: Vec::new(),
        escapes: Vec::new(),
        non_escaping: Vec::new(),
    };
    for (p, rec, ok) in outcomes {
        match rec {
            Some(r) => {
                report.passes += usize::from(ok);
                report.escapes.push(r);
            }
            None => report.non_escaping.push(p),
        }
    }
    Ok(report)
}

/// Classification of one grid cell centre.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellClass<T> {
    pub x: T,
    pub y: T,
    pub member: bool,
    /// Member whose trajectory keeps membership forward and backward over the horizon.
    pub preserved: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionSummary {
    pub cells: usize,
    pub members: usize,
    pub preserved: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionReport<T> {
    pub spec: RegionSpec,
    pub resolution: usize,
    pub horizon: T,
    pub cells: Vec<CellClass<T>>,
    pub boundary: Vec<Polyline<T>>,
    pub summary: RegionSummary,
}

/// Whether the trajectory from a member keeps membership in both directions.
pub fn is_preserved<T: Scalar>(flow: &ProjectedFlow<T>, m: &MetricPoint<T>, spec: RegionSpec, horizon: T) -> Result<bool> {
    let region = Region::new(spec);
    if !region.contains(m) {
        return Ok(false);
    }
    let start = [m.x(), m.y()];
    for dir in [Direction::Forward, Direction::Backward] {
        if first_crossing(flow, &region, start, dir, horizon)?.is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Member and preserved flags at cell centres `((i+½)/n, (j+½)/n)` of the triangle,
/// together with the region's boundary polylines. Rows are ordered by `j`, then `i`.
pub fn region_report<T: Scalar>(flow: &ProjectedFlow<T>, spec: RegionSpec, resolution: usize, horizon: T) -> Result<RegionReport<T>> {
    let boundary = region_boundary(spec, resolution)?;
    let region = Region::new(spec);
    let n = resolution;
    let scale = T::from_usize(n).unwrap();
    let half = lit::<T>(0.5);
    let centres: Vec<[T; 2]> = (0..n)
        .flat_map(|j| (0..n).map(move |i| (i, j)))
        .map(|(i, j)| [(T::from_usize(i).unwrap() + half) / scale, (T::from_usize(j).unwrap() + half) / scale])
        .filter(|p| p[0] + p[1] < T::one())
        .collect();
    let cells = centres
        .par_iter()
        .map(|&p| {
            let m = MetricPoint::new(p[0], p[1])?;
            let member = region.contains(&m);
            let preserved = member && is_preserved(flow, &m, spec, horizon)?;
            Ok(CellClass { x: p[0], y: p[1], member, preserved })
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = RegionSummary {
        cells: cells.len(),
        members: cells.iter().filter(|c| c.member).count(),
        preserved: cells.iter().filter(|c| c.preserved).count(),
    };
    Ok(RegionReport { spec, resolution, horizon, cells, boundary, summary })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flow() -> ProjectedFlow<f64> {
        ProjectedFlow::new().unwrap()
    }

    fn mp(x: f64, y: f64) -> MetricPoint<f64> {
        MetricPoint::new(x, y).unwrap()
    }

    #[test]
    fn triangle_geometry() {
        let tc = Triangle::CENTRAL;
        assert!(tc.contains_interior([0.3, 0.35]));
        assert!(!tc.contains_interior([0.2, 0.2]));
        assert!((tc.excess([0.2, 0.2]) - 0.1 / 2f64.sqrt()).abs() < 1e-15);
        assert!(tc.contains([0.5 + 5e-10, 0.2], TRIANGLE_MARGIN));
        assert!(!tc.contains([0.5 + 2e-9, 0.2], TRIANGLE_MARGIN));
        let mut r = rng(7);
        for tri in [Triangle::T1, Triangle::T2, Triangle::T3, Triangle::CENTRAL, Triangle::OUQ] {
            for _ in 0..200 {
                let p: [f64; 2] = tri.sample(&mut r);
                assert!(tri.contains_interior(p));
            }
        }
    }

    #[test]
    fn segment_helpers() {
        use EquilibriumLabel::*;
        let p = point_on_segment::<f64>(U, L, 0.5);
        assert!((p[0] - 5.0 / 12.0).abs() < 1e-15 && (p[1] - 1.0 / 6.0).abs() < 1e-15);
        assert!(distance_to_segment(U, L, p) < 1e-15);
        assert!((distance_to_segment::<f64>(O, L, [0.25, 0.1]) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn sampling_is_reproducible() {
        let spec = RegionSpec::sec_ric(5).unwrap();
        let a: Vec<[f64; 2]> = sample_members(spec, 20, &mut rng(42)).unwrap();
        let b: Vec<[f64; 2]> = sample_members(spec, 20, &mut rng(42)).unwrap();
        assert_eq!(a, b);
        let region = Region::new(spec);
        assert!(a.iter().all(|p| region.contains(&mp(p[0], p[1]))));
    }

    #[test]
    fn escape_requires_membership() {
        let spec = RegionSpec::sec_ric(4).unwrap();
        assert!(matches!(find_escape(&flow(), &mp(0.2, 0.2), spec, 10.0, Direction::Forward), Err(Error::NotInRegion(_))));
    }

    #[test]
    fn no_escape_from_central_triangle() {
        let spec = RegionSpec::sec_ric(4).unwrap();
        let f = flow();
        for dir in [Direction::Forward, Direction::Backward] {
            assert!(find_escape(&f, &mp(0.3, 0.35), spec, 50.0, dir).unwrap().is_none());
        }
    }

    #[test]
    fn escape_is_bracketed_and_reproducible() {
        let f = flow();
        let spec = RegionSpec::ric_scal(1).unwrap();
        // outside the central triangle: alpha-limit is a vertex, where membership fails
        let m = mp(0.55, 0.2);
        assert!(Region::new(spec).contains(&m));
        let rec = find_escape(&f, &m, spec, 100.0, Direction::Backward).unwrap().expect("escape");
        assert!(rec.t_star < 0.0);
        assert!((rec.t_before - rec.t_after).abs() <= BISECTION_TOL);
        assert!(rec.value_before > 0.0 && rec.value_after <= 0.0);
        assert!(rec.neighborhood_confirmed);
        assert!(rec.reproduce(&f).unwrap());
    }

    #[test]
    fn invariance_examples() {
        let f = flow();
        let spec = RegionSpec::sec_ric(4).unwrap();
        let rep = verify_invariance(&f, spec, ClaimedRegion::CentralTriangle, 12, 20.0, 42).unwrap();
        assert_eq!(rep.theorem, Theorem::A);
        assert_eq!(rep.passes, 12);
        assert!(rep.all_passed());
        let vacuous = verify_invariance(&f, spec, ClaimedRegion::CentralTriangle, 5, 0.0, 42).unwrap();
        assert_eq!(vacuous.passes, 5);
    }

    #[test]
    fn invariance_failure_has_witness() {
        // sec-ric 5 membership over the whole region is not invariant
        let f = flow();
        let spec = RegionSpec::sec_ric(5).unwrap();
        let rep = verify_invariance(&f, spec, ClaimedRegion::Membership, 40, 50.0, 42).unwrap();
        assert!(!rep.failures.is_empty());
        assert!(rep.failures.iter().all(|fl| fl.confirm()));
    }

    #[test]
    fn theorem_parsing() {
        assert_eq!("A".parse::<Theorem>().unwrap(), Theorem::A);
        assert_eq!("b".parse::<Theorem>().unwrap().family(), Family::RicScal);
        assert!("C".parse::<Theorem>().is_err());
        assert_eq!(ClaimedRegion::for_spec(RegionSpec::sec_ric(2).unwrap()), ClaimedRegion::Medians);
        assert_eq!(ClaimedRegion::for_spec(RegionSpec::ric_scal(2).unwrap()), ClaimedRegion::CentralTriangle);
    }
}
