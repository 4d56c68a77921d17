//! Curvature, intermediate-positivity regions and the projected Ricci flow of
//! invariant metrics on the Wallach flag manifold `SU(3)/T²`.
//!
//! Invariant metrics are scaled so that `x + y + z = 1` and are addressed by the
//! point `(x, y)` of the open triangle. Everything numeric is generic over
//! [`Scalar`] (`f32` or `f64`); the aliases below fix `f64`.

// `!(a > b)` is used on purpose so that NaN counts as a failed check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
mod compensated;
pub mod contour;
pub mod curvature;
pub mod error;
pub mod flow;
pub mod portrait;
pub mod scalar;
pub mod verify;

pub use algebra::{
    sectional_curvature, sectional_from_general_formula, structure_constants, BasisIndex, Block,
    BracketTarget, CrossCurvatures, CurvatureTable, MetricPoint, StructureConstant, TorusLabel,
};
pub use curvature::{
    constraints, enumerate_triples, is_member, is_member_with_margin, region_boundary, ric_scal_value,
    ricci_components, scalar_curvature, sec_ric_value, CoefficientTriple, Constraint, Family, Membership,
    Polyline, RegionSpec, RicciComponents, Witness,
};
pub use error::{Error, Result};
pub use flow::{
    find_equilibria, full_flow_field, jacobian, vector_field, Direction, Equilibrium, EquilibriumLabel,
    ProjectedFlow, StabilityClass, Termination, Tolerances, Trajectory,
};
pub use portrait::{assemble_portrait, Portrait, HETEROCLINIC_SEGMENTS};
pub use scalar::Scalar;
pub use verify::{
    escape_sweep, find_escape, region_report, verify_invariance, ClaimedRegion, EscapeRecord, RegionReport, Theorem,
    Triangle, VerificationReport,
};

pub type Metric = MetricPoint<f64>;
pub type Metric32 = MetricPoint<f32>;
pub type Table = CurvatureTable<f64>;
pub type Ricci = RicciComponents<f64>;
pub type Flow = ProjectedFlow<f64>;
pub type Flow32 = ProjectedFlow<f32>;
pub type Path = Trajectory<f64>;
pub type Boundary = Polyline<f64>;
pub type Report = VerificationReport<f64>;
pub type Escape = EscapeRecord<f64>;
