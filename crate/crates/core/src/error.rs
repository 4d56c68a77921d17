use thiserror::Error;

use crate::curvature::Family;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("metric ({x}, {y}) is outside the open triangle x > 0, y > 0, x + y < 1")]
    OutOfDomain { x: f64, y: f64 },
    #[error("full-flow state ({x}, {y}, {z}) must have positive coordinates")]
    NonPositiveState { x: f64, y: f64, z: f64 },
    #[error("basis index {0} is not in 1..=6")]
    BasisIndex(usize),
    #[error("X{0} and X{0} do not span a plane")]
    ZeroPlane(usize),
    #[error("level d = {d} is not admissible for family {family}")]
    Level { family: Family, d: u32 },
    #[error("coefficient triple ({a}, {b}, {c}) is not admissible for family {family}")]
    Triple { family: Family, a: u32, b: u32, c: u32 },
    #[error("grid resolution {got} is below the minimum {min}")]
    Resolution { got: usize, min: usize },
    #[error("Newton refinement did not converge near {label} ({x}, {y})")]
    Newton { label: &'static str, x: f64, y: f64 },
    #[error("equilibrium search found {found} equilibria, expected {expected}")]
    EquilibriumCount { found: usize, expected: usize },
    #[error("step size underflow at t = {t}")]
    StepFailure { t: f64 },
    #[error("no equilibrium captured within t = {t_max}")]
    HorizonExhausted { t_max: f64 },
    #[error("starting point is not in the region {0}")]
    NotInRegion(String),
    #[error("invalid tolerance: {0}")]
    Tolerance(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
