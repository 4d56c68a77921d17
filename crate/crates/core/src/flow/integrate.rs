//! Explicit Runge–Kutta stepping for small autonomous systems.
//!
//! The adaptive mode is the Dormand–Prince 5(4) pair with a PI step-size
//! controller; the fixed mode is classical RK4.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Method<T> {
    DormandPrince,
    Rk4 { step: T },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances<T> {
    pub rtol: T,
    pub atol: T,
    pub initial_step: T,
    pub min_step: T,
    pub max_step: T,
    pub max_steps: usize,
    /// Distance to a known equilibrium at which a trajectory is considered captured.
    pub capture_radius: T,
    /// Distance to the triangle boundary at which integration stops.
    pub boundary_margin: T,
    pub method: Method<T>,
}

impl<T: Scalar> Default for Tolerances<T> {
    fn default() -> Self {
        Self {
            rtol: lit(1e-10),
            atol: lit(1e-12),
            initial_step: lit(1e-3),
            min_step: lit(1e-13),
            max_step: lit(0.5),
            max_steps: 2_000_000,
            capture_radius: lit(1e-8),
            boundary_margin: lit(1e-12),
            method: Method::DormandPrince,
        }
    }
}

impl<T: Scalar> Tolerances<T> {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: T| v > T::zero() && v.is_finite();
        if !positive(self.rtol) {
            return Err(Error::Tolerance("rtol must be positive"));
        }
        if !(self.atol >= T::zero()) {
            return Err(Error::Tolerance("atol must be non-negative"));
        }
        if !positive(self.initial_step) || !positive(self.min_step) || !positive(self.max_step) {
            return Err(Error::Tolerance("step bounds must be positive"));
        }
        if !(self.capture_radius >= T::zero()) || !(self.boundary_margin >= T::zero()) {
            return Err(Error::Tolerance("capture radius and boundary margin must be non-negative"));
        }
        if let Method::Rk4 { step } = self.method {
            if !positive(step) {
                return Err(Error::Tolerance("fixed step must be positive"));
            }
        }
        Ok(())
    }
}

/// One accepted step: `(t0, y0)` to `(t1, y1)` with `t1 = t0 + h`.
#[derive(Debug, Clone, Copy)]
pub struct StepInfo<T, const N: usize> {
    pub t0: T,
    pub y0: [T; N],
    pub t1: T,
    pub y1: [T; N],
}

/// Stepper for `y' = f(y)` in elapsed time `t ≥ 0`.
pub struct Integrator<T, const N: usize, F> {
    field: F,
    tol: Tolerances<T>,
    t: T,
    y: [T; N],
    h: T,
    err_prev: T,
    steps: usize,
}

// Dormand–Prince tableau; the field is autonomous so the nodes are not needed
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
/// Fifth- minus fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;
const PI_BETA: f64 = 0.04;
const PI_ALPHA: f64 = 0.2 - 0.75 * PI_BETA;

fn axpy<T: Scalar, const N: usize>(y: &[T; N], terms: &[(T, &[T; N])]) -> [T; N] {
    let mut out = *y;
    for (w, k) in terms {
        for i in 0..N {
            out[i] = out[i] + *w * k[i];
        }
    }
    out
}

impl<T: Scalar, const N: usize, F: Fn(&[T; N]) -> [T; N]> Integrator<T, N, F> {
    pub fn new(field: F, y0: [T; N], tol: Tolerances<T>) -> Self {
        let h = match tol.method {
            Method::DormandPrince => tol.initial_step,
            Method::Rk4 { step } => step,
        };
        Self { field, tol, t: T::zero(), y: y0, h, err_prev: lit(1e-4), steps: 0 }
    }

    pub fn time(&self) -> T {
        self.t
    }

    pub fn state(&self) -> [T; N] {
        self.y
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn tolerances(&self) -> &Tolerances<T> {
        &self.tol
    }

    /// Fifth-order Dormand–Prince update and its error estimate.
    fn dp(&self, y: &[T; N], h: T) -> ([T; N], [T; N]) {
        let mut k: [[T; N]; 7] = [[T::zero(); N]; 7];
        k[0] = (self.field)(y);
        for s in 1..7 {
            let terms: Vec<(T, &[T; N])> = (0..s).map(|r| (h * lit::<T>(A[s][r]), &k[r])).collect();
            let ys = axpy(y, &terms);
            k[s] = (self.field)(&ys);
        }
        let y5 = axpy(y, &(0..7).map(|s| (h * lit::<T>(B[s]), &k[s])).collect::<Vec<_>>());
        let mut err = [T::zero(); N];
        for s in 0..7 {
            let w = h * lit::<T>(E[s]);
            for i in 0..N {
                err[i] = err[i] + w * k[s][i];
            }
        }
        (y5, err)
    }

    fn rk4(&self, y: &[T; N], h: T) -> [T; N] {
        let half = lit::<T>(0.5);
        let k1 = (self.field)(y);
        let k2 = (self.field)(&axpy(y, &[(h * half, &k1)]));
        let k3 = (self.field)(&axpy(y, &[(h * half, &k2)]));
        let k4 = (self.field)(&axpy(y, &[(h, &k3)]));
        let sixth = h / lit(6.0);
        let third = h / lit(3.0);
        axpy(y, &[(sixth, &k1), (third, &k2), (third, &k3), (sixth, &k4)])
    }

    /// State reached from `y` after time `h` in a single step of the active
    /// method. Used to evaluate inside an accepted step, where `h` is no larger
    /// than that step.
    pub fn substep(&self, y: &[T; N], h: T) -> [T; N] {
        if h == T::zero() {
            return *y;
        }
        match self.tol.method {
            Method::DormandPrince => self.dp(y, h).0,
            Method::Rk4 { .. } => self.rk4(y, h),
        }
    }

    fn error_norm(&self, y0: &[T; N], y1: &[T; N], err: &[T; N]) -> T {
        let mut acc = T::zero();
        for i in 0..N {
            let scale = self.tol.atol + self.tol.rtol * y0[i].abs().max(y1[i].abs());
            let e = err[i] / scale;
            acc = acc + e * e;
        }
        (acc / T::from_usize(N).unwrap()).sqrt()
    }

    /// Takes one accepted step of length at most `max_h`.
    pub fn step(&mut self, max_h: T) -> Result<StepInfo<T, N>> {
        let t0 = self.t;
        let y0 = self.y;
        match self.tol.method {
            Method::Rk4 { step } => {
                let h = step.min(max_h);
                let y1 = self.rk4(&y0, h);
                if y1.iter().any(|v| !v.is_finite()) {
                    return Err(Error::StepFailure { t: t0.to_f64_lossy() });
                }
                self.t = t0 + h;
                self.y = y1;
                self.steps += 1;
                Ok(StepInfo { t0, y0, t1: self.t, y1 })
            }
            Method::DormandPrince => loop {
                let h = self.h.min(max_h).min(self.tol.max_step);
                if h < self.tol.min_step && h < max_h {
                    return Err(Error::StepFailure { t: t0.to_f64_lossy() });
                }
                let (y1, err) = self.dp(&y0, h);
                let norm = self.error_norm(&y0, &y1, &err);
                if norm.is_finite() && y1.iter().all(|v| v.is_finite()) && norm <= T::one() {
                    let norm = norm.max(lit(1e-10));
                    let factor = lit::<T>(SAFETY) * norm.powf(lit(-PI_ALPHA)) * self.err_prev.powf(lit(PI_BETA));
                    let factor = factor.max(lit(MIN_FACTOR)).min(lit(MAX_FACTOR));
                    // a step clipped by max_h does not shrink the controller's step
                    self.h = self.h.max(h) * factor;
                    self.err_prev = norm;
                    self.t = t0 + h;
                    self.y = y1;
                    self.steps += 1;
                    return Ok(StepInfo { t0, y0, t1: self.t, y1 });
                }
                let factor = if norm.is_finite() {
                    (lit::<T>(SAFETY) * norm.powf(lit(-0.2))).max(lit(MIN_FACTOR)).min(T::one())
                } else {
                    lit(0.1)
                };
                self.h = h * factor;
                if self.h < self.tol.min_step {
                    return Err(Error::StepFailure { t: t0.to_f64_lossy() });
                }
            },
        }
    }
}
