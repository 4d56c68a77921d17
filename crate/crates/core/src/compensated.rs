//! Integer-coefficient quadratics in `(x, y)`, evaluated with error-free
//! transformations so that the sign is right even when the value is far below
//! the size of the individual terms.

use crate::scalar::Scalar;

#[inline]
fn two_sum<T: Scalar>(a: T, b: T) -> (T, T) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn two_prod<T: Scalar>(a: T, b: T) -> (T, T) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// `c0 + c1 x + c2 y + c3 x² + c4 xy + c5 y²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Quadratic(pub [i32; 6]);

impl Quadratic {
    pub const ZERO: Quadratic = Quadratic([0; 6]);

    pub fn add_scaled(self, k: u32, other: Quadratic) -> Quadratic {
        let mut c = self.0;
        for (slot, o) in c.iter_mut().zip(other.0) {
            *slot += k as i32 * o;
        }
        Quadratic(c)
    }

    /// Evaluates with twice-working-precision accuracy (Ogita–Rump–Oishi sum2 over
    /// exact products), then rounds once.
    pub fn eval<T: Scalar>(&self, x: T, y: T) -> T {
        let (xx, xx_e) = two_prod(x, x);
        let (xy, xy_e) = two_prod(x, y);
        let (yy, yy_e) = two_prod(y, y);
        let monomials = [(T::one(), T::zero()), (x, T::zero()), (y, T::zero()), (xx, xx_e), (xy, xy_e), (yy, yy_e)];
        let mut sum = T::zero();
        let mut err = T::zero();
        for (&c, (hi, lo)) in self.0.iter().zip(monomials) {
            if c == 0 {
                continue;
            }
            let c = T::from_i32(c).unwrap();
            let (p, p_e) = two_prod(c, hi);
            let (s, s_e) = two_sum(sum, p);
            sum = s;
            err = err + s_e + p_e + c * lo;
        }
        sum + err
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_values() {
        let q = Quadratic([-3, 8, 8, -4, -12, -4]);
        let (x, y) = (0.3f64, 0.2f64);
        let direct = -3.0 + 8.0 * x + 8.0 * y - 4.0 * x * x - 12.0 * x * y - 4.0 * y * y;
        assert!((q.eval(x, y) - direct).abs() < 1e-15);
        assert_eq!(Quadratic::ZERO.add_scaled(2, q).0, [-6, 16, 16, -8, -24, -8]);
    }

    #[test]
    fn resolves_cancellation() {
        // 2(1 - 2y)(2x + 2y - 1) expanded; tiny positive near (0, 1/2)
        let q = Quadratic([-2, 4, 8, 0, -8, -8]);
        let (x, y) = (3e-9f64, 0.5 - 1e-9);
        let exact = 2.0 * (1.0 - 2.0 * y) * (2.0 * x + 2.0 * y - 1.0);
        let got = q.eval(x, y);
        assert!(got > 0.0);
        assert!((got - exact).abs() <= 1e-3 * exact);
    }
}
