//! Real roots of monic cubics with three real roots (the casus irreducibilis).

use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Coefficients `[1, b, c, d]` of `λ³ + b λ² + c λ + d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonicCubic {
    pub coeffs: [f64; 4],
}

impl MonicCubic {
    pub fn new(b: f64, c: f64, d: f64) -> Self {
        Self { coeffs: [1.0, b, c, d] }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let [_, b, c, d] = self.coeffs;
        ((x + b) * x + c) * x + d
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let [_, b, c, _] = self.coeffs;
        (3.0 * x + 2.0 * b) * x + c
    }

    /// The three real roots in ascending order.
    ///
    /// Uses the trigonometric form for the depressed cubic `t³ + p t + q`,
    /// followed by one Newton step on the original polynomial. Fails if the
    /// discriminant indicates a single real root beyond rounding noise.
    pub fn real_roots(&self) -> Result<[f64; 3]> {
        let [_, b, c, d] = self.coeffs;
        let shift = b / 3.0;
        let p = c - b * b / 3.0;
        let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
        let scale = b.abs().max(c.abs().sqrt()).max(d.abs().cbrt());
        if !(p < 0.0) {
            if p.abs() <= 1e-14 * scale * scale && q.abs() <= 1e-14 * scale * scale * scale {
                return Ok([-shift; 3]);
            }
            return Err(Error::NumericalRootFailure(format!("depressed cubic has p = {p:e} >= 0")));
        }
        let m = 2.0 * (-p / 3.0).sqrt();
        let mut arg = 3.0 * q / (p * m);
        if arg.abs() > 1.0 {
            if arg.abs() > 1.0 + 1e-12 {
                return Err(Error::NumericalRootFailure(format!("cubic has a single real root (cos argument {arg})")));
            }
            arg = arg.signum();
        }
        let phi = arg.acos() / 3.0;
        let mut roots = [0.0; 3];
        for (k, root) in roots.iter_mut().enumerate() {
            let t = m * (phi - TAU * k as f64 / 3.0).cos();
            *root = self.polish(t - shift);
        }
        roots.sort_by(f64::total_cmp);
        Ok(roots)
    }

    fn polish(&self, x: f64) -> f64 {
        let slope = self.derivative(x);
        if slope == 0.0 {
            x
        } else {
            x - self.eval(x) / slope
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_roots() {
        let roots = MonicCubic::new(0.0, -5.0, 0.0).real_roots().unwrap();
        let s5 = 5f64.sqrt();
        assert!((roots[0] + s5).abs() < 1e-15);
        assert!(roots[1].abs() < 1e-15);
        assert!((roots[2] - s5).abs() < 1e-15);
        // (x − 1)(x − 2)(x − 3)
        let roots = MonicCubic::new(-6.0, 11.0, -6.0).real_roots().unwrap();
        for (r, e) in roots.iter().zip([1.0, 2.0, 3.0]) {
            assert!((r - e).abs() < 1e-14);
        }
    }

    #[test]
    fn single_real_root_is_rejected() {
        // x³ + x + 1
        assert!(matches!(MonicCubic::new(0.0, 1.0, 1.0).real_roots(), Err(Error::NumericalRootFailure(_))));
        // x³ − 3x + 3 (p < 0, but still only one real root)
        assert!(matches!(MonicCubic::new(0.0, -3.0, 3.0).real_roots(), Err(Error::NumericalRootFailure(_))));
    }

    #[test]
    fn triple_root() {
        // (x − 2)³
        let roots = MonicCubic::new(-6.0, 12.0, -8.0).real_roots().unwrap();
        assert!(roots.iter().all(|r| (r - 2.0).abs() < 1e-12));
    }

    proptest! {
        #[test]
        fn recovers_well_separated_roots(r0 in -10.0..10.0f64, g1 in 0.1..5.0f64, g2 in 0.1..5.0f64) {
            let (r1, r2) = (r0 + g1, r0 + g1 + g2);
            let cubic = MonicCubic::new(-(r0 + r1 + r2), r0 * r1 + r0 * r2 + r1 * r2, -r0 * r1 * r2);
            let roots = cubic.real_roots().unwrap();
            let scale = r0.abs().max(r2.abs()).max(1.0);
            for (got, want) in roots.iter().zip([r0, r1, r2]) {
                prop_assert!((got - want).abs() <= 1e-9 * scale);
            }
        }
    }
}
