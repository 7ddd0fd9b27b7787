//! Two-dimensional SDE with circle-preserving polynomial drift and linear
//! multiplicative noise:
//!
//! ```text
//! dX1 =  X1 X2 dt
//! dX2 = -X1^2 dt + X2 dW
//! ```
//!
//! The drift satisfies `<x, mu(x)> = 0`, the line `x1 = 0` is invariant,
//! and pathwise `X1(t) = x1 * exp(int_0^t X2 ds)`. On `x1 = 0` the second
//! component is a geometric Brownian motion whose exponential functionals
//! have infinite expectation, which is what the Lipschitz blow-up probe
//! measures. The superlinear `-X1^2` term means plain Euler can explode;
//! experiments use the tamed scheme.

use super::{Mat, SdeModel};

#[derive(Debug, Default)]
pub struct CircleDrift;

pub fn bsp1() -> CircleDrift {
    CircleDrift
}

impl SdeModel for CircleDrift {
    fn name(&self) -> &'static str {
        "bsp1"
    }

    fn dim(&self) -> usize {
        2
    }

    fn noise_dim(&self) -> usize {
        1
    }

    fn drift(&self, x: &[f64], out: &mut [f64]) {
        out[0] = x[0] * x[1];
        out[1] = -x[0] * x[0];
    }

    fn diffusion(&self, x: &[f64]) -> Mat {
        Mat::from_rows(vec![vec![0.0], vec![x[1]]])
    }

    fn apply_diffusion(&self, x: &[f64], dw: &[f64], out: &mut [f64]) {
        out[0] = 0.0;
        out[1] = x[1] * dw[0];
    }

    fn taming_required(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{SeedSpec, StreamRng};

    #[test]
    fn drift_examples() {
        let m = bsp1();
        let mut out = [0.0; 2];
        m.drift(&[0.0, 3.7], &mut out);
        assert_eq!(out, [0.0, 0.0]); // x1 = 0 line is invariant
        m.drift(&[1.0, 2.0], &mut out);
        assert_eq!(out, [2.0, -1.0]);
    }

    #[test]
    fn drift_is_orthogonal_to_state() {
        let m = bsp1();
        let mut rng = StreamRng::from_spec(SeedSpec::new(17, 0));
        let mut out = [0.0; 2];
        for _ in 0..100 {
            let x = [3.0 * rng.standard_normal(), 3.0 * rng.standard_normal()];
            m.drift(&x, &mut out);
            let dot = x[0] * out[0] + x[1] * out[1];
            assert!(dot.abs() < 1e-12 * (x[0] * x[0] + x[1] * x[1]).max(1.0));
        }
    }

    #[test]
    fn diffusion_matches_apply() {
        let m = bsp1();
        let x = [0.3, -1.2];
        let dw = [0.7];
        let mut fast = [0.0; 2];
        m.apply_diffusion(&x, &dw, &mut fast);
        let mut slow = [0.0; 2];
        m.diffusion(&x).apply(&dw, &mut slow);
        assert_eq!(fast, slow);
    }
}
