//! Drift-free model with constant diffusion, `dX = B dW`. The Euler scheme
//! reproduces its solution `X(t) = x0 + B W(t)` up to floating-point
//! accumulation, which makes it the calibration model for scheme-exactness
//! tests and benchmarks.

use super::{Mat, SdeModel};
use crate::brownian::PathBundle;
use crate::error::{Error, Result};
use crate::grid::floor_h;

#[derive(Debug)]
pub struct PureAdditive {
    b: Mat,
    active: Vec<usize>,
}

pub fn additive(b: Mat) -> PureAdditive {
    let active = b.live_columns();
    PureAdditive { b, active }
}

impl SdeModel for PureAdditive {
    fn name(&self) -> &'static str {
        "additive"
    }

    fn dim(&self) -> usize {
        self.b.rows
    }

    fn noise_dim(&self) -> usize {
        self.b.cols
    }

    fn drift(&self, _x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
    }

    fn diffusion(&self, _x: &[f64]) -> Mat {
        self.b.clone()
    }

    fn apply_diffusion(&self, _x: &[f64], dw: &[f64], out: &mut [f64]) {
        self.b.apply(dw, out);
    }

    fn active_noise(&self) -> Vec<usize> {
        self.active.clone()
    }

    fn has_exact_solution(&self) -> bool {
        true
    }

    fn exact_terminal(&self, x0: &[f64], bundle: &PathBundle, t: f64) -> Result<Vec<f64>> {
        if x0.len() != self.dim() {
            return Err(Error::domain("initial value dimension mismatch"));
        }
        let end = floor_h(t, bundle.grid)?;
        if end.time() != t || end.index > bundle.grid.step_count() {
            return Err(Error::domain(format!(
                "exact evaluation time {t} must be a grid point of the driving path"
            )));
        }
        let mut x = x0.to_vec();
        for &c in &self.active {
            let w = bundle.component(c).at(end.index);
            for (i, xi) in x.iter_mut().enumerate() {
                *xi += self.b.get(i, c) * w;
            }
        }
        Ok(x)
    }
}
