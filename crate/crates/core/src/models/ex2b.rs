//! Three-dimensional SDE with bounded oscillatory drift and degenerate
//! additive noise:
//!
//! ```text
//! dX1 = cos( X3 * exp(X2^3) ) dt
//! dX2 = sqrt(2) dW
//! dX3 = 0
//! ```
//!
//! The second and third components are in closed form, so the first is a
//! pathwise time integral:
//! `X1(t) = x1 + int_0^t cos( x3 * exp([x2 + sqrt(2) W(s)]^3) ) ds`,
//! evaluated here with the trapezoid rule on the driving path's own grid.
//! The map `x -> E[X^x(t)]` is continuous but not locally Hoelder
//! continuous in the `x3` direction; the Hoelder probe quantifies this.

use super::{functions::exp_cubed, Mat, SdeModel};
use crate::brownian::PathBundle;
use crate::error::{Error, Result};
use crate::grid::floor_h;

const SQRT2: f64 = std::f64::consts::SQRT_2;

#[derive(Debug, Default)]
pub struct OscillatoryDrift;

pub fn ex2b() -> OscillatoryDrift {
    OscillatoryDrift
}

impl SdeModel for OscillatoryDrift {
    fn name(&self) -> &'static str {
        "ex2b"
    }

    fn dim(&self) -> usize {
        3
    }

    fn noise_dim(&self) -> usize {
        1
    }

    fn drift(&self, x: &[f64], out: &mut [f64]) {
        out[0] = (x[2] * exp_cubed(x[1])).cos();
        out[1] = 0.0;
        out[2] = 0.0;
    }

    fn diffusion(&self, _x: &[f64]) -> Mat {
        Mat::from_rows(vec![vec![0.0], vec![SQRT2], vec![0.0]])
    }

    fn apply_diffusion(&self, _x: &[f64], dw: &[f64], out: &mut [f64]) {
        out[0] = 0.0;
        out[1] = SQRT2 * dw[0];
        out[2] = 0.0;
    }

    fn has_exact_solution(&self) -> bool {
        true
    }

    fn exact_terminal(&self, x0: &[f64], bundle: &PathBundle, t: f64) -> Result<Vec<f64>> {
        if x0.len() != 3 {
            return Err(Error::domain("ex2b needs a 3-dimensional initial value"));
        }
        let grid = bundle.grid;
        let end = floor_h(t, grid)?;
        if end.time() != t || end.index > grid.step_count() {
            return Err(Error::domain(format!(
                "exact evaluation time {t} must be a grid point of the driving path"
            )));
        }
        let w = bundle.component(0);
        let integrand = |i: usize| {
            let y = x0[1] + SQRT2 * w.at(i);
            (x0[2] * exp_cubed(y)).cos()
        };
        // trapezoid on the path grid
        let h = grid.h();
        let mut acc = 0.0;
        if end.index > 0 {
            acc += 0.5 * (integrand(0) + integrand(end.index));
            for i in 1..end.index {
                acc += integrand(i);
            }
        }
        Ok(vec![x0[0] + h * acc, x0[1] + SQRT2 * w.at(end.index), x0[2]])
    }
}
