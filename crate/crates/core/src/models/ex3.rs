//! The four-dimensional SDE whose Euler scheme converges slower than any
//! polynomial rate ("order zero"):
//!
//! ```text
//! dX1 = 1_(1,inf)(X4) exp(-1/(X4^2-1)) cos( (X3 - C) exp(X2^3) ) dt
//! dX2 = dW2
//! dX3 = 1_(-1,1)(X4) exp(-1/(1-X4^2)) dt      (= mollifier(X4) dt)
//! dX4 = dt
//! ```
//!
//! with `C = int_0^1 exp(-1/(1-u^2)) du` and a 4x4 diffusion matrix whose
//! only nonzero entry is B[2][2] = 1 (kept at full size for fidelity; the
//! three dead components are declared inactive so drivers skip them).
//!
//! Started at the origin the solution is deterministic except for
//! `X2 = W2`: `X4(t) = t`, `X3(t)` is the running mollifier integral which
//! equals `C` for `t >= 1`, so the cosine argument vanishes and
//! `X1(t) = int_1^t exp(-1/(s^2-1)) ds`. The Euler scheme instead carries
//! the left-endpoint quadrature surplus of the mollifier (between h/20 and
//! 2h) into the cosine argument, which no mesh refinement can shake off
//! faster than `exp(-14 |ln h|^(2/3))`.

use super::{functions, Mat, SdeModel, TerminalEval};
use crate::brownian::PathBundle;
use crate::error::{Error, Result};
use crate::grid::{floor_h, subsample_stride, TimeGrid};

#[derive(Debug, Default)]
pub struct OrderZero;

pub fn ex3() -> OrderZero {
    OrderZero
}

/// Noise component that drives X2.
const W2: usize = 1;

impl SdeModel for OrderZero {
    fn name(&self) -> &'static str {
        "ex3"
    }

    fn dim(&self) -> usize {
        4
    }

    fn noise_dim(&self) -> usize {
        4
    }

    fn drift(&self, x: &[f64], out: &mut [f64]) {
        out[0] = if x[3] > 1.0 {
            let c = functions::mollifier_half_integral();
            (-1.0 / (x[3] * x[3] - 1.0)).exp()
                * ((x[2] - c) * functions::exp_cubed(x[1])).cos()
        } else {
            0.0
        };
        out[1] = 0.0;
        out[2] = functions::mollifier(x[3]);
        out[3] = 1.0;
    }

    fn diffusion(&self, _x: &[f64]) -> Mat {
        let mut b = Mat::zeros(4, 4);
        b.set(W2, W2, 1.0);
        b
    }

    fn apply_diffusion(&self, _x: &[f64], dw: &[f64], out: &mut [f64]) {
        out[0] = 0.0;
        out[1] = dw[W2];
        out[2] = 0.0;
        out[3] = 0.0;
    }

    fn active_noise(&self) -> Vec<usize> {
        vec![W2]
    }

    fn has_exact_solution(&self) -> bool {
        true
    }

    fn exact_terminal(&self, x0: &[f64], bundle: &PathBundle, t: f64) -> Result<Vec<f64>> {
        if x0.len() != 4 {
            return Err(Error::domain("ex3 needs a 4-dimensional initial value"));
        }
        if x0.iter().any(|&v| v != 0.0) {
            return Err(Error::UnsupportedModel(
                "ex3 exact solution is only available from the zero initial state".into(),
            ));
        }
        let end = floor_h(t, bundle.grid)?;
        if end.time() != t || end.index > bundle.grid.step_count() {
            return Err(Error::domain(format!(
                "exact evaluation time {t} must be a grid point of the driving path"
            )));
        }
        Ok(vec![
            functions::upper_tail_integral(t)?,
            bundle.component(W2).at(end.index),
            functions::mollifier_partial_integral(t)?,
            t,
        ])
    }

    fn plain_euler_shortcut(&self, x0: &[f64], grid: TimeGrid) -> Option<Box<dyn TerminalEval>> {
        if x0.len() != 4 || x0.iter().any(|&v| v != 0.0) {
            return None;
        }
        Some(Box::new(OrderZeroLevelEval::new(grid)))
    }
}

/// Precomputed per-level evaluator for the plain Euler terminal state from
/// the origin. The deterministic components X3, X4 and the cell weights of
/// X1 depend only on the grid, so they are computed once per level and
/// shared by all paths; per path only `sum_n a_n cos(g exp(W2(nh)^3))`
/// remains.
struct OrderZeroLevelEval {
    grid: TimeGrid,
    /// First step index with `nh > 1` (X1 cells before it contribute 0).
    first_cell: usize,
    /// `exp(-1/((nh)^2-1)) * h` for each contributing cell.
    weights: Vec<f64>,
    /// Constant cosine argument scale: stair-integral surplus `I_h - C`.
    surplus: f64,
    /// Euler value of X3 at the horizon.
    x3_terminal: f64,
}

impl OrderZeroLevelEval {
    fn new(grid: TimeGrid) -> OrderZeroLevelEval {
        let h = grid.h();
        let n = grid.step_count();
        let c = functions::mollifier_half_integral();
        let surplus = functions::mollifier_stair_integral(h) - c;
        let mut first_cell = n;
        let mut weights = Vec::new();
        for k in 0..n {
            let t_k = grid.time(k);
            if t_k > 1.0 {
                if weights.is_empty() {
                    first_cell = k;
                }
                weights.push((-1.0 / (t_k * t_k - 1.0)).exp() * h);
            }
        }
        // X3 accumulates mollifier(kh) * h over all steps, exactly like the
        // generic scheme does.
        let mut x3 = 0.0;
        for k in 0..n {
            x3 += functions::mollifier(grid.time(k)) * h;
        }
        OrderZeroLevelEval { grid, first_cell, weights, surplus, x3_terminal: x3 }
    }
}

impl TerminalEval for OrderZeroLevelEval {
    fn eval(&self, bundle: &PathBundle) -> (Vec<f64>, Option<usize>) {
        let stride = subsample_stride(bundle.grid, self.grid)
            .expect("shortcut evaluated with an incompatible path grid");
        let w = bundle.component(W2);
        let mut x1 = 0.0;
        for (j, a) in self.weights.iter().enumerate() {
            let wv = w.at((self.first_cell + j) * stride);
            x1 += a * (self.surplus * functions::exp_cubed(wv)).cos();
        }
        let x2 = w.at(self.grid.step_count() * stride);
        (vec![x1, x2, self.x3_terminal, self.grid.horizon()], None)
    }
}
