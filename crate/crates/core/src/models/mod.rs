//! The SDE zoo: drift/diffusion definitions and exact-solution evaluators.

use crate::brownian::PathBundle;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;

mod additive;
mod bsp1;
mod ex2b;
mod ex3;
pub mod functions;
mod series3;

pub use additive::{additive, PureAdditive};
pub use bsp1::{bsp1, CircleDrift};
pub use ex2b::{ex2b, OscillatoryDrift};
pub use ex3::{ex3, OrderZero};
pub use series3::{series3, SeriesDrift, SeriesDriftSpec};

/// Dense row-major matrix, just large enough for d x m diffusion
/// coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Mat {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    /// `out = self * v`.
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        assert_eq!(v.len(), self.cols);
        assert_eq!(out.len(), self.rows);
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
    }

    /// Column indices with at least one nonzero entry.
    pub fn live_columns(&self) -> Vec<usize> {
        (0..self.cols)
            .filter(|&j| (0..self.rows).any(|i| self.get(i, j) != 0.0))
            .collect()
    }
}

/// Per-level terminal evaluator a model may provide as a shortcut for the
/// plain Euler scheme. Must agree with generic Euler stepping to 1e-12
/// relative; the test suite enforces this.
pub trait TerminalEval: Send + Sync {
    fn eval(&self, bundle: &PathBundle) -> (Vec<f64>, Option<usize>);
}

/// A d-dimensional SDE `dX = mu(X) dt + sigma(X) dW` with m driving
/// Brownian components.
pub trait SdeModel: Send + Sync {
    fn name(&self) -> &'static str;
    fn dim(&self) -> usize;
    fn noise_dim(&self) -> usize;

    /// Drift, written into `out` (length `dim`).
    fn drift(&self, x: &[f64], out: &mut [f64]);

    /// Diffusion coefficient as a d x m matrix.
    fn diffusion(&self, x: &[f64]) -> Mat;

    /// `out = sigma(x) * dw`; models with sparse constant diffusion
    /// override this to skip the matrix product.
    fn apply_diffusion(&self, x: &[f64], dw: &[f64], out: &mut [f64]) {
        self.diffusion(x).apply(dw, out);
    }

    /// Whether plain Euler on this model can explode (superlinear drift);
    /// such models should be run with the tamed scheme.
    fn taming_required(&self) -> bool {
        false
    }

    /// Brownian components that actually enter the dynamics (nonzero
    /// diffusion columns). Drivers only materialize these.
    fn active_noise(&self) -> Vec<usize> {
        (0..self.noise_dim()).collect()
    }

    fn has_exact_solution(&self) -> bool {
        false
    }

    /// Exact or semi-exact solution at time `t`, measurable with respect
    /// to the driving path up to `t`. `t` must be a grid point of the
    /// bundle.
    fn exact_terminal(&self, _x0: &[f64], _bundle: &PathBundle, _t: f64) -> Result<Vec<f64>> {
        Err(Error::UnsupportedModel(format!(
            "{} has no exact solution evaluator",
            self.name()
        )))
    }

    /// Optional closed-form evaluator for the plain-Euler terminal state on
    /// `grid`, used by the error-curve driver to avoid generic stepping.
    fn plain_euler_shortcut(&self, _x0: &[f64], _grid: TimeGrid) -> Option<Box<dyn TerminalEval>> {
        None
    }
}

/// Look up a model by its registry name.
pub fn by_name(name: &str) -> Result<Box<dyn SdeModel>> {
    match name {
        "bsp1" => Ok(Box::new(bsp1())),
        "ex2b" => Ok(Box::new(ex2b())),
        "series3" => Ok(Box::new(series3()?)),
        "ex3" => Ok(Box::new(ex3())),
        other => Err(Error::UnknownModel(other.to_string())),
    }
}

pub const MODEL_NAMES: [&str; 4] = ["bsp1", "ex2b", "series3", "ex3"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_knows_all_models() {
        for name in MODEL_NAMES {
            let m = by_name(name).unwrap();
            assert_eq!(m.name(), name);
            assert!(m.dim() >= 2 && m.dim() <= 4);
        }
        assert!(by_name("nope").is_err());
    }

    #[test]
    fn mat_apply() {
        let m = Mat::from_rows(vec![vec![1.0, 2.0], vec![0.0, -1.0], vec![3.0, 0.0]]);
        let mut out = [0.0; 3];
        m.apply(&[2.0, 5.0], &mut out);
        assert_eq!(out, [12.0, -5.0, 6.0]);
        assert_eq!(m.live_columns(), vec![0, 1]);
        let z = Mat::zeros(2, 3);
        assert!(z.live_columns().is_empty());
    }
}
