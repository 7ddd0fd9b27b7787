//! Three-dimensional SDE whose first drift component is a lacunary double
//! series of cosines,
//!
//! ```text
//! mu_1(x) = sum_{n>=0} sum_{m in Z_n} 4^-(n+|m|) cos( (x3 - m/2^n) exp(x2^3) )
//! ```
//!
//! with `Z_0` all integers and `Z_n` the odd integers for `n >= 1`, driven
//! by additive noise in the second component only. The weights make the
//! series absolutely convergent with total mass 83/45 < 2, and the
//! geometric decay gives a closed-form bound for the truncation tail.
//! The associated semigroup is nowhere locally Hoelder continuous.

use super::{functions::exp_cubed, Mat, SdeModel};
use crate::error::{Error, Result};

/// Truncation of the double series: `n <= n_max`, `|m| <= m_max`.
#[derive(Debug, Clone, Copy)]
pub struct SeriesDriftSpec {
    pub n_max: u32,
    pub m_max: u32,
}

impl Default for SeriesDriftSpec {
    fn default() -> Self {
        // tail mass ~ 8e-14, comfortably below the 1e-12 contract
        SeriesDriftSpec { n_max: 20, m_max: 20 }
    }
}

/// Total mass of all weights `4^-(n+|m|)`: `5/3` from the `n = 0` row plus
/// `8/45` from the odd rows.
pub const SERIES_TOTAL_MASS: f64 = 5.0 / 3.0 + 8.0 / 45.0;

impl SeriesDriftSpec {
    /// Weight mass outside the truncation, in closed form (geometric sums).
    pub fn tail_bound(&self) -> f64 {
        let m_max = self.m_max as i32;
        let n_max = self.n_max as i32;
        // n = 0 row: 1 + 2 * sum_{m=1..m_max} 4^-m
        let row0 = 1.0 + (2.0 / 3.0) * (1.0 - 4f64.powi(-m_max));
        // n >= 1 rows: sum_{n=1..n_max} 4^-n * 2 * sum_{odd m <= m_max} 4^-m
        let odd = if m_max >= 1 {
            let k = (m_max - 1) / 2; // odd m = 2k'+1 <= m_max
            (8.0 / 15.0) * (1.0 - 16f64.powi(-(k + 1)))
        } else {
            0.0
        };
        let rows = (1.0 / 3.0) * (1.0 - 4f64.powi(-n_max)) * odd;
        (SERIES_TOTAL_MASS - (row0 + rows)).max(0.0)
    }
}

#[derive(Debug)]
pub struct SeriesDrift {
    spec: SeriesDriftSpec,
    tail_bound: f64,
}

/// Default truncation meeting the 1e-12 tail contract.
pub fn series3() -> Result<SeriesDrift> {
    SeriesDrift::new(SeriesDriftSpec::default())
}

impl SeriesDrift {
    /// Truncated series drift; the truncation must leave a tail of at most
    /// 1e-12 so that drift values are grid-independent to that accuracy.
    pub fn new(spec: SeriesDriftSpec) -> Result<SeriesDrift> {
        let tail = spec.tail_bound();
        if tail > 1e-12 {
            return Err(Error::domain(format!(
                "truncation (n_max={}, m_max={}) leaves tail {tail:e} > 1e-12",
                spec.n_max, spec.m_max
            )));
        }
        Ok(SeriesDrift { spec, tail_bound: tail })
    }

    /// Unchecked truncation, for convergence tests against finer ones.
    pub fn with_truncation(spec: SeriesDriftSpec) -> SeriesDrift {
        let tail = spec.tail_bound();
        SeriesDrift { spec, tail_bound: tail }
    }

    pub fn spec(&self) -> SeriesDriftSpec {
        self.spec
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    fn series(&self, x2: f64, x3: f64) -> f64 {
        let e = exp_cubed(x2);
        let mut sum = 0.0;
        for n in 0..=self.spec.n_max {
            let pow2n = (1u64 << n) as f64;
            let wn = 4f64.powi(-(n as i32));
            if n == 0 {
                sum += wn * (x3 * e).cos();
                for m in 1..=self.spec.m_max {
                    let wm = wn * 4f64.powi(-(m as i32));
                    let mf = m as f64;
                    sum += wm
                        * (((x3 - mf / pow2n) * e).cos() + ((x3 + mf / pow2n) * e).cos());
                }
            } else {
                let mut m = 1u32;
                while m <= self.spec.m_max {
                    let wm = wn * 4f64.powi(-(m as i32));
                    let mf = m as f64;
                    sum += wm
                        * (((x3 - mf / pow2n) * e).cos() + ((x3 + mf / pow2n) * e).cos());
                    m += 2; // odd m only
                }
            }
        }
        sum
    }
}

impl SdeModel for SeriesDrift {
    fn name(&self) -> &'static str {
        "series3"
    }

    fn dim(&self) -> usize {
        3
    }

    fn noise_dim(&self) -> usize {
        1
    }

    fn drift(&self, x: &[f64], out: &mut [f64]) {
        out[0] = self.series(x[1], x[2]);
        out[1] = 0.0;
        out[2] = 0.0;
    }

    fn diffusion(&self, _x: &[f64]) -> Mat {
        Mat::from_rows(vec![vec![0.0], vec![1.0], vec![0.0]])
    }

    fn apply_diffusion(&self, _x: &[f64], dw: &[f64], out: &mut [f64]) {
        out[0] = 0.0;
        out[1] = dw[0];
        out[2] = 0.0;
    }
}
