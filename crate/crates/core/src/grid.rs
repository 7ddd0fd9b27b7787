//! Dyadic time grids and the step-function floor operator.
//!
//! All experiments run on uniform meshes over `[0, T]` with `2^K` steps.
//! Grid points are indexed by integers and real times are derived as
//! `t_i = i * h`; keeping the index primary avoids floating-point drift
//! when comparing `floor_h` results across refinement levels.

use crate::error::{Error, Result};

/// A uniform dyadic mesh on `[0, T]` with `2^level` steps of width
/// `h = T * 2^(-level)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    horizon: f64,
    level: u32,
}

impl TimeGrid {
    /// Mesh over `[0, horizon]` with `2^level` steps.
    pub fn new(horizon: f64, level: u32) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::domain(format!("horizon must be positive, got {horizon}")));
        }
        if level > 40 {
            return Err(Error::domain(format!("level {level} too fine (max 40)")));
        }
        Ok(TimeGrid { horizon, level })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Number of steps `2^level`.
    pub fn step_count(&self) -> usize {
        1usize << self.level
    }

    /// Step width `h = T * 2^(-level)`. Exact in binary arithmetic.
    pub fn h(&self) -> f64 {
        self.horizon / self.step_count() as f64
    }

    /// Time of grid point `i`, valid for `0 <= i <= step_count`.
    pub fn time(&self, index: usize) -> f64 {
        index as f64 * self.h()
    }

    /// Grid with the same horizon, `delta` levels coarser.
    pub fn coarsen(&self, delta: u32) -> Result<Self> {
        if delta > self.level {
            return Err(Error::domain(format!(
                "cannot coarsen level {} by {delta}",
                self.level
            )));
        }
        TimeGrid::new(self.horizon, self.level - delta)
    }
}

/// Result of the floor operator: the largest grid point `n*h <= t`,
/// kept as an integer index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloorIndex {
    pub grid: TimeGrid,
    pub index: usize,
}

impl FloorIndex {
    /// The grid time `n*h` this index represents.
    pub fn time(&self) -> f64 {
        self.grid.time(self.index)
    }
}

/// The floor operator `max{ s in {0, h, 2h, ...} : s <= t }`, returned as
/// the integer `n = max{ m : m*h <= t }`.
///
/// `t` may exceed the grid horizon; the index is then past `step_count`.
pub fn floor_h(t: f64, grid: TimeGrid) -> Result<FloorIndex> {
    if !(t >= 0.0) {
        return Err(Error::domain(format!("floor_h requires t >= 0, got {t}")));
    }
    let h = grid.h();
    let mut n = (t / h).floor() as usize;
    // Guard against rounding in t/h near cell boundaries.
    while (n + 1) as f64 * h <= t {
        n += 1;
    }
    while n > 0 && n as f64 * h > t {
        n -= 1;
    }
    Ok(FloorIndex { grid, index: n })
}

/// Index stride that embeds a coarse grid into a finer one with the same
/// horizon: coarse point `i` sits at fine point `i * stride`.
pub fn subsample_stride(fine: TimeGrid, coarse: TimeGrid) -> Result<usize> {
    if fine.horizon() != coarse.horizon() {
        return Err(Error::GridMismatch(format!(
            "horizons differ: {} vs {}",
            fine.horizon(),
            coarse.horizon()
        )));
    }
    if coarse.level() > fine.level() {
        return Err(Error::GridMismatch(format!(
            "coarse level {} finer than fine level {}",
            coarse.level(),
            fine.level()
        )));
    }
    Ok(1usize << (fine.level() - coarse.level()))
}

/// The injection `i -> i * 2^(fine.K - coarse.K)` as an explicit map over
/// all coarse grid points `0 ..= step_count`.
pub fn subsample_indices(fine: TimeGrid, coarse: TimeGrid) -> Result<Vec<usize>> {
    let stride = subsample_stride(fine, coarse)?;
    Ok((0..=coarse.step_count()).map(|i| i * stride).collect())
}
