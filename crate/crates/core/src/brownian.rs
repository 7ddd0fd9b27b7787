//! Brownian path synthesis and subsampling.
//!
//! Paths are generated once at the finest level an experiment uses and
//! restricted to coarser grids by index subsampling, never regenerated per
//! level. This is what makes strong errors well defined: the exact solution
//! and every Euler level are driven by one common path.

use crate::error::{Error, Result};
use crate::grid::{subsample_stride, TimeGrid};
use crate::rng::{SeedSpec, StreamRng};

/// One Brownian trajectory on a dyadic grid. `values[0] = 0` and the
/// increments `values[i+1] - values[i]` are i.i.d. Normal(0, h).
#[derive(Debug, Clone)]
pub struct BrownianPath {
    pub grid: TimeGrid,
    /// Which Brownian component of a multi-dimensional driver this is.
    pub component: usize,
    pub values: Vec<f64>,
}

impl BrownianPath {
    /// Sample a fresh path. Deterministic in `seed`.
    pub fn sample(seed: SeedSpec, grid: TimeGrid, component: usize) -> BrownianPath {
        let mut path = BrownianPath {
            grid,
            component,
            values: vec![0.0; grid.step_count() + 1],
        };
        path.resample(seed);
        path
    }

    /// Refill this path in place from `seed` (buffer reuse for hot loops).
    pub fn resample(&mut self, seed: SeedSpec) {
        let mut rng = StreamRng::from_spec(seed);
        let sqrt_h = self.grid.h().sqrt();
        let mut w = 0.0;
        self.values[0] = 0.0;
        for v in self.values.iter_mut().skip(1) {
            w += sqrt_h * rng.standard_normal();
            *v = w;
        }
    }

    /// Value at grid point `i`.
    #[inline]
    pub fn at(&self, index: usize) -> f64 {
        self.values[index]
    }

    pub fn terminal(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// Restriction of this path to a coarser grid with the same horizon.
    pub fn subsample(&self, coarse: TimeGrid) -> Result<BrownianPath> {
        let stride = subsample_stride(self.grid, coarse)?;
        let values = (0..=coarse.step_count())
            .map(|i| self.values[i * stride])
            .collect();
        Ok(BrownianPath {
            grid: coarse,
            component: self.component,
            values,
        })
    }
}

/// The Brownian components driving one realization of a d-dimensional SDE.
/// Components a model declares inactive (zero diffusion column) are not
/// materialized; reading one is a programming error.
pub struct PathBundle {
    pub grid: TimeGrid,
    components: Vec<Option<BrownianPath>>,
}

impl PathBundle {
    /// Sample the components in `active` for the path with index
    /// `path_index`. Stream ids are `path_index * m + component`, so the
    /// realization of a component never depends on which other components
    /// are materialized.
    pub fn sample(
        master_seed: u64,
        path_index: u64,
        grid: TimeGrid,
        noise_dim: usize,
        active: &[usize],
    ) -> PathBundle {
        let mut components: Vec<Option<BrownianPath>> = (0..noise_dim).map(|_| None).collect();
        for &c in active {
            let seed = SeedSpec::new(master_seed, path_index * noise_dim as u64 + c as u64);
            components[c] = Some(BrownianPath::sample(seed, grid, c));
        }
        PathBundle { grid, components }
    }

    /// Refill in place (same component layout).
    pub fn resample(&mut self, master_seed: u64, path_index: u64) {
        let m = self.components.len() as u64;
        for (c, slot) in self.components.iter_mut().enumerate() {
            if let Some(path) = slot {
                path.resample(SeedSpec::new(master_seed, path_index * m + c as u64));
            }
        }
    }

    pub fn noise_dim(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, c: usize) -> &BrownianPath {
        self.components[c]
            .as_ref()
            .expect("reading a Brownian component the model declared inactive")
    }

    pub fn has_component(&self, c: usize) -> bool {
        self.components[c].is_some()
    }

    /// Increment of component `c` between fine-grid indices `a` and `b`.
    #[inline]
    pub fn increment(&self, c: usize, a: usize, b: usize) -> f64 {
        let p = self.component(c);
        p.values[b] - p.values[a]
    }

    /// Install an explicit path as component `c` (used to assemble bundles
    /// from subsampled paths).
    pub fn set_component(&mut self, c: usize, path: BrownianPath) {
        assert_eq!(path.grid, self.grid, "component grid must match the bundle grid");
        assert_eq!(path.component, c, "component tag must match its slot");
        self.components[c] = Some(path);
    }

    /// Wrap a single existing path as a one-component bundle.
    pub fn from_single(path: BrownianPath) -> Result<PathBundle> {
        if path.component != 0 {
            return Err(Error::domain("single-path bundle requires component 0"));
        }
        Ok(PathBundle {
            grid: path.grid,
            components: vec![Some(path)],
        })
    }
}
