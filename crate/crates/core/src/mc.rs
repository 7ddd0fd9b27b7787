//! Deterministic parallel Monte Carlo reduction and the bounded-integrand
//! expectation oracles.
//!
//! Work is split into fixed-size chunks keyed by chunk index; each chunk
//! owns one random stream and accumulates its partial sums sequentially.
//! Chunk results are folded in index order, so the result is bit-identical
//! for any thread count, with or without the `parallel` feature.

use crate::brownian::BrownianPath;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::rng::{SeedSpec, StreamRng};

/// How chunked work is executed. `Parallel` falls back to sequential when
/// the crate is built without the `parallel` feature; results are
/// bit-identical either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

/// Map `f` over `0..n_jobs` and collect the results in index order.
pub fn map_jobs<T: Send>(
    exec: Execution,
    n_jobs: usize,
    f: impl Fn(usize) -> T + Sync + Send,
) -> Vec<T> {
    match exec {
        Execution::Sequential => (0..n_jobs).map(f).collect(),
        Execution::Parallel => {
            #[cfg(feature = "parallel")]
            {
                use rayon::prelude::*;
                (0..n_jobs).into_par_iter().map(f).collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                (0..n_jobs).map(f).collect()
            }
        }
    }
}

/// Fold chunked `Result` partials in index order, short-circuiting on the
/// first error.
pub fn fold_jobs<A, T: Send>(
    exec: Execution,
    n_jobs: usize,
    job: impl Fn(usize) -> Result<T> + Sync + Send,
    mut init: A,
    mut merge: impl FnMut(&mut A, T),
) -> Result<A> {
    for partial in map_jobs(exec, n_jobs, job) {
        merge(&mut init, partial?);
    }
    Ok(init)
}

/// Samples per chunk for the scalar expectation oracles.
const ORACLE_CHUNK: u64 = 65_536;

/// Monte Carlo estimate of a scalar expectation.
#[derive(Debug, Clone, Copy)]
pub struct McExpectation {
    pub mean: f64,
    /// `sample_std / sqrt(n)`; a valid CLT bar because the integrand is
    /// bounded by contract.
    pub stderr: f64,
    pub n: u64,
}

struct Partial {
    sum: f64,
    sum_sq: f64,
    n: u64,
}

fn check_sample(v: f64, bound: f64) -> Result<f64> {
    if !v.is_finite() {
        return Err(Error::NonFinite(format!(
            "bounded integrand contract violated: sample = {v}"
        )));
    }
    if v.abs() > bound * (1.0 + 1e-12) {
        return Err(Error::Precondition(format!(
            "sample {v} exceeds declared bound {bound}"
        )));
    }
    Ok(v)
}

fn finalize(sum: f64, sum_sq: f64, n: u64) -> McExpectation {
    let nf = n as f64;
    let mean = sum / nf;
    let var = if n > 1 {
        ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0)
    } else {
        0.0
    };
    McExpectation { mean, stderr: (var / nf).sqrt(), n }
}

/// `E[g(Z)]` for a standard normal `Z` and a bounded functional `g`.
///
/// The caller asserts `|g| <= bound` everywhere; every sample is checked
/// against it so the CLT error bar is rigorous.
pub fn gaussian_expectation_mc(
    g: impl Fn(f64) -> f64 + Sync,
    bound: f64,
    n: u64,
    seed: SeedSpec,
    exec: Execution,
) -> Result<McExpectation> {
    if n < 10_000 {
        return Err(Error::domain(format!("MC oracle needs n >= 1e4, got {n}")));
    }
    if !(bound.is_finite() && bound >= 0.0) {
        return Err(Error::domain(format!("bad bound {bound}")));
    }
    let n_chunks = n.div_ceil(ORACLE_CHUNK) as usize;
    let base_stream = seed.stream_id << 32;
    let acc = fold_jobs(
        exec,
        n_chunks,
        |c| {
            let lo = c as u64 * ORACLE_CHUNK;
            let hi = (lo + ORACLE_CHUNK).min(n);
            let mut rng =
                StreamRng::from_spec(SeedSpec::new(seed.master_seed, base_stream + c as u64));
            let mut p = Partial { sum: 0.0, sum_sq: 0.0, n: 0 };
            for _ in lo..hi {
                let v = check_sample(g(rng.standard_normal()), bound)?;
                p.sum += v;
                p.sum_sq += v * v;
                p.n += 1;
            }
            Ok(p)
        },
        Partial { sum: 0.0, sum_sq: 0.0, n: 0 },
        |a, p| {
            a.sum += p.sum;
            a.sum_sq += p.sum_sq;
            a.n += p.n;
        },
    )?;
    Ok(finalize(acc.sum, acc.sum_sq, acc.n))
}

/// Paths per chunk for the path-functional oracle.
const PATH_CHUNK: u64 = 256;

/// `E[f(W)]` over independent Brownian paths on `grid`, for a bounded path
/// functional `f`. Time-discretization error of any integral inside `f` is
/// the caller's to control via the grid resolution.
pub fn brownian_functional_mc(
    f: impl Fn(&BrownianPath) -> f64 + Sync,
    bound: f64,
    grid: TimeGrid,
    n: u64,
    seed: SeedSpec,
    exec: Execution,
) -> Result<McExpectation> {
    if n == 0 {
        return Err(Error::domain("need at least one path"));
    }
    if !(bound.is_finite() && bound >= 0.0) {
        return Err(Error::domain(format!("bad bound {bound}")));
    }
    let n_chunks = n.div_ceil(PATH_CHUNK) as usize;
    let base_stream = seed.stream_id << 32;
    let acc = fold_jobs(
        exec,
        n_chunks,
        |c| {
            let lo = c as u64 * PATH_CHUNK;
            let hi = (lo + PATH_CHUNK).min(n);
            let mut path = BrownianPath::sample(
                SeedSpec::new(seed.master_seed, base_stream + lo),
                grid,
                0,
            );
            let mut p = Partial { sum: 0.0, sum_sq: 0.0, n: 0 };
            for i in lo..hi {
                path.resample(SeedSpec::new(seed.master_seed, base_stream + i));
                let v = check_sample(f(&path), bound)?;
                p.sum += v;
                p.sum_sq += v * v;
                p.n += 1;
            }
            Ok(p)
        },
        Partial { sum: 0.0, sum_sq: 0.0, n: 0 },
        |a, p| {
            a.sum += p.sum;
            a.sum_sq += p.sum_sq;
            a.n += p.n;
        },
    )?;
    Ok(finalize(acc.sum, acc.sum_sq, acc.n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_has_zero_stderr() {
        let e = gaussian_expectation_mc(|_| 1.0, 1.0, 10_000, SeedSpec::new(1, 0), Execution::Sequential)
            .unwrap();
        assert_eq!(e.mean, 1.0);
        assert_eq!(e.stderr, 0.0);
        assert_eq!(e.n, 10_000);
    }

    #[test]
    fn identity_is_centered() {
        let e = gaussian_expectation_mc(
            |z| z.clamp(-1e6, 1e6),
            1e6,
            1_000_000,
            SeedSpec::new(3, 0),
            Execution::default(),
        )
        .unwrap();
        assert!(e.mean.abs() <= 3.0 * e.stderr.max(1e-6), "mean {} stderr {}", e.mean, e.stderr);
    }

    #[test]
    fn stderr_shrinks_like_sqrt_n() {
        let run = |n| {
            gaussian_expectation_mc(|z| z.tanh(), 1.0, n, SeedSpec::new(9, 0), Execution::Sequential)
                .unwrap()
                .stderr
        };
        let a = run(20_000);
        let b = run(40_000);
        let ratio = a / b;
        assert!((ratio - 2f64.sqrt()).abs() < 0.1 * 2f64.sqrt(), "ratio {ratio}");
    }

    #[test]
    fn mean_respects_bound() {
        let e = gaussian_expectation_mc(|z| z.sin(), 1.0, 50_000, SeedSpec::new(4, 1), Execution::default())
            .unwrap();
        assert!(e.mean.abs() <= 1.0);
    }

    #[test]
    fn bound_violation_is_an_error() {
        let r = gaussian_expectation_mc(|z| 2.0 * z, 1e-6, 10_000, SeedSpec::new(5, 0), Execution::Sequential);
        assert!(matches!(r, Err(Error::Precondition(_))));
        let r = gaussian_expectation_mc(|_| f64::NAN, 1.0, 10_000, SeedSpec::new(5, 0), Execution::Sequential);
        assert!(matches!(r, Err(Error::NonFinite(_))));
    }

    #[test]
    fn small_n_rejected() {
        assert!(gaussian_expectation_mc(|_| 0.0, 1.0, 9_999, SeedSpec::new(0, 0), Execution::Sequential).is_err());
    }

    #[test]
    fn path_functional_constant_and_martingale() {
        let grid = TimeGrid::new(1.0, 6).unwrap();
        let c = brownian_functional_mc(|_| 0.25, 1.0, grid, 10_000, SeedSpec::new(7, 0), Execution::default())
            .unwrap();
        assert_eq!(c.mean, 0.25);
        assert_eq!(c.stderr, 0.0);

        let t = brownian_functional_mc(
            |p| p.terminal().clamp(-1e6, 1e6),
            1e6,
            grid,
            100_000,
            SeedSpec::new(8, 0),
            Execution::default(),
        )
        .unwrap();
        assert!(t.mean.abs() <= 3.0 * t.stderr, "mean {} stderr {}", t.mean, t.stderr);
    }

    #[test]
    fn sequential_and_parallel_agree_bitwise() {
        let seed = SeedSpec::new(11, 2);
        let g = |z: f64| (z * z).min(1e6);
        let a = gaussian_expectation_mc(g, 1e6, 200_000, seed, Execution::Sequential).unwrap();
        let b = gaussian_expectation_mc(g, 1e6, 200_000, seed, Execution::Parallel).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());

        let grid = TimeGrid::new(2.0, 5).unwrap();
        let f = |p: &BrownianPath| p.terminal().tanh();
        let a = brownian_functional_mc(f, 1.0, grid, 30_000, seed, Execution::Sequential).unwrap();
        let b = brownian_functional_mc(f, 1.0, grid, 30_000, seed, Execution::Parallel).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    }
}
