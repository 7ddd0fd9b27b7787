//! Empirical regularity probes.
//!
//! The papers' statements are limits (a derivative that is infinite, a
//! modulus of continuity worse than every Hoelder exponent), so no finite
//! computation verifies them exactly. The probes quantify the approach to
//! the limit instead: growth of difference quotients as the offset
//! shrinks, with common random numbers across offsets so the comparisons
//! are nearly pathwise.

use crate::brownian::PathBundle;
use crate::error::{Error, Result};
use crate::euler::{euler_terminal, EulerConfig, Scheme};
use crate::grid::TimeGrid;
use crate::mc::{fold_jobs, Execution};
use crate::models::{bsp1, SdeModel};

#[derive(Debug, Clone)]
pub struct HolderRow {
    pub delta: f64,
    /// `| E[phi(X^{x + delta dir}(t))] - E[phi(X^x(t))] |`
    pub increment: f64,
    pub stderr: f64,
}

/// Difference-quotient scan in one direction, with the log-log slope of
/// increment against offset.
#[derive(Debug, Clone)]
pub struct HolderProbe {
    pub base: Vec<f64>,
    pub direction: Vec<f64>,
    pub t: f64,
    pub rows: Vec<HolderRow>,
    /// Least-squares slope of `ln increment` vs `ln delta`; for a
    /// C^1 dependence this sits at 1, for an alpha-Hoelder one at alpha.
    pub fitted_alpha: f64,
}

const PROBE_CHUNK: u64 = 128;

/// Estimate `E[phi(X^{x + delta dir}(t))] - E[phi(X^x(t))]` for every
/// `delta`, using exact solutions on common paths (not Euler runs, so
/// regularity failure is not confounded with discretization error).
/// `level` sets the path resolution for pathwise quadrature inside the
/// exact evaluator.
#[allow(clippy::too_many_arguments)]
pub fn holder_probe(
    model: &dyn SdeModel,
    x: &[f64],
    direction: &[f64],
    t: f64,
    phi: &(dyn Fn(&[f64]) -> f64 + Sync),
    deltas: &[f64],
    n_samples: u64,
    master_seed: u64,
    level: u32,
    exec: Execution,
) -> Result<HolderProbe> {
    if !model.has_exact_solution() {
        return Err(Error::UnsupportedModel(format!(
            "{} has no exact solution; the probe needs one",
            model.name()
        )));
    }
    if deltas.len() < 4 {
        return Err(Error::domain("need at least 4 offsets for the slope fit"));
    }
    if deltas.windows(2).any(|w| w[1] >= w[0]) || deltas.iter().any(|&d| d <= 0.0) {
        return Err(Error::domain("offsets must be positive and strictly decreasing"));
    }
    if x.len() != model.dim() || direction.len() != model.dim() {
        return Err(Error::domain("base point and direction must match the model dimension"));
    }
    let norm = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::domain(format!("direction must be a unit vector, |dir| = {norm}")));
    }
    let grid = TimeGrid::new(t, level)?;
    let active = model.active_noise();
    let points: Vec<Vec<f64>> = deltas
        .iter()
        .map(|&d| x.iter().zip(direction).map(|(xi, di)| xi + d * di).collect())
        .collect();

    struct Acc {
        sum: Vec<f64>,
        sum_sq: Vec<f64>,
        n: u64,
    }
    let n_chunks = n_samples.div_ceil(PROBE_CHUNK) as usize;
    let acc = fold_jobs(
        exec,
        n_chunks,
        |c| {
            let lo = c as u64 * PROBE_CHUNK;
            let hi = (lo + PROBE_CHUNK).min(n_samples);
            let mut bundle =
                PathBundle::sample(master_seed, lo, grid, model.noise_dim(), &active);
            let mut acc =
                Acc { sum: vec![0.0; deltas.len()], sum_sq: vec![0.0; deltas.len()], n: 0 };
            for path_idx in lo..hi {
                bundle.resample(master_seed, path_idx);
                let base_val = phi(&model.exact_terminal(x, &bundle, t)?);
                for (j, point) in points.iter().enumerate() {
                    let v = phi(&model.exact_terminal(point, &bundle, t)?) - base_val;
                    acc.sum[j] += v;
                    acc.sum_sq[j] += v * v;
                }
                acc.n += 1;
            }
            Ok(acc)
        },
        Acc { sum: vec![0.0; deltas.len()], sum_sq: vec![0.0; deltas.len()], n: 0 },
        |a, p| {
            for (x, y) in a.sum.iter_mut().zip(&p.sum) {
                *x += y;
            }
            for (x, y) in a.sum_sq.iter_mut().zip(&p.sum_sq) {
                *x += y;
            }
            a.n += p.n;
        },
    )?;

    let n = acc.n as f64;
    let rows: Vec<HolderRow> = deltas
        .iter()
        .enumerate()
        .map(|(j, &delta)| {
            let mean = acc.sum[j] / n;
            let var = if acc.n > 1 {
                ((acc.sum_sq[j] - n * mean * mean) / (n - 1.0)).max(0.0)
            } else {
                0.0
            };
            HolderRow { delta, increment: mean.abs(), stderr: (var / n).sqrt() }
        })
        .collect();

    // least-squares slope of ln increment vs ln delta
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.increment > 0.0)
        .map(|r| (r.delta.ln(), r.increment.ln()))
        .collect();
    let fitted_alpha = if pts.len() >= 2 {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        sxy / sxx
    } else {
        f64::NAN
    };

    Ok(HolderProbe {
        base: x.to_vec(),
        direction: direction.to_vec(),
        t,
        rows,
        fitted_alpha,
    })
}

#[derive(Debug, Clone)]
pub struct LipschitzRow {
    /// Initial offset `x1` of the probe (the difference quotient divides
    /// by it).
    pub x1: f64,
    /// Mean of `X1(t)/x1` with each sample clamped to the cap; blown-up
    /// paths count at the cap.
    pub truncated_mean: f64,
    pub median: f64,
    pub flagged_fraction: f64,
}

/// Clamp for ratio samples; the untruncated expectation diverges as
/// `x1 -> 0`, so only capped statistics are meaningful.
pub const RATIO_CAP: f64 = 1e6;

/// Difference-quotient blow-up probe for the circle-drift model: estimates
/// `E[X1^{(x1, x2)}(t)] / x1` (note `X1^{(0, x2)} = 0`) with the tamed
/// scheme, for each offset in `x1_list`, with common paths across offsets.
pub fn lipschitz_blowup_probe(
    t: f64,
    x2: f64,
    x1_list: &[f64],
    n_samples: u64,
    master_seed: u64,
    level: u32,
    exec: Execution,
) -> Result<Vec<LipschitzRow>> {
    if !(x2 > 0.0) {
        return Err(Error::domain(format!("probe needs x2 > 0, got {x2}")));
    }
    if x1_list.iter().any(|&v| v <= 0.0) {
        return Err(Error::domain("offsets x1 must be positive"));
    }
    if n_samples == 0 {
        return Err(Error::domain("need at least one sample"));
    }
    let model = bsp1();
    let grid = TimeGrid::new(t, level)?;
    let cfg = EulerConfig { grid, scheme: Scheme::Tamed, blow_up_threshold: 1e10 };
    let active = model.active_noise();
    let n_chunks = n_samples.div_ceil(PROBE_CHUNK) as usize;

    let mut rows = Vec::with_capacity(x1_list.len());
    for &x1 in x1_list {
        let x0 = [x1, x2];
        let (mut ratios, flagged) = fold_jobs(
            exec,
            n_chunks,
            |c| {
                let lo = c as u64 * PROBE_CHUNK;
                let hi = (lo + PROBE_CHUNK).min(n_samples);
                let mut bundle =
                    PathBundle::sample(master_seed, lo, grid, model.noise_dim(), &active);
                let mut ratios = Vec::with_capacity((hi - lo) as usize);
                let mut flagged = 0u64;
                for path_idx in lo..hi {
                    bundle.resample(master_seed, path_idx);
                    let (y, flag) = euler_terminal(&model, &x0, &bundle, &cfg)?;
                    let ratio = if flag.is_some() {
                        flagged += 1;
                        RATIO_CAP
                    } else {
                        (y[0] / x1).clamp(-RATIO_CAP, RATIO_CAP)
                    };
                    ratios.push(ratio);
                }
                Ok((ratios, flagged))
            },
            (Vec::with_capacity(n_samples as usize), 0u64),
            |acc, (r, f)| {
                acc.0.extend_from_slice(&r);
                acc.1 += f;
            },
        )?;
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = if ratios.len() % 2 == 1 {
            ratios[ratios.len() / 2]
        } else {
            0.5 * (ratios[ratios.len() / 2 - 1] + ratios[ratios.len() / 2])
        };
        rows.push(LipschitzRow {
            x1,
            truncated_mean: mean,
            median,
            flagged_fraction: flagged as f64 / n_samples as f64,
        });
    }
    Ok(rows)
}
