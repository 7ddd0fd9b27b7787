//! The experiment subcommands. Each returns its artifacts (CSV text,
//! check lists) so the binary can decide exit codes and the test suite can
//! drive them in-process.

use crate::config::ExperimentConfig;
use crate::report::{self, fmt_f64, Series};
use sdelab::analysis::{
    mollifier_stair_surplus, holder_probe, oscillatory_sign_suite, cosine_defect_lower_bound,
    cosine_defect_h_max, stair_estimate_suite, lipschitz_blowup_probe, order0_reference,
    weak_error_lower_bound_formula, weak_strong_errors, ErrorCurve, SUITE_TOL,
};
use sdelab::euler::{euler_run, EulerConfig, Scheme};
use sdelab::grid::TimeGrid;
use sdelab::mc::{gaussian_expectation_mc, Execution};
use sdelab::models;
use sdelab::quad::{adaptive_simpson, composite_simpson};
use sdelab::rng::SeedSpec;
use sdelab::brownian::PathBundle;
use sdelab::{Error, Result};
use std::fmt::Write as _;

/// One named assertion of a command run.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
        Check { name: name.into(), passed, detail: detail.into() }
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

pub struct Figure1Outcome {
    pub curve: ErrorCurve,
    pub csv: String,
    pub svg: Option<String>,
    pub checks: Vec<Check>,
}

/// Weak/strong error sweep of the configured model against the analytic
/// bound and reference curves, emitted as CSV (and optionally SVG).
pub fn figure1(cfg: &ExperimentConfig, exec: Execution) -> Result<Figure1Outcome> {
    let model = models::by_name(&cfg.model)?;
    let x0 = vec![0.0; model.dim()];
    let curve = weak_strong_errors(
        model.as_ref(),
        &x0,
        cfg.horizon,
        &cfg.levels(),
        cfg.samples,
        cfg.seed,
        Scheme::Plain,
        exec,
    )?;

    let mut csv =
        String::from("N,h,weak_error,weak_stderr,strong_error,strong_stderr,bound_thm5,order0_ref\n");
    let mut checks = Vec::new();
    for row in &curve.rows {
        let bound = weak_error_lower_bound_formula(row.h);
        let order0 = order0_reference(row.n_steps, cfg.horizon)?;
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            row.n_steps,
            fmt_f64(row.h),
            fmt_f64(row.weak_error),
            fmt_f64(row.weak_stderr),
            fmt_f64(row.strong_error),
            fmt_f64(row.strong_stderr),
            fmt_f64(bound),
            fmt_f64(order0),
        );
        // the lower bound is asserted only on its domain h <= 1/22; the
        // CSV still carries the raw overlay value at every mesh
        if row.h <= 1.0 / 22.0 {
            checks.push(Check::new(
                format!("weak error at K={} dominates exp(-14|ln h|^(2/3))", row.level),
                row.weak_error + 3.0 * row.weak_stderr >= bound,
                format!(
                    "weak {} + 3*{} vs bound {}",
                    fmt_f64(row.weak_error),
                    fmt_f64(row.weak_stderr),
                    fmt_f64(bound)
                ),
            ));
        }
    }

    let svg = if cfg.svg.is_some() {
        let pts = |f: &dyn Fn(&sdelab::analysis::ErrorCurveRow) -> f64| {
            curve.rows.iter().map(|r| (r.n_steps as f64, f(r))).collect::<Vec<_>>()
        };
        Some(report::log_log_svg(
            &format!("|E[X(T)] - E[Y^h(T)]| for {} at T = {}", curve.model, cfg.horizon),
            &[
                Series { name: "weak error", points: pts(&|r| r.weak_error), color: "#c22", dashed: false },
                Series { name: "strong error", points: pts(&|r| r.strong_error), color: "#26a", dashed: false },
                Series {
                    name: "order-0 reference",
                    points: curve
                        .rows
                        .iter()
                        .map(|r| Ok((r.n_steps as f64, order0_reference(r.n_steps, cfg.horizon)?)))
                        .collect::<Result<_>>()?,
                    color: "#282",
                    dashed: true,
                },
                Series {
                    name: "1/(15 sqrt(N)) (order 1/2)",
                    points: pts(&|r| 1.0 / (15.0 * (r.n_steps as f64).sqrt())),
                    color: "#888",
                    dashed: true,
                },
                Series {
                    name: "1/(15 N) (order 1)",
                    points: pts(&|r| 1.0 / (15.0 * r.n_steps as f64)),
                    color: "#bbb",
                    dashed: true,
                },
                Series {
                    name: "exp(-14 |ln h|^(2/3))",
                    points: pts(&|r| weak_error_lower_bound_formula(r.h)),
                    color: "#a5a",
                    dashed: true,
                },
            ],
        ))
    } else {
        None
    };

    Ok(Figure1Outcome { curve, csv, svg, checks })
}

/// Lemma verification suites: the deterministic mollifier bracket, the two
/// randomized property suites, and (optionally, they are slow at full
/// sample counts) the Monte Carlo check of the oscillatory lower bound.
pub fn bounds_check(
    mc_samples: u64,
    with_mc: bool,
    surplus_h: Option<f64>,
    seed: u64,
    exec: Execution,
) -> Result<Vec<Check>> {
    let mut checks = Vec::new();

    for k in 3..=20u32 {
        let h = 2f64.powi(-(k as i32));
        let gap = mollifier_stair_surplus(h)?;
        checks.push(Check::new(
            format!("mollifier stair surplus in [h/20, 2h] at h = 2^-{k}"),
            gap >= h / 20.0 && gap <= 2.0 * h,
            format!("gap = {}", fmt_f64(gap)),
        ));
    }
    if let Some(h) = surplus_h {
        let gap = mollifier_stair_surplus(h)?; // out-of-domain h surfaces here
        checks.push(Check::new(
            format!("mollifier stair surplus in [h/20, 2h] at h = {h}"),
            gap >= h / 20.0 && gap <= 2.0 * h,
            format!("gap = {}", fmt_f64(gap)),
        ));
    }

    let s32 = oscillatory_sign_suite(1000, seed)?;
    checks.push(Check::new(
        "oscillatory integral sign: 1000 randomized admissible instances",
        s32.violations == 0,
        format!("worst value {} vs tol {SUITE_TOL}", fmt_f64(s32.worst)),
    ));
    let s52 = stair_estimate_suite(1000, seed)?;
    checks.push(Check::new(
        "concave-derivative quadrature estimate: 1000 randomized instances",
        s52.violations == 0,
        format!("worst margin {} vs tol {SUITE_TOL}", fmt_f64(s52.worst)),
    ));

    if with_mc {
        for (i, (t, x, h)) in cosine_defect_grid().into_iter().enumerate() {
            let mc = gaussian_expectation_mc(
                |z| (h * sdelab::models::functions::exp_cubed(x + t.sqrt() * z)).cos(),
                1.0,
                mc_samples,
                SeedSpec::new(seed, 100 + i as u64),
                exec,
            )?;
            let left = 1.0 - mc.mean;
            let rhs = cosine_defect_lower_bound(t, x, h)?;
            checks.push(Check::new(
                format!("cosine lower bound at (t={t}, x={x}, h={h:.3e})"),
                left >= rhs - 3.0 * mc.stderr,
                format!("MC left {} (se {}) vs rhs {}", fmt_f64(left), fmt_f64(mc.stderr), fmt_f64(rhs)),
            ));
        }
    }
    Ok(checks)
}

/// The 27 admissible (t, x, h) combinations used by the oscillatory-bound
/// oracle check.
pub fn cosine_defect_grid() -> Vec<(f64, f64, f64)> {
    let mut grid = Vec::with_capacity(27);
    for &t in &[0.5, 1.0, 2.0] {
        for &x in &[-0.5, 0.0, 0.25] {
            let h_max = cosine_defect_h_max(t, x).expect("grid points are admissible");
            for &scale in &[1.0, 0.125, 0.015625] {
                grid.push((t, x, h_max * scale));
            }
        }
    }
    grid
}

pub struct ProbeOutcome {
    pub csv: String,
    pub summary: String,
    pub checks: Vec<Check>,
}

/// Hoelder probe: difference quotients of the oscillatory-drift model in
/// the rough direction, with the square-root-rate comparison column.
pub fn probe_holder(samples: u64, seed: u64, level: u32, exec: Execution) -> Result<ProbeOutcome> {
    let model = models::ex2b();
    let deltas = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
    let phi = |x: &[f64]| x[0];
    let probe = holder_probe(
        &model,
        &[0.0, 0.0, 0.0],
        &[0.0, 0.0, 1.0],
        1.0,
        &phi,
        &deltas,
        samples,
        seed,
        level,
        exec,
    )?;
    let mut csv = String::from("delta,increment,stderr,increment_over_sqrt_delta\n");
    let mut ratios = Vec::new();
    for row in &probe.rows {
        let ratio = row.increment / row.delta.sqrt();
        ratios.push(ratio);
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            fmt_f64(row.delta),
            fmt_f64(row.increment),
            fmt_f64(row.stderr),
            fmt_f64(ratio),
        );
    }
    let mut checks = Vec::new();
    for w in ratios.windows(2) {
        checks.push(Check::new(
            "increment / sqrt(delta) strictly increasing as delta shrinks",
            w[1] > w[0],
            format!("{} -> {}", fmt_f64(w[0]), fmt_f64(w[1])),
        ));
    }
    let summary = format!(
        "fitted alpha (log-log slope over {} offsets): {:.4}",
        probe.rows.len(),
        probe.fitted_alpha
    );
    Ok(ProbeOutcome { csv, summary, checks })
}

/// Lipschitz blow-up probe on the circle-drift model: capped difference
/// quotients must grow as the initial offset shrinks.
pub fn probe_lipschitz(samples: u64, seed: u64, level: u32, exec: Execution) -> Result<ProbeOutcome> {
    let x1_list = [1e-1, 1e-2, 1e-3, 1e-4];
    let rows = lipschitz_blowup_probe(1.0, 1.0, &x1_list, samples, seed, level, exec)?;
    let mut csv = String::from("x1,truncated_mean,median,flagged_fraction\n");
    for row in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            fmt_f64(row.x1),
            fmt_f64(row.truncated_mean),
            fmt_f64(row.median),
            fmt_f64(row.flagged_fraction),
        );
    }
    let mut checks = Vec::new();
    for w in rows.windows(2) {
        checks.push(Check::new(
            "capped ratio grows as the offset shrinks",
            w[1].truncated_mean > w[0].truncated_mean,
            format!(
                "x1 {} -> {}: mean {} -> {}",
                w[0].x1,
                w[1].x1,
                fmt_f64(w[0].truncated_mean),
                fmt_f64(w[1].truncated_mean)
            ),
        ));
    }
    let summary = format!(
        "capped mean at x1={}: {:.4}; at x1={}: {:.4}",
        rows[0].x1,
        rows[0].truncated_mean,
        rows.last().unwrap().x1,
        rows.last().unwrap().truncated_mean
    );
    Ok(ProbeOutcome { csv, summary, checks })
}

/// Pin every derived constant with dual-method provenance. Hard error when
/// the two routes disagree beyond 1e-10.
pub fn fixtures() -> Result<String> {
    let mut out = String::from("# pinned constants; adaptive Simpson tol 1e-12 cross-checked\n");
    out.push_str("# against composite Simpson with 2^20 panels (dual-method gap shown)\n");

    let mut pin_integral = |name: &str,
                            f: &dyn Fn(f64) -> f64,
                            a: f64,
                            b: f64|
     -> Result<()> {
        let adaptive = adaptive_simpson(f, a, b, 1e-12)?.value;
        let composite = composite_simpson(f, a, b, 1 << 20)?;
        let gap = (adaptive - composite).abs();
        if gap > 1e-10 {
            return Err(Error::Precondition(format!(
                "fixture {name}: dual-method disagreement {gap:e} > 1e-10"
            )));
        }
        let _ = writeln!(out, "# dual-method gap {:.3e}", gap);
        let _ = writeln!(out, "{name} = {}", fmt_f64(adaptive));
        Ok(())
    };

    pin_integral(
        "mollifier_half_integral",
        &sdelab::models::functions::mollifier,
        0.0,
        1.0,
    )?;
    pin_integral(
        "mollifier_full_integral",
        &sdelab::models::functions::mollifier,
        -1.0,
        1.0,
    )?;
    pin_integral(
        "order_zero_mean_x1_at_t2",
        &|s| if s > 1.0 { (-1.0 / (s * s - 1.0)).exp() } else { 0.0 },
        1.0,
        2.0,
    )?;

    out.push_str("# closed forms evaluated directly\n");
    let _ = writeln!(
        out,
        "weak_error_lower_bound_at_h_1_over_22 = {}",
        fmt_f64(weak_error_lower_bound_formula(1.0 / 22.0))
    );
    let _ = writeln!(out, "order0_reference_n2_t2 = {}", fmt_f64(order0_reference(2, 2.0)?));
    let href = std::f64::consts::PI / 2.0 * (-1f64).exp();
    let _ = writeln!(
        out,
        "cosine_defect_bound_t1_x0_href = {}",
        fmt_f64(cosine_defect_lower_bound(1.0, 0.0, href)?)
    );
    let _ = writeln!(
        out,
        "gaussian_quadratic_tail_factor = {}",
        fmt_f64(sdelab::analysis::tail_factor_full_line())
    );
    Ok(out)
}

/// Dump one Euler trajectory as CSV.
pub fn simulate(model_name: &str, horizon: f64, level: u32, seed: u64) -> Result<String> {
    let model = models::by_name(model_name)?;
    let grid = TimeGrid::new(horizon, level)?;
    let bundle = PathBundle::sample(seed, 0, grid, model.noise_dim(), &model.active_noise());
    let scheme = if model.taming_required() { Scheme::Tamed } else { Scheme::Plain };
    let cfg = EulerConfig { grid, scheme, blow_up_threshold: 1e10 };
    let x0 = vec![0.0; model.dim()];
    let traj = euler_run(model.as_ref(), &x0, &bundle, &cfg)?;
    let mut csv = String::from("t");
    for i in 1..=model.dim() {
        let _ = write!(csv, ",x{i}");
    }
    csv.push('\n');
    for (n, state) in traj.states.iter().enumerate() {
        let _ = write!(csv, "{}", fmt_f64(grid.time(n)));
        for v in state {
            let _ = write!(csv, ",{}", fmt_f64(*v));
        }
        csv.push('\n');
    }
    if let Some(flag) = traj.blow_up {
        let _ = writeln!(csv, "# trajectory truncated: blow-up at grid index {flag}");
    }
    Ok(csv)
}
