//! Deterministic verifiers for the analytic lemmas behind the order-zero
//! construction: the signed oscillatory integral, the one-sided error of
//! left-endpoint integration of functions with non-increasing derivative,
//! and the mollifier stair-integral surplus bracket `[h/20, 2h]`.
//!
//! Each verifier checks its hypotheses by sampling before computing, and
//! returns the quantity for the caller (test harness or `bounds-check`
//! subcommand) to assert against.

use crate::error::{Error, Result};
use crate::models::functions::{mollifier_half_integral, mollifier_stair_integral};
use crate::quad::adaptive_simpson;
use std::f64::consts::PI;

/// A scalar function together with its derivative.
pub struct DiffFn {
    pub f: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub df: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl DiffFn {
    pub fn new(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> DiffFn {
        DiffFn { f: Box::new(f), df: Box::new(df) }
    }
}

/// A scalar function with first and second derivatives.
pub struct Diff2Fn {
    pub f: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub df: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub d2f: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl Diff2Fn {
    pub fn new(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Diff2Fn {
        Diff2Fn { f: Box::new(f), df: Box::new(df), d2f: Box::new(d2f) }
    }
}

const HYPOTHESIS_GRID: usize = 129;
const SIGN_SLACK: f64 = 1e-12;

/// `int_a^b cos(phi(x)) psi(x) dx` under the hypotheses `phi(a) = pi/2
/// (mod 2pi)`, `phi' >= 0`, `phi'' >= 0`, `psi >= 0`, `psi' <= 0` — each
/// checked on a sample grid. The integral is then non-positive; the value
/// is returned for the harness to assert `<=` quadrature tolerance.
pub fn check_oscillatory_sign(phi: &Diff2Fn, psi: &DiffFn, a: f64, b: f64) -> Result<f64> {
    if !(a < b && a.is_finite() && b.is_finite()) {
        return Err(Error::domain(format!("bad interval [{a}, {b}]")));
    }
    let phase = ((phi.f)(a) - PI / 2.0).rem_euclid(2.0 * PI);
    if phase.min(2.0 * PI - phase) > 1e-9 {
        return Err(Error::Precondition(format!(
            "phi(a) must be pi/2 mod 2pi, residual {phase:e}"
        )));
    }
    for i in 0..HYPOTHESIS_GRID {
        let x = a + (b - a) * i as f64 / (HYPOTHESIS_GRID - 1) as f64;
        if (phi.df)(x) < -SIGN_SLACK {
            return Err(Error::Precondition(format!("phi' < 0 at x = {x}")));
        }
        if (phi.d2f)(x) < -SIGN_SLACK {
            return Err(Error::Precondition(format!("phi'' < 0 at x = {x}")));
        }
        if (psi.f)(x) < -SIGN_SLACK {
            return Err(Error::Precondition(format!("psi < 0 at x = {x}")));
        }
        if (psi.df)(x) > SIGN_SLACK {
            return Err(Error::Precondition(format!("psi' > 0 at x = {x}")));
        }
    }
    let r = adaptive_simpson(|x| (phi.f)(x).cos() * (psi.f)(x), a, b, 1e-10)?;
    Ok(r.value)
}

fn floor_steps(t: f64, h: f64) -> u64 {
    let mut n = (t / h).floor() as u64;
    while (n + 1) as f64 * h <= t {
        n += 1;
    }
    while n > 0 && n as f64 * h > t {
        n -= 1;
    }
    n
}

/// Left and right side of the concave-derivative quadrature estimate
///
/// ```text
/// int_0^b (psi(s) - psi(floor_h(s))) ds
///   <= (1/2) [ psi'(0) h^2
///            + (psi(floor_h(b) - h) - psi(0)) h
///            + psi'(floor_h(b)) (b - floor_h(b))^2 ]
/// ```
///
/// for continuously differentiable `psi` with non-increasing derivative on
/// `[0, b]` and `h in (0, b]`. The derivative monotonicity is checked by
/// sampling. Returns `(lhs, rhs)`.
pub fn check_stair_quadrature_estimate(psi: &DiffFn, b: f64, h: f64) -> Result<(f64, f64)> {
    if !(b > 0.0 && h > 0.0 && h <= b) {
        return Err(Error::domain(format!("need 0 < h <= b, got h = {h}, b = {b}")));
    }
    let mut prev = f64::INFINITY;
    for i in 0..HYPOTHESIS_GRID {
        let x = b * i as f64 / (HYPOTHESIS_GRID - 1) as f64;
        let d = (psi.df)(x);
        if d > prev + 1e-10 {
            return Err(Error::Precondition(format!(
                "psi' increases near x = {x} ({prev} -> {d})"
            )));
        }
        prev = d;
    }
    let nb = floor_steps(b, h);
    let floor_b = nb as f64 * h;
    // integral of the staircase psi(floor_h(s)): full cells + partial cell
    let mut stair = 0.0;
    for k in 0..nb {
        stair += (psi.f)(k as f64 * h) * h;
    }
    stair += (psi.f)(floor_b) * (b - floor_b);
    let smooth = adaptive_simpson(|s| (psi.f)(s), 0.0, b, 1e-11)?.value;
    let lhs = smooth - stair;
    let rhs = 0.5
        * ((psi.df)(0.0) * h * h
            + ((psi.f)(floor_b - h) - (psi.f)(0.0)) * h
            + (psi.df)(floor_b) * (b - floor_b) * (b - floor_b));
    Ok((lhs, rhs))
}

/// Stair-integral surplus of the mollifier relative to a caller-supplied
/// reference constant (fault-injection hook; experiments use
/// [`mollifier_stair_surplus`]).
pub fn mollifier_stair_surplus_vs(h: f64, reference: f64) -> Result<f64> {
    if !(h > 0.0 && h <= 0.125) {
        return Err(Error::domain(format!(
            "mollifier surplus bracket holds for h in (0, 1/8], got {h}"
        )));
    }
    Ok(mollifier_stair_integral(h) - reference)
}

/// The left-endpoint quadrature surplus
/// `int_0^inf 1_[0,1)(floor_h(s)) exp(-1/(1-floor_h(s)^2)) ds - int_0^1 exp(-1/(1-s^2)) ds`,
/// an exact finite sum minus the pinned constant. The harness asserts it
/// lies in `[h/20, 2h]` for `h in (0, 1/8]`.
pub fn mollifier_stair_surplus(h: f64) -> Result<f64> {
    mollifier_stair_surplus_vs(h, mollifier_half_integral())
}

/// Outcome of a randomized admissible-instance suite.
#[derive(Debug, Clone, Copy)]
pub struct SuiteOutcome {
    pub cases: usize,
    pub violations: usize,
    /// Worst signed violation margin seen (negative = comfortably inside).
    pub worst: f64,
}

/// Quadrature tolerance granted to the property suites.
pub const SUITE_TOL: f64 = 1e-9;

/// Randomized admissible instances of the oscillatory-integral sign lemma:
/// `phi = pi/2 + c1 (x-a) + c2 (x-a)^2` with `c1, c2 >= 0` and
/// `psi = max(d0 - d1 (x-a), 0)`. Each integral must be `<=` the
/// quadrature tolerance.
pub fn oscillatory_sign_suite(cases: usize, master_seed: u64) -> Result<SuiteOutcome> {
    let mut rng = crate::rng::StreamRng::from_spec(crate::rng::SeedSpec::new(master_seed, 0));
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..cases {
        let a = 2.0 * rng.uniform_open() - 1.0;
        let width = 0.1 + 3.0 * rng.uniform_open();
        let c1 = 3.0 * rng.uniform_open();
        let c2 = 3.0 * rng.uniform_open();
        let d0 = 0.2 + rng.uniform_open();
        let d1 = 2.0 * rng.uniform_open();
        let phi = Diff2Fn::new(
            move |x| PI / 2.0 + c1 * (x - a) + c2 * (x - a) * (x - a),
            move |x| c1 + 2.0 * c2 * (x - a),
            move |_| 2.0 * c2,
        );
        let psi = DiffFn::new(
            move |x| (d0 - d1 * (x - a)).max(0.0),
            move |x| if d0 - d1 * (x - a) > 0.0 { -d1 } else { 0.0 },
        );
        // integrate only up to the clipping kink; psi vanishes beyond it
        let kink = a + d0 / d1;
        let b = (a + width).min(kink);
        let value = check_oscillatory_sign(&phi, &psi, a, b)?;
        worst = worst.max(value);
        if value > SUITE_TOL {
            violations += 1;
        }
    }
    Ok(SuiteOutcome { cases, violations, worst })
}

/// Randomized admissible instances of the concave-derivative quadrature
/// estimate: `psi = alpha sqrt(s + eps) + beta s - gamma s^2` with
/// `alpha, gamma >= 0`, checked as `lhs <= rhs + tol`.
pub fn stair_estimate_suite(cases: usize, master_seed: u64) -> Result<SuiteOutcome> {
    let mut rng = crate::rng::StreamRng::from_spec(crate::rng::SeedSpec::new(master_seed, 1));
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..cases {
        let alpha = 2.0 * rng.uniform_open();
        let beta = 4.0 * rng.uniform_open() - 2.0;
        let gamma = 2.0 * rng.uniform_open();
        let eps = 0.01 + 0.2 * rng.uniform_open();
        let b = 0.2 + 2.0 * rng.uniform_open();
        let h = b * (0.05 + 0.9 * rng.uniform_open());
        let psi = DiffFn::new(
            move |s| alpha * (s + eps).sqrt() + beta * s - gamma * s * s,
            move |s| alpha * 0.5 / (s + eps).sqrt() + beta - 2.0 * gamma * s,
        );
        let (lhs, rhs) = check_stair_quadrature_estimate(&psi, b, h)?;
        worst = worst.max(lhs - rhs);
        if lhs > rhs + SUITE_TOL {
            violations += 1;
        }
    }
    Ok(SuiteOutcome { cases, violations, worst })
}
