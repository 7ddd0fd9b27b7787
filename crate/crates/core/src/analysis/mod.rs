//! Error-curve estimation, analytic bound evaluators, lemma verifiers and
//! regularity probes.

pub mod bounds;
pub mod curve;
pub mod lemmas;
pub mod probes;

pub use bounds::{
    cosine_defect_lower_bound, cosine_defect_h_max, integrated_cosine_defect_lower_bound, order0_reference,
    tail_factor_full_line, weak_error_lower_bound_formula, weak_error_lower_bound,
};
pub use curve::{weak_strong_errors, ErrorCurve, ErrorCurveRow};
pub use lemmas::{
    check_oscillatory_sign, check_stair_quadrature_estimate, mollifier_stair_surplus, oscillatory_sign_suite,
    stair_estimate_suite, mollifier_stair_surplus_vs, Diff2Fn, DiffFn, SuiteOutcome, SUITE_TOL,
};
pub use probes::{holder_probe, lipschitz_blowup_probe, HolderProbe, HolderRow, LipschitzRow};
