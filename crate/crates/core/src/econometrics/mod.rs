//! Attendance-demand estimation: unit-root tests, the pooled ADL model by
//! OLS or SUR, residual diagnostics and long-run effects.

pub mod adf;
pub mod design;
pub mod diagnostics;
pub mod fit;
pub mod long_run;
pub mod robust;
pub mod sur;

pub use adf::{adf_test, AdfResult, AdfTable, Deterministic};
pub use design::{build_adl_design, build_adl_levels_design, DesignMatrix, Form, RegressionSpec, Term, Var};
pub use diagnostics::{
    breusch_pagan_lm, durbin_watson_panel, fisher_panel_unit_root, jarque_bera, jarque_bera_by_equation,
    ramsey_reset, Df, TestResult,
};
pub use fit::{ols_fit, ols_fit_robust, CovarianceKind, FitResult, Method};
pub use long_run::{attendance_effect, long_run_effects, long_run_from_coefficients, AttendanceEffect, LongRun, LongRunEffect, LongRunTerm};
pub use robust::{white_cross_section_cov, RobustCovariance};
pub use sur::{sur_egls_fit, SurOptions};
