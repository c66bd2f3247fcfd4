//! Log-correction coefficients of the heat-kernel ansatz in plain, scaled and warped time.

mod beta;
mod expand;
mod problem;
mod ray;
mod warp;

pub use beta::{beta_bound, beta_from_bound, select_beta, BetaSelection, BETA_FLOOR};
pub use expand::{
    compute_c0, expand, Diagnostics, DiagnosticsRecord, ExpansionCoeffs, ExpansionConfig, ExpansionRecord,
    LogCorrection, Recursion,
};
pub use problem::{AdmissibilityReport, BoxDomain, DriftKey, ProblemCoefficients};
pub use ray::{pk_gamma, ray_exponent, ray_integrate, ray_integrate_jet, ray_weight};
pub use warp::{t_of_tau, tau_of_t, warp_schedule, WarpMode, WarpParams, WarpSchedule};
