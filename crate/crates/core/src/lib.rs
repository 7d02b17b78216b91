//! Principal-eigenvalue analysis of a one-dimensional habitat `[0, L]` with a
//! protection zone `[alpha, alpha + l]`.
//!
//! Inside the zone the population grows logistically; outside it follows a
//! strong Allee law. Linearizing at zero gives the Sturm–Liouville problem
//!
//! ```text
//! -phi'' + H(x) phi = lambda phi,   H = -f'(0) in the zone, -g'(0) outside,
//! a1 phi'(0) - a2 phi(0) = 0,       b1 phi'(L) + b2 phi(L) = 0,
//! ```
//!
//! whose principal eigenvalue `lambda_1(alpha, l)` decides persistence
//! (negative) or extinction of small populations (positive).
//!
//! The crate is `no_std` and only needs `alloc`. IO, file formats and the CLI
//! live in the `allee-zone` crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod baseline;
pub mod design;
pub mod eigen;
pub mod fd_oracle;
pub mod model;
pub mod ode;
pub mod pde;
pub mod roots;
pub mod sensitivity;

mod math;

pub use baseline::{lambda0, spectral_bracket, BaselineError, Bracket};
pub use design::{
    critical_lengths, design_report, optimal_alpha, sweep, sweep_cell, zero_crossing_length,
    AlphaStar, CriticalLengths, DesignReport, Recommendation, Regime, SweepTable,
};
pub use eigen::{
    characteristic_residual, eigenfunction, principal_eigenvalue, segment_transfer,
    verify_transcendental, EigenError, Equation, EquationResidual, PaperConstants,
    SpectralResult, TransferMatrix, TranscendentalReport,
};
pub use fd_oracle::{
    assemble, gershgorin, oracle_eigenvalue, oracle_eigenvalue_at, smallest_eig, sturm_count,
    OracleError, OracleEstimate, Tridiag,
};
pub use model::{
    classify_case, BoundaryKind, BoundarySpec, CaseTag, FateVerdict, GrowthFn, GrowthPair,
    ModelError, Verdict, ZoneLayout,
};
pub use pde::{
    classify_fate, extinction_sufficient, simulate, theta_f, Scheme, SimConfig, SimError,
    ThetaProfile, Trajectory, WeightFn,
};
pub use sensitivity::{
    dlambda_dalpha_closed, dlambda_dalpha_fd, SensitivityError, FD_STEP_FRACTION, SensitivityFormula,
    SensitivityTerms,
};

/// Default tolerance for principal-eigenvalue bisection.
pub const EIGEN_TOL: f64 = 1e-13;

/// Width of the band around `g'(0) + lambda_1 = 0` that is classified as H2.
pub const H2_BAND: f64 = 1e-9;
