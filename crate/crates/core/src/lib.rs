//! Numerical core for the focusing nonlinear Schrödinger equation on the
//! plane with exponential nonlinearity `f_mu(u) = (e^{4 pi |u|^2} - 1 - 4 pi mu |u|^2) u`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod evolution;
pub mod functionals;
pub mod grid;
pub mod ground_state;
pub mod kernels;
mod ode;
pub mod snapshot;
pub mod variational;
pub mod virial;

pub use error::{NlsError, Result};
pub use evolution::{
    chi_invariant_probe, evolve, evolve_with, linear_propagate, scattering_diagnostic, strang_step,
    virial_monitor, EvolveConfig, RunVerdict, TrajectoryRecord,
};
pub use functionals::{functionals, FunctionalReport, LpNorms};
pub use grid::{make_grid, Field, Grid2D};
pub use ground_state::{
    certify, embed, find_ground_state, shoot, GroundStateCertificate, RadialProfile, Verdict,
};
pub use kernels::Mu;
pub use snapshot::{load_snapshot, save_snapshot};
pub use variational::{
    blowup_gap, classify, coercivity_bound, find_i_root, kappa_probe, rescale, scaling_curve,
    small_data_check, ScalingCurve, SetA, SetK, SetVerdict,
};
pub use virial::{make_virial_weight, VirialWeight};
