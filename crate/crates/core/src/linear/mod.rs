//! Frequency-local linear analysis.

mod affine;
mod coupled;
mod exponents;
mod no_shear;
mod orr;
mod trajectory;

pub use affine::{
    display_envelope, integrate_affine_mode, integrate_schrodinger, integrate_schrodinger_at, proof_envelope,
    uniform_envelope, verify_mode_bound, AffineProblem, BoundReport, Sampling,
};
pub use coupled::{
    ghost_energy, integrate_coupled_linear, CoupledColumn, CoupledGrid, CoupledSample, CoupledTrajectory,
    GhostEnergyConfig,
};
pub use exponents::{inviscid_exponents, ExponentReport, RootKind};
pub use no_shear::{classify_no_shear, no_shear_eigenvalues, NoShearClass, NoShearSystem};
pub use orr::{orr_ratio, velocity_x_symbol};
pub use trajectory::{fit_growth_exponent, ModeTrajectory};
