//! Numerical laboratory for the 2D Boussinesq equations linearized (and
//! weakly nonlinear) around Couette flow `v = (y, 0)` with a temperature
//! profile `T(y)`, in coordinates moving with the shear.
//!
//! The crate is organised bottom-up:
//!
//! * [`multiplier`]: the time-dependent Fourier weights `A`, `B`, `M = AB`
//!   and `H`, resonant windows, per-mode energies and weighted Sobolev norms.
//! * [`ode`]: an adaptive Dormand–Prince 5(4) integrator with an exact
//!   diagonal integrating factor, used by every frequency-local solver.
//! * [`linear`]: the no-shear eigenvalue dichotomy, inviscid growth
//!   exponents, per-mode viscous integration and envelope checks, the coupled
//!   evolution for non-affine profiles and the Orr ratio.
//! * [`profile`]: spectra of temperature profiles and the smallness
//!   conditions that make a profile admissible.
//! * [`sim`]: the sheared pseudospectral solver with bootstrap-norm ledger.
//!
//! All numerics are generic over a [`Real`] scalar (`f32` or `f64`); the
//! `*F64` aliases at the crate root fix the scalar for the common case.

pub mod error;
pub mod linear;
pub mod multiplier;
pub mod ode;
pub mod profile;
pub mod sim;
pub mod spectral;

pub use error::{Error, Result};

use num_traits::{Float, FloatConst, FromPrimitive};
use std::fmt::{Debug, Display};

/// Floating point scalar used throughout the crate.
pub trait Real:
    Float + FloatConst + FromPrimitive + rustfft::FftNum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal. Every `Real` can represent (a rounding of) any `f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub use num_complex::Complex;

pub type Complex64 = Complex<f64>;

pub type FrequencyModeF64 = multiplier::FrequencyMode<f64>;
pub type ModeStateF64 = multiplier::ModeState<f64>;
pub type DissipationConfigF64 = multiplier::DissipationConfig<f64>;
pub type CutoffConfigF64 = multiplier::CutoffConfig<f64>;
pub type MultiplierWeightsF64 = multiplier::MultiplierWeights<f64>;
pub type NoShearSystemF64 = linear::NoShearSystem<f64>;
pub type ModeTrajectoryF64 = linear::ModeTrajectory<f64>;
pub type ExponentReportF64 = linear::ExponentReport<f64>;
pub type ProfileSpectrumF64 = profile::ProfileSpectrum<f64>;
pub type SpectralGridF64 = spectral::SpectralGrid<f64>;
pub type SpectralFieldF64 = spectral::SpectralField<f64>;
pub type SimStateF64 = sim::SimState<f64>;
pub type BootstrapLedgerF64 = sim::BootstrapLedger<f64>;

pub type FrequencyModeF32 = multiplier::FrequencyMode<f32>;
pub type ModeStateF32 = multiplier::ModeState<f32>;
pub type MultiplierWeightsF32 = multiplier::MultiplierWeights<f32>;
pub type SpectralFieldF32 = spectral::SpectralField<f32>;
