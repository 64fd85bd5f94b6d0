//! Pseudospectral solver for the perturbation equations in the moving frame
//!
//! ```text
//! ∂t ω + v · ∇_t ω = ν (∂y - t ∂x)² ω + ∂x θ
//! ∂t θ + v · ∇_t θ = ν (∂y - t ∂x)² θ + T'(y) v₂
//! ```
//!
//! on `T_{2π} × T_{L_y}`, with `v = ∇_t^⊥ Δ_t^{-1} ω` and the bootstrap quantities
//! tracked alongside.

mod ledger;
mod operators;
mod run;
mod snapshot;
mod stepper;

pub use ledger::{bootstrap_norms, BootstrapLedger, LedgerSnapshot, LEDGER_COLUMNS};
pub use operators::{biot_savart, nonlinear_transport, shear_split};
pub use run::{initial_state, simulate, simulate_from, SimReport, SimRow, Verdict};
pub use snapshot::{read_snapshot, write_snapshot, SnapshotHeader};
pub use stepper::{cfl_limit, rhs, time_step, Stepper};

use crate::error::{Error, Result};
use crate::profile::TemperatureProfile;
use crate::spectral::{SpectralField, SpectralGrid};
use crate::Real;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    #[serde(rename = "K")]
    pub k_max: usize,
    #[serde(rename = "J")]
    pub j_max: usize,
    #[serde(rename = "Ly", default = "default_ly")]
    pub ly: f64,
}

fn default_ly() -> f64 {
    16.0 * std::f64::consts::PI
}

impl GridConfig {
    /// Grid whose dealiasing transform is `n × n` points.
    pub fn from_transform(n: usize) -> Self {
        Self { k_max: (n - 1) / 3, j_max: (n - 1) / 3, ly: default_ly() }
    }

    pub fn build<T: Real>(&self) -> Result<SpectralGrid<T>> {
        SpectralGrid::new(self.k_max, self.j_max, T::lit(self.ly))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DtPolicy {
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default = "default_dt_max")]
    pub max: f64,
}

fn default_cfl() -> f64 {
    0.5
}

fn default_dt_max() -> f64 {
    0.05
}

impl Default for DtPolicy {
    fn default() -> Self {
        Self { cfl: default_cfl(), max: default_dt_max() }
    }
}

/// Initial data, scaled by `epsilon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialData {
    /// Random real fields supported in `|k| <= k_band`, `|xi| <= xi_band`, mean free,
    /// with `‖ω₀‖_{H^N} = ε/2` and `ν^{-1/2} ‖∂x θ₀‖_{H^N} = ε/2`. `θ₀` has no `k = 0` part.
    Random {
        #[serde(default = "default_k_band")]
        k_band: usize,
        #[serde(default = "default_xi_band")]
        xi_band: f64,
    },
    /// One Fourier pair `(k, j)`, `(-k, -j)` with `ω̂ = ε·omega`, `θ̂ = ε·theta`.
    Mode { k: i64, j: i64, omega: [f64; 2], theta: [f64; 2] },
}

fn default_k_band() -> usize {
    2
}

fn default_xi_band() -> f64 {
    1.0
}

impl Default for InitialData {
    fn default() -> Self {
        Self::Random { k_band: default_k_band(), xi_band: default_xi_band() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub nu: f64,
    pub epsilon: f64,
    pub profile: TemperatureProfile,
    pub grid: GridConfig,
    pub t_end: f64,
    #[serde(rename = "N", default = "default_n")]
    pub n: u32,
    #[serde(default)]
    pub dt: DtPolicy,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub init: InitialData,
    /// Shear rate of the background flow; `0` switches the shear off.
    #[serde(default = "default_shear")]
    pub shear: f64,
    #[serde(default = "yes")]
    pub theta_diffusion: bool,
    #[serde(default = "yes")]
    pub nonlinear: bool,
    #[serde(default = "default_output_every")]
    pub output_every: f64,
    #[serde(default = "default_blowup")]
    pub blowup_factor: f64,
}

fn default_n() -> u32 {
    5
}

fn default_shear() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

fn default_output_every() -> f64 {
    0.5
}

fn default_blowup() -> f64 {
    1e6
}

impl SimConfig {
    pub fn new(nu: f64, epsilon: f64, profile: TemperatureProfile, grid: GridConfig, t_end: f64) -> Self {
        Self {
            nu,
            epsilon,
            profile,
            grid,
            t_end,
            n: default_n(),
            dt: DtPolicy::default(),
            seed: 0,
            init: InitialData::default(),
            shear: default_shear(),
            theta_diffusion: true,
            nonlinear: true,
            output_every: default_output_every(),
            blowup_factor: default_blowup(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite_nonneg = |name: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be finite and >= 0, got {v}")))
            }
        };
        finite_nonneg("nu", self.nu)?;
        finite_nonneg("epsilon", self.epsilon)?;
        finite_nonneg("shear", self.shear)?;
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config(format!("t_end must be positive, got {}", self.t_end)));
        }
        if !(self.dt.cfl > 0.0 && self.dt.max > 0.0) {
            return Err(Error::Config("dt.cfl and dt.max must be positive".into()));
        }
        if !(self.output_every > 0.0) {
            return Err(Error::Config("output_every must be positive".into()));
        }
        if !(self.blowup_factor > 1.0) {
            return Err(Error::Config("blowup_factor must exceed 1".into()));
        }
        if self.grid.k_max == 0 {
            return Err(Error::Config("grid.K must be at least 1".into()));
        }
        self.profile.validate()
    }

    /// `0 < ε < ν²`
    pub fn small_data_regime(&self) -> bool {
        self.epsilon > 0.0 && self.epsilon < self.nu * self.nu
    }

    /// Reasons the configuration lies outside the setting of the stability theory.
    pub fn outside_hypotheses(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.nu == 0.0 {
            out.push("no dissipation".to_string());
        }
        if !self.theta_diffusion {
            out.push("vertical dissipation in the vorticity only".to_string());
        }
        if self.shear != 1.0 {
            out.push(format!("shear rate {} instead of 1", self.shear));
        }
        if self.n < 5 {
            out.push(format!("Sobolev order N = {} below 5", self.n));
        }
        out
    }

    pub fn mu(&self) -> f64 {
        if self.theta_diffusion {
            self.nu
        } else {
            0.0
        }
    }
}

/// Perturbation `(ω, θ)` at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState<T> {
    pub omega: SpectralField<T>,
    pub theta: SpectralField<T>,
    pub t: T,
}

impl<T: Real> SimState<T> {
    pub fn zeros(grid: SpectralGrid<T>, t: T) -> Self {
        Self { omega: SpectralField::zeros(grid), theta: SpectralField::zeros(grid), t }
    }

    pub fn new(omega: SpectralField<T>, theta: SpectralField<T>, t: T) -> Result<Self> {
        omega.require_same_grid(&theta)?;
        Ok(Self { omega, theta, t })
    }

    pub fn grid(&self) -> &SpectralGrid<T> {
        self.omega.grid()
    }

    pub fn is_finite(&self) -> bool {
        self.omega.is_finite() && self.theta.is_finite()
    }

    /// `sqrt(‖ω‖² + ‖θ‖²)`
    pub fn l2_norm(&self) -> T {
        (self.omega.l2_norm_sqr() + self.theta.l2_norm_sqr()).sqrt()
    }
}
