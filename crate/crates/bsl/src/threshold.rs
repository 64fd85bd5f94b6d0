use crate::error::{HarnessError, Result};
use bsl_core::linear::{integrate_affine_mode, verify_mode_bound, AffineProblem, BoundReport};
use bsl_core::multiplier::{CutoffConfig, FrequencyMode};
use bsl_core::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Which envelope a trajectory ratio is compared with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeKind {
    /// `(1 + 1/|α|)(1 + C²) exp(|α| / (ν C²))`
    #[default]
    Display,
    /// `(1 + 1/α̂)(1 + C²)^{1+α̂} exp(π α̂ / (ν C⁴))`
    Proof,
}

impl EnvelopeKind {
    pub fn of(self, r: &BoundReport<f64>) -> f64 {
        match self {
            EnvelopeKind::Display => r.display_envelope,
            EnvelopeKind::Proof => r.envelope,
        }
    }
}

/// Unit-energy initial data of a panel mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PanelInit {
    /// `ω̃ = 1`, `θ̃ = 0`
    Vorticity,
    /// `ω̃ = 0`, `kθ̃ = 1`
    Temperature,
}

impl PanelInit {
    pub fn name(self) -> &'static str {
        match self {
            PanelInit::Vorticity => "vorticity",
            PanelInit::Temperature => "temperature",
        }
    }

    pub fn state(self, k: i64) -> (Complex<f64>, Complex<f64>) {
        match self {
            PanelInit::Vorticity => (Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)),
            PanelInit::Temperature => (Complex::new(0.0, 0.0), Complex::new(1.0 / k as f64, 0.0)),
        }
    }
}

/// Modes `(k, xi = k · s · ν^{-1/3})` integrated from `t = 0` to `horizon_scale · ν^{-1/3} + horizon_extra`,
/// once per initial datum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModePanel {
    pub ks: Vec<i64>,
    pub s_factors: Vec<f64>,
    pub inits: Vec<PanelInit>,
    pub horizon_scale: f64,
    pub horizon_extra: f64,
    pub rtol: f64,
}

impl Default for ModePanel {
    fn default() -> Self {
        Self {
            ks: vec![1, 2, 4],
            s_factors: vec![0.0, 0.5, 1.0, 2.0],
            inits: vec![PanelInit::Vorticity, PanelInit::Temperature],
            horizon_scale: 4.0,
            horizon_extra: 20.0,
            rtol: 1e-10,
        }
    }
}

impl ModePanel {
    pub fn validate(&self) -> Result<()> {
        if self.ks.is_empty() || self.s_factors.is_empty() || self.inits.is_empty() {
            return Err(HarnessError::Config("mode panel is empty".into()));
        }
        if self.ks.contains(&0) {
            return Err(HarnessError::Config("mode panel contains k = 0".into()));
        }
        if !(self.horizon_scale >= 0.0 && self.horizon_extra >= 0.0 && self.horizon_scale + self.horizon_extra > 0.0) {
            return Err(HarnessError::Config("mode panel horizon must be positive".into()));
        }
        if !(self.rtol > 0.0) {
            return Err(HarnessError::Config("mode panel rtol must be positive".into()));
        }
        Ok(())
    }

    pub fn horizon(&self, nu: f64) -> f64 {
        self.horizon_scale * nu.powf(-1.0 / 3.0) + self.horizon_extra
    }

    /// The `(k, xi, init)` triples at viscosity `nu`, ordered by `k`, then `s`, then initial datum.
    pub fn modes(&self, nu: f64) -> Vec<(i64, f64, PanelInit)> {
        let c = nu.powf(-1.0 / 3.0);
        let mut out = Vec::new();
        for &k in &self.ks {
            for s in &self.s_factors {
                for &init in &self.inits {
                    out.push((k, k as f64 * s * c, init));
                }
            }
        }
        out
    }

    /// Integrates one panel member and compares it with the envelopes.
    pub fn evaluate_one(&self, nu: f64, alpha: f64, k: i64, xi: f64, init: PanelInit) -> Result<BoundReport<f64>> {
        let cutoff = CutoffConfig::for_viscosity(nu)?;
        let opts = bsl_core::ode::IntegrationOptions::with_tolerances(self.rtol, 1e-14);
        let (w, q) = init.state(k);
        let p = AffineProblem::new(FrequencyMode::new(k, xi), alpha, nu, self.horizon(nu))?.with_init(w, q).with_options(opts);
        let tr = integrate_affine_mode(&p)?;
        Ok(verify_mode_bound(&tr, alpha, nu, cutoff)?)
    }

    /// Envelope reports of every panel mode for the slope `alpha`, in [`Self::modes`] order.
    pub fn evaluate(&self, nu: f64, alpha: f64) -> Result<Vec<BoundReport<f64>>> {
        self.modes(nu).par_iter().map(|&(k, xi, init)| self.evaluate_one(nu, alpha, k, xi, init)).collect()
    }
}

/// `sup` over the panel of the trajectory ratio against `safety ×` the chosen envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityPredicate {
    pub panel: ModePanel,
    pub envelope: EnvelopeKind,
    pub safety: f64,
}

impl StabilityPredicate {
    pub fn new(panel: ModePanel, envelope: EnvelopeKind, safety: f64) -> Self {
        Self { panel, envelope, safety }
    }

    /// Largest `ratio / (safety · envelope)` over the panel; stable iff `<= 1`.
    pub fn margin(&self, nu: f64, alpha: f64) -> Result<f64> {
        let reps = self.panel.evaluate(nu, alpha)?;
        Ok(reps.iter().map(|r| r.ratio / (self.safety * self.envelope.of(r))).fold(0.0, f64::max))
    }

    pub fn is_stable(&self, nu: f64, alpha: f64) -> Result<bool> {
        Ok(self.margin(nu, alpha)? <= 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bisection {
    /// Stable end of the final bracket, the reported threshold.
    pub alpha_star: f64,
    /// Final bracket: `unstable` evaluated unstable, `stable` evaluated stable.
    pub unstable: f64,
    pub stable: f64,
    /// The whole bracket evaluated stable.
    pub no_transition: bool,
    pub evaluations: usize,
}

/// Bisects a predicate that is stable at `hi` and unstable at `lo`, down to width `tol`.
/// If `lo` is stable too, returns `lo` with the no-transition flag; an unstable `hi` is a bracket error.
pub fn bisect<F>(mut stable: F, bracket: [f64; 2], tol: f64) -> Result<Bisection>
where
    F: FnMut(f64) -> Result<bool>,
{
    let [lo, hi] = bracket;
    if !(lo < hi) || !(tol > 0.0) {
        return Err(HarnessError::Config(format!("invalid bracket [{lo}, {hi}] or tol {tol}")));
    }
    if !stable(hi)? {
        return Err(HarnessError::Bracket(format!("upper end {hi} is not stable")));
    }
    if stable(lo)? {
        return Ok(Bisection { alpha_star: lo, unstable: lo, stable: lo, no_transition: true, evaluations: 2 });
    }
    let (mut u, mut s) = (lo, hi);
    let mut evaluations = 2;
    while s - u > tol {
        let mid = 0.5 * (u + s);
        if mid <= u || mid >= s {
            break;
        }
        evaluations += 1;
        if stable(mid)? {
            s = mid;
        } else {
            u = mid;
        }
    }
    Ok(Bisection { alpha_star: s, unstable: u, stable: s, no_transition: false, evaluations })
}

/// Threshold `α*(ν)` of the panel predicate on `bracket`.
pub fn threshold_bisect(nu: f64, pred: &StabilityPredicate, bracket: [f64; 2], tol: f64) -> Result<Bisection> {
    bisect(|a| pred.is_stable(nu, a), bracket, tol)
}

/// The certified slope `-ν^{1/3} / 100`.
pub fn certified_alpha(nu: f64) -> f64 {
    -nu.cbrt() / 100.0
}
