use crate::{Complex, Real};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootKind {
    /// `α < 1/4`: two real exponents.
    Real,
    /// `α = 1/4`: repeated root, growth carries a logarithmic correction.
    Double,
    /// `α > 1/4`: complex pair with real part 1/2.
    Complex,
}

/// Power-law exponents `t^β` of `u'' + α/(1+t²) u = 0` at large `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentReport<T> {
    pub alpha: T,
    pub beta1: Complex<T>,
    pub beta2: Complex<T>,
    /// `½ Re sqrt(1 - 4α)`
    pub c: T,
    pub roots: RootKind,
    /// Growth rate of `ω`: `1/2 + c`.
    pub omega_rate: T,
    /// Rate of `θ` and of `v₁ - <v₁>`: `-1/2 + c`.
    pub theta_rate: T,
    pub v1_rate: T,
    /// Rate of `v₂`: `-3/2 + c`.
    pub v2_rate: T,
    /// `c = 3/2` exactly: `v₂` neither decays nor grows.
    pub v2_marginal: bool,
    pub fitted_beta: Option<T>,
    pub fit_window: Option<(T, T)>,
}

pub fn inviscid_exponents<T: Real>(alpha: T) -> ExponentReport<T> {
    let half = T::lit(0.5);
    let disc = T::one() - T::lit(4.0) * alpha;
    let root = Complex::new(disc, T::zero()).sqrt();
    let one = Complex::new(T::one(), T::zero());
    let beta1 = (one + root) * half;
    let beta2 = (one - root) * half;
    let c = half * root.re;
    let roots = if disc > T::zero() {
        RootKind::Real
    } else if disc == T::zero() {
        RootKind::Double
    } else {
        RootKind::Complex
    };
    let three_half = T::lit(1.5);
    ExponentReport {
        alpha,
        beta1,
        beta2,
        c,
        roots,
        omega_rate: half + c,
        theta_rate: c - half,
        v1_rate: c - half,
        v2_rate: c - three_half,
        v2_marginal: c == three_half,
        fitted_beta: None,
        fit_window: None,
    }
}
