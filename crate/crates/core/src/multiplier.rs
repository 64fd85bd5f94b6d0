//! Time-dependent Fourier weights and per-mode energies.
//!
//! For a horizontal wavenumber `k != 0` and vertical frequency `xi`, write
//! `s = xi / k` for the critical time at which the sheared frequency
//! `xi - k t` vanishes. The weights are
//!
//! ```text
//! A(t) = exp(-2 ∫_0^t dτ / (1 + (s - τ)^2))
//! B(t) = exp(-2 ∫_0^t 1{|s - τ| <= C} dτ / sqrt(1 + (s - τ)^2))
//! M    = A B
//! H(t) = sqrt(k^2 + min((xi - k t)^2, ν^{-2/3}))
//! ```
//!
//! `A` and `B` are evaluated in closed form (arctan and asinh differences).

use crate::error::{Error, Result};
use crate::spectral::SpectralField;
use crate::{Complex, Real};
use serde::{Deserialize, Serialize};

/// One Fourier mode `(k, xi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyMode<T> {
    pub k: i64,
    pub xi: T,
}

impl<T: Real> FrequencyMode<T> {
    pub fn new(k: i64, xi: T) -> Self {
        Self { k, xi }
    }

    pub fn k_real(&self) -> T {
        T::lit(self.k as f64)
    }

    /// `xi / k`, the time at which the mode is resonant.
    pub fn critical_time(&self) -> Result<T> {
        self.require_nonzero_k()?;
        Ok(self.xi / self.k_real())
    }

    /// Sheared vertical frequency `xi - k t`.
    pub fn sheared_xi(&self, t: T) -> T {
        self.xi - self.k_real() * t
    }

    pub(crate) fn require_nonzero_k(&self) -> Result<()> {
        if self.k == 0 {
            Err(Error::Domain("multiplier requires k != 0".into()))
        } else {
            Ok(())
        }
    }
}

/// Complex amplitudes `(ω̃, θ̃)` of one mode in the moving frame at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeState<T> {
    pub omega: Complex<T>,
    pub theta: Complex<T>,
    pub t: T,
}

impl<T: Real> ModeState<T> {
    pub fn new(omega: Complex<T>, theta: Complex<T>, t: T) -> Self {
        Self { omega, theta, t }
    }

    pub fn zero(t: T) -> Self {
        Self::new(Complex::new(T::zero(), T::zero()), Complex::new(T::zero(), T::zero()), t)
    }

    pub fn is_finite(&self) -> bool {
        self.omega.re.is_finite()
            && self.omega.im.is_finite()
            && self.theta.re.is_finite()
            && self.theta.im.is_finite()
            && self.t.is_finite()
    }

    /// `|ω̃|² + k²|θ̃|²`, the quantity controlled by the per-mode envelope.
    pub fn plain_energy(&self, k: i64) -> T {
        let kk = T::lit((k * k) as f64);
        self.omega.norm_sqr() + kk * self.theta.norm_sqr()
    }
}

/// Anisotropic dissipation coefficients: `ν_x ∂x² + ν_y ∂y²` on the vorticity and
/// `μ_x ∂x² + μ_y ∂y²` on the temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DissipationConfig<T> {
    pub nu_x: T,
    pub nu_y: T,
    pub mu_x: T,
    pub mu_y: T,
}

impl<T: Real> DissipationConfig<T> {
    pub fn new(nu_x: T, nu_y: T, mu_x: T, mu_y: T) -> Result<Self> {
        for (name, v) in [("nu_x", nu_x), ("nu_y", nu_y), ("mu_x", mu_x), ("mu_y", mu_y)] {
            if !(v >= T::zero()) || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        Ok(Self { nu_x, nu_y, mu_x, mu_y })
    }

    /// Isotropic viscosity `ν Δ` on the vorticity, no thermal diffusion.
    pub fn full(nu: T) -> Result<Self> {
        Self::new(nu, nu, T::zero(), T::zero())
    }

    /// Vertical viscosity `ν ∂y²` only.
    pub fn vertical(nu: T) -> Result<Self> {
        Self::new(T::zero(), nu, T::zero(), T::zero())
    }

    /// Vertical dissipation in both vorticity and temperature.
    pub fn full_vertical(nu: T) -> Result<Self> {
        Self::new(T::zero(), nu, T::zero(), nu)
    }

    pub fn none() -> Self {
        Self { nu_x: T::zero(), nu_y: T::zero(), mu_x: T::zero(), mu_y: T::zero() }
    }

    pub fn nu(&self) -> T {
        self.nu_y
    }

    pub fn mu(&self) -> T {
        self.mu_y
    }

    /// Whether at least one of `ν`, `μ` vanishes.
    pub fn one_vanishes(&self) -> bool {
        self.nu() == T::zero() || self.mu() == T::zero()
    }

    /// `∫_a^b (ν_x k² + ν_y (xi - k τ)²) dτ` for the vorticity.
    pub fn omega_decay(&self, k: i64, xi: T, a: T, b: T) -> T {
        sheared_quadratic_integral(self.nu_x, self.nu_y, k, xi, a, b)
    }

    /// Same as [`Self::omega_decay`] with the thermal coefficients.
    pub fn theta_decay(&self, k: i64, xi: T, a: T, b: T) -> T {
        sheared_quadratic_integral(self.mu_x, self.mu_y, k, xi, a, b)
    }
}

/// `∫_a^b (cx k² + cy (xi - kτ)²) dτ`, written without cancellation via
/// `x³ - y³ = (x - y)(x² + xy + y²)`.
pub(crate) fn sheared_quadratic_integral<T: Real>(cx: T, cy: T, k: i64, xi: T, a: T, b: T) -> T {
    let kr = T::lit(k as f64);
    let x = xi - kr * a;
    let y = xi - kr * b;
    let three = T::lit(3.0);
    (b - a) * (cx * kr * kr + cy * (x * x + x * y + y * y) / three)
}

/// Cutoff `C > 1` defining the resonant window `|xi/k - t| <= C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffConfig<T> {
    pub c: T,
}

impl<T: Real> CutoffConfig<T> {
    pub fn new(c: T) -> Result<Self> {
        if !(c > T::one()) {
            return Err(Error::Config(format!("cutoff C must exceed 1, got {c}")));
        }
        Ok(Self { c })
    }

    /// The default `C = ν^{-1/3}`; requires `0 < ν < 1`.
    pub fn for_viscosity(nu: T) -> Result<Self> {
        if !(nu > T::zero()) {
            return Err(Error::Config(format!("viscosity must be positive, got {nu}")));
        }
        Self::new(nu.powf(-T::one() / T::lit(3.0)))
    }
}

/// Closed time interval `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeInterval<T> {
    pub start: T,
    pub end: T,
}

impl<T: Real> TimeInterval<T> {
    pub fn new(start: T, end: T) -> Self {
        Self { start, end }
    }

    pub fn contains(&self, t: T) -> bool {
        t >= self.start && t <= self.end
    }

    pub fn len(&self) -> T {
        self.end - self.start
    }
}

/// Which definition of `H` to use. Both appear in the literature this crate
/// follows; [`HConvention::SquareRoot`] is the default everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HConvention {
    /// `sqrt(k² + min((xi - kt)², ν^{-2/3}))`
    #[default]
    SquareRoot,
    /// `k² + min((xi - kt)², ν^{-2/3})`
    Squared,
}

/// `A`, `B`, `M = AB` and `H` evaluated at one `(t, k, xi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiplierWeights<T> {
    pub a: T,
    pub b: T,
    pub m: T,
    pub h: T,
}

// ---------------------------------------------------------------------------
// closed forms in terms of s = xi / k

/// `∫_0^t dτ / (1 + (s - τ)²) = arctan(s) - arctan(s - t)`.
pub(crate) fn a_integral<T: Real>(t: T, s: T) -> T {
    s.atan() - (s - t).atan()
}

/// `∫_{[0,t] ∩ [s-C, s+C]} dτ / sqrt(1 + (s - τ)²)`.
pub(crate) fn b_integral<T: Real>(t: T, s: T, c: T) -> T {
    let lo = T::zero().max(s - c);
    let hi = t.min(s + c);
    if hi <= lo {
        return T::zero();
    }
    (s - lo).asinh() - (s - hi).asinh()
}

pub(crate) fn a_from_ratio<T: Real>(t: T, s: T) -> T {
    (-T::lit(2.0) * a_integral(t, s)).exp()
}

pub(crate) fn b_from_ratio<T: Real>(t: T, s: T, c: T) -> T {
    (-T::lit(2.0) * b_integral(t, s, c)).exp()
}

/// `H` with an explicit cap on `(xi - kt)²`; `cap2 = +inf` disables the cap.
pub(crate) fn h_capped<T: Real>(k: i64, eta: T, cap2: T, conv: HConvention) -> T {
    let kk = T::lit((k * k) as f64);
    let sym = kk + (eta * eta).min(cap2);
    match conv {
        HConvention::SquareRoot => sym.sqrt(),
        HConvention::Squared => sym,
    }
}

fn require_time<T: Real>(t: T) -> Result<()> {
    if !(t >= T::zero()) {
        return Err(Error::Domain(format!("time must be >= 0, got {t}")));
    }
    Ok(())
}

/// `A(t, k, xi) = exp(-2[arctan(xi/k) - arctan(xi/k - t)])`.
///
/// Non-increasing in `t`, with values in `(e^{-2π}, 1]`.
pub fn multiplier_a<T: Real>(t: T, mode: FrequencyMode<T>) -> Result<T> {
    require_time(t)?;
    let s = mode.critical_time()?;
    Ok(a_from_ratio(t, s))
}

/// `B(t, k, xi)`: the resonant-window weight, constant in `t` outside the window.
pub fn multiplier_b<T: Real>(t: T, mode: FrequencyMode<T>, cutoff: CutoffConfig<T>) -> Result<T> {
    require_time(t)?;
    let s = mode.critical_time()?;
    let cutoff = CutoffConfig::new(cutoff.c)?;
    Ok(b_from_ratio(t, s, cutoff.c))
}

/// `H(t, k, xi) = sqrt(k² + min((xi - kt)², ν^{-2/3}))`.
pub fn multiplier_h<T: Real>(t: T, mode: FrequencyMode<T>, nu: T) -> Result<T> {
    multiplier_h_with(t, mode, nu, HConvention::SquareRoot)
}

pub fn multiplier_h_with<T: Real>(t: T, mode: FrequencyMode<T>, nu: T, conv: HConvention) -> Result<T> {
    if !(nu > T::zero()) {
        return Err(Error::Config(format!("H requires nu > 0, got {nu}")));
    }
    let cap2 = nu.powf(-T::lit(2.0) / T::lit(3.0));
    Ok(h_capped(mode.k, mode.sheared_xi(t), cap2, conv))
}

/// All four weights at once, with `H` using the same `ν`.
pub fn weights<T: Real>(
    t: T,
    mode: FrequencyMode<T>,
    nu: T,
    cutoff: CutoffConfig<T>,
) -> Result<MultiplierWeights<T>> {
    let a = multiplier_a(t, mode)?;
    let b = multiplier_b(t, mode, cutoff)?;
    let h = multiplier_h(t, mode, nu)?;
    Ok(MultiplierWeights { a, b, m: a * b, h })
}

/// Lower bound on `M` valid for all `t >= 0`: `A > e^{-2π}` and the full window
/// contributes at most `2 asinh(C)` to the `B` integral.
pub fn m_lower_bound<T: Real>(cutoff: CutoffConfig<T>) -> T {
    let two = T::lit(2.0);
    (-two * T::PI()).exp() * (-two * two * cutoff.c.asinh()).exp()
}

/// `I = {t >= 0 : |xi/k - t| <= C}`, or `None` if the window lies entirely at negative times.
pub fn resonant_window<T: Real>(
    mode: FrequencyMode<T>,
    cutoff: CutoffConfig<T>,
) -> Result<Option<TimeInterval<T>>> {
    let s = mode.critical_time()?;
    let end = s + cutoff.c;
    if end < T::zero() {
        return Ok(None);
    }
    Ok(Some(TimeInterval::new(T::zero().max(s - cutoff.c), end)))
}

/// Coefficient multiplying `|ω̃|²` in [`mode_energy`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaScale<T> {
    /// `|α|`
    Raw,
    /// `α̂ = max(|α|, ν^{1/3})`
    Floored { nu: T },
}

impl<T: Real> AlphaScale<T> {
    pub fn apply(&self, alpha: T) -> T {
        match *self {
            AlphaScale::Raw => alpha.abs(),
            AlphaScale::Floored { nu } => alpha_hat(alpha, nu),
        }
    }
}

/// `α̂ = max(|α|, ν^{1/3})`.
pub fn alpha_hat<T: Real>(alpha: T, nu: T) -> T {
    alpha.abs().max(nu.cbrt())
}

/// `E = |α| |ω̃|² + (k² + min((xi - kt)², C²)) |θ̃|²`.
pub fn mode_energy<T: Real>(
    state: &ModeState<T>,
    mode: FrequencyMode<T>,
    alpha: T,
    cutoff: CutoffConfig<T>,
) -> T {
    mode_energy_scaled(state, mode, alpha, cutoff, AlphaScale::Raw)
}

pub fn mode_energy_scaled<T: Real>(
    state: &ModeState<T>,
    mode: FrequencyMode<T>,
    alpha: T,
    cutoff: CutoffConfig<T>,
    scale: AlphaScale<T>,
) -> T {
    let eta = mode.sheared_xi(state.t);
    let kk = T::lit((mode.k * mode.k) as f64);
    let theta_weight = kk + (eta * eta).min(cutoff.c * cutoff.c);
    scale.apply(alpha) * state.omega.norm_sqr() + theta_weight * state.theta.norm_sqr()
}

/// Multiplier applied inside [`weighted_sobolev_norm`].
///
/// `A`, `B` and `M` are defined only for `k != 0`; on the `k = 0` column they
/// are taken to be 1. `H` on that column reduces to `min(|xi|, ν^{-1/3})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightSelector<T> {
    One,
    A,
    B { cutoff: CutoffConfig<T> },
    M { cutoff: CutoffConfig<T> },
    H { nu: T },
    /// `H · M`
    HM { nu: T, cutoff: CutoffConfig<T> },
}

impl<T: Real> WeightSelector<T> {
    pub fn eval(&self, t: T, k: i64, xi: T) -> T {
        let one = T::one();
        let s = if k != 0 { xi / T::lit(k as f64) } else { T::zero() };
        let m = |c: T| if k == 0 { one } else { a_from_ratio(t, s) * b_from_ratio(t, s, c) };
        let h = |nu: T| {
            let cap2 = nu.powf(-T::lit(2.0) / T::lit(3.0));
            h_capped(k, xi - T::lit(k as f64) * t, cap2, HConvention::SquareRoot)
        };
        match *self {
            WeightSelector::One => one,
            WeightSelector::A => {
                if k == 0 {
                    one
                } else {
                    a_from_ratio(t, s)
                }
            }
            WeightSelector::B { cutoff } => {
                if k == 0 {
                    one
                } else {
                    b_from_ratio(t, s, cutoff.c)
                }
            }
            WeightSelector::M { cutoff } => m(cutoff.c),
            WeightSelector::H { nu } => h(nu),
            WeightSelector::HM { nu, cutoff } => h(nu) * m(cutoff.c),
        }
    }
}

/// Sobolev weight `(1 + k² + xi²)^N`.
pub fn sobolev_weight<T: Real>(n: u32, k: i64, xi: T) -> T {
    (T::one() + T::lit((k * k) as f64) + xi * xi).powi(n as i32)
}

/// `sqrt(Σ (1 + k² + xi²)^N |w(t, k, xi) f̂(k, xi)|²)` over the truncated grid.
pub fn weighted_sobolev_norm<T: Real>(
    field: &SpectralField<T>,
    n: u32,
    t: T,
    weight: &WeightSelector<T>,
) -> T {
    weighted_sobolev_norm_with(field, n, |k, xi| weight.eval(t, k, xi))
}

pub fn weighted_sobolev_norm_with<T: Real, F>(field: &SpectralField<T>, n: u32, weight: F) -> T
where
    F: Fn(i64, T) -> T,
{
    let mut acc = T::zero();
    for (k, j, c) in field.iter_modes() {
        let xi = field.grid().xi(j);
        let w = weight(k, xi);
        acc = acc + sobolev_weight(n, k, xi) * w * w * c.norm_sqr();
    }
    acc.sqrt()
}
