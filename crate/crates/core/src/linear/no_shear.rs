use crate::error::{Error, Result};
use crate::multiplier::{DissipationConfig, FrequencyMode};
use crate::{Complex, Real};
use serde::{Deserialize, Serialize};

/// Linearization around `T(y) = αy` without background shear, for one mode:
///
/// ```text
/// d/dt ω̂ = -ν q ω̂ + i k θ̂
/// d/dt θ̂ = -μ q θ̂ + i k α ω̂ / q,      q = k² + xi²
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoShearSystem<T> {
    pub mode: FrequencyMode<T>,
    pub alpha: T,
    pub diss: DissipationConfig<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoShearClass {
    Stable,
    ExponentiallyUnstable,
    Marginal,
}

impl<T: Real> NoShearSystem<T> {
    pub fn new(mode: FrequencyMode<T>, alpha: T, nu: T, mu: T) -> Result<Self> {
        let diss = DissipationConfig::new(nu, nu, mu, mu)?;
        Ok(Self { mode, alpha, diss })
    }

    pub fn q(&self) -> T {
        let k = self.mode.k_real();
        k * k + self.mode.xi * self.mode.xi
    }

    /// Row-major `[[a, b], [c, d]]`.
    pub fn matrix(&self) -> [[Complex<T>; 2]; 2] {
        let q = self.q();
        let k = self.mode.k_real();
        let z = T::zero();
        [
            [Complex::new(-self.diss.nu() * q, z), Complex::new(z, k)],
            [Complex::new(z, k * self.alpha / q), Complex::new(-self.diss.mu() * q, z)],
        ]
    }
}

/// `λ = -((ν+μ)/2) q ± sqrt(((ν-μ)/2 · q)² - α k²/q)`, ordered so that `λ₁` has the larger real part.
pub fn no_shear_eigenvalues<T: Real>(sys: &NoShearSystem<T>) -> Result<(Complex<T>, Complex<T>)> {
    sys.mode.require_nonzero_k()?;
    let q = sys.q();
    let k = sys.mode.k_real();
    let half = T::lit(0.5);
    let nu = sys.diss.nu();
    let mu = sys.diss.mu();
    let mean = -half * (nu + mu) * q;
    let d = half * (nu - mu) * q;
    let disc = Complex::new(d * d - sys.alpha * k * k / q, T::zero());
    let root = disc.sqrt();
    let l1 = Complex::new(mean, T::zero()) + root;
    let l2 = Complex::new(mean, T::zero()) - root;
    if l1.re >= l2.re {
        Ok((l1, l2))
    } else {
        Ok((l2, l1))
    }
}

/// Energy dichotomy for `ν μ = 0`: stable for `α > 0`, unstable for `α < 0`.
pub fn classify_no_shear<T: Real>(sys: &NoShearSystem<T>) -> Result<NoShearClass> {
    if !sys.diss.one_vanishes() {
        return Err(Error::Config("classification requires nu = 0 or mu = 0".into()));
    }
    Ok(if sys.alpha > T::zero() {
        NoShearClass::Stable
    } else if sys.alpha < T::zero() {
        NoShearClass::ExponentiallyUnstable
    } else {
        NoShearClass::Marginal
    })
}
