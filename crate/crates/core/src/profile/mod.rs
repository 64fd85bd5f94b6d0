//! Temperature profiles, their spectra and the smallness conditions on `T'`.

mod conditions;

pub use conditions::{
    admit, condition_main, condition_main_on, condition_sobolev, kernel_bound_check, main_grid, AdmissibilityReport,
    KernelReport, MainCondition,
};

use crate::error::{Error, Result};
use crate::{Complex, Real};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

/// One term `amplitude · cos(frequency · y + phase)` of `T'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub amplitude: f64,
    pub frequency: f64,
    #[serde(default)]
    pub phase: f64,
}

/// Shape of `T'`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileKind {
    /// `T(y) = slope · y`
    Affine { slope: f64 },
    Trigonometric { terms: Vec<TrigTerm> },
    /// Values of `T'` on one period. If `y` is given it must be the uniform grid
    /// `y₀ + s · period / n`.
    Sampled {
        period: f64,
        values: Vec<f64>,
        #[serde(default)]
        y: Option<Vec<f64>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemperatureProfile {
    #[serde(flatten)]
    pub kind: ProfileKind,
    #[serde(default)]
    pub description: String,
}

impl TemperatureProfile {
    pub fn affine(slope: f64) -> Self {
        Self { kind: ProfileKind::Affine { slope }, description: String::new() }
    }

    pub fn cosine(amplitude: f64, frequency: f64) -> Self {
        Self::trigonometric(vec![TrigTerm { amplitude, frequency, phase: 0.0 }])
    }

    pub fn trigonometric(terms: Vec<TrigTerm>) -> Self {
        Self { kind: ProfileKind::Trigonometric { terms }, description: String::new() }
    }

    pub fn zero() -> Self {
        Self::trigonometric(Vec::new())
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            ProfileKind::Affine { slope } => {
                if !slope.is_finite() {
                    return Err(Error::Config("affine slope must be finite".into()));
                }
            }
            ProfileKind::Trigonometric { terms } => {
                for t in terms {
                    if !(t.amplitude.is_finite() && t.frequency.is_finite() && t.phase.is_finite()) {
                        return Err(Error::Config("trigonometric terms must be finite".into()));
                    }
                }
            }
            ProfileKind::Sampled { period, values, y } => {
                if !(period.is_finite() && *period > 0.0) {
                    return Err(Error::Format(format!("sample period must be positive, got {period}")));
                }
                if values.is_empty() || values.len() % 2 != 0 {
                    return Err(Error::Format(format!("need an even number of samples, got {}", values.len())));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Format("non-finite sample".into()));
                }
                if let Some(y) = y {
                    check_uniform(y, *period, values.len())?;
                }
            }
        }
        Ok(())
    }

    /// Whether `T'` is constant.
    pub fn is_affine(&self) -> bool {
        matches!(self.kind, ProfileKind::Affine { .. })
    }
}

fn check_uniform(y: &[f64], period: f64, n: usize) -> Result<()> {
    if y.len() != n {
        return Err(Error::Format(format!("{} sample positions for {} values", y.len(), n)));
    }
    let h = period / n as f64;
    for (s, w) in y.iter().enumerate() {
        let expect = y[0] + s as f64 * h;
        if (w - expect).abs() > 1e-9 * period.max(1.0) {
            return Err(Error::Format(format!("sample grid is not uniform at index {s}")));
        }
    }
    Ok(())
}

/// Point mass of `F(T')`: `T'(y) ⊃ mass · exp(i frequency y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralAtom<T> {
    pub frequency: T,
    pub mass: Complex<T>,
}

/// `|F(T')|` sampled on an increasing frequency grid, integrated by the trapezoid rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledDensity<T> {
    pub xi: Vec<T>,
    pub values: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSpectrum<T> {
    pub atoms: Vec<SpectralAtom<T>>,
    pub density: Option<SampledDensity<T>>,
    /// Highest frequency the representation resolves, for spectra computed from samples.
    pub band_limit: Option<T>,
}

impl<T: Real> ProfileSpectrum<T> {
    pub fn from_atoms(atoms: Vec<SpectralAtom<T>>) -> Self {
        Self { atoms, density: None, band_limit: None }
    }

    pub fn total_mass(&self) -> T {
        let mut m = self.atoms.iter().fold(T::zero(), |s, a| s + a.mass.norm());
        if let Some(d) = &self.density {
            m = m + d.trapezoid(|_| T::one());
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.total_mass() == T::zero()
    }

    /// Atoms plus the density discretized into trapezoid-weighted atoms.
    /// Only the moduli of the masses are meaningful for the latter.
    pub fn effective_atoms(&self) -> Vec<SpectralAtom<T>> {
        let mut out = self.atoms.clone();
        if let Some(d) = &self.density {
            let w = d.weights();
            for ((&xi, &v), w) in d.xi.iter().zip(&d.values).zip(w) {
                out.push(SpectralAtom { frequency: xi, mass: Complex::new(v.abs() * w, T::zero()) });
            }
        }
        out
    }

    /// Multiplies every mass by `s`.
    pub fn scaled(&self, s: T) -> Self {
        let mut out = self.clone();
        for a in &mut out.atoms {
            a.mass = a.mass * s;
        }
        if let Some(d) = &mut out.density {
            for v in &mut d.values {
                *v = *v * s.abs();
            }
        }
        out
    }
}

impl<T: Real> SampledDensity<T> {
    fn weights(&self) -> Vec<T> {
        let n = self.xi.len();
        let half = T::lit(0.5);
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.xi[i] - self.xi[i - 1] } else { T::zero() };
                let right = if i + 1 < n { self.xi[i + 1] - self.xi[i] } else { T::zero() };
                half * (left + right)
            })
            .collect()
    }

    pub fn trapezoid<F: Fn(T) -> T>(&self, f: F) -> T {
        self.weights()
            .iter()
            .zip(&self.xi)
            .zip(&self.values)
            .fold(T::zero(), |s, ((w, &x), &v)| s + *w * v.abs() * f(x))
    }
}

fn push_atom<T: Real>(atoms: &mut Vec<SpectralAtom<T>>, frequency: T, mass: Complex<T>) {
    if let Some(a) = atoms.iter_mut().find(|a| a.frequency == frequency) {
        a.mass = a.mass + mass;
    } else {
        atoms.push(SpectralAtom { frequency, mass });
    }
}

/// Spectrum of `T'`.
///
/// An affine profile maps to one atom at the origin; `a cos(ωy + φ)` to the pair
/// `(±ω, (a/2) e^{±iφ})`; samples to their discrete Fourier coefficients at
/// multiples of `2π / period`, with atoms below `1e-14` of the largest dropped.
pub fn profile_spectrum<T: Real>(profile: &TemperatureProfile) -> Result<ProfileSpectrum<T>> {
    profile.validate()?;
    let mut atoms = Vec::new();
    match &profile.kind {
        ProfileKind::Affine { slope } => {
            if *slope != 0.0 {
                atoms.push(SpectralAtom { frequency: T::zero(), mass: Complex::new(T::lit(*slope), T::zero()) });
            }
            Ok(ProfileSpectrum::from_atoms(atoms))
        }
        ProfileKind::Trigonometric { terms } => {
            for term in terms {
                if term.amplitude == 0.0 {
                    continue;
                }
                let half = T::lit(0.5 * term.amplitude);
                let phase = Complex::from_polar(T::one(), T::lit(term.phase));
                if term.frequency == 0.0 {
                    push_atom(&mut atoms, T::zero(), Complex::new(T::lit(term.amplitude * term.phase.cos()), T::zero()));
                } else {
                    let w = T::lit(term.frequency.abs());
                    // a cos(-wy + p) = a cos(wy - p)
                    let ph = if term.frequency > 0.0 { phase } else { phase.conj() };
                    push_atom(&mut atoms, w, ph * half);
                    push_atom(&mut atoms, -w, ph.conj() * half);
                }
            }
            atoms.retain(|a| a.mass.norm() > T::zero());
            Ok(ProfileSpectrum::from_atoms(atoms))
        }
        ProfileKind::Sampled { period, values, y } => {
            let n = values.len();
            let mut buf: Vec<Complex<T>> = values.iter().map(|&v| Complex::new(T::lit(v), T::zero())).collect();
            FftPlanner::new().plan_fft_forward(n).process(&mut buf);
            let inv_n = T::lit(1.0 / n as f64);
            let y0 = y.as_ref().map(|v| v[0]).unwrap_or(0.0);
            let base = T::lit(2.0 * std::f64::consts::PI / period);
            let half = (n / 2) as i64;
            let mut raw = Vec::with_capacity(n + 1);
            for m in -half..=half {
                let idx = m.rem_euclid(n as i64) as usize;
                let mut c = buf[idx] * inv_n;
                if m.abs() == half {
                    c = c * T::lit(0.5);
                }
                let freq = base * T::lit(m as f64);
                let shift = Complex::from_polar(T::one(), -freq * T::lit(y0));
                raw.push(SpectralAtom { frequency: freq, mass: c * shift });
            }
            let biggest = raw.iter().fold(T::zero(), |s, a| s.max(a.mass.norm()));
            let floor = biggest * T::lit(1e-14);
            let atoms = raw.into_iter().filter(|a| a.mass.norm() > floor).collect();
            Ok(ProfileSpectrum { atoms, density: None, band_limit: Some(base * T::lit(half as f64)) })
        }
    }
}
