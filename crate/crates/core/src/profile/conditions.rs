use super::{profile_spectrum, ProfileSpectrum, SpectralAtom, TemperatureProfile};
use crate::error::{Error, Result};
use crate::multiplier::b_integral;
use crate::Real;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Value of the kernel condition together with the grid it was maximised over.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MainCondition<T> {
    pub value: T,
    pub argmax_xi: T,
    pub grid_points: usize,
    /// Relative change of the supremum when the log-spaced part of the grid is doubled.
    pub refinement_delta: T,
}

/// Candidate `xi`: zero, `-ω_m` for each atom and `±10^s` for `n` log-spaced `s` in `[-3, 3]`.
pub fn main_grid<T: Real>(spec: &ProfileSpectrum<T>, n: usize) -> Vec<T> {
    let mut grid = vec![T::zero()];
    for a in &spec.atoms {
        grid.push(-a.frequency);
    }
    for i in 0..n {
        let s = if n > 1 { -3.0 + 6.0 * i as f64 / (n - 1) as f64 } else { 0.0 };
        let x = T::lit(10f64.powf(s));
        grid.push(x);
        grid.push(-x);
    }
    grid
}

fn main_integrand<T: Real>(atoms: &[SpectralAtom<T>], n: u32, cap: T, xi: T) -> T {
    let one = T::one();
    let two_thirds = T::lit(2.0 / 3.0);
    let mut acc = T::zero();
    for a in atoms {
        let z = xi + a.frequency;
        let r = (one + z.abs()) / (one + xi.abs());
        let ratio = (r + r.recip()).powi(n as i32);
        let shift = a.frequency.abs().powf(two_thirds).min(cap);
        acc = acc + a.mass.norm() * ratio * (one + shift);
    }
    acc
}

/// `sup_xi Σ_m |a_m| ((1+|z|)/(1+|xi|) + (1+|xi|)/(1+|z|))^N (1 + min(ν^{-2/3}, |z - xi|^{2/3}))`
/// with `z = xi + ω_m`, over an explicit grid.
pub fn condition_main_on<T: Real>(spec: &ProfileSpectrum<T>, n: u32, nu: T, grid: &[T]) -> Result<(T, T)> {
    if !(nu > T::zero()) {
        return Err(Error::Config(format!("nu must be positive, got {nu}")));
    }
    let atoms = spec.effective_atoms();
    if atoms.is_empty() {
        return Ok((T::zero(), T::zero()));
    }
    let cap = nu.powf(-T::lit(2.0 / 3.0));
    let best = grid
        .par_iter()
        .map(|&xi| (main_integrand(&atoms, n, cap, xi), xi))
        .reduce(|| (T::zero(), T::zero()), |a, b| if b.0 > a.0 { b } else { a });
    Ok(best)
}

/// Kernel condition on the default grid of 200 log-spaced magnitudes, with a
/// refinement check at 400.
pub fn condition_main<T: Real>(spec: &ProfileSpectrum<T>, n: u32, nu: T) -> Result<MainCondition<T>> {
    let coarse = main_grid(spec, 200);
    let fine = main_grid(spec, 400);
    let (value, argmax_xi) = condition_main_on(spec, n, nu, &coarse)?;
    let (fine_value, _) = condition_main_on(spec, n, nu, &fine)?;
    let refinement_delta =
        if fine_value > T::zero() { (fine_value - value).abs() / fine_value } else { T::zero() };
    Ok(MainCondition { value, argmax_xi, grid_points: coarse.len(), refinement_delta })
}

/// `Σ (1 + |ω_m|)^{N+5} |a_m|` (plus the trapezoid integral of any density).
///
/// For spectra with a band limit `W`, more than 1% of the sum coming from
/// `|ω| > W/2` is reported as a divergence: the samples do not resolve the decay.
pub fn condition_sobolev<T: Real>(spec: &ProfileSpectrum<T>, n: u32, nu: T) -> Result<T> {
    if !(nu > T::zero()) {
        return Err(Error::Config(format!("nu must be positive, got {nu}")));
    }
    let p = (n + 5) as i32;
    let weight = |w: T| (T::one() + w.abs()).powi(p);
    let mut total = T::zero();
    let mut tail = T::zero();
    let half_band = spec.band_limit.map(|w| w * T::lit(0.5));
    for a in &spec.atoms {
        let v = weight(a.frequency) * a.mass.norm();
        total = total + v;
        if let Some(h) = half_band {
            if a.frequency.abs() > h {
                tail = tail + v;
            }
        }
    }
    if let Some(d) = &spec.density {
        let v = d.trapezoid(weight);
        total = total + v;
        if let (Some(&lo), Some(&hi)) = (d.xi.first(), d.xi.last()) {
            let edge = T::lit(0.9) * lo.abs().max(hi.abs());
            tail = tail + d.trapezoid(|x| if x.abs() > edge { weight(x) } else { T::zero() });
        }
    }
    if !total.is_finite() {
        return Err(Error::Divergence("weighted sum is not finite".into()));
    }
    if total > T::zero() && tail > T::lit(0.01) * total {
        return Err(Error::Divergence(format!(
            "{:.1}% of the weighted sum sits in the upper half of the resolved band",
            (tail / total).to_f64_lossy() * 100.0
        )));
    }
    Ok(total)
}

/// Result of sampling the Schur-test kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelReport<T> {
    pub samples: usize,
    /// `max K / ((1 + |xi - ζ|)^{N+5})` with `K` the kernel divided by `|F(T')(xi - ζ)|`.
    pub max_ratio: T,
    /// `√2 (1 + 3^N)`
    pub declared_constant: T,
    pub pass: bool,
    /// Largest `(1 + |xi|^N)/(1 + |ζ|^N) / ((3/2)^N (1 + |xi - ζ|^N))` over samples with `|xi| >= 3|ζ|`.
    pub max_far_ratio: T,
    pub far_pass: bool,
    /// Largest `B(xi)/B(ζ) / exp(4 asinh(|xi - ζ| / (2|k|)))`; at most 1.
    pub max_b_ratio: T,
    /// Samples where `B(xi)/B(ζ)` exceeds `sqrt(1 + |xi - ζ|²)`.
    pub b_sqrt_exceedances: usize,
}

fn kernel_factors<T: Real>(n: u32, c: T, t: T, k: i64, xi: T, zeta: T) -> (T, T, T) {
    let one = T::one();
    let two = T::lit(2.0);
    let kr = T::lit(k as f64);
    let (sx, sz) = (xi / kr, zeta / kr);
    let num = one + (sx - t) * (sx - t);
    let den = one + (sz - t) * (sz - t);
    let sqrt_ratio = (num / den).sqrt();
    let b_ratio = (two * (b_integral(t, sz, c) - b_integral(t, sx, c))).exp();
    let sob = (one + xi.abs().powi(n as i32)) / (one + zeta.abs().powi(n as i32));
    (sqrt_ratio, b_ratio, sob)
}

/// Samples `(t, k, xi, ζ)` and compares the Schur-test kernel
/// `sqrt((k² + (xi-kt)²)/(k² + (ζ-kt)²)) · B(xi)/B(ζ) · (1+|xi|^N)/(1+|ζ|^N)`
/// against `(1 + |xi - ζ|)^{N+5}`. Half of the pairs are separated by an atom
/// frequency of the profile, the other half by a random offset.
pub fn kernel_bound_check<T: Real>(
    spec: &ProfileSpectrum<T>,
    n: u32,
    nu: T,
    samples: usize,
    seed: u64,
) -> Result<KernelReport<T>> {
    if !(nu > T::zero()) {
        return Err(Error::Config(format!("nu must be positive, got {nu}")));
    }
    let c = nu.cbrt().recip();
    let cf = c.to_f64_lossy();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let freqs: Vec<f64> = spec.effective_atoms().iter().map(|a| a.frequency.to_f64_lossy()).collect();
    let one = T::one();
    let p = (n + 5) as i32;
    let mut max_ratio = T::zero();
    let mut max_far = T::zero();
    let mut max_b = T::zero();
    let mut exceed = 0;
    for i in 0..samples {
        let k: i64 = rng.gen_range(1..=8) * if rng.gen_bool(0.5) { 1 } else { -1 };
        let kf = k as f64;
        let t = rng.gen_range(0.0..4.0 * cf);
        let zeta = T::lit(kf * rng.gen_range(-2.0 * cf..6.0 * cf));
        let d = if i % 2 == 0 && !freqs.is_empty() {
            freqs[rng.gen_range(0..freqs.len())]
        } else {
            rng.gen_range(-20.0..20.0)
        };
        let xi = zeta + T::lit(d);
        let (sr, br, sob) = kernel_factors(n, c, T::lit(t), k, xi, zeta);
        let dist = (xi - zeta).abs();
        let ratio = sr * br * sob / (one + dist).powi(p);
        max_ratio = max_ratio.max(ratio);
        let b_bound = (T::lit(4.0) * (dist / T::lit(2.0 * kf.abs())).asinh()).exp();
        max_b = max_b.max(br / b_bound);
        if br > (one + dist * dist).sqrt() * (one + T::lit(1e-12)) {
            exceed += 1;
        }

        // far branch |xi| >= 3|ζ|
        let xf = rng.gen_range(-50.0..50.0f64);
        let zf = rng.gen_range(-1.0..1.0) * xf.abs() / 3.0;
        let (xt, zt) = (T::lit(xf), T::lit(zf));
        let sob_far = (one + xt.abs().powi(n as i32)) / (one + zt.abs().powi(n as i32));
        let bound = T::lit(1.5).powi(n as i32) * (one + (xt - zt).abs().powi(n as i32));
        max_far = max_far.max(sob_far / bound);
    }
    let declared = T::lit(2f64.sqrt()) * (one + T::lit(3.0).powi(n as i32));
    Ok(KernelReport {
        samples,
        max_ratio,
        declared_constant: declared,
        pass: max_ratio <= declared,
        max_far_ratio: max_far,
        far_pass: max_far <= one,
        max_b_ratio: max_b,
        b_sqrt_exceedances: exceed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub n: u32,
    pub nu: f64,
    pub value_main: f64,
    pub value_sobolev: f64,
    /// `ν^{1/3} / 100`, strict
    pub threshold_main: f64,
    /// `4^{-N} ν^{1/3}`, inclusive
    pub threshold_sobolev: f64,
    pub pass_main: bool,
    pub pass_sobolev: bool,
    pub alpha_surrogate: f64,
    pub alpha_surrogate_formula: String,
    pub main_grid_points: usize,
    pub main_grid_description: String,
    pub main_argmax_xi: f64,
    pub main_refinement_delta: f64,
    pub atoms: usize,
}

impl AdmissibilityReport {
    pub fn pass(&self) -> bool {
        self.pass_main && self.pass_sobolev
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn admit(profile: &TemperatureProfile, n: u32, nu: f64) -> Result<AdmissibilityReport> {
    let spec = profile_spectrum::<f64>(profile)?;
    let main = condition_main(&spec, n, nu)?;
    let sob = condition_sobolev(&spec, n, nu)?;
    let threshold_main = nu.cbrt() / 100.0;
    let threshold_sobolev = 4f64.powi(-(n as i32)) * nu.cbrt();
    let scaled_main = main.value / 2f64.powi(n as i32);
    Ok(AdmissibilityReport {
        n,
        nu,
        value_main: main.value,
        value_sobolev: sob,
        threshold_main,
        threshold_sobolev,
        pass_main: main.value < threshold_main,
        pass_sobolev: sob <= threshold_sobolev,
        alpha_surrogate: scaled_main.min(sob),
        alpha_surrogate_formula: "min(value_main / 2^N, value_sobolev)".into(),
        main_grid_points: main.grid_points,
        main_grid_description: "xi in {0} U {-frequency of each atom} U {+-10^s : s = 200 points evenly spaced in [-3, 3]}"
            .into(),
        main_argmax_xi: main.argmax_xi,
        main_refinement_delta: main.refinement_delta,
        atoms: spec.atoms.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Complex;

    #[test]
    fn affine_values_are_exact() {
        for n in 0..6u32 {
            let spec = profile_spectrum::<f64>(&TemperatureProfile::affine(-0.37)).unwrap();
            let m = condition_main(&spec, n, 1e-3).unwrap();
            assert_eq!(m.value, 0.37 * 2f64.powi(n as i32));
            assert_eq!(condition_sobolev(&spec, n, 1e-3).unwrap(), 0.37);
        }
    }

    #[test]
    fn cosine_values() {
        let spec = profile_spectrum::<f64>(&TemperatureProfile::cosine(0.1, 1.0)).unwrap();
        let m = condition_main(&spec, 0, 1e-3).unwrap();
        assert!((m.value - 0.2).abs() < 1e-15);
        let s = condition_sobolev(&spec, 1, 1e-3).unwrap();
        assert!((s - 6.4).abs() < 1e-12);
    }

    #[test]
    fn zero_profile_is_admissible() {
        let r = admit(&TemperatureProfile::zero(), 3, 1e-2).unwrap();
        assert_eq!((r.value_main, r.value_sobolev), (0.0, 0.0));
        assert!(r.pass());
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(json["pass_main"], true);
    }

    #[test]
    fn affine_admission_examples() {
        let nu = 1e-3f64;
        for n in 0..4u32 {
            let ok = admit(&TemperatureProfile::affine(-nu.cbrt() / (200.0 * 2f64.powi(n as i32))), n, nu).unwrap();
            assert!(ok.pass_main && ok.pass_sobolev, "{ok:?}");
            let bad = admit(&TemperatureProfile::affine(-2.0 * nu.cbrt()), n, nu).unwrap();
            assert!(!bad.pass_main && !bad.pass_sobolev);
        }
    }

    #[test]
    fn kernel_diagonal_is_one() {
        let (s, b, sob) = kernel_factors(3, 10.0, 1.7, 2, 0.4, 0.4);
        assert_eq!((s, b, sob), (1.0, 1.0, 1.0));
    }

    #[test]
    fn band_limited_tail_is_divergent() {
        let spec = ProfileSpectrum {
            atoms: vec![SpectralAtom { frequency: 30.0, mass: Complex::new(1e-3, 0.0) }],
            density: None,
            band_limit: Some(32.0),
        };
        assert!(matches!(condition_sobolev(&spec, 2, 1e-2), Err(Error::Divergence(_))));
    }
}
