use crate::error::{HarnessError, Result};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

/// Least-squares power law `|α*| = prefactor · ν^exponent`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub intercept: f64,
    pub exponent_stderr: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub confidence: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Fits `log|α*|` against `log ν`. Needs at least four pairs with `ν > 0` and `α* < 0`.
pub fn scaling_fit(pairs: &[(f64, f64)], confidence: f64) -> Result<ScalingFit> {
    if pairs.len() < 4 {
        return Err(HarnessError::Fit(format!("need at least 4 pairs, got {}", pairs.len())));
    }
    if let Some(p) = pairs.iter().find(|(nu, a)| !(*a < 0.0) || !(*nu > 0.0)) {
        return Err(HarnessError::Fit(format!("pair (nu = {}, alpha_star = {}) is not (positive, negative)", p.0, p.1)));
    }
    let xs: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| (-p.1).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(HarnessError::Fit("all nu values coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let dof = n - 2.0;
    let stderr = (sse / dof / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, dof)
        .map_err(|e| HarnessError::Fit(e.to_string()))?
        .inverse_cdf(0.5 + confidence / 2.0);
    Ok(ScalingFit {
        exponent: slope,
        prefactor: intercept.exp(),
        intercept,
        exponent_stderr: stderr,
        ci_low: slope - t * stderr,
        ci_high: slope + t * stderr,
        confidence,
        r_squared: if syy > 0.0 { 1.0 - sse / syy } else { 1.0 },
        points: pairs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let pairs: Vec<_> = [1e-2, 3e-3, 1e-3, 3e-4, 1e-4].iter().map(|&nu: &f64| (nu, -nu.cbrt() / 100.0)).collect();
        let f = scaling_fit(&pairs, 0.95).unwrap();
        assert!((f.exponent - 1.0 / 3.0).abs() < 1e-12);
        assert!((f.prefactor - 0.01).abs() < 1e-14);
        assert!(f.exponent_stderr < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        let p = [(1e-2, -0.1), (1e-3, -0.05), (1e-4, -0.02)];
        assert!(matches!(scaling_fit(&p, 0.95), Err(HarnessError::Fit(_))));
        let p = [(1e-2, -0.1), (1e-3, -0.05), (1e-4, 0.0), (1e-5, -0.01)];
        assert!(matches!(scaling_fit(&p, 0.95), Err(HarnessError::Fit(_))));
    }
}
