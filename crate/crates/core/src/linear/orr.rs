use crate::error::{Error, Result};
use crate::multiplier::sobolev_weight;
use crate::spectral::SpectralField;
use crate::{Complex, Real};

/// `v̂₁ / ω̂ = -i (xi - kt) / (k² + (xi - kt)²)` in the moving frame.
pub fn velocity_x_symbol<T: Real>(k: i64, xi: T, t: T) -> Complex<T> {
    let kr = T::lit(k as f64);
    let eta = xi - kr * t;
    Complex::new(T::zero(), -eta / (kr * kr + eta * eta))
}

/// `t ‖v₁,≠‖ / ‖ω_≠‖_{H¹}` with the `k = 0` column removed.
pub fn orr_ratio<T: Real>(omega: &SpectralField<T>, t: T) -> Result<T> {
    if !(t > T::zero()) {
        return Err(Error::Domain(format!("orr ratio needs t > 0, got {t}")));
    }
    let mut v2 = T::zero();
    let mut h1 = T::zero();
    for (k, j, c) in omega.iter_modes() {
        if k == 0 {
            continue;
        }
        let xi = omega.grid().xi(j);
        v2 = v2 + (velocity_x_symbol(k, xi, t) * c).norm_sqr();
        h1 = h1 + sobolev_weight(1, k, xi) * c.norm_sqr();
    }
    if !(h1 > T::zero()) {
        return Err(Error::Undefined("vorticity has no k != 0 content".into()));
    }
    Ok(t * (v2 / h1).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::SpectralGrid;

    #[test]
    fn single_mode_value() {
        let g = SpectralGrid::new(2, 4, 2.0 * std::f64::consts::PI).unwrap();
        let mut f = SpectralField::zeros(g);
        f.set(1, 0, Complex::new(1.0, 0.0));
        let r = orr_ratio(&f, 10.0).unwrap();
        let expect = 10.0 * (10.0 / 101.0) / 2f64.sqrt();
        assert!((r - expect).abs() < 1e-14);
        assert!(r <= 1.0);
    }

    #[test]
    fn undefined_and_domain_errors() {
        let g = SpectralGrid::new(2, 4, 1.0).unwrap();
        let mut f = SpectralField::zeros(g);
        assert!(matches!(orr_ratio(&f, 1.0), Err(Error::Undefined(_))));
        f.set(0, 1, Complex::new(1.0, 0.0));
        assert!(matches!(orr_ratio(&f, 1.0), Err(Error::Undefined(_))));
        assert!(matches!(orr_ratio(&f, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn non_resonant_data_is_small() {
        // xi_j = j, so j = 1000 sits far from the critical time at t = 1
        let g = SpectralGrid::new(1, 1000, 2.0 * std::f64::consts::PI).unwrap();
        let mut f = SpectralField::zeros(g);
        f.set(1, 1000, Complex::new(1.0, 0.0));
        assert!(orr_ratio(&f, 1.0).unwrap() < 1e-5);
    }
}
