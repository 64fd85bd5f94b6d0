use crate::error::{Error, Result};
use crate::multiplier::{FrequencyMode, ModeState};
use crate::Real;
use std::io::Write;

/// Samples of one mode `(ω̃, θ̃)` with the energy `|ω̃|² + k²|θ̃|²` at each sample.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeTrajectory<T> {
    pub mode: FrequencyMode<T>,
    pub times: Vec<T>,
    pub states: Vec<ModeState<T>>,
    pub energy: Vec<T>,
}

impl<T: Real> ModeTrajectory<T> {
    pub fn new(mode: FrequencyMode<T>) -> Self {
        Self { mode, times: Vec::new(), states: Vec::new(), energy: Vec::new() }
    }

    /// Appends a sample; repeated times are ignored so that `times` stays strictly increasing.
    pub fn push(&mut self, state: ModeState<T>) {
        if let Some(&last) = self.times.last() {
            if state.t <= last {
                return;
            }
        }
        self.times.push(state.t);
        self.energy.push(state.plain_energy(self.mode.k));
        self.states.push(state);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn first(&self) -> Option<&ModeState<T>> {
        self.states.first()
    }

    pub fn last(&self) -> Option<&ModeState<T>> {
        self.states.last()
    }

    pub fn is_finite(&self) -> bool {
        self.states.iter().all(ModeState::is_finite)
    }

    /// Columns `t, re_omega, im_omega, re_theta, im_theta, energy`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,re_omega,im_omega,re_theta,im_theta,energy")?;
        for (s, e) in self.states.iter().zip(&self.energy) {
            writeln!(
                w,
                "{:e},{:e},{:e},{:e},{:e},{:e}",
                s.t.to_f64_lossy(),
                s.omega.re.to_f64_lossy(),
                s.omega.im.to_f64_lossy(),
                s.theta.re.to_f64_lossy(),
                s.theta.im.to_f64_lossy(),
                e.to_f64_lossy()
            )?;
        }
        Ok(())
    }
}

/// Least-squares slope of `log|ω̃|` against `log t` over samples with `t` in `[a, b]`.
pub fn fit_growth_exponent<T: Real>(traj: &ModeTrajectory<T>, window: (T, T)) -> Result<T> {
    let (a, b) = window;
    if !(a > T::zero()) || !(b > a) {
        return Err(Error::Fit(format!("invalid fit window [{a}, {b}]")));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for s in &traj.states {
        if s.t >= a && s.t <= b {
            let amp = s.omega.norm();
            if !(amp > T::zero()) || !amp.is_finite() {
                return Err(Error::Fit(format!("nonpositive amplitude at t = {}", s.t)));
            }
            xs.push(s.t.ln());
            ys.push(amp.ln());
        }
    }
    if xs.len() < 2 {
        return Err(Error::Fit(format!("{} samples in window [{a}, {b}]", xs.len())));
    }
    let n = T::lit(xs.len() as f64);
    let mx = xs.iter().fold(T::zero(), |s, &x| s + x) / n;
    let my = ys.iter().fold(T::zero(), |s, &y| s + y) / n;
    let mut sxy = T::zero();
    let mut sxx = T::zero();
    for (&x, &y) in xs.iter().zip(&ys) {
        sxy = sxy + (x - mx) * (y - my);
        sxx = sxx + (x - mx) * (x - mx);
    }
    if sxx == T::zero() {
        return Err(Error::Fit("degenerate window".into()));
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::log_spaced;
    use crate::Complex;

    fn power_law(beta: f64) -> ModeTrajectory<f64> {
        let mut tr = ModeTrajectory::new(FrequencyMode::new(1, 0.0));
        for t in log_spaced::<f64>(1.0, 1e4, 60) {
            tr.push(ModeState::new(Complex::new(3.0 * t.powf(beta), 0.0), Complex::new(0.0, 0.0), t));
        }
        tr
    }

    #[test]
    fn exact_power_laws() {
        assert!((fit_growth_exponent(&power_law(2.0), (100.0, 1e4)).unwrap() - 2.0).abs() < 1e-6);
        assert!(fit_growth_exponent(&power_law(0.0), (100.0, 1e4)).unwrap().abs() < 1e-12);
    }

    #[test]
    fn zero_amplitude_is_a_fit_error() {
        let mut tr = power_law(1.0);
        tr.states[50].omega = Complex::new(0.0, 0.0);
        assert!(matches!(fit_growth_exponent(&tr, (1.0, 1e4)), Err(Error::Fit(_))));
    }

    #[test]
    fn push_keeps_times_increasing() {
        let mut tr = ModeTrajectory::new(FrequencyMode::new(2, 0.0));
        tr.push(ModeState::new(Complex::new(1.0, 0.0), Complex::new(1.0, 0.0), 0.0));
        tr.push(ModeState::new(Complex::new(1.0, 0.0), Complex::new(1.0, 0.0), 0.0));
        assert_eq!(tr.len(), 1);
        assert_eq!(tr.energy[0], 5.0);
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 2);
    }
}
