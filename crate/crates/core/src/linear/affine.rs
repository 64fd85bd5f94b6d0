use super::trajectory::ModeTrajectory;
use crate::error::{Error, Result};
use crate::multiplier::{alpha_hat, CutoffConfig, DissipationConfig, FrequencyMode, ModeState};
use crate::ode::{integrate, log_spaced, IntegrationOptions, LawsonSystem};
use crate::{Complex, Real};
use serde::{Deserialize, Serialize};

/// Which states a solver records.
#[derive(Debug, Clone, PartialEq)]
pub enum Sampling<T> {
    /// Every accepted step (plus the initial state).
    Steps,
    /// Only the listed times.
    Times(Vec<T>),
}

/// One sheared mode around `T(y) = αy`, in the variables `(ω̃, kθ̃)`:
///
/// ```text
/// d/dt ω̃  = -(ν_x k² + ν_y (xi - kt)²) ω̃ + i kθ̃
/// d/dt kθ̃ = -(μ_x k² + μ_y (xi - kt)²) kθ̃ + i α / (1 + (xi/k - t)²) ω̃
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct AffineProblem<T> {
    pub mode: FrequencyMode<T>,
    pub alpha: T,
    pub diss: DissipationConfig<T>,
    /// Initial `(ω̃, θ̃)` and start time.
    pub init: ModeState<T>,
    pub t_end: T,
    pub sampling: Sampling<T>,
    pub opts: IntegrationOptions<T>,
}

impl<T: Real> AffineProblem<T> {
    /// Full viscosity `ν Δ_t` on `ω̃`, unit vorticity at `t = 0`, every step recorded.
    pub fn new(mode: FrequencyMode<T>, alpha: T, nu: T, t_end: T) -> Result<Self> {
        Ok(Self {
            mode,
            alpha,
            diss: DissipationConfig::full(nu)?,
            init: ModeState::new(Complex::new(T::one(), T::zero()), Complex::new(T::zero(), T::zero()), T::zero()),
            t_end,
            sampling: Sampling::Steps,
            opts: IntegrationOptions::with_tolerances(T::lit(1e-10), T::lit(1e-14)),
        })
    }

    pub fn with_init(mut self, omega: Complex<T>, theta: Complex<T>) -> Self {
        self.init = ModeState::new(omega, theta, self.init.t);
        self
    }

    pub fn with_diss(mut self, diss: DissipationConfig<T>) -> Self {
        self.diss = diss;
        self
    }

    pub fn with_sampling(mut self, sampling: Sampling<T>) -> Self {
        self.sampling = sampling;
        self
    }

    pub fn with_options(mut self, opts: IntegrationOptions<T>) -> Self {
        self.opts = opts;
        self
    }
}

struct AffineSystem<T> {
    k: i64,
    xi: T,
    s: T,
    alpha: T,
    diss: DissipationConfig<T>,
}

impl<T: Real> LawsonSystem<T> for AffineSystem<T> {
    fn dim(&self) -> usize {
        2
    }

    fn decay(&self, a: T, b: T, out: &mut [T]) {
        out[0] = self.diss.omega_decay(self.k, self.xi, a, b);
        out[1] = self.diss.theta_decay(self.k, self.xi, a, b);
    }

    fn nonstiff(&self, t: T, y: &[Complex<T>], dy: &mut [Complex<T>]) {
        let i = Complex::new(T::zero(), T::one());
        let d = self.s - t;
        dy[0] = i * y[1];
        dy[1] = i * y[0] * (self.alpha / (T::one() + d * d));
    }
}

fn run<T: Real, S: LawsonSystem<T>>(
    sys: &S,
    t0: T,
    y0: [Complex<T>; 2],
    t_end: T,
    sampling: &Sampling<T>,
    opts: &IntegrationOptions<T>,
    mut to_state: impl FnMut(T, &[Complex<T>]) -> ModeState<T>,
    traj: &mut ModeTrajectory<T>,
) -> Result<()> {
    traj.push(to_state(t0, &y0));
    match sampling {
        Sampling::Steps => {
            let mut pushed = Vec::new();
            integrate(sys, t0, &y0, &[t_end], opts, |_, _, _| {}, |t, y| pushed.push(to_state(t, y)))?;
            for s in pushed {
                traj.push(s);
            }
        }
        Sampling::Times(times) => {
            let mut pushed = Vec::new();
            integrate(sys, t0, &y0, times, opts, |_, t, y| pushed.push(to_state(t, y)), |_, _| {})?;
            for s in pushed {
                traj.push(s);
            }
        }
    }
    if !traj.is_finite() {
        return Err(Error::Integration { t: t_end.to_f64_lossy(), reason: "non-finite state".into() });
    }
    Ok(())
}

/// Integrates one sheared mode with the dissipation applied exactly through
/// its cubic antiderivative.
pub fn integrate_affine_mode<T: Real>(p: &AffineProblem<T>) -> Result<ModeTrajectory<T>> {
    let s = p.mode.critical_time()?;
    if !(p.t_end > p.init.t) {
        return Err(Error::Config(format!("t_end = {} must exceed the start time {}", p.t_end, p.init.t)));
    }
    let k = p.mode.k;
    let kr = p.mode.k_real();
    let sys = AffineSystem { k, xi: p.mode.xi, s, alpha: p.alpha, diss: p.diss };
    let mut traj = ModeTrajectory::new(p.mode);
    let y0 = [p.init.omega, p.init.theta * kr];
    run(
        &sys,
        p.init.t,
        y0,
        p.t_end,
        &p.sampling,
        &p.opts,
        |t, y| ModeState::new(y[0], y[1] / kr, t),
        &mut traj,
    )?;
    Ok(traj)
}

struct Schrodinger<T> {
    alpha: T,
}

impl<T: Real> LawsonSystem<T> for Schrodinger<T> {
    fn dim(&self) -> usize {
        2
    }

    fn decay(&self, _a: T, _b: T, out: &mut [T]) {
        out.fill(T::zero());
    }

    fn nonstiff(&self, t: T, y: &[Complex<T>], dy: &mut [Complex<T>]) {
        dy[0] = y[1];
        dy[1] = -y[0] * (self.alpha / (T::one() + t * t));
    }
}

/// Solves `u'' + α/(1+t²) u = 0` from `t = 0` with `u(0) = u0`, `u'(0) = du0`,
/// sampled at `t = 0` and on a log-spaced grid up to `t_end`.
///
/// States are reported as the `k = 1` mode at `xi = 0`: `ω̃ = u`, `θ̃ = -i u'`.
pub fn integrate_schrodinger<T: Real>(alpha: T, u0: T, du0: T, t_end: T, rtol: T) -> Result<ModeTrajectory<T>> {
    if !(t_end > T::zero()) {
        return Err(Error::Config(format!("t_end must be positive, got {t_end}")));
    }
    let mut times = vec![T::zero()];
    times.extend(log_spaced(t_end.min(T::one()) * T::lit(0.01), t_end, 800));
    let opts = IntegrationOptions::with_tolerances(rtol, rtol * T::lit(1e-6));
    integrate_schrodinger_at(alpha, T::zero(), (Complex::from(u0), Complex::from(du0)), &Sampling::Times(times), &opts)
}

/// General form of [`integrate_schrodinger`]: start time, complex data and sampling are free.
pub fn integrate_schrodinger_at<T: Real>(
    alpha: T,
    t_start: T,
    init: (Complex<T>, Complex<T>),
    sampling: &Sampling<T>,
    opts: &IntegrationOptions<T>,
) -> Result<ModeTrajectory<T>> {
    let t_end = match sampling {
        Sampling::Times(v) => *v.last().ok_or_else(|| Error::Config("no sample times".into()))?,
        Sampling::Steps => return Err(Error::Config("step sampling needs an explicit end time".into())),
    };
    let sys = Schrodinger { alpha };
    let mut traj = ModeTrajectory::new(FrequencyMode::new(1, T::zero()));
    let mi = Complex::new(T::zero(), -T::one());
    run(
        &sys,
        t_start,
        [init.0, init.1],
        t_end,
        sampling,
        opts,
        |t, y| ModeState::new(y[0], y[1] * mi, t),
        &mut traj,
    )?;
    Ok(traj)
}

/// `(1 + 1/α̂) (1 + C²)^{1+α̂} exp(π α̂ / (ν C⁴))` with `α̂ = max(|α|, ν^{1/3})`.
pub fn proof_envelope<T: Real>(alpha: T, nu: T, cutoff: CutoffConfig<T>) -> T {
    let ah = alpha_hat(alpha, nu);
    let c2 = cutoff.c * cutoff.c;
    (T::one() + ah.recip()) * (T::one() + c2).powf(T::one() + ah) * (T::PI() * ah / (nu * c2 * c2)).exp()
}

/// `(1 + 1/|α|) (1 + C²) exp(|α| / (ν C²))`.
pub fn display_envelope<T: Real>(alpha: T, nu: T, cutoff: CutoffConfig<T>) -> T {
    let a = alpha.abs();
    let c2 = cutoff.c * cutoff.c;
    (T::one() + a.recip()) * (T::one() + c2) * (a / (nu * c2)).exp()
}

/// `2 e^π (1 + ν^{-2/3})²`.
pub fn uniform_envelope<T: Real>(nu: T) -> T {
    let x = T::one() + nu.powf(-T::lit(2.0) / T::lit(3.0));
    T::lit(2.0) * T::PI().exp() * x * x
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport<T> {
    /// `sup_t (|ω̃|² + k²|θ̃|²) / initial`
    pub ratio: T,
    pub t_at_max: T,
    pub alpha_hat: T,
    pub envelope: T,
    pub pass: bool,
    pub display_envelope: T,
    pub pass_display: bool,
    pub uniform_envelope: T,
    pub pass_uniform: bool,
}

pub fn verify_mode_bound<T: Real>(
    traj: &ModeTrajectory<T>,
    alpha: T,
    nu: T,
    cutoff: CutoffConfig<T>,
) -> Result<BoundReport<T>> {
    if !(nu > T::zero()) {
        return Err(Error::Config(format!("envelope requires nu > 0, got {nu}")));
    }
    let e0 = *traj.energy.first().ok_or_else(|| Error::Undefined("empty trajectory".into()))?;
    if !(e0 > T::zero()) {
        return Err(Error::Undefined("zero initial energy".into()));
    }
    let mut ratio = T::zero();
    let mut t_at_max = traj.times[0];
    for (t, e) in traj.times.iter().zip(&traj.energy) {
        if *e / e0 > ratio {
            ratio = *e / e0;
            t_at_max = *t;
        }
    }
    let envelope = proof_envelope(alpha, nu, cutoff);
    let display = display_envelope(alpha, nu, cutoff);
    let uniform = uniform_envelope(nu);
    Ok(BoundReport {
        ratio,
        t_at_max,
        alpha_hat: alpha_hat(alpha, nu),
        envelope,
        pass: ratio <= envelope,
        display_envelope: display,
        pass_display: ratio <= display,
        uniform_envelope: uniform,
        pass_uniform: ratio <= uniform,
    })
}
