use super::operators::{eta, lattice_atoms, profile_product, velocity_into, Workspace};
use super::{SimConfig, SimState};
use crate::error::{Error, Result};
use crate::profile::profile_spectrum;
use crate::spectral::{SpectralField, SpectralGrid};
use crate::{Complex, Real};

/// Integrating-factor RK4 for the sheared system. The vertical dissipation is
/// applied exactly on every mode; coupling, the `T'` forcing and transport are
/// treated explicitly.
pub struct Stepper<T: Real> {
    grid: SpectralGrid<T>,
    nu: T,
    mu: T,
    shear: T,
    nonlinear: bool,
    atoms: Vec<(i64, Complex<T>)>,
    cfl: T,
    dt_max: T,
    ws: Workspace<T>,
    v1: SpectralField<T>,
    v2: SpectralField<T>,
    tmp: SpectralField<T>,
}

impl<T: Real> Stepper<T> {
    pub fn new(cfg: &SimConfig, grid: SpectralGrid<T>) -> Result<Self> {
        cfg.validate()?;
        let spec = profile_spectrum::<T>(&cfg.profile)?;
        let atoms = lattice_atoms(&spec, &grid)?;
        Ok(Self {
            grid,
            nu: T::lit(cfg.nu),
            mu: T::lit(cfg.mu()),
            shear: T::lit(cfg.shear),
            nonlinear: cfg.nonlinear,
            atoms,
            cfl: T::lit(cfg.dt.cfl),
            dt_max: T::lit(cfg.dt.max),
            ws: Workspace::new(grid),
            v1: SpectralField::zeros(grid),
            v2: SpectralField::zeros(grid),
            tmp: SpectralField::zeros(grid),
        })
    }

    pub fn grid(&self) -> &SpectralGrid<T> {
        &self.grid
    }

    /// Right-hand side without the dissipation.
    pub fn rhs(&mut self, t: T, omega: &SpectralField<T>, theta: &SpectralField<T>, d_omega: &mut SpectralField<T>, d_theta: &mut SpectralField<T>) {
        velocity_into(omega, t, self.shear, &mut self.v1, &mut self.v2);
        profile_product(&self.atoms, &self.v2, d_theta);
        {
            let g = self.grid;
            let src = theta.as_slice();
            for (idx, d) in d_omega.as_mut_slice().iter_mut().enumerate() {
                let (k, _) = g.mode_at(idx);
                let kr = T::lit(k as f64);
                let c = src[idx];
                *d = Complex::new(-c.im * kr, c.re * kr);
            }
        }
        if self.nonlinear {
            self.ws.load_velocity(&self.v1, &self.v2);
            self.ws.transport(omega, t, self.shear, &mut self.tmp);
            for (d, n) in d_omega.as_mut_slice().iter_mut().zip(self.tmp.as_slice()) {
                *d = *d - *n;
            }
            self.ws.transport(theta, t, self.shear, &mut self.tmp);
            for (d, n) in d_theta.as_mut_slice().iter_mut().zip(self.tmp.as_slice()) {
                *d = *d - *n;
            }
        }
        d_omega.symmetrize();
        d_theta.symmetrize();
    }

    fn factors(&self, a: T, b: T, coef: T, out: &mut Vec<T>) {
        out.clear();
        let three = T::lit(3.0);
        for idx in 0..self.grid.len() {
            let (k, j) = self.grid.mode_at(idx);
            let xi = self.grid.xi(j);
            let x = eta(xi, k, a, self.shear);
            let y = eta(xi, k, b, self.shear);
            let d = coef * (b - a) * (x * x + x * y + y * y) / three;
            out.push((-d).exp());
        }
    }

    /// Largest admissible step at the current state.
    pub fn cfl_limit(&self, state: &SimState<T>) -> T {
        let mut v1 = SpectralField::zeros(self.grid);
        let mut v2 = SpectralField::zeros(self.grid);
        velocity_into(&state.omega, state.t, self.shear, &mut v1, &mut v2);
        // Σ|v̂| bounds the sup norm of v
        let s1 = v1.as_slice().iter().fold(T::zero(), |s, c| s + c.norm());
        let s2 = v2.as_slice().iter().fold(T::zero(), |s, c| s + c.norm());
        let kmax = T::lit(self.grid.k_max() as f64);
        let eta_max = self.grid.xi_max() + self.shear * kmax * state.t.abs();
        let adv = if self.nonlinear { s1 * kmax + s2 * eta_max } else { T::zero() };
        let forcing = self.atoms.iter().fold(T::zero(), |s, (_, a)| s + a.norm()).sqrt();
        let rate = adv + forcing;
        if rate > T::zero() {
            self.dt_max.min(self.cfl / rate)
        } else {
            self.dt_max
        }
    }

    /// One step of size `dt` without a stability check.
    pub fn step(&mut self, state: &SimState<T>, dt: T) -> SimState<T> {
        let g = self.grid;
        let t = state.t;
        let half = dt * T::lit(0.5);
        let th = t + half;
        let t1 = t + dt;
        let (mut ew1, mut ew2, mut et1, mut et2) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        self.factors(t, th, self.nu, &mut ew1);
        self.factors(th, t1, self.nu, &mut ew2);
        self.factors(t, th, self.mu, &mut et1);
        self.factors(th, t1, self.mu, &mut et2);

        let z = || SpectralField::zeros(g);
        let (mut k1w, mut k1t, mut k2w, mut k2t) = (z(), z(), z(), z());
        let (mut k3w, mut k3t, mut k4w, mut k4t) = (z(), z(), z(), z());
        let (mut yw, mut yt) = (z(), z());

        self.rhs(t, &state.omega, &state.theta, &mut k1w, &mut k1t);

        let w0 = state.omega.as_slice();
        let q0 = state.theta.as_slice();
        let combine = |out: &mut SpectralField<T>, f: &dyn Fn(usize) -> Complex<T>| {
            for (i, o) in out.as_mut_slice().iter_mut().enumerate() {
                *o = f(i);
            }
        };

        combine(&mut yw, &|i| (w0[i] + k1w.as_slice()[i] * half) * ew1[i]);
        combine(&mut yt, &|i| (q0[i] + k1t.as_slice()[i] * half) * et1[i]);
        self.rhs(th, &yw, &yt, &mut k2w, &mut k2t);

        combine(&mut yw, &|i| w0[i] * ew1[i] + k2w.as_slice()[i] * half);
        combine(&mut yt, &|i| q0[i] * et1[i] + k2t.as_slice()[i] * half);
        self.rhs(th, &yw, &yt, &mut k3w, &mut k3t);

        combine(&mut yw, &|i| w0[i] * (ew1[i] * ew2[i]) + k3w.as_slice()[i] * (dt * ew2[i]));
        combine(&mut yt, &|i| q0[i] * (et1[i] * et2[i]) + k3t.as_slice()[i] * (dt * et2[i]));
        self.rhs(t1, &yw, &yt, &mut k4w, &mut k4t);

        let sixth = dt / T::lit(6.0);
        let two = T::lit(2.0);
        let mut omega = z();
        let mut theta = z();
        combine(&mut omega, &|i| {
            let ef = ew1[i] * ew2[i];
            w0[i] * ef
                + (k1w.as_slice()[i] * ef + (k2w.as_slice()[i] + k3w.as_slice()[i]) * (two * ew2[i]) + k4w.as_slice()[i])
                    * sixth
        });
        combine(&mut theta, &|i| {
            let ef = et1[i] * et2[i];
            q0[i] * ef
                + (k1t.as_slice()[i] * ef + (k2t.as_slice()[i] + k3t.as_slice()[i]) * (two * et2[i]) + k4t.as_slice()[i])
                    * sixth
        });
        omega.symmetrize();
        theta.symmetrize();
        SimState { omega, theta, t: t1 }
    }
}

/// Right-hand side (without dissipation) of the configured system at `state`.
pub fn rhs<T: Real>(state: &SimState<T>, cfg: &SimConfig) -> Result<(SpectralField<T>, SpectralField<T>)> {
    let mut st = Stepper::new(cfg, *state.grid())?;
    let mut dw = SpectralField::zeros(*state.grid());
    let mut dt = SpectralField::zeros(*state.grid());
    st.rhs(state.t, &state.omega, &state.theta, &mut dw, &mut dt);
    Ok((dw, dt))
}

pub fn cfl_limit<T: Real>(state: &SimState<T>, cfg: &SimConfig) -> Result<T> {
    Ok(Stepper::new(cfg, *state.grid())?.cfl_limit(state))
}

/// Advances `state` by `dt`, rejecting steps above the stability limit.
pub fn time_step<T: Real>(state: &SimState<T>, cfg: &SimConfig, dt: T) -> Result<SimState<T>> {
    if !(dt > T::zero()) {
        return Err(Error::StepRejected(format!("dt must be positive, got {dt}")));
    }
    let mut st = Stepper::new(cfg, *state.grid())?;
    let limit = st.cfl_limit(state);
    if dt > limit * (T::one() + T::lit(1e-12)) {
        return Err(Error::StepRejected(format!("dt = {dt} exceeds the stability limit {limit}")));
    }
    Ok(st.step(state, dt))
}
