use super::ledger::{bootstrap_norms, BootstrapLedger};
use super::stepper::Stepper;
use super::{InitialData, SimConfig, SimState};
use crate::error::{Error, Result};
use crate::multiplier::sobolev_weight;
use crate::spectral::{SpectralField, SpectralGrid};
use crate::{Complex, Real};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// One line of the time series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimRow {
    pub t: f64,
    pub ledger: [f64; 12],
    pub omega_hn: f64,
    pub dxtheta_hn: f64,
    pub omega_l2: f64,
    pub theta_l2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    /// `sup_t (‖ω‖²_{H^N} + ν^{-1}‖∂x θ‖²_{H^N})` over its initial value.
    pub energy_ratio: f64,
    /// `10 ν^{-2/3}`
    pub energy_bound: f64,
    pub pass: bool,
    /// `sup_t ‖ω‖_{H^N} / (ν^{-1/3} ε)`, to compare with 10.
    pub omega_ratio: f64,
    /// `sup_t ‖∂x θ‖_{H^N} / ε`, to compare with 10.
    pub dxtheta_ratio: f64,
    pub ledger_blocks: [f64; 4],
    pub ledger_thresholds: [f64; 4],
    pub ledger_within: [bool; 4],
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport<T> {
    pub rows: Vec<SimRow>,
    pub ledger: BootstrapLedger<T>,
    pub verdict: Verdict,
    /// Time at which the norm exceeded the blow-up factor times its initial value.
    pub instability_at: Option<f64>,
    pub steps: usize,
    pub min_dt: f64,
    pub final_state: SimState<T>,
    pub small_data_regime: bool,
    /// `t_end` exceeds `xi_max / shear`, after which the `k = 1` critical layer has left the band.
    pub beyond_resolved_horizon: bool,
    pub outside_hypotheses: Vec<String>,
}

fn hn_norms<T: Real>(state: &SimState<T>, n: u32) -> (T, T) {
    let g = state.grid();
    let mut w2 = T::zero();
    let mut d2 = T::zero();
    for idx in 0..g.len() {
        let (k, j) = g.mode_at(idx);
        let w = sobolev_weight(n, k, g.xi(j));
        let kk = T::lit((k * k) as f64);
        w2 = w2 + w * state.omega.as_slice()[idx].norm_sqr();
        d2 = d2 + w * kk * state.theta.as_slice()[idx].norm_sqr();
    }
    (w2.sqrt(), d2.sqrt())
}

fn random_pairs<T: Real>(
    grid: &SpectralGrid<T>,
    k_band: usize,
    j_band: i64,
    skip_k0: bool,
    rng: &mut ChaCha8Rng,
) -> SpectralField<T> {
    let mut f = SpectralField::zeros(*grid);
    let kb = k_band.min(grid.k_max()) as i64;
    let jb = j_band.min(grid.j_max() as i64);
    for k in 0..=kb {
        for j in -jb..=jb {
            if k == 0 && (j <= 0 || skip_k0) {
                continue;
            }
            let re: f64 = rng.gen_range(-1.0..1.0);
            let im: f64 = rng.gen_range(-1.0..1.0);
            f.set_real_pair(k, j, Complex::new(T::lit(re), T::lit(im)));
        }
    }
    f
}

/// Initial perturbation described by `cfg.init`, scaled by `cfg.epsilon`.
pub fn initial_state<T: Real>(cfg: &SimConfig, grid: SpectralGrid<T>) -> Result<SimState<T>> {
    let eps = T::lit(cfg.epsilon);
    let mut state = SimState::zeros(grid, T::zero());
    if cfg.epsilon == 0.0 {
        return Ok(state);
    }
    match &cfg.init {
        InitialData::Random { k_band, xi_band } => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let j_band = (T::lit(*xi_band) / grid.dxi()).floor().to_f64_lossy() as i64;
            let mut w = random_pairs(&grid, *k_band, j_band, false, &mut rng);
            let mut q = random_pairs(&grid, *k_band, j_band, true, &mut rng);
            let tmp = SimState { omega: w.clone(), theta: q.clone(), t: T::zero() };
            let (wn, dn) = hn_norms(&tmp, cfg.n);
            let half = eps * T::lit(0.5);
            if wn > T::zero() {
                w.scale(half / wn);
            }
            if dn > T::zero() {
                // ν^{-1/2} ‖∂x θ‖ = ε/2
                let nu = T::lit(cfg.nu);
                let target = if nu > T::zero() { half * nu.sqrt() } else { half };
                q.scale(target / dn);
            }
            state.omega = w;
            state.theta = q;
        }
        InitialData::Mode { k, j, omega, theta } => {
            if !grid.contains(*k, *j) {
                return Err(Error::Config(format!("initial mode ({k}, {j}) is outside the grid")));
            }
            if *k == 0 && *j == 0 {
                return Err(Error::Config("initial mode must not be the mean".into()));
            }
            let c = |v: &[f64; 2]| Complex::new(T::lit(v[0]), T::lit(v[1])) * eps;
            state.omega.set_real_pair(*k, *j, c(omega));
            state.theta.set_real_pair(*k, *j, c(theta));
        }
    }
    Ok(state)
}

fn row<T: Real>(state: &SimState<T>, ledger: &BootstrapLedger<T>, n: u32) -> SimRow {
    let (w, d) = hn_norms(state, n);
    let mut l = [0.0; 12];
    for (o, v) in l.iter_mut().zip(ledger.values.iter()) {
        *o = v.to_f64_lossy();
    }
    SimRow {
        t: state.t.to_f64_lossy(),
        ledger: l,
        omega_hn: w.to_f64_lossy(),
        dxtheta_hn: d.to_f64_lossy(),
        omega_l2: state.omega.l2_norm().to_f64_lossy(),
        theta_l2: state.theta.l2_norm().to_f64_lossy(),
    }
}

/// Runs the configured simulation from [`initial_state`] to `t_end`.
pub fn simulate<T: Real>(cfg: &SimConfig) -> Result<SimReport<T>> {
    let grid = cfg.grid.build::<T>()?;
    let state = initial_state(cfg, grid)?;
    simulate_from(cfg, state)
}

/// Same as [`simulate`] from a given state.
pub fn simulate_from<T: Real>(cfg: &SimConfig, mut state: SimState<T>) -> Result<SimReport<T>> {
    let grid = *state.grid();
    let mut stepper = Stepper::new(cfg, grid)?;
    let nu = T::lit(cfg.nu);
    let shear = T::lit(cfg.shear);
    let t_end = T::lit(cfg.t_end);
    let mut ledger = BootstrapLedger::new();
    ledger.update(bootstrap_norms(&state, cfg.n, nu, shear));

    let theta_scale = if cfg.nu > 0.0 { 1.0 / cfg.nu } else { 1.0 };
    let energy = |r: &SimRow| r.omega_hn * r.omega_hn + theta_scale * r.dxtheta_hn * r.dxtheta_hn;
    let first = row(&state, &ledger, cfg.n);
    let e0 = energy(&first);
    let l0 = first.omega_l2.hypot(first.theta_l2);
    let mut e_max = e0;
    let mut w_max = first.omega_hn;
    let mut d_max = first.dxtheta_hn;
    let mut rows = vec![first];
    let mut next_out = cfg.output_every;
    let mut steps = 0;
    let mut min_dt = f64::INFINITY;
    let mut instability_at = None;

    while state.t < t_end {
        let remaining = t_end - state.t;
        let mut dt = stepper.cfl_limit(&state);
        if remaining <= dt * T::lit(1.000001) {
            dt = remaining;
        }
        state = stepper.step(&state, dt);
        steps += 1;
        min_dt = min_dt.min(dt.to_f64_lossy());
        if !state.is_finite() {
            return Err(Error::Integration { t: state.t.to_f64_lossy(), reason: "non-finite coefficients".into() });
        }
        ledger.update(bootstrap_norms(&state, cfg.n, nu, shear));
        let r = row(&state, &ledger, cfg.n);
        e_max = e_max.max(energy(&r));
        w_max = w_max.max(r.omega_hn);
        d_max = d_max.max(r.dxtheta_hn);
        let blown = l0 > 0.0 && r.omega_l2.hypot(r.theta_l2) > cfg.blowup_factor * l0;
        let at_end = state.t >= t_end;
        if r.t >= next_out - 1e-12 || at_end || blown {
            rows.push(r);
            while next_out <= r.t + 1e-12 {
                next_out += cfg.output_every;
            }
        }
        if blown {
            instability_at = Some(r.t);
            break;
        }
    }

    let eps = cfg.epsilon;
    let energy_bound = 10.0 * cfg.nu.powf(-2.0 / 3.0);
    let energy_ratio = if e0 > 0.0 { e_max / e0 } else { 0.0 };
    let blocks = ledger.blocks().map(|b| b.to_f64_lossy());
    let thresholds = BootstrapLedger::thresholds(T::lit(eps), nu).map(|b| b.to_f64_lossy());
    let within = ledger.within(T::lit(eps), nu);
    let scale = |x: f64, d: f64| if d > 0.0 { x / d } else { 0.0 };
    let verdict = Verdict {
        energy_ratio,
        energy_bound,
        pass: instability_at.is_none() && energy_ratio <= energy_bound,
        omega_ratio: scale(w_max, cfg.nu.powf(-1.0 / 3.0) * eps),
        dxtheta_ratio: scale(d_max, eps),
        ledger_blocks: blocks,
        ledger_thresholds: thresholds,
        ledger_within: within,
    };
    let horizon = if cfg.shear > 0.0 { grid.xi_max().to_f64_lossy() / cfg.shear } else { f64::INFINITY };
    Ok(SimReport {
        rows,
        ledger,
        verdict,
        instability_at,
        steps,
        min_dt,
        final_state: state,
        small_data_regime: cfg.small_data_regime(),
        beyond_resolved_horizon: cfg.t_end > horizon,
        outside_hypotheses: cfg.outside_hypotheses(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::TemperatureProfile;
    use crate::sim::GridConfig;

    fn small_cfg(eps: f64) -> SimConfig {
        let mut c = SimConfig::new(0.1, eps, TemperatureProfile::affine(0.01), GridConfig::from_transform(16), 1.0);
        c.grid.ly = 2.0 * std::f64::consts::PI;
        c.output_every = 0.25;
        c
    }

    #[test]
    fn zero_data_stays_zero() {
        let r = simulate::<f64>(&small_cfg(0.0)).unwrap();
        assert_eq!(r.final_state.l2_norm(), 0.0);
        assert!(r.ledger.values.iter().all(|v| *v == 0.0));
        assert!(r.instability_at.is_none());
        assert_eq!(r.rows.last().unwrap().t, 1.0);
    }

    #[test]
    fn random_data_is_normalised() {
        let cfg = small_cfg(1e-3);
        let s = initial_state::<f64>(&cfg, cfg.grid.build().unwrap()).unwrap();
        let (w, d) = hn_norms(&s, cfg.n);
        assert!((w - 5e-4).abs() < 1e-15);
        assert!((d / cfg.nu.sqrt() - 5e-4).abs() < 1e-15);
        assert_eq!(s.omega.get(0, 0), Complex::new(0.0, 0.0));
        assert!(s.omega.hermitian_defect() == 0.0 && s.theta.hermitian_defect() == 0.0);
        for j in -5..=5 {
            assert_eq!(s.theta.get(0, j), Complex::new(0.0, 0.0));
        }
        let again = initial_state::<f64>(&cfg, cfg.grid.build().unwrap()).unwrap();
        assert_eq!(s, again);
    }
}
