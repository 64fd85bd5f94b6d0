use bsl_core::linear::{integrate_affine_mode, no_shear_eigenvalues, AffineProblem, NoShearSystem, Sampling};
use bsl_core::multiplier::{DissipationConfig, FrequencyMode};
use bsl_core::ode::{lin_spaced, IntegrationOptions};
use bsl_core::profile::TemperatureProfile;
use bsl_core::sim::{
    biot_savart, bootstrap_norms, initial_state, nonlinear_transport, read_snapshot, rhs, shear_split, simulate,
    time_step, write_snapshot, GridConfig, InitialData, SimConfig, SimState, Stepper,
};
use bsl_core::spectral::{SpectralField, SpectralGrid};
use bsl_core::{Complex, Error};
use bsl_oracles as oracle;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use std::f64::consts::PI;

type C = Complex<f64>;

fn random_field(g: SpectralGrid<f64>, kb: i64, jb: i64, seed: u64) -> SpectralField<f64> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut f = SpectralField::zeros(g);
    for k in 0..=kb {
        for j in -jb..=jb {
            if k == 0 && j <= 0 {
                continue;
            }
            f.set_real_pair(k, j, C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        }
    }
    f
}

fn eta(g: &SpectralGrid<f64>, k: i64, j: i64, t: f64) -> f64 {
    g.xi(j) - k as f64 * t
}

/// Velocity from the Biot–Savart symbols, written out independently.
fn velocity_oracle(w: &SpectralField<f64>, t: f64) -> (Vec<(i64, i64, C)>, Vec<(i64, i64, C)>) {
    let g = *w.grid();
    let mut v1 = Vec::new();
    let mut v2 = Vec::new();
    for (k, j, c) in w.iter_modes() {
        let e = eta(&g, k, j, t);
        let q = (k * k) as f64 + e * e;
        if q == 0.0 {
            continue;
        }
        v1.push((k, j, C::new(0.0, -e) * c / q));
        v2.push((k, j, C::new(0.0, k as f64) * c / q));
    }
    (v1, v2)
}

/// `v · ∇_t f` by direct convolution of the coefficient lists, restricted to the grid.
fn transport_oracle_with(f: &SpectralField<f64>, v1: &[(i64, i64, C)], v2: &[(i64, i64, C)], t: f64) -> SpectralField<f64> {
    let g = *f.grid();
    let mut out = SpectralField::zeros(g);
    for (k2, j2, c) in f.iter_modes() {
        if c.norm() == 0.0 {
            continue;
        }
        let dx = C::new(0.0, k2 as f64) * c;
        let dy = C::new(0.0, eta(&g, k2, j2, t)) * c;
        for &(k1, j1, a) in v1 {
            if g.contains(k1 + k2, j1 + j2) {
                let o = out.get(k1 + k2, j1 + j2);
                out.set(k1 + k2, j1 + j2, o + a * dx);
            }
        }
        for &(k1, j1, b) in v2 {
            if g.contains(k1 + k2, j1 + j2) {
                let o = out.get(k1 + k2, j1 + j2);
                out.set(k1 + k2, j1 + j2, o + b * dy);
            }
        }
    }
    out
}

fn max_diff(a: &SpectralField<f64>, b: &SpectralField<f64>) -> f64 {
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn cfg(nu: f64, eps: f64, profile: TemperatureProfile, n: usize, t_end: f64) -> SimConfig {
    SimConfig::new(nu, eps, profile, GridConfig::from_transform(n), t_end)
}

#[test]
fn biot_savart_examples() {
    let g = SpectralGrid::new(2, 4, 2.0 * PI).unwrap();
    let mut w = SpectralField::zeros(g);
    w.set(1, 0, C::new(1.0, 0.0));
    let (v1, v2) = biot_savart(&w, 0.0).unwrap();
    assert_eq!((v1.get(1, 0), v2.get(1, 0)), (C::new(0.0, 0.0), C::new(0.0, 1.0)));
    let (v1, v2) = biot_savart(&w, 10.0).unwrap();
    assert!((v1.get(1, 0) - C::new(0.0, 10.0 / 101.0)).norm() < 1e-16);
    assert!((v2.get(1, 0) - C::new(0.0, 1.0 / 101.0)).norm() < 1e-16);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn divergence_identity(seed in any::<u64>(), t in -20.0..50.0f64) {
        let g = SpectralGrid::new(5, 7, 9.0).unwrap();
        let w = random_field(g, 5, 7, seed);
        let (v1, v2) = biot_savart(&w, t).unwrap();
        for (k, j, a) in v1.iter_modes() {
            let div = C::new(0.0, k as f64) * a + C::new(0.0, eta(&g, k, j, t)) * v2.get(k, j);
            prop_assert!(div.norm() <= 1e-15 * (1.0 + w.get(k, j).norm()));
        }
    }

    #[test]
    fn shear_split_is_orthogonal(seed in any::<u64>()) {
        let g = SpectralGrid::new(4, 6, 5.0).unwrap();
        let f = random_field(g, 4, 6, seed);
        let (a, b) = shear_split(&f);
        let mut sum = a.clone();
        sum.axpy(1.0, &b).unwrap();
        prop_assert_eq!(&sum, &f);
        prop_assert!((a.l2_norm_sqr() + b.l2_norm_sqr() - f.l2_norm_sqr()).abs() < 1e-12 * f.l2_norm_sqr());
        let dot: f64 = a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x.conj() * y).re).sum();
        prop_assert!(dot.abs() < 1e-14);
    }

    #[test]
    fn transport_matches_direct_convolution(seed in any::<u64>(), t in 0.0..6.0f64) {
        let g = SpectralGrid::new(5, 6, 4.0 * PI).unwrap();
        let f = random_field(g, 5, 6, seed);
        let w = random_field(g, 5, 6, seed ^ 0x5eed);
        let v = biot_savart(&w, t).unwrap();
        let got = nonlinear_transport(&f, &v, t).unwrap();
        let (o1, o2) = velocity_oracle(&w, t);
        let want = transport_oracle_with(&f, &o1, &o2, t);
        prop_assert!(max_diff(&got, &want) < 1e-12 * (1.0 + t), "{}", max_diff(&got, &want));
        prop_assert!(got.hermitian_defect() < 1e-13);
        prop_assert!(got.get(0, 0).norm() < 1e-13);
    }
}

#[test]
fn transport_two_mode_example() {
    // v from ω = 2 cos(x) gives v₂ = -2 sin(x)... check against the oracle for one pair
    let g = SpectralGrid::new(4, 4, 2.0 * PI).unwrap();
    let mut w = SpectralField::zeros(g);
    w.set_real_pair(1, 0, C::new(1.0, 0.0));
    let mut f = SpectralField::zeros(g);
    f.set_real_pair(0, 1, C::new(0.5, 0.0));
    let v = biot_savart(&w, 0.0).unwrap();
    let got = nonlinear_transport(&f, &v, 0.0).unwrap();
    // v₂ = i e^{ix} + c.c. = -2 sin x, ∂y f = i·0.5 e^{iy} + c.c. = -sin y; product = 2 sin x sin y
    // = -(1/2)(e^{i(x+y)} - e^{i(x-y)} - e^{i(-x+y)} + e^{-i(x+y)})
    assert!((got.get(1, 1) - C::new(-0.5, 0.0)).norm() < 1e-14);
    assert!((got.get(1, -1) - C::new(0.5, 0.0)).norm() < 1e-14);
    assert!((got.l2_norm_sqr() - 1.0).abs() < 1e-13);
    let zero = (SpectralField::zeros(g), SpectralField::zeros(g));
    assert_eq!(nonlinear_transport(&f, &zero, 0.0).unwrap().l2_norm(), 0.0);
}

#[test]
fn transport_rejects_grid_mismatch() {
    let a = SpectralField::<f64>::zeros(SpectralGrid::new(2, 2, 1.0).unwrap());
    let b = SpectralField::<f64>::zeros(SpectralGrid::new(2, 3, 1.0).unwrap());
    let r = nonlinear_transport(&a, &(b.clone(), b), 0.0);
    assert!(matches!(r, Err(Error::GridMismatch(_))));
}

#[test]
fn shear_average_matches_physical_averaging() {
    let mut c = cfg(0.05, 1.0, TemperatureProfile::zero(), 26, 1.0);
    c.grid.ly = 4.0 * PI;
    let g = c.grid.build::<f64>().unwrap();
    let omega = random_field(g, 2, 3, 1);
    let theta = random_field(g, 2, 3, 2);
    let t = 0.8;
    let state = SimState::new(omega.clone(), theta.clone(), t).unwrap();
    let (_, dtheta) = rhs(&state, &c).unwrap();

    let (v1, v2) = velocity_oracle(&omega, t);
    let series = |list: &[(i64, i64, C)]| list.iter().map(|&(k, j, a)| (k, g.xi(j), a)).collect::<Vec<_>>();
    let (s1, s2) = (series(&v1), series(&v2));
    let mut dx = Vec::new();
    let mut dy = Vec::new();
    for (k, j, a) in theta.iter_modes() {
        dx.push((k, g.xi(j), C::new(0.0, k as f64) * a));
        dy.push((k, g.xi(j), C::new(0.0, eta(&g, k, j, t)) * a));
    }
    let prod = |x: f64, y: f64| {
        (oracle::eval_series(&s1, x, y) * oracle::eval_series(&dx, x, y)
            + oracle::eval_series(&s2, x, y) * oracle::eval_series(&dy, x, y))
        .re
    };
    for j in -6..=6i64 {
        let avg = oracle::naive_coefficient(prod, 16, 16, c.grid.ly, 0, g.xi(j));
        assert!((dtheta.get(0, j) + avg).norm() < 1e-12, "j {j}: {} vs {}", dtheta.get(0, j), -avg);
    }
}

#[test]
fn zero_data_stays_zero() {
    let c = cfg(0.1, 0.0, TemperatureProfile::cosine(1e-3, 1.0), 32, 2.0);
    let r = simulate::<f64>(&c).unwrap();
    assert_eq!(r.final_state.l2_norm(), 0.0);
    assert!(r.ledger.values.iter().all(|v| *v == 0.0));
    assert!(r.instability_at.is_none());
}

#[test]
fn linear_regime_matches_affine_mode() {
    let nu: f64 = 0.1;
    let alpha = nu.cbrt() / 200.0;
    let eps = 1e-8;
    let mut c = cfg(nu, eps, TemperatureProfile::affine(alpha), 32, 10.0);
    c.init = InitialData::Mode { k: 1, j: 8, omega: [1.0, 0.0], theta: [0.0, 0.5] };
    let g = c.grid.build::<f64>().unwrap();
    let mut state = initial_state::<f64>(&c, g).unwrap();
    let mut st = Stepper::new(&c, g).unwrap();
    let xi = g.xi(8);
    let p = AffineProblem::new(FrequencyMode::new(1, xi), alpha, nu, 10.0)
        .unwrap()
        .with_diss(DissipationConfig::full_vertical(nu).unwrap())
        .with_init(C::new(eps, 0.0), C::new(0.0, 0.5 * eps))
        .with_sampling(Sampling::Times(lin_spaced(1.0, 10.0, 10)))
        .with_options(IntegrationOptions::with_tolerances(1e-12, 1e-24));
    let aff = integrate_affine_mode(&p).unwrap();
    let mut checked = 0;
    for target in aff.states.iter().skip(1) {
        while state.t < target.t - 1e-12 {
            let dt = st.cfl_limit(&state).min(target.t - state.t);
            state = st.step(&state, dt);
        }
        let scale = target.omega.norm().max(target.theta.norm());
        assert!((state.omega.get(1, 8) - target.omega).norm() < 1e-4 * scale, "t {}", target.t);
        assert!((state.theta.get(1, 8) - target.theta).norm() < 1e-4 * scale);
        checked += 1;
    }
    assert_eq!(checked, 10);
}

#[test]
fn richardson_step_halving() {
    let mut c = cfg(0.02, 0.05, TemperatureProfile::cosine(0.05, 1.0), 32, 1.0);
    c.init = InitialData::Random { k_band: 3, xi_band: 2.0 };
    let g = c.grid.build::<f64>().unwrap();
    let s0 = initial_state::<f64>(&c, g).unwrap();
    let mut st = Stepper::new(&c, g).unwrap();
    let mut err = Vec::new();
    for h in [0.2, 0.1, 0.05] {
        let one = st.step(&s0, h);
        let mid = st.step(&s0, h / 2.0);
        let half = st.step(&mid, h / 2.0);
        let mut d = one.omega.clone();
        d.axpy(-1.0, &half.omega).unwrap();
        let mut e = one.theta.clone();
        e.axpy(-1.0, &half.theta).unwrap();
        err.push((d.l2_norm_sqr() + e.l2_norm_sqr()).sqrt());
    }
    let p1 = (err[0] / err[1]).log2();
    let p2 = (err[1] / err[2]).log2();
    assert!(p1 > 4.5 && p2 > 4.5, "observed local orders {p1}, {p2}");
}

#[test]
fn inviscid_transport_conserves_enstrophy() {
    let mut c = cfg(0.0, 0.2, TemperatureProfile::zero(), 32, 2.0);
    c.init = InitialData::Random { k_band: 3, xi_band: 2.0 };
    c.dt.max = 0.01;
    let g = c.grid.build::<f64>().unwrap();
    let s0 = initial_state::<f64>(&c, g).unwrap();
    let mut s0 = s0;
    s0.theta = SpectralField::zeros(g);
    let r = bsl_core::sim::simulate_from(&c, s0.clone()).unwrap();
    let drift = (r.final_state.omega.l2_norm() - s0.omega.l2_norm()).abs() / s0.omega.l2_norm();
    assert!(drift < 1e-8 * c.t_end, "relative drift {drift}");
    assert_eq!(r.final_state.theta.l2_norm(), 0.0);
}

#[test]
fn rayleigh_benard_growth_without_shear() {
    let alpha = -1.0;
    let mut c = cfg(0.0, 1e-6, TemperatureProfile::affine(alpha), 16, 12.0);
    c.shear = 0.0;
    c.init = InitialData::Mode { k: 1, j: 0, omega: [1.0, 0.0], theta: [0.0, 0.0] };
    c.output_every = 1.0;
    let r = simulate::<f64>(&c).unwrap();
    assert!(r.instability_at.is_none());
    assert!(r.outside_hypotheses.len() >= 2);
    let at = |t: f64| r.rows.iter().find(|row| (row.t - t).abs() < 1e-9).unwrap().omega_l2;
    let rate = (at(12.0) / at(6.0)).ln() / 6.0;
    let sys = NoShearSystem::new(FrequencyMode::new(1, 0.0), alpha, 0.0, 0.0).unwrap();
    let l1 = no_shear_eigenvalues(&sys).unwrap().0.re;
    assert!((rate - l1).abs() < 0.05 * l1, "{rate} vs {l1}");
}

#[test]
fn blow_up_is_reported() {
    let mut c = cfg(0.0, 1e-6, TemperatureProfile::affine(-4.0), 16, 20.0);
    c.shear = 0.0;
    c.init = InitialData::Mode { k: 1, j: 0, omega: [1.0, 0.0], theta: [0.0, 0.0] };
    let r = simulate::<f64>(&c).unwrap();
    let t = r.instability_at.expect("growth by 2 per unit time passes 1e6");
    assert!(t < 10.0);
    assert!(!r.verdict.pass);
}

#[test]
fn hermitian_symmetry_is_preserved() {
    let mut c = cfg(0.01, 0.1, TemperatureProfile::cosine(0.01, 1.0), 32, 1.0);
    c.init = InitialData::Random { k_band: 4, xi_band: 3.0 };
    let r = simulate::<f64>(&c).unwrap();
    assert!(r.final_state.omega.hermitian_defect() < 1e-13);
    assert!(r.final_state.theta.hermitian_defect() < 1e-13);
    assert!(r.final_state.omega.get(0, 0).norm() < 1e-14);
}

#[test]
fn time_step_policy() {
    let c = cfg(0.1, 0.01, TemperatureProfile::affine(0.01), 16, 1.0);
    let g = c.grid.build::<f64>().unwrap();
    let s = initial_state::<f64>(&c, g).unwrap();
    assert!(matches!(time_step(&s, &c, 0.0), Err(Error::StepRejected(_))));
    assert!(matches!(time_step(&s, &c, 1.0), Err(Error::StepRejected(_))));
    let next = time_step(&s, &c, 0.01).unwrap();
    assert!((next.t - 0.01).abs() < 1e-15);
}

fn ledger_oracle(state: &SimState<f64>, n: u32, nu: f64) -> [f64; 12] {
    let g = state.grid();
    let t = state.t;
    let cut = nu.powf(-1.0 / 3.0);
    let mut v = [0.0; 12];
    for k in -(g.k_max() as i64)..=g.k_max() as i64 {
        for j in -(g.j_max() as i64)..=g.j_max() as i64 {
            let xi = g.xi(j);
            let w = (1.0 + (k * k) as f64 + xi * xi).powi(n as i32);
            let o2 = state.omega.get(k, j).norm_sqr();
            let q2 = state.theta.get(k, j).norm_sqr();
            if k == 0 {
                let h0 = xi.abs().min(cut);
                v[8] += w * o2;
                v[9] += nu * w * xi * xi * o2;
                v[10] += w * h0 * h0 * q2;
                v[11] += nu * w * h0 * h0 * xi * xi * q2;
                continue;
            }
            let kf = k as f64;
            let m = oracle::multiplier_a(t, xi, kf) * oracle::multiplier_b(t, xi, kf, cut);
            let e = xi - kf * t;
            let h2 = kf * kf + (e * e).min(cut * cut);
            let ind = if e.abs() <= kf.abs() { 1.0 } else { 0.0 };
            for (base, amp) in [(0, m * m * o2), (4, h2 * m * m * q2)] {
                v[base] += w * amp;
                v[base + 1] += nu * w * e * e * amp;
                v[base + 2] += nu * w * ind * amp;
                v[base + 3] += w * amp / (kf * kf + e * e);
            }
        }
    }
    v
}

#[test]
fn ledger_matches_brute_force() {
    let g = SpectralGrid::new(5, 6, 4.0 * PI).unwrap();
    for (seed, t) in [(1u64, 0.0), (2, 1.3), (3, 7.5)] {
        let s = SimState::new(random_field(g, 5, 6, seed), random_field(g, 5, 6, seed + 10), t).unwrap();
        let got = bootstrap_norms(&s, 3, 0.05, 1.0);
        let want = ledger_oracle(&s, 3, 0.05);
        for i in 0..12 {
            assert!((got.values[i] - want[i]).abs() <= 1e-12 * want[i].abs().max(1e-300), "entry {i}: {} vs {}", got.values[i], want[i]);
        }
    }
}

#[test]
fn ledger_entries_are_nondecreasing() {
    let mut c = cfg(0.05, 1e-3, TemperatureProfile::cosine(1e-3, 1.0), 32, 3.0);
    c.output_every = 0.1;
    let r = simulate::<f64>(&c).unwrap();
    for w in r.rows.windows(2) {
        for i in 0..12 {
            assert!(w[1].ledger[i] >= w[0].ledger[i] && w[0].ledger[i] >= 0.0);
        }
    }
}

#[test]
fn snapshot_round_trip() {
    let mut c = cfg(0.05, 1e-2, TemperatureProfile::affine(0.001), 16, 0.3);
    c.seed = 9;
    let r = simulate::<f64>(&c).unwrap();
    let dir = tempdir();
    write_snapshot(&r.final_state, &dir, "final").unwrap();
    let back: SimState<f64> = read_snapshot(&dir, "final").unwrap();
    assert_eq!(back, r.final_state);
    std::fs::remove_dir_all(dir).ok();
}

fn tempdir() -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("bsl-core-it-{}-{}", std::process::id(), rand::random::<u32>()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn runs_are_deterministic() {
    let c = cfg(0.05, 1e-3, TemperatureProfile::cosine(1e-3, 1.0), 32, 1.0);
    let a = simulate::<f64>(&c).unwrap();
    let b = simulate::<f64>(&c).unwrap();
    assert_eq!(a.rows, b.rows);
    assert_eq!(a.final_state, b.final_state);
}

#[test]
fn f32_simulation_runs() {
    let c = cfg(0.05, 1e-3, TemperatureProfile::affine(1e-3), 16, 0.5);
    let r = simulate::<f32>(&c).unwrap();
    let d = simulate::<f64>(&c).unwrap();
    let (a, b) = (r.rows.last().unwrap().omega_l2, d.rows.last().unwrap().omega_l2);
    assert!((a - b).abs() < 1e-5 * b);
}
