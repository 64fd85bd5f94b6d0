//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails or exceeds its runtime budget.

use bsl::config::{CoupledParams, ThresholdParams};
use bsl::{run_experiment, EnvelopeKind, ExperimentConfig, ModePanel, Params, Value};
use bsl_core::linear::{
    fit_growth_exponent, integrate_schrodinger, inviscid_exponents, no_shear_eigenvalues, orr_ratio, NoShearSystem,
};
use bsl_core::multiplier::{multiplier_a, multiplier_b, CutoffConfig, FrequencyMode};
use bsl_core::ode::{integrate, lin_spaced, IntegrationOptions, LawsonSystem};
use bsl_core::profile::{admit, TemperatureProfile};
use bsl_core::sim::{initial_state, simulate, GridConfig, SimConfig, SimState, Stepper};
use bsl_core::spectral::{SpectralField, SpectralGrid};
use bsl_core::Complex;
use bsl_oracles as oracle;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};

type C = Complex<f64>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

struct Matrix2([[C; 2]; 2]);

impl LawsonSystem<f64> for Matrix2 {
    fn dim(&self) -> usize {
        2
    }
    fn decay(&self, _: f64, _: f64, out: &mut [f64]) {
        out.fill(0.0);
    }
    fn nonstiff(&self, _: f64, y: &[C], dy: &mut [C]) {
        let m = &self.0;
        dy[0] = m[0][0] * y[0] + m[0][1] * y[1];
        dy[1] = m[1][0] * y[0] + m[1][1] * y[1];
    }
}

fn eigen_dichotomy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_eig: f64 = 0.0;
    let mut worst_rate: f64 = 0.0;
    let mut growth_cases = 0;
    let opts = IntegrationOptions::with_tolerances(1e-11, 1e-14);
    for i in 0..200 {
        let k = rng.gen_range(1..=5);
        let xi = rng.gen_range(-2.0..2.0);
        let alpha = rng.gen_range(-3.0..3.0);
        let coef = rng.gen_range(0.0..0.5);
        let (nu, mu) = if i % 2 == 0 { (coef, 0.0) } else { (0.0, coef) };
        let sys = NoShearSystem::new(FrequencyMode::new(k, xi), alpha, nu, mu).unwrap();
        let (l1, l2) = no_shear_eigenvalues(&sys).unwrap();
        let o = oracle::eigenvalues_2x2(sys.matrix());
        let scale = 1.0 + l1.norm().max(l2.norm());
        let d = ((l1 - o[0]).norm().max((l2 - o[1]).norm())).min((l1 - o[1]).norm().max((l2 - o[0]).norm()));
        worst_eig = worst_eig.max(d / scale);
        if alpha < 0.0 {
            growth_cases += 1;
            let m = sys.matrix();
            // start on the growing eigenvector so the rate over [0, 20] is free of transients
            let v = if (m[0][1]).norm() >= (m[1][0]).norm() {
                [m[0][1], l1 - m[0][0]]
            } else {
                [l1 - m[1][1], m[1][0]]
            };
            let mut s = Vec::new();
            integrate(&Matrix2(m), 0.0, &v, &[20.0], &opts, |_, _, y| {
                s.push((y[0].norm_sqr() + y[1].norm_sqr()).sqrt())
            }, |_, _| {})
            .unwrap();
            let rate = (s[0] / (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()).ln() / 20.0;
            worst_rate = worst_rate.max((rate - l1.re).abs() / l1.re);
        }
    }
    outcome(
        worst_eig <= 1e-12 && worst_rate <= 0.01,
        format!("max eigenvalue deviation {worst_eig:.2e} (tol 1e-12), max growth-rate error {:.3}% over {growth_cases} unstable cases (tol 1%)", 100.0 * worst_rate),
    )
}

fn inviscid_exponent_fits() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for alpha in [-6.0, -2.0, -0.5, 0.2] {
        let tr = integrate_schrodinger(alpha, 0.0, 1.0, 1e4, 1e-11).unwrap();
        let beta = fit_growth_exponent(&tr, (1e2, 1e4)).unwrap();
        let r = inviscid_exponents(alpha);
        let want = 0.5 * (1.0 + C::new(1.0 - 4.0 * alpha, 0.0).sqrt().re);
        let err = (beta - want).abs() / want;
        pass &= err <= 0.02 && (r.beta1.re - want).abs() < 1e-14;
        parts.push(format!("alpha {alpha}: {beta:.4} vs {want:.4}"));
    }
    let r = inviscid_exponents(-2.0);
    pass &= r.c == 1.5 && r.v2_marginal;
    outcome(pass, format!("{}; alpha -2 gives c = {}", parts.join(", "), r.c))
}

fn multiplier_quadrature() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let k = rng.gen_range(1..=6) * if rng.gen_bool(0.5) { 1 } else { -1 };
        let xi = rng.gen_range(-30.0..30.0);
        let t = rng.gen_range(0.0..40.0);
        let c = rng.gen_range(1.0..25.0);
        let mode = FrequencyMode::new(k, xi);
        let a = multiplier_a(t, mode).unwrap();
        let b = multiplier_b(t, mode, CutoffConfig::new(c).unwrap()).unwrap();
        let kf = k as f64;
        worst = worst.max((a - oracle::multiplier_a(t, xi, kf)).abs());
        worst = worst.max((b - oracle::multiplier_b(t, xi, kf, c)).abs());
    }
    outcome(worst <= 1e-10, format!("max |closed form - quadrature| = {worst:.2e} over 10^4 points (tol 1e-10)"))
}

fn desk_scale_good() -> Outcome {
    let panel = ModePanel::default();
    let mut pass = true;
    let mut worst_uniform: f64 = 0.0;
    let mut worst_env: f64 = 0.0;
    let mut count = 0;
    for nu in [1e-2f64, 1e-3, 1e-4] {
        for sign in [-1.0, 1.0] {
            let alpha = sign * nu.cbrt() / 100.0;
            for r in panel.evaluate(nu, alpha).unwrap() {
                count += 1;
                pass &= r.pass && r.pass_display && r.pass_uniform;
                worst_env = worst_env.max(r.ratio / r.envelope.min(r.display_envelope));
                worst_uniform = worst_uniform.max(r.ratio / r.uniform_envelope);
            }
        }
    }
    outcome(
        pass,
        format!("{count} trajectories; max ratio / envelope = {worst_env:.3e}, max ratio / (2 e^pi (1 + nu^(-2/3))^2) = {worst_uniform:.3e}"),
    )
}

fn affine_admissibility() -> Outcome {
    let mut pass = true;
    let mut worst: f64 = 0.0;
    for alpha in [-0.37, 1e-3, -2.5e-4, 0.9] {
        for n in 0..=8u32 {
            for nu in [1e-2, 1e-4] {
                let r = admit(&TemperatureProfile::affine(alpha), n, nu).unwrap();
                let main = alpha.abs() * 2f64.powi(n as i32);
                let e1 = (r.value_main - main).abs() / main;
                let e2 = (r.value_sobolev - alpha.abs()).abs() / alpha.abs();
                worst = worst.max(e1).max(e2);
                pass &= e1 <= 2.0 * f64::EPSILON && e2 <= 2.0 * f64::EPSILON;
            }
        }
    }
    outcome(pass, format!("max relative deviation from |alpha| 2^N and |alpha|: {worst:.1e}"))
}

fn ghost_energy_monotone() -> Outcome {
    let nu = 1e-2f64;
    let n = 2u32;
    // the Sobolev condition of a cos y profile is 2^{N+5} a
    let a = 0.9 * 4f64.powi(-(n as i32)) * nu.cbrt() / 2f64.powi(n as i32 + 5);
    let profile = TemperatureProfile::cosine(a, 1.0);
    let params = CoupledParams {
        nu,
        profile: profile.clone(),
        n,
        alpha_hat: None,
        ks: vec![1, 2],
        dxi: 0.25,
        t_end: Some(3.0 * nu.powf(-1.0 / 3.0)),
        j_max: None,
        samples: 141,
        xi_band: 2.0,
        rtol: 1e-10,
        monotone_tol: 1e-3,
        assert_stable: true,
    };
    let mut cfg = ExperimentConfig::new(Params::Coupled(params));
    cfg.seed = 11;
    let r = run_experiment(&cfg).unwrap();
    let s = &r.summary;
    let admissible = s["pass_sobolev"] == Value::Bool(true);
    let monotone = s["monotone"] == Value::Bool(true);
    outcome(
        admissible && monotone && r.failures.is_empty(),
        format!(
            "a = {a:.3e} (Sobolev condition {}), max relative increase per sample {:.2e} (tol 1e-3)",
            if admissible { "passes" } else { "fails" },
            s["max_relative_increase"].as_f64().unwrap_or(f64::NAN)
        ),
    )
}

fn orr_mechanism() -> Outcome {
    let g = SpectralGrid::new(4, 600, 2.0 * std::f64::consts::PI).unwrap();
    let mut worst: f64 = 0.0;
    for (k, j) in [(1i64, 0i64), (1, 3), (1, 50), (2, 40), (3, 150), (4, 399), (1, 100), (2, -7)] {
        let mut f = SpectralField::zeros(g);
        f.set_real_pair(k, j, C::new(1.0, 0.5));
        for t in lin_spaced(1.0, 100.0, 1981) {
            worst = worst.max(orr_ratio(&f, t).unwrap());
        }
    }
    outcome(worst <= 1.1, format!("max t ||v1|| / ||omega||_H1 = {worst:.4} (bound 1.1)"))
}

fn diff_norm(a: &SimState<f64>, b: &SimState<f64>) -> f64 {
    let mut w = a.omega.clone();
    w.axpy(-1.0, &b.omega).unwrap();
    let mut q = a.theta.clone();
    q.axpy(-1.0, &b.theta).unwrap();
    (w.l2_norm_sqr() + q.l2_norm_sqr()).sqrt()
}

/// Fixed-step runs so the nonlinear and linear trajectories share the time grid.
fn fixed_run(cfg: &SimConfig, dt: f64) -> SimState<f64> {
    let grid = cfg.grid.build::<f64>().unwrap();
    let mut s = initial_state::<f64>(cfg, grid).unwrap();
    let mut st = Stepper::new(cfg, grid).unwrap();
    let steps = (cfg.t_end / dt).round() as usize;
    for _ in 0..steps {
        s = st.step(&s, dt);
    }
    s
}

fn nonlinear_small_data() -> Outcome {
    let nu = 0.1f64;
    let eps = 1e-4 * nu * nu;
    let grid = GridConfig::from_transform(128);
    let horizon = grid.build::<f64>().unwrap().xi_max();
    let t_end = horizon.min(5.0);
    let slope = nu.cbrt() / 200.0;
    let n = 5;
    // cosine amplitude at half the admissible size
    let unit = admit(&TemperatureProfile::cosine(1.0, 1.0), n, nu).unwrap();
    let amp = 0.5 * (unit.threshold_sobolev / unit.value_sobolev).min(unit.threshold_main / unit.value_main);
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, profile) in [("affine", TemperatureProfile::affine(slope)), ("cosine", TemperatureProfile::cosine(amp, 1.0))] {
        let adm = admit(&profile, n, nu).unwrap();
        let mut cfg = SimConfig::new(nu, eps, profile, grid, t_end);
        cfg.n = n;
        cfg.seed = 5;
        let r = simulate::<f64>(&cfg).unwrap();
        let v = &r.verdict;
        let within = v.ledger_within.iter().all(|b| *b);
        pass &= within && v.pass && r.instability_at.is_none();
        // the affine slope is fixed by the criterion and lies outside the N = 5 conditions
        if name == "cosine" {
            pass &= adm.pass();
        }
        parts.push(format!(
            "{name}: admissible {}, ledger/threshold max {:.3}, energy ratio {:.3} <= {:.1}, raw ratios {:.3} {:.3}",
            adm.pass(),
            v.ledger_blocks.iter().zip(&v.ledger_thresholds).map(|(b, t)| b / t).fold(0.0, f64::max),
            v.energy_ratio,
            v.energy_bound,
            v.omega_ratio,
            v.dxtheta_ratio
        ));
    }
    let dt = 0.02;
    let dev = |e: f64| {
        let mut c = SimConfig::new(nu, e, TemperatureProfile::affine(slope), grid, t_end);
        c.n = n;
        c.seed = 5;
        let full = fixed_run(&c, dt);
        c.nonlinear = false;
        diff_norm(&full, &fixed_run(&c, dt))
    };
    let factor = dev(eps) / dev(eps / 2.0);
    pass &= (factor - 4.0).abs() <= 0.8;
    parts.push(format!("linearization factor {factor:.3} (4 +- 20%)"));
    outcome(pass, format!("128x128, t_end {t_end:.2}; {}", parts.join("; ")))
}

fn threshold_scaling() -> Outcome {
    let nus = vec![1e-2, 3e-3, 1e-3, 3e-4, 1e-4];
    let mut pass = true;
    let mut parts = Vec::new();
    for env in [EnvelopeKind::Display, EnvelopeKind::Proof] {
        let p = ThresholdParams {
            nu: nus.clone(),
            tol: 1e-4,
            bracket: [-1.0, 0.0],
            safety: 2.0,
            panel: ModePanel::default(),
            envelope: env,
        };
        let r = run_experiment(&ExperimentConfig::new(Params::Threshold(p))).unwrap();
        let s = &r.summary;
        let ok = r.failures.is_empty()
            && s["all_contain_certified"] == Value::Bool(true)
            && s["all_certified_stable"] == Value::Bool(true);
        // the default predicate decides the criterion; the proof envelope is reported alongside
        if env == EnvelopeKind::Display {
            pass &= ok;
        }
        let stars: Vec<String> =
            r.table.column("alpha_star").unwrap().map(|v| format!("{:.4}", v.as_f64().unwrap_or(f64::NAN))).collect();
        let slope = match (s.get("slope"), s.get("slope_ci_low"), s.get("slope_ci_high")) {
            (Some(a), Some(b), Some(c)) => format!(
                "slope {:.3} [95% CI {:.3}, {:.3}]",
                a.as_f64().unwrap(),
                b.as_f64().unwrap(),
                c.as_f64().unwrap()
            ),
            _ => format!("slope not fitted ({})", s.get("fit").map(|v| v.to_string()).unwrap_or_default()),
        };
        parts.push(format!("{env:?} envelope: alpha* = [{}], one-sided {}, {slope}", stars.join(", "), if ok { "holds" } else { "VIOLATED" }));
    }
    outcome(pass, parts.join("; "))
}

fn main() {
    let criteria: Vec<(u32, &str, Duration, fn() -> Outcome)> = vec![
        (1, "eigenvalue dichotomy", Duration::from_secs(10), eigen_dichotomy),
        (2, "inviscid exponents", Duration::from_secs(30), inviscid_exponent_fits),
        (3, "multiplier closed forms", Duration::from_secs(10), multiplier_quadrature),
        (4, "affine mode envelopes", Duration::from_secs(300), desk_scale_good),
        (5, "affine admissibility reduction", Duration::from_secs(1), affine_admissibility),
        (6, "ghost energy for cosine profile", Duration::from_secs(120), ghost_energy_monotone),
        (7, "Orr mechanism", Duration::from_secs(5), orr_mechanism),
        (8, "nonlinear small data", Duration::from_secs(600), nonlinear_small_data),
        (9, "threshold scaling", Duration::from_secs(900), threshold_scaling),
    ];
    let filter: Option<u32> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for (id, name, budget, run) in criteria {
        if filter.is_some_and(|f| f != id) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        let took = start.elapsed();
        let ok = o.pass && took <= budget;
        if !ok {
            failed += 1;
        }
        println!(
            "{} criterion {id} ({name}): {} [{:.2} s, budget {} s]",
            if ok { "PASS" } else { "FAIL" },
            o.detail,
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
