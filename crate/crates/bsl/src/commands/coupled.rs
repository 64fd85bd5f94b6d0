use crate::config::CoupledParams;
use crate::{point_seed, CommandOutput, Context, HarnessError, PointFailure, Result, Table, Value};
use bsl_core::linear::{ghost_energy, integrate_coupled_linear, CoupledColumn, CoupledGrid, GhostEnergyConfig};
use bsl_core::multiplier::DissipationConfig;
use bsl_core::ode::{lin_spaced, IntegrationOptions};
use bsl_core::profile::{admit, profile_spectrum};
use bsl_core::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random `(ω̂, ∂x θ̂)` columns supported in `|xi| <= xi_band`, with `∂x θ̂` ten times smaller.
pub fn random_columns(ks: &[i64], j_max: usize, dxi: f64, xi_band: f64, seed: u64) -> Vec<CoupledColumn<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ks.iter()
        .map(|&k| {
            let mut col = CoupledColumn::zeros(k, j_max);
            for j in -(j_max as i64)..=j_max as i64 {
                if (j as f64 * dxi).abs() <= xi_band {
                    let i = col.index(j).expect("j in range");
                    col.omega[i] = Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    col.p[i] = Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * 0.1;
                }
            }
            col
        })
        .collect()
}

fn evolve(p: &CoupledParams, ctx: &Context<'_>) -> Result<CommandOutput> {
    let nu = p.nu;
    let t_end = p.t_end.unwrap_or(3.0 * nu.powf(-1.0 / 3.0));
    let j_max = p.j_max.unwrap_or(((3.0 * t_end + 6.0) / p.dxi).ceil() as usize);
    let spec = profile_spectrum::<f64>(&p.profile)?;
    let grid = CoupledGrid::new(p.ks.clone(), j_max, p.dxi)?;
    let init = random_columns(&p.ks, j_max, p.dxi, p.xi_band, point_seed(ctx.seed, 0));
    let times = lin_spaced(0.0, t_end, p.samples);
    let diss = DissipationConfig::full_vertical(nu)?;
    let opts = IntegrationOptions::with_tolerances(p.rtol, 1e-14);
    let tr = ctx.pool.install(|| integrate_coupled_linear(&spec, &grid, diss, &init, &times, &opts))?;
    let cfg = GhostEnergyConfig::new(p.n, nu, p.alpha_hat.unwrap_or(nu.cbrt()));
    let energy: Vec<f64> = tr.samples.iter().map(|s| ghost_energy(s, p.dxi, &cfg)).collect();
    let e0 = energy[0];
    let mut table = Table::new(&["t", "ghost_energy", "ratio_to_initial", "relative_change"]);
    let mut worst = f64::NEG_INFINITY;
    for (i, (s, e)) in tr.samples.iter().zip(&energy).enumerate() {
        let change = if i == 0 { 0.0 } else { (e - energy[i - 1]) / energy[i - 1] };
        worst = worst.max(change);
        table.push(vec![s.t.into(), (*e).into(), (e / e0).into(), change.into()]);
    }
    let monotone = worst <= p.monotone_tol;
    let adm = admit(&p.profile, p.n, nu)?;
    let mut out = CommandOutput { table, ..Default::default() };
    let s = &mut out.summary;
    s.insert("t_end".into(), t_end.into());
    s.insert("j_max".into(), j_max.into());
    s.insert("padding".into(), tr.padding.into());
    s.insert("max_relative_increase".into(), worst.into());
    s.insert("monotone".into(), monotone.into());
    s.insert("pass_sobolev".into(), adm.pass_sobolev.into());
    s.insert("pass_main".into(), adm.pass_main.into());
    s.insert("value_sobolev".into(), adm.value_sobolev.into());
    s.insert("threshold_sobolev".into(), adm.threshold_sobolev.into());
    out.instability_observed = p.assert_stable && !monotone;
    Ok(out)
}

pub(super) fn run(p: &CoupledParams, ctx: &Context<'_>) -> Result<CommandOutput> {
    match evolve(p, ctx) {
        Ok(o) => Ok(o),
        Err(e @ HarnessError::Config(_)) => Err(e),
        Err(e) => Ok(CommandOutput {
            failures: vec![PointFailure { index: 0, error: e.to_string() }],
            summary: [("error".to_string(), Value::Text(e.to_string()))].into_iter().collect(),
            ..Default::default()
        }),
    }
}
