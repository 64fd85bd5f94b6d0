use crate::config::ModeParams;
use crate::{assemble, CommandOutput, Context, Result, Value};

pub(super) fn run(p: &ModeParams, ctx: &Context<'_>) -> Result<CommandOutput> {
    let mut points = Vec::new();
    for &nu in &p.nu {
        let slopes = p.alpha.iter().copied().chain(p.alpha_scale.iter().map(|s| s * nu.cbrt()));
        for alpha in slopes {
            for (k, xi, init) in p.panel.modes(nu) {
                points.push((nu, alpha, k, xi, init));
            }
        }
    }
    let results = ctx.map_points(&points, |_, &(nu, alpha, k, xi, init)| {
        let t_end = p.panel.horizon(nu);
        let r = p.panel.evaluate_one(nu, alpha, k, xi, init)?;
        let selected = r.ratio <= p.envelope.of(&r);
        Ok(vec![
            t_end.into(),
            r.ratio.into(),
            r.t_at_max.into(),
            r.alpha_hat.into(),
            r.envelope.into(),
            r.pass.into(),
            r.display_envelope.into(),
            r.pass_display.into(),
            r.uniform_envelope.into(),
            r.pass_uniform.into(),
            selected.into(),
        ])
    });
    let stable = results.iter().all(|r| matches!(r, Ok(v) if v[10] == Value::Bool(true)));
    let params = points
        .iter()
        .map(|&(nu, a, k, xi, init)| vec![nu.into(), a.into(), Value::Int(k), xi.into(), init.name().into()])
        .collect();
    let (table, failures) = assemble(
        &["nu", "alpha", "k", "xi", "init"],
        &[
            "t_end",
            "ratio",
            "t_at_max",
            "alpha_hat",
            "proof_envelope",
            "pass_proof",
            "display_envelope",
            "pass_display",
            "uniform_envelope",
            "pass_uniform",
            "pass",
        ],
        params,
        results,
    );
    let mut out = CommandOutput { table, failures, ..Default::default() };
    out.summary.insert("all_pass".into(), stable.into());
    out.summary.insert("envelope".into(), format!("{:?}", p.envelope).to_lowercase().into());
    out.instability_observed = p.assert_stable && !stable;
    Ok(out)
}
