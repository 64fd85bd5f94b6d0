use crate::config::AdmitParams;
use crate::{assemble, point_seed, CommandOutput, Context, Result, Value};
use bsl_core::profile::{admit, kernel_bound_check, profile_spectrum};

pub(super) fn run(p: &AdmitParams, ctx: &Context<'_>) -> Result<CommandOutput> {
    let profiles = p.all_profiles();
    let mut points = Vec::new();
    for (i, prof) in profiles.iter().enumerate() {
        for &n in &p.n {
            for &nu in &p.nu {
                points.push((i, prof, n, nu));
            }
        }
    }
    let results = ctx.map_points(&points, |idx, &(_, prof, n, nu)| {
        let r = admit(prof, n, nu)?;
        let (kmax, kpass) = if p.kernel_samples > 0 {
            let spec = profile_spectrum::<f64>(prof)?;
            let k = kernel_bound_check(&spec, n, nu, p.kernel_samples, point_seed(ctx.seed, idx))?;
            (Value::from(k.max_ratio), Value::from(k.pass))
        } else {
            (Value::Empty, Value::Empty)
        };
        Ok(vec![
            r.value_main.into(),
            r.threshold_main.into(),
            r.pass_main.into(),
            r.value_sobolev.into(),
            r.threshold_sobolev.into(),
            r.pass_sobolev.into(),
            r.pass().into(),
            r.alpha_surrogate.into(),
            r.main_argmax_xi.into(),
            r.main_refinement_delta.into(),
            kmax,
            kpass,
        ])
    });
    let params = points
        .iter()
        .map(|&(i, prof, n, nu)| vec![Value::from(i), prof.description.clone().into(), n.into(), nu.into()])
        .collect();
    let (table, failures) = assemble(
        &["profile", "description", "N", "nu"],
        &[
            "value_main",
            "threshold_main",
            "pass_main",
            "value_sobolev",
            "threshold_sobolev",
            "pass_sobolev",
            "pass",
            "alpha_surrogate",
            "main_argmax_xi",
            "main_refinement_delta",
            "kernel_max_ratio",
            "kernel_pass",
        ],
        params,
        results,
    );
    Ok(CommandOutput { table, failures, ..Default::default() })
}
