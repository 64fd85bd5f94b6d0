use crate::config::ThresholdParams;
use crate::threshold::{certified_alpha, threshold_bisect, StabilityPredicate};
use crate::{assemble, scaling_fit, CommandOutput, Context, Result, Value};

pub(super) fn run(p: &ThresholdParams, ctx: &Context<'_>) -> Result<CommandOutput> {
    let pred = StabilityPredicate::new(p.panel.clone(), p.envelope, p.safety);
    let results = ctx.map_points(&p.nu, |_, &nu| {
        let b = threshold_bisect(nu, &pred, p.bracket, p.tol)?;
        let cert = certified_alpha(nu);
        let margin = pred.margin(nu, cert)?;
        Ok(vec![
            b.alpha_star.into(),
            b.unstable.into(),
            b.stable.into(),
            b.no_transition.into(),
            b.evaluations.into(),
            cert.into(),
            margin.into(),
            (margin <= 1.0).into(),
            (b.alpha_star <= cert).into(),
        ])
    });
    let params = p.nu.iter().map(|&nu| vec![Value::from(nu)]).collect();
    let (table, failures) = assemble(
        &["nu"],
        &[
            "alpha_star",
            "unstable_end",
            "stable_end",
            "no_transition",
            "evaluations",
            "certified_alpha",
            "certified_margin",
            "certified_stable",
            "contains_certified",
        ],
        params,
        results,
    );
    let flag = |name: &str| table.column(name).map_or(false, |mut c| c.all(|v| *v == Value::Bool(true)));
    let certified = flag("certified_stable");
    let contains = flag("contains_certified");
    let mut out = CommandOutput { failures, ..Default::default() };
    out.summary.insert("all_certified_stable".into(), certified.into());
    out.summary.insert("all_contain_certified".into(), contains.into());
    let pairs: Vec<(f64, f64)> = table
        .rows
        .iter()
        .filter_map(|r| Some((r[0].as_f64()?, r[1].as_f64()?)))
        .collect();
    match scaling_fit(&pairs, 0.95) {
        Ok(f) => {
            out.summary.insert("slope".into(), f.exponent.into());
            out.summary.insert("slope_ci_low".into(), f.ci_low.into());
            out.summary.insert("slope_ci_high".into(), f.ci_high.into());
            out.summary.insert("prefactor".into(), f.prefactor.into());
        }
        Err(e) => {
            out.summary.insert("fit".into(), e.to_string().into());
        }
    }
    out.instability_observed = !certified;
    out.table = table;
    Ok(out)
}
