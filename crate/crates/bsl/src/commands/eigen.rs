use crate::config::EigenParams;
use crate::{assemble, CommandOutput, Context, Result, Value};
use bsl_core::linear::{classify_no_shear, no_shear_eigenvalues, NoShearClass, NoShearSystem};
use bsl_core::multiplier::FrequencyMode;

pub(super) fn class_name(c: NoShearClass) -> &'static str {
    match c {
        NoShearClass::Stable => "stable",
        NoShearClass::ExponentiallyUnstable => "exponentially_unstable",
        NoShearClass::Marginal => "marginal",
    }
}

pub(super) fn run(p: &EigenParams, ctx: &Context<'_>) -> Result<CommandOutput> {
    let mut points = Vec::new();
    for &k in &p.k {
        for &xi in &p.xi {
            for &alpha in &p.alpha {
                for &nu in &p.nu {
                    for &mu in &p.mu {
                        points.push((k, xi, alpha, nu, mu));
                    }
                }
            }
        }
    }
    let results = ctx.map_points(&points, |_, &(k, xi, alpha, nu, mu)| {
        let sys = NoShearSystem::new(FrequencyMode::new(k, xi), alpha, nu, mu)?;
        let (l1, l2) = no_shear_eigenvalues(&sys)?;
        let class = classify_no_shear(&sys)?;
        Ok(vec![l1.re.into(), l1.im.into(), l2.re.into(), l2.im.into(), class_name(class).into(), (l1.re > 0.0).into()])
    });
    let params = points
        .iter()
        .map(|&(k, xi, a, nu, mu)| vec![Value::Int(k), xi.into(), a.into(), nu.into(), mu.into()])
        .collect();
    let (table, failures) = assemble(
        &["k", "xi", "alpha", "nu", "mu"],
        &["lambda1_re", "lambda1_im", "lambda2_re", "lambda2_im", "class", "growing"],
        params,
        results,
    );
    Ok(CommandOutput { table, failures, ..Default::default() })
}
