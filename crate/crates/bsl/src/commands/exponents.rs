use crate::config::ExponentsParams;
use crate::{assemble, CommandOutput, Context, Result, Value};
use bsl_core::linear::{fit_growth_exponent, integrate_schrodinger, inviscid_exponents, RootKind};

pub(super) fn run(p: &ExponentsParams, ctx: &Context<'_>) -> Result<CommandOutput> {
    let results = ctx.map_points(&p.alpha, |_, &alpha| {
        let r = inviscid_exponents(alpha);
        // odd data u(0) = 0, u'(0) = 1 excites the leading exponent
        let tr = integrate_schrodinger(alpha, 0.0, 1.0, p.t_end, p.rtol)?;
        let fitted = fit_growth_exponent(&tr, (p.fit_from, p.t_end))?;
        let predicted = r.beta1.re;
        let roots = match r.roots {
            RootKind::Real => "real",
            RootKind::Double => "double",
            RootKind::Complex => "complex",
        };
        Ok(vec![
            r.beta1.re.into(),
            r.beta1.im.into(),
            r.beta2.re.into(),
            r.beta2.im.into(),
            r.c.into(),
            roots.into(),
            r.omega_rate.into(),
            r.v2_rate.into(),
            r.v2_marginal.into(),
            fitted.into(),
            ((fitted - predicted) / predicted).abs().into(),
        ])
    });
    let params = p.alpha.iter().map(|&a| vec![Value::from(a)]).collect();
    let (table, failures) = assemble(
        &["alpha"],
        &[
            "beta1_re",
            "beta1_im",
            "beta2_re",
            "beta2_im",
            "c",
            "roots",
            "omega_rate",
            "v2_rate",
            "v2_marginal",
            "fitted_beta",
            "relative_error",
        ],
        params,
        results,
    );
    let mut out = CommandOutput { table, failures, ..Default::default() };
    out.summary.insert("fit_from".into(), p.fit_from.into());
    out.summary.insert("t_end".into(), p.t_end.into());
    Ok(out)
}
