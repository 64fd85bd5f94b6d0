use crate::config::ScalingParams;
use crate::{scaling_fit, CommandOutput, Context, HarnessError, Result, Table};

pub(super) fn run(p: &ScalingParams, _ctx: &Context<'_>) -> Result<CommandOutput> {
    let pairs: Vec<(f64, f64)> = match &p.csv {
        Some(path) => {
            let t = Table::read_csv(path)?;
            let nu = t.column("nu").ok_or_else(|| HarnessError::Config("csv has no nu column".into()))?;
            let a = t.column("alpha_star").ok_or_else(|| HarnessError::Config("csv has no alpha_star column".into()))?;
            nu.zip(a).filter_map(|(x, y)| Some((x.as_f64()?, y.as_f64()?))).collect()
        }
        None => p.pairs.iter().map(|q| (q[0], q[1])).collect(),
    };
    let fit = scaling_fit(&pairs, p.confidence)?;
    let mut table = Table::new(&["nu", "alpha_star", "fitted_alpha_star", "log_residual"]);
    for &(nu, a) in &pairs {
        let fitted = -fit.prefactor * nu.powf(fit.exponent);
        table.push(vec![nu.into(), a.into(), fitted.into(), ((-a).ln() - (-fitted).ln()).into()]);
    }
    let mut out = CommandOutput { table, ..Default::default() };
    let s = &mut out.summary;
    s.insert("exponent".into(), fit.exponent.into());
    s.insert("prefactor".into(), fit.prefactor.into());
    s.insert("exponent_stderr".into(), fit.exponent_stderr.into());
    s.insert("ci_low".into(), fit.ci_low.into());
    s.insert("ci_high".into(), fit.ci_high.into());
    s.insert("confidence".into(), fit.confidence.into());
    s.insert("r_squared".into(), fit.r_squared.into());
    s.insert("points".into(), fit.points.into());
    Ok(out)
}
