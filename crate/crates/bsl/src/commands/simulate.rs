use crate::config::SimulateParams;
use crate::{assemble, point_seed, CommandOutput, Context, Result, Table, Value};
use bsl_core::sim::{simulate, write_snapshot, SimReport, LEDGER_COLUMNS};

fn series(r: &SimReport<f64>) -> Table {
    let mut cols = vec!["t"];
    cols.extend(LEDGER_COLUMNS);
    cols.extend(["omega_hn", "dxtheta_hn", "omega_l2", "theta_l2"]);
    let mut t = Table::new(&cols);
    for row in &r.rows {
        let mut v = vec![Value::from(row.t)];
        v.extend(row.ledger.iter().map(|x| Value::from(*x)));
        v.extend([row.omega_hn, row.dxtheta_hn, row.omega_l2, row.theta_l2].map(Value::from));
        t.push(v);
    }
    t
}

pub(super) fn run(p: &SimulateParams, ctx: &Context<'_>) -> Result<CommandOutput> {
    let seeds: Vec<u64> =
        if p.seeds.is_empty() { (0..p.runs).map(|i| point_seed(ctx.seed, i)).collect() } else { p.seeds.clone() };
    let results = ctx.map_points(&seeds, |_, &seed| {
        let mut cfg = p.sim.clone();
        cfg.seed = seed;
        let r = simulate::<f64>(&cfg)?;
        if p.snapshot {
            if let Some(dir) = ctx.out {
                write_snapshot(&r.final_state, &dir.join("snapshots"), &format!("seed{seed}"))?;
            }
        }
        let v = &r.verdict;
        let mut row = vec![
            r.steps.into(),
            r.min_dt.into(),
            r.instability_at.into(),
            v.energy_ratio.into(),
            v.energy_bound.into(),
            v.pass.into(),
            v.omega_ratio.into(),
            v.dxtheta_ratio.into(),
        ];
        row.extend(v.ledger_blocks.map(Value::from));
        row.extend(v.ledger_thresholds.map(Value::from));
        row.push(v.ledger_within.iter().all(|b| *b).into());
        row.extend([
            r.small_data_regime.into(),
            r.beyond_resolved_horizon.into(),
            r.outside_hypotheses.join("; ").into(),
        ]);
        Ok((row, series(&r), r.instability_at.is_some(), v.pass))
    });
    let mut rows = Vec::new();
    let mut out = CommandOutput::default();
    let mut unstable = false;
    for (seed, res) in seeds.iter().zip(results) {
        rows.push(res.map(|(row, s, blown, pass)| {
            out.series.push((format!("seed{seed}"), s));
            unstable |= blown || (p.assert_stable && !pass);
            row
        }));
    }
    let params = seeds.iter().map(|&s| vec![Value::from(s)]).collect();
    let (table, failures) = assemble(
        &["seed"],
        &[
            "steps",
            "min_dt",
            "instability_at",
            "energy_ratio",
            "energy_bound",
            "pass",
            "omega_ratio",
            "dxtheta_ratio",
            "block_omega_neq",
            "block_theta_neq",
            "block_omega_eq",
            "block_theta_eq",
            "threshold_omega_neq",
            "threshold_theta_neq",
            "threshold_omega_eq",
            "threshold_theta_eq",
            "ledger_within",
            "small_data_regime",
            "beyond_resolved_horizon",
            "outside_hypotheses",
        ],
        params,
        rows,
    );
    out.table = table;
    out.failures = failures;
    out.instability_observed = unstable;
    Ok(out)
}
