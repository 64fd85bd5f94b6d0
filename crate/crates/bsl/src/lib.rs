//! Experiment harness around `bsl-core`: configuration files, parallel
//! parameter sweeps, the stability bisection for `α*(ν)`, power-law fits
//! and CSV / JSON export.
//!
//! Every command turns an [`ExperimentConfig`] into a [`SweepResult`] through
//! [`run_experiment`]. Sweep points run on a rayon pool and are merged by
//! point index, so identical configurations and seeds give identical tables.

pub mod commands;
pub mod config;
pub mod error;
pub mod scaling;
pub mod table;
pub mod threshold;

pub use config::{Command, ExperimentConfig, Params};
pub use error::{HarnessError, Result};
pub use scaling::{scaling_fit, ScalingFit};
pub use table::{export, Format, Table, Value};
pub use threshold::{bisect, threshold_bisect, Bisection, EnvelopeKind, ModePanel, PanelInit, StabilityPredicate};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointFailure {
    pub index: usize,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub command: Command,
    /// SHA-256 of the parameters and seed.
    pub config_hash: String,
    pub version: String,
    pub seed: u64,
    pub jobs: usize,
    pub started: String,
    pub finished: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub command: Command,
    /// One row per sweep point (or per sample for single-run commands).
    pub table: Table,
    /// Extra named tables, such as simulation time series.
    pub series: Vec<(String, Table)>,
    pub summary: BTreeMap<String, Value>,
    pub failures: Vec<PointFailure>,
    /// A stability assertion of the command was violated.
    pub instability_observed: bool,
    pub provenance: Provenance,
}

impl SweepResult {
    /// Everything except the provenance, which carries timestamps.
    pub fn body(&self) -> serde_json::Value {
        serde_json::json!({
            "command": self.command,
            "table": self.table,
            "series": self.series.iter().map(|(n, t)| serde_json::json!({ "name": n, "table": t })).collect::<Vec<_>>(),
            "summary": self.summary,
            "failures": self.failures,
            "instability_observed": self.instability_observed,
        })
    }

    /// 0 success, 3 when a point failed, 4 when an asserted stability was violated.
    pub fn exit_code(&self) -> i32 {
        if !self.failures.is_empty() {
            3
        } else if self.instability_observed {
            4
        } else {
            0
        }
    }
}

/// What a command hands back before provenance is attached.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CommandOutput {
    pub table: Table,
    pub series: Vec<(String, Table)>,
    pub summary: BTreeMap<String, Value>,
    pub failures: Vec<PointFailure>,
    pub instability_observed: bool,
}

/// Seed of sweep point `index`: stream `index` of a ChaCha8 generator keyed by `seed`.
pub fn point_seed(seed: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng.next_u64()
}

/// Settings shared by every command.
pub struct Context<'a> {
    pub seed: u64,
    pub pool: &'a rayon::ThreadPool,
    /// Directory for side outputs such as snapshots; `None` skips them.
    pub out: Option<&'a Path>,
}

impl Context<'_> {
    /// Evaluates `f` on every point in parallel and returns the results in point order.
    pub fn map_points<P, R, F>(&self, points: &[P], f: F) -> Vec<Result<R>>
    where
        P: Sync,
        R: Send,
        F: Fn(usize, &P) -> Result<R> + Sync,
    {
        use rayon::prelude::*;
        self.pool.install(|| points.par_iter().enumerate().map(|(i, p)| f(i, p)).collect())
    }
}

/// Joins per-point parameter cells and measurements into one table; failed points
/// keep their parameters, leave the measurements empty and fill the `error` column.
pub fn assemble(
    param_cols: &[&str],
    measure_cols: &[&str],
    params: Vec<Vec<Value>>,
    results: Vec<Result<Vec<Value>>>,
) -> (Table, Vec<PointFailure>) {
    let cols: Vec<&str> = param_cols.iter().chain(measure_cols).copied().chain(["error"]).collect();
    let mut table = Table::new(&cols);
    let mut failures = Vec::new();
    for (index, (mut row, res)) in params.into_iter().zip(results).enumerate() {
        match res {
            Ok(m) => {
                debug_assert_eq!(m.len(), measure_cols.len());
                row.extend(m);
                row.push(Value::Empty);
            }
            Err(e) => {
                row.extend(std::iter::repeat(Value::Empty).take(measure_cols.len()));
                row.push(Value::Text(e.to_string()));
                failures.push(PointFailure { index, error: e.to_string() });
            }
        }
        table.push(row);
    }
    (table, failures)
}

fn config_hash(cfg: &ExperimentConfig) -> String {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(&cfg.params).expect("parameters serialize"));
    h.update(cfg.seed.to_le_bytes());
    hex::encode(h.finalize())
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

/// Validates and runs one experiment. Side outputs go below `out` when given.
pub fn run_experiment_in(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<SweepResult> {
    cfg.validate()?;
    let started = now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| HarnessError::Config(format!("cannot build thread pool: {e}")))?;
    let ctx = Context { seed: cfg.seed, pool: &pool, out };
    let o = commands::dispatch(&cfg.params, &ctx)?;
    Ok(SweepResult {
        command: cfg.command(),
        table: o.table,
        series: o.series,
        summary: o.summary,
        failures: o.failures,
        instability_observed: o.instability_observed,
        provenance: Provenance {
            command: cfg.command(),
            config_hash: config_hash(cfg),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: cfg.seed,
            jobs: pool.current_num_threads(),
            started,
            finished: now(),
        },
    })
}

/// [`run_experiment_in`] without side outputs.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<SweepResult> {
    run_experiment_in(cfg, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_seeds_are_distinct_and_stable() {
        let a: Vec<u64> = (0..100).map(|i| point_seed(7, i)).collect();
        let mut b = a.clone();
        b.sort();
        b.dedup();
        assert_eq!(b.len(), 100);
        assert_eq!(a[3], point_seed(7, 3));
        assert_ne!(point_seed(7, 0), point_seed(8, 0));
    }

    #[test]
    fn failures_keep_parameters() {
        let (t, f) = assemble(
            &["x"],
            &["y"],
            vec![vec![1.0.into()], vec![2.0.into()]],
            vec![Ok(vec![3.0.into()]), Err(HarnessError::Fit("bad".into()))],
        );
        assert_eq!(t.columns, vec!["x", "y", "error"]);
        assert_eq!(t.rows[1], vec![Value::Num(2.0), Value::Empty, Value::Text("fit error: bad".into())]);
        assert_eq!(f, vec![PointFailure { index: 1, error: "fit error: bad".into() }]);
    }
}
