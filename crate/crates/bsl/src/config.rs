use crate::error::{HarnessError, Result};
use crate::threshold::{EnvelopeKind, ModePanel};
use bsl_core::profile::TemperatureProfile;
use bsl_core::sim::SimConfig;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Eigen,
    Exponents,
    Mode,
    Coupled,
    Admit,
    Simulate,
    Threshold,
    Scaling,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Eigen,
        Command::Exponents,
        Command::Mode,
        Command::Coupled,
        Command::Admit,
        Command::Simulate,
        Command::Threshold,
        Command::Scaling,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Eigen => "eigen",
            Command::Exponents => "exponents",
            Command::Mode => "mode",
            Command::Coupled => "coupled",
            Command::Admit => "admit",
            Command::Simulate => "simulate",
            Command::Threshold => "threshold",
            Command::Scaling => "scaling",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown command {s:?}")))
    }
}

fn one_zero() -> Vec<f64> {
    vec![0.0]
}

fn one_k() -> Vec<i64> {
    vec![1]
}

/// Cartesian sweep of the shear-free eigenvalue problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenParams {
    #[serde(default = "one_k")]
    pub k: Vec<i64>,
    #[serde(default = "one_zero")]
    pub xi: Vec<f64>,
    pub alpha: Vec<f64>,
    #[serde(default = "one_zero")]
    pub nu: Vec<f64>,
    #[serde(default = "one_zero")]
    pub mu: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentsParams {
    pub alpha: Vec<f64>,
    #[serde(default = "default_exp_t_end")]
    pub t_end: f64,
    /// Start of the fit window; the window ends at `t_end`.
    #[serde(default = "default_fit_from")]
    pub fit_from: f64,
    #[serde(default = "default_exp_rtol")]
    pub rtol: f64,
}

fn default_exp_t_end() -> f64 {
    1e4
}

fn default_fit_from() -> f64 {
    1e2
}

fn default_exp_rtol() -> f64 {
    1e-11
}

/// Per-mode integrations around an affine profile, checked against the envelopes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeParams {
    pub nu: Vec<f64>,
    /// Absolute slopes.
    #[serde(default)]
    pub alpha: Vec<f64>,
    /// Slopes in units of `ν^{1/3}`.
    #[serde(default)]
    pub alpha_scale: Vec<f64>,
    #[serde(default)]
    pub panel: ModePanel,
    #[serde(default)]
    pub envelope: EnvelopeKind,
    /// Exit with code 4 when a ratio exceeds the selected envelope.
    #[serde(default)]
    pub assert_stable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoupledParams {
    pub nu: f64,
    pub profile: TemperatureProfile,
    #[serde(rename = "N", default = "default_coupled_n")]
    pub n: u32,
    /// Weight of `|ω|²` in the energy; `ν^{1/3}` when absent.
    #[serde(default)]
    pub alpha_hat: Option<f64>,
    #[serde(default = "default_coupled_ks")]
    pub ks: Vec<i64>,
    #[serde(default = "default_dxi")]
    pub dxi: f64,
    /// `3 ν^{-1/3}` when absent.
    #[serde(default)]
    pub t_end: Option<f64>,
    /// `(3 t_end + 6) / dxi` when absent, so the sheared support stays on the grid.
    #[serde(default)]
    pub j_max: Option<usize>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Random initial data lives in `|xi| <= xi_band`.
    #[serde(default = "default_xi_band")]
    pub xi_band: f64,
    #[serde(default = "default_coupled_rtol")]
    pub rtol: f64,
    /// Relative tolerance of the monotonicity check.
    #[serde(default = "default_mono_tol")]
    pub monotone_tol: f64,
    #[serde(default)]
    pub assert_stable: bool,
}

fn default_coupled_n() -> u32 {
    2
}

fn default_coupled_ks() -> Vec<i64> {
    vec![1, 2]
}

fn default_dxi() -> f64 {
    0.25
}

fn default_samples() -> usize {
    141
}

fn default_xi_band() -> f64 {
    2.0
}

fn default_coupled_rtol() -> f64 {
    1e-10
}

fn default_mono_tol() -> f64 {
    1e-3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdmitParams {
    #[serde(default)]
    pub profile: Option<TemperatureProfile>,
    #[serde(default)]
    pub profiles: Vec<TemperatureProfile>,
    pub nu: Vec<f64>,
    #[serde(rename = "N", default = "default_admit_n")]
    pub n: Vec<u32>,
    /// Random samples for the kernel bound check; 0 skips it.
    #[serde(default)]
    pub kernel_samples: usize,
}

fn default_admit_n() -> Vec<u32> {
    vec![5]
}

impl AdmitParams {
    pub fn all_profiles(&self) -> Vec<TemperatureProfile> {
        self.profile.iter().chain(&self.profiles).cloned().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateParams {
    #[serde(flatten)]
    pub sim: SimConfig,
    /// Explicit seeds, one run each.
    #[serde(default)]
    pub seeds: Vec<u64>,
    /// Number of runs with seeds derived from the experiment seed, used when `seeds` is empty.
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub snapshot: bool,
    #[serde(default)]
    pub assert_stable: bool,
}

fn default_runs() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdParams {
    pub nu: Vec<f64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_bracket")]
    pub bracket: [f64; 2],
    #[serde(default = "default_safety")]
    pub safety: f64,
    #[serde(default)]
    pub panel: ModePanel,
    #[serde(default)]
    pub envelope: EnvelopeKind,
}

fn default_tol() -> f64 {
    1e-4
}

fn default_bracket() -> [f64; 2] {
    [-1.0, 0.0]
}

fn default_safety() -> f64 {
    2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingParams {
    /// `(nu, alpha_star)` pairs.
    #[serde(default)]
    pub pairs: Vec<[f64; 2]>,
    /// CSV with `nu` and `alpha_star` columns, as written by `threshold`.
    #[serde(default)]
    pub csv: Option<PathBuf>,
    #[serde(default = "default_confidence")]
    pub confidence: f64,
}

fn default_confidence() -> f64 {
    0.95
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Params {
    Eigen(EigenParams),
    Exponents(ExponentsParams),
    Mode(ModeParams),
    Coupled(CoupledParams),
    Admit(AdmitParams),
    Simulate(SimulateParams),
    Threshold(ThresholdParams),
    Scaling(ScalingParams),
}

impl Params {
    pub fn command(&self) -> Command {
        match self {
            Params::Eigen(_) => Command::Eigen,
            Params::Exponents(_) => Command::Exponents,
            Params::Mode(_) => Command::Mode,
            Params::Coupled(_) => Command::Coupled,
            Params::Admit(_) => Command::Admit,
            Params::Simulate(_) => Command::Simulate,
            Params::Threshold(_) => Command::Threshold,
            Params::Scaling(_) => Command::Scaling,
        }
    }
}

/// A command with its parameters and run settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub params: Params,
    pub seed: u64,
    /// Worker threads; 0 uses every core.
    pub jobs: usize,
    pub out: PathBuf,
}

fn cfg_err(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(cfg_err(format!("{name} must be positive and finite, got {v}")))
    }
}

fn all_finite(name: &str, v: &[f64]) -> Result<()> {
    match v.iter().find(|x| !x.is_finite()) {
        Some(x) => Err(cfg_err(format!("{name} contains a non-finite value {x}"))),
        None => Ok(()),
    }
}

fn all_nonneg(name: &str, v: &[f64]) -> Result<()> {
    all_finite(name, v)?;
    match v.iter().find(|x| **x < 0.0) {
        Some(x) => Err(cfg_err(format!("{name} must be >= 0, got {x}"))),
        None => Ok(()),
    }
}

fn all_positive(name: &str, v: &[f64]) -> Result<()> {
    v.iter().try_for_each(|x| positive(name, *x))
}

impl ExperimentConfig {
    pub fn new(params: Params) -> Self {
        Self { params, seed: 0, jobs: 0, out: PathBuf::from("out") }
    }

    pub fn command(&self) -> Command {
        self.params.command()
    }

    /// Parses the parameters of `command` from TOML text. The top-level keys
    /// `seed`, `jobs` and `out` are run settings; everything else belongs to the command.
    pub fn from_toml(command: Command, text: &str) -> Result<Self> {
        let mut table: toml::Table = toml::from_str(text)?;
        let seed = match table.remove("seed") {
            Some(v) => v.as_integer().filter(|i| *i >= 0).ok_or_else(|| cfg_err("seed must be a nonnegative integer"))? as u64,
            None => 0,
        };
        let jobs = match table.remove("jobs") {
            Some(v) => v.as_integer().filter(|i| *i >= 0).ok_or_else(|| cfg_err("jobs must be a nonnegative integer"))? as usize,
            None => 0,
        };
        let out = match table.remove("out") {
            Some(v) => PathBuf::from(v.as_str().ok_or_else(|| cfg_err("out must be a string"))?),
            None => PathBuf::from("out"),
        };
        if let Some(c) = table.remove("command") {
            if c.as_str() != Some(command.name()) {
                return Err(cfg_err(format!("config is for command {c}, not {command}")));
            }
        }
        let v = toml::Value::Table(table);
        let params = match command {
            Command::Eigen => Params::Eigen(v.try_into()?),
            Command::Exponents => Params::Exponents(v.try_into()?),
            Command::Mode => Params::Mode(v.try_into()?),
            Command::Coupled => Params::Coupled(v.try_into()?),
            Command::Admit => Params::Admit(v.try_into()?),
            Command::Simulate => Params::Simulate(v.try_into()?),
            Command::Threshold => Params::Threshold(v.try_into()?),
            Command::Scaling => Params::Scaling(v.try_into()?),
        };
        let cfg = Self { params, seed, jobs, out };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(command: Command, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| cfg_err(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(command, &text)
    }

    pub fn validate(&self) -> Result<()> {
        match &self.params {
            Params::Eigen(p) => {
                all_finite("xi", &p.xi)?;
                all_finite("alpha", &p.alpha)?;
                all_nonneg("nu", &p.nu)?;
                all_nonneg("mu", &p.mu)?;
                if p.k.contains(&0) {
                    return Err(cfg_err("k = 0 has no dynamics"));
                }
            }
            Params::Exponents(p) => {
                all_finite("alpha", &p.alpha)?;
                positive("t_end", p.t_end)?;
                positive("fit_from", p.fit_from)?;
                positive("rtol", p.rtol)?;
                if p.fit_from >= p.t_end {
                    return Err(cfg_err("fit_from must be below t_end"));
                }
            }
            Params::Mode(p) => {
                all_positive("nu", &p.nu)?;
                all_finite("alpha", &p.alpha)?;
                all_finite("alpha_scale", &p.alpha_scale)?;
                p.panel.validate()?;
            }
            Params::Coupled(p) => {
                positive("nu", p.nu)?;
                positive("dxi", p.dxi)?;
                positive("xi_band", p.xi_band)?;
                positive("rtol", p.rtol)?;
                if let Some(t) = p.t_end {
                    positive("t_end", t)?;
                }
                if p.ks.is_empty() || p.ks.contains(&0) {
                    return Err(cfg_err("ks must be nonempty and exclude 0"));
                }
                if p.samples < 2 {
                    return Err(cfg_err("samples must be at least 2"));
                }
                p.profile.validate()?;
            }
            Params::Admit(p) => {
                all_positive("nu", &p.nu)?;
                for prof in p.all_profiles() {
                    prof.validate()?;
                }
            }
            Params::Simulate(p) => {
                p.sim.validate()?;
            }
            Params::Threshold(p) => {
                all_positive("nu", &p.nu)?;
                positive("tol", p.tol)?;
                positive("safety", p.safety)?;
                let [lo, hi] = p.bracket;
                if !(lo < hi && lo.is_finite() && hi.is_finite()) {
                    return Err(cfg_err(format!("bracket [{lo}, {hi}] is not an interval")));
                }
                p.panel.validate()?;
            }
            Params::Scaling(p) => {
                if p.pairs.is_empty() == p.csv.is_none() {
                    return Err(cfg_err("give exactly one of pairs and csv"));
                }
                if !(p.confidence > 0.0 && p.confidence < 1.0) {
                    return Err(cfg_err("confidence must lie in (0, 1)"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_settings_are_split_off() {
        let cfg = ExperimentConfig::from_toml(Command::Eigen, "seed = 3\njobs = 2\nout = \"x\"\nalpha = [-1.0, 0.0, 1.0]").unwrap();
        assert_eq!((cfg.seed, cfg.jobs, cfg.out.to_str().unwrap()), (3, 2, "x"));
        match cfg.params {
            Params::Eigen(p) => assert_eq!((p.k, p.xi, p.nu), (vec![1], vec![0.0], vec![0.0])),
            _ => unreachable!(),
        }
    }

    #[test]
    fn typos_are_config_errors() {
        let e = ExperimentConfig::from_toml(Command::Eigen, "alpa = [1.0]").unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let e = ExperimentConfig::from_toml(Command::Threshold, "nu = [0.01]\nbracket = [0.0, -1.0]").unwrap_err();
        assert!(matches!(e, HarnessError::Config(_)));
        let e = ExperimentConfig::from_toml(Command::Eigen, "command = \"mode\"\nalpha = [1.0]").unwrap_err();
        assert!(matches!(e, HarnessError::Config(_)));
    }

    #[test]
    fn simulate_reads_the_solver_keys() {
        let text = r#"
            nu = 0.1
            epsilon = 1e-6
            t_end = 5.0
            seed = 4
            seeds = [1, 2, 3]
            [profile]
            kind = "affine"
            slope = 0.002
            [grid]
            K = 10
            J = 10
        "#;
        let cfg = ExperimentConfig::from_toml(Command::Simulate, text).unwrap();
        assert_eq!(cfg.seed, 4);
        match cfg.params {
            Params::Simulate(p) => {
                assert_eq!(p.seeds, vec![1, 2, 3]);
                assert_eq!(p.sim.grid.k_max, 10);
            }
            _ => unreachable!(),
        }
        assert!(ExperimentConfig::from_toml(Command::Simulate, "nu = -1.0").is_err());
    }

    #[test]
    fn command_names_round_trip() {
        for c in Command::ALL {
            assert_eq!(c.name().parse::<Command>().unwrap(), c);
        }
        assert!("plot".parse::<Command>().is_err());
    }
}
