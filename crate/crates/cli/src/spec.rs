//! Experiment specification: JSON config file plus command-line overrides.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use cogcap_core::analytic::{baseline_outage, eps_p_nc_consistency_gap, CrossPowerMode};
use cogcap_core::mc::TrialPlan;
use cogcap_core::scenario::{CanceledMode, Regime, ScenarioConfig};
use cogcap_core::{Error, Result};

/// Scenario block of a config file; `eps_p_nc` may be omitted and is then
/// derived from `lambda_p` through the baseline outage expression.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioInput {
    pub alpha: f64,
    pub p_p: f64,
    pub p_s: f64,
    pub d_p: f64,
    pub d_s: f64,
    pub beta_p: f64,
    pub beta_s: f64,
    pub lambda_p: f64,
    pub lambda_s: f64,
    pub n_tx: usize,
    pub m_rx: usize,
    pub k_null: usize,
    pub m_cancel: usize,
    pub eps_p_nc: Option<f64>,
    pub delta_p: f64,
    pub eps_s: f64,
    pub canceled_mode: CanceledMode,
}

impl Default for ScenarioInput {
    /// Simulation preset: alpha = 3, d_p = d_s = 1 m, P_p/P_s = 2,
    /// beta_p = beta_s = 1, lambda_p = 0.01, outage budgets 0.05 / 0.1.
    fn default() -> Self {
        ScenarioInput {
            alpha: 3.0,
            p_p: 2.0,
            p_s: 1.0,
            d_p: 1.0,
            d_s: 1.0,
            beta_p: 1.0,
            beta_s: 1.0,
            lambda_p: 0.01,
            lambda_s: 0.005,
            n_tx: 1,
            m_rx: 1,
            k_null: 0,
            m_cancel: 0,
            eps_p_nc: None,
            delta_p: 0.05,
            eps_s: 0.1,
            canceled_mode: CanceledMode::ExactSet,
        }
    }
}

impl ScenarioInput {
    /// Concrete scenario: fills `eps_p_nc` from the baseline expression when
    /// absent and warns (stderr) when a supplied value is inconsistent.
    pub fn resolve(&self) -> Result<ScenarioConfig> {
        let eps_p_nc = match self.eps_p_nc {
            Some(v) => v,
            None => baseline_outage(self.lambda_p, self.beta_p, self.d_p, self.alpha)?,
        };
        let config = ScenarioConfig {
            alpha: self.alpha,
            p_p: self.p_p,
            p_s: self.p_s,
            d_p: self.d_p,
            d_s: self.d_s,
            beta_p: self.beta_p,
            beta_s: self.beta_s,
            lambda_p: self.lambda_p,
            lambda_s: self.lambda_s,
            n_tx: self.n_tx,
            m_rx: self.m_rx,
            k_null: self.k_null,
            m_cancel: self.m_cancel,
            eps_p_nc,
            delta_p: self.delta_p,
            eps_s: self.eps_s,
            canceled_mode: self.canceled_mode,
        };
        config.validate()?;
        if self.eps_p_nc.is_some() {
            let gap = eps_p_nc_consistency_gap(&config)?;
            if gap > 1e-6 {
                eprintln!(
                    "warning: eps_p_nc = {} differs from the baseline outage at lambda_p = {} by {gap:.3e}",
                    eps_p_nc, self.lambda_p
                );
            }
        }
        Ok(config)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlanInput {
    pub trials: u64,
    pub master_seed: u64,
    pub region_radius: Option<f64>,
    pub truncation_tolerance: f64,
}

impl Default for PlanInput {
    fn default() -> Self {
        PlanInput {
            trials: 10_000,
            master_seed: 2026,
            region_radius: None,
            truncation_tolerance: 0.01,
        }
    }
}

impl PlanInput {
    pub fn to_plan(self) -> TrialPlan {
        TrialPlan {
            trials: self.trials,
            master_seed: self.master_seed,
            region_radius: self.region_radius,
            truncation_tolerance: self.truncation_tolerance,
        }
    }
}

/// Sweep axis: a numeric scenario field and the values it takes.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: String,
    pub values: Vec<f64>,
}

/// Full experiment specification (one JSON document; flags override fields).
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSpec {
    pub scenario: ScenarioInput,
    pub plan: PlanInput,
    pub regime: Option<Regime>,
    pub mode: Option<CrossPowerMode>,
    pub sweep: Option<SweepSpec>,
    /// Cross-check analytic results by Monte Carlo intensity search.
    pub mc: bool,
    /// Relative bisection tolerance of the intensity search.
    pub search_tolerance: Option<f64>,
    /// Antenna counts for the scaling command.
    pub sizes: Option<Vec<usize>>,
    /// Nulling / cancelation fraction for the scaling command.
    pub theta: Option<f64>,
    pub out_dir: Option<PathBuf>,
    /// Record measured wall time in result rows (breaks byte-level
    /// reproducibility of the artifacts).
    pub timings: bool,
}

impl ExperimentSpec {
    pub fn from_file(path: &std::path::Path) -> Result<ExperimentSpec> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::InvalidParameter(format!("bad config {}: {e}", path.display())))
    }

    pub fn regime(&self) -> Regime {
        self.regime.unwrap_or(Regime::Siso)
    }

    pub fn mode(&self) -> CrossPowerMode {
        self.mode.unwrap_or_default()
    }

    pub fn search_tolerance(&self) -> f64 {
        self.search_tolerance.unwrap_or(0.05)
    }

    /// Apply one `--set key=value` override. Scenario fields go by their
    /// plain names; plan fields likewise; a few top-level knobs are reachable
    /// as `regime`, `mode`, `mc`, `theta`, `search_tolerance`.
    pub fn apply_set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| {
            Error::InvalidParameter(format!("cannot parse {value:?} as {what} for key {key}"))
        };
        let as_f64 = |v: &str| v.parse::<f64>().map_err(|_| bad("a number"));
        let as_usize = |v: &str| v.parse::<usize>().map_err(|_| bad("an integer"));
        match key {
            "alpha" => self.scenario.alpha = as_f64(value)?,
            "p_p" => self.scenario.p_p = as_f64(value)?,
            "p_s" => self.scenario.p_s = as_f64(value)?,
            "d_p" => self.scenario.d_p = as_f64(value)?,
            "d_s" => self.scenario.d_s = as_f64(value)?,
            "beta_p" => self.scenario.beta_p = as_f64(value)?,
            "beta_s" => self.scenario.beta_s = as_f64(value)?,
            "lambda_p" => self.scenario.lambda_p = as_f64(value)?,
            "lambda_s" => self.scenario.lambda_s = as_f64(value)?,
            "n_tx" => self.scenario.n_tx = as_usize(value)?,
            "m_rx" => self.scenario.m_rx = as_usize(value)?,
            "k_null" => self.scenario.k_null = as_usize(value)?,
            "m_cancel" => self.scenario.m_cancel = as_usize(value)?,
            "eps_p_nc" => self.scenario.eps_p_nc = Some(as_f64(value)?),
            "delta_p" => self.scenario.delta_p = as_f64(value)?,
            "eps_s" => self.scenario.eps_s = as_f64(value)?,
            "canceled_mode" => {
                self.scenario.canceled_mode = match value {
                    "exact_set" => CanceledMode::ExactSet,
                    "prefix" => CanceledMode::Prefix,
                    _ => return Err(bad("exact_set|prefix")),
                }
            }
            "trials" => self.plan.trials = value.parse().map_err(|_| bad("an integer"))?,
            "master_seed" | "seed" => {
                self.plan.master_seed = value.parse().map_err(|_| bad("an integer"))?
            }
            "region_radius" => self.plan.region_radius = Some(as_f64(value)?),
            "truncation_tolerance" => self.plan.truncation_tolerance = as_f64(value)?,
            "regime" => {
                self.regime = Some(match value {
                    "baseline" => Regime::Baseline,
                    "siso" => Regime::Siso,
                    "miso" => Regime::Miso,
                    "mimo" => Regime::Mimo,
                    _ => return Err(bad("baseline|siso|miso|mimo")),
                })
            }
            "mode" => {
                self.mode = Some(match value {
                    "paper_literal" => CrossPowerMode::PaperLiteral,
                    "corrected" => CrossPowerMode::Corrected,
                    _ => return Err(bad("paper_literal|corrected")),
                })
            }
            "mc" => self.mc = value.parse().map_err(|_| bad("true|false"))?,
            "theta" => self.theta = Some(as_f64(value)?),
            "search_tolerance" => self.search_tolerance = Some(as_f64(value)?),
            "timings" => self.timings = value.parse().map_err(|_| bad("true|false"))?,
            _ => {
                return Err(Error::InvalidParameter(format!("unknown --set key {key:?}")));
            }
        }
        Ok(())
    }

    /// Whether `axis` names a sweepable numeric scenario field, and apply a
    /// value to it.
    pub fn set_axis_value(&mut self, axis: &str, value: f64) -> Result<()> {
        const NUMERIC_AXES: &[&str] = &[
            "alpha", "p_p", "p_s", "d_p", "d_s", "beta_p", "beta_s", "lambda_p", "lambda_s",
            "n_tx", "m_rx", "k_null", "m_cancel", "eps_p_nc", "delta_p", "eps_s",
        ];
        if !NUMERIC_AXES.contains(&axis) {
            return Err(Error::InvalidParameter(format!(
                "sweep axis {axis:?} is not a scenario field"
            )));
        }
        if matches!(axis, "n_tx" | "m_rx" | "k_null" | "m_cancel") {
            if value.fract() != 0.0 || value < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "axis {axis} needs nonnegative integers, got {value}"
                )));
            }
            self.apply_set(axis, &format!("{}", value as usize))
        } else {
            self.apply_set(axis, &format!("{value}"))
        }
    }
}
