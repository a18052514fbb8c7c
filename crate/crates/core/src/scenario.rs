//! Scenario parameters shared by the SIR engine, the analytic calculator and
//! the Monte Carlo harness.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Antenna regime being simulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Primary network alone (no secondary nodes at all).
    Baseline,
    /// Single antenna everywhere (N = M = 1).
    Siso,
    /// N transmit antennas, single receive antenna; k of the N transmit
    /// degrees of freedom null the k nearest primary receivers.
    Miso,
    /// N transmit / M receive antennas; N-1 transmit DOF null the nearest
    /// primary receivers, m receive DOF cancel the nearest interferers.
    Mimo,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Regime::Baseline => "baseline",
            Regime::Siso => "siso",
            Regime::Miso => "miso",
            Regime::Mimo => "mimo",
        };
        f.write_str(s)
    }
}

/// How the set of secondary interferers canceled at a primary receiver is
/// determined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CanceledMode {
    /// The exact set of transmitters whose nulling targets include this
    /// receiver contribute nothing (physically faithful).
    #[default]
    ExactSet,
    /// Only the maximal distance-ordered prefix of targeting transmitters is
    /// excluded; targeting transmitters beyond the prefix count at full,
    /// un-nulled fading power (mirrors the n > c summation used in the
    /// analysis).
    Prefix,
}

impl std::fmt::Display for CanceledMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CanceledMode::ExactSet => "exact_set",
            CanceledMode::Prefix => "prefix",
        })
    }
}

/// Which outage constraint limits the secondary intensity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BindingConstraint {
    PrimaryOutage,
    SecondaryOutage,
}

impl std::fmt::Display for BindingConstraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BindingConstraint::PrimaryOutage => "primary_outage",
            BindingConstraint::SecondaryOutage => "secondary_outage",
        })
    }
}

/// All scalar model parameters of a coexistence scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    /// Path-loss exponent, must exceed 2.
    pub alpha: f64,
    /// Primary / secondary transmit powers (watts).
    pub p_p: f64,
    pub p_s: f64,
    /// Transmitter-receiver link distances (meters).
    pub d_p: f64,
    pub d_s: f64,
    /// SIR decoding thresholds.
    pub beta_p: f64,
    pub beta_s: f64,
    /// Active transmitter intensities (nodes per square meter).
    pub lambda_p: f64,
    pub lambda_s: f64,
    /// Secondary transmit / receive antenna counts.
    pub n_tx: usize,
    pub m_rx: usize,
    /// Transmit degrees of freedom spent on nulling (k < N).
    pub k_null: usize,
    /// Receive degrees of freedom spent on cancelation (m < M).
    pub m_cancel: usize,
    /// Baseline primary outage at `lambda_p` without the secondary network.
    pub eps_p_nc: f64,
    /// Additional outage tolerance granted to the primary receivers.
    pub delta_p: f64,
    /// Secondary outage constraint.
    pub eps_s: f64,
    /// Canceled-set convention at primary receivers.
    #[serde(default)]
    pub canceled_mode: CanceledMode,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("alpha", self.alpha),
            ("p_p", self.p_p),
            ("p_s", self.p_s),
            ("d_p", self.d_p),
            ("d_s", self.d_s),
            ("beta_p", self.beta_p),
            ("beta_s", self.beta_s),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if self.alpha <= 2.0 {
            return Err(Error::Divergent(format!(
                "path-loss exponent must exceed 2 for finite interference, got {}",
                self.alpha
            )));
        }
        for (name, v) in [("lambda_p", self.lambda_p), ("lambda_s", self.lambda_s)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be nonnegative, got {v}"
                )));
            }
        }
        for (name, v) in
            [("eps_p_nc", self.eps_p_nc), ("delta_p", self.delta_p), ("eps_s", self.eps_s)]
        {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must lie in [0,1], got {v}"
                )));
            }
        }
        if self.eps_p_nc + self.delta_p >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "eps_p_nc + delta_p must stay below 1, got {}",
                self.eps_p_nc + self.delta_p
            )));
        }
        if self.n_tx == 0 || self.m_rx == 0 {
            return Err(Error::InvalidParameter("antenna counts must be at least 1".into()));
        }
        if self.k_null >= self.n_tx {
            return Err(Error::DegreesOfFreedom(format!(
                "k = {} must stay below N = {}",
                self.k_null, self.n_tx
            )));
        }
        if self.m_cancel >= self.m_rx {
            return Err(Error::DegreesOfFreedom(format!(
                "m = {} must stay below M = {}",
                self.m_cancel, self.m_rx
            )));
        }
        Ok(())
    }

    /// Regime-specific checks on top of [`validate`](Self::validate).
    pub fn validate_for(&self, regime: Regime) -> Result<()> {
        self.validate()?;
        match regime {
            Regime::Baseline => Ok(()),
            Regime::Siso => {
                if self.n_tx != 1 || self.m_rx != 1 {
                    Err(Error::InvalidParameter(format!(
                        "siso regime requires N = M = 1, got N = {}, M = {}",
                        self.n_tx, self.m_rx
                    )))
                } else {
                    Ok(())
                }
            }
            Regime::Miso => {
                if self.m_rx != 1 {
                    Err(Error::InvalidParameter(format!(
                        "miso regime requires M = 1, got M = {}",
                        self.m_rx
                    )))
                } else {
                    Ok(())
                }
            }
            Regime::Mimo => Ok(()),
        }
    }

    /// Transmit-nulling degrees of freedom actually used by a regime. The
    /// multi-antenna receive regime pins all but one transmit DOF on nulling.
    pub fn effective_k(&self, regime: Regime) -> usize {
        match regime {
            Regime::Baseline | Regime::Siso => 0,
            Regime::Miso => self.k_null,
            Regime::Mimo => self.n_tx - 1,
        }
    }

    /// Receive-cancelation degrees of freedom used by a regime.
    pub fn effective_m(&self, regime: Regime) -> usize {
        match regime {
            Regime::Mimo => self.m_cancel,
            _ => 0,
        }
    }

    /// Secondary rate log2(1 + beta_s) in bits/sec/Hz.
    pub fn secondary_rate(&self) -> f64 {
        (1.0 + self.beta_s).log2()
    }
}
