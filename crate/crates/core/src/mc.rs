//! Monte Carlo harness: outage estimation with Wilson confidence intervals,
//! maximum-intensity bisection on common random numbers, and the
//! distributional validation suites.
//!
//! Trials are independent work items; every per-trial generator is derived
//! from (master seed, trial index) alone and aggregation is exact integer
//! counting, so estimates are bit-identical for any worker count or
//! execution order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Network, Region};
use crate::scenario::{BindingConstraint, Regime, ScenarioConfig};
use crate::sir::fast::{
    interference_at_origin, interference_power_marked, primary_trial, secondary_trial, Coupling,
    TrialStreams,
};
use crate::stats::{ks_two_sample, wilson_interval, KsReport};

/// Execution parameters of a Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialPlan {
    pub trials: u64,
    pub master_seed: u64,
    /// Simulation disc radius in meters; `None` sizes the window from the
    /// truncation tolerance.
    pub region_radius: Option<f64>,
    /// Fraction eta of in-window interference the truncated tail may reach.
    pub truncation_tolerance: f64,
}

impl Default for TrialPlan {
    fn default() -> Self {
        TrialPlan {
            trials: 10_000,
            master_seed: 0xC0C0_CA90,
            region_radius: None,
            truncation_tolerance: 0.01,
        }
    }
}

impl TrialPlan {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trial count must be at least 1".into()));
        }
        if !(self.truncation_tolerance > 0.0 && self.truncation_tolerance <= 0.1) {
            return Err(Error::InvalidParameter(format!(
                "truncation tolerance must lie in (0, 0.1], got {}",
                self.truncation_tolerance
            )));
        }
        if let Some(r) = self.region_radius {
            Region::new(r)?;
        }
        Ok(())
    }
}

/// Which outage probability an estimate refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutageKind {
    /// Primary receiver without any secondary network.
    Baseline,
    Primary,
    Secondary,
}

/// A Monte Carlo outage probability with its 95% Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutageEstimate {
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: u64,
    pub which: OutageKind,
}

/// Window sizing: the expected truncated interference tail,
/// 2 pi lambda R^(2-alpha)/(alpha-2) per field, must stay below eta times
/// the expected in-window interference from beyond the mean
/// nearest-interferer distance. Summing both sides over the coexisting
/// fields with their P^(2/alpha) interference weights gives
///
///   R^(alpha-2) = (1+eta)/eta * (sum_i w_i) / (sum_i w_i rbar_i^(2-alpha)),
///   w_i = lambda_i P_i^(2/alpha),  rbar_i = 1 / (2 sqrt(lambda_i)),
///
/// which reduces to R = ((1+eta)/eta)^(1/(alpha-2)) rbar for a single field.
/// When transmit nulling is active the window is also floored at three
/// times the nulling-neighborhood radius sqrt((k+1)/(pi lambda_p)), so that
/// target sets near the probe are not clipped by the window edge.
pub fn auto_region(
    config: &ScenarioConfig,
    regime: Regime,
    plan: &TrialPlan,
    lambda_s_hint: f64,
) -> Result<Region> {
    if let Some(r) = plan.region_radius {
        return Region::new(r);
    }
    let two_over_alpha = 2.0 / config.alpha;
    let mut fields = Vec::new();
    if config.lambda_p > 0.0 {
        fields.push((config.lambda_p, config.p_p.powf(two_over_alpha)));
    }
    if regime != Regime::Baseline && lambda_s_hint > 0.0 {
        fields.push((lambda_s_hint, config.p_s.powf(two_over_alpha)));
    }
    let mut radius = if fields.is_empty() {
        100.0 * config.d_p.max(config.d_s).max(1.0)
    } else {
        let eta = plan.truncation_tolerance;
        let weight: f64 = fields.iter().map(|&(l, w)| l * w).sum();
        let tail_ref: f64 = fields
            .iter()
            .map(|&(l, w)| l * w * (2.0 * l.sqrt()).powf(config.alpha - 2.0))
            .sum();
        let r_pow = (1.0 + eta) / eta * weight / tail_ref;
        let radius = r_pow.powf(1.0 / (config.alpha - 2.0));
        if !radius.is_finite() || radius > 1e7 {
            return Err(Error::Divergent(format!(
                "window sizing explodes for alpha = {}; supply region_radius explicitly",
                config.alpha
            )));
        }
        radius
    };
    let k_eff = config.effective_k(regime);
    if k_eff > 0 && config.lambda_p > 0.0 {
        let nulling_radius =
            ((k_eff as f64 + 1.0) / (std::f64::consts::PI * config.lambda_p)).sqrt();
        radius = radius.max(3.0 * nulling_radius);
    }
    Region::new(radius)
}

fn probe_of(which: OutageKind) -> Network {
    match which {
        OutageKind::Baseline | OutageKind::Primary => Network::Primary,
        OutageKind::Secondary => Network::Secondary,
    }
}

/// Outage estimate at the configured intensities. Trial `t` draws all of its
/// randomness from generators derived from `(plan.master_seed, t)`.
pub fn estimate_outage(
    config: &ScenarioConfig,
    regime: Regime,
    which: OutageKind,
    plan: &TrialPlan,
) -> Result<OutageEstimate> {
    let effective_regime = if which == OutageKind::Baseline { Regime::Baseline } else { regime };
    config.validate_for(effective_regime)?;
    plan.validate()?;
    let region = auto_region(config, effective_regime, plan, config.lambda_s)?;
    estimate_with(config, effective_regime, which, plan, region, Coupling::fixed(config.lambda_s))
}

/// Outage estimate with an explicit window and intensity coupling; the
/// entry point used by the intensity search.
pub fn estimate_with(
    config: &ScenarioConfig,
    regime: Regime,
    which: OutageKind,
    plan: &TrialPlan,
    region: Region,
    coupling: Coupling,
) -> Result<OutageEstimate> {
    let probe = probe_of(which);
    let threshold = match which {
        OutageKind::Baseline | OutageKind::Primary => config.beta_p,
        OutageKind::Secondary => config.beta_s,
    };
    let outages: u64 = (0..plan.trials)
        .into_par_iter()
        .map(|t| -> Result<u64> {
            let streams = TrialStreams::new(plan.master_seed, t, probe);
            let sir = match probe {
                Network::Primary => {
                    primary_trial(config, regime, region, &streams, coupling)
                        .sir(config.canceled_mode)
                }
                Network::Secondary => {
                    secondary_trial(config, regime, region, &streams, coupling)
                        .map_err(|e| Error::Trial { trial: t, message: e.to_string() })?
                        .sir
                }
            };
            Ok(u64::from(sir <= threshold))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let p_hat = outages as f64 / plan.trials as f64;
    let (ci_low, ci_high) = wilson_interval(outages, plan.trials);
    Ok(OutageEstimate { p_hat, ci_low, ci_high, trials: plan.trials, which })
}

/// Result of the maximum-intensity search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntensitySearchResult {
    /// Largest evaluated intensity satisfying both constraints.
    pub lambda_star_mc: f64,
    /// (last feasible, first infeasible) intensity bracket.
    pub bracket: (f64, f64),
    pub evaluations: usize,
    pub binding_constraint: BindingConstraint,
    /// Outage estimates at `lambda_star_mc`.
    pub primary_outage: OutageEstimate,
    pub secondary_outage: OutageEstimate,
    pub region_radius: f64,
}

fn starting_guess(config: &ScenarioConfig, regime: Regime) -> f64 {
    let siso = ScenarioConfig { n_tx: 1, m_rx: 1, k_null: 0, m_cancel: 0, ..*config };
    let base = match crate::analytic::lambda_star_siso(&siso, crate::analytic::CrossPowerMode::Corrected)
    {
        Ok(r) if r.lambda_star > 0.0 => r.lambda_star,
        _ => (config.lambda_p / 2.0).max(1e-4),
    };
    // The secondary-side cap grows like (spare DOF)^(2/alpha); start the
    // bracketing near it to save doubling rounds.
    let spare = match regime {
        Regime::Miso => config.n_tx - config.effective_k(regime),
        Regime::Mimo => config.m_rx - config.effective_m(regime),
        _ => 1,
    };
    base * (spare.max(1) as f64).powf(2.0 / config.alpha)
}

struct ConstraintEval {
    primary: OutageEstimate,
    secondary: OutageEstimate,
    feasible: bool,
}

/// Bisection for the largest secondary intensity satisfying both outage
/// constraints.
///
/// All bisection levels share a candidate point process drawn at the bracket
/// top and thinned per level (common random numbers), which makes the
/// empirical outage monotone in the intensity trial by trial; a violation
/// beyond the confidence intervals aborts with a diagnostic. Terminates when
/// the bracket width falls below `tolerance` times its midpoint.
pub fn max_intensity_search(
    config: &ScenarioConfig,
    regime: Regime,
    plan: &TrialPlan,
    tolerance: f64,
) -> Result<IntensitySearchResult> {
    if regime == Regime::Baseline {
        return Err(Error::InvalidParameter(
            "the intensity search needs a secondary network; baseline has none".into(),
        ));
    }
    config.validate_for(regime)?;
    plan.validate()?;
    if !(tolerance > 0.0 && tolerance < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "relative tolerance must lie in (0,1), got {tolerance}"
        )));
    }
    let p_budget = config.eps_p_nc + config.delta_p;
    // With no primary network there are almost surely no primary receivers,
    // so the primary outage constraint quantifies over an empty set and only
    // the secondary constraint limits the intensity.
    let primary_constraint_active = config.lambda_p > 0.0;
    let guess = starting_guess(config, regime);
    let region = auto_region(config, regime, plan, guess)?;
    let mut evaluations = 0usize;

    let mut eval = |lambda: f64, cap: f64| -> Result<ConstraintEval> {
        evaluations += 1;
        let coupling = Coupling::thinned(cap.max(lambda), lambda)?;
        let primary = estimate_with(config, regime, OutageKind::Primary, plan, region, coupling)?;
        let secondary =
            estimate_with(config, regime, OutageKind::Secondary, plan, region, coupling)?;
        let feasible = (!primary_constraint_active || primary.p_hat <= p_budget)
            && secondary.p_hat <= config.eps_s;
        Ok(ConstraintEval { primary, secondary, feasible })
    };

    // Feasibility at vanishing secondary intensity.
    let at_zero = eval(0.0, 0.0)?;
    if !at_zero.feasible {
        let binding = if primary_constraint_active && at_zero.primary.p_hat > p_budget {
            BindingConstraint::PrimaryOutage
        } else {
            BindingConstraint::SecondaryOutage
        };
        return Ok(IntensitySearchResult {
            lambda_star_mc: 0.0,
            bracket: (0.0, 0.0),
            evaluations,
            binding_constraint: binding,
            primary_outage: at_zero.primary,
            secondary_outage: at_zero.secondary,
            region_radius: region.radius,
        });
    }

    // Geometric bracketing: double until infeasible, or halve until
    // feasible when the initial guess overshoots (keeps the bisection cap,
    // and with it the candidate process, near the answer).
    let mut lo = 0.0f64;
    let mut lo_eval = at_zero;
    let mut hi = guess.max(1e-6);
    let mut hi_eval = eval(hi, hi)?;
    let mut rounds = 0;
    if hi_eval.feasible {
        while hi_eval.feasible {
            lo = hi;
            lo_eval = hi_eval;
            hi *= 2.0;
            hi_eval = eval(hi, hi)?;
            rounds += 1;
            if rounds > 60 {
                return Err(Error::NonMonotone(format!(
                    "no infeasible intensity found up to lambda_s = {hi}"
                )));
            }
        }
    } else {
        loop {
            let probe = hi / 2.0;
            if probe < 1e-12 {
                break;
            }
            let probe_eval = eval(probe, probe)?;
            rounds += 1;
            if probe_eval.feasible {
                // bracket [probe, hi]; hi was already evaluated at its own cap
                lo = probe;
                lo_eval = probe_eval;
                break;
            }
            hi = probe;
            hi_eval = probe_eval;
            if rounds > 60 {
                break;
            }
        }
    }

    // Bisection on common random numbers: every level draws candidates at
    // the bracket top and thins down to the midpoint. The shared candidate
    // process makes the per-trial SIR monotone in the intensity, so among
    // these coupled evaluations the outage estimates must be monotone up to
    // CI noise; a violation is an engine fault, not sampling noise. The
    // doubling-phase evaluations below `hi` used different caps and stay out
    // of the comparison.
    let cap = hi;
    let mut history: Vec<(f64, f64, f64)> =
        vec![(hi, hi_eval.primary.p_hat, hi_eval.secondary.p_hat)];
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if mid <= 0.0 || (hi - lo) / mid < tolerance {
            break;
        }
        let mid_eval = eval(mid, cap)?;
        for &(l, pp, ps) in &history {
            let slack_p = (mid_eval.primary.ci_high - mid_eval.primary.ci_low).max(1e-9);
            let slack_s = (mid_eval.secondary.ci_high - mid_eval.secondary.ci_low).max(1e-9);
            if (mid > l && (pp - mid_eval.primary.p_hat > slack_p || ps - mid_eval.secondary.p_hat > slack_s))
                || (mid < l && (mid_eval.primary.p_hat - pp > slack_p || mid_eval.secondary.p_hat - ps > slack_s))
            {
                return Err(Error::NonMonotone(format!(
                    "outage at lambda_s = {mid} inconsistent with lambda_s = {l}; history: {history:?}"
                )));
            }
        }
        history.push((mid, mid_eval.primary.p_hat, mid_eval.secondary.p_hat));
        if mid_eval.feasible {
            lo = mid;
            lo_eval = mid_eval;
        } else {
            hi = mid;
            hi_eval = mid_eval;
        }
    }

    // Binding constraint: whichever is violated at the infeasible end
    // (larger relative excess when both are).
    let excess_p = hi_eval.primary.p_hat / p_budget.max(1e-12);
    let excess_s = hi_eval.secondary.p_hat / config.eps_s.max(1e-12);
    let binding = if primary_constraint_active
        && hi_eval.primary.p_hat > p_budget
        && (hi_eval.secondary.p_hat <= config.eps_s || excess_p >= excess_s)
    {
        BindingConstraint::PrimaryOutage
    } else {
        BindingConstraint::SecondaryOutage
    };

    Ok(IntensitySearchResult {
        lambda_star_mc: lo,
        bracket: (lo, hi),
        evaluations,
        binding_constraint: binding,
        primary_outage: lo_eval.primary,
        secondary_outage: lo_eval.secondary,
        region_radius: region.radius,
    })
}

/// Report of the single-field equivalence check: interference from the two
/// coexisting fields versus one unit-power field at the combined intensity
/// lambda_p P_p^(2/alpha) + lambda_s P_s^(2/alpha), plus a deliberately
/// mis-scaled negative control at half that intensity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperpositionReport {
    pub matched: KsReport,
    pub control: KsReport,
    pub equivalent_intensity: f64,
}

pub fn validate_superposition(config: &ScenarioConfig, plan: &TrialPlan) -> Result<SuperpositionReport> {
    config.validate()?;
    plan.validate()?;
    if !(config.lambda_p > 0.0 && config.lambda_s > 0.0) {
        return Err(Error::InvalidParameter(
            "superposition check needs both intensities positive".into(),
        ));
    }
    let region = auto_region(config, Regime::Siso, plan, config.lambda_s)?;
    let eq = config.lambda_p * config.p_p.powf(2.0 / config.alpha)
        + config.lambda_s * config.p_s.powf(2.0 / config.alpha);
    let fields_two = [(config.lambda_p, config.p_p), (config.lambda_s, config.p_s)];
    let draw = |tag: u8, fields: Vec<(f64, f64)>| -> Vec<f64> {
        (0..plan.trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = TrialStreams::new(plan.master_seed, t, Network::Primary)
                    .aux_rng(tag);
                interference_at_origin(&fields, config.alpha, region, &mut rng)
            })
            .collect()
    };
    let two = draw(0, fields_two.to_vec());
    let one = draw(1, vec![(eq, 1.0)]);
    let half = draw(2, vec![(eq / 2.0, 1.0)]);
    Ok(SuperpositionReport {
        matched: ks_two_sample(&two, &one),
        control: ks_two_sample(&two, &half),
        equivalent_intensity: eq,
    })
}

/// Interference from the two-network construction versus a single PPP at
/// the combined intensity whose points carry a random power mark, P_p with
/// probability lambda_p/(lambda_p+lambda_s) and P_s otherwise.
pub fn validate_power_marks(config: &ScenarioConfig, plan: &TrialPlan) -> Result<KsReport> {
    config.validate()?;
    plan.validate()?;
    if !(config.lambda_p > 0.0 && config.lambda_s > 0.0) {
        return Err(Error::InvalidParameter(
            "power-mark check needs both intensities positive".into(),
        ));
    }
    let region = auto_region(config, Regime::Siso, plan, config.lambda_s)?;
    let share = config.lambda_p / (config.lambda_p + config.lambda_s);
    let two: Vec<f64> = (0..plan.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = TrialStreams::new(plan.master_seed, t, Network::Primary).aux_rng(3);
            interference_at_origin(
                &[(config.lambda_p, config.p_p), (config.lambda_s, config.p_s)],
                config.alpha,
                region,
                &mut rng,
            )
        })
        .collect();
    let marked: Vec<f64> = (0..plan.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = TrialStreams::new(plan.master_seed, t, Network::Primary).aux_rng(4);
            interference_power_marked(
                config.lambda_p + config.lambda_s,
                share,
                config.p_p,
                config.p_s,
                config.alpha,
                region,
                &mut rng,
            )
        })
        .collect();
    Ok(ks_two_sample(&two, &marked))
}

/// One entry of the distributional validation suite.
#[derive(Debug, Clone, Serialize)]
pub struct LemmaCheck {
    pub name: String,
    pub statistic: f64,
    pub p_value: f64,
    pub pass: bool,
    pub detail: String,
}

impl LemmaCheck {
    fn from_ks(name: &str, rep: KsReport, detail: String) -> LemmaCheck {
        LemmaCheck {
            name: name.into(),
            statistic: rep.statistic,
            p_value: rep.p_value,
            pass: rep.p_value > 0.01,
            detail,
        }
    }
}

/// Distributional checks on the beamformer / combiner constructions at the
/// reference antenna configuration N = 4, k = 2, M = 4, m = 2: signal gains
/// against Gamma(spare DOF, 1), independent-endpoint gains against Exp(1),
/// and the nulling / cancelation residuals.
pub fn validate_lemmas(samples: usize, master_seed: u64) -> Result<Vec<LemmaCheck>> {
    use crate::channel::{
        cancelation_null_space, dot_h, dot_row, draw_gaussian_matrix, draw_gaussian_vector,
        null_space_basis, receive_combiner, transmit_beamformer,
    };
    use crate::stats::{exp1_cdf, gamma_unit_scale_cdf, ks_one_sample};
    use rand::SeedableRng;

    if samples < 100 {
        return Err(Error::InvalidParameter("lemma suite needs at least 100 samples".into()));
    }
    let (n, k, m_rx, m) = (4usize, 2usize, 4usize, 2usize);
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(master_seed);

    let mut tx_signal = Vec::with_capacity(samples);
    let mut tx_cross_secondary = Vec::with_capacity(samples);
    let mut tx_cross_primary = Vec::with_capacity(samples);
    let mut rx_signal = Vec::with_capacity(samples);
    let mut rx_cross_secondary = Vec::with_capacity(samples);
    let mut rx_cross_primary = Vec::with_capacity(samples);
    let mut max_null_residual = 0.0f64;
    let mut max_cancel_residual = 0.0f64;

    for _ in 0..samples {
        // Transmit side: null toward k receivers, beamform on the own row.
        let rows: Vec<_> = (0..k).map(|_| draw_gaussian_vector(n, &mut rng)).collect();
        let ns = null_space_basis(n, &rows)?;
        let own = draw_gaussian_vector(n, &mut rng);
        let bf = transmit_beamformer(&own, &ns)?;
        max_null_residual = max_null_residual.max(bf.max_residual());
        tx_signal.push(bf.signal_gain);
        let q_other = draw_gaussian_vector(n, &mut rng);
        tx_cross_secondary.push(dot_row(&q_other, &bf.vector).norm_sqr());
        let g_other = draw_gaussian_vector(n, &mut rng);
        tx_cross_primary.push(dot_row(&g_other, &bf.vector).norm_sqr());

        // Receive side: cancel m effective channels, combine on the signal.
        let canceled: Vec<_> = (0..m).map(|_| draw_gaussian_vector(m_rx, &mut rng)).collect();
        let cns = cancelation_null_space(m_rx, &canceled)?;
        let q00 = draw_gaussian_matrix(m_rx, n, &mut rng)?;
        let effective = q00.mul_vec(&bf.vector)?;
        let comb = receive_combiner(&effective, &cns)?;
        max_cancel_residual = max_cancel_residual.max(comb.max_residual());
        rx_signal.push(comb.signal_gain);
        let qu_other = draw_gaussian_vector(m_rx, &mut rng);
        rx_cross_secondary.push(dot_h(&comb.vector, &qu_other).norm_sqr());
        let f_other = draw_gaussian_vector(m_rx, &mut rng);
        rx_cross_primary.push(dot_h(&comb.vector, &f_other).norm_sqr());
    }

    let spare_tx = (n - k) as f64;
    let spare_rx = (m_rx - m) as f64;
    let mut checks = vec![
        LemmaCheck::from_ks(
            "tx beamforming gain ~ Gamma(N-k, 1)",
            ks_one_sample(&tx_signal, |x| gamma_unit_scale_cdf(spare_tx, x)),
            format!("N = {n}, k = {k}, {samples} samples"),
        ),
        LemmaCheck::from_ks(
            "beamformed gain toward independent secondary receiver ~ Exp(1)",
            ks_one_sample(&tx_cross_secondary, exp1_cdf),
            format!("{samples} samples"),
        ),
        LemmaCheck::from_ks(
            "beamformed gain toward independent primary receiver ~ Exp(1)",
            ks_one_sample(&tx_cross_primary, exp1_cdf),
            format!("{samples} samples"),
        ),
        LemmaCheck::from_ks(
            "rx combining gain ~ Gamma(M-m, 1)",
            ks_one_sample(&rx_signal, |x| gamma_unit_scale_cdf(spare_rx, x)),
            format!("M = {m_rx}, m = {m}, {samples} samples"),
        ),
        LemmaCheck::from_ks(
            "combined gain from independent secondary interferer ~ Exp(1)",
            ks_one_sample(&rx_cross_secondary, exp1_cdf),
            format!("{samples} samples"),
        ),
        LemmaCheck::from_ks(
            "combined gain from independent primary interferer ~ Exp(1)",
            ks_one_sample(&rx_cross_primary, exp1_cdf),
            format!("{samples} samples"),
        ),
    ];
    checks.push(LemmaCheck {
        name: "nulling residuals below 1e-8".into(),
        statistic: max_null_residual,
        p_value: f64::NAN,
        pass: max_null_residual < 1e-8,
        detail: format!("max |g.u| over {samples} draws"),
    });
    checks.push(LemmaCheck {
        name: "cancelation residuals below 1e-8".into(),
        statistic: max_cancel_residual,
        p_value: f64::NAN,
        pass: max_cancel_residual < 1e-8,
        detail: format!("max |t*.c| over {samples} draws"),
    });
    Ok(checks)
}

/// Empirical distribution of the canceled count C at the typical primary
/// receiver, under both canceled-set conventions.
#[derive(Debug, Clone, PartialEq)]
pub struct CanceledCountReport {
    /// histogram_*[c] = number of trials with C = c.
    pub histogram_exact: Vec<u64>,
    pub histogram_prefix: Vec<u64>,
    pub trials: u64,
    /// Trials where the prefix count exceeded the exact count (always 0).
    pub order_violations: u64,
}

impl CanceledCountReport {
    pub fn prob_at_least(histogram: &[u64], trials: u64, c: usize) -> f64 {
        let n: u64 = histogram.iter().skip(c).sum();
        n as f64 / trials as f64
    }
}

pub fn empirical_c_distribution(
    config: &ScenarioConfig,
    regime: Regime,
    plan: &TrialPlan,
) -> Result<CanceledCountReport> {
    if !matches!(regime, Regime::Miso | Regime::Mimo) {
        return Err(Error::InvalidParameter(
            "canceled-count statistics need a nulling regime".into(),
        ));
    }
    config.validate_for(regime)?;
    plan.validate()?;
    let region = auto_region(config, regime, plan, config.lambda_s)?;
    let counts: Vec<(u32, u32)> = (0..plan.trials)
        .into_par_iter()
        .map(|t| {
            let streams = TrialStreams::new(plan.master_seed, t, Network::Primary);
            let s = primary_trial(config, regime, region, &streams, Coupling::fixed(config.lambda_s));
            (s.c_exact, s.c_prefix)
        })
        .collect();
    let max_c = counts.iter().map(|c| c.0.max(c.1)).max().unwrap_or(0) as usize;
    let mut histogram_exact = vec![0u64; max_c + 1];
    let mut histogram_prefix = vec![0u64; max_c + 1];
    let mut order_violations = 0u64;
    for (e, p) in counts {
        histogram_exact[e as usize] += 1;
        histogram_prefix[p as usize] += 1;
        if p > e {
            order_violations += 1;
        }
    }
    Ok(CanceledCountReport {
        histogram_exact,
        histogram_prefix,
        trials: plan.trials,
        order_violations,
    })
}
