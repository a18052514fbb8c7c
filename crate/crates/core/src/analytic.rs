//! Closed-form capacity expressions: the interference constant c1, the
//! baseline outage of a Rayleigh shot-noise field, the exact single-antenna
//! secondary intensity, transmission capacity, and the multi-antenna scaling
//! exponents with a log-log fitter for validating them empirically.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{BindingConstraint, Regime, ScenarioConfig};

/// Minimum distance from the alpha = 2 pole before c1 is considered
/// divergent.
const ALPHA_POLE_MARGIN: f64 = 1e-6;

/// c1(alpha) = 2 pi^2 csc(2 pi / alpha) / alpha, the constant of the PPP
/// shot-noise Laplace transform under Rayleigh fading.
pub fn c1(alpha: f64) -> Result<f64> {
    if !alpha.is_finite() || alpha < 2.0 + ALPHA_POLE_MARGIN {
        return Err(Error::Divergent(format!(
            "c1 diverges as alpha approaches 2 from above, got alpha = {alpha}"
        )));
    }
    let x = 2.0 * std::f64::consts::PI / alpha;
    Ok(2.0 * std::f64::consts::PI * std::f64::consts::PI / (alpha * x.sin()))
}

/// Outage probability of a typical link of a single network:
/// 1 - exp(-lambda c1 beta^(2/alpha) d^2).
pub fn baseline_outage(lambda: f64, beta: f64, d: f64, alpha: f64) -> Result<f64> {
    if !(lambda >= 0.0) || !(beta > 0.0) || !(d > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "baseline outage needs lambda >= 0, beta > 0, d > 0; got {lambda}, {beta}, {d}"
        )));
    }
    let c = c1(alpha)?;
    Ok(1.0 - (-lambda * c * beta.powf(2.0 / alpha) * d * d).exp())
}

/// Laplace transform of unit-power PPP shot-noise interference with Rayleigh
/// fading, evaluated at `arg`: exp(-lambda c1 arg^(2/alpha)).
pub fn success_laplace(arg: f64, lambda: f64, alpha: f64) -> Result<f64> {
    if !(arg >= 0.0) || !(lambda >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Laplace transform needs arg >= 0 and lambda >= 0; got {arg}, {lambda}"
        )));
    }
    let c = c1(alpha)?;
    Ok((-lambda * c * arg.powf(2.0 / alpha)).exp())
}

/// Which form of the cross-power factor enters the secondary-outage term of
/// the single-antenna intensity expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CrossPowerMode {
    /// The published form, whose cross-power factor simplifies to
    /// beta_s^(2/alpha): the primary-caused interference at the secondary
    /// receiver is scaled as if it were transmitted at secondary power.
    PaperLiteral,
    /// Cross-power factor (P_p beta_s / P_s)^(2/alpha): primary interference
    /// at the secondary receiver carries the primary transmit power. This is
    /// the form consistent with the two-network outage derivation.
    #[default]
    Corrected,
}

impl std::fmt::Display for CrossPowerMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CrossPowerMode::PaperLiteral => "paper_literal",
            CrossPowerMode::Corrected => "corrected",
        })
    }
}

/// Closed-form maximum secondary intensity and the derived capacity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityResult {
    /// min of the two constraint terms, clamped at zero.
    pub lambda_star: f64,
    pub binding_constraint: BindingConstraint,
    /// Intensity cap imposed by the primary outage budget.
    pub first_term: f64,
    /// Intensity cap imposed by the secondary outage constraint.
    pub second_term: f64,
    /// lambda_star * (1 - eps_s) * log2(1 + beta_s), bits/sec/Hz/m^2.
    pub capacity: f64,
}

/// Exact maximum secondary intensity for single-antenna nodes.
///
/// First term: -ln((1 - eps_p_nc - delta_p) / (1 - eps_p_nc)) / d_p^2 *
/// (P_p / (P_s beta_p))^(alpha/2). Second term:
/// (-ln(1 - eps_s) - lambda_p c1 d_s^2 X^(2/alpha)) / (c1 beta_s^(2/alpha)
/// d_s^2), with X chosen by `mode`. Returns a warning-free result; an
/// `eps_p_nc` inconsistent with `lambda_p` (beyond 1e-6) is reported through
/// the `consistency_gap` field of the extended result.
pub fn lambda_star_siso(config: &ScenarioConfig, mode: CrossPowerMode) -> Result<CapacityResult> {
    let survivor = 1.0 - config.eps_p_nc;
    let remaining = survivor - config.delta_p;
    if remaining <= 0.0 {
        return Err(Error::Infeasible(format!(
            "delta_p = {} consumes the whole success budget 1 - eps_p_nc = {survivor}",
            config.delta_p
        )));
    }
    config.validate()?;
    let c = c1(config.alpha)?;
    let first_term = -(remaining / survivor).ln() / (config.d_p * config.d_p)
        * (config.p_p / (config.p_s * config.beta_p)).powf(config.alpha / 2.0);

    let cross = match mode {
        CrossPowerMode::PaperLiteral => config.beta_s,
        CrossPowerMode::Corrected => config.p_p * config.beta_s / config.p_s,
    };
    let ds2 = config.d_s * config.d_s;
    let two_over_alpha = 2.0 / config.alpha;
    let second_term = (-(1.0 - config.eps_s).ln()
        - config.lambda_p * c * ds2 * cross.powf(two_over_alpha))
        / (c * config.beta_s.powf(two_over_alpha) * ds2);

    let (binding_constraint, raw) = if first_term <= second_term {
        (BindingConstraint::PrimaryOutage, first_term)
    } else {
        (BindingConstraint::SecondaryOutage, second_term)
    };
    let lambda_star = raw.max(0.0);
    Ok(CapacityResult {
        lambda_star,
        binding_constraint,
        first_term,
        second_term,
        capacity: transmission_capacity(lambda_star, config.eps_s, config.beta_s)?,
    })
}

/// Gap between the configured `eps_p_nc` and the value implied by
/// `lambda_p`; callers treat gaps above 1e-6 as a consistency warning.
pub fn eps_p_nc_consistency_gap(config: &ScenarioConfig) -> Result<f64> {
    let implied = baseline_outage(config.lambda_p, config.beta_p, config.d_p, config.alpha)?;
    Ok((implied - config.eps_p_nc).abs())
}

/// Transmission capacity lambda_star * (1 - eps_s) * log2(1 + beta_s).
pub fn transmission_capacity(lambda_star: f64, eps_s: f64, beta_s: f64) -> Result<f64> {
    if !(lambda_star >= 0.0) || !(0.0..=1.0).contains(&eps_s) || !(beta_s >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "capacity needs lambda >= 0, eps in [0,1], beta >= 0; got {lambda_star}, {eps_s}, {beta_s}"
        )));
    }
    Ok(lambda_star * (1.0 - eps_s) * (1.0 + beta_s).log2())
}

/// Theoretical scaling exponents of the secondary intensity in the antenna
/// count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingBound {
    pub lower_exponent: f64,
    pub upper_exponent: f64,
    /// The antenna count the exponents refer to.
    pub variable: ScalingVariable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingVariable {
    N,
    M,
}

impl std::fmt::Display for ScalingVariable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ScalingVariable::N => "N",
            ScalingVariable::M => "M",
        })
    }
}

/// Scaling exponents of the maximum secondary intensity.
///
/// Transmit-only nulling: lower bound exponent min(2/alpha, 1 - 2/alpha),
/// upper bound 2/alpha, both in N. Joint transmit/receive: with one transmit
/// antenna both bounds are constant in M (the intensity is pinned by the
/// primary-side constraint); otherwise, under fixed-ratio growth of M and N,
/// the binding branches are N^(1 - 2/alpha) below and N above.
pub fn scaling_bounds(regime: Regime, alpha: f64, n: usize, m: usize) -> Result<ScalingBound> {
    if !(alpha > 2.0) {
        return Err(Error::Divergent(format!("alpha must exceed 2, got {alpha}")));
    }
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter("antenna counts must be at least 1".into()));
    }
    let t = 2.0 / alpha;
    match regime {
        Regime::Miso => Ok(ScalingBound {
            lower_exponent: t.min(1.0 - t),
            upper_exponent: t,
            variable: ScalingVariable::N,
        }),
        Regime::Mimo => {
            if n == 1 {
                // No transmit nulling is possible, the primary constraint
                // binds and the intensity does not scale with M.
                Ok(ScalingBound {
                    lower_exponent: 0.0,
                    upper_exponent: 0.0,
                    variable: ScalingVariable::M,
                })
            } else {
                Ok(ScalingBound {
                    lower_exponent: 1.0 - t,
                    upper_exponent: 1.0,
                    variable: ScalingVariable::N,
                })
            }
        }
        Regime::Baseline | Regime::Siso => Err(Error::InvalidParameter(format!(
            "scaling bounds are defined for multi-antenna regimes, got {regime}"
        ))),
    }
}

/// Least-squares slope of ln(lambda_star) against ln(size): the measured
/// scaling exponent, with intercept and RMS residual.
pub fn fit_scaling_exponent(points: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    if points.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "exponent fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    for w in points.windows(2) {
        if w[1].0 <= w[0].0 {
            return Err(Error::InvalidParameter(
                "sizes must be strictly increasing".into(),
            ));
        }
    }
    if points.iter().any(|&(s, v)| s <= 0.0 || v <= 0.0) {
        return Err(Error::Domain(
            "exponent fit needs positive sizes and values".into(),
        ));
    }
    let x: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    Ok(crate::stats::least_squares(&x, &y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::CanceledMode;
    use statrs::function::gamma::gamma;

    fn vi_preset(lambda_p: f64) -> ScenarioConfig {
        ScenarioConfig {
            alpha: 3.0,
            p_p: 2.0,
            p_s: 1.0,
            d_p: 1.0,
            d_s: 1.0,
            beta_p: 1.0,
            beta_s: 1.0,
            lambda_p,
            lambda_s: 0.0,
            n_tx: 1,
            m_rx: 1,
            k_null: 0,
            m_cancel: 0,
            eps_p_nc: baseline_outage(lambda_p, 1.0, 1.0, 3.0).unwrap(),
            delta_p: 0.05,
            eps_s: 0.1,
            canceled_mode: CanceledMode::ExactSet,
        }
    }

    #[test]
    fn c1_reference_values() {
        // alpha = 4: pi^2/2
        assert!((c1(4.0).unwrap() - std::f64::consts::PI.powi(2) / 2.0).abs() < 1e-12);
        // alpha = 3: 4 pi^2 / (3 sqrt(3)), frozen from exact evaluation
        assert!((c1(3.0).unwrap() - 7.597625010352075).abs() < 1e-12);
    }

    #[test]
    fn c1_agrees_with_gamma_product_identity() {
        // Independent route: c1 = pi * Gamma(1 + 2/a) Gamma(1 - 2/a) through
        // the gamma function rather than the cosecant.
        for alpha in [2.5, 3.0, 3.5, 4.0, 5.0, 6.0] {
            let t = 2.0 / alpha;
            let via_gamma = std::f64::consts::PI * gamma(1.0 + t) * gamma(1.0 - t);
            assert!(
                (c1(alpha).unwrap() - via_gamma).abs() < 1e-10 * via_gamma,
                "alpha {alpha}"
            );
        }
    }

    #[test]
    fn c1_diverges_at_the_pole() {
        assert!(matches!(c1(2.0), Err(Error::Divergent(_))));
        assert!(matches!(c1(2.0 + 1e-9), Err(Error::Divergent(_))));
        assert!(c1(2.0 + 1e-3).unwrap() > 1e2);
    }

    #[test]
    fn baseline_outage_reference_values() {
        assert_eq!(baseline_outage(0.0, 1.0, 1.0, 3.0).unwrap(), 0.0);
        // frozen from exact evaluation of 1 - exp(-lambda c1)
        assert!((baseline_outage(0.01, 1.0, 1.0, 3.0).unwrap() - 0.07316178139026576).abs() < 1e-12);
        assert!((baseline_outage(0.005, 1.0, 1.0, 3.0).unwrap() - 0.03727562687457931).abs() < 1e-12);
    }

    #[test]
    fn baseline_outage_is_strictly_increasing() {
        let mut prev = 0.0;
        for lambda in [0.001, 0.002, 0.005, 0.01, 0.02] {
            let p = baseline_outage(lambda, 1.0, 1.0, 3.0).unwrap();
            assert!(p > prev);
            prev = p;
        }
        let base = baseline_outage(0.01, 1.0, 1.0, 3.0).unwrap();
        assert!(baseline_outage(0.01, 2.0, 1.0, 3.0).unwrap() > base);
        assert!(baseline_outage(0.01, 1.0, 2.0, 3.0).unwrap() > base);
    }

    #[test]
    fn laplace_reference_values_and_identity() {
        assert_eq!(success_laplace(0.0, 0.01, 3.0).unwrap(), 1.0);
        assert!((success_laplace(8.0, 0.01, 3.0).unwrap() - 0.7379309662570419).abs() < 1e-12);
        // success + outage = 1 exactly when evaluated at beta d^alpha
        for (lambda, beta, d, alpha) in
            [(0.01, 1.0, 1.0f64, 3.0), (0.004, 2.0, 1.5, 3.7), (0.02, 0.5, 0.8, 4.0)]
        {
            let s = success_laplace(beta * d.powf(alpha), lambda, alpha).unwrap();
            let o = baseline_outage(lambda, beta, d, alpha).unwrap();
            assert_eq!(s + o, 1.0);
        }
    }

    #[test]
    fn lambda_star_zero_tolerance_gives_zero() {
        let mut c = vi_preset(0.005);
        c.delta_p = 0.0;
        let r = lambda_star_siso(&c, CrossPowerMode::Corrected).unwrap();
        assert_eq!(r.lambda_star, 0.0);
        assert_eq!(r.binding_constraint, BindingConstraint::PrimaryOutage);
        assert_eq!(r.capacity, 0.0);
    }

    #[test]
    fn lambda_star_secondary_only_case() {
        // lambda_p = 0: second term 0.0138676 binds, first term 0.1450793.
        let mut c = vi_preset(0.0);
        c.eps_p_nc = 0.0;
        let r = lambda_star_siso(&c, CrossPowerMode::Corrected).unwrap();
        assert!((r.first_term - 0.14507934516333944).abs() < 1e-10);
        assert!((r.second_term - 0.013867559337854696).abs() < 1e-10);
        assert_eq!(r.binding_constraint, BindingConstraint::SecondaryOutage);
        assert!((r.lambda_star - 0.013867559337854696).abs() < 1e-10);
    }

    #[test]
    fn lambda_star_vi_preset_corrected_mode() {
        let c = vi_preset(0.005);
        let r = lambda_star_siso(&c, CrossPowerMode::Corrected).unwrap();
        assert!((r.first_term - 0.15084909878306414).abs() < 1e-10);
        assert!((r.second_term - 0.005930554078013699).abs() < 1e-10);
        assert_eq!(r.binding_constraint, BindingConstraint::SecondaryOutage);
        assert!((r.capacity - 0.005337498670212329).abs() < 1e-10);

        let lit = lambda_star_siso(&c, CrossPowerMode::PaperLiteral).unwrap();
        assert!((lit.second_term - 0.008867559337854696).abs() < 1e-10);
    }

    #[test]
    fn lambda_star_infeasible_budget_errors() {
        let mut c = vi_preset(0.005);
        c.eps_p_nc = 0.4;
        c.delta_p = 0.6;
        match lambda_star_siso(&c, CrossPowerMode::Corrected) {
            Err(Error::Infeasible(_)) => {}
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn lambda_star_monotonicity_over_grids() {
        // On the secondary-bound branch lambda_star is nonincreasing in
        // lambda_p; it is nondecreasing in delta_p and eps_s everywhere.
        let mut prev = f64::INFINITY;
        for lambda_p in [0.002, 0.004, 0.006, 0.008, 0.01] {
            let r = lambda_star_siso(&vi_preset(lambda_p), CrossPowerMode::Corrected).unwrap();
            assert!(r.lambda_star <= prev + 1e-15);
            prev = r.lambda_star;
        }
        let mut prev = -1.0;
        for delta_p in [0.01, 0.02, 0.05, 0.08, 0.12] {
            let mut c = vi_preset(0.005);
            c.delta_p = delta_p;
            let r = lambda_star_siso(&c, CrossPowerMode::Corrected).unwrap();
            assert!(r.lambda_star >= prev - 1e-15);
            prev = r.lambda_star;
        }
        let mut prev = -1.0;
        for eps_s in [0.05, 0.1, 0.15, 0.2] {
            let mut c = vi_preset(0.005);
            c.eps_s = eps_s;
            let r = lambda_star_siso(&c, CrossPowerMode::Corrected).unwrap();
            assert!(r.lambda_star >= prev - 1e-15);
            prev = r.lambda_star;
        }
    }

    #[test]
    fn consistency_gap_flags_mismatched_baseline() {
        let mut c = vi_preset(0.005);
        assert!(eps_p_nc_consistency_gap(&c).unwrap() < 1e-12);
        c.eps_p_nc = 0.05;
        assert!(eps_p_nc_consistency_gap(&c).unwrap() > 1e-3);
    }

    #[test]
    fn capacity_values() {
        assert_eq!(transmission_capacity(0.0, 0.1, 1.0).unwrap(), 0.0);
        assert!((transmission_capacity(0.01, 0.1, 1.0).unwrap() - 0.009).abs() < 1e-15);
        assert!(
            (transmission_capacity(0.005930554078013699, 0.1, 1.0).unwrap()
                - 0.005337498670212329)
                .abs()
                < 1e-12
        );
    }

    #[test]
    fn scaling_bound_reference_exponents() {
        let miso4 = scaling_bounds(Regime::Miso, 4.0, 8, 1).unwrap();
        assert_eq!(miso4.lower_exponent, 0.5);
        assert_eq!(miso4.upper_exponent, 0.5);
        let miso3 = scaling_bounds(Regime::Miso, 3.0, 8, 1).unwrap();
        assert!((miso3.lower_exponent - 1.0 / 3.0).abs() < 1e-15);
        assert!((miso3.upper_exponent - 2.0 / 3.0).abs() < 1e-15);
        let mimo3 = scaling_bounds(Regime::Mimo, 3.0, 8, 8).unwrap();
        assert!((mimo3.lower_exponent - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(mimo3.upper_exponent, 1.0);
        assert_eq!(mimo3.variable, ScalingVariable::N);
        let single_tx = scaling_bounds(Regime::Mimo, 3.0, 1, 8).unwrap();
        assert_eq!(single_tx.lower_exponent, 0.0);
        assert_eq!(single_tx.upper_exponent, 0.0);
        assert_eq!(single_tx.variable, ScalingVariable::M);
    }

    #[test]
    fn scaling_bound_invariant_lower_le_upper() {
        for alpha in [2.2, 2.5, 3.0, 4.0, 6.0] {
            for (n, m) in [(2, 1), (8, 1), (4, 4), (1, 4)] {
                for regime in [Regime::Miso, Regime::Mimo] {
                    let b = scaling_bounds(regime, alpha, n, m).unwrap();
                    assert!(b.lower_exponent <= b.upper_exponent + 1e-15);
                }
            }
        }
    }

    #[test]
    fn exponent_fit_recovers_exact_power_law() {
        let points: Vec<(f64, f64)> =
            [2.0, 4.0, 8.0, 16.0].iter().map(|&n: &f64| (n, 3.0 * n.sqrt())).collect();
        let (slope, intercept, residual) = fit_scaling_exponent(&points).unwrap();
        assert!((slope - 0.5).abs() < 1e-10);
        assert!((intercept - 3.0f64.ln()).abs() < 1e-10);
        assert!(residual < 1e-12);
    }

    #[test]
    fn exponent_fit_preconditions() {
        assert!(fit_scaling_exponent(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(fit_scaling_exponent(&[(1.0, 1.0), (1.0, 2.0), (3.0, 2.0)]).is_err());
        assert!(matches!(
            fit_scaling_exponent(&[(1.0, 1.0), (2.0, -2.0), (3.0, 2.0)]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn exponent_fit_on_noisy_synthetic_data() {
        // lambda = N^(1/3) (1 + 5% deterministic wiggle); oracle is the
        // closed-form least squares computed directly here.
        let sizes = [2.0f64, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0];
        let points: Vec<(f64, f64)> = sizes
            .iter()
            .enumerate()
            .map(|(i, &n)| {
                let noise = 1.0 + 0.05 * ((i as f64 * 2.399).sin());
                (n, n.powf(1.0 / 3.0) * noise)
            })
            .collect();
        let (slope, _, _) = fit_scaling_exponent(&points).unwrap();
        assert!((slope - 1.0 / 3.0).abs() < 0.08, "slope {slope}");

        // independent normal-equations oracle
        let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
        let n = xs.len() as f64;
        let sx: f64 = xs.iter().sum();
        let sy: f64 = ys.iter().sum();
        let sxx: f64 = xs.iter().map(|x| x * x).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
        let oracle = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        assert!((slope - oracle).abs() < 1e-12);
    }
}
