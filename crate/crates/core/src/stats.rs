//! Statistical test helpers used by the validation suites: one- and
//! two-sample Kolmogorov-Smirnov tests, chi-square goodness of fit and the
//! Wilson score interval.

use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::gamma::gamma_lr;

/// Survival function of the Kolmogorov distribution,
/// Q(x) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 x^2).
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=100 {
        let t = (-2.0 * (j as f64) * (j as f64) * x * x).exp();
        sum += sign * t;
        sign = -sign;
        if t < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Asymptotic KS p-value with the small-sample correction of Stephens:
/// lambda = (sqrt(n_eff) + 0.12 + 0.11/sqrt(n_eff)) * D.
fn ks_p_value(d: f64, n_eff: f64) -> f64 {
    let s = n_eff.sqrt();
    kolmogorov_sf((s + 0.12 + 0.11 / s) * d)
}

/// Result of a KS test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsReport {
    pub statistic: f64,
    pub p_value: f64,
    pub samples: usize,
}

/// One-sample KS test of `data` against the CDF `cdf`.
pub fn ks_one_sample<F: Fn(f64) -> f64>(data: &[f64], cdf: F) -> KsReport {
    assert!(!data.is_empty(), "KS test needs samples");
    let mut sorted = data.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        let lo = (f - i as f64 / n).abs();
        let hi = ((i as f64 + 1.0) / n - f).abs();
        d = d.max(lo).max(hi);
    }
    KsReport { statistic: d, p_value: ks_p_value(d, n), samples: sorted.len() }
}

/// Two-sample KS test.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsReport {
    assert!(!a.is_empty() && !b.is_empty(), "KS test needs samples");
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(|x, y| x.total_cmp(y));
    xb.sort_by(|x, y| x.total_cmp(y));
    let (na, nb) = (xa.len(), xb.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < na && j < nb {
        let x = xa[i].min(xb[j]);
        while i < na && xa[i] <= x {
            i += 1;
        }
        while j < nb && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    let n_eff = (na as f64 * nb as f64) / (na as f64 + nb as f64);
    KsReport { statistic: d, p_value: ks_p_value(d, n_eff), samples: na.min(nb) }
}

/// CDF of the exponential distribution with unit mean.
pub fn exp1_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        1.0 - (-x).exp()
    }
}

/// CDF of Gamma(shape, scale 1): the regularized lower incomplete gamma.
pub fn gamma_unit_scale_cdf(shape: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        gamma_lr(shape, x)
    }
}

/// Chi-square goodness-of-fit statistic and p-value for observed bin counts
/// against expected bin counts (degrees of freedom = bins - 1).
pub fn chi_square_gof(observed: &[u64], expected: &[f64]) -> (f64, f64) {
    assert_eq!(observed.len(), expected.len());
    assert!(observed.len() >= 2);
    let stat: f64 = observed
        .iter()
        .zip(expected.iter())
        .map(|(&o, &e)| {
            let diff = o as f64 - e;
            diff * diff / e
        })
        .sum();
    let df = (observed.len() - 1) as f64;
    let dist = ChiSquared::new(df).expect("positive dof");
    (stat, 1.0 - dist.cdf(stat))
}

/// Chi-square test of integer counts against a Poisson(mean) law, pooling
/// tail bins so every expected count is at least 5.
pub fn chi_square_poisson_gof(counts: &[usize], mean: f64) -> f64 {
    let n = counts.len() as f64;
    let max = counts.iter().copied().max().unwrap_or(0);
    // Poisson pmf by recurrence.
    let mut pmf = Vec::with_capacity(max + 2);
    let mut p = (-mean).exp();
    pmf.push(p);
    for k in 1..=(max + 1) {
        p *= mean / k as f64;
        pmf.push(p);
    }
    let mut observed: Vec<u64> = vec![0; max + 2];
    for &c in counts {
        observed[c] += 1;
    }
    // Pool from both ends until expected >= 5 per bin.
    let mut bins_obs = Vec::new();
    let mut bins_exp = Vec::new();
    let mut acc_o = 0u64;
    let mut acc_e = 0.0;
    for k in 0..observed.len() {
        acc_o += observed[k];
        acc_e += pmf[k] * n;
        if acc_e >= 5.0 {
            bins_obs.push(acc_o);
            bins_exp.push(acc_e);
            acc_o = 0;
            acc_e = 0.0;
        }
    }
    // Tail mass beyond the largest observed count.
    let tail: f64 = (1.0 - pmf.iter().sum::<f64>()).max(0.0) * n;
    acc_e += tail;
    if let (Some(o), Some(e)) = (bins_obs.last_mut(), bins_exp.last_mut()) {
        *o += acc_o;
        *e += acc_e;
    }
    if bins_obs.len() < 2 {
        return 1.0;
    }
    chi_square_gof(&bins_obs, &bins_exp).1
}

/// 95% Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    assert!(trials > 0);
    const Z: f64 = 1.959963984540054; // 97.5% normal quantile
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z * Z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Ordinary least squares fit of y against x; returns (slope, intercept,
/// root-mean-square residual).
pub fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2);
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y.iter()).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = x
        .iter()
        .zip(y.iter())
        .map(|(a, b)| {
            let r = b - (intercept + slope * a);
            r * r
        })
        .sum();
    (slope, intercept, (ss / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn kolmogorov_sf_reference_values() {
        // Q(0.8275) ~ 0.5 (median of the Kolmogorov distribution)
        assert!((kolmogorov_sf(0.82757) - 0.5).abs() < 1e-3);
        assert!(kolmogorov_sf(0.0) == 1.0);
        assert!(kolmogorov_sf(3.0) < 1e-7);
    }

    #[test]
    fn ks_one_sample_accepts_uniform() {
        let mut r = ChaCha12Rng::seed_from_u64(5);
        let data: Vec<f64> = (0..10_000).map(|_| r.random::<f64>()).collect();
        let rep = ks_one_sample(&data, |x| x.clamp(0.0, 1.0));
        assert!(rep.p_value > 0.01, "p {}", rep.p_value);
    }

    #[test]
    fn ks_one_sample_rejects_wrong_law() {
        let mut r = ChaCha12Rng::seed_from_u64(6);
        let data: Vec<f64> = (0..10_000).map(|_| r.random::<f64>().powi(2)).collect();
        let rep = ks_one_sample(&data, |x| x.clamp(0.0, 1.0));
        assert!(rep.p_value < 1e-6);
    }

    #[test]
    fn ks_two_sample_same_law_passes_and_shifted_fails() {
        let mut r = ChaCha12Rng::seed_from_u64(7);
        let a: Vec<f64> = (0..8_000).map(|_| r.random::<f64>()).collect();
        let b: Vec<f64> = (0..8_000).map(|_| r.random::<f64>()).collect();
        assert!(ks_two_sample(&a, &b).p_value > 0.01);
        let c: Vec<f64> = b.iter().map(|v| v + 0.05).collect();
        assert!(ks_two_sample(&a, &c).p_value < 0.01);
    }

    #[test]
    fn wilson_interval_brackets_point_estimate() {
        let (lo, hi) = wilson_interval(73, 1000);
        assert!(lo < 0.073 && 0.073 < hi);
        assert!(lo > 0.0 && hi < 1.0);
        let (lo0, hi0) = wilson_interval(0, 50);
        assert!(lo0 < 1e-12);
        assert!(hi0 > 0.0 && hi0 < 0.2);
    }

    #[test]
    fn least_squares_recovers_exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.5 * v - 1.0).collect();
        let (m, b, r) = least_squares(&x, &y);
        assert!((m - 2.5).abs() < 1e-12);
        assert!((b + 1.0).abs() < 1e-12);
        assert!(r < 1e-12);
    }

    #[test]
    fn gamma_cdf_matches_exponential_for_shape_one() {
        for x in [0.1, 0.5, 1.0, 2.0, 5.0] {
            assert!((gamma_unit_scale_cdf(1.0, x) - exp1_cdf(x)).abs() < 1e-12);
        }
    }
}
