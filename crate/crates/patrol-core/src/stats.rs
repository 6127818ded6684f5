//! Small statistical toolbox: binomial confidence intervals, a one-sample
//! Kolmogorov–Smirnov distance, and a chi-square goodness-of-fit p-value.

use std::collections::BTreeMap;

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::analytics::CountDistribution;

pub const DEFAULT_CI_LEVEL: f64 = 0.95;

/// Two-sided standard normal quantile for the given confidence level.
pub fn z_quantile(level: f64) -> f64 {
    assert!((0.0..1.0).contains(&level), "confidence level must be in (0, 1)");
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    normal.inverse_cdf(0.5 + level / 2.0)
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, level: f64) -> (f64, f64) {
    assert!(trials > 0);
    let z = z_quantile(level);
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denominator = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denominator;
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denominator;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Half-width of the normal-approximation interval for a binomial
/// proportion, with a Wilson fallback when every trial agrees (where the
/// normal width collapses to zero).
pub fn binomial_ci_half_width(successes: u64, trials: u64, level: f64) -> f64 {
    assert!(trials > 0);
    if successes == 0 || successes == trials {
        let (lo, hi) = wilson_interval(successes, trials, level);
        return (hi - lo) / 2.0;
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    z_quantile(level) * (phat * (1.0 - phat) / n).sqrt()
}

/// One-sample Kolmogorov–Smirnov distance between a sorted sample and a
/// reference CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(sorted_sample: &[f64], cdf: F) -> f64 {
    assert!(!sorted_sample.is_empty());
    let n = sorted_sample.len() as f64;
    let mut distance: f64 = 0.0;
    for (i, &x) in sorted_sample.iter().enumerate() {
        let f = cdf(x);
        let upper = (i + 1) as f64 / n - f;
        let lower = f - i as f64 / n;
        distance = distance.max(upper.abs()).max(lower.abs());
    }
    distance
}

/// Pearson chi-square goodness-of-fit p-value of observed counts against a
/// reference distribution. Observations outside the reference support make
/// the fit fail outright (p-value 0).
pub fn chi_square_pvalue(observed: &BTreeMap<u64, u64>, expected: &CountDistribution) -> f64 {
    let n: u64 = observed.values().sum();
    assert!(n > 0, "no observations");
    if observed
        .iter()
        .any(|(value, &count)| count > 0 && expected.mass(*value) == 0.0)
    {
        return 0.0;
    }
    let cells = expected.pmf().len();
    if cells <= 1 {
        return 1.0;
    }
    let mut statistic = 0.0;
    for (&value, &probability) in expected.pmf() {
        let expected_count = n as f64 * probability;
        let observed_count = observed.get(&value).copied().unwrap_or(0) as f64;
        let diff = observed_count - expected_count;
        statistic += diff * diff / expected_count;
    }
    let chi = ChiSquared::new((cells - 1) as f64).expect("positive dof");
    1.0 - chi.cdf(statistic)
}

/// Sample mean and unbiased sample variance.
pub fn mean_and_variance(values: &[f64]) -> (f64, f64) {
    assert!(values.len() >= 2);
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, ss / (n - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_value_for_95() {
        assert!((z_quantile(0.95) - 1.959964).abs() < 1e-5);
    }

    #[test]
    fn normal_half_width() {
        // phat = 0.5, n = 100: 1.96 * 0.05
        let half = binomial_ci_half_width(50, 100, 0.95);
        assert!((half - 0.098).abs() < 1e-3);
    }

    #[test]
    fn boundary_uses_wilson() {
        let half = binomial_ci_half_width(0, 100, 0.95);
        assert!(half > 0.0 && half < 0.05);
        let half = binomial_ci_half_width(100, 100, 0.95);
        assert!(half > 0.0 && half < 0.05);
    }

    #[test]
    fn ks_of_exact_uniform_grid() {
        let sample: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        let d = ks_distance(&sample, |x| x.clamp(0.0, 1.0));
        assert!(d <= 0.005 + 1e-12, "d = {d}");
    }

    #[test]
    fn chi_square_detects_mismatch() {
        let expected = CountDistribution::from_pmf([(3, 0.8), (4, 0.2)]).unwrap();
        let good: BTreeMap<u64, u64> = [(3, 7990), (4, 2010)].into();
        assert!(chi_square_pvalue(&good, &expected) > 0.01);
        let bad: BTreeMap<u64, u64> = [(3, 7000), (4, 3000)].into();
        assert!(chi_square_pvalue(&bad, &expected) < 1e-6);
        let outside: BTreeMap<u64, u64> = [(3, 9999), (7, 1)].into();
        assert_eq!(chi_square_pvalue(&outside, &expected), 0.0);
    }

    #[test]
    fn mean_variance_simple() {
        let (mean, var) = mean_and_variance(&[1.0, 2.0, 3.0, 4.0]);
        assert!((mean - 2.5).abs() < 1e-12);
        assert!((var - 5.0 / 3.0).abs() < 1e-12);
    }
}
