//! Brute-force minimizer of the expected miss probability over all
//! distributions on `{0..max_support}` with a fixed mean.
//!
//! This is an independent check on [`crate::analytics::optimal_count_distribution`]
//! and deliberately shares no code with it. The feasible set is a polytope
//! cut by two equalities (normalization and the mean), so every extreme
//! point is supported on at most two integers; enumerating all pairs
//! `(i, j)` with `i <= c <= j` therefore finds the exact optimum.

use crate::analytics::CountDistribution;
use crate::error::{Error, Result};

/// The exact minimum of `E[(1-p)^N]` over mean-`c` distributions supported
/// on `{0..max_support}`, together with a distribution achieving it.
///
/// Ties (which occur at `p = 1`, where only the mass at zero matters) are
/// broken by enumeration order: smaller lower support point first, then
/// smaller upper support point.
pub fn lemma_oracle(c: f64, p: f64, max_support: u32) -> Result<(f64, CountDistribution)> {
    if !c.is_finite() || c < 0.0 {
        return Err(Error::NegativeMean(c));
    }
    if c > max_support as f64 {
        return Err(Error::InfeasibleMean { c, max_support });
    }
    let q = 1.0 - p;
    let phi = |n: u32| q.powi(n as i32);

    let mut best: Option<(f64, CountDistribution)> = None;
    let mut consider = |miss: f64, distribution: CountDistribution| {
        if best.as_ref().is_none_or(|(current, _)| miss < *current) {
            best = Some((miss, distribution));
        }
    };

    for i in 0..=max_support {
        let fi = i as f64;
        if fi == c {
            consider(phi(i), CountDistribution::point_mass(i as u64));
            continue;
        }
        if fi > c {
            break;
        }
        for j in (i + 1)..=max_support {
            let fj = j as f64;
            if fj < c {
                continue;
            }
            let weight_hi = (c - fi) / (fj - fi);
            let weight_lo = 1.0 - weight_hi;
            let miss = weight_lo * phi(i) + weight_hi * phi(j);
            let distribution =
                CountDistribution::from_pmf([(i as u64, weight_lo), (j as u64, weight_hi)])?;
            consider(miss, distribution);
        }
    }

    best.ok_or(Error::InfeasibleMean { c, max_support })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::{expected_miss, optimal_count_distribution};

    #[test]
    fn fractional_mean_minimizer() {
        let (miss, d) = lemma_oracle(3.2, 0.5, 10).unwrap();
        assert!((miss - 0.1125).abs() < 1e-12);
        assert!((d.mass(3) - 0.8).abs() < 1e-12);
        assert!((d.mass(4) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn zero_mean_has_one_feasible_distribution() {
        let (miss, d) = lemma_oracle(0.0, 0.3, 10).unwrap();
        assert_eq!(miss, 1.0);
        assert_eq!(d.mass(0), 1.0);
    }

    #[test]
    fn integer_mean_point_mass_wins() {
        let (miss, d) = lemma_oracle(2.0, 0.3, 12).unwrap();
        assert_eq!(d.mass(2), 1.0);
        assert!((miss - 0.7f64.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn infeasible_mean() {
        assert!(matches!(
            lemma_oracle(11.0, 0.5, 10),
            Err(Error::InfeasibleMean { .. })
        ));
        assert!(lemma_oracle(10.0, 0.5, 10).is_ok());
    }

    #[test]
    fn agrees_with_closed_form_on_grid() {
        for c in [0.0, 0.4, 1.0, 2.5, 3.2, 5.0, 7.75] {
            for p in [0.1, 0.5, 0.9] {
                let (oracle_miss, _) = lemma_oracle(c, p, 15).unwrap();
                let closed = expected_miss(&optimal_count_distribution(c).unwrap(), p);
                assert!(
                    (oracle_miss - closed).abs() < 1e-12,
                    "c={c} p={p}: oracle {oracle_miss} vs closed form {closed}"
                );
            }
        }
    }
}
