//! Closed-form quantities of the patrol game: the game value, the
//! miss-minimizing pass-count distribution for a fixed mean, and the Poisson
//! baseline.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::params::{split_mean, GameParams};

/// A probability mass function on nonnegative integers: the law of the
/// number of passes an attack encounters.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CountDistribution {
    pmf: BTreeMap<u64, f64>,
}

impl CountDistribution {
    /// Builds a distribution from `(value, mass)` pairs. Masses must be
    /// nonnegative and sum to 1 within 1e-12; zero-mass entries are dropped.
    pub fn from_pmf(entries: impl IntoIterator<Item = (u64, f64)>) -> Result<Self> {
        let mut pmf = BTreeMap::new();
        let mut total = 0.0;
        for (value, mass) in entries {
            if !mass.is_finite() || mass < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "mass for {value} must be finite and >= 0, got {mass}"
                )));
            }
            total += mass;
            if mass > 0.0 {
                *pmf.entry(value).or_insert(0.0) += mass;
            }
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "masses must sum to 1 within 1e-12, got {total}"
            )));
        }
        Ok(Self { pmf })
    }

    pub fn point_mass(value: u64) -> Self {
        Self { pmf: BTreeMap::from([(value, 1.0)]) }
    }

    /// Builds the empirical distribution of observed counts.
    pub fn from_counts(counts: &BTreeMap<u64, u64>) -> Result<Self> {
        let total: u64 = counts.values().sum();
        if total == 0 {
            return Err(Error::InvalidDistribution("no observations".into()));
        }
        Self::from_pmf(
            counts
                .iter()
                .map(|(&value, &count)| (value, count as f64 / total as f64)),
        )
    }

    pub fn pmf(&self) -> &BTreeMap<u64, f64> {
        &self.pmf
    }

    pub fn mass(&self, value: u64) -> f64 {
        self.pmf.get(&value).copied().unwrap_or(0.0)
    }

    pub fn mean(&self) -> f64 {
        self.pmf.iter().map(|(&value, &mass)| value as f64 * mass).sum()
    }

    /// Largest value carrying positive mass (0 for the empty edge case).
    pub fn max_support(&self) -> u64 {
        self.pmf.keys().next_back().copied().unwrap_or(0)
    }

    /// True when both distributions have the same support and all masses
    /// agree within `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.pmf.len() == other.pmf.len()
            && self
                .pmf
                .iter()
                .all(|(value, mass)| (other.mass(*value) - mass).abs() <= tol)
    }
}

/// Truncated Poisson distribution with the given mean: terms are emitted
/// until the remaining tail mass drops below 1e-13, well inside the 1e-12
/// normalization tolerance. Returns the distribution and the truncated tail
/// mass.
pub fn truncated_poisson(mean: f64, max_terms: usize) -> Result<(CountDistribution, f64)> {
    if !mean.is_finite() || mean < 0.0 {
        return Err(Error::NegativeMean(mean));
    }
    let mut entries = Vec::new();
    let mut mass = (-mean).exp();
    let mut cumulative = 0.0;
    let mut n = 0u64;
    while cumulative < 1.0 - 1e-13 && (n as usize) < max_terms {
        entries.push((n, mass));
        cumulative += mass;
        n += 1;
        mass *= mean / n as f64;
    }
    let tail = (1.0 - cumulative).max(0.0);
    Ok((CountDistribution::from_pmf(entries)?, tail))
}

/// The detection probability both players can guarantee, branch form:
/// `1 - (1-p)^m` when `r = 0`, else `1 - r (1-p)^(m+1) - (1-r) (1-p)^m`.
pub fn game_value_case_form(params: &GameParams) -> f64 {
    let (m, r) = params.decompose();
    let q = 1.0 - params.p();
    if r == 0.0 {
        1.0 - q.powi(m as i32)
    } else {
        1.0 - r * q.powi(m as i32 + 1) - (1.0 - r) * q.powi(m as i32)
    }
}

/// The same value as a single expression in the fractional part:
/// `1 - r (1-p)^ceil - (1 - r) (1-p)^floor`.
pub fn game_value_concise_form(params: &GameParams) -> f64 {
    let (m, r) = params.decompose();
    let q = 1.0 - params.p();
    let ceil = if r > 0.0 { m + 1 } else { m };
    1.0 - r * q.powi(ceil as i32) - (1.0 - r) * q.powi(m as i32)
}

/// The value of the game. Evaluates both formula forms and asserts they
/// agree within 1e-12.
pub fn game_value(params: &GameParams) -> f64 {
    let case = game_value_case_form(params);
    let concise = game_value_concise_form(params);
    assert!(
        (case - concise).abs() <= 1e-12,
        "value formula forms disagree: {case} vs {concise}"
    );
    case
}

/// The distribution on nonnegative integers with mean `c` that minimizes
/// the expected miss probability: a point mass when `c` is an integer, else
/// the two integers surrounding `c` weighted to hit the mean exactly.
///
/// Values of `c` within the integer guard (1e-9) of an integer are snapped
/// to that integer, mirroring the `lambda * t` handling; for such inputs
/// the returned mean is the snapped integer.
pub fn optimal_count_distribution(c: f64) -> Result<CountDistribution> {
    if !c.is_finite() || c < 0.0 {
        return Err(Error::NegativeMean(c));
    }
    let (floor, frac) = split_mean(c);
    if frac == 0.0 {
        return Ok(CountDistribution::point_mass(floor));
    }
    CountDistribution::from_pmf([(floor, 1.0 - frac), (floor + 1, frac)])
}

/// `E[(1-p)^N]` under the given pass-count law; detection probability is
/// one minus this.
pub fn expected_miss(distribution: &CountDistribution, p: f64) -> f64 {
    let q = 1.0 - p;
    distribution
        .pmf()
        .iter()
        .map(|(&n, &mass)| mass * q.powi(n as i32))
        .sum()
}

/// Detection probability when dispatching by a Poisson process at the rate
/// cap: `1 - exp(-p * lambda * t)`.
pub fn poisson_detection(params: &GameParams) -> f64 {
    1.0 - (-params.p() * params.lambda_t()).exp()
}
