//! Seeded Monte Carlo estimation of detection probabilities and pass-count
//! distributions.
//!
//! Each replication draws from three ChaCha8 substreams derived from
//! `(seed, replication index)`: one for the schedule sample, one for the
//! attacker's decisions, one for the per-pass detection coins. Results are
//! therefore bit-reproducible for a fixed `(seed, replications)` no matter
//! how many worker threads run, and two configurations sharing a seed face
//! identical schedule draws (common random numbers).

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analytics::CountDistribution;
use crate::attackers::{AttackerStrategy, BURN_IN_PERIODS};
use crate::error::{Error, Result};
use crate::generators::ScheduleGenerator;
use crate::geometry::PerimeterPoint;
use crate::params::GameParams;
use crate::stats;

const LANES: u64 = 4;

#[derive(Clone, Copy)]
enum Lane {
    Schedule = 0,
    Strategy = 1,
    Detection = 2,
}

fn substream(seed: u64, replication: u64, lane: Lane) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replication * LANES + lane as u64);
    rng
}

/// Knobs shared by all estimation entry points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationOptions {
    /// Where the attacker strikes.
    pub attack_point: PerimeterPoint,
    /// Confidence level for reported intervals.
    pub ci_level: f64,
    /// Overrides the automatically derived schedule horizon.
    pub horizon: Option<f64>,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        Self {
            attack_point: PerimeterPoint::BASE,
            ci_level: stats::DEFAULT_CI_LEVEL,
            horizon: None,
        }
    }
}

/// Aggregated outcome of a Monte Carlo run.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SimulationResult {
    pub replications: u64,
    pub detections: u64,
    /// `detections / replications`.
    pub estimate: f64,
    /// Half-width of the binomial confidence interval at `ci_level`
    /// (normal approximation, Wilson at the boundaries).
    pub ci_half_width: f64,
    pub ci_level: f64,
    /// Empirical law of the number of passes met by the attack window.
    pub pass_pmf: CountDistribution,
    pub seed: u64,
}

fn required_horizon(
    generator: &ScheduleGenerator,
    strategy: &AttackerStrategy,
    params: &GameParams,
) -> f64 {
    let period = generator.period();
    let latest_start = match strategy {
        AttackerStrategy::FixedTime { start } => *start,
        _ => (BURN_IN_PERIODS + 1.0) * period,
    };
    let allowance = strategy.horizon_allowance(generator.dispatch_rate(), period);
    latest_start + allowance + params.t() + period
}

fn run_replication(
    generator: &ScheduleGenerator,
    strategy: &AttackerStrategy,
    params: &GameParams,
    options: &SimulationOptions,
    horizon: f64,
    period: f64,
    seed: u64,
    replication: u64,
) -> Result<(bool, u64)> {
    let mut schedule_rng = substream(seed, replication, Lane::Schedule);
    let realization = generator.sample(horizon, &mut schedule_rng)?;

    let mut strategy_rng = substream(seed, replication, Lane::Strategy);
    let window = strategy.plan(&realization, params, period, options.attack_point, &mut strategy_rng)?;

    let passes = realization.count_passes(&window)? as u64;

    // One explicit coin per passing patroller, honoring the independence of
    // per-pass detection rather than collapsing to a single (1-p)^N draw.
    let mut detection_rng = substream(seed, replication, Lane::Detection);
    let mut detected = false;
    for _ in 0..passes {
        if detection_rng.random_bool(params.p()) {
            detected = true;
        }
    }
    Ok((detected, passes))
}

fn collect_outcomes(
    generator: &ScheduleGenerator,
    strategy: &AttackerStrategy,
    params: &GameParams,
    replications: u64,
    seed: u64,
    options: &SimulationOptions,
) -> Result<Vec<(bool, u64)>> {
    if replications == 0 {
        return Err(Error::NoReplications);
    }
    let period = generator.period();
    let horizon = options
        .horizon
        .unwrap_or_else(|| required_horizon(generator, strategy, params));
    (0..replications)
        .into_par_iter()
        .map(|replication| {
            run_replication(
                generator,
                strategy,
                params,
                options,
                horizon,
                period,
                seed,
                replication,
            )
        })
        .collect()
}

fn aggregate(
    outcomes: &[(bool, u64)],
    seed: u64,
    ci_level: f64,
) -> Result<SimulationResult> {
    let replications = outcomes.len() as u64;
    let detections = outcomes.iter().filter(|(detected, _)| *detected).count() as u64;
    let mut pass_counts: BTreeMap<u64, u64> = BTreeMap::new();
    for (_, passes) in outcomes {
        *pass_counts.entry(*passes).or_insert(0) += 1;
    }
    Ok(SimulationResult {
        replications,
        detections,
        estimate: detections as f64 / replications as f64,
        ci_half_width: stats::binomial_ci_half_width(detections, replications, ci_level),
        ci_level,
        pass_pmf: CountDistribution::from_counts(&pass_counts)?,
        seed,
    })
}

/// Estimates the detection probability of `strategy` against `generator`
/// by seeded Monte Carlo.
pub fn estimate_detection(
    generator: &ScheduleGenerator,
    strategy: &AttackerStrategy,
    params: &GameParams,
    replications: u64,
    seed: u64,
) -> Result<SimulationResult> {
    estimate_detection_with(
        generator,
        strategy,
        params,
        replications,
        seed,
        &SimulationOptions::default(),
    )
}

/// [`estimate_detection`] with explicit options.
pub fn estimate_detection_with(
    generator: &ScheduleGenerator,
    strategy: &AttackerStrategy,
    params: &GameParams,
    replications: u64,
    seed: u64,
    options: &SimulationOptions,
) -> Result<SimulationResult> {
    let outcomes = collect_outcomes(generator, strategy, params, replications, seed, options)?;
    aggregate(&outcomes, seed, options.ci_level)
}

/// Empirical law of the pass count `N` under the strategy's window choice.
pub fn empirical_pass_pmf(
    generator: &ScheduleGenerator,
    strategy: &AttackerStrategy,
    params: &GameParams,
    replications: u64,
    seed: u64,
) -> Result<CountDistribution> {
    estimate_detection(generator, strategy, params, replications, seed)
        .map(|result| result.pass_pmf)
}

/// One row of a strategy comparison.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ComparisonEntry {
    pub generator: String,
    pub strategy: String,
    pub result: SimulationResult,
}

/// Estimated difference between two rows, with a paired confidence interval
/// (the pairing is meaningful because all rows share the same seed).
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PairwiseDifference {
    pub first: usize,
    pub second: usize,
    /// `estimate[first] - estimate[second]`.
    pub difference: f64,
    pub ci_half_width: f64,
}

/// Ranked comparison across `(generator, strategy)` pairs.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ComparisonTable {
    pub entries: Vec<ComparisonEntry>,
    /// Entry indices ordered by decreasing estimate.
    pub ranking: Vec<usize>,
    pub differences: Vec<PairwiseDifference>,
}

/// Runs every pair with the same seed and replication count and returns
/// estimates, a ranking, and all pairwise differences.
pub fn compare_strategies(
    pairs: &[(ScheduleGenerator, AttackerStrategy)],
    params: &GameParams,
    replications: u64,
    seed: u64,
) -> Result<ComparisonTable> {
    compare_strategies_with(pairs, params, replications, seed, &SimulationOptions::default())
}

/// [`compare_strategies`] with explicit options.
pub fn compare_strategies_with(
    pairs: &[(ScheduleGenerator, AttackerStrategy)],
    params: &GameParams,
    replications: u64,
    seed: u64,
    options: &SimulationOptions,
) -> Result<ComparisonTable> {
    if pairs.is_empty() {
        return Err(Error::InvalidStrategy("nothing to compare".into()));
    }
    let all_outcomes: Vec<Vec<(bool, u64)>> = pairs
        .par_iter()
        .map(|(generator, strategy)| {
            collect_outcomes(generator, strategy, params, replications, seed, options)
        })
        .collect::<Result<_>>()?;
    let entries: Vec<ComparisonEntry> = pairs
        .iter()
        .zip(&all_outcomes)
        .map(|((generator, strategy), outcomes)| {
            Ok(ComparisonEntry {
                generator: generator.label(),
                strategy: strategy.to_string(),
                result: aggregate(outcomes, seed, options.ci_level)?,
            })
        })
        .collect::<Result<_>>()?;

    let mut ranking: Vec<usize> = (0..entries.len()).collect();
    ranking.sort_by(|&a, &b| {
        entries[b]
            .result
            .estimate
            .partial_cmp(&entries[a].result.estimate)
            .expect("finite estimates")
            .then(a.cmp(&b))
    });

    let z = stats::z_quantile(options.ci_level);
    let n = replications as f64;
    let mut differences = Vec::new();
    for first in 0..entries.len() {
        for second in (first + 1)..entries.len() {
            let mut sum = 0i64;
            let mut sum_sq = 0i64;
            for (a, b) in all_outcomes[first].iter().zip(&all_outcomes[second]) {
                let d = a.0 as i64 - b.0 as i64;
                sum += d;
                sum_sq += d * d;
            }
            let mean = sum as f64 / n;
            let variance = if replications > 1 {
                ((sum_sq as f64) - n * mean * mean) / (n - 1.0)
            } else {
                0.0
            };
            differences.push(PairwiseDifference {
                first,
                second,
                difference: mean,
                ci_half_width: z * (variance.max(0.0) / n).sqrt(),
            });
        }
    }
    Ok(ComparisonTable { entries, ranking, differences })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(lambda: f64, t: f64, p: f64) -> GameParams {
        GameParams::new(lambda, t, p).unwrap()
    }

    #[test]
    fn zero_replications_rejected() {
        let p = params(1.0, 3.2, 0.5);
        let generator = ScheduleGenerator::optimal(&p);
        let err = estimate_detection(&generator, &AttackerStrategy::Stationary, &p, 0, 1);
        assert!(matches!(err, Err(Error::NoReplications)));
    }

    #[test]
    fn certain_detection_with_p_one_and_integer_product() {
        let p = params(1.0, 3.0, 1.0);
        let generator = ScheduleGenerator::deterministic(1.0).unwrap();
        let result =
            estimate_detection(&generator, &AttackerStrategy::Stationary, &p, 2000, 9).unwrap();
        assert_eq!(result.estimate, 1.0);
        assert_eq!(result.pass_pmf.mass(3), 1.0);
    }

    #[test]
    fn substreams_are_worker_independent() {
        // The per-replication outcome depends only on (seed, index), so a
        // manual sequential pass must match the rayon-parallel result.
        let p = params(1.0, 3.2, 0.5);
        let generator = ScheduleGenerator::optimal(&p);
        let strategy = AttackerStrategy::Stationary;
        let options = SimulationOptions::default();
        let parallel =
            estimate_detection_with(&generator, &strategy, &p, 500, 77, &options).unwrap();
        let horizon = required_horizon(&generator, &strategy, &p);
        let sequential: Vec<(bool, u64)> = (0..500)
            .map(|rep| {
                run_replication(
                    &generator,
                    &strategy,
                    &p,
                    &options,
                    horizon,
                    generator.period(),
                    77,
                    rep,
                )
                .unwrap()
            })
            .collect();
        let resequenced = aggregate(&sequential, 77, options.ci_level).unwrap();
        assert_eq!(parallel, resequenced);
    }

    #[test]
    fn identical_pairs_tie_exactly() {
        let p = params(1.0, 3.2, 0.5);
        let generator = ScheduleGenerator::optimal(&p);
        let pairs = vec![
            (generator.clone(), AttackerStrategy::Stationary),
            (generator, AttackerStrategy::Stationary),
        ];
        let table = compare_strategies(&pairs, &p, 2000, 123).unwrap();
        let diff = &table.differences[0];
        assert_eq!(diff.difference, 0.0);
        assert_eq!(diff.ci_half_width, 0.0);
        assert_eq!(table.entries[0].result, table.entries[1].result);
    }

    #[test]
    fn horizon_override_too_short_is_reported() {
        let p = params(1.0, 3.2, 0.5);
        let generator = ScheduleGenerator::optimal(&p);
        let options = SimulationOptions { horizon: Some(10.0), ..Default::default() };
        let err = estimate_detection_with(
            &generator,
            &AttackerStrategy::Stationary,
            &p,
            10,
            1,
            &options,
        );
        assert!(matches!(err, Err(Error::WindowExceedsHorizon { .. })));
    }
}
