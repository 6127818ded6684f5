//! Attacker strategies: decision rules mapping the observed pass history at
//! the attack point to an attack start time, plus a best-response grid
//! search over a documented strategy family.
//!
//! Strategies are non-anticipating: the start time depends only on passes
//! observed strictly before it.

use rand::Rng;
use rayon::prelude::*;

use crate::engine::{estimate_detection_with, SimulationOptions};
use crate::error::{Error, Result};
use crate::generators::ScheduleGenerator;
use crate::geometry::PerimeterPoint;
use crate::params::GameParams;
use crate::schedule::{arrival_time, AttackWindow, ScheduleRealization};

/// "Wait until the patrol process is in steady state" is operationalized as
/// this many schedule periods of burn-in, followed by a uniformly random
/// phase over one period. For periodic schedules that phase *is* the
/// stationary (time-averaged) distribution.
pub const BURN_IN_PERIODS: f64 = 100.0;

/// Number of start offsets per period swept by the phase family.
pub const SWEEP_GRID: u32 = 128;

/// Returns a time strictly later than `time` for window-boundary purposes:
/// the bump is several orders of magnitude above f64 rounding at simulation
/// time scales and several orders below any schedule's inter-pass gap, so a
/// pass exactly at `time` lands outside a window starting here while every
/// later pass stays inside.
fn just_after(time: f64) -> f64 {
    time + time.abs().max(1.0) * 1e-12
}

/// An attacker decision rule.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
#[serde(into = "String")]
pub enum AttackerStrategy {
    /// Attack at an absolute time, ignoring observations.
    FixedTime { start: f64 },
    /// Attack at a uniformly random phase after burn-in.
    Stationary,
    /// Attack `delay` after the k-th pass observed past a uniformly random
    /// phase origin; the pass at the trigger instant itself is not inside
    /// the window, so `delay = 0` means "immediately after a patroller goes
    /// by".
    AfterKthPass { k: u32, delay: f64 },
    /// Attack at a phase drawn uniformly from an evenly spaced grid over one
    /// period.
    SweptPhase { grid: u32 },
}

impl AttackerStrategy {
    pub fn fixed_time(start: f64) -> Result<Self> {
        if !start.is_finite() || start < 0.0 {
            return Err(Error::InvalidStrategy(format!(
                "fixed start must be finite and >= 0, got {start}"
            )));
        }
        Ok(Self::FixedTime { start })
    }

    pub fn stationary() -> Self {
        Self::Stationary
    }

    pub fn after_kth_pass(k: u32, delay: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidStrategy("pass index k must be >= 1".into()));
        }
        if !delay.is_finite() || delay < 0.0 {
            return Err(Error::InvalidStrategy(format!(
                "delay must be finite and >= 0, got {delay}"
            )));
        }
        Ok(Self::AfterKthPass { k, delay })
    }

    pub fn swept_phase(grid: u32) -> Result<Self> {
        if grid == 0 {
            return Err(Error::InvalidStrategy("sweep grid must be >= 1".into()));
        }
        Ok(Self::SweptPhase { grid })
    }

    /// Parses the CLI spec strings: `fixed:<s>`, `stationary`,
    /// `after-pass:<k>:<delay>`, `sweep` (or `sweep:<grid>`).
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = |msg: String| Error::InvalidStrategy(msg);
        if spec == "stationary" {
            return Ok(Self::Stationary);
        }
        if spec == "sweep" {
            return Self::swept_phase(SWEEP_GRID);
        }
        if let Some(rest) = spec.strip_prefix("sweep:") {
            let grid = rest
                .parse::<u32>()
                .map_err(|_| bad(format!("bad sweep grid in {spec:?}")))?;
            return Self::swept_phase(grid);
        }
        if let Some(rest) = spec.strip_prefix("fixed:") {
            let start = rest
                .parse::<f64>()
                .map_err(|_| bad(format!("bad fixed start in {spec:?}")))?;
            return Self::fixed_time(start);
        }
        if let Some(rest) = spec.strip_prefix("after-pass:") {
            let (k, delay) = rest
                .split_once(':')
                .ok_or_else(|| bad(format!("expected after-pass:<k>:<delay>, got {spec:?}")))?;
            let k = k
                .parse::<u32>()
                .map_err(|_| bad(format!("bad pass index in {spec:?}")))?;
            let delay = delay
                .parse::<f64>()
                .map_err(|_| bad(format!("bad delay in {spec:?}")))?;
            return Self::after_kth_pass(k, delay);
        }
        Err(bad(format!(
            "unknown strategy {spec:?}; expected fixed:<s>, stationary, after-pass:<k>:<delay>, or sweep"
        )))
    }

    /// Decides the attack window for one sampled schedule.
    pub fn plan<R: Rng + ?Sized>(
        &self,
        realization: &ScheduleRealization,
        params: &GameParams,
        period: f64,
        point: PerimeterPoint,
        rng: &mut R,
    ) -> Result<AttackWindow> {
        let t = params.t();
        let burn_in = BURN_IN_PERIODS * period;
        match self {
            AttackerStrategy::FixedTime { start } => AttackWindow::new(point, *start, t),
            AttackerStrategy::Stationary => {
                let start = burn_in + rng.random::<f64>() * period;
                AttackWindow::new(point, start, t)
            }
            AttackerStrategy::SweptPhase { grid } => {
                let index = rng.random_range(0..*grid);
                let start = burn_in + period * index as f64 / *grid as f64;
                AttackWindow::new(point, start, t)
            }
            AttackerStrategy::AfterKthPass { k, delay } => {
                let origin = burn_in + rng.random::<f64>() * period;
                let trigger = realization.kth_pass_at(point, origin, *k).ok_or_else(|| {
                    let found = realization
                        .events()
                        .iter()
                        .filter(|e| arrival_time(e, point) >= origin)
                        .count();
                    Error::InsufficientPasses { needed: *k, found: found as u32 }
                })?;
                let start = just_after(trigger + delay);
                AttackWindow::new(point, start, t)
            }
        }
    }

    /// Extra schedule length this strategy needs beyond the stationary
    /// burn-in, given the generator's dispatch rate and period.
    pub(crate) fn horizon_allowance(&self, dispatch_rate: f64, period: f64) -> f64 {
        match self {
            AttackerStrategy::AfterKthPass { k, delay } => {
                // Enough periods that missing k passes is (astronomically)
                // unlikely; a shortfall surfaces as InsufficientPasses.
                let passes_per_period = dispatch_rate * period;
                let periods = (20.0 * *k as f64 / passes_per_period).ceil() + 10.0;
                periods * period + delay
            }
            _ => 0.0,
        }
    }
}

impl std::fmt::Display for AttackerStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AttackerStrategy::FixedTime { start } => write!(f, "fixed:{start}"),
            AttackerStrategy::Stationary => write!(f, "stationary"),
            AttackerStrategy::AfterKthPass { k, delay } => write!(f, "after-pass:{k}:{delay}"),
            AttackerStrategy::SweptPhase { grid } => {
                if *grid == SWEEP_GRID {
                    write!(f, "sweep")
                } else {
                    write!(f, "sweep:{grid}")
                }
            }
        }
    }
}

impl From<AttackerStrategy> for String {
    fn from(strategy: AttackerStrategy) -> String {
        strategy.to_string()
    }
}

/// The documented best-response family: the stationary attacker, 128 fixed
/// start phases spread over one period after burn-in, and the after-k-th-pass
/// grid with `k = 1..2(m+1)` and delays `0, delta/8, ..., delta` where
/// `delta = t/(m+1)`.
pub fn standard_family(params: &GameParams, period: f64) -> Vec<AttackerStrategy> {
    let mut family = vec![AttackerStrategy::Stationary];
    let burn_in = BURN_IN_PERIODS * period;
    for i in 0..SWEEP_GRID {
        family.push(AttackerStrategy::FixedTime {
            start: burn_in + period * i as f64 / SWEEP_GRID as f64,
        });
    }
    let (m, _) = params.decompose();
    let delta = params.t() / (m + 1) as f64;
    for k in 1..=(2 * (m + 1)) {
        for step in 0..=8u32 {
            family.push(AttackerStrategy::AfterKthPass {
                k: k as u32,
                delay: delta * step as f64 / 8.0,
            });
        }
    }
    family
}

/// One evaluated best-response candidate.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CandidateEstimate {
    pub strategy: AttackerStrategy,
    pub estimate: f64,
    pub ci_half_width: f64,
}

/// Result of [`best_response_search`].
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct BestResponse {
    /// Estimates in family order.
    pub candidates: Vec<CandidateEstimate>,
    /// Index of the minimizing candidate (first one on exact ties).
    pub best_index: usize,
}

impl BestResponse {
    pub fn best(&self) -> &CandidateEstimate {
        &self.candidates[self.best_index]
    }
}

/// Evaluates every candidate against the generator with the *same* seed
/// (common random numbers: all candidates face identical schedule draws)
/// and returns the detection-minimizing one.
pub fn best_response_search(
    generator: &ScheduleGenerator,
    params: &GameParams,
    family: &[AttackerStrategy],
    replications_per_candidate: u64,
    seed: u64,
) -> Result<BestResponse> {
    best_response_search_with(
        generator,
        params,
        family,
        replications_per_candidate,
        seed,
        &SimulationOptions::default(),
    )
}

/// [`best_response_search`] with explicit simulation options.
pub fn best_response_search_with(
    generator: &ScheduleGenerator,
    params: &GameParams,
    family: &[AttackerStrategy],
    replications_per_candidate: u64,
    seed: u64,
    options: &SimulationOptions,
) -> Result<BestResponse> {
    if family.is_empty() {
        return Err(Error::InvalidStrategy("best-response family is empty".into()));
    }
    let candidates: Vec<CandidateEstimate> = family
        .par_iter()
        .map(|strategy| {
            let result = estimate_detection_with(
                generator,
                strategy,
                params,
                replications_per_candidate,
                seed,
                options,
            )?;
            Ok(CandidateEstimate {
                strategy: strategy.clone(),
                estimate: result.estimate,
                ci_half_width: result.ci_half_width,
            })
        })
        .collect::<Result<_>>()?;
    let mut best_index = 0;
    for (index, candidate) in candidates.iter().enumerate() {
        if candidate.estimate < candidates[best_index].estimate {
            best_index = index;
        }
    }
    Ok(BestResponse { candidates, best_index })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Direction, SpeedProfile};
    use crate::schedule::{DispatchEvent, Tag};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lattice_realization(interval: f64, horizon: f64) -> ScheduleRealization {
        let mut events = Vec::new();
        let mut k = 0u64;
        loop {
            let time = k as f64 * interval;
            if time >= horizon {
                break;
            }
            events.push(
                DispatchEvent::new(
                    time,
                    Direction::Clockwise,
                    SpeedProfile::constant(1.0).unwrap(),
                    Tag::Plain,
                )
                .unwrap(),
            );
            k += 1;
        }
        ScheduleRealization::new(horizon, events).unwrap()
    }

    #[test]
    fn parse_round_trip() {
        for spec in ["fixed:12.5", "stationary", "after-pass:2:0.4", "sweep", "sweep:16"] {
            let strategy = AttackerStrategy::parse(spec).unwrap();
            assert_eq!(strategy.to_string(), spec);
        }
        assert_eq!(AttackerStrategy::parse("after-pass:1:0").unwrap().to_string(), "after-pass:1:0");
        assert!(AttackerStrategy::parse("bogus").is_err());
        assert!(AttackerStrategy::parse("after-pass:0:0").is_err());
        assert!(AttackerStrategy::parse("fixed:-1").is_err());
    }

    #[test]
    fn fixed_time_against_lattice() {
        let params = GameParams::new(1.0, 3.0, 0.5).unwrap();
        let realization = lattice_realization(1.0, 40.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let strategy = AttackerStrategy::fixed_time(0.0).unwrap();
        let window = strategy
            .plan(&realization, &params, 1.0, PerimeterPoint::BASE, &mut rng)
            .unwrap();
        assert_eq!(realization.count_passes(&window).unwrap(), 3);
    }

    #[test]
    fn fixed_time_against_empty_schedule() {
        let params = GameParams::new(1.0, 3.0, 0.5).unwrap();
        let realization = ScheduleRealization::new(40.0, vec![]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let strategy = AttackerStrategy::fixed_time(0.0).unwrap();
        let window = strategy
            .plan(&realization, &params, 1.0, PerimeterPoint::BASE, &mut rng)
            .unwrap();
        assert_eq!(realization.count_passes(&window).unwrap(), 0);
    }

    #[test]
    fn after_pass_excludes_trigger() {
        // Lattice spacing 1, t = 3.2: the window right after a pass holds
        // exactly the next three passes, not the trigger itself.
        let params = GameParams::new(1.0, 3.2, 0.5).unwrap();
        let realization = lattice_realization(1.0, 160.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let strategy = AttackerStrategy::after_kth_pass(1, 0.0).unwrap();
        for _ in 0..50 {
            let window = strategy
                .plan(&realization, &params, 1.0, PerimeterPoint::BASE, &mut rng)
                .unwrap();
            assert_eq!(realization.count_passes(&window).unwrap(), 3);
        }
    }

    #[test]
    fn after_pass_full_period_delay_matches_zero_delay() {
        let params = GameParams::new(2.0, 1.5, 0.5).unwrap();
        let realization = lattice_realization(0.5, 120.0);
        for seed in 0..50 {
            let zero = AttackerStrategy::after_kth_pass(1, 0.0).unwrap();
            let shifted = AttackerStrategy::after_kth_pass(1, 0.5).unwrap();
            let mut rng_a = ChaCha8Rng::seed_from_u64(seed);
            let mut rng_b = ChaCha8Rng::seed_from_u64(seed);
            let w0 = zero
                .plan(&realization, &params, 0.5, PerimeterPoint::BASE, &mut rng_a)
                .unwrap();
            let w1 = shifted
                .plan(&realization, &params, 0.5, PerimeterPoint::BASE, &mut rng_b)
                .unwrap();
            assert_eq!(
                realization.count_passes(&w0).unwrap(),
                realization.count_passes(&w1).unwrap()
            );
        }
    }

    #[test]
    fn after_pass_needs_enough_passes() {
        let params = GameParams::new(1.0, 3.0, 0.5).unwrap();
        let realization = lattice_realization(1.0, 120.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        // Burn-in eats 100 periods; only ~20 passes remain.
        let strategy = AttackerStrategy::after_kth_pass(50, 0.0).unwrap();
        let err = strategy.plan(&realization, &params, 1.0, PerimeterPoint::BASE, &mut rng);
        assert!(matches!(err, Err(Error::InsufficientPasses { .. })));
    }

    #[test]
    fn causality_future_events_do_not_move_the_start() {
        let params = GameParams::new(1.0, 3.2, 0.5).unwrap();
        let realization = lattice_realization(1.0, 160.0);
        let strategy = AttackerStrategy::after_kth_pass(2, 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let window = strategy
            .plan(&realization, &params, 1.0, PerimeterPoint::BASE, &mut rng)
            .unwrap();
        // Rebuild the realization with every event past the attack start
        // jittered; the planned start must not change.
        let mut events: Vec<DispatchEvent> = realization
            .events()
            .iter()
            .filter(|e| e.dispatch_time() < window.start())
            .cloned()
            .collect();
        let mut shifted = window.start() + 0.123;
        while shifted < 160.0 {
            events.push(
                DispatchEvent::new(
                    shifted,
                    Direction::Counterclockwise,
                    SpeedProfile::constant(2.0).unwrap(),
                    Tag::Plain,
                )
                .unwrap(),
            );
            shifted += 0.377;
        }
        let permuted = ScheduleRealization::new(160.0, events).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let replanned = strategy
            .plan(&permuted, &params, 1.0, PerimeterPoint::BASE, &mut rng)
            .unwrap();
        assert_eq!(window.start(), replanned.start());
    }

    #[test]
    fn standard_family_shape() {
        let params = GameParams::new(1.0, 3.2, 0.5).unwrap();
        let family = standard_family(&params, 3.2);
        // 1 stationary + 128 phases + 8 k-values x 9 delays
        assert_eq!(family.len(), 1 + 128 + 8 * 9);
        assert_eq!(family[0], AttackerStrategy::Stationary);
        assert!(matches!(family[1], AttackerStrategy::FixedTime { .. }));
        assert_eq!(family[129].to_string(), "after-pass:1:0");
    }
}
