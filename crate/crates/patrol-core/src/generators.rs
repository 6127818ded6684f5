//! Defender strategies as samplers: a generator spec plus a seeded random
//! source yields a [`ScheduleRealization`] over a horizon.
//!
//! Every generator's long-run dispatch rate equals the declared cap (and
//! never exceeds it); `validate_rate_cap` can confirm this on samples.

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{Direction, SpeedProfile, SpeedSegment};
use crate::params::GameParams;
use crate::schedule::{DispatchEvent, ScheduleRealization, Tag};

/// How dispatched patrollers are assigned a travel direction.
#[derive(Debug, Clone, PartialEq)]
pub enum DirectionPolicy {
    Fixed(Direction),
    /// Even dispatch indices go clockwise, odd ones counterclockwise.
    Alternating,
    /// Independent draw per dispatch.
    Random { ccw_fraction: f64 },
}

/// How dispatched patrollers are assigned a speed profile.
#[derive(Debug, Clone, PartialEq)]
pub enum SpeedPolicy {
    /// Every patroller uses the same profile.
    Shared(SpeedProfile),
    /// Each patroller gets an independently sampled piecewise profile with
    /// the given segment count and speeds uniform in `[min_speed, max_speed]`.
    RandomPiecewise { segments: u32, min_speed: f64, max_speed: f64 },
}

/// Direction and speed assignment applied to the dispatch times a generator
/// produces. The default is the reduction every analysis here relies on:
/// all clockwise at constant speed 1.
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentPolicy {
    pub direction: DirectionPolicy,
    pub speed: SpeedPolicy,
}

impl Default for AssignmentPolicy {
    fn default() -> Self {
        Self {
            direction: DirectionPolicy::Fixed(Direction::Clockwise),
            speed: SpeedPolicy::Shared(SpeedProfile::Constant(1.0)),
        }
    }
}

impl AssignmentPolicy {
    fn validate(&self) -> Result<()> {
        if let DirectionPolicy::Random { ccw_fraction } = self.direction {
            if !(0.0..=1.0).contains(&ccw_fraction) || !ccw_fraction.is_finite() {
                return Err(Error::SpecParse(format!(
                    "ccw_fraction must lie in [0, 1], got {ccw_fraction}"
                )));
            }
        }
        if let SpeedPolicy::RandomPiecewise { segments, min_speed, max_speed } = self.speed {
            if segments == 0 {
                return Err(Error::InvalidSpeedProfile("segments must be >= 1".into()));
            }
            if !min_speed.is_finite() || min_speed <= 0.0 || !max_speed.is_finite() || max_speed < min_speed
            {
                return Err(Error::InvalidSpeedProfile(format!(
                    "need 0 < min_speed <= max_speed, got {min_speed}..{max_speed}"
                )));
            }
        }
        Ok(())
    }

    /// Longest lap any assignment under this policy can produce.
    pub fn max_lap_time(&self) -> f64 {
        match &self.speed {
            SpeedPolicy::Shared(profile) => profile.lap_time(),
            SpeedPolicy::RandomPiecewise { min_speed, .. } => 1.0 / min_speed,
        }
    }

    fn assign<R: Rng + ?Sized>(&self, index: usize, rng: &mut R) -> Result<(Direction, SpeedProfile)> {
        let direction = match &self.direction {
            DirectionPolicy::Fixed(d) => *d,
            DirectionPolicy::Alternating => {
                if index % 2 == 0 {
                    Direction::Clockwise
                } else {
                    Direction::Counterclockwise
                }
            }
            DirectionPolicy::Random { ccw_fraction } => {
                if rng.random_bool(*ccw_fraction) {
                    Direction::Counterclockwise
                } else {
                    Direction::Clockwise
                }
            }
        };
        let speed = match &self.speed {
            SpeedPolicy::Shared(profile) => profile.clone(),
            SpeedPolicy::RandomPiecewise { segments, min_speed, max_speed } => {
                // Flat Dirichlet fractions via normalized exponentials.
                let weights: Vec<f64> = (0..*segments)
                    .map(|_| (-(1.0 - rng.random::<f64>()).ln()).max(1e-9))
                    .collect();
                let total: f64 = weights.iter().sum();
                let segments: Vec<SpeedSegment> = weights
                    .into_iter()
                    .map(|w| SpeedSegment {
                        fraction: w / total,
                        speed: min_speed + (max_speed - min_speed) * rng.random::<f64>(),
                    })
                    .collect();
                SpeedProfile::piecewise(segments)?
            }
        };
        Ok((direction, speed))
    }
}

fn validate_lambda(lambda: f64) -> Result<()> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "dispatch rate must be finite and > 0, got {lambda}"
        )));
    }
    Ok(())
}

fn assemble<R: Rng + ?Sized>(
    horizon: f64,
    times: Vec<(f64, Tag)>,
    policy: &AssignmentPolicy,
    rng: &mut R,
) -> Result<ScheduleRealization> {
    let events = times
        .into_iter()
        .enumerate()
        .map(|(index, (time, tag))| {
            let (direction, speed) = policy.assign(index, rng)?;
            DispatchEvent::new(time, direction, speed, tag)
        })
        .collect::<Result<Vec<_>>>()?;
    ScheduleRealization::new(horizon, events)
}

fn deterministic_times(lambda: f64, emit_horizon: f64, first_index: u64, tag: Tag) -> Vec<(f64, Tag)> {
    let mut times = Vec::new();
    let mut k = first_index;
    loop {
        let time = k as f64 / lambda;
        if time >= emit_horizon {
            return times;
        }
        times.push((time, tag));
        k += 1;
    }
}

fn optimal_times<R: Rng + ?Sized>(
    params: &GameParams,
    emit_horizon: f64,
    rng: &mut R,
) -> Vec<(f64, Tag)> {
    let (m, r) = params.decompose();
    if r == 0.0 {
        // Integer product: fixed intervals of 1/lambda.
        return deterministic_times(params.lambda(), emit_horizon, 1, Tag::Blue);
    }
    let t = params.t();
    let delta = t / (m + 1) as f64;
    let mut times = Vec::new();
    let mut j = 0u64;
    loop {
        let period_start = j as f64 * t;
        if period_start >= emit_horizon {
            return times;
        }
        if rng.random_bool(r) {
            times.push((period_start, Tag::Red));
        }
        for k in 1..=m {
            let blue = period_start + k as f64 * delta;
            if blue < emit_horizon {
                times.push((blue, Tag::Blue));
            }
        }
        j += 1;
    }
}

fn poisson_times<R: Rng + ?Sized>(lambda: f64, emit_horizon: f64, rng: &mut R) -> Vec<(f64, Tag)> {
    let mut times = Vec::new();
    let mut time = 0.0;
    loop {
        let u: f64 = rng.random();
        time += -(1.0 - u).ln() / lambda;
        if time >= emit_horizon {
            return times;
        }
        times.push((time, Tag::Plain));
    }
}

fn uniform_offset_times<R: Rng + ?Sized>(
    lambda: f64,
    emit_horizon: f64,
    rng: &mut R,
) -> Vec<(f64, Tag)> {
    let interval = 1.0 / lambda;
    let offset = rng.random::<f64>() * interval;
    let mut times = Vec::new();
    let mut k = 0u64;
    loop {
        let time = offset + k as f64 * interval;
        if time >= emit_horizon {
            return times;
        }
        times.push((time, Tag::Plain));
        k += 1;
    }
}

fn periodic_times(period: f64, offsets: &[f64], emit_horizon: f64) -> Vec<(f64, Tag)> {
    let mut times = Vec::new();
    let mut j = 0u64;
    loop {
        let base = j as f64 * period;
        if base >= emit_horizon {
            return times;
        }
        for &offset in offsets {
            let time = base + offset;
            if time < emit_horizon {
                times.push((time, Tag::Plain));
            }
        }
        j += 1;
    }
}

/// Samples the value-achieving patrol schedule: blue patrollers at
/// `j t + k delta` (`delta = t / (m+1)`, `k = 1..m`) plus an independent
/// red patroller at each `j t` with probability `r`. When `lambda * t` is
/// an integer this degenerates to fixed intervals of `1/lambda`.
///
/// Default assignment: all clockwise at constant speed 1.
pub fn sample_optimal<R: Rng + ?Sized>(
    params: &GameParams,
    horizon: f64,
    rng: &mut R,
) -> Result<ScheduleRealization> {
    if !horizon.is_finite() || horizon < params.t() {
        return Err(Error::HorizonTooShort {
            horizon,
            reason: format!("need horizon >= t = {}", params.t()),
        });
    }
    let times = optimal_times(params, horizon, rng);
    assemble(horizon, times, &AssignmentPolicy::default(), rng)
}

/// Dispatches at fixed intervals of `1/lambda`, starting at 0.
pub fn sample_deterministic(lambda: f64, horizon: f64) -> Result<ScheduleRealization> {
    validate_lambda(lambda)?;
    let times = deterministic_times(lambda, horizon, 0, Tag::Plain);
    let mut no_rng = NoRandom;
    assemble(horizon, times, &AssignmentPolicy::default(), &mut no_rng)
}

/// Homogeneous Poisson process at rate `lambda` via exponential
/// interarrivals.
pub fn sample_poisson<R: Rng + ?Sized>(
    lambda: f64,
    horizon: f64,
    rng: &mut R,
) -> Result<ScheduleRealization> {
    validate_lambda(lambda)?;
    let times = poisson_times(lambda, horizon, rng);
    assemble(horizon, times, &AssignmentPolicy::default(), rng)
}

/// The `1/lambda` lattice shifted by a single uniform offset drawn from
/// `[0, 1/lambda)`.
pub fn sample_uniform_offset<R: Rng + ?Sized>(
    lambda: f64,
    horizon: f64,
    rng: &mut R,
) -> Result<ScheduleRealization> {
    validate_lambda(lambda)?;
    let times = uniform_offset_times(lambda, horizon, rng);
    assemble(horizon, times, &AssignmentPolicy::default(), rng)
}

/// Rng stand-in for sampling paths that must consume no randomness.
struct NoRandom;

impl rand::RngCore for NoRandom {
    fn next_u32(&mut self) -> u32 {
        unreachable!("deterministic sampling must not draw randomness")
    }

    fn next_u64(&mut self) -> u64 {
        unreachable!("deterministic sampling must not draw randomness")
    }

    fn fill_bytes(&mut self, _dest: &mut [u8]) {
        unreachable!("deterministic sampling must not draw randomness")
    }
}

/// The supported generator kinds.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorKind {
    Optimal { lambda: f64, t: f64 },
    Deterministic { lambda: f64 },
    Poisson { lambda: f64 },
    UniformOffset { lambda: f64 },
    /// Explicit dispatch offsets repeated with the given period.
    Periodic { lambda: f64, period: f64, offsets: Vec<f64> },
}

/// A defender strategy: a dispatch-time law plus a direction/speed
/// assignment policy.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleGenerator {
    kind: GeneratorKind,
    policy: AssignmentPolicy,
    label: Option<String>,
}

impl ScheduleGenerator {
    pub fn optimal(params: &GameParams) -> Self {
        Self {
            kind: GeneratorKind::Optimal { lambda: params.lambda(), t: params.t() },
            policy: AssignmentPolicy::default(),
            label: None,
        }
    }

    pub fn deterministic(lambda: f64) -> Result<Self> {
        validate_lambda(lambda)?;
        Ok(Self {
            kind: GeneratorKind::Deterministic { lambda },
            policy: AssignmentPolicy::default(),
            label: None,
        })
    }

    pub fn poisson(lambda: f64) -> Result<Self> {
        validate_lambda(lambda)?;
        Ok(Self {
            kind: GeneratorKind::Poisson { lambda },
            policy: AssignmentPolicy::default(),
            label: None,
        })
    }

    pub fn uniform_offset(lambda: f64) -> Result<Self> {
        validate_lambda(lambda)?;
        Ok(Self {
            kind: GeneratorKind::UniformOffset { lambda },
            policy: AssignmentPolicy::default(),
            label: None,
        })
    }

    /// A periodic template. Offsets must lie in `[0, period)` and their
    /// implied dispatch rate must not exceed `lambda`.
    pub fn periodic(lambda: f64, period: f64, mut offsets: Vec<f64>) -> Result<Self> {
        validate_lambda(lambda)?;
        if !period.is_finite() || period <= 0.0 {
            return Err(Error::SpecParse(format!(
                "period must be finite and > 0, got {period}"
            )));
        }
        for &offset in &offsets {
            if !offset.is_finite() || !(0.0..period).contains(&offset) {
                return Err(Error::SpecParse(format!(
                    "offset {offset} must lie in [0, {period})"
                )));
            }
        }
        let implied = offsets.len() as f64 / period;
        if implied > lambda * (1.0 + 1e-9) {
            return Err(Error::RateCapExceeded { declared: lambda, implied });
        }
        offsets.sort_by(|a, b| a.partial_cmp(b).expect("finite offsets"));
        Ok(Self {
            kind: GeneratorKind::Periodic { lambda, period, offsets },
            policy: AssignmentPolicy::default(),
            label: None,
        })
    }

    pub fn with_policy(mut self, policy: AssignmentPolicy) -> Result<Self> {
        policy.validate()?;
        self.policy = policy;
        Ok(self)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn kind(&self) -> &GeneratorKind {
        &self.kind
    }

    pub fn policy(&self) -> &AssignmentPolicy {
        &self.policy
    }

    /// The declared rate cap.
    pub fn lambda(&self) -> f64 {
        match &self.kind {
            GeneratorKind::Optimal { lambda, .. }
            | GeneratorKind::Deterministic { lambda }
            | GeneratorKind::Poisson { lambda }
            | GeneratorKind::UniformOffset { lambda }
            | GeneratorKind::Periodic { lambda, .. } => *lambda,
        }
    }

    /// The long-run dispatch rate actually produced.
    pub fn dispatch_rate(&self) -> f64 {
        match &self.kind {
            GeneratorKind::Periodic { period, offsets, .. } => offsets.len() as f64 / period,
            _ => self.lambda(),
        }
    }

    /// Cycle length of the dispatch law: `t` for the optimal pattern, the
    /// declared period for periodic templates, `1/lambda` otherwise (for
    /// the Poisson process this is just a convenient reference scale).
    pub fn period(&self) -> f64 {
        match &self.kind {
            GeneratorKind::Optimal { t, .. } => *t,
            GeneratorKind::Periodic { period, .. } => *period,
            _ => 1.0 / self.lambda(),
        }
    }

    pub fn kind_str(&self) -> &'static str {
        match &self.kind {
            GeneratorKind::Optimal { .. } => "optimal",
            GeneratorKind::Deterministic { .. } => "deterministic",
            GeneratorKind::Poisson { .. } => "poisson",
            GeneratorKind::UniformOffset { .. } => "uniform-offset",
            GeneratorKind::Periodic { .. } => "periodic",
        }
    }

    /// Label used in reports: the spec-file name when present, else the
    /// kind string.
    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.kind_str().to_string())
    }

    /// Samples a realization able to answer any window query ending by
    /// `horizon`: events are emitted up to `horizon` plus one maximal lap so
    /// no pass is truncated.
    pub fn sample<R: Rng + ?Sized>(&self, horizon: f64, rng: &mut R) -> Result<ScheduleRealization> {
        if !horizon.is_finite() || horizon <= 0.0 {
            return Err(Error::HorizonTooShort {
                horizon,
                reason: "horizon must be finite and > 0".into(),
            });
        }
        let emit_horizon = horizon + self.policy.max_lap_time();
        let times = match &self.kind {
            GeneratorKind::Optimal { lambda, t } => {
                if horizon < *t {
                    return Err(Error::HorizonTooShort {
                        horizon,
                        reason: format!("need horizon >= t = {t}"),
                    });
                }
                let params = GameParams::new(*lambda, *t, 1.0).expect("validated at construction");
                optimal_times(&params, emit_horizon, rng)
            }
            GeneratorKind::Deterministic { lambda } => {
                deterministic_times(*lambda, emit_horizon, 0, Tag::Plain)
            }
            GeneratorKind::Poisson { lambda } => poisson_times(*lambda, emit_horizon, rng),
            GeneratorKind::UniformOffset { lambda } => {
                uniform_offset_times(*lambda, emit_horizon, rng)
            }
            GeneratorKind::Periodic { period, offsets, .. } => {
                periodic_times(*period, offsets, emit_horizon)
            }
        };
        assemble(emit_horizon, times, &self.policy, rng)
    }
}

// ---------------------------------------------------------------------------
// Schedule-spec documents
// ---------------------------------------------------------------------------

/// JSON schema for schedule specs, `schema_version = 1`:
///
/// ```json
/// {
///   "schema_version": 1,
///   "name": "optional label",
///   "lambda": 1.0,
///   "kind": {"type": "optimal", "t": 3.2},
///   "direction": {"random": {"ccw_fraction": 0.5}},
///   "speed": {"random-piecewise": {"segments": 3, "min_speed": 0.5, "max_speed": 2.0}}
/// }
/// ```
///
/// `kind.type` is one of `optimal` (field `t`), `deterministic`, `poisson`,
/// `uniform-offset`, or `periodic` (fields `period`, `offsets`).
/// `direction` is `"clockwise"`, `"counterclockwise"`, `"alternating"`, or
/// `{"random": {"ccw_fraction": x}}`; `speed` is `{"constant": v}`,
/// `{"piecewise": [{"fraction": f, "speed": v}, ...]}`, or
/// `{"random-piecewise": {...}}`. Direction and speed default to clockwise
/// at constant speed 1.
#[derive(Debug, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleSpecDoc {
    schema_version: u32,
    #[serde(default)]
    name: Option<String>,
    lambda: f64,
    kind: KindSpec,
    #[serde(default)]
    direction: Option<DirectionSpec>,
    #[serde(default)]
    speed: Option<SpeedSpec>,
}

#[derive(Debug, serde::Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
enum KindSpec {
    Optimal { t: f64 },
    Deterministic,
    Poisson,
    UniformOffset,
    Periodic { period: f64, offsets: Vec<f64> },
}

#[derive(Debug, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
enum DirectionSpec {
    Clockwise,
    Counterclockwise,
    Alternating,
    Random { ccw_fraction: f64 },
}

#[derive(Debug, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
enum SpeedSpec {
    Constant(f64),
    Piecewise(Vec<SegmentSpec>),
    RandomPiecewise { segments: u32, min_speed: f64, max_speed: f64 },
}

#[derive(Debug, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct SegmentSpec {
    fraction: f64,
    speed: f64,
}

/// Parses and validates a schedule-spec JSON document.
pub fn load_schedule_spec(document: &str) -> Result<ScheduleGenerator> {
    let doc: ScheduleSpecDoc =
        serde_json::from_str(document).map_err(|e| Error::SpecParse(e.to_string()))?;
    if doc.schema_version != 1 {
        return Err(Error::SpecParse(format!(
            "unsupported schema_version {}",
            doc.schema_version
        )));
    }
    validate_lambda(doc.lambda)?;
    let generator = match doc.kind {
        KindSpec::Optimal { t } => {
            let params = GameParams::new(doc.lambda, t, 1.0)?;
            ScheduleGenerator::optimal(&params)
        }
        KindSpec::Deterministic => ScheduleGenerator::deterministic(doc.lambda)?,
        KindSpec::Poisson => ScheduleGenerator::poisson(doc.lambda)?,
        KindSpec::UniformOffset => ScheduleGenerator::uniform_offset(doc.lambda)?,
        KindSpec::Periodic { period, offsets } => {
            ScheduleGenerator::periodic(doc.lambda, period, offsets)?
        }
    };
    let direction = match doc.direction {
        None | Some(DirectionSpec::Clockwise) => DirectionPolicy::Fixed(Direction::Clockwise),
        Some(DirectionSpec::Counterclockwise) => {
            DirectionPolicy::Fixed(Direction::Counterclockwise)
        }
        Some(DirectionSpec::Alternating) => DirectionPolicy::Alternating,
        Some(DirectionSpec::Random { ccw_fraction }) => DirectionPolicy::Random { ccw_fraction },
    };
    let speed = match doc.speed {
        None => SpeedPolicy::Shared(SpeedProfile::Constant(1.0)),
        Some(SpeedSpec::Constant(v)) => SpeedPolicy::Shared(SpeedProfile::constant(v)?),
        Some(SpeedSpec::Piecewise(segments)) => SpeedPolicy::Shared(SpeedProfile::piecewise(
            segments
                .into_iter()
                .map(|s| SpeedSegment { fraction: s.fraction, speed: s.speed })
                .collect(),
        )?),
        Some(SpeedSpec::RandomPiecewise { segments, min_speed, max_speed }) => {
            SpeedPolicy::RandomPiecewise { segments, min_speed, max_speed }
        }
    };
    let generator = generator.with_policy(AssignmentPolicy { direction, speed })?;
    Ok(match doc.name {
        Some(name) => generator.with_label(name),
        None => generator,
    })
}
