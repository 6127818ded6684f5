//! Dispatch events, finite-horizon schedule realizations, attack windows,
//! and pass counting.
//!
//! All boundary comparisons are exact floating comparisons on half-open
//! windows `[start, start + duration)`: a pass exactly at the window start
//! counts, a pass exactly at the window end does not.

use std::io::Write;

use crate::error::{Error, Result};
use crate::geometry::{Direction, PerimeterPoint, SpeedProfile};

/// Provenance label for a dispatch, used by tests and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tag {
    Blue,
    Red,
    Plain,
}

impl std::fmt::Display for Tag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tag::Blue => write!(f, "blue"),
            Tag::Red => write!(f, "red"),
            Tag::Plain => write!(f, "plain"),
        }
    }
}

/// One patroller's departure from the base.
#[derive(Debug, Clone, PartialEq)]
pub struct DispatchEvent {
    dispatch_time: f64,
    direction: Direction,
    speed: SpeedProfile,
    tag: Tag,
}

impl DispatchEvent {
    pub fn new(
        dispatch_time: f64,
        direction: Direction,
        speed: SpeedProfile,
        tag: Tag,
    ) -> Result<Self> {
        if !dispatch_time.is_finite() || dispatch_time < 0.0 {
            return Err(Error::InvalidRealization(format!(
                "dispatch time must be finite and >= 0, got {dispatch_time}"
            )));
        }
        Ok(Self { dispatch_time, direction, speed, tag })
    }

    pub fn dispatch_time(&self) -> f64 {
        self.dispatch_time
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn speed(&self) -> &SpeedProfile {
        &self.speed
    }

    pub fn tag(&self) -> Tag {
        self.tag
    }

    /// Arc length from the base to `x` in this event's travel direction.
    /// Arrival at the base itself is the dispatch time for both directions.
    fn arc_to(&self, x: PerimeterPoint) -> f64 {
        match self.direction {
            Direction::Clockwise => x.position(),
            Direction::Counterclockwise => {
                if x.position() == 0.0 {
                    0.0
                } else {
                    1.0 - x.position()
                }
            }
        }
    }
}

/// The unique time this patroller passes `x` during her lap.
pub fn arrival_time(event: &DispatchEvent, x: PerimeterPoint) -> f64 {
    event.dispatch_time + event.speed.travel_time(event.arc_to(x))
}

/// A fixed-length attack at one perimeter point. The vulnerable interval is
/// the half-open window `[start, start + duration)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttackWindow {
    point: PerimeterPoint,
    start: f64,
    duration: f64,
}

impl AttackWindow {
    pub fn new(point: PerimeterPoint, start: f64, duration: f64) -> Result<Self> {
        if !start.is_finite() || start < 0.0 {
            return Err(Error::InvalidRealization(format!(
                "attack start must be finite and >= 0, got {start}"
            )));
        }
        if !duration.is_finite() || duration <= 0.0 {
            return Err(Error::InvalidRealization(format!(
                "attack duration must be finite and > 0, got {duration}"
            )));
        }
        Ok(Self { point, start, duration })
    }

    pub fn point(&self) -> PerimeterPoint {
        self.point
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn end(&self) -> f64 {
        self.start + self.duration
    }
}

/// A sampled, time-sorted sequence of dispatches over a finite horizon.
///
/// The realization caches the longest lap time among its events; window
/// queries must end at least that far before the horizon, so that no pass
/// relevant to the window could have been truncated.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleRealization {
    horizon: f64,
    events: Vec<DispatchEvent>,
    max_lap_time: f64,
    uniform_motion: bool,
}

impl ScheduleRealization {
    pub fn new(horizon: f64, events: Vec<DispatchEvent>) -> Result<Self> {
        if !horizon.is_finite() || horizon <= 0.0 {
            return Err(Error::InvalidRealization(format!(
                "horizon must be finite and > 0, got {horizon}"
            )));
        }
        let mut max_lap_time: f64 = 0.0;
        for pair in events.windows(2) {
            if pair[1].dispatch_time < pair[0].dispatch_time {
                return Err(Error::InvalidRealization(
                    "events must be sorted by dispatch time".into(),
                ));
            }
        }
        for event in &events {
            if event.dispatch_time >= horizon {
                return Err(Error::InvalidRealization(format!(
                    "dispatch at {} is not before the horizon {}",
                    event.dispatch_time, horizon
                )));
            }
            max_lap_time = max_lap_time.max(event.speed.lap_time());
        }
        let uniform_motion = events
            .windows(2)
            .all(|pair| pair[0].direction == pair[1].direction && pair[0].speed == pair[1].speed);
        Ok(Self { horizon, events, max_lap_time, uniform_motion })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn events(&self) -> &[DispatchEvent] {
        &self.events
    }

    pub fn max_lap_time(&self) -> f64 {
        self.max_lap_time
    }

    /// Latest window end that pass counting will accept.
    pub fn safe_end(&self) -> f64 {
        self.horizon - self.max_lap_time
    }

    /// Number of patrollers passing the window's point during the window.
    pub fn count_passes(&self, window: &AttackWindow) -> Result<u32> {
        let end = window.end();
        if end > self.safe_end() {
            return Err(Error::WindowExceedsHorizon {
                start: window.start(),
                end,
                safe_end: self.safe_end(),
            });
        }
        // A patroller arriving in the window was dispatched no earlier than
        // start - max_lap and strictly before end.
        let lo = self.events.partition_point(|e| {
            e.dispatch_time < window.start() - self.max_lap_time
        });
        let mut count = 0u32;
        for event in &self.events[lo..] {
            if event.dispatch_time >= end {
                break;
            }
            let arrival = arrival_time(event, window.point());
            if arrival >= window.start() && arrival < end {
                count += 1;
            }
        }
        Ok(count)
    }

    /// Arrival time of the `k`-th pass (1-based) at `x` occurring at or
    /// after `origin`, or `None` if fewer than `k` such passes exist.
    pub fn kth_pass_at(&self, x: PerimeterPoint, origin: f64, k: u32) -> Option<f64> {
        debug_assert!(k >= 1);
        if self.events.is_empty() {
            return None;
        }
        if self.uniform_motion {
            // All laps share one travel time to x, so arrivals inherit the
            // dispatch order.
            let travel = self.events[0].speed.travel_time(self.events[0].arc_to(x));
            let idx = self
                .events
                .partition_point(|e| e.dispatch_time + travel < origin);
            let target = idx.checked_add(k as usize - 1)?;
            let event = self.events.get(target)?;
            return Some(event.dispatch_time + travel);
        }
        let mut arrivals: Vec<f64> = self
            .events
            .iter()
            .map(|e| arrival_time(e, x))
            .filter(|a| *a >= origin)
            .collect();
        arrivals.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite arrival"));
        arrivals.get(k as usize - 1).copied()
    }

    /// Number of passes at `x` with arrival time in `[0, horizon)`.
    pub fn passes_before_horizon(&self, x: PerimeterPoint) -> usize {
        self.events
            .iter()
            .filter(|e| arrival_time(e, x) < self.horizon)
            .count()
    }

    /// Writes the realization as CSV with columns
    /// `dispatch_time,direction,tag`.
    pub fn write_csv<W: Write>(&self, mut writer: W) -> std::io::Result<()> {
        writeln!(writer, "dispatch_time,direction,tag")?;
        for event in &self.events {
            writeln!(writer, "{},{},{}", event.dispatch_time, event.direction, event.tag)?;
        }
        Ok(())
    }
}

/// Outcome of [`validate_rate_cap`].
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RateCapReport {
    /// Dispatches per unit time over the horizon.
    pub dispatch_rate: f64,
    /// Passes at the probed point, within the horizon, per unit time.
    pub pass_rate: f64,
    /// Total passes at the probed point (one per completed lap) divided by
    /// the dispatch count.
    pub pass_dispatch_ratio: f64,
    /// The declared cap.
    pub cap: f64,
    /// Relative tolerance applied to the cap.
    pub tolerance: f64,
    /// True when the dispatch rate exceeds `cap * (1 + tolerance)`.
    pub violation: bool,
}

pub const MIN_RATE_CAP_SAMPLE: f64 = 100.0;

/// Checks that a realization respects the dispatch-rate cap and reports the
/// per-point pass rate at `x`.
///
/// Requires `horizon * lambda >= 100` so the rates are measured over a
/// meaningful sample.
pub fn validate_rate_cap(
    realization: &ScheduleRealization,
    lambda: f64,
    x: PerimeterPoint,
    tolerance: f64,
) -> Result<RateCapReport> {
    validate_rate_cap_with(realization, lambda, x, tolerance, MIN_RATE_CAP_SAMPLE)
}

/// [`validate_rate_cap`] with a configurable minimum `horizon * lambda`.
pub fn validate_rate_cap_with(
    realization: &ScheduleRealization,
    lambda: f64,
    x: PerimeterPoint,
    tolerance: f64,
    min_sample: f64,
) -> Result<RateCapReport> {
    if realization.horizon() * lambda < min_sample {
        return Err(Error::HorizonTooShort {
            horizon: realization.horizon(),
            reason: format!(
                "rate validation needs horizon * lambda >= {min_sample}"
            ),
        });
    }
    let dispatches = realization.events().len() as f64;
    let dispatch_rate = dispatches / realization.horizon();
    let pass_rate = realization.passes_before_horizon(x) as f64 / realization.horizon();
    // Strictly positive speeds mean exactly one pass of x per lap, so the
    // per-event pass count is 1 by construction.
    let total_passes = realization.events().len() as f64;
    let pass_dispatch_ratio = if dispatches > 0.0 { total_passes / dispatches } else { f64::NAN };
    Ok(RateCapReport {
        dispatch_rate,
        pass_rate,
        pass_dispatch_ratio,
        cap: lambda,
        tolerance,
        violation: dispatch_rate > lambda * (1.0 + tolerance),
    })
}
