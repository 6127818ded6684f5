//! Perimeter geometry: positions, travel directions, speed profiles, and
//! the arrival-time computation for a single patrol lap.
//!
//! The perimeter is normalized to circumference 1 with the base at position
//! 0. Patrollers complete exactly one lap without turning around, so each
//! one passes every point exactly once per trip.

use std::sync::Arc;

use crate::error::{Error, Result};

/// A position on the unit-circumference perimeter, in [0, 1). The base sits
/// at 0.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PerimeterPoint(f64);

impl PerimeterPoint {
    /// The dispatch base.
    pub const BASE: PerimeterPoint = PerimeterPoint(0.0);

    pub fn new(x: f64) -> Result<Self> {
        if !x.is_finite() || !(0.0..1.0).contains(&x) {
            return Err(Error::InvalidPoint(x));
        }
        Ok(Self(x))
    }

    pub fn position(&self) -> f64 {
        self.0
    }
}

/// Travel direction around the perimeter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Clockwise,
    Counterclockwise,
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Direction::Clockwise => write!(f, "clockwise"),
            Direction::Counterclockwise => write!(f, "counterclockwise"),
        }
    }
}

/// One leg of a piecewise speed profile: a fraction of the lap covered at a
/// constant speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedSegment {
    pub fraction: f64,
    pub speed: f64,
}

/// Speed as a function of progress along the lap.
///
/// Speeds are strictly positive, which is what "no turning around" means
/// here: progress is strictly monotone, so every lap passes every point
/// exactly once.
#[derive(Debug, Clone, PartialEq)]
pub enum SpeedProfile {
    Constant(f64),
    Piecewise(Arc<[SpeedSegment]>),
}

impl SpeedProfile {
    /// Constant speed for the whole lap.
    pub fn constant(speed: f64) -> Result<Self> {
        if !speed.is_finite() || speed <= 0.0 {
            return Err(Error::InvalidSpeedProfile(format!(
                "speed must be finite and > 0, got {speed}"
            )));
        }
        Ok(Self::Constant(speed))
    }

    /// Piecewise-constant speed. Fractions must be positive and sum to 1
    /// (within 1e-9); speeds must be strictly positive.
    pub fn piecewise(segments: Vec<SpeedSegment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidSpeedProfile("no segments".into()));
        }
        let mut total = 0.0;
        for seg in &segments {
            if !seg.fraction.is_finite() || seg.fraction <= 0.0 {
                return Err(Error::InvalidSpeedProfile(format!(
                    "segment fraction must be > 0, got {}",
                    seg.fraction
                )));
            }
            if !seg.speed.is_finite() || seg.speed <= 0.0 {
                return Err(Error::InvalidSpeedProfile(format!(
                    "segment speed must be > 0, got {}",
                    seg.speed
                )));
            }
            total += seg.fraction;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidSpeedProfile(format!(
                "fractions must sum to 1, got {total}"
            )));
        }
        Ok(Self::Piecewise(segments.into()))
    }

    /// Time to cover the first `arc` units of the lap, `arc` in [0, 1].
    /// The final segment absorbs any sub-1e-9 rounding left over from the
    /// fraction sum.
    pub fn travel_time(&self, arc: f64) -> f64 {
        debug_assert!((0.0..=1.0 + 1e-9).contains(&arc));
        match self {
            SpeedProfile::Constant(speed) => arc / speed,
            SpeedProfile::Piecewise(segments) => {
                let mut remaining = arc;
                let mut time = 0.0;
                for seg in segments.iter() {
                    if remaining <= seg.fraction {
                        return time + remaining / seg.speed;
                    }
                    time += seg.fraction / seg.speed;
                    remaining -= seg.fraction;
                }
                time + remaining / segments.last().expect("nonempty").speed
            }
        }
    }

    /// Duration of a full lap.
    pub fn lap_time(&self) -> f64 {
        self.travel_time(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_bounds() {
        assert!(PerimeterPoint::new(0.0).is_ok());
        assert!(PerimeterPoint::new(0.999).is_ok());
        assert!(PerimeterPoint::new(1.0).is_err());
        assert!(PerimeterPoint::new(-0.1).is_err());
        assert!(PerimeterPoint::new(f64::NAN).is_err());
    }

    #[test]
    fn piecewise_validation() {
        assert!(SpeedProfile::constant(0.0).is_err());
        assert!(SpeedProfile::piecewise(vec![]).is_err());
        let bad_sum = SpeedProfile::piecewise(vec![
            SpeedSegment { fraction: 0.5, speed: 1.0 },
            SpeedSegment { fraction: 0.4, speed: 1.0 },
        ]);
        assert!(bad_sum.is_err());
        let zero_speed = SpeedProfile::piecewise(vec![
            SpeedSegment { fraction: 0.5, speed: 1.0 },
            SpeedSegment { fraction: 0.5, speed: 0.0 },
        ]);
        assert!(zero_speed.is_err());
    }

    #[test]
    fn piecewise_travel_time() {
        let profile = SpeedProfile::piecewise(vec![
            SpeedSegment { fraction: 0.5, speed: 0.5 },
            SpeedSegment { fraction: 0.5, speed: 1.0 },
        ])
        .unwrap();
        // 0.5 / 0.5 + 0.25 / 1.0
        assert!((profile.travel_time(0.75) - 1.25).abs() < 1e-15);
        assert!((profile.lap_time() - 1.5).abs() < 1e-15);
        assert_eq!(profile.travel_time(0.0), 0.0);
    }

    #[test]
    fn constant_lap_time() {
        let profile = SpeedProfile::constant(2.0).unwrap();
        assert!((profile.lap_time() - 0.5).abs() < 1e-15);
    }
}
