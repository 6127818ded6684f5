//! Game parameters and the derived period decomposition.

use crate::error::{Error, Result};

/// Values of `lambda * t` within this distance of an integer are treated as
/// integer when splitting into `(m, r)`. A single product like `3.2 * 1.0`
/// can land a hair off the intended integer; the guard keeps the two formula
/// branches from flipping on such artifacts.
pub const INTEGER_GUARD: f64 = 1e-9;

/// The triple `(lambda, t, p)` defining one patrol game instance.
///
/// * `lambda` — cap on the long-run patroller dispatch rate, > 0.
/// * `t` — attack duration in time units, > 0.
/// * `p` — per-pass detection probability, in (0, 1].
///
/// The split of `lambda * t` into its integer part `m` and fractional part
/// `r` is always recomputed from the fields, never stored.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct GameParams {
    lambda: f64,
    t: f64,
    p: f64,
}

impl GameParams {
    pub fn new(lambda: f64, t: f64, p: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "lambda must be finite and > 0, got {lambda}"
            )));
        }
        if !t.is_finite() || t <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "t must be finite and > 0, got {t}"
            )));
        }
        if !p.is_finite() || p <= 0.0 || p > 1.0 {
            return Err(Error::InvalidParams(format!(
                "p must lie in (0, 1], got {p}"
            )));
        }
        Ok(Self { lambda, t, p })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// The product `lambda * t`, computed as a single multiplication.
    pub fn lambda_t(&self) -> f64 {
        self.lambda * self.t
    }

    /// Splits `lambda * t` into `(m, r)` with `m` integer and `r` in [0, 1).
    ///
    /// Products within [`INTEGER_GUARD`] of an integer are snapped to that
    /// integer, yielding `r = 0`.
    pub fn decompose(&self) -> (u64, f64) {
        split_mean(self.lambda_t())
    }

    /// Integer part of `lambda * t` (guarded).
    pub fn m(&self) -> u64 {
        self.decompose().0
    }

    /// Fractional part of `lambda * t` (guarded), in [0, 1).
    pub fn r(&self) -> f64 {
        self.decompose().1
    }
}

/// Guarded integer/fraction split used for `lambda * t` and for distribution
/// means that feed the same formulas.
pub(crate) fn split_mean(value: f64) -> (u64, f64) {
    let nearest = value.round();
    if (value - nearest).abs() < INTEGER_GUARD {
        (nearest as u64, 0.0)
    } else {
        let floor = value.floor();
        (floor as u64, value - floor)
    }
}
