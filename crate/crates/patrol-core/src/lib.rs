//! # patrol-core
//!
//! A perimeter-patrol game between a defender who dispatches patrollers
//! from a base — at a long-run rate capped by `lambda`, in either direction,
//! at any (possibly varying) speed — and an attacker who needs `t`
//! uninterrupted time units at some perimeter point, getting caught by each
//! passing patroller independently with probability `p`.
//!
//! The crate provides:
//!
//! - **analytics** — the closed-form detection probability both sides can
//!   guarantee, the miss-minimizing pass-count law for a fixed mean, and
//!   the Poisson-dispatch baseline;
//! - **oracle** — an independent brute-force minimizer used to cross-check
//!   the closed form;
//! - **generators** — samplers for the optimal blue/red schedule,
//!   fixed-interval, Poisson, uniform-offset, and file-specified periodic
//!   schedules, with direction/speed assignment policies;
//! - **attackers** — fixed-time, stationary, after-k-th-pass, and
//!   swept-phase strategies plus a best-response grid search;
//! - **engine** — a seeded, bit-reproducible Monte Carlo estimator with
//!   confidence intervals and empirical pass-count laws;
//! - **schedule / geometry** — the underlying event model: dispatch events,
//!   arrival times through piecewise speed profiles, half-open attack
//!   windows, and a dispatch-rate validator.
//!
//! ```
//! use patrol_core::{analytics, engine, AttackerStrategy, GameParams, ScheduleGenerator};
//!
//! let params = GameParams::new(1.0, 3.2, 0.5).unwrap();
//! let value = analytics::game_value(&params);
//! let generator = ScheduleGenerator::optimal(&params);
//! let result = engine::estimate_detection(
//!     &generator,
//!     &AttackerStrategy::Stationary,
//!     &params,
//!     10_000,
//!     42,
//! )
//! .unwrap();
//! assert!((result.estimate - value).abs() < 0.02);
//! ```

pub mod analytics;
pub mod attackers;
pub mod engine;
pub mod error;
pub mod generators;
pub mod geometry;
pub mod oracle;
pub mod params;
pub mod schedule;
pub mod stats;

pub use analytics::CountDistribution;
pub use attackers::AttackerStrategy;
pub use engine::{SimulationOptions, SimulationResult};
pub use error::{Error, Result};
pub use generators::ScheduleGenerator;
pub use geometry::{Direction, PerimeterPoint, SpeedProfile};
pub use params::GameParams;
pub use schedule::{AttackWindow, DispatchEvent, RateCapReport, ScheduleRealization, Tag};
