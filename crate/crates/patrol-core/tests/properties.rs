//! Property tests for the closed-form analytics and the event geometry.

use proptest::prelude::*;

use patrol_core::analytics::{
    expected_miss, game_value, game_value_case_form, game_value_concise_form,
    optimal_count_distribution, poisson_detection, truncated_poisson,
};
use patrol_core::generators::sample_poisson;
use patrol_core::geometry::{PerimeterPoint, SpeedProfile, SpeedSegment};
use patrol_core::oracle::lemma_oracle;
use patrol_core::schedule::{arrival_time, AttackWindow, DispatchEvent, ScheduleRealization, Tag};
use patrol_core::{Direction, GameParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn arb_params() -> impl Strategy<Value = GameParams> {
    (0.05f64..8.0, 0.05f64..8.0, 0.01f64..=1.0)
        .prop_map(|(lambda, t, p)| GameParams::new(lambda, t, p).unwrap())
}

proptest! {
    #[test]
    fn value_forms_agree(params in arb_params()) {
        let case = game_value_case_form(&params);
        let concise = game_value_concise_form(&params);
        prop_assert!((case - concise).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&case));
    }

    #[test]
    fn value_composes_through_the_two_point_law(params in arb_params()) {
        let law = optimal_count_distribution(params.lambda_t()).unwrap();
        let composed = 1.0 - expected_miss(&law, params.p());
        prop_assert!((game_value(&params) - composed).abs() <= 1e-12);
    }

    #[test]
    fn value_monotone_in_each_parameter(
        params in arb_params(),
        bump in 0.01f64..3.0,
    ) {
        let base = game_value(&params);
        let more_p = GameParams::new(
            params.lambda(),
            params.t(),
            (params.p() + bump).min(1.0),
        ).unwrap();
        prop_assert!(game_value(&more_p) >= base - 1e-12);
        let more_lambda = GameParams::new(params.lambda() + bump, params.t(), params.p()).unwrap();
        prop_assert!(game_value(&more_lambda) >= base - 1e-12);
        let more_t = GameParams::new(params.lambda(), params.t() + bump, params.p()).unwrap();
        prop_assert!(game_value(&more_t) >= base - 1e-12);
    }

    #[test]
    fn oracle_agrees_with_closed_form(c in 0.0f64..10.0, p in 0.01f64..0.999) {
        let (oracle_miss, oracle_law) = lemma_oracle(c, p, 25).unwrap();
        let law = optimal_count_distribution(c).unwrap();
        let closed = expected_miss(&law, p);
        prop_assert!((oracle_miss - closed).abs() <= 1e-12,
            "c={c} p={p}: oracle {oracle_miss}, closed {closed}");
        prop_assert!(oracle_law.approx_eq(&law, 1e-9));
    }

    #[test]
    fn poisson_counts_never_beat_the_two_point_law(c in 0.05f64..10.0, p in 0.01f64..0.999) {
        let (poisson_law, _) = truncated_poisson(c, 4000).unwrap();
        let (oracle_miss, _) = lemma_oracle(c, p, 60).unwrap();
        let poisson_miss = expected_miss(&poisson_law, p);
        prop_assert!(poisson_miss >= oracle_miss - 1e-9);
        // Strict suboptimality away from the degenerate corners.
        if p < 0.95 && c > 0.2 {
            prop_assert!(poisson_miss > oracle_miss + 1e-6);
        }
    }

    #[test]
    fn poisson_dispatch_is_never_better(params in arb_params()) {
        let value = game_value(&params);
        let poisson = poisson_detection(&params);
        prop_assert!(poisson <= value + 1e-12);
        if params.p() < 1.0 {
            prop_assert!(poisson < value);
        }
    }

    #[test]
    fn two_point_law_hits_the_mean(c in 0.001f64..20.0) {
        // Stay clear of the integer guard band so the mean is exact.
        prop_assume!((c - c.round()).abs() > 1e-6);
        let law = optimal_count_distribution(c).unwrap();
        prop_assert!((law.mean() - c).abs() < 1e-12);
        prop_assert!(law.pmf().len() == 2);
        prop_assert!(law.max_support() == c.ceil() as u64);
    }

    #[test]
    fn arrival_increases_along_travel_direction(
        dispatch in 0.0f64..100.0,
        xs in prop::collection::vec(0.0f64..1.0, 2..6),
        clockwise in any::<bool>(),
    ) {
        let direction = if clockwise { Direction::Clockwise } else { Direction::Counterclockwise };
        let profile = SpeedProfile::piecewise(vec![
            SpeedSegment { fraction: 0.3, speed: 0.7 },
            SpeedSegment { fraction: 0.7, speed: 1.9 },
        ]).unwrap();
        let event = DispatchEvent::new(dispatch, direction, profile, Tag::Plain).unwrap();
        let mut xs = xs;
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        xs.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
        // Clockwise visits increasing x; counterclockwise decreasing x.
        let ordered: Vec<f64> = if clockwise {
            xs.clone()
        } else {
            xs.iter().rev().cloned().collect()
        };
        for pair in ordered.windows(2) {
            let a = arrival_time(&event, PerimeterPoint::new(pair[0]).unwrap());
            let b = arrival_time(&event, PerimeterPoint::new(pair[1]).unwrap());
            if pair[0] != 0.0 && pair[1] != 0.0 {
                prop_assert!(a < b, "arrivals {a} !< {b} for {pair:?}");
            }
        }
    }

    #[test]
    fn window_counts_add_over_a_split(
        seed in any::<u64>(),
        start in 0.0f64..20.0,
        first in 0.2f64..4.0,
        second in 0.2f64..4.0,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let realization = sample_poisson(1.3, 40.0, &mut rng).unwrap();
        let x = PerimeterPoint::new(0.37).unwrap();
        let w_first = AttackWindow::new(x, start, first).unwrap();
        let boundary = w_first.end();
        let w_second = AttackWindow::new(x, boundary, second).unwrap();
        let w_both = AttackWindow::new(x, start, boundary + second - start).unwrap();
        let total = realization.count_passes(&w_both).unwrap();
        let split = realization.count_passes(&w_first).unwrap()
            + realization.count_passes(&w_second).unwrap();
        prop_assert_eq!(total, split);
    }

    #[test]
    fn constant_speed_counts_shift_with_travel_time(
        seed in any::<u64>(),
        start in 2.0f64..20.0,
        x1 in 0.0f64..1.0,
        x2 in 0.0f64..1.0,
    ) {
        // With a shared constant speed, moving the attack point only shifts
        // every arrival by the travel-time difference; shifting the window
        // start the same way preserves the count.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let realization = sample_poisson(1.7, 60.0, &mut rng).unwrap();
        let p1 = PerimeterPoint::new(x1).unwrap();
        let p2 = PerimeterPoint::new(x2).unwrap();
        let w1 = AttackWindow::new(p1, start, 3.2).unwrap();
        let w2 = AttackWindow::new(p2, start + (x2 - x1), 3.2).unwrap();
        prop_assert_eq!(
            realization.count_passes(&w1).unwrap(),
            realization.count_passes(&w2).unwrap()
        );
    }
}

#[test]
fn truncated_poisson_reports_tiny_tail() {
    for mean in [0.1, 1.6, 7.3] {
        let (law, tail) = truncated_poisson(mean, 4000).unwrap();
        assert!(tail < 1e-12, "tail {tail} at mean {mean}");
        let total: f64 = law.pmf().values().sum();
        assert!((total - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn empty_schedule_has_ratio_one_by_convention() {
    let realization = ScheduleRealization::new(200.0, vec![]).unwrap();
    let report = patrol_core::schedule::validate_rate_cap(
        &realization,
        1.0,
        PerimeterPoint::BASE,
        0.02,
    )
    .unwrap();
    assert!(report.pass_dispatch_ratio.is_nan());
    assert!(!report.violation);
}
