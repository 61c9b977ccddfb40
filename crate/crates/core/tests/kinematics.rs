//! Fixed-step vehicle kinematics against closed-form constant-deceleration motion.

use proptest::prelude::*;
use stpa_rv::sim::{compute_stopping_time, compute_ttc, VehicleState};

const DT: f64 = 0.01;

/// Distance and ticks until standstill under constant deceleration.
fn brake_to_stop(v0: f64, decel: f64) -> (f64, u64) {
    let mut s = VehicleState::new(0.0, v0);
    let mut ticks = 0;
    while s.v > 0.0 {
        s.advance(-decel, DT);
        ticks += 1;
        assert!(ticks < 1_000_000, "vehicle never stopped");
    }
    (s.x, ticks)
}

#[test]
fn stopping_distance_and_time_on_a_grid() {
    let speeds = [10.0, 15.0, 20.0, 25.0, 30.0];
    let decels = [2.0, 4.0, 6.0, 8.0];
    let mut checked = 0;
    for v in speeds {
        for a in decels {
            let (x, ticks) = brake_to_stop(v, a);
            let exact_x = v * v / (2.0 * a);
            let rel = (x - exact_x).abs() / exact_x;
            assert!(rel < 0.01, "v={v} a={a}: distance {x} vs {exact_x} ({:.3}%)", rel * 100.0);
            let exact_t = v / a;
            let t = ticks as f64 * DT;
            assert!((t - exact_t).abs() <= DT + 1e-9, "v={v} a={a}: time {t} vs {exact_t}");
            assert!((compute_stopping_time(v, a).unwrap() - exact_t).abs() < 1e-12);
            checked += 1;
        }
    }
    assert_eq!(checked, 20);
}

#[test]
fn lead_vehicle_example() {
    let (x, ticks) = brake_to_stop(10.0, 5.0);
    assert!((x - 10.0).abs() / 10.0 < 0.01);
    assert!((ticks as f64 * DT - 2.0).abs() <= DT + 1e-9);
}

proptest! {
    #[test]
    fn speed_never_negative_and_position_never_decreases(v0 in 0.0f64..40.0, accels in prop::collection::vec(-12.0f64..4.0, 1..300)) {
        let mut s = VehicleState::new(0.0, v0);
        for a in accels {
            let before = s.x;
            s.advance(a, DT);
            prop_assert!(s.v >= 0.0);
            prop_assert!(s.x >= before);
        }
    }

    #[test]
    fn ttc_is_distance_over_closing_speed(d in 0.1f64..200.0, closing in 0.01f64..50.0) {
        let ttc = compute_ttc(d, -closing).unwrap();
        prop_assert!((ttc * closing - d).abs() < 1e-9 * d.max(1.0));
        prop_assert_eq!(compute_ttc(d, closing), None);
    }
}
