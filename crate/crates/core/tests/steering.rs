mod support;

use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use sparse_plan::steering::dubins;
use sparse_plan::{State, SteeringSpec};
use support::dubins_sweep;

fn pose() -> impl Strategy<Value = State> {
    (-8.0..8.0f64, -8.0..8.0f64, 0.0..TAU).prop_map(|(x, y, t)| State::se2(x, y, t))
}

fn point() -> impl Strategy<Value = State> {
    (-20.0..20.0f64, -20.0..20.0f64).prop_map(|(x, y)| State::r2(x, y))
}

fn cost(spec: &SteeringSpec, a: State, b: State) -> f64 {
    spec.steer_free(a, b).min_cost()
}

#[test]
fn known_dubins_lengths() {
    let a = State::se2(0.0, 0.0, 0.0);
    assert!((dubins::min_cost(a, State::se2(4.0, 0.0, 0.0), 1.0) - 4.0).abs() < 1e-12);
    // quarter turn onto the left circle
    assert!((dubins::min_cost(a, State::se2(1.0, 1.0, PI / 2.0), 1.0) - PI / 2.0).abs() < 1e-9);
    // reversed heading in place needs a loop
    let back = dubins::min_cost(a, State::se2(0.0, 0.0, PI), 1.0);
    assert!((back - dubins_sweep(a, State::se2(0.0, 0.0, PI), 1.0)).abs() < 1e-6);
}

#[test]
fn sweep_agrees_on_a_grid_of_goals() {
    let a = State::se2(0.0, 0.0, 0.0);
    for i in -3..=3 {
        for j in -3..=3 {
            for k in 0..8 {
                let b = State::se2(1.5 * i as f64, 1.5 * j as f64, k as f64 * PI / 4.0);
                let closed = dubins::min_cost(a, b, 1.0);
                let swept = dubins_sweep(a, b, 1.0);
                assert!((closed - swept).abs() < 1e-4, "{b:?}: {closed} vs {swept}");
            }
        }
    }
}

#[test]
fn every_word_ends_at_the_goal() {
    let a = State::se2(1.0, 2.0, 0.3);
    let b = State::se2(-3.0, 4.0, 4.0);
    let words = dubins::all_words(a, b, 1.0);
    assert!(!words.is_empty());
    for (w, t) in words {
        assert!(t.end().approx_eq(&b, 1e-6), "{w:?} ends at {:?}", t.end());
        assert!(t.start().approx_eq(&a, 1e-9));
    }
}

proptest! {
    #[test]
    fn dubins_matches_sweep(a in pose(), b in pose(), rho in 0.5..2.0f64) {
        let closed = dubins::min_cost(a, b, rho);
        let swept = dubins_sweep(a, b, rho);
        prop_assert!((closed - swept).abs() < 1e-4, "{} vs {}", closed, swept);
    }

    #[test]
    fn dubins_triangle(a in pose(), b in pose(), c in pose()) {
        let s = SteeringSpec::dubins(1.0);
        prop_assert!(cost(&s, a, c) <= cost(&s, a, b) + cost(&s, b, c) + 1e-9);
    }

    #[test]
    fn holonomic_triangle_and_symmetry(a in point(), b in point(), c in point()) {
        let s = SteeringSpec::holonomic_2d();
        prop_assert!(cost(&s, a, c) <= cost(&s, a, b) + cost(&s, b, c) + 1e-9);
        prop_assert_eq!(cost(&s, a, b), cost(&s, b, a));
        prop_assert!((cost(&s, a, b) - a.distance(&b)).abs() < 1e-12);
    }

    #[test]
    fn dubins_cost_is_rigid_motion_invariant(
        a in pose(),
        b in pose(),
        dx in -10.0..10.0f64,
        dy in -10.0..10.0f64,
        rot in 0.0..TAU,
    ) {
        let move_pose = |s: State| {
            let [x, y] = s.xy();
            let (sn, cs) = rot.sin_cos();
            State::se2(cs * x - sn * y + dx, sn * x + cs * y + dy, s.heading().unwrap() + rot)
        };
        let before = dubins::min_cost(a, b, 1.0);
        let after = dubins::min_cost(move_pose(a), move_pose(b), 1.0);
        prop_assert!((before - after).abs() < 1e-6, "{} vs {}", before, after);
    }

    #[test]
    fn dubins_cost_bounds(a in pose(), b in pose()) {
        let c = dubins::min_cost(a, b, 1.0);
        let d = a.distance(&b);
        prop_assert!(c >= d - 1e-9);
        // at most a turn to face the goal, the straight run, and a turn to the final heading plus detours
        prop_assert!(c <= d + 4.0 * PI + 4.0 + 1e-9);
    }

    #[test]
    fn free_set_is_sorted_and_shares_endpoints(a in pose(), b in pose()) {
        let set = SteeringSpec::dubins(1.0).steer_free(a, b);
        prop_assert!(!set.is_empty());
        for w in set.members().windows(2) {
            prop_assert!(w[0].cost() <= w[1].cost());
        }
        for t in set.members() {
            prop_assert!(t.start().approx_eq(&a, 1e-9));
            prop_assert!(t.end().approx_eq(&b, 1e-6));
        }
    }
}
