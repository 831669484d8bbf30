mod common;

use largeorder::potential::PotentialSpec;
use largeorder::trajectory::{Trajectories, TrajectoryBranch};
use largeorder::{Error, Side};
use proptest::prelude::*;
use rug::Float;
use std::sync::OnceLock;

const PREC: u32 = 256;

fn f(x: f64) -> Float {
    Float::with_val(PREC, x)
}

fn cubic() -> &'static Trajectories {
    static T: OnceLock<Trajectories> = OnceLock::new();
    T.get_or_init(|| Trajectories::new(PotentialSpec::monomial(3, -1).unwrap()).unwrap())
}

fn quartic() -> &'static Trajectories {
    static T: OnceLock<Trajectories> = OnceLock::new();
    T.get_or_init(|| Trajectories::new(PotentialSpec::monomial(4, -1).unwrap()).unwrap())
}

const DIRECT: TrajectoryBranch = TrajectoryBranch { side: Side::Plus, turns: 0 };
const RETURN: TrajectoryBranch = TrajectoryBranch { side: Side::Plus, turns: 1 };

#[test]
fn quartic_bounce_is_symmetric() {
    let t = quartic();
    let plus = t.bounce_action(Side::Plus).unwrap();
    let minus = t.bounce_action(Side::Minus).unwrap();
    assert!((plus.clone() - 1.0f64 / 3.0).abs() < 1e-12);
    assert!(Float::with_val(PREC, &plus - &minus).abs() < 1e-40);
    let turn = t.turning_point(Side::Minus).unwrap();
    assert!((turn + f(0.5).sqrt()).abs() < 1e-60);
}

#[test]
fn endpoint_limits() {
    let t = cubic();
    let s0 = t.bounce_action(Side::Plus).unwrap();
    let origin = f(0.0);
    assert_eq!(t.action_to_end(&origin, DIRECT).unwrap(), 0);
    let full = t.action_to_end(&origin, RETURN).unwrap();
    assert!(Float::with_val(PREC, &full - &s0).abs() < 1e-40);
    let lambda = t.lambda_of_end(&origin, RETURN).unwrap();
    assert!((lambda - 4.0f64 / 15.0).abs() < 1e-12);
    assert_eq!(t.xi0_of_end(&origin, RETURN).unwrap(), 0);
}

#[test]
fn half_loop_is_shared_by_both_branches() {
    let t = cubic();
    let turn = t.turning_point(Side::Plus).unwrap();
    let s0 = t.bounce_action(Side::Plus).unwrap();
    for b in [DIRECT, RETURN] {
        let s = t.action_to_end(&turn, b).unwrap();
        assert!(Float::with_val(PREC, s - Float::with_val(PREC, &s0 / 2u32)).abs() < 1e-40);
        assert_eq!(t.momentum_pi0(&turn, b).unwrap(), 0);
    }
}

#[test]
fn large_xi0_on_direct_branch() {
    let t = cubic();
    for q in [1e-3, 1e-4] {
        let xi0 = t.xi0_of_end(&f(q), DIRECT).unwrap().to_f64();
        let approx = (3.0 / q).sqrt();
        assert!((xi0 / approx - 1.0).abs() < 0.01, "q={q}: {xi0} vs {approx}");
    }
}

#[test]
fn momentum_signs() {
    let t = cubic();
    let q = f(0.25);
    let out = t.momentum_pi0(&q, DIRECT).unwrap();
    let back = t.momentum_pi0(&q, RETURN).unwrap();
    assert!(out > 0);
    assert!(back < 0);
    // same speed, different lambda
    let ratio = Float::with_val(PREC, &out / &back).to_f64();
    let lambdas = t.lambda_of_end(&q, RETURN).unwrap() / t.lambda_of_end(&q, DIRECT).unwrap();
    assert!((ratio * ratio - lambdas.to_f64()).abs() < 1e-12);
}

#[test]
fn return_branch_reaches_the_origin() {
    let t = cubic();
    let roots = t.end_of_xi0(&f(0.0), RETURN).unwrap();
    assert_eq!(roots.len(), 1);
    assert_eq!(roots[0].q_end, 0);
    assert!((roots[0].lambda.clone() - 4.0f64 / 15.0).abs() < 1e-12);
    assert!(matches!(t.end_of_xi0(&f(0.0), DIRECT), Err(Error::NoTrajectory { .. })));
}

#[test]
fn xi0_beyond_the_branch_has_no_trajectory() {
    let t = cubic();
    assert!(matches!(t.end_of_xi0(&f(2.0), RETURN), Err(Error::NoTrajectory { .. })));
    assert!(matches!(t.end_of_xi0(&f(0.5), DIRECT), Err(Error::NoTrajectory { .. })));
}

#[test]
fn profile_satisfies_equation_of_motion() {
    // Q'' = V'(Q) along the truncated loop, checked by second differences
    let t = cubic();
    let spec = t.spec().clone();
    let pts = t.tau_profile(&f(0.3), RETURN, &f(1e-3), 161).unwrap();
    let h = Float::with_val(PREC, &pts[1].tau - &pts[0].tau).to_f64();
    let mut worst: f64 = 0.0;
    for w in pts.windows(3) {
        let second = Float::with_val(PREC, &w[0].q + &w[2].q) - Float::with_val(PREC, &w[1].q * 2u32);
        let accel = second.to_f64() / (h * h);
        let force = spec.eval_dv(&w[1].q).to_f64();
        worst = worst.max((accel - force).abs());
    }
    // O(h^2) with |Q''''| of order one
    assert!(worst < h * h, "worst {worst}, h {h}");
}

#[test]
fn profile_xi0_runs_from_large_to_small() {
    let t = cubic();
    let pts = t.tau_profile(&f(0.0), RETURN, &f(1e-6), 40).unwrap();
    let first = pts.first().unwrap().xi0.clone().unwrap().to_f64();
    let last = pts.last().unwrap().xi0.clone().unwrap().to_f64();
    assert!(first > 100.0, "{first}");
    assert!(last < 1e-2, "{last}");
}

#[test]
fn direct_profile_covers_half_the_loop() {
    let t = cubic();
    let turn = t.turning_point(Side::Plus).unwrap();
    let pts = t.tau_profile(&turn, DIRECT, &f(1e-6), 20).unwrap();
    let start = pts[0].tau.to_f64();
    assert!(start.is_finite() && start < 0.0);
    assert_eq!(pts.last().unwrap().q, turn);
}

#[test]
fn quartic_negative_side_mirrors_positive() {
    let t = quartic();
    let plus = TrajectoryBranch::returning(Side::Plus);
    let minus = TrajectoryBranch::returning(Side::Minus);
    let a = t.xi0_of_end(&f(0.3), plus).unwrap();
    let b = t.xi0_of_end(&f(-0.3), minus).unwrap();
    assert!(Float::with_val(PREC, &a + &b).abs() < 1e-40);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn inversion_round_trips(q in 0.01f64..0.49, back in any::<bool>()) {
        let t = cubic();
        let b = if back { RETURN } else { DIRECT };
        let xi0 = t.xi0_of_end(&f(q), b).unwrap();
        let roots = t.end_of_xi0(&xi0, b).unwrap();
        prop_assert!(roots.iter().any(|r| (r.q_end.clone() - q).abs() < 1e-10));
    }

    #[test]
    fn lambda_is_the_action_identity(q in 0.01f64..0.49, back in any::<bool>()) {
        // lambda = 2 S - Q P with P the endpoint momentum
        let t = cubic();
        let b = if back { RETURN } else { DIRECT };
        let s = t.saddle_at(&f(q), b).unwrap();
        let p = Float::with_val(PREC, &s.pi0 * Float::with_val(PREC, s.lambda.sqrt_ref()));
        let rhs = Float::with_val(PREC, &s.action * 2u32) - p * &s.q_end;
        prop_assert!(Float::with_val(PREC, &s.lambda - rhs).abs() < 1e-12);
    }
}
