mod common;

use largeorder::potential::PotentialSpec;
use largeorder::saddle::{
    density_pairs, density_rate, density_rate_dominant, fixed_x_rate, predicted_log_psi, rate_a, scaled_moment_rate,
};
use largeorder::trajectory::{Trajectories, TrajectoryBranch};
use largeorder::{Error, Side};
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

const DIRECT: TrajectoryBranch = TrajectoryBranch { side: Side::Plus, turns: 0 };
const RETURN: TrajectoryBranch = TrajectoryBranch { side: Side::Plus, turns: 1 };

#[test]
fn quartic_fixed_x_rate_is_ln3() {
    let t = Trajectories::new(PotentialSpec::monomial(4, -1).unwrap()).unwrap();
    for side in Side::both() {
        let r = fixed_x_rate(&t, side).unwrap();
        assert!((r - 3.0f64.ln()).abs() < 1e-11);
    }
}

#[test]
fn fixed_x_needs_a_bounce() {
    assert!(matches!(fixed_x_rate(cubic(), Side::Minus), Err(Error::NoTurningPoint(Side::Minus))));
}

#[test]
fn direct_branch_large_xi0_expansion() {
    // A - xi0^2/2 + 3 ln xi0 settles to a constant as xi0 grows
    let t = cubic();
    let g = |x: f64| {
        let a = rate_a(t, &f(x), DIRECT).unwrap().a.to_f64();
        a - x * x / 2.0 + 3.0 * x.ln()
    };
    let (g1, g2, g3) = (g(10.0), g(20.0), g(40.0));
    assert!((g3 - g2).abs() < (g2 - g1).abs());
    assert!((g3 - g2).abs() < 0.05);
}

#[test]
fn wavefunction_prediction_approaches_fixed_x_form() {
    // the ln(k/2) - 2A step tends to ln(k/2) - ln S0 as xi0 -> 0
    let t = cubic();
    let s0 = t.bounce_action(Side::Plus).unwrap();
    let xi0 = f(1e-3);
    let step = predicted_log_psi(t, 12, &xi0, RETURN).unwrap() - predicted_log_psi(t, 10, &xi0, RETURN).unwrap();
    let expected = f(5.0).ln() - s0.ln();
    assert!((step - expected).abs() < 1e-5);
    assert!(matches!(predicted_log_psi(t, 0, &xi0, RETURN), Err(Error::Usage(_))));
}

#[test]
fn density_at_zero_collapses_to_the_wavefunction() {
    let t = cubic();
    let rho = density_rate_dominant(t, &f(0.5), &f(0.0)).unwrap();
    let psi = rate_a(t, &f(0.5), RETURN).unwrap();
    assert!(Float::with_val(PREC, &rho.a_rho - &psi.a).abs() < 1e-10);
    assert_eq!(rho.branches, (RETURN, DIRECT));
}

#[test]
fn density_pairs_respect_sides() {
    let t = cubic();
    assert_eq!(density_pairs(t, &f(0.5), &f(0.2)).len(), 4);
    // the negative side has no turning point, so only the direct leg exists there
    assert_eq!(density_pairs(t, &f(-0.5), &f(0.2)).len(), 2);
    assert!(density_rate(t, &f(-0.5), &f(0.5), (RETURN, RETURN)).is_err());
}

#[test]
fn density_legendre_composition() {
    // A_rho(xi1, xi2) = min over theta of the two single-trajectory rates
    // rescaled to the share theta of lambda, plus the mixing entropy
    let t = cubic();
    let xi1 = 0.5;
    let xi2 = 0.3;
    let s = density_rate(t, &f(xi1), &f(xi2), (DIRECT, RETURN)).unwrap();
    let a1 = |x: f64| rate_a(t, &f(x), DIRECT).map(|r| r.a.to_f64());
    let a2 = |x: f64| rate_a(t, &f(x), RETURN).map(|r| r.a.to_f64());
    let composed = |theta: f64| -> Option<f64> {
        let u = a1(xi1 / theta.sqrt()).ok()?;
        let v = a2(xi2 / (1.0 - theta).sqrt()).ok()?;
        let mix = theta * theta.ln() + (1.0 - theta) * (1.0 - theta).ln();
        Some(theta * u + (1.0 - theta) * v - mix / 2.0)
    };
    // the shared-lambda solution fixes theta = S-share of lambda
    let q1 = s.q1.to_f64();
    let lambda1 = t.lambda_of_end(&f(q1), DIRECT).unwrap().to_f64();
    let theta = lambda1 / s.lambda.to_f64();
    let value = composed(theta).unwrap();
    assert!((value - s.a_rho.to_f64()).abs() < 1e-9, "{value} vs {}", s.a_rho);
    for d in [-0.02, 0.02] {
        if let Some(v) = composed(theta + d) {
            assert!(v >= value - 1e-12);
        }
    }
}

#[test]
fn moment_rate_is_a_maximum() {
    let t = cubic();
    let (r0, _) = scaled_moment_rate(t, &f(0.0), &[]).unwrap();
    let s0 = t.bounce_action(Side::Plus).unwrap();
    assert!(Float::with_val(PREC, &r0 + s0.ln() / 2u32).abs() < 1e-9);
    let alpha = f(0.1);
    let (r1, x1) = scaled_moment_rate(t, &alpha, &[]).unwrap();
    assert!(x1.clone().abs() > 0.1);
    for x in [0.3, 0.7, 1.0, 1.5] {
        let xi = f(x);
        let rho = density_rate_dominant(t, &xi, &xi).unwrap();
        let v = Float::with_val(PREC, xi.abs_ref()).ln() * &alpha * 2u32 - rho.a_rho;
        assert!(r1 >= Float::with_val(PREC, &v - 1e-12), "x={x}");
    }
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    common::log_log_slope(xs, ys)
}

#[test]
fn small_xi0_limit() {
    // A -> ln(S0)/2 - xi0^2/2 on the return branch
    let t = cubic();
    let s0 = t.bounce_action(Side::Plus).unwrap().to_f64();
    let xs = [0.2, 0.1, 0.05];
    let dev: Vec<f64> = xs
        .iter()
        .map(|&x| {
            let a = rate_a(t, &f(x), RETURN).unwrap().a.to_f64();
            (a - (s0.ln() / 2.0 - x * x / 2.0)).abs()
        })
        .collect();
    assert!(slope(&xs, &dev) >= 2.5, "{dev:?}");
}

#[test]
fn return_lambda_approaches_twice_the_bounce() {
    let t = cubic();
    let s0 = t.bounce_action(Side::Plus).unwrap();
    let qs = [0.1, 0.01, 0.001];
    let dev: Vec<f64> = qs
        .iter()
        .map(|&q| {
            let l = t.lambda_of_end(&f(q), RETURN).unwrap();
            Float::with_val(PREC, l - Float::with_val(PREC, &s0 * 2u32)).abs().to_f64()
        })
        .collect();
    assert!(slope(&qs, &dev) >= 2.5, "{dev:?}");
}

fn check_gradient(branch: TrajectoryBranch, lo: f64, hi: f64) {
    let t = cubic();
    let a = |x: f64| rate_a(t, &f(x), branch).unwrap().a.to_f64();
    for i in 0..10 {
        let x = lo + (hi - lo) * i as f64 / 9.0;
        let pi0 = rate_a(t, &f(x), branch).unwrap().saddle.pi0.to_f64();
        let h = 1e-4;
        let d1 = (a(x + h) - a(x - h)) / (2.0 * h);
        let d2 = (a(x + h / 2.0) - a(x - h / 2.0)) / h;
        // Richardson on the two central differences
        let d = (4.0 * d2 - d1) / 3.0;
        assert!((d - pi0).abs() <= 1e-6 * pi0.abs().max(1.0), "{branch} xi0={x}: {d} vs {pi0}");
    }
}

#[test]
fn rate_gradient_is_the_endpoint_momentum_return() {
    check_gradient(RETURN, 0.1, 1.1);
}

#[test]
fn rate_gradient_is_the_endpoint_momentum_direct() {
    check_gradient(DIRECT, 1.6, 6.0);
}

#[test]
fn branches_meet_continuously() {
    let t = cubic();
    let turn = t.turning_point(Side::Plus).unwrap();
    let meet = t.xi0_of_end(&turn, RETURN).unwrap();
    let a = rate_a(t, &meet, RETURN).unwrap().a;
    let b = rate_a(t, &meet, DIRECT).unwrap().a;
    assert!(Float::with_val(PREC, &a - &b).abs() < 1e-9);
}

#[test]
fn density_is_symmetric() {
    let t = cubic();
    let a = density_rate_dominant(t, &f(0.5), &f(0.3)).unwrap();
    let b = density_rate_dominant(t, &f(0.3), &f(0.5)).unwrap();
    assert!(Float::with_val(PREC, &a.a_rho - &b.a_rho).abs() < 1e-20);
    assert_eq!(a.branches, (b.branches.1, b.branches.0));
}

#[test]
fn density_at_the_origin_uses_twice_the_bounce() {
    let t = cubic();
    let s0 = t.bounce_action(Side::Plus).unwrap();
    let rho = density_rate_dominant(t, &f(0.0), &f(0.0)).unwrap();
    assert!(Float::with_val(PREC, &rho.lambda - Float::with_val(PREC, &s0 * 2u32)).abs() < 1e-9);
}
