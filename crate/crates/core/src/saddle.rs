//! Predicted exponential rates of large-order coefficients.
//!
//! For an endpoint with action `S` and saddle value `lambda`,
//! `A = S/lambda + (ln(lambda/2) - 1)/2` and
//! `Psi_k(xi0 sqrt(k)) ~ Gamma(k/2) exp(-k A(xi0))`. Prefactors are set to 1.

use rayon::prelude::*;
use rug::float::Special;
use rug::Float;

use crate::error::{Error, Result, Side};
use crate::numeric::{fmt_decimal, golden_max, ln_gamma, refine_root};
use crate::trajectory::{SaddleData, Trajectories, TrajectoryBranch};

#[derive(Debug, Clone)]
pub struct RatePrediction {
    pub xi0: Float,
    pub branch: TrajectoryBranch,
    pub a: Float,
    pub saddle: SaddleData,
}

/// `S/lambda + (ln(lambda/2) - 1)/2`.
pub fn rate_from(action: &Float, lambda: &Float) -> Float {
    let prec = action.prec().max(lambda.prec());
    let log_term = Float::with_val(prec, lambda / 2u32).ln() - 1u32;
    Float::with_val(prec, action / lambda) + log_term / 2u32
}

pub fn rate_of(saddle: &SaddleData) -> Float {
    rate_from(&saddle.action, &saddle.lambda)
}

/// `A(xi0)` on `branch`, from the root with the smallest rate.
pub fn rate_a(traj: &Trajectories, xi0: &Float, branch: TrajectoryBranch) -> Result<RatePrediction> {
    let roots = traj.end_of_xi0(xi0, branch)?;
    let (a, saddle) = roots
        .into_iter()
        .map(|s| (rate_of(&s), s))
        .reduce(|best, next| if next.0 < best.0 { next } else { best })
        .expect("end_of_xi0 returns at least one root");
    Ok(RatePrediction {
        xi0: xi0.clone(),
        branch,
        a,
        saddle,
    })
}

/// `ln Gamma(k/2) - k A(xi0)`.
pub fn predicted_log_psi(traj: &Trajectories, k: usize, xi0: &Float, branch: TrajectoryBranch) -> Result<Float> {
    if k == 0 {
        return Err(Error::Usage("the prediction needs k >= 1".into()));
    }
    let rate = rate_a(traj, xi0, branch)?;
    let prec = traj.prec();
    let half_k = Float::with_val(prec, k) / 2u32;
    Ok(ln_gamma(&half_k) - rate.a * k as u32)
}

/// `-ln S_0`: the two-step log-ratio offset at fixed `x`.
pub fn fixed_x_rate(traj: &Trajectories, side: Side) -> Result<Float> {
    Ok(-traj.bounce_action(side)?.ln())
}

#[derive(Debug, Clone)]
pub struct DensitySaddle {
    pub xi1: Float,
    pub xi2: Float,
    pub branches: (TrajectoryBranch, TrajectoryBranch),
    pub lambda: Float,
    pub q1: Float,
    pub q2: Float,
    pub action: Float,
    pub a_rho: Float,
}

/// One leg of a density saddle at shared `lambda`: `(S, I)` with `I` the
/// half-lambda integral, or `None` when the endpoint is out of reach.
fn leg(traj: &Trajectories, xi: &Float, lambda: &Float, branch: TrajectoryBranch) -> Option<(Float, Float)> {
    let prec = traj.prec();
    let q = Float::with_val(prec, lambda.sqrt_ref()) * xi;
    let (s, l) = traj.action_lambda_of_end(&q, branch).ok()?;
    Some((s, l / 2u32))
}

/// Upper bound on `lambda` keeping `xi sqrt(lambda)` within the branch's reach.
fn lambda_cap(traj: &Trajectories, xi: &Float, branch: TrajectoryBranch) -> Option<Float> {
    if xi.is_zero() {
        return None;
    }
    let prec = traj.prec();
    let extent = traj
        .turning_point(branch.side)
        .map(|t| t.abs())
        .unwrap_or_else(|| Float::with_val(prec, traj.open_side_extent()));
    Some((extent / xi).square())
}

fn leg_feasible(traj: &Trajectories, xi: &Float, branch: TrajectoryBranch) -> bool {
    if branch.is_return() && traj.turning_point(branch.side).is_none() {
        return false;
    }
    xi.is_zero() || xi.is_sign_negative() == (branch.side == Side::Minus)
}

const DENSITY_GRID: usize = 32;

/// Shared-`lambda` saddle for `rho_k(xi1 sqrt(k), xi2 sqrt(k))` on a fixed
/// pair of branches: the root of `F(lambda) = 2 (I_1 + I_2) - lambda` with the
/// smallest `A_rho = (S_1 + S_2)/lambda + (ln(lambda/2) - 1)/2`.
pub fn density_rate(
    traj: &Trajectories,
    xi1: &Float,
    xi2: &Float,
    branches: (TrajectoryBranch, TrajectoryBranch),
) -> Result<DensitySaddle> {
    let prec = traj.prec();
    let no_saddle = || Error::NoDensitySaddle {
        xi1: fmt_decimal(xi1, 12),
        xi2: fmt_decimal(xi2, 12),
    };
    if !leg_feasible(traj, xi1, branches.0) || !leg_feasible(traj, xi2, branches.1) {
        return Err(no_saddle());
    }
    let s0 = traj
        .dominant_bounce()
        .map(|(_, s)| s)
        .unwrap_or_else(|_| Float::with_val(prec, 1));
    let cap = [lambda_cap(traj, xi1, branches.0), lambda_cap(traj, xi2, branches.1)]
        .into_iter()
        .flatten()
        .reduce(|a, b| if b < a { b } else { a });

    let f = |lambda: &Float| -> Option<Float> {
        let (_, i1) = leg(traj, xi1, lambda, branches.0)?;
        let (_, i2) = leg(traj, xi2, lambda, branches.1)?;
        Some((i1 + i2) * 2u32 - lambda)
    };

    let mut lambda_max = Float::with_val(prec, &s0 * 10u32);
    let ceiling = Float::with_val(prec, &s0 * 1000u32);
    loop {
        let capped = cap.as_ref().is_some_and(|c| *c <= lambda_max);
        let hi = match cap.as_ref() {
            Some(c) if capped => c.clone(),
            _ => lambda_max.clone(),
        };
        let grid = lambda_grid(&hi);
        let values: Vec<Option<Float>> = grid.par_iter().map(&f).collect();
        let mut best: Option<DensitySaddle> = None;
        for i in 0..grid.len() - 1 {
            let (Some(f0), Some(f1)) = (&values[i], &values[i + 1]) else {
                continue;
            };
            let root = if f0.is_zero() {
                grid[i].clone()
            } else if f1.is_zero() || f0.is_sign_negative() == f1.is_sign_negative() {
                continue;
            } else {
                refine_root(
                    |l: &Float| f(l).unwrap_or_else(|| Float::with_val(prec, Special::Nan)),
                    grid[i].clone(),
                    grid[i + 1].clone(),
                    traj.settings().root_tol,
                    400,
                )
            };
            if let Some(s) = assemble(traj, xi1, xi2, branches, &root) {
                if best.as_ref().is_none_or(|b| s.a_rho < b.a_rho) {
                    best = Some(s);
                }
            }
        }
        if let Some(s) = best {
            return Ok(s);
        }
        if capped || lambda_max >= ceiling {
            return Err(no_saddle());
        }
        lambda_max *= 2u32;
    }
}

fn lambda_grid(hi: &Float) -> Vec<Float> {
    let prec = hi.prec();
    let half = DENSITY_GRID / 2;
    let mut grid: Vec<Float> = Vec::with_capacity(DENSITY_GRID + 1);
    // geometric near zero, linear across the bulk
    for i in 0..half {
        let e = -8.0 * (1.0 - i as f64 / half as f64);
        grid.push(Float::with_val(prec, hi * 10f64.powf(e)));
    }
    for i in 1..=half {
        grid.push(Float::with_val(prec, hi * i as u32) / half as u32);
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();
    grid
}

fn assemble(
    traj: &Trajectories,
    xi1: &Float,
    xi2: &Float,
    branches: (TrajectoryBranch, TrajectoryBranch),
    lambda: &Float,
) -> Option<DensitySaddle> {
    let prec = traj.prec();
    if *lambda <= 0 {
        return None;
    }
    let (s1, _) = leg(traj, xi1, lambda, branches.0)?;
    let (s2, _) = leg(traj, xi2, lambda, branches.1)?;
    let root = Float::with_val(prec, lambda.sqrt_ref());
    let action = Float::with_val(prec, &s1 + &s2);
    Some(DensitySaddle {
        xi1: xi1.clone(),
        xi2: xi2.clone(),
        branches,
        lambda: lambda.clone(),
        q1: Float::with_val(prec, xi1 * &root),
        q2: Float::with_val(prec, xi2 * &root),
        a_rho: rate_from(&action, lambda),
        action,
    })
}

/// Branches a density leg ending at `xi sqrt(lambda)` may follow. At `xi = 0`
/// the direct leg is the trivial trajectory and the return leg is a full loop.
fn leg_options(traj: &Trajectories, xi: &Float) -> Vec<TrajectoryBranch> {
    let sides: Vec<Side> = if xi.is_zero() {
        Side::both().to_vec()
    } else if xi.is_sign_negative() {
        vec![Side::Minus]
    } else {
        vec![Side::Plus]
    };
    let mut out = Vec::new();
    if !xi.is_zero() || sides.contains(&Side::Plus) {
        out.push(TrajectoryBranch::direct(sides[0]));
    }
    for side in sides {
        if traj.turning_point(side).is_some() {
            out.push(TrajectoryBranch::returning(side));
        }
    }
    out
}

/// All branch pairs available at `(xi1, xi2)`, in a fixed order.
pub fn density_pairs(traj: &Trajectories, xi1: &Float, xi2: &Float) -> Vec<(TrajectoryBranch, TrajectoryBranch)> {
    let mut pairs = Vec::new();
    for b1 in leg_options(traj, xi1) {
        for b2 in leg_options(traj, xi2) {
            pairs.push((b1, b2));
        }
    }
    pairs
}

/// The dominant (smallest `A_rho`) density saddle over `pairs`, or over all
/// available branch pairs when `pairs` is empty.
pub fn density_rate_over(
    traj: &Trajectories,
    xi1: &Float,
    xi2: &Float,
    pairs: &[(TrajectoryBranch, TrajectoryBranch)],
) -> Result<DensitySaddle> {
    let owned;
    let pairs = if pairs.is_empty() {
        owned = density_pairs(traj, xi1, xi2);
        &owned[..]
    } else {
        pairs
    };
    let mut best: Option<DensitySaddle> = None;
    for &pair in pairs {
        if let Ok(s) = density_rate(traj, xi1, xi2, pair) {
            if best.as_ref().is_none_or(|b| s.a_rho < b.a_rho) {
                best = Some(s);
            }
        }
    }
    best.ok_or_else(|| Error::NoDensitySaddle {
        xi1: fmt_decimal(xi1, 12),
        xi2: fmt_decimal(xi2, 12),
    })
}

pub fn density_rate_dominant(traj: &Trajectories, xi1: &Float, xi2: &Float) -> Result<DensitySaddle> {
    density_rate_over(traj, xi1, xi2, &[])
}

const MOMENT_GRID: usize = 24;

/// `sup_xi [2 alpha ln|xi| - A_rho(xi, xi)]` and its maximizer, over the
/// given branch pairs (all available pairs when empty).
pub fn scaled_moment_rate(
    traj: &Trajectories,
    alpha: &Float,
    pairs: &[(TrajectoryBranch, TrajectoryBranch)],
) -> Result<(Float, Float)> {
    let prec = traj.prec();
    if alpha.is_sign_negative() && !alpha.is_zero() {
        return Err(Error::Usage("alpha must be non-negative".into()));
    }
    let objective = |xi: &Float| -> Option<Float> {
        if xi.is_zero() && !alpha.is_zero() {
            return None;
        }
        let s = density_rate_over(traj, xi, xi, pairs).ok()?;
        let log_term = if alpha.is_zero() {
            Float::new(prec)
        } else {
            Float::with_val(prec, xi.abs_ref()).ln() * alpha * 2u32
        };
        Some(log_term - s.a_rho)
    };

    let mut grid: Vec<Float> = Vec::new();
    for i in 0..MOMENT_GRID {
        let e = -3.0 + 4.0 * i as f64 / (MOMENT_GRID - 1) as f64;
        grid.push(Float::with_val(prec, 10f64.powf(e)));
    }
    let negatives: Vec<Float> = grid.iter().rev().map(|x| Float::with_val(prec, -x)).collect();
    let mut xs = negatives;
    xs.push(Float::new(prec));
    xs.extend(grid);

    let values: Vec<Option<Float>> = xs.par_iter().map(&objective).collect();
    let best = values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.as_ref().map(|v| (i, v)))
        .fold(None::<(usize, &Float)>, |acc, (i, v)| match acc {
            Some((_, bv)) if *bv >= *v => acc,
            _ => Some((i, v)),
        });
    let Some((i, value)) = best else {
        return Err(Error::EmptyFeasibleSet);
    };
    let (mut x_best, mut v_best) = (xs[i].clone(), value.clone());
    // refine inside the neighbouring cells when they stay feasible and on one side
    if i > 0 && i + 1 < xs.len() && values[i - 1].is_some() && values[i + 1].is_some() {
        let (lo, hi) = (&xs[i - 1], &xs[i + 1]);
        if !xs[i].is_zero() && lo.is_sign_negative() == hi.is_sign_negative() {
            let (x, v) = golden_max(|x| objective(x), lo, hi, 1e-8, 200);
            if v > v_best {
                x_best = x;
                v_best = v;
            }
        }
    }
    Ok((v_best, x_best))
}

/// One row of the rate map; `None` marks an unavailable branch.
#[derive(Debug, Clone)]
pub struct RateMapRow {
    pub xi0: Float,
    pub branch: TrajectoryBranch,
    pub rate: Option<RatePrediction>,
}

pub fn rate_map(traj: &Trajectories, xi0s: &[Float], branch: TrajectoryBranch) -> Vec<RateMapRow> {
    xi0s.par_iter()
        .map(|xi0| RateMapRow {
            xi0: xi0.clone(),
            branch,
            rate: rate_a(traj, xi0, branch).ok(),
        })
        .collect()
}

/// CSV with header `xi0,branch,A,lambda,S,pi0`; unavailable rows carry `NA`.
pub fn rate_map_csv(rows: &[RateMapRow], digits: usize) -> String {
    let mut out = String::from("xi0,branch,A,lambda,S,pi0\n");
    for row in rows {
        let xi0 = fmt_decimal(&row.xi0, digits);
        match &row.rate {
            Some(r) => out.push_str(&format!(
                "{xi0},{},{},{},{},{}\n",
                row.branch,
                fmt_decimal(&r.a, digits),
                fmt_decimal(&r.saddle.lambda, digits),
                fmt_decimal(&r.saddle.action, digits),
                fmt_decimal(&r.saddle.pi0, digits),
            )),
            None => out.push_str(&format!("{xi0},{},NA,NA,NA,NA\n", row.branch)),
        }
    }
    out
}
