//! Zero-energy Euclidean trajectories that leave the origin at `tau = -inf`.
//!
//! Along such a path `Qdot^2 = 2V(Q)`, so every classical quantity reduces to
//! an integral over `u = |Q|` on one side of the origin:
//!
//! - action `S = int sqrt(2V) du`,
//! - `lambda/2 = int (V - Q V'/2) / sqrt(2V) du`,
//! - elapsed time `int du / sqrt(2V)`.
//!
//! The direct leg runs `0 -> u`; the return leg runs `0 -> Q_t -> u`.

use std::fmt;
use std::sync::OnceLock;

use rayon::prelude::*;
use rug::Float;

use crate::error::{Error, Result, Side};
use crate::numeric::{fmt_decimal, refine_root};
use crate::potential::{PotentialSpec, TurningPointScan};
use crate::quad::TanhSinh;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TrajectoryBranch {
    pub side: Side,
    /// 0 before the bounce, 1 after it.
    pub turns: u8,
}

impl TrajectoryBranch {
    pub fn direct(side: Side) -> Self {
        TrajectoryBranch { side, turns: 0 }
    }

    pub fn returning(side: Side) -> Self {
        TrajectoryBranch { side, turns: 1 }
    }

    pub fn is_return(self) -> bool {
        self.turns == 1
    }

    pub fn name(self) -> &'static str {
        if self.is_return() {
            "return"
        } else {
            "direct"
        }
    }

    /// The four branches, in a fixed order.
    pub fn all() -> [TrajectoryBranch; 4] {
        [
            Self::direct(Side::Plus),
            Self::returning(Side::Plus),
            Self::direct(Side::Minus),
            Self::returning(Side::Minus),
        ]
    }

    fn index(self) -> usize {
        let s = if self.side == Side::Plus { 0 } else { 2 };
        s + self.turns as usize
    }
}

impl fmt::Display for TrajectoryBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.name(), self.side)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TrajectorySettings {
    pub prec: u32,
    pub quad_tol: f64,
    /// Relative tolerance in `Q` for inverted maps.
    pub root_tol: f64,
    /// Points of the `Q` grid scanned for brackets when inverting `xi0(Q)`.
    pub scan_points: usize,
    pub turning_scan: TurningPointScan,
}

impl Default for TrajectorySettings {
    fn default() -> Self {
        TrajectorySettings {
            prec: 256,
            quad_tol: 1e-12,
            root_tol: 1e-12,
            scan_points: 96,
            turning_scan: TurningPointScan::default(),
        }
    }
}

/// Classical data of the trajectory ending at `q_end`.
#[derive(Debug, Clone)]
pub struct SaddleData {
    pub q_end: Float,
    pub branch: TrajectoryBranch,
    pub action: Float,
    pub lambda: Float,
    pub xi0: Float,
    pub pi0: Float,
}

#[derive(Debug, Clone)]
pub struct ProfilePoint {
    pub tau: Float,
    pub q: Float,
    /// `None` where `lambda <= 0`.
    pub xi0: Option<Float>,
}

pub const DEFAULT_PROFILE_EPS: f64 = 1e-6;

/// Integrals over the full half-loop `0 -> |Q_t|`.
#[derive(Debug, Clone)]
struct HalfLoop {
    turn: Float,
    action: Float,
    lambda: Float,
}

#[derive(Debug)]
struct SideData {
    /// Coefficients of `V(s u)` and of `V - Q V'/2` at `Q = s u`, in powers of `u`.
    v: Vec<Float>,
    virial: Vec<Float>,
    half: Option<HalfLoop>,
}

#[derive(Debug, Clone)]
struct GridPoint {
    u: Float,
    xi0: Option<Float>,
}

/// Trajectory calculator for one potential. Per-side turning points and
/// half-loop integrals are computed once; inversion grids are cached lazily.
#[derive(Debug)]
pub struct Trajectories {
    spec: PotentialSpec,
    settings: TrajectorySettings,
    quad: TanhSinh,
    sides: [SideData; 2],
    grids: [OnceLock<Vec<GridPoint>>; 4],
}

fn horner(coeffs: &[Float], u: &Float, prec: u32) -> Float {
    let mut acc = Float::new(prec);
    for c in coeffs.iter().rev() {
        acc *= u;
        acc += c;
    }
    acc
}

impl Trajectories {
    pub fn new(spec: PotentialSpec) -> Result<Self> {
        Self::with_settings(spec, TrajectorySettings::default())
    }

    pub fn with_settings(spec: PotentialSpec, settings: TrajectorySettings) -> Result<Self> {
        let prec = settings.prec;
        let quad = TanhSinh::new(prec, settings.quad_tol);
        let v_poly = spec.polynomial();
        let virial_poly = spec.virial_polynomial();
        let side_coeffs = |p: &crate::poly::RationalPolynomial, side: Side| -> Vec<Float> {
            let p = if side == Side::Minus { p.reflect() } else { p.clone() };
            p.coefficients().iter().map(|c| Float::with_val(prec, c)).collect()
        };
        let mut sides = Vec::with_capacity(2);
        for side in Side::both() {
            sides.push(SideData {
                v: side_coeffs(&v_poly, side),
                virial: side_coeffs(&virial_poly, side),
                half: None,
            });
        }
        let sides: [SideData; 2] = sides.try_into().expect("two sides");
        let mut traj = Trajectories {
            spec,
            settings,
            quad,
            sides,
            grids: Default::default(),
        };
        for side in Side::both() {
            let turn = traj
                .spec
                .turning_point_with(side, prec, traj.settings.turning_scan)
                .map(|t| t.abs());
            if let Some(turn) = turn {
                let zero = Float::new(prec);
                let action = traj.quad.integrate(|u| traj.action_integrand(side, u), &zero, &turn)?;
                let lambda = traj.quad.integrate(|u| traj.lambda_integrand(side, u), &zero, &turn)?;
                traj.sides[side_index(side)].half = Some(HalfLoop { turn, action, lambda });
            }
        }
        Ok(traj)
    }

    pub fn spec(&self) -> &PotentialSpec {
        &self.spec
    }

    pub fn settings(&self) -> &TrajectorySettings {
        &self.settings
    }

    pub fn prec(&self) -> u32 {
        self.settings.prec
    }

    fn side(&self, side: Side) -> &SideData {
        &self.sides[side_index(side)]
    }

    fn half(&self, side: Side) -> Result<&HalfLoop> {
        self.side(side).half.as_ref().ok_or(Error::NoTurningPoint(side))
    }

    /// Signed turning point on `side`, if one exists.
    pub fn turning_point(&self, side: Side) -> Option<Float> {
        self.side(side)
            .half
            .as_ref()
            .map(|h| Float::with_val(self.prec(), &h.turn * side.sign()))
    }

    /// `S_0 = 2 int_0^{Q_t} sqrt(2V) dQ`, the action of the full loop.
    pub fn bounce_action(&self, side: Side) -> Result<Float> {
        Ok(Float::with_val(self.prec(), &self.half(side)?.action * 2u32))
    }

    /// Smallest bounce action over both sides.
    pub fn dominant_bounce(&self) -> Result<(Side, Float)> {
        let mut best: Option<(Side, Float)> = None;
        for side in Side::both() {
            if let Ok(s0) = self.bounce_action(side) {
                if best.as_ref().is_none_or(|(_, b)| s0 < *b) {
                    best = Some((side, s0));
                }
            }
        }
        best.ok_or(Error::NoTurningPoint(Side::Plus))
    }

    fn v_at(&self, side: Side, u: &Float) -> Float {
        horner(&self.side(side).v, u, self.prec())
    }

    fn action_integrand(&self, side: Side, u: &Float) -> Float {
        let v = self.v_at(side, u);
        if v <= 0 {
            return Float::new(self.prec());
        }
        (v * 2u32).sqrt()
    }

    fn lambda_integrand(&self, side: Side, u: &Float) -> Float {
        let v = self.v_at(side, u);
        if v <= 0 {
            return Float::new(self.prec());
        }
        horner(&self.side(side).virial, u, self.prec()) / (v * 2u32).sqrt()
    }

    /// `int_0^u` of the action and lambda integrands.
    fn partial(&self, side: Side, u: &Float) -> Result<(Float, Float)> {
        let prec = self.prec();
        let zero = Float::new(prec);
        if let Some(h) = self.side(side).half.as_ref() {
            // integrate from the nearer end to keep the near-singularity at Q_t out of play
            if *u > Float::with_val(prec, &h.turn / 2u32) {
                let a = self.quad.integrate(|x| self.action_integrand(side, x), u, &h.turn)?;
                let l = self.quad.integrate(|x| self.lambda_integrand(side, x), u, &h.turn)?;
                return Ok((
                    Float::with_val(prec, &h.action - a),
                    Float::with_val(prec, &h.lambda - l),
                ));
            }
        }
        let a = self.quad.integrate(|x| self.action_integrand(side, x), &zero, u)?;
        let l = self.quad.integrate(|x| self.lambda_integrand(side, x), &zero, u)?;
        Ok((a, l))
    }

    /// Check the endpoint against the branch; returns `u = |Q|`.
    fn endpoint(&self, q: &Float, branch: TrajectoryBranch) -> Result<Float> {
        let prec = self.prec();
        if !q.is_zero() && Side::of_sign(if q.is_sign_negative() { -1 } else { 1 }) != Some(branch.side) {
            return Err(Error::BranchUnavailable {
                branch,
                detail: format!("endpoint Q = {} lies on the other side", fmt_decimal(q, 12)),
            });
        }
        let u = Float::with_val(prec, q.abs_ref());
        let half = self.side(branch.side).half.as_ref();
        if branch.is_return() && half.is_none() {
            return Err(Error::NoTurningPoint(branch.side));
        }
        if let Some(h) = half {
            if u > h.turn {
                return Err(Error::BeyondTurningPoint {
                    q: fmt_decimal(q, 12),
                    turn: fmt_decimal(&h.turn, 12),
                });
            }
        }
        Ok(u)
    }

    /// Action and lambda along the branch, without requiring `lambda > 0`.
    fn action_lambda(&self, u: &Float, branch: TrajectoryBranch) -> Result<(Float, Float)> {
        let prec = self.prec();
        let (a, l) = if u.is_zero() {
            (Float::new(prec), Float::new(prec))
        } else {
            self.partial(branch.side, u)?
        };
        if !branch.is_return() {
            return Ok((a, l * 2u32));
        }
        let h = self.half(branch.side)?;
        let action = Float::with_val(prec, &h.action * 2u32) - a;
        let lambda = (Float::with_val(prec, &h.lambda * 2u32) - l) * 2u32;
        Ok((action, lambda))
    }

    /// `(S, lambda)` at the endpoint; `lambda` may be non-positive.
    pub fn action_lambda_of_end(&self, q: &Float, branch: TrajectoryBranch) -> Result<(Float, Float)> {
        let u = self.endpoint(q, branch)?;
        self.action_lambda(&u, branch)
    }

    pub fn action_to_end(&self, q: &Float, branch: TrajectoryBranch) -> Result<Float> {
        let u = self.endpoint(q, branch)?;
        Ok(self.action_lambda(&u, branch)?.0)
    }

    /// May be zero or negative; consumers decide what that means.
    pub fn lambda_of_end(&self, q: &Float, branch: TrajectoryBranch) -> Result<Float> {
        let u = self.endpoint(q, branch)?;
        Ok(self.action_lambda(&u, branch)?.1)
    }

    pub fn xi0_of_end(&self, q: &Float, branch: TrajectoryBranch) -> Result<Float> {
        Ok(self.saddle_at(q, branch)?.xi0)
    }

    pub fn momentum_pi0(&self, q: &Float, branch: TrajectoryBranch) -> Result<Float> {
        Ok(self.saddle_at(q, branch)?.pi0)
    }

    /// All classical data at the endpoint; fails unless `lambda > 0`.
    pub fn saddle_at(&self, q: &Float, branch: TrajectoryBranch) -> Result<SaddleData> {
        let prec = self.prec();
        let u = self.endpoint(q, branch)?;
        let (action, lambda) = self.action_lambda(&u, branch)?;
        if lambda <= 0 {
            return Err(Error::BranchUnavailable {
                branch,
                detail: format!(
                    "lambda = {} <= 0 at Q = {}",
                    fmt_decimal(&lambda, 6),
                    fmt_decimal(q, 12)
                ),
            });
        }
        let root = Float::with_val(prec, lambda.sqrt_ref());
        let q_end = Float::with_val(prec, q);
        let xi0 = Float::with_val(prec, &q_end / &root);
        let v = self.v_at(branch.side, &u);
        let speed = if v > 0 { (v * 2u32).sqrt() } else { Float::new(prec) };
        // outgoing on the direct leg, incoming after the bounce
        let sigma = if branch.is_return() { -branch.side.sign() } else { branch.side.sign() };
        let pi0 = speed * sigma / &root;
        Ok(SaddleData {
            q_end,
            branch,
            action,
            lambda,
            xi0,
            pi0,
        })
    }

    /// Largest `u` scanned on a side without a turning point.
    pub fn open_side_extent(&self) -> f64 {
        10.0
    }

    fn grid(&self, branch: TrajectoryBranch) -> Result<&[GridPoint]> {
        let cell = &self.grids[branch.index()];
        if let Some(g) = cell.get() {
            return Ok(g);
        }
        let prec = self.prec();
        let top = match self.side(branch.side).half.as_ref() {
            Some(h) => h.turn.to_f64(),
            None if branch.is_return() => return Err(Error::NoTurningPoint(branch.side)),
            None => self.open_side_extent(),
        };
        let n = self.settings.scan_points.max(8);
        let mut us: Vec<f64> = Vec::with_capacity(n + 1);
        let lo = top * 1e-6;
        for i in 0..n / 2 {
            let t = i as f64 / (n / 2 - 1) as f64;
            us.push(lo * (top / lo).powf(t));
        }
        for i in 1..n / 2 {
            us.push(top * i as f64 / (n / 2) as f64);
        }
        us.sort_by(|a, b| a.partial_cmp(b).unwrap());
        us.dedup();
        let mut points: Vec<Float> = us.into_iter().map(|u| Float::with_val(prec, u)).collect();
        // the grid ends exactly at the turning point, and the return branch starts at the origin
        if let Some(h) = self.side(branch.side).half.as_ref() {
            points.pop();
            points.push(h.turn.clone());
        }
        if branch.is_return() {
            points.insert(0, Float::new(prec));
        }
        let sign = branch.side.sign();
        let evaluated: Vec<Result<GridPoint>> = points
            .into_par_iter()
            .map(|u| {
                let q = Float::with_val(prec, &u * sign);
                let (_, lambda) = self.action_lambda(&u, branch)?;
                let xi0 = if lambda > 0 {
                    Some(q / lambda.sqrt())
                } else {
                    None
                };
                Ok(GridPoint { u, xi0 })
            })
            .collect();
        let grid = evaluated.into_iter().collect::<Result<Vec<_>>>()?;
        Ok(cell.get_or_init(|| grid))
    }

    /// Endpoints on `branch` with `Q / sqrt(lambda(Q)) = xi0`, ordered by `|Q|`.
    pub fn end_of_xi0(&self, xi0: &Float, branch: TrajectoryBranch) -> Result<Vec<SaddleData>> {
        let prec = self.prec();
        let no_root = || Error::NoTrajectory {
            xi0: fmt_decimal(xi0, 12),
            branch,
        };
        if branch.is_return() {
            self.half(branch.side)?;
        }
        if xi0.is_zero() {
            return if branch.is_return() {
                Ok(vec![self.saddle_at(&Float::new(prec), branch)?])
            } else {
                Err(no_root())
            };
        }
        if xi0.is_sign_negative() != (branch.side == Side::Minus) {
            return Err(no_root());
        }
        let grid = self.grid(branch)?;
        if grid.iter().all(|p| p.xi0.is_none()) {
            return Err(Error::BranchUnavailable {
                branch,
                detail: "lambda <= 0 along the whole branch".into(),
            });
        }
        let sign = branch.side.sign();
        let offset = |u: &Float| -> Float {
            let q = Float::with_val(prec, u * sign);
            match self.action_lambda(u, branch) {
                Ok((_, lambda)) if lambda > 0 => q / lambda.sqrt() - xi0,
                _ => Float::with_val(prec, rug::float::Special::Nan),
            }
        };
        let mut roots: Vec<Float> = Vec::new();
        for pair in grid.windows(2) {
            let (Some(x0), Some(x1)) = (&pair[0].xi0, &pair[1].xi0) else {
                continue;
            };
            let d0 = Float::with_val(prec, x0 - xi0);
            let d1 = Float::with_val(prec, x1 - xi0);
            if d0.is_zero() {
                roots.push(pair[0].u.clone());
                continue;
            }
            if d1.is_zero() || d0.is_sign_negative() == d1.is_sign_negative() {
                continue;
            }
            let root = refine_root(
                offset,
                pair[0].u.clone(),
                pair[1].u.clone(),
                self.settings.root_tol,
                400,
            );
            roots.push(root);
        }
        if let Some(last) = grid.last() {
            if last.xi0.as_ref() == Some(xi0) {
                roots.push(last.u.clone());
            }
        }
        if roots.is_empty() {
            return Err(no_root());
        }
        roots
            .into_iter()
            .map(|u| self.saddle_at(&Float::with_val(prec, &u * sign), branch))
            .collect()
    }

    /// `int_a^b du / sqrt(2V)` with `0 < a <= b`, integrated in `ln u` so the
    /// `1/u` behaviour near the origin stays smooth.
    fn time_between(&self, side: Side, a: &Float, b: &Float) -> Result<Float> {
        let prec = self.prec();
        let wa = Float::with_val(prec, a.ln_ref());
        let wb = Float::with_val(prec, b.ln_ref());
        self.quad.integrate(
            |w| {
                let u = Float::with_val(prec, w.exp_ref());
                let v = self.v_at(side, &u);
                if v <= 0 {
                    Float::new(prec)
                } else {
                    u / (v * 2u32).sqrt()
                }
            },
            &wa,
            &wb,
        )
    }

    /// `samples` points uniformly spaced in `tau` along the history of the
    /// trajectory ending at `q`, truncated at `|Q| = eps` near the origin.
    /// `tau = 0` at the endpoint. Return-branch endpoints closer to the origin
    /// than `eps` are moved to `eps`.
    pub fn tau_profile(
        &self,
        q: &Float,
        branch: TrajectoryBranch,
        eps: &Float,
        samples: usize,
    ) -> Result<Vec<ProfilePoint>> {
        let prec = self.prec();
        if *eps <= 0 {
            return Err(Error::Usage("profile cutoff eps must be positive".into()));
        }
        if samples < 2 {
            return Err(Error::Usage("a profile needs at least 2 samples".into()));
        }
        let mut u_end = self.endpoint(q, branch)?;
        let side = branch.side;
        let sign = side.sign();
        if u_end < *eps {
            if !branch.is_return() {
                return Err(Error::Usage("direct-branch endpoint lies inside the eps cutoff".into()));
            }
            u_end = eps.clone();
        }
        let turn = self.side(side).half.as_ref().map(|h| h.turn.clone());
        let top = match (&turn, branch.is_return()) {
            (Some(t), true) => t.clone(),
            _ => u_end.clone(),
        };
        let t_out = self.time_between(side, eps, &top)?;
        let t_back = match &turn {
            Some(t) if branch.is_return() => self.time_between(side, &u_end, t)?,
            _ => Float::new(prec),
        };
        let total = Float::with_val(prec, &t_out + &t_back);
        let step = Float::with_val(prec, &total / (samples as u32 - 1));

        let tol = self.settings.root_tol;
        let points: Vec<Result<ProfilePoint>> = (0..samples)
            .into_par_iter()
            .map(|i| {
                let elapsed = Float::with_val(prec, &step * i as u32);
                let tau = if i == samples - 1 {
                    Float::new(prec)
                } else {
                    Float::with_val(prec, &elapsed - &total)
                };
                let (u, leg) = if elapsed <= t_out {
                    let u = if i == 0 {
                        eps.clone()
                    } else if elapsed == t_out {
                        top.clone()
                    } else {
                        refine_root(
                            |x: &Float| match self.time_between(side, eps, x) {
                                Ok(t) => t - &elapsed,
                                Err(_) => Float::with_val(prec, rug::float::Special::Nan),
                            },
                            eps.clone(),
                            top.clone(),
                            tol,
                            400,
                        )
                    };
                    (u, TrajectoryBranch::direct(side))
                } else {
                    let back = Float::with_val(prec, &elapsed - &t_out);
                    let t = turn.clone().expect("return leg has a turning point");
                    let u = if i == samples - 1 {
                        u_end.clone()
                    } else {
                        refine_root(
                            |x: &Float| match self.time_between(side, x, &t) {
                                Ok(tt) => tt - &back,
                                Err(_) => Float::with_val(prec, rug::float::Special::Nan),
                            },
                            u_end.clone(),
                            t.clone(),
                            tol,
                            400,
                        )
                    };
                    (u, TrajectoryBranch::returning(side))
                };
                let q = Float::with_val(prec, &u * sign);
                let (_, lambda) = self.action_lambda(&u, leg)?;
                let xi0 = if lambda > 0 {
                    Some(Float::with_val(prec, &q / lambda.sqrt()))
                } else {
                    None
                };
                Ok(ProfilePoint { tau, q, xi0 })
            })
            .collect();
        points.into_iter().collect()
    }
}

fn side_index(side: Side) -> usize {
    match side {
        Side::Plus => 0,
        Side::Minus => 1,
    }
}

/// CSV text with header `tau,Q,xi0`; unavailable `xi0` is written as `NA`.
pub fn profile_csv(points: &[ProfilePoint], digits: usize) -> String {
    let mut out = String::from("tau,Q,xi0\n");
    for p in points {
        let xi0 = p.xi0.as_ref().map_or("NA".to_string(), |x| fmt_decimal(x, digits));
        out.push_str(&format!(
            "{},{},{}\n",
            fmt_decimal(&p.tau, digits),
            fmt_decimal(&p.q, digits),
            xi0
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic() -> Trajectories {
        Trajectories::new(PotentialSpec::monomial(3, -1).unwrap()).unwrap()
    }

    fn f(x: f64) -> Float {
        Float::with_val(256, x)
    }

    #[test]
    fn branch_labels() {
        assert_eq!(TrajectoryBranch::returning(Side::Plus).to_string(), "return+");
        assert_eq!(TrajectoryBranch::direct(Side::Minus).to_string(), "direct-");
    }

    #[test]
    fn cubic_turning_point_and_bounce() {
        let t = cubic();
        assert_eq!(t.turning_point(Side::Plus).unwrap(), 0.5);
        assert!(t.turning_point(Side::Minus).is_none());
        let s0 = t.bounce_action(Side::Plus).unwrap();
        assert!((s0 - 2.0f64 / 15.0).abs() < 1e-12);
        assert!(matches!(t.bounce_action(Side::Minus), Err(Error::NoTurningPoint(Side::Minus))));
    }

    #[test]
    fn small_q_direct_lambda() {
        let t = cubic();
        let q = f(1e-2);
        let lambda = t.lambda_of_end(&q, TrajectoryBranch::direct(Side::Plus)).unwrap();
        let approx = 1e-6 / 3.0;
        assert!((lambda.to_f64() / approx - 1.0).abs() < 0.05);
        let neg = t.lambda_of_end(&f(-1e-2), TrajectoryBranch::direct(Side::Minus)).unwrap();
        assert!(neg < 0);
    }

    #[test]
    fn endpoint_checks() {
        let t = cubic();
        assert!(matches!(
            t.lambda_of_end(&f(0.6), TrajectoryBranch::direct(Side::Plus)),
            Err(Error::BeyondTurningPoint { .. })
        ));
        assert!(matches!(
            t.lambda_of_end(&f(-0.1), TrajectoryBranch::returning(Side::Minus)),
            Err(Error::NoTurningPoint(Side::Minus))
        ));
        assert!(matches!(
            t.xi0_of_end(&f(-0.1), TrajectoryBranch::direct(Side::Minus)),
            Err(Error::BranchUnavailable { .. })
        ));
    }

    #[test]
    fn inversion_round_trip() {
        let t = cubic();
        let b = TrajectoryBranch::direct(Side::Plus);
        let xi0 = t.xi0_of_end(&f(0.25), b).unwrap();
        let roots = t.end_of_xi0(&xi0, b).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0].q_end.clone() - 0.25f64).abs() < 1e-10);
    }

    #[test]
    fn no_trajectory_for_wrong_sign() {
        let t = cubic();
        assert!(matches!(
            t.end_of_xi0(&f(-5.0), TrajectoryBranch::direct(Side::Plus)),
            Err(Error::NoTrajectory { .. })
        ));
        assert!(matches!(
            t.end_of_xi0(&f(-5.0), TrajectoryBranch::direct(Side::Minus)),
            Err(Error::BranchUnavailable { .. })
        ));
    }

    #[test]
    fn profile_is_monotone_and_csv_has_header() {
        let t = cubic();
        let b = TrajectoryBranch::returning(Side::Plus);
        let pts = t.tau_profile(&f(0.2), b, &f(1e-6), 12).unwrap();
        assert_eq!(pts.len(), 12);
        for w in pts.windows(2) {
            assert!(w[1].tau > w[0].tau);
        }
        assert_eq!(pts.last().unwrap().tau, 0);
        assert!((pts.last().unwrap().q.clone() - 0.2f64).abs() < 1e-30);
        let csv = profile_csv(&pts, 10);
        assert!(csv.starts_with("tau,Q,xi0\n"));
        assert_eq!(csv.lines().count(), 13);
    }
}
