//! Double-exponential (tanh-sinh) quadrature at arbitrary precision.
//!
//! The substitution `x = tanh(pi/2 sinh t)` clusters abscissas doubly
//! exponentially at both endpoints, so integrable endpoint singularities
//! such as `(b - x)^(-1/2)` converge without special treatment.

use std::sync::OnceLock;

use rug::float::Constant;
use rug::Float;

use crate::error::{Error, Result};

/// One abscissa pair `t, -t`: `complement = 1 - tanh(pi/2 sinh t)` and the
/// matching weight `pi/2 cosh t / cosh^2(pi/2 sinh t)`.
#[derive(Debug, Clone)]
struct Node {
    complement: Float,
    weight: Float,
}

#[derive(Debug)]
pub struct TanhSinh {
    prec: u32,
    tol: f64,
    min_level: usize,
    max_level: usize,
    t_max: f64,
    levels: Vec<OnceLock<Vec<Node>>>,
    center_weight: Float,
}

impl TanhSinh {
    pub const DEFAULT_MAX_LEVEL: usize = 12;

    pub fn new(prec: u32, tol: f64) -> Self {
        Self::with_levels(prec, tol, Self::DEFAULT_MAX_LEVEL)
    }

    pub fn with_levels(prec: u32, tol: f64, max_level: usize) -> Self {
        // beyond t_max the abscissas sit closer than 2^-prec to the endpoints
        let u = (prec as f64 + 2.0) * std::f64::consts::LN_2 / 2.0;
        let t_max = (2.0 * u / std::f64::consts::PI).asinh();
        let center_weight = Float::with_val(prec, Constant::Pi) / 2u32;
        TanhSinh {
            prec,
            tol,
            min_level: 3,
            max_level,
            t_max,
            levels: (0..=max_level).map(|_| OnceLock::new()).collect(),
            center_weight,
        }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// Abscissas new at `level`: `t = j h` with `h = 2^-level` and `j` odd
    /// (all `j >= 1` at level 0).
    fn nodes(&self, level: usize) -> &[Node] {
        self.levels[level].get_or_init(|| {
            let prec = self.prec;
            let h = 0.5f64.powi(level as i32);
            let half_pi = Float::with_val(prec, Constant::Pi) / 2u32;
            let mut out = Vec::new();
            let mut j = 1usize;
            loop {
                let t = Float::with_val(prec, j) * h;
                if t.to_f64() > self.t_max {
                    break;
                }
                let u = Float::with_val(prec, t.sinh_ref()) * &half_pi;
                let e2u = Float::with_val(prec, Float::with_val(prec, &u * 2u32).exp_ref());
                let complement = Float::with_val(prec, 2u32) / (e2u + 1u32);
                let cosh_u = Float::with_val(prec, u.cosh_ref());
                let weight = Float::with_val(prec, t.cosh_ref()) * &half_pi / cosh_u.square();
                out.push(Node { complement, weight });
                j += if level == 0 { 1 } else { 2 };
            }
            out
        })
    }

    pub fn integrate<F>(&self, f: F, a: &Float, b: &Float) -> Result<Float>
    where
        F: Fn(&Float) -> Float,
    {
        self.integrate_with_error(f, a, b).map(|(v, _)| v)
    }

    /// Integral over `[a, b]` and the last level-to-level change.
    pub fn integrate_with_error<F>(&self, f: F, a: &Float, b: &Float) -> Result<(Float, Float)>
    where
        F: Fn(&Float) -> Float,
    {
        let prec = self.prec;
        if a == b {
            return Ok((Float::new(prec), Float::new(prec)));
        }
        let a = Float::with_val(prec, a);
        let b = Float::with_val(prec, b);
        let half = Float::with_val(prec, &b - &a) / 2u32;
        let mid = Float::with_val(prec, &a + &b) / 2u32;

        let mut sum = Float::with_val(prec, f(&mid) * &self.center_weight);
        let mut prev: Option<Float> = None;
        let mut last_change = Float::with_val(prec, rug::float::Special::Infinity);
        for level in 0..=self.max_level {
            for node in self.nodes(level) {
                let offset = Float::with_val(prec, &half * &node.complement);
                let right = Float::with_val(prec, &b - &offset);
                let left = Float::with_val(prec, &a + &offset);
                let pair = f(&right) + f(&left);
                sum += pair * &node.weight;
            }
            let h = Float::with_val(prec, 1u32) >> level as i32;
            let estimate = Float::with_val(prec, &sum * &h) * &half;
            if !estimate.is_finite() {
                return Err(Error::Quadrature {
                    tol: self.tol,
                    change: f64::NAN,
                });
            }
            if let Some(p) = prev.as_ref() {
                last_change = Float::with_val(prec, &estimate - p).abs();
                let scale = Float::with_val(prec, estimate.abs_ref());
                let floor = Float::with_val(prec, 1u32) >> (prec as i32 - 16);
                if level >= self.min_level
                    && (last_change <= scale * self.tol || last_change <= floor)
                {
                    return Ok((estimate, last_change));
                }
            }
            prev = Some(estimate);
        }
        Err(Error::Quadrature {
            tol: self.tol,
            change: last_change.to_f64(),
        })
    }
}
