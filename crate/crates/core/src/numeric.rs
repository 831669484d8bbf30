//! Shared high-precision helpers: signed log-magnitudes, bracketed root
//! refinement, golden-section search and decimal formatting.

use std::cmp::Ordering;

use rug::float::Special;
use rug::Float;

/// A real number stored as `sign * exp(log_magnitude)`.
///
/// Perturbation orders overflow any fixed exponent range at large `k`, so
/// every order evaluation reports this form.
#[derive(Debug, Clone, PartialEq)]
pub struct LogValue {
    pub log_magnitude: Float,
    pub sign: i8,
}

impl LogValue {
    pub fn zero(prec: u32) -> Self {
        LogValue {
            log_magnitude: Float::with_val(prec, Special::NegInfinity),
            sign: 0,
        }
    }

    pub fn from_float(value: &Float) -> Self {
        if value.is_zero() {
            return Self::zero(value.prec());
        }
        LogValue {
            log_magnitude: Float::with_val(value.prec(), value.abs_ref()).ln(),
            sign: if value.is_sign_negative() { -1 } else { 1 },
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// The value itself; MPFR's exponent range makes this safe far beyond `f64`.
    pub fn to_float(&self) -> Float {
        if self.sign == 0 {
            return Float::new(self.log_magnitude.prec());
        }
        let v = Float::with_val(self.log_magnitude.prec(), self.log_magnitude.exp_ref());
        if self.sign < 0 {
            -v
        } else {
            v
        }
    }

    /// Agreement of two evaluations of the same quantity: equal signs and
    /// log-magnitudes within `rel` (relative to `max(1, |log|)`).
    pub fn agrees_with(&self, other: &LogValue, rel: f64) -> bool {
        if self.sign != other.sign {
            return false;
        }
        if self.sign == 0 {
            return true;
        }
        let diff = Float::with_val(64, &self.log_magnitude - &other.log_magnitude).abs();
        let scale = self.log_magnitude.to_f64().abs().max(1.0);
        diff.to_f64() <= rel * scale
    }
}

/// `ln Gamma(x)` for `x > 0`, via MPFR.
pub fn ln_gamma(x: &Float) -> Float {
    Float::with_val(x.prec(), x.ln_gamma_ref())
}

pub fn float(prec: u32, x: f64) -> Float {
    Float::with_val(prec, x)
}

/// Decimal text with `digits` significant digits, e.g. `-1.2500e-3`.
pub fn fmt_decimal(x: &Float, digits: usize) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x.is_sign_negative() { "-inf".into() } else { "inf".into() };
    }
    let digits = digits.max(1);
    if x.is_zero() {
        // no "-0"
        return format!("{:.*e}", digits, Float::new(x.prec()));
    }
    format!("{:.*e}", digits, x)
}

/// Refine a root of `f` inside a sign-changing bracket `[a, b]` using the
/// Illinois variant of regula falsi, falling back to bisection steps when
/// the secant stalls. Stops when the bracket width drops below
/// `rel_tol * max(|a|, |b|)` (plus a tiny absolute floor).
pub fn refine_root<F>(f: F, a: Float, b: Float, rel_tol: f64, max_iter: usize) -> Float
where
    F: Fn(&Float) -> Float,
{
    let prec = a.prec().max(b.prec());
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(&a), f(&b));
    if fa.is_zero() {
        return a;
    }
    if fb.is_zero() {
        return b;
    }
    let mut side = 0i32;
    for iter in 0..max_iter {
        let width = Float::with_val(prec, &b - &a).abs();
        let scale = Float::with_val(prec, a.abs_ref()).max(&Float::with_val(prec, b.abs_ref()));
        let floor = Float::with_val(prec, 1) >> (prec as i32 - 8).max(0);
        if width <= scale * rel_tol || width <= floor {
            break;
        }
        let c = if iter % 4 == 3 {
            Float::with_val(prec, &a + &b) / 2u32
        } else {
            let num = Float::with_val(prec, &a * &fb) - Float::with_val(prec, &b * &fa);
            let den = Float::with_val(prec, &fb - &fa);
            let c = num / den;
            if c.is_finite() && c > a.clone().min(&b) && c < a.clone().max(&b) {
                c
            } else {
                Float::with_val(prec, &a + &b) / 2u32
            }
        };
        let fc = f(&c);
        if fc.is_zero() {
            return c;
        }
        if (fc.is_sign_negative()) == (fb.is_sign_negative()) {
            b = c;
            fb = fc;
            if side == -1 {
                fa /= 2u32;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb /= 2u32;
            }
            side = 1;
        }
    }
    if Float::with_val(prec, fa.abs_ref()) < Float::with_val(prec, fb.abs_ref()) {
        a
    } else {
        b
    }
}

/// Golden-section search for a maximum of `f` on `[a, b]`.
pub fn golden_max<F>(f: F, a: &Float, b: &Float, rel_tol: f64, max_iter: usize) -> (Float, Float)
where
    F: Fn(&Float) -> Option<Float>,
{
    let prec = a.prec();
    let inv_phi = (Float::with_val(prec, 5).sqrt() - 1u32) / 2u32;
    let mut lo = a.clone();
    let mut hi = b.clone();
    let value = |x: &Float| f(x).unwrap_or_else(|| Float::with_val(prec, Special::NegInfinity));
    let step = |lo: &Float, hi: &Float| Float::with_val(prec, hi - lo) * &inv_phi;
    let mut x1 = Float::with_val(prec, &hi - step(&lo, &hi));
    let mut x2 = Float::with_val(prec, &lo + step(&lo, &hi));
    let mut f1 = value(&x1);
    let mut f2 = value(&x2);
    for _ in 0..max_iter {
        let width = Float::with_val(prec, &hi - &lo);
        let scale = Float::with_val(prec, lo.abs_ref()).max(&Float::with_val(prec, hi.abs_ref()));
        if width <= scale * rel_tol {
            break;
        }
        if f1.partial_cmp(&f2) == Some(Ordering::Less) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = Float::with_val(prec, &lo + step(&lo, &hi));
            f2 = value(&x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = Float::with_val(prec, &hi - step(&lo, &hi));
            f1 = value(&x1);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}
