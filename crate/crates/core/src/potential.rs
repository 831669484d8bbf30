//! One-dimensional polynomial potentials `V(Q) = Q^2/2 + sum_{m>=3} v_m Q^m`.

use std::collections::BTreeMap;
use std::path::Path;

use rug::{Float, Integer, Rational};
use serde_json::Value;

use crate::error::{Error, Result, Side};
use crate::poly::RationalPolynomial;

/// Scan bound and density for the turning-point search.
#[derive(Debug, Clone, Copy)]
pub struct TurningPointScan {
    pub bound: f64,
    pub points: usize,
}

impl Default for TurningPointScan {
    fn default() -> Self {
        TurningPointScan {
            bound: 1e3,
            points: 10_000,
        }
    }
}

/// A validated anharmonic potential. The quadratic part is always `Q^2/2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PotentialSpec {
    coefficients: BTreeMap<u32, Rational>,
    name: Option<String>,
}

impl PotentialSpec {
    pub fn new<I>(coefficients: I, name: Option<String>) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, Rational)>,
    {
        let coefficients: BTreeMap<u32, Rational> = coefficients.into_iter().collect();
        if coefficients.is_empty() {
            return Err(Error::InvalidPotential("empty coefficient map".into()));
        }
        if let Some(m) = coefficients.keys().find(|&&m| m < 3) {
            return Err(Error::InvalidPotential(format!(
                "degree {m} < 3 (the quadratic part is fixed to Q^2/2)"
            )));
        }
        Ok(PotentialSpec { coefficients, name })
    }

    /// Convenience constructor for a single anharmonic term `v Q^m`.
    pub fn monomial(degree: u32, v: impl Into<Rational>) -> Result<Self> {
        Self::new([(degree, v.into())], None)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text)
            .map_err(|e| Error::InvalidPotential(format!("malformed document: {e}")))?;
        let coeffs = doc
            .get("coefficients")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::InvalidPotential("missing \"coefficients\" object".into()))?;
        let mut map = BTreeMap::new();
        for (key, value) in coeffs {
            let degree: u32 = key
                .trim()
                .parse()
                .map_err(|_| Error::InvalidPotential(format!("invalid degree {key:?}")))?;
            let text = match value {
                Value::String(s) => s.clone(),
                Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string(),
                other => {
                    return Err(Error::InvalidPotential(format!(
                        "coefficient for degree {degree} must be a rational string, got {other}"
                    )))
                }
            };
            map.insert(degree, parse_rational(&text)?);
        }
        let name = doc.get("name").and_then(Value::as_str).map(str::to_owned);
        Self::new(map, name)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Value {
        let coeffs: serde_json::Map<String, Value> = self
            .coefficients
            .iter()
            .map(|(m, v)| (m.to_string(), Value::String(v.to_string())))
            .collect();
        let mut doc = serde_json::Map::new();
        doc.insert("coefficients".into(), Value::Object(coeffs));
        if let Some(name) = &self.name {
            doc.insert("name".into(), Value::String(name.clone()));
        }
        Value::Object(doc)
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn coefficients(&self) -> &BTreeMap<u32, Rational> {
        &self.coefficients
    }

    /// `v_m`, zero when absent.
    pub fn coefficient(&self, degree: u32) -> Rational {
        self.coefficients.get(&degree).cloned().unwrap_or_default()
    }

    pub fn max_degree(&self) -> u32 {
        *self.coefficients.keys().next_back().expect("non-empty by construction")
    }

    /// True when every anharmonic term has even degree, so `V(Q) = V(-Q)`.
    pub fn is_even(&self) -> bool {
        self.coefficients.iter().all(|(m, v)| m % 2 == 0 || *v == 0)
    }

    /// `V` as an exact polynomial in `Q`.
    pub fn polynomial(&self) -> RationalPolynomial {
        let mut coeffs = vec![Rational::new(); self.max_degree() as usize + 1];
        coeffs[2] = Rational::from((1, 2));
        for (m, v) in &self.coefficients {
            coeffs[*m as usize] += v;
        }
        RationalPolynomial::new(coeffs)
    }

    /// `V'` as an exact polynomial.
    pub fn derivative_polynomial(&self) -> RationalPolynomial {
        self.polynomial().derivative()
    }

    /// `V - Q V'/2 = sum_m (1 - m/2) v_m Q^m`; the quadratic part cancels exactly.
    pub fn virial_polynomial(&self) -> RationalPolynomial {
        let mut coeffs = vec![Rational::new(); self.max_degree() as usize + 1];
        for (m, v) in &self.coefficients {
            let factor = Rational::from((2 - *m as i64, 2));
            coeffs[*m as usize] = Rational::from(v * &factor);
        }
        RationalPolynomial::new(coeffs)
    }

    pub fn eval_v(&self, q: &Float) -> Float {
        self.polynomial().eval_float(q, q.prec())
    }

    pub fn eval_dv(&self, q: &Float) -> Float {
        self.derivative_polynomial().eval_float(q, q.prec())
    }

    pub fn eval_v_exact(&self, q: &Rational) -> Rational {
        self.polynomial().eval(q)
    }

    pub fn eval_dv_exact(&self, q: &Rational) -> Rational {
        self.derivative_polynomial().eval(q)
    }

    /// `V(s u) / u^2` as a polynomial in `u >= 0`; positive at `u = 0`.
    fn reduced_on_side(&self, side: Side) -> RationalPolynomial {
        let v = self.polynomial();
        let v = if side == Side::Minus { v.reflect() } else { v };
        RationalPolynomial::new(v.coefficients()[2..].to_vec())
    }

    pub fn turning_point(&self, side: Side, prec: u32) -> Option<Float> {
        self.turning_point_with(side, prec, TurningPointScan::default())
    }

    /// Smallest `|Q| > 0` on `side` where `V` has a simple, sign-changing zero.
    ///
    /// The scan runs over a geometric grid up to `scan.bound`; the bracket is
    /// refined by bisection to working precision. A tangential zero before the
    /// bracket, or a multiple root inside it, makes the result absent.
    pub fn turning_point_with(&self, side: Side, prec: u32, scan: TurningPointScan) -> Option<Float> {
        let reduced = self.reduced_on_side(side);
        let eval = |u: &Float| reduced.eval_float(u, prec);

        let lo_exp = (1e-6f64).ln();
        let hi_exp = scan.bound.ln();
        let n = scan.points.max(2);
        let mut prev = Float::with_val(prec, 0);
        let mut bracket = None;
        for i in 0..n {
            let t = lo_exp + (hi_exp - lo_exp) * i as f64 / (n - 1) as f64;
            let u = Float::with_val(prec, t.exp());
            let w = eval(&u);
            if w <= 0 {
                bracket = Some((prev, u));
                break;
            }
            prev = u;
        }
        let (lo, hi) = bracket?;

        let lo_q = lo.to_rational()?;
        let hi_q = hi.to_rational()?;
        if reduced.count_roots(&Rational::new(), &lo_q) > 0 {
            return None;
        }
        let square_part = reduced.gcd(&reduced.derivative());
        if square_part.count_roots(&lo_q, &hi_q) > 0 {
            return None;
        }
        if eval(&hi).is_zero() {
            // a zero exactly on the grid is still simple after the gcd check
            return Some(hi * side.sign());
        }

        let (mut a, mut b) = (lo, hi);
        for _ in 0..(prec + 8) {
            let mid = Float::with_val(prec, &a + &b) / 2u32;
            if mid <= a || mid >= b {
                break;
            }
            if eval(&mid) > 0 {
                a = mid;
            } else {
                b = mid;
            }
        }
        let root = Float::with_val(prec, &a + &b) / 2u32;
        Some(root * side.sign())
    }
}

/// Parses `"p/q"` (with `q > 0`) or a plain integer.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::InvalidPotential(format!("malformed rational {text:?}"));
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num = Integer::from_str_radix(num, 10).map_err(|_| bad())?;
    let den = Integer::from_str_radix(den, 10).map_err(|_| bad())?;
    if den <= 0 {
        return Err(bad());
    }
    Ok(Rational::from((num, den)))
}
