//! Exact Rayleigh–Schrödinger series of the ground state.
//!
//! With `H = -1/2 d^2/dx^2 + V(g x)/g^2` the ground state expands as
//! `Psi(x) = sum_k g^k P_k(x) exp(-x^2/2)` with `E = sum_k g^k E_k`. Writing
//! `L = -1/2 d^2/dx^2 + x d/dx`, order `k` reads
//!
//! ```text
//! L P_k = sum_{j=1..k} E_j P_{k-j} - sum_{j>=1} v_{j+2} x^{j+2} P_{k-j}
//! ```
//!
//! and is solved degree by degree from the top using
//! `L x^n = n x^n - n(n-1)/2 x^{n-2}`. The `x^0` component fixes `E_k`; the
//! free constant `p_0` is fixed by the normalization rule.

use rayon::prelude::*;
use rug::{Float, Integer, Rational};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::numeric::LogValue;
use crate::poly::RationalPolynomial;
use crate::potential::PotentialSpec;

/// How the constant term of each `P_k` (`k >= 1`) is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// `int P_k exp(-x^2) dx = 0`: orders orthogonal to the Gaussian.
    GaussianOrthogonal,
    /// `P_k(0) = 0`.
    ZeroConstant,
}

impl Normalization {
    pub fn tag(self) -> &'static str {
        match self {
            Normalization::GaussianOrthogonal => "gaussian-orthogonal",
            Normalization::ZeroConstant => "zero-constant",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesOrder {
    pub k: usize,
    pub polynomial: RationalPolynomial,
    pub energy: Rational,
}

pub const DEFAULT_ORDER_CEILING: usize = 200;
pub const DEFAULT_PRECISION_CEILING: u32 = 1 << 17;

/// Relative agreement required between an evaluation and its re-run at
/// doubled precision.
const ESCALATION_AGREEMENT: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct SeriesTable {
    potential: PotentialSpec,
    normalization: Normalization,
    orders: Vec<SeriesOrder>,
    precision_ceiling: u32,
}

/// `int x^{2j} exp(-x^2) dx / int exp(-x^2) dx = (2j-1)!!/2^j`.
pub fn gaussian_weight(j: usize) -> Rational {
    let odd = if j == 0 {
        Integer::from(1)
    } else {
        Integer::from(Integer::factorial_2(2 * j as u32 - 1))
    };
    Rational::from((odd, Integer::from(1) << j as u32))
}

fn gaussian_weights(len: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(len);
    let mut w = Rational::from(1);
    for j in 0..len {
        if j > 0 {
            w *= Rational::from((2 * j as i64 - 1, 2));
        }
        out.push(w.clone());
    }
    out
}

impl SeriesTable {
    pub fn new(potential: PotentialSpec, normalization: Normalization) -> Self {
        SeriesTable {
            potential,
            normalization,
            orders: vec![SeriesOrder {
                k: 0,
                polynomial: RationalPolynomial::one(),
                energy: Rational::from((1, 2)),
            }],
            precision_ceiling: DEFAULT_PRECISION_CEILING,
        }
    }

    /// Table with all orders `0..=k_max` computed.
    pub fn build(potential: PotentialSpec, normalization: Normalization, k_max: usize) -> Self {
        let mut table = Self::new(potential, normalization);
        table.extend(k_max);
        table
    }

    pub fn with_precision_ceiling(mut self, bits: u32) -> Self {
        self.precision_ceiling = bits;
        self
    }

    pub fn potential(&self) -> &PotentialSpec {
        &self.potential
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    /// Highest order present.
    pub fn max_order(&self) -> usize {
        self.orders.len() - 1
    }

    pub fn orders(&self) -> &[SeriesOrder] {
        &self.orders
    }

    pub fn order(&self, k: usize) -> Result<&SeriesOrder> {
        self.orders.get(k).ok_or(Error::OrderAbsent(k))
    }

    pub fn polynomial(&self, k: usize) -> Result<&RationalPolynomial> {
        self.order(k).map(|o| &o.polynomial)
    }

    pub fn energy(&self, k: usize) -> Result<&Rational> {
        self.order(k).map(|o| &o.energy)
    }

    /// Ensure orders `0..=k_max` are present. Each order needs all lower ones,
    /// so this runs sequentially.
    pub fn extend(&mut self, k_max: usize) {
        let vertices: Vec<(usize, Rational)> = self
            .potential
            .coefficients()
            .iter()
            .filter(|(_, v)| **v != 0)
            .map(|(m, v)| (*m as usize - 2, v.clone()))
            .collect();
        let mut weights = gaussian_weights(2);
        for k in self.orders.len()..=k_max {
            let order = self.solve_order(k, &vertices, &mut weights);
            self.orders.push(order);
        }
    }

    fn solve_order(
        &self,
        k: usize,
        vertices: &[(usize, Rational)],
        weights: &mut Vec<Rational>,
    ) -> SeriesOrder {
        // source without the E_k P_0 term
        let mut degree = 0;
        for &(j, _) in vertices.iter().filter(|(j, _)| *j <= k) {
            if let Some(d) = self.orders[k - j].polynomial.degree() {
                degree = degree.max(d + j + 2);
            }
        }
        for j in 1..k {
            if let Some(d) = self.orders[k - j].polynomial.degree() {
                degree = degree.max(d);
            }
        }
        let mut src = vec![Rational::new(); degree + 1];
        for (j, v) in vertices.iter().filter(|(j, _)| *j <= k) {
            for (n, c) in self.orders[k - j].polynomial.coefficients().iter().enumerate() {
                if *c != 0 {
                    src[n + j + 2] -= Rational::from(v * c);
                }
            }
        }
        for j in 1..k {
            let e = &self.orders[j].energy;
            if *e == 0 {
                continue;
            }
            for (n, c) in self.orders[k - j].polynomial.coefficients().iter().enumerate() {
                if *c != 0 {
                    src[n] += Rational::from(e * c);
                }
            }
        }

        let mut running = src.clone();
        let mut p = vec![Rational::new(); degree + 1];
        for n in (1..=degree).rev() {
            p[n] = Rational::from(&running[n] / Integer::from(n));
            if n >= 2 && p[n] != 0 {
                let lowered = Integer::from(n * (n - 1) / 2);
                running[n - 2] += Rational::from(&p[n] * &lowered);
            }
        }
        // x^0: L P_k has constant term -p_2, which must equal src_0 + E_k
        let energy = Rational::from(-&running[0]);

        p[0] = match self.normalization {
            Normalization::ZeroConstant => Rational::new(),
            Normalization::GaussianOrthogonal => {
                if weights.len() <= degree / 2 {
                    *weights = gaussian_weights(degree / 2 + 1);
                }
                let mut acc = Rational::new();
                for n in (2..=degree).step_by(2) {
                    if p[n] != 0 {
                        acc += Rational::from(&p[n] * &weights[n / 2]);
                    }
                }
                -acc
            }
        };
        let polynomial = RationalPolynomial::new(p);

        // solvability at x^0 and every other power
        let lp = apply_l(&polynomial);
        let mut rhs = src;
        if rhs.is_empty() {
            rhs.push(Rational::new());
        }
        rhs[0] += &energy;
        assert_eq!(
            lp,
            RationalPolynomial::new(rhs),
            "order {k} does not satisfy its recursion"
        );

        SeriesOrder {
            k,
            polynomial,
            energy,
        }
    }

    /// Coefficient of `x^{3k}` in `P_k`.
    pub fn leading_coefficient(&self, k: usize) -> Result<Rational> {
        if self.potential.coefficient(3) == 0 {
            return Err(Error::NoCubicTerm);
        }
        Ok(self.polynomial(k)?.coeff(3 * k))
    }

    /// `Psi_k(x) = P_k(x) exp(-x^2/2)` in log form, with at least `prec` bits.
    pub fn eval_order(&self, k: usize, x: &Float, prec: u32) -> Result<LogValue> {
        let p = self.polynomial(k)?;
        self.escalate(prec, |bits| {
            let value = p.eval_float(x, bits);
            with_gaussian(LogValue::from_float(&value), x, None)
        })
    }

    /// `rho_k(x, y) = sum_{n=0..k} Psi_n(x) Psi_{k-n}(y)`.
    pub fn density_order(&self, k: usize, x: &Float, y: &Float, prec: u32) -> Result<LogValue> {
        self.order(k)?;
        self.escalate(prec, |bits| {
            let px: Vec<Float> = (0..=k).map(|n| self.orders[n].polynomial.eval_float(x, bits)).collect();
            let py: Vec<Float> = (0..=k).map(|n| self.orders[n].polynomial.eval_float(y, bits)).collect();
            // pairing n with k-n makes the rounded sum exactly symmetric in (x, y)
            let mut sum = Float::new(bits);
            for n in 0..=k / 2 {
                let term = Float::with_val(bits, &px[n] * &py[k - n]);
                if 2 * n == k {
                    sum += term;
                } else {
                    sum += term + Float::with_val(bits, &px[k - n] * &py[n]);
                }
            }
            with_gaussian(LogValue::from_float(&sum), x, Some(y))
        })
    }

    /// Re-evaluate at doubled precision until two runs agree.
    fn escalate<F>(&self, prec: u32, eval: F) -> Result<LogValue>
    where
        F: Fn(u32) -> LogValue,
    {
        let mut bits = prec.max(64);
        let mut low = eval(bits);
        loop {
            let doubled = bits.saturating_mul(2);
            if doubled > self.precision_ceiling {
                return Err(Error::PrecisionCeiling {
                    required: doubled,
                    ceiling: self.precision_ceiling,
                });
            }
            let high = eval(doubled);
            if low.agrees_with(&high, ESCALATION_AGREEMENT) {
                return Ok(high);
            }
            bits = doubled;
            low = high;
        }
    }

    /// `int x^{2m} P_n P_j exp(-x^2) dx / int exp(-x^2) dx`, exactly.
    pub fn gaussian_pair_moment(&self, n: usize, j: usize, m: usize) -> Result<Rational> {
        let a = self.polynomial(n)?;
        let b = self.polynomial(j)?;
        if (n + j) % 2 == 1 {
            return Ok(Rational::new());
        }
        let len = a.coefficients().len() + b.coefficients().len();
        let weights = gaussian_weights(len / 2 + m + 1);
        let mut acc = Rational::new();
        for (p, ca) in a.coefficients().iter().enumerate() {
            if *ca == 0 {
                continue;
            }
            for (q, cb) in b.coefficients().iter().enumerate() {
                if (p + q) % 2 == 0 && *cb != 0 {
                    acc += Rational::from(ca * cb) * &weights[(p + q) / 2 + m];
                }
            }
        }
        Ok(acc)
    }

    /// Order `k` of `int x^{2m} rho(x, x) dx` (unnormalized density, Gaussian
    /// measure normalized to one), i.e. `sum_n gaussian_pair_moment(n, k-n, m)`.
    ///
    /// Evaluated on common-denominator integer forms; pairs `(n, k-n)` and
    /// `(k-n, n)` are computed once.
    pub fn moment_order(&self, k: usize, m: usize) -> Result<Rational> {
        self.order(k)?;
        let forms: Vec<(Vec<Integer>, Integer)> = (0..=k)
            .map(|n| self.orders[n].polynomial.to_integer_form())
            .collect();
        let max_len = forms.iter().map(|(c, _)| c.len()).max().unwrap_or(1);
        let top = max_len + m + 1;
        // (2l-1)!! 2^{top-l}: integer weights sharing the denominator 2^top
        let mut scaled = Vec::with_capacity(top + 1);
        let mut odd = Integer::from(1);
        for l in 0..=top {
            if l > 0 {
                odd *= 2 * l as u32 - 1;
            }
            scaled.push(Integer::from(&odd << (top - l) as u32));
        }
        let terms: Vec<Rational> = (0..=k / 2)
            .into_par_iter()
            .map(|n| {
                let (a, da) = &forms[n];
                let (b, db) = &forms[k - n];
                let mut acc = Integer::new();
                for (p, ca) in a.iter().enumerate() {
                    if *ca == 0 {
                        continue;
                    }
                    let mut inner = Integer::new();
                    for (q, cb) in b.iter().enumerate().skip(p % 2).step_by(2) {
                        if *cb != 0 {
                            inner += cb * &scaled[(p + q) / 2 + m];
                        }
                    }
                    acc += ca * inner;
                }
                let mult = if 2 * n == k { 1u32 } else { 2u32 };
                let den = Integer::from(da * db) << top as u32;
                Rational::from((acc * mult, den))
            })
            .collect();
        Ok(terms.into_iter().fold(Rational::new(), |acc, t| acc + t))
    }

    /// Series export document: per-order `{k, E, P}` records with exact
    /// rationals as `"p/q"` strings.
    pub fn to_json(&self, through: usize) -> Result<Value> {
        self.order(through)?;
        let orders: Vec<Value> = self.orders[..=through]
            .iter()
            .map(|o| {
                json!({
                    "k": o.k,
                    "E": o.energy.to_string(),
                    "P": o.polynomial.coefficients().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                })
            })
            .collect();
        Ok(json!({
            "potential": self.potential.to_json(),
            "normalization": self.normalization.tag(),
            "orders": orders,
        }))
    }
}

/// Multiply a log-value by `exp(-(x^2 + y^2)/2)`.
fn with_gaussian(mut value: LogValue, x: &Float, y: Option<&Float>) -> LogValue {
    if value.is_zero() {
        return value;
    }
    let prec = value.log_magnitude.prec();
    let mut exponent = Float::with_val(prec, x.square_ref());
    if let Some(y) = y {
        exponent += Float::with_val(prec, y.square_ref());
    }
    value.log_magnitude -= exponent / 2u32;
    value
}

/// `L p = -p''/2 + x p'`.
pub fn apply_l(p: &RationalPolynomial) -> RationalPolynomial {
    let mut out = vec![Rational::new(); p.coefficients().len()];
    for (n, c) in p.coefficients().iter().enumerate() {
        if n >= 1 {
            out[n] += Rational::from(c * Integer::from(n));
        }
        if n >= 2 {
            out[n - 2] -= Rational::from(c * Integer::from(n * (n - 1) / 2));
        }
    }
    RationalPolynomial::new(out)
}
