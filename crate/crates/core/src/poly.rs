//! Dense polynomials with exact rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::{Float, Integer, Rational};

/// Polynomial `sum c_n x^n` stored densely by degree.
///
/// The coefficient list is always trimmed: the last entry is nonzero, or the
/// list is empty for the zero polynomial.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct RationalPolynomial {
    coeffs: Vec<Rational>,
}

impl RationalPolynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| *c == 0) {
            coeffs.pop();
        }
        RationalPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        RationalPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::from(1))
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    pub fn monomial(c: Rational, degree: usize) -> Self {
        let mut coeffs = vec![Rational::new(); degree + 1];
        coeffs[degree] = c;
        Self::new(coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Rational {
        self.coeffs.get(n).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    /// Horner evaluation with every operation rounded to `prec` bits.
    pub fn eval_float(&self, x: &Float, prec: u32) -> Float {
        let x = Float::with_val(prec, x);
        let mut acc = Float::new(prec);
        for c in self.coeffs.iter().rev() {
            acc *= &x;
            acc += Float::with_val(prec, c);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, c)| Rational::from(c * Integer::from(n)))
            .collect();
        Self::new(coeffs)
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .map(|c| Rational::from(c * factor))
                .collect(),
        )
    }

    /// Multiply by `x^shift`.
    pub fn shift(&self, shift: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rational::new(); shift];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::new(coeffs)
    }

    /// The polynomial `p(-x)`.
    pub fn reflect(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| if n % 2 == 1 { Rational::from(-c) } else { c.clone() })
                .collect(),
        )
    }

    /// Euclidean division: returns `(quotient, remainder)`.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rational::new(); rem.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let top = rem.len() - 1;
            let factor = Rational::from(&rem[top] / &lead);
            if factor != 0 {
                for (i, c) in divisor.coeffs.iter().enumerate() {
                    rem[top - dd + i] -= Rational::from(&factor * c);
                }
                quot[top - dd] = factor;
            }
            rem.pop();
            while rem.last().is_some_and(|c| *c == 0) {
                rem.pop();
            }
        }
        (Self::new(quot), Self::new(rem))
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        match a.leading().cloned() {
            Some(lead) => a.scale(&lead.recip()),
            None => a,
        }
    }

    /// Number of distinct real roots in the half-open interval `(lo, hi]`,
    /// counted with a Sturm sequence.
    pub fn count_roots(&self, lo: &Rational, hi: &Rational) -> usize {
        if self.degree().unwrap_or(0) == 0 {
            return 0;
        }
        let mut chain = vec![self.clone(), self.derivative()];
        loop {
            let n = chain.len();
            let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(-r);
        }
        let changes = |x: &Rational| {
            let signs: Vec<i32> = chain
                .iter()
                .map(|p| p.eval(x).cmp0() as i32)
                .filter(|&s| s != 0)
                .collect();
            signs.windows(2).filter(|w| w[0] != w[1]).count()
        };
        // Sturm's theorem requires lo not to be a multiple root; shared factors
        // only cancel uniformly, so the difference is still the distinct count.
        changes(lo).saturating_sub(changes(hi))
    }

    /// Common-denominator form: `self = numerators / denominator`.
    pub fn to_integer_form(&self) -> (Vec<Integer>, Integer) {
        let mut denom = Integer::from(1);
        for c in &self.coeffs {
            denom.lcm_mut(c.denom());
        }
        let nums = self
            .coeffs
            .iter()
            .map(|c| c.numer() * Integer::from(&denom / c.denom()))
            .collect();
        (nums, denom)
    }
}

impl fmt::Debug for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match n {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})x")?,
                _ => write!(f, "({c})x^{n}")?,
            }
        }
        Ok(())
    }
}

impl Neg for RationalPolynomial {
    type Output = RationalPolynomial;

    fn neg(self) -> Self {
        Self::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl Add for &RationalPolynomial {
    type Output = RationalPolynomial;

    fn add(self, rhs: Self) -> RationalPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RationalPolynomial::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &RationalPolynomial {
    type Output = RationalPolynomial;

    fn sub(self, rhs: Self) -> RationalPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RationalPolynomial::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &RationalPolynomial {
    type Output = RationalPolynomial;

    fn mul(self, rhs: Self) -> RationalPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return RationalPolynomial::zero();
        }
        let mut out = vec![Rational::new(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += Rational::from(a * b);
            }
        }
        RationalPolynomial::new(out)
    }
}
