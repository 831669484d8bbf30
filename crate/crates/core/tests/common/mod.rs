#![allow(dead_code)]

use largeorder::numeric::{ln_gamma, LogValue};
use largeorder::poly::RationalPolynomial;
use largeorder::potential::PotentialSpec;
use largeorder::series::SeriesTable;
use rug::{Float, Rational};

/// Energies E_0..=E_kmax from textbook Rayleigh-Schroedinger theory in a
/// truncated oscillator basis, with intermediate normalization.
pub fn harmonic_rs_energies(spec: &PotentialSpec, k_max: usize, basis: usize, prec: u32) -> Vec<Float> {
    let apply_x = |v: &[Float]| -> Vec<Float> {
        let mut out = vec![Float::new(prec); basis];
        for n in 0..basis {
            if v[n].is_zero() {
                continue;
            }
            if n + 1 < basis {
                let up = Float::with_val(prec, (n + 1) as f64 / 2.0).sqrt();
                out[n + 1] += Float::with_val(prec, &v[n] * &up);
            }
            if n > 0 {
                let down = Float::with_val(prec, n as f64 / 2.0).sqrt();
                out[n - 1] += Float::with_val(prec, &v[n] * &down);
            }
        }
        out
    };
    let mut psi: Vec<Vec<Float>> = Vec::new();
    let mut ground = vec![Float::new(prec); basis];
    ground[0] = Float::with_val(prec, 1);
    psi.push(ground);
    let mut energies = vec![Float::with_val(prec, 0.5)];
    for k in 1..=k_max {
        let mut w = vec![Float::new(prec); basis];
        for j in 1..=k {
            let v = spec.coefficient(j as u32 + 2);
            if v == 0 {
                continue;
            }
            let mut term = psi[k - j].clone();
            for _ in 0..j + 2 {
                term = apply_x(&term);
            }
            let v = Float::with_val(prec, &v);
            for n in 0..basis {
                w[n] += Float::with_val(prec, &term[n] * &v);
            }
        }
        let e = w[0].clone();
        let mut next = vec![Float::new(prec); basis];
        for n in 1..basis {
            let mut acc = Float::with_val(prec, -&w[n]);
            for i in 1..k {
                acc += Float::with_val(prec, &energies[i] * &psi[k - i][n]);
            }
            next[n] = acc / n as u32;
        }
        energies.push(e);
        psi.push(next);
    }
    energies
}

fn derivative(c: &[Rational]) -> Vec<Rational> {
    c.iter().enumerate().skip(1).map(|(n, a)| Rational::from(a * n as u32)).collect()
}

fn eval(c: &[Rational], x: &Rational) -> Rational {
    let mut acc = Rational::new();
    for a in c.iter().rev() {
        acc *= x;
        acc += a;
    }
    acc
}

/// Order-k part of `(H - E) Psi` divided by the Gaussian, at rational `x`.
pub fn order_residual(table: &SeriesTable, spec: &PotentialSpec, k: usize, x: &Rational) -> Rational {
    let p = table.polynomial(k).unwrap().coefficients().to_vec();
    let d1 = derivative(&p);
    let d2 = derivative(&d1);
    let mut r = (&eval(&d2, x) * Rational::from((-1, 2))) + Rational::from(x * &eval(&d1, x));
    for j in 1..=k {
        let pj = table.polynomial(k - j).unwrap().coefficients().to_vec();
        let val = eval(&pj, x);
        r -= Rational::from(table.energy(j).unwrap() * &val);
        let v = spec.coefficient(j as u32 + 2);
        if v != 0 {
            let mut power = Rational::from(1);
            for _ in 0..j + 2 {
                power *= x;
            }
            r += v * power * val;
        }
    }
    r
}

/// `int p exp(-x^2) dx / int exp(-x^2) dx`.
pub fn gaussian_mean(p: &RationalPolynomial) -> Rational {
    let mut acc = Rational::new();
    let mut w = Rational::from(1);
    for (n, c) in p.coefficients().iter().enumerate() {
        if n % 2 == 1 {
            continue;
        }
        if n > 0 {
            w *= Rational::from((n as i64 - 1, 2));
        }
        acc += Rational::from(c * &w);
    }
    acc
}

/// `v_k = Gamma(k/2) c^k k^p` as log-values.
pub fn synthetic(c: f64, p: f64, ks: impl Iterator<Item = usize>) -> Vec<(usize, LogValue)> {
    let prec = 256;
    ks.map(|k| {
        let half = Float::with_val(prec, k) / 2u32;
        let log = ln_gamma(&half)
            + Float::with_val(prec, c.abs()).ln() * k as u32
            + Float::with_val(prec, k).ln() * p;
        let sign = if c < 0.0 && k % 2 == 1 { -1 } else { 1 };
        (k, LogValue { log_magnitude: log, sign })
    })
    .collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}
