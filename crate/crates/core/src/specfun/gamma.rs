//! Complex log-gamma and digamma, Euler's constant, and ζ with its
//! derivatives on the real axis.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// B_2, B_4, ..., B_20.
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

const SHIFT_TO: f64 = 15.0;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn check_pole(z: Complex64) -> Result<()> {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Err(Error::Pole(format!("gamma pole at z = {}", z.re)));
    }
    Ok(())
}

/// Principal branch of `log Γ(z)` (continuous off the negative real axis).
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    check_pole(z)?;
    if z.re < -1e5 {
        return Err(Error::OutOfRange(format!("Re z = {} too negative", z.re)));
    }
    let mut z = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while z.re < SHIFT_TO {
        shift += z.ln();
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = inv;
    for (k, b) in BERNOULLI.iter().enumerate() {
        let n = 2.0 * (k as f64 + 1.0);
        series += p * (b / (n * (n - 1.0)));
        p *= inv2;
    }
    Ok((z - 0.5) * z.ln() - z + LN_SQRT_2PI + series - shift)
}

/// `Γ(z)` through [`ln_gamma`].
pub fn gamma(z: Complex64) -> Result<Complex64> {
    ln_gamma(z).map(|l| l.exp())
}

/// `ψ(z) = Γ'(z)/Γ(z)`.
pub fn digamma(z: Complex64) -> Result<Complex64> {
    check_pole(z)?;
    let mut z = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while z.re < SHIFT_TO {
        shift += 1.0 / z;
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = inv2;
    for (k, b) in BERNOULLI.iter().enumerate() {
        let n = 2.0 * (k as f64 + 1.0);
        series += p * (b / n);
        p *= inv2;
    }
    Ok(z.ln() - 0.5 * inv - series - shift)
}

/// `log Γ(x)` for real `x > 0`.
pub fn ln_gamma_real(x: f64) -> f64 {
    ln_gamma(Complex64::new(x, 0.0)).expect("positive argument").re
}

/// Euler–Mascheroni constant by Euler–Maclaurin summation of `H_N - log N`.
pub fn euler_gamma() -> f64 {
    static G: OnceLock<f64> = OnceLock::new();
    *G.get_or_init(|| {
        let n = 20.0f64;
        let harmonic: f64 = (1..=20).rev().map(|k| 1.0 / k as f64).sum();
        let mut corr = 0.0;
        let mut p = 1.0 / (n * n);
        for (k, b) in BERNOULLI.iter().enumerate().take(8) {
            corr += b / (2.0 * (k as f64 + 1.0)) * p;
            p /= n * n;
        }
        harmonic - n.ln() - 0.5 / n + corr
    })
}

/// Riemann ζ(s) for `Re s > 0`, `s ≠ 1`, by Euler–Maclaurin summation.
pub fn zeta(s: Complex64) -> Result<Complex64> {
    if (s - 1.0).norm() < 1e-12 {
        return Err(Error::Pole("zeta pole at s = 1".into()));
    }
    if s.re <= 0.0 {
        return Err(Error::OutOfRange("zeta implemented for Re s > 0".into()));
    }
    let n = 30usize;
    let nf = n as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in (1..n).rev() {
        sum += (-s * (k as f64).ln()).exp();
    }
    let ln_n = nf.ln();
    let n_s = (-s * ln_n).exp();
    sum += n_s * nf / (s - 1.0) + 0.5 * n_s;
    // Σ B_{2k}/(2k)! s(s+1)...(s+2k-2) N^{-s-2k+1}
    let mut rising = s;
    let mut fact = 2.0;
    let mut pw = n_s / nf;
    for (k, b) in BERNOULLI.iter().enumerate() {
        sum += rising * pw * (b / fact);
        let m = 2.0 * k as f64;
        rising *= (s + m + 1.0) * (s + m + 2.0);
        fact *= (m + 3.0) * (m + 4.0);
        pw /= nf * nf;
    }
    Ok(sum)
}

/// `ζ^{(j)}(x)` for real `x > 1` via a Cauchy integral on a small circle.
pub fn zeta_derivative(x: f64, j: u32) -> Result<f64> {
    if x <= 1.2 {
        return Err(Error::OutOfRange("zeta derivatives need x > 1.2".into()));
    }
    let r = 0.5f64.min((x - 1.0) / 2.0);
    let m = 64;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..m {
        let th = 2.0 * PI * i as f64 / m as f64;
        let e = Complex64::from_polar(1.0, th);
        acc += zeta(x + r * e)? * Complex64::from_polar(1.0, -(j as f64) * th);
    }
    let fact: f64 = (1..=j).map(|v| v as f64).product();
    Ok((acc * fact / (m as f64 * r.powi(j as i32))).re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn special_values() {
        assert!((ln_gamma(c(0.5, 0.0)).unwrap().re - PI.sqrt().ln()).abs() < 1e-13);
        assert!((ln_gamma(c(5.0, 0.0)).unwrap().re - 24f64.ln()).abs() < 1e-14);
        assert!((ln_gamma(c(1.0, 0.0)).unwrap()).norm() < 1e-15);
        assert!(ln_gamma(c(-3.0, 0.0)).is_err());
        assert!(ln_gamma(c(0.0, 0.0)).is_err());
    }

    #[test]
    fn euler_constant() {
        assert!((euler_gamma() - 0.577_215_664_901_532_9).abs() < 1e-15);
    }

    #[test]
    fn digamma_values() {
        assert!((digamma(c(1.0, 0.0)).unwrap().re + euler_gamma()).abs() < 1e-14);
        assert!((digamma(c(0.5, 0.0)).unwrap().re + euler_gamma() + 2.0 * 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn zeta_values() {
        assert!((zeta(c(2.0, 0.0)).unwrap().re - PI * PI / 6.0).abs() < 1e-14);
        assert!((zeta(c(3.0, 0.0)).unwrap().re - 1.202_056_903_159_594_2).abs() < 1e-14);
        assert!((zeta(c(4.0, 0.0)).unwrap().re - PI.powi(4) / 90.0).abs() < 1e-14);
    }
}
