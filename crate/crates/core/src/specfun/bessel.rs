//! Bessel functions `J_n` (integer order), `Y_0` and `K_0` for `x > 0`.
//!
//! Regimes:
//! * `x ≤ 2`: power series (for `Y_0`, `K_0` the logarithmic series).
//! * `J_n`, `Y_0` on `2 < x < x_asym(n)`: Miller backward recurrence,
//!   normalized by `J_0 + 2Σ J_{2k} = 1`; `Y_0` from the Neumann series.
//! * `x ≥ x_asym(n) = max(25, n²/2)`: Hankel asymptotic expansion.
//! * `K_0` on `x > 2`: trapezoidal rule for `∫_0^∞ e^{-x cosh t} dt`.

use std::f64::consts::{FRAC_2_PI, PI};

use crate::error::{Error, Result};
use crate::specfun::gamma::euler_gamma;

const SERIES_MAX: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselKind {
    J,
    Y0,
    K0,
}

/// Start of the asymptotic regime for order `n`.
pub fn asymptotic_crossover(n: u32) -> f64 {
    25f64.max(0.5 * (n as f64) * (n as f64))
}

/// Dispatch by kind; `order` is used for `J` only.
pub fn bessel(kind: BesselKind, order: u32, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::OutOfRange(format!("Bessel argument x = {x} must be positive")));
    }
    Ok(match kind {
        BesselKind::J => bessel_j(order, x),
        BesselKind::Y0 => bessel_y0(x),
        BesselKind::K0 => bessel_k0(x),
    })
}

/// Hankel `P, Q` sums for order `nu` at `x`.
pub fn hankel_pq(nu: f64, x: f64) -> (f64, f64) {
    let mu = 4.0 * nu * nu;
    let (mut p, mut q) = (1.0, 0.0);
    let mut term = 1.0f64;
    let mut prev = f64::INFINITY;
    for k in 1..80 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (8.0 * k as f64 * x);
        let mag = term.abs();
        if mag == 0.0 || mag > prev {
            break;
        }
        // i^k a_k / x^k split into real (P) and imaginary (Q) parts
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        prev = mag;
        if mag < 1e-17 {
            break;
        }
    }
    (p, q)
}

fn hankel_j(nu: f64, x: f64) -> f64 {
    let (p, q) = hankel_pq(nu, x);
    let chi = x - (0.5 * nu + 0.25) * PI;
    (FRAC_2_PI / x).sqrt() * (p * chi.cos() - q * chi.sin())
}

fn hankel_y(nu: f64, x: f64) -> f64 {
    let (p, q) = hankel_pq(nu, x);
    let chi = x - (0.5 * nu + 0.25) * PI;
    (FRAC_2_PI / x).sqrt() * (p * chi.sin() + q * chi.cos())
}

fn series_j(n: u32, x: f64) -> f64 {
    let h = 0.5 * x;
    let mut t = 1.0;
    for i in 1..=n {
        t *= h / i as f64;
    }
    let mut sum = t;
    let h2 = h * h;
    for m in 1..100 {
        t *= -h2 / (m as f64 * (m + n) as f64);
        sum += t;
        if t.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Miller recurrence: `(J_n(x), J_0(x), Σ_{k≥1} (-1)^k J_{2k}(x)/k)`.
fn miller(n: u32, x: f64) -> (f64, f64, f64) {
    let top = (n as f64).max(x);
    let mut m = (top + 20.0 + (40.0 * top).sqrt()) as usize;
    m += m % 2;
    let (mut fp, mut f) = (0.0f64, 1e-30f64);
    let (mut jn, mut norm, mut neumann) = (0.0, 0.0, 0.0);
    if m == n as usize {
        jn = f;
    }
    let mut k = m;
    while k >= 1 {
        // f holds f_k, fp holds f_{k+1}
        let fm = (2.0 * k as f64 / x) * f - fp;
        fp = f;
        f = fm;
        k -= 1;
        if k == n as usize {
            jn = f;
        }
        if k > 0 && k % 2 == 0 {
            norm += 2.0 * f;
            let sgn = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            neumann += sgn * f / (k / 2) as f64;
        }
        if f.abs() > 1e250 {
            f *= 1e-250;
            fp *= 1e-250;
            jn *= 1e-250;
            norm *= 1e-250;
            neumann *= 1e-250;
        }
    }
    norm += f;
    (jn / norm, f / norm, neumann / norm)
}

/// `J_n(x)`.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    if x <= SERIES_MAX {
        series_j(n, x)
    } else if x < asymptotic_crossover(n) {
        miller(n, x).0
    } else {
        hankel_j(n as f64, x)
    }
}

/// `Y_0(x)`.
pub fn bessel_y0(x: f64) -> f64 {
    let g = euler_gamma();
    if x <= SERIES_MAX {
        let h2 = 0.25 * x * x;
        let (mut t, mut j0, mut s) = (1.0f64, 1.0f64, 0.0f64);
        let mut hm = 0.0;
        for m in 1..60 {
            t *= -h2 / (m as f64 * m as f64);
            hm += 1.0 / m as f64;
            j0 += t;
            s -= hm * t;
            if t.abs() < 1e-18 {
                break;
            }
        }
        FRAC_2_PI * (((0.5 * x).ln() + g) * j0 + s)
    } else if x < asymptotic_crossover(0) {
        let (_, j0, neumann) = miller(0, x);
        FRAC_2_PI * (((0.5 * x).ln() + g) * j0 - 2.0 * neumann)
    } else {
        hankel_y(0.0, x)
    }
}

/// `e^x K_0(x)`, finite for all `x > 0`.
pub fn bessel_k0_scaled(x: f64) -> f64 {
    if x <= SERIES_MAX {
        return bessel_k0(x) * x.exp();
    }
    let h = 0.125;
    let mut sum = 0.5;
    let mut j = 1;
    loop {
        let t = j as f64 * h;
        let v = (-x * (t.cosh() - 1.0)).exp();
        sum += v;
        if v < 1e-18 * sum {
            break;
        }
        j += 1;
    }
    h * sum
}

/// `K_0(x)`.
pub fn bessel_k0(x: f64) -> f64 {
    if x <= SERIES_MAX {
        let h2 = 0.25 * x * x;
        let (mut t, mut i0, mut s) = (1.0f64, 1.0f64, 0.0f64);
        let mut hm = 0.0;
        for m in 1..60 {
            t *= h2 / (m as f64 * m as f64);
            hm += 1.0 / m as f64;
            i0 += t;
            s += hm * t;
            if t < 1e-18 * i0 {
                break;
            }
        }
        -((0.5 * x).ln() + euler_gamma()) * i0 + s
    } else {
        bessel_k0_scaled(x) * (-x).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn reference_values() {
        // mpmath, 20 digits
        assert!(rel(bessel_j(0, 1.0), 0.765_197_686_557_966_55) < 1e-14);
        assert!(rel(bessel_j(1, 1.0), 0.440_050_585_744_933_52) < 1e-14);
        assert!(rel(bessel_y0(1.0), 0.088_256_964_215_676_956) < 1e-13);
        assert!(rel(bessel_k0(1.0), 0.421_024_438_240_708_33) < 1e-14);
    }

    #[test]
    fn small_argument_limits() {
        let x = 1e-2f64;
        let lead = (0.5 * x).powi(11) / 39_916_800.0;
        // the second series term is x²/48 ≈ 2.1e-6 relative to the first
        assert!(rel(bessel_j(11, x), lead) < 2.2e-6);
        assert!(rel(bessel_j(11, x), lead * (1.0 - x * x / 48.0)) < 1e-11);
        let d = bessel_y0(1e-4) - FRAC_2_PI * 1e-4f64.ln();
        assert!(d.abs() < 1.0);
        assert!(bessel(BesselKind::K0, 0, 0.0).is_err());
    }
}
