//! Mellin transform `ψ` of the smooth weight, vertical-line contour
//! machinery, and the Parseval / Mellin–Barnes / Bessel-kernel identities.

use std::f64::consts::{FRAC_2_PI, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::specfun::bessel::{bessel_k0, bessel_y0};
use crate::specfun::gamma::{digamma, gamma, ln_gamma};
use crate::specfun::quad::{integrate, integrate_breaks, oscillatory_tail};
use crate::specfun::weight::{ramp, SmoothWeight};

/// Vertical line `Re s = sigma`, truncated at `|Im s| ≤ t_max`, sampled with spacing `step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MellinLine {
    pub sigma: f64,
    pub t_max: f64,
    pub step: f64,
}

impl MellinLine {
    pub fn new(sigma: f64, t_max: f64, step: f64) -> Result<Self> {
        if !(t_max > 0.0 && step > 0.0 && step < t_max && sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!("bad line sigma={sigma}, t_max={t_max}, step={step}")));
        }
        Ok(Self { sigma, t_max, step })
    }

    /// Height beyond which `|ψ(σ + it)| < tol · |ψ(σ)|`.
    ///
    /// The ramp profile is Gevrey class 2, so `ψ` decays like
    /// `exp(-c·sqrt(t H / X))`; the law below was fitted to sampled decay
    /// curves and errs on the long side.
    pub fn decay_t_max(w: &SmoothWeight, tol: f64) -> f64 {
        let l = (1.0 / tol.clamp(1e-300, 0.5)).ln() / 1.4;
        (w.x / w.h) * l * l
    }

    /// Line for the weight `w` at target relative tolerance `tol`.
    pub fn for_weight(sigma: f64, w: &SmoothWeight, tol: f64) -> Self {
        let step = 0.25f64.min(1.0 / (2.0 * w.x.ln()));
        Self { sigma, t_max: Self::decay_t_max(w, tol), step }
    }
}

/// `ψ(s) = ∫ w(x) x^{s-1} dx`.
///
/// For `|s| ≥ 1/2` uses `ψ(s) = -(1/s) ∫ w'(x) x^s dx`, whose integrand lives
/// on the two ramps only; otherwise the plateau is integrated in closed form.
pub fn mellin_psi(s: Complex64, w: &SmoothWeight) -> Result<Complex64> {
    let (h, x) = (w.h, w.x);
    let osc = (s.im.abs() * 2f64.ln() / (2.0 * PI)).ceil().max(1.0) as usize;
    let breaks: Vec<f64> = (0..=4 * osc).map(|i| i as f64 / (4 * osc) as f64).collect();
    let scale = x.powf(s.re.max(0.0)) * h.powf(s.re.min(0.0)) * 1e-13;
    if s.norm() >= 0.5 {
        let left = |t: f64| ramp(t).1 * (s * (h * (1.0 + t)).ln()).exp();
        let right = |t: f64| ramp(t).1 * (s * (x - h * t).ln()).exp();
        let a = integrate_breaks(left, &breaks, scale, 1e-13, 20_000)?;
        let b = integrate_breaks(right, &breaks, scale, 1e-13, 20_000)?;
        return Ok(-(a.value - b.value) / s);
    }
    // plateau [2H, X-H] in closed form
    let (lo, hi) = ((2.0 * h).ln(), (x - h).ln());
    let plateau = if s.norm() < 1e-300 { Complex64::new(hi - lo, 0.0) } else { ((s * hi).exp() - (s * lo).exp()) / s };
    let left = |t: f64| ramp(t).0 * (s * (h * (1.0 + t)).ln()).exp() / (1.0 + t);
    let right = |t: f64| ramp(t).0 * (s * (x - h * t).ln()).exp() / (x - h * t) * h;
    let a = integrate_breaks(left, &breaks, scale, 1e-13, 20_000)?;
    let b = integrate_breaks(right, &breaks, scale, 1e-13, 20_000)?;
    Ok(plateau + a.value + b.value)
}

/// Fast evaluation of `ψ(a - it)` on an arithmetic progression of `t`,
/// by the trapezoidal rule in `v = log x` (spectrally accurate: the
/// integrand is smooth and compactly supported).
#[derive(Debug, Clone)]
pub struct PsiSampler {
    v: Vec<f64>,
    g: Vec<f64>,
}

impl PsiSampler {
    /// Sampler for `t ∈ [0, t_max]` at real part `a`.
    pub fn new(w: &SmoothWeight, a: f64, t_max: f64) -> Self {
        let (lo, hi) = (w.h.ln(), w.x.ln());
        let dv_target = (w.h / w.x / 200.0).min(PI / (2.0 * t_max.max(1.0)));
        let n = ((hi - lo) / dv_target).ceil() as usize;
        let dv = (hi - lo) / n as f64;
        let mut v = Vec::with_capacity(n);
        let mut g = Vec::with_capacity(n);
        for j in 1..n {
            let vj = lo + j as f64 * dv;
            let wv = w.value(vj.exp());
            if wv != 0.0 {
                v.push(vj);
                g.push(dv * wv * (a * vj).exp());
            }
        }
        Self { v, g }
    }

    /// `ψ(a - i·j·h)` for `j = 0..count`.
    pub fn line_values(&self, h: f64, count: usize) -> Vec<Complex64> {
        let m = self.v.len();
        let rot: Vec<Complex64> = self.v.iter().map(|&v| Complex64::from_polar(1.0, -h * v)).collect();
        let mut z = vec![Complex64::new(1.0, 0.0); m];
        let mut out = Vec::with_capacity(count);
        for j in 0..count {
            if j % 256 == 0 && j > 0 {
                let t = j as f64 * h;
                for (zi, &v) in z.iter_mut().zip(&self.v) {
                    *zi = Complex64::from_polar(1.0, -t * v);
                }
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..m {
                acc += z[i] * self.g[i];
                z[i] *= rot[i];
            }
            out.push(acc);
        }
        out
    }
}

/// Trapezoidal step for an integrand that is analytic in a strip of
/// half-width `dist` around the line and whose phase varies at rate `rate`.
pub fn contour_step(cap: f64, rate: f64, dist: f64) -> f64 {
    cap.min(2.0 * PI / (rate + 37.5 / dist.max(1e-3)))
}

/// `(1/2πi) ∫_{(σ)} ψ(s) ψ(1-s) ds`, which equals `∫ w(x)^2 dx`.
pub fn parseval_contour(w: &SmoothWeight, line: &MellinLine) -> Result<f64> {
    let rate = 2.0 * w.x.ln() + 2.0;
    let h = contour_step(line.step, rate, 1.0);
    let count = (line.t_max / h).ceil() as usize + 1;
    // ψ(σ + it) = conj ψ(σ - it); ψ(1 - σ - it)
    let a = PsiSampler::new(w, line.sigma, line.t_max).line_values(h, count);
    let b = PsiSampler::new(w, 1.0 - line.sigma, line.t_max).line_values(h, count);
    let f: Vec<Complex64> = a.iter().zip(&b).map(|(p, q)| p.conj() * q).collect();
    check_tail(&f, line.t_max)?;
    let mut sum = 0.5 * f[0].re;
    for v in &f[1..] {
        sum += v.re;
    }
    Ok(h * sum / PI)
}

/// Errors when the last tenth of the sampled integrand is not negligible.
pub(crate) fn check_tail(f: &[Complex64], t_max: f64) -> Result<()> {
    let peak = f.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let start = f.len() - f.len() / 10;
    let tail = f[start..].iter().map(|v| v.norm()).fold(0.0, f64::max);
    if tail > 1e-9 * peak {
        return Err(Error::Truncation { suggested_t_max: 2.0 * t_max });
    }
    Ok(())
}

/// Outcome of a two-sided identity check.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub diff: f64,
}

fn mb_kernel(s: Complex64, lambda: Complex64, a: f64, b: f64) -> Result<Complex64> {
    let l = ln_gamma(-s)? + ln_gamma(lambda + s)? - ln_gamma(lambda)? + s * a.ln() - (lambda + s) * b.ln();
    Ok(l.exp())
}

/// Checks `(A+B)^{-λ} = (1/2πi) ∫_{(c)} Γ(-s)Γ(λ+s)/Γ(λ) A^s B^{-λ-s} ds`
/// (`log_variant = false`) or the same for `log(A+B)(A+B)^{-λ}`, whose
/// integrand carries the extra factor `ψ₀(λ) - ψ₀(λ+s) + log B`.
pub fn mellin_barnes_check(a: f64, b: f64, lambda: Complex64, c: f64, log_variant: bool) -> Result<IdentityCheck> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::InvalidArgument("A and B must be positive".into()));
    }
    if !(-lambda.re < c && c < 0.0) {
        return Err(Error::InvalidArgument(format!("contour c = {c} must satisfy -Re(λ) < c < 0")));
    }
    let d = (c + lambda.re).min(-c);
    let h = d / 6.0;
    let t_max = 40.0 + (a / b).ln().abs();
    let n = (t_max / h).ceil() as i64;
    let psi_l = digamma(lambda)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in -n..=n {
        let s = Complex64::new(c, j as f64 * h);
        let mut v = mb_kernel(s, lambda, a, b)?;
        if log_variant {
            v *= psi_l - digamma(lambda + s)? + b.ln();
        }
        acc += v;
    }
    let rhs = acc * h / (2.0 * PI);
    let base = Complex64::new(a + b, 0.0).powc(-lambda);
    let lhs = if log_variant { base * (a + b).ln() } else { base };
    Ok(IdentityCheck { lhs: lhs.re, rhs: rhs.re, diff: (lhs - rhs).norm() })
}

/// `∫_0^∞ K_0(x) x^{s-1} dx` by the trapezoidal rule in `v = log x`.
pub fn mellin_k0_numeric(s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::InvalidArgument("Mellin transform of K_0 needs s > 0".into()));
    }
    let dv = 0.02;
    let lo = -(45.0 / s + 10.0);
    let n = ((6.0 - lo) / dv).ceil() as usize;
    let mut sum = 0.0;
    for j in 0..=n {
        let v = lo + j as f64 * dv;
        sum += bessel_k0(v.exp()) * (s * v).exp();
    }
    Ok(sum * dv)
}

/// `2^{s-2} Γ(s/2)^2`.
pub fn mellin_k0_closed(s: f64) -> Result<f64> {
    Ok((2f64.powf(s - 2.0) * gamma(Complex64::new(s / 2.0, 0.0))?.powi(2)).re)
}

/// `-(2^{s-1}/π) cos(πs/2) Γ(s/2)^2`.
pub fn mellin_y0_closed(s: f64) -> Result<f64> {
    Ok((-(2f64.powf(s - 1.0) / PI) * (PI * s / 2.0).cos() * gamma(Complex64::new(s / 2.0, 0.0))?.powi(2)).re)
}

/// `∫_0^∞ Y_0(x) x^{s-1} dx` for `0 < s < 3/2`: log-variable quadrature on
/// `(0, 1]`, order-15 panels on `[1, T]`, Hankel-series tail beyond `T`.
pub fn mellin_y0_numeric(s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.5) {
        return Err(Error::InvalidArgument("Mellin transform of Y_0 converges for 0 < s < 3/2".into()));
    }
    let lo = -(45.0 / s + 10.0);
    let near = integrate(|v: f64| bessel_y0(v.exp()) * (s * v).exp(), lo, 0.0, 1e-15, 1e-14, 5000)?.value;
    let t = 1000.0 * PI + PI / 4.0;
    let breaks: Vec<f64> = std::iter::once(1.0).chain((1..=1000).map(|k| k as f64 * PI + PI / 4.0)).collect();
    let mid = integrate_breaks(|x: f64| bessel_y0(x) * x.powf(s - 1.0), &breaks, 1e-14, 0.0, 20_000)?.value;
    // Y_0 = Im H_0^{(1)}, H_0^{(1)}(x) = sqrt(2/(πx)) e^{i(x-π/4)} Σ_k i^k a_k x^{-k}
    let mut tail = Complex64::new(0.0, 0.0);
    let mut ak = 1.0f64;
    let i = Complex64::new(0.0, 1.0);
    for k in 0..12u32 {
        if k > 0 {
            let odd = (2 * k - 1) as f64;
            ak *= -odd * odd / (8.0 * k as f64);
        }
        tail += i.powu(k) * ak * oscillatory_tail(1.5 - s + k as f64, t);
    }
    tail *= Complex64::from_polar(FRAC_2_PI.sqrt(), -PI / 4.0);
    Ok(near + mid + tail.im)
}

/// `∫ w(x)^2 dx` by adaptive quadrature over the two ramps.
pub fn weight_l2(w: &SmoothWeight) -> Result<f64> {
    let left = integrate(|t: f64| ramp(t).0.powi(2), 0.0, 1.0, 1e-15, 0.0, 1000)?.value;
    Ok(w.h * 2.0 * left + (w.x - 3.0 * w.h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_at_one_and_two() {
        let w = SmoothWeight::new(500.0, 2000.0).unwrap();
        let p1 = mellin_psi(Complex64::new(1.0, 0.0), &w).unwrap();
        assert!((p1.re - 1000.0).abs() < 1e-9 * 2000.0 && p1.im.abs() < 1e-9);
        let p2 = mellin_psi(Complex64::new(2.0, 0.0), &w).unwrap().re;
        assert!(p2 <= 2000.0f64.powi(2) / 2.0 && p2 >= 1500.0f64.powi(2) / 2.0 - 1000.0f64.powi(2) / 2.0);
    }

    #[test]
    fn psi_reference_values() {
        // mpmath quadrature at 30 digits
        let w = SmoothWeight::new(100.0, 1000.0).unwrap();
        let cases = [
            (Complex64::new(0.2, 0.3), Complex64::new(-1.341_735_075_774_524_6, 5.864_090_525_151_187_9)),
            (Complex64::new(0.5, 0.0), Complex64::new(37.183_877_566_033_474, 0.0)),
            (Complex64::new(0.75, -100.0), Complex64::new(0.161_298_021_349_758_58, 0.124_834_468_843_134_87)),
        ];
        for (s, want) in cases {
            let got = mellin_psi(s, &w).unwrap();
            assert!((got - want).norm() < 1e-10 * want.norm().max(1e-3 * 1000f64.powf(s.re)), "{s}: {got}");
        }
    }

    #[test]
    fn sampler_matches_adaptive() {
        let w = SmoothWeight::new(500.0, 2000.0).unwrap();
        let sampler = PsiSampler::new(&w, 0.75, 2000.0);
        let vals = sampler.line_values(0.5, 600);
        for &j in &[0usize, 1, 20, 333, 599] {
            let exact = mellin_psi(Complex64::new(0.75, -(j as f64) * 0.5), &w).unwrap();
            assert!((vals[j] - exact).norm() < 1e-11 * 2000f64.powf(0.75), "j={j}");
        }
    }

    #[test]
    fn mellin_barnes_small() {
        let r = mellin_barnes_check(1.0, 1.0, Complex64::new(1.0, 0.0), -0.5, false).unwrap();
        assert!((r.lhs - 0.5).abs() < 1e-15 && r.diff < 1e-10);
        let r = mellin_barnes_check(1.0, 1.0, Complex64::new(1.0, 0.0), -0.5, true).unwrap();
        assert!((r.lhs - 2f64.ln() / 2.0).abs() < 1e-15 && r.diff < 1e-10);
        assert!(mellin_barnes_check(1.0, 1.0, Complex64::new(1.0, 0.0), 0.5, false).is_err());
    }
}
