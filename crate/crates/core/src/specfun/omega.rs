//! The transforms `ω_B(α) = c_B ∫ w(x) B(4πα√x) dx` for
//! `B ∈ {J_{k-1}, Y_0, K_0}`: direct quadrature, inverse-Mellin contour, and a
//! tabulated interpolant for bulk evaluation.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::specfun::bessel::{bessel_j, bessel_k0, bessel_y0};
use crate::specfun::kernels::{gamma_quotient, i_pow, GammaQuotient};
use crate::specfun::mellin::{check_tail, contour_step, MellinLine, PsiSampler};
use crate::specfun::quad::panel;
use crate::specfun::weight::SmoothWeight;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OmegaKind {
    /// `2π i^k ∫ w(x) J_{k-1}(4πα√x) dx`
    J { k: u32 },
    /// `-2π ∫ w(x) Y_0(4πα√x) dx`
    Y,
    /// `4 ∫ w(x) K_0(4πα√x) dx`
    K,
}

impl OmegaKind {
    /// The discriminant form Δ has weight 12.
    pub const CUSP: OmegaKind = OmegaKind::J { k: 12 };

    pub fn constant(&self) -> Complex64 {
        match *self {
            OmegaKind::J { k } => 2.0 * PI * i_pow(k),
            OmegaKind::Y => Complex64::new(-2.0 * PI, 0.0),
            OmegaKind::K => Complex64::new(4.0, 0.0),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            OmegaKind::J { k } if k < 2 => Err(Error::InvalidArgument(format!("weight k = {k} < 2"))),
            _ => Ok(()),
        }
    }

    /// Bessel order (0 for `Y`, `K`).
    pub fn order(&self) -> u32 {
        match *self {
            OmegaKind::J { k } => k - 1,
            _ => 0,
        }
    }

    pub fn bessel(&self, z: f64) -> f64 {
        match *self {
            OmegaKind::J { k } => bessel_j(k - 1, z),
            OmegaKind::Y => bessel_y0(z),
            OmegaKind::K => bessel_k0(z),
        }
    }

    /// Mellin kernel of `α ↦ ω(√α)`: `F` for `J`, `G` for `Y`, `2H` for `K`.
    pub fn kernel(&self, s: Complex64) -> Result<Complex64> {
        match *self {
            OmegaKind::J { k } => gamma_quotient(GammaQuotient::F, s, k),
            OmegaKind::Y => gamma_quotient(GammaQuotient::G, s, 0),
            OmegaKind::K => Ok(2.0 * gamma_quotient(GammaQuotient::H, s, 0)?),
        }
    }

    /// Distance from the line `Re s = sigma` to the nearest kernel pole;
    /// non-positive when the line is outside the validity half-plane.
    pub fn pole_distance(&self, sigma: f64) -> f64 {
        match *self {
            OmegaKind::J { k } => sigma + (k as f64 - 1.0) / 2.0,
            _ => sigma,
        }
    }

    fn phase(&self) -> Complex64 {
        match *self {
            OmegaKind::J { k } => i_pow(k),
            _ => Complex64::new(1.0, 0.0),
        }
    }
}

/// `∫ w(x) B(4πα√x) dx` as `∫ 2u w(u²) B(4παu) du`, split into half-period
/// panels (capped at a sixteenth of the range) with local GK15 refinement.
/// Returns `(value, error estimate)`.
fn bessel_integral(kind: OmegaKind, alpha: f64, w: &SmoothWeight) -> Result<(f64, f64)> {
    let (a, b) = (w.h.sqrt(), w.x.sqrt());
    let f = |u: f64| 2.0 * u * w.value(u * u) * kind.bessel(4.0 * PI * alpha * u);
    let width = (0.25 / alpha).min((b - a) / 16.0);
    let pieces = [a, (2.0 * w.h).sqrt(), (w.x - w.h).sqrt(), b];
    let budget = 1e-11 * w.x;
    let total_panels: f64 = pieces.windows(2).map(|p| ((p[1] - p[0]) / width).ceil()).sum();
    let tol = budget / total_panels;
    let (mut sum, mut err) = (0.0, 0.0);
    for p in pieces.windows(2) {
        let n = ((p[1] - p[0]) / width).ceil().max(1.0) as usize;
        let step = (p[1] - p[0]) / n as f64;
        for i in 0..n {
            let lo = p[0] + i as f64 * step;
            let (v, e) = panel(&f, lo, lo + step, tol, 12);
            sum += v;
            err += e;
        }
    }
    if err > 100.0 * budget {
        return Err(Error::Quadrature { achieved: err, requested: budget });
    }
    Ok((sum, err))
}

/// `ω_B(α)` by direct quadrature.
pub fn omega_direct(kind: OmegaKind, alpha: f64, w: &SmoothWeight) -> Result<Complex64> {
    kind.validate()?;
    if !(alpha > 0.0) {
        return Err(Error::InvalidArgument(format!("alpha = {alpha} must be positive")));
    }
    Ok(kind.constant() * bessel_integral(kind, alpha, w)?.0)
}

/// Real form of [`omega_direct`] for kinds with a real constant (even `k`).
pub fn omega_direct_real(kind: OmegaKind, alpha: f64, w: &SmoothWeight) -> Result<f64> {
    let c = kind.constant();
    if c.im != 0.0 {
        return Err(Error::InvalidArgument("kernel constant is not real (odd weight)".into()));
    }
    if !(alpha > 0.0) {
        return Err(Error::InvalidArgument(format!("alpha = {alpha} must be positive")));
    }
    Ok(c.re * bessel_integral(kind, alpha, w)?.0)
}

/// Samples of `K(s) ψ(1-s)` along a vertical line, reusable for many `α`.
#[derive(Debug, Clone)]
pub struct OmegaContour {
    pub kind: OmegaKind,
    pub line: MellinLine,
    /// effective trapezoidal step
    pub step: f64,
    coeffs: Vec<Complex64>,
}

impl OmegaContour {
    /// `max_abs_log_alpha` bounds `|log α|` over the intended evaluations.
    pub fn new(kind: OmegaKind, w: &SmoothWeight, line: MellinLine, max_abs_log_alpha: f64) -> Result<Self> {
        kind.validate()?;
        let dist = kind.pole_distance(line.sigma);
        if !(dist > 0.0) {
            return Err(Error::InvalidArgument(format!("sigma = {} outside the validity half-plane", line.sigma)));
        }
        let rate = 2.0 * (line.t_max / (2.0 * PI)).ln().max(0.0) + 2.0 + w.x.ln() + max_abs_log_alpha + 2.0;
        let step = contour_step(line.step, rate, dist);
        let count = (line.t_max / step).ceil() as usize + 1;
        let psi = PsiSampler::new(w, 1.0 - line.sigma, line.t_max).line_values(step, count);
        let phase = kind.phase();
        let coeffs = psi
            .iter()
            .enumerate()
            .map(|(j, p)| Ok(kind.kernel(Complex64::new(line.sigma, j as f64 * step))? / phase * p))
            .collect::<Result<Vec<_>>>()?;
        check_tail(&coeffs, line.t_max)?;
        Ok(Self { kind, line, step, coeffs })
    }

    /// `ω(√α) = (1/2πi) ∫ K(s) ψ(1-s) α^{-s} ds`.
    pub fn eval(&self, alpha: f64) -> Result<Complex64> {
        if !(alpha > 0.0) {
            return Err(Error::InvalidArgument(format!("alpha = {alpha} must be positive")));
        }
        let la = alpha.ln();
        let rot = Complex64::from_polar(1.0, -self.step * la);
        let mut z = Complex64::new(1.0, 0.0);
        let mut sum = 0.5 * self.coeffs[0].re;
        for (j, c) in self.coeffs.iter().enumerate().skip(1) {
            z = if j % 256 == 0 { Complex64::from_polar(1.0, -(j as f64) * self.step * la) } else { z * rot };
            sum += (c * z).re;
        }
        let scale = (-self.line.sigma * la).exp() * self.step / PI;
        Ok(self.kind.phase() * (sum * scale))
    }
}

/// `ω_B(√α)` through the inverse Mellin integral on `line`.
pub fn omega_mellin(kind: OmegaKind, alpha: f64, w: &SmoothWeight, line: &MellinLine) -> Result<Complex64> {
    OmegaContour::new(kind, w, *line, alpha.ln().abs())?.eval(alpha)
}

/// Hankel coefficients `a_j(ν)` up to the point where `|a_j| z0^{-j} < 1e-17`.
fn hankel_coefficients(nu: f64, z0: f64) -> Vec<f64> {
    let mu = 4.0 * nu * nu;
    let mut a = vec![1.0f64];
    let mut bound = 1.0f64;
    for j in 1..60 {
        let odd = (2 * j - 1) as f64;
        let next = a[j - 1] * (mu - odd * odd) / (8.0 * j as f64);
        bound *= ((mu - odd * odd) / (8.0 * j as f64 * z0)).abs();
        if next == 0.0 {
            break;
        }
        a.push(next);
        if bound < 1e-17 {
            break;
        }
    }
    a
}

/// `ω_B` sampled on a uniform grid `β_m = m·δ` and interpolated with
/// 8-point Lagrange stencils.
///
/// Small `β` are computed by direct quadrature. Where `4πβ√H` exceeds the
/// Hankel regime start, each term of the asymptotic expansion of `B` turns
/// the integral into a Fourier transform of a compactly supported smooth
/// function; all grid points are then obtained from one FFT per term.
#[derive(Debug, Clone)]
pub struct OmegaTable {
    pub kind: OmegaKind,
    pub weight: SmoothWeight,
    pub delta: f64,
    values: Vec<f64>,
    /// `max |ω|` over the grid
    pub peak: f64,
    /// beyond this `β`, `|ω| < eps · peak`
    pub cutoff: f64,
    direct_below: f64,
}

impl OmegaTable {
    /// Table on `[0, beta_max]` (shortened to the decay point for `K`).
    pub fn build(kind: OmegaKind, w: &SmoothWeight, beta_max: f64, eps: f64) -> Result<Self> {
        kind.validate()?;
        let c = kind.constant();
        if c.im != 0.0 {
            return Err(Error::InvalidArgument("tables need a real kernel constant (even weight)".into()));
        }
        let (sh, sx) = (w.h.sqrt(), w.x.sqrt());
        let delta_target = 1.0 / (32.0 * sx);
        if kind == OmegaKind::K {
            return Self::build_direct(kind, w, delta_target, beta_max, eps);
        }
        let nu = kind.order() as f64;
        let z0 = 30f64.max(nu * nu / 2.0);
        let beta_direct = z0 / (4.0 * PI * sh);
        if beta_max <= beta_direct {
            return Self::build_direct(kind, w, delta_target, beta_max, eps);
        }
        let l_min = ((2.0 * w.h).sqrt() - sh).min(sx - (w.x - w.h).sqrt());
        let m_pts = ((sx - sh) / (l_min / 300.0)).ceil() as usize + 1;
        let du = (sx - sh) / (m_pts - 1) as f64;
        let n_fft = ((1.0 / (2.0 * du * delta_target)).ceil() as usize).max(2 * m_pts).next_power_of_two();
        let delta = 1.0 / (2.0 * n_fft as f64 * du);
        let beta_max = beta_max.min(0.9 / (4.0 * du));
        let m_max = (beta_max / delta).ceil() as usize + 8;
        let m_direct = ((beta_direct / delta).ceil() as usize + 4).min(m_max);

        let mut values = vec![0.0f64; m_max + 1];
        values[0] = if matches!(kind, OmegaKind::J { .. }) { 0.0 } else { f64::NAN };
        for (m, v) in values.iter_mut().enumerate().take(m_direct + 1).skip(1) {
            *v = c.re * bessel_integral(kind, m as f64 * delta, w)?.0;
        }

        let coeffs = hankel_coefficients(nu, z0);
        let fft = FftPlanner::<f64>::new().plan_fft_inverse(n_fft);
        let u: Vec<f64> = (0..m_pts).map(|j| sh + j as f64 * du).collect();
        let f: Vec<f64> = u.iter().map(|&u| 2.0 * u * w.value(u * u)).collect();
        let mut acc = vec![Complex64::new(0.0, 0.0); m_max + 1];
        let mut buf = vec![Complex64::new(0.0, 0.0); n_fft];
        for (k, &ak) in coeffs.iter().enumerate() {
            buf.iter_mut().for_each(|b| *b = Complex64::new(0.0, 0.0));
            for j in 0..m_pts {
                buf[j] = Complex64::new(f[j] * u[j].powf(-0.5 - k as f64), 0.0);
            }
            fft.process(&mut buf);
            let ik = i_pow(k as u32) * ak;
            for m in m_direct..=m_max {
                let kappa = 4.0 * PI * m as f64 * delta;
                acc[m] += ik * kappa.powi(-(k as i32)) * buf[m];
            }
        }
        let phi = nu * PI / 2.0 + PI / 4.0;
        for m in (m_direct + 1)..=m_max {
            let kappa = 4.0 * PI * m as f64 * delta;
            let integral = acc[m] * du * Complex64::from_polar(1.0, kappa * sh - phi);
            let part = if kind == OmegaKind::Y { integral.im } else { integral.re };
            values[m] = c.re * (2.0 / (PI * kappa)).sqrt() * part;
        }
        Ok(Self::finish(kind, w, delta, values, eps, beta_direct))
    }

    fn build_direct(kind: OmegaKind, w: &SmoothWeight, delta: f64, beta_max: f64, eps: f64) -> Result<Self> {
        let c = kind.constant().re;
        let mut values = vec![if matches!(kind, OmegaKind::J { .. }) { 0.0 } else { f64::NAN }];
        let mut peak = 0.0f64;
        let mut quiet = 0;
        let mut m = 1;
        loop {
            let beta = m as f64 * delta;
            let v = c * bessel_integral(kind, beta, w)?.0;
            peak = peak.max(v.abs());
            values.push(v);
            quiet = if v.abs() < eps * peak { quiet + 1 } else { 0 };
            if beta > beta_max + 8.0 * delta || (kind == OmegaKind::K && quiet > 16) {
                break;
            }
            m += 1;
        }
        Ok(Self::finish(kind, w, delta, values, eps, f64::INFINITY))
    }

    fn finish(kind: OmegaKind, w: &SmoothWeight, delta: f64, values: Vec<f64>, eps: f64, direct_below: f64) -> Self {
        let peak = values.iter().filter(|v| v.is_finite()).fold(0.0f64, |a, v| a.max(v.abs()));
        let last = values.iter().rposition(|v| v.abs() >= eps * peak).unwrap_or(0);
        let cutoff = ((last + 1) as f64 * delta).min((values.len() - 9) as f64 * delta);
        Self { kind, weight: *w, delta, values, peak, cutoff, direct_below }
    }

    /// Largest `β` covered by the grid.
    pub fn beta_max(&self) -> f64 {
        (self.values.len() - 9) as f64 * self.delta
    }

    /// Whether the table reaches the point where `|ω|` fell below `eps · peak`.
    pub fn is_resolved(&self) -> bool {
        self.cutoff < self.beta_max() - self.delta
    }

    /// `∫_{β0}^∞ ω(β)^2 2β dβ` from the grid samples (zero past the cutoff).
    pub fn mass_beyond(&self, beta0: f64) -> f64 {
        let m0 = ((beta0 / self.delta).ceil() as usize).max(1);
        let mut s = 0.0;
        for m in m0..self.values.len() {
            let b = m as f64 * self.delta;
            if b > self.cutoff {
                break;
            }
            s += self.values[m] * self.values[m] * 2.0 * b * self.delta;
        }
        s
    }

    /// Whether [`OmegaTable::eval`] uses FFT-derived samples at `beta`.
    pub fn uses_asymptotic(&self, beta: f64) -> bool {
        beta > self.direct_below
    }

    /// `ω_B(β)`; zero beyond the table for `β > cutoff`, direct quadrature
    /// on the first sixteen grid cells where log-type singularities at 0
    /// spoil interpolation.
    pub fn eval(&self, beta: f64) -> Result<f64> {
        if !(beta > 0.0) {
            return Err(Error::InvalidArgument(format!("beta = {beta} must be positive")));
        }
        if beta > self.beta_max() {
            if beta > self.cutoff {
                return Ok(0.0);
            }
            return Err(Error::OutOfRange(format!("beta = {beta} beyond table range {}", self.beta_max())));
        }
        if beta < 16.0 * self.delta {
            return omega_direct_real(self.kind, beta, &self.weight);
        }
        let p = beta / self.delta;
        let i0 = (p.floor() as usize).saturating_sub(3).min(self.values.len() - 8);
        let x = p - i0 as f64;
        let mut s = 0.0;
        for j in 0..8 {
            let mut l = 1.0;
            for m in 0..8 {
                if m != j {
                    l *= (x - m as f64) / (j as f64 - m as f64);
                }
            }
            s += l * self.values[i0 + j];
        }
        Ok(s)
    }
}

/// `ω_B(√n / r)` for `n = 1, 2, ...` until a block of 64 consecutive values
/// stays below `max(eps · peak, abs_floor)` (after the peak) and `n ≥ n_floor`.
#[derive(Debug, Clone)]
pub struct DualValues {
    /// entry `n - 1` holds `ω(√n / r)`
    pub values: Vec<f64>,
    pub peak: f64,
    /// largest value in the final block, relative to `peak`
    pub last_block_ratio: f64,
    pub converged: bool,
}

pub fn dual_values(
    eval: impl Fn(f64) -> Result<f64>,
    r: f64,
    n_floor: usize,
    eps: f64,
    abs_floor: f64,
    n_limit: usize,
) -> Result<DualValues> {
    let mut values = Vec::new();
    let mut peak = 0.0f64;
    let mut peak_at = 0usize;
    loop {
        let start = values.len();
        let mut block_max = 0.0f64;
        for n in start + 1..=(start + 64).min(n_limit) {
            let v = eval((n as f64).sqrt() / r)?;
            if v.abs() > peak {
                peak = v.abs();
                peak_at = n;
            }
            block_max = block_max.max(v.abs());
            values.push(v);
        }
        let done = values.len() >= n_floor && peak_at <= start && block_max < (eps * peak).max(abs_floor);
        if done || values.len() >= n_limit {
            let ratio = if peak > 0.0 { block_max / peak } else { 0.0 };
            return Ok(DualValues { values, peak, last_block_ratio: ratio, converged: done });
        }
    }
}

/// Absolute noise level of direct quadrature, relative to `X`.
pub const DIRECT_NOISE: f64 = 1e-14;

/// Evaluation strategy for `ω_B` at many points.
#[derive(Debug, Clone)]
pub enum OmegaEval {
    /// quadrature at every point (small scales, highest accuracy)
    Direct { kind: OmegaKind, weight: SmoothWeight },
    /// interpolated table (large scales)
    Table(OmegaTable),
}

impl OmegaEval {
    pub fn direct(kind: OmegaKind, weight: &SmoothWeight) -> Self {
        OmegaEval::Direct { kind, weight: *weight }
    }

    pub fn kind(&self) -> OmegaKind {
        match self {
            OmegaEval::Direct { kind, .. } => *kind,
            OmegaEval::Table(t) => t.kind,
        }
    }

    pub fn weight(&self) -> &SmoothWeight {
        match self {
            OmegaEval::Direct { weight, .. } => weight,
            OmegaEval::Table(t) => &t.weight,
        }
    }

    pub fn eval(&self, beta: f64) -> Result<f64> {
        match self {
            OmegaEval::Direct { kind, weight } => omega_direct_real(*kind, beta, weight),
            OmegaEval::Table(t) => t.eval(beta),
        }
    }

    /// `ω(√n / r)` for `n = 1, 2, ...` until negligible (see [`dual_values`]);
    /// a table stops at its cutoff, and `converged` is false when `n_limit`
    /// cuts the sum short.
    pub fn dual(&self, r: f64, n_floor: usize, eps: f64, n_limit: usize) -> Result<DualValues> {
        match self {
            OmegaEval::Direct { weight, .. } => {
                dual_values(|b| self.eval(b), r, n_floor, eps, DIRECT_NOISE * weight.x, n_limit)
            }
            OmegaEval::Table(t) => {
                let n_end = ((r * t.cutoff).powi(2).ceil() as usize).max(n_floor);
                let n = n_end.min(n_limit);
                let values = (1..=n).map(|m| t.eval((m as f64).sqrt() / r)).collect::<Result<Vec<_>>>()?;
                let peak = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                let block = values[n.saturating_sub(64)..].iter().fold(0.0f64, |a, v| a.max(v.abs()));
                let ratio = if peak > 0.0 { block / peak } else { 0.0 };
                Ok(DualValues { values, peak, last_block_ratio: ratio, converged: n_end <= n_limit })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_transform_decays() {
        let w = SmoothWeight::new(500.0, 2000.0).unwrap();
        let v = omega_direct(OmegaKind::K, 10.0 / 500f64.sqrt(), &w).unwrap();
        assert!(v.norm() < 1e-6);
    }

    #[test]
    fn mellin_matches_direct_j() {
        let w = SmoothWeight::new(500.0, 2000.0).unwrap();
        let line = MellinLine::for_weight(0.25, &w, 1e-12);
        let a = omega_mellin(OmegaKind::CUSP, 4.0, &w, &line).unwrap();
        let d = omega_direct(OmegaKind::CUSP, 2.0, &w).unwrap();
        assert!((a - d).norm() <= 1e-6 * d.norm(), "{a} vs {d}");
    }

    #[test]
    fn table_matches_direct() {
        let w = SmoothWeight::new(500.0, 2000.0).unwrap();
        for kind in [OmegaKind::CUSP, OmegaKind::Y, OmegaKind::K] {
            let t = OmegaTable::build(kind, &w, 3.0, 1e-10).unwrap();
            for &b in &[0.013, 0.21, 0.77, 1.9] {
                if b > t.beta_max() {
                    continue;
                }
                let d = omega_direct_real(kind, b, &w).unwrap();
                let e = t.eval(b).unwrap();
                assert!((d - e).abs() < 1e-6 * t.peak, "{kind:?} {b}: {d} vs {e}");
            }
        }
    }
}
