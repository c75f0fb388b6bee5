//! Fourier coefficients of the discriminant form Δ (weight 12, level 1) and
//! the Rankin–Selberg residue estimate.

use serde::Serialize;

use crate::error::{Error, Result};

/// Default coefficient range.
pub const DEFAULT_N_MAX: usize = 200_000;
/// Largest coefficient range accepted.
pub const HECKE_CAP: usize = 1_000_000;

/// Exact Ramanujan τ(n) for `1..=n_max` (index 0 holds 0).
///
/// Uses Jacobi's identity `Π(1-q^m)^3 = Σ_j (-1)^j (2j+1) q^{j(j+1)/2}`, so
/// `Δ = q·E^8` with `E` sparse. `E^8` is built by seven sparse-by-dense
/// products, each multiply-add overflow checked.
pub fn delta_coefficients_exact(n_max: usize) -> Result<Vec<i128>> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    if n_max > HECKE_CAP {
        return Err(Error::Capacity { requested: n_max as u64, cap: HECKE_CAP as u64 });
    }
    // coefficient of q^{n-1} in E^8 is τ(n)
    let len = n_max;
    let mut sparse: Vec<(usize, i128)> = Vec::new();
    let mut j = 0usize;
    loop {
        let t = j * (j + 1) / 2;
        if t >= len {
            break;
        }
        let c = (2 * j + 1) as i128 * if j % 2 == 0 { 1 } else { -1 };
        sparse.push((t, c));
        j += 1;
    }
    let mut p = vec![0i128; len];
    for &(t, c) in &sparse {
        p[t] = c;
    }
    let mut q = vec![0i128; len];
    for _ in 0..7 {
        q.iter_mut().for_each(|v| *v = 0);
        for &(t, c) in &sparse {
            for n in t..len {
                let prod = c.checked_mul(p[n - t]).ok_or(Error::Overflow { n: n + 1 })?;
                q[n] = q[n].checked_add(prod).ok_or(Error::Overflow { n: n + 1 })?;
            }
        }
        std::mem::swap(&mut p, &mut q);
    }
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(0);
    out.extend_from_slice(&p);
    Ok(out)
}

/// `a(n) = τ(n) / n^{(k-1)/2}`; entry 0 is 0.
pub fn hecke_normalized(tau_exact: &[i128], k: u32) -> Result<Vec<f64>> {
    if k < 4 || k % 2 == 1 {
        return Err(Error::InvalidArgument(format!("weight k = {k} must be even and >= 4")));
    }
    let e = (k as f64 - 1.0) / 2.0;
    Ok(tau_exact
        .iter()
        .enumerate()
        .map(|(n, &t)| if n == 0 { 0.0 } else { t as f64 / (n as f64).powf(e) })
        .collect())
}

/// Coefficients of Δ together with normalized values and prefix sums of `a(n)^2`.
#[derive(Debug, Clone)]
pub struct HeckeTable {
    pub n_max: usize,
    pub k: u32,
    pub tau_exact: Vec<i128>,
    pub a_norm: Vec<f64>,
    a2_prefix: Vec<f64>,
}

impl HeckeTable {
    pub fn build(n_max: usize) -> Result<Self> {
        let tau_exact = delta_coefficients_exact(n_max)?;
        Self::from_exact(tau_exact)
    }

    /// Wraps precomputed coefficients (e.g. loaded from the cache file).
    pub fn from_exact(tau_exact: Vec<i128>) -> Result<Self> {
        if tau_exact.len() < 2 {
            return Err(Error::InvalidArgument("coefficient array is empty".into()));
        }
        let a_norm = hecke_normalized(&tau_exact, 12)?;
        let mut a2_prefix = Vec::with_capacity(a_norm.len());
        let (mut s, mut comp) = (0.0f64, 0.0f64);
        for &a in &a_norm {
            // Neumaier summation
            let v = a * a;
            let t = s + v;
            comp += if s.abs() >= v.abs() { (s - t) + v } else { (v - t) + s };
            s = t;
            a2_prefix.push(s + comp);
        }
        Ok(Self { n_max: tau_exact.len() - 1, k: 12, tau_exact, a_norm, a2_prefix })
    }

    /// Exact partial sum `Σ_{n ≤ ⌊x⌋} a(n)^2`.
    pub fn rankin_partial_sum(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) || x.floor() as usize > self.n_max {
            return Err(Error::OutOfRange(format!("x = {x} exceeds n_max = {}", self.n_max)));
        }
        Ok(self.a2_prefix[x.floor() as usize])
    }

    pub fn a(&self, n: usize) -> f64 {
        self.a_norm[n]
    }
}

/// Residual diagnostics of the Rankin–Selberg fit.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub intercept: f64,
    pub x: Vec<f64>,
    /// partial sum minus fitted line
    pub residuals: Vec<f64>,
    /// residual / x, expected to shrink with x
    pub scaled_residuals: Vec<f64>,
}

/// Least-squares slope (with intercept) of `partial(x)` against `x`.
pub fn fit_slope(x_grid: &[f64], partial: impl Fn(f64) -> Result<f64>) -> Result<(f64, ResidualReport)> {
    if x_grid.len() < 5 {
        return Err(Error::InvalidArgument("grid needs at least 5 points".into()));
    }
    let n = x_grid.len() as f64;
    let ys: Vec<f64> = x_grid.iter().map(|&x| partial(x)).collect::<Result<_>>()?;
    let mx = x_grid.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = x_grid.iter().map(|x| (x - mx) * (x - mx)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InvalidArgument("degenerate grid (all points equal)".into()));
    }
    let sxy: f64 = x_grid.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = x_grid.iter().zip(&ys).map(|(x, y)| y - (slope * x + intercept)).collect();
    let scaled_residuals = residuals.iter().zip(x_grid).map(|(r, x)| r / x).collect();
    Ok((slope, ResidualReport { intercept, x: x_grid.to_vec(), residuals, scaled_residuals }))
}

/// Estimate of the Rankin–Selberg residue `c` in `Σ_{n≤x} a(n)^2 ~ c x`.
pub fn estimate_rankin_residue(x_grid: &[f64], table: &HeckeTable) -> Result<(f64, ResidualReport)> {
    for &x in x_grid {
        if !(1e3..=table.n_max as f64).contains(&x) {
            return Err(Error::OutOfRange(format!("grid point {x} outside [1e3, {}]", table.n_max)));
        }
    }
    let (c, rep) = fit_slope(x_grid, |x| table.rankin_partial_sum(x))?;
    if !(c > 0.0) {
        return Err(Error::InvalidArgument(format!("non-positive residue estimate {c}")));
    }
    Ok((c, rep))
}

/// `points` integers spread uniformly over `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| (lo + (hi - lo) * i as f64 / (points - 1).max(1) as f64).round())
        .collect()
}

/// `c_hat` from the default grid of ten points on `[10^4, min(10^5, n_max)]`.
pub fn default_c_hat(table: &HeckeTable) -> Result<f64> {
    let hi = (table.n_max as f64).min(1e5);
    estimate_rankin_residue(&uniform_grid(1e4_f64.min(hi / 2.0), hi, 10), table).map(|r| r.0)
}
