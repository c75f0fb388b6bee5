//! Shifted convolution sums, the density `Λ_h`, and the off-diagonal parts
//! of the smooth variances.
//!
//! `Λ_h(x, y) = Σ_k c_k(h)/k² (log x + 2γ − 2 log k)(log y + 2γ − 2 log k)`.
//! Writing `L_x = log x + 2γ` and `S_j(h) = Σ_k c_k(h) (log k)^j / k²`,
//! `Λ_h = L_x L_y S_0 − 2 (L_x + L_y) S_1 + 4 S_2`, and since
//! `c_k(h) = Σ_{d | (k, h)} d μ(k/d)` each `S_j` is a short combination of
//! prefix sums of `μ(m) (log m)^i / m²`.

use std::f64::consts::E;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{divisors_of, gcd, moebius, num_divisors, sigma_real, ArithTables};
use crate::error::{Error, Result};
use crate::forms::HeckeTable;
use crate::specfun::gamma::{euler_gamma, zeta, zeta_derivative};
use crate::specfun::omega::{OmegaEval, OmegaKind, OmegaTable};
use crate::specfun::quad::integrate;
use crate::specfun::weight::SmoothWeight;
use crate::variance::{dual_layers, omega_evaluator, DualLayer};
use crate::voronoi::DUAL_EPS;

/// Default truncation of the `k`-series.
pub const DEFAULT_K: usize = 100_000;

/// Prefix sums `P_i(N) = Σ_{m ≤ N} μ(m) (log m)^i / m²`, `i = 0, 1, 2`.
#[derive(Debug, Clone)]
pub struct MoebiusPrefix {
    pub k_max: usize,
    pub mu: Vec<i8>,
    prefix: [Vec<f64>; 3],
}

impl MoebiusPrefix {
    pub fn build(k_max: usize) -> Result<Self> {
        if k_max == 0 {
            return Err(Error::InvalidArgument("k_max must be positive".into()));
        }
        let mut mu = vec![1i8; k_max + 1];
        mu[0] = 0;
        let mut composite = vec![false; k_max + 1];
        for p in 2..=k_max {
            if composite[p] {
                continue;
            }
            for m in (2 * p..=k_max).step_by(p) {
                composite[m] = true;
            }
            for m in (p..=k_max).step_by(p) {
                mu[m] = -mu[m];
            }
            if let Some(pp) = p.checked_mul(p) {
                for m in (pp..=k_max).step_by(pp) {
                    mu[m] = 0;
                }
            }
        }
        let mut prefix = [vec![0.0; k_max + 1], vec![0.0; k_max + 1], vec![0.0; k_max + 1]];
        for m in 1..=k_max {
            let (l, w) = ((m as f64).ln(), mu[m] as f64 / (m as f64 * m as f64));
            prefix[0][m] = prefix[0][m - 1] + w;
            prefix[1][m] = prefix[1][m - 1] + w * l;
            prefix[2][m] = prefix[2][m - 1] + w * l * l;
        }
        Ok(Self { k_max, mu, prefix })
    }

    /// `S_j(h)` truncated at `k ≤ K`, for `j = 0, 1, 2`.
    pub fn partial_s(&self, h: u64, k: usize) -> Result<[f64; 3]> {
        if k > self.k_max {
            return Err(Error::InsufficientTable { needed: k as u64, available: self.k_max as u64 });
        }
        let mut s = [0.0; 3];
        for d in divisors_of(h) {
            let n = k / d as usize;
            if n == 0 {
                continue;
            }
            let ld = (d as f64).ln();
            let p = [self.prefix[0][n], self.prefix[1][n], self.prefix[2][n]];
            let inv = 1.0 / d as f64;
            s[0] += inv * p[0];
            s[1] += inv * (ld * p[0] + p[1]);
            s[2] += inv * (ld * ld * p[0] + 2.0 * ld * p[1] + p[2]);
        }
        Ok(s)
    }
}

/// Truncated `Λ_h` with a certified bound on the omitted terms.
#[derive(Debug, Clone, Serialize)]
pub struct LambdaSeries {
    pub h: u64,
    pub k: usize,
    pub gamma: f64,
    pub s: [f64; 3],
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LambdaValue {
    pub value: f64,
    pub tail_bound: f64,
}

impl LambdaSeries {
    pub fn new(h: i64, k: usize, mob: &MoebiusPrefix) -> Result<Self> {
        if h == 0 {
            return Err(Error::InvalidArgument("h = 0 makes the k-series diverge".into()));
        }
        if k == 0 {
            return Err(Error::InvalidArgument("K must be at least 1".into()));
        }
        let h = h.unsigned_abs();
        Ok(Self { h, k, gamma: euler_gamma(), s: mob.partial_s(h, k)? })
    }

    fn logs(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        if !(x > 0.0 && y > 0.0) {
            return Err(Error::InvalidArgument(format!("need x, y > 0, got ({x}, {y})")));
        }
        Ok((x.ln() + 2.0 * self.gamma, y.ln() + 2.0 * self.gamma))
    }

    /// Value from the stored sums (no tail).
    #[inline]
    pub fn value_unchecked(&self, x: f64, y: f64) -> f64 {
        let (lx, ly) = (x.ln() + 2.0 * self.gamma, y.ln() + 2.0 * self.gamma);
        lx * ly * self.s[0] - 2.0 * (lx + ly) * self.s[1] + 4.0 * self.s[2]
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<LambdaValue> {
        let (lx, ly) = self.logs(x, y)?;
        let value = lx * ly * self.s[0] - 2.0 * (lx + ly) * self.s[1] + 4.0 * self.s[2];
        Ok(LambdaValue { value, tail_bound: self.tail_bound(lx.abs(), ly.abs()) })
    }

    /// Constant `C` with `tail_bound(a, b) ≤ C (1 + a)(1 + b)` for all `a, b ≥ 0`
    /// (the bound is affine in each of `a`, `b`).
    pub fn tail_envelope(&self) -> f64 {
        let t00 = self.tail_bound(0.0, 0.0);
        let t10 = self.tail_bound(1.0, 0.0);
        let t11 = self.tail_bound(1.0, 1.0);
        t00.max(t10 - t00).max(t11 - 2.0 * t10 + t00)
    }

    /// `Σ_{d | h} (1/d) Σ_{m > K/d} P(log dm)/m²` with `P(t) = (a + 2t)(b + 2t)`,
    /// which dominates the omitted terms since `|c_k(h)| ≤ Σ_{d | (k,h)} d`.
    /// Past `dm ≥ e` the summand decreases, so the rest is bounded by
    /// `∫_{u0}^∞ P(log du)/u² du = (P + P' + P'')(log d u0) / u0`.
    fn tail_bound(&self, a: f64, b: f64) -> f64 {
        let p = |t: f64| (a + 2.0 * t) * (b + 2.0 * t);
        let p_all = |t: f64| p(t) + 2.0 * (a + 2.0 * t) + 2.0 * (b + 2.0 * t) + 8.0;
        let mut total = 0.0;
        for d in divisors_of(self.h) {
            let df = d as f64;
            let m0 = self.k / d as usize + 1;
            let m1 = m0.max((E / df).ceil() as usize + 1);
            let mut part = 0.0;
            for m in m0..m1 {
                part += p((df * m as f64).ln()) / (m as f64 * m as f64);
            }
            let u0 = (m1 - 1) as f64;
            part += p_all((df * u0).ln()) / u0;
            total += part / df;
        }
        total
    }
}

/// `Λ_h(x, y)` truncated at `K`, with its tail bound.
pub fn lambda_h(x: f64, y: f64, h: i64, k: usize, mob: &MoebiusPrefix) -> Result<LambdaValue> {
    LambdaSeries::new(h, k, mob)?.eval(x, y)
}

/// `S_0, S_1, S_2` in closed form from `σ_{1-s}(h)/ζ(s)` and its
/// `s`-derivatives at `s = 2`.
pub fn lambda_closed_sums(h: i64) -> Result<[f64; 3]> {
    if h == 0 {
        return Err(Error::InvalidArgument("h must be nonzero".into()));
    }
    let h = h.unsigned_abs();
    let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
    for d in divisors_of(h) {
        let (df, l) = (d as f64, (d as f64).ln());
        s0 += 1.0 / df;
        s1 -= l / df;
        s2 += l * l / df;
    }
    let z = zeta_derivative(2.0, 0)?;
    let z1 = zeta_derivative(2.0, 1)?;
    let z2 = zeta_derivative(2.0, 2)?;
    let (r0, r1, r2) = (1.0 / z, -z1 / (z * z), -z2 / (z * z) + 2.0 * z1 * z1 / (z * z * z));
    // F = σ·(1/ζ); S_1 = -F'(2), S_2 = F''(2)
    let f0 = s0 * r0;
    let f1 = s1 * r0 + s0 * r1;
    let f2 = s2 * r0 + 2.0 * s1 * r1 + s0 * r2;
    Ok([f0, -f1, f2])
}

/// `Λ_h(x, y)` with the full `k`-series.
pub fn lambda_closed(x: f64, y: f64, h: i64) -> Result<f64> {
    let s = lambda_closed_sums(h)?;
    if !(x > 0.0 && y > 0.0) {
        return Err(Error::InvalidArgument(format!("need x, y > 0, got ({x}, {y})")));
    }
    let g2 = 2.0 * euler_gamma();
    let (lx, ly) = (x.ln() + g2, y.ln() + g2);
    Ok(lx * ly * s[0] - 2.0 * (lx + ly) * s[1] + 4.0 * s[2])
}

/// `|Λ_h|` envelope `Σ_k (k, h) |L_x − 2 log k| |L_y − 2 log k| / k²`
/// summed up to `K` directly, plus the same certified tail.
pub fn lambda_envelope(x: f64, y: f64, h: i64, k: usize) -> Result<f64> {
    let ser = LambdaSeries { h: h.unsigned_abs(), k, gamma: euler_gamma(), s: [0.0; 3] };
    let (lx, ly) = ser.logs(x, y)?;
    let mut s = 0.0;
    for kk in 1..=k {
        let lk = 2.0 * (kk as f64).ln();
        s += gcd(kk as u64, ser.h) as f64 * (lx - lk).abs() * (ly - lk).abs() / (kk as f64 * kk as f64);
    }
    Ok(s + ser.tail_bound(lx.abs(), ly.abs()))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SeriesCheck {
    pub h: i64,
    pub s: f64,
    pub k: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub diff: f64,
}

/// `Σ_{k ≤ K} c_k(h)/k^s` against `σ_{1-s}(h)/ζ(s)`.
pub fn lambda_series_check(h: i64, s: f64, k: usize, mob: &MoebiusPrefix) -> Result<SeriesCheck> {
    if h == 0 {
        return Err(Error::InvalidArgument("h must be nonzero".into()));
    }
    if !(s > 1.0) {
        return Err(Error::InvalidArgument(format!("need s > 1, got {s}")));
    }
    if k > mob.k_max {
        return Err(Error::InsufficientTable { needed: k as u64, available: mob.k_max as u64 });
    }
    let ha = h.unsigned_abs();
    let lhs = if s == 2.0 {
        mob.partial_s(ha, k)?[0]
    } else {
        let mut acc = 0.0;
        for d in divisors_of(ha) {
            let df = d as f64;
            for m in 1..=k / d as usize {
                if mob.mu[m] != 0 {
                    acc += df * mob.mu[m] as f64 / (df * m as f64).powf(s);
                }
            }
        }
        acc
    };
    let rhs = sigma_real(ha, 1.0 - s) / zeta(num_complex::Complex64::new(s, 0.0))?.re;
    Ok(SeriesCheck { h, s, k, lhs, rhs, diff: (lhs - rhs).abs() })
}

/// Source of the sequence values.
#[derive(Debug, Clone, Copy)]
pub enum Coefficients<'a> {
    Cusp(&'a HeckeTable),
    Divisor(&'a ArithTables),
}

impl Coefficients<'_> {
    #[inline]
    pub fn u(&self, n: usize) -> f64 {
        match self {
            Coefficients::Cusp(t) => t.a(n),
            Coefficients::Divisor(t) => t.tau[n] as f64,
        }
    }

    pub fn n_max(&self) -> usize {
        match self {
            Coefficients::Cusp(t) => t.n_max,
            Coefficients::Divisor(t) => t.n_max,
        }
    }
}

/// `n − m = h` or `n + m = h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ShiftSign {
    Minus,
    Plus,
}

/// `Σ_{n ∓ m = h} u(n) u(m) g(m, n)` with `g` supported in `[M, 2M] × [N, 2N]`.
pub fn shifted_sum_exact(
    u: Coefficients<'_>,
    sign: ShiftSign,
    h: i64,
    g: impl Fn(f64, f64) -> f64,
    m_box: f64,
    n_box: f64,
) -> Result<f64> {
    if h == 0 {
        return Err(Error::InvalidArgument("h must be nonzero".into()));
    }
    if !(m_box >= 1.0 && n_box >= 1.0) {
        return Err(Error::InvalidArgument("box corners must be at least 1".into()));
    }
    let top = (2.0 * m_box).max(2.0 * n_box).ceil() as usize;
    if top > u.n_max() {
        return Err(Error::InsufficientTable { needed: top as u64, available: u.n_max() as u64 });
    }
    let mut acc = 0.0;
    for m in m_box.ceil() as i64..=(2.0 * m_box).floor() as i64 {
        let n = match sign {
            ShiftSign::Minus => m + h,
            ShiftSign::Plus => h - m,
        };
        if (n as f64) < n_box || (n as f64) > 2.0 * n_box {
            continue;
        }
        let gv = g(m as f64, n as f64);
        if gv != 0.0 {
            acc += u.u(n as usize) * u.u(m as usize) * gv;
        }
    }
    Ok(acc)
}

/// `∫ g(x, ±x ∓ h) Λ_h(x, ±x ∓ h) dx` over the box (divisor case; zero for the cusp).
///
/// The integration variable is `m`, with `n = m + h` (minus) or `n = h − m` (plus).
#[allow(clippy::too_many_arguments)]
pub fn dfi_main_term(
    is_divisor: bool,
    sign: ShiftSign,
    h: i64,
    g: impl Fn(f64, f64) -> f64,
    m_box: f64,
    n_box: f64,
    k: usize,
    mob: &MoebiusPrefix,
) -> Result<f64> {
    if h == 0 {
        return Err(Error::InvalidArgument("h must be nonzero".into()));
    }
    if !is_divisor {
        return Ok(0.0);
    }
    let lam = LambdaSeries::new(h, k, mob)?;
    let hf = h as f64;
    let (lo, hi) = match sign {
        ShiftSign::Minus => (m_box.max(n_box - hf), (2.0 * m_box).min(2.0 * n_box - hf)),
        ShiftSign::Plus => (m_box.max(hf - 2.0 * n_box), (2.0 * m_box).min(hf - n_box)),
    };
    if !(hi > lo) {
        return Ok(0.0);
    }
    let f = |m: f64| {
        let n = if sign == ShiftSign::Minus { m + hf } else { hf - m };
        let gv = g(m, n);
        if gv == 0.0 || n <= 0.0 {
            0.0
        } else {
            gv * lam.value_unchecked(m, n)
        }
    };
    let res = integrate(f, lo, hi, 1e-10, 1e-9, 4000)?;
    Ok(res.value)
}

/// Off-diagonal kinds of the smooth variance decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OffDiagKind {
    #[serde(rename = "cusp-j")]
    CuspJ,
    #[serde(rename = "div-yy")]
    DivYY,
    #[serde(rename = "div-kk")]
    DivKK,
    #[serde(rename = "div-yk")]
    DivYK,
}

impl std::str::FromStr for OffDiagKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "cusp-j" | "cusp-J" | "cusp" => OffDiagKind::CuspJ,
            "div-yy" | "div-YY" => OffDiagKind::DivYY,
            "div-kk" | "div-KK" => OffDiagKind::DivKK,
            "div-yk" | "div-YK" => OffDiagKind::DivYK,
            _ => return Err(Error::InvalidArgument(format!("unknown off-diagonal kind {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OffDiag {
    pub kind: OffDiagKind,
    pub value: f64,
    /// order-of-magnitude effect of the dual truncation
    pub tail_budget: f64,
    /// largest dual index over all `r | q`
    pub n_cut: usize,
}

fn residue_buckets(values: &[f64], r: u64) -> Vec<f64> {
    let r = r as usize;
    let mut b = vec![0.0; r];
    for (i, y) in values.iter().enumerate() {
        b[(i + 1) % r] += y;
    }
    b
}

fn layer_for(layers: &[DualLayer], r: u64) -> &DualLayer {
    layers.iter().find(|l| l.r == r).expect("a layer exists for every divisor")
}

/// `(1/q) Σ_{dr | q} μ(d)/(d² r) Σ_{n ≠ m, n ≡ m (r)} y_n y_m` with `y` taken
/// from the layer at `dr`.
pub fn offdiag_same(layers: &[DualLayer], q: u64) -> (f64, f64) {
    let mut total = 0.0;
    let mut budget = 0.0;
    for rr in divisors_of(q) {
        let layer = layer_for(layers, rr);
        let diag: f64 = layer.values.iter().map(|y| y * y).sum();
        for r in divisors_of(rr) {
            let d = rr / r;
            let mu = moebius(d);
            if mu == 0 {
                continue;
            }
            let f = mu as f64 / ((d * d * r) as f64) / q as f64;
            let sq: f64 = residue_buckets(&layer.values, r).iter().map(|b| b * b).sum();
            total += f * (sq - diag);
            if layer.tail_sq > 0.0 {
                let t = layer.tail_sq * (layer.values.len() as f64 / r as f64).max(1.0);
                budget += f.abs() * (2.0 * (sq * t).sqrt() + t);
            }
        }
    }
    (total, budget)
}

/// `(2/q) Σ_{dr | q} μ(d)/(d² r) Σ_{n + m ≡ 0 (r)} y_n k_m`.
pub fn offdiag_cross(y_layers: &[DualLayer], k_layers: &[DualLayer], q: u64) -> f64 {
    let mut total = 0.0;
    for rr in divisors_of(q) {
        let (ly, lk) = (layer_for(y_layers, rr), layer_for(k_layers, rr));
        for r in divisors_of(rr) {
            let d = rr / r;
            let mu = moebius(d);
            if mu == 0 {
                continue;
            }
            let f = 2.0 * mu as f64 / ((d * d * r) as f64) / q as f64;
            let (by, bk) = (residue_buckets(&ly.values, r), residue_buckets(&lk.values, r));
            let ru = r as usize;
            let s: f64 = (0..ru).map(|b| by[b] * bk[(ru - b) % ru]).sum();
            total += f * s;
        }
    }
    total
}

/// Reference size `q^{5/6} X^{4/3} H^{-5/4}` for the off-diagonal terms.
pub fn offdiag_budget(x: f64, q: u64, big_h: f64) -> f64 {
    (q as f64).powf(5.0 / 6.0) * x.powf(4.0 / 3.0) * big_h.powf(-1.25)
}

/// The off-diagonal contribution of one kind, from freshly built layers.
pub fn offdiag_exact(kind: OffDiagKind, w: &SmoothWeight, q: u64, coeffs: Coefficients<'_>) -> Result<OffDiag> {
    let n_limit = coeffs.n_max();
    let u = |n: usize| coeffs.u(n);
    let layers = |k: OmegaKind| -> Result<Vec<DualLayer>> {
        let eval = omega_evaluator(k, w, q)?;
        dual_layers(&u, &eval, q, n_limit)
    };
    let n_cut = |ls: &[DualLayer]| ls.iter().map(|l| l.values.len()).max().unwrap_or(0);
    match (kind, coeffs) {
        (OffDiagKind::CuspJ, Coefficients::Cusp(_))
        | (OffDiagKind::DivYY, Coefficients::Divisor(_))
        | (OffDiagKind::DivKK, Coefficients::Divisor(_)) => {
            let b = match kind {
                OffDiagKind::CuspJ => OmegaKind::CUSP,
                OffDiagKind::DivYY => OmegaKind::Y,
                _ => OmegaKind::K,
            };
            let ls = layers(b)?;
            let (value, tail_budget) = offdiag_same(&ls, q);
            Ok(OffDiag { kind, value, tail_budget, n_cut: n_cut(&ls) })
        }
        (OffDiagKind::DivYK, Coefficients::Divisor(_)) => {
            let (ly, lk) = (layers(OmegaKind::Y)?, layers(OmegaKind::K)?);
            Ok(OffDiag { kind, value: offdiag_cross(&ly, &lk, q), tail_budget: 0.0, n_cut: n_cut(&ly).max(n_cut(&lk)) })
        }
        _ => Err(Error::InvalidArgument(format!("{kind:?} does not match the coefficient source"))),
    }
}

/// Both sides of the exact smooth-variance decomposition.
#[derive(Debug, Clone, Serialize)]
pub struct Decomposition {
    pub sequence: crate::voronoi::Sequence,
    #[serde(rename = "X")]
    pub x: f64,
    #[serde(rename = "H")]
    pub big_h: f64,
    pub q: u64,
    /// direct bucketing
    pub direct: f64,
    /// diagonal terms (J, or Y + K)
    pub main: f64,
    /// off-diagonal terms by kind
    pub offdiag: Vec<(OffDiagKind, f64)>,
    pub assembled: f64,
    pub rel_diff: f64,
    pub tail_budget: f64,
}

/// Direct smooth variance against MT + off-diagonal.
pub fn decomposition_check(w: &SmoothWeight, q: u64, coeffs: Coefficients<'_>) -> Result<Decomposition> {
    let n_limit = coeffs.n_max();
    let u = |n: usize| coeffs.u(n);
    let (seq, direct, main, offdiag, tail) = match coeffs {
        Coefficients::Cusp(t) => {
            let eval = omega_evaluator(OmegaKind::CUSP, w, q)?;
            let ls = dual_layers(&u, &eval, q, n_limit)?;
            let mt = crate::variance::diagonal_main_term(&ls, q);
            let (e, b) = offdiag_same(&ls, q);
            let direct = crate::variance::smooth_variance_cusp(w, q, t)?;
            (crate::voronoi::Sequence::Cusp, direct, mt.value, vec![(OffDiagKind::CuspJ, e)], mt.tail_budget + b)
        }
        Coefficients::Divisor(t) => {
            let ey = omega_evaluator(OmegaKind::Y, w, q)?;
            let ek = omega_evaluator(OmegaKind::K, w, q)?;
            let ly = dual_layers(&u, &ey, q, n_limit)?;
            let lk = dual_layers(&u, &ek, q, n_limit)?;
            let my = crate::variance::diagonal_main_term(&ly, q);
            let mk = crate::variance::diagonal_main_term(&lk, q);
            let (eyy, by) = offdiag_same(&ly, q);
            let (ekk, bk) = offdiag_same(&lk, q);
            let eyk = offdiag_cross(&ly, &lk, q);
            let direct = crate::variance::smooth_variance_divisor(w, q, t)?;
            (
                crate::voronoi::Sequence::Divisor,
                direct,
                my.value + mk.value,
                vec![(OffDiagKind::DivYY, eyy), (OffDiagKind::DivKK, ekk), (OffDiagKind::DivYK, eyk)],
                my.tail_budget + mk.tail_budget + by + bk,
            )
        }
    };
    let assembled = main + offdiag.iter().map(|o| o.1).sum::<f64>();
    let rel_diff = (direct - assembled).abs() / direct.abs().max(assembled.abs()).max(1e-300);
    Ok(Decomposition { sequence: seq, x: w.x, big_h: w.h, q, direct, main, offdiag, assembled, rel_diff, tail_budget: tail })
}

/// Pair of kernels in a fake main term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum KernelPair {
    YY,
    KK,
    YK,
}

impl std::str::FromStr for KernelPair {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "YY" => KernelPair::YY,
            "KK" => KernelPair::KK,
            "YK" => KernelPair::YK,
            _ => return Err(Error::InvalidArgument(format!("unknown kernel pair {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FakeMainTerm {
    pub pair: KernelPair,
    #[serde(rename = "X")]
    pub x: f64,
    #[serde(rename = "H")]
    pub big_h: f64,
    pub q: u64,
    pub value: f64,
    /// `q τ(q) X^{1/2} H^{-1/2} (log X)^4`
    pub budget: f64,
    pub ratio: f64,
    /// largest shift index `l` over all `(d, r)`
    pub l_max: usize,
    /// sum of the `Λ` tail bounds times the integrated `|g|`
    pub lambda_tail: f64,
}

/// Integrals `∫ g L_x^a L_y^b` (`a, b ∈ {0, 1}`) for one `(r', l r)` pair,
/// in the variable `x = r'^2 β^2` on the table grid.
fn fmt_moments(
    tb: &OmegaTable,
    tb2: &OmegaTable,
    rr: f64,
    shift: f64,
    pair: KernelPair,
) -> Result<([f64; 4], f64)> {
    // returns (I00, I10, I01, I11) and ∫|g|
    let g2 = 2.0 * euler_gamma();
    let mut m = [0.0; 4];
    let mut abs = 0.0;
    match pair {
        KernelPair::YY | KernelPair::KK => {
            // x ∈ (0, ∞), y = x + shift; β = √x / r'
            let d = tb.delta;
            let top = tb.cutoff.min(tb.beta_max());
            let shift_b = shift / (rr * rr);
            if shift_b.sqrt() > tb2.cutoff {
                return Ok((m, 0.0));
            }
            let steps = (top / d).floor() as usize;
            for i in 1..=steps {
                let b = i as f64 * d;
                let w1 = tb.eval(b)?;
                let b2 = (b * b + shift_b).sqrt();
                if b2 > tb2.cutoff {
                    break;
                }
                let w2 = tb2.eval(b2)?;
                let x = rr * rr * b * b;
                let gx = w1 * w2 * 2.0 * rr * rr * b * d;
                let (lx, ly) = (x.ln() + g2, (x + shift).ln() + g2);
                m[0] += gx;
                m[1] += gx * lx;
                m[2] += gx * ly;
                m[3] += gx * lx * ly;
                abs += gx.abs() * (1.0 + lx.abs()) * (1.0 + ly.abs());
            }
        }
        KernelPair::YK => {
            // x ∈ (0, shift), y = shift − x; γ = √y / r' on the K grid
            let d = tb2.delta;
            let top = tb2.cutoff.min(tb2.beta_max()).min(shift.sqrt() / rr);
            let steps = (top / d).floor() as usize;
            for i in 1..=steps {
                let c = i as f64 * d;
                let y = rr * rr * c * c;
                let x = shift - y;
                if x <= 0.0 {
                    break;
                }
                let bx = x.sqrt() / rr;
                if bx > tb.cutoff {
                    continue;
                }
                let gx = tb.eval(bx)? * tb2.eval(c)? * 2.0 * rr * rr * c * d;
                let (lx, ly) = (x.ln() + g2, y.ln() + g2);
                m[0] += gx;
                m[1] += gx * lx;
                m[2] += gx * ly;
                m[3] += gx * lx * ly;
                abs += gx.abs() * (1.0 + lx.abs()) * (1.0 + ly.abs());
            }
        }
    }
    Ok((m, abs))
}

/// `(2/q) Σ_{dr | q} μ(d)/(d² r) Σ_{l ≥ 1} ∫ g_{B,B'}(x, ·; dr) Λ_{lr}` with
/// `g_{B,B'}(x, y; h) = ω_B(√x/h) ω_{B'}(√y/h)`, second argument `x + lr`
/// (`YY`, `KK`) or `lr − x` (`YK`, integral over `(0, lr)`).
pub fn fake_main_term(pair: KernelPair, w: &SmoothWeight, q: u64, k: usize, mob: &MoebiusPrefix) -> Result<FakeMainTerm> {
    if q == 0 {
        return Err(Error::InvalidArgument("q must be positive".into()));
    }
    let reach = 20.0 * w.x.sqrt() / w.h;
    let ty = OmegaTable::build(OmegaKind::Y, w, reach, DUAL_EPS)?;
    let tk = OmegaTable::build(OmegaKind::K, w, reach, DUAL_EPS)?;
    let (t1, t2) = match pair {
        KernelPair::YY => (&ty, &ty),
        KernelPair::KK => (&tk, &tk),
        KernelPair::YK => (&ty, &tk),
    };
    let jobs: Vec<(u64, u64)> = divisors_of(q)
        .into_iter()
        .flat_map(|rr| divisors_of(rr).into_iter().map(move |r| (rr, r)))
        .filter(|&(rr, r)| moebius(rr / r) != 0)
        .collect();
    let parts: Vec<(f64, f64, usize)> = jobs
        .par_iter()
        .map(|&(rr, r)| -> Result<(f64, f64, usize)> {
            let d = rr / r;
            let f = 2.0 * moebius(d) as f64 / ((d * d * r) as f64) / q as f64;
            let rrf = rr as f64;
            let reach_x = match pair {
                KernelPair::YY | KernelPair::KK => (rrf * t2.cutoff).powi(2),
                KernelPair::YK => (rrf * t1.cutoff).powi(2) + (rrf * t2.cutoff).powi(2),
            };
            let l_max = (reach_x / r as f64).floor() as usize;
            let mut value = 0.0;
            let mut tail = 0.0;
            for l in 1..=l_max {
                let shift = (l as u64 * r) as f64;
                let (m, abs) = fmt_moments(t1, t2, rrf, shift, pair)?;
                if abs == 0.0 {
                    continue;
                }
                let lam = LambdaSeries::new((l as u64 * r) as i64, k, mob)?;
                let s = lam.s;
                value += s[0] * m[3] - 2.0 * s[1] * (m[1] + m[2]) + 4.0 * s[2] * m[0];
                tail += abs * lam.tail_envelope();
            }
            Ok((f * value, f.abs() * tail, l_max))
        })
        .collect::<Result<_>>()?;
    let value: f64 = parts.iter().map(|p| p.0).sum();
    let lambda_tail: f64 = parts.iter().map(|p| p.1).sum();
    let l_max = parts.iter().map(|p| p.2).max().unwrap_or(0);
    let qf = q as f64;
    let budget = qf * num_divisors(q) as f64 * (w.x / w.h).sqrt() * w.x.ln().powi(4);
    Ok(FakeMainTerm { pair, x: w.x, big_h: w.h, q, value, budget, ratio: value.abs() / budget, l_max, lambda_tail })
}

/// Convenience: fake main term with the Möbius prefix built for `k`.
pub fn fake_main_term_default(pair: KernelPair, w: &SmoothWeight, q: u64) -> Result<FakeMainTerm> {
    let mob = MoebiusPrefix::build(DEFAULT_K)?;
    fake_main_term(pair, w, q, DEFAULT_K, &mob)
}

/// `offdiag_exact` for the `q = 1` case cross-checked against an explicit
/// double loop over `n ≠ m`.
pub fn offdiag_naive_q1(w: &SmoothWeight, coeffs: Coefficients<'_>, kind: OmegaKind) -> Result<f64> {
    let eval = OmegaEval::direct(kind, w);
    let dual = eval.dual(1.0, 1, DUAL_EPS, coeffs.n_max())?;
    let y: Vec<f64> = dual.values.iter().enumerate().map(|(i, v)| coeffs.u(i + 1) * v).collect();
    let mut s = 0.0;
    for (i, a) in y.iter().enumerate() {
        for (j, b) in y.iter().enumerate() {
            if i != j {
                s += a * b;
            }
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ramanujan_sum;

    #[test]
    fn prefix_matches_direct_series() {
        let mob = MoebiusPrefix::build(5000).unwrap();
        for h in [1u64, 6, 12, 35] {
            let s = mob.partial_s(h, 5000).unwrap();
            let mut d = [0.0; 3];
            for k in 1..=5000u64 {
                let c = ramanujan_sum(k, h as i64) as f64 / (k * k) as f64;
                let l = (k as f64).ln();
                d[0] += c;
                d[1] += c * l;
                d[2] += c * l * l;
            }
            for j in 0..3 {
                assert!((s[j] - d[j]).abs() < 1e-12, "h={h} j={j}");
            }
        }
    }

    #[test]
    fn single_term() {
        let mob = MoebiusPrefix::build(10).unwrap();
        let g2 = 2.0 * euler_gamma();
        let v = lambda_h(3.0, 7.0, 5, 1, &mob).unwrap();
        assert!((v.value - (3f64.ln() + g2) * (7f64.ln() + g2)).abs() < 1e-13);
        assert!(lambda_h(3.0, 7.0, 0, 1, &mob).is_err());
    }

    #[test]
    fn closed_form_agrees_with_long_truncation() {
        let mob = MoebiusPrefix::build(200_000).unwrap();
        for h in [1i64, 2, 12, -30] {
            let a = lambda_h(1e4, 2e4, h, 200_000, &mob).unwrap();
            let b = lambda_closed(1e4, 2e4, h).unwrap();
            assert!((a.value - b).abs() <= a.tail_bound, "h={h}: {} vs {b}, tail {}", a.value, a.tail_bound);
        }
    }
}
