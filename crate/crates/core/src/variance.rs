//! Variances of `a(n)` and `τ(n)` in residue classes, their smooth
//! counterparts and main terms, and the comparison against the error
//! budgets of the large-modulus regime.

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{divisors_of, gcd, g_of, moebius, num_divisors, ramanujan_sum, totient, ArithTables};
use crate::error::{Error, Result};
use crate::forms::HeckeTable;
use crate::specfun::gamma::euler_gamma;
use crate::specfun::omega::{OmegaEval, OmegaKind, OmegaTable};
use crate::specfun::weight::SmoothWeight;
use crate::voronoi::{Sequence, DUAL_EPS};

/// Position of `q` relative to `X^{1/4}`, `X^{1/2}` and `X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `q < X^{1/4}`
    SmallModulus,
    /// `X^{1/4} ≤ q < X^{1/2}`
    Transition,
    /// `X^{1/2} ≤ q < X`
    Diagonal,
    /// `q ≥ X`: at most one term per class
    Degenerate,
}

impl Regime {
    pub fn classify(x: f64, q: u64) -> Self {
        let qf = q as f64;
        if qf >= x {
            Regime::Degenerate
        } else if qf >= x.sqrt() {
            Regime::Diagonal
        } else if qf >= x.powf(0.25) {
            Regime::Transition
        } else {
            Regime::SmallModulus
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Regime::SmallModulus => "small-modulus",
            Regime::Transition => "transition",
            Regime::Diagonal => "diagonal",
            Regime::Degenerate => "degenerate",
        }
    }
}

fn check_q(q: u64) -> Result<()> {
    if q == 0 {
        Err(Error::InvalidArgument("q must be positive".into()))
    } else {
        Ok(())
    }
}

fn check_range(x: f64, n_max: usize) -> Result<usize> {
    if !(x >= 1.0) {
        return Err(Error::InvalidArgument(format!("X = {x} must be at least 1")));
    }
    let n = x.floor() as usize;
    if n > n_max {
        return Err(Error::InsufficientTable { needed: n as u64, available: n_max as u64 });
    }
    Ok(n)
}

/// `Σ_{n ≤ N, n ≡ b (q)} u(n)` for `b = 0..q` (index `b` holds class `b mod q`).
pub fn bucket_sums(u: impl Fn(usize) -> f64, n_end: usize, q: u64) -> Vec<f64> {
    let q = q as usize;
    let mut buckets = vec![0.0; q];
    let mut b = 1 % q;
    for n in 1..=n_end {
        buckets[b] += u(n);
        b += 1;
        if b == q {
            b = 0;
        }
    }
    buckets
}

/// `A(X, q) = Σ_b |Σ_{n ≤ X, n ≡ b} a(n)|^2`.
pub fn variance_cusp_exact(x: f64, q: u64, table: &HeckeTable) -> Result<f64> {
    check_q(q)?;
    let n = check_range(x, table.n_max)?;
    Ok(bucket_sums(|n| table.a(n), n, q).iter().map(|s| s * s).sum())
}

/// Main term `MT(b, x, q)` for `τ` in the class `b mod q`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MainTermDivisor {
    pub b: u64,
    pub x: f64,
    pub q: u64,
    pub value: f64,
}

/// `MT(b, x, q)`, which depends on `b` only through `(q, b)`.
pub fn mt_divisor(b: u64, x: f64, q: u64) -> Result<MainTermDivisor> {
    check_q(q)?;
    if b == 0 || b > q {
        return Err(Error::InvalidArgument(format!("need 1 <= b <= q, got b = {b}, q = {q}")));
    }
    if !(x > 0.0) {
        return Err(Error::InvalidArgument(format!("x = {x} must be positive")));
    }
    Ok(MainTermDivisor { b, x, q, value: mt_divisor_by_gcd(gcd(q, b), x, q) })
}

fn mt_divisor_by_gcd(g: u64, x: f64, q: u64) -> f64 {
    let qf = q as f64;
    let (lx, gam) = (x.ln(), euler_gamma());
    let mut first = 0.0;
    let mut second = 0.0;
    for r in divisors_of(g) {
        let m = q / r;
        first += totient(m) as f64 / m as f64 * x * (lx + 2.0 * gam - 1.0 - 2.0 * (r as f64).ln());
        for d in divisors_of(m) {
            let mu = moebius(d);
            if mu != 0 && d > 1 {
                second += mu as f64 * (d as f64).ln() / d as f64 * x;
            }
        }
    }
    first / qf - 2.0 / qf * second
}

/// `A(x, q; τ) = Σ_b |Σ_{n ≤ x, n ≡ b} τ(n) - MT(b, x, q)|^2`.
pub fn variance_divisor_exact(x: f64, q: u64, tables: &ArithTables) -> Result<f64> {
    check_q(q)?;
    let n = check_range(x, tables.n_max)?;
    let sums = bucket_sums(|n| tables.tau[n] as f64, n, q);
    let mts: std::collections::HashMap<u64, f64> =
        divisors_of(q).into_iter().map(|g| (g, mt_divisor_by_gcd(g, x, q))).collect();
    Ok(sums
        .iter()
        .enumerate()
        .map(|(b, s)| {
            let class = if b == 0 { q } else { b as u64 };
            let d = s - mts[&gcd(q, class)];
            d * d
        })
        .sum())
}

/// `Σ_{n ≡ b (q)} u(n) w(n)` for `b = 0..q`.
pub fn smooth_bucket_sums(u: impl Fn(usize) -> f64, w: &SmoothWeight, q: u64) -> Vec<f64> {
    let q = q as usize;
    let mut buckets = vec![0.0; q];
    let lo = w.h.floor() as usize + 1;
    let hi = w.x.ceil() as usize;
    for n in lo..hi {
        buckets[n % q] += u(n) * w.value(n as f64);
    }
    buckets
}

/// Smooth cusp variance `Σ_b |Σ_{n ≡ b} a(n) w(n)|^2` by direct bucketing.
pub fn smooth_variance_cusp(w: &SmoothWeight, q: u64, table: &HeckeTable) -> Result<f64> {
    check_q(q)?;
    check_range(w.x, table.n_max)?;
    Ok(smooth_bucket_sums(|n| table.a(n), w, q).iter().map(|s| s * s).sum())
}

/// `I_r = ∫ (log x + 2γ - 2 log r) w(x) dx` for each `r | q`.
fn smooth_log_integrals(w: &SmoothWeight, q: u64) -> Result<Vec<(u64, f64)>> {
    let il = w.integral_log()?;
    let c = 2.0 * euler_gamma();
    Ok(divisors_of(q).into_iter().map(|r| (r, il + (c - 2.0 * (r as f64).ln()) * w.integral())).collect())
}

/// Smooth main term `T_w(b, q) = (1/q) Σ_{r|q} c_r(b)/r · I_r` for every class.
pub fn smooth_main_divisor(w: &SmoothWeight, q: u64) -> Result<Vec<f64>> {
    check_q(q)?;
    let ints = smooth_log_integrals(w, q)?;
    Ok((0..q)
        .map(|b| ints.iter().map(|&(r, i)| ramanujan_sum(r, b as i64) as f64 / r as f64 * i).sum::<f64>() / q as f64)
        .collect())
}

/// Smooth divisor variance `Σ_b |Σ_{n ≡ b} τ(n) w(n) - T_w(b, q)|^2`.
pub fn smooth_variance_divisor(w: &SmoothWeight, q: u64, tables: &ArithTables) -> Result<f64> {
    check_q(q)?;
    check_range(w.x, tables.n_max)?;
    let sums = smooth_bucket_sums(|n| tables.tau[n] as f64, w, q);
    let main = smooth_main_divisor(w, q)?;
    Ok(sums.iter().zip(&main).map(|(s, m)| (s - m) * (s - m)).sum())
}

/// Dual-side coefficients `y_n = u(n) ω(√n / r)`, `n = 1..=N`, for one `r`.
#[derive(Debug, Clone, Serialize)]
pub struct DualLayer {
    pub r: u64,
    #[serde(skip)]
    pub values: Vec<f64>,
    /// estimate of the omitted `Σ_{n > N} y_n^2`
    pub tail_sq: f64,
    /// whether the ω decay point lies inside `1..=N`
    pub complete: bool,
}

/// Builds [`DualLayer`]s for every `r | q`.
///
/// With a direct evaluator each layer runs until the ω values die out and
/// fails if that exceeds `n_limit`. With a table the layer stops at
/// `min((r · cutoff)^2, n_limit)` and the remainder is estimated from the
/// local mean of `u(n)^2` times `r^2 ∫ ω^2 2β dβ`.
pub fn dual_layers(u: &(impl Fn(usize) -> f64 + Sync), eval: &OmegaEval, q: u64, n_limit: usize) -> Result<Vec<DualLayer>> {
    check_q(q)?;
    divisors_of(q)
        .into_par_iter()
        .map(|r| {
            let dual = eval.dual(r as f64, 1, DUAL_EPS, n_limit)?;
            if !dual.converged && matches!(eval, OmegaEval::Direct { .. }) {
                return Err(Error::InsufficientTable { needed: 2 * n_limit as u64, available: n_limit as u64 });
            }
            let n = dual.values.len();
            let values: Vec<f64> = dual.values.iter().enumerate().map(|(i, om)| u(i + 1) * om).collect();
            let tail_sq = match eval {
                OmegaEval::Table(t) if !dual.converged => {
                    let lo = n / 2 + 1;
                    let mean = (lo..=n).map(|m| u(m) * u(m)).sum::<f64>() / (n - lo + 1) as f64;
                    mean * (r * r) as f64 * t.mass_beyond((n as f64).sqrt() / r as f64)
                }
                _ => 0.0,
            };
            Ok(DualLayer { r, values, tail_sq, complete: dual.converged })
        })
        .collect()
}

/// Diagonal main term `(1/q) Σ_{r|q} φ(r)/r^2 Σ_n y_n^2` and its tail budget.
#[derive(Debug, Clone, Serialize)]
pub struct SmoothMainTerm {
    pub value: f64,
    pub tail_budget: f64,
    /// `(r, Σ_n y_n^2)` for each `r | q`
    pub per_r: Vec<(u64, f64)>,
    pub complete: bool,
}

pub fn diagonal_main_term(layers: &[DualLayer], q: u64) -> SmoothMainTerm {
    let mut value = 0.0;
    let mut tail = 0.0;
    let mut per_r = Vec::with_capacity(layers.len());
    for l in layers {
        let s: f64 = l.values.iter().map(|y| y * y).sum();
        let f = totient(l.r) as f64 / (l.r * l.r) as f64 / q as f64;
        value += f * s;
        tail += f * l.tail_sq;
        per_r.push((l.r, s));
    }
    SmoothMainTerm { value, tail_budget: tail, per_r, complete: layers.iter().all(|l| l.complete) }
}

/// Evaluator choice: direct quadrature when the dual sums are short,
/// an interpolation table otherwise.
pub fn omega_evaluator(kind: OmegaKind, w: &SmoothWeight, q: u64) -> Result<OmegaEval> {
    // direct ω_J costs ~1e-4 s; the table ~1 s at X = 1e5
    let beta_decay = 20.0 * w.x.sqrt() / w.h;
    let work: f64 = divisors_of(q).iter().map(|&r| (r as f64 * beta_decay).powi(2)).sum();
    if kind == OmegaKind::K || work < 2e4 {
        return Ok(OmegaEval::direct(kind, w));
    }
    Ok(OmegaEval::Table(OmegaTable::build(kind, w, beta_decay, DUAL_EPS)?))
}

/// `MT(X, q) = (1/q) Σ_{r|q} φ(r)/r^2 Σ_n a(n)^2 ω_J(√n/r)^2`.
pub fn mt_smooth_cusp(w: &SmoothWeight, q: u64, table: &HeckeTable, eval: Option<&OmegaEval>) -> Result<SmoothMainTerm> {
    let own;
    let eval = match eval {
        Some(e) => e,
        None => {
            own = omega_evaluator(OmegaKind::CUSP, w, q)?;
            &own
        }
    };
    let layers = dual_layers(&|n| table.a(n), eval, q, table.n_max)?;
    Ok(diagonal_main_term(&layers, q))
}

/// Least-squares cubic `y ≈ c0 + c1 ξ + c2 ξ^2 + c3 ξ^3`, `ξ = log(r^2/X)`,
/// `y = S_B(r) / (r^2 X)`.
#[derive(Debug, Clone, Serialize)]
pub struct FittedCubic {
    pub coefficients: [f64; 4],
    pub xi: Vec<f64>,
    pub y: Vec<f64>,
    pub rms_residual: f64,
}

impl FittedCubic {
    pub fn leading(&self) -> f64 {
        self.coefficients[3]
    }
}

/// Solves the normal equations of a polynomial least-squares fit.
pub fn polyfit(xs: &[f64], ys: &[f64], degree: usize) -> Result<Vec<f64>> {
    let m = degree + 1;
    if xs.len() < m {
        return Err(Error::InvalidArgument(format!("{} points cannot fix a degree-{degree} fit", xs.len())));
    }
    // centre and scale for conditioning, then map back
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let scale = xs.iter().map(|x| (x - mean).abs()).fold(0.0f64, f64::max).max(1e-300);
    let mut a = vec![vec![0.0; m + 1]; m];
    for (&x, &y) in xs.iter().zip(ys) {
        let t = (x - mean) / scale;
        let pw: Vec<f64> = (0..m).map(|k| t.powi(k as i32)).collect();
        for i in 0..m {
            for j in 0..m {
                a[i][j] += pw[i] * pw[j];
            }
            a[i][m] += pw[i] * y;
        }
    }
    for col in 0..m {
        let piv = (col..m).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        if a[piv][col].abs() < 1e-14 {
            return Err(Error::InvalidArgument("singular least-squares system".into()));
        }
        a.swap(col, piv);
        for row in 0..m {
            if row != col {
                let f = a[row][col] / a[col][col];
                for k in col..=m {
                    a[row][k] -= f * a[col][k];
                }
            }
        }
    }
    let t_coef: Vec<f64> = (0..m).map(|i| a[i][m] / a[i][i]).collect();
    // p(x) = Σ t_k ((x - mean)/scale)^k, expanded binomially
    let mut out = vec![0.0; m];
    for (k, &tk) in t_coef.iter().enumerate() {
        let s = tk / scale.powi(k as i32);
        let mut binom = 1.0;
        for j in 0..=k {
            out[j] += s * binom * (-mean).powi((k - j) as i32);
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
    }
    Ok(out)
}

/// Main term of one Bessel kind for `τ`, with the per-`r` cubic fit.
#[derive(Debug, Clone, Serialize)]
pub struct SmoothMainTermDivisor {
    pub kind: OmegaKind,
    pub main: SmoothMainTerm,
    /// `None` when fewer than four divisors `r > 1` are available
    pub fit: Option<FittedCubic>,
}

/// `(1/q) Σ_{r|q} φ(r)/r^2 Σ_n τ(n)^2 ω_B(√n/r)^2`, `B ∈ {Y, K}`.
pub fn mt_smooth_divisor(
    kind: OmegaKind,
    w: &SmoothWeight,
    q: u64,
    tables: &ArithTables,
    eval: Option<&OmegaEval>,
) -> Result<SmoothMainTermDivisor> {
    if !matches!(kind, OmegaKind::Y | OmegaKind::K) {
        return Err(Error::InvalidArgument("divisor main terms use the Y or K kernel".into()));
    }
    let own;
    let eval = match eval {
        Some(e) => e,
        None => {
            own = omega_evaluator(kind, w, q)?;
            &own
        }
    };
    let layers = dual_layers(&|n| tables.tau[n] as f64, eval, q, tables.n_max)?;
    let main = diagonal_main_term(&layers, q);
    let pts: Vec<(f64, f64)> = main
        .per_r
        .iter()
        .filter(|(r, _)| *r > 1)
        .map(|&(r, s)| (((r * r) as f64 / w.x).ln(), s / ((r * r) as f64 * w.x)))
        .collect();
    let fit = if pts.len() >= 4 {
        let (xi, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        let c = polyfit(&xi, &y, 3)?;
        let rms = (xi
            .iter()
            .zip(&y)
            .map(|(x, y)| (y - (c[0] + c[1] * x + c[2] * x * x + c[3] * x * x * x)).powi(2))
            .sum::<f64>()
            / xi.len() as f64)
            .sqrt();
        Some(FittedCubic { coefficients: [c[0], c[1], c[2], c[3]], xi, y, rms_residual: rms })
    } else {
        None
    };
    Ok(SmoothMainTermDivisor { kind, main, fit })
}

/// Default smoothing length for the cusp case, `(1/3) max(q^{16/27} X^{10/27}, q)`,
/// raised to `X^{3/5}` and capped at `X/4`.
pub fn default_h_cusp(x: f64, q: u64) -> f64 {
    let qf = q as f64;
    clamp_h(x, (qf.powf(16.0 / 27.0) * x.powf(10.0 / 27.0)).max(qf) / 3.0)
}

/// Default smoothing length for `τ`, `(1/3) max(q^{5/9} X^{7/18}, q)`, clamped as above.
pub fn default_h_divisor(x: f64, q: u64) -> f64 {
    let qf = q as f64;
    clamp_h(x, (qf.powf(5.0 / 9.0) * x.powf(7.0 / 18.0)).max(qf) / 3.0)
}

fn clamp_h(x: f64, h: f64) -> f64 {
    h.max(x.powf(0.6)).min(x / 4.0)
}

#[derive(Debug, Clone, Serialize)]
pub struct BudgetTerm {
    pub name: &'static str,
    pub value: f64,
}

/// Error-budget monomials (implied constants 1, `X^ε` dropped).
pub fn budget_terms(seq: Sequence, x: f64, q: u64) -> Vec<BudgetTerm> {
    let qf = q as f64;
    let g = g_of(q);
    let lx = x.ln();
    match seq {
        Sequence::Cusp => vec![
            BudgetTerm { name: "q^-1 X^3/2 g(q)", value: x.powf(1.5) * g / qf },
            BudgetTerm { name: "q^5/54 X^47/54", value: qf.powf(5.0 / 54.0) * x.powf(47.0 / 54.0) },
            BudgetTerm { name: "q^1/2 X^1/2", value: (qf * x).sqrt() },
        ],
        Sequence::Divisor => {
            let t = num_divisors(q) as f64;
            vec![
                BudgetTerm { name: "q^-1 X^3/2 g(q)", value: x.powf(1.5) * g / qf },
                BudgetTerm { name: "q^1/2 X^1/2 tau(q) log^4 X", value: (qf * x).sqrt() * t * lx.powi(4) },
                BudgetTerm {
                    name: "q^1/4 X^3/4 (log^3 X + tau(q) log^5/2 X)",
                    value: qf.powf(0.25) * x.powf(0.75) * (lx.powi(3) + t * lx.powf(2.5)),
                },
                BudgetTerm { name: "q^5/36 X^61/72", value: qf.powf(5.0 / 36.0) * x.powf(61.0 / 72.0) },
            ]
        }
    }
}

/// Index of the largest of the leading cusp monomials with `g(q)` omitted:
/// `0` for `q^{-1} X^{3/2}`, `1` for `q^{5/54} X^{47/54}`, `2` for `q^{1/2} X^{1/2}`.
pub fn dominant_monomial_cusp(x: f64, q: f64) -> usize {
    let v = [x.powf(1.5) / q, q.powf(5.0 / 54.0) * x.powf(47.0 / 54.0), (q * x).sqrt()];
    (0..3).max_by(|&i, &j| v[i].total_cmp(&v[j])).unwrap()
}

#[derive(Debug, Clone, Default)]
pub struct RegimeOptions {
    /// Rankin–Selberg constant for the cusp prediction
    pub c_hat: Option<f64>,
    /// smoothing length override for the divisor prediction
    pub big_h: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VarianceReport {
    pub sequence: Sequence,
    #[serde(rename = "X")]
    pub x: f64,
    pub q: u64,
    #[serde(rename = "H")]
    pub big_h: f64,
    pub exact: f64,
    pub prediction: f64,
    pub budget: Vec<BudgetTerm>,
    pub budget_sum: f64,
    /// `(exact - prediction) / budget_sum`
    pub ratio: f64,
    pub dominant: &'static str,
    pub regime: Regime,
}

/// Exact variance against its prediction and the named error budget.
///
/// Cusp: prediction `c_hat · X`. Divisor: prediction is the sum of the
/// `Y` and `K` smooth main terms at the default (or given) `H`.
pub fn regime_report(
    seq: Sequence,
    x: f64,
    q: u64,
    hecke: Option<&HeckeTable>,
    arith: Option<&ArithTables>,
    opts: &RegimeOptions,
) -> Result<VarianceReport> {
    check_q(q)?;
    let (exact, prediction, big_h) = match seq {
        Sequence::Cusp => {
            let t = hecke.ok_or_else(|| Error::InvalidArgument("cusp report needs a Hecke table".into()))?;
            let c = match opts.c_hat {
                Some(c) => c,
                None => crate::forms::default_c_hat(t)?,
            };
            (variance_cusp_exact(x, q, t)?, c * x, opts.big_h.unwrap_or_else(|| default_h_cusp(x, q)))
        }
        Sequence::Divisor => {
            let t = arith.ok_or_else(|| Error::InvalidArgument("divisor report needs arithmetic tables".into()))?;
            let big_h = opts.big_h.unwrap_or_else(|| default_h_divisor(x, q));
            let w = SmoothWeight::new(big_h, x)?;
            let y = mt_smooth_divisor(OmegaKind::Y, &w, q, t, None)?;
            let k = mt_smooth_divisor(OmegaKind::K, &w, q, t, None)?;
            (variance_divisor_exact(x, q, t)?, y.main.value + k.main.value, big_h)
        }
    };
    let budget = budget_terms(seq, x, q);
    let budget_sum: f64 = budget.iter().map(|b| b.value).sum();
    let dominant = budget.iter().max_by(|a, b| a.value.total_cmp(&b.value)).map(|b| b.name).unwrap_or("");
    Ok(VarianceReport {
        sequence: seq,
        x,
        q,
        big_h,
        exact,
        prediction,
        budget,
        budget_sum,
        ratio: (exact - prediction) / budget_sum,
        dominant,
        regime: Regime::classify(x, q),
    })
}

/// `points` distinct integers spaced geometrically over `[q_min, q_max]`.
pub fn geometric_q_grid(q_min: u64, q_max: u64, points: usize) -> Vec<u64> {
    if points <= 1 || q_max <= q_min {
        return vec![q_min];
    }
    let ratio = q_max as f64 / q_min as f64;
    let mut out: Vec<u64> = (0..points)
        .map(|i| (q_min as f64 * ratio.powf(i as f64 / (points - 1) as f64)).round() as u64)
        .collect();
    out.dedup();
    out
}

/// Reports for every `q` in parallel, returned in input order.
pub fn sweep(
    seq: Sequence,
    x: f64,
    qs: &[u64],
    hecke: Option<&HeckeTable>,
    arith: Option<&ArithTables>,
    opts: &RegimeOptions,
) -> Result<Vec<VarianceReport>> {
    qs.par_iter().map(|&q| regime_report(seq, x, q, hecke, arith, opts)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mt_divisor_q_one() {
        let x = 1234.5;
        let v = mt_divisor(1, x, 1).unwrap().value;
        assert!((v - x * (x.ln() + 2.0 * euler_gamma() - 1.0)).abs() < 1e-9 * v);
    }

    #[test]
    fn mt_divisor_sums_close_to_dirichlet() {
        let t = ArithTables::build(100_000).unwrap();
        let x = 1e5;
        let total: f64 = (1..=12).map(|b| mt_divisor(b, x, 12).unwrap().value).sum();
        let exact: f64 = (1..=100_000).map(|n| t.tau[n] as f64).sum();
        assert!((total - exact).abs() / exact < 0.02);
    }

    #[test]
    fn polyfit_recovers_cubic() {
        let xs: Vec<f64> = (0..9).map(|i| -3.0 + i as f64 * 0.7).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 1.0 - 2.0 * x + 0.5 * x * x + 0.25 * x * x * x).collect();
        let c = polyfit(&xs, &ys, 3).unwrap();
        for (a, b) in c.iter().zip([1.0, -2.0, 0.5, 0.25]) {
            assert!((a - b).abs() < 1e-10, "{c:?}");
        }
    }

    #[test]
    fn regimes() {
        assert_eq!(Regime::classify(1e4, 5), Regime::SmallModulus);
        assert_eq!(Regime::classify(1e4, 50), Regime::Transition);
        assert_eq!(Regime::classify(1e4, 100), Regime::Diagonal);
        assert_eq!(Regime::classify(1e4, 10_000), Regime::Degenerate);
    }

    #[test]
    fn default_h_respects_floor() {
        let h = default_h_cusp(1e5, 1000);
        assert!(h >= 1e3 && h <= 2.5e4);
        assert!((default_h_cusp(1e5, 10) - 1e5f64.powf(0.6)).abs() < 1e-9);
    }
}
