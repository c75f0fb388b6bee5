//! Two-sided numerical verification of the Voronoi summation formula for
//! the Hecke eigenvalues of Δ and for the divisor function.
//!
//! For `(h, q) = 1` and `h h̄ ≡ 1 (mod q)`:
//!
//! * cusp: `Σ a(n) e(hn/q) w(n) = (1/q) Σ a(n) e(-h̄n/q) ω_J(√n/q)`
//! * divisor: `Σ τ(n) e(hn/q) w(n) = (1/q) ∫ (log x + 2γ - 2 log q) w
//!   + (1/q) Σ τ(n) e(-h̄n/q) ω_Y(√n/q) + (1/q) Σ τ(n) e(h̄n/q) ω_K(√n/q)`

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::arith::{mod_inverse, ArithTables};
use crate::error::{Error, Result};
use crate::forms::HeckeTable;
use crate::specfun::gamma::euler_gamma;
use crate::specfun::omega::{DualValues, OmegaEval, OmegaKind};
use crate::specfun::weight::SmoothWeight;

/// Relative size below which dual terms are dropped.
pub const DUAL_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sequence {
    Cusp,
    Divisor,
}

impl Sequence {
    pub fn name(&self) -> &'static str {
        match self {
            Sequence::Cusp => "cusp",
            Sequence::Divisor => "divisor",
        }
    }
}

impl std::str::FromStr for Sequence {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cusp" => Ok(Sequence::Cusp),
            "divisor" => Ok(Sequence::Divisor),
            _ => Err(Error::InvalidArgument(format!("unknown sequence {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VoronoiReport {
    pub sequence: Sequence,
    pub q: u64,
    pub h: i64,
    #[serde(rename = "X")]
    pub x: f64,
    #[serde(rename = "H")]
    pub big_h: f64,
    pub lhs_re: f64,
    pub lhs_im: f64,
    pub rhs_re: f64,
    pub rhs_im: f64,
    /// explicit main term (divisor only)
    pub main_term: f64,
    pub abs_diff: f64,
    pub rel_diff: f64,
    /// largest dual index used
    pub n_cut_dual: usize,
    /// `⌈q² X H⁻² (log X)²⌉`
    pub n_cut_rule: usize,
    /// magnitude estimate of the omitted dual tail
    pub tail_estimate: f64,
    pub quad_tol: f64,
    pub passed: bool,
}

impl VoronoiReport {
    pub fn lhs(&self) -> Complex64 {
        Complex64::new(self.lhs_re, self.lhs_im)
    }
    pub fn rhs(&self) -> Complex64 {
        Complex64::new(self.rhs_re, self.rhs_im)
    }
}

/// `e(a/q)` with the numerator reduced modulo `q` first.
pub fn additive_character(a: i128, q: u64) -> Complex64 {
    let r = a.rem_euclid(q as i128) as f64;
    Complex64::from_polar(1.0, 2.0 * PI * r / q as f64)
}

/// Twisted smooth sum `Σ u(n) e(hn/q) w(n)` over the support of `w`.
pub fn twisted_sum(u: impl Fn(usize) -> f64, h: i64, q: u64, w: &SmoothWeight) -> Complex64 {
    let lo = w.h.floor() as usize + 1;
    let hi = w.x.ceil() as usize;
    let mut acc = Complex64::new(0.0, 0.0);
    for n in lo..hi {
        let wn = w.value(n as f64);
        if wn != 0.0 {
            acc += additive_character(h as i128 * n as i128, q) * (u(n) * wn);
        }
    }
    acc
}

/// `⌈q² X H⁻² (log X)²⌉`.
pub fn dual_cutoff_rule(q: u64, w: &SmoothWeight) -> usize {
    let qf = q as f64;
    (qf * qf * w.x / (w.h * w.h) * w.x.ln().powi(2)).ceil() as usize
}

fn check_args(q: u64, h: i64, w: &SmoothWeight, n_max: usize) -> Result<u64> {
    if q == 0 {
        return Err(Error::InvalidArgument("q must be positive".into()));
    }
    if (w.x.ceil() as usize) > n_max {
        return Err(Error::InsufficientTable { needed: w.x.ceil() as u64, available: n_max as u64 });
    }
    if q == 1 {
        return Ok(0);
    }
    mod_inverse(h, q)
}

fn dual_sum(u: &impl Fn(usize) -> f64, dual: &DualValues, sign: i128, hbar: u64, q: u64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, &om) in dual.values.iter().enumerate() {
        let n = i + 1;
        acc += additive_character(sign * hbar as i128 * n as i128, q) * (u(n) * om);
    }
    acc / q as f64
}

/// Crude magnitude of the omitted dual terms: final-block size times the
/// number of terms used, scaled by `1/q`.
fn tail_estimate(dual: &DualValues, q: u64) -> f64 {
    dual.last_block_ratio * dual.peak * dual.values.len() as f64 / q as f64
}

fn finish(mut r: VoronoiReport, tol: f64) -> VoronoiReport {
    let d = r.lhs() - r.rhs();
    r.abs_diff = d.norm();
    r.rel_diff = r.abs_diff / r.lhs().norm().max(r.rhs().norm()).max(1e-12);
    r.passed = r.rel_diff <= tol;
    r
}

/// Cusp-form side by side, with `ω_J` by direct quadrature.
pub fn voronoi_check_cusp(q: u64, h: i64, w: &SmoothWeight, table: &HeckeTable, tol: f64) -> Result<VoronoiReport> {
    let hbar = check_args(q, h, w, table.n_max)?;
    let u = |n: usize| if n <= table.n_max { table.a(n) } else { f64::NAN };
    let lhs = twisted_sum(u, h, q, w);
    let rule = dual_cutoff_rule(q, w);
    let eval = OmegaEval::direct(OmegaKind::CUSP, w);
    let dual = eval.dual(q as f64, rule, DUAL_EPS, table.n_max)?;
    if !dual.converged {
        return Err(Error::InsufficientTable { needed: (dual.values.len() * 2) as u64, available: table.n_max as u64 });
    }
    let rhs = dual_sum(&u, &dual, -1, hbar, q);
    let report = VoronoiReport {
        sequence: Sequence::Cusp,
        q,
        h,
        x: w.x,
        big_h: w.h,
        lhs_re: lhs.re,
        lhs_im: lhs.im,
        rhs_re: rhs.re,
        rhs_im: rhs.im,
        main_term: 0.0,
        abs_diff: 0.0,
        rel_diff: 0.0,
        n_cut_dual: dual.values.len(),
        n_cut_rule: rule,
        tail_estimate: tail_estimate(&dual, q),
        quad_tol: 1e-11,
        passed: false,
    };
    Ok(finish(report, tol))
}

/// `(1/q) ∫ (log x + 2γ - 2 log q) w(x) dx`.
pub fn divisor_main_term(q: u64, w: &SmoothWeight) -> Result<f64> {
    let c = 2.0 * euler_gamma() - 2.0 * (q as f64).ln();
    Ok((w.integral_log()? + c * w.integral()) / q as f64)
}

/// Divisor-function side by side, with `ω_Y`, `ω_K` by direct quadrature.
pub fn voronoi_check_divisor(q: u64, h: i64, w: &SmoothWeight, tables: &ArithTables, tol: f64) -> Result<VoronoiReport> {
    let hbar = check_args(q, h, w, tables.n_max)?;
    let u = |n: usize| if n <= tables.n_max { tables.tau[n] as f64 } else { f64::NAN };
    let lhs = twisted_sum(u, h, q, w);
    let rule = dual_cutoff_rule(q, w);
    let dy = OmegaEval::direct(OmegaKind::Y, w).dual(q as f64, rule, DUAL_EPS, tables.n_max)?;
    let dk = OmegaEval::direct(OmegaKind::K, w).dual(q as f64, 1, DUAL_EPS, tables.n_max)?;
    if !dy.converged || !dk.converged {
        return Err(Error::InsufficientTable { needed: (dy.values.len() * 2) as u64, available: tables.n_max as u64 });
    }
    let main = divisor_main_term(q, w)?;
    let rhs = main + dual_sum(&u, &dy, -1, hbar, q) + dual_sum(&u, &dk, 1, hbar, q);
    let report = VoronoiReport {
        sequence: Sequence::Divisor,
        q,
        h,
        x: w.x,
        big_h: w.h,
        lhs_re: lhs.re,
        lhs_im: lhs.im,
        rhs_re: rhs.re,
        rhs_im: rhs.im,
        main_term: main,
        abs_diff: 0.0,
        rel_diff: 0.0,
        n_cut_dual: dy.values.len().max(dk.values.len()),
        n_cut_rule: rule,
        tail_estimate: tail_estimate(&dy, q) + tail_estimate(&dk, q),
        quad_tol: 1e-11,
        passed: false,
    };
    Ok(finish(report, tol))
}

/// Dispatch on the sequence.
pub fn voronoi_check(
    seq: Sequence,
    q: u64,
    h: i64,
    w: &SmoothWeight,
    hecke: Option<&HeckeTable>,
    arith: Option<&ArithTables>,
    tol: f64,
) -> Result<VoronoiReport> {
    match seq {
        Sequence::Cusp => {
            voronoi_check_cusp(q, h, w, hecke.ok_or_else(|| Error::InvalidArgument("cusp check needs a Hecke table".into()))?, tol)
        }
        Sequence::Divisor => voronoi_check_divisor(
            q,
            h,
            w,
            arith.ok_or_else(|| Error::InvalidArgument("divisor check needs arithmetic tables".into()))?,
            tol,
        ),
    }
}
