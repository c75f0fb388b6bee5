//! Fixed verification suites shared by the command line and the tests.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::specfun::mellin::{
    mellin_barnes_check, mellin_k0_closed, mellin_k0_numeric, mellin_y0_closed, mellin_y0_numeric, parseval_contour,
    weight_l2, MellinLine,
};
use crate::specfun::omega::{omega_direct_real, OmegaContour, OmegaKind};
use crate::specfun::weight::SmoothWeight;

/// One line of a verification suite.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub suite: &'static str,
    pub case: String,
    pub lhs: f64,
    pub rhs: f64,
    /// the quantity compared against `tol`
    pub diff: f64,
    pub tol: f64,
    pub passed: bool,
}

impl CheckRow {
    pub fn new(suite: &'static str, case: String, lhs: f64, rhs: f64, diff: f64, tol: f64) -> Self {
        Self { suite, case, lhs, rhs, diff, tol, passed: diff <= tol }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

/// `∫K_0 x^{s-1}` and `∫Y_0 x^{s-1}` against their Gamma-function forms, relative 1e-7.
pub fn mellin_kernel_suite() -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for s in [0.3, 1.0, 0.45] {
        let (n, c) = (mellin_k0_numeric(s)?, mellin_k0_closed(s)?);
        rows.push(CheckRow::new("mellin-kernel", format!("K0 s={s}"), n, c, rel(n, c), 1e-7));
        if s != 1.0 {
            let (n, c) = (mellin_y0_numeric(s)?, mellin_y0_closed(s)?);
            rows.push(CheckRow::new("mellin-kernel", format!("Y0 s={s}"), n, c, rel(n, c), 1e-7));
        }
    }
    Ok(rows)
}

/// Twenty `(kind, β)` points at `X = 2000`, `H = 500`, all with `|ω|` well
/// above the quadrature floor.
pub fn omega_grid() -> Vec<(OmegaKind, f64)> {
    let mut g = Vec::new();
    for b in [0.02, 0.05, 0.1, 0.2, 0.4, 0.7, 1.0] {
        g.push((OmegaKind::CUSP, b));
    }
    for b in [0.02, 0.05, 0.1, 0.2, 0.4, 0.7, 1.0] {
        g.push((OmegaKind::Y, b));
    }
    for b in [0.004, 0.01, 0.015, 0.02, 0.03, 0.04] {
        g.push((OmegaKind::K, b));
    }
    g
}

fn contour_lines(kind: OmegaKind) -> (f64, f64) {
    match kind {
        OmegaKind::J { .. } => (0.25, 1.0),
        _ => (0.5, 1.0),
    }
}

/// Inverse Mellin integral against direct quadrature (relative 1e-6), and
/// the same integral on two vertical lines (relative 1e-8).
pub fn omega_contour_suite() -> Result<Vec<CheckRow>> {
    let w = SmoothWeight::new(500.0, 2000.0)?;
    let grid = omega_grid();
    let mut rows = Vec::new();
    for kind in [OmegaKind::CUSP, OmegaKind::Y, OmegaKind::K] {
        let pts: Vec<f64> = grid.iter().filter(|(k, _)| *k == kind).map(|p| p.1).collect();
        let max_log = pts.iter().map(|b| (b * b).ln().abs()).fold(0.0, f64::max);
        let (s1, s2) = contour_lines(kind);
        let c1 = OmegaContour::new(kind, &w, MellinLine::for_weight(s1, &w, 1e-12), max_log)?;
        let c2 = OmegaContour::new(kind, &w, MellinLine::for_weight(s2, &w, 1e-12), max_log)?;
        let name = match kind {
            OmegaKind::J { .. } => "J",
            OmegaKind::Y => "Y",
            OmegaKind::K => "K",
        };
        for b in pts {
            let direct = omega_direct_real(kind, b, &w)?;
            let m1 = c1.eval(b * b)?.re;
            let m2 = c2.eval(b * b)?.re;
            rows.push(CheckRow::new("omega-mellin", format!("{name} beta={b}"), m1, direct, rel(m1, direct), 1e-6));
            rows.push(CheckRow::new(
                "omega-shift",
                format!("{name} beta={b} sigma={s1}/{s2}"),
                m1,
                m2,
                rel(m1, m2),
                1e-8,
            ));
        }
    }
    Ok(rows)
}

/// `(1/2π) ∫ |ψ(1/2 + it)|^2 dt = ∫ w^2` within `1e-6·X`, and `|value - X| ≤ 2H`.
pub fn parseval_suite() -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for (h, x) in [(100.0, 1000.0), (1000.0, 4000.0)] {
        let w = SmoothWeight::new(h, x)?;
        let v = parseval_contour(&w, &MellinLine::for_weight(0.5, &w, 1e-12))?;
        let l2 = weight_l2(&w)?;
        rows.push(CheckRow::new("parseval", format!("X={x} H={h} vs int w^2"), v, l2, (v - l2).abs(), 1e-6 * x));
        rows.push(CheckRow::new("parseval", format!("X={x} H={h} vs X"), v, x, (v - x).abs(), 2.0 * h));
    }
    Ok(rows)
}

/// `(A+B)^{-λ}` and `log(A+B)(A+B)^{-λ}` against their Mellin–Barnes integrals, absolute 1e-8.
pub fn mellin_barnes_suite() -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for a in [0.1, 1.0, 10.0] {
        for b in [0.1, 1.0, 10.0] {
            for l in [0.5, 1.0, 3.0] {
                let c = -(0.5f64).min(l / 2.0);
                for log_variant in [false, true] {
                    let r = mellin_barnes_check(a, b, Complex64::new(l, 0.0), c, log_variant)?;
                    let tag = if log_variant { "log" } else { "plain" };
                    rows.push(CheckRow::new(
                        "mellin-barnes",
                        format!("{tag} A={a} B={b} lambda={l}"),
                        r.lhs,
                        r.rhs,
                        r.diff,
                        1e-8,
                    ));
                }
            }
        }
    }
    Ok(rows)
}
