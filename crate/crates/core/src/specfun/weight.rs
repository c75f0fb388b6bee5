//! Smooth cutoff `w` supported on `[H, X]`, equal to 1 on `[2H, X-H]`.
//!
//! Ramp profile: `S(t) = f(t)/(f(t)+f(1-t))` with `f(t) = e^{-1/t}`, so
//! `S(t) + S(1-t) = 1` and `∫w = X - 2H` exactly.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::specfun::quad::integrate;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothWeight {
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "X")]
    pub x: f64,
}

/// `(S, S', S'')` at `t ∈ [0, 1]`.
pub fn ramp(t: f64) -> (f64, f64, f64) {
    if t <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    if t >= 1.0 {
        return (1.0, 0.0, 0.0);
    }
    let u = 1.0 - t;
    // S = 1/(1+e^φ), φ = 1/t - 1/(1-t)
    let phi = 1.0 / t - 1.0 / u;
    let e = (-phi.abs()).exp();
    let (l, lm) = if phi >= 0.0 { (e / (1.0 + e), 1.0 / (1.0 + e)) } else { (1.0 / (1.0 + e), e / (1.0 + e)) };
    let ll = l * lm;
    let d1 = -1.0 / (t * t) - 1.0 / (u * u);
    let d2 = 2.0 / (t * t * t) - 2.0 / (u * u * u);
    let s1 = -ll * d1;
    let s2 = ll * (1.0 - 2.0 * l) * d1 * d1 - ll * d2;
    (l, s1, s2)
}

impl SmoothWeight {
    pub fn new(h: f64, x: f64) -> Result<Self> {
        if !(h > 0.0) || !(3.0 * h < x) || !x.is_finite() {
            return Err(Error::InvalidArgument(format!("need 0 < 3H < X, got H = {h}, X = {x}")));
        }
        Ok(Self { h, x })
    }

    /// `w^{(deriv)}(x)` for `deriv ∈ {0, 1, 2}`.
    pub fn eval(&self, x: f64, deriv: u32) -> Result<f64> {
        if deriv > 2 {
            return Err(Error::InvalidArgument(format!("derivative order {deriv} > 2")));
        }
        let (v, d1, d2) = self.eval_all(x);
        Ok([v, d1, d2][deriv as usize])
    }

    /// `w(x)`.
    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        let (h, big) = (self.h, self.x);
        if x <= h || x >= big {
            0.0
        } else if x < 2.0 * h {
            ramp((x - h) / h).0
        } else if x <= big - h {
            1.0
        } else {
            ramp((big - x) / h).0
        }
    }

    /// `(w, w', w'')` at `x`.
    pub fn eval_all(&self, x: f64) -> (f64, f64, f64) {
        let (h, big) = (self.h, self.x);
        if x <= h || x >= big {
            (0.0, 0.0, 0.0)
        } else if x < 2.0 * h {
            let (s, s1, s2) = ramp((x - h) / h);
            (s, s1 / h, s2 / (h * h))
        } else if x <= big - h {
            (1.0, 0.0, 0.0)
        } else {
            let (s, s1, s2) = ramp((big - x) / h);
            (s, -s1 / h, s2 / (h * h))
        }
    }

    /// `∫ w = X - 2H`.
    pub fn integral(&self) -> f64 {
        self.x - 2.0 * self.h
    }

    /// `∫ w(x) log(x) dx`: plateau in closed form, ramps by quadrature.
    pub fn integral_log(&self) -> Result<f64> {
        let (h, x) = (self.h, self.x);
        let prim = |y: f64| y * y.ln() - y;
        let plateau = prim(x - h) - prim(2.0 * h);
        let left = integrate(|t: f64| ramp(t).0 * (h * (1.0 + t)).ln(), 0.0, 1.0, 1e-14, 1e-15, 1000)?.value;
        let right = integrate(|t: f64| ramp(t).0 * (x - h * t).ln(), 0.0, 1.0, 1e-14, 1e-15, 1000)?.value;
        Ok(plateau + h * (left + right))
    }

    /// Breakpoints of the piecewise description.
    pub fn breaks(&self) -> [f64; 4] {
        [self.h, 2.0 * self.h, self.x - self.h, self.x]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_regions() {
        let w = SmoothWeight::new(100.0, 1000.0).unwrap();
        assert_eq!(w.value(500.0), 1.0);
        assert_eq!(w.value(100.0), 0.0);
        assert_eq!(w.value(1000.0), 0.0);
        let mid = w.value(150.0);
        assert!(mid > 0.0 && mid < 1.0);
        assert!(w.eval(500.0, 3).is_err());
        assert!(SmoothWeight::new(100.0, 300.0).is_err());
    }

    #[test]
    fn ramp_symmetry() {
        for i in 1..100 {
            let t = i as f64 / 100.0;
            assert!((ramp(t).0 + ramp(1.0 - t).0 - 1.0).abs() < 1e-15);
            assert!((ramp(t).1 - ramp(1.0 - t).1).abs() < 1e-12);
        }
        assert!((ramp(0.5).1 - 2.0).abs() < 1e-14);
    }
}
