//! Values frozen from 30-digit mpmath evaluations.

use apvar_core::specfun::bessel::{bessel_j, bessel_k0, bessel_y0};
use apvar_core::specfun::gamma::{ln_gamma, zeta_derivative};
use apvar_core::specfun::mellin::{mellin_psi, weight_l2};
use apvar_core::specfun::omega::{omega_direct_real, OmegaKind};
use apvar_core::SmoothWeight;
use num_complex::Complex64;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn weight() -> SmoothWeight {
    SmoothWeight::new(500.0, 2000.0).unwrap()
}

#[test]
fn bessel_values() {
    let j = [
        (11, 5.0, 0.000_350_927_449_766_209_010_15),
        (11, 30.0, 0.025_058_805_137_824_543_668),
        (11, 200.0, 0.056_443_381_222_896_511_358),
        (0, 0.3, 0.977_626_246_538_296_089_22),
        (0, 47.5, -0.106_082_714_158_893_537_48),
    ];
    for (n, x, v) in j {
        assert!(rel(bessel_j(n, x), v) < 1e-12, "J_{n}({x})");
    }
    for (x, v) in [(0.01, -3.005_455_637_083_645_944_5), (2.5, 0.498_070_359_615_231_887_83), (60.0, 0.047_358_952_209_449_399_203)] {
        assert!(rel(bessel_y0(x), v) < 1e-12, "Y0({x})");
    }
    for (x, v) in [(0.01, 4.721_244_730_161_094_944_3), (1.5, 0.213_805_562_647_525_736_72), (40.0, 8.392_861_100_099_567_033_7e-19)] {
        assert!(rel(bessel_k0(x), v) < 1e-12, "K0({x})");
    }
}

#[test]
fn log_gamma_values() {
    let cases = [
        ((0.3, 0.7), (-0.093_170_312_498_134_180_893, -1.223_957_365_713_688_73)),
        ((2.5, -14.0), (-15.787_750_933_335_142_338, -25.948_937_560_557_318_891)),
        ((-3.2, 1.1), (-3.505_831_683_175_191_946_1, -10.166_838_226_825_007_528)),
        ((0.5, 100.0), (-156.160_694_146_284_989_18, 360.517_435_267_906_435_92)),
    ];
    for ((a, b), (re, im)) in cases {
        let v = ln_gamma(Complex64::new(a, b)).unwrap();
        assert!((v - Complex64::new(re, im)).norm() < 1e-12 * (1.0 + re.abs() + im.abs()), "{a}+{b}i: {v}");
    }
}

#[test]
fn zeta_derivatives_at_two() {
    assert!(rel(zeta_derivative(2.0, 1).unwrap(), -0.937_548_254_315_843_753_7) < 1e-12);
    assert!(rel(zeta_derivative(2.0, 2).unwrap(), 1.989_280_234_298_901_023_4) < 1e-11);
}

#[test]
fn omega_direct_values() {
    let w = weight();
    let cases = [
        (OmegaKind::CUSP, 0.05, -162.298_671_813_348_094_46),
        (OmegaKind::CUSP, 0.3, 0.009_708_790_285_983_391_472_8),
        (OmegaKind::Y, 0.1, 2.813_071_216_437_585_194_5),
        (OmegaKind::Y, 0.5, 0.002_616_947_049_298_900_583),
        (OmegaKind::K, 0.01, 34.105_901_735_159_748_051),
        (OmegaKind::K, 0.03, 0.008_996_959_018_013_861_561_3),
    ];
    for (kind, a, v) in cases {
        let got = omega_direct_real(kind, a, &w).unwrap();
        // absolute floor from the 1e-11 X quadrature budget
        assert!((got - v).abs() < 1e-8 * v.abs() + 1e-7, "{kind:?} {a}: {got} vs {v}");
    }
}

#[test]
fn mellin_transform_values() {
    let w = weight();
    let cases = [
        ((0.5, 3.0), (-15.279_468_926_721_445_586, 14.680_714_882_657_489_949)),
        ((1.2, -0.4), (-3942.248_383_764_322_545_5, -1203.875_091_218_478_574_4)),
        ((0.25, 20.0), (-0.213_122_533_442_233_601_03, -0.045_798_727_238_956_832_917)),
    ];
    for ((a, b), (re, im)) in cases {
        let v = mellin_psi(Complex64::new(a, b), &w).unwrap();
        let e = Complex64::new(re, im);
        assert!((v - e).norm() < 1e-9 * e.norm(), "psi({a}+{b}i) = {v}");
    }
}

#[test]
fn weight_integrals() {
    let w = weight();
    assert!(rel(weight_l2(&w).unwrap(), 905.705_252_773_351_434_62) < 1e-10);
    assert!(rel(w.integral_log().unwrap(), 7100.262_663_355_259_132_1) < 1e-12);
}
