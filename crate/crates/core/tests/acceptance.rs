//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p apvar-core --test acceptance -- --nocapture`.

use std::f64::consts::PI;
use std::time::Instant;

use apvar_core::arith::{divisors_of, gcd, ramanujan_sum, ArithTables};
use apvar_core::checks::{self, CheckRow};
use apvar_core::forms::{default_c_hat, delta_coefficients_exact, estimate_rankin_residue, uniform_grid, HeckeTable};
use apvar_core::shifted::{decomposition_check, lambda_h, lambda_series_check, Coefficients, MoebiusPrefix};
use apvar_core::variance::{
    default_h_cusp, dominant_monomial_cusp, geometric_q_grid, mt_smooth_cusp, sweep, RegimeOptions,
};
use apvar_core::voronoi::{voronoi_check_cusp, voronoi_check_divisor};
use apvar_core::{Sequence, SmoothWeight};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Line {
    id: u32,
    passed: bool,
    detail: String,
}

fn line(id: u32, passed: bool, detail: String) -> Line {
    println!("criterion {id:>2}: {} {detail}", if passed { "PASS" } else { "FAIL" });
    Line { id, passed, detail }
}

fn suite_line(id: u32, rows: &[CheckRow], secs: f64) -> Line {
    let worst = rows.iter().map(|r| r.diff / r.tol).fold(0.0, f64::max);
    let failed: Vec<String> = rows.iter().filter(|r| !r.passed).map(|r| format!("{} {}", r.suite, r.case)).collect();
    line(
        id,
        failed.is_empty(),
        format!("{} rows, worst diff/tol {worst:.3e}, {secs:.1}s{}", rows.len(), if failed.is_empty() { String::new() } else { format!(", failing: {failed:?}") }),
    )
}

/// `Σ_{d mod k, (d,k)=1} e(hd/k)` with the phase reduced exactly.
fn ramanujan_direct(k: u64, h: i64) -> f64 {
    (1..=k)
        .filter(|&d| gcd(d, k) == 1)
        .map(|d| {
            let r = (h as i128 * d as i128).rem_euclid(k as i128) as f64;
            (2.0 * PI * r / k as f64).cos()
        })
        .sum()
}

fn criterion_1() -> Line {
    let t0 = Instant::now();
    let tables = ArithTables::build(200).unwrap();
    let mut worst = 0.0f64;
    let mut exact = true;
    for k in 1..=200u64 {
        for h in -200..=200i64 {
            let d = ramanujan_direct(k, h);
            let a = ramanujan_sum(k, h);
            let b = tables.ramanujan_sum(k, h).unwrap();
            worst = worst.max((d - a as f64).abs());
            exact &= d.round() as i64 == a && a == b;
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    line(1, exact && worst < 1e-9 && secs < 5.0, format!("max |direct - closed| {worst:.2e}, rounding exact {exact}, {secs:.2}s"))
}

fn criterion_2() -> Line {
    let tau = delta_coefficients_exact(10_000).unwrap();
    let known: [i128; 10] = [1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920];
    let mut ok = tau[1..=10] == known;
    let n = 10_000usize;
    // τ(m)τ(n) = Σ_{d | (m,n)} d^11 τ(mn/d²)
    for m in 1..=n {
        for k in 1..=n / m {
            let g = gcd(m as u64, k as u64);
            let rhs: i128 = divisors_of(g).iter().map(|&d| (d as i128).pow(11) * tau[m * k / (d * d) as usize]).sum();
            if tau[m] * tau[k] != rhs {
                ok = false;
            }
        }
    }
    let sieve = ArithTables::build(n).unwrap();
    let mut worst_ap = 0.0f64;
    for p in 2..=n {
        if sieve.spf[p] as usize == p {
            worst_ap = worst_ap.max((tau[p] as f64 / (p as f64).powf(5.5)).abs());
        }
    }
    let t0 = Instant::now();
    let big = delta_coefficients_exact(100_000).unwrap();
    let secs = t0.elapsed().as_secs_f64();
    ok &= big[..=n] == tau[..];
    line(
        2,
        ok && worst_ap <= 2.0 && secs < 60.0,
        format!("Hecke relations exact {ok}, max |a(p)| {worst_ap:.6}, n_max=1e5 build {secs:.2}s"),
    )
}

fn criterion_3() -> Line {
    let k_max = 1_000_000usize;
    let mob = MoebiusPrefix::build(k_max).unwrap();
    let sieve = ArithTables::build(k_max).unwrap();
    let zeta2 = PI * PI / 6.0;
    let mut worst = 0.0f64;
    let mut worst_lib = 0.0f64;
    for h in 1..=100i64 {
        // independent oracle: von Sterneck values summed directly
        let direct: f64 = (1..=k_max as u64).map(|k| sieve.ramanujan_sum(k, h).unwrap() as f64 / (k * k) as f64).sum();
        let sigma: f64 = divisors_of(h as u64).iter().map(|&d| 1.0 / d as f64).sum();
        worst = worst.max((direct - sigma / zeta2).abs());
        for hh in [h, -h] {
            worst_lib = worst_lib.max(lambda_series_check(hh, 2.0, k_max, &mob).unwrap().diff);
        }
    }
    line(3, worst <= 1e-5 && worst_lib <= 1e-5, format!("max diff direct {worst:.2e}, library {worst_lib:.2e} (K = 1e6, 1 <= |h| <= 100)"))
}

fn criterion_6() -> Line {
    let t0 = Instant::now();
    let rows = checks::parseval_suite().unwrap();
    let secs = t0.elapsed().as_secs_f64();
    let l2: Vec<&CheckRow> = rows.iter().filter(|r| r.case.ends_with("int w^2")).collect();
    let vs_x: Vec<&CheckRow> = rows.iter().filter(|r| r.case.ends_with("vs X")).collect();
    let part1 = l2.iter().all(|r| r.passed);
    let part2 = vs_x.iter().all(|r| r.passed);
    let dev: Vec<String> = vs_x.iter().map(|r| format!("{}: |value - X| = {:.1} vs 2H = {:.0}", r.case, r.diff, r.tol)).collect();
    line(
        6,
        part1 && part2,
        format!(
            "contour vs int w^2 {} (worst {:.2e} X); {}; {secs:.1}s",
            if part1 { "ok" } else { "FAILED" },
            l2.iter().map(|r| r.diff / (r.tol / 1e-6)).fold(0.0, f64::max),
            dev.join("; ")
        ),
    )
}

fn criterion_8() -> Line {
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    let mut cases = 0;
    let hecke = HeckeTable::build(20_000).unwrap();
    let arith = ArithTables::build(200_000).unwrap();
    let w = SmoothWeight::new(500.0, 2000.0).unwrap();
    for (q, hs) in [(1u64, vec![1i64]), (5, vec![1, 2, 3, 4])] {
        for h in hs {
            let r = voronoi_check_cusp(q, h, &w, &hecke, 1e-5).unwrap();
            worst = worst.max(r.rel_diff);
            cases += 1;
        }
    }
    for x in [2000.0, 4000.0] {
        let w = SmoothWeight::new(x / 4.0, x).unwrap();
        for (q, hs) in [(1u64, vec![1i64]), (4, vec![1, 3])] {
            for h in hs {
                let r = voronoi_check_divisor(q, h, &w, &arith, 1e-5).unwrap();
                worst = worst.max(r.rel_diff);
                cases += 1;
            }
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    line(8, worst <= 1e-5 && secs < 300.0, format!("{cases} cases, max rel_diff {worst:.2e}, {secs:.1}s"))
}

fn criterion_9() -> Line {
    let hecke = HeckeTable::build(20_000).unwrap();
    let arith = ArithTables::build(200_000).unwrap();
    let mut worst = 0.0f64;
    for (x, q) in [(2000.0, 6u64), (2000.0, 10), (4000.0, 12)] {
        let w = SmoothWeight::new(x / 4.0, x).unwrap();
        for c in [Coefficients::Cusp(&hecke), Coefficients::Divisor(&arith)] {
            worst = worst.max(decomposition_check(&w, q, c).unwrap().rel_diff);
        }
    }
    line(9, worst <= 1e-6, format!("max rel_diff {worst:.2e} over 3 (X, q) x 2 sequences"))
}

fn c_hat_subgrids(table: &HeckeTable) -> Vec<f64> {
    let grids = [
        uniform_grid(1e4, 1e5, 10),
        uniform_grid(1e4, 5.5e4, 10),
        uniform_grid(5.5e4, 1e5, 10),
        uniform_grid(1e4, 1e5, 19).into_iter().step_by(2).collect(),
        uniform_grid(1e4, 1e5, 19).into_iter().skip(1).step_by(2).collect(),
        uniform_grid(3e4, 8e4, 12),
    ];
    grids.iter().map(|g| estimate_rankin_residue(g, table).unwrap().0).collect()
}

fn criterion_10(table: &HeckeTable, c_hat: f64) -> Line {
    let (x, q) = (1e5, 1000u64);
    let w = SmoothWeight::new(default_h_cusp(x, q), x).unwrap();
    let mt = mt_smooth_cusp(&w, q, table, None).unwrap();
    let ratio = mt.value / x;
    let rel = (ratio - c_hat).abs() / c_hat;
    line(10, rel <= 0.1, format!("MT/X = {ratio:.6}, c_hat = {c_hat:.6}, relative gap {rel:.3} (H = {:.1}, dual tail {:.2e})", w.h, mt.tail_budget / x))
}

fn criterion_11(estimates: &[f64]) -> Line {
    let lo = estimates.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = estimates.iter().cloned().fold(0.0, f64::max);
    let spread = (hi - lo) / lo;
    line(11, spread <= 0.05, format!("{} sub-grid estimates in [{lo:.6}, {hi:.6}], spread {spread:.4}", estimates.len()))
}

fn criterion_12(table: &HeckeTable, c_hat: f64) -> Line {
    let t0 = Instant::now();
    let x: f64 = 1e5;
    let qs = geometric_q_grid(x.powf(0.55).ceil() as u64, x.powf(0.9).floor() as u64, 10);
    let opts = RegimeOptions { c_hat: Some(c_hat), big_h: None };
    let reports = sweep(Sequence::Cusp, x, &qs, Some(table), None, &opts).unwrap();
    let worst = reports.iter().map(|r| (r.exact - c_hat * x).abs() / r.budget_sum).fold(0.0, f64::max);
    // numerical crossover of q^{-1} X^{3/2} and q^{5/54} X^{47/54}
    let (mut a, mut b) = (1.0f64, x);
    for _ in 0..200 {
        let m = (a * b).sqrt();
        if dominant_monomial_cusp(x, m) == 0 {
            a = m;
        } else {
            b = m;
        }
    }
    let crossover = a.ln() / x.ln();
    let q_star = x.powf(34.0 / 59.0);
    let consistent = qs.iter().all(|&q| dominant_monomial_cusp(x, q as f64) == if (q as f64) < q_star { 0 } else { 1 });
    let crossover_ok = (crossover - 34.0 / 59.0).abs() < 1e-9 && consistent;
    let secs = t0.elapsed().as_secs_f64();
    line(
        12,
        worst <= 10.0 && crossover_ok && reports.len() == 10 && secs < 600.0,
        format!(
            "q = {:?}, max |A - c_hat X| / budget {worst:.3e}, crossover exponent {crossover:.9} (34/59 = {:.9}), grid dominance consistent {consistent}, {secs:.1}s",
            qs,
            34.0 / 59.0
        ),
    )
}

fn criterion_13() -> Line {
    let mob = MoebiusPrefix::build(200_000).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut worst = 0.0f64;
    let mut ok = true;
    for _ in 0..50 {
        let x = 10f64.powf(rng.gen_range(-1.0..7.0));
        let y = 10f64.powf(rng.gen_range(-1.0..7.0));
        let h = rng.gen_range(1..=5000i64) * if rng.gen_bool(0.5) { 1 } else { -1 };
        let a = lambda_h(x, y, h, 100_000, &mob).unwrap();
        let b = lambda_h(x, y, h, 200_000, &mob).unwrap();
        let change = (a.value - b.value).abs();
        ok &= change <= a.tail_bound;
        worst = worst.max(change / a.tail_bound);
    }
    line(13, ok, format!("50 samples, max change / tail bound {worst:.3e}"))
}

#[test]
fn acceptance() {
    let mut lines = vec![criterion_1(), criterion_2(), criterion_3()];
    let t = Instant::now();
    lines.push(suite_line(4, &checks::mellin_kernel_suite().unwrap(), t.elapsed().as_secs_f64()));
    let t = Instant::now();
    lines.push(suite_line(5, &checks::omega_contour_suite().unwrap(), t.elapsed().as_secs_f64()));
    lines.push(criterion_6());
    let t = Instant::now();
    lines.push(suite_line(7, &checks::mellin_barnes_suite().unwrap(), t.elapsed().as_secs_f64()));
    lines.push(criterion_8());
    lines.push(criterion_9());
    let table = HeckeTable::build(200_000).unwrap();
    let estimates = c_hat_subgrids(&table);
    let c_hat = default_c_hat(&table).unwrap();
    lines.push(criterion_10(&table, c_hat));
    lines.push(criterion_11(&estimates));
    lines.push(criterion_12(&table, c_hat));
    lines.push(criterion_13());
    lines.sort_by_key(|l| l.id);

    let failed: Vec<&Line> = lines.iter().filter(|l| !l.passed).collect();
    println!("{} of {} criteria pass", lines.len() - failed.len(), lines.len());
    // The |value - X| <= 2H half of criterion 6 cannot hold for a
    // point-symmetric ramp (int w^2 = X - 3H + 2H int S^2 < X - 2H); it is
    // reported as failing above and is the only failure tolerated here.
    for l in &failed {
        assert_eq!(l.id, 6, "criterion {} failed: {}", l.id, l.detail);
        assert!(l.detail.starts_with("contour vs int w^2 ok"), "{}", l.detail);
    }
}
