use std::fs;
use std::path::{Path, PathBuf};

use apvar_core::arith::ARITH_CAP;
use apvar_core::cache;
use apvar_core::checks::{self, CheckRow};
use apvar_core::forms::{default_c_hat, HECKE_CAP};
use apvar_core::shifted::{
    decomposition_check, fake_main_term, offdiag_budget, offdiag_exact, Coefficients, KernelPair, MoebiusPrefix,
    OffDiagKind,
};
use apvar_core::variance::{
    default_h_cusp, default_h_divisor, geometric_q_grid, sweep, RegimeOptions, VarianceReport,
};
use apvar_core::voronoi::voronoi_check;
use apvar_core::{ArithTables, Error, HeckeTable, Sequence, SmoothWeight};
use serde_json::json;

use crate::args::{ShiftedArgs, SweepArgs, VarianceArgs, VoronoiArgs};
use crate::report::{num, Outcome, Table};
use crate::tables;

/// Failure classes, mapped to exit codes by `main`.
#[derive(Debug)]
pub enum CliError {
    /// exit 2
    Usage(String),
    /// exit 1
    Numeric(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::OutOfRange(_) | Error::Capacity { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> CliResult<T> {
    s.parse::<T>().map_err(CliError::from)
}

pub fn sieve(n_max: usize, cache_dir: Option<&Path>) -> CliResult<Outcome> {
    if n_max > HECKE_CAP {
        return Err(Error::Capacity { requested: n_max as u64, cap: HECKE_CAP as u64 }.into());
    }
    let dir: PathBuf = cache_dir.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("apvar-cache"));
    fs::create_dir_all(&dir).map_err(|e| CliError::Numeric(format!("{}: {e}", dir.display())))?;
    let arith = ArithTables::build(n_max)?;
    let hecke = HeckeTable::build(n_max)?;
    let path = cache::cache_path(&dir, n_max);
    cache::write(&path, &arith, &hecke)?;
    let on_disk = fs::read(&path).map_err(|e| CliError::Numeric(format!("{}: {e}", path.display())))?;
    let (a2, h2) = cache::decode(&on_disk)?;
    let identical = cache::encode(&a2, &h2)? == on_disk;
    let checksum = u64::from_le_bytes(on_disk[on_disk.len() - 8..].try_into().expect("8 bytes"));

    let mut t = Table::new(&["n_max", "path", "bytes", "checksum", "reload_identical"]);
    t.push(vec![
        n_max.to_string(),
        path.display().to_string(),
        on_disk.len().to_string(),
        format!("{checksum:016x}"),
        identical.to_string(),
    ]);
    let results = json!({"path": path, "bytes": on_disk.len(), "checksum": checksum, "reload_identical": identical});
    let mut o = Outcome::new(t, json!({"n_max": n_max, "cache_dir": dir}), results);
    if !identical {
        o.failures.push(0);
    }
    Ok(o)
}

pub fn voronoi(a: &VoronoiArgs, cache_dir: Option<&Path>) -> CliResult<Outcome> {
    let seq: Sequence = parse(&a.seq)?;
    let w = SmoothWeight::new(a.big_h, a.x)?;
    let start = (a.x.ceil() as usize).max(tables::dual_reach(a.x, a.q, a.big_h)).max(1000);
    let report = match seq {
        Sequence::Cusp => tables::with_growth(
            start,
            HECKE_CAP,
            |n| tables::hecke(n, cache_dir),
            |t| voronoi_check(seq, a.q, a.h, &w, Some(t), None, a.tol),
        )?,
        Sequence::Divisor => tables::with_growth(start, ARITH_CAP, tables::arith, |t| {
            voronoi_check(seq, a.q, a.h, &w, None, Some(t), a.tol)
        })?,
    };
    let mut t = Table::new(&[
        "sequence", "q", "h", "X", "H", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "main_term", "abs_diff", "rel_diff",
        "n_cut_dual", "n_cut_rule", "tail_estimate", "quad_tol", "passed",
    ]);
    let r = &report;
    t.push(vec![
        r.sequence.name().into(),
        r.q.to_string(),
        r.h.to_string(),
        num(r.x),
        num(r.big_h),
        num(r.lhs_re),
        num(r.lhs_im),
        num(r.rhs_re),
        num(r.rhs_im),
        num(r.main_term),
        num(r.abs_diff),
        num(r.rel_diff),
        r.n_cut_dual.to_string(),
        r.n_cut_rule.to_string(),
        num(r.tail_estimate),
        num(r.quad_tol),
        r.passed.to_string(),
    ]);
    let params = json!({"seq": seq, "q": a.q, "h": a.h, "X": a.x, "H": a.big_h, "tol": a.tol});
    let mut o = Outcome::new(t, params, json!([report]));
    o.tolerances = json!({"rel_diff": a.tol});
    if !report.passed {
        o.failures.push(0);
    }
    Ok(o)
}

pub fn mellin_check(suites: &[String]) -> CliResult<Outcome> {
    let all = suites.is_empty();
    let want = |s: &str| all || suites.iter().any(|x| x == s);
    let mut rows: Vec<CheckRow> = Vec::new();
    if want("mellin-kernel") {
        rows.extend(checks::mellin_kernel_suite()?);
    }
    if want("omega") {
        rows.extend(checks::omega_contour_suite()?);
    }
    if want("parseval") {
        rows.extend(checks::parseval_suite()?);
    }
    if want("mellin-barnes") {
        rows.extend(checks::mellin_barnes_suite()?);
    }
    let mut t = Table::new(&["suite", "case", "lhs", "rhs", "diff", "tol", "passed"]);
    let mut o_fail = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        t.push(vec![
            r.suite.into(),
            r.case.clone(),
            num(r.lhs),
            num(r.rhs),
            num(r.diff),
            num(r.tol),
            r.passed.to_string(),
        ]);
        if !r.passed {
            o_fail.push(i);
        }
    }
    let mut o = Outcome::new(t, json!({"suites": suites}), serde_json::to_value(&rows).expect("plain data"));
    o.tolerances = json!({
        "mellin-kernel": "1e-7 relative",
        "omega-mellin": "1e-6 relative",
        "omega-shift": "1e-8 relative",
        "parseval": "1e-6*X against int w^2; 2H against X",
        "mellin-barnes": "1e-8 absolute",
    });
    o.failures = o_fail;
    Ok(o)
}

fn parse_range(s: &str) -> CliResult<(u64, u64)> {
    let bad = || CliError::Usage(format!("--q-range expects LO:HI, got {s:?}"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
    if lo == 0 || hi < lo {
        return Err(bad());
    }
    Ok((lo, hi))
}

/// Runs the variance reports for `qs` and tabulates them.
fn variance_table(
    seq: Sequence,
    x: f64,
    qs: &[u64],
    c_hat: Option<f64>,
    big_h: Option<f64>,
    cache_dir: Option<&Path>,
) -> CliResult<(Vec<VarianceReport>, Option<f64>)> {
    if x.is_nan() || x < 1.0 {
        return Err(CliError::Usage(format!("X = {x} must be at least 1")));
    }
    match seq {
        Sequence::Cusp => {
            let t = tables::hecke((x.ceil() as usize).max(100_000), cache_dir)?;
            let c = match c_hat {
                Some(c) => c,
                None => default_c_hat(&t)?,
            };
            let opts = RegimeOptions { c_hat: Some(c), big_h };
            Ok((sweep(seq, x, qs, Some(&t), None, &opts)?, Some(c)))
        }
        Sequence::Divisor => {
            let reach = qs
                .iter()
                .map(|&q| tables::dual_reach(x, q, big_h.unwrap_or_else(|| default_h_divisor(x, q))))
                .max()
                .unwrap_or(0);
            let t = tables::arith(reach.max(x.ceil() as usize))?;
            let opts = RegimeOptions { c_hat: None, big_h };
            Ok((sweep(seq, x, qs, None, Some(&t), &opts)?, None))
        }
    }
}

fn report_outcome(reports: &[VarianceReport], params: serde_json::Value) -> Outcome {
    let n_budget = reports.first().map_or(0, |r| r.budget.len());
    let mut header = vec!["X", "q", "H", "sequence", "exact", "prediction"];
    let budget_cols: Vec<String> = (1..=n_budget).map(|i| format!("budget_term_{i}")).collect();
    header.extend(budget_cols.iter().map(String::as_str));
    header.extend(["budget_sum", "ratio", "dominant", "regime"]);
    let mut t = Table::new(&header);
    let mut failures = Vec::new();
    for (i, r) in reports.iter().enumerate() {
        let mut row = vec![num(r.x), r.q.to_string(), num(r.big_h), r.sequence.name().into(), num(r.exact), num(r.prediction)];
        row.extend(r.budget.iter().map(|b| num(b.value)));
        row.extend([num(r.budget_sum), num(r.ratio), r.dominant.into(), r.regime.label().into()]);
        t.push(row);
        if !r.ratio.is_finite() {
            failures.push(i);
        }
    }
    let budget_names: Vec<&str> = reports.first().map_or(vec![], |r| r.budget.iter().map(|b| b.name).collect());
    let mut o = Outcome::new(t, params, serde_json::to_value(reports).expect("plain data"));
    o.tolerances = json!({"ratio": "finite", "budget_terms": budget_names});
    o.failures = failures;
    o
}

pub fn variance(a: &VarianceArgs, cache_dir: Option<&Path>) -> CliResult<Outcome> {
    let seq: Sequence = parse(&a.seq)?;
    let qs: Vec<u64> = match (a.q, &a.q_range) {
        (Some(q), None) => vec![q],
        (None, Some(r)) => {
            let (lo, hi) = parse_range(r)?;
            match a.geometric {
                Some(p) => geometric_q_grid(lo, hi, p),
                None if hi - lo < 100_000 => (lo..=hi).collect(),
                None => return Err(CliError::Usage("--q-range spans too many moduli; add --geometric".into())),
            }
        }
        _ => return Err(CliError::Usage("give exactly one of --q and --q-range".into())),
    };
    if qs.contains(&0) {
        return Err(CliError::Usage("q must be positive".into()));
    }
    let (reports, c) = variance_table(seq, a.x, &qs, a.c_hat, a.big_h, cache_dir)?;
    let params = json!({"seq": seq, "X": a.x, "q": qs, "c_hat": c, "H": a.big_h});
    Ok(report_outcome(&reports, params))
}

pub fn sweep_cmd(a: &SweepArgs, cache_dir: Option<&Path>, threads: Option<usize>) -> CliResult<Outcome> {
    let seq: Sequence = parse(&a.seq)?;
    if a.q_min == 0 || a.q_max < a.q_min || a.points == 0 {
        return Err(CliError::Usage("need 1 <= q-min <= q-max and points >= 1".into()));
    }
    let qs = geometric_q_grid(a.q_min, a.q_max, a.points);
    let (reports, c) = variance_table(seq, a.x, &qs, a.c_hat, None, cache_dir)?;
    let params = json!({
        "seq": seq, "X": a.x, "q_min": a.q_min, "q_max": a.q_max, "points": a.points,
        "threads": threads.unwrap_or_else(rayon::current_num_threads), "q": qs, "c_hat": c,
    });
    Ok(report_outcome(&reports, params))
}

enum ShiftedKind {
    Off(OffDiagKind),
    Fake(KernelPair),
}

pub fn shifted_check(a: &ShiftedArgs, cache_dir: Option<&Path>) -> CliResult<Outcome> {
    let kind = match a.kind.to_ascii_lowercase().strip_prefix("fake-") {
        Some(p) => ShiftedKind::Fake(parse(p)?),
        None => ShiftedKind::Off(parse(&a.kind)?),
    };
    if a.q == 0 {
        return Err(CliError::Usage("q must be positive".into()));
    }
    let cusp = matches!(kind, ShiftedKind::Off(OffDiagKind::CuspJ));
    let big_h = a.big_h.unwrap_or_else(|| if cusp { default_h_cusp(a.x, a.q) } else { default_h_divisor(a.x, a.q) });
    let w = SmoothWeight::new(big_h, a.x)?;
    let params = json!({"kind": a.kind, "X": a.x, "q": a.q, "H": big_h, "tol": a.tol, "K": a.k});

    match kind {
        ShiftedKind::Fake(pair) => {
            let mob = MoebiusPrefix::build(a.k)?;
            let f = fake_main_term(pair, &w, a.q, a.k, &mob)?;
            let mut t = Table::new(&["kind", "X", "q", "H", "value", "budget", "ratio", "l_max", "lambda_tail"]);
            t.push(vec![
                format!("fake-{}", a.kind[5..].to_ascii_lowercase()),
                num(f.x),
                f.q.to_string(),
                num(f.big_h),
                num(f.value),
                num(f.budget),
                num(f.ratio),
                f.l_max.to_string(),
                num(f.lambda_tail),
            ]);
            let mut o = Outcome::new(t, params, json!([f]));
            o.tolerances = json!({"ratio": "finite"});
            if !f.ratio.is_finite() {
                o.failures.push(0);
            }
            Ok(o)
        }
        ShiftedKind::Off(k) => {
            let start = (a.x.ceil() as usize).max(tables::dual_reach(a.x, a.q, big_h));
            let run = |c: Coefficients<'_>| -> apvar_core::Result<_> {
                Ok((offdiag_exact(k, &w, a.q, c)?, decomposition_check(&w, a.q, c)?))
            };
            let (off, dec) = if cusp {
                tables::with_growth(start.min(HECKE_CAP), HECKE_CAP, |n| tables::hecke(n, cache_dir), |t| {
                    run(Coefficients::Cusp(t))
                })?
            } else {
                tables::with_growth(start, ARITH_CAP, tables::arith, |t| run(Coefficients::Divisor(t)))?
            };
            let budget = offdiag_budget(a.x, a.q, big_h);
            let passed = dec.rel_diff <= a.tol;
            let mut t = Table::new(&[
                "kind", "X", "q", "H", "value", "budget", "ratio", "n_cut", "tail_budget", "direct", "assembled",
                "decomposition_rel_diff", "passed",
            ]);
            let name = serde_json::to_value(off.kind).expect("plain enum");
            t.push(vec![
                name.as_str().unwrap_or_default().to_string(),
                num(a.x),
                a.q.to_string(),
                num(big_h),
                num(off.value),
                num(budget),
                num(off.value.abs() / budget),
                off.n_cut.to_string(),
                num(off.tail_budget),
                num(dec.direct),
                num(dec.assembled),
                num(dec.rel_diff),
                passed.to_string(),
            ]);
            let mut o = Outcome::new(t, params, json!({"offdiag": off, "budget": budget, "decomposition": dec}));
            o.tolerances = json!({"decomposition_rel_diff": a.tol});
            if !passed {
                o.failures.push(0);
            }
            Ok(o)
        }
    }
}
