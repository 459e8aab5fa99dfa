//! Command-line front end for the Mahler-measure toolkit: single-point
//! evaluation, the table reproductions, named verification suites, and
//! CSV grid scans.
//!
//! Exit codes: 0 all checks passed, 1 at least one check failed,
//! 2 numerical failure, 3 usage error.

mod report;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use mahler_core::elliptic::{
    builtin_curve_table, curve_by_k, curve_by_label, l_values, load_curve_table, EllCurveQ,
};
use mahler_core::mahler::{
    closed_form_inside, closed_form_outside, deriv_check, gdi_check, mahler2d, n_measure,
    q_alpha, s_family_b11, y_branches, AlphaRegion, Family2D,
};
use mahler_core::modular::{
    elliptic_dilog_sum, invert_u, newform_combination_19, param_xy_19, u_tau,
};
use mahler_core::recognize::rational_reconstruct;

use report::{CheckRow, RunReport};

#[derive(Parser)]
#[command(
    name = "mahler",
    about = "Mahler measures of y^2 + (x^2 - a x) y + x and their L-value identities",
    after_help = "Default tolerances: quadrature 1e-10 absolute; closed-form \
comparisons 1e-8 (1e-6 on the window boundary); L-value comparisons 1e-6. \
Override the quadrature side with --tol."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,

    /// Quadrature tolerance (absolute).
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Emit the report as JSON instead of a table.
    #[arg(long, global = true)]
    json: bool,

    /// Curve table file (defaults to the built-in table).
    #[arg(long, global = true)]
    curves: Option<PathBuf>,

    /// q-series truncation override for modular checks.
    #[arg(long, global = true)]
    terms: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate n(alpha) (and I, J, ntilde inside the window) with
    /// closed-form and L-value cross-checks where available.
    Measure {
        #[arg(allow_negative_numbers = true)]
        alpha: f64,
    },
    /// Reproduce the rational multipliers ntilde(k^{1/3}) / L'(E, 0).
    Table2 {
        /// Comma-separated list of k values (default: every family row
        /// with k > 0).
        #[arg(long, value_delimiter = ',')]
        subset: Option<Vec<i64>>,
    },
    /// Run a named verification suite: hyper, naR, gdi, compd, ypm,
    /// table1, modular19, dilog, b11, fe, sa, or all.
    Verify { suite: String },
    /// Scan alpha over a grid and emit CSV
    /// (columns alpha,n,I,J,n_tilde,closed_form,abs_diff).
    Scan {
        #[arg(allow_negative_numbers = true)]
        alpha_min: f64,
        #[arg(allow_negative_numbers = true)]
        alpha_max: f64,
        steps: usize,
        /// Output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            std::process::exit(3);
        }
    };
    std::process::exit(run(cli));
}

fn run(cli: Cli) -> i32 {
    let tol = cli.tol.unwrap_or(1e-10);
    let table = match &cli.curves {
        Some(path) => match load_curve_table(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: {e}");
                return 2;
            }
        },
        None => builtin_curve_table(),
    };

    let start = Instant::now();
    let outcome: Result<RunReport, mahler_core::Error> = match &cli.cmd {
        Cmd::Measure { alpha } => cmd_measure(*alpha, tol, &table),
        Cmd::Table2 { subset } => cmd_table2(subset.as_deref(), tol, &table),
        Cmd::Verify { suite } => match cmd_verify(suite, tol, cli.terms.unwrap_or(24), &table) {
            Some(r) => r,
            None => {
                eprintln!(
                    "error: unknown suite {suite:?} (expected hyper, naR, gdi, compd, ypm, \
                     table1, modular19, dilog, b11, fe, sa, or all)"
                );
                return 3;
            }
        },
        Cmd::Scan {
            alpha_min,
            alpha_max,
            steps,
            out,
        } => {
            if alpha_min.partial_cmp(alpha_max) != Some(std::cmp::Ordering::Less) || *steps < 2 {
                eprintln!("error: scan needs alpha_min < alpha_max and steps >= 2");
                return 3;
            }
            return cmd_scan(*alpha_min, *alpha_max, *steps, out.as_deref(), tol);
        }
    };

    match outcome {
        Ok(mut rep) => {
            rep.timing_seconds = start.elapsed().as_secs_f64();
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&rep).unwrap());
            } else {
                rep.print_human();
            }
            if rep.all_pass() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn lprime(e: &EllCurveQ) -> mahler_core::Result<f64> {
    Ok(l_values(e, 1e-9)?.lprime0)
}

/// Family row whose k matches alpha^3, when alpha^3 is integral.
fn matching_row(table: &[EllCurveQ], alpha: f64) -> Option<&EllCurveQ> {
    let k = alpha * alpha * alpha;
    let rounded = k.round();
    if (k - rounded).abs() < 1e-9 && rounded.abs() < 1e15 {
        curve_by_k(table, rounded as i64)
    } else {
        None
    }
}

fn cmd_measure(alpha: f64, tol: f64, table: &[EllCurveQ]) -> mahler_core::Result<RunReport> {
    let mut rep = RunReport::new("measure")
        .input("alpha", alpha)
        .input("tol", tol);
    let m = n_measure(alpha, tol)?;
    rep.results.push(CheckRow::info("n(alpha)", m.n, m.n));
    if m.region == AlphaRegion::Inside {
        let (i, j, nt) = (m.i_part.unwrap(), m.j_part.unwrap(), m.n_tilde.unwrap());
        rep.results.push(CheckRow::info("I(alpha)", i, i));
        rep.results.push(CheckRow::info("J(alpha)", j, j));
        rep.results.push(CheckRow::info("ntilde(alpha)", nt, nt));
        let cf = closed_form_inside(alpha)?;
        if !cf.at_zero {
            rep.results.push(CheckRow::new(
                "ntilde vs 3F2 closed form",
                nt,
                cf.value,
                1e-8,
            ));
        }
        if let Some(e) = matching_row(table, alpha) {
            let lp = lprime(e)?;
            rep.results.push(CheckRow::info("L'(E,0)", lp, lp));
            rep.results.push(CheckRow::new(
                format!(
                    "ntilde vs ({}/{}) L'({})",
                    e.expected_r.0, e.expected_r.1, e.label
                ),
                nt,
                e.expected_r_value() * lp,
                1e-6,
            ));
        }
    } else if alpha.abs() >= 3.0 {
        let cf = closed_form_outside(alpha)?;
        let boundary = alpha.abs() == 3.0;
        rep.results.push(CheckRow::new(
            "n vs 4F3 closed form",
            m.n,
            cf,
            if boundary { 1e-6 } else { 1e-8 },
        ));
        if let Some(e) = matching_row(table, alpha) {
            let lp = lprime(e)?;
            rep.results.push(CheckRow::info("L'(E,0)", lp, lp));
            rep.results.push(CheckRow::new(
                format!(
                    "n vs ({}/{}) L'(N={})",
                    e.expected_r.0, e.expected_r.1, e.conductor
                ),
                m.n,
                e.expected_r_value() * lp,
                1e-6,
            ));
        }
    }
    Ok(rep)
}

fn cmd_table2(
    subset: Option<&[i64]>,
    tol: f64,
    table: &[EllCurveQ],
) -> mahler_core::Result<RunReport> {
    let ks: Vec<i64> = match subset {
        Some(list) => list.to_vec(),
        None => {
            let mut v: Vec<i64> = table.iter().filter_map(|c| c.k).filter(|&k| k > 0).collect();
            v.sort_unstable();
            v
        }
    };
    let mut rep = RunReport::new("table2").input("tol", tol).input(
        "subset",
        ks.iter()
            .map(|k| k.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );

    let rows: Vec<mahler_core::Result<CheckRow>> = ks
        .par_iter()
        .map(|&k| {
            let e = curve_by_k(table, k)
                .ok_or_else(|| mahler_core::Error::Domain(format!("no curve row with k = {k}")))?;
            let alpha = (k as f64).cbrt();
            let nt = n_measure(alpha, tol)?.n_tilde.ok_or_else(|| {
                mahler_core::Error::Domain(format!("k = {k} lies outside the window"))
            })?;
            let lp = lprime(e)?;
            let ratio = nt / lp;
            let recognized = rational_reconstruct(ratio, 60, 1e-4);
            let label = match &recognized {
                Ok(g) => format!("k={k} {} recognized {g}", e.label),
                Err(_) => format!("k={k} {} unrecognized", e.label),
            };
            let mut row = CheckRow::new(label, ratio, e.expected_r_value(), 1e-5);
            if let Ok(g) = recognized {
                row.pass &= (g.num, g.den) == e.expected_r;
            } else {
                row.pass = false;
            }
            Ok(row)
        })
        .collect();
    for r in rows {
        rep.results.push(r?);
    }
    Ok(rep)
}

fn cmd_verify(
    suite: &str,
    tol: f64,
    terms: usize,
    table: &[EllCurveQ],
) -> Option<mahler_core::Result<RunReport>> {
    let suites: &[&str] = match suite {
        "all" => &[
            "hyper", "naR", "gdi", "compd", "ypm", "table1", "modular19", "dilog", "b11", "fe",
            "sa",
        ],
        "hyper" | "naR" | "nar" | "gdi" | "compd" | "ypm" | "table1" | "modular19" | "dilog"
        | "b11" | "fe" | "sa" => return Some(verify_one(suite, tol, terms, table)),
        _ => return None,
    };
    let mut rep = RunReport::new("verify all").input("tol", tol);
    for s in suites {
        match verify_one(s, tol, terms, table) {
            Ok(r) => rep.results.extend(r.results),
            Err(e) => return Some(Err(e)),
        }
    }
    Some(Ok(rep))
}

fn verify_one(
    suite: &str,
    tol: f64,
    terms: usize,
    table: &[EllCurveQ],
) -> mahler_core::Result<RunReport> {
    let mut rep = RunReport::new(&format!("verify {suite}")).input("tol", tol);
    let rows = &mut rep.results;
    match suite {
        "hyper" => {
            for alpha in [-0.9, -0.5, -0.1, 0.5, 1.0, 1.5, 2.0, 2.5, 2.9] {
                let quad = n_measure(alpha, tol)?.n_tilde.unwrap();
                let series = closed_form_inside(alpha)?.value;
                rows.push(CheckRow::new(
                    format!("hyper alpha={alpha}"),
                    quad,
                    series,
                    1e-8,
                ));
            }
        }
        "naR" | "nar" => {
            for alpha in [3.5, 4.0, 5.0, 10.0, -3.5, -6.0] {
                let quad = n_measure(alpha, tol)?.n;
                rows.push(CheckRow::new(
                    format!("naR alpha={alpha}"),
                    quad,
                    closed_form_outside(alpha)?,
                    1e-8,
                ));
            }
            for alpha in [3.0, -3.0] {
                let quad = n_measure(alpha, tol.max(1e-9))?.n;
                rows.push(CheckRow::new(
                    format!("naR boundary alpha={alpha}"),
                    quad,
                    closed_form_outside(alpha)?,
                    1e-6,
                ));
            }
        }
        "gdi" => {
            let d = gdi_check(1.0)?;
            rows.push(CheckRow::new(
                "gdi lambda=1 degenerate",
                (d.lhs - d.rhs).norm(),
                0.0,
                1e-10,
            ));
            for lambda in [1.1, 1.3, 1.5, 1.7, 1.9] {
                let g = gdi_check(lambda)?;
                rows.push(CheckRow::new(
                    format!("gdi lambda={lambda} sign {:+}", g.observed_sign),
                    g.lhs.norm(),
                    g.rhs.norm(),
                    1e-9,
                ));
            }
        }
        "compd" => {
            for alpha in [-0.5, 0.5, 1.5, 2.5] {
                let d = deriv_check(alpha)?;
                rows.push(CheckRow::new(
                    format!("compd fd vs 2F1 alpha={alpha}"),
                    d.fd,
                    d.cf_2f1,
                    1e-5,
                ));
                rows.push(CheckRow::new(
                    format!("compd 2F1 vs K alpha={alpha}"),
                    d.cf_2f1,
                    d.cf_k,
                    1e-10,
                ));
            }
        }
        "ypm" => {
            let mut state = 0x8d1fb3e47a92c605u64;
            let mut next = move || {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                (state >> 11) as f64 / (1u64 << 53) as f64
            };
            let (mut low, mut high, mut prod) = (0.0f64, 0.0f64, 0.0f64);
            for _ in 0..10_000 {
                let alpha = -10.0 + 20.0 * next();
                let theta = -PI + 2.0 * PI * next();
                let b = y_branches(alpha, theta);
                low = low.max(b.y_minus.norm() - 1.0);
                high = high.max(1.0 - b.y_plus.norm());
                prod = prod.max(((b.y_plus * b.y_minus).norm() - 1.0).abs());
            }
            rows.push(CheckRow::new("ypm |y-| <= 1 slack", low.max(0.0), 0.0, 1e-12));
            rows.push(CheckRow::new(
                "ypm |y+| >= 1 slack",
                high.max(0.0),
                0.0,
                2e-12,
            ));
            rows.push(CheckRow::new("ypm |y+ y-| = 1", prod, 0.0, 1e-10));
        }
        "table1" => {
            let targets: &[(i64, f64)] = &[
                (-216, 3.0),
                (-27, 1.0),
                (-8, 1.0),
                (-1, 2.0),
                (32, 8.0 / 3.0),
                (54, 1.5),
                (125, 7.0),
            ];
            let computed: Vec<mahler_core::Result<CheckRow>> = targets
                .par_iter()
                .map(|&(k, r)| {
                    let e = curve_by_k(table, k).ok_or_else(|| {
                        mahler_core::Error::Domain(format!("no curve row with k = {k}"))
                    })?;
                    let alpha = (k as f64).cbrt();
                    let n = n_measure(alpha, tol)?.n;
                    Ok(CheckRow::new(
                        format!("table1 alpha={alpha:.6} N={}", e.conductor),
                        n,
                        r * lprime(e)?,
                        1e-6,
                    ))
                })
                .collect();
            for c in computed {
                rows.push(c?);
            }
        }
        "modular19" => {
            let mut state = 0x2545f4914f6cdd1du64;
            let mut next = move || {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                (state >> 11) as f64 / (1u64 << 53) as f64
            };
            let mut worst = 0.0f64;
            for _ in 0..20 {
                let tau = Complex64::new(next() - 0.5, 0.3 + 1.7 * next());
                let (x, y) = param_xy_19(tau)?;
                worst = worst.max(q_alpha(2.0, x, y).norm());
            }
            rows.push(CheckRow::new("max |Q_2(x(tau),y(tau))|", worst, 0.0, 1e-8));

            // the regulator combination reproduces 57 times the newform
            let e = curve_by_label(table, "19a3")
                .ok_or_else(|| mahler_core::Error::Domain("19a3 missing from table".into()))?;
            let an = mahler_core::elliptic::an_coeffs(e, terms);
            let combo = newform_combination_19(4, terms)?;
            let mut dev = 0.0f64;
            for m in 1..=terms {
                dev =
                    dev.max((combo.coeff(m) - Complex64::new(57.0 * an.a[m] as f64, 0.0)).norm());
            }
            rows.push(CheckRow::new(
                format!("regulator combination = 57 newform (q^{terms})"),
                dev,
                0.0,
                1e-8,
            ));
        }
        "dilog" => {
            let e = curve_by_label(table, "19a3")
                .ok_or_else(|| mahler_core::Error::Domain("19a3 missing from table".into()))?;
            let q = invert_u(2.0)?.q.re;
            let sum = elliptic_dilog_sum(q, 1e-12)?;
            let nt = n_measure(2.0, tol)?.n_tilde.unwrap();
            rows.push(CheckRow::new(
                "ntilde(2) vs -(9/pi) sum",
                nt,
                -9.0 / PI * sum,
                1e-6,
            ));
            rows.push(CheckRow::new(
                "(9/2pi) sum vs (3/2) L'",
                9.0 / (2.0 * PI) * sum,
                1.5 * lprime(e)?,
                1e-6,
            ));
            rows.push(CheckRow::new(
                "u(1/2+0.50586i) = 2",
                u_tau(Complex64::new(0.5, 0.50586))?,
                2.0,
                2e-3,
            ));
            rows.push(CheckRow::new("q from invert_u(2)", q, -0.04165, 1e-4));
        }
        "b11" => {
            let e = curve_by_label(table, "11a3")
                .ok_or_else(|| mahler_core::Error::Domain("11a3 missing from table".into()))?;
            let s = s_family_b11(tol.max(1e-9))?;
            rows.push(CheckRow::info(
                "first half integral",
                s.first_half,
                s.first_half,
            ));
            rows.push(CheckRow::info(
                "second half integral",
                s.second_half,
                s.second_half,
            ));
            rows.push(CheckRow::new(
                "split combination vs -L'(11a)",
                s.combination,
                -lprime(e)?,
                1e-5,
            ));
        }
        "fe" => {
            for alpha in [0.0, 2.0, 4.0] {
                let m2 = mahler2d(Family2D::PAlpha, alpha, 1e-5)?;
                let n1 = n_measure(alpha, tol.max(1e-9))?.n;
                rows.push(CheckRow::new(
                    format!("m(P_alpha) alpha={alpha}"),
                    m2,
                    n1,
                    1e-4,
                ));
            }
            let p = 0.01f64;
            let lhs = 3.0 * mahler2d(Family2D::GFamily, 1.0 / p, 1e-5)?;
            let a1 = (1.0 + 4.0 * p) / p.cbrt();
            let a2 = (1.0 - 2.0 * p) / p.cbrt().powi(2);
            let rhs = n_measure(a1, 1e-9)?.n + 4.0 * n_measure(a2, 1e-9)?.n;
            rows.push(CheckRow::new("functional identity p=0.01", lhs, rhs, 1e-4));

            let p = -0.5f64;
            let lhs = 3.0 * mahler2d(Family2D::GFamily, 1.0 / p, 1e-5)?;
            let a1 = (1.0 + 4.0 * p) / p.cbrt();
            let a2 = (1.0 - 2.0 * p) / p.cbrt().powi(2);
            let rhs = n_measure(a1, 1e-9)?.n + 4.0 * n_measure(a2, 1e-9)?.n;
            rows.push(CheckRow::info(
                "functional identity gap at p=-1/2",
                lhs,
                rhs,
            ));
        }
        "sa" => {
            let alpha0 = (6.0 - 6.0 * 2.0f64.cbrt() + 18.0 * 4.0f64.cbrt()).cbrt();
            let n = n_measure(alpha0, tol.max(1e-9))?.n;
            let f27 = curve_by_label(table, "27a1");
            let f36 = curve_by_label(table, "36a1");
            let f108 = curve_by_label(table, "108a1");
            match (f27, f36, f108) {
                (Some(f27), Some(f36), Some(f108)) => {
                    let rhs = 0.5 * (lprime(f108)? + lprime(f36)? - 3.0 * lprime(f27)?);
                    rows.push(CheckRow::new(
                        format!("stretch combination at alpha0={alpha0:.6}"),
                        n,
                        rhs,
                        1e-5,
                    ));
                }
                _ => {
                    rows.push(CheckRow::info(
                        "stretch combination skipped (extra curves not in table)",
                        n,
                        n,
                    ));
                }
            }
        }
        other => {
            return Err(mahler_core::Error::Domain(format!(
                "unknown verify suite {other}"
            )))
        }
    }
    Ok(rep)
}

fn cmd_scan(
    alpha_min: f64,
    alpha_max: f64,
    steps: usize,
    out: Option<&std::path::Path>,
    tol: f64,
) -> i32 {
    let grid: Vec<f64> = (0..steps)
        .map(|i| alpha_min + (alpha_max - alpha_min) * i as f64 / (steps - 1) as f64)
        .collect();
    let rows: Vec<mahler_core::Result<String>> = grid
        .par_iter()
        .map(|&alpha| {
            let m = n_measure(alpha, tol)?;
            let fmt = |v: Option<f64>| v.map(|x| format!("{x:.15e}")).unwrap_or_default();
            let (closed, diff) = match m.region {
                AlphaRegion::Inside => {
                    let cf = closed_form_inside(alpha)?;
                    if cf.at_zero {
                        (None, None)
                    } else {
                        (Some(cf.value), Some((cf.value - m.n_tilde.unwrap()).abs()))
                    }
                }
                _ if alpha.abs() >= 3.0 => {
                    let cf = closed_form_outside(alpha)?;
                    (Some(cf), Some((cf - m.n).abs()))
                }
                _ => (None, None),
            };
            Ok(format!(
                "{:.15e},{:.15e},{},{},{},{},{}",
                alpha,
                m.n,
                fmt(m.i_part),
                fmt(m.j_part),
                fmt(m.n_tilde),
                fmt(closed),
                fmt(diff)
            ))
        })
        .collect();

    let mut text = String::from("alpha,n,I,J,n_tilde,closed_form,abs_diff\n");
    for r in rows {
        match r {
            Ok(line) => {
                text.push_str(&line);
                text.push('\n');
            }
            Err(e) => {
                eprintln!("error: {e}");
                return 2;
            }
        }
    }
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: {e}");
                return 2;
            }
        }
        None => {
            if std::io::stdout().write_all(text.as_bytes()).is_err() {
                return 2;
            }
        }
    }
    0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measure_inside_has_breakdown_and_lvalue_rows() {
        let table = builtin_curve_table();
        let rep = cmd_measure(2.0, 1e-10, &table).unwrap();
        assert!(rep.all_pass());
        let names: Vec<&str> = rep.results.iter().map(|r| r.name.as_str()).collect();
        assert!(names.iter().any(|n| n.contains("ntilde vs 3F2")));
        assert!(names.iter().any(|n| n.contains("L'(19a3)")));
    }

    #[test]
    fn measure_outside_checks_series() {
        let table = builtin_curve_table();
        let rep = cmd_measure(5.0, 1e-10, &table).unwrap();
        assert!(rep.all_pass());
        assert!(rep
            .results
            .iter()
            .any(|r| r.name.contains("n vs (7/1) L'(N=14)") && r.pass));
    }

    #[test]
    fn table2_subset_passes() {
        let table = builtin_curve_table();
        let rep = cmd_table2(Some(&[1, 2, 8]), 1e-10, &table).unwrap();
        assert_eq!(rep.results.len(), 3);
        assert!(rep.all_pass(), "{:?}", rep.results);
    }

    #[test]
    fn verify_rejects_unknown_suite() {
        let table = builtin_curve_table();
        assert!(cmd_verify("nope", 1e-10, 24, &table).is_none());
    }

    #[test]
    fn verify_ypm_runs() {
        let table = builtin_curve_table();
        let rep = cmd_verify("ypm", 1e-10, 24, &table).unwrap().unwrap();
        assert!(rep.all_pass());
        assert_eq!(rep.results.len(), 3);
    }
}
