//! Elliptic curves over Q at desk scale: Weierstrass invariants, naive
//! point counting, Hecke coefficients, a numerically determined
//! functional-equation sign, the completed L-value `Lambda(2)` (hence
//! `L'(E, 0)`), and AGM period lattices.
//!
//! Curves come from a plain-text table (one per line) shipped with the
//! crate; the family rows hold minimal models of `y^2 + k xy + k^2 y = x^3`,
//! an integral model of the curve cut out by `Q_a` with `a^3 = k`. The
//! conductor is table data, not computed.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use std::f64::consts::PI;

use crate::specfun::{agm, exp_integral_e1};
use crate::{Error, Result};

/// A Weierstrass curve over Q with table metadata and derived invariants.
#[derive(Debug, Clone)]
pub struct EllCurveQ {
    pub label: String,
    /// `alpha^3` for members of the family, `None` for auxiliary rows.
    pub k: Option<i64>,
    /// `[a1, a2, a3, a4, a6]`.
    pub a: [i64; 5],
    /// Conductor, supplied by the table.
    pub conductor: u64,
    /// Functional-equation sign if already resolved.
    pub eps: Option<i8>,
    /// Expected rational multiplier from the source tables (num, den).
    pub expected_r: (i64, i64),
    pub b2: i64,
    pub b4: i64,
    pub b6: i64,
    pub b8: i64,
    pub c4: i64,
    pub c6: i64,
    pub disc: i64,
}

impl EllCurveQ {
    pub fn new(
        label: &str,
        k: Option<i64>,
        a: [i64; 5],
        conductor: u64,
        eps: Option<i8>,
        expected_r: (i64, i64),
    ) -> Result<Self> {
        let [a1, a2, a3, a4, a6] = a;
        let b2 = a1 * a1 + 4 * a2;
        let b4 = 2 * a4 + a1 * a3;
        let b6 = a3 * a3 + 4 * a6;
        let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
        let c4 = b2 * b2 - 24 * b4;
        let c6 = -b2 * b2 * b2 + 36 * b2 * b4 - 216 * b6;
        let disc = -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6;
        if disc == 0 {
            return Err(Error::SingularCurve {
                label: label.to_string(),
            });
        }
        debug_assert_eq!(
            (c4 as i128).pow(3) - (c6 as i128).pow(2),
            1728 * disc as i128
        );
        Ok(EllCurveQ {
            label: label.to_string(),
            k,
            a,
            conductor,
            eps,
            expected_r,
            b2,
            b4,
            b6,
            b8,
            c4,
            c6,
            disc,
        })
    }

    /// Exact j-invariant `c4^3 / disc`.
    pub fn j_exact(&self) -> BigRational {
        let c4 = BigInt::from(self.c4);
        BigRational::new(c4.clone() * &c4 * &c4, BigInt::from(self.disc))
    }

    pub fn expected_r_value(&self) -> f64 {
        self.expected_r.0 as f64 / self.expected_r.1 as f64
    }

    /// The curve after the coordinate change
    /// `x = x' + r`, `y = y' + s x' + t` (unimodular, u = 1).
    pub fn shifted(&self, r: i64, s: i64, t: i64) -> Result<Self> {
        let [a1, a2, a3, a4, a6] = self.a;
        let na1 = a1 + 2 * s;
        let na2 = a2 - s * a1 + 3 * r - s * s;
        let na3 = a3 + r * a1 + 2 * t;
        let na4 = a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t;
        let na6 = a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1;
        EllCurveQ::new(
            &self.label,
            self.k,
            [na1, na2, na3, na4, na6],
            self.conductor,
            self.eps,
            self.expected_r,
        )
    }
}

/// j-invariant of the family member with `k = alpha^3`:
/// `j = k (k - 24)^3 / (k - 27)`, exact rational arithmetic.
pub fn family_j(k: &BigRational) -> Result<BigRational> {
    let twenty_seven = BigRational::from(BigInt::from(27));
    if *k == twenty_seven {
        return Err(Error::Domain(
            "family_j has a pole at k = 27 (degenerate curve)".into(),
        ));
    }
    let twenty_four = BigRational::from(BigInt::from(24));
    let d = k - &twenty_four;
    Ok(k * &d * &d * &d / (k - &twenty_seven))
}

/// Parse the curve table format:
/// `label, k (or -), a1, a2, a3, a4, a6, N, eps (or ?), r_num, r_den`.
pub fn parse_curve_table(text: &str) -> Result<Vec<EllCurveQ>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 11 {
            return Err(Error::Schema {
                line: idx + 1,
                reason: format!("expected 11 fields, found {}", fields.len()),
            });
        }
        let int = |s: &str, what: &str| -> Result<i64> {
            s.parse().map_err(|_| Error::Schema {
                line: idx + 1,
                reason: format!("bad {what}: {s:?}"),
            })
        };
        let k = if fields[1] == "-" {
            None
        } else {
            Some(int(fields[1], "k")?)
        };
        let a = [
            int(fields[2], "a1")?,
            int(fields[3], "a2")?,
            int(fields[4], "a3")?,
            int(fields[5], "a4")?,
            int(fields[6], "a6")?,
        ];
        let n = int(fields[7], "N")? as u64;
        let eps = match fields[8] {
            "?" => None,
            "1" | "+1" => Some(1),
            "-1" => Some(-1),
            other => {
                return Err(Error::Schema {
                    line: idx + 1,
                    reason: format!("bad eps: {other:?}"),
                })
            }
        };
        let r = (int(fields[9], "r_num")?, int(fields[10], "r_den")?);
        out.push(EllCurveQ::new(fields[0], k, a, n, eps, r)?);
    }
    Ok(out)
}

pub fn load_curve_table(path: &std::path::Path) -> Result<Vec<EllCurveQ>> {
    parse_curve_table(&std::fs::read_to_string(path)?)
}

/// The table shipped with the crate (all source-table rows plus the
/// conductor-11 curve and the two extra CM curves).
pub fn builtin_curve_table() -> Vec<EllCurveQ> {
    parse_curve_table(include_str!("../data/curves.csv")).expect("builtin table parses")
}

/// Find a family row by its `k` value.
pub fn curve_by_k(table: &[EllCurveQ], k: i64) -> Option<&EllCurveQ> {
    table.iter().find(|c| c.k == Some(k))
}

/// Find a row by label (first match).
pub fn curve_by_label<'a>(table: &'a [EllCurveQ], label: &str) -> Option<&'a EllCurveQ> {
    table.iter().find(|c| c.label == label)
}

fn mod_pos(v: i64, p: u64) -> u64 {
    v.rem_euclid(p as i64) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// Trace of Frobenius `a_p`.
///
/// Good primes: `a_p = p + 1 - #E(F_p)` by counting solutions of the
/// completed square `(2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2b4 x + b6`
/// through the quadratic character. Bad primes (`p | N`): `a_p = p -
/// #E_ns(F_p)` where the nonsingular count includes the point at infinity;
/// this yields +1 / -1 / 0 for split / nonsplit / additive reduction with
/// no case analysis.
pub fn ap_count(e: &EllCurveQ, p: u64) -> i64 {
    if e.conductor.is_multiple_of(p) {
        return p as i64 - count_nonsingular(e, p);
    }
    if p == 2 {
        let mut count = 1i64; // infinity
        for x in 0..2i64 {
            for y in 0..2i64 {
                let f = y * y + e.a[0] * x * y + e.a[2] * y - x * x * x - e.a[1] * x * x
                    - e.a[3] * x
                    - e.a[4];
                if f.rem_euclid(2) == 0 {
                    count += 1;
                }
            }
        }
        return 2 + 1 - count;
    }
    // odd good p: #E = 1 + sum_x (1 + chi(g(x))) with g the b-form cubic
    let b2 = mod_pos(e.b2, p);
    let b4 = mod_pos(e.b4, p);
    let b6 = mod_pos(e.b6, p);
    let half = (p - 1) / 2;
    let mut count = 1i64;
    for x in 0..p {
        let x2 = x * x % p;
        let g = (4 * (x2 % p) % p * x % p + b2 * x2 % p + 2 * b4 * x % p + b6) % p;
        if g == 0 {
            count += 1;
        } else if pow_mod(g, half, p) == 1 {
            count += 2;
        }
    }
    let ap = p as i64 + 1 - count;
    debug_assert!((ap * ap) as u64 <= 4 * p, "Hasse bound violated at p = {p}");
    ap
}

/// Count of nonsingular points over F_p (infinity included); brute force,
/// used only at the handful of small bad primes.
fn count_nonsingular(e: &EllCurveQ, p: u64) -> i64 {
    let pi = p as i64;
    let [a1, a2, a3, a4, a6] = e.a;
    let mut count = 1i64;
    for x in 0..pi {
        for y in 0..pi {
            let f = y * y + a1 * x * y + a3 * y - x * x * x - a2 * x * x - a4 * x - a6;
            if f.rem_euclid(pi) != 0 {
                continue;
            }
            let fx = a1 * y - 3 * x * x - 2 * a2 * x - a4;
            let fy = 2 * y + a1 * x + a3;
            if fx.rem_euclid(pi) == 0 && fy.rem_euclid(pi) == 0 {
                continue; // the singular point
            }
            count += 1;
        }
    }
    count
}

/// L-series coefficients a_1 .. a_nmax.
#[derive(Debug, Clone)]
pub struct CoeffSeries {
    pub n_max: usize,
    /// `a[n]` is the coefficient; `a[0]` is unused and zero.
    pub a: Vec<i64>,
}

/// Full coefficient array via the Hecke recursion at prime powers and
/// multiplicativity elsewhere.
pub fn an_coeffs(e: &EllCurveQ, n_max: usize) -> CoeffSeries {
    let mut a = vec![0i64; n_max + 1];
    if n_max >= 1 {
        a[1] = 1;
    }
    // smallest prime factor sieve
    let mut spf = vec![0usize; n_max + 1];
    let mut primes = Vec::new();
    for i in 2..=n_max {
        if spf[i] == 0 {
            primes.push(i);
            let mut j = i;
            while j <= n_max {
                if spf[j] == 0 {
                    spf[j] = i;
                }
                j += i;
            }
        }
    }
    for &p in &primes {
        let ap = ap_count(e, p as u64);
        let good = !e.conductor.is_multiple_of(p as u64);
        // fill a at powers of p
        let mut prev = 1i64; // a_{p^{r-1}}
        let mut cur = ap; // a_{p^r}
        let mut q = p;
        while q <= n_max {
            a[q] = cur;
            let next = ap * cur - if good { p as i64 * prev } else { 0 };
            prev = cur;
            cur = next;
            q *= p;
        }
    }
    for n in 2..=n_max {
        let p = spf[n];
        let mut q = 1usize;
        let mut m = n;
        while m % p == 0 {
            m /= p;
            q *= p;
        }
        if m > 1 {
            a[n] = a[q] * a[m];
        }
    }
    CoeffSeries { n_max, a }
}

/// Exponential sum `F(y) = sum a_n e^{-2 pi n y / sqrt(N)}`.
fn f_series(an: &CoeffSeries, n_cond: u64, y: f64) -> f64 {
    let q = 2.0 * PI / (n_cond as f64).sqrt();
    let mut s = 0.0;
    for n in (1..=an.n_max).rev() {
        if an.a[n] != 0 {
            s += an.a[n] as f64 * (-q * n as f64 * y).exp();
        }
    }
    s
}

/// Terms needed so the crude `|a_n| <= 2 n^{3/2}` tail of `F` at height `y`
/// stays below `target`.
fn terms_for_tail(n_cond: u64, y: f64, target: f64) -> usize {
    let q = 2.0 * PI / (n_cond as f64).sqrt() * y;
    let mut m = 8usize;
    loop {
        // geometric-style remainder starting at m+1
        let mut tail = 0.0;
        let mut n = m + 1;
        loop {
            let t = 2.0 * (n as f64).powf(1.5) * (-q * n as f64).exp();
            tail += t;
            if t < 1e-3 * target || t < 1e-300 {
                break;
            }
            n += 1;
            if n > m + 200_000 {
                break;
            }
        }
        if tail < target {
            return m;
        }
        m = m * 3 / 2 + 8;
        if m > 2_000_000 {
            return m;
        }
    }
}

/// Numerically detected functional-equation sign: the `eps` for which
/// `F(1/y0) = eps * y0^2 * F(y0)` holds.
pub fn root_number(e: &EllCurveQ, y0: f64) -> Result<i8> {
    let y_small = y0.min(1.0 / y0);
    let m = terms_for_tail(e.conductor, y_small, 1e-12);
    let an = an_coeffs(e, m);
    let lhs = f_series(&an, e.conductor, 1.0 / y0);
    let rhs = y0 * y0 * f_series(&an, e.conductor, y0);
    let r_plus = (lhs - rhs).abs();
    let r_minus = (lhs + rhs).abs();
    let scale = lhs.abs().max(rhs.abs()).max(1e-30);
    if r_plus.min(r_minus) > 1e-6 * scale {
        return Err(Error::AmbiguousSign {
            plus: r_plus,
            minus: r_minus,
        });
    }
    Ok(if r_plus < r_minus { 1 } else { -1 })
}

/// Completed L-function data at s = 2.
#[derive(Debug, Clone, Copy)]
pub struct LValues {
    /// `Q = 2 pi / sqrt(N)`.
    pub q_factor: f64,
    pub lambda2: f64,
    pub l2: f64,
    pub lprime0: f64,
    pub eps: i8,
    pub n_used: usize,
    pub tail_bound: f64,
}

/// `Lambda(2) = sum a_n [ e^{-Qn}(Qn+1)/(Qn)^2 + eps E1(Qn) ]`, with the
/// term count chosen so the crude-coefficient tail bound is below `tol`;
/// then `L(E,2) = Q^2 Lambda(2)` and `L'(E,0) = eps Lambda(2)`.
pub fn l_values(e: &EllCurveQ, tol: f64) -> Result<LValues> {
    let eps = match e.eps {
        Some(s) => s,
        None => root_number(e, 1.5)?,
    };
    let q = 2.0 * PI / (e.conductor as f64).sqrt();

    // term bound 2 n^{3/2} e^{-Qn} [ (Qn+1)/(Qn)^2 + 1/(Qn) ]
    let term_bound = |n: f64| -> f64 {
        let x = q * n;
        2.0 * n.powf(1.5) * (-x).exp() * ((x + 1.0) / (x * x) + 1.0 / x)
    };
    let mut n_max = 16usize;
    let tail = loop {
        let mut t = 0.0;
        let mut n = n_max + 1;
        loop {
            let b = term_bound(n as f64);
            t += b;
            if b < 1e-3 * tol || b < 1e-300 {
                break;
            }
            n += 1;
        }
        if t < tol {
            break t;
        }
        n_max = n_max * 3 / 2 + 16;
        if n_max > 100_000 {
            return Err(Error::TailBound {
                bound: t,
                tol,
                n_max,
            });
        }
    };

    let an = an_coeffs(e, n_max);
    let mut lambda2 = 0.0f64;
    for n in (1..=n_max).rev() {
        if an.a[n] == 0 {
            continue;
        }
        let x = q * n as f64;
        let term = (-x).exp() * (x + 1.0) / (x * x) + eps as f64 * exp_integral_e1(x)?;
        lambda2 += an.a[n] as f64 * term;
    }
    Ok(LValues {
        q_factor: q,
        lambda2,
        l2: q * q * lambda2,
        lprime0: eps as f64 * lambda2,
        eps,
        n_used: n_max,
        tail_bound: tail,
    })
}

/// Real and imaginary periods of the lattice.
#[derive(Debug, Clone, Copy)]
pub struct PeriodLattice {
    /// Real period, positive.
    pub omega_plus: f64,
    /// Purely imaginary with positive imaginary part. For negative
    /// discriminant the actual second lattice generator is
    /// `(omega_plus + omega_minus) / 2`.
    pub omega_minus: Complex64,
}

impl PeriodLattice {
    /// Lattice ratio `tau` (in the upper half-plane) of the actual
    /// generator pair, accounting for the non-rectangular case.
    pub fn tau(&self, rectangular: bool) -> Complex64 {
        if rectangular {
            Complex64::new(0.0, self.omega_minus.im / self.omega_plus)
        } else {
            Complex64::new(0.5, 0.5 * self.omega_minus.im / self.omega_plus)
        }
    }
}

/// Roots of the depressed cubic `4 X^3 - g2 X - g3`.
fn depressed_roots(g2: f64, g3: f64) -> Vec<f64> {
    // monic form t^3 + p t + q
    let p = -g2 / 4.0;
    let q = -g3 / 4.0;
    let d = -4.0 * p * p * p - 27.0 * q * q;
    if d > 0.0 {
        // three real roots, trigonometric form
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        let mut roots: Vec<f64> = (0..3)
            .map(|k| m * (theta - 2.0 * PI * k as f64 / 3.0).cos())
            .collect();
        roots.sort_by(|a, b| b.partial_cmp(a).unwrap());
        roots
    } else {
        // single real root, Cardano
        let half_q = q / 2.0;
        let disc = (half_q * half_q + p * p * p / 27.0).sqrt();
        let u = (-half_q + disc).cbrt();
        let v = (-half_q - disc).cbrt();
        vec![u + v]
    }
}

/// Period lattice by the AGM on the roots of the associated cubic.
pub fn agm_periods(e: &EllCurveQ) -> Result<PeriodLattice> {
    let g2 = e.c4 as f64 / 12.0;
    let g3 = e.c6 as f64 / 216.0;
    if e.disc > 0 {
        let r = depressed_roots(g2, g3);
        let (e1, e2, e3) = (r[0], r[1], r[2]);
        let omega_plus = PI / agm((e1 - e3).sqrt(), (e1 - e2).sqrt());
        let om = PI / agm((e1 - e3).sqrt(), (e2 - e3).sqrt());
        Ok(PeriodLattice {
            omega_plus,
            omega_minus: Complex64::new(0.0, om),
        })
    } else {
        let r = depressed_roots(g2, g3);
        let e1 = r[0];
        let a = (3.0 * e1 * e1 - g2 / 4.0).sqrt();
        let omega_plus = 2.0 * PI / agm(2.0 * a.sqrt(), (2.0 * a + 3.0 * e1).sqrt());
        let om = 2.0 * PI / agm(2.0 * a.sqrt(), (2.0 * a - 3.0 * e1).sqrt());
        Ok(PeriodLattice {
            omega_plus,
            omega_minus: Complex64::new(0.0, om),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate;
    use num_bigint::BigInt;

    fn table() -> Vec<EllCurveQ> {
        builtin_curve_table()
    }

    fn assert_close(a: f64, b: f64, tol: f64, msg: &str) {
        assert!((a - b).abs() <= tol, "{msg}: {a} vs {b} (diff {:e})", a - b);
    }

    #[test]
    fn builtin_table_loads_and_is_sane() {
        let t = table();
        assert_eq!(t.len(), 36);
        let e19 = curve_by_label(&t, "19a3").unwrap();
        assert_eq!(e19.k, Some(8));
        assert_eq!(e19.conductor, 19);
        assert_eq!(e19.a, [0, 1, 1, 1, 0]);
        assert_eq!(e19.disc, -19);
        let e20 = curve_by_k(&t, 2).unwrap();
        assert_eq!(e20.label, "20a1");
        assert_eq!(e20.a, [0, 1, 0, 4, 4]);
    }

    #[test]
    fn schema_violations_reported() {
        assert!(matches!(
            parse_curve_table("19a3,8,0,1,1,1"),
            Err(Error::Schema { .. })
        ));
        assert!(matches!(
            parse_curve_table("x,-,0,0,0,0,0,11,?,1,1"),
            Err(Error::SingularCurve { .. })
        ));
    }

    #[test]
    fn family_j_values() {
        let j = |k: i64| family_j(&BigRational::from(BigInt::from(k))).unwrap();
        assert_eq!(j(0), BigRational::from(BigInt::from(0)));
        assert_eq!(j(24), BigRational::from(BigInt::from(0)));
        assert_eq!(
            j(8),
            BigRational::new(BigInt::from(32768), BigInt::from(19))
        );
        assert!(family_j(&BigRational::from(BigInt::from(27))).is_err());
    }

    #[test]
    fn family_j_matches_every_table_row() {
        for c in table() {
            if let Some(k) = c.k {
                let jk = family_j(&BigRational::from(BigInt::from(k))).unwrap();
                assert_eq!(jk, c.j_exact(), "j mismatch for {} (k={k})", c.label);
            }
        }
    }

    #[test]
    fn ap_hasse_bound_and_known_values() {
        let t = table();
        let e = curve_by_label(&t, "19a3").unwrap();
        // frozen from an independent run of the same counting definition
        let expected = [
            (2i64, 0i64),
            (3, -2),
            (5, 3),
            (7, -1),
            (11, 3),
            (13, -4),
            (17, -3),
            (19, 1),
        ];
        for (p, ap) in expected {
            assert_eq!(ap_count(e, p as u64), ap, "a_{p}");
        }
        for p in [2u64, 3, 5, 7, 11, 13, 17, 23, 29, 31, 997] {
            if e.conductor.is_multiple_of(p) {
                continue;
            }
            let ap = ap_count(e, p);
            assert!(
                (ap * ap) as f64 <= 4.0 * p as f64,
                "Hasse bound at p={p}: {ap}"
            );
        }
    }

    #[test]
    fn ap_sum_matches_independent_run() {
        // frozen from a second, independent implementation of the same
        // counting definitions
        let t = table();
        let e = curve_by_label(&t, "19a3").unwrap();
        let primes = [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47];
        let total: i64 = primes.iter().map(|&p| ap_count(e, p)).sum();
        assert_eq!(total, -9, "sum of a_p for p <= 50");
        assert_eq!(ap_count(e, 29), 6);
        assert_eq!(ap_count(e, 47), -3);
    }

    #[test]
    fn ap_at_conductor_prime_is_unit() {
        let t = table();
        let e = curve_by_label(&t, "19a3").unwrap();
        let a19 = ap_count(e, 19);
        assert!(a19 == 1 || a19 == -1, "multiplicative reduction at 19");
    }

    #[test]
    fn good_count_agrees_with_projective_enumeration() {
        // second independent route: affine brute force + infinity
        let t = table();
        for label in ["19a3", "11a3", "20a1"] {
            let e = curve_by_label(&t, label).unwrap();
            for p in [3u64, 5, 7, 11, 13] {
                if e.conductor.is_multiple_of(p) {
                    continue;
                }
                let pi = p as i64;
                let [a1, a2, a3, a4, a6] = e.a;
                let mut count = 1i64;
                for x in 0..pi {
                    for y in 0..pi {
                        let f = y * y + a1 * x * y + a3 * y
                            - x * x * x
                            - a2 * x * x
                            - a4 * x
                            - a6;
                        if f.rem_euclid(pi) == 0 {
                            count += 1;
                        }
                    }
                }
                assert_eq!(
                    ap_count(e, p),
                    pi + 1 - count,
                    "count mismatch {label} p={p}"
                );
            }
        }
    }

    #[test]
    fn an_recursion_instances() {
        let t = table();
        let e = curve_by_label(&t, "19a3").unwrap();
        let an = an_coeffs(e, 64);
        assert_eq!(an.a[1], 1);
        assert_eq!(an.a[6], an.a[2] * an.a[3], "multiplicativity at 6");
        assert_eq!(an.a[35], an.a[5] * an.a[7]);
        // good 2: a4 = a2^2 - 2
        assert_eq!(an.a[4], an.a[2] * an.a[2] - 2);
        // frozen leading stretch of the level-19 newform
        assert_eq!(
            &an.a[1..=12],
            &[1, 0, -2, -2, 3, 0, -1, 0, 1, 0, 3, 4],
            "level 19 q-expansion"
        );
    }

    #[test]
    fn an_level_11_matches_known_form() {
        let t = table();
        let e = curve_by_label(&t, "11a3").unwrap();
        let an = an_coeffs(e, 12);
        assert_eq!(&an.a[1..=12], &[1, -2, -1, 2, 1, 2, -2, 0, -2, -2, 1, -2]);
    }

    #[test]
    fn root_number_19_and_separation() {
        let t = table();
        let e = curve_by_label(&t, "19a3").unwrap();
        assert_eq!(root_number(e, 1.5).unwrap(), 1);
        // both-sign residual separation
        let m = super::terms_for_tail(19, 2.0 / 3.0, 1e-12);
        let an = an_coeffs(e, m);
        let lhs = super::f_series(&an, 19, 1.0 / 1.5);
        let rhs = 1.5 * 1.5 * super::f_series(&an, 19, 1.5);
        assert!(
            (lhs + rhs).abs() > 1e6 * (lhs - rhs).abs(),
            "sign residuals poorly separated"
        );
    }

    #[test]
    fn root_number_invariant_under_test_point() {
        let t = table();
        for label in ["19a3", "26a3", "11a3"] {
            let e = curve_by_label(&t, label).unwrap();
            let signs: Vec<i8> = [1.3, 1.5, 2.0]
                .iter()
                .map(|&y| root_number(e, y).unwrap())
                .collect();
            assert!(signs.windows(2).all(|w| w[0] == w[1]), "{label}: {signs:?}");
        }
    }

    #[test]
    fn lvalue_19a3_and_truncation_consistency() {
        let t = table();
        let e = curve_by_label(&t, "19a3").unwrap();
        let lv = l_values(e, 1e-12).unwrap();
        assert_eq!(lv.eps, 1);
        assert_close(
            lv.lprime0,
            0.372_901_336_755_979,
            1e-10,
            "L'(19a3, 0) frozen",
        );
        assert_close(lv.l2, lv.q_factor * lv.q_factor * lv.lambda2, 0.0, "scaling");
        assert!(lv.tail_bound < 1e-12);

        // doubling the term count must not move the value
        let an = an_coeffs(e, 2 * lv.n_used);
        let q = lv.q_factor;
        let mut l2b = 0.0;
        for n in (1..=2 * lv.n_used).rev() {
            if an.a[n] == 0 {
                continue;
            }
            let x = q * n as f64;
            l2b += an.a[n] as f64
                * ((-x).exp() * (x + 1.0) / (x * x) + exp_integral_e1(x).unwrap());
        }
        assert_close(lv.lambda2, l2b, 1e-12, "Lambda(2) stable under 2x terms");
    }

    #[test]
    fn periods_19a3_match_reference_and_integral_oracle() {
        let t = table();
        let e = curve_by_label(&t, "19a3").unwrap();
        let pl = agm_periods(e).unwrap();
        assert!((pl.omega_minus.im - 4.127_09).abs() < 1e-4, "reference imaginary period");
        assert_close(pl.omega_plus, 4.079_279_200_464_93, 1e-10, "real period frozen");

        // independent oracle: direct quadrature of the period integrals
        let (b2, b4, b6) = (e.b2 as f64, e.b4 as f64, e.b6 as f64);
        let e1 = {
            // real root of 4x^3 + b2 x^2 + 2 b4 x + b6 via bisection
            let g = |x: f64| 4.0 * x.powi(3) + b2 * x * x + 2.0 * b4 * x + b6;
            let (mut lo, mut hi) = (-10.0, 10.0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if g(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let c = b2 / 4.0 + e1;
        let d = b4 / 2.0 + e1 * c;
        // x = e1 + u^2 (real period), x = e1 - u^2 (imaginary period); the
        // substitution swallows the sqrt singularity at e1
        let quadratic = move |x: f64| x * x + c * x + d;
        // split at u = 1 and map the outer range by u -> 1/v so the full
        // half-line is covered
        let period_integral = |sign: f64| -> f64 {
            let inner = integrate(
                |u| {
                    let x = e1 + sign * u * u;
                    1.0 / quadratic(x).sqrt()
                },
                0.0,
                1.0,
                &[],
                1e-12,
            )
            .unwrap()
            .value;
            let outer = integrate(
                |v| {
                    let u = 1.0 / v;
                    let x = e1 + sign * u * u;
                    1.0 / quadratic(x).sqrt() / (v * v)
                },
                0.0,
                1.0,
                &[],
                1e-12,
            )
            .unwrap()
            .value;
            2.0 * (inner + outer)
        };
        let om_re = period_integral(1.0);
        let om_im = period_integral(-1.0);
        assert_close(pl.omega_plus, om_re, 1e-7, "real period vs quadrature");
        assert_close(pl.omega_minus.im, om_im, 1e-7, "imaginary period vs quadrature");
    }

    #[test]
    fn periods_positive_disc_vs_integral_oracle() {
        let t = table();
        let e = curve_by_k(&t, 32).unwrap();
        assert!(e.disc > 0);
        let pl = agm_periods(e).unwrap();
        let g2 = e.c4 as f64 / 12.0;
        let g3 = e.c6 as f64 / 216.0;
        let r = super::depressed_roots(g2, g3);
        let (e1, e2, e3) = (r[0], r[1], r[2]);
        let f = |u: f64| {
            let x = e1 + u * u;
            1.0 / ((x - e2) * (x - e3)).sqrt()
        };
        let om_re = 2.0
            * (integrate(f, 0.0, 1.0, &[], 1e-12).unwrap().value
                + integrate(|v| f(1.0 / v) / (v * v), 0.0, 1.0, &[], 1e-12)
                    .unwrap()
                    .value);
        assert_close(pl.omega_plus, om_re, 1e-8, "real period vs quadrature");
        // lacuna integral between e2 and e1 for the imaginary period;
        // x = e2 + t^2 resp. x = e1 - t^2 absorb the endpoint square roots
        let mid = 0.5 * (e1 + e2);
        let lo = integrate(
            |t| {
                let x = e2 + t * t;
                1.0 / ((e1 - x) * (x - e3)).sqrt()
            },
            0.0,
            (mid - e2).sqrt(),
            &[],
            1e-12,
        )
        .unwrap()
        .value;
        let hi = integrate(
            |t| {
                let x = e1 - t * t;
                1.0 / ((x - e2) * (x - e3)).sqrt()
            },
            0.0,
            (e1 - mid).sqrt(),
            &[],
            1e-12,
        )
        .unwrap()
        .value;
        let om_im = 2.0 * (lo + hi);
        assert_close(pl.omega_minus.im, om_im, 1e-7, "imaginary period vs quadrature");
    }

    #[test]
    fn lattice_tau_recovers_j() {
        let t = table();
        // one curve on each side of the discriminant sign
        for (label_or_k, expect) in [("19a3", 32768.0 / 19.0), ("k32", 3276.8)] {
            let e = if label_or_k == "k32" {
                curve_by_k(&t, 32).unwrap()
            } else {
                curve_by_label(&t, label_or_k).unwrap()
            };
            let pl = agm_periods(e).unwrap();
            let tau = pl.tau(e.disc > 0);
            let j = crate::modular::j_tau(tau).unwrap();
            assert!(
                (j - num_complex::Complex64::new(expect, 0.0)).norm() < 1e-6,
                "j from lattice for {}: {j} vs {expect}",
                e.label
            );
        }
    }

    #[test]
    fn periods_invariant_under_unimodular_shift() {
        let t = table();
        let e = curve_by_label(&t, "19a3").unwrap();
        let shifted = e.shifted(3, -2, 5).unwrap();
        assert_eq!(shifted.disc, e.disc, "discriminant preserved");
        let p0 = agm_periods(e).unwrap();
        let p1 = agm_periods(&shifted).unwrap();
        assert_close(p0.omega_plus, p1.omega_plus, 1e-10, "omega+ invariant");
        assert_close(
            p0.omega_minus.im,
            p1.omega_minus.im,
            1e-10,
            "omega- invariant",
        );
    }
}
