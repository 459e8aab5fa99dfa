//! q-series machinery: Dedekind eta, the cube-root eta quotient `u(tau)`
//! that parametrizes the family parameter, Siegel units `g_a`, Eisenstein
//! q-expansions `e_{a,b}` and `f_{a,b;c}`, the level-19 modular-unit
//! parametrization of the conductor-19 curve, and elliptic dilogarithm
//! sums over `zeta_3 q^n`.
//!
//! Fractional powers of q always mean `q^e := exp(2 pi i tau e)`, so every
//! function here is single-valued in `tau` on the upper half-plane.

use num_complex::Complex64;
use num_rational::Rational64;
use std::f64::consts::PI;

use crate::specfun::bloch_wigner;
use crate::{Error, Result};

const TWO_PI: f64 = 2.0 * PI;

fn q_of_tau(tau: Complex64) -> Complex64 {
    (Complex64::new(0.0, TWO_PI) * tau).exp()
}

/// `q^e` through `tau`, single-valued for rational exponents.
fn q_pow(tau: Complex64, e: f64) -> Complex64 {
    (Complex64::new(0.0, TWO_PI) * tau * e).exp()
}

fn check_upper_half(tau: Complex64, what: &str) -> Result<()> {
    if tau.im <= 0.0 {
        return Err(Error::Domain(format!(
            "{what} needs Im(tau) > 0, got {tau}"
        )));
    }
    Ok(())
}

/// Number of product terms for a tail below `eps` at nome modulus `aq`.
fn product_terms(aq: f64, eps: f64) -> usize {
    // remaining log-tail is ~ aq^{n+1} / (1 - aq)
    let n = ((eps * (1.0 - aq)).ln() / aq.ln()).ceil();
    (n.max(4.0) as usize).min(40_000)
}

/// Dedekind eta `q^{1/24} prod (1 - q^n)` with tail below 1e-14.
pub fn eta(tau: Complex64) -> Result<Complex64> {
    check_upper_half(tau, "eta")?;
    let q = q_of_tau(tau);
    let aq = q.norm();
    let n_max = product_terms(aq, 1e-16);
    let mut prod = Complex64::new(1.0, 0.0);
    let mut qn = Complex64::new(1.0, 0.0);
    for _ in 1..=n_max {
        qn *= q;
        prod *= Complex64::new(1.0, 0.0) - qn;
    }
    Ok(q_pow(tau, 1.0 / 24.0) * prod)
}

/// A point on the search line for the eta-quotient parametrization.
#[derive(Debug, Clone, Copy)]
pub struct ModularPoint {
    pub tau: Complex64,
    pub q: Complex64,
    pub u: f64,
}

/// The eta quotient `u(tau) = 3 (1 + 27 eta^12(3 tau) / eta^12(tau))^{1/3}`
/// with the real cube root; errors if the radicand is not real.
pub fn u_tau(tau: Complex64) -> Result<f64> {
    check_upper_half(tau, "u_tau")?;
    let ratio = (eta(3.0 * tau)? / eta(tau)?).powi(12);
    let radicand = Complex64::new(1.0, 0.0) + 27.0 * ratio;
    if radicand.im.abs() > 1e-9 * (1.0 + radicand.norm()) {
        return Err(Error::Domain(format!(
            "u(tau) is not real at tau = {tau} (radicand {radicand})"
        )));
    }
    Ok(3.0 * radicand.re.cbrt())
}

fn u_on_line(t: f64) -> f64 {
    u_tau(Complex64::new(0.5, t)).expect("u is real on the line Re(tau)=1/2")
}

/// Invert the eta quotient on the line `tau = 1/2 + i t`, `t in (0.1, 5)`.
pub fn invert_u(alpha: f64) -> Result<ModularPoint> {
    let (mut lo, mut hi) = (0.1f64, 5.0f64);
    let (ulo, uhi) = (u_on_line(lo), u_on_line(hi));
    if !(ulo < alpha && alpha < uhi) {
        return Err(Error::NoRoot { target: alpha });
    }
    // u is increasing in t on this line; bisect
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if u_on_line(mid) < alpha {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let t = 0.5 * (lo + hi);
    let tau = Complex64::new(0.5, t);
    let u = u_on_line(t);
    if (u - alpha).abs() > 1e-10 {
        return Err(Error::NonConvergence {
            context: "invert_u bisection",
            estimate: (u - alpha).abs(),
            tol: 1e-10,
        });
    }
    Ok(ModularPoint {
        tau,
        q: q_of_tau(tau),
        u,
    })
}

/// Second Bernoulli polynomial of the fractional part.
pub fn b2_frac(x: f64) -> f64 {
    let f = x.fract();
    let f = if f < 0.0 { f + 1.0 } else { f };
    f * f - f + 1.0 / 6.0
}

/// Siegel unit
/// `g_a = q^{N B2(a/N)/2} prod_{n = a mod N}(1-q^n) prod_{n = -a mod N}(1-q^n)`
/// truncated below 1e-13.
pub fn siegel_g(n_level: u32, a: i64, tau: Complex64) -> Result<Complex64> {
    check_upper_half(tau, "siegel_g")?;
    let n = n_level as i64;
    if a.rem_euclid(n) == 0 {
        return Err(Error::Domain(format!(
            "siegel_g needs N to not divide a (N = {n_level}, a = {a})"
        )));
    }
    let q = q_of_tau(tau);
    let aq = q.norm();
    let m_max = product_terms(aq, 1e-15);
    let ra = a.rem_euclid(n) as usize;
    let rma = (-a).rem_euclid(n) as usize;
    let mut prod = Complex64::new(1.0, 0.0);
    let mut qm = Complex64::new(1.0, 0.0);
    for m in 1..=m_max {
        qm *= q;
        let r = m % n as usize;
        if r == ra {
            prod *= Complex64::new(1.0, 0.0) - qm;
        }
        if r == rma {
            prod *= Complex64::new(1.0, 0.0) - qm;
        }
    }
    let lead = n as f64 * b2_frac(a as f64 / n as f64) / 2.0;
    Ok(q_pow(tau, lead) * prod)
}

/// Same Siegel unit through its logarithmic series,
/// `exp( lead * log q - sum_{n = +-a} sum_k q^{nk}/k )`; a second route
/// used to cross-check the direct product.
pub fn siegel_g_log(n_level: u32, a: i64, tau: Complex64) -> Result<Complex64> {
    check_upper_half(tau, "siegel_g_log")?;
    let n = n_level as i64;
    if a.rem_euclid(n) == 0 {
        return Err(Error::Domain("siegel_g_log needs N to not divide a".into()));
    }
    let q = q_of_tau(tau);
    let aq = q.norm();
    let m_max = product_terms(aq, 1e-15);
    let ra = a.rem_euclid(n) as usize;
    let rma = (-a).rem_euclid(n) as usize;
    let mut log_sum = Complex64::new(0.0, 0.0);
    for m in 1..=m_max {
        let r = m % n as usize;
        let mult = (r == ra) as u32 + (r == rma) as u32;
        if mult == 0 {
            continue;
        }
        let qm = q.powu(m as u32);
        // -log(1 - q^m) = sum_k q^{mk} / k
        let mut term = Complex64::new(0.0, 0.0);
        let mut qmk = qm;
        let mut k = 1.0;
        while qmk.norm() > 1e-18 {
            term += qmk / k;
            qmk *= qm;
            k += 1.0;
        }
        log_sum -= mult as f64 * term;
    }
    let lead = n as f64 * b2_frac(a as f64 / n as f64) / 2.0;
    Ok((Complex64::new(0.0, TWO_PI) * tau * lead + log_sum).exp())
}

/// Siegel unit with an explicit cap on the product terms, for studying
/// truncation behavior; [`siegel_g`] picks the cap from the nome itself.
pub fn siegel_g_truncated(
    n_level: u32,
    a: i64,
    tau: Complex64,
    m_max: usize,
) -> Result<Complex64> {
    check_upper_half(tau, "siegel_g_truncated")?;
    let n = n_level as i64;
    if a.rem_euclid(n) == 0 {
        return Err(Error::Domain("siegel_g_truncated needs N to not divide a".into()));
    }
    let q = q_of_tau(tau);
    let ra = a.rem_euclid(n) as usize;
    let rma = (-a).rem_euclid(n) as usize;
    let mut prod = Complex64::new(1.0, 0.0);
    let mut qm = Complex64::new(1.0, 0.0);
    for m in 1..=m_max {
        qm *= q;
        let r = m % n as usize;
        if r == ra {
            prod *= Complex64::new(1.0, 0.0) - qm;
        }
        if r == rma {
            prod *= Complex64::new(1.0, 0.0) - qm;
        }
    }
    let lead = n as f64 * b2_frac(a as f64 / n as f64) / 2.0;
    Ok(q_pow(tau, lead) * prod)
}

/// The modular-unit parametrization of the conductor-19 curve:
/// `x = -g1 g7 g8 / (g2 g3 g5)`, `y = g1 g7 g8 / (g4 g6 g9)`.
pub fn param_xy_19(tau: Complex64) -> Result<(Complex64, Complex64)> {
    let g = |a: i64| siegel_g(19, a, tau);
    let top = g(1)? * g(7)? * g(8)?;
    let x = -top / (g(2)? * g(3)? * g(5)?);
    let y = top / (g(4)? * g(6)? * g(9)?);
    Ok((x, y))
}

/// Exponents of the modular units in `param_xy_19`, used to assemble
/// regulator combinations: `(index, exponent)` pairs for x and y.
pub const X19_EXPONENTS: [(i64, i64); 6] = [(1, 1), (7, 1), (8, 1), (2, -1), (3, -1), (5, -1)];
pub const Y19_EXPONENTS: [(i64, i64); 6] = [(1, 1), (7, 1), (8, 1), (4, -1), (6, -1), (9, -1)];

/// Truncated q-expansion with a rational leading exponent: the value is
/// `q^{e0} * sum_m coeffs[m] q^m` through `q^{e0 + n_max}`.
#[derive(Debug, Clone, PartialEq)]
pub struct QExpansion {
    pub e0: Rational64,
    pub coeffs: Vec<Complex64>,
}

impl QExpansion {
    pub fn new(e0: Rational64, coeffs: Vec<Complex64>) -> Self {
        QExpansion { e0, coeffs }
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, m: usize) -> Complex64 {
        self.coeffs
            .get(m)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn add(&self, other: &QExpansion) -> Result<QExpansion> {
        if self.e0 != other.e0 {
            return Err(Error::Domain(format!(
                "q-expansion addition needs equal leading exponents ({} vs {})",
                self.e0, other.e0
            )));
        }
        let n = self.n_max().min(other.n_max());
        let coeffs = (0..=n).map(|m| self.coeff(m) + other.coeff(m)).collect();
        Ok(QExpansion::new(self.e0, coeffs))
    }

    pub fn sub(&self, other: &QExpansion) -> Result<QExpansion> {
        let negated = QExpansion::new(other.e0, other.coeffs.iter().map(|c| -c).collect());
        self.add(&negated)
    }

    pub fn scale(&self, c: Complex64) -> QExpansion {
        QExpansion::new(self.e0, self.coeffs.iter().map(|v| v * c).collect())
    }

    /// Product, truncated at the shorter factor's order.
    pub fn mul(&self, other: &QExpansion) -> QExpansion {
        let n = self.n_max().min(other.n_max());
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
        for i in 0..=self.n_max().min(n) {
            let a = self.coeff(i);
            if a.norm() == 0.0 {
                continue;
            }
            for j in 0..=(n - i).min(other.n_max()) {
                coeffs[i + j] += a * other.coeff(j);
            }
        }
        QExpansion::new(self.e0 + other.e0, coeffs)
    }

    /// Division by a unit (nonzero constant term).
    pub fn div(&self, other: &QExpansion) -> Result<QExpansion> {
        let lead = other.coeff(0);
        if lead.norm() < 1e-300 {
            return Err(Error::Domain(
                "q-expansion division needs a unit (nonzero constant term)".into(),
            ));
        }
        let n = self.n_max().min(other.n_max());
        let mut inv = vec![Complex64::new(0.0, 0.0); n + 1];
        inv[0] = 1.0 / lead;
        for m in 1..=n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 1..=m {
                acc += other.coeff(j) * inv[m - j];
            }
            inv[m] = -acc / lead;
        }
        Ok(self.mul(&QExpansion::new(-other.e0, inv)))
    }

    /// Evaluate at `tau` (the fractional power through `tau`).
    pub fn eval(&self, tau: Complex64) -> Complex64 {
        let q = q_of_tau(tau);
        let e0 = *self.e0.numer() as f64 / *self.e0.denom() as f64;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut qm = Complex64::new(1.0, 0.0);
        for m in 0..=self.n_max() {
            sum += self.coeff(m) * qm;
            qm *= q;
        }
        q_pow(tau, e0) * sum
    }
}

/// Eisenstein q-expansion
/// `e_{a,b} = (1/2)((1+z^a)/(1-z^a) + (1+z^b)/(1-z^b))
///            + sum_{m,n >= 1} (z^{am+bn} - z^{-(am+bn)}) q^{mn}`
/// with `z = e^{2 pi i / N}`, through `q^{n_max}`.
pub fn eis_e(n_level: u32, a: i64, b: i64, n_max: usize) -> Result<QExpansion> {
    let n = n_level as i64;
    if a.rem_euclid(n) == 0 || b.rem_euclid(n) == 0 {
        return Err(Error::Domain(format!(
            "eis_e needs N to divide neither index (N = {n_level}, a = {a}, b = {b})"
        )));
    }
    let zeta = |e: i64| -> Complex64 {
        Complex64::from_polar(1.0, TWO_PI * e.rem_euclid(n) as f64 / n as f64)
    };
    let one = Complex64::new(1.0, 0.0);
    let cot_term = |e: i64| (one + zeta(e)) / (one - zeta(e));
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n_max + 1];
    coeffs[0] = 0.5 * (cot_term(a) + cot_term(b));
    for m in 1..=n_max {
        for k in 1..=n_max / m {
            let e = a * m as i64 + b * k as i64;
            coeffs[m * k] += zeta(e) - zeta(-e);
        }
    }
    Ok(QExpansion::new(Rational64::new(0, 1), coeffs))
}

/// Weight-2 combination `f_{a,b;c} = e_{a,bc} e_{b,-ac} - e_{a,-bc} e_{b,ac}`.
pub fn f_abc(n_level: u32, a: i64, b: i64, c: i64, n_max: usize) -> Result<QExpansion> {
    let n = n_level as i64;
    if (a * c).rem_euclid(n) == 0 || (b * c).rem_euclid(n) == 0 {
        return Err(Error::Domain(format!(
            "f_abc needs N dividing neither ac nor bc (N = {n_level}, a = {a}, b = {b}, c = {c})"
        )));
    }
    let lhs = eis_e(n_level, a, b * c, n_max)?.mul(&eis_e(n_level, b, -a * c, n_max)?);
    let rhs = eis_e(n_level, a, -b * c, n_max)?.mul(&eis_e(n_level, b, a * c, n_max)?);
    lhs.sub(&rhs)
}

/// Scan `(a, b, c)` for `f_{a,b;c}` proportional to a given coefficient
/// sequence (`target[n]` for `q^n`, n >= 1). Returns `(a, b, c, ratio)`
/// for every match within `tol`; the level-19 search comes back empty.
pub fn search_newform_multiple(
    n_level: u32,
    target: &[i64],
    n_check: usize,
    tol: f64,
) -> Result<Vec<(i64, i64, i64, f64)>> {
    let n = n_level as i64;
    let n_check = n_check.min(target.len().saturating_sub(1));
    let mut cache: Vec<Option<QExpansion>> = vec![None; (n * n) as usize];
    let mut e_of = |a: i64, b: i64| -> Result<QExpansion> {
        let key = (a.rem_euclid(n) * n + b.rem_euclid(n)) as usize;
        if cache[key].is_none() {
            cache[key] = Some(eis_e(n_level, a, b, n_check)?);
        }
        Ok(cache[key].clone().unwrap())
    };
    let mut found = Vec::new();
    for a in 1..n {
        for b in a..n {
            for c in 1..n {
                if (a * c).rem_euclid(n) == 0 || (b * c).rem_euclid(n) == 0 {
                    continue;
                }
                let f = e_of(a, (b * c).rem_euclid(n))?
                    .mul(&e_of(b, (-a * c).rem_euclid(n))?)
                    .sub(&e_of(a, (-b * c).rem_euclid(n))?.mul(&e_of(b, (a * c).rem_euclid(n))?))?;
                let lead = f.coeff(1);
                if lead.norm() < tol || lead.im.abs() > tol {
                    continue;
                }
                let ratio = lead.re / target[1] as f64;
                let ok = (1..=n_check).all(|m| {
                    (f.coeff(m) - Complex64::new(ratio * target[m] as f64, 0.0)).norm() < tol
                });
                if ok {
                    found.push((a, b, c, ratio));
                }
            }
        }
    }
    Ok(found)
}

/// The bilinear regulator combination at level 19 with cusp parameter
/// `c`: `sum eps_a eps_b f_{a,b;c}` over the x- and y-exponents of the
/// modular-unit parametrization. With `c = 4` this reproduces 57 times
/// the level-19 newform.
pub fn newform_combination_19(c: i64, n_max: usize) -> Result<QExpansion> {
    let mut total = QExpansion::new(
        Rational64::new(0, 1),
        vec![Complex64::new(0.0, 0.0); n_max + 1],
    );
    for &(a, ea) in X19_EXPONENTS.iter() {
        for &(b, eb) in Y19_EXPONENTS.iter() {
            if a == b {
                continue; // f_{a,a;c} vanishes identically
            }
            let f = f_abc(19, a, b, c, n_max)?;
            total = total.add(&f.scale(Complex64::new((ea * eb) as f64, 0.0)))?;
        }
    }
    Ok(total)
}

/// Symmetrically truncated elliptic dilogarithm sum
/// `sum_{n in Z} D(zeta_3 q^n)` for real `0 < |q| < 1`.
pub fn elliptic_dilog_sum(q: f64, tol: f64) -> Result<f64> {
    if q == 0.0 || q.abs() >= 1.0 {
        return Err(Error::Domain(format!(
            "elliptic_dilog_sum needs 0 < |q| < 1, got {q}"
        )));
    }
    let zeta3 = Complex64::from_polar(1.0, TWO_PI / 3.0);
    let aq = q.abs();
    let mut sum = bloch_wigner(zeta3);
    let mut qp = 1.0f64;
    let mut n = 1usize;
    loop {
        qp *= q;
        let pair = bloch_wigner(zeta3 * qp) + bloch_wigner(zeta3 / qp);
        sum += pair;
        // |D(zeta_3 q^m)| ~ |q|^m (1 + m log(1/|q|)): consecutive pair
        // ratio approaches |q|, so a geometric majorant bounds the tail
        let ratio = (aq * (n as f64 + 1.0) / n as f64).min(0.999_999);
        let tail = pair.abs() * ratio / (1.0 - ratio);
        if n >= 4 && tail < 0.5 * tol {
            break;
        }
        if n > 100_000 {
            return Err(Error::NonConvergence {
                context: "elliptic dilogarithm tail",
                estimate: tail,
                tol,
            });
        }
        n += 1;
    }
    Ok(sum)
}

/// Klein j through `E4^3 / eta^24`, for lattice round-trips.
pub fn j_tau(tau: Complex64) -> Result<Complex64> {
    check_upper_half(tau, "j_tau")?;
    let q = q_of_tau(tau);
    let mut e4 = Complex64::new(1.0, 0.0);
    let mut qn = Complex64::new(1.0, 0.0);
    for n in 1..400u32 {
        qn *= q;
        let t = 240.0 * (n * n * n) as f64 * qn / (Complex64::new(1.0, 0.0) - qn);
        e4 += t;
        if t.norm() < 1e-18 * e4.norm() {
            break;
        }
    }
    let eta24 = eta(tau)?.powi(24);
    Ok(e4.powi(3) / eta24)
}
