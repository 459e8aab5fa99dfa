//! The family `Q_a(x, y) = y^2 + (x^2 - a x) y + x`: branch functions on
//! the unit circle, toric points, the quadrature measures `n`, `I`, `J`
//! and the modified measure `ntilde = n - 3J`, the hypergeometric closed
//! forms on both sides of the real window `(-1, 3)`, the cubic
//! substitution `a = (l^3 - 2)/l` with its path-integral and derivative
//! identities, two-dimensional Mahler measures for the auxiliary families,
//! and the split measure of `y^2 + (x^2 + 1) y + x^3`.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::quad::{integrate, integrate_path};
use crate::specfun::{ell_k, gamma_real, pfq, pfq_real, PFQParams};
use crate::{Error, Result};

/// Where a real parameter sits relative to the window `(-1, 3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaRegion {
    Inside,
    Boundary,
    Outside,
}

/// Classify a real family parameter against the window `(-1, 3)`.
pub fn region_classify(alpha: f64) -> AlphaRegion {
    if alpha == -1.0 || alpha == 3.0 {
        AlphaRegion::Boundary
    } else if alpha > -1.0 && alpha < 3.0 {
        AlphaRegion::Inside
    } else {
        AlphaRegion::Outside
    }
}

/// The family polynomial itself.
pub fn q_alpha(alpha: f64, x: Complex64, y: Complex64) -> Complex64 {
    y * y + (x * x - alpha * x) * y + x
}

/// The two branches of `Q_a(x, .) = 0` at a point of the unit circle.
#[derive(Debug, Clone, Copy)]
pub struct BranchPair {
    pub x: Complex64,
    pub y_plus: Complex64,
    pub y_minus: Complex64,
}

/// Branch values `y±(e^{i theta})` with the principal square root.
///
/// The removable singularity (`x (x-a)^2 = 0` on the circle, i.e. a = 1,
/// theta = 0 or a = -1, theta = pi) returns the one-sided limit pair
/// `y± = -+ sqrt(-x)`.
pub fn y_branches(alpha: f64, theta: f64) -> BranchPair {
    let x = Complex64::from_polar(1.0, theta);
    let d = x * (x - alpha) * (x - alpha);
    if d.norm() == 0.0 {
        // removable point: y^2 = -x; the limit pair from theta -> 0^+
        // (the imaginary part of -x is zeroed to dodge the -0.0 branch cut)
        let s = Complex64::new(-x.re, 0.0).sqrt();
        return BranchPair {
            x,
            y_plus: -s,
            y_minus: s,
        };
    }
    let w = Complex64::new(0.25, 0.0) - 1.0 / d;
    let s = w.sqrt();
    let front = -(x * x - alpha * x);
    BranchPair {
        x,
        y_plus: front * (Complex64::new(0.5, 0.0) + s),
        y_minus: front * (Complex64::new(0.5, 0.0) - s),
    }
}

/// Branch-point angle `c(a) = arccos((a-1)/2)`.
pub fn c_alpha(alpha: f64) -> f64 {
    ((alpha - 1.0) / 2.0).clamp(-1.0, 1.0).acos()
}

/// The intersection of the curve with the 2-torus for `a` in `(-1, 3)`.
#[derive(Debug, Clone)]
pub struct ToricData {
    pub c_alpha: f64,
    pub y_plus: Complex64,
    pub y_minus: Complex64,
    /// The six points `(x, y)`: `P1± = (1, Y±)`, `P2± = (Y±, 1)`,
    /// `P3± = (Y±, Y±)`.
    pub points: [(Complex64, Complex64); 6],
}

/// Toric points `Y± = (a-1)/2 ± i sqrt((3-a)(a+1))/2` and their six
/// pairings on the curve.
pub fn toric_points(alpha: f64) -> Result<ToricData> {
    if region_classify(alpha) != AlphaRegion::Inside {
        return Err(Error::Domain(format!(
            "toric_points needs -1 < alpha < 3, got {alpha}"
        )));
    }
    let re = (alpha - 1.0) / 2.0;
    let im = ((3.0 - alpha) * (alpha + 1.0)).sqrt() / 2.0;
    let yp = Complex64::new(re, im);
    let ym = Complex64::new(re, -im);
    let one = Complex64::new(1.0, 0.0);
    Ok(ToricData {
        c_alpha: c_alpha(alpha),
        y_plus: yp,
        y_minus: ym,
        points: [(one, yp), (one, ym), (yp, one), (ym, one), (yp, yp), (ym, ym)],
    })
}

/// The measures at one parameter value, with quadrature error estimate.
#[derive(Debug, Clone, Copy)]
pub struct MeasureBreakdown {
    pub alpha: f64,
    pub region: AlphaRegion,
    pub n: f64,
    /// `(1/pi) int_0^c log|y+|`, populated inside the window.
    pub i_part: Option<f64>,
    /// `(1/pi) int_c^pi log|y+|`, populated inside the window.
    pub j_part: Option<f64>,
    /// `n - 3J = I - 2J`, populated inside the window.
    pub n_tilde: Option<f64>,
    pub err: f64,
}

fn log_abs_y_plus(alpha: f64) -> impl Fn(f64) -> f64 {
    move |theta: f64| y_branches(alpha, theta).y_plus.norm().max(1e-300).ln()
}

/// `n(a) = (1/pi) int_0^pi log|y+(e^{i theta})| d theta`, split at the
/// branch angle inside the window.
pub fn n_measure(alpha: f64, tol: f64) -> Result<MeasureBreakdown> {
    let region = region_classify(alpha);
    let f = log_abs_y_plus(alpha);
    let half = 0.5 * tol * PI;
    if region == AlphaRegion::Inside {
        let c = c_alpha(alpha);
        let qi = integrate(&f, 0.0, c, &[], half)?;
        let qj = integrate(&f, c, PI, &[], half)?;
        let i_part = qi.value / PI;
        let j_part = qj.value / PI;
        let n = i_part + j_part;
        Ok(MeasureBreakdown {
            alpha,
            region,
            n,
            i_part: Some(i_part),
            j_part: Some(j_part),
            n_tilde: Some(n - 3.0 * j_part),
            err: (qi.error_estimate + qj.error_estimate) / PI,
        })
    } else {
        let q = integrate(&f, 0.0, PI, &[], tol * PI)?;
        Ok(MeasureBreakdown {
            alpha,
            region,
            n: q.value / PI,
            i_part: None,
            j_part: None,
            n_tilde: None,
            err: q.error_estimate / PI,
        })
    }
}

/// `J(a) = (1/pi) int_{c(a)}^pi log|y+|`, only inside the window.
pub fn j_integral(alpha: f64, tol: f64) -> Result<f64> {
    if region_classify(alpha) != AlphaRegion::Inside {
        return Err(Error::Domain(format!(
            "j_integral needs -1 < alpha < 3, got {alpha}"
        )));
    }
    let q = integrate(log_abs_y_plus(alpha), c_alpha(alpha), PI, &[], tol * PI)?;
    Ok(q.value / PI)
}

/// The modified measure `ntilde(a) = n(a) - 3 J(a)`.
pub fn n_tilde(alpha: f64, tol: f64) -> Result<f64> {
    let m = n_measure(alpha, tol)?;
    m.n_tilde.ok_or_else(|| {
        Error::Domain(format!("n_tilde needs -1 < alpha < 3, got {alpha}"))
    })
}

/// `n(a) = Re(log a) - (2/a^3) 4F3(4/3,5/3,1,1; 2,2,2; 27/a^3)` for
/// `|a| >= 3` (the convergent regime of the series).
pub fn closed_form_outside(alpha: f64) -> Result<f64> {
    if alpha.abs() < 3.0 {
        return Err(Error::Domain(format!(
            "closed_form_outside needs |alpha| >= 3 (divergent series inside), got {alpha}"
        )));
    }
    let z = 27.0 / (alpha * alpha * alpha);
    // on the unit circle the tail decays like 1/n only
    let tol = if z.abs() > 1.0 - 1e-12 { 3e-7 } else { 1e-13 };
    let f = pfq(
        &PFQParams::new(
            &[4.0 / 3.0, 5.0 / 3.0, 1.0, 1.0],
            &[2.0, 2.0, 2.0],
            Complex64::new(z, 0.0),
        )
        .with_tol(tol),
    )?;
    Ok(alpha.abs().ln() - 2.0 / (alpha * alpha * alpha) * f.value.re)
}

/// The convergent series form of `ntilde` inside the window.
#[derive(Debug, Clone, Copy)]
pub struct InsideClosedForm {
    pub value: f64,
    /// Set when evaluated at `a = 0`, where the expression degenerates to
    /// its exact zero limit while `n(0)` itself does not vanish.
    pub at_zero: bool,
}

/// Constants of the hypergeometric closed forms.
#[derive(Debug, Clone, Copy)]
pub struct HyperClosedForm {
    /// Prefactor of the two-series form. The sign-split expression
    /// `-(1 + 3 sgn a)^2 / 64` printed in the source collapses to `-1/4`
    /// on the negative side as well once checked against quadrature, so
    /// this is constant on the whole punctured window.
    pub s_alpha: f64,
    /// Prefactor `4 / (1 - 3 sgn a)` of the continued 4F3 form.
    pub thm_prefactor: f64,
    /// `cbrt(2) G(1/6) G(1/3) G(1/2) / (sqrt(3) pi^2)`.
    pub gamma_c1: f64,
    /// `G(2/3)^3 / (2 pi^2)`.
    pub gamma_c2: f64,
}

/// The gamma-constants and prefactors used by [`closed_form_inside`].
pub fn hyper_constants(alpha: f64) -> Result<HyperClosedForm> {
    if alpha == 0.0 {
        return Err(Error::Domain("prefactors undefined at alpha = 0".into()));
    }
    let sgn = alpha.signum();
    let c1 = 2.0f64.cbrt() * gamma_real(1.0 / 6.0)? * gamma_real(1.0 / 3.0)?
        * gamma_real(0.5)?
        / (3.0f64.sqrt() * PI * PI);
    let c2 = gamma_real(2.0 / 3.0)?.powi(3) / (2.0 * PI * PI);
    Ok(HyperClosedForm {
        s_alpha: -0.25,
        thm_prefactor: 4.0 / (1.0 - 3.0 * sgn),
        gamma_c1: c1,
        gamma_c2: c2,
    })
}

/// `ntilde(a) = s (c1 a 3F2(1/3,1/3,1/3; 2/3,4/3; a^3/27)
///              + c2 a^2 3F2(2/3,2/3,2/3; 4/3,5/3; a^3/27))`
/// for `a` in `(-1, 3)`.
pub fn closed_form_inside(alpha: f64) -> Result<InsideClosedForm> {
    if region_classify(alpha) != AlphaRegion::Inside {
        return Err(Error::Domain(format!(
            "closed_form_inside needs -1 < alpha < 3, got {alpha}"
        )));
    }
    if alpha == 0.0 {
        return Ok(InsideClosedForm {
            value: 0.0,
            at_zero: true,
        });
    }
    let hc = hyper_constants(alpha)?;
    let z = alpha * alpha * alpha / 27.0;
    let third = 1.0 / 3.0;
    let f1 = pfq_real(
        &[third, third, third],
        &[2.0 * third, 4.0 * third],
        z,
        1e-14,
    )?;
    let f2 = pfq_real(
        &[2.0 * third, 2.0 * third, 2.0 * third],
        &[4.0 * third, 5.0 * third],
        z,
        1e-14,
    )?;
    Ok(InsideClosedForm {
        value: hc.s_alpha * (hc.gamma_c1 * alpha * f1 + hc.gamma_c2 * alpha * alpha * f2),
        at_zero: false,
    })
}

/// Data of the substitution `a = (l^3 - 2)/l`, which maps `(1, 2)`
/// bijectively onto `(-1, 3)`.
#[derive(Debug, Clone, Copy)]
pub struct LambdaSub {
    pub lambda: f64,
    pub alpha: f64,
    /// `l^2`, the real root of the quartic factor pattern.
    pub x1: f64,
    /// Complex pair with `x2 x3 = 4/l^2`, `x2 + x3 = l^2 - 4/l`.
    pub x2: Complex64,
    pub x3: Complex64,
    /// `gamma = e^{i c(a)}` expressed through `l`.
    pub gamma: Complex64,
}

/// Solve `l^3 - a l - 2 = 0` for the unique root in `[1, 2)`.
pub fn solve_lambda(alpha: f64) -> Result<LambdaSub> {
    if region_classify(alpha) == AlphaRegion::Outside {
        return Err(Error::Domain(format!(
            "solve_lambda needs -1 <= alpha <= 3, got {alpha}"
        )));
    }
    let g = |l: f64| l * l * l - alpha * l - 2.0;
    let (mut lo, mut hi) = (1.0f64 - 1e-12, 2.0f64 + 1e-12);
    let mut l = 0.5 * (lo + hi);
    for _ in 0..120 {
        // Newton with bisection fallback
        let gl = g(l);
        if gl == 0.0 {
            break;
        }
        if gl > 0.0 {
            hi = l;
        } else {
            lo = l;
        }
        let dg = 3.0 * l * l - alpha;
        let step = gl / dg;
        let next = l - step;
        if step.abs() < 1e-16 * l.abs() {
            if next > 1.0 - 1e-9 && next < 2.0 + 1e-9 {
                l = next;
            }
            break;
        }
        l = if next > lo && next < hi {
            next
        } else {
            0.5 * (lo + hi)
        };
    }
    let l2 = l * l;
    let l3 = l2 * l;
    let disc = l3 * (l3 - 8.0);
    let (x2, x3) = if disc >= 0.0 {
        let s = disc.sqrt();
        (
            Complex64::new((l3 - 4.0 + s) / (2.0 * l), 0.0),
            Complex64::new((l3 - 4.0 - s) / (2.0 * l), 0.0),
        )
    } else {
        let s = (-disc).sqrt() / (2.0 * l);
        let re = (l3 - 4.0) / (2.0 * l);
        (Complex64::new(re, s), Complex64::new(re, -s))
    };
    let gamma = Complex64::new(
        (l3 - l - 2.0) / (2.0 * l),
        (l + 1.0) / (2.0 * l) * ((2.0 - l) * (l3 + l - 2.0)).max(0.0).sqrt(),
    );
    Ok(LambdaSub {
        lambda: l,
        alpha,
        x1: l2,
        x2,
        x3,
        gamma,
    })
}

/// `p_l(x) = x (l^2 - x) (x^2 + (4/l - l^2) x + 4/l^2)`.
pub fn p_lambda(lambda: f64, z: Complex64) -> Complex64 {
    let l2 = lambda * lambda;
    let quad = z * z + (4.0 / lambda - l2) * z + 4.0 / l2;
    z * (l2 - z) * quad
}

/// Continuously tracked square root of `-p_l` along the segment
/// `z0 -> z1`, seeded with the principal value at the midpoint.
struct BranchTracker {
    lambda: f64,
    z0: Complex64,
    dz: Complex64,
    tracked: Vec<Complex64>,
}

impl BranchTracker {
    const GRID: usize = 4096;

    fn new(lambda: f64, z0: Complex64, z1: Complex64) -> Result<Self> {
        let dz = z1 - z0;
        let n = Self::GRID;
        let mut tracked = vec![Complex64::new(0.0, 0.0); n + 1];
        let mid = n / 2;
        for (i, slot) in tracked.iter_mut().enumerate() {
            let z = z0 + dz * (i as f64 / n as f64);
            let w = -p_lambda(lambda, z);
            if w.norm() < 1e-14 && i != 0 && i != n {
                return Err(Error::BranchTracking {
                    at: i as f64 / n as f64,
                });
            }
            *slot = w.sqrt();
        }
        // walk outward from the midpoint, keeping the sign continuous
        for i in (mid + 1)..=n {
            if (tracked[i] - tracked[i - 1]).norm() > (tracked[i] + tracked[i - 1]).norm() {
                tracked[i] = -tracked[i];
            }
        }
        for i in (0..mid).rev() {
            if (tracked[i] - tracked[i + 1]).norm() > (tracked[i] + tracked[i + 1]).norm() {
                tracked[i] = -tracked[i];
            }
        }
        Ok(BranchTracker {
            lambda,
            z0,
            dz,
            tracked,
        })
    }

    /// Branch-consistent `sqrt(-p_l(z))` for `z` on the segment.
    fn sqrt_at(&self, z: Complex64) -> Complex64 {
        let t = if self.dz.norm() == 0.0 {
            0.0
        } else {
            (((z - self.z0) * self.dz.conj()).re / self.dz.norm_sqr()).clamp(0.0, 1.0)
        };
        let i = (t * Self::GRID as f64).round() as usize;
        let reference = self.tracked[i.min(Self::GRID)];
        let v = (-p_lambda(self.lambda, z)).sqrt();
        if (v - reference).norm() <= (v + reference).norm() {
            v
        } else {
            -v
        }
    }
}

/// Both sides of the path-integral identity for `1/sqrt(-p_l)`.
#[derive(Debug, Clone, Copy)]
pub struct GdiCheck {
    /// Complex path integral along the segment `l - 1 -> gamma`.
    pub lhs: Complex64,
    /// Real-axis integral over `(0, -1/l)`.
    pub rhs: Complex64,
    /// +1 when lhs matches rhs with equal sign, -1 when negated.
    pub observed_sign: i8,
}

/// Compare `int_{l-1}^gamma dz/sqrt(-p_l)` (branch tracked from the
/// midpoint) against the real integral `int_0^{-1/l} dx/sqrt(-p_l)`;
/// equality holds up to a global branch sign.
pub fn gdi_check(lambda: f64) -> Result<GdiCheck> {
    if !(1.0..2.0).contains(&lambda) {
        return Err(Error::Domain(format!(
            "gdi_check needs 1 <= lambda < 2, got {lambda}"
        )));
    }
    // rhs: -p_l > 0 on (-1/l, 0), a real integral with a sqrt endpoint at 0
    let rhs = integrate(
        |x| {
            let w = -p_lambda(lambda, Complex64::new(x, 0.0)).re;
            1.0 / w.max(0.0).sqrt()
        },
        0.0,
        -1.0 / lambda,
        &[],
        1e-11,
    )?
    .value;

    let z0 = Complex64::new(lambda - 1.0, 0.0);
    let alpha = (lambda * lambda * lambda - 2.0) / lambda;
    let z1 = solve_lambda(alpha)?.gamma;
    let lhs = if (z1 - z0).norm() < 1e-15 {
        Complex64::new(0.0, 0.0)
    } else {
        let tracker = BranchTracker::new(lambda, z0, z1)?;
        integrate_path(|z| 1.0 / tracker.sqrt_at(z), &[z0, z1], 1e-11)?
    };
    let rhs = Complex64::new(rhs, 0.0);
    let observed_sign = if (lhs - rhs).norm() <= (lhs + rhs).norm() {
        1
    } else {
        -1
    };
    Ok(GdiCheck {
        lhs,
        rhs,
        observed_sign,
    })
}

/// The symmetric implicit curve used to prove the path identity:
/// quadratic in y with x-dependent coefficients.
pub fn f_lambda(lambda: f64, x: Complex64, y: Complex64) -> Complex64 {
    let l = lambda;
    let l2 = l * l;
    let m = l * l * l - l2 + l - 2.0;
    let big = ((((((l - 2.0) * l + 2.0) * l - 5.0) * l + 6.0) * l - 6.0) * l + 6.0) * l - 4.0;
    l2 * (l - 1.0) * x * x * y * y - l * (l - 1.0) * m * (x * x * y + x * y * y)
        + l2 * (x * x + y * y)
        + big * x * y
        - 2.0 * l2 * (l - 1.0) * (x + y)
        + l2 * (l - 1.0) * (l - 1.0)
}

/// Result of sampling the implicit-curve differential identity.
#[derive(Debug, Clone, Copy)]
pub struct FLambdaCheck {
    /// max over samples of `|(dy/dx)^2 - p_l(y)/p_l(x)|`.
    pub max_residual: f64,
    /// Tracked `y` as `x -> 0^-`; the identity sends it to `l - 1`.
    pub y_at_zero: Complex64,
}

/// Track the branch of `F_l(x, y) = 0` over `x in (-1/l, 0)` that starts
/// near `gamma`, and check `(dy/dx)^2 = p_l(y)/p_l(x)` by implicit
/// differentiation at `samples` points.
pub fn f_lambda_check(lambda: f64, samples: usize) -> Result<FLambdaCheck> {
    if !(1.0..2.0).contains(&lambda) || samples == 0 {
        return Err(Error::Domain(format!(
            "f_lambda_check needs 1 <= lambda < 2 and samples >= 1, got {lambda}, {samples}"
        )));
    }
    let l = lambda;
    let l2 = l * l;
    let m = l * l * l - l2 + l - 2.0;
    let big = ((((((l - 2.0) * l + 2.0) * l - 5.0) * l + 6.0) * l - 6.0) * l + 6.0) * l - 4.0;
    let coeff_a = |x: Complex64| l2 * (l - 1.0) * x * x - l * (l - 1.0) * m * x + l2;
    let coeff_b = |x: Complex64| -l * (l - 1.0) * m * x * x + big * x - 2.0 * l2 * (l - 1.0);
    let coeff_c = |x: Complex64| l2 * x * x - 2.0 * l2 * (l - 1.0) * x + l2 * (l - 1.0) * (l - 1.0);
    let roots = |x: Complex64| -> (Complex64, Complex64) {
        let (a, b, c) = (coeff_a(x), coeff_b(x), coeff_c(x));
        let mut d = (b * b - 4.0 * a * c).sqrt();
        if (-b - d).norm() < (-b + d).norm() {
            d = -d;
        }
        let q = -(b + d) / 2.0;
        (q / a, c / q)
    };
    let alpha = (l * l * l - 2.0) / l;
    let gamma = solve_lambda(alpha)?.gamma;

    let fx = |x: Complex64, y: Complex64| {
        2.0 * l2 * (l - 1.0) * x * y * y - l * (l - 1.0) * m * (2.0 * x * y + y * y)
            + 2.0 * l2 * x
            + big * y
            - 2.0 * l2 * (l - 1.0)
    };
    let fy = |x: Complex64, y: Complex64| fx(y, x); // symmetric polynomial

    let mut prev = gamma;
    let mut max_residual = 0.0f64;
    let mut y_cur = gamma;
    let steps = samples.max(64); // tracking grid at least this fine
    for j in 0..steps {
        let t = (j as f64 + 0.5) / steps as f64;
        let x = Complex64::new(-(1.0 - t) / l, 0.0);
        let (r1, r2) = roots(x);
        y_cur = if (r1 - prev).norm() <= (r2 - prev).norm() {
            r1
        } else {
            r2
        };
        if (y_cur - prev).norm() > 0.5 {
            return Err(Error::RootTracking { x: x.re });
        }
        prev = y_cur;
        let dydx = -fx(x, y_cur) / fy(x, y_cur);
        let res = (dydx * dydx - p_lambda(l, y_cur) / p_lambda(l, x)).norm();
        max_residual = max_residual.max(res);
    }
    // refine toward x -> 0^- geometrically; y approaches its endpoint
    // like sqrt(|x|), so uniform samples stop short
    let mut x_tail = -0.5 / (l * steps as f64);
    for _ in 0..40 {
        let x = Complex64::new(x_tail, 0.0);
        let (r1, r2) = roots(x);
        y_cur = if (r1 - prev).norm() <= (r2 - prev).norm() {
            r1
        } else {
            r2
        };
        if (y_cur - prev).norm() > 0.5 {
            return Err(Error::RootTracking { x: x.re });
        }
        prev = y_cur;
        x_tail *= 0.5;
    }
    Ok(FLambdaCheck {
        max_residual,
        y_at_zero: y_cur,
    })
}

/// Parameters of the complete-elliptic-integral form of the derivative.
#[derive(Debug, Clone, Copy)]
pub struct KFormParams {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    pub t1: f64,
    pub t2: f64,
    pub rho: f64,
}

/// The quartic-splitting constants of the derivative identity at `l`.
pub fn kform_params(lambda: f64) -> Result<KFormParams> {
    if !(1.0..2.0).contains(&lambda) {
        return Err(Error::Domain(format!(
            "kform_params needs 1 <= lambda < 2, got {lambda}"
        )));
    }
    let l3 = lambda * lambda * lambda;
    let s = (l3 + 1.0).sqrt();
    let a1 = (l3 + 2.0 - 2.0 * s) / (4.0 * s);
    let b1 = (-l3 - 2.0 - 2.0 * s) / (4.0 * s);
    let a2 = (-l3 + 2.0 + 2.0 * s) / (4.0 * s);
    let b2 = (l3 - 2.0 + 2.0 * s) / (4.0 * s);
    let t2 = (-a1 / b1).sqrt();
    let rho = (l3 * l3 - 4.0 * l3 - 8.0 + 8.0 * s) / (16.0 * s);
    Ok(KFormParams {
        a1,
        a2,
        b1,
        b2,
        t1: -t2,
        t2,
        rho,
    })
}

/// Three independent routes to `d ntilde / d alpha`.
#[derive(Debug, Clone, Copy)]
pub struct DerivCheck {
    /// Central finite difference of the quadrature measure, h = 1e-4.
    pub fd: f64,
    /// Convergent transformed 2F1 form.
    pub cf_2f1: f64,
    /// Complete-elliptic-integral form.
    pub cf_k: f64,
}

/// Evaluate all three derivative routes at `alpha` in `(-1,0) u (0,3)`.
pub fn deriv_check(alpha: f64) -> Result<DerivCheck> {
    let h = 1e-4;
    if region_classify(alpha) != AlphaRegion::Inside
        || alpha.abs() < 2.0 * h
        || alpha < -1.0 + 2.0 * h
        || alpha > 3.0 - 2.0 * h
    {
        return Err(Error::Domain(format!(
            "deriv_check needs alpha in (-1,0) u (0,3) away from the endpoints, got {alpha}"
        )));
    }
    let fd = (n_tilde(alpha + h, 1e-10)? - n_tilde(alpha - h, 1e-10)?) / (2.0 * h);

    let l = solve_lambda(alpha)?.lambda;
    let l3 = l * l * l;
    let third = 1.0 / 3.0;
    let cf_2f1 = if alpha > 0.0 {
        let z = 27.0 * l3 * l3 / (l3 + 4.0f64).powi(3);
        -2.0 * l / (l3 + 4.0) * pfq_real(&[third, 2.0 * third], &[1.0], z, 1e-14)?
    } else {
        let y = l3;
        let z = 27.0 * y * y / (y + 4.0f64).powi(3);
        (1.0 / alpha) * (4.0 - 2.0 * y) / (y + 4.0)
            * pfq_real(&[third, 2.0 * third], &[1.0], z, 1e-14)?
    };

    let kp = kform_params(l)?;
    let s = (l3 + 1.0).sqrt();
    // the squared modulus A1 B2 / (A2 B1) is negative on the window, so the
    // imaginary-modulus transformation K(sqrt(m)) = K(sqrt(m/(m-1)))/sqrt(1-m)
    // carries the evaluation back to a real modulus (= sqrt(rho))
    let m = kp.a1 * kp.b2 / (kp.a2 * kp.b1);
    let k_imag = ell_k((m / (m - 1.0)).sqrt())? / (1.0 - m).sqrt();
    let cf_k = -4.0 * l / (PI * ((s + 1.0).powi(3) * (3.0 - s)).sqrt()) * k_imag;

    Ok(DerivCheck { fd, cf_2f1, cf_k })
}

/// One-sided limits of the branches at the breakpoints.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryLimits {
    pub yp_at_c_minus: Complex64,
    pub yp_at_minus_c_plus: Complex64,
    pub yp_at_zero_plus: Complex64,
    pub yp_at_zero_minus: Complex64,
    pub ym_at_c_plus: Complex64,
    pub ym_at_minus_c_minus: Complex64,
}

/// Numerical one-sided limits (Richardson-extrapolated) of `y±` at
/// `theta -> ±c(a)` and `theta -> 0±`; the limit set is
/// `{1, 1, Y-, Y+, 1, 1}`.
pub fn boundary_limits(alpha: f64) -> Result<BoundaryLimits> {
    if region_classify(alpha) != AlphaRegion::Inside {
        return Err(Error::Domain(format!(
            "boundary_limits needs -1 < alpha < 3, got {alpha}"
        )));
    }
    let c = c_alpha(alpha);
    let eps = 1e-5;
    let lim = |f: &dyn Fn(f64) -> Complex64, at: f64, dir: f64| -> Complex64 {
        let f1 = f(at + dir * eps);
        let f2 = f(at + dir * eps / 2.0);
        2.0 * f2 - f1
    };
    let yp = |t: f64| y_branches(alpha, t).y_plus;
    let ym = |t: f64| y_branches(alpha, t).y_minus;
    Ok(BoundaryLimits {
        yp_at_c_minus: lim(&yp, c, -1.0),
        yp_at_minus_c_plus: lim(&yp, -c, 1.0),
        yp_at_zero_plus: lim(&yp, 0.0, 1.0),
        yp_at_zero_minus: lim(&yp, 0.0, -1.0),
        ym_at_c_plus: lim(&ym, c, 1.0),
        ym_at_minus_c_minus: lim(&ym, -c, -1.0),
    })
}

/// Families evaluated by the 2D torus integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family2D {
    /// `x^3 + y^3 + 1 - a x y`.
    PAlpha,
    /// `(x+1)(y+1)(x+y) - a x y`.
    GFamily,
}

impl Family2D {
    pub fn eval(self, alpha: f64, x: Complex64, y: Complex64) -> Complex64 {
        match self {
            Family2D::PAlpha => x * x * x + y * y * y + 1.0 - alpha * x * y,
            Family2D::GFamily => (x + 1.0) * (y + 1.0) * (x + y) - alpha * x * y,
        }
    }
}

/// Two-dimensional Mahler measure by nested adaptive quadrature over the
/// half domain `theta in [0, pi]` (conjugation symmetry), inner integral
/// over the full circle in the second variable.
pub fn mahler2d(poly: Family2D, alpha: f64, tol: f64) -> Result<f64> {
    if tol < 1e-5 {
        return Err(Error::Domain(format!(
            "mahler2d tolerance floor is 1e-5, got {tol}"
        )));
    }
    let scaled = tol * 2.0 * PI * PI;
    let inner_tol = 0.15 * scaled / PI;
    let outer_tol = 0.5 * scaled;
    let inner = |theta: f64| -> f64 {
        let x = Complex64::from_polar(1.0, theta);
        let f = |phi: f64| {
            let y = Complex64::from_polar(1.0, phi);
            poly.eval(alpha, x, y).norm().max(1e-300).ln()
        };
        // a panel boundary at 0 helps when the zero locus crosses phi = 0
        match integrate(f, -PI, PI, &[0.0], inner_tol) {
            Ok(q) => q.value,
            Err(_) => f64::NAN,
        }
    };
    let outer = integrate(inner, 0.0, PI, &[], outer_tol)?;
    Ok(outer.value / (2.0 * PI * PI))
}

/// The split measure of the auxiliary family `y^2 + (x^2+1) y + x^3`.
#[derive(Debug, Clone, Copy)]
pub struct B11Split {
    /// `(1/pi) int_0^{pi/2} log|y-|`.
    pub first_half: f64,
    /// `(1/pi) int_{pi/2}^pi log|y-|`.
    pub second_half: f64,
    /// `second_half - first_half`; the branch-cut orientation that lines
    /// up with `-L'` of the conductor-11 curve.
    pub combination: f64,
}

/// Small branch of the auxiliary family at `x = e^{i theta}`.
pub fn y_minus_s_family(theta: f64) -> Complex64 {
    let x = Complex64::from_polar(1.0, theta);
    let den = x * x + 1.0;
    let w = Complex64::new(1.0, 0.0) - 4.0 * x * x * x / (den * den);
    -(den / 2.0) * (Complex64::new(1.0, 0.0) - w.sqrt())
}

/// Quadrature of the two halves of the split measure; the toric points of
/// this family sit at `x = ±i`, i.e. at the split angle.
pub fn s_family_b11(tol: f64) -> Result<B11Split> {
    let f = |theta: f64| y_minus_s_family(theta).norm().max(1e-300).ln();
    let q1 = integrate(f, 0.0, PI / 2.0, &[], tol * PI / 2.0)?;
    let q2 = integrate(f, PI / 2.0, PI, &[], tol * PI / 2.0)?;
    let first_half = q1.value / PI;
    let second_half = q2.value / PI;
    Ok(B11Split {
        first_half,
        second_half,
        combination: second_half - first_half,
    })
}
