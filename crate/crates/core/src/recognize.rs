//! Recovery of exact arithmetic from floating-point values: best rational
//! approximation by continued fractions, and a small double-precision PSLQ
//! for integer relations among up to eight reals.

use crate::{Error, Result};

/// A recognized rational `num/den` with its approximation residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RationalGuess {
    pub num: i64,
    /// Always positive; gcd(num, den) = 1.
    pub den: i64,
    pub residual: f64,
}

impl RationalGuess {
    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl std::fmt::Display for RationalGuess {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Best continued-fraction convergent of `x` with denominator `<= max_den`.
///
/// Succeeds only if the winning convergent sits within `tol` of `x`.
pub fn rational_reconstruct(x: f64, max_den: i64, tol: f64) -> Result<RationalGuess> {
    if max_den < 1 {
        return Err(Error::Domain(format!("max_den must be >= 1, got {max_den}")));
    }
    if !x.is_finite() {
        return Err(Error::Domain(format!("cannot reconstruct {x}")));
    }
    let (mut p_prev, mut q_prev) = (1i64, 0i64);
    let (mut p, mut q) = (x.floor() as i64, 1i64);
    let mut frac = x - x.floor();
    let mut best = (p, q, (x - p as f64).abs());

    for _ in 0..64 {
        if frac.abs() < 1e-18 {
            break;
        }
        let inv = 1.0 / frac;
        let a = inv.floor();
        if a >= i64::MAX as f64 / 2.0 {
            break;
        }
        let a_int = a as i64;
        let p_next = a_int.checked_mul(p).and_then(|v| v.checked_add(p_prev));
        let q_next = a_int.checked_mul(q).and_then(|v| v.checked_add(q_prev));
        let (p_next, q_next) = match (p_next, q_next) {
            (Some(pn), Some(qn)) if qn <= max_den => (pn, qn),
            _ => break,
        };
        p_prev = p;
        q_prev = q;
        p = p_next;
        q = q_next;
        let r = (x - p as f64 / q as f64).abs();
        if r < best.2 {
            best = (p, q, r);
        }
        frac = inv - a;
    }

    let (num, den, residual) = best;
    if residual >= tol {
        return Err(Error::NoRationalCandidate {
            max_den,
            tol,
            residual,
        });
    }
    Ok(RationalGuess { num, den, residual })
}

/// An integer relation `sum_i vector[i] * x[i] ~ 0` found by PSLQ.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegerRelation {
    pub vector: Vec<i64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Norm-bound cap beyond which double precision cannot certify anything.
const PSLQ_BOUND_CAP: f64 = 1e10;

/// Standard PSLQ at double precision (reliable to ~12 combined digits).
///
/// Returns the first relation whose recomputed residual (against the
/// original, unscaled input) is below `tol`; otherwise fails with the
/// current relation-norm lower bound. Pivot ties break toward the
/// smallest index so runs are reproducible.
#[allow(clippy::needless_range_loop)]
pub fn pslq(x: &[f64], tol: f64, max_iter: usize) -> Result<IntegerRelation> {
    let n = x.len();
    if !(2..=8).contains(&n) {
        return Err(Error::Domain(format!("pslq wants 2..=8 entries, got {n}")));
    }
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Err(Error::Domain("pslq input is all zeros".into()));
    }
    let xs: Vec<f64> = x.iter().map(|v| v / scale).collect();
    let gamma = (4.0f64 / 3.0).sqrt();

    // partial norms s_k = sqrt(sum_{j >= k} x_j^2)
    let mut s = vec![0.0f64; n];
    let mut acc = 0.0;
    for k in (0..n).rev() {
        acc += xs[k] * xs[k];
        s[k] = acc.sqrt();
    }
    let t = s[0];
    let mut y: Vec<f64> = xs.iter().map(|v| v / t).collect();
    for v in s.iter_mut() {
        *v /= t;
    }

    // H is n x (n-1), lower trapezoidal
    let mut h = vec![vec![0.0f64; n - 1]; n];
    for (i, row) in h.iter_mut().enumerate() {
        for (j, hij) in row.iter_mut().enumerate() {
            *hij = if i == j {
                s[i + 1] / s[i]
            } else if i > j {
                -y[i] * y[j] / (s[j] * s[j + 1])
            } else {
                0.0
            };
        }
    }

    // B accumulates the inverse transforms; its columns carry candidate relations.
    let mut b = vec![vec![0i64; n]; n];
    for (i, row) in b.iter_mut().enumerate() {
        row[i] = 1;
    }

    fn reduce(h: &mut [Vec<f64>], y: &mut [f64], b: &mut [Vec<i64>], start: usize) {
        let n = y.len();
        for i in start.max(1)..n {
            for j in (0..i.min(n - 1)).rev() {
                if h[j][j] == 0.0 {
                    continue;
                }
                let q = (h[i][j] / h[j][j]).round();
                if q == 0.0 {
                    continue;
                }
                y[j] += q * y[i];
                for k in 0..=j {
                    h[i][k] -= q * h[j][k];
                }
                let qi = q as i64;
                for row in b.iter_mut() {
                    row[j] = row[j].wrapping_add(qi.wrapping_mul(row[i]));
                }
            }
        }
    }
    reduce(&mut h, &mut y, &mut b, 1);

    let check_relation = |y: &[f64], b: &[Vec<i64>], iterations: usize| -> Option<IntegerRelation> {
        let (jmin, ymin) = y
            .iter()
            .enumerate()
            .map(|(j, v)| (j, v.abs()))
            .min_by(|a, c| a.1.total_cmp(&c.1))
            .unwrap();
        if ymin > tol {
            return None;
        }
        let vector: Vec<i64> = b.iter().map(|row| row[jmin]).collect();
        if vector.iter().all(|&v| v == 0) {
            return None;
        }
        let mut residual = 0.0f64;
        let mut abs_sum = 0.0f64;
        for (&v, &xi) in vector.iter().zip(x.iter()) {
            residual += v as f64 * xi;
            abs_sum += (v as f64 * xi).abs();
        }
        let residual = residual.abs();
        // at double precision a relation is certifiable only when the
        // rounding floor of its dot product sits below the tolerance
        let floor = abs_sum * f64::EPSILON;
        if residual <= tol * scale.max(1.0) && floor <= tol * scale.max(1.0) {
            Some(IntegerRelation {
                vector,
                residual,
                iterations,
            })
        } else {
            None
        }
    };

    if let Some(rel) = check_relation(&y, &b, 0) {
        return Ok(rel);
    }

    let mut bound = 0.0f64;
    for iter in 1..=max_iter {
        // pivot: largest gamma^i |H[i][i]|, smallest index on ties
        let mut m = 0usize;
        let mut best = f64::NEG_INFINITY;
        let mut weight = gamma;
        for i in 0..n - 1 {
            let v = weight * h[i][i].abs();
            if v > best {
                best = v;
                m = i;
            }
            weight *= gamma;
        }

        y.swap(m, m + 1);
        h.swap(m, m + 1);
        for row in b.iter_mut() {
            row.swap(m, m + 1);
        }

        if m < n - 2 {
            // Givens rotation restores the trapezoidal corner
            let t0 = (h[m][m] * h[m][m] + h[m][m + 1] * h[m][m + 1]).sqrt();
            if t0 == 0.0 {
                return Err(Error::PrecisionExhausted {
                    bound,
                    iterations: iter,
                });
            }
            let (c, sn) = (h[m][m] / t0, h[m][m + 1] / t0);
            for i in m..n {
                let (a0, a1) = (h[i][m], h[i][m + 1]);
                h[i][m] = c * a0 + sn * a1;
                h[i][m + 1] = -sn * a0 + c * a1;
            }
        }
        reduce(&mut h, &mut y, &mut b, m + 1);

        if let Some(rel) = check_relation(&y, &b, iter) {
            return Ok(rel);
        }

        let hmax = (0..n - 1).fold(0.0f64, |mx, i| mx.max(h[i][i].abs()));
        bound = if hmax > 0.0 { 1.0 / hmax } else { f64::INFINITY };
        if bound > PSLQ_BOUND_CAP {
            return Err(Error::PrecisionExhausted {
                bound,
                iterations: iter,
            });
        }
    }
    Err(Error::PrecisionExhausted {
        bound,
        iterations: max_iter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reconstruct_one_third() {
        let g = rational_reconstruct(0.333_333_333_3, 10, 1e-6).unwrap();
        assert_eq!((g.num, g.den), (1, 3));
        assert!(g.residual < 1e-9);
    }

    #[test]
    fn reconstruct_negative_and_integer() {
        let g = rational_reconstruct(-1.666_666_666_666_7, 10, 1e-9).unwrap();
        assert_eq!((g.num, g.den), (-5, 3));
        let g = rational_reconstruct(4.0, 10, 1e-12).unwrap();
        assert_eq!((g.num, g.den), (4, 1));
    }

    #[test]
    fn reconstruct_rejects_irrational() {
        let err = rational_reconstruct(std::f64::consts::PI, 10, 1e-9);
        assert!(matches!(err, Err(Error::NoRationalCandidate { .. })));
    }

    proptest! {
        #[test]
        fn reconstruct_is_exact_on_fractions(p in -400i64..400, q in 1i64..60) {
            let g = gcd(p.unsigned_abs(), q.unsigned_abs()) as i64;
            let (pr, qr) = (p / g, q / g);
            let guess = rational_reconstruct(p as f64 / q as f64, 60, 1e-9).unwrap();
            prop_assert_eq!((guess.num, guess.den), (pr, qr));
        }
    }

    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 { a.max(1) } else { gcd(b, a % b) }
    }

    #[test]
    fn pslq_golden_ratio() {
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        let rel = pslq(&[1.0, phi, phi * phi], 1e-10, 200).unwrap();
        // phi^2 = phi + 1, up to overall sign
        let v = rel.vector.clone();
        assert!(
            v == vec![1, 1, -1] || v == vec![-1, -1, 1],
            "unexpected relation {v:?}"
        );
        assert!(rel.residual < 1e-10);
    }

    #[test]
    fn pslq_scale_invariance() {
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        let base = pslq(&[1.0, phi, phi * phi], 1e-10, 200).unwrap().vector;
        for c in [2.0, 10.0] {
            let scaled: Vec<f64> = [1.0, phi, phi * phi].iter().map(|v| c * v).collect();
            let rel = pslq(&scaled, 1e-10, 200).unwrap();
            assert_eq!(rel.vector, base, "scale {c}");
        }
    }

    #[test]
    fn pslq_residual_is_recomputed() {
        let x = [2.0f64, 3.0, 7.0];
        let rel = pslq(&x, 1e-12, 200).unwrap();
        let dot: f64 = rel
            .vector
            .iter()
            .zip(x.iter())
            .map(|(&v, &xi)| v as f64 * xi)
            .sum();
        assert_eq!(rel.residual, dot.abs());
    }

    #[test]
    fn pslq_pi_e_fails_with_bound() {
        let r = pslq(&[std::f64::consts::PI, std::f64::consts::E], 1e-10, 20_000);
        match r {
            Err(Error::PrecisionExhausted { bound, .. }) => {
                assert!(bound > 1.0, "norm bound should have grown, got {bound}")
            }
            other => panic!("expected clean failure, got {other:?}"),
        }
    }

    #[test]
    fn pslq_rejects_bad_dimensions() {
        assert!(pslq(&[1.0], 1e-10, 10).is_err());
        assert!(pslq(&[1.0; 9], 1e-10, 10).is_err());
    }
}
