//! Scalar root bracketing and a damped Newton solver for small systems.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Brent's method on a sign-changing bracket.
pub fn brent<T: Real, F: FnMut(T) -> T>(mut f: F, lo: T, hi: T, tol: T, max_iter: usize) -> Result<T> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if (fa > T::zero()) == (fb > T::zero()) {
        return Err(Error::NoBracket("brent"));
    }
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if (fb > T::zero()) == (fc > T::zero()) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = two * T::epsilon() * b.abs() + half * tol;
        let xm = half * (c - b);
        if xm.abs() <= tol1 || fb == T::zero() {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * xm * s;
                q = T::one() - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (two * xm * qa * (qa - r) - (b - a) * (r - T::one()));
                q = (qa - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            }
            p = p.abs();
            let min1 = T::lit(3.0) * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if two * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b = if d.abs() > tol1 {
            b + d
        } else if xm > T::zero() {
            b + tol1
        } else {
            b - tol1
        };
        fb = f(b);
    }
    Err(Error::NoConvergence {
        what: "brent",
        iterations: max_iter,
        residual: fb.to_f64_lossy(),
    })
}

/// Bisection to the given absolute width. Returns the midpoint of the final bracket.
pub fn bisect<T: Real, F: FnMut(T) -> T>(mut f: F, lo: T, hi: T, width: T) -> Result<T> {
    let (mut a, mut b) = (lo, hi);
    let fa = f(a);
    let fb = f(b);
    if (fa > T::zero()) == (fb > T::zero()) {
        return Err(Error::NoBracket("bisect"));
    }
    let a_positive = fa > T::zero();
    for _ in 0..200 {
        if (b - a).abs() <= width {
            break;
        }
        let mid = (a + b) * T::lit(0.5);
        if (f(mid) > T::zero()) == a_positive {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok((a + b) * T::lit(0.5))
}

/// Solves `A x = b` in place by Gaussian elimination with partial pivoting.
/// `a` is row-major `n x n`.
pub fn solve_dense<T: Real>(a: &mut [T], b: &mut [T]) -> Result<()> {
    let n = b.len();
    debug_assert_eq!(a.len(), n * n);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().partial_cmp(&a[j * n + col].abs()).unwrap())
            .unwrap();
        if a[pivot * n + col] == T::zero() || !a[pivot * n + col].is_finite() {
            return Err(Error::Singular);
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            b.swap(col, pivot);
        }
        let diag = a[col * n + col];
        for row in col + 1..n {
            let factor = a[row * n + col] / diag;
            if factor == T::zero() {
                continue;
            }
            for k in col..n {
                a[row * n + k] = a[row * n + k] - factor * a[col * n + k];
            }
            b[row] = b[row] - factor * b[col];
        }
    }
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc = acc - a[row * n + k] * b[k];
        }
        b[row] = acc / a[row * n + row];
    }
    Ok(())
}

/// Determinant by elimination (row-major `n x n`).
pub fn determinant<T: Real>(mut a: Vec<T>, n: usize) -> T {
    let mut det = T::one();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().partial_cmp(&a[j * n + col].abs()).unwrap())
            .unwrap();
        if a[pivot * n + col] == T::zero() {
            return T::zero();
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            det = -det;
        }
        let diag = a[col * n + col];
        det = det * diag;
        for row in col + 1..n {
            let factor = a[row * n + col] / diag;
            for k in col..n {
                a[row * n + k] = a[row * n + k] - factor * a[col * n + k];
            }
        }
    }
    det
}

/// Settings for [`newton`].
#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Central-difference step for the Jacobian.
    pub fd_step: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 100,
            fd_step: 1e-7,
        }
    }
}

/// Outcome of a converged Newton solve.
#[derive(Debug, Clone)]
pub struct NewtonReport {
    pub x: Vec<f64>,
    pub residual: Vec<f64>,
    pub iterations: usize,
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Central-difference Jacobian, row-major `residuals x unknowns`.
pub fn jacobian<F>(f: &mut F, x: &[f64], h: f64) -> Option<Vec<f64>>
where
    F: FnMut(&[f64]) -> Option<Vec<f64>>,
{
    let n = x.len();
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut probe = x.to_vec();
    for j in 0..n {
        probe[j] = x[j] + h;
        let plus = f(&probe)?;
        probe[j] = x[j] - h;
        let minus = f(&probe)?;
        probe[j] = x[j];
        cols.push(plus.iter().zip(&minus).map(|(p, m)| (p - m) / (2.0 * h)).collect());
    }
    let rows = cols[0].len();
    let mut jac = vec![0.0; rows * n];
    for (j, col) in cols.iter().enumerate() {
        for i in 0..rows {
            jac[i * n + j] = col[i];
        }
    }
    Some(jac)
}

/// Damped Newton iteration for a square system.
///
/// `f` returns `None` outside its domain; such trial points are rejected by
/// halving the step, as are steps that do not reduce the residual norm.
pub fn newton<F>(mut f: F, x0: &[f64], opts: &NewtonOptions) -> Result<NewtonReport>
where
    F: FnMut(&[f64]) -> Option<Vec<f64>>,
{
    let mut x = x0.to_vec();
    let mut r = f(&x).ok_or_else(|| Error::Domain("Newton start point outside the domain".into()))?;
    for it in 0..opts.max_iter {
        if max_abs(&r) < opts.tol {
            return Ok(NewtonReport {
                x,
                residual: r,
                iterations: it,
            });
        }
        let mut jac = jacobian(&mut f, &x, opts.fd_step).ok_or(Error::Singular)?;
        let mut step: Vec<f64> = r.iter().map(|v| -v).collect();
        solve_dense(&mut jac, &mut step)?;
        let current = norm2(&r);
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<f64> = x.iter().zip(&step).map(|(xi, si)| xi + lambda * si).collect();
            if let Some(rt) = f(&trial) {
                if norm2(&rt) < current || (lambda < 1e-6 && norm2(&rt) <= current * (1.0 + 1e-12)) {
                    x = trial;
                    r = rt;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if max_abs(&r) < opts.tol.max(1e-10) {
        return Ok(NewtonReport {
            x,
            residual: r,
            iterations: opts.max_iter,
        });
    }
    Err(Error::NoConvergence {
        what: "newton",
        iterations: opts.max_iter,
        residual: max_abs(&r),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_finds_cubic_root() {
        let r = brent(|x: f64| x * x * x - 2.0, 0.0, 2.0, 1e-15, 100).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
        assert!(matches!(brent(|x: f64| x * x + 1.0, -1.0, 1.0, 1e-12, 50), Err(Error::NoBracket(_))));
    }

    #[test]
    fn bisect_reaches_width() {
        let r = bisect(|x: f64| x - 0.3, 0.0, 1.0, 1e-9).unwrap();
        assert!((r - 0.3).abs() < 1e-9);
    }

    #[test]
    fn dense_solve_and_determinant() {
        let a = vec![2.0, 1.0, 1.0, 1.0, 3.0, 2.0, 1.0, 0.0, 0.0];
        let mut m = a.clone();
        let mut b = vec![4.0, 5.0, 6.0];
        solve_dense(&mut m, &mut b).unwrap();
        for i in 0..3 {
            let lhs: f64 = (0..3).map(|j| a[i * 3 + j] * b[j]).sum();
            assert!((lhs - [4.0, 5.0, 6.0][i]).abs() < 1e-12);
        }
        assert!((determinant(a, 3) - (-1.0)).abs() < 1e-12);
    }

    #[test]
    fn newton_solves_intersecting_circles() {
        let f = |x: &[f64]| Some(vec![x[0] * x[0] + x[1] * x[1] - 4.0, x[0] - x[1]]);
        let rep = newton(f, &[1.0, 0.5], &NewtonOptions::default()).unwrap();
        assert!((rep.x[0] - 2f64.sqrt()).abs() < 1e-10);
        assert!((rep.x[1] - 2f64.sqrt()).abs() < 1e-10);
    }
}
