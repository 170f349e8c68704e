//! Jacobi elliptic functions and complete/incomplete elliptic integrals.
//!
//! Everything is driven by one arithmetic-geometric mean (AGM) sequence per
//! parameter `m`:
//!
//! ```text
//! a0 = 1, b0 = sqrt(1 - m), c0 = sqrt(m)
//! a(n+1) = (a + b)/2,  b(n+1) = sqrt(a b),  c(n+1) = (a - b)/2
//! K(m) = pi / (2 aN)
//! E(m) = K (1 - sum 2^(n-1) c(n)^2)
//! ```
//!
//! The amplitude `am(u)` follows from the descending recursion
//! `phi(n-1) = (phi(n) + asin(c(n) sin phi(n) / a(n))) / 2` started at
//! `phi(N) = 2^N aN u`, and the epsilon function
//! `Eps(u|m) = integral_0^u dn^2 = u E/K + sum c(n) sin phi(n)`.
//!
//! Parameters within `1e-12` of one switch to the hyperbolic limits
//! `sn = tanh`, `cn = dn = sech`, `Eps = tanh`.

use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_ITER: usize = 40;
const NEAR_ONE: f64 = 1e-12;

/// `sn(u|m)`, `cn(u|m)`, `dn(u|m)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiTriple<T> {
    pub sn: T,
    pub cn: T,
    pub dn: T,
}

/// Full evaluation at one point: the triple plus `Eps(u|m)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiEval<T> {
    pub sn: T,
    pub cn: T,
    pub dn: T,
    pub epsilon: T,
}

/// The AGM table for a fixed parameter. Build once and evaluate many points.
#[derive(Debug, Clone)]
pub struct Elliptic<T> {
    m: T,
    a: [T; MAX_ITER + 1],
    c: [T; MAX_ITER + 1],
    steps: usize,
    k: T,
    e: T,
    hyperbolic: bool,
}

impl<T: Real> Elliptic<T> {
    /// Prepares evaluation for `m` in `[0, 1]`.
    pub fn new(m: T) -> Result<Self> {
        if !(m >= T::zero() && m <= T::one()) {
            return Err(Error::Domain(format!("elliptic parameter m = {m} not in [0, 1]")));
        }
        let mut a = [T::zero(); MAX_ITER + 1];
        let mut c = [T::zero(); MAX_ITER + 1];
        if T::one() - m < T::lit(NEAR_ONE) {
            return Ok(Self {
                m,
                a,
                c,
                steps: 0,
                k: T::infinity(),
                e: T::one(),
                hyperbolic: true,
            });
        }
        let half = T::lit(0.5);
        let tol = T::iter_tol();
        a[0] = T::one();
        let mut b = (T::one() - m).sqrt();
        c[0] = m.sqrt();
        let mut steps = 0;
        let mut weight = half; // 2^(n-1)
        let mut sum = weight * c[0] * c[0];
        while c[steps].abs() > tol * a[steps] && steps < MAX_ITER {
            let an = a[steps];
            a[steps + 1] = (an + b) * half;
            c[steps + 1] = (an - b) * half;
            b = (an * b).sqrt();
            steps += 1;
            weight = weight + weight;
            sum = sum + weight * c[steps] * c[steps];
        }
        let k = T::FRAC_PI_2() / a[steps];
        Ok(Self {
            m,
            a,
            c,
            steps,
            k,
            e: k * (T::one() - sum),
            hyperbolic: false,
        })
    }

    pub fn m(&self) -> T {
        self.m
    }

    /// Complete integral of the first kind; infinite in the hyperbolic limit.
    pub fn k(&self) -> T {
        self.k
    }

    /// Complete integral of the second kind.
    pub fn e(&self) -> T {
        self.e
    }

    /// Evaluates the triple and the epsilon function at `u`.
    pub fn eval(&self, u: T) -> JacobiEval<T> {
        if self.hyperbolic {
            let sech = T::one() / u.cosh();
            let th = u.tanh();
            return JacobiEval {
                sn: th,
                cn: sech,
                dn: sech,
                epsilon: th,
            };
        }
        // Reduce to r in [-K, K]: sn, cn flip sign per half period, Eps gains 2E.
        let two_k = self.k + self.k;
        let shifts = (u / two_k).round();
        let r = u - shifts * two_k;
        let odd = shifts.to_i64().is_some_and(|n| n.rem_euclid(2) == 1);

        let n = self.steps;
        let mut phi = self.a[n] * r;
        for _ in 0..n {
            phi = phi + phi;
        }
        let mut zeta = T::zero();
        let half = T::lit(0.5);
        for i in (1..=n).rev() {
            let s = phi.sin();
            zeta = zeta + self.c[i] * s;
            let ratio = (self.c[i] * s / self.a[i]).max(-T::one()).min(T::one());
            phi = (phi + ratio.asin()) * half;
        }
        let (mut sn, mut cn) = phi.sin_cos();
        let dn = (cn * cn + (T::one() - self.m) * sn * sn).sqrt();
        let mut epsilon = r * self.e / self.k + zeta;
        if shifts != T::zero() {
            epsilon = epsilon + shifts * (self.e + self.e);
        }
        if odd {
            sn = -sn;
            cn = -cn;
        }
        JacobiEval { sn, cn, dn, epsilon }
    }

    pub fn triple(&self, u: T) -> JacobiTriple<T> {
        let v = self.eval(u);
        JacobiTriple {
            sn: v.sn,
            cn: v.cn,
            dn: v.dn,
        }
    }
}

/// Complete elliptic integral of the first kind, `m` in `[0, 1)`.
pub fn complete_k<T: Real>(m: T) -> Result<T> {
    if !(m < T::one()) {
        return Err(Error::Domain(format!("K(m) requires m < 1, got {m}")));
    }
    let table = Elliptic::new(m)?;
    if table.hyperbolic {
        // Logarithmic asymptote: K ~ ln(4 / sqrt(1 - m)).
        return Ok((T::lit(4.0) / (T::one() - m).sqrt()).ln());
    }
    Ok(table.k)
}

/// Complete elliptic integral of the second kind, `m` in `[0, 1]`.
pub fn complete_e<T: Real>(m: T) -> Result<T> {
    Ok(Elliptic::new(m)?.e)
}

/// `sn`, `cn`, `dn` at `(u, m)`, `m` in `[0, 1]`.
pub fn jacobi<T: Real>(u: T, m: T) -> Result<JacobiTriple<T>> {
    Ok(Elliptic::new(m)?.triple(u))
}

/// `Eps(u|m) = integral_0^u dn(t|m)^2 dt`, `m` in `[0, 1)`.
pub fn jacobi_epsilon<T: Real>(u: T, m: T) -> Result<T> {
    if !(m < T::one()) {
        return Err(Error::Domain(format!("Eps(u|m) requires m < 1, got {m}")));
    }
    Ok(Elliptic::new(m)?.eval(u).epsilon)
}
