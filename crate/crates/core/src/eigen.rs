//! Dense real matrices and their complex spectra.
//!
//! Eigenvalues come from balancing, reduction to upper Hessenberg form by
//! stabilized elimination, and the Francis double-shift QR iteration.
//! Eigenvectors come from complex inverse iteration on the original matrix.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_QR_ITER: usize = 60;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] = out.data[idx] + a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[T]) -> Vec<T> {
        (0..self.rows)
            .map(|i| (0..self.cols).fold(T::zero(), |acc, j| acc + self.get(i, j) * v[j]))
            .collect()
    }

    pub fn max_asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }
}

/// All eigenvalues of a square matrix, sorted by real part then imaginary part.
pub fn eigenvalues<T: Real>(a: &Matrix<T>) -> Result<Vec<Complex<T>>> {
    if a.rows != a.cols {
        return Err(Error::InvalidArgument("eigenvalues need a square matrix".into()));
    }
    if a.data.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("matrix has non-finite entries".into()));
    }
    let n = a.rows;
    let mut h = a.data.clone();
    balance(&mut h, n);
    hessenberg(&mut h, n);
    let mut out = hqr(&mut h, n)?;
    out.sort_by(|x, y| {
        x.re.partial_cmp(&y.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(x.im.partial_cmp(&y.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(out)
}

fn balance<T: Real>(a: &mut [T], n: usize) {
    let radix = T::lit(2.0);
    let sqrdx = radix * radix;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let (mut r, mut c) = (T::zero(), T::zero());
            for j in 0..n {
                if j != i {
                    c = c + a[j * n + i].abs();
                    r = r + a[i * n + j].abs();
                }
            }
            if c != T::zero() && r != T::zero() {
                let mut g = r / radix;
                let mut f = T::one();
                let s = c + r;
                while c < g {
                    f = f * radix;
                    c = c * sqrdx;
                }
                g = r * radix;
                while c > g {
                    f = f / radix;
                    c = c / sqrdx;
                }
                if (c + r) / f < T::lit(0.95) * s {
                    done = false;
                    let g = T::one() / f;
                    for j in 0..n {
                        a[i * n + j] = a[i * n + j] * g;
                    }
                    for j in 0..n {
                        a[j * n + i] = a[j * n + i] * f;
                    }
                }
            }
        }
    }
}

fn hessenberg<T: Real>(a: &mut [T], n: usize) {
    for m in 1..n.saturating_sub(1) {
        let mut x = T::zero();
        let mut pivot = m;
        for j in m..n {
            if a[j * n + m - 1].abs() > x.abs() {
                x = a[j * n + m - 1];
                pivot = j;
            }
        }
        if pivot != m {
            for j in (m - 1)..n {
                a.swap(pivot * n + j, m * n + j);
            }
            for j in 0..n {
                a.swap(j * n + pivot, j * n + m);
            }
        }
        if x != T::zero() {
            for i in (m + 1)..n {
                let mut y = a[i * n + m - 1];
                if y != T::zero() {
                    y = y / x;
                    a[i * n + m - 1] = y;
                    for j in m..n {
                        a[i * n + j] = a[i * n + j] - y * a[m * n + j];
                    }
                    for j in 0..n {
                        a[j * n + m] = a[j * n + m] + y * a[j * n + i];
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..i.saturating_sub(1) {
            a[i * n + j] = T::zero();
        }
    }
}

fn sign<T: Real>(a: T, b: T) -> T {
    if b >= T::zero() {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix (1-based indexing
/// internally to mirror the textbook recurrences).
fn hqr<T: Real>(h: &mut [T], n: usize) -> Result<Vec<Complex<T>>> {
    let idx = |i: isize, j: isize| ((i - 1) as usize) * n + (j - 1) as usize;
    let mut wr = vec![T::zero(); n + 1];
    let mut wi = vec![T::zero(); n + 1];
    let mut anorm = T::zero();
    for i in 1..=n as isize {
        for j in (i - 1).max(1)..=n as isize {
            anorm = anorm + h[idx(i, j)].abs();
        }
    }
    let mut nn = n as isize;
    let mut t = T::zero();
    let half = T::lit(0.5);
    while nn >= 1 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l >= 2 {
                let mut s = h[idx(l - 1, l - 1)].abs() + h[idx(l, l)].abs();
                if s == T::zero() {
                    s = anorm;
                }
                if h[idx(l, l - 1)].abs() + s == s {
                    h[idx(l, l - 1)] = T::zero();
                    break;
                }
                l -= 1;
            }
            let mut x = h[idx(nn, nn)];
            if l == nn {
                wr[nn as usize] = x + t;
                wi[nn as usize] = T::zero();
                nn -= 1;
            } else {
                let mut y = h[idx(nn - 1, nn - 1)];
                let mut w = h[idx(nn, nn - 1)] * h[idx(nn - 1, nn)];
                if l == nn - 1 {
                    let p = half * (y - x);
                    let q = p * p + w;
                    let mut z = q.abs().sqrt();
                    x = x + t;
                    let (a, b) = (nn as usize - 1, nn as usize);
                    if q >= T::zero() {
                        z = p + sign(z, p);
                        wr[a] = x + z;
                        wr[b] = x + z;
                        if z != T::zero() {
                            wr[b] = x - w / z;
                        }
                        wi[a] = T::zero();
                        wi[b] = T::zero();
                    } else {
                        wr[a] = x + p;
                        wr[b] = x + p;
                        wi[a] = -z;
                        wi[b] = z;
                    }
                    nn -= 2;
                } else {
                    if its == MAX_QR_ITER {
                        return Err(Error::NoConvergence {
                            what: "Hessenberg QR",
                            iterations: its,
                            residual: h[idx(nn, nn - 1)].to_f64_lossy(),
                        });
                    }
                    if its == 10 || its == 20 || its == 40 {
                        // Exceptional shift.
                        t = t + x;
                        for i in 1..=nn {
                            h[idx(i, i)] = h[idx(i, i)] - x;
                        }
                        let s = h[idx(nn, nn - 1)].abs() + h[idx(nn - 1, nn - 2)].abs();
                        x = T::lit(0.75) * s;
                        y = x;
                        w = T::lit(-0.4375) * s * s;
                    }
                    its += 1;
                    let (mut p, mut q, mut r, mut z);
                    let mut m = nn - 2;
                    loop {
                        z = h[idx(m, m)];
                        r = x - z;
                        let s0 = y - z;
                        p = (r * s0 - w) / h[idx(m + 1, m)] + h[idx(m, m + 1)];
                        q = h[idx(m + 1, m + 1)] - z - r - s0;
                        r = h[idx(m + 2, m + 1)];
                        let s = p.abs() + q.abs() + r.abs();
                        p = p / s;
                        q = q / s;
                        r = r / s;
                        if m == l {
                            break;
                        }
                        let u = h[idx(m, m - 1)].abs() * (q.abs() + r.abs());
                        let v = p.abs() * (h[idx(m - 1, m - 1)].abs() + z.abs() + h[idx(m + 1, m + 1)].abs());
                        if u + v == v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in (m + 2)..=nn {
                        h[idx(i, i - 2)] = T::zero();
                        if i != m + 2 {
                            h[idx(i, i - 3)] = T::zero();
                        }
                    }
                    let mut k = m;
                    while k <= nn - 1 {
                        if k != m {
                            p = h[idx(k, k - 1)];
                            q = h[idx(k + 1, k - 1)];
                            r = T::zero();
                            if k != nn - 1 {
                                r = h[idx(k + 2, k - 1)];
                            }
                            x = p.abs() + q.abs() + r.abs();
                            if x != T::zero() {
                                p = p / x;
                                q = q / x;
                                r = r / x;
                            }
                        }
                        let s = sign((p * p + q * q + r * r).sqrt(), p);
                        if s != T::zero() {
                            if k == m {
                                if l != m {
                                    h[idx(k, k - 1)] = -h[idx(k, k - 1)];
                                }
                            } else {
                                h[idx(k, k - 1)] = -s * x;
                            }
                            p = p + s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q = q / p;
                            r = r / p;
                            for j in k..=nn {
                                let mut pp = h[idx(k, j)] + q * h[idx(k + 1, j)];
                                if k != nn - 1 {
                                    pp = pp + r * h[idx(k + 2, j)];
                                    h[idx(k + 2, j)] = h[idx(k + 2, j)] - pp * z;
                                }
                                h[idx(k + 1, j)] = h[idx(k + 1, j)] - pp * y;
                                h[idx(k, j)] = h[idx(k, j)] - pp * x;
                            }
                            let mmin = if nn < k + 3 { nn } else { k + 3 };
                            for i in l..=mmin {
                                let mut pp = x * h[idx(i, k)] + y * h[idx(i, k + 1)];
                                if k != nn - 1 {
                                    pp = pp + z * h[idx(i, k + 2)];
                                    h[idx(i, k + 2)] = h[idx(i, k + 2)] - pp * r;
                                }
                                h[idx(i, k + 1)] = h[idx(i, k + 1)] - pp * q;
                                h[idx(i, k)] = h[idx(i, k)] - pp;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if l >= nn - 1 {
                break;
            }
        }
    }
    Ok((1..=n).map(|i| Complex::new(wr[i], wi[i])).collect())
}

/// Unit eigenvector for an eigenvalue estimate, by inverse iteration.
pub fn eigenvector<T: Real>(a: &Matrix<T>, lambda: Complex<T>) -> Result<Vec<Complex<T>>> {
    let n = a.rows;
    let scale = a.data.iter().fold(T::zero(), |m, v| m.max(v.abs())).max(T::one());
    // Shift slightly off the eigenvalue so the system stays solvable.
    let shift = lambda + Complex::new(scale * T::epsilon() * T::lit(64.0), T::zero());
    let mut x: Vec<Complex<T>> = (0..n)
        .map(|i| Complex::new(T::one() + T::lit(0.1) * T::from_count(i % 7), T::zero()))
        .collect();
    normalize(&mut x);
    for _ in 0..4 {
        let mut m: Vec<Complex<T>> = (0..n * n)
            .map(|k| {
                let (i, j) = (k / n, k % n);
                let d = if i == j { shift } else { Complex::new(T::zero(), T::zero()) };
                Complex::new(a.get(i, j), T::zero()) - d
            })
            .collect();
        complex_solve(&mut m, &mut x, n)?;
        normalize(&mut x);
    }
    Ok(x)
}

fn normalize<T: Real>(x: &mut [Complex<T>]) {
    let norm = x.iter().map(|c| c.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt();
    // Fix the phase so the largest component is real and positive.
    let big = x
        .iter()
        .copied()
        .max_by(|a, b| a.norm_sqr().partial_cmp(&b.norm_sqr()).unwrap_or(std::cmp::Ordering::Equal))
        .unwrap_or(Complex::new(T::one(), T::zero()));
    let phase = if big.norm() > T::zero() { big.conj() / big.norm() } else { Complex::new(T::one(), T::zero()) };
    for v in x.iter_mut() {
        *v = *v * phase / norm;
    }
}

fn complex_solve<T: Real>(a: &mut [Complex<T>], b: &mut [Complex<T>], n: usize) -> Result<()> {
    let tiny = T::min_positive_value().sqrt();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].norm().partial_cmp(&a[j * n + col].norm()).unwrap())
            .unwrap();
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            b.swap(col, pivot);
        }
        if a[col * n + col].norm() < tiny {
            a[col * n + col] = Complex::new(tiny, T::zero());
        }
        let diag = a[col * n + col];
        for row in col + 1..n {
            let f = a[row * n + col] / diag;
            for k in col..n {
                let v = a[col * n + k];
                a[row * n + k] = a[row * n + k] - f * v;
            }
            let bc = b[col];
            b[row] = b[row] - f * bc;
        }
    }
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc = acc - a[row * n + k] * b[k];
        }
        b[row] = acc / a[row * n + row];
    }
    if b.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Singular);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sorted(mut v: Vec<Complex<f64>>) -> Vec<Complex<f64>> {
        v.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap().then(x.im.partial_cmp(&y.im).unwrap()));
        v
    }

    fn reference(m: &Matrix<f64>) -> Vec<Complex<f64>> {
        let n = m.rows();
        let na = nalgebra::DMatrix::from_row_slice(n, n, m.as_slice());
        sorted(na.complex_eigenvalues().iter().copied().collect())
    }

    #[test]
    fn rotation_block_has_imaginary_pair() {
        let m = Matrix::from_fn(2, 2, |i, j| [[0.0, -2.0], [2.0, 0.0]][i][j]);
        let ev = eigenvalues(&m).unwrap();
        assert!((ev[0] - Complex::new(0.0, -2.0)).norm() < 1e-14);
        assert!((ev[1] - Complex::new(0.0, 2.0)).norm() < 1e-14);
    }

    #[test]
    fn diagonal_and_triangular() {
        let m = Matrix::from_fn(4, 4, |i, j| if j >= i { (i + j + 1) as f64 } else { 0.0 });
        let ev = eigenvalues(&m).unwrap();
        let want = [1.0, 3.0, 5.0, 7.0];
        for (e, w) in ev.iter().zip(want) {
            assert!((e.re - w).abs() < 1e-12 && e.im.abs() < 1e-12);
        }
    }

    #[test]
    fn eigenvector_satisfies_definition() {
        let m = Matrix::from_fn(5, 5, |i, j| ((i * 7 + j * 3) % 5) as f64 - 1.5 + if i == j { 3.0 } else { 0.0 });
        for lam in eigenvalues(&m).unwrap() {
            let v = eigenvector(&m, lam).unwrap();
            for i in 0..5 {
                let av: Complex<f64> = (0..5).map(|j| v[j] * m.get(i, j)).sum();
                assert!((av - lam * v[i]).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn single_precision() {
        let m = Matrix::<f32>::from_fn(3, 3, |i, j| [[2.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 4.0]][i][j]);
        let ev = eigenvalues(&m).unwrap();
        let sum: f32 = ev.iter().map(|c| c.re).sum();
        assert!((sum - 9.0).abs() < 1e-5);
    }

    proptest! {
        #[test]
        fn matches_reference_solver(entries in proptest::collection::vec(-5.0f64..5.0, 36)) {
            let m = Matrix::from_fn(6, 6, |i, j| entries[i * 6 + j]);
            let ours = eigenvalues(&m).unwrap();
            let theirs = reference(&m);
            // Compare as multisets by greedy matching.
            let mut used = vec![false; 6];
            for e in &ours {
                let (best, dist) = theirs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !used[*i])
                    .map(|(i, t)| (i, (t - e).norm()))
                    .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                    .unwrap();
                used[best] = true;
                prop_assert!(dist < 1e-8, "{e} unmatched, distance {dist}");
            }
        }

        #[test]
        fn trace_and_determinant_invariants(entries in proptest::collection::vec(-3.0f64..3.0, 16)) {
            let m = Matrix::from_fn(4, 4, |i, j| entries[i * 4 + j]);
            let ev = eigenvalues(&m).unwrap();
            let trace: f64 = (0..4).map(|i| m.get(i, i)).sum();
            let sum: Complex<f64> = ev.iter().sum();
            prop_assert!((sum.re - trace).abs() < 1e-9 && sum.im.abs() < 1e-9);
            let prod: Complex<f64> = ev.iter().product();
            let det = crate::roots::determinant(m.as_slice().to_vec(), 4);
            prop_assert!((prod.re - det).abs() < 1e-8 * (1.0 + det.abs()));
        }
    }
}
