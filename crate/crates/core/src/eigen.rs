//! Dense real-symmetric matrices and their lowest eigenpair.
//!
//! Householder reduction to tridiagonal form, bisection on the Sturm count for
//! the smallest eigenvalue, inverse iteration on the tridiagonal matrix for
//! its eigenvector, then back-transformation through the stored reflectors.
//! Only the lowest pair is ever needed, so nothing beyond `O(n^2)` is spent
//! after the reduction.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Square matrix stored densely in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// Builds from row-major data; `data.len()` must be `n * n`.
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        Ok(Self { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    /// Sets `(i, j)` and `(j, i)`.
    #[inline]
    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| dot(self.row(i), x)).collect()
    }

    /// `x^T A x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        dot(&self.mul_vec(x), x)
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Smallest eigenvalue and a unit-norm eigenvector of a symmetric matrix.
pub fn lowest_eigenpair(a: &SymMatrix) -> Result<(f64, Vec<f64>)> {
    let n = a.dim();
    if n == 0 {
        return Err(Error::Eigensolver("empty matrix".into()));
    }
    if a.data.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigensolver("matrix has non-finite entries".into()));
    }
    if n == 1 {
        return Ok((a.data[0], vec![1.0]));
    }
    let tri = Tridiagonal::reduce(a.clone());
    let lambda = tri.lowest_eigenvalue();
    let z = tri.inverse_iteration(lambda)?;
    let x = tri.back_transform(z);
    let rayleigh = a.quadratic_form(&x) / dot(&x, &x);
    Ok((if rayleigh.is_finite() { rayleigh } else { lambda }, x))
}

struct Tridiagonal {
    n: usize,
    diag: Vec<f64>,
    off: Vec<f64>,
    /// Reflectors `I - tau v v^T`, `v` acting on indices `k+1..n`.
    reflectors: Vec<(f64, Vec<f64>)>,
}

impl Tridiagonal {
    fn reduce(mut a: SymMatrix) -> Self {
        let n = a.n;
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n - 1];
        let mut reflectors = Vec::with_capacity(n.saturating_sub(2));
        let mut p = vec![0.0; n];
        for k in 0..n - 1 {
            let m = n - k - 1;
            let lo = k + 1;
            diag[k] = a.get(k, k);
            // Householder vector for row k, columns k+1..n.
            let row = &a.data[k * n + lo..(k + 1) * n];
            let alpha = row[0];
            let sigma: f64 = row[1..].iter().map(|x| x * x).sum();
            if m == 1 || sigma == 0.0 {
                off[k] = alpha;
                continue;
            }
            let norm = libm::sqrt(alpha * alpha + sigma);
            let beta = if alpha <= 0.0 { norm } else { -norm };
            let mut v: Vec<f64> = row.to_vec();
            v[0] = alpha - beta;
            let vnorm2 = v[0] * v[0] + sigma;
            let tau = 2.0 / vnorm2;
            off[k] = beta;

            // p = tau * A' v on the trailing block.
            let p = &mut p[..m];
            for (i, pi) in p.iter_mut().enumerate() {
                let r = (lo + i) * n + lo;
                *pi = tau * dot(&a.data[r..r + m], &v);
            }
            // w = p - (tau/2)(p.v) v
            let kappa = 0.5 * tau * dot(p, &v);
            for (pi, vi) in p.iter_mut().zip(&v) {
                *pi -= kappa * vi;
            }
            // A' -= v w^T + w v^T
            for i in 0..m {
                let (vi, wi) = (v[i], p[i]);
                let r = (lo + i) * n + lo;
                let row = &mut a.data[r..r + m];
                for ((x, vj), wj) in row.iter_mut().zip(&v).zip(p.iter()) {
                    *x -= vi * wj + wi * vj;
                }
            }
            reflectors.push((tau, v));
        }
        diag[n - 1] = a.get(n - 1, n - 1);
        Self {
            n,
            diag,
            off,
            reflectors,
        }
    }

    /// Number of eigenvalues strictly below `x`.
    fn sturm_count(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.n {
            let denom = if q == 0.0 { f64::EPSILON * (1.0 + x.abs()) } else { q };
            q = self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / denom;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn lowest_eigenvalue(&self) -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < self.n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        lo -= f64::EPSILON * scale;
        hi += f64::EPSILON * scale;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * scale {
                break;
            }
            if self.sturm_count(mid) >= 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Inverse iteration with partial pivoting (LU of `T - lambda I`).
    fn inverse_iteration(&self, lambda: f64) -> Result<Vec<f64>> {
        let n = self.n;
        let scale = self
            .diag
            .iter()
            .chain(&self.off)
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(f64::MIN_POSITIVE);
        let tiny = f64::EPSILON * scale;

        // LU factors: U has up to two superdiagonals after pivoting.
        let mut u0 = vec![0.0; n];
        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        let mut mult = vec![0.0; n];
        let mut swapped = vec![false; n];
        let mut d = self.diag[0] - lambda;
        let mut e = if n > 1 { self.off[0] } else { 0.0 };
        for i in 0..n - 1 {
            let sub = self.off[i];
            let next_d = self.diag[i + 1] - lambda;
            let next_e = if i + 2 < n { self.off[i + 1] } else { 0.0 };
            if d.abs() >= sub.abs() {
                let piv = if d == 0.0 { tiny } else { d };
                let l = sub / piv;
                mult[i] = l;
                u0[i] = piv;
                u1[i] = e;
                u2[i] = 0.0;
                d = next_d - l * e;
                e = next_e;
            } else {
                let l = d / sub;
                mult[i] = l;
                swapped[i] = true;
                u0[i] = sub;
                u1[i] = next_d;
                u2[i] = next_e;
                d = e - l * next_d;
                e = -l * next_e;
            }
        }
        u0[n - 1] = if d == 0.0 { tiny } else { d };

        let mut x: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * libm::sin(1.0 + i as f64))
            .collect();
        for _ in 0..4 {
            // Apply the row operations to the right-hand side, then solve U.
            for i in 0..n - 1 {
                if swapped[i] {
                    x.swap(i, i + 1);
                }
                x[i + 1] -= mult[i] * x[i];
            }
            for i in (0..n).rev() {
                let mut s = x[i];
                if i + 1 < n {
                    s -= u1[i] * x[i + 1];
                }
                if i + 2 < n {
                    s -= u2[i] * x[i + 2];
                }
                let piv = if u0[i].abs() < tiny { tiny.copysign(u0[i]) } else { u0[i] };
                x[i] = s / piv;
            }
            let norm = libm::sqrt(dot(&x, &x));
            if !norm.is_finite() || norm == 0.0 {
                return Err(Error::Eigensolver(format!(
                    "inverse iteration broke down at lambda = {lambda}"
                )));
            }
            for v in &mut x {
                *v /= norm;
            }
        }
        Ok(x)
    }

    fn back_transform(&self, mut z: Vec<f64>) -> Vec<f64> {
        // Skipped steps leave no entry; each reflector's length fixes its offset.
        for (tau, v) in self.reflectors.iter().rev() {
            let lo = self.n - v.len();
            let tail = &mut z[lo..];
            let s = tau * dot(v, tail);
            for (t, vi) in tail.iter_mut().zip(v) {
                *t -= s * vi;
            }
        }
        z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(a: &SymMatrix, lambda: f64, x: &[f64]) -> f64 {
        let ax = a.mul_vec(x);
        libm::sqrt(ax.iter().zip(x).map(|(p, q)| (p - lambda * q).powi(2)).sum())
    }

    #[test]
    fn diagonal_matrix() {
        let mut a = SymMatrix::zeros(5);
        for (i, v) in [3.0, -1.0, 4.0, 1.5, 9.0].iter().enumerate() {
            a.set(i, i, *v);
        }
        let (l, x) = lowest_eigenpair(&a).unwrap();
        assert!((l + 1.0).abs() < 4.0 * f64::EPSILON);
        assert!((x[1].abs() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn second_difference_matrix() {
        // eigenvalues 2 - 2 cos(k pi / (n+1))
        let n = 40;
        let mut a = SymMatrix::zeros(n);
        for i in 0..n {
            a.set(i, i, 2.0);
            if i + 1 < n {
                a.set_sym(i, i + 1, -1.0);
            }
        }
        let (l, x) = lowest_eigenpair(&a).unwrap();
        let exact = 2.0 - 2.0 * libm::cos(core::f64::consts::PI / (n as f64 + 1.0));
        assert!((l - exact).abs() < 1e-14);
        assert!(residual(&a, l, &x) < 1e-12);
    }

    #[test]
    fn dense_matrix_residual() {
        let n = 30;
        let mut a = SymMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let v = libm::sin((i * 7 + j * 3) as f64) + if i == j { i as f64 * 0.1 } else { 0.0 };
                a.set_sym(i, j, v);
            }
        }
        let (l, x) = lowest_eigenpair(&a).unwrap();
        assert!(residual(&a, l, &x) < 1e-11);
        assert!((dot(&x, &x) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn non_finite_is_an_error() {
        let mut a = SymMatrix::zeros(3);
        a.set(1, 1, f64::NAN);
        assert!(lowest_eigenpair(&a).is_err());
    }
}
