//! Small dense complex matrices: just enough linear algebra for metric forms
//! and the Hermitian pencils behind the Bergman constant.

use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Scalar, C};

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    n: usize,
    data: Vec<C<T>>,
}

impl<T: Scalar> CMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![C::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = C::one();
        }
        m
    }

    pub fn from_diag(diag: &[C<T>]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    /// Panics if the rows are ragged or not square.
    pub fn from_rows(rows: Vec<Vec<C<T>>>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n, "matrix must be square");
            data.extend(r);
        }
        Self { n, data }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[C<T>] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self { n: self.n, data: self.data.iter().map(|x| *x * s).collect() }
    }

    pub fn mul_vec(&self, x: &[C<T>]) -> Vec<C<T>> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).fold(C::zero(), |acc, (a, b)| acc + *a * *b))
            .collect()
    }

    /// `x* A x`, real part only (exact for Hermitian `A`).
    pub fn quad_form(&self, x: &[C<T>]) -> T {
        let ax = self.mul_vec(x);
        x.iter().zip(&ax).fold(T::zero(), |acc, (xi, yi)| acc + (xi.conj() * *yi).re)
    }

    /// Frobenius norm of `A - A*`.
    pub fn hermitian_defect(&self) -> T {
        let mut s = T::zero();
        for i in 0..self.n {
            for j in 0..self.n {
                s += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        s.sqrt()
    }

    pub fn frobenius(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, x| acc + x.norm_sqr()).sqrt()
    }

    /// Lower-triangular `L` with `A = L L*`. Fails unless `A` is Hermitian
    /// positive definite (to working precision).
    pub fn cholesky(&self) -> Result<Self> {
        let n = self.n;
        let mut l = Self::zeros(n);
        for j in 0..n {
            let mut d = self[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if !(d > T::zero()) || !d.is_finite() {
                return Err(Error::Numerical(format!(
                    "cholesky: non-positive pivot {d} at column {j}"
                )));
            }
            let d = d.sqrt();
            l[(j, j)] = Complex::new(d, T::zero());
            for i in j + 1..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / d;
            }
        }
        Ok(l)
    }

    /// Solves `L x = b` for lower-triangular `self`.
    pub fn solve_lower(&self, b: &[C<T>]) -> Vec<C<T>> {
        let n = self.n;
        let mut x = b.to_vec();
        for i in 0..n {
            let mut s = x[i];
            for k in 0..i {
                s -= self[(i, k)] * x[k];
            }
            x[i] = s / self[(i, i)];
        }
        x
    }

    /// Solves `L* x = b` for lower-triangular `self`.
    pub fn solve_lower_adjoint(&self, b: &[C<T>]) -> Vec<C<T>> {
        let n = self.n;
        let mut x = b.to_vec();
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in i + 1..n {
                s -= self[(k, i)].conj() * x[k];
            }
            x[i] = s / self[(i, i)].conj();
        }
        x
    }

    /// Solves `A x = b` for Hermitian positive definite `A`.
    pub fn hpd_solve(&self, b: &[C<T>]) -> Result<Vec<C<T>>> {
        let l = self.cholesky()?;
        Ok(l.solve_lower_adjoint(&l.solve_lower(b)))
    }

    /// Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.
    /// Eigenvalues ascending; column `k` of the returned matrix is the
    /// eigenvector for eigenvalue `k`.
    pub fn hermitian_eigen(&self) -> Result<(Vec<T>, Self)> {
        let n = self.n;
        let mut a = self.clone();
        let mut v = Self::identity(n);
        let eps = T::epsilon();
        let total = a.frobenius();
        if total == T::zero() {
            return Ok((vec![T::zero(); n], v));
        }
        let mut converged = false;
        for _sweep in 0..100 {
            let mut off = T::zero();
            for p in 0..n {
                for q in p + 1..n {
                    off += a[(p, q)].norm_sqr();
                }
            }
            if off.sqrt() <= eps * total {
                converged = true;
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    let mag = apq.norm();
                    if mag <= eps * eps * total {
                        continue;
                    }
                    // Phase-strip the pivot, then a real symmetric rotation.
                    let phase = apq / mag;
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    let theta = (aqq - app) / (T::lit(2.0) * mag);
                    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    let c = T::one() / (t * t + T::one()).sqrt();
                    let s = t * c;
                    let cc = Complex::new(c, T::zero());
                    let ss = Complex::new(s, T::zero());
                    let ph = phase.conj();
                    let u_pp = cc;
                    let u_pq = ss;
                    let u_qp = -ss * ph;
                    let u_qq = cc * ph;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = akp * u_pp + akq * u_qp;
                        a[(k, q)] = akp * u_pq + akq * u_qq;
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * u_pp + vkq * u_qp;
                        v[(k, q)] = vkp * u_pq + vkq * u_qq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
                        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
                    }
                    a[(p, q)] = C::zero();
                    a[(q, p)] = C::zero();
                }
            }
        }
        if !converged {
            return Err(Error::Numerical("hermitian Jacobi: no convergence in 100 sweeps".into()));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap_or(std::cmp::Ordering::Equal));
        let vals = order.iter().map(|&i| a[(i, i)].re).collect();
        let mut vs = Self::zeros(n);
        for (col, &i) in order.iter().enumerate() {
            for k in 0..n {
                vs[(k, col)] = v[(k, i)];
            }
        }
        Ok((vals, vs))
    }

    pub fn hermitian_eigenvalues(&self) -> Result<Vec<T>> {
        Ok(self.hermitian_eigen()?.0)
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.n + j]
    }
}

impl<T: Scalar> Mul for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn mul(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    m[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        m
    }
}

/// Largest eigenvalue (and eigenvector) of the Hermitian pencil `(A, B)`,
/// `A x = lambda B x`, with `B` positive definite. Direct method: Cholesky
/// reduction `B = L L*` followed by Jacobi on `L^-1 A L^-*`.
pub fn pencil_max_direct<T: Scalar>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<(T, Vec<C<T>>)> {
    let n = a.dim();
    let l = b.cholesky()?;
    // X = L^-1 A, column by column.
    let mut x = CMatrix::zeros(n);
    for j in 0..n {
        let col: Vec<C<T>> = (0..n).map(|i| a[(i, j)]).collect();
        let s = l.solve_lower(&col);
        for i in 0..n {
            x[(i, j)] = s[i];
        }
    }
    // C = L^-1 X*  (= L^-1 A L^-* since A is Hermitian).
    let xa = x.adjoint();
    let mut c = CMatrix::zeros(n);
    for j in 0..n {
        let col: Vec<C<T>> = (0..n).map(|i| xa[(i, j)]).collect();
        let s = l.solve_lower(&col);
        for i in 0..n {
            c[(i, j)] = s[i];
        }
    }
    let half = Complex::new(T::lit(0.5), T::zero());
    let c_sym = {
        let ca = c.adjoint();
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = (c[(i, j)] + ca[(i, j)]) * half;
            }
        }
        m
    };
    let (vals, vecs) = c_sym.hermitian_eigen()?;
    let top = vals[n - 1];
    let y: Vec<C<T>> = (0..n).map(|k| vecs[(k, n - 1)]).collect();
    Ok((top, l.solve_lower_adjoint(&y)))
}

/// Largest eigenvalue of the pencil `(A, B)` by power iteration on
/// `B^-1 A`, stopping once the Rayleigh quotient moves by less than
/// `tol` (relative).
pub fn pencil_max_power<T: Scalar>(
    a: &CMatrix<T>,
    b: &CMatrix<T>,
    tol: T,
    max_iter: usize,
) -> Result<T> {
    let n = a.dim();
    let l = b.cholesky()?;
    let mut x: Vec<C<T>> = (0..n)
        .map(|i| Complex::new(T::one(), T::lit(0.1 * (i as f64 + 1.0))))
        .collect();
    let mut prev = T::nan();
    for iter in 0..max_iter {
        let ax = a.mul_vec(&x);
        let num = x.iter().zip(&ax).fold(T::zero(), |s, (xi, yi)| s + (xi.conj() * *yi).re);
        let den = b.quad_form(&x);
        let rho = num / den;
        if iter > 0 && prev.is_finite() && (rho - prev).abs() <= tol * rho.abs().max(T::min_positive_value()) {
            return Ok(rho);
        }
        prev = rho;
        let y = l.solve_lower_adjoint(&l.solve_lower(&ax));
        let norm = y.iter().fold(T::zero(), |s, v| s + v.norm_sqr()).sqrt();
        if norm == T::zero() || !norm.is_finite() {
            return Ok(T::zero());
        }
        x = y.into_iter().map(|v| v / norm).collect();
    }
    Err(Error::Numerical(format!(
        "pencil power iteration: no convergence after {max_iter} iterations (last Rayleigh quotient {prev})"
    )))
}
