use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::{is_finite_c, plog, Scalar, C};

/// Value and holomorphic gradient `(df/dz_1, ..., df/dz_n)` at a point:
/// a vectorized dual number over the complex field.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet<T> {
    pub value: Complex<T>,
    pub grad: Vec<Complex<T>>,
}

impl<T: Scalar> Jet<T> {
    pub fn constant(value: C<T>, dim: usize) -> Self {
        Self { value, grad: vec![C::zero(); dim] }
    }

    pub fn variable(value: C<T>, index: usize, dim: usize) -> Self {
        let mut grad = vec![C::zero(); dim];
        grad[index] = C::one();
        Self { value, grad }
    }

    pub(crate) fn add(self, o: Self) -> Self {
        Self { value: self.value + o.value, grad: zip(self.grad, &o.grad, |a, b| a + b) }
    }

    pub(crate) fn sub(self, o: Self) -> Self {
        Self { value: self.value - o.value, grad: zip(self.grad, &o.grad, |a, b| a - b) }
    }

    pub(crate) fn mul(self, o: Self) -> Self {
        let (a, b) = (self.value, o.value);
        Self { value: a * b, grad: zip(self.grad, &o.grad, |da, db| da * b + a * db) }
    }

    /// Caller guarantees `o.value != 0`.
    pub(crate) fn div(self, o: Self) -> Self {
        let (a, b) = (self.value, o.value);
        let b2 = b * b;
        Self { value: a / b, grad: zip(self.grad, &o.grad, |da, db| (da * b - a * db) / b2) }
    }

    pub(crate) fn neg(self) -> Self {
        Self { value: -self.value, grad: self.grad.into_iter().map(|g| -g).collect() }
    }

    /// Caller guarantees `value != 0` when `n < 0`.
    pub(crate) fn powi(self, n: i32) -> Self {
        if n == 0 {
            let dim = self.grad.len();
            return Self::constant(C::one(), dim);
        }
        let lower = self.value.powi(n - 1);
        let scale = lower * T::lit(n as f64);
        Self { value: lower * self.value, grad: self.grad.into_iter().map(|g| g * scale).collect() }
    }

    pub(crate) fn exp(self) -> Self {
        let v = self.value.exp();
        Self { value: v, grad: self.grad.into_iter().map(|g| g * v).collect() }
    }

    /// Caller guarantees `value != 0`.
    pub(crate) fn plog(self) -> Self {
        let a = self.value;
        Self { value: plog(a), grad: self.grad.into_iter().map(|g| g / a).collect() }
    }

    pub fn is_finite(&self) -> bool {
        is_finite_c(self.value) && self.grad.iter().all(|g| is_finite_c(*g))
    }
}

#[inline]
fn zip<T: Scalar>(mut a: Vec<C<T>>, b: &[C<T>], f: impl Fn(C<T>, C<T>) -> C<T>) -> Vec<C<T>> {
    for (x, y) in a.iter_mut().zip(b) {
        *x = f(*x, *y);
    }
    a
}
