//! Small dense matrices sized for the largest supported system.

use crate::real::Real;
use std::ops::{Index, IndexMut};

/// Largest number of unknowns of any supported system.
pub const MAX_VARS: usize = 11;

/// Square matrix of runtime size `n <= MAX_VARS` stored inline.
#[derive(Clone, Copy, Debug)]
pub struct SmallMatrix<T> {
    n: usize,
    a: [[T; MAX_VARS]; MAX_VARS],
}

impl<T: Real> SmallMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        assert!(n <= MAX_VARS, "matrix size {n} exceeds {MAX_VARS}");
        Self {
            n,
            a: [[T::zero(); MAX_VARS]; MAX_VARS],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i][i] = T::one();
        }
        m
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.a[i][j] = f(i, j);
            }
        }
        m
    }

    #[inline(always)]
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn set_zero(&mut self) {
        for row in self.a.iter_mut().take(self.n) {
            for x in row.iter_mut().take(self.n) {
                *x = T::zero();
            }
        }
    }

    #[inline(always)]
    pub fn row(&self, i: usize) -> &[T] {
        &self.a[i][..self.n]
    }

    /// `out = self * x`
    #[inline]
    pub fn mul_vec(&self, x: &[T], out: &mut [T]) {
        let n = self.n;
        for i in 0..n {
            let row = &self.a[i];
            let mut s = T::zero();
            for j in 0..n {
                s += row[j] * x[j];
            }
            out[i] = s;
        }
    }

    /// `out += alpha * self * x`
    #[inline]
    pub fn mul_vec_add(&self, alpha: T, x: &[T], out: &mut [T]) {
        let n = self.n;
        for i in 0..n {
            let row = &self.a[i];
            let mut s = T::zero();
            for j in 0..n {
                s += row[j] * x[j];
            }
            out[i] += alpha * s;
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut c = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.a[i][k];
                if aik == T::zero() {
                    continue;
                }
                for j in 0..n {
                    c.a[i][j] += aik * other.a[k][j];
                }
            }
        }
        c
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.a[j][i])
    }

    pub fn scaled(&self, s: T) -> Self {
        Self::from_fn(self.n, |i, j| self.a[i][j] * s)
    }

    /// `self += s * other`
    pub fn add_scaled(&mut self, s: T, other: &Self) {
        for i in 0..self.n {
            for j in 0..self.n {
                self.a[i][j] += s * other.a[i][j];
            }
        }
    }

    pub fn max_abs(&self) -> T {
        let mut m = T::zero();
        for i in 0..self.n {
            for j in 0..self.n {
                m = m.max(self.a[i][j].abs());
            }
        }
        m
    }

    pub fn lu(&self) -> Option<Lu<T>> {
        Lu::factor(self)
    }

    pub fn inverse(&self) -> Option<Self> {
        self.lu().map(|lu| lu.inverse())
    }
}

impl<T> Index<(usize, usize)> for SmallMatrix<T> {
    type Output = T;
    #[inline(always)]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.a[i][j]
    }
}

impl<T> IndexMut<(usize, usize)> for SmallMatrix<T> {
    #[inline(always)]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.a[i][j]
    }
}

/// LU factorisation with partial pivoting.
#[derive(Clone, Copy, Debug)]
pub struct Lu<T> {
    lu: SmallMatrix<T>,
    perm: [usize; MAX_VARS],
}

/// Ratio of extreme pivots above which a matrix is reported singular.
const PIVOT_RATIO_LIMIT: f64 = 1e12;

impl<T: Real> Lu<T> {
    pub fn factor(m: &SmallMatrix<T>) -> Option<Self> {
        let n = m.n;
        let mut lu = *m;
        let mut perm = [0usize; MAX_VARS];
        for (i, p) in perm.iter_mut().enumerate().take(n) {
            *p = i;
        }
        let mut pmax = T::zero();
        let mut pmin = T::infinity();
        for k in 0..n {
            let mut piv = k;
            let mut best = lu.a[k][k].abs();
            for i in k + 1..n {
                let v = lu.a[i][k].abs();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if !(best > T::zero()) || !best.is_finite() {
                return None;
            }
            if piv != k {
                lu.a.swap(piv, k);
                perm.swap(piv, k);
            }
            pmax = pmax.max(best);
            pmin = pmin.min(best);
            let inv = T::one() / lu.a[k][k];
            for i in k + 1..n {
                let f = lu.a[i][k] * inv;
                lu.a[i][k] = f;
                if f != T::zero() {
                    for j in k + 1..n {
                        let u = lu.a[k][j];
                        lu.a[i][j] -= f * u;
                    }
                }
            }
        }
        if n > 0 && pmax > T::lit(PIVOT_RATIO_LIMIT) * pmin {
            return None;
        }
        Some(Self { lu, perm })
    }

    /// Solves `A x = b` in place.
    #[inline]
    pub fn solve_in_place(&self, b: &mut [T]) {
        let n = self.lu.n;
        let mut y = [T::zero(); MAX_VARS];
        for i in 0..n {
            let mut s = b[self.perm[i]];
            for j in 0..i {
                s -= self.lu.a[i][j] * y[j];
            }
            y[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in i + 1..n {
                s -= self.lu.a[i][j] * y[j];
            }
            y[i] = s / self.lu.a[i][i];
        }
        b[..n].copy_from_slice(&y[..n]);
    }

    pub fn inverse(&self) -> SmallMatrix<T> {
        let n = self.lu.n;
        let mut inv = SmallMatrix::zeros(n);
        let mut col = [T::zero(); MAX_VARS];
        for j in 0..n {
            col[..n].iter_mut().for_each(|c| *c = T::zero());
            col[j] = T::one();
            self.solve_in_place(&mut col[..n]);
            for i in 0..n {
                inv.a[i][j] = col[i];
            }
        }
        inv
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_matches_known_inverse() {
        let a = SmallMatrix::<f64>::from_fn(3, |i, j| [[4.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 2.0, 5.0]][i][j]);
        let lu = a.lu().unwrap();
        let mut b = [1.0, 2.0, 3.0];
        lu.solve_in_place(&mut b);
        let mut r = [0.0; 3];
        a.mul_vec(&b, &mut r);
        for (ri, bi) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((ri - bi).abs() < 1e-14);
        }
        let prod = a.matmul(&lu.inverse());
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((prod[(i, j)] - e).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = SmallMatrix::<f64>::from_fn(2, |i, _| if i == 0 { 1.0 } else { 2.0 });
        assert!(a.lu().is_none());
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        let a = SmallMatrix::<f64>::from_fn(2, |i, j| if i == j { 0.0 } else { 1.0 });
        let mut b = [3.0, 5.0];
        a.lu().unwrap().solve_in_place(&mut b);
        assert_eq!(b, [5.0, 3.0]);
    }
}
