//! Absolute value `|A| = R |Lambda| R^-1` of small matrices with a real,
//! complete eigensystem.
//!
//! Two routes are provided. [`abs_matrix_spectral`] uses known eigenvalues
//! and evaluates the polynomial interpolating `|lambda|` on the distinct
//! spectrum at `A`; this is exact for diagonalisable matrices and needs no
//! eigenvectors. [`abs_matrix_numeric`] computes the eigenvalues by the
//! shifted QR algorithm and the eigenvectors as null spaces of
//! `A - lambda I`.

use crate::linalg::{SmallMatrix, MAX_VARS};
use crate::real::Real;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum EigenError {
    #[error("QR iteration did not converge")]
    NoConvergence,
    #[error("complex eigenvalue with imaginary part {0:e}")]
    Complex(f64),
    #[error("defective eigensystem")]
    Defective,
}

type Mat = [[f64; MAX_VARS]; MAX_VARS];

fn to_f64<T: Real>(a: &SmallMatrix<T>) -> Mat {
    let mut m = [[0.0; MAX_VARS]; MAX_VARS];
    for (i, row) in m.iter_mut().enumerate().take(a.size()) {
        for (j, x) in row.iter_mut().enumerate().take(a.size()) {
            *x = a[(i, j)].to_f64_lossy();
        }
    }
    m
}

fn balance(a: &mut Mat, n: usize) {
    const RADIX: f64 = 2.0;
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 0..n {
                        a[i][j] *= g;
                    }
                    for row in a.iter_mut().take(n) {
                        row[i] *= f;
                    }
                }
            }
        }
    }
}

/// Reduction to upper Hessenberg form by stabilised elimination.
fn hessenberg(a: &mut Mat, n: usize) {
    for m in 1..n.saturating_sub(1) {
        let mut x = 0.0f64;
        let mut piv = m;
        for j in m..n {
            if a[j][m - 1].abs() > x.abs() {
                x = a[j][m - 1];
                piv = j;
            }
        }
        if piv != m {
            for j in m - 1..n {
                let t = a[piv][j];
                a[piv][j] = a[m][j];
                a[m][j] = t;
            }
            for row in a.iter_mut().take(n) {
                row.swap(piv, m);
            }
        }
        if x != 0.0 {
            for i in m + 1..n {
                let mut y = a[i][m - 1];
                if y != 0.0 {
                    y /= x;
                    a[i][m - 1] = y;
                    for j in m..n {
                        a[i][j] -= y * a[m][j];
                    }
                    for row in a.iter_mut().take(n) {
                        row[m] += y * row[i];
                    }
                }
            }
        }
    }
    for i in 2..n {
        for j in 0..i - 1 {
            a[i][j] = 0.0;
        }
    }
}

#[inline]
fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Eigenvalues of an upper Hessenberg matrix by Francis double-shift QR.
#[allow(clippy::many_single_char_names, unused_assignments)]
fn hqr(a: &mut Mat, n: usize) -> Result<Vec<(f64, f64)>, EigenError> {
    let mut wr = vec![0.0; n];
    let mut wi = vec![0.0; n];
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[i][j].abs();
        }
    }
    let mut nn = n as isize - 1;
    let mut t = 0.0;
    let (mut p, mut q, mut r) = (0.0, 0.0, 0.0);
    while nn >= 0 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            let mut l = nu;
            while l >= 1 {
                let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[l][l - 1].abs() + s == s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[nu][nu];
            if l == nu {
                wr[nu] = x + t;
                wi[nu] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = a[nu - 1][nu - 1];
            let mut w = a[nu][nu - 1] * a[nu - 1][nu];
            if l == nu - 1 {
                p = 0.5 * (y - x);
                q = p * p + w;
                let mut z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    z = p + sign(z, p);
                    wr[nu - 1] = x + z;
                    wr[nu] = x + z;
                    if z != 0.0 {
                        wr[nu] = x - w / z;
                    }
                    wi[nu - 1] = 0.0;
                    wi[nu] = 0.0;
                } else {
                    wr[nu - 1] = x + p;
                    wr[nu] = x + p;
                    wi[nu - 1] = -z;
                    wi[nu] = z;
                }
                nn -= 2;
                break;
            }
            if its == 60 {
                return Err(EigenError::NoConvergence);
            }
            if its % 10 == 0 && its > 0 {
                t += x;
                for i in 0..=nu {
                    a[i][i] -= x;
                }
                let s = a[nu][nu - 1].abs() + a[nu - 1][nu - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            let mut m = nu - 2;
            loop {
                let z = a[m][m];
                r = x - z;
                let s = y - z;
                p = (r * s - w) / a[m + 1][m] + a[m][m + 1];
                q = a[m + 1][m + 1] - z - r - s;
                r = a[m + 2][m + 1];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nu {
                a[i][i - 2] = 0.0;
                if i != m + 2 {
                    a[i][i - 3] = 0.0;
                }
            }
            let mut k = m;
            while k < nu {
                if k != m {
                    p = a[k][k - 1];
                    q = a[k + 1][k - 1];
                    r = 0.0;
                    if k != nu - 1 {
                        r = a[k + 2][k - 1];
                    }
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[k][k - 1] = -a[k][k - 1];
                        }
                    } else {
                        a[k][k - 1] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    let z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        p = a[k][j] + q * a[k + 1][j];
                        if k != nu - 1 {
                            p += r * a[k + 2][j];
                            a[k + 2][j] -= p * z;
                        }
                        a[k + 1][j] -= p * y;
                        a[k][j] -= p * x;
                    }
                    let mmin = if nu < k + 3 { nu } else { k + 3 };
                    for i in l..=mmin {
                        p = x * a[i][k] + y * a[i][k + 1];
                        if k != nu - 1 {
                            p += z * a[i][k + 2];
                            a[i][k + 2] -= p * r;
                        }
                        a[i][k + 1] -= p * q;
                        a[i][k] -= p;
                    }
                }
                k += 1;
            }
        }
    }
    Ok(wr.into_iter().zip(wi).collect())
}

/// Eigenvalues `(re, im)` of a general real matrix.
pub fn eigenvalues<T: Real>(a: &SmallMatrix<T>) -> Result<Vec<(f64, f64)>, EigenError> {
    let n = a.size();
    let mut m = to_f64(a);
    balance(&mut m, n);
    hessenberg(&mut m, n);
    hqr(&mut m, n)
}

/// Basis of the numerical null space of `a` assuming it has dimension `dim`.
fn null_space(mut a: Mat, n: usize, dim: usize) -> Vec<[f64; MAX_VARS]> {
    let rank = n - dim;
    let mut colperm: Vec<usize> = (0..n).collect();
    for k in 0..rank {
        let (mut bi, mut bj, mut best) = (k, k, -1.0);
        for i in k..n {
            for j in k..n {
                if a[i][j].abs() > best {
                    best = a[i][j].abs();
                    bi = i;
                    bj = j;
                }
            }
        }
        a.swap(k, bi);
        for row in a.iter_mut().take(n) {
            row.swap(k, bj);
        }
        colperm.swap(k, bj);
        let piv = a[k][k];
        if piv == 0.0 {
            continue;
        }
        for i in k + 1..n {
            let f = a[i][k] / piv;
            if f != 0.0 {
                for j in k..n {
                    a[i][j] -= f * a[k][j];
                }
            }
        }
    }
    let mut basis = Vec::with_capacity(dim);
    for free in rank..n {
        let mut y = [0.0; MAX_VARS];
        y[free] = 1.0;
        for k in (0..rank).rev() {
            let mut s = 0.0;
            for j in k + 1..n {
                s += a[k][j] * y[j];
            }
            y[k] = if a[k][k] != 0.0 { -s / a[k][k] } else { 0.0 };
        }
        let mut x = [0.0; MAX_VARS];
        for (j, &c) in colperm.iter().enumerate() {
            x[c] = y[j];
        }
        let norm = x[..n].iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in x[..n].iter_mut() {
            *v /= norm;
        }
        basis.push(x);
    }
    basis
}

/// `|A|` from a numerically computed eigendecomposition.
pub fn abs_matrix_numeric<T: Real>(a: &SmallMatrix<T>) -> Result<SmallMatrix<T>, EigenError> {
    let n = a.size();
    let scale = a.max_abs().to_f64_lossy().max(1e-300);
    let mut ev = eigenvalues(a)?;
    for &(_, im) in &ev {
        if im.abs() > 1e-7 * scale {
            return Err(EigenError::Complex(im));
        }
    }
    ev.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(std::cmp::Ordering::Equal));
    let tol = 1e-6 * scale;
    let mut clusters: Vec<(f64, usize)> = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && ev[j].0 - ev[j - 1].0 <= tol {
            j += 1;
        }
        let mean = ev[i..j].iter().map(|e| e.0).sum::<f64>() / (j - i) as f64;
        clusters.push((mean, j - i));
        i = j;
    }
    let af = to_f64(a);
    let mut r = SmallMatrix::<f64>::zeros(n);
    let mut abs_lam = [0.0; MAX_VARS];
    let mut col = 0;
    for &(lam, mult) in &clusters {
        let mut shifted = af;
        for (k, row) in shifted.iter_mut().enumerate().take(n) {
            row[k] -= lam;
        }
        for v in null_space(shifted, n, mult) {
            // residual check on the eigenvector
            let res = (0..n)
                .map(|ii| {
                    let s: f64 = (0..n).map(|jj| af[ii][jj] * v[jj]).sum::<f64>() - lam * v[ii];
                    s.abs()
                })
                .fold(0.0, f64::max);
            if res > 1e-5 * scale.max(1.0) {
                return Err(EigenError::Defective);
            }
            for k in 0..n {
                r[(k, col)] = v[k];
            }
            abs_lam[col] = lam.abs();
            col += 1;
        }
    }
    let rinv = r.inverse().ok_or(EigenError::Defective)?;
    let mut out = SmallMatrix::<T>::zeros(n);
    for ii in 0..n {
        for jj in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                s += r[(ii, k)] * abs_lam[k] * rinv[(k, jj)];
            }
            out[(ii, jj)] = T::lit(s);
        }
    }
    Ok(out)
}

/// `|A|` as the polynomial interpolating `|lambda|` on the distinct
/// eigenvalues, evaluated at `A` in Newton form. Eigenvalues closer than a
/// relative tolerance are merged.
pub fn abs_matrix_spectral<T: Real>(a: &SmallMatrix<T>, lambdas: &[T]) -> SmallMatrix<T> {
    let n = a.size();
    let mut lam = [T::zero(); MAX_VARS];
    lam[..lambdas.len()].copy_from_slice(lambdas);
    let lam = &mut lam[..lambdas.len()];
    lam.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    let scale = lam.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    let tol = T::tolerance(1e-8) * (T::one() + scale);
    let mut nodes = [T::zero(); MAX_VARS];
    let mut m = 0;
    let mut i = 0;
    while i < lam.len() {
        let mut j = i + 1;
        let mut sum = lam[i];
        while j < lam.len() && lam[j] - lam[j - 1] <= tol {
            sum += lam[j];
            j += 1;
        }
        nodes[m] = sum / T::from_usize_lossy(j - i);
        m += 1;
        i = j;
    }
    // divided differences of |x|
    let mut c = [T::zero(); MAX_VARS];
    for k in 0..m {
        c[k] = nodes[k].abs();
    }
    for level in 1..m {
        for k in (level..m).rev() {
            c[k] = (c[k] - c[k - 1]) / (nodes[k] - nodes[k - level]);
        }
    }
    let mut p = SmallMatrix::identity(n).scaled(c[m - 1]);
    for k in (0..m - 1).rev() {
        let mut next = a.matmul(&p);
        next.add_scaled(-nodes[k], &p);
        for d in 0..n {
            next[(d, d)] += c[k];
        }
        p = next;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(n: usize, v: &[f64]) -> SmallMatrix<f64> {
        SmallMatrix::from_fn(n, |i, j| v[i * n + j])
    }

    #[test]
    fn eigenvalues_of_triangular_and_rotation() {
        let a = mat(3, &[2.0, 1.0, 0.0, 0.0, -1.0, 3.0, 0.0, 0.0, 5.0]);
        let mut ev: Vec<f64> = eigenvalues(&a).unwrap().into_iter().map(|e| e.0).collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(ev.len(), 3);
        for (x, y) in ev.iter().zip([-1.0, 2.0, 5.0]) {
            assert!((x - y).abs() < 1e-12);
        }
        let r = mat(2, &[0.0, -1.0, 1.0, 0.0]);
        let ev = eigenvalues(&r).unwrap();
        assert!((ev[0].1.abs() - 1.0).abs() < 1e-12);
        assert!(matches!(abs_matrix_numeric(&r), Err(EigenError::Complex(_))));
    }

    #[test]
    fn repeated_eigenvalues_are_handled() {
        // similarity transform of diag(1, 1, 1, -2, 3)
        let d = [1.0, 1.0, 1.0, -2.0, 3.0];
        let s = SmallMatrix::<f64>::from_fn(5, |i, j| if i == j { 2.0 } else { 0.3 * (i as f64 - j as f64 + 0.5).sin() });
        let sinv = s.inverse().unwrap();
        let dm = SmallMatrix::from_fn(5, |i, j| if i == j { d[i] } else { 0.0 });
        let a = s.matmul(&dm).matmul(&sinv);
        let dabs = SmallMatrix::from_fn(5, |i, j| if i == j { d[i].abs() } else { 0.0 });
        let expect = s.matmul(&dabs).matmul(&sinv);
        let num = abs_matrix_numeric(&a).unwrap();
        let spec = abs_matrix_spectral(&a, &d);
        for i in 0..5 {
            for j in 0..5 {
                assert!((num[(i, j)] - expect[(i, j)]).abs() < 1e-8, "numeric");
                assert!((spec[(i, j)] - expect[(i, j)]).abs() < 1e-10, "spectral");
            }
        }
    }

    #[test]
    fn defective_matrix_is_rejected() {
        let a = mat(2, &[1.0, 1.0, 0.0, 1.0]);
        assert_eq!(abs_matrix_numeric(&a).unwrap_err(), EigenError::Defective);
    }

    #[test]
    fn positive_spectrum_returns_matrix_itself() {
        let a = mat(2, &[3.0, 1.0, 0.5, 2.0]);
        let ev: Vec<f64> = eigenvalues(&a).unwrap().into_iter().map(|e| e.0).collect();
        let p = abs_matrix_spectral(&a, &ev);
        for i in 0..2 {
            for j in 0..2 {
                assert!((p[(i, j)] - a[(i, j)]).abs() < 1e-12);
            }
        }
    }
}
