//! Small dense linear algebra: LU solves and shifted inverse iteration.
//!
//! Desk-scale problems only (n up to a few thousand); everything is dense,
//! deterministic and generic over the scalar.

use crate::error::{Error, Result};
use crate::scalar::{fl, Scalar};

/// Dense row-major matrix.
#[derive(Debug, Clone)]
pub struct DMat<T> {
    pub n_rows: usize,
    pub n_cols: usize,
    pub data: Vec<T>,
}

impl<T: Scalar> DMat<T> {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            data: vec![T::zero(); n_rows * n_cols],
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> T {
        self.data[i * self.n_cols + j]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut T {
        &mut self.data[i * self.n_cols + j]
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        debug_assert_eq!(x.len(), self.n_cols);
        let mut y = vec![T::zero(); self.n_rows];
        for i in 0..self.n_rows {
            let row = &self.data[i * self.n_cols..(i + 1) * self.n_cols];
            let mut acc = T::zero();
            for (a, b) in row.iter().zip(x.iter()) {
                acc += *a * *b;
            }
            y[i] = acc;
        }
        y
    }

    /// Max |A_ij - A_ji| over the matrix (square only).
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.n_rows {
            for j in (i + 1)..self.n_cols {
                let d = (self.at(i, j) - self.at(j, i)).abs();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    pub fn norm1(&self) -> T {
        let mut worst = T::zero();
        for j in 0..self.n_cols {
            let mut col = T::zero();
            for i in 0..self.n_rows {
                col += self.at(i, j).abs();
            }
            if col > worst {
                worst = col;
            }
        }
        worst
    }
}

/// LU factorization with partial pivoting.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    lu: DMat<T>,
    piv: Vec<usize>,
}

pub fn lu_factor<T: Scalar>(mut a: DMat<T>) -> Result<Lu<T>> {
    let n = a.n_rows;
    assert_eq!(n, a.n_cols, "LU needs a square matrix");
    let mut piv = vec![0usize; n];
    for k in 0..n {
        let mut p = k;
        let mut best = a.at(k, k).abs();
        for i in (k + 1)..n {
            let v = a.at(i, k).abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == T::zero() || !best.is_finite() {
            return Err(Error::DegenerateMetric(format!(
                "singular pivot at column {k}"
            )));
        }
        piv[k] = p;
        if p != k {
            for j in 0..n {
                let tmp = a.at(k, j);
                *a.at_mut(k, j) = a.at(p, j);
                *a.at_mut(p, j) = tmp;
            }
        }
        let pivot = a.at(k, k);
        for i in (k + 1)..n {
            let m = a.at(i, k) / pivot;
            *a.at_mut(i, k) = m;
            if m != T::zero() {
                for j in (k + 1)..n {
                    let akj = a.at(k, j);
                    *a.at_mut(i, j) = a.at(i, j) - m * akj;
                }
            }
        }
    }
    Ok(Lu { lu: a, piv })
}

impl<T: Scalar> Lu<T> {
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.lu.n_rows;
        let mut x = b.to_vec();
        for k in 0..n {
            x.swap(k, self.piv[k]);
            let xk = x[k];
            if xk != T::zero() {
                for i in (k + 1)..n {
                    let m = self.lu.at(i, k);
                    x[i] = x[i] - m * xk;
                }
            }
        }
        for k in (0..n).rev() {
            let mut acc = x[k];
            for j in (k + 1)..n {
                acc = acc - self.lu.at(k, j) * x[j];
            }
            x[k] = acc / self.lu.at(k, k);
        }
        x
    }
}

/// 1-norm condition estimate by brute-force columns of the inverse.
pub fn cond1_estimate<T: Scalar>(a: &DMat<T>) -> Result<T> {
    let n = a.n_rows;
    let lu = lu_factor(a.clone())?;
    let mut inv_norm = T::zero();
    let mut e = vec![T::zero(); n];
    for j in 0..n {
        e[j] = T::one();
        let col = lu.solve(&e);
        e[j] = T::zero();
        let s: T = col.iter().map(|v| v.abs()).sum();
        if s > inv_norm {
            inv_norm = s;
        }
    }
    Ok(a.norm1() * inv_norm)
}

fn norm2<T: Scalar>(v: &[T]) -> T {
    v.iter().map(|x| *x * *x).sum::<T>().sqrt()
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

/// Householder reduction of a symmetric matrix to tridiagonal form,
/// eigenvalues only (no transform accumulation).
fn tridiagonalize<T: Scalar>(a: &DMat<T>) -> (Vec<T>, Vec<T>) {
    let n = a.n_rows;
    let mut m = a.clone();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    for i in (1..n).rev() {
        let l = i;
        let mut h = T::zero();
        if l > 1 {
            let mut scale = T::zero();
            for k in 0..l {
                scale += m.at(i, k).abs();
            }
            if scale == T::zero() {
                e[i] = m.at(i, l - 1);
            } else {
                for k in 0..l {
                    let v = m.at(i, k) / scale;
                    *m.at_mut(i, k) = v;
                    h += v * v;
                }
                let mut f = m.at(i, l - 1);
                let g = if f >= T::zero() { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h = h - f * g;
                *m.at_mut(i, l - 1) = f - g;
                f = T::zero();
                for j in 0..l {
                    let mut g = T::zero();
                    for k in 0..=j {
                        g += m.at(j, k) * m.at(i, k);
                    }
                    for k in (j + 1)..l {
                        g += m.at(k, j) * m.at(i, k);
                    }
                    e[j] = g / h;
                    f += e[j] * m.at(i, j);
                }
                let hh = f / (h + h);
                for j in 0..l {
                    let fj = m.at(i, j);
                    let gj = e[j] - hh * fj;
                    e[j] = gj;
                    for k in 0..=j {
                        let v = m.at(j, k) - fj * e[k] - gj * m.at(i, k);
                        *m.at_mut(j, k) = v;
                    }
                }
            }
        } else {
            e[i] = m.at(i, l - 1);
        }
        d[i] = h;
    }
    e[0] = T::zero();
    for i in 0..n {
        d[i] = m.at(i, i);
    }
    (d, e)
}

/// Eigenvalues of a symmetric tridiagonal matrix by the implicit QL
/// algorithm with Wilkinson shifts, sorted ascending.
fn tridiag_eigenvalues<T: Scalar>(mut d: Vec<T>, mut e: Vec<T>) -> Vec<T> {
    let n = d.len();
    if n == 0 {
        return d;
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = T::zero();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m_idx = l;
            while m_idx < n - 1 {
                let dd = d[m_idx].abs() + d[m_idx + 1].abs();
                if e[m_idx].abs() <= T::epsilon() * dd {
                    break;
                }
                m_idx += 1;
            }
            if m_idx == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (two_t::<T>() * e[l]);
            let mut r = (g * g + T::one()).sqrt();
            let sign_r = if g >= T::zero() { r } else { -r };
            g = d[m_idx] - d[l] + e[l] / (g + sign_r);
            let (mut s, mut c) = (T::one(), T::one());
            let mut p = T::zero();
            for i in (l..m_idx).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = (f * f + g * g).sqrt();
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m_idx] = T::zero();
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two_t::<T>() * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                f = g;
                let _ = f;
            }
            if r == T::zero() && m_idx > l {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m_idx] = T::zero();
        }
    }
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    d
}

/// All eigenvalues of a dense symmetric matrix (tridiagonalization + QL).
pub fn sym_eigenvalues<T: Scalar>(a: &DMat<T>) -> Vec<T> {
    let (d, e) = tridiagonalize(a);
    tridiag_eigenvalues(d, e)
}

/// Smallest eigenpair of a symmetric matrix by shifted inverse iteration.
///
/// The initial shift comes from the Gershgorin lower bound, so the iteration
/// is guaranteed to target the bottom of the spectrum; once roughly converged
/// the shift switches to the Rayleigh quotient. `orthogonal_to` vectors are
/// projected out each sweep (Euclidean inner product), which is how the
/// deflated "next eigenvalue" queries are served.
pub struct EigenOptions<T> {
    pub start: Vec<T>,
    pub tol: T,
    pub max_iter: usize,
}

pub struct EigenResult<T> {
    pub lambda: T,
    pub vector: Vec<T>,
    pub residual: T,
    pub iterations: usize,
}

pub fn smallest_eigenpair_sym<T: Scalar>(
    s: &DMat<T>,
    orthogonal_to: &[Vec<T>],
    opts: &EigenOptions<T>,
) -> Result<EigenResult<T>> {
    let n = s.n_rows;
    assert_eq!(n, s.n_cols);

    // Gershgorin bounds give the spectrum scale; the QL pass locates the
    // bottom of the spectrum so the inverse-iteration shift is contractive
    // (the bound alone can sit so far below clustered spectra that the
    // iteration stalls).
    let mut lower = T::infinity();
    let mut scale = T::zero();
    for i in 0..n {
        let mut off = T::zero();
        for j in 0..n {
            if i != j {
                off += s.at(i, j).abs();
            }
            scale = scale.max(s.at(i, j).abs());
        }
        lower = lower.min(s.at(i, i) - off);
    }
    if scale == T::zero() {
        scale = T::one();
    }
    let eigs = sym_eigenvalues(s);
    let lambda_min = eigs[0].max(lower);

    let project = |v: &mut Vec<T>| {
        for q in orthogonal_to {
            let c = dot(v, q) / dot(q, q);
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi = *vi - c * *qi;
            }
        }
    };

    let mut v = opts.start.clone();
    project(&mut v);
    let nv = norm2(&v);
    if nv == T::zero() {
        return Err(Error::Precondition(
            "start vector lies in the deflated subspace".into(),
        ));
    }
    for x in v.iter_mut() {
        *x = *x / nv;
    }

    // Shift just below the smallest eigenvalue; with deflation the
    // projected iteration converges to the smallest mode outside the
    // deflated span.
    let mut shift = lambda_min - fl::<T>(1e-4) * (T::one() + lambda_min.abs());
    let mut lambda = dot(&v, &s.matvec(&v));
    let mut residual = T::infinity();
    let mut factor: Option<Lu<T>> = None;
    let mut iterations = 0;

    for it in 0..opts.max_iter {
        iterations = it + 1;
        if factor.is_none() {
            let mut shifted = s.clone();
            for i in 0..n {
                *shifted.at_mut(i, i) = shifted.at(i, i) - shift;
            }
            factor = match lu_factor(shifted) {
                Ok(f) => Some(f),
                Err(_) => {
                    // Shift landed on an eigenvalue; nudge and retry.
                    shift = shift - fl::<T>(1e-8) * (T::one() + shift.abs());
                    continue;
                }
            };
        }
        let mut w = factor.as_ref().unwrap().solve(&v);
        project(&mut w);
        let nw = norm2(&w);
        if !nw.is_finite() || nw == T::zero() {
            shift = shift - fl::<T>(1e-6) * (T::one() + shift.abs());
            factor = None;
            continue;
        }
        for x in w.iter_mut() {
            *x = *x / nw;
        }
        let sv = s.matvec(&w);
        lambda = dot(&w, &sv);
        let mut r = vec![T::zero(); n];
        for i in 0..n {
            r[i] = sv[i] - lambda * w[i];
        }
        residual = norm2(&r);
        v = w;
        if residual <= opts.tol * scale.max(T::one()) {
            break;
        }
        // Rayleigh polish once the iterate is close.
        if it >= 2 && residual <= fl::<T>(1e-3) * (T::one() + lambda.abs()) {
            let new_shift = lambda;
            if (new_shift - shift).abs() > fl::<T>(1e-13) * (T::one() + shift.abs()) {
                shift = new_shift;
                factor = None;
            }
        }
    }

    if residual > opts.tol * scale.max(T::one()) {
        return Err(Error::NonConvergence {
            iterations,
            residual: residual.to_f64().unwrap_or(f64::NAN),
            context: format!(
                "inverse iteration stalled; gap estimate |lambda - shift| = {:?}",
                (lambda - shift).abs()
            ),
        });
    }

    Ok(EigenResult {
        lambda,
        vector: v,
        residual,
        iterations,
    })
}

/// Full spectrum of a small symmetric matrix by cyclic Jacobi rotations.
///
/// Used as an independent oracle against the inverse-iteration path.
pub fn jacobi_eigenvalues<T: Scalar>(a: &DMat<T>) -> Vec<T> {
    let n = a.n_rows;
    let mut m = a.clone();
    for _sweep in 0..100 {
        let mut off = T::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                off += m.at(i, j) * m.at(i, j);
            }
        }
        if off.sqrt() < fl::<T>(1e-13) * (m.norm1() + T::one()) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.at(p, q);
                if apq == T::zero() {
                    continue;
                }
                let theta = (m.at(q, q) - m.at(p, p)) / (two_t::<T>() * apq);
                let t = {
                    let s = if theta >= T::zero() { T::one() } else { -T::one() };
                    s / (theta.abs() + (T::one() + theta * theta).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m.at(k, p);
                    let akq = m.at(k, q);
                    *m.at_mut(k, p) = c * akp - s * akq;
                    *m.at_mut(k, q) = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m.at(p, k);
                    let aqk = m.at(q, k);
                    *m.at_mut(p, k) = c * apk - s * aqk;
                    *m.at_mut(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<T> = (0..n).map(|i| m.at(i, i)).collect();
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    eig
}

fn two_t<T: Scalar>() -> T {
    fl(2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_solves_random_system() {
        let n = 12;
        let rng = crate::rng::CounterRng::new(3);
        let mut a = DMat::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                *a.at_mut(i, j) = rng.range((i * n + j) as u64, -1.0, 1.0);
            }
            *a.at_mut(i, i) += 4.0;
        }
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let b = a.matvec(&x_true);
        let lu = lu_factor(a.clone()).unwrap();
        let x = lu.solve(&b);
        for (xi, ti) in x.iter().zip(&x_true) {
            assert!((xi - ti).abs() < 1e-12);
        }
        assert!(cond1_estimate(&a).unwrap() > 1.0);
    }

    #[test]
    fn ql_eigenvalues_match_jacobi_oracle() {
        let n = 24;
        let rng = crate::rng::CounterRng::new(5);
        let mut a = DMat::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = rng.range((i * n + j) as u64, -2.0, 2.0);
                *a.at_mut(i, j) = v;
                *a.at_mut(j, i) = v;
            }
        }
        let ql = sym_eigenvalues(&a);
        let jac = jacobi_eigenvalues(&a);
        for (x, y) in ql.iter().zip(&jac) {
            assert!((x - y).abs() < 1e-10 * (1.0 + x.abs()), "{x} vs {y}");
        }
    }

    #[test]
    fn inverse_iteration_matches_jacobi_on_small_symmetric() {
        let n = 20;
        let rng = crate::rng::CounterRng::new(11);
        let mut a = DMat::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = rng.range((i * n + j) as u64, -1.0, 1.0);
                *a.at_mut(i, j) = v;
                *a.at_mut(j, i) = v;
            }
            *a.at_mut(i, i) += 2.0;
        }
        let opts = EigenOptions {
            start: vec![1.0; n],
            tol: 1e-12,
            max_iter: 200,
        };
        let got = smallest_eigenpair_sym(&a, &[], &opts).unwrap();
        let all = jacobi_eigenvalues(&a);
        assert!((got.lambda - all[0]).abs() < 1e-9, "{} vs {}", got.lambda, all[0]);
    }
}
