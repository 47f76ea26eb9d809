use crate::error::{Error, Result};
use crate::linalg::dense::SymMatrix;
use crate::scalar::Real;

/// Ascending eigenpairs of `K v = λ M v`.
///
/// `eigenvectors[j][i]` is the value of the `j`-th eigenvector at position
/// `support[i]`; vectors are orthonormal in the mass inner product.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResult<T> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: Vec<Vec<T>>,
    /// `max_j ‖K v_j − λ_j M v_j‖ / ((‖K‖ + |λ_j| ‖M‖) ‖v_j‖)`.
    pub residual_norm: T,
    pub support: Vec<usize>,
}

impl<T: Real> SpectralResult<T> {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn truncate(&mut self, k: usize) {
        self.eigenvalues.truncate(k);
        self.eigenvectors.truncate(k);
    }
}

/// Fixes the sign so that the first clearly nonzero coordinate is positive.
pub(crate) fn normalize_sign<T: Real>(v: &mut [T]) {
    let big = v.iter().fold(T::zero(), |a, x| a.max(x.abs()));
    let tol = big * T::epsilon() * T::lit(1e3);
    if let Some(first) = v.iter().find(|x| x.abs() > tol) {
        if *first < T::zero() {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

pub(crate) fn check_pencil<T: Real>(k: &SymMatrix<T>, m: &[T]) -> Result<()> {
    if m.len() != k.dim() {
        return Err(Error::input("mass vector length does not match matrix"));
    }
    if !k.is_finite() || m.iter().any(|v| !v.is_finite()) {
        return Err(Error::input("non-finite entries in eigenproblem"));
    }
    if m.iter().any(|&v| v <= T::zero()) {
        return Err(Error::input("mass entries must be positive"));
    }
    Ok(())
}

pub(crate) fn pencil_residual<T: Real>(k: &SymMatrix<T>, m: &[T], values: &[T], vectors: &[Vec<T>]) -> T {
    let knorm = k.norm_inf();
    let mnorm = m.iter().fold(T::zero(), |a, &x| a.max(x));
    let mut worst = T::zero();
    for (lam, v) in values.iter().zip(vectors) {
        let kv = k.matvec(v);
        let r = kv
            .iter()
            .zip(v.iter().zip(m))
            .map(|(&a, (&x, &mi))| (a - *lam * mi * x).powi(2))
            .sum::<T>()
            .sqrt();
        let vn = v.iter().map(|x| *x * *x).sum::<T>().sqrt();
        let denom = (knorm + lam.abs() * mnorm) * vn;
        if denom > T::zero() {
            worst = worst.max(r / denom);
        }
    }
    worst
}

/// Generalized symmetric-definite eigenproblem with diagonal mass, reduced to
/// standard form by `M^{-1/2} K M^{-1/2}` and solved by Householder
/// tridiagonalization followed by implicit QL.
pub fn sym_eig_generalized<T: Real>(k: &SymMatrix<T>, m: &[T]) -> Result<SpectralResult<T>> {
    check_pencil(k, m)?;
    let n = k.dim();
    let s: Vec<T> = m.iter().map(|&x| T::one() / x.sqrt()).collect();
    let c = SymMatrix::from_fn(n, |i, j| k.get(i, j) * s[i] * s[j]);
    let (values, vecs) = sym_eig(&c)?;
    let eigenvectors: Vec<Vec<T>> = vecs
        .into_iter()
        .map(|y| {
            let mut v: Vec<T> = y.iter().zip(&s).map(|(&a, &b)| a * b).collect();
            normalize_sign(&mut v);
            v
        })
        .collect();
    let residual_norm = pencil_residual(k, m, &values, &eigenvectors);
    Ok(SpectralResult { eigenvalues: values, eigenvectors, residual_norm, support: (0..n).collect() })
}

/// Standard symmetric eigenproblem: ascending eigenvalues and orthonormal eigenvectors.
pub fn sym_eig<T: Real>(a: &SymMatrix<T>) -> Result<(Vec<T>, Vec<Vec<T>>)> {
    let n = a.dim();
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let mut v: Vec<Vec<T>> = a.to_rows();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    tred2(&mut v, &mut d, &mut e);
    tql2(&mut v, &mut d, &mut e)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = order.iter().map(|&j| (0..n).map(|r| v[r][j]).collect()).collect();
    Ok((values, vectors))
}

fn tred2<T: Real>(v: &mut [Vec<T>], d: &mut [T], e: &mut [T]) {
    let n = d.len();
    let zero = T::zero();
    d.copy_from_slice(&v[n - 1][..n]);
    for i in (1..n).rev() {
        let mut scale = zero;
        let mut h = zero;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == zero {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[i - 1][j];
                v[i][j] = zero;
                v[j][i] = zero;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > zero {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for j in 0..i {
                e[j] = zero;
            }
            for j in 0..i {
                f = d[j];
                v[j][i] = f;
                g = e[j] + v[j][j] * f;
                for k in j + 1..i {
                    g += v[k][j] * d[k];
                    e[k] += v[k][j] * f;
                }
                e[j] = g;
            }
            f = zero;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    let t = f * e[k] + g * d[k];
                    v[k][j] -= t;
                }
                d[j] = v[i - 1][j];
                v[i][j] = zero;
            }
        }
        d[i] = h;
    }
    for i in 0..n - 1 {
        v[n - 1][i] = v[i][i];
        v[i][i] = T::one();
        let h = d[i + 1];
        if h != zero {
            for k in 0..=i {
                d[k] = v[k][i + 1] / h;
            }
            for j in 0..=i {
                let mut g = zero;
                for k in 0..=i {
                    g += v[k][i + 1] * v[k][j];
                }
                for k in 0..=i {
                    let t = g * d[k];
                    v[k][j] -= t;
                }
            }
        }
        for k in 0..=i {
            v[k][i + 1] = zero;
        }
    }
    for j in 0..n {
        d[j] = v[n - 1][j];
        v[n - 1][j] = zero;
    }
    v[n - 1][n - 1] = T::one();
    e[0] = zero;
}

fn tql2<T: Real>(v: &mut [Vec<T>], d: &mut [T], e: &mut [T]) -> Result<()> {
    let n = d.len();
    let zero = T::zero();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = zero;
    let mut f = zero;
    let mut tst1 = zero;
    let eps = T::epsilon();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 100 {
                    return Err(Error::Numerical("implicit QL failed to converge".into()));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (T::lit(2.0) * e[l]);
                let mut r = p.hypot(T::one());
                if p < zero {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;
                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = zero;
                let mut s2 = zero;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for row in v.iter_mut() {
                        h = row[i + 1];
                        row[i + 1] = s * row[i] + c * h;
                        row[i] = c * row[i] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = zero;
    }
    Ok(())
}
