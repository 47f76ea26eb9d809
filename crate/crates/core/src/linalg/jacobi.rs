//! Cyclic Jacobi rotations: slow but simple, kept as the independent
//! cross-check for the tridiagonal QL solver.

use crate::error::{Error, Result};
use crate::linalg::dense::SymMatrix;
use crate::linalg::eigen::{check_pencil, normalize_sign, pencil_residual, SpectralResult};
use crate::scalar::Real;

pub fn sym_eig_jacobi<T: Real>(k: &SymMatrix<T>, m: &[T]) -> Result<SpectralResult<T>> {
    check_pencil(k, m)?;
    let n = k.dim();
    let s: Vec<T> = m.iter().map(|&x| T::one() / x.sqrt()).collect();
    let mut a: Vec<Vec<T>> = (0..n).map(|i| (0..n).map(|j| k.get(i, j) * s[i] * s[j]).collect()).collect();
    let mut v: Vec<Vec<T>> = (0..n).map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect()).collect();
    let zero = T::zero();
    let frob = a.iter().flatten().map(|x| *x * *x).sum::<T>().sqrt();
    let mut converged = false;
    for _sweep in 0..100 {
        let off: T = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off.sqrt() <= T::epsilon() * frob * T::lit(4.0) || off == zero {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() <= T::epsilon() * frob * T::lit(1e-3) {
                    a[p][q] = zero;
                    a[q][p] = zero;
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (T::lit(2.0) * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let sn = t * c;
                for r in 0..n {
                    let (arp, arq) = (a[r][p], a[r][q]);
                    a[r][p] = c * arp - sn * arq;
                    a[r][q] = sn * arp + c * arq;
                }
                for r in 0..n {
                    let (apr, aqr) = (a[p][r], a[q][r]);
                    a[p][r] = c * apr - sn * aqr;
                    a[q][r] = sn * apr + c * aqr;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - sn * vq;
                    row[q] = sn * vp + c * vq;
                }
            }
        }
    }
    if !converged && n > 1 {
        return Err(Error::Numerical("Jacobi sweeps did not converge".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).unwrap_or(std::cmp::Ordering::Equal));
    let eigenvalues: Vec<T> = order.iter().map(|&i| a[i][i]).collect();
    let eigenvectors: Vec<Vec<T>> = order
        .iter()
        .map(|&j| {
            let mut x: Vec<T> = (0..n).map(|r| v[r][j] * s[r]).collect();
            normalize_sign(&mut x);
            x
        })
        .collect();
    let residual_norm = pencil_residual(k, m, &eigenvalues, &eigenvectors);
    Ok(SpectralResult { eigenvalues, eigenvectors, residual_norm, support: (0..n).collect() })
}
