use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense symmetric matrix. Both triangles are stored and every mutator
/// writes the mirrored entry, so symmetry is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix<T> {
    n: usize,
    a: Vec<T>,
}

impl<T: Real> SymMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, a: vec![T::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = T::one();
        }
        m
    }

    /// Builds from the upper triangle of `f`.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Builds from full rows; the rows must be square and exactly symmetric.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::input("matrix rows are not square"));
        }
        for i in 0..n {
            for j in 0..i {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::input(format!("matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self { n, a: rows.iter().flatten().copied().collect() })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.a[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.a[i * self.n + j] = v;
        self.a[j * self.n + i] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: T) {
        self.a[i * self.n + j] += v;
        if i != j {
            self.a[j * self.n + i] += v;
        }
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.a[i * self.n..(i + 1) * self.n]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        (0..self.n).map(|i| self.row(i).iter().zip(x).map(|(&a, &b)| a * b).sum()).collect()
    }

    /// Principal submatrix on `idx` (in the given order).
    pub fn principal(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), |i, j| self.get(idx[i], idx[j]))
    }

    pub fn row_sums(&self) -> Vec<T> {
        (0..self.n).map(|i| self.row(i).iter().copied().sum()).collect()
    }

    pub fn trace(&self) -> T {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn norm_inf(&self) -> T {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    pub fn is_finite(&self) -> bool {
        self.a.iter().all(|v| v.is_finite())
    }
}

/// Dense lower Cholesky factor `K = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    n: usize,
    l: Vec<T>,
}

impl<T: Real> Cholesky<T> {
    pub fn factor(k: &SymMatrix<T>) -> Result<Self> {
        let n = k.dim();
        let mut l = vec![T::zero(); n * n];
        for j in 0..n {
            let mut d = k.get(j, j);
            for p in 0..j {
                d -= l[j * n + p] * l[j * n + p];
            }
            // pivots that lost almost all their magnitude to cancellation are
            // treated as zero: the block is singular up to rounding
            if !(d > k.get(j, j).abs() * T::epsilon() * T::lit(16.0)) || !d.is_finite() {
                return Err(Error::Singular(format!("non-positive pivot at index {j}")));
            }
            let djj = d.sqrt();
            l[j * n + j] = djj;
            for i in j + 1..n {
                let mut s = k.get(i, j);
                for p in 0..j {
                    s -= l[i * n + p] * l[j * n + p];
                }
                l[i * n + j] = s / djj;
            }
        }
        Ok(Self { n, l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for p in 0..i {
                s -= self.l[i * n + p] * y[p];
            }
            y[i] = s / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for p in i + 1..n {
                s -= self.l[p * n + i] * y[p];
            }
            y[i] = s / self.l[i * n + i];
        }
        y
    }
}

/// Solves `K x = b` for symmetric positive definite `K` by Cholesky.
pub fn solve_spd<T: Real>(k: &SymMatrix<T>, b: &[T]) -> Result<Vec<T>> {
    if b.len() != k.dim() {
        return Err(Error::input("right-hand side length does not match matrix"));
    }
    if !k.is_finite() || b.iter().any(|v| !v.is_finite()) {
        return Err(Error::input("non-finite entries in linear system"));
    }
    Ok(Cholesky::factor(k)?.solve(b))
}

/// `K_RR − K_RE K_EE⁻¹ K_ER` on the retained indices `R` (ascending), where
/// `E = eliminate`.
pub fn schur_complement<T: Real>(k: &SymMatrix<T>, eliminate: &[usize]) -> Result<SymMatrix<T>> {
    let n = k.dim();
    let mut gone = vec![false; n];
    for &e in eliminate {
        if e >= n {
            return Err(Error::input(format!("eliminated index {e} out of range")));
        }
        gone[e] = true;
    }
    let keep: Vec<usize> = (0..n).filter(|&i| !gone[i]).collect();
    let elim: Vec<usize> = (0..n).filter(|&i| gone[i]).collect();
    if elim.is_empty() {
        return Ok(k.clone());
    }
    let chol = Cholesky::factor(&k.principal(&elim))?;
    // columns K_EE⁻¹ K_E r for every retained r
    let x: Vec<Vec<T>> = keep
        .iter()
        .map(|&r| chol.solve(&elim.iter().map(|&e| k.get(e, r)).collect::<Vec<_>>()))
        .collect();
    let half = T::lit(0.5);
    Ok(SymMatrix::from_fn(keep.len(), |i, j| {
        let (ri, rj) = (keep[i], keep[j]);
        let cij: T = elim.iter().zip(&x[j]).map(|(&e, &xe)| k.get(ri, e) * xe).sum();
        let cji: T = elim.iter().zip(&x[i]).map(|(&e, &xe)| k.get(rj, e) * xe).sum();
        k.get(ri, rj) - half * (cij + cji)
    }))
}
