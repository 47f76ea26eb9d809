//! Sparse symmetric storage, reverse Cuthill–McKee ordering, an up-looking
//! sparse Cholesky and block inverse iteration for the bottom of a spectrum.
//!
//! Used once a grounded block grows past the dense limits (deep trees,
//! three-dimensional lattice boxes).

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::dense::{Cholesky, SymMatrix};
use crate::linalg::eigen::{normalize_sign, sym_eig, SpectralResult};
use crate::scalar::Real;

/// Symmetric matrix with full (both-triangle) row patterns, columns sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSym<T> {
    rows: Vec<Vec<(usize, T)>>,
}

impl<T: Real> SparseSym<T> {
    /// From upper or lower triplets; duplicates are summed and mirrored.
    pub fn from_triplets(n: usize, entries: &[(usize, usize, T)]) -> Result<Self> {
        let mut rows: Vec<Vec<(usize, T)>> = vec![Vec::new(); n];
        for &(i, j, v) in entries {
            if i >= n || j >= n {
                return Err(Error::input(format!("sparse entry ({i}, {j}) out of range")));
            }
            rows[i].push((j, v));
            if i != j {
                rows[j].push((i, v));
            }
        }
        for r in &mut rows {
            r.sort_by_key(|&(j, _)| j);
            let mut merged: Vec<(usize, T)> = Vec::with_capacity(r.len());
            for &(j, v) in r.iter() {
                match merged.last_mut() {
                    Some(last) if last.0 == j => last.1 += v,
                    _ => merged.push((j, v)),
                }
            }
            *r = merged;
        }
        Ok(Self { rows })
    }

    pub(crate) fn from_rows_unchecked(rows: Vec<Vec<(usize, T)>>) -> Self {
        Self { rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &[(usize, T)] {
        &self.rows[i]
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn diag(&self, i: usize) -> T {
        self.rows[i].iter().find(|&&(j, _)| j == i).map_or(T::zero(), |&(_, v)| v)
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        self.rows.iter().map(|r| r.iter().map(|&(j, v)| v * x[j]).sum()).collect()
    }

    pub fn norm_inf(&self) -> T {
        self.rows.iter().map(|r| r.iter().map(|&(_, v)| v.abs()).sum::<T>()).fold(T::zero(), T::max)
    }

    pub fn to_dense(&self) -> SymMatrix<T> {
        let mut m = SymMatrix::zeros(self.dim());
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, v) in r {
                if j >= i {
                    m.set(i, j, v);
                }
            }
        }
        m
    }
}

/// Reverse Cuthill–McKee permutation (`perm[new] = old`), one BFS per component
/// started from a pseudo-peripheral vertex.
pub fn rcm_order<T: Real>(a: &SparseSym<T>) -> Vec<usize> {
    let n = a.dim();
    let degree: Vec<usize> = (0..n).map(|i| a.row(i).len()).collect();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut level = vec![usize::MAX; n];
    for seed in 0..n {
        if placed[seed] {
            continue;
        }
        let start = pseudo_peripheral(a, seed, &placed, &mut level);
        let mut queue = VecDeque::from([start]);
        placed[start] = true;
        while let Some(x) = queue.pop_front() {
            order.push(x);
            let mut nb: Vec<usize> = a.row(x).iter().map(|&(j, _)| j).filter(|&j| !placed[j]).collect();
            nb.sort_by_key(|&j| (degree[j], j));
            for j in nb {
                placed[j] = true;
                queue.push_back(j);
            }
        }
    }
    order.reverse();
    order
}

fn bfs_levels<T: Real>(a: &SparseSym<T>, s: usize, placed: &[bool], level: &mut [usize]) -> (usize, Vec<usize>) {
    let mut touched = vec![s];
    level[s] = 0;
    let mut queue = VecDeque::from([s]);
    let mut depth = 0;
    while let Some(x) = queue.pop_front() {
        depth = depth.max(level[x]);
        for &(j, _) in a.row(x) {
            if !placed[j] && level[j] == usize::MAX {
                level[j] = level[x] + 1;
                touched.push(j);
                queue.push_back(j);
            }
        }
    }
    (depth, touched)
}

fn pseudo_peripheral<T: Real>(a: &SparseSym<T>, seed: usize, placed: &[bool], level: &mut [usize]) -> usize {
    let mut s = seed;
    let mut best = 0;
    for _ in 0..8 {
        let (depth, touched) = bfs_levels(a, s, placed, level);
        let far = touched
            .iter()
            .copied()
            .filter(|&v| level[v] == depth)
            .min_by_key(|&v| (a.row(v).len(), v))
            .unwrap_or(s);
        for v in touched {
            level[v] = usize::MAX;
        }
        if depth <= best && s != seed {
            break;
        }
        best = depth;
        if far == s {
            break;
        }
        s = far;
    }
    s
}

/// `P A Pᵀ = L Lᵀ` with `L` stored by columns, diagonal entry first.
#[derive(Debug, Clone)]
pub struct SparseCholesky<T> {
    perm: Vec<usize>,
    cols: Vec<Vec<(usize, T)>>,
}

impl<T: Real> SparseCholesky<T> {
    pub fn factor(a: &SparseSym<T>) -> Result<Self> {
        let perm = rcm_order(a);
        Self::factor_with(a, perm)
    }

    pub fn factor_with(a: &SparseSym<T>, perm: Vec<usize>) -> Result<Self> {
        let n = a.dim();
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        // lower pattern of the permuted matrix, row by row
        let rows: Vec<Vec<(usize, T)>> = (0..n)
            .map(|i| {
                let mut r: Vec<(usize, T)> = a.row(perm[i]).iter().map(|&(j, v)| (inv[j], v)).filter(|&(j, _)| j <= i).collect();
                r.sort_by_key(|&(j, _)| j);
                r
            })
            .collect();
        let parent = etree(&rows);
        let mut cols: Vec<Vec<(usize, T)>> = vec![Vec::new(); n];
        let mut work = vec![T::zero(); n];
        let mut mark = vec![usize::MAX; n];
        let mut pattern = Vec::new();
        for i in 0..n {
            pattern.clear();
            let mut d = T::zero();
            mark[i] = i;
            for &(k, v) in &rows[i] {
                if k == i {
                    d = v;
                    continue;
                }
                work[k] = v;
                let mut x = k;
                while mark[x] != i {
                    mark[x] = i;
                    pattern.push(x);
                    x = parent[x];
                }
            }
            pattern.sort_unstable();
            let diag_in = d;
            for &j in &pattern {
                let lij = work[j] / cols[j][0].1;
                work[j] = T::zero();
                for &(r, l) in &cols[j][1..] {
                    work[r] -= l * lij;
                }
                d -= lij * lij;
                cols[j].push((i, lij));
            }
            if !(d > diag_in.abs() * T::epsilon() * T::lit(16.0)) || !d.is_finite() {
                return Err(Error::Singular(format!("non-positive pivot at permuted index {i}")));
            }
            cols[i].push((i, d.sqrt()));
        }
        Ok(Self { perm, cols })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.dim();
        let mut y: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for j in 0..n {
            y[j] /= self.cols[j][0].1;
            let yj = y[j];
            for &(r, l) in &self.cols[j][1..] {
                y[r] -= l * yj;
            }
        }
        for j in (0..n).rev() {
            let mut s = y[j];
            for &(r, l) in &self.cols[j][1..] {
                s -= l * y[r];
            }
            y[j] = s / self.cols[j][0].1;
        }
        let mut x = vec![T::zero(); n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}

fn etree<T>(rows: &[Vec<(usize, T)>]) -> Vec<usize> {
    let n = rows.len();
    let none = usize::MAX;
    let mut parent = vec![none; n];
    let mut ancestor = vec![none; n];
    for i in 0..n {
        for &(k, _) in &rows[i] {
            let mut x = k;
            while x != none && x < i {
                let next = ancestor[x];
                ancestor[x] = i;
                if next == none {
                    parent[x] = i;
                }
                x = next;
            }
        }
    }
    parent
}

/// Factor of an SPD block, dense when small.
#[derive(Debug, Clone)]
pub enum SpdFactor<T> {
    Dense(Cholesky<T>),
    Sparse(SparseCholesky<T>),
}

/// Blocks up to this size are factored densely.
pub const DENSE_FACTOR_LIMIT: usize = 64;

impl<T: Real> SpdFactor<T> {
    pub fn factor(a: &SparseSym<T>) -> Result<Self> {
        if a.dim() <= DENSE_FACTOR_LIMIT {
            Ok(SpdFactor::Dense(Cholesky::factor(&a.to_dense())?))
        } else {
            Ok(SpdFactor::Sparse(SparseCholesky::factor(a)?))
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            SpdFactor::Dense(c) => c.dim(),
            SpdFactor::Sparse(c) => c.dim(),
        }
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        match self {
            SpdFactor::Dense(c) => c.solve(b),
            SpdFactor::Sparse(c) => c.solve(b),
        }
    }
}

fn m_dot<T: Real>(x: &[T], y: &[T], m: &[T]) -> T {
    x.iter().zip(y).zip(m).map(|((&a, &b), &w)| a * b * w).sum()
}

/// Lowest `count` eigenpairs of `A v = λ M v` (A SPD, M positive diagonal)
/// by block inverse iteration with Rayleigh–Ritz.
pub fn lowest_eigenpairs<T: Real>(a: &SparseSym<T>, m: &[T], count: usize, seed: u64) -> Result<SpectralResult<T>> {
    let n = a.dim();
    if m.len() != n || m.iter().any(|&x| !(x.is_finite() && x > T::zero())) {
        return Err(Error::input("mass vector must be positive with one entry per row"));
    }
    if count == 0 || count > n {
        return Err(Error::input(format!("requested {count} eigenpairs of a system of size {n}")));
    }
    let factor = SpdFactor::factor(a)?;
    let q = (count + 4).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut block: Vec<Vec<T>> = (0..q).map(|_| (0..n).map(|_| T::lit(rng.gen::<f64>() - 0.5)).collect()).collect();
    let anorm = a.norm_inf();
    let mnorm = m.iter().fold(T::zero(), |acc, &x| acc.max(x));
    let mut prev: Vec<T> = vec![T::infinity(); count];
    let tol = T::epsilon() * T::lit(64.0);
    for _iter in 0..2000 {
        // inverse step
        let mut next: Vec<Vec<T>> = block
            .iter()
            .map(|x| factor.solve(&x.iter().zip(m).map(|(&v, &w)| v * w).collect::<Vec<_>>()))
            .collect();
        m_orthonormalize(&mut next, m, &mut rng);
        // Rayleigh–Ritz on the M-orthonormal basis
        let av: Vec<Vec<T>> = next.iter().map(|x| a.matvec(x)).collect();
        let h = SymMatrix::from_fn(q, |i, j| next[i].iter().zip(&av[j]).map(|(&x, &y)| x * y).sum());
        let (theta, z) = sym_eig(&h)?;
        block = (0..q)
            .map(|c| (0..n).map(|r| (0..q).map(|p| next[p][r] * z[c][p]).sum()).collect())
            .collect();
        let mut worst = T::zero();
        for j in 0..count {
            let x = &block[j];
            let ax = a.matvec(x);
            let res = ax
                .iter()
                .zip(x.iter().zip(m))
                .map(|(&u, (&v, &w))| (u - theta[j] * w * v).powi(2))
                .sum::<T>()
                .sqrt();
            let xn = x.iter().map(|v| *v * *v).sum::<T>().sqrt();
            worst = worst.max(res / ((anorm + theta[j].abs() * mnorm) * xn));
        }
        let settled = (0..count).all(|j| (theta[j] - prev[j]).abs() <= tol * theta[j].abs());
        prev = theta[..count].to_vec();
        if settled && worst <= T::lit(1e-11).max(tol) {
            let mut eigenvectors: Vec<Vec<T>> = block.into_iter().take(count).collect();
            eigenvectors.iter_mut().for_each(|v| normalize_sign(v));
            return Ok(SpectralResult { eigenvalues: prev, eigenvectors, residual_norm: worst, support: (0..n).collect() });
        }
    }
    Err(Error::Numerical("block inverse iteration did not converge".into()))
}

fn m_orthonormalize<T: Real>(block: &mut [Vec<T>], m: &[T], rng: &mut ChaCha8Rng) {
    for j in 0..block.len() {
        for _pass in 0..2 {
            for p in 0..j {
                let c = m_dot(&block[j], &block[p], m);
                let (head, tail) = block.split_at_mut(j);
                for (x, &y) in tail[0].iter_mut().zip(&head[p]) {
                    *x -= c * y;
                }
            }
        }
        let mut nrm = m_dot(&block[j], &block[j], m).sqrt();
        if !(nrm > T::epsilon()) {
            // collapsed direction: restart it from noise
            block[j] = (0..m.len()).map(|_| T::lit(rng.gen::<f64>() - 0.5)).collect();
            for p in 0..j {
                let c = m_dot(&block[j], &block[p], m);
                let (head, tail) = block.split_at_mut(j);
                for (x, &y) in tail[0].iter_mut().zip(&head[p]) {
                    *x -= c * y;
                }
            }
            nrm = m_dot(&block[j], &block[j], m).sqrt();
        }
        block[j].iter_mut().for_each(|x| *x /= nrm);
    }
}
