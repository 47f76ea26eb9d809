//! Symmetric numerical kernels: Cholesky solves, generalized eigenproblems,
//! Schur complements, plus the graph stiffness assembly they operate on.

pub mod dense;
pub mod eigen;
pub mod jacobi;
pub mod sparse;

pub use dense::{schur_complement, solve_spd, Cholesky, SymMatrix};
pub use eigen::{sym_eig, sym_eig_generalized, SpectralResult};
pub use jacobi::sym_eig_jacobi;
pub use sparse::{lowest_eigenpairs, SparseCholesky, SparseSym, SpdFactor};

use crate::error::Result;
use crate::graph::WeightedGraph;
use crate::scalar::Real;

/// Stiffness matrix of `m·L`: `K_xy = −w(x,y)`, `K_xx = Σ_y w(x,y)`.
pub fn stiffness<T: Real>(g: &WeightedGraph<T>) -> SymMatrix<T> {
    let n = g.n();
    let mut k = SymMatrix::zeros(n);
    for e in g.edges() {
        k.add(e.u, e.v, -e.w);
        k.add(e.u, e.u, e.w);
        k.add(e.v, e.v, e.w);
    }
    k
}

/// Marks the positions of `idx` inside `0..n`.
pub(crate) fn positions(n: usize, idx: &[usize]) -> Vec<usize> {
    let mut pos = vec![usize::MAX; n];
    for (p, &v) in idx.iter().enumerate() {
        pos[v] = p;
    }
    pos
}

/// Principal block of the stiffness on `idx` (in that order). Diagonals keep
/// the full weighted degree, so vertices outside `idx` act as grounded.
pub fn stiffness_block_sparse<T: Real>(g: &WeightedGraph<T>, idx: &[usize]) -> SparseSym<T> {
    let pos = positions(g.n(), idx);
    let rows = idx
        .iter()
        .enumerate()
        .map(|(p, &v)| {
            let mut row: Vec<(usize, T)> = Vec::with_capacity(g.neighbors(v).len() + 1);
            let mut deg = T::zero();
            for &(u, w) in g.neighbors(v) {
                deg += w;
                if pos[u] != usize::MAX {
                    row.push((pos[u], -w));
                }
            }
            row.push((p, deg));
            row.sort_by_key(|&(j, _)| j);
            row
        })
        .collect();
    SparseSym::from_rows_unchecked(rows)
}

pub fn stiffness_block_dense<T: Real>(g: &WeightedGraph<T>, idx: &[usize]) -> SymMatrix<T> {
    let pos = positions(g.n(), idx);
    let mut k = SymMatrix::zeros(idx.len());
    for (p, &v) in idx.iter().enumerate() {
        let mut deg = T::zero();
        for &(u, w) in g.neighbors(v) {
            deg += w;
            if pos[u] != usize::MAX && pos[u] > p {
                k.set(p, pos[u], -w);
            }
        }
        k.set(p, p, deg);
    }
    k
}

/// Factor of the grounded block `K[idx, idx]`.
pub fn factor_block<T: Real>(g: &WeightedGraph<T>, idx: &[usize]) -> Result<SpdFactor<T>> {
    SpdFactor::factor(&stiffness_block_sparse(g, idx))
}

/// Schur complement of `K[keep ∪ elim]` onto `keep` (order of `keep`),
/// with every vertex outside `keep ∪ elim` grounded.
pub fn grounded_schur<T: Real>(g: &WeightedGraph<T>, keep: &[usize], elim: &[usize]) -> Result<SymMatrix<T>> {
    let kk = stiffness_block_dense(g, keep);
    if elim.is_empty() {
        return Ok(kk);
    }
    let factor = factor_block(g, elim)?;
    let epos = positions(g.n(), elim);
    // columns K_EE⁻¹ K_E,keep[j]
    let cols: Vec<Vec<T>> = keep
        .iter()
        .map(|&v| {
            let mut rhs = vec![T::zero(); elim.len()];
            for &(u, w) in g.neighbors(v) {
                if epos[u] != usize::MAX {
                    rhs[epos[u]] = -w;
                }
            }
            factor.solve(&rhs)
        })
        .collect();
    let coupling = |i: usize, col: &[T]| -> T {
        g.neighbors(keep[i])
            .iter()
            .filter(|&&(u, _)| epos[u] != usize::MAX)
            .map(|&(u, w)| -w * col[epos[u]])
            .sum()
    };
    let half = T::lit(0.5);
    Ok(SymMatrix::from_fn(keep.len(), |i, j| kk.get(i, j) - half * (coupling(i, &cols[j]) + coupling(j, &cols[i]))))
}
