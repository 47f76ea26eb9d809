//! Dirichlet, Neumann and Steklov spectra of finite domains, the
//! Dirichlet-to-Neumann form, vanishing-mass approximations, the grounded
//! DtN spectra used along exhaustions, and the DtN variant without edge removal.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{vertex_boundary, SteklovDomain, WeightedGraph};
use crate::linalg::{
    factor_block, grounded_schur, lowest_eigenpairs, positions, stiffness, stiffness_block_dense,
    stiffness_block_sparse, sym_eig_generalized, SpectralResult, SymMatrix,
};
use crate::scalar::{Extended, Real};

/// Dense eigensolves are used up to this dimension; beyond it the bottom of
/// the spectrum comes from block inverse iteration.
pub const DENSE_EIGEN_LIMIT: usize = 600;

fn check_count(count: usize, available: usize, what: &str) -> Result<()> {
    if count == 0 || count > available {
        return Err(Error::input(format!("requested {count} {what} eigenvalues, {available} available")));
    }
    Ok(())
}

/// First `count` Dirichlet eigenvalues of `interior` inside `graph`
/// (`K_II v = λ M_I v`), eigenfunctions extended by zero to the vertex boundary.
///
/// The interior need not be connected; every component must reach the boundary.
pub fn dirichlet_spectrum<T: Real>(graph: &WeightedGraph<T>, interior: &[usize], count: usize) -> Result<SpectralResult<T>> {
    let mut interior = interior.to_vec();
    interior.sort_unstable();
    interior.dedup();
    let boundary = vertex_boundary(graph, &interior)?;
    if interior.is_empty() {
        return Err(Error::input("interior set is empty"));
    }
    if boundary.is_empty() {
        return Err(Error::input("Dirichlet problem needs a nonempty vertex boundary"));
    }
    check_count(count, interior.len(), "Dirichlet")?;
    let mass: Vec<T> = interior.iter().map(|&v| graph.mass(v)).collect();
    let mut r = if interior.len() <= DENSE_EIGEN_LIMIT {
        let mut r = sym_eig_generalized(&stiffness_block_dense(graph, &interior), &mass)?;
        r.truncate(count);
        r
    } else {
        lowest_eigenpairs(&stiffness_block_sparse(graph, &interior), &mass, count, 0x1d)?
    };
    for v in &mut r.eigenvectors {
        v.extend(std::iter::repeat_n(T::zero(), boundary.len()));
    }
    r.support = interior.into_iter().chain(boundary).collect();
    Ok(r)
}

/// Neumann eigenvalues `λ₀ = 0 ≤ λ₁^N ≤ …` (the first `count` of them),
/// obtained by eliminating the boundary through its diagonal stiffness block.
pub fn neumann_spectrum<T: Real>(domain: &SteklovDomain<T>, count: usize) -> Result<SpectralResult<T>> {
    let ni = domain.n_interior();
    if count >= 2 && ni < 2 {
        return Err(Error::input("a non-trivial Neumann eigenvalue needs at least two interior vertices"));
    }
    check_count(count, ni, "Neumann")?;
    if ni > DENSE_EIGEN_LIMIT {
        return Err(Error::input(format!("Neumann problem of size {ni} exceeds the dense limit {DENSE_EIGEN_LIMIT}")));
    }
    let g = domain.induced();
    let mut k = stiffness_block_dense(g, &(0..ni).collect::<Vec<_>>());
    for z in ni..g.n() {
        let dz: T = g.neighbors(z).iter().map(|&(_, w)| w).sum();
        let nb = g.neighbors(z);
        for (p, &(x, wx)) in nb.iter().enumerate() {
            for &(y, wy) in &nb[p..] {
                k.add(x, y, -(wx * wy / dz));
            }
        }
    }
    let mass: Vec<T> = (0..ni).map(|x| g.mass(x)).collect();
    let mut r = sym_eig_generalized(&k, &mass)?;
    r.truncate(count);
    for v in &mut r.eigenvectors {
        let ext: Vec<T> = (ni..g.n())
            .map(|z| {
                let nb = g.neighbors(z);
                let dz: T = nb.iter().map(|&(_, w)| w).sum();
                nb.iter().map(|&(x, w)| w * v[x]).sum::<T>() / dz
            })
            .collect();
        v.extend(ext);
    }
    r.support = domain.closure().to_vec();
    Ok(r)
}

/// Matrix of the quadratic form `f ↦ E_Ω(u_f, u_f)` on boundary data.
#[derive(Debug, Clone, PartialEq)]
pub struct DtnOperator<T> {
    /// Ambient indices, in the row order of `form_matrix`.
    pub boundary_index: Vec<usize>,
    pub form_matrix: SymMatrix<T>,
    pub mass: Vec<T>,
}

impl<T: Real> DtnOperator<T> {
    /// `Λ_Ω f` at every boundary vertex.
    pub fn apply(&self, f: &[T]) -> Vec<T> {
        self.form_matrix.matvec(f).into_iter().zip(&self.mass).map(|(v, &m)| v / m).collect()
    }
}

pub fn dtn_operator<T: Real>(domain: &SteklovDomain<T>) -> Result<DtnOperator<T>> {
    if domain.n_boundary() == 0 {
        return Err(Error::input("domain has empty boundary"));
    }
    let ni = domain.n_interior();
    let g = domain.induced();
    let keep: Vec<usize> = (ni..g.n()).collect();
    let elim: Vec<usize> = (0..ni).collect();
    let form_matrix = grounded_schur(g, &keep, &elim)
        .map_err(|e| Error::Numerical(format!("interior block of a connected domain is singular: {e}")))?;
    Ok(DtnOperator {
        boundary_index: domain.boundary().to_vec(),
        form_matrix,
        mass: keep.iter().map(|&z| g.mass(z)).collect(),
    })
}

/// Harmonic extension of boundary data `fb` into the interior (local order).
fn harmonic_extension<T: Real>(domain: &SteklovDomain<T>, fbs: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
    let ni = domain.n_interior();
    let g = domain.induced();
    let factor = factor_block(g, &(0..ni).collect::<Vec<_>>())?;
    Ok(fbs
        .iter()
        .map(|fb| {
            let rhs: Vec<T> = (0..ni)
                .map(|x| g.neighbors(x).iter().filter(|&&(y, _)| y >= ni).map(|&(y, w)| w * fb[y - ni]).sum())
                .collect();
            let mut u = factor.solve(&rhs);
            u.extend_from_slice(fb);
            u
        })
        .collect())
}

/// Steklov eigenvalues `σ₀ = 0 ≤ σ₁ ≤ …` (first `count`). Eigenvectors are
/// mass-orthonormal on the boundary and carry their harmonic extensions,
/// supported on the closure in local order.
pub fn steklov_spectrum<T: Real>(domain: &SteklovDomain<T>, count: usize) -> Result<SpectralResult<T>> {
    let nb = domain.n_boundary();
    if count >= 2 && nb < 2 {
        return Err(Error::input("a non-trivial Steklov eigenvalue needs at least two boundary vertices"));
    }
    check_count(count, nb, "Steklov")?;
    let dtn = dtn_operator(domain)?;
    let mut r = sym_eig_generalized(&dtn.form_matrix, &dtn.mass)?;
    r.truncate(count);
    r.eigenvectors = harmonic_extension(domain, &r.eigenvectors)?;
    r.support = domain.closure().to_vec();
    Ok(r)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightSchedule {
    k_values: Vec<u64>,
}

impl WeightSchedule {
    pub fn new(k_values: Vec<u64>) -> Result<Self> {
        if k_values.is_empty() || k_values[0] == 0 || k_values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::input("weight schedule must be positive and strictly increasing"));
        }
        Ok(Self { k_values })
    }

    /// `1, 2, 4, …, 2^max_exp`.
    pub fn powers_of_two(max_exp: u32) -> Self {
        Self { k_values: (0..=max_exp).map(|e| 1u64 << e).collect() }
    }

    pub fn k_values(&self) -> &[u64] {
        &self.k_values
    }
}

impl Default for WeightSchedule {
    fn default() -> Self {
        Self::powers_of_two(14)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VanishingMode {
    /// Boundary masses divided by `k`; converges to the Neumann spectrum.
    Neumann,
    /// Interior masses divided by `k`; converges to the Steklov spectrum.
    Steklov,
}

/// Full Laplacian spectra of `G_Ω` with one side's masses shrunk by `k`,
/// one result per schedule entry.
pub fn vanishing_weight_spectrum<T: Real>(
    domain: &SteklovDomain<T>,
    mode: VanishingMode,
    schedule: &WeightSchedule,
    count: usize,
) -> Result<Vec<SpectralResult<T>>> {
    let g = domain.induced();
    check_count(count, g.n(), "vanishing-weight")?;
    if g.n() > DENSE_EIGEN_LIMIT {
        return Err(Error::input("vanishing-weight route is dense-only"));
    }
    let k = stiffness(g);
    let ni = domain.n_interior();
    schedule
        .k_values()
        .par_iter()
        .map(|&kv| {
            let s = T::from_u64(kv).ok_or_else(|| Error::input("schedule entry not representable"))?;
            let mass: Vec<T> = (0..g.n())
                .map(|v| {
                    let shrink = match mode {
                        VanishingMode::Steklov => v < ni,
                        VanishingMode::Neumann => v >= ni,
                    };
                    if shrink { g.mass(v) / s } else { g.mass(v) }
                })
                .collect();
            let mut r = sym_eig_generalized(&k, &mass)?;
            r.truncate(count);
            r.support = domain.closure().to_vec();
            Ok(r)
        })
        .collect()
}

/// Spectrum of the DtN form on `W ∩ δU` with `Ū ∖ W` grounded, or the
/// distinguished infinite case when `W` misses the boundary.
#[derive(Debug, Clone, PartialEq)]
pub enum GroundedDtn<T> {
    Spectrum(SpectralResult<T>),
    Infinite,
}

impl<T: Real> GroundedDtn<T> {
    /// `σ_k^D(W)` (1-based); infinite when fewer than `k` boundary vertices lie in `W`.
    pub fn sigma(&self, k: usize) -> Extended<T> {
        match self {
            GroundedDtn::Spectrum(r) if k >= 1 && k <= r.len() => Extended::Finite(r.eigenvalues[k - 1]),
            _ => Extended::Infinite,
        }
    }
}

pub fn grounded_dtn_spectrum<T: Real>(ambient: &SteklovDomain<T>, w: &[usize], count: usize) -> Result<GroundedDtn<T>> {
    if w.is_empty() {
        return Err(Error::input("truncation set is empty"));
    }
    let mut local = ambient.to_local(w)?;
    local.sort_unstable();
    local.dedup();
    let ni = ambient.n_interior();
    let keep: Vec<usize> = local.iter().copied().filter(|&v| v >= ni).collect();
    let elim: Vec<usize> = local.iter().copied().filter(|&v| v < ni).collect();
    if keep.is_empty() {
        return Ok(GroundedDtn::Infinite);
    }
    if count == 0 {
        return Err(Error::input("requested zero eigenvalues"));
    }
    let g = ambient.induced();
    let s = grounded_schur(g, &keep, &elim)?;
    let mass: Vec<T> = keep.iter().map(|&v| g.mass(v)).collect();
    let mut r = sym_eig_generalized(&s, &mass)?;
    r.truncate(count);
    r.support = ambient.to_ambient(&keep);
    Ok(GroundedDtn::Spectrum(r))
}

/// Eigenvalues of `S_Ω f = −Δu_f` on `Ω`, with `u_f` harmonic on `V ∖ Ω` in the
/// full graph (no edges removed).
pub fn hm_dtn_spectrum<T: Real>(graph: &WeightedGraph<T>, omega: &[usize], count: usize) -> Result<SpectralResult<T>> {
    let mut omega = omega.to_vec();
    omega.sort_unstable();
    omega.dedup();
    if omega.is_empty() || omega.len() >= graph.n() {
        return Err(Error::input("Ω must be a proper nonempty subset"));
    }
    if let Some(&bad) = omega.iter().find(|&&v| v >= graph.n()) {
        return Err(Error::input(format!("vertex index {bad} out of range")));
    }
    if !graph.is_connected() {
        return Err(Error::Domain("graph is not connected".into()));
    }
    check_count(count, omega.len(), "Steklov")?;
    let pos = positions(graph.n(), &omega);
    let rest: Vec<usize> = (0..graph.n()).filter(|&v| pos[v] == usize::MAX).collect();
    let s = grounded_schur(graph, &omega, &rest)?;
    let mass: Vec<T> = omega.iter().map(|&v| graph.mass(v)).collect();
    let mut r = sym_eig_generalized(&s, &mass)?;
    r.truncate(count);
    r.support = omega;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{make_domain, WeightedGraph};
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn path_domain(n: usize) -> SteklovDomain<f64> {
        let g = Arc::new(WeightedGraph::unit_path(n));
        make_domain(&g, &(1..n).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn dirichlet_path_closed_form() {
        for n in 2..15 {
            let g = WeightedGraph::<f64>::unit_path(n);
            let r = dirichlet_spectrum(&g, &(1..n).collect::<Vec<_>>(), n - 1).unwrap();
            for j in 1..n {
                let exact = 2.0 - 2.0 * (j as f64 * PI / n as f64).cos();
                assert!((r.eigenvalues[j - 1] - exact).abs() < 1e-12);
            }
            let v = &r.eigenvectors[0];
            assert!(v[..n - 1].iter().all(|&x| x > 0.0));
            assert_eq!(&v[n - 1..], &[0.0, 0.0]);
        }
    }

    #[test]
    fn dirichlet_single_vertex_is_degree() {
        let g = WeightedGraph::<f64>::from_edges(&[2.0, 1.0, 1.0], &[(0, 1, 1.5), (0, 2, 0.5)]).unwrap();
        let r = dirichlet_spectrum(&g, &[0], 1).unwrap();
        assert!((r.eigenvalues[0] - 1.0).abs() < 1e-15);
        assert!(dirichlet_spectrum(&g, &[0, 1, 2], 1).is_err());
        assert!(dirichlet_spectrum(&g, &[0], 2).is_err());
    }

    #[test]
    fn large_dirichlet_uses_iteration() {
        let n = 900;
        let g = WeightedGraph::<f64>::unit_path(n);
        let r = dirichlet_spectrum(&g, &(1..n).collect::<Vec<_>>(), 2).unwrap();
        for j in 1..=2 {
            let exact = 2.0 - 2.0 * (j as f64 * PI / n as f64).cos();
            assert!((r.eigenvalues[j - 1] - exact).abs() < 1e-10 * exact);
        }
    }

    #[test]
    fn neumann_two_vertices() {
        let g = Arc::new(WeightedGraph::<f64>::from_edges(&[2.0, 0.5], &[(0, 1, 3.0)]).unwrap());
        let d = make_domain(&g, &[0, 1]).unwrap();
        let r = neumann_spectrum(&d, 2).unwrap();
        assert!(r.eigenvalues[0].abs() < 1e-14);
        assert!((r.eigenvalues[1] - 3.0 * (0.5 + 2.0)).abs() < 1e-13);
        let one = make_domain(&g, &[0]).unwrap();
        assert!(neumann_spectrum(&one, 2).is_err());
    }

    #[test]
    fn neumann_eigenfunction_has_zero_flux() {
        let d = path_domain(4);
        let r = neumann_spectrum(&d, 3).unwrap();
        let dn = d.normal_derivative_local(&r.eigenvectors[1]);
        assert!(dn.iter().all(|x| x.abs() < 1e-13));
        let c = &r.eigenvectors[0];
        assert!(c.iter().all(|&x| (x - c[0]).abs() < 1e-12));
    }

    #[test]
    fn dtn_of_path() {
        for n in 2..12 {
            let dtn = dtn_operator(&path_domain(n)).unwrap();
            let c = 1.0 / n as f64;
            assert!((dtn.form_matrix.get(0, 0) - c).abs() < 1e-14);
            assert!((dtn.form_matrix.get(0, 1) + c).abs() < 1e-14);
        }
    }

    #[test]
    fn dtn_apply_is_flux_of_extension() {
        let d = path_domain(5);
        let dtn = dtn_operator(&d).unwrap();
        let fb = vec![0.3, -1.2];
        let u = harmonic_extension(&d, std::slice::from_ref(&fb)).unwrap().pop().unwrap();
        let flux = d.normal_derivative_local(&u);
        for (a, b) in dtn.apply(&fb).iter().zip(&flux) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn steklov_path() {
        for n in 2..20 {
            let r = steklov_spectrum(&path_domain(n), 2).unwrap();
            assert!(r.eigenvalues[0].abs() < 1e-13);
            assert!((r.eigenvalues[1] - 2.0 / n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn vanishing_k1_is_plain_laplacian() {
        let d = path_domain(4);
        let r = vanishing_weight_spectrum(&d, VanishingMode::Steklov, &WeightSchedule::new(vec![1]).unwrap(), 5).unwrap();
        let plain = sym_eig_generalized(&stiffness(d.induced()), &[1.0; 5]).unwrap();
        for (a, b) in r[0].eigenvalues.iter().zip(&plain.eigenvalues) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn vanishing_path_converges_to_half() {
        let d = path_domain(4);
        let seq = vanishing_weight_spectrum(&d, VanishingMode::Steklov, &WeightSchedule::default(), 2).unwrap();
        let last = seq.last().unwrap().eigenvalues[1];
        assert!((last - 0.5).abs() < 1e-3);
        let neu = neumann_spectrum(&d, 2).unwrap().eigenvalues[1];
        let seq = vanishing_weight_spectrum(&d, VanishingMode::Neumann, &WeightSchedule::default(), 2).unwrap();
        assert!((seq.last().unwrap().eigenvalues[1] - neu).abs() < 1e-3);
    }

    #[test]
    fn schedule_validation() {
        assert!(WeightSchedule::new(vec![1, 1]).is_err());
        assert!(WeightSchedule::new(vec![0, 2]).is_err());
        assert_eq!(WeightSchedule::default().k_values().len(), 15);
    }

    #[test]
    fn grounded_single_boundary_vertex() {
        // U = {1, 2, ...} on a path; δU = {0}
        let g = Arc::new(WeightedGraph::<f64>::from_edges(&[2.0, 1.0, 1.0, 1.0], &[(0, 1, 1.5), (1, 2, 1.0), (2, 3, 1.0)]).unwrap());
        let u = make_domain(&g, &[1, 2, 3]).unwrap();
        let r = grounded_dtn_spectrum(&u, &[0], 1).unwrap();
        assert!((r.sigma(1).finite().unwrap() - 0.75).abs() < 1e-15);
        assert!(r.sigma(2).is_infinite());
        // W = {0, 1, .., j}: series of 1.5 and (j − 1) unit edges, grounded at j + 1
        for j in 1..3 {
            let w: Vec<usize> = (0..=j).collect();
            let series = 1.0 / (1.0 / 1.5 + j as f64);
            let r = grounded_dtn_spectrum(&u, &w, 1).unwrap();
            assert!((r.sigma(1).finite().unwrap() - series / 2.0).abs() < 1e-14);
        }
        assert_eq!(grounded_dtn_spectrum(&u, &[1, 2], 1).unwrap(), GroundedDtn::Infinite);
    }

    #[test]
    fn hm_triangle() {
        let g = WeightedGraph::<f64>::from_edges(&[1.0; 3], &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let r = hm_dtn_spectrum(&g, &[0, 1], 2).unwrap();
        assert!(r.eigenvalues[0].abs() < 1e-14);
        assert!((r.eigenvalues[1] - 3.0).abs() < 1e-14);
        assert!(hm_dtn_spectrum(&g, &[0, 1, 2], 1).is_err());
        assert!(hm_dtn_spectrum(&g, &[], 1).is_err());
    }

    #[test]
    fn hm_matches_definition_on_path() {
        // Ω = all but the middle vertex: u at the middle is the weighted average
        let g = WeightedGraph::<f64>::from_edges(&[1.0, 2.0, 1.0], &[(0, 1, 1.0), (1, 2, 3.0)]).unwrap();
        let r = hm_dtn_spectrum(&g, &[0, 2], 2).unwrap();
        // S f(x) = −Δu(x) with u(1) = (f0 + 3 f2) / 4: series conductance 3/4
        assert!((r.eigenvalues[1] - 0.75 * 2.0).abs() < 1e-14);
    }
}
