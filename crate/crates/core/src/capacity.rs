//! Equilibrium potentials, capacities, exhaustion sequences and the
//! co-area functional.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{PotentialField, SteklovDomain, WeightedGraph};
use crate::linalg::{factor_block, positions, Cholesky, SymMatrix};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult<T> {
    pub value: T,
    /// Minimizer over the closure: 1 on the source, 0 on the sink.
    pub potential: PotentialField<T>,
    pub source: Vec<usize>,
    pub sink: Vec<usize>,
}

fn sorted_unique(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

fn check_pair<T: Real>(domain: &SteklovDomain<T>, a: &[usize], b: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::input("source and sink must be nonempty"));
    }
    let la = sorted_unique(&domain.to_local(a)?);
    let lb = sorted_unique(&domain.to_local(b)?);
    if la.iter().any(|x| lb.binary_search(x).is_ok()) {
        return Err(Error::Infeasible("source and sink overlap".into()));
    }
    Ok((la, lb))
}

/// Solves for the potential on local closure indices; returns (energy, f).
pub(crate) fn potential_local<T: Real>(domain: &SteklovDomain<T>, a: &[usize], b: &[usize]) -> Result<(T, Vec<T>)> {
    let g = domain.induced();
    let n = g.n();
    let mut f = vec![T::zero(); n];
    let mut fixed = vec![false; n];
    for &x in a {
        f[x] = T::one();
        fixed[x] = true;
    }
    for &x in b {
        fixed[x] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&v| !fixed[v]).collect();
    if !free.is_empty() {
        let factor = factor_block(g, &free)?;
        let rhs: Vec<T> = free
            .iter()
            .map(|&v| g.neighbors(v).iter().filter(|&&(u, _)| fixed[u]).map(|&(u, w)| w * f[u]).sum())
            .collect();
        for (&v, x) in free.iter().zip(factor.solve(&rhs)) {
            // clamp rounding excursions; the exact solution obeys the maximum principle
            f[v] = x.max(T::zero()).min(T::one());
        }
    }
    Ok((domain.energy_local(&f, &f), f))
}

/// The capacity minimizer: 1 on `a`, 0 on `b`, harmonic at free interior
/// vertices and with vanishing normal derivative at free boundary vertices.
pub fn equilibrium_potential<T: Real>(domain: &SteklovDomain<T>, a: &[usize], b: &[usize]) -> Result<PotentialField<T>> {
    let (la, lb) = check_pair(domain, a, b)?;
    let (_, f) = potential_local(domain, &la, &lb)?;
    Ok(domain.field(f))
}

/// `Cap_Ω(A, B)`.
pub fn cap<T: Real>(domain: &SteklovDomain<T>, a: &[usize], b: &[usize]) -> Result<CapacityResult<T>> {
    let (la, lb) = check_pair(domain, a, b)?;
    let (value, f) = potential_local(domain, &la, &lb)?;
    Ok(CapacityResult { value, potential: domain.field(f), source: sorted_unique(a), sink: sorted_unique(b) })
}

/// `Cap_Ω(A) = Cap_Ω(A, δΩ)`.
pub fn cap_to_boundary<T: Real>(domain: &SteklovDomain<T>, a: &[usize]) -> Result<CapacityResult<T>> {
    if domain.boundary().is_empty() {
        return Err(Error::input("domain has empty boundary"));
    }
    if a.iter().any(|v| domain.boundary().binary_search(v).is_ok()) {
        return Err(Error::Infeasible("source meets the boundary".into()));
    }
    cap(domain, a, domain.boundary())
}

/// One truncation of an exhaustion: a finite domain and the sink for that step.
/// Vertex indices of the source must mean the same vertex in every step.
#[derive(Debug, Clone)]
pub struct ExhaustionStep<T> {
    pub index: usize,
    pub domain: SteklovDomain<T>,
    pub sink: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacitySequence<T> {
    pub indices: Vec<usize>,
    pub values: Vec<T>,
    pub limit_estimate: T,
    /// Last first difference, zero for a single step.
    pub error_bar: T,
    pub monotone: bool,
}

/// Non-increase check with a relative rounding allowance.
pub(crate) fn non_increasing<T: Real>(values: &[T]) -> bool {
    values.windows(2).all(|w| w[1] <= w[0] + T::tight_tol() * w[0].abs().max(T::one()))
}

pub(crate) fn sequence_summary<T: Real>(indices: Vec<usize>, values: Vec<T>) -> CapacitySequence<T> {
    let n = values.len();
    let limit_estimate = values.last().copied().unwrap_or_else(T::zero);
    let error_bar = if n >= 2 { (values[n - 2] - values[n - 1]).abs() } else { T::zero() };
    let monotone = non_increasing(&values);
    CapacitySequence { indices, values, limit_estimate, error_bar, monotone }
}

/// `Cap(A, sink_i)` along an exhaustion; steps are evaluated in parallel.
pub fn cap_exhaustion<T: Real>(steps: &[ExhaustionStep<T>], a: &[usize]) -> Result<CapacitySequence<T>> {
    if steps.is_empty() {
        return Err(Error::input("exhaustion has no steps"));
    }
    let values = steps
        .par_iter()
        .map(|s| {
            if a.iter().any(|&v| s.domain.local_index(v).is_none()) {
                return Err(Error::input(format!("source escapes truncation {}", s.index)));
            }
            cap(&s.domain, a, &s.sink).map(|r| r.value)
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(sequence_summary(steps.iter().map(|s| s.index).collect(), values))
}

/// `∫₀^∞ t · Cap_Ω({f > t}, {f ≤ 0}) dt`, evaluated exactly: the integrand's
/// capacity factor is constant between consecutive positive values of `f`.
/// A capacity against the empty set is zero, so a positive `f` gives zero.
pub fn coarea_value<T: Real>(domain: &SteklovDomain<T>, f: &PotentialField<T>) -> Result<T> {
    let fl = domain.localize(f)?;
    let mut levels: Vec<T> = fl.iter().copied().filter(|&x| x > T::zero()).collect();
    if levels.is_empty() {
        return Ok(T::zero());
    }
    let sink: Vec<usize> = (0..fl.len()).filter(|&i| fl[i] <= T::zero()).collect();
    if sink.is_empty() {
        return Ok(T::zero());
    }
    levels.sort_by(|a, b| a.partial_cmp(b).expect("finite levels"));
    levels.dedup();
    let half = T::lit(0.5);
    let mut total = T::zero();
    let mut prev = T::zero();
    for &t in &levels {
        let source: Vec<usize> = (0..fl.len()).filter(|&i| fl[i] > prev).collect();
        let (c, _) = potential_local(domain, &source, &sink)?;
        total += c * (t * t - prev * prev) * half;
        prev = t;
    }
    Ok(total)
}

/// Kron-reduced network on a small universe of candidate vertices: every
/// vertex outside the universe is either eliminated (free in every candidate)
/// or grounded, so each capacity query is a dense solve on the universe.
#[derive(Debug, Clone)]
pub struct CapacityNetwork<T> {
    k: SymMatrix<T>,
    mass: Vec<T>,
    vertices: Vec<usize>,
}

impl<T: Real> CapacityNetwork<T> {
    /// `vertices` are ambient indices labelling the rows of `k`.
    pub fn new(k: SymMatrix<T>, mass: Vec<T>, vertices: Vec<usize>) -> Result<Self> {
        if k.dim() != mass.len() || k.dim() != vertices.len() {
            return Err(Error::input("network dimensions disagree"));
        }
        Ok(Self { k, mass, vertices })
    }

    /// Universe = the closure subset `universe` (local indices), eliminating
    /// `eliminate` and grounding every other closure vertex.
    pub fn reduce(domain: &SteklovDomain<T>, universe: &[usize], eliminate: &[usize]) -> Result<Self> {
        let g = domain.induced();
        let k = crate::linalg::grounded_schur(g, universe, eliminate)?;
        let mass = universe.iter().map(|&v| g.mass(v)).collect();
        Self::new(k, mass, domain.to_ambient(universe))
    }

    pub fn size(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn matrix(&self) -> &SymMatrix<T> {
        &self.k
    }

    pub fn mass_of(&self, mask: u64) -> T {
        iter_bits(mask).map(|i| self.mass[i]).sum()
    }

    pub fn mass(&self, i: usize) -> T {
        self.mass[i]
    }

    /// Capacity between the position masks `a` and `b` (`b` may be empty when
    /// the network is grounded). Masks must be disjoint.
    pub fn cap_mask(&self, a: u64, b: u64) -> Result<T> {
        debug_assert_eq!(a & b, 0);
        let a: Vec<usize> = iter_bits(a).collect();
        let b: Vec<usize> = iter_bits(b).collect();
        self.cap_sets(&a, &b)
    }

    /// As `cap_mask`, for position lists of any size.
    pub fn cap_sets(&self, a: &[usize], b: &[usize]) -> Result<T> {
        let n = self.size();
        let mut fixed = vec![false; n];
        let mut f = vec![T::zero(); n];
        for &i in a {
            f[i] = T::one();
            fixed[i] = true;
        }
        for &i in b {
            if fixed[i] {
                return Err(Error::Infeasible("source and sink overlap".into()));
            }
            fixed[i] = true;
        }
        let free: Vec<usize> = (0..n).filter(|&i| !fixed[i]).collect();
        if !free.is_empty() {
            let kff = self.k.principal(&free);
            let rhs: Vec<T> = free.iter().map(|&i| -a.iter().map(|&j| self.k.get(i, j)).sum::<T>()).collect();
            let x = Cholesky::factor(&kff)?.solve(&rhs);
            for (&i, v) in free.iter().zip(x) {
                f[i] = v;
            }
        }
        let kf = self.k.matvec(&f);
        Ok(f.iter().zip(&kf).map(|(&a, &b)| a * b).sum::<T>().max(T::zero()))
    }

    /// Capacity of `a` against the grounded exterior, for every singleton at once:
    /// `Cap({x}) = 1 / (K⁻¹)_xx`.
    pub fn singleton_caps(&self) -> Result<Vec<T>> {
        let chol = Cholesky::factor(&self.k)?;
        Ok((0..self.size())
            .map(|i| {
                let mut e = vec![T::zero(); self.size()];
                e[i] = T::one();
                T::one() / chol.solve(&e)[i]
            })
            .collect())
    }
}

pub(crate) fn iter_bits(mask: u64) -> impl Iterator<Item = usize> {
    let mut m = mask;
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

/// Capacity in the whole graph of `a` against every vertex outside `set`
/// (`a ⊆ set`, ambient indices). Zero when nothing lies outside `set`.
pub fn cap_grounded<T: Real>(graph: &WeightedGraph<T>, set: &[usize], a: &[usize]) -> Result<T> {
    let n = graph.n();
    let inside = positions(n, set);
    if set.len() >= n {
        return Ok(T::zero());
    }
    let mut f = vec![T::zero(); n];
    let mut is_source = vec![false; n];
    for &v in a {
        if v >= n || inside[v] == usize::MAX {
            return Err(Error::input(format!("source vertex {v} lies outside the set")));
        }
        f[v] = T::one();
        is_source[v] = true;
    }
    let free: Vec<usize> = set.iter().copied().filter(|&v| !is_source[v]).collect();
    if !free.is_empty() {
        let factor = factor_block(graph, &free)?;
        let rhs: Vec<T> = free
            .iter()
            .map(|&v| graph.neighbors(v).iter().filter(|&&(u, _)| is_source[u]).map(|&(_, w)| w).sum())
            .collect();
        for (&v, x) in free.iter().zip(factor.solve(&rhs)) {
            f[v] = x.max(T::zero()).min(T::one());
        }
    }
    let mut e = T::zero();
    for &x in set {
        for &(y, w) in graph.neighbors(x) {
            if inside[y] == usize::MAX {
                e += w * f[x] * f[x];
            } else if y > x {
                let d = f[x] - f[y];
                e += w * d * d;
            }
        }
    }
    Ok(e)
}

/// Grounded capacities `Cap({x})` against the exterior of `set`, for many
/// singletons sharing one factor: `1 / (K⁻¹)_xx`. Aligned with `sources`.
pub fn grounded_singleton_caps<T: Real>(graph: &WeightedGraph<T>, set: &[usize], sources: &[usize]) -> Result<Vec<T>> {
    let factor = factor_block(graph, set)?;
    let pos = positions(graph.n(), set);
    sources
        .iter()
        .map(|&s| {
            let p = if s < graph.n() { pos[s] } else { usize::MAX };
            if p == usize::MAX {
                return Err(Error::input("singleton outside the factored block"));
            }
            let mut e = vec![T::zero(); set.len()];
            e[p] = T::one();
            Ok(T::one() / factor.solve(&e)[p])
        })
        .collect()
}
