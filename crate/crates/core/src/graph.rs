//! Weighted graphs, the `G_Ω` domain construction and the discrete
//! differential operators (energy, Laplacian, normal derivative).

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Undirected edge with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge<T> {
    pub u: usize,
    pub v: usize,
    pub w: T,
}

/// Simple undirected graph with positive vertex masses and edge weights.
///
/// Vertex ids are opaque strings; all numerics address vertices through the
/// dense index `0..n` assigned in insertion order.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph<T> {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    mass: Vec<T>,
    adj: Vec<Vec<(usize, T)>>,
    edges: Vec<Edge<T>>,
}

#[derive(Debug, Clone, Default)]
pub struct GraphBuilder<T> {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    mass: Vec<T>,
    edges: Vec<Edge<T>>,
}

impl<T: Real> GraphBuilder<T> {
    pub fn new() -> Self {
        Self { ids: Vec::new(), index: HashMap::new(), mass: Vec::new(), edges: Vec::new() }
    }

    pub fn add_vertex(&mut self, id: impl Into<String>, mass: T) -> Result<usize> {
        let id = id.into();
        if self.index.contains_key(&id) {
            return Err(Error::input(format!("duplicate vertex id `{id}`")));
        }
        if !(mass.is_finite() && mass > T::zero()) {
            return Err(Error::input(format!("vertex `{id}` has non-positive mass {mass}")));
        }
        let i = self.ids.len();
        self.index.insert(id.clone(), i);
        self.ids.push(id);
        self.mass.push(mass);
        Ok(i)
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn add_edge(&mut self, a: usize, b: usize, w: T) -> Result<()> {
        let n = self.ids.len();
        if a >= n || b >= n {
            return Err(Error::input(format!("edge endpoint out of range ({a}, {b})")));
        }
        if a == b {
            return Err(Error::input(format!("self-loop at `{}`", self.ids[a])));
        }
        if !(w.is_finite() && w > T::zero()) {
            return Err(Error::input(format!(
                "edge `{}`-`{}` has non-positive weight {w}",
                self.ids[a], self.ids[b]
            )));
        }
        let (u, v) = if a < b { (a, b) } else { (b, a) };
        self.edges.push(Edge { u, v, w });
        Ok(())
    }

    pub fn add_edge_by_id(&mut self, a: &str, b: &str, w: T) -> Result<()> {
        let ia = self.index_of(a).ok_or_else(|| Error::input(format!("undeclared vertex `{a}`")))?;
        let ib = self.index_of(b).ok_or_else(|| Error::input(format!("undeclared vertex `{b}`")))?;
        self.add_edge(ia, ib, w)
    }

    /// Validates simplicity and the absence of isolated vertices.
    pub fn build(mut self) -> Result<WeightedGraph<T>> {
        let n = self.ids.len();
        self.edges.sort_by_key(|e| (e.u, e.v));
        for pair in self.edges.windows(2) {
            if pair[0].u == pair[1].u && pair[0].v == pair[1].v {
                return Err(Error::input(format!(
                    "parallel edge `{}`-`{}`",
                    self.ids[pair[0].u], self.ids[pair[0].v]
                )));
            }
        }
        let mut adj = vec![Vec::new(); n];
        for e in &self.edges {
            adj[e.u].push((e.v, e.w));
            adj[e.v].push((e.u, e.w));
        }
        for (i, nb) in adj.iter_mut().enumerate() {
            if nb.is_empty() {
                return Err(Error::input(format!("vertex `{}` is isolated", self.ids[i])));
            }
            nb.sort_by_key(|&(j, _)| j);
        }
        Ok(WeightedGraph { ids: self.ids, index: self.index, mass: self.mass, adj, edges: self.edges })
    }
}

impl<T: Real> WeightedGraph<T> {
    /// Graph on `0..n` with string ids `"0".."n-1"` and the given masses.
    pub fn from_edges(masses: &[T], edges: &[(usize, usize, T)]) -> Result<Self> {
        let mut b = GraphBuilder::new();
        for (i, &m) in masses.iter().enumerate() {
            b.add_vertex(i.to_string(), m)?;
        }
        for &(u, v, w) in edges {
            b.add_edge(u, v, w)?;
        }
        b.build()
    }

    /// Path `0 – 1 – … – n` with unit masses and weights.
    pub fn unit_path(n: usize) -> Self {
        let masses = vec![T::one(); n + 1];
        let edges: Vec<_> = (0..n).map(|i| (i, i + 1, T::one())).collect();
        Self::from_edges(&masses, &edges).expect("path is a valid graph")
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn indices_of<S: AsRef<str>>(&self, ids: &[S]) -> Result<Vec<usize>> {
        ids.iter()
            .map(|s| {
                let s = s.as_ref();
                self.index_of(s).ok_or_else(|| Error::input(format!("unknown vertex `{s}`")))
            })
            .collect()
    }

    pub fn mass(&self, i: usize) -> T {
        self.mass[i]
    }

    pub fn masses(&self) -> &[T] {
        &self.mass
    }

    pub fn mass_of(&self, set: &[usize]) -> T {
        set.iter().map(|&i| self.mass[i]).sum()
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, T)] {
        &self.adj[i]
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    pub fn weight(&self, a: usize, b: usize) -> Option<T> {
        let nb = &self.adj[a];
        nb.binary_search_by_key(&b, |&(j, _)| j).ok().map(|p| nb[p].1)
    }

    /// Weighted degree `(1/m(x)) Σ_y w(x, y)`.
    pub fn degree(&self, i: usize) -> T {
        self.adj[i].iter().map(|&(_, w)| w).sum::<T>() / self.mass[i]
    }

    pub fn is_connected(&self) -> bool {
        let all: Vec<usize> = (0..self.n()).collect();
        self.is_connected_within(&all)
    }

    /// Whether the subgraph induced on `set` (all edges among `set`) is connected.
    pub fn is_connected_within(&self, set: &[usize]) -> bool {
        if set.is_empty() {
            return true;
        }
        let mut inside = vec![false; self.n()];
        for &v in set {
            inside[v] = true;
        }
        let mut seen = vec![false; self.n()];
        let mut queue = VecDeque::from([set[0]]);
        seen[set[0]] = true;
        let mut count = 1;
        while let Some(x) = queue.pop_front() {
            for &(y, _) in &self.adj[x] {
                if inside[y] && !seen[y] {
                    seen[y] = true;
                    count += 1;
                    queue.push_back(y);
                }
            }
        }
        count == set.len()
    }

    /// Same graph with every edge weight multiplied by `s`.
    pub fn scaled_weights(&self, s: T) -> Self {
        let mut g = self.clone();
        for e in &mut g.edges {
            e.w *= s;
        }
        for nb in &mut g.adj {
            for (_, w) in nb.iter_mut() {
                *w *= s;
            }
        }
        g
    }

    /// Same graph with masses replaced.
    pub fn with_masses(&self, masses: &[T]) -> Result<Self> {
        if masses.len() != self.n() || masses.iter().any(|&m| !(m.is_finite() && m > T::zero())) {
            return Err(Error::input("mass vector must be positive with one entry per vertex"));
        }
        let mut g = self.clone();
        g.mass = masses.to_vec();
        Ok(g)
    }

    fn check_set(&self, set: &[usize]) -> Result<()> {
        if let Some(&bad) = set.iter().find(|&&v| v >= self.n()) {
            return Err(Error::input(format!("vertex index {bad} out of range")));
        }
        Ok(())
    }
}

/// Real function on a finite vertex set (ambient indices).
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialField<T> {
    support: Vec<usize>,
    values: Vec<T>,
}

impl<T: Real> PotentialField<T> {
    pub fn new(support: Vec<usize>, values: Vec<T>) -> Result<Self> {
        if support.len() != values.len() {
            return Err(Error::input("field support and values differ in length"));
        }
        Ok(Self { support, values })
    }

    pub fn from_fn(support: &[usize], f: impl Fn(usize) -> T) -> Self {
        Self { support: support.to_vec(), values: support.iter().map(|&v| f(v)).collect() }
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn get(&self, v: usize) -> Option<T> {
        self.support.iter().position(|&s| s == v).map(|p| self.values[p])
    }

    fn lookup(&self) -> HashMap<usize, T> {
        self.support.iter().copied().zip(self.values.iter().copied()).collect()
    }
}

/// Vertices outside `interior` that are adjacent to it.
pub fn vertex_boundary<T: Real>(graph: &WeightedGraph<T>, interior: &[usize]) -> Result<Vec<usize>> {
    graph.check_set(interior)?;
    let mut inside = vec![false; graph.n()];
    for &v in interior {
        inside[v] = true;
    }
    let mut on_boundary = vec![false; graph.n()];
    for &x in interior {
        for &(y, _) in graph.neighbors(x) {
            if !inside[y] {
                on_boundary[y] = true;
            }
        }
    }
    Ok((0..graph.n()).filter(|&v| on_boundary[v]).collect())
}

/// A finite interior set `Ω` inside an ambient graph together with the
/// induced graph `G_Ω` on `Ω ∪ δΩ`, from which boundary–boundary edges are dropped.
///
/// Local (dense) indices on the closure put the interior first:
/// `0..n_interior` are interior vertices, the rest are boundary vertices.
#[derive(Debug, Clone)]
pub struct SteklovDomain<T> {
    graph: Arc<WeightedGraph<T>>,
    interior: Vec<usize>,
    boundary: Vec<usize>,
    closure: Vec<usize>,
    local: Vec<usize>,
    induced: WeightedGraph<T>,
}

const NOT_LOCAL: usize = usize::MAX;

/// Builds `G_Ω` for the given interior.
pub fn make_domain<T: Real>(graph: &Arc<WeightedGraph<T>>, interior: &[usize]) -> Result<SteklovDomain<T>> {
    SteklovDomain::new(Arc::clone(graph), interior)
}

impl<T: Real> SteklovDomain<T> {
    pub fn new(graph: Arc<WeightedGraph<T>>, interior: &[usize]) -> Result<Self> {
        if interior.is_empty() {
            return Err(Error::input("interior set is empty"));
        }
        let mut interior = interior.to_vec();
        interior.sort_unstable();
        interior.dedup();
        let boundary = vertex_boundary(&graph, &interior)?;
        let closure: Vec<usize> = interior.iter().chain(boundary.iter()).copied().collect();
        let mut local = vec![NOT_LOCAL; graph.n()];
        for (i, &v) in closure.iter().enumerate() {
            local[v] = i;
        }
        let ni = interior.len();
        let mut b = GraphBuilder::new();
        for &v in &closure {
            b.add_vertex(graph.id(v), graph.mass(v))?;
        }
        for &x in &interior {
            for &(y, w) in graph.neighbors(x) {
                let (lx, ly) = (local[x], local[y]);
                // each interior–interior edge once, each interior–boundary edge once
                if ly >= ni || lx < ly {
                    b.add_edge(lx, ly, w)?;
                }
            }
        }
        let induced = b.build().map_err(|e| Error::Domain(format!("induced graph invalid: {e}")))?;
        if !induced.is_connected() {
            return Err(Error::Domain("closure of the interior is not connected in G_Ω".into()));
        }
        Ok(Self { graph, interior, boundary, closure, local, induced })
    }

    pub fn graph(&self) -> &Arc<WeightedGraph<T>> {
        &self.graph
    }

    /// Interior vertices, ambient indices in ascending order.
    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    /// Closure in local order (interior, then boundary).
    pub fn closure(&self) -> &[usize] {
        &self.closure
    }

    /// `G_Ω`, whose vertex `i` is `closure()[i]`.
    pub fn induced(&self) -> &WeightedGraph<T> {
        &self.induced
    }

    pub fn n_interior(&self) -> usize {
        self.interior.len()
    }

    pub fn n_boundary(&self) -> usize {
        self.boundary.len()
    }

    pub fn n_closure(&self) -> usize {
        self.closure.len()
    }

    pub fn local_index(&self, ambient: usize) -> Option<usize> {
        self.local.get(ambient).copied().filter(|&l| l != NOT_LOCAL)
    }

    pub fn to_local(&self, set: &[usize]) -> Result<Vec<usize>> {
        set.iter()
            .map(|&v| {
                self.local_index(v).ok_or_else(|| {
                    Error::input(format!("vertex {} is outside the closure", self.describe(v)))
                })
            })
            .collect()
    }

    pub fn to_ambient(&self, local: &[usize]) -> Vec<usize> {
        local.iter().map(|&l| self.closure[l]).collect()
    }

    fn describe(&self, v: usize) -> String {
        if v < self.graph.n() {
            format!("`{}`", self.graph.id(v))
        } else {
            format!("#{v}")
        }
    }

    /// Vertex boundary of `set` taken inside `G_Ω` (ambient indices in, ambient out).
    pub fn relative_boundary(&self, set: &[usize]) -> Result<Vec<usize>> {
        let local = self.to_local(set)?;
        let lb = vertex_boundary(&self.induced, &local)?;
        Ok(self.to_ambient(&lb))
    }

    /// Closure field in local order.
    pub fn localize(&self, f: &PotentialField<T>) -> Result<Vec<T>> {
        let map = f.lookup();
        self.closure
            .iter()
            .map(|v| {
                map.get(v).copied().ok_or_else(|| {
                    Error::input(format!("field is undefined at closure vertex {}", self.describe(*v)))
                })
            })
            .collect()
    }

    /// Wraps a local closure vector as a field over the closure.
    pub fn field(&self, local_values: Vec<T>) -> PotentialField<T> {
        debug_assert_eq!(local_values.len(), self.closure.len());
        PotentialField { support: self.closure.clone(), values: local_values }
    }

    /// `E_Ω(f, g)` on local closure vectors.
    pub fn energy_local(&self, f: &[T], g: &[T]) -> T {
        self.induced.edges().iter().map(|e| e.w * (f[e.v] - f[e.u]) * (g[e.v] - g[e.u])).sum()
    }

    /// `Lf = -Δf` at every interior vertex (local order), using `G_Ω`.
    pub fn neg_laplacian_local(&self, f: &[T]) -> Vec<T> {
        (0..self.n_interior())
            .map(|x| {
                let s: T = self.induced.neighbors(x).iter().map(|&(y, w)| w * (f[x] - f[y])).sum();
                s / self.induced.mass(x)
            })
            .collect()
    }

    /// Outward normal derivative at every boundary vertex (boundary order).
    pub fn normal_derivative_local(&self, f: &[T]) -> Vec<T> {
        (self.n_interior()..self.n_closure())
            .map(|z| {
                // boundary vertices of G_Ω only neighbour interior vertices
                let s: T = self.induced.neighbors(z).iter().map(|&(x, w)| w * (f[z] - f[x])).sum();
                s / self.induced.mass(z)
            })
            .collect()
    }
}

/// `E_Ω(f, g) = Σ_{E(Ω, Ω̄)} w(x,y)(f(y)−f(x))(g(y)−g(x))`.
pub fn energy<T: Real>(domain: &SteklovDomain<T>, f: &PotentialField<T>, g: &PotentialField<T>) -> Result<T> {
    let fl = domain.localize(f)?;
    let gl = domain.localize(g)?;
    Ok(domain.energy_local(&fl, &gl))
}

/// `Δf(x) = (1/m(x)) Σ_{y∼x} w(x,y)(f(y) − f(x))` for every `x` in `at`.
pub fn laplacian_apply<T: Real>(
    graph: &WeightedGraph<T>,
    f: &PotentialField<T>,
    at: &[usize],
) -> Result<PotentialField<T>> {
    graph.check_set(at)?;
    let map = f.lookup();
    let value = |v: usize| {
        map.get(&v)
            .copied()
            .ok_or_else(|| Error::input(format!("field is undefined at `{}`", graph.id(v))))
    };
    let mut out = Vec::with_capacity(at.len());
    for &x in at {
        let fx = value(x)?;
        let mut s = T::zero();
        for &(y, w) in graph.neighbors(x) {
            s += w * (value(y)? - fx);
        }
        out.push(s / graph.mass(x));
    }
    PotentialField::new(at.to_vec(), out)
}

/// `∂f/∂n` on `δΩ`, summing over interior neighbours only.
pub fn normal_derivative<T: Real>(domain: &SteklovDomain<T>, f: &PotentialField<T>) -> Result<PotentialField<T>> {
    let fl = domain.localize(f)?;
    PotentialField::new(domain.boundary().to_vec(), domain.normal_derivative_local(&fl))
}

/// `|⟨Lf, g⟩_Ω + ⟨∂f/∂n, g⟩_{δΩ} − E_Ω(f, g)|`, which vanishes in exact arithmetic.
pub fn green_residual<T: Real>(domain: &SteklovDomain<T>, f: &PotentialField<T>, g: &PotentialField<T>) -> Result<T> {
    let fl = domain.localize(f)?;
    let gl = domain.localize(g)?;
    let ind = domain.induced();
    let ni = domain.n_interior();
    let interior: T = domain
        .neg_laplacian_local(&fl)
        .iter()
        .enumerate()
        .map(|(x, &lf)| lf * gl[x] * ind.mass(x))
        .sum();
    let flux: T = domain
        .normal_derivative_local(&fl)
        .iter()
        .enumerate()
        .map(|(j, &dn)| dn * gl[ni + j] * ind.mass(ni + j))
        .sum();
    Ok((interior + flux - domain.energy_local(&fl, &gl)).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Arc<WeightedGraph<f64>> {
        Arc::new(WeightedGraph::unit_path(n))
    }

    fn cycle4() -> WeightedGraph<f64> {
        let mut b = GraphBuilder::new();
        for id in ["a", "b", "c", "d"] {
            b.add_vertex(id, 1.0).unwrap();
        }
        for (x, y) in [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")] {
            b.add_edge_by_id(x, y, 1.0).unwrap();
        }
        b.build().unwrap()
    }

    #[test]
    fn boundary_of_path_interior() {
        let g = path(4);
        assert_eq!(vertex_boundary(&g, &[1, 2, 3]).unwrap(), vec![0, 4]);
        assert!(vertex_boundary(&g, &[0, 1, 2, 3, 4]).unwrap().is_empty());
        assert!(vertex_boundary(&g, &[7]).is_err());
    }

    #[test]
    fn boundary_of_cycle_vertex() {
        let g = cycle4();
        let a = g.index_of("a").unwrap();
        let got: Vec<&str> = vertex_boundary(&g, &[a]).unwrap().iter().map(|&v| g.id(v)).collect();
        assert_eq!(got, vec!["b", "d"]);
    }

    #[test]
    fn triangle_domain_drops_boundary_edge() {
        let g = Arc::new(WeightedGraph::from_edges(&[1.0; 3], &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap());
        let d = make_domain(&g, &[0]).unwrap();
        assert_eq!(d.boundary(), &[1, 2]);
        assert_eq!(d.induced().edges().len(), 2);
        assert!(d.induced().weight(1, 2).is_none());
    }

    #[test]
    fn builder_rejects_bad_graphs() {
        let mut b = GraphBuilder::<f64>::new();
        b.add_vertex("a", 1.0).unwrap();
        assert!(b.add_vertex("a", 1.0).is_err());
        assert!(b.add_vertex("z", 0.0).is_err());
        b.add_vertex("b", 1.0).unwrap();
        assert!(b.add_edge(0, 0, 1.0).is_err());
        assert!(b.add_edge(0, 1, -1.0).is_err());
        b.add_edge(0, 1, 1.0).unwrap();
        b.add_edge(1, 0, 2.0).unwrap();
        assert!(b.clone().build().is_err());

        let mut lonely = GraphBuilder::<f64>::new();
        lonely.add_vertex("a", 1.0).unwrap();
        lonely.add_vertex("b", 1.0).unwrap();
        lonely.add_vertex("c", 1.0).unwrap();
        lonely.add_edge(0, 1, 1.0).unwrap();
        assert!(lonely.build().is_err());
    }

    #[test]
    fn empty_and_disconnected_domains_are_rejected() {
        let g = path(4);
        assert!(matches!(make_domain(&g, &[]), Err(Error::Input(_))));
        // {1} and {3} share the boundary vertex 2 only through a removed edge? no:
        // 1 and 3 are both adjacent to 2, so the closure {0,1,2,3,4} is connected.
        assert!(make_domain(&g, &[1, 3]).is_ok());
        // a star whose two interior leaves are joined only via boundary–boundary edges
        let g = Arc::new(
            WeightedGraph::from_edges(&[1.0; 4], &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap(),
        );
        assert!(matches!(make_domain(&g, &[0, 3]), Err(Error::Domain(_))));
    }

    #[test]
    fn rebuilding_a_domain_is_idempotent() {
        let g = Arc::new(
            WeightedGraph::from_edges(
                &[1.0, 2.0, 0.5, 1.0, 3.0],
                &[(0, 1, 1.0), (1, 2, 2.0), (2, 3, 0.5), (3, 4, 1.0), (1, 3, 1.5), (0, 4, 0.7)],
            )
            .unwrap(),
        );
        let a = make_domain(&g, &[1, 2]).unwrap();
        let b = make_domain(&g, &[2, 1]).unwrap();
        assert_eq!(a.boundary(), b.boundary());
        assert_eq!(a.induced(), b.induced());
        for e in a.induced().edges() {
            assert!(e.u < a.n_interior() || e.v < a.n_interior());
        }
    }

    #[test]
    fn energy_examples() {
        let g = Arc::new(WeightedGraph::from_edges(&[1.0, 1.0], &[(0, 1, 1.0)]).unwrap());
        let d = make_domain(&g, &[0, 1]).unwrap();
        let f = PotentialField::new(vec![0, 1], vec![1.0, 0.0]).unwrap();
        assert_eq!(energy(&d, &f, &f).unwrap(), 1.0);

        let d = make_domain(&path(2), &[1]).unwrap();
        let f = PotentialField::new(vec![0, 1, 2], vec![0.0, 0.5, 1.0]).unwrap();
        assert!((energy(&d, &f, &f).unwrap() - 0.5).abs() < 1e-15);
        let c = PotentialField::new(vec![0, 1, 2], vec![3.0; 3]).unwrap();
        assert_eq!(energy(&d, &c, &c).unwrap(), 0.0);
        let partial = PotentialField::new(vec![0, 1], vec![0.0, 1.0]).unwrap();
        assert!(energy(&d, &partial, &partial).is_err());
    }

    #[test]
    fn laplacian_examples() {
        let g = path(2);
        let f = PotentialField::new(vec![0, 1, 2], vec![0.0, 0.0, 1.0]).unwrap();
        assert_eq!(laplacian_apply(&g, &f, &[1]).unwrap().values(), &[1.0]);
        let missing = PotentialField::new(vec![1, 2], vec![0.0, 1.0]).unwrap();
        assert!(laplacian_apply(&g, &missing, &[1]).is_err());

        // star: centre 0 with mass 2, three unit leaves
        let star = WeightedGraph::from_edges(&[2.0, 1.0, 1.0, 1.0], &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]).unwrap();
        let f = PotentialField::new(vec![0, 1, 2, 3], vec![0.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(laplacian_apply(&star, &f, &[0]).unwrap().values(), &[1.5]);
        let c = PotentialField::new(vec![0, 1, 2, 3], vec![4.0; 4]).unwrap();
        assert!(laplacian_apply(&star, &c, &[0, 1, 2, 3]).unwrap().values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn normal_derivative_examples() {
        let d = make_domain(&path(2), &[1]).unwrap();
        let f = PotentialField::new(vec![0, 1, 2], vec![0.0, 1.0, 0.0]).unwrap();
        let dn = normal_derivative(&d, &f).unwrap();
        assert_eq!(dn.support(), &[0, 2]);
        assert_eq!(dn.values(), &[-1.0, -1.0]);

        let d = make_domain(&path(4), &[1, 2, 3]).unwrap();
        let f = PotentialField::from_fn(&[0, 1, 2, 3, 4], |v| v as f64);
        assert_eq!(normal_derivative(&d, &f).unwrap().values(), &[-1.0, 1.0]);
    }

    #[test]
    fn green_identity_exact_case() {
        let d = make_domain(&path(2), &[1]).unwrap();
        let f = PotentialField::new(vec![0, 1, 2], vec![0.0, 1.0, 0.0]).unwrap();
        let g = PotentialField::new(vec![0, 1, 2], vec![1.0; 3]).unwrap();
        assert_eq!(green_residual(&d, &f, &g).unwrap(), 0.0);
        assert_eq!(green_residual(&d, &g, &g).unwrap(), 0.0);
    }

    #[test]
    fn generic_over_f32() {
        let g = Arc::new(WeightedGraph::<f32>::unit_path(4));
        let d = make_domain(&g, &[1, 2, 3]).unwrap();
        let f = PotentialField::from_fn(d.closure(), |v| v as f32 * 0.5);
        let e = energy(&d, &f, &f).unwrap();
        assert!((e - 1.0).abs() < 1e-6);
    }
}
