//! Truncations of the model infinite graphs: path segments, the ten-vertex
//! tree, the binary tree hanging off a leaf, `ℤ^N` boxes and the `ℤ^N`
//! half-space.
//!
//! Vertex indices are prefix-stable: vertex `j` of step `i` is vertex `j` of
//! every later step, so sets computed at one step can be reused at the next.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{GraphBuilder, PotentialField, SteklovDomain, WeightedGraph};
use crate::isocap::TruncationStep;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    /// Path `0..n` with interior `1..n−1`; the step is `n`.
    PathSegment,
    /// The fixed ten-vertex tree with four interior vertices.
    T3,
    /// Binary tree below the leaf `x₁`; step `i` has `W_i = {x₁..x_{2^i}}`.
    BinaryTree,
    /// `Q_r ⊂ ℤ^N` with interior `Q_{r−1}`; the step is `r`.
    LatticeBox { dim: usize },
    /// `ℤ^N ∩ {x_N ≥ 0}` with boundary `{x_N = 0}`; step `r` has `W_r = Q_r ∩ Ū`.
    HalfSpace { dim: usize },
}

/// Vertex masses as a function of a vertex's level: `‖x‖∞` on lattices,
/// depth on trees, position on paths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MassRule {
    Unit,
    Constant(f64),
    /// `1` up to level `window`, then halving with every further level.
    GeometricDecay { window: usize },
}

impl MassRule {
    fn mass<T: Real>(&self, level: usize) -> T {
        match *self {
            MassRule::Unit => T::one(),
            MassRule::Constant(c) => T::lit(c),
            MassRule::GeometricDecay { window } => T::lit(0.5).powi(level.saturating_sub(window) as i32),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightRule {
    Unit,
    Constant(f64),
}

impl WeightRule {
    fn weight<T: Real>(&self) -> T {
        match *self {
            WeightRule::Unit => T::one(),
            WeightRule::Constant(c) => T::lit(c),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub mass: MassRule,
    pub weight: WeightRule,
    /// Largest step `generate` accepts.
    pub max_step: usize,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind) -> Self {
        let max_step = match kind {
            FamilyKind::PathSegment => 1000,
            FamilyKind::T3 => 1,
            FamilyKind::BinaryTree => 12,
            FamilyKind::LatticeBox { dim: 1 } => 1000,
            FamilyKind::LatticeBox { dim: 2 } => 60,
            FamilyKind::LatticeBox { .. } => 10,
            FamilyKind::HalfSpace { .. } => 30,
        };
        Self { kind, mass: MassRule::Unit, weight: WeightRule::Unit, max_step }
    }

    pub fn with_mass(mut self, mass: MassRule) -> Self {
        self.mass = mass;
        self
    }

    pub fn with_weight(mut self, weight: WeightRule) -> Self {
        self.weight = weight;
        self
    }

    pub fn with_max_step(mut self, max_step: usize) -> Self {
        self.max_step = max_step;
        self
    }

    pub fn min_step(&self) -> usize {
        match self.kind {
            FamilyKind::PathSegment => 2,
            _ => 1,
        }
    }

    fn validate(&self) -> Result<()> {
        match self.kind {
            FamilyKind::LatticeBox { dim } | FamilyKind::HalfSpace { dim } if dim == 0 => {
                return Err(Error::input("lattice dimension must be at least 1"));
            }
            FamilyKind::HalfSpace { dim } if dim < 2 => {
                return Err(Error::input("half-space needs dimension at least 2"));
            }
            _ => {}
        }
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if let MassRule::Constant(c) = self.mass {
            if !positive(c) {
                return Err(Error::input("mass constant must be positive"));
            }
        }
        if let WeightRule::Constant(c) = self.weight {
            if !positive(c) {
                return Err(Error::input("weight constant must be positive"));
            }
        }
        Ok(())
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FamilyKind::PathSegment => f.write_str("path_segment")?,
            FamilyKind::T3 => f.write_str("t3")?,
            FamilyKind::BinaryTree => f.write_str("binary_tree")?,
            FamilyKind::LatticeBox { dim } => write!(f, "lattice_box:{dim}")?,
            FamilyKind::HalfSpace { dim } => write!(f, "half_space:{dim}")?,
        }
        match self.mass {
            MassRule::Unit => {}
            MassRule::Constant(c) => write!(f, "@mass={c}")?,
            MassRule::GeometricDecay { window } => write!(f, "@decay={window}")?,
        }
        if let WeightRule::Constant(c) = self.weight {
            write!(f, "@weight={c}")?;
        }
        Ok(())
    }
}

/// `kind[:dim][@mass=c][@decay=window][@weight=c]`, e.g. `lattice_box:3@decay=0`.
impl FromStr for FamilySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split('@');
        let head = parts.next().unwrap_or_default();
        let (name, dim) = match head.split_once(':') {
            Some((n, d)) => {
                let d: usize = d.parse().map_err(|_| Error::input(format!("bad dimension `{d}`")))?;
                (n, Some(d))
            }
            None => (head, None),
        };
        let need_dim = || dim.ok_or_else(|| Error::input(format!("family `{name}` needs a dimension, e.g. `{name}:3`")));
        let kind = match name {
            "path_segment" | "path" => FamilyKind::PathSegment,
            "t3" => FamilyKind::T3,
            "binary_tree" => FamilyKind::BinaryTree,
            "lattice_box" => FamilyKind::LatticeBox { dim: need_dim()? },
            "half_space" => FamilyKind::HalfSpace { dim: need_dim()? },
            other => return Err(Error::input(format!("unknown family `{other}`"))),
        };
        if dim.is_some() && !matches!(kind, FamilyKind::LatticeBox { .. } | FamilyKind::HalfSpace { .. }) {
            return Err(Error::input(format!("family `{name}` takes no dimension")));
        }
        let mut spec = FamilySpec::new(kind);
        for opt in parts {
            let (key, val) = opt.split_once('=').ok_or_else(|| Error::input(format!("bad family option `{opt}`")))?;
            let num = || val.parse::<f64>().map_err(|_| Error::input(format!("bad value `{val}` for `{key}`")));
            match key {
                "mass" => spec.mass = MassRule::Constant(num()?),
                "weight" => spec.weight = WeightRule::Constant(num()?),
                "decay" => {
                    let window = val.parse().map_err(|_| Error::input(format!("bad decay window `{val}`")))?;
                    spec.mass = MassRule::GeometricDecay { window };
                }
                other => return Err(Error::input(format!("unknown family option `{other}`"))),
            }
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// Points of `Q_r = {‖x‖∞ ≤ r}` in `ℤ^dim` (optionally only `x_dim ≥ 0`),
/// sorted by `(‖x‖∞, lexicographic)`.
pub fn lattice_points(dim: usize, r: usize, half: bool) -> Vec<Vec<i64>> {
    let r = r as i64;
    let lo_last = if half { 0 } else { -r };
    let mut pts = Vec::new();
    let mut x = vec![-r; dim];
    x[dim - 1] = lo_last;
    loop {
        pts.push(x.clone());
        let mut i = dim;
        loop {
            if i == 0 {
                pts.sort_by(|a, b| norm_inf(a).cmp(&norm_inf(b)).then_with(|| a.cmp(b)));
                return pts;
            }
            i -= 1;
            if x[i] < r {
                x[i] += 1;
                break;
            }
            x[i] = if i == dim - 1 { lo_last } else { -r };
        }
    }
}

pub fn norm_inf(x: &[i64]) -> usize {
    x.iter().map(|c| c.unsigned_abs() as usize).max().unwrap_or(0)
}

fn point_id(x: &[i64]) -> String {
    x.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
}

fn lattice_graph<T: Real>(spec: &FamilySpec, pts: &[Vec<i64>]) -> Result<WeightedGraph<T>> {
    let index: HashMap<&[i64], usize> = pts.iter().enumerate().map(|(i, p)| (p.as_slice(), i)).collect();
    let mut b = GraphBuilder::new();
    for p in pts {
        b.add_vertex(point_id(p), spec.mass.mass(norm_inf(p)))?;
    }
    let w = spec.weight.weight();
    let mut q = Vec::new();
    for (i, p) in pts.iter().enumerate() {
        for axis in 0..p.len() {
            q.clone_from(p);
            q[axis] += 1;
            if let Some(&j) = index.get(q.as_slice()) {
                b.add_edge(i, j, w)?;
            }
        }
    }
    b.build()
}

fn path_graph<T: Real>(spec: &FamilySpec, n: usize) -> Result<WeightedGraph<T>> {
    let mut b = GraphBuilder::new();
    for i in 0..=n {
        b.add_vertex(i.to_string(), spec.mass.mass(i))?;
    }
    for i in 0..n {
        b.add_edge(i, i + 1, spec.weight.weight())?;
    }
    b.build()
}

const T3_EDGES: [(usize, usize); 9] = [(1, 2), (1, 3), (1, 4), (2, 5), (2, 6), (3, 7), (3, 8), (4, 9), (4, 10)];

fn t3_graph<T: Real>(spec: &FamilySpec) -> Result<WeightedGraph<T>> {
    let mut b = GraphBuilder::new();
    let depth = [0, 1, 1, 1, 2, 2, 2, 2, 2, 2];
    for (j, d) in (1..=10).zip(depth) {
        b.add_vertex(format!("x{j}"), spec.mass.mass(d))?;
    }
    for (u, v) in T3_EDGES {
        b.add_edge(u - 1, v - 1, spec.weight.weight())?;
    }
    b.build()
}

/// `x₁ – x₂`, and `x_j` has children `x_{2j−1}, x_{2j}` for `j ≥ 2`; vertices
/// `x₁..x_last`.
fn binary_tree_graph<T: Real>(spec: &FamilySpec, last: usize) -> Result<WeightedGraph<T>> {
    let mut b = GraphBuilder::new();
    for j in 1..=last {
        let depth = if j == 1 { 0 } else { (usize::BITS - (j - 1).leading_zeros()) as usize };
        b.add_vertex(format!("x{j}"), spec.mass.mass(depth))?;
    }
    b.add_edge(0, 1, spec.weight.weight())?;
    for j in 3..=last {
        let parent = j.div_ceil(2);
        b.add_edge(parent - 1, j - 1, spec.weight.weight())?;
    }
    b.build()
}

/// Step `step` of the family: the truncated ambient domain and the set `W`.
///
/// For Dirichlet-type families (paths, boxes) the ambient interior is `W`
/// itself; for Steklov-type families (binary tree, half-space) the ambient is
/// `U` truncated one layer beyond `W`, so that `W ∪ δ_U W` lies inside it.
pub fn generate<T: Real>(spec: &FamilySpec, step: usize) -> Result<TruncationStep<T>> {
    spec.validate()?;
    if step < spec.min_step() || step > spec.max_step {
        return Err(Error::input(format!(
            "step {step} outside the configured range {}..={} for {spec}",
            spec.min_step(),
            spec.max_step
        )));
    }
    let (graph, interior, set): (WeightedGraph<T>, Vec<usize>, Vec<usize>) = match spec.kind {
        FamilyKind::PathSegment => (path_graph(spec, step)?, (1..step).collect(), (1..step).collect()),
        FamilyKind::T3 => (t3_graph(spec)?, vec![0, 1, 2, 3], vec![0, 1, 2, 3]),
        FamilyKind::BinaryTree => {
            let last = 1usize << (step + 1);
            (binary_tree_graph(spec, last)?, (1..last).collect(), (0..1 << step).collect())
        }
        FamilyKind::LatticeBox { dim } => {
            let pts = lattice_points(dim, step, false);
            let inner = pts.iter().take_while(|p| norm_inf(p) < step).count();
            (lattice_graph(spec, &pts)?, (0..inner).collect(), (0..inner).collect())
        }
        FamilyKind::HalfSpace { dim } => {
            let pts = lattice_points(dim, step + 1, true);
            let interior: Vec<usize> = (0..pts.len()).filter(|&i| pts[i][dim - 1] > 0).collect();
            let set: Vec<usize> = (0..pts.len()).filter(|&i| norm_inf(&pts[i]) <= step).collect();
            (lattice_graph(spec, &pts)?, interior, set)
        }
    };
    let ambient = SteklovDomain::new(Arc::new(graph), &interior)?;
    Ok(TruncationStep { index: step, ambient, set })
}

/// Steps `range` of the family.
pub fn generate_range<T: Real>(spec: &FamilySpec, range: std::ops::RangeInclusive<usize>) -> Result<Vec<TruncationStep<T>>> {
    range.map(|i| generate(spec, i)).collect()
}

/// Sink for the capacity column of a family at one step: `δ_U W` for
/// Steklov-type families, the outer boundary for Dirichlet-type ones.
pub fn step_sink<T: Real>(step: &TruncationStep<T>) -> Result<Vec<usize>> {
    step.ambient.relative_boundary(&step.set)
}

/// Field on `Q_R ∩ Ū` of the half-space: `1` on `Q_{r₀}`, `(r₀/r)^{N−2}` on
/// `S_r`, shifted and rescaled to vanish on `S_R` so it is finitely supported.
#[derive(Debug, Clone)]
pub struct HalfSpaceField<T> {
    pub domain: SteklovDomain<T>,
    pub field: PotentialField<T>,
    /// `Q_{r₀} ∩ δU`.
    pub source: Vec<usize>,
}

pub fn half_space_test_field<T: Real>(dim: usize, r0: usize, radius: usize) -> Result<HalfSpaceField<T>> {
    if dim < 3 {
        return Err(Error::input("the half-space test field needs dimension at least 3"));
    }
    if r0 == 0 || r0 >= radius {
        return Err(Error::input("need 0 < r0 < R"));
    }
    let spec = FamilySpec::new(FamilyKind::HalfSpace { dim });
    let pts = lattice_points(dim, radius, true);
    let graph = Arc::new(lattice_graph::<T>(&spec, &pts)?);
    let interior: Vec<usize> = (0..pts.len()).filter(|&i| pts[i][dim - 1] > 0).collect();
    let domain = SteklovDomain::new(graph, &interior)?;
    let exponent = (dim - 2) as i32;
    let raw = |r: usize| if r <= r0 { T::one() } else { (T::of_usize(r0) / T::of_usize(r)).powi(exponent) };
    let floor = raw(radius);
    let scale = T::one() - floor;
    let values: Vec<T> = pts.iter().map(|p| ((raw(norm_inf(p)) - floor) / scale).max(T::zero())).collect();
    let field = PotentialField::new((0..pts.len()).collect(), values)?;
    let source = (0..pts.len()).filter(|&i| pts[i][dim - 1] == 0 && norm_inf(&pts[i]) <= r0).collect();
    Ok(HalfSpaceField { domain, field, source })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfSpaceBound<T> {
    pub r0: usize,
    pub radius: usize,
    pub energy: T,
    pub source_mass: T,
    /// `E_U(f, f) / m(A)`, an upper bound for `Cap^U(A)/m(A)`.
    pub bound: T,
}

pub fn half_space_bound<T: Real>(dim: usize, r0: usize, radius: usize) -> Result<HalfSpaceBound<T>> {
    let h = half_space_test_field::<T>(dim, r0, radius)?;
    let f = h.domain.localize(&h.field)?;
    let energy = h.domain.energy_local(&f, &f);
    let source_mass = h.domain.graph().mass_of(&h.source);
    Ok(HalfSpaceBound { r0, radius, energy, source_mass, bound: energy / source_mass })
}
