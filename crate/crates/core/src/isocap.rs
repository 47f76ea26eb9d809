//! Isocapacitary constants by exhaustive subset, pair and tuple enumeration
//! over Kron-reduced capacity networks, with an opt-in level-set heuristic
//! for universes beyond the exact budget.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::capacity::{cap_grounded, grounded_singleton_caps, iter_bits, non_increasing, CapacityNetwork};
use crate::error::{Error, Result};
use crate::graph::{vertex_boundary, SteklovDomain, WeightedGraph};
use crate::linalg::{grounded_schur, positions, stiffness_block_dense, sym_eig_generalized, SymMatrix};
use crate::scalar::{Extended, Real};
use crate::spectra::{dirichlet_spectrum, DENSE_EIGEN_LIMIT};

/// Enumeration limits. Universe sizes above these fail with a budget error
/// unless heuristic mode is requested.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub single: usize,
    pub pair: usize,
    pub tuple: usize,
    /// Largest part considered in tuple constants; `None` means unrestricted.
    pub part_cap: Option<usize>,
    /// Superlevel sets tried per eigenfunction in heuristic mode.
    pub level_sets: usize,
    /// Singleton candidates tried in heuristic mode.
    pub singletons: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Self { single: 20, pair: 16, tuple: 12, part_cap: None, level_sets: 64, singletons: 32 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Exact,
    AllowHeuristic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstantResult<T> {
    pub value: Extended<T>,
    /// Minimizing set, pair or tuple (ambient indices, each part ascending).
    pub witness: Vec<Vec<usize>>,
    pub evaluations: u64,
    /// Set when the value is only an upper bound from a restricted candidate list.
    pub heuristic: bool,
}

impl<T: Real> ConstantResult<T> {
    fn exact(value: Extended<T>, witness: Vec<Vec<usize>>, evaluations: u64) -> Self {
        Self { value, witness, evaluations, heuristic: false }
    }
}

/// One truncation of an exhaustion: the finite ambient domain and the set
/// `W_i` whose constant is taken at that step.
#[derive(Debug, Clone)]
pub struct TruncationStep<T> {
    pub index: usize,
    pub ambient: SteklovDomain<T>,
    pub set: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitReport<T> {
    pub indices: Vec<usize>,
    pub steps: Vec<ConstantResult<T>>,
    pub limit_estimate: Extended<T>,
    /// Last first difference; infinite when either of the last two steps is.
    pub error_bar: Extended<T>,
    pub monotone: bool,
}

fn limit_report<T: Real>(indices: Vec<usize>, steps: Vec<ConstantResult<T>>) -> LimitReport<T> {
    let n = steps.len();
    let limit_estimate = steps.last().map(|s| s.value).unwrap_or(Extended::Infinite);
    let error_bar = if n >= 2 {
        match (steps[n - 2].value, steps[n - 1].value) {
            (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite((a - b).abs()),
            _ => Extended::Infinite,
        }
    } else {
        Extended::Finite(T::zero())
    };
    let first_finite = steps.iter().position(|s| !s.value.is_infinite()).unwrap_or(n);
    let finite: Vec<T> = steps[first_finite..].iter().filter_map(|s| s.value.finite()).collect();
    let monotone = finite.len() == n - first_finite && non_increasing(&finite);
    LimitReport { indices, steps, limit_estimate, error_bar, monotone }
}

fn lex_mask(a: u64, b: u64) -> Ordering {
    let (mut x, mut y) = (a, b);
    loop {
        match (x == 0, y == 0) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {
                let (i, j) = (x.trailing_zeros(), y.trailing_zeros());
                if i != j {
                    return i.cmp(&j);
                }
                x &= x - 1;
                y &= y - 1;
            }
        }
    }
}

#[derive(Debug, Clone)]
struct Cand<T> {
    value: Extended<T>,
    parts: Vec<u64>,
}

impl<T: Real> Cand<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value.total_cmp(&other.value).then_with(|| {
            for (a, b) in self.parts.iter().zip(&other.parts) {
                match lex_mask(*a, *b) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            self.parts.len().cmp(&other.parts.len())
        })
    }
}

fn pick<T: Real>(a: Option<Cand<T>>, b: Option<Cand<T>>) -> Option<Cand<T>> {
    match (a, b) {
        (Some(a), Some(b)) => Some(if b.cmp(&a) == Ordering::Less { b } else { a }),
        (a, None) => a,
        (None, b) => b,
    }
}

fn budget_error(what: &str, size: usize, limit: usize) -> Error {
    Error::Budget { what: what.into(), size, limit }
}

fn to_ambient_mask(vertices: &[usize], mask: u64) -> Vec<usize> {
    iter_bits(mask).map(|i| vertices[i]).collect()
}

fn sorted_unique(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Best nonempty subset of `0..n` under `eval`.
fn min_subset<T: Real>(n: usize, eval: impl Fn(u64) -> Result<Extended<T>> + Sync) -> Result<(Option<Cand<T>>, u64)> {
    if n == 0 {
        return Ok((None, 0));
    }
    let best = (1..1u64 << n)
        .into_par_iter()
        .map(|m| eval(m).map(|value| Some(Cand { value, parts: vec![m] })))
        .try_reduce(|| None, |a, b| Ok(pick(a, b)))?;
    Ok((best, (1u64 << n) - 1))
}

/// Best pair of disjoint nonempty subsets of `0..n` with `min(A) < min(B)`.
fn min_pair<T: Real>(n: usize, eval: impl Fn(u64, u64) -> Result<Extended<T>> + Sync) -> Result<(Option<Cand<T>>, u64)> {
    let best = (1..1u64 << n)
        .into_par_iter()
        .filter(|u| u.count_ones() >= 2)
        .map(|u| {
            let low = u & u.wrapping_neg();
            let rest = u ^ low;
            let mut best: Option<Cand<T>> = None;
            // subsets s of rest, each giving A = low ∪ s and B = rest ∖ s
            let mut s = 0u64;
            loop {
                let b = rest ^ s;
                if b != 0 {
                    let a = low | s;
                    let value = eval(a, b)?;
                    best = pick(best, Some(Cand { value, parts: vec![a, b] }));
                }
                if s == rest {
                    break;
                }
                s = (s.wrapping_sub(rest)) & rest;
            }
            Ok(best)
        })
        .try_reduce(|| None, |a, b| Ok(pick(a, b)))?;
    let count: u64 = (1..1u64 << n).filter(|u| u.count_ones() >= 2).map(|u| (1u64 << (u.count_ones() - 1)) - 1).sum();
    Ok((best, count))
}

struct TupleSearch<'a, T> {
    n: usize,
    k: usize,
    values: &'a [Option<Extended<T>>],
    best: Option<Cand<T>>,
    parts: Vec<u64>,
    evaluations: u64,
}

impl<T: Real> TupleSearch<'_, T> {
    fn run(&mut self, used: u64, after: usize, cur: Extended<T>) {
        if self.parts.len() == self.k {
            self.evaluations += 1;
            let cand = Cand { value: cur, parts: self.parts.clone() };
            self.best = pick(self.best.take(), Some(cand));
            return;
        }
        let full = (1u64 << self.n) - 1;
        let needed = (self.k - self.parts.len()) as u32;
        for e in after..self.n {
            if used & (1 << e) != 0 {
                continue;
            }
            let above = full & !((1u64 << (e + 1)) - 1) & !used;
            if (above | (1 << e)).count_ones() < needed {
                break;
            }
            let mut s = 0u64;
            loop {
                let part = (1u64 << e) | s;
                if let Some(v) = self.values[part as usize] {
                    let next = cur.max(v);
                    let dominated = self.best.as_ref().is_some_and(|b| next.total_cmp(&b.value) == Ordering::Greater);
                    if !dominated {
                        self.parts.push(part);
                        self.run(used | part, e + 1, next);
                        self.parts.pop();
                    }
                }
                if s == above {
                    break;
                }
                s = (s.wrapping_sub(above)) & above;
            }
        }
    }
}

/// Min over disjoint `k`-tuples of nonempty subsets of `0..n` of the largest
/// per-part value. `part_value` is evaluated once per admissible subset.
fn min_max_tuple<T: Real>(
    n: usize,
    k: usize,
    part_cap: Option<usize>,
    part_value: impl Fn(u64) -> Result<Extended<T>> + Sync,
) -> Result<(Option<Cand<T>>, u64)> {
    let cap = part_cap.unwrap_or(n);
    let values: Vec<Option<Extended<T>>> = (0..1u64 << n)
        .into_par_iter()
        .map(|m| if m == 0 || m.count_ones() as usize > cap { Ok(None) } else { part_value(m).map(Some) })
        .collect::<Result<_>>()?;
    let mut search = TupleSearch { n, k, values: &values, best: None, parts: Vec::with_capacity(k), evaluations: 0 };
    search.run(0, 0, Extended::Finite(T::zero()));
    Ok((search.best, search.evaluations))
}

fn finish<T: Real>(best: Option<Cand<T>>, evaluations: u64, vertices: &[usize], what: &str) -> Result<ConstantResult<T>> {
    let best = best.ok_or_else(|| Error::Infeasible(format!("{what}: no admissible candidate")))?;
    let witness = best.parts.iter().map(|&m| to_ambient_mask(vertices, m)).collect();
    Ok(ConstantResult::exact(best.value, witness, evaluations))
}

fn ratio<T: Real>(c: T, m: T) -> Extended<T> {
    Extended::Finite(c / m)
}

/// Sorts local closure indices by their ambient index.
fn by_ambient<T: Real>(domain: &SteklovDomain<T>, local: &mut [usize]) {
    let closure = domain.closure();
    local.sort_by_key(|&v| closure[v]);
}

/// Network on `set` (ambient, ascending) with everything else grounded.
pub fn dirichlet_network<T: Real>(graph: &WeightedGraph<T>, set: &[usize]) -> Result<CapacityNetwork<T>> {
    let set = sorted_unique(set);
    let k = stiffness_block_dense(graph, &set);
    let mass = set.iter().map(|&v| graph.mass(v)).collect();
    CapacityNetwork::new(k, mass, set)
}

/// Network on `δΩ` with the interior eliminated.
pub fn steklov_network<T: Real>(domain: &SteklovDomain<T>) -> Result<CapacityNetwork<T>> {
    let ni = domain.n_interior();
    let mut uni: Vec<usize> = (ni..domain.n_closure()).collect();
    by_ambient(domain, &mut uni);
    CapacityNetwork::reduce(domain, &uni, &(0..ni).collect::<Vec<_>>())
}

/// Network on `Ω` with the boundary eliminated.
pub fn neumann_network<T: Real>(domain: &SteklovDomain<T>) -> Result<CapacityNetwork<T>> {
    let ni = domain.n_interior();
    let mut uni: Vec<usize> = (0..ni).collect();
    by_ambient(domain, &mut uni);
    CapacityNetwork::reduce(domain, &uni, &(ni..domain.n_closure()).collect::<Vec<_>>())
}

/// Network on the whole closure, optionally with replacement masses given in
/// ambient-ascending closure order.
pub fn closure_network<T: Real>(domain: &SteklovDomain<T>, mass: Option<&[T]>) -> Result<CapacityNetwork<T>> {
    let mut uni: Vec<usize> = (0..domain.n_closure()).collect();
    by_ambient(domain, &mut uni);
    let net = CapacityNetwork::reduce(domain, &uni, &[])?;
    match mass {
        None => Ok(net),
        Some(m) => {
            if m.len() != uni.len() || m.iter().any(|&x| !(x > T::zero()) || !x.is_finite()) {
                return Err(Error::input("replacement masses must be positive, one per closure vertex"));
            }
            CapacityNetwork::new(net.matrix().clone(), m.to_vec(), net.vertices().to_vec())
        }
    }
}

/// Network on `Y ∩ δX` inside `G_X`, eliminating `Y ∩ X` and grounding the
/// rest of the closure. `None` when `Y` misses the boundary.
pub fn ds_network<T: Real>(domain: &SteklovDomain<T>, y: &[usize]) -> Result<Option<CapacityNetwork<T>>> {
    let mut local = sorted_unique(&domain.to_local(y)?);
    by_ambient(domain, &mut local);
    let ni = domain.n_interior();
    let keep: Vec<usize> = local.iter().copied().filter(|&v| v >= ni).collect();
    let elim: Vec<usize> = local.iter().copied().filter(|&v| v < ni).collect();
    if keep.is_empty() {
        return Ok(None);
    }
    CapacityNetwork::reduce(domain, &keep, &elim).map(Some)
}

/// Network on `Ω` in the full graph with `V ∖ Ω` eliminated.
pub fn hm_network<T: Real>(graph: &WeightedGraph<T>, omega: &[usize]) -> Result<CapacityNetwork<T>> {
    let omega = sorted_unique(omega);
    if omega.last().is_some_and(|&v| v >= graph.n()) {
        return Err(Error::input("vertex index out of range"));
    }
    let pos = positions(graph.n(), &omega);
    let rest: Vec<usize> = (0..graph.n()).filter(|&v| pos[v] == usize::MAX).collect();
    let k = grounded_schur(graph, &omega, &rest)?;
    let mass = omega.iter().map(|&v| graph.mass(v)).collect();
    CapacityNetwork::new(k, mass, omega)
}

fn single_exact<T: Real>(net: &CapacityNetwork<T>) -> Result<(Option<Cand<T>>, u64)> {
    min_subset(net.size(), |m| Ok(ratio(net.cap_mask(m, 0)?, net.mass_of(m))))
}

fn pair_exact<T: Real>(net: &CapacityNetwork<T>) -> Result<(Option<Cand<T>>, u64)> {
    min_pair(net.size(), |a, b| Ok(ratio(net.cap_mask(a, b)?, net.mass_of(a).min(net.mass_of(b)))))
}

/// Positions sorted by decreasing `f` (ties by position) and the prefix
/// lengths at which `f` strictly drops, thinned to at most `limit`.
fn level_cuts<T: Real>(f: &[T], limit: usize, positive_only: bool) -> (Vec<usize>, Vec<usize>) {
    let mut order: Vec<usize> = (0..f.len()).filter(|&i| !positive_only || f[i] > T::zero()).collect();
    order.sort_by(|&i, &j| f[j].partial_cmp(&f[i]).unwrap_or(Ordering::Equal).then(i.cmp(&j)));
    let cuts: Vec<usize> = (1..=order.len()).filter(|&c| c == order.len() || f[order[c]] < f[order[c - 1]]).collect();
    if cuts.len() <= limit || limit < 2 {
        let mut cuts = cuts;
        cuts.truncate(limit.max(1));
        return (order, cuts);
    }
    let last = cuts.len() - 1;
    let mut picked: Vec<usize> = (0..limit).map(|j| cuts[j * last / (limit - 1)]).collect();
    picked.dedup();
    (order, picked)
}

fn heuristic_result<T: Real>(best: Option<(T, Vec<Vec<usize>>)>, evaluations: u64, vertices: &[usize]) -> Result<ConstantResult<T>> {
    let (value, parts) = best.ok_or_else(|| Error::Numerical("heuristic produced no candidate".into()))?;
    let witness = parts
        .into_iter()
        .map(|p| {
            let mut w: Vec<usize> = p.into_iter().map(|i| vertices[i]).collect();
            w.sort_unstable();
            w
        })
        .collect();
    Ok(ConstantResult { value: Extended::Finite(value), witness, evaluations, heuristic: true })
}

fn keep_better<T: Real>(best: &mut Option<(T, Vec<Vec<usize>>)>, value: T, parts: Vec<Vec<usize>>) {
    let replace = match best {
        None => true,
        Some((v, p)) => value < *v || (value == *v && parts < *p),
    };
    if replace {
        *best = Some((value, parts));
    }
}

/// Level sets of the lowest pencil eigenvector plus the best singletons.
fn single_heuristic<T: Real>(net: &CapacityNetwork<T>, budget: &Budget) -> Result<ConstantResult<T>> {
    let n = net.size();
    if n > DENSE_EIGEN_LIMIT {
        return Err(budget_error("heuristic network", n, DENSE_EIGEN_LIMIT));
    }
    let mass: Vec<T> = (0..n).map(|i| net.mass(i)).collect();
    let eig = sym_eig_generalized(net.matrix(), &mass)?;
    let f = &eig.eigenvectors[0];
    let (order, cuts) = level_cuts(f, budget.level_sets, false);
    let mut best = None;
    let mut evaluations = 0;
    for &c in &cuts {
        let mut a = order[..c].to_vec();
        a.sort_unstable();
        let v = net.cap_sets(&a, &[])? / a.iter().map(|&i| net.mass(i)).sum::<T>();
        evaluations += 1;
        keep_better(&mut best, v, vec![a]);
    }
    let caps = net.singleton_caps()?;
    for &i in order.iter().take(budget.singletons) {
        evaluations += 1;
        keep_better(&mut best, caps[i] / net.mass(i), vec![vec![i]]);
    }
    heuristic_result(best, evaluations, net.vertices())
}

/// Pairs of superlevel and sublevel sets of the first nontrivial pencil
/// eigenvector, plus pairs of singletons where it is largest in modulus.
fn pair_heuristic<T: Real>(net: &CapacityNetwork<T>, budget: &Budget) -> Result<ConstantResult<T>> {
    let n = net.size();
    if n > DENSE_EIGEN_LIMIT {
        return Err(budget_error("heuristic network", n, DENSE_EIGEN_LIMIT));
    }
    let mass: Vec<T> = (0..n).map(|i| net.mass(i)).collect();
    let eig = sym_eig_generalized(net.matrix(), &mass)?;
    let f = &eig.eigenvectors[1.min(n - 1)];
    let neg: Vec<T> = f.iter().map(|&x| -x).collect();
    let (up, up_cuts) = level_cuts(f, budget.level_sets, true);
    let (down, down_cuts) = level_cuts(&neg, budget.level_sets, true);
    let mut best = None;
    let mut evaluations = 0;
    let mut consider = |a: Vec<usize>, b: Vec<usize>| -> Result<()> {
        let (mut a, mut b) = (a, b);
        a.sort_unstable();
        b.sort_unstable();
        if b[0] < a[0] {
            std::mem::swap(&mut a, &mut b);
        }
        let ma: T = a.iter().map(|&i| net.mass(i)).sum();
        let mb: T = b.iter().map(|&i| net.mass(i)).sum();
        let v = net.cap_sets(&a, &b)? / ma.min(mb);
        evaluations += 1;
        keep_better(&mut best, v, vec![a, b]);
        Ok(())
    };
    for &ca in &up_cuts {
        for &cb in &down_cuts {
            consider(up[..ca].to_vec(), down[..cb].to_vec())?;
        }
    }
    let mut by_size: Vec<usize> = (0..n).collect();
    by_size.sort_by(|&i, &j| f[j].abs().partial_cmp(&f[i].abs()).unwrap_or(Ordering::Equal).then(i.cmp(&j)));
    by_size.truncate(budget.singletons);
    for (p, &i) in by_size.iter().enumerate() {
        for &j in &by_size[p + 1..] {
            consider(vec![i], vec![j])?;
        }
    }
    heuristic_result(best, evaluations, net.vertices())
}

fn single_constant<T: Real>(net: &CapacityNetwork<T>, budget: &Budget, mode: Mode, what: &str) -> Result<ConstantResult<T>> {
    if net.size() > budget.single {
        return match mode {
            Mode::Exact => Err(budget_error(what, net.size(), budget.single)),
            Mode::AllowHeuristic => single_heuristic(net, budget),
        };
    }
    let (best, count) = single_exact(net)?;
    finish(best, count, net.vertices(), what)
}

fn pair_constant<T: Real>(net: &CapacityNetwork<T>, budget: &Budget, mode: Mode, what: &str) -> Result<ConstantResult<T>> {
    if net.size() < 2 {
        return Err(Error::input(format!("{what} needs at least two candidate vertices")));
    }
    if net.size() > budget.pair {
        return match mode {
            Mode::Exact => Err(budget_error(what, net.size(), budget.pair)),
            Mode::AllowHeuristic => pair_heuristic(net, budget),
        };
    }
    let (best, count) = pair_exact(net)?;
    finish(best, count, net.vertices(), what)
}

/// `α_D(Ω) = inf_{A⊆Ω} Cap_Ω(A)/m(A)`.
pub fn alpha_dirichlet<T: Real>(domain: &SteklovDomain<T>, budget: &Budget, mode: Mode) -> Result<ConstantResult<T>> {
    alpha_dirichlet_set(domain.graph(), domain.interior(), budget, mode)
}

/// `α_D` of a finite vertex set inside `graph`, grounding its complement.
/// Zero when the set has no vertex boundary.
pub fn alpha_dirichlet_set<T: Real>(graph: &WeightedGraph<T>, set: &[usize], budget: &Budget, mode: Mode) -> Result<ConstantResult<T>> {
    let set = sorted_unique(set);
    if set.is_empty() {
        return Err(Error::input("set is empty"));
    }
    if vertex_boundary(graph, &set)?.is_empty() {
        return Ok(ConstantResult::exact(Extended::Finite(T::zero()), vec![set], 0));
    }
    if set.len() > budget.single {
        return match mode {
            Mode::Exact => Err(budget_error("alpha_dirichlet", set.len(), budget.single)),
            Mode::AllowHeuristic => dirichlet_heuristic(graph, &set, budget),
        };
    }
    single_constant(&dirichlet_network(graph, &set)?, budget, mode, "alpha_dirichlet")
}

/// Superlevel sets of the first Dirichlet eigenfunction and the singletons
/// where it peaks, each capacity solved on the sparse grounded block.
fn dirichlet_heuristic<T: Real>(graph: &WeightedGraph<T>, set: &[usize], budget: &Budget) -> Result<ConstantResult<T>> {
    let eig = dirichlet_spectrum(graph, set, 1)?;
    let f: Vec<T> = eig.eigenvectors[0][..set.len()].to_vec();
    let support = &eig.support[..set.len()];
    let (order, cuts) = level_cuts(&f, budget.level_sets, false);
    let cands: Vec<Vec<usize>> = cuts
        .iter()
        .map(|&c| {
            let mut a: Vec<usize> = order[..c].iter().map(|&i| support[i]).collect();
            a.sort_unstable();
            a
        })
        .collect();
    let values = cands
        .par_iter()
        .map(|a| Ok(cap_grounded(graph, set, a)? / graph.mass_of(a)))
        .collect::<Result<Vec<T>>>()?;
    let mut best = None;
    for (v, a) in values.into_iter().zip(cands) {
        keep_better(&mut best, v, vec![a]);
    }
    let singles: Vec<usize> = order.iter().take(budget.singletons).map(|&i| support[i]).collect();
    let caps = grounded_singleton_caps(graph, set, &singles)?;
    for (&x, c) in singles.iter().zip(caps) {
        keep_better(&mut best, c / graph.mass(x), vec![vec![x]]);
    }
    let evaluations = (cuts.len() + singles.len()) as u64;
    let (value, witness) = best.expect("nonempty candidate list");
    Ok(ConstantResult { value: Extended::Finite(value), witness, evaluations, heuristic: true })
}

/// `α_N(Ω) = inf_{A,B⊆Ω} Cap_Ω(A,B)/(m(A)∧m(B))`.
pub fn alpha_neumann<T: Real>(domain: &SteklovDomain<T>, budget: &Budget, mode: Mode) -> Result<ConstantResult<T>> {
    if domain.n_interior() < 2 {
        return Err(Error::input("alpha_neumann needs at least two interior vertices"));
    }
    pair_constant(&neumann_network(domain)?, budget, mode, "alpha_neumann")
}

/// `α_S(Ω) = inf_{A,B⊆δΩ} Cap_Ω(A,B)/(m(A)∧m(B))`.
pub fn alpha_steklov<T: Real>(domain: &SteklovDomain<T>, budget: &Budget, mode: Mode) -> Result<ConstantResult<T>> {
    if domain.n_boundary() < 2 {
        return Err(Error::input("alpha_steklov needs at least two boundary vertices"));
    }
    pair_constant(&steklov_network(domain)?, budget, mode, "alpha_steklov")
}

/// Pair constant over the whole closure, `inf_{A,B⊆Ω̄} Cap_Ω(A,B)/(m(A)∧m(B))`,
/// optionally with replacement masses (ambient-ascending closure order).
pub fn alpha_closure<T: Real>(domain: &SteklovDomain<T>, mass: Option<&[T]>, budget: &Budget, mode: Mode) -> Result<ConstantResult<T>> {
    pair_constant(&closure_network(domain, mass)?, budget, mode, "alpha_closure")
}

/// `α_DS^X(Y) = inf_{A⊆Y∩δX} Cap_X(A, δ_X Y)/m(A)`, infinite when `Y` misses
/// `δX` and zero when `Y` has no relative boundary.
pub fn alpha_ds<T: Real>(domain: &SteklovDomain<T>, y: &[usize], budget: &Budget, mode: Mode) -> Result<ConstantResult<T>> {
    if y.is_empty() {
        return Err(Error::input("set is empty"));
    }
    let Some(net) = ds_network(domain, y)? else {
        return Ok(ConstantResult::exact(Extended::Infinite, vec![], 0));
    };
    if domain.relative_boundary(y)?.is_empty() {
        return Ok(ConstantResult::exact(Extended::Finite(T::zero()), vec![vec![net.vertices()[0]]], 0));
    }
    single_constant(&net, budget, mode, "alpha_ds")
}

/// `α_DS` value alone, for per-part evaluation inside tuple searches.
fn ds_value<T: Real>(domain: &SteklovDomain<T>, y: &[usize]) -> Result<Extended<T>> {
    let Some(net) = ds_network(domain, y)? else {
        return Ok(Extended::Infinite);
    };
    if domain.relative_boundary(y)?.is_empty() {
        return Ok(Extended::Finite(T::zero()));
    }
    Ok(single_exact(&net)?.0.expect("nonempty universe").value)
}

fn alpha_d_value<T: Real>(graph: &WeightedGraph<T>, set: &[usize]) -> Result<Extended<T>> {
    if vertex_boundary(graph, set)?.is_empty() {
        return Ok(Extended::Finite(T::zero()));
    }
    Ok(single_exact(&dirichlet_network(graph, set)?)?.0.expect("nonempty set").value)
}

fn lambda_d_value<T: Real>(graph: &WeightedGraph<T>, set: &[usize]) -> Result<Extended<T>> {
    if vertex_boundary(graph, set)?.is_empty() {
        return Ok(Extended::Finite(T::zero()));
    }
    let k: SymMatrix<T> = stiffness_block_dense(graph, set);
    let mass: Vec<T> = set.iter().map(|&v| graph.mass(v)).collect();
    Ok(Extended::Finite(sym_eig_generalized(&k, &mass)?.eigenvalues[0]))
}

fn tuple_constant<T: Real>(
    universe: &[usize],
    k: usize,
    budget: &Budget,
    what: &str,
    part_value: impl Fn(&[usize]) -> Result<Extended<T>> + Sync,
) -> Result<ConstantResult<T>> {
    let n = universe.len();
    if k == 0 || k > n {
        return Err(Error::input(format!("{what}: arity {k} out of range for {n} vertices")));
    }
    if n > budget.tuple {
        return Err(budget_error(what, n, budget.tuple));
    }
    if let Some(cap) = budget.part_cap {
        if cap == 0 {
            return Err(Error::input("part size cap must be positive"));
        }
    }
    let (best, count) = min_max_tuple(n, k, budget.part_cap, |m| part_value(&to_ambient_mask(universe, m)))?;
    finish(best, count, universe, what)
}

/// `Γ̃_k(W) = min over disjoint k-tuples in W of max_l λ₁^D(A_l)`.
pub fn gamma_tilde_dirichlet<T: Real>(graph: &WeightedGraph<T>, w: &[usize], k: usize, budget: &Budget) -> Result<ConstantResult<T>> {
    let w = sorted_unique(w);
    tuple_constant(&w, k, budget, "gamma_tilde_dirichlet", |s| lambda_d_value(graph, s))
}

/// `Γ_k^D(W) = min over disjoint k-tuples in W of max_l α_D(A_l)`.
pub fn gamma_k_dirichlet<T: Real>(graph: &WeightedGraph<T>, w: &[usize], k: usize, budget: &Budget) -> Result<ConstantResult<T>> {
    let w = sorted_unique(w);
    tuple_constant(&w, k, budget, "gamma_k_dirichlet", |s| alpha_d_value(graph, s))
}

/// `κ_{k+1} = min over disjoint (k+1)-tuples in Ω̄ of max_l α_DS^Ω(A_l)`.
pub fn kappa_steklov<T: Real>(domain: &SteklovDomain<T>, k: usize, budget: &Budget) -> Result<ConstantResult<T>> {
    if k == 0 || k >= domain.n_boundary() {
        return Err(Error::input(format!("kappa needs 1 <= k <= |boundary| - 1, got k = {k}")));
    }
    let universe = sorted_unique(domain.closure());
    tuple_constant(&universe, k + 1, budget, "kappa_steklov", |s| ds_value(domain, s))
}

/// `Γ_k^S(W) = min over disjoint k-tuples in W ⊆ Ū of max_l α_DS^U(A_l)`.
pub fn gamma_k_steklov<T: Real>(ambient: &SteklovDomain<T>, w: &[usize], k: usize, budget: &Budget) -> Result<ConstantResult<T>> {
    let w = sorted_unique(w);
    ambient.to_local(&w)?;
    tuple_constant(&w, k, budget, "gamma_k_steklov", |s| ds_value(ambient, s))
}

/// `β_S(Ω) = inf_{A,B⊆Ω} Cap(A,B)/(m(A)∧m(B))` with full-graph capacity.
pub fn beta_s<T: Real>(graph: &WeightedGraph<T>, omega: &[usize], budget: &Budget, mode: Mode) -> Result<ConstantResult<T>> {
    let omega = sorted_unique(omega);
    if omega.len() < 2 || omega.len() >= graph.n() {
        return Err(Error::input("beta_s needs a proper subset with at least two vertices"));
    }
    pair_constant(&hm_network(graph, &omega)?, budget, mode, "beta_s")
}

/// `β_DS(S) = inf_{A⊆S∩Ω} Cap(A, V∖S)/m(A)`.
fn beta_ds_value<T: Real>(graph: &WeightedGraph<T>, in_omega: &[bool], s: &[usize]) -> Result<Extended<T>> {
    let keep: Vec<usize> = s.iter().copied().filter(|&v| in_omega[v]).collect();
    if keep.is_empty() {
        return Ok(Extended::Infinite);
    }
    if s.len() == graph.n() {
        return Ok(Extended::Finite(T::zero()));
    }
    let elim: Vec<usize> = s.iter().copied().filter(|&v| !in_omega[v]).collect();
    let k = grounded_schur(graph, &keep, &elim)?;
    let mass = keep.iter().map(|&v| graph.mass(v)).collect();
    let net = CapacityNetwork::new(k, mass, keep)?;
    Ok(single_exact(&net)?.0.expect("nonempty").value)
}

/// `β_{k+1} = min over disjoint (k+1)-tuples in V of max_l β_DS(A_l)`.
pub fn beta_higher<T: Real>(graph: &WeightedGraph<T>, omega: &[usize], k: usize, budget: &Budget) -> Result<ConstantResult<T>> {
    let omega = sorted_unique(omega);
    if omega.is_empty() || omega.len() >= graph.n() || omega[omega.len() - 1] >= graph.n() {
        return Err(Error::input("beta needs a proper nonempty subset"));
    }
    if k == 0 || k >= omega.len() {
        return Err(Error::input(format!("beta needs 1 <= k <= |Ω| - 1, got k = {k}")));
    }
    let mut in_omega = vec![false; graph.n()];
    for &v in &omega {
        in_omega[v] = true;
    }
    let universe: Vec<usize> = (0..graph.n()).collect();
    tuple_constant(&universe, k + 1, budget, "beta_higher", |s| beta_ds_value(graph, &in_omega, s))
}

/// `α_D(W_i)` along an exhaustion.
pub fn alpha_dirichlet_limit<T: Real>(steps: &[TruncationStep<T>], budget: &Budget, mode: Mode) -> Result<LimitReport<T>> {
    along(steps, |s| alpha_dirichlet_set(s.ambient.graph(), &s.set, budget, mode))
}

/// `α_DS^U(W_i)` along an exhaustion of `Ū`.
pub fn alpha_steklov_limit<T: Real>(steps: &[TruncationStep<T>], budget: &Budget, mode: Mode) -> Result<LimitReport<T>> {
    along(steps, |s| alpha_ds(&s.ambient, &s.set, budget, mode))
}

/// `Γ_k^D(W_i)` along an exhaustion.
pub fn gamma_k_dirichlet_limit<T: Real>(steps: &[TruncationStep<T>], k: usize, budget: &Budget) -> Result<LimitReport<T>> {
    along(steps, |s| gamma_k_dirichlet(s.ambient.graph(), &s.set, k, budget))
}

/// `Γ_k^S(W_i)` along an exhaustion of `Ū`.
pub fn gamma_k_steklov_limit<T: Real>(steps: &[TruncationStep<T>], k: usize, budget: &Budget) -> Result<LimitReport<T>> {
    along(steps, |s| gamma_k_steklov(&s.ambient, &s.set, k, budget))
}

fn along<T: Real>(
    steps: &[TruncationStep<T>],
    f: impl Fn(&TruncationStep<T>) -> Result<ConstantResult<T>>,
) -> Result<LimitReport<T>> {
    if steps.is_empty() {
        return Err(Error::input("exhaustion has no steps"));
    }
    let results = steps.iter().map(f).collect::<Result<Vec<_>>>()?;
    Ok(limit_report(steps.iter().map(|s| s.index).collect(), results))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::{cap, cap_to_boundary};
    use crate::graph::make_domain;
    use std::sync::Arc;

    fn path_domain(n: usize) -> SteklovDomain<f64> {
        let g = Arc::new(WeightedGraph::unit_path(n));
        make_domain(&g, &(1..n).collect::<Vec<_>>()).unwrap()
    }

    fn fin(r: &ConstantResult<f64>) -> f64 {
        r.value.finite().unwrap()
    }

    #[test]
    fn lex_order_of_masks() {
        assert_eq!(lex_mask(0b011, 0b101), Ordering::Less);
        assert_eq!(lex_mask(0b001, 0b011), Ordering::Less);
        assert_eq!(lex_mask(0b110, 0b001), Ordering::Greater);
        assert_eq!(lex_mask(0b110, 0b110), Ordering::Equal);
    }

    #[test]
    fn pair_count_is_normalized() {
        // (3ⁿ − 2·2ⁿ + 1) / 2 unordered disjoint nonempty pairs
        for n in 2..8u32 {
            let (_, c) = min_pair::<f64>(n as usize, |_, _| Ok(Extended::Finite(1.0))).unwrap();
            assert_eq!(c, 3u64.pow(n).div_ceil(2) - 2u64.pow(n));
        }
    }

    #[test]
    fn tuple_counts_match_stirling_style_formula() {
        // ordered-by-minimum disjoint k-tuples of nonempty subsets of n elements
        fn count(n: usize, k: usize) -> u64 {
            // Σ_j C(n,j) S(j,k) with S Stirling numbers of the second kind
            let mut s = vec![vec![0u64; k + 1]; n + 1];
            s[0][0] = 1;
            for i in 1..=n {
                for j in 1..=k {
                    s[i][j] = j as u64 * s[i - 1][j] + s[i - 1][j - 1];
                }
            }
            let mut c = vec![vec![0u64; n + 1]; n + 1];
            for i in 0..=n {
                c[i][0] = 1;
                for j in 1..=i {
                    c[i][j] = c[i - 1][j - 1] + if j < i { c[i - 1][j] } else { 0 };
                }
            }
            (0..=n).map(|j| c[n][j] * s[j][k]).sum()
        }
        for n in 1..7 {
            for k in 1..=n {
                let (_, got) = min_max_tuple::<f64>(n, k, None, |_| Ok(Extended::Finite(0.0))).unwrap();
                assert_eq!(got, count(n, k), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn alpha_d_single_candidate() {
        let g = Arc::new(WeightedGraph::<f64>::from_edges(&[1.0, 3.0, 1.0], &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap());
        let d = make_domain(&g, &[1]).unwrap();
        let r = alpha_dirichlet(&d, &Budget::default(), Mode::Exact).unwrap();
        assert!((fin(&r) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.witness, vec![vec![1]]);
        assert_eq!(r.evaluations, 1);
    }

    #[test]
    fn alpha_d_path_brute_force() {
        let d = path_domain(4);
        let r = alpha_dirichlet(&d, &Budget::default(), Mode::Exact).unwrap();
        let mut best = f64::INFINITY;
        for mask in 1u32..8 {
            let a: Vec<usize> = (0..3).filter(|i| mask & (1 << i) != 0).map(|i| i + 1).collect();
            best = best.min(cap_to_boundary(&d, &a).unwrap().value / a.len() as f64);
        }
        assert!((fin(&r) - best).abs() < 1e-14);
        // {1,2,3}: Cap = 2, m = 3
        assert!((best - 2.0 / 3.0).abs() < 1e-14);
        assert_eq!(r.witness, vec![vec![1, 2, 3]]);
    }

    #[test]
    fn alpha_s_path() {
        for n in 2..12 {
            let d = path_domain(n);
            let r = alpha_steklov(&d, &Budget::default(), Mode::Exact).unwrap();
            assert!((fin(&r) - 1.0 / n as f64).abs() < 1e-12);
            assert_eq!(r.witness, vec![vec![0], vec![n]]);
            assert_eq!(r.evaluations, 1);
        }
    }

    #[test]
    fn budget_errors_name_limit() {
        let d = path_domain(30);
        let e = alpha_dirichlet(&d, &Budget::default(), Mode::Exact).unwrap_err();
        assert_eq!(e, Error::Budget { what: "alpha_dirichlet".into(), size: 29, limit: 20 });
        let h = alpha_dirichlet(&d, &Budget::default(), Mode::AllowHeuristic).unwrap();
        assert!(h.heuristic);
        // the whole interior is a level set: Cap = 2, m = 29
        assert!(fin(&h) <= 2.0 / 29.0 + 1e-12);
    }

    #[test]
    fn alpha_ds_conventions() {
        let d = path_domain(4);
        let r = alpha_ds(&d, &[2], &Budget::default(), Mode::Exact).unwrap();
        assert!(r.value.is_infinite());
        // Y = {0,1}: A = {0}, relative boundary {2}
        let r = alpha_ds(&d, &[0, 1], &Budget::default(), Mode::Exact).unwrap();
        assert!((fin(&r) - 0.5).abs() < 1e-14);
        assert_eq!(r.witness, vec![vec![0]]);
        let all: Vec<usize> = (0..=4).collect();
        let r = alpha_ds(&d, &all, &Budget::default(), Mode::Exact).unwrap();
        assert_eq!(r.value, Extended::Finite(0.0));
    }

    #[test]
    fn alpha_n_single_edge() {
        // Ω = {1, 2} on a 4-path: pair ({1},{2}) with the boundary free
        let g = Arc::new(WeightedGraph::<f64>::from_edges(&[1.0, 2.0, 0.5, 1.0], &[(0, 1, 1.0), (1, 2, 3.0), (2, 3, 1.0)]).unwrap());
        let d = make_domain(&g, &[1, 2]).unwrap();
        let r = alpha_neumann(&d, &Budget::default(), Mode::Exact).unwrap();
        assert!((fin(&r) - 3.0 / 0.5).abs() < 1e-13);
        let direct = cap(&d, &[1], &[2]).unwrap().value;
        assert!((direct - 3.0).abs() < 1e-14);
    }

    #[test]
    fn beta_uses_full_graph() {
        // triangle, Ω = {0,1}: the edge 0-1 is kept, plus the path through 2
        let g = WeightedGraph::<f64>::from_edges(&[1.0; 3], &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let r = beta_s(&g, &[0, 1], &Budget::default(), Mode::Exact).unwrap();
        assert!((fin(&r) - 1.5).abs() < 1e-14);
        let gs = Arc::new(g);
        let d = make_domain(&gs, &[0, 1]).unwrap();
        // in G_Ω the boundary vertex 2 joins both: α_S is undefined (one boundary vertex)
        assert!(alpha_steklov(&d, &Budget::default(), Mode::Exact).is_err());
    }

    #[test]
    fn gamma_tilde_arity_one_is_first_eigenvalue() {
        let g = WeightedGraph::<f64>::unit_path(5);
        let w = [1, 2, 3, 4];
        let r = gamma_tilde_dirichlet(&g, &w, 1, &Budget::default()).unwrap();
        let l1 = dirichlet_spectrum(&g, &w, 1).unwrap().eigenvalues[0];
        assert!((fin(&r) - l1).abs() < 1e-13);
        assert_eq!(r.witness, vec![vec![1, 2, 3, 4]]);
    }

    #[test]
    fn tuples_are_disjoint_and_ordered() {
        let g = WeightedGraph::<f64>::unit_path(7);
        let r = gamma_k_dirichlet(&g, &[1, 2, 3, 4, 5, 6], 3, &Budget::default()).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for part in &r.witness {
            assert!(!part.is_empty());
            for &v in part {
                assert!(seen.insert(v));
            }
        }
        assert!(r.witness.windows(2).all(|w| w[0][0] < w[1][0]));
    }

    #[test]
    fn kappa_dominates_parts_without_boundary() {
        let d = path_domain(3);
        let r = kappa_steklov(&d, 1, &Budget::default()).unwrap();
        assert!(!r.value.is_infinite());
        for part in &r.witness {
            assert!(part.iter().any(|v| d.boundary().contains(v)));
        }
        assert!(kappa_steklov(&d, 2, &Budget::default()).is_err());
    }

    #[test]
    fn part_cap_restricts_parts() {
        let g = WeightedGraph::<f64>::unit_path(6);
        let b = Budget { part_cap: Some(2), ..Budget::default() };
        let r = gamma_tilde_dirichlet(&g, &[1, 2, 3, 4, 5], 2, &b).unwrap();
        assert!(r.witness.iter().all(|p| p.len() <= 2));
        let free = gamma_tilde_dirichlet(&g, &[1, 2, 3, 4, 5], 2, &Budget::default()).unwrap();
        assert!(fin(&free) <= fin(&r) + 1e-15);
    }

    #[test]
    fn limit_report_flags() {
        let mk = |v: f64| ConstantResult::exact(Extended::Finite(v), vec![vec![0]], 1);
        let r = limit_report(vec![1, 2, 3], vec![mk(3.0), mk(2.0), mk(1.5)]);
        assert!(r.monotone);
        assert_eq!(r.error_bar, Extended::Finite(0.5));
        let r = limit_report(vec![1, 2], vec![mk(1.0), mk(2.0)]);
        assert!(!r.monotone);
    }
}
