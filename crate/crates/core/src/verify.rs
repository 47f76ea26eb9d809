//! Both sides of each two-sided eigenvalue estimate on a concrete instance,
//! the equality-case test for the Steklov upper bound, and seeded random
//! instances for campaigns.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::capacity::cap;
use crate::error::{Error, Result};
use crate::graph::{SteklovDomain, WeightedGraph};
use crate::isocap::{
    alpha_dirichlet, alpha_dirichlet_set, alpha_ds, alpha_neumann, alpha_steklov, beta_higher, beta_s, gamma_k_dirichlet,
    gamma_k_steklov, gamma_tilde_dirichlet, kappa_steklov, Budget, ConstantResult, Mode, TruncationStep,
};
use crate::scalar::{Extended, Real};
use crate::spectra::{dirichlet_spectrum, grounded_dtn_spectrum, hm_dtn_spectrum, neumann_spectrum, steklov_spectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TheoremId {
    Dirichlet1,
    Bottom,
    Neumann1,
    Steklov1,
    DtnBottom,
    HigherDirichlet(usize),
    HigherSteklovFinite(usize),
    HigherSteklovInfinite(usize),
    HmSteklov1,
    HmHigher(usize),
}

impl TheoremId {
    /// `(lower factor, upper factor)`; a lower factor of `None` marks the
    /// unspecified `c/k⁶` constant.
    pub fn factors<T: Real>(&self) -> (Option<T>, T) {
        use TheoremId::*;
        match self {
            Dirichlet1 | Bottom | DtnBottom => (Some(T::lit(0.25)), T::one()),
            Neumann1 | Steklov1 | HmSteklov1 => (Some(T::lit(0.125)), T::lit(2.0)),
            HigherDirichlet(_) | HigherSteklovFinite(_) | HigherSteklovInfinite(_) | HmHigher(_) => (None, T::lit(2.0)),
        }
    }

    pub fn order(&self) -> usize {
        use TheoremId::*;
        match *self {
            HigherDirichlet(k) | HigherSteklovFinite(k) | HigherSteklovInfinite(k) | HmHigher(k) => k,
            _ => 1,
        }
    }

    pub fn is_family(&self) -> bool {
        matches!(self, TheoremId::Bottom | TheoremId::DtnBottom | TheoremId::HigherSteklovInfinite(_))
    }

    pub const FINITE_FIRST_ORDER: [TheoremId; 4] =
        [TheoremId::Dirichlet1, TheoremId::Neumann1, TheoremId::Steklov1, TheoremId::HmSteklov1];
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use TheoremId::*;
        match self {
            Dirichlet1 => f.write_str("dirichlet_1"),
            Bottom => f.write_str("bottom"),
            Neumann1 => f.write_str("neumann_1"),
            Steklov1 => f.write_str("steklov_1"),
            DtnBottom => f.write_str("dtn_bottom"),
            HigherDirichlet(k) => write!(f, "higher_dirichlet({k})"),
            HigherSteklovFinite(k) => write!(f, "higher_steklov_finite({k})"),
            HigherSteklovInfinite(k) => write!(f, "higher_steklov_infinite({k})"),
            HmSteklov1 => f.write_str("hm_steklov_1"),
            HmHigher(k) => write!(f, "hm_higher({k})"),
        }
    }
}

/// Accepts `name`, `name(k)` and `name:k`.
impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, arg) = if let Some(open) = s.find('(') {
            let inner = s[open + 1..].strip_suffix(')').ok_or_else(|| Error::input(format!("bad theorem id `{s}`")))?;
            (&s[..open], Some(inner))
        } else if let Some((n, k)) = s.split_once(':') {
            (n, Some(k))
        } else {
            (s, None)
        };
        let k = || -> Result<usize> {
            let k: usize = arg
                .ok_or_else(|| Error::input(format!("theorem `{name}` needs an order, e.g. `{name}(2)`")))?
                .parse()
                .map_err(|_| Error::input(format!("bad order in `{s}`")))?;
            if k == 0 {
                return Err(Error::input("order must be at least 1"));
            }
            Ok(k)
        };
        let plain = |id: TheoremId| if arg.is_some() { Err(Error::input(format!("theorem `{name}` takes no order"))) } else { Ok(id) };
        match name {
            "dirichlet_1" => plain(TheoremId::Dirichlet1),
            "bottom" => plain(TheoremId::Bottom),
            "neumann_1" => plain(TheoremId::Neumann1),
            "steklov_1" => plain(TheoremId::Steklov1),
            "dtn_bottom" => plain(TheoremId::DtnBottom),
            "hm_steklov_1" => plain(TheoremId::HmSteklov1),
            "higher_dirichlet" => Ok(TheoremId::HigherDirichlet(k()?)),
            "higher_steklov_finite" => Ok(TheoremId::HigherSteklovFinite(k()?)),
            "higher_steklov_infinite" => Ok(TheoremId::HigherSteklovInfinite(k()?)),
            "hm_higher" => Ok(TheoremId::HmHigher(k()?)),
            other => Err(Error::input(format!("unknown theorem `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Instance<'a, T> {
    Domain(&'a SteklovDomain<T>),
    Family(&'a [TruncationStep<T>]),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CheckOptions {
    pub budget: Budget,
    pub mode: Mode,
}

/// Outcome of the two-sided estimate at one exhaustion step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCheck<T> {
    pub index: usize,
    pub eigenvalue: Extended<T>,
    pub constant: ConstantResult<T>,
    pub lower_ok: Option<bool>,
    pub upper_ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport<T> {
    pub theorem: TheoremId,
    pub eigenvalue: Extended<T>,
    pub constant: Extended<T>,
    pub lower_factor: Option<T>,
    pub upper_factor: T,
    pub lower_bound: Option<Extended<T>>,
    pub upper_bound: Extended<T>,
    /// Absent for the `c/k⁶` estimates and when the constant is only a heuristic upper bound.
    pub lower_ok: Option<bool>,
    pub upper_ok: bool,
    pub ratio: Option<T>,
    pub witness: Vec<Vec<usize>>,
    /// `eigenvalue · k⁶ / constant`, for the `c/k⁶` estimates.
    pub empirical_c: Option<T>,
    pub heuristic: bool,
    pub evaluations: u64,
    /// Per-step checks for exhaustion families, empty otherwise.
    pub steps: Vec<StepCheck<T>>,
    pub eigenvalues_monotone: Option<bool>,
    pub constants_monotone: Option<bool>,
}

impl<T: Real> BoundReport<T> {
    pub fn passed(&self) -> bool {
        self.upper_ok
            && self.lower_ok != Some(false)
            && self.steps.iter().all(|s| s.upper_ok && s.lower_ok != Some(false))
    }
}

/// Additive slack for inequality checks.
pub fn slack<T: Real>(eigenvalue: T) -> T {
    T::tight_tol() * T::lit(10.0) * eigenvalue.abs().max(T::one())
}

fn compare<T: Real>(theorem: TheoremId, eigenvalue: Extended<T>, constant: &ConstantResult<T>) -> (Option<bool>, bool) {
    let (lower, upper) = theorem.factors::<T>();
    match eigenvalue {
        Extended::Infinite => (None, constant.value.is_infinite()),
        Extended::Finite(lam) => {
            let s = slack(lam);
            let upper_ok = match constant.value {
                Extended::Infinite => true,
                Extended::Finite(c) => lam <= upper * c + s,
            };
            let lower_ok = match (lower, constant.value) {
                (Some(_), _) if constant.heuristic => None,
                (Some(_), Extended::Infinite) => Some(false),
                (Some(f), Extended::Finite(c)) => Some(f * c <= lam + s),
                (None, _) => None,
            };
            (lower_ok, upper_ok)
        }
    }
}

fn report<T: Real>(theorem: TheoremId, eigenvalue: Extended<T>, constant: ConstantResult<T>, steps: Vec<StepCheck<T>>) -> BoundReport<T> {
    let (lower_factor, upper_factor) = theorem.factors::<T>();
    let (lower_ok, upper_ok) = compare(theorem, eigenvalue, &constant);
    let ratio = match (eigenvalue, constant.value) {
        (Extended::Finite(l), Extended::Finite(c)) if c > T::zero() => Some(l / c),
        _ => None,
    };
    let empirical_c = match lower_factor {
        None => ratio.map(|r| r * T::of_usize(theorem.order()).powi(6)),
        Some(_) => None,
    };
    let monotone = |xs: Vec<Extended<T>>| {
        xs.windows(2).all(|w| w[1].total_cmp(&w[0].scale(T::one() + T::tight_tol())) != std::cmp::Ordering::Greater)
    };
    let (eigenvalues_monotone, constants_monotone) = if steps.is_empty() {
        (None, None)
    } else {
        (
            Some(monotone(steps.iter().map(|s| s.eigenvalue).collect())),
            Some(monotone(steps.iter().map(|s| s.constant.value).collect())),
        )
    };
    BoundReport {
        theorem,
        eigenvalue,
        constant: constant.value,
        lower_factor,
        upper_factor,
        lower_bound: lower_factor.map(|f| constant.value.scale(f)),
        upper_bound: constant.value.scale(upper_factor),
        lower_ok,
        upper_ok,
        ratio,
        witness: constant.witness,
        empirical_c,
        heuristic: constant.heuristic,
        evaluations: constant.evaluations,
        steps,
        eigenvalues_monotone,
        constants_monotone,
    }
}

/// Evaluates both sides of `theorem` on `instance`.
pub fn check<T: Real>(theorem: TheoremId, instance: Instance<'_, T>, options: &CheckOptions) -> Result<BoundReport<T>> {
    use TheoremId::*;
    let b = &options.budget;
    let mode = options.mode;
    match (theorem, instance) {
        (HigherDirichlet(k), Instance::Family(steps)) => check_family_dirichlet_higher(k, steps, b),
        (t, Instance::Family(steps)) if t.is_family() => check_family(theorem, steps, options),
        (t, Instance::Domain(_)) if t.is_family() => Err(Error::input(format!("theorem {theorem} needs an exhaustion family"))),
        (_, Instance::Family(_)) => Err(Error::input(format!("theorem {theorem} needs a finite domain"))),
        (_, Instance::Domain(d)) => {
            let g = d.graph();
            let (lam, constant) = match theorem {
                Dirichlet1 => (dirichlet_spectrum(g, d.interior(), 1)?.eigenvalues[0], alpha_dirichlet(d, b, mode)?),
                Neumann1 => (neumann_spectrum(d, 2)?.eigenvalues[1], alpha_neumann(d, b, mode)?),
                Steklov1 => (steklov_spectrum(d, 2)?.eigenvalues[1], alpha_steklov(d, b, mode)?),
                HigherDirichlet(k) => {
                    (dirichlet_spectrum(g, d.interior(), k)?.eigenvalues[k - 1], gamma_tilde_dirichlet(g, d.interior(), k, b)?)
                }
                HigherSteklovFinite(k) => (steklov_spectrum(d, k + 1)?.eigenvalues[k], kappa_steklov(d, k, b)?),
                HmSteklov1 => (hm_dtn_spectrum(g, d.interior(), 2)?.eigenvalues[1], beta_s(g, d.interior(), b, mode)?),
                HmHigher(k) => (hm_dtn_spectrum(g, d.interior(), k + 1)?.eigenvalues[k], beta_higher(g, d.interior(), k, b)?),
                Bottom | DtnBottom | HigherSteklovInfinite(_) => unreachable!("family theorems handled above"),
            };
            Ok(report(theorem, Extended::Finite(lam), constant, vec![]))
        }
    }
}

fn finish_family<T: Real>(theorem: TheoremId, steps: Vec<StepCheck<T>>) -> Result<BoundReport<T>> {
    let last = steps.last().ok_or_else(|| Error::input("exhaustion has no steps"))?.clone();
    Ok(report(theorem, last.eigenvalue, last.constant, steps))
}

fn step_check<T: Real>(theorem: TheoremId, index: usize, eigenvalue: Extended<T>, constant: ConstantResult<T>) -> StepCheck<T> {
    let (lower_ok, upper_ok) = compare(theorem, eigenvalue, &constant);
    StepCheck { index, eigenvalue, constant, lower_ok, upper_ok }
}

fn check_family<T: Real>(theorem: TheoremId, steps: &[TruncationStep<T>], options: &CheckOptions) -> Result<BoundReport<T>> {
    let b = &options.budget;
    let checks = steps
        .iter()
        .map(|s| {
            let (lam, constant) = match theorem {
                TheoremId::Bottom => (
                    Extended::Finite(dirichlet_spectrum(s.ambient.graph(), &s.set, 1)?.eigenvalues[0]),
                    alpha_dirichlet_set(s.ambient.graph(), &s.set, b, options.mode)?,
                ),
                TheoremId::DtnBottom => {
                    (grounded_dtn_spectrum(&s.ambient, &s.set, 1)?.sigma(1), alpha_ds(&s.ambient, &s.set, b, options.mode)?)
                }
                TheoremId::HigherSteklovInfinite(k) => {
                    (grounded_dtn_spectrum(&s.ambient, &s.set, k)?.sigma(k), gamma_k_steklov(&s.ambient, &s.set, k, b)?)
                }
                _ => unreachable!("only family theorems reach here"),
            };
            Ok(step_check(theorem, s.index, lam, constant))
        })
        .collect::<Result<Vec<_>>>()?;
    finish_family(theorem, checks)
}

fn check_family_dirichlet_higher<T: Real>(k: usize, steps: &[TruncationStep<T>], b: &Budget) -> Result<BoundReport<T>> {
    let theorem = TheoremId::HigherDirichlet(k);
    let checks = steps
        .iter()
        .map(|s| {
            let g = s.ambient.graph();
            let lam = dirichlet_spectrum(g, &s.set, k)?.eigenvalues[k - 1];
            Ok(step_check(theorem, s.index, Extended::Finite(lam), gamma_k_dirichlet(g, &s.set, k, b)?))
        })
        .collect::<Result<Vec<_>>>()?;
    finish_family(theorem, checks)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EqualityStatus {
    /// `σ₁ = 2α_S` and a `{−1, 0, 1}` eigenfunction was exhibited.
    Certified,
    /// `σ₁ < 2α_S` and no such eigenfunction exists in the eigenspace.
    StrictGap,
    /// The first eigenspace has dimension above three.
    Undecided,
    /// Equality and the eigenfunction test disagree.
    Inconsistent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EqualityReport<T> {
    pub sigma1: T,
    pub alpha_s: T,
    /// `2α_S − σ₁`.
    pub gap: T,
    pub equal: bool,
    pub multiplicity: usize,
    pub status: EqualityStatus,
    /// Boundary vertices (ambient) and the eigenfunction's scaled values there.
    pub boundary_witness: Option<Vec<(usize, T)>>,
    /// `Cap(A, B)/(m(A)∧m(B))` for `A = {f = 1}`, `B = {f = −1}`; equals `σ₁/2`
    /// whenever a witness exists.
    pub witness_ratio: Option<T>,
    pub alpha_witness: Vec<Vec<usize>>,
}

/// Decides `σ₁ = 2α_S` and searches the `σ₁`-eigenspace for an
/// eigenfunction with boundary values in `{−1, 0, 1}` up to scale.
pub fn check_equality_case<T: Real>(domain: &SteklovDomain<T>, budget: &Budget) -> Result<EqualityReport<T>> {
    let nb = domain.n_boundary();
    if nb < 2 {
        return Err(Error::input("equality case needs at least two boundary vertices"));
    }
    let spec = steklov_spectrum(domain, nb)?;
    let alpha = alpha_steklov(domain, budget, Mode::Exact)?;
    let alpha_s = alpha.value.finite().expect("finite pair constant");
    let sigma1 = spec.eigenvalues[1];
    let rel = T::lit(1e-8);
    let equal = (sigma1 - T::lit(2.0) * alpha_s).abs() <= rel * sigma1.abs();
    let basis: Vec<Vec<T>> = (1..nb)
        .filter(|&j| (spec.eigenvalues[j] - sigma1).abs() <= rel * sigma1.abs())
        .map(|j| spec.eigenvectors[j][domain.n_interior()..].to_vec())
        .collect();
    let multiplicity = basis.len();
    let mut report = EqualityReport {
        sigma1,
        alpha_s,
        gap: T::lit(2.0) * alpha_s - sigma1,
        equal,
        multiplicity,
        status: EqualityStatus::Undecided,
        boundary_witness: None,
        witness_ratio: None,
        alpha_witness: alpha.witness,
    };
    if multiplicity > 3 {
        return Ok(report);
    }
    let found = ternary_representative(&basis, T::lit(1e-7));
    if let Some(values) = &found {
        let boundary = domain.boundary();
        let a: Vec<usize> = (0..nb).filter(|&i| values[i] > T::lit(0.5)).map(|i| boundary[i]).collect();
        let b: Vec<usize> = (0..nb).filter(|&i| values[i] < T::lit(-0.5)).map(|i| boundary[i]).collect();
        if !a.is_empty() && !b.is_empty() {
            let g = domain.graph();
            let c = cap(domain, &a, &b)?.value;
            report.witness_ratio = Some(c / g.mass_of(&a).min(g.mass_of(&b)));
        }
        report.boundary_witness = Some(boundary.iter().copied().zip(values.iter().copied()).collect());
    }
    report.status = match (equal, found.is_some()) {
        (true, true) => EqualityStatus::Certified,
        (false, false) => EqualityStatus::StrictGap,
        _ => EqualityStatus::Inconsistent,
    };
    Ok(report)
}

/// A combination of `basis` whose entries, scaled to max modulus 1, all lie
/// within `tol` of `{−1, 0, 1}`. Every such vector is fixed by its values on
/// a set of pivot rows, so trying all `3^d − 1` patterns there is exhaustive.
fn ternary_representative<T: Real>(basis: &[Vec<T>], tol: T) -> Option<Vec<T>> {
    let d = basis.len();
    if d == 0 {
        return None;
    }
    let n = basis[0].len();
    // pivot rows by Gaussian elimination with partial pivoting on the n×d matrix
    let mut rows: Vec<Vec<T>> = (0..n).map(|i| basis.iter().map(|v| v[i]).collect()).collect();
    let mut pivots = Vec::with_capacity(d);
    let mut used = vec![false; n];
    for col in 0..d {
        let (best, mag) = (0..n)
            .filter(|&i| !used[i])
            .map(|i| (i, rows[i][col].abs()))
            .fold((usize::MAX, T::zero()), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best == usize::MAX || mag <= T::epsilon() * T::lit(1e3) {
            return None;
        }
        used[best] = true;
        pivots.push(best);
        let p = rows[best].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if !used[i] {
                let f = row[col] / p[col];
                for c in col..d {
                    row[c] -= f * p[c];
                }
            }
        }
    }
    let sub = PivotSystem::new(basis, &pivots);
    let mut best: Option<Vec<T>> = None;
    for code in 1..3usize.pow(d as u32) {
        let mut t = Vec::with_capacity(d);
        let mut c = code;
        for _ in 0..d {
            t.push(T::of_usize(c % 3) - T::one());
            c /= 3;
        }
        let Some(coef) = sub.solve(&t) else { continue };
        let g: Vec<T> = (0..n).map(|i| basis.iter().zip(&coef).map(|(v, &c)| v[i] * c).sum()).collect();
        let top = g.iter().fold(T::zero(), |m, x| m.max(x.abs()));
        if top <= T::zero() {
            continue;
        }
        let g: Vec<T> = g.iter().map(|&x| x / top).collect();
        let snapped = g.iter().all(|&x| x.abs() <= tol || (x.abs() - T::one()).abs() <= tol);
        if snapped {
            let g: Vec<T> = g.iter().map(|&x| if x.abs() <= tol { T::zero() } else { x.signum() }).collect();
            // prefer the representative with fewest zeros, then the first found
            let zeros = |v: &Vec<T>| v.iter().filter(|x| **x == T::zero()).count();
            if best.as_ref().is_none_or(|b| zeros(&g) < zeros(b)) {
                best = Some(g);
            }
        }
    }
    best
}

/// The `d×d` system `basis[pivot rows] · c = t`.
struct PivotSystem<T> {
    a: Vec<Vec<T>>,
}

impl<T: Real> PivotSystem<T> {
    fn new(basis: &[Vec<T>], pivots: &[usize]) -> Self {
        Self { a: pivots.iter().map(|&r| basis.iter().map(|v| v[r]).collect()).collect() }
    }

    fn solve(&self, t: &[T]) -> Option<Vec<T>> {
        let d = t.len();
        let mut m: Vec<Vec<T>> = self.a.iter().zip(t).map(|(row, &x)| row.iter().copied().chain([x]).collect()).collect();
        for col in 0..d {
            let p = (col..d).max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap_or(std::cmp::Ordering::Equal))?;
            if m[p][col].abs() <= T::epsilon() {
                return None;
            }
            m.swap(col, p);
            for i in 0..d {
                if i != col {
                    let f = m[i][col] / m[col][col];
                    for c in col..=d {
                        let v = m[col][c];
                        m[i][c] -= f * v;
                    }
                }
            }
        }
        Some((0..d).map(|i| m[i][d] / m[i][i]).collect())
    }
}

/// Shape of seeded random instances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomConfig {
    pub max_closure: usize,
    pub min_interior: usize,
    pub min_boundary: usize,
    pub max_boundary: usize,
    /// Largest total vertex count, counting vertices outside the closure.
    pub max_vertices: usize,
    /// Weights and masses are `10^u` with `u` uniform in this range.
    pub log10_range: (f64, f64),
}

impl Default for RandomConfig {
    fn default() -> Self {
        Self { max_closure: 12, min_interior: 2, min_boundary: 2, max_boundary: 12, max_vertices: 12, log10_range: (-1.0, 1.0) }
    }
}

/// One connected weighted domain: a random spanning tree on the interior,
/// every boundary vertex attached to the interior, extra random edges
/// (boundary–boundary ones included, which the domain then ignores), and
/// possibly a few vertices outside the closure hanging off the boundary.
pub fn random_instance<T: Real>(rng: &mut ChaCha8Rng, cfg: &RandomConfig) -> Result<SteklovDomain<T>> {
    let min_i = cfg.min_interior.max(1);
    let closure_cap = cfg.max_closure.min(cfg.max_vertices);
    let max_b = cfg.max_boundary.min(closure_cap.saturating_sub(min_i));
    if cfg.min_boundary < 1 || cfg.min_boundary > max_b {
        return Err(Error::input("random instance configuration admits no domain"));
    }
    let (lo, hi) = cfg.log10_range;
    let draw = |rng: &mut ChaCha8Rng| T::lit(10f64.powf(rng.gen_range(lo..=hi)));
    let n = rng.gen_range(cfg.min_boundary + min_i..=closure_cap);
    let nb = rng.gen_range(cfg.min_boundary..=max_b.min(n - min_i));
    let ni = n - nb;
    let outside = if cfg.max_vertices > n && rng.gen_bool(0.3) { rng.gen_range(1..=(cfg.max_vertices - n).min(2)) } else { 0 };
    let total = n + outside;
    let masses: Vec<T> = (0..total).map(|_| draw(rng)).collect();
    let mut edges: Vec<(usize, usize, T)> = Vec::new();
    let has = |edges: &Vec<(usize, usize, T)>, a: usize, b: usize| edges.iter().any(|&(x, y, _)| (x, y) == (a.min(b), a.max(b)));
    for i in 1..ni {
        let j = rng.gen_range(0..i);
        edges.push((j, i, draw(rng)));
    }
    for z in ni..n {
        let x = rng.gen_range(0..ni);
        edges.push((x, z, draw(rng)));
    }
    for o in n..total {
        let z = rng.gen_range(ni..n);
        edges.push((z, o, draw(rng)));
    }
    let extra = rng.gen_range(0..=n);
    for _ in 0..extra {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b && !has(&edges, a, b) {
            edges.push((a.min(b), a.max(b), draw(rng)));
        }
    }
    let g = Arc::new(WeightedGraph::from_edges(&masses, &edges)?);
    SteklovDomain::new(g, &(0..ni).collect::<Vec<_>>())
}

/// `count` instances from one seeded stream.
pub fn random_campaign<T: Real>(seed: u64, count: usize, cfg: &RandomConfig) -> Result<Vec<SteklovDomain<T>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_instance(&mut rng, cfg)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignSummary<T> {
    pub theorem: TheoremId,
    pub reports: Vec<BoundReport<T>>,
    pub failures: usize,
    /// Minimum `empirical_c` over the campaign, for `c/k⁶` estimates.
    pub empirical_c: Option<T>,
}

/// Runs `theorem` on every instance (in parallel, results in input order).
pub fn run_campaign<T: Real>(theorem: TheoremId, instances: &[SteklovDomain<T>], options: &CheckOptions) -> Result<CampaignSummary<T>> {
    let reports = instances
        .par_iter()
        .map(|d| check(theorem, Instance::Domain(d), options))
        .collect::<Result<Vec<_>>>()?;
    let failures = reports.iter().filter(|r| !r.passed()).count();
    let empirical_c = reports.iter().filter_map(|r| r.empirical_c).fold(None, |m: Option<T>, c| Some(m.map_or(c, |m| m.min(c))));
    Ok(CampaignSummary { theorem, reports, failures, empirical_c })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{generate, generate_range, FamilyKind, FamilySpec};
    use crate::graph::make_domain;

    fn path_domain(n: usize) -> SteklovDomain<f64> {
        let g = Arc::new(WeightedGraph::unit_path(n));
        make_domain(&g, &(1..n).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn theorem_ids_round_trip() {
        for id in [
            TheoremId::Dirichlet1,
            TheoremId::Bottom,
            TheoremId::Neumann1,
            TheoremId::Steklov1,
            TheoremId::DtnBottom,
            TheoremId::HigherDirichlet(2),
            TheoremId::HigherSteklovFinite(3),
            TheoremId::HigherSteklovInfinite(2),
            TheoremId::HmSteklov1,
            TheoremId::HmHigher(1),
        ] {
            assert_eq!(id.to_string().parse::<TheoremId>().unwrap(), id);
        }
        assert_eq!("hm_higher:2".parse::<TheoremId>().unwrap(), TheoremId::HmHigher(2));
        assert!("steklov_1(2)".parse::<TheoremId>().is_err());
        assert!("higher_dirichlet".parse::<TheoremId>().is_err());
        assert!("higher_dirichlet(0)".parse::<TheoremId>().is_err());
    }

    #[test]
    fn steklov_on_path_is_tight() {
        for n in [2, 5, 9] {
            let d = path_domain(n);
            let r = check(TheoremId::Steklov1, Instance::Domain(&d), &CheckOptions::default()).unwrap();
            assert!(r.passed());
            assert!((r.ratio.unwrap() - 2.0).abs() < 1e-9);
            assert_eq!(r.witness, vec![vec![0], vec![n]]);
        }
    }

    #[test]
    fn branch_mismatch() {
        let d = path_domain(3);
        assert!(check(TheoremId::Bottom, Instance::Domain(&d), &CheckOptions::default()).is_err());
        let steps: Vec<TruncationStep<f64>> = vec![generate(&FamilySpec::new(FamilyKind::BinaryTree), 1).unwrap()];
        assert!(check(TheoremId::Steklov1, Instance::Family(&steps), &CheckOptions::default()).is_err());
    }

    #[test]
    fn equality_case_on_path() {
        let r = check_equality_case(&path_domain(6), &Budget::default()).unwrap();
        assert_eq!(r.status, EqualityStatus::Certified);
        let w = r.boundary_witness.unwrap();
        let mut vals: Vec<f64> = w.iter().map(|p| p.1).collect();
        vals.sort_by(f64::total_cmp);
        assert_eq!(vals, vec![-1.0, 1.0]);
        assert!((r.witness_ratio.unwrap() - r.sigma1 / 2.0).abs() < 1e-12);
    }

    #[test]
    fn ternary_search_finds_combination() {
        // span{(1,1,0,1), (0,1,1,0)} contains (1,0,−1,1)
        let basis = vec![vec![1.0, 1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0, 0.0]];
        let g = ternary_representative(&basis, 1e-9).unwrap();
        assert!(g.iter().all(|x| [-1.0, 0.0, 1.0].contains(x)));
        assert!(ternary_representative(&[vec![1.0, 0.5, 0.25]], 1e-9).is_none());
    }

    #[test]
    fn binary_tree_dtn_bottom() {
        let steps: Vec<TruncationStep<f64>> =
            generate_range(&FamilySpec::new(FamilyKind::BinaryTree), 1..=5).unwrap();
        let r = check(TheoremId::DtnBottom, Instance::Family(&steps), &CheckOptions::default()).unwrap();
        assert!(r.passed());
        assert_eq!(r.eigenvalues_monotone, Some(true));
        assert_eq!(r.constants_monotone, Some(true));
        let c = r.constant.finite().unwrap();
        assert!((c - 32.0 / 63.0).abs() < 1e-12);
    }

    #[test]
    fn random_instances_are_valid_and_reproducible() {
        let cfg = RandomConfig::default();
        let a: Vec<SteklovDomain<f64>> = random_campaign(7, 20, &cfg).unwrap();
        let b: Vec<SteklovDomain<f64>> = random_campaign(7, 20, &cfg).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.graph().edges(), y.graph().edges());
            assert!(x.n_closure() <= 12 && x.n_boundary() >= 2);
            assert!(x.graph().n() <= 12);
        }
    }

    #[test]
    fn small_campaign_passes() {
        let inst: Vec<SteklovDomain<f64>> = random_campaign(11, 10, &RandomConfig::default()).unwrap();
        for t in TheoremId::FINITE_FIRST_ORDER {
            let s = run_campaign(t, &inst, &CheckOptions::default()).unwrap();
            assert_eq!(s.failures, 0, "{t}");
        }
        let s = run_campaign(TheoremId::HigherSteklovFinite(1), &inst, &CheckOptions::default()).unwrap();
        assert_eq!(s.failures, 0);
        assert!(s.empirical_c.unwrap() > 0.0);
    }
}
