//! End-to-end acceptance run: one line per criterion, non-zero exit on any failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use isocap::capacity::{cap, cap_to_boundary, coarea_value};
use isocap::families::{generate, generate_range, half_space_bound, step_sink, FamilyKind, FamilySpec, MassRule};
use isocap::graph::{energy, green_residual, make_domain, PotentialField, SteklovDomain, WeightedGraph};
use isocap::isocap::{
    alpha_dirichlet, alpha_dirichlet_set, alpha_neumann, alpha_steklov, beta_s, dirichlet_network, hm_network,
    neumann_network, steklov_network, Budget, ConstantResult, Mode,
};
use isocap::spectra::{
    dirichlet_spectrum, grounded_dtn_spectrum, neumann_spectrum, steklov_spectrum, vanishing_weight_spectrum,
    VanishingMode, WeightSchedule,
};
use isocap::verify::{
    check, check_equality_case, random_campaign, run_campaign, CheckOptions, EqualityStatus, Instance, RandomConfig,
    TheoremId,
};
use isocap::capacity::CapacityNetwork;
use isocap::Extended;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Domain = SteklovDomain<f64>;

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(f64::MIN_POSITIVE)
}

fn path_domain(n: usize) -> Domain {
    let g = Arc::new(WeightedGraph::unit_path(n));
    make_domain(&g, &(1..n).collect::<Vec<_>>()).unwrap()
}

fn within(start: Instant, limit: Duration) -> String {
    let t = start.elapsed();
    assert!(t < limit, "took {t:?}, limit {limit:?}");
    format!("{:.2}s", t.as_secs_f64())
}

fn line_example() -> String {
    let start = Instant::now();
    for n in 2..=50 {
        let d = path_domain(n);
        let nf = n as f64;
        let c = cap(&d, &[0], &[n]).unwrap().value;
        assert!((c - 1.0 / nf).abs() <= 1e-12, "n = {n}: cap {c}");
        let a = alpha_steklov(&d, &Budget::default(), Mode::Exact).unwrap();
        assert!(rel_close(a.value.finite().unwrap(), 1.0 / nf, 1e-9), "n = {n}: alpha {:?}", a.value);
        let s = steklov_spectrum(&d, 2).unwrap().eigenvalues[1];
        assert!(rel_close(s, 2.0 / nf, 1e-9), "n = {n}: sigma {s}");
        let e = check_equality_case(&d, &Budget::default()).unwrap();
        assert_eq!(e.status, EqualityStatus::Certified, "n = {n}");
        let mut vals: Vec<f64> = e.boundary_witness.unwrap().iter().map(|p| p.1).collect();
        vals.sort_by(f64::total_cmp);
        assert_eq!(vals, vec![-1.0, 1.0], "n = {n}");
    }
    within(start, Duration::from_secs(1))
}

fn finite_tree() -> String {
    let start = Instant::now();
    let s = generate::<f64>(&FamilySpec::new(FamilyKind::T3), 1).unwrap();
    let d = &s.ambient;
    // x5, x6 | x7, x8 are the first four leaves
    let c = cap(d, &[4, 5], &[6, 7]).unwrap().value;
    assert!(rel_close(c, 1.0 / 3.0, 1e-9), "cap {c}");
    let r = check(TheoremId::Steklov1, Instance::Domain(d), &CheckOptions::default()).unwrap();
    let alpha = r.constant.finite().unwrap();
    let sigma = r.eigenvalue.finite().unwrap();
    assert!(rel_close(alpha, 1.0 / 6.0, 1e-9), "alpha {alpha}");
    assert!(rel_close(sigma, 1.0 / 3.0, 1e-9), "sigma {sigma}");
    assert!(rel_close(r.lower_bound.unwrap().finite().unwrap(), 1.0 / 48.0, 1e-9));
    assert!(rel_close(r.upper_bound.finite().unwrap(), 1.0 / 3.0, 1e-9));
    assert!(rel_close(r.upper_bound.finite().unwrap(), sigma, 1e-9), "upper bound not tight");
    assert!(r.passed());
    assert_eq!(r.witness, vec![vec![4, 5], vec![6, 7]]);
    within(start, Duration::from_secs(1))
}

fn infinite_tree() -> String {
    let start = Instant::now();
    let steps = generate_range::<f64>(&FamilySpec::new(FamilyKind::BinaryTree), 1..=12).unwrap();
    let mut prev = f64::INFINITY;
    for s in &steps {
        let i = s.index as u32;
        let c = cap(&s.ambient, &[0], &step_sink(s).unwrap()).unwrap().value;
        let want = 2f64.powi(i as i32) / (2f64.powi(i as i32 + 1) - 1.0);
        assert!(rel_close(c, want, 1e-9), "step {i}: cap {c}, want {want}");
        let sigma = grounded_dtn_spectrum(&s.ambient, &s.set, 1).unwrap().sigma(1).finite().unwrap();
        assert!(sigma <= prev * (1.0 + 1e-12), "step {i}: sigma rose from {prev} to {sigma}");
        prev = sigma;
    }
    assert!((prev - 0.5).abs() < 1e-3, "sigma at step 12 is {prev}");
    let r = check(TheoremId::DtnBottom, Instance::Family(&steps), &CheckOptions::default()).unwrap();
    assert!(r.passed());
    let lo = r.lower_bound.unwrap().finite().unwrap();
    let hi = r.upper_bound.finite().unwrap();
    assert!(lo <= 0.5 && 0.5 <= hi, "bracket [{lo}, {hi}]");
    assert!((lo - 0.125).abs() < 1e-3 && (hi - 0.5).abs() < 1e-3, "bracket [{lo}, {hi}]");
    format!("{} bracket [{lo:.6}, {hi:.6}], final sigma {prev:.6}", within(start, Duration::from_secs(5)))
}

fn half_space() -> String {
    let start = Instant::now();
    let bounds: Vec<f64> = [2, 4, 8].iter().map(|&r0| half_space_bound::<f64>(3, r0, 30).unwrap().bound).collect();
    assert!(bounds.windows(2).all(|w| w[1] < w[0]), "bounds not strictly decreasing: {bounds:?}");
    let scaled: Vec<f64> = bounds.iter().zip([2.0, 4.0, 8.0]).map(|(b, r)| b * r).collect();
    let (lo, hi) = scaled.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &x| (l.min(x), h.max(x)));
    assert!(hi <= 3.0 * lo, "bound * r0 spread too wide: {scaled:?}");
    format!(
        "{} bounds {:.4e} {:.4e} {:.4e}; steklov constant of the half-space tends to 0",
        within(start, Duration::from_secs(60)),
        bounds[0],
        bounds[1],
        bounds[2]
    )
}

fn random_field(rng: &mut ChaCha8Rng, d: &Domain) -> PotentialField<f64> {
    let values = d.closure().iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
    PotentialField::new(d.closure().to_vec(), values).unwrap()
}

fn randomized_campaign() -> String {
    let start = Instant::now();
    let inst: Vec<Domain> = random_campaign(20240601, 200, &RandomConfig::default()).unwrap();
    let opts = CheckOptions::default();
    for t in TheoremId::FINITE_FIRST_ORDER {
        let s = run_campaign(t, &inst, &opts).unwrap();
        assert_eq!(s.failures, 0, "{t}");
        assert!(s.reports.iter().all(|r| r.lower_ok == Some(true) && !r.heuristic), "{t}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst: f64 = 0.0;
    for d in &inst {
        let total_w: f64 = d.induced().edges().iter().map(|e| e.w).sum();
        for _ in 0..10 {
            let (f, g) = (random_field(&mut rng, d), random_field(&mut rng, d));
            let scale = total_w * 4.0;
            let r = green_residual(d, &f, &g).unwrap();
            assert!(r <= 1e-10 * scale, "green residual {r} at scale {scale}");
            worst = worst.max(r / scale);
        }
        for _ in 0..20 {
            let f = random_field(&mut rng, d);
            let c = coarea_value(d, &f).unwrap();
            let e = energy(d, &f, &f).unwrap();
            assert!(c <= 2.0 * e * (1.0 + 1e-12), "co-area {c} > 2 * energy {e}");
        }
    }
    format!("{} worst scaled green residual {worst:.1e}", within(start, Duration::from_secs(120)))
}

fn vanishing_weights() -> String {
    let start = Instant::now();
    // unit weights and masses on random topologies; the gap decays like 1/k with a
    // constant that grows with the mass spread
    let cfg = RandomConfig { log10_range: (0.0, 0.0), ..RandomConfig::default() };
    let inst: Vec<Domain> = random_campaign(77, 20, &cfg).unwrap();
    let schedule = WeightSchedule::powers_of_two(14);
    let (mut gap_s, mut gap_n) = (0.0f64, 0.0f64);
    for d in &inst {
        for (mode, target) in [
            (VanishingMode::Steklov, steklov_spectrum(d, 2).unwrap().eigenvalues[1]),
            (VanishingMode::Neumann, neumann_spectrum(d, 2).unwrap().eigenvalues[1]),
        ] {
            let seq: Vec<f64> =
                vanishing_weight_spectrum(d, mode, &schedule, 2).unwrap().iter().map(|r| r.eigenvalues[1]).collect();
            assert!(seq.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-9)), "{mode:?} not monotone: {seq:?}");
            let gap = (seq[seq.len() - 1] - target).abs();
            assert!(gap < 1e-3, "{mode:?}: final gap {gap}");
            match mode {
                VanishingMode::Steklov => gap_s = gap_s.max(gap),
                VanishingMode::Neumann => gap_n = gap_n.max(gap),
            }
        }
    }
    format!("{} largest final gaps {gap_s:.1e} (steklov), {gap_n:.1e} (neumann)", within(start, Duration::from_secs(600)))
}

fn higher_order() -> String {
    let start = Instant::now();
    let cfg = RandomConfig { max_closure: 10, min_interior: 3, min_boundary: 4, max_boundary: 6, max_vertices: 10, ..RandomConfig::default() };
    let inst: Vec<Domain> = random_campaign(4242, 50, &cfg).unwrap();
    let opts = CheckOptions { budget: Budget { part_cap: Some(6), ..Budget::default() }, mode: Mode::Exact };
    // minima frozen from a first run on this seed; a large drift means the constants changed
    let frozen = [0.125, 1.0, 19.5, 64.001, 643.616, 729.051];
    let mut notes = Vec::new();
    let mut frozen = frozen.iter();
    for k in 1..=3 {
        for t in [TheoremId::HigherSteklovFinite(k), TheoremId::HigherDirichlet(k)] {
            let s = run_campaign(t, &inst, &opts).unwrap();
            assert_eq!(s.failures, 0, "{t}");
            let c = s.empirical_c.expect("empirical constant");
            assert!(c > 0.0, "{t}: empirical c {c}");
            let f = frozen.next().unwrap();
            assert!((c / f - 1.0).abs() < 0.5, "{t}: empirical c {c} drifted from {f}");
            notes.push(format!("{t} c={c:.3}"));
        }
    }
    format!("{} {}", within(start, Duration::from_secs(300)), notes.join(", "))
}

/// Minimizes the energy over the closure with `1` on `a` and `0` on `b` by
/// Gauss-Seidel sweeps; independent of every factorization in the library.
fn coordinate_descent_cap(d: &Domain, a: &[usize], b: &[usize]) -> f64 {
    let g = d.induced();
    let la = d.to_local(a).unwrap();
    let lb = d.to_local(b).unwrap();
    let n = g.n();
    let mut f = vec![0.0; n];
    for &x in &la {
        f[x] = 1.0;
    }
    let free: Vec<usize> = (0..n).filter(|x| !la.contains(x) && !lb.contains(x)).collect();
    for _ in 0..1_000_000 {
        let mut change: f64 = 0.0;
        for &x in &free {
            let (num, den) = g.neighbors(x).iter().fold((0.0, 0.0), |(s, w), &(y, wy)| (s + wy * f[y], w + wy));
            let v = num / den;
            change = change.max((v - f[x]).abs());
            f[x] = v;
        }
        if change < 1e-15 {
            break;
        }
    }
    g.edges().iter().map(|e| e.w * (f[e.u] - f[e.v]).powi(2)).sum()
}

fn subsets_shuffled(n: usize, rng: &mut ChaCha8Rng) -> Vec<u64> {
    let mut all: Vec<u64> = (1..1u64 << n).collect();
    all.shuffle(rng);
    all
}

fn bits(m: u64) -> Vec<usize> {
    (0..64).filter(|i| m >> i & 1 == 1).collect()
}

fn ambient(net: &CapacityNetwork<f64>, m: u64) -> Vec<usize> {
    bits(m).into_iter().map(|i| net.vertices()[i]).collect()
}

type Best = Option<(f64, Vec<Vec<usize>>)>;

fn offer(best: &mut Best, value: f64, parts: Vec<Vec<usize>>) {
    let better = match best {
        None => true,
        Some((v, p)) => value.total_cmp(v).then_with(|| parts.cmp(p)).is_lt(),
    };
    if better {
        *best = Some((value, parts));
    }
}

fn reenumerate_single(net: &CapacityNetwork<f64>, rng: &mut ChaCha8Rng) -> (f64, Vec<Vec<usize>>) {
    let mut best = None;
    for m in subsets_shuffled(net.size(), rng) {
        offer(&mut best, net.cap_mask(m, 0).unwrap() / net.mass_of(m), vec![ambient(net, m)]);
    }
    best.unwrap()
}

fn reenumerate_pair(net: &CapacityNetwork<f64>, rng: &mut ChaCha8Rng) -> (f64, Vec<Vec<usize>>) {
    let n = net.size();
    let mut best = None;
    for a in subsets_shuffled(n, rng) {
        let rest = ((1u64 << n) - 1) & !a;
        let mut subs: Vec<u64> = Vec::new();
        let mut b = rest;
        while b != 0 {
            subs.push(b);
            b = (b - 1) & rest;
        }
        subs.shuffle(rng);
        for b in subs {
            // each unordered pair once, the part holding the smallest vertex first
            if (a & a.wrapping_neg()) > (b & b.wrapping_neg()) {
                continue;
            }
            let v = net.cap_mask(a, b).unwrap() / net.mass_of(a).min(net.mass_of(b));
            offer(&mut best, v, vec![ambient(net, a), ambient(net, b)]);
        }
    }
    best.unwrap()
}

fn same(label: &str, prod: &ConstantResult<f64>, oracle: (f64, Vec<Vec<usize>>)) {
    assert_eq!(prod.value, Extended::Finite(oracle.0), "{label}: value");
    assert_eq!(prod.witness, oracle.1, "{label}: witness");
}

fn oracle_equivalence() -> String {
    let start = Instant::now();
    let inst: Vec<Domain> = random_campaign(8, 50, &RandomConfig::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let b = Budget::default();
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for d in &inst {
        let closure = d.closure().to_vec();
        for _ in 0..5 {
            let mut shuffled = closure.clone();
            shuffled.shuffle(&mut rng);
            let na = rng.gen_range(1..closure.len());
            let nb = rng.gen_range(1..=closure.len() - na);
            let (a, rest) = shuffled.split_at(na);
            let bset = &rest[..nb];
            let exact = cap(d, a, bset).unwrap().value;
            let cd = coordinate_descent_cap(d, a, bset);
            let rel = (exact - cd).abs() / exact.abs().max(1e-300);
            assert!(rel <= 1e-8, "cap {exact} vs coordinate descent {cd}");
            worst = worst.max(rel);
        }
        let g = d.graph();
        same("alpha_d", &alpha_dirichlet(d, &b, Mode::Exact).unwrap(), reenumerate_single(&dirichlet_network(g, d.interior()).unwrap(), &mut rng));
        same("alpha_s", &alpha_steklov(d, &b, Mode::Exact).unwrap(), reenumerate_pair(&steklov_network(d).unwrap(), &mut rng));
        same("alpha_n", &alpha_neumann(d, &b, Mode::Exact).unwrap(), reenumerate_pair(&neumann_network(d).unwrap(), &mut rng));
        if g.n() > d.n_interior() {
            same("beta_s", &beta_s(g, d.interior(), &b, Mode::Exact).unwrap(), reenumerate_pair(&hm_network(g, d.interior()).unwrap(), &mut rng));
        }
        // production witnesses re-evaluated with the plain linear solve on the domain
        let ad = alpha_dirichlet(d, &b, Mode::Exact).unwrap();
        let w = &ad.witness[0];
        let direct = cap_to_boundary(d, w).unwrap().value / g.mass_of(w);
        assert!(rel_close(direct, ad.value.finite().unwrap(), 1e-10));
        let s = alpha_steklov(d, &b, Mode::Exact).unwrap();
        let (wa, wb) = (&s.witness[0], &s.witness[1]);
        let direct = cap(d, wa, wb).unwrap().value / g.mass_of(wa).min(g.mass_of(wb));
        assert!(rel_close(direct, s.value.finite().unwrap(), 1e-10));
        checked += 1;
    }
    format!("{} {checked} instances, worst capacity gap {worst:.1e}", within(start, Duration::from_secs(600)))
}

fn recurrence_probe() -> String {
    let start = Instant::now();
    let line = generate::<f64>(&FamilySpec::new(FamilyKind::LatticeBox { dim: 1 }), 200).unwrap();
    let a1 = alpha_dirichlet_set(line.ambient.graph(), &line.set, &Budget::default(), Mode::AllowHeuristic).unwrap();
    // a heuristic value is an attained ratio, hence an upper bound
    let a1 = a1.value.finite().unwrap();
    assert!(a1 < 1e-2, "line alpha_d at r = 200 is {a1}");
    let mut floors = Vec::new();
    for window in [2usize, 0] {
        let spec = FamilySpec::new(FamilyKind::LatticeBox { dim: 3 }).with_mass(MassRule::GeometricDecay { window });
        let mut floor = f64::INFINITY;
        for r in 2..=10 {
            let s = generate::<f64>(&spec, r).unwrap();
            // the first Dirichlet eigenvalue never exceeds the constant
            let lam = dirichlet_spectrum(s.ambient.graph(), &s.set, 1).unwrap().eigenvalues[0];
            assert!(lam > 0.0, "window {window}, r = {r}: lambda {lam}");
            floor = floor.min(lam);
        }
        floors.push(floor);
    }
    format!(
        "{} line alpha_d(200) <= {a1:.3e}; cubic floors {:.3e} (window 2), {:.3e} (summable)",
        within(start, Duration::from_secs(600)),
        floors[0],
        floors[1]
    )
}

type Criterion = (&'static str, fn() -> String);

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 line example", line_example),
        ("2 finite ternary tree", finite_tree),
        ("3 infinite binary tree", infinite_tree),
        ("4 half-space test field", half_space),
        ("5 randomized first-order campaign", randomized_campaign),
        ("6 vanishing-weight convergence", vanishing_weights),
        ("7 higher-order upper bounds", higher_order),
        ("8 oracle equivalence", oracle_equivalence),
        ("9 recurrence and transience probe", recurrence_probe),
    ];
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, run) in criteria {
        if !only.is_empty() && !only.iter().any(|o| name.contains(o.as_str())) {
            continue;
        }
        match catch_unwind(AssertUnwindSafe(run)) {
            Ok(note) => println!("criterion {name}: PASS ({note})"),
            Err(e) => {
                failed += 1;
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("criterion {name}: FAIL ({msg})");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
