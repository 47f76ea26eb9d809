//! Command-line surface of `isocap`: every subcommand prints one JSON
//! report on success.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 input or validation error,
//! 3 enumeration budget exceeded, 4 an inequality check failed (`verify`).

pub mod graph_file;
pub mod report;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use isocap::capacity::{cap, cap_to_boundary, coarea_value};
use isocap::families::{generate_range, step_sink, FamilySpec};
use isocap::graph::{energy, PotentialField, SteklovDomain, WeightedGraph};
use isocap::isocap::{
    alpha_dirichlet, alpha_dirichlet_limit, alpha_ds, alpha_neumann, alpha_steklov, beta_higher, beta_s,
    gamma_k_dirichlet, gamma_k_dirichlet_limit, gamma_k_steklov, gamma_k_steklov_limit, gamma_tilde_dirichlet,
    kappa_steklov, Budget, Mode, TruncationStep,
};
use isocap::spectra::{dirichlet_spectrum, grounded_dtn_spectrum, hm_dtn_spectrum, neumann_spectrum, steklov_spectrum};
use isocap::verify::{check, check_equality_case, random_campaign, run_campaign, CheckOptions, Instance, RandomConfig, TheoremId};
use isocap::Error;
use serde_json::json;

use graph_file::{parse_graph, GraphFile, ParseError};
use report::{ext, ids, num, nums, Document};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERICAL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_INEQUALITY: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "isocap", version, about = "Spectra and isocapacitary constants of weighted graphs")]
struct Cli {
    #[command(flatten)]
    budget: BudgetArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct BudgetArgs {
    /// Largest universe for single-set enumeration.
    #[arg(long, global = true)]
    budget_single: Option<usize>,
    /// Largest universe for set-pair enumeration.
    #[arg(long, global = true)]
    budget_pair: Option<usize>,
    /// Largest universe for tuple enumeration.
    #[arg(long, global = true)]
    budget_tuple: Option<usize>,
    /// Cap on the size of every tuple part.
    #[arg(long, global = true)]
    part_cap: Option<usize>,
    /// Fall back to level-set upper bounds when a budget is exceeded.
    #[arg(long, global = true)]
    heuristic: bool,
}

impl BudgetArgs {
    fn options(&self) -> CheckOptions {
        let mut b = Budget::default();
        if let Some(x) = self.budget_single {
            b.single = x;
        }
        if let Some(x) = self.budget_pair {
            b.pair = x;
        }
        if let Some(x) = self.budget_tuple {
            b.tuple = x;
        }
        b.part_cap = self.part_cap.or(b.part_cap);
        CheckOptions { budget: b, mode: if self.heuristic { Mode::AllowHeuristic } else { Mode::Exact } }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SpectrumKind {
    Dirichlet,
    Neumann,
    Steklov,
    Hm,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AlphaKind {
    D,
    N,
    S,
    Ds,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GammaKind {
    D,
    S,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Emit {
    Alpha,
    Cap,
    Sigma,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lowest eigenvalues; Neumann, Steklov and hm start at the trivial zero.
    Spectrum {
        kind: SpectrumKind,
        #[arg(short)]
        k: usize,
        file: PathBuf,
    },
    /// Capacity between two vertex sets, or from `A` to the vertex boundary.
    Cap {
        #[arg(short = 'A', value_delimiter = ',', required = true)]
        a: Vec<String>,
        #[arg(short = 'B', value_delimiter = ',')]
        b: Option<Vec<String>>,
        file: PathBuf,
    },
    /// First-order isocapacitary constant of the file's domain.
    Alpha {
        kind: AlphaKind,
        file: PathBuf,
        /// The set `Y` for `ds`.
        #[arg(long, value_delimiter = ',')]
        set: Option<Vec<String>>,
    },
    /// Higher-order constant of a set, from a file or along a family.
    Gamma {
        kind: GammaKind,
        #[arg(short)]
        k: usize,
        file: Option<PathBuf>,
        /// Set `W`; defaults to the file's interior for `d`.
        #[arg(long, value_delimiter = ',')]
        set: Option<Vec<String>>,
        /// Use the tuple constant over all of `W` instead of its sub-tuples (`d` only).
        #[arg(long)]
        tilde: bool,
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        steps: Option<String>,
    },
    /// Tuple constant of arity `k + 1` over the closure.
    Kappa {
        #[arg(short)]
        k: usize,
        file: PathBuf,
    },
    /// Constant of the full-graph Dirichlet-to-Neumann map; `-k` selects the tuple version.
    Beta {
        #[arg(short)]
        k: Option<usize>,
        file: PathBuf,
    },
    /// Both sides of an eigenvalue estimate.
    Verify {
        theorem: String,
        file: Option<PathBuf>,
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        steps: Option<String>,
        /// Number of seeded random instances.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 12)]
        max_closure: usize,
        #[arg(long, default_value_t = 12)]
        max_boundary: usize,
        #[arg(long, default_value_t = 2)]
        min_boundary: usize,
        /// Also decide the equality case of the Steklov estimate.
        #[arg(long)]
        equality: bool,
    },
    /// Per-step values along an exhaustion family.
    Family {
        spec: String,
        #[arg(long)]
        steps: Option<String>,
        #[arg(long, value_enum)]
        emit: Emit,
    },
    /// Co-area integral and energy of a field given as `id,value` rows.
    Coarea {
        file: PathBuf,
        #[arg(long)]
        field: PathBuf,
    },
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Parse(String, ParseError),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Core(Error::Budget { .. }) => EXIT_BUDGET,
            Failure::Core(Error::Singular(_) | Error::Numerical(_)) => EXIT_NUMERICAL,
            _ => EXIT_INPUT,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Core(e) => e.to_string(),
            Failure::Parse(path, e) => format!("{path}: {e}"),
            Failure::Input(m) => m.clone(),
        }
    }
}

type Res<T> = std::result::Result<T, Failure>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `argv` (program name first) and runs the command.
pub fn run_command<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    if let Err(e) = configure_threads() {
        return Outcome { code: EXIT_INPUT, stdout: String::new(), stderr: format!("error: {}\n", e.message()) };
    }
    let options = cli.budget.options();
    match dispatch(cli.command, &options) {
        Ok((doc, passed)) => {
            let mut doc = doc;
            doc.budget = Some(options.budget);
            Outcome { code: if passed { EXIT_OK } else { EXIT_INEQUALITY }, stdout: doc.render(), stderr: String::new() }
        }
        Err(e) => Outcome { code: e.code(), stdout: String::new(), stderr: format!("error: {}\n", e.message()) },
    }
}

fn configure_threads() -> Res<()> {
    let Ok(v) = std::env::var("ISOCAP_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Input(format!("ISOCAP_THREADS must be a positive integer, got `{v}`")))?;
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn load(path: &Path) -> Res<GraphFile> {
    let name = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{name}: {e}")))?;
    parse_graph(&text).map_err(|e| Failure::Parse(name, e))
}

fn load_domain(path: &Path) -> Res<(GraphFile, SteklovDomain<f64>)> {
    let f = load(path)?;
    let d = f.domain()?;
    Ok((f, d))
}

fn domain_doc(path: &Path, d: &SteklovDomain<f64>) -> Document {
    Document::new(report::graph_instance(&path.display().to_string(), d.graph(), Some((d.n_interior(), d.n_boundary()))))
}

fn lookup(g: &WeightedGraph<f64>, names: &[String]) -> Res<Vec<usize>> {
    Ok(g.indices_of(names)?)
}

/// `a..b`, `a..=b` or a single `a`, inclusive.
pub fn parse_steps(s: &str) -> Option<std::ops::RangeInclusive<usize>> {
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a, b.strip_prefix('=').unwrap_or(b)),
        None => (s, s),
    };
    let (a, b) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
    (a <= b).then_some(a..=b)
}

fn family_steps(spec: &str, steps: Option<&str>) -> Res<(FamilySpec, Vec<TruncationStep<f64>>)> {
    let spec: FamilySpec = spec.parse()?;
    let range = match steps {
        Some(s) => parse_steps(s).ok_or_else(|| Failure::Input(format!("bad step range `{s}`, expected a..b")))?,
        None => spec.min_step()..=spec.max_step.min(spec.min_step() + 9),
    };
    let steps = generate_range(&spec, range)?;
    Ok((spec, steps))
}

fn family_doc(spec: &FamilySpec, steps: &[TruncationStep<f64>]) -> Document {
    let last = steps.last().expect("non-empty range");
    Document::new(json!({
        "source": spec.to_string(),
        "steps": steps.iter().map(|s| s.index).collect::<Vec<_>>(),
        "vertices": last.ambient.graph().n(),
        "interior": last.ambient.n_interior(),
        "boundary": last.ambient.n_boundary(),
    }))
}

fn dispatch(cmd: Command, o: &CheckOptions) -> Res<(Document, bool)> {
    let b = &o.budget;
    let mode = o.mode;
    match cmd {
        Command::Spectrum { kind, k, file } => {
            let (f, d) = load_domain(&file)?;
            let g = d.graph();
            let (name, r) = match kind {
                SpectrumKind::Dirichlet => ("dirichlet", dirichlet_spectrum(g, d.interior(), k)?),
                SpectrumKind::Neumann => ("neumann", neumann_spectrum(&d, k)?),
                SpectrumKind::Steklov => ("steklov", steklov_spectrum(&d, k)?),
                SpectrumKind::Hm => ("hm", hm_dtn_spectrum(&f.graph, d.interior(), k)?),
            };
            let mut doc = domain_doc(&file, &d);
            doc.results.push(json!({
                "spectrum": name,
                "eigenvalues": nums(&r.eigenvalues),
                "support": ids(g, &r.support),
                "residual_norm": num(r.residual_norm),
            }));
            doc.residuals.push(r.residual_norm);
            Ok((doc, true))
        }
        Command::Cap { a, b: sink, file } => {
            let (_, d) = load_domain(&file)?;
            let g = d.graph();
            let a = lookup(g, &a)?;
            let r = match sink {
                Some(s) => cap(&d, &a, &lookup(g, &s)?)?,
                None => cap_to_boundary(&d, &a)?,
            };
            let mut doc = domain_doc(&file, &d);
            doc.results.push(json!({
                "capacity": num(r.value),
                "source": ids(g, &r.source),
                "sink": ids(g, &r.sink),
            }));
            Ok((doc, true))
        }
        Command::Alpha { kind, file, set } => {
            let (_, d) = load_domain(&file)?;
            let g = d.graph();
            let (name, c) = match kind {
                AlphaKind::D => ("alpha_d", alpha_dirichlet(&d, b, mode)?),
                AlphaKind::N => ("alpha_n", alpha_neumann(&d, b, mode)?),
                AlphaKind::S => ("alpha_s", alpha_steklov(&d, b, mode)?),
                AlphaKind::Ds => {
                    let y = set.ok_or_else(|| Failure::Input("`alpha ds` needs --set".into()))?;
                    ("alpha_ds", alpha_ds(&d, &lookup(g, &y)?, b, mode)?)
                }
            };
            let mut doc = domain_doc(&file, &d);
            doc.note_constant(&c);
            doc.results.push(report::constant(g, name, &c));
            Ok((doc, true))
        }
        Command::Gamma { kind, k, file, set, tilde, family, steps } => match (file, family) {
            (Some(file), None) => {
                let (_, d) = load_domain(&file)?;
                let g = d.graph();
                let (name, c) = match kind {
                    GammaKind::D => {
                        let w = match set {
                            Some(s) => lookup(g, &s)?,
                            None => d.interior().to_vec(),
                        };
                        if tilde {
                            ("gamma_tilde_d", gamma_tilde_dirichlet(g, &w, k, b)?)
                        } else {
                            ("gamma_d", gamma_k_dirichlet(g, &w, k, b)?)
                        }
                    }
                    GammaKind::S => {
                        let w = set.ok_or_else(|| Failure::Input("`gamma s` needs --set".into()))?;
                        ("gamma_s", gamma_k_steklov(&d, &lookup(g, &w)?, k, b)?)
                    }
                };
                let mut doc = domain_doc(&file, &d);
                doc.note_constant(&c);
                doc.results.push(report::constant(g, name, &c));
                Ok((doc, true))
            }
            (None, Some(spec)) => {
                let (spec, steps) = family_steps(&spec, steps.as_deref())?;
                let (name, r) = match kind {
                    GammaKind::D => ("gamma_d", gamma_k_dirichlet_limit(&steps, k, b)?),
                    GammaKind::S => ("gamma_s", gamma_k_steklov_limit(&steps, k, b)?),
                };
                let mut doc = family_doc(&spec, &steps);
                r.steps.iter().for_each(|c| doc.note_constant(c));
                let graphs: Vec<&WeightedGraph<f64>> = steps.iter().map(|s| s.ambient.graph().as_ref()).collect();
                doc.results.push(report::limit(&graphs, name, &r.indices, &r));
                Ok((doc, true))
            }
            _ => Err(Failure::Input("give exactly one of a graph file or --family".into())),
        },
        Command::Kappa { k, file } => {
            let (_, d) = load_domain(&file)?;
            let c = kappa_steklov(&d, k, b)?;
            let mut doc = domain_doc(&file, &d);
            doc.note_constant(&c);
            doc.results.push(report::constant(d.graph(), "kappa", &c));
            Ok((doc, true))
        }
        Command::Beta { k, file } => {
            let (f, d) = load_domain(&file)?;
            let c = match k {
                None => beta_s(&f.graph, d.interior(), b, mode)?,
                Some(k) => beta_higher(&f.graph, d.interior(), k, b)?,
            };
            let mut doc = domain_doc(&file, &d);
            doc.note_constant(&c);
            doc.results.push(report::constant(&f.graph, if k.is_some() { "beta_k" } else { "beta_s" }, &c));
            Ok((doc, true))
        }
        Command::Verify { theorem, file, family, steps, random, seed, max_closure, max_boundary, min_boundary, equality } => {
            let theorem: TheoremId = theorem.parse()?;
            match (file, family, random) {
                (Some(file), None, None) => {
                    let (_, d) = load_domain(&file)?;
                    let r = check(theorem, Instance::Domain(&d), o)?;
                    let mut doc = domain_doc(&file, &d);
                    doc.evaluations += r.evaluations;
                    doc.heuristic |= r.heuristic;
                    doc.results.push(report::bound(&[d.graph()], &r));
                    let mut passed = r.passed();
                    if equality {
                        let e = check_equality_case(&d, b)?;
                        passed &= e.status != isocap::verify::EqualityStatus::Inconsistent;
                        doc.results.push(report::equality(d.graph(), &e));
                    }
                    Ok((doc, passed))
                }
                (None, Some(spec), None) => {
                    let (spec, steps) = family_steps(&spec, steps.as_deref())?;
                    let r = check(theorem, Instance::Family(&steps), o)?;
                    let mut doc = family_doc(&spec, &steps);
                    doc.evaluations += r.evaluations;
                    doc.heuristic |= r.heuristic;
                    let graphs: Vec<&WeightedGraph<f64>> = steps.iter().map(|s| s.ambient.graph().as_ref()).collect();
                    doc.results.push(report::bound(&graphs, &r));
                    Ok((doc, r.passed()))
                }
                (None, None, Some(count)) => {
                    let cfg = RandomConfig { max_closure, max_boundary, min_boundary, max_vertices: max_closure, ..RandomConfig::default() };
                    let inst = random_campaign::<f64>(seed, count, &cfg)?;
                    let s = run_campaign(theorem, &inst, o)?;
                    let mut doc = Document::new(json!({
                        "source": format!("random(seed={seed}, count={count})"),
                        "instances": count,
                        "max_closure": max_closure,
                        "boundary": [min_boundary, max_boundary],
                    }));
                    for r in &s.reports {
                        doc.evaluations += r.evaluations;
                        doc.heuristic |= r.heuristic;
                    }
                    let graphs: Vec<&WeightedGraph<f64>> = inst.iter().map(|d| d.graph().as_ref()).collect();
                    doc.results.push(report::campaign(&graphs, &s));
                    Ok((doc, s.failures == 0))
                }
                _ => Err(Failure::Input("give exactly one of a graph file, --family or --random".into())),
            }
        }
        Command::Family { spec, steps, emit } => {
            let (spec, steps) = family_steps(&spec, steps.as_deref())?;
            let mut doc = family_doc(&spec, &steps);
            let graphs: Vec<&WeightedGraph<f64>> = steps.iter().map(|s| s.ambient.graph().as_ref()).collect();
            match emit {
                Emit::Cap => {
                    let rows = steps
                        .iter()
                        .map(|s| {
                            let sink = step_sink(s)?;
                            let c = cap(&s.ambient, &[0], &sink)?.value;
                            Ok(json!({"step": s.index, "capacity": num(c)}))
                        })
                        .collect::<Res<Vec<_>>>()?;
                    let source = steps[0].ambient.graph().id(0).to_string();
                    doc.results.push(json!({"emit": "cap", "source": source, "sink": "vertex boundary of the step set", "rows": rows}));
                }
                Emit::Alpha => {
                    let r = alpha_dirichlet_limit(&steps, b, mode)?;
                    r.steps.iter().for_each(|c| doc.note_constant(c));
                    doc.results.push(report::limit(&graphs, "alpha_d", &r.indices, &r));
                }
                Emit::Sigma => {
                    let rows = steps
                        .iter()
                        .map(|s| {
                            let sigma = grounded_dtn_spectrum(&s.ambient, &s.set, 1)?.sigma(1);
                            Ok(json!({"step": s.index, "sigma_1": ext(sigma)}))
                        })
                        .collect::<Res<Vec<_>>>()?;
                    doc.results.push(json!({"emit": "sigma", "rows": rows}));
                }
            }
            Ok((doc, true))
        }
        Command::Coarea { file, field } => {
            let (_, d) = load_domain(&file)?;
            let name = field.display().to_string();
            let text = std::fs::read_to_string(&field).map_err(|e| Failure::Input(format!("{name}: {e}")))?;
            let f = parse_field(&text, d.graph()).map_err(|e| Failure::Input(format!("{name}: {e}")))?;
            let f = fill_closure(&d, &f);
            let c = coarea_value(&d, &f)?;
            let e = energy(&d, &f, &f)?;
            let mut doc = domain_doc(&file, &d);
            doc.results.push(json!({"coarea": num(c), "energy": num(e)}));
            Ok((doc, true))
        }
    }
}

/// `id,value` rows; blank lines, `#` comments and a non-numeric header row are skipped.
fn parse_field(text: &str, g: &WeightedGraph<f64>) -> std::result::Result<Vec<(usize, f64)>, String> {
    let mut out: Vec<(usize, f64)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (id, val) = line.split_once(',').ok_or_else(|| format!("line {}: expected `id,value`", i + 1))?;
        let (id, val) = (id.trim(), val.trim());
        let Ok(x) = val.parse::<f64>() else {
            if out.is_empty() && i == 0 {
                continue;
            }
            return Err(format!("line {}: `{val}` is not a number", i + 1));
        };
        if !x.is_finite() {
            return Err(format!("line {}: value must be finite", i + 1));
        }
        let v = g.index_of(id).ok_or_else(|| format!("line {}: undeclared vertex `{id}`", i + 1))?;
        if out.iter().any(|p| p.0 == v) {
            return Err(format!("line {}: vertex `{id}` listed twice", i + 1));
        }
        out.push((v, x));
    }
    Ok(out)
}

/// Closure vertices missing from the file take the value 0.
fn fill_closure(d: &SteklovDomain<f64>, rows: &[(usize, f64)]) -> PotentialField<f64> {
    let values = d.closure().iter().map(|v| rows.iter().find(|p| p.0 == *v).map_or(0.0, |p| p.1)).collect();
    d.field(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_ranges() {
        assert_eq!(parse_steps("1..12"), Some(1..=12));
        assert_eq!(parse_steps("3..=5"), Some(3..=5));
        assert_eq!(parse_steps("4"), Some(4..=4));
        assert_eq!(parse_steps("5..2"), None);
        assert_eq!(parse_steps("a..2"), None);
    }

    #[test]
    fn field_rows() {
        let g: WeightedGraph<f64> = WeightedGraph::unit_path(2);
        assert_eq!(parse_field("id,value\n0,1\n# c\n2, -0.5\n", &g).unwrap(), vec![(0, 1.0), (2, -0.5)]);
        assert!(parse_field("0,1\n0,2\n", &g).is_err());
        assert!(parse_field("0,1\n9,2\n", &g).is_err());
        assert!(parse_field("0,1\n1,x\n", &g).is_err());
    }
}
