//! JSON report documents. Numbers carry 17 significant digits; `+∞` is the
//! string `"infinite"`.

use isocap::families::HalfSpaceBound;
use isocap::graph::WeightedGraph;
use isocap::isocap::{Budget, ConstantResult, LimitReport};
use isocap::verify::{BoundReport, CampaignSummary, EqualityReport, StepCheck};
use isocap::Extended;
use serde_json::{json, Map, Number, Value};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    // `{:e}` output is valid JSON and arbitrary_precision keeps the digits verbatim
    let text = format!("{x:.16e}");
    Value::Number(serde_json::from_str::<Number>(&text).expect("formatted float is a JSON number"))
}

pub fn ext(x: Extended<f64>) -> Value {
    match x {
        Extended::Finite(v) => num(v),
        Extended::Infinite => Value::String("infinite".into()),
    }
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

pub fn opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

pub fn ids(g: &WeightedGraph<f64>, set: &[usize]) -> Value {
    Value::Array(set.iter().map(|&v| Value::String(g.id(v).to_string())).collect())
}

pub fn witness(g: &WeightedGraph<f64>, parts: &[Vec<usize>]) -> Value {
    Value::Array(parts.iter().map(|p| ids(g, p)).collect())
}

pub fn budget(b: &Budget) -> Value {
    json!({
        "single": b.single,
        "pair": b.pair,
        "tuple": b.tuple,
        "part_cap": b.part_cap,
        "level_sets": b.level_sets,
        "singletons": b.singletons,
    })
}

pub fn constant(g: &WeightedGraph<f64>, name: &str, c: &ConstantResult<f64>) -> Value {
    json!({
        "constant": name,
        "value": ext(c.value),
        "witness": witness(g, &c.witness),
        "evaluations": c.evaluations,
        "heuristic": c.heuristic,
    })
}

pub fn limit(g: &[&WeightedGraph<f64>], name: &str, indices: &[usize], r: &LimitReport<f64>) -> Value {
    let steps: Vec<Value> = r
        .steps
        .iter()
        .zip(indices)
        .zip(g)
        .map(|((c, &i), g)| {
            let mut v = constant(g, name, c);
            v.as_object_mut().expect("object").insert("step".into(), json!(i));
            v
        })
        .collect();
    json!({
        "constant": name,
        "steps": steps,
        "limit_estimate": ext(r.limit_estimate),
        "error_bar": ext(r.error_bar),
        "monotone": r.monotone,
    })
}

fn step_check(g: &WeightedGraph<f64>, s: &StepCheck<f64>) -> Value {
    json!({
        "step": s.index,
        "eigenvalue": ext(s.eigenvalue),
        "constant": ext(s.constant.value),
        "witness": witness(g, &s.constant.witness),
        "heuristic": s.constant.heuristic,
        "lower_ok": s.lower_ok,
        "upper_ok": s.upper_ok,
    })
}

/// `graphs[j]` is the graph the `j`-th step's witness indexes into; for a
/// single domain only `graphs[0]` is used.
pub fn bound(graphs: &[&WeightedGraph<f64>], r: &BoundReport<f64>) -> Value {
    let last = graphs.last().expect("at least one graph");
    let mut m = Map::new();
    m.insert("theorem".into(), json!(r.theorem.to_string()));
    m.insert("passed".into(), json!(r.passed()));
    m.insert("eigenvalue".into(), ext(r.eigenvalue));
    m.insert("constant".into(), ext(r.constant));
    m.insert("lower_factor".into(), opt(r.lower_factor));
    m.insert("upper_factor".into(), num(r.upper_factor));
    m.insert("lower_bound".into(), r.lower_bound.map_or(Value::Null, ext));
    m.insert("upper_bound".into(), ext(r.upper_bound));
    m.insert("lower_ok".into(), json!(r.lower_ok));
    m.insert("upper_ok".into(), json!(r.upper_ok));
    m.insert("ratio".into(), opt(r.ratio));
    m.insert("witness".into(), witness(last, &r.witness));
    m.insert("empirical_c".into(), opt(r.empirical_c));
    m.insert("heuristic".into(), json!(r.heuristic));
    if !r.steps.is_empty() {
        let steps: Vec<Value> = r.steps.iter().zip(graphs).map(|(s, g)| step_check(g, s)).collect();
        m.insert("steps".into(), Value::Array(steps));
        m.insert("eigenvalues_monotone".into(), json!(r.eigenvalues_monotone));
        m.insert("constants_monotone".into(), json!(r.constants_monotone));
    }
    Value::Object(m)
}

pub fn equality(g: &WeightedGraph<f64>, r: &EqualityReport<f64>) -> Value {
    let w = r.boundary_witness.as_ref().map(|w| {
        Value::Array(w.iter().map(|&(v, x)| json!({"vertex": g.id(v), "value": num(x)})).collect())
    });
    json!({
        "equality_case": format!("{:?}", r.status).to_lowercase(),
        "sigma_1": num(r.sigma1),
        "alpha_s": num(r.alpha_s),
        "gap": num(r.gap),
        "equal": r.equal,
        "multiplicity": r.multiplicity,
        "boundary_witness": w.unwrap_or(Value::Null),
        "witness_ratio": opt(r.witness_ratio),
    })
}

pub fn campaign(graphs: &[&WeightedGraph<f64>], s: &CampaignSummary<f64>) -> Value {
    let reports: Vec<Value> = s.reports.iter().zip(graphs).map(|(r, g)| bound(&[g], r)).collect();
    json!({
        "theorem": s.theorem.to_string(),
        "instances": s.reports.len(),
        "failures": s.failures,
        "empirical_c_min": opt(s.empirical_c),
        "reports": reports,
    })
}

pub fn half_space(b: &HalfSpaceBound<f64>) -> Value {
    json!({
        "r0": b.r0,
        "radius": b.radius,
        "energy": num(b.energy),
        "source_mass": num(b.source_mass),
        "bound": num(b.bound),
    })
}

pub struct Document {
    pub instance: Value,
    pub results: Vec<Value>,
    pub residuals: Vec<f64>,
    pub evaluations: u64,
    pub budget: Option<Budget>,
    pub heuristic: bool,
}

impl Document {
    pub fn new(instance: Value) -> Self {
        Self { instance, results: Vec::new(), residuals: Vec::new(), evaluations: 0, budget: None, heuristic: false }
    }

    pub fn note_constant(&mut self, c: &ConstantResult<f64>) {
        self.evaluations += c.evaluations;
        self.heuristic |= c.heuristic;
    }

    pub fn render(&self) -> String {
        let doc = json!({
            "tool_version": TOOL_VERSION,
            "instance": self.instance,
            "results": self.results,
            "diagnostics": {
                "residuals": nums(&self.residuals),
                "evaluations": self.evaluations,
                "budget": self.budget.as_ref().map_or(Value::Null, budget),
                "heuristic": self.heuristic,
            },
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
        s.push('\n');
        s
    }
}

pub fn graph_instance(source: &str, g: &WeightedGraph<f64>, omega: Option<(usize, usize)>) -> Value {
    json!({
        "source": source,
        "vertices": g.n(),
        "interior": omega.map(|o| o.0),
        "boundary": omega.map(|o| o.1),
    })
}
