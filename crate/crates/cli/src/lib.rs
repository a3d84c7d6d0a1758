//! Command dispatch and report rendering for the `circorder` binary.

use std::io::Write;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

use circorder::enumeration::{
    brute_force_ball_orders, brute_force_co_cyclic, enumerate_co, enumerate_lo_tararin, materialize_all, EnumError,
    EnumOptions,
};
use circorder::orders::linear_circular_order;
use circorder::parse::{parse_spec_str, SpecFileError};
use circorder::perturb::{
    build_phi, default_m, parse_embedding, perturb_nontorsion, perturb_prufer, verify_phi, PerturbError,
};
use circorder::realization::{realize, rot_homomorphism_check};
use circorder::tararin::{promislow, t_data, tararin_test, TararinOutcome, VirtuallyAbelianData};
use circorder::{ball, compute_a, fixtures, Element, GroupSpec};

pub const SCHEMA: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "circorder", version, about = "Circular and left orders on finite extensions of Tararin groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a group spec and classify its Tararin part.
    Check {
        spec: String,
        #[arg(long)]
        json: bool,
    },
    /// Counting factors of the circular orders (left orders when n = 0).
    Count {
        spec: String,
        #[arg(long)]
        json: bool,
    },
    /// List every order, checked and separated on a ball.
    Enumerate {
        spec: String,
        #[arg(long, default_value_t = 3)]
        ball_radius: usize,
        #[arg(long)]
        json: bool,
    },
    /// Left-invariant cyclic orders of Z_n by exhaustion.
    BruteCyclic {
        n: u32,
        #[arg(long)]
        list: bool,
        #[arg(long)]
        json: bool,
    },
    /// Positive cones on a word ball by backtracking.
    BruteBall {
        spec: String,
        #[arg(long, default_value_t = 2)]
        radius: usize,
        #[arg(long)]
        json: bool,
    },
    /// Place a ball on the circle and estimate rotation numbers.
    Realize {
        spec: String,
        #[arg(long, default_value_t = 0)]
        order: usize,
        #[arg(long, default_value_t = 4)]
        ball: usize,
        #[arg(long, default_value_t = 200)]
        iters: usize,
        #[arg(long, default_value_t = 0.05)]
        tolerance: f64,
        #[arg(long)]
        emit_points: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Perturb an embedded Abelian group, or build the rank-one embedding.
    Perturb {
        #[arg(long, value_enum)]
        mode: Mode,
        /// Embedding file (nontorsion and prufer modes).
        #[arg(long)]
        input: Option<String>,
        /// Comma-separated elements the perturbed order must agree on.
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        agree_on: String,
        /// Index of H in A (phi mode).
        #[arg(long, default_value_t = 1)]
        k: u32,
        /// The element t̂^k of H (phi mode).
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        h0: String,
        #[arg(long)]
        json: bool,
    },
    /// List built-in fixtures, or print one.
    Fixtures {
        name: Option<String>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Nontorsion,
    Prufer,
    Phi,
}

/// A domain failure: exit code 1 with the owning module's error name.
#[derive(Debug)]
struct Failure {
    name: String,
    message: String,
    report: Option<Value>,
}

impl Failure {
    fn new(name: &str, message: impl Into<String>) -> Self {
        Failure { name: name.to_string(), message: message.into(), report: None }
    }
}

impl From<SpecFileError> for Failure {
    fn from(e: SpecFileError) -> Self {
        Failure::new(e.name(), e.to_string())
    }
}

impl From<EnumError> for Failure {
    fn from(e: EnumError) -> Self {
        Failure::new(e.name(), e.to_string())
    }
}

impl From<PerturbError> for Failure {
    fn from(e: PerturbError) -> Self {
        Failure::new(e.name(), e.to_string())
    }
}

enum Input {
    Spec(GroupSpec),
    Data(VirtuallyAbelianData),
}

fn load(arg: &str) -> Result<Input, Failure> {
    if let Some(name) = arg.strip_prefix("fixtures:") {
        if name == "promislow" {
            return Ok(Input::Data(promislow()));
        }
        return fixtures::fixture(name)
            .map(Input::Spec)
            .ok_or_else(|| Failure::new("UnknownFixture", format!("no fixture named `{name}`")));
    }
    let text = std::fs::read_to_string(arg).map_err(|e| Failure::new("IoError", format!("{arg}: {e}")))?;
    Ok(Input::Spec(parse_spec_str(&text)?))
}

fn load_spec(arg: &str) -> Result<GroupSpec, Failure> {
    match load(arg)? {
        Input::Spec(s) => Ok(s),
        Input::Data(_) => Err(Failure::new("Unclassified", "data-only fixture: no group presentation")),
    }
}

fn outcome_json(o: &TararinOutcome) -> Value {
    match o {
        TararinOutcome::Accept(chain) => json!({"verdict": "accept", "chain": chain.covectors}),
        TararinOutcome::Reject { reason, depth } => {
            json!({"verdict": "reject", "reason": reason.to_string(), "depth": depth})
        }
    }
}

fn cmd_check(arg: &str) -> Result<Value, Failure> {
    match load(arg)? {
        Input::Data(d) => {
            d.validate().map_err(|e| Failure::new("MalformedData", e.to_string()))?;
            let o = tararin_test(&d).map_err(|e| Failure::new("MalformedData", e.to_string()))?;
            Ok(
                json!({"kind": "data", "valid": true, "rank": d.rank, "cosets": d.cosets(), "tararin": outcome_json(&o)}),
            )
        }
        Input::Spec(s) => {
            let lattice = compute_a(&s).map_err(|e| Failure::new("AbelianityViolation", e.to_string()))?;
            let t = s.t_spec();
            let kd = t_data(&t).map_err(|e| Failure::new(e.name(), e.to_string()))?;
            let o = tararin_test(&kd.data).map_err(|e| Failure::new("MalformedData", e.to_string()))?;
            let basis: Vec<String> = lattice.basis_elements().iter().map(|g| g.to_string()).collect();
            Ok(json!({
                "kind": "spec",
                "consistent": true,
                "rank": s.rank(),
                "n": s.n(),
                "a_lattice": basis,
                "tararin": outcome_json(&o),
            }))
        }
    }
}

fn cmd_count(arg: &str) -> Result<Value, Failure> {
    let s = load_spec(arg)?;
    if s.n() == 0 {
        let los = enumerate_lo_tararin(&s)?;
        return Ok(json!({"kind": "left-orders", "n": 0, "rank_factor": 1u64 << s.rank(), "total": los.len()}));
    }
    let (_, r) = materialize_all(&s)?;
    let mut v = serde_json::to_value(&r).unwrap();
    v["kind"] = json!("circular-orders");
    Ok(v)
}

fn cmd_enumerate(arg: &str, radius: usize) -> Result<Value, Failure> {
    let s = load_spec(arg)?;
    if s.n() == 0 {
        let los = enumerate_lo_tararin(&s)?;
        let list: Vec<Value> =
            los.iter().enumerate().map(|(i, (d, _))| json!({"index": i, "signs": d.signs})).collect();
        return Ok(json!({"kind": "left-orders", "total": list.len(), "orders": list}));
    }
    let opts = EnumOptions { radius, ..EnumOptions::default() };
    match enumerate_co(&s, opts) {
        Ok(e) => {
            let list: Vec<Value> = e
                .orders
                .iter()
                .enumerate()
                .map(|(i, o)| {
                    let mut v = serde_json::to_value(&o.descriptor).unwrap();
                    v["index"] = json!(i);
                    v
                })
                .collect();
            Ok(
                json!({"kind": "circular-orders", "ball_radius": radius, "total": list.len(), "count": e.report, "orders": list}),
            )
        }
        Err(err @ EnumError::DistinctnessFailure { a, b, .. }) => {
            let (orders, _) = materialize_all(&s)?;
            let mut f = Failure::from(err);
            f.report = Some(json!({
                "colliding": [serde_json::to_value(&orders[a].descriptor).unwrap(), serde_json::to_value(&orders[b].descriptor).unwrap()],
            }));
            Err(f)
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_brute_cyclic(n: u32, list: bool) -> Result<Value, Failure> {
    if !(2..=9).contains(&n) {
        return Err(Failure::new("OutOfRange", "n must lie in 2..=9"));
    }
    let (count, seqs) = brute_force_co_cyclic(n);
    let mut v = json!({"n": n, "count": count});
    if list {
        v["arrangements"] = json!(seqs);
    }
    Ok(v)
}

fn cmd_brute_ball(arg: &str, radius: usize) -> Result<Value, Failure> {
    let s = load_spec(arg)?;
    let cones = brute_force_ball_orders(&s, radius)?;
    let list: Vec<Vec<String>> = cones.iter().map(|c| c.iter().map(|g| g.to_string()).collect()).collect();
    Ok(json!({"radius": radius, "ball_size": ball(&s, radius).len(), "count": cones.len(), "cones": list}))
}

fn cmd_realize(
    arg: &str,
    order: usize,
    radius: usize,
    iters: usize,
    tol: f64,
    emit: Option<&str>,
) -> Result<Value, Failure> {
    let s = Arc::new(load_spec(arg)?);
    let (oracle, descriptor) = if s.n() == 0 {
        let los = enumerate_lo_tararin(&s)?;
        let (d, lo) = los.into_iter().nth(order).ok_or_else(|| Failure::new("OutOfRange", "no such order index"))?;
        (linear_circular_order(s.clone(), lo), serde_json::to_value(&d.signs).unwrap())
    } else {
        let (orders, _) = materialize_all(&s)?;
        let o = orders.into_iter().nth(order).ok_or_else(|| Failure::new("OutOfRange", "no such order index"))?;
        (o.oracle, serde_json::to_value(&o.descriptor).unwrap())
    };
    let b = ball(&*s, radius);
    let r = realize(&*s, &oracle, &b).map_err(|e| Failure::new("RealizeError", e.to_string()))?;
    let small = ball(&*s, 2);
    let pairs: Vec<(Element, Element)> =
        small.iter().flat_map(|g| small.iter().map(move |h| (g.clone(), h.clone()))).take(400).collect();
    let grid = if s.n() == 0 { 1 } else { s.n() };
    let rep = rot_homomorphism_check(&*s, &r, &pairs, grid, iters, tol)
        .map_err(|e| Failure::new("RealizeError", e.to_string()))?;
    if let Some(path) = emit {
        let f = std::fs::File::create(path).map_err(|e| Failure::new("IoError", format!("{path}: {e}")))?;
        r.write_points(std::io::BufWriter::new(f)).map_err(|e| Failure::new("IoError", e.to_string()))?;
    }
    let mut agree = true;
    for x in &b {
        for y in &b {
            for w in &b {
                agree &= r.ord(x, y, w) == oracle.eval(x, y, w);
            }
        }
    }
    Ok(json!({
        "order": descriptor,
        "ball_size": b.len(),
        "ord_agreement": agree,
        "rot": rep,
        "homomorphism_ok": rep.homomorphism_ok(),
    }))
}

fn parse_rationals(src: &str) -> Result<Vec<BigRational>, Failure> {
    src.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| circorder::circle::parse_rational(t).map_err(|m| Failure::new("BadElement", m)))
        .collect()
}

fn cmd_perturb(mode: Mode, input: Option<&str>, agree_on: &str, k: u32, h0: &str) -> Result<Value, Failure> {
    match mode {
        Mode::Phi => {
            let s = parse_rationals(agree_on)?;
            let h0 = circorder::circle::parse_rational(h0).map_err(|m| Failure::new("BadElement", m))?;
            let (c, r) = default_m(&s);
            let phi = build_phi(k, h0, &s, c, r)?;
            let rep = verify_phi(&phi, &s, 30).map_err(PerturbError::from)?;
            let images: Vec<Value> = (0..k)
                .flat_map(|n| s.iter().map(move |h| (h.clone(), n)))
                .map(|x| json!({"h": x.0.to_string(), "n": x.1, "image": phi.phi(&x).to_string()}))
                .collect();
            Ok(
                json!({"mode": "phi", "m": phi.m.to_string(), "mu": phi.mu.to_string(), "report": rep, "ok": rep.ok(), "images": images}),
            )
        }
        Mode::Nontorsion | Mode::Prufer => {
            let path = input.ok_or_else(|| Failure::new("MissingInput", "--input is required for this mode"))?;
            let text = std::fs::read_to_string(path).map_err(|e| Failure::new("IoError", format!("{path}: {e}")))?;
            let emb = parse_embedding(&text)?;
            let s = agree_on
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| emb.parse_point(t).map_err(|m| Failure::new("BadElement", m)))
                .collect::<Result<Vec<_>, _>>()?;
            let p = match mode {
                Mode::Nontorsion => perturb_nontorsion(&emb, &s)?,
                _ => perturb_prufer(&emb, &s)?,
            };
            let (a, b, c) = &p.witness;
            let gens: Vec<Value> = emb
                .names
                .iter()
                .zip(&p.embedding.gens)
                .map(|(n, g)| json!({"name": n, "image": g.to_string()}))
                .collect();
            Ok(json!({
                "mode": if matches!(mode, Mode::Prufer) { "prufer" } else { "nontorsion" },
                "map": p.description,
                "agree_on": s.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                "generators": gens,
                "witness": [a.to_string(), b.to_string(), c.to_string()],
                "witness_images": [p.apply(a).to_string(), p.apply(b).to_string(), p.apply(c).to_string()],
            }))
        }
    }
}

fn cmd_fixtures(name: Option<&str>) -> Result<Value, Failure> {
    match name {
        None => Ok(json!({"fixtures": fixtures::ALL_NAMES})),
        Some("promislow") => {
            let d = promislow();
            Ok(json!({"name": "promislow", "kind": "data", "rank": d.rank, "cosets": d.cosets()}))
        }
        Some(n) => {
            let text = fixtures::fixture_text(n)
                .ok_or_else(|| Failure::new("UnknownFixture", format!("no fixture named `{n}`")))?;
            Ok(json!({"name": n, "kind": "spec", "text": text}))
        }
    }
}

/// Plain-text rendering of a report value.
pub fn render_text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match x {
                    Value::Object(_) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_text(x, indent + 1, out);
                    }
                    Value::Array(a) if a.iter().any(|e| e.is_object()) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        for e in a {
                            out.push_str(&format!("{pad}  -\n"));
                            render_text(e, indent + 2, out);
                        }
                    }
                    Value::String(s) if s.contains('\n') => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        for line in s.lines() {
                            out.push_str(&format!("{pad}  {line}\n"));
                        }
                    }
                    _ => out.push_str(&format!("{pad}{k}: {}\n", scalar(x))),
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Run with full argv (program name first). Returns the process exit code.
pub fn run(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let (json_out, command, result) = match &cli.command {
        Command::Check { spec, json } => (*json, "check", cmd_check(spec)),
        Command::Count { spec, json } => (*json, "count", cmd_count(spec)),
        Command::Enumerate { spec, ball_radius, json } => (*json, "enumerate", cmd_enumerate(spec, *ball_radius)),
        Command::BruteCyclic { n, list, json } => (*json, "brute-cyclic", cmd_brute_cyclic(*n, *list)),
        Command::BruteBall { spec, radius, json } => (*json, "brute-ball", cmd_brute_ball(spec, *radius)),
        Command::Realize { spec, order, ball, iters, tolerance, emit_points, json } => {
            (*json, "realize", cmd_realize(spec, *order, *ball, *iters, *tolerance, emit_points.as_deref()))
        }
        Command::Perturb { mode, input, agree_on, k, h0, json } => {
            (*json, "perturb", cmd_perturb(*mode, input.as_deref(), agree_on, *k, h0))
        }
        Command::Fixtures { name, json } => (*json, "fixtures", cmd_fixtures(name.as_deref())),
    };
    let (code, mut body) = match result {
        Ok(v) => (0, v),
        Err(f) => {
            let mut v = json!({"error": f.name, "message": f.message});
            if let Some(r) = f.report {
                v["details"] = r;
            }
            (1, v)
        }
    };
    body["schema"] = json!(SCHEMA);
    body["command"] = json!(command);
    let sink: &mut dyn Write = if code == 0 { out } else { err };
    if json_out {
        let _ = writeln!(sink, "{}", serde_json::to_string_pretty(&body).unwrap());
    } else {
        let mut text = String::new();
        render_text(&body, 0, &mut text);
        let _ = write!(sink, "{text}");
    }
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_rendering_nests_objects_and_lists() {
        let v = json!({"b": {"c": 1}, "a": [{"x": "y"}], "s": "one\ntwo", "n": [1, 2]});
        let mut out = String::new();
        render_text(&v, 0, &mut out);
        assert_eq!(out, "a:\n  -\n    x: y\nb:\n  c: 1\nn: [1,2]\ns:\n  one\n  two\n");
    }

    #[test]
    fn fixture_arguments() {
        assert!(matches!(load("fixtures:promislow"), Ok(Input::Data(_))));
        assert!(matches!(load("fixtures:k2"), Ok(Input::Spec(_))));
        assert_eq!(load("fixtures:x").err().unwrap().name, "UnknownFixture");
        assert_eq!(load_spec("fixtures:promislow").err().unwrap().name, "Unclassified");
    }

    #[test]
    fn rational_lists() {
        let v = parse_rationals(" -2, 1/2 ,, 3").unwrap();
        assert_eq!(v.len(), 3);
        assert_eq!(parse_rationals("a").err().unwrap().name, "BadElement");
    }
}
