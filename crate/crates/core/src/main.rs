use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use hcsuper::apoly::{APolynomial, PolyTerm};
use hcsuper::catalog::{
    build_entry, catalog, explicit_pair, read_algebra_json, resolve, verify_main_theorem,
    CatalogError, Pipeline, Plant, VerifyOptions,
};
use hcsuper::harish_chandra::{project_to_a, verify_exact_sequence};
use hcsuper::invariant_rings::Ring;
use hcsuper::liesuper::LieSuperalgebra;
use hcsuper::pbw::{MonomialTerm, UEAElement};
use hcsuper::scalar::Q;
use hcsuper::symmetric_pair::{
    even_weyl_group, restricted_roots_with, RestrictedRootSystem, SymmetricPair,
};

#[derive(Parser)]
#[command(
    name = "hcsuper",
    version,
    about = "Harish-Chandra homomorphism for symmetric superpairs"
)]
struct Cli {
    /// Seed for randomized sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for per-degree checks.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the axioms of an algebra file or catalog entry.
    Validate { target: String },
    /// Restricted roots, multiplicities and ρ.
    Roots {
        entry: String,
        /// Positivity direction as comma-separated rationals, e.g. `1,1/2`.
        #[arg(long, value_parser = parse_direction)]
        direction: Option<Direction>,
    },
    /// Basis of U(g)^k up to a degree and its image under Γ.
    Invariants {
        entry: String,
        #[arg(long)]
        degree: usize,
    },
    /// Γ of an element given as PBW monomials over the basis of g.
    Gamma {
        entry: String,
        #[arg(long)]
        element: String,
    },
    /// Membership of a polynomial on a in I(a) or J(a).
    Membership {
        entry: String,
        #[arg(long)]
        poly: String,
        #[arg(long, value_enum)]
        ring: RingArg,
    },
    /// Check the main theorem up to a degree.
    Verify {
        entry: String,
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long, value_enum)]
        plant: Option<PlantArg>,
        #[arg(long, value_parser = parse_direction)]
        direction: Option<Direction>,
    },
    /// Built-in entries.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum RingArg {
    #[value(name = "I", alias = "i")]
    I,
    #[value(name = "J", alias = "j")]
    J,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlantArg {
    Jacobi,
    TruncatedN,
    Multiplicity,
}

impl From<PlantArg> for Plant {
    fn from(p: PlantArg) -> Plant {
        match p {
            PlantArg::Jacobi => Plant::Jacobi,
            PlantArg::TruncatedN => Plant::TruncatedN,
            PlantArg::Multiplicity => Plant::Multiplicity,
        }
    }
}

#[derive(Clone)]
struct Direction(Vec<Q>);

fn parse_direction(s: &str) -> Result<Direction, String> {
    s.split(',')
        .map(|x| x.trim().parse::<Q>().map_err(|e| format!("{x}: {e}")))
        .collect::<Result<_, _>>()
        .map(Direction)
}

enum Failure {
    Input(String),
    Verification(Value),
}

impl From<CatalogError> for Failure {
    fn from(e: CatalogError) -> Failure {
        Failure::Input(e.to_string())
    }
}

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize")
}

fn load_pair(entry: &str) -> Result<SymmetricPair, Failure> {
    Ok(build_entry(&resolve(entry)?)?.pair)
}

fn roots_json(pair: &SymmetricPair, sys: &RestrictedRootSystem) -> Result<Value, Failure> {
    let weyl = even_weyl_group(sys).map_err(input)?;
    let roots: Vec<Value> = sys
        .roots
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let class = sys.odd_classes.iter().find(|c| c.root == i);
            let mut v = json!({
                "lambda": r.lambda,
                "m0": r.m0,
                "m1": r.m1,
                "positive": sys.positive[i],
            });
            if let Some(c) = class {
                v["iso"] = to_value(&c.iso);
                v["q"] = json!(c.q);
                v["gated"] = json!(c.gated);
            }
            v
        })
        .collect();
    Ok(json!({
        "a_basis": pair.a_names(),
        "direction": sys.direction,
        "roots": roots,
        "rho": sys.rho,
        "rho0": sys.rho0,
        "rho1": sys.rho1,
        "weyl_order": weyl.order(),
    }))
}

fn parse_poly(text: &str, names: &[String]) -> Result<APolynomial, Failure> {
    let n = names.len();
    if let Some(i) = names.iter().position(|x| x == text.trim()) {
        return Ok(APolynomial::var(n, i));
    }
    let value: Value =
        serde_json::from_str(text).map_err(|e| Failure::Input(format!("--poly: {e}")))?;
    let terms: Vec<PolyTerm> = match value {
        Value::String(s) => {
            let i = names
                .iter()
                .position(|x| *x == s)
                .ok_or_else(|| Failure::Input(format!("unknown variable {s}")))?;
            return Ok(APolynomial::var(n, i));
        }
        Value::Object(ref m) if !m.contains_key("exp") => {
            let exp = serde_json::from_value(value.clone())
                .map_err(|e| Failure::Input(format!("--poly: {e}")))?;
            vec![PolyTerm {
                exp,
                coeff: Q::int(1),
            }]
        }
        Value::Object(_) => {
            vec![serde_json::from_value(value)
                .map_err(|e| Failure::Input(format!("--poly: {e}")))?]
        }
        _ => serde_json::from_value(value).map_err(|e| Failure::Input(format!("--poly: {e}")))?,
    };
    APolynomial::from_json(&terms, names).map_err(Failure::Input)
}

fn parse_element(text: &str, g: &LieSuperalgebra) -> Result<Vec<MonomialTerm>, Failure> {
    let terms: Vec<MonomialTerm> =
        serde_json::from_str(text).map_err(|e| Failure::Input(format!("--element: {e}")))?;
    for t in &terms {
        if let Some(&i) = t.monomial.iter().find(|&&i| i >= g.dim()) {
            return Err(Failure::Input(format!(
                "basis index {i} out of range (dim {})",
                g.dim()
            )));
        }
    }
    Ok(terms)
}

/// Rewrites an element over the original basis into the Iwasawa frame.
fn element_in_frame(pipe: &Pipeline, terms: &[MonomialTerm]) -> Result<UEAElement, Failure> {
    let n = pipe.pair.algebra().dim();
    let mut out = UEAElement::zero();
    for t in terms {
        let factors: Vec<_> = t
            .monomial
            .iter()
            .map(|&i| {
                pipe.frame
                    .transform(&hcsuper::liesuper::SuperVector::basis(n, i))
            })
            .collect();
        let u = pipe.frame.pbw.normal_form(&factors).map_err(input)?;
        out.add_scaled(&u, &t.coeff);
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<Value, Failure> {
    match cli.command {
        Command::Catalog {
            action: CatalogAction::List,
        } => Ok(to_value(&catalog())),
        Command::Validate { target } => {
            if let Ok(entry) = resolve(&target) {
                if let hcsuper::catalog::Construction::Explicit { path } = &entry.construction {
                    let j = read_algebra_json(path)?;
                    let g = LieSuperalgebra::from_json(&j).map_err(input)?;
                    let violations: Vec<String> = g
                        .verify()
                        .violations
                        .iter()
                        .map(|v| v.to_string())
                        .collect();
                    let mut out = json!({
                        "dim": g.dim(),
                        "valid": violations.is_empty(),
                        "violations": violations,
                    });
                    if violations.is_empty() && j.cartan.is_some() {
                        out["pair"] = json!(explicit_pair(&j)
                            .map(|_| true)
                            .map_err(|e| e.to_string())
                            .is_ok());
                    }
                    return if violations.is_empty() {
                        Ok(out)
                    } else {
                        Err(Failure::Verification(out))
                    };
                }
                let built = build_entry(&entry)?;
                let g = built.pair.algebra();
                let violations: Vec<String> = g
                    .verify()
                    .violations
                    .iter()
                    .map(|v| v.to_string())
                    .collect();
                let out = json!({
                    "entry": entry.name,
                    "dim": g.dim(),
                    "valid": violations.is_empty(),
                    "violations": violations,
                    "strongly_reductive": built.strongly_reductive,
                });
                return if violations.is_empty() {
                    Ok(out)
                } else {
                    Err(Failure::Verification(out))
                };
            }
            Err(Failure::Input(format!("no such entry or file: {target}")))
        }
        Command::Roots { entry, direction } => {
            let pair = load_pair(&entry)?;
            let sys = restricted_roots_with(&pair, direction.map(|d| d.0)).map_err(input)?;
            roots_json(&pair, &sys)
        }
        Command::Invariants { entry, degree } => {
            let pipe = Pipeline::new(load_pair(&entry)?)?;
            let inv = pipe.invariants(degree);
            let (mut report, image) = verify_exact_sequence(&pipe.frame, &pipe.sys.rho, &inv);
            report.weyl_invariant = image.iter().all(|p| pipe.weyl.is_invariant(p));
            report.in_j = image.iter().all(|p| pipe.rings.contains(Ring::J, p));
            let names = pipe.pair.a_names();
            let frame_names = pipe.frame.algebra().names();
            let mut out = to_value(&report);
            out["frame_basis"] = json!(frame_names);
            out["invariants"] = json!(inv
                .invariants
                .iter()
                .map(|u| u.to_json())
                .collect::<Vec<_>>());
            out["image"] = json!(image.iter().map(|p| p.to_json(names)).collect::<Vec<_>>());
            out["image_display"] =
                json!(image.iter().map(|p| p.display(names)).collect::<Vec<_>>());
            let ok = report.weyl_invariant && report.in_j;
            if ok {
                Ok(out)
            } else {
                Err(Failure::Verification(out))
            }
        }
        Command::Gamma { entry, element } => {
            let pipe = Pipeline::new(load_pair(&entry)?)?;
            let terms = parse_element(&element, pipe.pair.algebra())?;
            let u = element_in_frame(&pipe, &terms)?;
            let names = pipe.pair.a_names();
            let da = project_to_a(&pipe.frame, &u).map_err(input)?;
            let gamma = pipe.gamma(&u);
            Ok(json!({
                "projection": da.to_json(names),
                "projection_display": da.display(names),
                "gamma": gamma.to_json(names),
                "gamma_display": gamma.display(names),
            }))
        }
        Command::Membership { entry, poly, ring } => {
            let pipe = Pipeline::new(load_pair(&entry)?)?;
            let names = pipe.pair.a_names();
            let p = parse_poly(&poly, names)?;
            let (ring, label) = match ring {
                RingArg::I => (Ring::I, "I"),
                RingArg::J => (Ring::J, "J"),
            };
            Ok(json!({
                "poly": p.display(names),
                "ring": label,
                "member": pipe.rings.contains(ring, &p),
            }))
        }
        Command::Verify {
            entry,
            degree,
            plant,
            direction,
        } => {
            let entry = resolve(&entry)?;
            let d = degree.unwrap_or(entry.default_degree);
            let opts = VerifyOptions {
                plant: plant.map(Plant::from),
                seed: cli.seed,
                direction: direction.map(|d| d.0),
                threads: cli.threads,
            };
            let report = verify_main_theorem(&entry, d, &opts)?;
            let out = to_value(&report);
            if report.ok() {
                Ok(out)
            } else {
                Err(Failure::Verification(out))
            }
        }
    }
}

fn print(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json"));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(v) => {
            print(&v);
            ExitCode::SUCCESS
        }
        Err(Failure::Verification(v)) => {
            print(&v);
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
