//! `qbn` command-line front end.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qbn::geometry::enumerate_vertices;
use qbn::infer::{expectation_bounds, generate_constraints, AtomIndexer, Type1Options, DEFAULT_COMBINATION_CAP};
use qbn::model::{parse_document, validate};
use qbn::scalar::{fraction_string, parse_rational};
use qbn::{
    parse_network, Error, InferenceOptions, IntervalBounds, IrrelevancePolicy, Method, NetworkModel, Query, Rational,
    Result, Scalar,
};

#[derive(Parser)]
#[command(name = "qbn", version, about = "Bounds and structure queries on credal networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lower and upper probability (or expectation) of a target value.
    Query(QueryArgs),
    /// Whether X and Z are d-separated given a third set.
    Dsep {
        net: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        z: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        given: Vec<String>,
    },
    /// Vertices of the replicated constraint polytope over a joint scope.
    Vertices {
        net: PathBuf,
        #[arg(long = "joint-scope", value_delimiter = ',', required = true)]
        joint_scope: Vec<String>,
        #[arg(long, value_enum)]
        policy: Option<PolicyArg>,
    },
    /// Check a network file and list every diagnostic.
    Validate { net: PathBuf },
}

#[derive(clap::Args)]
struct QueryArgs {
    net: PathBuf,
    #[arg(long)]
    target: String,
    #[arg(long, value_delimiter = ',')]
    evidence: Vec<String>,
    #[arg(long, value_enum, default_value = "natural")]
    method: MethodArg,
    /// Defaults to the policy declared in the network file.
    #[arg(long, value_enum)]
    policy: Option<PolicyArg>,
    #[arg(long)]
    no_reduction: bool,
    /// Floating-point arithmetic instead of exact rationals.
    #[arg(long)]
    float: bool,
    /// Bound E[f(target)] instead, with f given as `value=number,...`.
    #[arg(long)]
    expect: Option<String>,
    /// Add the wall time in milliseconds to the output.
    #[arg(long)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Type1,
    Natural,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    None,
    Nondescendants,
}

impl From<PolicyArg> for IrrelevancePolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::None => IrrelevancePolicy::None,
            PolicyArg::Nondescendants => IrrelevancePolicy::Nondescendants,
        }
    }
}

enum Failure {
    Error(Error),
    Diagnostics,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Diagnostics) => ExitCode::from(2),
        Err(Failure::Error(e)) => {
            let code = if matches!(e, Error::Validation(_) | Error::CycleDetected(_)) { 2 } else { 1 };
            eprintln!("{}", json!({"error": {"kind": e.kind(), "message": e.to_string()}}));
            ExitCode::from(code)
        }
    }
}

fn run(command: Command) -> std::result::Result<(), Failure> {
    match command {
        Command::Query(args) => {
            println!("{}", query(&args)?);
        }
        Command::Dsep { net, x, z, given } => {
            let model = load(&net)?;
            println!("{}", model.dag().d_separated_by_name(&x, &z, &given)?);
        }
        Command::Vertices {
            net,
            joint_scope,
            policy,
        } => {
            let model = load(&net)?;
            println!("{}", vertices(&model, &joint_scope, policy)?);
        }
        Command::Validate { net } => {
            let doc = parse_document(&read(&net)?)?;
            let diagnostics = validate(&doc);
            if !diagnostics.is_empty() {
                for d in &diagnostics {
                    println!("{d}");
                }
                return Err(Failure::Diagnostics);
            }
            println!("ok");
        }
    }
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Syntax {
        position: path.display().to_string(),
        message: e.to_string(),
    })
}

fn load(path: &Path) -> Result<NetworkModel> {
    parse_network(&read(path)?)
}

fn query(args: &QueryArgs) -> Result<Value> {
    let start = Instant::now();
    let mut model = load(&args.net)?;
    if let Some(p) = args.policy {
        model = model.with_policy(p.into())?;
    }
    let policy = model.policy().clone();
    let options = InferenceOptions {
        method: match args.method {
            MethodArg::Type1 => Method::Type1,
            MethodArg::Natural => Method::Natural,
        },
        use_reduction: policy == IrrelevancePolicy::Nondescendants && !args.no_reduction,
        policy,
        type1: Type1Options {
            combination_cap: combination_cap()?,
            ..Type1Options::default()
        },
    };
    let q = Query::parse(&model, &args.target, &args.evidence)?;
    let f = match &args.expect {
        Some(spec) => expectation_function(&model, q.target.0, spec)?,
        None => (0..model.cardinality(q.target.0))
            .map(|j| Rational::from_integer((j == q.target.1).into()))
            .collect(),
    };
    let mut out = if args.float {
        let b = expectation_bounds::<f64>(&model, q.target.0, &f, &q.evidence, &options)?;
        render(&b, None, &options)
    } else {
        let b = expectation_bounds::<Rational>(&model, q.target.0, &f, &q.evidence, &options)?;
        let exact = (fraction_string(&b.lower), fraction_string(&b.upper));
        render(&b, Some(exact), &options)
    };
    if args.timing {
        out["wall_ms"] = json!(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok(out)
}

fn combination_cap() -> Result<u128> {
    match std::env::var("QBN_MAX_COMBINATIONS") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidQuery(format!("QBN_MAX_COMBINATIONS must be a positive integer, got `{v}`"))),
        Err(_) => Ok(DEFAULT_COMBINATION_CAP),
    }
}

/// `value=number` pairs, one per state of the target.
fn expectation_function(model: &NetworkModel, target: usize, spec: &str) -> Result<Vec<Rational>> {
    let var = model.variable(target);
    let mut f: Vec<Option<Rational>> = vec![None; var.cardinality()];
    for token in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (value, number) = token
            .split_once('=')
            .ok_or_else(|| Error::InvalidQuery(format!("expected `value=number`, got `{token}`")))?;
        let j = var.value_index(value.trim())?;
        let x = parse_rational(number)
            .ok_or_else(|| Error::InvalidQuery(format!("`{number}` is not a number")))?;
        if f[j].replace(x).is_some() {
            return Err(Error::InvalidQuery(format!("value `{value}` given twice")));
        }
    }
    f.into_iter()
        .zip(&var.values)
        .map(|(x, v)| x.ok_or_else(|| Error::InvalidQuery(format!("no number given for `{v}`"))))
        .collect()
}

fn significant(x: f64) -> Value {
    let rounded: f64 = format!("{x:.5e}").parse().unwrap_or(x);
    json!(rounded)
}

fn render<S: Scalar>(b: &IntervalBounds<S>, exact: Option<(String, String)>, options: &InferenceOptions) -> Value {
    let mut out = json!({
        "lower": significant(b.lower.to_f64()),
        "upper": significant(b.upper.to_f64()),
    });
    if let Some((lo, hi)) = exact {
        out["lower_exact"] = json!(lo);
        out["upper_exact"] = json!(hi);
    }
    out["method"] = json!(options.method.as_str());
    out["policy"] = json!(options.policy.name());
    out["reduction"] = json!(options.method == Method::Natural && options.use_reduction);
    out["status"] = json!({"lower": b.lower_status.as_str(), "upper": b.upper_status.as_str()});
    out["constraints"] = json!(b.stats.equalities + b.stats.inequalities);
    out["pivots"] = json!(b.stats.pivots);
    if options.method == Method::Type1 {
        out["combinations"] = json!(b.stats.combinations.to_string());
    }
    out
}

fn vertices(model: &NetworkModel, scope: &[String], policy: Option<PolicyArg>) -> Result<Value> {
    let policy = policy.map_or_else(|| model.policy().clone(), IrrelevancePolicy::from);
    let nodes = scope.iter().map(|n| model.node(n)).collect::<Result<Vec<_>>>()?;
    let system = generate_constraints(model, &policy, &nodes)?;
    let v = enumerate_vertices(&system.constraint_set())?;
    let atoms = AtomIndexer::new(model, nodes.iter().copied());
    let labels: Vec<String> = (0..atoms.len()).map(|a| atoms.label(model, a)).collect();
    let points: Vec<Vec<String>> = v.points.iter().map(|p| p.iter().map(fraction_string).collect()).collect();
    Ok(json!({
        "scope": scope,
        "policy": policy.name(),
        "atoms": labels,
        "count": points.len(),
        "vertices": points,
    }))
}
