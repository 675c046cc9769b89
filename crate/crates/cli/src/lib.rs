//! The `mdexp` command-line tool.
//!
//! Every command prints one report: JSON by default, CSV with
//! `--format csv`. Reports echo the seed and the resolved configuration and
//! contain no timing data, so identical configurations give identical bytes.

mod config;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use mdexp_core::constructions::{build_prescribed, BuildOptions};
use mdexp_core::correspondence::{estimate_gamma, omega_times_from_gamma};
use mdexp_core::exterior::exhaust_random;
use mdexp_core::hyperplane::{predict, special_case_predict, verify_by_sampling, HyperplaneSpec, VerifyOptions};
use mdexp_core::input::{parse_point, parse_value, to_vector, ParsedValue};
use mdexp_core::lattice::{apply_flow, shortest_vector, u_of_y, FlowVector};
use mdexp_core::nondiv::{equal_split, escape_fraction, sublevel_fraction};
use mdexp_core::numerics::{parse_rational, PolyMap, Polynomial, PrecisionReal};
use mdexp_core::witnesses::{estimate_omega, estimate_omega_times, estimate_sigma, ExponentEstimate, SearchOptions};
use mdexp_core::{Error, Exponent};

pub use config::{parse_config, Format, RunConfig};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "mdexp", version, about = "Multiplicative Diophantine exponent experiments")]
struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Mantissa width for real literals.
    #[arg(long = "mantissa-bits", global = true)]
    mantissa_bits: Option<usize>,
    /// Worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// File of `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Window estimate of omega, omega_times or sigma.
    Estimate(EstimateArgs),
    /// Real with a prescribed simultaneous exponent.
    Construct(ConstructArgs),
    /// Shortest vector of a flowed lattice.
    Flow(FlowArgs),
    /// Decay rates along the flow and the exponent assembled from them.
    Gamma(GammaArgs),
    /// Predicted exponents of a hyperplane, optionally checked by sampling.
    Hyperplane(HyperplaneArgs),
    /// Exhaustive check of the degree >= 2 bound on small multivectors.
    ExteriorCheck(ExteriorArgs),
    /// Escape fractions along a curve, or sublevel fractions of a polynomial.
    Nondiv(NondivArgs),
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
enum Mode {
    Omega,
    Omegax,
    Sigma,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    #[arg(long)]
    point: String,
    #[arg(long)]
    qmax: Option<String>,
}

#[derive(Args, Debug)]
struct ConstructArgs {
    #[arg(long)]
    tau: String,
    #[arg(long, default_value_t = 8)]
    depth: usize,
}

#[derive(Args, Debug)]
struct FlowArgs {
    #[arg(long)]
    point: String,
    /// Comma-separated flow components.
    #[arg(long, allow_hyphen_values = true)]
    t: String,
}

#[derive(Args, Debug)]
struct GammaArgs {
    #[arg(long)]
    point: String,
    #[arg(long)]
    tmax: Option<u64>,
    /// Height of the direct estimate used as a cross-check.
    #[arg(long)]
    qmax: Option<String>,
}

#[derive(Args, Debug)]
struct HyperplaneArgs {
    /// `a_1, ..., a_n` of `(a_1 x_1 + ... + a_{n-1} x_{n-1} + a_n, x_1, ..., x_{n-1})`.
    #[arg(long)]
    coeffs: String,
    #[arg(long)]
    verify: bool,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    qmax: Option<String>,
    #[arg(long, default_value_t = 0.5)]
    tolerance: f64,
    /// Curve inside the hyperplane, e.g. `x,x^2`.
    #[arg(long)]
    submanifold: Option<String>,
    /// Compare against `n sigma(a_n)` for `{(x_1, ..., x_{n-1}, a_n)}`.
    #[arg(long)]
    special: bool,
}

#[derive(Args, Debug)]
struct ExteriorArgs {
    #[arg(long)]
    n: usize,
    /// Degree or comma-separated degrees.
    #[arg(long)]
    j: String,
    #[arg(long)]
    bound: u32,
    /// Number of random rational hyperplanes.
    #[arg(long, default_value_t = 10)]
    cases: usize,
}

#[derive(Args, Debug)]
struct NondivArgs {
    /// Curve `x -> (f_1(x), ..., f_n(x))`, e.g. `x,x^2`.
    #[arg(long)]
    curve: Option<String>,
    /// Polynomial for a sublevel-set report instead of the escape table.
    #[arg(long)]
    sublevel: Option<String>,
    #[arg(long)]
    tmax: Option<u64>,
    /// Values such as `2^-2,2^-3` or `0.25,1/8`.
    #[arg(long = "eps-ladder")]
    eps_ladder: Option<String>,
    #[arg(long)]
    samples: Option<u64>,
    /// Parameter interval `lo,hi`.
    #[arg(long, default_value = "0,1", allow_hyphen_values = true)]
    interval: String,
}

/// Exit code and captured streams of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

/// Rows for CSV output.
#[derive(Debug, Default)]
struct Table {
    headers: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

struct Report {
    command: &'static str,
    quantity: &'static str,
    result: Value,
    table: Table,
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidInput { .. } => EXIT_INPUT,
        Error::BudgetExceeded { .. } => EXIT_BUDGET,
        _ => EXIT_FAILURE,
    }
}

/// Parse `args` (program name first) and run the command.
pub fn run(args: &[String]) -> Outcome {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome { code: EXIT_OK, stdout: text, stderr: String::new() }
                }
                _ => Outcome { code: EXIT_INPUT, stdout: String::new(), stderr: text },
            };
        }
    };
    match execute(cli) {
        Ok(stdout) => Outcome { code: EXIT_OK, stdout, stderr: String::new() },
        Err(e) => Outcome { code: exit_code(&e), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

fn execute(cli: Cli) -> mdexp_core::Result<String> {
    let mut cfg = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::invalid("config", format!("cannot read {}: {e}", p.display())))?;
            parse_config(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(b) = cli.mantissa_bits {
        cfg.mantissa_bits = b;
    }
    if let Some(t) = cli.threads {
        cfg.threads = Some(t);
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    if let Some(o) = &cli.output {
        cfg.output = Some(o.display().to_string());
    }
    cfg.validate()?;
    if let Some(t) = cfg.threads {
        // a pool may already exist when several runs share a process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let report = match cli.command {
        Command::Estimate(a) => cmd_estimate(&mut cfg, a)?,
        Command::Construct(a) => cmd_construct(&cfg, a)?,
        Command::Flow(a) => cmd_flow(&cfg, a)?,
        Command::Gamma(a) => cmd_gamma(&mut cfg, a)?,
        Command::Hyperplane(a) => cmd_hyperplane(&mut cfg, a)?,
        Command::ExteriorCheck(a) => cmd_exterior(&cfg, a)?,
        Command::Nondiv(a) => cmd_nondiv(&mut cfg, a)?,
    };
    let text = render(&cfg, &report)?;
    match &cfg.output {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| Error::invalid("output", format!("cannot write {path}: {e}")))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

#[derive(Serialize)]
struct Envelope<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    seed: u64,
    config: &'a RunConfig,
    quantity: &'static str,
    result: &'a Value,
}

fn render(cfg: &RunConfig, r: &Report) -> mdexp_core::Result<String> {
    match cfg.format {
        Format::Json => {
            let env = Envelope {
                tool: "mdexp",
                version: VERSION,
                command: r.command,
                seed: cfg.seed,
                config: cfg,
                quantity: r.quantity,
                result: &r.result,
            };
            let mut s = serde_json::to_string_pretty(&env).map_err(|e| Error::domain(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Error::domain(e.to_string());
            w.write_record(&r.table.headers).map_err(io)?;
            for row in &r.table.rows {
                w.write_record(row).map_err(io)?;
            }
            let body = String::from_utf8(w.into_inner().map_err(|e| Error::domain(e.to_string()))?)
                .map_err(|e| Error::domain(e.to_string()))?;
            Ok(format!("# mdexp {VERSION} command={} seed={} quantity={}\n{body}", r.command, cfg.seed, r.quantity))
        }
    }
}

/// Re-label input errors with the flag they came from.
fn field<T>(name: &str, r: mdexp_core::Result<T>) -> mdexp_core::Result<T> {
    r.map_err(|e| match e {
        Error::InvalidInput { field, reason } => Error::invalid(name, format!("{field}: {reason}")),
        other => other,
    })
}

fn to_value<T: Serialize>(x: &T) -> mdexp_core::Result<Value> {
    serde_json::to_value(x).map_err(|e| Error::domain(e.to_string()))
}

fn literals(v: &[ParsedValue]) -> Value {
    json!(v.iter().map(|p| &p.literal).collect::<Vec<_>>())
}

fn parse_u64(field: &str, s: &str) -> mdexp_core::Result<u64> {
    s.trim().replace('_', "").parse().map_err(|_| Error::invalid(field, format!("`{s}` is not a positive integer")))
}

fn parse_big(field: &str, s: &str) -> mdexp_core::Result<BigInt> {
    let r = parse_rational(&s.replace('_', "")).map_err(|_| Error::invalid(field, format!("`{s}` is not an integer")))?;
    if !r.is_integer() {
        return Err(Error::invalid(field, format!("`{s}` is not an integer")));
    }
    Ok(r.to_integer())
}

/// `2^-k`, decimals and fractions.
pub fn parse_eps_list(s: &str) -> mdexp_core::Result<Vec<f64>> {
    let vals = s
        .split(',')
        .map(|v| {
            let v = v.trim();
            let x = match v.split_once('^') {
                Some((b, e)) => {
                    let b: f64 = b.parse().map_err(|_| Error::invalid("eps_ladder", format!("bad base in `{v}`")))?;
                    let e: i32 = e.parse().map_err(|_| Error::invalid("eps_ladder", format!("bad exponent in `{v}`")))?;
                    b.powi(e)
                }
                None => mdexp_core::numerics::rational_to_f64(&parse_rational(v)?),
            };
            if x.is_finite() && x > 0.0 {
                Ok(x)
            } else {
                Err(Error::invalid("eps_ladder", format!("`{v}` is not positive")))
            }
        })
        .collect::<mdexp_core::Result<Vec<f64>>>()?;
    if vals.is_empty() {
        return Err(Error::invalid("eps_ladder", "empty list"));
    }
    Ok(vals)
}

fn exp_str(e: &Option<Exponent>) -> String {
    e.map(|x| x.render()).unwrap_or_default()
}

fn estimate_table(e: &ExponentEstimate) -> Table {
    Table {
        headers: vec!["q", "p", "height", "log_error", "quality"],
        rows: e
            .witnesses
            .iter()
            .map(|w| {
                let p = serde_json::to_value(&w.p).map(|v| v.to_string()).unwrap_or_default();
                vec![w.q.to_string(), p.trim_matches('"').to_string(), w.height.clone(), format!("{}", w.log_error()), exp_str(&w.quality)]
            })
            .collect(),
    }
}

fn cmd_estimate(cfg: &mut RunConfig, a: EstimateArgs) -> mdexp_core::Result<Report> {
    let point = field("point", parse_point(&a.point, cfg.mantissa_bits))?;
    let y = to_vector(&point);
    let q = a.qmax.or_else(|| cfg.q_max.clone()).ok_or_else(|| Error::invalid("qmax", "required"))?;
    cfg.q_max = Some(q.clone());
    let opts = SearchOptions::default();
    let (est, quantity) = match a.mode {
        Mode::Omega => (estimate_omega(&y, parse_u64("qmax", &q)?, &opts)?, "omega(y): sup of v with |<q,y> + p| < |q|^-v infinitely often"),
        Mode::Omegax => (
            estimate_omega_times(&y, parse_u64("qmax", &q)?, &opts)?,
            "omega_times(y): sup of v with |<q,y> + p| < Pi_+(q)^(-v/n) infinitely often",
        ),
        Mode::Sigma => (estimate_sigma(&y, &parse_big("qmax", &q)?, &opts)?, "sigma(a): sup of v with max_i |q a_i + p_i| < q^-v infinitely often"),
    };
    Ok(Report {
        command: "estimate",
        quantity,
        table: estimate_table(&est),
        result: json!({ "point": literals(&point), "estimate": to_value(&est)? }),
    })
}

fn cmd_construct(cfg: &RunConfig, a: ConstructArgs) -> mdexp_core::Result<Report> {
    let tau = field("tau", parse_value(&a.tau, cfg.mantissa_bits))?;
    if !tau.is_rational() {
        return Err(Error::invalid("tau", "must be a rational literal"));
    }
    let opts = BuildOptions { mantissa_bits: cfg.mantissa_bits, ..BuildOptions::default() };
    let x = build_prescribed(&tau.value, a.depth, &opts)?;
    let rep = x.report();
    let table = Table {
        headers: vec!["k", "quotient", "p", "q", "q_bits", "log_error", "quality"],
        rows: rep
            .convergents
            .iter()
            .map(|c| vec![c.k.to_string(), c.quotient.clone(), c.p.clone(), c.q.clone(), c.q_bits.to_string(), c.log_error.to_string(), exp_str(&c.quality)])
            .collect(),
    };
    Ok(Report { command: "construct", quantity: "real with prescribed simultaneous exponent tau", table, result: to_value(&rep)? })
}

fn parse_flow(s: &str, bits: usize) -> mdexp_core::Result<FlowVector> {
    let t = s
        .split(',')
        .map(|c| parse_rational(c).map(|r| PrecisionReal::from_rational(&r, bits)))
        .collect::<mdexp_core::Result<Vec<_>>>()
        .map_err(|e| Error::invalid("t", e.to_string()))?;
    FlowVector::new(t)
}

fn cmd_flow(cfg: &RunConfig, a: FlowArgs) -> mdexp_core::Result<Report> {
    let point = field("point", parse_point(&a.point, cfg.mantissa_bits))?;
    let t = parse_flow(&a.t, cfg.mantissa_bits)?;
    let fl = apply_flow(&u_of_y(&to_vector(&point)), &t)?;
    let sv = shortest_vector(&fl)?;
    let table = Table {
        headers: vec!["t", "coeffs", "length", "length_log"],
        rows: vec![vec![a.t.clone(), sv.coeffs.to_string(), sv.length().to_string(), sv.length_log.to_string()]],
    };
    Ok(Report {
        command: "flow",
        quantity: "shortest nonzero vector of g_t u_y Z^(n+1)",
        table,
        result: json!({
            "point": literals(&point),
            "t": to_value(&t)?,
            "log_det_shift": fl.log_det_shift().to_f64(),
            "shortest": to_value(&sv)?,
            "length": sv.length(),
        }),
    })
}

fn cmd_gamma(cfg: &mut RunConfig, a: GammaArgs) -> mdexp_core::Result<Report> {
    let point = field("point", parse_point(&a.point, cfg.mantissa_bits))?;
    let y = to_vector(&point);
    let t_max = a.tmax.or(cfg.t_max).ok_or_else(|| Error::invalid("tmax", "required"))?;
    cfg.t_max = Some(t_max);
    let q = a.qmax.or_else(|| cfg.q_max.clone()).unwrap_or_else(|| "100000".into());
    cfg.q_max = Some(q.clone());
    let table = estimate_gamma(&y, t_max)?;
    let assembled = omega_times_from_gamma(&table);
    let direct = estimate_omega_times(&y, parse_u64("qmax", &q)?, &SearchOptions::default())?;
    let diff = match (assembled, direct.window_estimate) {
        (Exponent::Finite(a), Exponent::Finite(b)) => Some((a - b).abs()),
        _ => None,
    };
    let rows = table
        .entries
        .iter()
        .map(|e| {
            let (t, q) = e.witness.as_ref().map(|w| (format!("{:?}", w.t), w.q.to_string())).unwrap_or_default();
            vec![e.k.to_string(), e.gamma.to_string(), e.boundary.to_string(), e.certified_v.render(), t, q]
        })
        .collect();
    Ok(Report {
        command: "gamma",
        quantity: "gamma_k(y) along admissible flows and omega_times(y) assembled from them",
        table: Table { headers: vec!["k", "gamma", "boundary", "certified_v", "witness_t", "witness_q"], rows },
        result: json!({
            "point": literals(&point),
            "table": to_value(&table)?,
            "omega_times_from_gamma": to_value(&assembled)?,
            "direct": { "q_max": q, "window_estimate": to_value(&direct.window_estimate)?, "exact_hit": direct.exact_hit },
            "difference": diff,
        }),
    })
}

fn cmd_hyperplane(cfg: &mut RunConfig, a: HyperplaneArgs) -> mdexp_core::Result<Report> {
    let coeffs = field("coeffs", parse_point(&a.coeffs, cfg.mantissa_bits))?;
    let spec = HyperplaneSpec::new(coeffs)?;
    let pred = predict(&spec);
    let special = if a.special {
        if spec.s != 1 {
            return Err(Error::invalid("special", "needs a_1 = ... = a_{n-1} = 0"));
        }
        Some(special_case_predict(spec.n, &spec.a[spec.n - 1]))
    } else {
        None
    };
    let mut table = Table {
        headers: vec!["n", "s", "sigma", "omega_times_l", "omega_l", "gap_flag"],
        rows: vec![vec![
            pred.n.to_string(),
            pred.s.to_string(),
            pred.sigma.render(),
            pred.omega_times_l.render(),
            pred.omega_l.render(),
            pred.gap_flag.to_string(),
        ]],
    };
    let mut verification = Value::Null;
    if a.verify {
        let samples = a.samples.or(cfg.samples).unwrap_or(20);
        cfg.samples = Some(samples);
        let q = a.qmax.or_else(|| cfg.q_max.clone()).unwrap_or_else(|| "100000".into());
        cfg.q_max = Some(q.clone());
        let submanifold = field("submanifold", a.submanifold.as_deref().map(PolyMap::parse).transpose())?;
        let opts = VerifyOptions {
            samples: samples as usize,
            q_max: parse_u64("qmax", &q)?,
            tolerance: a.tolerance,
            seed: cfg.seed,
            submanifold,
            prediction: special,
        };
        let rep = verify_by_sampling(&spec, &opts)?;
        table = Table {
            headers: vec!["sample_index", "point", "omega_times_estimate", "prediction", "within_tolerance"],
            rows: rep
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.sample_index.to_string(),
                        r.point.join(" "),
                        r.omega_times_estimate.render(),
                        r.prediction.render(),
                        r.within_tolerance.to_string(),
                    ]
                })
                .collect(),
        };
        verification = to_value(&rep)?;
    }
    Ok(Report {
        command: "hyperplane",
        quantity: "omega_times(L) = max(n, (n/s) sigma(a)) and omega(L) = max(n, sigma(a))",
        table,
        result: json!({
            "spec": to_value(&spec)?,
            "prediction": to_value(&pred)?,
            "special_case": special.map(|e| to_value(&e)).transpose()?,
            "verification": verification,
        }),
    })
}

fn cmd_exterior(cfg: &RunConfig, a: ExteriorArgs) -> mdexp_core::Result<Report> {
    let degrees = a
        .j
        .split(',')
        .map(|d| d.trim().parse::<usize>().map_err(|_| Error::invalid("j", format!("`{d}` is not a degree"))))
        .collect::<mdexp_core::Result<Vec<_>>>()?;
    let sum = exhaust_random(a.n, &degrees, a.bound, a.cases, cfg.seed)?;
    let table = Table {
        headers: vec!["case", "a", "violations"],
        rows: sum.cases.iter().map(|c| vec![c.case.to_string(), c.a.join(" "), c.found.len().to_string()]).collect(),
    };
    Ok(Report {
        command: "exterior-check",
        quantity: "lower bound |R_0 c(w)| >= 1 for nonzero integer multivectors of degree >= 2",
        table,
        result: to_value(&sum)?,
    })
}

fn parse_interval(s: &str) -> mdexp_core::Result<(f64, f64)> {
    let v = parse_eps_like(s)?;
    match v.as_slice() {
        [lo, hi] => Ok((*lo, *hi)),
        _ => Err(Error::invalid("interval", format!("`{s}` is not `lo,hi`"))),
    }
}

fn parse_eps_like(s: &str) -> mdexp_core::Result<Vec<f64>> {
    s.split(',')
        .map(|v| parse_rational(v).map(|r| mdexp_core::numerics::rational_to_f64(&r)))
        .collect::<mdexp_core::Result<Vec<_>>>()
        .map_err(|e| Error::invalid("interval", e.to_string()))
}

fn cmd_nondiv(cfg: &mut RunConfig, a: NondivArgs) -> mdexp_core::Result<Report> {
    let eps = match a.eps_ladder.as_deref() {
        Some(s) => parse_eps_list(s)?,
        None => cfg.eps_ladder.clone().unwrap_or_else(|| mdexp_core::nondiv::dyadic_ladder(2, 8)),
    };
    cfg.eps_ladder = Some(eps.clone());
    let interval = parse_interval(&a.interval)?;
    if let Some(p) = a.sublevel {
        let f = field("sublevel", Polynomial::parse(&p))?;
        let samples = a.samples.or(cfg.samples).unwrap_or(100_000);
        cfg.samples = Some(samples);
        let rep = sublevel_fraction(&f, interval, &eps, samples, cfg.seed)?;
        let rows = rep
            .points
            .iter()
            .map(|p| vec![p.epsilon.to_string(), p.fraction.to_string(), p.ci_halfwidth.to_string(), p.samples.to_string()])
            .collect();
        return Ok(Report {
            command: "nondiv",
            quantity: "measure of {x in B : |f(x)| < eps}",
            table: Table { headers: vec!["epsilon", "fraction", "ci_halfwidth", "samples"], rows },
            result: to_value(&rep)?,
        });
    }
    let curve = field("curve", PolyMap::parse(a.curve.as_deref().ok_or_else(|| Error::invalid("curve", "required without --sublevel"))?))?;
    let t_max = a.tmax.or(cfg.t_max).ok_or_else(|| Error::invalid("tmax", "required"))?;
    cfg.t_max = Some(t_max);
    let samples = a.samples.or(cfg.samples).unwrap_or(2000);
    cfg.samples = Some(samples);
    let flows = (1..=t_max).map(|tt| equal_split(curve.dim(), tt as f64)).collect::<mdexp_core::Result<Vec<_>>>()?;
    let rep = escape_fraction(&curve, interval, &flows, &eps, samples, cfg.seed)?;
    let mut rows = Vec::new();
    for r in &rep.rows {
        for p in &r.points {
            rows.push(vec![r.t_total.to_string(), p.epsilon.to_string(), p.fraction.to_string(), p.ci_halfwidth.to_string(), p.samples.to_string()]);
        }
    }
    Ok(Report {
        command: "nondiv",
        quantity: "fraction of x with g_t u_f(x) Z^(n+1) outside K_eps along equal-split flows",
        table: Table { headers: vec!["t_total", "epsilon", "fraction", "ci_halfwidth", "samples"], rows },
        result: to_value(&rep)?,
    })
}
