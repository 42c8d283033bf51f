//! Command-line front end. Every JSON artifact carries the parsed
//! arguments and the tool version.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::amaj::{recursive_step, sample_verified, AmajSpec, RecursiveAmajParams};
use crate::approxlp::{approx_degree, min_mu_for_error, Certification};
use crate::boolfn::format::from_json_str;
use crate::boolfn::{Evaluator, LayeredCircuit, NamedFunction, SharedInputCircuit, TruthTable};
use crate::compose::{lc0_compose, shared_compose, ComposeOptions, EpsSchedule, Lc0Options, VerifyMode};
use crate::error::{Error, Result};
use crate::learner::{agnostic_learn, gen_dataset, Distribution, Rounding};
use crate::querysim::{eliminate_high_fanin, experiment_scaling, Family, GroverCostModel};
use crate::rational::{format_rational, parse_rational, to_f64, Rational};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INDETERMINATE: i32 = 3;

#[derive(Debug, Parser, Serialize)]
#[command(name = "sicomp", version, about = "Approximating polynomials and query simulations for shared-input compositions")]
pub struct RunConfig {
    /// Write the main artifact here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Extra progress on stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "subcommand", rename_all = "lowercase")]
pub enum Command {
    /// Approximate degree by LP with exact verification.
    Adeg(FunctionArgs),
    /// Least coefficient norm within eps.
    Mu(MuArgs),
    /// Compose a circuit file into an approximating polynomial.
    Compose(ComposeArgs),
    /// Run the gate-elimination simulation on one hidden input.
    Simulate(SimulateArgs),
    /// Total charge across a grid of input sizes, as CSV.
    Scaling(ScalingArgs),
    /// Fit a low-degree l1 hypothesis to noisy samples of a circuit.
    Learn(LearnArgs),
    /// Approximate-majority circuits.
    #[command(subcommand)]
    Amaj(AmajCommand),
}

#[derive(Debug, Args, Serialize)]
pub struct FunctionArgs {
    /// Named function: and, or, parity, majority, ip.
    #[arg(long = "fn", value_name = "NAME", conflicts_with = "table")]
    pub function: Option<String>,
    /// Truth table as little-endian hex.
    #[arg(long, value_name = "HEX")]
    pub table: Option<String>,
    #[arg(long)]
    pub arity: usize,
    #[arg(long, value_name = "RAT", value_parser = rational_arg)]
    #[serde(serialize_with = "crate::rational::serialize")]
    pub eps: Rational,
    /// Write the witness polynomial here.
    #[arg(long, value_name = "FILE")]
    pub poly_out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct MuArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub function: FunctionArgs,
    /// Restrict the witness to this degree.
    #[arg(long)]
    pub degree_cap: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct ComposeArgs {
    /// Shared-input circuit JSON, or a layered circuit JSON (with "layers").
    #[arg(long, value_name = "FILE")]
    pub circuit: PathBuf,
    #[arg(long, value_name = "RAT", value_parser = rational_arg)]
    #[serde(serialize_with = "crate::rational::serialize")]
    pub eps: Rational,
    /// Amplify back to eps (shared-input circuits), or amplify per level
    /// (layered circuits).
    #[arg(long)]
    pub amplify: bool,
    /// exhaustive, none, or sample:N:SEED
    #[arg(long, default_value = "exhaustive", value_parser = verify_arg)]
    #[serde(serialize_with = "serialize_verify")]
    pub verify: VerifyMode,
    #[arg(long, value_name = "FILE")]
    pub poly_out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long, value_name = "FILE")]
    pub circuit: PathBuf,
    /// Hidden input as a 0/1 string, input 1 first.
    #[arg(long, value_name = "BITS")]
    pub input: String,
    #[arg(long)]
    pub qf: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_name = "RAT", default_value = "0", value_parser = rational_arg)]
    #[serde(serialize_with = "crate::rational::serialize")]
    pub failure_prob: Rational,
    #[arg(long, value_name = "RAT", default_value = "1", value_parser = rational_arg)]
    #[serde(serialize_with = "crate::rational::serialize")]
    pub c_search: Rational,
    /// Charge the final stage with an extra log factor.
    #[arg(long)]
    pub final_log: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyArg {
    ParityAnd,
    RandomShared,
}

#[derive(Debug, Args, Serialize)]
pub struct ScalingArgs {
    #[arg(long, value_enum, default_value = "parity-and")]
    pub family: FamilyArg,
    /// Top arity, or `n` to grow it with the input count.
    #[arg(long, default_value = "16")]
    pub t: String,
    #[arg(long, value_delimiter = ',', required = true)]
    pub n_grid: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    pub seeds: u64,
    #[arg(long)]
    pub final_log: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RoundingArg {
    Half,
    Random,
}

#[derive(Debug, Args, Serialize)]
pub struct LearnArgs {
    #[arg(long, value_name = "FILE")]
    pub circuit: PathBuf,
    /// uniform, or product:p1,p2,...
    #[arg(long, default_value = "uniform")]
    pub dist: String,
    #[arg(long, value_name = "RAT", default_value = "0", value_parser = rational_arg)]
    #[serde(serialize_with = "crate::rational::serialize")]
    pub noise: Rational,
    #[arg(long, default_value_t = 5000)]
    pub samples: usize,
    #[arg(long)]
    pub degree: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_name = "RAT", default_value = "1/5", value_parser = rational_arg)]
    #[serde(serialize_with = "crate::rational::serialize")]
    pub holdout: Rational,
    #[arg(long, value_enum, default_value = "half")]
    pub rounding: RoundingArg,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "action", rename_all = "lowercase")]
pub enum AmajCommand {
    /// Sample a depth-3 circuit and verify its promise by sampling.
    Sample(AmajSampleArgs),
    /// Apply the size-reducing composition level by level.
    Recurse(AmajRecurseArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct AmajSampleArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long, value_name = "RAT", default_value = "1", value_parser = rational_arg)]
    #[serde(serialize_with = "crate::rational::serialize")]
    pub delta: Rational,
    #[arg(long, value_name = "RAT", default_value = "1/5", value_parser = rational_arg)]
    #[serde(serialize_with = "crate::rational::serialize")]
    pub p: Rational,
    #[arg(long, value_name = "RAT", default_value = "1/2", value_parser = rational_arg)]
    #[serde(serialize_with = "crate::rational::serialize")]
    pub q: Rational,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Samples per promise side.
    #[arg(long, default_value_t = 10_000)]
    pub verify: usize,
    #[arg(long, default_value_t = 5)]
    pub attempts: usize,
    /// Write the circuit JSON here.
    #[arg(long, value_name = "FILE")]
    pub circuit_out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct AmajRecurseArgs {
    #[arg(long, default_value_t = 1)]
    pub levels: usize,
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    /// Inputs of the level-0 circuit (a threshold CNF).
    #[arg(long, default_value_t = 8)]
    pub m: usize,
    /// Inputs of each outer sampler, i.e. the number of inner copies.
    #[arg(long, default_value_t = 32)]
    pub outer_m: usize,
    #[arg(long, value_name = "RAT", default_value = "1/5", value_parser = rational_arg)]
    #[serde(serialize_with = "crate::rational::serialize")]
    pub p: Rational,
    #[arg(long, value_name = "RAT", default_value = "1/2", value_parser = rational_arg)]
    #[serde(serialize_with = "crate::rational::serialize")]
    pub q: Rational,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 2000)]
    pub verify: usize,
    #[arg(long, value_name = "FILE")]
    pub circuit_out: Option<PathBuf>,
}

fn rational_arg(s: &str) -> std::result::Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn verify_arg(s: &str) -> std::result::Result<VerifyMode, String> {
    match s {
        "exhaustive" => Ok(VerifyMode::Exhaustive),
        "none" => Ok(VerifyMode::None),
        _ => {
            let parts: Vec<&str> = s.split(':').collect();
            match parts.as_slice() {
                ["sample", count, seed] => Ok(VerifyMode::Sampled {
                    count: count.parse().map_err(|_| format!("bad sample count {count:?}"))?,
                    seed: seed.parse().map_err(|_| format!("bad seed {seed:?}"))?,
                }),
                _ => Err(format!("expected exhaustive, none or sample:N:SEED, got {s:?}")),
            }
        }
    }
}

fn serialize_verify<S: serde::Serializer>(v: &VerifyMode, s: S) -> std::result::Result<S::Ok, S::Error> {
    let text = match v {
        VerifyMode::None => "none".to_string(),
        VerifyMode::Exhaustive => "exhaustive".to_string(),
        VerifyMode::Sampled { count, seed } => format!("sample:{count}:{seed}"),
    };
    s.serialize_str(&text)
}

/// Outcome of a command: the artifact and the exit status.
struct Output {
    body: String,
    status: i32,
}

fn envelope(cfg: &RunConfig, result: Value) -> String {
    let doc = json!({
        "tool": "sicomp",
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "result": result,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("json value");
    s.push('\n');
    s
}

fn write_file(path: &PathBuf, text: &str) -> Result<()> {
    std::fs::write(path, text)?;
    Ok(())
}

fn load_function(a: &FunctionArgs) -> Result<(TruthTable, String)> {
    match (&a.function, &a.table) {
        (Some(name), None) => {
            let kind = NamedFunction::from_name(name)
                .ok_or_else(|| Error::parse("--fn", format!("unknown function {name:?}")))?;
            Ok((TruthTable::named(kind, a.arity)?, format!("{}_{}", kind.name(), a.arity)))
        }
        (None, Some(hex)) => Ok((TruthTable::from_hex(a.arity, hex)?, format!("table_{}", a.arity))),
        _ => Err(Error::parse("arguments", "give exactly one of --fn or --table")),
    }
}

enum AnyCircuit {
    Shared(SharedInputCircuit),
    Layered(LayeredCircuit),
}

impl AnyCircuit {
    fn evaluator(&self) -> &dyn Evaluator {
        match self {
            AnyCircuit::Shared(c) => c,
            AnyCircuit::Layered(c) => c,
        }
    }
}

fn load_circuit(path: &PathBuf) -> Result<AnyCircuit> {
    let text = std::fs::read_to_string(path)?;
    let value: Value = from_json_str(&text)?;
    if value.get("layers").is_some() {
        Ok(AnyCircuit::Layered(LayeredCircuit::from_json(&text)?))
    } else {
        Ok(AnyCircuit::Shared(SharedInputCircuit::from_json(&text)?))
    }
}

fn cmd_adeg(a: &FunctionArgs) -> Result<(Value, i32)> {
    let (f, name) = load_function(a)?;
    let r = approx_degree(&f, &a.eps, &name)?;
    if let Some(p) = &a.poly_out {
        write_file(p, &r.witness.to_text())?;
    }
    let status = match r.status {
        Certification::Certified => EXIT_OK,
        Certification::Indeterminate => EXIT_INDETERMINATE,
    };
    Ok((
        json!({
            "function": r.function,
            "degree": r.degree,
            "epsilon": format_rational(&r.epsilon),
            "achieved_error": format_rational(&r.achieved_error),
            "mu": format_rational(&r.witness.mu_norm()),
            "cert_margin": r.cert_margin,
            "status": r.status,
            "sweep": r.sweep,
        }),
        status,
    ))
}

fn cmd_mu(a: &MuArgs) -> Result<(Value, i32)> {
    let (f, name) = load_function(&a.function)?;
    let r = min_mu_for_error(&f, &a.function.eps, a.degree_cap)?;
    if let Some(p) = &a.function.poly_out {
        write_file(p, &r.witness.to_text())?;
    }
    Ok((
        json!({
            "function": name,
            "degree": r.witness.degree(),
            "epsilon": format_rational(&r.epsilon),
            "achieved_error": format_rational(&r.achieved_error),
            "mu": format_rational(&r.mu),
            "lp_objective": r.lp_objective,
            "degree_cap": r.degree_cap,
        }),
        EXIT_OK,
    ))
}

fn cmd_compose(a: &ComposeArgs) -> Result<(Value, i32)> {
    let (poly, report, bound_ok) = match load_circuit(&a.circuit)? {
        AnyCircuit::Shared(c) => {
            let opts = ComposeOptions {
                amplify: a.amplify,
                verify: a.verify.clone(),
            };
            let (p, r) = shared_compose(&c, &a.eps, None, &opts)?;
            let bound = if a.amplify { a.eps.clone() } else { r.error_bound.clone() };
            let ok = r.error.as_ref().is_none_or(|e| e.max_deviation <= bound);
            (p, serde_json::to_value(&r).expect("report"), ok)
        }
        AnyCircuit::Layered(c) => {
            let opts = Lc0Options {
                schedule: if a.amplify { EpsSchedule::Amplify } else { EpsSchedule::Split },
                verify: Some(a.verify.clone()),
                ..Lc0Options::default()
            };
            let (p, r) = lc0_compose(&c, &a.eps, &opts)?;
            let ok = r.error.as_ref().is_none_or(|e| e.max_deviation <= r.error_bound);
            (p, serde_json::to_value(&r).expect("report"), ok)
        }
    };
    let text = poly.to_text();
    if let Some(p) = &a.poly_out {
        write_file(p, &text)?;
    }
    let status = if bound_ok { EXIT_OK } else { EXIT_VERIFY };
    Ok((json!({ "report": report, "polynomial": text }), status))
}

fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .enumerate()
        .map(|(i, ch)| match ch {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::parse(format!("--input position {}", i + 1), format!("expected 0 or 1, got {ch:?}"))),
        })
        .collect()
}

fn cmd_simulate(a: &SimulateArgs) -> Result<(Value, i32)> {
    let AnyCircuit::Shared(c) = load_circuit(&a.circuit)? else {
        return Err(Error::InvalidCircuit("simulate needs a shared-input circuit".into()));
    };
    let x = parse_bits(&a.input)?;
    let model = GroverCostModel {
        c_search: a.c_search.clone(),
        failure_prob: a.failure_prob.clone(),
        final_log_factor: a.final_log,
    };
    let (_, trace) = eliminate_high_fanin(&c, &x, a.qf, a.seed, &model)?;
    let status = if trace.agrees && trace.completed { EXIT_OK } else { EXIT_VERIFY };
    Ok((serde_json::to_value(&trace).expect("trace"), status))
}

fn cmd_scaling(a: &ScalingArgs) -> Result<String> {
    let t = if a.t == "n" {
        None
    } else {
        Some(a.t.parse::<usize>().map_err(|_| Error::parse("--t", format!("expected an integer or n, got {:?}", a.t)))?)
    };
    let family = match a.family {
        FamilyArg::ParityAnd => Family::ParityAnd { t },
        FamilyArg::RandomShared => Family::RandomShared {
            t: t.ok_or_else(|| Error::parse("--t", "random-shared needs a fixed t"))?,
        },
    };
    let model = GroverCostModel {
        final_log_factor: a.final_log,
        ..GroverCostModel::default()
    };
    let table = experiment_scaling(family, &a.n_grid, a.seeds, &model)?;
    if a.n_grid.len() >= 2 {
        eprintln!("fitted slope {:.4}", table.slope());
    }
    Ok(table.to_csv())
}

fn cmd_learn(a: &LearnArgs) -> Result<(Value, i32)> {
    let circuit = load_circuit(&a.circuit)?;
    let dist = match a.dist.strip_prefix("product:") {
        None if a.dist == "uniform" => Distribution::Uniform,
        None => return Err(Error::parse("--dist", format!("expected uniform or product:p1,..., got {:?}", a.dist))),
        Some(list) => Distribution::Product {
            p: list
                .split(',')
                .map(|v| parse_rational(v).map(|r| to_f64(&r)))
                .collect::<Result<Vec<_>>>()?,
        },
    };
    let name = a.circuit.display().to_string();
    let data = gen_dataset(&circuit.evaluator(), &name, &dist, to_f64(&a.noise), a.samples, a.seed)?;
    let rounding = match a.rounding {
        RoundingArg::Half => Rounding::Half,
        RoundingArg::Random => Rounding::Random { seed: a.seed },
    };
    let (_, r) = agnostic_learn(&data, a.degree, to_f64(&a.holdout), a.seed, rounding)?;
    Ok((serde_json::to_value(&r).expect("report"), EXIT_OK))
}

fn cmd_amaj_sample(a: &AmajSampleArgs) -> Result<(Value, i32)> {
    let spec = AmajSpec::new(a.m, a.delta.clone(), a.p.clone(), a.q.clone(), a.seed)?;
    let (c, outcome) = sample_verified(&spec, a.verify, a.attempts)?;
    if let Some(p) = &a.circuit_out {
        write_file(p, &c.to_json())?;
    }
    let status = if outcome.verified { EXIT_OK } else { EXIT_VERIFY };
    Ok((serde_json::to_value(&outcome).expect("outcome"), status))
}

fn cmd_amaj_recurse(a: &AmajRecurseArgs) -> Result<(Value, i32)> {
    let k = (a.q.clone() * Rational::from_integer(a.m.into())).ceil().to_integer();
    let k: usize = k.try_into().map_err(|_| Error::OutOfRange("threshold does not fit".into()))?;
    let mut circuit = LayeredCircuit::threshold_cnf(a.m, k)?;
    let mut params = RecursiveAmajParams::new(a.d, a.m, a.p.clone(), a.q.clone())?;
    let outer = |level: usize| AmajSpec::new(a.outer_m, Rational::from_integer(1.into()), a.p.clone(), a.q.clone(), a.seed ^ (level as u64) << 40);
    let mut levels = Vec::new();
    let mut ok = true;
    for level in 0..a.levels {
        let (next, report) = recursive_step(&circuit, &outer(level)?, &params, a.seed.wrapping_add(level as u64), Some(a.verify))?;
        ok &= report.promise.as_ref().is_some_and(|p| p.violations == 0);
        levels.push(serde_json::to_value(&report).expect("report"));
        params = report.next.clone();
        circuit = next;
    }
    if let Some(p) = &a.circuit_out {
        write_file(p, &circuit.to_json())?;
    }
    let status = if ok { EXIT_OK } else { EXIT_VERIFY };
    Ok((
        json!({ "levels": levels, "final_inputs": circuit.n(), "final_depth": circuit.depth(), "final_size": circuit.size() }),
        status,
    ))
}

fn dispatch(cfg: &RunConfig) -> Result<Output> {
    let json_result = |r: Result<(Value, i32)>| -> Result<Output> {
        let (v, status) = r?;
        Ok(Output {
            body: envelope(cfg, v),
            status,
        })
    };
    match &cfg.command {
        Command::Adeg(a) => json_result(cmd_adeg(a)),
        Command::Mu(a) => json_result(cmd_mu(a)),
        Command::Compose(a) => json_result(cmd_compose(a)),
        Command::Simulate(a) => json_result(cmd_simulate(a)),
        Command::Scaling(a) => Ok(Output {
            body: cmd_scaling(a)?,
            status: EXIT_OK,
        }),
        Command::Learn(a) => json_result(cmd_learn(a)),
        Command::Amaj(AmajCommand::Sample(a)) => json_result(cmd_amaj_sample(a)),
        Command::Amaj(AmajCommand::Recurse(a)) => json_result(cmd_amaj_recurse(a)),
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Verification(_) | Error::NotAmplifiable(_) | Error::Lp(_) => EXIT_VERIFY,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (program name first), runs one command and returns the
/// exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(&cfg) {
        Ok(out) => {
            let written = match &cfg.out {
                Some(p) => std::fs::write(p, &out.body),
                None => std::io::stdout().write_all(out.body.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return EXIT_USAGE;
            }
            out.status
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
