//! Command-line entry point: argument parsing, dispatch and exit codes.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use mixgap_core::chain::{reachable_states, stationary, to_matrix, StateSpace, TransitionMatrix};
use mixgap_core::circuit::{Bits, ChainCircuit, SamplerCircuit};
use mixgap_core::coam::{coam_sd_round, Claims, CoamConfig};
use mixgap_core::dyadic::DyadicChain;
use mixgap_core::estimator::{simulate_frequencies, CircuitChain, EmpiricalProfile, EstimatorConfig, Stepper};
use mixgap_core::lower_bound::{amplified_lower_bound, is_no, is_yes, lower_bound_round, Profile, Prover, ProtocolParams};
use mixgap_core::matrix::{Matrix, PowerLadder};
use mixgap_core::mixing::{conductance, conductance_of_cuts, default_cap, max_row_distance, tau, tau_from, tv_distance, CONDUCTANCE_CAP};
use mixgap_core::reductions::{
    exact_decide_with, sd_to_chain, tm_to_chain, unsat_to_chain, CnfFormula, DecideMode, Decision, Measure, ToyMachine,
};
use mixgap_core::sd::{am_sd_round, honest_am_acceptance, honest_label, quantization_levels, SdPair};
use mixgap_core::{rational, Error as CoreError, Rational, Scalar};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::io::{
    self, bits_from_str, canonical, format_decimal, load_chain_circuit, load_instance, load_matrix, load_sampler, rational_arg,
    rational_json, rational_string, InstanceFile,
};
use crate::report::{self, Report};

/// Exact arithmetic is used automatically up to this many states.
const AUTO_EXACT_STATES: usize = 16;
/// Per-pair distances are listed up to this many states.
const PAIR_LISTING_CAP: usize = 64;

#[derive(Debug, Parser)]
#[command(name = "mixgap", version, about = "Exact and sampled mixing analysis of circuit-specified Markov chains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Distances to stationarity, mixing times and conductance.
    #[command(subcommand)]
    Analyze(Analyze),
    /// Estimate d(t) by simulation.
    Estimate(EstimateArgs),
    /// Run an interactive protocol on a pair of samplers.
    Protocol(ProtocolArgs),
    /// Build a hard instance of a convergence-testing problem.
    #[command(subcommand)]
    Gadget(Gadget),
    /// Classify a promise instance by brute force.
    Decide(DecideArgs),
    /// Batteries of checks.
    #[command(subcommand)]
    Suite(Suite),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Mode {
    Auto,
    Exact,
    Float,
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    /// Matrix file.
    #[arg(long, conflicts_with = "circuit", required_unless_present = "circuit")]
    pub matrix: Option<PathBuf>,
    /// Chain circuit file.
    #[arg(long)]
    pub circuit: Option<PathBuf>,
    /// Root of the reachable state space of a circuit (default all zeros).
    #[arg(long)]
    pub start: Option<String>,
    /// Use all of {0,1}^n instead of the states reachable from --start.
    #[arg(long)]
    pub full_space: bool,
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Analyze {
    /// d(t) = max over pairs of d_tv(P^t(x,.), P^t(y,.)), or the distance from one start.
    DOfT {
        #[command(flatten)]
        chain: ChainArgs,
        /// Single time.
        #[arg(long, required_unless_present = "horizon")]
        t: Option<u64>,
        /// Tabulate t = 0..=H.
        #[arg(long)]
        horizon: Option<u64>,
        /// Measure d_tv(P^t(x,.), pi) from this state instead of the worst pair.
        #[arg(long)]
        from: Option<String>,
        #[arg(long, value_enum, default_value = "auto")]
        mode: Mode,
        /// Write the table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Least t with d(t) <= eps.
    Tau {
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long)]
        eps: String,
        /// Search cap (default 10 |states|^3).
        #[arg(long)]
        cap: Option<u64>,
        #[arg(long)]
        from: Option<String>,
        #[arg(long, value_enum, default_value = "auto")]
        mode: Mode,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Conductance of a weighted chain and the mixing-time bound it implies.
    Conductance {
        #[command(flatten)]
        chain: ChainArgs,
        /// JSON list of cuts (lists of state bit-strings); required above 24 states.
        #[arg(long)]
        cuts: Option<PathBuf>,
        #[arg(long, default_value = "1/4")]
        eps: String,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    #[arg(long)]
    pub t: u64,
    #[arg(long)]
    pub delta: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Runs per start state (default ceil(48 n / delta^2), n = state bits).
    #[arg(long)]
    pub runs: Option<u64>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ProtocolKind {
    AmSd,
    GsLb,
    CoamSd,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ProfileArg {
    Paper,
    Desk,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ProverArg {
    Honest,
    Greedy,
}

#[derive(Debug, Args)]
pub struct ProtocolArgs {
    #[arg(value_enum)]
    pub kind: ProtocolKind,
    #[arg(long)]
    pub c1: PathBuf,
    #[arg(long)]
    pub c2: PathBuf,
    #[arg(long, default_value = "1/3")]
    pub delta: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub rounds: u64,
    #[arg(long, value_enum, default_value = "paper")]
    pub profile: ProfileArg,
    /// Include every transcript in the report.
    #[arg(long)]
    pub transcripts: bool,
    /// gs-lb: preimage threshold t.
    #[arg(long)]
    pub t: Option<u64>,
    /// gs-lb: claimed set size N~.
    #[arg(long)]
    pub n_tilde: Option<u64>,
    /// gs-lb: prover strategy.
    #[arg(long, value_enum, default_value = "honest")]
    pub prover: ProverArg,
    /// gs-lb: majority over this many rounds; coam-sd: rounds per certificate
    /// (default from the error target).
    #[arg(long)]
    pub reps: Option<u64>,
    /// coam-sd: honest, inflate-all, shift-levels, inflate-one:J or zero-tail:K.
    #[arg(long, default_value = "honest")]
    pub claims: String,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct GapArgs {
    /// Gap factor c.
    #[arg(long, default_value = "1")]
    pub c: String,
    #[arg(long, default_value = "1/10")]
    pub delta: String,
    /// Instance file; without it the instance goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Gadget {
    /// Chain on [m] x {0,1}^n whose distance from stationarity encodes d_tv(C1, C2).
    SdChain {
        #[arg(long)]
        c1: PathBuf,
        #[arg(long)]
        c2: PathBuf,
        #[arg(long)]
        m: u64,
        #[arg(long, default_value_t = 1)]
        t: u64,
        /// Default m.
        #[arg(long)]
        t_max: Option<u64>,
        #[command(flatten)]
        gap: GapArgs,
    },
    /// Weighted hypercube that mixes fast iff the formula is unsatisfiable.
    Unsat {
        /// DIMACS CNF file.
        #[arg(long)]
        cnf: PathBuf,
        #[arg(long, default_value_t = 2)]
        d: u32,
        #[command(flatten)]
        gap: GapArgs,
    },
    /// Configuration graph of a toy space-bounded machine.
    Tm {
        /// first-bit, contains-one or parity.
        #[arg(long)]
        machine: String,
        #[arg(long)]
        cells: usize,
        /// Input bits, e.g. 0110.
        #[arg(long)]
        input: String,
        #[command(flatten)]
        gap: GapArgs,
    },
}

#[derive(Debug, Args)]
pub struct DecideArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    pub mode: Mode,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Subcommand)]
pub enum Suite {
    /// Runs the twelve acceptance criteria and prints one PASS/FAIL line each.
    Acceptance {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Comma-separated criterion numbers (default all).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
        #[command(flatten)]
        out: OutArgs,
    },
}

/// Applies `MIXGAP_THREADS` to the global worker pool.
pub fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("MIXGAP_THREADS") else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| CliError::Usage(format!("MIXGAP_THREADS={raw:?} must be a positive integer")))?;
    // A second call in the same process finds the pool already built.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run(argv: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = configure_threads().and_then(|()| dispatch(&cli.command, &argv[1..]));
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn emit(report: &Report, out: &OutArgs) -> CliResult<()> {
    let text = canonical(&report.to_json());
    match &out.out {
        Some(path) => io::write_text(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn dispatch(cmd: &Command, argv: &[String]) -> CliResult<i32> {
    let mut report = Report::new(argv);
    match cmd {
        Command::Analyze(a) => analyze(a, &mut report),
        Command::Estimate(a) => estimate(a, &mut report),
        Command::Protocol(a) => protocol(a, &mut report),
        Command::Gadget(g) => gadget(g, &mut report),
        Command::Decide(a) => decide(a, &mut report),
        Command::Suite(Suite::Acceptance { seed, only, out }) => {
            report.seed(*seed);
            let outcomes = crate::acceptance::run(*seed, only, |o| eprintln!("{}", o.line()));
            let passed = outcomes.iter().filter(|o| o.pass).count();
            report.result("criteria", outcomes.iter().map(|o| o.to_json()).collect::<Vec<_>>());
            report.result("passed", report::exact_int(passed as u64));
            report.result("total", report::exact_int(outcomes.len() as u64));
            emit(&report, out)?;
            Ok(0)
        }
    }
}

// ---------------------------------------------------------------------------
// Chains

struct LoadedChain {
    matrix: TransitionMatrix,
}

fn state_space_for(circuit: &ChainCircuit, args: &ChainArgs) -> CliResult<StateSpace> {
    if args.full_space {
        return Ok(StateSpace::full(circuit.state_bits()));
    }
    let root = match &args.start {
        Some(s) => bits_from_str(s, "--start")?,
        None => Bits::zeros(circuit.state_bits()),
    };
    if root.width != circuit.state_bits() {
        return Err(CliError::Usage(format!("--start has {} bits, the circuit has n = {}", root.width, circuit.state_bits())));
    }
    Ok(reachable_states(circuit, root)?)
}

fn load_chain(args: &ChainArgs) -> CliResult<LoadedChain> {
    match (&args.matrix, &args.circuit) {
        (Some(m), None) => Ok(LoadedChain { matrix: load_matrix(m)? }),
        (None, Some(c)) => {
            let circuit = load_chain_circuit(c)?;
            let space = state_space_for(&circuit, args)?;
            Ok(LoadedChain { matrix: to_matrix(&circuit, &space)? })
        }
        _ => Err(CliError::Usage("give exactly one of --matrix or --circuit".into())),
    }
}

fn state_index(p: &TransitionMatrix, text: &str, flag: &str) -> CliResult<usize> {
    let b = bits_from_str(text, flag)?;
    if b.width != p.space().width() {
        return Err(CliError::Usage(format!("{flag} has {} bits, states have {}", b.width, p.space().width())));
    }
    p.space().index_of(b.value).ok_or_else(|| CliError::Usage(format!("{flag} {text} is not a state of the chain")))
}

fn use_exact(mode: Mode, states: usize) -> bool {
    match mode {
        Mode::Exact => true,
        Mode::Float => false,
        Mode::Auto => states <= AUTO_EXACT_STATES,
    }
}

/// `value` as a report number, with the rational when the backend is exact.
fn number<S: Scalar + 'static>(v: &S) -> Value {
    match (v as &dyn std::any::Any).downcast_ref::<Rational>() {
        Some(r) => report::exact(r),
        None => report::exact_float(v.to_f64()),
    }
}

fn state_name(p: &TransitionMatrix, i: usize) -> Value {
    json!(p.space().state(i).to_string())
}

fn d_table<S: Scalar + 'static>(p: &TransitionMatrix, times: &[u64], from: Option<usize>) -> CliResult<Vec<(u64, S, Option<(usize, usize)>)>> {
    let pi = match from {
        Some(_) => Some(stationary::<S>(p)?),
        None => None,
    };
    let mut ladder = PowerLadder::new(p.to_scalar::<S>());
    let mut rows = Vec::with_capacity(times.len());
    let mut current: Option<(u64, Matrix<S>)> = None;
    for &t in times {
        let m = match current.take() {
            Some((prev, m)) if prev + 1 == t => m.mul(&ladder.power(1)),
            _ => ladder.power(t),
        };
        let entry = match (&pi, from) {
            (Some(pi), Some(x)) => (t, tv_distance(m.row(x), pi.mass())?, None),
            _ => {
                let (d, x, y) = max_row_distance(&m);
                (t, d, Some((x, y)))
            }
        };
        rows.push(entry);
        current = Some((t, m));
    }
    Ok(rows)
}

fn write_csv<S: Scalar + 'static>(path: &Path, rows: &[(u64, S, Option<(usize, usize)>)]) -> CliResult<()> {
    let to_io = |e: csv::Error| CliError::Io { path: path.to_path_buf(), source: std::io::Error::other(e) };
    let mut w = csv::Writer::from_path(path).map_err(to_io)?;
    w.write_record(["t", "d", "d_exact"]).map_err(to_io)?;
    for (t, d, _) in rows {
        let exact = (d as &dyn std::any::Any).downcast_ref::<Rational>().map(rational_string).unwrap_or_default();
        w.write_record([t.to_string(), format_decimal(d.to_f64()), exact]).map_err(to_io)?;
    }
    w.flush().map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn analyze(a: &Analyze, report: &mut Report) -> CliResult<i32> {
    match a {
        Analyze::DOfT { chain, t, horizon, from, mode, csv, out } => {
            let loaded = load_chain(chain)?;
            let p = &loaded.matrix;
            let x = from.as_deref().map(|s| state_index(p, s, "--from")).transpose()?;
            let times: Vec<u64> = match (t, horizon) {
                (_, Some(h)) => (0..=*h).collect(),
                (Some(t), None) => vec![*t],
                (None, None) => return Err(CliError::Usage("give --t or --horizon".into())),
            };
            report.param("states", p.len()).param("measure", if x.is_some() { "from_start" } else { "worst_pair" });
            if let Some(s) = from {
                report.param("from", s.as_str());
            }
            if use_exact(*mode, p.len()) {
                let rows = d_table::<Rational>(p, &times, x)?;
                fill_d_report(report, p, &rows);
                if let Some(path) = csv {
                    write_csv(path, &rows)?;
                }
            } else {
                let rows = d_table::<f64>(p, &times, x)?;
                fill_d_report(report, p, &rows);
                if let Some(path) = csv {
                    write_csv(path, &rows)?;
                }
            }
            emit(report, out)?;
            Ok(0)
        }
        Analyze::Tau { chain, eps, cap, from, mode, out } => {
            let loaded = load_chain(chain)?;
            let p = &loaded.matrix;
            let eps_r = rational_arg(eps, "--eps")?;
            let cap = cap.unwrap_or_else(|| default_cap(p.len()));
            let x = from.as_deref().map(|s| state_index(p, s, "--from")).transpose()?;
            let exact = use_exact(*mode, p.len());
            let value = match (exact, x) {
                (true, None) => tau::<Rational>(p, &eps_r, cap)?,
                (true, Some(x)) => tau_from::<Rational>(p, x, &eps_r, cap)?,
                (false, None) => tau::<f64>(p, &eps_r.to_f64(), cap)?,
                (false, Some(x)) => tau_from::<f64>(p, x, &eps_r.to_f64(), cap)?,
            };
            report.param("states", p.len()).param("cap", cap).param("eps", rational_string(&eps_r));
            report.result("eps", report::exact(&eps_r)).result("tau", report::exact_int(value));
            report.result("arithmetic", if exact { "rational" } else { "f64" });
            emit(report, out)?;
            Ok(0)
        }
        Analyze::Conductance { chain, cuts, eps, out } => {
            let loaded = load_chain(chain)?;
            let p = &loaded.matrix;
            let eps_r = rational_arg(eps, "--eps")?;
            let c = match cuts {
                Some(path) => {
                    let v = io::read_json(path)?;
                    let sets = parse_cuts(p, &v).map_err(|e| e.in_file(&path.display().to_string()))?;
                    conductance_of_cuts(p, &sets)?
                }
                None if p.len() <= CONDUCTANCE_CAP => conductance(p)?,
                None => {
                    return Err(CliError::Usage(format!(
                        "{} states: exact conductance enumerates subsets only up to {CONDUCTANCE_CAP}; pass --cuts",
                        p.len()
                    )))
                }
            };
            let bound = c.bound(eps_r.to_f64())?;
            report.param("states", p.len()).param("eps", rational_string(&eps_r));
            report
                .result("phi", report::exact(&c.phi))
                .result("phi_is_exact_minimum", c.exact)
                .result("witness", c.witness.iter().map(|&i| state_name(p, i)).collect::<Vec<_>>())
                .result("pi_min", report::exact(&c.pi_min))
                .result("bound", report::exact_float(bound));
            let tau_value = if p.len() <= AUTO_EXACT_STATES {
                tau::<Rational>(p, &eps_r, default_cap(p.len()))
            } else {
                tau::<f64>(p, &eps_r.to_f64(), default_cap(p.len()))
            };
            match tau_value {
                Ok(t) => report.result("tau", report::exact_int(t)),
                Err(CoreError::Unresolved { .. }) => report.result("tau", Value::Null),
                Err(e) => return Err(e.into()),
            };
            emit(report, out)?;
            Ok(0)
        }
    }
}

fn fill_d_report<S: Scalar + 'static>(report: &mut Report, p: &TransitionMatrix, rows: &[(u64, S, Option<(usize, usize)>)]) {
    let entry = |(t, d, w): &(u64, S, Option<(usize, usize)>)| {
        let mut e = json!({"t": report::exact_int(*t), "d": number(d)});
        if let Some((x, y)) = w {
            e["witness"] = json!([state_name(p, *x), state_name(p, *y)]);
        }
        e
    };
    report.result("arithmetic", if S::EXACT { "rational" } else { "f64" });
    if rows.len() == 1 {
        let e = entry(&rows[0]);
        for (k, v) in e.as_object().expect("entry is an object") {
            report.result(k, v.clone());
        }
    } else {
        report.result("curve", rows.iter().map(entry).collect::<Vec<_>>());
    }
}

fn parse_cuts(p: &TransitionMatrix, v: &Value) -> CliResult<Vec<Vec<usize>>> {
    let list = v.as_array().ok_or_else(|| CliError::schema("(document)", "expected a list of cuts"))?;
    list.iter()
        .enumerate()
        .map(|(i, cut)| {
            let members = cut.as_array().ok_or_else(|| CliError::schema(format!("[{i}]"), "expected a list of states"))?;
            members
                .iter()
                .enumerate()
                .map(|(j, s)| {
                    let path = format!("[{i}][{j}]");
                    let b = bits_from_str(s.as_str().ok_or_else(|| CliError::schema(path.clone(), "expected a bit-string"))?, &path)?;
                    p.space().index_of(b.value).ok_or_else(|| CliError::schema(path, format!("{b} is not a state")))
                })
                .collect()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Estimation

fn estimate(a: &EstimateArgs, report: &mut Report) -> CliResult<i32> {
    let delta = rational_arg(&a.delta, "--delta")?.to_f64();
    let (stepper, matrix): (Box<dyn Stepper>, TransitionMatrix) = match (&a.chain.matrix, &a.chain.circuit) {
        (Some(path), None) => {
            let p = load_matrix(path)?;
            let d = DyadicChain::exact_from(&p).map_err(|e| match e {
                CoreError::NotDyadic { .. } => CliError::Usage(format!(
                    "{}: {e}. Simulation draws uniform random bits, so every transition probability must be k/2^m; \
                     round the chain or supply a circuit",
                    path.display()
                )),
                other => other.into(),
            })?;
            (Box::new(d), p)
        }
        (None, Some(path)) => {
            let circuit = load_chain_circuit(path)?;
            let space = state_space_for(&circuit, &a.chain)?;
            let p = to_matrix(&circuit, &space)?;
            (Box::new(CircuitChain { circuit, space }), p)
        }
        _ => return Err(CliError::Usage("give exactly one of --matrix or --circuit".into())),
    };
    let config = match a.runs {
        Some(runs) => EstimatorConfig { delta, runs, seed: a.seed, t: a.t },
        None => EstimatorConfig::with_default_runs(stepper.state_bits(), delta, a.seed, a.t)?,
    };
    let profile = simulate_frequencies(stepper.as_ref(), &config)?;
    report.seed(a.seed).param("t", a.t).param("delta", a.delta.as_str()).param("states", matrix.len());
    fill_estimate(report, &matrix, &profile);
    emit(report, &a.out)?;
    Ok(0)
}

fn fill_estimate(report: &mut Report, p: &TransitionMatrix, profile: &EmpiricalProfile) {
    let (n, seed) = (profile.runs, profile.seed);
    let (d_hat, x, y) = profile.d_hat();
    let accept = d_hat <= rational(1, 4);
    report
        .result("N", report::exact_int(n))
        .result("d_hat", report::estimated(&d_hat, n, seed))
        .result("witness", json!([state_name(p, x), state_name(p, y)]))
        .result("decision", if accept { "accept" } else { "reject" });
    if p.len() <= PAIR_LISTING_CAP {
        let mut pairs = Vec::new();
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                pairs.push(json!({"x": state_name(p, i), "y": state_name(p, j), "M": report::estimated(&profile.m(i, j), n, seed)}));
            }
        }
        report.result("per_pair", pairs);
    }
    let exact_d = if p.len() <= AUTO_EXACT_STATES {
        number(&max_row_distance(&p.to_scalar::<Rational>().pow(profile.t)).0)
    } else {
        number(&max_row_distance(&p.to_scalar::<f64>().pow(profile.t)).0)
    };
    let d = exact_d["value"].as_str().and_then(|s| s.parse::<f64>().ok()).unwrap_or(f64::NAN);
    report.result("d_exact", exact_d);
    report.result("estimation_error", report::estimated_float((d_hat.to_f64() - d).abs(), n, seed));
}

// ---------------------------------------------------------------------------
// Protocols

fn round_rng(seed: u64, round: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(round);
    rng
}

fn parse_claims(text: &str) -> CliResult<Claims> {
    let bad = || CliError::Usage(format!("--claims {text:?}: expected honest, inflate-all, shift-levels, inflate-one:J or zero-tail:K"));
    Ok(match text {
        "honest" => Claims::Honest,
        "inflate-all" => Claims::InflateAll,
        "shift-levels" => Claims::ShiftLevels,
        other => match other.split_once(':') {
            Some(("inflate-one", j)) => Claims::InflateOne(j.parse().map_err(|_| bad())?),
            Some(("zero-tail", k)) => Claims::ZeroOutTail { keep: k.parse().map_err(|_| bad())? },
            _ => return Err(bad()),
        },
    })
}

fn profile_of(p: ProfileArg) -> Profile {
    match p {
        ProfileArg::Paper => Profile::Paper,
        ProfileArg::Desk => Profile::Desk,
    }
}

fn label_name(l: mixgap_core::sd::Label) -> &'static str {
    match l {
        mixgap_core::sd::Label::First => "C1",
        mixgap_core::sd::Label::Second => "C2",
    }
}

fn protocol(a: &ProtocolArgs, report: &mut Report) -> CliResult<i32> {
    let c1: SamplerCircuit = load_sampler(&a.c1)?;
    let c2: SamplerCircuit = load_sampler(&a.c2)?;
    let pair = SdPair::new(&c1, &c2)?;
    let delta = rational_arg(&a.delta, "--delta")?;
    let profile = profile_of(a.profile);
    if a.rounds == 0 {
        return Err(CliError::Usage("--rounds must be positive".into()));
    }
    report.seed(a.seed).profile(profile.name()).param("rounds", a.rounds).param("delta", rational_string(&delta));
    let d_tv = pair.tv();
    report.result("d_tv", report::exact(&d_tv));
    let (accepted, transcripts): (u64, Vec<Value>) = match a.kind {
        ProtocolKind::AmSd => {
            report.param("protocol", "am-sd").param("prover", "honest");
            let runs: Vec<_> = (0..a.rounds)
                .into_par_iter()
                .map(|i| am_sd_round(&pair, |x| honest_label(&pair, x), &mut round_rng(a.seed, i)))
                .collect();
            report.result("honest_acceptance", report::exact(&honest_am_acceptance(&pair)));
            let tr = runs
                .iter()
                .map(|t| json!({"coin": if t.coin { "C2" } else { "C1" }, "input": t.input, "sample": t.sample, "label": label_name(t.label), "accept": t.accept}))
                .collect();
            (runs.iter().filter(|t| t.accept).count() as u64, tr)
        }
        ProtocolKind::GsLb => {
            let t = a.t.ok_or_else(|| CliError::Usage("gs-lb needs --t".into()))?;
            let n_tilde = a.n_tilde.ok_or_else(|| CliError::Usage("gs-lb needs --n-tilde".into()))?;
            let params = ProtocolParams::standard(&delta, n_tilde, t, profile)?;
            let prover = match a.prover {
                ProverArg::Honest => Prover::Honest,
                ProverArg::Greedy => Prover::Greedy,
            };
            let reps = a.reps.unwrap_or(1);
            report.param("protocol", "gs-lb").param("t", t).param("n_tilde", n_tilde).param("reps", reps);
            report.param("prover", if prover == Prover::Honest { "honest" } else { "greedy" });
            report.result(
                "params",
                json!({
                    "a": report::exact_int(params.a.into()),
                    "b": report::exact_int(params.b.into()),
                    "c_count": report::exact_int(params.c_count),
                    "d_count": report::exact_int(params.d_count),
                    "delta1": report::exact_float(params.delta1),
                    "delta2": report::exact_float(params.delta2),
                    "k1": report::exact_int(params.constants.k1),
                    "k2": report::exact_int(params.constants.k2),
                    "exact_outputs": params.exact_outputs,
                    "exact_preimages": params.exact_preimages,
                }),
            );
            report.result("promise", json!({"yes": is_yes(&pair, t, n_tilde), "no": is_no(&pair, t, n_tilde, &delta)}));
            let runs: Vec<(bool, Value)> = (0..a.rounds)
                .into_par_iter()
                .map(|i| {
                    let mut rng = round_rng(a.seed, i);
                    if reps == 1 {
                        let tr = lower_bound_round(&pair, &params, prover, &mut rng);
                        let v = json!({"outputs": tr.outputs, "accept": tr.accept, "rejection": tr.rejection.map(|r| format!("{r:?}"))});
                        (tr.accept, v)
                    } else {
                        let (ok, count) = amplified_lower_bound(&pair, &params, prover, reps, &mut rng);
                        (ok, json!({"accepted_rounds": count, "accept": ok}))
                    }
                })
                .collect();
            (runs.iter().filter(|r| r.0).count() as u64, runs.into_iter().map(|r| r.1).collect())
        }
        ProtocolKind::CoamSd => {
            let claims = parse_claims(&a.claims)?;
            let config = CoamConfig { delta: delta.clone(), profile, repetitions: a.reps };
            report.param("protocol", "coam-sd").param("claims", a.claims.as_str());
            report.result("levels", report::exact_int(quantization_levels(pair.input_width(), &delta) + 1));
            let runs = (0..a.rounds)
                .into_par_iter()
                .map(|i| coam_sd_round(&pair, &config, &claims, &mut round_rng(a.seed, i)))
                .collect::<Result<Vec<_>, _>>()?;
            let tr = runs
                .iter()
                .map(|t| {
                    json!({
                        "claims": t.claims,
                        "certified_levels": t.certificates.len(),
                        "weighted_sum": rational_json(&t.weighted_sum),
                        "threshold": rational_json(&t.threshold),
                        "malformed": t.malformed,
                        "accept": t.accept,
                    })
                })
                .collect();
            (runs.iter().filter(|t| t.accept).count() as u64, tr)
        }
    };
    report.result("accept_count", report::estimated_int(accepted, a.rounds, a.seed));
    report.result("rounds", report::exact_int(a.rounds));
    report.result("acceptance", report::estimated(&Rational::new(accepted.into(), a.rounds.into()), a.rounds, a.seed));
    if a.transcripts {
        report.result("transcripts", transcripts);
    }
    emit(report, &a.out)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// Gadgets and decisions

fn write_instance(file: &InstanceFile, out: &Option<PathBuf>, report: &mut Report) -> CliResult<i32> {
    let text = canonical(&io::instance_json(file));
    match out {
        Some(path) => {
            io::write_text(path, &text)?;
            report.param("out", path.display().to_string());
            emit(report, &OutArgs { out: None })?;
        }
        None => print!("{text}"),
    }
    Ok(0)
}

fn gadget(g: &Gadget, report: &mut Report) -> CliResult<i32> {
    match g {
        Gadget::SdChain { c1, c2, m, t, t_max, gap } => {
            let (a, b) = (load_sampler(c1)?, load_sampler(c2)?);
            let c = rational_arg(&gap.c, "--c")?;
            let delta = rational_arg(&gap.delta, "--delta")?;
            let inst = sd_to_chain(&a, &b, *m, *t, Some(t_max.unwrap_or(*m)), c, delta)?;
            let provenance = json!({"gadget": "sd-chain", "params": {"m": m, "c1": io::sampler_json(&a), "c2": io::sampler_json(&b)}});
            report.param("gadget", "sd-chain").result("states", report::exact_int(inst.space().len() as u64));
            report.result("d_tv", report::exact(&SdPair::new(&a, &b)?.tv()));
            write_instance(&InstanceFile { instance: inst, provenance: Some(provenance) }, &gap.out, report)
        }
        Gadget::Unsat { cnf, d, gap } => {
            let (vars, clauses) = io::parse_dimacs(&io::read_text(cnf)?).map_err(|e| e.in_file(&cnf.display().to_string()))?;
            let psi = CnfFormula::from_dimacs(vars, &clauses)?;
            let c = rational_arg(&gap.c, "--c")?;
            let delta = rational_arg(&gap.delta, "--delta")?;
            let inst = unsat_to_chain(&psi, *d, delta, c)?;
            let satisfiable = !psi.satisfying().is_empty();
            let provenance = json!({"gadget": "unsat", "params": {"vars": vars, "clauses": clauses, "d": d}});
            report.param("gadget", "unsat").result("satisfiable", satisfiable);
            report.result("states", report::exact_int(inst.space().len() as u64));
            write_instance(&InstanceFile { instance: inst, provenance: Some(provenance) }, &gap.out, report)
        }
        Gadget::Tm { machine, cells, input, gap } => {
            let m = ToyMachine::builtin(machine, *cells)?;
            let bits: Vec<bool> = input
                .chars()
                .map(|ch| match ch {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    other => Err(CliError::Usage(format!("--input contains {other:?}; use 0 and 1"))),
                })
                .collect::<CliResult<_>>()?;
            let c = rational_arg(&gap.c, "--c")?;
            let delta = rational_arg(&gap.delta, "--delta")?;
            let g = tm_to_chain(&m, &bits, c, delta)?;
            let provenance = json!({
                "gadget": "tm",
                "params": {"machine": machine, "cells": cells, "input": input, "accepted": g.accepted, "n": g.n, "D": g.degree, "w": g.w, "steps": g.steps},
            });
            report.param("gadget", "tm").result("accepted", g.accepted);
            report.result("states", report::exact_int(g.instance.space().len() as u64));
            report.result("w", report::exact_int(g.w)).result("t", report::exact_int(g.instance.t));
            write_instance(&InstanceFile { instance: g.instance, provenance: Some(provenance) }, &gap.out, report)
        }
    }
}

fn measure_json(m: &Option<Measure>) -> Value {
    match m {
        None => Value::Null,
        Some(m) => json!({
            "t": report::exact_int(m.t),
            "d": match &m.exact { Some(r) => report::exact(r), None => report::exact_float(m.value) },
        }),
    }
}

fn decide(a: &DecideArgs, report: &mut Report) -> CliResult<i32> {
    let file = load_instance(&a.instance)?;
    let inst = &file.instance;
    inst.check_work_budget()?;
    let mode = match a.mode {
        Mode::Auto => DecideMode::Auto,
        Mode::Exact => DecideMode::Exact,
        Mode::Float => DecideMode::Float,
    };
    let v = exact_decide_with(inst, mode)?;
    report.param("kind", inst.kind.name()).param("t", inst.t).param("states", inst.space().len());
    if let Some(t_max) = inst.t_max {
        report.param("t_max", t_max);
    }
    report.param("c", rational_string(&inst.c)).param("delta", rational_string(&inst.delta));
    report
        .result("decision", v.decision.name())
        .result("arithmetic", if v.exact { "rational" } else { "f64" })
        .result("reason", json!(v.reason))
        .result("tau_quarter", v.tau_quarter.map(report::exact_int).unwrap_or(Value::Null))
        .result("before_t", measure_json(&v.before_t))
        .result("at_ct", measure_json(&v.at_ct));
    emit(report, &a.out)?;
    Ok(if v.decision == Decision::PromiseViolated { 2 } else { 0 })
}
