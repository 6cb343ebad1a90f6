//! Command-line front end and the crosscheck machinery it exposes.

use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::encoding::{self, VarNames};
use crate::presburger::{parse_formula, Evaluator, Formula, Valuation};
use crate::ringmodel::{
    enumerate_configurations, move_set, parse_distance_var, protocol_valid_bounded,
    view_clockwise, Configuration, ProtocolSpec, ValidityVerdict, View,
};
use crate::semantics::{
    enumerate_async_states, post_async, post_semisync, post_star, post_sync, AsyncState, Mode,
    Witness, DEFAULT_STATE_BUDGET,
};
use crate::solver::{
    emit_smt, extract_witness, run_solver, SolverConfig, SolverOutcome, VarRole,
};
use crate::Error;

pub const EXIT_HOLDS: i32 = 0;
pub const EXIT_REFUTED: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "ring-verify",
    version,
    about = "Verify look-compute-move robot protocols on parameterized rings"
)]
pub struct CliArgs {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Debug, Subcommand)]
enum CliCommand {
    /// Decide a safety question with the SMT solver: can a good
    /// configuration on an admissible ring step into the bad set?
    Verify(VerifyArgs),
    /// Check a property of the protocol itself (well-formedness or
    /// unique-sequentializability) with the SMT solver.
    Check(CheckArgs),
    /// Run the explicit-state simulator on one concrete instance.
    Simulate(SimulateArgs),
    /// Compare the step-relation encodings against the simulator on
    /// every configuration pair of a range of ring sizes.
    Crosscheck(CrosscheckArgs),
}

#[derive(Debug, Args)]
struct SolverArgs {
    /// Solver command template containing `{file}`; falls back to the
    /// RING_VERIFY_SOLVER environment variable, then to `z3 {file}`.
    #[arg(long)]
    solver_cmd: Option<String>,
    /// Solver timeout in seconds.
    #[arg(long, default_value_t = 60)]
    timeout: u64,
    /// Keep the emitted SMT-LIB document and print its path.
    #[arg(long)]
    keep_smt: bool,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig, Error> {
        let mut config = match &self.solver_cmd {
            Some(template) => SolverConfig::new(template.clone()),
            None => SolverConfig::from_environment()?,
        };
        config.timeout = Duration::from_secs(self.timeout);
        config.keep_smt = self.keep_smt;
        Ok(config)
    }
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Protocol formula file (over x1..xk).
    #[arg(long)]
    protocol: PathBuf,
    /// Ring property: a file or an inline formula over y.
    #[arg(long)]
    ring: String,
    /// Bad set: a file or an inline quantifier-free formula over x1..xk.
    #[arg(long)]
    bad: String,
    /// Reachability goal over x1..xk. Accepted for parsing only:
    /// deciding whether a goal can be missed is not supported.
    #[arg(long)]
    goal: Option<String>,
    /// Scheduling mode.
    #[arg(long)]
    mode: Mode,
    /// Number of robots; inferred from the formulas when omitted.
    #[arg(long)]
    robots: Option<usize>,
    /// Emit the report as JSON on stdout.
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Debug, Args)]
struct CheckArgs {
    /// Which property to check.
    #[arg(value_enum)]
    which: CheckKind,
    /// Protocol formula file (over x1..xk).
    #[arg(long)]
    protocol: PathBuf,
    /// Number of robots; inferred from the protocol when omitted.
    #[arg(long)]
    robots: Option<usize>,
    /// Emit the report as JSON on stdout.
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum CheckKind {
    Validity,
    Uniqseq,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Protocol formula file (over x1..xk).
    #[arg(long)]
    protocol: PathBuf,
    /// Ring size.
    #[arg(long)]
    n: u64,
    /// Comma-separated robot positions, e.g. `0,1,4`.
    #[arg(long)]
    positions: String,
    /// Scheduling mode.
    #[arg(long)]
    mode: Mode,
    /// Number of robots; inferred when omitted.
    #[arg(long)]
    robots: Option<usize>,
    /// Steps to trace (each one picks the smallest successor).
    #[arg(long, default_value_t = 1, conflicts_with = "reach")]
    steps: usize,
    /// Print all reachable configurations instead of a trace.
    #[arg(long)]
    reach: bool,
    /// Cap on explored states.
    #[arg(long, default_value_t = DEFAULT_STATE_BUDGET)]
    max_states: usize,
}

#[derive(Debug, Args)]
struct CrosscheckArgs {
    /// Protocol formula file (over x1..xk).
    #[arg(long)]
    protocol: PathBuf,
    /// Smallest ring size to check (defaults to the robot count).
    #[arg(long)]
    n_min: Option<u64>,
    /// Largest ring size to check.
    #[arg(long)]
    n_max: u64,
    /// Scheduling mode.
    #[arg(long)]
    mode: Mode,
    /// Number of robots; inferred when omitted.
    #[arg(long)]
    robots: Option<usize>,
    /// Cap on compared pairs.
    #[arg(long, default_value_t = DEFAULT_STATE_BUDGET)]
    max_states: usize,
    /// Emit the report as JSON on stdout.
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

/// Final verdict of a run, also the source of the exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum Verdict {
    Safe,
    Violation,
    Valid,
    Invalid,
    Uniqseq,
    NotUniqseq,
    Unknown,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Safe | Verdict::Valid | Verdict::Uniqseq => EXIT_HOLDS,
            Verdict::Violation | Verdict::Invalid | Verdict::NotUniqseq => EXIT_REFUTED,
            Verdict::Unknown => EXIT_UNKNOWN,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Verdict::Safe => "SAFE",
            Verdict::Violation => "VIOLATION",
            Verdict::Valid => "VALID",
            Verdict::Invalid => "INVALID",
            Verdict::Uniqseq => "UNIQSEQ",
            Verdict::NotUniqseq => "NOT-UNIQSEQ",
            Verdict::Unknown => "UNKNOWN",
        }
    }
}

/// Safety witness in the documented JSON shape.
#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub n: u64,
    pub start: Vec<u64>,
    pub successor: Vec<u64>,
    pub mode: String,
}

impl WitnessReport {
    fn new(witness: &Witness, mode: Mode) -> WitnessReport {
        WitnessReport {
            n: witness.n,
            start: witness.start.positions().to_vec(),
            successor: witness.successor.positions().to_vec(),
            mode: mode.to_string(),
        }
    }
}

/// Counterexample view for a refuted protocol-validity check.
#[derive(Debug, Clone, Serialize)]
pub struct ViewReport {
    pub n: u64,
    pub view: Vec<u64>,
    pub reverted: Vec<u64>,
}

/// Counterexample configuration for a refuted uniq-seq check.
#[derive(Debug, Clone, Serialize)]
pub struct MoversReport {
    pub n: u64,
    pub positions: Vec<u64>,
    pub movers: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: InputsReport,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invalid_view: Option<ViewReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub movers: Option<MoversReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub timings_ms: Vec<(String, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InputsReport {
    pub protocol: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ring: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bad: Option<String>,
    pub robots: usize,
    pub mode: Option<String>,
}

impl RunReport {
    fn print_human(&self) {
        println!("verdict: {}", self.verdict.label());
        if let Some(w) = &self.witness {
            println!(
                "witness: n={}; start={:?}; successor={:?}; mode={}",
                w.n, w.start, w.successor, w.mode
            );
        }
        if let Some(v) = &self.invalid_view {
            println!(
                "counterexample view on ring {}: {:?} (reverted {:?})",
                v.n, v.view, v.reverted
            );
        }
        if let Some(m) = &self.movers {
            println!(
                "configuration n={}; p={:?} lets robots {:?} move simultaneously",
                m.n, m.positions, m.movers
            );
        }
        if let Some(note) = &self.note {
            println!("note: {note}");
        }
        for (phase, ms) in &self.timings_ms {
            println!("time: {phase} {ms:.1} ms");
        }
    }

    fn emit(&self, json: bool) {
        if json {
            println!("{}", serde_json::to_string_pretty(self).expect("reports serialize"));
        } else {
            self.print_human();
        }
    }
}

struct Timings {
    started: Instant,
    phases: Vec<(String, f64)>,
}

impl Timings {
    fn new() -> Timings {
        Timings { started: Instant::now(), phases: Vec::new() }
    }

    fn mark(&mut self, phase: &str) {
        let elapsed = self.started.elapsed().as_secs_f64() * 1e3;
        self.phases.push((phase.to_string(), elapsed));
        self.started = Instant::now();
    }
}

/// Entry point for the binary: parses arguments from the environment,
/// runs the selected command and returns the process exit code.
pub fn run() -> i32 {
    let args = match CliArgs::try_parse() {
        Ok(args) => args,
        Err(err) => {
            // Keep clap's own exit code for --help/--version.
            let code = if err.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(args) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            EXIT_USAGE
        }
    }
}

fn dispatch(args: CliArgs) -> Result<i32, Error> {
    match args.command {
        CliCommand::Verify(args) => cmd_verify(args),
        CliCommand::Check(args) => cmd_check(args),
        CliCommand::Simulate(args) => cmd_simulate(args),
        CliCommand::Crosscheck(args) => cmd_crosscheck(args),
    }
}

/// Reads `--ring`/`--bad` style arguments: a path if one exists, an
/// inline formula otherwise.
fn read_formula_arg(arg: &str) -> Result<Formula, Error> {
    let path = std::path::Path::new(arg);
    let text = if path.is_file() {
        std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{arg}: {e}")))?
    } else {
        arg.to_string()
    };
    Ok(parse_formula(&text)?)
}

fn read_protocol_file(path: &PathBuf) -> Result<Formula, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
    Ok(parse_formula(&text)?)
}

/// The robot count is the largest `x<i>` index mentioned anywhere,
/// overridable upward with `--robots`.
fn infer_robots(formulas: &[&Formula], requested: Option<usize>) -> Result<usize, Error> {
    let mut inferred = 0;
    for formula in formulas {
        for name in formula.free_vars() {
            if let Some(index) = parse_distance_var(&name) {
                inferred = inferred.max(index);
            }
        }
    }
    let k = match requested {
        Some(requested) if requested < inferred => {
            return Err(Error::Invalid(format!(
                "--robots {requested} is smaller than the largest index used ({inferred})"
            )));
        }
        Some(requested) => requested,
        None => inferred,
    };
    if k < 2 {
        return Err(Error::Invalid(format!(
            "needs at least 2 robots; inferred {k} from the formulas \
             (pass --robots to set the count explicitly)"
        )));
    }
    Ok(k)
}

fn warn_if_invalid(phi: &ProtocolSpec) {
    match protocol_valid_bounded(phi, (phi.robot_count() as u64 + 6).min(8)) {
        Ok(ValidityVerdict::Valid) => {}
        Ok(ValidityVerdict::Counterexample(view)) => {
            eprintln!(
                "warning: the protocol orders contradictory moves on view {view}; \
                 run `check validity` for details"
            );
        }
        Err(err) => eprintln!("warning: protocol validity pre-check failed: {err}"),
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<i32, Error> {
    let mut timings = Timings::new();
    let protocol_body = read_protocol_file(&args.protocol)?;
    let ring = read_formula_arg(&args.ring)?;
    let bad = read_formula_arg(&args.bad)?;
    if let Some(goal) = &args.goal {
        // The formula itself must be well-formed, but there is no
        // procedure behind it.
        let goal = read_formula_arg(goal)?;
        let _ = infer_robots(&[&protocol_body, &goal], args.robots)?;
        return Err(Error::Invalid(
            "--goal describes a reachability objective, and deciding whether \
             some run misses it is undecidable in every scheduling mode; no \
             procedure is provided. Use --bad to check safety, or the \
             simulator (`simulate --reach`) to inspect small rings."
                .to_string(),
        ));
    }
    let k = infer_robots(&[&protocol_body, &bad], args.robots)?;
    let phi = ProtocolSpec::new(k, protocol_body)?;
    warn_if_invalid(&phi);
    timings.mark("parse");

    let config = args.solver.config()?;
    let mut note = None;

    // The asynchronous question is answered through the synchronous
    // relation, which is only sound once the protocol is certified
    // uniquely-sequentializable.
    if args.mode == Mode::Async {
        let certificate = encoding::uniqseq_query(&phi)?;
        let run = run_solver(&emit_smt(&certificate), &config)?;
        match run.outcome {
            SolverOutcome::Unsat => {
                note = Some(
                    "uniquely-sequentializable: the three modes have the same \
                     reachable configurations, checking the synchronous relation"
                        .to_string(),
                );
            }
            SolverOutcome::Sat(_) => {
                return Err(Error::Invalid(
                    "asynchronous safety needs a uniquely-sequentializable protocol \
                     (the problem is undecidable in general); this protocol lets two \
                     robots move from the same configuration, as `check uniqseq` \
                     shows. Use --mode sync or semisync, or the bounded simulator."
                        .to_string(),
                ));
            }
            SolverOutcome::Unknown(reason) => {
                let report = RunReport {
                    command: "verify".to_string(),
                    inputs: inputs_report(&args.protocol, Some(&args.ring), Some(&args.bad), k, Some(args.mode)),
                    verdict: Verdict::Unknown,
                    witness: None,
                    invalid_view: None,
                    movers: None,
                    note: Some(format!(
                        "solver could not certify unique-sequentializability ({reason}); \
                         try the bounded simulator (`simulate --reach`)"
                    )),
                    timings_ms: timings.phases,
                };
                report.emit(args.json);
                return Ok(EXIT_UNKNOWN);
            }
        }
    }

    let step_mode = match args.mode {
        Mode::Async => Mode::Sync,
        other => other,
    };
    let query = encoding::safety_query(&phi, &ring, &bad, step_mode)?;
    timings.mark("encode");
    let document = emit_smt(&query);
    let run = run_solver(&document, &config)?;
    if let Some(path) = &run.smt_file {
        eprintln!("kept SMT-LIB document at {}", path.display());
    }
    timings.mark("solve");

    let (verdict, witness) = match &run.outcome {
        SolverOutcome::Unsat => (Verdict::Safe, None),
        SolverOutcome::Sat(_) => {
            let witness = extract_witness(&run.outcome, &query)?
                .expect("sat outcomes decode to witnesses");
            timings.mark("validate");
            (Verdict::Violation, Some(WitnessReport::new(&witness, args.mode)))
        }
        SolverOutcome::Unknown(reason) => {
            note = Some(format!(
                "solver returned unknown ({reason}); the bounded simulator \
                 (`simulate --reach` or `crosscheck`) can still scan small rings"
            ));
            (Verdict::Unknown, None)
        }
    };

    let report = RunReport {
        command: "verify".to_string(),
        inputs: inputs_report(&args.protocol, Some(&args.ring), Some(&args.bad), k, Some(args.mode)),
        verdict,
        witness,
        invalid_view: None,
        movers: None,
        note,
        timings_ms: timings.phases,
    };
    report.emit(args.json);
    Ok(verdict.exit_code())
}

fn inputs_report(
    protocol: &std::path::Path,
    ring: Option<&str>,
    bad: Option<&str>,
    robots: usize,
    mode: Option<Mode>,
) -> InputsReport {
    InputsReport {
        protocol: protocol.display().to_string(),
        ring: ring.map(str::to_string),
        bad: bad.map(str::to_string),
        robots,
        mode: mode.map(|m| m.to_string()),
    }
}

fn cmd_check(args: CheckArgs) -> Result<i32, Error> {
    let mut timings = Timings::new();
    let protocol_body = read_protocol_file(&args.protocol)?;
    let k = infer_robots(&[&protocol_body], args.robots)?;
    let phi = ProtocolSpec::new(k, protocol_body)?;
    timings.mark("parse");

    let query = match args.which {
        CheckKind::Validity => encoding::validity_query(&phi)?,
        CheckKind::Uniqseq => encoding::uniqseq_query(&phi)?,
    };
    timings.mark("encode");
    let config = args.solver.config()?;
    let run = run_solver(&emit_smt(&query), &config)?;
    if let Some(path) = &run.smt_file {
        eprintln!("kept SMT-LIB document at {}", path.display());
    }
    timings.mark("solve");

    let mut report = RunReport {
        command: format!(
            "check {}",
            match args.which {
                CheckKind::Validity => "validity",
                CheckKind::Uniqseq => "uniqseq",
            }
        ),
        inputs: inputs_report(&args.protocol, None, None, k, None),
        verdict: Verdict::Unknown,
        witness: None,
        invalid_view: None,
        movers: None,
        note: None,
        timings_ms: Vec::new(),
    };

    let verdict = match (&run.outcome, args.which) {
        (SolverOutcome::Unsat, CheckKind::Validity) => Verdict::Valid,
        (SolverOutcome::Unsat, CheckKind::Uniqseq) => Verdict::Uniqseq,
        (SolverOutcome::Unknown(reason), _) => {
            report.note = Some(format!(
                "solver returned unknown ({reason}); bounded enumeration \
                 (`crosscheck`) can still scan small rings"
            ));
            Verdict::Unknown
        }
        (SolverOutcome::Sat(model), CheckKind::Validity) => {
            report.invalid_view = Some(decode_invalid_view(&phi, &query, model)?);
            Verdict::Invalid
        }
        (SolverOutcome::Sat(model), CheckKind::Uniqseq) => {
            report.movers = Some(decode_movers(&phi, &query, model)?);
            Verdict::NotUniqseq
        }
    };
    timings.mark("validate");
    report.verdict = verdict;
    report.timings_ms = timings.phases;
    report.emit(args.json);
    Ok(verdict.exit_code())
}

/// Decodes and re-validates a view refuting protocol validity: the
/// view and its reversal must both satisfy the protocol while being
/// distinct.
fn decode_invalid_view(
    phi: &ProtocolSpec,
    query: &crate::solver::VerificationQuery,
    model: &std::collections::BTreeMap<String, i64>,
) -> Result<ViewReport, Error> {
    let k = phi.robot_count();
    let mut n = 0;
    let mut distances = vec![0u64; k];
    for (name, role) in query.free_var_roles() {
        let value = *model
            .get(name)
            .ok_or_else(|| Error::Invalid(format!("model misses `{name}`")))?;
        let value = u64::try_from(value)
            .map_err(|_| Error::Invalid(format!("model assigns negative `{name}`")))?;
        match role {
            VarRole::RingSize => n = value,
            VarRole::ViewDistance(i) => distances[*i] = value,
            _ => {}
        }
    }
    let view = View::new(distances).map_err(|e| Error::Invalid(format!("decoded view: {e}")))?;
    let reverted = view.reverted();
    if view.ring_size() != n
        || view == reverted
        || !phi.admits(&view)?
        || !phi.admits(&reverted)?
    {
        return Err(Error::Invalid(format!(
            "decoded view {view} does not refute validity; this signals an encoding bug"
        )));
    }
    Ok(ViewReport {
        n,
        view: view.distances().to_vec(),
        reverted: reverted.distances().to_vec(),
    })
}

/// Decodes and re-validates a configuration refuting
/// unique-sequentializability: at least two robots must have strict
/// moves there.
fn decode_movers(
    phi: &ProtocolSpec,
    query: &crate::solver::VerificationQuery,
    model: &std::collections::BTreeMap<String, i64>,
) -> Result<MoversReport, Error> {
    let k = phi.robot_count();
    let mut n = 0;
    let mut positions = vec![0u64; k];
    for (name, role) in query.free_var_roles() {
        let value = *model
            .get(name)
            .ok_or_else(|| Error::Invalid(format!("model misses `{name}`")))?;
        let value = u64::try_from(value)
            .map_err(|_| Error::Invalid(format!("model assigns negative `{name}`")))?;
        match role {
            VarRole::RingSize => n = value,
            VarRole::Position(i) => positions[*i] = value,
            _ => {}
        }
    }
    let config = Configuration::on_ring(n, &positions)
        .map_err(|e| Error::Invalid(format!("decoded configuration: {e}")))?;
    let mut movers = Vec::new();
    for robot in 0..k {
        if !move_set(phi, &view_clockwise(&config, robot))?.is_stay() {
            movers.push(robot);
        }
    }
    if movers.len() < 2 {
        return Err(Error::Invalid(format!(
            "decoded configuration {config} has {} mover(s); this signals an encoding bug",
            movers.len()
        )));
    }
    Ok(MoversReport { n, positions, movers })
}

fn parse_positions(text: &str) -> Result<Vec<u64>, Error> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<u64>()
                .map_err(|_| Error::Invalid(format!("bad position `{part}`")))
        })
        .collect()
}

fn cmd_simulate(args: SimulateArgs) -> Result<i32, Error> {
    let protocol_body = read_protocol_file(&args.protocol)?;
    let positions = parse_positions(&args.positions)?;
    let inferred = infer_robots(&[&protocol_body], args.robots.or(Some(positions.len())))?;
    if positions.len() != inferred {
        return Err(Error::Invalid(format!(
            "{} positions given for {} robots",
            positions.len(),
            inferred
        )));
    }
    let phi = ProtocolSpec::new(inferred, protocol_body)?;
    let config = Configuration::on_ring(args.n, &positions)?;

    if args.reach {
        let reachable = post_star(&phi, &config, args.mode, args.max_states)?;
        for c in reachable {
            println!("{c}");
        }
        return Ok(EXIT_HOLDS);
    }

    match args.mode {
        Mode::Sync | Mode::SemiSync => {
            let mut current = config;
            println!("step=0 mode={} p={}", args.mode, positions_csv(&current));
            for step in 1..=args.steps {
                let successors = match args.mode {
                    Mode::Sync => post_sync(&phi, &current)?,
                    Mode::SemiSync => post_semisync(&phi, &current)?,
                    Mode::Async => unreachable!(),
                };
                let next = successors
                    .into_iter()
                    .next()
                    .expect("step relations are total");
                current = next;
                println!("step={step} mode={} p={}", args.mode, positions_csv(&current));
            }
        }
        Mode::Async => {
            let mut current = AsyncState::initial(config);
            println!(
                "step=0 mode=async p={} phases={}",
                positions_csv(current.config()),
                current.phase_string()
            );
            for step in 1..=args.steps {
                let next = post_async(&phi, &current)?
                    .into_iter()
                    .next()
                    .expect("some robot can always be scheduled");
                current = next;
                println!(
                    "step={step} mode=async p={} phases={}",
                    positions_csv(current.config()),
                    current.phase_string()
                );
            }
        }
    }
    Ok(EXIT_HOLDS)
}

fn positions_csv(config: &Configuration) -> String {
    config
        .positions()
        .iter()
        .map(|p| p.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// One disagreement between a step formula and the simulator.
#[derive(Debug, Clone, Serialize)]
pub struct Discrepancy {
    pub n: u64,
    pub detail: String,
}

/// Outcome of an encoding-versus-oracle sweep.
#[derive(Debug, Clone, Serialize)]
pub struct CrosscheckReport {
    pub pairs_checked: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discrepancy: Option<Discrepancy>,
}

impl CrosscheckReport {
    pub fn agrees(&self) -> bool {
        self.discrepancy.is_none()
    }
}

/// Compares [`encoding::post_formula`] for `mode` against the
/// simulator on every configuration pair of every ring size in the
/// range. See [`crosscheck_step_formula`] for the exact comparison.
pub fn crosscheck_step_relation(
    phi: &ProtocolSpec,
    mode: Mode,
    ring_sizes: RangeInclusive<u64>,
    max_pairs: u64,
) -> Result<CrosscheckReport, Error> {
    let formula = encoding::post_formula(phi, mode)?;
    crosscheck_step_formula(phi, &formula, mode, ring_sizes, max_pairs)
}

/// Compares an arbitrary step formula against the simulator relation
/// for `mode`. The formula is expected over the standard variables
/// `y, p1..pk, pp1..ppk`.
///
/// One systematic difference is accounted for: the semi-synchronous
/// relation contains the all-idle step for every configuration (the
/// scheduled subset may be empty), while the formula requires at
/// least one robot to complete a cycle, so the identity pair is only
/// a formula model when some robot's decision is to stay. Safety
/// verdicts are unaffected because an identity step cannot enter the
/// bad set from outside it.
pub fn crosscheck_step_formula(
    phi: &ProtocolSpec,
    formula: &Formula,
    mode: Mode,
    ring_sizes: RangeInclusive<u64>,
    max_pairs: u64,
) -> Result<CrosscheckReport, Error> {
    let k = phi.robot_count();
    let names = VarNames::new(k);
    let mut pairs_checked = 0u64;
    for n in ring_sizes {
        if n < k as u64 {
            continue;
        }
        let mut evaluator = Evaluator::new(formula, n);
        let configs = enumerate_configurations(k, n);
        for start in &configs {
            let oracle = match mode {
                Mode::Sync => post_sync(phi, start)?,
                Mode::SemiSync => post_semisync(phi, start)?,
                Mode::Async => {
                    return Err(Error::Invalid(
                        "step-relation crosscheck covers sync and semisync; \
                         use the async crosscheck"
                            .to_string(),
                    ));
                }
            };
            let someone_stays = match mode {
                Mode::SemiSync => {
                    let mut stays = false;
                    for robot in 0..k {
                        if move_set(phi, &view_clockwise(start, robot))?.is_stay() {
                            stays = true;
                            break;
                        }
                    }
                    stays
                }
                _ => false,
            };
            let mut valuation = Valuation::from([(names.ring(), n)]);
            for (i, &p) in start.positions().iter().enumerate() {
                valuation.insert(names.position(i), p);
            }
            for successor in &configs {
                pairs_checked += 1;
                if pairs_checked > max_pairs {
                    return Err(Error::Explore(
                        crate::semantics::ExploreError::BudgetExceeded {
                            visited: pairs_checked as usize,
                            budget: max_pairs as usize,
                        },
                    ));
                }
                for (i, &p) in successor.positions().iter().enumerate() {
                    valuation.insert(names.position_primed(i), p);
                }
                let formula_truth = evaluator.eval(&valuation)?;
                let expected = if mode == Mode::SemiSync && successor == start {
                    someone_stays
                } else {
                    oracle.contains(successor)
                };
                if formula_truth != expected {
                    return Ok(CrosscheckReport {
                        pairs_checked,
                        discrepancy: Some(Discrepancy {
                            n,
                            detail: format!(
                                "{start} -> {successor}: formula says {formula_truth}, \
                                 simulator says {expected}"
                            ),
                        }),
                    });
                }
            }
        }
    }
    Ok(CrosscheckReport { pairs_checked, discrepancy: None })
}

/// Compares [`encoding::async_post_formula`] against the asynchronous
/// simulator on every pair of canonicalized states of every ring size
/// in the range.
pub fn crosscheck_async_relation(
    phi: &ProtocolSpec,
    ring_sizes: RangeInclusive<u64>,
    max_pairs: u64,
) -> Result<CrosscheckReport, Error> {
    let k = phi.robot_count();
    let names = VarNames::new(k);
    let formula = encoding::async_post_formula(phi)?;
    let mut pairs_checked = 0u64;
    for n in ring_sizes {
        if n < k as u64 {
            continue;
        }
        let mut evaluator = Evaluator::new(&formula, n);
        let states = enumerate_async_states(k, n);
        for from in &states {
            let oracle = post_async(phi, from)?;
            let mut valuation = Valuation::from([(names.ring(), n)]);
            fill_async_valuation(&mut valuation, &names, from, false);
            for to in &states {
                pairs_checked += 1;
                if pairs_checked > max_pairs {
                    return Err(Error::Explore(
                        crate::semantics::ExploreError::BudgetExceeded {
                            visited: pairs_checked as usize,
                            budget: max_pairs as usize,
                        },
                    ));
                }
                fill_async_valuation(&mut valuation, &names, to, true);
                let formula_truth = evaluator.eval(&valuation)?;
                let oracle_truth = oracle.contains(to);
                if formula_truth != oracle_truth {
                    return Ok(CrosscheckReport {
                        pairs_checked,
                        discrepancy: Some(Discrepancy {
                            n,
                            detail: format!(
                                "{} {} -> {} {}: formula says {formula_truth}, \
                                 simulator says {oracle_truth}",
                                from.config(),
                                from.phase_string(),
                                to.config(),
                                to.phase_string()
                            ),
                        }),
                    });
                }
            }
        }
    }
    Ok(CrosscheckReport { pairs_checked, discrepancy: None })
}

fn fill_async_valuation(
    valuation: &mut Valuation,
    names: &VarNames,
    state: &AsyncState,
    primed: bool,
) {
    let k = state.config().robot_count();
    for i in 0..k {
        let pos_name = if primed { names.position_primed(i) } else { names.position(i) };
        valuation.insert(pos_name, state.config().position(i));
        let phase_name = if primed { names.phase_primed(i) } else { names.phase(i) };
        let phase_value = match state.phases()[i] {
            crate::semantics::Phase::Look => 0,
            crate::semantics::Phase::Move => 1,
        };
        valuation.insert(phase_name, phase_value);
        for (l, &d) in state.stored_views()[i].distances().iter().enumerate() {
            let slot_name = if primed { names.stored_primed(i, l) } else { names.stored(i, l) };
            valuation.insert(slot_name, d);
        }
    }
}

fn cmd_crosscheck(args: CrosscheckArgs) -> Result<i32, Error> {
    let protocol_body = read_protocol_file(&args.protocol)?;
    let k = infer_robots(&[&protocol_body], args.robots)?;
    let phi = ProtocolSpec::new(k, protocol_body)?;
    let n_min = args.n_min.unwrap_or(k as u64);
    if n_min > args.n_max {
        return Err(Error::Invalid(format!(
            "empty ring-size range [{n_min}, {}]",
            args.n_max
        )));
    }

    let report = match args.mode {
        Mode::Sync | Mode::SemiSync => {
            crosscheck_step_relation(&phi, args.mode, n_min..=args.n_max, args.max_states as u64)?
        }
        Mode::Async => {
            crosscheck_async_relation(&phi, n_min..=args.n_max, args.max_states as u64)?
        }
    };

    if args.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("reports serialize"));
    } else if let Some(d) = &report.discrepancy {
        println!(
            "DISCREPANCY after {} pairs at n={}: {}",
            report.pairs_checked, d.n, d.detail
        );
    } else {
        println!(
            "agreement: formula matches the simulator on all {} pairs",
            report.pairs_checked
        );
    }
    Ok(if report.agrees() { EXIT_HOLDS } else { EXIT_REFUTED })
}
