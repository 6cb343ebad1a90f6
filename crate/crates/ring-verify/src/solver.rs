//! SMT-LIB serialization, external solver processes, and witness
//! decoding.
//!
//! Any SMT-LIB 2 solver that handles integer arithmetic with
//! quantifiers works; the command template just needs a `{file}`
//! placeholder. Decoded models are never trusted: a safety witness is
//! re-validated against the concrete semantics before it is reported,
//! so an encoding or parsing bug surfaces as a hard failure instead
//! of a bogus counterexample.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::presburger::{to_smtlib, Formula};
use crate::ringmodel::{Configuration, ModelError, ProtocolSpec, RingInstance};
use crate::semantics::{config_in_bad, post_semisync, post_sync, ring_admits, Mode};

pub use crate::semantics::Witness;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("no solver configured: set --solver-cmd, the RING_VERIFY_SOLVER \
             environment variable, or install z3 on PATH")]
    NoSolver,
    #[error("solver command template must contain `{{file}}`, got `{0}`")]
    BadTemplate(String),
    #[error("failed to launch solver `{command}`: {source}")]
    Launch {
        command: String,
        #[source]
        source: std::io::Error,
    },
    #[error("could not find a verdict in solver output: {snippet}")]
    UnparseableOutput { snippet: String },
    #[error("malformed model in solver output: {0}")]
    MalformedModel(String),
    #[error("model violates query invariants ({0}); this signals an encoding bug")]
    InvalidModel(String),
    #[error("query has purpose {0:?}, witness extraction needs a safety query")]
    WrongPurpose(QueryPurpose),
    #[error("temporary file error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// What a query is asking.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryPurpose {
    Safety,
    Validity,
    UniqSeq,
}

/// Role of a free variable in a query, used to declare it, constrain
/// it and decode models back into domain objects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarRole {
    RingSize,
    Position(usize),
    PrimedPosition(usize),
    ViewDistance(usize),
    RevertedViewDistance(usize),
    Phase(usize),
    StoredView(usize, usize),
}

/// Everything needed to re-validate a safety model against the
/// concrete semantics.
#[derive(Debug, Clone)]
pub struct SafetyContext {
    pub protocol: ProtocolSpec,
    pub ring: Formula,
    pub bad: Formula,
    pub step_mode: Mode,
}

/// A prepared satisfiability question together with the mapping from
/// its free variables back to domain objects.
#[derive(Debug, Clone)]
pub struct VerificationQuery {
    purpose: QueryPurpose,
    robot_count: usize,
    body: Formula,
    free_var_roles: Vec<(String, VarRole)>,
    safety_context: Option<SafetyContext>,
}

impl VerificationQuery {
    pub fn new(
        purpose: QueryPurpose,
        robot_count: usize,
        body: Formula,
        free_var_roles: Vec<(String, VarRole)>,
        safety_context: Option<SafetyContext>,
    ) -> Result<VerificationQuery, String> {
        let declared: std::collections::BTreeSet<String> =
            free_var_roles.iter().map(|(n, _)| n.clone()).collect();
        if declared.len() != free_var_roles.len() {
            return Err("duplicate variable in role map".to_string());
        }
        let free = body.free_vars();
        if free != declared {
            return Err(format!(
                "free variables {{{}}} do not match declared roles {{{}}}",
                free.into_iter().collect::<Vec<_>>().join(", "),
                declared.into_iter().collect::<Vec<_>>().join(", ")
            ));
        }
        let ring_vars = free_var_roles
            .iter()
            .filter(|(_, r)| matches!(r, VarRole::RingSize))
            .count();
        if ring_vars != 1 {
            return Err(format!("expected exactly one ring-size variable, found {ring_vars}"));
        }
        Ok(VerificationQuery {
            purpose,
            robot_count,
            body,
            free_var_roles,
            safety_context,
        })
    }

    pub fn purpose(&self) -> QueryPurpose {
        self.purpose
    }

    pub fn robot_count(&self) -> usize {
        self.robot_count
    }

    pub fn body(&self) -> &Formula {
        &self.body
    }

    pub fn free_var_roles(&self) -> &[(String, VarRole)] {
        &self.free_var_roles
    }

    pub fn safety_context(&self) -> Option<&SafetyContext> {
        self.safety_context.as_ref()
    }

    fn lookup(&self, model: &BTreeMap<String, i64>, role: VarRole) -> Result<i64, SolverError> {
        let name = self
            .free_var_roles
            .iter()
            .find(|(_, r)| *r == role)
            .map(|(n, _)| n)
            .ok_or_else(|| SolverError::MalformedModel(format!("no variable with role {role:?}")))?;
        model
            .get(name)
            .copied()
            .ok_or_else(|| SolverError::MalformedModel(format!("model misses `{name}`")))
    }
}

/// Verdict of one solver run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverOutcome {
    Sat(BTreeMap<String, i64>),
    Unsat,
    Unknown(String),
}

impl fmt::Display for SolverOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverOutcome::Sat(_) => write!(f, "sat"),
            SolverOutcome::Unsat => write!(f, "unsat"),
            SolverOutcome::Unknown(reason) => write!(f, "unknown ({reason})"),
        }
    }
}

/// Serializes a query as a self-contained SMT-LIB 2 document:
/// declarations in role order, one nonnegativity assertion per
/// variable, the asserted body, `check-sat` and a `get-value` over
/// every free variable. Identical queries produce identical bytes.
pub fn emit_smt(query: &VerificationQuery) -> String {
    let mut doc = String::new();
    let purpose = match query.purpose {
        QueryPurpose::Safety => "safety",
        QueryPurpose::Validity => "protocol-validity",
        QueryPurpose::UniqSeq => "unique-sequentializability",
    };
    doc.push_str(&format!("; {purpose} query, {} robots\n", query.robot_count));
    doc.push_str("(set-logic ALL)\n");
    for (name, _) in &query.free_var_roles {
        doc.push_str(&format!("(declare-const {name} Int)\n"));
    }
    for (name, _) in &query.free_var_roles {
        doc.push_str(&format!("(assert (>= {name} 0))\n"));
    }
    doc.push_str(&format!(
        "(assert {})\n",
        to_smtlib(&query.body, &Default::default())
    ));
    doc.push_str("(check-sat)\n");
    let names: Vec<&str> = query.free_var_roles.iter().map(|(n, _)| n.as_str()).collect();
    doc.push_str(&format!("(get-value ({}))\n", names.join(" ")));
    doc
}

/// How to reach the external solver.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Command template with a `{file}` placeholder.
    pub command_template: String,
    pub timeout: Duration,
    /// Keep the emitted document instead of deleting it.
    pub keep_smt: bool,
}

impl SolverConfig {
    pub fn new(command_template: impl Into<String>) -> SolverConfig {
        SolverConfig {
            command_template: command_template.into(),
            timeout: Duration::from_secs(60),
            keep_smt: false,
        }
    }

    /// Resolves the template from the environment when none is given:
    /// `RING_VERIFY_SOLVER` first, then `z3` if it is on PATH, then a
    /// `tools/smt-shim` checkout next to the binary or the working
    /// directory.
    pub fn from_environment() -> Result<SolverConfig, SolverError> {
        default_solver_command()
            .map(SolverConfig::new)
            .ok_or(SolverError::NoSolver)
    }
}

/// See [`SolverConfig::from_environment`] for the search order.
pub fn default_solver_command() -> Option<String> {
    if let Ok(template) = std::env::var("RING_VERIFY_SOLVER") {
        if !template.trim().is_empty() {
            return Some(template);
        }
    }
    if Command::new("z3")
        .arg("-version")
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .status()
        .is_ok()
    {
        return Some("z3 {file}".to_string());
    }
    for base in shim_candidates() {
        if base.join("node_modules").join("z3-solver").is_dir() {
            let script = base.join("smt-shim.mjs");
            if script.is_file() {
                return Some(format!("node {} {{file}}", script.display()));
            }
        }
    }
    None
}

fn shim_candidates() -> Vec<PathBuf> {
    let mut out = Vec::new();
    if let Ok(exe) = std::env::current_exe() {
        // target/<profile>/ring-verify -> repo root.
        for up in [2, 3] {
            let mut path = exe.clone();
            for _ in 0..up {
                path = match path.parent() {
                    Some(p) => p.to_path_buf(),
                    None => return out,
                };
            }
            out.push(path.join("tools").join("smt-shim"));
        }
    }
    if let Ok(cwd) = std::env::current_dir() {
        out.push(cwd.join("tools").join("smt-shim"));
        out.push(cwd.join("..").join("tools").join("smt-shim"));
    }
    out
}

/// Result of driving the solver once.
#[derive(Debug)]
pub struct SolverRun {
    pub outcome: SolverOutcome,
    /// Path of the document when `keep_smt` was set.
    pub smt_file: Option<PathBuf>,
    pub elapsed: Duration,
}

/// Writes the document to a temporary file, runs the configured
/// command on it, and parses the verdict plus any `get-value`
/// bindings. A timeout yields `Unknown("timeout")`.
pub fn run_solver(document: &str, config: &SolverConfig) -> Result<SolverRun, SolverError> {
    if !config.command_template.contains("{file}") {
        return Err(SolverError::BadTemplate(config.command_template.clone()));
    }

    let mut smt_file = tempfile::Builder::new()
        .prefix("ring-verify-")
        .suffix(".smt2")
        .tempfile()?;
    smt_file.write_all(document.as_bytes())?;
    smt_file.flush()?;
    let smt_path = smt_file.path().to_path_buf();

    let argv: Vec<String> = config
        .command_template
        .split_whitespace()
        .map(|part| part.replace("{file}", &smt_path.to_string_lossy()))
        .collect();
    if argv.is_empty() {
        return Err(SolverError::BadTemplate(config.command_template.clone()));
    }

    let stdout_file = tempfile::tempfile()?;
    let stderr_file = tempfile::tempfile()?;
    let started = Instant::now();
    let mut child = Command::new(&argv[0])
        .args(&argv[1..])
        .stdin(Stdio::null())
        .stdout(Stdio::from(stdout_file.try_clone()?))
        .stderr(Stdio::from(stderr_file.try_clone()?))
        .spawn()
        .map_err(|source| SolverError::Launch {
            command: argv[0].clone(),
            source,
        })?;

    let deadline = started + config.timeout;
    let timed_out = loop {
        match child.try_wait()? {
            Some(_) => break false,
            None => {
                if Instant::now() >= deadline {
                    let _ = child.kill();
                    let _ = child.wait();
                    break true;
                }
                std::thread::sleep(Duration::from_millis(10));
            }
        }
    };
    let elapsed = started.elapsed();

    let kept = if config.keep_smt {
        let (_, path) = smt_file.keep().map_err(|e| SolverError::Io(e.error))?;
        Some(path)
    } else {
        None
    };

    if timed_out {
        return Ok(SolverRun {
            outcome: SolverOutcome::Unknown("timeout".to_string()),
            smt_file: kept,
            elapsed,
        });
    }

    use std::io::{Read, Seek};
    let mut stdout = String::new();
    let mut handle = stdout_file;
    handle.rewind()?;
    handle.read_to_string(&mut stdout)?;

    let outcome = parse_solver_output(&stdout).map_err(|err| {
        let mut stderr = String::new();
        let mut handle = stderr_file;
        if handle.rewind().is_ok() {
            let _ = handle.read_to_string(&mut stderr);
        }
        match err {
            SolverError::UnparseableOutput { snippet } => SolverError::UnparseableOutput {
                snippet: format!("{snippet}{}", summarize(&stderr)),
            },
            other => other,
        }
    })?;

    Ok(SolverRun { outcome, smt_file: kept, elapsed })
}

fn summarize(stderr: &str) -> String {
    let trimmed = stderr.trim();
    if trimmed.is_empty() {
        String::new()
    } else {
        let short: String = trimmed.chars().take(300).collect();
        format!(" (stderr: {short})")
    }
}

fn parse_solver_output(stdout: &str) -> Result<SolverOutcome, SolverError> {
    let mut lines = stdout.lines();
    let verdict = loop {
        match lines.next() {
            Some(line) => match line.trim() {
                "sat" => break "sat",
                "unsat" => return Ok(SolverOutcome::Unsat),
                "unknown" => return Ok(SolverOutcome::Unknown("solver returned unknown".into())),
                _ => continue,
            },
            None => {
                let snippet: String = stdout.chars().take(300).collect();
                return Err(SolverError::UnparseableOutput {
                    snippet: if snippet.is_empty() { "<empty>".to_string() } else { snippet },
                });
            }
        }
    };
    debug_assert_eq!(verdict, "sat");
    let rest: String = lines.collect::<Vec<_>>().join("\n");
    let model = parse_value_bindings(&rest)?;
    Ok(SolverOutcome::Sat(model))
}

/// Parses `((x 1) (y (- 2)) ...)` into a name-to-value map.
fn parse_value_bindings(text: &str) -> Result<BTreeMap<String, i64>, SolverError> {
    let sexp = parse_sexp(text)?;
    let mut model = BTreeMap::new();
    let pairs = match sexp {
        Sexp::List(items) => items,
        Sexp::Atom(a) => {
            return Err(SolverError::MalformedModel(format!(
                "expected a binding list, found `{a}`"
            )));
        }
    };
    for pair in pairs {
        match pair {
            Sexp::List(mut entry) if entry.len() == 2 => {
                let value = sexp_int(&entry.pop().unwrap())?;
                match entry.pop().unwrap() {
                    Sexp::Atom(name) => {
                        model.insert(name, value);
                    }
                    other => {
                        return Err(SolverError::MalformedModel(format!(
                            "expected a variable name, found `{other:?}`"
                        )));
                    }
                }
            }
            other => {
                return Err(SolverError::MalformedModel(format!(
                    "expected a (name value) pair, found `{other:?}`"
                )));
            }
        }
    }
    Ok(model)
}

#[derive(Debug, Clone)]
enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

fn sexp_int(sexp: &Sexp) -> Result<i64, SolverError> {
    match sexp {
        Sexp::Atom(a) => a
            .parse::<i64>()
            .map_err(|_| SolverError::MalformedModel(format!("expected an integer, found `{a}`"))),
        Sexp::List(items) => match items.as_slice() {
            [Sexp::Atom(minus), inner] if minus == "-" => Ok(-sexp_int(inner)?),
            _ => Err(SolverError::MalformedModel(format!(
                "expected an integer, found `{sexp:?}`"
            ))),
        },
    }
}

fn parse_sexp(text: &str) -> Result<Sexp, SolverError> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for c in text.chars() {
        match c {
            '(' | ')' => {
                if !current.is_empty() {
                    tokens.push(std::mem::take(&mut current));
                }
                tokens.push(c.to_string());
            }
            c if c.is_whitespace() => {
                if !current.is_empty() {
                    tokens.push(std::mem::take(&mut current));
                }
            }
            c => current.push(c),
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    let mut pos = 0;
    let sexp = parse_sexp_at(&tokens, &mut pos)?;
    Ok(sexp)
}

fn parse_sexp_at(tokens: &[String], pos: &mut usize) -> Result<Sexp, SolverError> {
    match tokens.get(*pos) {
        None => Err(SolverError::MalformedModel("unexpected end of model".to_string())),
        Some(tok) if tok == "(" => {
            *pos += 1;
            let mut items = Vec::new();
            loop {
                match tokens.get(*pos) {
                    None => {
                        return Err(SolverError::MalformedModel(
                            "unbalanced parentheses in model".to_string(),
                        ));
                    }
                    Some(tok) if tok == ")" => {
                        *pos += 1;
                        return Ok(Sexp::List(items));
                    }
                    Some(_) => items.push(parse_sexp_at(tokens, pos)?),
                }
            }
        }
        Some(tok) if tok == ")" => {
            Err(SolverError::MalformedModel("unbalanced parentheses in model".to_string()))
        }
        Some(atom) => {
            *pos += 1;
            Ok(Sexp::Atom(atom.clone()))
        }
    }
}

fn model_nat(value: i64, what: &str) -> Result<u64, SolverError> {
    u64::try_from(value)
        .map_err(|_| SolverError::InvalidModel(format!("{what} is negative ({value})")))
}

/// Decodes a satisfiable safety query into a witness and re-validates
/// every piece of it: the ring property holds at the decoded size,
/// the start lies outside the bad set, the successor inside it, and
/// the step is one the concrete semantics actually takes.
pub fn extract_witness(
    outcome: &SolverOutcome,
    query: &VerificationQuery,
) -> Result<Option<Witness>, SolverError> {
    if query.purpose != QueryPurpose::Safety {
        return Err(SolverError::WrongPurpose(query.purpose));
    }
    let model = match outcome {
        SolverOutcome::Sat(model) => model,
        SolverOutcome::Unsat | SolverOutcome::Unknown(_) => return Ok(None),
    };
    let context = query
        .safety_context
        .as_ref()
        .expect("safety queries carry their context");

    let k = query.robot_count;
    let n = model_nat(query.lookup(model, VarRole::RingSize)?, "ring size")?;
    if n < k as u64 {
        return Err(SolverError::InvalidModel(format!(
            "ring size {n} is smaller than the robot count {k}"
        )));
    }
    let ring = RingInstance::new(k, n)?;
    let mut start = Vec::with_capacity(k);
    let mut successor = Vec::with_capacity(k);
    for i in 0..k {
        let p = model_nat(query.lookup(model, VarRole::Position(i))?, "position")?;
        if p >= n {
            return Err(SolverError::InvalidModel(format!(
                "position {p} of robot {i} is outside the ring of size {n}"
            )));
        }
        start.push(p);
        let p = model_nat(query.lookup(model, VarRole::PrimedPosition(i))?, "position")?;
        if p >= n {
            return Err(SolverError::InvalidModel(format!(
                "successor position {p} of robot {i} is outside the ring of size {n}"
            )));
        }
        successor.push(p);
    }
    let start = Configuration::new(ring, start)?;
    let successor = Configuration::new(ring, successor)?;

    if !ring_admits(&context.ring, n).map_err(|e| SolverError::InvalidModel(e.to_string()))? {
        return Err(SolverError::InvalidModel(format!(
            "ring property rejects the decoded size {n}"
        )));
    }
    if config_in_bad(&context.bad, &start).map_err(|e| SolverError::InvalidModel(e.to_string()))? {
        return Err(SolverError::InvalidModel(format!(
            "start {start} already lies in the bad set"
        )));
    }
    if !config_in_bad(&context.bad, &successor)
        .map_err(|e| SolverError::InvalidModel(e.to_string()))?
    {
        return Err(SolverError::InvalidModel(format!(
            "successor {successor} does not lie in the bad set"
        )));
    }
    let successors = match context.step_mode {
        Mode::Sync => post_sync(&context.protocol, &start)?,
        Mode::SemiSync => post_semisync(&context.protocol, &start)?,
        Mode::Async => {
            return Err(SolverError::InvalidModel(
                "safety contexts never carry the asynchronous mode".to_string(),
            ));
        }
    };
    if !successors.contains(&successor) {
        return Err(SolverError::InvalidModel(format!(
            "the semantics does not step from {start} to {successor}"
        )));
    }

    Ok(Some(Witness { n, start, successor }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::safety_query;
    use crate::presburger::parse_formula;

    fn sh_script(body: &str) -> (tempfile::TempDir, String) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fake-solver.sh");
        std::fs::write(&path, format!("#!/bin/sh\n{body}\n")).unwrap();
        let template = format!("sh {} {{file}}", path.display());
        (dir, template)
    }

    fn gap_one_query() -> VerificationQuery {
        let phi = ProtocolSpec::parse(2, "x1 = 1").unwrap();
        let ring = parse_formula("y > 2").unwrap();
        let bad = parse_formula("x1 = x2").unwrap();
        safety_query(&phi, &ring, &bad, Mode::SemiSync).unwrap()
    }

    #[test]
    fn emit_is_deterministic() {
        let q = gap_one_query();
        assert_eq!(emit_smt(&q), emit_smt(&q));
        assert!(emit_smt(&q).contains("(check-sat)"));
        assert!(emit_smt(&q).contains("(get-value (y p1 p2 pp1 pp2))"));
    }

    #[test]
    fn fake_solver_unsat() {
        let (_dir, template) = sh_script("echo unsat");
        let run = run_solver("(assert false)(check-sat)", &SolverConfig::new(template)).unwrap();
        assert_eq!(run.outcome, SolverOutcome::Unsat);
    }

    #[test]
    fn fake_solver_sat_with_bindings() {
        let (_dir, template) = sh_script("echo sat; echo '((x 6)'; echo ' (w (- 17)))'");
        let run = run_solver("irrelevant", &SolverConfig::new(template)).unwrap();
        match run.outcome {
            SolverOutcome::Sat(model) => {
                assert_eq!(model.get("x"), Some(&6));
                assert_eq!(model.get("w"), Some(&-17));
            }
            other => panic!("expected sat, got {other:?}"),
        }
    }

    #[test]
    fn fake_solver_unknown_and_garbage() {
        let (_dir, template) = sh_script("echo unknown");
        let run = run_solver("x", &SolverConfig::new(template)).unwrap();
        assert!(matches!(run.outcome, SolverOutcome::Unknown(_)));

        let (_dir, template) = sh_script("echo blippy");
        let err = run_solver("x", &SolverConfig::new(template)).unwrap_err();
        assert!(matches!(err, SolverError::UnparseableOutput { .. }));
    }

    #[test]
    fn timeout_is_unknown() {
        let (_dir, template) = sh_script("sleep 5; echo unsat");
        let mut config = SolverConfig::new(template);
        config.timeout = Duration::from_millis(100);
        let run = run_solver("x", &config).unwrap();
        assert_eq!(run.outcome, SolverOutcome::Unknown("timeout".to_string()));
    }

    #[test]
    fn missing_solver_is_reported() {
        let config = SolverConfig::new("definitely-not-a-solver-9f2 {file}");
        let err = run_solver("x", &config).unwrap_err();
        assert!(matches!(err, SolverError::Launch { .. }));
    }

    #[test]
    fn template_needs_placeholder() {
        let err = run_solver("x", &SolverConfig::new("z3")).unwrap_err();
        assert!(matches!(err, SolverError::BadTemplate(_)));
    }

    #[test]
    fn witness_roundtrip_from_handmade_model() {
        let q = gap_one_query();
        let model = BTreeMap::from([
            ("y".to_string(), 4),
            ("p1".to_string(), 0),
            ("p2".to_string(), 1),
            ("pp1".to_string(), 1),
            ("pp2".to_string(), 1),
        ]);
        let witness = extract_witness(&SolverOutcome::Sat(model), &q)
            .unwrap()
            .expect("a witness");
        assert_eq!(witness.n, 4);
        assert_eq!(witness.start.positions(), &[0, 1]);
        assert_eq!(witness.successor.positions(), &[1, 1]);
    }

    #[test]
    fn unsat_has_no_witness() {
        let q = gap_one_query();
        assert_eq!(extract_witness(&SolverOutcome::Unsat, &q).unwrap(), None);
    }

    #[test]
    fn adversarial_models_are_hard_errors() {
        let q = gap_one_query();
        // Position beyond the decoded ring size.
        let model = BTreeMap::from([
            ("y".to_string(), 4),
            ("p1".to_string(), 9),
            ("p2".to_string(), 1),
            ("pp1".to_string(), 1),
            ("pp2".to_string(), 1),
        ]);
        let err = extract_witness(&SolverOutcome::Sat(model), &q).unwrap_err();
        assert!(matches!(err, SolverError::InvalidModel(_)), "{err}");

        // A step the semantics never takes.
        let model = BTreeMap::from([
            ("y".to_string(), 4),
            ("p1".to_string(), 0),
            ("p2".to_string(), 1),
            ("pp1".to_string(), 3),
            ("pp2".to_string(), 3),
        ]);
        let err = extract_witness(&SolverOutcome::Sat(model), &q).unwrap_err();
        assert!(matches!(err, SolverError::InvalidModel(_)), "{err}");

        // A start that is already bad.
        let model = BTreeMap::from([
            ("y".to_string(), 4),
            ("p1".to_string(), 1),
            ("p2".to_string(), 1),
            ("pp1".to_string(), 1),
            ("pp2".to_string(), 1),
        ]);
        let err = extract_witness(&SolverOutcome::Sat(model), &q).unwrap_err();
        assert!(matches!(err, SolverError::InvalidModel(_)), "{err}");
    }

    #[test]
    fn wrong_purpose_is_rejected() {
        let phi = ProtocolSpec::parse(2, "x1 > x2").unwrap();
        let q = crate::encoding::validity_query(&phi).unwrap();
        let err = extract_witness(&SolverOutcome::Unsat, &q).unwrap_err();
        assert!(matches!(err, SolverError::WrongPurpose(QueryPurpose::Validity)));
    }
}
