//! Shared fixtures for the integration suites: the committed protocol
//! suite, independent brute-force oracles, a seeded random-protocol
//! generator, and solver discovery.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::OnceLock;
use std::time::Duration;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ring_verify::presburger::{parse_formula, CmpOp, Formula, Term};
use ring_verify::ringmodel::{
    enumerate_configurations, enumerate_views, move_set, protocol_valid_bounded, view_clockwise,
    Configuration, ProtocolSpec, ValidityVerdict,
};
use ring_verify::solver::SolverConfig;

pub fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .ancestors()
        .nth(2)
        .expect("crate lives two levels under the repo root")
        .to_path_buf()
}

pub fn suite_protocol_path(file: &str) -> PathBuf {
    repo_root().join("protocols").join("suite").join(file)
}

pub fn load_protocol(file: &str, robots: usize) -> ProtocolSpec {
    let path = suite_protocol_path(file);
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()));
    let body = parse_formula(&text).expect("suite protocols parse");
    ProtocolSpec::new(robots, body).expect("suite protocols are well-formed")
}

/// The committed protocol suite: constant-false, the three
/// two-robot protocols, and two three-robot protocols of which one
/// carries a mod-constant atom.
pub fn suite() -> Vec<(&'static str, ProtocolSpec)> {
    vec![
        ("constant-false", load_protocol("constant-false.rpf", 2)),
        ("larger-gap-first", load_protocol("larger-gap-first.rpf", 2)),
        ("adjacent-step", load_protocol("adjacent-step.rpf", 2)),
        ("equal-gaps", load_protocol("equal-gaps.rpf", 2)),
        ("k3-dominant-gap", load_protocol("k3-dominant-gap.rpf", 3)),
        ("k3-mod-gap", load_protocol("k3-mod-gap.rpf", 3)),
    ]
}

/// `x_i = x_j` for some pair: two robots share a node.
pub fn collision_bad(k: usize) -> Formula {
    let mut clauses = Vec::new();
    for i in 1..=k {
        for j in i + 1..=k {
            clauses.push(format!("x{i} = x{j}"));
        }
    }
    parse_formula(&clauses.join(" or ")).unwrap()
}

/// Deterministic generator of well-formed protocols that pass the
/// bounded asymmetry check. Atom constants stay at or below the robot
/// count, so they are meaningful on every tested ring size.
pub fn random_valid_protocols(k: usize, count: usize, seed: u64) -> Vec<ProtocolSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let body = random_qf_body(&mut rng, k);
        let Ok(phi) = ProtocolSpec::new(k, body) else {
            continue;
        };
        if protocol_valid_bounded(&phi, 8).unwrap() == ValidityVerdict::Valid {
            out.push(phi);
        }
    }
    out
}

fn random_term(rng: &mut ChaCha8Rng, k: usize) -> Term {
    let x = |rng: &mut ChaCha8Rng| Term::var(format!("x{}", rng.gen_range(1..=k)));
    match rng.gen_range(0..6) {
        0 => x(rng),
        1 => Term::Const(rng.gen_range(0..=k as u64)),
        2 => Term::add(x(rng), Term::Const(rng.gen_range(0..=k as u64))),
        3 => Term::add(x(rng), x(rng)),
        4 => Term::scalar_mul(rng.gen_range(2..=3), x(rng)),
        _ => Term::mod_const(x(rng), rng.gen_range(2..=3)),
    }
}

fn random_atom(rng: &mut ChaCha8Rng, k: usize) -> Formula {
    let op = match rng.gen_range(0..6) {
        0 => CmpOp::Eq,
        1 => CmpOp::Le,
        2 => CmpOp::Ge,
        3 => CmpOp::Lt,
        4 => CmpOp::Gt,
        _ => CmpOp::Ne,
    };
    let atom = Formula::Cmp(random_term(rng, k), op, random_term(rng, k));
    if rng.gen_bool(0.2) {
        Formula::Not(Box::new(atom))
    } else {
        atom
    }
}

fn random_qf_body(rng: &mut ChaCha8Rng, k: usize) -> Formula {
    match rng.gen_range(0..4) {
        0 => random_atom(rng, k),
        1 => Formula::And((0..rng.gen_range(2..=3)).map(|_| random_atom(rng, k)).collect()),
        2 => Formula::Or((0..rng.gen_range(2..=3)).map(|_| random_atom(rng, k)).collect()),
        _ => Formula::And(vec![
            random_atom(rng, k),
            Formula::Or(vec![random_atom(rng, k), random_atom(rng, k)]),
        ]),
    }
}

/// Independent bounded check of unique-sequentializability: scans all
/// configurations of all ring sizes up to `n_max` for one where two
/// robots both take strict moves.
pub fn two_movers_bounded(phi: &ProtocolSpec, n_max: u64) -> Option<Configuration> {
    let k = phi.robot_count();
    for n in k as u64..=n_max {
        for config in enumerate_configurations(k, n) {
            let mut movers = 0;
            for robot in 0..k {
                if !move_set(phi, &view_clockwise(&config, robot)).unwrap().is_stay() {
                    movers += 1;
                }
            }
            if movers >= 2 {
                return Some(config);
            }
        }
    }
    None
}

/// Independent bounded validity oracle reused by the solver-verdict
/// comparisons: the first view (over all ring sizes up to `n_max`)
/// that satisfies the protocol together with its distinct reversal.
pub fn asymmetry_violation_bounded(
    phi: &ProtocolSpec,
    n_max: u64,
) -> Option<ring_verify::ringmodel::View> {
    let k = phi.robot_count();
    for n in k as u64..=n_max {
        for view in enumerate_views(k, n) {
            let reverted = view.reverted();
            if view != reverted
                && phi.admits(&view).unwrap()
                && phi.admits(&reverted).unwrap()
            {
                return Some(view);
            }
        }
    }
    None
}

/// Resolves a solver for the test run: the RING_VERIFY_SOLVER
/// environment variable, a `z3` binary on PATH, or the repo's
/// `tools/smt-shim` (installing its npm dependency on first use).
/// Panics with instructions when none of the three can work, because
/// the acceptance criteria cannot be decided without one.
pub fn solver_config() -> SolverConfig {
    static TEMPLATE: OnceLock<String> = OnceLock::new();
    let template = TEMPLATE.get_or_init(|| {
        if let Ok(t) = std::env::var("RING_VERIFY_SOLVER") {
            if !t.trim().is_empty() {
                return t;
            }
        }
        if Command::new("z3")
            .arg("-version")
            .output()
            .map(|o| o.status.success())
            .unwrap_or(false)
        {
            return "z3 {file}".to_string();
        }
        let shim_dir = repo_root().join("tools").join("smt-shim");
        let script = shim_dir.join("smt-shim.mjs");
        assert!(
            script.is_file(),
            "no solver found and {} is missing",
            script.display()
        );
        if !shim_dir.join("node_modules").join("z3-solver").is_dir() {
            let status = Command::new("npm")
                .args(["install", "--no-audit", "--no-fund"])
                .current_dir(&shim_dir)
                .status()
                .expect("npm must be runnable to install the solver shim");
            assert!(status.success(), "npm install failed in {}", shim_dir.display());
        }
        format!("node {} {{file}}", script.display())
    });
    let mut config = SolverConfig::new(template.clone());
    config.timeout = Duration::from_secs(60);
    config
}
