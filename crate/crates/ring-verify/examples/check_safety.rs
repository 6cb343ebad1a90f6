//! End-to-end safety verification: encode, solve with an external
//! SMT solver, decode the witness, and re-validate it in the
//! simulator.
//!
//! Needs a solver; see tools/smt-shim/README.md if `z3` is not on
//! PATH.
//!
//! ```bash
//! cargo run --example check_safety
//! ```

use ring_verify::encoding::safety_query;
use ring_verify::presburger::parse_formula;
use ring_verify::ringmodel::ProtocolSpec;
use ring_verify::semantics::Mode;
use ring_verify::solver::{emit_smt, extract_witness, run_solver, SolverConfig, SolverOutcome};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = match SolverConfig::from_environment() {
        Ok(config) => config,
        Err(err) => {
            eprintln!("{err}");
            eprintln!("hint: npm install --prefix tools/smt-shim, or install z3");
            return Ok(());
        }
    };
    println!("solver: {}", config.command_template);

    // A protocol that freezes everyone is safe for every ring size
    // larger than six; the solver proves it for all of them at once.
    let frozen = ProtocolSpec::parse(3, "1 < 1")?;
    let ring = parse_formula("y > 6")?;
    let collision = parse_formula("x1 = x2 or x2 = x3 or x1 = x3")?;
    let query = safety_query(&frozen, &ring, &collision, Mode::Sync)?;
    let run = run_solver(&emit_smt(&query), &config)?;
    println!("frozen protocol, any n > 6: {}", verdict(&run.outcome));

    // Stepping onto an adjacent neighbor collides under subset
    // schedules; the model decodes to a concrete (n, p, p') which is
    // re-validated against the simulator before being reported.
    let adjacent = ProtocolSpec::parse(2, "x1 = 1")?;
    let ring = parse_formula("y > 2")?;
    let collision = parse_formula("x1 = x2")?;
    let query = safety_query(&adjacent, &ring, &collision, Mode::SemiSync)?;
    let run = run_solver(&emit_smt(&query), &config)?;
    println!("adjacent-step protocol:     {}", verdict(&run.outcome));
    if let Some(witness) = extract_witness(&run.outcome, &query)? {
        println!("  witness: {witness}");
    }
    Ok(())
}

fn verdict(outcome: &SolverOutcome) -> &'static str {
    match outcome {
        SolverOutcome::Unsat => "SAFE (no violation on any admissible ring)",
        SolverOutcome::Sat(_) => "VIOLATION (a one-step counterexample exists)",
        SolverOutcome::Unknown(_) => "UNKNOWN",
    }
}
