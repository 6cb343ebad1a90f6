//! Protocol-level checks with the solver: well-formedness for every
//! ring size, and unique-sequentializability (at most one robot moves
//! in any configuration, which collapses the three scheduling modes).
//!
//! ```bash
//! cargo run --example check_protocol
//! ```

use ring_verify::encoding::{uniqseq_query, validity_query};
use ring_verify::ringmodel::ProtocolSpec;
use ring_verify::solver::{emit_smt, run_solver, SolverConfig, SolverOutcome};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = match SolverConfig::from_environment() {
        Ok(config) => config,
        Err(err) => {
            eprintln!("{err}");
            eprintln!("hint: npm install --prefix tools/smt-shim, or install z3");
            return Ok(());
        }
    };

    let candidates = [
        ("1 < 1", 2),
        ("x1 > x2", 2),
        ("x1 >= 1", 2),
        ("x1 = 1", 2),
        ("x1 > x2 + x3", 3),
    ];
    for (text, robots) in candidates {
        let phi = ProtocolSpec::parse(robots, text)?;

        let validity = run_solver(&emit_smt(&validity_query(&phi)?), &config)?;
        let validity = match validity.outcome {
            SolverOutcome::Unsat => "well-formed",
            SolverOutcome::Sat(_) => "orders contradictory moves",
            SolverOutcome::Unknown(_) => "unknown",
        };

        let uniqseq = run_solver(&emit_smt(&uniqseq_query(&phi)?), &config)?;
        let uniqseq = match uniqseq.outcome {
            SolverOutcome::Unsat => "uniquely-sequentializable",
            SolverOutcome::Sat(_) => "lets several robots move at once",
            SolverOutcome::Unknown(_) => "unknown",
        };

        println!("{text:>14} (k={robots}): {validity}; {uniqseq}");
    }
    Ok(())
}
