//! Building the step-relation encodings and serializing a full
//! verification query as SMT-LIB 2.
//!
//! ```bash
//! cargo run --example encode_smt
//! ```

use ring_verify::encoding::{config_view_formula, safety_query, view_sym_formula};
use ring_verify::presburger::parse_formula;
use ring_verify::ringmodel::ProtocolSpec;
use ring_verify::semantics::Mode;
use ring_verify::solver::emit_smt;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // The building blocks are ordinary formulae over named variables:
    // y for the ring size, p1..pk positions, d1..dk view distances.
    let view = config_view_formula(0, 2)?;
    println!("view of robot 1 (k=2):\n  {view}\n");

    let sym = view_sym_formula(2)?;
    println!("view reversal relation (k=2):\n  {sym}\n");

    // A complete safety question: can two robots following
    // "step when the neighbor is adjacent" collide on some ring with
    // more than two nodes? The query is satisfiable exactly when a
    // violation exists, and a model is the counterexample.
    let phi = ProtocolSpec::parse(2, "x1 = 1")?;
    let ring = parse_formula("y > 2")?;
    let collision = parse_formula("x1 = x2")?;
    let query = safety_query(&phi, &ring, &collision, Mode::SemiSync)?;
    println!("SMT-LIB document for the semi-synchronous safety query:\n");
    println!("{}", emit_smt(&query));
    Ok(())
}
