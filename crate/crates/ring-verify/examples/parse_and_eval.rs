//! Tour of the formula layer: parsing the DSL, inspecting free
//! variables, substituting, and bounded evaluation.
//!
//! ```bash
//! cargo run --example parse_and_eval
//! ```

use std::collections::BTreeMap;

use ring_verify::presburger::{eval, parse_formula, Term, Valuation};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // The collision predicate for three robots.
    let collision = parse_formula("x1 = x2 or x2 = x3 or x1 = x3")?;
    println!("parsed:   {collision}");
    println!("free:     {:?}", collision.free_vars());

    // A tower at node 1: x1 and x2 coincide.
    let tower = Valuation::from([
        ("x1".to_string(), 1),
        ("x2".to_string(), 1),
        ("x3".to_string(), 4),
    ]);
    println!("tower:    {}", eval(&collision, &tower, 0)?);

    // Substitution renames the predicate onto position variables.
    let map = BTreeMap::from([
        ("x1".to_string(), Term::var("p1")),
        ("x2".to_string(), Term::var("p2")),
        ("x3".to_string(), Term::var("p3")),
    ]);
    println!("renamed:  {}", collision.substitute(&map)?);

    // Quantifiers range over [0, bound]; evenness of 6 needs the
    // witness 3 inside the bound.
    let even = parse_formula("exists q . y = 2*q")?;
    let six = Valuation::from([("y".to_string(), 6)]);
    println!("bound 10: {}", eval(&even, &six, 10)?);
    println!("bound 2:  {}", eval(&even, &six, 2)?);

    // Comments and whitespace are fine; one formula per input.
    let ring = parse_formula("# admissible sizes\ny > 6")?;
    println!("ring:     {ring}");
    Ok(())
}
