//! Ring-world objects: configurations, the views robots perceive,
//! direction reversal, and protocol move decisions.
//!
//! ```bash
//! cargo run --example views_and_moves
//! ```

use ring_verify::ringmodel::{
    move_set, protocol_valid_bounded, view_clockwise, Configuration, ProtocolSpec,
    ValidityVerdict,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Five robots on a ring of ten nodes, two of them stacked on
    // node 1. Stacked robots perceive the same thing; their mutual
    // distance shows up as the trailing 0.
    let config = Configuration::on_ring(10, &[1, 1, 4, 8, 9])?;
    for robot in 0..2 {
        println!("robot {robot} sees       {}", view_clockwise(&config, robot));
    }
    let view = view_clockwise(&config, 0);
    println!("read backwards     {}", view.reverted());

    // A symmetric placement: the view reads the same both ways, so
    // the robot cannot orient itself.
    let symmetric = Configuration::on_ring(7, &[2, 5, 6])?;
    let v = view_clockwise(&symmetric, 0);
    println!("symmetric          {v} (disoriented: {})", v.is_symmetric());

    // Protocols order moves by looking at the view and its reversal.
    let phi = ProtocolSpec::parse(2, "x1 > x2")?;
    let c = Configuration::on_ring(5, &[0, 1])?;
    for robot in 0..2 {
        let view = view_clockwise(&c, robot);
        println!(
            "robot {robot}: view {view} -> {:?}",
            move_set(&phi, &view)?
        );
    }

    // Well-formedness: a protocol must not order a clockwise move on
    // a view and on its distinct reversal at the same time.
    match protocol_valid_bounded(&phi, 8)? {
        ValidityVerdict::Valid => println!("{} is well-formed up to n=8", phi.body()),
        ValidityVerdict::Counterexample(view) => println!("contradiction on {view}"),
    }
    let greedy = ProtocolSpec::parse(2, "x1 >= 1")?;
    match protocol_valid_bounded(&greedy, 8)? {
        ValidityVerdict::Valid => println!("{} is well-formed up to n=8", greedy.body()),
        ValidityVerdict::Counterexample(view) => {
            println!("{} orders contradictory moves on {view}", greedy.body())
        }
    }
    Ok(())
}
