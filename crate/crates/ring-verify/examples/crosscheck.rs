//! Cross-validation of the formula encodings against the simulator:
//! on small rings, the step formulae and the concrete relations must
//! agree on every configuration pair, and the asynchronous encoding
//! on every pair of scheduler states.
//!
//! ```bash
//! cargo run --example crosscheck
//! ```

use ring_verify::cli::{crosscheck_async_relation, crosscheck_step_relation};
use ring_verify::ringmodel::ProtocolSpec;
use ring_verify::semantics::Mode;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let protocols = [
        ("x1 > x2", 2),
        ("x1 = 1", 2),
        ("x1 > x2 + x3", 3),
    ];
    for (text, robots) in protocols {
        let phi = ProtocolSpec::parse(robots, text)?;
        for mode in [Mode::Sync, Mode::SemiSync] {
            let report = crosscheck_step_relation(&phi, mode, robots as u64..=6, u64::MAX)?;
            match &report.discrepancy {
                None => println!(
                    "{text:>12} {mode:>8}: {} pairs agree",
                    report.pairs_checked
                ),
                Some(d) => println!("{text:>12} {mode:>8}: DISCREPANCY {d:?}"),
            }
        }
    }

    // The asynchronous relation has far more states (positions,
    // phases, stored views), so keep the rings small.
    let phi = ProtocolSpec::parse(2, "x1 > x2")?;
    let report = crosscheck_async_relation(&phi, 2..=4, u64::MAX)?;
    match &report.discrepancy {
        None => println!("{:>12} {:>8}: {} pairs agree", "x1 > x2", "async", report.pairs_checked),
        Some(d) => println!("async DISCREPANCY: {d:?}"),
    }
    Ok(())
}
