//! The explicit-state simulator: one-step successor sets in the three
//! scheduling modes and breadth-first reachability.
//!
//! ```bash
//! cargo run --example simulate
//! ```

use ring_verify::ringmodel::{Configuration, ProtocolSpec};
use ring_verify::semantics::{
    post_async, post_semisync, post_star, post_sync, AsyncState, Mode,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let phi = ProtocolSpec::parse(2, "x1 > x2")?;
    let start = Configuration::on_ring(5, &[0, 1])?;

    // Synchronously both robots complete a cycle at once.
    println!("sync:     {:?}", names(post_sync(&phi, &start)?));

    // Semi-synchronously any subset is scheduled, including nobody.
    println!("semisync: {:?}", names(post_semisync(&phi, &start)?));

    // Asynchronously a single robot looks or moves per step; moves
    // follow the view stored at the robot's last look, which may be
    // stale by the time it acts.
    let state = AsyncState::initial(start.clone());
    for next in post_async(&phi, &state)? {
        println!(
            "async:    p={:?} phases={} stored={:?}",
            next.config().positions(),
            next.phase_string(),
            next.stored_views().iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        );
    }

    // Reachability closes the step relation; here the two walkers
    // chase each other around a short cycle.
    let reachable = post_star(&phi, &Configuration::on_ring(4, &[0, 1])?, Mode::Sync, 10_000)?;
    println!("post*:    {:?}", names(reachable));
    Ok(())
}

fn names(set: std::collections::BTreeSet<Configuration>) -> Vec<String> {
    set.into_iter().map(|c| format!("{:?}", c.positions())).collect()
}
