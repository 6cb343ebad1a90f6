//! Executable transition relations for the three scheduling modes,
//! plus bounded reachability. This is the brute-force oracle the
//! formula encodings are validated against, so it follows the
//! relation definitions as literally as possible.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::presburger::{eval, Evaluator, Formula, Valuation};
use crate::ringmodel::{
    enumerate_configurations, move_set, view_clockwise, Configuration, ModelError, MoveSet,
    ProtocolSpec, View,
};

/// Default cap on explored states before an exploration gives up.
pub const DEFAULT_STATE_BUDGET: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExploreError {
    #[error("state budget exhausted after {visited} states (cap {budget})")]
    BudgetExceeded { visited: usize, budget: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Scheduling mode: every robot steps, an arbitrary subset steps, or
/// one robot looks or moves per step against a possibly stale view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    Sync,
    SemiSync,
    Async,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Sync => "sync",
            Mode::SemiSync => "semisync",
            Mode::Async => "async",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Mode, String> {
        match s {
            "sync" => Ok(Mode::Sync),
            "semisync" => Ok(Mode::SemiSync),
            "async" => Ok(Mode::Async),
            other => Err(format!("unknown mode `{other}` (expected sync, semisync or async)")),
        }
    }
}

/// Where a robot is in its look-compute-move cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Phase {
    Look,
    Move,
}

/// State of the asynchronous semantics: positions plus, per robot,
/// its cycle phase and the view stored at its last look. Robots in
/// the look phase have their stored slot pinned to the placeholder
/// view, which collapses states that differ only in a value that can
/// never be read again.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AsyncState {
    config: Configuration,
    phases: Vec<Phase>,
    stored_views: Vec<View>,
}

impl AsyncState {
    /// All robots ready to look; stored slots are placeholders.
    pub fn initial(config: Configuration) -> AsyncState {
        let k = config.robot_count();
        let n = config.ring_size();
        AsyncState {
            phases: vec![Phase::Look; k],
            stored_views: vec![View::all_colocated(k, n); k],
            config,
        }
    }

    /// Builds a state, canonicalizing the stored slot of every robot
    /// that is in the look phase.
    pub fn new(
        config: Configuration,
        phases: Vec<Phase>,
        stored_views: Vec<View>,
    ) -> Result<AsyncState, ModelError> {
        let k = config.robot_count();
        if phases.len() != k {
            return Err(ModelError::WrongArity { expected: k, actual: phases.len() });
        }
        if stored_views.len() != k {
            return Err(ModelError::WrongArity { expected: k, actual: stored_views.len() });
        }
        for view in &stored_views {
            if view.robot_count() != k {
                return Err(ModelError::WrongArity { expected: k, actual: view.robot_count() });
            }
        }
        let mut state = AsyncState { config, phases, stored_views };
        state.canonicalize();
        Ok(state)
    }

    fn canonicalize(&mut self) {
        let placeholder = View::all_colocated(self.config.robot_count(), self.config.ring_size());
        for (phase, slot) in self.phases.iter().zip(self.stored_views.iter_mut()) {
            if *phase == Phase::Look {
                *slot = placeholder.clone();
            }
        }
    }

    pub fn config(&self) -> &Configuration {
        &self.config
    }

    pub fn phases(&self) -> &[Phase] {
        &self.phases
    }

    pub fn stored_views(&self) -> &[View] {
        &self.stored_views
    }

    /// Phase vector as an `L`/`M` string, e.g. `LM` for two robots.
    pub fn phase_string(&self) -> String {
        self.phases
            .iter()
            .map(|p| match p {
                Phase::Look => 'L',
                Phase::Move => 'M',
            })
            .collect()
    }
}

/// Per-run cache of protocol move decisions, keyed by view.
struct MoveOracle<'p> {
    protocol: &'p ProtocolSpec,
    cache: HashMap<View, MoveSet>,
}

impl<'p> MoveOracle<'p> {
    fn new(protocol: &'p ProtocolSpec) -> MoveOracle<'p> {
        MoveOracle { protocol, cache: HashMap::new() }
    }

    fn decide(&mut self, view: &View) -> Result<MoveSet, ModelError> {
        if let Some(&hit) = self.cache.get(view) {
            return Ok(hit);
        }
        let decision = move_set(self.protocol, view)?;
        self.cache.insert(view.clone(), decision);
        Ok(decision)
    }
}

fn check_arity(protocol: &ProtocolSpec, config: &Configuration) -> Result<(), ModelError> {
    if protocol.robot_count() != config.robot_count() {
        return Err(ModelError::WrongArity {
            expected: protocol.robot_count(),
            actual: config.robot_count(),
        });
    }
    Ok(())
}

/// Successors when every robot completes a full cycle at once.
/// Disoriented robots choose a direction independently, so the result
/// is the cartesian product of the per-robot options.
pub fn post_sync(
    protocol: &ProtocolSpec,
    config: &Configuration,
) -> Result<BTreeSet<Configuration>, ModelError> {
    let mut oracle = MoveOracle::new(protocol);
    post_sync_cached(protocol, config, &mut oracle)
}

fn post_sync_cached(
    protocol: &ProtocolSpec,
    config: &Configuration,
    oracle: &mut MoveOracle,
) -> Result<BTreeSet<Configuration>, ModelError> {
    check_arity(protocol, config)?;
    let options = robot_options(config, oracle, false)?;
    Ok(apply_products(config, &options))
}

/// Successors when an arbitrary subset of robots completes a full
/// cycle. Unscheduled robots stay put, so each robot's options are
/// its move set plus staying; the empty subset makes every
/// configuration its own successor.
pub fn post_semisync(
    protocol: &ProtocolSpec,
    config: &Configuration,
) -> Result<BTreeSet<Configuration>, ModelError> {
    let mut oracle = MoveOracle::new(protocol);
    post_semisync_cached(protocol, config, &mut oracle)
}

fn post_semisync_cached(
    protocol: &ProtocolSpec,
    config: &Configuration,
    oracle: &mut MoveOracle,
) -> Result<BTreeSet<Configuration>, ModelError> {
    check_arity(protocol, config)?;
    let options = robot_options(config, oracle, true)?;
    Ok(apply_products(config, &options))
}

fn robot_options(
    config: &Configuration,
    oracle: &mut MoveOracle,
    include_stay: bool,
) -> Result<Vec<BTreeSet<i64>>, ModelError> {
    let mut options = Vec::with_capacity(config.robot_count());
    for robot in 0..config.robot_count() {
        let view = view_clockwise(config, robot);
        let mut deltas: BTreeSet<i64> = oracle.decide(&view)?.deltas().iter().copied().collect();
        if include_stay {
            deltas.insert(0);
        }
        options.push(deltas);
    }
    Ok(options)
}

fn apply_products(config: &Configuration, options: &[BTreeSet<i64>]) -> BTreeSet<Configuration> {
    let mut out = BTreeSet::new();
    let mut choice = vec![0i64; options.len()];
    fn rec(
        config: &Configuration,
        options: &[BTreeSet<i64>],
        robot: usize,
        choice: &mut Vec<i64>,
        out: &mut BTreeSet<Configuration>,
    ) {
        if robot == options.len() {
            let mut successor = config.clone();
            for (i, &delta) in choice.iter().enumerate() {
                if delta != 0 {
                    successor = successor.with_move(i, delta);
                }
            }
            out.insert(successor);
            return;
        }
        for &delta in &options[robot] {
            choice[robot] = delta;
            rec(config, options, robot + 1, choice, out);
        }
    }
    rec(config, options, 0, &mut choice, &mut out);
    out
}

/// One-step successors of an asynchronous state: some robot either
/// records its current view and becomes ready to move, or moves as
/// dictated by its stored view and becomes ready to look again.
pub fn post_async(
    protocol: &ProtocolSpec,
    state: &AsyncState,
) -> Result<BTreeSet<AsyncState>, ModelError> {
    let mut oracle = MoveOracle::new(protocol);
    post_async_cached(protocol, state, &mut oracle)
}

fn post_async_cached(
    protocol: &ProtocolSpec,
    state: &AsyncState,
    oracle: &mut MoveOracle,
) -> Result<BTreeSet<AsyncState>, ModelError> {
    check_arity(protocol, state.config())?;
    let k = state.config().robot_count();
    let placeholder = View::all_colocated(k, state.config().ring_size());
    let mut out = BTreeSet::new();
    for robot in 0..k {
        match state.phases[robot] {
            Phase::Look => {
                let mut next = state.clone();
                next.phases[robot] = Phase::Move;
                next.stored_views[robot] = view_clockwise(state.config(), robot);
                out.insert(next);
            }
            Phase::Move => {
                let decision = oracle.decide(&state.stored_views[robot])?;
                for &delta in decision.deltas() {
                    let mut next = state.clone();
                    next.config = state.config.with_move(robot, delta);
                    next.phases[robot] = Phase::Look;
                    next.stored_views[robot] = placeholder.clone();
                    out.insert(next);
                }
            }
        }
    }
    Ok(out)
}

/// Configurations reachable from `config` under `mode`, computed by
/// breadth-first search over a state space that is finite once the
/// ring size is fixed. For the asynchronous mode the search runs over
/// full asynchronous states starting with every robot ready to look,
/// and the position components of the visited states are returned.
pub fn post_star(
    protocol: &ProtocolSpec,
    config: &Configuration,
    mode: Mode,
    max_states: usize,
) -> Result<BTreeSet<Configuration>, ExploreError> {
    check_arity(protocol, config)?;
    let mut oracle = MoveOracle::new(protocol);
    match mode {
        Mode::Sync | Mode::SemiSync => {
            let mut visited = BTreeSet::from([config.clone()]);
            let mut frontier = VecDeque::from([config.clone()]);
            while let Some(current) = frontier.pop_front() {
                let successors = match mode {
                    Mode::Sync => post_sync_cached(protocol, &current, &mut oracle)?,
                    Mode::SemiSync => post_semisync_cached(protocol, &current, &mut oracle)?,
                    Mode::Async => unreachable!(),
                };
                for next in successors {
                    if visited.insert(next.clone()) {
                        if visited.len() > max_states {
                            return Err(ExploreError::BudgetExceeded {
                                visited: visited.len(),
                                budget: max_states,
                            });
                        }
                        frontier.push_back(next);
                    }
                }
            }
            Ok(visited)
        }
        Mode::Async => {
            let initial = AsyncState::initial(config.clone());
            let mut configs = BTreeSet::from([config.clone()]);
            let mut visited = BTreeSet::from([initial.clone()]);
            let mut frontier = VecDeque::from([initial]);
            while let Some(current) = frontier.pop_front() {
                for next in post_async_cached(protocol, &current, &mut oracle)? {
                    if visited.insert(next.clone()) {
                        if visited.len() > max_states {
                            return Err(ExploreError::BudgetExceeded {
                                visited: visited.len(),
                                budget: max_states,
                            });
                        }
                        configs.insert(next.config().clone());
                        frontier.push_back(next);
                    }
                }
            }
            Ok(configs)
        }
    }
}

/// A concrete safety violation: a ring size, a configuration outside
/// the bad set, and a bad configuration it reaches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub n: u64,
    pub start: Configuration,
    pub successor: Configuration,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ring size {}: {} reaches bad {}",
            self.n, self.start, self.successor
        )
    }
}

/// Whether the ring property admits size `n`. The quantifier bound is
/// enlarged beyond `n` so that properties like "exists q . y = 2*q"
/// keep their witnesses in range.
pub fn ring_admits(ring: &Formula, n: u64) -> Result<bool, ExploreError> {
    let valuation = Valuation::from([("y".to_string(), n)]);
    Ok(eval(ring, &valuation, 2 * n + 64).map_err(ModelError::from)?)
}

/// Whether a configuration belongs to the bad set.
pub fn config_in_bad(bad: &Formula, config: &Configuration) -> Result<bool, ExploreError> {
    Ok(eval(bad, &config.position_valuation(), config.ring_size()).map_err(ModelError::from)?)
}

fn bad_in(
    evaluator: &mut Evaluator,
    config: &Configuration,
) -> Result<bool, ExploreError> {
    Ok(evaluator.eval(&config.position_valuation()).map_err(ModelError::from)?)
}

/// Brute-force safety over a finite range of ring sizes: scans every
/// admissible `n` ascending and every good configuration in
/// lexicographic order, and reports the first good configuration
/// whose reachable set meets the bad set, together with the first bad
/// configuration discovered from it.
pub fn reachable_bad_bounded(
    protocol: &ProtocolSpec,
    ring: &Formula,
    bad: &Formula,
    mode: Mode,
    ring_sizes: std::ops::RangeInclusive<u64>,
    max_states: usize,
) -> Result<Option<Witness>, ExploreError> {
    search_bad(protocol, ring, bad, mode, ring_sizes, max_states, false)
}

/// Like [`reachable_bad_bounded`] but looks only one step ahead.
pub fn reachable_bad_one_step(
    protocol: &ProtocolSpec,
    ring: &Formula,
    bad: &Formula,
    mode: Mode,
    ring_sizes: std::ops::RangeInclusive<u64>,
    max_states: usize,
) -> Result<Option<Witness>, ExploreError> {
    search_bad(protocol, ring, bad, mode, ring_sizes, max_states, true)
}

fn search_bad(
    protocol: &ProtocolSpec,
    ring: &Formula,
    bad: &Formula,
    mode: Mode,
    ring_sizes: std::ops::RangeInclusive<u64>,
    max_states: usize,
    one_step: bool,
) -> Result<Option<Witness>, ExploreError> {
    let k = protocol.robot_count();
    let mut visited_total = 0usize;
    for n in ring_sizes {
        if n < k as u64 || !ring_admits(ring, n)? {
            continue;
        }
        let mut bad_eval = Evaluator::new(bad, n);
        let mut oracle = MoveOracle::new(protocol);
        for start in enumerate_configurations(k, n) {
            if bad_in(&mut bad_eval, &start)? {
                continue;
            }
            let hit = if one_step {
                first_bad_one_step(protocol, &start, mode, &mut bad_eval, &mut oracle)?
            } else {
                first_bad_reachable(
                    protocol,
                    &start,
                    mode,
                    &mut bad_eval,
                    &mut oracle,
                    max_states,
                    &mut visited_total,
                )?
            };
            if let Some(successor) = hit {
                return Ok(Some(Witness { n, start, successor }));
            }
        }
    }
    Ok(None)
}

fn one_step_successors(
    protocol: &ProtocolSpec,
    config: &Configuration,
    mode: Mode,
    oracle: &mut MoveOracle,
) -> Result<BTreeSet<Configuration>, ModelError> {
    match mode {
        Mode::Sync => post_sync_cached(protocol, config, oracle),
        Mode::SemiSync => post_semisync_cached(protocol, config, oracle),
        Mode::Async => {
            // One asynchronous step from the all-look state never
            // moves anyone; the shortest position change takes a look
            // followed by a move. Position-level "one step" therefore
            // means one completed move.
            let mut out = BTreeSet::new();
            for robot in 0..config.robot_count() {
                let view = view_clockwise(config, robot);
                for &delta in oracle.decide(&view)?.deltas() {
                    out.insert(config.with_move(robot, delta));
                }
            }
            Ok(out)
        }
    }
}

fn first_bad_one_step(
    protocol: &ProtocolSpec,
    start: &Configuration,
    mode: Mode,
    bad_eval: &mut Evaluator,
    oracle: &mut MoveOracle,
) -> Result<Option<Configuration>, ExploreError> {
    for next in one_step_successors(protocol, start, mode, oracle)? {
        if bad_in(bad_eval, &next)? {
            return Ok(Some(next));
        }
    }
    Ok(None)
}

fn first_bad_reachable(
    protocol: &ProtocolSpec,
    start: &Configuration,
    mode: Mode,
    bad_eval: &mut Evaluator,
    oracle: &mut MoveOracle,
    max_states: usize,
    visited_total: &mut usize,
) -> Result<Option<Configuration>, ExploreError> {
    match mode {
        Mode::Sync | Mode::SemiSync => {
            let mut visited = BTreeSet::from([start.clone()]);
            let mut frontier = VecDeque::from([start.clone()]);
            while let Some(current) = frontier.pop_front() {
                for next in one_step_successors(protocol, &current, mode, oracle)? {
                    if visited.insert(next.clone()) {
                        *visited_total += 1;
                        if *visited_total > max_states {
                            return Err(ExploreError::BudgetExceeded {
                                visited: *visited_total,
                                budget: max_states,
                            });
                        }
                        if bad_in(bad_eval, &next)? {
                            return Ok(Some(next));
                        }
                        frontier.push_back(next);
                    }
                }
            }
            Ok(None)
        }
        Mode::Async => {
            let initial = AsyncState::initial(start.clone());
            let mut visited = BTreeSet::from([initial.clone()]);
            let mut frontier = VecDeque::from([initial]);
            while let Some(current) = frontier.pop_front() {
                for next in post_async_cached(protocol, &current, oracle)? {
                    if visited.insert(next.clone()) {
                        *visited_total += 1;
                        if *visited_total > max_states {
                            return Err(ExploreError::BudgetExceeded {
                                visited: *visited_total,
                                budget: max_states,
                            });
                        }
                        if bad_in(bad_eval, next.config())? {
                            return Ok(Some(next.config().clone()));
                        }
                        frontier.push_back(next);
                    }
                }
            }
            Ok(None)
        }
    }
}

/// All canonicalized asynchronous states for `k` robots on a ring of
/// size `n`: every position vector, every phase vector, and every
/// valid stored view for robots in the move phase.
pub fn enumerate_async_states(k: usize, n: u64) -> Vec<AsyncState> {
    let views = crate::ringmodel::enumerate_views(k, n);
    let placeholder = View::all_colocated(k, n);
    let mut out = Vec::new();
    for config in enumerate_configurations(k, n) {
        let mut phase_vec = vec![Phase::Look; k];
        loop {
            // Enumerate stored views for the robots in the move phase.
            let mut slots: Vec<Vec<View>> = Vec::with_capacity(k);
            for phase in &phase_vec {
                match phase {
                    Phase::Look => slots.push(vec![placeholder.clone()]),
                    Phase::Move => slots.push(views.clone()),
                }
            }
            let mut pick = vec![0usize; k];
            loop {
                let stored: Vec<View> =
                    pick.iter().enumerate().map(|(i, &s)| slots[i][s].clone()).collect();
                out.push(AsyncState {
                    config: config.clone(),
                    phases: phase_vec.clone(),
                    stored_views: stored,
                });
                // Odometer over view choices.
                let mut i = k;
                loop {
                    if i == 0 {
                        break;
                    }
                    i -= 1;
                    pick[i] += 1;
                    if pick[i] < slots[i].len() {
                        break;
                    }
                    pick[i] = 0;
                }
                if pick.iter().all(|&s| s == 0) {
                    break;
                }
            }
            // Odometer over phase vectors.
            let mut i = k;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if phase_vec[i] == Phase::Look {
                    phase_vec[i] = Phase::Move;
                    break;
                }
                phase_vec[i] = Phase::Look;
            }
            if phase_vec.iter().all(|&p| p == Phase::Look) {
                break;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presburger::parse_formula;

    fn config(n: u64, positions: &[u64]) -> Configuration {
        Configuration::on_ring(n, positions).unwrap()
    }

    fn configs(n: u64, all: &[&[u64]]) -> BTreeSet<Configuration> {
        all.iter().map(|p| config(n, p)).collect()
    }

    #[test]
    fn sync_step_of_ordered_pair() {
        let phi = ProtocolSpec::parse(2, "x1 > x2").unwrap();
        let out = post_sync(&phi, &config(5, &[0, 1])).unwrap();
        assert_eq!(out, configs(5, &[&[4, 2]]));
    }

    #[test]
    fn sync_step_of_frozen_protocol() {
        let phi = ProtocolSpec::parse(2, "1 < 1").unwrap();
        let c = config(6, &[2, 5]);
        assert_eq!(post_sync(&phi, &c).unwrap(), BTreeSet::from([c.clone()]));
        assert_eq!(post_semisync(&phi, &c).unwrap(), BTreeSet::from([c]));
    }

    #[test]
    fn sync_step_of_disoriented_pair() {
        let phi = ProtocolSpec::parse(2, "x1 = x2").unwrap();
        let out = post_sync(&phi, &config(4, &[0, 2])).unwrap();
        assert_eq!(out, configs(4, &[&[3, 1], &[3, 3], &[1, 1], &[1, 3]]));
    }

    #[test]
    fn semisync_step_includes_subsets() {
        let phi = ProtocolSpec::parse(2, "x1 > x2").unwrap();
        let out = post_semisync(&phi, &config(5, &[0, 1])).unwrap();
        assert_eq!(out, configs(5, &[&[0, 1], &[4, 1], &[0, 2], &[4, 2]]));
        // Every synchronous successor is a semi-synchronous one.
        let sync = post_sync(&phi, &config(5, &[0, 1])).unwrap();
        assert!(sync.is_subset(&out));
    }

    #[test]
    fn async_look_steps_store_views() {
        let phi = ProtocolSpec::parse(2, "1 < 1").unwrap();
        let state = AsyncState::initial(config(5, &[0, 1]));
        let successors = post_async(&phi, &state).unwrap();
        assert_eq!(successors.len(), 2);
        for next in &successors {
            assert_eq!(next.config(), state.config());
            let mover = next.phases().iter().position(|&p| p == Phase::Move).unwrap();
            assert_eq!(
                next.stored_views()[mover],
                view_clockwise(state.config(), mover)
            );
        }
    }

    #[test]
    fn async_move_uses_stored_view() {
        let phi = ProtocolSpec::parse(2, "x1 > x2").unwrap();
        let state = AsyncState::new(
            config(5, &[0, 1]),
            vec![Phase::Look, Phase::Move],
            vec![
                View::all_colocated(2, 5),
                View::new(vec![4, 1]).unwrap(),
            ],
        )
        .unwrap();
        let successors = post_async(&phi, &state).unwrap();
        // Robot 1 moving clockwise from its stored view.
        let moved: Vec<_> = successors
            .iter()
            .filter(|s| s.phases()[1] == Phase::Look)
            .collect();
        assert_eq!(moved.len(), 1);
        assert_eq!(moved[0].config(), &config(5, &[0, 2]));
    }

    #[test]
    fn async_stale_view_still_drives_the_move() {
        // Robot 0 stores <1,4> while robot 1 then walks away; the
        // stored view still commands the eventual move.
        let phi = ProtocolSpec::parse(2, "x1 > x2").unwrap();
        let start = config(5, &[0, 1]);
        let mut state = AsyncState::initial(start);
        // Robot 0 looks.
        state = post_async(&phi, &state)
            .unwrap()
            .into_iter()
            .find(|s| s.phases()[0] == Phase::Move)
            .unwrap();
        assert_eq!(state.stored_views()[0], View::new(vec![1, 4]).unwrap());
        // Robot 1 looks, then moves clockwise.
        state = post_async(&phi, &state)
            .unwrap()
            .into_iter()
            .find(|s| s.phases()[1] == Phase::Move)
            .unwrap();
        state = post_async(&phi, &state)
            .unwrap()
            .into_iter()
            .find(|s| s.phases()[1] == Phase::Look)
            .unwrap();
        assert_eq!(state.config(), &config(5, &[0, 2]));
        // Robot 0 finally moves: anticlockwise per its stale view.
        let finished = post_async(&phi, &state)
            .unwrap()
            .into_iter()
            .find(|s| s.phases()[0] == Phase::Look)
            .unwrap();
        assert_eq!(finished.config(), &config(5, &[4, 2]));
    }

    #[test]
    fn post_star_finds_the_sync_cycle() {
        let phi = ProtocolSpec::parse(2, "x1 > x2").unwrap();
        let reachable = post_star(&phi, &config(4, &[0, 1]), Mode::Sync, 10_000).unwrap();
        assert!(reachable.contains(&config(4, &[0, 1])));
        assert!(reachable.contains(&config(4, &[3, 2])));
        // The two configurations alternate.
        let from_there = post_sync(&phi, &config(4, &[3, 2])).unwrap();
        assert_eq!(from_there, configs(4, &[&[0, 1]]));
    }

    #[test]
    fn post_star_of_frozen_protocol_is_a_singleton() {
        let phi = ProtocolSpec::parse(2, "1 < 1").unwrap();
        let c = config(7, &[1, 5]);
        for mode in [Mode::Sync, Mode::SemiSync, Mode::Async] {
            assert_eq!(post_star(&phi, &c, mode, 1_000).unwrap(), BTreeSet::from([c.clone()]));
        }
    }

    #[test]
    fn post_star_inclusions_across_modes() {
        let suite = [
            ProtocolSpec::parse(2, "1 < 1").unwrap(),
            ProtocolSpec::parse(2, "x1 > x2").unwrap(),
            ProtocolSpec::parse(2, "x1 = 1").unwrap(),
            ProtocolSpec::parse(2, "x1 = x2").unwrap(),
        ];
        for phi in &suite {
            for n in 2..=5u64 {
                for c in enumerate_configurations(2, n) {
                    let sync = post_star(phi, &c, Mode::Sync, 100_000).unwrap();
                    let semi = post_star(phi, &c, Mode::SemiSync, 100_000).unwrap();
                    let asynch = post_star(phi, &c, Mode::Async, 100_000).unwrap();
                    assert!(sync.is_subset(&semi), "sync ⊆ semisync at {c}");
                    assert!(semi.is_subset(&asynch), "semisync ⊆ async at {c}");
                }
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let phi = ProtocolSpec::parse(2, "x1 > x2").unwrap();
        let err = post_star(&phi, &config(5, &[0, 1]), Mode::SemiSync, 3).unwrap_err();
        assert!(matches!(err, ExploreError::BudgetExceeded { .. }));
    }

    #[test]
    fn frozen_protocol_never_reaches_bad() {
        let phi = ProtocolSpec::parse(3, "1 < 1").unwrap();
        let ring = parse_formula("y > 6").unwrap();
        let bad = parse_formula("x1 = x2 or x2 = x3 or x1 = x3").unwrap();
        let hit =
            reachable_bad_bounded(&phi, &ring, &bad, Mode::Sync, 7..=9, 1_000_000).unwrap();
        assert_eq!(hit, None);
    }

    #[test]
    fn gap_one_protocol_collides() {
        let phi = ProtocolSpec::parse(2, "x1 = 1").unwrap();
        let ring = parse_formula("y >= 2").unwrap();
        let bad = parse_formula("x1 = x2").unwrap();
        for mode in [Mode::SemiSync, Mode::Async] {
            let witness = reachable_bad_bounded(&phi, &ring, &bad, mode, 2..=5, 1_000_000)
                .unwrap()
                .expect("a collision witness");
            // The scan is deterministic: smallest ring first, then
            // lexicographic configurations.
            assert_eq!(witness.n, 2);
            assert!(config_in_bad(&bad, &witness.successor).unwrap());
            assert!(!config_in_bad(&bad, &witness.start).unwrap());
        }
        // Synchronously the two robots always cross instead of
        // stacking: the gap-one pair swaps orientation forever.
        let hit =
            reachable_bad_bounded(&phi, &ring, &bad, Mode::Sync, 2..=5, 1_000_000).unwrap();
        assert_eq!(hit, None);
    }

    #[test]
    fn ordered_protocol_collides_only_on_the_triangle() {
        let phi = ProtocolSpec::parse(2, "x1 > x2").unwrap();
        let ring = parse_formula("y >= 3").unwrap();
        let bad = parse_formula("x1 = x2").unwrap();
        // On a ring of size 3 both robots walk into the single node
        // between them.
        let witness =
            reachable_bad_bounded(&phi, &ring, &bad, Mode::Sync, 3..=3, 1_000_000)
                .unwrap()
                .expect("the triangle collision");
        assert_eq!(witness.n, 3);
        assert_eq!(witness.successor.positions()[0], witness.successor.positions()[1]);
        // Beyond that the walkers keep their distances.
        for mode in [Mode::Sync, Mode::SemiSync, Mode::Async] {
            let hit =
                reachable_bad_bounded(&phi, &ring, &bad, mode, 4..=7, 1_000_000).unwrap();
            assert_eq!(hit, None, "mode {mode}");
        }
    }

    #[test]
    fn ring_properties_with_quantifiers() {
        let even = parse_formula("exists q . y = 2*q").unwrap();
        assert!(ring_admits(&even, 8).unwrap());
        assert!(!ring_admits(&even, 7).unwrap());
    }

    #[test]
    fn async_state_enumeration_counts() {
        // k=2, n=3: 9 position vectors; stored slots hold one of 3
        // views when moving, the placeholder when looking.
        let states = enumerate_async_states(2, 3);
        assert_eq!(states.len(), 9 * (1 + 3 + 3 + 9));
        let distinct: BTreeSet<_> = states.iter().cloned().collect();
        assert_eq!(distinct.len(), states.len());
    }
}
