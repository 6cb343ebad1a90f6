//! Concrete ring-world objects: configurations of robots on a ring,
//! the views they perceive, direction reversal, and the protocol move
//! decision. These are the ground-truth definitions that both the
//! simulator and the formula encodings are checked against.

use std::fmt;

use thiserror::Error;

use crate::presburger::{eval, EvalError, Formula, Valuation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("ring of size {ring_size} cannot host {robot_count} robots")]
    RingTooSmall { robot_count: usize, ring_size: u64 },
    #[error("expected {expected} positions, got {actual}")]
    WrongArity { expected: usize, actual: usize },
    #[error("position {position} is outside the ring [0, {ring_size})")]
    PositionOutOfRange { position: u64, ring_size: u64 },
    #[error("a view needs at least one distance")]
    EmptyView,
    #[error("the first distance of a view cannot be 0")]
    LeadingZeroDistance,
    #[error("protocols need at least 2 robots, got {0}")]
    TooFewRobots(usize),
    #[error("protocol body must be quantifier-free")]
    QuantifierInProtocol,
    #[error("protocol for {robot_count} robots cannot mention `{name}`")]
    ForeignVariable { name: String, robot_count: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// `a` reduced to the ring `[0, modulus)`, nonnegative even for
/// negative `a`: `ring_mod(-1, 3) == 2`.
pub fn ring_mod(a: i64, modulus: u64) -> Result<u64, ModelError> {
    if modulus == 0 {
        return Err(ModelError::ZeroModulus);
    }
    let m = i64::try_from(modulus).expect("ring size fits in i64");
    Ok(a.rem_euclid(m) as u64)
}

/// The shape of an instance: how many robots on how many nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RingInstance {
    robot_count: usize,
    ring_size: u64,
}

impl RingInstance {
    pub fn new(robot_count: usize, ring_size: u64) -> Result<RingInstance, ModelError> {
        if ring_size < robot_count as u64 {
            return Err(ModelError::RingTooSmall { robot_count, ring_size });
        }
        Ok(RingInstance { robot_count, ring_size })
    }

    pub fn robot_count(&self) -> usize {
        self.robot_count
    }

    pub fn ring_size(&self) -> u64 {
        self.ring_size
    }
}

/// Positions of all robots, numbered clockwise. Several robots may
/// share a node (a tower).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    ring: RingInstance,
    positions: Vec<u64>,
}

impl Configuration {
    pub fn new(ring: RingInstance, positions: Vec<u64>) -> Result<Configuration, ModelError> {
        if positions.len() != ring.robot_count() {
            return Err(ModelError::WrongArity {
                expected: ring.robot_count(),
                actual: positions.len(),
            });
        }
        for &p in &positions {
            if p >= ring.ring_size() {
                return Err(ModelError::PositionOutOfRange {
                    position: p,
                    ring_size: ring.ring_size(),
                });
            }
        }
        Ok(Configuration { ring, positions })
    }

    /// Convenience constructor used throughout the tests.
    pub fn on_ring(ring_size: u64, positions: &[u64]) -> Result<Configuration, ModelError> {
        let ring = RingInstance::new(positions.len(), ring_size)?;
        Configuration::new(ring, positions.to_vec())
    }

    pub fn ring(&self) -> RingInstance {
        self.ring
    }

    pub fn ring_size(&self) -> u64 {
        self.ring.ring_size()
    }

    pub fn robot_count(&self) -> usize {
        self.ring.robot_count()
    }

    pub fn positions(&self) -> &[u64] {
        &self.positions
    }

    pub fn position(&self, robot: usize) -> u64 {
        self.positions[robot]
    }

    /// The configuration with `delta` applied to one robot, wrapping
    /// around the ring in either direction.
    pub fn with_move(&self, robot: usize, delta: i64) -> Configuration {
        let n = self.ring_size();
        let mut positions = self.positions.clone();
        positions[robot] =
            ring_mod(positions[robot] as i64 + delta, n).expect("ring size is positive");
        Configuration { ring: self.ring, positions }
    }

    /// Valuation binding `x1..xk` to the positions.
    pub fn position_valuation(&self) -> Valuation {
        self.positions
            .iter()
            .enumerate()
            .map(|(i, &p)| (format!("x{}", i + 1), p))
            .collect()
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={}; p=", self.ring_size())?;
        for (i, p) in self.positions.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// What a robot perceives: the successive clockwise distances to the
/// other robots, starting from its nearest occupied node. Distances
/// sum to the ring size; a 0 means two robots share a node; the first
/// entry is never 0 (zeros sit at the end of the tuple instead).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct View {
    distances: Vec<u64>,
}

impl View {
    pub fn new(distances: Vec<u64>) -> Result<View, ModelError> {
        match distances.first() {
            None => Err(ModelError::EmptyView),
            Some(0) => Err(ModelError::LeadingZeroDistance),
            Some(_) => Ok(View { distances }),
        }
    }

    /// The canonical view of a node shared by all `k` robots, also
    /// used as the placeholder for robots that have not looked yet.
    pub fn all_colocated(robot_count: usize, ring_size: u64) -> View {
        let mut distances = vec![0; robot_count];
        distances[0] = ring_size;
        View { distances }
    }

    pub fn distances(&self) -> &[u64] {
        &self.distances
    }

    pub fn robot_count(&self) -> usize {
        self.distances.len()
    }

    pub fn ring_size(&self) -> u64 {
        self.distances.iter().sum()
    }

    /// The same view read in the opposite direction.
    pub fn reverted(&self) -> View {
        let k = self.distances.len();
        let j = self
            .distances
            .iter()
            .rposition(|&d| d != 0)
            .expect("views contain a nonzero distance");
        let mut out = Vec::with_capacity(k);
        out.extend(self.distances[..=j].iter().rev().copied());
        out.resize(k, 0);
        View { distances: out }
    }

    /// True when the view reads the same in both directions, i.e. the
    /// robot cannot tell clockwise from anticlockwise.
    pub fn is_symmetric(&self) -> bool {
        *self == self.reverted()
    }

    /// Valuation binding `x1..xk` to the distances.
    pub fn distance_valuation(&self) -> Valuation {
        self.distances
            .iter()
            .enumerate()
            .map(|(i, &d)| (format!("x{}", i + 1), d))
            .collect()
    }
}

impl fmt::Display for View {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, d) in self.distances.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, ">")
    }
}

/// The clockwise view of one robot: distances to the other robots
/// sorted ascending, then turned into successive gaps. A robot on the
/// same node counts as a full lap away, which is what pushes the
/// zeros of a tower to the end of the tuple.
pub fn view_clockwise(config: &Configuration, robot: usize) -> View {
    let k = config.robot_count();
    assert!(robot < k, "robot index {robot} out of range for {k} robots");
    let n = config.ring_size();
    let own = config.position(robot) as i64;

    let mut laps: Vec<u64> = Vec::with_capacity(k - 1);
    for (j, &p) in config.positions().iter().enumerate() {
        if j == robot {
            continue;
        }
        // Distance in [1, n] with (own + d) mod n = p.
        let d = ring_mod(p as i64 - own - 1, n).expect("positive ring") + 1;
        laps.push(d);
    }
    laps.sort_unstable();

    let mut distances = Vec::with_capacity(k);
    let mut previous = 0;
    for &d in &laps {
        distances.push(d - previous);
        previous = d;
    }
    distances.push(n - previous);
    View { distances }
}

/// A move decision: the set of directions a robot may take, where +1
/// is clockwise and -1 anticlockwise. `Either` covers the disoriented
/// case where both directions satisfy the protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MoveSet {
    Stay,
    Clockwise,
    Anticlockwise,
    Either,
}

impl MoveSet {
    pub fn deltas(&self) -> &'static [i64] {
        match self {
            MoveSet::Stay => &[0],
            MoveSet::Clockwise => &[1],
            MoveSet::Anticlockwise => &[-1],
            MoveSet::Either => &[-1, 1],
        }
    }

    pub fn is_stay(&self) -> bool {
        matches!(self, MoveSet::Stay)
    }
}

/// A robot protocol: a quantifier-free formula over the view
/// distances `x1..xk`. Satisfaction of the formula by the clockwise
/// view orders a clockwise move; satisfaction by the reverted view
/// orders an anticlockwise one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolSpec {
    robot_count: usize,
    body: Formula,
}

impl ProtocolSpec {
    pub fn new(robot_count: usize, body: Formula) -> Result<ProtocolSpec, ModelError> {
        if robot_count < 2 {
            return Err(ModelError::TooFewRobots(robot_count));
        }
        if !body.is_quantifier_free() {
            return Err(ModelError::QuantifierInProtocol);
        }
        for name in body.free_vars() {
            if distance_index(&name, robot_count).is_none() {
                return Err(ModelError::ForeignVariable { name, robot_count });
            }
        }
        Ok(ProtocolSpec { robot_count, body })
    }

    pub fn parse(robot_count: usize, text: &str) -> Result<ProtocolSpec, crate::Error> {
        let body = crate::presburger::parse_formula(text)?;
        Ok(ProtocolSpec::new(robot_count, body)?)
    }

    pub fn robot_count(&self) -> usize {
        self.robot_count
    }

    pub fn body(&self) -> &Formula {
        &self.body
    }

    /// Whether a view satisfies the protocol formula.
    pub fn admits(&self, view: &View) -> Result<bool, ModelError> {
        if view.robot_count() != self.robot_count {
            return Err(ModelError::WrongArity {
                expected: self.robot_count,
                actual: view.robot_count(),
            });
        }
        // Quantifier-free, so the bound is irrelevant.
        Ok(eval(&self.body, &view.distance_valuation(), 0)?)
    }
}

/// Largest index `i` such that `name` is `x<i>` with `1 <= i <= k`.
fn distance_index(name: &str, robot_count: usize) -> Option<usize> {
    let index = parse_distance_var(name)?;
    (index <= robot_count).then_some(index)
}

/// `x<i>` with `i >= 1` and no leading zero.
pub(crate) fn parse_distance_var(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('x')?;
    if digits.is_empty() || digits.starts_with('0') {
        return None;
    }
    digits.parse().ok()
}

/// The directions a robot with clockwise view `view` may move in.
///
/// Both the view and its reversal are tested, which mirrors the
/// disjunctive structure of the step encodings even for protocols
/// that violate the asymmetry condition checked by
/// [`protocol_valid_bounded`].
pub fn move_set(protocol: &ProtocolSpec, view: &View) -> Result<MoveSet, ModelError> {
    let reverted = view.reverted();
    let forward = protocol.admits(view)?;
    if *view == reverted {
        return Ok(if forward { MoveSet::Either } else { MoveSet::Stay });
    }
    let backward = protocol.admits(&reverted)?;
    Ok(match (forward, backward) {
        (true, true) => MoveSet::Either,
        (true, false) => MoveSet::Clockwise,
        (false, true) => MoveSet::Anticlockwise,
        (false, false) => MoveSet::Stay,
    })
}

/// Outcome of the bounded protocol well-formedness check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidityVerdict {
    Valid,
    /// A view satisfying the protocol whose reversal also does,
    /// without being symmetric. Such a protocol orders contradictory
    /// moves.
    Counterexample(View),
}

/// Checks the protocol asymmetry condition over every view of every
/// ring size in `[k, n_max]`: no view may satisfy the formula together
/// with its (distinct) reversal. Views are enumerated lexicographically
/// and the first violation is returned.
pub fn protocol_valid_bounded(
    protocol: &ProtocolSpec,
    n_max: u64,
) -> Result<ValidityVerdict, ModelError> {
    let k = protocol.robot_count();
    for n in k as u64..=n_max {
        for view in enumerate_views(k, n) {
            let reverted = view.reverted();
            if view == reverted {
                continue;
            }
            if protocol.admits(&view)? && protocol.admits(&reverted)? {
                return Ok(ValidityVerdict::Counterexample(view));
            }
        }
    }
    Ok(ValidityVerdict::Valid)
}

/// All views for `k` robots on a ring of size `n` in lexicographic
/// order: tuples of `k` distances summing to `n` whose first entry is
/// positive.
pub fn enumerate_views(k: usize, n: u64) -> Vec<View> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(k: usize, remaining: u64, current: &mut Vec<u64>, out: &mut Vec<View>) {
        if current.len() == k - 1 {
            current.push(remaining);
            out.push(View { distances: current.clone() });
            current.pop();
            return;
        }
        let start = if current.is_empty() { 1 } else { 0 };
        for d in start..=remaining {
            current.push(d);
            rec(k, remaining - d, current, out);
            current.pop();
        }
    }
    if k >= 1 && n >= 1 {
        rec(k, n, &mut current, &mut out);
    }
    out
}

/// All configurations of `k` robots on a ring of size `n` in
/// lexicographic order of their position vectors.
pub fn enumerate_configurations(k: usize, n: u64) -> Vec<Configuration> {
    let ring = RingInstance::new(k, n).expect("n >= k by construction of callers");
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(k: usize, n: u64, ring: RingInstance, current: &mut Vec<u64>, out: &mut Vec<Configuration>) {
        if current.len() == k {
            out.push(Configuration { ring, positions: current.clone() });
            return;
        }
        for p in 0..n {
            current.push(p);
            rec(k, n, ring, current, out);
            current.pop();
        }
    }
    rec(k, n, ring, &mut current, &mut out);
    out
}
