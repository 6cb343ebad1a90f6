//! Construction of the step-relation formulae and verification
//! queries as plain ASTs.
//!
//! Everything here stays inside linear integer arithmetic. The only
//! spot where the concrete semantics uses a variable modulus, namely
//! wrapping a position offset around the ring, is linearized as a
//! two-case split: with `0 <= p_i < y` and `1 <= o <= y` the value
//! `(p_i + o) mod y` is either `p_i + o` or `p_i + o - y`.

use crate::presburger::{CmpOp, Formula, FreshNames, Term};
use crate::ringmodel::{parse_distance_var, ProtocolSpec};
use crate::semantics::Mode;
use crate::solver::{QueryPurpose, SafetyContext, VarRole, VerificationQuery};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodingError {
    #[error("step encodings need at least 2 robots, got {0}")]
    TooFewRobots(usize),
    #[error("robot index {robot} out of range for {robot_count} robots")]
    RobotOutOfRange { robot: usize, robot_count: usize },
    #[error(
        "the asynchronous relation has no one-step safety encoding; \
         certify the protocol uniquely-sequentializable and use the \
         synchronous one instead"
    )]
    AsyncStepFormula,
    #[error("malformed input: {0}")]
    MalformedConvention(String),
}

/// The variable naming convention shared by all generated formulae.
/// Indices are 0-based in code and 1-based in the emitted names, so
/// robot 0 owns `p1`, `pp1`, `d1` and so on. Primed variables carry a
/// doubled letter (`pp`, `dp`, `sp`, `vp`). Quantified helpers drawn
/// from [`FreshNames`] start with `_` and therefore can never collide
/// with anything the surface grammar accepts.
#[derive(Debug, Clone, Copy)]
pub struct VarNames {
    robot_count: usize,
}

impl VarNames {
    pub fn new(robot_count: usize) -> VarNames {
        VarNames { robot_count }
    }

    pub fn robot_count(&self) -> usize {
        self.robot_count
    }

    pub fn ring(&self) -> String {
        "y".to_string()
    }

    pub fn position(&self, robot: usize) -> String {
        format!("p{}", robot + 1)
    }

    pub fn position_primed(&self, robot: usize) -> String {
        format!("pp{}", robot + 1)
    }

    pub fn distance(&self, robot: usize) -> String {
        format!("d{}", robot + 1)
    }

    pub fn distance_primed(&self, robot: usize) -> String {
        format!("dp{}", robot + 1)
    }

    pub fn phase(&self, robot: usize) -> String {
        format!("s{}", robot + 1)
    }

    pub fn phase_primed(&self, robot: usize) -> String {
        format!("sp{}", robot + 1)
    }

    pub fn stored(&self, robot: usize, slot: usize) -> String {
        format!("v{}_{}", robot + 1, slot + 1)
    }

    pub fn stored_primed(&self, robot: usize, slot: usize) -> String {
        format!("vp{}_{}", robot + 1, slot + 1)
    }

    pub fn positions(&self) -> Vec<String> {
        (0..self.robot_count).map(|i| self.position(i)).collect()
    }

    pub fn positions_primed(&self) -> Vec<String> {
        (0..self.robot_count).map(|i| self.position_primed(i)).collect()
    }

    pub fn distances(&self) -> Vec<String> {
        (0..self.robot_count).map(|i| self.distance(i)).collect()
    }

    pub fn distances_primed(&self) -> Vec<String> {
        (0..self.robot_count).map(|i| self.distance_primed(i)).collect()
    }
}

fn var(name: &str) -> Term {
    Term::var(name)
}

fn eq(left: Term, right: Term) -> Formula {
    Formula::Cmp(left, CmpOp::Eq, right)
}

/// `target = (base + offset) mod y`, linearized, conjoined with the
/// range constraint `0 <= target < y` that makes the split exact.
fn ring_sum_hits(target: &str, base: &str, offset: &str, y: &str) -> Formula {
    let sum = Term::add(var(base), var(offset));
    Formula::And(vec![
        Formula::Cmp(Term::Const(0), CmpOp::Le, var(target)),
        Formula::Cmp(var(target), CmpOp::Lt, var(y)),
        Formula::Or(vec![
            eq(var(target), sum.clone()),
            eq(var(target), Term::sub(sum, var(y))),
        ]),
    ])
}

/// Protocol body with `x1..xk` replaced by the given variable names.
fn protocol_on(phi: &ProtocolSpec, vars: &[String]) -> Formula {
    let map = vars
        .iter()
        .enumerate()
        .map(|(i, name)| (format!("x{}", i + 1), var(name)))
        .collect();
    phi.body()
        .substitute(&map)
        .expect("protocol bodies are quantifier-free")
}

fn negated(formula: &Formula) -> Formula {
    formula
        .negated_qf()
        .expect("only quantifier-free formulae are negated in encodings")
}

/// Core of the view formula: `dist` holds the clockwise view of
/// `robot` in the configuration described by `pos` on a ring of size
/// `y`. Existentially bound offsets enumerate the sorted distances to
/// the other robots.
fn view_of_config(
    robot: usize,
    pos: &[String],
    dist: &[String],
    y: &str,
    namer: &mut FreshNames,
) -> Formula {
    let k = pos.len();
    let offsets = namer.fresh_block(k - 1);
    let mut items = Vec::new();

    for j in 0..k.saturating_sub(2) {
        items.push(Formula::Cmp(
            var(&offsets[j]),
            CmpOp::Le,
            var(&offsets[j + 1]),
        ));
    }
    // Every other robot sits at one of the offsets.
    for (j, p_j) in pos.iter().enumerate() {
        if j == robot {
            continue;
        }
        items.push(Formula::disj(
            offsets
                .iter()
                .map(|o| ring_sum_hits(p_j, &pos[robot], o, y))
                .collect(),
        ));
    }
    // Every offset points at some robot.
    for o in &offsets {
        items.push(Formula::disj(
            pos.iter()
                .enumerate()
                .filter(|(j, _)| *j != robot)
                .map(|(_, p_j)| ring_sum_hits(p_j, &pos[robot], o, y))
                .collect(),
        ));
    }
    items.push(Formula::Cmp(Term::Const(0), CmpOp::Lt, var(&offsets[0])));
    for o in &offsets {
        items.push(Formula::Cmp(var(o), CmpOp::Le, var(y)));
    }
    // Successive gaps between the sorted offsets form the view.
    items.push(eq(var(&dist[0]), var(&offsets[0])));
    for j in 1..k - 1 {
        items.push(eq(
            var(&dist[j]),
            Term::sub(var(&offsets[j]), var(&offsets[j - 1])),
        ));
    }
    items.push(eq(
        var(&dist[k - 1]),
        Term::sub(var(y), var(&offsets[k - 2])),
    ));

    Formula::exists_all(&offsets, Formula::And(items))
}

/// Core of the symmetry formula: `rev` is `dist` read in the opposite
/// direction. The disjunction ranges over the index of the last
/// nonzero distance.
fn view_symmetry(dist: &[String], rev: &[String]) -> Formula {
    let k = dist.len();
    let mut cases = Vec::with_capacity(k);
    for j in 0..k {
        let mut items = Vec::new();
        for l in j + 1..k {
            items.push(eq(var(&dist[l]), Term::Const(0)));
            items.push(eq(var(&rev[l]), Term::Const(0)));
        }
        for l in 0..=j {
            items.push(eq(var(&rev[l]), var(&dist[j - l])));
        }
        cases.push(Formula::conj(items));
    }
    Formula::Or(cases)
}

/// The three guarded move branches for a robot at `pos_i` whose view
/// satisfies `forward` (or whose reverted view satisfies `backward`):
/// clockwise with wraparound, anticlockwise with wraparound, or stay.
fn move_branches(forward: Formula, backward: Formula, pos_i: &str, target: &str, y: &str) -> Formula {
    let y_minus_1 = Term::sub(var(y), Term::Const(1));
    let clockwise = Formula::And(vec![
        forward.clone(),
        Formula::Or(vec![
            Formula::And(vec![
                Formula::Cmp(var(pos_i), CmpOp::Lt, y_minus_1.clone()),
                eq(var(target), Term::add(var(pos_i), Term::Const(1))),
            ]),
            Formula::And(vec![
                Formula::Cmp(var(pos_i), CmpOp::Eq, y_minus_1.clone()),
                eq(var(target), Term::Const(0)),
            ]),
        ]),
    ]);
    let anticlockwise = Formula::And(vec![
        backward.clone(),
        Formula::Or(vec![
            Formula::And(vec![
                Formula::Cmp(var(pos_i), CmpOp::Gt, Term::Const(0)),
                eq(var(target), Term::sub(var(pos_i), Term::Const(1))),
            ]),
            Formula::And(vec![
                Formula::Cmp(var(pos_i), CmpOp::Eq, Term::Const(0)),
                eq(var(target), y_minus_1),
            ]),
        ]),
    ]);
    let stay = Formula::And(vec![
        negated(&forward),
        negated(&backward),
        eq(var(target), var(pos_i)),
    ]);
    Formula::Or(vec![clockwise, anticlockwise, stay])
}

/// Move of one robot driven by the view it perceives in the current
/// configuration.
/// `group` holds a view on a ring of size `y`: distances in `[0, y]`
/// summing to `y`, the first one positive. Implied for the tuples the
/// step formulae quantify over, but stating it keeps the search space
/// of bounded evaluation at the actual views.
fn view_domain(group: &[String], y: &str) -> Vec<Formula> {
    let mut items = vec![Formula::Cmp(Term::Const(0), CmpOp::Lt, var(&group[0]))];
    for d in group {
        items.push(Formula::Cmp(var(d), CmpOp::Le, var(y)));
    }
    items.push(eq(Term::sum(group.iter().map(|d| var(d))), var(y)));
    items
}

fn move_of_robot(
    phi: &ProtocolSpec,
    robot: usize,
    pos: &[String],
    target: &str,
    y: &str,
    namer: &mut FreshNames,
) -> Formula {
    let k = pos.len();
    let dist = namer.fresh_block(k);
    let rev = namer.fresh_block(k);
    let mut items = view_domain(&dist, y);
    items.push(view_of_config(robot, pos, &dist, y, namer));
    // The reversal constraints matter: without them the symmetry
    // disjunct for a too-large last-nonzero index also accepts a
    // zero-led rotation of a tower view as its "reversal", and the
    // stay branch can then fire although the true reversal satisfies
    // the protocol.
    items.extend(view_domain(&rev, y));
    items.push(view_symmetry(&dist, &rev));
    items.push(move_branches(
        protocol_on(phi, &dist),
        protocol_on(phi, &rev),
        &pos[robot],
        target,
        y,
    ));
    let body = Formula::And(items);
    let mut bound = dist;
    bound.extend(rev);
    Formula::exists_all(&bound, body)
}

/// Move of one robot driven by an already-known view, stored in the
/// `view` variables. Used by the asynchronous encoding, where the
/// stored view rather than the current configuration commands the
/// move.
fn move_from_view(
    phi: &ProtocolSpec,
    view: &[String],
    pos_i: &str,
    target: &str,
    y: &str,
    namer: &mut FreshNames,
) -> Formula {
    let rev = namer.fresh_block(view.len());
    let mut items = view_domain(&rev, y);
    items.push(view_symmetry(view, &rev));
    items.push(move_branches(
        protocol_on(phi, view),
        protocol_on(phi, &rev),
        pos_i,
        target,
        y,
    ));
    Formula::exists_all(&rev, Formula::And(items))
}

fn check_robot_count(k: usize) -> Result<(), EncodingError> {
    if k < 2 {
        return Err(EncodingError::TooFewRobots(k));
    }
    Ok(())
}

/// Formula over `{y, p1..pk, d1..dk}` satisfied exactly when the `d`
/// variables hold the clockwise view of `robot` in the configuration
/// `p` on a ring of size `y`.
pub fn config_view_formula(robot: usize, k: usize) -> Result<Formula, EncodingError> {
    check_robot_count(k)?;
    if robot >= k {
        return Err(EncodingError::RobotOutOfRange { robot, robot_count: k });
    }
    let names = VarNames::new(k);
    let mut namer = FreshNames::new();
    Ok(view_of_config(
        robot,
        &names.positions(),
        &names.distances(),
        &names.ring(),
        &mut namer,
    ))
}

/// Formula over `{d1..dk, dp1..dpk}` satisfied exactly when `dp` is
/// the reversal of the view `d`.
pub fn view_sym_formula(k: usize) -> Result<Formula, EncodingError> {
    check_robot_count(k)?;
    let names = VarNames::new(k);
    Ok(view_symmetry(&names.distances(), &names.distances_primed()))
}

/// Formula over `{y, p1..pk, pp}` satisfied exactly when `pp` is a
/// position the given robot may occupy after one completed cycle.
pub fn move_formula(phi: &ProtocolSpec, robot: usize) -> Result<Formula, EncodingError> {
    let k = phi.robot_count();
    check_robot_count(k)?;
    if robot >= k {
        return Err(EncodingError::RobotOutOfRange { robot, robot_count: k });
    }
    let names = VarNames::new(k);
    let mut namer = FreshNames::new();
    Ok(move_of_robot(
        phi,
        robot,
        &names.positions(),
        "pp",
        &names.ring(),
        &mut namer,
    ))
}

/// One-step successor formula over `{y, p1..pk, pp1..ppk}` for the
/// synchronous and semi-synchronous modes.
///
/// In the synchronous mode every robot takes a move step. In the
/// semi-synchronous one at least one robot completes a cycle and the
/// others either do too or keep their position, which mirrors the
/// relation up to one detail: the all-idle step exists in the
/// relation for every configuration, while the formula admits it only
/// when some robot's decision is to stay.
pub fn post_formula(phi: &ProtocolSpec, mode: Mode) -> Result<Formula, EncodingError> {
    let mut namer = FreshNames::new();
    post_formula_with(phi, mode, &mut namer)
}

fn post_formula_with(
    phi: &ProtocolSpec,
    mode: Mode,
    namer: &mut FreshNames,
) -> Result<Formula, EncodingError> {
    let k = phi.robot_count();
    check_robot_count(k)?;
    let names = VarNames::new(k);
    let pos = names.positions();
    let y = names.ring();
    match mode {
        Mode::Sync => {
            let moves = (0..k)
                .map(|i| move_of_robot(phi, i, &pos, &names.position_primed(i), &y, namer))
                .collect();
            Ok(Formula::And(moves))
        }
        Mode::SemiSync => {
            let mut cases = Vec::with_capacity(k);
            for i in 0..k {
                let mut items = vec![move_of_robot(
                    phi,
                    i,
                    &pos,
                    &names.position_primed(i),
                    &y,
                    namer,
                )];
                for j in 0..k {
                    if j == i {
                        continue;
                    }
                    items.push(Formula::Or(vec![
                        eq(var(&names.position_primed(j)), var(&names.position(j))),
                        move_of_robot(phi, j, &pos, &names.position_primed(j), &y, namer),
                    ]));
                }
                cases.push(Formula::And(items));
            }
            Ok(Formula::Or(cases))
        }
        Mode::Async => Err(EncodingError::AsyncStepFormula),
    }
}

/// One-step successor formula for the asynchronous mode, over the
/// ring size, positions, phases (0 = ready to look, 1 = ready to
/// move) and per-robot stored views, all in current and primed
/// copies.
///
/// One robot flips phase: a look step records the current view into
/// the robot's primed stored slot, a move step applies the protocol
/// to the stored view. Stored slots of robots in the look phase are
/// pinned to the placeholder view on the current side; the primed
/// side then stays canonical by construction.
pub fn async_post_formula(phi: &ProtocolSpec) -> Result<Formula, EncodingError> {
    let k = phi.robot_count();
    check_robot_count(k)?;
    let names = VarNames::new(k);
    let y = names.ring();
    let mut namer = FreshNames::new();

    let mut items = Vec::new();
    // Phases are bits and look-phase stored slots are placeholders.
    for i in 0..k {
        items.push(Formula::Cmp(var(&names.phase(i)), CmpOp::Le, Term::Const(1)));
        let mut placeholder = vec![eq(var(&names.stored(i, 0)), var(&y))];
        for l in 1..k {
            placeholder.push(eq(var(&names.stored(i, l)), Term::Const(0)));
        }
        items.push(Formula::Or(vec![
            eq(var(&names.phase(i)), Term::Const(1)),
            Formula::And(placeholder),
        ]));
    }

    let mut scheduled = Vec::with_capacity(k);
    for i in 0..k {
        let mut case = Vec::new();
        // Everyone else is frozen.
        for j in 0..k {
            if j == i {
                continue;
            }
            case.push(eq(var(&names.position_primed(j)), var(&names.position(j))));
            case.push(eq(var(&names.phase_primed(j)), var(&names.phase(j))));
            for l in 0..k {
                case.push(eq(var(&names.stored_primed(j, l)), var(&names.stored(j, l))));
            }
        }
        // The scheduled robot flips phase.
        case.push(eq(
            var(&names.phase_primed(i)),
            Term::sub(Term::Const(1), var(&names.phase(i))),
        ));

        // Look step: record the current view, keep the position.
        let dist = namer.fresh_block(k);
        let mut look = vec![eq(var(&names.phase(i)), Term::Const(0))];
        look.push(eq(var(&names.position_primed(i)), var(&names.position(i))));
        let mut copied = view_domain(&dist, &y);
        for (l, d) in dist.iter().enumerate() {
            copied.push(eq(var(&names.stored_primed(i, l)), var(d)));
        }
        copied.push(view_of_config(i, &names.positions(), &dist, &y, &mut namer));
        look.push(Formula::exists_all(&dist, Formula::And(copied)));

        // Move step: the stored view commands the move and the slot
        // resets to the placeholder.
        let stored: Vec<String> = (0..k).map(|l| names.stored(i, l)).collect();
        let mut mov = vec![eq(var(&names.phase(i)), Term::Const(1))];
        mov.push(eq(var(&names.stored_primed(i, 0)), var(&y)));
        for l in 1..k {
            mov.push(eq(var(&names.stored_primed(i, l)), Term::Const(0)));
        }
        mov.push(move_from_view(
            phi,
            &stored,
            &names.position(i),
            &names.position_primed(i),
            &y,
            &mut namer,
        ));

        case.push(Formula::Or(vec![Formula::And(look), Formula::And(mov)]));
        scheduled.push(Formula::And(case));
    }
    items.push(Formula::Or(scheduled));
    Ok(Formula::And(items))
}

fn domain_constraints(names: &VarNames, primed: bool) -> Vec<Formula> {
    let k = names.robot_count();
    let y = names.ring();
    let mut items = vec![Formula::Cmp(var(&y), CmpOp::Ge, Term::Const(k as u64))];
    for i in 0..k {
        items.push(Formula::Cmp(var(&names.position(i)), CmpOp::Lt, var(&y)));
    }
    if primed {
        for i in 0..k {
            items.push(Formula::Cmp(var(&names.position_primed(i)), CmpOp::Lt, var(&y)));
        }
    }
    items
}

fn check_bad_convention(bad: &Formula, k: usize) -> Result<(), EncodingError> {
    if !bad.is_quantifier_free() {
        return Err(EncodingError::MalformedConvention(
            "the bad-set formula must be quantifier-free (it gets negated)".to_string(),
        ));
    }
    for name in bad.free_vars() {
        match parse_distance_var(&name) {
            Some(index) if index <= k => {}
            _ => {
                return Err(EncodingError::MalformedConvention(format!(
                    "bad-set formula mentions `{name}`; expected x1..x{k}"
                )));
            }
        }
    }
    Ok(())
}

fn check_ring_convention(ring: &Formula) -> Result<(), EncodingError> {
    let free = ring.free_vars();
    if free.len() != 1 || !free.contains("y") {
        return Err(EncodingError::MalformedConvention(format!(
            "ring formula must have exactly the free variable y, found {{{}}}",
            free.into_iter().collect::<Vec<_>>().join(", ")
        )));
    }
    Ok(())
}

fn bad_on_positions(bad: &Formula, names: &VarNames, primed: bool) -> Formula {
    let k = names.robot_count();
    let map = (0..k)
        .map(|i| {
            let target = if primed { names.position_primed(i) } else { names.position(i) };
            (format!("x{}", i + 1), var(&target))
        })
        .collect();
    bad.substitute(&map)
        .expect("bad-set formulae are quantifier-free")
}

/// The safety question as a satisfiability query: some admissible
/// ring size carries a configuration outside the bad set with a
/// one-step successor inside it. A model is a ready-made
/// counterexample.
pub fn safety_query(
    phi: &ProtocolSpec,
    ring: &Formula,
    bad: &Formula,
    mode: Mode,
) -> Result<VerificationQuery, EncodingError> {
    let k = phi.robot_count();
    check_robot_count(k)?;
    check_ring_convention(ring)?;
    check_bad_convention(bad, k)?;
    let step_mode = match mode {
        Mode::Sync | Mode::SemiSync => mode,
        Mode::Async => return Err(EncodingError::AsyncStepFormula),
    };

    let names = VarNames::new(k);
    let mut namer = FreshNames::new();
    let post = post_formula_with(phi, step_mode, &mut namer)?;
    let ring_fresh = ring.rename_bound(&mut namer);
    let not_bad_now = negated(&bad_on_positions(bad, &names, false));
    let bad_next = bad_on_positions(bad, &names, true);

    let mut items = vec![post, ring_fresh, not_bad_now, bad_next];
    items.extend(domain_constraints(&names, true));

    let mut roles = vec![(names.ring(), VarRole::RingSize)];
    for i in 0..k {
        roles.push((names.position(i), VarRole::Position(i)));
    }
    for i in 0..k {
        roles.push((names.position_primed(i), VarRole::PrimedPosition(i)));
    }

    VerificationQuery::new(
        QueryPurpose::Safety,
        k,
        Formula::And(items),
        roles,
        Some(SafetyContext {
            protocol: phi.clone(),
            ring: ring.clone(),
            bad: bad.clone(),
            step_mode,
        }),
    )
    .map_err(EncodingError::MalformedConvention)
}

/// The protocol well-formedness question as a satisfiability query:
/// a model is a view that satisfies the protocol together with its
/// distinct reversal, i.e. a pair of contradictory move orders. An
/// unsatisfiable query certifies the protocol for every ring size.
pub fn validity_query(phi: &ProtocolSpec) -> Result<VerificationQuery, EncodingError> {
    let k = phi.robot_count();
    check_robot_count(k)?;
    let names = VarNames::new(k);
    let y = names.ring();
    let dist = names.distances();
    let rev = names.distances_primed();

    let mut items = vec![Formula::Cmp(var(&y), CmpOp::Ge, Term::Const(k as u64))];
    for group in [&dist, &rev] {
        items.push(Formula::Cmp(var(&group[0]), CmpOp::Ge, Term::Const(1)));
        for d in group.iter() {
            items.push(Formula::Cmp(var(d), CmpOp::Le, var(&y)));
        }
        items.push(eq(
            Term::sum(group.iter().map(|d| var(d))),
            var(&y),
        ));
    }
    items.push(view_symmetry(&dist, &rev));
    items.push(Formula::Or(
        (0..k)
            .map(|i| Formula::Cmp(var(&dist[i]), CmpOp::Ne, var(&rev[i])))
            .collect(),
    ));
    items.push(protocol_on(phi, &dist));
    items.push(protocol_on(phi, &rev));

    let mut roles = vec![(y, VarRole::RingSize)];
    for i in 0..k {
        roles.push((names.distance(i), VarRole::ViewDistance(i)));
    }
    for i in 0..k {
        roles.push((names.distance_primed(i), VarRole::RevertedViewDistance(i)));
    }

    VerificationQuery::new(QueryPurpose::Validity, k, Formula::And(items), roles, None)
        .map_err(EncodingError::MalformedConvention)
}

/// The unique-sequentializability question as a satisfiability query:
/// a model is a configuration in which two distinct robots both take
/// a strict move. An unsatisfiable query certifies that at most one
/// robot ever moves, which collapses the three scheduling modes.
pub fn uniqseq_query(phi: &ProtocolSpec) -> Result<VerificationQuery, EncodingError> {
    let k = phi.robot_count();
    check_robot_count(k)?;
    let names = VarNames::new(k);
    let y = names.ring();
    let pos = names.positions();
    let mut namer = FreshNames::new();

    let mut pairs = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            pairs.push(Formula::And(vec![
                move_of_robot(phi, i, &pos, &names.position_primed(i), &y, &mut namer),
                move_of_robot(phi, j, &pos, &names.position_primed(j), &y, &mut namer),
                Formula::Cmp(var(&names.position_primed(i)), CmpOp::Ne, var(&names.position(i))),
                Formula::Cmp(var(&names.position_primed(j)), CmpOp::Ne, var(&names.position(j))),
            ]));
        }
    }

    let mut items = domain_constraints(&names, true);
    items.push(Formula::disj(pairs));

    let mut roles = vec![(y, VarRole::RingSize)];
    for i in 0..k {
        roles.push((names.position(i), VarRole::Position(i)));
    }
    for i in 0..k {
        roles.push((names.position_primed(i), VarRole::PrimedPosition(i)));
    }

    VerificationQuery::new(QueryPurpose::UniqSeq, k, Formula::And(items), roles, None)
        .map_err(EncodingError::MalformedConvention)
}
