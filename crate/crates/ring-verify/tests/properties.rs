//! Property tests for the spec-level invariants: parse/print
//! round-trips, substitution soundness, bounded-evaluation laws, and
//! the view algebra.

mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;

use ring_verify::presburger::{eval, parse_formula, CmpOp, Formula, Term, Valuation};
use ring_verify::ringmodel::{view_clockwise, Configuration, View};

fn term_strategy() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        prop_oneof![Just("a"), Just("b"), Just("c")].prop_map(Term::var),
        (0u64..50).prop_map(Term::Const),
    ];
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Term::add(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Term::sub(l, r)),
            (1u64..5, inner.clone()).prop_map(|(c, t)| Term::scalar_mul(c, t)),
            (inner, 1u64..7).prop_map(|(t, m)| Term::mod_const(t, m)),
        ]
    })
}

fn cmp_strategy() -> impl Strategy<Value = CmpOp> {
    prop_oneof![
        Just(CmpOp::Eq),
        Just(CmpOp::Le),
        Just(CmpOp::Ge),
        Just(CmpOp::Lt),
        Just(CmpOp::Gt),
        Just(CmpOp::Ne),
    ]
}

fn qf_strategy() -> impl Strategy<Value = Formula> {
    let atom = (term_strategy(), cmp_strategy(), term_strategy())
        .prop_map(|(l, op, r)| Formula::Cmp(l, op, r));
    atom.prop_recursive(3, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(Formula::And),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Formula::Or),
            inner.prop_map(|f| Formula::Not(Box::new(f))),
        ]
    })
}

/// Quantified formulae on top of quantifier-free cores; `Not` stays
/// below every `Exists`, as in everything the tool builds. The
/// binder usually captures the occurrences of `a` in its body.
fn formula_strategy() -> impl Strategy<Value = Formula> {
    qf_strategy().prop_recursive(3, 16, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..3).prop_map(Formula::And),
            prop::collection::vec(inner.clone(), 2..3).prop_map(Formula::Or),
            inner.prop_map(|f| {
                let body = f
                    .substitute(&BTreeMap::from([("a".to_string(), Term::var("q"))]))
                    .unwrap_or(f);
                Formula::exists("q", body)
            }),
        ]
    })
}

/// Renames binders apart with grammar-compatible names so the printed
/// form parses back to the very same tree.
fn separate_binders(f: &Formula, next: &mut u32) -> Formula {
    match f {
        Formula::Cmp(..) => f.clone(),
        Formula::And(items) => {
            Formula::And(items.iter().map(|i| separate_binders(i, next)).collect())
        }
        Formula::Or(items) => {
            Formula::Or(items.iter().map(|i| separate_binders(i, next)).collect())
        }
        Formula::Not(inner) => Formula::Not(Box::new(separate_binders(inner, next))),
        Formula::Exists(old, body) => {
            *next += 1;
            let fresh = format!("q{next}");
            // Inner binders are renamed first, so in the processed
            // body every occurrence of `old` is free and belongs to
            // this binder.
            let body = separate_binders(body, next);
            let body = body
                .substitute(&BTreeMap::from([(old.clone(), Term::var(fresh.clone()))]))
                .expect("inner binders were renamed away");
            Formula::Exists(fresh, Box::new(body))
        }
    }
}

fn small_valuation() -> impl Strategy<Value = Valuation> {
    (0u64..20, 0u64..20, 0u64..20).prop_map(|(a, b, c)| {
        Valuation::from([
            ("a".to_string(), a),
            ("b".to_string(), b),
            ("c".to_string(), c),
        ])
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn parse_print_round_trip(f in formula_strategy()) {
        let mut next = 0;
        let f = separate_binders(&f, &mut next);
        let printed = f.to_string();
        let reparsed = parse_formula(&printed)
            .unwrap_or_else(|e| panic!("reparse of `{printed}`: {e}"));
        prop_assert_eq!(reparsed, f);
    }

    #[test]
    fn substitution_soundness(f in qf_strategy(), v in small_valuation(), c in 0u64..20) {
        // eval(f[a := c], v \ a) agrees with eval(f, v[a := c]).
        let mut without_a = v.clone();
        without_a.remove("a");
        let substituted = f
            .substitute(&BTreeMap::from([("a".to_string(), Term::Const(c))]))
            .unwrap();
        let mut with_a = without_a.clone();
        with_a.insert("a".to_string(), c);
        let lhs = eval(&substituted, &without_a, 5);
        let rhs = eval(&f, &with_a, 5);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn qf_evaluation_ignores_the_bound(f in qf_strategy(), v in small_valuation()) {
        let low = eval(&f, &v, 0);
        let high = eval(&f, &v, 23);
        prop_assert_eq!(low, high);
    }

    #[test]
    fn bounded_eval_is_monotone(f in formula_strategy(), v in small_valuation(), b in 0u64..8) {
        // The generator never negates a quantified subformula, so a
        // witness found under a small bound survives a larger one.
        if eval(&f, &v, b) == Ok(true) {
            prop_assert_eq!(eval(&f, &v, b + 3), Ok(true));
        }
    }

    #[test]
    fn smtlib_emission_is_total(f in formula_strategy()) {
        let mut next = 0;
        let f = separate_binders(&f, &mut next);
        let doc = ring_verify::presburger::to_smtlib(&f, &Default::default());
        prop_assert!(!doc.is_empty());
        // Parentheses stay balanced.
        let mut depth = 0i64;
        for ch in doc.chars() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                _ => {}
            }
            prop_assert!(depth >= 0);
        }
        prop_assert_eq!(depth, 0);
    }
}

fn config_strategy() -> impl Strategy<Value = Configuration> {
    (2usize..=4).prop_flat_map(|k| {
        (k as u64..=9).prop_flat_map(move |n| {
            prop::collection::vec(0..n, k)
                .prop_map(move |p| Configuration::on_ring(n, &p).unwrap())
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn views_sum_to_the_ring_size(c in config_strategy()) {
        for robot in 0..c.robot_count() {
            let view = view_clockwise(&c, robot);
            prop_assert_eq!(view.ring_size(), c.ring_size());
            prop_assert!(view.distances()[0] >= 1);
        }
    }

    #[test]
    fn revert_is_an_involution(c in config_strategy()) {
        for robot in 0..c.robot_count() {
            let view = view_clockwise(&c, robot);
            prop_assert_eq!(view.reverted().reverted(), view);
        }
    }

    #[test]
    fn colocated_robots_share_views(c in config_strategy()) {
        for i in 0..c.robot_count() {
            for j in i + 1..c.robot_count() {
                if c.position(i) == c.position(j) {
                    prop_assert_eq!(view_clockwise(&c, i), view_clockwise(&c, j));
                }
            }
        }
    }

    #[test]
    fn rotation_leaves_views_unchanged(c in config_strategy(), r in 0u64..9) {
        let n = c.ring_size();
        let rotated = Configuration::on_ring(
            n,
            &c.positions().iter().map(|&p| (p + r) % n).collect::<Vec<_>>(),
        )
        .unwrap();
        for robot in 0..c.robot_count() {
            prop_assert_eq!(view_clockwise(&c, robot), view_clockwise(&rotated, robot));
        }
    }

    #[test]
    fn reverted_views_are_views(d in prop::collection::vec(0u64..7, 2..5)) {
        // Any tuple with a positive head reverts to a tuple with a
        // positive head and the same sum.
        prop_assume!(d[0] >= 1);
        let view = View::new(d).unwrap();
        let reverted = view.reverted();
        prop_assert!(reverted.distances()[0] >= 1);
        prop_assert_eq!(reverted.ring_size(), view.ring_size());
    }
}
