//! Serialization of formulae as SMT-LIB 2 terms.
//!
//! The logic is integer arithmetic, so every natural-number variable
//! needs an explicit nonnegativity constraint. Bound variables get it
//! conjoined inside their quantifier; free variables listed in
//! `nonneg_vars` get it conjoined at the top of the emitted term
//! (callers that assert nonnegativity separately pass an empty set).

use std::collections::BTreeSet;

use super::{CmpOp, Formula, Term};

pub fn to_smtlib(formula: &Formula, nonneg_vars: &BTreeSet<String>) -> String {
    let body = formula_sexp(formula);
    if nonneg_vars.is_empty() {
        return body;
    }
    let mut out = String::from("(and");
    for var in nonneg_vars {
        out.push_str(&format!(" (>= {var} 0)"));
    }
    out.push(' ');
    out.push_str(&body);
    out.push(')');
    out
}

fn formula_sexp(formula: &Formula) -> String {
    match formula {
        Formula::Cmp(l, op, r) => {
            let (l, r) = (term_sexp(l), term_sexp(r));
            match op {
                CmpOp::Eq => format!("(= {l} {r})"),
                CmpOp::Ne => format!("(not (= {l} {r}))"),
                CmpOp::Le => format!("(<= {l} {r})"),
                CmpOp::Lt => format!("(< {l} {r})"),
                CmpOp::Ge => format!("(>= {l} {r})"),
                CmpOp::Gt => format!("(> {l} {r})"),
            }
        }
        Formula::And(items) => nary("and", "true", items),
        Formula::Or(items) => nary("or", "false", items),
        Formula::Not(f) => format!("(not {})", formula_sexp(f)),
        Formula::Exists(x, body) => format!(
            "(exists (({x} Int)) (and (>= {x} 0) {}))",
            formula_sexp(body)
        ),
    }
}

fn nary(op: &str, empty: &str, items: &[Formula]) -> String {
    match items.len() {
        0 => empty.to_string(),
        1 => formula_sexp(&items[0]),
        _ => {
            let mut out = format!("({op}");
            for item in items {
                out.push(' ');
                out.push_str(&formula_sexp(item));
            }
            out.push(')');
            out
        }
    }
}

fn term_sexp(term: &Term) -> String {
    match term {
        Term::Var(name) => name.clone(),
        Term::Const(value) => value.to_string(),
        Term::Add(l, r) => format!("(+ {} {})", term_sexp(l), term_sexp(r)),
        Term::Sub(l, r) => format!("(- {} {})", term_sexp(l), term_sexp(r)),
        Term::ScalarMul(c, t) => format!("(* {c} {})", term_sexp(t)),
        Term::ModConst(t, m) => format!("(mod {} {m})", term_sexp(t)),
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse_formula;
    use super::*;

    fn none() -> BTreeSet<String> {
        BTreeSet::new()
    }

    #[test]
    fn plain_comparison() {
        let f = parse_formula("y > 6").unwrap();
        assert_eq!(to_smtlib(&f, &none()), "(> y 6)");
    }

    #[test]
    fn bound_variable_carries_nonnegativity() {
        let f = parse_formula("exists q . d1 = 2*q").unwrap();
        assert_eq!(
            to_smtlib(&f, &none()),
            "(exists ((q Int)) (and (>= q 0) (= d1 (* 2 q))))"
        );
    }

    #[test]
    fn negation_and_disequality() {
        let f = parse_formula("not d1 > d2").unwrap();
        assert_eq!(to_smtlib(&f, &none()), "(not (> d1 d2))");
        let f = parse_formula("d1 != d2").unwrap();
        assert_eq!(to_smtlib(&f, &none()), "(not (= d1 d2))");
    }

    #[test]
    fn requested_free_variables_are_constrained() {
        let f = parse_formula("y > 6").unwrap();
        let vars = BTreeSet::from(["y".to_string()]);
        assert_eq!(to_smtlib(&f, &vars), "(and (>= y 0) (> y 6))");
    }

    #[test]
    fn modulus_uses_solver_operator() {
        let f = parse_formula("x mod 3 = 2").unwrap();
        assert_eq!(to_smtlib(&f, &none()), "(= (mod x 3) 2)");
    }
}
