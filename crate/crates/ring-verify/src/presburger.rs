//! Terms and formulae of (extended) linear integer arithmetic.
//!
//! Every other module speaks this AST: robot protocols, ring
//! properties and bad-set descriptions are parsed into it, the
//! step-relation encodings are built from it, and the SMT-LIB
//! serialization walks it. Terms evaluate over the integers
//! (subtraction may pass through negative intermediate values) while
//! variable valuations range over the naturals.

mod eval;
mod parse;
mod smtlib;

pub use eval::{eval, EvalError, Evaluator};
pub use parse::{parse_formula, ParseError};
pub use smtlib::to_smtlib;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// A binding of variable names to natural numbers.
pub type Valuation = BTreeMap<String, u64>;

/// Arithmetic term. `ModConst` always has a positive modulus and
/// follows the nonnegative-remainder convention, so `-1 mod 3 = 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Const(u64),
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    ScalarMul(u64, Box<Term>),
    ModConst(Box<Term>, u64),
}

#[allow(clippy::should_implement_trait)]
impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn add(left: Term, right: Term) -> Term {
        Term::Add(Box::new(left), Box::new(right))
    }

    pub fn sub(left: Term, right: Term) -> Term {
        Term::Sub(Box::new(left), Box::new(right))
    }

    pub fn scalar_mul(coefficient: u64, operand: Term) -> Term {
        Term::ScalarMul(coefficient, Box::new(operand))
    }

    /// Panics if `modulus` is zero; the AST never holds one.
    pub fn mod_const(operand: Term, modulus: u64) -> Term {
        assert!(modulus >= 1, "modulus must be positive");
        Term::ModConst(Box::new(operand), modulus)
    }

    /// Sum of a nonempty sequence of terms, left associated.
    pub fn sum(terms: impl IntoIterator<Item = Term>) -> Term {
        let mut it = terms.into_iter();
        let first = it.next().expect("sum of no terms");
        it.fold(first, Term::add)
    }

    fn collect_vars<'t>(&'t self, out: &mut BTreeSet<&'t str>) {
        match self {
            Term::Var(name) => {
                out.insert(name);
            }
            Term::Const(_) => {}
            Term::Add(l, r) | Term::Sub(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            Term::ScalarMul(_, t) | Term::ModConst(t, _) => t.collect_vars(out),
        }
    }
}

/// Comparison operators between terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Le,
    Ge,
    Lt,
    Gt,
    Ne,
}

impl CmpOp {
    /// The operator expressing the negation of `self`.
    pub fn negated(self) -> CmpOp {
        match self {
            CmpOp::Eq => CmpOp::Ne,
            CmpOp::Ne => CmpOp::Eq,
            CmpOp::Le => CmpOp::Gt,
            CmpOp::Gt => CmpOp::Le,
            CmpOp::Ge => CmpOp::Lt,
            CmpOp::Lt => CmpOp::Ge,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Le => "<=",
            CmpOp::Ge => ">=",
            CmpOp::Lt => "<",
            CmpOp::Gt => ">",
            CmpOp::Ne => "!=",
        }
    }
}

/// Formula over terms. `And`/`Or` are n-ary; `Not` is only ever
/// applied to quantifier-free subformulae; `Exists` binds one
/// variable ranging over the naturals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Cmp(Term, CmpOp, Term),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Not(Box<Formula>),
    Exists(String, Box<Formula>),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SubstError {
    #[error("cannot substitute bound variable `{0}`")]
    BoundVariable(String),
    #[error("substituting `{var}` would capture it under binder `{binder}`")]
    WouldCapture { var: String, binder: String },
}

impl Formula {
    pub fn cmp(left: Term, op: CmpOp, right: Term) -> Formula {
        Formula::Cmp(left, op, right)
    }

    /// `0 = 0`, the canonical trivially true atom.
    pub fn trivially_true() -> Formula {
        Formula::Cmp(Term::Const(0), CmpOp::Eq, Term::Const(0))
    }

    /// `0 != 0`, the canonical trivially false atom.
    pub fn trivially_false() -> Formula {
        Formula::Cmp(Term::Const(0), CmpOp::Ne, Term::Const(0))
    }

    /// N-ary conjunction that collapses the degenerate arities.
    pub fn conj(items: Vec<Formula>) -> Formula {
        match items.len() {
            0 => Formula::trivially_true(),
            1 => items.into_iter().next().unwrap(),
            _ => Formula::And(items),
        }
    }

    /// N-ary disjunction that collapses the degenerate arities.
    pub fn disj(items: Vec<Formula>) -> Formula {
        match items.len() {
            0 => Formula::trivially_false(),
            1 => items.into_iter().next().unwrap(),
            _ => Formula::Or(items),
        }
    }

    pub fn exists(var: impl Into<String>, body: Formula) -> Formula {
        Formula::Exists(var.into(), Box::new(body))
    }

    /// Wraps `body` in one `Exists` per name, innermost name last.
    pub fn exists_all(vars: &[String], body: Formula) -> Formula {
        vars.iter()
            .rev()
            .fold(body, |acc, v| Formula::exists(v.clone(), acc))
    }

    /// True when no `Exists` occurs anywhere in the formula.
    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Cmp(..) => true,
            Formula::And(items) | Formula::Or(items) => {
                items.iter().all(Formula::is_quantifier_free)
            }
            Formula::Not(f) => f.is_quantifier_free(),
            Formula::Exists(..) => false,
        }
    }

    /// The set of variables with a free occurrence.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut free = BTreeSet::new();
        let mut bound = Vec::new();
        self.free_vars_into(&mut bound, &mut free);
        free
    }

    fn free_vars_into(&self, bound: &mut Vec<String>, free: &mut BTreeSet<String>) {
        match self {
            Formula::Cmp(l, _, r) => {
                let mut vars = BTreeSet::new();
                l.collect_vars(&mut vars);
                r.collect_vars(&mut vars);
                for v in vars {
                    if !bound.iter().any(|b| b == v) {
                        free.insert(v.to_string());
                    }
                }
            }
            Formula::And(items) | Formula::Or(items) => {
                for f in items {
                    f.free_vars_into(bound, free);
                }
            }
            Formula::Not(f) => f.free_vars_into(bound, free),
            Formula::Exists(x, body) => {
                bound.push(x.clone());
                body.free_vars_into(bound, free);
                bound.pop();
            }
        }
    }

    /// All variable names bound by some `Exists` in the formula.
    pub fn bound_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.bound_vars_into(&mut out);
        out
    }

    fn bound_vars_into(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Cmp(..) => {}
            Formula::And(items) | Formula::Or(items) => {
                for f in items {
                    f.bound_vars_into(out);
                }
            }
            Formula::Not(f) => f.bound_vars_into(out),
            Formula::Exists(x, body) => {
                out.insert(x.clone());
                body.bound_vars_into(out);
            }
        }
    }

    /// Simultaneous substitution of terms for free variables.
    ///
    /// The domain of `map` must not mention any bound variable, and no
    /// term in its range may mention one either (both would silently
    /// change meaning, so they are hard errors).
    pub fn substitute(&self, map: &BTreeMap<String, Term>) -> Result<Formula, SubstError> {
        let bound = self.bound_vars();
        for key in map.keys() {
            if bound.contains(key) {
                return Err(SubstError::BoundVariable(key.clone()));
            }
        }
        for term in map.values() {
            let mut vars = BTreeSet::new();
            term.collect_vars(&mut vars);
            for v in vars {
                if bound.contains(v) {
                    return Err(SubstError::WouldCapture {
                        var: v.to_string(),
                        binder: v.to_string(),
                    });
                }
            }
        }
        Ok(self.substitute_unchecked(map))
    }

    fn substitute_unchecked(&self, map: &BTreeMap<String, Term>) -> Formula {
        match self {
            Formula::Cmp(l, op, r) => {
                Formula::Cmp(substitute_term(l, map), *op, substitute_term(r, map))
            }
            Formula::And(items) => {
                Formula::And(items.iter().map(|f| f.substitute_unchecked(map)).collect())
            }
            Formula::Or(items) => {
                Formula::Or(items.iter().map(|f| f.substitute_unchecked(map)).collect())
            }
            Formula::Not(f) => Formula::Not(Box::new(f.substitute_unchecked(map))),
            Formula::Exists(x, body) => {
                // Bound names are disjoint from the map by the check above.
                Formula::Exists(x.clone(), Box::new(body.substitute_unchecked(map)))
            }
        }
    }

    /// Negation of a quantifier-free formula, pushed down to the
    /// comparison atoms. Returns `None` if an `Exists` is found.
    pub fn negated_qf(&self) -> Option<Formula> {
        match self {
            Formula::Cmp(l, op, r) => Some(Formula::Cmp(l.clone(), op.negated(), r.clone())),
            Formula::And(items) => {
                let negated: Option<Vec<_>> = items.iter().map(Formula::negated_qf).collect();
                Some(Formula::Or(negated?))
            }
            Formula::Or(items) => {
                let negated: Option<Vec<_>> = items.iter().map(Formula::negated_qf).collect();
                Some(Formula::And(negated?))
            }
            Formula::Not(f) => {
                if f.is_quantifier_free() {
                    Some((**f).clone())
                } else {
                    None
                }
            }
            Formula::Exists(..) => None,
        }
    }

    /// Renames every bound variable to a fresh name drawn from
    /// `namer`. Free occurrences are untouched.
    pub fn rename_bound(&self, namer: &mut FreshNames) -> Formula {
        let mut scope: Vec<(String, String)> = Vec::new();
        self.rename_bound_rec(namer, &mut scope)
    }

    fn rename_bound_rec(
        &self,
        namer: &mut FreshNames,
        scope: &mut Vec<(String, String)>,
    ) -> Formula {
        match self {
            Formula::Cmp(l, op, r) => {
                Formula::Cmp(rename_term(l, scope), *op, rename_term(r, scope))
            }
            Formula::And(items) => Formula::And(
                items
                    .iter()
                    .map(|f| f.rename_bound_rec(namer, scope))
                    .collect(),
            ),
            Formula::Or(items) => Formula::Or(
                items
                    .iter()
                    .map(|f| f.rename_bound_rec(namer, scope))
                    .collect(),
            ),
            Formula::Not(f) => Formula::Not(Box::new(f.rename_bound_rec(namer, scope))),
            Formula::Exists(x, body) => {
                let fresh = namer.fresh();
                scope.push((x.clone(), fresh.clone()));
                let body = body.rename_bound_rec(namer, scope);
                scope.pop();
                Formula::Exists(fresh, Box::new(body))
            }
        }
    }
}

fn substitute_term(term: &Term, map: &BTreeMap<String, Term>) -> Term {
    match term {
        Term::Var(name) => map.get(name).cloned().unwrap_or_else(|| term.clone()),
        Term::Const(_) => term.clone(),
        Term::Add(l, r) => Term::add(substitute_term(l, map), substitute_term(r, map)),
        Term::Sub(l, r) => Term::sub(substitute_term(l, map), substitute_term(r, map)),
        Term::ScalarMul(c, t) => Term::ScalarMul(*c, Box::new(substitute_term(t, map))),
        Term::ModConst(t, m) => Term::ModConst(Box::new(substitute_term(t, map)), *m),
    }
}

fn rename_term(term: &Term, scope: &[(String, String)]) -> Term {
    match term {
        Term::Var(name) => {
            for (old, new) in scope.iter().rev() {
                if old == name {
                    return Term::Var(new.clone());
                }
            }
            term.clone()
        }
        Term::Const(_) => term.clone(),
        Term::Add(l, r) => Term::add(rename_term(l, scope), rename_term(r, scope)),
        Term::Sub(l, r) => Term::sub(rename_term(l, scope), rename_term(r, scope)),
        Term::ScalarMul(c, t) => Term::ScalarMul(*c, Box::new(rename_term(t, scope))),
        Term::ModConst(t, m) => Term::ModConst(Box::new(rename_term(t, scope)), *m),
    }
}

/// Allocator for quantifier names in generated formulae. The leading
/// underscore keeps them outside the surface grammar, so they can
/// never collide with a variable written by a user.
#[derive(Debug, Default)]
pub struct FreshNames {
    next: u64,
}

impl FreshNames {
    pub fn new() -> FreshNames {
        FreshNames { next: 0 }
    }

    pub fn fresh(&mut self) -> String {
        self.next += 1;
        format!("_b{}", self.next)
    }

    /// A block of `count` fresh names.
    pub fn fresh_block(&mut self, count: usize) -> Vec<String> {
        (0..count).map(|_| self.fresh()).collect()
    }
}

// Pretty-printing follows the surface grammar so that parsing the
// output of `Display` yields a structurally equal formula.

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(name) => write!(f, "{name}"),
            Term::Const(value) => write!(f, "{value}"),
            Term::Add(l, r) => {
                write!(f, "{l} + ")?;
                fmt_mterm(r, f)
            }
            Term::Sub(l, r) => {
                write!(f, "{l} - ")?;
                fmt_mterm(r, f)
            }
            Term::ScalarMul(c, t) => {
                write!(f, "{c} * ")?;
                fmt_factor(t, f)
            }
            Term::ModConst(t, m) => {
                fmt_factor(t, f)?;
                write!(f, " mod {m}")
            }
        }
    }
}

fn fmt_mterm(term: &Term, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if matches!(term, Term::Add(..) | Term::Sub(..)) {
        write!(f, "({term})")
    } else {
        write!(f, "{term}")
    }
}

fn fmt_factor(term: &Term, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if matches!(term, Term::Var(_) | Term::Const(_) | Term::ScalarMul(..)) {
        write!(f, "{term}")
    } else {
        write!(f, "({term})")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Or(items) => {
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, " or ")?;
                    }
                    fmt_conj_level(item, f)?;
                }
                Ok(())
            }
            _ => fmt_conj_level(self, f),
        }
    }
}

fn fmt_conj_level(formula: &Formula, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match formula {
        Formula::Or(_) => write!(f, "({formula})"),
        Formula::And(items) => {
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    write!(f, " and ")?;
                }
                fmt_unary_level(item, f)?;
            }
            Ok(())
        }
        _ => fmt_unary_level(formula, f),
    }
}

fn fmt_unary_level(formula: &Formula, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match formula {
        Formula::And(_) | Formula::Or(_) => write!(f, "({formula})"),
        Formula::Not(inner) => {
            write!(f, "not ")?;
            fmt_unary_level(inner, f)
        }
        Formula::Exists(x, body) => {
            write!(f, "exists {x} . ")?;
            fmt_unary_level(body, f)
        }
        Formula::Cmp(l, op, r) => write!(f, "{l} {} {r}", op.symbol()),
    }
}
