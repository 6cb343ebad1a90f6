//! Bounded evaluation of formulae under a valuation.
//!
//! Every `exists` ranges over `[0, bound]`. Quantifier-free formulae
//! are decided exactly and independently of the bound. The evaluator
//! treats a block of nested quantifiers as one backtracking search:
//! conjuncts of the body are checked as soon as all their bound
//! variables have values, which prunes most of the search space, and
//! results of quantified subformulae are memoized per assignment of
//! their free variables. Alpha-equivalent blocks share memo entries,
//! so a formula that instantiates the same schema once per robot pays
//! for it once. Arithmetic is checked 64-bit; overflow is a hard
//! error rather than a wrong answer.

use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use thiserror::Error;

use super::{CmpOp, Formula, Term, Valuation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("arithmetic overflow during evaluation")]
    Overflow,
}

/// One-shot evaluation. For repeated evaluation of the same formula
/// under many valuations, build an [`Evaluator`] and reuse it.
pub fn eval(formula: &Formula, valuation: &Valuation, bound: u64) -> Result<bool, EvalError> {
    Evaluator::new(formula, bound).eval(valuation)
}

/// Memo keys hold the values of a block's free variables inline; a
/// block with more free variables than this is evaluated unmemoized.
const MAX_KEY_VARS: usize = 12;

type Key = (u32, [u64; MAX_KEY_VARS]);

/// Search plan for one maximal block of nested quantifiers: the
/// bound-variable chain, the conjuncts of the body, and for each
/// conjunct the chain depth at which it becomes checkable.
struct Block<'f> {
    node: &'f Formula,
    /// Shared across alpha-equivalent blocks.
    memo_class: u32,
    free: Vec<String>,
    chain: Vec<&'f str>,
    items: Vec<&'f Formula>,
    ready: Vec<usize>,
}

struct Plans<'f> {
    by_node: HashMap<usize, usize>,
    blocks: Vec<Block<'f>>,
}

/// Reusable evaluation context for a fixed formula and quantifier
/// bound.
pub struct Evaluator<'f> {
    root: &'f Formula,
    bound: u64,
    plans: Plans<'f>,
    memo: HashMap<Key, bool>,
}

struct Scope<'v> {
    base: HashMap<&'v str, u64>,
    locals: Vec<(&'v str, u64)>,
}

impl Scope<'_> {
    fn lookup(&self, name: &str) -> Option<u64> {
        for (n, v) in self.locals.iter().rev() {
            if *n == name {
                return Some(*v);
            }
        }
        self.base.get(name).copied()
    }
}

impl<'f> Evaluator<'f> {
    pub fn new(formula: &'f Formula, bound: u64) -> Evaluator<'f> {
        let mut plans = Plans { by_node: HashMap::new(), blocks: Vec::new() };
        let mut classes: HashMap<u64, Vec<usize>> = HashMap::new();
        collect_blocks(formula, &mut plans, &mut classes);
        Evaluator { root: formula, bound, plans, memo: HashMap::new() }
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn eval(&mut self, valuation: &Valuation) -> Result<bool, EvalError> {
        let mut scope = Scope {
            base: valuation.iter().map(|(n, v)| (n.as_str(), *v)).collect(),
            locals: Vec::new(),
        };
        eval_node(&self.plans, &mut self.memo, self.bound, self.root, &mut scope)
    }
}

fn eval_node<'f, 'v>(
    plans: &Plans<'f>,
    memo: &mut HashMap<Key, bool>,
    bound: u64,
    node: &'f Formula,
    scope: &mut Scope<'v>,
) -> Result<bool, EvalError>
where
    'f: 'v,
{
    match node {
        Formula::Cmp(l, op, r) => {
            let lv = eval_term(l, scope)?;
            let rv = eval_term(r, scope)?;
            Ok(match op {
                CmpOp::Eq => lv == rv,
                CmpOp::Ne => lv != rv,
                CmpOp::Le => lv <= rv,
                CmpOp::Lt => lv < rv,
                CmpOp::Ge => lv >= rv,
                CmpOp::Gt => lv > rv,
            })
        }
        Formula::And(items) => {
            for f in items {
                if !eval_node(plans, memo, bound, f, scope)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Or(items) => {
            for f in items {
                if eval_node(plans, memo, bound, f, scope)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Formula::Not(f) => Ok(!eval_node(plans, memo, bound, f, scope)?),
        Formula::Exists(..) => {
            let block = &plans.blocks[plans.by_node[&(node as *const Formula as usize)]];
            if block.free.len() > MAX_KEY_VARS {
                return search(plans, memo, bound, block, 0, scope);
            }
            let mut key_vals = [0u64; MAX_KEY_VARS];
            for (slot, name) in key_vals.iter_mut().zip(&block.free) {
                match scope.lookup(name) {
                    Some(v) => *slot = v,
                    None => return Err(EvalError::UnboundVariable(name.clone())),
                }
            }
            let key = (block.memo_class, key_vals);
            if let Some(&hit) = memo.get(&key) {
                return Ok(hit);
            }
            let result = block_entry(plans, memo, bound, block, scope)?;
            memo.insert(key, result);
            Ok(result)
        }
    }
}

fn block_entry<'f, 'v>(
    plans: &Plans<'f>,
    memo: &mut HashMap<Key, bool>,
    bound: u64,
    block: &Block<'f>,
    scope: &mut Scope<'v>,
) -> Result<bool, EvalError>
where
    'f: 'v,
{
    // Conjuncts mentioning no chain variable gate the whole search.
    for (item, &r) in block.items.iter().zip(&block.ready) {
        if r == 0 && !eval_node(plans, memo, bound, item, scope)? {
            return Ok(false);
        }
    }
    search(plans, memo, bound, block, 0, scope)
}

fn search<'f, 'v>(
    plans: &Plans<'f>,
    memo: &mut HashMap<Key, bool>,
    bound: u64,
    block: &Block<'f>,
    depth: usize,
    scope: &mut Scope<'v>,
) -> Result<bool, EvalError>
where
    'f: 'v,
{
    if depth == block.chain.len() {
        return Ok(true);
    }
    scope.locals.push((block.chain[depth], 0));
    for value in 0..=bound {
        scope.locals.last_mut().unwrap().1 = value;
        let mut alive = true;
        for (item, &r) in block.items.iter().zip(&block.ready) {
            if r == depth + 1 && !eval_node(plans, memo, bound, item, scope)? {
                alive = false;
                break;
            }
        }
        if alive && search(plans, memo, bound, block, depth + 1, scope)? {
            scope.locals.pop();
            return Ok(true);
        }
    }
    scope.locals.pop();
    Ok(false)
}

fn collect_blocks<'f>(
    node: &'f Formula,
    plans: &mut Plans<'f>,
    classes: &mut HashMap<u64, Vec<usize>>,
) {
    match node {
        Formula::Cmp(..) => {}
        Formula::And(items) | Formula::Or(items) => {
            for f in items {
                collect_blocks(f, plans, classes);
            }
        }
        Formula::Not(f) => collect_blocks(f, plans, classes),
        Formula::Exists(..) => {
            let mut chain: Vec<&'f str> = Vec::new();
            let mut body = node;
            while let Formula::Exists(x, inner) = body {
                chain.push(x.as_str());
                body = inner;
            }
            let items: Vec<&'f Formula> = match body {
                Formula::And(items) => items.iter().collect(),
                other => vec![other],
            };
            let ready: Vec<usize> = items
                .iter()
                .map(|item| {
                    let fv = item.free_vars();
                    chain
                        .iter()
                        .enumerate()
                        .filter(|(_, name)| fv.contains(**name))
                        .map(|(idx, _)| idx + 1)
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let free: Vec<String> = node.free_vars().into_iter().collect();

            // Alpha-equivalent blocks, such as the per-robot copies of
            // one schema, share a memo class: their truth depends only
            // on the values of their (identically named) free
            // variables.
            let fingerprint = alpha_fingerprint(node);
            let candidates = classes.entry(fingerprint).or_default();
            let mut memo_class = None;
            for &other in candidates.iter() {
                let peer = &plans.blocks[other];
                if peer.free == free && alpha_eq(peer.node, node) {
                    memo_class = Some(peer.memo_class);
                    break;
                }
            }
            let memo_class =
                memo_class.unwrap_or_else(|| u32::try_from(plans.blocks.len()).unwrap());

            let id = plans.blocks.len();
            plans.by_node.insert(node as *const Formula as usize, id);
            candidates.push(id);
            plans.blocks.push(Block { node, memo_class, free, chain, items: items.clone(), ready });

            for item in items {
                collect_blocks(item, plans, classes);
            }
        }
    }
}

/// Structural hash that is invariant under renaming of bound
/// variables (free variables hash by name).
fn alpha_fingerprint(node: &Formula) -> u64 {
    let mut hasher = std::collections::hash_map::DefaultHasher::new();
    let mut binders = Vec::new();
    hash_formula(node, &mut binders, &mut hasher);
    hasher.finish()
}

fn hash_formula<'f>(f: &'f Formula, binders: &mut Vec<&'f str>, h: &mut impl Hasher) {
    match f {
        Formula::Cmp(l, op, r) => {
            0u8.hash(h);
            hash_term(l, binders, h);
            op.hash(h);
            hash_term(r, binders, h);
        }
        Formula::And(items) => {
            1u8.hash(h);
            items.len().hash(h);
            for i in items {
                hash_formula(i, binders, h);
            }
        }
        Formula::Or(items) => {
            2u8.hash(h);
            items.len().hash(h);
            for i in items {
                hash_formula(i, binders, h);
            }
        }
        Formula::Not(inner) => {
            3u8.hash(h);
            hash_formula(inner, binders, h);
        }
        Formula::Exists(x, body) => {
            4u8.hash(h);
            binders.push(x.as_str());
            hash_formula(body, binders, h);
            binders.pop();
        }
    }
}

fn hash_term<'f>(t: &'f Term, binders: &mut Vec<&'f str>, h: &mut impl Hasher) {
    match t {
        Term::Var(name) => match binders.iter().rposition(|b| b == name) {
            Some(index) => {
                0u8.hash(h);
                index.hash(h);
            }
            None => {
                1u8.hash(h);
                name.hash(h);
            }
        },
        Term::Const(v) => {
            2u8.hash(h);
            v.hash(h);
        }
        Term::Add(l, r) => {
            3u8.hash(h);
            hash_term(l, binders, h);
            hash_term(r, binders, h);
        }
        Term::Sub(l, r) => {
            4u8.hash(h);
            hash_term(l, binders, h);
            hash_term(r, binders, h);
        }
        Term::ScalarMul(c, inner) => {
            5u8.hash(h);
            c.hash(h);
            hash_term(inner, binders, h);
        }
        Term::ModConst(inner, m) => {
            6u8.hash(h);
            hash_term(inner, binders, h);
            m.hash(h);
        }
    }
}

/// Structural equality up to renaming of bound variables.
fn alpha_eq(a: &Formula, b: &Formula) -> bool {
    fn go<'f>(a: &'f Formula, b: &'f Formula, stack: &mut Vec<(&'f str, &'f str)>) -> bool {
        match (a, b) {
            (Formula::Cmp(al, ao, ar), Formula::Cmp(bl, bo, br)) => {
                ao == bo && term_eq(al, bl, stack) && term_eq(ar, br, stack)
            }
            (Formula::And(ai), Formula::And(bi)) | (Formula::Or(ai), Formula::Or(bi)) => {
                ai.len() == bi.len() && ai.iter().zip(bi).all(|(x, y)| go(x, y, stack))
            }
            (Formula::Not(ai), Formula::Not(bi)) => go(ai, bi, stack),
            (Formula::Exists(ax, ab), Formula::Exists(bx, bb)) => {
                stack.push((ax.as_str(), bx.as_str()));
                let result = go(ab, bb, stack);
                stack.pop();
                result
            }
            _ => false,
        }
    }
    fn term_eq<'f>(a: &'f Term, b: &'f Term, stack: &mut Vec<(&'f str, &'f str)>) -> bool {
        match (a, b) {
            (Term::Var(an), Term::Var(bn)) => {
                for (ab, bb) in stack.iter().rev() {
                    let a_bound = *ab == an;
                    let b_bound = *bb == bn;
                    if a_bound || b_bound {
                        return a_bound && b_bound;
                    }
                }
                an == bn
            }
            (Term::Const(av), Term::Const(bv)) => av == bv,
            (Term::Add(al, ar), Term::Add(bl, br)) | (Term::Sub(al, ar), Term::Sub(bl, br)) => {
                term_eq(al, bl, stack) && term_eq(ar, br, stack)
            }
            (Term::ScalarMul(ac, at), Term::ScalarMul(bc, bt)) => {
                ac == bc && term_eq(at, bt, stack)
            }
            (Term::ModConst(at, am), Term::ModConst(bt, bm)) => {
                am == bm && term_eq(at, bt, stack)
            }
            _ => false,
        }
    }
    let mut stack = Vec::new();
    go(a, b, &mut stack)
}

fn eval_term(term: &Term, scope: &Scope) -> Result<i64, EvalError> {
    match term {
        Term::Var(name) => {
            let value = scope
                .lookup(name)
                .ok_or_else(|| EvalError::UnboundVariable(name.clone()))?;
            i64::try_from(value).map_err(|_| EvalError::Overflow)
        }
        Term::Const(value) => i64::try_from(*value).map_err(|_| EvalError::Overflow),
        Term::Add(l, r) => eval_term(l, scope)?
            .checked_add(eval_term(r, scope)?)
            .ok_or(EvalError::Overflow),
        Term::Sub(l, r) => eval_term(l, scope)?
            .checked_sub(eval_term(r, scope)?)
            .ok_or(EvalError::Overflow),
        Term::ScalarMul(c, t) => {
            let c = i64::try_from(*c).map_err(|_| EvalError::Overflow)?;
            c.checked_mul(eval_term(t, scope)?).ok_or(EvalError::Overflow)
        }
        Term::ModConst(t, m) => {
            let m = i64::try_from(*m).map_err(|_| EvalError::Overflow)?;
            Ok(eval_term(t, scope)?.rem_euclid(m))
        }
    }
}
