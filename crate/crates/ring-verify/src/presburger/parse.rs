//! Recursive-descent parser for the formula DSL.
//!
//! Grammar (ASCII, `#` starts a line comment, one formula per input):
//!
//! ```text
//! formula := disj ;  disj := conj {"or" conj} ;  conj := unary {"and" unary} ;
//! unary   := "not" unary | "exists" IDENT "." unary | "(" formula ")" | atom ;
//! atom    := term CMP term ;  CMP := "=" | "<=" | ">=" | "<" | ">" | "!=" ;
//! term    := mterm {("+"|"-") mterm} ;  mterm := factor ["mod" NAT] ;
//! factor  := NAT ["*" factor] | IDENT | "(" term ")" ;
//! IDENT   := [a-zA-Z][a-zA-Z0-9_]* ;  NAT := [0-9]+ .
//! ```
//!
//! After parsing, bound variables are renamed apart so that every
//! binder uses a distinct name that also differs from every free
//! variable of the formula.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use super::{CmpOp, Formula, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Nat(u64),
    KwOr,
    KwAnd,
    KwNot,
    KwExists,
    KwMod,
    LParen,
    RParen,
    Dot,
    Plus,
    Minus,
    Star,
    Cmp(CmpOp),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Nat(n) => write!(f, "number `{n}`"),
            Tok::KwOr => write!(f, "`or`"),
            Tok::KwAnd => write!(f, "`and`"),
            Tok::KwNot => write!(f, "`not`"),
            Tok::KwExists => write!(f, "`exists`"),
            Tok::KwMod => write!(f, "`mod`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::Dot => write!(f, "`.`"),
            Tok::Plus => write!(f, "`+`"),
            Tok::Minus => write!(f, "`-`"),
            Tok::Star => write!(f, "`*`"),
            Tok::Cmp(op) => write!(f, "`{}`", op.symbol()),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: u32,
    col: u32,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line: u32 = 1;
    let mut col: u32 = 1;
    let mut chars = text.chars().peekable();

    macro_rules! push {
        ($tok:expr, $line:expr, $col:expr) => {
            out.push(Spanned { tok: $tok, line: $line, col: $col })
        };
    }

    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            '(' => {
                chars.next();
                col += 1;
                push!(Tok::LParen, tline, tcol);
            }
            ')' => {
                chars.next();
                col += 1;
                push!(Tok::RParen, tline, tcol);
            }
            '.' => {
                chars.next();
                col += 1;
                push!(Tok::Dot, tline, tcol);
            }
            '+' => {
                chars.next();
                col += 1;
                push!(Tok::Plus, tline, tcol);
            }
            '-' => {
                chars.next();
                col += 1;
                push!(Tok::Minus, tline, tcol);
            }
            '*' => {
                chars.next();
                col += 1;
                push!(Tok::Star, tline, tcol);
            }
            '=' => {
                chars.next();
                col += 1;
                push!(Tok::Cmp(CmpOp::Eq), tline, tcol);
            }
            '<' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'=') {
                    chars.next();
                    col += 1;
                    push!(Tok::Cmp(CmpOp::Le), tline, tcol);
                } else {
                    push!(Tok::Cmp(CmpOp::Lt), tline, tcol);
                }
            }
            '>' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'=') {
                    chars.next();
                    col += 1;
                    push!(Tok::Cmp(CmpOp::Ge), tline, tcol);
                } else {
                    push!(Tok::Cmp(CmpOp::Gt), tline, tcol);
                }
            }
            '!' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'=') {
                    chars.next();
                    col += 1;
                    push!(Tok::Cmp(CmpOp::Ne), tline, tcol);
                } else {
                    return Err(ParseError {
                        line: tline,
                        col: tcol,
                        message: "expected `!=`".to_string(),
                    });
                }
            }
            c if c.is_ascii_digit() => {
                let mut digits = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() {
                        digits.push(c);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                let value: u64 = digits.parse().map_err(|_| ParseError {
                    line: tline,
                    col: tcol,
                    message: format!("number `{digits}` does not fit in 64 bits"),
                })?;
                push!(Tok::Nat(value), tline, tcol);
            }
            c if c.is_ascii_alphabetic() => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        word.push(c);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                let tok = match word.as_str() {
                    "or" => Tok::KwOr,
                    "and" => Tok::KwAnd,
                    "not" => Tok::KwNot,
                    "exists" => Tok::KwExists,
                    "mod" => Tok::KwMod,
                    _ => Tok::Ident(word),
                };
                push!(tok, tline, tcol);
            }
            other => {
                return Err(ParseError {
                    line: tline,
                    col: tcol,
                    message: format!("unexpected character `{other}`"),
                });
            }
        }
    }
    push!(Tok::Eof, line, col);
    Ok(out)
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.tokens[self.pos]
    }

    fn advance(&mut self) -> Spanned {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, spanned: &Spanned, message: impl Into<String>) -> ParseError {
        ParseError {
            line: spanned.line,
            col: spanned.col,
            message: message.into(),
        }
    }

    fn expect(&mut self, want: &Tok, context: &str) -> Result<Spanned, ParseError> {
        let t = self.peek().clone();
        if std::mem::discriminant(&t.tok) == std::mem::discriminant(want) {
            Ok(self.advance())
        } else {
            Err(self.error_at(&t, format!("expected {want} {context}, found {}", t.tok)))
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let first = self.conj()?;
        let mut items = vec![first];
        while self.peek().tok == Tok::KwOr {
            self.advance();
            items.push(self.conj()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Formula::Or(items)
        })
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let first = self.unary()?;
        let mut items = vec![first];
        while self.peek().tok == Tok::KwAnd {
            self.advance();
            items.push(self.unary()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Formula::And(items)
        })
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::KwNot => {
                self.advance();
                let operand = self.unary()?;
                if !operand.is_quantifier_free() {
                    return Err(self.error_at(
                        &t,
                        "negation applied over `exists`; only quantifier-free \
                         subformulae can be negated",
                    ));
                }
                Ok(Formula::Not(Box::new(operand)))
            }
            Tok::KwExists => {
                self.advance();
                let ident = self.expect(&Tok::Ident(String::new()), "after `exists`")?;
                let name = match ident.tok {
                    Tok::Ident(s) => s,
                    _ => unreachable!(),
                };
                self.expect(&Tok::Dot, "after the bound variable")?;
                let body = self.unary()?;
                Ok(Formula::Exists(name, Box::new(body)))
            }
            Tok::LParen => {
                // A `(` can open a grouped formula or a grouped term,
                // as in `(x - 3) mod 3 = 2`. Try the formula reading
                // first and fall back to an atom.
                let save = self.pos;
                self.advance();
                if let Ok(inner) = self.formula() {
                    if self.peek().tok == Tok::RParen {
                        self.advance();
                        return Ok(inner);
                    }
                }
                self.pos = save;
                self.atom()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let left = self.term()?;
        let t = self.peek().clone();
        let op = match &t.tok {
            Tok::Cmp(op) => {
                let op = *op;
                self.advance();
                op
            }
            other => {
                let message = format!("expected a comparison operator, found {other}");
                return Err(self.error_at(&t, message));
            }
        };
        let right = self.term()?;
        Ok(Formula::Cmp(left, op, right))
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.mterm()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.advance();
                    acc = Term::add(acc, self.mterm()?);
                }
                Tok::Minus => {
                    self.advance();
                    acc = Term::sub(acc, self.mterm()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn mterm(&mut self) -> Result<Term, ParseError> {
        let base = self.factor()?;
        if self.peek().tok == Tok::KwMod {
            let t = self.advance();
            let nat = self.expect(&Tok::Nat(0), "after `mod`")?;
            let modulus = match nat.tok {
                Tok::Nat(n) => n,
                _ => unreachable!(),
            };
            if modulus == 0 {
                return Err(self.error_at(&t, "modulus must be positive"));
            }
            return Ok(Term::ModConst(Box::new(base), modulus));
        }
        Ok(base)
    }

    fn factor(&mut self) -> Result<Term, ParseError> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::Nat(value) => {
                let value = *value;
                self.advance();
                if self.peek().tok == Tok::Star {
                    self.advance();
                    let operand = self.factor()?;
                    Ok(Term::ScalarMul(value, Box::new(operand)))
                } else {
                    Ok(Term::Const(value))
                }
            }
            Tok::Ident(name) => {
                let name = name.clone();
                self.advance();
                Ok(Term::Var(name))
            }
            Tok::LParen => {
                self.advance();
                let inner = self.term()?;
                self.expect(&Tok::RParen, "to close the group")?;
                Ok(inner)
            }
            other => {
                let message = format!("expected a term, found {other}");
                Err(self.error_at(&t, message))
            }
        }
    }
}

/// Parses one formula. Bound variables in the result are pairwise
/// distinct and disjoint from the free variables; when a user-chosen
/// name collides it gets a numeric suffix.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let tokens = lex(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    let formula = parser.formula()?;
    let eof = parser.peek().clone();
    if eof.tok != Tok::Eof {
        return Err(parser.error_at(&eof, format!("expected end of input, found {}", eof.tok)));
    }
    Ok(rename_apart(formula))
}

fn rename_apart(formula: Formula) -> Formula {
    let mut used = formula.free_vars();
    let mut scope: Vec<(String, String)> = Vec::new();
    rename_apart_rec(&formula, &mut used, &mut scope)
}

fn rename_apart_rec(
    formula: &Formula,
    used: &mut BTreeSet<String>,
    scope: &mut Vec<(String, String)>,
) -> Formula {
    match formula {
        Formula::Cmp(l, op, r) => Formula::Cmp(
            super::rename_term(l, scope),
            *op,
            super::rename_term(r, scope),
        ),
        Formula::And(items) => Formula::And(
            items
                .iter()
                .map(|f| rename_apart_rec(f, used, scope))
                .collect(),
        ),
        Formula::Or(items) => Formula::Or(
            items
                .iter()
                .map(|f| rename_apart_rec(f, used, scope))
                .collect(),
        ),
        Formula::Not(f) => Formula::Not(Box::new(rename_apart_rec(f, used, scope))),
        Formula::Exists(x, body) => {
            let name = if used.contains(x) {
                let mut n = 2;
                loop {
                    let candidate = format!("{x}_{n}");
                    if !used.contains(&candidate) {
                        break candidate;
                    }
                    n += 1;
                }
            } else {
                x.clone()
            };
            used.insert(name.clone());
            scope.push((x.clone(), name.clone()));
            let body = rename_apart_rec(body, used, scope);
            scope.pop();
            Formula::Exists(name, Box::new(body))
        }
    }
}
