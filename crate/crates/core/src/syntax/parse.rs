//! Recursive-descent parser for formulas.
//!
//! Precedence, loosest first:
//!
//! | construct              | associativity                      |
//! |------------------------|------------------------------------|
//! | `exists x.` `forall x.`| body extends as far right as possible |
//! | `->`                   | right                              |
//! | `|`                    | left                               |
//! | `&`                    | left                               |
//! | `~` `<>` `[]`          | prefix                             |

use std::collections::{BTreeMap, BTreeSet};

use super::lexer::{Cursor, Tok};
use super::{primed_fresh, Formula, ParseError};

#[derive(Debug, Default, Clone)]
pub(crate) struct Arities(BTreeMap<String, usize>);

impl Arities {
    pub(crate) fn record(&mut self, phi: &Formula) -> Result<(), ParseError> {
        match phi {
            Formula::Pred { name, args } => match self.0.get(name) {
                Some(&n) if n != args.len() => Err(ParseError::Arity {
                    predicate: name.clone(),
                    first: n,
                    second: args.len(),
                }),
                Some(_) => Ok(()),
                None => {
                    self.0.insert(name.clone(), args.len());
                    Ok(())
                }
            },
            Formula::Bottom => Ok(()),
            Formula::Neg(b) | Formula::Dia(b) | Formula::Exists(_, b) => self.record(b),
            Formula::Or(l, r) => {
                self.record(l)?;
                self.record(r)
            }
        }
    }

    pub(crate) fn into_map(self) -> BTreeMap<String, usize> {
        self.0
    }
}

/// Parses a formula, expanding sugar, checking predicate arities and
/// renaming repeated binders so that every `exists` binds a distinct name.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut cur = Cursor::new(text)?;
    let mut arities = Arities::default();
    let f = parse_formula_at(&mut cur, &mut arities)?;
    cur.finish()?;
    Ok(f)
}

pub(crate) fn parse_formula_at(
    cur: &mut Cursor,
    arities: &mut Arities,
) -> Result<Formula, ParseError> {
    let f = implication(cur)?;
    arities.record(&f)?;
    Ok(distinct_binders(&f))
}

fn implication(cur: &mut Cursor) -> Result<Formula, ParseError> {
    let left = disjunction(cur)?;
    if cur.eat(&Tok::Arrow) {
        let right = implication(cur)?;
        Ok(Formula::implies(left, right))
    } else {
        Ok(left)
    }
}

fn disjunction(cur: &mut Cursor) -> Result<Formula, ParseError> {
    let mut left = conjunction(cur)?;
    while cur.eat(&Tok::Bar) {
        let right = conjunction(cur)?;
        left = Formula::or(left, right);
    }
    Ok(left)
}

fn conjunction(cur: &mut Cursor) -> Result<Formula, ParseError> {
    let mut left = unary(cur)?;
    while cur.eat(&Tok::Amp) {
        let right = unary(cur)?;
        left = Formula::and(left, right);
    }
    Ok(left)
}

fn unary(cur: &mut Cursor) -> Result<Formula, ParseError> {
    match cur.peek().clone() {
        Tok::Tilde => {
            cur.bump();
            Ok(Formula::neg(unary(cur)?))
        }
        Tok::Diamond => {
            cur.bump();
            Ok(Formula::dia(unary(cur)?))
        }
        Tok::Box => {
            cur.bump();
            Ok(Formula::boxed(unary(cur)?))
        }
        Tok::Exists | Tok::Forall => {
            let universal = cur.bump() == Tok::Forall;
            let var = cur.ident()?;
            cur.eat(&Tok::Dot);
            let body = implication(cur)?;
            Ok(if universal {
                Formula::forall(&var, body)
            } else {
                Formula::exists(&var, body)
            })
        }
        Tok::Bottom => {
            cur.bump();
            Ok(Formula::Bottom)
        }
        Tok::Top => {
            cur.bump();
            Ok(Formula::top())
        }
        Tok::LParen => {
            cur.bump();
            let f = implication(cur)?;
            cur.expect(&Tok::RParen)?;
            Ok(f)
        }
        Tok::Ident(name) => {
            cur.bump();
            let mut args = Vec::new();
            if cur.eat(&Tok::LParen) {
                loop {
                    args.push(cur.ident()?);
                    if !cur.eat(&Tok::Comma) {
                        break;
                    }
                }
                cur.expect(&Tok::RParen)?;
            }
            Ok(Formula::Pred { name, args })
        }
        _ => Err(cur.unexpected("formula")),
    }
}

fn distinct_binders(f: &Formula) -> Formula {
    let mut used = f.all_vars();
    let mut seen = BTreeSet::new();
    rename_repeats(f, &mut used, &mut seen)
}

fn rename_repeats(f: &Formula, used: &mut BTreeSet<String>, seen: &mut BTreeSet<String>) -> Formula {
    match f {
        Formula::Pred { .. } | Formula::Bottom => f.clone(),
        Formula::Neg(b) => Formula::neg(rename_repeats(b, used, seen)),
        Formula::Dia(b) => Formula::dia(rename_repeats(b, used, seen)),
        Formula::Or(l, r) => {
            let l = rename_repeats(l, used, seen);
            Formula::or(l, rename_repeats(r, used, seen))
        }
        Formula::Exists(x, b) => {
            let (name, body) = if seen.contains(x) {
                let fresh = primed_fresh(x, used);
                used.insert(fresh.clone());
                let body = b.substitute(&fresh, x);
                (fresh, body)
            } else {
                (x.clone(), (**b).clone())
            };
            seen.insert(name.clone());
            let body = rename_repeats(&body, used, seen);
            Formula::Exists(name, Box::new(body))
        }
    }
}
