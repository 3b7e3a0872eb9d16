//! Text syntax for sequents.
//!
//! Nested: `G ; x, y |- D, [ G' ; z |- D' ]@v` with an optional leading
//! `@label` naming the root (default `w0`). Children written without a
//! label get fresh `w{n}` labels. An empty child is written `[ |- ]`
//! because `[]` reads as a box.
//!
//! Labeled: `w R u, x in D(w), w : phi |- w : psi`.

use std::collections::BTreeSet;

use super::{fresh_label, Label, LabeledSequent, NestedSequent, ROOT};
use crate::syntax::{parse_formula_at, render_formula, Arities, Cursor, Formula, ParseError, Tok};

struct Raw {
    label: Option<Label>,
    gamma: Vec<Formula>,
    theta: Vec<String>,
    delta: Vec<Formula>,
    children: Vec<Raw>,
}

pub fn parse_nested(text: &str) -> Result<NestedSequent, ParseError> {
    let mut cur = Cursor::new(text)?;
    let mut ar = Arities::default();
    let root_label = if cur.eat(&Tok::At) { Some(cur.ident()?) } else { None };
    let mut raw = flat(&mut cur, &mut ar)?;
    cur.finish()?;
    raw.label = Some(root_label.unwrap_or_else(|| ROOT.to_string()));
    let mut taken = BTreeSet::new();
    collect_labels(&raw, &mut taken);
    Ok(assign(raw, &mut taken))
}

fn flat(cur: &mut Cursor, ar: &mut Arities) -> Result<Raw, ParseError> {
    let mut gamma = Vec::new();
    if !matches!(cur.peek(), Tok::Semi | Tok::Turnstile) {
        loop {
            gamma.push(parse_formula_at(cur, ar)?);
            if !cur.eat(&Tok::Comma) {
                break;
            }
        }
    }
    let mut theta = Vec::new();
    if cur.eat(&Tok::Semi) && *cur.peek() != Tok::Turnstile {
        loop {
            theta.push(cur.ident()?);
            if !cur.eat(&Tok::Comma) {
                break;
            }
        }
    }
    cur.expect(&Tok::Turnstile)?;
    let mut delta = Vec::new();
    let mut children = Vec::new();
    if !matches!(cur.peek(), Tok::RBrack | Tok::Eof) {
        loop {
            if cur.eat(&Tok::LBrack) {
                let mut child = flat(cur, ar)?;
                cur.expect(&Tok::RBrack)?;
                if cur.eat(&Tok::At) {
                    child.label = Some(cur.ident()?);
                }
                children.push(child);
            } else {
                delta.push(parse_formula_at(cur, ar)?);
            }
            if !cur.eat(&Tok::Comma) {
                break;
            }
        }
    }
    Ok(Raw {
        label: None,
        gamma,
        theta,
        delta,
        children,
    })
}

fn collect_labels(raw: &Raw, out: &mut BTreeSet<Label>) {
    if let Some(l) = &raw.label {
        out.insert(l.clone());
    }
    for c in &raw.children {
        collect_labels(c, out);
    }
}

fn assign(raw: Raw, taken: &mut BTreeSet<Label>) -> NestedSequent {
    let label = match raw.label {
        Some(l) => l,
        None => {
            let l = fresh_label(taken.iter());
            taken.insert(l.clone());
            l
        }
    };
    NestedSequent {
        label,
        gamma: raw.gamma,
        theta: raw.theta,
        delta: raw.delta,
        children: raw.children.into_iter().map(|c| assign(c, taken)).collect(),
    }
}

pub(super) fn render_nested(s: &NestedSequent) -> String {
    let mut out = String::new();
    if s.label != ROOT {
        out.push('@');
        out.push_str(&s.label);
        out.push(' ');
    }
    render_flat(s, &mut out);
    out
}

fn render_flat(s: &NestedSequent, out: &mut String) {
    let gamma: Vec<String> = s.gamma.iter().map(render_formula).collect();
    out.push_str(&gamma.join(", "));
    if !s.theta.is_empty() {
        if !gamma.is_empty() {
            out.push(' ');
        }
        out.push_str("; ");
        out.push_str(&s.theta.join(", "));
    }
    if !out.is_empty() && !out.ends_with(' ') && !out.ends_with('[') {
        out.push(' ');
    }
    out.push_str("|-");
    let mut items: Vec<String> = s.delta.iter().map(render_formula).collect();
    for c in &s.children {
        let mut inner = String::from("[ ");
        render_flat(c, &mut inner);
        inner.push_str(" ]@");
        inner.push_str(&c.label);
        items.push(inner);
    }
    if !items.is_empty() {
        out.push(' ');
        out.push_str(&items.join(", "));
    }
}

pub fn parse_labeled(text: &str) -> Result<LabeledSequent, ParseError> {
    let mut cur = Cursor::new(text)?;
    let mut ar = Arities::default();
    let mut seq = LabeledSequent::new();
    if *cur.peek() != Tok::Turnstile {
        loop {
            let w = cur.ident()?;
            match cur.peek().clone() {
                Tok::Ident(r) if r == "R" => {
                    cur.bump();
                    let u = cur.ident()?;
                    seq.rel.push((w, u));
                }
                Tok::Ident(kw) if kw == "in" => {
                    cur.bump();
                    match cur.bump() {
                        Tok::Ident(d) if d == "D" => {}
                        _ => return Err(cur.unexpected("`D`")),
                    }
                    cur.expect(&Tok::LParen)?;
                    let v = cur.ident()?;
                    cur.expect(&Tok::RParen)?;
                    seq.dom.push((w, v));
                }
                Tok::Colon => {
                    cur.bump();
                    seq.left.push((w, parse_formula_at(&mut cur, &mut ar)?));
                }
                _ => return Err(cur.unexpected("`R`, `in` or `:`")),
            }
            if !cur.eat(&Tok::Comma) {
                break;
            }
        }
    }
    cur.expect(&Tok::Turnstile)?;
    if *cur.peek() != Tok::Eof {
        loop {
            let w = cur.ident()?;
            cur.expect(&Tok::Colon)?;
            seq.right.push((w, parse_formula_at(&mut cur, &mut ar)?));
            if !cur.eat(&Tok::Comma) {
                break;
            }
        }
    }
    cur.finish()?;
    Ok(seq)
}

pub(super) fn render_labeled(s: &LabeledSequent) -> String {
    let mut left: Vec<String> = Vec::new();
    left.extend(s.rel.iter().map(|(w, u)| format!("{w} R {u}")));
    left.extend(s.dom.iter().map(|(x, w)| format!("{x} in D({w})")));
    left.extend(s.left.iter().map(|(w, f)| format!("{w} : {}", render_formula(f))));
    let right: Vec<String> = s
        .right
        .iter()
        .map(|(w, f)| format!("{w} : {}", render_formula(f)))
        .collect();
    let mut out = left.join(", ");
    if !out.is_empty() {
        out.push(' ');
    }
    out.push_str("|-");
    if !right.is_empty() {
        out.push(' ');
        out.push_str(&right.join(", "));
    }
    out
}
