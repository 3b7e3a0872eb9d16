//! First-order modal formulas over the primitive connectives `⊥ ¬ ∨ ◇ ∃`,
//! capture-avoiding substitution and frame-condition specifications.
//!
//! Terms are variables only. The sugar `□ ∀ ∧ → true` exists at the parser
//! level and expands into primitives, so every engine downstream only ever
//! sees the five primitive connectives plus predicates.

mod lexer;
mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub(crate) use lexer::{Cursor, Tok};
pub use parse::parse_formula;
pub(crate) use parse::{parse_formula_at, Arities};

/// Variable name.
pub type Var = String;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("predicate `{predicate}` used with arity {first} and {second}")]
    Arity {
        predicate: String,
        first: usize,
        second: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Pred { name: String, args: Vec<Var> },
    Bottom,
    Neg(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Dia(Box<Formula>),
    Exists(Var, Box<Formula>),
}

impl Formula {
    pub fn pred(name: &str, args: &[&str]) -> Formula {
        Formula::Pred {
            name: name.to_string(),
            args: args.iter().map(|a| a.to_string()).collect(),
        }
    }

    pub fn atom(name: &str) -> Formula {
        Formula::pred(name, &[])
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(body: Formula) -> Formula {
        Formula::Neg(Box::new(body))
    }

    pub fn or(left: Formula, right: Formula) -> Formula {
        Formula::Or(Box::new(left), Box::new(right))
    }

    pub fn dia(body: Formula) -> Formula {
        Formula::Dia(Box::new(body))
    }

    pub fn exists(bound: &str, body: Formula) -> Formula {
        Formula::Exists(bound.to_string(), Box::new(body))
    }

    /// `φ ∧ ψ := ¬(¬φ ∨ ¬ψ)`
    pub fn and(left: Formula, right: Formula) -> Formula {
        Formula::neg(Formula::or(Formula::neg(left), Formula::neg(right)))
    }

    /// `φ → ψ := ¬φ ∨ ψ`
    pub fn implies(left: Formula, right: Formula) -> Formula {
        Formula::or(Formula::neg(left), right)
    }

    /// `□φ := ¬◇¬φ`
    pub fn boxed(body: Formula) -> Formula {
        Formula::neg(Formula::dia(Formula::neg(body)))
    }

    /// `∀xφ := ¬∃x¬φ`
    pub fn forall(bound: &str, body: Formula) -> Formula {
        Formula::neg(Formula::exists(bound, Formula::neg(body)))
    }

    pub fn top() -> Formula {
        Formula::neg(Formula::Bottom)
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Pred { .. })
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut BTreeSet<Var>) {
        match self {
            Formula::Pred { args, .. } => {
                for a in args {
                    if !bound.contains(&a.as_str()) {
                        out.insert(a.clone());
                    }
                }
            }
            Formula::Bottom => {}
            Formula::Neg(b) | Formula::Dia(b) => b.collect_free(bound, out),
            Formula::Or(l, r) => {
                l.collect_free(bound, out);
                r.collect_free(bound, out);
            }
            Formula::Exists(x, b) => {
                bound.push(x);
                b.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn occurs_free(&self, x: &str) -> bool {
        match self {
            Formula::Pred { args, .. } => args.iter().any(|a| a == x),
            Formula::Bottom => false,
            Formula::Neg(b) | Formula::Dia(b) => b.occurs_free(x),
            Formula::Or(l, r) => l.occurs_free(x) || r.occurs_free(x),
            Formula::Exists(y, b) => y != x && b.occurs_free(x),
        }
    }

    /// Every variable name in the formula, free or bound.
    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Pred { args, .. } => out.extend(args.iter().cloned()),
            Formula::Exists(x, _) => {
                out.insert(x.clone());
            }
            _ => {}
        });
        out
    }

    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        match self {
            Formula::Pred { .. } | Formula::Bottom => {}
            Formula::Neg(b) | Formula::Dia(b) | Formula::Exists(_, b) => b.visit(f),
            Formula::Or(l, r) => {
                l.visit(f);
                r.visit(f);
            }
        }
    }

    /// Predicate names with their arities, or the first conflicting use.
    pub fn signature(&self) -> Result<BTreeMap<String, usize>, ParseError> {
        let mut sig = Arities::default();
        sig.record(self)?;
        Ok(sig.into_map())
    }

    /// `self[y/x]`: replaces every free occurrence of `x` by `y`, renaming
    /// binders so that `y` is never captured.
    pub fn substitute(&self, y: &str, x: &str) -> Formula {
        if x == y {
            return self.clone();
        }
        match self {
            Formula::Pred { name, args } => Formula::Pred {
                name: name.clone(),
                args: args
                    .iter()
                    .map(|a| if a == x { y.to_string() } else { a.clone() })
                    .collect(),
            },
            Formula::Bottom => Formula::Bottom,
            Formula::Neg(b) => Formula::neg(b.substitute(y, x)),
            Formula::Dia(b) => Formula::dia(b.substitute(y, x)),
            Formula::Or(l, r) => Formula::or(l.substitute(y, x), r.substitute(y, x)),
            Formula::Exists(z, b) => {
                if z == x || !b.occurs_free(x) {
                    self.clone()
                } else if z == y {
                    let mut avoid = b.free_vars();
                    avoid.insert(y.to_string());
                    avoid.insert(x.to_string());
                    let fresh = primed_fresh(z, &avoid);
                    let renamed = b.substitute(&fresh, z);
                    Formula::Exists(fresh, Box::new(renamed.substitute(y, x)))
                } else {
                    Formula::Exists(z.clone(), Box::new(b.substitute(y, x)))
                }
            }
        }
    }

    /// Representative of the α-equivalence class: binders renamed by their
    /// nesting depth to names the parser can never produce.
    pub fn alpha_normal(&self) -> Formula {
        self.normalize(&mut Vec::new())
    }

    fn normalize(&self, env: &mut Vec<(String, String)>) -> Formula {
        match self {
            Formula::Pred { name, args } => Formula::Pred {
                name: name.clone(),
                args: args
                    .iter()
                    .map(|a| {
                        env.iter()
                            .rev()
                            .find(|(orig, _)| orig == a)
                            .map_or_else(|| a.clone(), |(_, canon)| canon.clone())
                    })
                    .collect(),
            },
            Formula::Bottom => Formula::Bottom,
            Formula::Neg(b) => Formula::neg(b.normalize(env)),
            Formula::Dia(b) => Formula::dia(b.normalize(env)),
            Formula::Or(l, r) => Formula::or(l.normalize(env), r.normalize(env)),
            Formula::Exists(x, b) => {
                let canon = format!("#{}", env.len());
                env.push((x.clone(), canon.clone()));
                let body = b.normalize(env);
                env.pop();
                Formula::Exists(canon, Box::new(body))
            }
        }
    }

    pub fn alpha_eq(&self, other: &Formula) -> bool {
        self.alpha_normal() == other.alpha_normal()
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Pred { .. } | Formula::Bottom => 0,
            Formula::Neg(b) | Formula::Dia(b) | Formula::Exists(_, b) => 1 + b.depth(),
            Formula::Or(l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    fn level(&self) -> u8 {
        match self {
            Formula::Exists(..) => 0,
            Formula::Or(..) => 1,
            Formula::Neg(_) | Formula::Dia(_) => 2,
            Formula::Pred { .. } | Formula::Bottom => 3,
        }
    }

    fn render_at(&self, min_level: u8, out: &mut String) {
        if self.level() < min_level {
            out.push('(');
            self.render_at(0, out);
            out.push(')');
            return;
        }
        match self {
            Formula::Pred { name, args } => {
                out.push_str(name);
                if !args.is_empty() {
                    out.push('(');
                    out.push_str(&args.join(","));
                    out.push(')');
                }
            }
            Formula::Bottom => out.push_str("false"),
            Formula::Neg(b) => {
                out.push('~');
                b.render_at(2, out);
            }
            Formula::Dia(b) => {
                out.push_str("<>");
                b.render_at(2, out);
            }
            Formula::Or(l, r) => {
                l.render_at(1, out);
                out.push_str(" | ");
                r.render_at(2, out);
            }
            Formula::Exists(x, b) => {
                out.push_str("exists ");
                out.push_str(x);
                out.push_str(". ");
                b.render_at(0, out);
            }
        }
    }
}

/// Appends primes to `base` until the name avoids `avoid`.
pub fn primed_fresh(base: &str, avoid: &BTreeSet<Var>) -> Var {
    let mut name = format!("{base}'");
    while avoid.contains(&name) {
        name.push('\'');
    }
    name
}

/// ASCII rendering using primitives only; `parse_formula` reads it back.
pub fn render_formula(phi: &Formula) -> String {
    let mut s = String::new();
    phi.render_at(0, &mut s);
    s
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_formula(self))
    }
}

impl std::str::FromStr for Formula {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_formula(s)
    }
}

impl Serialize for Formula {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&render_formula(self))
    }
}

impl<'de> Deserialize<'de> for Formula {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_formula(&text).map_err(serde::de::Error::custom)
    }
}

/// Frame and domain conditions `C`. Constant domains are `inc && dec`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FrameSpec {
    #[serde(default)]
    pub serial: bool,
    /// General path conditions `G(n,k)`: `wRⁿu ∧ wRᵏv → uRv`.
    #[serde(default)]
    pub paths: BTreeSet<(usize, usize)>,
    #[serde(default)]
    pub inc: bool,
    #[serde(default)]
    pub dec: bool,
    #[serde(default)]
    pub nonempty: bool,
}

impl FrameSpec {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn serial(mut self) -> Self {
        self.serial = true;
        self
    }

    pub fn path(mut self, n: usize, k: usize) -> Self {
        self.paths.insert((n, k));
        self
    }

    pub fn inc(mut self) -> Self {
        self.inc = true;
        self
    }

    pub fn dec(mut self) -> Self {
        self.dec = true;
        self
    }

    pub fn constant(self) -> Self {
        self.inc().dec()
    }

    pub fn nonempty(mut self) -> Self {
        self.nonempty = true;
        self
    }

    pub fn is_constant(&self) -> bool {
        self.inc && self.dec
    }
}

impl fmt::Display for FrameSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.serial {
            parts.push("S".into());
        }
        for (n, k) in &self.paths {
            parts.push(format!("G({n},{k})"));
        }
        match (self.inc, self.dec) {
            (true, true) => parts.push("C_d".into()),
            (true, false) => parts.push("I_d".into()),
            (false, true) => parts.push("D_d".into()),
            _ => {}
        }
        if self.nonempty {
            parts.push("N_d".into());
        }
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(args: &[&str]) -> Formula {
        Formula::pred("p", args)
    }

    #[test]
    fn substitute_replaces_free_occurrence() {
        assert_eq!(p(&["x"]).substitute("y", "x"), p(&["y"]));
    }

    #[test]
    fn substitute_leaves_bound_variable() {
        let f = Formula::exists("x", p(&["x"]));
        assert_eq!(f.substitute("y", "x"), f);
    }

    #[test]
    fn substitute_avoids_capture() {
        let f = Formula::exists("y", p(&["x", "y"]));
        let g = f.substitute("y", "x");
        assert_eq!(g, Formula::exists("y'", p(&["y", "y'"])));
        // independent capture check: the substituted y stays free
        assert_eq!(g.free_vars(), BTreeSet::from(["y".to_string()]));
    }

    #[test]
    fn free_vars_examples() {
        let f = Formula::exists("x", p(&["x", "y"]));
        assert_eq!(f.free_vars(), BTreeSet::from(["y".to_string()]));
        assert!(Formula::Bottom.free_vars().is_empty());
        let g = Formula::or(p(&["x"]), Formula::exists("x", Formula::pred("q", &["x"])));
        assert_eq!(g.free_vars(), BTreeSet::from(["x".to_string()]));
    }

    #[test]
    fn alpha_equivalence_ignores_binder_names() {
        let a = Formula::exists("x", p(&["x", "z"]));
        let b = Formula::exists("u", p(&["u", "z"]));
        let c = Formula::exists("u", p(&["z", "u"]));
        assert!(a.alpha_eq(&b));
        assert!(!a.alpha_eq(&c));
    }

    #[test]
    fn render_parenthesizes_by_level() {
        let f = Formula::or(Formula::exists("x", p(&["x"])), Formula::atom("q"));
        assert_eq!(render_formula(&f), "(exists x. p(x)) | q");
        let g = Formula::neg(Formula::or(Formula::atom("a"), Formula::atom("b")));
        assert_eq!(render_formula(&g), "~(a | b)");
        let h = Formula::or(Formula::atom("a"), Formula::or(Formula::atom("b"), Formula::atom("c")));
        assert_eq!(render_formula(&h), "a | (b | c)");
    }

    #[test]
    fn frame_display() {
        let c = FrameSpec::empty().inc().path(0, 2);
        assert_eq!(c.to_string(), "{G(0,2), I_d}");
    }
}
