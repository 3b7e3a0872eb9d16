//! Labeled sequents `R, Γ ⊢ Δ`, nested sequents, and the translations
//! `𝔏` (nested to labeled) and `𝔑` (labeled tree to nested).

mod text;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{Formula, Var};

pub use text::{parse_labeled, parse_nested};

/// Label name (`w0`, `u`, `v1`, ...).
pub type Label = String;

/// The label of a nested sequent's root unless another one is given.
pub const ROOT: &str = "w0";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequentError {
    #[error("label `{0}` occurs more than once")]
    DuplicateLabel(Label),
    #[error("relational atoms do not form a tree")]
    NotATree,
}

/// `R, Γ ⊢ Δ` with all four parts kept as multisets (vectors whose order is
/// irrelevant for equality, see [`LabeledSequent::equiv`]).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabeledSequent {
    #[serde(default)]
    pub rel: Vec<(Label, Label)>,
    #[serde(default)]
    pub dom: Vec<(Var, Label)>,
    #[serde(default)]
    pub left: Vec<(Label, Formula)>,
    #[serde(default)]
    pub right: Vec<(Label, Formula)>,
}

impl LabeledSequent {
    pub fn new() -> Self {
        Self::default()
    }

    /// `⊢ w : φ`
    pub fn goal(w: &str, phi: Formula) -> Self {
        LabeledSequent {
            right: vec![(w.to_string(), phi)],
            ..Self::default()
        }
    }

    pub fn with_rel(mut self, w: &str, u: &str) -> Self {
        self.rel.push((w.into(), u.into()));
        self
    }

    pub fn with_dom(mut self, x: &str, w: &str) -> Self {
        self.dom.push((x.into(), w.into()));
        self
    }

    pub fn with_left(mut self, w: &str, phi: Formula) -> Self {
        self.left.push((w.into(), phi));
        self
    }

    pub fn with_right(mut self, w: &str, phi: Formula) -> Self {
        self.right.push((w.into(), phi));
        self
    }

    /// `Λ₁ ⊗ Λ₂`: component-wise multiset union.
    pub fn compose(&self, other: &LabeledSequent) -> LabeledSequent {
        let mut out = self.clone();
        out.rel.extend(other.rel.iter().cloned());
        out.dom.extend(other.dom.iter().cloned());
        out.left.extend(other.left.iter().cloned());
        out.right.extend(other.right.iter().cloned());
        out
    }

    /// Every label mentioned anywhere in the sequent.
    pub fn labels(&self) -> BTreeSet<Label> {
        let mut out = BTreeSet::new();
        for (w, u) in &self.rel {
            out.insert(w.clone());
            out.insert(u.clone());
        }
        out.extend(self.dom.iter().map(|(_, w)| w.clone()));
        out.extend(self.left.iter().map(|(w, _)| w.clone()));
        out.extend(self.right.iter().map(|(w, _)| w.clone()));
        out
    }

    /// Variables in domain atoms together with free variables of formulas.
    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out: BTreeSet<Var> = self.dom.iter().map(|(x, _)| x.clone()).collect();
        for (_, phi) in self.left.iter().chain(&self.right) {
            out.extend(phi.free_vars());
        }
        out
    }

    /// Every variable name, bound ones included.
    pub fn all_names(&self) -> BTreeSet<Var> {
        let mut out: BTreeSet<Var> = self.dom.iter().map(|(x, _)| x.clone()).collect();
        for (_, phi) in self.left.iter().chain(&self.right) {
            out.extend(phi.all_vars());
        }
        out
    }

    /// `Γ ↾ w`
    pub fn left_at(&self, w: &str) -> Vec<Formula> {
        restrict(&self.left, w)
    }

    /// `Δ ↾ w`
    pub fn right_at(&self, w: &str) -> Vec<Formula> {
        restrict(&self.right, w)
    }

    pub fn dom_at(&self, w: &str) -> Vec<Var> {
        self.dom
            .iter()
            .filter(|(_, v)| v == w)
            .map(|(x, _)| x.clone())
            .collect()
    }

    /// Sorted copy with α-normal formulas; two sequents are equal as
    /// multisets iff their normal forms are identical.
    pub fn normalized(&self) -> LabeledSequent {
        let mut out = LabeledSequent {
            rel: self.rel.clone(),
            dom: self.dom.clone(),
            left: self.left.iter().map(|(w, f)| (w.clone(), f.alpha_normal())).collect(),
            right: self.right.iter().map(|(w, f)| (w.clone(), f.alpha_normal())).collect(),
        };
        out.rel.sort();
        out.dom.sort();
        out.left.sort();
        out.right.sort();
        out
    }

    /// Multiset equality, formulas compared up to α-equivalence.
    pub fn equiv(&self, other: &LabeledSequent) -> bool {
        self.normalized() == other.normalized()
    }

    /// Applies a label renaming to every part of the sequent.
    pub fn rename_labels(&self, map: &BTreeMap<Label, Label>) -> LabeledSequent {
        let r = |w: &Label| map.get(w).cloned().unwrap_or_else(|| w.clone());
        LabeledSequent {
            rel: self.rel.iter().map(|(w, u)| (r(w), r(u))).collect(),
            dom: self.dom.iter().map(|(x, w)| (x.clone(), r(w))).collect(),
            left: self.left.iter().map(|(w, f)| (r(w), f.clone())).collect(),
            right: self.right.iter().map(|(w, f)| (r(w), f.clone())).collect(),
        }
    }

    /// The root if `R` forms a tree covering every mentioned label, or the
    /// single mentioned label when `R` is empty. A sequent mentioning no
    /// label at all is read as the bare root `w0`.
    pub fn tree_root(&self) -> Option<Label> {
        let labels = self.labels();
        if self.rel.is_empty() {
            return match labels.len() {
                0 => Some(ROOT.to_string()),
                1 => labels.into_iter().next(),
                _ => None,
            };
        }
        let mut parent: BTreeMap<&str, &str> = BTreeMap::new();
        for (w, u) in &self.rel {
            if parent.insert(u, w).is_some() {
                return None;
            }
        }
        let roots: Vec<&Label> = labels.iter().filter(|l| !parent.contains_key(l.as_str())).collect();
        if roots.len() != 1 {
            return None;
        }
        let root = roots[0];
        // every label must reach the root by following parents without cycling
        for l in &labels {
            let mut cur = l.as_str();
            let mut steps = 0;
            while let Some(&p) = parent.get(cur) {
                cur = p;
                steps += 1;
                if steps > labels.len() {
                    return None;
                }
            }
            if cur != root {
                return None;
            }
        }
        Some(root.clone())
    }

    pub fn is_labeled_tree(&self) -> bool {
        self.tree_root().is_some()
    }

    /// `𝔑`: the nested sequent encoded by a labeled tree sequent.
    pub fn to_nested(&self) -> Result<NestedSequent, SequentError> {
        let root = self.tree_root().ok_or(SequentError::NotATree)?;
        let mut children: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for (w, u) in &self.rel {
            children.entry(w).or_default().push(u);
        }
        Ok(self.nest_at(&root, &children))
    }

    fn nest_at(&self, v: &str, children: &BTreeMap<&str, Vec<&str>>) -> NestedSequent {
        NestedSequent {
            label: v.to_string(),
            gamma: self.left_at(v),
            theta: self.dom_at(v),
            delta: self.right_at(v),
            children: children
                .get(v)
                .map(|cs| cs.iter().map(|c| self.nest_at(c, children)).collect())
                .unwrap_or_default(),
        }
    }
}

fn restrict(items: &[(Label, Formula)], w: &str) -> Vec<Formula> {
    items
        .iter()
        .filter(|(v, _)| v == w)
        .map(|(_, f)| f.clone())
        .collect()
}

impl fmt::Display for LabeledSequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&text::render_labeled(self))
    }
}

/// `Γ; Θ ⊢ Δ, [Ψ₁]_{u₁}, …, [Ψₘ]_{uₘ}` with its own label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NestedSequent {
    pub label: Label,
    #[serde(default)]
    pub gamma: Vec<Formula>,
    #[serde(default)]
    pub theta: Vec<Var>,
    #[serde(default)]
    pub delta: Vec<Formula>,
    #[serde(default)]
    pub children: Vec<NestedSequent>,
}

impl Default for NestedSequent {
    fn default() -> Self {
        NestedSequent::empty(ROOT)
    }
}

impl NestedSequent {
    pub fn empty(label: &str) -> Self {
        NestedSequent {
            label: label.to_string(),
            gamma: Vec::new(),
            theta: Vec::new(),
            delta: Vec::new(),
            children: Vec::new(),
        }
    }

    /// `⊢ φ` at the root `w0`.
    pub fn goal(phi: Formula) -> Self {
        let mut s = NestedSequent::empty(ROOT);
        s.delta.push(phi);
        s
    }

    /// Labels in preorder.
    pub fn labels(&self) -> Vec<Label> {
        let mut out = Vec::new();
        self.walk(&mut |c| out.push(c.label.clone()));
        out
    }

    /// Preorder traversal over components.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a NestedSequent)) {
        f(self);
        for c in &self.children {
            c.walk(f);
        }
    }

    pub fn component(&self, label: &str) -> Option<&NestedSequent> {
        if self.label == label {
            return Some(self);
        }
        self.children.iter().find_map(|c| c.component(label))
    }

    pub fn component_mut(&mut self, label: &str) -> Option<&mut NestedSequent> {
        if self.label == label {
            return Some(self);
        }
        self.children.iter_mut().find_map(|c| c.component_mut(label))
    }

    pub fn check_labels(&self) -> Result<(), SequentError> {
        let mut seen = BTreeSet::new();
        for l in self.labels() {
            if !seen.insert(l.clone()) {
                return Err(SequentError::DuplicateLabel(l));
            }
        }
        Ok(())
    }

    /// Every variable name, free, bound or in a `Θ`.
    pub fn all_names(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.walk(&mut |c| {
            out.extend(c.theta.iter().cloned());
            for f in c.gamma.iter().chain(&c.delta) {
                out.extend(f.all_vars());
            }
        });
        out
    }

    /// `𝔏`: rooted at this sequent's own label.
    pub fn to_labeled(&self) -> Result<LabeledSequent, SequentError> {
        self.check_labels()?;
        let mut out = LabeledSequent::new();
        self.label_into(&mut out);
        Ok(out)
    }

    fn label_into(&self, out: &mut LabeledSequent) {
        let v = &self.label;
        out.dom.extend(self.theta.iter().map(|x| (x.clone(), v.clone())));
        out.left.extend(self.gamma.iter().map(|f| (v.clone(), f.clone())));
        out.right.extend(self.delta.iter().map(|f| (v.clone(), f.clone())));
        for c in &self.children {
            out.rel.push((v.clone(), c.label.clone()));
        }
        for c in &self.children {
            c.label_into(out);
        }
    }

    /// Equality up to multiset reordering, child order and α-equivalence.
    pub fn equiv(&self, other: &NestedSequent) -> bool {
        if self.label != other.label {
            return false;
        }
        match (self.to_labeled(), other.to_labeled()) {
            (Ok(a), Ok(b)) => a.equiv(&b),
            _ => false,
        }
    }

    /// Depth of the component tree; a flat sequent has depth 0.
    pub fn depth(&self) -> usize {
        self.children.iter().map(|c| 1 + c.depth()).max().unwrap_or(0)
    }

    pub fn component_count(&self) -> usize {
        1 + self.children.iter().map(|c| c.component_count()).sum::<usize>()
    }
}

impl fmt::Display for NestedSequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&text::render_nested(self))
    }
}

/// `𝔏(Φ)`
pub fn to_labeled(phi: &NestedSequent) -> Result<LabeledSequent, SequentError> {
    phi.to_labeled()
}

/// `𝔑(Λ)`
pub fn to_nested(lambda: &LabeledSequent) -> Result<NestedSequent, SequentError> {
    lambda.to_nested()
}

/// `(true, root)` when `R` forms a tree over all labels.
pub fn is_labeled_tree(lambda: &LabeledSequent) -> (bool, Option<Label>) {
    let root = lambda.tree_root();
    (root.is_some(), root)
}

pub fn compose(a: &LabeledSequent, b: &LabeledSequent) -> LabeledSequent {
    a.compose(b)
}

/// Smallest `w{n}` that is not in `taken`, with `n` above every numeric
/// suffix already used so labels are never recycled within a proof.
pub fn fresh_label<'a>(taken: impl IntoIterator<Item = &'a Label>) -> Label {
    fresh_numbered("w", taken)
}

/// Fresh variable `y{n}` avoiding `taken`.
pub fn fresh_var<'a>(taken: impl IntoIterator<Item = &'a Var>) -> Var {
    fresh_numbered("y", taken)
}

fn fresh_numbered<'a>(prefix: &str, taken: impl IntoIterator<Item = &'a String>) -> String {
    let taken: BTreeSet<&String> = taken.into_iter().collect();
    let mut n = taken
        .iter()
        .filter_map(|s| s.strip_prefix(prefix).and_then(|d| d.parse::<usize>().ok()))
        .map(|k| k + 1)
        .max()
        .unwrap_or(0);
    loop {
        let name = format!("{prefix}{n}");
        if !taken.contains(&name) {
            return name;
        }
        n += 1;
    }
}
