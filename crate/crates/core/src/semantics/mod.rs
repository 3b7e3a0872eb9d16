//! Finite Kripke models with varying domains.
//!
//! Predicates are interpreted possibilistically: the extension of `p` at a
//! world may contain any tuple from the union of all domains. Quantifiers
//! are actualist: `∃x φ` at `w` ranges over `D(w)` only. Free variables of
//! labeled formulas range over the union domain.

mod search;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sequents::{Label, LabeledSequent};
use crate::syntax::{Formula, FrameSpec, Var};

pub use search::{
    find_countermodel, find_sequent_countermodel, for_each_model, Bounds, Countermodel,
    SequentCountermodel,
};

pub type World = usize;
pub type Individual = usize;
pub type Assignment = BTreeMap<Var, Individual>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("variable `{0}` is not assigned")]
    Unassigned(Var),
    #[error("label `{0}` is not interpreted")]
    Uninterpreted(Label),
    #[error("world {0} is out of range")]
    NoSuchWorld(World),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KripkeModel {
    /// Worlds are `0..worlds`.
    pub worlds: usize,
    pub rel: BTreeSet<(World, World)>,
    /// `domain[w]` is `D(w)`.
    pub domain: Vec<BTreeSet<Individual>>,
    /// Predicate name to its extension at each world.
    pub valuation: BTreeMap<String, Vec<BTreeSet<Vec<Individual>>>>,
}

impl KripkeModel {
    pub fn new(worlds: usize) -> Self {
        KripkeModel {
            worlds,
            rel: BTreeSet::new(),
            domain: vec![BTreeSet::new(); worlds],
            valuation: BTreeMap::new(),
        }
    }

    pub fn with_edge(mut self, w: World, u: World) -> Self {
        self.rel.insert((w, u));
        self
    }

    pub fn with_domain(mut self, w: World, items: &[Individual]) -> Self {
        self.domain[w] = items.iter().copied().collect();
        self
    }

    pub fn with_fact(mut self, pred: &str, w: World, args: &[Individual]) -> Self {
        let ext = self
            .valuation
            .entry(pred.to_string())
            .or_insert_with(|| vec![BTreeSet::new(); self.worlds]);
        ext[w].insert(args.to_vec());
        self
    }

    pub fn universe(&self) -> BTreeSet<Individual> {
        self.domain.iter().flatten().copied().collect()
    }

    pub fn successors(&self, w: World) -> impl Iterator<Item = World> + '_ {
        self.rel.iter().filter(move |(a, _)| *a == w).map(|(_, b)| *b)
    }

    pub fn holds(&self, pred: &str, w: World, args: &[Individual]) -> bool {
        self.valuation
            .get(pred)
            .and_then(|ext| ext.get(w))
            .is_some_and(|set| set.contains(args))
    }

    /// The model with worlds renamed by `perm` (`perm[old] = new`) and
    /// individuals by `iperm`.
    pub fn permuted(&self, perm: &[World], iperm: &[Individual]) -> KripkeModel {
        let mut out = KripkeModel::new(self.worlds);
        out.rel = self.rel.iter().map(|&(a, b)| (perm[a], perm[b])).collect();
        for (w, d) in self.domain.iter().enumerate() {
            out.domain[perm[w]] = d.iter().map(|&i| iperm[i]).collect();
        }
        for (p, ext) in &self.valuation {
            let mut new = vec![BTreeSet::new(); self.worlds];
            for (w, set) in ext.iter().enumerate() {
                new[perm[w]] = set
                    .iter()
                    .map(|t| t.iter().map(|&i| iperm[i]).collect())
                    .collect();
            }
            out.valuation.insert(p.clone(), new);
        }
        out
    }
}

/// Truth of `phi` at world `w` under `g`.
pub fn eval(m: &KripkeModel, w: World, g: &Assignment, phi: &Formula) -> Result<bool, SemanticsError> {
    if w >= m.worlds {
        return Err(SemanticsError::NoSuchWorld(w));
    }
    Ok(match phi {
        Formula::Pred { name, args } => {
            let tuple = args
                .iter()
                .map(|x| g.get(x).copied().ok_or_else(|| SemanticsError::Unassigned(x.clone())))
                .collect::<Result<Vec<_>, _>>()?;
            m.holds(name, w, &tuple)
        }
        Formula::Bottom => false,
        Formula::Neg(b) => !eval(m, w, g, b)?,
        Formula::Or(l, r) => eval(m, w, g, l)? || eval(m, w, g, r)?,
        Formula::Dia(b) => {
            for u in m.successors(w) {
                if eval(m, u, g, b)? {
                    return Ok(true);
                }
            }
            false
        }
        Formula::Exists(x, b) => {
            let mut h = g.clone();
            for &d in &m.domain[w] {
                h.insert(x.clone(), d);
                if eval(m, w, &h, b)? {
                    return Ok(true);
                }
            }
            false
        }
    })
}

fn compose(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = a.len();
    let mut out = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = (0..n).any(|k| a[i][k] && b[k][j]);
        }
    }
    out
}

fn power(r: &[Vec<bool>], n: usize) -> Vec<Vec<bool>> {
    let size = r.len();
    let mut acc: Vec<Vec<bool>> = (0..size).map(|i| (0..size).map(|j| i == j).collect()).collect();
    for _ in 0..n {
        acc = compose(&acc, r);
    }
    acc
}

/// Whether the model's frame and domains satisfy every condition in `frame`.
pub fn check_frame(m: &KripkeModel, frame: &FrameSpec) -> bool {
    let n = m.worlds;
    let mut r = vec![vec![false; n]; n];
    for &(a, b) in &m.rel {
        r[a][b] = true;
    }
    if frame.serial && (0..n).any(|w| !r[w].iter().any(|&x| x)) {
        return false;
    }
    for &(pn, pk) in &frame.paths {
        let (rn, rk) = (power(&r, pn), power(&r, pk));
        for w in 0..n {
            for u in 0..n {
                for v in 0..n {
                    if rn[w][u] && rk[w][v] && !r[u][v] {
                        return false;
                    }
                }
            }
        }
    }
    for &(a, b) in &m.rel {
        if frame.inc && !m.domain[a].is_subset(&m.domain[b]) {
            return false;
        }
        if frame.dec && !m.domain[b].is_subset(&m.domain[a]) {
            return false;
        }
    }
    !(frame.nonempty && m.domain.iter().any(|d| d.is_empty()))
}

/// Maps labels to worlds and sequent variables to individuals.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interpretation {
    pub labels: BTreeMap<Label, World>,
    pub vars: Assignment,
}

impl Interpretation {
    fn world(&self, w: &str) -> Result<World, SemanticsError> {
        self.labels
            .get(w)
            .copied()
            .ok_or_else(|| SemanticsError::Uninterpreted(w.to_string()))
    }

    fn var(&self, x: &str) -> Result<Individual, SemanticsError> {
        self.vars
            .get(x)
            .copied()
            .ok_or_else(|| SemanticsError::Unassigned(x.to_string()))
    }
}

/// Whether all relational and domain atoms hold under `i`.
pub fn atoms_hold(m: &KripkeModel, i: &Interpretation, seq: &LabeledSequent) -> Result<bool, SemanticsError> {
    for (w, u) in &seq.rel {
        if !m.rel.contains(&(i.world(w)?, i.world(u)?)) {
            return Ok(false);
        }
    }
    for (x, w) in &seq.dom {
        let world = i.world(w)?;
        if world >= m.worlds {
            return Err(SemanticsError::NoSuchWorld(world));
        }
        if !m.domain[world].contains(&i.var(x)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `(atoms ∧ ⋀ left) → ⋁ right` under `i`.
pub fn eval_labeled_sequent(
    m: &KripkeModel,
    i: &Interpretation,
    seq: &LabeledSequent,
) -> Result<bool, SemanticsError> {
    for x in seq.vars() {
        i.var(&x)?;
    }
    for w in seq.labels() {
        i.world(&w)?;
    }
    if !atoms_hold(m, i, seq)? {
        return Ok(true);
    }
    for (w, phi) in &seq.left {
        if !eval(m, i.world(w)?, &i.vars, phi)? {
            return Ok(true);
        }
    }
    for (w, phi) in &seq.right {
        if eval(m, i.world(w)?, &i.vars, phi)? {
            return Ok(true);
        }
    }
    Ok(false)
}

impl fmt::Display for KripkeModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let set = |s: &BTreeSet<Individual>| {
            let items: Vec<String> = s.iter().map(|i| format!("d{i}")).collect();
            format!("{{{}}}", items.join(", "))
        };
        writeln!(f, "world | successors | domain | true atoms")?;
        for w in 0..self.worlds {
            let succ: Vec<String> = self.successors(w).map(|u| format!("w{u}")).collect();
            let mut atoms = Vec::new();
            for (p, ext) in &self.valuation {
                for t in &ext[w] {
                    if t.is_empty() {
                        atoms.push(p.clone());
                    } else {
                        let args: Vec<String> = t.iter().map(|i| format!("d{i}")).collect();
                        atoms.push(format!("{p}({})", args.join(", ")));
                    }
                }
            }
            writeln!(
                f,
                "w{w} | {} | {} | {}",
                if succ.is_empty() { "-".to_string() } else { succ.join(", ") },
                set(&self.domain[w]),
                if atoms.is_empty() { "-".to_string() } else { atoms.join(", ") },
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn basic_clauses() {
        let m = KripkeModel::new(1);
        let g = Assignment::new();
        assert!(!eval(&m, 0, &g, &Formula::Bottom).unwrap());
        assert!(eval(&m, 0, &g, &f("~<>false")).unwrap());
        assert!(!eval(&m, 0, &g, &f("exists x. p(x) | ~p(x)")).unwrap());
        assert!(!eval(&m, 0, &g, &f("<>~false")).unwrap());
    }

    #[test]
    fn unassigned_variable() {
        let m = KripkeModel::new(1).with_domain(0, &[0]);
        assert_eq!(
            eval(&m, 0, &Assignment::new(), &f("p(x)")),
            Err(SemanticsError::Unassigned("x".into()))
        );
    }

    #[test]
    fn path_conditions() {
        let refl = FrameSpec::empty().path(0, 0);
        assert!(!check_frame(&KripkeModel::new(1), &refl));
        assert!(check_frame(&KripkeModel::new(1).with_edge(0, 0), &refl));
        let trans = FrameSpec::empty().path(0, 2);
        let chain = KripkeModel::new(3).with_edge(0, 1).with_edge(1, 2);
        assert!(!check_frame(&chain, &trans));
        assert!(check_frame(&chain.clone().with_edge(0, 2), &trans));
        let eucl = FrameSpec::empty().path(1, 1);
        let fork = KripkeModel::new(3).with_edge(0, 1).with_edge(0, 2);
        assert!(!check_frame(&fork, &eucl));
        let closed = fork
            .with_edge(1, 2)
            .with_edge(2, 1)
            .with_edge(1, 1)
            .with_edge(2, 2);
        assert!(check_frame(&closed, &eucl));
    }

    #[test]
    fn domain_conditions() {
        let m = KripkeModel::new(2).with_edge(0, 1).with_domain(0, &[0]).with_domain(1, &[0, 1]);
        assert!(check_frame(&m, &FrameSpec::empty().inc()));
        assert!(!check_frame(&m, &FrameSpec::empty().dec()));
        assert!(check_frame(&m, &FrameSpec::empty().nonempty()));
        assert!(!check_frame(&KripkeModel::new(1), &FrameSpec::empty().nonempty()));
        assert!(!check_frame(&KripkeModel::new(1), &FrameSpec::empty().serial()));
    }

    #[test]
    fn labeled_sequents() {
        let m = KripkeModel::new(1);
        let i = Interpretation {
            labels: [("w".to_string(), 0)].into(),
            vars: Assignment::new(),
        };
        let valid = LabeledSequent::goal("w", f("~<>false"));
        assert!(eval_labeled_sequent(&m, &i, &valid).unwrap());
        let vacuous = LabeledSequent::new().with_left("w", Formula::Bottom);
        assert!(eval_labeled_sequent(&m, &i, &vacuous).unwrap());
        let empty = LabeledSequent::new().with_left("w", f("p"));
        assert!(!eval_labeled_sequent(&m.clone().with_fact("p", 0, &[]), &i, &empty).unwrap());
        assert!(eval_labeled_sequent(&m, &Interpretation::default(), &valid).is_err());
    }
}
