//! Bounded backward proof search in the nested calculus.
//!
//! At each node the search tries, in order: closure by `bot_l`/`ax`; the
//! invertible propositional rules; `p_dia` and `s_ex1` instances not yet
//! used on the branch; `dia_l`/`exists_l`; and finally a choice among
//! `s_ex2` and `d` instances. Everything before the final choice only adds
//! information to the sequent (or is invertible), so the search commits to
//! it without backtracking. Creating rules draw on a per-branch allowance
//! that is raised by iterative deepening.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calculi::{apply_rule, check, CalculusSpec, ProofTree, RuleId, RuleParams, Sequent};
use crate::grammar::Character;
use crate::propagation::{PropagationGraph, Reachability};
use crate::sequents::{fresh_label, fresh_var, Label, NestedSequent};
use crate::syntax::{Formula, FrameSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Applications of `dia_l`, `exists_l`, `d` and `s_ex2` per branch.
    pub max_creations: usize,
    pub max_depth: usize,
    pub max_nodes: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_creations: 8,
            max_depth: 200,
            max_nodes: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetReport {
    pub nodes: usize,
    /// Largest creation allowance fully explored.
    pub creations_explored: Option<usize>,
    pub hit_node_limit: bool,
    pub hit_depth_limit: bool,
}

impl fmt::Display for BudgetReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "no proof after {} nodes", self.nodes)?;
        if let Some(c) = self.creations_explored {
            write!(f, ", creation allowance up to {c} explored")?;
        }
        if self.hit_node_limit {
            write!(f, ", node limit reached")?;
        }
        if self.hit_depth_limit {
            write!(f, ", depth limit reached")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum SearchResult {
    Proved(ProofTree<NestedSequent>),
    Exhausted(BudgetReport),
}

impl SearchResult {
    pub fn is_proved(&self) -> bool {
        matches!(self, SearchResult::Proved(_))
    }

    pub fn proof(&self) -> Option<&ProofTree<NestedSequent>> {
        match self {
            SearchResult::Proved(p) => Some(p),
            SearchResult::Exhausted(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Goal {
    /// `⊢ φ` at `w0`; φ must be closed.
    Formula(Formula),
    Sequent(NestedSequent),
}

impl From<Formula> for Goal {
    fn from(phi: Formula) -> Self {
        Goal::Formula(phi)
    }
}

impl From<NestedSequent> for Goal {
    fn from(s: NestedSequent) -> Self {
        Goal::Sequent(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProveError {
    #[error("goal formula has free variables: {0}")]
    NotClosed(String),
    #[error("malformed goal: {0}")]
    Malformed(String),
}

/// Searches for a proof of `goal` in the nested calculus for `frame`.
pub fn prove(goal: impl Into<Goal>, frame: &FrameSpec, budget: &SearchBudget) -> Result<SearchResult, ProveError> {
    let root = match goal.into() {
        Goal::Formula(phi) => {
            let free = phi.free_vars();
            if !free.is_empty() {
                let names: Vec<String> = free.into_iter().collect();
                return Err(ProveError::NotClosed(names.join(", ")));
            }
            NestedSequent::goal(phi)
        }
        Goal::Sequent(s) => {
            s.check_labels().map_err(|e| ProveError::Malformed(e.to_string()))?;
            s
        }
    };
    let spec = CalculusSpec::nested(frame.clone());
    let mut search = Search {
        spec,
        budget: *budget,
        nodes: 0,
        out_of_nodes: false,
        hit_depth: false,
    };
    let mut explored = None;
    for allowance in 0..=budget.max_creations {
        let branch = Branch::default();
        if let Some(proof) = search.node(&root, &branch, allowance, 0) {
            if let Err(e) = check(&search.spec, &proof) {
                panic!("prover produced an invalid proof: {e}");
            }
            return Ok(SearchResult::Proved(proof));
        }
        if search.out_of_nodes {
            break;
        }
        explored = Some(allowance);
    }
    Ok(SearchResult::Exhausted(BudgetReport {
        nodes: search.nodes,
        creations_explored: explored,
        hit_node_limit: search.out_of_nodes,
        hit_depth_limit: search.hit_depth,
    }))
}

/// Branch-local memory: instances already applied and ancestor shapes.
#[derive(Clone, Default)]
struct Branch {
    used: HashSet<String>,
    seen: HashSet<String>,
}

struct Search {
    spec: CalculusSpec,
    budget: SearchBudget,
    nodes: usize,
    out_of_nodes: bool,
    hit_depth: bool,
}

type Proof = ProofTree<NestedSequent>;

/// Shape of a sequent with labels forgotten and children sorted.
fn canonical(s: &NestedSequent) -> String {
    let mut gamma: Vec<String> = s.gamma.iter().map(|f| f.alpha_normal().to_string()).collect();
    let mut theta = s.theta.clone();
    let mut delta: Vec<String> = s.delta.iter().map(|f| f.alpha_normal().to_string()).collect();
    let mut kids: Vec<String> = s.children.iter().map(canonical).collect();
    gamma.sort();
    theta.sort();
    delta.sort();
    kids.sort();
    format!("{}; {} |- {} [{}]", gamma.join(","), theta.join(","), delta.join(","), kids.join(" "))
}

fn key(rule: &str, w: &str, phi: &Formula, extra: &str) -> String {
    format!("{rule}|{w}|{}|{extra}", phi.alpha_normal())
}

/// A candidate rule application.
struct Step {
    rule: RuleId,
    params: RuleParams,
    key: Option<String>,
}

impl Search {
    fn node(&mut self, seq: &NestedSequent, branch: &Branch, allowance: usize, depth: usize) -> Option<Proof> {
        if self.out_of_nodes {
            return None;
        }
        self.nodes += 1;
        if self.nodes > self.budget.max_nodes {
            self.out_of_nodes = true;
            return None;
        }
        if depth >= self.budget.max_depth {
            self.hit_depth = true;
            return None;
        }
        let shape = canonical(seq);
        if branch.seen.contains(&shape) {
            return None;
        }
        let mut branch = branch.clone();
        branch.seen.insert(shape);

        if let Some(step) = closure(seq) {
            return Some(ProofTree::leaf(step.rule, seq.clone(), step.params));
        }
        if let Some(step) = invertible(seq) {
            return self.commit(seq, step, &branch, allowance, depth);
        }
        if let Some(step) = self.reachability_step(seq, &branch) {
            return self.commit(seq, step, &branch, allowance, depth);
        }
        if let Some(step) = creating_left(seq) {
            if allowance == 0 {
                return None;
            }
            return self.commit(seq, step, &branch, allowance - 1, depth);
        }
        if allowance == 0 {
            return None;
        }
        for step in self.choices(seq, &branch) {
            if let Some(p) = self.commit(seq, step, &branch, allowance - 1, depth) {
                return Some(p);
            }
            if self.out_of_nodes {
                return None;
            }
        }
        None
    }

    fn commit(&mut self, seq: &NestedSequent, step: Step, branch: &Branch, allowance: usize, depth: usize) -> Option<Proof> {
        let premises = apply_rule(&self.spec, seq, step.rule, &step.params)
            .unwrap_or_else(|e| panic!("search chose an inapplicable step {}: {e}", step.rule));
        let mut branch = branch.clone();
        if let Some(k) = step.key {
            branch.used.insert(k);
        }
        let mut proofs = Vec::with_capacity(premises.len());
        for p in &premises {
            proofs.push(self.node(p, &branch, allowance, depth + 1)?);
        }
        Some(ProofTree::node(step.rule, seq.clone(), step.params, proofs))
    }

    fn reachability_step(&self, seq: &NestedSequent, branch: &Branch) -> Option<Step> {
        let labeled = seq.to_labeled().ok()?;
        let graph = PropagationGraph::of_sequent(&labeled);
        let paths = Reachability::compute(&graph, &self.spec.path_system());
        let doms = self
            .spec
            .domain_system()
            .map(|(sys, a)| (Reachability::compute(&graph, &sys), a));
        let mut found = None;
        seq.walk(&mut |c| {
            if found.is_some() {
                return;
            }
            for phi in &c.delta {
                match phi {
                    Formula::Dia(body) => {
                        for u in paths.targets(Character::Dia, &c.label).unwrap_or_default() {
                            let k = key("p_dia", &c.label, phi, &u);
                            if branch.used.contains(&k) || seq.right_has(&u, body) {
                                continue;
                            }
                            let params = RuleParams::at(&c.label)
                                .formula(phi.clone())
                                .target(&u)
                                .witness(paths.witness(Character::Dia, &c.label, &u).expect("target is reachable"));
                            found = Some(Step { rule: RuleId::PDia, params, key: Some(k) });
                            return;
                        }
                    }
                    Formula::Exists(x, body) => {
                        for (y, u, witness) in available(seq, &graph, &doms, &c.label) {
                            let k = key("s_ex1", &c.label, phi, &y);
                            if branch.used.contains(&k) || seq.right_has(&c.label, &body.substitute(&y, x)) {
                                continue;
                            }
                            let mut params = RuleParams::at(&c.label).formula(phi.clone()).var(&y);
                            if let Some(w) = witness {
                                params = params.target(&u).witness(w);
                            }
                            found = Some(Step { rule: RuleId::SEx1, params, key: Some(k) });
                            return;
                        }
                    }
                    _ => {}
                }
            }
        });
        found
    }

    /// `s_ex2` instances first, then `d` at components without children.
    fn choices(&self, seq: &NestedSequent, branch: &Branch) -> Vec<Step> {
        let mut out = Vec::new();
        if self.spec.frame.nonempty {
            let labeled = match seq.to_labeled() {
                Ok(l) => l,
                Err(_) => return out,
            };
            let graph = PropagationGraph::of_sequent(&labeled);
            let doms = self
                .spec
                .domain_system()
                .map(|(sys, a)| (Reachability::compute(&graph, &sys), a));
            let y = fresh_var(seq.all_names().iter());
            seq.walk(&mut |c| {
                for phi in &c.delta {
                    if !matches!(phi, Formula::Exists(..)) {
                        continue;
                    }
                    let targets: Vec<Label> = match &doms {
                        None => vec![c.label.clone()],
                        Some((reach, a)) => reach.targets(*a, &c.label).unwrap_or_default().into_iter().collect(),
                    };
                    for u in targets {
                        let k = key("s_ex2", &c.label, phi, &u);
                        if branch.used.contains(&k) {
                            continue;
                        }
                        let mut params = RuleParams::at(&c.label).formula(phi.clone()).var(&y).target(&u);
                        if let Some((reach, a)) = &doms {
                            params = params.witness(reach.witness(*a, &c.label, &u).expect("target is reachable"));
                        }
                        out.push(Step { rule: RuleId::SEx2, params, key: Some(k) });
                    }
                }
            });
        }
        if self.spec.frame.serial {
            let labels: BTreeSet<Label> = seq.label_set();
            let u = fresh_label(labels.iter());
            seq.walk(&mut |c| {
                if c.children.is_empty() {
                    out.push(Step {
                        rule: RuleId::D,
                        params: RuleParams::at(&c.label).target(&u),
                        key: None,
                    });
                }
            });
        }
        out
    }
}

/// Variables available for `w`, with the component carrying each and a
/// witness path when the domain conditions call for one.
fn available(
    seq: &NestedSequent,
    graph: &PropagationGraph,
    doms: &Option<(Reachability, Character)>,
    w: &str,
) -> Vec<(String, Label, Option<crate::propagation::PropPath>)> {
    let mut out = Vec::new();
    match doms {
        None => {
            if let Some(c) = seq.component(w) {
                for y in &c.theta {
                    out.push((y.clone(), w.to_string(), None));
                }
            }
        }
        Some((reach, a)) => {
            for u in reach.targets(*a, w).unwrap_or_default() {
                for y in graph.vertices.get(&u).into_iter().flatten() {
                    out.push((y.clone(), u.clone(), reach.witness(*a, w, &u)));
                }
            }
        }
    }
    out
}

fn closure(seq: &NestedSequent) -> Option<Step> {
    let mut found = None;
    seq.walk(&mut |c| {
        if found.is_some() {
            return;
        }
        if c.gamma.contains(&Formula::Bottom) {
            found = Some(Step {
                rule: RuleId::BotL,
                params: RuleParams::at(&c.label),
                key: None,
            });
            return;
        }
        for phi in &c.gamma {
            if phi.is_atomic() && c.delta.iter().any(|d| d.alpha_eq(phi)) {
                found = Some(Step {
                    rule: RuleId::Ax,
                    params: RuleParams::at(&c.label).formula(phi.clone()),
                    key: None,
                });
                return;
            }
        }
    });
    found
}

fn invertible(seq: &NestedSequent) -> Option<Step> {
    let mut found = None;
    seq.walk(&mut |c| {
        if found.is_some() {
            return;
        }
        let left = c.gamma.iter().find_map(|phi| match phi {
            Formula::Neg(_) => Some((RuleId::NegL, phi)),
            Formula::Or(..) => Some((RuleId::OrL, phi)),
            _ => None,
        });
        let right = || {
            c.delta.iter().find_map(|phi| match phi {
                Formula::Neg(_) => Some((RuleId::NegR, phi)),
                Formula::Or(..) => Some((RuleId::OrR, phi)),
                _ => None,
            })
        };
        if let Some((rule, phi)) = left.or_else(right) {
            found = Some(Step {
                rule,
                params: RuleParams::at(&c.label).formula(phi.clone()),
                key: None,
            });
        }
    });
    found
}

fn creating_left(seq: &NestedSequent) -> Option<Step> {
    let mut found = None;
    seq.walk(&mut |c| {
        if found.is_some() {
            return;
        }
        for phi in &c.gamma {
            match phi {
                Formula::Dia(_) => {
                    let u = fresh_label(seq.label_set().iter());
                    found = Some(Step {
                        rule: RuleId::DiaL,
                        params: RuleParams::at(&c.label).formula(phi.clone()).target(&u),
                        key: None,
                    });
                    return;
                }
                Formula::Exists(..) => {
                    let y = fresh_var(seq.all_names().iter());
                    found = Some(Step {
                        rule: RuleId::ExistsL,
                        params: RuleParams::at(&c.label).formula(phi.clone()).var(&y),
                        key: None,
                    });
                    return;
                }
                _ => {}
            }
        }
    });
    found
}

/// One-line description of a search result, for logs and the CLI.
pub fn describe(result: &SearchResult) -> String {
    match result {
        SearchResult::Proved(p) => format!("proved ({} nodes, height {})", p.size(), p.height()),
        SearchResult::Exhausted(r) => format!("exhausted: {r}"),
    }
}
