use std::collections::BTreeSet;
use std::fmt;

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

use super::{CalculusSpec, RuleId, RuleParams};
use crate::grammar::Character;
use crate::propagation::{PropPath, PropagationGraph, Reachability};
use crate::sequents::{Label, LabeledSequent, NestedSequent, SequentError};
use crate::syntax::{Formula, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("rule {0} is not part of this calculus")]
    NotInCalculus(RuleId),
    #[error("rule {rule} needs parameter `{param}`")]
    MissingParam { rule: RuleId, param: &'static str },
    #[error("rule {rule}: principal formula {formula} not found at {label}")]
    PrincipalAbsent {
        rule: RuleId,
        label: Label,
        formula: String,
    },
    #[error("rule {rule}: principal formula {formula} has the wrong shape")]
    WrongShape { rule: RuleId, formula: String },
    #[error("rule {rule}: `{name}` is not fresh")]
    NotFresh { rule: RuleId, name: String },
    #[error("rule {rule}: missing atom {atom}")]
    MissingAtom { rule: RuleId, atom: String },
    #[error("rule {rule}: side condition {condition} fails: {detail}")]
    SideCondition {
        rule: RuleId,
        condition: &'static str,
        detail: String,
    },
    #[error("rule {rule}: {detail}")]
    Structure { rule: RuleId, detail: String },
    #[error(transparent)]
    Sequent(#[from] SequentError),
}

/// Operations the rule schemata need, implemented by both sequent kinds.
/// Labels address components of a nested sequent.
pub trait Sequent:
    Clone + fmt::Debug + fmt::Display + Serialize + DeserializeOwned + Send + Sync
{
    const NESTED: bool;

    fn labeled_view(&self) -> Result<LabeledSequent, SequentError>;
    fn equiv(&self, other: &Self) -> bool;
    fn label_set(&self) -> BTreeSet<Label>;
    /// Every variable name occurring in the sequent, bound ones included.
    fn name_set(&self) -> BTreeSet<Var>;
    fn left_has(&self, w: &str, phi: &Formula) -> bool;
    fn right_has(&self, w: &str, phi: &Formula) -> bool;
    fn take_left(&mut self, w: &str, phi: &Formula) -> bool;
    fn take_right(&mut self, w: &str, phi: &Formula) -> bool;
    fn put_left(&mut self, w: &str, phi: Formula) -> Result<(), String>;
    fn put_right(&mut self, w: &str, phi: Formula) -> Result<(), String>;
    fn has_rel(&self, w: &str, u: &str) -> bool;
    fn has_dom(&self, x: &str, w: &str) -> bool;
    fn put_dom(&mut self, x: &str, w: &str) -> Result<(), String>;
    /// Adds `wRu`; for nested sequents `u` becomes a new empty child of `w`.
    fn put_rel(&mut self, w: &str, u: &str) -> Result<(), String>;

    fn has_label(&self, w: &str) -> bool {
        self.label_set().contains(w)
    }
}

fn take_from(items: &mut Vec<(Label, Formula)>, w: &str, phi: &Formula) -> bool {
    let norm = phi.alpha_normal();
    match items
        .iter()
        .position(|(v, f)| v == w && f.alpha_normal() == norm)
    {
        Some(i) => {
            items.remove(i);
            true
        }
        None => false,
    }
}

fn holds_in(items: &[(Label, Formula)], w: &str, phi: &Formula) -> bool {
    let norm = phi.alpha_normal();
    items.iter().any(|(v, f)| v == w && f.alpha_normal() == norm)
}

impl Sequent for LabeledSequent {
    const NESTED: bool = false;

    fn labeled_view(&self) -> Result<LabeledSequent, SequentError> {
        Ok(self.clone())
    }
    fn equiv(&self, other: &Self) -> bool {
        LabeledSequent::equiv(self, other)
    }
    fn label_set(&self) -> BTreeSet<Label> {
        self.labels()
    }
    fn name_set(&self) -> BTreeSet<Var> {
        self.all_names()
    }
    fn left_has(&self, w: &str, phi: &Formula) -> bool {
        holds_in(&self.left, w, phi)
    }
    fn right_has(&self, w: &str, phi: &Formula) -> bool {
        holds_in(&self.right, w, phi)
    }
    fn take_left(&mut self, w: &str, phi: &Formula) -> bool {
        take_from(&mut self.left, w, phi)
    }
    fn take_right(&mut self, w: &str, phi: &Formula) -> bool {
        take_from(&mut self.right, w, phi)
    }
    fn put_left(&mut self, w: &str, phi: Formula) -> Result<(), String> {
        self.left.push((w.to_string(), phi));
        Ok(())
    }
    fn put_right(&mut self, w: &str, phi: Formula) -> Result<(), String> {
        self.right.push((w.to_string(), phi));
        Ok(())
    }
    fn has_rel(&self, w: &str, u: &str) -> bool {
        self.rel.iter().any(|(a, b)| a == w && b == u)
    }
    fn has_dom(&self, x: &str, w: &str) -> bool {
        self.dom.iter().any(|(y, v)| y == x && v == w)
    }
    fn put_dom(&mut self, x: &str, w: &str) -> Result<(), String> {
        self.dom.push((x.to_string(), w.to_string()));
        Ok(())
    }
    fn put_rel(&mut self, w: &str, u: &str) -> Result<(), String> {
        self.rel.push((w.to_string(), u.to_string()));
        Ok(())
    }
}

fn take_formula(items: &mut Vec<Formula>, phi: &Formula) -> bool {
    let norm = phi.alpha_normal();
    match items.iter().position(|f| f.alpha_normal() == norm) {
        Some(i) => {
            items.remove(i);
            true
        }
        None => false,
    }
}

fn no_component(w: &str) -> String {
    format!("no component labeled `{w}`")
}

impl Sequent for NestedSequent {
    const NESTED: bool = true;

    fn labeled_view(&self) -> Result<LabeledSequent, SequentError> {
        self.to_labeled()
    }
    fn equiv(&self, other: &Self) -> bool {
        NestedSequent::equiv(self, other)
    }
    fn label_set(&self) -> BTreeSet<Label> {
        self.labels().into_iter().collect()
    }
    fn name_set(&self) -> BTreeSet<Var> {
        self.all_names()
    }
    fn left_has(&self, w: &str, phi: &Formula) -> bool {
        let norm = phi.alpha_normal();
        self.component(w)
            .is_some_and(|c| c.gamma.iter().any(|f| f.alpha_normal() == norm))
    }
    fn right_has(&self, w: &str, phi: &Formula) -> bool {
        let norm = phi.alpha_normal();
        self.component(w)
            .is_some_and(|c| c.delta.iter().any(|f| f.alpha_normal() == norm))
    }
    fn take_left(&mut self, w: &str, phi: &Formula) -> bool {
        self.component_mut(w)
            .is_some_and(|c| take_formula(&mut c.gamma, phi))
    }
    fn take_right(&mut self, w: &str, phi: &Formula) -> bool {
        self.component_mut(w)
            .is_some_and(|c| take_formula(&mut c.delta, phi))
    }
    fn put_left(&mut self, w: &str, phi: Formula) -> Result<(), String> {
        let c = self.component_mut(w).ok_or_else(|| no_component(w))?;
        c.gamma.push(phi);
        Ok(())
    }
    fn put_right(&mut self, w: &str, phi: Formula) -> Result<(), String> {
        let c = self.component_mut(w).ok_or_else(|| no_component(w))?;
        c.delta.push(phi);
        Ok(())
    }
    fn has_rel(&self, w: &str, u: &str) -> bool {
        self.component(w)
            .is_some_and(|c| c.children.iter().any(|k| k.label == u))
    }
    fn has_dom(&self, x: &str, w: &str) -> bool {
        self.component(w)
            .is_some_and(|c| c.theta.iter().any(|y| y == x))
    }
    fn put_dom(&mut self, x: &str, w: &str) -> Result<(), String> {
        let c = self.component_mut(w).ok_or_else(|| no_component(w))?;
        c.theta.push(x.to_string());
        Ok(())
    }
    fn put_rel(&mut self, w: &str, u: &str) -> Result<(), String> {
        if self.component(u).is_some() {
            return Err(format!("`{u}` already labels a component"));
        }
        let c = self.component_mut(w).ok_or_else(|| no_component(w))?;
        c.children.push(NestedSequent::empty(u));
        Ok(())
    }
}

fn need<'a, T>(v: &'a Option<T>, rule: RuleId, param: &'static str) -> Result<&'a T, RuleError> {
    v.as_ref().ok_or(RuleError::MissingParam { rule, param })
}

fn structure(rule: RuleId, detail: impl Into<String>) -> RuleError {
    RuleError::Structure {
        rule,
        detail: detail.into(),
    }
}

/// Checks the reachability side condition of `p_dia`, `s_ex1` or `s_ex2`
/// on the conclusion and returns the witness path (validated or found).
/// `Ok(None)` means the condition holds without a path: the local rows of
/// the `s_ex` tables.
pub fn side_condition<S: Sequent>(
    spec: &CalculusSpec,
    rule: RuleId,
    seq: &S,
    params: &RuleParams,
) -> Result<Option<PropPath>, RuleError> {
    let w = need(&params.label, rule, "label")?;
    let graph = PropagationGraph::of_sequent(&seq.labeled_view()?);
    match rule {
        RuleId::PDia => {
            let u = need(&params.target, rule, "target")?;
            let path = reach_witness(&graph, spec.path_system(), Character::Dia, w, u, params, rule, "†1")?;
            Ok(Some(path))
        }
        RuleId::SEx1 => {
            let y = need(&params.var, rule, "var")?;
            match spec.domain_system() {
                None => {
                    if !seq.has_dom(y, w) {
                        return Err(RuleError::SideCondition {
                            rule,
                            condition: "†2",
                            detail: format!("{y} ∈ D({w}) is not in the sequent"),
                        });
                    }
                    if params.target.as_ref().is_some_and(|u| u != w) {
                        return Err(structure(rule, "target must equal the principal label"));
                    }
                    if let Some(p) = &params.witness {
                        if p != &PropPath::empty(w) {
                            return Err(structure(rule, "only the empty path is allowed here"));
                        }
                    }
                    Ok(None)
                }
                Some((system, a)) => {
                    let reach = graph.reachability(&system);
                    let carrying: Vec<&Label> = match &params.target {
                        Some(u) => vec![u],
                        None => graph
                            .vertices
                            .iter()
                            .filter(|(_, th)| th.contains(y))
                            .map(|(l, _)| l)
                            .collect(),
                    };
                    for u in carrying {
                        if !seq.has_dom(y, u) {
                            continue;
                        }
                        if let Some(p) = &params.witness {
                            validate_path(&graph, &system, a, w, u, p, rule, "†2")?;
                            return Ok(Some(p.clone()));
                        }
                        if let Some(p) = reach.witness(a, w, u) {
                            return Ok(Some(p));
                        }
                    }
                    Err(RuleError::SideCondition {
                        rule,
                        condition: "†2",
                        detail: format!("{y} is not ({system}, {})-available for {w}", a.symbol()),
                    })
                }
            }
        }
        RuleId::SEx2 => {
            let u = params.target.as_ref().unwrap_or(w);
            match spec.domain_system() {
                None => {
                    if u != w {
                        return Err(RuleError::SideCondition {
                            rule,
                            condition: "†3",
                            detail: format!("{w} ≠ {u}"),
                        });
                    }
                    Ok(None)
                }
                Some((system, a)) => {
                    let path = reach_witness(&graph, system, a, w, u, params, rule, "†3")?;
                    Ok(Some(path))
                }
            }
        }
        other => Err(structure(other, "has no reachability side condition")),
    }
}

#[allow(clippy::too_many_arguments)]
fn reach_witness(
    graph: &PropagationGraph,
    system: crate::grammar::ThueSystem,
    a: Character,
    w: &str,
    u: &str,
    params: &RuleParams,
    rule: RuleId,
    condition: &'static str,
) -> Result<PropPath, RuleError> {
    if let Some(p) = &params.witness {
        validate_path(graph, &system, a, w, u, p, rule, condition)?;
        return Ok(p.clone());
    }
    Reachability::compute(graph, &system)
        .witness(a, w, u)
        .ok_or_else(|| RuleError::SideCondition {
            rule,
            condition,
            detail: format!("no path from {w} to {u} with string in L_{system}({})", a.symbol()),
        })
}

#[allow(clippy::too_many_arguments)]
fn validate_path(
    graph: &PropagationGraph,
    system: &crate::grammar::ThueSystem,
    a: Character,
    w: &str,
    u: &str,
    p: &PropPath,
    rule: RuleId,
    condition: &'static str,
) -> Result<(), RuleError> {
    let fail = |detail: String| RuleError::SideCondition {
        rule,
        condition,
        detail,
    };
    if !p.is_well_formed() || p.start() != w || p.end() != u {
        return Err(fail(format!("witness {p} does not lead from {w} to {u}")));
    }
    if !graph.contains_path(p) {
        return Err(fail(format!("witness {p} is not a propagation path")));
    }
    if !system.derives(a, p.string()) {
        return Err(fail(format!(
            "string {} of witness {p} is not in L_{system}({})",
            p.string().symbols(),
            a.symbol()
        )));
    }
    Ok(())
}

fn fresh_label_check<S: Sequent>(seq: &S, u: &str, rule: RuleId) -> Result<(), RuleError> {
    if seq.has_label(u) {
        return Err(RuleError::NotFresh {
            rule,
            name: u.to_string(),
        });
    }
    Ok(())
}

fn fresh_var_check<S: Sequent>(seq: &S, y: &str, rule: RuleId) -> Result<(), RuleError> {
    if seq.name_set().contains(y) {
        return Err(RuleError::NotFresh {
            rule,
            name: y.to_string(),
        });
    }
    Ok(())
}

/// The premises of `rule` applied bottom-up to `seq`.
pub fn apply_rule<S: Sequent>(
    spec: &CalculusSpec,
    seq: &S,
    rule: RuleId,
    params: &RuleParams,
) -> Result<Vec<S>, RuleError> {
    if !spec.allows(rule) {
        return Err(RuleError::NotInCalculus(rule));
    }
    if S::NESTED {
        // every nested sequent is a tree; reject duplicates early
        seq.labeled_view()?;
    }
    let absent = |w: &str, phi: &Formula| RuleError::PrincipalAbsent {
        rule,
        label: w.to_string(),
        formula: phi.to_string(),
    };
    let shape = |phi: &Formula| RuleError::WrongShape {
        rule,
        formula: phi.to_string(),
    };
    let put = |r: Result<(), String>| r.map_err(|d| structure(rule, d));
    let mut prem = seq.clone();

    match rule {
        RuleId::Ax => {
            let w = need(&params.label, rule, "label")?;
            let phi = need(&params.formula, rule, "formula")?;
            if !phi.is_atomic() {
                return Err(shape(phi));
            }
            if !(seq.left_has(w, phi) && seq.right_has(w, phi)) {
                return Err(absent(w, phi));
            }
            Ok(vec![])
        }
        RuleId::BotL => {
            let w = need(&params.label, rule, "label")?;
            if !seq.left_has(w, &Formula::Bottom) {
                return Err(absent(w, &Formula::Bottom));
            }
            Ok(vec![])
        }
        RuleId::NegL | RuleId::NegR => {
            let w = need(&params.label, rule, "label")?;
            let phi = need(&params.formula, rule, "formula")?;
            let Formula::Neg(body) = phi else { return Err(shape(phi)) };
            if rule == RuleId::NegL {
                if !prem.take_left(w, phi) {
                    return Err(absent(w, phi));
                }
                put(prem.put_right(w, (**body).clone()))?;
            } else {
                if !prem.take_right(w, phi) {
                    return Err(absent(w, phi));
                }
                put(prem.put_left(w, (**body).clone()))?;
            }
            Ok(vec![prem])
        }
        RuleId::OrL => {
            let w = need(&params.label, rule, "label")?;
            let phi = need(&params.formula, rule, "formula")?;
            let Formula::Or(l, r) = phi else { return Err(shape(phi)) };
            if !prem.take_left(w, phi) {
                return Err(absent(w, phi));
            }
            let mut second = prem.clone();
            put(prem.put_left(w, (**l).clone()))?;
            put(second.put_left(w, (**r).clone()))?;
            Ok(vec![prem, second])
        }
        RuleId::OrR => {
            let w = need(&params.label, rule, "label")?;
            let phi = need(&params.formula, rule, "formula")?;
            let Formula::Or(l, r) = phi else { return Err(shape(phi)) };
            if !prem.take_right(w, phi) {
                return Err(absent(w, phi));
            }
            put(prem.put_right(w, (**l).clone()))?;
            put(prem.put_right(w, (**r).clone()))?;
            Ok(vec![prem])
        }
        RuleId::DiaL => {
            let w = need(&params.label, rule, "label")?;
            let phi = need(&params.formula, rule, "formula")?;
            let u = need(&params.target, rule, "target")?;
            let Formula::Dia(body) = phi else { return Err(shape(phi)) };
            fresh_label_check(seq, u, rule)?;
            if !prem.take_left(w, phi) {
                return Err(absent(w, phi));
            }
            put(prem.put_rel(w, u))?;
            put(prem.put_left(u, (**body).clone()))?;
            Ok(vec![prem])
        }
        RuleId::DiaR => {
            let w = need(&params.label, rule, "label")?;
            let phi = need(&params.formula, rule, "formula")?;
            let u = need(&params.target, rule, "target")?;
            let Formula::Dia(body) = phi else { return Err(shape(phi)) };
            if !seq.right_has(w, phi) {
                return Err(absent(w, phi));
            }
            if !seq.has_rel(w, u) {
                return Err(RuleError::MissingAtom {
                    rule,
                    atom: format!("{w}R{u}"),
                });
            }
            put(prem.put_right(u, (**body).clone()))?;
            Ok(vec![prem])
        }
        RuleId::ExistsL => {
            let w = need(&params.label, rule, "label")?;
            let phi = need(&params.formula, rule, "formula")?;
            let y = need(&params.var, rule, "var")?;
            let Formula::Exists(x, body) = phi else { return Err(shape(phi)) };
            fresh_var_check(seq, y, rule)?;
            if !prem.take_left(w, phi) {
                return Err(absent(w, phi));
            }
            put(prem.put_dom(y, w))?;
            put(prem.put_left(w, body.substitute(y, x)))?;
            Ok(vec![prem])
        }
        RuleId::ExistsR => {
            let w = need(&params.label, rule, "label")?;
            let phi = need(&params.formula, rule, "formula")?;
            let y = need(&params.var, rule, "var")?;
            let Formula::Exists(x, body) = phi else { return Err(shape(phi)) };
            if !seq.right_has(w, phi) {
                return Err(absent(w, phi));
            }
            if !seq.has_dom(y, w) {
                return Err(RuleError::MissingAtom {
                    rule,
                    atom: format!("{y} ∈ D({w})"),
                });
            }
            put(prem.put_right(w, body.substitute(y, x)))?;
            Ok(vec![prem])
        }
        RuleId::D => {
            let w = need(&params.label, rule, "label")?;
            let u = need(&params.target, rule, "target")?;
            if !seq.has_label(w) {
                return Err(structure(rule, format!("label `{w}` does not occur")));
            }
            fresh_label_check(seq, u, rule)?;
            put(prem.put_rel(w, u))?;
            Ok(vec![prem])
        }
        RuleId::G(n, k) => {
            let (to_u, to_v) = need(&params.chains, rule, "chains")?;
            if to_u.len() != n + 1 || to_v.len() != k + 1 || to_u[0] != to_v[0] {
                return Err(structure(
                    rule,
                    format!("chains must have lengths {} and {} from a common origin", n + 1, k + 1),
                ));
            }
            if !seq.has_label(&to_u[0]) {
                return Err(structure(rule, format!("label `{}` does not occur", to_u[0])));
            }
            for chain in [to_u, to_v] {
                for pair in chain.windows(2) {
                    if !seq.has_rel(&pair[0], &pair[1]) {
                        return Err(RuleError::MissingAtom {
                            rule,
                            atom: format!("{}R{}", pair[0], pair[1]),
                        });
                    }
                }
            }
            put(prem.put_rel(to_u.last().unwrap(), to_v.last().unwrap()))?;
            Ok(vec![prem])
        }
        RuleId::Id | RuleId::Dd => {
            let w = need(&params.label, rule, "label")?;
            let u = need(&params.target, rule, "target")?;
            let x = need(&params.var, rule, "var")?;
            if !seq.has_rel(w, u) {
                return Err(RuleError::MissingAtom {
                    rule,
                    atom: format!("{w}R{u}"),
                });
            }
            let (from, to) = if rule == RuleId::Id { (w, u) } else { (u, w) };
            if !seq.has_dom(x, from) {
                return Err(RuleError::MissingAtom {
                    rule,
                    atom: format!("{x} ∈ D({from})"),
                });
            }
            put(prem.put_dom(x, to))?;
            Ok(vec![prem])
        }
        RuleId::Nd => {
            let w = need(&params.label, rule, "label")?;
            let x = need(&params.var, rule, "var")?;
            if !seq.has_label(w) {
                return Err(structure(rule, format!("label `{w}` does not occur")));
            }
            fresh_var_check(seq, x, rule)?;
            put(prem.put_dom(x, w))?;
            Ok(vec![prem])
        }
        RuleId::PDia => {
            let w = need(&params.label, rule, "label")?;
            let phi = need(&params.formula, rule, "formula")?;
            let u = need(&params.target, rule, "target")?;
            let Formula::Dia(body) = phi else { return Err(shape(phi)) };
            if !seq.right_has(w, phi) {
                return Err(absent(w, phi));
            }
            side_condition(spec, rule, seq, params)?;
            put(prem.put_right(u, (**body).clone()))?;
            Ok(vec![prem])
        }
        RuleId::SEx1 => {
            let w = need(&params.label, rule, "label")?;
            let phi = need(&params.formula, rule, "formula")?;
            let y = need(&params.var, rule, "var")?;
            let Formula::Exists(x, body) = phi else { return Err(shape(phi)) };
            if !seq.right_has(w, phi) {
                return Err(absent(w, phi));
            }
            side_condition(spec, rule, seq, params)?;
            put(prem.put_right(w, body.substitute(y, x)))?;
            Ok(vec![prem])
        }
        RuleId::SEx2 => {
            let w = need(&params.label, rule, "label")?;
            let phi = need(&params.formula, rule, "formula")?;
            let y = need(&params.var, rule, "var")?;
            let u = params.target.clone().unwrap_or_else(|| w.clone());
            let Formula::Exists(x, body) = phi else { return Err(shape(phi)) };
            if !seq.right_has(w, phi) {
                return Err(absent(w, phi));
            }
            fresh_var_check(seq, y, rule)?;
            side_condition(spec, rule, seq, params)?;
            put(prem.put_dom(y, &u))?;
            put(prem.put_right(w, body.substitute(y, x)))?;
            Ok(vec![prem])
        }
    }
}
