use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::rules::{apply_rule, RuleError, Sequent};
use super::{CalculusSpec, RuleId, RuleParams};

/// A derivation written bottom-up: `conclusion` is obtained from the
/// conclusions of `premises` by `rule`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "S: Sequent"))]
pub struct ProofTree<S> {
    pub rule: RuleId,
    pub conclusion: S,
    #[serde(default)]
    pub params: RuleParams,
    #[serde(default)]
    pub premises: Vec<ProofTree<S>>,
}

impl<S: Sequent> ProofTree<S> {
    pub fn leaf(rule: RuleId, conclusion: S, params: RuleParams) -> Self {
        ProofTree {
            rule,
            conclusion,
            params,
            premises: Vec::new(),
        }
    }

    pub fn node(rule: RuleId, conclusion: S, params: RuleParams, premises: Vec<ProofTree<S>>) -> Self {
        ProofTree {
            rule,
            conclusion,
            params,
            premises,
        }
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(|p| p.size()).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self.premises.iter().map(|p| p.height()).max().unwrap_or(0)
    }

    /// Rule name to number of uses.
    pub fn rule_counts(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        self.visit(&mut Vec::new(), &mut |_, n| {
            *out.entry(n.rule.name()).or_insert(0) += 1;
        });
        out
    }

    pub fn uses(&self, pred: impl Fn(RuleId) -> bool) -> bool {
        self.uses_dyn(&pred)
    }

    fn uses_dyn(&self, pred: &dyn Fn(RuleId) -> bool) -> bool {
        pred(self.rule) || self.premises.iter().any(|p| p.uses_dyn(pred))
    }

    /// Preorder walk; the path lists premise indices from the root.
    pub fn visit<'a>(&'a self, path: &mut Vec<usize>, f: &mut impl FnMut(&[usize], &'a ProofTree<S>)) {
        f(path, self);
        for (i, p) in self.premises.iter().enumerate() {
            path.push(i);
            p.visit(path, f);
            path.pop();
        }
    }

    pub fn at(&self, path: &[usize]) -> Option<&ProofTree<S>> {
        match path.split_first() {
            None => Some(self),
            Some((i, rest)) => self.premises.get(*i)?.at(rest),
        }
    }

    pub fn at_mut(&mut self, path: &[usize]) -> Option<&mut ProofTree<S>> {
        match path.split_first() {
            None => Some(self),
            Some((i, rest)) => self.premises.get_mut(*i)?.at_mut(rest),
        }
    }

    /// Rebuilds the tree with every sequent mapped by `f`.
    pub fn try_map<T: Sequent, E>(&self, f: &impl Fn(&S) -> Result<T, E>) -> Result<ProofTree<T>, E> {
        Ok(ProofTree {
            rule: self.rule,
            conclusion: f(&self.conclusion)?,
            params: self.params.clone(),
            premises: self
                .premises
                .iter()
                .map(|p| p.try_map(f))
                .collect::<Result<_, _>>()?,
        })
    }

    fn render(&self, depth: usize, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.params.summary();
        let pad = "  ".repeat(depth);
        if names.is_empty() {
            writeln!(out, "{pad}{}  [{}]", self.conclusion, self.rule)?;
        } else {
            writeln!(out, "{pad}{}  [{} {}]", self.conclusion, self.rule, names)?;
        }
        for p in &self.premises {
            p.render(depth + 1, out)?;
        }
        Ok(())
    }
}

impl<S: Sequent> fmt::Display for ProofTree<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.render(0, f)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("at node {path:?} ({rule}): {message}")]
pub struct CheckError {
    pub path: Vec<usize>,
    pub rule: RuleId,
    pub message: String,
}

/// Checks every inference of `proof` against `spec`.
pub fn check<S: Sequent>(spec: &CalculusSpec, proof: &ProofTree<S>) -> Result<(), CheckError> {
    if S::NESTED != spec.kind.is_nested() {
        return Err(CheckError {
            path: vec![],
            rule: proof.rule,
            message: format!("{} proofs need {} sequents", spec.kind, if S::NESTED { "labeled" } else { "nested" }),
        });
    }
    check_at(spec, proof, &mut Vec::new())
}

fn check_at<S: Sequent>(
    spec: &CalculusSpec,
    node: &ProofTree<S>,
    path: &mut Vec<usize>,
) -> Result<(), CheckError> {
    let fail = |path: &[usize], message: String| CheckError {
        path: path.to_vec(),
        rule: node.rule,
        message,
    };
    let expected = apply_rule(spec, &node.conclusion, node.rule, &node.params)
        .map_err(|e: RuleError| fail(path, e.to_string()))?;
    if expected.len() != node.premises.len() {
        return Err(fail(
            path,
            format!("expected {} premises, found {}", expected.len(), node.premises.len()),
        ));
    }
    for (i, (want, got)) in expected.iter().zip(&node.premises).enumerate() {
        if !want.equiv(&got.conclusion) {
            return Err(fail(
                path,
                format!("premise {i} should be {want} but is {}", got.conclusion),
            ));
        }
    }
    for (i, p) in node.premises.iter().enumerate() {
        path.push(i);
        check_at(spec, p, path)?;
        path.pop();
    }
    Ok(())
}
