//! Elimination of the relational rules `g(n,k)`, `id`, `dd` and `nd` from
//! labeled proofs, and translation of the refined result into nested
//! proofs.
//!
//! `dia_r` and `exists_r` are first re-tagged as `p_dia` and `s_ex1`
//! instances. Then a topmost relational inference is repeatedly pushed
//! above the inference over it until it reaches an initial rule (where it
//! is dropped) or, for `nd` below a matching `s_ex1`, fuses into `s_ex2`.
//! Witness paths of reachability rules are repaired at each swap and
//! re-validated against the grammar.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calculi::{apply_rule, check, side_condition, CalculusSpec, CheckError, ProofTree, RuleId, RuleParams};
use crate::grammar::Character;
use crate::propagation::{PropPath, PropagationGraph};
use crate::sequents::{LabeledSequent, NestedSequent, SequentError};
use crate::syntax::FrameSpec;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RefineError {
    #[error("input is not a valid proof: {0}")]
    InvalidInput(CheckError),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("refinement did not finish within {0} steps")]
    Budget(usize),
    #[error("sequent at node {path:?} is not a labeled tree rooted at {root}")]
    NotATree { path: Vec<usize>, root: String },
    #[error(transparent)]
    Sequent(#[from] SequentError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepKind {
    PermuteG,
    PermuteId,
    PermuteDd,
    PermuteNd,
    AbsorbIntoAxiom,
    NdToSex2,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefineStep {
    pub kind: StepKind,
    /// Position of the relational inference before the step.
    pub path: Vec<usize>,
    pub rule: RuleId,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefineTrace {
    pub steps: Vec<RefineStep>,
    /// `dia_r`/`exists_r` nodes re-tagged before elimination.
    pub retagged: usize,
    pub input_size: usize,
    pub output_size: usize,
}

type LProof = ProofTree<LabeledSequent>;

fn internal(msg: impl Into<String>) -> RefineError {
    RefineError::Internal(msg.into())
}

/// Step-by-step refinement, so callers can inspect intermediate proofs.
pub struct Refiner {
    frame: FrameSpec,
    mixed: CalculusSpec,
    proof: LProof,
    trace: RefineTrace,
    limit: usize,
}

impl Refiner {
    /// Checks `proof` in the labeled calculus and re-tags right rules.
    pub fn new(proof: &LProof, frame: &FrameSpec) -> Result<Self, RefineError> {
        check(&CalculusSpec::g3(frame.clone()), proof).map_err(RefineError::InvalidInput)?;
        let mut out = proof.clone();
        let retagged = retag(&mut out);
        let mut relational = 0;
        out.visit(&mut Vec::new(), &mut |_, n| {
            if n.rule.is_relational() {
                relational += 1;
            }
        });
        let limit = (relational * out.size() * 4).max(16);
        Ok(Refiner {
            frame: frame.clone(),
            mixed: CalculusSpec::mixed(frame.clone()),
            trace: RefineTrace {
                steps: Vec::new(),
                retagged,
                input_size: proof.size(),
                output_size: 0,
            },
            proof: out,
            limit,
        })
    }

    pub fn proof(&self) -> &LProof {
        &self.proof
    }

    pub fn trace(&self) -> &RefineTrace {
        &self.trace
    }

    /// Performs one elimination step; `None` once no relational rule is left.
    pub fn step(&mut self) -> Result<Option<RefineStep>, RefineError> {
        let Some(path) = topmost_relational(&self.proof) else {
            return Ok(None);
        };
        if self.trace.steps.len() >= self.limit {
            return Err(RefineError::Budget(self.limit));
        }
        let node = self.proof.at(&path).expect("path from traversal").clone();
        let (kind, replacement) = self.eliminate_once(&node)?;
        *self.proof.at_mut(&path).expect("path from traversal") = replacement;
        let step = RefineStep {
            kind,
            path,
            rule: node.rule,
        };
        self.trace.steps.push(step.clone());
        Ok(Some(step))
    }

    pub fn finish(mut self) -> Result<(LProof, RefineTrace), RefineError> {
        while self.step()?.is_some() {}
        let refined = CalculusSpec::refined(self.frame.clone());
        check(&refined, &self.proof).map_err(|e| internal(format!("refined proof fails to check: {e}")))?;
        self.trace.output_size = self.proof.size();
        Ok((self.proof, self.trace))
    }

    fn eliminate_once(&self, rho: &LProof) -> Result<(StepKind, LProof), RefineError> {
        let [above] = rho.premises.as_slice() else {
            return Err(internal(format!("{} node without exactly one premise", rho.rule)));
        };
        let conclusion = &rho.conclusion;
        if above.rule.is_initial() {
            let leaf = ProofTree::leaf(above.rule, conclusion.clone(), above.params.clone());
            apply_rule(&self.mixed, conclusion, above.rule, &above.params)
                .map_err(|e| internal(format!("absorbed initial rule does not apply: {e}")))?;
            return Ok((StepKind::AbsorbIntoAxiom, leaf));
        }
        if rho.rule == RuleId::Nd && above.rule == RuleId::SEx1 && above.params.var == rho.params.var {
            let mut params = above.params.clone();
            params.target = rho.params.label.clone();
            let fused = ProofTree::node(RuleId::SEx2, conclusion.clone(), params, above.premises.clone());
            apply_rule(&self.mixed, conclusion, RuleId::SEx2, &fused.params)
                .map_err(|e| internal(format!("fused s_ex2 does not apply: {e}")))?;
            return Ok((StepKind::NdToSex2, fused));
        }

        let params = self.repair(rho, above)?;
        let new_premises = apply_rule(&self.mixed, conclusion, above.rule, &params)
            .map_err(|e| internal(format!("{} does not apply below {}: {e}", above.rule, rho.rule)))?;
        if new_premises.len() != above.premises.len() {
            return Err(internal("premise count changed during permutation"));
        }
        let mut lifted = Vec::with_capacity(new_premises.len());
        for (q, old) in new_premises.into_iter().zip(&above.premises) {
            let back = apply_rule(&self.mixed, &q, rho.rule, &rho.params)
                .map_err(|e| internal(format!("{} does not apply above {}: {e}", rho.rule, above.rule)))?;
            match back.as_slice() {
                [p] if p.equiv(&old.conclusion) => {}
                _ => return Err(internal("permuted inference does not reproduce the old premise")),
            }
            lifted.push(ProofTree::node(rho.rule, q, rho.params.clone(), vec![old.clone()]));
        }
        let kind = match rho.rule {
            RuleId::G(..) => StepKind::PermuteG,
            RuleId::Id => StepKind::PermuteId,
            RuleId::Dd => StepKind::PermuteDd,
            _ => StepKind::PermuteNd,
        };
        Ok((kind, ProofTree::node(above.rule, conclusion.clone(), params, lifted)))
    }

    /// Parameters for `above` once it is moved below `rho`.
    fn repair(&self, rho: &LProof, above: &LProof) -> Result<RuleParams, RefineError> {
        let mut params = above.params.clone();
        if !matches!(above.rule, RuleId::PDia | RuleId::SEx1 | RuleId::SEx2) {
            return Ok(params);
        }
        let conclusion = &rho.conclusion;
        if side_condition(&self.mixed, above.rule, conclusion, &params).is_ok() {
            return Ok(params);
        }
        let graph = PropagationGraph::of_sequent(conclusion);
        match rho.rule {
            RuleId::G(..) => {
                if let (Some(path), Some((cu, cv))) = (&params.witness, &rho.params.chains) {
                    params.witness = Some(splice_g(path, cu, cv));
                }
            }
            RuleId::Id | RuleId::Dd if params.var == rho.params.var => {
                let (w, u) = (
                    rho.params.label.clone().unwrap_or_default(),
                    rho.params.target.clone().unwrap_or_default(),
                );
                // id moved y from w to u, dd from u to w; point back at the source
                let (old, new, dir) = if rho.rule == RuleId::Id {
                    (u, w, Character::BDia)
                } else {
                    (w, u, Character::Dia)
                };
                if params.target.as_deref().unwrap_or(params.label.as_deref().unwrap_or("")) == old {
                    params.target = Some(new.clone());
                    let start = params.label.clone().unwrap_or_default();
                    let path = params.witness.clone().unwrap_or_else(|| PropPath::empty(&start));
                    params.witness = Some(retarget(&path, &new, dir));
                }
            }
            _ => {}
        }
        if let Some(p) = &params.witness {
            if !graph.contains_path(p) {
                params.witness = None;
            }
        }
        match side_condition(&self.mixed, above.rule, conclusion, &params) {
            Ok(_) => Ok(params),
            Err(_) => {
                // the carried witness no longer fits; search for a fresh one
                let mut searched = params.clone();
                searched.witness = None;
                if above.rule == RuleId::SEx1 {
                    searched.target = None;
                }
                match side_condition(&self.mixed, above.rule, conclusion, &searched) {
                    Ok(found) => {
                        searched.witness = found;
                        if above.rule == RuleId::SEx1 && searched.witness.is_some() {
                            searched.target = searched.witness.as_ref().map(|p| p.end().to_string());
                        }
                        Ok(searched)
                    }
                    Err(e) => Err(internal(format!(
                        "no witness for {} after removing the {} inference: {e}",
                        above.rule, rho.rule
                    ))),
                }
            }
        }
    }
}

/// Replaces the edges of `uRv` by the detour `u ◆ⁿ w ◇ᵏ v` (and its
/// converse) where `cu` runs from `w` to `u` and `cv` from `w` to `v`.
fn splice_g(path: &PropPath, cu: &[String], cv: &[String]) -> PropPath {
    let (u, v) = (cu.last().unwrap(), cv.last().unwrap());
    let forward = {
        let mut steps: Vec<(Character, String)> = cu.iter().rev().skip(1).map(|l| (Character::BDia, l.clone())).collect();
        steps.extend(cv.iter().skip(1).map(|l| (Character::Dia, l.clone())));
        PropPath::from_steps(u, &steps)
    };
    let backward = forward.converse();
    let mut out = PropPath::empty(path.start());
    for (a, c, b) in path.steps() {
        let piece = if a == u && c == Character::Dia && b == v {
            forward.clone()
        } else if a == v && c == Character::BDia && b == u {
            backward.clone()
        } else {
            PropPath::from_steps(a, &[(c, b.to_string())])
        };
        out = out.concat(&piece);
    }
    out
}

/// Moves the end of `path` to `new`, which is one `dir`-step beyond the
/// current end: drop a final step arriving from `new`, else append it.
fn retarget(path: &PropPath, new: &str, dir: Character) -> PropPath {
    let n = path.nodes.len();
    if n >= 2 && path.nodes[n - 2] == new && path.chars.0[n - 2] == dir.converse() {
        return PropPath {
            nodes: path.nodes[..n - 1].to_vec(),
            chars: crate::grammar::Word(path.chars.0[..n - 2].to_vec()),
        };
    }
    path.concat(&PropPath::from_steps(path.end(), &[(dir, new.to_string())]))
}

fn retag(p: &mut LProof) -> usize {
    let mut count = 0;
    match p.rule {
        RuleId::DiaR => {
            let w = p.params.label.clone().unwrap_or_default();
            let u = p.params.target.clone().unwrap_or_default();
            p.rule = RuleId::PDia;
            p.params.witness = Some(PropPath::from_steps(&w, &[(Character::Dia, u)]));
            count += 1;
        }
        RuleId::ExistsR => {
            let w = p.params.label.clone().unwrap_or_default();
            p.rule = RuleId::SEx1;
            p.params.target = Some(w.clone());
            p.params.witness = Some(PropPath::empty(&w));
            count += 1;
        }
        _ => {}
    }
    for q in &mut p.premises {
        count += retag(q);
    }
    count
}

/// A relational node with none above it: deepest first, then leftmost.
fn topmost_relational(p: &LProof) -> Option<Vec<usize>> {
    let mut best: Option<Vec<usize>> = None;
    p.visit(&mut Vec::new(), &mut |path, n| {
        if !n.rule.is_relational() || n.premises.iter().any(|q| q.uses(RuleId::is_relational)) {
            return;
        }
        if best.as_ref().is_none_or(|b| path.len() > b.len()) {
            best = Some(path.to_vec());
        }
    });
    best
}

/// Refines a labeled proof into the refined labeled calculus.
pub fn refine_proof(proof: &LProof, frame: &FrameSpec) -> Result<(LProof, RefineTrace), RefineError> {
    Refiner::new(proof, frame)?.finish()
}

/// Translates a refined labeled proof of a labeled tree sequent into a
/// nested proof, asserting that every sequent is a tree with the root of
/// the end sequent.
pub fn nestify(proof: &LProof) -> Result<ProofTree<NestedSequent>, RefineError> {
    let root = proof.conclusion.tree_root().ok_or_else(|| RefineError::NotATree {
        path: vec![],
        root: "?".into(),
    })?;
    let mut bad = None;
    proof.visit(&mut Vec::new(), &mut |path, n| {
        if bad.is_none() && n.conclusion.tree_root().as_ref() != Some(&root) {
            bad = Some(path.to_vec());
        }
    });
    if let Some(path) = bad {
        return Err(RefineError::NotATree { path, root });
    }
    Ok(proof.try_map(&|s: &LabeledSequent| s.to_nested())?)
}

/// `𝔏` applied to every sequent of a nested proof.
pub fn labelize(proof: &ProofTree<NestedSequent>) -> Result<LProof, RefineError> {
    Ok(proof.try_map(&|s: &NestedSequent| s.to_labeled())?)
}

/// Whether every sequent is a labeled tree with the same root.
pub fn has_fixed_root(proof: &LProof) -> bool {
    let root = proof.conclusion.tree_root();
    let mut ok = root.is_some();
    proof.visit(&mut Vec::new(), &mut |_, n| {
        ok &= n.conclusion.tree_root() == root;
    });
    ok
}
