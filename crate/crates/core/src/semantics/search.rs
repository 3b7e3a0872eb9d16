//! Exhaustive countermodel search over small models.
//!
//! Candidates are enumerated as (frame, domains) skeletons, filtered by
//! `check_frame`, and only then extended with every valuation. Evaluation
//! uses a compiled form of the formulas that computes the set of worlds
//! satisfying a subformula as a bitmask.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_frame, Assignment, Interpretation, KripkeModel, World};
use crate::sequents::{Label, LabeledSequent};
use crate::syntax::{Formula, FrameSpec, Var};

/// Worlds are bitmasks, so at most 8 of them.
const MAX_WORLDS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub max_worlds: usize,
    pub max_individuals: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_worlds: 3,
            max_individuals: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Countermodel {
    pub model: KripkeModel,
    pub world: World,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequentCountermodel {
    pub model: KripkeModel,
    pub interpretation: Interpretation,
}

type Sig = Vec<(String, usize)>;

fn signature_into(phi: &Formula, out: &mut BTreeSet<(String, usize)>) {
    match phi {
        Formula::Pred { name, args } => {
            out.insert((name.clone(), args.len()));
        }
        Formula::Bottom => {}
        Formula::Neg(b) | Formula::Dia(b) | Formula::Exists(_, b) => signature_into(b, out),
        Formula::Or(l, r) => {
            signature_into(l, out);
            signature_into(r, out);
        }
    }
}

enum Compiled {
    Atom(usize, Vec<usize>),
    Bot,
    Neg(Box<Compiled>),
    Or(Box<Compiled>, Box<Compiled>),
    Dia(Box<Compiled>),
    Exists(usize, Box<Compiled>),
}

struct Compiler<'a> {
    preds: &'a HashMap<(String, usize), usize>,
    slots: &'a HashMap<Var, usize>,
}

impl Compiler<'_> {
    fn compile(&self, phi: &Formula) -> Compiled {
        match phi {
            Formula::Pred { name, args } => Compiled::Atom(
                self.preds[&(name.clone(), args.len())],
                args.iter().map(|a| self.slots[a]).collect(),
            ),
            Formula::Bottom => Compiled::Bot,
            Formula::Neg(b) => Compiled::Neg(Box::new(self.compile(b))),
            Formula::Or(l, r) => Compiled::Or(Box::new(self.compile(l)), Box::new(self.compile(r))),
            Formula::Dia(b) => Compiled::Dia(Box::new(self.compile(b))),
            Formula::Exists(x, b) => Compiled::Exists(self.slots[x], Box::new(self.compile(b))),
        }
    }
}

/// A model skeleton plus one valuation, in bitmask form.
struct Compact {
    n: usize,
    all: u8,
    succ: Vec<u8>,
    /// Worlds whose domain contains the individual.
    holders: Vec<u8>,
    /// `val[pred][tuple index]` = worlds where the atom holds.
    val: Vec<Vec<u8>>,
    u: usize,
}

impl Compact {
    fn tuple_index(&self, args: &[usize], asg: &[usize]) -> usize {
        args.iter().rev().fold(0, |acc, &s| acc * self.u + asg[s])
    }

    fn sat(&self, c: &Compiled, asg: &mut [usize]) -> u8 {
        match c {
            Compiled::Atom(p, args) => self.val[*p][self.tuple_index(args, asg)],
            Compiled::Bot => 0,
            Compiled::Neg(b) => !self.sat(b, asg) & self.all,
            Compiled::Or(l, r) => self.sat(l, asg) | self.sat(r, asg),
            Compiled::Dia(b) => {
                let inner = self.sat(b, asg);
                let mut out = 0;
                for w in 0..self.n {
                    if self.succ[w] & inner != 0 {
                        out |= 1 << w;
                    }
                }
                out
            }
            Compiled::Exists(x, b) => {
                let saved = asg[*x];
                let mut out = 0;
                for d in 0..self.u {
                    asg[*x] = d;
                    out |= self.sat(b, asg) & self.holders[d];
                }
                asg[*x] = saved;
                out
            }
        }
    }
}

#[derive(Clone)]
struct Skeleton {
    n: usize,
    u: usize,
    rel: Vec<(World, World)>,
    domains: Vec<u8>,
}

impl Skeleton {
    fn model(&self) -> KripkeModel {
        let mut m = KripkeModel::new(self.n);
        m.rel = self.rel.iter().copied().collect();
        for w in 0..self.n {
            m.domain[w] = (0..self.u).filter(|d| self.domains[w] >> d & 1 == 1).collect();
        }
        m
    }

    fn compact(&self) -> Compact {
        let mut succ = vec![0u8; self.n];
        for &(a, b) in &self.rel {
            succ[a] |= 1 << b;
        }
        let holders = (0..self.u)
            .map(|d| {
                (0..self.n)
                    .filter(|&w| self.domains[w] >> d & 1 == 1)
                    .fold(0u8, |acc, w| acc | 1 << w)
            })
            .collect();
        Compact {
            n: self.n,
            all: ((1u16 << self.n) - 1) as u8,
            succ,
            holders,
            val: Vec::new(),
            u: self.u,
        }
    }
}

fn tuple_count(u: usize, arity: usize) -> usize {
    u.pow(arity as u32)
}

fn valuation_bits(sig: &Sig, n: usize, u: usize) -> usize {
    sig.iter().map(|(_, a)| tuple_count(u, *a) * n).sum()
}

/// Installs valuation number `code` into `c`.
fn install(c: &mut Compact, sig: &Sig, code: u64) {
    let mut shift = 0;
    let mask = c.all as u64;
    c.val = sig
        .iter()
        .map(|(_, a)| {
            (0..tuple_count(c.u, *a))
                .map(|_| {
                    let m = ((code >> shift) & mask) as u8;
                    shift += c.n;
                    m
                })
                .collect()
        })
        .collect();
}

fn decode_tuple(mut idx: usize, u: usize, arity: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(arity);
    for _ in 0..arity {
        out.push(idx % u.max(1));
        idx /= u.max(1);
    }
    out
}

fn full_model(sk: &Skeleton, c: &Compact, sig: &Sig) -> KripkeModel {
    let mut m = sk.model();
    for (p, (name, arity)) in sig.iter().enumerate() {
        let ext = m
            .valuation
            .entry(name.clone())
            .or_insert_with(|| vec![BTreeSet::new(); sk.n]);
        for (t, &mask) in c.val[p].iter().enumerate() {
            for (w, set) in ext.iter_mut().enumerate() {
                if mask >> w & 1 == 1 {
                    set.insert(decode_tuple(t, sk.u, *arity));
                }
            }
        }
    }
    m
}

/// Worlds reachable from 0 in BFS order, visiting successors by index.
fn bfs_order(n: usize, succ: &[u8]) -> Vec<usize> {
    let mut seen = 1u8;
    let mut order = vec![0];
    let mut i = 0;
    while i < order.len() {
        let w = order[i];
        for v in 0..n {
            if succ[w] >> v & 1 == 1 && seen >> v & 1 == 0 {
                seen |= 1 << v;
                order.push(v);
            }
        }
        i += 1;
    }
    order
}

/// Every (frame, domains) skeleton within bounds that satisfies `frame`.
/// With `rooted`, frames are generated from world 0 and kept only in BFS
/// canonical form, which removes most isomorphic copies.
fn skeletons(frame: &FrameSpec, bounds: &Bounds, rooted: bool) -> Vec<Skeleton> {
    let mut out = Vec::new();
    for n in 1..=bounds.max_worlds.min(MAX_WORLDS) {
        let pairs: Vec<(World, World)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();
        let frame_only = FrameSpec {
            inc: false,
            dec: false,
            nonempty: false,
            ..frame.clone()
        };
        let mut frames = Vec::new();
        for bits in 0u64..(1u64 << pairs.len()) {
            let rel: Vec<(World, World)> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| bits >> i & 1 == 1)
                .map(|(_, p)| *p)
                .collect();
            if rooted {
                let mut succ = vec![0u8; n];
                for &(a, b) in &rel {
                    succ[a] |= 1 << b;
                }
                if bfs_order(n, &succ) != (0..n).collect::<Vec<_>>() {
                    continue;
                }
            }
            let mut m = KripkeModel::new(n);
            m.rel = rel.iter().copied().collect();
            if check_frame(&m, &frame_only) {
                frames.push(rel);
            }
        }
        for u in 0..=bounds.max_individuals.min(7) {
            let full = ((1u16 << u) - 1) as u8;
            let combos = (1usize << u).pow(n as u32);
            for rel in &frames {
                for code in 0..combos {
                    let domains: Vec<u8> = (0..n).map(|w| ((code >> (w * u)) & full as usize) as u8).collect();
                    if domains.iter().fold(0, |a, d| a | d) != full {
                        continue;
                    }
                    let sk = Skeleton {
                        n,
                        u,
                        rel: rel.clone(),
                        domains,
                    };
                    if check_frame(&sk.model(), frame) {
                        out.push(sk);
                    }
                }
            }
        }
    }
    out
}

fn slots_of<'a>(vars: impl IntoIterator<Item = &'a Var>) -> HashMap<Var, usize> {
    let mut slots = HashMap::new();
    for v in vars {
        let next = slots.len();
        slots.entry(v.clone()).or_insert(next);
    }
    slots
}

fn pred_index(sig: &Sig) -> HashMap<(String, usize), usize> {
    sig.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect()
}

/// Searches for a rooted model of `frame` within `bounds` whose root
/// falsifies the closed formula `phi`. Smaller models come first.
pub fn find_countermodel(phi: &Formula, frame: &FrameSpec, bounds: &Bounds) -> Option<Countermodel> {
    let mut sig_set = BTreeSet::new();
    signature_into(phi, &mut sig_set);
    let sig: Sig = sig_set.into_iter().collect();
    let preds = pred_index(&sig);
    let vars = phi.all_vars();
    let slots = slots_of(&vars);
    let compiled = Compiler {
        preds: &preds,
        slots: &slots,
    }
    .compile(phi);
    skeletons(frame, bounds, true).par_iter().find_map_first(|sk| {
        let mut c = sk.compact();
        let mut asg = vec![0usize; slots.len()];
        let bits = valuation_bits(&sig, sk.n, sk.u);
        for code in 0..(1u64 << bits) {
            install(&mut c, &sig, code);
            if c.sat(&compiled, &mut asg) & 1 == 0 {
                return Some(Countermodel {
                    model: full_model(sk, &c, &sig),
                    world: 0,
                });
            }
        }
        None
    })
}

/// Searches for a model of `frame` and an interpretation falsifying the
/// labeled sequent: all atoms and left formulas true, all right ones false.
pub fn find_sequent_countermodel(
    seq: &LabeledSequent,
    frame: &FrameSpec,
    bounds: &Bounds,
) -> Option<SequentCountermodel> {
    let mut sig_set = BTreeSet::new();
    for (_, f) in seq.left.iter().chain(&seq.right) {
        signature_into(f, &mut sig_set);
    }
    let sig: Sig = sig_set.into_iter().collect();
    let preds = pred_index(&sig);
    let labels: Vec<Label> = seq.labels().into_iter().collect();
    let free: Vec<Var> = seq.vars().into_iter().collect();
    let mut every = seq.all_names();
    every.extend(free.iter().cloned());
    let slots = slots_of(free.iter().chain(every.iter()));
    let comp = Compiler {
        preds: &preds,
        slots: &slots,
    };
    let lbl: HashMap<&Label, usize> = labels.iter().enumerate().map(|(i, l)| (l, i)).collect();
    let left: Vec<(usize, Compiled)> = seq.left.iter().map(|(w, f)| (lbl[w], comp.compile(f))).collect();
    let right: Vec<(usize, Compiled)> = seq.right.iter().map(|(w, f)| (lbl[w], comp.compile(f))).collect();
    let rel: Vec<(usize, usize)> = seq.rel.iter().map(|(w, u)| (lbl[w], lbl[u])).collect();
    let dom: Vec<(usize, usize)> = seq.dom.iter().map(|(x, w)| (slots[x], lbl[w])).collect();

    skeletons(frame, bounds, false).par_iter().find_map_first(|sk| {
        let mut c = sk.compact();
        // interpretations satisfying the atoms depend only on the skeleton
        let mut interps: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        let nl = labels.len();
        let nv = free.len();
        if nv > 0 && sk.u == 0 {
            return None;
        }
        let label_combos = sk.n.pow(nl as u32);
        let var_combos = sk.u.max(1).pow(nv as u32);
        for lc in 0..label_combos {
            let worlds = decode_tuple(lc, sk.n, nl);
            if !rel.iter().all(|&(a, b)| c.succ[worlds[a]] >> worlds[b] & 1 == 1) {
                continue;
            }
            for vc in 0..var_combos {
                let mut asg = decode_tuple(vc, sk.u, nv);
                asg.resize(slots.len(), 0);
                if dom.iter().all(|&(x, w)| c.holders[asg[x]] >> worlds[w] & 1 == 1) {
                    interps.push((worlds.clone(), asg));
                }
            }
        }
        if interps.is_empty() {
            return None;
        }
        let bits = valuation_bits(&sig, sk.n, sk.u);
        for code in 0..(1u64 << bits) {
            install(&mut c, &sig, code);
            for (worlds, asg) in &mut interps {
                let left_ok = left.iter().all(|(l, f)| c.sat(f, asg) >> worlds[*l] & 1 == 1);
                if left_ok && right.iter().all(|(l, f)| c.sat(f, asg) >> worlds[*l] & 1 == 0) {
                    let interpretation = Interpretation {
                        labels: labels.iter().cloned().zip(worlds.iter().copied()).collect(),
                        vars: free.iter().cloned().zip(asg.iter().copied()).collect::<Assignment>(),
                    };
                    return Some(SequentCountermodel {
                        model: full_model(sk, &c, &sig),
                        interpretation,
                    });
                }
            }
        }
        None
    })
}

/// Calls `f` on every model of `frame` within `bounds` with valuations
/// over the given predicates, stopping early when `f` returns `false`.
/// Returns whether the enumeration ran to completion.
pub fn for_each_model(
    frame: &FrameSpec,
    bounds: &Bounds,
    signature: &BTreeMap<String, usize>,
    rooted: bool,
    mut f: impl FnMut(&KripkeModel) -> bool,
) -> bool {
    let sig: Sig = signature.iter().map(|(k, v)| (k.clone(), *v)).collect();
    for sk in skeletons(frame, bounds, rooted) {
        let mut c = sk.compact();
        let bits = valuation_bits(&sig, sk.n, sk.u);
        for code in 0..(1u64 << bits) {
            install(&mut c, &sig, code);
            if !f(&full_model(&sk, &c, &sig)) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::super::eval;
    use super::*;
    use crate::syntax::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn spec_examples() {
        let b = Bounds::default();
        for frame in [FrameSpec::empty(), FrameSpec::empty().serial().path(0, 2).constant()] {
            assert!(find_countermodel(&f("~<>false"), &frame, &b).is_none());
        }
        let cm = find_countermodel(&f("<>~false"), &FrameSpec::empty(), &Bounds { max_worlds: 2, max_individuals: 1 }).unwrap();
        assert_eq!(cm.model.worlds, 1);
        assert!(cm.model.rel.is_empty());
        let cm = find_countermodel(&f("exists x. p(x) | ~p(x)"), &FrameSpec::empty(), &Bounds { max_worlds: 1, max_individuals: 1 }).unwrap();
        assert!(cm.model.domain[0].is_empty());
    }

    #[test]
    fn compiled_agrees_with_reference() {
        let phi = f("<>exists x. p(x) -> exists x. <>p(x)");
        let sig = phi.signature().unwrap();
        let mut checked = 0;
        for_each_model(&FrameSpec::empty(), &Bounds { max_worlds: 2, max_individuals: 2 }, &sig, false, |m| {
            for w in 0..m.worlds {
                let reference = eval(m, w, &Assignment::new(), &phi).unwrap();
                let single = find_countermodel_in(m, &phi, w);
                assert_eq!(reference, single, "{m}");
                checked += 1;
            }
            true
        });
        assert!(checked > 1000);
    }

    /// Compiled evaluation on one explicit model.
    fn find_countermodel_in(m: &KripkeModel, phi: &Formula, w: World) -> bool {
        let mut sig_set = BTreeSet::new();
        signature_into(phi, &mut sig_set);
        let sig: Sig = sig_set.into_iter().collect();
        let preds = pred_index(&sig);
        let vars = phi.all_vars();
        let slots = slots_of(&vars);
        let comp = Compiler { preds: &preds, slots: &slots }.compile(phi);
        let u = m.universe().len();
        let sk = Skeleton {
            n: m.worlds,
            u,
            rel: m.rel.iter().copied().collect(),
            domains: m.domain.iter().map(|d| d.iter().fold(0u8, |a, i| a | 1 << i)).collect(),
        };
        let mut c = sk.compact();
        c.val = sig
            .iter()
            .map(|(name, arity)| {
                (0..tuple_count(u, *arity))
                    .map(|t| {
                        let tuple = decode_tuple(t, u, *arity);
                        (0..m.worlds).filter(|&v| m.holds(name, v, &tuple)).fold(0u8, |a, v| a | 1 << v)
                    })
                    .collect()
            })
            .collect();
        let mut asg = vec![0; slots.len()];
        c.sat(&comp, &mut asg) >> w & 1 == 1
    }

    #[test]
    fn constant_domains_are_constant_on_components() {
        let sig = BTreeMap::new();
        for_each_model(&FrameSpec::empty().constant(), &Bounds::default(), &sig, true, |m| {
            // rooted, so every world is connected to 0
            assert!(m.domain.iter().all(|d| *d == m.domain[0]));
            true
        });
    }

    #[test]
    fn sequent_countermodels() {
        let b = Bounds::default();
        let valid = LabeledSequent::new().with_rel("w", "u").with_left("u", f("p")).with_right("w", f("<>p"));
        assert!(find_sequent_countermodel(&valid, &FrameSpec::empty(), &b).is_none());
        let invalid = LabeledSequent::new().with_left("u", f("p")).with_right("w", f("<>p"));
        let cm = find_sequent_countermodel(&invalid, &FrameSpec::empty(), &b).unwrap();
        assert!(!super::super::eval_labeled_sequent(&cm.model, &cm.interpretation, &invalid).unwrap());
        let avail = LabeledSequent::new()
            .with_rel("w", "u")
            .with_dom("y", "w")
            .with_left("u", f("p(y)"))
            .with_right("u", f("exists x. p(x)"));
        assert!(find_sequent_countermodel(&avail, &FrameSpec::empty(), &b).is_some());
        assert!(find_sequent_countermodel(&avail, &FrameSpec::empty().inc(), &b).is_none());
    }
}
