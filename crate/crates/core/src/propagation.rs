//! Propagation graphs and grammar-constrained reachability.
//!
//! A relational atom `wRu` contributes the edges `(w,◇,u)` and `(u,◆,w)`.
//! Whether a path's string lies in `L_S(a)` is decided for all vertex pairs
//! at once by CFL-reachability: a worklist fixpoint over facts
//! `(N, src, dst)` meaning "some path from `src` to `dst` spells a word
//! generated by `N`". Each fact keeps the first justification that produced
//! it so a concrete witness path can be unfolded afterwards.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grammar::{Cfg, Character, Nonterminal, Rhs, ThueSystem, Word};
use crate::sequents::{Label, LabeledSequent};
use crate::syntax::Var;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PropagationError {
    #[error("label `{0}` is not a vertex of the propagation graph")]
    UnknownLabel(Label),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropagationGraph {
    /// Each vertex with the variables of its domain atoms.
    pub vertices: BTreeMap<Label, BTreeSet<Var>>,
    pub edges: BTreeSet<(Label, Character, Label)>,
}

impl PropagationGraph {
    /// Graph of a labeled sequent. Every mentioned label becomes a vertex,
    /// so labels that carry only formulas show up as isolated vertices.
    pub fn of_sequent(seq: &LabeledSequent) -> Self {
        let mut g = PropagationGraph::default();
        for l in seq.labels() {
            g.vertices.entry(l).or_default();
        }
        for (x, w) in &seq.dom {
            g.vertices.entry(w.clone()).or_default().insert(x.clone());
        }
        for (w, u) in &seq.rel {
            g.add_edge(w, u);
        }
        g
    }

    /// Adds the two edges of `wRu`, creating the vertices if needed.
    pub fn add_edge(&mut self, w: &str, u: &str) {
        self.vertices.entry(w.to_string()).or_default();
        self.vertices.entry(u.to_string()).or_default();
        self.edges.insert((w.to_string(), Character::Dia, u.to_string()));
        self.edges.insert((u.to_string(), Character::BDia, w.to_string()));
    }

    pub fn has_vertex(&self, w: &str) -> bool {
        self.vertices.contains_key(w)
    }

    pub fn has_edge(&self, w: &str, c: Character, u: &str) -> bool {
        self.edges.contains(&(w.to_string(), c, u.to_string()))
    }

    /// `(w,◇,u) ∈ E` iff `(u,◆,w) ∈ E`.
    pub fn is_symmetric(&self) -> bool {
        self.edges
            .iter()
            .all(|(w, c, u)| self.has_edge(u, c.converse(), w))
    }

    /// Runs the reachability fixpoint for `system`.
    pub fn reachability(&self, system: &ThueSystem) -> Reachability {
        Reachability::compute(self, system)
    }

    /// Every `u` with a path `π(w,u)` whose string lies in `L_S(a)`.
    pub fn reachable(
        &self,
        system: &ThueSystem,
        a: Character,
        w: &str,
    ) -> Result<BTreeSet<Label>, PropagationError> {
        self.reachability(system).targets(a, w)
    }

    pub fn witness_path(
        &self,
        system: &ThueSystem,
        a: Character,
        w: &str,
        u: &str,
    ) -> Option<PropPath> {
        self.reachability(system).witness(a, w, u)
    }

    /// Variables `(S,a)`-available for `w`.
    pub fn available(
        &self,
        system: &ThueSystem,
        a: Character,
        w: &str,
    ) -> Result<BTreeSet<Var>, PropagationError> {
        let targets = self.reachable(system, a, w)?;
        Ok(targets
            .iter()
            .flat_map(|u| self.vertices[u].iter().cloned())
            .collect())
    }

    /// Whether `path` is a propagation path of this graph.
    pub fn contains_path(&self, path: &PropPath) -> bool {
        path.is_well_formed()
            && path.nodes.iter().all(|n| self.has_vertex(n))
            && path.steps().all(|(w, c, u)| self.has_edge(w, c, u))
    }
}

impl fmt::Display for PropagationGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (w, theta) in &self.vertices {
            let vars: Vec<&str> = theta.iter().map(String::as_str).collect();
            writeln!(f, "({w}, {{{}}})", vars.join(", "))?;
        }
        for (w, c, u) in &self.edges {
            writeln!(f, "{w} -{}-> {u}", c.symbol())?;
        }
        Ok(())
    }
}

pub fn build_graph(seq: &LabeledSequent) -> PropagationGraph {
    PropagationGraph::of_sequent(seq)
}

/// `w₁, a₁, w₂, …, aₙ₋₁, wₙ`; a single node is the empty path `ε(w,w)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PropPath {
    pub nodes: Vec<Label>,
    pub chars: Word,
}

impl PropPath {
    pub fn empty(w: &str) -> Self {
        PropPath {
            nodes: vec![w.to_string()],
            chars: Word::empty(),
        }
    }

    pub fn from_steps(start: &str, steps: &[(Character, Label)]) -> Self {
        let mut nodes = vec![start.to_string()];
        let mut chars = Vec::new();
        for (c, u) in steps {
            chars.push(*c);
            nodes.push(u.clone());
        }
        PropPath { nodes, chars: Word(chars) }
    }

    pub fn is_well_formed(&self) -> bool {
        !self.nodes.is_empty() && self.nodes.len() == self.chars.len() + 1
    }

    pub fn start(&self) -> &str {
        &self.nodes[0]
    }

    pub fn end(&self) -> &str {
        self.nodes.last().expect("path has at least one node")
    }

    /// `s_π`
    pub fn string(&self) -> &Word {
        &self.chars
    }

    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }

    pub fn steps(&self) -> impl Iterator<Item = (&str, Character, &str)> {
        self.chars
            .0
            .iter()
            .enumerate()
            .map(move |(i, &c)| (self.nodes[i].as_str(), c, self.nodes[i + 1].as_str()))
    }

    /// `π̄`: reversed with every character flipped.
    pub fn converse(&self) -> PropPath {
        let mut nodes = self.nodes.clone();
        nodes.reverse();
        PropPath {
            nodes,
            chars: self.chars.converse(),
        }
    }

    pub fn concat(&self, other: &PropPath) -> PropPath {
        debug_assert_eq!(self.end(), other.start());
        let mut nodes = self.nodes.clone();
        nodes.extend(other.nodes.iter().skip(1).cloned());
        PropPath {
            nodes,
            chars: self.chars.concat(&other.chars),
        }
    }
}

impl fmt::Display for PropPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.nodes[0])?;
        for (i, c) in self.chars.0.iter().enumerate() {
            write!(f, ", {}, {}", c.symbol(), self.nodes[i + 1])?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
enum Justification {
    Empty,
    Edge(Character),
    Unit(Nonterminal),
    Pair(Nonterminal, Nonterminal, usize),
}

type Fact = (Nonterminal, usize, usize);

/// Result of the CFL-reachability fixpoint over one graph and system.
#[derive(Debug, Clone)]
pub struct Reachability {
    labels: Vec<Label>,
    index: HashMap<Label, usize>,
    facts: HashMap<Fact, Justification>,
}

impl Reachability {
    pub fn compute(graph: &PropagationGraph, system: &ThueSystem) -> Self {
        let cfg = system.to_cfg();
        let labels: Vec<Label> = graph.vertices.keys().cloned().collect();
        let index: HashMap<Label, usize> =
            labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        let n = labels.len();
        let nt = cfg.num_nonterminals;

        let mut by_lhs_unit: Vec<Vec<Nonterminal>> = vec![Vec::new(); nt];
        let mut pairs_left: Vec<Vec<(Nonterminal, Nonterminal)>> = vec![Vec::new(); nt];
        let mut pairs_right: Vec<Vec<(Nonterminal, Nonterminal)>> = vec![Vec::new(); nt];
        for p in &cfg.productions {
            match p.rhs {
                Rhs::Unit(a) => by_lhs_unit[a].push(p.lhs),
                Rhs::Pair(a, b) => {
                    pairs_left[a].push((p.lhs, b));
                    pairs_right[b].push((p.lhs, a));
                }
                _ => {}
            }
        }

        let mut facts: HashMap<Fact, Justification> = HashMap::new();
        // out[N][i] = targets j with (N,i,j); inn[N][j] = sources i
        let mut out = vec![vec![Vec::<usize>::new(); n]; nt];
        let mut inn = vec![vec![Vec::<usize>::new(); n]; nt];
        let mut queue: VecDeque<Fact> = VecDeque::new();

        let add = |fact: Fact,
                       j: Justification,
                       facts: &mut HashMap<Fact, Justification>,
                       out: &mut Vec<Vec<Vec<usize>>>,
                       inn: &mut Vec<Vec<Vec<usize>>>,
                       queue: &mut VecDeque<Fact>| {
            if facts.contains_key(&fact) {
                return;
            }
            facts.insert(fact, j);
            out[fact.0][fact.1].push(fact.2);
            inn[fact.0][fact.2].push(fact.1);
            queue.push_back(fact);
        };

        for p in &cfg.productions {
            match p.rhs {
                Rhs::Empty => {
                    for i in 0..n {
                        add((p.lhs, i, i), Justification::Empty, &mut facts, &mut out, &mut inn, &mut queue);
                    }
                }
                Rhs::Terminal(c) => {
                    for (w, ec, u) in &graph.edges {
                        if *ec == c {
                            let f = (p.lhs, index[w], index[u]);
                            add(f, Justification::Edge(c), &mut facts, &mut out, &mut inn, &mut queue);
                        }
                    }
                }
                _ => {}
            }
        }

        while let Some((a, i, j)) = queue.pop_front() {
            for &lhs in &by_lhs_unit[a] {
                add((lhs, i, j), Justification::Unit(a), &mut facts, &mut out, &mut inn, &mut queue);
            }
            for &(lhs, b) in &pairs_left[a] {
                let targets = out[b][j].clone();
                for k in targets {
                    add((lhs, i, k), Justification::Pair(a, b, j), &mut facts, &mut out, &mut inn, &mut queue);
                }
            }
            for &(lhs, left) in &pairs_right[a] {
                let sources = inn[left][i].clone();
                for h in sources {
                    add((lhs, h, j), Justification::Pair(left, a, i), &mut facts, &mut out, &mut inn, &mut queue);
                }
            }
        }

        Reachability { labels, index, facts }
    }

    fn idx(&self, w: &str) -> Result<usize, PropagationError> {
        self.index
            .get(w)
            .copied()
            .ok_or_else(|| PropagationError::UnknownLabel(w.to_string()))
    }

    pub fn targets(&self, a: Character, w: &str) -> Result<BTreeSet<Label>, PropagationError> {
        let i = self.idx(w)?;
        let start = Cfg::start(a);
        Ok((0..self.labels.len())
            .filter(|&j| self.facts.contains_key(&(start, i, j)))
            .map(|j| self.labels[j].clone())
            .collect())
    }

    pub fn holds(&self, a: Character, w: &str, u: &str) -> bool {
        match (self.idx(w), self.idx(u)) {
            (Ok(i), Ok(j)) => self.facts.contains_key(&(Cfg::start(a), i, j)),
            _ => false,
        }
    }

    pub fn witness(&self, a: Character, w: &str, u: &str) -> Option<PropPath> {
        let (i, j) = (self.idx(w).ok()?, self.idx(u).ok()?);
        let fact = (Cfg::start(a), i, j);
        if !self.facts.contains_key(&fact) {
            return None;
        }
        let mut steps = Vec::new();
        self.unfold(fact, &mut steps);
        let nodes_steps: Vec<(Character, Label)> = steps
            .into_iter()
            .map(|(c, k)| (c, self.labels[k].clone()))
            .collect();
        Some(PropPath::from_steps(w, &nodes_steps))
    }

    fn unfold(&self, fact: Fact, steps: &mut Vec<(Character, usize)>) {
        let (_, i, j) = fact;
        match self.facts[&fact] {
            Justification::Empty => {}
            Justification::Edge(c) => steps.push((c, j)),
            Justification::Unit(a) => self.unfold((a, i, j), steps),
            Justification::Pair(a, b, mid) => {
                self.unfold((a, i, mid), steps);
                self.unfold((b, mid, j), steps);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::Character::*;
    use crate::syntax::parse_formula;

    fn example() -> LabeledSequent {
        LabeledSequent::new()
            .with_rel("w", "v")
            .with_rel("w", "u")
            .with_dom("y", "w")
            .with_dom("z", "u")
            .with_right("v", parse_formula("exists x. p(x)").unwrap())
            .with_right("u", parse_formula("<>(q | r)").unwrap())
    }

    fn set(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn example_graph() {
        let g = build_graph(&example());
        assert_eq!(g.vertices["v"], set(&[]));
        assert_eq!(g.vertices["w"], set(&["y"]));
        assert_eq!(g.vertices["u"], set(&["z"]));
        assert_eq!(g.edges.len(), 4);
        assert!(g.has_edge("w", Dia, "v") && g.has_edge("v", BDia, "w"));
        assert!(g.has_edge("w", Dia, "u") && g.has_edge("u", BDia, "w"));
        assert!(g.is_symmetric());
    }

    #[test]
    fn trivial_graphs() {
        let single = LabeledSequent::goal("w", parse_formula("p").unwrap());
        let g = build_graph(&single);
        assert_eq!(g.vertices.len(), 1);
        assert!(g.edges.is_empty());
        let twice = LabeledSequent::new().with_rel("w", "u").with_rel("w", "u");
        assert_eq!(build_graph(&twice).edges.len(), 2);
    }

    #[test]
    fn euclidean_reachability_and_witness() {
        let g = build_graph(&example());
        let s = ThueSystem::of_paths(&[(1, 1)]);
        assert!(g.reachable(&s, Dia, "u").unwrap().contains("v"));
        let path = g.witness_path(&s, Dia, "u", "v").unwrap();
        assert_eq!(path.to_string(), "u, ◆, w, ◇, v");
        assert_eq!(path.string(), &"bd".parse::<Word>().unwrap());
    }

    #[test]
    fn empty_system_is_one_step() {
        let g = build_graph(&example());
        assert_eq!(g.reachable(&ThueSystem::empty(), Dia, "w").unwrap(), set(&["u", "v"]));
        assert_eq!(g.available(&ThueSystem::empty(), Dia, "w").unwrap(), set(&["z"]));
    }

    #[test]
    fn s5_reaches_component() {
        let g = build_graph(&example().with_right("lonely", parse_formula("p").unwrap()));
        for w in ["w", "u", "v"] {
            assert_eq!(g.reachable(&ThueSystem::s5(), Dia, w).unwrap(), set(&["u", "v", "w"]));
        }
        assert_eq!(g.reachable(&ThueSystem::s5(), Dia, "lonely").unwrap(), set(&["lonely"]));
    }

    #[test]
    fn empty_witness_under_s4() {
        let g = build_graph(&example());
        assert_eq!(g.witness_path(&ThueSystem::s4(), Dia, "w", "w"), Some(PropPath::empty("w")));
    }

    #[test]
    fn increasing_domain_availability() {
        let g = build_graph(&example());
        let s = ThueSystem::s4().union(&ThueSystem::of_paths(&[(1, 1)]));
        assert!(g.available(&s, BDia, "v").unwrap().contains("y"));
        let edgeless = LabeledSequent::new().with_dom("x", "w");
        assert_eq!(build_graph(&edgeless).available(&ThueSystem::s4(), Dia, "w").unwrap(), set(&["x"]));
    }

    #[test]
    fn unknown_label() {
        let g = build_graph(&example());
        assert_eq!(
            g.reachable(&ThueSystem::s4(), Dia, "nowhere"),
            Err(PropagationError::UnknownLabel("nowhere".into()))
        );
    }

    #[test]
    fn converse_path() {
        let p = PropPath::from_steps("u", &[(BDia, "w".into()), (Dia, "v".into())]);
        let c = p.converse();
        assert_eq!(c.to_string(), "v, ◆, w, ◇, u");
        assert_eq!(c.string(), &p.string().converse());
    }
}
