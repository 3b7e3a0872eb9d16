//! Semi-Thue systems over the two-letter alphabet `{◇, ◆}`.
//!
//! Every system handled here has single-character left-hand sides, which
//! makes it a context-free grammar in disguise: each character `a` becomes a
//! nonterminal `N_a` with the extra production `N_a → a` ("leave the
//! character alone"). Membership `t ∈ L_S(a)` is then decided by a chart
//! parser over the binarised grammar, and the same grammar drives the
//! CFL-reachability engine in [`crate::propagation`].

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Character {
    /// `◇`, a forward move along the accessibility relation.
    Dia,
    /// `◆`, a backward move.
    BDia,
}

impl Character {
    pub const ALL: [Character; 2] = [Character::Dia, Character::BDia];

    pub fn converse(self) -> Character {
        match self {
            Character::Dia => Character::BDia,
            Character::BDia => Character::Dia,
        }
    }

    pub fn ascii(self) -> char {
        match self {
            Character::Dia => 'd',
            Character::BDia => 'b',
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Character::Dia => '◇',
            Character::BDia => '◆',
        }
    }

    fn index(self) -> usize {
        match self {
            Character::Dia => 0,
            Character::BDia => 1,
        }
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.ascii())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("unknown character `{0}` (expected `d`/`◇` or `b`/`◆`)")]
    BadCharacter(char),
    #[error("malformed production `{0}` (expected `d -> bd` or `d -> eps`)")]
    BadProduction(String),
    #[error("unknown system `{0}`")]
    BadSystem(String),
}

impl FromStr for Character {
    type Err = GrammarError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.trim().chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => char_from(c),
            _ => Err(GrammarError::BadCharacter(s.chars().next().unwrap_or(' '))),
        }
    }
}

fn char_from(c: char) -> Result<Character, GrammarError> {
    match c {
        'd' | '◇' => Ok(Character::Dia),
        'b' | '◆' => Ok(Character::BDia),
        other => Err(GrammarError::BadCharacter(other)),
    }
}

/// A string over `{◇, ◆}`. Written `ddb` in ASCII, `eps` (or nothing) for ε.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<Character>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn repeat(c: Character, n: usize) -> Self {
        Word(vec![c; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// `conv(a₁⋯aₙ) = conv(aₙ)⋯conv(a₁)`
    pub fn converse(&self) -> Word {
        Word(self.0.iter().rev().map(|c| c.converse()).collect())
    }

    /// All words of length exactly `n`, in lexicographic order.
    pub fn all_of_length(n: usize) -> Vec<Word> {
        (0..1usize << n)
            .map(|bits| {
                Word((0..n)
                    .map(|i| if bits >> (n - 1 - i) & 1 == 0 { Character::Dia } else { Character::BDia })
                    .collect())
            })
            .collect()
    }

    pub fn symbols(&self) -> String {
        if self.0.is_empty() {
            "ε".to_string()
        } else {
            self.0.iter().map(|c| c.symbol()).collect()
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("eps");
        }
        for c in &self.0 {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = GrammarError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "eps" || s == "ε" {
            return Ok(Word::empty());
        }
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(char_from)
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }
}

impl Serialize for Character {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.ascii().to_string())
    }
}

impl<'de> Deserialize<'de> for Character {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        // ε is the empty JSON string
        let text: String = self.0.iter().map(|c| c.ascii()).collect();
        s.serialize_str(&text)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Production {
    pub lhs: Character,
    pub rhs: Word,
}

impl Production {
    pub fn new(lhs: Character, rhs: Word) -> Self {
        Production { lhs, rhs }
    }
}

impl fmt::Display for Production {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs)
    }
}

impl FromStr for Production {
    type Err = GrammarError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (l, r) = s
            .split_once("->")
            .ok_or_else(|| GrammarError::BadProduction(s.to_string()))?;
        let lhs: Character = l
            .trim()
            .parse()
            .map_err(|_| GrammarError::BadProduction(s.to_string()))?;
        Ok(Production::new(lhs, r.parse()?))
    }
}

/// A set of productions; duplicates collapse.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ThueSystem {
    pub rules: BTreeSet<Production>,
}

impl ThueSystem {
    pub fn new(rules: impl IntoIterator<Item = Production>) -> Self {
        ThueSystem {
            rules: rules.into_iter().collect(),
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// `{◇→ε, ◆→ε, ◇→◇◇, ◆→◆◆}`: directed reachability.
    pub fn s4() -> Self {
        use Character::*;
        ThueSystem::new([
            Production::new(Dia, Word::empty()),
            Production::new(BDia, Word::empty()),
            Production::new(Dia, Word(vec![Dia, Dia])),
            Production::new(BDia, Word(vec![BDia, BDia])),
        ])
    }

    /// `{◇→ε, ◆→ε, ◇→◆◇, ◆→◆◇}`: undirected reachability.
    pub fn s5() -> Self {
        use Character::*;
        ThueSystem::new([
            Production::new(Dia, Word::empty()),
            Production::new(BDia, Word::empty()),
            Production::new(Dia, Word(vec![BDia, Dia])),
            Production::new(BDia, Word(vec![BDia, Dia])),
        ])
    }

    /// `S(G)`: `◇ → ◆ⁿ◇ᵏ` and `◆ → ◆ᵏ◇ⁿ` for every `(n,k)` in `paths`.
    pub fn of_paths<'a>(paths: impl IntoIterator<Item = &'a (usize, usize)>) -> Self {
        use Character::*;
        let mut rules = BTreeSet::new();
        for &(n, k) in paths {
            rules.insert(Production::new(
                Dia,
                Word::repeat(BDia, n).concat(&Word::repeat(Dia, k)),
            ));
            rules.insert(Production::new(
                BDia,
                Word::repeat(BDia, k).concat(&Word::repeat(Dia, n)),
            ));
        }
        ThueSystem { rules }
    }

    pub fn union(&self, other: &ThueSystem) -> ThueSystem {
        ThueSystem {
            rules: self.rules.union(&other.rules).cloned().collect(),
        }
    }

    /// Named systems for the command line: `s4`, `s5`, `empty`, or
    /// `paths:N:K,N:K`, joined with `+` for unions.
    pub fn from_name(name: &str) -> Result<Self, GrammarError> {
        let mut out = ThueSystem::empty();
        for part in name.split('+') {
            let part = part.trim();
            let sys = match part {
                "s4" | "S4" => ThueSystem::s4(),
                "s5" | "S5" => ThueSystem::s5(),
                "empty" | "" => ThueSystem::empty(),
                _ => {
                    let spec = part
                        .strip_prefix("paths:")
                        .ok_or_else(|| GrammarError::BadSystem(part.to_string()))?;
                    let mut paths = BTreeSet::new();
                    for pair in spec.split(',').filter(|s| !s.is_empty()) {
                        let (n, k) = pair
                            .split_once(':')
                            .ok_or_else(|| GrammarError::BadSystem(part.to_string()))?;
                        let parse = |s: &str| {
                            s.trim()
                                .parse::<usize>()
                                .map_err(|_| GrammarError::BadSystem(part.to_string()))
                        };
                        paths.insert((parse(n)?, parse(k)?));
                    }
                    ThueSystem::of_paths(&paths)
                }
            };
            out = out.union(&sys);
        }
        Ok(out)
    }

    /// All `t` with `s → t` in one rewriting step.
    pub fn one_step(&self, s: &Word) -> BTreeSet<Word> {
        let mut out = BTreeSet::new();
        for (i, &c) in s.0.iter().enumerate() {
            for rule in self.rules.iter().filter(|r| r.lhs == c) {
                let mut t = s.0[..i].to_vec();
                t.extend_from_slice(&rule.rhs.0);
                t.extend_from_slice(&s.0[i + 1..]);
                out.insert(Word(t));
            }
        }
        out
    }

    pub fn to_cfg(&self) -> Cfg {
        Cfg::from_system(self)
    }

    /// `t ∈ L_S(a)`.
    pub fn derives(&self, start: Character, t: &Word) -> bool {
        self.to_cfg().generates(start, t)
    }
}

impl fmt::Display for ThueSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.rules.iter().map(|r| r.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// `t ∈ L_S(a)`.
pub fn derives(system: &ThueSystem, start: Character, t: &Word) -> bool {
    system.derives(start, t)
}

/// Nonterminal index. `0` is `N_◇`, `1` is `N_◆`, higher indices are
/// auxiliaries introduced by binarisation.
pub type Nonterminal = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rhs {
    Empty,
    Terminal(Character),
    Unit(Nonterminal),
    Pair(Nonterminal, Nonterminal),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CfgProduction {
    pub lhs: Nonterminal,
    pub rhs: Rhs,
    /// Index into the source system's rule list (in iteration order), or
    /// `None` for the `N_a → a` terminal productions.
    pub origin: Option<usize>,
}

/// A context-free grammar with right-hand sides of length at most two.
#[derive(Debug, Clone)]
pub struct Cfg {
    pub num_nonterminals: usize,
    pub productions: Vec<CfgProduction>,
    nullable: Vec<bool>,
}

impl Cfg {
    pub fn start(c: Character) -> Nonterminal {
        c.index()
    }

    fn from_system(system: &ThueSystem) -> Cfg {
        let mut productions = Vec::new();
        for c in Character::ALL {
            productions.push(CfgProduction {
                lhs: Cfg::start(c),
                rhs: Rhs::Terminal(c),
                origin: None,
            });
        }
        let mut next = 2;
        for (idx, rule) in system.rules.iter().enumerate() {
            let lhs = Cfg::start(rule.lhs);
            let syms: Vec<Nonterminal> = rule.rhs.0.iter().map(|&c| Cfg::start(c)).collect();
            let origin = Some(idx);
            match syms.len() {
                0 => productions.push(CfgProduction { lhs, rhs: Rhs::Empty, origin }),
                1 => productions.push(CfgProduction { lhs, rhs: Rhs::Unit(syms[0]), origin }),
                _ => {
                    // N → A₁ X₁, X₁ → A₂ X₂, …, X_{m-2} → A_{m-1} A_m
                    let mut head = lhs;
                    for (i, &sym) in syms.iter().enumerate().take(syms.len() - 2) {
                        let aux = next;
                        next += 1;
                        productions.push(CfgProduction { lhs: head, rhs: Rhs::Pair(sym, aux), origin });
                        head = aux;
                        let _ = i;
                    }
                    let m = syms.len();
                    productions.push(CfgProduction {
                        lhs: head,
                        rhs: Rhs::Pair(syms[m - 2], syms[m - 1]),
                        origin,
                    });
                }
            }
        }
        let mut cfg = Cfg {
            num_nonterminals: next,
            productions,
            nullable: Vec::new(),
        };
        cfg.nullable = cfg.compute_nullable();
        cfg
    }

    fn compute_nullable(&self) -> Vec<bool> {
        let mut nullable = vec![false; self.num_nonterminals];
        let mut changed = true;
        while changed {
            changed = false;
            for p in &self.productions {
                if nullable[p.lhs] {
                    continue;
                }
                let now = match p.rhs {
                    Rhs::Empty => true,
                    Rhs::Terminal(_) => false,
                    Rhs::Unit(a) => nullable[a],
                    Rhs::Pair(a, b) => nullable[a] && nullable[b],
                };
                if now {
                    nullable[p.lhs] = true;
                    changed = true;
                }
            }
        }
        nullable
    }

    pub fn is_nullable(&self, n: Nonterminal) -> bool {
        self.nullable[n]
    }

    /// CYK-style chart membership with ε- and unit-closure per span.
    pub fn generates(&self, start: Character, t: &Word) -> bool {
        let n = t.len();
        let nt = self.num_nonterminals;
        // chart[i][len] = nonterminals deriving t[i..i+len]
        let mut chart = vec![vec![vec![false; nt]; n + 1]; n + 1];
        for row in chart.iter_mut() {
            row[0].clone_from(&self.nullable);
        }
        for len in 1..=n {
            for i in 0..=n - len {
                let mut cell = vec![false; nt];
                for p in &self.productions {
                    match p.rhs {
                        Rhs::Terminal(c) if len == 1 && t.0[i] == c => cell[p.lhs] = true,
                        Rhs::Pair(a, b) => {
                            for k in 1..len {
                                if chart[i][k][a] && chart[i + k][len - k][b] {
                                    cell[p.lhs] = true;
                                    break;
                                }
                            }
                        }
                        _ => {}
                    }
                }
                // closure over units and pairs with a nullable side
                let mut changed = true;
                while changed {
                    changed = false;
                    for p in &self.productions {
                        if cell[p.lhs] {
                            continue;
                        }
                        let hit = match p.rhs {
                            Rhs::Unit(a) => cell[a],
                            Rhs::Pair(a, b) => {
                                (self.nullable[a] && cell[b]) || (cell[a] && self.nullable[b])
                            }
                            _ => false,
                        };
                        if hit {
                            cell[p.lhs] = true;
                            changed = true;
                        }
                    }
                }
                chart[i][len] = cell;
            }
        }
        chart[0][n][Cfg::start(start)]
    }

    /// Words of length at most `max_len` generated from `start`.
    pub fn language_up_to(&self, start: Character, max_len: usize) -> BTreeSet<Word> {
        (0..=max_len)
            .flat_map(Word::all_of_length)
            .filter(|w| self.generates(start, w))
            .collect()
    }
}

/// Breadth-first closure of `one_step` from a single character, keeping only
/// intermediate strings up to `max_len`. Exposed for diagnostics; exact only
/// when the truncation does not cut off needed derivations.
pub fn bounded_closure(system: &ThueSystem, start: Character, max_len: usize) -> HashSet<Word> {
    let mut seen = HashSet::new();
    let first = Word(vec![start]);
    let mut queue = VecDeque::from([first.clone()]);
    seen.insert(first);
    while let Some(s) = queue.pop_front() {
        for t in system.one_step(&s) {
            if t.len() <= max_len && seen.insert(t.clone()) {
                queue.push_back(t);
            }
        }
    }
    seen
}
