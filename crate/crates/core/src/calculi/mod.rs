//! Rule sets, rule application and proof checking for the labeled calculus
//! `G3QK(C)`, the refined labeled calculus `QK(C)L` and the nested calculus
//! `NQK(C)`.
//!
//! Rules are implemented once, generically over [`Sequent`], so the nested
//! rules are the labeled ones read through `𝔏`.

mod proof;
mod rules;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::grammar::{Character, ThueSystem};
use crate::propagation::PropPath;
use crate::sequents::Label;
use crate::syntax::{Formula, FrameSpec, Var};

pub use proof::{check, CheckError, ProofTree};
pub use rules::{apply_rule, side_condition, RuleError, Sequent};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleId {
    Ax,
    BotL,
    NegL,
    NegR,
    OrL,
    OrR,
    DiaL,
    DiaR,
    ExistsL,
    ExistsR,
    D,
    G(usize, usize),
    Id,
    Dd,
    Nd,
    PDia,
    SEx1,
    SEx2,
}

impl RuleId {
    /// `g(n,k)`, `id`, `dd`, `nd`: the rules eliminated by refinement.
    /// `(d)` stays, since both refined calculi keep it.
    pub fn is_relational(self) -> bool {
        matches!(self, RuleId::G(..) | RuleId::Id | RuleId::Dd | RuleId::Nd)
    }

    pub fn is_initial(self) -> bool {
        matches!(self, RuleId::Ax | RuleId::BotL)
    }

    /// Rules whose premise introduces a fresh label or variable.
    pub fn is_creating(self) -> bool {
        matches!(
            self,
            RuleId::DiaL | RuleId::ExistsL | RuleId::D | RuleId::Nd | RuleId::SEx2
        )
    }

    pub fn name(self) -> String {
        match self {
            RuleId::Ax => "ax".into(),
            RuleId::BotL => "bot_l".into(),
            RuleId::NegL => "neg_l".into(),
            RuleId::NegR => "neg_r".into(),
            RuleId::OrL => "or_l".into(),
            RuleId::OrR => "or_r".into(),
            RuleId::DiaL => "dia_l".into(),
            RuleId::DiaR => "dia_r".into(),
            RuleId::ExistsL => "exists_l".into(),
            RuleId::ExistsR => "exists_r".into(),
            RuleId::D => "d".into(),
            RuleId::G(n, k) => format!("g({n},{k})"),
            RuleId::Id => "id".into(),
            RuleId::Dd => "dd".into(),
            RuleId::Nd => "nd".into(),
            RuleId::PDia => "p_dia".into(),
            RuleId::SEx1 => "s_ex1".into(),
            RuleId::SEx2 => "s_ex2".into(),
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for RuleId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim() {
            "ax" => RuleId::Ax,
            "bot_l" => RuleId::BotL,
            "neg_l" => RuleId::NegL,
            "neg_r" => RuleId::NegR,
            "or_l" => RuleId::OrL,
            "or_r" => RuleId::OrR,
            "dia_l" => RuleId::DiaL,
            "dia_r" => RuleId::DiaR,
            "exists_l" => RuleId::ExistsL,
            "exists_r" => RuleId::ExistsR,
            "d" => RuleId::D,
            "id" => RuleId::Id,
            "dd" => RuleId::Dd,
            "nd" => RuleId::Nd,
            "p_dia" => RuleId::PDia,
            "s_ex1" => RuleId::SEx1,
            "s_ex2" => RuleId::SEx2,
            other => {
                let inner = other
                    .strip_prefix("g(")
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| format!("unknown rule `{other}`"))?;
                let (n, k) = inner
                    .split_once(',')
                    .ok_or_else(|| format!("unknown rule `{other}`"))?;
                let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("unknown rule `{other}`"));
                RuleId::G(num(n)?, num(k)?)
            }
        })
    }
}

impl Serialize for RuleId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.name())
    }
}

impl<'de> Deserialize<'de> for RuleId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Instantiation of a rule. Which fields a rule reads:
///
/// | rule | label | formula | target | var | witness | chains |
/// |------|-------|---------|--------|-----|---------|--------|
/// | ax, bot_l | component | atom / – | | | | |
/// | neg, or | component | principal | | | | |
/// | dia_l | component | principal | fresh label | | | |
/// | dia_r | component | principal | successor | | | |
/// | exists_l | component | principal | | fresh var | | |
/// | exists_r | component | principal | | var | | |
/// | d | parent | | fresh label | | | |
/// | g(n,k) | | | | | | `wRⁿu`, `wRᵏv` |
/// | id, dd | `w` of `wRu` | | `u` | var | | |
/// | nd | component | | | fresh var | | |
/// | p_dia | component | principal | target | | path | |
/// | s_ex1 | component | principal | label carrying `var` | var | path | |
/// | s_ex2 | component | principal | label receiving `var` | fresh var | path | |
///
/// Missing witnesses are searched for by the checker.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RuleParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<Label>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formula: Option<Formula>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Label>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub var: Option<Var>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<PropPath>,
    /// For `g(n,k)`: the label chains `w, …, u` (length `n+1`) and
    /// `w, …, v` (length `k+1`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chains: Option<(Vec<Label>, Vec<Label>)>,
}

impl RuleParams {
    pub fn at(label: &str) -> Self {
        RuleParams {
            label: Some(label.to_string()),
            ..Self::default()
        }
    }

    pub fn formula(mut self, phi: Formula) -> Self {
        self.formula = Some(phi);
        self
    }

    pub fn target(mut self, u: &str) -> Self {
        self.target = Some(u.to_string());
        self
    }

    pub fn var(mut self, y: &str) -> Self {
        self.var = Some(y.to_string());
        self
    }

    pub fn witness(mut self, path: PropPath) -> Self {
        self.witness = Some(path);
        self
    }

    pub fn chains(mut self, to_u: &[&str], to_v: &[&str]) -> Self {
        let own = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect();
        self.chains = Some((own(to_u), own(to_v)));
        self
    }

    /// Short human-readable form, e.g. `w0 <>p -> u via w0, ◇, u`.
    pub fn summary(&self) -> String {
        let mut parts = Vec::new();
        if let Some(l) = &self.label {
            parts.push(l.clone());
        }
        if let Some(f) = &self.formula {
            parts.push(crate::syntax::render_formula(f));
        }
        if let Some(t) = &self.target {
            parts.push(format!("-> {t}"));
        }
        if let Some(v) = &self.var {
            parts.push(format!("y={v}"));
        }
        if let Some((a, b)) = &self.chains {
            parts.push(format!("chains {} / {}", a.join(" "), b.join(" ")));
        }
        if let Some(p) = &self.witness {
            parts.push(format!("via {p}"));
        }
        parts.join(" ")
    }

    /// Every label and variable mentioned, for renaming and freshness.
    pub fn names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        out.extend(self.label.iter().cloned());
        out.extend(self.target.iter().cloned());
        out.extend(self.var.iter().cloned());
        if let Some(p) = &self.witness {
            out.extend(p.nodes.iter().cloned());
        }
        if let Some((a, b)) = &self.chains {
            out.extend(a.iter().cloned());
            out.extend(b.iter().cloned());
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CalculusKind {
    /// `G3QK(C)`
    G3,
    /// `QK(C)L`
    Refined,
    /// `NQK(C)`
    Nested,
    /// `G3QK(C) ∪ QK(C)L`, the calculus of intermediate refinement stages.
    Mixed,
}

impl CalculusKind {
    pub fn is_nested(self) -> bool {
        self == CalculusKind::Nested
    }
}

impl FromStr for CalculusKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "g3" | "labeled" => Ok(CalculusKind::G3),
            "refined" => Ok(CalculusKind::Refined),
            "nested" => Ok(CalculusKind::Nested),
            "mixed" => Ok(CalculusKind::Mixed),
            _ => Err(format!("unknown calculus `{s}` (g3, refined, nested, mixed)")),
        }
    }
}

impl fmt::Display for CalculusKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CalculusKind::G3 => "g3",
            CalculusKind::Refined => "refined",
            CalculusKind::Nested => "nested",
            CalculusKind::Mixed => "mixed",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CalculusSpec {
    pub kind: CalculusKind,
    pub frame: FrameSpec,
}

impl CalculusSpec {
    pub fn new(kind: CalculusKind, frame: FrameSpec) -> Self {
        CalculusSpec { kind, frame }
    }

    pub fn g3(frame: FrameSpec) -> Self {
        Self::new(CalculusKind::G3, frame)
    }

    pub fn refined(frame: FrameSpec) -> Self {
        Self::new(CalculusKind::Refined, frame)
    }

    pub fn nested(frame: FrameSpec) -> Self {
        Self::new(CalculusKind::Nested, frame)
    }

    pub fn mixed(frame: FrameSpec) -> Self {
        Self::new(CalculusKind::Mixed, frame)
    }

    pub fn rule_set(&self) -> BTreeSet<RuleId> {
        rule_set(self)
    }

    pub fn allows(&self, rule: RuleId) -> bool {
        self.rule_set().contains(&rule)
    }

    /// `S(G)`
    pub fn path_system(&self) -> ThueSystem {
        ThueSystem::of_paths(&self.frame.paths)
    }

    /// System and start character for the `s_ex` side conditions, or `None`
    /// when neither domain condition holds and the check is local.
    pub fn domain_system(&self) -> Option<(ThueSystem, Character)> {
        let sg = self.path_system();
        match (self.frame.inc, self.frame.dec) {
            (true, true) => Some((ThueSystem::s5(), Character::Dia)),
            (true, false) => Some((ThueSystem::s4().union(&sg), Character::BDia)),
            (false, true) => Some((ThueSystem::s4().union(&sg), Character::Dia)),
            (false, false) => None,
        }
    }
}

fn g3_rules(frame: &FrameSpec) -> BTreeSet<RuleId> {
    use RuleId::*;
    let mut set: BTreeSet<RuleId> =
        [Ax, BotL, NegL, NegR, OrL, OrR, DiaL, DiaR, ExistsL, ExistsR].into();
    if frame.serial {
        set.insert(D);
    }
    for &(n, k) in &frame.paths {
        set.insert(G(n, k));
    }
    if frame.inc {
        set.insert(Id);
    }
    if frame.dec {
        set.insert(Dd);
    }
    if frame.nonempty {
        set.insert(Nd);
    }
    set
}

fn refined_rules(frame: &FrameSpec) -> BTreeSet<RuleId> {
    use RuleId::*;
    let mut set: BTreeSet<RuleId> = g3_rules(frame)
        .into_iter()
        .filter(|r| !r.is_relational() && !matches!(r, DiaR | ExistsR))
        .collect();
    set.insert(PDia);
    set.insert(SEx1);
    if frame.nonempty {
        set.insert(SEx2);
    }
    set
}

/// The rules of a calculus over `C`. `dia_r` and `exists_r` are instances
/// of `p_dia` and `s_ex1`, so the refined and nested sets leave them out.
pub fn rule_set(spec: &CalculusSpec) -> BTreeSet<RuleId> {
    match spec.kind {
        CalculusKind::G3 => g3_rules(&spec.frame),
        CalculusKind::Refined | CalculusKind::Nested => refined_rules(&spec.frame),
        CalculusKind::Mixed => {
            let mut s = g3_rules(&spec.frame);
            s.extend(refined_rules(&spec.frame));
            s
        }
    }
}
