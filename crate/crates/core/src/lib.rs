//! Proof toolkit for first-order modal logics over frame and domain
//! conditions: seriality, general path conditions `G(n,k)`, increasing,
//! decreasing, constant and nonempty domains.
//!
//! The crate is organised bottom-up:
//!
//! * [`syntax`]: formulas, substitution, frame specifications, text syntax.
//! * [`grammar`]: semi-Thue systems over `{◇,◆}` and their membership problem.
//! * [`sequents`]: labeled and nested sequents and the translations between them.
//! * [`propagation`]: propagation graphs and grammar-constrained reachability.
//! * [`calculi`]: rule sets, rule application and proof checking for the
//!   labeled calculus, the refined labeled calculus and the nested calculus.
//! * [`refine`]: elimination of relational rules from labeled proofs and
//!   translation of the result into nested proofs.
//! * [`prover`]: bounded backward proof search in the nested calculus.
//! * [`semantics`]: finite varying-domain Kripke models used as an oracle.

pub mod calculi;
pub mod grammar;
pub mod propagation;
pub mod prover;
pub mod refine;
pub mod semantics;
pub mod sequents;
pub mod syntax;

pub use calculi::{CalculusKind, CalculusSpec, ProofTree, RuleId, RuleParams};
pub use grammar::{Character, Production, ThueSystem, Word};
pub use sequents::{LabeledSequent, NestedSequent};
pub use syntax::{Formula, FrameSpec};
