#![allow(dead_code)]

pub mod strategies;

use qkprove::calculi::ProofTree;
use qkprove::sequents::{parse_labeled, parse_nested};
use qkprove::syntax::parse_formula;
use qkprove::{Formula, FrameSpec, LabeledSequent, NestedSequent, RuleId, RuleParams};

pub type LProof = ProofTree<LabeledSequent>;

pub fn f(s: &str) -> Formula {
    parse_formula(s).unwrap()
}

pub fn ls(s: &str) -> LabeledSequent {
    parse_labeled(s).unwrap()
}

pub fn ns(s: &str) -> NestedSequent {
    parse_nested(s).unwrap()
}

pub fn node(rule: RuleId, seq: &str, params: RuleParams, premises: Vec<LProof>) -> LProof {
    ProofTree::node(rule, ls(seq), params, premises)
}

pub fn at(w: &str) -> RuleParams {
    RuleParams::at(w)
}

/// `{I_d, G(0,2)}`.
pub fn walkthrough_frame() -> FrameSpec {
    FrameSpec::empty().inc().path(0, 2)
}

const S4_AX: &str = "w R u, u R v, w R v, y in D(w), y in D(v), v : p(y) |- v : exists x. p(x), v : p(y)";

/// The labeled proof that the elimination walkthrough starts from.
pub fn walkthrough_initial() -> LProof {
    node(
        RuleId::G(0, 2),
        "w R u, u R v, y in D(w), v : p(y) |- v : exists x. p(x)",
        RuleParams::default().chains(&["w"], &["w", "u", "v"]),
        vec![node(
            RuleId::Id,
            "w R u, u R v, w R v, y in D(w), v : p(y) |- v : exists x. p(x)",
            at("w").target("v").var("y"),
            vec![node(
                RuleId::ExistsR,
                "w R u, u R v, w R v, y in D(w), y in D(v), v : p(y) |- v : exists x. p(x)",
                at("v").formula(f("exists x. p(x)")).var("y"),
                vec![node(RuleId::Ax, S4_AX, at("v").formula(f("p(y)")), vec![])],
            )],
        )],
    )
}

fn path(start: &str, steps: &[(char, &str)]) -> qkprove::propagation::PropPath {
    let steps: Vec<_> = steps
        .iter()
        .map(|(c, l)| (c.to_string().parse().unwrap(), l.to_string()))
        .collect();
    qkprove::propagation::PropPath::from_steps(start, &steps)
}

/// After `id` moves above the re-tagged `exists_r`.
pub fn walkthrough_second() -> LProof {
    node(
        RuleId::G(0, 2),
        "w R u, u R v, y in D(w), v : p(y) |- v : exists x. p(x)",
        RuleParams::default().chains(&["w"], &["w", "u", "v"]),
        vec![node(
            RuleId::SEx1,
            "w R u, u R v, w R v, y in D(w), v : p(y) |- v : exists x. p(x)",
            at("v").formula(f("exists x. p(x)")).var("y").target("w").witness(path("v", &[('b', "w")])),
            vec![node(
                RuleId::Id,
                "w R u, u R v, w R v, y in D(w), v : p(y) |- v : exists x. p(x), v : p(y)",
                at("w").target("v").var("y"),
                vec![node(RuleId::Ax, S4_AX, at("v").formula(f("p(y)")), vec![])],
            )],
        )],
    )
}

/// After `id` is absorbed and `g(0,2)` moves above `s_ex1`.
pub fn walkthrough_third() -> LProof {
    node(
        RuleId::SEx1,
        "w R u, u R v, y in D(w), v : p(y) |- v : exists x. p(x)",
        at("v")
            .formula(f("exists x. p(x)"))
            .var("y")
            .target("w")
            .witness(path("v", &[('b', "u"), ('b', "w")])),
        vec![node(
            RuleId::G(0, 2),
            "w R u, u R v, y in D(w), v : p(y) |- v : exists x. p(x), v : p(y)",
            RuleParams::default().chains(&["w"], &["w", "u", "v"]),
            vec![node(
                RuleId::Ax,
                "w R u, u R v, w R v, y in D(w), v : p(y) |- v : exists x. p(x), v : p(y)",
                at("v").formula(f("p(y)")),
                vec![],
            )],
        )],
    )
}

/// The final refined proof.
pub fn walkthrough_final() -> LProof {
    node(
        RuleId::SEx1,
        "w R u, u R v, y in D(w), v : p(y) |- v : exists x. p(x)",
        at("v")
            .formula(f("exists x. p(x)"))
            .var("y")
            .target("w")
            .witness(path("v", &[('b', "u"), ('b', "w")])),
        vec![node(
            RuleId::Ax,
            "w R u, u R v, y in D(w), v : p(y) |- v : exists x. p(x), v : p(y)",
            at("v").formula(f("p(y)")),
            vec![],
        )],
    )
}

/// Labeled proofs exercising every relational rule, with their frames.
pub fn g3_corpus() -> Vec<(&'static str, FrameSpec, LProof)> {
    let mut out = vec![("walkthrough", walkthrough_frame(), walkthrough_initial())];

    // nd directly below the exists_r it feeds
    out.push((
        "nd-fuse",
        FrameSpec::empty().nonempty(),
        node(
            RuleId::Nd,
            "|- w : exists x. (p(x) | ~p(x))",
            at("w").var("y"),
            vec![node(
                RuleId::ExistsR,
                "y in D(w) |- w : exists x. (p(x) | ~p(x))",
                at("w").formula(f("exists x. (p(x) | ~p(x))")).var("y"),
                vec![node(
                    RuleId::OrR,
                    "y in D(w) |- w : exists x. (p(x) | ~p(x)), w : p(y) | ~p(y)",
                    at("w").formula(f("p(y) | ~p(y)")),
                    vec![node(
                        RuleId::NegR,
                        "y in D(w) |- w : exists x. (p(x) | ~p(x)), w : p(y), w : ~p(y)",
                        at("w").formula(f("~p(y)")),
                        vec![node(
                            RuleId::Ax,
                            "y in D(w), w : p(y) |- w : exists x. (p(x) | ~p(x)), w : p(y)",
                            at("w").formula(f("p(y)")),
                            vec![],
                        )],
                    )],
                )],
            )],
        ),
    ));

    // nd below an unrelated rule first
    out.push((
        "nd-free",
        FrameSpec::empty().nonempty(),
        node(
            RuleId::Nd,
            "|- w : false | exists x. ~false",
            at("w").var("y"),
            vec![node(
                RuleId::OrR,
                "y in D(w) |- w : false | exists x. ~false",
                at("w").formula(f("false | exists x. ~false")),
                vec![node(
                    RuleId::ExistsR,
                    "y in D(w) |- w : false, w : exists x. ~false",
                    at("w").formula(f("exists x. ~false")).var("y"),
                    vec![node(
                        RuleId::NegR,
                        "y in D(w) |- w : false, w : exists x. ~false, w : ~false",
                        at("w").formula(f("~false")),
                        vec![node(
                            RuleId::BotL,
                            "y in D(w), w : false |- w : false, w : exists x. ~false",
                            at("w"),
                            vec![],
                        )],
                    )],
                )],
            )],
        ),
    ));

    // Barcan formula with decreasing domains
    let bf = "~(<>(exists x. p(x))) | (exists x. <>p(x))";
    out.push((
        "dd-barcan",
        FrameSpec::empty().dec(),
        node(
            RuleId::OrR,
            &format!("|- w : {bf}"),
            at("w").formula(f(bf)),
            vec![node(
                RuleId::NegR,
                "|- w : ~(<>(exists x. p(x))), w : exists x. <>p(x)",
                at("w").formula(f("~(<>(exists x. p(x)))")),
                vec![node(
                    RuleId::DiaL,
                    "w : <>(exists x. p(x)) |- w : exists x. <>p(x)",
                    at("w").formula(f("<>(exists x. p(x))")).target("u"),
                    vec![node(
                        RuleId::ExistsL,
                        "w R u, u : exists x. p(x) |- w : exists x. <>p(x)",
                        at("u").formula(f("exists x. p(x)")).var("y"),
                        vec![node(
                            RuleId::Dd,
                            "w R u, y in D(u), u : p(y) |- w : exists x. <>p(x)",
                            at("w").target("u").var("y"),
                            vec![node(
                                RuleId::ExistsR,
                                "w R u, y in D(u), y in D(w), u : p(y) |- w : exists x. <>p(x)",
                                at("w").formula(f("exists x. <>p(x)")).var("y"),
                                vec![node(
                                    RuleId::DiaR,
                                    "w R u, y in D(u), y in D(w), u : p(y) |- w : exists x. <>p(x), w : <>p(y)",
                                    at("w").formula(f("<>p(y)")).target("u"),
                                    vec![node(
                                        RuleId::Ax,
                                        "w R u, y in D(u), y in D(w), u : p(y) |- w : exists x. <>p(x), w : <>p(y), u : p(y)",
                                        at("u").formula(f("p(y)")),
                                        vec![],
                                    )],
                                )],
                            )],
                        )],
                    )],
                )],
            )],
        ),
    ));

    // converse Barcan formula with increasing domains
    let cbf = "~(exists x. <>p(x)) | <>(exists x. p(x))";
    out.push((
        "id-converse-barcan",
        FrameSpec::empty().inc(),
        node(
            RuleId::OrR,
            &format!("|- w : {cbf}"),
            at("w").formula(f(cbf)),
            vec![node(
                RuleId::NegR,
                "|- w : ~(exists x. <>p(x)), w : <>(exists x. p(x))",
                at("w").formula(f("~(exists x. <>p(x))")),
                vec![node(
                    RuleId::ExistsL,
                    "w : exists x. <>p(x) |- w : <>(exists x. p(x))",
                    at("w").formula(f("exists x. <>p(x)")).var("y"),
                    vec![node(
                        RuleId::DiaL,
                        "y in D(w), w : <>p(y) |- w : <>(exists x. p(x))",
                        at("w").formula(f("<>p(y)")).target("u"),
                        vec![node(
                            RuleId::Id,
                            "w R u, y in D(w), u : p(y) |- w : <>(exists x. p(x))",
                            at("w").target("u").var("y"),
                            vec![node(
                                RuleId::DiaR,
                                "w R u, y in D(w), y in D(u), u : p(y) |- w : <>(exists x. p(x))",
                                at("w").formula(f("<>(exists x. p(x))")).target("u"),
                                vec![node(
                                    RuleId::ExistsR,
                                    "w R u, y in D(w), y in D(u), u : p(y) |- w : <>(exists x. p(x)), u : exists x. p(x)",
                                    at("u").formula(f("exists x. p(x)")).var("y"),
                                    vec![node(
                                        RuleId::Ax,
                                        "w R u, y in D(w), y in D(u), u : p(y) |- w : <>(exists x. p(x)), u : exists x. p(x), u : p(y)",
                                        at("u").formula(f("p(y)")),
                                        vec![],
                                    )],
                                )],
                            )],
                        )],
                    )],
                )],
            )],
        ),
    ));

    // Euclidean frames: <>p -> []<>p
    let euc = "~(<>p) | ~(<>~(<>p))";
    out.push((
        "g11-euclid",
        FrameSpec::empty().path(1, 1),
        node(
            RuleId::OrR,
            &format!("|- w : {euc}"),
            at("w").formula(f(euc)),
            vec![node(
                RuleId::NegR,
                "|- w : ~(<>p), w : ~(<>~(<>p))",
                at("w").formula(f("~(<>p)")),
                vec![node(
                    RuleId::NegR,
                    "w : <>p |- w : ~(<>~(<>p))",
                    at("w").formula(f("~(<>~(<>p))")),
                    vec![node(
                        RuleId::DiaL,
                        "w : <>p, w : <>~(<>p) |-",
                        at("w").formula(f("<>p")).target("u"),
                        vec![node(
                            RuleId::DiaL,
                            "w R u, u : p, w : <>~(<>p) |-",
                            at("w").formula(f("<>~(<>p)")).target("v"),
                            vec![node(
                                RuleId::NegL,
                                "w R u, w R v, u : p, v : ~(<>p) |-",
                                at("v").formula(f("~(<>p)")),
                                vec![node(
                                    RuleId::G(1, 1),
                                    "w R u, w R v, u : p |- v : <>p",
                                    RuleParams::default().chains(&["w", "v"], &["w", "u"]),
                                    vec![node(
                                        RuleId::DiaR,
                                        "w R u, w R v, v R u, u : p |- v : <>p",
                                        at("v").formula(f("<>p")).target("u"),
                                        vec![node(
                                            RuleId::Ax,
                                            "w R u, w R v, v R u, u : p |- v : <>p, u : p",
                                            at("u").formula(f("p")),
                                            vec![],
                                        )],
                                    )],
                                )],
                            )],
                        )],
                    )],
                )],
            )],
        ),
    ));

    // id below a branching rule
    out.push((
        "id-branching",
        FrameSpec::empty().inc(),
        node(
            RuleId::Id,
            "w R u, y in D(w), u : p(y) | false |- u : exists x. p(x)",
            at("w").target("u").var("y"),
            vec![node(
                RuleId::OrL,
                "w R u, y in D(w), y in D(u), u : p(y) | false |- u : exists x. p(x)",
                at("u").formula(f("p(y) | false")),
                vec![
                    node(
                        RuleId::ExistsR,
                        "w R u, y in D(w), y in D(u), u : p(y) |- u : exists x. p(x)",
                        at("u").formula(f("exists x. p(x)")).var("y"),
                        vec![node(
                            RuleId::Ax,
                            "w R u, y in D(w), y in D(u), u : p(y) |- u : exists x. p(x), u : p(y)",
                            at("u").formula(f("p(y)")),
                            vec![],
                        )],
                    ),
                    node(
                        RuleId::BotL,
                        "w R u, y in D(w), y in D(u), u : false |- u : exists x. p(x)",
                        at("u"),
                        vec![],
                    ),
                ],
            )],
        ),
    ));

    // two dd steps, each extending the witness by one edge
    out.push((
        "dd-chain",
        FrameSpec::empty().dec(),
        node(
            RuleId::Dd,
            "w R u, u R v, y in D(v), v : p(y) |- w : exists x. <><>p(x)",
            at("u").target("v").var("y"),
            vec![node(
                RuleId::Dd,
                "w R u, u R v, y in D(v), y in D(u), v : p(y) |- w : exists x. <><>p(x)",
                at("w").target("u").var("y"),
                vec![node(
                    RuleId::ExistsR,
                    "w R u, u R v, y in D(v), y in D(u), y in D(w), v : p(y) |- w : exists x. <><>p(x)",
                    at("w").formula(f("exists x. <><>p(x)")).var("y"),
                    vec![node(
                        RuleId::DiaR,
                        "w R u, u R v, y in D(v), y in D(u), y in D(w), v : p(y) |- w : exists x. <><>p(x), w : <><>p(y)",
                        at("w").formula(f("<><>p(y)")).target("u"),
                        vec![node(
                            RuleId::DiaR,
                            "w R u, u R v, y in D(v), y in D(u), y in D(w), v : p(y) |- w : exists x. <><>p(x), w : <><>p(y), u : <>p(y)",
                            at("u").formula(f("<>p(y)")).target("v"),
                            vec![node(
                                RuleId::Ax,
                                "w R u, u R v, y in D(v), y in D(u), y in D(w), v : p(y) |- w : exists x. <><>p(x), w : <><>p(y), u : <>p(y), v : p(y)",
                                at("v").formula(f("p(y)")),
                                vec![],
                            )],
                        )],
                    )],
                )],
            )],
        ),
    ));

    // g(0,0) under seriality: reflexive and serial
    out.push((
        "g00-reflexive",
        FrameSpec::empty().serial().path(0, 0),
        node(
            RuleId::OrR,
            "|- w : ~p | <>p",
            at("w").formula(f("~p | <>p")),
            vec![node(
                RuleId::NegR,
                "|- w : ~p, w : <>p",
                at("w").formula(f("~p")),
                vec![node(
                    RuleId::G(0, 0),
                    "w : p |- w : <>p",
                    RuleParams::default().chains(&["w"], &["w"]),
                    vec![node(
                        RuleId::D,
                        "w R w, w : p |- w : <>p",
                        at("w").target("u"),
                        vec![node(
                            RuleId::DiaR,
                            "w R w, w R u, w : p |- w : <>p",
                            at("w").formula(f("<>p")).target("w"),
                            vec![node(
                                RuleId::Ax,
                                "w R w, w R u, w : p |- w : <>p, w : p",
                                at("w").formula(f("p")),
                                vec![],
                            )],
                        )],
                    )],
                )],
            )],
        ),
    ));
    out
}

/// The theorem suite: goal, frame, and the frame with the enabling
/// condition removed (`None` when there is none).
pub struct Theorem {
    pub name: &'static str,
    pub goal: Goal,
    pub frame: FrameSpec,
    pub weakened: Option<FrameSpec>,
}

pub enum Goal {
    Formula(Formula),
    /// A sequent goal together with the formula it stands for.
    Sequent(NestedSequent, Formula),
}

impl Goal {
    pub fn formula(&self) -> &Formula {
        match self {
            Goal::Formula(f) | Goal::Sequent(_, f) => f,
        }
    }

    pub fn prover_goal(&self) -> qkprove::prover::Goal {
        match self {
            Goal::Formula(f) => qkprove::prover::Goal::Formula(f.clone()),
            Goal::Sequent(s, _) => qkprove::prover::Goal::Sequent(s.clone()),
        }
    }
}

pub const BARCAN: &str = "<>(exists x. p(x)) -> exists x. <>p(x)";
pub const CONVERSE_BARCAN: &str = "(exists x. <>p(x)) -> <>(exists x. p(x))";

pub fn theorem_suite() -> Vec<Theorem> {
    let e = FrameSpec::empty;
    vec![
        Theorem { name: "not-possibly-false", goal: Goal::Formula(f("~<>false")), frame: e(), weakened: None },
        Theorem { name: "seriality", goal: Goal::Formula(f("<>~false")), frame: e().serial(), weakened: Some(e()) },
        Theorem {
            name: "transitivity",
            goal: Goal::Sequent(ns("<><>p |- <>p"), f("<><>p -> <>p")),
            frame: e().path(0, 2),
            weakened: Some(e()),
        },
        Theorem { name: "reflexivity", goal: Goal::Formula(f("p -> <>p")), frame: e().path(0, 0), weakened: Some(e()) },
        Theorem { name: "barcan", goal: Goal::Formula(f(BARCAN)), frame: e().dec(), weakened: Some(e()) },
        Theorem { name: "converse-barcan", goal: Goal::Formula(f(CONVERSE_BARCAN)), frame: e().inc(), weakened: Some(e()) },
        Theorem {
            name: "both-barcan",
            goal: Goal::Formula(f(&format!("({BARCAN}) & ({CONVERSE_BARCAN})"))),
            frame: e().constant(),
            weakened: Some(e()),
        },
        Theorem {
            name: "nonempty",
            goal: Goal::Formula(f("exists x. (p(x) | ~p(x))")),
            frame: e().nonempty(),
            weakened: Some(e()),
        },
    ]
}
