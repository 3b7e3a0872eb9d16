mod common;

use common::strategies::{closed_formula, formula, model, VARS};
use common::*;
use proptest::prelude::*;
use qkprove::semantics::{check_frame, eval, find_countermodel, find_sequent_countermodel, Assignment, Bounds};
use qkprove::FrameSpec;

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

fn frames() -> Vec<FrameSpec> {
    let e = FrameSpec::empty;
    vec![e(), e().serial(), e().path(0, 0), e().path(0, 2), e().path(1, 1), e().inc(), e().dec(), e().constant().nonempty()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn truth_is_invariant_under_isomorphism(
        (m, perm, iperm) in model().prop_flat_map(|m| {
            let n = m.worlds;
            (Just(m), permutation(n), permutation(3))
        }),
        phi in formula(),
        asg in prop::collection::vec(0usize..3, 3),
    ) {
        let m2 = m.permuted(&perm, &iperm);
        let g: Assignment = VARS.iter().map(|x| x.to_string()).zip(asg.iter().copied()).collect();
        let g2: Assignment = g.iter().map(|(x, &d)| (x.clone(), iperm[d])).collect();
        for (w, &w2) in perm.iter().enumerate() {
            prop_assert_eq!(eval(&m, w, &g, &phi).unwrap(), eval(&m2, w2, &g2, &phi).unwrap());
        }
        for frame in frames() {
            prop_assert_eq!(check_frame(&m, &frame), check_frame(&m2, &frame));
        }
    }

    #[test]
    fn derived_connectives(m in model(), phi in formula(), psi in formula()) {
        let g: Assignment = VARS.iter().map(|x| (x.to_string(), 0)).collect();
        for w in 0..m.worlds {
            let v = |f: &qkprove::Formula| eval(&m, w, &g, f).unwrap();
            let and = qkprove::Formula::and(phi.clone(), psi.clone());
            prop_assert_eq!(v(&and), v(&phi) && v(&psi));
            let imp = qkprove::Formula::implies(phi.clone(), psi.clone());
            prop_assert_eq!(v(&imp), !v(&phi) || v(&psi));
            let boxed = qkprove::Formula::boxed(phi.clone());
            let all = m.successors(w).all(|u| eval(&m, u, &g, &phi).unwrap());
            prop_assert_eq!(v(&boxed), all);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Whatever the search returns really is a countermodel.
    #[test]
    fn countermodels_are_genuine(phi in closed_formula(), fi in 0usize..8) {
        let frame = frames()[fi].clone();
        let bounds = Bounds { max_worlds: 2, max_individuals: 2 };
        if let Some(cm) = find_countermodel(&phi, &frame, &bounds) {
            prop_assert!(check_frame(&cm.model, &frame));
            prop_assert!(!eval(&cm.model, cm.world, &Assignment::new(), &phi).unwrap());
        }
    }
}

#[test]
fn countermodels_respect_the_frame() {
    let b = Bounds::default();
    assert!(find_countermodel(&f("[]p -> p"), &FrameSpec::empty(), &b).is_some());
    assert!(find_countermodel(&f("[]p -> p"), &FrameSpec::empty().path(0, 0), &b).is_none());
    assert!(find_countermodel(&f("[]p -> [][]p"), &FrameSpec::empty().path(0, 2), &b).is_none());
    assert!(find_countermodel(&f("<>p -> []<>p"), &FrameSpec::empty().path(1, 1), &b).is_none());
    assert!(find_countermodel(&f("<>p -> []<>p"), &FrameSpec::empty(), &b).is_some());
    assert!(find_countermodel(&f("[]p -> <>p"), &FrameSpec::empty().serial(), &b).is_none());
}

#[test]
fn sequent_countermodel_interprets_every_label() {
    let seq = ls("w R u, y in D(u), w : []p(y) |- u : q");
    let cm = find_sequent_countermodel(&seq, &FrameSpec::empty(), &Bounds::default()).unwrap();
    assert!(cm.interpretation.labels.contains_key("w") && cm.interpretation.labels.contains_key("u"));
    assert!(cm.interpretation.vars.contains_key("y"));
    let valid = ls("w R u, y in D(u), w : []p(y) |- u : p(y)");
    assert!(find_sequent_countermodel(&valid, &FrameSpec::empty(), &Bounds::default()).is_none());
}

#[test]
fn model_json_round_trip() {
    let cm = find_countermodel(&f(CONVERSE_BARCAN), &FrameSpec::empty(), &Bounds::default()).unwrap();
    let text = serde_json::to_string(&cm).unwrap();
    let back: qkprove::semantics::Countermodel = serde_json::from_str(&text).unwrap();
    assert_eq!(back, cm);
}
