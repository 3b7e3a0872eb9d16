use std::collections::BTreeSet;

use proptest::prelude::*;
use qkprove::grammar::{bounded_closure, derives, Character, Production, ThueSystem, Word};
use qkprove::propagation::build_graph;
use qkprove::LabeledSequent;

fn systems() -> Vec<ThueSystem> {
    let g = |p: &[(usize, usize)]| ThueSystem::of_paths(p);
    vec![
        ThueSystem::empty(),
        ThueSystem::s4(),
        ThueSystem::s5(),
        g(&[(1, 1)]),
        g(&[(0, 2)]),
        g(&[(0, 0)]),
        g(&[(2, 1), (1, 0)]),
        ThueSystem::s4().union(&g(&[(0, 2)])),
        ThueSystem::s4().union(&g(&[(1, 1)])),
    ]
}

fn character() -> impl Strategy<Value = Character> {
    prop_oneof![Just(Character::Dia), Just(Character::BDia)]
}

fn word(max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(character(), 0..=max).prop_map(Word)
}

fn system() -> impl Strategy<Value = ThueSystem> {
    prop::sample::select(systems())
}

fn graph_sequent() -> impl Strategy<Value = LabeledSequent> {
    (1usize..=4)
        .prop_flat_map(|n| (Just(n), prop::collection::vec((0..n, 0..n), 0..7)))
        .prop_map(|(n, edges)| {
            let l = |i: usize| format!("v{i}");
            let mut s = LabeledSequent::new();
            for i in 0..n {
                s = s.with_right(&l(i), qkprove::Formula::atom("p"));
            }
            for (a, b) in edges {
                s = s.with_rel(&l(a), &l(b));
            }
            s
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    /// Every corpus system is closed under converse, hence so are its languages.
    #[test]
    fn languages_are_closed_under_converse(s in system(), a in character(), t in word(7)) {
        prop_assert_eq!(derives(&s, a, &t), derives(&s, a.converse(), &t.converse()));
    }

    #[test]
    fn union_only_adds_strings(s in system(), s2 in system(), a in character(), t in word(7)) {
        if derives(&s, a, &t) {
            prop_assert!(derives(&s.union(&s2), a, &t));
        }
    }

    #[test]
    fn bounded_closure_is_sound(s in system(), a in character()) {
        for t in bounded_closure(&s, a, 5) {
            prop_assert!(derives(&s, a, &t), "{} from {}", t, a);
        }
    }

    #[test]
    fn start_character_is_always_derived(s in system(), a in character()) {
        prop_assert!(derives(&s, a, &Word(vec![a])));
    }

    #[test]
    fn graphs_are_symmetric(seq in graph_sequent()) {
        prop_assert!(build_graph(&seq).is_symmetric());
    }

    #[test]
    fn reachability_is_converse_coherent(seq in graph_sequent(), s in system(), a in character()) {
        let g = build_graph(&seq);
        let r = g.reachability(&s);
        for w in g.vertices.keys() {
            for u in r.targets(a, w).unwrap() {
                prop_assert!(r.holds(a.converse(), &u, w), "{} -> {} under {}", w, u, a);
                let p = r.witness(a, w, &u).unwrap();
                let c = p.converse();
                prop_assert!(g.contains_path(&c));
                prop_assert_eq!(c.string(), &p.string().converse());
                prop_assert!(derives(&s, a.converse(), c.string()));
            }
        }
    }

    #[test]
    fn reachability_is_monotone_in_the_system(seq in graph_sequent(), s in system(), s2 in system(), a in character()) {
        let g = build_graph(&seq);
        let small = g.reachability(&s);
        let big = g.reachability(&s.union(&s2));
        for w in g.vertices.keys() {
            let lo: BTreeSet<String> = small.targets(a, w).unwrap();
            let hi: BTreeSet<String> = big.targets(a, w).unwrap();
            prop_assert!(lo.is_subset(&hi));
        }
    }
}

#[test]
fn production_text_round_trip() {
    for s in systems() {
        for p in &s.rules {
            let again: Production = p.to_string().parse().unwrap();
            assert_eq!(&again, p);
        }
    }
    let p: Production = "d -> eps".parse().unwrap();
    assert!(p.rhs.is_empty());
    assert!("x -> d".parse::<Production>().is_err());
}

#[test]
fn path_systems_have_the_expected_productions() {
    let euclid = ThueSystem::of_paths(&[(1, 1)]);
    let rules: BTreeSet<String> = euclid.rules.iter().map(|p| p.to_string()).collect();
    assert_eq!(rules, BTreeSet::from(["d -> bd".to_string(), "b -> bd".to_string()]));
    assert_eq!(ThueSystem::of_paths(&[(1, 1)]).union(&ThueSystem::s4()).rules.len(), 6);
}
