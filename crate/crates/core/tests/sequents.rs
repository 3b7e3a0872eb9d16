mod common;

use common::strategies::{labeled_tree, nested};
use common::*;
use proptest::prelude::*;
use qkprove::sequents::{is_labeled_tree, parse_labeled, parse_nested};

fn nonempty_root(s: &qkprove::NestedSequent) -> bool {
    !(s.children.is_empty() && s.gamma.is_empty() && s.theta.is_empty() && s.delta.is_empty())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn nested_round_trip(phi in nested()) {
        prop_assume!(nonempty_root(&phi));
        let lab = phi.to_labeled().unwrap();
        prop_assert_eq!(is_labeled_tree(&lab), (true, Some(phi.label.clone())));
        prop_assert_eq!(lab.to_nested().unwrap(), phi);
    }

    #[test]
    fn labeled_tree_round_trip(lambda in labeled_tree()) {
        let (tree, root) = is_labeled_tree(&lambda);
        prop_assert!(tree);
        prop_assert_eq!(root.as_deref(), Some("t0"));
        let back = lambda.to_nested().unwrap().to_labeled().unwrap();
        prop_assert!(back.equiv(&lambda), "{} vs {}", back, lambda);
    }

    #[test]
    fn nested_text_round_trip(phi in nested()) {
        // the parser may rename reused binders, so compare up to α
        let text = phi.to_string();
        prop_assert!(parse_nested(&text).unwrap().equiv(&phi), "{}", text);
    }

    #[test]
    fn labeled_text_round_trip(lambda in labeled_tree()) {
        let text = lambda.to_string();
        prop_assert!(parse_labeled(&text).unwrap().equiv(&lambda), "{}", text);
    }

    #[test]
    fn equiv_ignores_order(lambda in labeled_tree(), seed in any::<u64>()) {
        let mut shuffled = lambda.clone();
        let k = seed as usize;
        if !shuffled.right.is_empty() {
            let n = shuffled.right.len();
            shuffled.right.rotate_left(k % n);
        }
        shuffled.left.reverse();
        shuffled.dom.reverse();
        prop_assert!(shuffled.equiv(&lambda));
        prop_assert_eq!(shuffled.normalized(), lambda.normalized());
    }

    #[test]
    fn nested_labels_are_unique(phi in nested()) {
        let labels = phi.labels();
        let set: std::collections::BTreeSet<_> = labels.iter().collect();
        prop_assert_eq!(set.len(), labels.len());
        prop_assert!(phi.check_labels().is_ok());
        prop_assert!(phi.depth() <= 3);
    }
}

#[test]
fn non_trees_are_rejected() {
    for text in ["w R u, v R u |- w : p", "w R u, u R w |- w : p", "w R w |- w : p", "w R u, v : p |- w : q"] {
        let s = ls(text);
        assert!(!is_labeled_tree(&s).0, "{text}");
        assert!(s.to_nested().is_err(), "{text}");
    }
}
