//! proptest generators shared by the property suites.

use proptest::prelude::*;
use qkprove::semantics::KripkeModel;
use qkprove::{Formula, LabeledSequent, NestedSequent};

pub const VARS: [&str; 3] = ["x", "y", "z"];
/// Predicate signature used by every generator.
pub const SIG: [(&str, usize); 3] = [("p", 1), ("q", 0), ("r", 2)];

fn var() -> impl Strategy<Value = String> {
    prop::sample::select(&VARS[..]).prop_map(String::from)
}

fn atom() -> impl Strategy<Value = Formula> {
    prop_oneof![
        1 => Just(Formula::Bottom),
        6 => (0..SIG.len(), prop::collection::vec(var(), 2)).prop_map(|(i, args)| {
            let (name, arity) = SIG[i];
            Formula::Pred { name: name.into(), args: args[..arity].to_vec() }
        }),
    ]
}

/// Formulas over [`SIG`] with free and bound variables from [`VARS`].
pub fn formula() -> impl Strategy<Value = Formula> {
    atom().prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::neg),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            inner.clone().prop_map(Formula::dia),
            (var(), inner).prop_map(|(x, b)| Formula::exists(&x, b)),
        ]
    })
}

/// Closed formulas: free variables bound by outer existentials.
pub fn closed_formula() -> impl Strategy<Value = Formula> {
    formula().prop_map(|phi| {
        phi.free_vars().into_iter().fold(phi, |acc, x| Formula::exists(&x, acc))
    })
}

fn component() -> impl Strategy<Value = (Vec<Formula>, Vec<String>, Vec<Formula>)> {
    (
        prop::collection::vec(formula(), 0..3),
        prop::sample::subsequence(&VARS[..], 0..=3).prop_map(|v| v.into_iter().map(String::from).collect()),
        prop::collection::vec(formula(), 0..3),
    )
}

/// Nested sequents of depth at most 3 and width at most 3, labelled
/// `n0, n1, …` in preorder.
pub fn nested() -> impl Strategy<Value = NestedSequent> {
    let leaf = component().prop_map(|(g, t, d)| build(g, t, d, vec![]));
    leaf.prop_recursive(2, 40, 3, |inner| {
        (component(), prop::collection::vec(inner, 0..=3)).prop_map(|((g, t, d), kids)| build(g, t, d, kids))
    })
    .prop_map(|mut s| {
        let mut next = 0;
        relabel(&mut s, &mut next);
        s
    })
}

fn build(gamma: Vec<Formula>, theta: Vec<String>, delta: Vec<Formula>, children: Vec<NestedSequent>) -> NestedSequent {
    let mut s = NestedSequent::empty("_");
    s.gamma = gamma;
    s.theta = theta;
    s.delta = delta;
    s.children = children;
    s
}

fn relabel(s: &mut NestedSequent, next: &mut usize) {
    s.label = format!("n{next}");
    *next += 1;
    for c in &mut s.children {
        relabel(c, next);
    }
}

/// Labeled tree sequents on up to six labels, atoms in arbitrary order.
pub fn labeled_tree() -> impl Strategy<Value = LabeledSequent> {
    (1usize..=6)
        .prop_flat_map(|n| {
            let parents: Vec<_> = (1..n).map(|i| 0..i).collect();
            (
                Just(n),
                parents,
                prop::collection::vec((0..n, var()), 0..5),
                prop::collection::vec((0..n, formula()), 0..4),
                prop::collection::vec((0..n, formula()), 1..4),
            )
        })
        .prop_flat_map(|(_, parents, dom, left, right)| {
            let l = |i: usize| format!("t{i}");
            let rel: Vec<_> = parents.iter().enumerate().map(|(i, &p)| (l(p), l(i + 1))).collect();
            let mut dom: Vec<_> = dom.into_iter().map(|(i, x)| (x, l(i))).collect();
            dom.sort();
            dom.dedup();
            let left: Vec<_> = left.into_iter().map(|(i, f)| (l(i), f)).collect();
            let right: Vec<_> = right.into_iter().map(|(i, f)| (l(i), f)).collect();
            (
                Just(rel).prop_shuffle(),
                Just(dom).prop_shuffle(),
                Just(left).prop_shuffle(),
                Just(right).prop_shuffle(),
            )
        })
        .prop_map(|(rel, dom, left, right)| LabeledSequent { rel, dom, left, right })
}

/// Models with up to three worlds and three individuals over [`SIG`].
pub fn model() -> impl Strategy<Value = KripkeModel> {
    (1usize..=3, 1usize..=3)
        .prop_flat_map(|(n, u)| {
            (
                Just(n),
                Just(u),
                prop::collection::vec(any::<bool>(), n * n),
                prop::collection::vec(prop::collection::vec(any::<bool>(), u), n),
                prop::collection::vec(any::<u64>(), n),
            )
        })
        .prop_map(|(n, u, edges, doms, facts)| {
            let mut m = KripkeModel::new(n);
            for a in 0..n {
                for b in 0..n {
                    if edges[a * n + b] {
                        m = m.with_edge(a, b);
                    }
                }
                let d: Vec<usize> = (0..u).filter(|&i| doms[a][i]).collect();
                m = m.with_domain(a, &d);
                let mut bit = 0;
                for (name, arity) in SIG {
                    for t in 0..u.pow(arity as u32) {
                        if facts[a] >> bit & 1 == 1 {
                            let args: Vec<usize> = (0..arity).map(|j| t / u.pow(j as u32) % u).collect();
                            m = m.with_fact(name, a, &args);
                        }
                        bit += 1;
                    }
                }
            }
            m
        })
}
