#![allow(dead_code)]

use henkin_core::orbitpred::orbit_types;
use henkin_core::{Assignment, Atom, FinitePermutation, OrbitPredicate, Structure, SupportSet};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn random_atom(rng: &mut ChaCha8Rng, st: &Structure, max_index: u32) -> Atom {
    match st.finite_domain() {
        Some(dom) => *dom.choose(rng).unwrap(),
        None => Atom::new(rng.gen_range(1..=st.sorts()), rng.gen_range(0..max_index)),
    }
}

pub fn random_support(rng: &mut ChaCha8Rng, st: &Structure, max_size: usize, max_index: u32) -> SupportSet {
    let n = rng.gen_range(0..=max_size);
    (0..n).map(|_| random_atom(rng, st, max_index)).collect()
}

/// A uniformly random subset of the orbit types over a random small support.
pub fn random_predicate(rng: &mut ChaCha8Rng, st: &Structure, arity: usize, max_support: usize) -> OrbitPredicate {
    let support = random_support(rng, st, max_support, 7);
    let types = orbit_types(st, arity, &support);
    let chosen: Vec<_> = types.into_iter().filter(|_| rng.gen_bool(0.5)).collect();
    OrbitPredicate::from_orbits(*st, arity, support, chosen).unwrap()
}

pub fn random_tuple(rng: &mut ChaCha8Rng, st: &Structure, arity: usize, max_index: u32) -> Vec<Atom> {
    (0..arity).map(|_| random_atom(rng, st, max_index)).collect()
}

/// A transposition of two same-sort atoms outside `fixed`, when one exists.
pub fn random_transposition(
    rng: &mut ChaCha8Rng,
    st: &Structure,
    fixed: &SupportSet,
    max_index: u32,
) -> Option<FinitePermutation> {
    for _ in 0..100 {
        let a = random_atom(rng, st, max_index);
        let b = match st.finite_domain() {
            Some(_) => random_atom(rng, st, max_index),
            None => Atom::new(a.sort, rng.gen_range(0..max_index)),
        };
        if a != b && !fixed.contains(&a) && !fixed.contains(&b) {
            return Some(FinitePermutation::transposition(a, b).unwrap());
        }
    }
    None
}

/// Random values for the free variables `x y z c`, `A D B` and `R`.
pub fn random_assignment(rng: &mut ChaCha8Rng, st: &Structure) -> Assignment {
    let mut f = Assignment::new();
    for x in ["x", "y", "z", "c"] {
        f.bind_ind(x, random_atom(rng, st, 7));
    }
    for p in ["A", "D", "B"] {
        f.bind_pred(p, random_predicate(rng, st, 1, 2));
    }
    f.bind_pred("R", random_predicate(rng, st, 2, 2));
    f
}

pub mod strategies {
    use henkin_core::Formula;
    use proptest::prelude::*;

    fn var() -> impl Strategy<Value = String> {
        prop::sample::select(vec!["x", "y", "z", "c"]).prop_map(String::from)
    }

    fn bound() -> impl Strategy<Value = String> {
        prop::sample::select(vec!["x", "y", "z"]).prop_map(String::from)
    }

    /// Formulas over `x y z c`, unary `A D B` and binary `R`; with
    /// `second_order`, `B` may also be quantified.
    pub fn formula(second_order: bool) -> BoxedStrategy<Formula> {
        let leaf = prop_oneof![
            (var(), var()).prop_map(|(x, y)| Formula::Eq(x, y)),
            (prop::sample::select(vec!["A", "D", "B"]), var()).prop_map(|(p, x)| Formula::App(p.into(), vec![x])),
            (var(), var()).prop_map(|(x, y)| Formula::App("R".into(), vec![x, y])),
        ];
        leaf.prop_recursive(4, 24, 2, move |inner| {
            let first_order = prop_oneof![
                inner.clone().prop_map(Formula::not),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.and(b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.or(b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.implies(b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.iff(b)),
                (bound(), inner.clone()).prop_map(|(x, b)| Formula::Forall(x, Box::new(b))),
                (bound(), inner.clone()).prop_map(|(x, b)| Formula::Exists(x, Box::new(b))),
            ];
            if second_order {
                prop_oneof![
                    4 => first_order,
                    1 => inner.clone().prop_map(|b| Formula::exists_pred("B", 1, b)),
                    1 => inner.prop_map(|b| Formula::forall_pred("B", 1, b)),
                ]
                .boxed()
            } else {
                first_order.boxed()
            }
        })
        .boxed()
    }

    pub fn second_order_quantifiers(f: &Formula) -> usize {
        match f {
            Formula::Eq(..) | Formula::App(..) => 0,
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => second_order_quantifiers(a),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                second_order_quantifiers(a) + second_order_quantifiers(b)
            }
            Formula::ForallPred(_, _, a) | Formula::ExistsPred(_, _, a) => 1 + second_order_quantifiers(a),
        }
    }
}
