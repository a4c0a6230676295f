//! Bundled formula corpora.

use crate::atoms::{Atom, Structure};
use crate::lang::{mk_choice_axiom, mk_trichotomy, mk_well_order, parse_corpus, Assignment, ChoiceNames, Formula};
use crate::orbitpred::OrbitPredicate;

pub const SENTENCES: &str = include_str!("../corpus/sentences.l2");
pub const H_SUITE: &str = include_str!("../corpus/h_suite.l2");

/// Choice instances `H(x, D)`; some have the free parameters `A` and `c`.
pub fn h_suite() -> Vec<Formula> {
    parse_corpus(H_SUITE).expect("bundled H-suite parses")
}

/// Values for the parameters of [`h_suite`]: `A` a two-atom set and `c` an
/// atom, both of sort 1.
pub fn h_parameters(structure: &Structure) -> Assignment {
    let (a1, a2, c) = match structure {
        Structure::FiniteStd(_) => (Atom::new(1, 1), Atom::new(1, 1), Atom::new(1, 2)),
        _ => (Atom::new(1, 3), Atom::new(1, 5), Atom::new(1, 2)),
    };
    let a = OrbitPredicate::finite_set(*structure, [a1, a2]).expect("parameter atoms lie in the structure");
    Assignment::new().with_pred("A", a).with_ind("c", c)
}

/// Closed sentences: the bundled list, the choice axioms of the closed
/// members of the H-suite, trichotomy for unary predicates, and well-ordering.
pub fn sentences() -> Vec<Formula> {
    let mut out = parse_corpus(SENTENCES).expect("bundled sentences parse");
    let names = ChoiceNames::default();
    for h in h_suite() {
        let ax = mk_choice_axiom(&h, &names).expect("H-suite members are choice instances");
        if ax.free_vars().expect("well formed").is_empty() {
            out.push(ax);
        }
    }
    out.push(mk_trichotomy(1).expect("n = 1"));
    out.push(mk_well_order());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_sizes() {
        assert!(sentences().len() >= 30);
        assert!(sentences().iter().all(|f| f.free_vars().unwrap().is_empty()));
        assert!(h_suite().len() >= 10);
        let params = h_suite().iter().filter(|h| !h.free_vars().unwrap().preds.keys().all(|p| p == "D")).count();
        assert!(params >= 2);
    }
}
