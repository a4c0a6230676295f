mod common;

use henkin_core::choicewit::{p_adequate_partition, swap_formula, ChoiceWitness};
use henkin_core::corpus::{h_parameters, h_suite};
use henkin_core::*;
use rand::Rng;

const STRUCTURES: [Structure; 3] = [Structure::Sigma0, Structure::KSigma0(2), Structure::KSigma0(3)];

fn witnesses() -> Vec<(Structure, Formula, ChoiceWitness)> {
    let mut out = Vec::new();
    for st in STRUCTURES {
        let cfg = EvalConfig::new(st);
        let params = h_parameters(&st);
        for h in h_suite() {
            let w = build_sigma(&h, &params, &cfg).unwrap_or_else(|e| panic!("{st}, {h}: {e}"));
            out.push((st, h, w));
        }
    }
    out
}

#[test]
fn blocks_cover_and_exclude() {
    let mut rng = common::rng(41);
    for st in STRUCTURES.into_iter().chain([Structure::FiniteStd(3)]) {
        for _ in 0..20 {
            let p = common::random_support(&mut rng, &st, 4, 8);
            let plan = p_adequate_partition(&p, &st).unwrap();
            let preds: Vec<_> = plan.blocks.iter().map(|b| plan.block_predicate(b.id).unwrap()).collect();
            // representatives of every orbit of atoms: the support plus a fresh atom per sort
            let mut reps: Vec<Atom> = p.iter().copied().collect();
            reps.extend((1..=st.sorts()).filter_map(|s| st.fresh_atom(s, &p).ok()));
            for a in reps {
                let inside = preds.iter().filter(|b| b.contains(&[a])).count();
                assert_eq!(inside, 1, "{a} in {inside} blocks for P = {p}");
            }
            for b in &plan.blocks {
                assert!(plan.block_contains(b.id, b.rep));
                assert_eq!(plan.choice_set().iter().filter(|a| plan.block_contains(b.id, **a)).count(), 1);
            }
        }
    }
}

#[test]
fn choice_set_is_fixed_by_the_stabilizer() {
    let mut rng = common::rng(42);
    for st in STRUCTURES {
        let p = common::random_support(&mut rng, &st, 4, 8);
        let plan = p_adequate_partition(&p, &st).unwrap();
        let alpha = plan.choice_set();
        let fixed = p.union(&plan.mu());
        for _ in 0..100 {
            let pi = common::random_transposition(&mut rng, &st, &fixed, 12).unwrap();
            assert_eq!(pi.image(&alpha), alpha);
        }
    }
}

#[test]
fn swap_matches_transposition() {
    let mut rng = common::rng(43);
    let st = Structure::Sigma0;
    let cfg = EvalConfig::new(st);
    let swap = swap_formula(BlockKind::Cofinite);
    for _ in 0..300 {
        let [mu, xi, eta0, eta] = [0; 4].map(|_| Atom::new(1, rng.gen_range(0..5)));
        let f = Assignment::new().with_ind("x0", mu).with_ind("y0", eta0).with_ind("x", xi).with_ind("y", eta);
        let image = FinitePermutation::transposition(mu, xi).unwrap().apply(eta0);
        assert_eq!(eval(&swap, &f, &cfg).unwrap().value, eta == image);
    }
}

#[test]
fn end_to_end_and_certificates() {
    for (st, h, w) in witnesses() {
        assert!(w.verification.value, "{st}, {h}");
        assert!(w.verify_certificate(&EvalConfig::new(st)).unwrap(), "{st}, {h}: certificate differs from sigma");
        assert!(w.sigma.is_supported_by(&w.defining_support));
        assert!(w.plan.support.is_subset(&w.defining_support));
        assert!(w.plan.mu().is_subset(&w.defining_support));
    }
}

#[test]
fn sections_are_transported_witnesses() {
    let mut rng = common::rng(44);
    for (st, h, w) in witnesses() {
        for _ in 0..20 {
            let xi = common::random_atom(&mut rng, &st, 10);
            let section = w.sigma.section(&[xi]).unwrap();
            let expected = w.expected_section(xi).unwrap();
            assert!(section.equal(&expected).unwrap(), "{st}, {h}: section at {xi}");
            // the section is itself a witness for D at x ↦ ξ
            let f = h_parameters(&st).with_ind("x", xi).with_pred("D", section);
            assert!(eval(&h, &f, &EvalConfig::new(st)).unwrap().value, "{st}, {h}: section at {xi} is no witness");
        }
    }
}

#[test]
fn finite_structures_too() {
    for k in 2..=3 {
        let st = Structure::FiniteStd(k);
        let cfg = EvalConfig::new(st);
        let params = h_parameters(&st);
        for h in h_suite() {
            let ante = eval(&Formula::forall("x", Formula::exists_pred("D", 1, h.clone())), &params, &cfg).unwrap();
            match build_sigma(&h, &params, &cfg) {
                Ok(w) => assert!(w.verification.value && !w.verification.budget_limited),
                Err(ChoiceError::AntecedentFails { .. }) => assert!(!ante.value),
                Err(e) => panic!("{st}, {h}: {e}"),
            }
        }
    }
}
