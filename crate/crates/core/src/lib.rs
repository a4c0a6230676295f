//! Second-order Henkin structures over equality atoms.
//!
//! Predicates are finitely supported relations on atoms, stored as the set of
//! orbit types they contain. On top of that sit a formula language, a Henkin
//! evaluator, the construction of choice predicates for 1-1 Ackermann
//! instances, and refuters for trichotomy and well-ordering.

pub mod atoms;
pub mod choicewit;
pub mod corpus;
pub mod eval;
pub mod indep;
pub mod lang;
pub mod naive;
pub mod orbitpred;

pub use atoms::{Atom, AtomError, FinitePermutation, Structure, SupportSet};
pub use choicewit::{build_sigma, BlockId, BlockKind, ChoiceError, ChoiceWitness, PartitionPlan};
pub use eval::{eval, stabilizer_of, EvalConfig, EvalError, EvalResult};
pub use indep::{check_injection, refute_tr1, refute_wo1, Refutation, RefutationKind, RefutationReport, Verdict};
pub use lang::{mk_choice_axiom, mk_trichotomy, mk_well_order, parse, parse_corpus, Assignment, Formula, LangError};
pub use orbitpred::{Label, OrbitError, OrbitPredicate, OrbitType};
