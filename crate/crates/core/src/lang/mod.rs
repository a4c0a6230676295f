//! The second-order language: formulas, assignments, and the named schemata
//! (choice axioms, trichotomy, well-ordering).
//!
//! Individual variables start with a lowercase letter, predicate variables
//! with an uppercase one. Predicate binders carry an explicit arity
//! (`Exists D:1.`).

mod parse;
mod print;
mod schemata;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

pub use parse::{parse, parse_corpus};
pub use schemata::{mk_choice_axiom, mk_trichotomy, mk_well_order, ChoiceNames};

use crate::atoms::{Atom, FinitePermutation, SupportSet};
use crate::orbitpred::OrbitPredicate;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LangError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("predicate variable {name} used with arity {got}, declared {expected}")]
    Arity { name: String, expected: usize, got: usize },
    #[error("variable {0} is bound in the formula")]
    BoundDesignated(String),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Eq(String, String),
    App(String, Vec<String>),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
    ForallPred(String, usize, Box<Formula>),
    ExistsPred(String, usize, Box<Formula>),
}

/// Free variables, predicate variables with their arities.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FreeVars {
    pub inds: BTreeSet<String>,
    pub preds: BTreeMap<String, usize>,
}

impl FreeVars {
    pub fn is_empty(&self) -> bool {
        self.inds.is_empty() && self.preds.is_empty()
    }
}

impl Formula {
    pub fn eq(x: &str, y: &str) -> Formula {
        Formula::Eq(x.into(), y.into())
    }

    pub fn app(p: &str, args: &[&str]) -> Formula {
        Formula::App(p.into(), args.iter().map(|s| s.to_string()).collect())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Formula {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, other: Formula) -> Formula {
        Formula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Formula) -> Formula {
        Formula::Or(Box::new(self), Box::new(other))
    }

    pub fn implies(self, other: Formula) -> Formula {
        Formula::Implies(Box::new(self), Box::new(other))
    }

    pub fn iff(self, other: Formula) -> Formula {
        Formula::Iff(Box::new(self), Box::new(other))
    }

    pub fn forall(x: &str, body: Formula) -> Formula {
        Formula::Forall(x.into(), Box::new(body))
    }

    pub fn exists(x: &str, body: Formula) -> Formula {
        Formula::Exists(x.into(), Box::new(body))
    }

    pub fn forall_pred(p: &str, arity: usize, body: Formula) -> Formula {
        Formula::ForallPred(p.into(), arity, Box::new(body))
    }

    pub fn exists_pred(p: &str, arity: usize, body: Formula) -> Formula {
        Formula::ExistsPred(p.into(), arity, Box::new(body))
    }

    /// Left-nested conjunction; `None` for an empty list.
    pub fn conj<I: IntoIterator<Item = Formula>>(parts: I) -> Option<Formula> {
        parts.into_iter().reduce(Formula::and)
    }

    pub fn disj<I: IntoIterator<Item = Formula>>(parts: I) -> Option<Formula> {
        parts.into_iter().reduce(Formula::or)
    }

    pub fn free_vars(&self) -> Result<FreeVars, LangError> {
        let mut out = FreeVars::default();
        let mut inds = Vec::new();
        let mut preds = Vec::new();
        self.collect_free(&mut inds, &mut preds, &mut out)?;
        Ok(out)
    }

    fn collect_free(
        &self,
        bound_inds: &mut Vec<String>,
        bound_preds: &mut Vec<(String, usize)>,
        out: &mut FreeVars,
    ) -> Result<(), LangError> {
        match self {
            Formula::Eq(x, y) => {
                for v in [x, y] {
                    if !bound_inds.contains(v) {
                        out.inds.insert(v.clone());
                    }
                }
            }
            Formula::App(p, args) => {
                for v in args {
                    if !bound_inds.contains(v) {
                        out.inds.insert(v.clone());
                    }
                }
                match bound_preds.iter().rev().find(|(n, _)| n == p) {
                    Some((_, ar)) if *ar != args.len() => {
                        return Err(LangError::Arity { name: p.clone(), expected: *ar, got: args.len() })
                    }
                    Some(_) => {}
                    None => match out.preds.get(p) {
                        Some(ar) if *ar != args.len() => {
                            return Err(LangError::Arity { name: p.clone(), expected: *ar, got: args.len() })
                        }
                        Some(_) => {}
                        None => {
                            out.preds.insert(p.clone(), args.len());
                        }
                    },
                }
            }
            Formula::Not(a) => a.collect_free(bound_inds, bound_preds, out)?,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_free(bound_inds, bound_preds, out)?;
                b.collect_free(bound_inds, bound_preds, out)?;
            }
            Formula::Forall(x, body) | Formula::Exists(x, body) => {
                bound_inds.push(x.clone());
                let r = body.collect_free(bound_inds, bound_preds, out);
                bound_inds.pop();
                r?;
            }
            Formula::ForallPred(p, ar, body) | Formula::ExistsPred(p, ar, body) => {
                bound_preds.push((p.clone(), *ar));
                let r = body.collect_free(bound_inds, bound_preds, out);
                bound_preds.pop();
                r?;
            }
        }
        Ok(())
    }

    /// Arity-consistency of every predicate application.
    pub fn check(&self) -> Result<(), LangError> {
        self.free_vars().map(|_| ())
    }

    /// Names bound anywhere in the formula (individual and predicate).
    pub fn bound_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| match f {
            Formula::Forall(x, _) | Formula::Exists(x, _) => {
                out.insert(x.clone());
            }
            Formula::ForallPred(p, _, _) | Formula::ExistsPred(p, _, _) => {
                out.insert(p.clone());
            }
            _ => {}
        });
        out
    }

    /// Every variable name occurring anywhere.
    pub fn all_names(&self) -> BTreeSet<String> {
        let mut out = self.bound_names();
        self.walk(&mut |f| match f {
            Formula::Eq(x, y) => {
                out.insert(x.clone());
                out.insert(y.clone());
            }
            Formula::App(p, args) => {
                out.insert(p.clone());
                out.extend(args.iter().cloned());
            }
            _ => {}
        });
        out
    }

    fn walk<F: FnMut(&Formula)>(&self, f: &mut F) {
        f(self);
        match self {
            Formula::Eq(..) | Formula::App(..) => {}
            Formula::Not(a) => a.walk(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.walk(f);
                b.walk(f);
            }
            Formula::Forall(_, b) | Formula::Exists(_, b) | Formula::ForallPred(_, _, b) | Formula::ExistsPred(_, _, b) => {
                b.walk(f)
            }
        }
    }

    pub fn has_second_order_quantifier(&self) -> bool {
        let mut found = false;
        self.walk(&mut |f| {
            if matches!(f, Formula::ForallPred(..) | Formula::ExistsPred(..)) {
                found = true;
            }
        });
        found
    }

    /// Maximum nesting depth of individual quantifiers.
    pub fn individual_quantifier_depth(&self) -> usize {
        match self {
            Formula::Eq(..) | Formula::App(..) => 0,
            Formula::Not(a) => a.individual_quantifier_depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.individual_quantifier_depth().max(b.individual_quantifier_depth())
            }
            Formula::Forall(_, b) | Formula::Exists(_, b) => 1 + b.individual_quantifier_depth(),
            Formula::ForallPred(_, _, b) | Formula::ExistsPred(_, _, b) => b.individual_quantifier_depth(),
        }
    }
}

/// Values for free variables: atoms for individual variables, predicates for
/// predicate variables.
#[derive(Debug, Clone, Default)]
pub struct Assignment {
    pub inds: BTreeMap<String, Atom>,
    pub preds: BTreeMap<String, OrbitPredicate>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_ind(mut self, x: &str, a: Atom) -> Self {
        self.inds.insert(x.into(), a);
        self
    }

    pub fn with_pred(mut self, p: &str, pred: OrbitPredicate) -> Self {
        self.preds.insert(p.into(), pred);
        self
    }

    pub fn bind_ind(&mut self, x: &str, a: Atom) {
        self.inds.insert(x.into(), a);
    }

    pub fn bind_pred(&mut self, p: &str, pred: OrbitPredicate) {
        self.preds.insert(p.into(), pred);
    }

    /// `x ↦ π(f(x))`, `A ↦ π·f(A)`.
    pub fn permuted(&self, p: &FinitePermutation) -> Assignment {
        Assignment {
            inds: self.inds.iter().map(|(k, v)| (k.clone(), p.apply(*v))).collect(),
            preds: self.preds.iter().map(|(k, v)| (k.clone(), v.apply_perm(p))).collect(),
        }
    }

    /// All atoms mentioned: individual values and predicate supports.
    pub fn atoms(&self) -> SupportSet {
        let mut s: SupportSet = self.inds.values().copied().collect();
        for p in self.preds.values() {
            s.extend(p.support().iter().copied());
        }
        s
    }
}
