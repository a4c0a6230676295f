//! Brute-force reference evaluator.
//!
//! Quantifiers range over an explicit finite list of atoms; predicate
//! quantifiers range over every subset of `domain^arity`, stored as a bitmask.
//! Used as an oracle for [`crate::eval`]: exact on finite structures, and on
//! infinite ones for formulas without predicate quantifiers when run over
//! [`first_order_window`].

use std::collections::HashMap;

use thiserror::Error;

use crate::atoms::{Atom, Structure};
use crate::lang::{Assignment, Formula, LangError};
use crate::orbitpred::OrbitPredicate;

/// Largest `domain^arity` the enumerator accepts.
pub const MAX_TUPLES: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NaiveError {
    #[error("unbound variable {0}")]
    Unbound(String),
    #[error("atom {0} of the assignment lies outside the evaluation domain")]
    OutsideDomain(Atom),
    #[error("{tuples} tuples of arity {arity}: too many predicates to enumerate")]
    TooLarge { arity: usize, tuples: usize },
    #[error("predicate quantifiers over an infinite structure cannot be brute-forced")]
    SecondOrderOnInfinite,
    #[error(transparent)]
    Lang(#[from] LangError),
}

#[derive(Clone, Copy)]
enum PredVal<'a> {
    Given(&'a OrbitPredicate),
    Mask(u32),
}

struct Naive<'a> {
    domain: &'a [Atom],
    position: HashMap<Atom, usize>,
    inds: Vec<(&'a str, Atom)>,
    preds: Vec<(&'a str, PredVal<'a>)>,
}

impl<'a> Naive<'a> {
    fn ind(&self, x: &str) -> Result<Atom, NaiveError> {
        self.inds.iter().rev().find(|(n, _)| *n == x).map(|(_, a)| *a).ok_or_else(|| NaiveError::Unbound(x.into()))
    }

    fn pred(&self, p: &str) -> Result<PredVal<'a>, NaiveError> {
        self.preds.iter().rev().find(|(n, _)| *n == p).map(|(_, v)| *v).ok_or_else(|| NaiveError::Unbound(p.into()))
    }

    fn tuple_index(&self, tuple: &[Atom]) -> Result<usize, NaiveError> {
        let d = self.domain.len();
        tuple.iter().try_fold(0, |acc, a| {
            let i = *self.position.get(a).ok_or(NaiveError::OutsideDomain(*a))?;
            Ok(acc * d + i)
        })
    }

    fn eval(&mut self, phi: &'a Formula) -> Result<bool, NaiveError> {
        Ok(match phi {
            Formula::Eq(x, y) => self.ind(x)? == self.ind(y)?,
            Formula::App(p, args) => {
                let tuple = args.iter().map(|x| self.ind(x)).collect::<Result<Vec<_>, _>>()?;
                match self.pred(p)? {
                    PredVal::Given(pred) => pred.contains(&tuple),
                    PredVal::Mask(mask) => mask >> self.tuple_index(&tuple)? & 1 == 1,
                }
            }
            Formula::Not(a) => !self.eval(a)?,
            Formula::And(a, b) => self.eval(a)? && self.eval(b)?,
            Formula::Or(a, b) => self.eval(a)? || self.eval(b)?,
            Formula::Implies(a, b) => !self.eval(a)? || self.eval(b)?,
            Formula::Iff(a, b) => self.eval(a)? == self.eval(b)?,
            Formula::Forall(x, body) | Formula::Exists(x, body) => {
                let universal = matches!(phi, Formula::Forall(..));
                for &a in self.domain {
                    self.inds.push((x, a));
                    let v = self.eval(body);
                    self.inds.pop();
                    if v? != universal {
                        return Ok(!universal);
                    }
                }
                universal
            }
            Formula::ForallPred(p, arity, body) | Formula::ExistsPred(p, arity, body) => {
                let universal = matches!(phi, Formula::ForallPred(..));
                let tuples = self.domain.len().pow(*arity as u32);
                if tuples > MAX_TUPLES {
                    return Err(NaiveError::TooLarge { arity: *arity, tuples });
                }
                for mask in 0..1u32 << tuples {
                    self.preds.push((p, PredVal::Mask(mask)));
                    let v = self.eval(body);
                    self.preds.pop();
                    if v? != universal {
                        return Ok(!universal);
                    }
                }
                universal
            }
        })
    }
}

/// Evaluates `phi` with every quantifier ranging over `domain`.
pub fn naive_eval(phi: &Formula, f: &Assignment, domain: &[Atom]) -> Result<bool, NaiveError> {
    let fv = phi.free_vars()?;
    let position: HashMap<Atom, usize> = domain.iter().enumerate().map(|(i, a)| (*a, i)).collect();
    let mut inds = Vec::new();
    for x in &fv.inds {
        let a = *f.inds.get(x).ok_or_else(|| NaiveError::Unbound(x.clone()))?;
        if !position.contains_key(&a) {
            return Err(NaiveError::OutsideDomain(a));
        }
        inds.push((x.as_str(), a));
    }
    let mut preds = Vec::new();
    for p in fv.preds.keys() {
        let pred = f.preds.get(p).ok_or_else(|| NaiveError::Unbound(p.clone()))?;
        preds.push((p.as_str(), PredVal::Given(pred)));
    }
    Naive { domain, position, inds, preds }.eval(phi)
}

/// Exact evaluation over the whole domain of a finite structure.
pub fn finite_eval(phi: &Formula, f: &Assignment, structure: &Structure) -> Result<bool, NaiveError> {
    let domain = structure.finite_domain().ok_or(NaiveError::SecondOrderOnInfinite)?;
    naive_eval(phi, f, &domain)
}

/// Atoms of index `< N` in every sort, where `N` leaves room for one atom
/// outside the assignment's atoms per nested individual quantifier.
pub fn first_order_window(phi: &Formula, f: &Assignment, structure: &Structure) -> Result<Vec<Atom>, NaiveError> {
    if let Some(dom) = structure.finite_domain() {
        return Ok(dom);
    }
    let fv = phi.free_vars()?;
    let mut max_index: Option<u32> = None;
    for x in &fv.inds {
        let a = f.inds.get(x).ok_or_else(|| NaiveError::Unbound(x.clone()))?;
        max_index = max_index.max(Some(a.index));
    }
    for p in fv.preds.keys() {
        let pred = f.preds.get(p).ok_or_else(|| NaiveError::Unbound(p.clone()))?;
        max_index = max_index.max(pred.support().max_index());
    }
    let depth = phi.individual_quantifier_depth() as u32;
    let n = (max_index.map_or(0, |m| m + 1) + depth).max(1);
    Ok((1..=structure.sorts()).flat_map(|s| (0..n).map(move |i| Atom::new(s, i))).collect())
}

/// Brute-force evaluation of a formula without predicate quantifiers over
/// [`first_order_window`]; exact on every structure.
pub fn window_eval(phi: &Formula, f: &Assignment, structure: &Structure) -> Result<bool, NaiveError> {
    if phi.has_second_order_quantifier() && !structure.is_finite() {
        return Err(NaiveError::SecondOrderOnInfinite);
    }
    naive_eval(phi, f, &first_order_window(phi, f, structure)?)
}
