//! Henkin evaluation over the three structure families.
//!
//! First-order quantifiers are exact: the truth of a formula is invariant
//! under permutations fixing the atoms its free variables refer to, so it is
//! enough to try every such atom plus one fresh atom per sort.
//!
//! Second-order quantifiers over an infinite structure range over the
//! predicates supported by the context atoms plus at most `budget` fresh atoms
//! per sort, enumerated in layers (`0, 1, …, budget` fresh atoms per sort),
//! each layer by increasing orbit count. A witness found this way is a real
//! witness; running out of candidates is reported through
//! [`EvalResult::budget_limited`] instead of being read as a refutation. Over
//! a finite structure every predicate is enumerated and results are exact.

use std::collections::HashMap;
use std::rc::Rc;

use itertools::Itertools;
use serde::Serialize;
use thiserror::Error;

use crate::atoms::{Atom, AtomError, Structure, SupportSet};
use crate::lang::{Assignment, Formula, FreeVars, LangError};
use crate::orbitpred::{orbit_types, OrbitError, OrbitPredicate, OrbitType};

/// Default number of fresh atoms per sort admitted into witness supports.
pub const DEFAULT_BUDGET: usize = 2;
/// Default cap on candidates tried by one second-order quantifier.
pub const DEFAULT_MAX_CANDIDATES: usize = 1 << 14;
/// Finite structures enumerate all `2^types` predicates; beyond this many
/// orbit types evaluation is refused.
pub const MAX_FINITE_TYPES: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable {0}")]
    Unbound(String),
    #[error("predicate variable {name} has arity {expected} but is bound to a predicate of arity {got}")]
    Arity { name: String, expected: usize, got: usize },
    #[error("value for {name} does not belong to structure {structure}")]
    ForeignValue { name: String, structure: Structure },
    #[error("{types} orbit types of arity {arity}: too many predicates to enumerate exactly")]
    EnumerationTooLarge { arity: usize, types: usize },
    #[error(transparent)]
    Lang(#[from] LangError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Atom(#[from] AtomError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalConfig {
    pub structure: Structure,
    pub budget: usize,
    pub max_candidates: usize,
}

impl EvalConfig {
    pub fn new(structure: Structure) -> Self {
        EvalConfig { structure, budget: DEFAULT_BUDGET, max_candidates: DEFAULT_MAX_CANDIDATES }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_max_candidates(mut self, max: usize) -> Self {
        self.max_candidates = max;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EvalResult {
    pub value: bool,
    pub budget_limited: bool,
}

impl EvalResult {
    fn exact(value: bool) -> Self {
        EvalResult { value, budget_limited: false }
    }
}

/// `Σ_f(φ)` under the given configuration.
pub fn eval(phi: &Formula, f: &Assignment, cfg: &EvalConfig) -> Result<EvalResult, EvalError> {
    let fv = phi.free_vars()?;
    validate_assignment(&fv, f, &cfg.structure)?;
    let mut ev = Evaluator::new(cfg, f);
    ev.eval(phi)
}

fn validate_assignment(fv: &FreeVars, f: &Assignment, structure: &Structure) -> Result<(), EvalError> {
    for x in &fv.inds {
        let a = f.inds.get(x).ok_or_else(|| EvalError::Unbound(x.clone()))?;
        if !structure.contains(a) {
            return Err(EvalError::ForeignValue { name: x.clone(), structure: *structure });
        }
    }
    for (p, ar) in &fv.preds {
        let pred = f.preds.get(p).ok_or_else(|| EvalError::Unbound(p.clone()))?;
        if pred.arity() != *ar {
            return Err(EvalError::Arity { name: p.clone(), expected: *ar, got: pred.arity() });
        }
        if !pred.structure().same_as(structure) {
            return Err(EvalError::ForeignValue { name: p.clone(), structure: *structure });
        }
    }
    Ok(())
}

/// Atoms the free variables of `phi` refer to under `f`: the assigned atoms
/// of free individual variables and the declared supports of the predicates
/// assigned to free predicate variables.
pub fn stabilizer_of(phi: &Formula, f: &Assignment) -> Result<SupportSet, EvalError> {
    stabilizer_of_excluding(phi, f, &[])
}

/// As [`stabilizer_of`], ignoring the designated free variables.
pub fn stabilizer_of_excluding(phi: &Formula, f: &Assignment, designated: &[&str]) -> Result<SupportSet, EvalError> {
    let fv = phi.free_vars()?;
    let mut out = SupportSet::new();
    for x in fv.inds.iter().filter(|x| !designated.contains(&x.as_str())) {
        out.insert(*f.inds.get(x).ok_or_else(|| EvalError::Unbound(x.clone()))?);
    }
    for p in fv.preds.keys().filter(|p| !designated.contains(&p.as_str())) {
        let pred = f.preds.get(p).ok_or_else(|| EvalError::Unbound(p.clone()))?;
        out.extend(pred.support().iter().copied());
    }
    Ok(out)
}

/// Lazily enumerates the predicates a second-order quantifier ranges over.
pub struct Candidates {
    structure: Structure,
    arity: usize,
    layers: Vec<SupportSet>,
    layer: usize,
    types: Vec<OrbitType>,
    subsets: Box<dyn Iterator<Item = Vec<usize>>>,
    yielded: usize,
    cap: Option<usize>,
    truncated: bool,
}

impl Candidates {
    /// Candidates of `arity` for the context support `context`.
    pub fn new(cfg: &EvalConfig, arity: usize, context: &SupportSet) -> Result<Self, EvalError> {
        if arity == 0 {
            return Err(OrbitError::ZeroArity.into());
        }
        let structure = cfg.structure;
        let (layers, cap) = match structure.finite_domain() {
            Some(dom) => (vec![dom.into_iter().collect::<SupportSet>()], None),
            None => {
                let mut layers = Vec::with_capacity(cfg.budget + 1);
                for l in 0..=cfg.budget {
                    let mut t = context.clone();
                    for s in 1..=structure.sorts() {
                        t.extend(structure.fresh_atoms(s, context, l)?);
                    }
                    layers.push(t);
                }
                (layers, Some(cfg.max_candidates))
            }
        };
        let mut c = Candidates {
            structure,
            arity,
            layers,
            layer: 0,
            types: Vec::new(),
            subsets: Box::new(std::iter::empty()),
            yielded: 0,
            cap,
            truncated: false,
        };
        c.enter_layer(0)?;
        Ok(c)
    }

    fn enter_layer(&mut self, l: usize) -> Result<(), EvalError> {
        self.layer = l;
        self.types = orbit_types(&self.structure, self.arity, &self.layers[l]);
        let n = self.types.len();
        if self.structure.is_finite() && n > MAX_FINITE_TYPES {
            return Err(EvalError::EnumerationTooLarge { arity: self.arity, types: n });
        }
        self.subsets = Box::new((0..=n).flat_map(move |r| (0..n).combinations(r)));
        Ok(())
    }

    /// True when the cap stopped the enumeration early.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn yielded(&self) -> usize {
        self.yielded
    }
}

impl Iterator for Candidates {
    type Item = OrbitPredicate;

    fn next(&mut self) -> Option<OrbitPredicate> {
        loop {
            if let Some(subset) = self.subsets.next() {
                let pred = OrbitPredicate::from_parts(
                    self.structure,
                    self.arity,
                    self.layers[self.layer].clone(),
                    subset.into_iter().map(|i| self.types[i].clone()).collect(),
                );
                if self.layer > 0 && pred.is_supported_by(&self.layers[self.layer - 1]) {
                    continue;
                }
                if self.cap.is_some_and(|cap| self.yielded >= cap) {
                    self.truncated = true;
                    return None;
                }
                self.yielded += 1;
                return Some(pred);
            }
            if self.layer + 1 >= self.layers.len() {
                return None;
            }
            // layer types were computable for layer 0, hence for later ones
            self.enter_layer(self.layer + 1).ok()?;
        }
    }
}

struct Evaluator<'c> {
    cfg: &'c EvalConfig,
    inds: Vec<(String, Atom)>,
    preds: Vec<(String, Rc<OrbitPredicate>)>,
    free: HashMap<*const Formula, Rc<FreeVars>>,
}

impl<'c> Evaluator<'c> {
    fn new(cfg: &'c EvalConfig, f: &Assignment) -> Self {
        Evaluator {
            cfg,
            inds: f.inds.iter().map(|(k, v)| (k.clone(), *v)).collect(),
            preds: f.preds.iter().map(|(k, v)| (k.clone(), Rc::new(v.clone()))).collect(),
            free: HashMap::new(),
        }
    }

    fn ind(&self, x: &str) -> Result<Atom, EvalError> {
        self.inds
            .iter()
            .rev()
            .find(|(n, _)| n == x)
            .map(|(_, a)| *a)
            .ok_or_else(|| EvalError::Unbound(x.to_string()))
    }

    fn pred(&self, p: &str) -> Result<&OrbitPredicate, EvalError> {
        self.preds
            .iter()
            .rev()
            .find(|(n, _)| n == p)
            .map(|(_, a)| &**a)
            .ok_or_else(|| EvalError::Unbound(p.to_string()))
    }

    fn free_vars(&mut self, phi: &Formula) -> Result<Rc<FreeVars>, EvalError> {
        let key = phi as *const Formula;
        if let Some(fv) = self.free.get(&key) {
            return Ok(fv.clone());
        }
        let fv = Rc::new(phi.free_vars()?);
        self.free.insert(key, fv.clone());
        Ok(fv)
    }

    /// Atoms referred to by the free variables of `phi` in the current scope.
    fn context(&mut self, phi: &Formula) -> Result<SupportSet, EvalError> {
        let fv = self.free_vars(phi)?;
        let mut s = SupportSet::new();
        for x in &fv.inds {
            s.insert(self.ind(x)?);
        }
        for p in fv.preds.keys() {
            s.extend(self.pred(p)?.support().iter().copied());
        }
        Ok(s)
    }

    fn representatives(&self, context: &SupportSet) -> Vec<Atom> {
        let st = &self.cfg.structure;
        let mut reps: Vec<Atom> = context.iter().copied().filter(|a| st.contains(a)).collect();
        for s in 1..=st.sorts() {
            if let Ok(a) = st.fresh_atom(s, context) {
                reps.push(a);
            }
        }
        reps
    }

    fn eval(&mut self, phi: &Formula) -> Result<EvalResult, EvalError> {
        match phi {
            Formula::Eq(x, y) => Ok(EvalResult::exact(self.ind(x)? == self.ind(y)?)),
            Formula::App(p, args) => {
                let tuple = args.iter().map(|x| self.ind(x)).collect::<Result<Vec<_>, _>>()?;
                let pred = self.pred(p)?;
                Ok(EvalResult::exact(pred.member(&tuple)?))
            }
            Formula::Not(a) => {
                let r = self.eval(a)?;
                Ok(EvalResult { value: !r.value, ..r })
            }
            Formula::And(a, b) => self.binary(a, b, false, false),
            Formula::Or(a, b) => self.binary(a, b, true, false),
            Formula::Implies(a, b) => self.binary(a, b, true, true),
            Formula::Iff(a, b) => {
                let (ra, rb) = (self.eval(a)?, self.eval(b)?);
                Ok(EvalResult { value: ra.value == rb.value, budget_limited: ra.budget_limited || rb.budget_limited })
            }
            Formula::Forall(x, body) | Formula::Exists(x, body) => {
                let universal = matches!(phi, Formula::Forall(..));
                let ctx = self.context(phi)?;
                let reps = self.representatives(&ctx);
                let mut limited = false;
                for a in reps {
                    self.inds.push((x.clone(), a));
                    let r = self.eval(body);
                    self.inds.pop();
                    let r = r?;
                    if r.value != universal {
                        return Ok(r);
                    }
                    limited |= r.budget_limited;
                }
                Ok(EvalResult { value: universal, budget_limited: limited })
            }
            Formula::ForallPred(p, arity, body) | Formula::ExistsPred(p, arity, body) => {
                let universal = matches!(phi, Formula::ForallPred(..));
                let ctx = self.context(phi)?;
                let mut limited = !self.cfg.structure.is_finite();
                for cand in Candidates::new(self.cfg, *arity, &ctx)? {
                    self.preds.push((p.clone(), Rc::new(cand)));
                    let r = self.eval(body);
                    self.preds.pop();
                    let r = r?;
                    if r.value != universal {
                        return Ok(r);
                    }
                    limited |= r.budget_limited;
                }
                Ok(EvalResult { value: universal, budget_limited: limited })
            }
        }
    }

    /// `a ∧ b`, `a ∨ b`, or `¬a ∨ b`; `decisive` is the value that settles the
    /// connective from one side.
    fn binary(&mut self, a: &Formula, b: &Formula, decisive: bool, negate_left: bool) -> Result<EvalResult, EvalError> {
        let mut ra = self.eval(a)?;
        if negate_left {
            ra.value = !ra.value;
        }
        if ra.value == decisive {
            return Ok(ra);
        }
        let rb = self.eval(b)?;
        if rb.value == decisive {
            return Ok(rb);
        }
        Ok(EvalResult { value: rb.value, budget_limited: ra.budget_limited || rb.budget_limited })
    }
}
