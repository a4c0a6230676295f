//! Finitely-supported predicates in orbit-table form.
//!
//! A predicate of arity `n` with support `P` is invariant under every
//! sort-preserving permutation fixing `P` pointwise, so it is a union of
//! orbits of `n`-tuples under that stabilizer. An orbit is described by an
//! [`OrbitType`]: for each coordinate, either the support atom it equals, or a
//! fresh equality class (with its sort) for coordinates outside `P`. There are
//! finitely many orbit types for given `n` and `P`, which makes membership,
//! equality and quantification finite table operations.
//!
//! Over a finite structure the representation is always exhaustive: the
//! support is the whole domain and every orbit is a single tuple.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::atoms::{Atom, AtomError, FinitePermutation, Structure, SupportSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrbitError {
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("predicates live in different structures ({0} vs {1})")]
    StructureMismatch(Structure, Structure),
    #[error("arity 0 predicates are not supported")]
    ZeroArity,
    #[error("orbit label names {0}, which is not in the declared support")]
    NamedOutsideSupport(Atom),
    #[error("orbit type {0} is not in canonical form")]
    NotCanonical(OrbitType),
    #[error("orbit type {0} has no instance in {1}")]
    Unrealizable(OrbitType, Structure),
    #[error("predicate is not supported by {0}")]
    NotSupportedBy(SupportSet),
    #[error(transparent)]
    Atom(#[from] AtomError),
}

/// One coordinate of an orbit type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Named(Atom),
    Fresh { class: u32, sort: u32 },
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match *self {
            Label::Named(a) => ("named", a.sort, a.index).serialize(s),
            Label::Fresh { class, sort } => ("fresh", class, sort).serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (tag, x, y) = <(String, u32, u32)>::deserialize(d)?;
        match tag.as_str() {
            "named" => Ok(Label::Named(Atom::new(x, y))),
            "fresh" => Ok(Label::Fresh { class: x, sort: y }),
            other => Err(serde::de::Error::custom(format!("unknown label tag `{other}`"))),
        }
    }
}

/// Canonical description of a `𝔊(P)`-orbit of tuples.
///
/// Fresh classes are numbered from 1 in order of first occurrence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OrbitType(Vec<Label>);

impl OrbitType {
    pub fn labels(&self) -> &[Label] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn from_labels(labels: Vec<Label>) -> Self {
        OrbitType(labels)
    }

    pub fn is_canonical(&self) -> bool {
        let mut next = 1;
        let mut sorts: Vec<u32> = Vec::new();
        for l in &self.0 {
            if let Label::Fresh { class, sort } = *l {
                if class == next {
                    sorts.push(sort);
                    next += 1;
                } else if class == 0 || class >= next || sorts[class as usize - 1] != sort {
                    return false;
                }
            }
        }
        true
    }

    /// Number of fresh classes per sort, as `(sort, count)` pairs.
    fn fresh_classes(&self) -> Vec<(u32, u32)> {
        let mut sorts: Vec<(u32, u32)> = Vec::new();
        for l in &self.0 {
            if let Label::Fresh { class, sort } = *l {
                if class as usize > sorts.len() {
                    sorts.push((class, sort));
                }
            }
        }
        sorts
    }

    /// A representative tuple: named coordinates as given, fresh classes
    /// instantiated with the least atoms of their sort outside `avoid`.
    pub fn instantiate(&self, structure: &Structure, avoid: &SupportSet) -> Option<Vec<Atom>> {
        let classes = self.fresh_classes();
        let mut atoms_for_class: Vec<Atom> = Vec::with_capacity(classes.len());
        let mut per_sort: Vec<(u32, Vec<Atom>)> = Vec::new();
        for (_, sort) in &classes {
            if per_sort.iter().all(|(s, _)| s != sort) {
                let needed = classes.iter().filter(|(_, s)| s == sort).count();
                let fresh = structure.fresh_atoms(*sort, avoid, needed).ok()?;
                per_sort.push((*sort, fresh));
            }
        }
        let mut used: Vec<(u32, usize)> = Vec::new();
        for (_, sort) in &classes {
            let slot = match used.iter_mut().find(|(s, _)| s == sort) {
                Some((_, n)) => {
                    *n += 1;
                    *n - 1
                }
                None => {
                    used.push((*sort, 1));
                    0
                }
            };
            let pool = &per_sort.iter().find(|(s, _)| s == sort)?.1;
            atoms_for_class.push(pool[slot]);
        }
        Some(
            self.0
                .iter()
                .map(|l| match *l {
                    Label::Named(a) => a,
                    Label::Fresh { class, .. } => atoms_for_class[class as usize - 1],
                })
                .collect(),
        )
    }

    fn map_named(&self, p: &FinitePermutation) -> OrbitType {
        OrbitType(
            self.0
                .iter()
                .map(|l| match *l {
                    Label::Named(a) => Label::Named(p.apply(a)),
                    fresh => fresh,
                })
                .collect(),
        )
    }
}

impl fmt::Display for OrbitType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            match l {
                Label::Named(a) => write!(f, "{a}")?,
                Label::Fresh { class, sort } => write!(f, "c{class}:{sort}")?,
            }
        }
        write!(f, "]")
    }
}

/// The canonical orbit type of `tuple` relative to `support`.
pub fn orbit_type_of(tuple: &[Atom], support: &SupportSet) -> OrbitType {
    let mut classes: Vec<Atom> = Vec::new();
    let labels = tuple
        .iter()
        .map(|a| {
            if support.contains(a) {
                Label::Named(*a)
            } else {
                let class = match classes.iter().position(|c| c == a) {
                    Some(i) => i + 1,
                    None => {
                        classes.push(*a);
                        classes.len()
                    }
                };
                Label::Fresh { class: class as u32, sort: a.sort }
            }
        })
        .collect();
    OrbitType(labels)
}

/// All realizable orbit types of `arity`-tuples over `support`, sorted.
pub fn orbit_types(structure: &Structure, arity: usize, support: &SupportSet) -> Vec<OrbitType> {
    let sorts = structure.sorts();
    let caps: Vec<Option<usize>> = (1..=sorts).map(|s| structure.fresh_capacity(s, support)).collect();
    let named: Vec<Atom> = support.iter().copied().filter(|a| structure.contains(a)).collect();
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(arity);
    let mut class_sorts: Vec<u32> = Vec::new();
    extend_types(arity, &named, sorts, &caps, &mut current, &mut class_sorts, &mut out);
    out.sort();
    out
}

fn extend_types(
    arity: usize,
    named: &[Atom],
    sorts: u32,
    caps: &[Option<usize>],
    current: &mut Vec<Label>,
    class_sorts: &mut Vec<u32>,
    out: &mut Vec<OrbitType>,
) {
    if current.len() == arity {
        out.push(OrbitType(current.clone()));
        return;
    }
    for a in named {
        current.push(Label::Named(*a));
        extend_types(arity, named, sorts, caps, current, class_sorts, out);
        current.pop();
    }
    for (i, s) in class_sorts.clone().into_iter().enumerate() {
        current.push(Label::Fresh { class: i as u32 + 1, sort: s });
        extend_types(arity, named, sorts, caps, current, class_sorts, out);
        current.pop();
    }
    for s in 1..=sorts {
        let used = class_sorts.iter().filter(|&&c| c == s).count();
        if caps[s as usize - 1].is_some_and(|cap| used >= cap) {
            continue;
        }
        class_sorts.push(s);
        current.push(Label::Fresh { class: class_sorts.len() as u32, sort: s });
        extend_types(arity, named, sorts, caps, current, class_sorts, out);
        current.pop();
        class_sorts.pop();
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoolOp {
    And,
    Or,
    Not,
    Diff,
}

/// An `n`-ary finitely-supported predicate as a table of satisfied orbit
/// types over a declared support.
#[derive(Debug, Clone)]
pub struct OrbitPredicate {
    structure: Structure,
    arity: usize,
    support: SupportSet,
    satisfied: BTreeSet<OrbitType>,
}

impl OrbitPredicate {
    /// Build from an explicit orbit table, validating every type.
    pub fn from_orbits<I>(structure: Structure, arity: usize, support: SupportSet, orbits: I) -> Result<Self, OrbitError>
    where
        I: IntoIterator<Item = OrbitType>,
    {
        if arity == 0 {
            return Err(OrbitError::ZeroArity);
        }
        for a in &support {
            structure.check_atom(a)?;
        }
        let mut satisfied = BTreeSet::new();
        for t in orbits {
            if t.arity() != arity {
                return Err(OrbitError::ArityMismatch { expected: arity, got: t.arity() });
            }
            if !t.is_canonical() {
                return Err(OrbitError::NotCanonical(t));
            }
            for l in t.labels() {
                match *l {
                    Label::Named(a) if !support.contains(&a) => return Err(OrbitError::NamedOutsideSupport(a)),
                    Label::Fresh { sort, .. } => structure.check_sort(sort)?,
                    _ => {}
                }
            }
            if t.instantiate(&structure, &support).is_none() {
                return Err(OrbitError::Unrealizable(t, structure));
            }
            satisfied.insert(t);
        }
        Ok(OrbitPredicate { structure, arity, support, satisfied }.normalized())
    }

    /// Tabulate `f` over the orbit types of `support`, deciding each orbit on
    /// one representative. `f` must be invariant under the stabilizer of
    /// `support`, or the result depends on the choice of representatives.
    pub fn tabulate<F>(structure: Structure, arity: usize, support: SupportSet, mut f: F) -> Self
    where
        F: FnMut(&[Atom]) -> bool,
    {
        assert!(arity > 0, "arity 0 predicates are not supported");
        let support = match structure.finite_domain() {
            Some(dom) => dom.into_iter().collect(),
            None => support,
        };
        let satisfied = orbit_types(&structure, arity, &support)
            .into_iter()
            .filter(|t| t.instantiate(&structure, &support).is_some_and(|rep| f(&rep)))
            .collect();
        OrbitPredicate { structure, arity, support, satisfied }
    }

    pub(crate) fn from_parts(structure: Structure, arity: usize, support: SupportSet, satisfied: BTreeSet<OrbitType>) -> Self {
        OrbitPredicate { structure, arity, support, satisfied }
    }

    pub fn empty(structure: Structure, arity: usize) -> Self {
        Self::tabulate(structure, arity, SupportSet::new(), |_| false)
    }

    pub fn full(structure: Structure, arity: usize) -> Self {
        Self::tabulate(structure, arity, SupportSet::new(), |_| true)
    }

    /// The finite unary predicate with exactly the given atoms.
    pub fn finite_set<I: IntoIterator<Item = Atom>>(structure: Structure, atoms: I) -> Result<Self, OrbitError> {
        let support: SupportSet = atoms.into_iter().collect();
        for a in &support {
            structure.check_atom(a)?;
        }
        let members = support.clone();
        Ok(Self::tabulate(structure, 1, support, |t| members.contains(&t[0])))
    }

    /// `I_sort ∖ excluded`.
    pub fn cofinite(structure: Structure, sort: u32, excluded: &SupportSet) -> Result<Self, OrbitError> {
        structure.check_sort(sort)?;
        let ex = excluded.clone();
        Ok(Self::tabulate(structure, 1, excluded.clone(), |t| t[0].sort == sort && !ex.contains(&t[0])))
    }

    pub fn structure(&self) -> Structure {
        self.structure
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn support(&self) -> &SupportSet {
        &self.support
    }

    pub fn orbits(&self) -> impl Iterator<Item = &OrbitType> + '_ {
        self.satisfied.iter()
    }

    pub fn orbit_count(&self) -> usize {
        self.satisfied.len()
    }

    pub fn is_empty(&self) -> bool {
        self.satisfied.is_empty()
    }

    fn normalized(self) -> Self {
        if self.structure.is_finite() {
            let dom: SupportSet = self.structure.finite_domain().unwrap().into_iter().collect();
            if dom != self.support {
                let src = self;
                return Self::tabulate(src.structure, src.arity, dom, |t| src.contains(t));
            }
        }
        self
    }

    /// Membership without the arity check.
    pub fn contains(&self, tuple: &[Atom]) -> bool {
        debug_assert_eq!(tuple.len(), self.arity);
        self.satisfied.contains(&orbit_type_of(tuple, &self.support))
    }

    pub fn member(&self, tuple: &[Atom]) -> Result<bool, OrbitError> {
        if tuple.len() != self.arity {
            return Err(OrbitError::ArityMismatch { expected: self.arity, got: tuple.len() });
        }
        Ok(self.contains(tuple))
    }

    /// The image `{π(t) | t ∈ self}`, supported by `π(support)`.
    pub fn apply_perm(&self, p: &FinitePermutation) -> OrbitPredicate {
        if p.is_identity() {
            return self.clone();
        }
        OrbitPredicate {
            structure: self.structure,
            arity: self.arity,
            support: p.image(&self.support),
            satisfied: self.satisfied.iter().map(|t| t.map_named(p)).collect(),
        }
        .normalized()
    }

    /// Re-express over a superset of the current support.
    fn refine(&self, to: &SupportSet) -> OrbitPredicate {
        if *to == self.support {
            return self.clone();
        }
        debug_assert!(self.support.is_subset(to));
        OrbitPredicate::tabulate(self.structure, self.arity, to.clone(), |t| self.contains(t))
    }

    fn compatible(&self, other: &OrbitPredicate) -> Result<(), OrbitError> {
        if !self.structure.same_as(&other.structure) {
            return Err(OrbitError::StructureMismatch(self.structure, other.structure));
        }
        if self.arity != other.arity {
            return Err(OrbitError::ArityMismatch { expected: self.arity, got: other.arity });
        }
        Ok(())
    }

    /// Same membership function.
    pub fn equal(&self, other: &OrbitPredicate) -> Result<bool, OrbitError> {
        self.compatible(other)?;
        if self.support == other.support {
            return Ok(self.satisfied == other.satisfied);
        }
        let u = self.support.union(&other.support);
        Ok(self.refine(&u).satisfied == other.refine(&u).satisfied)
    }

    pub fn boolean(&self, other: &OrbitPredicate, op: BoolOp) -> Result<OrbitPredicate, OrbitError> {
        if op == BoolOp::Not {
            return Ok(self.complement());
        }
        self.compatible(other)?;
        let u = self.support.union(&other.support);
        let (a, b) = (self.refine(&u), other.refine(&u));
        let satisfied = match op {
            BoolOp::And => a.satisfied.intersection(&b.satisfied).cloned().collect(),
            BoolOp::Or => a.satisfied.union(&b.satisfied).cloned().collect(),
            BoolOp::Diff => a.satisfied.difference(&b.satisfied).cloned().collect(),
            BoolOp::Not => unreachable!(),
        };
        Ok(OrbitPredicate { structure: self.structure, arity: self.arity, support: u, satisfied })
    }

    pub fn and(&self, other: &OrbitPredicate) -> Result<OrbitPredicate, OrbitError> {
        self.boolean(other, BoolOp::And)
    }

    pub fn or(&self, other: &OrbitPredicate) -> Result<OrbitPredicate, OrbitError> {
        self.boolean(other, BoolOp::Or)
    }

    pub fn diff(&self, other: &OrbitPredicate) -> Result<OrbitPredicate, OrbitError> {
        self.boolean(other, BoolOp::Diff)
    }

    pub fn complement(&self) -> OrbitPredicate {
        let satisfied = orbit_types(&self.structure, self.arity, &self.support)
            .into_iter()
            .filter(|t| !self.satisfied.contains(t))
            .collect();
        OrbitPredicate { structure: self.structure, arity: self.arity, support: self.support.clone(), satisfied }
    }

    /// Invariance under the stabilizer of `q`.
    ///
    /// Starting from the support `P ∪ q`, each atom of `P ∖ q` is dropped in
    /// turn; dropping `r` from a support `C` is sound iff the predicate is
    /// invariant under the transposition of `r` with one same-sort atom
    /// outside `C`, since that transposition and `𝔊(C)` generate `𝔊(C ∖ {r})`.
    pub fn is_supported_by(&self, q: &SupportSet) -> bool {
        let mut current = self.support.union(q);
        let to_drop: Vec<Atom> = self.support.iter().filter(|a| !q.contains(a)).copied().collect();
        for r in to_drop {
            if !self.droppable(&current, r) {
                return false;
            }
            current.remove(&r);
        }
        true
    }

    fn droppable(&self, current: &SupportSet, r: Atom) -> bool {
        let mut avoid = current.clone();
        avoid.insert(r);
        match self.structure.fresh_atom(r.sort, &avoid) {
            Ok(a) => {
                let swap = FinitePermutation::transposition(r, a).expect("same sort");
                self.apply_perm(&swap).equal(self).expect("compatible")
            }
            // no other atom of this sort outside `current`
            Err(_) => true,
        }
    }

    /// The ⊆-least support.
    pub fn least_support(&self) -> SupportSet {
        let mut current = self.support.clone();
        for r in self.support.iter().copied().collect::<Vec<_>>() {
            if self.droppable(&current, r) {
                current.remove(&r);
            }
        }
        current
    }

    /// The same predicate tabulated over support `q`.
    pub fn reexpress(&self, q: &SupportSet) -> Result<OrbitPredicate, OrbitError> {
        for a in q {
            self.structure.check_atom(a)?;
        }
        if self.structure.is_finite() {
            return if self.is_supported_by(q) {
                Ok(self.clone())
            } else {
                Err(OrbitError::NotSupportedBy(q.clone()))
            };
        }
        if self.support.is_subset(q) {
            return Ok(self.refine(q));
        }
        if !self.is_supported_by(q) {
            return Err(OrbitError::NotSupportedBy(q.clone()));
        }
        let avoid = self.support.union(q);
        let satisfied = orbit_types(&self.structure, self.arity, q)
            .into_iter()
            .filter(|t| t.instantiate(&self.structure, &avoid).is_some_and(|rep| self.contains(&rep)))
            .collect();
        Ok(OrbitPredicate { structure: self.structure, arity: self.arity, support: q.clone(), satisfied })
    }

    /// Re-expressed over its least support.
    pub fn minimized(&self) -> OrbitPredicate {
        self.reexpress(&self.least_support()).expect("least support is a support")
    }

    /// `{ η̄ | (prefix, η̄) ∈ self }` as a predicate of the remaining arity.
    pub fn section(&self, prefix: &[Atom]) -> Result<OrbitPredicate, OrbitError> {
        if prefix.is_empty() || prefix.len() >= self.arity {
            return Err(OrbitError::ArityMismatch { expected: self.arity - 1, got: prefix.len() });
        }
        let mut support = self.support.clone();
        support.extend(prefix.iter().copied());
        let mut buf: Vec<Atom> = prefix.to_vec();
        let n = prefix.len();
        Ok(OrbitPredicate::tabulate(self.structure, self.arity - n, support, |rest| {
            buf.truncate(n);
            buf.extend_from_slice(rest);
            self.contains(&buf)
        }))
    }

    pub fn to_json(&self) -> PredicateJson {
        PredicateJson {
            arity: self.arity,
            support: self.support.iter().copied().collect(),
            orbits: self.satisfied.iter().map(|t| t.0.clone()).collect(),
        }
    }

    pub fn from_json(structure: Structure, json: &PredicateJson) -> Result<Self, OrbitError> {
        let support: SupportSet = json.support.iter().copied().collect();
        Self::from_orbits(structure, json.arity, support, json.orbits.iter().map(|l| OrbitType(l.clone())))
    }
}

impl Serialize for OrbitPredicate {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl fmt::Display for OrbitPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pred/{} over {} {{", self.arity, self.support)?;
        for (i, t) in self.satisfied.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, "}}")
    }
}

/// Wire form: `{"arity":n,"support":[[s,i],...],"orbits":[[label,...],...]}`
/// with orbits in lexicographic order (named labels before fresh ones).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicateJson {
    pub arity: usize,
    pub support: Vec<Atom>,
    pub orbits: Vec<Vec<Label>>,
}
