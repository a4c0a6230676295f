//! Atoms, supports, finite permutations, and the structure families they
//! live in.
//!
//! An [`Atom`] is a pair `(sort, index)`. The single-sorted Fraenkel model is
//! handled as the one-sorted case of the k-sorted model, so every piece of
//! machinery below is sort-aware even when only one sort is in play.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AtomError {
    #[error("sort {sort} out of range for structure {structure}")]
    SortOutOfRange { sort: u32, structure: Structure },
    #[error("atom {atom} is not an individual of structure {structure}")]
    NotInDomain { atom: Atom, structure: Structure },
    #[error("no fresh atom of sort {sort} in structure {structure}")]
    NoFreshAtom { sort: u32, structure: Structure },
    #[error("sort-violating permutation: {from} -> {to}")]
    SortViolation { from: Atom, to: Atom },
    #[error("permutation map is not a bijection on its moved set")]
    NotBijective,
    #[error("invalid structure spec `{0}` (expected sigma0, ksigma0:<k> or finite:<k>)")]
    BadStructureSpec(String),
}

/// An individual of sort `sort` (1-based) and index `index`.
///
/// Ordering is sort-major, index-minor, which is also the canonical order
/// used for serialization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub sort: u32,
    pub index: u32,
}

impl Atom {
    pub const fn new(sort: u32, index: u32) -> Self {
        Atom { sort, index }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.sort, self.index)
    }
}

impl Serialize for Atom {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (self.sort, self.index).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Atom {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (sort, index) = <(u32, u32)>::deserialize(d)?;
        Ok(Atom { sort, index })
    }
}

/// A finite set of atoms in canonical order.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SupportSet(BTreeSet<Atom>);

impl SupportSet {
    pub fn new() -> Self {
        SupportSet(BTreeSet::new())
    }

    pub fn contains(&self, a: &Atom) -> bool {
        self.0.contains(a)
    }

    pub fn insert(&mut self, a: Atom) -> bool {
        self.0.insert(a)
    }

    pub fn remove(&mut self, a: &Atom) -> bool {
        self.0.remove(a)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Atom> + '_ {
        self.0.iter()
    }

    pub fn of_sort(&self, sort: u32) -> impl Iterator<Item = &Atom> + '_ {
        self.0.iter().filter(move |a| a.sort == sort)
    }

    pub fn union(&self, other: &SupportSet) -> SupportSet {
        SupportSet(self.0.union(&other.0).copied().collect())
    }

    pub fn extend<I: IntoIterator<Item = Atom>>(&mut self, it: I) {
        self.0.extend(it)
    }

    pub fn is_subset(&self, other: &SupportSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn as_set(&self) -> &BTreeSet<Atom> {
        &self.0
    }

    /// Largest index mentioned, if any.
    pub fn max_index(&self) -> Option<u32> {
        self.0.iter().map(|a| a.index).max()
    }
}

impl FromIterator<Atom> for SupportSet {
    fn from_iter<I: IntoIterator<Item = Atom>>(it: I) -> Self {
        SupportSet(it.into_iter().collect())
    }
}

impl<const N: usize> From<[Atom; N]> for SupportSet {
    fn from(atoms: [Atom; N]) -> Self {
        atoms.into_iter().collect()
    }
}

impl IntoIterator for SupportSet {
    type Item = Atom;
    type IntoIter = std::collections::btree_set::IntoIter<Atom>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a SupportSet {
    type Item = &'a Atom;
    type IntoIter = std::collections::btree_set::Iter<'a, Atom>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for SupportSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

/// The three structure families.
///
/// `Sigma0` and `KSigma0(1)` denote the same structure. `FiniteStd(k)` is the
/// standard structure over the atoms `(1,1)..(1,k)` with the trivial group,
/// so every predicate over it is admitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Structure {
    Sigma0,
    KSigma0(u32),
    FiniteStd(u32),
}

impl Structure {
    pub fn sorts(&self) -> u32 {
        match *self {
            Structure::Sigma0 => 1,
            Structure::KSigma0(k) => k,
            Structure::FiniteStd(_) => 1,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Structure::FiniteStd(_))
    }

    /// Two descriptors denote the same individual domain and group.
    pub fn same_as(&self, other: &Structure) -> bool {
        match (self, other) {
            (Structure::FiniteStd(a), Structure::FiniteStd(b)) => a == b,
            (Structure::FiniteStd(_), _) | (_, Structure::FiniteStd(_)) => false,
            _ => self.sorts() == other.sorts(),
        }
    }

    pub fn check_sort(&self, sort: u32) -> Result<(), AtomError> {
        if sort == 0 || sort > self.sorts() {
            Err(AtomError::SortOutOfRange { sort, structure: *self })
        } else {
            Ok(())
        }
    }

    pub fn contains(&self, a: &Atom) -> bool {
        match *self {
            Structure::FiniteStd(k) => a.sort == 1 && a.index >= 1 && a.index <= k,
            _ => a.sort >= 1 && a.sort <= self.sorts(),
        }
    }

    pub fn check_atom(&self, a: &Atom) -> Result<(), AtomError> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(AtomError::NotInDomain { atom: *a, structure: *self })
        }
    }

    /// All individuals, for finite structures only.
    pub fn finite_domain(&self) -> Option<Vec<Atom>> {
        match *self {
            Structure::FiniteStd(k) => Some((1..=k).map(|i| Atom::new(1, i)).collect()),
            _ => None,
        }
    }

    fn index_range(&self) -> (u32, Option<u32>) {
        match *self {
            Structure::FiniteStd(k) => (1, Some(k)),
            _ => (0, None),
        }
    }

    /// The sort-`sort` atom of least index outside `avoid`.
    pub fn fresh_atom(&self, sort: u32, avoid: &SupportSet) -> Result<Atom, AtomError> {
        self.fresh_atoms(sort, avoid, 1).map(|v| v[0])
    }

    /// The `count` least sort-`sort` atoms outside `avoid`, in increasing order.
    pub fn fresh_atoms(&self, sort: u32, avoid: &SupportSet, count: usize) -> Result<Vec<Atom>, AtomError> {
        self.check_sort(sort)?;
        let (lo, hi) = self.index_range();
        let mut out = Vec::with_capacity(count);
        let mut i = lo;
        while out.len() < count {
            if hi.is_some_and(|h| i > h) {
                return Err(AtomError::NoFreshAtom { sort, structure: *self });
            }
            let a = Atom::new(sort, i);
            if !avoid.contains(&a) {
                out.push(a);
            }
            i += 1;
        }
        Ok(out)
    }

    /// Number of sort-`sort` atoms outside `avoid`, `None` when unbounded.
    pub fn fresh_capacity(&self, sort: u32, avoid: &SupportSet) -> Option<usize> {
        match *self {
            Structure::FiniteStd(k) => {
                let used = avoid.of_sort(sort).filter(|a| self.contains(a)).count();
                if sort == 1 {
                    Some(k as usize - used)
                } else {
                    Some(0)
                }
            }
            _ => None,
        }
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Structure::Sigma0 => write!(f, "sigma0"),
            Structure::KSigma0(k) => write!(f, "ksigma0:{k}"),
            Structure::FiniteStd(k) => write!(f, "finite:{k}"),
        }
    }
}

impl FromStr for Structure {
    type Err = AtomError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || AtomError::BadStructureSpec(s.to_string());
        let s = s.trim();
        if s == "sigma0" {
            return Ok(Structure::Sigma0);
        }
        let (head, k) = s.split_once(':').ok_or_else(bad)?;
        let k: u32 = k.parse().map_err(|_| bad())?;
        if k == 0 {
            return Err(bad());
        }
        match head {
            "ksigma0" => Ok(Structure::KSigma0(k)),
            "finite" => Ok(Structure::FiniteStd(k)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for Structure {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A sort-preserving permutation of the atoms that moves finitely many of
/// them. Stored as its moved-point map; the identity is the empty map.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct FinitePermutation {
    moved: BTreeMap<Atom, Atom>,
}

impl FinitePermutation {
    pub fn identity() -> Self {
        Self::default()
    }

    /// Build from an explicit map; fixed points in the map are dropped.
    pub fn from_map(map: BTreeMap<Atom, Atom>) -> Result<Self, AtomError> {
        let moved: BTreeMap<Atom, Atom> = map.into_iter().filter(|(a, b)| a != b).collect();
        for (a, b) in &moved {
            if a.sort != b.sort {
                return Err(AtomError::SortViolation { from: *a, to: *b });
            }
        }
        let domain: BTreeSet<Atom> = moved.keys().copied().collect();
        let image: BTreeSet<Atom> = moved.values().copied().collect();
        if domain != image {
            return Err(AtomError::NotBijective);
        }
        Ok(FinitePermutation { moved })
    }

    pub fn transposition(a: Atom, b: Atom) -> Result<Self, AtomError> {
        if a.sort != b.sort {
            return Err(AtomError::SortViolation { from: a, to: b });
        }
        let mut moved = BTreeMap::new();
        if a != b {
            moved.insert(a, b);
            moved.insert(b, a);
        }
        Ok(FinitePermutation { moved })
    }

    pub fn apply(&self, a: Atom) -> Atom {
        self.moved.get(&a).copied().unwrap_or(a)
    }

    pub fn apply_all(&self, atoms: &[Atom]) -> Vec<Atom> {
        atoms.iter().map(|a| self.apply(*a)).collect()
    }

    pub fn image(&self, s: &SupportSet) -> SupportSet {
        s.iter().map(|a| self.apply(*a)).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.moved.is_empty()
    }

    pub fn moved(&self) -> impl Iterator<Item = (&Atom, &Atom)> + '_ {
        self.moved.iter()
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &FinitePermutation) -> FinitePermutation {
        let mut moved = BTreeMap::new();
        for a in self.moved.keys().chain(other.moved.keys()) {
            let b = self.apply(other.apply(*a));
            if *a != b {
                moved.insert(*a, b);
            }
        }
        FinitePermutation { moved }
    }

    pub fn inverse(&self) -> FinitePermutation {
        FinitePermutation { moved: self.moved.iter().map(|(a, b)| (*b, *a)).collect() }
    }

    /// Membership in the stabilizer subgroup of `s`.
    pub fn fixes_pointwise(&self, s: &SupportSet) -> bool {
        s.iter().all(|a| self.apply(*a) == *a)
    }
}

impl fmt::Display for FinitePermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.moved.is_empty() {
            return write!(f, "id");
        }
        let mut first = true;
        for (a, b) in &self.moved {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "{a}->{b}")?;
        }
        Ok(())
    }
}

impl Serialize for FinitePermutation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<(Atom, Atom)> = self.moved.iter().map(|(a, b)| (*a, *b)).collect();
        pairs.serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(s: u32, i: u32) -> Atom {
        Atom::new(s, i)
    }

    fn linear_scan(sort: u32, avoid: &SupportSet) -> Atom {
        (0..).map(|i| a(sort, i)).find(|x| !avoid.contains(x)).unwrap()
    }

    #[test]
    fn fresh_atom_examples() {
        let s = Structure::KSigma0(2);
        assert_eq!(Structure::Sigma0.fresh_atom(1, &SupportSet::new()).unwrap(), a(1, 0));
        let avoid = SupportSet::from([a(1, 3), a(1, 5)]);
        assert_eq!(Structure::Sigma0.fresh_atom(1, &avoid).unwrap(), linear_scan(1, &avoid));
        assert_eq!(Structure::Sigma0.fresh_atom(1, &avoid).unwrap(), a(1, 0));
        let avoid = SupportSet::from([a(2, 0), a(2, 1), a(1, 0)]);
        assert_eq!(s.fresh_atom(2, &avoid).unwrap(), linear_scan(2, &avoid));
        assert_eq!(s.fresh_atom(2, &avoid).unwrap(), a(2, 2));
    }

    #[test]
    fn fresh_atom_errors() {
        assert!(matches!(
            Structure::Sigma0.fresh_atom(2, &SupportSet::new()),
            Err(AtomError::SortOutOfRange { .. })
        ));
        let full = SupportSet::from([a(1, 1), a(1, 2)]);
        assert!(matches!(
            Structure::FiniteStd(2).fresh_atom(1, &full),
            Err(AtomError::NoFreshAtom { .. })
        ));
        assert_eq!(Structure::FiniteStd(3).fresh_atom(1, &full).unwrap(), a(1, 3));
    }

    #[test]
    fn transposition_examples() {
        assert!(FinitePermutation::transposition(a(1, 0), a(1, 0)).unwrap().is_identity());
        let t = FinitePermutation::transposition(a(1, 0), a(1, 7)).unwrap();
        assert_eq!(t.apply(a(1, 7)), a(1, 0));
        assert_eq!(t.apply(a(1, 0)), a(1, 7));
        assert_eq!(t.apply(a(1, 4)), a(1, 4));
        assert!(matches!(
            FinitePermutation::transposition(a(1, 0), a(2, 0)),
            Err(AtomError::SortViolation { .. })
        ));
    }

    #[test]
    fn fixes_pointwise_examples() {
        let s = SupportSet::from([a(1, 3), a(2, 9)]);
        assert!(FinitePermutation::identity().fixes_pointwise(&s));
        let t = FinitePermutation::transposition(a(1, 0), a(1, 7)).unwrap();
        assert!(t.fixes_pointwise(&SupportSet::from([a(1, 3)])));
        assert!(!t.fixes_pointwise(&SupportSet::from([a(1, 7)])));
    }

    #[test]
    fn from_map_rejects_bad_maps() {
        let mut m = BTreeMap::new();
        m.insert(a(1, 0), a(1, 1));
        assert_eq!(FinitePermutation::from_map(m.clone()), Err(AtomError::NotBijective));
        m.insert(a(1, 1), a(2, 0));
        assert!(matches!(FinitePermutation::from_map(m), Err(AtomError::SortViolation { .. })));
    }

    #[test]
    fn structure_specs() {
        assert_eq!("sigma0".parse::<Structure>().unwrap(), Structure::Sigma0);
        assert_eq!("ksigma0:3".parse::<Structure>().unwrap(), Structure::KSigma0(3));
        assert_eq!("finite:2".parse::<Structure>().unwrap(), Structure::FiniteStd(2));
        assert!("finite:0".parse::<Structure>().is_err());
        assert!("sigma1".parse::<Structure>().is_err());
        assert!(Structure::Sigma0.same_as(&Structure::KSigma0(1)));
        assert!(!Structure::Sigma0.same_as(&Structure::FiniteStd(1)));
    }

    #[test]
    fn atom_json_is_pair() {
        assert_eq!(serde_json::to_string(&a(2, 5)).unwrap(), "[2,5]");
        let back: Atom = serde_json::from_str("[2,5]").unwrap();
        assert_eq!(back, a(2, 5));
    }
}
