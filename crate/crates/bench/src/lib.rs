//! Inputs shared by the benchmarks.

use henkin_core::{Atom, OrbitPredicate, Structure, SupportSet};

/// A binary predicate over `support_size` sort-1 atoms: pairs that are
/// equal or both outside the support.
pub fn sample_relation(structure: Structure, support_size: u32) -> OrbitPredicate {
    let support: SupportSet = (0..support_size).map(|i| Atom::new(1, 2 * i + 1)).collect();
    let inner = support.clone();
    OrbitPredicate::tabulate(structure, 2, support, move |t| {
        t[0] == t[1] || (!inner.contains(&t[0]) && !inner.contains(&t[1]))
    })
}

/// Distinct sort-1 atoms, for membership queries.
pub fn sample_pairs(n: u32) -> Vec<[Atom; 2]> {
    (0..n).map(|i| [Atom::new(1, i % 7), Atom::new(1, (3 * i + 1) % 11)]).collect()
}
