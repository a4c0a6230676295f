//! Refuters for trichotomy in `kΣ₀` (`k ≥ 2`) and for well-ordering in `Σ₀`.
//!
//! A finitely supported binary relation cannot inject one sort into another:
//! with support `P`, two fresh atoms of the source sort are swapped by a
//! permutation fixing `P`, so either their images are swapped too (and then
//! each has a fresh image, which a permutation fixing the argument moves to a
//! second image) or their images coincide. Orders fall the same way: a
//! transposition of two fresh atoms fixes the relation but reverses any order
//! between them.

use std::collections::BTreeMap;

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::atoms::{Atom, AtomError, FinitePermutation, Structure, SupportSet};
use crate::orbitpred::{orbit_types, OrbitError, OrbitPredicate, OrbitType};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IndepError {
    #[error("TR refutation requires k >= 2 (got k = {0})")]
    NeedTwoSorts(u32),
    #[error("expected a binary relation, got arity {0}")]
    NotBinary(usize),
    #[error("{0} is not a finite structure")]
    NotFinite(Structure),
    #[error(transparent)]
    Atom(#[from] AtomError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum RefutationKind {
    NotInjective,
    NotTotal,
    NotFunction,
    NotSupported,
    OrderFlip,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Refutation {
    pub kind: RefutationKind,
    pub witness_atoms: Vec<Atom>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_perm: Option<FinitePermutation>,
}

impl Refutation {
    fn new(kind: RefutationKind, witness_atoms: Vec<Atom>) -> Self {
        Refutation { kind, witness_atoms, witness_perm: None }
    }

    fn with_perm(mut self, perm: FinitePermutation) -> Self {
        self.witness_perm = Some(perm);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Refuted(Refutation),
}

impl Verdict {
    pub fn refutation(&self) -> Option<&Refutation> {
        match self {
            Verdict::Accept => None,
            Verdict::Refuted(r) => Some(r),
        }
    }
}

/// A binary relation given by a membership test and a claimed support.
pub trait Relation {
    fn holds(&self, pair: &[Atom]) -> bool;
    fn claimed_support(&self) -> SupportSet;
}

impl Relation for OrbitPredicate {
    fn holds(&self, pair: &[Atom]) -> bool {
        self.contains(pair)
    }

    fn claimed_support(&self) -> SupportSet {
        self.support().clone()
    }
}

/// A [`Relation`] backed by a closure.
pub struct FnRelation<F> {
    pub support: SupportSet,
    pub test: F,
}

impl<F: Fn(Atom, Atom) -> bool> Relation for FnRelation<F> {
    fn holds(&self, pair: &[Atom]) -> bool {
        (self.test)(pair[0], pair[1])
    }

    fn claimed_support(&self) -> SupportSet {
        self.support.clone()
    }
}

/// Atoms of the support of sort `sort` followed by `fresh` fresh ones.
fn sort_window(structure: &Structure, support: &SupportSet, sort: u32, fresh: usize) -> Result<Vec<Atom>, AtomError> {
    let mut w: Vec<Atom> = support.of_sort(sort).copied().collect();
    w.extend(structure.fresh_atoms(sort, support, fresh)?);
    Ok(w)
}

/// Candidate images of `xi` that decide the section of `tau` at `xi`: the
/// target-sort atoms of `P ∪ {xi}` and two fresh atoms.
fn image_window(tau: &OrbitPredicate, xi: Atom, to: u32) -> Result<(Vec<Atom>, Vec<Atom>), AtomError> {
    let mut ctx = tau.support().clone();
    ctx.insert(xi);
    let named: Vec<Atom> = ctx.of_sort(to).copied().collect();
    let fresh = tau.structure().fresh_atoms(to, &ctx, 2)?;
    Ok((named, fresh))
}

/// Decides on the orbit table whether `tau` is the graph of a total injective
/// function from sort `from` into sort `to`.
pub fn check_injection(tau: &OrbitPredicate, from: u32, to: u32) -> Result<Verdict, IndepError> {
    use RefutationKind::*;
    let st = tau.structure();
    st.check_sort(from)?;
    st.check_sort(to)?;
    if tau.arity() != 2 {
        return Err(IndepError::NotBinary(tau.arity()));
    }
    let p = tau.support();

    // containment in I_from × I_to
    for t in tau.orbits() {
        if let Some(pair) = t.instantiate(&st, p) {
            if pair[0].sort != from || pair[1].sort != to {
                return Ok(Verdict::Refuted(Refutation::new(NotFunction, pair)));
            }
        }
    }

    let sources = sort_window(&st, p, from, 2)?;
    let reps = &sources[..sources.len() - 1];
    let mut image = BTreeMap::new();
    for &xi in reps {
        let (named, fresh) = image_window(tau, xi, to)?;
        if tau.contains(&[xi, fresh[0]]) {
            // the section is invariant under (η₁ η₂), which fixes P ∪ {ξ}
            let perm = FinitePermutation::transposition(fresh[0], fresh[1])?;
            return Ok(Verdict::Refuted(Refutation::new(NotFunction, vec![xi, fresh[0], fresh[1]]).with_perm(perm)));
        }
        let hits: Vec<Atom> = named.into_iter().filter(|eta| tau.contains(&[xi, *eta])).collect();
        match hits.as_slice() {
            [] => return Ok(Verdict::Refuted(Refutation::new(NotTotal, vec![xi]))),
            [eta] => {
                image.insert(xi, *eta);
            }
            [e1, e2, ..] => return Ok(Verdict::Refuted(Refutation::new(NotFunction, vec![xi, *e1, *e2]))),
        }
    }

    // the image of the second fresh source atom follows by equivariance
    let (f1, f2) = (sources[sources.len() - 2], sources[sources.len() - 1]);
    let shift = FinitePermutation::transposition(f1, f2)?;
    image.insert(f2, shift.apply(image[&f1]));
    for ((x1, y1), (x2, y2)) in image.iter().tuple_combinations() {
        if y1 == y2 {
            let r = Refutation::new(NotInjective, vec![*x1, *x2, *y1]);
            let r = if (*x1, *x2) == (f1, f2) { r.with_perm(shift.clone()) } else { r };
            return Ok(Verdict::Refuted(r));
        }
    }
    Ok(Verdict::Accept)
}

/// Probes the claimed support of `rel` with transpositions of fresh atoms,
/// then decides injectivity on the induced orbit table.
pub fn check_injection_relation(
    rel: &dyn Relation,
    structure: &Structure,
    from: u32,
    to: u32,
) -> Result<Verdict, IndepError> {
    let p = rel.claimed_support();
    let mut window = Vec::new();
    let mut fresh = Vec::new();
    // image sort first, so a failure is reported as a perturbed image
    let sorts = std::iter::once(to).chain((1..=structure.sorts()).filter(|s| *s != to));
    for s in sorts {
        let w = sort_window(structure, &p, s, 3)?;
        fresh.extend(w.iter().filter(|a| !p.contains(a)).copied().tuple_combinations::<(_, _)>());
        window.extend(w);
    }
    for (a, b) in fresh {
        let pi = FinitePermutation::transposition(a, b)?;
        for (x, y) in window.iter().cartesian_product(&window) {
            let t = [*x, *y];
            let moved = pi.apply_all(&t);
            if rel.holds(&t) != rel.holds(&moved) {
                return Ok(Verdict::Refuted(Refutation::new(RefutationKind::NotSupported, t.to_vec()).with_perm(pi)));
            }
        }
    }
    let tau = OrbitPredicate::tabulate(*structure, 2, p, |t| rel.holds(t));
    check_injection(&tau, from, to)
}

/// Re-derives the violation recorded in `r` for the claim "`rel` is the graph
/// of a total injection from sort `from` into sort `to`".
pub fn replay_injection(r: &Refutation, rel: &dyn Relation, structure: &Structure, from: u32, to: u32) -> bool {
    use RefutationKind::*;
    let p = rel.claimed_support();
    let w = &r.witness_atoms;
    let perm_fixes = |extra: &[Atom]| {
        r.witness_perm.as_ref().is_none_or(|pi| {
            let mut fixed = p.clone();
            fixed.extend(extra.iter().copied());
            pi.fixes_pointwise(&fixed)
        })
    };
    match (r.kind, w.as_slice()) {
        (NotFunction, [x, y]) => rel.holds(&[*x, *y]) && (x.sort != from || y.sort != to),
        (NotFunction, [x, y1, y2]) => {
            let moved = r.witness_perm.as_ref().is_none_or(|pi| pi.apply(*y1) == *y2);
            y1 != y2 && rel.holds(&[*x, *y1]) && rel.holds(&[*x, *y2]) && perm_fixes(&[*x]) && moved
        }
        (NotTotal, [x]) => {
            let mut ctx = p.clone();
            ctx.insert(*x);
            let mut images: Vec<Atom> = ctx.of_sort(to).copied().collect();
            images.extend(structure.fresh_atom(to, &ctx));
            x.sort == from && images.iter().all(|y| !rel.holds(&[*x, *y]))
        }
        (NotInjective, [x1, x2, y]) => {
            let moved = r.witness_perm.as_ref().is_none_or(|pi| pi.apply(*x1) == *x2);
            x1 != x2 && rel.holds(&[*x1, *y]) && rel.holds(&[*x2, *y]) && perm_fixes(&[]) && moved
        }
        (NotSupported, [x, y]) => r
            .witness_perm
            .as_ref()
            .is_some_and(|pi| pi.fixes_pointwise(&p) && rel.holds(&[*x, *y]) != rel.holds(&pi.apply_all(&[*x, *y]))),
        _ => false,
    }
}

/// Refutes "`t` is a reflexive linear order of the sort-1 atoms".
pub fn check_order(t: &OrbitPredicate) -> Result<Verdict, IndepError> {
    use RefutationKind::*;
    if t.arity() != 2 {
        return Err(IndepError::NotBinary(t.arity()));
    }
    let st = t.structure();
    let p = t.support();
    let window = sort_window(&st, p, 1, 2)?;
    for &x in &window[..window.len() - 1] {
        if !t.contains(&[x, x]) {
            return Ok(Verdict::Refuted(Refutation::new(NotTotal, vec![x, x])));
        }
    }
    let (a, b) = (window[window.len() - 2], window[window.len() - 1]);
    let ab = t.contains(&[a, b]);
    let ba = t.contains(&[b, a]);
    Ok(Verdict::Refuted(match (ab, ba) {
        (true, true) => Refutation::new(OrderFlip, vec![a, b]).with_perm(FinitePermutation::transposition(a, b)?),
        (false, false) => Refutation::new(NotTotal, vec![a, b]),
        // unreachable for a relation supported by P: (a b) fixes it
        _ => return Ok(Verdict::Accept),
    }))
}

/// Re-derives the order violation recorded in `r`.
pub fn replay_order(r: &Refutation, rel: &dyn Relation) -> bool {
    match (r.kind, r.witness_atoms.as_slice()) {
        (RefutationKind::NotTotal, [x, y]) => !rel.holds(&[*x, *y]) && !rel.holds(&[*y, *x]),
        (RefutationKind::OrderFlip, [a, b]) => {
            let perm_ok = r.witness_perm.as_ref().is_some_and(|pi| {
                pi.fixes_pointwise(&rel.claimed_support()) && pi.apply(*a) == *b && pi.apply(*b) == *a
            });
            a != b && rel.holds(&[*a, *b]) && rel.holds(&[*b, *a]) && perm_ok
        }
        _ => false,
    }
}

/// Canonical supports with at most `bound` atoms: the first `c_j` atoms of
/// each sort `j` for every count vector with `Σ c_j ≤ bound`.
pub fn support_patterns(structure: &Structure, bound: usize) -> Vec<SupportSet> {
    let sorts = structure.sorts() as usize;
    let mut out = Vec::new();
    for total in 0..=bound {
        for counts in (0..sorts).map(|_| 0..=total).multi_cartesian_product() {
            if counts.iter().sum::<usize>() != total {
                continue;
            }
            let mut p = SupportSet::new();
            for (j, c) in counts.iter().enumerate() {
                let sort = j as u32 + 1;
                p.extend(structure.fresh_atoms(sort, &SupportSet::new(), *c).unwrap_or_default());
            }
            out.push(p);
        }
        if sorts == 0 {
            break;
        }
    }
    out
}

fn candidates_of(structure: &Structure, support: &SupportSet) -> (Vec<OrbitType>, u64) {
    let types = orbit_types(structure, 2, support);
    let n = types.len();
    (types, 1u64 << n)
}

fn candidate(structure: &Structure, support: &SupportSet, types: &[OrbitType], mask: u64) -> OrbitPredicate {
    let satisfied = types.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, t)| t.clone()).collect();
    OrbitPredicate::from_parts(*structure, 2, support.clone(), satisfied)
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CandidateRefutation {
    pub support: Vec<Atom>,
    pub mask: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<(u32, u32)>,
    pub refutation: Refutation,
    pub replayed: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RefutationReport {
    pub claim: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    pub support_bound: usize,
    pub candidates: u64,
    pub accepted: u64,
    pub replay_failures: u64,
    pub kind_counts: BTreeMap<RefutationKind, u64>,
    /// Every refutation, in canonical order: support pattern, mask, direction.
    pub refutations: Vec<CandidateRefutation>,
}

impl RefutationReport {
    fn new(claim: &str, k: Option<u32>, support_bound: usize) -> Self {
        RefutationReport {
            claim: claim.into(),
            k,
            support_bound,
            candidates: 0,
            accepted: 0,
            replay_failures: 0,
            kind_counts: BTreeMap::new(),
            refutations: Vec::new(),
        }
    }

    fn record(&mut self, r: CandidateRefutation) {
        *self.kind_counts.entry(r.refutation.kind).or_default() += 1;
        if !r.replayed {
            self.replay_failures += 1;
        }
        self.refutations.push(r);
    }

    /// All candidates rejected and every refutation replayed.
    pub fn confirmed(&self) -> bool {
        self.accepted == 0 && self.replay_failures == 0
    }
}

/// Bounded exhaustive search confirming that no binary predicate with at
/// most `support_bound` support atoms injects sort 1 into sort 2 or back.
pub fn refute_tr1(k: u32, support_bound: usize) -> Result<RefutationReport, IndepError> {
    if k < 2 {
        return Err(IndepError::NeedTwoSorts(k));
    }
    let st = Structure::KSigma0(k);
    let mut report = RefutationReport::new("not_TR1", Some(k), support_bound);
    for p in support_patterns(&st, support_bound) {
        let (types, count) = candidates_of(&st, &p);
        let support: Vec<Atom> = p.iter().copied().collect();
        let results: Vec<Result<Vec<Option<CandidateRefutation>>, IndepError>> = (0..count)
            .into_par_iter()
            .map(|mask| {
                let tau = candidate(&st, &p, &types, mask);
                [(1, 2), (2, 1)]
                    .into_iter()
                    .map(|(from, to)| {
                        Ok(check_injection(&tau, from, to)?.refutation().map(|r| CandidateRefutation {
                            support: support.clone(),
                            mask,
                            direction: Some((from, to)),
                            replayed: replay_injection(r, &tau, &st, from, to),
                            refutation: r.clone(),
                        }))
                    })
                    .collect()
            })
            .collect();
        report.candidates += count;
        for per_candidate in results {
            for r in per_candidate? {
                match r {
                    Some(r) => report.record(r),
                    None => report.accepted += 1,
                }
            }
        }
    }
    Ok(report)
}

/// Bounded exhaustive search confirming that no binary predicate of `Σ₀`
/// with at most `support_bound` support atoms is a linear order.
pub fn refute_wo1(support_bound: usize) -> Result<RefutationReport, IndepError> {
    let st = Structure::Sigma0;
    let mut report = RefutationReport::new("not_WO1", None, support_bound);
    for p in support_patterns(&st, support_bound) {
        let (types, count) = candidates_of(&st, &p);
        let support: Vec<Atom> = p.iter().copied().collect();
        let results: Vec<Result<Option<CandidateRefutation>, IndepError>> = (0..count)
            .into_par_iter()
            .map(|mask| {
                let t = candidate(&st, &p, &types, mask);
                Ok(match check_order(&t)? {
                    Verdict::Accept => None,
                    Verdict::Refuted(r) => {
                        let replayed = replay_order(&r, &t);
                        Some(CandidateRefutation { support: support.clone(), mask, direction: None, refutation: r, replayed })
                    }
                })
            })
            .collect();
        report.candidates += count;
        for r in results {
            match r? {
                Some(r) => report.record(r),
                None => report.accepted += 1,
            }
        }
    }
    Ok(report)
}

fn finite_domain(structure: &Structure) -> Result<Vec<Atom>, IndepError> {
    structure.finite_domain().ok_or(IndepError::NotFinite(*structure))
}

/// Finite analogue of [`check_injection`]: is `tau` the graph of an
/// injection of the unary predicate `a` into the unary predicate `b`?
pub fn check_finite_injection(
    tau: &OrbitPredicate,
    a: &OrbitPredicate,
    b: &OrbitPredicate,
) -> Result<Verdict, IndepError> {
    use RefutationKind::*;
    let dom = finite_domain(&tau.structure())?;
    for (x, y) in dom.iter().cartesian_product(&dom) {
        if tau.contains(&[*x, *y]) && !(a.contains(&[*x]) && b.contains(&[*y])) {
            return Ok(Verdict::Refuted(Refutation::new(NotFunction, vec![*x, *y])));
        }
    }
    let mut image = BTreeMap::new();
    for x in dom.iter().filter(|x| a.contains(&[**x])) {
        let ys: Vec<Atom> = dom.iter().copied().filter(|y| tau.contains(&[*x, *y])).collect();
        match ys.as_slice() {
            [] => return Ok(Verdict::Refuted(Refutation::new(NotTotal, vec![*x]))),
            [y] => {
                image.insert(*x, *y);
            }
            [y1, y2, ..] => return Ok(Verdict::Refuted(Refutation::new(NotFunction, vec![*x, *y1, *y2]))),
        }
    }
    for ((x1, y1), (x2, y2)) in image.iter().tuple_combinations() {
        if y1 == y2 {
            return Ok(Verdict::Refuted(Refutation::new(NotInjective, vec![*x1, *x2, *y1])));
        }
    }
    Ok(Verdict::Accept)
}

/// Finite analogue of [`check_order`]: is `t` a well-order of the domain?
pub fn check_finite_well_order(t: &OrbitPredicate) -> Result<Verdict, IndepError> {
    use RefutationKind::*;
    let dom = finite_domain(&t.structure())?;
    let holds = |x: Atom, y: Atom| t.contains(&[x, y]);
    for (&x, &y) in dom.iter().cartesian_product(&dom) {
        if !holds(x, y) && !holds(y, x) {
            return Ok(Verdict::Refuted(Refutation::new(NotTotal, vec![x, y])));
        }
        if x != y && holds(x, y) && holds(y, x) {
            return Ok(Verdict::Refuted(Refutation::new(OrderFlip, vec![x, y])));
        }
    }
    for (&x, &y, &z) in dom.iter().cartesian_product(&dom).cartesian_product(&dom).map(|((x, y), z)| (x, y, z)) {
        if holds(x, y) && holds(y, z) && !holds(x, z) {
            return Ok(Verdict::Refuted(Refutation::new(NotFunction, vec![x, y, z])));
        }
    }
    // every non-empty subset has a least element
    for subset in dom.iter().powerset().filter(|s| !s.is_empty()) {
        if !subset.iter().any(|&&m| subset.iter().all(|&&y| holds(m, y))) {
            return Ok(Verdict::Refuted(Refutation::new(NotTotal, subset.into_iter().copied().collect())));
        }
    }
    Ok(Verdict::Accept)
}
