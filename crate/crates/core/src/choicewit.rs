//! Construction of choice predicates for 1-1 Ackermann instances.
//!
//! Given `H(x, D)` with `∀x∃D H` true, a single binary `σ` is built whose
//! section at every atom is a witness for `D`. The atoms named by the
//! parameters of `H` form a support `P`; witnesses are chosen once per block
//! of the partition of the domain into the singletons of `P` and, per sort,
//! the remaining atoms. Inside a co-finite block the witness chosen at the
//! representative `μ` is carried to every other atom `ξ` by the transposition
//! `(μ ξ)`, which fixes `P` and hence preserves `H`.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::atoms::{Atom, AtomError, FinitePermutation, Structure, SupportSet};
use crate::eval::{eval, stabilizer_of, Candidates, EvalConfig, EvalError, EvalResult};
use crate::lang::{mk_choice_axiom, parse, Assignment, ChoiceNames, Formula, LangError};
use crate::orbitpred::{OrbitError, OrbitPredicate, PredicateJson};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChoiceError {
    #[error("antecedent fails: not every x has a witness D{}", if *.budget_limited { " within the budget" } else { "" })]
    AntecedentFails { budget_limited: bool },
    #[error("witness search exhausted at budget {budget} for block {block}")]
    WitnessExhausted { block: BlockId, budget: usize },
    #[error("internal error: constructed choice predicate does not verify")]
    VerificationFailed,
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Lang(#[from] LangError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Atom(#[from] AtomError),
}

/// Block index `(sort, i)`: `i ≤ q` is the `i`-th atom of the support,
/// `i = q + 1` the co-finite remainder of the sort.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockId {
    pub sort: u32,
    pub index: usize,
}

impl fmt::Display for BlockId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.sort, self.index)
    }
}

impl Serialize for BlockId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(2))?;
        seq.serialize_element(&self.sort)?;
        seq.serialize_element(&self.index)?;
        seq.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockKind {
    Singleton,
    Cofinite,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub id: BlockId,
    pub kind: BlockKind,
    pub rep: Atom,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionPlan {
    pub structure: Structure,
    pub support: SupportSet,
    pub blocks: Vec<Block>,
}

impl PartitionPlan {
    pub fn block(&self, id: BlockId) -> Option<&Block> {
        self.blocks.iter().find(|b| b.id == id)
    }

    pub fn block_of(&self, a: Atom) -> Option<&Block> {
        if !self.structure.contains(&a) {
            return None;
        }
        let cofinite = !self.support.contains(&a);
        self.blocks.iter().find(|b| match b.kind {
            BlockKind::Singleton => b.rep == a,
            BlockKind::Cofinite => cofinite && b.id.sort == a.sort,
        })
    }

    pub fn block_contains(&self, id: BlockId, a: Atom) -> bool {
        self.block_of(a).is_some_and(|b| b.id == id)
    }

    /// Representatives of the co-finite blocks.
    pub fn mu(&self) -> SupportSet {
        self.blocks.iter().filter(|b| b.kind == BlockKind::Cofinite).map(|b| b.rep).collect()
    }

    /// One representative per block.
    pub fn choice_set(&self) -> SupportSet {
        self.blocks.iter().map(|b| b.rep).collect()
    }

    /// The block as a unary predicate.
    pub fn block_predicate(&self, id: BlockId) -> Option<OrbitPredicate> {
        let b = self.block(id)?;
        Some(match b.kind {
            BlockKind::Singleton => OrbitPredicate::finite_set(self.structure, [b.rep]).ok()?,
            BlockKind::Cofinite => OrbitPredicate::cofinite(self.structure, id.sort, &self.support).ok()?,
        })
    }
}

/// The partition of the domain into the singletons of `support` and, per
/// sort, the atoms outside it (omitted when empty).
pub fn p_adequate_partition(support: &SupportSet, structure: &Structure) -> Result<PartitionPlan, ChoiceError> {
    for a in support {
        structure.check_atom(a)?;
    }
    let q = support.len();
    let mut blocks: Vec<Block> = support
        .iter()
        .enumerate()
        .map(|(i, a)| Block { id: BlockId { sort: a.sort, index: i + 1 }, kind: BlockKind::Singleton, rep: *a })
        .collect();
    for sort in 1..=structure.sorts() {
        if let Ok(mu) = structure.fresh_atom(sort, support) {
            blocks.push(Block { id: BlockId { sort, index: q + 1 }, kind: BlockKind::Cofinite, rep: mu });
        }
    }
    blocks.sort_by_key(|b| b.id);
    Ok(PartitionPlan { structure: *structure, support: support.clone(), blocks })
}

/// The first witness `δ` for `H` at `x ↦ ξ` in evaluation order.
fn first_witness(
    h: &Formula,
    f: &Assignment,
    names: &ChoiceNames,
    xi: Atom,
    cfg: &EvalConfig,
) -> Result<Option<OrbitPredicate>, ChoiceError> {
    let at = f.clone().with_ind(&names.x, xi);
    let context = stabilizer_of(&Formula::exists_pred(&names.d, 1, h.clone()), &at)?;
    for cand in Candidates::new(cfg, 1, &context)? {
        let g = at.clone().with_pred(&names.d, cand.clone());
        if eval(h, &g, cfg)?.value {
            return Ok(Some(cand));
        }
    }
    Ok(None)
}

/// One witness per block, chosen at the block representative.
pub fn choose_deltas(
    h: &Formula,
    f: &Assignment,
    plan: &PartitionPlan,
    cfg: &EvalConfig,
    names: &ChoiceNames,
) -> Result<BTreeMap<BlockId, OrbitPredicate>, ChoiceError> {
    plan.blocks
        .par_iter()
        .map(|b| match first_witness(h, f, names, b.rep, cfg)? {
            Some(d) => Ok((b.id, d)),
            None => Err(ChoiceError::WitnessExhausted { block: b.id, budget: cfg.budget }),
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// `swap(x0, y0, x, y)` over the given variable names.
pub fn swap_formula_named(kind: BlockKind, x0: &str, y0: &str, x: &str, y: &str) -> Formula {
    let text = match kind {
        BlockKind::Singleton => format!("{x} = {x0} & {y} = {y0}"),
        BlockKind::Cofinite => format!(
            "({x} = {x0} -> {y} = {y0}) & (!({x} = {x0}) -> \
             ((!({y0} = {x0}) & !({y0} = {x})) -> {y} = {y0}) \
             & ({y0} = {x0} -> {y} = {x}) & ({y0} = {x} -> {y} = {x0}))"
        ),
    };
    parse(&text).expect("swap template parses")
}

/// `swap(x0, y0, x, y)`: true iff `y` is the image of `y0` under the
/// permutation moving `x0` to `x` (the transposition `(x0 x)` for co-finite
/// blocks).
pub fn swap_formula(kind: BlockKind) -> Formula {
    swap_formula_named(kind, "x0", "y0", "x", "y")
}

#[derive(Debug, Clone)]
pub struct BlockWitness {
    pub id: BlockId,
    pub kind: BlockKind,
    pub rep: Atom,
    pub delta: OrbitPredicate,
}

#[derive(Debug, Clone)]
pub struct ChoiceWitness {
    pub plan: PartitionPlan,
    pub per_block: Vec<BlockWitness>,
    pub sigma: OrbitPredicate,
    pub defining_support: SupportSet,
    /// Defining formula of `sigma` over the block and witness predicates.
    pub certificate: Formula,
    pub verification: EvalResult,
}

fn block_names(id: BlockId) -> (String, String, String) {
    let tag = format!("{}_{}", id.sort, id.index);
    (format!("B_{tag}"), format!("D_{tag}"), format!("r_{tag}"))
}

fn certificate_formula(per_block: &[BlockWitness]) -> Formula {
    Formula::disj(per_block.iter().map(|b| {
        let (bp, dp, r) = block_names(b.id);
        Formula::app(&bp, &["x"])
            .and(Formula::exists("y0", Formula::app(&dp, &["y0"]).and(swap_formula_named(b.kind, &r, "y0", "x", "y"))))
    }))
    .unwrap_or_else(|| parse("!(x = x)").unwrap())
}

impl ChoiceWitness {
    /// Values for the free names of [`ChoiceWitness::certificate`].
    pub fn certificate_assignment(&self) -> Assignment {
        let mut f = Assignment::new();
        for b in &self.per_block {
            let (bp, dp, r) = block_names(b.id);
            f.bind_pred(&bp, self.plan.block_predicate(b.id).expect("block of the plan"));
            f.bind_pred(&dp, b.delta.clone());
            f.bind_ind(&r, b.rep);
        }
        f
    }

    /// Checks `∀x∀y (G(x, y) ↔ σ(x, y))`.
    pub fn verify_certificate(&self, cfg: &EvalConfig) -> Result<bool, ChoiceError> {
        let phi = Formula::forall(
            "x",
            Formula::forall("y", self.certificate.clone().iff(Formula::app("Sigma", &["x", "y"]))),
        );
        let f = self.certificate_assignment().with_pred("Sigma", self.sigma.clone());
        Ok(eval(&phi, &f, cfg)?.value)
    }

    /// The section of `sigma` at `xi` as given by the construction.
    pub fn expected_section(&self, xi: Atom) -> Option<OrbitPredicate> {
        let b = self.plan.block_of(xi)?;
        let w = self.per_block.iter().find(|w| w.id == b.id)?;
        let pi = FinitePermutation::transposition(w.rep, xi).ok()?;
        Some(w.delta.apply_perm(&pi))
    }

    pub fn to_json(&self) -> CertificateJson {
        CertificateJson {
            p: self.plan.support.iter().copied().collect(),
            mu: self.plan.mu().iter().copied().collect(),
            blocks: self
                .per_block
                .iter()
                .map(|b| BlockJson { e: b.id, kind: b.kind, rep: b.rep, delta: b.delta.to_json() })
                .collect(),
            sigma: self.sigma.to_json(),
            g: self.certificate.to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockJson {
    pub e: BlockId,
    pub kind: BlockKind,
    pub rep: Atom,
    pub delta: PredicateJson,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateJson {
    #[serde(rename = "P")]
    pub p: Vec<Atom>,
    pub mu: Vec<Atom>,
    pub blocks: Vec<BlockJson>,
    pub sigma: PredicateJson,
    #[serde(rename = "G")]
    pub g: String,
}

/// [`build_sigma_with`] for the designated names `x` and `D`.
pub fn build_sigma(h: &Formula, f: &Assignment, cfg: &EvalConfig) -> Result<ChoiceWitness, ChoiceError> {
    build_sigma_with(h, f, cfg, &ChoiceNames::default())
}

/// Builds and verifies a choice predicate for `∀x∃D H`.
pub fn build_sigma_with(
    h: &Formula,
    f: &Assignment,
    cfg: &EvalConfig,
    names: &ChoiceNames,
) -> Result<ChoiceWitness, ChoiceError> {
    let axiom = mk_choice_axiom(h, names)?;
    let Formula::Implies(antecedent, consequent) = &axiom else { unreachable!("choice axiom is an implication") };
    let Formula::ExistsPred(s, _, body) = &**consequent else { unreachable!("consequent quantifies S") };

    let ante = eval(antecedent, f, cfg)?;
    if !ante.value {
        return Err(ChoiceError::AntecedentFails { budget_limited: ante.budget_limited });
    }
    let support = stabilizer_of(antecedent, f)?;
    let plan = p_adequate_partition(&support, &cfg.structure)?;
    let deltas = choose_deltas(h, f, &plan, cfg, names)?;

    let per_block: Vec<BlockWitness> = plan
        .blocks
        .iter()
        .map(|b| BlockWitness { id: b.id, kind: b.kind, rep: b.rep, delta: deltas[&b.id].clone() })
        .collect();
    let mut defining = support.union(&plan.mu());
    for d in deltas.values() {
        defining.extend(d.support().iter().copied());
    }

    let sigma = OrbitPredicate::tabulate(cfg.structure, 2, defining.clone(), |t| {
        let Some(b) = plan.block_of(t[0]) else { return false };
        let delta = &deltas[&b.id];
        match b.kind {
            BlockKind::Singleton => delta.contains(&t[1..]),
            BlockKind::Cofinite => {
                let pi = FinitePermutation::transposition(b.rep, t[0]).expect("same sort");
                delta.contains(&[pi.apply(t[1])])
            }
        }
    });

    let verification = eval(body, &f.clone().with_pred(s, sigma.clone()), cfg)?;
    if !verification.value {
        return Err(ChoiceError::VerificationFailed);
    }
    let certificate = certificate_formula(&per_block);
    Ok(ChoiceWitness { plan, per_block, sigma, defining_support: defining, certificate, verification })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(s: u32, i: u32) -> Atom {
        Atom::new(s, i)
    }

    fn id(sort: u32, index: usize) -> BlockId {
        BlockId { sort, index }
    }

    #[test]
    fn partition_of_empty_support() {
        let plan = p_adequate_partition(&SupportSet::new(), &Structure::Sigma0).unwrap();
        assert_eq!(plan.blocks, vec![Block { id: id(1, 1), kind: BlockKind::Cofinite, rep: a(1, 0) }]);
    }

    #[test]
    fn partition_of_two_atoms() {
        let p = SupportSet::from([a(1, 3), a(1, 5)]);
        let plan = p_adequate_partition(&p, &Structure::Sigma0).unwrap();
        let ids: Vec<_> = plan.blocks.iter().map(|b| (b.id, b.kind, b.rep)).collect();
        assert_eq!(
            ids,
            vec![
                (id(1, 1), BlockKind::Singleton, a(1, 3)),
                (id(1, 2), BlockKind::Singleton, a(1, 5)),
                (id(1, 3), BlockKind::Cofinite, a(1, 0)),
            ]
        );
        assert_eq!(plan.mu(), SupportSet::from([a(1, 0)]));
    }

    #[test]
    fn two_sorted_partition_matches_membership_scan() {
        let p = SupportSet::from([a(1, 3), a(2, 0)]);
        let st = Structure::KSigma0(2);
        let plan = p_adequate_partition(&p, &st).unwrap();
        let q = p.len();
        // refine {ν_1}, {ν_2}, I∖P by sort and keep the non-empty pieces
        let mut expected = BTreeMap::new();
        for s in 1..=2 {
            for i in 0..10 {
                let atom = a(s, i);
                let e = p.iter().position(|v| *v == atom).map_or(q + 1, |pos| pos + 1);
                expected.entry(id(s, e)).or_insert_with(Vec::new).push(atom);
            }
        }
        let got: Vec<_> = plan.blocks.iter().map(|b| b.id).collect();
        assert_eq!(got, expected.keys().copied().collect::<Vec<_>>());
        assert_eq!(got, vec![id(1, 1), id(1, 3), id(2, 2), id(2, 3)]);
        for (e, members) in &expected {
            for m in members {
                assert!(plan.block_contains(*e, *m));
            }
            assert!(plan.block_contains(*e, plan.block(*e).unwrap().rep));
        }
        assert_eq!(plan.mu(), SupportSet::from([a(1, 0), a(2, 1)]));
    }

    #[test]
    fn finite_partition_omits_empty_remainder() {
        let dom: SupportSet = Structure::FiniteStd(2).finite_domain().unwrap().into_iter().collect();
        let plan = p_adequate_partition(&dom, &Structure::FiniteStd(2)).unwrap();
        assert!(plan.blocks.iter().all(|b| b.kind == BlockKind::Singleton));
        assert_eq!(plan.blocks.len(), 2);
    }

    #[test]
    fn deltas_for_simple_instances() {
        let cfg = EvalConfig::new(Structure::Sigma0);
        let p = SupportSet::from([a(1, 3)]);
        let plan = p_adequate_partition(&p, &cfg.structure).unwrap();
        let names = ChoiceNames::default();

        let h = parse("D(x)").unwrap();
        let ds = choose_deltas(&h, &Assignment::new(), &plan, &cfg, &names).unwrap();
        for b in &plan.blocks {
            let ctx = SupportSet::from([b.rep]);
            let first = Candidates::new(&cfg, 1, &ctx).unwrap().find(|d| d.contains(&[b.rep])).unwrap();
            assert!(ds[&b.id].equal(&first).unwrap());
        }

        let h = parse("forall y. (D(y) <-> y = x)").unwrap();
        let ds = choose_deltas(&h, &Assignment::new(), &plan, &cfg, &names).unwrap();
        for b in &plan.blocks {
            let single = OrbitPredicate::finite_set(cfg.structure, [b.rep]).unwrap();
            assert!(ds[&b.id].equal(&single).unwrap());
        }

        let h = parse("forall y. !D(y)").unwrap();
        let ds = choose_deltas(&h, &Assignment::new(), &plan, &cfg, &names).unwrap();
        assert!(ds.values().all(|d| d.is_empty()));
    }

    #[test]
    fn swap_shapes() {
        assert_eq!(swap_formula(BlockKind::Singleton), parse("x = x0 & y = y0").unwrap());
        let cof = swap_formula(BlockKind::Cofinite);
        let cfg = EvalConfig::new(Structure::Sigma0);
        let at = |x0, y0, x, y| {
            Assignment::new().with_ind("x0", x0).with_ind("y0", y0).with_ind("x", x).with_ind("y", y)
        };
        assert!(eval(&cof, &at(a(1, 0), a(1, 0), a(1, 7), a(1, 7)), &cfg).unwrap().value);
        assert!(eval(&cof, &at(a(1, 0), a(1, 4), a(1, 7), a(1, 4)), &cfg).unwrap().value);
        assert!(!eval(&cof, &at(a(1, 0), a(1, 4), a(1, 7), a(1, 7)), &cfg).unwrap().value);
    }

    #[test]
    fn membership_instance_verifies() {
        let cfg = EvalConfig::new(Structure::Sigma0);
        let w = build_sigma(&parse("D(x)").unwrap(), &Assignment::new(), &cfg).unwrap();
        for i in 0..6 {
            assert!(w.sigma.contains(&[a(1, i), a(1, i)]));
        }
        assert!(w.verification.value);
        assert!(w.verify_certificate(&cfg).unwrap());
    }

    #[test]
    fn singleton_instance_gives_diagonal() {
        let h = parse("forall y. (D(y) <-> y = x)").unwrap();
        for st in [Structure::Sigma0, Structure::KSigma0(2)] {
            let cfg = EvalConfig::new(st);
            let w = build_sigma(&h, &Assignment::new(), &cfg).unwrap();
            for s in 1..=st.sorts() {
                for i in 0..6 {
                    for t in 1..=st.sorts() {
                        for j in 0..6 {
                            assert_eq!(w.sigma.contains(&[a(s, i), a(t, j)]), (s, i) == (t, j));
                        }
                    }
                }
            }
            assert!(w.sigma.least_support().is_empty());
            assert!(w.verify_certificate(&cfg).unwrap());
        }
    }

    #[test]
    fn failing_antecedent_is_reported() {
        let h = parse("D(x) & !D(x)").unwrap();
        let err = build_sigma(&h, &Assignment::new(), &EvalConfig::new(Structure::Sigma0)).unwrap_err();
        assert!(matches!(err, ChoiceError::AntecedentFails { .. }));
    }

    #[test]
    fn certificate_json_shape() {
        let cfg = EvalConfig::new(Structure::Sigma0);
        let f = Assignment::new().with_ind("c", a(1, 2));
        let w = build_sigma(&parse("forall y. (D(y) <-> y = c)").unwrap(), &f, &cfg).unwrap();
        let v = serde_json::to_value(w.to_json()).unwrap();
        assert_eq!(v["P"], serde_json::json!([[1, 2]]));
        assert_eq!(v["mu"], serde_json::json!([[1, 0]]));
        assert_eq!(v["blocks"][0]["e"], serde_json::json!([1, 1]));
        assert_eq!(v["blocks"][1]["rep"], serde_json::json!([1, 0]));
        assert!(v["G"].as_str().unwrap().starts_with("B_1_1(x) & (exists y0."));
    }
}
