use std::collections::BTreeSet;

use super::{parse, Formula, LangError};

/// Names of the designated variables of a choice instance `H(x, D)`.
#[derive(Debug, Clone)]
pub struct ChoiceNames {
    pub x: String,
    pub d: String,
}

impl Default for ChoiceNames {
    fn default() -> Self {
        ChoiceNames { x: "x".into(), d: "D".into() }
    }
}

fn unused(base: &str, taken: &BTreeSet<String>) -> String {
    if !taken.contains(base) {
        return base.to_string();
    }
    (1..).map(|i| format!("{base}{i}")).find(|n| !taken.contains(n)).unwrap()
}

/// The 1-1 Ackermann instance
/// `∀x∃D H → ∃S∀x∃D(∀y(D y ↔ S x y) ∧ H)`.
///
/// `S` and `y` are renamed away from every name occurring in `H`.
pub fn mk_choice_axiom(h: &Formula, names: &ChoiceNames) -> Result<Formula, LangError> {
    let bound = h.bound_names();
    for v in [&names.x, &names.d] {
        if bound.contains(v) {
            return Err(LangError::BoundDesignated(v.clone()));
        }
    }
    let fv = h.free_vars()?;
    if let Some(ar) = fv.preds.get(&names.d) {
        if *ar != 1 {
            return Err(LangError::Arity { name: names.d.clone(), expected: 1, got: *ar });
        }
    }
    let mut taken = h.all_names();
    taken.insert(names.x.clone());
    taken.insert(names.d.clone());
    let s = unused("S", &taken);
    let y = unused("y", &taken);
    let (x, d) = (names.x.as_str(), names.d.as_str());

    let antecedent = Formula::forall(x, Formula::exists_pred(d, 1, h.clone()));
    let section = Formula::forall(&y, Formula::app(d, &[&y]).iff(Formula::app(&s, &[x, &y])));
    let consequent =
        Formula::exists_pred(&s, 2, Formula::forall(x, Formula::exists_pred(d, 1, section.and(h.clone()))));
    Ok(antecedent.implies(consequent))
}

fn vars(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn forall_all(vs: &[String], body: Formula) -> Formula {
    vs.iter().rev().fold(body, |acc, v| Formula::forall(v, acc))
}

fn exists_all(vs: &[String], body: Formula) -> Formula {
    vs.iter().rev().fold(body, |acc, v| Formula::exists(v, acc))
}

fn tuple_eq(a: &[String], b: &[String]) -> Formula {
    Formula::conj(a.iter().zip(b).map(|(x, y)| Formula::eq(x, y))).unwrap()
}

fn apply(p: &str, parts: &[&[String]]) -> Formula {
    let args: Vec<String> = parts.iter().flat_map(|p| p.iter().cloned()).collect();
    Formula::App(p.into(), args)
}

/// `[A ≲ B]`: some `2n`-ary `F` is the graph of an injection of `A` into `B`.
fn embeds(a: &str, b: &str, f: &str, n: usize) -> Formula {
    let (xs, ys, zs) = (vars("x", n), vars("y", n), vars("z", n));
    let total = forall_all(
        &xs,
        apply(a, &[&xs]).implies(exists_all(&ys, apply(b, &[&ys]).and(apply(f, &[&xs, &ys])))),
    );
    let functional = forall_all(
        &[xs.clone(), ys.clone(), zs.clone()].concat(),
        apply(f, &[&xs, &ys]).and(apply(f, &[&xs, &zs])).implies(tuple_eq(&ys, &zs)),
    );
    let injective = forall_all(
        &[xs.clone(), ys.clone(), zs.clone()].concat(),
        apply(f, &[&xs, &ys]).and(apply(f, &[&zs, &ys])).implies(tuple_eq(&xs, &zs)),
    );
    let contained = forall_all(
        &[xs.clone(), ys.clone()].concat(),
        apply(f, &[&xs, &ys]).implies(apply(a, &[&xs]).and(apply(b, &[&ys]))),
    );
    Formula::exists_pred(f, 2 * n, total.and(functional).and(injective).and(contained))
}

/// `TRⁿ = ∀A∀B([A ≲ B] ∨ [B ≲ A])` over `n`-ary predicates.
pub fn mk_trichotomy(n: usize) -> Result<Formula, LangError> {
    if n < 1 {
        return Err(LangError::Invalid("trichotomy needs n >= 1".into()));
    }
    let body = embeds("A", "B", "F", n).or(embeds("B", "A", "F", n));
    Ok(Formula::forall_pred("A", n, Formula::forall_pred("B", n, body)))
}

const WELL_ORDER: &str = "Exists T:2. \
    (forall x. T(x, x)) \
    & (forall x. forall y. T(x, y) & T(y, x) -> x = y) \
    & (forall x. forall y. forall z. T(x, y) & T(y, z) -> T(x, z)) \
    & (forall x. forall y. T(x, y) | T(y, x)) \
    & (Forall A:1. (exists x. A(x)) -> exists x. A(x) & forall y. (A(y) -> T(x, y)))";

/// `WO¹`: a linear order on all individuals in which every non-empty unary
/// predicate has a least element.
pub fn mk_well_order() -> Formula {
    parse(WELL_ORDER).expect("well-order schema parses")
}
