use std::fmt;

use super::Formula;

// Binding strength; quantifiers are parenthesized whenever they are an operand.
const IFF: u8 = 1;
const IMPLIES: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const ATOM: u8 = 6;

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Iff(..) => IFF,
        Formula::Implies(..) => IMPLIES,
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        Formula::Not(..) | Formula::Eq(..) | Formula::App(..) => ATOM,
        Formula::Forall(..) | Formula::Exists(..) | Formula::ForallPred(..) | Formula::ExistsPred(..) => 0,
    }
}

fn operand(f: &mut fmt::Formatter<'_>, child: &Formula, parens: bool) -> fmt::Result {
    if parens || prec(child) == 0 {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Eq(x, y) => write!(f, "{x} = {y}"),
            Formula::App(p, args) => write!(f, "{p}({})", args.join(", ")),
            Formula::Not(a) => {
                write!(f, "!")?;
                operand(f, a, prec(a) < ATOM || matches!(**a, Formula::Eq(..)))
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Iff(a, b) => {
                let (p, op) = match self {
                    Formula::And(..) => (AND, "&"),
                    Formula::Or(..) => (OR, "|"),
                    _ => (IFF, "<->"),
                };
                operand(f, a, prec(a) < p)?;
                write!(f, " {op} ")?;
                operand(f, b, prec(b) <= p)
            }
            Formula::Implies(a, b) => {
                operand(f, a, prec(a) <= IMPLIES)?;
                write!(f, " -> ")?;
                operand(f, b, prec(b) < IMPLIES)
            }
            Formula::Forall(x, b) => write!(f, "forall {x}. {b}"),
            Formula::Exists(x, b) => write!(f, "exists {x}. {b}"),
            Formula::ForallPred(p, n, b) => write!(f, "Forall {p}:{n}. {b}"),
            Formula::ExistsPred(p, n, b) => write!(f, "Exists {p}:{n}. {b}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;
    use proptest::prelude::*;

    fn ind() -> impl Strategy<Value = String> {
        prop::sample::select(vec!["x", "y", "z", "x0"]).prop_map(String::from)
    }

    fn formula() -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            (ind(), ind()).prop_map(|(x, y)| Formula::Eq(x, y)),
            ind().prop_map(|x| Formula::App("A".into(), vec![x])),
            (ind(), ind()).prop_map(|(x, y)| Formula::App("R".into(), vec![x, y])),
        ];
        leaf.prop_recursive(5, 40, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.and(b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.or(b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.implies(b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.iff(b)),
                (ind(), inner.clone()).prop_map(|(x, b)| Formula::Forall(x, Box::new(b))),
                (ind(), inner.clone()).prop_map(|(x, b)| Formula::Exists(x, Box::new(b))),
                inner.clone().prop_map(|b| Formula::exists_pred("D", 1, b)),
                inner.prop_map(|b| Formula::forall_pred("E", 2, b)),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(f in formula()) {
            let text = f.to_string();
            prop_assert_eq!(parse(&text).unwrap(), f, "{}", text);
        }
    }

    #[test]
    fn printing_is_minimal_for_common_shapes() {
        let f = parse("(x = x0 -> y = y0) & (!(x = x0) -> y = y0)").unwrap();
        assert_eq!(f.to_string(), "(x = x0 -> y = y0) & (!(x = x0) -> y = y0)");
        let f = parse("forall x. (exists y. A(y)) & A(x)").unwrap();
        assert_eq!(f.to_string(), "forall x. (exists y. A(y)) & A(x)");
        let f = parse("!!A(x)").unwrap();
        assert_eq!(f.to_string(), "!!A(x)");
    }
}
