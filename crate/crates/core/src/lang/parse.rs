//! Recursive-descent parser.
//!
//! Precedence, tightest first: `!`, `&`, `|`, `->` (right-associative),
//! `<->`. Quantifier bodies extend as far right as possible. `#` starts a
//! comment running to the end of the line. Quantifier keywords may be
//! written in either case; the bound name decides whether the quantifier is
//! first-order (`x`) or second-order (`D:1`).

use super::{Formula, LangError};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(usize),
    Dot,
    Comma,
    Colon,
    LParen,
    RParen,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Equals,
    Semi,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, LangError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut push = |tok: Tok, len: usize, i: &mut usize, col: &mut usize| {
            out.push(Spanned { tok, line: l0, col: c0 });
            *i += len;
            *col += len;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '.' => push(Tok::Dot, 1, &mut i, &mut col),
            ',' => push(Tok::Comma, 1, &mut i, &mut col),
            ':' => push(Tok::Colon, 1, &mut i, &mut col),
            '(' => push(Tok::LParen, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            '!' => push(Tok::Not, 1, &mut i, &mut col),
            '&' => push(Tok::And, 1, &mut i, &mut col),
            '|' => push(Tok::Or, 1, &mut i, &mut col),
            '=' => push(Tok::Equals, 1, &mut i, &mut col),
            ';' => push(Tok::Semi, 1, &mut i, &mut col),
            '-' if chars.get(i + 1) == Some(&'>') => push(Tok::Implies, 2, &mut i, &mut col),
            '<' if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') => {
                push(Tok::Iff, 3, &mut i, &mut col)
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let n = s.parse().map_err(|_| syntax(l0, c0, "number too large"))?;
                out.push(Spanned { tok: Tok::Num(n), line: l0, col: c0 });
                col += i - start;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Spanned { tok: Tok::Ident(chars[start..i].iter().collect()), line: l0, col: c0 });
                col += i - start;
            }
            other => return Err(syntax(l0, c0, &format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

fn syntax(line: usize, col: usize, msg: &str) -> LangError {
    LangError::Syntax { line, col, msg: msg.to_string() }
}

const KEYWORDS: [&str; 4] = ["forall", "exists", "Forall", "Exists"];

fn is_ind_name(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_lowercase() || c == '_') && !KEYWORDS.contains(&s)
}

fn is_pred_name(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_uppercase()) && !KEYWORDS.contains(&s)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
    /// Enclosing predicate binders, innermost last.
    scope: Vec<(String, usize)>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map(|s| (s.line, s.col)).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: &str) -> Result<T, LangError> {
        let (l, c) = self.here();
        Err(syntax(l, c, msg))
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), LangError> {
        if self.eat(&t) {
            Ok(())
        } else {
            self.err(&format!("expected {what}"))
        }
    }

    fn ident(&mut self) -> Option<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Some(s)
            }
            _ => None,
        }
    }

    fn ind_var(&mut self) -> Result<String, LangError> {
        match self.peek() {
            Some(Tok::Ident(s)) if is_ind_name(s) => Ok(self.ident().unwrap()),
            _ => self.err("expected an individual variable"),
        }
    }

    fn iff(&mut self) -> Result<Formula, LangError> {
        let mut lhs = self.implication()?;
        while self.eat(&Tok::Iff) {
            let rhs = self.implication()?;
            lhs = lhs.iff(rhs);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, LangError> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Implies) {
            let rhs = self.implication()?;
            return Ok(lhs.implies(rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, LangError> {
        let mut lhs = self.conjunction()?;
        while self.eat(&Tok::Or) {
            let rhs = self.conjunction()?;
            lhs = lhs.or(rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, LangError> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::And) {
            let rhs = self.unary()?;
            lhs = lhs.and(rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, LangError> {
        match self.peek() {
            Some(Tok::Not) => {
                self.pos += 1;
                Ok(self.unary()?.not())
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.iff()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(Tok::Ident(s)) => match s.as_str() {
                "forall" | "exists" | "Forall" | "Exists" => {
                    let universal = s.eq_ignore_ascii_case("forall");
                    self.pos += 1;
                    match self.peek() {
                        Some(Tok::Ident(v)) if is_pred_name(v) => self.pred_quantifier(universal),
                        _ => {
                            let x = self.ind_var()?;
                            self.expect(Tok::Dot, "`.` after bound variable")?;
                            let body = self.iff()?;
                            Ok(if universal { Formula::forall(&x, body) } else { Formula::exists(&x, body) })
                        }
                    }
                }
                s if is_pred_name(s) => self.application(),
                s if is_ind_name(s) => {
                    let x = self.ident().unwrap();
                    self.expect(Tok::Equals, "`=`")?;
                    let y = self.ind_var()?;
                    Ok(Formula::Eq(x, y))
                }
                _ => self.err("unexpected identifier"),
            },
            Some(_) => self.err("expected a formula"),
            None => self.err("unexpected end of input"),
        }
    }

    fn pred_quantifier(&mut self, universal: bool) -> Result<Formula, LangError> {
        let p = self.ident().unwrap();
        self.expect(Tok::Colon, "`:` and an arity after predicate variable")?;
        let arity = match self.peek() {
            Some(Tok::Num(n)) if *n >= 1 => *n,
            _ => return self.err("expected an arity >= 1"),
        };
        self.pos += 1;
        self.expect(Tok::Dot, "`.` after binder")?;
        self.scope.push((p.clone(), arity));
        let body = self.iff();
        self.scope.pop();
        let body = body?;
        Ok(if universal { Formula::forall_pred(&p, arity, body) } else { Formula::exists_pred(&p, arity, body) })
    }

    fn application(&mut self) -> Result<Formula, LangError> {
        let (line, col) = self.here();
        let p = self.ident().unwrap();
        self.expect(Tok::LParen, "`(` after predicate variable")?;
        let mut args = vec![self.ind_var()?];
        while self.eat(&Tok::Comma) {
            args.push(self.ind_var()?);
        }
        self.expect(Tok::RParen, "`)`")?;
        if let Some((_, ar)) = self.scope.iter().rev().find(|(n, _)| *n == p) {
            if *ar != args.len() {
                return Err(LangError::Syntax {
                    line,
                    col,
                    msg: format!("{p} declared with arity {ar} but applied to {} arguments", args.len()),
                });
            }
        }
        Ok(Formula::App(p, args))
    }
}

fn parser_for(text: &str) -> Result<Parser, LangError> {
    let toks = lex(text)?;
    let lines: Vec<&str> = text.split('\n').collect();
    let end = (lines.len(), lines.last().map_or(0, |l| l.chars().count()) + 1);
    Ok(Parser { toks, pos: 0, end, scope: Vec::new() })
}

/// Parse a single formula.
pub fn parse(text: &str) -> Result<Formula, LangError> {
    let mut p = parser_for(text)?;
    let f = p.iff()?;
    p.eat(&Tok::Semi);
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    f.check()?;
    Ok(f)
}

/// Parse a `;`-separated corpus; empty entries are skipped.
pub fn parse_corpus(text: &str) -> Result<Vec<Formula>, LangError> {
    let mut p = parser_for(text)?;
    let mut out = Vec::new();
    while p.pos < p.toks.len() {
        if p.eat(&Tok::Semi) {
            continue;
        }
        let f = p.iff()?;
        f.check()?;
        out.push(f);
        if p.pos < p.toks.len() {
            p.expect(Tok::Semi, "`;` between formulas")?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_forms() {
        assert_eq!(parse("x = x").unwrap(), Formula::eq("x", "x"));
        assert_eq!(
            parse("forall x. exists D:1. D(x)").unwrap(),
            Formula::forall("x", Formula::exists_pred("D", 1, Formula::app("D", &["x"])))
        );
    }

    #[test]
    fn precedence_and_associativity() {
        let a = || Formula::app("A", &["x"]);
        let b = || Formula::app("B", &["x"]);
        let c = || Formula::app("C", &["x"]);
        assert_eq!(parse("!A(x) & B(x)").unwrap(), a().not().and(b()));
        assert_eq!(parse("A(x) | B(x) & C(x)").unwrap(), a().or(b().and(c())));
        assert_eq!(parse("A(x) -> B(x) -> C(x)").unwrap(), a().implies(b().implies(c())));
        assert_eq!(parse("A(x) <-> B(x) <-> C(x)").unwrap(), a().iff(b()).iff(c()));
        assert_eq!(parse("A(x) & B(x) & C(x)").unwrap(), a().and(b()).and(c()));
        assert_eq!(parse("A(x) -> B(x) <-> C(x)").unwrap(), a().implies(b()).iff(c()));
        assert_eq!(
            parse("forall x. A(x) & B(x)").unwrap(),
            Formula::forall("x", a().and(b()))
        );
    }

    #[test]
    fn swap_formula_shape() {
        let f = parse(
            "(x = x0 -> y = y0) & (!(x = x0) -> \
             ((!(y0 = x0) & !(y0 = x)) -> y = y0) & (y0 = x0 -> y = x) & (y0 = x -> y = x0))",
        )
        .unwrap();
        let Formula::And(first, second) = f else { panic!("not a conjunction") };
        assert_eq!(*first, Formula::eq("x", "x0").implies(Formula::eq("y", "y0")));
        let Formula::Implies(guard, cases) = *second else { panic!("second conjunct") };
        assert_eq!(*guard, Formula::eq("x", "x0").not());
        assert!(matches!(*cases, Formula::And(..)));
    }

    #[test]
    fn errors_carry_locations() {
        match parse("forall x.\n  (x = )") {
            Err(LangError::Syntax { line, col, .. }) => assert_eq!((line, col), (2, 8)),
            other => panic!("{other:?}"),
        }
        match parse("x = y z") {
            Err(LangError::Syntax { line, col, .. }) => assert_eq!((line, col), (1, 7)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("x $ y"), Err(LangError::Syntax { .. })));
        assert!(parse("").is_err());
    }

    #[test]
    fn arity_errors() {
        match parse("Exists D:1. D(x, y)") {
            Err(LangError::Syntax { msg, .. }) => assert!(msg.contains("arity 1")),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("A(x) & A(x, y)"), Err(LangError::Arity { .. })));
        assert!(parse("Exists D:0. x = x").is_err());
    }

    #[test]
    fn corpus_and_comments() {
        let c = parse_corpus("# header\nx = x;\n forall y. y = y ; ;\n").unwrap();
        assert_eq!(c.len(), 2);
        assert!(parse_corpus("x = x y = y").is_err());
    }
}
