use std::fmt::Write as _;
use std::path::Path;

use henkin_core::choicewit::ChoiceError;
use henkin_core::corpus;
use henkin_core::indep::IndepError;
use henkin_core::naive::{finite_eval, window_eval, NaiveError};
use henkin_core::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::Common;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: LangError },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Naive(#[from] NaiveError),
    #[error(transparent)]
    Choice(#[from] ChoiceError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Choice(ChoiceError::Eval(_) | ChoiceError::Lang(_) | ChoiceError::Atom(_)) => 2,
            CliError::Choice(_) => 1,
            _ => 2,
        }
    }
}

/// A JSON report, its text summary, and whether the run confirmed its claim.
pub struct Outcome {
    pub json: Value,
    pub summary: String,
    pub confirmed: bool,
}

fn read_corpus(path: &Path) -> Result<Vec<Formula>, CliError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: shown.clone(), source })?;
    let formulas = parse_corpus(&text).map_err(|source| CliError::Parse { path: shown.clone(), source })?;
    if formulas.is_empty() {
        return Err(CliError::Usage(format!("{shown}: no formulas")));
    }
    Ok(formulas)
}

fn parse_atom(text: &str) -> Result<Atom, CliError> {
    let bad = || CliError::Usage(format!("bad atom `{text}` (expected sort:index)"));
    let (s, i) = text.trim().split_once(':').ok_or_else(bad)?;
    Ok(Atom::new(s.parse().map_err(|_| bad())?, i.parse().map_err(|_| bad())?))
}

fn assignment(common: &Common) -> Result<Assignment, CliError> {
    let st = common.structure;
    let mut f = Assignment::new();
    for b in &common.binds {
        let (name, value) = b.split_once('=').ok_or_else(|| CliError::Usage(format!("bad binding `{b}`")))?;
        let atoms = value.split(',').filter(|s| !s.trim().is_empty()).map(parse_atom).collect::<Result<Vec<_>, _>>()?;
        for a in &atoms {
            st.check_atom(a).map_err(|e| CliError::Usage(e.to_string()))?;
        }
        if name.starts_with(|c: char| c.is_ascii_uppercase()) {
            let pred = OrbitPredicate::finite_set(st, atoms).map_err(|e| CliError::Usage(e.to_string()))?;
            f.bind_pred(name, pred);
        } else {
            let [a] = atoms[..] else {
                return Err(CliError::Usage(format!("`{name}` needs exactly one atom")));
            };
            f.bind_ind(name, a);
        }
    }
    Ok(f)
}

fn config(common: &Common) -> EvalConfig {
    EvalConfig::new(common.structure).with_budget(common.budget).with_max_candidates(common.max_candidates)
}

pub fn eval(common: &Common, path: &Path) -> Result<Outcome, CliError> {
    let cfg = config(common);
    let f = assignment(common)?;
    let mut results = Vec::new();
    let mut summary = String::new();
    for phi in read_corpus(path)? {
        let r = henkin_core::eval(&phi, &f, &cfg)?;
        let flag = if r.budget_limited { " (budget-limited)" } else { "" };
        writeln!(summary, "{}{flag}: {phi}", r.value).unwrap();
        results.push(json!({"formula": phi.to_string(), "value": r.value, "budgetLimited": r.budget_limited}));
    }
    let json = json!({"structure": cfg.structure, "budget": cfg.budget, "results": results});
    Ok(Outcome { json, summary, confirmed: true })
}

pub fn choice_witness(common: &Common, path: &Path) -> Result<Outcome, CliError> {
    let [h] = &read_corpus(path)?[..] else {
        return Err(CliError::Usage(format!("{}: expected exactly one formula H(x, D)", path.display())));
    };
    let cfg = config(common);
    let w = build_sigma(h, &assignment(common)?, &cfg)?;
    let json = serde_json::to_value(w.to_json()).expect("certificate serializes");
    let summary = format!(
        "choice predicate for {h} on {}: {} blocks, support of {} atoms, consequent verified{}\n",
        cfg.structure,
        w.per_block.len(),
        w.defining_support.len(),
        if w.verification.budget_limited { " (budget-limited)" } else { "" },
    );
    Ok(Outcome { json, summary, confirmed: true })
}

fn report_outcome(report: RefutationReport, list_limit: usize) -> Outcome {
    let confirmed = report.confirmed();
    let summary = format!(
        "{}: {} candidates, {} accepted, {} refutations ({} failed replay)\n",
        report.claim,
        report.candidates,
        report.accepted,
        report.refutations.len(),
        report.replay_failures
    );
    let total = report.refutations.len();
    let mut json = serde_json::to_value(report).expect("report serializes");
    if let Some(list) = json["refutations"].as_array_mut() {
        list.truncate(list_limit);
    }
    json["refutationsListed"] = json!(total.min(list_limit));
    Outcome { json, summary, confirmed }
}

fn indep_error(e: IndepError) -> CliError {
    CliError::Usage(e.to_string())
}

pub fn refute_tr(k: u32, support_bound: usize, list_limit: usize) -> Result<Outcome, CliError> {
    Ok(report_outcome(refute_tr1(k, support_bound).map_err(indep_error)?, list_limit))
}

pub fn refute_wo(support_bound: usize, list_limit: usize) -> Result<Outcome, CliError> {
    Ok(report_outcome(refute_wo1(support_bound).map_err(indep_error)?, list_limit))
}

fn random_transposition(rng: &mut ChaCha8Rng, st: &Structure, fixed: &SupportSet) -> Option<FinitePermutation> {
    let limit = fixed.max_index().unwrap_or(0) + 8;
    for _ in 0..64 {
        let sort = rng.gen_range(1..=st.sorts());
        let (lo, hi) = match st.finite_domain() {
            Some(dom) => (1, dom.len() as u32 + 1),
            None => (0, limit),
        };
        let a = Atom::new(sort, rng.gen_range(lo..hi));
        let b = Atom::new(sort, rng.gen_range(lo..hi));
        if a != b && !fixed.contains(&a) && !fixed.contains(&b) {
            return FinitePermutation::transposition(a, b).ok();
        }
    }
    None
}

pub fn oracle_check(common: &Common, path: Option<&Path>, trials: usize, seed: u64) -> Result<Outcome, CliError> {
    let formulas = match path {
        Some(p) => read_corpus(p)?,
        None => corpus::sentences(),
    };
    let cfg = config(common);
    let st = cfg.structure;
    let f = assignment(common)?;
    let mut rng: ChaCha8Rng = rand::SeedableRng::seed_from_u64(seed);
    let (mut checked, mut skipped, mut equivariance) = (0, 0, 0);
    let mut mismatches = Vec::new();
    for phi in &formulas {
        let got = henkin_core::eval(phi, &f, &cfg)?;
        let oracle = if st.is_finite() {
            Some(finite_eval(phi, &f, &st)?)
        } else if !phi.has_second_order_quantifier() {
            Some(window_eval(phi, &f, &st)?)
        } else {
            None
        };
        match oracle {
            Some(want) => {
                checked += 1;
                if got.value != want || got.budget_limited {
                    mismatches.push(json!({"formula": phi.to_string(), "kind": "oracle", "eval": got, "oracle": want}));
                }
            }
            None => skipped += 1,
        }
        let fixed = stabilizer_of(phi, &f)?;
        for _ in 0..trials {
            let Some(pi) = random_transposition(&mut rng, &st, &fixed) else { break };
            let moved = henkin_core::eval(phi, &f.permuted(&pi), &cfg)?;
            equivariance += 1;
            if moved.value != got.value {
                mismatches.push(json!({"formula": phi.to_string(), "kind": "equivariance", "perm": pi, "eval": got, "permuted": moved}));
            }
        }
    }
    let summary = format!(
        "oracle check on {st}: {checked} compared, {skipped} skipped, {equivariance} permuted runs, {} mismatches\n",
        mismatches.len()
    );
    let confirmed = mismatches.is_empty();
    let json = json!({
        "structure": st,
        "budget": cfg.budget,
        "seed": seed,
        "checked": checked,
        "skipped": skipped,
        "equivarianceRuns": equivariance,
        "mismatches": mismatches,
    });
    Ok(Outcome { json, summary, confirmed })
}
