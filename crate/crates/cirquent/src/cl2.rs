//! A sound and complete prover for the formula-level logic with choice
//! connectives over elementary and general atoms.
//!
//! The elementarization of a formula replaces every surface choice
//! conjunction by `$T`, every surface choice disjunction by `$F`, and every
//! surface general literal — of either polarity — by `$F`.  A formula is
//! stable when its elementarization is a classical tautology.  Proof search
//! runs backward with three rules: a stable formula follows from both
//! resolutions of each of its surface choice conjunctions; any formula
//! follows from a resolution of one of its surface choice disjunctions; and
//! any formula follows from renaming a matched pair of opposite-polarity
//! surface occurrences of a general atom to a fresh elementary atom.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::formula::{
    parse, Atom, AtomSort, Formula, FreshAtoms, OccRef, ParseError, Side, Sign,
};
use crate::inference::Violation;
use crate::semantics::is_tautology_formula;
use crate::{CapExceeded, Caps};

/// Surface subformula occurrences: those not inside a choice connective.
/// Returned in pre-order, i.e. by leftmost position.
fn surface_walk<'a>(
    f: &'a Formula,
    path: &mut OccRef,
    out: &mut Vec<(OccRef, &'a Formula)>,
) {
    out.push((path.clone(), f));
    if let Formula::Conj(a, b) | Formula::Disj(a, b) = f {
        path.push(Side::Left);
        surface_walk(a, path, out);
        path.pop();
        path.push(Side::Right);
        surface_walk(b, path, out);
        path.pop();
    }
}

fn surface_occurrences(f: &Formula) -> Vec<(OccRef, &Formula)> {
    let mut out = Vec::new();
    surface_walk(f, &mut Vec::new(), &mut out);
    out
}

/// Surface choice conjunctions, leftmost first.
pub fn surface_chconjs(f: &Formula) -> Vec<OccRef> {
    surface_occurrences(f)
        .into_iter()
        .filter(|(_, g)| matches!(g, Formula::ChConj(..)))
        .map(|(p, _)| p)
        .collect()
}

/// Surface choice disjunctions, leftmost first.
pub fn surface_chdisjs(f: &Formula) -> Vec<OccRef> {
    surface_occurrences(f)
        .into_iter()
        .filter(|(_, g)| matches!(g, Formula::ChDisj(..)))
        .map(|(p, _)| p)
        .collect()
}

/// Surface general literals, leftmost first.
pub fn surface_general_literals(f: &Formula) -> Vec<(OccRef, Sign, Atom)> {
    surface_occurrences(f)
        .into_iter()
        .filter_map(|(p, g)| match g {
            Formula::Literal(sign, atom) if atom.sort == AtomSort::General => {
                Some((p, *sign, atom.clone()))
            }
            _ => None,
        })
        .collect()
}

/// The elementarization: surface choice conjunctions become `$T`, surface
/// choice disjunctions `$F`, and surface general literals of either
/// polarity `$F`.
pub fn elementarize(f: &Formula) -> Formula {
    match f {
        Formula::Literal(_, atom) if atom.sort == AtomSort::General => {
            Formula::lit(Atom::logical_false())
        }
        Formula::Literal(..) => f.clone(),
        Formula::Conj(a, b) => Formula::conj(elementarize(a), elementarize(b)),
        Formula::Disj(a, b) => Formula::disj(elementarize(a), elementarize(b)),
        Formula::ChConj(..) => Formula::lit(Atom::logical_true()),
        Formula::ChDisj(..) => Formula::lit(Atom::logical_false()),
    }
}

/// Stability: the elementarization is a tautology.  Evaluated directly, 64
/// models of the surface elementary atoms per pass.
pub fn is_stable(f: &Formula, caps: &Caps) -> Result<bool, CapExceeded> {
    let mut atoms = BTreeSet::new();
    surface_elementary_atoms(f, &mut atoms);
    if atoms.len() > caps.max_atoms {
        return Err(CapExceeded {
            what: "distinct atoms",
            limit: caps.max_atoms,
            actual: atoms.len(),
        });
    }
    let index: BTreeMap<&Atom, usize> =
        atoms.iter().enumerate().map(|(k, &a)| (a, k)).collect();
    let n = atoms.len();
    let mask = if n >= 6 { u64::MAX } else { (1u64 << (1usize << n)) - 1 };
    for chunk in 0..1usize << n.saturating_sub(6) {
        if stable_vector(f, &index, chunk) & mask != mask {
            return Ok(false);
        }
    }
    Ok(true)
}

fn surface_elementary_atoms<'a>(f: &'a Formula, out: &mut BTreeSet<&'a Atom>) {
    match f {
        Formula::Literal(_, atom) if atom.sort == AtomSort::Elementary => {
            out.insert(atom);
        }
        Formula::Conj(a, b) | Formula::Disj(a, b) => {
            surface_elementary_atoms(a, out);
            surface_elementary_atoms(b, out);
        }
        _ => {}
    }
}

/// Truth vector of the elementarization over 64 models at once.
fn stable_vector(f: &Formula, index: &BTreeMap<&Atom, usize>, chunk: usize) -> u64 {
    match f {
        Formula::Literal(_, atom) if atom.sort == AtomSort::General => 0,
        Formula::Literal(sign, atom) => {
            let v = match atom.sort {
                AtomSort::LogicalTrue => u64::MAX,
                AtomSort::LogicalFalse => 0,
                _ => {
                    let k = index[atom];
                    if k < 6 {
                        crate::semantics::BIT_PATTERNS[k]
                    } else if chunk >> (k - 6) & 1 == 1 {
                        u64::MAX
                    } else {
                        0
                    }
                }
            };
            match sign {
                Sign::Pos => v,
                Sign::Neg => !v,
            }
        }
        Formula::Conj(a, b) => stable_vector(a, index, chunk) & stable_vector(b, index, chunk),
        Formula::Disj(a, b) => stable_vector(a, index, chunk) | stable_vector(b, index, chunk),
        Formula::ChConj(..) => u64::MAX,
        Formula::ChDisj(..) => 0,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cl2Rule {
    /// The conclusion is stable; one premise per resolution of each surface
    /// choice conjunction, leftmost conjunction first, left side first.
    Wait,
    /// The premise resolves the surface choice disjunction at the path to
    /// its first or second component.
    Choose(OccRef, u8),
    /// The premise renames the matched surface occurrences of a general
    /// atom (positive at the first path, negative at the second) to the
    /// fresh elementary atom.
    Match(OccRef, OccRef, Atom),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cl2Derivation {
    pub conclusion: Formula,
    pub rule: Cl2Rule,
    pub premises: Vec<Cl2Derivation>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Cl2RuleError {
    #[error("the conclusion is not stable")]
    Unstable,
    #[error("no surface choice disjunction at that occurrence")]
    NotChoiceDisjunction,
    #[error("resolution side must be 1 or 2")]
    BadSide,
    #[error("the occurrences are not a surface positive/negative pair of one general atom")]
    BadMatch,
    #[error("the fresh atom must be a new elementary atom")]
    BadFreshAtom,
    #[error(transparent)]
    Cap(#[from] CapExceeded),
}

/// The premises the waiting rule requires below a stable conclusion.
pub fn wait_premises(f: &Formula, caps: &Caps) -> Result<Vec<Formula>, Cl2RuleError> {
    if !is_stable(f, caps)? {
        return Err(Cl2RuleError::Unstable);
    }
    let mut out = Vec::new();
    for path in surface_chconjs(f) {
        let Some(Formula::ChConj(a, b)) = f.subformula(&path) else { unreachable!() };
        let (a, b) = ((**a).clone(), (**b).clone());
        out.push(f.replace_at(&path, a).expect("surface path"));
        out.push(f.replace_at(&path, b).expect("surface path"));
    }
    Ok(out)
}

/// The premise of a choice resolution.
pub fn choose_premise(f: &Formula, path: &[Side], side: u8) -> Result<Formula, Cl2RuleError> {
    if !surface_chdisjs(f).iter().any(|p| p == path) {
        return Err(Cl2RuleError::NotChoiceDisjunction);
    }
    let Some(Formula::ChDisj(a, b)) = f.subformula(path) else { unreachable!() };
    let component = match side {
        1 => (**a).clone(),
        2 => (**b).clone(),
        _ => return Err(Cl2RuleError::BadSide),
    };
    Ok(f.replace_at(path, component).expect("surface path"))
}

/// The premise of a matching step: rename the positive occurrence at
/// `pos_path` and the negative occurrence at `neg_path` of one general atom
/// to the fresh elementary atom.
pub fn match_premise(
    f: &Formula,
    pos_path: &[Side],
    neg_path: &[Side],
    fresh: &Atom,
) -> Result<Formula, Cl2RuleError> {
    if fresh.sort != AtomSort::Elementary || f.atoms().contains(fresh) {
        return Err(Cl2RuleError::BadFreshAtom);
    }
    let surface = surface_general_literals(f);
    let pos = surface.iter().find(|(p, sign, _)| p == pos_path && *sign == Sign::Pos);
    let neg = surface.iter().find(|(p, sign, _)| p == neg_path && *sign == Sign::Neg);
    match (pos, neg) {
        (Some((_, _, a)), Some((_, _, b))) if a == b => {}
        _ => return Err(Cl2RuleError::BadMatch),
    }
    let g = f
        .replace_at(pos_path, Formula::lit(fresh.clone()))
        .expect("surface path");
    Ok(g
        .replace_at(neg_path, Formula::neg_lit(fresh.clone()))
        .expect("surface path"))
}

/// Backward proof search.  Each step removes a choice connective or a pair
/// of general-atom occurrences, so the search terminates; all three rules
/// are tried exhaustively, so it is a decision procedure.
pub fn prove_cl2(f: &Formula, caps: &Caps) -> Result<Option<Cl2Derivation>, CapExceeded> {
    // A provable choice-free formula stays provable under any substitution
    // of its general atoms, so reading those atoms classically it must be a
    // tautology; a failed truth-table check settles the search at once.
    if f.is_classical() {
        match is_tautology_formula(f, caps) {
            Ok(false) => return Ok(None),
            _ => {}
        }
    }
    let mut memo = HashMap::new();
    if !provable(f, caps, &mut memo)? {
        return Ok(None);
    }
    Ok(Some(build(f, caps, &mut memo)?))
}

/// Provability alone, memoized; derivations are rebuilt afterwards along
/// the winning branches only.
fn provable(
    f: &Formula,
    caps: &Caps,
    memo: &mut HashMap<Formula, bool>,
) -> Result<bool, CapExceeded> {
    if let Some(&hit) = memo.get(f) {
        return Ok(hit);
    }
    let mut found = false;
    if is_stable(f, caps)? {
        found = true;
        for g in &wait_premises(f, caps).expect("stable") {
            if !provable(g, caps, memo)? {
                found = false;
                break;
            }
        }
    }
    if !found {
        'choose: for path in surface_chdisjs(f) {
            for side in [1u8, 2] {
                let g = choose_premise(f, &path, side).expect("enumerated occurrence");
                if provable(&g, caps, memo)? {
                    found = true;
                    break 'choose;
                }
            }
        }
    }
    if !found {
        let surface = surface_general_literals(f);
        let fresh = FreshAtoms::avoiding(f.atoms().iter()).elementary();
        'matching: for (pos_path, pos_sign, atom) in &surface {
            if *pos_sign != Sign::Pos {
                continue;
            }
            for (neg_path, neg_sign, other) in &surface {
                if *neg_sign != Sign::Neg || other != atom {
                    continue;
                }
                let g = rename_pair(f, pos_path, neg_path, &fresh);
                if provable(&g, caps, memo)? {
                    found = true;
                    break 'matching;
                }
            }
        }
    }
    memo.insert(f.clone(), found);
    Ok(found)
}

/// [`match_premise`] without revalidating paths the search just enumerated.
fn rename_pair(f: &Formula, pos_path: &[Side], neg_path: &[Side], fresh: &Atom) -> Formula {
    f.replace_at(pos_path, Formula::lit(fresh.clone()))
        .expect("surface path")
        .replace_at(neg_path, Formula::neg_lit(fresh.clone()))
        .expect("surface path")
}

/// Rebuild the first successful derivation of a provable formula, trying
/// the rules in the same order as the search.
fn build(
    f: &Formula,
    caps: &Caps,
    memo: &mut HashMap<Formula, bool>,
) -> Result<Cl2Derivation, CapExceeded> {
    if is_stable(f, caps)? {
        let premise_formulas = wait_premises(f, caps).expect("stable");
        let mut all = true;
        for g in &premise_formulas {
            if !provable(g, caps, memo)? {
                all = false;
                break;
            }
        }
        if all {
            let mut premises = Vec::with_capacity(premise_formulas.len());
            for g in &premise_formulas {
                premises.push(build(g, caps, memo)?);
            }
            return Ok(Cl2Derivation { conclusion: f.clone(), rule: Cl2Rule::Wait, premises });
        }
    }
    for path in surface_chdisjs(f) {
        for side in [1u8, 2] {
            let g = choose_premise(f, &path, side).expect("enumerated occurrence");
            if provable(&g, caps, memo)? {
                return Ok(Cl2Derivation {
                    conclusion: f.clone(),
                    rule: Cl2Rule::Choose(path, side),
                    premises: vec![build(&g, caps, memo)?],
                });
            }
        }
    }
    let surface = surface_general_literals(f);
    let fresh = FreshAtoms::avoiding(f.atoms().iter()).elementary();
    for (pos_path, pos_sign, atom) in &surface {
        if *pos_sign != Sign::Pos {
            continue;
        }
        for (neg_path, neg_sign, other) in &surface {
            if *neg_sign != Sign::Neg || other != atom {
                continue;
            }
            let g = rename_pair(f, pos_path, neg_path, &fresh);
            if provable(&g, caps, memo)? {
                return Ok(Cl2Derivation {
                    conclusion: f.clone(),
                    rule: Cl2Rule::Match(pos_path.clone(), neg_path.clone(), fresh.clone()),
                    premises: vec![build(&g, caps, memo)?],
                });
            }
        }
    }
    unreachable!("formula was decided provable")
}

/// Replay a derivation top-down, checking every step.
pub fn check_cl2_derivation(d: &Cl2Derivation, caps: &Caps) -> Result<(), Vec<Violation>> {
    let mut violations = Vec::new();
    let mut path = Vec::new();
    check_node(d, caps, &mut path, &mut violations);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

fn check_node(
    d: &Cl2Derivation,
    caps: &Caps,
    path: &mut Vec<usize>,
    out: &mut Vec<Violation>,
) {
    let expected: Result<Vec<Formula>, Cl2RuleError> = match &d.rule {
        Cl2Rule::Wait => wait_premises(&d.conclusion, caps),
        Cl2Rule::Choose(occ, side) => {
            choose_premise(&d.conclusion, occ, *side).map(|g| vec![g])
        }
        Cl2Rule::Match(pos, neg, fresh) => {
            match_premise(&d.conclusion, pos, neg, fresh).map(|g| vec![g])
        }
    };
    match expected {
        Ok(expected) => {
            let got: Vec<&Formula> = d.premises.iter().map(|p| &p.conclusion).collect();
            if got.len() != expected.len() || got.iter().zip(&expected).any(|(a, b)| *a != b) {
                out.push(Violation {
                    path: path.clone(),
                    message: format!(
                        "rule {} expects premises [{}], got [{}]",
                        d.rule,
                        expected.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "),
                        got.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "),
                    ),
                });
            }
        }
        Err(e) => out.push(Violation {
            path: path.clone(),
            message: format!("rule {} does not apply: {e}", d.rule),
        }),
    }
    for (k, p) in d.premises.iter().enumerate() {
        path.push(k + 1);
        check_node(p, caps, path, out);
        path.pop();
    }
}

// ---------------------------------------------------------------------------
// Text format.  Occurrence paths print as `-` for the root or a string of
// `l`/`r` steps; the rule tags are RULE_A, RULE_B <path> <1|2>, and
// RULE_C <pos-path> <neg-path> <fresh>.  Since the premises of each rule are
// determined by its conclusion, only the root records its formula, after
// `expect`.

fn path_string(path: &[Side]) -> String {
    if path.is_empty() {
        "-".to_string()
    } else {
        path.iter().map(|s| if *s == Side::Left { 'l' } else { 'r' }).collect()
    }
}

fn parse_path(word: &str) -> Option<OccRef> {
    if word == "-" {
        return Some(Vec::new());
    }
    word.chars()
        .map(|c| match c {
            'l' => Some(Side::Left),
            'r' => Some(Side::Right),
            _ => None,
        })
        .collect()
}

impl fmt::Display for Cl2Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cl2Rule::Wait => write!(f, "RULE_A"),
            Cl2Rule::Choose(occ, side) => write!(f, "RULE_B {} {side}", path_string(occ)),
            Cl2Rule::Match(pos, neg, fresh) => {
                write!(f, "RULE_C {} {} {fresh}", path_string(pos), path_string(neg))
            }
        }
    }
}

pub fn write_cl2_derivation(d: &Cl2Derivation) -> String {
    let mut out = String::new();
    let mut next_id = 1;
    write_node(d, &mut next_id, &mut out, true);
    out
}

fn write_node(d: &Cl2Derivation, next_id: &mut usize, out: &mut String, root: bool) -> usize {
    let premise_ids: Vec<usize> =
        d.premises.iter().map(|p| write_node(p, next_id, out, false)).collect();
    let id = *next_id;
    *next_id += 1;
    out.push_str(&format!("{id}: {}", d.rule));
    if !premise_ids.is_empty() {
        out.push_str(" from");
        for pid in premise_ids {
            out.push_str(&format!(" {pid}"));
        }
    }
    if root {
        out.push_str(&format!(" expect {}", d.conclusion));
    }
    out.push('\n');
    id
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Cl2FileError {
    #[error("line {line}: {err}")]
    Parse { line: usize, err: ParseError },
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("rule at id {id} does not apply: {err}")]
    Rule { id: usize, err: Cl2RuleError },
    #[error("rule at id {id} takes {want} premise(s), got {got}")]
    Arity { id: usize, want: usize, got: usize },
    #[error("the derivation file has no lines")]
    Empty,
    #[error("the root line must carry 'expect <formula>'")]
    NoRootFormula,
}

struct Cl2Line {
    rule: Cl2Rule,
    premise_ids: Vec<usize>,
}

/// Parse and fully validate a derivation file.  Conclusions flow top-down
/// from the root's `expect` formula, since each rule determines its
/// premises from its conclusion.
pub fn parse_cl2_derivation(input: &str, caps: &Caps) -> Result<Cl2Derivation, Cl2FileError> {
    let mut lines: HashMap<usize, Cl2Line> = HashMap::new();
    let mut order: Vec<usize> = Vec::new();
    let mut root_formula = None;
    for (lineno, raw) in input.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let malformed = |msg: &str| Cl2FileError::Malformed { line: lineno, msg: msg.into() };
        let (id, rest) = match line.split_once(':') {
            Some((id_part, rest)) => match id_part.trim().parse::<usize>() {
                Ok(id) => (id, rest.trim()),
                Err(_) => return Err(malformed("expected '<id>:'")),
            },
            None => return Err(malformed("expected '<id>:'")),
        };
        let (head, expect) = match rest.split_once("expect") {
            Some((head, tail)) => (head.trim(), Some(tail.trim())),
            None => (rest, None),
        };
        let mut words = head.split_whitespace();
        let tag = words.next().ok_or_else(|| malformed("expected rule tag"))?;
        let path_arg = |words: &mut dyn Iterator<Item = &str>| {
            words
                .next()
                .and_then(parse_path)
                .ok_or_else(|| Cl2FileError::Malformed {
                    line: lineno,
                    msg: "expected an occurrence path ('-' or l/r steps)".into(),
                })
        };
        let rule = match tag {
            "RULE_A" => Cl2Rule::Wait,
            "RULE_B" => {
                let path = path_arg(&mut words)?;
                let side = words
                    .next()
                    .and_then(|w| w.parse::<u8>().ok())
                    .ok_or_else(|| malformed("expected a resolution side"))?;
                Cl2Rule::Choose(path, side)
            }
            "RULE_C" => {
                let pos = path_arg(&mut words)?;
                let neg = path_arg(&mut words)?;
                let fresh = words.next().ok_or_else(|| malformed("expected a fresh atom"))?;
                if !fresh.chars().next().is_some_and(|c| c.is_ascii_lowercase() || c == '_')
                {
                    return Err(malformed("the fresh atom must be elementary"));
                }
                Cl2Rule::Match(pos, neg, Atom::elementary(fresh))
            }
            other => return Err(malformed(&format!("unknown rule tag {other:?}"))),
        };
        let mut premise_ids = Vec::new();
        match words.next() {
            None => {}
            Some("from") => {
                for w in words {
                    let n: usize = w
                        .parse()
                        .map_err(|_| malformed("expected a premise id after 'from'"))?;
                    if !order.contains(&n) {
                        return Err(malformed(&format!("premise id {n} not defined yet")));
                    }
                    premise_ids.push(n);
                }
                if premise_ids.is_empty() {
                    return Err(malformed("'from' requires at least one premise id"));
                }
            }
            Some(w) => return Err(malformed(&format!("unexpected {w:?}"))),
        }
        if let Some(text) = expect {
            root_formula =
                Some(parse(text).map_err(|err| Cl2FileError::Parse { line: lineno, err })?);
        }
        lines.insert(id, Cl2Line { rule, premise_ids });
        order.push(id);
    }
    let root = *order.last().ok_or(Cl2FileError::Empty)?;
    let formula = root_formula.ok_or(Cl2FileError::NoRootFormula)?;
    resolve(root, formula, &lines, caps)
}

fn resolve(
    id: usize,
    conclusion: Formula,
    lines: &HashMap<usize, Cl2Line>,
    caps: &Caps,
) -> Result<Cl2Derivation, Cl2FileError> {
    let line = &lines[&id];
    let premise_formulas = match &line.rule {
        Cl2Rule::Wait => wait_premises(&conclusion, caps),
        Cl2Rule::Choose(occ, side) => choose_premise(&conclusion, occ, *side).map(|g| vec![g]),
        Cl2Rule::Match(pos, neg, fresh) => {
            match_premise(&conclusion, pos, neg, fresh).map(|g| vec![g])
        }
    }
    .map_err(|err| Cl2FileError::Rule { id, err })?;
    if premise_formulas.len() != line.premise_ids.len() {
        return Err(Cl2FileError::Arity {
            id,
            want: premise_formulas.len(),
            got: line.premise_ids.len(),
        });
    }
    let premises = premise_formulas
        .into_iter()
        .zip(&line.premise_ids)
        .map(|(g, &pid)| resolve(pid, g, lines, caps))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Cl2Derivation { conclusion, rule: line.rule.clone(), premises })
}
