//! Classical semantics for choice-free formulas and cirquents.
//!
//! Two evaluation modes: under a model (one bit per atom) and under a
//! situation (one bit per literal occurrence).  An ogroup is true when some
//! member oformula is true; a cirquent is true when every ogroup is true.
//! So an empty ogroup is never true and the cirquent with no ogroups is
//! always true.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::cirquent::Cirquent;
use crate::formula::{Atom, AtomSort, Formula, FreshAtoms, Sign, Substitution};
use crate::{CapExceeded, Caps};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("atom {0} has no value in the model")]
    UnassignedAtom(Atom),
    #[error("choice connectives have no classical truth value")]
    ChoiceConnective,
    #[error("situation has {got} bits but the object has {want} oatoms")]
    BitCount { want: usize, got: usize },
    #[error(transparent)]
    Cap(#[from] CapExceeded),
}

/// Assignment of truth values to nonlogical atoms.  `$T` and `$F` are fixed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Model {
    map: BTreeMap<Atom, bool>,
}

impl Model {
    pub fn new() -> Model {
        Model::default()
    }

    pub fn set(&mut self, atom: Atom, value: bool) {
        self.map.insert(atom, value);
    }

    pub fn value(&self, atom: &Atom) -> Result<bool, EvalError> {
        match atom.sort {
            AtomSort::LogicalTrue => Ok(true),
            AtomSort::LogicalFalse => Ok(false),
            _ => self
                .map
                .get(atom)
                .copied()
                .ok_or_else(|| EvalError::UnassignedAtom(atom.clone())),
        }
    }
}

pub fn eval_formula(f: &Formula, m: &Model) -> Result<bool, EvalError> {
    match f {
        Formula::Literal(sign, atom) => {
            let v = m.value(atom)?;
            Ok(match sign {
                Sign::Pos => v,
                Sign::Neg => !v,
            })
        }
        Formula::Conj(a, b) => Ok(eval_formula(a, m)? && eval_formula(b, m)?),
        Formula::Disj(a, b) => Ok(eval_formula(a, m)? || eval_formula(b, m)?),
        Formula::ChConj(..) | Formula::ChDisj(..) => Err(EvalError::ChoiceConnective),
    }
}

pub fn eval_cirquent(c: &Cirquent, m: &Model) -> Result<bool, EvalError> {
    let mut truths = Vec::with_capacity(c.pool().len());
    for f in c.pool() {
        truths.push(eval_formula(f, m)?);
    }
    Ok(c.structure()
        .iter()
        .all(|g| g.members().any(|i| truths[i - 1])))
}

/// Occurrence-level truth: one bit per literal occurrence, in left-to-right
/// order.  The bits of logical-atom occurrences are ignored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Situation(pub Vec<bool>);

fn eval_formula_situation(f: &Formula, bits: &[bool], next: &mut usize) -> Result<bool, EvalError> {
    match f {
        Formula::Literal(sign, atom) => {
            let bit = *bits
                .get(*next)
                .ok_or(EvalError::BitCount { want: *next + 1, got: bits.len() })?;
            *next += 1;
            Ok(match atom.sort {
                AtomSort::LogicalTrue => true,
                AtomSort::LogicalFalse => false,
                _ => match sign {
                    Sign::Pos => bit,
                    Sign::Neg => !bit,
                },
            })
        }
        Formula::Conj(a, b) => {
            let x = eval_formula_situation(a, bits, next)?;
            let y = eval_formula_situation(b, bits, next)?;
            Ok(x && y)
        }
        Formula::Disj(a, b) => {
            let x = eval_formula_situation(a, bits, next)?;
            let y = eval_formula_situation(b, bits, next)?;
            Ok(x || y)
        }
        Formula::ChConj(..) | Formula::ChDisj(..) => Err(EvalError::ChoiceConnective),
    }
}

pub fn eval_formula_in_situation(f: &Formula, s: &Situation) -> Result<bool, EvalError> {
    let mut next = 0;
    let v = eval_formula_situation(f, &s.0, &mut next)?;
    if next != s.0.len() {
        return Err(EvalError::BitCount { want: next, got: s.0.len() });
    }
    Ok(v)
}

pub fn eval_cirquent_in_situation(c: &Cirquent, s: &Situation) -> Result<bool, EvalError> {
    let mut next = 0;
    let mut truths = Vec::with_capacity(c.pool().len());
    for f in c.pool() {
        truths.push(eval_formula_situation(f, &s.0, &mut next)?);
    }
    if next != s.0.len() {
        return Err(EvalError::BitCount { want: next, got: s.0.len() });
    }
    Ok(c.structure()
        .iter()
        .all(|g| g.members().any(|i| truths[i - 1])))
}

/// Brute-force model enumeration over the distinct nonlogical atoms.
pub fn is_tautology(c: &Cirquent, caps: &Caps) -> Result<bool, EvalError> {
    let atoms: Vec<Atom> = c.atoms().into_iter().filter(|a| !a.is_logical()).collect();
    if atoms.len() > caps.max_atoms {
        return Err(CapExceeded {
            what: "distinct atoms",
            limit: caps.max_atoms,
            actual: atoms.len(),
        }
        .into());
    }
    // 64 models per pass: bit b of a truth vector is the value in the
    // model numbered (chunk << 6) | b.
    let index: BTreeMap<&Atom, usize> = atoms.iter().enumerate().map(|(k, a)| (a, k)).collect();
    let n = atoms.len();
    let mask = if n >= 6 { u64::MAX } else { (1u64 << (1usize << n)) - 1 };
    let mut vectors = Vec::with_capacity(c.pool().len());
    for chunk in 0..1usize << n.saturating_sub(6) {
        vectors.clear();
        for f in c.pool() {
            vectors.push(truth_vector(f, &index, chunk)?);
        }
        let all_true = c.structure().iter().all(|g| {
            g.members().fold(0u64, |acc, i| acc | vectors[i - 1]) & mask == mask
        });
        if !all_true {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Bit b of pattern k is bit k of the model number b.
pub(crate) const BIT_PATTERNS: [u64; 6] = [
    0xaaaa_aaaa_aaaa_aaaa,
    0xcccc_cccc_cccc_cccc,
    0xf0f0_f0f0_f0f0_f0f0,
    0xff00_ff00_ff00_ff00,
    0xffff_0000_ffff_0000,
    0xffff_ffff_0000_0000,
];

fn truth_vector(
    f: &Formula,
    index: &BTreeMap<&Atom, usize>,
    chunk: usize,
) -> Result<u64, EvalError> {
    match f {
        Formula::Literal(sign, atom) => {
            let v = match atom.sort {
                AtomSort::LogicalTrue => u64::MAX,
                AtomSort::LogicalFalse => 0,
                _ => {
                    let k = index[atom];
                    if k < 6 {
                        BIT_PATTERNS[k]
                    } else if chunk >> (k - 6) & 1 == 1 {
                        u64::MAX
                    } else {
                        0
                    }
                }
            };
            Ok(match sign {
                Sign::Pos => v,
                Sign::Neg => !v,
            })
        }
        Formula::Conj(a, b) => Ok(truth_vector(a, index, chunk)? & truth_vector(b, index, chunk)?),
        Formula::Disj(a, b) => Ok(truth_vector(a, index, chunk)? | truth_vector(b, index, chunk)?),
        Formula::ChConj(..) | Formula::ChDisj(..) => Err(EvalError::ChoiceConnective),
    }
}

/// Truth of the cirquent in every situation over its `n` oatoms, 64 rows
/// per word: bit b of word w is the value in the situation whose index
/// (first occurrence = highest bit) is `(w << 6) | b`.
pub(crate) fn situation_table_chunks(c: &Cirquent, n: usize) -> Result<Vec<u64>, EvalError> {
    let words = 1usize << n.saturating_sub(6);
    let mut out = Vec::with_capacity(words);
    let mut vectors = Vec::with_capacity(c.pool().len());
    for chunk in 0..words {
        vectors.clear();
        let mut next = 0;
        for f in c.pool() {
            vectors.push(situation_vector(f, n, chunk, &mut next)?);
        }
        debug_assert_eq!(next, n);
        out.push(c.structure().iter().fold(u64::MAX, |acc, g| {
            acc & g.members().fold(0u64, |a, i| a | vectors[i - 1])
        }));
    }
    Ok(out)
}

/// As [`situation_table_chunks`] for a lone formula.
pub(crate) fn situation_formula_chunks(f: &Formula, n: usize) -> Result<Vec<u64>, EvalError> {
    let words = 1usize << n.saturating_sub(6);
    let mut out = Vec::with_capacity(words);
    for chunk in 0..words {
        let mut next = 0;
        out.push(situation_vector(f, n, chunk, &mut next)?);
        debug_assert_eq!(next, n);
    }
    Ok(out)
}

fn situation_vector(
    f: &Formula,
    n: usize,
    chunk: usize,
    next: &mut usize,
) -> Result<u64, EvalError> {
    match f {
        Formula::Literal(sign, atom) => {
            let k = n - 1 - *next;
            *next += 1;
            let bit = if k < 6 {
                BIT_PATTERNS[k]
            } else if chunk >> (k - 6) & 1 == 1 {
                u64::MAX
            } else {
                0
            };
            Ok(match atom.sort {
                AtomSort::LogicalTrue => u64::MAX,
                AtomSort::LogicalFalse => 0,
                _ => match sign {
                    Sign::Pos => bit,
                    Sign::Neg => !bit,
                },
            })
        }
        Formula::Conj(a, b) => {
            let x = situation_vector(a, n, chunk, next)?;
            let y = situation_vector(b, n, chunk, next)?;
            Ok(x & y)
        }
        Formula::Disj(a, b) => {
            let x = situation_vector(a, n, chunk, next)?;
            let y = situation_vector(b, n, chunk, next)?;
            Ok(x | y)
        }
        Formula::ChConj(..) | Formula::ChDisj(..) => Err(EvalError::ChoiceConnective),
    }
}

pub fn is_tautology_formula(f: &Formula, caps: &Caps) -> Result<bool, EvalError> {
    is_tautology(&Cirquent::singleton(f.clone()), caps)
}

/// Occurrence counts per nonlogical atom decide the binarity class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Binarity {
    NotBinary,
    /// No atom occurs more than twice.
    Binary,
    /// Binary, and every twice-occurring atom has one positive and one
    /// negative occurrence.
    NormalBinary,
}

pub fn binarity(c: &Cirquent) -> Binarity {
    let mut counts: BTreeMap<Atom, (usize, usize)> = BTreeMap::new();
    for (_, _, sign, atom) in c.oliterals() {
        if atom.is_logical() {
            continue;
        }
        let entry = counts.entry(atom).or_insert((0, 0));
        match sign {
            Sign::Pos => entry.0 += 1,
            Sign::Neg => entry.1 += 1,
        }
    }
    let mut normal = true;
    for (pos, neg) in counts.values() {
        match pos + neg {
            0 | 1 => {}
            2 => {
                if !(*pos == 1 && *neg == 1) {
                    normal = false;
                }
            }
            _ => return Binarity::NotBinary,
        }
    }
    if normal {
        Binarity::NormalBinary
    } else {
        Binarity::Binary
    }
}

/// Turn a binary cirquent into a normal binary one by renaming the second
/// of two same-sign occurrences of an atom to a fresh atom.  Returns the
/// normal binary cirquent `d` and a substitution with `sub.apply(d) == c`
/// oformula-wise.
pub fn normalize_binary(c: &Cirquent) -> Option<(Cirquent, Substitution)> {
    if binarity(c) == Binarity::NotBinary {
        return None;
    }
    let all_atoms = c.atoms();
    let mut fresh = FreshAtoms::avoiding(all_atoms.iter());
    let mut sub = Substitution::new();
    let mut seen: BTreeMap<Atom, Sign> = BTreeMap::new();
    let mut pool = c.pool().to_vec();
    for (m, path, sign, atom) in c.oliterals() {
        if atom.is_logical() {
            continue;
        }
        match seen.get(&atom) {
            None => {
                seen.insert(atom, sign);
            }
            Some(first_sign) if *first_sign != sign => {}
            Some(_) => {
                // second same-sign occurrence: rename it
                let replacement = match atom.sort {
                    AtomSort::Elementary => fresh.elementary(),
                    _ => fresh.general(),
                };
                sub.bind(replacement.clone(), Formula::lit(atom.clone()));
                let new_lit = Formula::Literal(sign, replacement);
                pool[m - 1] = pool[m - 1].replace_at(&path, new_lit).expect("valid path");
            }
        }
    }
    let d = Cirquent::new(pool, c.structure().to_vec()).expect("pool length unchanged");
    debug_assert_eq!(&d.apply_substitution(&sub), c);
    Some((d, sub))
}
