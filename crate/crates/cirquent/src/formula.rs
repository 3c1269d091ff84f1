//! Formulas in negation normal form over three sorts of atoms:
//! general (uppercase), elementary nonlogical (lowercase), and the logical
//! constants `$T` / `$F`.  Negation exists only on atoms; `negate` pushes it
//! inward through the connectives.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AtomSort {
    General,
    Elementary,
    LogicalTrue,
    LogicalFalse,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub name: String,
    pub sort: AtomSort,
}

impl Atom {
    pub fn general(name: impl Into<String>) -> Atom {
        Atom { name: name.into(), sort: AtomSort::General }
    }

    pub fn elementary(name: impl Into<String>) -> Atom {
        Atom { name: name.into(), sort: AtomSort::Elementary }
    }

    pub fn logical_true() -> Atom {
        Atom { name: "$T".into(), sort: AtomSort::LogicalTrue }
    }

    pub fn logical_false() -> Atom {
        Atom { name: "$F".into(), sort: AtomSort::LogicalFalse }
    }

    pub fn is_logical(&self) -> bool {
        matches!(self.sort, AtomSort::LogicalTrue | AtomSort::LogicalFalse)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }
}

/// Formula in negation normal form.  Literals on the logical atoms are
/// always positive: negating `$T` yields the `$F` literal and vice versa.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Literal(Sign, Atom),
    /// Parallel conjunction, `&`.
    Conj(Box<Formula>, Box<Formula>),
    /// Parallel disjunction, `|`.
    Disj(Box<Formula>, Box<Formula>),
    /// Choice conjunction, `*`.
    ChConj(Box<Formula>, Box<Formula>),
    /// Choice disjunction, `+`.
    ChDisj(Box<Formula>, Box<Formula>),
}

/// Path from the root of a formula to a subformula occurrence.
pub type OccRef = Vec<Side>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Formula {
    pub fn lit(atom: Atom) -> Formula {
        Formula::Literal(Sign::Pos, atom)
    }

    pub fn neg_lit(atom: Atom) -> Formula {
        debug_assert!(!atom.is_logical());
        Formula::Literal(Sign::Neg, atom)
    }

    pub fn conj(a: Formula, b: Formula) -> Formula {
        Formula::Conj(Box::new(a), Box::new(b))
    }

    pub fn disj(a: Formula, b: Formula) -> Formula {
        Formula::Disj(Box::new(a), Box::new(b))
    }

    pub fn chconj(a: Formula, b: Formula) -> Formula {
        Formula::ChConj(Box::new(a), Box::new(b))
    }

    pub fn chdisj(a: Formula, b: Formula) -> Formula {
        Formula::ChDisj(Box::new(a), Box::new(b))
    }

    /// `A -> B` as sugar for `!A | B`.
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::disj(a.negate(), b)
    }

    /// De Morgan negation.  An involution: `f.negate().negate() == f`.
    pub fn negate(&self) -> Formula {
        match self {
            Formula::Literal(sign, atom) => match atom.sort {
                AtomSort::LogicalTrue => Formula::lit(Atom::logical_false()),
                AtomSort::LogicalFalse => Formula::lit(Atom::logical_true()),
                _ => Formula::Literal(sign.flip(), atom.clone()),
            },
            Formula::Conj(a, b) => Formula::disj(a.negate(), b.negate()),
            Formula::Disj(a, b) => Formula::conj(a.negate(), b.negate()),
            Formula::ChConj(a, b) => Formula::chdisj(a.negate(), b.negate()),
            Formula::ChDisj(a, b) => Formula::chconj(a.negate(), b.negate()),
        }
    }

    /// All literal occurrences in left-to-right order, with their paths.
    pub fn oliterals(&self) -> Vec<(OccRef, Sign, Atom)> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.collect_oliterals(&mut path, &mut out);
        out
    }

    fn collect_oliterals(&self, path: &mut OccRef, out: &mut Vec<(OccRef, Sign, Atom)>) {
        match self {
            Formula::Literal(sign, atom) => out.push((path.clone(), *sign, atom.clone())),
            Formula::Conj(a, b)
            | Formula::Disj(a, b)
            | Formula::ChConj(a, b)
            | Formula::ChDisj(a, b) => {
                path.push(Side::Left);
                a.collect_oliterals(path, out);
                path.pop();
                path.push(Side::Right);
                b.collect_oliterals(path, out);
                path.pop();
            }
        }
    }

    pub fn subformula(&self, path: &[Side]) -> Option<&Formula> {
        let mut cur = self;
        for side in path {
            cur = match (cur, side) {
                (Formula::Literal(..), _) => return None,
                (
                    Formula::Conj(a, b)
                    | Formula::Disj(a, b)
                    | Formula::ChConj(a, b)
                    | Formula::ChDisj(a, b),
                    side,
                ) => match side {
                    Side::Left => a,
                    Side::Right => b,
                },
            };
        }
        Some(cur)
    }

    /// Replace the subformula at `path` with `repl`.
    pub fn replace_at(&self, path: &[Side], repl: Formula) -> Option<Formula> {
        match path.split_first() {
            None => Some(repl),
            Some((side, rest)) => {
                let rebuild = |a: &Formula, b: &Formula| -> Option<(Formula, Formula)> {
                    Some(match side {
                        Side::Left => (a.replace_at(rest, repl.clone())?, b.clone()),
                        Side::Right => (a.clone(), b.replace_at(rest, repl.clone())?),
                    })
                };
                match self {
                    Formula::Literal(..) => None,
                    Formula::Conj(a, b) => {
                        let (a, b) = rebuild(a, b)?;
                        Some(Formula::conj(a, b))
                    }
                    Formula::Disj(a, b) => {
                        let (a, b) = rebuild(a, b)?;
                        Some(Formula::disj(a, b))
                    }
                    Formula::ChConj(a, b) => {
                        let (a, b) = rebuild(a, b)?;
                        Some(Formula::chconj(a, b))
                    }
                    Formula::ChDisj(a, b) => {
                        let (a, b) = rebuild(a, b)?;
                        Some(Formula::chdisj(a, b))
                    }
                }
            }
        }
    }

    pub fn atoms(&self) -> Vec<Atom> {
        let mut seen = Vec::new();
        for (_, _, atom) in self.oliterals() {
            if !seen.contains(&atom) {
                seen.push(atom);
            }
        }
        seen
    }

    /// No choice connectives and no elementary or logical atoms.
    pub fn is_cl5(&self) -> bool {
        match self {
            Formula::Literal(_, atom) => atom.sort == AtomSort::General,
            Formula::Conj(a, b) | Formula::Disj(a, b) => a.is_cl5() && b.is_cl5(),
            Formula::ChConj(..) | Formula::ChDisj(..) => false,
        }
    }

    /// No choice connectives and no general atoms.
    pub fn is_elementary(&self) -> bool {
        match self {
            Formula::Literal(_, atom) => atom.sort != AtomSort::General,
            Formula::Conj(a, b) | Formula::Disj(a, b) => a.is_elementary() && b.is_elementary(),
            Formula::ChConj(..) | Formula::ChDisj(..) => false,
        }
    }

    /// No choice connectives (atoms of any sort allowed).
    pub fn is_classical(&self) -> bool {
        match self {
            Formula::Literal(..) => true,
            Formula::Conj(a, b) | Formula::Disj(a, b) => a.is_classical() && b.is_classical(),
            Formula::ChConj(..) | Formula::ChDisj(..) => false,
        }
    }
}

/// Finite-support substitution of formulas for nonlogical atoms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    map: BTreeMap<Atom, Formula>,
}

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn bind(&mut self, atom: Atom, image: Formula) {
        debug_assert!(!atom.is_logical());
        self.map.insert(atom, image);
    }

    pub fn get(&self, atom: &Atom) -> Option<&Formula> {
        self.map.get(atom)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Atom, &Formula)> {
        self.map.iter()
    }

    pub fn apply(&self, f: &Formula) -> Formula {
        match f {
            Formula::Literal(sign, atom) => match self.map.get(atom) {
                None => f.clone(),
                Some(image) => match sign {
                    Sign::Pos => image.clone(),
                    Sign::Neg => image.negate(),
                },
            },
            Formula::Conj(a, b) => Formula::conj(self.apply(a), self.apply(b)),
            Formula::Disj(a, b) => Formula::disj(self.apply(a), self.apply(b)),
            Formula::ChConj(a, b) => Formula::chconj(self.apply(a), self.apply(b)),
            Formula::ChDisj(a, b) => Formula::chdisj(self.apply(a), self.apply(b)),
        }
    }
}

/// If `target` is an instance of `pattern`, return the substitution pinned
/// down by the pattern's atom occurrences.  Logical atoms must match
/// literally.
pub fn match_instance(pattern: &Formula, target: &Formula) -> Option<Substitution> {
    let mut sub = Substitution::new();
    match_into(pattern, target, &mut sub)?;
    Some(sub)
}

fn match_into(pattern: &Formula, target: &Formula, sub: &mut Substitution) -> Option<()> {
    match pattern {
        Formula::Literal(sign, atom) => {
            if atom.is_logical() {
                return if pattern == target { Some(()) } else { None };
            }
            let image = match sign {
                Sign::Pos => target.clone(),
                Sign::Neg => target.negate(),
            };
            match sub.get(atom) {
                Some(prev) if *prev != image => None,
                Some(_) => Some(()),
                None => {
                    sub.bind(atom.clone(), image);
                    Some(())
                }
            }
        }
        Formula::Conj(a, b) => match target {
            Formula::Conj(x, y) => {
                match_into(a, x, sub)?;
                match_into(b, y, sub)
            }
            _ => None,
        },
        Formula::Disj(a, b) => match target {
            Formula::Disj(x, y) => {
                match_into(a, x, sub)?;
                match_into(b, y, sub)
            }
            _ => None,
        },
        Formula::ChConj(a, b) => match target {
            Formula::ChConj(x, y) => {
                match_into(a, x, sub)?;
                match_into(b, y, sub)
            }
            _ => None,
        },
        Formula::ChDisj(a, b) => match target {
            Formula::ChDisj(x, y) => {
                match_into(a, x, sub)?;
                match_into(b, y, sub)
            }
            _ => None,
        },
    }
}

/// Supply of atoms outside the user-writable namespace (`_g1`, `_e1`, ...).
#[derive(Debug, Clone, Default)]
pub struct FreshAtoms {
    next_general: usize,
    next_elementary: usize,
}

impl FreshAtoms {
    pub fn new() -> FreshAtoms {
        FreshAtoms { next_general: 1, next_elementary: 1 }
    }

    /// Start numbering above any `_gN` / `_eN` already present.
    pub fn avoiding<'a>(atoms: impl IntoIterator<Item = &'a Atom>) -> FreshAtoms {
        let mut fresh = FreshAtoms::new();
        for atom in atoms {
            if let Some(rest) = atom.name.strip_prefix("_g") {
                if let Ok(n) = rest.parse::<usize>() {
                    fresh.next_general = fresh.next_general.max(n + 1);
                }
            }
            if let Some(rest) = atom.name.strip_prefix("_e") {
                if let Ok(n) = rest.parse::<usize>() {
                    fresh.next_elementary = fresh.next_elementary.max(n + 1);
                }
            }
        }
        fresh
    }

    pub fn general(&mut self) -> Atom {
        let atom = Atom::general(format!("_g{}", self.next_general));
        self.next_general += 1;
        atom
    }

    pub fn elementary(&mut self) -> Atom {
        let atom = Atom::elementary(format!("_e{}", self.next_elementary));
        self.next_elementary += 1;
        atom
    }
}

// ---------------------------------------------------------------------------
// Concrete syntax.
//
// Precedence, tightest first: !  *  +  &  |  ->
// All binary operators associate to the left except ->, which associates to
// the right and desugars to !A | B during parsing.

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { pos, msg: msg.into() })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Token {
    Ident(String),
    LogicalTrue,
    LogicalFalse,
    Bang,
    Star,
    Plus,
    Amp,
    Pipe,
    Arrow,
    LParen,
    RParen,
    // Used by the cirquent / sequent / proof-file grammars.
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Semi,
    Comma,
    Number(usize),
}

pub(crate) fn tokenize(input: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = input.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '!' => {
                tokens.push((i, Token::Bang));
                i += 1;
            }
            '*' => {
                tokens.push((i, Token::Star));
                i += 1;
            }
            '+' => {
                tokens.push((i, Token::Plus));
                i += 1;
            }
            '&' => {
                tokens.push((i, Token::Amp));
                i += 1;
            }
            '|' => {
                tokens.push((i, Token::Pipe));
                i += 1;
            }
            '(' => {
                tokens.push((i, Token::LParen));
                i += 1;
            }
            ')' => {
                tokens.push((i, Token::RParen));
                i += 1;
            }
            '[' => {
                tokens.push((i, Token::LBracket));
                i += 1;
            }
            ']' => {
                tokens.push((i, Token::RBracket));
                i += 1;
            }
            '{' => {
                tokens.push((i, Token::LBrace));
                i += 1;
            }
            '}' => {
                tokens.push((i, Token::RBrace));
                i += 1;
            }
            ';' => {
                tokens.push((i, Token::Semi));
                i += 1;
            }
            ',' => {
                tokens.push((i, Token::Comma));
                i += 1;
            }
            '-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    tokens.push((i, Token::Arrow));
                    i += 2;
                } else {
                    return err(i, "expected '>' after '-'");
                }
            }
            '$' => {
                if input[i..].starts_with("$T") {
                    tokens.push((i, Token::LogicalTrue));
                    i += 2;
                } else if input[i..].starts_with("$F") {
                    tokens.push((i, Token::LogicalFalse));
                    i += 2;
                } else {
                    return err(i, "expected $T or $F");
                }
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: usize = input[start..i]
                    .parse()
                    .map_err(|_| ParseError { pos: start, msg: "number too large".into() })?;
                tokens.push((start, Token::Number(n)));
            }
            'A'..='Z' | 'a'..='z' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                tokens.push((start, Token::Ident(input[start..i].to_string())));
            }
            '_' => return err(i, "identifiers may not start with '_' (reserved)"),
            _ => return err(i, format!("unexpected character {c:?}")),
        }
    }
    Ok(tokens)
}

pub(crate) struct Parser<'a> {
    tokens: &'a [(usize, Token)],
    pub(crate) pos: usize,
    input_len: usize,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(tokens: &'a [(usize, Token)], input_len: usize) -> Parser<'a> {
        Parser { tokens, pos: 0, input_len }
    }

    pub(crate) fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    pub(crate) fn next(&mut self) -> Option<&Token> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn here(&self) -> usize {
        self.tokens.get(self.pos).map(|(p, _)| *p).unwrap_or(self.input_len)
    }

    pub(crate) fn expect(&mut self, tok: &Token, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(tok) {
            self.pos += 1;
            Ok(())
        } else {
            err(self.here(), format!("expected {what}"))
        }
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos == self.tokens.len()
    }

    pub(crate) fn expect_end(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            err(self.here(), "trailing input")
        }
    }

    pub(crate) fn formula(&mut self) -> Result<Formula, ParseError> {
        self.implication()
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.binary(1)?;
        if self.peek() == Some(&Token::Arrow) {
            self.next();
            let rhs = self.implication()?; // right-assoc
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    // prec 4: *, 3: +, 2: &, 1: |
    fn binary(&mut self, prec: u8) -> Result<Formula, ParseError> {
        if prec > 4 {
            return self.unary();
        }
        let mut lhs = self.binary(prec + 1)?;
        loop {
            let op = match (self.peek(), prec) {
                (Some(Token::Pipe), 1) => Formula::disj as fn(Formula, Formula) -> Formula,
                (Some(Token::Amp), 2) => Formula::conj,
                (Some(Token::Plus), 3) => Formula::chdisj,
                (Some(Token::Star), 4) => Formula::chconj,
                _ => break,
            };
            self.next();
            let rhs = self.binary(prec + 1)?;
            lhs = op(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Token::Bang) => {
                self.next();
                Ok(self.unary()?.negate())
            }
            Some(Token::LParen) => {
                self.next();
                let f = self.formula()?;
                self.expect(&Token::RParen, "')'")?;
                Ok(f)
            }
            Some(Token::LogicalTrue) => {
                self.next();
                Ok(Formula::lit(Atom::logical_true()))
            }
            Some(Token::LogicalFalse) => {
                self.next();
                Ok(Formula::lit(Atom::logical_false()))
            }
            Some(Token::Ident(name)) => {
                let atom = ident_atom(name);
                self.next();
                Ok(Formula::lit(atom))
            }
            _ => err(self.here(), "expected formula"),
        }
    }
}

pub(crate) fn ident_atom(name: &str) -> Atom {
    if name.starts_with(|c: char| c.is_ascii_uppercase()) {
        Atom::general(name)
    } else {
        Atom::elementary(name)
    }
}

pub fn parse(input: &str) -> Result<Formula, ParseError> {
    let tokens = tokenize(input)?;
    let mut p = Parser::new(&tokens, input.len());
    let f = p.formula()?;
    p.expect_end()?;
    Ok(f)
}

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Literal(..) => 5,
        Formula::ChConj(..) => 4,
        Formula::ChDisj(..) => 3,
        Formula::Conj(..) => 2,
        Formula::Disj(..) => 1,
    }
}

fn print_into(f: &Formula, parent: u8, right_child: bool, out: &mut String) {
    let p = prec(f);
    let needs_parens = p < parent || (p == parent && right_child && p < 5);
    if needs_parens {
        out.push('(');
    }
    match f {
        Formula::Literal(sign, atom) => {
            if *sign == Sign::Neg {
                out.push('!');
            }
            out.push_str(&atom.name);
        }
        Formula::Conj(a, b) => {
            print_into(a, p, false, out);
            out.push_str(" & ");
            print_into(b, p, true, out);
        }
        Formula::Disj(a, b) => {
            print_into(a, p, false, out);
            out.push_str(" | ");
            print_into(b, p, true, out);
        }
        Formula::ChConj(a, b) => {
            print_into(a, p, false, out);
            out.push_str(" * ");
            print_into(b, p, true, out);
        }
        Formula::ChDisj(a, b) => {
            print_into(a, p, false, out);
            out.push_str(" + ");
            print_into(b, p, true, out);
        }
    }
    if needs_parens {
        out.push(')');
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        print_into(self, 0, false, &mut s);
        f.write_str(&s)
    }
}
