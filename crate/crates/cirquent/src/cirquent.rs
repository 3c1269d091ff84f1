//! Cirquents: a pool of oformulas plus a sequence of ogroups.  Pool
//! positions are 1-based everywhere — in groups, in rule parameters and in
//! the textual format `[ F1 ; F2 ] {1 2} {2}`.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::formula::{self, Atom, Formula, ParseError, Parser, Substitution, Token};

/// A set of 1-based pool positions.  May be empty.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Group(BTreeSet<usize>);

impl Group {
    pub fn new() -> Group {
        Group::default()
    }

    pub fn from_members(members: impl IntoIterator<Item = usize>) -> Group {
        Group(members.into_iter().collect())
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.contains(&i)
    }

    pub fn insert(&mut self, i: usize) -> bool {
        self.0.insert(i)
    }

    pub fn remove(&mut self, i: usize) -> bool {
        self.0.remove(&i)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn union(&self, other: &Group) -> Group {
        Group(self.0.union(&other.0).copied().collect())
    }

    /// Apply `f` to every member (used when pool positions shift).
    pub fn remap(&self, f: impl Fn(usize) -> usize) -> Group {
        Group(self.0.iter().map(|&i| f(i)).collect())
    }
}

impl FromIterator<usize> for Group {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Group {
        Group(iter.into_iter().collect())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CirquentError {
    #[error("group {group} refers to pool position {index}, but the pool has {pool_len} oformulas")]
    IndexOutOfRange { group: usize, index: usize, pool_len: usize },
    #[error("position {0} is out of range")]
    BadPosition(usize),
}

/// A cirquent: pool of oformulas and sequence of ogroups.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Cirquent {
    pool: Vec<Formula>,
    structure: Vec<Group>,
}

impl Cirquent {
    pub fn empty() -> Cirquent {
        Cirquent::default()
    }

    pub fn new(pool: Vec<Formula>, structure: Vec<Group>) -> Result<Cirquent, CirquentError> {
        let pool_len = pool.len();
        for (g, group) in structure.iter().enumerate() {
            for i in group.members() {
                if i < 1 || i > pool_len {
                    return Err(CirquentError::IndexOutOfRange { group: g + 1, index: i, pool_len });
                }
            }
        }
        Ok(Cirquent { pool, structure })
    }

    /// The cirquent form of a single formula: one oformula, one ogroup.
    pub fn singleton(f: Formula) -> Cirquent {
        Cirquent { pool: vec![f], structure: vec![Group::from_members([1])] }
    }

    /// The cirquent form of a sequent: the whole pool as one ogroup.
    pub fn from_sequent(s: &Sequent) -> Cirquent {
        let pool: Vec<Formula> = s.formulas.clone();
        let group = Group::from_members(1..=pool.len());
        Cirquent { pool, structure: vec![group] }
    }

    pub fn pool(&self) -> &[Formula] {
        &self.pool
    }

    pub fn structure(&self) -> &[Group] {
        &self.structure
    }

    /// Oformula at 1-based position `i`.
    pub fn oformula(&self, i: usize) -> Option<&Formula> {
        if i >= 1 {
            self.pool.get(i - 1)
        } else {
            None
        }
    }

    /// Ogroup at 1-based position `g`.
    pub fn ogroup(&self, g: usize) -> Option<&Group> {
        if g >= 1 {
            self.structure.get(g - 1)
        } else {
            None
        }
    }

    pub fn is_empty(&self) -> bool {
        self.pool.is_empty() && self.structure.is_empty()
    }

    /// 1-based indices of ogroups containing pool position `i`.
    pub fn groups_containing(&self, i: usize) -> Vec<usize> {
        (1..=self.structure.len())
            .filter(|&g| self.structure[g - 1].contains(i))
            .collect()
    }

    pub fn is_homeless(&self, i: usize) -> bool {
        self.structure.iter().all(|g| !g.contains(i))
    }

    /// No oformula belongs to two distinct ogroups.
    pub fn is_primitive(&self) -> bool {
        (1..=self.pool.len()).all(|i| self.groups_containing(i).len() <= 1)
    }

    pub fn atoms(&self) -> Vec<Atom> {
        let mut seen = Vec::new();
        for f in &self.pool {
            for atom in f.atoms() {
                if !seen.contains(&atom) {
                    seen.push(atom);
                }
            }
        }
        seen
    }

    /// All literal occurrences across the pool in order, as
    /// `(oformula position, path, sign, atom)`.
    pub fn oliterals(&self) -> Vec<(usize, formula::OccRef, formula::Sign, Atom)> {
        let mut out = Vec::new();
        for (m, f) in self.pool.iter().enumerate() {
            for (path, sign, atom) in f.oliterals() {
                out.push((m + 1, path, sign, atom));
            }
        }
        out
    }

    pub fn apply_substitution(&self, sub: &Substitution) -> Cirquent {
        Cirquent {
            pool: self.pool.iter().map(|f| sub.apply(f)).collect(),
            structure: self.structure.clone(),
        }
    }

    // -- structural edits used by the inference rules ----------------------

    /// Merge adjacent ogroups `g` and `g+1` into their union.
    pub fn merge_ogroups(&self, g: usize) -> Result<Cirquent, CirquentError> {
        if g < 1 || g + 1 > self.structure.len() {
            return Err(CirquentError::BadPosition(g));
        }
        let mut structure = self.structure.clone();
        let merged = structure[g - 1].union(&structure[g]);
        structure[g - 1] = merged;
        structure.remove(g);
        Ok(Cirquent { pool: self.pool.clone(), structure })
    }

    /// Merge adjacent oformulas `i` and `i+1` into the single oformula `h`;
    /// arcs of both land on the merged oformula.
    pub fn merge_oformulas(&self, i: usize, h: Formula) -> Result<Cirquent, CirquentError> {
        if i < 1 || i + 1 > self.pool.len() {
            return Err(CirquentError::BadPosition(i));
        }
        let mut pool = self.pool.clone();
        pool[i - 1] = h;
        pool.remove(i);
        let structure = self
            .structure
            .iter()
            .map(|g| g.remap(|j| if j > i { j - 1 } else { j }))
            .collect();
        Ok(Cirquent { pool, structure })
    }

    /// Insert oformula `f` at position `i` (1 ≤ i ≤ len+1), with no arcs.
    pub fn insert_oformula(&self, i: usize, f: Formula) -> Result<Cirquent, CirquentError> {
        if i < 1 || i > self.pool.len() + 1 {
            return Err(CirquentError::BadPosition(i));
        }
        let mut pool = self.pool.clone();
        pool.insert(i - 1, f);
        let structure = self
            .structure
            .iter()
            .map(|g| g.remap(|j| if j >= i { j + 1 } else { j }))
            .collect();
        Ok(Cirquent { pool, structure })
    }

    /// Delete oformula `i`; it must be homeless.
    pub fn delete_oformula(&self, i: usize) -> Result<Cirquent, CirquentError> {
        if i < 1 || i > self.pool.len() {
            return Err(CirquentError::BadPosition(i));
        }
        debug_assert!(self.is_homeless(i));
        let mut pool = self.pool.clone();
        pool.remove(i - 1);
        let structure = self
            .structure
            .iter()
            .map(|g| g.remap(|j| if j > i { j - 1 } else { j }))
            .collect();
        Ok(Cirquent { pool, structure })
    }

    /// Swap adjacent oformulas `i` and `i+1`, arcs following them.
    pub fn swap_oformulas(&self, i: usize) -> Result<Cirquent, CirquentError> {
        if i < 1 || i + 1 > self.pool.len() {
            return Err(CirquentError::BadPosition(i));
        }
        let mut pool = self.pool.clone();
        pool.swap(i - 1, i);
        let structure = self
            .structure
            .iter()
            .map(|g| {
                g.remap(|j| {
                    if j == i {
                        i + 1
                    } else if j == i + 1 {
                        i
                    } else {
                        j
                    }
                })
            })
            .collect();
        Ok(Cirquent { pool, structure })
    }

    /// Swap adjacent ogroups `g` and `g+1`.
    pub fn swap_ogroups(&self, g: usize) -> Result<Cirquent, CirquentError> {
        if g < 1 || g + 1 > self.structure.len() {
            return Err(CirquentError::BadPosition(g));
        }
        let mut structure = self.structure.clone();
        structure.swap(g - 1, g);
        Ok(Cirquent { pool: self.pool.clone(), structure })
    }

    pub fn with_structure(&self, structure: Vec<Group>) -> Result<Cirquent, CirquentError> {
        Cirquent::new(self.pool.clone(), structure)
    }
}

impl fmt::Display for Cirquent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pool.is_empty() {
            write!(f, "[]")?;
        } else {
            write!(f, "[ ")?;
            for (i, formula) in self.pool.iter().enumerate() {
                if i > 0 {
                    write!(f, " ; ")?;
                }
                write!(f, "{formula}")?;
            }
            write!(f, " ]")?;
        }
        for group in &self.structure {
            write!(f, " {{")?;
            let mut first = true;
            for i in group.members() {
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{i}")?;
                first = false;
            }
            write!(f, "}}")?;
        }
        Ok(())
    }
}

pub(crate) fn parse_cirquent_tokens(p: &mut Parser<'_>) -> Result<Cirquent, ParseError> {
    p.expect(&Token::LBracket, "'['")?;
    let mut pool = Vec::new();
    if p.peek() != Some(&Token::RBracket) {
        loop {
            pool.push(p.formula()?);
            match p.peek() {
                Some(Token::Semi) => {
                    p.next();
                }
                _ => break,
            }
        }
    }
    p.expect(&Token::RBracket, "']'")?;
    let mut structure = Vec::new();
    while p.peek() == Some(&Token::LBrace) {
        p.next();
        let mut group = Group::new();
        while let Some(Token::Number(n)) = p.peek() {
            let n = *n;
            p.next();
            group.insert(n);
        }
        p.expect(&Token::RBrace, "'}'")?;
        structure.push(group);
    }
    let pos = p.here();
    Cirquent::new(pool, structure).map_err(|e| ParseError { pos, msg: e.to_string() })
}

pub fn parse_cirquent(input: &str) -> Result<Cirquent, ParseError> {
    let tokens = formula::tokenize(input)?;
    let mut p = Parser::new(&tokens, input.len());
    let c = parse_cirquent_tokens(&mut p)?;
    p.expect_end()?;
    Ok(c)
}

/// A sequent: a nonempty sequence of formulas, written `F1 , F2 , ...`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sequent {
    pub formulas: Vec<Formula>,
}

impl Sequent {
    pub fn new(formulas: Vec<Formula>) -> Option<Sequent> {
        if formulas.is_empty() {
            None
        } else {
            Some(Sequent { formulas })
        }
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    #[allow(clippy::len_without_is_empty)] // sequents are never empty
    pub fn formula(&self, i: usize) -> Option<&Formula> {
        if i >= 1 {
            self.formulas.get(i - 1)
        } else {
            None
        }
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, formula) in self.formulas.iter().enumerate() {
            if i > 0 {
                write!(f, " , ")?;
            }
            write!(f, "{formula}")?;
        }
        Ok(())
    }
}

pub fn parse_sequent(input: &str) -> Result<Sequent, ParseError> {
    let tokens = formula::tokenize(input)?;
    let mut p = Parser::new(&tokens, input.len());
    let s = parse_sequent_tokens(&mut p)?;
    p.expect_end()?;
    Ok(s)
}

pub(crate) fn parse_sequent_tokens(p: &mut Parser<'_>) -> Result<Sequent, ParseError> {
    let mut formulas = vec![p.formula()?];
    while p.peek() == Some(&Token::Comma) {
        p.next();
        formulas.push(p.formula()?);
    }
    Ok(Sequent { formulas })
}
