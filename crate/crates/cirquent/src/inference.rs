//! The inference rules, proof trees, systems, and the textual proof-file
//! format.
//!
//! Rule applications are conclusion-oriented: `apply` maps premises to the
//! conclusion, `backward_premises` enumerates premise candidates for a given
//! conclusion, and `check_proof` replays a proof tree bottom-up.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::cirquent::{parse_cirquent_tokens, Cirquent, Group};
use crate::formula::{self, Formula, ParseError, Parser, Substitution, Token};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RuleApp {
    /// The empty cirquent from no premises.
    AxiomEmpty,
    /// `[ !F ; F ] {1 2}` from no premises.
    AxiomId(Formula),
    /// `[ $T ] {1}` from no premises (CL6 only).
    AxiomTop,
    /// Concatenate two cirquents side by side.
    Mix,
    /// Swap adjacent oformulas `i`, `i+1`.
    ExchF(usize),
    /// Swap adjacent ogroups `g`, `g+1`.
    ExchG(usize),
    /// Insert a new (arcless) oformula at position `i`.
    WeakPool(usize, Formula),
    /// Add an arc from ogroup `g` to oformula `i`.
    WeakGroup(usize, usize),
    /// Replace ogroup `g` by two adjacent copies.
    DupDown(usize),
    /// Collapse identical adjacent ogroups `g`, `g+1` into one.
    DupUp(usize),
    /// Merge identical adjacent oformulas `i`, `i+1`.
    Contract(usize),
    /// Merge adjacent oformulas `F`, `G` at `i` into `F | G`.
    DisjIntro(usize),
    /// Merge adjacent oformulas `F`, `G` at `i` into `F & G`, pairing each
    /// `F`-ogroup with its `G`-successor.
    ConjIntro(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleFamily {
    Axiom,
    Mix,
    Exchange,
    Weakening,
    Duplication,
    Contraction,
    DisjIntro,
    ConjIntro,
}

impl RuleApp {
    pub fn family(&self) -> RuleFamily {
        match self {
            RuleApp::AxiomEmpty | RuleApp::AxiomId(_) | RuleApp::AxiomTop => RuleFamily::Axiom,
            RuleApp::Mix => RuleFamily::Mix,
            RuleApp::ExchF(_) | RuleApp::ExchG(_) => RuleFamily::Exchange,
            RuleApp::WeakPool(..) | RuleApp::WeakGroup(..) => RuleFamily::Weakening,
            RuleApp::DupDown(_) | RuleApp::DupUp(_) => RuleFamily::Duplication,
            RuleApp::Contract(_) => RuleFamily::Contraction,
            RuleApp::DisjIntro(_) => RuleFamily::DisjIntro,
            RuleApp::ConjIntro(_) => RuleFamily::ConjIntro,
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            RuleApp::AxiomEmpty | RuleApp::AxiomId(_) | RuleApp::AxiomTop => 0,
            RuleApp::Mix => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleError {
    #[error("{rule} takes {want} premise(s), got {got}")]
    Arity { rule: String, want: usize, got: usize },
    #[error("position {0} is out of range for this rule")]
    Position(usize),
    #[error("{0}")]
    SideCondition(String),
}

fn side<T>(msg: impl Into<String>) -> Result<T, RuleError> {
    Err(RuleError::SideCondition(msg.into()))
}

/// Compute the conclusion of applying `rule` to `premises`.
pub fn apply(rule: &RuleApp, premises: &[Cirquent]) -> Result<Cirquent, RuleError> {
    if premises.len() != rule.arity() {
        return Err(RuleError::Arity {
            rule: format!("{rule}"),
            want: rule.arity(),
            got: premises.len(),
        });
    }
    match rule {
        RuleApp::AxiomEmpty => Ok(Cirquent::empty()),
        RuleApp::AxiomId(f) => Ok(Cirquent::new(
            vec![f.negate(), f.clone()],
            vec![Group::from_members([1, 2])],
        )
        .expect("well-formed axiom")),
        RuleApp::AxiomTop => Ok(Cirquent::new(
            vec![Formula::lit(crate::formula::Atom::logical_true())],
            vec![Group::from_members([1])],
        )
        .expect("well-formed axiom")),
        RuleApp::Mix => {
            let (a, b) = (&premises[0], &premises[1]);
            let shift = a.pool().len();
            let mut pool = a.pool().to_vec();
            pool.extend(b.pool().iter().cloned());
            let mut structure = a.structure().to_vec();
            structure.extend(b.structure().iter().map(|g| g.remap(|i| i + shift)));
            Ok(Cirquent::new(pool, structure).expect("indices stay in range"))
        }
        RuleApp::ExchF(i) => premises[0].swap_oformulas(*i).map_err(|_| RuleError::Position(*i)),
        RuleApp::ExchG(g) => premises[0].swap_ogroups(*g).map_err(|_| RuleError::Position(*g)),
        RuleApp::WeakPool(i, f) => premises[0]
            .insert_oformula(*i, f.clone())
            .map_err(|_| RuleError::Position(*i)),
        RuleApp::WeakGroup(g, i) => {
            let c = &premises[0];
            if c.oformula(*i).is_none() {
                return Err(RuleError::Position(*i));
            }
            let group = c.ogroup(*g).ok_or(RuleError::Position(*g))?;
            if group.contains(*i) {
                return side(format!("ogroup {g} already contains oformula {i}"));
            }
            let mut structure = c.structure().to_vec();
            structure[*g - 1].insert(*i);
            Ok(c.with_structure(structure).expect("indices in range"))
        }
        RuleApp::DupDown(g) => {
            let c = &premises[0];
            let group = c.ogroup(*g).ok_or(RuleError::Position(*g))?.clone();
            let mut structure = c.structure().to_vec();
            structure.insert(*g, group);
            Ok(c.with_structure(structure).expect("indices in range"))
        }
        RuleApp::DupUp(g) => {
            let c = &premises[0];
            let first = c.ogroup(*g).ok_or(RuleError::Position(*g))?;
            let second = c.ogroup(*g + 1).ok_or(RuleError::Position(*g + 1))?;
            if first != second {
                return side(format!("ogroups {g} and {} differ", g + 1));
            }
            let mut structure = c.structure().to_vec();
            structure.remove(*g);
            Ok(c.with_structure(structure).expect("indices in range"))
        }
        RuleApp::Contract(i) => {
            let c = &premises[0];
            let f = c.oformula(*i).ok_or(RuleError::Position(*i))?;
            let g = c.oformula(*i + 1).ok_or(RuleError::Position(*i + 1))?;
            if f != g {
                return side(format!("oformulas {i} and {} are not identical", i + 1));
            }
            let h = f.clone();
            c.merge_oformulas(*i, h).map_err(|_| RuleError::Position(*i))
        }
        RuleApp::DisjIntro(i) => {
            let c = &premises[0];
            let f = c.oformula(*i).ok_or(RuleError::Position(*i))?.clone();
            let g = c.oformula(*i + 1).ok_or(RuleError::Position(*i + 1))?.clone();
            c.merge_oformulas(*i, Formula::disj(f, g))
                .map_err(|_| RuleError::Position(*i))
        }
        RuleApp::ConjIntro(i) => {
            let c = &premises[0];
            let i = *i;
            let f = c.oformula(i).ok_or(RuleError::Position(i))?.clone();
            let g = c.oformula(i + 1).ok_or(RuleError::Position(i + 1))?.clone();
            let n_groups = c.structure().len();
            for (gi, group) in c.structure().iter().enumerate() {
                let gi = gi + 1;
                if group.contains(i) && group.contains(i + 1) {
                    return side(format!("ogroup {gi} contains both conjunct oformulas"));
                }
                if group.contains(i)
                    && !(gi < n_groups && c.structure()[gi].contains(i + 1))
                {
                    return side(format!(
                        "ogroup {gi} contains the left conjunct but is not followed by an ogroup containing the right one"
                    ));
                }
                if group.contains(i + 1)
                    && !(gi > 1 && c.structure()[gi - 2].contains(i))
                {
                    return side(format!(
                        "ogroup {gi} contains the right conjunct but is not preceded by an ogroup containing the left one"
                    ));
                }
            }
            // merge each left-conjunct ogroup with its successor
            let mut structure = Vec::new();
            let mut gi = 0;
            while gi < n_groups {
                if c.structure()[gi].contains(i) {
                    structure.push(c.structure()[gi].union(&c.structure()[gi + 1]));
                    gi += 2;
                } else {
                    structure.push(c.structure()[gi].clone());
                    gi += 1;
                }
            }
            let merged = Cirquent::new(c.pool().to_vec(), structure).expect("indices in range");
            merged
                .merge_oformulas(i, Formula::conj(f, g))
                .map_err(|_| RuleError::Position(i))
        }
    }
}

/// A derivation tree.  `premises` are ordered (left premise of mix first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proof {
    pub conclusion: Cirquent,
    pub rule: RuleApp,
    pub premises: Vec<Proof>,
}

impl Proof {
    pub fn leaf(rule: RuleApp) -> Proof {
        let conclusion = apply(&rule, &[]).expect("axiom");
        Proof { conclusion, rule, premises: vec![] }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Proof::size).sum::<usize>()
    }

    pub fn uses_family(&self, family: RuleFamily) -> bool {
        self.rule.family() == family || self.premises.iter().any(|p| p.uses_family(family))
    }
}

/// Apply a substitution to every cirquent and rule parameter in a proof.
/// Rule applications are index-based, so validity is preserved.
pub fn substitute_proof(p: &Proof, sub: &Substitution) -> Proof {
    let rule = match &p.rule {
        RuleApp::AxiomId(f) => RuleApp::AxiomId(sub.apply(f)),
        RuleApp::WeakPool(i, f) => RuleApp::WeakPool(*i, sub.apply(f)),
        other => other.clone(),
    };
    Proof {
        conclusion: p.conclusion.apply_substitution(sub),
        rule,
        premises: p.premises.iter().map(|q| substitute_proof(q, sub)).collect(),
    }
}

/// A proof system: which rule families are allowed, plus side restrictions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct System {
    pub name: String,
    pub families: BTreeSet<RuleFamily>,
    /// Every cirquent in the proof must be primitive (the starred systems).
    pub primitive_only: bool,
    /// Contraction only on elementary formulas (CL6).
    pub elementary_contraction_only: bool,
    /// The bare `$T` axiom is available (CL6).
    pub top_axiom: bool,
}

impl System {
    fn base(name: &str, families: &[RuleFamily]) -> System {
        System {
            name: name.to_string(),
            families: families.iter().copied().collect(),
            primitive_only: false,
            elementary_contraction_only: false,
            top_axiom: false,
        }
    }

    /// All eight rules: classical cirquent calculus.
    pub fn ccc() -> System {
        System::base(
            "ccc",
            &[
                RuleFamily::Axiom,
                RuleFamily::Mix,
                RuleFamily::Exchange,
                RuleFamily::Weakening,
                RuleFamily::Duplication,
                RuleFamily::Contraction,
                RuleFamily::DisjIntro,
                RuleFamily::ConjIntro,
            ],
        )
    }

    /// CCC minus contraction.
    pub fn cl5() -> System {
        let mut s = System::ccc();
        s.name = "cl5".to_string();
        s.families.remove(&RuleFamily::Contraction);
        s
    }

    /// CL5 plus the `$T` axiom plus contraction on elementary formulas.
    pub fn cl6() -> System {
        let mut s = System::ccc();
        s.name = "cl6".to_string();
        s.elementary_contraction_only = true;
        s.top_axiom = true;
        s
    }

    pub fn with_primitive_only(mut self) -> System {
        self.primitive_only = true;
        self.name.push('*');
        self
    }

    pub fn allows(&self, rule: &RuleApp) -> Result<(), String> {
        if !self.families.contains(&rule.family()) {
            return Err(format!("rule {rule} is not part of system {}", self.name));
        }
        if matches!(rule, RuleApp::AxiomTop) && !self.top_axiom {
            return Err(format!("the $T axiom is not part of system {}", self.name));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Premise indices (1-based) from the root to the offending node.
    pub path: Vec<usize>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at ")?;
        if self.path.is_empty() {
            write!(f, "root")?;
        } else {
            write!(
                f,
                "root.{}",
                self.path.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
            )?;
        }
        write!(f, ": {}", self.message)
    }
}

/// Replay a proof tree and collect every violation against `system`.
pub fn check_proof(p: &Proof, system: &System) -> Result<(), Vec<Violation>> {
    let mut violations = Vec::new();
    let mut path = Vec::new();
    check_node(p, system, &mut path, &mut violations);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

fn check_node(p: &Proof, system: &System, path: &mut Vec<usize>, out: &mut Vec<Violation>) {
    if let Err(msg) = system.allows(&p.rule) {
        out.push(Violation { path: path.clone(), message: msg });
    }
    if system.elementary_contraction_only {
        if let RuleApp::Contract(i) = &p.rule {
            if let Some(f) = p.premises.first().and_then(|q| q.conclusion.oformula(*i)) {
                if !f.is_elementary() {
                    out.push(Violation {
                        path: path.clone(),
                        message: format!(
                            "contraction on non-elementary formula {f} in system {}",
                            system.name
                        ),
                    });
                }
            }
        }
    }
    if system.primitive_only && !p.conclusion.is_primitive() {
        out.push(Violation {
            path: path.clone(),
            message: format!("cirquent {} is not primitive", p.conclusion),
        });
    }
    let premise_conclusions: Vec<Cirquent> =
        p.premises.iter().map(|q| q.conclusion.clone()).collect();
    match apply(&p.rule, &premise_conclusions) {
        Ok(derived) if derived == p.conclusion => {}
        Ok(derived) => out.push(Violation {
            path: path.clone(),
            message: format!(
                "rule {} yields {} but the proof records {}",
                p.rule, derived, p.conclusion
            ),
        }),
        Err(e) => out.push(Violation {
            path: path.clone(),
            message: format!("rule {} does not apply: {e}", p.rule),
        }),
    }
    for (k, q) in p.premises.iter().enumerate() {
        path.push(k + 1);
        check_node(q, system, path, out);
        path.pop();
    }
}

// ---------------------------------------------------------------------------
// Backward premise enumeration.

/// When distributing arcs over the two copies of a split oformula, each
/// affected ogroup independently keeps the left copy, the right copy or
/// both.  Enumeration is cut to the conservative candidate alone beyond
/// this many combinations.
const MAX_DISTRIBUTIONS: usize = 729;

/// Enumerate `(rule, premises)` pairs of the given family whose application
/// yields `c` exactly.  For the introduction rules the conservative premise
/// comes first.
pub fn backward_premises(
    c: &Cirquent,
    family: RuleFamily,
    system: &System,
) -> Vec<(RuleApp, Vec<Cirquent>)> {
    if !system.families.contains(&family) {
        return Vec::new();
    }
    let mut out: Vec<(RuleApp, Vec<Cirquent>)> = Vec::new();
    match family {
        RuleFamily::Axiom => {
            if c.is_empty() {
                out.push((RuleApp::AxiomEmpty, vec![]));
            }
            if c.pool().len() == 2
                && c.structure() == [Group::from_members([1, 2])]
                && c.pool()[0] == c.pool()[1].negate()
            {
                out.push((RuleApp::AxiomId(c.pool()[1].clone()), vec![]));
            }
            if system.top_axiom
                && c.pool() == [Formula::lit(crate::formula::Atom::logical_true())]
                && c.structure() == [Group::from_members([1])]
            {
                out.push((RuleApp::AxiomTop, vec![]));
            }
        }
        RuleFamily::Mix => {
            // split the pool at k and the structure at m so that the halves
            // do not cross
            for k in 0..=c.pool().len() {
                for m in 0..=c.structure().len() {
                    let left_ok = c.structure()[..m].iter().all(|g| g.members().all(|i| i <= k));
                    let right_ok = c.structure()[m..].iter().all(|g| g.members().all(|i| i > k));
                    if !left_ok || !right_ok {
                        continue;
                    }
                    let left = Cirquent::new(
                        c.pool()[..k].to_vec(),
                        c.structure()[..m].to_vec(),
                    )
                    .expect("left half well-formed");
                    let right = Cirquent::new(
                        c.pool()[k..].to_vec(),
                        c.structure()[m..].iter().map(|g| g.remap(|i| i - k)).collect(),
                    )
                    .expect("right half well-formed");
                    out.push((RuleApp::Mix, vec![left, right]));
                }
            }
        }
        RuleFamily::Exchange => {
            for i in 1..c.pool().len() {
                out.push((RuleApp::ExchF(i), vec![c.swap_oformulas(i).expect("in range")]));
            }
            for g in 1..c.structure().len() {
                out.push((RuleApp::ExchG(g), vec![c.swap_ogroups(g).expect("in range")]));
            }
        }
        RuleFamily::Weakening => {
            for i in 1..=c.pool().len() {
                if c.is_homeless(i) {
                    out.push((
                        RuleApp::WeakPool(i, c.pool()[i - 1].clone()),
                        vec![c.delete_oformula(i).expect("in range")],
                    ));
                }
            }
            for g in 1..=c.structure().len() {
                for i in c.structure()[g - 1].members() {
                    let mut structure = c.structure().to_vec();
                    structure[g - 1].remove(i);
                    out.push((
                        RuleApp::WeakGroup(g, i),
                        vec![c.with_structure(structure).expect("still well-formed")],
                    ));
                }
            }
        }
        RuleFamily::Duplication => {
            for g in 1..c.structure().len() {
                if c.structure()[g - 1] == c.structure()[g] {
                    let mut structure = c.structure().to_vec();
                    structure.remove(g);
                    out.push((
                        RuleApp::DupDown(g),
                        vec![c.with_structure(structure).expect("still well-formed")],
                    ));
                }
            }
            for g in 1..=c.structure().len() {
                let mut structure = c.structure().to_vec();
                structure.insert(g, c.structure()[g - 1].clone());
                out.push((
                    RuleApp::DupUp(g),
                    vec![c.with_structure(structure).expect("still well-formed")],
                ));
            }
        }
        RuleFamily::Contraction => {
            for i in 1..=c.pool().len() {
                for premise in split_oformula_distributions(c, i, |f| (f.clone(), f.clone())) {
                    out.push((RuleApp::Contract(i), vec![premise]));
                }
            }
        }
        RuleFamily::DisjIntro => {
            for i in 1..=c.pool().len() {
                if let Formula::Disj(f, g) = &c.pool()[i - 1] {
                    let (f, g) = ((**f).clone(), (**g).clone());
                    for premise in
                        split_oformula_distributions(c, i, |_| (f.clone(), g.clone()))
                    {
                        out.push((RuleApp::DisjIntro(i), vec![premise]));
                    }
                }
            }
        }
        RuleFamily::ConjIntro => {
            for i in 1..=c.pool().len() {
                if let Formula::Conj(f, g) = &c.pool()[i - 1] {
                    for premise in conj_backward(c, i, f, g) {
                        out.push((RuleApp::ConjIntro(i), vec![premise]));
                    }
                }
            }
        }
    }
    if cfg!(debug_assertions) {
        for (rule, premises) in &out {
            debug_assert_eq!(apply(rule, premises).as_ref(), Ok(c), "backward {rule}");
        }
    }
    out
}

/// Premises obtained by splitting oformula `i` of `c` into two adjacent
/// oformulas (via `parts`) and distributing the arcs of `i` over the copies.
/// The conservative distribution (every affected ogroup keeps both copies)
/// comes first.
fn split_oformula_distributions(
    c: &Cirquent,
    i: usize,
    parts: impl Fn(&Formula) -> (Formula, Formula),
) -> Vec<Cirquent> {
    let (left, right) = parts(&c.pool()[i - 1]);
    let mut pool = c.pool().to_vec();
    pool[i - 1] = left;
    pool.insert(i, right);
    let affected: Vec<usize> = c.groups_containing(i);
    let reindexed: Vec<Group> = c
        .structure()
        .iter()
        .map(|g| g.remap(|j| if j > i { j + 1 } else { j }))
        .collect();
    // choice per affected ogroup: 0 = both copies, 1 = left only, 2 = right only
    let n = affected.len();
    let total = 3usize.saturating_pow(n as u32);
    let combos: Box<dyn Iterator<Item = usize>> = if total > MAX_DISTRIBUTIONS {
        Box::new(std::iter::once(0))
    } else {
        Box::new(0..total)
    };
    let mut out = Vec::new();
    for combo in combos {
        let mut structure = reindexed.clone();
        let mut code = combo;
        for &g in &affected {
            let choice = code % 3;
            code /= 3;
            let group = &mut structure[g - 1];
            match choice {
                0 => {
                    group.insert(i + 1);
                }
                1 => {}
                _ => {
                    group.remove(i);
                    group.insert(i + 1);
                }
            }
        }
        out.push(Cirquent::new(pool.clone(), structure).expect("indices in range"));
    }
    out
}

/// Backward conjunction introduction: split every ogroup containing `i`
/// into a left-conjunct ogroup followed by a right-conjunct ogroup,
/// distributing the other members.  Conservative distribution first.
fn conj_backward(c: &Cirquent, i: usize, f: &Formula, g: &Formula) -> Vec<Cirquent> {
    let mut pool = c.pool().to_vec();
    pool[i - 1] = f.clone();
    pool.insert(i, g.clone());
    let reindex = |j: usize| if j > i { j + 1 } else { j };
    let affected = c.groups_containing(i);
    // other members of the affected ogroups, in a flat list
    let others: Vec<(usize, usize)> = affected
        .iter()
        .flat_map(|&gi| {
            c.structure()[gi - 1]
                .members()
                .filter(|&j| j != i)
                .map(move |j| (gi, reindex(j)))
        })
        .collect();
    let n = others.len();
    let total = 3usize.saturating_pow(n as u32);
    let combos: Box<dyn Iterator<Item = usize>> = if total > MAX_DISTRIBUTIONS {
        Box::new(std::iter::once(0))
    } else {
        Box::new(0..total)
    };
    let mut out = Vec::new();
    for combo in combos {
        // choice per other member: 0 = both ogroups, 1 = left only, 2 = right only
        let mut choices = Vec::with_capacity(n);
        let mut code = combo;
        for _ in 0..n {
            choices.push(code % 3);
            code /= 3;
        }
        let mut structure = Vec::new();
        for (gi, group) in c.structure().iter().enumerate() {
            let gi = gi + 1;
            if !affected.contains(&gi) {
                structure.push(group.remap(reindex));
                continue;
            }
            let mut left_group = Group::from_members([i]);
            let mut right_group = Group::from_members([i + 1]);
            for (k, &(og, j)) in others.iter().enumerate() {
                if og != gi {
                    continue;
                }
                match choices[k] {
                    0 => {
                        left_group.insert(j);
                        right_group.insert(j);
                    }
                    1 => {
                        left_group.insert(j);
                    }
                    _ => {
                        right_group.insert(j);
                    }
                }
            }
            structure.push(left_group);
            structure.push(right_group);
        }
        out.push(Cirquent::new(pool.clone(), structure).expect("indices in range"));
    }
    out
}

// ---------------------------------------------------------------------------
// Proof files.
//
//   <id>: <TAG> <params> [from <id> [<id>]] [expect <cirquent>]
//
// Ids are positive integers, each defined before use; the last line is the
// root.  Blank lines and lines starting with '#' are skipped.

impl fmt::Display for RuleApp {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleApp::AxiomEmpty => write!(out, "EMPTY"),
            RuleApp::AxiomId(f) => write!(out, "ID {f}"),
            RuleApp::AxiomTop => write!(out, "TOP"),
            RuleApp::Mix => write!(out, "MIX"),
            RuleApp::ExchF(i) => write!(out, "EXCH_F {i}"),
            RuleApp::ExchG(g) => write!(out, "EXCH_G {g}"),
            RuleApp::WeakPool(i, f) => write!(out, "WEAK_P {i} {f}"),
            RuleApp::WeakGroup(g, i) => write!(out, "WEAK_G {g} {i}"),
            RuleApp::DupDown(g) => write!(out, "DUP_DOWN {g}"),
            RuleApp::DupUp(g) => write!(out, "DUP_UP {g}"),
            RuleApp::Contract(i) => write!(out, "CONTR {i}"),
            RuleApp::DisjIntro(i) => write!(out, "DISJ {i}"),
            RuleApp::ConjIntro(i) => write!(out, "CONJ {i}"),
        }
    }
}

pub fn write_proof(p: &Proof) -> String {
    let mut out = String::new();
    let mut next_id = 1;
    write_proof_node(p, &mut next_id, &mut out, true);
    out
}

fn write_proof_node(p: &Proof, next_id: &mut usize, out: &mut String, root: bool) -> usize {
    let premise_ids: Vec<usize> = p
        .premises
        .iter()
        .map(|q| write_proof_node(q, next_id, out, false))
        .collect();
    let id = *next_id;
    *next_id += 1;
    out.push_str(&format!("{id}: {}", p.rule));
    if !premise_ids.is_empty() {
        out.push_str(" from");
        for pid in premise_ids {
            out.push_str(&format!(" {pid}"));
        }
    }
    if root {
        out.push_str(&format!(" expect {}", p.conclusion));
    }
    out.push('\n');
    id
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProofFileError {
    #[error("line {line}: {err}")]
    Parse { line: usize, err: ParseError },
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: rule does not apply: {err}")]
    Rule { line: usize, err: RuleError },
    #[error("line {line}: expected conclusion {expected}, derived {derived}")]
    ExpectMismatch { line: usize, expected: Box<Cirquent>, derived: Box<Cirquent> },
    #[error("the proof file has no lines")]
    Empty,
}

/// Parse a proof file, replaying each rule to reconstruct the tree.  The
/// result is structurally valid by construction; `check_proof` then decides
/// membership in a particular system.
pub fn parse_proof(input: &str) -> Result<Proof, ProofFileError> {
    let mut by_id: std::collections::HashMap<usize, Proof> = std::collections::HashMap::new();
    let mut last: Option<usize> = None;
    for (lineno, raw) in input.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let malformed = |msg: &str| ProofFileError::Malformed { line: lineno, msg: msg.into() };
        let (id, rest) = match line.split_once(':') {
            Some((id_part, rest)) => match id_part.trim().parse::<usize>() {
                Ok(id) => (id, rest),
                Err(_) => return Err(malformed("expected '<id>:'")),
            },
            None => return Err(malformed("expected '<id>:'")),
        };
        let tokens = formula::tokenize(rest)
            .map_err(|err| ProofFileError::Parse { line: lineno, err })?;
        let mut p = Parser::new(&tokens, rest.len());
        let tag = match p.next() {
            Some(Token::Ident(t)) => t.clone(),
            _ => return Err(malformed("expected rule tag")),
        };
        let number = |p: &mut Parser<'_>| -> Result<usize, ProofFileError> {
            match p.next() {
                Some(Token::Number(n)) => Ok(*n),
                _ => Err(ProofFileError::Malformed {
                    line: lineno,
                    msg: "expected a number".into(),
                }),
            }
        };
        let rule = match tag.as_str() {
            "EMPTY" => RuleApp::AxiomEmpty,
            "TOP" => RuleApp::AxiomTop,
            "MIX" => RuleApp::Mix,
            "ID" => RuleApp::AxiomId(
                p.formula().map_err(|err| ProofFileError::Parse { line: lineno, err })?,
            ),
            "EXCH_F" => RuleApp::ExchF(number(&mut p)?),
            "EXCH_G" => RuleApp::ExchG(number(&mut p)?),
            "WEAK_P" => {
                let i = number(&mut p)?;
                let f = p.formula().map_err(|err| ProofFileError::Parse { line: lineno, err })?;
                RuleApp::WeakPool(i, f)
            }
            "WEAK_G" => {
                let g = number(&mut p)?;
                RuleApp::WeakGroup(g, number(&mut p)?)
            }
            "DUP_DOWN" => RuleApp::DupDown(number(&mut p)?),
            "DUP_UP" => RuleApp::DupUp(number(&mut p)?),
            "CONTR" => RuleApp::Contract(number(&mut p)?),
            "DISJ" => RuleApp::DisjIntro(number(&mut p)?),
            "CONJ" => RuleApp::ConjIntro(number(&mut p)?),
            other => return Err(malformed(&format!("unknown rule tag {other:?}"))),
        };
        let mut premises = Vec::new();
        if p.peek() == Some(&Token::Ident("from".to_string())) {
            p.next();
            while let Some(Token::Number(n)) = p.peek() {
                let n = *n;
                p.next();
                let premise = by_id
                    .get(&n)
                    .ok_or_else(|| malformed(&format!("premise id {n} not defined yet")))?;
                premises.push(premise.clone());
            }
            if premises.is_empty() {
                return Err(malformed("'from' requires at least one premise id"));
            }
        }
        let mut expected = None;
        if p.peek() == Some(&Token::Ident("expect".to_string())) {
            p.next();
            expected = Some(
                parse_cirquent_tokens(&mut p)
                    .map_err(|err| ProofFileError::Parse { line: lineno, err })?,
            );
        }
        p.expect_end()
            .map_err(|err| ProofFileError::Parse { line: lineno, err })?;
        let premise_conclusions: Vec<Cirquent> =
            premises.iter().map(|q: &Proof| q.conclusion.clone()).collect();
        let conclusion = apply(&rule, &premise_conclusions)
            .map_err(|err| ProofFileError::Rule { line: lineno, err })?;
        if let Some(expected) = expected {
            if expected != conclusion {
                return Err(ProofFileError::ExpectMismatch {
                    line: lineno,
                    expected: Box::new(expected),
                    derived: Box::new(conclusion),
                });
            }
        }
        by_id.insert(id, Proof { conclusion, rule, premises });
        last = Some(id);
    }
    let root = last.ok_or(ProofFileError::Empty)?;
    Ok(by_id.remove(&root).expect("root id present"))
}
