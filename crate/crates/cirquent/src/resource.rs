//! Abstract resources: an interface of gendered ports plus a monotone truth
//! table over situations (bit strings, one bit per port).
//!
//! Situations are ordered per-port: outputs may only grow, inputs may only
//! shrink.  A resource must be monotone with respect to that order.  The
//! first port is the most significant bit of a situation's table index, so
//! ascending index order equals ascending bit-string order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::cirquent::{Cirquent, Group};
use crate::formula::{Atom, AtomSort, Formula, FreshAtoms, Sign};
use crate::inference::{Proof, RuleApp};
use crate::{CapExceeded, Caps};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gender {
    Input,
    Output,
}

/// A gendered occurrence of a general atom.  Written `Name` (output) or
/// `-Name` (input).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Port {
    pub atom: Atom,
    pub gender: Gender,
}

impl Port {
    pub fn output(atom: Atom) -> Port {
        Port { atom, gender: Gender::Output }
    }

    pub fn input(atom: Atom) -> Port {
        Port { atom, gender: Gender::Input }
    }

    pub fn flipped(&self) -> Port {
        Port {
            atom: self.atom.clone(),
            gender: match self.gender {
                Gender::Input => Gender::Output,
                Gender::Output => Gender::Input,
            },
        }
    }
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.gender == Gender::Input {
            write!(f, "-")?;
        }
        write!(f, "{}", self.atom)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Interface(pub Vec<Port>);

impl Interface {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `s <= s'`: every output grows or stays, every input shrinks or stays.
    pub fn leq(&self, s: &[bool], t: &[bool]) -> bool {
        debug_assert_eq!(s.len(), self.len());
        debug_assert_eq!(t.len(), self.len());
        self.0.iter().enumerate().all(|(j, port)| match port.gender {
            Gender::Output => s[j] <= t[j],
            Gender::Input => t[j] <= s[j],
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ResourceError {
    #[error("table has {got} entries, interface with {ports} ports needs {want}")]
    TableSize { ports: usize, want: usize, got: usize },
    #[error("not monotone: situation {smaller} is true but the larger situation {larger} is false")]
    NonMonotone { smaller: String, larger: String },
    #[error("only general atoms can serve as ports; found {0}")]
    NonGeneralAtom(Atom),
    #[error("choice connectives have no resource reading")]
    ChoiceConnective,
    #[error(transparent)]
    Cap(#[from] CapExceeded),
}

/// An interface together with a monotone total truth table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Resource {
    interface: Interface,
    table: Vec<bool>,
}

pub fn situation_bits(index: usize, n: usize) -> Vec<bool> {
    (0..n).map(|j| index >> (n - 1 - j) & 1 == 1).collect()
}

pub fn situation_index(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| acc << 1 | b as usize)
}

pub fn situation_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

impl Resource {
    pub fn new(interface: Interface, table: Vec<bool>) -> Result<Resource, ResourceError> {
        let n = interface.len();
        if table.len() != 1usize << n {
            return Err(ResourceError::TableSize {
                ports: n,
                want: 1usize << n,
                got: table.len(),
            });
        }
        for port in &interface.0 {
            if port.atom.sort != AtomSort::General {
                return Err(ResourceError::NonGeneralAtom(port.atom.clone()));
            }
        }
        let r = Resource { interface, table };
        if let Some((s, t)) = r.first_monotonicity_violation() {
            return Err(ResourceError::NonMonotone {
                smaller: situation_string(&situation_bits(s, n)),
                larger: situation_string(&situation_bits(t, n)),
            });
        }
        Ok(r)
    }

    /// The first covering pair `s < s'` with `s` true and `s'` false, in
    /// ascending index order.
    fn first_monotonicity_violation(&self) -> Option<(usize, usize)> {
        let n = self.interface.len();
        for s in 0..self.table.len() {
            if !self.table[s] {
                continue;
            }
            for j in 0..n {
                let bit = 1usize << (n - 1 - j);
                // flip bit j in the direction that makes the situation larger
                let t = match self.interface.0[j].gender {
                    Gender::Output if s & bit == 0 => s | bit,
                    Gender::Input if s & bit != 0 => s & !bit,
                    _ => continue,
                };
                if !self.table[t] {
                    return Some((s, t));
                }
            }
        }
        None
    }

    pub fn interface(&self) -> &Interface {
        &self.interface
    }

    pub fn truth(&self, bits: &[bool]) -> bool {
        self.table[situation_index(bits)]
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    /// `(bits, value)` rows in ascending order.
    pub fn rows(&self) -> impl Iterator<Item = (Vec<bool>, bool)> + '_ {
        let n = self.interface.len();
        (0..self.table.len()).map(move |s| (situation_bits(s, n), self.table[s]))
    }

    /// The always-false resource on the empty interface.
    pub fn zero() -> Resource {
        Resource { interface: Interface::default(), table: vec![false] }
    }

    /// The always-true resource on the empty interface.
    pub fn one() -> Resource {
        Resource { interface: Interface::default(), table: vec![true] }
    }

    /// The atomic resource: one output port, delivered or not.
    pub fn atomic(atom: Atom) -> Result<Resource, ResourceError> {
        if atom.sort != AtomSort::General {
            return Err(ResourceError::NonGeneralAtom(atom));
        }
        Ok(Resource {
            interface: Interface(vec![Port::output(atom)]),
            table: vec![false, true],
        })
    }

    pub fn neg(&self) -> Resource {
        Resource {
            interface: Interface(self.interface.0.iter().map(Port::flipped).collect()),
            table: self.table.iter().map(|&b| !b).collect(),
        }
    }

    fn combine(&self, other: &Resource, op: impl Fn(bool, bool) -> bool) -> Resource {
        let mut interface = self.interface.0.clone();
        interface.extend(other.interface.0.iter().cloned());
        let mut table = Vec::with_capacity(self.table.len() * other.table.len());
        for s1 in 0..self.table.len() {
            for s2 in 0..other.table.len() {
                table.push(op(self.table[s1], other.table[s2]));
            }
        }
        Resource { interface: Interface(interface), table }
    }

    pub fn conj(&self, other: &Resource) -> Resource {
        self.combine(other, |a, b| a && b)
    }

    pub fn disj(&self, other: &Resource) -> Resource {
        self.combine(other, |a, b| a || b)
    }

    /// `a -> b` = `!a | b`: the interface is the negation of `a`'s followed
    /// by `b`'s, and the result is true unless `a` holds and `b` fails.
    pub fn impl_(&self, other: &Resource) -> Resource {
        self.neg().disj(other)
    }
}

/// One port per literal occurrence: positive occurrences are outputs,
/// negative ones inputs.
fn occurrence_interface(
    lits: &[(Sign, Atom)],
    caps: &Caps,
) -> Result<Interface, ResourceError> {
    if lits.len() > caps.max_ports {
        return Err(CapExceeded {
            what: "ports",
            limit: caps.max_ports,
            actual: lits.len(),
        }
        .into());
    }
    let mut ports = Vec::with_capacity(lits.len());
    for (sign, atom) in lits {
        if atom.sort != AtomSort::General {
            return Err(ResourceError::NonGeneralAtom(atom.clone()));
        }
        ports.push(match sign {
            Sign::Pos => Port::output(atom.clone()),
            Sign::Neg => Port::input(atom.clone()),
        });
    }
    Ok(Interface(ports))
}

/// The resource reading of a choice-free formula over general atoms.
pub fn formula_to_resource(f: &Formula, caps: &Caps) -> Result<Resource, ResourceError> {
    let lits: Vec<(Sign, Atom)> =
        f.oliterals().into_iter().map(|(_, s, a)| (s, a)).collect();
    let interface = occurrence_interface(&lits, caps)?;
    let n = interface.len();
    let chunks = crate::semantics::situation_formula_chunks(f, n)
        .map_err(|_| ResourceError::ChoiceConnective)?;
    let table = (0..1usize << n).map(|s| chunks[s >> 6] >> (s & 63) & 1 == 1).collect();
    Ok(Resource { interface, table })
}

/// The resource reading of a cirquent over general atoms.
pub fn cirquent_to_resource(c: &Cirquent, caps: &Caps) -> Result<Resource, ResourceError> {
    let lits: Vec<(Sign, Atom)> =
        c.oliterals().into_iter().map(|(_, _, s, a)| (s, a)).collect();
    let interface = occurrence_interface(&lits, caps)?;
    let n = interface.len();
    let chunks = crate::semantics::situation_table_chunks(c, n)
        .map_err(|_| ResourceError::ChoiceConnective)?;
    let table = (0..1usize << n).map(|s| chunks[s >> 6] >> (s & 63) & 1 == 1).collect();
    Ok(Resource { interface, table })
}

/// Situations where the resource is false but every strictly larger
/// situation makes it true, in ascending order.  By monotonicity it is
/// enough to look at the covering neighbours.
pub fn critical_situations(r: &Resource) -> Vec<Vec<bool>> {
    let n = r.interface.len();
    let mut out = Vec::new();
    for s in 0..r.table.len() {
        if r.table[s] {
            continue;
        }
        let mut critical = true;
        for j in 0..n {
            let bit = 1usize << (n - 1 - j);
            let t = match r.interface.0[j].gender {
                Gender::Output if s & bit == 0 => s | bit,
                Gender::Input if s & bit != 0 => s & !bit,
                _ => continue,
            };
            if !r.table[t] {
                critical = false;
                break;
            }
        }
        if critical {
            out.push(situation_bits(s, n));
        }
    }
    out
}

/// The canonical cirquent with the same resource reading: one oliteral per
/// port, one ogroup per critical situation, holding the oliterals that are
/// false there.
pub fn represent(r: &Resource) -> Cirquent {
    let pool: Vec<Formula> = r
        .interface
        .0
        .iter()
        .map(|p| match p.gender {
            Gender::Output => Formula::lit(p.atom.clone()),
            Gender::Input => Formula::neg_lit(p.atom.clone()),
        })
        .collect();
    let structure: Vec<Group> = critical_situations(r)
        .iter()
        .map(|s| {
            (1..=pool.len())
                .filter(|&j| {
                    // oliteral j is false in s
                    s[j - 1]
                        == match r.interface.0[j - 1].gender {
                            Gender::Output => false,
                            Gender::Input => true,
                        }
                })
                .collect()
        })
        .collect();
    Cirquent::new(pool, structure).expect("indices in range")
}

// ---------------------------------------------------------------------------
// Arrangements.

/// Wiring of oinputs to ooutputs of the same type, `alloc <input> -> <output>`
/// over 1-based port positions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Arrangement {
    /// `(input port, output port)` pairs in ascending order.
    pub allocations: BTreeSet<(usize, usize)>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArrangementError {
    #[error("allocation {input} -> {output}: {reason}")]
    BadAllocation { input: usize, output: usize, reason: String },
}

impl Arrangement {
    pub fn new(
        allocations: impl IntoIterator<Item = (usize, usize)>,
        interface: &Interface,
    ) -> Result<Arrangement, ArrangementError> {
        let allocations: BTreeSet<(usize, usize)> = allocations.into_iter().collect();
        for &(i, o) in &allocations {
            let bad = |reason: &str| ArrangementError::BadAllocation {
                input: i,
                output: o,
                reason: reason.to_string(),
            };
            let pi = interface.0.get(i.wrapping_sub(1)).ok_or_else(|| bad("no such port"))?;
            let po = interface.0.get(o.wrapping_sub(1)).ok_or_else(|| bad("no such port"))?;
            if pi.gender != Gender::Input {
                return Err(bad("first port is not an input"));
            }
            if po.gender != Gender::Output {
                return Err(bad("second port is not an output"));
            }
            if pi.atom != po.atom {
                return Err(bad("ports have different types"));
            }
        }
        Ok(Arrangement { allocations })
    }

    /// No oport is used by two allocations.
    pub fn is_monogamous(&self) -> bool {
        let mut used = BTreeSet::new();
        self.allocations
            .iter()
            .all(|&(i, o)| used.insert(i) && used.insert(o))
    }
}

impl fmt::Display for Arrangement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &(i, o) in &self.allocations {
            writeln!(f, "alloc {i} -> {o}")?;
        }
        Ok(())
    }
}

/// Parse `alloc <i> -> <j>` lines (blank lines and `#` comments skipped).
pub fn parse_arrangement(input: &str) -> Result<Vec<(usize, usize)>, String> {
    let mut out = Vec::new();
    for (lineno, raw) in input.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        match parts.as_slice() {
            ["alloc", i, "->", o] => {
                let i: usize = i.parse().map_err(|_| format!("line {}: bad input index", lineno + 1))?;
                let o: usize = o.parse().map_err(|_| format!("line {}: bad output index", lineno + 1))?;
                out.push((i, o));
            }
            _ => return Err(format!("line {}: expected 'alloc <i> -> <j>'", lineno + 1)),
        }
    }
    Ok(out)
}

/// A situation cooperates with an arrangement when no allocated input is
/// satisfied beyond what its output delivers.
pub fn is_consistent(a: &Arrangement, bits: &[bool]) -> bool {
    a.allocations.iter().all(|&(i, o)| bits[i - 1] <= bits[o - 1])
}

/// True in every consistent situation.
pub fn is_trivializing(r: &Resource, a: &Arrangement) -> bool {
    r.rows().all(|(bits, value)| value || !is_consistent(a, &bits))
}

/// Every possible allocation at once (in general not monogamous).
pub fn greedy_arrangement(r: &Resource) -> Arrangement {
    let mut allocations = BTreeSet::new();
    for (i, pi) in r.interface.0.iter().enumerate() {
        if pi.gender != Gender::Input {
            continue;
        }
        for (o, po) in r.interface.0.iter().enumerate() {
            if po.gender == Gender::Output && po.atom == pi.atom {
                allocations.insert((i + 1, o + 1));
            }
        }
    }
    Arrangement { allocations }
}

/// First monogamous trivializing arrangement in deterministic order, if
/// any: inputs are considered in port order, and each either stays
/// unallocated or is wired to the first untried compatible output.
pub fn is_trivial(r: &Resource, caps: &Caps) -> Result<Option<Arrangement>, ResourceError> {
    let n = r.interface.len();
    if n > caps.max_ports {
        return Err(CapExceeded { what: "ports", limit: caps.max_ports, actual: n }.into());
    }
    let inputs: Vec<usize> = (1..=n)
        .filter(|&j| r.interface.0[j - 1].gender == Gender::Input)
        .collect();
    let mut chosen: Vec<(usize, usize)> = Vec::new();
    let mut used_outputs: BTreeSet<usize> = BTreeSet::new();
    fn search(
        r: &Resource,
        inputs: &[usize],
        k: usize,
        chosen: &mut Vec<(usize, usize)>,
        used_outputs: &mut BTreeSet<usize>,
    ) -> Option<Arrangement> {
        if k == inputs.len() {
            let a = Arrangement { allocations: chosen.iter().copied().collect() };
            debug_assert!(a.is_monogamous());
            return if is_trivializing(r, &a) { Some(a) } else { None };
        }
        let i = inputs[k];
        // leave input i unallocated
        if let Some(a) = search(r, inputs, k + 1, chosen, used_outputs) {
            return Some(a);
        }
        for o in 1..=r.interface.len() {
            let po = &r.interface.0[o - 1];
            if po.gender != Gender::Output
                || po.atom != r.interface.0[i - 1].atom
                || used_outputs.contains(&o)
            {
                continue;
            }
            chosen.push((i, o));
            used_outputs.insert(o);
            let found = search(r, inputs, k + 1, chosen, used_outputs);
            chosen.pop();
            used_outputs.remove(&o);
            if found.is_some() {
                return found;
            }
        }
        None
    }
    Ok(search(r, &inputs, 0, &mut chosen, &mut used_outputs))
}

// ---------------------------------------------------------------------------
// Extracting an arrangement from a contraction-free proof.
//
// Each node of the proof is annotated bottom-up with a binary tautology over
// fresh atoms whose instance is the node's conclusion: identity axioms
// introduce a married fresh atom, pool weakenings a single fresh atom, mixes
// keep the premise alphabets apart, and every other rule carries the
// annotation through unchanged.  At the root, the married atoms couple the
// corresponding copies' oliterals positionwise.

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtractError {
    #[error("the proof uses contraction; only contraction-free proofs carry an arrangement")]
    ContractionPresent,
    #[error("the proof uses the $T axiom; only contraction-free CL5 proofs carry an arrangement")]
    TopAxiomPresent,
    #[error(transparent)]
    Resource(#[from] ResourceError),
    #[error("extraction failed: {0}")]
    Internal(String),
}

pub fn extract_arrangement(p: &Proof, caps: &Caps) -> Result<Arrangement, ExtractError> {
    let resource = cirquent_to_resource(&p.conclusion, caps)?;
    let mut fresh = FreshAtoms::new();
    let (b, sub) = annotate(p, &mut fresh)?;
    debug_assert_eq!(b.apply_substitution(&sub), p.conclusion);

    // locate the copies of each fresh atom inside the conclusion
    type Copy_ = (Sign, Vec<(usize, Sign, Atom)>);
    let mut copies: BTreeMap<Atom, Vec<Copy_>> = BTreeMap::new();
    let mut base = 0usize;
    for (bf, cf) in b.pool().iter().zip(p.conclusion.pool()) {
        collect_copies(bf, cf, &mut base, &mut copies)?;
    }

    let mut allocations = BTreeSet::new();
    for (atom, occs) in copies {
        match occs.len() {
            1 => {}
            2 => {
                let (first, second) = (&occs[0], &occs[1]);
                let (pos_copy, neg_copy) = match (first.0, second.0) {
                    (Sign::Pos, Sign::Neg) => (&first.1, &second.1),
                    (Sign::Neg, Sign::Pos) => (&second.1, &first.1),
                    _ => {
                        return Err(ExtractError::Internal(format!(
                            "atom {atom} has two same-sign occurrences in the annotation"
                        )))
                    }
                };
                if pos_copy.len() != neg_copy.len() {
                    return Err(ExtractError::Internal(format!(
                        "copies of {atom} have different oliteral counts"
                    )));
                }
                for (p_lit, n_lit) in pos_copy.iter().zip(neg_copy) {
                    let (p_pos, p_sign, p_atom) = p_lit;
                    let (n_pos, n_sign, n_atom) = n_lit;
                    if p_atom != n_atom || *n_sign != p_sign.flip() {
                        return Err(ExtractError::Internal(format!(
                            "copies of {atom} are not each other's negation"
                        )));
                    }
                    // wire the negative oliteral (an input) to the positive one
                    match p_sign {
                        Sign::Pos => allocations.insert((*n_pos, *p_pos)),
                        Sign::Neg => allocations.insert((*p_pos, *n_pos)),
                    };
                }
            }
            n => {
                return Err(ExtractError::Internal(format!(
                    "atom {atom} occurs {n} times in the annotation"
                )))
            }
        }
    }
    let arrangement = Arrangement::new(allocations, resource.interface())
        .map_err(|e| ExtractError::Internal(e.to_string()))?;
    if !arrangement.is_monogamous() {
        return Err(ExtractError::Internal("extracted arrangement is not monogamous".into()));
    }
    if !is_trivializing(&resource, &arrangement) {
        return Err(ExtractError::Internal("extracted arrangement is not trivializing".into()));
    }
    Ok(arrangement)
}

fn annotate(
    p: &Proof,
    fresh: &mut FreshAtoms,
) -> Result<(Cirquent, crate::formula::Substitution), ExtractError> {
    use crate::inference::apply;
    let carry = |rule: &RuleApp, p: &Proof, fresh: &mut FreshAtoms| {
        let (b, sub) = annotate(&p.premises[0], fresh)?;
        let b = apply(rule, &[b]).map_err(|e| {
            ExtractError::Internal(format!("annotation does not follow the proof: {e}"))
        })?;
        Ok((b, sub))
    };
    match &p.rule {
        RuleApp::Contract(_) => Err(ExtractError::ContractionPresent),
        RuleApp::AxiomTop => Err(ExtractError::TopAxiomPresent),
        RuleApp::AxiomEmpty => Ok((Cirquent::empty(), crate::formula::Substitution::new())),
        RuleApp::AxiomId(f) => {
            let x = fresh.general();
            let b = apply(&RuleApp::AxiomId(Formula::lit(x.clone())), &[]).expect("axiom");
            let mut sub = crate::formula::Substitution::new();
            sub.bind(x, f.clone());
            Ok((b, sub))
        }
        RuleApp::Mix => {
            let (b1, s1) = annotate(&p.premises[0], fresh)?;
            let (b2, s2) = annotate(&p.premises[1], fresh)?;
            let b = apply(&RuleApp::Mix, &[b1, b2]).expect("mix");
            let mut sub = s1;
            for (atom, image) in s2.iter() {
                sub.bind(atom.clone(), image.clone());
            }
            Ok((b, sub))
        }
        RuleApp::WeakPool(i, f) => {
            let (b, mut sub) = annotate(&p.premises[0], fresh)?;
            let x = fresh.general();
            let b = apply(&RuleApp::WeakPool(*i, Formula::lit(x.clone())), &[b])
                .map_err(|e| ExtractError::Internal(e.to_string()))?;
            sub.bind(x, f.clone());
            Ok((b, sub))
        }
        rule => carry(rule, p, fresh),
    }
}

#[allow(clippy::type_complexity)]
fn collect_copies(
    bf: &Formula,
    cf: &Formula,
    base: &mut usize,
    out: &mut BTreeMap<Atom, Vec<(Sign, Vec<(usize, Sign, Atom)>)>>,
) -> Result<(), ExtractError> {
    match (bf, cf) {
        (Formula::Literal(sign, atom), _) => {
            let lits: Vec<(usize, Sign, Atom)> = cf
                .oliterals()
                .into_iter()
                .enumerate()
                .map(|(k, (_, s, a))| (*base + k + 1, s, a))
                .collect();
            *base += lits.len();
            out.entry(atom.clone()).or_default().push((*sign, lits));
            Ok(())
        }
        (Formula::Conj(a1, b1), Formula::Conj(a2, b2))
        | (Formula::Disj(a1, b1), Formula::Disj(a2, b2)) => {
            collect_copies(a1, a2, base, out)?;
            collect_copies(b1, b2, base, out)
        }
        _ => Err(ExtractError::Internal(
            "annotation and conclusion have different shapes".into(),
        )),
    }
}

// ---------------------------------------------------------------------------
// Textual format:
//
//   resource { ports: [ -Fuel, Power ]; true: [ 00, 01, 11 ] }
//
// Situations absent from the `true` list are false.  The loader rejects
// non-monotone tables, reporting the first violating covering pair.

impl fmt::Display for Resource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "resource {{ ports: [")?;
        for (j, port) in self.interface.0.iter().enumerate() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, " {port}")?;
        }
        write!(f, " ]; true: [")?;
        let mut first = true;
        for (bits, value) in self.rows() {
            if value {
                if !first {
                    write!(f, ",")?;
                }
                if self.interface.is_empty() {
                    write!(f, " e")?;
                } else {
                    write!(f, " {}", situation_string(&bits))?;
                }
                first = false;
            }
        }
        write!(f, " ] }}")
    }
}

fn eat<'a>(s: &mut &'a str, prefix: &str) -> Result<(), String> {
    match s.strip_prefix(prefix) {
        Some(rest) => {
            *s = rest.trim_start();
            Ok(())
        }
        None => Err(format!("expected {prefix:?} at {:.20?}", *s)),
    }
}

pub fn parse_resource(input: &str) -> Result<Resource, String> {
    let mut s = input.trim();
    eat(&mut s, "resource")?;
    eat(&mut s, "{")?;
    eat(&mut s, "ports")?;
    eat(&mut s, ":")?;
    eat(&mut s, "[")?;
    let (ports_text, rest) = s
        .split_once(']')
        .ok_or_else(|| "unterminated port list".to_string())?;
    let mut ports = Vec::new();
    for item in ports_text.split(',') {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        let (gender, name) = match item.strip_prefix('-') {
            Some(name) => (Gender::Input, name.trim()),
            None => (Gender::Output, item),
        };
        if !name.starts_with(|c: char| c.is_ascii_uppercase())
            || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        {
            return Err(format!("bad port name {name:?}: ports are general atoms"));
        }
        ports.push(Port { atom: Atom::general(name), gender });
    }
    s = rest.trim_start();
    eat(&mut s, ";")?;
    eat(&mut s, "true")?;
    eat(&mut s, ":")?;
    eat(&mut s, "[")?;
    let (trues_text, rest) = s
        .split_once(']')
        .ok_or_else(|| "unterminated situation list".to_string())?;
    let n = ports.len();
    let mut table = vec![false; 1usize << n];
    for item in trues_text.split(',') {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        if item == "e" {
            // the empty situation, for empty interfaces
            if n != 0 {
                return Err(format!("situation {item:?} has 0 bits, expected {n}"));
            }
            table[0] = true;
            continue;
        }
        if item.len() != n || !item.chars().all(|c| c == '0' || c == '1') {
            return Err(format!("bad situation {item:?}: expected {n} bits"));
        }
        let bits: Vec<bool> = item.chars().map(|c| c == '1').collect();
        table[situation_index(&bits)] = true;
    }
    s = rest.trim_start();
    if let Some(rest) = s.strip_prefix(';') {
        s = rest.trim_start();
    }
    if s != "}" {
        return Err(format!("expected closing '}}', found {s:.20?}"));
    }
    Resource::new(Interface(ports), table).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cirquent::parse_cirquent;
    use crate::formula::parse;
    use crate::inference::{check_proof, System};

    fn res(f: &str) -> Resource {
        formula_to_resource(&parse(f).unwrap(), &Caps::default()).unwrap()
    }

    fn table_of(r: &Resource) -> Vec<u8> {
        r.table().iter().map(|&b| b as u8).collect()
    }

    #[test]
    fn generator_table() {
        let generator = res("!Fuel | Power");
        assert_eq!(
            generator.interface().0,
            vec![Port::input(Atom::general("Fuel")), Port::output(Atom::general("Power"))]
        );
        // rows 00, 01, 10, 11
        assert_eq!(table_of(&generator), vec![1, 1, 0, 1]);
    }

    #[test]
    fn generator_and_lamp_table() {
        let both = res("(!Fuel | Power) & (!Power | Light)");
        assert_eq!(both.interface().len(), 4);
        let false_rows: Vec<String> = both
            .rows()
            .filter(|(_, v)| !v)
            .map(|(bits, _)| situation_string(&bits))
            .collect();
        assert_eq!(
            false_rows,
            ["0010", "0110", "1000", "1001", "1010", "1011", "1110"]
        );
        // the same resource via the combinators
        assert_eq!(res("!Fuel | Power").conj(&res("!Power | Light")), both);
    }

    #[test]
    fn situation_order() {
        let r = res("!Fuel | Power");
        let i = r.interface();
        // inputs shrink, outputs grow
        assert!(i.leq(&[true, false], &[false, true]));
        assert!(!i.leq(&[false, true], &[true, false]));
        assert!(i.leq(&[true, true], &[true, true]));
        assert!(!i.leq(&[false, false], &[true, true]));
    }

    #[test]
    fn monotonicity_is_enforced() {
        // an output that stops being delivered when grown: not monotone
        let bad = Resource::new(
            Interface(vec![Port::output(Atom::general("P"))]),
            vec![true, false],
        );
        assert!(matches!(bad, Err(ResourceError::NonMonotone { .. })));
        let ok = Resource::new(
            Interface(vec![Port::output(Atom::general("P"))]),
            vec![false, true],
        )
        .unwrap();
        assert_eq!(ok, Resource::atomic(Atom::general("P")).unwrap());
    }

    #[test]
    fn algebraic_identities() {
        let a = res("!Fuel | Power");
        assert_eq!(a.neg().neg(), a);
        assert_eq!(a.impl_(&Resource::zero()), a.neg());
        let b = res("Light & Power");
        assert_eq!(a.conj(&b).neg(), a.neg().disj(&b.neg()));
        assert_eq!(a.disj(&b).neg(), a.neg().conj(&b.neg()));
        assert_eq!(a.impl_(&b), a.neg().disj(&b));
    }

    #[test]
    fn clubsuit_is_homomorphic() {
        let f = parse("!P | Q").unwrap();
        let g = parse("Q & !R").unwrap();
        let caps = Caps::default();
        let rf = formula_to_resource(&f, &caps).unwrap();
        let rg = formula_to_resource(&g, &caps).unwrap();
        assert_eq!(formula_to_resource(&Formula::conj(f.clone(), g.clone()), &caps).unwrap(), rf.conj(&rg));
        assert_eq!(formula_to_resource(&Formula::disj(f.clone(), g.clone()), &caps).unwrap(), rf.disj(&rg));
        assert_eq!(formula_to_resource(&f.negate(), &caps).unwrap(), rf.neg());
    }

    #[test]
    fn two_of_three_representation() {
        // true when at least two of P, Q, R are delivered
        let interface = Interface(vec![
            Port::output(Atom::general("P")),
            Port::output(Atom::general("Q")),
            Port::output(Atom::general("R")),
        ]);
        let table: Vec<bool> = (0..8)
            .map(|s: usize| s.count_ones() >= 2)
            .collect();
        let beta = Resource::new(interface, table).unwrap();
        assert_eq!(
            critical_situations(&beta)
                .iter()
                .map(|b| situation_string(b))
                .collect::<Vec<_>>(),
            ["001", "010", "100"]
        );
        let c = represent(&beta);
        assert_eq!(c, parse_cirquent("[ P ; Q ; R ] {1 2} {1 3} {2 3}").unwrap());
        assert_eq!(cirquent_to_resource(&c, &Caps::default()).unwrap(), beta);
    }

    #[test]
    fn constants_round_trip() {
        assert_eq!(represent(&Resource::zero()), parse_cirquent("[] {}").unwrap());
        assert_eq!(represent(&Resource::one()), Cirquent::empty());
        assert_eq!(
            cirquent_to_resource(&represent(&Resource::zero()), &Caps::default()).unwrap(),
            Resource::zero()
        );
    }

    #[test]
    fn text_format() {
        let r = res("!Fuel | Power");
        let text = r.to_string();
        assert_eq!(text, "resource { ports: [ -Fuel, Power ]; true: [ 00, 01, 11 ] }");
        assert_eq!(parse_resource(&text).unwrap(), r);
        assert_eq!(parse_resource(&Resource::one().to_string()).unwrap(), Resource::one());
        assert_eq!(parse_resource(&Resource::zero().to_string()).unwrap(), Resource::zero());
        // non-monotone input rejected with the first violating pair
        let bad = "resource { ports: [ P ]; true: [ 0 ] }";
        let e = parse_resource(bad).unwrap_err();
        assert!(e.contains("0") && e.contains("1"), "{e}");
    }

    #[test]
    fn arrangements() {
        // P -> P: trivial via the single wiring
        let r = res("!P | P");
        let a = Arrangement::new([(1, 2)], r.interface()).unwrap();
        assert!(a.is_monogamous());
        assert!(is_trivializing(&r, &a));
        assert!(!is_trivializing(&r, &Arrangement::default()));
        assert_eq!(is_trivial(&r, &Caps::default()).unwrap(), Some(a));
        // P -> P & P is not trivial
        let r2 = res("!P | (P & P)");
        assert_eq!(is_trivial(&r2, &Caps::default()).unwrap(), None);
        // but its greedy arrangement has both wirings
        assert_eq!(greedy_arrangement(&r2).allocations.len(), 2);
        // gender and type are enforced
        assert!(Arrangement::new([(2, 1)], r.interface()).is_err());
        let rq = res("!P | Q");
        assert!(Arrangement::new([(1, 2)], rq.interface()).is_err());
    }

    #[test]
    fn arrangement_text() {
        let a = Arrangement { allocations: [(1, 2), (3, 4)].into_iter().collect() };
        let text = a.to_string();
        assert_eq!(parse_arrangement(&text).unwrap(), vec![(1, 2), (3, 4)]);
        assert!(parse_arrangement("alloc x -> 2").is_err());
    }

    #[test]
    fn extraction_from_an_axiom_chain() {
        // !P | P proved from one axiom + disjunction introduction
        let ax = Proof::leaf(RuleApp::AxiomId(parse("P").unwrap()));
        let rule = RuleApp::DisjIntro(1);
        let conclusion = crate::inference::apply(&rule, &[ax.conclusion.clone()]).unwrap();
        let p = Proof { conclusion, rule, premises: vec![ax] };
        assert!(check_proof(&p, &System::cl5()).is_ok());
        let a = extract_arrangement(&p, &Caps::default()).unwrap();
        assert_eq!(a.allocations, [(1, 2)].into_iter().collect());
    }
}
