//! Deciders and constructive provers.
//!
//! `prove_ccc` turns any tautological cirquent into a full-calculus proof;
//! `decide_binary_instance` searches for a normal binary tautology the input
//! instantiates, and `prove_cl5` turns a successful search into a
//! contraction-free proof; `prove_affine` is a complete backward search in
//! the affine sequent calculus, whose proofs `translate_sequent_proof` maps
//! into primitive cirquent proofs.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::cirquent::{Cirquent, Sequent};
use crate::formula::{
    self, Atom, Formula, FreshAtoms, ParseError, Parser, Sign, Substitution, Token,
};
use crate::inference::{
    apply, check_proof, substitute_proof, Proof, RuleApp, System, Violation,
};
use crate::semantics::{binarity, is_tautology, Binarity};
use crate::{CapExceeded, Caps};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecideError {
    #[error(transparent)]
    Cap(#[from] CapExceeded),
    #[error("choice connectives are outside the classical deciders")]
    Choice,
    #[error("logical atoms are outside this decider's language")]
    LogicalAtom,
}

fn eval_err(e: crate::semantics::EvalError) -> DecideError {
    match e {
        crate::semantics::EvalError::Cap(c) => DecideError::Cap(c),
        _ => DecideError::Choice,
    }
}

fn require_classical(c: &Cirquent) -> Result<(), DecideError> {
    if !c.pool().iter().all(Formula::is_classical) {
        return Err(DecideError::Choice);
    }
    Ok(())
}

fn require_nonlogical(c: &Cirquent) -> Result<(), DecideError> {
    if c.atoms().iter().any(Atom::is_logical) {
        return Err(DecideError::LogicalAtom);
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Binary tautology instances.

/// Pairs of complementary oliteral positions (negative occurrence first),
/// 1-based over the whole pool left to right.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Coupling {
    pub pairs: BTreeSet<(usize, usize)>,
}

/// Search for a normal binary tautology that `c` instantiates by renaming
/// oatoms, coupled occurrences sharing a name.  Per atom, every maximal
/// injective matching of negative against positive occurrences is tried,
/// atoms in first-occurrence order and matchings in lexicographic order;
/// the first renaming that is a tautology wins.  Non-maximal matchings need
/// not be tried: coupling two more occurrences only identifies two atoms of
/// the renaming, and an instance of a tautology is a tautology.
pub fn decide_binary_instance(
    c: &Cirquent,
    caps: &Caps,
) -> Result<Option<(Cirquent, Coupling)>, DecideError> {
    Ok(decide_binary_instance_full(c, caps)?.map(|(d, coupling, _)| (d, coupling)))
}

pub(crate) fn decide_binary_instance_full(
    c: &Cirquent,
    caps: &Caps,
) -> Result<Option<(Cirquent, Coupling, Substitution)>, DecideError> {
    require_classical(c)?;
    require_nonlogical(c)?;
    let lits = c.oliterals();
    if lits.len() > caps.max_oliterals {
        return Err(CapExceeded {
            what: "oliterals",
            limit: caps.max_oliterals,
            actual: lits.len(),
        }
        .into());
    }
    // occurrences per atom, in first-occurrence order
    let mut order: Vec<Atom> = Vec::new();
    let mut negs: BTreeMap<Atom, Vec<usize>> = BTreeMap::new();
    let mut poss: BTreeMap<Atom, Vec<usize>> = BTreeMap::new();
    for (j, (_, _, sign, atom)) in lits.iter().enumerate() {
        if !order.contains(atom) {
            order.push(atom.clone());
        }
        match sign {
            Sign::Neg => negs.entry(atom.clone()).or_default().push(j + 1),
            Sign::Pos => poss.entry(atom.clone()).or_default().push(j + 1),
        }
    }
    for atom in &order {
        let occurrences = negs.get(atom).map_or(0, Vec::len) + poss.get(atom).map_or(0, Vec::len);
        if occurrences > caps.max_occurrences_per_atom {
            return Err(CapExceeded {
                what: "occurrences of one atom",
                limit: caps.max_occurrences_per_atom,
                actual: occurrences,
            }
            .into());
        }
    }
    // a renaming of a non-tautology is never a tautology, since the input
    // is a substitution instance of every renaming
    let taut_caps = Caps { max_atoms: caps.max_oliterals, ..*caps };
    if !is_tautology(c, &taut_caps).map_err(eval_err)? {
        return Ok(None);
    }
    let per_atom: Vec<Vec<Vec<(usize, usize)>>> = order
        .iter()
        .map(|atom| {
            maximal_matchings(
                negs.get(atom).map_or(&[][..], Vec::as_slice),
                poss.get(atom).map_or(&[][..], Vec::as_slice),
            )
        })
        .collect();
    // the tautology check runs over the fresh atoms of the renaming, whose
    // count is bounded by the oliteral count rather than max_atoms;
    // cross product over atoms, lexicographic
    let mut choice = vec![0usize; per_atom.len()];
    loop {
        let mut coupling = Coupling::default();
        for (k, matchings) in per_atom.iter().enumerate() {
            for &pair in &matchings[choice[k]] {
                coupling.pairs.insert(pair);
            }
        }
        let (d, sub) = rename_by_coupling(c, &lits, &coupling);
        debug_assert_eq!(binarity(&d), Binarity::NormalBinary);
        if is_tautology(&d, &taut_caps).map_err(eval_err)? {
            return Ok(Some((d, coupling, sub)));
        }
        // advance the odometer
        let mut k = per_atom.len();
        loop {
            if k == 0 {
                return Ok(None);
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < per_atom[k].len() {
                break;
            }
            choice[k] = 0;
        }
    }
}

/// All maximal injective matchings of `negs` against `poss` — those of
/// size min(|negs|, |poss|) — as sorted pair lists in lexicographic order.
fn maximal_matchings(negs: &[usize], poss: &[usize]) -> Vec<Vec<(usize, usize)>> {
    let size = negs.len().min(poss.len());
    let mut out = Vec::new();
    let mut used = vec![false; poss.len()];
    let mut current = Vec::new();
    fn go(
        negs: &[usize],
        poss: &[usize],
        size: usize,
        k: usize,
        used: &mut Vec<bool>,
        current: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if k == negs.len() {
            if current.len() == size {
                let mut m = current.clone();
                m.sort_unstable();
                out.push(m);
            }
            return;
        }
        // skipping this negative occurrence still permits a maximal matching
        // only when there are spare negatives
        if negs.len() - k > size - current.len() {
            go(negs, poss, size, k + 1, used, current, out);
        }
        for (p, &pp) in poss.iter().enumerate() {
            if used[p] {
                continue;
            }
            used[p] = true;
            current.push((negs[k], pp));
            go(negs, poss, size, k + 1, used, current, out);
            current.pop();
            used[p] = false;
        }
    }
    go(negs, poss, size, 0, &mut used, &mut current, &mut out);
    out.sort_unstable();
    out.dedup();
    out
}

/// Rename the oatoms of `c` so that coupled occurrences share a fresh atom
/// and every other occurrence gets its own.  Returns the renamed cirquent
/// and the substitution mapping fresh atoms back to the original ones.
fn rename_by_coupling(
    c: &Cirquent,
    lits: &[(usize, formula::OccRef, Sign, Atom)],
    coupling: &Coupling,
) -> (Cirquent, Substitution) {
    let mut partner: BTreeMap<usize, usize> = BTreeMap::new();
    for &(n, p) in &coupling.pairs {
        partner.insert(n, p);
        partner.insert(p, n);
    }
    let atoms = c.atoms();
    let mut fresh = FreshAtoms::avoiding(atoms.iter());
    let mut assigned: BTreeMap<usize, Atom> = BTreeMap::new();
    let mut sub = Substitution::new();
    let mut pool = c.pool().to_vec();
    for (j, (m, path, sign, atom)) in lits.iter().enumerate() {
        let j = j + 1;
        let new_atom = match assigned.get(&j) {
            Some(a) => a.clone(),
            None => {
                let a = fresh.general();
                sub.bind(a.clone(), Formula::lit(atom.clone()));
                if let Some(&p) = partner.get(&j) {
                    assigned.insert(p, a.clone());
                }
                a
            }
        };
        let lit = Formula::Literal(*sign, new_atom);
        pool[m - 1] = pool[m - 1].replace_at(path, lit).expect("valid path");
    }
    let d = Cirquent::new(pool, c.structure().to_vec()).expect("pool length unchanged");
    debug_assert_eq!(&d.apply_substitution(&sub), c);
    (d, sub)
}

// ---------------------------------------------------------------------------
// Bottom-up proof construction.

/// A stack of single-premise steps recorded top-down: `steps[k].1` follows
/// from the cirquent one level up by `steps[k].0`, and `cur` is the current
/// top.
struct BottomUp {
    steps: Vec<(RuleApp, Cirquent)>,
    cur: Cirquent,
}

impl BottomUp {
    fn new(c: Cirquent) -> BottomUp {
        BottomUp { steps: Vec::new(), cur: c }
    }

    fn push(&mut self, rule: RuleApp, premise: Cirquent) {
        debug_assert_eq!(
            apply(&rule, std::slice::from_ref(&premise)).as_ref(),
            Ok(&self.cur),
            "bottom-up step {rule}"
        );
        self.steps.push((rule, std::mem::replace(&mut self.cur, premise)));
    }

    fn finish(self, top: Proof) -> Proof {
        debug_assert_eq!(top.conclusion, self.cur);
        self.steps.into_iter().rev().fold(top, |p, (rule, conclusion)| Proof {
            conclusion,
            rule,
            premises: vec![p],
        })
    }
}

/// Backward conservative introductions until every non-homeless oformula is
/// a literal, processing the leftmost compound first.
fn conservative_intros(bu: &mut BottomUp) {
    loop {
        let target = (1..=bu.cur.pool().len()).find(|&i| {
            !matches!(bu.cur.pool()[i - 1], Formula::Literal(..)) && !bu.cur.is_homeless(i)
        });
        let Some(i) = target else { break };
        match &bu.cur.pool()[i - 1] {
            Formula::Disj(f, g) => {
                let premise =
                    split_conservative_disj(&bu.cur, i, (**f).clone(), (**g).clone());
                bu.push(RuleApp::DisjIntro(i), premise);
            }
            Formula::Conj(f, g) => {
                let premise =
                    split_conservative_conj(&bu.cur, i, (**f).clone(), (**g).clone());
                bu.push(RuleApp::ConjIntro(i), premise);
            }
            _ => unreachable!("choice-free by precondition"),
        }
    }
}

/// The conservative disjunction premise: both disjuncts inherit every arc.
fn split_conservative_disj(c: &Cirquent, i: usize, f: Formula, g: Formula) -> Cirquent {
    let mut pool = c.pool().to_vec();
    pool[i - 1] = f;
    pool.insert(i, g);
    let structure = c
        .structure()
        .iter()
        .map(|gr| {
            let mut gr = gr.remap(|j| if j > i { j + 1 } else { j });
            if gr.contains(i) {
                gr.insert(i + 1);
            }
            gr
        })
        .collect();
    Cirquent::new(pool, structure).expect("indices in range")
}

/// The conservative conjunction premise: every ogroup holding the
/// conjunction splits into an `F`-ogroup and a `G`-ogroup that keep all its
/// other members.
fn split_conservative_conj(c: &Cirquent, i: usize, f: Formula, g: Formula) -> Cirquent {
    let mut pool = c.pool().to_vec();
    pool[i - 1] = f;
    pool.insert(i, g);
    let mut structure = Vec::new();
    for gr in c.structure() {
        let gr = gr.remap(|j| if j > i { j + 1 } else { j });
        if gr.contains(i) {
            let mut left = gr.clone();
            let mut right = gr;
            left.remove(i + 1); // i+1 cannot be a member yet, but keep symmetric
            right.remove(i);
            right.insert(i + 1);
            structure.push(left);
            structure.push(right);
        } else {
            structure.push(gr);
        }
    }
    Cirquent::new(pool, structure).expect("indices in range")
}

/// For each ogroup of an essentially-literal tautology, the least
/// complementary pair of member oliterals.
fn pick_pairs(c: &Cirquent) -> Vec<(usize, usize)> {
    c.structure()
        .iter()
        .map(|gr| {
            let members: Vec<usize> = gr.members().collect();
            let mut best: Option<(usize, usize)> = None;
            for (a, &i) in members.iter().enumerate() {
                for &j in &members[a + 1..] {
                    let (fi, fj) = (&c.pool()[i - 1], &c.pool()[j - 1]);
                    if let (Formula::Literal(si, ai), Formula::Literal(sj, aj)) = (fi, fj) {
                        if ai == aj && !ai.is_logical() && *si == sj.flip() {
                            let cand = (i, j);
                            if best.is_none() || cand < best.unwrap() {
                                best = Some(cand);
                            }
                        }
                    }
                }
            }
            best.expect("every ogroup of a tautology holds a complementary pair")
        })
        .collect()
}

/// Backward weakenings: strip every arc outside the chosen pairs, then
/// delete the homeless oformulas.
fn weaken_to_pairs(bu: &mut BottomUp, pairs: &[(usize, usize)]) {
    loop {
        let extra = bu.cur.structure().iter().enumerate().find_map(|(g0, gr)| {
            let (i, j) = pairs[g0];
            gr.members().find(|&k| k != i && k != j).map(|k| (g0 + 1, k))
        });
        let Some((g, k)) = extra else { break };
        let mut structure = bu.cur.structure().to_vec();
        structure[g - 1].remove(k);
        let premise = bu.cur.with_structure(structure).expect("indices in range");
        bu.push(RuleApp::WeakGroup(g, k), premise);
    }
    loop {
        let homeless = (1..=bu.cur.pool().len()).find(|&i| bu.cur.is_homeless(i));
        let Some(i) = homeless else { break };
        let f = bu.cur.pool()[i - 1].clone();
        let premise = bu.cur.delete_oformula(i).expect("in range");
        bu.push(RuleApp::WeakPool(i, f), premise);
    }
}

/// Backward contractions: split every oliteral shared between ogroups.
fn separate_by_contraction(bu: &mut BottomUp) {
    loop {
        let shared =
            (1..=bu.cur.pool().len()).find(|&k| bu.cur.groups_containing(k).len() >= 2);
        let Some(k) = shared else { break };
        let holders = bu.cur.groups_containing(k);
        let mut pool = bu.cur.pool().to_vec();
        pool.insert(k, pool[k - 1].clone());
        let structure = bu
            .cur
            .structure()
            .iter()
            .enumerate()
            .map(|(g0, gr)| {
                let gr = gr.remap(|j| if j > k { j + 1 } else { j });
                if holders[1..].contains(&(g0 + 1)) {
                    let mut gr = gr;
                    gr.remove(k);
                    gr.insert(k + 1);
                    gr
                } else {
                    gr
                }
            })
            .collect();
        let premise = Cirquent::new(pool, structure).expect("indices in range");
        bu.push(RuleApp::Contract(k), premise);
    }
}

/// Backward duplications: collapse identical-content ogroups (bringing them
/// together with ogroup exchanges first).  On binary cirquents whose
/// ogroups are complementary pairs, this removes all sharing without
/// contraction.
fn separate_by_duplication(bu: &mut BottomUp) {
    loop {
        let dup = (1..=bu.cur.structure().len())
            .flat_map(|a| {
                ((a + 1)..=bu.cur.structure().len()).map(move |b| (a, b))
            })
            .find(|&(a, b)| bu.cur.ogroup(a) == bu.cur.ogroup(b));
        let Some((a, mut b)) = dup else { break };
        while b > a + 1 {
            let premise = bu.cur.swap_ogroups(b - 1).expect("in range");
            bu.push(RuleApp::ExchG(b - 1), premise);
            b -= 1;
        }
        let mut structure = bu.cur.structure().to_vec();
        structure.remove(a);
        let premise = bu.cur.with_structure(structure).expect("indices in range");
        bu.push(RuleApp::DupDown(a), premise);
    }
}

/// Close a primitive cirquent whose ogroups are disjoint complementary
/// pairs covering the pool: identity axioms, mixes, then oformula
/// exchanges.
fn close_with_axioms(target: &Cirquent) -> Proof {
    if target.structure().is_empty() {
        debug_assert!(target.pool().is_empty(), "homeless oformulas were deleted");
        return Proof::leaf(RuleApp::AxiomEmpty);
    }
    // per ogroup: its negative and positive member
    let groups: Vec<(usize, usize)> = target
        .structure()
        .iter()
        .map(|gr| {
            let members: Vec<usize> = gr.members().collect();
            debug_assert_eq!(members.len(), 2);
            let (i, j) = (members[0], members[1]);
            match &target.pool()[i - 1] {
                Formula::Literal(Sign::Neg, _) => (i, j),
                _ => (j, i),
            }
        })
        .collect();
    let mut proof = {
        let first_pos = groups[0].1;
        Proof::leaf(RuleApp::AxiomId(target.pool()[first_pos - 1].clone()))
    };
    for &(_, pos) in &groups[1..] {
        let axiom = Proof::leaf(RuleApp::AxiomId(target.pool()[pos - 1].clone()));
        let conclusion = apply(
            &RuleApp::Mix,
            &[proof.conclusion.clone(), axiom.conclusion.clone()],
        )
        .expect("mix");
        proof = Proof { conclusion, rule: RuleApp::Mix, premises: vec![proof, axiom] };
    }
    // the mixed pool lists each ogroup's pair in order; sort it into the
    // target arrangement with adjacent exchanges
    let source_of: Vec<usize> = (1..=target.pool().len())
        .map(|p| {
            let g = target
                .groups_containing(p)
                .first()
                .copied()
                .expect("no homeless oformulas");
            let (neg, _) = groups[g - 1];
            if p == neg {
                2 * g - 1
            } else {
                2 * g
            }
        })
        .collect();
    let mut arrangement: Vec<usize> = (1..=target.pool().len()).collect();
    for p in 0..arrangement.len() {
        let q = (p..arrangement.len())
            .find(|&q| arrangement[q] == source_of[p])
            .expect("permutation");
        for t in (p..q).rev() {
            arrangement.swap(t, t + 1);
            let rule = RuleApp::ExchF(t + 1);
            let conclusion =
                apply(&rule, std::slice::from_ref(&proof.conclusion)).expect("exchange");
            proof = Proof { conclusion, rule, premises: vec![proof] };
        }
    }
    debug_assert_eq!(&proof.conclusion, target);
    proof
}

/// Construct a full-calculus proof of any tautological cirquent, per the
/// completeness argument: conservative introductions up to an essentially
/// literal cirquent, weakenings down to one complementary pair per ogroup,
/// contractions to separate sharing, axioms + mix + exchanges on top.
pub fn prove_ccc(c: &Cirquent, caps: &Caps) -> Result<Option<Proof>, DecideError> {
    require_classical(c)?;
    require_nonlogical(c)?;
    if !is_tautology(c, caps).map_err(eval_err)? {
        return Ok(None);
    }
    let mut bu = BottomUp::new(c.clone());
    conservative_intros(&mut bu);
    let pairs = pick_pairs(&bu.cur);
    weaken_to_pairs(&mut bu, &pairs);
    separate_by_contraction(&mut bu);
    let top = close_with_axioms(&bu.cur);
    let proof = bu.finish(top);
    debug_assert!(check_proof(&proof, &System::ccc()).is_ok());
    Ok(Some(proof))
}

/// Construct a contraction-free proof: find a normal binary tautology the
/// input instantiates, prove it with duplication in place of contraction,
/// then substitute the whole proof.
pub fn prove_cl5(c: &Cirquent, caps: &Caps) -> Result<Option<Proof>, DecideError> {
    let Some((d, _, sub)) = decide_binary_instance_full(c, caps)? else {
        return Ok(None);
    };
    let mut bu = BottomUp::new(d);
    conservative_intros(&mut bu);
    let pairs = pick_pairs(&bu.cur);
    weaken_to_pairs(&mut bu, &pairs);
    separate_by_duplication(&mut bu);
    let top = close_with_axioms(&bu.cur);
    let proof_d = bu.finish(top);
    let proof = substitute_proof(&proof_d, &sub);
    debug_assert_eq!(&proof.conclusion, c);
    debug_assert!(check_proof(&proof, &System::cl5()).is_ok());
    Ok(Some(proof))
}

// ---------------------------------------------------------------------------
// The affine and classical sequent calculi.

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SequentRule {
    /// `!F , F`.
    Axiom,
    /// Swap adjacent formulas `i`, `i+1`.
    Exchange(usize),
    /// Insert the conclusion's formula at `i`.
    Weakening(usize),
    /// Merge identical adjacent formulas `i`, `i+1`.
    Contraction(usize),
    /// Merge adjacent `F`, `G` at `i` into `F | G`.
    OrIntro(usize),
    /// `Γ , F` and `G , Δ` yield `Γ , F & G , Δ`, the conjunction at `i`.
    AndIntro(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequentProof {
    pub conclusion: Sequent,
    pub rule: SequentRule,
    pub premises: Vec<SequentProof>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SequentRuleError {
    #[error("{rule:?} takes {want} premise(s), got {got}")]
    Arity { rule: SequentRule, want: usize, got: usize },
    #[error("position {0} is out of range for this rule")]
    Position(usize),
    #[error("{0}")]
    SideCondition(String),
}

impl SequentRule {
    pub fn arity(&self) -> usize {
        match self {
            SequentRule::Axiom => 0,
            SequentRule::AndIntro(_) => 2,
            _ => 1,
        }
    }
}

/// Compute the conclusion of a sequent rule, given its premises and, where
/// the rule introduces new material (axiom, weakening), the conclusion's
/// own formulas via `hint`.
fn apply_sequent(
    rule: &SequentRule,
    premises: &[Sequent],
    hint: Option<&Formula>,
) -> Result<Sequent, SequentRuleError> {
    if premises.len() != rule.arity() {
        return Err(SequentRuleError::Arity {
            rule: rule.clone(),
            want: rule.arity(),
            got: premises.len(),
        });
    }
    let out = |formulas: Vec<Formula>| {
        Sequent::new(formulas).ok_or_else(|| {
            SequentRuleError::SideCondition("sequents must be nonempty".into())
        })
    };
    match rule {
        SequentRule::Axiom => {
            let f = hint.ok_or_else(|| {
                SequentRuleError::SideCondition("axiom needs its formula".into())
            })?;
            out(vec![f.negate(), f.clone()])
        }
        SequentRule::Exchange(i) => {
            let mut fs = premises[0].formulas.clone();
            if *i < 1 || *i + 1 > fs.len() {
                return Err(SequentRuleError::Position(*i));
            }
            fs.swap(*i - 1, *i);
            out(fs)
        }
        SequentRule::Weakening(i) => {
            let f = hint.ok_or_else(|| {
                SequentRuleError::SideCondition("weakening needs its formula".into())
            })?;
            let mut fs = premises[0].formulas.clone();
            if *i < 1 || *i > fs.len() + 1 {
                return Err(SequentRuleError::Position(*i));
            }
            fs.insert(*i - 1, f.clone());
            out(fs)
        }
        SequentRule::Contraction(i) => {
            let fs = &premises[0].formulas;
            if *i < 1 || *i + 1 > fs.len() {
                return Err(SequentRuleError::Position(*i));
            }
            if fs[*i - 1] != fs[*i] {
                return Err(SequentRuleError::SideCondition(format!(
                    "formulas {i} and {} are not identical",
                    i + 1
                )));
            }
            let mut fs = fs.clone();
            fs.remove(*i);
            out(fs)
        }
        SequentRule::OrIntro(i) => {
            let fs = &premises[0].formulas;
            if *i < 1 || *i + 1 > fs.len() {
                return Err(SequentRuleError::Position(*i));
            }
            let merged = Formula::disj(fs[*i - 1].clone(), fs[*i].clone());
            let mut fs = fs.clone();
            fs[*i - 1] = merged;
            fs.remove(*i);
            out(fs)
        }
        SequentRule::AndIntro(i) => {
            let left = &premises[0].formulas;
            let right = &premises[1].formulas;
            if *i != left.len() {
                return Err(SequentRuleError::SideCondition(format!(
                    "conjunction position {i} must close the left premise (len {})",
                    left.len()
                )));
            }
            let mut fs = left[..left.len() - 1].to_vec();
            fs.push(Formula::conj(
                left[left.len() - 1].clone(),
                right[0].clone(),
            ));
            fs.extend(right[1..].iter().cloned());
            out(fs)
        }
    }
}

/// The hint formula a rule needs, read off the recorded conclusion.
fn sequent_hint<'a>(rule: &SequentRule, conclusion: &'a Sequent) -> Option<&'a Formula> {
    match rule {
        SequentRule::Axiom => conclusion.formula(2),
        SequentRule::Weakening(i) => conclusion.formula(*i),
        _ => None,
    }
}

/// Replay a sequent proof; `allow_contraction` distinguishes the classical
/// calculus from the affine one.
pub fn check_sequent_proof(
    p: &SequentProof,
    allow_contraction: bool,
) -> Result<(), Vec<Violation>> {
    let mut violations = Vec::new();
    let mut path = Vec::new();
    check_sequent_node(p, allow_contraction, &mut path, &mut violations);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

fn check_sequent_node(
    p: &SequentProof,
    allow_contraction: bool,
    path: &mut Vec<usize>,
    out: &mut Vec<Violation>,
) {
    if matches!(p.rule, SequentRule::Contraction(_)) && !allow_contraction {
        out.push(Violation {
            path: path.clone(),
            message: "contraction is not part of the affine calculus".into(),
        });
    }
    let premises: Vec<Sequent> = p.premises.iter().map(|q| q.conclusion.clone()).collect();
    match apply_sequent(&p.rule, &premises, sequent_hint(&p.rule, &p.conclusion)) {
        Ok(derived) if derived == p.conclusion => {}
        Ok(derived) => out.push(Violation {
            path: path.clone(),
            message: format!(
                "rule {:?} yields {} but the proof records {}",
                p.rule, derived, p.conclusion
            ),
        }),
        Err(e) => out.push(Violation {
            path: path.clone(),
            message: format!("rule {:?} does not apply: {e}", p.rule),
        }),
    }
    for (k, q) in p.premises.iter().enumerate() {
        path.push(k + 1);
        check_sequent_node(q, allow_contraction, path, out);
        path.pop();
    }
}

/// Backward-search decision recorded per multiset of formulas.
#[derive(Debug, Clone)]
enum Decision {
    Axiom,
    Weak(Formula),
    Or(Formula),
    And(Formula, Vec<Formula>, Vec<Formula>),
}

fn canon(mut fs: Vec<Formula>) -> Vec<Formula> {
    fs.sort();
    fs
}

fn minus_one(fs: &[Formula], f: &Formula) -> Vec<Formula> {
    let mut out = fs.to_vec();
    let k = out.iter().position(|x| x == f).expect("member");
    out.remove(k);
    out
}

type Memo = HashMap<Vec<Formula>, Option<Decision>>;

/// Complete backward search in the affine calculus over multisets.
fn affine_provable(mset: &[Formula], memo: &mut Memo) -> Option<Decision> {
    debug_assert!(mset.windows(2).all(|w| w[0] <= w[1]));
    if let Some(d) = memo.get(mset) {
        return d.clone();
    }
    memo.insert(mset.to_vec(), None); // cycles are impossible, but be safe
    let mut found = None;
    if mset.len() == 2 && mset[0] == mset[1].negate() {
        found = Some(Decision::Axiom);
    }
    if found.is_none() {
        let mut tried: BTreeSet<&Formula> = BTreeSet::new();
        for f in mset {
            if !tried.insert(f) {
                continue;
            }
            if let Formula::Disj(a, b) = f {
                let mut premise = minus_one(mset, f);
                premise.push((**a).clone());
                premise.push((**b).clone());
                if affine_provable(&canon(premise), memo).is_some() {
                    found = Some(Decision::Or(f.clone()));
                    break;
                }
            }
        }
    }
    if found.is_none() {
        let mut tried: BTreeSet<&Formula> = BTreeSet::new();
        'outer: for f in mset {
            if !tried.insert(f) {
                continue;
            }
            if let Formula::Conj(a, b) = f {
                let ctx = minus_one(mset, f);
                for mask in 0u32..(1u32 << ctx.len()) {
                    let mut left = Vec::new();
                    let mut right = Vec::new();
                    for (k, g) in ctx.iter().enumerate() {
                        if mask >> k & 1 == 1 {
                            left.push(g.clone());
                        } else {
                            right.push(g.clone());
                        }
                    }
                    let mut p1 = left.clone();
                    p1.push((**a).clone());
                    let mut p2 = right.clone();
                    p2.push((**b).clone());
                    if affine_provable(&canon(p1), memo).is_some()
                        && affine_provable(&canon(p2), memo).is_some()
                    {
                        found = Some(Decision::And(f.clone(), canon(left), canon(right)));
                        break 'outer;
                    }
                }
            }
        }
    }
    if found.is_none() && mset.len() >= 3 {
        let mut tried: BTreeSet<&Formula> = BTreeSet::new();
        for f in mset {
            if !tried.insert(f) {
                continue;
            }
            if affine_provable(&canon(minus_one(mset, f)), memo).is_some() {
                found = Some(Decision::Weak(f.clone()));
                break;
            }
        }
    }
    memo.insert(mset.to_vec(), found.clone());
    found
}

/// Rebuild a positional proof from the recorded multiset decisions,
/// inserting exchange steps where the positional order differs.
fn build_sequent_proof(s: Vec<Formula>, memo: &mut Memo) -> SequentProof {
    let decision = affine_provable(&canon(s.clone()), memo).expect("decided provable");
    match decision {
        Decision::Axiom => SequentProof {
            conclusion: Sequent::new(s).expect("nonempty"),
            rule: SequentRule::Axiom,
            premises: vec![],
        },
        Decision::Weak(f) => {
            let i = s.iter().position(|x| *x == f).expect("member") + 1;
            let mut premise = s.clone();
            premise.remove(i - 1);
            let p = build_sequent_proof(premise, memo);
            SequentProof {
                conclusion: Sequent::new(s).expect("nonempty"),
                rule: SequentRule::Weakening(i),
                premises: vec![p],
            }
        }
        Decision::Or(f) => {
            let i = s.iter().position(|x| *x == f).expect("member") + 1;
            let (a, b) = match &f {
                Formula::Disj(a, b) => ((**a).clone(), (**b).clone()),
                _ => unreachable!(),
            };
            let mut premise = s.clone();
            premise[i - 1] = a;
            premise.insert(i, b);
            let p = build_sequent_proof(premise, memo);
            SequentProof {
                conclusion: Sequent::new(s).expect("nonempty"),
                rule: SequentRule::OrIntro(i),
                premises: vec![p],
            }
        }
        Decision::And(f, lctx, rctx) => {
            let (a, b) = match &f {
                Formula::Conj(a, b) => ((**a).clone(), (**b).clone()),
                _ => unreachable!(),
            };
            let mut desired = lctx.clone();
            desired.push(f.clone());
            desired.extend(rctx.iter().cloned());
            let i = lctx.len() + 1;
            let mut p1 = lctx;
            p1.push(a);
            let mut p2 = vec![b];
            p2.extend(rctx);
            let left = build_sequent_proof(p1, memo);
            let right = build_sequent_proof(p2, memo);
            let node = SequentProof {
                conclusion: Sequent::new(desired.clone()).expect("nonempty"),
                rule: SequentRule::AndIntro(i),
                premises: vec![left, right],
            };
            wrap_exchanges(node, &s)
        }
    }
}

/// Stack exchange steps on top of `p` until its conclusion is arranged as
/// `target` (a permutation of it).
fn wrap_exchanges(mut p: SequentProof, target: &[Formula]) -> SequentProof {
    for pos in 0..target.len() {
        let current = p.conclusion.formulas.clone();
        let q = (pos..current.len())
            .find(|&q| current[q] == target[pos])
            .expect("permutation");
        for t in (pos..q).rev() {
            let mut fs = p.conclusion.formulas.clone();
            fs.swap(t, t + 1);
            p = SequentProof {
                conclusion: Sequent::new(fs).expect("nonempty"),
                rule: SequentRule::Exchange(t + 1),
                premises: vec![p],
            };
        }
    }
    debug_assert_eq!(p.conclusion.formulas, target);
    p
}

/// Complete proof search in the affine sequent calculus (no contraction).
pub fn prove_affine(s: &Sequent) -> Result<Option<SequentProof>, DecideError> {
    for f in &s.formulas {
        if !f.is_classical() {
            return Err(DecideError::Choice);
        }
    }
    let mut memo = Memo::new();
    if affine_provable(&canon(s.formulas.clone()), &mut memo).is_none() {
        return Ok(None);
    }
    let p = build_sequent_proof(s.formulas.clone(), &mut memo);
    debug_assert!(check_sequent_proof(&p, false).is_ok());
    Ok(Some(p))
}

/// Translate a sequent proof into a proof of the one-ogroup cirquent of its
/// conclusion.  Axiom, exchange, contraction and disjunction introduction
/// map to their namesakes; a weakening becomes a pool weakening followed by
/// a group weakening; a conjunction introduction becomes a mix followed by
/// a conjunction introduction.  The image of an affine proof stays within
/// the contraction-free rules and every cirquent in it is primitive.
pub fn translate_sequent_proof(p: &SequentProof) -> Proof {
    let conclusion = Cirquent::from_sequent(&p.conclusion);
    let proof = match &p.rule {
        SequentRule::Axiom => {
            Proof::leaf(RuleApp::AxiomId(p.conclusion.formulas[1].clone()))
        }
        SequentRule::Exchange(i) => {
            wrap(RuleApp::ExchF(*i), translate_sequent_proof(&p.premises[0]))
        }
        SequentRule::Contraction(i) => {
            wrap(RuleApp::Contract(*i), translate_sequent_proof(&p.premises[0]))
        }
        SequentRule::OrIntro(i) => {
            wrap(RuleApp::DisjIntro(*i), translate_sequent_proof(&p.premises[0]))
        }
        SequentRule::Weakening(i) => {
            let f = p.conclusion.formula(*i).expect("weakening formula").clone();
            let q = translate_sequent_proof(&p.premises[0]);
            let q = wrap(RuleApp::WeakPool(*i, f), q);
            wrap(RuleApp::WeakGroup(1, *i), q)
        }
        SequentRule::AndIntro(i) => {
            let left = translate_sequent_proof(&p.premises[0]);
            let right = translate_sequent_proof(&p.premises[1]);
            let mixed = apply(
                &RuleApp::Mix,
                &[left.conclusion.clone(), right.conclusion.clone()],
            )
            .expect("mix");
            let q = Proof { conclusion: mixed, rule: RuleApp::Mix, premises: vec![left, right] };
            wrap(RuleApp::ConjIntro(*i), q)
        }
    };
    debug_assert_eq!(proof.conclusion, conclusion);
    proof
}

fn wrap(rule: RuleApp, premise: Proof) -> Proof {
    let conclusion =
        apply(&rule, std::slice::from_ref(&premise.conclusion)).expect("translated step");
    Proof { conclusion, rule, premises: vec![premise] }
}

// ---------------------------------------------------------------------------
// Sequent proof files: same shape as cirquent proof files, with tags
// AX <formula>, EXCH <i>, WEAK <i> <formula>, CONTR <i>, OR <i>, AND <i>.

impl fmt::Display for SequentRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequentRule::Axiom => write!(f, "AX"),
            SequentRule::Exchange(i) => write!(f, "EXCH {i}"),
            SequentRule::Weakening(i) => write!(f, "WEAK {i}"),
            SequentRule::Contraction(i) => write!(f, "CONTR {i}"),
            SequentRule::OrIntro(i) => write!(f, "OR {i}"),
            SequentRule::AndIntro(i) => write!(f, "AND {i}"),
        }
    }
}

pub fn write_sequent_proof(p: &SequentProof) -> String {
    let mut out = String::new();
    let mut next_id = 1;
    write_sequent_node(p, &mut next_id, &mut out, true);
    out
}

fn write_sequent_node(
    p: &SequentProof,
    next_id: &mut usize,
    out: &mut String,
    root: bool,
) -> usize {
    let premise_ids: Vec<usize> = p
        .premises
        .iter()
        .map(|q| write_sequent_node(q, next_id, out, false))
        .collect();
    let id = *next_id;
    *next_id += 1;
    out.push_str(&format!("{id}: {}", p.rule));
    if let Some(f) = sequent_hint(&p.rule, &p.conclusion) {
        out.push_str(&format!(" {f}"));
    }
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
pub enum SequentFileError {
    #[error("line {line}: {err}")]
    Parse { line: usize, err: ParseError },
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: rule does not apply: {err}")]
    Rule { line: usize, err: SequentRuleError },
    #[error("line {line}: expected conclusion {expected}, derived {derived}")]
    ExpectMismatch { line: usize, expected: Box<Sequent>, derived: Box<Sequent> },
    #[error("the proof file has no lines")]
    Empty,
}

pub fn parse_sequent_proof(input: &str) -> Result<SequentProof, SequentFileError> {
    let mut by_id: HashMap<usize, SequentProof> = HashMap::new();
    let mut last: Option<usize> = None;
    for (lineno, raw) in input.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let malformed =
            |msg: &str| SequentFileError::Malformed { line: lineno, msg: msg.into() };
        let (id, rest) = match line.split_once(':') {
            Some((id_part, rest)) => match id_part.trim().parse::<usize>() {
                Ok(id) => (id, rest),
                Err(_) => return Err(malformed("expected '<id>:'")),
            },
            None => return Err(malformed("expected '<id>:'")),
        };
        let tokens = formula::tokenize(rest)
            .map_err(|err| SequentFileError::Parse { line: lineno, err })?;
        let mut p = Parser::new(&tokens, rest.len());
        let tag = match p.next() {
            Some(Token::Ident(t)) => t.clone(),
            _ => return Err(malformed("expected rule tag")),
        };
        let number = |p: &mut Parser<'_>| -> Result<usize, SequentFileError> {
            match p.next() {
                Some(Token::Number(n)) => Ok(*n),
                _ => Err(SequentFileError::Malformed {
                    line: lineno,
                    msg: "expected a number".into(),
                }),
            }
        };
        let mut hint = None;
        let rule = match tag.as_str() {
            "AX" => {
                hint = Some(
                    p.formula()
                        .map_err(|err| SequentFileError::Parse { line: lineno, err })?,
                );
                SequentRule::Axiom
            }
            "EXCH" => SequentRule::Exchange(number(&mut p)?),
            "WEAK" => {
                let i = number(&mut p)?;
                hint = Some(
                    p.formula()
                        .map_err(|err| SequentFileError::Parse { line: lineno, err })?,
                );
                SequentRule::Weakening(i)
            }
            "CONTR" => SequentRule::Contraction(number(&mut p)?),
            "OR" => SequentRule::OrIntro(number(&mut p)?),
            "AND" => SequentRule::AndIntro(number(&mut p)?),
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
                crate::cirquent::parse_sequent_tokens(&mut p)
                    .map_err(|err| SequentFileError::Parse { line: lineno, err })?,
            );
        }
        p.expect_end()
            .map_err(|err| SequentFileError::Parse { line: lineno, err })?;
        let premise_conclusions: Vec<Sequent> =
            premises.iter().map(|q: &SequentProof| q.conclusion.clone()).collect();
        let conclusion = apply_sequent(&rule, &premise_conclusions, hint.as_ref())
            .map_err(|err| SequentFileError::Rule { line: lineno, err })?;
        if let Some(expected) = expected {
            if expected != conclusion {
                return Err(SequentFileError::ExpectMismatch {
                    line: lineno,
                    expected: Box::new(expected),
                    derived: Box::new(conclusion),
                });
            }
        }
        by_id.insert(id, SequentProof { conclusion, rule, premises });
        last = Some(id);
    }
    let root = last.ok_or(SequentFileError::Empty)?;
    Ok(by_id.remove(&root).expect("root id present"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cirquent::{parse_cirquent, parse_sequent};
    
    use crate::inference::RuleFamily;

    fn c(s: &str) -> Cirquent {
        parse_cirquent(s).unwrap()
    }

    fn caps() -> Caps {
        Caps::default()
    }

    #[test]
    fn binary_instance_witnesses() {
        // !P | P: couple the two occurrences
        let (d, coupling) =
            decide_binary_instance(&c("[ !P | P ] {1}"), &caps()).unwrap().unwrap();
        assert_eq!(binarity(&d), Binarity::NormalBinary);
        assert!(is_tautology(&d, &caps()).unwrap());
        assert_eq!(coupling.pairs, [(1, 2)].into_iter().collect());
        // (!P | !P) | P: two candidate couplings, one works
        assert!(decide_binary_instance(&c("[ (!P | !P) | P ] {1}"), &caps())
            .unwrap()
            .is_some());
        // !P | (P & P) instantiates no binary tautology
        assert!(decide_binary_instance(&c("[ !P | (P & P) ] {1}"), &caps())
            .unwrap()
            .is_none());
        // non-tautologies never do
        assert!(decide_binary_instance(&c("[ P | Q ] {1}"), &caps()).unwrap().is_none());
        assert!(decide_binary_instance(&c("[ $T ] {1}"), &caps()).is_err());
    }

    #[test]
    fn ccc_prover() {
        for s in [
            "[ !P | P ] {1}",
            "[ !P | (P & P) ] {1}",
            "[ !P ; P ] {1 2}",
            "[ F ]",
            "[]",
            "[ ((!P | !Q) & (!R | !S)) | ((P | R) & (Q | S)) ] {1}",
            "[ !p | p ; Q ] {1}",
        ] {
            let p = prove_ccc(&c(s), &caps()).unwrap().unwrap_or_else(|| panic!("{s}"));
            assert_eq!(p.conclusion, c(s));
            check_proof(&p, &System::ccc()).unwrap();
        }
        assert!(prove_ccc(&c("[ P | Q ] {1}"), &caps()).unwrap().is_none());
        assert!(prove_ccc(&c("[ !P | P ] {1} {}"), &caps()).unwrap().is_none());
    }

    #[test]
    fn cl5_prover() {
        let blass = "[ ((!P | !Q) & (!R | !S)) | ((P | R) & (Q | S)) ] {1}";
        for s in ["[ !P | P ] {1}", "[ (!P | !P) | P ] {1}", blass] {
            let p = prove_cl5(&c(s), &caps()).unwrap().unwrap_or_else(|| panic!("{s}"));
            assert_eq!(p.conclusion, c(s));
            check_proof(&p, &System::cl5()).unwrap();
            assert!(!p.uses_family(RuleFamily::Contraction));
        }
        // CCC-provable but not CL5-provable
        assert!(prove_cl5(&c("[ !P | (P & P) ] {1}"), &caps()).unwrap().is_none());
        // formula (1): the all-P instance of Blass's principle
        let one = "[ ((!P | !P) & (!P | !P)) | ((P | P) & (P | P)) ] {1}";
        let p = prove_cl5(&c(one), &caps()).unwrap().unwrap();
        check_proof(&p, &System::cl5()).unwrap();
    }

    #[test]
    fn affine_prover() {
        let s = parse_sequent("!P | P").unwrap();
        // !P | P is one disjunction away from the axiom
        let p = prove_affine(&s).unwrap().unwrap();
        check_sequent_proof(&p, false).unwrap();
        assert_eq!(p.conclusion, s);
        // weakening and an and-split
        let s = parse_sequent("Q , (!P | P) & (!R | R)").unwrap();
        let p = prove_affine(&s).unwrap().unwrap();
        check_sequent_proof(&p, false).unwrap();
        // unprovable without contraction (Fact 5.1)
        let one = parse_sequent("((!P | !P) & (!P | !P)) | ((P | P) & (P | P))").unwrap();
        assert!(prove_affine(&one).unwrap().is_none());
        // plain non-tautology
        assert!(prove_affine(&parse_sequent("P , Q").unwrap()).unwrap().is_none());
    }

    #[test]
    fn sequent_proof_files() {
        let s = parse_sequent("Q , (!P | P) & (!R | R)").unwrap();
        let p = prove_affine(&s).unwrap().unwrap();
        let text = write_sequent_proof(&p);
        assert_eq!(parse_sequent_proof(&text).unwrap(), p);
    }

    #[test]
    fn translation() {
        for s in ["!P | P", "Q , (!P | P) & (!R | R)", "!P , P , q"] {
            let s = parse_sequent(s).unwrap();
            if let Some(p) = prove_affine(&s).unwrap() {
                let q = translate_sequent_proof(&p);
                assert_eq!(q.conclusion, Cirquent::from_sequent(&s));
                check_proof(&q, &System::cl5().with_primitive_only()).unwrap();
            }
        }
        // a contraction translates to a contraction
        let axiom = SequentProof {
            conclusion: parse_sequent("!P , P").unwrap(),
            rule: SequentRule::Axiom,
            premises: vec![],
        };
        let weakened = SequentProof {
            conclusion: parse_sequent("!P , !P , P").unwrap(),
            rule: SequentRule::Weakening(1),
            premises: vec![axiom],
        };
        let contracted = SequentProof {
            conclusion: parse_sequent("!P , P").unwrap(),
            rule: SequentRule::Contraction(1),
            premises: vec![weakened],
        };
        check_sequent_proof(&contracted, true).unwrap();
        assert!(check_sequent_proof(&contracted, false).is_err());
        let q = translate_sequent_proof(&contracted);
        check_proof(&q, &System::ccc().with_primitive_only()).unwrap();
        assert!(check_proof(&q, &System::cl5()).is_err());
    }

    #[test]
    fn couplings_are_deterministic() {
        let q = c("[ (!P | !P) | P ] {1}");
        let first = decide_binary_instance(&q, &caps()).unwrap().unwrap();
        let second = decide_binary_instance(&q, &caps()).unwrap().unwrap();
        assert_eq!(first, second);
    }
}
