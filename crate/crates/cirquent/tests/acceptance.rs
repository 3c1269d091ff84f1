//! Acceptance gate.  Each test exercises one release criterion and prints a
//! single PASS line on success; a failing criterion fails its test.
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::collections::BTreeSet;
use std::sync::OnceLock;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use cirquent::cirquent::{parse_cirquent, Cirquent, Sequent};
use cirquent::cl2::prove_cl2;
use cirquent::decide::{
    check_sequent_proof, decide_binary_instance, prove_affine, prove_ccc, prove_cl5,
    translate_sequent_proof,
};
use cirquent::formula::{parse, Atom, Formula};
use cirquent::inference::{
    backward_premises, check_proof, Proof, RuleApp, RuleFamily, System,
};
use cirquent::resource::{
    cirquent_to_resource, extract_arrangement, formula_to_resource, greedy_arrangement,
    is_trivial, is_trivializing, represent, situation_string, Interface, Port,
    Resource,
};
use cirquent::semantics::{binarity, eval_cirquent, is_tautology, Binarity, Model};
use cirquent::Caps;

fn caps() -> Caps {
    Caps::default()
}

fn pass(n: usize, what: &str) {
    println!("ACCEPTANCE {n}: PASS - {what}");
}

fn singleton(text: &str) -> Cirquent {
    Cirquent::singleton(parse(text).unwrap())
}

const BLASS: &str = "((!P | !Q) & (!R | !S)) | ((P | R) & (Q | S))";
const FORMULA_ONE: &str = "((!P | !P) & (!P | !P)) | ((P | P) & (P | P))";

// ---------------------------------------------------------------------------
// Criterion 1: Blass's principle and its all-P instance.

#[test]
fn criterion_01_blass_principle() {
    let start = Instant::now();
    let c = singleton(BLASS);
    let p = prove_cl5(&c, &caps()).unwrap().expect("Blass's principle is CL5-provable");
    check_proof(&p, &System::cl5()).unwrap();
    assert!(!p.uses_family(RuleFamily::Contraction));

    let one = singleton(FORMULA_ONE);
    let p1 = prove_cl5(&one, &caps()).unwrap().expect("formula (1) is CL5-provable");
    check_proof(&p1, &System::cl5()).unwrap();

    // the affine calculus cannot prove formula (1): exhaustive search
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_cirquent"))
        .args(["prove", "--system", "affine", FORMULA_ONE])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("UNPROVABLE"));

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 10, "criterion 1 took {elapsed:?}");
    pass(1, "Blass principle CL5-provable without contraction; formula (1) CL5-provable, affine-unprovable");
}

// ---------------------------------------------------------------------------
// Criterion 2: the contraction boundary.

#[test]
fn criterion_02_contraction_boundary() {
    let c = singleton("!P | (P & P)");
    assert!(prove_ccc(&c, &caps()).unwrap().is_some());
    assert!(prove_cl5(&c, &caps()).unwrap().is_none());

    let weak = singleton("P & P -> P"); // (!P | !P) | P
    assert!(prove_cl5(&weak, &caps()).unwrap().is_some());
    assert!(prove_cl2(&parse("P & P -> P").unwrap(), &caps()).unwrap().is_some());
    let r = cirquent_to_resource(&weak, &caps()).unwrap();
    assert!(is_trivial(&r, &caps()).unwrap().is_some());

    let strong = singleton("P -> P & P"); // !P | (P & P)
    assert!(prove_cl5(&strong, &caps()).unwrap().is_none());
    assert!(prove_cl2(&parse("P -> P & P").unwrap(), &caps()).unwrap().is_none());
    let r = cirquent_to_resource(&strong, &caps()).unwrap();
    assert!(is_trivial(&r, &caps()).unwrap().is_none());
    pass(2, "!P|(P&P) separates CCC from CL5; P&P->P provable+trivial, P->P&P neither");
}

// ---------------------------------------------------------------------------
// Criterion 3: the worked resource tables.

#[test]
fn criterion_03_resource_tables() {
    let generator = formula_to_resource(&parse("!Fuel | Power").unwrap(), &caps()).unwrap();
    let rows: Vec<(String, bool)> = generator
        .rows()
        .map(|(bits, v)| (situation_string(&bits), v))
        .collect();
    assert_eq!(
        rows,
        [("00", true), ("01", true), ("10", false), ("11", true)]
            .map(|(s, v)| (s.to_string(), v))
    );

    let both =
        formula_to_resource(&parse("(!Fuel | Power) & (!Power | Light)").unwrap(), &caps())
            .unwrap();
    let false_rows: Vec<String> = both
        .rows()
        .filter(|(_, v)| !v)
        .map(|(bits, _)| situation_string(&bits))
        .collect();
    assert_eq!(
        false_rows,
        ["0010", "0110", "1000", "1001", "1010", "1011", "1110"]
    );
    assert_eq!(both.rows().count(), 16);
    pass(3, "Generator false only at 10; Generator&Lamp false at exactly 7 of 16 rows");
}

// ---------------------------------------------------------------------------
// Criterion 4: representation of the two-out-of-three resource.

#[test]
fn criterion_04_two_of_three() {
    let interface = Interface(vec![
        Port::output(Atom::general("P")),
        Port::output(Atom::general("Q")),
        Port::output(Atom::general("R")),
    ]);
    let table: Vec<bool> = (0..8usize).map(|s| s.count_ones() >= 2).collect();
    let beta = Resource::new(interface, table).unwrap();
    let expected = parse_cirquent("[ P ; Q ; R ] {1 2} {1 3} {2 3}").unwrap();
    assert_eq!(represent(&beta), expected);
    pass(4, "represent(two-of-three) = [P;Q;R]{1 2}{1 3}{2 3}");
}

// ---------------------------------------------------------------------------
// Criteria 5, 8 and the sweep half of 10 share one corpus: all formulas over
// & and | with literals from {P,!P,Q,!Q} and at most 6 oliterals
// (exhaustive), plus 1,000 seeded random formulas with at most 8 oliterals
// over three atoms.

struct SweepReport {
    formulas: usize,
    cl5_proofs: usize,
    equivalence_failures: Vec<String>,
    greedy_failures: Vec<String>,
    extraction_failures: Vec<String>,
}

fn literals() -> Vec<Formula> {
    let p = Atom::general("P");
    let q = Atom::general("Q");
    vec![
        Formula::lit(p.clone()),
        Formula::neg_lit(p),
        Formula::lit(q.clone()),
        Formula::neg_lit(q),
    ]
}

/// All &/| formulas with exactly `n` oliterals, built over stored smaller
/// sizes.
fn formulas_of_size(sizes: &[Vec<Formula>], n: usize) -> Vec<Formula> {
    if n == 1 {
        return literals();
    }
    let mut out = Vec::new();
    for k in 1..n {
        for a in &sizes[k - 1] {
            for b in &sizes[n - k - 1] {
                out.push(Formula::conj(a.clone(), b.clone()));
                out.push(Formula::disj(a.clone(), b.clone()));
            }
        }
    }
    out
}

fn random_formula(rng: &mut StdRng, leaves: usize) -> Formula {
    if leaves == 1 {
        let atom = Atom::general(["P", "Q", "R"][rng.gen_range(0..3)]);
        return if rng.gen() { Formula::lit(atom) } else { Formula::neg_lit(atom) };
    }
    let k = rng.gen_range(1..leaves);
    let a = random_formula(rng, k);
    let b = random_formula(rng, leaves - k);
    if rng.gen() {
        Formula::conj(a, b)
    } else {
        Formula::disj(a, b)
    }
}

/// All checks for one formula.  Returns (had a CL5 proof, failures).
fn sweep_one(f: &Formula, caps: &Caps) -> (bool, Vec<String>) {
    let mut failures = Vec::new();
    let mut fail = |what: &str| failures.push(format!("{f}: {what}"));
    let c = Cirquent::singleton(f.clone());
    let taut = is_tautology(&c, caps).unwrap();
    let ccc = prove_ccc(&c, caps).unwrap();
    if ccc.is_some() != taut {
        fail("prove_ccc disagrees with is_tautology");
    }
    let instance = decide_binary_instance(&c, caps).unwrap().is_some();
    let cl5 = if instance {
        let p = prove_cl5(&c, caps).unwrap();
        if p.is_none() {
            fail("binary instance found but prove_cl5 failed");
        }
        p
    } else {
        None
    };
    let r = cirquent_to_resource(&c, caps).unwrap();
    if is_trivial(&r, caps).unwrap().is_some() != instance {
        fail("is_trivial disagrees with decide_binary_instance");
    }
    if prove_cl2(f, caps).unwrap().is_some() != instance {
        fail("prove_cl2 disagrees with decide_binary_instance");
    }
    if is_trivializing(&r, &greedy_arrangement(&r)) != taut {
        fail("greedy arrangement disagrees with is_tautology");
    }
    let mut produced = false;
    if let Some(p) = cl5 {
        produced = true;
        match extract_arrangement(&p, caps) {
            Ok(a) => {
                if !a.is_monogamous() {
                    fail("extracted arrangement is not monogamous");
                }
                if !is_trivializing(&r, &a) {
                    fail("extracted arrangement is not trivializing");
                }
            }
            Err(e) => fail(&format!("extraction failed: {e}")),
        }
    }
    (produced, failures)
}

fn classify(failures: Vec<String>, report: &mut SweepReport) {
    for f in failures {
        let bucket = if f.contains("greedy") {
            &mut report.greedy_failures
        } else if f.contains("extract") {
            &mut report.extraction_failures
        } else {
            &mut report.equivalence_failures
        };
        if bucket.len() < 10 {
            bucket.push(f);
        }
    }
}

fn sweep() -> &'static SweepReport {
    static REPORT: OnceLock<SweepReport> = OnceLock::new();
    REPORT.get_or_init(|| {
        let caps = caps();
        let mut report = SweepReport {
            formulas: 0,
            cl5_proofs: 0,
            equivalence_failures: Vec::new(),
            greedy_failures: Vec::new(),
            extraction_failures: Vec::new(),
        };
        let mut sizes: Vec<Vec<Formula>> = Vec::new();
        for n in 1..=5 {
            sizes.push(formulas_of_size(&sizes, n));
        }
        for (sz, stored) in sizes.iter().enumerate() {
            let t0 = Instant::now();
            let (proofs, failures): (usize, Vec<Vec<String>>) = stored
                .par_iter()
                .map(|f| sweep_one(f, &caps))
                .map(|(produced, fs)| (usize::from(produced), fs))
                .fold(
                    || (0usize, Vec::new()),
                    |(n, mut acc), (k, fs)| {
                        if !fs.is_empty() {
                            acc.push(fs);
                        }
                        (n + k, acc)
                    },
                )
                .reduce(
                    || (0usize, Vec::new()),
                    |(a, mut xs), (b, ys)| {
                        xs.extend(ys);
                        (a + b, xs)
                    },
                );
            report.formulas += stored.len();
            report.cl5_proofs += proofs;
            for fs in failures {
                classify(fs, &mut report);
            }
            eprintln!("sweep: size {} ({} formulas) in {:?}", sz + 1, stored.len(), t0.elapsed());
        }
        // size 6, streamed by split point to bound memory
        for k in 1..6usize {
            let t0 = Instant::now();
            let pairs: Vec<(&Formula, &Formula)> = sizes[k - 1]
                .iter()
                .flat_map(|a| sizes[6 - k - 1].iter().map(move |b| (a, b)))
                .collect();
            let (count, proofs, failures): (usize, usize, Vec<Vec<String>>) = pairs
                .par_iter()
                .map(|(a, b)| {
                    let mut proofs = 0;
                    let mut failures = Vec::new();
                    for f in [
                        Formula::conj((*a).clone(), (*b).clone()),
                        Formula::disj((*a).clone(), (*b).clone()),
                    ] {
                        let (produced, fs) = sweep_one(&f, &caps);
                        proofs += usize::from(produced);
                        if !fs.is_empty() {
                            failures.push(fs);
                        }
                    }
                    (2usize, proofs, failures)
                })
                .reduce(
                    || (0, 0, Vec::new()),
                    |(c1, p1, mut f1), (c2, p2, f2)| {
                        f1.extend(f2);
                        (c1 + c2, p1 + p2, f1)
                    },
                );
            report.formulas += count;
            report.cl5_proofs += proofs;
            for fs in failures {
                classify(fs, &mut report);
            }
            eprintln!("sweep: size 6 split {k} ({count} formulas) in {:?}", t0.elapsed());
        }
        // 1,000 seeded random formulas with up to 8 oliterals
        let mut rng = StdRng::seed_from_u64(0xC1A9);
        let random: Vec<Formula> =
            (0..1000).map(|_| { let n = rng.gen_range(1..=8); random_formula(&mut rng, n) }).collect();
        for f in &random {
            let (produced, fs) = sweep_one(f, &caps);
            report.formulas += 1;
            report.cl5_proofs += usize::from(produced);
            classify(fs, &mut report);
        }
        report
    })
}

#[test]
fn criterion_05_equivalence_sweep() {
    let start = Instant::now();
    let report = sweep();
    assert!(
        report.equivalence_failures.is_empty(),
        "disagreements: {:?}",
        report.equivalence_failures
    );
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 300, "sweep took {elapsed:?}");
    pass(
        5,
        &format!(
            "prover/decider/triviality/CL2 equivalences agree on {} formulas",
            report.formulas
        ),
    );
}

#[test]
fn criterion_08_greedy_arrangement() {
    let report = sweep();
    assert!(
        report.greedy_failures.is_empty(),
        "disagreements: {:?}",
        report.greedy_failures
    );
    pass(
        8,
        &format!(
            "greedy arrangement trivializing iff tautology on {} formulas",
            report.formulas
        ),
    );
}

#[test]
fn criterion_10_arrangement_extraction() {
    // the worked proofs of criteria 1-2
    for text in [BLASS, FORMULA_ONE, "P & P -> P", "!P | P"] {
        let c = singleton(text);
        let p = prove_cl5(&c, &caps()).unwrap().unwrap();
        let a = extract_arrangement(&p, &caps()).unwrap();
        assert!(a.is_monogamous(), "{text}");
        let r = cirquent_to_resource(&c, &caps()).unwrap();
        assert!(is_trivializing(&r, &a), "{text}");
    }
    // every CL5 proof from the criterion-5 corpus
    let report = sweep();
    assert!(
        report.extraction_failures.is_empty(),
        "failures: {:?}",
        report.extraction_failures
    );
    pass(
        10,
        &format!(
            "extraction monogamous+trivializing on {} CL5 proofs",
            report.cl5_proofs + 4
        ),
    );
}

// ---------------------------------------------------------------------------
// Criterion 6: resource algebra identities and denotation homomorphisms.

fn random_interface(rng: &mut StdRng, ports: usize) -> Interface {
    Interface(
        (0..ports)
            .map(|_| {
                let atom = Atom::general(["P", "Q", "R"][rng.gen_range(0..3)]);
                if rng.gen() {
                    Port::output(atom)
                } else {
                    Port::input(atom)
                }
            })
            .collect(),
    )
}

/// A random monotone table: the upward closure (w.r.t. the interface order)
/// of a random table.
fn random_resource(rng: &mut StdRng, ports: usize) -> Resource {
    let interface = random_interface(rng, ports);
    let rows = 1usize << ports;
    let mut table: Vec<bool> = (0..rows).map(|_| rng.gen_bool(0.4)).collect();
    loop {
        let mut changed = false;
        for s in 0..rows {
            if !table[s] {
                continue;
            }
            for t in 0..rows {
                if !table[t] {
                    let sb: Vec<bool> =
                        (0..ports).map(|k| s >> (ports - 1 - k) & 1 == 1).collect();
                    let tb: Vec<bool> =
                        (0..ports).map(|k| t >> (ports - 1 - k) & 1 == 1).collect();
                    if interface.leq(&sb, &tb) {
                        table[t] = true;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    Resource::new(interface, table).unwrap()
}

#[test]
fn criterion_06_resource_algebra() {
    let mut rng = StdRng::seed_from_u64(0x8_3);
    for round in 0..1000 {
        let n = rng.gen_range(0..=3);
        let a = random_resource(&mut rng, n);
        let n = rng.gen_range(0..=2);
        let b = random_resource(&mut rng, n);
        // double negation, both De Morgan laws, implication as defined,
        // and refutation of a as implication into the zero resource
        assert_eq!(a.neg().neg(), a, "round {round}");
        assert_eq!(a.conj(&b).neg(), a.neg().disj(&b.neg()), "round {round}");
        assert_eq!(a.disj(&b).neg(), a.neg().conj(&b.neg()), "round {round}");
        assert_eq!(a.impl_(&b), a.neg().disj(&b), "round {round}");
        assert_eq!(a.impl_(&Resource::zero()), a.neg(), "round {round}");

        // the denotation map is homomorphic for !, & and |
        let n = rng.gen_range(1..=3);
        let f = random_formula(&mut rng, n);
        let n = rng.gen_range(1..=2);
        let g = random_formula(&mut rng, n);
        let rf = formula_to_resource(&f, &caps()).unwrap();
        let rg = formula_to_resource(&g, &caps()).unwrap();
        assert_eq!(
            formula_to_resource(&Formula::conj(f.clone(), g.clone()), &caps()).unwrap(),
            rf.conj(&rg),
            "round {round}"
        );
        assert_eq!(
            formula_to_resource(&Formula::disj(f.clone(), g.clone()), &caps()).unwrap(),
            rf.disj(&rg),
            "round {round}"
        );
        assert_eq!(
            formula_to_resource(&f.negate(), &caps()).unwrap(),
            rf.neg(),
            "round {round}"
        );
    }
    pass(6, "five identities and three homomorphisms on 1000 random resources/formulas");
}

// ---------------------------------------------------------------------------
// Criterion 7: representation round trip.

fn round_trip(r: &Resource) {
    let c = represent(r);
    let back = cirquent_to_resource(&c, &caps()).unwrap();
    assert_eq!(&back, r, "represent round trip on {r}");
}

#[test]
fn criterion_07_representation_round_trip() {
    // exhaustive: up to 3 ports, every gender assignment, every monotone table
    let atoms = [Atom::general("P"), Atom::general("Q"), Atom::general("R")];
    let mut checked = 0usize;
    for ports in 0..=3usize {
        for genders in 0..(1usize << ports) {
            let interface = Interface(
                (0..ports)
                    .map(|k| {
                        if genders >> k & 1 == 1 {
                            Port::input(atoms[k].clone())
                        } else {
                            Port::output(atoms[k].clone())
                        }
                    })
                    .collect(),
            );
            let rows = 1usize << ports;
            for table in 0..(1u32 << rows) {
                let bits: Vec<bool> = (0..rows).map(|s| table >> s & 1 == 1).collect();
                if let Ok(r) = Resource::new(interface.clone(), bits) {
                    round_trip(&r);
                    checked += 1;
                }
            }
        }
    }
    // 200 random 4-5 port samples
    let mut rng = StdRng::seed_from_u64(0x8_12);
    for _ in 0..200 {
        let n = rng.gen_range(4..=5);
        let r = random_resource(&mut rng, n);
        round_trip(&r);
        checked += 1;
    }
    pass(7, &format!("represent/denote round trip on {checked} monotone resources"));
}

// ---------------------------------------------------------------------------
// Criterion 9: rule soundness and binarity preservation.

fn random_cirquent(rng: &mut StdRng) -> Cirquent {
    let pool: Vec<Formula> =
        (0..rng.gen_range(0..4)).map(|_| { let n = rng.gen_range(1..=3); random_formula(rng, n) }).collect();
    let structure: Vec<cirquent::Group> = (0..rng.gen_range(0..4))
        .map(|_| {
            (1..=pool.len())
                .filter(|_| rng.gen_bool(0.5))
                .collect::<cirquent::Group>()
        })
        .collect();
    Cirquent::new(pool, structure).unwrap()
}

/// A random normal binary cirquent: each of a few atoms appears at most
/// once per sign.
fn random_binary_cirquent(rng: &mut StdRng) -> Cirquent {
    let mut literals = Vec::new();
    for name in ["P", "Q", "R", "S"] {
        let atom = Atom::general(name);
        match rng.gen_range(0..4) {
            0 => {}
            1 => literals.push(Formula::lit(atom)),
            2 => literals.push(Formula::neg_lit(atom)),
            _ => {
                literals.push(Formula::lit(atom.clone()));
                literals.push(Formula::neg_lit(atom));
            }
        }
    }
    // partition the literals into random formula trees
    let mut pool = Vec::new();
    while !literals.is_empty() {
        let take = rng.gen_range(1..=literals.len());
        let mut f = literals.remove(rng.gen_range(0..literals.len()));
        for _ in 1..take {
            let g = literals.remove(rng.gen_range(0..literals.len()));
            f = if rng.gen() { Formula::conj(f, g) } else { Formula::disj(f, g) };
        }
        pool.push(f);
    }
    let structure: Vec<cirquent::Group> = (0..rng.gen_range(0..3))
        .map(|_| {
            (1..=pool.len())
                .filter(|_| rng.gen_bool(0.5))
                .collect::<cirquent::Group>()
        })
        .collect();
    Cirquent::new(pool, structure).unwrap()
}

fn random_model(rng: &mut StdRng, c: &Cirquent, premises: &[Cirquent]) -> Model {
    let mut m = Model::new();
    let mut atoms = c.atoms();
    for p in premises {
        atoms.extend(p.atoms());
    }
    for atom in atoms {
        if !atom.is_logical() {
            m.set(atom, rng.gen());
        }
    }
    m
}

/// Bottom-up truth preservation only holds for the conservative versions
/// of the introduction rules: every premise group carries all the side
/// members of its conclusion group.
fn is_conservative_intro(c: &Cirquent, rule: &RuleApp, premise: &Cirquent) -> bool {
    let (i, conj) = match rule {
        RuleApp::ConjIntro(i) => (*i, true),
        RuleApp::DisjIntro(i) => (*i, false),
        _ => return true,
    };
    let remap = |j: usize| if j > i { j + 1 } else { j };
    let mut prem = premise.structure().iter();
    for g in c.structure() {
        let members: BTreeSet<usize> = g.members().collect();
        let rest: BTreeSet<usize> =
            members.iter().filter(|&&j| j != i).map(|&j| remap(j)).collect();
        if !members.contains(&i) {
            match prem.next() {
                Some(h) if h.members().collect::<BTreeSet<_>>() == rest => {}
                _ => return false,
            }
            continue;
        }
        if conj {
            let mut first = rest.clone();
            first.insert(i);
            let mut second = rest;
            second.insert(i + 1);
            match (prem.next(), prem.next()) {
                (Some(h1), Some(h2))
                    if h1.members().collect::<BTreeSet<_>>() == first
                        && h2.members().collect::<BTreeSet<_>>() == second => {}
                _ => return false,
            }
        } else {
            let mut want = rest;
            want.insert(i);
            want.insert(i + 1);
            match prem.next() {
                Some(h) if h.members().collect::<BTreeSet<_>>() == want => {}
                _ => return false,
            }
        }
    }
    prem.next().is_none()
}

#[test]
fn criterion_09_rule_soundness() {
    let all_families = [
        RuleFamily::Axiom,
        RuleFamily::Mix,
        RuleFamily::Exchange,
        RuleFamily::Weakening,
        RuleFamily::Duplication,
        RuleFamily::Contraction,
        RuleFamily::DisjIntro,
        RuleFamily::ConjIntro,
    ];
    // conclusion-truth preservation holds bottom-up for these six
    let reversible = [
        RuleFamily::Mix,
        RuleFamily::Exchange,
        RuleFamily::Duplication,
        RuleFamily::Contraction,
        RuleFamily::DisjIntro,
        RuleFamily::ConjIntro,
    ];
    let system = System::ccc();
    let mut rng = StdRng::seed_from_u64(0x6_1);
    let mut truth_pairs = 0usize;
    while truth_pairs < 10_000 {
        let c = random_cirquent(&mut rng);
        let family = all_families[rng.gen_range(0..all_families.len())];
        let apps = backward_premises(&c, family, &system);
        if apps.is_empty() {
            continue;
        }
        let (rule, premises) = &apps[rng.gen_range(0..apps.len())];
        let m = random_model(&mut rng, &c, premises);
        let conclusion_true = eval_cirquent(&c, &m).unwrap();
        let premises_true =
            premises.iter().all(|p| eval_cirquent(p, &m).unwrap());
        // top-down: true premises force a true conclusion
        assert!(
            !premises_true || conclusion_true,
            "truth lost top-down: {family:?} on {c} in {m:?}"
        );
        // bottom-up for the six reversible rules; for the introduction
        // families only their conservative applications qualify
        if reversible.contains(&family) && is_conservative_intro(&c, rule, &premises[0]) {
            assert!(
                !conclusion_true || premises_true,
                "truth lost bottom-up: {family:?} on {c} in {m:?}"
            );
        }
        truth_pairs += 1;
    }
    // binarity preservation bottom-up along the contraction-free rules
    let cl5 = System::cl5();
    let mut binarity_pairs = 0usize;
    while binarity_pairs < 10_000 {
        let c = random_binary_cirquent(&mut rng);
        assert_ne!(binarity(&c), Binarity::NotBinary);
        let family = all_families[rng.gen_range(0..all_families.len())];
        let apps = backward_premises(&c, family, &cl5);
        if apps.is_empty() {
            continue;
        }
        let (_, premises) = &apps[rng.gen_range(0..apps.len())];
        for p in premises {
            assert_ne!(
                binarity(p),
                Binarity::NotBinary,
                "binarity lost: {family:?} on {c}"
            );
            if binarity(&c) == Binarity::NormalBinary {
                assert_eq!(
                    binarity(p),
                    Binarity::NormalBinary,
                    "normality lost: {family:?} on {c}"
                );
            }
        }
        binarity_pairs += 1;
    }
    pass(9, "truth preservation on 10000 rule/model pairs; binarity preservation on 10000");
}

// ---------------------------------------------------------------------------
// Criterion 11: sequent-proof translation.

#[test]
fn criterion_11_proof_translation() {
    let mut rng = StdRng::seed_from_u64(0x5_11);
    let mut translated = 0usize;
    while translated < 500 {
        // a provable base !F , F with random weakenings keeps provability
        let n = rng.gen_range(1..=3);
        let f = random_formula(&mut rng, n);
        let mut formulas = vec![f.negate(), f];
        for _ in 0..rng.gen_range(0..3) {
            let n = rng.gen_range(1..=2);
            let g = random_formula(&mut rng, n);
            let at = rng.gen_range(0..=formulas.len());
            formulas.insert(at, g);
        }
        let s = Sequent::new(formulas).unwrap();
        let p = prove_affine(&s).unwrap().expect("weakened identities stay provable");
        check_sequent_proof(&p, false).unwrap();
        let q: Proof = translate_sequent_proof(&p);
        assert_eq!(q.conclusion, Cirquent::from_sequent(&s));
        check_proof(&q, &System::cl5().with_primitive_only())
            .unwrap_or_else(|v| panic!("translated proof of {s} invalid: {v:?}"));
        translated += 1;
    }
    pass(11, "500 translated affine proofs check under primitive contraction-free rules");
}
