//! Command-line front end.
//!
//! Exit codes: 0 success / provable / true; 1 unprovable / false / invalid
//! proof; 2 parse or usage error; 3 cap exceeded.

use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cirquent::cirquent::{parse_cirquent, parse_sequent, Cirquent};
use cirquent::cl2::{parse_cl2_derivation, prove_cl2, write_cl2_derivation};
use cirquent::decide::{
    check_sequent_proof, decide_binary_instance, parse_sequent_proof, prove_affine,
    prove_ccc, prove_cl5, translate_sequent_proof, write_sequent_proof, DecideError,
};
use cirquent::formula::{parse as parse_formula, Formula};
use cirquent::inference::{check_proof, parse_proof, write_proof, System};
use cirquent::render::{render, Format};
use cirquent::resource::{
    cirquent_to_resource, extract_arrangement, is_trivial, parse_resource, represent,
    ExtractError, Resource, ResourceError,
};
use cirquent::semantics::{is_tautology, EvalError};
use cirquent::{CapExceeded, Caps};

#[derive(Parser)]
#[command(name = "cirquent", version, about = "Cirquent calculus toolkit")]
struct Cli {
    /// Distinct-atom cap for brute-force tautology checks.
    #[arg(long, global = true)]
    max_atoms: Option<usize>,
    /// Oliteral cap for binary-instance search.
    #[arg(long, global = true)]
    max_oliterals: Option<usize>,
    /// Port cap for arrangement search.
    #[arg(long, global = true)]
    max_ports: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProveSystem {
    Ccc,
    Cl5,
    /// CL6 has no prover; this reports that `check --system cl6` is the
    /// supported entry point.
    Cl6Check,
    Affine,
    Cl2,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckSystem {
    Ccc,
    Cl5,
    Cl6,
    Affine,
    Classical,
    Cl2,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Question {
    Tautology,
    BinaryInstance,
    Trivial,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ResourceVerb {
    Table,
    Represent,
    Trivial,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RenderFormat {
    Ascii,
    Dot,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConvertMode {
    SequentToCirquent,
    TranslateProof,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Formula,
    Cirquent,
    Sequent,
    Resource,
}

#[derive(Subcommand)]
enum Command {
    /// Prove a cirquent or formula, emitting a proof file.
    Prove {
        #[arg(long, value_enum)]
        system: ProveSystem,
        /// Formula, cirquent (for ccc / cl5) or sequent (for affine); `-` reads stdin.
        input: String,
        #[arg(long, value_enum)]
        kind: Option<Kind>,
    },
    /// Check a proof file against a system.
    Check {
        #[arg(long, value_enum)]
        system: CheckSystem,
        /// Require every cirquent in the proof to be primitive.
        #[arg(long)]
        primitive: bool,
        /// Proof file path; `-` reads stdin.
        file: String,
    },
    /// Decide a semantic question about a formula or cirquent.
    Decide {
        #[arg(long, value_enum)]
        question: Question,
        input: String,
        #[arg(long, value_enum)]
        kind: Option<Kind>,
    },
    /// Resource-semantics queries.
    Resource {
        #[arg(value_enum)]
        verb: ResourceVerb,
        /// Formula, cirquent or resource text.
        input: String,
        #[arg(long, value_enum)]
        kind: Option<Kind>,
    },
    /// Recover a trivializing arrangement from a contraction-free proof.
    ExtractArrangement {
        /// Proof file path; `-` reads stdin.
        file: String,
    },
    /// Draw a cirquent.
    Render {
        #[arg(long, value_enum)]
        format: RenderFormat,
        input: String,
        #[arg(long, value_enum)]
        kind: Option<Kind>,
    },
    /// Structure conversions.
    Convert {
        #[arg(value_enum)]
        mode: ConvertMode,
        /// A sequent.
        input: String,
    },
    /// Parse an expression and echo its canonical form.
    Parse {
        input: String,
        #[arg(long, value_enum)]
        kind: Option<Kind>,
    },
}

/// 0 success / provable / true; 1 unprovable / false / invalid; 2 parse or
/// usage; 3 cap exceeded.
enum Outcome {
    Yes(String),
    No(String),
    BadInput(String),
    Cap(CapExceeded),
}

impl Outcome {
    fn finish(self) -> ExitCode {
        match self {
            Outcome::Yes(msg) => {
                if !msg.is_empty() {
                    print!("{}", ensure_newline(msg));
                }
                ExitCode::from(0)
            }
            Outcome::No(msg) => {
                if !msg.is_empty() {
                    print!("{}", ensure_newline(msg));
                }
                ExitCode::from(1)
            }
            Outcome::BadInput(msg) => {
                eprint!("{}", ensure_newline(format!("error: {msg}")));
                ExitCode::from(2)
            }
            Outcome::Cap(c) => {
                eprintln!("error: {c}");
                ExitCode::from(3)
            }
        }
    }
}

fn ensure_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn read_arg(arg: &str) -> Result<String, Outcome> {
    if arg == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Outcome::BadInput(format!("reading stdin: {e}")))?;
        Ok(buf)
    } else {
        Ok(arg.to_string())
    }
}

fn read_file(arg: &str) -> Result<String, Outcome> {
    if arg == "-" {
        return read_arg(arg);
    }
    std::fs::read_to_string(arg).map_err(|e| Outcome::BadInput(format!("{arg}: {e}")))
}

fn detect_kind(text: &str) -> Kind {
    let t = text.trim_start();
    if t.starts_with('[') {
        Kind::Cirquent
    } else if t.starts_with("resource") {
        Kind::Resource
    } else {
        Kind::Formula
    }
}

fn as_cirquent(text: &str, kind: Option<Kind>) -> Result<Cirquent, Outcome> {
    match kind.unwrap_or_else(|| detect_kind(text)) {
        Kind::Cirquent => {
            parse_cirquent(text).map_err(|e| Outcome::BadInput(e.to_string()))
        }
        Kind::Formula => {
            let f = parse_formula(text).map_err(|e| Outcome::BadInput(e.to_string()))?;
            Ok(Cirquent::singleton(f))
        }
        Kind::Sequent => {
            let s = parse_sequent(text).map_err(|e| Outcome::BadInput(e.to_string()))?;
            Ok(Cirquent::from_sequent(&s))
        }
        Kind::Resource => Err(Outcome::BadInput(
            "expected a formula or cirquent, got resource text".into(),
        )),
    }
}

fn as_resource(text: &str, kind: Option<Kind>, caps: &Caps) -> Result<Resource, Outcome> {
    match kind.unwrap_or_else(|| detect_kind(text)) {
        Kind::Resource => parse_resource(text).map_err(Outcome::BadInput),
        other => {
            let c = as_cirquent(text, Some(other))?;
            cirquent_to_resource(&c, caps).map_err(resource_err)
        }
    }
}

fn resource_err(e: ResourceError) -> Outcome {
    match e {
        ResourceError::Cap(c) => Outcome::Cap(c),
        other => Outcome::BadInput(other.to_string()),
    }
}

fn decide_err(e: DecideError) -> Outcome {
    match e {
        DecideError::Cap(c) => Outcome::Cap(c),
        other => Outcome::BadInput(other.to_string()),
    }
}

fn eval_err(e: EvalError) -> Outcome {
    match e {
        EvalError::Cap(c) => Outcome::Cap(c),
        other => Outcome::BadInput(other.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut caps = Caps::default();
    if let Some(n) = cli.max_atoms {
        caps.max_atoms = n;
    }
    if let Some(n) = cli.max_oliterals {
        caps.max_oliterals = n;
    }
    if let Some(n) = cli.max_ports {
        caps.max_ports = n;
    }
    match run(cli.command, &caps) {
        Ok(outcome) | Err(outcome) => outcome.finish(),
    }
}

fn run(command: Command, caps: &Caps) -> Result<Outcome, Outcome> {
    match command {
        Command::Prove { system, input, kind } => {
            let text = read_arg(&input)?;
            prove(system, &text, kind, caps)
        }
        Command::Check { system, primitive, file } => {
            let text = read_file(&file)?;
            check(system, primitive, &text, caps)
        }
        Command::Decide { question, input, kind } => {
            let text = read_arg(&input)?;
            decide(question, &text, kind, caps)
        }
        Command::Resource { verb, input, kind } => {
            let text = read_arg(&input)?;
            resource(verb, &text, kind, caps)
        }
        Command::ExtractArrangement { file } => {
            let text = read_file(&file)?;
            let proof =
                parse_proof(&text).map_err(|e| Outcome::BadInput(e.to_string()))?;
            match extract_arrangement(&proof, caps) {
                Ok(a) => Ok(Outcome::Yes(a.to_string())),
                Err(ExtractError::Resource(ResourceError::Cap(c))) => Ok(Outcome::Cap(c)),
                Err(e) => Ok(Outcome::No(format!("NOT EXTRACTABLE: {e}"))),
            }
        }
        Command::Render { format, input, kind } => {
            let text = read_arg(&input)?;
            let c = as_cirquent(&text, kind)?;
            let format = match format {
                RenderFormat::Ascii => Format::Ascii,
                RenderFormat::Dot => Format::Dot,
            };
            Ok(Outcome::Yes(render(&c, format)))
        }
        Command::Convert { mode, input } => {
            let text = read_arg(&input)?;
            let s = parse_sequent(&text).map_err(|e| Outcome::BadInput(e.to_string()))?;
            match mode {
                ConvertMode::SequentToCirquent => {
                    Ok(Outcome::Yes(Cirquent::from_sequent(&s).to_string()))
                }
                ConvertMode::TranslateProof => {
                    match prove_affine(&s).map_err(decide_err)? {
                        Some(p) => {
                            Ok(Outcome::Yes(write_proof(&translate_sequent_proof(&p))))
                        }
                        None => Ok(Outcome::No("UNPROVABLE".into())),
                    }
                }
            }
        }
        Command::Parse { input, kind } => {
            let text = read_arg(&input)?;
            match kind.unwrap_or_else(|| detect_kind(&text)) {
                Kind::Formula => {
                    let f: Formula =
                        parse_formula(&text).map_err(|e| Outcome::BadInput(e.to_string()))?;
                    Ok(Outcome::Yes(f.to_string()))
                }
                Kind::Cirquent => {
                    let c = parse_cirquent(&text)
                        .map_err(|e| Outcome::BadInput(e.to_string()))?;
                    Ok(Outcome::Yes(c.to_string()))
                }
                Kind::Sequent => {
                    let s = parse_sequent(&text)
                        .map_err(|e| Outcome::BadInput(e.to_string()))?;
                    Ok(Outcome::Yes(s.to_string()))
                }
                Kind::Resource => {
                    let r = parse_resource(&text).map_err(Outcome::BadInput)?;
                    Ok(Outcome::Yes(r.to_string()))
                }
            }
        }
    }
}

fn prove(
    system: ProveSystem,
    text: &str,
    kind: Option<Kind>,
    caps: &Caps,
) -> Result<Outcome, Outcome> {
    match system {
        ProveSystem::Ccc | ProveSystem::Cl5 => {
            let c = as_cirquent(text, kind)?;
            let result = if system == ProveSystem::Ccc {
                prove_ccc(&c, caps)
            } else {
                prove_cl5(&c, caps)
            }
            .map_err(decide_err)?;
            Ok(match result {
                Some(p) => Outcome::Yes(write_proof(&p)),
                None => Outcome::No("UNPROVABLE".into()),
            })
        }
        ProveSystem::Cl6Check => Err(Outcome::BadInput(
            "cl6 is check-only: verify proofs with `check --system cl6`".into(),
        )),
        ProveSystem::Affine => {
            let s = parse_sequent(text).map_err(|e| Outcome::BadInput(e.to_string()))?;
            Ok(match prove_affine(&s).map_err(decide_err)? {
                Some(p) => Outcome::Yes(write_sequent_proof(&p)),
                None => Outcome::No("UNPROVABLE".into()),
            })
        }
        ProveSystem::Cl2 => {
            let f = parse_formula(text).map_err(|e| Outcome::BadInput(e.to_string()))?;
            Ok(match prove_cl2(&f, caps).map_err(Outcome::Cap)? {
                Some(d) => Outcome::Yes(write_cl2_derivation(&d)),
                None => Outcome::No("UNPROVABLE".into()),
            })
        }
    }
}

fn check(
    system: CheckSystem,
    primitive: bool,
    text: &str,
    caps: &Caps,
) -> Result<Outcome, Outcome> {
    let outcome = match system {
        CheckSystem::Ccc | CheckSystem::Cl5 | CheckSystem::Cl6 => {
            let mut sys = match system {
                CheckSystem::Ccc => System::ccc(),
                CheckSystem::Cl5 => System::cl5(),
                _ => System::cl6(),
            };
            if primitive {
                sys = sys.with_primitive_only();
            }
            let p = parse_proof(text).map_err(|e| Outcome::BadInput(e.to_string()))?;
            match check_proof(&p, &sys) {
                Ok(()) => Outcome::Yes("OK".into()),
                Err(violations) => Outcome::No(report(&violations)),
            }
        }
        CheckSystem::Affine | CheckSystem::Classical => {
            if primitive {
                return Err(Outcome::BadInput(
                    "--primitive applies to cirquent systems only".into(),
                ));
            }
            let p =
                parse_sequent_proof(text).map_err(|e| Outcome::BadInput(e.to_string()))?;
            match check_sequent_proof(&p, system == CheckSystem::Classical) {
                Ok(()) => Outcome::Yes("OK".into()),
                Err(violations) => Outcome::No(report(&violations)),
            }
        }
        CheckSystem::Cl2 => {
            if primitive {
                return Err(Outcome::BadInput(
                    "--primitive applies to cirquent systems only".into(),
                ));
            }
            // the parser replays every step, so parsing is checking
            match parse_cl2_derivation(text, caps) {
                Ok(_) => Outcome::Yes("OK".into()),
                Err(e) => Outcome::No(format!("INVALID: {e}")),
            }
        }
    };
    Ok(outcome)
}

fn report(violations: &[cirquent::inference::Violation]) -> String {
    let mut out = String::from("INVALID:\n");
    for v in violations {
        out.push_str(&format!("  {v}\n"));
    }
    out
}

fn decide(
    question: Question,
    text: &str,
    kind: Option<Kind>,
    caps: &Caps,
) -> Result<Outcome, Outcome> {
    match question {
        Question::Tautology => {
            let c = as_cirquent(text, kind)?;
            Ok(if is_tautology(&c, caps).map_err(eval_err)? {
                Outcome::Yes("TAUTOLOGY".into())
            } else {
                Outcome::No("NOT A TAUTOLOGY".into())
            })
        }
        Question::BinaryInstance => {
            let c = as_cirquent(text, kind)?;
            match decide_binary_instance(&c, caps).map_err(decide_err)? {
                Some((d, coupling)) => {
                    let mut out = format!("{d}\n");
                    for (n, p) in &coupling.pairs {
                        out.push_str(&format!("couple {n} {p}\n"));
                    }
                    Ok(Outcome::Yes(out))
                }
                None => Ok(Outcome::No("NOT AN INSTANCE".into())),
            }
        }
        Question::Trivial => trivial(text, kind, caps),
    }
}

fn trivial(text: &str, kind: Option<Kind>, caps: &Caps) -> Result<Outcome, Outcome> {
    let r = as_resource(text, kind, caps)?;
    match is_trivial(&r, caps).map_err(resource_err)? {
        Some(a) => {
            let listing = a.to_string();
            Ok(Outcome::Yes(if listing.is_empty() {
                "TRIVIAL (empty arrangement)".into()
            } else {
                listing
            }))
        }
        None => Ok(Outcome::No("NOT TRIVIAL".into())),
    }
}

fn resource(
    verb: ResourceVerb,
    text: &str,
    kind: Option<Kind>,
    caps: &Caps,
) -> Result<Outcome, Outcome> {
    match verb {
        ResourceVerb::Table => {
            let r = as_resource(text, kind, caps)?;
            let mut out = String::new();
            let ports: Vec<String> =
                r.interface().0.iter().map(ToString::to_string).collect();
            out.push_str(&ports.join(" "));
            out.push('\n');
            for (bits, value) in r.rows() {
                out.push_str(&format!(
                    "{} {}\n",
                    cirquent::resource::situation_string(&bits),
                    u8::from(value)
                ));
            }
            Ok(Outcome::Yes(out))
        }
        ResourceVerb::Represent => {
            let r = as_resource(text, kind, caps)?;
            Ok(Outcome::Yes(represent(&r).to_string()))
        }
        ResourceVerb::Trivial => trivial(text, kind, caps),
    }
}
