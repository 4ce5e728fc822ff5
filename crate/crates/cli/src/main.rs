use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use session_automata::canonical::{canonicalize, to_session_automaton};
use session_automata::io::{
    automaton_to_dot, dfa_to_dot, parse_automaton, parse_data_word, parse_symbolic_word,
    serialize_automaton,
};
use session_automata::langops::{
    complement_bounded, equivalent, includes, intersect, is_empty, is_universal_bounded, union,
};
use session_automata::learner::{
    learn, LearnOptions, LearnOutcome, ReferenceTeacher, ScriptedTeacher,
};
use session_automata::{Automaton, DataWord};

/// Session automata over data words.
#[derive(Parser)]
#[command(name = "sessaut", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an automaton file for structural errors.
    Validate { file: PathBuf },
    /// Print session, register or fresh-register.
    Classify { file: PathBuf },
    /// Symbolic normal form of a data word.
    Snf {
        #[arg(short)]
        w: String,
    },
    /// Number of overlapping sessions of a data word.
    Bound {
        #[arg(short)]
        w: String,
    },
    /// Whether the automaton accepts a data word.
    Member {
        file: PathBuf,
        #[arg(short)]
        w: String,
    },
    /// Whether the automaton accepts a symbolic word.
    SymbolicMember {
        file: PathBuf,
        #[arg(short)]
        u: String,
    },
    /// Canonical session automaton.
    Canonical {
        file: PathBuf,
        #[arg(short)]
        o: Option<PathBuf>,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Boolean operations.
    Op {
        op: BoolOp,
        a: PathBuf,
        b: Option<PathBuf>,
        #[arg(short)]
        o: PathBuf,
    },
    /// Whether L(A) is included in L(B).
    Include { a: PathBuf, b: PathBuf },
    /// Whether L(A) = L(B).
    Equiv { a: PathBuf, b: PathBuf },
    /// Whether the language is empty.
    Empty { file: PathBuf },
    /// Whether every k-bounded word is accepted.
    Universal {
        file: PathBuf,
        #[arg(short)]
        k: u32,
    },
    /// Learn the automaton in FILE through queries.
    Learn {
        file: PathBuf,
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        max_queries: Option<usize>,
        /// Counterexamples to hand out, one data word per line.
        #[arg(long)]
        script: Option<PathBuf>,
    },
    /// Graphviz rendering.
    Dot {
        file: PathBuf,
        #[arg(short)]
        o: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BoolOp {
    Union,
    Intersect,
    Complement,
}

type Outcome = Result<bool, String>;

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<(), String> {
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn load(path: &Path) -> Result<Automaton, String> {
    parse_automaton(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn word(text: &str) -> Result<DataWord, String> {
    parse_data_word(text).map_err(|e| format!("word `{text}`: {e}"))
}

/// Predicates print their witness and fail when one exists.
fn holds_unless(witness: Option<DataWord>) -> Outcome {
    match witness {
        None => Ok(true),
        Some(w) => {
            println!("{w}");
            Ok(false)
        }
    }
}

fn report(out: &LearnOutcome) {
    println!("# membership queries: {}", out.stats.membership_queries);
    println!("# equivalence queries: {}", out.stats.equivalence_queries);
    println!("# normal-form violations: {}", out.stats.nf_violations);
    print!("{}", serialize_automaton(&out.hypothesis));
}

fn run(command: Command) -> Outcome {
    let lib = |e: session_automata::Error| e.to_string();
    match command {
        Command::Validate { file } => {
            let a = load(&file)?;
            let diagnostics = a.validate();
            for d in &diagnostics {
                println!("{d}");
            }
            if diagnostics.is_empty() {
                println!("ok");
            }
            Ok(diagnostics.is_empty())
        }
        Command::Classify { file } => {
            println!("{}", load(&file)?.classify().map_err(lib)?);
            Ok(true)
        }
        Command::Snf { w } => {
            println!("{}", word(&w)?.snf());
            Ok(true)
        }
        Command::Bound { w } => {
            println!("{}", word(&w)?.bound());
            Ok(true)
        }
        Command::Member { file, w } => load(&file)?.simulate(&word(&w)?).map_err(lib),
        Command::SymbolicMember { file, u } => {
            let u = parse_symbolic_word(&u).map_err(|e| format!("word `{u}`: {e}"))?;
            load(&file)?.accepts_symbolic(&u).map_err(lib)
        }
        Command::Canonical { file, o, dot } => {
            let a = load(&file)?;
            let can = canonicalize(&a).map_err(lib)?;
            let name = format!("can_{}", a.name);
            if let Some(dot) = dot {
                write(&dot, &dfa_to_dot(&name, &can))?;
            }
            let text = serialize_automaton(&to_session_automaton(
                &can,
                &name,
                a.alphabet.iter().cloned(),
                a.registers,
            ));
            match o {
                Some(o) => write(&o, &text)?,
                None => print!("{text}"),
            }
            Ok(true)
        }
        Command::Op { op, a, b, o } => {
            let a = load(&a)?;
            let b = match (op, b) {
                (BoolOp::Complement, None) => None,
                (BoolOp::Complement, Some(_)) => {
                    return Err("complement takes one automaton".into())
                }
                (_, Some(b)) => Some(load(&b)?),
                (_, None) => return Err("union and intersect take two automata".into()),
            };
            let result = match (op, b) {
                (BoolOp::Union, Some(b)) => union(&a, &b),
                (BoolOp::Intersect, Some(b)) => intersect(&a, &b),
                _ => complement_bounded(&a),
            }
            .map_err(lib)?;
            write(&o, &serialize_automaton(&result))?;
            Ok(true)
        }
        Command::Include { a, b } => holds_unless(includes(&load(&a)?, &load(&b)?).map_err(lib)?),
        Command::Equiv { a, b } => holds_unless(equivalent(&load(&a)?, &load(&b)?).map_err(lib)?),
        Command::Empty { file } => holds_unless(is_empty(&load(&file)?).map_err(lib)?),
        Command::Universal { file, k } => {
            holds_unless(is_universal_bounded(&load(&file)?, k).map_err(lib)?)
        }
        Command::Learn {
            file,
            trace,
            max_queries,
            script,
        } => {
            let target = load(&file)?;
            let options = LearnOptions {
                max_queries,
                ..LearnOptions::default()
            };
            let out = match script {
                Some(script) => {
                    let words = read(&script)?
                        .lines()
                        .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
                        .map(word)
                        .collect::<Result<Vec<_>, _>>()?;
                    let mut teacher = ScriptedTeacher::new(&target, words).map_err(lib)?;
                    learn(&mut teacher, &target.alphabet, options)
                }
                None => {
                    let mut teacher = ReferenceTeacher::new(&target).map_err(lib)?;
                    learn(&mut teacher, &target.alphabet, options)
                }
            }
            .map_err(lib)?;
            if let Some(trace) = trace {
                write(&trace, &out.trace.to_json_lines())?;
            }
            report(&out);
            Ok(true)
        }
        Command::Dot { file, o } => {
            write(&o, &automaton_to_dot(&load(&file)?))?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(message) => {
            eprintln!("sessaut: {message}");
            ExitCode::from(2)
        }
    }
}
