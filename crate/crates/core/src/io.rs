//! Text formats: words, the line-oriented `.sra` automaton format and DOT.
//!
//! ```text
//! automaton NAME
//! labels a b
//! registers 2
//! states s0 s1
//! initial s0
//! final s0
//! trans s0 a fresh 1 s1    # fresh / local / reuse
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::automaton::{Automaton, StateId, Transition};
use crate::error::{Error, Result};
use crate::symbolic::SymbolicDfa;
use crate::words::{
    DataLetter, DataValue, DataWord, Label, OpKind, RegisterOp, SymbolicWord, TransitionLabel,
};

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        message: message.into(),
    }
}

fn tokens(text: &str) -> Option<std::str::SplitWhitespace<'_>> {
    let t = text.trim();
    if t.is_empty() || t == "-" {
        None
    } else {
        Some(t.split_whitespace())
    }
}

fn split_token(token: &str) -> Result<(Label, &str)> {
    let (label, rest) = token
        .split_once(':')
        .ok_or_else(|| syntax(1, format!("expected `label:value`, got `{token}`")))?;
    if !Label::is_valid(label) {
        return Err(syntax(1, format!("invalid label `{label}`")));
    }
    Ok((Label::new(label), rest))
}

/// `label:value` tokens separated by whitespace; `-` or nothing is ε.
pub fn parse_data_word(text: &str) -> Result<DataWord> {
    let Some(toks) = tokens(text) else {
        return Ok(DataWord::new());
    };
    toks.map(|tok| {
        let (label, value) = split_token(tok)?;
        let value = value
            .parse::<u64>()
            .map_err(|_| syntax(1, format!("invalid data value in `{tok}`")))?;
        Ok(DataLetter {
            label,
            value: DataValue(value),
        })
    })
    .collect::<Result<Vec<_>>>()
    .map(DataWord)
}

fn parse_register(text: &str, token: &str) -> Result<u32> {
    match text.parse::<u32>() {
        Ok(r) if r >= 1 => Ok(r),
        _ => Err(syntax(
            1,
            format!("invalid register in `{token}` (registers are >= 1)"),
        )),
    }
}

/// `label:*r`, `label:^r` and `label:or` tokens; `-` or nothing is ε.
pub fn parse_symbolic_word(text: &str) -> Result<SymbolicWord> {
    let Some(toks) = tokens(text) else {
        return Ok(SymbolicWord::new());
    };
    toks.map(|tok| {
        let (label, op) = split_token(tok)?;
        let mut chars = op.chars();
        let kind = match chars.next() {
            Some('*') => OpKind::GlobalFresh,
            Some('^') => OpKind::Reuse,
            Some('o') => OpKind::LocalFresh,
            _ => return Err(syntax(1, format!("expected `*r`, `^r` or `or` in `{tok}`"))),
        };
        let register = parse_register(chars.as_str(), tok)?;
        Ok(TransitionLabel::new(label, RegisterOp::new(kind, register)))
    })
    .collect::<Result<Vec<_>>>()
    .map(SymbolicWord)
}

fn op_keyword(kind: &str) -> Option<OpKind> {
    match kind {
        "fresh" => Some(OpKind::GlobalFresh),
        "local" => Some(OpKind::LocalFresh),
        "reuse" => Some(OpKind::Reuse),
        _ => None,
    }
}

/// Parses the `.sra` format. Only syntax is checked; see
/// [`Automaton::validate`] for structural checks.
pub fn parse_automaton(text: &str) -> Result<Automaton> {
    let mut name: Option<String> = None;
    let mut alphabet = BTreeSet::new();
    let mut registers: Option<u32> = None;
    let mut states: Vec<StateId> = Vec::new();
    let mut initial: Option<StateId> = None;
    let mut finals = BTreeSet::new();
    let mut transitions = BTreeSet::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut words = content.split_whitespace();
        let Some(keyword) = words.next() else {
            continue;
        };
        let args: Vec<&str> = words.collect();
        let state = |s: &str| -> Result<StateId> {
            if s.is_empty() || s.contains(':') {
                Err(syntax(line, format!("invalid state name `{s}`")))
            } else {
                Ok(StateId::new(s))
            }
        };
        match keyword {
            "automaton" => match args.as_slice() {
                [n] => name = Some(n.to_string()),
                _ => return Err(syntax(line, "expected `automaton NAME`")),
            },
            "labels" => {
                for l in args {
                    if !Label::is_valid(l) {
                        return Err(syntax(line, format!("invalid label `{l}`")));
                    }
                    alphabet.insert(Label::new(l));
                }
            }
            "registers" => match args.as_slice() {
                [k] => {
                    registers = Some(
                        k.parse()
                            .map_err(|_| syntax(line, format!("invalid register count `{k}`")))?,
                    )
                }
                _ => return Err(syntax(line, "expected `registers K`")),
            },
            "states" => {
                for s in args {
                    let s = state(s)?;
                    if !states.contains(&s) {
                        states.push(s);
                    }
                }
            }
            "initial" => match args.as_slice() {
                [s] => initial = Some(state(s)?),
                _ => return Err(syntax(line, "expected `initial STATE`")),
            },
            "final" => {
                for s in args {
                    finals.insert(state(s)?);
                }
            }
            "trans" => {
                let [source, label, kind, register, target] = args.as_slice() else {
                    return Err(syntax(
                        line,
                        "expected `trans SOURCE LABEL fresh|local|reuse REGISTER TARGET`",
                    ));
                };
                if !Label::is_valid(label) {
                    return Err(syntax(line, format!("invalid label `{label}`")));
                }
                let kind = op_keyword(kind).ok_or_else(|| {
                    syntax(
                        line,
                        format!("unknown operation `{kind}` (expected fresh, local or reuse)"),
                    )
                })?;
                let register: u32 = match register.parse() {
                    Ok(r) if r >= 1 => r,
                    _ => return Err(syntax(line, format!("invalid register `{register}`"))),
                };
                transitions.insert(Transition {
                    source: state(source)?,
                    label: TransitionLabel::new(Label::new(label), RegisterOp::new(kind, register)),
                    target: state(target)?,
                });
            }
            other => return Err(syntax(line, format!("unknown directive `{other}`"))),
        }
    }

    let last = text.lines().count().max(1);
    let registers = registers.ok_or_else(|| syntax(last, "missing `registers` line"))?;
    let initial = match initial {
        Some(s) => s,
        None => states
            .first()
            .cloned()
            .ok_or_else(|| syntax(last, "missing `initial` line"))?,
    };
    Ok(Automaton {
        name: name.unwrap_or_else(|| "A".to_string()),
        alphabet,
        registers,
        states,
        initial,
        finals,
        transitions,
    })
}

pub fn serialize_automaton(a: &Automaton) -> String {
    let mut out = String::new();
    let join = |it: &mut dyn Iterator<Item = String>| it.collect::<Vec<_>>().join(" ");
    let _ = writeln!(out, "automaton {}", a.name);
    let _ = writeln!(
        out,
        "labels {}",
        join(&mut a.alphabet.iter().map(|l| l.to_string()))
    );
    let _ = writeln!(out, "registers {}", a.registers);
    let _ = writeln!(
        out,
        "states {}",
        join(&mut a.states.iter().map(|s| s.to_string()))
    );
    let _ = writeln!(out, "initial {}", a.initial);
    if !a.finals.is_empty() {
        let _ = writeln!(
            out,
            "final {}",
            join(&mut a.finals.iter().map(|s| s.to_string()))
        );
    }
    for t in &a.transitions {
        let _ = writeln!(
            out,
            "trans {} {} {} {} {}",
            t.source,
            t.label.label,
            t.label.op.kind.keyword(),
            t.label.op.register,
            t.target
        );
    }
    out
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Shared DOT layout: `edges` maps (source, target) to its labels.
fn dot(
    name: &str,
    nodes: &[(String, bool)],
    initial: usize,
    edges: &BTreeMap<(usize, usize), Vec<String>>,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", dot_escape(name));
    let _ = writeln!(out, "  rankdir=LR;");
    let _ = writeln!(out, "  __start [shape=point, style=invis];");
    for (i, (label, is_final)) in nodes.iter().enumerate() {
        let shape = if *is_final { "doublecircle" } else { "circle" };
        let _ = writeln!(
            out,
            "  n{i} [label=\"{}\", shape={shape}];",
            dot_escape(label)
        );
    }
    let _ = writeln!(out, "  __start -> n{initial};");
    for ((s, t), labels) in edges {
        let _ = writeln!(
            out,
            "  n{s} -> n{t} [label=\"{}\"];",
            dot_escape(&labels.join("\\n"))
        );
    }
    out.push_str("}\n");
    out
}

pub fn automaton_to_dot(a: &Automaton) -> String {
    let index = |s: &StateId| a.states.iter().position(|x| x == s);
    let nodes: Vec<(String, bool)> = a
        .states
        .iter()
        .map(|s| (s.to_string(), a.finals.contains(s)))
        .collect();
    let mut edges: BTreeMap<(usize, usize), Vec<String>> = BTreeMap::new();
    for t in &a.transitions {
        if let (Some(s), Some(d)) = (index(&t.source), index(&t.target)) {
            edges.entry((s, d)).or_default().push(t.label.glyphs());
        }
    }
    dot(&a.name, &nodes, index(&a.initial).unwrap_or(0), &edges)
}

pub fn dfa_to_dot(name: &str, dfa: &SymbolicDfa) -> String {
    let nodes: Vec<(String, bool)> = (0..dfa.num_states())
        .map(|s| (dfa.names[s].clone(), dfa.finals.contains(&s)))
        .collect();
    let mut edges: BTreeMap<(usize, usize), Vec<String>> = BTreeMap::new();
    for (s, m) in dfa.transitions.iter().enumerate() {
        for (l, &t) in m {
            edges.entry((s, t)).or_default().push(l.glyphs());
        }
    }
    dot(name, &nodes, dfa.initial, &edges)
}
