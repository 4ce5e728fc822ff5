//! Normal forms and canonical session automata.
//!
//! `canonicalize(A)` is the minimal deterministic automaton over `Σ × Γ_k`
//! whose language is the set of symbolic normal forms of `L(A)`. It is
//! obtained from the product of the normal-form automaton with the
//! register-renaming closure `tilde(A)`.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::automaton::{Automaton, StateId};
use crate::error::Result;
use crate::symbolic::{determinize, minimize, product, SymbolicDfa, SymbolicNfa};
use crate::words::{symbolic_alphabet, Label, OpKind, RegisterOp, SymbolicWord, TransitionLabel};

/// State of the normal-form automaton: the greatest register initialized
/// so far and the registers whose value must still be read before they may
/// be overwritten.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct NfState {
    pub top: u32,
    pub promised: BTreeSet<u32>,
}

impl NfState {
    pub fn initial() -> Self {
        NfState {
            top: 0,
            promised: BTreeSet::new(),
        }
    }

    pub fn is_final(&self) -> bool {
        self.promised.is_empty()
    }

    /// `None` where the transition is undefined. Registers above `k` are
    /// the caller's concern.
    pub fn step(&self, op: RegisterOp) -> Option<NfState> {
        let r = op.register;
        match op.kind {
            OpKind::Reuse if r <= self.top => {
                let mut promised = self.promised.clone();
                promised.remove(&r);
                Some(NfState {
                    top: self.top,
                    promised,
                })
            }
            OpKind::GlobalFresh if r - 1 <= self.top && !self.promised.contains(&r) => {
                let mut promised = self.promised.clone();
                promised.extend(1..r);
                Some(NfState {
                    top: self.top.max(r),
                    promised,
                })
            }
            _ => None,
        }
    }
}

impl fmt::Display for NfState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p: Vec<String> = self.promised.iter().map(u32::to_string).collect();
        write!(f, "({},{{{}}})", self.top, p.join(","))
    }
}

/// Whether `u` is the symbolic normal form of some data word.
pub fn is_normal_form(u: &SymbolicWord) -> bool {
    u.letters()
        .iter()
        .try_fold(NfState::initial(), |s, l| s.step(l.op))
        .is_some_and(|s| s.is_final())
}

/// Breadth-first exploration of a deterministic transition function given
/// on abstract states.
fn explore_dfa<S, F>(
    alphabet: BTreeSet<TransitionLabel>,
    initial: S,
    is_final: impl Fn(&S) -> bool,
    step: F,
) -> SymbolicDfa
where
    S: Clone + Eq + std::hash::Hash + fmt::Display,
    F: Fn(&S, &TransitionLabel) -> Option<S>,
{
    let mut dfa = SymbolicDfa {
        alphabet,
        names: vec![initial.to_string()],
        initial: 0,
        finals: BTreeSet::new(),
        transitions: vec![Default::default()],
    };
    let mut states = vec![initial.clone()];
    let mut index: HashMap<S, usize> = HashMap::from([(initial, 0)]);
    let mut queue = VecDeque::from([0usize]);
    let letters: Vec<TransitionLabel> = dfa.alphabet.iter().cloned().collect();
    while let Some(i) = queue.pop_front() {
        let state = states[i].clone();
        if is_final(&state) {
            dfa.finals.insert(i);
        }
        for letter in &letters {
            let Some(next) = step(&state, letter) else {
                continue;
            };
            let j = match index.get(&next) {
                Some(&j) => j,
                None => {
                    let j = states.len();
                    dfa.names.push(next.to_string());
                    dfa.transitions.push(Default::default());
                    index.insert(next.clone(), j);
                    states.push(next);
                    queue.push_back(j);
                    j
                }
            };
            dfa.transitions[i].insert(letter.clone(), j);
        }
    }
    dfa
}

/// Deterministic automaton recognizing `NF_k` over `labels`.
pub fn nf_automaton<'a>(k: u32, labels: impl IntoIterator<Item = &'a Label>) -> SymbolicDfa {
    explore_dfa(
        symbolic_alphabet(labels, k),
        NfState::initial(),
        NfState::is_final,
        |s, l| s.step(l.op),
    )
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
struct Initialized(BTreeSet<u32>);

impl fmt::Display for Initialized {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "{{{}}}", r.join(","))
    }
}

/// Deterministic automaton recognizing the well-formed words over `Σ × Γ_k`.
pub fn wf_automaton<'a>(k: u32, labels: impl IntoIterator<Item = &'a Label>) -> SymbolicDfa {
    explore_dfa(
        symbolic_alphabet(labels, k),
        Initialized(BTreeSet::new()),
        |_| true,
        |Initialized(set), l| match l.op.kind {
            OpKind::GlobalFresh => {
                let mut next = set.clone();
                next.insert(l.op.register);
                Some(Initialized(next))
            }
            OpKind::Reuse if set.contains(&l.op.register) => Some(Initialized(set.clone())),
            _ => None,
        },
    )
}

/// Partial injective map from registers of the original automaton to the
/// registers of the renamed word.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct PartialInjection(BTreeSet<(u32, u32)>);

impl PartialInjection {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: &[(u32, u32)]) -> Self {
        let inj = PartialInjection(pairs.iter().copied().collect());
        debug_assert!(inj.is_injective());
        inj
    }

    pub fn get(&self, from: u32) -> Option<u32> {
        self.0.iter().find(|(a, _)| *a == from).map(|(_, b)| *b)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn is_injective(&self) -> bool {
        let mut domain = BTreeSet::new();
        let mut range = BTreeSet::new();
        self.0
            .iter()
            .all(|&(a, b)| domain.insert(a) && range.insert(b))
    }

    /// `σ[from ↦ to]` where `σ` is the largest sub-mapping of `self` keeping
    /// the result injective: the old image of `from` and the old preimage
    /// of `to` are dropped.
    pub fn rebind(&self, from: u32, to: u32) -> Self {
        let mut pairs: BTreeSet<(u32, u32)> = self
            .0
            .iter()
            .copied()
            .filter(|&(a, b)| a != from && b != to)
            .collect();
        pairs.insert((from, to));
        PartialInjection(pairs)
    }
}

impl fmt::Display for PartialInjection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("∅");
        }
        let parts: Vec<String> = self.0.iter().map(|(a, b)| format!("{a}↦{b}")).collect();
        f.write_str(&parts.join(","))
    }
}

/// Automaton over `Σ × Γ_k` accepting every well-formed word that has the
/// same concretizations as some word of `L_symb(A)`. Only reachable
/// `(state, injection)` pairs are built.
pub fn tilde(a: &Automaton) -> Result<SymbolicNfa> {
    a.ensure_session()?;
    let k = a.registers;
    let mut nfa = SymbolicNfa::new(symbolic_alphabet(&a.alphabet, k));
    let mut index: HashMap<(StateId, PartialInjection), usize> = HashMap::new();
    let mut queue = VecDeque::new();

    let start = (a.initial.clone(), PartialInjection::empty());
    let id = nfa.add_state(format!("({},{})", start.0, start.1));
    nfa.initials.insert(id);
    index.insert(start.clone(), id);
    queue.push_back(start);

    while let Some(node) = queue.pop_front() {
        let id = index[&node];
        let (state, sigma) = &node;
        if a.finals.contains(state) {
            nfa.finals.insert(id);
        }
        let mut edges = Vec::new();
        for t in a.outgoing(state) {
            let r = t.label.op.register;
            match t.label.op.kind {
                OpKind::Reuse => {
                    if let Some(r2) = sigma.get(r) {
                        edges.push((
                            TransitionLabel::new(t.label.label.clone(), RegisterOp::reuse(r2)),
                            (t.target.clone(), sigma.clone()),
                        ));
                    }
                }
                OpKind::GlobalFresh => {
                    for r2 in 1..=k {
                        edges.push((
                            TransitionLabel::new(t.label.label.clone(), RegisterOp::fresh(r2)),
                            (t.target.clone(), sigma.rebind(r, r2)),
                        ));
                    }
                }
                OpKind::LocalFresh => unreachable!("session automata have no local freshness"),
            }
        }
        for (letter, next) in edges {
            let target = match index.get(&next) {
                Some(&t) => t,
                None => {
                    let t = nfa.add_state(format!("({},{})", next.0, next.1));
                    index.insert(next.clone(), t);
                    queue.push_back(next);
                    t
                }
            };
            nfa.add_transition(id, letter, target);
        }
    }
    Ok(nfa)
}

/// The canonical session automaton of `a`: minimal, trim, canonically
/// numbered, over `Σ × Γ_k` with `k = a.registers`.
pub fn canonicalize(a: &Automaton) -> Result<SymbolicDfa> {
    let tilde = tilde(a)?;
    let nf = nf_automaton(a.registers, &a.alphabet).to_nfa();
    let mut can = minimize(&determinize(&product(&nf, &tilde)));
    can.alphabet = symbolic_alphabet(&a.alphabet, a.registers);
    Ok(can)
}

/// Reads a deterministic symbolic automaton back as a session automaton.
/// States are named `q0, q1, ...` in the automaton's own numbering.
pub fn to_session_automaton(
    dfa: &SymbolicDfa,
    name: &str,
    labels: impl IntoIterator<Item = Label>,
    registers: u32,
) -> Automaton {
    let states: Vec<StateId> = (0..dfa.num_states())
        .map(|i| StateId::new(&format!("q{i}")))
        .collect();
    let mut alphabet: BTreeSet<Label> = labels.into_iter().collect();
    alphabet.extend(dfa.labels());
    Automaton {
        name: name.to_string(),
        alphabet,
        registers: registers.max(dfa.registers()).max(1),
        initial: states[dfa.initial].clone(),
        finals: dfa.finals.iter().map(|&s| states[s].clone()).collect(),
        transitions: dfa
            .transitions
            .iter()
            .enumerate()
            .flat_map(|(s, m)| {
                let states = &states;
                m.iter().map(move |(l, &t)| crate::automaton::Transition {
                    source: states[s].clone(),
                    label: l.clone(),
                    target: states[t].clone(),
                })
            })
            .collect(),
        states,
    }
}
