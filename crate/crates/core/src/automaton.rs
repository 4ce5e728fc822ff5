//! Fresh-register automata and their session/register subclasses.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::symbolic::SymbolicNfa;
use crate::words::{
    symbolic_alphabet, DataValue, DataWord, Label, OpKind, SymbolicWord, TransitionLabel,
};

/// State names. Names starting with `__` are reserved for synthesized states.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(Arc<str>);

impl StateId {
    pub fn new(name: &str) -> Self {
        StateId(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Transition {
    pub source: StateId,
    pub label: TransitionLabel,
    pub target: StateId,
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} --{}--> {}", self.source, self.label, self.target)
    }
}

/// A fresh-register automaton with registers `1..=registers`.
///
/// Fields are public so that automata can be assembled freely; `validate`
/// reports anything that breaks the structural invariants.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Automaton {
    pub name: String,
    pub alphabet: BTreeSet<Label>,
    pub registers: u32,
    pub states: Vec<StateId>,
    pub initial: StateId,
    pub finals: BTreeSet<StateId>,
    pub transitions: BTreeSet<Transition>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum AutomatonClass {
    FreshRegister,
    Register,
    Session,
}

impl fmt::Display for AutomatonClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AutomatonClass::FreshRegister => "fresh-register",
            AutomatonClass::Register => "register",
            AutomatonClass::Session => "session",
        })
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Diagnostic {
    NoRegisters,
    NoStates,
    DuplicateState(StateId),
    InitialNotAState(StateId),
    FinalNotAState(StateId),
    SourceNotAState(Transition),
    TargetNotAState(Transition),
    RegisterOutOfRange(Transition),
    LabelNotInAlphabet(Transition),
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::NoRegisters => write!(f, "NoRegisters: at least one register is required"),
            Diagnostic::NoStates => write!(f, "NoStates: the state set is empty"),
            Diagnostic::DuplicateState(s) => write!(f, "DuplicateState: {s}"),
            Diagnostic::InitialNotAState(s) => write!(f, "InitialNotAState: {s}"),
            Diagnostic::FinalNotAState(s) => write!(f, "FinalNotAState: {s}"),
            Diagnostic::SourceNotAState(t) => write!(f, "SourceNotAState: {t}"),
            Diagnostic::TargetNotAState(t) => write!(f, "TargetNotAState: {t}"),
            Diagnostic::RegisterOutOfRange(t) => write!(f, "RegisterOutOfRange: {t}"),
            Diagnostic::LabelNotInAlphabet(t) => write!(f, "LabelNotInAlphabet: {t}"),
        }
    }
}

impl Automaton {
    /// An automaton with a single, non-final state `s0` and no transitions.
    pub fn new(name: &str, alphabet: impl IntoIterator<Item = Label>, registers: u32) -> Self {
        let s0 = StateId::new("s0");
        Automaton {
            name: name.to_string(),
            alphabet: alphabet.into_iter().collect(),
            registers,
            states: vec![s0.clone()],
            initial: s0,
            finals: BTreeSet::new(),
            transitions: BTreeSet::new(),
        }
    }

    /// Adds a state if it is not present yet.
    pub fn add_state(&mut self, name: &str) -> StateId {
        let id = StateId::new(name);
        if !self.states.contains(&id) {
            self.states.push(id.clone());
        }
        id
    }

    pub fn add_transition(&mut self, source: &str, label: TransitionLabel, target: &str) {
        let source = self.add_state(source);
        let target = self.add_state(target);
        self.transitions.insert(Transition {
            source,
            label,
            target,
        });
    }

    pub fn set_final(&mut self, state: &str, is_final: bool) {
        let id = self.add_state(state);
        if is_final {
            self.finals.insert(id);
        } else {
            self.finals.remove(&id);
        }
    }

    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut diags = Vec::new();
        if self.registers == 0 {
            diags.push(Diagnostic::NoRegisters);
        }
        if self.states.is_empty() {
            diags.push(Diagnostic::NoStates);
        }
        let mut seen = HashSet::new();
        for s in &self.states {
            if !seen.insert(s) {
                diags.push(Diagnostic::DuplicateState(s.clone()));
            }
        }
        if !seen.contains(&self.initial) {
            diags.push(Diagnostic::InitialNotAState(self.initial.clone()));
        }
        for f in &self.finals {
            if !seen.contains(f) {
                diags.push(Diagnostic::FinalNotAState(f.clone()));
            }
        }
        for t in &self.transitions {
            if !seen.contains(&t.source) {
                diags.push(Diagnostic::SourceNotAState(t.clone()));
            }
            if !seen.contains(&t.target) {
                diags.push(Diagnostic::TargetNotAState(t.clone()));
            }
            if t.label.op.register == 0 || t.label.op.register > self.registers {
                diags.push(Diagnostic::RegisterOutOfRange(t.clone()));
            }
            if !self.alphabet.contains(&t.label.label) {
                diags.push(Diagnostic::LabelNotInAlphabet(t.clone()));
            }
        }
        diags
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let diags = self.validate();
        if diags.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(diags))
        }
    }

    fn uses(&self, kind: OpKind) -> bool {
        self.transitions.iter().any(|t| t.label.op.kind == kind)
    }

    /// Most specific class. Automata using neither `*` nor `o` fall in both
    /// subclasses and are reported as session automata.
    pub fn classify(&self) -> Result<AutomatonClass> {
        self.ensure_valid()?;
        let global = self.uses(OpKind::GlobalFresh);
        let local = self.uses(OpKind::LocalFresh);
        Ok(match (global, local) {
            (true, true) => AutomatonClass::FreshRegister,
            (false, true) => AutomatonClass::Register,
            _ => AutomatonClass::Session,
        })
    }

    /// Valid and free of locally fresh operations.
    pub fn ensure_session(&self) -> Result<()> {
        if self.classify()? == AutomatonClass::Session {
            Ok(())
        } else {
            Err(Error::NotSessionAutomaton(self.name.clone()))
        }
    }

    pub fn is_symbolically_deterministic(&self) -> bool {
        let mut seen = HashSet::new();
        self.transitions
            .iter()
            .all(|t| seen.insert((&t.source, &t.label)))
    }

    pub fn is_data_deterministic(&self) -> Result<bool> {
        self.ensure_session()?;
        if !self.is_symbolically_deterministic() {
            return Ok(false);
        }
        let mut fresh = HashSet::new();
        Ok(self
            .transitions
            .iter()
            .filter(|t| t.label.op.kind == OpKind::GlobalFresh)
            .all(|t| fresh.insert((&t.source, &t.label.label))))
    }

    /// Concrete membership by exploring configuration sets.
    pub fn simulate(&self, w: &DataWord) -> Result<bool> {
        self.ensure_valid()?;
        Simulator::new(self).accepts(w)
    }

    /// Membership of `u` in the symbolic language, read as a plain NFA.
    pub fn accepts_symbolic(&self, u: &SymbolicWord) -> Result<bool> {
        self.ensure_session()?;
        let mut current: BTreeSet<&StateId> = BTreeSet::from([&self.initial]);
        for letter in u.letters() {
            current = self
                .transitions
                .iter()
                .filter(|t| &t.label == letter && current.contains(&t.source))
                .map(|t| &t.target)
                .collect();
            if current.is_empty() {
                return Ok(false);
            }
        }
        Ok(current.iter().any(|s| self.finals.contains(*s)))
    }

    /// The automaton read as a finite automaton over `Σ × Γ_k`.
    pub fn symbolic_nfa(&self) -> Result<SymbolicNfa> {
        self.ensure_session()?;
        let index: HashMap<&StateId, usize> = self
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect();
        let mut nfa = SymbolicNfa::new(symbolic_alphabet(&self.alphabet, self.registers));
        for s in &self.states {
            nfa.add_state(s.to_string());
        }
        nfa.initials.insert(index[&self.initial]);
        for f in &self.finals {
            nfa.finals.insert(index[f]);
        }
        for t in &self.transitions {
            nfa.add_transition(index[&t.source], t.label.clone(), index[&t.target]);
        }
        Ok(nfa)
    }

    pub fn outgoing<'a>(&'a self, state: &'a StateId) -> impl Iterator<Item = &'a Transition> + 'a {
        self.transitions.iter().filter(move |t| &t.source == state)
    }
}

/// Register contents indexed by `register - 1`.
type Assignment = Vec<Option<DataValue>>;

/// Pre-indexed form of an automaton for repeated membership tests.
#[derive(Debug)]
pub struct Simulator<'a> {
    automaton: &'a Automaton,
    initial: usize,
    finals: Vec<bool>,
    out: Vec<Vec<(&'a TransitionLabel, usize)>>,
}

impl<'a> Simulator<'a> {
    /// `automaton` must be valid.
    pub fn new(automaton: &'a Automaton) -> Self {
        let index: HashMap<&StateId, usize> = automaton
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect();
        let mut out = vec![Vec::new(); automaton.states.len()];
        for t in &automaton.transitions {
            out[index[&t.source]].push((&t.label, index[&t.target]));
        }
        Simulator {
            automaton,
            initial: index[&automaton.initial],
            finals: automaton
                .states
                .iter()
                .map(|s| automaton.finals.contains(s))
                .collect(),
            out,
        }
    }

    pub fn accepts(&self, w: &DataWord) -> Result<bool> {
        let k = self.automaton.registers as usize;
        // U is determined by the prefix read so far, so (state, τ) suffices.
        let mut configs: HashSet<(usize, Assignment)> =
            HashSet::from([(self.initial, vec![None; k])]);
        let mut used: HashSet<DataValue> = HashSet::new();
        for letter in w.letters() {
            if !self.automaton.alphabet.contains(&letter.label) {
                return Err(Error::UnknownLabel(letter.label.to_string()));
            }
            let d = letter.value;
            let mut next = HashSet::new();
            for (state, tau) in &configs {
                for &(label, target) in &self.out[*state] {
                    if label.label != letter.label {
                        continue;
                    }
                    let r = label.op.register as usize - 1;
                    let enabled = match label.op.kind {
                        OpKind::Reuse => tau[r] == Some(d),
                        OpKind::LocalFresh => !tau.contains(&Some(d)),
                        OpKind::GlobalFresh => !used.contains(&d),
                    };
                    if enabled {
                        let mut tau2 = tau.clone();
                        tau2[r] = Some(d);
                        next.insert((target, tau2));
                    }
                }
            }
            used.insert(d);
            configs = next;
            if configs.is_empty() {
                return Ok(false);
            }
        }
        Ok(configs.iter().any(|(s, _)| self.finals[*s]))
    }
}
