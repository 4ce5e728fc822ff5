//! Boolean operations and decision procedures on session automata.
//!
//! Decision procedures return `None` when the property holds and a
//! concretized counterexample otherwise. Witnesses are concretizations of
//! shortlex-least symbolic witnesses, so they are deterministic.

use std::collections::BTreeSet;

use crate::automaton::{Automaton, StateId, Transition};
use crate::canonical::{canonicalize, nf_automaton, to_session_automaton, wf_automaton};
use crate::error::Result;
use crate::symbolic::{
    complement_over, minimize, product, shortest_accepted, symbolic_equivalence,
    symbolic_inclusion, SymbolicDfa, SymbolicNfa,
};
use crate::words::{symbolic_alphabet, DataWord, Label, SymbolicWord};

fn concretize_witness(u: Option<SymbolicWord>) -> Option<DataWord> {
    u.map(|u| {
        u.concretize()
            .expect("witnesses of canonical languages are well-formed")
    })
}

fn labels_of(a: &Automaton, b: &Automaton) -> BTreeSet<Label> {
    a.alphabet.union(&b.alphabet).cloned().collect()
}

/// `L(a) ∩ L(b)`, with `min(k_a, k_b)` registers.
pub fn intersect(a: &Automaton, b: &Automaton) -> Result<Automaton> {
    let can_a = canonicalize(a)?;
    let can_b = canonicalize(b)?;
    let k = a.registers.min(b.registers);
    let mut both = product(&can_a.to_nfa(), &can_b.to_nfa());
    // normal forms accepted on both sides never use more than k registers
    for m in &mut both.transitions {
        m.retain(|l, _| l.op.register <= k);
    }
    let labels = labels_of(a, b);
    both.alphabet = symbolic_alphabet(&labels, k);
    let min = minimize(&crate::symbolic::determinize(&both));
    Ok(to_session_automaton(
        &min,
        &format!("{}_and_{}", a.name, b.name),
        labels,
        k,
    ))
}

/// `L(a) ∪ L(b)`: disjoint union with a fresh initial state copying both
/// initial states' outgoing transitions.
pub fn union(a: &Automaton, b: &Automaton) -> Result<Automaton> {
    a.ensure_session()?;
    b.ensure_session()?;
    let rename = |prefix: &str, s: &StateId| StateId::new(&format!("__{prefix}.{s}"));
    let init = StateId::new("__init");
    let mut out = Automaton {
        name: format!("{}_or_{}", a.name, b.name),
        alphabet: labels_of(a, b),
        registers: a.registers.max(b.registers),
        states: vec![init.clone()],
        initial: init.clone(),
        finals: BTreeSet::new(),
        transitions: BTreeSet::new(),
    };
    if a.finals.contains(&a.initial) || b.finals.contains(&b.initial) {
        out.finals.insert(init.clone());
    }
    for (prefix, side) in [("l", a), ("r", b)] {
        out.states
            .extend(side.states.iter().map(|s| rename(prefix, s)));
        out.finals
            .extend(side.finals.iter().map(|s| rename(prefix, s)));
        for t in &side.transitions {
            out.transitions.insert(Transition {
                source: rename(prefix, &t.source),
                label: t.label.clone(),
                target: rename(prefix, &t.target),
            });
            if t.source == side.initial {
                out.transitions.insert(Transition {
                    source: init.clone(),
                    label: t.label.clone(),
                    target: rename(prefix, &t.target),
                });
            }
        }
    }
    Ok(out)
}

/// `B_k \ L(a)` for `k = a.registers`.
///
/// Built as `NF_k ∩ ¬can(a)`. The result is symbolically deterministic but
/// in general not data deterministic.
pub fn complement_bounded(a: &Automaton) -> Result<Automaton> {
    let can = canonicalize(a)?;
    let k = a.registers;
    let nf = nf_automaton(k, &a.alphabet);
    let co = complement_over(&can, &nf.alphabet);
    let rest = product(&nf.to_nfa(), &co.to_nfa());
    let min = minimize(&crate::symbolic::determinize(&rest));
    Ok(to_session_automaton(
        &min,
        &format!("not_{}", a.name),
        a.alphabet.iter().cloned(),
        k,
    ))
}

/// `None` iff `L(a) ⊆ L(b)`; otherwise a word of `L(a) \ L(b)`.
pub fn includes(a: &Automaton, b: &Automaton) -> Result<Option<DataWord>> {
    let can_a = canonicalize(a)?;
    let can_b = canonicalize(b)?;
    Ok(concretize_witness(symbolic_inclusion(
        &can_a.to_nfa(),
        &can_b.to_nfa(),
    )))
}

/// `None` iff `L(a) = L(b)`; otherwise a word of the symmetric difference.
pub fn equivalent(a: &Automaton, b: &Automaton) -> Result<Option<DataWord>> {
    let can_a = canonicalize(a)?;
    let can_b = canonicalize(b)?;
    Ok(canonical_difference(&can_a, &can_b))
}

/// Concretized shortlex-least word in the symmetric difference of two
/// canonical automata.
pub fn canonical_difference(x: &SymbolicDfa, y: &SymbolicDfa) -> Option<DataWord> {
    concretize_witness(symbolic_equivalence(&x.to_nfa(), &y.to_nfa()))
}

/// `None` iff `L(a) = ∅`; otherwise an accepted word.
pub fn is_empty(a: &Automaton) -> Result<Option<DataWord>> {
    let view: SymbolicNfa = a.symbolic_nfa()?;
    let wf = wf_automaton(a.registers, &a.alphabet);
    Ok(concretize_witness(shortest_accepted(&product(
        &view,
        &wf.to_nfa(),
    ))))
}

/// `None` iff every `k`-bounded data word over the alphabet of `a` is
/// accepted; otherwise a rejected `k`-bounded word.
pub fn is_universal_bounded(a: &Automaton, k: u32) -> Result<Option<DataWord>> {
    let can = canonicalize(a)?;
    let nf = nf_automaton(k.max(1), &a.alphabet);
    Ok(concretize_witness(symbolic_inclusion(
        &nf.to_nfa(),
        &can.to_nfa(),
    )))
}
