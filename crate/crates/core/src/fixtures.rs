//! Automata from the worked examples, shipped as `.sra` text.

use crate::automaton::{Automaton, StateId, Transition};
use crate::io::parse_automaton;
use crate::words::{Label, RegisterOp, TransitionLabel};

pub const REQUESTS_LOCAL: &str = include_str!("../fixtures/requests_local.sra");
pub const REQUESTS_ONCE: &str = include_str!("../fixtures/requests_once.sra");
pub const BOUNDED2: &str = include_str!("../fixtures/bounded2.sra");
pub const REQUESTS_FRESH: &str = include_str!("../fixtures/requests_fresh.sra");
pub const TWO_SESSIONS: &str = include_str!("../fixtures/two_sessions.sra");
pub const P2P: &str = include_str!("../fixtures/p2p.sra");
pub const TWO_SESSIONS_COUNTEREXAMPLES: &str =
    include_str!("../fixtures/two_sessions_counterexamples.txt");

fn load(text: &str) -> Automaton {
    parse_automaton(text).expect("bundled fixture parses")
}

/// Register automaton with local freshness.
pub fn requests_local() -> Automaton {
    load(REQUESTS_LOCAL)
}

/// Session automaton, symbolically but not data deterministic.
pub fn requests_once() -> Automaton {
    load(REQUESTS_ONCE)
}

/// `requests_once` without the `s0 → s2` request; data deterministic, same language.
pub fn requests_once_deterministic() -> Automaton {
    let mut a = requests_once();
    a.transitions.remove(&Transition {
        source: StateId::new("s0"),
        label: TransitionLabel::new(Label::new("req"), RegisterOp::fresh(2)),
        target: StateId::new("s2"),
    });
    a
}

/// Accepts every 2-bounded data word over `{a}`.
pub fn bounded2() -> Automaton {
    load(BOUNDED2)
}

/// Fresh-register automaton mixing global and local freshness.
pub fn requests_fresh() -> Automaton {
    load(REQUESTS_FRESH)
}

pub fn two_sessions() -> Automaton {
    load(TWO_SESSIONS)
}

pub fn p2p() -> Automaton {
    load(P2P)
}

/// A session automaton accepting only the empty word.
pub fn epsilon_only(labels: &[&str], registers: u32) -> Automaton {
    let mut a = Automaton::new("eps", labels.iter().map(|l| Label::new(l)), registers);
    a.set_final("s0", true);
    a
}

/// A session automaton with the empty language.
pub fn empty(labels: &[&str], registers: u32) -> Automaton {
    Automaton::new("empty", labels.iter().map(|l| Label::new(l)), registers)
}
