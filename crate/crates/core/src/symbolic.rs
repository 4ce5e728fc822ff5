//! Finite automata over the symbolic alphabet `Σ × Γ_k`.
//!
//! Letters are whole [`TransitionLabel`]s and are explored in their derived
//! order, so breadth-first searches return the shortlex-least witness and
//! state numberings are reproducible.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use crate::words::{Label, SymbolicWord, TransitionLabel};

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SymbolicNfa {
    pub alphabet: BTreeSet<TransitionLabel>,
    pub names: Vec<String>,
    pub initials: BTreeSet<usize>,
    pub finals: BTreeSet<usize>,
    pub transitions: Vec<BTreeMap<TransitionLabel, BTreeSet<usize>>>,
}

impl SymbolicNfa {
    pub fn new(alphabet: BTreeSet<TransitionLabel>) -> Self {
        SymbolicNfa {
            alphabet,
            ..Default::default()
        }
    }

    pub fn num_states(&self) -> usize {
        self.transitions.len()
    }

    pub fn add_state(&mut self, name: String) -> usize {
        self.names.push(name);
        self.transitions.push(BTreeMap::new());
        self.transitions.len() - 1
    }

    pub fn add_transition(&mut self, source: usize, letter: TransitionLabel, target: usize) {
        self.alphabet.insert(letter.clone());
        self.transitions[source]
            .entry(letter)
            .or_default()
            .insert(target);
    }

    pub fn successors(
        &self,
        states: &BTreeSet<usize>,
        letter: &TransitionLabel,
    ) -> BTreeSet<usize> {
        states
            .iter()
            .filter_map(|&s| self.transitions[s].get(letter))
            .flatten()
            .copied()
            .collect()
    }

    pub fn accepts(&self, u: &SymbolicWord) -> bool {
        let mut current = self.initials.clone();
        for letter in u.letters() {
            current = self.successors(&current, letter);
        }
        current.iter().any(|s| self.finals.contains(s))
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions
            .iter()
            .flat_map(|m| m.values())
            .map(BTreeSet::len)
            .sum()
    }
}

/// A deterministic automaton with a partial transition function; missing
/// transitions lead to an implicit rejecting sink.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicDfa {
    pub alphabet: BTreeSet<TransitionLabel>,
    pub names: Vec<String>,
    pub initial: usize,
    pub finals: BTreeSet<usize>,
    pub transitions: Vec<BTreeMap<TransitionLabel, usize>>,
}

impl SymbolicDfa {
    /// A single non-final state without transitions.
    pub fn empty(alphabet: BTreeSet<TransitionLabel>) -> Self {
        SymbolicDfa {
            alphabet,
            names: vec!["q0".into()],
            initial: 0,
            finals: BTreeSet::new(),
            transitions: vec![BTreeMap::new()],
        }
    }

    pub fn num_states(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_complete(&self) -> bool {
        self.transitions
            .iter()
            .all(|m| self.alphabet.iter().all(|l| m.contains_key(l)))
    }

    pub fn step(&self, state: usize, letter: &TransitionLabel) -> Option<usize> {
        self.transitions[state].get(letter).copied()
    }

    pub fn run(&self, u: &SymbolicWord) -> Option<usize> {
        u.letters()
            .iter()
            .try_fold(self.initial, |s, l| self.step(s, l))
    }

    pub fn accepts(&self, u: &SymbolicWord) -> bool {
        self.run(u).is_some_and(|s| self.finals.contains(&s))
    }

    /// Largest register index of the alphabet.
    pub fn registers(&self) -> u32 {
        self.alphabet
            .iter()
            .map(|l| l.op.register)
            .max()
            .unwrap_or(0)
    }

    pub fn labels(&self) -> BTreeSet<Label> {
        self.alphabet.iter().map(|l| l.label.clone()).collect()
    }

    pub fn to_nfa(&self) -> SymbolicNfa {
        SymbolicNfa {
            alphabet: self.alphabet.clone(),
            names: self.names.clone(),
            initials: BTreeSet::from([self.initial]),
            finals: self.finals.clone(),
            transitions: self
                .transitions
                .iter()
                .map(|m| {
                    m.iter()
                        .map(|(l, &t)| (l.clone(), BTreeSet::from([t])))
                        .collect()
                })
                .collect(),
        }
    }

    /// Adds a rejecting sink so that every letter of `alphabet` (merged into
    /// the automaton's own) is defined everywhere.
    pub fn completed_over(&self, alphabet: &BTreeSet<TransitionLabel>) -> SymbolicDfa {
        let mut out = self.clone();
        out.alphabet.extend(alphabet.iter().cloned());
        if out.is_complete() {
            return out;
        }
        let sink = out.transitions.len();
        out.names.push("__sink".into());
        out.transitions.push(BTreeMap::new());
        for m in &mut out.transitions {
            for l in &out.alphabet {
                m.entry(l.clone()).or_insert(sink);
            }
        }
        out
    }

    pub fn completed(&self) -> SymbolicDfa {
        self.completed_over(&BTreeSet::new())
    }

    /// States reachable from the initial state that can reach a final state.
    fn live_states(&self) -> Vec<bool> {
        let n = self.num_states();
        let mut reachable = vec![false; n];
        reachable[self.initial] = true;
        let mut stack = vec![self.initial];
        while let Some(s) = stack.pop() {
            for &t in self.transitions[s].values() {
                if !reachable[t] {
                    reachable[t] = true;
                    stack.push(t);
                }
            }
        }
        let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (s, m) in self.transitions.iter().enumerate() {
            for &t in m.values() {
                reverse[t].push(s);
            }
        }
        let mut productive = vec![false; n];
        let mut stack: Vec<usize> = self.finals.iter().copied().collect();
        for &f in &stack {
            productive[f] = true;
        }
        while let Some(s) = stack.pop() {
            for &p in &reverse[s] {
                if !productive[p] {
                    productive[p] = true;
                    stack.push(p);
                }
            }
        }
        (0..n).map(|s| reachable[s] && productive[s]).collect()
    }

    /// Restriction to `keep` plus the initial state, renumbered breadth-first
    /// from the initial state with letters in their canonical order.
    fn renumbered(&self, keep: &[bool]) -> SymbolicDfa {
        let mut order = vec![self.initial];
        let mut index: HashMap<usize, usize> = HashMap::from([(self.initial, 0)]);
        let mut head = 0;
        while head < order.len() {
            let s = order[head];
            head += 1;
            for &t in self.transitions[s].values() {
                if keep[t] && !index.contains_key(&t) {
                    index.insert(t, order.len());
                    order.push(t);
                }
            }
        }
        let transitions = order
            .iter()
            .map(|&s| {
                self.transitions[s]
                    .iter()
                    .filter(|(_, t)| keep[**t])
                    .filter_map(|(l, t)| index.get(t).map(|&i| (l.clone(), i)))
                    .collect()
            })
            .collect();
        SymbolicDfa {
            alphabet: self.alphabet.clone(),
            names: order.iter().map(|&s| self.names[s].clone()).collect(),
            initial: 0,
            finals: order
                .iter()
                .enumerate()
                .filter(|(_, s)| self.finals.contains(s))
                .map(|(i, _)| i)
                .collect(),
            transitions,
        }
    }

    /// Removes unreachable and dead states and numbers states canonically.
    pub fn trim(&self) -> SymbolicDfa {
        self.renumbered(&self.live_states())
    }

    /// Same reachable, trimmed transition structure (names and declared
    /// alphabets are ignored).
    pub fn is_isomorphic(&self, other: &SymbolicDfa) -> bool {
        let a = self.trim();
        let b = other.trim();
        a.finals == b.finals && a.transitions == b.transitions
    }
}

/// Subset construction over reachable subsets; the empty subset is left
/// implicit.
pub fn determinize(nfa: &SymbolicNfa) -> SymbolicDfa {
    let mut index: HashMap<BTreeSet<usize>, usize> = HashMap::new();
    let mut subsets: Vec<BTreeSet<usize>> = Vec::new();
    let mut transitions: Vec<BTreeMap<TransitionLabel, usize>> = Vec::new();

    index.insert(nfa.initials.clone(), 0);
    subsets.push(nfa.initials.clone());
    let mut head = 0;
    while head < subsets.len() {
        let current = subsets[head].clone();
        head += 1;
        let letters: BTreeSet<&TransitionLabel> = current
            .iter()
            .flat_map(|&s| nfa.transitions[s].keys())
            .collect();
        let mut row = BTreeMap::new();
        for letter in letters {
            let next = nfa.successors(&current, letter);
            if next.is_empty() {
                continue;
            }
            let id = *index.entry(next.clone()).or_insert_with(|| {
                subsets.push(next);
                subsets.len() - 1
            });
            row.insert(letter.clone(), id);
        }
        transitions.push(row);
    }
    SymbolicDfa {
        alphabet: nfa.alphabet.clone(),
        names: subsets
            .iter()
            .map(|s| {
                let parts: Vec<&str> = s.iter().map(|&i| nfa.names[i].as_str()).collect();
                format!("{{{}}}", parts.join(","))
            })
            .collect(),
        initial: 0,
        finals: subsets
            .iter()
            .enumerate()
            .filter(|(_, s)| s.iter().any(|x| nfa.finals.contains(x)))
            .map(|(i, _)| i)
            .collect(),
        transitions,
    }
}

/// Moore partition refinement on the completed automaton, followed by
/// trimming and canonical numbering.
pub fn minimize(dfa: &SymbolicDfa) -> SymbolicDfa {
    let complete = dfa.completed();
    let letters: Vec<&TransitionLabel> = complete.alphabet.iter().collect();
    let n = complete.num_states();

    let mut class: Vec<usize> = (0..n)
        .map(|s| usize::from(complete.finals.contains(&s)))
        .collect();
    let mut count = class.iter().collect::<BTreeSet<_>>().len();
    loop {
        let mut ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let next: Vec<usize> = (0..n)
            .map(|s| {
                let signature = letters
                    .iter()
                    .map(|l| class[complete.transitions[s][*l]])
                    .collect();
                let fresh = ids.len();
                *ids.entry((class[s], signature)).or_insert(fresh)
            })
            .collect();
        let refined = ids.len();
        class = next;
        if refined == count {
            break;
        }
        count = refined;
    }

    let mut quotient = SymbolicDfa {
        alphabet: complete.alphabet.clone(),
        names: (0..count).map(|i| format!("q{i}")).collect(),
        initial: class[complete.initial],
        finals: complete.finals.iter().map(|&s| class[s]).collect(),
        transitions: vec![BTreeMap::new(); count],
    };
    for s in 0..n {
        for (l, &t) in &complete.transitions[s] {
            quotient.transitions[class[s]].insert(l.clone(), class[t]);
        }
    }
    let mut trimmed = quotient.trim();
    trimmed.names = (0..trimmed.num_states()).map(|i| format!("q{i}")).collect();
    trimmed
}

/// Synchronous product; the alphabet is the union of both alphabets.
pub fn product(x: &SymbolicNfa, y: &SymbolicNfa) -> SymbolicNfa {
    let mut out = SymbolicNfa::new(x.alphabet.union(&y.alphabet).cloned().collect());
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut queue = VecDeque::new();
    for &a in &x.initials {
        for &b in &y.initials {
            let id = out.add_state(format!("({},{})", x.names[a], y.names[b]));
            index.insert((a, b), id);
            out.initials.insert(id);
            queue.push_back((a, b));
        }
    }
    while let Some((a, b)) = queue.pop_front() {
        let id = index[&(a, b)];
        if x.finals.contains(&a) && y.finals.contains(&b) {
            out.finals.insert(id);
        }
        for (letter, xs) in &x.transitions[a] {
            let Some(ys) = y.transitions[b].get(letter) else {
                continue;
            };
            for &a2 in xs {
                for &b2 in ys {
                    let target = match index.get(&(a2, b2)) {
                        Some(&t) => t,
                        None => {
                            let t = out.add_state(format!("({},{})", x.names[a2], y.names[b2]));
                            index.insert((a2, b2), t);
                            queue.push_back((a2, b2));
                            t
                        }
                    };
                    out.transitions[id]
                        .entry(letter.clone())
                        .or_default()
                        .insert(target);
                }
            }
        }
    }
    out
}

pub fn nfa_union(x: &SymbolicNfa, y: &SymbolicNfa) -> SymbolicNfa {
    let mut out = x.clone();
    out.alphabet.extend(y.alphabet.iter().cloned());
    let offset = x.num_states();
    for name in &y.names {
        out.add_state(name.clone());
    }
    out.initials.extend(y.initials.iter().map(|s| s + offset));
    out.finals.extend(y.finals.iter().map(|s| s + offset));
    for (s, m) in y.transitions.iter().enumerate() {
        for (l, ts) in m {
            for t in ts {
                out.add_transition(s + offset, l.clone(), t + offset);
            }
        }
    }
    out
}

/// Complement with respect to `alphabet*`, where `alphabet` is the union of
/// the automaton's alphabet and `extra`.
pub fn complement_over(dfa: &SymbolicDfa, extra: &BTreeSet<TransitionLabel>) -> SymbolicDfa {
    let mut out = dfa.completed_over(extra);
    out.finals = (0..out.num_states())
        .filter(|s| !dfa.finals.contains(s))
        .collect();
    out
}

pub fn complement(dfa: &SymbolicDfa) -> SymbolicDfa {
    complement_over(dfa, &BTreeSet::new())
}

/// Shortlex order: shorter first, then lexicographic.
pub fn shortlex_min(a: Option<SymbolicWord>, b: Option<SymbolicWord>) -> Option<SymbolicWord> {
    match (a, b) {
        (Some(a), Some(b)) => Some(if (a.len(), &a) <= (b.len(), &b) { a } else { b }),
        (a, b) => a.or(b),
    }
}

fn rebuild<N>(parents: &HashMap<N, (N, TransitionLabel)>, mut node: N) -> SymbolicWord
where
    N: std::hash::Hash + Eq + Clone,
{
    let mut letters = Vec::new();
    while let Some((prev, letter)) = parents.get(&node) {
        letters.push(letter.clone());
        node = prev.clone();
    }
    letters.reverse();
    SymbolicWord(letters)
}

/// Shortlex-least accepted word, if any.
pub fn shortest_accepted(nfa: &SymbolicNfa) -> Option<SymbolicWord> {
    symbolic_inclusion(nfa, &SymbolicNfa::new(BTreeSet::new()))
}

/// Shortlex-least word of `L(x) \ L(y)`, or `None` when `L(x) ⊆ L(y)`.
///
/// Both sides are determinized on the fly, so breadth-first search with
/// letters in order reaches every pair of subsets by its shortlex-least word.
pub fn symbolic_inclusion(x: &SymbolicNfa, y: &SymbolicNfa) -> Option<SymbolicWord> {
    type Node = (BTreeSet<usize>, BTreeSet<usize>);
    let start: Node = (x.initials.clone(), y.initials.clone());
    let mut parents: HashMap<Node, (Node, TransitionLabel)> = HashMap::new();
    let mut seen: HashSet<Node> = HashSet::from([start.clone()]);
    let mut queue: VecDeque<Node> = VecDeque::from([start]);
    while let Some(node) = queue.pop_front() {
        let (xs, ys) = &node;
        if xs.iter().any(|s| x.finals.contains(s)) && ys.iter().all(|s| !y.finals.contains(s)) {
            return Some(rebuild(&parents, node));
        }
        let letters: BTreeSet<&TransitionLabel> =
            xs.iter().flat_map(|&s| x.transitions[s].keys()).collect();
        for letter in letters {
            let next = (x.successors(xs, letter), y.successors(ys, letter));
            if seen.insert(next.clone()) {
                parents.insert(next.clone(), (node.clone(), letter.clone()));
                queue.push_back(next);
            }
        }
    }
    None
}

/// Shortlex-least word of the symmetric difference, or `None` when equal.
pub fn symbolic_equivalence(x: &SymbolicNfa, y: &SymbolicNfa) -> Option<SymbolicWord> {
    shortlex_min(symbolic_inclusion(x, y), symbolic_inclusion(y, x))
}
