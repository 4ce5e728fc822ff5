//! Random generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use session_automata::{
    Automaton, DataLetter, DataValue, DataWord, Label, OpKind, RegisterOp, SymbolicWord,
    TransitionLabel,
};

pub fn labels(names: &[&str]) -> Vec<Label> {
    names.iter().map(|n| Label::new(n)).collect()
}

/// Session automaton with up to `max_states` states and `k` registers.
/// Each state gets each letter of `Σ × Γ_k` with probability `density`.
pub fn random_session_automaton(
    rng: &mut ChaCha8Rng,
    max_states: usize,
    k: u32,
    sigma: &[Label],
    density: f64,
) -> Automaton {
    let n = rng.gen_range(1..=max_states);
    let mut a = Automaton::new("R", sigma.iter().cloned(), k);
    let names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    for s in &names[1..] {
        a.add_state(s);
    }
    for s in &names {
        if rng.gen_bool(0.4) {
            a.set_final(s, true);
        }
    }
    for s in &names {
        for l in sigma {
            for r in 1..=k {
                for kind in [OpKind::GlobalFresh, OpKind::Reuse] {
                    if rng.gen_bool(density) {
                        let t = &names[rng.gen_range(0..n)];
                        a.add_transition(
                            s,
                            TransitionLabel::new(l.clone(), RegisterOp::new(kind, r)),
                            t,
                        );
                    }
                }
            }
        }
    }
    a
}

/// Every data word over `sigma` with values in `1..=values` and length at
/// most `max_len`.
pub fn all_words(sigma: &[Label], values: u64, max_len: usize) -> Vec<DataWord> {
    let mut out = vec![DataWord::new()];
    let mut layer = vec![DataWord::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for l in sigma {
                for d in 1..=values {
                    let mut v = w.0.clone();
                    v.push(DataLetter {
                        label: l.clone(),
                        value: DataValue(d),
                    });
                    next.push(DataWord(v));
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Random word of length at most `max_len` whose bound is at most `k`.
pub fn random_bounded_word(
    rng: &mut ChaCha8Rng,
    sigma: &[Label],
    k: usize,
    max_len: usize,
) -> DataWord {
    loop {
        let len = rng.gen_range(0..=max_len);
        let values = rng.gen_range(1..=len.max(1)) as u64;
        let w = DataWord(
            (0..len)
                .map(|_| DataLetter {
                    label: sigma[rng.gen_range(0..sigma.len())].clone(),
                    value: DataValue(rng.gen_range(1..=values) * 7 + 3),
                })
                .collect(),
        );
        if oracle_bound(&w) <= k {
            return w;
        }
    }
}

fn spans(w: &DataWord) -> BTreeMap<u64, (usize, usize)> {
    let mut spans: BTreeMap<u64, (usize, usize)> = BTreeMap::new();
    for (i, l) in w.0.iter().enumerate() {
        spans
            .entry(l.value.0)
            .and_modify(|s| s.1 = i)
            .or_insert((i, i));
    }
    spans
}

/// Largest number of sessions alive at one position.
pub fn oracle_bound(w: &DataWord) -> usize {
    let spans = spans(w);
    (0..w.len())
        .map(|i| spans.values().filter(|(f, l)| *f <= i && i <= *l).count())
        .max()
        .unwrap_or(0)
}

/// Normal form by greedy interval colouring: a new session takes the
/// smallest register not held by a session that is still alive.
pub fn oracle_snf(w: &DataWord) -> SymbolicWord {
    let spans = spans(w);
    let mut holder: HashMap<u32, u64> = HashMap::new();
    let mut reg_of: HashMap<u64, u32> = HashMap::new();
    let mut out = Vec::new();
    for (i, l) in w.0.iter().enumerate() {
        let d = l.value.0;
        let op = if let Some(&r) = reg_of.get(&d) {
            RegisterOp::reuse(r)
        } else {
            let alive = |r: &u32| holder.get(r).is_some_and(|h| spans[h].1 >= i);
            let r = (1..).find(|r| !alive(r)).unwrap();
            holder.insert(r, d);
            reg_of.insert(d, r);
            RegisterOp::fresh(r)
        };
        out.push(TransitionLabel::new(l.label.clone(), op));
    }
    SymbolicWord(out)
}

/// Whether `w` is a concretization of `u`: fresh values never seen before,
/// reuses read the register's current value.
pub fn oracle_concretizes(u: &SymbolicWord, w: &DataWord) -> bool {
    if u.len() != w.len() {
        return false;
    }
    let mut regs: HashMap<u32, u64> = HashMap::new();
    let mut seen = std::collections::HashSet::new();
    for (s, l) in u.0.iter().zip(&w.0) {
        if s.label != l.label {
            return false;
        }
        let d = l.value.0;
        match s.op.kind {
            OpKind::GlobalFresh => {
                if !seen.insert(d) {
                    return false;
                }
                regs.insert(s.op.register, d);
            }
            OpKind::Reuse => {
                if regs.get(&s.op.register) != Some(&d) {
                    return false;
                }
            }
            OpKind::LocalFresh => return false,
        }
    }
    true
}

/// Renames values by first occurrence; words with the same key are equal
/// up to a permutation of values.
pub fn permutation_key(w: &DataWord) -> Vec<(Label, u64)> {
    let mut names: HashMap<u64, u64> = HashMap::new();
    w.0.iter()
        .map(|l| {
            let fresh = names.len() as u64 + 1;
            (l.label.clone(), *names.entry(l.value.0).or_insert(fresh))
        })
        .collect()
}

/// Membership via `simulate`, memoized per permutation class.
pub struct Semantics<'a> {
    automaton: &'a Automaton,
    cache: HashMap<Vec<(Label, u64)>, bool>,
}

impl<'a> Semantics<'a> {
    pub fn new(automaton: &'a Automaton) -> Self {
        Semantics {
            automaton,
            cache: HashMap::new(),
        }
    }

    pub fn contains(&mut self, w: &DataWord) -> bool {
        let key = permutation_key(w);
        if let Some(&b) = self.cache.get(&key) {
            return b;
        }
        let b = self.automaton.simulate(w).expect("simulation succeeds");
        self.cache.insert(key, b);
        b
    }
}
