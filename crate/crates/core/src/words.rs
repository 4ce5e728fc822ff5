//! Data words, symbolic words and the symbolic normal form.
//!
//! A data word is a sequence of `(label, value)` pairs. A symbolic word
//! replaces every value by a register operation: `*r` writes a globally
//! fresh value into register `r`, `^r` reads register `r` and `or` writes
//! a locally fresh value. Positions are 1-based in every public result.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A letter of the finite alphabet.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Label(Arc<str>);

impl Label {
    /// Panics if `name` is not a non-empty `[a-zA-Z0-9_]` token.
    pub fn new(name: &str) -> Label {
        assert!(Label::is_valid(name), "invalid label `{name}`");
        Label(Arc::from(name))
    }

    pub fn is_valid(name: &str) -> bool {
        !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<Label> for String {
    fn from(label: Label) -> String {
        label.0.to_string()
    }
}

impl TryFrom<String> for Label {
    type Error = String;

    fn try_from(name: String) -> std::result::Result<Self, Self::Error> {
        if Label::is_valid(&name) {
            Ok(Label(Arc::from(name)))
        } else {
            Err(format!("invalid label `{name}`"))
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

/// An element of the infinite data domain.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct DataValue(pub u64);

impl From<u64> for DataValue {
    fn from(v: u64) -> Self {
        DataValue(v)
    }
}

impl fmt::Display for DataValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct DataLetter {
    pub label: Label,
    pub value: DataValue,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct DataWord(pub Vec<DataLetter>);

impl DataWord {
    pub fn new() -> Self {
        DataWord(Vec::new())
    }

    pub fn from_pairs<S: AsRef<str>>(pairs: &[(S, u64)]) -> Self {
        DataWord(
            pairs
                .iter()
                .map(|(l, v)| DataLetter {
                    label: Label::new(l.as_ref()),
                    value: DataValue(*v),
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[DataLetter] {
        &self.0
    }

    pub fn labels(&self) -> impl Iterator<Item = &Label> {
        self.0.iter().map(|l| &l.label)
    }

    /// First and last (1-based) position at which `d` occurs.
    pub fn occurrence_bounds(&self, d: DataValue) -> Result<(usize, usize)> {
        let first = self.0.iter().position(|l| l.value == d);
        let last = self.0.iter().rposition(|l| l.value == d);
        match (first, last) {
            (Some(f), Some(l)) => Ok((f + 1, l + 1)),
            _ => Err(Error::ValueAbsent(d)),
        }
    }

    /// 0-based first and last occurrence of every value in the word.
    fn sessions(&self) -> HashMap<DataValue, (usize, usize)> {
        let mut spans: HashMap<DataValue, (usize, usize)> = HashMap::new();
        for (i, letter) in self.0.iter().enumerate() {
            spans
                .entry(letter.value)
                .and_modify(|s| s.1 = i)
                .or_insert((i, i));
        }
        spans
    }

    /// Maximal number of sessions covering a single position.
    pub fn bound(&self) -> usize {
        let n = self.0.len();
        // +1 at a session start, -1 just after its end
        let mut delta = vec![0i64; n + 1];
        for (first, last) in self.sessions().into_values() {
            delta[first] += 1;
            delta[last + 1] -= 1;
        }
        let mut open = 0i64;
        let mut best = 0i64;
        for d in &delta[..n] {
            open += d;
            best = best.max(open);
        }
        best as usize
    }

    pub fn is_k_bounded(&self, k: usize) -> bool {
        self.bound() <= k
    }

    /// Canonical member of the ≈-class: values renamed 1, 2, ... in order of
    /// first occurrence.
    pub fn normalized(&self) -> DataWord {
        let mut names: HashMap<DataValue, u64> = HashMap::new();
        DataWord(
            self.0
                .iter()
                .map(|l| {
                    let next = names.len() as u64 + 1;
                    let v = *names.entry(l.value).or_insert(next);
                    DataLetter {
                        label: l.label.clone(),
                        value: DataValue(v),
                    }
                })
                .collect(),
        )
    }

    /// Symbolic normal form: every fresh value goes to the least register
    /// whose current content is never read again.
    pub fn snf(&self) -> SymbolicWord {
        let sessions = self.sessions();
        let mut free = FreeRegisters::default();
        let mut assigned: HashMap<DataValue, u32> = HashMap::new();
        let mut out = Vec::with_capacity(self.0.len());
        for (i, letter) in self.0.iter().enumerate() {
            let (first, last) = sessions[&letter.value];
            let op = if i == first {
                let r = free.min();
                assigned.insert(letter.value, r);
                RegisterOp::fresh(r)
            } else {
                RegisterOp::reuse(assigned[&letter.value])
            };
            if i == last {
                free.insert(op.register);
            } else if i == first {
                free.remove_min();
            }
            out.push(TransitionLabel::new(letter.label.clone(), op));
        }
        SymbolicWord(out)
    }
}

/// Cofinite set of positive integers: everything at or above `next`, plus
/// the explicitly released registers below it.
#[derive(Debug)]
struct FreeRegisters {
    released: BTreeSet<u32>,
    next: u32,
}

impl Default for FreeRegisters {
    fn default() -> Self {
        FreeRegisters {
            released: BTreeSet::new(),
            next: 1,
        }
    }
}

impl FreeRegisters {
    fn min(&self) -> u32 {
        self.released.first().copied().unwrap_or(self.next)
    }

    fn remove_min(&mut self) {
        if self.released.pop_first().is_none() {
            self.next += 1;
        }
    }

    fn insert(&mut self, r: u32) {
        if r < self.next {
            self.released.insert(r);
        }
    }
}

impl fmt::Display for DataWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("-");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}:{}", l.label, l.value)?;
        }
        Ok(())
    }
}

/// `a ≈ b`: same labels and the same equality pattern on values.
pub fn data_equivalent(a: &DataWord, b: &DataWord) -> bool {
    a.len() == b.len() && a.labels().eq(b.labels()) && a.normalized() == b.normalized()
}

/// Register operations. The derived order (`*` < `^` < `o`) is the one used
/// for tie-breaking everywhere.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum OpKind {
    GlobalFresh,
    Reuse,
    LocalFresh,
}

impl OpKind {
    pub fn glyph(self) -> char {
        match self {
            OpKind::GlobalFresh => '⊛',
            OpKind::Reuse => '↑',
            OpKind::LocalFresh => '⊙',
        }
    }

    pub fn sigil(self) -> char {
        match self {
            OpKind::GlobalFresh => '*',
            OpKind::Reuse => '^',
            OpKind::LocalFresh => 'o',
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            OpKind::GlobalFresh => "fresh",
            OpKind::Reuse => "reuse",
            OpKind::LocalFresh => "local",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct RegisterOp {
    pub kind: OpKind,
    pub register: u32,
}

impl RegisterOp {
    pub fn new(kind: OpKind, register: u32) -> Self {
        debug_assert!(register >= 1);
        RegisterOp { kind, register }
    }

    pub fn fresh(register: u32) -> Self {
        RegisterOp::new(OpKind::GlobalFresh, register)
    }

    pub fn reuse(register: u32) -> Self {
        RegisterOp::new(OpKind::Reuse, register)
    }

    pub fn local(register: u32) -> Self {
        RegisterOp::new(OpKind::LocalFresh, register)
    }
}

impl fmt::Display for RegisterOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind.sigil(), self.register)
    }
}

/// The pair `(a, π)` labelling a transition; also a letter of a symbolic word.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct TransitionLabel {
    pub label: Label,
    pub op: RegisterOp,
}

impl TransitionLabel {
    pub fn new(label: Label, op: RegisterOp) -> Self {
        TransitionLabel { label, op }
    }

    /// Rendering with the mathematical glyphs, e.g. `a,⊛1`.
    pub fn glyphs(&self) -> String {
        format!(
            "{},{}{}",
            self.label,
            self.op.kind.glyph(),
            self.op.register
        )
    }
}

impl fmt::Display for TransitionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.label, self.op)
    }
}

/// All letters of `Σ × Γ_k` in the canonical order.
pub fn symbolic_alphabet<'a>(
    labels: impl IntoIterator<Item = &'a Label>,
    k: u32,
) -> BTreeSet<TransitionLabel> {
    labels
        .into_iter()
        .flat_map(|l| {
            (1..=k).flat_map(move |r| {
                [RegisterOp::fresh(r), RegisterOp::reuse(r)]
                    .into_iter()
                    .map(move |op| TransitionLabel::new(l.clone(), op))
            })
        })
        .collect()
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct SymbolicWord(pub Vec<TransitionLabel>);

impl SymbolicWord {
    pub fn new() -> Self {
        SymbolicWord(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[TransitionLabel] {
        &self.0
    }

    pub fn concat(&self, other: &SymbolicWord) -> SymbolicWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        SymbolicWord(v)
    }

    pub fn push(&self, letter: TransitionLabel) -> SymbolicWord {
        let mut v = self.0.clone();
        v.push(letter);
        SymbolicWord(v)
    }

    pub fn suffix(&self, from: usize) -> SymbolicWord {
        SymbolicWord(self.0[from..].to_vec())
    }

    pub fn max_register(&self) -> u32 {
        self.0.iter().map(|l| l.op.register).max().unwrap_or(0)
    }

    fn has_local_fresh(&self) -> bool {
        self.0.iter().any(|l| l.op.kind == OpKind::LocalFresh)
    }

    /// First (1-based) position reading a register that was never written.
    fn first_uninitialized_read(&self) -> Option<(usize, u32)> {
        let mut written = BTreeSet::new();
        for (i, l) in self.0.iter().enumerate() {
            match l.op.kind {
                OpKind::GlobalFresh => {
                    written.insert(l.op.register);
                }
                OpKind::Reuse if !written.contains(&l.op.register) => {
                    return Some((i + 1, l.op.register));
                }
                _ => {}
            }
        }
        None
    }

    /// Every `^r` is preceded by some `*r`.
    pub fn is_well_formed(&self) -> Result<bool> {
        if self.has_local_fresh() {
            return Err(Error::UnsupportedOp);
        }
        Ok(self.first_uninitialized_read().is_none())
    }

    /// Class index (0-based, numbered by first position) of every position.
    fn class_ids(&self) -> Vec<usize> {
        let mut current: HashMap<u32, usize> = HashMap::new();
        let mut next = 0;
        let mut ids = Vec::with_capacity(self.0.len());
        for l in &self.0 {
            let r = l.op.register;
            let id = match (l.op.kind, current.get(&r)) {
                (OpKind::Reuse, Some(&c)) => c,
                _ => {
                    next += 1;
                    next - 1
                }
            };
            current.insert(r, id);
            ids.push(id);
        }
        ids
    }

    /// The `∼_u` partition of positions `1..=n`, classes ordered by their
    /// least position.
    pub fn symbolic_classes(&self) -> Result<Vec<Vec<usize>>> {
        if self.has_local_fresh() {
            return Err(Error::UnsupportedOp);
        }
        let ids = self.class_ids();
        let count = ids.iter().map(|c| c + 1).max().unwrap_or(0);
        let mut classes = vec![Vec::new(); count];
        for (pos, id) in ids.into_iter().enumerate() {
            classes[id].push(pos + 1);
        }
        Ok(classes)
    }

    /// The least concretization: class `i` (by first position) gets value `i + 1`.
    pub fn concretize(&self) -> Result<DataWord> {
        if self.has_local_fresh() {
            return Err(Error::UnsupportedOp);
        }
        if let Some((position, register)) = self.first_uninitialized_read() {
            return Err(Error::NotWellFormed { position, register });
        }
        Ok(DataWord(
            self.0
                .iter()
                .zip(self.class_ids())
                .map(|(l, id)| DataLetter {
                    label: l.label.clone(),
                    value: DataValue(id as u64 + 1),
                })
                .collect(),
        ))
    }

    /// `w ∈ γ(u)`.
    pub fn is_concretization(&self, w: &DataWord) -> bool {
        if !matches!(self.is_well_formed(), Ok(true)) || w.len() != self.len() {
            return false;
        }
        if !w.labels().eq(self.0.iter().map(|l| &l.label)) {
            return false;
        }
        let mut by_class: HashMap<usize, DataValue> = HashMap::new();
        let mut by_value: HashMap<DataValue, usize> = HashMap::new();
        for (letter, id) in w.0.iter().zip(self.class_ids()) {
            if *by_class.entry(id).or_insert(letter.value) != letter.value {
                return false;
            }
            if *by_value.entry(letter.value).or_insert(id) != id {
                return false;
            }
        }
        true
    }
}

impl fmt::Display for SymbolicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("-");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromIterator<TransitionLabel> for SymbolicWord {
    fn from_iter<I: IntoIterator<Item = TransitionLabel>>(iter: I) -> Self {
        SymbolicWord(iter.into_iter().collect())
    }
}
