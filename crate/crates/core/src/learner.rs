//! Active learning of canonical session automata from membership and
//! equivalence queries, with Rivest-Schapire counterexample processing.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::Serialize;
use serde_json::{json, Value};

use crate::automaton::{Automaton, StateId, Transition};
use crate::canonical::{canonicalize, is_normal_form, nf_automaton};
use crate::error::{Error, Result};
use crate::langops::canonical_difference;
use crate::symbolic::{complement_over, product, shortest_accepted, SymbolicDfa};
use crate::words::{symbolic_alphabet, DataWord, Label, SymbolicWord, TransitionLabel};

/// A minimally adequate teacher.
pub trait Teacher {
    /// Whether `w` belongs to the target language.
    fn membership(&mut self, w: &DataWord) -> bool;

    /// `None` if `h` recognizes the target language, otherwise a data word
    /// on which they disagree.
    fn equivalence(&mut self, h: &Automaton) -> Result<Option<DataWord>>;
}

/// Teacher that knows the target and answers through its canonical form.
#[derive(Debug, Clone)]
pub struct ReferenceTeacher {
    canonical: SymbolicDfa,
}

impl ReferenceTeacher {
    pub fn new(target: &Automaton) -> Result<Self> {
        Ok(ReferenceTeacher {
            canonical: canonicalize(target)?,
        })
    }

    pub fn canonical(&self) -> &SymbolicDfa {
        &self.canonical
    }
}

pub fn reference_teacher(target: &Automaton) -> Result<ReferenceTeacher> {
    ReferenceTeacher::new(target)
}

impl Teacher for ReferenceTeacher {
    fn membership(&mut self, w: &DataWord) -> bool {
        self.canonical.accepts(&w.snf())
    }

    fn equivalence(&mut self, h: &Automaton) -> Result<Option<DataWord>> {
        Ok(canonical_difference(&canonicalize(h)?, &self.canonical))
    }
}

/// Answers membership from a reference target but hands out counterexamples
/// from a fixed list.
#[derive(Debug, Clone)]
pub struct ScriptedTeacher {
    reference: ReferenceTeacher,
    script: VecDeque<DataWord>,
}

impl ScriptedTeacher {
    pub fn new(target: &Automaton, script: impl IntoIterator<Item = DataWord>) -> Result<Self> {
        Ok(ScriptedTeacher {
            reference: ReferenceTeacher::new(target)?,
            script: script.into_iter().collect(),
        })
    }

    pub fn remaining(&self) -> usize {
        self.script.len()
    }
}

impl Teacher for ScriptedTeacher {
    fn membership(&mut self, w: &DataWord) -> bool {
        self.reference.membership(w)
    }

    fn equivalence(&mut self, h: &Automaton) -> Result<Option<DataWord>> {
        if self.reference.equivalence(h)?.is_none() {
            return Ok(None);
        }
        let w = self.script.pop_front().ok_or(Error::ScriptExhausted)?;
        let in_target = self.reference.membership(&w);
        let in_h = h
            .simulate(&w)
            .map_err(|e| Error::TeacherInconsistent(format!("counterexample {w}: {e}")))?;
        if in_target == in_h {
            return Err(Error::TeacherInconsistent(format!(
                "scripted word {w} is not a counterexample"
            )));
        }
        Ok(Some(w))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EventKind {
    MembershipQuery,
    EquivalenceQuery,
    NfViolation,
    CounterexampleProcessed,
    AlphabetExtended,
    TableClosed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEvent {
    pub event: EventKind,
    pub detail: Value,
    pub k: u32,
    pub upper_rows: Vec<String>,
    pub columns: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct LearnTrace {
    pub events: Vec<TraceEvent>,
}

impl LearnTrace {
    pub fn to_json_lines(&self) -> String {
        self.events
            .iter()
            .map(|e| serde_json::to_string(e).expect("trace events serialize") + "\n")
            .collect()
    }

    pub fn of_kind(&self, kind: EventKind) -> impl Iterator<Item = &TraceEvent> {
        self.events.iter().filter(move |e| e.event == kind)
    }
}

/// The table `(T, U, V)`. Rows are kept for upper and lower words alike.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationTable {
    pub k: u32,
    pub labels: BTreeSet<Label>,
    /// Upper rows in promotion order; `upper[0]` is ε.
    pub upper: Vec<SymbolicWord>,
    pub columns: Vec<SymbolicWord>,
    rows: BTreeMap<SymbolicWord, Vec<bool>>,
}

fn signs(row: &[bool]) -> String {
    row.iter().map(|&b| if b { '+' } else { '-' }).collect()
}

impl ObservationTable {
    pub fn letters(&self) -> BTreeSet<TransitionLabel> {
        symbolic_alphabet(&self.labels, self.k)
    }

    pub fn row(&self, u: &SymbolicWord) -> Option<&[bool]> {
        self.rows.get(u).map(Vec::as_slice)
    }

    pub fn is_upper(&self, u: &SymbolicWord) -> bool {
        self.upper.contains(u)
    }

    /// Lower rows `U·(Σ×Γ_k) \ U`, in lexicographic order.
    pub fn lower(&self) -> Vec<&SymbolicWord> {
        self.rows.keys().filter(|u| !self.is_upper(u)).collect()
    }

    fn upper_index(&self) -> HashMap<&[bool], usize> {
        self.upper
            .iter()
            .enumerate()
            .map(|(i, u)| (self.rows[u].as_slice(), i))
            .collect()
    }

    /// Lower rows whose contents match no upper row.
    pub fn unmatched(&self) -> Vec<&SymbolicWord> {
        let index = self.upper_index();
        self.lower()
            .into_iter()
            .filter(|u| !index.contains_key(self.rows[*u].as_slice()))
            .collect()
    }

    pub fn is_closed(&self) -> bool {
        self.unmatched().is_empty()
    }

    /// Index of the upper row reached by `u` in the hypothesis.
    fn run(&self, u: &[TransitionLabel]) -> Result<usize> {
        let index = self.upper_index();
        let mut state = 0;
        for l in u {
            let next = self.upper[state].push(l.clone());
            let row = self.rows.get(&next).ok_or(Error::NotClosed)?;
            state = *index.get(row.as_slice()).ok_or(Error::NotClosed)?;
        }
        Ok(state)
    }

    fn upper_strings(&self) -> Vec<String> {
        self.upper.iter().map(ToString::to_string).collect()
    }

    fn column_strings(&self) -> Vec<String> {
        self.columns.iter().map(ToString::to_string).collect()
    }

    /// `{"upper": [[word, "+-"], ..], "lower": [..]}`.
    pub fn snapshot(&self) -> Value {
        let entry = |u: &SymbolicWord| json!([u.to_string(), signs(&self.rows[u])]);
        json!({
            "upper": self.upper.iter().map(entry).collect::<Vec<_>>(),
            "lower": self.lower().into_iter().map(entry).collect::<Vec<_>>(),
        })
    }
}

/// Automaton of a closed table: states are upper rows, `ε` is initial,
/// `u` is final iff `T(u, ε) = +`.
pub fn build_hypothesis(table: &ObservationTable) -> Result<Automaton> {
    let index = table.upper_index();
    let name = |i: usize| StateId::new(&format!("q{i}"));
    let states: Vec<StateId> = (0..table.upper.len()).map(name).collect();
    let mut transitions = BTreeSet::new();
    for (i, u) in table.upper.iter().enumerate() {
        for l in table.letters() {
            let row = table.rows.get(&u.push(l.clone())).ok_or(Error::NotClosed)?;
            let j = *index.get(row.as_slice()).ok_or(Error::NotClosed)?;
            transitions.insert(Transition {
                source: states[i].clone(),
                label: l,
                target: states[j].clone(),
            });
        }
    }
    Ok(Automaton {
        name: "hypothesis".to_string(),
        alphabet: table.labels.clone(),
        registers: table.k,
        initial: states[0].clone(),
        finals: table
            .upper
            .iter()
            .enumerate()
            .filter(|(_, u)| table.rows[*u][0])
            .map(|(i, _)| states[i].clone())
            .collect(),
        transitions,
        states,
    })
}

/// Shortest symbolic word accepted by `h` that is not in normal form.
pub fn nf_violation_witness(h: &Automaton) -> Result<Option<SymbolicWord>> {
    let letters = symbolic_alphabet(&h.alphabet, h.registers);
    let outside = complement_over(&nf_automaton(h.registers, &h.alphabet), &letters);
    Ok(shortest_accepted(&product(
        &h.symbolic_nfa()?,
        &outside.to_nfa(),
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LearnOptions {
    /// Cap on membership plus equivalence queries sent to the teacher.
    pub max_queries: Option<usize>,
    /// Record one event per membership query.
    pub trace_membership: bool,
}

impl Default for LearnOptions {
    fn default() -> Self {
        LearnOptions {
            max_queries: None,
            trace_membership: true,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct LearnStats {
    /// Membership queries sent to the teacher (memoized, NF-filtered).
    pub membership_queries: usize,
    /// Equivalence queries sent to the teacher.
    pub equivalence_queries: usize,
    /// Hypotheses rejected locally for accepting a non-normal-form word.
    pub nf_violations: usize,
    /// Length of the longest counterexample returned by the teacher.
    pub longest_counterexample: usize,
}

impl LearnStats {
    /// Rounds of the main loop: equivalence queries plus NF short-circuits.
    pub fn rounds(&self) -> usize {
        self.equivalence_queries + self.nf_violations
    }
}

#[derive(Debug, Clone)]
pub struct LearnOutcome {
    pub hypothesis: Automaton,
    pub trace: LearnTrace,
    pub table: ObservationTable,
    pub stats: LearnStats,
}

/// Learner state: the table, memoized answers and the trace.
pub struct Learner<'t, T: Teacher> {
    teacher: &'t mut T,
    options: LearnOptions,
    pub table: ObservationTable,
    pub trace: LearnTrace,
    pub stats: LearnStats,
    answers: HashMap<SymbolicWord, bool>,
}

impl<'t, T: Teacher> Learner<'t, T> {
    /// Table with `k = 1`, `U = V = {ε}`, filled.
    pub fn new(
        teacher: &'t mut T,
        labels: &BTreeSet<Label>,
        options: LearnOptions,
    ) -> Result<Self> {
        let mut learner = Learner {
            teacher,
            options,
            table: ObservationTable {
                k: 1,
                labels: labels.clone(),
                upper: vec![SymbolicWord::new()],
                columns: vec![SymbolicWord::new()],
                rows: BTreeMap::new(),
            },
            trace: LearnTrace::default(),
            stats: LearnStats::default(),
            answers: HashMap::new(),
        };
        learner.add_rows_for(&SymbolicWord::new(), &learner.table.letters())?;
        Ok(learner)
    }

    fn record(&mut self, event: EventKind, detail: Value) {
        self.trace.events.push(TraceEvent {
            event,
            detail,
            k: self.table.k,
            upper_rows: self.table.upper_strings(),
            columns: self.table.column_strings(),
        });
    }

    fn spend(&self) -> Result<()> {
        match self.options.max_queries {
            Some(max) if self.stats.membership_queries + self.stats.equivalence_queries >= max => {
                Err(Error::QueryBudgetExceeded(max))
            }
            _ => Ok(()),
        }
    }

    /// `−` for words outside NF without asking; otherwise the teacher's
    /// answer on the concretization. Memoized.
    pub fn symbolic_membership(&mut self, u: &SymbolicWord) -> Result<bool> {
        if let Some(&b) = self.answers.get(u) {
            return Ok(b);
        }
        let answer = if is_normal_form(u) {
            self.spend()?;
            let w = u.concretize()?;
            let answer = self.teacher.membership(&w);
            self.stats.membership_queries += 1;
            if self.options.trace_membership {
                self.record(
                    EventKind::MembershipQuery,
                    json!({"word": w.to_string(), "symbolic": u.to_string(), "answer": answer}),
                );
            }
            answer
        } else {
            false
        };
        self.answers.insert(u.clone(), answer);
        Ok(answer)
    }

    fn fill_row(&mut self, u: &SymbolicWord) -> Result<()> {
        let columns = self.table.columns.clone();
        let row = columns
            .iter()
            .map(|v| self.symbolic_membership(&u.concat(v)))
            .collect::<Result<Vec<_>>>()?;
        self.table.rows.insert(u.clone(), row);
        Ok(())
    }

    fn add_rows_for(
        &mut self,
        u: &SymbolicWord,
        letters: &BTreeSet<TransitionLabel>,
    ) -> Result<()> {
        if !self.table.rows.contains_key(u) {
            self.fill_row(u)?;
        }
        for l in letters {
            let ul = u.push(l.clone());
            if !self.table.rows.contains_key(&ul) {
                self.fill_row(&ul)?;
            }
        }
        Ok(())
    }

    /// Promotes unmatched lower rows until the table is closed. Among
    /// several candidates the lexicographically greatest goes first.
    pub fn close_table(&mut self) -> Result<()> {
        while let Some(u) = self.table.unmatched().last().map(|u| (*u).clone()) {
            self.table.upper.push(u.clone());
            let letters = self.table.letters();
            self.add_rows_for(&u, &letters)?;
        }
        let snapshot = self.table.snapshot();
        self.record(EventKind::TableClosed, snapshot);
        Ok(())
    }

    /// Switches to `Σ × Γ_k`, filling only the rows for the new letters.
    pub fn extend_alphabet(&mut self, k: u32) -> Result<()> {
        let old = self.table.letters();
        self.table.k = k;
        let new: BTreeSet<TransitionLabel> =
            self.table.letters().difference(&old).cloned().collect();
        for u in self.table.upper.clone() {
            self.add_rows_for(&u, &new)?;
        }
        let snapshot = self.table.snapshot();
        self.record(
            EventKind::AlphabetExtended,
            json!({"k": k, "table": snapshot}),
        );
        Ok(())
    }

    fn g(&mut self, z: &SymbolicWord, i: usize) -> Result<bool> {
        // s_i · v_i with 1-based i
        let s = self.table.run(&z.letters()[..i - 1])?;
        let word = self.table.upper[s].concat(&z.suffix(i - 1));
        self.symbolic_membership(&word)
    }

    /// Break-point search along `z` and addition of the distinguishing
    /// word to the columns. Returns `false` when `g(1) = g(m+1)`, that is
    /// when the current hypothesis already classifies `z` correctly.
    pub fn process_counterexample(&mut self, z: &SymbolicWord) -> Result<bool> {
        if !self.table.is_closed() {
            return Err(Error::NotClosed);
        }
        let m = z.len();
        let (mut lo, mut hi) = (1, m + 1);
        let g_lo = self.g(z, lo)?;
        if g_lo == self.g(z, hi)? {
            return Ok(false);
        }
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.g(z, mid)? == g_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let v = z.suffix(lo);
        if self.table.columns.contains(&v) {
            return Err(Error::NoBreakpoint(z.to_string()));
        }
        self.table.columns.push(v.clone());
        let words: Vec<SymbolicWord> = self.table.rows.keys().cloned().collect();
        for u in words {
            let b = self.symbolic_membership(&u.concat(&v))?;
            self.table.rows.get_mut(&u).expect("row exists").push(b);
        }
        self.record(
            EventKind::CounterexampleProcessed,
            json!({"counterexample": z.to_string(), "breakpoint": lo, "distinguishing": v.to_string()}),
        );
        Ok(true)
    }

    /// Main loop.
    pub fn run(mut self) -> Result<LearnOutcome> {
        loop {
            self.close_table()?;
            let h = build_hypothesis(&self.table)?;
            let z = if let Some(z) = nf_violation_witness(&h)? {
                self.stats.nf_violations += 1;
                self.record(EventKind::NfViolation, json!({"witness": z.to_string()}));
                z
            } else {
                self.spend()?;
                let answer = self.teacher.equivalence(&h)?;
                self.stats.equivalence_queries += 1;
                self.record(
                    EventKind::EquivalenceQuery,
                    json!({"counterexample": answer.as_ref().map(ToString::to_string)}),
                );
                let Some(w) = answer else {
                    return Ok(LearnOutcome {
                        hypothesis: h,
                        trace: self.trace,
                        table: self.table,
                        stats: self.stats,
                    });
                };
                self.stats.longest_counterexample = self.stats.longest_counterexample.max(w.len());
                let z = w.snf();
                if z.max_register() > self.table.k {
                    self.extend_alphabet(z.max_register())?;
                    if !self.table.is_closed() {
                        continue;
                    }
                }
                z
            };
            self.process_counterexample(&z)?;
        }
    }
}

/// Runs the learning loop for the labels `labels`.
pub fn learn<T: Teacher>(
    teacher: &mut T,
    labels: &BTreeSet<Label>,
    options: LearnOptions,
) -> Result<LearnOutcome> {
    Learner::new(teacher, labels, options)?.run()
}
