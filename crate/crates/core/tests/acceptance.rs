//! Acceptance criteria 1 to 10. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

mod common;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use common::*;
use session_automata::canonical::{canonicalize, nf_automaton, tilde, to_session_automaton};
use session_automata::io::{parse_data_word, parse_symbolic_word};
use session_automata::langops::{
    complement_bounded, equivalent, includes, intersect, is_empty, union,
};
use session_automata::learner::{
    learn, EventKind, LearnOptions, ReferenceTeacher, ScriptedTeacher,
};
use session_automata::{
    fixtures, Automaton, DataWord, Label, SymbolicDfa, Transition, TransitionLabel,
};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {{
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($msg)+));
        }
    }};
}

fn letter(s: &str) -> TransitionLabel {
    parse_symbolic_word(s).unwrap().0.remove(0)
}

/// DFA from an edge list over symbolic letters; state 0 is initial.
fn hand_dfa(states: usize, finals: &[usize], edges: &[(usize, &str, usize)]) -> SymbolicDfa {
    let mut transitions = vec![BTreeMap::new(); states];
    let mut alphabet = BTreeSet::new();
    for &(s, l, t) in edges {
        let l = letter(l);
        alphabet.insert(l.clone());
        transitions[s].insert(l, t);
    }
    SymbolicDfa {
        alphabet,
        names: (0..states).map(|i| i.to_string()).collect(),
        initial: 0,
        finals: finals.iter().copied().collect(),
        transitions,
    }
}

fn criterion_1() -> Check {
    let w = parse_data_word("a:8 b:4 a:8 c:3 a:4 b:3 a:9").unwrap();
    let got = w.snf().to_string();
    ensure!(got == "a:*1 b:*2 a:^1 c:*1 a:^2 b:^1 a:*1", "snf = {got}");
    Ok(got)
}

fn criterion_2() -> Check {
    let w = parse_data_word("a:4 b:2 a:4 a:3 c:2 c:1 b:3 c:1 c:3").unwrap();
    ensure!(w.bound() == 2, "bound = {}", w.bound());
    ensure!(
        w.is_k_bounded(2) && !w.is_k_bounded(1),
        "k-boundedness wrong"
    );
    Ok("bound 2".into())
}

fn criterion_3() -> Check {
    let long = parse_data_word("req:8 req:4 ack:8 req:3 ack:4 req:8 ack:3 ack:8").unwrap();
    let short = parse_data_word("req:8 req:4 ack:8 req:3 ack:4 ack:3").unwrap();
    let a1 = fixtures::requests_local();
    let a2 = fixtures::requests_once();
    let got = (
        a1.simulate(&long).unwrap(),
        a2.simulate(&long).unwrap(),
        a2.simulate(&short).unwrap(),
    );
    ensure!(got == (true, false, true), "got {got:?}");
    Ok("A1 accepts, A2 rejects the 8-letter word; A2 accepts the 6-letter word".into())
}

fn criterion_4() -> Check {
    // (0,∅)=0, (1,∅)=1, (2,{1})=2, (2,∅)=3
    let nf2 = hand_dfa(
        4,
        &[0, 1, 3],
        &[
            (0, "a:*1", 1),
            (1, "a:*1", 1),
            (1, "a:^1", 1),
            (1, "a:*2", 2),
            (2, "a:*2", 2),
            (2, "a:^2", 2),
            (2, "a:^1", 3),
            (3, "a:*2", 2),
            (3, "a:*1", 3),
            (3, "a:^1", 3),
            (3, "a:^2", 3),
        ],
    );
    let nf = nf_automaton(2, &[Label::new("a")]);
    ensure!(nf.num_states() == 4, "{} states", nf.num_states());
    ensure!(nf.is_isomorphic(&nf2), "transition structure differs");
    Ok("4 states, isomorphic to the hand-coded automaton".into())
}

fn two_sessions_canonical() -> SymbolicDfa {
    hand_dfa(
        4,
        &[0, 1, 3],
        &[
            (0, "a:*1", 1),
            (1, "a:*1", 1),
            (1, "b:^1", 1),
            (1, "a:*2", 2),
            (2, "a:*2", 2),
            (2, "b:^2", 2),
            (2, "b:^1", 3),
            (3, "a:*2", 2),
            (3, "a:*1", 3),
            (3, "b:^1", 3),
            (3, "b:^2", 3),
        ],
    )
}

fn criterion_5() -> Check {
    let a = fixtures::two_sessions();
    let can = canonicalize(&a).map_err(|e| e.to_string())?;
    ensure!(can.num_states() == 4, "{} states", can.num_states());
    ensure!(
        can.is_isomorphic(&two_sessions_canonical()),
        "not isomorphic to the expected canonical form"
    );
    let t = tilde(&a).map_err(|e| e.to_string())?;
    ensure!(t.num_states() == 7, "tilde has {} states", t.num_states());
    Ok("canonical form has 4 states; tilde has 7".into())
}

type Rows = &'static [(&'static str, &'static str)];

/// Compares a snapshot with an expected table. Lower rows left out of the
/// expectation must be all minus; `prefix _` stands for every extension.
fn compare_table(name: &str, snapshot: &Value, upper: Rows, lower: Rows) -> Result<(), String> {
    let read = |key: &str| -> Vec<(String, String)> {
        snapshot[key]
            .as_array()
            .unwrap()
            .iter()
            .map(|e| {
                (
                    e[0].as_str().unwrap().to_string(),
                    e[1].as_str().unwrap().to_string(),
                )
            })
            .collect()
    };
    let got_upper = read("upper");
    let want_upper: Vec<(String, String)> = upper
        .iter()
        .map(|(u, r)| (u.to_string(), r.to_string()))
        .collect();
    ensure!(got_upper == want_upper, "{name}: upper rows {got_upper:?}");
    let got_lower: HashMap<String, String> = read("lower").into_iter().collect();
    let mut covered = BTreeSet::new();
    for (u, r) in lower {
        if let Some(prefix) = u.strip_suffix(" _") {
            for (w, row) in &got_lower {
                if w.starts_with(&format!("{prefix} ")) {
                    ensure!(row == r, "{name}: row {w} = {row}, expected {r}");
                    covered.insert(w.clone());
                }
            }
        } else {
            ensure!(
                got_lower.get(*u) == Some(&r.to_string()),
                "{name}: row {u} = {:?}, expected {r}",
                got_lower.get(*u)
            );
            covered.insert(u.to_string());
        }
    }
    for (w, row) in &got_lower {
        if !covered.contains(w) {
            ensure!(!row.contains('+'), "{name}: omitted row {w} = {row}");
        }
    }
    Ok(())
}

fn criterion_6() -> Check {
    let target = fixtures::two_sessions();
    let script = ["a:3 b:3", "a:7 a:4 b:7", "a:9 a:3 b:9 b:3"].map(|w| parse_data_word(w).unwrap());
    let mut teacher = ScriptedTeacher::new(&target, script).map_err(|e| e.to_string())?;
    let out = learn(&mut teacher, &target.alphabet, LearnOptions::default())
        .map_err(|e| e.to_string())?;
    let closed: Vec<&Value> = out
        .trace
        .of_kind(EventKind::TableClosed)
        .map(|e| &e.detail)
        .collect();
    let extended: Vec<&Value> = out
        .trace
        .of_kind(EventKind::AlphabetExtended)
        .map(|e| &e.detail["table"])
        .collect();
    ensure!(
        closed.len() == 4 && extended.len() == 1,
        "{} closings, {} extensions",
        closed.len(),
        extended.len()
    );

    compare_table(
        "table 1",
        closed[0],
        &[("-", "+"), ("b:^1", "-")],
        &[("a:*1", "+"), ("b:*1", "-"), ("b:^1 _", "-")],
    )?;
    let o2_upper: Rows = &[("-", "+-"), ("b:^1", "--"), ("a:*1", "++")];
    compare_table(
        "table 2",
        closed[1],
        o2_upper,
        &[("b:^1 _", "--"), ("a:*1 a:*1", "++"), ("a:*1 b:^1", "++")],
    )?;
    compare_table(
        "table 3",
        extended[0],
        o2_upper,
        &[
            ("a:*2", "--"),
            ("b:^2", "--"),
            ("b:^1 _", "--"),
            ("a:*1 a:*1", "++"),
            ("a:*1 b:^1", "++"),
            ("a:*1 a:*2", "-+"),
            ("a:*1 b:^2", "--"),
        ],
    )?;
    compare_table(
        "table 4",
        closed[2],
        &[
            ("-", "+-"),
            ("b:^1", "--"),
            ("a:*1", "++"),
            ("a:*1 a:*2", "-+"),
        ],
        &[
            ("a:*2", "--"),
            ("b:^2", "--"),
            ("b:^1 _", "--"),
            ("a:*1 a:*1", "++"),
            ("a:*1 b:^1", "++"),
            ("a:*1 b:^2", "--"),
            ("a:*1 a:*2 a:*1", "--"),
            ("a:*1 a:*2 b:^1", "++"),
            ("a:*1 a:*2 a:*2", "-+"),
            ("a:*1 a:*2 b:^2", "-+"),
        ],
    )?;
    compare_table(
        "table 5",
        closed[3],
        &[
            ("-", "+--"),
            ("b:^1", "---"),
            ("a:*1", "++-"),
            ("a:*1 a:*2", "-+-"),
            ("a:*1 a:*2 b:^1", "+++"),
        ],
        &[
            ("a:*2", "---"),
            ("b:^2", "---"),
            ("b:^1 _", "---"),
            ("a:*1 a:*1", "++-"),
            ("a:*1 b:^1", "++-"),
            ("a:*1 b:^2", "---"),
            ("a:*1 a:*2 a:*1", "---"),
            ("a:*1 a:*2 a:*2", "-+-"),
            ("a:*1 a:*2 b:^2", "-+-"),
            ("a:*1 a:*2 b:^1 a:*1", "+++"),
            ("a:*1 a:*2 b:^1 b:^1", "+++"),
            ("a:*1 a:*2 b:^1 a:*2", "-+-"),
            ("a:*1 a:*2 b:^1 b:^2", "+++"),
        ],
    )?;
    let columns: Vec<String> = out.table.columns.iter().map(|v| v.to_string()).collect();
    ensure!(columns == ["-", "b:^1", "b:^2"], "columns {columns:?}");

    let labels = [Label::new("a"), Label::new("b")];
    let c = to_session_automaton(
        &two_sessions_canonical(),
        "two_sessions_canonical",
        labels,
        2,
    );
    let diff = equivalent(&out.hypothesis, &c).map_err(|e| e.to_string())?;
    ensure!(
        diff.is_none(),
        "final hypothesis differs from the expected canonical form on {}",
        diff.unwrap()
    );
    ensure!(
        out.stats.equivalence_queries == 4,
        "{} equivalence queries",
        out.stats.equivalence_queries
    );
    Ok("all five tables match; final hypothesis equals the canonical form".into())
}

fn random_sigma(rng: &mut ChaCha8Rng) -> Vec<Label> {
    if rng.gen_bool(0.5) {
        labels(&["a"])
    } else {
        labels(&["a", "b"])
    }
}

fn criterion_7() -> Check {
    const PAIRS: usize = 200;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    // one representative per permutation class of the words in scope
    let mut classes: HashMap<usize, Vec<DataWord>> = HashMap::new();
    let mut words_in_scope = 0usize;
    for sigma in [labels(&["a"]), labels(&["a", "b"])] {
        let words = all_words(&sigma, 5, 5);
        words_in_scope += words.len();
        let mut reps: BTreeMap<Vec<(Label, u64)>, DataWord> = BTreeMap::new();
        for w in words {
            reps.entry(permutation_key(&w)).or_insert(w);
        }
        classes.insert(sigma.len(), reps.into_values().collect());
    }
    let mut checks = 0usize;
    let (mut nonempty_pairs, mut differing_pairs) = (0, 0);
    for i in 0..PAIRS {
        let sigma = random_sigma(&mut rng);
        let words = &classes[&sigma.len()];
        let ka = rng.gen_range(1..=2);
        let kb = rng.gen_range(1..=2);
        let a = random_session_automaton(&mut rng, 4, ka, &sigma, 0.3);
        let b = random_session_automaton(&mut rng, 4, kb, &sigma, 0.3);
        let err = |op: &str, e: session_automata::Error| format!("pair {i}: {op}: {e}");
        let u = union(&a, &b).map_err(|e| err("union", e))?;
        let n = intersect(&a, &b).map_err(|e| err("intersect", e))?;
        let c = complement_bounded(&a).map_err(|e| err("complement", e))?;
        let inc = includes(&a, &b).map_err(|e| err("includes", e))?;
        let eq = equivalent(&a, &b).map_err(|e| err("equivalent", e))?;
        let emp = is_empty(&a).map_err(|e| err("is_empty", e))?;

        let (mut sa, mut sb) = (Semantics::new(&a), Semantics::new(&b));
        let (mut su, mut sn, mut sc) = (Semantics::new(&u), Semantics::new(&n), Semantics::new(&c));
        let mut a_not_b = false;
        let mut differ = false;
        let mut nonempty = false;
        for w in words {
            let (x, y) = (sa.contains(w), sb.contains(w));
            ensure!(su.contains(w) == (x || y), "pair {i}: union wrong on {w}");
            ensure!(
                sn.contains(w) == (x && y),
                "pair {i}: intersect wrong on {w}"
            );
            let bounded = oracle_bound(w) <= a.registers as usize;
            ensure!(
                sc.contains(w) == (bounded && !x),
                "pair {i}: complement wrong on {w}"
            );
            a_not_b |= x && !y;
            differ |= x != y;
            nonempty |= x;
            checks += 5;
        }
        nonempty_pairs += usize::from(nonempty);
        differing_pairs += usize::from(differ);
        match &inc {
            None => ensure!(
                !a_not_b,
                "pair {i}: includes says yes, brute force disagrees"
            ),
            Some(w) => ensure!(
                a.simulate(w).unwrap() && !b.simulate(w).unwrap(),
                "pair {i}: bad inclusion witness {w}"
            ),
        }
        match &eq {
            None => ensure!(
                !differ,
                "pair {i}: equivalent says yes, brute force disagrees"
            ),
            Some(w) => ensure!(
                a.simulate(w).unwrap() != b.simulate(w).unwrap(),
                "pair {i}: bad equivalence witness {w}"
            ),
        }
        match &emp {
            None => ensure!(
                !nonempty,
                "pair {i}: is_empty says yes, brute force disagrees"
            ),
            Some(w) => ensure!(
                a.simulate(w).unwrap(),
                "pair {i}: bad emptiness witness {w}"
            ),
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed <= Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!(
        "{PAIRS} pairs ({nonempty_pairs} with L(A) nonempty, {differing_pairs} with L(A) != L(B) on short words), \
         {words_in_scope} words in scope ({} permutation classes), {checks} pointwise checks, 0 mismatches, {:.1}s",
        classes.values().map(Vec::len).sum::<usize>(),
        elapsed.as_secs_f64()
    ))
}

fn criterion_8() -> Check {
    const WORDS: usize = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let sigma = labels(&["a", "b", "c"]);
    for _ in 0..WORDS {
        let k = rng.gen_range(1..=3);
        let w = random_bounded_word(&mut rng, &sigma, k, 8);
        let u = w.snf();
        ensure!(
            u == oracle_snf(&w),
            "snf({w}) = {u}, oracle {}",
            oracle_snf(&w)
        );
        ensure!(oracle_concretizes(&u, &w), "{w} not in γ({u})");
        ensure!(
            w.bound() == u.max_register() as usize,
            "bound({w}) = {} but snf uses {}",
            w.bound(),
            u.max_register()
        );
        ensure!(
            w.bound() == oracle_bound(&w),
            "bound({w}) disagrees with oracle"
        );
        let back = u.concretize().map_err(|e| e.to_string())?.snf();
        ensure!(back == u, "snf(concretize({u})) = {back}");
    }
    Ok(format!("{WORDS} words, 0 failures"))
}

fn criterion_9() -> Check {
    const TARGETS: usize = 60;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst_ratio: f64 = 0.0;
    for i in 0..TARGETS {
        let sigma = random_sigma(&mut rng);
        let k = rng.gen_range(1..=2);
        let target = random_session_automaton(&mut rng, 4, k, &sigma, 0.3);
        let can = canonicalize(&target).map_err(|e| e.to_string())?;
        let mut teacher = ReferenceTeacher::new(&target).map_err(|e| e.to_string())?;
        let labels: BTreeSet<Label> = sigma.iter().cloned().collect();
        let options = LearnOptions {
            max_queries: Some(1_000_000),
            trace_membership: false,
        };
        let out = learn(&mut teacher, &labels, options).map_err(|e| format!("target {i}: {e}"))?;
        let diff = equivalent(&out.hypothesis, &target).map_err(|e| e.to_string())?;
        ensure!(
            diff.is_none(),
            "target {i}: hypothesis differs on {}",
            diff.unwrap()
        );

        let completed = can.completed().num_states();
        ensure!(
            out.stats.rounds() <= completed,
            "target {i}: {} equivalence rounds > {completed} states",
            out.stats.rounds()
        );
        let n = can.num_states() as f64;
        let kk = can.registers().max(1) as f64;
        let m = out.stats.longest_counterexample.max(1) as f64;
        let bound = 10.0 * (kk * sigma.len() as f64 * n * n + n * m.log2());
        let mq = out.stats.membership_queries as f64;
        ensure!(mq <= bound, "target {i}: {mq} membership queries > {bound}");
        worst_ratio = worst_ratio.max(mq / bound);
    }
    Ok(format!(
        "{TARGETS} targets learned; largest membership/bound ratio {worst_ratio:.2}"
    ))
}

/// Copies `s` into a new state and sends some of its incoming edges there.
fn duplicate_state(rng: &mut ChaCha8Rng, a: &Automaton) -> Automaton {
    let mut b = a.clone();
    let s = a.states[rng.gen_range(0..a.states.len())].clone();
    let copy = b.add_state(&format!("{s}_copy"));
    if a.finals.contains(&s) {
        b.finals.insert(copy.clone());
    }
    let mut transitions = BTreeSet::new();
    for t in &a.transitions {
        let source = t.source.clone();
        let target = if t.target == s && rng.gen_bool(0.5) {
            copy.clone()
        } else {
            t.target.clone()
        };
        transitions.insert(Transition {
            source: source.clone(),
            label: t.label.clone(),
            target,
        });
        if source == s {
            transitions.insert(Transition {
                source: copy.clone(),
                label: t.label.clone(),
                target: t.target.clone(),
            });
        }
    }
    b.transitions = transitions;
    b
}

/// Adds a state that cannot reach a final state and one that cannot be
/// reached.
fn inject_dead_states(rng: &mut ChaCha8Rng, a: &Automaton, sigma: &[Label]) -> Automaton {
    let mut b = a.clone();
    let sink = b.add_state("dead_sink");
    let orphan = b.add_state("dead_orphan");
    b.finals.insert(orphan.clone());
    let some_state = |rng: &mut ChaCha8Rng| a.states[rng.gen_range(0..a.states.len())].clone();
    for l in sigma {
        let fresh = TransitionLabel::new(l.clone(), session_automata::RegisterOp::fresh(1));
        let from = some_state(rng);
        b.transitions.insert(Transition {
            source: from,
            label: fresh.clone(),
            target: sink.clone(),
        });
        b.transitions.insert(Transition {
            source: sink.clone(),
            label: fresh.clone(),
            target: sink.clone(),
        });
        let to = some_state(rng);
        b.transitions.insert(Transition {
            source: orphan.clone(),
            label: fresh,
            target: to,
        });
    }
    b
}

fn criterion_10() -> Check {
    const PAIRS: usize = 60;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for i in 0..PAIRS {
        let sigma = random_sigma(&mut rng);
        let k = rng.gen_range(1..=2);
        let a = random_session_automaton(&mut rng, 4, k, &sigma, 0.3);
        let mut b = duplicate_state(&mut rng, &a);
        if i % 2 == 0 {
            b = inject_dead_states(&mut rng, &b, &sigma);
        }
        ensure!(a != b, "pair {i}: automata are identical");
        let eq = equivalent(&a, &b).map_err(|e| e.to_string())?;
        ensure!(
            eq.is_none(),
            "pair {i}: construction changed the language ({})",
            eq.unwrap()
        );
        let (ca, cb) = (canonicalize(&a).unwrap(), canonicalize(&b).unwrap());
        ensure!(ca.is_isomorphic(&cb), "pair {i}: canonical forms differ");
    }
    Ok(format!(
        "{PAIRS} language-equal pairs, canonical forms trim-isomorphic"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("snf golden word", criterion_1),
        ("boundedness of the four-session word", criterion_2),
        ("membership fixtures", criterion_3),
        ("NF_2 automaton", criterion_4),
        (
            "canonicalization of the two-register automaton",
            criterion_5,
        ),
        ("learning golden trace", criterion_6),
        ("boolean operations against brute force", criterion_7),
        ("snf round trips", criterion_8),
        ("learner convergence and query bounds", criterion_9),
        ("canonicity", criterion_10),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(note) => println!("criterion {:>2}: PASS  {name}: {note} [{secs:.2}s]", i + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {:>2}: FAIL  {name}: {why} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
