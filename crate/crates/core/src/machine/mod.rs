//! One-tape Turing machines on a half-infinite tape, their local update
//! rule, the pruning loop and the superimposition of runs on boards.

mod board;
mod prune;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, Symbol};
use crate::error::{Error, Result};

pub use board::{
    board_superimpose, corrupt_one_cell, verify_superimposed, violation, Layer, Superimposed,
    Superimposition,
};
pub use prune::{
    delta_gap, levels_read, prune_run, prune_run_with, IterTrace, PruneOutcome, PruneTable,
    PruneVerdict, RSeq,
};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    L,
    R,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Action {
    pub write: Symbol,
    pub mv: Move,
    pub next: usize,
}

/// Data symbol of a tape cell plus the machine state if the head is there.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct CellConfig {
    pub data: Symbol,
    pub state: Option<usize>,
}

impl CellConfig {
    pub fn data(data: Symbol) -> Self {
        CellConfig { data, state: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TuringMachine {
    states: Vec<String>,
    tape: Arc<Alphabet>,
    initial: usize,
    halting: Vec<bool>,
    /// Indexed by `state * |tape| + read`.
    rules: Vec<Option<Action>>,
}

/// `[state, read, write, "L"|"R", next]`.
type RuleRow = (String, String, String, Move, String);

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MachineDef {
    states: Vec<String>,
    tape: Vec<String>,
    initial: String,
    halting: Vec<String>,
    rules: Vec<RuleRow>,
}

impl TuringMachine {
    /// `rules` lists `(state, read, write, move, next)` by name. Every
    /// non-halting state needs a rule for every tape symbol.
    pub fn new(
        states: Vec<String>,
        tape: Vec<String>,
        initial: &str,
        halting: &[&str],
        rules: &[(&str, &str, &str, Move, &str)],
    ) -> Result<Self> {
        let names = Alphabet::new(states.iter().cloned())
            .map_err(|e| Error::InvalidDefinition(format!("states: {e}")))?;
        let tape = Arc::new(Alphabet::new(tape)?);
        for need in ["0", "1"] {
            if tape.symbol(need).is_err() {
                return Err(Error::InvalidDefinition(format!(
                    "tape alphabet must contain `{need}`"
                )));
            }
        }
        let state = |s: &str| -> Result<usize> {
            names
                .symbol(s)
                .map(Symbol::index)
                .map_err(|_| Error::InvalidDefinition(format!("unknown state `{s}`")))
        };
        let initial = state(initial)?;
        let mut halt = vec![false; states.len()];
        for h in halting {
            halt[state(h)?] = true;
        }
        let k = tape.len();
        let mut table = vec![None; states.len() * k];
        for &(q, read, write, mv, next) in rules {
            let q = state(q)?;
            if halt[q] {
                return Err(Error::InvalidDefinition(format!(
                    "halting state `{}` has a rule",
                    states[q]
                )));
            }
            let r = tape.symbol(read)?;
            let slot = &mut table[q * k + r.index()];
            if slot.is_some() {
                return Err(Error::InvalidDefinition(format!(
                    "two rules for state `{}` reading `{read}`",
                    states[q]
                )));
            }
            *slot = Some(Action {
                write: tape.symbol(write)?,
                mv,
                next: state(next)?,
            });
        }
        for (q, name) in states.iter().enumerate() {
            if halt[q] {
                continue;
            }
            for r in tape.symbols() {
                if table[q * k + r.index()].is_none() {
                    return Err(Error::InvalidDefinition(format!(
                        "state `{name}` has no rule for `{}`",
                        tape.name(r)
                    )));
                }
            }
        }
        Ok(TuringMachine {
            states,
            tape,
            initial,
            halting: halt,
            rules: table,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let def: MachineDef = serde_json::from_str(text)?;
        let halting: Vec<&str> = def.halting.iter().map(String::as_str).collect();
        let rules: Vec<(&str, &str, &str, Move, &str)> = def
            .rules
            .iter()
            .map(|(a, b, c, m, d)| (a.as_str(), b.as_str(), c.as_str(), *m, d.as_str()))
            .collect();
        TuringMachine::new(def.states, def.tape, &def.initial, &halting, &rules)
    }

    pub fn to_json(&self) -> String {
        let k = self.tape.len();
        let mut rules = Vec::new();
        for (i, a) in self.rules.iter().enumerate() {
            if let Some(a) = a {
                rules.push((
                    self.states[i / k].clone(),
                    self.tape.name(Symbol((i % k) as u32)).to_string(),
                    self.tape.name(a.write).to_string(),
                    a.mv,
                    self.states[a.next].clone(),
                ));
            }
        }
        let def = MachineDef {
            states: self.states.clone(),
            tape: self.tape.names().to_vec(),
            initial: self.states[self.initial].clone(),
            halting: (0..self.states.len())
                .filter(|&q| self.halting[q])
                .map(|q| self.states[q].clone())
                .collect(),
            rules,
        };
        serde_json::to_string_pretty(&def).expect("plain data serializes")
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn tape(&self) -> &Arc<Alphabet> {
        &self.tape
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_halting(&self, q: usize) -> bool {
        self.halting[q]
    }

    pub fn action(&self, q: usize, read: Symbol) -> Option<Action> {
        self.rules[q * self.tape.len() + read.index()]
    }

    /// Tape symbol for an input bit.
    pub fn bit_symbol(&self, b: bool) -> Symbol {
        self.tape.symbol(if b { "1" } else { "0" }).expect("checked at construction")
    }
}

/// Tape contents, head position and state at one time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    /// Cells `0..tape.len()`; later cells still hold their input.
    pub tape: Vec<Symbol>,
    pub head: usize,
    pub state: usize,
}

impl Config {
    /// The first `width` cells as cell configurations.
    pub fn cells(&self, width: usize, input: &dyn Fn(usize) -> Symbol) -> Vec<CellConfig> {
        (0..width)
            .map(|i| CellConfig {
                data: self.tape.get(i).copied().unwrap_or_else(|| input(i)),
                state: (i == self.head).then_some(self.state),
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunOutcome {
    /// Halted at this time step (entering a halting state or moving off
    /// the left end).
    Halted(u64),
    Running,
}

#[derive(Clone, Debug)]
pub struct Run {
    pub outcome: RunOutcome,
    /// Configurations at times `0..`, when recorded. A halt by moving off
    /// the tape records no final configuration.
    pub history: Vec<Config>,
}

/// Runs for at most `steps` steps on input `input(i)` at cell `i`.
pub fn run_bounded(
    m: &TuringMachine,
    input: &dyn Fn(usize) -> bool,
    steps: u64,
    record: bool,
) -> Run {
    let sym = |i: usize| m.bit_symbol(input(i));
    let mut c = Config {
        tape: Vec::new(),
        head: 0,
        state: m.initial,
    };
    let mut history = Vec::new();
    if record {
        history.push(c.clone());
    }
    if m.is_halting(c.state) {
        return Run {
            outcome: RunOutcome::Halted(0),
            history,
        };
    }
    for t in 1..=steps {
        while c.tape.len() <= c.head {
            let i = c.tape.len();
            c.tape.push(sym(i));
        }
        let a = m.action(c.state, c.tape[c.head]).expect("total on running states");
        c.tape[c.head] = a.write;
        match a.mv {
            Move::L if c.head == 0 => {
                return Run {
                    outcome: RunOutcome::Halted(t),
                    history,
                }
            }
            Move::L => c.head -= 1,
            Move::R => c.head += 1,
        }
        c.state = a.next;
        if record {
            history.push(c.clone());
        }
        if m.is_halting(c.state) {
            return Run {
                outcome: RunOutcome::Halted(t),
                history,
            };
        }
    }
    Run {
        outcome: RunOutcome::Running,
        history,
    }
}

/// Next configuration of cell `v` given its neighbours; `None` stands for
/// the missing left neighbour of cell 0 or a neighbour outside the window.
pub fn local_transition(
    m: &TuringMachine,
    u: Option<CellConfig>,
    v: CellConfig,
    w: Option<CellConfig>,
) -> Result<CellConfig> {
    let carried = [u, Some(v), w].iter().flatten().filter(|c| c.state.is_some()).count();
    if carried > 1 {
        return Err(Error::Precondition("more than one cell carries a state".into()));
    }
    if let Some(q) = v.state {
        if m.is_halting(q) {
            return Err(Error::Precondition("the machine has halted".into()));
        }
        let a = m.action(q, v.data).expect("total on running states");
        return Ok(CellConfig::data(a.write));
    }
    if let Some(CellConfig { data, state: Some(q) }) = u {
        if !m.is_halting(q) {
            let a = m.action(q, data).expect("total on running states");
            if a.mv == Move::R {
                return Ok(CellConfig {
                    data: v.data,
                    state: Some(a.next),
                });
            }
        }
    }
    if let Some(CellConfig { data, state: Some(q) }) = w {
        if !m.is_halting(q) {
            let a = m.action(q, data).expect("total on running states");
            if a.mv == Move::L {
                return Ok(CellConfig {
                    data: v.data,
                    state: Some(a.next),
                });
            }
        }
    }
    Ok(v)
}

/// Applies [`local_transition`] across a row of cells `0..row.len()`.
pub fn step_row(m: &TuringMachine, row: &[CellConfig]) -> Result<Vec<CellConfig>> {
    (0..row.len())
        .map(|i| {
            let u = i.checked_sub(1).map(|j| row[j]);
            local_transition(m, u, row[i], row.get(i + 1).copied())
        })
        .collect()
}

/// Small machines used in tests, examples and benchmarks.
pub mod samples {
    use super::*;

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    /// Halts at once.
    pub fn halt_now() -> TuringMachine {
        TuringMachine::new(strings(&["h"]), strings(&["0", "1"]), "h", &["h"], &[]).unwrap()
    }

    /// Moves right until it reads a 1, then halts.
    pub fn right_scanner() -> TuringMachine {
        TuringMachine::new(
            strings(&["s", "h"]),
            strings(&["0", "1"]),
            "s",
            &["h"],
            &[("s", "0", "0", Move::R, "s"), ("s", "1", "1", Move::R, "h")],
        )
        .unwrap()
    }

    /// Stays in one state forever, rewriting what it reads and moving right.
    pub fn walker() -> TuringMachine {
        TuringMachine::new(
            strings(&["w"]),
            strings(&["0", "1"]),
            "w",
            &[],
            &[("w", "0", "0", Move::R, "w"), ("w", "1", "1", Move::R, "w")],
        )
        .unwrap()
    }

    /// Bounces between cell 0 and cell 1, flipping bits; never halts.
    pub fn bouncer() -> TuringMachine {
        TuringMachine::new(
            strings(&["a", "b"]),
            strings(&["0", "1"]),
            "a",
            &[],
            &[
                ("a", "0", "1", Move::R, "b"),
                ("a", "1", "0", Move::R, "b"),
                ("b", "0", "1", Move::L, "a"),
                ("b", "1", "0", Move::L, "a"),
            ],
        )
        .unwrap()
    }

    /// Walks right over 1s and turns back at the first 0; falls off the
    /// left end on the way back.
    pub fn returner() -> TuringMachine {
        TuringMachine::new(
            strings(&["out", "back"]),
            strings(&["0", "1"]),
            "out",
            &[],
            &[
                ("out", "1", "1", Move::R, "out"),
                ("out", "0", "0", Move::L, "back"),
                ("back", "0", "0", Move::L, "back"),
                ("back", "1", "1", Move::L, "back"),
            ],
        )
        .unwrap()
    }

    /// Counts input 1s with a scratch mark and halts on the third one.
    pub fn third_one() -> TuringMachine {
        TuringMachine::new(
            strings(&["c0", "c1", "c2", "h"]),
            strings(&["0", "1", "x"]),
            "c0",
            &["h"],
            &[
                ("c0", "0", "0", Move::R, "c0"),
                ("c0", "1", "x", Move::R, "c1"),
                ("c0", "x", "x", Move::R, "c0"),
                ("c1", "0", "0", Move::R, "c1"),
                ("c1", "1", "x", Move::R, "c2"),
                ("c1", "x", "x", Move::R, "c1"),
                ("c2", "0", "0", Move::R, "c2"),
                ("c2", "1", "x", Move::R, "h"),
                ("c2", "x", "x", Move::R, "c2"),
            ],
        )
        .unwrap()
    }

    pub fn corpus() -> Vec<(&'static str, TuringMachine)> {
        vec![
            ("halt-now", halt_now()),
            ("right-scanner", right_scanner()),
            ("walker", walker()),
            ("bouncer", bouncer()),
            ("returner", returner()),
            ("third-one", third_one()),
        ]
    }

    pub fn by_name(name: &str) -> Result<TuringMachine> {
        corpus()
            .into_iter()
            .find(|(n, _)| *n == name)
            .map(|(_, m)| m)
            .ok_or_else(|| Error::InvalidDefinition(format!("unknown builtin machine `{name}`")))
    }
}

/// Fixed-width snapshot used by row-equivalence checks.
pub fn config_row(c: &Config, width: usize, m: &TuringMachine, input: &dyn Fn(usize) -> bool) -> Vec<CellConfig> {
    c.cells(width, &|i| m.bit_symbol(input(i)))
}

#[cfg(test)]
mod tests {
    use super::samples::*;
    use super::*;
    use proptest::prelude::*;

    fn bits(v: &[u8]) -> impl Fn(usize) -> bool + '_ {
        move |i| v.get(i).is_some_and(|b| *b == 1)
    }

    #[test]
    fn bounded_runs() {
        assert_eq!(run_bounded(&halt_now(), &|_| false, 10, false).outcome, RunOutcome::Halted(0));
        let r = run_bounded(&right_scanner(), &bits(&[0, 0, 1]), 10, true);
        assert_eq!(r.outcome, RunOutcome::Halted(3));
        assert_eq!(r.history.len(), 4);
        assert_eq!(run_bounded(&right_scanner(), &|_| false, 100, false).outcome, RunOutcome::Running);
        assert_eq!(run_bounded(&returner(), &bits(&[1, 1]), 100, false).outcome, RunOutcome::Halted(5));
        assert_eq!(run_bounded(&third_one(), &bits(&[1, 0, 1, 1]), 100, false).outcome, RunOutcome::Halted(4));
    }

    #[test]
    fn local_rule_examples() {
        let m = right_scanner();
        let (z, o) = (m.bit_symbol(false), m.bit_symbol(true));
        let plain = CellConfig::data(z);
        assert_eq!(local_transition(&m, Some(plain), plain, None).unwrap(), plain);
        let head = CellConfig { data: z, state: Some(0) };
        assert_eq!(local_transition(&m, None, head, Some(plain)).unwrap(), plain);
        assert_eq!(
            local_transition(&m, Some(head), CellConfig::data(o), None).unwrap(),
            CellConfig { data: o, state: Some(0) }
        );
        assert!(local_transition(&m, Some(head), head, None).is_err());
        let b = bouncer();
        let at1 = CellConfig { data: z, state: Some(1) };
        assert_eq!(
            local_transition(&b, None, plain, Some(at1)).unwrap(),
            CellConfig { data: z, state: Some(0) }
        );
    }

    #[test]
    fn json_round_trip() {
        for (_, m) in corpus() {
            assert_eq!(TuringMachine::from_json(&m.to_json()).unwrap(), m);
        }
        let partial = r#"{"states":["a"],"tape":["0","1"],"initial":"a","halting":[],
            "rules":[["a","0","0","R","a"]]}"#;
        assert!(TuringMachine::from_json(partial).is_err());
        let no_one = r#"{"states":["a"],"tape":["0"],"initial":"a","halting":["a"],"rules":[]}"#;
        assert!(TuringMachine::from_json(no_one).is_err());
    }

    fn random_machine(seed: &[u8], n_states: usize) -> TuringMachine {
        let states: Vec<String> = (0..n_states).map(|i| format!("q{i}")).collect();
        let halt = format!("q{}", n_states - 1);
        let mut rules = Vec::new();
        let mut it = seed.iter().cycle();
        for q in 0..n_states - 1 {
            for r in ["0", "1"] {
                let x = *it.next().unwrap() as usize;
                rules.push((
                    states[q].clone(),
                    r.to_string(),
                    if x & 1 == 1 { "1" } else { "0" }.to_string(),
                    if x & 2 == 2 { Move::L } else { Move::R },
                    states[(x >> 2) % n_states].clone(),
                ));
            }
        }
        let rules: Vec<(&str, &str, &str, Move, &str)> = rules
            .iter()
            .map(|(a, b, c, m, d)| (a.as_str(), b.as_str(), c.as_str(), *m, d.as_str()))
            .collect();
        TuringMachine::new(states.clone(), vec!["0".into(), "1".into()], "q0", &[&halt], &rules).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn row_composition_matches_simulation(
            seed in proptest::collection::vec(any::<u8>(), 8),
            n_states in 2usize..5,
            input in proptest::collection::vec(any::<bool>(), 12),
            steps in 0u64..12,
        ) {
            let m = random_machine(&seed, n_states);
            let inp = |i: usize| input.get(i).copied().unwrap_or(false);
            let run = run_bounded(&m, &inp, steps + 1, true);
            let width = 16;
            for pair in run.history.windows(2) {
                let a = config_row(&pair[0], width, &m, &inp);
                let b = config_row(&pair[1], width, &m, &inp);
                prop_assert_eq!(step_row(&m, &a).unwrap(), b);
            }
        }
    }
}
