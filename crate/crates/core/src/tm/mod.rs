//! Single-tape Turing machines with an optional read-only layer, a direct
//! simulator, and the encoding of space-time diagrams as Wang tiles.

pub mod corpus;
mod determinacy;
mod diagram;

pub use determinacy::{check_determinacy, DeterminacyReport, Sampling};
pub use diagram::{diagram_kinds, diagram_tiles, Cell, DiagramKind, DiagramTile, DiagramTiles, Signal};

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{input, Error, Result};

pub const BLANK: u32 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Move {
    L,
    R,
    S,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Action {
    pub state: u32,
    pub write: u32,
    pub mv: Move,
}

/// Transition key: (state, symbol, read-only bit). The bit is always 0 for machines
/// without a read-only layer.
pub type Key = (u32, u32, u8);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TMachine {
    pub name: String,
    pub states: u32,
    pub symbols: u32,
    pub uses_ro: bool,
    pub start: u32,
    pub accept: u32,
    pub delta: BTreeMap<Key, Action>,
}

impl TMachine {
    /// Checks ranges, determinism (by construction of the map) and that the accept
    /// state is final.
    pub fn new(
        name: impl Into<String>,
        states: u32,
        symbols: u32,
        uses_ro: bool,
        start: u32,
        accept: u32,
        transitions: &[(Key, Action)],
    ) -> Result<TMachine> {
        let mut delta = BTreeMap::new();
        for &(k, a) in transitions {
            if delta.insert(k, a).is_some() {
                return Err(Error::Validation(format!("two transitions for {k:?}")));
            }
        }
        let m = TMachine { name: name.into(), states, symbols, uses_ro, start, accept, delta };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        if self.states == 0 || self.symbols == 0 {
            return Err(Error::Validation("a machine needs a state and a symbol".into()));
        }
        if self.start >= self.states || self.accept >= self.states {
            return Err(Error::Validation("start or accept state out of range".into()));
        }
        for (&(q, a, r), act) in &self.delta {
            if q >= self.states || act.state >= self.states || a >= self.symbols || act.write >= self.symbols {
                return Err(Error::Validation(format!("transition {q} {a} out of range")));
            }
            if r > 1 || (!self.uses_ro && r != 0) {
                return Err(Error::Validation(format!("transition {q} {a} has read-only bit {r}")));
            }
            if q == self.accept {
                return Err(Error::Validation("the accept state must not have outgoing transitions".into()));
            }
        }
        Ok(())
    }

    pub fn step(&self, state: u32, sym: u32, ro: u8) -> Option<Action> {
        self.delta.get(&(state, sym, if self.uses_ro { ro } else { 0 })).copied()
    }

    pub fn parse(text: &str) -> Result<TMachine> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .enumerate()
            .filter(|(_, l)| !l.is_empty());
        let (_, header) = lines.next().ok_or_else(|| Error::Input("empty machine file".into()))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if !(h.len() == 4 || h.len() == 5) || h[0] != "tm" || (h.len() == 5 && h[4] != "ro") {
            return input(format!("bad header {header:?}, expected `tm <name> <nstates> <nsymbols> [ro]`"));
        }
        let num = |s: &str| s.parse::<u32>().map_err(|_| Error::Input(format!("bad number {s:?}")));
        let (states, symbols) = (num(h[2])?, num(h[3])?);
        let uses_ro = h.len() == 5;
        let (mut start, mut accept) = (None, None);
        let mut trans = Vec::new();
        for (no, line) in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::Input(format!("line {}: cannot parse {line:?}", no + 1));
            match f[0] {
                "accept" if f.len() == 2 => accept = Some(num(f[1])?),
                "start" if f.len() == 2 => start = Some(num(f[1])?),
                "t" => {
                    let arrow = f.iter().position(|&x| x == "->").ok_or_else(bad)?;
                    let lhs = &f[1..arrow];
                    let rhs = &f[arrow + 1..];
                    let ro = match (lhs.len(), uses_ro) {
                        (2, false) => 0,
                        (3, true) => num(lhs[2])? as u8,
                        _ => return Err(bad()),
                    };
                    if rhs.len() != 3 {
                        return Err(bad());
                    }
                    let mv = match rhs[2] {
                        "L" => Move::L,
                        "R" => Move::R,
                        "S" => Move::S,
                        _ => return Err(bad()),
                    };
                    trans.push(((num(lhs[0])?, num(lhs[1])?, ro), Action { state: num(rhs[0])?, write: num(rhs[1])?, mv }));
                }
                _ => return Err(bad()),
            }
        }
        let start = start.ok_or_else(|| Error::Input("missing `start` line".into()))?;
        let accept = accept.ok_or_else(|| Error::Input("missing `accept` line".into()))?;
        TMachine::new(h[1], states, symbols, uses_ro, start, accept, &trans)
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for TMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tm {} {} {}", self.name, self.states, self.symbols)?;
        writeln!(f, "{}", if self.uses_ro { " ro" } else { "" })?;
        for (&(q, a, r), act) in &self.delta {
            let ro = if self.uses_ro { format!(" {r}") } else { String::new() };
            writeln!(f, "t {q} {a}{ro} -> {} {} {:?}", act.state, act.write, act.mv)?;
        }
        writeln!(f, "start {}", self.start)?;
        writeln!(f, "accept {}", self.accept)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Config {
    pub tape: Vec<u32>,
    pub head: usize,
    pub state: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Accept,
    Stuck,
    StepLimit,
    SpaceLimit,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Accept => "accept",
            Outcome::Stuck => "reject",
            Outcome::StepLimit => "step-limit",
            Outcome::SpaceLimit => "space-limit",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunTrace {
    pub configs: Vec<Config>,
    pub outcome: Outcome,
}

impl RunTrace {
    pub fn steps(&self) -> usize {
        self.configs.len() - 1
    }
}

/// Runs `m` on a tape of `max_cells` cells holding `input` from cell 0, head on cell 0.
pub fn run_tm(m: &TMachine, input: &[u32], ro: Option<&[u8]>, max_steps: usize, max_cells: usize) -> Result<RunTrace> {
    if max_cells == 0 || input.len() > max_cells {
        return Err(Error::Input(format!("input of length {} does not fit {max_cells} cells", input.len())));
    }
    if let Some(&s) = input.iter().find(|&&s| s >= m.symbols) {
        return Err(Error::Input(format!("input symbol {s} outside the alphabet")));
    }
    let ro_bits: Vec<u8> = match ro {
        Some(r) if r.len() < max_cells => {
            return Err(Error::Input("read-only layer shorter than the tape window".into()));
        }
        Some(r) => r[..max_cells].to_vec(),
        None => vec![0; max_cells],
    };
    let mut tape = input.to_vec();
    tape.resize(max_cells, BLANK);
    let mut cur = Config { tape, head: 0, state: m.start };
    let mut configs = vec![cur.clone()];
    let outcome = loop {
        if cur.state == m.accept {
            break Outcome::Accept;
        }
        if configs.len() > max_steps {
            break Outcome::StepLimit;
        }
        let Some(act) = m.step(cur.state, cur.tape[cur.head], ro_bits[cur.head]) else {
            break Outcome::Stuck;
        };
        cur.tape[cur.head] = act.write;
        cur.state = act.state;
        let next = match act.mv {
            Move::L => cur.head.checked_sub(1),
            Move::R => Some(cur.head + 1).filter(|&h| h < max_cells),
            Move::S => Some(cur.head),
        };
        let Some(h) = next else { break Outcome::SpaceLimit };
        cur.head = h;
        configs.push(cur.clone());
    };
    Ok(RunTrace { configs, outcome })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accept_immediately() {
        let m = corpus::accept_immediately();
        let t = run_tm(&m, &[], None, 10, 4).unwrap();
        assert_eq!((t.outcome, t.steps()), (Outcome::Accept, 0));
    }

    #[test]
    fn scanner_accepts_in_four_steps() {
        // hand-stepped: R, R, R over the three symbols, then blank -> accept
        let m = corpus::scan_to_blank();
        let t = run_tm(&m, &[1, 1, 1], None, 100, 8).unwrap();
        assert_eq!((t.outcome, t.steps()), (Outcome::Accept, 4));
        assert_eq!(t.configs[3].head, 3);
    }

    #[test]
    fn zero_steps_is_step_limit() {
        let m = corpus::scan_to_blank();
        let t = run_tm(&m, &[1], None, 0, 8).unwrap();
        assert_eq!(t.outcome, Outcome::StepLimit);
    }

    #[test]
    fn leaving_the_window_is_space_limit() {
        let m = corpus::scan_to_blank();
        let t = run_tm(&m, &[1, 1], None, 100, 2).unwrap();
        assert_eq!(t.outcome, Outcome::SpaceLimit);
    }

    #[test]
    fn nondeterminism_rejected_at_load() {
        let text = "tm bad 2 2\nt 0 1 -> 0 1 R\nt 0 1 -> 1 1 S\nstart 0\naccept 1\n";
        assert!(matches!(TMachine::parse(text), Err(Error::Validation(_))));
        let text = "tm bad 2 2\nt 1 1 -> 0 1 R\nstart 0\naccept 1\n";
        assert!(matches!(TMachine::parse(text), Err(Error::Validation(_))));
    }

    #[test]
    fn text_round_trip() {
        for m in corpus::all() {
            assert_eq!(TMachine::parse(&m.to_text()).unwrap(), m);
        }
    }

    #[test]
    fn consecutive_configs_differ_by_one_transition() {
        for m in corpus::all() {
            for input in corpus::inputs(&m, 4) {
                let ro: Vec<u8> = (0..8).map(|i| (i % 3 == 0) as u8).collect();
                let t = run_tm(&m, &input, Some(&ro), 12, 8).unwrap();
                for w in t.configs.windows(2) {
                    let (a, b) = (&w[0], &w[1]);
                    let act = m.step(a.state, a.tape[a.head], ro[a.head]).unwrap();
                    assert_eq!(b.state, act.state);
                    assert_eq!(b.tape[a.head], act.write);
                    for i in 0..8 {
                        if i != a.head {
                            assert_eq!(a.tape[i], b.tape[i]);
                        }
                    }
                }
            }
        }
    }
}
