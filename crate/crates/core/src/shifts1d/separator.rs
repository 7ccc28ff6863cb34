use crate::tm::{run_tm, Action, Move, Outcome, TMachine};

/// Two sets enumerated in stages: everything listed with budget `b` is also
/// listed with any larger budget.
pub trait EnumerablePair {
    fn enumerate(&self, budget: u64) -> (Vec<u64>, Vec<u64>);
}

/// Finite table of `(stage, element)` entries.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ToyPair {
    pub s1: Vec<(u64, u64)>,
    pub s2: Vec<(u64, u64)>,
}

impl EnumerablePair for ToyPair {
    fn enumerate(&self, budget: u64) -> (Vec<u64>, Vec<u64>) {
        let take = |s: &[(u64, u64)]| s.iter().filter(|(t, _)| *t < budget).map(|&(_, e)| e).collect();
        (take(&self.s1), take(&self.s2))
    }
}

/// `S₁ = {e : M_e(e) outputs 1}`, `S₂ = {e : M_e(e) outputs 0}`, with budget `b`
/// running machines `0 .. b` for `b` steps each. Machine `e` has states
/// {start, work, accept}, symbols {blank, 0, 1}; its six transitions, symbols
/// in decreasing order, are the base-28 digits of `e` (27 actions plus "undefined"). The output is the symbol
/// under the head on acceptance.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DiagonalPair;

impl DiagonalPair {
    pub fn machine(e: u64) -> TMachine {
        let mut rest = e;
        let mut delta = Vec::new();
        for q in 0..2u32 {
            for a in (0..3u32).rev() {
                let d = (rest % 28) as u32;
                rest /= 28;
                if d < 27 {
                    let mv = [Move::L, Move::R, Move::S][(d / 9) as usize];
                    delta.push(((q, a, 0), Action { state: d % 3, write: (d / 3) % 3, mv }));
                }
            }
        }
        // the accept state has no outgoing transitions by construction
        TMachine::new(format!("diag{e}"), 3, 3, false, 0, 2, &delta).expect("well-formed by construction")
    }

    fn output(e: u64, steps: usize) -> Option<u8> {
        let input: Vec<u32> = if e == 0 { vec![1] } else { (0..64 - e.leading_zeros()).rev().map(|i| 1 + ((e >> i) & 1) as u32).collect() };
        let t = run_tm(&Self::machine(e), &input, None, steps, input.len() + steps + 1).ok()?;
        if t.outcome != Outcome::Accept {
            return None;
        }
        let last = t.configs.last()?;
        match last.tape[last.head] {
            1 => Some(0),
            2 => Some(1),
            _ => None,
        }
    }
}

impl EnumerablePair for DiagonalPair {
    fn enumerate(&self, budget: u64) -> (Vec<u64>, Vec<u64>) {
        let (mut s1, mut s2) = (Vec::new(), Vec::new());
        for e in 0..budget {
            match Self::output(e, budget as usize) {
                Some(1) => s1.push(e),
                Some(_) => s2.push(e),
                None => {}
            }
        }
        (s1, s2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeparatorResult {
    Ok,
    /// Least index where the prefix fails to separate.
    Violated(u64),
}

/// Whether `prefix` has 1 on every enumerated element of `S₁` and 0 on every
/// element of `S₂` that it covers.
pub fn separator_check(prefix: &[u8], pair: &dyn EnumerablePair, budget: u64) -> SeparatorResult {
    let (s1, s2) = pair.enumerate(budget);
    let bad1 = s1.into_iter().filter(|&e| prefix.get(e as usize).map_or(false, |&b| b != 1));
    let bad2 = s2.into_iter().filter(|&e| prefix.get(e as usize).map_or(false, |&b| b != 0));
    bad1.chain(bad2).min().map_or(SeparatorResult::Ok, SeparatorResult::Violated)
}
