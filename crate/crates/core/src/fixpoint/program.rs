use std::fmt;

use crate::error::{input, Error, Result};
use crate::tm::{Action, Move, TMachine};

/// Tape symbols of the universal checker: blank, data bit 0, data bit 1, end marker.
pub const U_BIT0: u32 = 1;
pub const U_END: u32 = 3;

const SCAN: u32 = 0;
const PAD: u32 = 13;
pub const U_ACCEPT: u32 = 14;

fn after_data(b: u32, eq: u32) -> u32 {
    1 + 2 * b + eq
}

fn after_i1(b: u32, eq: u32, i1: u32) -> u32 {
    5 + 4 * b + 2 * eq + i1
}

/// The checker run in every comp zone. The input row holds, per slot, four
/// columns: the wire bit, two instruction bits (read-only layer) and a pad; then
/// the end marker. The read-only bit under a data cell is the value the slot
/// expects when its instruction is a self-reference.
///
/// Instructions `(i1, i2)`: `00` anything, `10` bit must be 0, `11` bit must be 1,
/// `01` bit must equal the expected bit. A failed check has no transition.
pub fn universal_machine() -> TMachine {
    let mut t = Vec::new();
    let r = |state, write| Action { state, write, mv: Move::R };
    for ro in 0..2u8 {
        for b in 0..2u32 {
            let eq = (b == ro as u32) as u32;
            t.push(((SCAN, U_BIT0 + b, ro), r(after_data(b, eq), U_BIT0 + b)));
        }
        t.push(((SCAN, U_END, ro), Action { state: U_ACCEPT, write: U_END, mv: Move::S }));
        for b in 0..2 {
            for eq in 0..2 {
                t.push(((after_data(b, eq), 0, ro), r(after_i1(b, eq, ro as u32), 0)));
                for i1 in 0..2 {
                    let ok = match (i1, ro) {
                        (0, 0) => true,
                        (1, 0) => b == 0,
                        (1, 1) => b == 1,
                        _ => eq == 1,
                    };
                    if ok {
                        t.push(((after_i1(b, eq, i1), 0, ro), r(PAD, 0)));
                    }
                }
            }
        }
        t.push(((PAD, 0, ro), r(SCAN, 0)));
    }
    TMachine::new("universal", 15, 4, true, SCAN, U_ACCEPT, &t).expect("universal machine is well formed")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Instr {
    Any,
    Zero,
    One,
    /// The bit must equal bit `j` of the program's own text.
    SelfBit(usize),
}

impl Instr {
    fn bits(self) -> (u8, u8) {
        match self {
            Instr::Any => (0, 0),
            Instr::Zero => (1, 0),
            Instr::One => (1, 1),
            Instr::SelfBit(_) => (0, 1),
        }
    }

    /// Whether payload bit `b` passes, given the program text.
    pub fn accepts(self, b: u8, text: &[u8]) -> bool {
        match self {
            Instr::Any => true,
            Instr::Zero => b == 0,
            Instr::One => b == 1,
            Instr::SelfBit(j) => text.get(j).copied().unwrap_or(0) == b,
        }
    }
}

impl fmt::Display for Instr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instr::Any => write!(f, "any"),
            Instr::Zero => write!(f, "zero"),
            Instr::One => write!(f, "one"),
            Instr::SelfBit(j) => write!(f, "self {j}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgramTemplate {
    pub name: String,
    /// One instruction per input-row slot (4k of them, left/bottom/right/top).
    pub instrs: Vec<Instr>,
    pub level: Option<u64>,
    pub payload: Option<String>,
    /// Longest text the target input row can hold.
    pub max_len: usize,
}

impl ProgramTemplate {
    pub fn new(name: impl Into<String>, instrs: Vec<Instr>) -> ProgramTemplate {
        ProgramTemplate { name: name.into(), instrs, level: None, payload: None, max_len: usize::MAX }
    }

    /// Text format: `program <name>`, optional `level <k>`, `payload <id>`, then one
    /// `slot any|zero|one|self <j>` line per slot. `#` starts a comment.
    pub fn parse(text: &str) -> Result<ProgramTemplate> {
        let mut name = None;
        let mut t = ProgramTemplate::new("", Vec::new());
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let w: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::Input(format!("line {}: cannot parse `{line}`", ln + 1));
            match w.as_slice() {
                ["program", n] => name = Some(n.to_string()),
                ["level", k] => t.level = Some(k.parse().map_err(|_| bad())?),
                ["payload", p] => t.payload = Some(p.to_string()),
                ["slot", "any"] => t.instrs.push(Instr::Any),
                ["slot", "zero"] => t.instrs.push(Instr::Zero),
                ["slot", "one"] => t.instrs.push(Instr::One),
                ["slot", "self", j] => t.instrs.push(Instr::SelfBit(j.parse().map_err(|_| bad())?)),
                _ => return Err(bad()),
            }
        }
        match name {
            Some(n) => {
                t.name = n;
                Ok(t)
            }
            None => input("program file lacks a `program <name>` line"),
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("program {}\n", self.name);
        if let Some(k) = self.level {
            s += &format!("level {k}\n");
        }
        if let Some(p) = &self.payload {
            s += &format!("payload {p}\n");
        }
        for i in &self.instrs {
            s += &format!("slot {i}\n");
        }
        s
    }

    pub fn is_self_referential(&self) -> bool {
        self.instrs.iter().any(|i| matches!(i, Instr::SelfBit(_)))
    }
}

/// Program text as hardwired into the read-only layer of the input row, plus the
/// template it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgramBundle {
    pub template: ProgramTemplate,
    pub text: Vec<u8>,
    /// Layout of the text (slots of four, end marker, length, level).
    pub version: u32,
}

const LEVEL_BITS: usize = 16;

fn bitlen(x: usize) -> usize {
    (usize::BITS - x.leading_zeros()) as usize
}

fn header_len(t: &ProgramTemplate, total: usize) -> usize {
    bitlen(total) + if t.level.is_some() { LEVEL_BITS } else { 0 }
}

/// Smallest `L` with `L = base + header(L)`.
fn text_len(t: &ProgramTemplate) -> Result<usize> {
    let base = 4 * t.instrs.len() + 1;
    let mut l = base;
    for _ in 0..64 {
        let next = base + header_len(t, l);
        if next == l {
            if l > t.max_len {
                return Err(Error::Sizing(format!(
                    "program text needs {l} columns but the field holds {}",
                    t.max_len
                )));
            }
            return Ok(l);
        }
        l = next;
    }
    Err(Error::Sizing("program length has no fixed point".into()))
}

fn render(t: &ProgramTemplate, len: usize, expected: &[u8]) -> Vec<u8> {
    let mut text = Vec::with_capacity(len);
    for (s, i) in t.instrs.iter().enumerate() {
        let (i1, i2) = i.bits();
        text.extend_from_slice(&[expected[s], i1, i2, 0]);
    }
    text.push(0);
    let w = bitlen(len);
    text.extend((0..w).rev().map(|b| ((len >> b) & 1) as u8));
    if let Some(k) = t.level {
        text.extend((0..LEVEL_BITS).rev().map(|b| ((k >> b) & 1) as u8));
    }
    text
}

impl ProgramBundle {
    /// A program without self-reference.
    pub fn plain(t: ProgramTemplate) -> Result<ProgramBundle> {
        if t.is_self_referential() {
            return Err(Error::Config("plain programs cannot contain self instructions".into()));
        }
        if t.level.is_some_and(|k| k >= 1 << LEVEL_BITS) {
            return Err(Error::Sizing(format!("level does not fit {LEVEL_BITS} bits")));
        }
        let len = text_len(&t)?;
        let text = render(&t, len, &vec![0; t.instrs.len()]);
        Ok(ProgramBundle { template: t, text, version: 1 })
    }

    /// Builds the bundle the template asks for, self-referential or not.
    pub fn from_template(t: ProgramTemplate) -> Result<ProgramBundle> {
        if t.is_self_referential() {
            self_referential_program(t)
        } else {
            ProgramBundle::plain(t)
        }
    }

    pub fn name(&self) -> &str {
        &self.template.name
    }

    pub fn instrs(&self) -> &[Instr] {
        &self.template.instrs
    }

    pub fn level(&self) -> Option<u64> {
        self.template.level
    }

    /// Same program with a different level field.
    pub fn with_level(&self, level: Option<u64>) -> Result<ProgramBundle> {
        let mut t = self.template.clone();
        t.level = level;
        ProgramBundle::from_template(t)
    }

    /// Whether the payload bits (one per slot) pass every check.
    pub fn accepts(&self, payload: &[u8]) -> bool {
        payload.len() == self.instrs().len() && self.instrs().iter().zip(payload).all(|(i, &b)| i.accepts(b, &self.text))
    }

    /// Tape symbols of the input row, `width` columns.
    pub fn tape(&self, payload: &[u8], width: usize) -> Vec<u32> {
        let mut tape = vec![0; width];
        for (s, &b) in payload.iter().enumerate() {
            tape[4 * s] = U_BIT0 + b as u32;
        }
        tape[4 * payload.len()] = U_END;
        tape
    }

    /// Read-only layer of the input row, `width` columns.
    pub fn ro_row(&self, width: usize) -> Vec<u8> {
        let mut r = self.text.clone();
        r.resize(width.max(r.len()), 0);
        r.truncate(width);
        r
    }
}

/// Fixed point of the template: each `SelfBit(j)` slot gets, as its expected bit,
/// bit `j` of the final text, and the length field records the final length.
pub fn self_referential_program(t: ProgramTemplate) -> Result<ProgramBundle> {
    if !t.is_self_referential() {
        return Err(Error::Config("template has no self instruction".into()));
    }
    if t.level.is_some_and(|k| k >= 1 << LEVEL_BITS) {
        return Err(Error::Sizing(format!("level does not fit {LEVEL_BITS} bits")));
    }
    let len = text_len(&t)?;
    if let Some(j) = t.instrs.iter().find_map(|i| match i {
        Instr::SelfBit(j) if *j >= len => Some(*j),
        _ => None,
    }) {
        return Err(Error::Config(format!("self instruction points at column {j}, text has {len}")));
    }
    let mut expected = vec![0u8; t.instrs.len()];
    // copying only; chains settle within one pass per slot
    for _ in 0..=t.instrs.len() {
        let text = render(&t, len, &expected);
        let next: Vec<u8> = t
            .instrs
            .iter()
            .zip(&expected)
            .map(|(i, &e)| match i {
                Instr::SelfBit(j) => text[*j],
                _ => e,
            })
            .collect();
        if next == expected {
            return Ok(ProgramBundle { template: t, text, version: 1 });
        }
        expected = next;
    }
    Err(Error::Config("self references did not settle".into()))
}
