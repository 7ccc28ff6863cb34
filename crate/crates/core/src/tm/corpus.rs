//! Small machines used by tests, the acceptance suite and the CLI examples.

use super::TMachine;

const ACCEPT_IMMEDIATELY: &str = "tm accept-now 1 2\nstart 0\naccept 0\n";

const SCAN_TO_BLANK: &str = "\
tm scan 2 2
t 0 1 -> 0 1 R
t 0 0 -> 1 0 S
start 0
accept 1
";

// accepts iff the number of 1s is even; 2s are skipped
const EVEN_ONES: &str = "\
tm even-ones 3 3
t 0 1 -> 1 1 R
t 0 2 -> 0 2 R
t 1 1 -> 0 1 R
t 1 2 -> 1 2 R
t 0 0 -> 2 0 S
start 0
accept 2
";

// scans to the first blank, steps back and accepts iff the last symbol is 1;
// on the empty input it falls off the left end
const ENDS_WITH_ONE: &str = "\
tm ends-with-one 3 3
t 0 1 -> 0 1 R
t 0 2 -> 0 2 R
t 0 0 -> 1 0 L
t 1 1 -> 2 1 S
start 0
accept 2
";

// marks the first cell, walks right over 1s and back to the mark
const MARK_AND_RETURN: &str = "\
tm mark-return 4 3
t 0 1 -> 1 2 R
t 1 1 -> 1 1 R
t 1 0 -> 2 0 L
t 2 1 -> 2 1 L
t 2 2 -> 3 2 S
start 0
accept 3
";

// accepts iff every symbol before the first blank agrees with the read-only bit
const MATCH_RO: &str = "\
tm match-ro 2 3 ro
t 0 1 0 -> 0 1 R
t 0 2 1 -> 0 2 R
t 0 0 0 -> 1 0 S
t 0 0 1 -> 1 0 S
start 0
accept 1
";

fn load(text: &str) -> TMachine {
    TMachine::parse(text).expect("corpus machine parses")
}

pub fn accept_immediately() -> TMachine {
    load(ACCEPT_IMMEDIATELY)
}

pub fn scan_to_blank() -> TMachine {
    load(SCAN_TO_BLANK)
}

pub fn even_ones() -> TMachine {
    load(EVEN_ONES)
}

pub fn ends_with_one() -> TMachine {
    load(ENDS_WITH_ONE)
}

pub fn mark_and_return() -> TMachine {
    load(MARK_AND_RETURN)
}

pub fn match_ro() -> TMachine {
    load(MATCH_RO)
}

pub fn all() -> Vec<TMachine> {
    vec![accept_immediately(), scan_to_blank(), even_ones(), ends_with_one(), mark_and_return(), match_ro()]
}

/// Every word over the non-blank symbols of `m` with length at most `max_len`.
pub fn inputs(m: &TMachine, max_len: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for s in 1..m.symbols {
                let mut v: Vec<u32> = w.clone();
                v.push(s);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}
