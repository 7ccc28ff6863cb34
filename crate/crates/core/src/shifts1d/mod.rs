//! One-dimensional sequences: recurrence measurements, the letter delegation used
//! to embed a sequence into a tiling, and canonical points of effective shifts.

mod canonical;
mod delegation;
mod lemmas;
mod separator;

pub use canonical::{canonical_config, CanonicalConfig, ForbiddenWordSource};
pub use delegation::{
    check_fields, coverage_gaps, delegation, generate_fieldsets, Clause, Delegation, FieldReport, FieldSet, FieldViolation,
    MacroRole,
};
pub use lemmas::{lemma2_bound, lemma2_find, lemma3_check, Lemma2Bound, Lemma3Verdict};
pub use separator::{separator_check, DiagonalPair, EnumerablePair, SeparatorResult, ToyPair};

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{input, Error, Result};

/// A one-sided sequence over `0 .. alphabet`, produced prefix by prefix.
#[derive(Clone)]
pub enum SequenceSource {
    /// Finite word; asking for a longer prefix is an error.
    Word(Vec<u8>),
    Periodic(Vec<u8>),
    /// Fixed point of a non-erasing substitution started from `start`; `rules[a]`
    /// must begin with `start` when `a == start`.
    Substitution { rules: Vec<Vec<u8>>, start: u8 },
    Callback { alphabet: u8, f: Arc<dyn Fn(usize) -> u8 + Send + Sync> },
}

impl fmt::Debug for SequenceSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceSource::Word(w) => write!(f, "Word(len {})", w.len()),
            SequenceSource::Periodic(w) => write!(f, "Periodic({w:?})"),
            SequenceSource::Substitution { rules, start } => write!(f, "Substitution({rules:?}, {start})"),
            SequenceSource::Callback { alphabet, .. } => write!(f, "Callback(alphabet {alphabet})"),
        }
    }
}

impl SequenceSource {
    pub fn thue_morse() -> SequenceSource {
        SequenceSource::Substitution { rules: vec![vec![0, 1], vec![1, 0]], start: 0 }
    }

    /// `thue-morse`, `periodic:<digits>`, `word:<digits>`; files are read by the caller.
    pub fn parse(spec: &str) -> Result<SequenceSource> {
        let digits = |s: &str| -> Result<Vec<u8>> {
            s.chars()
                .map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(|| Error::Input(format!("bad symbol `{c}` in `{spec}`"))))
                .collect()
        };
        match spec.split_once(':') {
            None if spec == "thue-morse" => Ok(SequenceSource::thue_morse()),
            Some(("periodic", w)) if !w.is_empty() => Ok(SequenceSource::Periodic(digits(w)?)),
            Some(("word", w)) => Ok(SequenceSource::Word(digits(w)?)),
            _ => input(format!("unknown sequence `{spec}`")),
        }
    }

    pub fn alphabet(&self) -> u8 {
        let max = |w: &[u8]| w.iter().copied().max().map_or(1, |m| m + 1);
        match self {
            SequenceSource::Word(w) | SequenceSource::Periodic(w) => max(w),
            SequenceSource::Substitution { rules, .. } => rules.len() as u8,
            SequenceSource::Callback { alphabet, .. } => *alphabet,
        }
    }

    pub fn prefix(&self, len: usize) -> Result<Vec<u8>> {
        match self {
            SequenceSource::Word(w) => {
                if len > w.len() {
                    return Err(Error::Input(format!("word has only {} letters, {len} requested", w.len())));
                }
                Ok(w[..len].to_vec())
            }
            SequenceSource::Periodic(w) => {
                if w.is_empty() {
                    return input("empty period");
                }
                Ok((0..len).map(|i| w[i % w.len()]).collect())
            }
            SequenceSource::Substitution { rules, start } => {
                let s = *start as usize;
                if rules.iter().any(|r| r.is_empty()) || rules.get(s).map_or(true, |r| r[0] != *start) {
                    return input("substitution must be non-erasing and prolongable on its start letter");
                }
                if rules.iter().flatten().any(|&c| c as usize >= rules.len()) {
                    return input("substitution image uses an unknown letter");
                }
                let mut w = vec![*start];
                while w.len() < len {
                    let next: Vec<u8> = w.iter().flat_map(|&c| rules[c as usize].iter().copied()).collect();
                    if next.len() == w.len() {
                        return input("substitution does not grow");
                    }
                    w = next;
                }
                w.truncate(len);
                Ok(w)
            }
            SequenceSource::Callback { f, .. } => Ok((0..len).map(|i| f(i)).collect()),
        }
    }
}

/// Value of the quasiperiodicity function at one `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phi {
    Finite(usize),
    /// The window is too short to certify a value (it would exceed half of it).
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QPFunction {
    pub window: usize,
    /// `values[n - 1]` for `n = 1 ..= n_max`.
    pub values: Vec<Phi>,
}

impl QPFunction {
    pub fn get(&self, n: usize) -> Phi {
        self.values[n - 1]
    }
}

/// Least `w` such that every sub-window of length `w` of `x` contains an
/// occurrence starting at one of `occ` (sorted) of a word of length `n`.
pub(crate) fn cover_width(occ: &[usize], n: usize, total: usize) -> usize {
    let first = occ[0] + n;
    let last = total - occ[occ.len() - 1];
    let gaps = occ.windows(2).map(|p| p[1] - p[0] - 1 + n).max().unwrap_or(0);
    first.max(last).max(gaps)
}

/// Positions of every factor of length `n` of `x`.
pub(crate) fn factor_positions(x: &[u8], n: usize) -> HashMap<&[u8], Vec<usize>> {
    let mut m: HashMap<&[u8], Vec<usize>> = HashMap::new();
    if n == 0 || n > x.len() {
        return m;
    }
    for i in 0..=x.len() - n {
        m.entry(&x[i..i + n]).or_default().push(i);
    }
    m
}

/// Empirical quasiperiodicity function on the first `window` letters: for each
/// `n ≤ n_max`, the least `w` such that every factor of length `n` seen in the
/// window occurs in every sub-window of length `w`.
pub fn qp_function(src: &SequenceSource, n_max: usize, window: usize) -> Result<QPFunction> {
    let x = src.prefix(window)?;
    let values = (1..=n_max)
        .map(|n| {
            let pos = factor_positions(&x, n);
            if pos.is_empty() {
                return Phi::Unknown;
            }
            let w = pos.values().map(|occ| cover_width(occ, n, x.len())).max().unwrap_or(n);
            if 2 * w > window {
                Phi::Unknown
            } else {
                Phi::Finite(w)
            }
        })
        .collect();
    Ok(QPFunction { window, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn thue_morse_prefix() {
        let x = SequenceSource::thue_morse().prefix(16).unwrap();
        assert_eq!(x, vec![0, 1, 1, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0, 1, 1, 0]);
    }

    #[test]
    fn parse_sources() {
        assert_eq!(SequenceSource::parse("periodic:01").unwrap().prefix(5).unwrap(), vec![0, 1, 0, 1, 0]);
        assert!(SequenceSource::parse("periodic:").is_err());
        assert!(SequenceSource::parse("nope").is_err());
        assert!(SequenceSource::Word(vec![1, 2]).prefix(3).is_err());
    }

    #[test]
    fn qp_examples() {
        let p = qp_function(&SequenceSource::Periodic(vec![0, 1]), 2, 1 << 10).unwrap();
        assert_eq!(p.values, vec![Phi::Finite(2), Phi::Finite(3)]);
        let c = qp_function(&SequenceSource::Periodic(vec![0]), 5, 1 << 10).unwrap();
        assert_eq!(c.values, (1..=5).map(Phi::Finite).collect::<Vec<_>>());
        let t = qp_function(&SequenceSource::thue_morse(), 1, 1 << 14).unwrap();
        assert_eq!(t.get(1), Phi::Finite(3));
        let short = qp_function(&SequenceSource::thue_morse(), 6, 16).unwrap();
        assert_eq!(short.get(6), Phi::Unknown);
    }

    #[test]
    fn qp_brute_force_definition() {
        // direct check of the definition on a small window
        let x = SequenceSource::thue_morse().prefix(256).unwrap();
        let q = qp_function(&SequenceSource::Word(x.clone()), 4, 256).unwrap();
        for n in 1..=4 {
            let Phi::Finite(w) = q.get(n) else { panic!() };
            let factors: std::collections::HashSet<&[u8]> = x.windows(n).collect();
            let ok = |w: usize| x.windows(w).all(|sub| factors.iter().all(|f| sub.windows(n).any(|g| g == *f)));
            assert!(ok(w) && !ok(w - 1), "n={n} w={w}");
        }
    }

    proptest! {
        #[test]
        fn qp_non_decreasing_on_periodic(period in proptest::collection::vec(0u8..3, 1..6)) {
            let q = qp_function(&SequenceSource::Periodic(period), 6, 512).unwrap();
            let finite: Vec<usize> = q.values.iter().filter_map(|v| match v { Phi::Finite(w) => Some(*w), _ => None }).collect();
            prop_assert!(finite.windows(2).all(|p| p[0] <= p[1]));
        }
    }
}
