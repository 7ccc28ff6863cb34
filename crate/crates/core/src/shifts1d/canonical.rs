use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{input, Error, Result};

/// Forbidden words listed in stages; longer budgets list at least as much.
#[derive(Clone)]
pub struct ForbiddenWordSource {
    pub alphabet: Vec<String>,
    enumerator: Arc<dyn Fn(u64) -> Vec<Vec<u8>> + Send + Sync>,
}

impl std::fmt::Debug for ForbiddenWordSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ForbiddenWordSource({:?})", self.alphabet)
    }
}

impl ForbiddenWordSource {
    pub fn new(alphabet: Vec<String>, enumerator: impl Fn(u64) -> Vec<Vec<u8>> + Send + Sync + 'static) -> Self {
        ForbiddenWordSource { alphabet, enumerator: Arc::new(enumerator) }
    }

    pub fn finite(alphabet: Vec<String>, words: Vec<Vec<u8>>) -> Self {
        Self::new(alphabet, move |_| words.clone())
    }

    pub fn words(&self, budget: u64) -> Vec<Vec<u8>> {
        (self.enumerator)(budget)
    }

    /// `alphabet a b c` on the first line, then one forbidden word per line with
    /// symbols separated by spaces (or written together when all are one
    /// character). `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(|l| l.split('#').next().unwrap_or("").trim()).filter(|l| !l.is_empty());
        let head = lines.next().ok_or_else(|| Error::Input("empty forbidden-word file".into()))?;
        let alphabet: Vec<String> = match head.strip_prefix("alphabet") {
            Some(rest) => rest.split_whitespace().map(str::to_string).collect(),
            None => return input("first line must be `alphabet <symbols>`"),
        };
        if alphabet.is_empty() || alphabet.len() > 255 || alphabet.iter().collect::<BTreeSet<_>>().len() != alphabet.len() {
            return input("alphabet must list 1..255 distinct symbols");
        }
        let short = alphabet.iter().all(|s| s.chars().count() == 1);
        let sym = |s: &str| {
            alphabet.iter().position(|a| a == s).map(|i| i as u8).ok_or_else(|| Error::Input(format!("unknown symbol `{s}`")))
        };
        let mut words = Vec::new();
        for l in lines {
            let w: Result<Vec<u8>> = if l.contains(' ') || !short {
                l.split_whitespace().map(sym).collect()
            } else {
                l.chars().map(|c| sym(&c.to_string())).collect()
            };
            words.push(w?);
        }
        Ok(Self::finite(alphabet, words))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalConfig {
    pub word: Vec<u8>,
    /// How many letters were prepended on the left.
    pub left_extensions: usize,
    /// The pattern sits with every level's macro-tile corner at the origin.
    pub standard_alignment: (i64, i64),
    pub budget: u64,
}

impl CanonicalConfig {
    pub fn render(&self, alphabet: &[String]) -> String {
        let sep = if alphabet.iter().all(|s| s.chars().count() == 1) { "" } else { " " };
        self.word.iter().map(|&a| alphabet[a as usize].as_str()).collect::<Vec<_>>().join(sep)
    }
}

struct Forbidden {
    words: Vec<Vec<u8>>,
    max_len: usize,
    sigma: u8,
}

impl Forbidden {
    fn ends_bad(&self, w: &[u8]) -> bool {
        self.words.iter().any(|f| w.ends_with(f))
    }

    fn starts_bad(&self, w: &[u8]) -> bool {
        self.words.iter().any(|f| w.starts_with(f))
    }

    /// Some extension of `w` by `depth` letters to the right avoids every
    /// forbidden word. Only the last `max_len - 1` letters matter.
    fn right_ok(&self, w: &[u8], depth: usize) -> bool {
        let keep = self.max_len.saturating_sub(1);
        let mut states: BTreeSet<Vec<u8>> = BTreeSet::new();
        states.insert(w[w.len().saturating_sub(keep)..].to_vec());
        for _ in 0..depth {
            let mut next = BTreeSet::new();
            for s in &states {
                for a in 0..self.sigma {
                    let mut t = s.clone();
                    t.push(a);
                    if !self.ends_bad(&t) {
                        let cut = t.len().saturating_sub(keep);
                        next.insert(t[cut..].to_vec());
                    }
                }
            }
            if next.is_empty() {
                return false;
            }
            states = next;
        }
        true
    }

    fn left_ok(&self, w: &[u8], depth: usize) -> bool {
        let keep = self.max_len.saturating_sub(1);
        let mut states: BTreeSet<Vec<u8>> = BTreeSet::new();
        states.insert(w[..keep.min(w.len())].to_vec());
        for _ in 0..depth {
            let mut next = BTreeSet::new();
            for s in &states {
                for a in 0..self.sigma {
                    let mut t = vec![a];
                    t.extend_from_slice(s);
                    if !self.starts_bad(&t) {
                        t.truncate(keep);
                        next.insert(t);
                    }
                }
            }
            if next.is_empty() {
                return false;
            }
            states = next;
        }
        true
    }

    fn admissible(&self, w: &[u8]) -> bool {
        (0..w.len()).all(|i| !self.ends_bad(&w[..=i]))
    }
}

/// Greedy canonical word of the given length: grow to the right with the least
/// symbol that keeps the word extendable by `budget` letters on both sides,
/// falling back to the left only when no right extension works.
pub fn canonical_config(fws: &ForbiddenWordSource, length: usize, budget: u64) -> Result<CanonicalConfig> {
    let sigma = fws.alphabet.len();
    if sigma == 0 || sigma > 255 {
        return input("alphabet must have 1..255 symbols");
    }
    let words = fws.words(budget);
    if words.iter().any(|w| w.is_empty() || w.iter().any(|&a| a as usize >= sigma)) {
        return input("forbidden words must be nonempty words over the alphabet");
    }
    let f = Forbidden { max_len: words.iter().map(Vec::len).max().unwrap_or(1), words, sigma: sigma as u8 };
    let depth = budget as usize;
    let ok = |w: &[u8]| f.admissible(w) && f.right_ok(w, depth) && f.left_ok(w, depth);
    let mut w: Vec<u8> = Vec::with_capacity(length);
    let mut left = 0;
    while w.len() < length {
        let right = (0..f.sigma).find(|&a| {
            let mut t = w.clone();
            t.push(a);
            ok(&t)
        });
        if let Some(a) = right {
            w.push(a);
            continue;
        }
        let leftward = (0..f.sigma).find(|&a| {
            let mut t = vec![a];
            t.extend_from_slice(&w);
            ok(&t)
        });
        match leftward {
            Some(a) => {
                w.insert(0, a);
                left += 1;
            }
            None => {
                return Err(Error::Extension {
                    length: w.len(),
                    reason: format!("no admissible symbol on either side at budget {budget}"),
                })
            }
        }
    }
    Ok(CanonicalConfig { word: w, left_extensions: left, standard_alignment: (0, 0), budget })
}
