use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::wang::TileSet;

/// Tiles with identical colors merged, with their multiplicity (they differ by letter only).
fn grouped(ts: &TileSet) -> Vec<([u32; 4], u64)> {
    let mut m: BTreeMap<[u32; 4], u64> = BTreeMap::new();
    for t in ts.tiles() {
        *m.entry(t.quad()).or_default() += 1;
    }
    m.into_iter().collect()
}

struct RowBuilder {
    width: usize,
    cyclic: bool,
    groups: Vec<([u32; 4], u64)>,
    by_left: HashMap<u32, Vec<usize>>,
    budget: u64,
    spent: u64,
}

impl RowBuilder {
    fn new(ts: &TileSet, width: usize, cyclic: bool, budget: u64) -> RowBuilder {
        let groups = grouped(ts);
        let mut by_left: HashMap<u32, Vec<usize>> = HashMap::new();
        for (i, (q, _)) in groups.iter().enumerate() {
            by_left.entry(q[0]).or_default().push(i);
        }
        RowBuilder { width, cyclic, groups, by_left, budget, spent: 0 }
    }

    /// Rows whose bottom profile is `bottom` (or anything, when `None`), keyed by top profile.
    fn rows(&mut self, bottom: Option<&[u32]>) -> Result<BTreeMap<Vec<u32>, BigUint>> {
        // key: (top prefix, right color of last tile, left color of first tile)
        type Key = (Vec<u32>, u32, u32);
        let mut layer: BTreeMap<Key, BigUint> = BTreeMap::new();
        for (q, mult) in &self.groups {
            if bottom.is_some_and(|b| b[0] != q[3]) {
                continue;
            }
            *layer.entry((vec![q[2]], q[1], q[0])).or_insert_with(BigUint::zero) += *mult;
        }
        for x in 1..self.width {
            let mut next: BTreeMap<Key, BigUint> = BTreeMap::new();
            for ((top, right, first), cnt) in layer {
                let Some(cands) = self.by_left.get(&right) else { continue };
                for &g in cands {
                    let (q, mult) = &self.groups[g];
                    if bottom.is_some_and(|b| b[x] != q[3]) {
                        continue;
                    }
                    self.spent += 1;
                    if self.spent > self.budget {
                        return Err(Error::Budget("row automaton".into()));
                    }
                    let mut t = top.clone();
                    t.push(q[2]);
                    *next.entry((t, q[1], first)).or_insert_with(BigUint::zero) += &cnt * *mult;
                }
            }
            layer = next;
        }
        let mut out: BTreeMap<Vec<u32>, BigUint> = BTreeMap::new();
        for ((top, right, first), cnt) in layer {
            if self.cyclic && right != first {
                continue;
            }
            *out.entry(top).or_insert_with(BigUint::zero) += cnt;
        }
        Ok(out)
    }
}

/// Rows of a fixed width as a finite automaton: states are top color profiles and
/// `trans[s]` lists the states reachable by stacking one more row, with the number
/// of rows realising each step.
#[derive(Debug, Clone)]
pub struct RowAutomaton {
    pub width: usize,
    pub cyclic: bool,
    pub profiles: Vec<Vec<u32>>,
    /// Number of rows (any bottom) with each top profile.
    pub initial: Vec<BigUint>,
    pub trans: Vec<Vec<(usize, BigUint)>>,
}

impl RowAutomaton {
    /// Builds the reachable part of the automaton. `budget` bounds the number of
    /// partial-row extensions; exceeding it is a sizing error.
    pub fn build(ts: &TileSet, width: usize, cyclic: bool, budget: u64) -> Result<RowAutomaton> {
        if width == 0 {
            return Err(Error::Input("row width must be positive".into()));
        }
        let mut rb = RowBuilder::new(ts, width, cyclic, budget);
        let first = rb.rows(None)?;
        let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
        let mut profiles: Vec<Vec<u32>> = Vec::new();
        let mut initial = Vec::new();
        for (p, c) in first {
            index.insert(p.clone(), profiles.len());
            profiles.push(p);
            initial.push(c);
        }
        let mut trans = Vec::new();
        let mut s = 0;
        while s < profiles.len() {
            let succ = rb.rows(Some(&profiles[s].clone()))?;
            let mut row = Vec::with_capacity(succ.len());
            for (p, c) in succ {
                let id = match index.get(&p) {
                    Some(&i) => i,
                    None => {
                        index.insert(p.clone(), profiles.len());
                        profiles.push(p);
                        initial.push(BigUint::zero());
                        profiles.len() - 1
                    }
                };
                row.push((id, c));
            }
            trans.push(row);
            s += 1;
        }
        Ok(RowAutomaton { width, cyclic, profiles, initial, trans })
    }

    /// Number of valid patches with `height` rows.
    pub fn count(&self, height: usize) -> BigUint {
        if height == 0 {
            return BigUint::from(1u32);
        }
        let mut v = self.initial.clone();
        for _ in 1..height {
            let mut next = vec![BigUint::zero(); v.len()];
            for (s, cnt) in v.iter().enumerate() {
                if cnt.is_zero() {
                    continue;
                }
                for (t, m) in &self.trans[s] {
                    next[*t] += cnt * m;
                }
            }
            v = next;
        }
        v.into_iter().sum()
    }

    /// Perron root of the transition matrix, by power iteration on `M + I`.
    pub fn spectral_radius(&self) -> f64 {
        let n = self.profiles.len();
        if n == 0 {
            return 0.0;
        }
        let mats: Vec<Vec<(usize, f64)>> = self
            .trans
            .iter()
            .map(|r| r.iter().map(|(t, m)| (*t, m.to_f64().unwrap_or(f64::MAX))).collect())
            .collect();
        let mut v = vec![1.0 / n as f64; n];
        let mut lambda = 0.0;
        for it in 0..500_000 {
            let mut next = v.clone();
            for (s, row) in mats.iter().enumerate() {
                for (t, m) in row {
                    next[*t] += v[s] * m;
                }
            }
            let norm: f64 = next.iter().sum();
            if norm == 0.0 {
                return 0.0;
            }
            for x in next.iter_mut() {
                *x /= norm;
            }
            // v is L1-normalised, so the growth of the sum estimates the root of M + I
            let est = norm - 1.0;
            v = next;
            if it > 10 && (est - lambda).abs() <= 1e-15 * est.max(1.0) {
                return est;
            }
            lambda = est;
        }
        lambda
    }
}

/// Exact number of valid `k × k` patches (local consistency only: a patch is counted
/// whether or not it extends to a tiling of the plane).
pub fn count_patterns(ts: &TileSet, k: usize, budget: u64) -> Result<BigUint> {
    if k == 0 {
        return Err(Error::Input("k must be positive".into()));
    }
    let mut rb = RowBuilder::new(ts, k, false, budget);
    let mut v: BTreeMap<Vec<u32>, BigUint> = rb.rows(None)?;
    let mut memo: HashMap<Vec<u32>, BTreeMap<Vec<u32>, BigUint>> = HashMap::new();
    for _ in 1..k {
        let mut next: BTreeMap<Vec<u32>, BigUint> = BTreeMap::new();
        for (p, cnt) in &v {
            if !memo.contains_key(p) {
                let succ = rb.rows(Some(p))?;
                memo.insert(p.clone(), succ);
            }
            for (t, m) in &memo[p] {
                *next.entry(t.clone()).or_insert_with(BigUint::zero) += cnt * m;
            }
        }
        v = next;
    }
    Ok(v.into_values().sum())
}

#[derive(Debug, Clone, PartialEq)]
pub struct WidthEstimate {
    pub width: usize,
    /// log2 of the growth rate of width-`w` strips with free sides.
    pub log2_free: f64,
    /// Same for strips wrapped into a cylinder (only computed when symmetric).
    pub log2_cyclic: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyBounds {
    pub lower: f64,
    pub upper: f64,
    /// Largest width whose strips were fully processed.
    pub width: usize,
    /// The lower bound is a proof only under the reflection-symmetry assumption.
    pub lower_rigorous: bool,
    pub exhausted: bool,
    pub per_width: Vec<WidthEstimate>,
}

/// Entropy bounds (bits per cell) from growth rates of vertical strips.
///
/// Always valid: `h ≤ log2 λ_w / w` for free strips, since a `2w`-wide window is
/// determined by its two halves.
///
/// With `symmetric` set the caller asserts that the column transfer matrix is
/// symmetric up to a positive diagonal scaling (true for shifts invariant under
/// left–right reflection). Then for even `w`
/// `h ≤ log2 λ^cyl_w / w` (trace bound) and `h ≥ (log2 λ_w − log2 λ_{w−2}) / 2`
/// (Rayleigh quotient bound). Without the assumption the second quantity is still
/// reported as `lower`, flagged as an estimate.
pub fn transfer_entropy_bounds(ts: &TileSet, max_width: usize, budget: u64, symmetric: bool) -> EntropyBounds {
    let mut out = EntropyBounds {
        lower: 0.0,
        upper: f64::INFINITY,
        width: 0,
        lower_rigorous: symmetric,
        exhausted: false,
        per_width: Vec::new(),
    };
    let mut logs: Vec<f64> = vec![0.0];
    for w in 1..=max_width {
        let free = match RowAutomaton::build(ts, w, false, budget) {
            Ok(a) => a,
            Err(_) => {
                out.exhausted = true;
                break;
            }
        };
        let lam = free.spectral_radius();
        if lam < 0.5 {
            // no bi-infinite strip of this width: the shift is empty (or finite)
            out.lower = 0.0;
            out.upper = 0.0;
            out.width = w;
            out.per_width.push(WidthEstimate { width: w, log2_free: f64::NEG_INFINITY, log2_cyclic: None });
            return out;
        }
        let a = lam.log2();
        logs.push(a);
        out.upper = out.upper.min(a / w as f64);
        let mut cyc = None;
        if symmetric && w % 2 == 0 {
            match RowAutomaton::build(ts, w, true, budget) {
                Ok(c) => {
                    let l = c.spectral_radius();
                    let lc = if l > 0.0 { l.log2() } else { f64::NEG_INFINITY };
                    cyc = Some(lc);
                    out.upper = out.upper.min((lc / w as f64).max(0.0));
                }
                Err(_) => {
                    out.exhausted = true;
                    break;
                }
            }
        }
        let usable = if symmetric { w % 2 == 0 } else { true };
        if w >= 3 && usable {
            out.lower = out.lower.max((a - logs[w - 2]) / 2.0);
        }
        out.per_width.push(WidthEstimate { width: w, log2_free: a, log2_cyclic: cyc });
        out.width = w;
    }
    if out.width == 0 {
        out.upper = f64::INFINITY;
    }
    out.lower = out.lower.min(out.upper.max(0.0)).max(0.0);
    out
}
