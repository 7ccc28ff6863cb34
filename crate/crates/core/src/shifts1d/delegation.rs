use std::collections::BTreeMap;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::fixpoint::{MacroLayout, Role, ZoomSchedule};

/// Letter delegation for one level-`k` macro-tile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Delegation {
    pub level: u32,
    pub big_l: u64,
    pub chunk_len: u64,
    /// `3L_k − l_k`.
    pub modulus: u64,
    pub offset: u64,
    /// Half-open column intervals.
    pub responsibility: (i64, i64),
    pub chunk: (i64, i64),
}

fn sizes(schedule: &ZoomSchedule, k: u32) -> Result<(u64, u64)> {
    if k == 0 {
        return Err(Error::Config("delegation starts at level 1".into()));
    }
    let big_l = schedule
        .l_u64(k)
        .filter(|l| l.checked_mul(3).map_or(false, |t| t < i64::MAX as u64))
        .ok_or_else(|| Error::Sizing(format!("L_{k} does not fit 63 bits")))?;
    // floor(log2 log2 L) = ilog2(ilog2 L), clamped to 1
    let l = if big_l < 4 { 1 } else { (big_l.ilog2().ilog2() as u64).max(1) };
    Ok((big_l, l))
}

/// Responsibility zone and chunk of the level-`k` macro-tile in column `col`
/// (its span is `[col·L_k, (col+1)·L_k)`) at height `j` inside its father.
pub fn delegation(schedule: &ZoomSchedule, k: u32, col: i64, j: u64) -> Result<Delegation> {
    let (big_l, l) = sizes(schedule, k)?;
    let modulus = 3 * big_l - l;
    let offset = j % modulus;
    let a = (col - 1) * big_l as i64;
    let c = a + offset as i64;
    Ok(Delegation {
        level: k,
        big_l,
        chunk_len: l,
        modulus,
        offset,
        responsibility: (a, a + 3 * big_l as i64),
        chunk: (c, c + l as i64),
    })
}

/// Chunk start positions in `range` that no level-`k` macro-tile is assigned,
/// with `j` ranging over the father's height `N_{k+1}`.
pub fn coverage_gaps(schedule: &ZoomSchedule, k: u32, range: Range<i64>) -> Result<Vec<i64>> {
    let (big_l, l) = sizes(schedule, k)?;
    let heights = schedule.n_u64(k + 1).unwrap_or(u64::MAX);
    let reach = (3 * big_l - l).min(heights) as i64;
    let bl = big_l as i64;
    Ok(range
        .filter(|&p| {
            let x0 = p.div_euclid(bl);
            !(x0 - 1..=x0 + 1).any(|x| {
                let off = p - (x - 1) * bl;
                (0..reach).contains(&off)
            })
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MacroRole {
    Plain,
    Wire,
    /// One ring of cells around a wire.
    WireNeighbor,
}

impl MacroRole {
    /// Role of the cell `(x, y)` of a macro-tile with this layout.
    pub fn in_layout(l: &MacroLayout, x: usize, y: usize) -> MacroRole {
        let wire = |x: usize, y: usize| matches!(l.role(x, y), Role::Wire { .. });
        if wire(x, y) {
            return MacroRole::Wire;
        }
        for dy in -1i64..=1 {
            for dx in -1i64..=1 {
                let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                if (0..l.n as i64).contains(&nx) && (0..l.n as i64).contains(&ny) && wire(nx as usize, ny as usize) {
                    return MacroRole::WireNeighbor;
                }
            }
        }
        MacroRole::Plain
    }
}

/// Fields (iv)–(vi) of one macro-tile at grid position `(col, row)` of level `level`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSet {
    pub level: u32,
    pub col: i64,
    pub row: i64,
    pub father: (i64, i64),
    pub role: MacroRole,
    /// (iv): the own chunk, starting at `iv_at`.
    pub iv: Vec<u8>,
    pub iv_at: i64,
    /// (v): chunks of the father, left uncle and right uncle.
    pub v: [Vec<u8>; 3],
    pub v_at: [i64; 3],
    /// (vi): father's position in the grandfather.
    pub vi: Option<(u64, u64)>,
}

/// Fieldsets of the level-`k` macro-tiles in `cols × rows`, read off the word
/// `letter` (indexed by absolute column) by the delegation rule. `role` gets the
/// position inside the father.
pub fn generate_fieldsets(
    schedule: &ZoomSchedule,
    k: u32,
    letter: &dyn Fn(i64) -> u8,
    cols: Range<i64>,
    rows: Range<i64>,
    role: &dyn Fn(u64, u64) -> MacroRole,
) -> Result<Vec<FieldSet>> {
    let nf = schedule.n_u64(k + 1).ok_or_else(|| Error::Sizing(format!("N_{} overflows", k + 1)))? as i64;
    let ng = schedule.n_u64(k + 2).ok_or_else(|| Error::Sizing(format!("N_{} overflows", k + 2)))? as i64;
    let read = |(a, b): (i64, i64)| (a..b).map(letter).collect::<Vec<u8>>();
    let mut out = Vec::new();
    for row in rows {
        for col in cols.clone() {
            let own = delegation(schedule, k, col, row.rem_euclid(nf) as u64)?;
            let (fx, fy) = (col.div_euclid(nf), row.div_euclid(nf));
            let fj = fy.rem_euclid(ng) as u64;
            let fam = [
                delegation(schedule, k + 1, fx, fj)?.chunk,
                delegation(schedule, k + 1, fx - 1, fj)?.chunk,
                delegation(schedule, k + 1, fx + 1, fj)?.chunk,
            ];
            let r = role(col.rem_euclid(nf) as u64, row.rem_euclid(nf) as u64);
            out.push(FieldSet {
                level: k,
                col,
                row,
                father: (fx, fy),
                role: r,
                iv: read(own.chunk),
                iv_at: own.chunk.0,
                v: [read(fam[0]), read(fam[1]), read(fam[2])],
                v_at: [fam[0].0, fam[1].0, fam[2].0],
                vi: (r == MacroRole::Plain).then(|| (fx.rem_euclid(ng) as u64, fy.rem_euclid(ng) as u64)),
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Clause {
    /// Overlapping claims disagree.
    Overlap,
    /// Siblings disagree on (v) or (vi).
    Siblings,
    /// A claim disagrees with the embedded word.
    Ground,
    /// (vi) present exactly off the wires.
    Emptiness,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldViolation {
    pub clause: Clause,
    /// `(level, col, row)` of the offending macro-tile.
    pub at: (u32, i64, i64),
    pub other: Option<(u32, i64, i64)>,
    pub position: Option<i64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FieldReport {
    pub checked: usize,
    pub violations: Vec<FieldViolation>,
}

impl FieldReport {
    pub fn consistent(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn touches(&self, id: (u32, i64, i64)) -> bool {
        self.violations.iter().all(|v| v.at == id || v.other == Some(id))
    }
}

/// Checks fieldsets of two adjacent levels (in any order) against each other
/// and against the embedded word.
pub fn check_fields(sets: &[FieldSet], letter: &dyn Fn(i64) -> u8) -> FieldReport {
    let mut report = FieldReport { checked: sets.len(), ..Default::default() };
    let id = |s: &FieldSet| (s.level, s.col, s.row);
    // every claimed letter, by position
    let mut claims: BTreeMap<i64, Vec<(u8, usize)>> = BTreeMap::new();
    for (i, s) in sets.iter().enumerate() {
        let chunks = std::iter::once((s.iv_at, &s.iv)).chain(s.v_at.iter().copied().zip(s.v.iter()));
        for (at, chunk) in chunks {
            for (d, &a) in chunk.iter().enumerate() {
                claims.entry(at + d as i64).or_default().push((a, i));
            }
        }
    }
    let mut pairs = std::collections::BTreeSet::new();
    for (&p, cs) in &claims {
        let truth = letter(p);
        for &(a, i) in cs {
            if a != truth {
                report.violations.push(FieldViolation { clause: Clause::Ground, at: id(&sets[i]), other: None, position: Some(p) });
            }
        }
        for (x, &(a, i)) in cs.iter().enumerate() {
            for &(b, j) in &cs[x + 1..] {
                if a != b && i != j && pairs.insert((p, i.min(j), i.max(j))) {
                    report.violations.push(FieldViolation {
                        clause: Clause::Overlap,
                        at: id(&sets[i]),
                        other: Some(id(&sets[j])),
                        position: Some(p),
                    });
                }
            }
        }
    }
    let index: BTreeMap<(u32, i64, i64), usize> = sets.iter().enumerate().map(|(i, s)| (id(s), i)).collect();
    for s in sets {
        for (dx, dy) in [(1, 0), (0, 1)] {
            let Some(&j) = index.get(&(s.level, s.col + dx, s.row + dy)) else { continue };
            let t = &sets[j];
            if t.father != s.father {
                continue;
            }
            let vi_clash = matches!((s.vi, t.vi), (Some(a), Some(b)) if a != b);
            if s.v != t.v || s.v_at != t.v_at || vi_clash {
                report.violations.push(FieldViolation { clause: Clause::Siblings, at: id(s), other: Some(id(t)), position: None });
            }
        }
        if s.vi.is_some() != (s.role == MacroRole::Plain) {
            report.violations.push(FieldViolation { clause: Clause::Emptiness, at: id(s), other: None, position: None });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixpoint::layout;

    fn tm_letter(p: i64) -> u8 {
        ((p as u64).count_ones() % 2) as u8
    }

    #[test]
    fn toy_schedule_values() {
        let z = ZoomSchedule::Doubly { c: 2 };
        let d = delegation(&z, 1, 0, 5).unwrap();
        assert_eq!((d.big_l, d.chunk_len, d.modulus, d.offset), (9, 1, 26, 5));
        assert_eq!(d.responsibility, (-9, 18));
        assert_eq!(d.chunk, (-4, -3));
        let d2 = delegation(&z, 2, 1, 0).unwrap();
        assert_eq!((d2.big_l, d2.chunk_len), (729, 3));
        assert!(delegation(&z, 0, 0, 0).is_err());
    }

    #[test]
    fn chunks_cover_every_start() {
        let z = ZoomSchedule::Doubly { c: 2 };
        assert!(coverage_gaps(&z, 1, -200..3 * 729).unwrap().is_empty());
        assert!(coverage_gaps(&z, 2, -3000..3 * 6561 * 9).unwrap().is_empty());
        // a schedule with a short father cannot reach every offset
        let tight = ZoomSchedule::Constant { n: 3 };
        assert!(!coverage_gaps(&tight, 2, 0..30).unwrap().is_empty());
    }

    fn grid() -> Vec<FieldSet> {
        let z = ZoomSchedule::Doubly { c: 2 };
        let l = layout(81, 1, 17).unwrap();
        let role = |x: u64, y: u64| MacroRole::in_layout(&l, x as usize, y as usize);
        let mut sets = generate_fieldsets(&z, 1, &tm_letter, 0..30, 0..4, &role).unwrap();
        sets.extend(generate_fieldsets(&z, 2, &tm_letter, -1..2, 0..1, &|_, _| MacroRole::Plain).unwrap());
        sets
    }

    #[test]
    fn generated_sets_are_consistent() {
        let sets = grid();
        let r = check_fields(&sets, &tm_letter);
        assert!(r.consistent(), "{:?}", &r.violations[..r.violations.len().min(5)]);
    }

    #[test]
    fn flips_are_localized() {
        let sets = grid();
        for (i, s) in sets.iter().enumerate().filter(|(_, s)| s.level == 1).step_by(7) {
            for d in 0..s.iv.len() {
                let mut bad = sets.clone();
                bad[i].iv[d] ^= 1;
                let r = check_fields(&bad, &tm_letter);
                assert!(!r.consistent());
                assert!(r.touches((1, s.col, s.row)));
                assert!(r.violations.iter().all(|v| matches!(v.clause, Clause::Overlap | Clause::Ground)));
            }
        }
    }

    #[test]
    fn emptiness_on_wires() {
        let l = layout(81, 1, 17).unwrap();
        let (x, y) = (0..81)
            .flat_map(|y| (0..81).map(move |x| (x, y)))
            .find(|&(x, y)| MacroRole::in_layout(&l, x, y) == MacroRole::Wire)
            .unwrap();
        let z = ZoomSchedule::Doubly { c: 2 };
        let role = |a: u64, b: u64| MacroRole::in_layout(&l, a as usize, b as usize);
        let mut sets = generate_fieldsets(&z, 1, &tm_letter, x as i64..x as i64 + 1, y as i64..y as i64 + 1, &role).unwrap();
        assert_eq!(sets[0].role, MacroRole::Wire);
        assert!(check_fields(&sets, &tm_letter).consistent());
        sets[0].vi = Some((0, 0));
        let r = check_fields(&sets, &tm_letter);
        assert_eq!(r.violations.iter().map(|v| v.clause).collect::<Vec<_>>(), vec![Clause::Emptiness]);
    }

    #[test]
    fn siblings_must_agree() {
        let mut sets = grid();
        let i = sets.iter().position(|s| s.level == 1 && s.vi.is_some() && s.col == 3).unwrap();
        sets[i].vi = Some((5, 5));
        let r = check_fields(&sets, &tm_letter);
        assert!(r.violations.iter().any(|v| v.clause == Clause::Siblings));
        assert!(r.touches((1, sets[i].col, sets[i].row)));
    }
}
