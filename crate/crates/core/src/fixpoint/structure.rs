use std::collections::BTreeMap;

use super::compile::{Compiled, TileKind};
use super::layout::{InputCol, Role};
use super::skeleton_coords;
use crate::error::{Error, Result};
use crate::wang::{Patch, TileSet};

/// Where a macro-tile sits, as seen from the levels above it. At desk scale there
/// is no father to read this from, so the caller supplies it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Placement {
    pub level: u32,
    /// Position inside the father, mod `N_{k+1}`.
    pub pos_in_father: (u64, u64),
    /// Father's position inside the grandfather, mod `N_{k+2}`.
    pub father_pos: (u64, u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedMacroTile {
    pub placement: Placement,
    /// Payload bit carried by the wire this macro-tile belongs to, if any.
    pub wire_bit: Option<u8>,
    /// Tiles of the input row and comp zone, row by row.
    pub comp_pattern: Vec<u32>,
    pub fields: BTreeMap<String, Vec<u8>>,
    /// Letters of the responsibility zone (the macro-tile's own columns here).
    pub letters: Vec<u32>,
    pub body: Patch,
}

fn undecodable<T>(msg: String) -> Result<T> {
    Err(Error::Format(format!("undecodable macro-tile: {msg}")))
}

impl DecodedMacroTile {
    /// Reads a macro-tile of a compiled set: every cell must hold a tile of its
    /// own coordinates (or a slot interior).
    pub fn from_compiled(c: &Compiled, body: &Patch, placement: Placement, wire_bit: Option<u8>) -> Result<DecodedMacroTile> {
        let l = &c.layout;
        if body.width() != l.n || body.height() != l.n || !body.is_full() {
            return undecodable(format!("expected a full {0}×{0} body", l.n));
        }
        let mut fields: BTreeMap<String, Vec<u8>> = BTreeMap::new();
        let mut comp_pattern = Vec::with_capacity(l.m * (l.m + 1));
        for (x, y, t) in body.assigned() {
            let info = c.info.get(t as usize).ok_or_else(|| Error::Format(format!("unknown tile {t}")))?;
            let home = (info.x as usize, info.y as usize) == (x, y);
            if !home && !matches!(l.role(x, y), Role::SlotInterior { .. }) {
                return undecodable(format!("tile {t} at ({x},{y}) belongs to ({},{})", info.x, info.y));
            }
        }
        for y in l.y_in..l.comp.y1() {
            for x in l.comp.x0..l.comp.x1() {
                comp_pattern.push(body.get(x, y).expect("full"));
            }
        }
        for f in &l.fields {
            let mut bits = Vec::with_capacity(f.len);
            for col in f.start..f.start + f.len {
                let t = body.get(l.comp.x0 + col, l.y_in).expect("full");
                let v = match (l.role(l.comp.x0 + col, l.y_in), c.info[t as usize].kind) {
                    (Role::Input { kind: InputCol::Data { .. }, .. }, TileKind::Input { value: Some(v), .. }) => v,
                    (Role::Input { .. }, TileKind::Input { .. }) => c.bundle.text.get(col).copied().unwrap_or(0),
                    _ => return undecodable(format!("input column {col} holds a foreign tile")),
                };
                bits.push(v);
            }
            fields.insert(f.name.clone(), bits);
        }
        Ok(DecodedMacroTile { placement, wire_bit, comp_pattern, fields, letters: Vec::new(), body: body.clone() })
    }

    /// Reads an `N×N` block of `letter_layer(skeleton_tiles(N), Σ)`: the skeleton
    /// coordinates must start at `(0, 0)`.
    pub fn from_lettered_skeleton(n: u32, sigma: usize, body: &Patch, placement: Placement) -> Result<DecodedMacroTile> {
        let nn = n as usize;
        if body.width() != nn || body.height() != nn || !body.is_full() {
            return undecodable(format!("expected a full {nn}×{nn} body"));
        }
        for (x, y, t) in body.assigned() {
            let base = t / sigma as u32;
            if base >= n * n || skeleton_coords(n, base) != (x as u32, y as u32) {
                return undecodable(format!("cell ({x},{y}) is not at its coordinates"));
            }
        }
        let letters = (0..nn).map(|x| body.get(x, 0).expect("full") % sigma as u32).collect();
        Ok(DecodedMacroTile {
            placement,
            wire_bit: None,
            comp_pattern: Vec::new(),
            fields: BTreeMap::new(),
            letters,
            body: body.clone(),
        })
    }
}

/// Product of `ts` with a letter that every tile passes upwards: tile `(t, a)` has
/// index `t·|Σ| + a`, the horizontal colors of `t` and vertical colors `(c, a)`.
pub fn letter_layer(ts: &TileSet, alphabet: &[&str]) -> Result<TileSet> {
    if alphabet.is_empty() {
        return Err(Error::Config("empty alphabet".into()));
    }
    let s = alphabet.len() as u32;
    let base = ts.colors();
    let v = |c: u32, a: u32| base + c * s + a;
    let mut tiles = Vec::with_capacity(ts.len() * alphabet.len());
    for t in ts.tiles() {
        for (a, name) in alphabet.iter().enumerate() {
            let a = a as u32;
            tiles.push(([t.left.0, t.right.0, v(t.top.0, a), v(t.bottom.0, a)], Some(*name)));
        }
    }
    TileSet::with_letters(format!("{}-letters", ts.name()), base + base * s, &tiles)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuralVerdict {
    /// Every listed condition agrees.
    pub conditions_hold: bool,
    pub bodies_equal: bool,
    /// Conditions that differ.
    pub differing: Vec<String>,
}

impl StructuralVerdict {
    /// Equal conditions must give equal bodies.
    pub fn consistent(&self) -> bool {
        !self.conditions_hold || self.bodies_equal
    }
}

/// Compares two decoded macro-tiles on the position, wire bit, comp pattern,
/// responsibility letters and the named fields. Returns whether the conditions
/// hold (hence bodies should be equal) and whether they actually are.
pub fn structural_equal(a: &DecodedMacroTile, b: &DecodedMacroTile, fields: &[&str]) -> Result<StructuralVerdict> {
    if a.placement.level != b.placement.level {
        return Err(Error::Format(format!(
            "macro-tiles of levels {} and {} cannot be compared",
            a.placement.level, b.placement.level
        )));
    }
    let mut differing = Vec::new();
    let mut cmp = |name: &str, same: bool| {
        if !same {
            differing.push(name.to_string());
        }
    };
    cmp("position in father", a.placement.pos_in_father == b.placement.pos_in_father);
    cmp("father position", a.placement.father_pos == b.placement.father_pos);
    cmp("wire bit", a.wire_bit == b.wire_bit);
    cmp("comp pattern", a.comp_pattern == b.comp_pattern);
    cmp("letters", a.letters == b.letters);
    for f in fields {
        let (x, y) = (a.fields.get(*f), b.fields.get(*f));
        if x.is_none() && y.is_none() {
            return Err(Error::Format(format!("no field `{f}`")));
        }
        cmp(f, x == y);
    }
    Ok(StructuralVerdict { conditions_hold: differing.is_empty(), bodies_equal: a.body == b.body, differing })
}
