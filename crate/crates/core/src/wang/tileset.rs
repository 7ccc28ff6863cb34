use std::collections::HashSet;
use std::fmt;

use crate::error::{input, Error, Result};

/// Index into the color universe of a [`TileSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColorId(pub u32);

impl fmt::Display for ColorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Position of a neighbour relative to a tile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Left,
    Right,
    Up,
    Down,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::Left, Direction::Right, Direction::Up, Direction::Down];

    pub fn opposite(self) -> Direction {
        match self {
            Direction::Left => Direction::Right,
            Direction::Right => Direction::Left,
            Direction::Up => Direction::Down,
            Direction::Down => Direction::Up,
        }
    }

    /// The side of a tile that faces a neighbour in this direction.
    pub fn side(self) -> Side {
        match self {
            Direction::Left => Side::Left,
            Direction::Right => Side::Right,
            Direction::Up => Side::Top,
            Direction::Down => Side::Bottom,
        }
    }

    pub fn delta(self) -> (isize, isize) {
        match self {
            Direction::Left => (-1, 0),
            Direction::Right => (1, 0),
            Direction::Up => (0, 1),
            Direction::Down => (0, -1),
        }
    }
}

/// One of the four sides of a tile (or of a macro-tile, or of a rectangle).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
    Top,
    Bottom,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Left, Side::Right, Side::Top, Side::Bottom];

    pub fn index(self) -> usize {
        match self {
            Side::Left => 0,
            Side::Right => 1,
            Side::Top => 2,
            Side::Bottom => 3,
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
            Side::Top => Side::Bottom,
            Side::Bottom => Side::Top,
        }
    }
}

/// A unit square with a color on every side and an optional letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Tile {
    pub left: ColorId,
    pub right: ColorId,
    pub top: ColorId,
    pub bottom: ColorId,
    /// Index into [`TileSet::alphabet`].
    pub letter: Option<u32>,
}

impl Tile {
    pub fn new(left: u32, right: u32, top: u32, bottom: u32) -> Tile {
        Tile {
            left: ColorId(left),
            right: ColorId(right),
            top: ColorId(top),
            bottom: ColorId(bottom),
            letter: None,
        }
    }

    pub fn side(&self, side: Side) -> ColorId {
        match side {
            Side::Left => self.left,
            Side::Right => self.right,
            Side::Top => self.top,
            Side::Bottom => self.bottom,
        }
    }

    pub fn quad(&self) -> [u32; 4] {
        [self.left.0, self.right.0, self.top.0, self.bottom.0]
    }
}

/// True iff `b`, placed next to `a` in direction `dir`, shares the color of the common edge.
pub fn tiles_match(a: &Tile, b: &Tile, dir: Direction) -> bool {
    a.side(dir.side()) == b.side(dir.opposite().side())
}

/// A finite set of Wang tiles over the colors `0..colors`.
///
/// Tiles are addressed by their dense index. The quadruple together with the letter
/// is the identity of a tile; duplicates are rejected at construction.
#[derive(Debug, Clone)]
pub struct TileSet {
    name: String,
    colors: u32,
    tiles: Vec<Tile>,
    alphabet: Vec<String>,
    // by_side[side][color] = indices of tiles with that color on that side
    by_side: [Vec<Vec<u32>>; 4],
}

impl PartialEq for TileSet {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.colors == other.colors
            && self.tiles == other.tiles
            && self.alphabet == other.alphabet
    }
}

impl Eq for TileSet {}

impl TileSet {
    /// Builds a letterless tile set from `[left, right, top, bottom]` quadruples.
    pub fn new(name: impl Into<String>, colors: u32, quads: &[[u32; 4]]) -> Result<TileSet> {
        let tiles = quads.iter().map(|q| Tile::new(q[0], q[1], q[2], q[3])).collect();
        TileSet::from_parts(name, colors, tiles, Vec::new())
    }

    /// Builds a tile set where every tile may carry a letter given by name.
    pub fn with_letters(
        name: impl Into<String>,
        colors: u32,
        entries: &[([u32; 4], Option<&str>)],
    ) -> Result<TileSet> {
        let mut alphabet: Vec<String> = Vec::new();
        let mut tiles = Vec::with_capacity(entries.len());
        for (q, letter) in entries {
            let mut t = Tile::new(q[0], q[1], q[2], q[3]);
            if let Some(sym) = letter {
                let idx = match alphabet.iter().position(|a| a == sym) {
                    Some(i) => i,
                    None => {
                        alphabet.push(sym.to_string());
                        alphabet.len() - 1
                    }
                };
                t.letter = Some(idx as u32);
            }
            tiles.push(t);
        }
        TileSet::from_parts(name, colors, tiles, alphabet)
    }

    pub fn from_parts(
        name: impl Into<String>,
        colors: u32,
        tiles: Vec<Tile>,
        alphabet: Vec<String>,
    ) -> Result<TileSet> {
        let name = name.into();
        if name.is_empty() || name.chars().any(char::is_whitespace) {
            return input(format!("tile set name {name:?} must be a non-empty word"));
        }
        let mut seen = HashSet::with_capacity(tiles.len());
        for (i, t) in tiles.iter().enumerate() {
            for c in t.quad() {
                if c >= colors {
                    return input(format!("tile {i} uses color {c} outside 0..{colors}"));
                }
            }
            if let Some(l) = t.letter {
                if l as usize >= alphabet.len() {
                    return input(format!("tile {i} uses letter index {l} outside the alphabet"));
                }
            }
            if !seen.insert((t.quad(), t.letter)) {
                return input(format!("tile {i} duplicates an earlier tile"));
            }
        }
        let mut by_side: [Vec<Vec<u32>>; 4] = Default::default();
        for side in Side::ALL {
            let mut idx = vec![Vec::new(); colors as usize];
            for (i, t) in tiles.iter().enumerate() {
                idx[t.side(side).0 as usize].push(i as u32);
            }
            by_side[side.index()] = idx;
        }
        Ok(TileSet { name, colors, tiles, alphabet, by_side })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn colors(&self) -> u32 {
        self.colors
    }

    pub fn tiles(&self) -> &[Tile] {
        &self.tiles
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn tile(&self, id: u32) -> &Tile {
        &self.tiles[id as usize]
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    /// A letter projection is active when every tile carries a letter.
    pub fn has_projection(&self) -> bool {
        !self.tiles.is_empty() && self.tiles.iter().all(|t| t.letter.is_some())
    }

    pub fn letter_of(&self, id: u32) -> Option<&str> {
        self.tiles[id as usize].letter.map(|l| self.alphabet[l as usize].as_str())
    }

    /// Tiles whose `side` has color `c`, in increasing index order.
    pub fn with_side_color(&self, side: Side, c: ColorId) -> &[u32] {
        self.by_side[side.index()]
            .get(c.0 as usize)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Returns a copy without the tile at `id` (indices above it shift down by one).
    pub fn without_tile(&self, id: u32) -> Result<TileSet> {
        let mut tiles = self.tiles.clone();
        if id as usize >= tiles.len() {
            return input(format!("no tile {id}"));
        }
        tiles.remove(id as usize);
        TileSet::from_parts(format!("{}-minus-{id}", self.name), self.colors, tiles, self.alphabet.clone())
    }

    /// Returns a copy with `extra` appended.
    pub fn with_extra_tiles(&self, name: &str, extra: &[(Tile, Option<&str>)]) -> Result<TileSet> {
        let mut tiles = self.tiles.clone();
        let mut alphabet = self.alphabet.clone();
        for (t, letter) in extra {
            let mut t = *t;
            if let Some(sym) = letter {
                let idx = match alphabet.iter().position(|a| a == sym) {
                    Some(i) => i,
                    None => {
                        alphabet.push(sym.to_string());
                        alphabet.len() - 1
                    }
                };
                t.letter = Some(idx as u32);
            }
            tiles.push(t);
        }
        TileSet::from_parts(name, self.colors, tiles, alphabet)
    }

    /// Parses the line-oriented tile set format.
    pub fn parse(text: &str) -> Result<TileSet> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .enumerate()
            .filter(|(_, l)| !l.is_empty());
        let (_, header) = lines.next().ok_or_else(|| Error::Input("empty tile set file".into()))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 4 || h[0] != "tileset" {
            return input(format!("bad header {header:?}, expected `tileset <name> <ncolors> <ntiles>`"));
        }
        let name = h[1].to_string();
        let colors: u32 = parse_num(h[2], "ncolors")?;
        let ntiles: usize = parse_num(h[3], "ntiles")?;
        let mut entries: Vec<([u32; 4], Option<String>)> = Vec::with_capacity(ntiles);
        for (lineno, line) in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f[0] != "tile" || !(f.len() == 6 || f.len() == 7) {
                return input(format!("line {}: expected `tile <id> <l> <r> <t> <b> [letter=<s>]`", lineno + 1));
            }
            let id: usize = parse_num(f[1], "tile id")?;
            if id != entries.len() {
                return input(format!("line {}: tile id {id} out of order", lineno + 1));
            }
            let mut q = [0u32; 4];
            for (k, v) in f[2..6].iter().enumerate() {
                q[k] = parse_num(v, "color")?;
            }
            let letter = match f.get(6) {
                None => None,
                Some(s) => match s.strip_prefix("letter=") {
                    Some(sym) if !sym.is_empty() => Some(sym.to_string()),
                    _ => return input(format!("line {}: bad letter field {s:?}", lineno + 1)),
                },
            };
            entries.push((q, letter));
        }
        if entries.len() != ntiles {
            return input(format!("header announces {ntiles} tiles, found {}", entries.len()));
        }
        let borrowed: Vec<([u32; 4], Option<&str>)> =
            entries.iter().map(|(q, l)| (*q, l.as_deref())).collect();
        TileSet::with_letters(name, colors, &borrowed)
    }

    /// Serialises to the text format accepted by [`TileSet::parse`].
    pub fn to_text(&self) -> String {
        let mut out = format!("tileset {} {} {}\n", self.name, self.colors, self.tiles.len());
        for (i, t) in self.tiles.iter().enumerate() {
            out.push_str(&format!("tile {i} {} {} {} {}", t.left, t.right, t.top, t.bottom));
            if let Some(l) = t.letter {
                out.push_str(&format!(" letter={}", self.alphabet[l as usize]));
            }
            out.push('\n');
        }
        out
    }
}

fn parse_num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Input(format!("cannot parse {what} from {s:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matching_examples() {
        let a = Tile::new(0, 1, 2, 3);
        assert!(tiles_match(&a, &Tile::new(1, 7, 8, 9), Direction::Right));
        assert!(!tiles_match(&a, &Tile::new(5, 7, 8, 9), Direction::Right));
        // a.top = 2 has to meet b.bottom
        assert!(!tiles_match(&a, &Tile::new(4, 5, 3, 6), Direction::Up));
        assert!(tiles_match(&a, &Tile::new(4, 5, 3, 2), Direction::Up));
    }

    #[test]
    fn matching_agrees_with_side_enumeration() {
        // two-tile set over 3 colors: compare against a table of facing sides
        let ts = [Tile::new(0, 1, 2, 0), Tile::new(1, 0, 0, 2)];
        for a in &ts {
            for b in &ts {
                let facing = [
                    (Direction::Right, a.right, b.left),
                    (Direction::Left, a.left, b.right),
                    (Direction::Up, a.top, b.bottom),
                    (Direction::Down, a.bottom, b.top),
                ];
                for (dir, x, y) in facing {
                    assert_eq!(tiles_match(a, b, dir), x == y);
                    assert_eq!(tiles_match(a, b, dir), tiles_match(b, a, dir.opposite()));
                }
            }
        }
    }

    #[test]
    fn duplicates_rejected_unless_letters_differ() {
        assert!(TileSet::new("d", 1, &[[0, 0, 0, 0], [0, 0, 0, 0]]).is_err());
        let ts = TileSet::with_letters("d", 1, &[([0, 0, 0, 0], Some("a")), ([0, 0, 0, 0], Some("b"))]).unwrap();
        assert!(ts.has_projection());
        assert_eq!(ts.letter_of(1), Some("b"));
    }

    #[test]
    fn out_of_range_color_rejected() {
        assert!(matches!(TileSet::new("x", 2, &[[0, 1, 2, 0]]), Err(Error::Input(_))));
    }

    #[test]
    fn text_round_trip() {
        let ts = TileSet::with_letters(
            "demo",
            3,
            &[([0, 1, 2, 0], Some("a")), ([1, 0, 0, 2], None), ([2, 2, 2, 2], Some("b"))],
        )
        .unwrap();
        let back = TileSet::parse(&ts.to_text()).unwrap();
        assert_eq!(ts, back);
    }

    #[test]
    fn parse_rejects_out_of_order_ids() {
        let text = "tileset t 2 2\ntile 1 0 0 0 0\ntile 0 1 1 1 1\n";
        assert!(TileSet::parse(text).is_err());
    }

    #[test]
    fn parse_skips_comments() {
        let text = "# a comment\ntileset t 2 1 # trailing\n\ntile 0 0 1 1 0 letter=x\n";
        let ts = TileSet::parse(text).unwrap();
        assert_eq!(ts.len(), 1);
        assert_eq!(ts.letter_of(0), Some("x"));
    }
}
