use std::fmt;

use crate::error::{input, Error, Result};

use super::tileset::TileSet;

/// A rectangular, possibly partial, assignment of tile indices.
///
/// Cell `(x, y)` lives at `cells[y * width + x]`; `y = 0` is the bottom row.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Patch {
    width: usize,
    height: usize,
    cells: Vec<Option<u32>>,
}

impl Patch {
    pub fn empty(width: usize, height: usize) -> Patch {
        assert!(width > 0 && height > 0, "patch dimensions must be positive");
        Patch { width, height, cells: vec![None; width * height] }
    }

    pub fn filled(width: usize, height: usize, tile: u32) -> Patch {
        assert!(width > 0 && height > 0, "patch dimensions must be positive");
        Patch { width, height, cells: vec![Some(tile); width * height] }
    }

    /// Builds a fully assigned patch from rows listed bottom row first.
    pub fn from_rows(rows: &[Vec<u32>]) -> Result<Patch> {
        let height = rows.len();
        let width = rows.first().map_or(0, Vec::len);
        if width == 0 || rows.iter().any(|r| r.len() != width) {
            return input("rows must be non-empty and of equal length");
        }
        let cells = rows.iter().flat_map(|r| r.iter().map(|&t| Some(t))).collect();
        Ok(Patch { width, height, cells })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> Option<u32> {
        self.cells[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, tile: Option<u32>) {
        self.cells[y * self.width + x] = tile;
    }

    pub fn cells(&self) -> &[Option<u32>] {
        &self.cells
    }

    pub fn is_full(&self) -> bool {
        self.cells.iter().all(Option::is_some)
    }

    pub fn assigned(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        self.cells
            .iter()
            .enumerate()
            .filter_map(move |(i, c)| c.map(|t| (i % self.width, i / self.width, t)))
    }

    /// The `w × h` window whose bottom-left corner is `(x0, y0)`.
    pub fn sub(&self, x0: usize, y0: usize, w: usize, h: usize) -> Patch {
        assert!(x0 + w <= self.width && y0 + h <= self.height);
        let mut out = Patch::empty(w, h);
        for y in 0..h {
            for x in 0..w {
                out.set(x, y, self.get(x0 + x, y0 + y));
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Patch> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Input("empty patch file".into()))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 3 || h[0] != "patch" {
            return input(format!("bad header {header:?}, expected `patch <width> <height>`"));
        }
        let parse = |s: &str| s.parse::<usize>().map_err(|_| Error::Input(format!("bad dimension {s:?}")));
        let (width, height) = (parse(h[1])?, parse(h[2])?);
        if width == 0 || height == 0 {
            return input("patch dimensions must be positive");
        }
        let rows: Vec<&str> = lines.collect();
        if rows.len() != height {
            return input(format!("expected {height} rows, found {}", rows.len()));
        }
        let mut p = Patch::empty(width, height);
        for (r, row) in rows.iter().enumerate() {
            let y = height - 1 - r;
            let fields: Vec<&str> = row.split_whitespace().collect();
            if fields.len() != width {
                return input(format!("row {r} has {} fields, expected {width}", fields.len()));
            }
            for (x, f) in fields.iter().enumerate() {
                let v = if *f == "." {
                    None
                } else {
                    Some(f.parse::<u32>().map_err(|_| Error::Input(format!("bad cell {f:?}")))?)
                };
                p.set(x, y, v);
            }
        }
        Ok(p)
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Patch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "patch {} {}", self.width, self.height)?;
        for y in (0..self.height).rev() {
            let row: Vec<String> = (0..self.width)
                .map(|x| self.get(x, y).map_or_else(|| ".".to_string(), |t| t.to_string()))
                .collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Two adjacent assigned cells whose shared edge disagrees; `b` is right of or above `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub a: (usize, usize),
    pub b: (usize, usize),
}

pub fn validate_patch(ts: &TileSet, p: &Patch) -> Result<Vec<Violation>> {
    for (x, y, t) in p.assigned() {
        if t as usize >= ts.len() {
            return input(format!("cell ({x},{y}) holds tile {t}, the set has {}", ts.len()));
        }
    }
    let mut out = Vec::new();
    for y in 0..p.height() {
        for x in 0..p.width() {
            let Some(a) = p.get(x, y) else { continue };
            let a = ts.tile(a);
            if x + 1 < p.width() {
                if let Some(b) = p.get(x + 1, y) {
                    if a.right != ts.tile(b).left {
                        out.push(Violation { a: (x, y), b: (x + 1, y) });
                    }
                }
            }
            if y + 1 < p.height() {
                if let Some(b) = p.get(x, y + 1) {
                    if a.top != ts.tile(b).bottom {
                        out.push(Violation { a: (x, y), b: (x, y + 1) });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// All offsets `(dx, dy)` at which `needle` appears in `haystack`, ordered by `dy` then `dx`.
pub fn occurrences(haystack: &Patch, needle: &Patch) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    if needle.width() > haystack.width() || needle.height() > haystack.height() {
        return out;
    }
    for dy in 0..=haystack.height() - needle.height() {
        for dx in 0..=haystack.width() - needle.width() {
            let hit = (0..needle.height()).all(|y| {
                (0..needle.width()).all(|x| haystack.get(dx + x, dy + y) == needle.get(x, y))
            });
            if hit {
                out.push((dx, dy));
            }
        }
    }
    out
}

/// Letters of a fully assigned patch, stored like [`Patch`] cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LetterGrid {
    pub width: usize,
    pub height: usize,
    pub letters: Vec<u32>,
    pub column_constant: bool,
}

impl LetterGrid {
    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.letters[y * self.width + x]
    }

    /// The letter of each column, when the grid is column-constant.
    pub fn row_word(&self) -> Option<Vec<u32>> {
        self.column_constant.then(|| self.letters[..self.width].to_vec())
    }
}

pub fn project_letters(ts: &TileSet, p: &Patch) -> Result<LetterGrid> {
    if !ts.has_projection() {
        return Err(Error::Config(format!("tile set {} has no letter projection", ts.name())));
    }
    let mut letters = Vec::with_capacity(p.cells().len());
    for (i, c) in p.cells().iter().enumerate() {
        let t = c.ok_or_else(|| Error::Input(format!("cell {i} of the patch is unassigned")))?;
        if t as usize >= ts.len() {
            return input(format!("tile index {t} out of range"));
        }
        letters.push(ts.tile(t).letter.expect("projection is total"));
    }
    let w = p.width();
    let column_constant = (0..w).all(|x| (1..p.height()).all(|y| letters[y * w + x] == letters[x]));
    Ok(LetterGrid { width: w, height: p.height(), letters, column_constant })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn checkerboard(n: usize) -> Patch {
        let rows: Vec<Vec<u32>> = (0..n).map(|y| (0..n).map(|x| ((x + y) % 2) as u32).collect()).collect();
        Patch::from_rows(&rows).unwrap()
    }

    #[test]
    fn single_cell_is_valid() {
        let ts = TileSet::new("t", 4, &[[0, 1, 2, 3]]).unwrap();
        let mut p = Patch::empty(3, 3);
        p.set(1, 1, Some(0));
        assert!(validate_patch(&ts, &p).unwrap().is_empty());
    }

    #[test]
    fn two_copies_side_by_side_violate() {
        let ts = TileSet::new("t", 4, &[[0, 1, 2, 3]]).unwrap();
        let p = Patch::filled(2, 1, 0);
        assert_eq!(validate_patch(&ts, &p).unwrap(), vec![Violation { a: (0, 0), b: (1, 0) }]);
    }

    #[test]
    fn out_of_range_tile_is_input_error() {
        let ts = TileSet::new("t", 1, &[[0, 0, 0, 0]]).unwrap();
        let p = Patch::filled(1, 1, 5);
        assert!(matches!(validate_patch(&ts, &p), Err(Error::Input(_))));
    }

    #[test]
    fn occurrence_examples() {
        let cb = checkerboard(4);
        assert_eq!(occurrences(&cb, &cb), vec![(0, 0)]);
        assert_eq!(occurrences(&Patch::filled(3, 3, 7), &Patch::filled(1, 1, 7)).len(), 9);
        let needle = cb.sub(0, 0, 2, 2);
        let found = occurrences(&cb, &needle);
        // direct scan oracle
        let mut expect = Vec::new();
        for dy in 0..3 {
            for dx in 0..3 {
                if (dx + dy) % 2 == 0 {
                    expect.push((dx, dy));
                }
            }
        }
        assert_eq!(found, expect);
        assert!(occurrences(&needle, &cb).is_empty());
    }

    #[test]
    fn text_format_is_top_row_first() {
        let p = Patch::parse("patch 2 2\n1 .\n0 3\n").unwrap();
        assert_eq!(p.get(0, 0), Some(0));
        assert_eq!(p.get(1, 0), Some(3));
        assert_eq!(p.get(0, 1), Some(1));
        assert_eq!(p.get(1, 1), None);
        assert_eq!(Patch::parse(&p.to_text()).unwrap(), p);
    }

    #[test]
    fn letters_and_column_constancy() {
        let ts = TileSet::with_letters("l", 2, &[([0, 0, 0, 0], Some("a")), ([0, 0, 0, 0], Some("b"))]).unwrap();
        let cols = Patch::from_rows(&[vec![0, 1], vec![0, 1]]).unwrap();
        assert!(project_letters(&ts, &cols).unwrap().column_constant);
        let mixed = Patch::from_rows(&[vec![0, 1], vec![1, 1]]).unwrap();
        assert!(!project_letters(&ts, &mixed).unwrap().column_constant);
        let bare = TileSet::new("b", 1, &[[0, 0, 0, 0]]).unwrap();
        assert!(matches!(project_letters(&bare, &Patch::filled(1, 1, 0)), Err(Error::Config(_))));
    }

    fn arb_patch(ntiles: u32) -> impl Strategy<Value = Patch> {
        (1usize..6, 1usize..6).prop_flat_map(move |(w, h)| {
            proptest::collection::vec(0..ntiles, w * h).prop_map(move |v| {
                let rows: Vec<Vec<u32>> = v.chunks(w).map(<[u32]>::to_vec).collect();
                Patch::from_rows(&rows).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn valid_subrectangles_stay_valid(p in arb_patch(3), x0 in 0usize..5, y0 in 0usize..5) {
            // colors chosen so that a decent fraction of random patches are valid
            let ts = TileSet::new("s", 2, &[[0, 0, 0, 0], [0, 1, 1, 0], [1, 0, 0, 1]]).unwrap();
            let x0 = x0 % p.width();
            let y0 = y0 % p.height();
            let sub = p.sub(x0, y0, p.width() - x0, p.height() - y0);
            prop_assert!(occurrences(&p, &sub).contains(&(x0, y0)));
            if validate_patch(&ts, &p).unwrap().is_empty() {
                prop_assert!(validate_patch(&ts, &sub).unwrap().is_empty());
            }
        }

        #[test]
        fn text_round_trip(p in arb_patch(20)) {
            prop_assert_eq!(Patch::parse(&p.to_text()).unwrap(), p);
        }
    }
}
