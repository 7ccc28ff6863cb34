use crate::error::{Error, Result};

use super::patch::Patch;
use super::tileset::{ColorId, Side, TileSet};

/// Side color sequences of a block. Left and right read bottom to top,
/// top and bottom read left to right.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MacroColors {
    pub left: Vec<ColorId>,
    pub right: Vec<ColorId>,
    pub top: Vec<ColorId>,
    pub bottom: Vec<ColorId>,
}

impl MacroColors {
    pub fn side(&self, side: Side) -> &[ColorId] {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
            Side::Top => &self.top,
            Side::Bottom => &self.bottom,
        }
    }

    pub fn of_body(ts: &TileSet, body: &Patch) -> MacroColors {
        let (w, h) = (body.width(), body.height());
        let t = |x: usize, y: usize| ts.tile(body.get(x, y).expect("macro-tile body must be fully assigned"));
        MacroColors {
            left: (0..h).map(|y| t(0, y).left).collect(),
            right: (0..h).map(|y| t(w - 1, y).right).collect(),
            top: (0..w).map(|x| t(x, h - 1).top).collect(),
            bottom: (0..w).map(|x| t(x, 0).bottom).collect(),
        }
    }
}

/// An `n × n` block cut out of a patch together with its macro-colors.
///
/// The body is not required to be valid: cutting works on any fully assigned patch,
/// and [`MacroTile::is_valid`] tells whether the block is a genuine macro-tile.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MacroTile {
    pub n: usize,
    pub body: Patch,
    pub colors: MacroColors,
}

impl MacroTile {
    pub fn new(ts: &TileSet, body: Patch) -> Result<MacroTile> {
        if body.width() != body.height() || !body.is_full() {
            return Err(Error::Input("macro-tile body must be a fully assigned square".into()));
        }
        let colors = MacroColors::of_body(ts, &body);
        Ok(MacroTile { n: body.width(), body, colors })
    }

    pub fn is_valid(&self, ts: &TileSet) -> bool {
        super::validate_patch(ts, &self.body).is_ok_and(|v| v.is_empty())
    }

    /// Macro-level matching: `other` sits next to `self` in direction `dir`.
    pub fn matches(&self, other: &MacroTile, dir: super::Direction) -> bool {
        let s = dir.side();
        self.colors.side(s) == other.colors.side(s.opposite())
    }
}

/// Blocks of a lattice cut, stored row-major with row `0` at the bottom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockGrid {
    pub n: usize,
    pub cols: usize,
    pub rows: usize,
    pub blocks: Vec<MacroTile>,
}

impl BlockGrid {
    pub fn block(&self, bx: usize, by: usize) -> &MacroTile {
        &self.blocks[by * self.cols + bx]
    }

    /// Glues the blocks back together.
    pub fn flatten(&self) -> Patch {
        let mut p = Patch::empty(self.cols * self.n, self.rows * self.n);
        for by in 0..self.rows {
            for bx in 0..self.cols {
                let b = &self.block(bx, by).body;
                for y in 0..self.n {
                    for x in 0..self.n {
                        p.set(bx * self.n + x, by * self.n + y, b.get(x, y));
                    }
                }
            }
        }
        p
    }
}

/// Cuts `p` along the lattice `x ≡ ox, y ≡ oy (mod n)`; every cell must fall into a complete block.
pub fn split_into_blocks(ts: &TileSet, p: &Patch, n: usize, offset: (usize, usize)) -> Result<BlockGrid> {
    if n == 0 {
        return Err(Error::Input("block size must be positive".into()));
    }
    if !p.is_full() {
        return Err(Error::Input("patch must be fully assigned".into()));
    }
    let (ox, oy) = (offset.0 % n, offset.1 % n);
    // an offset > 0 leaves a partial strip of width ox at the left (resp. bottom)
    if ox != 0 || oy != 0 {
        return Err(Error::Boundary { bx: 0, by: 0 });
    }
    if p.width() % n != 0 {
        return Err(Error::Boundary { bx: p.width() / n, by: 0 });
    }
    if p.height() % n != 0 {
        return Err(Error::Boundary { bx: 0, by: p.height() / n });
    }
    cut(ts, p, n, 0, 0, p.width() / n, p.height() / n)
}

/// Like [`split_into_blocks`] but keeps only the complete blocks, dropping partial
/// strips at the borders. Fails when no complete block fits.
pub fn split_interior(ts: &TileSet, p: &Patch, n: usize, offset: (usize, usize)) -> Result<BlockGrid> {
    if n == 0 || !p.is_full() {
        return Err(Error::Input("need n > 0 and a fully assigned patch".into()));
    }
    let (ox, oy) = (offset.0 % n, offset.1 % n);
    let cols = p.width().saturating_sub(ox) / n;
    let rows = p.height().saturating_sub(oy) / n;
    if cols == 0 || rows == 0 {
        return Err(Error::Boundary { bx: 0, by: 0 });
    }
    cut(ts, p, n, ox, oy, cols, rows)
}

fn cut(ts: &TileSet, p: &Patch, n: usize, ox: usize, oy: usize, cols: usize, rows: usize) -> Result<BlockGrid> {
    let mut blocks = Vec::with_capacity(cols * rows);
    for by in 0..rows {
        for bx in 0..cols {
            let body = p.sub(ox + bx * n, oy + by * n, n, n);
            blocks.push(MacroTile::new(ts, body)?);
        }
    }
    Ok(BlockGrid { n, cols, rows, blocks })
}

#[cfg(test)]
mod tests {
    use super::super::{validate_patch, Direction};
    use super::*;
    use proptest::prelude::*;

    fn three_color_set() -> TileSet {
        let mut quads = Vec::new();
        for l in 0..2 {
            for r in 0..2 {
                for t in 0..2 {
                    for b in 0..2 {
                        quads.push([l, r, t, b]);
                    }
                }
            }
        }
        TileSet::new("all16", 2, &quads).unwrap()
    }

    #[test]
    fn six_by_six_examples() {
        let ts = three_color_set();
        let p = Patch::filled(6, 6, 0);
        let g = split_into_blocks(&ts, &p, 3, (0, 0)).unwrap();
        assert_eq!((g.cols, g.rows), (2, 2));
        assert!(matches!(split_into_blocks(&ts, &p, 4, (0, 0)), Err(Error::Boundary { .. })));
        assert!(matches!(split_into_blocks(&ts, &p, 3, (1, 0)), Err(Error::Boundary { .. })));
        let inner = split_interior(&ts, &p, 3, (1, 2)).unwrap();
        assert_eq!((inner.cols, inner.rows), (1, 1));
    }

    fn arb_square(ntiles: u32, side: usize) -> impl Strategy<Value = Patch> {
        proptest::collection::vec(0..ntiles, side * side).prop_map(move |v| {
            let rows: Vec<Vec<u32>> = v.chunks(side).map(<[u32]>::to_vec).collect();
            Patch::from_rows(&rows).unwrap()
        })
    }

    proptest! {
        #[test]
        fn flatten_round_trip(n in 1usize..4, p in arb_square(16, 6)) {
            let ts = three_color_set();
            if 6 % n == 0 {
                let g = split_into_blocks(&ts, &p, n, (0, 0)).unwrap();
                prop_assert_eq!(g.flatten(), p);
            }
        }

        #[test]
        fn macro_matching_iff_tile_matching(n in 1usize..4, seed in any::<u64>()) {
            // 2n × 2n patch whose blocks are internally valid; check that macro-colors
            // agree exactly when the tiles across the block boundary match
            use rand::{Rng, SeedableRng};
            let ts = three_color_set();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let side = 2 * n;
            let rows: Vec<Vec<u32>> = (0..side).map(|_| (0..side).map(|_| rng.gen_range(0..16)).collect()).collect();
            let p = Patch::from_rows(&rows).unwrap();
            let g = split_into_blocks(&ts, &p, n, (0, 0)).unwrap();
            let viol = validate_patch(&ts, &p).unwrap();
            let crosses_right = |by: usize| viol.iter().any(|v| v.a.0 == n - 1 && v.b.0 == n && v.a.1 / n == by);
            let crosses_up = |bx: usize| viol.iter().any(|v| v.a.1 == n - 1 && v.b.1 == n && v.a.0 / n == bx);
            for by in 0..2 {
                prop_assert_eq!(g.block(0, by).matches(g.block(1, by), Direction::Right), !crosses_right(by));
            }
            for bx in 0..2 {
                prop_assert_eq!(g.block(bx, 0).matches(g.block(bx, 1), Direction::Up), !crosses_up(bx));
            }
        }
    }
}
