//! Compiling a check program and macro-tile geometry into a tile set.
//!
//! A compiled tile set has four kinds of cells: skeleton cells that only know their
//! coordinates modulo `N`, communication wires carrying one macro-color bit each,
//! the input row holding the program text in its read-only layer, and the
//! computation zone where a universal machine checks the bits. The quasiperiodic
//! variant adds diversification slots in the free zone above the computation zone.

mod compile;
mod layout;
mod program;
mod structure;
mod verify;

pub use compile::{compile, intended_rho, slot_demand, Compiled, EdgeKey, Payload, TileInfo, TileKind};
pub use layout::{
    layout, quasiperiodic_upgrade, zone_role, Field, InputCol, LayoutAudit, MacroLayout, Rect, Role, Slot, Wire, ZoneRole,
    SPACING,
};
pub use program::{
    self_referential_program, universal_machine, Instr, ProgramBundle, ProgramTemplate, U_ACCEPT, U_END,
};
pub use structure::{letter_layer, structural_equal, DecodedMacroTile, Placement, StructuralVerdict};
pub use verify::{verify_simulation, Check, LayoutCodec, MacroCodec, SimReport, SkeletonCodec, VerifyOptions};

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::wang::TileSet;

/// `N²` tiles; tile `(i, j)` sits at index `j·N + i` and its colors encode the
/// coordinates of its edges, so any valid patch increments `i` to the right and
/// `j` upwards modulo `N`.
pub fn skeleton_tiles(n: u32) -> Result<TileSet> {
    if n < 2 {
        return Err(Error::Sizing(format!("skeleton needs N ≥ 2, got {n}")));
    }
    let h = |i: u32, j: u32| j * n + i;
    let v = |i: u32, j: u32| n * n + j * n + i;
    let mut quads = Vec::with_capacity((n * n) as usize);
    for j in 0..n {
        for i in 0..n {
            quads.push([h(i, j), h((i + 1) % n, j), v(i, (j + 1) % n), v(i, j)]);
        }
    }
    TileSet::new(format!("skeleton{n}"), 2 * n * n, &quads)
}

/// Coordinates `(i, j)` of a skeleton tile index.
pub fn skeleton_coords(n: u32, tile: u32) -> (u32, u32) {
    (tile % n, tile / n)
}

/// Zoom factors per level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZoomSchedule {
    /// `N_k = 3^(C^k)`.
    Doubly { c: u32 },
    /// `N_k = n` at every level (toy schedules).
    Constant { n: u64 },
}

impl ZoomSchedule {
    pub fn n(&self, k: u32) -> BigUint {
        match *self {
            ZoomSchedule::Doubly { c } => BigUint::from(3u32).pow(BigUint::from(c).pow(k).try_into().unwrap_or(u32::MAX)),
            ZoomSchedule::Constant { n } => BigUint::from(n),
        }
    }

    /// `L_k = N_1 · … · N_k`, with `L_0 = 1`.
    pub fn l(&self, k: u32) -> BigUint {
        (1..=k).fold(BigUint::one(), |acc, i| acc * self.n(i))
    }

    pub fn n_u64(&self, k: u32) -> Option<u64> {
        u64::try_from(self.n(k)).ok()
    }

    pub fn l_u64(&self, k: u32) -> Option<u64> {
        u64::try_from(self.l(k)).ok()
    }

    /// Side of the computation zone at level `k`: `⌈log2 N_k⌉³`, capped at `N_k − 1`.
    pub fn m(&self, k: u32) -> BigUint {
        let n = self.n(k);
        let bits = BigUint::from(n.bits());
        let cube = bits.pow(3);
        let cap = &n - 1u32;
        cube.min(cap)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{solve_patch, torus_exists, Mode, SolveRequest, Status};
    use crate::wang::{split_interior, Patch};

    #[test]
    fn skeleton_sizes() {
        assert_eq!(skeleton_tiles(2).unwrap().len(), 4);
        assert_eq!(skeleton_tiles(3).unwrap().len(), 9);
        assert!(skeleton_tiles(1).is_err());
    }

    #[test]
    fn skeleton_tori() {
        let s = skeleton_tiles(3).unwrap();
        assert_eq!(torus_exists(&s, 3, 3, 1_000_000).unwrap().0, Status::Sat);
        assert_eq!(torus_exists(&s, 2, 2, 1_000_000).unwrap().0, Status::Unsat);
    }

    #[test]
    fn columns_repeat_with_period_n() {
        for n in 2..5u32 {
            let s = skeleton_tiles(n).unwrap();
            let w = n as usize + 1;
            let r = solve_patch(&SolveRequest::new(&s, w, 2).mode(Mode::Enumerate)).unwrap();
            assert_eq!(r.count, (n * n) as u128);
            for p in &r.patches {
                for y in 0..2 {
                    let (a, b) = (p.get(0, y).unwrap(), p.get(n as usize, y).unwrap());
                    assert_eq!(skeleton_coords(n, a), skeleton_coords(n, b));
                }
            }
        }
    }

    #[test]
    fn exactly_one_offset_is_coordinate_consistent() {
        let n = 3u32;
        let s = skeleton_tiles(n).unwrap();
        let r = solve_patch(&SolveRequest::new(&s, 7, 6).mode(Mode::Enumerate)).unwrap();
        for p in &r.patches {
            let good: Vec<(usize, usize)> = (0..n as usize)
                .flat_map(|ox| (0..n as usize).map(move |oy| (ox, oy)))
                .filter(|&off| consistent(&s, p, n, off))
                .collect();
            assert_eq!(good.len(), 1);
        }
    }

    fn consistent(s: &TileSet, p: &Patch, n: u32, off: (usize, usize)) -> bool {
        let g = split_interior(s, p, n as usize, off).unwrap();
        g.blocks.iter().all(|b| {
            (0..n as usize).all(|y| (0..n as usize).all(|x| skeleton_coords(n, b.body.get(x, y).unwrap()) == (x as u32, y as u32)))
        })
    }

    #[test]
    fn zoom_schedule_values() {
        let z = ZoomSchedule::Doubly { c: 2 };
        assert_eq!(z.n_u64(1), Some(9));
        assert_eq!(z.n_u64(2), Some(81));
        assert_eq!(z.l_u64(2), Some(729));
        for k in 1..4 {
            assert_eq!(z.l(k), z.l(k - 1) * z.n(k));
        }
        assert_eq!(ZoomSchedule::Constant { n: 5 }.l_u64(3), Some(125));
    }
}
