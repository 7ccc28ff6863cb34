use std::collections::HashMap;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::compile::{Compiled, EdgeKey, Payload};
use crate::error::{Error, Result};
use crate::solver::{solve_patch, Mode, SolveRequest, Status};
use crate::wang::{ColorId, Direction, MacroTile, Side, TileSet};

/// Reads and writes macro-colors: a side of an `N×N` macro-tile, as a color
/// sequence, against a color of the simulated set.
pub trait MacroCodec {
    fn decode(&self, side: Side, seq: &[ColorId]) -> Option<u32>;
    fn encode(&self, side: Side, color: u32) -> Option<Vec<ColorId>>;
    /// Tile that must sit in the bottom-left corner of every macro-tile.
    fn anchor(&self, tau: &TileSet) -> Option<u32>;
}

/// Macro-colors of bare skeleton tiles: the only macro-color is 0, the coordinate
/// sequence of the border.
#[derive(Debug, Clone, Copy)]
pub struct SkeletonCodec {
    pub n: u32,
}

impl SkeletonCodec {
    fn expected(&self, side: Side) -> Vec<ColorId> {
        let n = self.n;
        (0..n)
            .map(|i| match side {
                Side::Left | Side::Right => ColorId(i * n),
                Side::Top | Side::Bottom => ColorId(n * n + i),
            })
            .collect()
    }
}

impl MacroCodec for SkeletonCodec {
    fn decode(&self, side: Side, seq: &[ColorId]) -> Option<u32> {
        (seq == self.expected(side).as_slice()).then_some(0)
    }

    fn encode(&self, side: Side, color: u32) -> Option<Vec<ColorId>> {
        (color == 0).then(|| self.expected(side))
    }

    fn anchor(&self, tau: &TileSet) -> Option<u32> {
        let n = self.n;
        let want = [0, 1 % n, n * n + n % (n * n), n * n];
        tau.tiles().iter().position(|t| t.quad() == want).map(|i| i as u32)
    }
}

/// Macro-colors of a compiled set: side words carried by the wires.
pub struct LayoutCodec<'a> {
    pub compiled: &'a Compiled,
}

impl LayoutCodec<'_> {
    fn key(&self, side: Side, i: usize, payload: Payload) -> EdgeKey {
        match side {
            Side::Left | Side::Right => EdgeKey { across: true, x: 0, y: i as u32, payload },
            Side::Top | Side::Bottom => EdgeKey { across: false, x: i as u32, y: 0, payload },
        }
    }
}

impl MacroCodec for LayoutCodec<'_> {
    fn decode(&self, side: Side, seq: &[ColorId]) -> Option<u32> {
        let l = &self.compiled.layout;
        if seq.len() != l.n {
            return None;
        }
        let bit_at: HashMap<usize, usize> = l.side_positions.iter().enumerate().map(|(b, &p)| (p, b)).collect();
        let mut word = 0u32;
        for (i, c) in seq.iter().enumerate() {
            let k = *self.compiled.keys.get(c.0 as usize)?;
            let payload = match bit_at.get(&i) {
                Some(&b) => match k.payload {
                    Payload::Wire(v) => {
                        word |= (v as u32) << b;
                        k.payload
                    }
                    _ => return None,
                },
                None => Payload::Plain,
            };
            if k != self.key(side, i, payload) {
                return None;
            }
        }
        Some(word)
    }

    fn encode(&self, side: Side, color: u32) -> Option<Vec<ColorId>> {
        let l = &self.compiled.layout;
        if color >> l.k_bits != 0 {
            return None;
        }
        let mut payloads = vec![Payload::Plain; l.n];
        for (b, &p) in l.side_positions.iter().enumerate() {
            payloads[p] = Payload::Wire(((color >> b) & 1) as u8);
        }
        payloads
            .into_iter()
            .enumerate()
            .map(|(i, p)| self.compiled.color(&self.key(side, i, p)).map(ColorId))
            .collect()
    }

    fn anchor(&self, _tau: &TileSet) -> Option<u32> {
        self.compiled.plain_tile(0, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Check {
    Pass,
    Fail(String),
    /// The budget ran out or enumeration was truncated before a verdict.
    Unverified(String),
}

impl Check {
    pub fn label(&self) -> &'static str {
        match self {
            Check::Pass => "pass",
            Check::Fail(_) => "fail",
            Check::Unverified(_) => "unverified",
        }
    }

    pub fn passed(&self) -> bool {
        *self == Check::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimReport {
    /// Every ρ-tile has a τ-macro-tile with its macro-colors.
    pub constructive: Check,
    /// Every valid τ-macro-tile decodes to a ρ-tile.
    pub soundness: Check,
    /// Macro-tiles match exactly when their ρ-tiles match.
    pub faithfulness: Check,
    pub macro_tiles: usize,
    pub pairs_checked: usize,
    pub nodes: u64,
}

impl SimReport {
    pub fn passed(&self) -> bool {
        self.constructive.passed() && self.soundness.passed() && self.faithfulness.passed()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub budget: u64,
    /// Cap on enumerated macro-tiles.
    pub max_macro_tiles: usize,
    /// Pairs for the matching check; all pairs are used when there are fewer.
    pub pair_samples: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { budget: 10_000_000, max_macro_tiles: 4096, pair_samples: 2000, seed: 0 }
    }
}

/// Checks that `tau` implements a set of `n×n` macro-tiles isomorphic to `rho`
/// under `codec`.
pub fn verify_simulation(
    tau: &TileSet,
    rho: &TileSet,
    n: usize,
    codec: &dyn MacroCodec,
    opts: VerifyOptions,
) -> Result<SimReport> {
    if n == 0 {
        return Err(Error::Input("zoom must be positive".into()));
    }
    let mut nodes = 0u64;
    let left = |nodes: u64| opts.budget.saturating_sub(nodes);
    let anchor = codec.anchor(tau);

    // (a)
    let mut constructive = Check::Pass;
    'rho: for (i, r) in rho.tiles().iter().enumerate() {
        let Some(anchor) = anchor else {
            constructive = Check::Fail("τ has no corner tile".into());
            break;
        };
        let mut req = SolveRequest::new(tau, n, n).budget(left(nodes)).fix(0, 0, anchor);
        for side in Side::ALL {
            match codec.encode(side, r.side(side).0) {
                Some(seq) => req = req.side_colors(side, &seq),
                None => {
                    constructive = Check::Fail(format!("ρ tile {i}: {side:?} color has no encoding"));
                    break 'rho;
                }
            }
        }
        let res = solve_patch(&req)?;
        nodes += res.nodes;
        match res.status {
            Status::Sat => {}
            Status::Unsat => {
                constructive = Check::Fail(format!("ρ tile {i} has no macro-tile"));
                break;
            }
            Status::BudgetExhausted => {
                constructive = Check::Unverified(format!("budget ran out at ρ tile {i}"));
                break;
            }
        }
    }

    // (b)
    let mut macro_tiles: Vec<(MacroTile, [u32; 4])> = Vec::new();
    let soundness = match anchor {
        None => Check::Fail("τ has no corner tile".into()),
        Some(anchor) => {
            let mut req = SolveRequest::new(tau, n, n).mode(Mode::Enumerate).budget(left(nodes)).fix(0, 0, anchor);
            req.max_solutions = Some(opts.max_macro_tiles);
            let res = solve_patch(&req)?;
            nodes += res.nodes;
            let rho_quads: std::collections::HashSet<[u32; 4]> = rho.tiles().iter().map(|t| t.quad()).collect();
            let mut verdict = Check::Pass;
            for body in res.patches {
                let mt = MacroTile::new(tau, body)?;
                let mut q = [0u32; 4];
                let mut ok = true;
                for side in Side::ALL {
                    match codec.decode(side, mt.colors.side(side)) {
                        Some(c) => q[side.index()] = c,
                        None => ok = false,
                    }
                }
                if !ok {
                    verdict = Check::Fail(format!("macro-tile {} has an undecodable side", macro_tiles.len()));
                    break;
                }
                if !rho_quads.contains(&q) {
                    verdict = Check::Fail(format!("macro-tile decodes to {q:?}, not a ρ tile"));
                    break;
                }
                macro_tiles.push((mt, q));
            }
            if verdict == Check::Pass {
                if res.status == Status::BudgetExhausted {
                    verdict = Check::Unverified("budget ran out during enumeration".into());
                } else if res.truncated {
                    verdict = Check::Unverified(format!("enumeration stopped at {} macro-tiles", opts.max_macro_tiles));
                } else if macro_tiles.is_empty() && !rho.is_empty() {
                    verdict = Check::Fail("no macro-tiles at all".into());
                }
            }
            verdict
        }
    };

    // (c)
    let total = macro_tiles.len() * macro_tiles.len();
    let pairs: Vec<(usize, usize)> = if total <= opts.pair_samples {
        (0..total).map(|i| (i / macro_tiles.len(), i % macro_tiles.len())).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        sample(&mut rng, total, opts.pair_samples)
            .into_iter()
            .map(|i| (i / macro_tiles.len(), i % macro_tiles.len()))
            .collect()
    };
    let mut faithfulness = if macro_tiles.is_empty() {
        Check::Unverified("no macro-tiles to pair".into())
    } else {
        Check::Pass
    };
    for &(a, b) in &pairs {
        let (ma, qa) = &macro_tiles[a];
        let (mb, qb) = &macro_tiles[b];
        for dir in [Direction::Right, Direction::Up] {
            let s = dir.side();
            let small = qa[s.index()] == qb[s.opposite().index()];
            if ma.matches(mb, dir) != small {
                faithfulness = Check::Fail(format!("pair ({a},{b}) {dir:?}: macro {} vs ρ {small}", ma.matches(mb, dir)));
            }
        }
        if !faithfulness.passed() {
            break;
        }
    }
    Ok(SimReport {
        constructive,
        soundness,
        faithfulness,
        macro_tiles: macro_tiles.len(),
        pairs_checked: pairs.len(),
        nodes,
    })
}
