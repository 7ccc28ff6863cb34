use std::collections::HashMap;

use super::{Config, Move, TMachine, BLANK};
use crate::error::{Error, Result};
use crate::solver::{solve_patch, Mode, SolveRequest, SolveResult};
use crate::wang::{ColorId, Patch, Side, Tile, TileSet};

/// Content of one tape cell at one moment: the symbol, the head (with its state)
/// if it is here, and the read-only bit. Carried on top and bottom edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub sym: u32,
    pub head: Option<u32>,
    pub ro: u8,
}

/// What crosses a vertical edge during one step: nothing, or the head moving
/// right (resp. left) in the given state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Signal {
    None,
    Right(u32),
    Left(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DiagramKind {
    Passive,
    Head,
    /// The head arrives through the left edge.
    FromLeft,
    /// The head arrives through the right edge.
    FromRight,
    /// The accepting head stays put forever.
    Halted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DiagramTile {
    pub bottom: Cell,
    pub top: Cell,
    pub left: Signal,
    pub right: Signal,
    pub kind: DiagramKind,
}

/// All tile kinds of the space-time diagram of `m`, in a fixed order.
pub fn diagram_kinds(m: &TMachine) -> Vec<DiagramTile> {
    let ros: &[u8] = if m.uses_ro { &[0, 1] } else { &[0] };
    let mut out = Vec::new();
    for &ro in ros {
        for a in 0..m.symbols {
            let plain = Cell { sym: a, head: None, ro };
            out.push(DiagramTile { bottom: plain, top: plain, left: Signal::None, right: Signal::None, kind: DiagramKind::Passive });
        }
        for q in 0..m.states {
            for a in 0..m.symbols {
                let here = Cell { sym: a, head: Some(q), ro };
                let plain = Cell { sym: a, head: None, ro };
                if q == m.accept {
                    out.push(DiagramTile { bottom: here, top: here, left: Signal::None, right: Signal::None, kind: DiagramKind::Halted });
                    continue;
                }
                // a cell without the head may receive it from either side in state q
                out.push(DiagramTile {
                    bottom: plain,
                    top: here,
                    left: Signal::Right(q),
                    right: Signal::None,
                    kind: DiagramKind::FromLeft,
                });
                out.push(DiagramTile {
                    bottom: plain,
                    top: here,
                    left: Signal::None,
                    right: Signal::Left(q),
                    kind: DiagramKind::FromRight,
                });
                let Some(act) = m.step(q, a, ro) else { continue };
                let written = Cell { sym: act.write, head: None, ro };
                let t = match act.mv {
                    Move::S => DiagramTile {
                        bottom: here,
                        top: Cell { head: Some(act.state), ..written },
                        left: Signal::None,
                        right: Signal::None,
                        kind: DiagramKind::Head,
                    },
                    Move::R => DiagramTile {
                        bottom: here,
                        top: written,
                        left: Signal::None,
                        right: Signal::Right(act.state),
                        kind: DiagramKind::Head,
                    },
                    Move::L => DiagramTile {
                        bottom: here,
                        top: written,
                        left: Signal::Left(act.state),
                        right: Signal::None,
                        kind: DiagramKind::Head,
                    },
                };
                out.push(t);
            }
        }
    }
    // receivers for states that never get entered are harmless but useless
    out.sort();
    out.dedup();
    out
}

/// Diagram tiles of a machine together with the frame interface.
#[derive(Debug, Clone)]
pub struct DiagramTiles {
    pub machine: TMachine,
    pub tileset: TileSet,
    pub kinds: Vec<DiagramTile>,
    cell_ids: HashMap<Cell, u32>,
    signal_ids: HashMap<Signal, u32>,
    cells: Vec<Cell>,
}

pub fn diagram_tiles(m: &TMachine) -> DiagramTiles {
    let ros: &[u8] = if m.uses_ro { &[0, 1] } else { &[0] };
    let mut cells = Vec::new();
    for &ro in ros {
        for sym in 0..m.symbols {
            cells.push(Cell { sym, head: None, ro });
            for q in 0..m.states {
                cells.push(Cell { sym, head: Some(q), ro });
            }
        }
    }
    let cell_ids: HashMap<Cell, u32> = cells.iter().enumerate().map(|(i, c)| (*c, i as u32)).collect();
    let mut signals = vec![Signal::None];
    for q in 0..m.states {
        signals.push(Signal::Right(q));
        signals.push(Signal::Left(q));
    }
    let base = cells.len() as u32;
    let signal_ids: HashMap<Signal, u32> = signals.iter().enumerate().map(|(i, s)| (*s, base + i as u32)).collect();
    let kinds = diagram_kinds(m);
    let quads: Vec<[u32; 4]> = kinds
        .iter()
        .map(|k| [signal_ids[&k.left], signal_ids[&k.right], cell_ids[&k.top], cell_ids[&k.bottom]])
        .collect();
    let tileset = TileSet::new(format!("diagram-{}", m.name), base + signals.len() as u32, &quads)
        .expect("diagram tiles are distinct and in range");
    DiagramTiles { machine: m.clone(), tileset, kinds, cell_ids, signal_ids, cells }
}

impl DiagramTiles {
    pub fn cell_color(&self, c: &Cell) -> ColorId {
        ColorId(self.cell_ids[c])
    }

    pub fn signal_color(&self, s: &Signal) -> ColorId {
        ColorId(self.signal_ids[s])
    }

    pub fn cell_of(&self, c: ColorId) -> Option<Cell> {
        self.cells.get(c.0 as usize).copied()
    }

    /// Edge colors of the initial configuration on a window of `size` cells.
    pub fn input_row(&self, input: &[u32], ro: Option<&[u8]>, size: usize) -> Result<Vec<ColorId>> {
        if input.len() > size {
            return Err(Error::Input("input longer than the frame".into()));
        }
        if ro.is_some_and(|r| r.len() < size) {
            return Err(Error::Input("read-only layer shorter than the frame".into()));
        }
        (0..size)
            .map(|x| {
                let sym = input.get(x).copied().unwrap_or(BLANK);
                if sym >= self.machine.symbols {
                    return Err(Error::Input(format!("symbol {sym} outside the alphabet")));
                }
                let ro = if self.machine.uses_ro { ro.map_or(0, |r| r[x]) } else { 0 };
                let head = (x == 0).then_some(self.machine.start);
                Ok(self.cell_color(&Cell { sym, head, ro }))
            })
            .collect()
    }

    /// Colors allowed on the top edge of a frame: no head, or the accepting head.
    pub fn accepting_top(&self) -> Vec<ColorId> {
        self.cells
            .iter()
            .filter(|c| c.head.is_none() || c.head == Some(self.machine.accept))
            .map(|c| self.cell_color(c))
            .collect()
    }

    /// A `size × size` frame: input on the bottom, inert walls, accepting top.
    pub fn frame_request<'a>(&'a self, input: &[u32], ro: Option<&[u8]>, size: usize) -> Result<SolveRequest<'a>> {
        let bottom = self.input_row(input, ro, size)?;
        let wall = vec![self.signal_color(&Signal::None); size];
        let top = self.accepting_top();
        Ok(SolveRequest::new(&self.tileset, size, size)
            .side_colors(Side::Bottom, &bottom)
            .side_colors(Side::Left, &wall)
            .side_colors(Side::Right, &wall)
            .side_allowed(Side::Top, vec![top; size]))
    }

    pub fn solve_frame(&self, input: &[u32], ro: Option<&[u8]>, size: usize, budget: u64) -> Result<SolveResult> {
        solve_patch(&self.frame_request(input, ro, size)?.mode(Mode::First).budget(budget))
    }

    /// Reads the configuration on the bottom edge of row `y` (`y = height` reads the top edge).
    pub fn decode_row(&self, p: &Patch, y: usize) -> Option<Config> {
        let cells: Vec<Cell> = (0..p.width())
            .map(|x| {
                let t: &Tile = if y < p.height() {
                    self.tileset.tile(p.get(x, y)?)
                } else {
                    self.tileset.tile(p.get(x, y - 1)?)
                };
                self.cell_of(if y < p.height() { t.bottom } else { t.top })
            })
            .collect::<Option<_>>()?;
        let heads: Vec<usize> = (0..cells.len()).filter(|&i| cells[i].head.is_some()).collect();
        let [h] = heads[..] else { return None };
        Some(Config { tape: cells.iter().map(|c| c.sym).collect(), head: h, state: cells[h].head? })
    }
}
