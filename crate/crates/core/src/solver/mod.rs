//! Completion, counting and enumeration of finite Wang tilings.
//!
//! The search keeps a candidate set per cell, enforces arc consistency on the
//! four-neighbour grid after every assignment, and branches row-major from the
//! bottom-left cell (or on the smallest domain when `mrv` is set). Ties always go
//! to the lowest tile index, so enumeration order is reproducible.

mod rows;
mod search;

pub use rows::{count_patterns, transfer_entropy_bounds, EntropyBounds, RowAutomaton, WidthEstimate};

use crate::error::{input, Result};
use crate::wang::{ColorId, Patch, Side, TileSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    First,
    Count,
    Enumerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Sat,
    Unsat,
    BudgetExhausted,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Sat => "sat",
            Status::Unsat => "unsat",
            Status::BudgetExhausted => "budget-exhausted",
        }
    }
}

/// Allowed colors along one side of the rectangle, position by position.
///
/// Left and right sides are indexed bottom to top, top and bottom left to right.
pub type SideConstraint = Vec<Vec<ColorId>>;

#[derive(Debug, Clone)]
pub struct SolveRequest<'a> {
    pub tileset: &'a TileSet,
    pub width: usize,
    pub height: usize,
    pub fixed: Option<Patch>,
    /// Indexed by [`Side::index`].
    pub boundary: [Option<SideConstraint>; 4],
    /// Tiles that may not be used anywhere.
    pub forbidden: Vec<u32>,
    pub mode: Mode,
    /// Maximum number of node expansions (one per tentative assignment).
    pub budget: u64,
    /// Wrap-around matching in both directions.
    pub torus: bool,
    /// Branch on the smallest domain instead of the next cell in row-major order.
    pub mrv: bool,
    /// Stop enumeration after this many solutions; the result is flagged as truncated.
    pub max_solutions: Option<usize>,
    /// Worker threads over the root branches; 1 is the reference behaviour.
    pub jobs: usize,
    /// Use translation symmetry of a torus (First mode only): root candidates that
    /// fail at cell 0 are removed everywhere.
    pub symmetric: bool,
}

impl<'a> SolveRequest<'a> {
    pub fn new(tileset: &'a TileSet, width: usize, height: usize) -> SolveRequest<'a> {
        SolveRequest {
            tileset,
            width,
            height,
            fixed: None,
            boundary: Default::default(),
            forbidden: Vec::new(),
            mode: Mode::First,
            budget: 10_000_000,
            torus: false,
            mrv: false,
            max_solutions: None,
            jobs: 1,
            symmetric: false,
        }
    }

    pub fn mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn torus(mut self, torus: bool) -> Self {
        self.torus = torus;
        self
    }

    pub fn jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs.max(1);
        self
    }

    pub fn fixed(mut self, p: Patch) -> Self {
        self.fixed = Some(p);
        self
    }

    pub fn fix(mut self, x: usize, y: usize, tile: u32) -> Self {
        let mut p = self.fixed.take().unwrap_or_else(|| Patch::empty(self.width, self.height));
        p.set(x, y, Some(tile));
        self.fixed = Some(p);
        self
    }

    /// Pins one side to an exact color sequence.
    pub fn side_colors(mut self, side: Side, colors: &[ColorId]) -> Self {
        self.boundary[side.index()] = Some(colors.iter().map(|&c| vec![c]).collect());
        self
    }

    pub fn side_allowed(mut self, side: Side, allowed: SideConstraint) -> Self {
        self.boundary[side.index()] = Some(allowed);
        self
    }

    fn check(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return input("solve area must be non-empty");
        }
        if let Some(p) = &self.fixed {
            if p.width() != self.width || p.height() != self.height {
                return input("fixed patch dimensions differ from the solve area");
            }
            for (x, y, t) in p.assigned() {
                if t as usize >= self.tileset.len() {
                    return input(format!("fixed cell ({x},{y}) holds unknown tile {t}"));
                }
            }
        }
        for side in Side::ALL {
            if let Some(b) = &self.boundary[side.index()] {
                let want = match side {
                    Side::Left | Side::Right => self.height,
                    Side::Top | Side::Bottom => self.width,
                };
                if b.len() != want {
                    return input(format!("{side:?} boundary has {} entries, expected {want}", b.len()));
                }
            }
        }
        if self.forbidden.iter().any(|&t| t as usize >= self.tileset.len()) {
            return input("forbidden list names an unknown tile");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub status: Status,
    /// Number of completions found (exact when the status is not budget-exhausted).
    pub count: u128,
    pub patches: Vec<Patch>,
    pub nodes: u64,
    pub truncated: bool,
}

pub fn solve_patch(req: &SolveRequest<'_>) -> Result<SolveResult> {
    req.check()?;
    Ok(search::run(req))
}

/// Outcome of a periodic tiling search on a `p × q` torus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusResult {
    pub exists: Status,
    pub count: Option<u128>,
    pub nodes: u64,
}

/// Does a `p × q` periodic tiling exist?
///
/// Translation symmetry lets us put every candidate at `(0, 0)`: once a tile fails
/// there, it cannot occur anywhere and is removed for the remaining candidates.
pub fn torus_exists(ts: &TileSet, p: usize, q: usize, budget: u64) -> Result<(Status, u64)> {
    let mut req = SolveRequest::new(ts, p, q).torus(true).budget(budget);
    req.symmetric = true;
    let r = solve_patch(&req)?;
    Ok((r.status, r.nodes))
}

/// Existence (with the symmetry shortcut) and, if `count` is set, the exact number of
/// valid `p × q` torus assignments (without any symmetry reduction).
pub fn torus_tilings(ts: &TileSet, p: usize, q: usize, budget: u64, count: bool, jobs: usize) -> Result<TorusResult> {
    let (exists, mut nodes) = torus_exists(ts, p, q, budget)?;
    let count = if count && exists != Status::BudgetExhausted {
        let r = solve_patch(
            &SolveRequest::new(ts, p, q)
                .torus(true)
                .mode(Mode::Count)
                .budget(budget.saturating_sub(nodes))
                .jobs(jobs),
        )?;
        nodes += r.nodes;
        (r.status != Status::BudgetExhausted).then_some(r.count)
    } else {
        None
    };
    Ok(TorusResult { exists, count, nodes })
}
