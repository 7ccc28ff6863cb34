use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::layout::{InputCol, MacroLayout, Role};
use super::program::{universal_machine, ProgramBundle};
use crate::error::{Error, Result};
use crate::solver::{solve_patch, Mode, SolveRequest, Status};
use crate::tm::{run_tm, Cell, DiagramKind, DiagramTile, Outcome, Signal, TMachine};
use crate::wang::{Patch, Side, TileSet};

/// What an edge carries besides its position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Payload {
    Plain,
    Wire(u8),
    Content(Cell),
    Signal(Signal),
}

/// Color of an edge: its position inside the macro-tile and its payload. `across`
/// is true for edges crossed when moving left/right (left and right sides of
/// tiles); `(x, y)` is the cell to the right of (resp. above) the edge, mod N.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeKey {
    pub across: bool,
    pub x: u32,
    pub y: u32,
    pub payload: Payload,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TileKind {
    Skeleton,
    Wire { wire: usize, value: u8 },
    Input { col: usize, value: Option<u8> },
    Comp(DiagramTile),
    Frame { slot: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TileInfo {
    pub x: u32,
    pub y: u32,
    pub kind: TileKind,
}

/// What fills one cell of an input-row/comp-zone window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum CellFill {
    Input(Option<u8>),
    Comp(DiagramTile),
}

type Window = [CellFill; 4];

#[derive(Debug, Clone)]
pub struct Compiled {
    pub tileset: TileSet,
    pub layout: MacroLayout,
    pub bundle: ProgramBundle,
    pub info: Vec<TileInfo>,
    pub keys: Vec<EdgeKey>,
    /// Tile ids shown by each slot, ordered (0,0), (1,0), (0,1), (1,1); `None` for
    /// reserved slots left unused.
    pub slot_targets: Vec<Option<[u32; 4]>>,
    color_of: HashMap<EdgeKey, u32>,
    by_cell: HashMap<(u32, u32), Vec<u32>>,
}

struct Builder {
    n: u32,
    keys: Vec<EdgeKey>,
    color_of: HashMap<EdgeKey, u32>,
    quads: Vec<[u32; 4]>,
    info: Vec<TileInfo>,
}

impl Builder {
    fn color(&mut self, k: EdgeKey) -> u32 {
        if let Some(&c) = self.color_of.get(&k) {
            return c;
        }
        let c = self.keys.len() as u32;
        self.keys.push(k);
        self.color_of.insert(k, c);
        c
    }

    fn key(&self, x: u32, y: u32, side: Side, payload: Payload) -> EdgeKey {
        let n = self.n;
        match side {
            Side::Left => EdgeKey { across: true, x, y, payload },
            Side::Right => EdgeKey { across: true, x: (x + 1) % n, y, payload },
            Side::Bottom => EdgeKey { across: false, x, y, payload },
            Side::Top => EdgeKey { across: false, x, y: (y + 1) % n, payload },
        }
    }

    /// Payloads in left, right, top, bottom order.
    fn push(&mut self, x: u32, y: u32, p: [Payload; 4], kind: TileKind) -> u32 {
        let mut q = [0; 4];
        for s in Side::ALL {
            let k = self.key(x, y, s, p[s.index()]);
            q[s.index()] = self.color(k);
        }
        self.push_quad(x, y, q, kind)
    }

    fn push_quad(&mut self, x: u32, y: u32, q: [u32; 4], kind: TileKind) -> u32 {
        self.quads.push(q);
        self.info.push(TileInfo { x, y, kind });
        (self.quads.len() - 1) as u32
    }
}

/// Space-time diagram of an accepting run, `rows` rows of `width` tiles.
fn diagram_rows(m: &TMachine, tape: &[u32], ro: &[u8], rows: usize) -> Option<Vec<Vec<DiagramTile>>> {
    let width = tape.len();
    let tr = run_tm(m, tape, Some(ro), rows, width).ok()?;
    if tr.outcome != Outcome::Accept || tr.steps() > rows {
        return None;
    }
    let f = tr.steps();
    let cell = |t: usize, x: usize| {
        let c = &tr.configs[t.min(f)];
        Cell { sym: c.tape[x], head: (c.head == x).then_some(c.state), ro: ro[x] }
    };
    let mut out = Vec::with_capacity(rows);
    for t in 0..rows {
        let cur = &tr.configs[t.min(f)];
        let mut left = vec![Signal::None; width];
        let mut right = vec![Signal::None; width];
        let mut arrives = None;
        if t < f {
            let next = &tr.configs[t + 1];
            if next.head == cur.head + 1 {
                right[cur.head] = Signal::Right(next.state);
                left[next.head] = Signal::Right(next.state);
                arrives = Some((next.head, DiagramKind::FromLeft));
            } else if next.head + 1 == cur.head {
                left[cur.head] = Signal::Left(next.state);
                right[next.head] = Signal::Left(next.state);
                arrives = Some((next.head, DiagramKind::FromRight));
            }
        }
        let row = (0..width)
            .map(|x| {
                let kind = if cur.head == x {
                    if cur.state == m.accept {
                        DiagramKind::Halted
                    } else {
                        DiagramKind::Head
                    }
                } else {
                    match arrives {
                        Some((h, k)) if h == x => k,
                        _ => DiagramKind::Passive,
                    }
                };
                DiagramTile { bottom: cell(t, x), top: cell(t + 1, x), left: left[x], right: right[x], kind }
            })
            .collect();
        out.push(row);
    }
    Some(out)
}

fn payloads(bits: usize) -> Result<impl Iterator<Item = Vec<u8>>> {
    if bits > 20 {
        return Err(Error::Sizing(format!("{bits} payload bits are too many to enumerate runs")));
    }
    Ok((0..1u64 << bits).map(move |v| (0..bits).map(|i| ((v >> i) & 1) as u8).collect()))
}

fn check_bundle(bundle: &ProgramBundle, layout: &MacroLayout) -> Result<()> {
    let s = 4 * layout.k_bits;
    if bundle.instrs().len() != s {
        return Err(Error::Config(format!(
            "program has {} slot instructions, layout has {s} slots",
            bundle.instrs().len()
        )));
    }
    if bundle.text.len() > layout.m {
        return Err(Error::Sizing(format!(
            "program too long: {} columns of text, input row has {}",
            bundle.text.len(),
            layout.m
        )));
    }
    Ok(())
}

/// Calls `f` with every accepted payload (one bit per slot) and its diagram over
/// the comp zone.
fn for_each_run(bundle: &ProgramBundle, layout: &MacroLayout, mut f: impl FnMut(&[u8], &[Vec<DiagramTile>])) -> Result<()> {
    let u = universal_machine();
    let ro = bundle.ro_row(layout.m);
    for p in payloads(4 * layout.k_bits)? {
        if !bundle.accepts(&p) {
            continue;
        }
        let tape = bundle.tape(&p, layout.m);
        let rows = diagram_rows(&u, &tape, &ro, layout.m)
            .ok_or_else(|| Error::Validation(format!("universal machine rejects accepted payload {p:?}")))?;
        f(&p, &rows);
    }
    Ok(())
}

fn input_fill(layout: &MacroLayout, col: usize, p: &[u8]) -> Option<u8> {
    match layout.role(layout.comp.x0 + col, layout.y_in) {
        Role::Input { kind: InputCol::Data { slot }, .. } => Some(p[slot]),
        _ => None,
    }
}

/// Content of the window with bottom-left `(x, y)` for one run.
fn window(layout: &MacroLayout, p: &[u8], rows: &[Vec<DiagramTile>], x: usize, y: usize) -> Window {
    let fill = |x: usize, y: usize| {
        let col = x - layout.comp.x0;
        if y == layout.y_in {
            CellFill::Input(input_fill(layout, col, p))
        } else {
            CellFill::Comp(rows[y - layout.comp.y0][col])
        }
    };
    [fill(x, y), fill(x + 1, y), fill(x, y + 1), fill(x + 1, y + 1)]
}

fn window_patterns(bundle: &ProgramBundle, layout: &MacroLayout) -> Result<BTreeMap<(usize, usize), BTreeSet<Window>>> {
    let positions = layout.window_positions();
    let mut out: BTreeMap<(usize, usize), BTreeSet<Window>> = BTreeMap::new();
    for_each_run(bundle, layout, |p, rows| {
        for &(x, y) in &positions {
            out.entry((x, y)).or_default().insert(window(layout, p, rows, x, y));
        }
    })?;
    Ok(out)
}

/// Number of distinct 2×2 patterns each window position shows over all accepted
/// runs: the slots [`super::quasiperiodic_upgrade`] must reserve.
pub fn slot_demand(bundle: &ProgramBundle, layout: &MacroLayout) -> Result<BTreeMap<(usize, usize), usize>> {
    check_bundle(bundle, layout)?;
    Ok(window_patterns(bundle, layout)?.into_iter().map(|(k, v)| (k, v.len())).collect())
}

/// Tile set for one level: skeleton, wires, input row with the program in its
/// read-only layer, comp-zone diagram tiles, and slot frames when the layout has
/// slots. Comp-zone tiles are restricted to those occurring in accepted runs.
pub fn compile(bundle: &ProgramBundle, layout: &MacroLayout, level: Option<u64>) -> Result<Compiled> {
    let bundle = match level {
        Some(k) if bundle.level() != Some(k) => bundle.with_level(Some(k))?,
        _ => bundle.clone(),
    };
    check_bundle(&bundle, layout)?;
    let n = layout.n as u32;
    let m = layout.m;

    let mut comp_tiles: Vec<BTreeSet<DiagramTile>> = vec![BTreeSet::new(); m * m];
    let positions = layout.window_positions();
    let mut patterns: BTreeMap<(usize, usize), BTreeSet<Window>> = BTreeMap::new();
    let mut any_run = false;
    for_each_run(&bundle, layout, |p, rows| {
        any_run = true;
        for (r, row) in rows.iter().enumerate() {
            for (c, d) in row.iter().enumerate() {
                comp_tiles[r * m + c].insert(*d);
            }
        }
        if layout.quasiperiodic {
            for &(x, y) in &positions {
                patterns.entry((x, y)).or_default().insert(window(layout, p, rows, x, y));
            }
        }
    })?;
    if !any_run {
        return Err(Error::Config(format!("program `{}` accepts no payload", bundle.name())));
    }

    // slot -> target window
    let mut slot_fill: Vec<Option<Window>> = vec![None; layout.slots.len()];
    if layout.quasiperiodic {
        let mut reserved: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (si, s) in layout.slots.iter().enumerate() {
            reserved.entry(s.source).or_default().push(si);
        }
        for (pos, pats) in &patterns {
            let slots = reserved.get(pos).map(|v| v.as_slice()).unwrap_or(&[]);
            if pats.len() > slots.len() {
                return Err(Error::Sizing(format!(
                    "window {pos:?} shows {} patterns but only {} slots are reserved",
                    pats.len(),
                    slots.len()
                )));
            }
            for (w, &si) in pats.iter().zip(slots) {
                slot_fill[si] = Some(*w);
            }
        }
    }

    let u = universal_machine();
    let ro = bundle.ro_row(m);
    let mut b = Builder { n, keys: Vec::new(), color_of: HashMap::new(), quads: Vec::new(), info: Vec::new() };
    let mut lookup: HashMap<(u32, u32, CellFill), u32> = HashMap::new();
    let mut slot_targets: Vec<Option<[u32; 4]>> = vec![None; layout.slots.len()];
    let plain = [Payload::Plain; 4];
    for y in 0..layout.n {
        for x in 0..layout.n {
            let (xu, yu) = (x as u32, y as u32);
            match layout.role(x, y) {
                Role::Skeleton | Role::Free | Role::SlotFrame { corner: true, .. } => {
                    b.push(xu, yu, plain, TileKind::Skeleton);
                }
                Role::Wire { wire, from, to, .. } => {
                    for v in 0..2u8 {
                        let mut p = plain;
                        p[from.index()] = Payload::Wire(v);
                        p[to.index()] = Payload::Wire(v);
                        b.push(xu, yu, p, TileKind::Wire { wire, value: v });
                    }
                }
                Role::Input { col, kind } => {
                    let sym = match kind {
                        InputCol::End => super::U_END,
                        _ => 0,
                    };
                    let head = (col == 0).then_some(u.start);
                    let values: &[Option<u8>] =
                        if matches!(kind, InputCol::Data { .. }) { &[Some(0), Some(1)] } else { &[None] };
                    for &v in values {
                        let content = Cell { sym: v.map_or(sym, |v| 1 + v as u32), head, ro: ro[col] };
                        let bottom = v.map_or(Payload::Plain, Payload::Wire);
                        let id = b.push(
                            xu,
                            yu,
                            [Payload::Plain, Payload::Plain, Payload::Content(content), bottom],
                            TileKind::Input { col, value: v },
                        );
                        lookup.insert((xu, yu, CellFill::Input(v)), id);
                    }
                }
                Role::Comp { col, row } => {
                    for d in &comp_tiles[row * m + col] {
                        let p = [
                            if col == 0 { Payload::Plain } else { Payload::Signal(d.left) },
                            if col + 1 == m { Payload::Plain } else { Payload::Signal(d.right) },
                            if row + 1 == m { Payload::Plain } else { Payload::Content(d.top) },
                            Payload::Content(d.bottom),
                        ];
                        let id = b.push(xu, yu, p, TileKind::Comp(*d));
                        lookup.insert((xu, yu, CellFill::Comp(*d)), id);
                    }
                }
                Role::SlotFrame { slot, corner: false } => {
                    let s = &layout.slots[slot];
                    let Some(w) = slot_fill[slot] else {
                        b.push(xu, yu, plain, TileKind::Skeleton);
                        continue;
                    };
                    let target = match slot_targets[slot] {
                        Some(t) => t,
                        None => {
                            let (sx, sy) = s.source;
                            let cells = [(sx, sy), (sx + 1, sy), (sx, sy + 1), (sx + 1, sy + 1)];
                            let mut t = [0u32; 4];
                            for i in 0..4 {
                                let (cx, cy) = cells[i];
                                t[i] = lookup[&(cx as u32, cy as u32, w[i])];
                            }
                            slot_targets[slot] = Some(t);
                            t
                        }
                    };
                    let (dx, dy) = (x - s.origin.0, y - s.origin.1);
                    let mut q = [0u32; 4];
                    for side in Side::ALL {
                        let k = b.key(xu, yu, side, Payload::Plain);
                        q[side.index()] = b.color(k);
                    }
                    // the inner edge copies the target's outer color
                    let (inner, ti, tside) = match (dx, dy) {
                        (1 | 2, 0) => (Side::Top, dx - 1, Side::Bottom),
                        (1 | 2, 3) => (Side::Bottom, dx - 1 + 2, Side::Top),
                        (0, 1 | 2) => (Side::Right, 2 * (dy - 1), Side::Left),
                        _ => (Side::Left, 2 * (dy - 1) + 1, Side::Right),
                    };
                    q[inner.index()] = b.quads[target[ti] as usize][tside.index()];
                    b.push_quad(xu, yu, q, TileKind::Frame { slot });
                }
                Role::SlotInterior { slot, .. } => {
                    if slot_fill[slot].is_none() {
                        b.push(xu, yu, plain, TileKind::Skeleton);
                    }
                }
            }
        }
    }
    let name = format!("{}-N{}-k{}{}", bundle.name(), layout.n, layout.k_bits, if layout.quasiperiodic { "-qp" } else { "" });
    let tileset = TileSet::new(name, b.keys.len() as u32, &b.quads)?;
    let mut by_cell: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
    for (i, t) in b.info.iter().enumerate() {
        by_cell.entry((t.x, t.y)).or_default().push(i as u32);
    }
    Ok(Compiled {
        tileset,
        layout: layout.clone(),
        bundle,
        info: b.info,
        keys: b.keys,
        slot_targets,
        color_of: b.color_of,
        by_cell,
    })
}

impl Compiled {
    pub fn color(&self, k: &EdgeKey) -> Option<u32> {
        self.color_of.get(k).copied()
    }

    /// Tiles whose home cell is `(x, y)`; slot interiors borrow comp tiles and have
    /// none of their own.
    pub fn tiles_at(&self, x: usize, y: usize) -> &[u32] {
        self.by_cell.get(&(x as u32, y as u32)).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// The skeleton-like tile with all-plain edges at `(x, y)`, if the cell has one.
    pub fn plain_tile(&self, x: usize, y: usize) -> Option<u32> {
        self.tiles_at(x, y).iter().copied().find(|&t| self.info[t as usize].kind == TileKind::Skeleton)
    }

    /// Payload bit of `side` bit `b` inside a per-slot payload vector.
    pub fn slot_of(&self, side: Side, b: usize) -> usize {
        self.layout.wire(side, b).slot
    }

    /// Side word (bit `b` at weight `2^b`) of a per-slot payload.
    pub fn side_word(&self, payload: &[u8], side: Side) -> u32 {
        (0..self.layout.k_bits).map(|b| (payload[self.slot_of(side, b)] as u32) << b).sum()
    }

    /// The macro-tile the compiled set forces for `payload` (one bit per slot), or
    /// `None` when the program rejects it. Built directly, without search.
    pub fn macro_tile(&self, payload: &[u8]) -> Option<Patch> {
        let l = &self.layout;
        if payload.len() != 4 * l.k_bits || !self.bundle.accepts(payload) {
            return None;
        }
        let u = universal_machine();
        let tape = self.bundle.tape(payload, l.m);
        let rows = diagram_rows(&u, &tape, &self.bundle.ro_row(l.m), l.m)?;
        let mut p = Patch::empty(l.n, l.n);
        for y in 0..l.n {
            for x in 0..l.n {
                let here = self.tiles_at(x, y);
                let pick = |pred: &dyn Fn(&TileKind) -> bool| here.iter().copied().find(|&t| pred(&self.info[t as usize].kind));
                let t = match l.role(x, y) {
                    Role::Wire { wire, .. } => {
                        let v = payload[l.wires[wire].slot];
                        pick(&|k| *k == TileKind::Wire { wire, value: v })
                    }
                    Role::Input { col, .. } => {
                        let v = input_fill(l, col, payload);
                        pick(&|k| *k == TileKind::Input { col, value: v })
                    }
                    Role::Comp { col, row } => {
                        let d = rows[row][col];
                        pick(&|k| *k == TileKind::Comp(d))
                    }
                    Role::SlotFrame { slot, corner: false } if self.slot_targets[slot].is_some() => {
                        pick(&|k| *k == TileKind::Frame { slot })
                    }
                    Role::SlotInterior { slot, dx, dy } => match self.slot_targets[slot] {
                        Some(t) => Some(t[2 * dy + dx]),
                        None => self.plain_tile(x, y),
                    },
                    _ => self.plain_tile(x, y),
                };
                p.set(x, y, Some(t?));
            }
        }
        Some(p)
    }

    /// Read-only bits of the input row as hardwired in the tile set, decoded from
    /// the tiles' top colors.
    pub fn hardwired_text(&self) -> Vec<u8> {
        let l = &self.layout;
        (0..l.m)
            .map(|col| {
                let t = self.tiles_at(l.comp.x0 + col, l.y_in)[0];
                let top = self.tileset.tile(t).top.0 as usize;
                match self.keys[top].payload {
                    Payload::Content(c) => c.ro,
                    _ => unreachable!("input tiles carry contents on top"),
                }
            })
            .collect()
    }

    /// For every filled slot, the number of 2×2 blocks of the whole set that fit
    /// inside its frame (the frame's inner edges carry the target's outer colors).
    pub fn slot_completions(&self, budget: u64) -> Result<Vec<(usize, u128)>> {
        let mut out = Vec::new();
        for (si, t) in self.slot_targets.iter().enumerate() {
            let Some(t) = t else { continue };
            let tile = |i: usize| self.tileset.tile(t[i]);
            let req = SolveRequest::new(&self.tileset, 2, 2)
                .mode(Mode::Count)
                .budget(budget)
                .side_colors(Side::Left, &[tile(0).left, tile(2).left])
                .side_colors(Side::Right, &[tile(1).right, tile(3).right])
                .side_colors(Side::Bottom, &[tile(0).bottom, tile(1).bottom])
                .side_colors(Side::Top, &[tile(2).top, tile(3).top]);
            let r = solve_patch(&req)?;
            if r.status == Status::BudgetExhausted {
                return Err(Error::Budget(format!("slot {si} completion count")));
            }
            out.push((si, r.count));
        }
        Ok(out)
    }

    /// All payloads (one bit per slot) the program accepts.
    pub fn accepted_payloads(&self) -> Result<Vec<Vec<u8>>> {
        Ok(payloads(4 * self.layout.k_bits)?.filter(|p| self.bundle.accepts(p)).collect())
    }
}

/// The tile set a compiled set is meant to simulate: colors are side words in
/// `0 .. 2^k`, one tile per accepted payload.
pub fn intended_rho(c: &Compiled) -> Result<TileSet> {
    let k = c.layout.k_bits;
    let mut quads: Vec<[u32; 4]> = c
        .accepted_payloads()?
        .iter()
        .map(|p| [Side::Left, Side::Right, Side::Top, Side::Bottom].map(|s| c.side_word(p, s)))
        .collect();
    quads.sort();
    quads.dedup();
    TileSet::new(format!("rho-{}", c.bundle.name()), 1 << k, &quads)
}
