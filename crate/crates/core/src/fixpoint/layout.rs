use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::wang::{Direction, Side};

/// Distance between neighbouring wires and between consecutive slot columns.
pub const SPACING: usize = 4;

/// Half-open rectangle of cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rect {
    pub x0: usize,
    pub y0: usize,
    pub w: usize,
    pub h: usize,
}

impl Rect {
    pub fn x1(&self) -> usize {
        self.x0 + self.w
    }

    pub fn y1(&self) -> usize {
        self.y0 + self.h
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x >= self.x0 && x < self.x1() && y >= self.y0 && y < self.y1()
    }

    pub fn is_empty(&self) -> bool {
        self.w == 0 || self.h == 0
    }
}

/// A communication wire: cells from the macro-tile border to the cell just below
/// the input row, in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wire {
    pub side: Side,
    pub bit: usize,
    /// Input-row slot the wire feeds.
    pub slot: usize,
    pub path: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InputCol {
    /// Receives a wire bit.
    Data { slot: usize },
    /// One of the two instruction bits of a slot.
    Instr { slot: usize, idx: u8 },
    Pad { slot: usize },
    End,
    /// Program header and padding after the end marker.
    Text,
}

/// Named range of input-row columns, relative to the left end of the row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Field {
    pub name: String,
    pub start: usize,
    pub len: usize,
}

/// A diversification slot: a 4×4 box whose 2×2 interior reproduces the comp-zone
/// window with bottom-left cell `source`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slot {
    pub source: (usize, usize),
    /// Index among the slots reserved for `source`.
    pub index: usize,
    /// Bottom-left cell of the box.
    pub origin: (usize, usize),
}

impl Slot {
    pub fn interior(&self) -> [(usize, usize); 4] {
        let (x, y) = (self.origin.0 + 1, self.origin.1 + 1);
        [(x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1)]
    }

    /// The twelve ring cells, corners included.
    pub fn frame(&self) -> Vec<(usize, usize)> {
        let (ox, oy) = self.origin;
        let mut out = Vec::with_capacity(12);
        for dy in 0..4 {
            for dx in 0..4 {
                if dx == 0 || dx == 3 || dy == 0 || dy == 3 {
                    out.push((ox + dx, oy + dy));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Skeleton,
    Free,
    Wire { wire: usize, side: Side, bit: usize, from: Side, to: Side },
    Input { col: usize, kind: InputCol },
    Comp { col: usize, row: usize },
    SlotFrame { slot: usize, corner: bool },
    SlotInterior { slot: usize, dx: usize, dy: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MacroLayout {
    pub n: usize,
    pub k_bits: usize,
    pub m: usize,
    /// Input row: `y_in`, columns `comp.x0 .. comp.x1()`.
    pub y_in: usize,
    pub comp: Rect,
    pub free: Rect,
    pub wires: Vec<Wire>,
    pub slots: Vec<Slot>,
    pub fields: Vec<Field>,
    pub quasiperiodic: bool,
    /// Positions of the payload bits along each side.
    pub side_positions: Vec<usize>,
    roles: HashMap<(usize, usize), Role>,
}

/// Number of input-row slots: four sides of `k` bits.
pub fn slot_count(k: usize) -> usize {
    4 * k
}

fn sizing<T>(msg: String) -> Result<T> {
    Err(Error::Sizing(msg))
}

/// Deterministic geometry for zoom `n`, `k` bits per side and an `m×m` comp zone.
///
/// Bits sit at `p_b = c0 + 4b` in the middle of each side. The input row lies
/// directly below the comp zone; bottom wires go straight up, left and right wires
/// are nested L-shapes, top wires come down, run to a channel right of the comp
/// zone, down past it, and enter the input row from below.
pub fn layout(n: usize, k: usize, m: usize) -> Result<MacroLayout> {
    if m < 2 {
        return sizing(format!("comp zone side m={m} is below 2"));
    }
    if m >= n {
        return sizing(format!("comp zone side m={m} must be smaller than N={n}"));
    }
    let s = slot_count(k);
    if m < SPACING * s + 1 {
        return sizing(format!(
            "input row of width m={m} cannot hold {s} slots of {SPACING} columns plus the end marker (needs m ≥ {})",
            SPACING * s + 1
        ));
    }
    let (x0, y_in, c0) = if k == 0 {
        ((n - m) / 2, 2, 0)
    } else {
        if n + 3 < 4 * k {
            return sizing(format!("N={n} cannot center {k} bits per side"));
        }
        let c0 = (n + 3 - 4 * k) / 2;
        if c0 < 4 * k + 1 {
            return sizing(format!("left wires need c0 - 4k ≥ 1 (c0={c0}, k={k})"));
        }
        (c0 - 4 * k, c0 + 4 * (k - 1) + 4 + 4 * k, c0)
    };
    if x0 == 0 {
        return sizing(format!("comp zone touches the left border (N={n}, m={m})"));
    }
    let comp = Rect { x0, y0: y_in + 1, w: m, h: m };
    let xc = x0 + m + 3;
    if k > 0 && xc + 4 * (k - 1) + 4 > n {
        return sizing(format!(
            "top-wire channel at column {} leaves less than 4 columns to the right border (N={n})",
            xc + 4 * (k - 1)
        ));
    }
    let top_limit = if k == 0 { n.saturating_sub(1) } else { n - 4 * k - 3 };
    let fy0 = comp.y1() + 1;
    if top_limit < fy0 + 4 {
        return sizing(format!(
            "no room for the free zone: comp zone ends at row {}, top wires start at row {} (N={n})",
            comp.y1(),
            if k == 0 { n } else { n - 4 * k }
        ));
    }
    if comp.x1() + 1 > n {
        return sizing(format!("comp zone overflows the right border (N={n})"));
    }
    let free = Rect { x0: x0 - 1, y0: fy0, w: m + 2, h: top_limit - fy0 };
    let side_positions: Vec<usize> = (0..k).map(|b| c0 + SPACING * b).collect();

    let mut wires = Vec::with_capacity(4 * k);
    let p_max = side_positions.last().copied().unwrap_or(0);
    for b in 0..k {
        let p = side_positions[b];
        let slot = k - 1 - b;
        let xl = x0 + SPACING * slot;
        let mut path: Vec<(usize, usize)> = (0..=xl).map(|x| (x, p)).collect();
        path.extend((p + 1..y_in).map(|y| (xl, y)));
        wires.push(Wire { side: Side::Left, bit: b, slot, path });
    }
    for b in 0..k {
        let p = side_positions[b];
        let path = (0..y_in).map(|y| (p, y)).collect();
        wires.push(Wire { side: Side::Bottom, bit: b, slot: k + b, path });
    }
    for b in 0..k {
        let p = side_positions[b];
        let slot = 2 * k + b;
        let xr = x0 + SPACING * slot;
        let mut path: Vec<(usize, usize)> = (xr..n).rev().map(|x| (x, p)).collect();
        path.extend((p + 1..y_in).map(|y| (xr, y)));
        wires.push(Wire { side: Side::Right, bit: b, slot, path });
    }
    for b in 0..k {
        let p = side_positions[b];
        // outer wires (larger b) stay outside the inner ones all the way round
        let slot = 3 * k + (k - 1 - b);
        let xt = x0 + SPACING * slot;
        let yt = n - 4 * k + 4 * b;
        let xr = xc + SPACING * b;
        let yu = p_max + 4 + 4 * (k - 1 - b);
        let mut path: Vec<(usize, usize)> = (yt..n).rev().map(|y| (p, y)).collect();
        path.extend((p + 1..=xr).map(|x| (x, yt)));
        path.extend((yu..yt).rev().map(|y| (xr, y)));
        path.extend((xt..xr).rev().map(|x| (x, yu)));
        path.extend((yu + 1..y_in).map(|y| (xt, y)));
        wires.push(Wire { side: Side::Top, bit: b, slot, path });
    }

    let mut fields = Vec::new();
    for (i, name) in ["left", "bottom", "right", "top"].iter().enumerate() {
        fields.push(Field { name: name.to_string(), start: SPACING * k * i, len: SPACING * k });
    }
    fields.push(Field { name: "end".into(), start: SPACING * s, len: 1 });
    fields.push(Field { name: "text".into(), start: SPACING * s + 1, len: m - SPACING * s - 1 });

    let mut out = MacroLayout {
        n,
        k_bits: k,
        m,
        y_in,
        comp,
        free,
        wires,
        slots: Vec::new(),
        fields,
        quasiperiodic: false,
        side_positions,
        roles: HashMap::new(),
    };
    out.rebuild_roles();
    Ok(out)
}

fn step_dir(a: (usize, usize), b: (usize, usize)) -> Direction {
    if b.0 > a.0 {
        Direction::Right
    } else if b.0 < a.0 {
        Direction::Left
    } else if b.1 > a.1 {
        Direction::Up
    } else {
        Direction::Down
    }
}

impl MacroLayout {
    fn rebuild_roles(&mut self) {
        let mut roles = HashMap::new();
        for (wi, w) in self.wires.iter().enumerate() {
            for (i, &c) in w.path.iter().enumerate() {
                let from = if i == 0 { w.side } else { step_dir(w.path[i - 1], c).opposite().side() };
                let to = if i + 1 < w.path.len() { step_dir(c, w.path[i + 1]).side() } else { Side::Top };
                roles.insert(c, Role::Wire { wire: wi, side: w.side, bit: w.bit, from, to });
            }
        }
        for col in 0..self.m {
            roles.insert((self.comp.x0 + col, self.y_in), Role::Input { col, kind: self.input_kind(col) });
        }
        for row in 0..self.m {
            for col in 0..self.m {
                roles.insert((self.comp.x0 + col, self.comp.y0 + row), Role::Comp { col, row });
            }
        }
        for (si, s) in self.slots.iter().enumerate() {
            let (ox, oy) = s.origin;
            for c in s.frame() {
                let corner = (c.0 == ox || c.0 == ox + 3) && (c.1 == oy || c.1 == oy + 3);
                roles.insert(c, Role::SlotFrame { slot: si, corner });
            }
            for c in s.interior() {
                roles.insert(c, Role::SlotInterior { slot: si, dx: c.0 - ox - 1, dy: c.1 - oy - 1 });
            }
        }
        self.roles = roles;
    }

    fn input_kind(&self, col: usize) -> InputCol {
        let s = slot_count(self.k_bits);
        if col < SPACING * s {
            let slot = col / SPACING;
            match col % SPACING {
                0 => InputCol::Data { slot },
                1 => InputCol::Instr { slot, idx: 0 },
                2 => InputCol::Instr { slot, idx: 1 },
                _ => InputCol::Pad { slot },
            }
        } else if col == SPACING * s {
            InputCol::End
        } else {
            InputCol::Text
        }
    }

    /// What the cell at `(x, y)` of a macro-tile does.
    pub fn role(&self, x: usize, y: usize) -> Role {
        if let Some(r) = self.roles.get(&(x, y)) {
            return *r;
        }
        if self.free.contains(x, y) {
            Role::Free
        } else {
            Role::Skeleton
        }
    }

    /// Input-row column (absolute `x`) of a slot's data cell.
    pub fn data_column(&self, slot: usize) -> usize {
        self.comp.x0 + SPACING * slot
    }

    /// The wire for `side`, bit `b`.
    pub fn wire(&self, side: Side, b: usize) -> &Wire {
        &self.wires[self.wire_index(side, b)]
    }

    pub fn wire_index(&self, side: Side, b: usize) -> usize {
        let order = match side {
            Side::Left => 0,
            Side::Bottom => 1,
            Side::Right => 2,
            Side::Top => 3,
        };
        order * self.k_bits + b
    }

    pub fn field(&self, name: &str) -> Option<&Field> {
        self.fields.iter().find(|f| f.name == name)
    }

    /// Bottom-left corners of the 2×2 windows that get slots: all windows inside the
    /// input row plus comp zone.
    pub fn window_positions(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for x in self.comp.x0..self.comp.x1() - 1 {
            for y in self.y_in..self.comp.y1() - 1 {
                out.push((x, y));
            }
        }
        out
    }

    pub fn audit(&self) -> LayoutAudit {
        let n = self.n;
        let mut problems = Vec::new();
        let mut owner: Vec<Option<usize>> = vec![None; n * n];
        for (wi, w) in self.wires.iter().enumerate() {
            for &(x, y) in &w.path {
                if x >= n || y >= n {
                    problems.push(format!("wire {wi} leaves the macro-tile at ({x},{y})"));
                    continue;
                }
                if let Some(o) = owner[y * n + x] {
                    problems.push(format!("wires {o} and {wi} share cell ({x},{y})"));
                }
                owner[y * n + x] = Some(wi);
                let input_row = y == self.y_in && x >= self.comp.x0 && x < self.comp.x1();
                if self.comp.contains(x, y) || self.free.contains(x, y) || input_row {
                    problems.push(format!("wire {wi} enters a reserved zone at ({x},{y})"));
                }
            }
        }
        let mut min_dist: Option<usize> = None;
        let r = 2 * SPACING;
        for (wi, w) in self.wires.iter().enumerate() {
            for &(x, y) in &w.path {
                for yy in y.saturating_sub(r)..(y + r + 1).min(n) {
                    for xx in x.saturating_sub(r)..(x + r + 1).min(n) {
                        if let Some(o) = owner[yy * n + xx] {
                            if o != wi {
                                let d = x.abs_diff(xx).max(y.abs_diff(yy));
                                min_dist = Some(min_dist.map_or(d, |m| m.min(d)));
                            }
                        }
                    }
                }
            }
        }
        // gap > 2 empty cells between any two wires
        let wire_gap_ok = min_dist.map_or(true, |d| d > 3);
        if !wire_gap_ok {
            problems.push(format!("wires only {} apart", min_dist.unwrap_or(0)));
        }
        for w in &self.wires {
            let last = *w.path.last().expect("wires are non-empty");
            if last != (self.data_column(w.slot), self.y_in - 1) {
                problems.push(format!("{:?} wire {} does not end below its data column", w.side, w.bit));
            }
            let first = w.path[0];
            let expected = match w.side {
                Side::Left => (0, self.side_positions[w.bit]),
                Side::Right => (n - 1, self.side_positions[w.bit]),
                Side::Bottom => (self.side_positions[w.bit], 0),
                Side::Top => (self.side_positions[w.bit], n - 1),
            };
            if first != expected {
                problems.push(format!("{:?} wire {} does not start at its side position", w.side, w.bit));
            }
        }
        let mut slot_cells: HashMap<(usize, usize), usize> = HashMap::new();
        let mut slots_ok = true;
        let mut alignment_ok = true;
        for (si, s) in self.slots.iter().enumerate() {
            if s.origin.0 + 1 != s.source.0 {
                alignment_ok = false;
                problems.push(format!("slot {si} is not aligned with column {}", s.source.0));
            }
            for c in s.frame().into_iter().chain(s.interior()) {
                if !self.free.contains(c.0, c.1) {
                    slots_ok = false;
                    problems.push(format!("slot {si} cell {c:?} lies outside the free zone"));
                }
                if let Some(o) = slot_cells.insert(c, si) {
                    slots_ok = false;
                    problems.push(format!("slots {o} and {si} overlap at {c:?}"));
                }
            }
        }
        LayoutAudit {
            wire_endpoints: self.wires.len(),
            min_wire_distance: min_dist,
            wire_gap_ok,
            slots_ok,
            alignment_ok,
            problems,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayoutAudit {
    pub wire_endpoints: usize,
    /// Smallest Chebyshev distance between cells of different wires.
    pub min_wire_distance: Option<usize>,
    pub wire_gap_ok: bool,
    pub slots_ok: bool,
    pub alignment_ok: bool,
    pub problems: Vec<String>,
}

impl LayoutAudit {
    pub fn ok(&self) -> bool {
        self.problems.is_empty()
    }
}

/// Role of a third of a macro-color in the three-zone encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ZoneRole {
    Meaningful,
    Zeros,
    Ones,
}

impl ZoneRole {
    pub fn succ(self) -> ZoneRole {
        match self {
            ZoneRole::Meaningful => ZoneRole::Zeros,
            ZoneRole::Zeros => ZoneRole::Ones,
            ZoneRole::Ones => ZoneRole::Meaningful,
        }
    }

    /// Expands `meaningful` (a third of the bits) into the full side word for a
    /// macro-tile at vertical position `j` in its father.
    pub fn encode(meaningful: &[u8], j: u64) -> Vec<u8> {
        let r = meaningful.len();
        let mut out = Vec::with_capacity(3 * r);
        for z in 0..3 {
            match zone_role(j, z) {
                ZoneRole::Meaningful => out.extend_from_slice(meaningful),
                ZoneRole::Zeros => out.extend(std::iter::repeat(0).take(r)),
                ZoneRole::Ones => out.extend(std::iter::repeat(1).take(r)),
            }
        }
        out
    }

    /// Inverse of [`ZoneRole::encode`]; `None` when the constant zones are wrong.
    pub fn decode(word: &[u8], j: u64) -> Option<Vec<u8>> {
        if word.len() % 3 != 0 {
            return None;
        }
        let r = word.len() / 3;
        let mut meaningful = None;
        for z in 0..3 {
            let part = &word[z * r..(z + 1) * r];
            match zone_role(j, z) {
                ZoneRole::Meaningful => meaningful = Some(part.to_vec()),
                ZoneRole::Zeros if part.iter().any(|&b| b != 0) => return None,
                ZoneRole::Ones if part.iter().any(|&b| b != 1) => return None,
                _ => {}
            }
        }
        meaningful
    }
}

/// Role of zone `z` (0, 1, 2) for a macro-tile at vertical position `j`; moving one
/// macro-tile up advances every zone to the next role.
pub fn zone_role(j: u64, z: usize) -> ZoneRole {
    match (j % 3 + z as u64) % 3 {
        0 => ZoneRole::Meaningful,
        1 => ZoneRole::Zeros,
        _ => ZoneRole::Ones,
    }
}

/// Reserves `demand[pos]` slots for each comp-zone window position (positions
/// missing from the map get none) and marks the layout quasiperiodic.
///
/// Slots are packed first-fit into lanes of height 4 in the free zone; each slot
/// box spans columns `s−1 .. s+2` so its interior sits under the source columns.
pub fn quasiperiodic_upgrade(base: &MacroLayout, demand: &BTreeMap<(usize, usize), usize>) -> Result<MacroLayout> {
    if base.k_bits % 3 != 0 {
        return Err(Error::Config(format!(
            "three-zone macro-colors need k divisible by 3, got k={}",
            base.k_bits
        )));
    }
    let valid: std::collections::HashSet<(usize, usize)> = base.window_positions().into_iter().collect();
    if let Some(p) = demand.keys().find(|p| !valid.contains(p)) {
        return Err(Error::Config(format!("window position {p:?} is not inside the comp zone")));
    }
    let mut order: Vec<((usize, usize), usize)> =
        demand.iter().flat_map(|(&pos, &cnt)| (0..cnt).map(move |i| (pos, i))).collect();
    order.sort_by_key(|&((x, y), i)| (x, y, i));
    // lane -> first free column
    let mut lanes: Vec<usize> = Vec::new();
    let mut slots = Vec::with_capacity(order.len());
    for ((sx, sy), i) in order {
        let left = sx - 1;
        let lane = match lanes.iter().position(|&end| end <= left) {
            Some(l) => l,
            None => {
                lanes.push(0);
                lanes.len() - 1
            }
        };
        lanes[lane] = left + 4;
        slots.push(Slot { source: (sx, sy), index: i, origin: (left, base.free.y0 + 4 * lane) });
    }
    let need = 4 * lanes.len();
    if need > base.free.h {
        return Err(Error::Sizing(format!(
            "{} slots need {} lanes ({need} rows) but the free zone has {} rows",
            slots.len(),
            lanes.len(),
            base.free.h
        )));
    }
    let mut out = base.clone();
    out.slots = slots;
    out.quasiperiodic = true;
    out.rebuild_roles();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_layout_passes_audit() {
        let l = layout(96, 1, 24).unwrap();
        let a = l.audit();
        assert!(a.ok(), "{:?}", a.problems);
        assert_eq!(a.wire_endpoints, 4);
        assert_eq!(a.min_wire_distance, Some(4));
    }

    #[test]
    fn zero_bits() {
        let l = layout(16, 0, 4).unwrap();
        assert!(l.wires.is_empty());
        assert!(l.audit().ok());
        assert_eq!(l.role(l.comp.x0, l.y_in), Role::Input { col: 0, kind: InputCol::End });
    }

    #[test]
    fn dense_demo_is_infeasible() {
        // 32 wires cannot reach a 16-wide input row with gaps of three cells
        match layout(64, 8, 16) {
            Err(Error::Sizing(msg)) => assert!(msg.contains("input row"), "{msg}"),
            other => panic!("expected sizing error, got {other:?}"),
        }
    }

    #[test]
    fn m_not_below_n() {
        assert!(matches!(layout(20, 0, 20), Err(Error::Sizing(_))));
        assert!(matches!(layout(20, 0, 30), Err(Error::Sizing(_))));
    }

    #[test]
    fn corner_roles_report_both_sides() {
        let l = layout(96, 1, 24).unwrap();
        let w = l.wire(Side::Left, 0);
        let corner = w.path.iter().position(|&(x, _)| x == w.path.last().unwrap().0).unwrap();
        let (x, y) = w.path[corner];
        match l.role(x, y) {
            Role::Wire { from, to, .. } => assert_eq!((from, to), (Side::Left, Side::Top)),
            r => panic!("{r:?}"),
        }
        let (x, y) = w.path[0];
        assert!(matches!(l.role(x, y), Role::Wire { from: Side::Left, to: Side::Right, .. }));
        // top wire: first turn goes from the top side to the right
        let t = l.wire(Side::Top, 0);
        let i = t.path.windows(2).position(|p| p[0].1 == p[1].1).unwrap();
        let (x, y) = t.path[i];
        assert!(matches!(l.role(x, y), Role::Wire { from: Side::Top, to: Side::Right, .. }));
    }

    #[test]
    fn larger_k_layouts() {
        for (n, k, m) in [(140, 2, 40), (200, 3, 56)] {
            let l = layout(n, k, m).unwrap();
            let a = l.audit();
            assert!(a.ok(), "{n} {k} {m}: {:?}", a.problems);
            assert_eq!(a.wire_endpoints, 4 * k);
        }
    }

    #[test]
    fn upgrade_packs_slots() {
        let l = layout(250, 0, 6).unwrap();
        let demand: BTreeMap<_, _> = l.window_positions().into_iter().map(|p| (p, 2)).collect();
        let q = quasiperiodic_upgrade(&l, &demand).unwrap();
        assert_eq!(q.slots.len(), 2 * 5 * 6);
        let a = q.audit();
        assert!(a.ok(), "{:?}", a.problems);
        let tight = layout(30, 0, 6).unwrap();
        let demand: BTreeMap<_, _> = tight.window_positions().into_iter().map(|p| (p, 2)).collect();
        assert!(matches!(quasiperiodic_upgrade(&tight, &demand), Err(Error::Sizing(_))));
        assert!(matches!(quasiperiodic_upgrade(&layout(96, 1, 24).unwrap(), &BTreeMap::new()), Err(Error::Config(_))));
    }

    #[test]
    fn zone_roles_cycle() {
        for j in 0..9u64 {
            for z in 0..3 {
                assert_eq!(zone_role(j + 1, z), zone_role(j, z).succ());
            }
            let roles: Vec<_> = (0..3).map(|z| zone_role(j, z)).collect();
            assert!(roles.contains(&ZoneRole::Meaningful) && roles.contains(&ZoneRole::Zeros) && roles.contains(&ZoneRole::Ones));
        }
    }

    proptest! {
        #[test]
        fn zone_encoding_round_trips(bits in proptest::collection::vec(0u8..2, 1..6), j in 0u64..50) {
            let w = ZoneRole::encode(&bits, j);
            prop_assert_eq!(ZoneRole::decode(&w, j), Some(bits.clone()));
            // every bit position sees both values among three consecutive rows
            let ws: Vec<Vec<u8>> = (j..j + 3).map(|jj| ZoneRole::encode(&bits, jj)).collect();
            for i in 0..w.len() {
                let vals: std::collections::HashSet<u8> = ws.iter().map(|w| w[i]).collect();
                prop_assert_eq!(vals.len(), 2);
            }
        }

        #[test]
        fn feasible_layouts_audit_clean(k in 0usize..3, extra in 0usize..20) {
            let m = 16 * k + 4 + extra;
            let n = 20 * k + 2 * m + 24;
            let l = layout(n, k, m).unwrap();
            let a = l.audit();
            prop_assert!(a.ok(), "{:?}", a.problems);
            for w in &l.wires {
                for &(x, y) in &w.path {
                    let is_wire = matches!(l.role(x, y), Role::Wire { .. });
                    prop_assert!(is_wire);
                }
            }
        }
    }
}
