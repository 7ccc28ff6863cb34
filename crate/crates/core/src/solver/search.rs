use std::collections::VecDeque;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;

use super::{Mode, SolveRequest, SolveResult, Status};
use crate::wang::{Direction, Patch, Side, TileSet};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Dom {
    /// Every tile is still possible. Such a cell does not prune its neighbours.
    All,
    Set(Vec<u32>),
}

impl Dom {
    fn len(&self, ntiles: usize) -> usize {
        match self {
            Dom::All => ntiles,
            Dom::Set(v) => v.len(),
        }
    }
}

enum Flow {
    Continue,
    Stop,
    Exhausted,
}

struct Sink {
    mode: Mode,
    count: u128,
    patches: Vec<Patch>,
    limit: Option<usize>,
    truncated: bool,
}

impl Sink {
    fn new(mode: Mode, limit: Option<usize>) -> Sink {
        Sink { mode, count: 0, patches: Vec::new(), limit, truncated: false }
    }

    fn accept(&mut self, p: Patch) -> Flow {
        self.count += 1;
        match self.mode {
            Mode::First => {
                self.patches.push(p);
                Flow::Stop
            }
            Mode::Count => Flow::Continue,
            Mode::Enumerate => {
                self.patches.push(p);
                if self.limit.is_some_and(|l| self.patches.len() >= l) {
                    self.truncated = true;
                    Flow::Stop
                } else {
                    Flow::Continue
                }
            }
        }
    }
}

struct Engine<'a> {
    ts: &'a TileSet,
    w: usize,
    h: usize,
    torus: bool,
    mrv: bool,
    budget: u64,
    nodes: &'a AtomicU64,
    stop: &'a AtomicBool,
    mark: Vec<bool>,
    // tiles known not to occur anywhere (torus symmetry); empty when unused
    removed: Vec<bool>,
}

impl<'a> Engine<'a> {
    fn neighbor(&self, c: usize, dir: Direction) -> Option<usize> {
        let (x, y) = ((c % self.w) as isize, (c / self.w) as isize);
        let (dx, dy) = dir.delta();
        let (mut nx, mut ny) = (x + dx, y + dy);
        if self.torus {
            nx = nx.rem_euclid(self.w as isize);
            ny = ny.rem_euclid(self.h as isize);
        } else if nx < 0 || ny < 0 || nx >= self.w as isize || ny >= self.h as isize {
            return None;
        }
        let d = ny as usize * self.w + nx as usize;
        // a cell wrapping onto itself is handled as a unary constraint
        (d != c).then_some(d)
    }

    /// Prunes `doms[d]` to tiles compatible with `doms[c]` across direction `dir` (from c).
    fn revise(&mut self, doms: &mut [Dom], c: usize, d: usize, dir: Direction) -> Option<bool> {
        let Dom::Set(src) = &doms[c] else { return Some(false) };
        let side = dir.side();
        let opp = side.opposite();
        let mut colors = Vec::new();
        for &t in src {
            let col = self.ts.tile(t).side(side).0 as usize;
            if !self.mark[col] {
                self.mark[col] = true;
                colors.push(col);
            }
        }
        let new = match &doms[d] {
            Dom::All => {
                let mut v: Vec<u32> = Vec::new();
                for &col in &colors {
                    let ids = self.ts.with_side_color(opp, crate::wang::ColorId(col as u32));
                    if self.removed.is_empty() {
                        v.extend_from_slice(ids);
                    } else {
                        v.extend(ids.iter().copied().filter(|&t| !self.removed[t as usize]));
                    }
                }
                v.sort_unstable();
                if v.len() == self.ts.len() {
                    None
                } else {
                    Some(v)
                }
            }
            Dom::Set(v) => {
                let kept: Vec<u32> = v
                    .iter()
                    .copied()
                    .filter(|&t| self.mark[self.ts.tile(t).side(opp).0 as usize])
                    .filter(|&t| self.removed.is_empty() || !self.removed[t as usize])
                    .collect();
                (kept.len() != v.len()).then_some(kept)
            }
        };
        for col in colors {
            self.mark[col] = false;
        }
        match new {
            None => Some(false),
            Some(v) if v.is_empty() => None,
            Some(v) => {
                doms[d] = Dom::Set(v);
                Some(true)
            }
        }
    }

    /// Arc consistency from the cells in `start`. Returns false on a wipe-out.
    fn propagate(&mut self, doms: &mut [Dom], start: impl IntoIterator<Item = usize>) -> bool {
        let mut queued = vec![false; doms.len()];
        let mut queue = VecDeque::new();
        for c in start {
            if !queued[c] {
                queued[c] = true;
                queue.push_back(c);
            }
        }
        while let Some(c) = queue.pop_front() {
            queued[c] = false;
            for dir in Direction::ALL {
                let Some(d) = self.neighbor(c, dir) else { continue };
                match self.revise(doms, c, d, dir) {
                    None => return false,
                    Some(true) if !queued[d] => {
                        queued[d] = true;
                        queue.push_back(d);
                    }
                    Some(_) => {}
                }
            }
        }
        true
    }

    fn pick(&self, doms: &[Dom]) -> Option<usize> {
        let n = self.ts.len();
        let open = |d: &Dom| match d {
            Dom::All => true,
            Dom::Set(v) => v.len() > 1,
        };
        if self.mrv {
            doms.iter()
                .enumerate()
                .filter(|(_, d)| open(d))
                .min_by_key(|(i, d)| (d.len(n), *i))
                .map(|(i, _)| i)
        } else {
            doms.iter().position(open)
        }
    }

    fn candidates(&self, d: &Dom) -> Vec<u32> {
        let all = match d {
            Dom::All => (0..self.ts.len() as u32).collect(),
            Dom::Set(v) => v.clone(),
        };
        if self.removed.is_empty() {
            all
        } else {
            all.into_iter().filter(|&t| !self.removed[t as usize]).collect()
        }
    }

    fn to_patch(&self, doms: &[Dom]) -> Patch {
        let mut p = Patch::empty(self.w, self.h);
        for (i, d) in doms.iter().enumerate() {
            let t = match d {
                Dom::Set(v) => v[0],
                Dom::All => 0,
            };
            p.set(i % self.w, i / self.w, Some(t));
        }
        p
    }

    /// Tries `t` at `cell`; returns the propagated domains or None on conflict.
    fn assign(&mut self, doms: &[Dom], cell: usize, t: u32) -> Result<Option<Vec<Dom>>, ()> {
        if self.stop.load(Ordering::Relaxed) {
            return Err(());
        }
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.budget {
            return Err(());
        }
        let mut next = doms.to_vec();
        next[cell] = Dom::Set(vec![t]);
        Ok(self.propagate(&mut next, [cell]).then_some(next))
    }

    fn dfs(&mut self, doms: Vec<Dom>, sink: &mut Sink) -> Flow {
        let Some(cell) = self.pick(&doms) else {
            // every domain is a singleton; an All domain can only remain with one tile
            return sink.accept(self.to_patch(&doms));
        };
        for t in self.candidates(&doms[cell]) {
            match self.assign(&doms, cell, t) {
                Err(()) => return Flow::Exhausted,
                Ok(None) => {}
                Ok(Some(next)) => match self.dfs(next, sink) {
                    Flow::Continue => {}
                    other => return other,
                },
            }
        }
        Flow::Continue
    }
}

fn initial_domains(req: &SolveRequest<'_>) -> Option<Vec<Dom>> {
    let ts = req.tileset;
    let (w, h) = (req.width, req.height);
    let mut doms = vec![Dom::All; w * h];
    let mut forbidden = Vec::new();
    if !req.forbidden.is_empty() {
        forbidden = vec![false; ts.len()];
        for &t in &req.forbidden {
            forbidden[t as usize] = true;
        }
    }
    for y in 0..h {
        for x in 0..w {
            let mut filters: Vec<Box<dyn Fn(u32) -> bool + '_>> = Vec::new();
            let allowed = |side: Side, pos: usize| {
                req.boundary[side.index()].as_ref().map(|b| b[pos].clone())
            };
            let edge = [
                (Side::Left, x == 0, y),
                (Side::Right, x + 1 == w, y),
                (Side::Bottom, y == 0, x),
                (Side::Top, y + 1 == h, x),
            ];
            for (side, on_edge, pos) in edge {
                if on_edge {
                    if let Some(list) = allowed(side, pos) {
                        filters.push(Box::new(move |t| list.contains(&ts.tile(t).side(side))));
                    }
                }
            }
            if req.torus && w == 1 {
                filters.push(Box::new(|t| ts.tile(t).left == ts.tile(t).right));
            }
            if req.torus && h == 1 {
                filters.push(Box::new(|t| ts.tile(t).top == ts.tile(t).bottom));
            }
            if !forbidden.is_empty() {
                filters.push(Box::new(|t| !forbidden[t as usize]));
            }
            let fixed = req.fixed.as_ref().and_then(|p| p.get(x, y));
            let cands: Option<Vec<u32>> = match fixed {
                Some(t) => Some(vec![t]),
                None if filters.is_empty() => None,
                None => Some((0..ts.len() as u32).collect()),
            };
            if let Some(c) = cands {
                let kept: Vec<u32> = c.into_iter().filter(|&t| filters.iter().all(|f| f(t))).collect();
                if kept.is_empty() {
                    return None;
                }
                doms[y * w + x] = Dom::Set(kept);
            }
        }
    }
    Some(doms)
}

pub(super) fn run(req: &SolveRequest<'_>) -> SolveResult {
    let nodes = AtomicU64::new(0);
    let stop = AtomicBool::new(false);
    let unsat = |nodes: &AtomicU64| SolveResult {
        status: Status::Unsat,
        count: 0,
        patches: Vec::new(),
        nodes: nodes.load(Ordering::Relaxed),
        truncated: false,
    };
    if req.tileset.is_empty() {
        return unsat(&nodes);
    }
    let make = |nodes, stop| Engine {
        ts: req.tileset,
        w: req.width,
        h: req.height,
        torus: req.torus,
        mrv: req.mrv,
        budget: req.budget,
        nodes,
        stop,
        mark: vec![false; req.tileset.colors() as usize],
        removed: Vec::new(),
    };
    let mut engine = make(&nodes, &stop);
    let Some(mut doms) = initial_domains(req) else { return unsat(&nodes) };
    let start: Vec<usize> = (0..doms.len()).filter(|&i| matches!(doms[i], Dom::Set(_))).collect();
    if !engine.propagate(&mut doms, start) {
        return unsat(&nodes);
    }

    if req.symmetric && req.torus && req.mode == Mode::First {
        return symmetric_first(engine, doms, req, &nodes);
    }

    let parallel = req.jobs > 1 && req.mode != Mode::First && req.max_solutions.is_none();
    let (flows, sinks): (Vec<Flow>, Vec<Sink>) = match engine.pick(&doms) {
        Some(cell) if parallel => {
            let cands = engine.candidates(&doms[cell]);
            let pool = rayon::ThreadPoolBuilder::new().num_threads(req.jobs).build().expect("thread pool");
            let results: Vec<(Flow, Sink)> = pool.install(|| {
                cands
                    .par_iter()
                    .map(|&t| {
                        let mut e = make(&nodes, &stop);
                        let mut sink = Sink::new(req.mode, None);
                        let flow = match e.assign(&doms, cell, t) {
                            Err(()) => Flow::Exhausted,
                            Ok(None) => Flow::Continue,
                            Ok(Some(next)) => e.dfs(next, &mut sink),
                        };
                        if matches!(flow, Flow::Exhausted) {
                            stop.store(true, Ordering::Relaxed);
                        }
                        (flow, sink)
                    })
                    .collect()
            });
            results.into_iter().unzip()
        }
        _ => {
            let mut sink = Sink::new(req.mode, req.max_solutions);
            let flow = engine.dfs(doms, &mut sink);
            (vec![flow], vec![sink])
        }
    };

    let exhausted = flows.iter().any(|f| matches!(f, Flow::Exhausted));
    let mut count = 0u128;
    let mut patches = Vec::new();
    let mut truncated = false;
    for s in sinks {
        count += s.count;
        truncated |= s.truncated;
        patches.extend(s.patches);
    }
    let status = if exhausted && !(req.mode == Mode::First && count > 0) {
        Status::BudgetExhausted
    } else if count > 0 {
        Status::Sat
    } else {
        Status::Unsat
    };
    SolveResult { status, count, patches, nodes: nodes.load(Ordering::Relaxed).min(req.budget), truncated }
}

/// On a torus every tiling can be shifted so that any of its tiles sits at cell 0.
/// So each root candidate that fails at cell 0 fails everywhere and is dropped
/// from all later domains.
fn symmetric_first(mut e: Engine<'_>, doms: Vec<Dom>, req: &SolveRequest<'_>, nodes: &AtomicU64) -> SolveResult {
    e.removed = vec![false; e.ts.len()];
    let mut sink = Sink::new(Mode::First, None);
    let mut exhausted = false;
    for t in e.candidates(&doms[0]) {
        if e.removed[t as usize] {
            continue;
        }
        match e.assign(&doms, 0, t) {
            Err(()) => {
                exhausted = true;
                break;
            }
            Ok(None) => {}
            Ok(Some(next)) => match e.dfs(next, &mut sink) {
                Flow::Continue => {}
                Flow::Stop => break,
                Flow::Exhausted => {
                    exhausted = true;
                    break;
                }
            },
        }
        e.removed[t as usize] = true;
    }
    let status = if sink.count > 0 {
        Status::Sat
    } else if exhausted {
        Status::BudgetExhausted
    } else {
        Status::Unsat
    };
    SolveResult {
        status,
        count: sink.count,
        patches: sink.patches,
        nodes: nodes.load(Ordering::Relaxed).min(req.budget),
        truncated: false,
    }
}
