use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;

use selfsim_core::fixpoint::{
    compile as compile_set, intended_rho, layout, quasiperiodic_upgrade, skeleton_tiles, slot_demand, verify_simulation,
    Check, Instr, LayoutCodec, MacroCodec, ProgramBundle, ProgramTemplate, SkeletonCodec, VerifyOptions,
};
use selfsim_core::solver::{solve_patch, transfer_entropy_bounds, Mode, SolveRequest, Status};
use selfsim_core::tm::{check_determinacy, corpus, diagram_tiles, run_tm, Outcome, Sampling, TMachine};
use selfsim_core::wang::TileSet;
use selfsim_core::{Error, Result};

use crate::out::{Out, Run, V};
use crate::{EXIT_BUDGET, EXIT_NEGATIVE, EXIT_OK};

pub type Done = Result<(u8, String)>;

fn status_code(s: Status) -> u8 {
    match s {
        Status::Sat => EXIT_OK,
        Status::Unsat => EXIT_NEGATIVE,
        Status::BudgetExhausted => EXIT_BUDGET,
    }
}

/// `F` or `skeleton:N`.
fn load_tileset(spec: &str, run: &mut Run) -> Result<TileSet> {
    match spec.strip_prefix("skeleton:") {
        Some(n) => skeleton_tiles(n.parse().map_err(|_| Error::Input(format!("bad zoom in `{spec}`")))?),
        None => TileSet::parse(&run.read(std::path::Path::new(spec))?),
    }
}

/// `F` or `corpus:NAME`.
fn load_machine(spec: &str, run: &mut Run) -> Result<TMachine> {
    match spec.strip_prefix("corpus:") {
        Some(name) => corpus::all().into_iter().find(|m| m.name == name).ok_or_else(|| {
            let names: Vec<String> = corpus::all().into_iter().map(|m| m.name).collect();
            Error::Input(format!("no corpus machine `{name}` (have {})", names.join(", ")))
        }),
        None => TMachine::parse(&run.read(std::path::Path::new(spec))?),
    }
}

/// Digits (`0110`) or comma-separated numbers (`1,10,2`); empty is allowed.
fn parse_word(s: &str) -> Result<Vec<u32>> {
    let bad = || Error::Input(format!("bad symbol list `{s}`"));
    if s.contains(',') {
        s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
    } else {
        s.chars().map(|c| c.to_digit(10).ok_or_else(bad)).collect()
    }
}

#[derive(Args, Debug, Serialize)]
pub struct CompileArgs {
    /// Macro-tile side N.
    #[arg(long)]
    pub n: usize,
    /// Bits per macro-color.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Computation zone side.
    #[arg(long)]
    pub m: usize,
    /// Program template file; without it every slot accepts anything except
    /// slot 2, which checks bit 1 of the program's own text.
    #[arg(long)]
    pub program: Option<PathBuf>,
    /// Level written into the input row.
    #[arg(long)]
    pub level: Option<u64>,
    /// Add diversification slots for every 2×2 window of the computation zone.
    #[arg(long)]
    pub quasiperiodic: bool,
    /// Write the tile set here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn compile(a: &CompileArgs, run: &mut Run, out: &mut Out) -> Done {
    let template = match &a.program {
        Some(p) => ProgramTemplate::parse(&run.read(p)?)?,
        None => {
            let mut instrs = vec![Instr::Any; 4 * a.k];
            if instrs.len() > 2 {
                instrs[2] = Instr::SelfBit(1);
            }
            ProgramTemplate::new("demo", instrs)
        }
    };
    let bundle = ProgramBundle::from_template(template)?;
    let mut geo = layout(a.n, a.k, a.m)?;
    if a.quasiperiodic {
        let demand = slot_demand(&bundle, &geo)?;
        geo = quasiperiodic_upgrade(&geo, &demand)?;
    }
    let audit = geo.audit();
    let c = compile_set(&bundle, &geo, a.level)?;
    let n2 = (a.n * a.n) as f64;
    out.fact("layout", &[("n", a.n.into()), ("k", a.k.into()), ("m", a.m.into()), ("slots", geo.slots.len().into())]);
    out.fact(
        "audit",
        &[
            ("ok", audit.ok().into()),
            ("min_wire_distance", audit.min_wire_distance.map_or(V::from("-"), V::from)),
            ("wire_gap", audit.wire_gap_ok.into()),
            ("slots", audit.slots_ok.into()),
        ],
    );
    for p in &audit.problems {
        out.fact("problem", &[("text", p.as_str().into())]);
    }
    let text: String = bundle.text.iter().map(|b| char::from(b'0' + b)).collect();
    out.fact("program", &[("name", bundle.name().into()), ("length", bundle.text.len().into()), ("text", text.into())]);
    let roundtrip = c.hardwired_text().get(..bundle.text.len()) == Some(&bundle.text[..]);
    out.fact("roundtrip", &[("ok", roundtrip.into())]);
    out.fact(
        "tiles",
        &[
            ("count", c.tileset.len().into()),
            ("colors", c.tileset.colors().into()),
            ("per_cell", (c.tileset.len() as f64 / n2).into()),
        ],
    );
    if let Some(p) = &a.out {
        run.write(p, &c.tileset.to_text())?;
    }
    let ok = audit.ok() && roundtrip;
    Ok((if ok { EXIT_OK } else { EXIT_NEGATIVE }, format!("{} tiles", c.tileset.len())))
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    First,
    Count,
    Enumerate,
}

#[derive(Args, Debug, Serialize)]
pub struct SolveArgs {
    /// Tile set file or `skeleton:N`.
    #[arg(long)]
    pub tileset: String,
    #[arg(long)]
    pub width: usize,
    #[arg(long)]
    pub height: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::First)]
    pub mode: ModeArg,
    /// Periodic boundary in both directions.
    #[arg(long)]
    pub torus: bool,
    /// Fixed cell `x,y,tile` (repeatable).
    #[arg(long)]
    pub fix: Vec<String>,
    /// Stop enumerating after this many patches.
    #[arg(long)]
    pub max_solutions: Option<usize>,
}

pub fn solve(a: &SolveArgs, run: &mut Run, out: &mut Out) -> Done {
    let ts = load_tileset(&a.tileset, run)?;
    let mode = match a.mode {
        ModeArg::First => Mode::First,
        ModeArg::Count => Mode::Count,
        ModeArg::Enumerate => Mode::Enumerate,
    };
    let mut req = SolveRequest::new(&ts, a.width, a.height)
        .mode(mode)
        .torus(a.torus)
        .budget(run.budget_or(10_000_000))
        .jobs(run.jobs);
    req.max_solutions = a.max_solutions;
    for f in &a.fix {
        let v: Vec<usize> = f.split(',').map(|t| t.trim().parse()).collect::<std::result::Result<_, _>>().map_err(|_| {
            Error::Input(format!("bad --fix `{f}`, expected x,y,tile"))
        })?;
        let [x, y, t] = v[..] else { return Err(Error::Input(format!("bad --fix `{f}`, expected x,y,tile"))) };
        req = req.fix(x, y, t as u32);
    }
    let r = solve_patch(&req)?;
    match mode {
        Mode::First => {
            out.fact("status", &[("status", r.status.as_str().into()), ("nodes", r.nodes.into())]);
        }
        _ => {
            out.fact("count", &[("count", r.count.into()), ("status", r.status.as_str().into())]);
            if r.truncated {
                out.fact("truncated", &[("after", r.patches.len().into())]);
            }
        }
    }
    if mode != Mode::Count {
        for p in &r.patches {
            out.block("patch", &p.to_text());
        }
    }
    Ok((status_code(r.status), format!("{} {}", r.status.as_str(), r.count)))
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    /// Simulating set: file or `skeleton:N` (decoded with the skeleton codec).
    #[arg(long, required_unless_present = "program")]
    pub tau: Option<String>,
    /// Simulated set; defaults to the intended one for `--program`.
    #[arg(long)]
    pub rho: Option<String>,
    /// Zoom.
    #[arg(long)]
    pub n: usize,
    /// Compile this program template and check it against its intended set.
    #[arg(long, conflicts_with = "tau")]
    pub program: Option<PathBuf>,
    /// `k,m` of the compiled layout (with `--program`).
    #[arg(long, default_value = "1,24")]
    pub geometry: String,
    #[arg(long, default_value_t = 4096)]
    pub max_macro_tiles: usize,
    #[arg(long, default_value_t = 2000)]
    pub pairs: usize,
}

pub fn verify_sim(a: &VerifyArgs, run: &mut Run, out: &mut Out) -> Done {
    let opts = VerifyOptions {
        budget: run.budget_or(10_000_000),
        max_macro_tiles: a.max_macro_tiles,
        pair_samples: a.pairs,
        seed: run.seed,
    };
    let report = if let Some(p) = &a.program {
        let t = ProgramTemplate::parse(&run.read(p)?)?;
        let km: Vec<usize> = a.geometry.split(',').filter_map(|s| s.trim().parse().ok()).collect();
        let [k, m] = km[..] else { return Err(Error::Input(format!("bad --geometry `{}`", a.geometry))) };
        let c = compile_set(&ProgramBundle::from_template(t)?, &layout(a.n, k, m)?, None)?;
        let rho = match &a.rho {
            Some(r) => load_tileset(r, run)?,
            None => intended_rho(&c)?,
        };
        verify_simulation(&c.tileset, &rho, a.n, &LayoutCodec { compiled: &c } as &dyn MacroCodec, opts)?
    } else {
        let tau = load_tileset(a.tau.as_deref().expect("clap enforces"), run)?;
        let rho = load_tileset(a.rho.as_deref().ok_or_else(|| Error::Input("--rho is required with --tau".into()))?, run)?;
        verify_simulation(&tau, &rho, a.n, &SkeletonCodec { n: a.n as u32 }, opts)?
    };
    let checks = [("constructive", &report.constructive), ("soundness", &report.soundness), ("faithfulness", &report.faithfulness)];
    for (name, c) in checks {
        match c {
            Check::Pass => out.fact(name, &[("result", c.label().into())]),
            Check::Fail(s) | Check::Unverified(s) => out.fact(name, &[("result", c.label().into()), ("detail", s.as_str().into())]),
        }
    }
    out.fact(
        "stats",
        &[("macro_tiles", report.macro_tiles.into()), ("pairs", report.pairs_checked.into()), ("nodes", report.nodes.into())],
    );
    let unverified = checks.iter().any(|(_, c)| matches!(c, Check::Unverified(_)));
    let code = if report.passed() {
        EXIT_OK
    } else if unverified && !checks.iter().any(|(_, c)| matches!(c, Check::Fail(_))) {
        EXIT_BUDGET
    } else {
        EXIT_NEGATIVE
    };
    out.fact("verdict", &[("result", if report.passed() { "pass" } else { "fail" }.into())]);
    Ok((code, if report.passed() { "pass".into() } else { "fail".into() }))
}

#[derive(Args, Debug, Serialize)]
pub struct EntropyArgs {
    #[arg(long)]
    pub tileset: String,
    #[arg(long, default_value_t = 10)]
    pub max_width: usize,
    /// Assert left-right reflection symmetry (enables the rigorous lower bound).
    #[arg(long)]
    pub symmetric: bool,
}

pub fn entropy(a: &EntropyArgs, run: &mut Run, out: &mut Out) -> Done {
    let ts = load_tileset(&a.tileset, run)?;
    let b = transfer_entropy_bounds(&ts, a.max_width, run.budget_or(50_000_000), a.symmetric);
    out.table("width", &["width", "log2_free_per_col", "log2_cyclic_per_col"]);
    for w in &b.per_width {
        let per = |v: f64| V::from(v / w.width as f64);
        out.row(vec![w.width.into(), per(w.log2_free), w.log2_cyclic.map_or(V::from("-"), per)]);
    }
    out.fact(
        "bounds",
        &[
            ("lower", b.lower.into()),
            ("upper", b.upper.into()),
            ("width", b.width.into()),
            ("lower_rigorous", b.lower_rigorous.into()),
            ("exhausted", b.exhausted.into()),
        ],
    );
    Ok((if b.exhausted { EXIT_BUDGET } else { EXIT_OK }, format!("[{:.6}, {:.6}]", b.lower, b.upper)))
}

#[derive(Args, Debug, Serialize)]
pub struct TmRunArgs {
    /// Machine file or `corpus:NAME`.
    #[arg(long)]
    pub machine: String,
    /// Input symbols: digits, or comma-separated numbers.
    #[arg(long, default_value = "")]
    pub input: String,
    /// Read-only bits under the tape cells.
    #[arg(long)]
    pub ro: Option<String>,
    #[arg(long, default_value_t = 1000)]
    pub max_steps: usize,
    #[arg(long, default_value_t = 1000)]
    pub max_cells: usize,
    /// Print every configuration.
    #[arg(long)]
    pub trace: bool,
}

pub fn tm_run(a: &TmRunArgs, run: &mut Run, out: &mut Out) -> Done {
    let m = load_machine(&a.machine, run)?;
    let input = parse_word(&a.input)?;
    let ro: Option<Vec<u8>> = a.ro.as_deref().map(parse_word).transpose()?.map(|v| v.into_iter().map(|b| b as u8).collect());
    let t = run_tm(&m, &input, ro.as_deref(), a.max_steps, a.max_cells)?;
    out.fact("outcome", &[("outcome", t.outcome.as_str().into()), ("steps", t.steps().into())]);
    if a.trace {
        out.table("config", &["step", "state", "head", "tape"]);
        for (i, c) in t.configs.iter().enumerate() {
            let last = c.tape.iter().rposition(|&s| s != 0).map_or(0, |p| p + 1).max(c.head + 1);
            let tape: Vec<String> = c.tape[..last].iter().map(|s| s.to_string()).collect();
            out.row(vec![i.into(), c.state.into(), c.head.into(), tape.join(",").into()]);
        }
    }
    let code = match t.outcome {
        Outcome::Accept | Outcome::Stuck => EXIT_OK,
        Outcome::StepLimit | Outcome::SpaceLimit => EXIT_BUDGET,
    };
    Ok((code, t.outcome.as_str().into()))
}

#[derive(Args, Debug, Serialize)]
pub struct TmTilesArgs {
    #[arg(long)]
    pub machine: String,
    /// Write the diagram tile set here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Run the 2×2 determinacy check.
    #[arg(long)]
    pub determinacy: bool,
    /// Also solve a frame of this size for `--input` and compare with a direct run.
    #[arg(long)]
    pub frame: Option<usize>,
    #[arg(long, default_value = "")]
    pub input: String,
}

pub fn tm_tiles(a: &TmTilesArgs, run: &mut Run, out: &mut Out) -> Done {
    let m = load_machine(&a.machine, run)?;
    let dt = diagram_tiles(&m);
    out.fact("tiles", &[("count", dt.tileset.len().into()), ("colors", dt.tileset.colors().into())]);
    if let Some(p) = &a.out {
        run.write(p, &dt.tileset.to_text())?;
    }
    let mut code = EXIT_OK;
    if a.determinacy {
        let r = check_determinacy(&dt.tileset, Sampling::Exhaustive, run.budget_or(10_000_000))?;
        out.fact(
            "determinacy",
            &[("deterministic", r.deterministic.into()), ("blocks", r.blocks.into()), ("exhausted", r.exhausted.into())],
        );
        if r.exhausted {
            code = EXIT_BUDGET;
        } else if !r.deterministic {
            code = EXIT_NEGATIVE;
        }
    }
    if let Some(size) = a.frame {
        let input = parse_word(&a.input)?;
        let r = dt.solve_frame(&input, None, size, run.budget_or(10_000_000))?;
        let t = run_tm(&m, &input, None, size, size)?;
        let agree = r.status != Status::BudgetExhausted && (r.status == Status::Sat) == (t.outcome == Outcome::Accept);
        out.fact(
            "frame",
            &[
                ("size", size.into()),
                ("status", r.status.as_str().into()),
                ("run", t.outcome.as_str().into()),
                ("agree", agree.into()),
            ],
        );
        if r.status == Status::BudgetExhausted {
            code = EXIT_BUDGET;
        } else if !agree {
            code = EXIT_NEGATIVE;
        }
    }
    Ok((code, format!("{} tiles", dt.tileset.len())))
}
