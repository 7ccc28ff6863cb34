mod out;
mod seq;
mod tiles;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use out::{Manifest, Out, Run};
use selfsim_core::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INPUT: u8 = 3;
/// No solution, or a check that came out negative.
pub const EXIT_NEGATIVE: u8 = 4;
pub const EXIT_BUDGET: u8 = 5;

#[derive(Parser, Debug, Serialize)]
#[command(name = "selfsim", version, about = "Self-simulating Wang tile sets: compile, solve, verify and measure")]
struct Cli {
    /// Node / step budget (each subcommand has its own default).
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; 1 is the reference behaviour.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Write a JSON run manifest here.
    #[arg(long, global = true)]
    #[serde(skip)]
    manifest: Option<PathBuf>,
    /// One JSON object per output record instead of whitespace tables.
    #[arg(long, global = true)]
    records: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Cmd {
    /// Compile a check program into a tile set for one macro-tile geometry.
    Compile(tiles::CompileArgs),
    /// Complete, count or enumerate patches (or torus tilings).
    Solve(tiles::SolveArgs),
    /// Check that τ simulates ρ with zoom N.
    VerifySim(tiles::VerifyArgs),
    /// Entropy bounds from strip transfer matrices.
    Entropy(tiles::EntropyArgs),
    /// Red/blue density table.
    Redblue(seq::RedBlueArgs),
    /// Letter delegation coverage and field consistency.
    EmbedCheck(seq::EmbedArgs),
    /// Recurrence at shifts divisible by q.
    Lemma2(seq::Lemma2Args),
    /// Recurrence of a factor of x ⊗ y, y periodic.
    Lemma3(seq::Lemma3Args),
    /// Canonical word of an effective shift.
    Canonical(seq::CanonicalArgs),
    /// Run a Turing machine directly.
    TmRun(tiles::TmRunArgs),
    /// Space-time diagram tiles of a machine.
    TmTiles(tiles::TmTilesArgs),
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Compile(_) => "compile",
            Cmd::Solve(_) => "solve",
            Cmd::VerifySim(_) => "verify-sim",
            Cmd::Entropy(_) => "entropy",
            Cmd::Redblue(_) => "redblue",
            Cmd::EmbedCheck(_) => "embed-check",
            Cmd::Lemma2(_) => "lemma2",
            Cmd::Lemma3(_) => "lemma3",
            Cmd::Canonical(_) => "canonical",
            Cmd::TmRun(_) => "tm-run",
            Cmd::TmTiles(_) => "tm-tiles",
        }
    }
}

fn error_code(e: &Error) -> u8 {
    match e {
        Error::Budget(_) => EXIT_BUDGET,
        Error::Extension { .. } => EXIT_NEGATIVE,
        _ => EXIT_INPUT,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    let mut run = Run { budget: cli.budget, seed: cli.seed, jobs: cli.jobs.max(1), inputs: Vec::new() };
    let mut out = Out::new(cli.records);
    let result = match &cli.cmd {
        Cmd::Compile(a) => tiles::compile(a, &mut run, &mut out),
        Cmd::Solve(a) => tiles::solve(a, &mut run, &mut out),
        Cmd::VerifySim(a) => tiles::verify_sim(a, &mut run, &mut out),
        Cmd::Entropy(a) => tiles::entropy(a, &mut run, &mut out),
        Cmd::Redblue(a) => seq::redblue(a, &mut run, &mut out),
        Cmd::EmbedCheck(a) => seq::embed_check(a, &mut run, &mut out),
        Cmd::Lemma2(a) => seq::lemma2(a, &mut run, &mut out),
        Cmd::Lemma3(a) => seq::lemma3(a, &mut run, &mut out),
        Cmd::Canonical(a) => seq::canonical(a, &mut run, &mut out),
        Cmd::TmRun(a) => tiles::tm_run(a, &mut run, &mut out),
        Cmd::TmTiles(a) => tiles::tm_tiles(a, &mut run, &mut out),
    };
    let (code, summary) = match result {
        Ok((code, summary)) => (code, summary),
        Err(e) => {
            eprintln!("selfsim {}: {e}", cli.cmd.name());
            (error_code(&e), format!("error: {e}"))
        }
    };
    print!("{}", out.text());
    if let Some(path) = &cli.manifest {
        let m = Manifest::new(cli.cmd.name(), &cli, &run, code, summary, out.text());
        if let Err(e) = m.write(path) {
            eprintln!("selfsim: cannot write manifest {}: {e}", path.display());
            return ExitCode::from(EXIT_INPUT);
        }
    }
    ExitCode::from(code)
}
