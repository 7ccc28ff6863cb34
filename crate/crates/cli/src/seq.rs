use std::path::PathBuf;
use std::str::FromStr;

use clap::Args;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use selfsim_core::entropy::{beta_schedule, density_recursion, DensityPair, ReEnumerator, RedBlueParams};
use selfsim_core::fixpoint::{layout, ZoomSchedule};
use selfsim_core::shifts1d::{
    canonical_config, check_fields, coverage_gaps, delegation, generate_fieldsets, lemma2_bound, lemma2_find, lemma3_check,
    ForbiddenWordSource, Lemma3Verdict, MacroRole, SequenceSource,
};
use selfsim_core::{Error, Result};

use crate::out::{Out, Run, V};
use crate::tiles::Done;
use crate::{EXIT_BUDGET, EXIT_NEGATIVE, EXIT_OK};

fn rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Input(format!("bad rational `{s}`"));
    let text = match s.split_once('.') {
        Some((int, frac)) if !s.contains('/') => {
            format!("{int}{frac}/1{}", "0".repeat(frac.len()))
        }
        _ => s.to_string(),
    };
    BigRational::from_str(&text).map_err(|_| bad())
}

fn show(q: &BigRational, exact: bool) -> V {
    if exact {
        V::from(q.to_string())
    } else {
        V::from(q.to_f64().unwrap_or(f64::NAN))
    }
}

fn digits(text: &str) -> Result<Vec<u8>> {
    text.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(|| Error::Input(format!("bad symbol `{c}`"))))
        .collect()
}

/// `thue-morse`, `periodic:<w>`, `word:<w>` or `file:<F>`.
fn sequence(spec: &str, run: &mut Run) -> Result<SequenceSource> {
    match spec.strip_prefix("file:") {
        Some(p) => Ok(SequenceSource::Word(digits(&run.read(std::path::Path::new(p))?)?)),
        None => SequenceSource::parse(spec),
    }
}

#[derive(Args, Debug, Serialize)]
pub struct RedBlueArgs {
    /// Doubly exponential schedule `N_k = 3^(C^k)`.
    #[arg(long = "C", conflicts_with = "toy")]
    pub c: Option<u32>,
    /// Constant toy schedule `N_k = N`.
    #[arg(long)]
    pub toy: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub alpha: u64,
    /// `auto` (steer towards --h-enum) or `const:B`.
    #[arg(long, default_value = "const:1")]
    pub beta_schedule: String,
    /// Target from above: `const:P/Q`, `list:1,3/4,5/8` or `file:F` (one value per line).
    #[arg(long)]
    pub h_enum: Option<String>,
    #[arg(long)]
    pub levels: u32,
    /// Print exact rationals.
    #[arg(long)]
    pub exact: bool,
    #[arg(long, default_value_t = 0.01)]
    pub tolerance: f64,
}

fn enumerator(spec: &str, run: &mut Run) -> Result<ReEnumerator> {
    if let Some(v) = spec.strip_prefix("const:") {
        return Ok(ReEnumerator::constant(rational(v)?));
    }
    let list: Vec<BigRational> = if let Some(v) = spec.strip_prefix("list:") {
        v.split(',').map(rational).collect::<Result<_>>()?
    } else if let Some(p) = spec.strip_prefix("file:") {
        run.read(std::path::Path::new(p))?
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(rational)
            .collect::<Result<_>>()?
    } else {
        return Err(Error::Input(format!("bad --h-enum `{spec}`")));
    };
    ReEnumerator::from_list(list)
}

pub fn redblue(a: &RedBlueArgs, run: &mut Run, out: &mut Out) -> Done {
    let schedule = match (a.c, a.toy) {
        (Some(c), None) if c >= 1 => ZoomSchedule::Doubly { c },
        (None, Some(n)) => ZoomSchedule::Constant { n },
        _ => return Err(Error::Input("give exactly one of --C (≥ 1) and --toy".into())),
    };
    let h = a.h_enum.as_deref().map(|s| enumerator(s, run)).transpose()?;
    let (betas, dens, predicted): (Vec<u64>, Vec<DensityPair>, Option<u32>) = if a.beta_schedule == "auto" {
        let h = h.as_ref().ok_or_else(|| Error::Input("--beta-schedule auto needs --h-enum".into()))?;
        let t = beta_schedule(h, schedule, a.alpha, a.levels, a.tolerance)?;
        (t.steps.iter().map(|s| s.beta).collect(), t.steps.into_iter().map(|s| s.density).collect(), t.predicted_level)
    } else {
        let b: u64 = a
            .beta_schedule
            .strip_prefix("const:")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::Input(format!("bad --beta-schedule `{}`", a.beta_schedule)))?;
        let p = RedBlueParams::constant(schedule, a.alpha, b, a.levels);
        let d = density_recursion(&p, a.levels)?;
        (vec![b; a.levels as usize], d.into_iter().skip(1).collect(), None)
    };
    out.table("level", &["k", "nu_R", "nu_B", "beta_k", "approx_h"]);
    for (i, (d, b)) in dens.iter().zip(&betas).enumerate() {
        let k = i as u32 + 1;
        let approx = h.as_ref().map_or(V::from("-"), |h| show(&h.approx(k as u64), a.exact));
        out.row(vec![k.into(), show(&d.red, a.exact), show(&d.blue, a.exact), (*b).into(), approx]);
    }
    if a.beta_schedule == "auto" {
        out.fact("predicted", &[("level", predicted.map_or(V::from("-"), V::from)), ("tolerance", a.tolerance.into())]);
    }
    Ok((EXIT_OK, format!("{} levels", dens.len())))
}

#[derive(Args, Debug, Serialize)]
pub struct EmbedArgs {
    /// `C` of the schedule `N_k = 3^(C^k)`.
    #[arg(long)]
    pub schedule: u32,
    #[arg(long)]
    pub levels: u32,
    /// Word of digits; the embedded sequence repeats it.
    #[arg(long)]
    pub word: PathBuf,
    /// Rows of level-k macro-tiles in the checked grid.
    #[arg(long, default_value_t = 3)]
    pub rows: i64,
}

pub fn embed_check(a: &EmbedArgs, run: &mut Run, out: &mut Out) -> Done {
    let word = digits(&run.read(&a.word)?)?;
    if word.is_empty() || a.schedule == 0 || a.levels == 0 {
        return Err(Error::Input("need a nonempty word, C ≥ 1 and at least one level".into()));
    }
    let z = ZoomSchedule::Doubly { c: a.schedule };
    let letter = |p: i64| word[p.rem_euclid(word.len() as i64) as usize];
    let mut bad = 0usize;
    out.table("level", &["k", "L_k", "l_k", "modulus", "coverage_gaps", "fieldsets", "violations"]);
    for k in 1..=a.levels {
        let d = delegation(&z, k, 0, 0)?;
        let upper = z.l_u64(k + 1).map_or(i64::MAX, |l| l as i64).saturating_mul(3).min(1 << 22);
        let gaps = coverage_gaps(&z, k, -(d.big_l as i64)..upper)?;
        let nf = z.n_u64(k + 1).ok_or_else(|| Error::Sizing(format!("N_{} overflows", k + 1)))?;
        let geo = if nf <= 4096 { layout(nf as usize, 1, 17).ok() } else { None };
        let role = |x: u64, y: u64| geo.as_ref().map_or(MacroRole::Plain, |l| MacroRole::in_layout(l, x as usize, y as usize));
        let cols = (nf as i64 + 8).min(96);
        let mut sets = generate_fieldsets(&z, k, &letter, 0..cols, 0..a.rows, &role)?;
        // fathers, when the schedule still fits 64 bits two levels up
        if let Ok(f) = generate_fieldsets(&z, k + 1, &letter, -1..2, 0..1, &|_, _| MacroRole::Plain) {
            sets.extend(f);
        }
        let r = check_fields(&sets, &letter);
        bad += gaps.len() + r.violations.len();
        out.row(vec![
            k.into(),
            d.big_l.into(),
            d.chunk_len.into(),
            d.modulus.into(),
            gaps.len().into(),
            r.checked.into(),
            r.violations.len().into(),
        ]);
    }
    Ok((if bad == 0 { EXIT_OK } else { EXIT_NEGATIVE }, format!("{bad} problems")))
}

#[derive(Args, Debug, Serialize)]
pub struct Lemma2Args {
    /// `thue-morse`, `periodic:<w>`, `word:<w>` or `file:<F>`.
    #[arg(long)]
    pub seq: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub q: usize,
    #[arg(long, default_value_t = 1 << 16)]
    pub window: usize,
    /// Also find the least recurrence of the length-n factor at this position.
    #[arg(long)]
    pub find: Option<usize>,
}

pub fn lemma2(a: &Lemma2Args, run: &mut Run, out: &mut Out) -> Done {
    let src = sequence(&a.seq, run)?;
    let b = lemma2_bound(&src, a.n, a.q, a.window)?;
    out.table("window", &["window", "L"]);
    for (w, l) in &b.runs {
        out.row(vec![(*w).into(), l.map_or(V::from("-"), V::from)]);
    }
    out.fact("bound", &[("L", b.value().map_or(V::from("-"), V::from)), ("saturated", b.saturated.into()), ("window", b.window().into())]);
    if let Some(pos) = a.find {
        let s = lemma2_find(&src, pos, a.n, a.q, a.window)?;
        out.fact("shift", &[("pos", pos.into()), ("shift", s.map_or(V::from("not-found"), V::from)), ("horizon", a.window.into())]);
    }
    Ok((if b.saturated { EXIT_OK } else { EXIT_BUDGET }, format!("L {:?} saturated {}", b.value(), b.saturated)))
}

#[derive(Args, Debug, Serialize)]
pub struct Lemma3Args {
    #[arg(long)]
    pub x: String,
    /// Period word of y, digits.
    #[arg(long)]
    pub y: String,
    /// Factor of x ⊗ y as `a:b` pairs separated by commas.
    #[arg(long)]
    pub v: String,
    #[arg(long, default_value_t = 1 << 16)]
    pub window: usize,
}

pub fn lemma3(a: &Lemma3Args, run: &mut Run, out: &mut Out) -> Done {
    let x = sequence(&a.x, run)?;
    let y = digits(&a.y)?;
    let v: Vec<(u8, u8)> = a
        .v
        .split(',')
        .map(|p| {
            let (s, t) = p.trim().split_once(':').ok_or_else(|| Error::Input(format!("bad pair `{p}`")))?;
            let d = |s: &str| s.parse::<u8>().map_err(|_| Error::Input(format!("bad pair `{p}`")));
            Ok((d(s)?, d(t)?))
        })
        .collect::<Result<_>>()?;
    let r = lemma3_check(&x, &y, &v, a.window)?;
    let (verdict, gap) = match r.verdict {
        Lemma3Verdict::Absent => ("absent", V::from("-")),
        Lemma3Verdict::Recurs { gap } => ("recurs", V::from(gap)),
        Lemma3Verdict::Inconclusive => ("inconclusive", V::from("-")),
    };
    out.fact("verdict", &[("verdict", verdict.into()), ("gap", gap), ("occurrences", r.occurrences.into()), ("window", r.window.into())]);
    out.fact(
        "decision",
        &[("occurs", r.decided.map_or(V::from("-"), V::from)), ("scanned", r.scanned.into())],
    );
    let code = match r.verdict {
        Lemma3Verdict::Recurs { .. } => EXIT_OK,
        Lemma3Verdict::Absent => EXIT_NEGATIVE,
        Lemma3Verdict::Inconclusive => EXIT_BUDGET,
    };
    Ok((code, verdict.into()))
}

#[derive(Args, Debug, Serialize)]
pub struct CanonicalArgs {
    /// `alphabet <symbols>` then one forbidden word per line.
    #[arg(long)]
    pub forbidden: PathBuf,
    #[arg(long)]
    pub length: usize,
}

pub fn canonical(a: &CanonicalArgs, run: &mut Run, out: &mut Out) -> Done {
    let f = ForbiddenWordSource::parse(&run.read(&a.forbidden)?)?;
    let budget = run.budget_or(64);
    let c = canonical_config(&f, a.length, budget)?;
    out.fact("word", &[("word", c.render(&f.alphabet).into())]);
    out.fact(
        "alignment",
        &[("x", c.standard_alignment.0.into()), ("y", c.standard_alignment.1.into()), ("left_extensions", c.left_extensions.into())],
    );
    Ok((EXIT_OK, format!("length {}", c.word.len())))
}
