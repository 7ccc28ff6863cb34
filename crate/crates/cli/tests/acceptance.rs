//! Criteria 1–12, one PASS/FAIL line each. Run with
//! `cargo test -p selfsim-cli --release --test acceptance -- --nocapture`.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use selfsim_core::entropy::{
    beta_schedule, density_recursion, doubled_pattern_density, expand_colors, ColorMap, ReEnumerator, RedBlueParams,
};
use selfsim_core::fixpoint::{
    compile, layout, self_referential_program, skeleton_tiles, verify_simulation, Instr, ProgramBundle, ProgramTemplate,
    SkeletonCodec, VerifyOptions, ZoomSchedule,
};
use selfsim_core::shifts1d::{
    check_fields, coverage_gaps, generate_fieldsets, lemma2_bound, lemma2_find, FieldSet, MacroRole, SequenceSource,
};
use selfsim_core::solver::{count_patterns, torus_tilings, transfer_entropy_bounds, Status};
use selfsim_core::tm::{check_determinacy, corpus, diagram_tiles, run_tm, Outcome, Sampling};
use selfsim_core::wang::TileSet;

type Verdict = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(t: Instant, limit: Duration) -> Result<(), String> {
    ensure(t.elapsed() < limit, || format!("took {:?}, limit {limit:?}", t.elapsed()))
}

fn full_shift() -> TileSet {
    TileSet::with_letters("full", 1, &[([0, 0, 0, 0], Some("a")), ([0, 0, 0, 0], Some("b"))]).unwrap()
}

fn c1() -> Verdict {
    let t = Instant::now();
    let ts = full_shift();
    for (k, want) in [(1usize, 2u32), (2, 16), (3, 512), (4, 65536)] {
        let got = count_patterns(&ts, k, 10_000_000).map_err(|e| e.to_string())?;
        ensure(got == want.into(), || format!("k={k}: {got} != {want}"))?;
    }
    within(t, Duration::from_secs(1))?;
    Ok(format!("2^(k²) for k ≤ 4 in {:?}", t.elapsed()))
}

fn golden_mean() -> TileSet {
    let mut quads = Vec::new();
    for a in 0..2 {
        for b in 0..2 {
            quads.push([a, 0, 0, b]);
        }
    }
    quads.push([0, 1, 1, 0]);
    TileSet::new("golden", 2, &quads).unwrap()
}

/// log2 of the growth rate of width-`w` strips of the hard-square shift, by
/// power iteration on rows with no two adjacent ones.
fn hard_square_strip_log2(w: usize) -> f64 {
    let rows: Vec<u32> = (0..1u32 << w).filter(|r| r & (r >> 1) == 0).collect();
    let mut v = vec![1.0f64; rows.len()];
    let mut log = 0.0;
    for _ in 0..400 {
        let next: Vec<f64> = rows
            .iter()
            .map(|&a| rows.iter().zip(&v).filter(|(&b, _)| a & b == 0).map(|(_, x)| x).sum())
            .collect();
        let norm = next.iter().cloned().fold(0.0, f64::max);
        log = norm.log2();
        v = next.into_iter().map(|x| x / norm).collect();
    }
    log
}

fn c2() -> Verdict {
    let t = Instant::now();
    let oracle = hard_square_strip_log2(12) - hard_square_strip_log2(11);
    let b = transfer_entropy_bounds(&golden_mean(), 10, 200_000_000, true);
    ensure(b.width >= 10 && !b.exhausted, || format!("stopped at width {}", b.width))?;
    ensure(b.lower <= oracle + 1e-9 && oracle <= b.upper + 1e-9, || format!("[{}, {}] misses {oracle}", b.lower, b.upper))?;
    ensure(b.upper - oracle < 0.02 && oracle - b.lower < 0.02, || format!("[{}, {}] vs {oracle}", b.lower, b.upper))?;
    within(t, Duration::from_secs(60))?;
    Ok(format!("[{:.5}, {:.5}] ∋ {oracle:.5}", b.lower, b.upper))
}

fn c3() -> Verdict {
    let t = Instant::now();
    let machines = corpus::all();
    ensure(machines.len() >= 5 && machines.iter().all(|m| m.states <= 4), || "corpus too small or too big".into())?;
    let mut frames = 0;
    for m in &machines {
        let dt = diagram_tiles(m);
        for input in corpus::inputs(m, 4) {
            for size in input.len().max(1)..=8 {
                let run = run_tm(m, &input, None, size, size).map_err(|e| e.to_string())?;
                let r = dt.solve_frame(&input, None, size, 50_000_000).map_err(|e| e.to_string())?;
                ensure(r.status != Status::BudgetExhausted, || format!("{} {input:?} {size}: budget", m.name))?;
                ensure((run.outcome == Outcome::Accept) == (r.status == Status::Sat), || {
                    format!("{} {input:?} size {size}: run {:?}, frame {:?}", m.name, run.outcome, r.status)
                })?;
                frames += 1;
            }
        }
    }
    within(t, Duration::from_secs(300))?;
    Ok(format!("{} machines, {frames} frames, 0 discrepancies", machines.len()))
}

fn c4() -> Verdict {
    for m in corpus::all() {
        let dt = diagram_tiles(&m);
        let r = check_determinacy(&dt.tileset, Sampling::Exhaustive, 50_000_000).map_err(|e| e.to_string())?;
        ensure(r.deterministic && !r.exhausted, || format!("{} not determined", m.name))?;
        // a duplicated tile with a distinct letter: same border, two fillings
        let twin = *dt.tileset.tile(0);
        let bad = dt.tileset.with_extra_tiles("mutant", &[(twin, Some("twin"))]).map_err(|e| e.to_string())?;
        let r = check_determinacy(&bad, Sampling::Exhaustive, 50_000_000).map_err(|e| e.to_string())?;
        ensure(!r.deterministic && r.counterexample.is_some(), || format!("{} mutant accepted", m.name))?;
    }
    Ok("corpus determined, every mutant caught".into())
}

fn demo_bundle() -> ProgramBundle {
    let mut instrs = vec![Instr::Any; 4];
    instrs[2] = Instr::SelfBit(1);
    ProgramBundle::from_template(ProgramTemplate::new("demo", instrs)).unwrap()
}

fn c5() -> Verdict {
    let b = demo_bundle();
    let mut ratios = Vec::new();
    for n in [96usize, 128, 160] {
        let geo = layout(n, 1, n / 4).map_err(|e| e.to_string())?;
        let audit = geo.audit();
        ensure(audit.wire_gap_ok && audit.min_wire_distance.is_some_and(|d| d > 2), || format!("N={n}: wire gap {audit:?}"))?;
        ensure(audit.slots_ok, || format!("N={n}: slots {audit:?}"))?;
        let c = compile(&b, &geo, None).map_err(|e| e.to_string())?;
        ensure(c.hardwired_text().get(..b.text.len()) == Some(&b.text[..]), || format!("N={n}: text differs"))?;
        ratios.push(c.tileset.len() as f64 / (n * n) as f64);
    }
    let c = 2.0;
    ensure(ratios.iter().all(|&r| r <= c), || format!("ratios {ratios:?}"))?;
    let t = ProgramTemplate::new("selfref", vec![Instr::Any, Instr::SelfBit(2), Instr::Any, Instr::SelfBit(5)]);
    let s = self_referential_program(t).map_err(|e| e.to_string())?;
    let cs = compile(&s, &layout(96, 1, 24).map_err(|e| e.to_string())?, None).map_err(|e| e.to_string())?;
    ensure(cs.hardwired_text().get(..s.text.len()) == Some(&s.text[..]), || "self-referential text differs".into())?;
    Ok(format!("tiles/N² = {:.3?} ≤ {c}, audits clean, round-trip exact", ratios))
}

fn c6() -> Verdict {
    let b = demo_bundle();
    for n in [88usize, 96] {
        let c = compile(&b, &layout(n, 1, 22).map_err(|e| e.to_string())?, None).map_err(|e| e.to_string())?;
        for p in 1..=4 {
            for q in 1..=4 {
                let r = torus_tilings(&c.tileset, p, q, 100_000_000, false, 1).map_err(|e| e.to_string())?;
                ensure(r.exists == Status::Unsat, || format!("N={n}: ({p},{q}) gave {:?}", r.exists))?;
            }
        }
    }
    let sk = skeleton_tiles(3).map_err(|e| e.to_string())?;
    let yes = torus_tilings(&sk, 3, 3, 1_000_000, false, 1).map_err(|e| e.to_string())?;
    let no = torus_tilings(&sk, 2, 2, 1_000_000, false, 1).map_err(|e| e.to_string())?;
    ensure(yes.exists == Status::Sat && no.exists == Status::Unsat, || format!("skeleton {:?} {:?}", yes.exists, no.exists))?;
    Ok("no period ≤ 4 at N ∈ {88, 96}; skeleton(3) tiles 3×3, not 2×2".into())
}

fn one_tile() -> TileSet {
    TileSet::new("one", 1, &[[0, 0, 0, 0]]).unwrap()
}

fn c7() -> Verdict {
    let t = Instant::now();
    let tau = skeleton_tiles(3).map_err(|e| e.to_string())?;
    let opts = VerifyOptions { pair_samples: usize::MAX, ..Default::default() };
    let r = verify_simulation(&tau, &one_tile(), 3, &SkeletonCodec { n: 3 }, opts).map_err(|e| e.to_string())?;
    ensure(r.passed(), || format!("{r:?}"))?;
    within(t, Duration::from_secs(60))?;
    Ok(format!("{} macro-tiles, {} pairs, all three checks pass", r.macro_tiles, r.pairs_checked))
}

fn c8() -> Verdict {
    let t = Instant::now();
    let tm = SequenceSource::thue_morse();
    let w = tm.prefix(1 << 16).map_err(|e| e.to_string())?;
    let mut finds = 0;
    for n in 1..=6 {
        let mut seen = std::collections::BTreeSet::new();
        for pos in 0..w.len() - n {
            if !seen.insert(&w[pos..pos + n]) {
                continue;
            }
            for q in 1..=6 {
                let s = lemma2_find(&tm, pos, n, q, 1 << 16).map_err(|e| e.to_string())?;
                let s = s.ok_or_else(|| format!("n={n} pos={pos} q={q}: none"))?;
                ensure(s != 0 && s % q as i64 == 0, || format!("shift {s} for q={q}"))?;
                ensure(w[(pos as i64 + s) as usize..][..n] == w[pos..pos + n], || format!("bad shift {s}"))?;
                finds += 1;
            }
        }
        for q in 1..=6 {
            let lo = lemma2_bound(&tm, n, q, 1 << 14).map_err(|e| e.to_string())?;
            let hi = lemma2_bound(&tm, n, q, 1 << 16).map_err(|e| e.to_string())?;
            ensure(lo.saturated && hi.saturated && lo.value() == hi.value(), || format!("n={n} q={q}: {lo:?} vs {hi:?}"))?;
        }
    }
    within(t, Duration::from_secs(120))?;
    Ok(format!("{finds} factor/q pairs recur at multiples of q; bounds saturate"))
}

fn tm_letter(p: i64) -> u8 {
    ((p as u64).count_ones() % 2) as u8
}

fn c9() -> Verdict {
    let z = ZoomSchedule::Doubly { c: 2 };
    for k in 1..=2 {
        let l = z.l_u64(k + 1).unwrap() as i64;
        let big = z.l_u64(k).unwrap() as i64;
        let gaps = coverage_gaps(&z, k, -big..3 * l).map_err(|e| e.to_string())?;
        ensure(gaps.is_empty(), || format!("level {k}: {} uncovered starts", gaps.len()))?;
    }
    let geo = layout(81, 1, 17).map_err(|e| e.to_string())?;
    let role = |x: u64, y: u64| MacroRole::in_layout(&geo, x as usize, y as usize);
    let mut sets: Vec<FieldSet> = generate_fieldsets(&z, 1, &tm_letter, 0..30, 0..4, &role).map_err(|e| e.to_string())?;
    sets.extend(generate_fieldsets(&z, 2, &tm_letter, -1..2, 0..1, &|_, _| MacroRole::Plain).map_err(|e| e.to_string())?);
    ensure(check_fields(&sets, &tm_letter).consistent(), || "generated fieldsets inconsistent".into())?;
    let mut flips = 0;
    for i in 0..sets.len() {
        let id = (sets[i].level, sets[i].col, sets[i].row);
        let chunks = 1 + sets[i].v.len();
        for c in 0..chunks {
            let len = if c == 0 { sets[i].iv.len() } else { sets[i].v[c - 1].len() };
            for d in 0..len {
                let mut bad = sets.clone();
                let slot = if c == 0 { &mut bad[i].iv[d] } else { &mut bad[i].v[c - 1][d] };
                *slot ^= 1;
                let r = check_fields(&bad, &tm_letter);
                ensure(!r.consistent() && r.touches(id), || format!("flip {c}/{d} in {id:?} not localized"))?;
                flips += 1;
            }
        }
    }
    Ok(format!("levels 1–2 covered; {flips} single-letter flips all localized"))
}

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn c10() -> Verdict {
    for n in [3u64, 5] {
        let p = RedBlueParams::constant(ZoomSchedule::Constant { n }, 1, 1, 3);
        let d = density_recursion(&p, 3).map_err(|e| e.to_string())?;
        for k in 0..=3u32 {
            for red in [true, false] {
                let m = expand_colors(&p, k, red).map_err(|e| e.to_string())?;
                let want = if red { &d[k as usize].red } else { &d[k as usize].blue };
                ensure(&m.density() == want, || format!("N={n} k={k} red={red}: {} vs {want}", m.density()))?;
            }
        }
        if n == 3 {
            ensure(d[2].red == q(65, 81), || format!("ν_R(2) = {}", d[2].red))?;
        }
    }
    let p = RedBlueParams::constant(ZoomSchedule::Constant { n: 3 }, 1, 1, 2);
    let (r, b) = (expand_colors(&p, 2, true).unwrap(), expand_colors(&p, 2, false).unwrap());
    let map = ColorMap::quad([&r, &b, &b, &r]);
    let dens = map.density().to_f64().unwrap();
    let h = doubled_pattern_density(&map, 100_000_000).map_err(|e| e.to_string())?;
    ensure((h - dens).abs() < 0.05, || format!("pattern count {h} vs density {dens}"))?;
    Ok(format!("exact at N ∈ {{3, 5}}, k ≤ 3 (65/81); doubled count {h:.4} vs {dens}"))
}

fn c11() -> Verdict {
    let h = q(1, 2);
    let tr = beta_schedule(&ReEnumerator::constant(h.clone()), ZoomSchedule::Constant { n: 3 }, 1, 40, 0.01)
        .map_err(|e| e.to_string())?;
    let e = tr.errors(&h);
    let first = tr.steps.iter().position(|s| s.beta != tr.steps[0].beta).unwrap_or(0);
    ensure(e[first..].windows(2).all(|w| w[1] <= w[0]), || format!("errors not monotone: {e:?}"))?;
    let k = tr.predicted_level.ok_or("no predicted level")? as usize;
    ensure(e[k - 1] < 0.01, || format!("error {} at predicted level {k}", e[k - 1]))?;
    for s in &tr.steps {
        println!("    k={} beta={} nu_R={:.6} err={:.6}", s.level, s.beta, s.density.red.to_f64().unwrap(), e[s.level as usize - 1]);
    }
    ensure(tr.steps.iter().all(|s| s.density.red.clone() + s.density.blue.clone() == BigRational::one()), || {
        "densities do not sum to 1".into()
    })?;
    Ok(format!("error < 0.01 at predicted level {k}, non-increasing"))
}

fn selfsim(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_selfsim")).args(args).output().expect("run selfsim");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn c12() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = |name: &str| dir.path().join(name).display().to_string();
    std::fs::write(path("full"), full_shift().to_text()).map_err(|e| e.to_string())?;
    std::fs::write(path("one"), one_tile().to_text()).map_err(|e| e.to_string())?;
    let c = compile(&demo_bundle(), &layout(88, 1, 22).unwrap(), None).map_err(|e| e.to_string())?;
    std::fs::write(path("c88"), c.tileset.to_text()).map_err(|e| e.to_string())?;
    let (full, one, c88) = (path("full"), path("one"), path("c88"));
    let mut runs: Vec<Vec<&str>> = Vec::new();
    for k in ["2", "3", "4"] {
        runs.push(vec!["solve", "--tileset", &full, "--width", k, "--height", k, "--mode", "count"]);
    }
    for (p, q) in [("3", "3"), ("2", "2"), ("2", "3")] {
        runs.push(vec!["solve", "--tileset", "skeleton:3", "--width", p, "--height", q, "--torus", "--mode", "count"]);
        runs.push(vec!["solve", "--tileset", &c88, "--width", p, "--height", q, "--torus", "--mode", "count"]);
    }
    runs.push(vec!["verify-sim", "--tau", "skeleton:3", "--rho", &one, "--n", "3"]);
    for (i, args) in runs.iter().enumerate() {
        let mut seq = vec!["--jobs", "1"];
        seq.extend(args);
        let mut par = vec!["--jobs", "4"];
        par.extend(args);
        let m1 = path(&format!("m{i}a.json"));
        let m2 = path(&format!("m{i}b.json"));
        let a = selfsim(&[&["--manifest", &m1][..], &seq].concat());
        let b = selfsim(&[&["--manifest", &m2][..], &seq].concat());
        ensure(a == b, || format!("{args:?}: repeated --jobs 1 runs differ"))?;
        let (ma, mb) = (std::fs::read(&m1).map_err(|e| e.to_string())?, std::fs::read(&m2).map_err(|e| e.to_string())?);
        ensure(ma == mb, || format!("{args:?}: manifests differ"))?;
        let p = selfsim(&par);
        ensure(p == a, || format!("{args:?}: --jobs 4 differs from --jobs 1"))?;
    }
    ensure(Path::new(&path("m0a.json")).exists(), || "no manifest".into())?;
    Ok(format!("{} runs byte-identical across repeats and --jobs 1/4", runs.len()))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Verdict); 12] = [
        ("counting sanity", c1),
        ("entropy bracket", c2),
        ("TM/diagram equivalence", c3),
        ("2×2 determinacy", c4),
        ("fixpoint structure", c5),
        ("small-scale aperiodicity", c6),
        ("simulation verification", c7),
        ("recurrence at multiples of q", c8),
        ("letter delegation", c9),
        ("red/blue recursion vs expansion", c10),
        ("β scheduler", c11),
        ("determinism", c12),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let v = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match &v {
            Ok(s) => println!("criterion {:>2} PASS {name}: {s} ({:.2?})", i + 1, t.elapsed()),
            Err(s) => {
                println!("criterion {:>2} FAIL {name}: {s} ({:.2?})", i + 1, t.elapsed());
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
