use std::process::Command;

use serde_json::Value;

fn selfsim(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_selfsim")).args(args).output().expect("run selfsim");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn one_tile_count() {
    let d = tempfile::tempdir().unwrap();
    let f = write(&d, "one", "tileset one 1 1\ntile 0 0 0 0 0\n");
    let (code, out, _) = selfsim(&["solve", "--tileset", &f, "--width", "2", "--height", "2", "--mode", "count"]);
    assert_eq!((code, out.as_str()), (0, "count 1 sat\n"));
}

#[test]
fn unsat_exits_four() {
    let (code, out, _) = selfsim(&["solve", "--tileset", "skeleton:3", "--width", "2", "--height", "2", "--torus", "--mode", "count"]);
    assert_eq!((code, out.as_str()), (4, "count 0 unsat\n"));
}

#[test]
fn accept_now_runs() {
    let (code, out, _) = selfsim(&["tm-run", "--machine", "corpus:accept-now", "--input", ""]);
    assert_eq!((code, out.as_str()), (0, "outcome accept 0\n"));
}

#[test]
fn usage_and_input_errors() {
    assert_eq!(selfsim(&["solve", "--width", "2"]).0, 2);
    assert_eq!(selfsim(&["no-such-command"]).0, 2);
    let (code, _, err) = selfsim(&["solve", "--tileset", "/nonexistent/ts", "--width", "2", "--height", "2"]);
    assert_eq!(code, 3);
    assert!(err.contains("cannot read"), "{err}");
}

#[test]
fn budget_exhaustion_exits_five() {
    let (code, _, _) = selfsim(&["--budget", "1", "solve", "--tileset", "skeleton:4", "--width", "8", "--height", "8", "--mode", "count"]);
    assert_eq!(code, 5);
}

#[test]
fn redblue_toy_table() {
    let (code, out, _) = selfsim(&["redblue", "--toy", "3", "--levels", "2", "--exact"]);
    assert_eq!(code, 0);
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows[0], "k nu_R nu_B beta_k approx_h");
    assert_eq!(rows[1], "1 8/9 1/9 1 -");
    assert_eq!(rows[2], "2 65/81 16/81 1 -");
}

#[test]
fn redblue_doubly_has_a_row_per_level() {
    let (code, out, _) = selfsim(&["redblue", "--C", "2", "--levels", "4"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 5);
}

#[test]
fn redblue_auto_predicts() {
    let (code, out, _) = selfsim(&["redblue", "--toy", "3", "--levels", "25", "--beta-schedule", "auto", "--h-enum", "const:1/2"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().last().unwrap(), "predicted 19 0.010000");
}

#[test]
fn lemma2_thue_morse() {
    let (code, out, _) = selfsim(&["lemma2", "--seq", "thue-morse", "--n", "1", "--q", "2", "--window", "16384"]);
    assert_eq!(code, 0);
    assert!(out.lines().any(|l| l.starts_with("bound ") && l.contains(" true ")), "{out}");
}

#[test]
fn lemma3_absent_factor() {
    // Thue–Morse has no 000, so 000 ⊗ anything is absent
    let (code, out, _) = selfsim(&["lemma3", "--x", "thue-morse", "--y", "01", "--v", "0:0,0:1,0:0", "--window", "4096"]);
    assert_eq!(code, 4, "{out}");
    assert!(out.starts_with("verdict absent"), "{out}");
}

#[test]
fn canonical_dead_end_exits_four() {
    let d = tempfile::tempdir().unwrap();
    let ok = write(&d, "gm", "alphabet 0 1\n11\n");
    let (code, out, _) = selfsim(&["canonical", "--forbidden", &ok, "--length", "5"]);
    assert_eq!((code, out.lines().next().unwrap()), (0, "word 00000"));
    let dead = write(&d, "dead", "alphabet 0 1\n0\n1\n");
    assert_eq!(selfsim(&["canonical", "--forbidden", &dead, "--length", "3"]).0, 4);
}

#[test]
fn embed_check_is_clean() {
    let d = tempfile::tempdir().unwrap();
    let w = write(&d, "w", "0110100110010110\n");
    let (code, out, _) = selfsim(&["embed-check", "--schedule", "2", "--levels", "2", "--word", &w]);
    assert_eq!(code, 0, "{out}");
    for l in out.lines().skip(1) {
        let f: Vec<&str> = l.split(' ').collect();
        assert_eq!((f[4], f[6]), ("0", "0"), "{l}");
    }
}

#[test]
fn records_mode_is_json() {
    let (_, out, _) = selfsim(&["--records", "solve", "--tileset", "skeleton:3", "--width", "3", "--height", "3", "--mode", "count"]);
    let v: Value = serde_json::from_str(out.lines().next().unwrap()).unwrap();
    assert_eq!(v["record"], "count");
    assert_eq!(v["count"], 9);
}

#[test]
fn manifest_records_inputs() {
    let d = tempfile::tempdir().unwrap();
    let f = write(&d, "one", "tileset one 1 1\ntile 0 0 0 0 0\n");
    let m = d.path().join("m.json").display().to_string();
    let (code, out, _) = selfsim(&["--manifest", &m, "--seed", "7", "solve", "--tileset", &f, "--width", "2", "--height", "2", "--mode", "count"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&m).unwrap()).unwrap();
    assert_eq!(v["subcommand"], "solve");
    assert_eq!(v["seed"], 7);
    assert_eq!(v["exit_code"], 0);
    assert_eq!(v["inputs"][0]["path"], f);
    assert_eq!(v["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    assert_eq!(v["parameters"]["cmd"]["solve"]["width"], 2);
    use sha2::Digest;
    assert_eq!(v["output_sha256"], hex::encode(sha2::Sha256::digest(out.as_bytes())));
}

#[test]
fn compile_writes_a_parseable_set() {
    let d = tempfile::tempdir().unwrap();
    let out_path = d.path().join("c.txt").display().to_string();
    let (code, out, _) = selfsim(&["compile", "--n", "96", "--m", "24", "--out", &out_path]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("roundtrip true"));
    let ts = selfsim_core::wang::TileSet::parse(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert!(out.contains(&format!("tiles {} ", ts.len())));
}
