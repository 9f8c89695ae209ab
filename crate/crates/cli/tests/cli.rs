use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_volctrans-miner"));
    c.env("VOLCTRANS_WORKERS", "2");
    c
}

fn run(args: &[&str]) -> Output {
    let out = bin().args(args).output().unwrap();
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn run_stdin(args: &[&str], input: &str) -> String {
    let mut child = bin().args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn synth(dir: &Path) {
    run(&["synth", "--out", p(dir), "--seed", "5", "--seed-pairs", "1200", "--heldout-pairs", "200", "--docs", "30"]);
}

#[test]
fn tokenize_and_split_read_stdin() {
    let out = run_stdin(&["textprep", "tokenize", "--lang", "en"], "Hello, world!\n");
    assert_eq!(out, "Hello , world !\n");
    let out = run_stdin(&["textprep", "split", "--lang", "en"], "One here. Two there!\nThree");
    assert_eq!(out.lines().collect::<Vec<_>>(), ["One here.", "Two there!", "Three"]);
}

#[test]
fn module_commands_chain_into_a_submission() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth(d);
    let seed = d.join("seed_ps-en.tsv");
    let text = std::fs::read_to_string(&seed).unwrap();
    let (ps, en): (Vec<&str>, Vec<&str>) = text.lines().map(|l| l.split_once('\t').unwrap()).unzip();
    std::fs::write(d.join("ps.txt"), ps.join("\n")).unwrap();
    std::fs::write(d.join("en.txt"), en.join("\n")).unwrap();
    let lang = ["--pair", "ps-en"];

    run(&[&["align", "train", "--pairs", p(&seed), "--out", p(&d.join("tables"))][..], &lang].concat());
    run(&[&["sim", "idf", "--pairs", p(&seed), "--out", p(&d.join("tables"))][..], &lang].concat());
    let ps_sample = format!("ps={}", p(&d.join("ps.txt")));
    let en_sample = format!("en={}", p(&d.join("en.txt")));
    run(&["textprep", "langid-train", "--sample", &ps_sample, "--sample", &en_sample, "--out", p(&d.join("lid.jsonl"))]);
    let guess = run_stdin(&["textprep", "langid-classify", "--model", p(&d.join("lid.jsonl"))], &format!("{}\n", en[0]));
    assert!(guess.starts_with("en\t"), "{guess}");

    let t = d.join("tables");
    let (fwd, rev) = (t.join("table.forward.tsv"), t.join("table.reverse.tsv"));
    let (idf_src, idf_tgt) = (t.join("idf.src.tsv"), t.join("idf.tgt.tsv"));
    let tables = ["--fwd", p(&fwd), "--rev", p(&rev), "--idf-src", p(&idf_src), "--idf-tgt", p(&idf_tgt)];
    let held = d.join("heldout_ps-en.tsv");
    let lid_path = d.join("lid.jsonl");
    let lid = ["--langid", p(&lid_path)];
    run(&[&["score", "train", "--pairs", p(&seed), "--out", p(&d.join("model.json"))][..], &lang, &tables, &lid].concat());
    run(&[&["score", "run", "--model", p(&d.join("model.json")), "--pairs", p(&held), "--out", p(&d.join("raw.txt"))][..], &lang, &tables, &lid].concat());
    let raw = std::fs::read_to_string(d.join("raw.txt")).unwrap();
    assert_eq!(raw.lines().count(), 200);

    run(&[&["score", "rerank", "--pairs", p(&held), "--scores", p(&d.join("raw.txt")), "--out", p(&d.join("scored.tsv"))][..], &lang, &lid].concat());
    let scored = std::fs::read_to_string(d.join("scored.tsv")).unwrap();
    assert_eq!(scored.lines().count(), 200);
    assert!(scored.lines().all(|l| l.split('\t').count() == 3));

    run(&["subsample", "--scored", p(&d.join("scored.tsv")), "--target", "300", "--out", p(&d.join("sub.tsv"))]);
    let sub = std::fs::read_to_string(d.join("sub.tsv")).unwrap();
    let words: usize = sub.lines().map(|l| l.split('\t').nth(1).unwrap().split_whitespace().count()).sum();
    assert!(words >= 300);

    let stats = run(&["stats", "--pairs", p(&d.join("sub.tsv"))]);
    let stats: serde_json::Value = serde_json::from_slice(&stats.stdout).unwrap();
    assert_eq!(stats["en_words"].as_u64().unwrap() as usize, words);

    run(&["score", "normalize", "--scores", p(&d.join("raw.txt")), "--out", p(&d.join("norm.txt"))]);
    run(&["score", "ensemble", p(&d.join("norm.txt")), p(&d.join("norm.txt")), "--out", p(&d.join("ens.txt"))]);
    assert_eq!(std::fs::read(d.join("ens.txt")).unwrap(), std::fs::read(d.join("norm.txt")).unwrap());
}

#[test]
fn pipeline_runs_from_a_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth(d);
    let config = d.join("config.json");
    std::fs::write(
        &config,
        r#"{"pair": "km-en", "seed": 3,
            "paths": {"seed_corpus": "seed_km-en.tsv", "documents": "mini_docs_km-en.jsonl", "output_dir": "out"},
            "mining": {"iterations": 2},
            "subsample": {"target_en_words": 1000}}"#,
    )
    .unwrap();
    run(&["pipeline", "--config", p(&config)]);
    let manifest: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("out/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 3);
    assert_eq!(manifest["stages"].as_array().unwrap().len(), 8);
    assert!(d.join("out/scored.tsv").is_file() && d.join("out/subsample.tsv").is_file());
}

#[test]
fn errors_exit_nonzero_with_a_stage_tag() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.tsv");
    std::fs::write(&bad, "one column only\n").unwrap();
    let out = bin().args(["subsample", "--scored", p(&bad), "--target", "10", "--out", p(&dir.path().join("o.tsv"))]).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error [subsample]:"), "{err}");
    assert!(err.contains("bad.tsv:1:"), "{err}");

    let out = bin().args(["pipeline", "--config", p(&dir.path().join("missing.json"))]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error [pipeline]:"));

    let out = bin().env("VOLCTRANS_WORKERS", "0").args(["stats", "--pairs", p(&bad)]).output().unwrap();
    assert!(!out.status.success());
}
