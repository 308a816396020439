use std::path::Path;
use std::process::{Command, Output};

fn write_config(dir: &Path) -> std::path::PathBuf {
    let w = dir.join("work");
    let p = |f: &str| w.join(f).display().to_string();
    let text = format!(
        "preset = \"smoke\"\nseed = 11\n\n[paths]\ncorpus = {:?}\ntoponyms = {:?}\nvocab = {:?}\npairs = {:?}\n\
         random_triplets = {:?}\nhard_triplets = {:?}\ncheckpoints = {:?}\nembeddings = {:?}\nindex = {:?}\n\
         testsets = {:?}\nreports = {:?}\n",
        p("corpus.jsonl"),
        p("toponyms.tsv"),
        p("vocab.tsv"),
        p("pairs.tsv"),
        p("triplets.random.tsv"),
        p("triplets.hard.tsv"),
        p("checkpoints"),
        p("embeddings.bin"),
        p("index.bin"),
        p("testsets"),
        p("reports"),
    );
    let path = dir.join("toponym.toml");
    std::fs::write(&path, text).unwrap();
    path
}

fn run(config: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toponym"))
        .arg("--config")
        .arg(config)
        .args(args)
        .output()
        .unwrap()
}

fn ok(config: &Path, args: &[&str]) -> String {
    let out = run(config, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn read(dir: &Path, f: &str) -> Vec<u8> {
    std::fs::read(dir.join("work").join(f)).unwrap()
}

#[test]
fn phase_two_without_teacher_is_a_user_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    ok(&cfg, &["toy"]);
    ok(&cfg, &["ingest"]);
    ok(&cfg, &["build-vocab"]);
    let out = run(&cfg, &["train", "--phase", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("teacher checkpoint required"));
}

#[test]
fn missing_prerequisite_names_the_artifact_and_stage() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let out = run(&cfg, &["gen-pairs"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("toponyms.tsv") && err.contains("ingest"), "{err}");
}

#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    assert_eq!(run(&cfg, &["train", "--phase", "4"]).status.code(), Some(1));
    assert_eq!(run(&cfg, &["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&cfg, &["--set", "seed=abc", "config"]).status.code(), Some(1));
    assert_eq!(run(&cfg, &["--help"]).status.code(), Some(0));
}

#[test]
fn config_overrides_change_the_hash() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let a = ok(&cfg, &["config"]);
    let b = ok(&cfg, &["--set", "train.phase3.margin=0.25", "config"]);
    assert!(a.starts_with("# config hash "));
    assert_ne!(a.lines().next(), b.lines().next());
    assert!(b.contains("margin = 0.25"));
}

#[test]
fn full_smoke_pipeline_is_idempotent_and_stamped() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let hash = ok(&cfg, &["config"]).lines().next().unwrap().trim_start_matches("# config hash ").to_string();

    let data_stages: [&[&str]; 5] = [&["toy"], &["ingest"], &["build-vocab"], &["gen-pairs"], &["gen-triplets"]];
    let files = ["corpus.jsonl", "toponyms.tsv", "vocab.tsv", "pairs.tsv", "triplets.random.tsv", "triplets.hard.tsv"];
    for s in data_stages {
        ok(&cfg, s);
    }
    let first: Vec<Vec<u8>> = files.iter().map(|f| read(dir.path(), f)).collect();
    for s in data_stages {
        ok(&cfg, s);
    }
    for (f, before) in files.iter().zip(&first) {
        assert_eq!(&read(dir.path(), f), before, "{f} changed on rerun");
        let head = String::from_utf8_lossy(before).lines().next().unwrap().to_string();
        assert!(
            head.contains(&format!("config={hash}")) && head.contains("seed=11") && head.contains("version="),
            "{f}: {head}"
        );
    }

    for phase in ["1", "2", "3"] {
        ok(&cfg, &["train", "--phase", phase]);
    }
    let student = read(dir.path(), "checkpoints/student.ckpt");
    ok(&cfg, &["train", "--phase", "3"]);
    assert_eq!(read(dir.path(), "checkpoints/student.ckpt"), student);
    assert!(String::from_utf8_lossy(&student[..4096.min(student.len())]).contains(&hash));

    ok(&cfg, &["embed"]);
    ok(&cfg, &["index"]);
    let index = read(dir.path(), "index.bin");
    ok(&cfg, &["index"]);
    assert_eq!(read(dir.path(), "index.bin"), index);

    let hits = ok(&cfg, &["query", "--name", "Москва", "-k", "5"]);
    let lines: Vec<&str> = hits.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("1\t"));
    let scores: Vec<f32> = lines.iter().map(|l| l.split('\t').nth(2).unwrap().parse().unwrap()).collect();
    assert!(scores.windows(2).all(|w| w[0] >= w[1]));

    let eval = ok(&cfg, &["evaluate"]);
    for system in ["# lev", "# jw", "# model"] {
        assert!(eval.contains(system), "{eval}");
    }
    assert!(eval.contains("toy-heldout\tR@1\t"));
    let diag = ok(&cfg, &["diagnostics"]);
    assert!(diag.contains("cross-script\t"));
    let report = String::from_utf8(read(dir.path(), "reports/metrics.model.tsv")).unwrap();
    assert!(report.starts_with("# toponym-report v1 ") && report.contains(&hash));
}
