mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::{bin, fixtures};

fn meteor(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("spawn meteor-e")
}

fn meteor_env(args: &[&str], threads: &str) -> Output {
    Command::new(bin())
        .args(args)
        .env(meteor_e::cli::THREADS_ENV, threads)
        .output()
        .expect("spawn meteor-e")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn identical_files_score_near_one() {
    let dir = tempfile::tempdir().unwrap();
    let seg = write(dir.path(), "a.txt", "le chat dort\n");
    let empty = write(dir.path(), "p.tsv", "");
    let out = stdout(&meteor(&[
        "--preset",
        "baseline",
        "--language",
        "fr",
        "--paraphrases",
        s(&empty),
        "score",
        "--hyp",
        s(&seg),
        "--ref",
        s(&seg),
    ]));
    let header = out.lines().next().unwrap();
    assert!(header.starts_with("# meteor-e preset=baseline language=fr config="), "{header}");
    assert!(header.ends_with("ties=metric-ties-discordant"));
    let corpus = out.lines().find(|l| l.starts_with("# corpus")).unwrap();
    assert_eq!(corpus.split('\t').nth(2), Some("98.15"));
}

#[test]
fn correlate_perfect_agreement() {
    let dir = tempfile::tempdir().unwrap();
    let scores = write(dir.path(), "scores.tsv", "a\t1\t0.9\nb\t1\t0.5\nc\t1\t0.1\na\t2\t0.2\nb\t2\t0.8\n");
    let judgments = write(dir.path(), "j.tsv", "fr-en\t1\ta\t1\tb\t2\tc\t3\nfr-en\t2\tb\t1\ta\t2\n");
    let out = stdout(&meteor(&["correlate", "--scores", s(&scores), "--judgments", s(&judgments)]));
    let average = out.lines().find(|l| l.starts_with("average")).unwrap();
    assert_eq!(average, "average\t-\t-\t1.000000");
    assert!(out.contains("fr-en\t4\t0\t1.000000"), "{out}");
}

#[test]
fn failed_run_leaves_no_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.tsv");
    let out = meteor(&[
        "--output",
        s(&report),
        "--preset",
        "baseline",
        "--language",
        "en",
        "score",
        "--hyp",
        s(&dir.path().join("missing.hyp")),
        "--ref",
        s(&dir.path().join("missing.ref")),
    ]);
    assert!(!out.status.success());
    let left: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
    assert!(left.is_empty(), "{left:?}");
}

#[test]
fn unknown_config_key_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let seg = write(dir.path(), "a.txt", "x\n");
    let conf = write(dir.path(), "m.conf", "preset = baseline\nlanguage = en\nweights.bogus = 1\n");
    let out = meteor(&["--config", s(&conf), "score", "--hyp", s(&seg), "--ref", s(&seg)]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("weights.bogus"), "{}", stderr(&out));

    let out = meteor(&["--set", "alpha2=0.3", "score", "--hyp", s(&seg), "--ref", s(&seg)]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("alpha2"), "{}", stderr(&out));
}

#[test]
fn missing_embeddings_path_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let seg = write(dir.path(), "a.txt", "x\n");
    let out = meteor(&[
        "--preset",
        "vector",
        "--language",
        "en",
        "--embeddings",
        s(&dir.path().join("nope.vec")),
        "score",
        "--hyp",
        s(&seg),
        "--ref",
        s(&seg),
    ]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("paths.embeddings"), "{}", stderr(&out));
}

fn fixture_args(format: &str) -> Vec<String> {
    let f = fixtures().join("fr-mini");
    vec![
        "--config".into(),
        f.join("dbnary-vector.conf").to_string_lossy().into_owned(),
        "--format".into(),
        format.into(),
        "score".into(),
        "--hyp".into(),
        f.join("rbmt.hyp").to_string_lossy().into_owned(),
        "--ref".into(),
        f.join("rbmt.ref").to_string_lossy().into_owned(),
    ]
}

#[test]
fn json_output_parses() {
    let args = fixture_args("json");
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    let out = stdout(&meteor(&args));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["preset"], "dbnary+vector");
    assert_eq!(v["ties"], "metric-ties-discordant");
    assert!(v["config_hash"].is_string());
    assert!(v["report"].is_object());
}

#[test]
fn output_is_byte_identical_across_runs_and_threads() {
    let args = fixture_args("tsv");
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    let one = meteor_env(&args, "1").stdout;
    let four = meteor_env(&args, "4").stdout;
    let again = meteor_env(&args, "4").stdout;
    assert!(!one.is_empty());
    assert_eq!(one, four);
    assert_eq!(four, again);
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.tsv");
    let mut args = vec!["--output".to_string(), s(&report).to_string()];
    args.extend(fixture_args("tsv"));
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    let out = meteor(&args);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let plain = fixture_args("tsv");
    let plain: Vec<&str> = plain.iter().map(String::as_str).collect();
    assert_eq!(fs::read(&report).unwrap(), meteor(&plain).stdout);
}
