use std::path::{Path, PathBuf};

use csx_cli::{exit, run};
use csx_core::corpus;
use serde_json::Value;
use tempfile::TempDir;

struct Output {
    code: i32,
    out: String,
    err: String,
}

fn csx(args: &[&str]) -> Output {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("csx").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Output {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn corpus_dir() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in corpus::ALL {
        std::fs::write(dir.path().join(name), text).unwrap();
    }
    dir
}

fn file(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn check_corpus_specs() {
    let dir = corpus_dir();
    for name in ["perfect_binder.csx", "booklet_maker.csx", "trim.csx"] {
        let o = csx(&["check", &file(&dir, name)]);
        assert_eq!(o.code, exit::OK, "{name}: {}{}", o.out, o.err);
        assert!(o.out.ends_with("0 error(s), 0 warning(s)\n"));
    }
    let o = csx(&["check", &file(&dir, "perfect_binder.csx")]);
    assert!(o.out.contains("device PerfectBinder: inhabited\n"));
}

#[test]
fn check_reports_uninhabited_type() {
    let dir = corpus_dir();
    let path = file(&dir, "uninhabited.csx");
    let o = csx(&["check", &path]);
    assert_eq!(o.code, exit::FAILED);
    assert!(o.out.starts_with(&format!(
        "{path}:1:1: error: type `T` is uninhabited: no instance satisfies its constraints\n"
    )));
    let o = csx(&["--format", "json", "check", &path]);
    let v: Value = serde_json::from_str(&o.out).unwrap();
    assert_eq!(v["ok"], false);
    assert_eq!(v["inhabitance"][0]["verdict"], "uninhabited");
}

#[test]
fn check_usage_errors() {
    let dir = corpus_dir();
    assert_eq!(csx(&["check", "/nonexistent/x.csx"]).code, exit::USAGE);
    let bad = write(dir.path(), "bad.csx", "type T {");
    let o = csx(&["check", bad.to_str().unwrap()]);
    assert_eq!(o.code, exit::USAGE);
    assert!(o.err.contains("bad.csx:1:9: error:"), "{}", o.err);
    assert_eq!(
        csx(&[
            "--int-min",
            "5",
            "--int-max",
            "1",
            "check",
            &file(&dir, "trim.csx")
        ])
        .code,
        exit::USAGE
    );
    assert_eq!(csx(&["frobnicate"]).code, exit::USAGE);
}

#[test]
fn check_directory_expands_to_sorted_files() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "b.csx", "type B { v: int [v > 0] }\n");
    write(dir.path(), "a.csx", "type A { v: int [v > 0] }\n");
    write(dir.path(), "notes.txt", "ignored");
    let o = csx(&["check", dir.path().to_str().unwrap()]);
    assert_eq!(o.code, exit::OK, "{}", o.err);
    assert_eq!(
        o.out,
        "type A: inhabited\ntype B: inhabited\n0 error(s), 0 warning(s)\n"
    );
}

#[test]
fn test_runs_scenarios() {
    let dir = corpus_dir();
    let o = csx(&["test", &file(&dir, "booklet_maker.csx")]);
    assert_eq!(o.code, exit::OK, "{}{}", o.out, o.err);
    assert!(o.out.contains("PASS ConfigureBooklet (found)\n"));
    assert!(o
        .out
        .contains("PASS MinimalWaste (found, objective 126000)\n"));
    assert!(o.out.ends_with("2/2 scenario(s) passed\n"));

    let o = csx(&[
        "--format",
        "json",
        "test",
        &file(&dir, "perfect_binder.csx"),
        "--scenario",
        "LargestBook",
    ]);
    assert_eq!(o.code, exit::OK);
    let v: Value = serde_json::from_str(&o.out).unwrap();
    let s = &v["scenarios"][0];
    assert_eq!(s["scenario"], "LargestBook");
    assert_eq!(s["objective"], 5_040_000_000i64);
    assert_eq!(s["expectations"].as_array().unwrap().len(), 4);

    assert_eq!(
        csx(&["test", &file(&dir, "trim.csx"), "--scenario", "Nope"]).code,
        exit::USAGE
    );
}

#[test]
fn test_reports_failed_expectations() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        "{}\nscenario Wrong for D {{\n  a.w = 10\n  b.w = 8\n  expect [c.t == 3]\n}}\n",
        corpus::TRIM
    );
    let p = write(dir.path(), "w.csx", &text);
    let o = csx(&["test", p.to_str().unwrap()]);
    assert_eq!(o.code, exit::FAILED);
    assert!(o.out.contains("FAIL Wrong"), "{}", o.out);
    assert!(o.out.contains("c_t = 2"), "{}", o.out);
}

#[test]
fn solve_formats_and_exit_codes() {
    let dir = corpus_dir();
    let trim = file(&dir, "trim.csx");
    let o = csx(&[
        "solve", &trim, "--device", "D", "--set", "a.w=10", "--set", "a.h=20", "--set", "b.w=8",
    ]);
    assert_eq!(o.code, exit::OK, "{}", o.err);
    assert_eq!(o.out, "a_w = 10\na_h = 20\nb_w = 8\nb_h = 20\nc_t = 2\n");

    let o = csx(&[
        "--format", "tree", "solve", &trim, "--device", "D", "-s", "a.w=10", "-s", "a.h=20", "-s",
        "b.w=8",
    ]);
    assert_eq!(
        o.out,
        "a {\n  w = 10\n  h = 20\n}\nb {\n  w = 8\n  h = 20\n}\nc {\n  t = 2\n}\n"
    );

    let o = csx(&[
        "--int-min",
        "0",
        "--int-max",
        "50",
        "solve",
        &trim,
        "--device",
        "D",
        "--set",
        "b.w=8",
        "-c",
        "c.t >= 3",
        "--objective",
        "minimize:a.w",
    ]);
    assert_eq!(o.code, exit::OK, "{}", o.err);
    assert!(
        o.out.contains("a_w = 11\n") && o.out.ends_with("objective = 11\n"),
        "{}",
        o.out
    );

    let o = csx(&[
        "solve", &trim, "--device", "D", "--set", "a.w=5", "--set", "b.w=9",
    ]);
    assert_eq!(o.code, exit::EMPTY);
    assert!(o.out.contains("empty configuration space"));

    let binder = file(&dir, "perfect_binder.csx");
    let o = csx(&[
        "--budget-nodes",
        "2",
        "solve",
        &binder,
        "--device",
        "PerfectBinder",
        "--objective",
        "maximize:book.volume",
    ]);
    assert_eq!(o.code, exit::EXHAUSTED, "{}{}", o.out, o.err);

    for bad in [
        vec!["solve", trim.as_str(), "--device", "Nope"],
        vec!["solve", trim.as_str(), "--device", "D", "--set", "a.zz=1"],
        vec!["solve", trim.as_str(), "--device", "D", "--set", "a.w"],
        vec!["solve", trim.as_str(), "--device", "D", "-c", "a.w +"],
        vec![
            "solve",
            trim.as_str(),
            "--device",
            "D",
            "--objective",
            "best:a.w",
        ],
        vec!["solve", trim.as_str()],
    ] {
        let o = csx(&bad);
        assert_eq!(o.code, exit::USAGE, "{bad:?}: {}", o.out);
        assert!(o.err.starts_with("error:"), "{bad:?}: {}", o.err);
    }
}

#[test]
fn solve_json_and_job_files() {
    let dir = corpus_dir();
    let binder = file(&dir, "perfect_binder.csx");
    let job = write(
        dir.path(),
        "job.json",
        r#"{"device": "PerfectBinder", "fixed": {"blockIn.width": 2130, "blockIn.height": 2970, "blockIn.sheets": 100, "blockIn.sheetThickness": 1, "book.width": 2100}}"#,
    );
    let o = csx(&[
        "--format",
        "json",
        "solve",
        &binder,
        "--job",
        job.to_str().unwrap(),
        "--set",
        "book.height=2970",
    ]);
    assert_eq!(o.code, exit::OK, "{}", o.err);
    let v: Value = serde_json::from_str(&o.out).unwrap();
    assert_eq!(v["status"], "found");
    assert_eq!(v["configuration"]["coverIn_width"], 4300);
    assert_eq!(v["tree"]["crease"]["spinePosition"], 2100);
    assert_eq!(v["model"]["variables"], 23);
    let again = csx(&[
        "--format",
        "json",
        "solve",
        &binder,
        "--job",
        job.to_str().unwrap(),
        "--set",
        "book.height=2970",
    ]);
    assert_eq!(o.out, again.out);

    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"device": "PerfectBinder", "unknown": 1}"#,
    );
    assert_eq!(
        csx(&["solve", &binder, "--job", bad.to_str().unwrap()]).code,
        exit::USAGE
    );
}

#[test]
fn inhabit_command() {
    let dir = corpus_dir();
    let o = csx(&["inhabit", &file(&dir, "trim.csx"), "--def", "Trim"]);
    assert_eq!(o.code, exit::OK);
    assert_eq!(o.out, "action Trim: inhabited\n");
    assert_eq!(
        csx(&["inhabit", &file(&dir, "uninhabited.csx")]).code,
        exit::FAILED
    );
    assert_eq!(
        csx(&["inhabit", &file(&dir, "trim.csx"), "--def", "Nope"]).code,
        exit::USAGE
    );
}

#[test]
fn export_is_byte_identical_across_runs() {
    let dir = corpus_dir();
    let booklet = file(&dir, "booklet_maker.csx");
    let a = csx(&[
        "--format",
        "interchange",
        "export",
        &booklet,
        "--device",
        "BookletMaker",
    ]);
    let b = csx(&[
        "--format",
        "interchange",
        "export",
        &booklet,
        "--device",
        "BookletMaker",
    ]);
    assert_eq!(a.code, exit::OK);
    assert_eq!(a.out, b.out);
    assert!(a.out.starts_with("var int : input_width;\n"));
    assert!(a.out.contains("var bool : rotate_rotated;\n"));
    assert!(a.out.ends_with("solve satisfy;\n"));
    assert_eq!(a.err, "BookletMaker: 25 variables, 52 constraints\n");

    let target = dir.path().join("model.txt");
    let o = csx(&[
        "--format",
        "interchange",
        "export",
        &booklet,
        "--device",
        "BookletMaker",
        "-o",
        target.to_str().unwrap(),
    ]);
    assert_eq!(o.code, exit::OK);
    assert_eq!(std::fs::read_to_string(&target).unwrap(), a.out);

    let d = csx(&[
        "--format",
        "debug",
        "export",
        &booklet,
        "--device",
        "BookletMaker",
    ]);
    assert!(d.out.starts_with("25 variables"));
    assert_eq!(
        csx(&[
            "--format",
            "json",
            "export",
            &booklet,
            "--device",
            "BookletMaker"
        ])
        .code,
        exit::USAGE
    );
    assert_eq!(
        csx(&["export", &booklet, "--device", "Nope"]).code,
        exit::USAGE
    );
}

#[test]
fn bench_reports_both_phases() {
    let dir = corpus_dir();
    let o = csx(&[
        "--format",
        "json",
        "bench",
        &file(&dir, "booklet_maker.csx"),
        "--scenario",
        "MinimalWaste",
        "--iterations",
        "3",
    ]);
    assert_eq!(o.code, exit::OK, "{}", o.err);
    let v: Value = serde_json::from_str(&o.out).unwrap();
    let rows = v["iterations"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(
        |r| r["translation_ns"].as_u64().unwrap() > 0 && r["solving_ns"].as_u64().unwrap() > 0
    ));
    assert_eq!(v["outcome"], "found");

    let o = csx(&["bench", &file(&dir, "trim.csx"), "--scenario", "Nope"]);
    assert_eq!(o.code, exit::USAGE);
    let o = csx(&[
        "bench",
        &file(&dir, "booklet_maker.csx"),
        "--scenario",
        "MinimalWaste",
        "--iterations",
        "0",
    ]);
    assert_eq!(o.code, exit::USAGE);
}
