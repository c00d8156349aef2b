//! Prints one PASS or FAIL line per acceptance criterion and exits non-zero
//! if any fails.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use csx_cli::{cmd_bench, cmd_check, exit, run, Format, GlobalArgs};
use csx_core::corpus;
use csx_core::eval::Value;
use csx_core::explore::{run_scenario, DefKind, ExplorationOutcome, Explorer, Inhabitance};
use csx_core::lower::lower_device;
use csx_core::semantics::{analyze, TypedSpec};
use csx_core::solver::{Budget, DomainBox};
use csx_core::syntax::{parse, pretty_print, Path};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value as Json;
use tempfile::TempDir;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn tspec(text: &str) -> TypedSpec {
    analyze(&parse(text).unwrap()).unwrap()
}

fn ms(d: Duration) -> String {
    format!("{:.1} ms", d.as_secs_f64() * 1000.0)
}

fn corpus_dir() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in corpus::ALL {
        std::fs::write(dir.path().join(name), text).unwrap();
    }
    dir
}

fn uninhabited_detection() -> Check {
    let t = tspec(corpus::UNINHABITED);
    let ex = Explorer::default();
    let start = Instant::now();
    let verdict = ex.inhabitance(&t, DefKind::Type, "T");
    let elapsed = start.elapsed();
    if verdict != Ok(Inhabitance::Uninhabited) {
        return Err(format!("verdict {verdict:?}"));
    }
    if elapsed >= Duration::from_millis(100) {
        return Err(format!("took {}, limit 100 ms", ms(elapsed)));
    }
    Ok(format!("type T uninhabited in {}", ms(elapsed)))
}

fn semantics_coherence() -> Check {
    let t = tspec(corpus::TRIM);
    let start = Instant::now();
    let dbox = DomainBox::uniform(0, 5);
    let n = support::discrepancies(&t, "D", &dbox);
    let elapsed = start.elapsed();
    if n != 0 {
        return Err(format!("{n} discrepancies"));
    }
    if elapsed >= Duration::from_secs(10) {
        return Err(format!("took {}, limit 10 s", ms(elapsed)));
    }
    Ok(format!(
        "trim over 0..=5 (6 values per leaf): 0 discrepancies in {}",
        ms(elapsed)
    ))
}

fn solver_oracle() -> Check {
    let start = Instant::now();
    let failures: Vec<String> = (0..600).filter_map(|s| support::compare(s).err()).collect();
    let elapsed = start.elapsed();
    if !failures.is_empty() {
        return Err(format!(
            "{} of 600 mismatched, first: {}",
            failures.len(),
            failures[0]
        ));
    }
    if elapsed >= Duration::from_secs(60) {
        return Err(format!("took {}, limit 60 s", ms(elapsed)));
    }
    Ok(format!(
        "600/600 random models match enumeration in {}",
        ms(elapsed)
    ))
}

fn int_at(x: &ExplorationOutcome, p: &str) -> Option<i64> {
    match x.configuration()?.value.lookup(&Path::parse(p).ok()?.0)? {
        Value::Int(v) => Some(*v),
        _ => None,
    }
}

fn scenario_check(
    t: &TypedSpec,
    name: &str,
    expected: &[(&str, i64)],
    objective: Option<i64>,
) -> Result<Duration, String> {
    let start = Instant::now();
    let r = run_scenario(t, name, &DomainBox::default(), Budget::default())
        .map_err(|e| format!("{name}: {e}"))?;
    let elapsed = start.elapsed();
    if let Some(f) = r.failure() {
        return Err(format!("{name}: {f}"));
    }
    let out = &r.exploration.outcome;
    for (p, want) in expected {
        let got = int_at(out, p);
        if got != Some(*want) {
            return Err(format!("{name}: {p} = {got:?}, oracle {want}"));
        }
    }
    if let Some(want) = objective {
        match out {
            ExplorationOutcome::Found {
                objective: Some(v),
                optimal: true,
                ..
            } if *v == want => {}
            other => return Err(format!("{name}: objective {other:?}, oracle {want}")),
        }
    }
    if elapsed > Duration::from_secs(5) {
        return Err(format!("{name}: took {}, limit 5 s", ms(elapsed)));
    }
    Ok(elapsed)
}

fn corpus_specs() -> Check {
    let dir = corpus_dir();
    let session = GlobalArgs::default().explorer();
    for name in ["perfect_binder.csx", "booklet_maker.csx"] {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = cmd_check(&session, &[dir.path().join(name)], None, &mut out, &mut err);
        if code != exit::OK {
            return Err(format!(
                "check {name} exited {code}: {}",
                String::from_utf8_lossy(&out)
            ));
        }
    }

    let binder = tspec(corpus::PERFECT_BINDER);
    let booklet = tspec(corpus::BOOKLET_MAKER);
    let (volume, w, h, th) = support::largest_book_oracle();
    let (waste, face, _, sheets) = support::minimal_waste_oracle();
    let (block_w, book_w, sheet_count) = (2130, 2100, 100);
    let times = [
        scenario_check(
            &binder,
            "DeriveCover",
            &[
                ("coverIn.width", 2 * book_w + sheet_count),
                ("mill.depth", block_w - book_w),
                ("crease.spinePosition", book_w),
            ],
            None,
        )?,
        scenario_check(
            &binder,
            "LargestBook",
            &[
                ("book.width", w),
                ("book.height", h),
                ("book.thickness", th),
            ],
            Some(volume),
        )?,
        scenario_check(
            &booklet,
            "ConfigureBooklet",
            &[("trim.face", 4200 / 2 - 2050), ("stitch.staples", 2)],
            None,
        )?,
        scenario_check(
            &booklet,
            "MinimalWaste",
            &[("trim.face", face), ("input.sheets", sheets)],
            Some(waste),
        )?,
    ];

    let mut sizes = Vec::new();
    for (t, device, vars_ref, cons_ref) in [
        (&binder, "PerfectBinder", 29, 58),
        (&booklet, "BookletMaker", 32, 56),
    ] {
        let m = lower_device(t, device).map_err(|e| e.to_string())?;
        let (v, c) = (m.num_vars(), m.num_constraints());
        let within = |got: usize, r: usize| got * 2 >= r && got <= r * 2;
        if !within(v, vars_ref) || !within(c, cons_ref) {
            return Err(format!(
                "{device}: {v}/{c} not within 2x of {vars_ref}/{cons_ref}"
            ));
        }
        sizes.push(format!("{device} {v}/{c} vs {vars_ref}/{cons_ref}"));
    }
    let slowest = times.iter().max().copied().unwrap_or_default();
    Ok(format!(
        "both specs check clean; 4 scenarios match oracles, slowest {}; sizes {}",
        ms(slowest),
        sizes.join(", ")
    ))
}

fn caching() -> Check {
    let dir = corpus_dir();
    let files: Vec<PathBuf> = ["perfect_binder.csx"]
        .iter()
        .map(|n| dir.path().join(n))
        .collect();
    let session = GlobalArgs::default().explorer();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    if cmd_check(&session, &files, Some(Format::Flat), &mut out, &mut err) != exit::OK {
        return Err("first check failed".into());
    }
    let first = session.solver_calls();
    let mut second_out = Vec::new();
    if cmd_check(
        &session,
        &files,
        Some(Format::Flat),
        &mut second_out,
        &mut err,
    ) != exit::OK
    {
        return Err("second check failed".into());
    }
    let delta = session.solver_calls() - first;
    if delta != 0 || out != second_out {
        return Err(format!("second check made {delta} solver calls"));
    }
    Ok(format!("first check {first} solver calls, second 0"))
}

fn roundtrip_and_export() -> Check {
    for seed in 0..1000u64 {
        let spec = support::random_spec(&mut ChaCha8Rng::seed_from_u64(seed));
        let text = pretty_print(&spec);
        let back = parse(&text).map_err(|e| format!("seed {seed}: {e}"))?;
        if back.without_spans() != spec.without_spans() {
            return Err(format!("seed {seed}: structure changed"));
        }
    }
    let dir = corpus_dir();
    let mut outputs = Vec::new();
    for (file, device) in [
        ("perfect_binder.csx", "PerfectBinder"),
        ("booklet_maker.csx", "BookletMaker"),
    ] {
        for _ in 0..2 {
            let path = dir.path().join(file);
            let args = [
                "csx",
                "--format",
                "interchange",
                "export",
                path.to_str().unwrap(),
                "--device",
                device,
            ];
            let (mut out, mut err) = (Vec::new(), Vec::new());
            if run(args, &mut out, &mut err) != exit::OK {
                return Err(format!("export {device} failed"));
            }
            outputs.push(out);
        }
    }
    if outputs[0] != outputs[1] || outputs[2] != outputs[3] {
        return Err("export output differs between runs".into());
    }
    Ok("1000/1000 generated specs round-trip; exports byte-identical".into())
}

fn bench() -> Check {
    let dir = corpus_dir();
    let g = GlobalArgs {
        format: Some(Format::Json),
        ..GlobalArgs::default()
    };
    let mut parts = Vec::new();
    for (file, scenario) in [
        ("perfect_binder.csx", "LargestBook"),
        ("booklet_maker.csx", "MinimalWaste"),
    ] {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = cmd_bench(
            &g,
            &[dir.path().join(file)],
            scenario,
            10,
            &mut out,
            &mut err,
        );
        if code != exit::OK {
            return Err(format!("bench {scenario} exited {code}"));
        }
        let v: Json = serde_json::from_slice(&out).map_err(|e| e.to_string())?;
        let rows = v["iterations"].as_array().cloned().unwrap_or_default();
        let split = rows
            .iter()
            .all(|r| r["translation_ns"].as_u64().is_some() && r["solving_ns"].as_u64().is_some());
        if rows.len() != 10 || !split {
            return Err(format!(
                "{scenario}: {} iterations without a phase split",
                rows.len()
            ));
        }
        let mean = |k: &str| v[k].as_u64().unwrap_or(0) as f64 / 1e6;
        parts.push(format!(
            "{scenario} translation {:.2} ms, solving {:.2} ms",
            mean("mean_translation_ns"),
            mean("mean_solving_ns")
        ));
    }
    Ok(format!("10 iterations each: {}", parts.join("; ")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("uninhabited type detected", uninhabited_detection),
        ("evaluator and solver agree", semantics_coherence),
        ("solver matches enumeration", solver_oracle),
        ("corpus specs check and scenarios pass", corpus_specs),
        ("unchanged workspace re-check is free", caching),
        ("round-trip and deterministic export", roundtrip_and_export),
        ("bench separates translation and solving", bench),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("[{}] PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[{}] FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "{}/{} acceptance criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
