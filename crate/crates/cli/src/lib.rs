//! The `csx` command line: check, test, solve, inhabit, export, bench and
//! serve over `.csx` workspaces.
//!
//! Every command is a library function writing to caller-supplied streams
//! and returning the process exit code, so the binary is a thin wrapper.

use std::fs;
use std::io::Write;
use std::path::{Path as FsPath, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use csx_core::explore::{
    exploration_json, parse_binding, parse_sources, run_scenario, ExplorationOutcome, Explorer,
    Inhabitance, JobRequest, ObjectiveRequest, ScenarioReport, SourceInput, WorkspaceReport,
};
use csx_core::lower::{lower_device, render_model, Dialect};
use csx_core::semantics::{analyze_lenient, DefKey};
use csx_core::solver::{Budget, DomainBox, DEFAULT_INT_MAX, DEFAULT_INT_MIN, DEFAULT_MAX_NODES};
use serde_json::json;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    /// Errors in the specification, failed expectations, uninhabited definitions.
    pub const FAILED: i32 = 1;
    /// Unreadable or unparsable input, unknown names, bad arguments.
    pub const USAGE: i32 = 2;
    pub const EMPTY: i32 = 3;
    pub const EXHAUSTED: i32 = 4;
}

/// Default time budget per solver call when neither `--budget-ms` nor
/// `CSX_BUDGET_MS` is given.
pub const DEFAULT_BUDGET_MS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// `qualified_name = value` lines (text reports for other commands).
    Flat,
    /// Nested blocks mirroring the configuration.
    Tree,
    Json,
    /// Solver interchange text (export only).
    Interchange,
    /// Readable model dump (export only).
    Debug,
}

#[derive(Debug, Parser)]
#[command(
    name = "csx",
    version,
    about = "Check, test and explore CSX device specifications"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Lower bound of every integer variable.
    #[arg(long, global = true, default_value_t = DEFAULT_INT_MIN, allow_negative_numbers = true)]
    pub int_min: i64,
    /// Upper bound of every integer variable.
    #[arg(long, global = true, default_value_t = DEFAULT_INT_MAX, allow_negative_numbers = true)]
    pub int_max: i64,
    /// Search node limit per solver call.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_NODES)]
    pub budget_nodes: u64,
    /// Time limit per solver call in milliseconds.
    #[arg(long, global = true, env = "CSX_BUDGET_MS", default_value_t = DEFAULT_BUDGET_MS)]
    pub budget_ms: u64,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed for randomized data generation; solving is deterministic regardless.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

impl Default for GlobalArgs {
    fn default() -> Self {
        GlobalArgs {
            int_min: DEFAULT_INT_MIN,
            int_max: DEFAULT_INT_MAX,
            budget_nodes: DEFAULT_MAX_NODES,
            budget_ms: DEFAULT_BUDGET_MS,
            format: None,
            seed: None,
        }
    }
}

impl GlobalArgs {
    pub fn validate(&self) -> Result<(), String> {
        if self.int_min > self.int_max {
            return Err(format!(
                "--int-min ({}) must not exceed --int-max ({})",
                self.int_min, self.int_max
            ));
        }
        if self.budget_nodes == 0 || self.budget_ms == 0 {
            return Err("budgets must be positive".into());
        }
        Ok(())
    }

    pub fn domain_box(&self) -> DomainBox {
        DomainBox::uniform(self.int_min, self.int_max)
    }

    pub fn budget(&self) -> Budget {
        Budget {
            max_nodes: self.budget_nodes,
            max_time: Some(Duration::from_millis(self.budget_ms)),
        }
    }

    /// A session with these bounds and budget.
    pub fn explorer(&self) -> Explorer {
        Explorer::new(self.domain_box(), self.budget())
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report diagnostics and whether every definition is inhabited.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Run scenarios and check their expectations.
    Test {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Run only this scenario.
        #[arg(long)]
        scenario: Option<String>,
    },
    /// Find a configuration of a device for a job.
    Solve {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        device: Option<String>,
        /// Fix a leaf: `<path>=<value>`.
        #[arg(short = 's', long = "set", value_name = "PATH=VALUE")]
        set: Vec<String>,
        /// Extra constraint over the device.
        #[arg(short = 'c', long = "constraint", value_name = "EXPR")]
        constraints: Vec<String>,
        /// `minimize:<expr>` or `maximize:<expr>`.
        #[arg(long)]
        objective: Option<String>,
        /// JSON job file; flags extend it.
        #[arg(long)]
        job: Option<PathBuf>,
    },
    /// Check inhabitance of types, actions and devices.
    Inhabit {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Only definitions with this name.
        #[arg(long = "def")]
        def: Option<String>,
    },
    /// Write the constraint model of a device.
    Export {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        device: String,
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
    /// Time translation and solving of a scenario separately.
    Bench {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        scenario: String,
        #[arg(long, default_value_t = 10)]
        iterations: u32,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
}

/// Parses arguments and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                exit::USAGE
            } else {
                exit::OK
            };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    if let Err(msg) = cli.global.validate() {
        let _ = writeln!(err, "error: {msg}");
        return exit::USAGE;
    }
    let g = &cli.global;
    let session = g.explorer();
    match &cli.command {
        Command::Check { files } => cmd_check(&session, files, g.format, out, err),
        Command::Test { files, scenario } => {
            cmd_test(&session, files, scenario.as_deref(), g.format, out, err)
        }
        Command::Solve {
            files,
            device,
            set,
            constraints,
            objective,
            job,
        } => {
            let request = match build_job(device, set, constraints, objective, job) {
                Ok(r) => r,
                Err(msg) => {
                    let _ = writeln!(err, "error: {msg}");
                    return exit::USAGE;
                }
            };
            cmd_solve(&session, files, &request, g.format, out, err)
        }
        Command::Inhabit { files, def } => {
            cmd_inhabit(&session, files, def.as_deref(), g.format, out, err)
        }
        Command::Export {
            files,
            device,
            out: path,
        } => cmd_export(files, device, g.format, path.as_deref(), out, err),
        Command::Bench {
            files,
            scenario,
            iterations,
        } => cmd_bench(g, files, scenario, *iterations, out, err),
        Command::Serve { port, host } => cmd_serve(g, host, *port, err),
    }
}

fn build_job(
    device: &Option<String>,
    set: &[String],
    constraints: &[String],
    objective: &Option<String>,
    job: &Option<PathBuf>,
) -> Result<JobRequest, String> {
    let mut request = match job {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            serde_json::from_str::<JobRequest>(&text)
                .map_err(|e| format!("invalid job file {}: {e}", path.display()))?
        }
        None => JobRequest::default(),
    };
    if let Some(d) = device {
        request.device = d.clone();
    }
    if request.device.is_empty() {
        return Err("no device given (use --device or a job file)".into());
    }
    for s in set {
        let (path, value) = parse_binding(s)?;
        request.fixed.insert(path, value);
    }
    request.constraints.extend(constraints.iter().cloned());
    if let Some(o) = objective {
        request.objective = Some(ObjectiveRequest::parse(o)?);
    }
    Ok(request)
}

/// Reads the given files; directories contribute their `.csx` files in
/// name order.
pub fn load_sources(files: &[PathBuf]) -> Result<Vec<SourceInput>, String> {
    let mut out = Vec::new();
    for f in files {
        if f.is_dir() {
            let mut entries: Vec<PathBuf> = fs::read_dir(f)
                .map_err(|e| format!("cannot read {}: {e}", f.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "csx"))
                .collect();
            entries.sort();
            for p in entries {
                out.push(read_source(&p)?);
            }
        } else {
            out.push(read_source(f)?);
        }
    }
    Ok(out)
}

fn read_source(path: &FsPath) -> Result<SourceInput, String> {
    fs::read_to_string(path)
        .map(|text| SourceInput::new(path.display().to_string(), text))
        .map_err(|e| format!("cannot read {}: {e}", path.display()))
}

/// Loads and analyzes a workspace. Unreadable or unparsable input is
/// reported and mapped to [`exit::USAGE`].
fn load(
    session: &Explorer,
    files: &[PathBuf],
    run_scenarios: bool,
    err: &mut dyn Write,
) -> Result<WorkspaceReport, i32> {
    let sources = load_sources(files).map_err(|msg| {
        let _ = writeln!(err, "error: {msg}");
        exit::USAGE
    })?;
    let report = session.analyze_workspace(&sources, run_scenarios);
    if report.parse_failed {
        for d in report.render_diagnostics() {
            let _ = writeln!(err, "{d}");
        }
        return Err(exit::USAGE);
    }
    Ok(report)
}

fn diagnostics_json(report: &WorkspaceReport) -> serde_json::Value {
    report
        .diagnostics
        .iter()
        .map(|d| {
            json!({
                "severity": d.severity,
                "message": d.message,
                "location": report.sources.location(d.span),
            })
        })
        .collect()
}

fn verdict_text(v: &Result<Inhabitance, String>) -> String {
    match v {
        Ok(Inhabitance::Inhabited) => "inhabited".into(),
        Ok(Inhabitance::Uninhabited) => "uninhabited".into(),
        Ok(Inhabitance::Unknown) => "unknown".into(),
        Err(e) => format!("not checked ({e})"),
    }
}

fn verdict_json(v: &Result<Inhabitance, String>) -> serde_json::Value {
    match v {
        Ok(i) => json!(i),
        Err(e) => json!({ "error": e }),
    }
}

fn write_json(out: &mut dyn Write, v: &serde_json::Value) {
    let _ = writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(v).unwrap_or_default()
    );
}

/// Prints diagnostics and inhabitance results. Exits 0 iff there are no
/// errors and every definition is proven inhabited.
pub fn cmd_check(
    session: &Explorer,
    files: &[PathBuf],
    format: Option<Format>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let report = match load(session, files, false, err) {
        Ok(r) => r,
        Err(code) => return code,
    };
    let all_inhabited = report
        .inhabitance
        .iter()
        .all(|e| matches!(e.verdict, Ok(Inhabitance::Inhabited)));
    let ok = !report.has_errors() && all_inhabited;
    if format == Some(Format::Json) {
        let inhabitance: Vec<_> = report
            .inhabitance
            .iter()
            .map(|e| json!({ "kind": e.kind, "name": e.name, "verdict": verdict_json(&e.verdict) }))
            .collect();
        write_json(
            out,
            &json!({
                "ok": ok,
                "diagnostics": diagnostics_json(&report),
                "inhabitance": inhabitance,
            }),
        );
    } else {
        for d in report.render_diagnostics() {
            let _ = writeln!(out, "{d}");
        }
        for e in &report.inhabitance {
            let _ = writeln!(out, "{} {}: {}", e.kind, e.name, verdict_text(&e.verdict));
        }
        let errors = report.diagnostics.iter().filter(|d| d.is_error()).count();
        let warnings = report.diagnostics.len() - errors;
        let _ = writeln!(out, "{errors} error(s), {warnings} warning(s)");
    }
    if ok {
        exit::OK
    } else {
        exit::FAILED
    }
}

fn scenario_json(r: &ScenarioReport, report: &WorkspaceReport) -> serde_json::Value {
    let expectations: Vec<_> = r
        .expectations
        .iter()
        .map(|e| {
            let witness: serde_json::Map<String, serde_json::Value> = e
                .witness
                .iter()
                .map(|(k, v)| (k.clone(), json!(v)))
                .collect();
            json!({
                "expectation": e.text,
                "location": report.sources.location(e.span),
                "passed": e.passed,
                "witness_dependent": e.witness_dependent,
                "witness": witness,
                "error": e.error,
            })
        })
        .collect();
    let objective = match &r.exploration.outcome {
        ExplorationOutcome::Found { objective, .. } => *objective,
        _ => None,
    };
    json!({
        "scenario": r.name,
        "device": r.device,
        "passed": r.passed(),
        "outcome": r.exploration.outcome.label(),
        "objective": objective,
        "failure": r.failure(),
        "expectations": expectations,
    })
}

/// Runs every scenario (or one) and reports each expectation. Exits 0 iff
/// all expectations pass.
pub fn cmd_test(
    session: &Explorer,
    files: &[PathBuf],
    only: Option<&str>,
    format: Option<Format>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let report = match load(session, files, true, err) {
        Ok(r) => r,
        Err(code) => return code,
    };
    if let Some(name) = only {
        if !report.scenarios.iter().any(|(n, _)| n == name) {
            let _ = writeln!(err, "error: unknown scenario `{name}`");
            return exit::USAGE;
        }
    }
    let selected: Vec<&(String, Result<ScenarioReport, String>)> = report
        .scenarios
        .iter()
        .filter(|(n, _)| only.is_none_or(|o| o == n))
        .collect();
    let all_passed = selected
        .iter()
        .all(|(_, r)| r.as_ref().is_ok_and(|r| r.passed()));
    let errors: Vec<String> = report
        .diagnostics
        .iter()
        .filter(|d| d.is_error())
        .map(|d| d.render(&report.sources))
        .collect();
    let ok = all_passed && errors.is_empty();
    if format == Some(Format::Json) {
        let scenarios: Vec<_> = selected
            .iter()
            .map(|(name, r)| match r {
                Ok(r) => scenario_json(r, &report),
                Err(e) => json!({ "scenario": name, "passed": false, "failure": e }),
            })
            .collect();
        write_json(
            out,
            &json!({
                "ok": ok,
                "diagnostics": diagnostics_json(&report),
                "scenarios": scenarios,
            }),
        );
    } else {
        for e in &errors {
            let _ = writeln!(out, "{e}");
        }
        let mut passed = 0;
        for (name, r) in &selected {
            match r {
                Ok(r) => {
                    let objective = match &r.exploration.outcome {
                        ExplorationOutcome::Found {
                            objective: Some(v), ..
                        } => format!(", objective {v}"),
                        _ => String::new(),
                    };
                    if r.passed() {
                        passed += 1;
                        let _ = writeln!(
                            out,
                            "PASS {name} ({}{objective})",
                            r.exploration.outcome.label()
                        );
                    } else {
                        let reason = r.failure().unwrap_or_default();
                        let _ = writeln!(out, "FAIL {name}: {reason}");
                    }
                    for e in &r.expectations {
                        let mark = if e.passed { "ok  " } else { "FAIL" };
                        let note = if e.witness_dependent {
                            " [witness-dependent]"
                        } else {
                            ""
                        };
                        let _ = writeln!(out, "  {mark} [{}]{note}", e.text);
                        if !e.passed {
                            let witness: Vec<String> = e
                                .witness
                                .iter()
                                .map(|(k, v)| format!("{k} = {v}"))
                                .collect();
                            let _ = writeln!(
                                out,
                                "       at {}; witness: {}",
                                report.sources.location(e.span),
                                if witness.is_empty() {
                                    "none".into()
                                } else {
                                    witness.join(", ")
                                }
                            );
                            if let Some(msg) = &e.error {
                                let _ = writeln!(out, "       error: {msg}");
                            }
                        }
                    }
                }
                Err(e) => {
                    let _ = writeln!(out, "FAIL {name}: {e}");
                }
            }
        }
        let _ = writeln!(out, "{passed}/{} scenario(s) passed", selected.len());
    }
    if ok {
        exit::OK
    } else {
        exit::FAILED
    }
}

/// Solves a job and prints the configuration. Exits 0 when one was found,
/// 3 for an empty space and 4 when the budget ran out.
pub fn cmd_solve(
    session: &Explorer,
    files: &[PathBuf],
    request: &JobRequest,
    format: Option<Format>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let report = match load(session, files, false, err) {
        Ok(r) => r,
        Err(code) => return code,
    };
    let tspec = report.tspec();
    let Some(device) = tspec.device(&request.device) else {
        let _ = writeln!(err, "error: unknown device `{}`", request.device);
        return exit::USAGE;
    };
    if !report
        .analysis
        .is_clean(&DefKey::Device(device.name.clone()))
    {
        for d in report.render_diagnostics() {
            let _ = writeln!(err, "{d}");
        }
        let _ = writeln!(err, "error: device `{}` has errors", request.device);
        return exit::USAGE;
    }
    let job = match request.to_job() {
        Ok(j) => j,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return exit::USAGE;
        }
    };
    let x = match session.find(tspec, &job) {
        Ok(x) => x,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit::USAGE;
        }
    };
    match format.unwrap_or(Format::Flat) {
        Format::Json => write_json(out, &exploration_json(&x)),
        fmt => {
            let (config, objective) = match &x.outcome {
                ExplorationOutcome::Found {
                    configuration,
                    objective,
                    ..
                } => (Some(configuration), *objective),
                ExplorationOutcome::EmptySpace => {
                    let _ = writeln!(out, "empty configuration space");
                    (None, None)
                }
                ExplorationOutcome::Exhausted {
                    incumbent,
                    objective,
                } => {
                    let _ = writeln!(out, "search budget exhausted");
                    if incumbent.is_some() {
                        let _ = writeln!(out, "best configuration found:");
                    }
                    (incumbent.as_ref(), *objective)
                }
            };
            if let Some(c) = config {
                let text = if fmt == Format::Tree {
                    c.to_tree_text()
                } else {
                    c.to_flat_text()
                };
                let _ = out.write_all(text.as_bytes());
            }
            if let Some(v) = objective {
                let _ = writeln!(out, "objective = {v}");
            }
        }
    }
    match x.outcome {
        ExplorationOutcome::Found { .. } => exit::OK,
        ExplorationOutcome::EmptySpace => exit::EMPTY,
        ExplorationOutcome::Exhausted { .. } => exit::EXHAUSTED,
    }
}

/// Checks inhabitance of every definition (or those named `only`). Exits 0
/// when all are inhabited, 1 if any is uninhabited, 4 if any is undecided.
pub fn cmd_inhabit(
    session: &Explorer,
    files: &[PathBuf],
    only: Option<&str>,
    format: Option<Format>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let report = match load(session, files, false, err) {
        Ok(r) => r,
        Err(code) => return code,
    };
    let spec = &report.tspec().spec;
    if let Some(name) = only {
        let exists = spec.type_def(name).is_some()
            || spec.action_def(name).is_some()
            || spec.device_def(name).is_some();
        if !exists {
            let _ = writeln!(err, "error: no type, action or device named `{name}`");
            return exit::USAGE;
        }
    }
    let entries: Vec<_> = report
        .inhabitance
        .iter()
        .filter(|e| only.is_none_or(|o| o == e.name))
        .collect();
    if let Some(name) = only {
        if entries.is_empty() {
            let _ = writeln!(err, "error: `{name}` has errors and was not checked");
            for d in report.render_diagnostics() {
                let _ = writeln!(err, "{d}");
            }
            return exit::FAILED;
        }
    }
    if format == Some(Format::Json) {
        let v: Vec<_> = entries
            .iter()
            .map(|e| json!({ "kind": e.kind, "name": e.name, "verdict": verdict_json(&e.verdict) }))
            .collect();
        write_json(out, &json!(v));
    } else {
        for e in &entries {
            let _ = writeln!(out, "{} {}: {}", e.kind, e.name, verdict_text(&e.verdict));
        }
    }
    if entries
        .iter()
        .any(|e| matches!(e.verdict, Ok(Inhabitance::Uninhabited)))
    {
        exit::FAILED
    } else if entries
        .iter()
        .all(|e| matches!(e.verdict, Ok(Inhabitance::Inhabited)))
    {
        exit::OK
    } else {
        exit::EXHAUSTED
    }
}

/// Writes the constraint model of a device and reports its size on `err`.
pub fn cmd_export(
    files: &[PathBuf],
    device: &str,
    format: Option<Format>,
    path: Option<&FsPath>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let dialect = match format.unwrap_or(Format::Interchange) {
        Format::Interchange => Dialect::Interchange,
        Format::Debug => Dialect::Debug,
        other => {
            let _ = writeln!(
                err,
                "error: export supports --format interchange or debug, not {other:?}"
            );
            return exit::USAGE;
        }
    };
    let sources = match load_sources(files) {
        Ok(s) => s,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return exit::USAGE;
        }
    };
    let parsed = parse_sources(&sources);
    if !parsed.diagnostics.is_empty() {
        for d in &parsed.diagnostics {
            let _ = writeln!(err, "{}", d.render(&parsed.sources));
        }
        return exit::USAGE;
    }
    let analysis = analyze_lenient(&parsed.spec);
    let Some(dev) = analysis.tspec.device(device) else {
        let _ = writeln!(err, "error: unknown device `{device}`");
        return exit::USAGE;
    };
    if !analysis.is_clean(&DefKey::Device(dev.name.clone())) {
        for d in &analysis.diagnostics {
            let _ = writeln!(err, "{}", d.render(&parsed.sources));
        }
        let _ = writeln!(err, "error: device `{device}` has errors");
        return exit::USAGE;
    }
    let model = match lower_device(&analysis.tspec, device) {
        Ok(m) => m,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit::USAGE;
        }
    };
    let text = render_model(&model, dialect);
    match path {
        Some(p) => {
            if let Err(e) = fs::write(p, &text) {
                let _ = writeln!(err, "error: cannot write {}: {e}", p.display());
                return exit::USAGE;
            }
        }
        None => {
            let _ = out.write_all(text.as_bytes());
        }
    }
    let _ = writeln!(
        err,
        "{device}: {} variables, {} constraints",
        model.num_vars(),
        model.num_constraints()
    );
    exit::OK
}

/// One measured run of a scenario.
#[derive(Debug, Clone, Copy)]
pub struct BenchSample {
    pub translation: Duration,
    pub solving: Duration,
}

/// Runs a scenario `iterations` times without caching and reports the
/// translation and solving time of each run and their means.
pub fn cmd_bench(
    g: &GlobalArgs,
    files: &[PathBuf],
    scenario: &str,
    iterations: u32,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    if iterations == 0 {
        let _ = writeln!(err, "error: --iterations must be positive");
        return exit::USAGE;
    }
    let session = g.explorer();
    let report = match load(&session, files, false, err) {
        Ok(r) => r,
        Err(code) => return code,
    };
    let tspec = report.tspec();
    let Some(sc) = tspec.spec.scenario_def(scenario) else {
        let _ = writeln!(err, "error: unknown scenario `{scenario}`");
        return exit::USAGE;
    };
    if !report.analysis.is_clean(&DefKey::Scenario(sc.name.clone())) {
        for d in report.render_diagnostics() {
            let _ = writeln!(err, "{d}");
        }
        return exit::USAGE;
    }
    let (dbox, budget) = (g.domain_box(), g.budget());
    let mut samples = Vec::new();
    let mut last = None;
    for _ in 0..iterations {
        match run_scenario(tspec, scenario, &dbox, budget) {
            Ok(r) => {
                samples.push(BenchSample {
                    translation: r.exploration.translation,
                    solving: r.exploration.solving,
                });
                last = Some(r);
            }
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                return exit::USAGE;
            }
        }
    }
    let Some(last) = last else {
        return exit::USAGE;
    };
    let n = samples.len() as u128;
    let mean_t = samples
        .iter()
        .map(|s| s.translation.as_nanos())
        .sum::<u128>()
        / n;
    let mean_s = samples.iter().map(|s| s.solving.as_nanos()).sum::<u128>() / n;
    if g.format == Some(Format::Json) {
        let rows: Vec<_> = samples
            .iter()
            .map(|s| {
                json!({
                    "translation_ns": s.translation.as_nanos() as u64,
                    "solving_ns": s.solving.as_nanos() as u64,
                })
            })
            .collect();
        write_json(
            out,
            &json!({
                "scenario": scenario,
                "outcome": last.exploration.outcome.label(),
                "variables": last.exploration.variables,
                "constraints": last.exploration.constraints,
                "iterations": rows,
                "mean_translation_ns": mean_t as u64,
                "mean_solving_ns": mean_s as u64,
            }),
        );
    } else {
        let _ = writeln!(
            out,
            "scenario {scenario}: {} variables, {} constraints, outcome {}",
            last.exploration.variables,
            last.exploration.constraints,
            last.exploration.outcome.label()
        );
        let _ = writeln!(
            out,
            "{:>9}  {:>16}  {:>16}",
            "iteration", "translation_ns", "solving_ns"
        );
        for (i, s) in samples.iter().enumerate() {
            let _ = writeln!(
                out,
                "{:>9}  {:>16}  {:>16}",
                i + 1,
                s.translation.as_nanos(),
                s.solving.as_nanos()
            );
        }
        let _ = writeln!(out, "{:>9}  {:>16}  {:>16}", "mean", mean_t, mean_s);
    }
    exit::OK
}

fn cmd_serve(g: &GlobalArgs, host: &str, port: u16, err: &mut dyn Write) -> i32 {
    let runtime = match tokio::runtime::Runtime::new() {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start runtime: {e}");
            return exit::USAGE;
        }
    };
    let config = csx_service::ServiceConfig {
        dbox: g.domain_box(),
        budget: g.budget(),
    };
    let addr = format!("{host}:{port}");
    match runtime.block_on(csx_service::serve(&addr, config)) {
        Ok(()) => exit::OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit::USAGE
        }
    }
}
