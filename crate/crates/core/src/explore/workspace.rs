use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::Serialize;

use super::cache::{cache_key, Cache, QueryKind};
use super::{
    check_inhabitance, find_configuration, run_scenario, Exploration, ExploreError, Inhabitance,
    Job, ScenarioReport,
};
use crate::semantics::{analyze_lenient, Analysis, DefKey, Diagnostic, TypedSpec};
use crate::solver::{Budget, DomainBox};
use crate::syntax::{parse_file, Ident, SourceFile, SourceMap, Span, Spec};

/// Definitions that have an inhabitance question.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DefKind {
    Type,
    Action,
    Device,
}

impl fmt::Display for DefKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DefKind::Type => "type",
            DefKind::Action => "action",
            DefKind::Device => "device",
        })
    }
}

impl DefKind {
    fn query(self) -> QueryKind {
        match self {
            DefKind::Type => QueryKind::TypeInhabitance,
            DefKind::Action => QueryKind::ActionInhabitance,
            DefKind::Device => QueryKind::DeviceInhabitance,
        }
    }

    fn key(self, name: &Ident) -> DefKey {
        match self {
            DefKind::Type => DefKey::Type(name.clone()),
            DefKind::Action => DefKey::Action(name.clone()),
            DefKind::Device => DefKey::Device(name.clone()),
        }
    }
}

/// A named source text.
#[derive(Debug, Clone)]
pub struct SourceInput {
    pub name: String,
    pub text: String,
}

impl SourceInput {
    pub fn new(name: impl Into<String>, text: impl Into<String>) -> Self {
        SourceInput {
            name: name.into(),
            text: text.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InhabitanceEntry {
    pub kind: DefKind,
    pub name: String,
    #[serde(skip)]
    pub span: Span,
    pub verdict: Result<Inhabitance, String>,
}

/// Everything known about a set of source files.
#[derive(Debug, Clone)]
pub struct WorkspaceReport {
    pub sources: SourceMap,
    /// True when some file did not parse; its definitions are missing.
    pub parse_failed: bool,
    pub analysis: Analysis,
    /// Parse, analysis and inhabitance diagnostics in source order.
    pub diagnostics: Vec<Diagnostic>,
    pub inhabitance: Vec<InhabitanceEntry>,
    /// Scenario results in source order, when requested.
    pub scenarios: Vec<(String, Result<ScenarioReport, String>)>,
}

impl WorkspaceReport {
    pub fn tspec(&self) -> &TypedSpec {
        &self.analysis.tspec
    }

    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(Diagnostic::is_error)
    }

    pub fn render_diagnostics(&self) -> Vec<String> {
        self.diagnostics
            .iter()
            .map(|d| d.render(&self.sources))
            .collect()
    }
}

/// Shared exploration session. Inhabitance and scenario results are cached by
/// the structure of the definitions involved, so re-checking unchanged
/// definitions does not call the solver again.
pub struct Explorer {
    pub dbox: DomainBox,
    pub budget: Budget,
    inhabit: Cache<Result<Inhabitance, String>>,
    scenarios: Cache<Result<ScenarioReport, String>>,
    solver_calls: AtomicU64,
}

impl Default for Explorer {
    fn default() -> Self {
        Explorer::new(DomainBox::default(), Budget::default())
    }
}

impl Explorer {
    pub fn new(dbox: DomainBox, budget: Budget) -> Self {
        Explorer {
            dbox,
            budget,
            inhabit: Cache::default(),
            scenarios: Cache::default(),
            solver_calls: AtomicU64::new(0),
        }
    }

    /// Number of solver invocations made so far.
    pub fn solver_calls(&self) -> u64 {
        self.solver_calls.load(Ordering::Relaxed)
    }

    pub fn inhabitance(
        &self,
        tspec: &TypedSpec,
        kind: DefKind,
        name: &str,
    ) -> Result<Inhabitance, String> {
        let key = cache_key(&tspec.spec, kind.query(), name, &self.dbox, &self.budget);
        self.inhabit.get_or_compute(key, || {
            self.solver_calls.fetch_add(1, Ordering::Relaxed);
            check_inhabitance(tspec, kind, name, &self.dbox, self.budget).map_err(|e| e.to_string())
        })
    }

    pub fn scenario(&self, tspec: &TypedSpec, name: &str) -> Result<ScenarioReport, String> {
        let sc = tspec
            .scenarios
            .get(name)
            .ok_or_else(|| ExploreError::UnknownScenario(name.to_string()).to_string())?;
        let key = cache_key(
            &tspec.spec,
            QueryKind::Scenario,
            name,
            &self.dbox,
            &self.budget,
        );
        let mut report = self.scenarios.get_or_compute(key, || {
            self.solver_calls.fetch_add(1, Ordering::Relaxed);
            run_scenario(tspec, name, &self.dbox, self.budget).map_err(|e| e.to_string())
        })?;
        report.span = sc.span;
        for (r, t) in report.expectations.iter_mut().zip(&sc.tests) {
            r.span = t.expectation.span;
        }
        Ok(report)
    }

    /// Solves a job. Jobs are not cached.
    pub fn find(&self, tspec: &TypedSpec, job: &Job) -> Result<Exploration, ExploreError> {
        self.solver_calls.fetch_add(1, Ordering::Relaxed);
        find_configuration(tspec, job, &self.dbox, self.budget)
    }

    /// Parses and analyzes `sources`, checks inhabitance of every definition
    /// free of errors and optionally runs every scenario.
    pub fn analyze_workspace(
        &self,
        sources: &[SourceInput],
        run_scenarios: bool,
    ) -> WorkspaceReport {
        let parsed = parse_sources(sources);
        let map = parsed.sources;
        let parse_failed = !parsed.diagnostics.is_empty();
        let mut diagnostics = parsed.diagnostics;
        let analysis = analyze_lenient(&parsed.spec);
        diagnostics.extend(analysis.diagnostics.iter().cloned());

        let tspec = &analysis.tspec;
        let mut defs: Vec<(Span, DefKind, Ident)> = Vec::new();
        defs.extend(
            tspec
                .spec
                .types
                .iter()
                .map(|t| (t.span, DefKind::Type, t.name.clone())),
        );
        defs.extend(
            tspec
                .spec
                .actions
                .iter()
                .map(|a| (a.span, DefKind::Action, a.name.clone())),
        );
        defs.extend(
            tspec
                .spec
                .devices
                .iter()
                .map(|d| (d.span, DefKind::Device, d.name.clone())),
        );
        defs.sort_by_key(|(span, _, _)| *span);
        let mut inhabitance = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (span, kind, name) in defs {
            if !analysis.is_clean(&kind.key(&name)) || !seen.insert((kind, name.clone())) {
                continue;
            }
            let verdict = self.inhabitance(tspec, kind, name.as_str());
            match &verdict {
                Ok(Inhabitance::Uninhabited) => diagnostics.push(Diagnostic::error(
                    format!("{kind} `{name}` is uninhabited: no instance satisfies its constraints"),
                    span,
                )),
                Ok(Inhabitance::Unknown) => diagnostics.push(Diagnostic::warning(
                    format!("could not decide whether {kind} `{name}` is inhabited within the search budget"),
                    span,
                )),
                Ok(Inhabitance::Inhabited) => {}
                Err(msg) => diagnostics.push(Diagnostic::warning(
                    format!("inhabitance of {kind} `{name}` could not be checked: {msg}"),
                    span,
                )),
            }
            inhabitance.push(InhabitanceEntry {
                kind,
                name: name.to_string(),
                span,
                verdict,
            });
        }

        let mut scenarios = Vec::new();
        if run_scenarios {
            let mut seen = std::collections::HashSet::new();
            for s in &tspec.spec.scenarios {
                if !seen.insert(s.name.clone()) {
                    continue;
                }
                let result = if analysis.is_clean(&DefKey::Scenario(s.name.clone()))
                    && analysis.is_clean(&DefKey::Device(s.device.clone()))
                {
                    self.scenario(tspec, s.name.as_str())
                } else {
                    Err(format!("scenario `{}` has errors", s.name))
                };
                scenarios.push((s.name.to_string(), result));
            }
        }

        diagnostics.sort_by_key(|d| d.span);
        WorkspaceReport {
            sources: map,
            parse_failed,
            analysis,
            diagnostics,
            inhabitance,
            scenarios,
        }
    }
}

/// Source files parsed into one specification.
#[derive(Debug, Clone)]
pub struct ParsedSources {
    pub sources: SourceMap,
    /// Definitions of every file that parsed.
    pub spec: Spec,
    /// Parse errors; empty when every file parsed.
    pub diagnostics: Vec<Diagnostic>,
}

pub fn parse_sources(sources: &[SourceInput]) -> ParsedSources {
    let mut map = SourceMap::new();
    let mut spec = Spec::default();
    let mut diagnostics = Vec::new();
    for src in sources {
        let id = map.add(SourceFile::new(src.name.clone(), src.text.clone()));
        match parse_file(id, &src.text) {
            Ok(s) => spec.extend(s),
            Err(errs) => diagnostics.extend(Vec::<Diagnostic>::from(errs)),
        }
    }
    ParsedSources {
        sources: map,
        spec,
        diagnostics,
    }
}

/// Analyzes a workspace with a fresh, uncached session.
pub fn analyze_workspace(
    sources: &[SourceInput],
    dbox: &DomainBox,
    budget: Budget,
    run_scenarios: bool,
) -> WorkspaceReport {
    Explorer::new(dbox.clone(), budget).analyze_workspace(sources, run_scenarios)
}
