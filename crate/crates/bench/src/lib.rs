//! Shared setup for the benchmarks: the bundled corpus, analyzed once.

use csx_core::corpus;
use csx_core::explore::{analyze_workspace, SourceInput, WorkspaceReport};
use csx_core::solver::{Budget, DomainBox};

/// The bundled scenarios worth timing, with the file that defines each.
pub const SCENARIOS: [(&str, &str); 4] = [
    ("perfect_binder.csx", "DeriveCover"),
    ("perfect_binder.csx", "LargestBook"),
    ("booklet_maker.csx", "ConfigureBooklet"),
    ("booklet_maker.csx", "MinimalWaste"),
];

/// Parses and analyzes one bundled file without checking inhabitance.
pub fn load(file: &str) -> WorkspaceReport {
    let (name, text) = corpus::ALL
        .iter()
        .find(|(n, _)| *n == file)
        .copied()
        .unwrap_or_else(|| panic!("no bundled file `{file}`"));
    let report = analyze_workspace(
        &[SourceInput::new(name, text)],
        &DomainBox::default(),
        Budget::default(),
        false,
    );
    assert!(!report.has_errors(), "{:?}", report.render_diagnostics());
    report
}
