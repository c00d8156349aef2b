use super::ast::{ScenarioDef, Spec, TestCase};

/// Distributes each scenario's bindings, extra constraints and objective onto
/// its expectations, producing one [`TestCase`] per expectation. Other
/// definitions are left untouched, and running it twice changes nothing.
pub fn desugar(spec: &Spec) -> Spec {
    let mut out = spec.clone();
    for sc in &mut out.scenarios {
        sc.tests = tests_of(sc);
    }
    out
}

fn tests_of(sc: &ScenarioDef) -> Vec<TestCase> {
    sc.expectations
        .iter()
        .map(|e| TestCase {
            bindings: sc.bindings.clone(),
            constraints: sc.constraints.clone(),
            objective: sc.objective.clone(),
            expectation: e.clone(),
        })
        .collect()
}
