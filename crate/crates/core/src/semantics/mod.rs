//! Static analysis: name binding, type checking and well-formedness.

mod analyze;
mod cycles;
pub mod diagnostic;
pub mod typed;

pub use analyze::{analyze, analyze_device_expr, analyze_lenient, resolve_leaf, Analysis, DefKey};
pub use diagnostic::{Diagnostic, Severity};
pub use typed::*;
