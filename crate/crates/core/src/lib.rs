//! Toolchain for a small language describing manufacturing devices as
//! typed locations, parameterised actions and constraints over them.
//!
//! The pipeline is [`syntax`] (parse and print), [`semantics`] (name binding
//! and type checking), [`lower`] (flattening to integer/boolean constraint
//! models), [`solver`] (finite-domain search), [`eval`] (direct evaluation
//! over configurations) and [`explore`] (jobs, scenarios, inhabitance and
//! caching).

pub mod corpus;
pub mod eval;
pub mod explore;
pub mod lower;
pub mod semantics;
pub mod solver;
pub mod syntax;
