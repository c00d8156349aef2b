//! Concrete syntax: lexing, parsing, pretty-printing and desugaring.

pub mod ast;
mod desugar;
mod lexer;
mod parser;
pub mod pretty;
pub mod source;

pub use ast::*;
pub use desugar::desugar;
pub use parser::{parse, parse_expr, parse_file, ParseError, ParseErrors};
pub use pretty::{pretty_print, print_expr};
pub use source::{FileId, SourceFile, SourceMap, Span};
