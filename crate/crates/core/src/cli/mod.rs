//! Expression parser, report types and the command runner.

pub mod parser;
pub mod report;
#[cfg(feature = "cli")]
pub mod run;

pub use parser::{format_field, parse_expr, parse_field, Ast};
pub use report::{analyze, field_report, AnalysisOptions, Report, Sections};
