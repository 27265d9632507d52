//! Problem files, analysis driver and report rendering for the `critmul` tool.

pub mod analyze;
pub mod expr;
pub mod problem;
pub mod render;

pub use analyze::{analyze, AnalyzeOptions, Report};
pub use expr::{parse_expression, parse_polynomial, ExprAst, ExprError};
pub use problem::{parse_problem_file, parse_problem_str, Problem, ProblemError, ProblemFile};
pub use render::render_text;
