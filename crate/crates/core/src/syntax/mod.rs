//! Concrete and abstract syntax of the three source languages.

pub mod ast;
mod error;
mod fresh;
mod lexer;
mod parser;
mod render;
pub mod typeck;

pub use ast::*;
pub use error::{ParseError, ParseErrorKind, Pos};
pub use fresh::fresh_family;
pub use parser::{parse_csp, parse_expr, parse_gcl, parse_par, ParseResult};
pub use render::{render, render_csp, render_declaration, render_expr, render_par, render_stmt};
