//! Concrete and abstract syntax.

mod lexer;
mod parser;
mod printer;
mod program;
pub mod term;
pub mod types;

pub use lexer::{lex, Tok, Token};
pub use parser::{parse_term, parse_type, ParseError};
pub use printer::print_term;
pub use program::{parse_program, Definition, Program};
pub use term::{build, Name, Side, Span, Term, TermKind};
pub use types::{diamond_free_types, is_diamond_free, Type};
