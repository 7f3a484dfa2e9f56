//! LFPL and LFPL+: parsing, affine type checking, big-step cost semantics,
//! a reference denotational semantics, polynomial cost-bound synthesis, and
//! the bounded-stack toolkit that compiles polynomial-time Turing machines
//! into LFPL terms.

pub mod complete;
pub mod costpoly;
pub mod den;
pub mod eval;
pub mod harness;
pub mod syntax;
pub mod typecheck;

pub use costpoly::CostPoly;
pub use den::DenValue;
pub use eval::{CostModel, Env, Value};
pub use syntax::{Name, Side, Span, Term, TermKind, Type};
pub use typecheck::{TypeError, TypedTerm};
