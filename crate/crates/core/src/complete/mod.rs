//! Constructive completeness: bounded stacks, iterators, unary division,
//! finite-table encodings and a Turing machine compiler, all built as
//! ordinary closed LFPL terms.

mod encode;
mod iterate;
mod stack;
mod stdlib;
mod tm;

use thiserror::Error;

use crate::den::{den_closed, DenValue};
use crate::syntax::{parse_term, ParseError, Type};
use crate::typecheck::{check_closed, TypeError, TypedTerm};

pub use encode::{encode_function, encode_value, finite_den, finite_index, finite_type};
pub use iterate::{iter_poly, iter_sharp};
pub use stack::{
    check_stack, m_den, m_value, ms_type, pop_type, push_type, stack_add, stack_const,
    stack_inductive, stack_monomial, stack_poly, stack_poly_at, stack_weaken, StackDivergence,
    StackImpl, StackOp,
};
pub use stdlib::{
    divmod_term, join_term, lfold, lunfold, rev_append, reverse, stdlib, stdlib_at, susp,
};
pub use tm::{
    compile_tm, compile_tm_listout, parse_tm, CompiledTm, Dir, Output, TmRun, TmSpec, Transition,
};

#[derive(Clone, Debug, Error)]
pub enum CompleteError {
    #[error("generated term does not parse: {0}")]
    Parse(#[from] ParseError),
    #[error("generated term does not type-check: {0}")]
    Type(#[from] TypeError),
    #[error("type {0} is not diamond-free")]
    NotDiamondFree(Type),
    #[error("{0}")]
    Shape(String),
    #[error("{0}")]
    Tm(String),
}

/// A closed, type-checked term together with an ascribed source form that
/// can be spliced into larger programs.
#[derive(Clone, Debug)]
pub struct Closed {
    src: String,
    pub ty: Type,
    pub term: TypedTerm,
}

impl Closed {
    pub fn parse(body: &str, ty: Type) -> Result<Closed, CompleteError> {
        let term = parse_term(body)?;
        let typed = check_closed(&term, &ty)?;
        Ok(Closed {
            src: format!("({body} : {ty})"),
            ty,
            term: typed,
        })
    }

    /// Source text of the form `(term : type)`.
    pub fn src(&self) -> &str {
        &self.src
    }

    pub fn den(&self) -> DenValue {
        den_closed(&self.term)
    }
}

/// Source-level fresh name supply.
#[derive(Default)]
pub(crate) struct Fresh(usize);

impl Fresh {
    pub(crate) fn name(&mut self, base: &str) -> String {
        self.0 += 1;
        format!("{base}{}", self.0)
    }
}

/// Right-nested tuple syntax; the empty tuple is `<>`.
pub(crate) fn tuple_src(parts: &[String]) -> String {
    match parts {
        [] => "<>".into(),
        [one] => one.clone(),
        _ => format!("({})", parts.join(", ")),
    }
}

#[cfg(test)]
mod tests;
