use std::rc::Rc;

use super::lexer::Tok;
use super::parser::{ParseError, Parser};
use super::term::{Name, Span, Term, TermKind};
use super::types::Type;

/// A top-level `name : TYPE` / `name = TERM` pair.
#[derive(Clone, Debug)]
pub struct Definition {
    pub name: Name,
    pub ty: Type,
    /// The body as written.
    pub raw: Term,
    /// The body with references to earlier definitions replaced by their
    /// ascribed bodies.
    pub term: Term,
    pub span: Span,
}

#[derive(Clone, Debug, Default)]
pub struct Program {
    pub defs: Vec<Definition>,
}

impl Program {
    pub fn get(&self, name: &str) -> Option<&Definition> {
        self.defs.iter().rev().find(|d| &*d.name == name)
    }

    /// The named definition wrapped in its ascription, ready to be used as
    /// a closed subterm.
    pub fn closed(&self, name: &str) -> Option<Rc<Term>> {
        self.get(name).map(|d| {
            Rc::new(Term::at(
                TermKind::Ann(Rc::new(d.term.clone()), d.ty.clone()),
                d.span,
            ))
        })
    }
}

/// Parses a `.lfpl` source file.
pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    let mut p = Parser::new(src)?;
    let mut prog = Program::default();
    while !p.at_eof() {
        let span = p.span();
        let name = p.ident()?;
        if p.peek_is(&Tok::Eq) {
            return Err(ParseError::new(
                span,
                format!("definition of `{name}` has no type ascription"),
            ));
        }
        p.expect(&Tok::Colon)?;
        let ty = p.ty()?;
        let def_span = p.span();
        let again = p.ident()?;
        if again != name {
            return Err(ParseError::new(
                def_span,
                format!("expected the definition of `{name}`, found `{again}`"),
            ));
        }
        p.expect(&Tok::Eq)?;
        let raw = p.term()?;
        let term = inline(&raw, &prog, &mut Vec::new());
        prog.defs.push(Definition {
            name: Rc::from(name.as_str()),
            ty,
            raw,
            term,
            span,
        });
    }
    Ok(prog)
}

fn inline(t: &Term, prog: &Program, bound: &mut Vec<Name>) -> Term {
    use TermKind::*;
    let span = t.span;
    let under = |m: &Rc<Term>, names: &[&Name], bound: &mut Vec<Name>| -> Rc<Term> {
        let depth = bound.len();
        bound.extend(names.iter().map(|n| (*n).clone()));
        let out = Rc::new(inline(m, prog, bound));
        bound.truncate(depth);
        out
    };
    let kind = match &t.kind {
        Var(x) => {
            if !bound.contains(x) {
                if let Some(def) = prog.get(x) {
                    return Term::at(Ann(Rc::new(def.term.clone()), def.ty.clone()), span);
                }
            }
            Var(x.clone())
        }
        Null => Null,
        Nil => Nil,
        Empty => Empty,
        Leaf => Leaf,
        Inj(s, m) => Inj(*s, under(m, &[], bound)),
        Proj(s, m) => Proj(*s, under(m, &[], bound)),
        Ann(m, ty) => Ann(under(m, &[], bound), ty.clone()),
        Lam(x, m) => Lam(x.clone(), under(m, &[x], bound)),
        Pair(a, b) => Pair(under(a, &[], bound), under(b, &[], bound)),
        Record(a, b) => Record(under(a, &[], bound), under(b, &[], bound)),
        App(a, b) => App(under(a, &[], bound), under(b, &[], bound)),
        Push(a, b) => Push(under(a, &[], bound), under(b, &[], bound)),
        Cons(a, b, c) => Cons(
            under(a, &[], bound),
            under(b, &[], bound),
            under(c, &[], bound),
        ),
        Node(a, b, c, d) => Node(
            under(a, &[], bound),
            under(b, &[], bound),
            under(c, &[], bound),
            under(d, &[], bound),
        ),
        Case {
            scrut,
            left,
            left_body,
            right,
            right_body,
        } => Case {
            scrut: under(scrut, &[], bound),
            left: left.clone(),
            left_body: under(left_body, &[left], bound),
            right: right.clone(),
            right_body: under(right_body, &[right], bound),
        },
        LetPair {
            scrut,
            first,
            second,
            body,
        } => LetPair {
            scrut: under(scrut, &[], bound),
            first: first.clone(),
            second: second.clone(),
            body: under(body, &[first, second], bound),
        },
        Rec {
            scrut,
            nil_case,
            diamond,
            head,
            tail,
            step,
        } => Rec {
            scrut: under(scrut, &[], bound),
            nil_case: under(nil_case, &[], bound),
            diamond: diamond.clone(),
            head: head.clone(),
            tail: tail.clone(),
            step: under(step, &[diamond, head, tail], bound),
        },
        Pop {
            scrut,
            empty_case,
            head,
            tail,
            step,
        } => Pop {
            scrut: under(scrut, &[], bound),
            empty_case: under(empty_case, &[], bound),
            head: head.clone(),
            tail: tail.clone(),
            step: under(step, &[head, tail], bound),
        },
        TRec {
            scrut,
            leaf_case,
            diamond,
            label,
            left,
            right,
            step,
        } => TRec {
            scrut: under(scrut, &[], bound),
            leaf_case: under(leaf_case, &[], bound),
            diamond: diamond.clone(),
            label: label.clone(),
            left: left.clone(),
            right: right.clone(),
            step: under(step, &[diamond, label, left, right], bound),
        },
    };
    Term::at(kind, span)
}

#[cfg(test)]
mod tests {
    use super::*;

    const REVERSE: &str = "
revAppend : L(1) -o L(1) -o L(1)
revAppend = lam l1 . rec l1
| nil => lam l2 . l2
| cons (d, x, r) => lam l2 . r (cons (d, x, l2))

reverse : L(1) -o L(1)
reverse = lam l1 . revAppend l1 nil
";

    #[test]
    fn parses_definitions_and_inlines() {
        let prog = parse_program(REVERSE).unwrap();
        assert_eq!(prog.defs.len(), 2);
        let rev = prog.get("reverse").unwrap();
        assert_eq!(rev.ty.to_string(), "L(1) -o L(1)");
        assert!(rev.term.is_closed());
        assert!(!rev.raw.is_closed());
        let TermKind::Lam(_, body) = &rev.term.kind else {
            panic!()
        };
        let TermKind::App(f, _) = &body.kind else {
            panic!()
        };
        let TermKind::App(g, _) = &f.kind else {
            panic!()
        };
        assert!(matches!(g.kind, TermKind::Ann(..)));
    }

    #[test]
    fn missing_ascription_is_an_error() {
        let err = parse_program("f = lam x . x").unwrap_err();
        assert!(err.message.contains("type ascription"), "{}", err.message);
    }

    #[test]
    fn mismatched_definition_name() {
        let err = parse_program("f : 1\ng = <>").unwrap_err();
        assert!(err.message.contains("expected the definition of `f`"));
    }

    #[test]
    fn bang_does_not_parse() {
        let src = "fnExp : L(1) -o !(L(1) -o L(1)) -o !(L(1) -o L(1))";
        assert!(parse_program(src).is_err());
    }
}
