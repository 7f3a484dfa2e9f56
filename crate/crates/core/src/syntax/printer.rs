use std::fmt::Write;

use super::term::{Side, Term, TermKind};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ctx {
    /// Nothing follows; binder forms may extend to the right.
    Tail,
    /// Something follows; binder forms need parentheses.
    Inner,
    /// Head of an application.
    Head,
    /// Argument position; only atoms.
    Atom,
}

fn is_binder(t: &Term) -> bool {
    matches!(
        t.kind,
        TermKind::Lam(..)
            | TermKind::LetPair { .. }
            | TermKind::Case { .. }
            | TermKind::Rec { .. }
            | TermKind::Pop { .. }
            | TermKind::TRec { .. }
    )
}

fn is_prefix(t: &Term) -> bool {
    matches!(t.kind, TermKind::Inj(..) | TermKind::Proj(..))
}

fn needs_parens(t: &Term, ctx: Ctx) -> bool {
    if is_binder(t) {
        return ctx != Ctx::Tail;
    }
    match ctx {
        Ctx::Tail | Ctx::Inner | Ctx::Head => false,
        Ctx::Atom => matches!(t.kind, TermKind::App(..)) || is_prefix(t),
    }
}

fn go(out: &mut String, t: &Term, ctx: Ctx) {
    if needs_parens(t, ctx) {
        out.push('(');
        go(out, t, Ctx::Tail);
        out.push(')');
        return;
    }
    use TermKind::*;
    match &t.kind {
        Var(x) => out.push_str(x),
        Null => out.push_str("<>"),
        Nil => out.push_str("nil"),
        Empty => out.push_str("empty"),
        Leaf => out.push_str("leaf"),
        Inj(side, m) => {
            out.push_str(match side {
                Side::Left => "inj1 ",
                Side::Right => "inj2 ",
            });
            go(out, m, Ctx::Atom);
        }
        Proj(side, m) => {
            out.push_str(match side {
                Side::Left => "fst ",
                Side::Right => "snd ",
            });
            go(out, m, Ctx::Atom);
        }
        Pair(a, b) => {
            out.push('(');
            go(out, a, Ctx::Tail);
            out.push_str(", ");
            go(out, b, Ctx::Tail);
            out.push(')');
        }
        Record(a, b) => {
            out.push('{');
            go(out, a, Ctx::Tail);
            out.push_str(", ");
            go(out, b, Ctx::Tail);
            out.push('}');
        }
        Cons(a, b, c) => {
            out.push_str("cons (");
            go(out, a, Ctx::Tail);
            out.push_str(", ");
            go(out, b, Ctx::Tail);
            out.push_str(", ");
            go(out, c, Ctx::Tail);
            out.push(')');
        }
        Push(a, b) => {
            out.push_str("push (");
            go(out, a, Ctx::Tail);
            out.push_str(", ");
            go(out, b, Ctx::Tail);
            out.push(')');
        }
        Node(a, b, c, d) => {
            out.push_str("node (");
            for (i, m) in [a, b, c, d].into_iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                go(out, m, Ctx::Tail);
            }
            out.push(')');
        }
        Ann(m, ty) => {
            out.push('(');
            go(out, m, Ctx::Tail);
            let _ = write!(out, " : {ty})");
        }
        App(f, a) => {
            go(out, f, Ctx::Head);
            out.push(' ');
            go(out, a, Ctx::Atom);
        }
        Lam(x, m) => {
            let _ = write!(out, "lam {x} . ");
            go(out, m, Ctx::Tail);
        }
        LetPair {
            scrut,
            first,
            second,
            body,
        } => {
            let _ = write!(out, "letp ({first}, {second}) = ");
            go(out, scrut, Ctx::Tail);
            out.push_str(" in ");
            go(out, body, Ctx::Tail);
        }
        Case {
            scrut,
            left,
            left_body,
            right,
            right_body,
        } => {
            out.push_str("case ");
            go(out, scrut, Ctx::Inner);
            let _ = write!(out, " | inj1 {left} => ");
            go(out, left_body, Ctx::Inner);
            let _ = write!(out, " | inj2 {right} => ");
            go(out, right_body, Ctx::Tail);
        }
        Rec {
            scrut,
            nil_case,
            diamond,
            head,
            tail,
            step,
        } => {
            out.push_str("rec ");
            go(out, scrut, Ctx::Inner);
            out.push_str(" | nil => ");
            go(out, nil_case, Ctx::Inner);
            let _ = write!(out, " | cons ({diamond}, {head}, {tail}) => ");
            go(out, step, Ctx::Tail);
        }
        Pop {
            scrut,
            empty_case,
            head,
            tail,
            step,
        } => {
            out.push_str("pop ");
            go(out, scrut, Ctx::Inner);
            out.push_str(" | empty => ");
            go(out, empty_case, Ctx::Inner);
            let _ = write!(out, " | push ({head}, {tail}) => ");
            go(out, step, Ctx::Tail);
        }
        TRec {
            scrut,
            leaf_case,
            diamond,
            label,
            left,
            right,
            step,
        } => {
            out.push_str("trec ");
            go(out, scrut, Ctx::Inner);
            out.push_str(" | leaf => ");
            go(out, leaf_case, Ctx::Inner);
            let _ = write!(out, " | node ({diamond}, {label}, {left}, {right}) => ");
            go(out, step, Ctx::Tail);
        }
    }
}

/// Renders a term in the surface syntax accepted by the parser.
pub fn print_term(t: &Term) -> String {
    let mut out = String::new();
    go(&mut out, t, Ctx::Tail);
    out
}

impl std::fmt::Display for Term {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&print_term(self))
    }
}

#[cfg(test)]
mod tests {
    use std::rc::Rc;

    use proptest::prelude::*;

    use super::super::parser::{parse_term, parse_type};
    use super::super::term::build::*;
    use super::super::term::Term;
    use super::super::types::Type;
    use super::*;

    #[test]
    fn prints_reverse_readably() {
        let t = lam("l1", app(app(var("revAppend"), var("l1")), nil()));
        assert_eq!(print_term(&t), "lam l1 . revAppend l1 nil");
    }

    #[test]
    fn parenthesizes_binders_in_arguments() {
        let t = app(lam("x", var("x")), inl(null()));
        assert_eq!(print_term(&t), "(lam x . x) (inj1 <>)");
        assert_eq!(parse_term(&print_term(&t)).unwrap(), *t);
    }

    fn arb_type() -> impl Strategy<Value = Type> {
        let leaf = prop_oneof![Just(Type::Unit), Just(Type::Diamond)];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Type::sum(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Type::tensor(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Type::arrow(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Type::prod(a, b)),
                inner.clone().prop_map(Type::list),
                inner.clone().prop_map(Type::stack),
                inner.prop_map(Type::tree),
            ]
        })
    }

    fn arb_name() -> impl Strategy<Value = String> {
        prop_oneof![
            Just("x".to_string()),
            Just("y".to_string()),
            Just("d'".to_string()),
            Just("acc".to_string()),
            Just("l2".to_string()),
        ]
    }

    fn arb_term() -> impl Strategy<Value = Rc<Term>> {
        let leaf = prop_oneof![
            arb_name().prop_map(|n| var(&n)),
            Just(null()),
            Just(nil()),
            Just(empty()),
            Just(leaf()),
        ];
        leaf.prop_recursive(5, 48, 4, |t| {
            prop_oneof![
                t.clone().prop_map(inl),
                t.clone().prop_map(inr),
                t.clone().prop_map(|m| proj(Side::Left, m)),
                t.clone().prop_map(|m| proj(Side::Right, m)),
                (t.clone(), t.clone()).prop_map(|(a, b)| pair(a, b)),
                (t.clone(), t.clone()).prop_map(|(a, b)| record(a, b)),
                (t.clone(), t.clone()).prop_map(|(a, b)| app(a, b)),
                (t.clone(), t.clone()).prop_map(|(a, b)| push(a, b)),
                (t.clone(), t.clone(), t.clone()).prop_map(|(a, b, c)| cons(a, b, c)),
                (t.clone(), t.clone(), t.clone(), t.clone())
                    .prop_map(|(a, b, c, d)| node(a, b, c, d)),
                (arb_name(), t.clone()).prop_map(|(x, m)| lam(&x, m)),
                (t.clone(), arb_type()).prop_map(|(m, ty)| ann(m, ty)),
                (t.clone(), arb_name(), arb_name(), t.clone())
                    .prop_map(|(s, a, b, m)| letp(s, &a, &b, m)),
                (t.clone(), arb_name(), t.clone(), arb_name(), t.clone())
                    .prop_map(|(s, a, m, b, n)| case(s, &a, m, &b, n)),
                (t.clone(), t.clone(), t.clone()).prop_map(|(s, m, n)| rec(s, m, "d", "h", "t", n)),
                (t.clone(), t.clone(), t.clone()).prop_map(|(s, m, n)| pop(s, m, "h", "t", n)),
                (t.clone(), t.clone(), t.clone())
                    .prop_map(|(s, m, n)| trec(s, m, "d", "x", "l", "r", n)),
            ]
        })
    }

    proptest! {
        #[test]
        fn type_round_trip(ty in arb_type()) {
            prop_assert_eq!(parse_type(&ty.to_string()).unwrap(), ty);
        }

        #[test]
        fn term_round_trip(t in arb_term()) {
            let printed = print_term(&t);
            let back = parse_term(&printed).map_err(|e| TestCaseError::fail(format!("{e}: {printed}")))?;
            prop_assert_eq!(&back, &*t, "{}", printed);
        }
    }
}
