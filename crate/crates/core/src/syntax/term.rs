use std::fmt;
use std::rc::Rc;

use super::types::Type;

pub type Name = Rc<str>;

/// Which component of a sum or lazy product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn index(self) -> u8 {
        match self {
            Side::Left => 1,
            Side::Right => 2,
        }
    }

    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Source position, 1-based. `line == 0` marks synthesized terms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// An untyped term. Equality ignores spans.
#[derive(Clone, Debug)]
pub struct Term {
    pub kind: TermKind,
    pub span: Span,
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        self.kind == other.kind
    }
}

impl Eq for Term {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TermKind {
    Var(Name),
    Null,
    Inj(Side, Rc<Term>),
    Case {
        scrut: Rc<Term>,
        left: Name,
        left_body: Rc<Term>,
        right: Name,
        right_body: Rc<Term>,
    },
    Pair(Rc<Term>, Rc<Term>),
    LetPair {
        scrut: Rc<Term>,
        first: Name,
        second: Name,
        body: Rc<Term>,
    },
    Lam(Name, Rc<Term>),
    App(Rc<Term>, Rc<Term>),
    Nil,
    Cons(Rc<Term>, Rc<Term>, Rc<Term>),
    Rec {
        scrut: Rc<Term>,
        nil_case: Rc<Term>,
        diamond: Name,
        head: Name,
        tail: Name,
        step: Rc<Term>,
    },
    /// Lazy pair `{M, N}`.
    Record(Rc<Term>, Rc<Term>),
    Proj(Side, Rc<Term>),
    Empty,
    Push(Rc<Term>, Rc<Term>),
    Pop {
        scrut: Rc<Term>,
        empty_case: Rc<Term>,
        head: Name,
        tail: Name,
        step: Rc<Term>,
    },
    Leaf,
    Node(Rc<Term>, Rc<Term>, Rc<Term>, Rc<Term>),
    TRec {
        scrut: Rc<Term>,
        leaf_case: Rc<Term>,
        diamond: Name,
        label: Name,
        left: Name,
        right: Name,
        step: Rc<Term>,
    },
    /// Type ascription `(M : A)`. Inlined top-level definitions are
    /// wrapped in one so that they stay checkable in any position.
    Ann(Rc<Term>, Type),
}

impl Term {
    pub fn new(kind: TermKind) -> Term {
        Term {
            kind,
            span: Span::default(),
        }
    }

    pub fn at(kind: TermKind, span: Span) -> Term {
        Term { kind, span }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        let mut n = 1;
        self.for_each_child(|c| n += c.size());
        n
    }

    pub fn for_each_child(&self, mut f: impl FnMut(&Term)) {
        use TermKind::*;
        match &self.kind {
            Var(_) | Null | Nil | Empty | Leaf => {}
            Inj(_, m) | Lam(_, m) | Proj(_, m) | Ann(m, _) => f(m),
            Case {
                scrut,
                left_body,
                right_body,
                ..
            } => {
                f(scrut);
                f(left_body);
                f(right_body);
            }
            Pair(a, b) | App(a, b) | Record(a, b) | Push(a, b) => {
                f(a);
                f(b);
            }
            LetPair { scrut, body, .. } => {
                f(scrut);
                f(body);
            }
            Cons(a, b, c) => {
                f(a);
                f(b);
                f(c);
            }
            Rec {
                scrut,
                nil_case,
                step,
                ..
            } => {
                f(scrut);
                f(nil_case);
                f(step);
            }
            Pop {
                scrut,
                empty_case,
                step,
                ..
            } => {
                f(scrut);
                f(empty_case);
                f(step);
            }
            Node(a, b, c, d) => {
                f(a);
                f(b);
                f(c);
                f(d);
            }
            TRec {
                scrut,
                leaf_case,
                step,
                ..
            } => {
                f(scrut);
                f(leaf_case);
                f(step);
            }
        }
    }

    /// Free variables, sorted and deduplicated.
    pub fn free_vars(&self) -> Vec<Name> {
        let mut out = Vec::new();
        let mut bound = Vec::new();
        collect_free(self, &mut bound, &mut out);
        out.sort();
        out.dedup();
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }
}

fn collect_free(t: &Term, bound: &mut Vec<Name>, out: &mut Vec<Name>) {
    use TermKind::*;
    let under = |body: &Term, names: &[&Name], bound: &mut Vec<Name>, out: &mut Vec<Name>| {
        let depth = bound.len();
        bound.extend(names.iter().map(|n| (*n).clone()));
        collect_free(body, bound, out);
        bound.truncate(depth);
    };
    match &t.kind {
        Var(x) => {
            if !bound.contains(x) {
                out.push(x.clone());
            }
        }
        Null | Nil | Empty | Leaf => {}
        Inj(_, m) | Proj(_, m) | Ann(m, _) => collect_free(m, bound, out),
        Lam(x, m) => under(m, &[x], bound, out),
        Case {
            scrut,
            left,
            left_body,
            right,
            right_body,
        } => {
            collect_free(scrut, bound, out);
            under(left_body, &[left], bound, out);
            under(right_body, &[right], bound, out);
        }
        Pair(a, b) | App(a, b) | Record(a, b) | Push(a, b) => {
            collect_free(a, bound, out);
            collect_free(b, bound, out);
        }
        LetPair {
            scrut,
            first,
            second,
            body,
        } => {
            collect_free(scrut, bound, out);
            under(body, &[first, second], bound, out);
        }
        Cons(a, b, c) => {
            collect_free(a, bound, out);
            collect_free(b, bound, out);
            collect_free(c, bound, out);
        }
        Rec {
            scrut,
            nil_case,
            diamond,
            head,
            tail,
            step,
        } => {
            collect_free(scrut, bound, out);
            collect_free(nil_case, bound, out);
            // the step body is typed under exactly its three binders
            let mut inner = Vec::new();
            under(step, &[diamond, head, tail], &mut inner, out);
        }
        Pop {
            scrut,
            empty_case,
            head,
            tail,
            step,
        } => {
            collect_free(scrut, bound, out);
            collect_free(empty_case, bound, out);
            under(step, &[head, tail], bound, out);
        }
        Node(a, b, c, d) => {
            for m in [a, b, c, d] {
                collect_free(m, bound, out);
            }
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
            collect_free(scrut, bound, out);
            collect_free(leaf_case, &mut Vec::new(), out);
            under(step, &[diamond, label, left, right], &mut Vec::new(), out);
        }
    }
}

/// Smart constructors for building terms programmatically.
pub mod build {
    use super::*;

    fn mk(kind: TermKind) -> Rc<Term> {
        Rc::new(Term::new(kind))
    }

    pub fn name(s: &str) -> Name {
        Rc::from(s)
    }

    pub fn var(x: &str) -> Rc<Term> {
        mk(TermKind::Var(name(x)))
    }

    pub fn null() -> Rc<Term> {
        mk(TermKind::Null)
    }

    pub fn inj(side: Side, m: Rc<Term>) -> Rc<Term> {
        mk(TermKind::Inj(side, m))
    }

    pub fn inl(m: Rc<Term>) -> Rc<Term> {
        inj(Side::Left, m)
    }

    pub fn inr(m: Rc<Term>) -> Rc<Term> {
        inj(Side::Right, m)
    }

    pub fn case(
        scrut: Rc<Term>,
        left: &str,
        left_body: Rc<Term>,
        right: &str,
        right_body: Rc<Term>,
    ) -> Rc<Term> {
        mk(TermKind::Case {
            scrut,
            left: name(left),
            left_body,
            right: name(right),
            right_body,
        })
    }

    pub fn pair(a: Rc<Term>, b: Rc<Term>) -> Rc<Term> {
        mk(TermKind::Pair(a, b))
    }

    /// Right-nested tuple; a single element is returned as is.
    pub fn tuple(mut parts: Vec<Rc<Term>>) -> Rc<Term> {
        let mut acc = parts.pop().unwrap_or_else(null);
        while let Some(t) = parts.pop() {
            acc = pair(t, acc);
        }
        acc
    }

    pub fn letp(scrut: Rc<Term>, first: &str, second: &str, body: Rc<Term>) -> Rc<Term> {
        mk(TermKind::LetPair {
            scrut,
            first: name(first),
            second: name(second),
            body,
        })
    }

    pub fn lam(x: &str, body: Rc<Term>) -> Rc<Term> {
        mk(TermKind::Lam(name(x), body))
    }

    pub fn app(f: Rc<Term>, a: Rc<Term>) -> Rc<Term> {
        mk(TermKind::App(f, a))
    }

    pub fn apps(f: Rc<Term>, args: Vec<Rc<Term>>) -> Rc<Term> {
        args.into_iter().fold(f, app)
    }

    pub fn nil() -> Rc<Term> {
        mk(TermKind::Nil)
    }

    pub fn cons(d: Rc<Term>, h: Rc<Term>, t: Rc<Term>) -> Rc<Term> {
        mk(TermKind::Cons(d, h, t))
    }

    pub fn rec(
        scrut: Rc<Term>,
        nil_case: Rc<Term>,
        diamond: &str,
        head: &str,
        tail: &str,
        step: Rc<Term>,
    ) -> Rc<Term> {
        mk(TermKind::Rec {
            scrut,
            nil_case,
            diamond: name(diamond),
            head: name(head),
            tail: name(tail),
            step,
        })
    }

    pub fn record(a: Rc<Term>, b: Rc<Term>) -> Rc<Term> {
        mk(TermKind::Record(a, b))
    }

    pub fn proj(side: Side, m: Rc<Term>) -> Rc<Term> {
        mk(TermKind::Proj(side, m))
    }

    pub fn empty() -> Rc<Term> {
        mk(TermKind::Empty)
    }

    pub fn push(h: Rc<Term>, t: Rc<Term>) -> Rc<Term> {
        mk(TermKind::Push(h, t))
    }

    pub fn pop(
        scrut: Rc<Term>,
        empty_case: Rc<Term>,
        head: &str,
        tail: &str,
        step: Rc<Term>,
    ) -> Rc<Term> {
        mk(TermKind::Pop {
            scrut,
            empty_case,
            head: name(head),
            tail: name(tail),
            step,
        })
    }

    pub fn leaf() -> Rc<Term> {
        mk(TermKind::Leaf)
    }

    pub fn node(d: Rc<Term>, x: Rc<Term>, l: Rc<Term>, r: Rc<Term>) -> Rc<Term> {
        mk(TermKind::Node(d, x, l, r))
    }

    #[allow(clippy::too_many_arguments)]
    pub fn trec(
        scrut: Rc<Term>,
        leaf_case: Rc<Term>,
        diamond: &str,
        label: &str,
        left: &str,
        right: &str,
        step: Rc<Term>,
    ) -> Rc<Term> {
        mk(TermKind::TRec {
            scrut,
            leaf_case,
            diamond: name(diamond),
            label: name(label),
            left: name(left),
            right: name(right),
            step,
        })
    }

    pub fn ann(m: Rc<Term>, ty: Type) -> Rc<Term> {
        mk(TermKind::Ann(m, ty))
    }
}
