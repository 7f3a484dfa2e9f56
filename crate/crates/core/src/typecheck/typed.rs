use std::rc::Rc;

use crate::syntax::{Name, Side, Span, Term, Type};

/// Sorted, duplicate-free set of consumed variables.
pub type Uses = Rc<[Name]>;

/// A checked term. Every node records its type and the variables it
/// consumes; the premise partitions of multi-premise rules are the `uses`
/// of the children minus the binders each premise introduces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypedTerm {
    pub ty: Type,
    pub uses: Uses,
    pub span: Span,
    pub node: TNode,
}

pub type TT = Rc<TypedTerm>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TNode {
    Var(Name),
    Null,
    Inj(Side, TT),
    Case {
        scrut: TT,
        left: Name,
        left_body: TT,
        right: Name,
        right_body: TT,
    },
    Pair(TT, TT),
    LetPair {
        scrut: TT,
        first: Name,
        second: Name,
        body: TT,
    },
    Lam {
        param: Name,
        param_ty: Type,
        body: TT,
    },
    App(TT, TT),
    Nil,
    Cons(TT, TT, TT),
    Rec {
        scrut: TT,
        nil_case: TT,
        diamond: Name,
        head: Name,
        tail: Name,
        step: TT,
    },
    Record(TT, TT),
    Proj(Side, TT),
    Empty,
    Push(TT, TT),
    Pop {
        scrut: TT,
        empty_case: TT,
        head: Name,
        tail: Name,
        step: TT,
    },
    Leaf,
    Node(TT, TT, TT, TT),
    TRec {
        scrut: TT,
        leaf_case: TT,
        diamond: Name,
        label: Name,
        left: Name,
        right: Name,
        step: TT,
    },
}

/// One premise of a rule: the subterm and the binders it is typed under.
pub struct Premise<'a> {
    pub term: &'a TypedTerm,
    pub binders: Vec<Name>,
    /// True for premises typed under a fixed context (recursor bodies and
    /// the tree base case) rather than a share of the ambient one.
    pub closed: bool,
}

impl TypedTerm {
    pub fn premises(&self) -> Vec<Premise<'_>> {
        use TNode::*;
        fn premise<'a>(term: &'a TT, binders: &[&Name], closed: bool) -> Premise<'a> {
            Premise {
                term,
                binders: binders.iter().map(|n| (*n).clone()).collect(),
                closed,
            }
        }
        fn p<'a>(term: &'a TT, binders: &[&Name]) -> Premise<'a> {
            premise(term, binders, false)
        }
        fn closed<'a>(term: &'a TT, binders: &[&Name]) -> Premise<'a> {
            premise(term, binders, true)
        }
        match &self.node {
            Var(_) | Null | Nil | Empty | Leaf => vec![],
            Inj(_, m) | Proj(_, m) => vec![p(m, &[])],
            Lam { param, body, .. } => vec![p(body, &[param])],
            Pair(a, b) | App(a, b) | Record(a, b) | Push(a, b) => vec![p(a, &[]), p(b, &[])],
            Cons(a, b, c) => vec![p(a, &[]), p(b, &[]), p(c, &[])],
            Node(a, b, c, d) => vec![p(a, &[]), p(b, &[]), p(c, &[]), p(d, &[])],
            Case {
                scrut,
                left,
                left_body,
                right,
                right_body,
            } => vec![
                p(scrut, &[]),
                p(left_body, &[left]),
                p(right_body, &[right]),
            ],
            LetPair {
                scrut,
                first,
                second,
                body,
            } => vec![p(scrut, &[]), p(body, &[first, second])],
            Rec {
                scrut,
                nil_case,
                diamond,
                head,
                tail,
                step,
            } => vec![
                p(scrut, &[]),
                p(nil_case, &[]),
                closed(step, &[diamond, head, tail]),
            ],
            Pop {
                scrut,
                empty_case,
                head,
                tail,
                step,
            } => vec![p(scrut, &[]), p(empty_case, &[]), p(step, &[head, tail])],
            TRec {
                scrut,
                leaf_case,
                diamond,
                label,
                left,
                right,
                step,
            } => vec![
                p(scrut, &[]),
                closed(leaf_case, &[]),
                closed(step, &[diamond, label, left, right]),
            ],
        }
    }

    /// The ambient-context share of each premise, in premise order. Fixed
    /// context premises contribute an empty share.
    pub fn partitions(&self) -> Vec<Vec<Name>> {
        self.premises()
            .into_iter()
            .map(|p| {
                if p.closed {
                    Vec::new()
                } else {
                    p.term
                        .uses
                        .iter()
                        .filter(|u| !p.binders.contains(u))
                        .cloned()
                        .collect()
                }
            })
            .collect()
    }

    /// Indices of premise groups whose shares may overlap: the branches of
    /// a case or a pop, and the two halves of a lazy pair.
    pub fn sharing_groups(&self) -> Vec<Vec<usize>> {
        match &self.node {
            TNode::Case { .. } | TNode::Pop { .. } => vec![vec![1, 2]],
            TNode::Record(..) => vec![vec![0, 1]],
            _ => vec![],
        }
    }

    pub fn size(&self) -> usize {
        1 + self.premises().iter().map(|p| p.term.size()).sum::<usize>()
    }

    /// Forgets the annotations.
    pub fn erase(&self) -> Term {
        use crate::syntax::build;
        use TNode::*;
        let e = |t: &TT| Rc::new(t.erase());
        let r: Rc<Term> = match &self.node {
            Var(x) => build::var(x),
            Null => build::null(),
            Nil => build::nil(),
            Empty => build::empty(),
            Leaf => build::leaf(),
            Inj(s, m) => build::inj(*s, e(m)),
            Proj(s, m) => build::proj(*s, e(m)),
            Lam { param, body, .. } => build::lam(param, e(body)),
            Pair(a, b) => build::pair(e(a), e(b)),
            App(a, b) => build::app(e(a), e(b)),
            Record(a, b) => build::record(e(a), e(b)),
            Push(a, b) => build::push(e(a), e(b)),
            Cons(a, b, c) => build::cons(e(a), e(b), e(c)),
            Node(a, b, c, d) => build::node(e(a), e(b), e(c), e(d)),
            Case {
                scrut,
                left,
                left_body,
                right,
                right_body,
            } => build::case(e(scrut), left, e(left_body), right, e(right_body)),
            LetPair {
                scrut,
                first,
                second,
                body,
            } => build::letp(e(scrut), first, second, e(body)),
            Rec {
                scrut,
                nil_case,
                diamond,
                head,
                tail,
                step,
            } => build::rec(e(scrut), e(nil_case), diamond, head, tail, e(step)),
            Pop {
                scrut,
                empty_case,
                head,
                tail,
                step,
            } => build::pop(e(scrut), e(empty_case), head, tail, e(step)),
            TRec {
                scrut,
                leaf_case,
                diamond,
                label,
                left,
                right,
                step,
            } => build::trec(e(scrut), e(leaf_case), diamond, label, left, right, e(step)),
        };
        let mut t = (*r).clone();
        t.span = self.span;
        t
    }

    /// Types of the free variables as recorded at their occurrences.
    pub fn free_var_types(&self) -> Vec<(Name, Type)> {
        let mut out = Vec::new();
        collect_free_types(self, &mut Vec::new(), &mut out);
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out.dedup_by(|a, b| a.0 == b.0);
        out
    }
}

fn collect_free_types(t: &TypedTerm, bound: &mut Vec<Name>, out: &mut Vec<(Name, Type)>) {
    if let TNode::Var(x) = &t.node {
        if !bound.contains(x) {
            out.push((x.clone(), t.ty.clone()));
        }
        return;
    }
    for p in t.premises() {
        if p.closed {
            let mut fresh = p.binders.clone();
            collect_free_types(p.term, &mut fresh, out);
        } else {
            let depth = bound.len();
            bound.extend(p.binders.iter().cloned());
            collect_free_types(p.term, bound, out);
            bound.truncate(depth);
        }
    }
}
