use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use super::typed::{TNode, TypedTerm, Uses, TT};
use crate::syntax::{Name, Side, Span, Term, TermKind, Type};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TypeErrorKind {
    UnboundVariable,
    VariableReused,
    TypeMismatch,
    ForbiddenCapture,
    Shadowing,
    CannotInfer,
    NotDiamondFree,
}

impl fmt::Display for TypeErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TypeErrorKind::UnboundVariable => "unbound variable",
            TypeErrorKind::VariableReused => "variable reused",
            TypeErrorKind::TypeMismatch => "type mismatch",
            TypeErrorKind::ForbiddenCapture => "forbidden capture",
            TypeErrorKind::Shadowing => "shadowing",
            TypeErrorKind::CannotInfer => "cannot infer",
            TypeErrorKind::NotDiamondFree => "not diamond-free",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct TypeError {
    pub kind: TypeErrorKind,
    pub span: Span,
    pub detail: String,
    pub expected: Option<Type>,
    pub found: Option<Type>,
}

impl TypeError {
    pub fn new(kind: TypeErrorKind, span: Span, detail: impl Into<String>) -> TypeError {
        TypeError {
            kind,
            span,
            detail: detail.into(),
            expected: None,
            found: None,
        }
    }

    fn mismatch(span: Span, expected: &Type, found: &Type) -> TypeError {
        TypeError {
            kind: TypeErrorKind::TypeMismatch,
            span,
            detail: format!("expected `{expected}`, found `{found}`"),
            expected: Some(expected.clone()),
            found: Some(found.clone()),
        }
    }

    fn shape(span: Span, expected: &Type, what: &str) -> TypeError {
        TypeError {
            kind: TypeErrorKind::TypeMismatch,
            span,
            detail: format!("expected `{expected}`, found {what}"),
            expected: Some(expected.clone()),
            found: None,
        }
    }

    fn want(span: Span, wanted: &str, found: &Type) -> TypeError {
        TypeError {
            kind: TypeErrorKind::TypeMismatch,
            span,
            detail: format!("expected {wanted}, found `{found}`"),
            expected: None,
            found: Some(found.clone()),
        }
    }
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.span, self.kind, self.detail)
    }
}

/// Ordered typing context with pairwise distinct names.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Ctx {
    entries: Vec<(Name, Type)>,
}

impl Ctx {
    pub fn new() -> Ctx {
        Ctx::default()
    }

    pub fn with(mut self, name: &str, ty: Type) -> Ctx {
        self.entries.push((Rc::from(name), ty));
        self
    }

    pub fn entries(&self) -> &[(Name, Type)] {
        &self.entries
    }

    pub fn lookup(&self, name: &str) -> Option<&Type> {
        self.entries
            .iter()
            .rev()
            .find(|(n, _)| &**n == name)
            .map(|(_, t)| t)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl FromIterator<(Name, Type)> for Ctx {
    fn from_iter<I: IntoIterator<Item = (Name, Type)>>(iter: I) -> Ctx {
        Ctx {
            entries: iter.into_iter().collect(),
        }
    }
}

#[derive(Clone, Default)]
struct Scope {
    visible: Vec<(Name, Type)>,
    /// Names in scope outside a recursor body, reported as captures.
    hidden: Vec<Name>,
}

impl Scope {
    fn lookup(&self, x: &Name) -> Option<&Type> {
        self.visible
            .iter()
            .rev()
            .find(|(n, _)| n == x)
            .map(|(_, t)| t)
    }

    fn bind(&self, binders: &[(&Name, Type)], span: Span) -> Result<Scope, TypeError> {
        let mut next = self.clone();
        for (i, (x, ty)) in binders.iter().enumerate() {
            if next.lookup(x).is_some() || binders[..i].iter().any(|(y, _)| y == x) {
                return Err(TypeError::new(
                    TypeErrorKind::Shadowing,
                    span,
                    format!("`{x}` is already bound"),
                ));
            }
            next.visible.push(((*x).clone(), ty.clone()));
        }
        Ok(next)
    }

    /// A fresh scope holding only `binders`, as for recursor bodies.
    fn barrier(&self, binders: &[(&Name, Type)], span: Span) -> Result<Scope, TypeError> {
        let mut hidden = self.hidden.clone();
        hidden.extend(self.visible.iter().map(|(n, _)| n.clone()));
        let base = Scope {
            visible: Vec::new(),
            hidden,
        };
        base.bind(binders, span)
    }
}

fn union(sets: &[&[Name]]) -> Uses {
    let mut v: Vec<Name> = sets.iter().flat_map(|s| s.iter().cloned()).collect();
    v.sort();
    v.dedup();
    v.into()
}

fn minus(set: &[Name], binders: &[&Name]) -> Vec<Name> {
    set.iter()
        .filter(|x| !binders.contains(x))
        .cloned()
        .collect()
}

fn find_var_span(t: &TypedTerm, x: &Name) -> Option<Span> {
    if let TNode::Var(y) = &t.node {
        return (y == x).then_some(t.span);
    }
    t.premises()
        .into_iter()
        .filter(|p| !p.closed && !p.binders.contains(x))
        .find_map(|p| find_var_span(p.term, x))
}

/// Checks that the shares of the given premises are pairwise disjoint.
fn disjoint(span: Span, parts: &[(Vec<Name>, &TypedTerm)]) -> Result<(), TypeError> {
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            if let Some(x) = parts[i].0.iter().find(|x| parts[j].0.contains(x)) {
                let at = find_var_span(parts[j].1, x).unwrap_or(span);
                return Err(TypeError::new(
                    TypeErrorKind::VariableReused,
                    at,
                    format!("`{x}` is used more than once"),
                ));
            }
        }
    }
    Ok(())
}

fn share(t: &TypedTerm) -> (Vec<Name>, &TypedTerm) {
    (t.uses.to_vec(), t)
}

fn cannot_infer(span: Span, what: &str) -> TypeError {
    TypeError::new(
        TypeErrorKind::CannotInfer,
        span,
        format!("cannot infer the type of {what}; add an annotation"),
    )
}

fn mk(ty: Type, uses: Uses, span: Span, node: TNode) -> TT {
    Rc::new(TypedTerm {
        ty,
        uses,
        span,
        node,
    })
}

fn is_cannot_infer(r: &Result<TT, TypeError>) -> bool {
    matches!(r, Err(e) if e.kind == TypeErrorKind::CannotInfer)
}

/// Infers `t` in `sc`, against `expected` when given.
fn infer(sc: &Scope, t: &Term, expected: Option<&Type>) -> Result<TT, TypeError> {
    let span = t.span;
    let result = infer_inner(sc, t, expected)?;
    if let Some(e) = expected {
        if &result.ty != e {
            return Err(TypeError::mismatch(span, e, &result.ty));
        }
    }
    Ok(result)
}

fn infer_inner(sc: &Scope, t: &Term, expected: Option<&Type>) -> Result<TT, TypeError> {
    use TermKind::*;
    let span = t.span;
    match &t.kind {
        Var(x) => match sc.lookup(x) {
            Some(ty) => Ok(mk(
                ty.clone(),
                Rc::from(vec![x.clone()]),
                span,
                TNode::Var(x.clone()),
            )),
            None if sc.hidden.contains(x) => Err(TypeError::new(
                TypeErrorKind::ForbiddenCapture,
                span,
                format!("`{x}` is bound outside this recursor body and cannot be used in it"),
            )),
            None => Err(TypeError::new(
                TypeErrorKind::UnboundVariable,
                span,
                format!("`{x}` is not bound"),
            )),
        },
        Null => Ok(mk(Type::Unit, Rc::from(vec![]), span, TNode::Null)),
        Ann(m, ty) => {
            if m.is_closed() {
                infer(&Scope::default(), m, Some(ty))
            } else {
                infer(sc, m, Some(ty))
            }
        }
        Inj(side, m) => {
            let Some(e) = expected else {
                return Err(cannot_infer(span, "an injection"));
            };
            let Type::Sum(a, b) = e else {
                return Err(TypeError::shape(span, e, "an injection"));
            };
            let inner = match side {
                Side::Left => a,
                Side::Right => b,
            };
            let m = infer(sc, m, Some(inner))?;
            Ok(mk(e.clone(), m.uses.clone(), span, TNode::Inj(*side, m)))
        }
        Case {
            scrut,
            left,
            left_body,
            right,
            right_body,
        } => {
            let s = infer(sc, scrut, None)?;
            let Type::Sum(a1, a2) = &s.ty else {
                return Err(TypeError::want(scrut.span, "a sum type", &s.ty));
            };
            let sc1 = sc.bind(&[(left, (**a1).clone())], span)?;
            let sc2 = sc.bind(&[(right, (**a2).clone())], span)?;
            let (n1, n2) = branches(&sc1, left_body, &sc2, right_body, expected, "a case")?;
            let branch_uses = union(&[&minus(&n1.uses, &[left]), &minus(&n2.uses, &[right])]);
            disjoint(
                span,
                &[
                    share(&s),
                    (branch_uses.to_vec(), &n1),
                    (branch_uses.to_vec(), &n2),
                ][..2],
            )?;
            let ty = n1.ty.clone();
            let uses = union(&[&s.uses, &branch_uses]);
            Ok(mk(
                ty,
                uses,
                span,
                TNode::Case {
                    scrut: s,
                    left: left.clone(),
                    left_body: n1,
                    right: right.clone(),
                    right_body: n2,
                },
            ))
        }
        Pair(a, b) => {
            let (ea, eb) = match expected {
                Some(Type::Tensor(x, y)) => (Some(&**x), Some(&**y)),
                Some(e) => return Err(TypeError::shape(span, e, "a pair")),
                None => (None, None),
            };
            let a = infer(sc, a, ea)?;
            let b = infer(sc, b, eb)?;
            disjoint(span, &[share(&a), share(&b)])?;
            Ok(mk(
                Type::tensor(a.ty.clone(), b.ty.clone()),
                union(&[&a.uses, &b.uses]),
                span,
                TNode::Pair(a, b),
            ))
        }
        LetPair {
            scrut,
            first,
            second,
            body,
        } => {
            let s = infer(sc, scrut, None)?;
            let Type::Tensor(a1, a2) = &s.ty else {
                return Err(TypeError::want(scrut.span, "a tensor type", &s.ty));
            };
            let inner = sc.bind(&[(first, (**a1).clone()), (second, (**a2).clone())], span)?;
            let n = infer(&inner, body, expected)?;
            let rest = minus(&n.uses, &[first, second]);
            disjoint(span, &[share(&s), (rest.clone(), &n)])?;
            Ok(mk(
                n.ty.clone(),
                union(&[&s.uses, &rest]),
                span,
                TNode::LetPair {
                    scrut: s,
                    first: first.clone(),
                    second: second.clone(),
                    body: n,
                },
            ))
        }
        Lam(x, m) => {
            let Some(e) = expected else {
                return Err(cannot_infer(span, "a lambda"));
            };
            let Type::Arrow(a, b) = e else {
                return Err(TypeError::shape(span, e, "a lambda"));
            };
            let inner = sc.bind(&[(x, (**a).clone())], span)?;
            let body = infer(&inner, m, Some(b))?;
            let uses: Uses = minus(&body.uses, &[x]).into();
            Ok(mk(
                e.clone(),
                uses,
                span,
                TNode::Lam {
                    param: x.clone(),
                    param_ty: (**a).clone(),
                    body,
                },
            ))
        }
        App(f, a) => {
            let fr = infer(sc, f, None);
            let (f, a) = if is_cannot_infer(&fr) {
                let a = infer(sc, a, None).map_err(|e| {
                    if e.kind == TypeErrorKind::CannotInfer {
                        cannot_infer(span, "an application of an unannotated function")
                    } else {
                        e
                    }
                })?;
                let Some(e) = expected else {
                    return Err(cannot_infer(span, "an application of a lambda"));
                };
                let f = infer(sc, f, Some(&Type::arrow(a.ty.clone(), e.clone())))?;
                (f, a)
            } else {
                let f = fr?;
                let Type::Arrow(dom, _) = &f.ty else {
                    return Err(TypeError::want(f.span, "a function type", &f.ty));
                };
                let a = infer(sc, a, Some(dom))?;
                (f, a)
            };
            let Type::Arrow(_, cod) = &f.ty else {
                unreachable!("checked above")
            };
            disjoint(span, &[share(&f), share(&a)])?;
            Ok(mk(
                (**cod).clone(),
                union(&[&f.uses, &a.uses]),
                span,
                TNode::App(f, a),
            ))
        }
        Nil => match expected {
            Some(e @ Type::List(_)) => Ok(mk(e.clone(), Rc::from(vec![]), span, TNode::Nil)),
            Some(e) => Err(TypeError::shape(span, e, "`nil`")),
            None => Err(cannot_infer(span, "`nil`")),
        },
        Cons(d, h, tl) => {
            let elem = match expected {
                Some(Type::List(a)) => Some((**a).clone()),
                Some(e) => return Err(TypeError::shape(span, e, "`cons`")),
                None => None,
            };
            let d = infer(sc, d, Some(&Type::Diamond))?;
            let h = infer(sc, h, elem.as_ref())?;
            let list_ty = Type::list(h.ty.clone());
            let tl = infer(sc, tl, Some(&list_ty))?;
            disjoint(span, &[share(&d), share(&h), share(&tl)])?;
            Ok(mk(
                list_ty,
                union(&[&d.uses, &h.uses, &tl.uses]),
                span,
                TNode::Cons(d, h, tl),
            ))
        }
        Rec {
            scrut,
            nil_case,
            diamond,
            head,
            tail,
            step,
        } => {
            let s = infer(sc, scrut, None)?;
            let Type::List(a) = &s.ty else {
                return Err(TypeError::want(scrut.span, "a list type", &s.ty));
            };
            let n1 = infer(sc, nil_case, expected)?;
            let b = n1.ty.clone();
            let inner = sc.barrier(
                &[
                    (diamond, Type::Diamond),
                    (head, (**a).clone()),
                    (tail, b.clone()),
                ],
                span,
            )?;
            let n2 = infer(&inner, step, Some(&b))?;
            disjoint(span, &[share(&s), share(&n1)])?;
            Ok(mk(
                b,
                union(&[&s.uses, &n1.uses]),
                span,
                TNode::Rec {
                    scrut: s,
                    nil_case: n1,
                    diamond: diamond.clone(),
                    head: head.clone(),
                    tail: tail.clone(),
                    step: n2,
                },
            ))
        }
        Record(a, b) => {
            let (ea, eb) = match expected {
                Some(Type::Prod(x, y)) => (Some(&**x), Some(&**y)),
                Some(e) => return Err(TypeError::shape(span, e, "a lazy pair")),
                None => (None, None),
            };
            let a = infer(sc, a, ea)?;
            let b = infer(sc, b, eb)?;
            Ok(mk(
                Type::prod(a.ty.clone(), b.ty.clone()),
                union(&[&a.uses, &b.uses]),
                span,
                TNode::Record(a, b),
            ))
        }
        Proj(side, m) => {
            let m = infer(sc, m, None)?;
            let Type::Prod(a, b) = &m.ty else {
                return Err(TypeError::want(m.span, "a lazy product type", &m.ty));
            };
            let ty = match side {
                Side::Left => (**a).clone(),
                Side::Right => (**b).clone(),
            };
            Ok(mk(ty, m.uses.clone(), span, TNode::Proj(*side, m)))
        }
        Empty => match expected {
            Some(e @ Type::Stack(_)) => Ok(mk(e.clone(), Rc::from(vec![]), span, TNode::Empty)),
            Some(e) => Err(TypeError::shape(span, e, "`empty`")),
            None => Err(cannot_infer(span, "`empty`")),
        },
        Push(h, tl) => {
            let elem = match expected {
                Some(Type::Stack(a)) => Some((**a).clone()),
                Some(e) => return Err(TypeError::shape(span, e, "`push`")),
                None => None,
            };
            let h = infer(sc, h, elem.as_ref())?;
            let st = Type::stack(h.ty.clone());
            let tl = infer(sc, tl, Some(&st))?;
            disjoint(span, &[share(&h), share(&tl)])?;
            Ok(mk(
                st,
                union(&[&h.uses, &tl.uses]),
                span,
                TNode::Push(h, tl),
            ))
        }
        Pop {
            scrut,
            empty_case,
            head,
            tail,
            step,
        } => {
            let s = infer(sc, scrut, None)?;
            let Type::Stack(a) = &s.ty else {
                return Err(TypeError::want(scrut.span, "a stack type", &s.ty));
            };
            let sc2 = sc.bind(&[(head, (**a).clone()), (tail, s.ty.clone())], span)?;
            let (n1, n2) = branches(sc, empty_case, &sc2, step, expected, "a pop")?;
            let branch_uses = union(&[&n1.uses, &minus(&n2.uses, &[head, tail])]);
            disjoint(span, &[share(&s), (branch_uses.to_vec(), &n1)])?;
            Ok(mk(
                n1.ty.clone(),
                union(&[&s.uses, &branch_uses]),
                span,
                TNode::Pop {
                    scrut: s,
                    empty_case: n1,
                    head: head.clone(),
                    tail: tail.clone(),
                    step: n2,
                },
            ))
        }
        Leaf => match expected {
            Some(e @ Type::Tree(_)) => Ok(mk(e.clone(), Rc::from(vec![]), span, TNode::Leaf)),
            Some(e) => Err(TypeError::shape(span, e, "`leaf`")),
            None => Err(cannot_infer(span, "`leaf`")),
        },
        Node(d, x, l, r) => {
            let elem = match expected {
                Some(Type::Tree(a)) => Some((**a).clone()),
                Some(e) => return Err(TypeError::shape(span, e, "`node`")),
                None => None,
            };
            let d = infer(sc, d, Some(&Type::Diamond))?;
            let x = infer(sc, x, elem.as_ref())?;
            let tree_ty = Type::tree(x.ty.clone());
            let l = infer(sc, l, Some(&tree_ty))?;
            let r = infer(sc, r, Some(&tree_ty))?;
            disjoint(span, &[share(&d), share(&x), share(&l), share(&r)])?;
            Ok(mk(
                tree_ty,
                union(&[&d.uses, &x.uses, &l.uses, &r.uses]),
                span,
                TNode::Node(d, x, l, r),
            ))
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
            let s = infer(sc, scrut, None)?;
            let Type::Tree(a) = &s.ty else {
                return Err(TypeError::want(scrut.span, "a tree type", &s.ty));
            };
            let base = sc.barrier(&[], span)?;
            let n1 = infer(&base, leaf_case, expected)?;
            let b = n1.ty.clone();
            let inner = sc.barrier(
                &[
                    (diamond, Type::Diamond),
                    (label, (**a).clone()),
                    (left, b.clone()),
                    (right, b.clone()),
                ],
                span,
            )?;
            let n2 = infer(&inner, step, Some(&b))?;
            Ok(mk(
                b,
                s.uses.clone(),
                span,
                TNode::TRec {
                    scrut: s,
                    leaf_case: n1,
                    diamond: diamond.clone(),
                    label: label.clone(),
                    left: left.clone(),
                    right: right.clone(),
                    step: n2,
                },
            ))
        }
    }
}

/// Two branches typed at the same result type. When no type is expected,
/// whichever branch can be synthesized fixes it for the other.
fn branches(
    sc1: &Scope,
    b1: &Term,
    sc2: &Scope,
    b2: &Term,
    expected: Option<&Type>,
    what: &str,
) -> Result<(TT, TT), TypeError> {
    if expected.is_some() {
        return Ok((infer(sc1, b1, expected)?, infer(sc2, b2, expected)?));
    }
    let first = infer(sc1, b1, None);
    if is_cannot_infer(&first) {
        let second = infer(sc2, b2, None).map_err(|e| {
            if e.kind == TypeErrorKind::CannotInfer {
                cannot_infer(b2.span, what)
            } else {
                e
            }
        })?;
        let first = infer(sc1, b1, Some(&second.ty))?;
        return Ok((first, second));
    }
    let first = first?;
    let second = infer(sc2, b2, Some(&first.ty))?;
    Ok((first, second))
}

fn scope_of(ctx: &Ctx) -> Result<Scope, TypeError> {
    let binders: Vec<(&Name, Type)> = ctx.entries().iter().map(|(n, t)| (n, t.clone())).collect();
    Scope::default().bind(&binders, Span::default())
}

/// Checks `term` against `expected` under `ctx`.
pub fn check(ctx: &Ctx, term: &Term, expected: &Type) -> Result<TypedTerm, TypeError> {
    let sc = scope_of(ctx)?;
    infer(&sc, term, Some(expected)).map(|t| (*t).clone())
}

/// Synthesizes the type of `term` under `ctx`.
pub fn synth(ctx: &Ctx, term: &Term) -> Result<TypedTerm, TypeError> {
    let sc = scope_of(ctx)?;
    infer(&sc, term, None).map(|t| (*t).clone())
}

/// The variables of `ctx` that `term` consumes.
pub fn infer_usage(ctx: &Ctx, term: &Term) -> Result<Vec<Name>, TypeError> {
    synth(ctx, term).map(|t| t.uses.to_vec())
}

/// Checks a closed term.
pub fn check_closed(term: &Term, expected: &Type) -> Result<TypedTerm, TypeError> {
    check(&Ctx::new(), term, expected)
}
