use std::rc::Rc;

use super::check::{TypeError, TypeErrorKind};
use crate::syntax::build::*;
use crate::syntax::{is_diamond_free, Span, Term, Type};

/// A closed term of type `A -o A * A` returning two copies of its argument.
pub fn gen_dup(ty: &Type) -> Result<Term, TypeError> {
    if !is_diamond_free(ty) {
        return Err(TypeError::new(
            TypeErrorKind::NotDiamondFree,
            Span::default(),
            format!("`{ty}` is not diamond-free, so it cannot be duplicated"),
        ));
    }
    let mut fresh = 0;
    let x = next(&mut fresh);
    let body = copies(ty, &x, &mut fresh);
    Ok((*lam(&x, body)).clone())
}

fn next(fresh: &mut usize) -> String {
    *fresh += 1;
    format!("x{fresh}")
}

/// A term of type `A * A` consuming the variable `x : A`.
fn copies(ty: &Type, x: &str, fresh: &mut usize) -> Rc<Term> {
    match ty {
        Type::Unit => pair(null(), null()),
        Type::Sum(a, b) => {
            let (l, r) = (next(fresh), next(fresh));
            let left = rebuild(a, &l, fresh, inl);
            let right = rebuild(b, &r, fresh, inr);
            case(var(x), &l, left, &r, right)
        }
        Type::Tensor(a, b) => {
            let (p, q) = (next(fresh), next(fresh));
            let (p1, p2, q1, q2) = (next(fresh), next(fresh), next(fresh), next(fresh));
            let dp = ann(
                copies(a, &p, fresh),
                Type::tensor((**a).clone(), (**a).clone()),
            );
            let dq = ann(
                copies(b, &q, fresh),
                Type::tensor((**b).clone(), (**b).clone()),
            );
            letp(
                var(x),
                &p,
                &q,
                letp(
                    dp,
                    &p1,
                    &p2,
                    letp(
                        dq,
                        &q1,
                        &q2,
                        pair(pair(var(&p1), var(&q1)), pair(var(&p2), var(&q2))),
                    ),
                ),
            )
        }
        _ => unreachable!("only diamond-free types are duplicated"),
    }
}

fn rebuild(ty: &Type, x: &str, fresh: &mut usize, wrap: fn(Rc<Term>) -> Rc<Term>) -> Rc<Term> {
    let (a, b) = (next(fresh), next(fresh));
    let d = ann(copies(ty, x, fresh), Type::tensor(ty.clone(), ty.clone()));
    letp(d, &a, &b, pair(wrap(var(&a)), wrap(var(&b))))
}
