use super::{Closed, CompleteError};
use crate::costpoly::CostPoly;
use crate::syntax::Type;

fn state_type(f: &Closed) -> Result<Type, CompleteError> {
    match &f.ty {
        Type::Arrow(a, b) if a == b => match &**a {
            Type::Tensor(_, n) if **n == Type::nat() => Ok((**a).clone()),
            _ => Err(mismatch(f)),
        },
        _ => Err(mismatch(f)),
    }
}

fn mismatch(f: &Closed) -> CompleteError {
    CompleteError::Shape(format!(
        "expected a function of type A * L(1) -o A * L(1), found {}",
        f.ty
    ))
}

/// `f#(x, n) = f^|n| (x, n)`.
pub fn iter_sharp(f: &Closed) -> Result<Closed, CompleteError> {
    let t = state_type(f)?;
    let g = Closed::parse(
        &format!(
            "lam m . rec m . | nil => lam s . s \
             | cons (d, u, r) => lam p . letp (x, n) = p in {} (r (x, cons (d, u, n)))",
            f.src()
        ),
        Type::arrow(Type::nat(), Type::arrow(t.clone(), t.clone())),
    )?;
    Closed::parse(
        &format!("lam s . letp (x, n) = s in {} n (x, nil)", g.src()),
        Type::arrow(t.clone(), t),
    )
}

/// `f^P(x, n) = f^P(|n|) (x, n)`: repeated sharps per monomial, composed.
pub fn iter_poly(f: &Closed, p: &CostPoly) -> Result<Closed, CompleteError> {
    let t = state_type(f)?;
    let cs = p
        .to_u64s()
        .ok_or_else(|| CompleteError::Shape(format!("coefficients of {p} are too large")))?;
    let mut power = f.clone();
    let mut body = "s".to_string();
    for (i, &c) in cs.iter().enumerate() {
        if i > 0 {
            power = iter_sharp(&power)?;
        }
        for _ in 0..c {
            body = format!("{} ({body})", power.src());
        }
    }
    Closed::parse(&format!("lam s . {body}"), Type::arrow(t.clone(), t))
}
