use super::{Closed, CompleteError, Fresh};
use crate::den::DenValue;
use crate::syntax::{is_diamond_free, Side, Type};

/// A diamond-free type with exactly `size` inhabitants, as right-nested
/// unit sums. Index 0 is the outermost left injection.
pub fn finite_type(size: usize) -> Option<Type> {
    match size {
        0 => None,
        1 => Some(Type::Unit),
        _ => Some(Type::sum(Type::Unit, finite_type(size - 1)?)),
    }
}

pub fn finite_den(size: usize, i: usize) -> DenValue {
    assert!(i < size, "index {i} out of range for {size}");
    if size == 1 {
        DenValue::Star
    } else if i == 0 {
        DenValue::inj(Side::Left, DenValue::Star)
    } else {
        DenValue::inj(Side::Right, finite_den(size - 1, i - 1))
    }
}

pub fn finite_index(size: usize, v: &DenValue) -> Option<usize> {
    match (size, v) {
        (1, DenValue::Star) => Some(0),
        (s, DenValue::Inj(Side::Left, u)) if s > 1 && **u == DenValue::Star => Some(0),
        (s, DenValue::Inj(Side::Right, u)) if s > 1 => Some(1 + finite_index(s - 1, u)?),
        _ => None,
    }
}

fn value_src(ty: &Type, v: &DenValue) -> Result<String, CompleteError> {
    let bad = || CompleteError::Shape(format!("{v} is not a value of {ty}"));
    Ok(match (ty, v) {
        (Type::Unit, DenValue::Star) => "<>".into(),
        (Type::Sum(a, b), DenValue::Inj(side, u)) => {
            let (i, t) = match side {
                Side::Left => (1, a),
                Side::Right => (2, b),
            };
            format!("inj{i} ({})", value_src(t, u)?)
        }
        (Type::Tensor(a, b), DenValue::Pair(x, y)) => {
            format!("({}, {})", value_src(a, x)?, value_src(b, y)?)
        }
        (Type::Unit | Type::Sum(..) | Type::Tensor(..), _) => return Err(bad()),
        _ => return Err(CompleteError::NotDiamondFree(ty.clone())),
    })
}

/// A closed term denoting `v`.
pub fn encode_value(ty: &Type, v: &DenValue) -> Result<Closed, CompleteError> {
    if !is_diamond_free(ty) {
        return Err(CompleteError::NotDiamondFree(ty.clone()));
    }
    Closed::parse(&value_src(ty, v)?, ty.clone())
}

type Leaf<'a> = &'a dyn Fn(&mut Fresh, DenValue) -> Result<String, CompleteError>;

/// A case tree over `var : ty` whose leaves are produced from the value
/// reached.
fn table(fr: &mut Fresh, var: &str, ty: &Type, leaf: Leaf) -> Result<String, CompleteError> {
    match ty {
        Type::Unit => leaf(fr, DenValue::Star),
        Type::Sum(a, b) => {
            let (x, y) = (fr.name("l"), fr.name("r"));
            let left = table(fr, &x, a, &|fr, v| leaf(fr, DenValue::inj(Side::Left, v)))?;
            let right = table(fr, &y, b, &|fr, v| leaf(fr, DenValue::inj(Side::Right, v)))?;
            Ok(format!(
                "case {var} . | inj1 {x} => {left} | inj2 {y} => {right}"
            ))
        }
        Type::Tensor(a, b) => {
            let (x, y) = (fr.name("a"), fr.name("b"));
            let body = table(fr, &x, a, &|fr, va| {
                table(fr, &y, b, &|fr, vb| {
                    leaf(fr, DenValue::pair(va.clone(), vb))
                })
            })?;
            Ok(format!("letp ({x}, {y}) = {var} in {body}"))
        }
        _ => Err(CompleteError::NotDiamondFree(ty.clone())),
    }
}

/// A closed term of type `a -o b` agreeing with `f` on every inhabitant.
pub fn encode_function(
    a: &Type,
    b: &Type,
    f: &dyn Fn(&DenValue) -> DenValue,
) -> Result<Closed, CompleteError> {
    for t in [a, b] {
        if !is_diamond_free(t) {
            return Err(CompleteError::NotDiamondFree(t.clone()));
        }
    }
    let mut fr = Fresh::default();
    let body = table(&mut fr, "x0", a, &|_, v| value_src(b, &f(&v)))?;
    Closed::parse(
        &format!("lam x0 . {body}"),
        Type::arrow(a.clone(), b.clone()),
    )
}
