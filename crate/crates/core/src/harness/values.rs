use rand::Rng;

use crate::eval::Value;
use crate::syntax::{Side, Type};

/// A random value of type `ty`, or `None` at function and lazy product
/// types. Lists, stacks and trees get at most `max_len` cells.
pub fn random_value<R: Rng>(rng: &mut R, ty: &Type, max_len: usize) -> Option<Value> {
    Some(match ty {
        Type::Diamond => Value::Diamond,
        Type::Unit => Value::Null,
        Type::Sum(a, b) => {
            if rng.gen() {
                Value::inj(Side::Left, random_value(rng, a, max_len)?)
            } else {
                Value::inj(Side::Right, random_value(rng, b, max_len)?)
            }
        }
        Type::Tensor(a, b) => Value::pair(
            random_value(rng, a, max_len)?,
            random_value(rng, b, max_len)?,
        ),
        Type::List(a) => {
            let n = rng.gen_range(0..=max_len);
            let items = (0..n)
                .map(|_| random_value(rng, a, max_len / 2))
                .collect::<Option<Vec<_>>>()?;
            Value::list(items)
        }
        Type::Stack(a) => {
            let n = rng.gen_range(0..=max_len);
            let items = (0..n)
                .map(|_| random_value(rng, a, max_len / 2))
                .collect::<Option<Vec<_>>>()?;
            Value::stack(items)
        }
        Type::Tree(a) => {
            let nodes = rng.gen_range(0..=max_len);
            random_tree(rng, a, nodes)?
        }
        Type::Arrow(..) | Type::Prod(..) => return None,
    })
}

fn random_tree<R: Rng>(rng: &mut R, a: &Type, nodes: usize) -> Option<Value> {
    if nodes == 0 {
        return Some(Value::Leaf);
    }
    let left = rng.gen_range(0..nodes);
    Some(Value::node(
        random_value(rng, a, 2)?,
        random_tree(rng, a, left)?,
        random_tree(rng, a, nodes - 1 - left)?,
    ))
}

/// Every value of a diamond-free type.
pub fn inhabitants(ty: &Type) -> Vec<Value> {
    match ty {
        Type::Unit => vec![Value::Null],
        Type::Sum(a, b) => inhabitants(a)
            .into_iter()
            .map(|v| Value::inj(Side::Left, v))
            .chain(
                inhabitants(b)
                    .into_iter()
                    .map(|v| Value::inj(Side::Right, v)),
            )
            .collect(),
        Type::Tensor(a, b) => {
            let bs = inhabitants(b);
            inhabitants(a)
                .into_iter()
                .flat_map(|x| bs.iter().map(move |y| Value::pair(x.clone(), y.clone())))
                .collect()
        }
        _ => Vec::new(),
    }
}

/// Every list of length at most `max_len` over the given items.
pub fn all_lists(items: &[Value], max_len: usize) -> Vec<Value> {
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Vec<Value>> = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|l| {
                items.iter().map(move |x| {
                    let mut l = l.clone();
                    l.push(x.clone());
                    l
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out.into_iter().map(Value::list).collect()
}
