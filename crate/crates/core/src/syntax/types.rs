use std::fmt;
use std::rc::Rc;

/// LFPL+ types.
///
/// Children are reference counted so that type annotations can be copied
/// onto every node of a checked term without deep clones.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Type {
    Diamond,
    Unit,
    Sum(Rc<Type>, Rc<Type>),
    Tensor(Rc<Type>, Rc<Type>),
    Arrow(Rc<Type>, Rc<Type>),
    List(Rc<Type>),
    /// Lazy (additive) product `A & B`.
    Prod(Rc<Type>, Rc<Type>),
    Stack(Rc<Type>),
    Tree(Rc<Type>),
}

impl Type {
    pub fn sum(a: Type, b: Type) -> Type {
        Type::Sum(Rc::new(a), Rc::new(b))
    }

    pub fn tensor(a: Type, b: Type) -> Type {
        Type::Tensor(Rc::new(a), Rc::new(b))
    }

    pub fn arrow(a: Type, b: Type) -> Type {
        Type::Arrow(Rc::new(a), Rc::new(b))
    }

    pub fn list(a: Type) -> Type {
        Type::List(Rc::new(a))
    }

    pub fn prod(a: Type, b: Type) -> Type {
        Type::Prod(Rc::new(a), Rc::new(b))
    }

    pub fn stack(a: Type) -> Type {
        Type::Stack(Rc::new(a))
    }

    pub fn tree(a: Type) -> Type {
        Type::Tree(Rc::new(a))
    }

    /// `1 + 1`, the type of booleans and directions.
    pub fn bool() -> Type {
        Type::sum(Type::Unit, Type::Unit)
    }

    /// `L(1)`, unary naturals and the diamond pool currency.
    pub fn nat() -> Type {
        Type::list(Type::Unit)
    }

    /// Right-nested tensor of the given components; the empty product is `1`.
    pub fn tensor_all(mut parts: Vec<Type>) -> Type {
        let Some(mut acc) = parts.pop() else {
            return Type::Unit;
        };
        while let Some(t) = parts.pop() {
            acc = Type::tensor(t, acc);
        }
        acc
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Type::Diamond | Type::Unit => 1,
            Type::List(a) | Type::Stack(a) | Type::Tree(a) => 1 + a.size(),
            Type::Sum(a, b) | Type::Tensor(a, b) | Type::Arrow(a, b) | Type::Prod(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    /// True when no arrow or lazy product occurs anywhere in the type, so
    /// that values can be compared structurally.
    pub fn is_first_order(&self) -> bool {
        match self {
            Type::Diamond | Type::Unit => true,
            Type::Arrow(..) | Type::Prod(..) => false,
            Type::List(a) | Type::Stack(a) | Type::Tree(a) => a.is_first_order(),
            Type::Sum(a, b) | Type::Tensor(a, b) => a.is_first_order() && b.is_first_order(),
        }
    }
}

/// The diamond-free judgement: derivable only for unit, and for sums and
/// tensors of diamond-free types.
pub fn is_diamond_free(ty: &Type) -> bool {
    match ty {
        Type::Unit => true,
        Type::Sum(a, b) | Type::Tensor(a, b) => is_diamond_free(a) && is_diamond_free(b),
        _ => false,
    }
}

/// Every diamond-free type with at most `max_size` nodes.
pub fn diamond_free_types(max_size: usize) -> Vec<Type> {
    let mut by_size: Vec<Vec<Type>> = vec![Vec::new(); max_size + 1];
    for n in 1..=max_size {
        if n == 1 {
            by_size[1].push(Type::Unit);
            continue;
        }
        for k in 1..n - 1 {
            let (ls, rs) = (by_size[k].clone(), by_size[n - 1 - k].clone());
            for l in &ls {
                for r in &rs {
                    by_size[n].push(Type::sum(l.clone(), r.clone()));
                    by_size[n].push(Type::tensor(l.clone(), r.clone()));
                }
            }
        }
    }
    by_size.concat()
}

// Precedence levels used by the printer: arrows loosest, then sums, then
// tensors and lazy products, then atoms.
const LEVEL_ARROW: u8 = 0;
const LEVEL_SUM: u8 = 1;
const LEVEL_TENSOR: u8 = 2;
const LEVEL_ATOM: u8 = 3;

fn level(ty: &Type) -> u8 {
    match ty {
        Type::Arrow(..) => LEVEL_ARROW,
        Type::Sum(..) => LEVEL_SUM,
        Type::Tensor(..) | Type::Prod(..) => LEVEL_TENSOR,
        _ => LEVEL_ATOM,
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, ty: &Type, min: u8) -> fmt::Result {
    if level(ty) < min {
        write!(f, "(")?;
        write_at(f, ty, LEVEL_ARROW)?;
        return write!(f, ")");
    }
    match ty {
        Type::Diamond => write!(f, "diam"),
        Type::Unit => write!(f, "1"),
        Type::List(a) => {
            write!(f, "L(")?;
            write_at(f, a, LEVEL_ARROW)?;
            write!(f, ")")
        }
        Type::Stack(a) => {
            write!(f, "S(")?;
            write_at(f, a, LEVEL_ARROW)?;
            write!(f, ")")
        }
        Type::Tree(a) => {
            write!(f, "Tree(")?;
            write_at(f, a, LEVEL_ARROW)?;
            write!(f, ")")
        }
        Type::Arrow(a, b) => {
            write_at(f, a, LEVEL_SUM)?;
            write!(f, " -o ")?;
            write_at(f, b, LEVEL_ARROW)
        }
        Type::Sum(a, b) => {
            write_at(f, a, LEVEL_TENSOR)?;
            write!(f, " + ")?;
            write_at(f, b, LEVEL_SUM)
        }
        Type::Tensor(a, b) => {
            write_at(f, a, LEVEL_ATOM)?;
            write!(f, " * ")?;
            write_at(f, b, LEVEL_TENSOR)
        }
        Type::Prod(a, b) => {
            write_at(f, a, LEVEL_ATOM)?;
            write!(f, " & ")?;
            write_at(f, b, LEVEL_TENSOR)
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_at(f, self, LEVEL_ARROW)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diamond_free_rules() {
        assert!(is_diamond_free(&Type::Unit));
        assert!(!is_diamond_free(&Type::Diamond));
        assert!(is_diamond_free(&Type::sum(
            Type::Unit,
            Type::tensor(Type::Unit, Type::Unit)
        )));
        assert!(!is_diamond_free(&Type::nat()));
        assert!(!is_diamond_free(&Type::arrow(Type::Unit, Type::Unit)));
        assert!(!is_diamond_free(&Type::prod(Type::Unit, Type::Unit)));
        assert!(!is_diamond_free(&Type::sum(Type::Unit, Type::Diamond)));
    }

    #[test]
    fn display_respects_precedence() {
        let t = Type::arrow(
            Type::nat(),
            Type::tensor(Type::arrow(Type::nat(), Type::nat()), Type::nat()),
        );
        assert_eq!(t.to_string(), "L(1) -o (L(1) -o L(1)) * L(1)");
        let s = Type::sum(Type::Unit, Type::tensor(Type::Diamond, Type::nat()));
        assert_eq!(s.to_string(), "1 + diam * L(1)");
        let nested = Type::tensor(Type::tensor(Type::Unit, Type::Unit), Type::Unit);
        assert_eq!(nested.to_string(), "(1 * 1) * 1");
    }

    #[test]
    fn tensor_all_nests_right() {
        assert_eq!(Type::tensor_all(vec![]), Type::Unit);
        assert_eq!(Type::tensor_all(vec![Type::nat()]), Type::nat());
        assert_eq!(
            Type::tensor_all(vec![Type::Unit, Type::Diamond, Type::nat()]),
            Type::tensor(Type::Unit, Type::tensor(Type::Diamond, Type::nat()))
        );
    }
}
