use std::fmt;
use std::rc::Rc;

use crate::syntax::{Name, Side, Type};
use crate::typecheck::TT;

/// Runtime values. Diamonds inside lists and trees are implicit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Diamond,
    Null,
    /// Lazy pair closure.
    Record(Env, TT, TT),
    Inj(Side, Rc<Value>),
    Pair(Rc<Value>, Rc<Value>),
    Lam(Env, Name, Type, TT),
    Empty,
    Push(Rc<Value>, Rc<Value>),
    Nil,
    Cons(Rc<Value>, Rc<Value>),
    Leaf,
    Node(Rc<Value>, Rc<Value>, Rc<Value>),
}

/// Environment with pairwise distinct names. Lookup scans from the most
/// recent binding; equality ignores binding order.
#[derive(Clone, Debug, Default)]
pub struct Env(Rc<Vec<(Name, Value)>>);

impl PartialEq for Env {
    fn eq(&self, other: &Env) -> bool {
        self.0.len() == other.0.len()
            && self
                .0
                .iter()
                .all(|(n, v)| other.lookup(n).is_some_and(|w| w == v))
    }
}

impl Eq for Env {}

impl Env {
    pub fn new() -> Env {
        Env::default()
    }

    pub fn from_bindings(bindings: Vec<(Name, Value)>) -> Env {
        Env(Rc::new(bindings))
    }

    pub fn with(&self, name: &str, v: Value) -> Env {
        self.extend(&[(Rc::from(name), v)])
    }

    pub fn extend(&self, bindings: &[(Name, Value)]) -> Env {
        let mut out: Vec<(Name, Value)> = self
            .0
            .iter()
            .filter(|(n, _)| !bindings.iter().any(|(m, _)| m == n))
            .cloned()
            .collect();
        out.extend(bindings.iter().cloned());
        Env(Rc::new(out))
    }

    pub fn lookup(&self, x: &str) -> Option<&Value> {
        self.0.iter().rev().find(|(n, _)| &**n == x).map(|(_, v)| v)
    }

    /// Keeps only the bindings for `names`.
    pub fn restrict(&self, names: &[Name]) -> Env {
        if self.0.len() == names.len() && self.0.iter().all(|(n, _)| names.contains(n)) {
            return self.clone();
        }
        Env(Rc::new(
            self.0
                .iter()
                .filter(|(n, _)| names.contains(n))
                .cloned()
                .collect(),
        ))
    }

    pub fn bindings(&self) -> &[(Name, Value)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The same bindings in another order.
    pub fn permuted(&self, order: &[usize]) -> Env {
        Env(Rc::new(order.iter().map(|&i| self.0[i].clone()).collect()))
    }
}

impl Value {
    pub fn inj(side: Side, v: Value) -> Value {
        Value::Inj(side, Rc::new(v))
    }

    pub fn pair(a: Value, b: Value) -> Value {
        Value::Pair(Rc::new(a), Rc::new(b))
    }

    pub fn cons(h: Value, t: Value) -> Value {
        Value::Cons(Rc::new(h), Rc::new(t))
    }

    pub fn push(h: Value, t: Value) -> Value {
        Value::Push(Rc::new(h), Rc::new(t))
    }

    pub fn node(x: Value, l: Value, r: Value) -> Value {
        Value::Node(Rc::new(x), Rc::new(l), Rc::new(r))
    }

    pub fn list(items: Vec<Value>) -> Value {
        items
            .into_iter()
            .rev()
            .fold(Value::Nil, |t, h| Value::cons(h, t))
    }

    pub fn stack(items: Vec<Value>) -> Value {
        items
            .into_iter()
            .rev()
            .fold(Value::Empty, |t, h| Value::push(h, t))
    }

    /// Unary natural: a unit list of length `n`.
    pub fn nat(n: usize) -> Value {
        Value::list(vec![Value::Null; n])
    }

    /// `inj1 <>` for false, `inj2 <>` for true.
    pub fn bool(b: bool) -> Value {
        Value::inj(if b { Side::Right } else { Side::Left }, Value::Null)
    }

    pub fn list_items(&self) -> Option<Vec<Value>> {
        let mut out = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                Value::Nil => return Some(out),
                Value::Cons(h, t) => {
                    out.push((**h).clone());
                    cur = t;
                }
                _ => return None,
            }
        }
    }

    pub fn stack_items(&self) -> Option<Vec<Value>> {
        let mut out = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                Value::Empty => return Some(out),
                Value::Push(h, t) => {
                    out.push((**h).clone());
                    cur = t;
                }
                _ => return None,
            }
        }
    }

    /// Number of diamonds, counting one per list cell and tree node.
    pub fn size(&self) -> u64 {
        match self {
            Value::Diamond => 1,
            Value::Null | Value::Empty | Value::Nil | Value::Leaf => 0,
            Value::Record(env, ..) | Value::Lam(env, ..) => size_env(env),
            Value::Inj(_, v) => v.size(),
            Value::Pair(a, b) | Value::Push(a, b) => a.size() + b.size(),
            Value::Cons(h, t) => {
                let mut n = 1 + h.size();
                let mut cur = &**t;
                while let Value::Cons(h, t) = cur {
                    n += 1 + h.size();
                    cur = t;
                }
                n + cur.size()
            }
            Value::Node(x, l, r) => 1 + x.size() + l.size() + r.size(),
        }
    }

    /// Value typing `v : A`.
    pub fn has_type(&self, ty: &Type) -> bool {
        match (self, ty) {
            (Value::Diamond, Type::Diamond) | (Value::Null, Type::Unit) => true,
            (Value::Inj(Side::Left, v), Type::Sum(a, _)) => v.has_type(a),
            (Value::Inj(Side::Right, v), Type::Sum(_, b)) => v.has_type(b),
            (Value::Pair(x, y), Type::Tensor(a, b)) => x.has_type(a) && y.has_type(b),
            (Value::Lam(env, x, dom, body), Type::Arrow(a, b)) => {
                **a == *dom && body.ty == **b && env_matches(env, &body.free_var_types(), Some(x))
            }
            (Value::Record(env, m1, m2), Type::Prod(a, b)) => {
                m1.ty == **a
                    && m2.ty == **b
                    && env_matches(env, &m1.free_var_types(), None)
                    && env_matches(env, &m2.free_var_types(), None)
            }
            (Value::Nil, Type::List(_)) | (Value::Empty, Type::Stack(_)) => true,
            (Value::Leaf, Type::Tree(_)) => true,
            (Value::Cons(_, _), Type::List(a)) => self
                .list_items()
                .is_some_and(|xs| xs.iter().all(|x| x.has_type(a))),
            (Value::Push(_, _), Type::Stack(a)) => self
                .stack_items()
                .is_some_and(|xs| xs.iter().all(|x| x.has_type(a))),
            (Value::Node(x, l, r), Type::Tree(_)) => {
                let Type::Tree(a) = ty else { unreachable!() };
                x.has_type(a) && l.has_type(ty) && r.has_type(ty)
            }
            _ => false,
        }
    }
}

fn env_matches(env: &Env, free: &[(Name, Type)], param: Option<&Name>) -> bool {
    free.iter()
        .filter(|(n, _)| Some(n) != param)
        .all(|(n, t)| env.lookup(n).is_some_and(|v| v.has_type(t)))
}

pub fn size_env(env: &Env) -> u64 {
    env.0.iter().map(|(_, v)| v.size()).sum()
}

/// Environment typing `η : Γ`.
pub fn env_has_types(env: &Env, ctx: &[(Name, Type)]) -> bool {
    ctx.iter()
        .all(|(n, t)| env.lookup(n).is_some_and(|v| v.has_type(t)))
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Diamond => f.write_str("diamond"),
            Value::Null => f.write_str("<>"),
            Value::Record(..) => f.write_str("<lazy pair>"),
            Value::Lam(_, x, ..) => write!(f, "<closure {x}>"),
            Value::Inj(s, v) => write!(f, "inj{} {v}", s.index()),
            Value::Pair(a, b) => write!(f, "({a}, {b})"),
            Value::Nil | Value::Cons(..) => {
                let items = self.list_items().unwrap_or_default();
                write!(f, "[")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "]")
            }
            Value::Empty | Value::Push(..) => {
                let items = self.stack_items().unwrap_or_default();
                write!(f, "stack[")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "]")
            }
            Value::Leaf => f.write_str("leaf"),
            Value::Node(x, l, r) => write!(f, "node({x}, {l}, {r})"),
        }
    }
}
