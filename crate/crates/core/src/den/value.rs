use std::fmt;
use std::rc::Rc;

use crate::eval::Value;
use crate::syntax::{Name, Side};

pub type HostFn = Rc<dyn Fn(DenValue) -> DenValue>;

/// Elements of the semantic domains. Lists and stacks carry no diamonds.
#[derive(Clone)]
pub enum DenValue {
    Diamond,
    Star,
    Inj(Side, Rc<DenValue>),
    Pair(Rc<DenValue>, Rc<DenValue>),
    Fun(HostFn),
    List(Rc<Vec<DenValue>>),
    /// Top of the stack first.
    Stack(Rc<Vec<DenValue>>),
    Leaf,
    Node(Rc<DenValue>, Rc<DenValue>, Rc<DenValue>),
}

impl fmt::Debug for DenValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Structural equality; functions are never equal.
impl PartialEq for DenValue {
    fn eq(&self, other: &DenValue) -> bool {
        use DenValue::*;
        match (self, other) {
            (Diamond, Diamond) | (Star, Star) | (Leaf, Leaf) => true,
            (Inj(s, a), Inj(t, b)) => s == t && a == b,
            (Pair(a, b), Pair(c, d)) => a == c && b == d,
            (List(a), List(b)) | (Stack(a), Stack(b)) => a == b,
            (Node(x, l, r), Node(y, m, s)) => x == y && l == m && r == s,
            _ => false,
        }
    }
}

impl DenValue {
    pub fn inj(side: Side, v: DenValue) -> DenValue {
        DenValue::Inj(side, Rc::new(v))
    }

    pub fn pair(a: DenValue, b: DenValue) -> DenValue {
        DenValue::Pair(Rc::new(a), Rc::new(b))
    }

    pub fn list(items: Vec<DenValue>) -> DenValue {
        DenValue::List(Rc::new(items))
    }

    pub fn stack(items: Vec<DenValue>) -> DenValue {
        DenValue::Stack(Rc::new(items))
    }

    pub fn node(x: DenValue, l: DenValue, r: DenValue) -> DenValue {
        DenValue::Node(Rc::new(x), Rc::new(l), Rc::new(r))
    }

    pub fn fun(f: impl Fn(DenValue) -> DenValue + 'static) -> DenValue {
        DenValue::Fun(Rc::new(f))
    }

    /// The unit list of length `n`.
    pub fn nat(n: usize) -> DenValue {
        DenValue::list(vec![DenValue::Star; n])
    }

    pub fn bool(b: bool) -> DenValue {
        DenValue::inj(if b { Side::Right } else { Side::Left }, DenValue::Star)
    }

    /// Right-nested tuple.
    pub fn tuple(mut parts: Vec<DenValue>) -> DenValue {
        let mut acc = parts.pop().unwrap_or(DenValue::Star);
        while let Some(v) = parts.pop() {
            acc = DenValue::pair(v, acc);
        }
        acc
    }

    /// Splits a right-nested tuple into `n` components.
    pub fn untuple(&self, n: usize) -> Vec<DenValue> {
        let mut out = Vec::with_capacity(n);
        let mut cur = self.clone();
        for _ in 1..n {
            let (a, b) = cur.unpair();
            out.push(a);
            cur = b;
        }
        out.push(cur);
        out
    }

    pub fn apply(&self, arg: DenValue) -> DenValue {
        match self {
            DenValue::Fun(f) => f(arg),
            other => panic!("applied a non-function {other}"),
        }
    }

    pub fn unpair(&self) -> (DenValue, DenValue) {
        match self {
            DenValue::Pair(a, b) => ((**a).clone(), (**b).clone()),
            other => panic!("expected a pair, found {other}"),
        }
    }

    pub fn items(&self) -> &[DenValue] {
        match self {
            DenValue::List(xs) | DenValue::Stack(xs) => xs,
            other => panic!("expected a list or stack, found {other}"),
        }
    }

    pub fn is_fun(&self) -> bool {
        matches!(self, DenValue::Fun(_))
    }
}

impl fmt::Display for DenValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let seq = |f: &mut fmt::Formatter<'_>, xs: &[DenValue]| -> fmt::Result {
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            Ok(())
        };
        match self {
            DenValue::Diamond => f.write_str("diamond"),
            DenValue::Star => f.write_str("<>"),
            DenValue::Inj(s, v) => write!(f, "inj{} {v}", s.index()),
            DenValue::Pair(a, b) => write!(f, "({a}, {b})"),
            DenValue::Fun(_) => f.write_str("<function>"),
            DenValue::List(xs) => {
                write!(f, "[")?;
                seq(f, xs)?;
                write!(f, "]")
            }
            DenValue::Stack(xs) => {
                write!(f, "stack[")?;
                seq(f, xs)?;
                write!(f, "]")
            }
            DenValue::Leaf => f.write_str("leaf"),
            DenValue::Node(x, l, r) => write!(f, "node({x}, {l}, {r})"),
        }
    }
}

/// Persistent environment for the denotational evaluator.
#[derive(Clone, Default)]
pub struct DenEnv(Option<Rc<(Name, DenValue, DenEnv)>>);

impl DenEnv {
    pub fn new() -> DenEnv {
        DenEnv(None)
    }

    pub fn with(&self, name: &Name, v: DenValue) -> DenEnv {
        DenEnv(Some(Rc::new((name.clone(), v, self.clone()))))
    }

    pub fn lookup(&self, x: &str) -> Option<&DenValue> {
        let mut cur = &self.0;
        while let Some(cell) = cur {
            if &*cell.0 == x {
                return Some(&cell.1);
            }
            cur = &cell.2 .0;
        }
        None
    }
}

/// Converts a denotation without functions back into a value.
pub fn den_to_value(d: &DenValue) -> Option<Value> {
    Some(match d {
        DenValue::Diamond => Value::Diamond,
        DenValue::Star => Value::Null,
        DenValue::Inj(s, v) => Value::inj(*s, den_to_value(v)?),
        DenValue::Pair(a, b) => Value::pair(den_to_value(a)?, den_to_value(b)?),
        DenValue::Fun(_) => return None,
        DenValue::List(xs) => Value::list(xs.iter().map(den_to_value).collect::<Option<_>>()?),
        DenValue::Stack(xs) => Value::stack(xs.iter().map(den_to_value).collect::<Option<_>>()?),
        DenValue::Leaf => Value::Leaf,
        DenValue::Node(x, l, r) => {
            Value::node(den_to_value(x)?, den_to_value(l)?, den_to_value(r)?)
        }
    })
}
