use std::fmt;
use std::rc::Rc;

use super::stdlib::susp;
use super::{tuple_src, Closed, CompleteError};
use crate::costpoly::CostPoly;
use crate::den::DenValue;
use crate::eval::Value;
use crate::syntax::{Side, Type};

/// Validity plus item extraction: `None` when the state is not valid at `n`.
type View = Rc<dyn Fn(u64, &DenValue) -> Option<Vec<DenValue>>>;

/// `(L(1))^k`
pub fn ms_type(k: usize) -> Type {
    Type::tensor_all(vec![Type::nat(); k])
}

pub fn push_type(a: &Type, s: &Type, k: usize) -> Type {
    let ms = ms_type(k);
    Type::arrow(
        ms.clone(),
        Type::arrow(
            Type::tensor(a.clone(), s.clone()),
            Type::tensor(
                ms,
                Type::tensor(s.clone(), Type::sum(a.clone(), Type::Unit)),
            ),
        ),
    )
}

pub fn pop_type(a: &Type, s: &Type, k: usize) -> Type {
    let ms = ms_type(k);
    Type::arrow(
        ms.clone(),
        Type::arrow(
            s.clone(),
            Type::tensor(
                ms,
                Type::tensor(s.clone(), Type::sum(Type::Unit, a.clone())),
            ),
        ),
    )
}

/// `m_{n,k}`: `k` unit lists of length `n`.
pub fn m_value(n: usize, k: usize) -> Value {
    let mut parts = vec![Value::nat(n); k];
    let Some(mut acc) = parts.pop() else {
        return Value::Null;
    };
    while let Some(v) = parts.pop() {
        acc = Value::pair(v, acc);
    }
    acc
}

pub fn m_den(n: usize, k: usize) -> DenValue {
    DenValue::tuple(vec![DenValue::nat(n); k])
}

/// A `k`-stack implementation with its executable correctness oracles.
#[derive(Clone)]
pub struct StackImpl {
    pub elem_type: Type,
    pub k: usize,
    pub impl_type: Type,
    pub empty: Closed,
    pub push: Closed,
    pub pop: Closed,
    pub bound: CostPoly,
    pub label: String,
    view: View,
}

impl fmt::Debug for StackImpl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StackImpl")
            .field("label", &self.label)
            .field("k", &self.k)
            .field("elem_type", &self.elem_type)
            .field("impl_type", &self.impl_type)
            .field("bound", &self.bound.to_string())
            .finish()
    }
}

impl StackImpl {
    fn build(
        elem: &Type,
        k: usize,
        s: Type,
        srcs: [String; 3],
        bound: CostPoly,
        label: String,
        view: View,
    ) -> Result<StackImpl, CompleteError> {
        let [e, pu, po] = srcs;
        Ok(StackImpl {
            empty: Closed::parse(&e, s.clone())?,
            push: Closed::parse(&pu, push_type(elem, &s, k))?,
            pop: Closed::parse(&po, pop_type(elem, &s, k))?,
            elem_type: elem.clone(),
            k,
            impl_type: s,
            bound,
            label,
            view,
        })
    }

    pub fn capacity(&self, n: u64) -> u64 {
        self.bound.eval_u64(n)
    }

    /// Items of a valid state, top first; `None` for an invalid state.
    pub fn view(&self, n: u64, s: &DenValue) -> Option<Vec<DenValue>> {
        (self.view)(n, s)
    }

    pub fn is_valid(&self, n: u64, s: &DenValue) -> bool {
        self.view(n, s).is_some()
    }
}

fn inl_star() -> DenValue {
    DenValue::inj(Side::Left, DenValue::Star)
}

/// Capacity `c` with no diamonds: `(1 + A)^c`, open slots first.
pub fn stack_const(a: &Type, c: usize) -> Result<StackImpl, CompleteError> {
    let s = Type::tensor_all(vec![Type::sum(Type::Unit, a.clone()); c]);
    let open = "inj1 <>".to_string();
    let xs: Vec<String> = (1..=c).map(|i| format!("x{i}")).collect();
    let (push, pop) = if c == 0 {
        (
            "lam m . lam xs . letp (x, s) = xs in (m, (s, inj1 x))".to_string(),
            "lam m . lam s . (m, (s, inj1 <>))".to_string(),
        )
    } else {
        // Slots before `i` are known to be open; slot `i` is inspected.
        let slots = |f: &dyn Fn(usize) -> String| tuple_src(&(1..=c).map(f).collect::<Vec<_>>());
        let place = |p: usize, stored: Option<usize>| {
            slots(&|j| {
                if j < p {
                    open.clone()
                } else if j == p {
                    "inj2 x".into()
                } else if Some(j) == stored {
                    format!("inj2 a{j}")
                } else {
                    xs[j - 1].clone()
                }
            })
        };
        fn push_at(
            i: usize,
            c: usize,
            g: &dyn Fn(usize, Option<usize>) -> String,
            full: &str,
        ) -> String {
            let open_case = if i == c {
                format!("(m, ({}, inj2 <>))", g(c, None))
            } else {
                push_at(i + 1, c, g, full)
            };
            let stored_case = if i == 1 {
                full.to_string()
            } else {
                format!("(m, ({}, inj2 <>))", g(i - 1, Some(i)))
            };
            format!("case x{i} . | inj1 u{i} => {open_case} | inj2 a{i} => {stored_case}")
        }
        let full = format!(
            "(m, ({}, inj1 x))",
            slots(&|j| if j == 1 {
                "inj2 a1".into()
            } else {
                xs[j - 1].clone()
            })
        );
        let push_body = push_at(1, c, &place, &full);
        let cleared = |i: usize| {
            slots(&|j| {
                if j <= i {
                    open.clone()
                } else {
                    xs[j - 1].clone()
                }
            })
        };
        fn pop_at(i: usize, c: usize, cleared: &dyn Fn(usize) -> String) -> String {
            let open_case = if i == c {
                format!("(m, ({}, inj1 <>))", cleared(c))
            } else {
                pop_at(i + 1, c, cleared)
            };
            format!(
                "case x{i} . | inj1 u{i} => {open_case} | inj2 a{i} => (m, ({}, inj2 a{i}))",
                cleared(i)
            )
        }
        let pop_body = pop_at(1, c, &cleared);
        let mut pat = vec!["x".to_string()];
        pat.extend(xs.iter().cloned());
        (
            format!(
                "lam m . lam xs . letp {} = xs in {push_body}",
                tuple_src(&pat)
            ),
            if c == 1 {
                format!("lam m . lam x1 . {pop_body}")
            } else {
                format!("lam m . lam s . letp {} = s in {pop_body}", tuple_src(&xs))
            },
        )
    };
    let empty = tuple_src(&vec![open.clone(); c]);
    let view: View = Rc::new(move |_, s| {
        if c == 0 {
            return (*s == DenValue::Star).then(Vec::new);
        }
        let slots = s.untuple(c);
        let j = slots.iter().take_while(|x| **x == inl_star()).count();
        slots[j..]
            .iter()
            .map(|x| match x {
                DenValue::Inj(Side::Right, a) => Some((**a).clone()),
                _ => None,
            })
            .collect()
    });
    StackImpl::build(
        a,
        0,
        s,
        [empty, push, pop],
        CostPoly::constant(c as u64),
        format!("const {c}"),
        view,
    )
}

/// Splits `ms0 : (L(1))^(k+1)` into its first list and the rest.
fn split(k: usize) -> (String, &'static str, &'static str) {
    if k == 0 {
        (String::new(), "ms0", "<>")
    } else {
        ("letp (ell, ms) = ms0 in ".into(), "ell", "ms")
    }
}

fn pack(k: usize, ell: &str, ms: &str) -> String {
    if k == 0 {
        ell.into()
    } else {
        format!("({ell}, {ms})")
    }
}

/// Bound `n * B(n)`: a suspended list of `n` sub-stacks.
pub fn stack_inductive(inner: &StackImpl) -> Result<StackImpl, CompleteError> {
    let (a, s, k) = (&inner.elem_type, &inner.impl_type, inner.k);
    let ls = Type::list(s.clone());
    let s2 = Type::arrow(Type::nat(), ls.clone());
    let ms = ms_type(k);
    let sp = susp(s);
    let push_fold = Closed::parse(
        &format!(
            "lam subs . rec subs . \
             | nil => lam p . letp (m, st) = p in (m, (nil, st)) \
             | cons (d, si, r) => lam p . letp (m1, q1) = r p in letp (rest, st) = q1 in \
               case st . \
               | inj1 x => letp (m2, q2) = {push} m1 (x, si) in letp (si2, st2) = q2 in \
                   (m2, (cons (d, si2, rest), st2)) \
               | inj2 u => (m1, (cons (d, si, rest), inj2 u))",
            push = inner.push.src()
        ),
        Type::arrow(
            ls.clone(),
            Type::arrow(
                Type::tensor(ms.clone(), Type::sum(a.clone(), Type::Unit)),
                Type::tensor(
                    ms.clone(),
                    Type::tensor(ls.clone(), Type::sum(a.clone(), Type::Unit)),
                ),
            ),
        ),
    )?;
    let pop_fold = Closed::parse(
        &format!(
            "lam subs . rec subs . \
             | nil => lam p . letp (m, st) = p in (m, (nil, st)) \
             | cons (d, si, r) => lam p . letp (m1, st) = p in case st . \
               | inj1 u => letp (m2, q2) = {pop} m1 si in letp (si2, st2) = q2 in \
                   letp (m3, q3) = r (m2, st2) in letp (rest, st3) = q3 in \
                   (m3, (cons (d, si2, rest), st3)) \
               | inj2 y => letp (m3, q3) = r (m1, inj2 y) in letp (rest, st3) = q3 in \
                   (m3, (cons (d, si, rest), st3))",
            pop = inner.pop.src()
        ),
        Type::arrow(
            ls.clone(),
            Type::arrow(
                Type::tensor(ms.clone(), Type::sum(Type::Unit, a.clone())),
                Type::tensor(ms, Type::tensor(ls, Type::sum(Type::Unit, a.clone()))),
            ),
        ),
    )?;
    let (pre, ell, m) = split(k);
    let out = pack(k, "ell1", "m1");
    let empty = format!(
        "lam l . rec l . | nil => nil | cons (d, u, r) => cons (d, {}, r)",
        inner.empty.src()
    );
    let push = format!(
        "lam ms0 . lam xs . letp (x0, s0) = xs in {pre}\
         letp (m1, q1) = {pf} (s0 {ell}) ({m}, inj1 x0) in letp (subs, st) = q1 in \
         letp (s1, ell1) = {sp} subs in ({out}, (s1, st))",
        pf = push_fold.src(),
        sp = sp.src()
    );
    let pop = format!(
        "lam ms0 . lam s0 . {pre}\
         letp (m1, q1) = {qf} (s0 {ell}) ({m}, inj1 <>) in letp (subs, st) = q1 in \
         letp (s1, ell1) = {sp} subs in ({out}, (s1, st))",
        qf = pop_fold.src(),
        sp = sp.src()
    );
    let sub = inner.clone();
    let view: View = Rc::new(move |n, s| {
        let DenValue::Fun(f) = s else { return None };
        let subs = f(DenValue::nat(n as usize));
        let DenValue::List(subs) = subs else {
            return None;
        };
        if subs.len() as u64 != n {
            return None;
        }
        let views = subs
            .iter()
            .map(|x| sub.view(n, x))
            .collect::<Option<Vec<_>>>()?;
        let cap = sub.capacity(n) as usize;
        // Empty sub-stacks, then one arbitrary one, then full ones.
        let lead = views.iter().take_while(|v| v.is_empty()).count();
        let tail_ok = views.iter().skip(lead + 1).all(|v| v.len() == cap);
        tail_ok.then(|| views.concat())
    });
    StackImpl::build(
        a,
        k + 1,
        s2,
        [empty, push, pop],
        inner.bound.shift_mul_n(),
        format!("inductive({})", inner.label),
        view,
    )
}

/// The same stack accepting one more (ignored) unit list.
pub fn stack_weaken(inner: &StackImpl) -> Result<StackImpl, CompleteError> {
    let k = inner.k;
    let (push, pop) = if k == 0 {
        (
            format!(
                "lam ms0 . lam xs . letp (m1, q) = {} <> xs in (ms0, q)",
                inner.push.src()
            ),
            format!(
                "lam ms0 . lam s . letp (m1, q) = {} <> s in (ms0, q)",
                inner.pop.src()
            ),
        )
    } else {
        (
            format!(
                "lam ms0 . lam xs . letp (ell, ms) = ms0 in letp (m1, q) = {} ms xs in ((ell, m1), q)",
                inner.push.src()
            ),
            format!(
                "lam ms0 . lam s . letp (ell, ms) = ms0 in letp (m1, q) = {} ms s in ((ell, m1), q)",
                inner.pop.src()
            ),
        )
    };
    let sub = inner.clone();
    StackImpl::build(
        &inner.elem_type,
        k + 1,
        inner.impl_type.clone(),
        [inner.empty.src().to_string(), push, pop],
        inner.bound.clone(),
        format!("weaken({})", inner.label),
        Rc::new(move |n, s| sub.view(n, s)),
    )
}

/// Bound `B1 + B2`: the first stack is used only once the second is full.
pub fn stack_add(a: &StackImpl, b: &StackImpl) -> Result<StackImpl, CompleteError> {
    if a.k != b.k {
        return Err(CompleteError::Shape(format!(
            "cannot add a {}-stack to a {}-stack",
            a.k, b.k
        )));
    }
    if a.elem_type != b.elem_type {
        return Err(CompleteError::Shape(format!(
            "element types differ: {} and {}",
            a.elem_type, b.elem_type
        )));
    }
    let push = format!(
        "lam m0 . lam xs . letp (x, s) = xs in letp (s1, s2) = s in \
         letp (m1, q1) = {push2} m0 (x, s2) in letp (s2b, r2) = q1 in case r2 . \
         | inj1 y => letp (m2, q2) = {push1} m1 (y, s1) in letp (s1b, r1) = q2 in \
             (m2, ((s1b, s2b), r1)) \
         | inj2 u => (m1, ((s1, s2b), inj2 u))",
        push1 = a.push.src(),
        push2 = b.push.src()
    );
    let pop = format!(
        "lam m0 . lam s . letp (s1, s2) = s in \
         letp (m1, q1) = {pop1} m0 s1 in letp (s1b, r1) = q1 in case r1 . \
         | inj1 u => letp (m2, q2) = {pop2} m1 s2 in letp (s2b, r2) = q2 in \
             (m2, ((s1b, s2b), r2)) \
         | inj2 y => (m1, ((s1b, s2), inj2 y))",
        pop1 = a.pop.src(),
        pop2 = b.pop.src()
    );
    let empty = format!("({}, {})", a.empty.src(), b.empty.src());
    let (sa, sb) = (a.clone(), b.clone());
    let view: View = Rc::new(move |n, s| {
        let DenValue::Pair(s1, s2) = s else {
            return None;
        };
        let v1 = sa.view(n, s1)?;
        let v2 = sb.view(n, s2)?;
        if !v1.is_empty() && v2.len() as u64 != sb.capacity(n) {
            return None;
        }
        Some([v1, v2].concat())
    });
    StackImpl::build(
        &a.elem_type,
        a.k,
        Type::tensor(a.impl_type.clone(), b.impl_type.clone()),
        [empty, push, pop],
        a.bound.add(&b.bound),
        format!("add({}, {})", a.label, b.label),
        view,
    )
}

/// Bound `c * n^k`.
pub fn stack_monomial(a: &Type, c: usize, k: usize) -> Result<StackImpl, CompleteError> {
    let mut s = stack_const(a, c)?;
    for _ in 0..k {
        s = stack_inductive(&s)?;
    }
    Ok(s)
}

fn weaken_to(mut s: StackImpl, k: usize) -> Result<StackImpl, CompleteError> {
    while s.k < k {
        s = stack_weaken(&s)?;
    }
    Ok(s)
}

/// Bound `P`, as a `deg P`-stack.
pub fn stack_poly(a: &Type, p: &CostPoly) -> Result<StackImpl, CompleteError> {
    let k = p.degree();
    let cs = p
        .to_u64s()
        .ok_or_else(|| CompleteError::Shape(format!("coefficients of {p} are too large")))?;
    let mut acc: Option<StackImpl> = None;
    for (i, &c) in cs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let m = weaken_to(stack_monomial(a, c as usize, i)?, k)?;
        acc = Some(match acc {
            None => m,
            Some(prev) => stack_add(&prev, &m)?,
        });
    }
    match acc {
        Some(s) => Ok(s),
        None => weaken_to(stack_const(a, 0)?, k),
    }
}

/// Bound `P` as a `k`-stack for any `k >= deg P`.
pub fn stack_poly_at(a: &Type, p: &CostPoly, k: usize) -> Result<StackImpl, CompleteError> {
    if p.degree() > k {
        return Err(CompleteError::Shape(format!("{p} has degree above {k}")));
    }
    weaken_to(stack_poly(a, p)?, k)
}

#[derive(Clone, Debug, PartialEq)]
pub enum StackOp {
    Push(DenValue),
    Pop,
}

impl fmt::Display for StackOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StackOp::Push(x) => write!(f, "push {x}"),
            StackOp::Pop => write!(f, "pop"),
        }
    }
}

/// First point where an implementation departs from the bounded-stack model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StackDivergence {
    /// `None` for the initial empty state.
    pub index: Option<usize>,
    pub message: String,
}

impl fmt::Display for StackDivergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            Some(i) => write!(f, "op {i}: {}", self.message),
            None => write!(f, "empty: {}", self.message),
        }
    }
}

/// Replays `script` through the denotations of `imp`, passing `m_{n,k}`
/// to every operation, and compares against a host stack of capacity
/// `B(n)`.
pub fn check_stack(imp: &StackImpl, n: u64, script: &[StackOp]) -> Result<(), StackDivergence> {
    let m = m_den(n as usize, imp.k);
    let cap = imp.capacity(n) as usize;
    let fail = |index, message: String| Err(StackDivergence { index, message });
    let mut s = imp.empty.den();
    let mut model: Vec<DenValue> = Vec::new();
    match imp.view(n, &s) {
        Some(items) if items.is_empty() => {}
        Some(items) => return fail(None, format!("empty holds {} items", items.len())),
        None => return fail(None, "empty is not a valid state".into()),
    }
    let (push, pop) = (imp.push.den(), imp.pop.den());
    for (i, op) in script.iter().enumerate() {
        let out = match op {
            StackOp::Push(x) => push
                .apply(m.clone())
                .apply(DenValue::pair(x.clone(), s.clone())),
            StackOp::Pop => pop.apply(m.clone()).apply(s.clone()),
        };
        let (m2, rest) = out.unpair();
        let (s2, res) = rest.unpair();
        if m2 != m {
            return fail(
                Some(i),
                format!("returned {m2} instead of the borrowed lists"),
            );
        }
        let Some(items) = imp.view(n, &s2) else {
            return fail(Some(i), "result state is not valid".into());
        };
        let expected = match op {
            StackOp::Push(x) if model.len() >= cap => DenValue::inj(Side::Left, x.clone()),
            StackOp::Push(x) => {
                model.insert(0, x.clone());
                DenValue::inj(Side::Right, DenValue::Star)
            }
            StackOp::Pop if model.is_empty() => inl_star(),
            StackOp::Pop => DenValue::inj(Side::Right, model.remove(0)),
        };
        if res != expected {
            return fail(Some(i), format!("{op} returned {res}, expected {expected}"));
        }
        if items != model {
            return fail(
                Some(i),
                format!(
                    "items after {op} are {}, expected {}",
                    DenValue::list(items),
                    DenValue::list(model)
                ),
            );
        }
        s = s2;
    }
    Ok(())
}
