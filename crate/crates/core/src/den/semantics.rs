use rand::Rng;

use super::value::{DenEnv, DenValue};
use crate::eval::{eval, CostModel, Env, EvalError, Value};
use crate::syntax::{Side, Type};
use crate::typecheck::{TNode, TypedTerm, TT};

/// The denotation of a checked term in a semantic environment.
pub fn den_eval(t: &TypedTerm, env: &DenEnv) -> DenValue {
    match &t.node {
        TNode::Var(x) => env
            .lookup(x)
            .cloned()
            .unwrap_or_else(|| panic!("{}: `{x}` unbound in the semantic environment", t.span)),
        TNode::Null => DenValue::Star,
        TNode::Inj(s, m) => DenValue::inj(*s, den_eval(m, env)),
        TNode::Case {
            scrut,
            left,
            left_body,
            right,
            right_body,
        } => match den_eval(scrut, env) {
            DenValue::Inj(Side::Left, v) => den_eval(left_body, &env.with(left, (*v).clone())),
            DenValue::Inj(Side::Right, v) => den_eval(right_body, &env.with(right, (*v).clone())),
            other => panic!("{}: case on {other}", t.span),
        },
        TNode::Pair(a, b) => DenValue::pair(den_eval(a, env), den_eval(b, env)),
        TNode::LetPair {
            scrut,
            first,
            second,
            body,
        } => {
            let (a, b) = den_eval(scrut, env).unpair();
            den_eval(body, &env.with(first, a).with(second, b))
        }
        TNode::Lam { param, body, .. } => {
            let (param, body, env) = (param.clone(), body.clone(), env.clone());
            DenValue::fun(move |v| den_eval(&body, &env.with(&param, v)))
        }
        TNode::App(f, a) => {
            let f = den_eval(f, env);
            f.apply(den_eval(a, env))
        }
        TNode::Nil => DenValue::list(Vec::new()),
        TNode::Cons(_, h, tl) => {
            // the diamond argument is ignored
            let h = den_eval(h, env);
            let tl = den_eval(tl, env);
            let mut items = Vec::with_capacity(tl.items().len() + 1);
            items.push(h);
            items.extend(tl.items().iter().cloned());
            DenValue::list(items)
        }
        TNode::Rec {
            scrut,
            nil_case,
            diamond,
            head,
            tail,
            step,
        } => {
            let l = den_eval(scrut, env);
            let mut acc = den_eval(nil_case, env);
            for x in l.items().iter().rev() {
                let inner = DenEnv::new()
                    .with(diamond, DenValue::Diamond)
                    .with(head, x.clone())
                    .with(tail, acc);
                acc = den_eval(step, &inner);
            }
            acc
        }
        TNode::Record(a, b) => DenValue::pair(den_eval(a, env), den_eval(b, env)),
        TNode::Proj(side, m) => {
            let (a, b) = den_eval(m, env).unpair();
            match side {
                Side::Left => a,
                Side::Right => b,
            }
        }
        TNode::Empty => DenValue::stack(Vec::new()),
        TNode::Push(h, tl) => {
            let h = den_eval(h, env);
            let tl = den_eval(tl, env);
            let mut items = vec![h];
            items.extend(tl.items().iter().cloned());
            DenValue::stack(items)
        }
        TNode::Pop {
            scrut,
            empty_case,
            head,
            tail,
            step,
        } => {
            let s = den_eval(scrut, env);
            match s.items().split_first() {
                None => den_eval(empty_case, env),
                Some((h, rest)) => den_eval(
                    step,
                    &env.with(head, h.clone())
                        .with(tail, DenValue::stack(rest.to_vec())),
                ),
            }
        }
        TNode::Leaf => DenValue::Leaf,
        TNode::Node(_, x, l, r) => {
            DenValue::node(den_eval(x, env), den_eval(l, env), den_eval(r, env))
        }
        TNode::TRec { scrut, .. } => tree_fold(t, &den_eval(scrut, env)),
    }
}

fn tree_fold(t: &TypedTerm, v: &DenValue) -> DenValue {
    let TNode::TRec {
        leaf_case,
        diamond,
        label,
        left,
        right,
        step,
        ..
    } = &t.node
    else {
        unreachable!()
    };
    match v {
        DenValue::Leaf => den_eval(leaf_case, &DenEnv::new()),
        DenValue::Node(x, l, r) => {
            let vl = tree_fold(t, l);
            let vr = tree_fold(t, r);
            let inner = DenEnv::new()
                .with(diamond, DenValue::Diamond)
                .with(label, (**x).clone())
                .with(left, vl)
                .with(right, vr);
            den_eval(step, &inner)
        }
        other => panic!("{}: trec on {other}", t.span),
    }
}

/// The denotation of a closed term.
pub fn den_closed(t: &TypedTerm) -> DenValue {
    den_eval(t, &DenEnv::new())
}

/// The denotation of an operational value.
pub fn den_of_value(v: &Value) -> DenValue {
    match v {
        Value::Diamond => DenValue::Diamond,
        Value::Null => DenValue::Star,
        Value::Record(env, a, b) => {
            let denv = den_of_env(env);
            DenValue::pair(den_eval(a, &denv), den_eval(b, &denv))
        }
        Value::Inj(s, v) => DenValue::inj(*s, den_of_value(v)),
        Value::Pair(a, b) => DenValue::pair(den_of_value(a), den_of_value(b)),
        Value::Lam(env, x, _, body) => {
            let (denv, x, body): (DenEnv, _, TT) = (den_of_env(env), x.clone(), body.clone());
            DenValue::fun(move |a| den_eval(&body, &denv.with(&x, a)))
        }
        Value::Empty | Value::Push(..) => {
            DenValue::stack(v.stack_items().unwrap().iter().map(den_of_value).collect())
        }
        Value::Nil | Value::Cons(..) => {
            DenValue::list(v.list_items().unwrap().iter().map(den_of_value).collect())
        }
        Value::Leaf => DenValue::Leaf,
        Value::Node(x, l, r) => DenValue::node(den_of_value(x), den_of_value(l), den_of_value(r)),
    }
}

pub fn den_of_env(env: &Env) -> DenEnv {
    env.bindings()
        .iter()
        .fold(DenEnv::new(), |acc, (n, v)| acc.with(n, den_of_value(v)))
}

/// A random element of the domain of `ty`. Functions are constant.
pub fn random_den<R: Rng>(rng: &mut R, ty: &Type, max_len: usize) -> DenValue {
    match ty {
        Type::Diamond => DenValue::Diamond,
        Type::Unit => DenValue::Star,
        Type::Sum(a, b) => {
            if rng.gen() {
                DenValue::inj(Side::Left, random_den(rng, a, max_len))
            } else {
                DenValue::inj(Side::Right, random_den(rng, b, max_len))
            }
        }
        Type::Tensor(a, b) | Type::Prod(a, b) => {
            DenValue::pair(random_den(rng, a, max_len), random_den(rng, b, max_len))
        }
        Type::Arrow(_, b) => {
            let out = random_den(rng, b, max_len);
            DenValue::fun(move |_| out.clone())
        }
        Type::List(a) | Type::Stack(a) => {
            let n = rng.gen_range(0..=max_len);
            let items = (0..n).map(|_| random_den(rng, a, max_len / 2)).collect();
            if matches!(ty, Type::List(_)) {
                DenValue::list(items)
            } else {
                DenValue::stack(items)
            }
        }
        Type::Tree(a) => {
            let n = rng.gen_range(0..=max_len);
            random_tree(rng, a, n)
        }
    }
}

fn random_tree<R: Rng>(rng: &mut R, a: &Type, nodes: usize) -> DenValue {
    if nodes == 0 {
        return DenValue::Leaf;
    }
    let left = rng.gen_range(0..nodes);
    let x = random_den(rng, a, 2);
    let l = random_tree(rng, a, left);
    let r = random_tree(rng, a, nodes - 1 - left);
    DenValue::node(x, l, r)
}

/// Compares two denotations at `ty`: structurally at first-order types and
/// on `samples` random arguments per function. Returns the path to the
/// first difference.
pub fn compare_den<R: Rng>(
    a: &DenValue,
    b: &DenValue,
    ty: &Type,
    samples: usize,
    rng: &mut R,
) -> Result<(), String> {
    match (ty, a, b) {
        (Type::Arrow(dom, cod), DenValue::Fun(f), DenValue::Fun(g)) => {
            for i in 0..samples {
                let x = random_den(rng, dom, 5);
                compare_den(&f(x.clone()), &g(x.clone()), cod, samples.min(4), rng)
                    .map_err(|p| format!("applied to sample {i} ({x}): {p}"))?;
            }
            Ok(())
        }
        (Type::Sum(l, r), DenValue::Inj(s, x), DenValue::Inj(t, y)) if s == t => {
            let inner = if *s == Side::Left { l } else { r };
            compare_den(x, y, inner, samples, rng).map_err(|p| format!("inj{}: {p}", s.index()))
        }
        (Type::Tensor(l, r) | Type::Prod(l, r), DenValue::Pair(x1, x2), DenValue::Pair(y1, y2)) => {
            compare_den(x1, y1, l, samples, rng).map_err(|p| format!("first: {p}"))?;
            compare_den(x2, y2, r, samples, rng).map_err(|p| format!("second: {p}"))
        }
        (Type::List(e) | Type::Stack(e), DenValue::List(xs), DenValue::List(ys))
        | (Type::List(e) | Type::Stack(e), DenValue::Stack(xs), DenValue::Stack(ys)) => {
            if xs.len() != ys.len() {
                return Err(format!("lengths {} and {}", xs.len(), ys.len()));
            }
            for (i, (x, y)) in xs.iter().zip(ys.iter()).enumerate() {
                compare_den(x, y, e, samples, rng).map_err(|p| format!("item {i}: {p}"))?;
            }
            Ok(())
        }
        (Type::Tree(e), DenValue::Node(x, l, r), DenValue::Node(y, m, s)) => {
            compare_den(x, y, e, samples, rng).map_err(|p| format!("label: {p}"))?;
            compare_den(l, m, ty, samples, rng).map_err(|p| format!("left: {p}"))?;
            compare_den(r, s, ty, samples, rng).map_err(|p| format!("right: {p}"))
        }
        _ => {
            if a == b {
                Ok(())
            } else {
                Err(format!("{a} differs from {b}"))
            }
        }
    }
}

/// Checks that the operational result of `term` under `env` denotes the
/// same thing as the term under the denotation of `env`.
pub fn coherence_check<R: Rng>(
    term: &TypedTerm,
    env: &Env,
    cm: &CostModel,
    samples: usize,
    rng: &mut R,
) -> Result<Result<(), String>, EvalError> {
    let r = eval(env, term, cm)?;
    let op = den_of_value(&r.value);
    let den = den_eval(term, &den_of_env(env));
    Ok(compare_den(&op, &den, &term.ty, samples, rng))
}
