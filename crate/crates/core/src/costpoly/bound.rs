use num_bigint::{BigInt, BigUint};

use super::poly::CostPoly;
use crate::eval::{eval, Const, CostModel, Env, EvalError, Value};
use crate::syntax::Side;
use crate::typecheck::{TNode, TypedTerm};

fn c(cm: &CostModel, k: Const) -> CostPoly {
    CostPoly::constant(cm.get(k))
}

fn sum(cm: &CostModel, k: Const, parts: &[&TypedTerm]) -> CostPoly {
    parts
        .iter()
        .fold(c(cm, k), |acc, t| acc.add(&term_poly(t, cm)))
}

/// The term polynomial `P_M`.
pub fn term_poly(t: &TypedTerm, cm: &CostModel) -> CostPoly {
    let p = |m: &TypedTerm| term_poly(m, cm);
    match &t.node {
        TNode::Var(_) => c(cm, Const::Var),
        TNode::Null => c(cm, Const::Null),
        TNode::Nil => c(cm, Const::Nil),
        TNode::Empty => c(cm, Const::Empty),
        TNode::Leaf => c(cm, Const::Leaf),
        TNode::Inj(_, m) => sum(cm, Const::Inj, &[m]),
        TNode::Pair(a, b) => sum(cm, Const::Pair, &[a, b]),
        TNode::LetPair { scrut, body, .. } => sum(cm, Const::Letp, &[scrut, body]),
        TNode::Lam { body, .. } => sum(cm, Const::Lam, &[body]),
        TNode::App(f, a) => sum(cm, Const::App, &[f, a]),
        TNode::Cons(d, h, tl) => sum(cm, Const::Cons, &[d, h, tl]),
        TNode::Push(h, tl) => sum(cm, Const::Push, &[h, tl]),
        TNode::Node(d, x, l, r) => sum(cm, Const::Node, &[d, x, l, r]),
        TNode::Case {
            scrut,
            left_body,
            right_body,
            ..
        } => sum(cm, Const::Case, &[scrut]).add(&p(left_body).max(&p(right_body))),
        TNode::Pop {
            scrut,
            empty_case,
            step,
            ..
        } => sum(cm, Const::Pop, &[scrut]).add(&p(empty_case).max(&p(step))),
        TNode::Record(a, b) => c(cm, Const::Record).add(&p(a).max(&p(b))),
        TNode::Proj(side, m) => {
            let k = match side {
                Side::Left => Const::Proj1,
                Side::Right => Const::Proj2,
            };
            sum(cm, k, &[m])
        }
        TNode::Rec {
            scrut,
            nil_case,
            step,
            ..
        } => {
            let per_cell = c(cm, Const::Var)
                .add(&c(cm, Const::Rec))
                .add(&p(step))
                .shift_mul_n();
            p(scrut)
                .add(&c(cm, Const::Rec).add(&p(nil_case)))
                .add(&per_cell)
        }
        TNode::TRec {
            scrut,
            leaf_case,
            step,
            ..
        } => {
            let leaves = c(cm, Const::Trec).add(&p(leaf_case));
            let per_node = c(cm, Const::Var)
                .scale(2)
                .add(&c(cm, Const::Trec))
                .add(&p(step))
                .shift_mul_n();
            p(scrut)
                .add(&leaves.shift_mul_n().add(&leaves))
                .add(&per_node)
        }
    }
}

/// The value polynomial `P_v`: the latent cost of the closures inside `v`.
pub fn value_poly(v: &Value, cm: &CostModel) -> CostPoly {
    match v {
        Value::Diamond | Value::Null | Value::Empty | Value::Nil | Value::Leaf => CostPoly::zero(),
        Value::Record(env, a, b) => env_poly(env, cm).add(&term_poly(a, cm).max(&term_poly(b, cm))),
        Value::Lam(env, _, _, body) => env_poly(env, cm).add(&term_poly(body, cm)),
        Value::Inj(_, v) => value_poly(v, cm),
        Value::Pair(a, b) | Value::Push(a, b) => value_poly(a, cm).add(&value_poly(b, cm)),
        Value::Cons(..) => v
            .list_items()
            .unwrap()
            .iter()
            .fold(CostPoly::zero(), |acc, x| acc.add(&value_poly(x, cm))),
        Value::Node(x, l, r) => value_poly(x, cm)
            .add(&value_poly(l, cm))
            .add(&value_poly(r, cm)),
    }
}

/// The environment polynomial `P_η`.
pub fn env_poly(env: &Env, cm: &CostModel) -> CostPoly {
    env.bindings()
        .iter()
        .fold(CostPoly::zero(), |acc, (_, v)| acc.add(&value_poly(v, cm)))
}

/// One row of a bound verification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundRow {
    pub n: u64,
    pub cost: u64,
    pub value_poly: BigUint,
    pub term_poly: BigUint,
    pub env_poly: BigUint,
    /// `P_M(n) + P_η(n) - (cost + P_v(n))`; negative means a violation.
    pub slack: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub term_poly: CostPoly,
    /// Size of the environment the judgement sees.
    pub env_size: u64,
    pub rows: Vec<BoundRow>,
}

impl BoundReport {
    pub fn holds(&self) -> bool {
        self.rows.iter().all(|r| r.slack >= BigInt::from(0))
    }

    pub fn violations(&self) -> impl Iterator<Item = &BoundRow> {
        self.rows.iter().filter(|r| r.slack < BigInt::from(0))
    }

    /// Tab-separated table with a header line.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("n\tcost\tvalue_poly\tterm_poly\tenv_poly\tslack\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\n",
                r.n, r.cost, r.value_poly, r.term_poly, r.env_poly, r.slack
            ));
        }
        out
    }
}

/// Evaluates once and checks `c + P_v(n) <= P_M(n) + P_η(n)` for every `n`
/// in `ns`. Values of `n` below the environment size are skipped.
pub fn verify_bound(
    env: &Env,
    term: &TypedTerm,
    cm: &CostModel,
    ns: impl IntoIterator<Item = u64>,
) -> Result<BoundReport, EvalError> {
    let env = env.restrict(&term.uses);
    let r = eval(&env, term, cm)?;
    let (pm, pv, pe) = (
        term_poly(term, cm),
        value_poly(&r.value, cm),
        env_poly(&env, cm),
    );
    let env_size = crate::eval::size_env(&env);
    let rows = ns
        .into_iter()
        .filter(|&n| n >= env_size)
        .map(|n| {
            let (v, m, e) = (pv.eval(n), pm.eval(n), pe.eval(n));
            let slack = BigInt::from(m.clone()) + BigInt::from(e.clone())
                - BigInt::from(r.cost)
                - BigInt::from(v.clone());
            BoundRow {
                n,
                cost: r.cost,
                value_poly: v,
                term_poly: m,
                env_poly: e,
                slack,
            }
        })
        .collect();
    Ok(BoundReport {
        term_poly: pm,
        env_size,
        rows,
    })
}
