use thiserror::Error;

use super::cost::{CostModel, Ledger, Rule};
use super::value::{size_env, Env, Value};
use crate::syntax::{Name, Side, Span};
use crate::typecheck::{TNode, TypedTerm, TT};

pub const DEFAULT_FUEL: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalResult {
    pub value: Value,
    pub cost: u64,
    /// Number of rule applications.
    pub steps: u64,
    pub ledger: Ledger,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("fuel exhausted after {0} rule applications")]
    FuelExhausted(u64),
    #[error("{span}: evaluation stuck: {message}")]
    Stuck { span: Span, message: String },
}

/// Evaluates `term` under `env` with the default fuel.
pub fn eval(env: &Env, term: &TypedTerm, cm: &CostModel) -> Result<EvalResult, EvalError> {
    eval_with_fuel(env, term, cm, DEFAULT_FUEL)
}

pub fn eval_with_fuel(
    env: &Env,
    term: &TypedTerm,
    cm: &CostModel,
    fuel: u64,
) -> Result<EvalResult, EvalError> {
    let mut m = Machine {
        cm,
        fuel,
        cost: 0,
        ledger: Ledger::default(),
    };
    let value = m.go(env, term)?;
    Ok(EvalResult {
        value,
        cost: m.cost,
        steps: m.ledger.total(),
        ledger: m.ledger,
    })
}

/// Evaluates and tests `|v| <= |η|` for the environment the judgement sees.
pub fn check_nsi(env: &Env, term: &TypedTerm, cm: &CostModel) -> Result<bool, EvalError> {
    let r = eval(env, term, cm)?;
    Ok(r.value.size() <= size_env(&env.restrict(&term.uses)))
}

struct Machine<'a> {
    cm: &'a CostModel,
    fuel: u64,
    cost: u64,
    ledger: Ledger,
}

fn stuck(t: &TypedTerm, message: &str) -> EvalError {
    EvalError::Stuck {
        span: t.span,
        message: message.to_string(),
    }
}

fn bind(names: &[&Name], values: Vec<Value>) -> Env {
    Env::from_bindings(names.iter().map(|n| (*n).clone()).zip(values).collect())
}

impl Machine<'_> {
    fn fire(&mut self, r: Rule) -> Result<(), EvalError> {
        if self.ledger.total() >= self.fuel {
            return Err(EvalError::FuelExhausted(self.fuel));
        }
        self.ledger.record(r);
        self.cost += self.cm.get(r.charge());
        Ok(())
    }

    /// The judgement `env ⊢ t ⇓ v`, where `env` is first cut down to the
    /// variables `t` consumes.
    fn go(&mut self, env: &Env, t: &TypedTerm) -> Result<Value, EvalError> {
        let env = env.restrict(&t.uses);
        match &t.node {
            TNode::Var(x) => {
                self.fire(Rule::Var)?;
                env.lookup(x)
                    .cloned()
                    .ok_or_else(|| stuck(t, &format!("`{x}` is not bound")))
            }
            TNode::Null => {
                self.fire(Rule::UnitI)?;
                Ok(Value::Null)
            }
            TNode::Inj(side, m) => {
                let v = self.go(&env, m)?;
                self.fire(Rule::SumI)?;
                Ok(Value::inj(*side, v))
            }
            TNode::Case {
                scrut,
                left,
                left_body,
                right,
                right_body,
            } => {
                let s = self.go(&env, scrut)?;
                self.fire(Rule::SumE)?;
                match s {
                    Value::Inj(Side::Left, v) => {
                        self.go(&env.extend(&[(left.clone(), (*v).clone())]), left_body)
                    }
                    Value::Inj(Side::Right, v) => {
                        self.go(&env.extend(&[(right.clone(), (*v).clone())]), right_body)
                    }
                    _ => Err(stuck(t, "case on a non-injection")),
                }
            }
            TNode::Pair(a, b) => {
                let a = self.go(&env, a)?;
                let b = self.go(&env, b)?;
                self.fire(Rule::TensorI)?;
                Ok(Value::pair(a, b))
            }
            TNode::LetPair {
                scrut,
                first,
                second,
                body,
            } => {
                let Value::Pair(a, b) = self.go(&env, scrut)? else {
                    return Err(stuck(t, "letp on a non-pair"));
                };
                self.fire(Rule::TensorE)?;
                let inner = env.extend(&[
                    (first.clone(), (*a).clone()),
                    (second.clone(), (*b).clone()),
                ]);
                self.go(&inner, body)
            }
            TNode::Lam {
                param,
                param_ty,
                body,
            } => {
                self.fire(Rule::ArrowI)?;
                Ok(Value::Lam(
                    env,
                    param.clone(),
                    param_ty.clone(),
                    body.clone(),
                ))
            }
            TNode::App(f, a) => {
                let fv = self.go(&env, f)?;
                let av = self.go(&env, a)?;
                let Value::Lam(cenv, x, _, body) = fv else {
                    return Err(stuck(t, "application of a non-function"));
                };
                self.fire(Rule::ArrowE)?;
                self.go(&cenv.extend(&[(x, av)]), &body)
            }
            TNode::Nil => {
                self.fire(Rule::ListI1)?;
                Ok(Value::Nil)
            }
            TNode::Cons(d, h, tl) => {
                if self.go(&env, d)? != Value::Diamond {
                    return Err(stuck(t, "cons without a diamond"));
                }
                let h = self.go(&env, h)?;
                let tl = self.go(&env, tl)?;
                self.fire(Rule::ListI2)?;
                Ok(Value::cons(h, tl))
            }
            TNode::Rec {
                scrut,
                nil_case,
                diamond,
                head,
                tail,
                step,
            } => {
                let s = self.go(&env, scrut)?;
                let items = s
                    .list_items()
                    .ok_or_else(|| stuck(t, "rec on a non-list"))?;
                // One ListE2 per cell, each re-entering the recursor through a
                // fresh variable, and one ListE1 at the end of the list.
                for _ in 0..items.len() {
                    self.fire(Rule::ListE2)?;
                    self.fire(Rule::Var)?;
                }
                self.fire(Rule::ListE1)?;
                let mut acc = self.go(&env, nil_case)?;
                let names = [diamond, head, tail];
                for h in items.into_iter().rev() {
                    acc = self.go(&bind(&names, vec![Value::Diamond, h, acc]), step)?;
                }
                Ok(acc)
            }
            TNode::Record(..) => {
                self.fire(Rule::ProdI)?;
                let TNode::Record(a, b) = &t.node else {
                    unreachable!()
                };
                Ok(Value::Record(env, a.clone(), b.clone()))
            }
            TNode::Proj(side, m) => {
                let Value::Record(cenv, a, b) = self.go(&env, m)? else {
                    return Err(stuck(t, "projection from a non-record"));
                };
                self.fire(match side {
                    Side::Left => Rule::ProdE1,
                    Side::Right => Rule::ProdE2,
                })?;
                let chosen: &TT = match side {
                    Side::Left => &a,
                    Side::Right => &b,
                };
                self.go(&cenv, chosen)
            }
            TNode::Empty => {
                self.fire(Rule::StackI1)?;
                Ok(Value::Empty)
            }
            TNode::Push(h, tl) => {
                let h = self.go(&env, h)?;
                let tl = self.go(&env, tl)?;
                self.fire(Rule::StackI2)?;
                Ok(Value::push(h, tl))
            }
            TNode::Pop {
                scrut,
                empty_case,
                head,
                tail,
                step,
            } => match self.go(&env, scrut)? {
                Value::Empty => {
                    self.fire(Rule::StackE1)?;
                    self.go(&env, empty_case)
                }
                Value::Push(h, tl) => {
                    self.fire(Rule::StackE2)?;
                    let inner =
                        env.extend(&[(head.clone(), (*h).clone()), (tail.clone(), (*tl).clone())]);
                    self.go(&inner, step)
                }
                _ => Err(stuck(t, "pop on a non-stack")),
            },
            TNode::Leaf => {
                self.fire(Rule::TreeI1)?;
                Ok(Value::Leaf)
            }
            TNode::Node(d, x, l, r) => {
                if self.go(&env, d)? != Value::Diamond {
                    return Err(stuck(t, "node without a diamond"));
                }
                let x = self.go(&env, x)?;
                let l = self.go(&env, l)?;
                let r = self.go(&env, r)?;
                self.fire(Rule::TreeI2)?;
                Ok(Value::node(x, l, r))
            }
            TNode::TRec { scrut, .. } => {
                let s = self.go(&env, scrut)?;
                self.tree_fold(t, &s)
            }
        }
    }

    fn tree_fold(&mut self, t: &TypedTerm, v: &Value) -> Result<Value, EvalError> {
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
            Value::Leaf => {
                self.fire(Rule::TreeE1)?;
                self.go(&Env::new(), leaf_case)
            }
            Value::Node(x, l, r) => {
                self.fire(Rule::TreeE2)?;
                // each subtree is folded through a fresh variable
                self.fire(Rule::Var)?;
                let vl = self.tree_fold(t, l)?;
                self.fire(Rule::Var)?;
                let vr = self.tree_fold(t, r)?;
                let names = [diamond, label, left, right];
                let inner = bind(&names, vec![Value::Diamond, (**x).clone(), vl, vr]);
                self.go(&inner, step)
            }
            _ => Err(stuck(t, "trec on a non-tree")),
        }
    }
}
