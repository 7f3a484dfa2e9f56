use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::harness::{corpus_def, corpus_defs, random_value};
use crate::syntax::Side;

fn apply(file: &str, name: &str, input: Value, cm: &CostModel) -> EvalResult {
    let (_, tt) = corpus_def(file, name).applied().unwrap();
    eval(&Env::new().with("input", input), &tt, cm).unwrap()
}

#[test]
fn null_is_an_axiom() {
    let t = crate::typecheck::check_closed(
        &crate::syntax::parse_term("<>").unwrap(),
        &crate::Type::Unit,
    )
    .unwrap();
    let r = eval(&Env::new(), &t, &CostModel::default()).unwrap();
    assert_eq!(r.value, Value::Null);
    assert_eq!(r.cost, 1);
    assert_eq!(r.ledger.count(Rule::UnitI), 1);
}

#[test]
fn reverse_reverses() {
    let input = Value::list(vec![
        Value::bool(false),
        Value::bool(true),
        Value::bool(true),
    ]);
    let r = apply("reverse_bool.lfpl", "reverse", input, &CostModel::default());
    assert_eq!(
        r.value,
        Value::list(vec![
            Value::bool(true),
            Value::bool(true),
            Value::bool(false)
        ])
    );
}

// Hand replay of the rules for `reverse input` on a list of length n.
// Default costs: the outer application, the closure, the argument (3); the
// body `revAppend l1 nil` (2 applications, 1 closure, 1 variable, 1 nil);
// the recursor (its scrutinee, n + 1 rec charges, n variables, one nil-case
// closure and n step closures); then n step bodies `r (cons (d, x, l2))` of
// 6 each and the final `l2`.
fn reverse_cost_default(n: u64) -> u64 {
    3 + 5 + (1 + (n + 1) + n + 1 + n) + 6 * n + 1
}

// Paper-example costs: 3 applications around revAppend, n + 1 rec charges,
// n applications inside the step bodies.
fn reverse_cost_rec_app(n: u64) -> u64 {
    3 + (n + 1) + n
}

#[test]
fn reverse_cost_matches_hand_replay() {
    for n in 0..8 {
        let r = apply(
            "reverse.lfpl",
            "reverse",
            Value::nat(n),
            &CostModel::default(),
        );
        assert_eq!(r.cost, reverse_cost_default(n as u64), "n = {n}");
        let r = apply(
            "reverse.lfpl",
            "reverse",
            Value::nat(n),
            &CostModel::paper_example(),
        );
        assert_eq!(r.cost, reverse_cost_rec_app(n as u64), "n = {n}");
        assert!(r.cost <= 2 * n as u64 + 4);
    }
    assert_eq!(reverse_cost_rec_app(3), 10);
}

#[test]
fn sizes() {
    assert_eq!(Value::Diamond.size(), 1);
    assert_eq!(Value::cons(Value::Null, Value::Nil).size(), 1);
    assert_eq!(Value::push(Value::Diamond, Value::Empty).size(), 1);
    assert_eq!(Value::node(Value::Null, Value::Leaf, Value::Leaf).size(), 1);
    assert_eq!(Value::list(vec![Value::Diamond; 3]).size(), 6);
    let env = Env::new()
        .with("a", Value::nat(2))
        .with("b", Value::Diamond);
    assert_eq!(size_env(&env), 3);
}

#[test]
fn tree_recursion_charges_per_node() {
    let t = Value::node(
        Value::bool(true),
        Value::node(Value::bool(false), Value::Leaf, Value::Leaf),
        Value::Leaf,
    );
    let r = apply("trees.lfpl", "mirror", t, &CostModel::default());
    assert_eq!(
        r.value,
        Value::node(
            Value::bool(true),
            Value::Leaf,
            Value::node(Value::bool(false), Value::Leaf, Value::Leaf)
        )
    );
    assert_eq!(r.ledger.count(Rule::TreeE2), 2);
    assert_eq!(r.ledger.count(Rule::TreeE1), 3);
}

#[test]
fn ledger_accounts_for_all_cost() {
    let cm = CostModel::parse("c_var = 2\nc_app = 5\nc_rec = 3\nc_trec = 7\nc_pop = 4").unwrap();
    for d in corpus_defs() {
        let Some((ctx, tt)) = d.applied() else {
            continue;
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let Some(v) = random_value(&mut rng, &ctx.entries()[0].1, 5) else {
            continue;
        };
        let r = eval(&Env::new().with("input", v), &tt, &cm).unwrap();
        assert_eq!(r.ledger.cost(&cm), r.cost, "{}", d.name);
        assert_eq!(r.steps, r.ledger.total());
    }
}

#[test]
fn fuel_exhaustion_is_reported() {
    let (_, tt) = corpus_def("reverse.lfpl", "reverse").applied().unwrap();
    let env = Env::new().with("input", Value::nat(50));
    assert_eq!(
        eval_with_fuel(&env, &tt, &CostModel::default(), 10),
        Err(EvalError::FuelExhausted(10))
    );
}

#[test]
fn lazy_pairs_run_one_side() {
    let l = Value::list(vec![Value::bool(true)]);
    let r1 = apply("lazy.lfpl", "first", l.clone(), &CostModel::default());
    let r2 = apply("lazy.lfpl", "second", l.clone(), &CostModel::default());
    assert_eq!(r1.value, l);
    assert_eq!(r2.value, l);
    assert_eq!(r1.ledger.count(Rule::ProdE1), 1);
    assert_eq!(r2.ledger.count(Rule::ListE2), 1);
    assert_eq!(r1.ledger.count(Rule::ListE2), 0);
}

#[test]
fn stacks_round_trip() {
    let l = Value::list(vec![Value::bool(true), Value::bool(false)]);
    let r = apply("stacks.lfpl", "roundTrip", l.clone(), &CostModel::default());
    assert_eq!(r.value, l);
}

#[test]
fn corpus_nsi_preservation_determinism() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cm = CostModel::default();
    for d in corpus_defs() {
        let Some((ctx, tt)) = d.applied() else {
            continue;
        };
        for _ in 0..20 {
            let Some(v) = random_value(&mut rng, &ctx.entries()[0].1, 6) else {
                break;
            };
            let env = Env::new().with("input", v);
            let r = eval(&env, &tt, &cm).unwrap();
            assert!(r.value.size() <= size_env(&env), "{}", d.name);
            assert!(r.value.has_type(&tt.ty), "{}", d.name);
            assert!(check_nsi(&env, &tt, &cm).unwrap());
            assert_eq!(eval(&env, &tt, &cm).unwrap(), r);
        }
    }
}

#[test]
fn closures_are_typed_values() {
    let d = corpus_def("reverse.lfpl", "revAppend");
    let r = eval(&Env::new(), &d.term, &CostModel::default()).unwrap();
    assert!(r.value.has_type(&d.ty));
    assert!(!r.value.has_type(&crate::Type::nat()));
    assert!(Value::inj(Side::Left, Value::Null).has_type(&crate::Type::bool()));
}
