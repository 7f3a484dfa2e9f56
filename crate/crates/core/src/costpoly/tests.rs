use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::eval::{eval, CostModel, Env, Value};
use crate::harness::{corpus_def, corpus_defs, random_value};
use crate::syntax::{parse_term, Type};
use crate::typecheck::{check, check_closed, Ctx};

#[test]
fn reverse_bound_is_2n_plus_4() {
    let (_, tt) = corpus_def("reverse.lfpl", "reverse").applied().unwrap();
    let cm = CostModel::paper_example();
    let p = term_poly(&tt, &cm);
    assert_eq!(p, CostPoly::from_u64s(&[4, 2]));
    assert_eq!(p.to_string(), "4 + 2*n");
    for n in 0..=10 {
        let env = Env::new().with("input", Value::nat(n));
        let rep = verify_bound(&env, &tt, &cm, [n as u64]).unwrap();
        assert!(rep.holds());
        assert_eq!(rep.rows[0].term_poly, (2 * n + 4).into());
    }
}

#[test]
fn reverse_cost_grows_with_slope_at_most_two() {
    let (_, tt) = corpus_def("reverse.lfpl", "reverse").applied().unwrap();
    let cm = CostModel::paper_example();
    let costs: Vec<f64> = (1..=10)
        .map(|n| {
            eval(&Env::new().with("input", Value::nat(n)), &tt, &cm)
                .unwrap()
                .cost as f64
        })
        .collect();
    let xs: Vec<f64> = (1..=10).map(|n| n as f64).collect();
    let (mx, my) = (
        xs.iter().sum::<f64>() / 10.0,
        costs.iter().sum::<f64>() / 10.0,
    );
    let cov: f64 = xs
        .iter()
        .zip(&costs)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = cov / var;
    assert!(slope <= 2.0 + 1e-9, "slope {slope}");
    let resid: f64 = xs
        .iter()
        .zip(&costs)
        .map(|(x, y)| (y - (my + slope * (x - mx))).abs())
        .sum();
    assert!(resid < 1e-6, "not linear");
}

#[test]
fn small_clauses() {
    let cm = CostModel::default().with(crate::eval::Const::Var, 3);
    let ctx = Ctx::new().with("x", Type::Unit);
    let t = check(&ctx, &parse_term("x").unwrap(), &Type::Unit).unwrap();
    assert_eq!(term_poly(&t, &cm), CostPoly::constant(3));
    let t = check_closed(&parse_term("<>").unwrap(), &Type::Unit).unwrap();
    assert_eq!(term_poly(&t, &cm), CostPoly::constant(1));
    let rep = verify_bound(&Env::new(), &t, &cm, 0..3).unwrap();
    assert!(rep.rows.iter().all(|r| r.slack == 0.into()));
    assert_eq!(value_poly(&Value::Diamond, &cm), CostPoly::zero());
    assert_eq!(
        value_poly(&Value::list(vec![Value::bool(true); 4]), &cm),
        CostPoly::zero()
    );
}

#[test]
fn closure_polynomial_is_env_plus_body() {
    let cm = CostModel::default();
    let d = corpus_def("reverse.lfpl", "revAppend");
    let ctx = Ctx::new().with("l", Type::nat());
    let t = check(
        &ctx,
        &parse_term("lam m . l").unwrap(),
        &Type::arrow(Type::nat(), Type::nat()),
    )
    .unwrap();
    let env = Env::new().with("l", Value::nat(2));
    let v = eval(&env, &t, &cm).unwrap().value;
    let crate::typecheck::TNode::Lam { body, .. } = &t.node else {
        panic!()
    };
    assert_eq!(
        value_poly(&v, &cm),
        env_poly(&env, &cm).add(&term_poly(body, &cm))
    );
    let f = eval(&Env::new(), &d.term, &cm).unwrap().value;
    let inner = Env::new().with("f", f.clone());
    assert_eq!(env_poly(&inner, &cm), value_poly(&f, &cm));
}

#[test]
fn corpus_soundness_under_several_cost_models() {
    let models = [
        CostModel::default(),
        CostModel::paper_example(),
        CostModel::parse("c_var = 3\nc_trec = 2\nc_pop = 5\nc_record = 4\nc_proj2 = 7").unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for d in corpus_defs() {
        for cm in &models {
            let rep = verify_bound(&Env::new(), &d.term, cm, 0..6).unwrap();
            assert!(rep.holds(), "{}: {}", d.name, rep.to_tsv());
            let Some((ctx, tt)) = d.applied() else {
                continue;
            };
            for _ in 0..10 {
                let Some(v) = random_value(&mut rng, &ctx.entries()[0].1, 6) else {
                    break;
                };
                let env = Env::new().with("input", v);
                let n = crate::eval::size_env(&env);
                let rep = verify_bound(&env, &tt, cm, n..n + 6).unwrap();
                assert!(
                    rep.holds(),
                    "{} on {}: {}",
                    d.name,
                    env.bindings()[0].1,
                    rep.to_tsv()
                );
            }
        }
    }
}
