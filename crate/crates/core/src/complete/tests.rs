use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::costpoly::CostPoly;
use crate::den::DenValue;
use crate::eval::{eval, size_env, CostModel, Env, Value};
use crate::harness::inhabitants;
use crate::syntax::{Side, Type};

fn bools() -> Vec<DenValue> {
    vec![DenValue::bool(false), DenValue::bool(true)]
}

fn all_lists(items: &[DenValue], max: usize) -> Vec<Vec<DenValue>> {
    let mut out = vec![vec![]];
    let mut layer: Vec<Vec<DenValue>> = vec![vec![]];
    for _ in 0..max {
        layer = layer
            .iter()
            .flat_map(|l| {
                items
                    .iter()
                    .map(move |x| [l.clone(), vec![x.clone()]].concat())
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

fn bool_lists(max: usize) -> Vec<Vec<DenValue>> {
    all_lists(&bools(), max)
}

#[test]
fn stdlib_types_and_reverse() {
    let lib = stdlib();
    assert_eq!(lib.len(), 5);
    let rev = lib.iter().find(|(n, _)| *n == "reverse").unwrap().1.den();
    for l in bool_lists(6) {
        let mut want = l.clone();
        want.reverse();
        assert_eq!(rev.apply(DenValue::list(l)), DenValue::list(want));
    }
}

#[test]
fn fold_after_unfold_is_identity() {
    let a = Type::bool();
    let (f, u) = (lfold(&a).den(), lunfold(&a).den());
    for l in bool_lists(5) {
        let x = DenValue::list(l);
        assert_eq!(f.apply(u.apply(x.clone())), x);
    }
}

#[test]
fn susp_returns_items_and_diamonds() {
    let s = susp(&Type::bool()).den();
    for l in bool_lists(5) {
        let (f, m) = s.apply(DenValue::list(l.clone())).unpair();
        assert_eq!(m, DenValue::nat(l.len()));
        assert_eq!(f.apply(m), DenValue::list(l));
    }
}

#[test]
fn m_values() {
    assert_eq!(m_value(2, 3).size(), 6);
    assert_eq!(m_value(0, 4).size(), 0);
    assert_eq!(m_value(5, 1), Value::nat(5));
    assert_eq!(m_value(3, 0), Value::Null);
    assert_eq!(
        m_den(2, 2),
        DenValue::pair(DenValue::nat(2), DenValue::nat(2))
    );
}

fn divmod_parts(k: usize, n: usize) -> (Vec<usize>, usize) {
    let out = divmod_term(k).unwrap().den().apply(DenValue::nat(n));
    let (qs, rem) = out.unpair();
    let qs = qs.untuple(k + 1).iter().map(|q| q.items().len()).collect();
    (qs, rem.items().len())
}

#[test]
fn divmod_examples() {
    assert_eq!(divmod_parts(2, 7), (vec![2, 2, 2], 1));
    assert_eq!(divmod_parts(0, 5), (vec![5], 0));
}

#[test]
fn divmod_conserves_diamonds() {
    for k in 0..=3 {
        for n in 0..=20 {
            let (qs, r) = divmod_parts(k, n);
            assert!(qs.iter().all(|&q| q == n / (k + 1)), "k={k} n={n} {qs:?}");
            assert_eq!(r, n % (k + 1));
            assert_eq!(qs.iter().sum::<usize>() + r, n);
        }
    }
}

#[test]
fn divmod_runs_operationally() {
    let t = divmod_term(2).unwrap();
    let cm = CostModel::default();
    for n in 0..8 {
        let env = Env::new().with("f", eval(&Env::new(), &t.term, &cm).unwrap().value);
        let v = Value::nat(n);
        let Value::Lam(cenv, x, _, body) = env.lookup("f").unwrap().clone() else {
            panic!()
        };
        let inner = cenv.extend(&[(x, v)]);
        let r = eval(&inner, &body, &cm).unwrap();
        assert_eq!(r.value.size(), n as u64);
        assert!(r.value.size() <= size_env(&inner));
    }
}

#[test]
fn join_appends() {
    let j = join_term(3).unwrap().den();
    let arg = DenValue::pair(
        DenValue::tuple(vec![DenValue::nat(1), DenValue::nat(2), DenValue::nat(3)]),
        DenValue::nat(4),
    );
    assert_eq!(j.apply(arg), DenValue::nat(10));
}

#[test]
fn finite_encodings_round_trip() {
    for size in 1..6 {
        let ty = finite_type(size).unwrap();
        assert_eq!(inhabitants(&ty).len(), size);
        for i in 0..size {
            let v = finite_den(size, i);
            assert_eq!(finite_index(size, &v), Some(i));
            assert_eq!(encode_value(&ty, &v).unwrap().den(), v);
        }
    }
    assert_eq!(finite_type(0), None);
}

#[test]
fn encode_value_examples() {
    let unit = encode_value(&Type::Unit, &DenValue::Star).unwrap();
    assert_eq!(unit.src(), "(<> : 1)");
    for b in bools() {
        assert_eq!(encode_value(&Type::bool(), &b).unwrap().den(), b);
    }
    assert!(matches!(
        encode_value(&Type::nat(), &DenValue::nat(0)),
        Err(CompleteError::NotDiamondFree(_))
    ));
}

#[test]
fn encode_function_tables() {
    let not = encode_function(&Type::bool(), &Type::bool(), &|v| match v {
        DenValue::Inj(Side::Left, u) => DenValue::inj(Side::Right, (**u).clone()),
        DenValue::Inj(Side::Right, u) => DenValue::inj(Side::Left, (**u).clone()),
        _ => unreachable!(),
    })
    .unwrap()
    .den();
    for b in bools() {
        assert_ne!(not.apply(b.clone()), b);
    }
    // Every diamond-free type up to size 5, with a non-trivial table.
    for ty in crate::syntax::diamond_free_types(5) {
        let vals: Vec<DenValue> = inhabitants(&ty)
            .iter()
            .map(crate::den::den_of_value)
            .collect();
        let shift = |v: &DenValue| {
            let i = vals.iter().position(|w| w == v).unwrap();
            vals[(i + 1) % vals.len()].clone()
        };
        let f = encode_function(&ty, &ty, &shift).unwrap().den();
        for v in &vals {
            assert_eq!(f.apply(v.clone()), shift(v), "{ty}");
        }
    }
}

fn script<R: Rng>(rng: &mut R, len: usize) -> Vec<StackOp> {
    (0..len)
        .map(|_| {
            if rng.gen_bool(0.6) {
                StackOp::Push(bools().choose(rng).unwrap().clone())
            } else {
                StackOp::Pop
            }
        })
        .collect()
}

fn exercise(imp: &StackImpl, ns: std::ops::RangeInclusive<u64>, scripts: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in ns {
        let cap = imp.capacity(n) as usize;
        let fill: Vec<StackOp> = (0..=cap)
            .map(|i| StackOp::Push(DenValue::bool(i % 2 == 0)))
            .collect();
        let mut drain = fill.clone();
        drain.extend(vec![StackOp::Pop; cap + 2]);
        for s in [fill, drain] {
            check_stack(imp, n, &s).unwrap_or_else(|e| panic!("{} n={n}: {e}", imp.label));
        }
        for _ in 0..scripts {
            let len = rng.gen_range(0..=8);
            let s = script(&mut rng, len);
            check_stack(imp, n, &s).unwrap_or_else(|e| panic!("{} n={n}: {e}", imp.label));
        }
    }
}

#[test]
fn const_stack_capacity_zero() {
    let s = stack_const(&Type::bool(), 0).unwrap();
    let push = s.push.den();
    let x = DenValue::bool(true);
    let out = push
        .apply(DenValue::Star)
        .apply(DenValue::pair(x.clone(), s.empty.den()));
    assert_eq!(out.untuple(3)[2], DenValue::inj(Side::Left, x));
    exercise(&s, 0..=2, 20, 1);
}

#[test]
fn const_stack_full_table() {
    let a = Type::bool();
    let s = stack_const(&a, 2).unwrap();
    let (push, pop) = (s.push.den(), s.pop.den());
    let slot = |v: Option<&DenValue>| match v {
        None => DenValue::inj(Side::Left, DenValue::Star),
        Some(x) => DenValue::inj(Side::Right, x.clone()),
    };
    // Every valid state: j open slots followed by 2 - j stored items.
    let mut states = vec![];
    for stored in all_lists(&bools(), 2) {
        let mut slots = vec![slot(None); 2 - stored.len()];
        slots.extend(stored.iter().map(|x| slot(Some(x))));
        states.push((DenValue::tuple(slots), stored));
    }
    assert_eq!(states.len(), 7);
    for (st, items) in &states {
        assert_eq!(s.view(0, st).as_ref(), Some(items));
        for x in bools() {
            let (m, rest) = push
                .apply(DenValue::Star)
                .apply(DenValue::pair(x.clone(), st.clone()))
                .unpair();
            assert_eq!(m, DenValue::Star);
            let (st2, res) = rest.unpair();
            if items.len() == 2 {
                assert_eq!(res, DenValue::inj(Side::Left, x.clone()));
                assert_eq!(&st2, st);
            } else {
                assert_eq!(res, DenValue::inj(Side::Right, DenValue::Star));
                let mut want = vec![x.clone()];
                want.extend(items.iter().cloned());
                assert_eq!(s.view(0, &st2), Some(want));
            }
        }
        let (_, rest) = pop.apply(DenValue::Star).apply(st.clone()).unpair();
        let (st2, res) = rest.unpair();
        match items.split_first() {
            None => {
                assert_eq!(res, DenValue::inj(Side::Left, DenValue::Star));
                assert_eq!(&st2, st);
            }
            Some((h, t)) => {
                assert_eq!(res, DenValue::inj(Side::Right, h.clone()));
                assert_eq!(s.view(0, &st2).as_deref(), Some(t));
            }
        }
    }
    // A gap in the middle is not a valid state.
    let bad = DenValue::tuple(vec![slot(Some(&DenValue::bool(true))), slot(None)]);
    assert!(!s.is_valid(0, &bad));
}

#[test]
fn const_stacks_up_to_three() {
    for c in 0..=3 {
        exercise(&stack_const(&Type::bool(), c).unwrap(), 0..=4, 30, c as u64);
    }
}

#[test]
fn inductive_over_const_one() {
    let s = stack_inductive(&stack_const(&Type::bool(), 1).unwrap()).unwrap();
    assert_eq!(s.k, 1);
    assert_eq!(s.bound, CostPoly::from_u64s(&[0, 1]));
    for n in 0..=4 {
        assert_eq!(s.capacity(n), n);
    }
    exercise(&s, 0..=4, 40, 3);
    // Empty pops to inj1 <> with the borrowed list intact.
    let out = s.pop.den().apply(m_den(3, 1)).apply(s.empty.den());
    let (m, rest) = out.unpair();
    assert_eq!(m, m_den(3, 1));
    assert_eq!(rest.unpair().1, DenValue::inj(Side::Left, DenValue::Star));
}

#[test]
fn inductive_is_lifo_for_all_short_scripts() {
    let s = stack_inductive(&stack_const(&Type::bool(), 1).unwrap()).unwrap();
    let ops = [
        StackOp::Push(DenValue::bool(true)),
        StackOp::Push(DenValue::bool(false)),
        StackOp::Pop,
    ];
    let mut scripts: Vec<Vec<StackOp>> = vec![vec![]];
    for _ in 0..6 {
        scripts = scripts
            .iter()
            .flat_map(|s| {
                ops.iter()
                    .map(move |o| [s.clone(), vec![o.clone()]].concat())
            })
            .collect();
        for sc in &scripts {
            check_stack(&s, 3, sc).unwrap();
        }
    }
}

#[test]
fn inductive_depth_two() {
    let s = stack_monomial(&Type::bool(), 1, 2).unwrap();
    assert_eq!(s.k, 2);
    for n in 0..=3 {
        assert_eq!(s.capacity(n), n * n);
    }
    exercise(&s, 0..=3, 25, 4);
    let s = stack_inductive(&stack_inductive(&stack_const(&Type::bool(), 2).unwrap()).unwrap())
        .unwrap();
    exercise(&s, 0..=2, 15, 5);
}

#[test]
fn weaken_keeps_behaviour() {
    for base in [
        stack_const(&Type::bool(), 2).unwrap(),
        stack_monomial(&Type::bool(), 1, 1).unwrap(),
    ] {
        let w = stack_weaken(&base).unwrap();
        assert_eq!(w.k, base.k + 1);
        assert_eq!(w.bound, base.bound);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for n in 0..=3 {
            for _ in 0..20 {
                let sc = script(&mut rng, 8);
                assert_eq!(
                    check_stack(&w, n, &sc).is_ok(),
                    check_stack(&base, n, &sc).is_ok()
                );
                check_stack(&w, n, &sc).unwrap();
            }
        }
    }
}

#[test]
fn add_of_one_and_two_has_capacity_three() {
    let a = stack_const(&Type::bool(), 1).unwrap();
    let b = stack_const(&Type::bool(), 2).unwrap();
    let s = stack_add(&a, &b).unwrap();
    assert_eq!(s.bound, a.bound.add(&b.bound));
    assert_eq!(s.capacity(0), 3);
    // Exhaustive over scripts of length 5.
    let ops = [
        StackOp::Push(DenValue::bool(true)),
        StackOp::Push(DenValue::bool(false)),
        StackOp::Pop,
    ];
    let mut scripts: Vec<Vec<StackOp>> = vec![vec![]];
    for _ in 0..5 {
        scripts = scripts
            .iter()
            .flat_map(|s| {
                ops.iter()
                    .map(move |o| [s.clone(), vec![o.clone()]].concat())
            })
            .collect();
    }
    for sc in &scripts {
        check_stack(&s, 0, sc).unwrap();
    }
}

#[test]
fn add_rejects_mismatched_arity() {
    let a = stack_const(&Type::bool(), 1).unwrap();
    let b = stack_monomial(&Type::bool(), 1, 1).unwrap();
    assert!(matches!(stack_add(&a, &b), Err(CompleteError::Shape(_))));
    let c = stack_const(&Type::Unit, 1).unwrap();
    assert!(stack_add(&a, &c).is_err());
}

#[test]
fn polynomial_stacks() {
    for (cs, seed) in [
        (vec![2], 7),
        (vec![1, 1], 8),
        (vec![0, 0, 1], 9),
        (vec![2, 1, 1], 10),
    ] {
        let p = CostPoly::from_u64s(&cs);
        let s = stack_poly(&Type::bool(), &p).unwrap();
        assert_eq!(s.k, p.degree());
        assert_eq!(s.bound, p);
        exercise(&s, 0..=3, 10, seed);
    }
    let s = stack_poly(&Type::bool(), &CostPoly::from_u64s(&[2])).unwrap();
    assert_eq!(s.capacity(0), 2);
}

#[test]
fn broken_stack_is_caught() {
    // A pop that forgets to clear the slot keeps returning the same item.
    let good = stack_const(&Type::bool(), 1).unwrap();
    let a = Type::bool();
    let bad_pop = Closed::parse(
        "lam m . lam x1 . case x1 . | inj1 u => (m, (inj1 <>, inj1 <>)) | inj2 y => (m, (inj2 inj1 <>, inj2 y))",
        pop_type(&a, &good.impl_type, 0),
    )
    .unwrap();
    let mut bad = good;
    bad.pop = bad_pop;
    let sc = [StackOp::Push(DenValue::bool(true)), StackOp::Pop];
    let err = check_stack(&bad, 0, &sc).unwrap_err();
    assert_eq!(err.index, Some(1));
}

/// A step function on `D * D * L(1)` counting modulo `base * base`.
fn counter_step(base: usize) -> Closed {
    let d = finite_type(base).unwrap();
    let digits = Type::tensor(d.clone(), d);
    let inc = encode_function(&digits, &digits, &|v| {
        let (hi, lo) = v.unpair();
        let (hi, lo) = (
            finite_index(base, &hi).unwrap(),
            finite_index(base, &lo).unwrap(),
        );
        let next = (hi * base + lo + 1) % (base * base);
        DenValue::pair(finite_den(base, next / base), finite_den(base, next % base))
    })
    .unwrap();
    let t = Type::tensor(digits, Type::nat());
    Closed::parse(
        &format!("lam p . letp (x, n) = p in ({} x, n)", inc.src()),
        Type::arrow(t.clone(), t),
    )
    .unwrap()
}

fn count(f: &Closed, base: usize, n: usize) -> usize {
    let zero = DenValue::pair(finite_den(base, 0), finite_den(base, 0));
    let (x, m) = f
        .den()
        .apply(DenValue::pair(zero, DenValue::nat(n)))
        .unpair();
    assert_eq!(m, DenValue::nat(n));
    let (hi, lo) = x.unpair();
    finite_index(base, &hi).unwrap() * base + finite_index(base, &lo).unwrap()
}

#[test]
fn sharp_iterates_length_times() {
    let f = counter_step(2);
    let s = iter_sharp(&f).unwrap();
    for n in 0..=6 {
        assert_eq!(count(&s, 2, n), n % 4);
    }
}

#[test]
fn iter_poly_counting_law() {
    let f = counter_step(8);
    for cs in [
        vec![0],
        vec![1],
        vec![3],
        vec![0, 1],
        vec![1, 2],
        vec![0, 0, 1],
        vec![1, 0, 2],
        vec![2, 1, 1],
    ] {
        let p = CostPoly::from_u64s(&cs);
        let g = iter_poly(&f, &p).unwrap();
        for n in 0..=5 {
            assert_eq!(count(&g, 8, n) as u64, p.eval_u64(n as u64), "{p} at {n}");
        }
    }
    assert_eq!(
        count(
            &iter_poly(&f, &CostPoly::from_u64s(&[1, 0, 2])).unwrap(),
            8,
            3
        ),
        19
    );
}

#[test]
fn iter_rejects_bad_type() {
    let not = Closed::parse("lam x . x", Type::arrow(Type::bool(), Type::bool())).unwrap();
    assert!(iter_sharp(&not).is_err());
}

const BITFLIP: &str = include_str!("../../../../corpus/bitflip.tm");
const IDENTITY: &str = include_str!("../../../../corpus/identity.tm");
const PARITY: &str = include_str!("../../../../corpus/parity.tm");
const ERASE: &str = include_str!("../../../../corpus/parity_erasure.tm");

#[test]
fn tm_parsing() {
    let tm = parse_tm(BITFLIP).unwrap();
    assert_eq!(tm.alphabet, vec!["0", "1"]);
    assert_eq!(tm.output, Output::Right);
    let missing = BITFLIP
        .lines()
        .filter(|l| !l.starts_with("q1,_"))
        .collect::<Vec<_>>()
        .join("\n");
    let err = parse_tm(&missing).unwrap_err().to_string();
    assert!(err.contains("missing transition for (q1, _)"), "{err}");
    assert!(parse_tm("states: a\nalphabet: x\nbound: 1\na,x -> b,x,R").is_err());
}

#[test]
fn host_simulator() {
    let tm = parse_tm(BITFLIP).unwrap();
    assert_eq!(
        tm.output(&[0, 1, 1]).unwrap(),
        vec![Some(1), Some(0), Some(0)]
    );
    assert_eq!(tm.output(&[]).unwrap(), vec![]);
    let id = parse_tm(IDENTITY).unwrap();
    assert_eq!(id.output(&[1, 0]).unwrap(), vec![Some(1), Some(0)]);
    let er = parse_tm(ERASE).unwrap();
    assert_eq!(er.list_output(&[0, 1, 1, 0, 1]).unwrap(), vec![0, 1, 1]);
    let par = parse_tm(PARITY).unwrap();
    assert_eq!(par.list_output(&[0, 0, 0]).unwrap(), vec![0]);
    assert_eq!(par.list_output(&[0, 0]).unwrap(), vec![]);
    for tm in [&tm, &id, &er, &par] {
        for x in tm.inputs(6) {
            tm.run(&x).unwrap();
            assert!(tm.list_output(&x).unwrap().len() <= x.len());
        }
    }
}

#[test]
fn budget_inequality() {
    for src in [BITFLIP, IDENTITY, PARITY, ERASE] {
        let tm = parse_tm(src).unwrap();
        let k = tm.budget().degree() as u64;
        for n in 0..=50u64 {
            let m = n / (k + 1);
            assert!(tm.tape_bound().eval_u64(m) >= tm.budget().eval_u64(n) + n);
        }
    }
}

#[test]
fn compiled_bitflip() {
    let tm = parse_tm(BITFLIP).unwrap();
    let c = compile_tm(&tm).unwrap();
    assert_eq!(c.test_all(4), Vec::<String>::new());
}

#[test]
fn compiled_tms_match_the_simulator() {
    for src in [IDENTITY, PARITY, ERASE] {
        let tm = parse_tm(src).unwrap();
        let c = compile_tm(&tm).unwrap();
        assert_eq!(c.test_all(4), Vec::<String>::new());
    }
}

#[test]
fn compiled_list_variants() {
    for src in [BITFLIP, IDENTITY, PARITY, ERASE] {
        let tm = parse_tm(src).unwrap();
        let c = compile_tm_listout(&tm).unwrap();
        let sym = tm.symbol_type();
        assert_eq!(
            c.term.ty,
            Type::arrow(Type::list(sym.clone()), Type::list(sym))
        );
        assert_eq!(c.test_all(4), Vec::<String>::new());
    }
}

#[test]
fn compiled_empty_input() {
    let tm = parse_tm(BITFLIP).unwrap();
    let c = compile_tm(&tm).unwrap();
    let out = c.den_output(&[]);
    let items = c.stack.view(0, &out).unwrap();
    assert!(items.iter().all(|v| tm.decode_cell(v) == Some(None)));
}

#[test]
fn compiled_term_runs_operationally() {
    let tm = parse_tm(IDENTITY).unwrap();
    let c = compile_tm_listout(&tm).unwrap();
    let cm = CostModel::default();
    let Value::Lam(env, x, _, body) = eval(&Env::new(), &c.term.term, &cm).unwrap().value else {
        panic!("not a function")
    };
    let input = Value::list(vec![
        Value::bool(true),
        Value::bool(false),
        Value::bool(true),
    ]);
    let env = env.extend(&[(x, input.clone())]);
    let r = eval(&env, &body, &cm).unwrap();
    assert_eq!(r.value, input);
}
