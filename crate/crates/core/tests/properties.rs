use lfpl::costpoly::verify_bound;
use lfpl::den::coherence_check;
use lfpl::eval::{eval, size_env, Const, CostModel};
use lfpl::harness::{gen_term, random_sample, Sample};
use lfpl::Type;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sample(seed: u64) -> Sample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_sample(&mut rng, &mut 0)
}

fn cost_model(costs: &[u64]) -> CostModel {
    Const::ALL
        .iter()
        .zip(costs)
        .fold(CostModel::uniform(0), |cm, (&c, &v)| cm.with(c, v))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bound_is_sound(seed in any::<u64>(), costs in proptest::collection::vec(0u64..4, 20)) {
        let s = sample(seed);
        let cm = cost_model(&costs);
        let n0 = size_env(&s.env.restrict(&s.term.uses));
        let rep = verify_bound(&s.env, &s.term, &cm, n0..=n0 + 5).unwrap();
        prop_assert!(rep.holds(), "{:?}", rep.violations().next());
    }

    #[test]
    fn result_never_outgrows_env(seed in any::<u64>()) {
        let s = sample(seed);
        let r = eval(&s.env, &s.term, &CostModel::default()).unwrap();
        prop_assert!(r.value.size() <= size_env(&s.env));
        prop_assert!(r.value.has_type(&s.term.ty));
    }

    #[test]
    fn env_order_is_irrelevant(seed in any::<u64>(), rot in 0usize..5) {
        let s = sample(seed);
        let len = s.env.len();
        let order: Vec<usize> = (0..len).map(|i| (i + rot) % len.max(1)).collect();
        let cm = CostModel::default();
        let a = eval(&s.env, &s.term, &cm).unwrap();
        let b = eval(&s.env.permuted(&order), &s.term, &cm).unwrap();
        prop_assert_eq!(a.value, b.value);
        prop_assert_eq!(a.cost, b.cost);
    }

    #[test]
    fn operational_agrees_with_denotational(seed in any::<u64>()) {
        let s = sample(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = coherence_check(&s.term, &s.env, &CostModel::default(), 8, &mut rng).unwrap();
        prop_assert!(r.is_ok(), "{:?}", r);
    }

    #[test]
    fn no_closed_diamond(seed in any::<u64>(), depth in 0usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert!(gen_term(&mut rng, &[], &Type::Diamond, depth).is_none());
    }
}
