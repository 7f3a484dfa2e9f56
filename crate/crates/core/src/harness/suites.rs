use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::corpus::corpus_defs;
use super::gen::{gen_term, random_sample};
use super::values::random_value;
use crate::complete::{
    check_stack, compile_tm, compile_tm_listout, iter_poly, parse_tm, stack_add, stack_const,
    stack_inductive, stack_poly, stack_weaken, Closed, StackImpl, StackOp,
};
use crate::complete::{encode_function, finite_den, finite_index, finite_type};
use crate::costpoly::{term_poly, verify_bound, CostPoly};
use crate::den::{coherence_check, DenValue};
use crate::eval::{eval, Const, CostModel, Env};
use crate::syntax::{print_term, Type};
use crate::typecheck::TypedTerm;

/// The bundled Turing machines, as `(file name, source)`.
pub const TM_CORPUS: &[(&str, &str)] = &[
    ("bitflip.tm", include_str!("../../../../corpus/bitflip.tm")),
    (
        "identity.tm",
        include_str!("../../../../corpus/identity.tm"),
    ),
    ("parity.tm", include_str!("../../../../corpus/parity.tm")),
    (
        "parity_erasure.tm",
        include_str!("../../../../corpus/parity_erasure.tm"),
    ),
];

pub const SUITES: &[&str] = &[
    "bound",
    "soundness",
    "nsi",
    "determinism",
    "coherence",
    "stacks",
    "iterate",
    "tm",
    "budget",
];

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub random_terms: usize,
    pub coherence_samples: usize,
    pub stack_scripts: usize,
    pub tm_max_len: usize,
}

impl Default for SuiteConfig {
    fn default() -> SuiteConfig {
        SuiteConfig {
            seed: 0x1f91,
            random_terms: 500,
            coherence_samples: 32,
            stack_scripts: 200,
            tm_max_len: 4,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub name: String,
    pub checked: usize,
    pub failures: Vec<String>,
    pub elapsed: Duration,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.checked > 0
    }
}

/// Runs one named suite; `None` for an unknown name.
pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Option<SuiteReport> {
    let start = Instant::now();
    let mut r = Report::default();
    match name {
        "bound" => bound(&mut r),
        "soundness" => soundness(cfg, &mut r),
        "nsi" => nsi(cfg, &mut r),
        "determinism" => determinism(cfg, &mut r),
        "coherence" => coherence(cfg, &mut r),
        "stacks" => stacks(cfg, &mut r),
        "iterate" => iterate(&mut r),
        "tm" => tm(cfg, &mut r),
        "budget" => budget(&mut r),
        _ => return None,
    }
    Some(SuiteReport {
        name: name.to_string(),
        checked: r.checked,
        failures: r.failures,
        elapsed: start.elapsed(),
    })
}

pub fn run_all(cfg: &SuiteConfig) -> Vec<SuiteReport> {
    SUITES.iter().filter_map(|s| run_suite(s, cfg)).collect()
}

#[derive(Default)]
struct Report {
    checked: usize,
    failures: Vec<String>,
}

impl Report {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(msg());
        }
    }

    fn result<E: std::fmt::Display>(&mut self, r: Result<(), E>, label: impl FnOnce() -> String) {
        self.checked += 1;
        if let Err(e) = r {
            self.failures.push(format!("{}: {e}", label()));
        }
    }
}

/// A term under an environment, from the corpus or the generator.
struct Case {
    label: String,
    env: Env,
    term: TypedTerm,
}

fn population(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Vec<Case> {
    let mut out = Vec::new();
    for d in corpus_defs() {
        out.push(Case {
            label: format!("{}:{}", d.file, d.name),
            env: Env::new(),
            term: d.term.clone(),
        });
        let Some((ctx, term)) = d.applied() else {
            continue;
        };
        let (x, ty) = ctx.entries()[0].clone();
        for _ in 0..3 {
            let Some(v) = random_value(rng, &ty, 5) else {
                break;
            };
            out.push(Case {
                label: format!("{}:{} {v}", d.file, d.name),
                env: Env::from_bindings(vec![(x.clone(), v)]),
                term: term.clone(),
            });
        }
    }
    let mut rejected = 0;
    for i in 0..cfg.random_terms {
        let s = random_sample(rng, &mut rejected);
        let env = s
            .env
            .bindings()
            .iter()
            .map(|(x, v)| format!("{x} = {v}"))
            .collect::<Vec<_>>()
            .join(", ");
        out.push(Case {
            label: format!("random #{i} [{env}] {}", print_term(&s.source)),
            env: s.env,
            term: s.term,
        });
    }
    out
}

fn random_cost_model<R: Rng>(rng: &mut R) -> CostModel {
    Const::ALL.iter().fold(CostModel::uniform(0), |cm, &c| {
        cm.with(c, rng.gen_range(0..=3))
    })
}

fn bound(r: &mut Report) {
    let cm = CostModel::paper_example();
    let Some((ctx, term)) = corpus_defs()
        .into_iter()
        .find(|d| d.file == "reverse.lfpl" && d.name == "reverse")
        .and_then(|d| d.applied())
    else {
        r.check(false, || "reverse is missing from the corpus".into());
        return;
    };
    let p = term_poly(&term, &cm).to_string();
    r.check(p == "4 + 2*n", || format!("bound printed as {p}"));
    let x = ctx.entries()[0].0.clone();
    for n in 0..=10usize {
        let env = Env::from_bindings(vec![(x.clone(), crate::eval::Value::nat(n))]);
        match eval(&env, &term, &cm) {
            Ok(res) => r.check(res.cost <= 2 * n as u64 + 4, || {
                format!("reverse at length {n} cost {}", res.cost)
            }),
            Err(e) => r.check(false, || format!("reverse at length {n}: {e}")),
        }
    }
}

fn soundness(cfg: &SuiteConfig, r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for c in population(cfg, &mut rng) {
        let models = [
            CostModel::default(),
            CostModel::paper_example(),
            random_cost_model(&mut rng),
        ];
        for cm in &models {
            let size = crate::eval::size_env(&c.env.restrict(&c.term.uses));
            match verify_bound(&c.env, &c.term, cm, size..=size + 5) {
                Ok(rep) => r.check(rep.holds(), || {
                    let v = rep.violations().next().unwrap();
                    format!(
                        "{}: at n = {} cost {} + value {} exceeds {} + {}",
                        c.label, v.n, v.cost, v.value_poly, v.term_poly, v.env_poly
                    )
                }),
                Err(e) => r.check(false, || format!("{}: {e}", c.label)),
            }
        }
    }
}

fn nsi(cfg: &SuiteConfig, r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for c in population(cfg, &mut rng) {
        match eval(&c.env, &c.term, &CostModel::default()) {
            Ok(res) => {
                let (v, e) = (res.value.size(), crate::eval::size_env(&c.env));
                r.check(v <= e, || format!("{}: |v| = {v} but |env| = {e}", c.label));
            }
            Err(e) => r.check(false, || format!("{}: {e}", c.label)),
        }
    }
    for depth in 0..=5 {
        for _ in 0..50 {
            let t = gen_term(&mut rng, &[], &Type::Diamond, depth);
            r.check(t.is_none(), || {
                format!("generated closed diamond {}", print_term(&t.unwrap()))
            });
        }
    }
}

fn determinism(cfg: &SuiteConfig, r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for c in population(cfg, &mut rng) {
        let cm = random_cost_model(&mut rng);
        let mut order: Vec<usize> = (0..c.env.len()).collect();
        order.shuffle(&mut rng);
        let a = eval(&c.env, &c.term, &cm);
        let b = eval(&c.env.permuted(&order), &c.term, &cm);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                r.check(a.value == b.value && a.cost == b.cost, || {
                    format!(
                        "{}: {} at cost {} vs {} at cost {} after permuting",
                        c.label, a.value, a.cost, b.value, b.cost
                    )
                });
                r.check(a.value.has_type(&c.term.ty), || {
                    format!("{}: {} does not have type {}", c.label, a.value, c.term.ty)
                });
            }
            (Err(e), _) | (_, Err(e)) => r.check(false, || format!("{}: {e}", c.label)),
        }
    }
}

fn coherence(cfg: &SuiteConfig, r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let cm = CostModel::default();
    for c in population(cfg, &mut rng) {
        match coherence_check(&c.term, &c.env, &cm, cfg.coherence_samples, &mut rng) {
            Ok(res) => r.result(res, || c.label.clone()),
            Err(e) => r.check(false, || format!("{}: {e}", c.label)),
        }
    }
}

fn stack_constructions() -> Result<Vec<StackImpl>, String> {
    let a = Type::bool();
    let e = |e: crate::complete::CompleteError| e.to_string();
    let mut out = Vec::new();
    for c in 0..=3 {
        out.push(stack_const(&a, c).map_err(e)?);
    }
    let one = stack_const(&a, 1).map_err(e)?;
    let two = stack_const(&a, 2).map_err(e)?;
    let ind1 = stack_inductive(&one).map_err(e)?;
    out.push(ind1.clone());
    out.push(stack_inductive(&two).map_err(e)?);
    out.push(stack_inductive(&ind1).map_err(e)?);
    out.push(stack_weaken(&two).map_err(e)?);
    out.push(stack_weaken(&ind1).map_err(e)?);
    out.push(stack_add(&one, &two).map_err(e)?);
    out.push(stack_add(&ind1, &stack_weaken(&one).map_err(e)?).map_err(e)?);
    for cs in [&[2][..], &[1, 1], &[0, 0, 1], &[2, 1, 1]] {
        out.push(stack_poly(&a, &CostPoly::from_u64s(cs)).map_err(e)?);
    }
    Ok(out)
}

fn stacks(cfg: &SuiteConfig, r: &mut Report) {
    let imps = match stack_constructions() {
        Ok(s) => s,
        Err(e) => return r.check(false, || e),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let item = |i: usize| DenValue::bool(i % 3 != 1);
    for imp in &imps {
        for n in 0..=4u64 {
            let cap = imp.capacity(n) as usize;
            let fill: Vec<StackOp> = (0..=cap).map(|i| StackOp::Push(item(i))).collect();
            let mut drain = fill.clone();
            drain.extend(vec![StackOp::Pop; cap + 2]);
            let mut scripts = vec![vec![StackOp::Pop], fill, drain];
            for _ in 0..cfg.stack_scripts {
                let len = rng.gen_range(0..=8);
                scripts.push(
                    (0..len)
                        .map(|_| {
                            if rng.gen_bool(0.6) {
                                StackOp::Push(item(rng.gen_range(0..3)))
                            } else {
                                StackOp::Pop
                            }
                        })
                        .collect(),
                );
            }
            for s in &scripts {
                r.result(check_stack(imp, n, s), || {
                    let ops: Vec<String> = s.iter().map(|o| o.to_string()).collect();
                    format!("{} at n = {n} [{}]", imp.label, ops.join("; "))
                });
            }
        }
    }
}

/// A step on `D * D * L(1)` counting modulo `base * base`.
fn counter_step(base: usize) -> Result<Closed, String> {
    let d = finite_type(base).ok_or("empty digit type")?;
    let digits = Type::tensor(d.clone(), d);
    let inc = encode_function(&digits, &digits, &|v| {
        let (hi, lo) = v.unpair();
        let hi = finite_index(base, &hi).unwrap_or(0);
        let lo = finite_index(base, &lo).unwrap_or(0);
        let next = (hi * base + lo + 1) % (base * base);
        DenValue::pair(finite_den(base, next / base), finite_den(base, next % base))
    })
    .map_err(|e| e.to_string())?;
    let t = Type::tensor(digits, Type::nat());
    Closed::parse(
        &format!("lam p . letp (x, n) = p in ({} x, n)", inc.src()),
        Type::arrow(t.clone(), t),
    )
    .map_err(|e| e.to_string())
}

fn iterate(r: &mut Report) {
    let base = 8;
    let f = match counter_step(base) {
        Ok(f) => f,
        Err(e) => return r.check(false, || e),
    };
    let zero = DenValue::pair(finite_den(base, 0), finite_den(base, 0));
    let polys: [&[u64]; 9] = [
        &[0],
        &[1],
        &[3],
        &[0, 1],
        &[1, 2],
        &[0, 0, 1],
        &[1, 0, 2],
        &[2, 1, 1],
        &[0, 3, 1],
    ];
    for cs in polys {
        let p = CostPoly::from_u64s(cs);
        let g = match iter_poly(&f, &p) {
            Ok(g) => g.den(),
            Err(e) => {
                r.check(false, || format!("{p}: {e}"));
                continue;
            }
        };
        for n in 0..=5usize {
            let (x, m) = g
                .apply(DenValue::pair(zero.clone(), DenValue::nat(n)))
                .unpair();
            let (hi, lo) = x.unpair();
            let count = finite_index(base, &hi).zip(finite_index(base, &lo));
            let want = p.eval_u64(n as u64) as usize;
            r.check(
                m == DenValue::nat(n) && count.map(|(h, l)| h * base + l) == Some(want),
                || format!("{p} at n = {n}: counted {count:?}, expected {want}"),
            );
        }
    }
}

fn tm(cfg: &SuiteConfig, r: &mut Report) {
    for (file, src) in TM_CORPUS {
        let spec = match parse_tm(src) {
            Ok(s) => s,
            Err(e) => {
                r.check(false, || format!("{file}: {e}"));
                continue;
            }
        };
        for (variant, compiled) in [
            ("stack", compile_tm(&spec)),
            ("list", compile_tm_listout(&spec)),
        ] {
            match compiled {
                Ok(c) => {
                    for x in spec.inputs(cfg.tm_max_len) {
                        r.result(c.check_input(&x), || format!("{file} ({variant} output)"));
                    }
                }
                Err(e) => r.check(false, || format!("{file} ({variant} output): {e}")),
            }
        }
    }
}

fn budget(r: &mut Report) {
    let mut polys: Vec<CostPoly> = TM_CORPUS
        .iter()
        .filter_map(|(_, src)| parse_tm(src).ok())
        .map(|s| s.bound)
        .collect();
    for cs in [
        &[0][..],
        &[1],
        &[5],
        &[0, 1],
        &[3, 2],
        &[0, 0, 1],
        &[1, 2, 3],
        &[0, 0, 0, 1],
    ] {
        polys.push(CostPoly::from_u64s(cs));
    }
    for bound in polys {
        let spec = crate::complete::TmSpec {
            states: Vec::new(),
            alphabet: vec!["a".into()],
            delta: Vec::new(),
            bound,
            output: crate::complete::Output::Right,
        };
        let (p, pp) = (spec.budget(), spec.tape_bound());
        let k1 = p.degree() as u64 + 1;
        for n in 0..=50u64 {
            let (have, need) = (pp.eval(n / k1), p.eval(n) + n);
            r.check(have >= need, || {
                format!("P = {p}: P'({}) = {have} < P({n}) + {n} = {need}", n / k1)
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite() {
        assert!(run_suite("nope", &SuiteConfig::default()).is_none());
    }

    #[test]
    fn quick_suites_pass() {
        let cfg = SuiteConfig {
            random_terms: 40,
            coherence_samples: 4,
            stack_scripts: 5,
            tm_max_len: 2,
            ..SuiteConfig::default()
        };
        for name in SUITES {
            let rep = run_suite(name, &cfg).unwrap();
            assert!(rep.passed(), "{name}: {:?}", rep.failures);
        }
    }
}
