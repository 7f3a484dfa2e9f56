use std::rc::Rc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::values::random_value;
use crate::eval::{Env, Value};
use crate::syntax::{build as b, Name, Side, Term, Type};
use crate::typecheck::{check, Ctx, TypedTerm};

/// A random well-typed open term with a matching environment.
#[derive(Clone, Debug)]
pub struct Sample {
    pub ctx: Vec<(Name, Type)>,
    pub env: Env,
    pub source: Term,
    pub term: TypedTerm,
}

type Pool = Vec<(Name, Type)>;

struct Gen<'r, R> {
    rng: &'r mut R,
    next: usize,
}

#[derive(Clone, Copy)]
enum Move {
    Var,
    Elim,
    Intro,
    Redex,
}

impl<R: Rng> Gen<'_, R> {
    fn fresh(&mut self, base: &str) -> Name {
        self.next += 1;
        Rc::from(format!("{base}{}", self.next))
    }

    fn take(&mut self, pool: &mut Pool, ty: &Type) -> Option<Rc<Term>> {
        let idx: Vec<usize> = (0..pool.len()).filter(|&i| pool[i].1 == *ty).collect();
        let &i = idx.choose(self.rng)?;
        let (x, _) = pool.remove(i);
        Some(b::var(&x))
    }

    fn term(&mut self, ty: &Type, pool: &mut Pool, depth: usize) -> Option<Rc<Term>> {
        let mut moves = vec![Move::Var, Move::Var, Move::Intro, Move::Intro];
        if depth > 0 {
            moves.extend([Move::Elim, Move::Elim, Move::Elim, Move::Redex]);
        }
        moves.shuffle(self.rng);
        for mv in moves {
            let saved = pool.clone();
            let next = self.next;
            let out = match mv {
                Move::Var => self.take(pool, ty),
                Move::Elim => self.elim(ty, pool, depth - 1),
                Move::Intro => self.intro(ty, pool, depth.saturating_sub(1)),
                Move::Redex => self.redex(ty, pool, depth - 1),
            };
            if out.is_some() {
                return out;
            }
            *pool = saved;
            self.next = next;
        }
        None
    }

    /// Runs `f` with `binders` in scope and drops whichever are left over.
    fn scoped<T>(
        &mut self,
        pool: &mut Pool,
        binders: &[(Name, Type)],
        f: impl FnOnce(&mut Self, &mut Pool) -> Option<T>,
    ) -> Option<T> {
        pool.extend(binders.iter().cloned());
        let out = f(self, pool);
        pool.retain(|(x, _)| binders.iter().all(|(y, _)| y != x));
        out
    }

    /// Two branches that share the pool; afterwards only what neither used
    /// remains.
    fn branches(
        &mut self,
        pool: &mut Pool,
        left: (&[(Name, Type)], &Type, usize),
        right: (&[(Name, Type)], &Type, usize),
    ) -> Option<(Rc<Term>, Rc<Term>)> {
        let mut p1 = pool.clone();
        let l = self.scoped(&mut p1, left.0, |g, p| g.term(left.1, p, left.2))?;
        let mut p2 = pool.clone();
        let r = self.scoped(&mut p2, right.0, |g, p| g.term(right.1, p, right.2))?;
        pool.retain(|(x, _)| p1.iter().any(|(y, _)| y == x) && p2.iter().any(|(y, _)| y == x));
        Some((l, r))
    }

    fn elim(&mut self, ty: &Type, pool: &mut Pool, depth: usize) -> Option<Rc<Term>> {
        let idx: Vec<usize> = (0..pool.len())
            .filter(|&i| match &pool[i].1 {
                Type::Diamond | Type::Unit => false,
                Type::Arrow(_, c) => **c == *ty,
                Type::Prod(l, r) => **l == *ty || **r == *ty,
                _ => true,
            })
            .collect();
        let &i = idx.choose(self.rng)?;
        let (x, xty) = pool.remove(i);
        let s = b::var(&x);
        match &xty {
            Type::Tensor(l, r) => {
                let (y, z) = (self.fresh("p"), self.fresh("q"));
                let binders = [(y.clone(), (**l).clone()), (z.clone(), (**r).clone())];
                let body = self.scoped(pool, &binders, |g, p| g.term(ty, p, depth))?;
                Some(b::letp(s, &y, &z, body))
            }
            Type::Sum(l, r) => {
                let (y, z) = (self.fresh("l"), self.fresh("r"));
                let (m, n) = self.branches(
                    pool,
                    (&[(y.clone(), (**l).clone())], ty, depth),
                    (&[(z.clone(), (**r).clone())], ty, depth),
                )?;
                Some(b::case(s, &y, m, &z, n))
            }
            Type::List(e) => {
                let nil_case = self.term(ty, pool, depth)?;
                let (d, h, t) = (self.fresh("d"), self.fresh("h"), self.fresh("t"));
                let mut inner = vec![
                    (d.clone(), Type::Diamond),
                    (h.clone(), (**e).clone()),
                    (t.clone(), ty.clone()),
                ];
                let step = self.term(ty, &mut inner, depth)?;
                Some(b::rec(s, nil_case, &d, &h, &t, step))
            }
            Type::Tree(e) => {
                let leaf_case = self.term(ty, &mut Vec::new(), depth)?;
                let (d, y, l, r) = (
                    self.fresh("d"),
                    self.fresh("x"),
                    self.fresh("l"),
                    self.fresh("r"),
                );
                let mut inner = vec![
                    (d.clone(), Type::Diamond),
                    (y.clone(), (**e).clone()),
                    (l.clone(), ty.clone()),
                    (r.clone(), ty.clone()),
                ];
                let step = self.term(ty, &mut inner, depth)?;
                Some(b::trec(s, leaf_case, &d, &y, &l, &r, step))
            }
            Type::Stack(e) => {
                let (h, t) = (self.fresh("h"), self.fresh("t"));
                let (m, n) = self.branches(
                    pool,
                    (&[], ty, depth),
                    (
                        &[(h.clone(), (**e).clone()), (t.clone(), xty.clone())],
                        ty,
                        depth,
                    ),
                )?;
                Some(b::pop(s, m, &h, &t, n))
            }
            Type::Arrow(a, _) => {
                let arg = self.term(a, pool, depth)?;
                Some(b::app(s, arg))
            }
            Type::Prod(l, r) => {
                let side = match (**l == *ty, **r == *ty) {
                    (true, true) if self.rng.gen() => Side::Right,
                    (true, _) => Side::Left,
                    _ => Side::Right,
                };
                Some(b::proj(side, s))
            }
            Type::Diamond | Type::Unit => None,
        }
    }

    fn intro(&mut self, ty: &Type, pool: &mut Pool, depth: usize) -> Option<Rc<Term>> {
        match ty {
            Type::Diamond => None,
            Type::Unit => Some(b::null()),
            Type::Sum(l, r) => {
                let (side, first, second) = if self.rng.gen() {
                    (Side::Left, l, r)
                } else {
                    (Side::Right, r, l)
                };
                let inner = match self.term(first, pool, depth) {
                    Some(m) => return Some(b::inj(side, m)),
                    None => self.term(second, pool, depth)?,
                };
                Some(b::inj(side.flip(), inner))
            }
            Type::Tensor(l, r) => {
                let m = self.term(l, pool, depth)?;
                let n = self.term(r, pool, depth)?;
                Some(b::pair(m, n))
            }
            Type::Arrow(a, c) => {
                let x = self.fresh("x");
                let body = self.scoped(pool, &[(x.clone(), (**a).clone())], |g, p| {
                    g.term(c, p, depth)
                })?;
                Some(b::lam(&x, body))
            }
            Type::Prod(l, r) => {
                let (m, n) = self.branches(pool, (&[], l, depth), (&[], r, depth))?;
                Some(b::record(m, n))
            }
            Type::List(e) => {
                if self.rng.gen_bool(0.6) {
                    if let Some(d) = self.take(pool, &Type::Diamond) {
                        let h = self.term(e, pool, depth)?;
                        let t = self.term(ty, pool, depth)?;
                        return Some(b::cons(d, h, t));
                    }
                }
                Some(b::nil())
            }
            Type::Stack(e) => {
                if depth > 0 && self.rng.gen_bool(0.5) {
                    let h = self.term(e, pool, depth)?;
                    let t = self.term(ty, pool, depth)?;
                    return Some(b::push(h, t));
                }
                Some(b::empty())
            }
            Type::Tree(e) => {
                if self.rng.gen_bool(0.5) {
                    if let Some(d) = self.take(pool, &Type::Diamond) {
                        let x = self.term(e, pool, depth)?;
                        let l = self.term(ty, pool, depth)?;
                        let r = self.term(ty, pool, depth)?;
                        return Some(b::node(d, x, l, r));
                    }
                }
                Some(b::leaf())
            }
        }
    }

    /// `(fun x -> M : A -o B) N`, which exercises annotation and beta.
    fn redex(&mut self, ty: &Type, pool: &mut Pool, depth: usize) -> Option<Rc<Term>> {
        let a = SMALL_TYPES.choose(self.rng)?();
        let fty = Type::arrow(a.clone(), ty.clone());
        let f = self.intro(&fty, pool, depth)?;
        let arg = self.term(&a, pool, depth)?;
        Some(b::app(b::ann(f, fty), arg))
    }
}

const SMALL_TYPES: &[fn() -> Type] = &[
    || Type::Unit,
    Type::bool,
    || Type::list(Type::Unit),
    || Type::list(Type::bool()),
    || Type::tensor(Type::bool(), Type::list(Type::Unit)),
];

const CTX_TYPES: &[fn() -> Type] = &[
    || Type::Diamond,
    || Type::Diamond,
    || Type::Unit,
    Type::bool,
    || Type::list(Type::Unit),
    || Type::list(Type::bool()),
    || Type::stack(Type::bool()),
    || Type::tree(Type::Unit),
    || Type::tensor(Type::bool(), Type::list(Type::Unit)),
    || Type::sum(Type::list(Type::Unit), Type::Unit),
];

const GOAL_TYPES: &[fn() -> Type] = &[
    || Type::Unit,
    Type::bool,
    || Type::list(Type::Unit),
    || Type::list(Type::bool()),
    || Type::list(Type::tensor(Type::Diamond, Type::bool())),
    || Type::stack(Type::bool()),
    || Type::tree(Type::Unit),
    || Type::tensor(Type::list(Type::Unit), Type::bool()),
    || Type::sum(Type::list(Type::Unit), Type::bool()),
    || Type::prod(Type::list(Type::Unit), Type::bool()),
    || Type::arrow(Type::list(Type::Unit), Type::list(Type::Unit)),
    || Type::arrow(Type::bool(), Type::bool()),
    || {
        Type::arrow(
            Type::arrow(Type::bool(), Type::bool()),
            Type::arrow(Type::bool(), Type::bool()),
        )
    },
];

/// A random term of type `ty` over the affine context `ctx`, built only
/// from well-typed moves. Returns `None` when no term was found, which is
/// always the case for a closed term of type ◆.
pub fn gen_term<R: Rng>(
    rng: &mut R,
    ctx: &[(Name, Type)],
    ty: &Type,
    depth: usize,
) -> Option<Term> {
    let mut g = Gen { rng, next: 0 };
    let mut pool = ctx.to_vec();
    g.term(ty, &mut pool, depth).map(|t| (*t).clone())
}

/// Draws a context, environment and goal type, then a term, retrying until
/// the checker accepts. `rejected` counts generated terms the checker
/// refused.
pub fn random_sample<R: Rng>(rng: &mut R, rejected: &mut usize) -> Sample {
    loop {
        let n = rng.gen_range(0..=4);
        let ctx: Vec<(Name, Type)> = (0..n)
            .map(|i| (Rc::from(format!("v{i}")), CTX_TYPES.choose(rng).unwrap()()))
            .collect();
        let ty = GOAL_TYPES.choose(rng).unwrap()();
        let depth = rng.gen_range(1..=4);
        let Some(source) = gen_term(rng, &ctx, &ty, depth) else {
            continue;
        };
        let c = ctx
            .iter()
            .fold(Ctx::new(), |c, (x, t)| c.with(x, t.clone()));
        let term = match check(&c, &source, &ty) {
            Ok(t) => t,
            Err(_) => {
                *rejected += 1;
                continue;
            }
        };
        let env = Env::from_bindings(
            ctx.iter()
                .map(|(x, t)| (x.clone(), random_value(rng, t, 4).unwrap_or(Value::Null)))
                .collect(),
        );
        return Sample {
            ctx,
            env,
            source,
            term,
        };
    }
}

/// `count` samples from a fixed seed.
pub fn random_samples(seed: u64, count: usize) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rejected = 0;
    (0..count)
        .map(|_| random_sample(&mut rng, &mut rejected))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{env_has_types, eval, CostModel};

    #[test]
    fn generated_terms_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut rejected = 0;
        let samples: Vec<_> = (0..300)
            .map(|_| random_sample(&mut rng, &mut rejected))
            .collect();
        assert_eq!(rejected, 0);
        let big = samples.iter().filter(|s| s.source.size() > 6).count();
        assert!(big > 100, "only {big} non-trivial samples");
        for s in &samples {
            assert!(env_has_types(&s.env, &s.ctx));
            let r = eval(&s.env, &s.term, &CostModel::default()).unwrap();
            assert!(r.value.has_type(&s.term.ty));
        }
    }

    fn kinds(t: &Term, out: &mut std::collections::BTreeSet<&'static str>) {
        use crate::syntax::TermKind::*;
        out.insert(match &t.kind {
            Rec { .. } => "rec",
            TRec { .. } => "trec",
            Pop { .. } => "pop",
            Case { .. } => "case",
            LetPair { .. } => "letp",
            Cons(..) => "cons",
            Node(..) => "node",
            Record(..) => "record",
            Proj(..) => "proj",
            App(..) => "app",
            Lam(..) => "lam",
            Push(..) => "push",
            Ann(..) => "ann",
            _ => "other",
        });
        t.for_each_child(|c| kinds(c, out));
    }

    #[test]
    fn every_construct_appears() {
        let mut seen = std::collections::BTreeSet::new();
        for s in random_samples(11, 500) {
            kinds(&s.source, &mut seen);
        }
        for k in [
            "rec", "trec", "pop", "case", "letp", "cons", "node", "record", "proj", "app", "lam",
            "push", "ann",
        ] {
            assert!(seen.contains(k), "no {k} in 500 samples");
        }
    }

    #[test]
    fn no_closed_diamond() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for depth in 0..6 {
            for _ in 0..200 {
                assert!(gen_term(&mut rng, &[], &Type::Diamond, depth).is_none());
            }
        }
    }

    #[test]
    fn seeded_samples_repeat() {
        let a = random_samples(3, 20);
        let b = random_samples(3, 20);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.source, y.source);
            assert_eq!(x.env.bindings(), y.env.bindings());
        }
    }
}
