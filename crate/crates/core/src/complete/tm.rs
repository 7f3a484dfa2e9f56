use std::fmt;

use super::encode::{encode_function, encode_value, finite_den, finite_index, finite_type};
use super::iterate::{iter_poly, iter_sharp};
use super::stack::{stack_poly_at, StackImpl};
use super::stdlib::{divmod_term, join_term, lunfold, reverse};
use super::{Closed, CompleteError};
use crate::costpoly::CostPoly;
use crate::den::DenValue;
use crate::syntax::{Side, Type};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dir {
    Left,
    Right,
}

/// Which half of the final tape, read outward from the head, is the result.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Output {
    Right,
    Left,
}

/// `None` stands for the halting state or the blank symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Transition {
    pub next: Option<usize>,
    pub write: Option<usize>,
    pub dir: Dir,
}

#[derive(Clone, Debug)]
pub struct TmSpec {
    /// Non-halting states; the first one is initial. With no states the
    /// machine halts immediately.
    pub states: Vec<String>,
    /// Non-blank symbols.
    pub alphabet: Vec<String>,
    /// `delta[q][c]` with `c = 0` for blank and `c = i + 1` for symbol `i`.
    pub delta: Vec<Vec<Transition>>,
    pub bound: CostPoly,
    pub output: Output,
}

/// Result of a host-level run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TmRun {
    pub steps: u64,
    /// The output half of the tape read outward from the head, including
    /// the head cell, untrimmed.
    pub tape: Vec<Option<usize>>,
}

fn tm_err(line: usize, msg: impl fmt::Display) -> CompleteError {
    CompleteError::Tm(format!("line {line}: {msg}"))
}

/// Parses the line-oriented `.tm` format.
pub fn parse_tm(src: &str) -> Result<TmSpec, CompleteError> {
    let mut states: Option<Vec<String>> = None;
    let mut alphabet: Option<Vec<String>> = None;
    let mut bound = None;
    let mut output = Output::Right;
    let mut rules = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split("--").next().unwrap_or("");
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some((lhs, rhs)) = line.split_once("->") {
            rules.push((line_no, lhs.trim().to_string(), rhs.trim().to_string()));
            continue;
        }
        let Some((key, value)) = line.split_once(':') else {
            return Err(tm_err(line_no, format!("cannot read `{line}`")));
        };
        let words: Vec<String> = value.split_whitespace().map(String::from).collect();
        match key.trim() {
            "states" => states = Some(words),
            "alphabet" => alphabet = Some(words),
            "bound" => {
                let cs = words
                    .iter()
                    .map(|w| w.parse::<u64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| tm_err(line_no, "bound coefficients must be naturals"))?;
                if cs.is_empty() {
                    return Err(tm_err(line_no, "empty bound"));
                }
                bound = Some(CostPoly::from_u64s(&cs));
            }
            "out" => {
                output = match value.trim() {
                    "right" => Output::Right,
                    "left" => Output::Left,
                    other => return Err(tm_err(line_no, format!("unknown output side `{other}`"))),
                }
            }
            other => return Err(tm_err(line_no, format!("unknown key `{other}`"))),
        }
    }
    let states = states.ok_or_else(|| CompleteError::Tm("missing `states:` line".into()))?;
    let alphabet = alphabet.ok_or_else(|| CompleteError::Tm("missing `alphabet:` line".into()))?;
    let bound = bound.ok_or_else(|| CompleteError::Tm("missing `bound:` line".into()))?;
    if alphabet.is_empty() {
        return Err(CompleteError::Tm(
            "the alphabet needs at least one symbol".into(),
        ));
    }
    for (what, names) in [("state", &states), ("symbol", &alphabet)] {
        for (i, a) in names.iter().enumerate() {
            if names[..i].contains(a) || a == "_" || a == "HALT" {
                return Err(CompleteError::Tm(format!("bad or repeated {what} `{a}`")));
            }
        }
    }
    let state_of = |s: &str, line| match s {
        "HALT" => Ok(None),
        _ => states
            .iter()
            .position(|q| q == s)
            .map(Some)
            .ok_or_else(|| tm_err(line, format!("unknown state `{s}`"))),
    };
    let cell_of = |s: &str, line| match s {
        "_" => Ok(0),
        _ => alphabet
            .iter()
            .position(|a| a == s)
            .map(|i| i + 1)
            .ok_or_else(|| tm_err(line, format!("unknown symbol `{s}`"))),
    };
    let mut table = vec![vec![None; alphabet.len() + 1]; states.len()];
    for (line, lhs, rhs) in rules {
        let l: Vec<&str> = lhs.split(',').map(str::trim).collect();
        let r: Vec<&str> = rhs.split(',').map(str::trim).collect();
        let ([q, c], [q2, c2, d]) = (&l[..], &r[..]) else {
            return Err(tm_err(line, "expected `q,s -> q',s',L|R`"));
        };
        let q = state_of(q, line)?.ok_or_else(|| tm_err(line, "HALT has no transitions"))?;
        let c = cell_of(c, line)?;
        let dir = match *d {
            "L" => Dir::Left,
            "R" => Dir::Right,
            other => return Err(tm_err(line, format!("unknown direction `{other}`"))),
        };
        let t = Transition {
            next: state_of(q2, line)?,
            write: cell_of(c2, line)?.checked_sub(1),
            dir,
        };
        if table[q][c].replace(t).is_some() {
            return Err(tm_err(line, "duplicate transition"));
        }
    }
    let mut delta = Vec::new();
    for (q, row) in table.into_iter().enumerate() {
        let mut out = Vec::new();
        for (c, t) in row.into_iter().enumerate() {
            let sym = if c == 0 { "_" } else { &alphabet[c - 1] };
            out.push(t.ok_or_else(|| {
                CompleteError::Tm(format!("missing transition for ({}, {sym})", states[q]))
            })?);
        }
        delta.push(out);
    }
    Ok(TmSpec {
        states,
        alphabet,
        delta,
        bound,
        output,
    })
}

impl TmSpec {
    /// `A`: the non-blank symbols.
    pub fn symbol_type(&self) -> Type {
        finite_type(self.alphabet.len()).expect("nonempty alphabet")
    }

    /// `1 + A`: tape cells, blank on the left.
    pub fn cell_type(&self) -> Type {
        Type::sum(Type::Unit, self.symbol_type())
    }

    /// `1 + Q`, or `1` when only the halting state exists.
    pub fn status_type(&self) -> Type {
        match finite_type(self.states.len()) {
            Some(q) => Type::sum(Type::Unit, q),
            None => Type::Unit,
        }
    }

    /// The polynomial actually budgeted: a zero bound is lifted to `1`.
    pub fn budget(&self) -> CostPoly {
        if self.bound.is_zero() {
            CostPoly::constant(1)
        } else {
            self.bound.clone()
        }
    }

    /// `P'(m) = (k+1)(m+1) + P((k+1)(m+1))` with `k = deg P`.
    pub fn tape_bound(&self) -> CostPoly {
        let p = self.budget();
        let k1 = p.degree() as u64 + 1;
        let lin = CostPoly::from_u64s(&[k1, k1]);
        lin.add(&p.compose(&lin))
    }

    pub fn symbol_den(&self, i: usize) -> DenValue {
        finite_den(self.alphabet.len(), i)
    }

    pub fn cell_den(&self, c: Option<usize>) -> DenValue {
        match c {
            None => DenValue::inj(Side::Left, DenValue::Star),
            Some(i) => DenValue::inj(Side::Right, self.symbol_den(i)),
        }
    }

    pub fn decode_cell(&self, v: &DenValue) -> Option<Option<usize>> {
        match v {
            DenValue::Inj(Side::Left, u) if **u == DenValue::Star => Some(None),
            DenValue::Inj(Side::Right, a) => finite_index(self.alphabet.len(), a).map(Some),
            _ => None,
        }
    }

    pub fn input_den(&self, x: &[usize]) -> DenValue {
        DenValue::list(x.iter().map(|&i| self.symbol_den(i)).collect())
    }

    /// Every input word up to the given length.
    pub fn inputs(&self, max_len: usize) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        let mut layer = vec![vec![]];
        for _ in 0..max_len {
            layer = layer
                .iter()
                .flat_map(|w: &Vec<usize>| {
                    (0..self.alphabet.len()).map(move |a| {
                        let mut w = w.clone();
                        w.push(a);
                        w
                    })
                })
                .collect();
            out.extend(layer.iter().cloned());
        }
        out
    }

    pub fn show(&self, cells: &[Option<usize>]) -> String {
        let names: Vec<&str> = cells
            .iter()
            .map(|c| c.map_or("_", |i| &self.alphabet[i]))
            .collect();
        format!("[{}]", names.join(" "))
    }

    /// Runs the machine for at most `P(|x|)` steps.
    pub fn run(&self, x: &[usize]) -> Result<TmRun, String> {
        let limit = self.budget().eval_u64(x.len() as u64);
        let mut left: Vec<Option<usize>> = Vec::new();
        let mut right: Vec<Option<usize>> = x.iter().skip(1).rev().map(|&a| Some(a)).collect();
        let mut head = x.first().copied();
        let mut state = if self.states.is_empty() {
            None
        } else {
            Some(0)
        };
        let mut steps = 0;
        while let Some(q) = state {
            if steps == limit {
                return Err(format!(
                    "does not halt within {limit} steps on {}",
                    self.show(&x.iter().map(|&a| Some(a)).collect::<Vec<_>>())
                ));
            }
            let t = self.delta[q][head.map_or(0, |a| a + 1)];
            let (to, from) = match t.dir {
                Dir::Left => (&mut right, &mut left),
                Dir::Right => (&mut left, &mut right),
            };
            to.push(t.write);
            head = from.pop().flatten();
            state = t.next;
            steps += 1;
        }
        let half = match self.output {
            Output::Right => &right,
            Output::Left => &left,
        };
        let mut tape = vec![head];
        tape.extend(half.iter().rev().copied());
        Ok(TmRun { steps, tape })
    }

    /// The result as a stack of cells, trailing blanks removed.
    pub fn output(&self, x: &[usize]) -> Result<Vec<Option<usize>>, String> {
        let mut tape = self.run(x)?.tape;
        while tape.last() == Some(&None) {
            tape.pop();
        }
        Ok(tape)
    }

    /// The result as a list: the first `|x|` cells with blanks dropped.
    pub fn list_output(&self, x: &[usize]) -> Result<Vec<usize>, String> {
        let tape = self.run(x)?.tape;
        Ok(tape.into_iter().take(x.len()).flatten().collect())
    }
}

/// A compiled machine: `L(A) -o S` or, for the list variant, `L(A) -o L(A)`.
#[derive(Clone, Debug)]
pub struct CompiledTm {
    pub spec: TmSpec,
    pub term: Closed,
    pub stack: StackImpl,
    pub list_out: bool,
    /// Divisor minus one used to split the input diamonds.
    pub k: usize,
}

impl CompiledTm {
    pub fn den_output(&self, x: &[usize]) -> DenValue {
        self.term.den().apply(self.spec.input_den(x))
    }

    /// Stack parameter used for an input of length `n`.
    pub fn stack_n(&self, n: usize) -> u64 {
        (n / (self.k + 1)) as u64
    }

    /// Compares the compiled term against the host simulator on `x`.
    pub fn check_input(&self, x: &[usize]) -> Result<(), String> {
        let spec = &self.spec;
        let shown = spec.show(&x.iter().map(|&a| Some(a)).collect::<Vec<_>>());
        let out = self.den_output(x);
        if self.list_out {
            let want = spec.list_output(x)?;
            let got: Option<Vec<usize>> = match &out {
                DenValue::List(items) => items
                    .iter()
                    .map(|v| finite_index(spec.alphabet.len(), v))
                    .collect(),
                _ => None,
            };
            let got = got.ok_or_else(|| format!("{shown}: malformed output {out}"))?;
            if got != want {
                let show = |v: &[usize]| spec.show(&v.iter().map(|&a| Some(a)).collect::<Vec<_>>());
                return Err(format!(
                    "{shown}: got {}, expected {}",
                    show(&got),
                    show(&want)
                ));
            }
            return Ok(());
        }
        let want = spec.output(x)?;
        let items = self
            .stack
            .view(self.stack_n(x.len()), &out)
            .ok_or_else(|| format!("{shown}: result is not a valid stack"))?;
        let mut got = items
            .iter()
            .map(|v| spec.decode_cell(v))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| format!("{shown}: malformed stack item"))?;
        while got.last() == Some(&None) {
            got.pop();
        }
        if got != want {
            return Err(format!(
                "{shown}: got {}, expected {}",
                spec.show(&got),
                spec.show(&want)
            ));
        }
        Ok(())
    }

    /// All disagreements on inputs up to `max_len`.
    pub fn test_all(&self, max_len: usize) -> Vec<String> {
        self.spec
            .inputs(max_len)
            .iter()
            .filter_map(|x| self.check_input(x).err())
            .collect()
    }
}

struct Parts {
    stack: StackImpl,
    k: usize,
    divmod: Closed,
    join: Closed,
    iter: Closed,
    write: Closed,
}

fn head_of(r: &str, tag: &str) -> String {
    format!("(case {r} . | inj1 e{tag} => inj1 <> | inj2 c{tag} => c{tag})")
}

fn parts(spec: &TmSpec) -> Result<Parts, CompleteError> {
    let p = spec.budget();
    let k = p.degree();
    let kk = k + 1;
    let a = spec.symbol_type();
    let c = spec.cell_type();
    let st = spec.status_type();
    let stack = stack_poly_at(&c, &spec.tape_bound(), kk)?;
    let s = stack.impl_type.clone();
    let ms = super::ms_type(kk);
    let divmod = divmod_term(k)?;
    let join = join_term(kk)?;
    let (push, pop) = (stack.push.src(), stack.pop.src());
    let (dv, jn) = (divmod.src(), join.src());
    let tape = Type::tensor(s.clone(), Type::tensor(c.clone(), s.clone()));
    let conf = Type::tensor(Type::tensor(st.clone(), tape), Type::nat());
    let step = if spec.states.is_empty() {
        Closed::parse("lam p . p", Type::arrow(conf.clone(), conf))?
    } else {
        let nq = spec.states.len();
        let q = finite_type(nq).expect("states");
        let g = encode_function(
            &Type::tensor(q.clone(), c.clone()),
            &Type::tensor(st.clone(), Type::tensor(c.clone(), Type::bool())),
            &|v| {
                let (qv, cv) = v.unpair();
                let qi = finite_index(nq, &qv).expect("state");
                let ci = spec.decode_cell(&cv).expect("cell");
                let t = spec.delta[qi][ci.map_or(0, |i| i + 1)];
                let next = match t.next {
                    None => DenValue::inj(Side::Left, DenValue::Star),
                    Some(j) => DenValue::inj(Side::Right, finite_den(nq, j)),
                };
                DenValue::tuple(vec![
                    next,
                    spec.cell_den(t.write),
                    DenValue::bool(t.dir == Dir::Right),
                ])
            },
        )?;
        let moved = |to: &str, from: &str, tag: &str| {
            format!(
                "letp (ms1, w1) = {push} ms (c2, {to}) in letp ({to}1, f1) = w1 in \
                 letp (ms2, w2) = {pop} ms1 {from} in letp ({from}1, r2) = w2 in \
                 ((q2, (lt1, ({head}, rt1))), {jn} (ms2, rem))",
                head = head_of("r2", tag)
            )
        };
        Closed::parse(
            &format!(
                "lam p . letp (conf, ell) = p in letp (st, tape) = conf in \
                 letp (lt, h, rt) = tape in case st . \
                 | inj1 u => ((inj1 u, (lt, (h, rt))), ell) \
                 | inj2 q => letp (q2, c2, dir) = {g} (q, h) in \
                     letp (ms, rem) = {dv} ell in case dir . \
                     | inj1 x1 => {left} \
                     | inj2 x2 => {right}",
                g = g.src(),
                left = moved("rt", "lt", "l"),
                right = moved("lt", "rt", "r"),
            ),
            Type::arrow(conf.clone(), conf),
        )?
    };
    let iter = iter_poly(&step, &p)?;
    let write = Closed::parse(
        &format!(
            "lam x . rec x . \
             | nil => lam p . letp (acc, s) = p in ({dv} acc, s) \
             | cons (d, a, r) => lam p . letp (acc, s) = p in \
                 letp (dm, s1) = r (cons (d, <>, acc), s) in letp (ms, rem) = dm in \
                 letp (ms1, w) = {push} ms (inj2 a, s1) in letp (s2, f) = w in ((ms1, rem), s2)"
        ),
        Type::arrow(
            Type::list(a),
            Type::arrow(
                Type::tensor(Type::nat(), s.clone()),
                Type::tensor(Type::tensor(ms, Type::nat()), s),
            ),
        ),
    )?;
    Ok(Parts {
        stack,
        k,
        divmod,
        join,
        iter,
        write,
    })
}

/// The shared prefix: write the input, iterate, and push the head back
/// onto the output half. Leaves `out : S`, `ms3` and `rem2` in scope.
fn run_src(spec: &TmSpec, p: &Parts) -> String {
    let init = match finite_type(spec.states.len()) {
        None => "<>".to_string(),
        Some(q) => format!(
            "inj2 {}",
            encode_value(&q, &finite_den(spec.states.len(), 0))
                .expect("initial state")
                .src()
        ),
    };
    let half = match spec.output {
        Output::Right => "rt",
        Output::Left => "lt",
    };
    format!(
        "letp (dm, s) = {write} x (nil, {empty}) in letp (ms, rem) = dm in \
         letp (ms1, w) = {pop} ms s in letp (s1, r1) = w in \
         letp (conf, ell) = {iter} (({init}, ({empty}, ({head}, s1))), {jn} (ms1, rem)) in \
         letp (st, tape) = conf in letp (lt, h, rt) = tape in \
         letp (ms2, rem2) = {dv} ell in \
         letp (ms3, w3) = {push} ms2 (h, {half}) in letp (out, f3) = w3 in ",
        write = p.write.src(),
        empty = p.stack.empty.src(),
        pop = p.stack.pop.src(),
        push = p.stack.push.src(),
        iter = p.iter.src(),
        head = head_of("r1", "0"),
        jn = p.join.src(),
        dv = p.divmod.src(),
    )
}

/// `M : L(A) -o S` whose result stack holds the output half of the final
/// tape.
pub fn compile_tm(spec: &TmSpec) -> Result<CompiledTm, CompleteError> {
    let p = parts(spec)?;
    let body = format!("lam x . {}out", run_src(spec, &p));
    let term = Closed::parse(
        &body,
        Type::arrow(Type::list(spec.symbol_type()), p.stack.impl_type.clone()),
    )?;
    Ok(CompiledTm {
        spec: spec.clone(),
        term,
        stack: p.stack,
        list_out: false,
        k: p.k,
    })
}

/// `M : L(A) -o L(A)`: pops the first `|x|` cells with the leftover
/// diamonds and drops blanks.
pub fn compile_tm_listout(spec: &TmSpec) -> Result<CompiledTm, CompleteError> {
    let p = parts(spec)?;
    let a = spec.symbol_type();
    let c = spec.cell_type();
    let s = p.stack.impl_type.clone();
    let kont = Type::arrow(Type::nat(), Type::list(c.clone()));
    let dstate = Type::tensor(Type::tensor(kont.clone(), s), Type::nat());
    let dstep = Closed::parse(
        &format!(
            "lam p . letp (ks, ell) = p in letp (kf, s) = ks in letp (ms, rem) = {dv} ell in \
             letp (ms1, w) = {pop} ms s in letp (s1, r1) = w in \
             ((lam l . case ({unfold} l) . | inj1 _ => nil \
                 | inj2 (e, _, l2) => cons (e, {head}, kf l2), s1), {jn} (ms1, rem))",
            dv = p.divmod.src(),
            pop = p.stack.pop.src(),
            unfold = lunfold(&Type::Unit).src(),
            head = head_of("r1", "9"),
            jn = p.join.src(),
        ),
        Type::arrow(dstate.clone(), dstate),
    )?;
    let drain = iter_sharp(&dstep)?;
    let filter = Closed::parse(
        "lam l . rec l . | nil => nil \
         | cons (d, c, r) => case c . | inj1 b => r | inj2 a => cons (d, a, r)",
        Type::arrow(Type::list(c.clone()), Type::list(a.clone())),
    )?;
    let body = format!(
        "lam x . {}letp (res, ell3) = {drain} (((lam l . nil : {kont}), out), {jn} (ms3, rem2)) in \
         letp (kf, s9) = res in {filter} ({rev} (kf ell3))",
        run_src(spec, &p),
        drain = drain.src(),
        jn = p.join.src(),
        filter = filter.src(),
        rev = reverse(&c).src(),
    );
    let term = Closed::parse(&body, Type::arrow(Type::list(a.clone()), Type::list(a)))?;
    Ok(CompiledTm {
        spec: spec.clone(),
        term,
        stack: p.stack,
        list_out: true,
        k: p.k,
    })
}
