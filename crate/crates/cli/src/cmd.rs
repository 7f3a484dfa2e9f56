use std::fmt::Write as _;
use std::path::Path;
use std::rc::Rc;

use lfpl::complete::{compile_tm, compile_tm_listout, parse_tm, CompleteError};
use lfpl::costpoly::{term_poly, verify_bound, BoundRow};
use lfpl::eval::{eval_with_fuel, parse_value, EvalError, DEFAULT_FUEL};
use lfpl::harness::{inhabitants, random_value, run_suite, SuiteConfig, SUITES};
use lfpl::syntax::{build, parse_program, Program, Term, TermKind};
use lfpl::typecheck::{check, check_closed, Ctx, TypedTerm};
use lfpl::{CostModel, Env, Type, Value};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value as Json};

use crate::Command;

/// A failed command: exit code and diagnostic lines.
struct Fail {
    code: u8,
    msg: String,
}

fn user(msg: impl Into<String>) -> Fail {
    Fail {
        code: 1,
        msg: msg.into(),
    }
}

fn internal(msg: impl Into<String>) -> Fail {
    Fail {
        code: 2,
        msg: msg.into(),
    }
}

/// Human text and its JSON mirror.
struct Out {
    text: String,
    json: Json,
    code: u8,
}

pub fn run(cmd: &Command, json: bool) -> u8 {
    let r = match cmd {
        Command::Check { file } => cmd_check(file),
        Command::Eval {
            file,
            def,
            input,
            costs,
        } => cmd_eval(file, def, input.as_deref(), costs),
        Command::Bound {
            file,
            def,
            costs,
            verify,
        } => cmd_bound(file, def, costs, verify.as_deref()),
        Command::CompileTm {
            file,
            list_out,
            test,
            out,
        } => cmd_compile_tm(file, *list_out, *test, out.as_deref()),
        Command::Selftest {
            suite,
            seed,
            terms,
            scripts,
        } => cmd_selftest(suite, *seed, *terms, *scripts),
    };
    match r {
        Ok(out) => {
            if json {
                println!("{}", out.json);
            } else {
                print!("{}", out.text);
            }
            out.code
        }
        Err(f) => {
            if json {
                println!("{}", json!({ "error": f.msg, "exit": f.code }));
            }
            eprintln!("{}", f.msg);
            f.code
        }
    }
}

fn read(file: &Path) -> Result<String, Fail> {
    std::fs::read_to_string(file).map_err(|e| user(format!("{}: {e}", file.display())))
}

fn load(file: &Path) -> Result<Program, Fail> {
    let src = read(file)?;
    parse_program(&src).map_err(|e| user(format!("{}:{e}", file.display())))
}

fn cost_model(spec: &str) -> Result<CostModel, Fail> {
    if let Ok(cm) = CostModel::preset(spec) {
        return Ok(cm);
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(user(format!(
            "unknown cost model `{spec}`; expected `default`, `paper-example` or a file"
        )));
    }
    CostModel::parse(&read(path)?).map_err(|e| user(format!("{spec}:{e}")))
}

fn env_u64(var: &str) -> Result<Option<u64>, Fail> {
    match std::env::var(var) {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| user(format!("{var} must be a natural number, got `{s}`"))),
        Err(_) => Ok(None),
    }
}

fn fuel() -> Result<u64, Fail> {
    Ok(env_u64("LFPL_FUEL")?.unwrap_or(DEFAULT_FUEL))
}

fn seed(flag: Option<u64>) -> Result<u64, Fail> {
    Ok(match flag {
        Some(s) => s,
        None => env_u64("LFPL_SEED")?.unwrap_or(SuiteConfig::default().seed),
    })
}

fn eval_fail(e: EvalError) -> Fail {
    internal(format!("internal error: {e}"))
}

fn cmd_check(file: &Path) -> Result<Out, Fail> {
    let prog = load(file)?;
    let mut text = String::new();
    let mut defs = Vec::new();
    for d in &prog.defs {
        if let Err(e) = check_closed(&d.term, &d.ty) {
            let diag = format!("{}:{e}", file.display());
            return Ok(Out {
                text: format!("{text}{diag}\n"),
                json: json!({ "file": file.display().to_string(), "ok": false, "definitions": defs, "error": diag }),
                code: 1,
            });
        }
        let _ = writeln!(text, "{} : {}", d.name, d.ty);
        defs.push(json!({ "name": &*d.name, "type": d.ty.to_string() }));
    }
    Ok(Out {
        text,
        json: json!({ "file": file.display().to_string(), "ok": true, "definitions": defs, "error": null }),
        code: 0,
    })
}

const INPUT: &str = "input";

/// The definition itself, or `def input` under `input : A` when the
/// definition has type `A -o B`.
fn target(
    file: &Path,
    prog: &Program,
    def: &str,
    applied: bool,
) -> Result<(TypedTerm, Option<Type>), Fail> {
    let d = prog
        .get(def)
        .ok_or_else(|| user(format!("{}: no definition named `{def}`", file.display())))?;
    let diag = |e| user(format!("{}:{e}", file.display()));
    let closed = prog.closed(def).expect("definition exists");
    match (&d.ty, applied) {
        (Type::Arrow(a, b), true) => {
            let t = Term::new(TermKind::App(closed, build::var(INPUT)));
            let ctx = Ctx::new().with(&Rc::from(INPUT), (**a).clone());
            Ok((check(&ctx, &t, b).map_err(diag)?, Some((**a).clone())))
        }
        _ => Ok((check_closed(&closed, &d.ty).map_err(diag)?, None)),
    }
}

fn cmd_eval(file: &Path, def: &str, input: Option<&str>, costs: &str) -> Result<Out, Fail> {
    let cm = cost_model(costs)?;
    let prog = load(file)?;
    let (term, arg_ty) = target(file, &prog, def, input.is_some())?;
    let env = match (input, &arg_ty) {
        (Some(lit), Some(a)) => {
            let v = parse_value(lit)
                .map_err(|e| user(format!("input:1:{}: literal error: {}", e.col, e.message)))?;
            if !v.has_type(a) {
                return Err(user(format!("input: value {v} does not have type {a}")));
            }
            Env::new().with(INPUT, v)
        }
        (Some(_), None) => {
            return Err(user(format!(
                "`{def}` is not a function and takes no input"
            )))
        }
        _ => Env::new(),
    };
    let r = eval_with_fuel(&env, &term, &cm, fuel()?).map_err(eval_fail)?;
    Ok(Out {
        text: format!("value: {}\ncost: {}\nsteps: {}\n", r.value, r.cost, r.steps),
        json: json!({ "value": r.value.to_string(), "cost": r.cost, "steps": r.steps }),
        code: 0,
    })
}

fn parse_range(s: &str) -> Result<(u64, u64), Fail> {
    let bad = || user(format!("bad range `{s}`; expected N0..N1"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let (a, b): (u64, u64) = (
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    );
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

/// An input of size at most `n`: a full list when the element type is
/// finite, otherwise a seeded random value.
fn sized_input(ty: &Type, n: u64, rng: &mut ChaCha8Rng) -> Option<Value> {
    if let Type::List(a) = ty {
        let items = inhabitants(a);
        if !items.is_empty() {
            return Some(Value::list(
                (0..n as usize)
                    .map(|i| items[i % items.len()].clone())
                    .collect(),
            ));
        }
    }
    random_value(rng, ty, n as usize)
}

fn cmd_bound(file: &Path, def: &str, costs: &str, verify: Option<&str>) -> Result<Out, Fail> {
    let cm = cost_model(costs)?;
    let prog = load(file)?;
    let (term, arg_ty) = target(file, &prog, def, true)?;
    let poly = term_poly(&term, &cm);
    let coeffs: Vec<String> = poly.coeffs().iter().map(|c| c.to_string()).collect();
    let mut text = format!("{poly}\n");
    let mut json = json!({ "polynomial": poly.to_string(), "coefficients": coeffs });
    let Some(range) = verify else {
        return Ok(Out {
            text,
            json,
            code: 0,
        });
    };
    let (n0, n1) = parse_range(range)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed(None)?);
    let mut rows: Vec<BoundRow> = Vec::new();
    for n in n0..=n1 {
        let env = match &arg_ty {
            Some(a) => match sized_input(a, n, &mut rng) {
                Some(v) => Env::new().with(INPUT, v),
                None => return Err(user(format!("cannot build inputs of type {a}"))),
            },
            None => Env::new(),
        };
        let rep = verify_bound(&env, &term, &cm, [n]).map_err(eval_fail)?;
        rows.extend(rep.rows);
    }
    let violations = rows
        .iter()
        .filter(|r| r.slack.sign() == num_bigint::Sign::Minus)
        .count();
    text.push_str("n\tcost\tvalue_poly\tterm_poly\tenv_poly\tslack\n");
    for r in &rows {
        let _ = writeln!(
            text,
            "{}\t{}\t{}\t{}\t{}\t{}",
            r.n, r.cost, r.value_poly, r.term_poly, r.env_poly, r.slack
        );
    }
    let _ = writeln!(text, "violations: {violations}");
    json["rows"] = rows
        .iter()
        .map(|r| {
            json!({
                "n": r.n,
                "cost": r.cost,
                "value_poly": r.value_poly.to_string(),
                "term_poly": r.term_poly.to_string(),
                "env_poly": r.env_poly.to_string(),
                "slack": r.slack.to_string(),
            })
        })
        .collect();
    json["violations"] = json!(violations);
    Ok(Out {
        text,
        json,
        code: if violations == 0 { 0 } else { 2 },
    })
}

/// `file:line:col: kind: detail` from a machine description error.
fn tm_diag(file: &Path, msg: &str) -> String {
    let (line, detail) = msg
        .strip_prefix("line ")
        .and_then(|r| r.split_once(": "))
        .and_then(|(n, d)| n.parse::<u32>().ok().map(|n| (n, d)))
        .unwrap_or((1, msg));
    format!("{}:{line}:1: machine error: {detail}", file.display())
}

fn cmd_compile_tm(
    file: &Path,
    list_out: bool,
    test: Option<usize>,
    out: Option<&Path>,
) -> Result<Out, Fail> {
    let src = read(file)?;
    let spec = parse_tm(&src).map_err(|e| user(tm_diag(file, &e.to_string())))?;
    let compiled = if list_out {
        compile_tm_listout(&spec)
    } else {
        compile_tm(&spec)
    }
    .map_err(|e: CompleteError| internal(format!("internal error: {e}")))?;
    let name = file
        .file_stem()
        .and_then(|s| s.to_str())
        .filter(|s| s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_'))
        .unwrap_or("tm");
    let program = format!(
        "-- Compiled from {}.\n\n{name} : {}\n{name} = {}\n",
        file.display(),
        compiled.term.ty,
        compiled.term.src()
    );
    let mut json = json!({ "name": name, "type": compiled.term.ty.to_string() });
    let mut text = String::new();
    if let Some(path) = out {
        std::fs::write(path, &program).map_err(|e| user(format!("{}: {e}", path.display())))?;
    } else if test.is_none() {
        text.push_str(&program);
    }
    json["program"] = json!(program);
    let mut code = 0;
    if let Some(max_len) = test {
        let inputs = spec.inputs(max_len);
        let failures: Vec<String> = inputs
            .iter()
            .filter_map(|x| compiled.check_input(x).err())
            .collect();
        let _ = writeln!(
            text,
            "tested {} inputs up to length {max_len}: {} failures",
            inputs.len(),
            failures.len()
        );
        for f in &failures {
            let _ = writeln!(text, "  {f}");
        }
        json["tested"] = json!(inputs.len());
        json["failures"] = json!(failures);
        if !failures.is_empty() {
            code = 2;
        }
    }
    Ok(Out { text, json, code })
}

fn cmd_selftest(
    suites: &[String],
    seed_flag: Option<u64>,
    terms: Option<usize>,
    scripts: Option<usize>,
) -> Result<Out, Fail> {
    let mut cfg = SuiteConfig {
        seed: seed(seed_flag)?,
        ..SuiteConfig::default()
    };
    if let Some(t) = terms {
        cfg.random_terms = t;
    }
    if let Some(s) = scripts {
        cfg.stack_scripts = s;
    }
    for s in suites {
        if !SUITES.contains(&s.as_str()) {
            return Err(user(format!(
                "unknown suite `{s}`; expected one of {}",
                SUITES.join(", ")
            )));
        }
    }
    let names: Vec<&str> = if suites.is_empty() {
        SUITES.to_vec()
    } else {
        suites.iter().map(|s| s.as_str()).collect()
    };
    let mut text = format!("seed {}\n", cfg.seed);
    let mut reports = Vec::new();
    let mut ok = true;
    for name in names {
        let r = run_suite(name, &cfg).expect("known suite");
        ok &= r.passed();
        let _ = writeln!(
            text,
            "{} {}: {} checks, {} failures",
            if r.passed() { "PASS" } else { "FAIL" },
            r.name,
            r.checked,
            r.failures.len()
        );
        for f in r.failures.iter().take(10) {
            let _ = writeln!(text, "  {f}");
        }
        reports.push(json!({
            "name": r.name,
            "passed": r.passed(),
            "checked": r.checked,
            "failures": r.failures,
        }));
    }
    Ok(Out {
        text,
        json: json!({ "seed": cfg.seed, "suites": reports, "passed": ok }),
        code: if ok { 0 } else { 2 },
    })
}
