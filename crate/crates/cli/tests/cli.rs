use std::path::PathBuf;
use std::process::{Command, Output};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn corpus(file: &str) -> String {
    root().join("corpus").join(file).display().to_string()
}

fn lfpl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lfpl"))
        .args(args)
        .env_remove("LFPL_SEED")
        .env_remove("LFPL_FUEL")
        .output()
        .expect("run lfpl")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn tmp(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lfpl-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

#[test]
fn check_reverse() {
    let o = lfpl(&["check", &corpus("reverse.lfpl")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("reverse : L(1) -o L(1)\n"));
}

#[test]
fn check_rejects_duplicated_diamond() {
    let o = lfpl(&["check", &corpus("bad_dup_diamond.lfpl")]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    let diag = out.lines().last().unwrap();
    assert!(diag.contains("variable reused"), "{diag}");
    let mut parts = diag.splitn(4, ':');
    assert!(parts.next().unwrap().ends_with("bad_dup_diamond.lfpl"));
    assert!(parts.next().unwrap().parse::<u32>().is_ok());
    assert!(parts.next().unwrap().parse::<u32>().is_ok());
}

#[test]
fn check_rejects_exponential() {
    let o = lfpl(&["check", &corpus("fnexp.lfpl")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("parse error"));
}

#[test]
fn check_whole_corpus() {
    for entry in std::fs::read_dir(root().join("corpus")).unwrap() {
        let p = entry.unwrap().path();
        let name = p.file_name().unwrap().to_str().unwrap().to_string();
        if !name.ends_with(".lfpl") || name.starts_with("bad_") || name == "fnexp.lfpl" {
            continue;
        }
        let o = lfpl(&["check", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stdout(&o));
    }
}

#[test]
fn eval_reverse_units() {
    let o = lfpl(&["eval", &corpus("reverse.lfpl"), "reverse", "[<>, <>, <>]"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("value: [<>, <>, <>]\ncost: "));
}

#[test]
fn eval_reverse_bools() {
    let o = lfpl(&[
        "eval",
        &corpus("reverse_bool.lfpl"),
        "reverse",
        "[inj1 <>, inj2 <>]",
    ]);
    assert!(stdout(&o).starts_with("value: [inj2 <>, inj1 <>]\n"));
}

#[test]
fn eval_rec_app_costs_within_bound() {
    for n in 0..=6 {
        let lit = format!("[{}]", vec!["<>"; n].join(", "));
        let o = lfpl(&[
            "--json",
            "eval",
            &corpus("reverse.lfpl"),
            "reverse",
            &lit,
            "--costs",
            "paper-example",
        ]);
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert!(v["cost"].as_u64().unwrap() <= 2 * n as u64 + 4);
    }
}

#[test]
fn eval_rejects_bad_inputs() {
    let o = lfpl(&["eval", &corpus("reverse.lfpl"), "reverse", "diamond"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("input:1:1: literal error"));
    let o = lfpl(&["eval", &corpus("reverse.lfpl"), "reverse", "[inj1 <>]"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("does not have type"));
    let o = lfpl(&["eval", &corpus("reverse.lfpl"), "nothing"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn fuel_exhaustion_is_internal() {
    let o = Command::new(env!("CARGO_BIN_EXE_lfpl"))
        .args(["eval", &corpus("reverse.lfpl"), "reverse", "[<>, <>]"])
        .env("LFPL_FUEL", "3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("fuel"));
}

#[test]
fn bound_reverse_paper_example() {
    let o = lfpl(&[
        "bound",
        &corpus("reverse.lfpl"),
        "reverse",
        "--costs",
        "paper-example",
    ]);
    assert_eq!(stdout(&o), "4 + 2*n\n");
}

#[test]
fn bound_of_null_is_c_null() {
    let p = tmp("unit.lfpl", "u : 1\nu = <>\n");
    let costs = tmp("costs.txt", "# only null costs\nc_null = 7\nvar = 0\n");
    let o = lfpl(&[
        "bound",
        p.to_str().unwrap(),
        "u",
        "--costs",
        costs.to_str().unwrap(),
    ]);
    assert_eq!(stdout(&o), "7\n");
}

#[test]
fn bound_verify_table() {
    let o = lfpl(&[
        "bound",
        &corpus("reverse.lfpl"),
        "reverse",
        "--verify",
        "0..10",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[1], "n\tcost\tvalue_poly\tterm_poly\tenv_poly\tslack");
    assert_eq!(lines.len(), 2 + 11 + 1);
    assert_eq!(*lines.last().unwrap(), "violations: 0");
    for row in &lines[2..13] {
        let slack: i64 = row.split('\t').next_back().unwrap().parse().unwrap();
        assert!(slack >= 0);
    }
}

#[test]
fn json_mirrors_text() {
    let text = stdout(&lfpl(&["check", &corpus("reverse.lfpl")]));
    let o = lfpl(&["--json", "check", &corpus("reverse.lfpl")]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let defs = v["definitions"].as_array().unwrap();
    assert_eq!(defs.len(), text.lines().count());
    for (d, line) in defs.iter().zip(text.lines()) {
        assert_eq!(
            format!(
                "{} : {}",
                d["name"].as_str().unwrap(),
                d["type"].as_str().unwrap()
            ),
            line
        );
    }
}

#[test]
fn compile_bitflip_and_test() {
    let o = lfpl(&["compile-tm", &corpus("bitflip.tm"), "--test", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "tested 31 inputs up to length 4: 0 failures\n");
}

#[test]
fn compiled_identity_list_out_checks() {
    let out = std::env::temp_dir().join(format!("lfpl-id-{}.lfpl", std::process::id()));
    let o = lfpl(&[
        "compile-tm",
        &corpus("identity.tm"),
        "--list-out",
        "--test",
        "4",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = lfpl(&["check", out.to_str().unwrap()]);
    assert_eq!(stdout(&o), "identity : L(1 + 1) -o L(1 + 1)\n");
    let o = lfpl(&[
        "eval",
        out.to_str().unwrap(),
        "identity",
        "[inj2 <>, inj1 <>, inj2 <>]",
    ]);
    assert!(stdout(&o).starts_with("value: [inj2 <>, inj1 <>, inj2 <>]\n"));
}

#[test]
fn compile_rejects_partial_delta() {
    let p = tmp(
        "partial.tm",
        "states: q1\nalphabet: 0 1\nbound: 1\nq1,0 -> q1,1,R\nq1,1 -> q1,0,R\n",
    );
    let o = lfpl(&["compile-tm", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("missing transition for (q1, _)"));
}

#[test]
fn selftest_filters_and_is_deterministic() {
    let a = lfpl(&[
        "--json",
        "selftest",
        "--suite",
        "coherence",
        "--seed",
        "5",
        "--terms",
        "50",
    ]);
    let b = lfpl(&[
        "--json",
        "selftest",
        "--suite",
        "coherence",
        "--seed",
        "5",
        "--terms",
        "50",
    ]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["suites"].as_array().unwrap().len(), 1);
    assert_eq!(v["suites"][0]["name"], "coherence");
    let o = lfpl(&["selftest", "--suite", "stacks", "--scripts", "10"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS stacks"));
    let o = lfpl(&["selftest", "--suite", "bogus"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn seed_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_lfpl"))
        .args(["selftest", "--suite", "budget"])
        .env("LFPL_SEED", "42")
        .output()
        .unwrap();
    assert!(stdout(&o).starts_with("seed 42\n"));
}
