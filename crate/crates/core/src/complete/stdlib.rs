use super::{tuple_src, Closed, CompleteError};
use crate::syntax::Type;

fn unfolded(a: &Type) -> Type {
    Type::sum(
        Type::Unit,
        Type::tensor_all(vec![Type::Diamond, a.clone(), Type::list(a.clone())]),
    )
}

/// `lfold : 1 + diam * A * L(A) -o L(A)`
pub fn lfold(a: &Type) -> Closed {
    Closed::parse(
        "lam x . case x . | inj1 _ => nil | inj2 (d, y, ys) => cons (d, y, ys)",
        Type::arrow(unfolded(a), Type::list(a.clone())),
    )
    .expect("lfold")
}

/// `lunfold : L(A) -o 1 + diam * A * L(A)`
pub fn lunfold(a: &Type) -> Closed {
    let body = format!(
        "lam x . rec x . | nil => inj1 <> | cons (d, y, r) => inj2 (d, y, {} r)",
        lfold(a).src()
    );
    Closed::parse(&body, Type::arrow(Type::list(a.clone()), unfolded(a))).expect("lunfold")
}

/// `susp : L(A) -o (L(1) -o L(A)) * L(1)`, storing the items in a closure
/// and handing the diamonds back as a unit list.
pub fn susp(a: &Type) -> Closed {
    let body = format!(
        "lam x . rec x . \
         | nil => (lam _ . nil, nil) \
         | cons (d, y, r) => letp (f, m) = r in \
             ((lam l . case ({} l) . | inj1 _ => nil | inj2 (e, _, l2) => cons (e, y, f l2)), \
              cons (d, <>, m))",
        lunfold(&Type::Unit).src()
    );
    let la = Type::list(a.clone());
    Closed::parse(
        &body,
        Type::arrow(
            la.clone(),
            Type::tensor(Type::arrow(Type::nat(), la), Type::nat()),
        ),
    )
    .expect("susp")
}

/// `revAppend : L(A) -o L(A) -o L(A)`
pub fn rev_append(a: &Type) -> Closed {
    let la = Type::list(a.clone());
    Closed::parse(
        "lam l1 . rec l1 . | nil => lam l2 . l2 | cons (d, x, r) => lam l2 . r (cons (d, x, l2))",
        Type::arrow(la.clone(), Type::arrow(la.clone(), la)),
    )
    .expect("revAppend")
}

/// `reverse : L(A) -o L(A)`
pub fn reverse(a: &Type) -> Closed {
    let la = Type::list(a.clone());
    Closed::parse(
        &format!("lam l . {} l nil", rev_append(a).src()),
        Type::arrow(la.clone(), la),
    )
    .expect("reverse")
}

/// The standard examples at element type `1 + 1`.
pub fn stdlib() -> Vec<(&'static str, Closed)> {
    stdlib_at(&Type::bool())
}

pub fn stdlib_at(a: &Type) -> Vec<(&'static str, Closed)> {
    vec![
        ("revAppend", rev_append(a)),
        ("reverse", reverse(a)),
        ("lfold", lfold(a)),
        ("lunfold", lunfold(a)),
        ("susp", susp(a)),
    ]
}

fn add_src() -> String {
    "(lam p . rec p . | nil => lam q . q | cons (d, x, r) => lam q . cons (d, x, r q) \
      : L(1) -o L(1) -o L(1))"
        .into()
}

/// `join : (L(1))^k * L(1) -o L(1)`, appending everything.
pub fn join_term(k: usize) -> Result<Closed, CompleteError> {
    if k == 0 {
        return Closed::parse("lam p . letp (u, rem) = p in rem", join_type(0));
    }
    let names: Vec<String> = (1..=k).map(|i| format!("q{i}")).collect();
    let add = add_src();
    let body = names
        .iter()
        .rev()
        .fold("rem".to_string(), |acc, q| format!("{add} {q} ({acc})"));
    Closed::parse(
        &format!("lam p . letp ({}, rem) = p in {body}", tuple_src(&names)),
        join_type(k),
    )
}

fn join_type(k: usize) -> Type {
    Type::arrow(Type::tensor(super::ms_type(k), Type::nat()), Type::nat())
}

/// Unary division by `k + 1`: `L(1) -o (L(1))^(k+1) * L(1)`, returning
/// `k + 1` quotient lists and the remainder.
pub fn divmod_term(k: usize) -> Result<Closed, CompleteError> {
    let ty = Type::arrow(
        Type::nat(),
        Type::tensor(super::ms_type(k + 1), Type::nat()),
    );
    let nils = tuple_src(&vec!["nil".to_string(); k + 1]);
    if k == 0 {
        return Closed::parse(
            "lam l . rec l . | nil => (nil, nil) \
             | cons (d, u, r) => letp (q, rem) = r in (cons (d, u, q), rem)",
            ty,
        );
    }
    let unfold = lunfold(&Type::Unit);
    let qs: Vec<String> = (1..=k + 1).map(|i| format!("q{i}")).collect();
    // Level j has already taken j cells e1..ej out of the remainder.
    let mut body = {
        let mut parts = vec!["cons (d, u, q1)".to_string()];
        for j in 1..=k {
            parts.push(format!("cons (e{j}, v{j}, q{})", j + 1));
        }
        format!("({}, rem{k})", tuple_src(&parts))
    };
    for j in (0..k).rev() {
        let mut kept = "nil".to_string();
        for i in (1..=j).rev() {
            kept = format!("cons (e{i}, v{i}, {kept})");
        }
        let short = format!("({}, cons (d, u, {kept}))", tuple_src(&qs));
        body = format!(
            "case ({} rem{j}) . | inj1 _ => {short} | inj2 (e{n}, v{n}, rem{n}) => {body}",
            unfold.src(),
            n = j + 1
        );
    }
    Closed::parse(
        &format!(
            "lam l . rec l . | nil => ({nils}, nil) \
             | cons (d, u, r) => letp (qs, rem0) = r in letp {} = qs in {body}",
            tuple_src(&qs)
        ),
        ty,
    )
}
