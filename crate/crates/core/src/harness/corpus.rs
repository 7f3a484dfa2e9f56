use std::rc::Rc;

use crate::syntax::{build, parse_program, Name, Term, TermKind, Type};
use crate::typecheck::{check, check_closed, Ctx, TypedTerm};

/// The bundled example programs, as `(file name, source)`.
pub const CORPUS: &[(&str, &str)] = &[
    (
        "reverse.lfpl",
        include_str!("../../../../corpus/reverse.lfpl"),
    ),
    (
        "reverse_bool.lfpl",
        include_str!("../../../../corpus/reverse_bool.lfpl"),
    ),
    (
        "list_case.lfpl",
        include_str!("../../../../corpus/list_case.lfpl"),
    ),
    ("susp.lfpl", include_str!("../../../../corpus/susp.lfpl")),
    (
        "append.lfpl",
        include_str!("../../../../corpus/append.lfpl"),
    ),
    ("bools.lfpl", include_str!("../../../../corpus/bools.lfpl")),
    ("sort.lfpl", include_str!("../../../../corpus/sort.lfpl")),
    ("trees.lfpl", include_str!("../../../../corpus/trees.lfpl")),
    (
        "stacks.lfpl",
        include_str!("../../../../corpus/stacks.lfpl"),
    ),
    ("lazy.lfpl", include_str!("../../../../corpus/lazy.lfpl")),
    (
        "iterate.lfpl",
        include_str!("../../../../corpus/iterate.lfpl"),
    ),
    (
        "divmod.lfpl",
        include_str!("../../../../corpus/divmod.lfpl"),
    ),
    ("zip.lfpl", include_str!("../../../../corpus/zip.lfpl")),
    ("spine.lfpl", include_str!("../../../../corpus/spine.lfpl")),
    ("nat.lfpl", include_str!("../../../../corpus/nat.lfpl")),
];

/// Programs that must be rejected, with the expected diagnostic fragment.
pub const REJECTED: &[(&str, &str, &str)] = &[
    (
        "bad_dup_diamond.lfpl",
        include_str!("../../../../corpus/bad_dup_diamond.lfpl"),
        "variable reused",
    ),
    (
        "fnexp.lfpl",
        include_str!("../../../../corpus/fnexp.lfpl"),
        "parse error",
    ),
];

/// A checked top-level definition.
#[derive(Clone, Debug)]
pub struct CorpusDef {
    pub file: String,
    pub name: String,
    pub ty: Type,
    /// The body with earlier definitions inlined.
    pub source: Term,
    pub term: TypedTerm,
}

impl CorpusDef {
    /// `f x` checked under `x : A` for a definition `f : A -o B`.
    pub fn applied(&self) -> Option<(Ctx, TypedTerm)> {
        let Type::Arrow(a, b) = &self.ty else {
            return None;
        };
        let x: Name = Rc::from("input");
        let f = build::ann(Rc::new(self.source.clone()), self.ty.clone());
        let t = Term::new(TermKind::App(f, build::var(&x)));
        let ctx = Ctx::new().with(&x, (**a).clone());
        let tt = check(&ctx, &t, b).ok()?;
        Some((ctx, tt))
    }
}

/// Every definition of every bundled program, checked.
pub fn corpus_defs() -> Vec<CorpusDef> {
    let mut out = Vec::new();
    for (file, src) in CORPUS {
        let prog = parse_program(src).unwrap_or_else(|e| panic!("{file}: {e}"));
        for d in &prog.defs {
            let tt =
                check_closed(&d.term, &d.ty).unwrap_or_else(|e| panic!("{file}: {}: {e}", d.name));
            out.push(CorpusDef {
                file: file.to_string(),
                name: d.name.to_string(),
                ty: d.ty.clone(),
                source: d.term.clone(),
                term: tt,
            });
        }
    }
    out
}

pub fn corpus_def(file: &str, name: &str) -> CorpusDef {
    corpus_defs()
        .into_iter()
        .find(|d| d.file == file && d.name == name)
        .unwrap_or_else(|| panic!("no definition {name} in {file}"))
}
