use std::collections::HashSet;
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use super::lexer::{lex, Tok, Token};
use super::term::{Name, Side, Span, Term, TermKind};
use super::types::Type;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub struct ParseError {
    pub span: Span,
    pub message: String,
}

impl ParseError {
    pub fn new(span: Span, message: impl Into<String>) -> ParseError {
        ParseError {
            span,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: parse error: {}", self.span, self.message)
    }
}

const KEYWORDS: &[&str] = &[
    "lam", "rec", "nil", "cons", "case", "inj1", "inj2", "letp", "in", "pop", "empty", "push",
    "leaf", "node", "trec", "fst", "snd", "proj1", "proj2",
];

fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

/// Binding-site pattern: a name, a wildcard or a right-nested tuple.
#[derive(Clone, Debug)]
enum Pat {
    Name(Name),
    Tuple(Vec<Pat>),
}

pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
    used: HashSet<String>,
    fresh: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    pub(crate) fn new(src: &str) -> PResult<Parser> {
        let toks = lex(src)?;
        let used = toks
            .iter()
            .filter_map(|t| match &t.tok {
                Tok::Ident(s) => Some(s.clone()),
                _ => None,
            })
            .collect();
        Ok(Parser {
            toks,
            pos: 0,
            used,
            fresh: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub(crate) fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn peek_is(&self, tok: &Tok) -> bool {
        self.peek() == tok
    }

    pub(crate) fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, tok: &Tok) -> PResult<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.is_kw(kw) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        ParseError::new(
            self.span(),
            format!("expected {wanted}, found {}", self.peek()),
        )
    }

    pub(crate) fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_keyword(&s) && s != "_" => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    fn fresh_name(&mut self) -> Name {
        loop {
            let candidate = format!("_{}", self.fresh);
            self.fresh += 1;
            if !self.used.contains(&candidate) {
                self.used.insert(candidate.clone());
                return Rc::from(candidate.as_str());
            }
        }
    }

    // ---- types ----

    pub(crate) fn ty(&mut self) -> PResult<Type> {
        let lhs = self.ty_sum()?;
        if self.eat(&Tok::Lolli) {
            let rhs = self.ty()?;
            return Ok(Type::arrow(lhs, rhs));
        }
        Ok(lhs)
    }

    fn ty_sum(&mut self) -> PResult<Type> {
        let lhs = self.ty_tensor()?;
        if self.eat(&Tok::Plus) {
            let rhs = self.ty_sum()?;
            return Ok(Type::sum(lhs, rhs));
        }
        Ok(lhs)
    }

    fn ty_tensor(&mut self) -> PResult<Type> {
        let lhs = self.ty_atom()?;
        if self.eat(&Tok::Star) {
            let rhs = self.ty_tensor()?;
            return Ok(Type::tensor(lhs, rhs));
        }
        if self.eat(&Tok::Amp) {
            let rhs = self.ty_tensor()?;
            return Ok(Type::prod(lhs, rhs));
        }
        Ok(lhs)
    }

    fn ty_atom(&mut self) -> PResult<Type> {
        match self.peek().clone() {
            Tok::Num(1) => {
                self.bump();
                Ok(Type::Unit)
            }
            Tok::LParen => {
                self.bump();
                let t = self.ty()?;
                self.expect(&Tok::RParen)?;
                Ok(t)
            }
            Tok::Ident(s) if s == "diam" => {
                self.bump();
                Ok(Type::Diamond)
            }
            Tok::Ident(s) if s == "L" || s == "S" || s == "Tree" => {
                self.bump();
                self.expect(&Tok::LParen)?;
                let inner = self.ty()?;
                self.expect(&Tok::RParen)?;
                Ok(match s.as_str() {
                    "L" => Type::list(inner),
                    "S" => Type::stack(inner),
                    _ => Type::tree(inner),
                })
            }
            _ => Err(self.unexpected("a type")),
        }
    }

    // ---- patterns ----

    fn pat(&mut self) -> PResult<Pat> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "_" => {
                self.bump();
                Ok(Pat::Name(self.fresh_name()))
            }
            Tok::LParen => {
                self.bump();
                let mut parts = vec![self.pat()?];
                while self.eat(&Tok::Comma) {
                    parts.push(self.pat()?);
                }
                self.expect(&Tok::RParen)?;
                if parts.len() == 1 {
                    Ok(parts.pop().unwrap())
                } else {
                    Ok(Pat::Tuple(parts))
                }
            }
            _ => {
                let s = self.ident()?;
                Ok(Pat::Name(Rc::from(s.as_str())))
            }
        }
    }

    /// Turns a pattern into a binder name, wrapping `body` in the `letp`
    /// chain that destructures a tuple pattern.
    fn bind(&mut self, pat: Pat, span: Span) -> (Name, Box<dyn FnOnce(Term) -> Term>) {
        match pat {
            Pat::Name(n) => (n, Box::new(|body| body)),
            Pat::Tuple(parts) => {
                let root = self.fresh_name();
                let wrap = self.destructure(root.clone(), parts, span);
                (root, wrap)
            }
        }
    }

    fn destructure(
        &mut self,
        scrut: Name,
        mut parts: Vec<Pat>,
        span: Span,
    ) -> Box<dyn FnOnce(Term) -> Term> {
        let first = parts.remove(0);
        let rest = if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Pat::Tuple(parts)
        };
        let (n1, w1) = self.bind(first, span);
        let (n2, w2) = self.bind(rest, span);
        Box::new(move |body| {
            let inner = w1(w2(body));
            Term::at(
                TermKind::LetPair {
                    scrut: Rc::new(Term::at(TermKind::Var(scrut), span)),
                    first: n1,
                    second: n2,
                    body: Rc::new(inner),
                },
                span,
            )
        })
    }

    fn pat_n(&mut self, n: usize) -> PResult<Vec<Pat>> {
        self.expect(&Tok::LParen)?;
        let mut pats = vec![self.pat()?];
        for _ in 1..n {
            self.expect(&Tok::Comma)?;
            pats.push(self.pat()?);
        }
        self.expect(&Tok::RParen)?;
        Ok(pats)
    }

    fn bind_all(&mut self, pats: Vec<Pat>, span: Span, body: Term) -> (Vec<Name>, Term) {
        let mut names = Vec::new();
        let mut wraps = Vec::new();
        for p in pats {
            let (n, w) = self.bind(p, span);
            names.push(n);
            wraps.push(w);
        }
        let mut body = body;
        while let Some(w) = wraps.pop() {
            body = w(body);
        }
        (names, body)
    }

    // ---- terms ----

    pub(crate) fn term(&mut self) -> PResult<Term> {
        let span = self.span();
        if self.is_kw("lam") {
            self.bump();
            let p = self.pat()?;
            self.expect(&Tok::Dot)?;
            let body = self.term()?;
            let (names, body) = self.bind_all(vec![p], span, body);
            return Ok(Term::at(
                TermKind::Lam(names[0].clone(), Rc::new(body)),
                span,
            ));
        }
        if self.is_kw("letp") {
            self.bump();
            let mut pats = match self.pat()? {
                Pat::Tuple(parts) => parts,
                Pat::Name(_) => {
                    return Err(ParseError::new(span, "letp needs a pair pattern"));
                }
            };
            if pats.len() > 2 {
                let rest = pats.split_off(1);
                pats.push(Pat::Tuple(rest));
            }
            self.expect(&Tok::Eq)?;
            let scrut = self.term()?;
            self.expect_kw("in")?;
            let body = self.term()?;
            let (names, body) = self.bind_all(pats, span, body);
            return Ok(Term::at(
                TermKind::LetPair {
                    scrut: Rc::new(scrut),
                    first: names[0].clone(),
                    second: names[1].clone(),
                    body: Rc::new(body),
                },
                span,
            ));
        }
        if self.is_kw("case") {
            self.bump();
            let scrut = self.scrutinee()?;
            self.expect(&Tok::Bar)?;
            self.expect_kw("inj1")?;
            let p1 = self.pat()?;
            self.expect(&Tok::FatArrow)?;
            let b1 = self.term()?;
            self.expect(&Tok::Bar)?;
            self.expect_kw("inj2")?;
            let p2 = self.pat()?;
            self.expect(&Tok::FatArrow)?;
            let b2 = self.term()?;
            let (n1, b1) = self.bind_all(vec![p1], span, b1);
            let (n2, b2) = self.bind_all(vec![p2], span, b2);
            return Ok(Term::at(
                TermKind::Case {
                    scrut: Rc::new(scrut),
                    left: n1[0].clone(),
                    left_body: Rc::new(b1),
                    right: n2[0].clone(),
                    right_body: Rc::new(b2),
                },
                span,
            ));
        }
        if self.is_kw("rec") {
            self.bump();
            let scrut = self.scrutinee()?;
            self.expect(&Tok::Bar)?;
            self.expect_kw("nil")?;
            self.expect(&Tok::FatArrow)?;
            let nil_case = self.term()?;
            self.expect(&Tok::Bar)?;
            self.expect_kw("cons")?;
            let pats = self.pat_n(3)?;
            self.expect(&Tok::FatArrow)?;
            let step = self.term()?;
            let (names, step) = self.bind_all(pats, span, step);
            return Ok(Term::at(
                TermKind::Rec {
                    scrut: Rc::new(scrut),
                    nil_case: Rc::new(nil_case),
                    diamond: names[0].clone(),
                    head: names[1].clone(),
                    tail: names[2].clone(),
                    step: Rc::new(step),
                },
                span,
            ));
        }
        if self.is_kw("pop") {
            self.bump();
            let scrut = self.scrutinee()?;
            self.expect(&Tok::Bar)?;
            self.expect_kw("empty")?;
            self.expect(&Tok::FatArrow)?;
            let empty_case = self.term()?;
            self.expect(&Tok::Bar)?;
            self.expect_kw("push")?;
            let pats = self.pat_n(2)?;
            self.expect(&Tok::FatArrow)?;
            let step = self.term()?;
            let (names, step) = self.bind_all(pats, span, step);
            return Ok(Term::at(
                TermKind::Pop {
                    scrut: Rc::new(scrut),
                    empty_case: Rc::new(empty_case),
                    head: names[0].clone(),
                    tail: names[1].clone(),
                    step: Rc::new(step),
                },
                span,
            ));
        }
        if self.is_kw("trec") {
            self.bump();
            let scrut = self.scrutinee()?;
            self.expect(&Tok::Bar)?;
            self.expect_kw("leaf")?;
            self.expect(&Tok::FatArrow)?;
            let leaf_case = self.term()?;
            self.expect(&Tok::Bar)?;
            self.expect_kw("node")?;
            let pats = self.pat_n(4)?;
            self.expect(&Tok::FatArrow)?;
            let step = self.term()?;
            let (names, step) = self.bind_all(pats, span, step);
            return Ok(Term::at(
                TermKind::TRec {
                    scrut: Rc::new(scrut),
                    leaf_case: Rc::new(leaf_case),
                    diamond: names[0].clone(),
                    label: names[1].clone(),
                    left: names[2].clone(),
                    right: names[3].clone(),
                    step: Rc::new(step),
                },
                span,
            ));
        }
        self.app()
    }

    fn scrutinee(&mut self) -> PResult<Term> {
        let t = self.term()?;
        self.eat(&Tok::Dot);
        Ok(t)
    }

    /// True when the upcoming tokens start another top-level definition.
    fn at_definition(&self) -> bool {
        matches!(self.peek(), Tok::Ident(s) if !is_keyword(s))
            && matches!(self.peek_at(1), Tok::Colon | Tok::Eq)
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) => {
                !matches!(
                    s.as_str(),
                    "lam" | "rec" | "case" | "letp" | "in" | "pop" | "trec" | "_"
                ) && !self.at_definition()
            }
            Tok::LParen | Tok::LBrace | Tok::Null => true,
            _ => false,
        }
    }

    fn app(&mut self) -> PResult<Term> {
        let mut head = self.atom()?;
        while self.starts_atom() {
            let span = self.span();
            let arg = self.atom()?;
            head = Term::at(TermKind::App(Rc::new(head), Rc::new(arg)), span);
        }
        Ok(head)
    }

    fn args(&mut self, n: usize) -> PResult<Vec<Rc<Term>>> {
        self.expect(&Tok::LParen)?;
        let mut out = vec![Rc::new(self.term()?)];
        for _ in 1..n {
            self.expect(&Tok::Comma)?;
            out.push(Rc::new(self.term()?));
        }
        self.expect(&Tok::RParen)?;
        Ok(out)
    }

    fn atom(&mut self) -> PResult<Term> {
        let span = self.span();
        let kind = match self.peek().clone() {
            Tok::Null => {
                self.bump();
                TermKind::Null
            }
            Tok::LBrace => {
                self.bump();
                let a = self.term()?;
                self.expect(&Tok::Comma)?;
                let b = self.term()?;
                self.expect(&Tok::RBrace)?;
                TermKind::Record(Rc::new(a), Rc::new(b))
            }
            Tok::LParen => {
                self.bump();
                let first = self.term()?;
                if self.eat(&Tok::Colon) {
                    let ty = self.ty()?;
                    self.expect(&Tok::RParen)?;
                    TermKind::Ann(Rc::new(first), ty)
                } else if self.eat(&Tok::Comma) {
                    let mut parts = vec![first, self.term()?];
                    while self.eat(&Tok::Comma) {
                        parts.push(self.term()?);
                    }
                    self.expect(&Tok::RParen)?;
                    let mut acc = parts.pop().unwrap();
                    while let Some(t) = parts.pop() {
                        acc = Term::at(TermKind::Pair(Rc::new(t), Rc::new(acc)), span);
                    }
                    return Ok(acc);
                } else {
                    self.expect(&Tok::RParen)?;
                    return Ok(first);
                }
            }
            Tok::Ident(s) => match s.as_str() {
                "nil" => {
                    self.bump();
                    TermKind::Nil
                }
                "empty" => {
                    self.bump();
                    TermKind::Empty
                }
                "leaf" => {
                    self.bump();
                    TermKind::Leaf
                }
                "cons" => {
                    self.bump();
                    let a = self.args(3)?;
                    TermKind::Cons(a[0].clone(), a[1].clone(), a[2].clone())
                }
                "push" => {
                    self.bump();
                    let a = self.args(2)?;
                    TermKind::Push(a[0].clone(), a[1].clone())
                }
                "node" => {
                    self.bump();
                    let a = self.args(4)?;
                    TermKind::Node(a[0].clone(), a[1].clone(), a[2].clone(), a[3].clone())
                }
                "inj1" | "inj2" | "fst" | "snd" | "proj1" | "proj2" => {
                    self.bump();
                    let arg = Rc::new(self.atom()?);
                    match s.as_str() {
                        "inj1" => TermKind::Inj(Side::Left, arg),
                        "inj2" => TermKind::Inj(Side::Right, arg),
                        "fst" | "proj1" => TermKind::Proj(Side::Left, arg),
                        _ => TermKind::Proj(Side::Right, arg),
                    }
                }
                "lam" | "rec" | "case" | "letp" | "pop" | "trec" => {
                    return self.term();
                }
                "_" => {
                    return Err(ParseError::new(
                        span,
                        "wildcard `_` is only allowed at binding sites",
                    ))
                }
                _ => {
                    let name = self.ident()?;
                    TermKind::Var(Rc::from(name.as_str()))
                }
            },
            _ => return Err(self.unexpected("a term")),
        };
        Ok(Term::at(kind, span))
    }
}

/// Parses a type in the surface syntax.
pub fn parse_type(text: &str) -> Result<Type, ParseError> {
    let mut p = Parser::new(text)?;
    let t = p.ty()?;
    if !p.at_eof() {
        return Err(p.unexpected("end of input"));
    }
    Ok(t)
}

/// Parses a single term in the surface syntax.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(text)?;
    let t = p.term()?;
    if !p.at_eof() {
        return Err(p.unexpected("end of input"));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::super::term::build::*;
    use super::*;

    #[test]
    fn parses_listing_types() {
        assert_eq!(
            parse_type("L(1) -o L(1)").unwrap(),
            Type::arrow(Type::nat(), Type::nat())
        );
        assert_eq!(parse_type("1").unwrap(), Type::Unit);
        assert_eq!(
            parse_type("(L(1) -o L(1)) * L(1)").unwrap(),
            Type::tensor(Type::arrow(Type::nat(), Type::nat()), Type::nat())
        );
        assert_eq!(
            parse_type("1 + diam * 1 * L(1) -o L(1)").unwrap(),
            Type::arrow(
                Type::sum(
                    Type::Unit,
                    Type::tensor(Type::Diamond, Type::tensor(Type::Unit, Type::nat()))
                ),
                Type::nat()
            )
        );
        assert_eq!(
            parse_type("S(1) & Tree(1 + 1)").unwrap(),
            Type::prod(Type::stack(Type::Unit), Type::tree(Type::bool()))
        );
    }

    #[test]
    fn arrows_nest_right() {
        let a = Type::nat();
        assert_eq!(
            parse_type("L(1) -o L(1) -o L(1)").unwrap(),
            Type::arrow(a.clone(), Type::arrow(a.clone(), a))
        );
    }

    #[test]
    fn parses_simple_terms() {
        assert_eq!(parse_term("lam x . x").unwrap(), *lam("x", var("x")));
        assert_eq!(parse_term("<>").unwrap(), *null());
        assert_eq!(
            parse_term("f x y").unwrap(),
            *app(app(var("f"), var("x")), var("y"))
        );
    }

    #[test]
    fn parses_rev_append() {
        let src = "lam l1 . rec l1
            | nil => lam l2 . l2
            | cons (d, x, r) => lam l2 . r (cons (d, x, l2))";
        let expected = lam(
            "l1",
            rec(
                var("l1"),
                lam("l2", var("l2")),
                "d",
                "x",
                "r",
                lam("l2", app(var("r"), cons(var("d"), var("x"), var("l2")))),
            ),
        );
        assert_eq!(parse_term(src).unwrap(), *expected);
    }

    #[test]
    fn tuple_patterns_desugar_to_letp() {
        let t =
            parse_term("case x . | inj1 _ => nil | inj2 (d, y, ys) => cons (d, y, ys)").unwrap();
        let TermKind::Case {
            left,
            right_body,
            right,
            ..
        } = &t.kind
        else {
            panic!("not a case")
        };
        assert!(left.starts_with('_'));
        let TermKind::LetPair {
            scrut,
            first,
            second,
            body,
        } = &right_body.kind
        else {
            panic!("no letp")
        };
        assert_eq!(scrut.kind, TermKind::Var(right.clone()));
        assert_eq!(&**first, "d");
        let TermKind::LetPair {
            scrut: s2,
            first: y,
            second: ys,
            ..
        } = &body.kind
        else {
            panic!("no inner letp")
        };
        assert_eq!(s2.kind, TermKind::Var(second.clone()));
        assert_eq!((&**y, &**ys), ("y", "ys"));
    }

    #[test]
    fn fresh_names_avoid_user_names() {
        let t = parse_term("lam _0 . lam _ . _0").unwrap();
        let TermKind::Lam(_, inner) = &t.kind else {
            panic!()
        };
        let TermKind::Lam(fresh, _) = &inner.kind else {
            panic!()
        };
        assert_ne!(&**fresh, "_0");
    }

    #[test]
    fn reports_positions() {
        let err = parse_term("lam x .\n  (x, )").unwrap_err();
        assert_eq!(err.span, Span { line: 2, col: 7 });
    }

    #[test]
    fn annotation_and_records() {
        assert_eq!(
            parse_term("fst ({<>, nil} : 1 & L(1))").unwrap(),
            *proj(
                Side::Left,
                ann(record(null(), nil()), Type::prod(Type::Unit, Type::nat()))
            )
        );
    }

    #[test]
    fn letp_takes_right_nested_tuples() {
        let t = parse_term("letp (a, b, c) = p in c").unwrap();
        let TermKind::LetPair {
            first,
            second,
            body,
            ..
        } = &t.kind
        else {
            panic!("no letp")
        };
        assert_eq!(&**first, "a");
        let TermKind::LetPair {
            first: b,
            second: c,
            ..
        } = &body.kind
        else {
            panic!("no inner letp")
        };
        assert_eq!((&**b, &**c), ("b", "c"));
        assert_eq!(&*body.free_vars()[0], &**second);
        assert!(parse_term("letp x = p in x").is_err());
    }
}
