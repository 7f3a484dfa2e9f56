use thiserror::Error;

use super::value::Value;
use crate::syntax::Side;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("column {col}: {message}")]
pub struct LiteralError {
    pub col: usize,
    pub message: String,
}

/// Parses a value literal: `<>`, `inj1 v`, `inj2 v`, `(v, v, ...)`,
/// `[v, ...]`, `stack[v, ...]`, `leaf`, `node(v, t, t)`.
pub fn parse_value(src: &str) -> Result<Value, LiteralError> {
    let mut p = Lit { src, pos: 0 };
    let v = p.value()?;
    p.skip_ws();
    if p.pos < src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(v)
}

struct Lit<'a> {
    src: &'a str,
    pos: usize,
}

impl Lit<'_> {
    fn err(&self, message: &str) -> LiteralError {
        LiteralError {
            col: self.pos + 1,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), LiteralError> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{s}`")))
        }
    }

    fn word(&mut self) -> Option<&str> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(rest.len());
        (len > 0).then(|| &rest[..len])
    }

    fn items(&mut self, close: &str) -> Result<Vec<Value>, LiteralError> {
        let mut out = Vec::new();
        if self.eat(close) {
            return Ok(out);
        }
        loop {
            out.push(self.value()?);
            if self.eat(close) {
                return Ok(out);
            }
            self.expect(",")?;
        }
    }

    fn value(&mut self) -> Result<Value, LiteralError> {
        if self.eat("<>") {
            return Ok(Value::Null);
        }
        if self.eat("[") {
            return Ok(Value::list(self.items("]")?));
        }
        if self.eat("(") {
            let mut parts = self.items(")")?;
            let Some(mut acc) = parts.pop() else {
                return Err(self.err("empty tuple"));
            };
            while let Some(v) = parts.pop() {
                acc = Value::pair(v, acc);
            }
            return Ok(acc);
        }
        let Some(w) = self.word() else {
            return Err(self.err("expected a value"));
        };
        let w = w.to_string();
        let start = self.pos;
        self.pos += w.len();
        match w.as_str() {
            "inj1" => Ok(Value::inj(Side::Left, self.value()?)),
            "inj2" => Ok(Value::inj(Side::Right, self.value()?)),
            "leaf" => Ok(Value::Leaf),
            "stack" => {
                self.expect("[")?;
                Ok(Value::stack(self.items("]")?))
            }
            "node" => {
                self.expect("(")?;
                let x = self.value()?;
                self.expect(",")?;
                let l = self.value()?;
                self.expect(",")?;
                let r = self.value()?;
                self.expect(")")?;
                Ok(Value::node(x, l, r))
            }
            "diamond" | "diam" => {
                self.pos = start;
                Err(self.err(
                    "diamonds cannot be given as inputs; they are implicit in list cells and tree nodes",
                ))
            }
            _ => {
                self.pos = start;
                Err(self.err(&format!("unexpected `{w}`")))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals() {
        assert_eq!(parse_value("<>").unwrap(), Value::Null);
        assert_eq!(parse_value("[ <>, <>, <> ]").unwrap(), Value::nat(3));
        assert_eq!(
            parse_value("[inj1 <>, inj2 <>]").unwrap(),
            Value::list(vec![Value::bool(false), Value::bool(true)])
        );
        assert_eq!(
            parse_value("(<>, [], leaf)").unwrap(),
            Value::pair(Value::Null, Value::pair(Value::Nil, Value::Leaf))
        );
        assert_eq!(
            parse_value("stack[<>]").unwrap(),
            Value::push(Value::Null, Value::Empty)
        );
        assert_eq!(
            parse_value("node(<>, leaf, leaf)").unwrap(),
            Value::node(Value::Null, Value::Leaf, Value::Leaf)
        );
        assert!(parse_value("diamond")
            .unwrap_err()
            .message
            .contains("implicit"));
        assert!(parse_value("[<>,").is_err());
        assert!(parse_value("<> <>").is_err());
    }

    #[test]
    fn printing_round_trips() {
        for src in [
            "[inj2 <>, inj1 <>]",
            "(<>, stack[inj1 (<>, <>)])",
            "node(<>, node(<>, leaf, leaf), leaf)",
            "inj2 inj1 []",
        ] {
            let v = parse_value(src).unwrap();
            assert_eq!(parse_value(&v.to_string()).unwrap(), v);
        }
    }
}
