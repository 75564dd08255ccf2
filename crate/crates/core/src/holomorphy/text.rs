//! Prefix text form of phrases.
//!
//! ```text
//! phrase := "z" INDEX                       variable
//!         | NUMBER                          real constant
//!         | "[" NUMBER{2^r} "]"             constant, one coefficient per generator
//!         | "(" OP phrase+ ")"
//! OP     := neg | conj | inv                (one child)
//!         | add | mul                       (two or more children, folded left)
//!         | sub                             (two children, a + (neg b))
//! ```
//!
//! [`to_text`] emits only `neg conj inv add mul`, binary. Whitespace separates
//! tokens; `;` starts a comment running to end of line.

use std::fmt::Display;
use std::str::FromStr;

use super::phrase::Phrase;
use crate::algebra::CdElement;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub fn to_text<T: Scalar + Display>(p: &Phrase<T>) -> String {
    let mut out = String::new();
    write_phrase(p, &mut out);
    out
}

fn write_phrase<T: Scalar + Display>(p: &Phrase<T>, out: &mut String) {
    let op = |out: &mut String, name: &str, kids: &[&Phrase<T>]| {
        out.push('(');
        out.push_str(name);
        for k in kids {
            out.push(' ');
            write_phrase(k, out);
        }
        out.push(')');
    };
    match p {
        Phrase::Var(k) => out.push_str(&format!("z{k}")),
        Phrase::Const(c) => {
            out.push('[');
            for (i, x) in c.coeffs().iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                out.push_str(&x.to_string());
            }
            out.push(']');
        }
        Phrase::Neg(a) => op(out, "neg", &[a]),
        Phrase::Conj(a) => op(out, "conj", &[a]),
        Phrase::Inv(a) => op(out, "inv", &[a]),
        Phrase::Add(a, b) => op(out, "add", &[a, b]),
        Phrase::Mul(a, b) => op(out, "mul", &[a, b]),
    }
}

/// Parse a phrase at the given level.
pub fn parse<T: Scalar + FromStr>(text: &str, level: u32) -> Result<Phrase<T>> {
    crate::algebra::check_level(level)?;
    let mut parser = Parser { src: text, pos: 0, level };
    let p = parser.phrase()?;
    parser.skip_ws();
    if parser.pos < text.len() {
        return Err(parser.error("trailing input"));
    }
    Ok(p)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    level: u32,
}

impl Parser<'_> {
    fn error(&self, msg: impl Into<String>) -> Error {
        Error::PhraseParse { pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() {
            match bytes[self.pos] {
                b' ' | b'\t' | b'\n' | b'\r' | b',' => self.pos += 1,
                b';' => {
                    while self.pos < bytes.len() && bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.as_bytes().get(self.pos).copied()
    }

    fn atom(&mut self) -> &str {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && !matches!(bytes[self.pos], b' ' | b'\t' | b'\n' | b'\r' | b',' | b'(' | b')' | b'[' | b']' | b';') {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn number<T: FromStr>(&mut self) -> Result<T> {
        let start = self.pos;
        let tok = self.atom().to_string();
        tok.parse::<T>().map_err(|_| Error::PhraseParse { pos: start, msg: format!("bad number '{tok}'") })
    }

    fn expect(&mut self, byte: u8) -> Result<()> {
        if self.peek() == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected '{}'", byte as char)))
        }
    }

    fn phrase<T: Scalar + FromStr>(&mut self) -> Result<Phrase<T>> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let op_pos = self.pos;
                let op = self.atom().to_string();
                let mut kids = Vec::new();
                while !matches!(self.peek(), Some(b')') | None) {
                    kids.push(self.phrase()?);
                }
                self.expect(b')')?;
                let err = |msg: String| Error::PhraseParse { pos: op_pos, msg };
                let unary = |kids: Vec<Phrase<T>>, f: fn(Phrase<T>) -> Phrase<T>| -> Result<Phrase<T>> {
                    let [k]: [Phrase<T>; 1] = kids.try_into().map_err(|_| err(format!("'{op}' takes one argument")))?;
                    Ok(f(k))
                };
                match op.as_str() {
                    "neg" => unary(kids, Phrase::neg),
                    "conj" => unary(kids, Phrase::conj),
                    "inv" => unary(kids, Phrase::inv),
                    "add" | "mul" => {
                        if kids.len() < 2 {
                            return Err(err(format!("'{op}' takes at least two arguments")));
                        }
                        let f = if op == "add" { Phrase::add } else { Phrase::mul };
                        Ok(kids.into_iter().reduce(f).expect("nonempty"))
                    }
                    "sub" => {
                        let [a, b]: [Phrase<T>; 2] = kids.try_into().map_err(|_| err("'sub' takes two arguments".into()))?;
                        Ok(Phrase::sub(a, b))
                    }
                    other => Err(err(format!("unknown operator '{other}'"))),
                }
            }
            Some(b'[') => {
                self.pos += 1;
                let mut coeffs = Vec::new();
                while !matches!(self.peek(), Some(b']') | None) {
                    coeffs.push(self.number::<T>()?);
                }
                self.expect(b']')?;
                let expected = 1usize << self.level;
                if coeffs.len() != expected {
                    return Err(self.error(format!("constant needs {expected} coefficients, got {}", coeffs.len())));
                }
                Ok(Phrase::Const(CdElement::new(self.level, coeffs)?))
            }
            Some(b'z') => {
                let start = self.pos;
                let tok = self.atom().to_string();
                tok[1..]
                    .parse::<usize>()
                    .map(Phrase::Var)
                    .map_err(|_| Error::PhraseParse { pos: start, msg: format!("bad variable '{tok}'") })
            }
            Some(b')') | Some(b']') => Err(self.error("unbalanced bracket")),
            Some(_) => Ok(Phrase::real(self.level, self.number::<T>()?)),
        }
    }
}
