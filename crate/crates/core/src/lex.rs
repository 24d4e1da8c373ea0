//! Token stream shared by the element-literal parser and the term language.

use crate::error::{Error, Result};
use num::bigint::BigInt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Nat(BigInt),
    Ident(String),
    Sym(char),
}

#[derive(Debug, Clone)]
pub struct Tokens {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Tokens {
    pub fn lex(text: &str) -> Result<Tokens> {
        let bytes = text.as_bytes();
        let mut toks = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            let b = bytes[i];
            if b.is_ascii_whitespace() {
                i += 1;
            } else if b.is_ascii_digit() {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = text[start..i].parse().unwrap();
                toks.push((start, Tok::Nat(n)));
            } else if b.is_ascii_alphabetic() || b == b'_' {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                toks.push((start, Tok::Ident(text[start..i].to_string())));
            } else if b"+-*/()[],<=".contains(&b) {
                toks.push((i, Tok::Sym(b as char)));
                i += 1;
            } else {
                return Err(Error::parse(i, format!("unexpected character `{}`", b as char)));
            }
        }
        Ok(Tokens { toks, pos: 0, end: text.len() })
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    pub fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|(_, t)| t)
    }

    pub fn next_tok(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    pub fn mark(&self) -> usize {
        self.pos
    }

    pub fn reset(&mut self, mark: usize) {
        self.pos = mark;
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub fn eat_sym(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect_sym(&mut self, c: char) -> Result<()> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            Err(Error::parse(self.offset(), format!("expected `{c}`")))
        }
    }

    pub fn eat_ident(&mut self, name: &str) -> bool {
        if let Some(Tok::Ident(s)) = self.peek() {
            if s == name {
                self.pos += 1;
                return true;
            }
        }
        false
    }

    pub fn expect_end(&self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(Error::parse(self.offset(), "trailing input"))
        }
    }

    pub fn nat_u32(&mut self) -> Result<u32> {
        match self.next_tok() {
            Some(Tok::Nat(n)) => n
                .to_string()
                .parse()
                .map_err(|_| Error::parse(self.offset(), "number out of range")),
            _ => Err(Error::parse(self.offset(), "expected number")),
        }
    }

    pub fn int_i64(&mut self) -> Result<i64> {
        let neg = self.eat_sym('-');
        match self.next_tok() {
            Some(Tok::Nat(n)) => {
                let v: i64 = n
                    .to_string()
                    .parse()
                    .map_err(|_| Error::parse(self.offset(), "number out of range"))?;
                Ok(if neg { -v } else { v })
            }
            _ => Err(Error::parse(self.offset(), "expected integer")),
        }
    }
}
