//! Textual polynomial syntax: `3*x^2*y - 1/2*z + 4`, vectors `[p1, p2]`.
//!
//! Coefficients are integers combined with `+ - * / ^` and parentheses;
//! division is only allowed by nonzero constants of the field.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::series::{Exponent, Jet, JetRing, JetVector};

/// Degree used for the untruncated intermediate polynomial ring.
const POLY_DEGREE: u32 = u32::MAX / 4;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Sym(char),
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
    offset: usize,
}

fn tokenize(text: &str, line0: usize) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let (mut line, mut col) = (line0, 1);
    let mut i = 0;
    while i < chars.len() {
        let (off, c) = chars[i];
        let (tl, tc) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|p| p.1).collect();
            col += i - start;
            out.push(Token {
                tok: Tok::Num(s.parse().expect("digits")),
                line: tl,
                column: tc,
                offset: off,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|p| p.1).collect();
            col += i - start;
            out.push(Token {
                tok: Tok::Ident(s),
                line: tl,
                column: tc,
                offset: off,
            });
            continue;
        }
        if "+-*/^()[],".contains(c) {
            out.push(Token {
                tok: Tok::Sym(c),
                line: tl,
                column: tc,
                offset: off,
            });
            col += 1;
            i += 1;
            continue;
        }
        return Err(Error::SyntaxError {
            line: tl,
            column: tc,
            message: format!("unexpected character `{c}`"),
        });
    }
    out.push(Token {
        tok: Tok::End,
        line,
        column: col,
        offset: text.len(),
    });
    Ok(out)
}

struct Parser<'a> {
    text: &'a str,
    toks: Vec<Token>,
    pos: usize,
    ring: JetRing,
    poly: JetRing,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, ring: &JetRing, line0: usize) -> Result<Self> {
        Ok(Parser {
            text,
            toks: tokenize(text, line0)?,
            pos: 0,
            ring: ring.clone(),
            poly: ring.with_degree(POLY_DEGREE),
        })
    }

    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, t: &Token, message: impl Into<String>) -> Error {
        Error::SyntaxError {
            line: t.line,
            column: t.column,
            message: message.into(),
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<()> {
        let t = self.next();
        if t.tok == Tok::Sym(c) {
            Ok(())
        } else {
            Err(self.err(&t, format!("expected `{c}`")))
        }
    }

    fn is_sym(&self, c: char) -> bool {
        self.peek().tok == Tok::Sym(c)
    }

    fn expr(&mut self) -> Result<Jet> {
        let mut acc = if self.is_sym('-') {
            self.next();
            self.term()?.neg()
        } else {
            if self.is_sym('+') {
                self.next();
            }
            self.term()?
        };
        loop {
            if self.is_sym('+') {
                self.next();
                acc = &acc + &self.term()?;
            } else if self.is_sym('-') {
                self.next();
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Jet> {
        let mut acc = self.unary()?;
        loop {
            if self.is_sym('*') {
                self.next();
                acc = &acc * &self.unary()?;
            } else if self.is_sym('/') {
                let slash = self.next();
                let start = self.peek().offset;
                let rhs = self.unary()?;
                let end = self.peek().offset;
                let constant = rhs.terms().keys().all(Exponent::is_zero);
                if !constant {
                    return Err(self.err(&slash, "division by a non-constant"));
                }
                let c = rhs.constant_term();
                if c.is_zero() {
                    let lit = self.text[start..end].trim();
                    return Err(Error::CoefficientNotInField(format!("1/{lit}")));
                }
                acc = acc.scale(&c.inv()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Jet> {
        if self.is_sym('-') {
            self.next();
            return Ok(self.unary()?.neg());
        }
        let base = self.atom()?;
        if self.is_sym('^') {
            self.next();
            let t = self.next();
            let Tok::Num(n) = &t.tok else {
                return Err(self.err(&t, "expected a nonnegative integer exponent"));
            };
            let e: u32 = n
                .try_into()
                .map_err(|_| self.err(&t, "exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Jet> {
        let t = self.next();
        match &t.tok {
            Tok::Num(n) => Ok(Jet::constant(&self.poly, self.ring.field().from_bigint(n))),
            Tok::Ident(name) => match self.ring.var_index(name) {
                Some(i) => Ok(Jet::variable(&self.poly, i)),
                None => Err(Error::UnknownVariable {
                    name: name.clone(),
                    line: t.line,
                    column: t.column,
                }),
            },
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect_sym(')')?;
                Ok(e)
            }
            Tok::End => Err(self.err(&t, "unexpected end of input")),
            Tok::Sym(c) => Err(self.err(&t, format!("unexpected `{c}`"))),
        }
    }

    fn finish(&mut self) -> Result<()> {
        let t = self.next();
        if t.tok == Tok::End {
            Ok(())
        } else {
            Err(self.err(&t, "unexpected trailing input"))
        }
    }

    fn to_ring(&self, p: Jet) -> Jet {
        p.truncate(self.ring.degree())
    }
}

/// Parses one polynomial; terms of degree above `D` are dropped and the
/// result is then flagged as a truncation.
pub fn parse_jet(text: &str, ring: &JetRing) -> Result<Jet> {
    parse_jet_at(text, ring, 1)
}

fn parse_jet_at(text: &str, ring: &JetRing, line: usize) -> Result<Jet> {
    let mut p = Parser::new(text, ring, line)?;
    let e = p.expr()?;
    p.finish()?;
    Ok(p.to_ring(e))
}

/// Parses `[p1, …, pN]` or a single polynomial (rank 1).
pub fn parse_vector(text: &str, ring: &JetRing) -> Result<JetVector> {
    parse_vector_at(text, ring, 1)
}

fn parse_vector_at(text: &str, ring: &JetRing, line: usize) -> Result<JetVector> {
    let mut p = Parser::new(text, ring, line)?;
    if !p.is_sym('[') {
        let e = p.expr()?;
        p.finish()?;
        return Ok(JetVector::from_jet(p.to_ring(e)));
    }
    p.next();
    let mut comps = vec![p.expr()?];
    while p.is_sym(',') {
        p.next();
        comps.push(p.expr()?);
    }
    p.expect_sym(']')?;
    p.finish()?;
    let comps = comps.into_iter().map(|c| p.to_ring(c)).collect();
    JetVector::new(comps)
}

/// Parses one vector per nonempty line; `#` starts a comment.
pub fn parse_lines(text: &str, ring: &JetRing) -> Result<Vec<JetVector>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_vector_at(line, ring, i + 1)?);
    }
    Ok(out)
}
