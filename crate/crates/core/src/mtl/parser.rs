//! Recursive-descent parser for the textual MTL grammar:
//!
//! ```text
//! formula  := conj ( '|' conj )*
//! conj     := until ( '&' until )*
//! until    := unary ( 'U' interval until )?
//! unary    := '!' unary | 'G' interval? unary | 'F' interval unary | primary
//! primary  := 'true' | IDENT | '(' formula ')'
//! interval := '[' NUMBER ',' ( NUMBER | 'inf' ) ']'
//! ```
//!
//! Whitespace is ignored. `G`, `F`, `U`, `true` and `inf` are reserved words.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use super::formula::{Formula, Interval};
use super::predicate::PredicateSet;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown atom `{name}` at byte {pos}")]
    UnknownAtom { name: String, pos: usize },
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Number(f64),
    Bang,
    Amp,
    Pipe,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => alloc::format!("`{s}`"),
        Tok::Number(n) => alloc::format!("number {n}"),
        Tok::Bang => "`!`".to_string(),
        Tok::Amp => "`&`".to_string(),
        Tok::Pipe => "`|`".to_string(),
        Tok::LParen => "`(`".to_string(),
        Tok::RParen => "`)`".to_string(),
        Tok::LBracket => "`[`".to_string(),
        Tok::RBracket => "`]`".to_string(),
        Tok::Comma => "`,`".to_string(),
        Tok::End => "end of input".to_string(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let single = match c {
            b'!' => Some(Tok::Bang),
            b'&' => Some(Tok::Amp),
            b'|' => Some(Tok::Pipe),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b'[' => Some(Tok::LBracket),
            b']' => Some(Tok::RBracket),
            b',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(tok) = single {
            out.push((tok, i));
            i += 1;
        } else if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
        } else if c.is_ascii_digit() || c == b'.' || c == b'+' || c == b'-' {
            let start = i;
            i += 1;
            while i < bytes.len() {
                let d = bytes[i];
                let exp_sign = (d == b'+' || d == b'-') && matches!(bytes[i - 1], b'e' | b'E');
                if d.is_ascii_digit() || d == b'.' || d == b'e' || d == b'E' || exp_sign {
                    i += 1;
                } else {
                    break;
                }
            }
            let lexeme = &text[start..i];
            let value = lexeme.parse::<f64>().map_err(|_| ParseError::Syntax {
                pos: start,
                message: alloc::format!("malformed number `{lexeme}`"),
            })?;
            out.push((Tok::Number(value), start));
        } else {
            let ch = text[i..].chars().next().unwrap_or('?');
            return Err(ParseError::Syntax {
                pos: i,
                message: alloc::format!("unexpected character `{ch}`"),
            });
        }
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    predicates: &'a PredicateSet,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn error<T>(&self, expected: &str) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos: self.pos(),
            message: alloc::format!("expected {expected}, found {}", describe(self.peek())),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(&describe(&tok))
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conj()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            lhs = Formula::or(lhs, self.conj()?);
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.until()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            lhs = Formula::and(lhs, self.until()?);
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        if self.is_keyword("U") {
            self.bump();
            let interval = self.interval()?;
            let rhs = self.until()?;
            return Ok(Formula::until(interval, lhs, rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if *self.peek() == Tok::Bang {
            self.bump();
            return Ok(Formula::not(self.unary()?));
        }
        if self.is_keyword("G") {
            self.bump();
            if *self.peek() == Tok::LBracket {
                let interval = self.interval()?;
                return Ok(Formula::globally_within(interval, self.unary()?));
            }
            return Ok(Formula::globally(self.unary()?));
        }
        if self.is_keyword("F") {
            self.bump();
            let interval = self.interval()?;
            return Ok(Formula::eventually(interval, self.unary()?));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(name) => match name.as_str() {
                "true" => {
                    self.bump();
                    Ok(Formula::True)
                }
                "G" | "F" | "U" | "inf" => self.error("a formula"),
                _ => {
                    let p = self
                        .predicates
                        .get(&name)
                        .ok_or(ParseError::UnknownAtom { name: name.clone(), pos })?;
                    self.bump();
                    Ok(Formula::atom(p.clone()))
                }
            },
            _ => self.error("a formula"),
        }
    }

    fn interval(&mut self) -> Result<Interval, ParseError> {
        let start = self.pos();
        self.expect(Tok::LBracket)?;
        let lo = match self.bump() {
            Tok::Number(v) => v,
            _ => {
                self.at -= 1;
                return self.error("interval lower bound");
            }
        };
        self.expect(Tok::Comma)?;
        let hi = if self.is_keyword("inf") {
            self.bump();
            None
        } else if let Tok::Number(v) = *self.peek() {
            self.bump();
            Some(v)
        } else {
            return self.error("interval upper bound or `inf`");
        };
        self.expect(Tok::RBracket)?;
        Interval::new(lo, hi).map_err(|e| ParseError::Syntax { pos: start, message: e.to_string() })
    }
}

/// Parses `text` into a formula whose atoms are resolved against `predicates`.
pub fn parse_formula(text: &str, predicates: &PredicateSet) -> Result<Formula, ParseError> {
    let mut p = Parser { toks: lex(text)?, at: 0, predicates };
    let f = p.formula()?;
    if *p.peek() != Tok::End {
        return p.error("end of input");
    }
    Ok(f)
}
