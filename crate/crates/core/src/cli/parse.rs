//! Bundle expressions:
//!
//! ```text
//! bundle := "0" | term ("+" term)*
//! term   := "O(" int ["/" posint] ")" ["^" posint]
//! ```
//!
//! Whitespace between tokens is ignored. Input need not be canonical.

use thiserror::Error;

use crate::bundle::Bundle;
use crate::error::HnError;
use crate::slope::Slope;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("invalid bundle at byte {offset}: {source}")]
    Value { offset: usize, source: HnError },
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        let rest = &self.text[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { offset: self.pos, message: message.into() })
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        match self.peek() {
            Some(got) if got == c => {
                self.pos += c.len_utf8();
                Ok(())
            }
            Some(got) => self.fail(format!("expected '{c}', found '{got}'")),
            None => self.fail(format!("expected '{c}', found end of input")),
        }
    }

    /// An optionally signed decimal integer; returns its start offset too.
    fn integer(&mut self, signed: bool) -> Result<(i128, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.text.as_bytes();
        let mut end = start;
        if signed && end < bytes.len() && bytes[end] == b'-' {
            end += 1;
        }
        let digits_from = end;
        while end < bytes.len() && bytes[end].is_ascii_digit() {
            end += 1;
        }
        if end == digits_from {
            return self.fail(if signed { "expected an integer" } else { "expected a positive integer" });
        }
        let value: i128 = self.text[start..end].parse().map_err(|_| ParseError::Value {
            offset: start,
            source: HnError::Overflow,
        })?;
        self.pos = end;
        Ok((value, start))
    }

    fn term(&mut self) -> Result<(Slope, u64), ParseError> {
        self.expect('O')?;
        self.expect('(')?;
        let (num, num_at) = self.integer(true)?;
        let (den, den_at) = if self.peek() == Some('/') {
            self.pos += 1;
            self.integer(false)?
        } else {
            (1, num_at)
        };
        self.expect(')')?;
        let mult = if self.peek() == Some('^') {
            self.pos += 1;
            let (m, at) = self.integer(false)?;
            if m == 0 {
                return Err(ParseError::Syntax { offset: at, message: "exponent must be at least 1".into() });
            }
            u64::try_from(m).map_err(|_| ParseError::Value { offset: at, source: HnError::Overflow })?
        } else {
            1
        };
        let value_err = |source| ParseError::Value { offset: num_at, source };
        if den == 0 {
            return Err(ParseError::Value { offset: den_at, source: HnError::ZeroDenominator });
        }
        let num = i64::try_from(num).map_err(|_| value_err(HnError::Overflow))?;
        let den = i64::try_from(den).map_err(|_| value_err(HnError::Overflow))?;
        let slope = Slope::new(num, den).map_err(value_err)?;
        Ok((slope, mult))
    }
}

pub fn parse_bundle(text: &str) -> Result<Bundle, ParseError> {
    let mut cur = Cursor { text, pos: 0 };
    if cur.peek() == Some('0') {
        cur.pos += 1;
        return match cur.peek() {
            None => Ok(Bundle::zero()),
            Some(c) => cur.fail(format!("unexpected '{c}' after 0")),
        };
    }
    let mut terms = vec![cur.term()?];
    loop {
        match cur.peek() {
            None => break,
            Some('+') => {
                cur.pos += 1;
                terms.push(cur.term()?);
            }
            Some(c) => return cur.fail(format!("expected '+' or end of input, found '{c}'")),
        }
    }
    Bundle::from_unsigned(terms).map_err(|source| ParseError::Value { offset: 0, source })
}

/// Canonical text form, which [`parse_bundle`] reads back unchanged.
pub fn format_bundle(b: &Bundle) -> String {
    b.to_string()
}
