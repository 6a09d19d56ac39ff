//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr   := term (("+"|"-") term)*
//! term   := factor (("*"|"/") factor)*
//! factor := atom ("^" ["-"] number)? | "-" factor
//! atom   := number | "x" integer | func "(" expr ")" | "(" expr ")"
//! func   := "abs" | "exp" | "log" | "sin" | "cos"
//! ```
//!
//! Whitespace between tokens is ignored. A `-` directly in front of a numeric
//! literal that is not raised to a power is read as a negative literal, so
//! `-2` is `Const(-2)` while `-2^2` is `Neg(Pow(2, 2))`.

use thiserror::Error;

use super::{Expr, Func};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("variable x{index} at offset {offset} is outside 1..={dim}")]
    VariableOutOfRange {
        index: usize,
        dim: usize,
        offset: usize,
    },
}

/// Parse `text` as an expression over the variables `x1..xn`.
pub fn parse(text: &str, n: usize) -> Result<Expr, ParseError> {
    if n == 0 {
        return Err(ParseError::Syntax {
            offset: 0,
            message: "dimension must be at least 1".into(),
        });
    }
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        dim: n,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(format!("unexpected '{}'", p.src[p.pos] as char)));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    dim: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            match self.peek() {
                Some(got) => Err(self.error(format!("expected '{}', found '{}'", c as char, got as char))),
                None => Err(self.error(format!("expected '{}', found end of input", c as char))),
            }
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                let rhs = self.term()?;
                lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
            } else if self.eat(b'-') {
                let rhs = self.term()?;
                lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat(b'*') {
                let rhs = self.factor()?;
                lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
            } else if self.eat(b'/') {
                let rhs = self.factor()?;
                lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            if let Some(c) = self.peek() {
                if c.is_ascii_digit() || c == b'.' {
                    let save = self.pos;
                    let value = self.number()?;
                    if self.peek() != Some(b'^') {
                        return Ok(Expr::Const(-value));
                    }
                    self.pos = save;
                }
            }
            let inner = self.factor()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        let base = self.atom()?;
        if self.eat(b'^') {
            let negative = self.eat(b'-');
            match self.peek() {
                Some(c) if c.is_ascii_digit() || c == b'.' => {}
                _ => return Err(self.error("expected numeric exponent after '^'")),
            }
            let value = self.number()?;
            return Ok(Expr::Pow(Box::new(base), if negative { -value } else { value }));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let c = match self.peek() {
            Some(c) => c,
            None => return Err(self.error("unexpected end of input")),
        };
        if c.is_ascii_digit() || c == b'.' {
            return Ok(Expr::Const(self.number()?));
        }
        if c == b'(' {
            self.pos += 1;
            let e = self.expr()?;
            self.expect(b')')?;
            return Ok(e);
        }
        if c.is_ascii_alphabetic() {
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
                self.pos += 1;
            }
            let word = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
            if word == "x" {
                self.skip_ws();
                let digits_start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                if digits_start == self.pos {
                    return Err(self.error("expected variable index after 'x'"));
                }
                let text = std::str::from_utf8(&self.src[digits_start..self.pos]).unwrap_or("");
                let index: usize = text.parse().map_err(|_| ParseError::Syntax {
                    offset: digits_start,
                    message: format!("invalid variable index '{text}'"),
                })?;
                if index == 0 || index > self.dim {
                    return Err(ParseError::VariableOutOfRange {
                        index,
                        dim: self.dim,
                        offset: start,
                    });
                }
                return Ok(Expr::Var(index));
            }
            if let Some(f) = Func::from_name(word) {
                self.expect(b'(')?;
                let arg = self.expr()?;
                self.expect(b')')?;
                return Ok(Expr::Func(f, Box::new(arg)));
            }
            return Err(ParseError::Syntax {
                offset: start,
                message: format!("unknown identifier '{word}'"),
            });
        }
        Err(self.error(format!("unexpected '{}'", c as char)))
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let s = self.src;
        let mut i = self.pos;
        while i < s.len() && s[i].is_ascii_digit() {
            i += 1;
        }
        if i < s.len() && s[i] == b'.' {
            i += 1;
            while i < s.len() && s[i].is_ascii_digit() {
                i += 1;
            }
        }
        if i < s.len() && (s[i] == b'e' || s[i] == b'E') {
            let mut j = i + 1;
            if j < s.len() && (s[j] == b'+' || s[j] == b'-') {
                j += 1;
            }
            if j < s.len() && s[j].is_ascii_digit() {
                while j < s.len() && s[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        let text = std::str::from_utf8(&s[start..i]).unwrap_or("");
        let value: f64 = text.parse().map_err(|_| ParseError::Syntax {
            offset: start,
            message: format!("invalid number '{text}'"),
        })?;
        self.pos = i;
        Ok(value)
    }
}
