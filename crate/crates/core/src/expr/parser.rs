//! Recursive-descent parser for scale-factor expressions.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor (("*" | "/") factor)*
//! factor := unary ("^" factor)?
//! unary  := "-" unary | atom
//! atom   := NUMBER | "t" | IDENT "(" expr ")" | "(" expr ")"
//! ```
//!
//! `^` is right-associative and unary minus binds tighter than the base of
//! `^`, so `-t^2` is `(-t)^2`.

use super::ast::{Expr, Func};
use super::ExprError;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::End => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src, pos: 0 }
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        let trimmed = rest.trim_start();
        self.pos += rest.len() - trimmed.len();
    }

    /// Returns the token and the byte offset where it starts.
    fn next(&mut self) -> Result<(Tok, usize), ExprError> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let Some(&c) = bytes.get(self.pos) else {
            return Ok((Tok::End, start));
        };
        let single = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            self.pos += 1;
            return Ok((tok, start));
        }
        if c.is_ascii_digit() || c == b'.' {
            return self.number(start).map(|v| (Tok::Num(v), start));
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let mut end = self.pos;
            while end < bytes.len() && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_') {
                end += 1;
            }
            self.pos = end;
            return Ok((Tok::Ident(self.src[start..end].to_string()), start));
        }
        let ch = self.src[start..].chars().next().unwrap_or('?');
        Err(ExprError::Syntax {
            offset: start,
            expected: vec!["expression".into()],
            found: format!("character '{ch}'"),
        })
    }

    fn number(&mut self, start: usize) -> Result<f64, ExprError> {
        let bytes = self.src.as_bytes();
        let mut end = start;
        let digits = |end: &mut usize| {
            let s = *end;
            while *end < bytes.len() && bytes[*end].is_ascii_digit() {
                *end += 1;
            }
            *end - s
        };
        let mut n = digits(&mut end);
        if end < bytes.len() && bytes[end] == b'.' {
            end += 1;
            n += digits(&mut end);
        }
        if n == 0 {
            return Err(ExprError::Syntax {
                offset: start,
                expected: vec!["digit".into()],
                found: "'.'".into(),
            });
        }
        if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
            let mut exp_end = end + 1;
            if exp_end < bytes.len() && (bytes[exp_end] == b'+' || bytes[exp_end] == b'-') {
                exp_end += 1;
            }
            if digits(&mut exp_end) == 0 {
                return Err(ExprError::Syntax {
                    offset: exp_end,
                    expected: vec!["exponent digits".into()],
                    found: "malformed exponent".into(),
                });
            }
            end = exp_end;
        }
        self.pos = end;
        self.src[start..end].parse::<f64>().map_err(|_| ExprError::Syntax {
            offset: start,
            expected: vec!["number".into()],
            found: self.src[start..end].to_string(),
        })
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    var: &'a str,
    tok: Tok,
    at: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, var: &'a str) -> Result<Self, ExprError> {
        let mut lexer = Lexer::new(src);
        let (tok, at) = lexer.next()?;
        Ok(Parser { lexer, var, tok, at })
    }

    fn bump(&mut self) -> Result<(), ExprError> {
        let (tok, at) = self.lexer.next()?;
        self.tok = tok;
        self.at = at;
        Ok(())
    }

    fn unexpected(&self, expected: &[&str]) -> ExprError {
        ExprError::Syntax {
            offset: self.at,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.tok.describe(),
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            match self.tok {
                Tok::Plus => {
                    self.bump()?;
                    lhs = lhs + self.term()?;
                }
                Tok::Minus => {
                    self.bump()?;
                    lhs = lhs - self.term()?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.factor()?;
        loop {
            match self.tok {
                Tok::Star => {
                    self.bump()?;
                    lhs = lhs * self.factor()?;
                }
                Tok::Slash => {
                    self.bump()?;
                    lhs = lhs / self.factor()?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        let base = self.unary()?;
        if self.tok == Tok::Caret {
            self.bump()?;
            let exp = self.factor()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.tok == Tok::Minus {
            self.bump()?;
            return Ok(-self.unary()?);
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match std::mem::replace(&mut self.tok, Tok::End) {
            Tok::Num(v) => {
                self.bump()?;
                Ok(Expr::Const(v))
            }
            Tok::Ident(name) if name == self.var => {
                self.bump()?;
                Ok(Expr::Var)
            }
            Tok::Ident(name) => {
                let at = self.at;
                let func = Func::from_name(&name).ok_or(ExprError::UnknownFunction {
                    name: name.clone(),
                    offset: at,
                })?;
                self.bump()?;
                self.expect_lparen()?;
                let arg = self.expr()?;
                self.expect_rparen()?;
                Ok(Expr::call(func, arg))
            }
            Tok::LParen => {
                self.bump()?;
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            other => {
                self.tok = other;
                Err(self.unexpected(&["number", "'t'", "function", "'('", "'-'"]))
            }
        }
    }

    fn expect_lparen(&mut self) -> Result<(), ExprError> {
        if self.tok != Tok::LParen {
            return Err(self.unexpected(&["'('"]));
        }
        self.bump()
    }

    fn expect_rparen(&mut self) -> Result<(), ExprError> {
        if self.tok != Tok::RParen {
            return Err(self.unexpected(&["')'", "operator"]));
        }
        self.bump()
    }
}

/// Parses `text` into an expression tree.
pub fn parse(text: &str) -> Result<Expr, ExprError> {
    parse_with_var(text, "t")
}

/// Like [`parse`] but with a different name for the variable. The tree is
/// the same; printing always uses `t`.
pub fn parse_with_var(text: &str, var: &str) -> Result<Expr, ExprError> {
    let mut p = Parser::new(text, var)?;
    let e = p.expr()?;
    if p.tok != Tok::End {
        return Err(p.unexpected(&["operator", "end of input"]));
    }
    Ok(e)
}
