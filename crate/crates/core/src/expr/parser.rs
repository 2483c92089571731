//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := '-' term | product
//! product  := power (('*' | '/') power)*
//! power    := atom ('^' exponent)?          -- '^' is right-associative
//! exponent := '-' exponent | power
//! atom     := number | 't' | 'pi' | 'e' | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! Unary minus binds an entire product: `-2*t` parses as `-(2*t)`.

use super::{Expr, UnaryOp};

/// Parse failure with the byte offset of the offending token.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at offset {offset}: {message}")]
pub struct SyntaxError {
    pub offset: usize,
    pub message: String,
}

fn err(offset: usize, message: impl Into<String>) -> SyntaxError {
    SyntaxError {
        offset,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Token)>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'+' => {
                tokens.push((i, Token::Plus));
                i += 1;
            }
            b'-' => {
                tokens.push((i, Token::Minus));
                i += 1;
            }
            b'*' => {
                if bytes.get(i + 1) == Some(&b'*') {
                    return Err(err(i, "'**' is not an operator; use '^' for powers"));
                }
                tokens.push((i, Token::Star));
                i += 1;
            }
            b'/' => {
                tokens.push((i, Token::Slash));
                i += 1;
            }
            b'^' => {
                tokens.push((i, Token::Caret));
                i += 1;
            }
            b'(' => {
                tokens.push((i, Token::LParen));
                i += 1;
            }
            b')' => {
                tokens.push((i, Token::RParen));
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                let slice = &text[start..i];
                let value: f64 = slice
                    .parse()
                    .map_err(|_| err(start, format!("invalid number literal `{slice}`")))?;
                tokens.push((start, Token::Number(value)));
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                tokens.push((start, Token::Ident(text[start..i].to_string())));
            }
            _ => {
                let ch = text[i..].chars().next().unwrap();
                return Err(err(i, format!("unrecognized character `{ch}`")));
            }
        }
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: &'a [(usize, Token)],
    pos: usize,
    end_offset: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|(o, _)| *o)
            .unwrap_or(self.end_offset)
    }

    fn bump(&mut self) -> Option<&'a Token> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t);
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: &Token, what: &str) -> Result<(), SyntaxError> {
        if self.peek() == Some(want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(err(self.offset(), format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = Expr::add(lhs, rhs);
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = Expr::sub(lhs, rhs);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, SyntaxError> {
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            let inner = self.term()?;
            return Ok(Expr::neg(inner));
        }
        self.product()
    }

    fn product(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.power()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    let rhs = self.power()?;
                    lhs = Expr::mul(lhs, rhs);
                }
                Some(Token::Slash) => {
                    self.pos += 1;
                    let rhs = self.power()?;
                    lhs = Expr::div(lhs, rhs);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn power(&mut self) -> Result<Expr, SyntaxError> {
        let base = self.atom()?;
        if self.peek() == Some(&Token::Caret) {
            self.pos += 1;
            let exponent = self.exponent()?;
            return Ok(Expr::pow(base, exponent));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<Expr, SyntaxError> {
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            let inner = self.exponent()?;
            return Ok(Expr::neg(inner));
        }
        self.power()
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        let offset = self.offset();
        match self.bump() {
            Some(Token::Number(v)) => Ok(Expr::Constant(*v)),
            Some(Token::LParen) => {
                let inner = self.expr()?;
                self.expect(&Token::RParen, "`)` to close the parenthesis")?;
                Ok(inner)
            }
            Some(Token::Ident(name)) => match name.as_str() {
                "t" => Ok(Expr::Variable),
                "pi" => Ok(Expr::Constant(std::f64::consts::PI)),
                "e" => Ok(Expr::Constant(std::f64::consts::E)),
                "sin" | "cos" | "tan" | "sinh" | "cosh" | "tanh" | "exp" | "log" | "sqrt" => {
                    let op = match name.as_str() {
                        "sin" => UnaryOp::Sin,
                        "cos" => UnaryOp::Cos,
                        "tan" => UnaryOp::Tan,
                        "sinh" => UnaryOp::Sinh,
                        "cosh" => UnaryOp::Cosh,
                        "tanh" => UnaryOp::Tanh,
                        "exp" => UnaryOp::Exp,
                        "log" => UnaryOp::Log,
                        _ => UnaryOp::Sqrt,
                    };
                    self.expect(&Token::LParen, "`(` after function name")?;
                    let arg = self.expr()?;
                    self.expect(&Token::RParen, "`)` to close the argument list")?;
                    Ok(Expr::unary(op, arg))
                }
                other => Err(err(offset, format!("unknown function or symbol `{other}`"))),
            },
            Some(_) => Err(err(offset, "expected a number, `t`, a function or `(`")),
            None => Err(err(offset, "unexpected end of input")),
        }
    }
}

/// Parse `text` into an [`Expr`].
///
/// Printing the result and re-parsing yields a structurally identical tree.
pub fn parse(text: &str) -> Result<Expr, SyntaxError> {
    let tokens = lex(text)?;
    let mut parser = Parser {
        tokens: &tokens,
        pos: 0,
        end_offset: text.len(),
    };
    let expr = parser.expr()?;
    if parser.pos < tokens.len() {
        return Err(err(parser.offset(), "unexpected trailing token"));
    }
    Ok(expr)
}
