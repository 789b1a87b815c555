//! Parser for the concrete expression syntax.
//!
//! Grammar, loosest to tightest binding: sums (`+`), products (`*`),
//! Kronecker products (`kron`), atoms. `*` doubles as scalar, scalar-matrix,
//! and matrix multiplication; the reading is inferred from the syntactic
//! kind of the operands, and a scalar factor must stand on the left of a
//! matrix. Complex constants are written `a`, `bi`, or `a + bi`.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::lang::Expr;

#[derive(Debug, Error, PartialEq)]
#[error("parse error at line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Parses one expression; the whole input must be consumed.
pub fn parse(text: &str) -> Result<Expr<Complex64>, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0 };
    let (expr, _) = p.add()?;
    let t = p.peek();
    if !matches!(t.kind, TokenKind::Eof) {
        return Err(p.error_at(t.line, t.column, "unexpected trailing input"));
    }
    Ok(expr)
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Ident(String),
    /// A numeric literal; `imaginary` when written with the `i` suffix.
    Number { value: f64, imaginary: bool },
    LParen,
    RParen,
    Comma,
    Star,
    Plus,
    Minus,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut line = 1;
    let mut column = 1;
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let (l, c) = (line, column);
        let ch = chars[i];
        let mut push = |kind| tokens.push(Token { kind, line: l, column: c });
        match ch {
            '\n' => {
                line += 1;
                column = 1;
                i += 1;
                continue;
            }
            ' ' | '\t' | '\r' => {}
            '(' => push(TokenKind::LParen),
            ')' => push(TokenKind::RParen),
            ',' => push(TokenKind::Comma),
            '*' => push(TokenKind::Star),
            '+' => push(TokenKind::Plus),
            '-' => push(TokenKind::Minus),
            '#' => {
                // Comment to end of line.
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            _ if ch.is_ascii_digit() || ch == '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let value = text.parse::<f64>().map_err(|_| ParseError {
                    line: l,
                    column: c,
                    message: format!("malformed number `{text}`"),
                })?;
                let imaginary = i < chars.len() && chars[i] == 'i';
                if imaginary {
                    i += 1;
                }
                column += i - start;
                tokens.push(Token { kind: TokenKind::Number { value, imaginary }, line: l, column: c });
                continue;
            }
            _ if ch.is_ascii_alphabetic() || ch == '_' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_alphanumeric() || chars[i] == '_')
                {
                    i += 1;
                }
                let name: String = chars[start..i].iter().collect();
                column += i - start;
                tokens.push(Token { kind: TokenKind::Ident(name), line: l, column: c });
                continue;
            }
            _ => {
                return Err(ParseError {
                    line: l,
                    column: c,
                    message: format!("unexpected character `{ch}`"),
                })
            }
        }
        i += 1;
        column += 1;
    }
    tokens.push(Token { kind: TokenKind::Eof, line, column });
    Ok(tokens)
}

/// Syntactic kind of a parsed subexpression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Scalar,
    Matrix,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Scalar => write!(f, "scalar"),
            Kind::Matrix => write!(f, "matrix"),
        }
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

type Parsed = Result<(Expr<Complex64>, Kind), ParseError>;

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if !matches!(t.kind, TokenKind::Eof) {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, line: usize, column: usize, message: impl Into<String>) -> ParseError {
        ParseError { line, column, message: message.into() }
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> Result<Token, ParseError> {
        let t = self.next();
        if t.kind == kind {
            Ok(t)
        } else {
            Err(self.error_at(t.line, t.column, format!("expected {what}")))
        }
    }

    fn add(&mut self) -> Parsed {
        let (mut expr, kind) = self.mul()?;
        while matches!(self.peek().kind, TokenKind::Plus) {
            let op = self.next();
            let (rhs, rkind) = self.mul()?;
            if kind != rkind {
                return Err(self.error_at(
                    op.line,
                    op.column,
                    format!("cannot add a {kind} and a {rkind}"),
                ));
            }
            expr = match kind {
                Kind::Scalar => Expr::sadd(expr, rhs),
                Kind::Matrix => Expr::matadd(expr, rhs),
            };
        }
        Ok((expr, kind))
    }

    fn mul(&mut self) -> Parsed {
        let (mut expr, mut kind) = self.kron_level()?;
        while matches!(self.peek().kind, TokenKind::Star) {
            let op = self.next();
            let (rhs, rkind) = self.kron_level()?;
            (expr, kind) = match (kind, rkind) {
                (Kind::Scalar, Kind::Scalar) => (Expr::smul(expr, rhs), Kind::Scalar),
                (Kind::Scalar, Kind::Matrix) => (Expr::scalmul(expr, rhs), Kind::Matrix),
                (Kind::Matrix, Kind::Matrix) => (Expr::matmul(expr, rhs), Kind::Matrix),
                (Kind::Matrix, Kind::Scalar) => {
                    return Err(self.error_at(
                        op.line,
                        op.column,
                        "scalar factor must be on the left of a matrix",
                    ))
                }
            };
        }
        Ok((expr, kind))
    }

    fn kron_level(&mut self) -> Parsed {
        let (mut expr, kind) = self.atom()?;
        while matches!(&self.peek().kind, TokenKind::Ident(name) if name == "kron") {
            let op = self.next();
            let (rhs, rkind) = self.atom()?;
            if kind != Kind::Matrix || rkind != Kind::Matrix {
                return Err(self.error_at(
                    op.line,
                    op.column,
                    "kron requires matrix operands",
                ));
            }
            expr = Expr::kron(expr, rhs);
        }
        Ok((expr, kind))
    }

    fn atom(&mut self) -> Parsed {
        let t = self.next();
        match t.kind {
            TokenKind::Number { value, imaginary } => {
                let c = if imaginary {
                    Complex64::new(0.0, value)
                } else {
                    Complex64::new(value, 0.0)
                };
                Ok((Expr::Const(c), Kind::Scalar))
            }
            TokenKind::Minus => {
                let (inner, kind) = self.atom()?;
                match inner {
                    Expr::Const(c) => Ok((Expr::Const(-c), kind)),
                    _ => Err(self.error_at(
                        t.line,
                        t.column,
                        "unary minus applies only to numeric literals",
                    )),
                }
            }
            TokenKind::LParen => {
                let result = self.add()?;
                self.expect(TokenKind::RParen, "closing `)`")?;
                Ok(result)
            }
            TokenKind::Ident(name) => self.call(&name, t.line, t.column),
            _ => Err(self.error_at(t.line, t.column, "expected an expression")),
        }
    }

    fn call(&mut self, name: &str, line: usize, column: usize) -> Parsed {
        match name {
            "bra" | "ket" => {
                self.expect(TokenKind::LParen, "`(`")?;
                let i = self.integer("basis index")?;
                self.expect(TokenKind::Comma, "`,`")?;
                let q = self.integer("base")?;
                self.expect(TokenKind::RParen, "closing `)`")?;
                let q = u32::try_from(q)
                    .map_err(|_| self.error_at(line, column, "base out of range"))?;
                let e = if name == "bra" { Expr::Bra(i, q) } else { Expr::Ket(i, q) };
                Ok((e, Kind::Matrix))
            }
            "tr" => {
                self.expect(TokenKind::LParen, "`(`")?;
                let (m, kind) = self.add()?;
                self.expect(TokenKind::RParen, "closing `)`")?;
                if kind != Kind::Matrix {
                    return Err(self.error_at(line, column, "tr requires a matrix"));
                }
                Ok((Expr::trace(m), Kind::Scalar))
            }
            "entry" => {
                self.expect(TokenKind::LParen, "`(`")?;
                let i = self.integer("row index")?;
                self.expect(TokenKind::Comma, "`,`")?;
                let j = self.integer("column index")?;
                self.expect(TokenKind::Comma, "`,`")?;
                let (m, kind) = self.add()?;
                self.expect(TokenKind::RParen, "closing `)`")?;
                if kind != Kind::Matrix {
                    return Err(self.error_at(line, column, "entry requires a matrix"));
                }
                Ok((Expr::entry(i, j, m), Kind::Scalar))
            }
            "trans" => {
                self.expect(TokenKind::LParen, "`(`")?;
                let (m, kind) = self.add()?;
                self.expect(TokenKind::RParen, "closing `)`")?;
                if kind != Kind::Matrix {
                    return Err(self.error_at(line, column, "trans requires a matrix"));
                }
                Ok((Expr::trans(m), Kind::Matrix))
            }
            "conj" => {
                self.expect(TokenKind::LParen, "`(`")?;
                let (e, kind) = self.add()?;
                self.expect(TokenKind::RParen, "closing `)`")?;
                Ok((Expr::apply(crate::lang::Endomorphism::Conjugate, e), kind))
            }
            other => Err(self.error_at(line, column, format!("unknown name `{other}`"))),
        }
    }

    fn integer(&mut self, what: &str) -> Result<u128, ParseError> {
        let t = self.next();
        match t.kind {
            TokenKind::Number { value, imaginary: false }
                if value.fract() == 0.0 && value >= 0.0 && value <= u128::MAX as f64 =>
            {
                Ok(value as u128)
            }
            _ => Err(self.error_at(t.line, t.column, format!("expected a nonnegative {what}"))),
        }
    }
}
