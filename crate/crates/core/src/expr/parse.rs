use std::fmt;

use thiserror::Error;

use super::{BinaryOp, Expr, UnaryOp};
use crate::jet::Elementary;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: expected {}, found {found}", expected.join(" | "))]
    Syntax {
        offset: usize,
        expected: Vec<&'static str>,
        found: String,
    },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::UnknownIdentifier { offset, .. } => *offset,
        }
    }
}

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

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(x) => write!(f, "number {x}"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::Caret => f.write_str("`^`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

const OPERAND: &[&str] = &["number", "identifier", "`(`", "`-`", "`+`"];

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i];
        let start = i;
        match ch {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => out.push((Tok::Plus, start)),
            b'-' => out.push((Tok::Minus, start)),
            b'*' => out.push((Tok::Star, start)),
            b'/' => out.push((Tok::Slash, start)),
            b'^' => out.push((Tok::Caret, start)),
            b'(' => out.push((Tok::LParen, start)),
            b')' => out.push((Tok::RParen, start)),
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &src[start..i];
                let x = text.parse::<f64>().map_err(|_| ParseError::Syntax {
                    offset: start,
                    expected: vec!["number"],
                    found: format!("`{text}`"),
                })?;
                out.push((Tok::Num(x), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(src[start..i].to_string()), start));
                continue;
            }
            _ => {
                let c = src[start..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax {
                    offset: start,
                    expected: vec!["token"],
                    found: format!("`{c}`"),
                });
            }
        }
        i += 1;
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

const BP_SUM: (u8, u8) = (10, 11);
const BP_PRODUCT: (u8, u8) = (20, 21);
const BP_UNARY: u8 = 30;
const BP_POWER: (u8, u8) = (40, 39);

impl Parser {
    fn peek(&self) -> &(Tok, usize) {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&'static str]) -> ParseError {
        let (tok, offset) = self.peek();
        ParseError::Syntax {
            offset: *offset,
            expected: expected.to_vec(),
            found: tok.to_string(),
        }
    }

    fn expect(&mut self, tok: Tok, name: &'static str) -> Result<(), ParseError> {
        if self.peek().0 == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[name]))
        }
    }

    fn expr(&mut self, min_bp: u8) -> Result<Expr, ParseError> {
        let mut lhs = self.prefix()?;
        loop {
            let (op, (lbp, rbp)) = match self.peek().0 {
                Tok::Plus => (Some(BinaryOp::Add), BP_SUM),
                Tok::Minus => (Some(BinaryOp::Sub), BP_SUM),
                Tok::Star => (Some(BinaryOp::Mul), BP_PRODUCT),
                Tok::Slash => (Some(BinaryOp::Div), BP_PRODUCT),
                Tok::Caret => (None, BP_POWER),
                _ => break,
            };
            if lbp < min_bp {
                break;
            }
            self.bump();
            match op {
                Some(op) => {
                    let rhs = self.expr(rbp)?;
                    lhs = Expr::binary(op, lhs, rhs);
                }
                None => {
                    let at = self.peek().1;
                    let exponent = self.expr(rbp)?;
                    lhs = Expr::pow(lhs, integer_exponent(&exponent, at)?);
                }
            }
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Expr, ParseError> {
        let (tok, offset) = self.peek().clone();
        match tok {
            Tok::Num(x) => {
                self.bump();
                Ok(Expr::real(x))
            }
            Tok::Minus => {
                self.bump();
                Ok(Expr::unary(UnaryOp::Neg, self.expr(BP_UNARY)?))
            }
            Tok::Plus => {
                self.bump();
                self.expr(BP_UNARY)
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr(0)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                self.identifier(&name, offset)
            }
            _ => Err(self.error(OPERAND)),
        }
    }

    fn identifier(&mut self, name: &str, offset: usize) -> Result<Expr, ParseError> {
        let wrap: fn(Expr) -> Expr = match name {
            "u1" => return Ok(Expr::Coord(0)),
            "u2" => return Ok(Expr::Coord(1)),
            "u3" => return Ok(Expr::Coord(2)),
            "i" => return Ok(Expr::imag_unit()),
            "pi" => return Ok(Expr::real(std::f64::consts::PI)),
            "exp" => |e| Expr::call(Elementary::Exp, e),
            "sin" => |e| Expr::call(Elementary::Sin, e),
            "cos" => |e| Expr::call(Elementary::Cos, e),
            "sqrt" => |e| Expr::call(Elementary::Sqrt, e),
            "log" => |e| Expr::call(Elementary::Log, e),
            "re" => |e| Expr::unary(UnaryOp::Re, e),
            "im" => |e| Expr::unary(UnaryOp::Im, e),
            "conj" => |e| Expr::unary(UnaryOp::Conj, e),
            _ => {
                return Err(ParseError::UnknownIdentifier {
                    name: name.to_string(),
                    offset,
                })
            }
        };
        self.expect(Tok::LParen, "`(`")?;
        let arg = self.expr(0)?;
        self.expect(Tok::RParen, "`)`")?;
        Ok(wrap(arg))
    }
}

fn integer_exponent(e: &Expr, offset: usize) -> Result<i32, ParseError> {
    let bad = || ParseError::Syntax {
        offset,
        expected: vec!["integer exponent"],
        found: format!("`{e}`"),
    };
    if e.uses_coordinates() {
        return Err(bad());
    }
    let v = e.value([0.0; 3]).map_err(|_| bad())?;
    let r = v.re.round();
    if v.im != 0.0 || (v.re - r).abs() > 1e-9 || r.abs() > i32::MAX as f64 {
        return Err(bad());
    }
    Ok(r as i32)
}

/// Parses an expression. Whitespace is insignificant.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
    };
    let e = p.expr(0)?;
    if p.peek().0 != Tok::End {
        return Err(p.error(&["`+`", "`-`", "`*`", "`/`", "`^`", "end of input"]));
    }
    Ok(e)
}
