//! A small expression language over the chart coordinates `u1`, `u2`, `u3`.
//!
//! ```text
//! expr    = sum ;
//! sum     = product { ("+" | "-") product } ;
//! product = unary { ("*" | "/") unary } ;
//! unary   = "-" unary | "+" unary | power ;
//! power   = atom [ "^" unary ] ;            (* right associative, integer constant *)
//! atom    = number | ident | ident "(" expr ")" | "(" expr ")" ;
//! number  = digit { digit } [ "." { digit } ] [ ("e" | "E") [ "+" | "-" ] digit { digit } ] ;
//! ident   = "u1" | "u2" | "u3" | "i" | "pi"
//!         | "exp" | "sin" | "cos" | "sqrt" | "log" | "re" | "im" | "conj" ;
//! ```
//!
//! `re`, `im` and `conj` act coefficient-wise on jets. They are not complex
//! analytic, but are exact here because every coordinate is real.

mod parse;

use std::fmt;

use num_complex::{Complex, Complex64};

use crate::jet::{Elementary, Jet, JetError};
use crate::scalar::Real;

pub use parse::{parse, ParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Re,
    Im,
    Conj,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Literal(Complex64),
    Coord(usize),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Elementary, Box<Expr>),
}

impl Expr {
    pub fn real(x: f64) -> Self {
        Expr::Literal(Complex64::new(x, 0.0))
    }

    pub fn imag_unit() -> Self {
        Expr::Literal(Complex64::new(0.0, 1.0))
    }

    pub fn coord(axis: usize) -> Self {
        assert!(axis < 3);
        Expr::Coord(axis)
    }

    pub fn unary(op: UnaryOp, e: Expr) -> Self {
        Expr::Unary(op, Box::new(e))
    }

    pub fn binary(op: BinaryOp, a: Expr, b: Expr) -> Self {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn call(f: Elementary, e: Expr) -> Self {
        Expr::Call(f, Box::new(e))
    }

    pub fn pow(e: Expr, n: i32) -> Self {
        Expr::Pow(Box::new(e), n)
    }

    pub fn add(self, other: Expr) -> Self {
        Self::binary(BinaryOp::Add, self, other)
    }

    pub fn sub(self, other: Expr) -> Self {
        Self::binary(BinaryOp::Sub, self, other)
    }

    pub fn mul(self, other: Expr) -> Self {
        Self::binary(BinaryOp::Mul, self, other)
    }

    pub fn div(self, other: Expr) -> Self {
        Self::binary(BinaryOp::Div, self, other)
    }

    /// Evaluates the expression as a jet of the given order at `point`.
    pub fn eval<S: Real>(&self, point: [S; 3], order: usize) -> Result<Jet<S>, JetError> {
        crate::jet::check_order(order)?;
        self.eval_unchecked(point, order)
    }

    fn eval_unchecked<S: Real>(&self, point: [S; 3], order: usize) -> Result<Jet<S>, JetError> {
        Ok(match self {
            Expr::Literal(z) => Jet::constant(Complex::new(S::lit(z.re), S::lit(z.im)), order, point),
            Expr::Coord(axis) => Jet::variable(*axis, order, point),
            Expr::Unary(op, e) => {
                let v = e.eval_unchecked(point, order)?;
                match op {
                    UnaryOp::Neg => -v,
                    UnaryOp::Re => v.re(),
                    UnaryOp::Im => v.im(),
                    UnaryOp::Conj => v.conj(),
                }
            }
            Expr::Binary(op, a, b) => {
                let x = a.eval_unchecked(point, order)?;
                let y = b.eval_unchecked(point, order)?;
                match op {
                    BinaryOp::Add => x + y,
                    BinaryOp::Sub => x - y,
                    BinaryOp::Mul => x * y,
                    BinaryOp::Div => x.try_div(&y)?,
                }
            }
            Expr::Pow(e, n) => e.eval_unchecked(point, order)?.powi(*n)?,
            Expr::Call(f, e) => e.eval_unchecked(point, order)?.elementary(*f)?,
        })
    }

    /// Point value of the expression.
    pub fn value(&self, point: [f64; 3]) -> Result<Complex64, JetError> {
        Ok(self.eval(point, 0)?.value())
    }

    pub fn uses_coordinates(&self) -> bool {
        match self {
            Expr::Literal(_) => false,
            Expr::Coord(_) => true,
            Expr::Unary(_, e) | Expr::Pow(e, _) | Expr::Call(_, e) => e.uses_coordinates(),
            Expr::Binary(_, a, b) => a.uses_coordinates() || b.uses_coordinates(),
        }
    }
}

fn func_name(f: Elementary) -> &'static str {
    match f {
        Elementary::Exp => "exp",
        Elementary::Sin => "sin",
        Elementary::Cos => "cos",
        Elementary::Sqrt => "sqrt",
        Elementary::Log => "log",
    }
}

fn write_real(f: &mut fmt::Formatter<'_>, x: f64) -> fmt::Result {
    // `{:?}` is the shortest round-trip representation
    let s = format!("{x:?}");
    if x < 0.0 {
        write!(f, "(-{})", &s[1..])
    } else {
        f.write_str(&s)
    }
}

/// Fully parenthesized printing; `parse(&e.to_string())` reproduces any parsed tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Literal(z) => match (z.re == 0.0, z.im) {
                (true, im) if im == 1.0 => f.write_str("i"),
                (_, im) if im == 0.0 => write_real(f, z.re),
                (true, im) => {
                    f.write_str("(")?;
                    write_real(f, im)?;
                    f.write_str("*i)")
                }
                _ => {
                    f.write_str("(")?;
                    write_real(f, z.re)?;
                    f.write_str("+")?;
                    write_real(f, z.im)?;
                    f.write_str("*i)")
                }
            },
            Expr::Coord(axis) => write!(f, "u{}", axis + 1),
            Expr::Unary(op, e) => match op {
                UnaryOp::Neg => write!(f, "(-{e})"),
                UnaryOp::Re => write!(f, "re({e})"),
                UnaryOp::Im => write!(f, "im({e})"),
                UnaryOp::Conj => write!(f, "conj({e})"),
            },
            Expr::Binary(op, a, b) => {
                let sym = match op {
                    BinaryOp::Add => "+",
                    BinaryOp::Sub => "-",
                    BinaryOp::Mul => "*",
                    BinaryOp::Div => "/",
                };
                write!(f, "({a} {sym} {b})")
            }
            Expr::Pow(e, n) if *n < 0 => write!(f, "({e}^({n}))"),
            Expr::Pow(e, n) => write!(f, "({e}^{n})"),
            Expr::Call(func, e) => write!(f, "{}({e})", func_name(*func)),
        }
    }
}
