//! Truncated multivariate Taylor jets over three real coordinates.
//!
//! A [`Jet`] of order `K` stores, for every multi-index `α` with `|α| ≤ K`,
//! the Taylor-normalized coefficient `∂^α f(p) / α!` of a complex valued
//! function `f` at a base point `p`. With this normalization the product of
//! two jets is a plain truncated convolution of coefficient tables.
//!
//! Binary operators truncate to the smaller of the two orders (which is what
//! truncated Taylor arithmetic means) and panic when the base points differ.
//! The checked entry point [`jet_arith`] reports both conditions as errors.

mod layout;

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_complex::Complex;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::scalar::{Cplx, Real};

use layout::Layout;
pub use layout::{degree, factorial, len_for, MultiIndex, MAX_ORDER};

/// Values whose modulus is at or below this are treated as zero divisors.
pub const DIV_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("division by a jet whose value {modulus:e} is within the division epsilon")]
    DivisionNearZero { modulus: f64 },
    #[error("jet orders differ ({left} vs {right})")]
    OrderMismatch { left: usize, right: usize },
    #[error("jets live at different base points")]
    BasePointMismatch,
    #[error("jet of order 0 cannot be differentiated")]
    OrderExhausted,
    #[error("{function} evaluated at {value} is not on its principal branch domain")]
    BranchViolation { function: &'static str, value: String },
    #[error("jet order {0} exceeds the supported maximum {MAX_ORDER}")]
    OrderTooLarge(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Elementary {
    Exp,
    Sin,
    Cos,
    Sqrt,
    Log,
}

#[derive(Clone, PartialEq)]
pub struct Jet<S: Real> {
    order: usize,
    base: [S; 3],
    coeffs: Vec<Cplx<S>>,
}

impl<S: Real> fmt::Debug for Jet<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("order", &self.order)
            .field("base", &self.base)
            .field("value", &self.value())
            .finish_non_exhaustive()
    }
}

pub(crate) fn check_order(order: usize) -> Result<(), JetError> {
    if order > MAX_ORDER {
        Err(JetError::OrderTooLarge(order))
    } else {
        Ok(())
    }
}

impl<S: Real> Jet<S> {
    /// Constant function.
    ///
    /// # Panics
    /// If `order` exceeds [`MAX_ORDER`].
    pub fn constant(value: Cplx<S>, order: usize, base: [S; 3]) -> Self {
        check_order(order).expect("jet order");
        let mut coeffs = vec![Cplx::zero(); len_for(order)];
        coeffs[0] = value;
        Jet { order, base, coeffs }
    }

    pub fn zero(order: usize, base: [S; 3]) -> Self {
        Self::constant(Cplx::zero(), order, base)
    }

    /// The coordinate function `u_{axis}` seeded at `base`.
    pub fn variable(axis: usize, order: usize, base: [S; 3]) -> Self {
        assert!(axis < 3, "coordinate index out of range");
        let mut j = Self::constant(Complex::new(base[axis], S::zero()), order, base);
        if order >= 1 {
            j.coeffs[1 + axis] = Cplx::one();
        }
        j
    }

    /// Builds a jet from a complete Taylor-normalized coefficient table.
    pub fn from_coeffs(order: usize, base: [S; 3], coeffs: Vec<Cplx<S>>) -> Result<Self, JetError> {
        check_order(order)?;
        if coeffs.len() != len_for(order) {
            return Err(JetError::OrderMismatch {
                left: order,
                right: coeffs.len(),
            });
        }
        Ok(Jet { order, base, coeffs })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn base(&self) -> [S; 3] {
        self.base
    }

    pub fn value(&self) -> Cplx<S> {
        self.coeffs[0]
    }

    pub fn coeffs(&self) -> &[Cplx<S>] {
        &self.coeffs
    }

    /// Taylor-normalized coefficient at `alpha`, or `None` beyond the order.
    pub fn coeff(&self, alpha: MultiIndex) -> Option<Cplx<S>> {
        if degree(alpha) > self.order {
            return None;
        }
        Layout::get().index_of(alpha).map(|n| self.coeffs[n])
    }

    /// The partial derivative `∂^α f(p)` (coefficient times `α!`).
    pub fn derivative(&self, alpha: MultiIndex) -> Option<Cplx<S>> {
        self.coeff(alpha).map(|c| c * S::lit(factorial(alpha)))
    }

    /// Iterates `(α, coefficient)` in graded-lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (MultiIndex, Cplx<S>)> + '_ {
        let l = Layout::get();
        self.coeffs.iter().enumerate().map(move |(n, c)| (l.multi_index(n), *c))
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        Jet {
            order,
            base: self.base,
            coeffs: self.coeffs[..len_for(order)].to_vec(),
        }
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> S {
        self.coeffs.iter().map(|c| c.norm()).fold(S::zero(), |a, b| a.max(b))
    }

    fn map(&self, f: impl Fn(Cplx<S>) -> Cplx<S>) -> Self {
        Jet {
            order: self.order,
            base: self.base,
            coeffs: self.coeffs.iter().map(|&c| f(c)).collect(),
        }
    }

    /// Complex conjugate. Valid coefficient-wise since the coordinates are real.
    pub fn conj(&self) -> Self {
        self.map(|c| c.conj())
    }

    pub fn re(&self) -> Self {
        self.map(|c| Complex::new(c.re, S::zero()))
    }

    pub fn im(&self) -> Self {
        self.map(|c| Complex::new(c.im, S::zero()))
    }

    pub fn scale(&self, s: Cplx<S>) -> Self {
        self.map(|c| c * s)
    }

    pub fn scale_real(&self, s: S) -> Self {
        self.map(|c| c * s)
    }

    pub fn add_constant(&self, s: Cplx<S>) -> Self {
        let mut out = self.clone();
        out.coeffs[0] += s;
        out
    }

    fn assert_same_base(&self, other: &Self) {
        assert!(self.base == other.base, "jet arithmetic across different base points");
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Cplx<S>, Cplx<S>) -> Cplx<S>) -> Self {
        self.assert_same_base(other);
        let order = self.order.min(other.order);
        let n = len_for(order);
        Jet {
            order,
            base: self.base,
            coeffs: (0..n).map(|i| f(self.coeffs[i], other.coeffs[i])).collect(),
        }
    }

    fn mul_jet(&self, other: &Self) -> Self {
        self.assert_same_base(other);
        let order = self.order.min(other.order);
        let mut coeffs = vec![Cplx::zero(); len_for(order)];
        for &(i, j, t) in Layout::get().mul_table(order) {
            coeffs[t as usize] += self.coeffs[i as usize] * other.coeffs[j as usize];
        }
        Jet {
            order,
            base: self.base,
            coeffs,
        }
    }

    /// `self - value`, the nilpotent part of the jet.
    fn nilpotent(&self) -> Self {
        let mut h = self.clone();
        h.coeffs[0] = Cplx::zero();
        h
    }

    /// Evaluates `Σ_k series[k] h^k` where `h` is the nilpotent part.
    fn compose(&self, series: &[Cplx<S>]) -> Self {
        let h = self.nilpotent();
        let mut out = Self::constant(series[0], self.order, self.base);
        let mut power = Self::constant(Cplx::one(), self.order, self.base);
        for coef in series.iter().take(self.order + 1).skip(1) {
            power = power.mul_jet(&h);
            for (o, p) in out.coeffs.iter_mut().zip(&power.coeffs) {
                *o += *p * *coef;
            }
        }
        out
    }

    fn check_divisor(&self) -> Result<(), JetError> {
        let m = self.value().norm();
        if !(m > S::lit(DIV_EPSILON)) {
            return Err(JetError::DivisionNearZero {
                modulus: m.to_f64_lossy(),
            });
        }
        Ok(())
    }

    fn recip_unchecked(&self) -> Self {
        let inv = self.value().inv();
        let mut series = Vec::with_capacity(self.order + 1);
        let mut term = inv;
        for _ in 0..=self.order {
            series.push(term);
            term = -term * inv;
        }
        self.compose(&series)
    }

    pub fn recip(&self) -> Result<Self, JetError> {
        self.check_divisor()?;
        Ok(self.recip_unchecked())
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, JetError> {
        other.check_divisor()?;
        Ok(self.mul_jet(&other.recip_unchecked()))
    }

    pub fn exp(&self) -> Self {
        let e = self.value().exp();
        let mut series = Vec::with_capacity(self.order + 1);
        let mut fact = S::one();
        for k in 0..=self.order {
            if k > 0 {
                fact *= S::lit(k as f64);
            }
            series.push(e / fact);
        }
        self.compose(&series)
    }

    fn sin_cos_series(&self, shift: usize) -> Vec<Cplx<S>> {
        // d^k/dx^k sin = sin, cos, -sin, -cos, ...
        let s = self.value().sin();
        let cval = self.value().cos();
        let cycle = [s, cval, -s, -cval];
        let mut fact = S::one();
        (0..=self.order)
            .map(|k| {
                if k > 0 {
                    fact *= S::lit(k as f64);
                }
                cycle[(k + shift) % 4] / fact
            })
            .collect()
    }

    pub fn sin(&self) -> Self {
        self.compose(&self.sin_cos_series(0))
    }

    pub fn cos(&self) -> Self {
        self.compose(&self.sin_cos_series(1))
    }

    fn check_branch(&self, function: &'static str) -> Result<(), JetError> {
        let v = self.value();
        let eps = S::lit(DIV_EPSILON);
        let on_cut = v.re <= S::zero() && v.im.abs() <= eps * v.norm().max(S::one());
        if !(v.norm() > eps) || (on_cut && v.re < S::zero()) {
            return Err(JetError::BranchViolation {
                function,
                value: format!("{} + {}i", v.re, v.im),
            });
        }
        Ok(())
    }

    /// Principal square root. The value must be nonzero and off the negative real axis.
    pub fn sqrt(&self) -> Result<Self, JetError> {
        self.check_branch("sqrt")?;
        let v = self.value();
        let half = S::lit(0.5);
        // binomial(1/2, k) v^{1/2 - k}
        let mut series = Vec::with_capacity(self.order + 1);
        let mut binom = S::one();
        let mut pw = v.sqrt();
        let inv = v.inv();
        for k in 0..=self.order {
            if k > 0 {
                let kk = S::lit(k as f64);
                binom = binom * (half - (kk - S::one())) / kk;
                pw *= inv;
            }
            series.push(pw * binom);
        }
        Ok(self.compose(&series))
    }

    /// Principal logarithm. The value must be nonzero and off the negative real axis.
    pub fn ln(&self) -> Result<Self, JetError> {
        self.check_branch("log")?;
        let v = self.value();
        let inv = v.inv();
        let mut series = Vec::with_capacity(self.order + 1);
        series.push(v.ln());
        let mut pw = Cplx::one();
        for k in 1..=self.order {
            pw *= inv;
            let sign = if k % 2 == 1 { S::one() } else { -S::one() };
            series.push(pw * (sign / S::lit(k as f64)));
        }
        Ok(self.compose(&series))
    }

    pub fn powi(&self, n: i32) -> Result<Self, JetError> {
        let base = if n < 0 { self.recip()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Self::constant(Cplx::one(), self.order, self.base);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_jet(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul_jet(&sq);
            }
        }
        Ok(acc)
    }

    pub fn elementary(&self, f: Elementary) -> Result<Self, JetError> {
        match f {
            Elementary::Exp => Ok(self.exp()),
            Elementary::Sin => Ok(self.sin()),
            Elementary::Cos => Ok(self.cos()),
            Elementary::Sqrt => self.sqrt(),
            Elementary::Log => self.ln(),
        }
    }

    /// `∂f/∂u_axis` as a jet of order `K - 1`.
    pub fn partial(&self, axis: usize) -> Result<Self, JetError> {
        assert!(axis < 3, "coordinate index out of range");
        if self.order == 0 {
            return Err(JetError::OrderExhausted);
        }
        let l = Layout::get();
        let order = self.order - 1;
        let coeffs = (0..len_for(order))
            .map(|n| {
                let mut a = l.multi_index(n);
                a[axis] += 1;
                let factor = S::lit(a[axis] as f64);
                self.coeffs[l.index_of(a).expect("shifted index in range")] * factor
            })
            .collect();
        Ok(Jet {
            order,
            base: self.base,
            coeffs,
        })
    }
}

/// Checked binary arithmetic: equal orders and base points are required.
pub fn jet_arith<S: Real>(a: &Jet<S>, b: &Jet<S>, op: ArithOp) -> Result<Jet<S>, JetError> {
    if a.base != b.base {
        return Err(JetError::BasePointMismatch);
    }
    if a.order != b.order {
        return Err(JetError::OrderMismatch {
            left: a.order,
            right: b.order,
        });
    }
    Ok(match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
        ArithOp::Div => a.try_div(b)?,
    })
}

/// The derivative `Vf = Σ V_i ∂f/∂u_i` of `f` along the vector field `V`.
pub fn apply_field<S: Real>(field: &[Jet<S>; 3], f: &Jet<S>) -> Result<Jet<S>, JetError> {
    let mut acc: Option<Jet<S>> = None;
    for (axis, component) in field.iter().enumerate() {
        let term = component * &f.partial(axis)?;
        acc = Some(match acc {
            None => term,
            Some(a) => a + term,
        });
    }
    Ok(acc.expect("three components"))
}

macro_rules! binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl<S: Real> $trait<&Jet<S>> for &Jet<S> {
            type Output = Jet<S>;
            fn $method(self, rhs: &Jet<S>) -> Jet<S> {
                let f: fn(&Jet<S>, &Jet<S>) -> Jet<S> = $body;
                f(self, rhs)
            }
        }
        impl<S: Real> $trait<Jet<S>> for Jet<S> {
            type Output = Jet<S>;
            fn $method(self, rhs: Jet<S>) -> Jet<S> {
                (&self).$method(&rhs)
            }
        }
        impl<S: Real> $trait<&Jet<S>> for Jet<S> {
            type Output = Jet<S>;
            fn $method(self, rhs: &Jet<S>) -> Jet<S> {
                (&self).$method(rhs)
            }
        }
        impl<S: Real> $trait<Jet<S>> for &Jet<S> {
            type Output = Jet<S>;
            fn $method(self, rhs: Jet<S>) -> Jet<S> {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| a.zip_with(b, |x, y| x + y));
binop!(Sub, sub, |a, b| a.zip_with(b, |x, y| x - y));
binop!(Mul, mul, |a, b| a.mul_jet(b));
// Unchecked: a near-zero divisor produces non-finite coefficients like float division.
binop!(Div, div, |a, b| a.mul_jet(&b.recip_unchecked()));

impl<S: Real> Mul<Cplx<S>> for &Jet<S> {
    type Output = Jet<S>;
    fn mul(self, rhs: Cplx<S>) -> Jet<S> {
        self.scale(rhs)
    }
}

impl<S: Real> Mul<Cplx<S>> for Jet<S> {
    type Output = Jet<S>;
    fn mul(self, rhs: Cplx<S>) -> Jet<S> {
        self.scale(rhs)
    }
}

impl<S: Real> Neg for &Jet<S> {
    type Output = Jet<S>;
    fn neg(self) -> Jet<S> {
        self.map(|c| -c)
    }
}

impl<S: Real> Neg for Jet<S> {
    type Output = Jet<S>;
    fn neg(self) -> Jet<S> {
        (&self).neg()
    }
}

impl<S: Real> AddAssign<&Jet<S>> for Jet<S> {
    fn add_assign(&mut self, rhs: &Jet<S>) {
        *self = &*self + rhs;
    }
}

impl<S: Real> SubAssign<&Jet<S>> for Jet<S> {
    fn sub_assign(&mut self, rhs: &Jet<S>) {
        *self = &*self - rhs;
    }
}

#[cfg(test)]
mod tests;
