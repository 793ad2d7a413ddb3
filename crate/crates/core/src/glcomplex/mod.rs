//! The Garfield-Lee complex of a 3-dimensional pseudohermitian manifold.
//!
//! Every nonzero space is a line bundle, so a form is stored as its single
//! coefficient with respect to a fixed basis:
//!
//! | bidegree | space    | basis      |
//! |----------|----------|------------|
//! | (0,0)    | `E⁰⁰`    | `1`        |
//! | (1,0)    | `E¹⁰`    | `[ζ]`      |
//! | (0,1)    | `E⁰¹`    | `[ζ̄]`      |
//! | (2,0)    | `F²⁰`    | `ζ∧θ`      |
//! | (1,1)    | `F¹¹`    | `ζ̄∧θ`      |
//! | (2,1)    | `F²¹`    | `vol`      |
//!
//! Vector-valued forms carry one coefficient per target component and every
//! operator acts componentwise.

use crate::error::{Error, Result};
use crate::frame::FrameData;
use crate::jet::Jet;
use crate::scalar::{imag_unit, Real};

#[cfg(test)]
mod tests;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bidegree {
    E00,
    E10,
    E01,
    F20,
    F11,
    F21,
}

impl Bidegree {
    pub const ALL: [Bidegree; 6] = [
        Bidegree::E00,
        Bidegree::E10,
        Bidegree::E01,
        Bidegree::F20,
        Bidegree::F11,
        Bidegree::F21,
    ];

    pub fn pq(self) -> (usize, usize) {
        match self {
            Bidegree::E00 => (0, 0),
            Bidegree::E10 => (1, 0),
            Bidegree::E01 => (0, 1),
            Bidegree::F20 => (2, 0),
            Bidegree::F11 => (1, 1),
            Bidegree::F21 => (2, 1),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Bidegree::E00 => "(0,0)",
            Bidegree::E10 => "(1,0)",
            Bidegree::E01 => "(0,1)",
            Bidegree::F20 => "(2,0)",
            Bidegree::F11 => "(1,1)",
            Bidegree::F21 => "(2,1)",
        }
    }

    /// Total degree in the Rumin complex.
    pub fn degree(self) -> usize {
        match self {
            Bidegree::E00 => 0,
            Bidegree::E10 | Bidegree::E01 => 1,
            Bidegree::F20 | Bidegree::F11 => 2,
            Bidegree::F21 => 3,
        }
    }

    /// Image of this space under ★.
    pub fn star(self) -> Bidegree {
        match self {
            Bidegree::E00 => Bidegree::F21,
            Bidegree::F21 => Bidegree::E00,
            Bidegree::E10 => Bidegree::F20,
            Bidegree::F20 => Bidegree::E10,
            Bidegree::E01 => Bidegree::F11,
            Bidegree::F11 => Bidegree::E01,
        }
    }
}

impl std::fmt::Display for Bidegree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// A (possibly vector-valued) form given by its basis coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct GLForm<S: Real> {
    pub bidegree: Bidegree,
    pub coeffs: Vec<Jet<S>>,
}

impl<S: Real> GLForm<S> {
    pub fn scalar(bidegree: Bidegree, coeff: Jet<S>) -> Self {
        GLForm {
            bidegree,
            coeffs: vec![coeff],
        }
    }

    pub fn vector(bidegree: Bidegree, coeffs: Vec<Jet<S>>) -> Self {
        assert!(!coeffs.is_empty(), "a form needs at least one coefficient");
        GLForm { bidegree, coeffs }
    }

    /// The first (for scalar forms, the only) coefficient.
    pub fn coeff(&self) -> &Jet<S> {
        &self.coeffs[0]
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    /// Largest coefficient magnitude over all components and Taylor terms.
    pub fn max_abs(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c.max_abs().to_f64_lossy())
            .fold(0.0, f64::max)
    }

    /// Largest value magnitude at the base point.
    pub fn max_value(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c.value().norm().to_f64_lossy())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, s: crate::Cplx<S>) -> Self {
        self.map(|j| j.scale(s))
    }

    fn map(&self, f: impl Fn(&Jet<S>) -> Jet<S>) -> Self {
        GLForm {
            bidegree: self.bidegree,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    /// Sum of two forms of the same bidegree and dimension.
    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.bidegree != other.bidegree {
            return Err(Error::UndefinedOnBidegree(other.bidegree.label()));
        }
        if self.dim() != other.dim() {
            return Err(Error::WrongDimension {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(GLForm {
            bidegree: self.bidegree,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }
}

/// The Hodge-type star: relabels the basis, keeping the coefficient.
pub fn star<S: Real>(alpha: &GLForm<S>) -> GLForm<S> {
    GLForm {
        bidegree: alpha.bidegree.star(),
        coeffs: alpha.coeffs.clone(),
    }
}

/// Differential operators of the complex, bound to a frame at one point.
#[derive(Debug, Clone, Copy)]
pub struct GLComplex<'a, S: Real> {
    pub frame: &'a FrameData<S>,
}

fn undefined<T>(b: Bidegree) -> Result<T> {
    Err(Error::UndefinedOnBidegree(b.label()))
}

impl<'a, S: Real> GLComplex<'a, S> {
    pub fn new(frame: &'a FrameData<S>) -> Self {
        GLComplex { frame }
    }

    fn i() -> crate::Cplx<S> {
        imag_unit()
    }

    // Coefficient-level operators. Inputs are the basis coefficients listed in
    // the module table.

    /// `Z̄g - iag`, the `ζ̄∧ζ`-part shared by `D″` and `d″` on `E¹⁰`.
    fn zbar_minus_ia(&self, g: &Jet<S>) -> Result<Jet<S>> {
        Ok(self.frame.zbarf(g)? - (&self.frame.a * g) * Self::i())
    }

    /// `Zh + iāh`, the conjugate counterpart on `E⁰¹`.
    fn z_plus_iabar(&self, h: &Jet<S>) -> Result<Jet<S>> {
        Ok(self.frame.zf(h)? + (&self.frame.a.conj() * h) * Self::i())
    }

    /// `D′` on `E¹⁰`: `-(Tg + bg + iZ(Z̄g - iag))`.
    pub fn big_d_prime_10(&self, g: &Jet<S>) -> Result<Jet<S>> {
        let f = self.frame;
        let inner = self.zbar_minus_ia(g)?;
        Ok(-(f.tf(g)? + &f.b * g + f.zf(&inner)? * Self::i()))
    }

    /// `D″` on `E¹⁰`: `-(cg + iZ̄(Z̄g - iag))`.
    pub fn big_d_second_10(&self, g: &Jet<S>) -> Result<Jet<S>> {
        let f = self.frame;
        let inner = self.zbar_minus_ia(g)?;
        Ok(-(&f.c * g + f.zbarf(&inner)? * Self::i()))
    }

    /// `D′` on `E⁰¹`: `-(Th + b̄h - iZ̄(Zh + iāh))`.
    pub fn big_d_prime_01(&self, h: &Jet<S>) -> Result<Jet<S>> {
        let f = self.frame;
        let inner = self.z_plus_iabar(h)?;
        Ok(-(f.tf(h)? + &f.b.conj() * h - f.zbarf(&inner)? * Self::i()))
    }

    /// `D⁺` on `E⁰¹`: `-(c̄h - iZ(Zh + iāh))`.
    pub fn big_d_plus_01(&self, h: &Jet<S>) -> Result<Jet<S>> {
        let f = self.frame;
        let inner = self.z_plus_iabar(h)?;
        Ok(-(&f.c.conj() * h - f.zf(&inner)? * Self::i()))
    }

    /// `d″` on `F²⁰`: `-(Z̄g - iag)`.
    pub fn d_second_20(&self, g: &Jet<S>) -> Result<Jet<S>> {
        Ok(-self.zbar_minus_ia(g)?)
    }

    /// `d′` on `F¹¹`: `Zh + iāh`.
    pub fn d_prime_11(&self, h: &Jet<S>) -> Result<Jet<S>> {
        self.z_plus_iabar(h)
    }

    /// `Δ_GL f = -(ZZ̄f + iāZ̄f)`.
    pub fn laplacian_gl(&self, f: &Jet<S>) -> Result<Jet<S>> {
        let zb = self.frame.zbarf(f)?;
        Ok(-self.z_plus_iabar(&zb)?)
    }

    /// `Δ_R f = -ZZ̄f - iāZ̄f - Z̄Zf + iaZf`.
    pub fn laplacian_r(&self, f: &Jet<S>) -> Result<Jet<S>> {
        let z = self.frame.zf(f)?;
        Ok(self.laplacian_gl(f)? + self.d_second_20(&z)?)
    }

    // Form-level operators.

    fn lift(&self, alpha: &GLForm<S>, to: Bidegree, op: impl Fn(&Jet<S>) -> Result<Jet<S>>) -> Result<GLForm<S>> {
        Ok(GLForm {
            bidegree: to,
            coeffs: alpha.coeffs.iter().map(op).collect::<Result<_>>()?,
        })
    }

    /// `d′`: `E⁰⁰ → E¹⁰` (`f ↦ [Zf ζ]`) and `F¹¹ → F²¹`.
    pub fn d_prime(&self, alpha: &GLForm<S>) -> Result<GLForm<S>> {
        match alpha.bidegree {
            Bidegree::E00 => self.lift(alpha, Bidegree::E10, |f| self.frame.zf(f)),
            Bidegree::F11 => self.lift(alpha, Bidegree::F21, |h| self.d_prime_11(h)),
            b => undefined(b),
        }
    }

    /// `d″`: `E⁰⁰ → E⁰¹` (`f ↦ [Z̄f ζ̄]`) and `F²⁰ → F²¹`.
    pub fn d_second(&self, alpha: &GLForm<S>) -> Result<GLForm<S>> {
        match alpha.bidegree {
            Bidegree::E00 => self.lift(alpha, Bidegree::E01, |f| self.frame.zbarf(f)),
            Bidegree::F20 => self.lift(alpha, Bidegree::F21, |g| self.d_second_20(g)),
            b => undefined(b),
        }
    }

    /// `D′`: `E¹⁰ → F²⁰` and `E⁰¹ → F¹¹`.
    pub fn big_d_prime(&self, alpha: &GLForm<S>) -> Result<GLForm<S>> {
        match alpha.bidegree {
            Bidegree::E10 => self.lift(alpha, Bidegree::F20, |g| self.big_d_prime_10(g)),
            Bidegree::E01 => self.lift(alpha, Bidegree::F11, |h| self.big_d_prime_01(h)),
            b => undefined(b),
        }
    }

    /// `D″`: `E¹⁰ → F¹¹`.
    pub fn big_d_second(&self, alpha: &GLForm<S>) -> Result<GLForm<S>> {
        match alpha.bidegree {
            Bidegree::E10 => self.lift(alpha, Bidegree::F11, |g| self.big_d_second_10(g)),
            b => undefined(b),
        }
    }

    /// `D⁺`: `E⁰¹ → F²⁰`.
    pub fn big_d_plus(&self, alpha: &GLForm<S>) -> Result<GLForm<S>> {
        match alpha.bidegree {
            Bidegree::E01 => self.lift(alpha, Bidegree::F20, |h| self.big_d_plus_01(h)),
            b => undefined(b),
        }
    }

    /// The second-order Rumin operator on `E¹ = E¹⁰ ⊕ E⁰¹`, returned as its
    /// `F²⁰` and `F¹¹` components.
    pub fn rumin_d(&self, g: &GLForm<S>, h: &GLForm<S>) -> Result<(GLForm<S>, GLForm<S>)> {
        if g.bidegree != Bidegree::E10 {
            return undefined(g.bidegree);
        }
        if h.bidegree != Bidegree::E01 {
            return undefined(h.bidegree);
        }
        let f20 = self.big_d_prime(g)?.try_add(&self.big_d_plus(h)?)?;
        let f11 = self.big_d_second(g)?.try_add(&self.big_d_prime(h)?)?;
        Ok((f20, f11))
    }

    /// `d = d′ + d″` on `F² = F²⁰ ⊕ F¹¹`.
    pub fn d_top(&self, g: &GLForm<S>, h: &GLForm<S>) -> Result<GLForm<S>> {
        self.d_second(g)?.try_add(&self.d_prime(h)?)
    }

    /// Formal adjoint `δ′ = (-1)^{p+q} ★ d″ ★`, lowering `p`.
    ///
    /// Defined on `E¹⁰` and `F²¹`; zero on `E⁰⁰`.
    pub fn delta_prime(&self, alpha: &GLForm<S>) -> Result<GLForm<S>> {
        match alpha.bidegree {
            Bidegree::E00 => Ok(alpha.map(|c| Jet::zero(c.order(), c.base()))),
            Bidegree::E10 => self.lift(alpha, Bidegree::E00, |g| self.d_second_20(g)),
            Bidegree::F21 => self.lift(alpha, Bidegree::F11, |f| Ok(-self.frame.zbarf(f)?)),
            b => undefined(b),
        }
    }

    /// Formal adjoint `δ″ = (-1)^{p+q} ★ d′ ★`, lowering `q`.
    ///
    /// Defined on `E⁰¹` and `F²¹`; zero on `E⁰⁰`.
    pub fn delta_second(&self, alpha: &GLForm<S>) -> Result<GLForm<S>> {
        match alpha.bidegree {
            Bidegree::E00 => Ok(alpha.map(|c| Jet::zero(c.order(), c.base()))),
            Bidegree::E01 => self.lift(alpha, Bidegree::E00, |h| Ok(-self.d_prime_11(h)?)),
            Bidegree::F21 => self.lift(alpha, Bidegree::F20, |f| Ok(-self.frame.zf(f)?)),
            b => undefined(b),
        }
    }

    /// Residuals of the defining identities of the complex for a function `f`
    /// and a general one-form `[gζ] + [hζ̄]`.
    pub fn identity_residuals(&self, f: &Jet<S>, g: &Jet<S>, h: &Jet<S>) -> Result<IdentityResiduals> {
        let fr = self.frame;
        let zf = fr.zf(f)?;
        let zbf = fr.zbarf(f)?;
        let norm = |j: Jet<S>| j.value().norm().to_f64_lossy();
        let mixed_functions = norm(self.big_d_second_10(&zf)? + self.big_d_prime_01(&zbf)?);
        let pure_functions = norm(self.big_d_prime_10(&zf)? + self.big_d_plus_01(&zbf)?);
        let on_e10 = norm(self.d_prime_11(&self.big_d_second_10(g)?)? + self.d_second_20(&self.big_d_prime_10(g)?)?);
        let on_e01 = norm(self.d_prime_11(&self.big_d_prime_01(h)?)? + self.d_second_20(&self.big_d_plus_01(h)?)?);
        let (f20, f11) = self.rumin_d(
            &GLForm::scalar(Bidegree::E10, g.clone()),
            &GLForm::scalar(Bidegree::E01, h.clone()),
        )?;
        let d_after_d = self.d_top(&f20, &f11)?.max_value();
        Ok(IdentityResiduals {
            mixed_functions,
            pure_functions,
            on_e10,
            on_e01,
            d_after_d,
        })
    }

    /// `|Tf - (iδ′d′f - iδ″d″f)|` at the base point.
    pub fn reeb_residual(&self, f: &Jet<S>) -> Result<f64> {
        let form = GLForm::scalar(Bidegree::E00, f.clone());
        let a = self.delta_prime(&self.d_prime(&form)?)?;
        let b = self.delta_second(&self.d_second(&form)?)?;
        let rhs = (a.coeff() - b.coeff()) * Self::i();
        Ok((self.frame.tf(f)? - rhs).value().norm().to_f64_lossy())
    }

    /// `|Δ_R f - (2Δ_GL f - iTf)|` at the base point.
    pub fn laplacian_residual(&self, f: &Jet<S>) -> Result<f64> {
        let two = S::one() + S::one();
        let rhs = self.laplacian_gl(f)?.scale_real(two) - self.frame.tf(f)? * Self::i();
        Ok((self.laplacian_r(f)? - rhs).value().norm().to_f64_lossy())
    }
}

/// Pointwise residuals of the five anticommutation relations.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IdentityResiduals {
    /// `D′d″f + D″d′f`.
    pub mixed_functions: f64,
    /// `D′d′f + D⁺d″f`.
    pub pure_functions: f64,
    /// `d′D″ + d″D′` on `E¹⁰`.
    pub on_e10: f64,
    /// `d′D′ + d″D⁺` on `E⁰¹`.
    pub on_e01: f64,
    /// `d ∘ D` on a general one-form.
    pub d_after_d: f64,
}

impl IdentityResiduals {
    pub fn named(&self) -> [(&'static str, f64); 5] {
        [
            ("D'd''+D''d' on functions", self.mixed_functions),
            ("D'd'+D+d'' on functions", self.pure_functions),
            ("d'D''+d''D' on E10", self.on_e10),
            ("d'D'+d''D+ on E01", self.on_e01),
            ("d after D on E1", self.d_after_d),
        ]
    }

    /// Both components of `D(df)`.
    pub fn rumin_closure(&self) -> f64 {
        self.mixed_functions.max(self.pure_functions)
    }

    pub fn max(&self) -> f64 {
        self.named().iter().map(|(_, v)| *v).fold(0.0, f64::max)
    }
}
