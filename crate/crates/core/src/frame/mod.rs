//! Pseudohermitian frames built pointwise from chart data.
//!
//! A chart supplies a raw section `Z_raw` of `T¹⁰M` and a contact form `θ`,
//! both as expressions in the coordinates. At a point this module produces
//! jets of the normalized frame `(Z, Z̄, T)`, its dual coframe `(ζ, ζ̄, θ)`
//! and the structure functions `a, b, c` defined by
//!
//! ```text
//! i[Z, Z̄] = T + aZ + āZ̄,    [Z, T] = bZ + c̄Z̄,    [Z̄, T] = cZ + b̄Z̄.
//! ```
//!
//! The Levi form is `L(V, W) = -i dθ(V, W̄)`, so `dθ = iζ∧ζ̄` holds exactly
//! when `L(Z, Z) = 1`. Frame components are jets of order `K - 1` and the
//! structure functions of order `K - 2` when the chart is evaluated at order `K`.

mod linalg;

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::expr::{self, Expr, UnaryOp};
use crate::jet::{apply_field, Elementary, Jet};
use crate::sampling::{sample_domain, Domain, DEFAULT_MARGIN};
use crate::scalar::{imag_unit, Cplx, Real};

pub use linalg::{condition_number, inverse3, inverse3_values};

pub const DEFAULT_FRAME_TOL: f64 = 1e-9;

/// Frames whose coordinate matrix exceeds this condition number are rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// Coordinate components `(V¹, V², V³)` of a complex vector field.
pub type Field<S> = [Jet<S>; 3];

/// Coefficients `ω_i` of a form `Σ ω_i du^i`.
pub type OneForm<S> = [Jet<S>; 3];

/// Antisymmetric coefficients `w_ij` of a two-form `½ Σ w_ij du^i ∧ du^j`.
pub type TwoForm<S> = [[Jet<S>; 3]; 3];

#[derive(Debug, Clone, PartialEq)]
pub struct ChartSpec {
    pub name: String,
    pub domain: Domain,
    /// Raw generator of `T¹⁰M` in the coordinate basis.
    pub z: [Expr; 3],
    /// Contact form coefficients.
    pub theta: [Expr; 3],
}

impl ChartSpec {
    pub fn new(name: impl Into<String>, domain: Domain, z: [Expr; 3], theta: [Expr; 3]) -> Self {
        ChartSpec {
            name: name.into(),
            domain,
            z,
            theta,
        }
    }

    /// Parses the six component expressions.
    pub fn from_sources(name: impl Into<String>, domain: Domain, z: [&str; 3], theta: [&str; 3]) -> Result<Self> {
        let parse = |group: &str, k: usize, src: &str| {
            expr::parse(src).map_err(|source| Error::Expr {
                field: format!("{group}.u{}", k + 1),
                source,
            })
        };
        let z = [parse("Z", 0, z[0])?, parse("Z", 1, z[1])?, parse("Z", 2, z[2])?];
        let theta = [
            parse("theta", 0, theta[0])?,
            parse("theta", 1, theta[1])?,
            parse("theta", 2, theta[2])?,
        ];
        Ok(ChartSpec::new(name, domain, z, theta))
    }

    /// Pseudohermitian change of frame `Z' = e^{-iv} Z` for a real gauge `v`.
    ///
    /// Realness of `v` is checked on a fixed Halton sample of the domain.
    pub fn change_frame(&self, v: &Expr, tol: f64) -> Result<ChartSpec> {
        for p in sample_domain(&self.domain, 32, 0, DEFAULT_MARGIN) {
            let imag = v.value(p)?.im.abs();
            if imag > tol {
                return Err(Error::NonRealGauge { imag });
            }
        }
        let minus_i = Expr::unary(UnaryOp::Neg, Expr::imag_unit());
        let phase = Expr::call(Elementary::Exp, minus_i.mul(v.clone()));
        let z = std::array::from_fn(|k| phase.clone().mul(self.z[k].clone()));
        Ok(ChartSpec {
            name: format!("{} (gauged)", self.name),
            domain: self.domain,
            z,
            theta: self.theta.clone(),
        })
    }

    /// Pseudo-homothety `θ' = λθ` with the same CR structure.
    pub fn pseudo_homothety(&self, lambda: f64) -> ChartSpec {
        let theta = std::array::from_fn(|k| Expr::real(lambda).mul(self.theta[k].clone()));
        ChartSpec {
            name: format!("{} (θ scaled by {lambda})", self.name),
            domain: self.domain,
            z: self.z.clone(),
            theta,
        }
    }
}

/// The frame fields a function can be differentiated along.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FrameField {
    Z,
    Zbar,
    T,
    /// `(Z + Z̄)/√2`
    X,
    /// `i(Z - Z̄)/√2`
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerKind {
    /// Complex bilinear extension `⟨V, W⟩_θ`.
    Bilinear,
    /// Hermitian extension `(V, W)_θ`, antilinear in the second slot.
    Hermitian,
}

#[derive(Debug, Clone)]
pub struct FrameData<S: Real> {
    pub point: [S; 3],
    pub z: Field<S>,
    pub zbar: Field<S>,
    pub t: Field<S>,
    pub zeta: OneForm<S>,
    pub zetabar: OneForm<S>,
    /// Third coframe row; agrees with the chart's `θ`.
    pub theta_co: OneForm<S>,
    /// Contact form coefficients as evaluated from the chart (order `K`).
    pub theta: OneForm<S>,
    pub dtheta: TwoForm<S>,
    pub a: Jet<S>,
    pub b: Jet<S>,
    pub c: Jet<S>,
    /// `L(Z_raw, Z_raw)` before normalization.
    pub levi_raw: S,
}

fn eval_triple<S: Real>(exprs: &[Expr; 3], p: [S; 3], order: usize) -> Result<[Jet<S>; 3]> {
    Ok([
        exprs[0].eval(p, order)?,
        exprs[1].eval(p, order)?,
        exprs[2].eval(p, order)?,
    ])
}

fn sum3<S: Real>(terms: [Jet<S>; 3]) -> Jet<S> {
    let [x, y, z] = terms;
    x + y + z
}

/// `ω(V) = Σ ω_i V^i`.
pub fn pair<S: Real>(form: &OneForm<S>, v: &Field<S>) -> Jet<S> {
    sum3(std::array::from_fn(|i| &form[i] * &v[i]))
}

/// `w(V, W) = Σ w_ij V^i W^j`.
pub fn pair2<S: Real>(w: &TwoForm<S>, v: &Field<S>, u: &Field<S>) -> Jet<S> {
    let mut acc = Jet::zero(w[0][0].order(), v[0].base());
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                acc += &(&w[i][j] * &(&v[i] * &u[j]));
            }
        }
    }
    acc
}

/// Exterior derivative of a one-form, `(dω)_ij = ∂_i ω_j − ∂_j ω_i`.
pub fn exterior_derivative<S: Real>(form: &OneForm<S>) -> Result<TwoForm<S>> {
    let mut partials: Vec<[Jet<S>; 3]> = Vec::with_capacity(3);
    for component in form {
        partials.push([component.partial(0)?, component.partial(1)?, component.partial(2)?]);
    }
    Ok(std::array::from_fn(|i| {
        std::array::from_fn(|j| &partials[j][i] - &partials[i][j])
    }))
}

/// `(α ∧ β)_ij = α_i β_j − α_j β_i`.
pub fn wedge<S: Real>(alpha: &OneForm<S>, beta: &OneForm<S>) -> TwoForm<S> {
    std::array::from_fn(|i| std::array::from_fn(|j| &alpha[i] * &beta[j] - &alpha[j] * &beta[i]))
}

pub fn conj_field<S: Real>(v: &Field<S>) -> Field<S> {
    std::array::from_fn(|k| v[k].conj())
}

/// Lie bracket `[V, W]^k = V(W^k) − W(V^k)`.
pub fn bracket<S: Real>(v: &Field<S>, w: &Field<S>) -> Result<Field<S>> {
    let mut out = Vec::with_capacity(3);
    for k in 0..3 {
        out.push(apply_field(v, &w[k])? - apply_field(w, &v[k])?);
    }
    Ok(out.try_into().expect("three components"))
}

/// Builds the frame with the default tolerance.
pub fn build_frame<S: Real>(chart: &ChartSpec, point: [S; 3], order: usize) -> Result<FrameData<S>> {
    build_frame_with_tol(chart, point, order, DEFAULT_FRAME_TOL)
}

pub fn build_frame_with_tol<S: Real>(chart: &ChartSpec, point: [S; 3], order: usize, tol: f64) -> Result<FrameData<S>> {
    let theta = eval_triple(&chart.theta, point, order)?;
    let z_raw = eval_triple(&chart.z, point, order)?;
    for (k, th) in theta.iter().enumerate() {
        let imag = th.value().im.to_f64_lossy().abs();
        if imag > tol {
            return Err(Error::ChartParse {
                field: format!("theta.u{}", k + 1),
                message: format!("contact form must be real (imaginary part {imag:e})"),
            });
        }
    }

    let norm = |v: &[Jet<S>; 3]| {
        v.iter()
            .map(|j| j.value().norm_sqr())
            .fold(S::zero(), |a, b| a + b)
            .sqrt()
            .to_f64_lossy()
    };
    let contact = pair(&theta, &z_raw).value().norm().to_f64_lossy();
    let residual = contact / (norm(&theta) * norm(&z_raw)).max(f64::MIN_POSITIVE);
    if !(residual <= tol) {
        return Err(Error::ContactViolation { residual });
    }

    let dtheta = exterior_derivative(&theta)?;
    let levi = pair2(&dtheta, &z_raw, &conj_field(&z_raw)) * Complex::new(S::zero(), -S::one());
    let levi_raw = levi.value().re;
    if !(levi_raw > S::zero()) {
        return Err(Error::NotPseudoconvex {
            levi: levi_raw.to_f64_lossy(),
        });
    }
    let scale = levi.re().sqrt()?.recip()?;
    let z: Field<S> = std::array::from_fn(|k| &z_raw[k] * &scale);
    let zbar = conj_field(&z);

    let t = reeb_field(&theta, &dtheta, tol)?;

    let columns = [&z, &zbar, &t];
    let frame_matrix: [[Jet<S>; 3]; 3] = std::array::from_fn(|k| std::array::from_fn(|col| columns[col][k].clone()));
    let values = frame_matrix.clone().map(|row| row.map(|j| j.value()));
    let condition = condition_number(&values);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::DegenerateFrame { condition });
    }
    let [zeta, zetabar, theta_co] = inverse3(&frame_matrix)?;

    let (a, b, c) = structure_from_parts(&z, &zbar, &t, &zeta)?;
    Ok(FrameData {
        point,
        z,
        zbar,
        t,
        zeta,
        zetabar,
        theta_co,
        theta,
        dtheta,
        a,
        b,
        c,
        levi_raw,
    })
}

/// Least-squares solution of `θ(T) = 1`, `dθ(T, ∂_i) = 0` through the normal equations.
fn reeb_field<S: Real>(theta: &OneForm<S>, dtheta: &TwoForm<S>, tol: f64) -> Result<Field<S>> {
    let order = dtheta[0][1].order();
    let theta = theta.clone().map(|j| j.truncate(order));
    // rows of the 4x3 system matrix
    let rows: [[Jet<S>; 3]; 4] = std::array::from_fn(|r| {
        std::array::from_fn(|j| {
            if r == 0 {
                theta[j].clone()
            } else {
                dtheta[j][r - 1].clone()
            }
        })
    });
    let normal: [[Jet<S>; 3]; 3] = std::array::from_fn(|j| {
        std::array::from_fn(|k| {
            let mut acc = Jet::zero(order, theta[0].base());
            for row in &rows {
                acc += &(&row[j] * &row[k]);
            }
            acc
        })
    });
    let normal_values = normal.clone().map(|row| row.map(|j| j.value()));
    let condition = condition_number(&normal_values);
    if !(condition <= MAX_CONDITION * MAX_CONDITION) {
        return Err(Error::DegenerateFrame { condition });
    }
    let inv = inverse3(&normal)?;
    let t: Field<S> = std::array::from_fn(|j| sum3(std::array::from_fn(|k| &inv[j][k] * &theta[k])));

    let mut worst = (pair(&theta, &t).value() - Cplx::one()).norm();
    for row in &rows[1..] {
        worst = worst.max(pair(row, &t).value().norm());
    }
    let worst = worst.to_f64_lossy();
    if !(worst <= tol) {
        return Err(Error::DegenerateFrame {
            condition: worst / f64::EPSILON,
        });
    }
    Ok(t)
}

fn structure_from_parts<S: Real>(
    z: &Field<S>,
    zbar: &Field<S>,
    t: &Field<S>,
    zeta: &OneForm<S>,
) -> Result<(Jet<S>, Jet<S>, Jet<S>)> {
    let a = pair(zeta, &bracket(z, zbar)?) * imag_unit::<S>();
    let b = pair(zeta, &bracket(z, t)?);
    let c = pair(zeta, &bracket(zbar, t)?);
    Ok((a, b, c))
}

/// Recomputes `a = iζ[Z, Z̄]`, `b = ζ[Z, T]`, `c = ζ[Z̄, T]` from the frame jets.
pub fn structure_functions<S: Real>(frame: &FrameData<S>) -> Result<(Jet<S>, Jet<S>, Jet<S>)> {
    structure_from_parts(&frame.z, &frame.zbar, &frame.t, &frame.zeta)
}

impl<S: Real> FrameData<S> {
    /// Order of the frame component jets.
    pub fn order(&self) -> usize {
        self.z[0].order()
    }

    pub fn field(&self, which: FrameField) -> Field<S> {
        let r = S::FRAC_1_SQRT_2();
        match which {
            FrameField::Z => self.z.clone(),
            FrameField::Zbar => self.zbar.clone(),
            FrameField::T => self.t.clone(),
            FrameField::X => std::array::from_fn(|k| (&self.z[k] + &self.zbar[k]).scale_real(r)),
            FrameField::Y => std::array::from_fn(|k| (&self.z[k] - &self.zbar[k]) * Complex::new(S::zero(), r)),
        }
    }

    /// Derivative of `f` along a frame field.
    pub fn apply(&self, which: FrameField, f: &Jet<S>) -> Result<Jet<S>> {
        Ok(match which {
            FrameField::Z => apply_field(&self.z, f)?,
            FrameField::Zbar => apply_field(&self.zbar, f)?,
            FrameField::T => apply_field(&self.t, f)?,
            other => apply_field(&self.field(other), f)?,
        })
    }

    pub fn zf(&self, f: &Jet<S>) -> Result<Jet<S>> {
        self.apply(FrameField::Z, f)
    }

    pub fn zbarf(&self, f: &Jet<S>) -> Result<Jet<S>> {
        self.apply(FrameField::Zbar, f)
    }

    pub fn tf(&self, f: &Jet<S>) -> Result<Jet<S>> {
        self.apply(FrameField::T, f)
    }

    /// Coefficients of a coordinate vector in the frame `(Z, Z̄, T)`.
    pub fn expand(&self, v: [Cplx<S>; 3]) -> [Cplx<S>; 3] {
        let rows = [&self.zeta, &self.zetabar, &self.theta_co];
        std::array::from_fn(|r| (0..3).fold(Cplx::zero(), |acc, k| acc + rows[r][k].value() * v[k]))
    }

    /// Webster metric of two coordinate vectors at the base point.
    pub fn webster_inner(&self, v: [Cplx<S>; 3], w: [Cplx<S>; 3], kind: InnerKind) -> Cplx<S> {
        let p = self.expand(v);
        let q = self.expand(w);
        match kind {
            InnerKind::Bilinear => p[0] * q[1] + p[1] * q[0] + p[2] * q[2],
            InnerKind::Hermitian => p[0] * q[0].conj() + p[1] * q[1].conj() + p[2] * q[2].conj(),
        }
    }

    /// Levi form `L(V, W) = -i dθ(V, W̄)`.
    pub fn levi(&self, v: &Field<S>, w: &Field<S>) -> Jet<S> {
        pair2(&self.dtheta, v, &conj_field(w)) * Complex::new(S::zero(), -S::one())
    }

    /// Residuals of the frame identities at the base point.
    pub fn verify(&self) -> Result<StructureResiduals> {
        let abs = |z: Cplx<S>| z.norm().to_f64_lossy();
        let max_of = |it: &mut dyn Iterator<Item = f64>| it.fold(0.0f64, f64::max);

        let levi_normalization = abs(self.levi(&self.z, &self.z).value() - Cplx::one());

        let mut reeb = abs(pair(&self.theta, &self.t).value() - Cplx::one());
        for i in 0..3 {
            let col: OneForm<S> = std::array::from_fn(|j| self.dtheta[j][i].clone());
            reeb = reeb.max(abs(pair(&col, &self.t).value()));
        }

        let rows = [&self.zeta, &self.zetabar, &self.theta_co];
        let cols = [&self.z, &self.zbar, &self.t];
        let mut duality = 0.0f64;
        for (r, row) in rows.iter().enumerate() {
            for (k, col) in cols.iter().enumerate() {
                let want = if r == k { Cplx::one() } else { Cplx::zero() };
                duality = duality.max(abs(pair(row, col).value() - want));
            }
        }

        let i = imag_unit::<S>();
        let zz = wedge(&self.zeta, &self.zetabar);
        let zt = wedge(&self.zeta, &self.theta_co);
        let bt = wedge(&self.zetabar, &self.theta_co);
        let contact_form =
            max_of(&mut (0..9).map(|n| abs(self.dtheta[n / 3][n % 3].value() - zz[n / 3][n % 3].value() * i)));

        let a0 = self.a.value();
        let b0 = self.b.value();
        let c0 = self.c.value();
        let dzeta = exterior_derivative(&self.zeta)?;
        let dzetabar = exterior_derivative(&self.zetabar)?;
        let mut coframe = 0.0f64;
        for n in 0..9 {
            let (p, q) = (n / 3, n % 3);
            let rhs = i * a0 * zz[p][q].value() - b0 * zt[p][q].value() - c0 * bt[p][q].value();
            coframe = coframe.max(abs(dzeta[p][q].value() - rhs));
            let rhs_bar =
                i * a0.conj() * zz[p][q].value() - c0.conj() * zt[p][q].value() - b0.conj() * bt[p][q].value();
            coframe = coframe.max(abs(dzetabar[p][q].value() - rhs_bar));
        }

        let b_real_part = abs(b0 + b0.conj());
        let jacobi_jet = self.zf(&self.c)? * i - self.zbarf(&self.b)? * i + self.tf(&self.a)?
            - &self.a * &self.b
            - &self.a.conj() * &self.c;
        let jacobi = abs(jacobi_jet.value());

        let zzbar = bracket(&self.z, &self.zbar)?;
        let zt_br = bracket(&self.z, &self.t)?;
        let zbart_br = bracket(&self.zbar, &self.t)?;
        let mut brackets = 0.0f64;
        for k in 0..3 {
            let (z, zb, t) = (self.z[k].value(), self.zbar[k].value(), self.t[k].value());
            let r1 = i * zzbar[k].value() - (t + a0 * z + a0.conj() * zb);
            let r2 = zt_br[k].value() - (b0 * z + c0.conj() * zb);
            let r3 = zbart_br[k].value() - (c0 * z + b0.conj() * zb);
            brackets = brackets.max(abs(r1)).max(abs(r2)).max(abs(r3));
        }

        Ok(StructureResiduals {
            levi_normalization,
            reeb,
            duality,
            contact_form,
            coframe,
            b_real_part,
            jacobi,
            brackets,
        })
    }
}

/// Pointwise residuals of the frame identities.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StructureResiduals {
    /// `|L(Z, Z) − 1|`
    pub levi_normalization: f64,
    /// `θ(T) = 1` and `i_T dθ = 0`
    pub reeb: f64,
    /// coframe times frame against the identity
    pub duality: f64,
    /// `dθ = iζ∧ζ̄`
    pub contact_form: f64,
    /// `dζ = iaζ∧ζ̄ − bζ∧θ − cζ̄∧θ` and its conjugate
    pub coframe: f64,
    /// `b + b̄ = 0`
    pub b_real_part: f64,
    /// `iZc − iZ̄b + Ta − ab − āc = 0`
    pub jacobi: f64,
    /// frame expansion of the three brackets
    pub brackets: f64,
}

impl StructureResiduals {
    pub fn named(&self) -> [(&'static str, f64); 8] {
        [
            ("levi_normalization", self.levi_normalization),
            ("reeb", self.reeb),
            ("duality", self.duality),
            ("contact_form", self.contact_form),
            ("coframe", self.coframe),
            ("b_real_part", self.b_real_part),
            ("jacobi", self.jacobi),
            ("brackets", self.brackets),
        ]
    }

    pub fn max(&self) -> f64 {
        self.named().iter().map(|(_, r)| *r).fold(0.0, f64::max)
    }
}

pub fn verify_structure_equations<S: Real>(frame: &FrameData<S>, tol: f64) -> Result<(StructureResiduals, bool)> {
    let r = frame.verify()?;
    let ok = r.max() < tol;
    Ok((r, ok))
}

/// Residuals of `a' = e^{iv}(a − Z̄v)`, `b' = b + iTv`, `c' = e^{2iv}c` between
/// a frame and its gauge transform by `v`.
pub fn gauge_law_residuals<S: Real>(original: &FrameData<S>, gauged: &FrameData<S>, v: &Expr) -> Result<[f64; 3]> {
    let vj = v.eval(original.point, original.order() + 1)?;
    let phase = (imag_unit::<S>() * vj.value()).exp();
    let a_pred = (original.a.value() - original.zbarf(&vj)?.value()) * phase;
    let b_pred = original.b.value() + imag_unit::<S>() * original.tf(&vj)?.value();
    let c_pred = original.c.value() * phase * phase;
    let r = |x: Cplx<S>, y: Cplx<S>| (x - y).norm().to_f64_lossy();
    Ok([
        r(gauged.a.value(), a_pred),
        r(gauged.b.value(), b_pred),
        r(gauged.c.value(), c_pred),
    ])
}

/// `max |c|` decides whether the sampled structure is Sasakian.
pub fn is_sasakian(max_abs_c: f64, tol: f64) -> bool {
    max_abs_c < tol
}

#[cfg(test)]
mod tests;
