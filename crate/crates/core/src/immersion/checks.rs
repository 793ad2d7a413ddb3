//! Pointwise verifiers for isometric immersions `f: M → ℝⁿ`.
//!
//! Vectors in `ℂⁿ` are paired with the complex bilinear product
//! `⟨u, v⟩ = Σ uₖvₖ`; `‖u‖² = Σ |uₖ|²` is the hermitian norm.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::frame::{build_frame_with_tol, ChartSpec, FrameData, FrameField, DEFAULT_FRAME_TOL};
use crate::glcomplex::{Bidegree, GLComplex, GLForm};
use crate::jet::Jet;
use crate::report::{mean, std_dev, ConditionReport, ScoreKind};
use crate::sampling::SampleSet;

use super::ImmersionMap;

type C = Complex64;

/// Default Taylor order for immersion checks.
pub const DEFAULT_ORDER: usize = 5;

/// A map together with the chart it is defined on.
#[derive(Debug, Clone, Copy)]
pub struct Immersion<'a> {
    pub chart: &'a ChartSpec,
    pub map: &'a ImmersionMap,
    pub order: usize,
    pub frame_tol: f64,
}

/// Frame and component jets of `f` at one point.
#[derive(Debug, Clone)]
pub struct PointJets {
    pub frame: FrameData<f64>,
    pub f: Vec<Jet<f64>>,
}

impl PointJets {
    pub fn cx(&self) -> GLComplex<'_, f64> {
        GLComplex::new(&self.frame)
    }

    pub fn apply(&self, which: FrameField, v: &[Jet<f64>]) -> Result<Vec<Jet<f64>>> {
        v.iter().map(|c| self.frame.apply(which, c)).collect()
    }

    /// `φ = Zf`.
    pub fn phi(&self) -> Result<Vec<Jet<f64>>> {
        self.apply(FrameField::Z, &self.f)
    }

    /// `ψ = Z̄φ - iaφ = Z̄Zf - iaZf`.
    pub fn psi(&self, phi: &[Jet<f64>]) -> Result<Vec<Jet<f64>>> {
        phi.iter()
            .map(|p| Ok(self.frame.zbarf(p)? - (&self.frame.a * p) * C::i()))
            .collect()
    }

    pub fn laplacian_gl(&self) -> Result<Vec<Jet<f64>>> {
        let cx = self.cx();
        self.f.iter().map(|c| cx.laplacian_gl(c)).collect()
    }

    pub fn laplacian_r(&self) -> Result<Vec<Jet<f64>>> {
        let cx = self.cx();
        self.f.iter().map(|c| cx.laplacian_r(c)).collect()
    }
}

pub fn values(v: &[Jet<f64>]) -> Vec<C> {
    v.iter().map(Jet::value).collect()
}

pub fn bilinear(u: &[C], v: &[C]) -> C {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

pub fn hermitian(u: &[C], v: &[C]) -> C {
    u.iter().zip(v).map(|(a, b)| a * b.conj()).sum()
}

pub fn norm2(u: &[C]) -> f64 {
    u.iter().map(|a| a.norm_sqr()).sum()
}

pub fn conj(u: &[C]) -> Vec<C> {
    u.iter().map(|a| a.conj()).collect()
}

fn max_norm(u: impl IntoIterator<Item = C>) -> f64 {
    u.into_iter().map(|z| z.norm()).fold(0.0, f64::max)
}

impl<'a> Immersion<'a> {
    pub fn new(chart: &'a ChartSpec, map: &'a ImmersionMap) -> Self {
        Immersion {
            chart,
            map,
            order: DEFAULT_ORDER,
            frame_tol: DEFAULT_FRAME_TOL,
        }
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.order = order;
        self
    }

    pub fn dim(&self) -> usize {
        self.map.dim()
    }

    pub fn at(&self, p: [f64; 3]) -> Result<PointJets> {
        let frame = build_frame_with_tol(self.chart, p, self.order, self.frame_tol)?;
        let f = self.map.eval(p, self.order, self.frame_tol)?;
        Ok(PointJets { frame, f })
    }

    /// Evaluates `g` at every sample point in parallel, keeping point order.
    /// The first failing point (in sample order) determines the error.
    pub fn per_point<T: Send>(
        &self,
        samples: &SampleSet,
        g: impl Fn(&PointJets) -> Result<T> + Sync,
    ) -> Result<Vec<T>> {
        samples
            .points
            .par_iter()
            .map(|p| self.at(*p).and_then(|pj| g(&pj)))
            .collect::<Vec<_>>()
            .into_iter()
            .collect()
    }

    fn require_dim(&self, expected: usize) -> Result<()> {
        if self.dim() != expected {
            return Err(Error::WrongDimension {
                expected,
                actual: self.dim(),
            });
        }
        Ok(())
    }
}

fn column<const N: usize>(rows: &[[f64; N]], k: usize) -> Vec<f64> {
    rows.iter().map(|r| r[k]).collect()
}

/// The five Weierstraß-type conditions on `φ = Zf`:
///
/// 1. `D″φ + D′φ̄ = 0` (closure of `φζ + φ̄ζ̄`),
/// 2. `⟨φ, φ⟩ = 0`,
/// 3. `‖φ‖² = 1`,
/// 4. `‖ψ̄ - ψ‖² = 1` with `ψ = Z̄φ - iaφ`,
/// 5. `⟨ψ̄, φ⟩ = 0`.
pub fn weierstrass_check(imm: &Immersion, samples: &SampleSet, tol: f64) -> Result<Vec<ConditionReport>> {
    let rows = imm.per_point(samples, |pj| {
        let cx = pj.cx();
        let phi = pj.phi()?;
        let psi = pj.psi(&phi)?;
        let closure = phi
            .iter()
            .map(|p| Ok((cx.big_d_second_10(p)? + cx.big_d_prime_01(&p.conj())?).value()))
            .collect::<Result<Vec<_>>>()?;
        let (phi, psi) = (values(&phi), values(&psi));
        let diff: Vec<C> = psi.iter().map(|p| p.conj() - p).collect();
        Ok([
            max_norm(closure),
            bilinear(&phi, &phi).norm(),
            norm2(&phi),
            norm2(&diff),
            bilinear(&conj(&psi), &phi).norm(),
            norm2(&psi),
        ])
    })?;
    let phi2 = column(&rows, 2);
    let diff2 = column(&rows, 3);
    let unit = |xs: &[f64]| xs.iter().map(|x| (x - 1.0).abs()).collect::<Vec<_>>();
    Ok(vec![
        ConditionReport::from_residuals(
            "weierstrass.1",
            "D''phi + D'conj(phi) = 0",
            column(&rows, 0),
            tol,
            samples,
        ),
        ConditionReport::from_residuals("weierstrass.2", "<phi, phi> = 0", column(&rows, 1), tol, samples),
        ConditionReport::from_residuals("weierstrass.3", "|phi|^2 = 1", unit(&phi2), tol, samples)
            .with_measured("phi_norm2", mean(&phi2)),
        ConditionReport::from_residuals("weierstrass.4", "|conj(psi) - psi|^2 = 1", unit(&diff2), tol, samples)
            .with_measured("psi_norm2", mean(&column(&rows, 5)))
            .with_measured("psi_diff_norm2", mean(&diff2)),
        ConditionReport::from_residuals("weierstrass.5", "<conj(psi), phi> = 0", column(&rows, 4), tol, samples),
    ])
}

/// Pullback of the Euclidean metric equals the Webster metric:
/// `(Zf, Z̄f) = 0`, `(Tf, Zf) = 0`, `‖Tf‖² = ‖Zf‖² = 1`.
pub fn isometry_check(imm: &Immersion, samples: &SampleSet, tol: f64) -> Result<ConditionReport> {
    let rows = imm.per_point(samples, |pj| {
        let phi = values(&pj.phi()?);
        let tf = values(&pj.apply(FrameField::T, &pj.f)?);
        let (zz, tt) = (norm2(&phi), norm2(&tf));
        let residual = bilinear(&phi, &phi)
            .norm()
            .max(hermitian(&tf, &phi).norm())
            .max((zz - 1.0).abs())
            .max((tt - 1.0).abs());
        Ok([residual, zz, tt])
    })?;
    Ok(ConditionReport::from_residuals(
        "isometry",
        "(Zf,Zbar f) = (Tf,Zf) = 0, |Zf|^2 = |Tf|^2 = 1",
        column(&rows, 0),
        tol,
        samples,
    )
    .with_measured("zf_norm2", mean(&column(&rows, 1)))
    .with_measured("tf_norm2", mean(&column(&rows, 2))))
}

/// Both equivalent pluriharmonicity conditions, componentwise:
/// `TZf + bZf + iZ(Z̄Zf - iaZf) = 0` and `cZf + iZ̄(Z̄Zf - iaZf) = 0`.
pub fn pluriharmonic_check(imm: &Immersion, samples: &SampleSet, tol: f64) -> Result<Vec<ConditionReport>> {
    let rows = imm.per_point(samples, |pj| {
        let cx = pj.cx();
        let phi = pj.phi()?;
        let mut r = [0.0f64; 2];
        for p in &phi {
            r[0] = r[0].max(cx.big_d_prime_10(p)?.value().norm());
            r[1] = r[1].max(cx.big_d_second_10(p)?.value().norm());
        }
        Ok(r)
    })?;
    Ok(vec![
        ConditionReport::from_residuals(
            "pluriharmonic.2",
            "TZf + bZf + iZ(Zbar Zf - iaZf) = 0",
            column(&rows, 0),
            tol,
            samples,
        ),
        ConditionReport::from_residuals(
            "pluriharmonic.3",
            "cZf + iZbar(Zbar Zf - iaZf) = 0",
            column(&rows, 1),
            tol,
            samples,
        ),
    ])
}

/// Closure `D(ω + ω̄) = 0` of a vector-valued `(1,0)`-form, as its two components
/// `D′ω + D⁺ω̄` and `D″ω + D′ω̄`.
pub fn integrability_check(
    chart: &ChartSpec,
    order: usize,
    omega: impl Fn(&FrameData<f64>) -> Result<GLForm<f64>> + Sync,
    samples: &SampleSet,
    tol: f64,
) -> Result<Vec<ConditionReport>> {
    let rows = samples
        .points
        .par_iter()
        .map(|p| {
            let frame = build_frame_with_tol(chart, *p, order, DEFAULT_FRAME_TOL)?;
            let w = omega(&frame)?;
            if w.bidegree != Bidegree::E10 {
                return Err(Error::UndefinedOnBidegree(w.bidegree.label()));
            }
            let wbar = GLForm::vector(Bidegree::E01, w.coeffs.iter().map(Jet::conj).collect());
            let cx = GLComplex::new(&frame);
            let f20 = cx.big_d_prime(&w)?.try_add(&cx.big_d_plus(&wbar)?)?;
            let f11 = cx.big_d_second(&w)?.try_add(&cx.big_d_prime(&wbar)?)?;
            Ok([f20.max_value(), f11.max_value()])
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(vec![
        ConditionReport::from_residuals(
            "integrability.20",
            "D'w + D+ conj(w) = 0",
            column(&rows, 0),
            tol,
            samples,
        ),
        ConditionReport::from_residuals(
            "integrability.11",
            "D''w + D' conj(w) = 0",
            column(&rows, 1),
            tol,
            samples,
        ),
    ])
}

/// The four harmonicity conditions and whether their outcomes respect
/// `(1) ⇒ (2) ⇒ (3)` and, for `n = 4`, `(3) ⟺ (4)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicityChain {
    pub reports: Vec<ConditionReport>,
    pub implications_consistent: bool,
}

pub fn harmonicity_chain(imm: &Immersion, samples: &SampleSet, tol: f64) -> Result<HarmonicityChain> {
    let iso = isometry_check(imm, samples, tol)?;
    if !iso.pass {
        return Err(Error::PrerequisiteFailed(format!(
            "isometry check failed (score {:e})",
            iso.score
        )));
    }
    let ph = pluriharmonic_check(imm, samples, tol)?;
    let four = imm.dim() == 4;
    let rows = imm.per_point(samples, |pj| {
        let phi = values(&pj.phi()?);
        let tf = values(&pj.apply(FrameField::T, &pj.f)?);
        let g = values(&pj.laplacian_gl()?);
        let r_jets = pj.laplacian_r()?;
        let r = values(&r_jets);
        let ortho = bilinear(&r, &phi)
            .norm()
            .max(bilinear(&r, &conj(&phi)).norm())
            .max(bilinear(&r, &tf).norm());
        let mut parallel = 0.0f64;
        if four {
            for v in [FrameField::X, FrameField::Y, FrameField::T] {
                let vr = values(&pj.apply(v, &r_jets)?);
                parallel = parallel.max(bilinear(&vr, &r).norm());
            }
        }
        Ok([bilinear(&g, &g).norm(), ortho, norm2(&r).sqrt(), parallel, norm2(&g)])
    })?;
    let ph_max: Vec<f64> = ph[0]
        .residuals
        .iter()
        .zip(&ph[1].residuals)
        .map(|(a, b)| a.max(*b))
        .collect();
    let r1 = ConditionReport::from_residuals("harmonicity.1", "f is CR pluriharmonic", ph_max, tol, samples);
    let r2 = ConditionReport::from_residuals("harmonicity.2", "<Dgl f, Dgl f> = 0", column(&rows, 0), tol, samples)
        .with_measured("dgl_norm2", mean(&column(&rows, 4)));
    let norms = column(&rows, 2);
    let ortho = column(&rows, 1);
    let norm_std = std_dev(&norms);
    let ortho_max = ortho.iter().copied().fold(0.0, f64::max);
    let r3 = ConditionReport::from_residuals(
        "harmonicity.3",
        "DR f orthogonal to Zf, Zbar f, Tf with constant length",
        ortho.clone(),
        tol,
        samples,
    )
    .with_measured("dr_norm", mean(&norms))
    .with_measured("dr_norm_std", norm_std)
    .with_score(ortho_max.max(norm_std), ScoreKind::Combined);
    let mut reports = vec![r1, r2, r3];
    if four {
        let parallel: Vec<f64> = column(&rows, 3).iter().zip(&ortho).map(|(a, b)| a.max(*b)).collect();
        reports.push(ConditionReport::from_residuals(
            "harmonicity.4",
            "normal DR f / |DR f| is parallel",
            parallel,
            tol,
            samples,
        ));
    }
    let p: Vec<bool> = reports.iter().map(|r| r.pass).collect();
    let implications_consistent = !(p[0] && !p[1]) && !(p[1] && !p[2]) && p.get(3).map_or(true, |p4| *p4 == p[2]);
    Ok(HarmonicityChain {
        reports,
        implications_consistent,
    })
}

const ISOTROPY_PAIRS: [(&str, &str); 6] = [
    ("ZZ", "<ZG, ZG> = 0 for G = Dgl f"),
    ("ZZbar", "<ZG, Zbar G> = 0"),
    ("ZT", "<ZG, TG> = 0"),
    ("ZbarZbar", "<Zbar G, Zbar G> = 0"),
    ("ZbarT", "<Zbar G, TG> = 0"),
    ("TT", "<TG, TG> = 0"),
];

/// Total isotropy of the span of `ZG, Z̄G, TG` for `G = Δ_GL f` (`n = 4`).
pub fn isotropy_check(imm: &Immersion, samples: &SampleSet, tol: f64) -> Result<Vec<ConditionReport>> {
    imm.require_dim(4)?;
    let rows = imm.per_point(samples, |pj| {
        let g = pj.laplacian_gl()?;
        let gv = values(&g);
        let zg = values(&pj.apply(FrameField::Z, &g)?);
        let zbg = values(&pj.apply(FrameField::Zbar, &g)?);
        let tg = values(&pj.apply(FrameField::T, &g)?);
        Ok([
            bilinear(&gv, &gv).norm(),
            bilinear(&zg, &zg).norm(),
            bilinear(&zg, &zbg).norm(),
            bilinear(&zg, &tg).norm(),
            bilinear(&zbg, &zbg).norm(),
            bilinear(&zbg, &tg).norm(),
            bilinear(&tg, &tg).norm(),
            norm2(&gv),
        ])
    })?;
    let dgl = column(&rows, 0);
    if !(dgl.iter().all(|x| *x < tol)) {
        return Err(Error::PrerequisiteFailed(format!(
            "<Dgl f, Dgl f> = 0 fails (max {:e})",
            dgl.iter().copied().fold(0.0, f64::max)
        )));
    }
    let dgl_norm2 = mean(&column(&rows, 7));
    Ok(ISOTROPY_PAIRS
        .iter()
        .enumerate()
        .map(|(k, (name, description))| {
            ConditionReport::from_residuals(
                format!("isotropy.{name}"),
                *description,
                column(&rows, k + 1),
                tol,
                samples,
            )
            .with_measured("dgl_norm2", dgl_norm2)
        })
        .collect())
}
