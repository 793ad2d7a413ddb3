//! Second fundamental form, classification of hypersurfaces in `ℝ⁴`, and the
//! branch identities of the two model cases.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frame::{FrameData, FrameField};
use crate::jet::Jet;
use crate::report::{mean, std_dev, ConditionReport, ScoreKind};
use crate::sampling::SampleSet;

use super::checks::{bilinear, norm2, pluriharmonic_check, values, weierstrass_check, Immersion, PointJets};

type C = Complex64;

/// Tolerance at which classification prerequisites must hold.
pub const PREREQ_TOL: f64 = 1e-8;

/// Tolerances below this cannot separate the invariants from rounding noise;
/// classification at such a tolerance is always inconclusive.
pub const NOISE_FLOOR: f64 = 64.0 * f64::EPSILON;

const REAL_FRAME: [FrameField; 3] = [FrameField::X, FrameField::Y, FrameField::T];

/// Eigenvalues of a symmetric 3×3 matrix in descending order (closed form).
pub fn symmetric_eigenvalues(m: [[f64; 3]; 3]) -> [f64; 3] {
    let off = m[0][1].powi(2) + m[0][2].powi(2) + m[1][2].powi(2);
    let mut e = if off == 0.0 {
        [m[0][0], m[1][1], m[2][2]]
    } else {
        let q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
        let diag = (m[0][0] - q).powi(2) + (m[1][1] - q).powi(2) + (m[2][2] - q).powi(2);
        let p = ((diag + 2.0 * off) / 6.0).sqrt();
        let b: [[f64; 3]; 3] =
            std::array::from_fn(|i| std::array::from_fn(|j| (m[i][j] - if i == j { q } else { 0.0 }) / p));
        let det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
            + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
        let phi = (det / 2.0).clamp(-1.0, 1.0).acos() / 3.0;
        let hi = q + 2.0 * p * phi.cos();
        let lo = q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos();
        [hi, 3.0 * q - hi - lo, lo]
    };
    e.sort_by(|a, b| b.total_cmp(a));
    e
}

/// `h(V, W) = -⟨VWf, ν⟩` on `(X, Y, T)` with `ν = Δ_R f / ‖Δ_R f‖`, together
/// with its largest asymmetry `|h(V,W) - h(W,V)|`.
pub fn second_fundamental_form(pj: &PointJets) -> Result<([[f64; 3]; 3], f64)> {
    let r = values(&pj.laplacian_r()?);
    let len = norm2(&r).sqrt();
    let nu: Vec<C> = r.iter().map(|x| x / len).collect();
    let first: Vec<Vec<Jet<f64>>> = REAL_FRAME.iter().map(|w| pj.apply(*w, &pj.f)).collect::<Result<_>>()?;
    let mut h = [[0.0; 3]; 3];
    for (i, v) in REAL_FRAME.iter().enumerate() {
        for (j, wf) in first.iter().enumerate() {
            let vwf = values(&pj.apply(*v, wf)?);
            h[i][j] = -bilinear(&vwf, &nu).re;
        }
    }
    let mut asym = 0.0f64;
    for i in 0..3 {
        for j in 0..i {
            asym = asym.max((h[i][j] - h[j][i]).abs());
        }
    }
    Ok((h, asym))
}

/// Principal curvatures at every sample point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShapeSpectrum {
    pub eigenvalues: Vec<[f64; 3]>,
    pub mean: [f64; 3],
    /// Largest deviation of each sorted eigenvalue from its mean.
    pub spread: [f64; 3],
    pub max_asymmetry: f64,
}

impl ShapeSpectrum {
    /// Largest deviation of any eigenvalue from `target`.
    pub fn deviation_from(&self, target: [f64; 3]) -> f64 {
        self.eigenvalues
            .iter()
            .flat_map(|e| (0..3).map(move |k| (e[k] - target[k]).abs()))
            .fold(0.0, f64::max)
    }
}

fn require_unit_normal(pj: &PointJets, tol: f64) -> Result<()> {
    let phi = values(&pj.phi()?);
    let tf = values(&pj.apply(FrameField::T, &pj.f)?);
    let r = values(&pj.laplacian_r()?);
    let ortho = bilinear(&r, &phi).norm().max(bilinear(&r, &tf).norm());
    if ortho >= tol || norm2(&r).sqrt() < tol {
        return Err(Error::PrerequisiteFailed(format!(
            "Laplacian is not a nonzero normal (orthogonality residual {ortho:e})"
        )));
    }
    Ok(())
}

pub fn shape_spectrum(imm: &Immersion, samples: &SampleSet, tol: f64) -> Result<ShapeSpectrum> {
    if imm.dim() != 4 {
        return Err(Error::WrongDimension {
            expected: 4,
            actual: imm.dim(),
        });
    }
    let rows = imm.per_point(samples, |pj| {
        require_unit_normal(pj, tol)?;
        let (h, asym) = second_fundamental_form(pj)?;
        if asym > tol {
            return Err(Error::NonSymmetric { asymmetry: asym });
        }
        let sym: [[f64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| 0.5 * (h[i][j] + h[j][i])));
        Ok((symmetric_eigenvalues(sym), asym))
    })?;
    let eigenvalues: Vec<[f64; 3]> = rows.iter().map(|r| r.0).collect();
    let mean_k = |k: usize| mean(&eigenvalues.iter().map(|e| e[k]).collect::<Vec<_>>());
    let mean: [f64; 3] = std::array::from_fn(mean_k);
    let spread = std::array::from_fn(|k| eigenvalues.iter().map(|e| (e[k] - mean[k]).abs()).fold(0.0, f64::max));
    Ok(ShapeSpectrum {
        max_asymmetry: rows.iter().map(|r| r.1).fold(0.0, f64::max),
        eigenvalues,
        mean,
        spread,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Sphere,
    Cylinder,
    Inconclusive,
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Shape::Sphere => "sphere",
            Shape::Cylinder => "cylinder",
            Shape::Inconclusive => "inconclusive",
        })
    }
}

/// The classification label with the invariants it was decided on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub shape: Shape,
    pub tol: f64,
    pub max_abs_c: f64,
    /// Largest per-component standard deviation of `f - 2Δ_R f`.
    pub sphere_constancy: f64,
    pub spectrum: ShapeSpectrum,
    pub sphere_deviation: f64,
    pub cylinder_deviation: f64,
    /// Largest `|b' - i/2|, |c' - i/2|` after the gauge solving `c' = i/2` in phase.
    pub gauge_residual: f64,
}

/// Residual of the gauge `v = ½ arg(i/2 / c)` bringing the frame to
/// `b = c = i/2`, infinite where `c` vanishes.
pub fn cylinder_gauge_residual(frame: &FrameData<f64>) -> Result<f64> {
    let c = &frame.c;
    let c0 = c.value();
    if c0.norm() < 1e-12 {
        return Ok(f64::INFINITY);
    }
    let half_i = C::new(0.0, 0.5);
    // log of c rotated by its value stays off the branch cut
    let log_c = c.scale(c0.inv()).ln()?.add_constant(c0.ln());
    let v = (-log_c).add_constant(half_i.ln()).im().scale_real(0.5);
    let b_new = frame.b.value() + C::i() * frame.tf(&v)?.value();
    let c_new = (C::i() * 2.0 * v.value()).exp() * c0;
    Ok((b_new - half_i).norm().max((c_new - half_i).norm()))
}

fn component_std(rows: &[Vec<f64>]) -> f64 {
    let n = rows.first().map_or(0, Vec::len);
    (0..n)
        .map(|k| std_dev(&rows.iter().map(|r| r[k]).collect::<Vec<_>>()))
        .fold(0.0, f64::max)
}

fn require_prerequisites(imm: &Immersion, samples: &SampleSet) -> Result<()> {
    if imm.dim() != 4 {
        return Err(Error::WrongDimension {
            expected: 4,
            actual: imm.dim(),
        });
    }
    let mut reports = weierstrass_check(imm, samples, PREREQ_TOL)?;
    reports.extend(pluriharmonic_check(imm, samples, PREREQ_TOL)?);
    if let Some(bad) = reports.iter().find(|r| !r.pass) {
        return Err(Error::PrerequisiteFailed(format!(
            "{} fails (score {:e})",
            bad.id, bad.score
        )));
    }
    Ok(())
}

pub fn classify(imm: &Immersion, samples: &SampleSet, tol: f64) -> Result<Classification> {
    require_prerequisites(imm, samples)?;
    let rows = imm.per_point(samples, |pj| {
        let r = values(&pj.laplacian_r()?);
        let f = values(&pj.f);
        let sphere: Vec<f64> = f.iter().zip(&r).map(|(a, b)| (a - b * 2.0).re).collect();
        Ok((pj.frame.c.value().norm(), sphere, cylinder_gauge_residual(&pj.frame)?))
    })?;
    let spectrum = shape_spectrum(imm, samples, PREREQ_TOL)?;
    let max_abs_c = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let sphere_constancy = component_std(&rows.iter().map(|r| r.1.clone()).collect::<Vec<_>>());
    let gauge_residual = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    let sphere_deviation = spectrum.deviation_from([0.5; 3]);
    let cylinder_deviation = spectrum.deviation_from([1.0, 0.0, 0.0]);
    let shape = if tol < NOISE_FLOOR {
        Shape::Inconclusive
    } else if max_abs_c < tol && sphere_constancy < tol && sphere_deviation < tol {
        Shape::Sphere
    } else if cylinder_deviation < tol && gauge_residual < tol {
        Shape::Cylinder
    } else {
        Shape::Inconclusive
    };
    Ok(Classification {
        shape,
        tol,
        max_abs_c,
        sphere_constancy,
        spectrum,
        sphere_deviation,
        cylinder_deviation,
        gauge_residual,
    })
}

fn max_diff(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Identities of the cylinder case in the frame with `b = c = i/2`.
pub fn cylinder_identities(imm: &Immersion, samples: &SampleSet, tol: f64) -> Result<Vec<ConditionReport>> {
    let rows = imm.per_point(samples, |pj| {
        let x = FrameField::X;
        let g = pj.laplacian_gl()?;
        let r = values(&pj.laplacian_r()?);
        let xf = pj.apply(x, &pj.f)?;
        let xxf = pj.apply(x, &xf)?;
        let xxxf = pj.apply(x, &xxf)?;
        let x4f = values(&pj.apply(x, &xxxf)?);
        let zbf: Vec<C> = values(&pj.apply(FrameField::Zbar, &pj.f)?)
            .iter()
            .map(|z| z * std::f64::consts::FRAC_1_SQRT_2)
            .collect();
        let neg = |v: &[C]| v.iter().map(|z| -z).collect::<Vec<_>>();
        let half_i = C::new(0.0, 0.5);
        Ok([
            values(&pj.apply(FrameField::Y, &g)?)
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max),
            max_diff(&values(&pj.apply(x, &g)?), &zbf),
            max_diff(&values(&xxf), &neg(&r)),
            max_diff(&values(&xxxf), &neg(&values(&xf))),
            max_diff(&x4f, &r),
            (pj.frame.b.value() - half_i)
                .norm()
                .max((pj.frame.c.value() - half_i).norm()),
        ])
    })?;
    let col = |k: usize| rows.iter().map(|r| r[k]).collect::<Vec<_>>();
    let spec = [
        ("cylinder.Y_dgl", "Y Dgl f = 0"),
        ("cylinder.X_dgl", "X Dgl f = Zbar f / sqrt 2"),
        ("cylinder.XX", "XXf = -DR f"),
        ("cylinder.XXX", "XXXf = -Xf"),
        ("cylinder.X4", "XXXXf = DR f"),
        ("cylinder.frame", "b = c = i/2"),
    ];
    Ok(spec
        .iter()
        .enumerate()
        .map(|(k, (id, d))| ConditionReport::from_residuals(*id, *d, col(k), tol, samples))
        .collect())
}

/// Constants of the Sasakian case: `‖Δ_GL f‖² = ½`, `‖Z̄Δ_GL f‖² = ¼`,
/// `‖TΔ_GL f‖² = ⅛` and constancy of `f - 2Δ_R f`.
pub fn sphere_constants(imm: &Immersion, samples: &SampleSet, tol: f64) -> Result<Vec<ConditionReport>> {
    let rows = imm.per_point(samples, |pj| {
        let g = pj.laplacian_gl()?;
        let r = values(&pj.laplacian_r()?);
        let f = values(&pj.f);
        let gv = values(&g);
        let zbg = values(&pj.apply(FrameField::Zbar, &g)?);
        let tg = values(&pj.apply(FrameField::T, &g)?);
        let sphere: Vec<f64> = f.iter().zip(&r).map(|(a, b)| (a - b * 2.0).re).collect();
        Ok(([norm2(&gv), norm2(&zbg), norm2(&tg)], sphere))
    })?;
    let targets = [
        ("sphere.dgl_norm2", "|Dgl f|^2 = 1/2", 0.5),
        ("sphere.zbar_dgl_norm2", "|Zbar Dgl f|^2 = 1/4", 0.25),
        ("sphere.t_dgl_norm2", "|T Dgl f|^2 = 1/8", 0.125),
    ];
    let mut out: Vec<ConditionReport> = targets
        .iter()
        .enumerate()
        .map(|(k, (id, d, want))| {
            let vals: Vec<f64> = rows.iter().map(|r| r.0[k]).collect();
            let res = vals.iter().map(|v| (v - want).abs()).collect();
            ConditionReport::from_residuals(*id, *d, res, tol, samples).with_measured("value_mean", mean(&vals))
        })
        .collect();
    let sphere: Vec<Vec<f64>> = rows.into_iter().map(|r| r.1).collect();
    let n = sphere.first().map_or(0, Vec::len);
    let means: Vec<f64> = (0..n)
        .map(|k| mean(&sphere.iter().map(|r| r[k]).collect::<Vec<_>>()))
        .collect();
    let dev = sphere
        .iter()
        .map(|r| r.iter().zip(&means).map(|(a, m)| (a - m).abs()).fold(0.0, f64::max))
        .collect();
    let constancy = component_std(&sphere);
    out.push(
        ConditionReport::from_residuals("sphere.f_minus_2dr", "f - 2 DR f is constant", dev, tol, samples)
            .with_score(constancy, ScoreKind::StdDev),
    );
    Ok(out)
}
